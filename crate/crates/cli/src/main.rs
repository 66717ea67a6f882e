use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use wfspline::analytic::AnalyticField;
use wfspline::coefficients::{compute_macro_coefficients, macro_domain_points};
use wfspline::meshgen::{sequence, Role};
use wfspline::msh::{load_mesh, write_mesh};
use wfspline::sample::{sample, write_csv, write_vtk};
use wfspline::smoothing::synchronize;
use wfspline::study::{
    run_conservation, run_convergence, ErrorReference, GridPair, Method, StudyOptions, Variant,
};
use wfspline::transfer::{project_analytic, transfer_l2, transfer_linear, transfer_wf};
use wfspline::{build_splits, Located, QuadMode, SplineMode, TetMesh, TransferConfig};

#[derive(Parser)]
#[command(name = "wf", version, about = "Worsey-Farin spline transfer studies")]
struct Cli {
    /// Worker threads; 1 gives the deterministic serial path.
    #[arg(long, global = true, env = "WF_THREADS")]
    threads: Option<usize>,
    /// Seed of the generated mesh sequences.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Read `source_<level>.msh` and `target_<level>.msh` from here instead
    /// of generating meshes.
    #[arg(long, global = true)]
    mesh_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the source and target mesh sequences as MSH files.
    GenMeshes {
        #[arg(long, default_value = "1..3")]
        grids: GridRange,
        #[arg(long, default_value = "meshes")]
        out: PathBuf,
    },
    /// Error and observed order of a transfer over a grid sequence.
    Convergence {
        #[command(flatten)]
        t: TransferArgs,
        #[arg(long, default_value = "1..3")]
        grids: GridRange,
        /// Measure against the source field or the analytic function.
        #[arg(long, value_enum, default_value_t = ReferenceArg::Source)]
        reference: ReferenceArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mass change of each pipeline step for the three spline variants.
    Conserve {
        #[arg(long, value_enum, default_value_t = FieldArg::U1)]
        field: FieldArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "1")]
        grids: GridRange,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a field at tensor Gauss points and export VTK and CSV.
    Sample {
        /// Gauss points per axis.
        #[arg(long, default_value_t = 33)]
        n: usize,
        /// Sample the transferred field on this grid level instead of the
        /// analytic one.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        t: TransferArgs,
        #[arg(long, default_value = "samples")]
        out: PathBuf,
    },
    /// Split points, barycentrics and subtetrahedron volumes of an element.
    SplitInspect {
        #[arg(long, default_value_t = 1)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        elem: usize,
    },
    /// The 91 coefficients of an element's spline for a synchronized field.
    Coeffs {
        #[arg(long, value_enum, default_value_t = FieldArg::U1)]
        field: FieldArg,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        elem: usize,
    },
}

#[derive(Args, Clone)]
struct TransferArgs {
    #[arg(long, value_enum, default_value_t = FieldArg::U1)]
    field: FieldArg,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Wf)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = SplineArg::C1)]
    spline: SplineArg,
    #[arg(long, value_enum, default_value_t = QuadArg::Fixed)]
    quad: QuadArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    U1,
    U2,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Wf,
    Linear,
    L2,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplineArg {
    C1,
    C0,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    Source,
    Analytic,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuadArg {
    Fixed,
    Adaptive,
}

impl From<FieldArg> for AnalyticField {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::U1 => AnalyticField::U1,
            FieldArg::U2 => AnalyticField::U2,
        }
    }
}

impl TransferArgs {
    fn method(&self) -> Method {
        match self.method {
            MethodArg::Wf => Method::Wf,
            MethodArg::Linear => Method::Linear,
            MethodArg::L2 => Method::L2,
        }
    }

    fn quad(&self) -> QuadMode {
        match self.quad {
            QuadArg::Fixed => QuadMode::Fixed,
            QuadArg::Adaptive => QuadMode::adaptive(),
        }
    }

    fn spline(&self) -> SplineMode {
        match self.spline {
            SplineArg::C1 => SplineMode::Geometric,
            SplineArg::C0 => SplineMode::GlobalProjection,
        }
    }
}

/// Inclusive level range written `a..b` or `a`.
#[derive(Clone, Copy, Debug)]
struct GridRange(usize, usize);

impl std::str::FromStr for GridRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad level {t:?}: {e}"));
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let a = parse(s)?;
                (a, a)
            }
        };
        if a == 0 || b < a {
            return Err(format!("invalid grid range {s:?}"));
        }
        Ok(GridRange(a, b))
    }
}

fn mesh_path(dir: &Path, role: Role, level: usize) -> PathBuf {
    let name = match role {
        Role::Source => "source",
        Role::Target => "target",
    };
    dir.join(format!("{name}_{level}.msh"))
}

struct Meshes<'a> {
    dir: Option<&'a Path>,
    seed: u64,
}

impl Meshes<'_> {
    fn grids(&self, r: GridRange) -> Result<Vec<GridPair>> {
        match self.dir {
            None => Ok(wfspline::study::generated_grids(r.0, r.1, self.seed)),
            Some(dir) => (r.0..=r.1)
                .map(|level| {
                    let load = |role| {
                        let p = mesh_path(dir, role, level);
                        load_mesh(&p).with_context(|| format!("loading {}", p.display()))
                    };
                    Ok(GridPair {
                        level,
                        source: load(Role::Source)?,
                        target: load(Role::Target)?,
                    })
                })
                .collect(),
        }
    }

    fn source(&self, level: usize) -> Result<TetMesh> {
        Ok(self.grids(GridRange(level, level))?.remove(0).source)
    }
}

fn write_out(out: &Option<PathBuf>, name: &str, text: &str) -> Result<()> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let p = dir.join(name);
        std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let meshes = Meshes {
        dir: cli.mesh_dir.as_deref(),
        seed: cli.seed,
    };
    match cli.cmd {
        Command::GenMeshes { grids, out } => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            println!("role,level,elements,vertices,h");
            for role in [Role::Source, Role::Target] {
                for (i, m) in sequence(role, grids.1, cli.seed).iter().enumerate() {
                    let level = i + 1;
                    if level < grids.0 {
                        continue;
                    }
                    write_mesh(m, &mesh_path(&out, role, level))?;
                    println!(
                        "{},{level},{},{},{:.14e}",
                        if role == Role::Source { "source" } else { "target" },
                        m.num_tets(),
                        m.num_vertices(),
                        m.h()
                    );
                }
            }
        }
        Command::Convergence { t, grids, reference, out } => {
            let k = t.k;
            let pairs = meshes.grids(grids)?;
            let opts = StudyOptions {
                spline: t.spline(),
                quad: t.quad(),
                reference: match reference {
                    ReferenceArg::Source => ErrorReference::Source,
                    ReferenceArg::Analytic => ErrorReference::Analytic,
                },
                ..StudyOptions::default()
            };
            let field = AnalyticField::from(t.field);
            let report = run_convergence(field, &pairs, k, t.method(), &opts)?;
            let csv = report.to_csv();
            print!("{csv}");
            write_out(
                &out,
                &format!("convergence_{}_{}_k{k}.csv", field.name(), t.method().name()),
                &csv,
            )?;
            let fails = report.band_failures();
            if !fails.is_empty() {
                for f in fails {
                    eprintln!("band check failed: {f}");
                }
                return Ok(ExitCode::from(2));
            }
        }
        Command::Conserve { field, k, grids, out } => {
            let field = AnalyticField::from(field);
            for g in meshes.grids(grids)? {
                let r = run_conservation(field, &g, k, &Variant::ALL)?;
                let csv = r.to_csv();
                println!("# {} grid {} k={k} source mass {:.14e}", field.name(), g.level, r.source_mass);
                print!("{csv}");
                write_out(&out, &format!("conservation_{}_grid{}_k{k}.csv", field.name(), g.level), &csv)?;
            }
        }
        Command::Sample { n, grid, t, out } => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let exact = AnalyticField::from(t.field);
            let samples = match grid {
                None => sample(&exact, n)?,
                Some(level) => {
                    let g = meshes.grids(GridRange(level, level))?.remove(0);
                    let source = project_analytic(&exact, &g.source, t.k, &QuadMode::Fixed)?;
                    let located = Located::new(g.source);
                    let quad = t.quad();
                    let target = match t.method() {
                        Method::Wf => {
                            let splits = build_splits(&located.mesh)?;
                            let cfg = TransferConfig {
                                degree: t.k,
                                quad,
                                spline: t.spline(),
                            };
                            transfer_wf(&source, &located, &splits, &g.target, &cfg)?.target
                        }
                        Method::Linear => transfer_linear(&source, &located, &g.target, t.k, &quad)?,
                        Method::L2 => transfer_l2(&source, &located, &g.target, t.k, &quad)?,
                    };
                    let tl = Located::new(g.target);
                    sample(&target.on(&tl), n)?
                }
            };
            write_vtk(&samples, &format!("{} n={n}", exact.name()), &out.join("samples.vtk"))?;
            write_csv(&samples, &out.join("samples.csv"))?;
            println!("{}", samples.len());
        }
        Command::SplitInspect { grid, elem } => {
            let mesh = meshes.source(grid)?;
            if elem >= mesh.num_tets() {
                bail!("element {elem} out of range (mesh has {})", mesh.num_tets());
            }
            let splits = build_splits(&mesh)?;
            let s = &splits[elem];
            println!("element {elem} vertices {:?}", mesh.tets[elem]);
            println!("incenter {:.14e} {:.14e} {:.14e}", s.incenter.x, s.incenter.y, s.incenter.z);
            println!("kappa {:.14e} {:.14e} {:.14e} {:.14e}", s.kappa[0], s.kappa[1], s.kappa[2], s.kappa[3]);
            for (label, (p, sig)) in [5, 12, 19, 26].iter().zip(s.face_points.iter().zip(&s.sigma)) {
                println!(
                    "p{label} {:.14e} {:.14e} {:.14e} sigma {:.14e} {:.14e} {:.14e}",
                    p.x, p.y, p.z, sig[0], sig[1], sig[2]
                );
            }
            for (a, g) in s.subtets.iter().enumerate() {
                println!("subtet {} volume {:.14e}", a + 1, g.volume);
            }
        }
        Command::Coeffs { field, k, grid, elem } => {
            let mesh = meshes.source(grid)?;
            if elem >= mesh.num_tets() {
                bail!("element {elem} out of range (mesh has {})", mesh.num_tets());
            }
            let source = project_analytic(&AnalyticField::from(field), &mesh, k, &QuadMode::Fixed)?;
            let data = synchronize(&mesh, &source)?;
            let splits = build_splits(&mesh)?;
            let c = compute_macro_coefficients(&splits[elem], &data[elem]);
            let dp = macro_domain_points(&splits[elem]);
            println!("index,x,y,z,coefficient");
            for g in 0..91 {
                println!(
                    "{},{:.14e},{:.14e},{:.14e},{:.14e}",
                    g + 1,
                    dp[g].x,
                    dp[g].y,
                    dp[g].z,
                    c.0[g]
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
