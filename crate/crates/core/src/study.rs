//! Convergence and conservation studies over source/target mesh sequences.

use std::fmt::Write as _;

use crate::analytic::AnalyticField;
use crate::bvh::Located;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::meshgen::{sequence, Role};
use crate::mesh::TetMesh;
use crate::split::build_splits;
use crate::transfer::{
    l2_errors, mass_local, project_analytic, transfer_l2, transfer_linear, transfer_wf, QuadMode,
    SplineMode, TransferConfig, ERROR_POINTS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Wf,
    Linear,
    L2,
}

impl Method {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "wf" => Some(Method::Wf),
            "linear" => Some(Method::Linear),
            "l2" => Some(Method::L2),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Wf => "wf",
            Method::Linear => "linear",
            Method::L2 => "l2",
        }
    }
}

pub struct GridPair {
    pub level: usize,
    pub source: TetMesh,
    pub target: TetMesh,
}

/// Generated source/target pairs for levels `first..=last`.
pub fn generated_grids(first: usize, last: usize, seed: u64) -> Vec<GridPair> {
    let src = sequence(Role::Source, last, seed);
    let tgt = sequence(Role::Target, last, seed);
    src.into_iter()
        .zip(tgt)
        .enumerate()
        .skip(first - 1)
        .map(|(i, (source, target))| GridPair {
            level: i + 1,
            source,
            target,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub source_elems: usize,
    pub target_elems: usize,
    pub h: f64,
    pub error: f64,
    pub grad_error: f64,
    /// Observed orders against the previous row.
    pub order: Option<f64>,
    pub grad_order: Option<f64>,
    /// |∫ target − ∫ source|.
    pub mass_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub field: AnalyticField,
    pub method: Method,
    pub k: usize,
    pub rows: Vec<ConvergenceRow>,
}

/// What the transferred field is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorReference {
    /// The discontinuous source field the transfer started from.
    Source,
    /// The analytic function the source was projected from.
    Analytic,
}

#[derive(Debug, Clone, Copy)]
pub struct StudyOptions {
    pub spline: SplineMode,
    pub quad: QuadMode,
    pub error_points: usize,
    pub reference: ErrorReference,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            spline: SplineMode::Geometric,
            quad: QuadMode::Fixed,
            error_points: ERROR_POINTS,
            reference: ErrorReference::Source,
        }
    }
}

fn order(coarse: f64, fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (coarse / fine).ln() / (h_coarse / h_fine).ln()
}

/// Transfers the projection of `field` from each source mesh to its target
/// and measures the result against the chosen reference.
pub fn run_convergence(
    field: AnalyticField,
    grids: &[GridPair],
    k: usize,
    method: Method,
    opts: &StudyOptions,
) -> Result<ConvergenceReport> {
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for g in grids {
        let source = project_analytic(&field, &g.source, k, &QuadMode::Fixed)?;
        let located = Located::new(g.source.clone());
        let target = match method {
            Method::Wf => {
                let splits = build_splits(&located.mesh)?;
                let cfg = TransferConfig {
                    degree: k,
                    quad: opts.quad,
                    spline: opts.spline,
                };
                transfer_wf(&source, &located, &splits, &g.target, &cfg)?.target
            }
            Method::Linear => transfer_linear(&source, &located, &g.target, k, &opts.quad)?,
            Method::L2 => transfer_l2(&source, &located, &g.target, k, &opts.quad)?,
        };
        let tl = Located::new(g.target.clone());
        let err = match opts.reference {
            ErrorReference::Source => l2_errors(&target.on(&tl), &source.on(&located), opts.error_points)?,
            ErrorReference::Analytic => l2_errors(&target.on(&tl), &field, opts.error_points)?,
        };
        let h = g.target.h();
        let (order_v, order_g) = match rows.last() {
            Some(p) => (
                Some(order(p.error, err.value, p.h, h)),
                Some(order(p.grad_error, err.grad_magnitude, p.h, h)),
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            level: g.level,
            source_elems: g.source.num_tets(),
            target_elems: g.target.num_tets(),
            h,
            error: err.value,
            grad_error: err.grad_magnitude,
            order: order_v,
            grad_order: order_g,
            mass_error: (target.mass(&g.target) - source.mass(&g.source)).abs(),
        });
    }
    Ok(ConvergenceReport {
        field,
        method,
        k,
        rows,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.14e}"))
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "field,method,k,level,source_elems,target_elems,h,l2_error,grad_l2_error,order,grad_order,mass_error\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{:.14e},{:.14e},{:.14e},{},{},{:.14e}",
                self.field.name(),
                self.method.name(),
                self.k,
                r.level,
                r.source_elems,
                r.target_elems,
                r.h,
                r.error,
                r.grad_error,
                fmt_opt(r.order),
                fmt_opt(r.grad_order),
                r.mass_error
            );
        }
        s
    }

    /// Accepted ranges of observed orders, for the smooth field and the
    /// spline transfer only.
    pub fn bands(&self) -> Option<((f64, f64), (f64, f64))> {
        if self.field != AnalyticField::U1 || self.method != Method::Wf {
            return None;
        }
        match self.k {
            1 => Some(((1.8, 2.3), (0.8, 1.3))),
            2 => Some(((2.6, 3.3), (1.7, 2.3))),
            _ => None,
        }
    }

    /// Descriptions of every order outside its band.
    pub fn band_failures(&self) -> Vec<String> {
        let Some((bv, bg)) = self.bands() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for r in &self.rows {
            for (name, o, (lo, hi)) in [("value", r.order, bv), ("gradient", r.grad_order, bg)] {
                if let Some(o) = o {
                    if !(lo..=hi).contains(&o) {
                        out.push(format!("level {} {name} order {o:.3} outside [{lo}, {hi}]", r.level));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    GeometricC1,
    GeometricC1Adaptive,
    GlobalC0Adaptive,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::GeometricC1,
        Variant::GeometricC1Adaptive,
        Variant::GlobalC0Adaptive,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::GeometricC1 => "geometric_c1",
            Variant::GeometricC1Adaptive => "geometric_c1_adaptive",
            Variant::GlobalC0Adaptive => "global_c0_adaptive",
        }
    }

    pub fn config(&self, k: usize) -> TransferConfig {
        match self {
            Variant::GeometricC1 => TransferConfig::new(k),
            Variant::GeometricC1Adaptive => TransferConfig {
                degree: k,
                quad: QuadMode::adaptive(),
                spline: SplineMode::Geometric,
            },
            Variant::GlobalC0Adaptive => TransferConfig {
                degree: k,
                quad: QuadMode::adaptive(),
                spline: SplineMode::GlobalProjection,
            },
        }
    }
}

/// Signed mass change of each pipeline step and the absolute total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassSteps {
    pub variant: Variant,
    /// Quadrature re-integration of the synchronized input minus its exact
    /// mass; absent when no synchronization takes place.
    pub sync: Option<f64>,
    pub spline_rep: f64,
    pub projection: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub field: AnalyticField,
    pub level: usize,
    pub k: usize,
    pub source_mass: f64,
    pub steps: Vec<MassSteps>,
}

pub fn run_conservation(
    field: AnalyticField,
    grid: &GridPair,
    k: usize,
    variants: &[Variant],
) -> Result<ConservationReport> {
    if variants.is_empty() {
        return Err(Error::Config("no conservation variants selected".into()));
    }
    let source = project_analytic(&field, &grid.source, k, &QuadMode::Fixed)?;
    let source_mass = source.mass(&grid.source);
    let located = Located::new(grid.source.clone());
    let splits = build_splits(&located.mesh)?;
    let mut steps = Vec::new();
    for &v in variants {
        let cfg = v.config(k);
        let sync = match cfg.spline {
            SplineMode::Geometric => Some(mass_local(&source, &grid.source, &cfg.quad)? - source_mass),
            SplineMode::GlobalProjection => None,
        };
        let out = transfer_wf(&source, &located, &splits, &grid.target, &cfg)?;
        let spline_mass = out.spline.mass();
        let target_mass = out.target.mass(&grid.target);
        steps.push(MassSteps {
            variant: v,
            sync,
            spline_rep: spline_mass - source_mass,
            projection: target_mass - spline_mass,
            total: (target_mass - source_mass).abs(),
        });
    }
    Ok(ConservationReport {
        field,
        level: grid.level,
        k,
        source_mass,
        steps,
    })
}

impl ConservationReport {
    /// One row per step, one column per variant.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step");
        for st in &self.steps {
            s.push(',');
            s.push_str(st.variant.name());
        }
        s.push('\n');
        let rows: [(&str, fn(&MassSteps) -> Option<f64>); 4] = [
            ("sync", |m| m.sync),
            ("spline_rep", |m| Some(m.spline_rep)),
            ("l2_proj", |m| Some(m.projection)),
            ("total", |m| Some(m.total)),
        ];
        for (name, get) in rows {
            s.push_str(name);
            for st in &self.steps {
                s.push(',');
                s.push_str(&fmt_opt(get(st)));
            }
            s.push('\n');
        }
        s
    }
}

/// Error of any field against the analytic one, with the default metric.
pub fn analytic_error(candidate: &impl Field, field: AnalyticField) -> Result<(f64, f64)> {
    let e = l2_errors(candidate, &field, ERROR_POINTS)?;
    Ok((e.value, e.grad_magnitude))
}
