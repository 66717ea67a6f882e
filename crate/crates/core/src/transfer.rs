//! Projection onto piecewise polynomials and the transfer pipelines.

use std::cell::RefCell;

use rayon::prelude::*;

use crate::bernstein::{basis_values, num_basis, MassSolver};
use crate::bvh::Located;
use crate::error::{Error, Result};
use crate::field::{Field, PiecewiseField};
use crate::geometry::{Point3, Vec3};
use crate::global::global_spline_projection;
use crate::mesh::TetMesh;
use crate::quadrature::{gauss_legendre_unit, integrate_adaptive_vec, rule_56, AdaptiveConfig};
use crate::smoothing::synchronize;
use crate::spline::WfSpline;
use crate::split::WfSplit;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadMode {
    Fixed,
    Adaptive(AdaptiveConfig),
}

impl QuadMode {
    pub fn adaptive() -> Self {
        QuadMode::Adaptive(AdaptiveConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplineMode {
    /// Hermite data from synchronization, geometric coefficients (C¹).
    Geometric,
    /// Global L² projection onto the split spline space (C⁰).
    GlobalProjection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferConfig {
    pub degree: usize,
    pub quad: QuadMode,
    pub spline: SplineMode,
}

impl TransferConfig {
    pub fn new(degree: usize) -> Self {
        TransferConfig {
            degree,
            quad: QuadMode::Fixed,
            spline: SplineMode::Geometric,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.degree) {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        Ok(())
    }
}

/// `∫_T f B_α` for all degree-`k` basis functions of element `e`.
fn element_rhs(
    f: &(impl Fn(Point3) -> Result<f64> + Sync),
    mesh: &TetMesh,
    e: usize,
    k: usize,
    quad: &QuadMode,
) -> Result<Vec<f64>> {
    let geom = &mesh.geometry[e];
    let nb = num_basis(k);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |p: Point3, out: &mut [f64]| {
        let v = match f(p) {
            Ok(v) => v,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                0.0
            }
        };
        basis_values(k, &geom.barycentric(p), out);
        for o in out[..nb].iter_mut() {
            *o *= v;
        }
    };
    let rhs = match quad {
        QuadMode::Fixed => {
            let rule = rule_56();
            let mut acc = vec![0.0; nb];
            let mut buf = vec![0.0; nb];
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                integrand(geom.point(l), &mut buf);
                for i in 0..nb {
                    acc[i] += w * buf[i];
                }
            }
            acc.iter_mut().for_each(|a| *a *= geom.volume);
            acc
        }
        QuadMode::Adaptive(cfg) => integrate_adaptive_vec(&integrand, nb, geom, cfg).value,
    };
    match failure.into_inner() {
        Some(err) => Err(err),
        None => Ok(rhs),
    }
}

/// Element-local L² projection of a point function onto degree `k`.
pub fn project_fn(
    f: &(impl Fn(Point3) -> Result<f64> + Sync),
    mesh: &TetMesh,
    k: usize,
    quad: &QuadMode,
) -> Result<PiecewiseField> {
    if !(1..=3).contains(&k) {
        return Err(Error::UnsupportedDegree(k));
    }
    let solver = MassSolver::get(k);
    let blocks: Vec<Vec<f64>> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|e| {
            let mut rhs = element_rhs(f, mesh, e, k, quad)?;
            solver.solve(mesh.volume(e), &mut rhs);
            if rhs.iter().any(|x| !x.is_finite()) {
                return Err(Error::SingularMass(e));
            }
            Ok(rhs)
        })
        .collect::<Result<_>>()?;
    Ok(PiecewiseField {
        degree: k,
        coeffs: blocks.concat(),
    })
}

/// L² projection of any field onto degree-`k` polynomials on `mesh`.
pub fn project_field(
    f: &impl Field,
    mesh: &TetMesh,
    k: usize,
    quad: &QuadMode,
) -> Result<PiecewiseField> {
    project_fn(&|p| f.value(p), mesh, k, quad)
}

/// Source data manufactured from an analytic function.
pub fn project_analytic(
    f: &impl Field,
    mesh: &TetMesh,
    k: usize,
    quad: &QuadMode,
) -> Result<PiecewiseField> {
    project_field(f, mesh, k, quad)
}

/// Builds the source spline for a transfer.
pub fn build_spline<'a>(
    source: &PiecewiseField,
    located: &'a Located,
    splits: &'a [WfSplit],
    mode: SplineMode,
) -> Result<WfSpline<'a>> {
    source.check(&located.mesh)?;
    match mode {
        SplineMode::Geometric => {
            let data = synchronize(&located.mesh, source)?;
            WfSpline::from_hermite(located, splits, &data)
        }
        SplineMode::GlobalProjection => {
            let coeffs = global_spline_projection(source, &located.mesh, splits)?;
            Ok(WfSpline {
                located,
                splits,
                coeffs,
            })
        }
    }
}

/// Result of a spline transfer with the intermediate spline kept for
/// conservation accounting.
pub struct WfTransfer<'a> {
    pub spline: WfSpline<'a>,
    pub target: PiecewiseField,
}

/// Synchronize (or globally project), build the spline on the source mesh,
/// then project it onto the target.
pub fn transfer_wf<'a>(
    source: &PiecewiseField,
    located: &'a Located,
    splits: &'a [WfSplit],
    target: &TetMesh,
    cfg: &TransferConfig,
) -> Result<WfTransfer<'a>> {
    cfg.validate()?;
    let spline = build_spline(source, located, splits, cfg.spline)?;
    let field = project_field(&spline, target, cfg.degree, &cfg.quad)?;
    Ok(WfTransfer {
        spline,
        target: field,
    })
}

/// Continuous piecewise-linear interpolant of the vertex-averaged source.
pub fn linear_interpolant(source: &PiecewiseField, mesh: &TetMesh) -> Result<PiecewiseField> {
    source.check(mesh)?;
    let nb = source.basis_len();
    // vertex corners sit at fixed canonical positions
    let corner = |i: usize| -> usize {
        let mut m = [0u8; 4];
        m[i] = source.degree as u8;
        crate::bernstein::index_of(m)
    };
    let vals: Vec<f64> = (0..mesh.num_vertices())
        .map(|v| {
            let star = mesh.vertex_tets.get(v);
            let s: f64 = star
                .iter()
                .map(|&e| {
                    let i = mesh.tets[e].iter().position(|&x| x == v).unwrap();
                    source.coeffs[e * nb + corner(i)]
                })
                .sum();
            s / star.len() as f64
        })
        .collect();
    Ok(PiecewiseField {
        degree: 1,
        coeffs: mesh.tets.iter().flat_map(|t| t.map(|v| vals[v])).collect(),
    })
}

pub fn transfer_linear(
    source: &PiecewiseField,
    located: &Located,
    target: &TetMesh,
    k: usize,
    quad: &QuadMode,
) -> Result<PiecewiseField> {
    let lin = linear_interpolant(source, &located.mesh)?;
    project_field(&lin.on(located), target, k, quad)
}

/// Direct projection of the discontinuous source.
pub fn transfer_l2(
    source: &PiecewiseField,
    located: &Located,
    target: &TetMesh,
    k: usize,
    quad: &QuadMode,
) -> Result<PiecewiseField> {
    source.check(&located.mesh)?;
    project_field(&source.on(located), target, k, quad)
}

/// `∫_Ω u` by quadrature on `mesh` (fixed rule or adaptive per element).
pub fn mass(f: &impl Field, mesh: &TetMesh, quad: &QuadMode) -> Result<f64> {
    let parts: Vec<f64> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|e| {
            let g = &mesh.geometry[e];
            match quad {
                QuadMode::Fixed => {
                    let rule = rule_56();
                    let mut s = 0.0;
                    for (l, w) in rule.points.iter().zip(&rule.weights) {
                        s += w * f.value(g.point(l))?;
                    }
                    Ok(s * g.volume)
                }
                QuadMode::Adaptive(cfg) => {
                    let failure: RefCell<Option<Error>> = RefCell::new(None);
                    let h = |p: Point3, out: &mut [f64]| {
                        out[0] = f.value(p).unwrap_or_else(|err| {
                            failure.borrow_mut().get_or_insert(err);
                            0.0
                        })
                    };
                    let r = integrate_adaptive_vec(&h, 1, g, cfg);
                    match failure.into_inner() {
                        Some(err) => Err(err),
                        None => Ok(r.value[0]),
                    }
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Same as [`mass`] for a piecewise field evaluated element by element, so
/// no point location is involved.
pub fn mass_local(field: &PiecewiseField, mesh: &TetMesh, quad: &QuadMode) -> Result<f64> {
    field.check(mesh)?;
    let parts: Vec<f64> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|e| {
            let g = &mesh.geometry[e];
            let f = |p: Point3| field.eval_local(mesh, e, &g.barycentric(p)).0;
            match quad {
                QuadMode::Fixed => rule_56().integrate(g, f),
                QuadMode::Adaptive(cfg) => crate::quadrature::integrate_adaptive(f, g, cfg).value,
            }
        })
        .collect();
    Ok(parts.iter().sum())
}

/// Number of Gauss points per axis of the error metric.
pub const ERROR_POINTS: usize = 41;

/// Root-mean-square differences of values and of gradient magnitudes over
/// the unit cube, by an `n`-point Gauss-Legendre rule per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Errors {
    pub value: f64,
    pub grad_magnitude: f64,
}

pub fn l2_errors(candidate: &impl Field, exact: &impl Field, n: usize) -> Result<L2Errors> {
    let (x, w) = gauss_legendre_unit(n);
    let sums: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut sv = 0.0;
            let mut sg = 0.0;
            for j in 0..n {
                for i in 0..n {
                    let p = Point3::new(x[i], x[j], x[k]);
                    let wt = w[i] * w[j] * w[k];
                    let (a, ga) = candidate.eval(p)?;
                    let (b, gb) = exact.eval(p)?;
                    sv += wt * (a - b).powi(2);
                    sg += wt * (ga.norm() - gb.norm()).powi(2);
                }
            }
            Ok((sv, sg))
        })
        .collect::<Result<_>>()?;
    // unit cube, so the volume normalization is 1
    let (sv, sg) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(L2Errors {
        value: sv.sqrt(),
        grad_magnitude: sg.sqrt(),
    })
}

pub fn l2_error(candidate: &impl Field, exact: &impl Field) -> Result<f64> {
    Ok(l2_errors(candidate, exact, ERROR_POINTS)?.value)
}

/// A constant, mainly for tests and offsets.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl Field for Constant {
    fn eval(&self, _p: Point3) -> Result<(f64, Vec3)> {
        Ok((self.0, Vec3::ZERO))
    }
}

/// Pointwise sum of two fields.
pub struct Sum<A, B>(pub A, pub B);

impl<A: Field, B: Field> Field for Sum<A, B> {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        let (a, ga) = self.0.eval(p)?;
        let (b, gb) = self.1.eval(p)?;
        Ok((a + b, ga + gb))
    }
}
