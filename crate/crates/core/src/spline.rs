//! Piecewise cubic splines on the Worsey-Farin refinement of a mesh.

use rayon::prelude::*;

use crate::bernstein::value_and_gradient;
use crate::bvh::Located;
use crate::coefficients::{compute_macro_coefficients, HermiteData, MacroCoefficients};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{Point3, Vec3};
use crate::split::WfSplit;

/// One set of 91 coefficients per macroelement. Built from Hermite data the
/// spline is C¹; from the global projection it is only C⁰.
#[derive(Debug, Clone)]
pub struct WfSpline<'a> {
    pub located: &'a Located,
    pub splits: &'a [WfSplit],
    pub coeffs: Vec<MacroCoefficients>,
}

impl<'a> WfSpline<'a> {
    pub fn from_hermite(
        located: &'a Located,
        splits: &'a [WfSplit],
        data: &[HermiteData],
    ) -> Result<Self> {
        if data.len() != splits.len() || splits.len() != located.mesh.num_tets() {
            return Err(Error::Mismatch(format!(
                "{} Hermite records, {} splits, {} elements",
                data.len(),
                splits.len(),
                located.mesh.num_tets()
            )));
        }
        let coeffs = splits
            .par_iter()
            .zip(data.par_iter())
            .map(|(s, d)| compute_macro_coefficients(s, d))
            .collect();
        Ok(WfSpline {
            located,
            splits,
            coeffs,
        })
    }

    /// Evaluation inside a known macroelement.
    pub fn eval_in(&self, e: usize, p: Point3) -> Result<(f64, Vec3)> {
        let s = &self.splits[e];
        let (a, l) = s.locate(p)?;
        let b = self.coeffs[e].subtet(a);
        Ok(value_and_gradient(3, &b, &s.subtets[a], &l))
    }

    /// Evaluation in a given subtetrahedron (extrapolates outside it).
    pub fn eval_subtet(&self, e: usize, alpha: usize, p: Point3) -> (f64, Vec3) {
        let g = &self.splits[e].subtets[alpha];
        let b = self.coeffs[e].subtet(alpha);
        value_and_gradient(3, &b, g, &g.barycentric(p))
    }

    /// Exact integral over the domain.
    pub fn mass(&self) -> f64 {
        self.splits
            .iter()
            .zip(&self.coeffs)
            .map(|(s, c)| {
                (0..12)
                    .map(|a| s.subtets[a].volume * c.subtet(a).iter().sum::<f64>() / 20.0)
                    .sum::<f64>()
            })
            .sum()
    }
}

impl Field for WfSpline<'_> {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        let e = self.located.locate(p)?;
        self.eval_in(e, p)
    }
}
