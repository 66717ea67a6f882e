//! Scalar fields: the evaluation trait and discontinuous piecewise
//! polynomials in Bernstein form.

use crate::bernstein::{num_basis, value_and_gradient};
use crate::bvh::Located;
use crate::error::{Error, Result};
use crate::geometry::{Bary4, Point3, Vec3};
use crate::mesh::TetMesh;

/// Anything that can be evaluated (value and gradient) at a point.
pub trait Field: Sync {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)>;

    fn value(&self, p: Point3) -> Result<f64> {
        Ok(self.eval(p)?.0)
    }
}

impl<F: Field + ?Sized> Field for &F {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        (**self).eval(p)
    }
}

/// Degree-`k` Bernstein polynomial on each element, no continuity imposed.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseField {
    pub degree: usize,
    /// `num_basis(degree)` coefficients per element, element-major.
    pub coeffs: Vec<f64>,
}

impl PiecewiseField {
    pub fn zeros(degree: usize, num_elems: usize) -> Self {
        PiecewiseField {
            degree,
            coeffs: vec![0.0; num_basis(degree) * num_elems],
        }
    }

    pub fn basis_len(&self) -> usize {
        num_basis(self.degree)
    }

    pub fn num_elems(&self) -> usize {
        self.coeffs.len() / self.basis_len()
    }

    pub fn element(&self, e: usize) -> &[f64] {
        let nb = self.basis_len();
        &self.coeffs[e * nb..(e + 1) * nb]
    }

    pub fn check(&self, mesh: &TetMesh) -> Result<()> {
        if self.num_elems() != mesh.num_tets() || self.coeffs.len() % self.basis_len() != 0 {
            return Err(Error::Mismatch(format!(
                "{} coefficients for {} elements of degree {}",
                self.coeffs.len(),
                mesh.num_tets(),
                self.degree
            )));
        }
        Ok(())
    }

    /// Value and gradient of element `e`'s polynomial.
    pub fn eval_local(&self, mesh: &TetMesh, e: usize, l: &Bary4) -> (f64, Vec3) {
        value_and_gradient(self.degree, self.element(e), &mesh.geometry[e], l)
    }

    /// Exact integral: each Bernstein polynomial integrates to `|T| / nb`.
    pub fn mass(&self, mesh: &TetMesh) -> f64 {
        let nb = self.basis_len() as f64;
        (0..mesh.num_tets())
            .map(|e| mesh.volume(e) * self.element(e).iter().sum::<f64>() / nb)
            .sum()
    }

    pub fn on<'a>(&'a self, located: &'a Located) -> FieldOn<'a> {
        FieldOn {
            field: self,
            located,
        }
    }
}

/// A piecewise field paired with its mesh for point evaluation.
pub struct FieldOn<'a> {
    pub field: &'a PiecewiseField,
    pub located: &'a Located,
}

impl Field for FieldOn<'_> {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        let e = self.located.locate(p)?;
        let l = self.located.mesh.geometry[e].barycentric(p);
        Ok(self.field.eval_local(&self.located.mesh, e, &l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::kuhn_grid;

    #[test]
    fn constant_field_mass_is_volume() {
        let m = kuhn_grid(2, 2, 2);
        let mut f = PiecewiseField::zeros(2, m.num_tets());
        f.coeffs.fill(1.0);
        assert!((f.mass(&m) - 1.0).abs() < 1e-14);
        f.check(&m).unwrap();
        assert!(PiecewiseField::zeros(2, 3).check(&m).is_err());
    }
}
