//! Analytic test fields.

use crate::error::Result;
use crate::field::Field;
use crate::geometry::{Point3, Vec3};

/// Gaussian bump `exp(-30 |p - c|²)` centred in the unit cube.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gaussian;

/// Wavy front `tanh(20 ((x-0.5) + 0.3 sin(-10(y-0.5)) - 0.3 sin(-5(z-0.6))))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TanhFront;

pub fn eval_u1(p: Point3) -> (f64, Vec3) {
    let d = p - Point3::new(0.5, 0.5, 0.5);
    let v = (-30.0 * d.norm_squared()).exp();
    (v, d * (-60.0 * v))
}

pub fn eval_u2(p: Point3) -> (f64, Vec3) {
    let s = (p.x - 0.5) + 0.3 * (-10.0 * (p.y - 0.5)).sin() - 0.3 * (-5.0 * (p.z - 0.6)).sin();
    let v = (20.0 * s).tanh();
    let dv = 20.0 * (1.0 - v * v);
    let ds = Vec3::new(
        1.0,
        -3.0 * (-10.0 * (p.y - 0.5)).cos(),
        1.5 * (-5.0 * (p.z - 0.6)).cos(),
    );
    (v, ds * dv)
}

impl Field for Gaussian {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        Ok(eval_u1(p))
    }
}

impl Field for TanhFront {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        Ok(eval_u2(p))
    }
}

/// Polynomial `Σ c x^a y^b z^c` given as `(coefficient, [a, b, c])` terms.
#[derive(Debug, Clone, Default)]
pub struct Polynomial {
    pub terms: Vec<(f64, [u32; 3])>,
}

impl Polynomial {
    pub fn new(terms: Vec<(f64, [u32; 3])>) -> Self {
        Polynomial { terms }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, e)| e.iter().sum()).max().unwrap_or(0)
    }

    /// Random polynomial with every monomial up to `degree`.
    pub fn random(degree: u32, rng: &mut impl rand::Rng) -> Self {
        let mut terms = Vec::new();
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    terms.push((rng.random_range(-1.0..1.0), [a, b, c]));
                }
            }
        }
        Polynomial { terms }
    }

    pub fn eval_point(&self, p: Point3) -> (f64, Vec3) {
        let pw = |x: f64, k: u32| if k == 0 { 1.0 } else { x.powi(k as i32) };
        let dpw = |x: f64, k: u32| if k == 0 { 0.0 } else { k as f64 * pw(x, k - 1) };
        let mut v = 0.0;
        let mut g = Vec3::ZERO;
        for &(c, [a, b, d]) in &self.terms {
            let (px, py, pz) = (pw(p.x, a), pw(p.y, b), pw(p.z, d));
            v += c * px * py * pz;
            g += Vec3::new(dpw(p.x, a) * py * pz, px * dpw(p.y, b) * pz, px * py * dpw(p.z, d)) * c;
        }
        (v, g)
    }
}

impl Field for Polynomial {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        Ok(self.eval_point(p))
    }
}

/// Field selected by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticField {
    U1,
    U2,
}

impl AnalyticField {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "u1" => Some(AnalyticField::U1),
            "u2" => Some(AnalyticField::U2),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticField::U1 => "u1",
            AnalyticField::U2 => "u2",
        }
    }

    pub fn eval_point(&self, p: Point3) -> (f64, Vec3) {
        match self {
            AnalyticField::U1 => eval_u1(p),
            AnalyticField::U2 => eval_u2(p),
        }
    }
}

impl Field for AnalyticField {
    fn eval(&self, p: Point3) -> Result<(f64, Vec3)> {
        Ok(self.eval_point(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fd_check(f: impl Fn(Point3) -> (f64, Vec3), p: Point3) {
        let h = 1e-6;
        let g = f(p).1;
        for (k, e) in [Vec3::new(1., 0., 0.), Vec3::new(0., 1., 0.), Vec3::new(0., 0., 1.)]
            .iter()
            .enumerate()
        {
            let fd = (f(p + *e * h).0 - f(p - *e * h).0) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6 * g.norm().max(1.0), "{fd} vs {}", g[k]);
        }
    }

    #[test]
    fn u1_values() {
        assert_eq!(eval_u1(Point3::new(0.5, 0.5, 0.5)), (1.0, Vec3::ZERO));
        assert!((eval_u1(Point3::ZERO).0 - (-22.5f64).exp()).abs() < 1e-24);
    }

    #[test]
    fn u2_values() {
        assert_eq!(eval_u2(Point3::new(0.5, 0.5, 0.6)).0, 0.0);
        let v = eval_u2(Point3::new(1.0, 0.5, 0.6)).0;
        assert!((v - 10f64.tanh()).abs() < 1e-16);
        assert!((v - 0.9999999958).abs() < 1e-10);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let poly = Polynomial::random(3, &mut rng);
        for _ in 0..50 {
            let p = Point3::new(rng.random(), rng.random(), rng.random());
            fd_check(eval_u1, p);
            fd_check(eval_u2, p);
            fd_check(|q| poly.eval_point(q), p);
            let v = eval_u2(p).0;
            assert!(v.abs() <= 1.0);
        }
    }
}
