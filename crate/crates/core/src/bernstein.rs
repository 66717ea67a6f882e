//! Bernstein polynomials on tetrahedra: basis, domain points, de Casteljau
//! evaluation and gradients, and exact mass matrices.
//!
//! Coefficients of a degree-`n` B-form are stored in lexicographically
//! descending multi-index order, e.g. for `n = 3`:
//! 3000, 2100, 2010, 2001, 1200, 1110, 1101, 1020, 1011, 1002, 0300, ...

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::geometry::{Bary4, Point3, TetGeometry, Vec3};

pub const MAX_DEGREE: usize = 6;
const MAX_BASIS: usize = 84;

pub type MultiIndex = [u8; 4];

pub const fn num_basis(n: usize) -> usize {
    (n + 1) * (n + 2) * (n + 3) / 6
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

fn enumerate(n: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(num_basis(n));
    for i in (0..=n).rev() {
        for j in (0..=n - i).rev() {
            for l in (0..=n - i - j).rev() {
                out.push([i as u8, j as u8, l as u8, (n - i - j - l) as u8]);
            }
        }
    }
    out
}

struct Tables {
    indices: Vec<Vec<MultiIndex>>,
    /// `up[d][j][i]`: position of `β_j + e_i` in the degree-`d` list, where
    /// `β_j` runs over the degree `d - 1` list.
    up: Vec<Vec<[usize; 4]>>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let indices: Vec<Vec<MultiIndex>> = (0..=MAX_DEGREE).map(enumerate).collect();
        let mut up = vec![Vec::new()];
        for d in 1..=MAX_DEGREE {
            let row = indices[d - 1]
                .iter()
                .map(|b| {
                    let mut r = [0usize; 4];
                    for (i, slot) in r.iter_mut().enumerate() {
                        let mut m = *b;
                        m[i] += 1;
                        *slot = position(&indices[d], m);
                    }
                    r
                })
                .collect();
            up.push(row);
        }
        Tables { indices, up }
    })
}

fn position(list: &[MultiIndex], m: MultiIndex) -> usize {
    list.iter().position(|&x| x == m).expect("multi-index of matching degree")
}

/// Multi-indices of degree `n` in canonical order.
pub fn multi_indices(n: usize) -> &'static [MultiIndex] {
    &tables().indices[n]
}

/// Canonical position of a multi-index.
pub fn index_of(m: MultiIndex) -> usize {
    let n = m.iter().map(|&x| x as usize).sum::<usize>();
    position(multi_indices(n), m)
}

/// Value of a single Bernstein polynomial.
pub fn bernstein_value(m: MultiIndex, l: &Bary4) -> f64 {
    let n: usize = m.iter().map(|&x| x as usize).sum();
    let mut v = factorial(n);
    for i in 0..4 {
        v *= l[i].powi(m[i] as i32) / factorial(m[i] as usize);
    }
    v
}

/// All degree-`n` basis values at `l`, in canonical order.
pub fn basis_values(n: usize, l: &Bary4, out: &mut [f64]) {
    // build up from degree 0: B^d_{β+e_i} += λ_i B^{d-1}_β
    let t = tables();
    let mut cur = [0.0; MAX_BASIS];
    let mut next = [0.0; MAX_BASIS];
    cur[0] = 1.0;
    for d in 1..=n {
        next[..num_basis(d)].fill(0.0);
        for (j, r) in t.up[d].iter().enumerate() {
            for i in 0..4 {
                next[r[i]] += l[i] * cur[j];
            }
        }
        cur[..num_basis(d)].copy_from_slice(&next[..num_basis(d)]);
    }
    out[..num_basis(n)].copy_from_slice(&cur[..num_basis(n)]);
}

/// Reduces `coeffs` by `steps` de Casteljau steps; returns the degree
/// `n - steps` intermediate coefficients in the first slots of the buffer.
fn reduce(n: usize, coeffs: &[f64], l: &Bary4, steps: usize) -> [f64; MAX_BASIS] {
    let t = tables();
    let mut buf = [0.0; MAX_BASIS];
    buf[..num_basis(n)].copy_from_slice(&coeffs[..num_basis(n)]);
    for d in (n - steps + 1..=n).rev() {
        for (j, r) in t.up[d].iter().enumerate() {
            // r[.] >= j for every j, so in-place update is safe
            buf[j] = l[0] * buf[r[0]] + l[1] * buf[r[1]] + l[2] * buf[r[2]] + l[3] * buf[r[3]];
        }
    }
    buf
}

/// De Casteljau evaluation of a degree-`n` B-form. Negative barycentrics
/// extrapolate.
pub fn decasteljau(n: usize, coeffs: &[f64], l: &Bary4) -> f64 {
    if n == 0 {
        return coeffs[0];
    }
    reduce(n, coeffs, l, n)[0]
}

/// Value and partial derivatives with respect to the four barycentrics.
pub fn decasteljau_with_derivs(n: usize, coeffs: &[f64], l: &Bary4) -> (f64, [f64; 4]) {
    if n == 0 {
        return (coeffs[0], [0.0; 4]);
    }
    let b = reduce(n, coeffs, l, n - 1);
    let v = l[0] * b[0] + l[1] * b[1] + l[2] * b[2] + l[3] * b[3];
    let k = n as f64;
    (v, [k * b[0], k * b[1], k * b[2], k * b[3]])
}

/// Value and Cartesian gradient on a given tetrahedron.
pub fn value_and_gradient(n: usize, coeffs: &[f64], geom: &TetGeometry, l: &Bary4) -> (f64, Vec3) {
    let (v, d) = decasteljau_with_derivs(n, coeffs, l);
    let g = geom.grad_lambda;
    (v, g[0] * d[0] + g[1] * d[1] + g[2] * d[2] + g[3] * d[3])
}

/// Domain points `(i p1 + j p2 + l p3 + m p4) / n` in canonical order.
pub fn domain_points(verts: &[Point3; 4], n: usize) -> Vec<Point3> {
    multi_indices(n)
        .iter()
        .map(|m| {
            let mut p = Point3::ZERO;
            for i in 0..4 {
                p += verts[i] * (m[i] as f64);
            }
            p / n as f64
        })
        .collect()
}

/// Cubic B-form over one tetrahedron.
#[derive(Debug, Clone, Copy)]
pub struct CubicBForm {
    pub geom: TetGeometry,
    pub coeffs: [f64; 20],
}

impl CubicBForm {
    pub fn eval(&self, l: &Bary4) -> f64 {
        decasteljau(3, &self.coeffs, l)
    }

    pub fn eval_at(&self, p: Point3) -> f64 {
        self.eval(&self.geom.barycentric(p))
    }

    pub fn gradient(&self, l: &Bary4) -> Vec3 {
        value_and_gradient(3, &self.coeffs, &self.geom, l).1
    }

    /// Smallest and largest coefficient; for `l >= 0` every value lies
    /// between them.
    pub fn coeff_bounds(&self) -> (f64, f64) {
        coeff_bounds(&self.coeffs)
    }
}

pub fn coeff_bounds(c: &[f64]) -> (f64, f64) {
    c.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Mass matrix of the degree-`n` basis on a tetrahedron of unit volume,
/// row-major: `∫ B_α B_β = 6 (n!)² (α+β)! / (α! β! (2n+3)!)`.
pub fn reference_mass(n: usize) -> Vec<f64> {
    let idx = multi_indices(n);
    let nb = idx.len();
    let scale = 6.0 * factorial(n).powi(2) / factorial(2 * n + 3);
    let mf = |m: &MultiIndex| m.iter().map(|&x| factorial(x as usize)).product::<f64>();
    let mut out = vec![0.0; nb * nb];
    for (a, ma) in idx.iter().enumerate() {
        for (b, mb) in idx.iter().enumerate() {
            let mut s = [0u8; 4];
            for i in 0..4 {
                s[i] = ma[i] + mb[i];
            }
            out[a * nb + b] = scale * mf(&s) / (mf(ma) * mf(mb));
        }
    }
    out
}

/// Cholesky factor of the unit-volume mass matrix for degrees 1..=3.
pub struct MassSolver {
    n: usize,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl MassSolver {
    pub fn get(n: usize) -> &'static MassSolver {
        static S: OnceLock<Vec<MassSolver>> = OnceLock::new();
        let all = S.get_or_init(|| {
            (0..=3)
                .map(|n| {
                    let nb = num_basis(n);
                    let m = DMatrix::from_row_slice(nb, nb, &reference_mass(n));
                    MassSolver {
                        n,
                        chol: m.cholesky().expect("reference mass matrix is SPD"),
                    }
                })
                .collect()
        });
        &all[n]
    }

    /// Solves `volume * M_ref c = rhs` in place.
    pub fn solve(&self, volume: f64, rhs: &mut [f64]) {
        let nb = num_basis(self.n);
        let x = self.chol.solve(&DVector::from_column_slice(&rhs[..nb]));
        for (r, v) in rhs.iter_mut().zip(x.iter()) {
            *r = v / volume;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TetGeometry;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bary(rng: &mut impl Rng) -> Bary4 {
        let a: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
        let s: f64 = a.iter().sum();
        Bary4([a[0] / s, a[1] / s, a[2] / s, a[3] / s])
    }

    fn direct(n: usize, c: &[f64], l: &Bary4) -> f64 {
        multi_indices(n)
            .iter()
            .zip(c)
            .map(|(m, c)| c * bernstein_value(*m, l))
            .sum()
    }

    #[test]
    fn canonical_cubic_order() {
        let m = multi_indices(3);
        assert_eq!(m.len(), 20);
        assert_eq!(m[0], [3, 0, 0, 0]);
        assert_eq!(m[1], [2, 1, 0, 0]);
        assert_eq!(m[5], [1, 1, 1, 0]);
        assert_eq!(m[10], [0, 3, 0, 0]);
        assert_eq!(m[19], [0, 0, 0, 3]);
    }

    #[test]
    fn b1110_at_centroid() {
        let v = bernstein_value([1, 1, 1, 0], &Bary4::CENTROID);
        let oracle = 6.0 / (1.0 * 1.0 * 1.0) * 0.25f64.powi(3);
        assert!((v - oracle).abs() < 1e-16);
        assert!((v - 3.0 / 32.0).abs() < 1e-16);
    }

    #[test]
    fn partition_of_unity() {
        let l = Bary4([0.1, 0.2, 0.3, 0.4]);
        for n in 0..=MAX_DEGREE {
            let mut b = vec![0.0; num_basis(n)];
            basis_values(n, &l, &mut b);
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn basis_values_match_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=3 {
            let l = random_bary(&mut rng);
            let mut b = vec![0.0; num_basis(n)];
            basis_values(n, &l, &mut b);
            for (m, v) in multi_indices(n).iter().zip(&b) {
                assert!((v - bernstein_value(*m, &l)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn decasteljau_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            for _ in 0..100 {
                let c: Vec<f64> = (0..num_basis(n)).map(|_| rng.random_range(-1.0..1.0)).collect();
                let l = random_bary(&mut rng);
                let a = decasteljau(n, &c, &l);
                let b = direct(n, &c, &l);
                assert!((a - b).abs() <= 1e-14 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn domain_point_centroid_of_face() {
        let v = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(3.0, 0.0, 0.0),
            Point3::new(0.0, 3.0, 0.0),
            Point3::new(0.0, 0.0, 3.0),
        ];
        let d = domain_points(&v, 3);
        assert_eq!(d[0], v[0]);
        assert!(d[5].distance(Point3::new(1.0, 1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn gradient_of_interpolated_x() {
        let v = [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let g = TetGeometry::new(v).unwrap();
        let mut c = [0.0; 20];
        for (k, p) in domain_points(&v, 3).iter().enumerate() {
            c[k] = p.x;
        }
        let f = CubicBForm { geom: g, coeffs: c };
        let grad = f.gradient(&Bary4::CENTROID);
        assert!((grad - Point3::new(1.0, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = [
            Point3::new(0.1, 0.0, 0.2),
            Point3::new(1.0, 0.1, 0.0),
            Point3::new(0.2, 0.9, 0.1),
            Point3::new(0.0, 0.3, 1.1),
        ];
        let g = TetGeometry::new(v).unwrap();
        for _ in 0..20 {
            let mut c = [0.0; 20];
            c.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
            let f = CubicBForm { geom: g, coeffs: c };
            let p = g.point(&random_bary(&mut rng));
            let grad = f.gradient(&g.barycentric(p));
            let h = 1e-5;
            for (k, e) in [Point3::new(1., 0., 0.), Point3::new(0., 1., 0.), Point3::new(0., 0., 1.)]
                .iter()
                .enumerate()
            {
                let fd = (f.eval_at(p + *e * h) - f.eval_at(p - *e * h)) / (2.0 * h);
                assert!((fd - grad[k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn bounds_hold_for_nonnegative_barycentrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = [0.0; 20];
        c.iter_mut().for_each(|x| *x = rng.random_range(-2.0..3.0));
        let (lo, hi) = coeff_bounds(&c);
        for _ in 0..1000 {
            let v = decasteljau(3, &c, &random_bary(&mut rng));
            assert!(v >= lo - 1e-14 && v <= hi + 1e-14);
        }
        let mut corner = [0.0; 20];
        corner[19] = 5.0;
        assert_eq!(coeff_bounds(&corner), (0.0, 5.0));
        assert_eq!(decasteljau(3, &corner, &Bary4::vertex(3)), 5.0);
    }

    #[test]
    fn mass_matrix_integrates_to_volume() {
        // Σ_αβ M_αβ = ∫ 1 = 1 on unit volume, and each row sums to ∫B_α = 1/nb
        for n in 0..=3 {
            let m = reference_mass(n);
            let nb = num_basis(n);
            assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for a in 0..nb {
                let row: f64 = m[a * nb..(a + 1) * nb].iter().sum();
                assert!((row - 1.0 / nb as f64).abs() < 1e-15);
            }
        }
    }
}
