//! Tetrahedral quadrature: the fixed 56-point symmetric rule, eight-way
//! edge-midpoint subdivision and locally adaptive integration.

use std::sync::OnceLock;

use crate::geometry::{Bary4, Point3, TetGeometry};

/// Points in barycentric coordinates, weights normalized to sum 1.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub points: Vec<Bary4>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integral of `f` over the tetrahedron.
    pub fn integrate(&self, geom: &TetGeometry, f: impl Fn(Point3) -> f64) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * f(geom.point(l)))
            .sum();
        s * geom.volume
    }
}

/// Orbit data of the Shunn-Ham 56-point rule: `s31 w a` stands for the four
/// permutations of `(a, a, a, 1-3a)`, `s211 w a b` for the twelve of
/// `(a, a, b, 1-2a-b)`; `w` is the weight of each point.
pub const RULE_56_TEXT: &str = "\
s31 0.001037311233614 0.0149520651530592
s31 0.0366291366405108 0.134478334792994
s211 0.009601664539948 0.0340960211962615 0.151831949165937
s211 0.0164493976798232 0.0462051504150017 0.552655643106017
s211 0.015374776651331 0.228190461068761 0.0055147549744775
s211 0.029352011837523 0.352305260087994 0.099205720249453
";

fn expand_orbits(text: &str) -> QuadRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let num = |i: usize| f[i].parse::<f64>().expect("rule text");
        let w = num(1);
        let mut orbit: Vec<[f64; 4]> = Vec::new();
        match f[0] {
            "s31" => {
                let a = num(2);
                let d = 1.0 - 3.0 * a;
                for k in 0..4 {
                    let mut p = [a; 4];
                    p[k] = d;
                    orbit.push(p);
                }
            }
            "s211" => {
                let (a, b) = (num(2), num(3));
                let c = 1.0 - 2.0 * a - b;
                for i in 0..4 {
                    for j in 0..4 {
                        if i == j {
                            continue;
                        }
                        let mut p = [a; 4];
                        p[i] = b;
                        p[j] = c;
                        orbit.push(p);
                    }
                }
            }
            other => panic!("unknown orbit {other}"),
        }
        for p in orbit {
            points.push(Bary4(p));
            weights.push(w);
        }
    }
    QuadRule { points, weights }
}

/// The 56-point symmetric rule.
pub fn rule_56() -> &'static QuadRule {
    static R: OnceLock<QuadRule> = OnceLock::new();
    R.get_or_init(|| expand_orbits(RULE_56_TEXT))
}

/// Edge-midpoint subdivision pattern. Nodes 0..4 are the vertices, 4..10 the
/// midpoints of edges 01, 02, 03, 12, 13, 23. Returns eight node quadruples,
/// all positively oriented: four corner tetrahedra, then four around the
/// shortest octahedron diagonal (ties go to the lower midpoint pair).
pub fn eight_children(nodes: &[Point3; 10]) -> [[usize; 4]; 8] {
    let mut kids = [[0usize; 4]; 8];
    kids[0] = [0, 4, 5, 6];
    kids[1] = [4, 1, 7, 8];
    kids[2] = [5, 7, 2, 9];
    kids[3] = [6, 8, 9, 3];

    // opposite midpoints: 01-23, 02-13, 03-12
    const OPPOSITE: [usize; 6] = [5, 4, 3, 2, 1, 0];
    let m = |i: usize| nodes[4 + i];
    let mut best = 0;
    let mut best_len = m(0).distance(m(5));
    for d in [1, 2] {
        let len = m(d).distance(m(OPPOSITE[d]));
        if len < best_len {
            best = d;
            best_len = len;
        }
    }
    let (a, b) = (best, OPPOSITE[best]);
    let c0 = (0..6).find(|&i| i != a && i != b).unwrap();
    let c1 = (0..6)
        .find(|&i| i != a && i != b && i != c0 && i != OPPOSITE[c0])
        .unwrap();
    let ring = [c0, c1, OPPOSITE[c0], OPPOSITE[c1]];
    for k in 0..4 {
        let mut t = [4 + a, 4 + b, 4 + ring[k], 4 + ring[(k + 1) % 4]];
        if crate::geometry::signed_volume(&t.map(|i| nodes[i])) < 0.0 {
            t.swap(2, 3);
        }
        kids[4 + k] = t;
    }
    kids
}

/// Vertices followed by edge midpoints, as used by [`eight_children`].
pub fn subdivision_nodes(p: &[Point3; 4]) -> [Point3; 10] {
    let mid = |a: usize, b: usize| (p[a] + p[b]) * 0.5;
    [
        p[0],
        p[1],
        p[2],
        p[3],
        mid(0, 1),
        mid(0, 2),
        mid(0, 3),
        mid(1, 2),
        mid(1, 3),
        mid(2, 3),
    ]
}

/// Eight children by edge-midpoint subdivision.
pub fn subdivide_tet_8(geom: &TetGeometry) -> [TetGeometry; 8] {
    let nodes = subdivision_nodes(&geom.verts);
    eight_children(&nodes)
        .map(|t| TetGeometry::new(t.map(|i| nodes[i])).expect("child of a valid tetrahedron"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    /// Absolute tolerance on the difference between consecutive estimates.
    pub tol: f64,
    pub max_levels: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            tol: 1e-12,
            max_levels: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdaptiveResult<T> {
    pub value: T,
    /// Deepest subdivision level reached.
    pub levels: usize,
    pub converged: bool,
}

fn apply_vec<F: Fn(Point3, &mut [f64])>(f: &F, n: usize, geom: &TetGeometry, out: &mut [f64]) {
    let rule = rule_56();
    let mut buf = vec![0.0; n];
    out[..n].fill(0.0);
    for (l, w) in rule.points.iter().zip(&rule.weights) {
        f(geom.point(l), &mut buf);
        for i in 0..n {
            out[i] += w * buf[i];
        }
    }
    for v in out[..n].iter_mut() {
        *v *= geom.volume;
    }
}

/// Vector-valued adaptive integration: `f(p, out)` fills `n` integrand
/// components. A cell is accepted when the largest component change between
/// the cell estimate and the sum over its children is within the cell's
/// share of the tolerance; each child gets an eighth.
pub fn integrate_adaptive_vec<F: Fn(Point3, &mut [f64])>(
    f: &F,
    n: usize,
    geom: &TetGeometry,
    cfg: &AdaptiveConfig,
) -> AdaptiveResult<Vec<f64>> {
    let mut coarse = vec![0.0; n];
    apply_vec(f, n, geom, &mut coarse);
    let mut out = vec![0.0; n];
    let (levels, converged) = recurse(f, n, geom, &coarse, cfg.tol, 0, cfg.max_levels, &mut out);
    AdaptiveResult {
        value: out,
        levels,
        converged,
    }
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(Point3, &mut [f64])>(
    f: &F,
    n: usize,
    geom: &TetGeometry,
    coarse: &[f64],
    tol: f64,
    level: usize,
    max_levels: usize,
    out: &mut [f64],
) -> (usize, bool) {
    if level >= max_levels {
        for i in 0..n {
            out[i] += coarse[i];
        }
        return (level, false);
    }
    let kids = subdivide_tet_8(geom);
    let mut parts = vec![0.0; 8 * n];
    let mut fine = vec![0.0; n];
    for (k, kid) in kids.iter().enumerate() {
        apply_vec(f, n, kid, &mut parts[k * n..(k + 1) * n]);
        for i in 0..n {
            fine[i] += parts[k * n + i];
        }
    }
    let diff = (0..n).map(|i| (fine[i] - coarse[i]).abs()).fold(0.0, f64::max);
    if diff <= tol {
        for i in 0..n {
            out[i] += fine[i];
        }
        return (level + 1, true);
    }
    let mut deepest = level + 1;
    let mut ok = true;
    for (k, kid) in kids.iter().enumerate() {
        let (d, c) = recurse(
            f,
            n,
            kid,
            &parts[k * n..(k + 1) * n],
            tol / 8.0,
            level + 1,
            max_levels,
            out,
        );
        deepest = deepest.max(d);
        ok &= c;
    }
    (deepest, ok)
}

/// Scalar adaptive integration.
pub fn integrate_adaptive(
    f: impl Fn(Point3) -> f64,
    geom: &TetGeometry,
    cfg: &AdaptiveConfig,
) -> AdaptiveResult<f64> {
    let g = |p: Point3, out: &mut [f64]| out[0] = f(p);
    let r = integrate_adaptive_vec(&g, 1, geom, cfg);
    AdaptiveResult {
        value: r.value[0],
        levels: r.levels,
        converged: r.converged,
    }
}

/// Rule applied on every cell of a `levels`-deep uniform refinement.
pub fn integrate_uniform(f: &impl Fn(Point3) -> f64, geom: &TetGeometry, levels: usize) -> f64 {
    if levels == 0 {
        return rule_56().integrate(geom, f);
    }
    subdivide_tet_8(geom)
        .iter()
        .map(|k| integrate_uniform(f, k, levels - 1))
        .sum()
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_quad::GaussLegendre::new(n.try_into().expect("at least one node"));
    let mut pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> TetGeometry {
        TetGeometry::new([
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ])
        .unwrap()
    }

    fn fnv1a(s: &str) -> u64 {
        s.bytes().fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
    }

    #[test]
    fn rule_text_checksum() {
        assert_eq!(fnv1a(RULE_56_TEXT), 0xc7b9_1784_b360_286d, "{:#x}", fnv1a(RULE_56_TEXT));
    }

    #[test]
    fn rule_shape() {
        let r = rule_56();
        assert_eq!(r.len(), 56);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert!(r.points.iter().all(|p| p.min() > 0.0 && (p.sum() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn corner_children_are_similar() {
        let g = reference();
        let kids = subdivide_tet_8(&g);
        let total: f64 = kids.iter().map(|k| k.volume).sum();
        assert!((total - 1.0 / 6.0).abs() < 1e-15);
        for k in &kids[..4] {
            assert!((k.volume - g.volume / 8.0).abs() < 1e-16);
        }
        assert!(kids.iter().all(|k| k.volume > 0.0));
    }

    #[test]
    fn zero_levels_is_plain_rule() {
        let g = reference();
        let cfg = AdaptiveConfig { tol: 1e-12, max_levels: 0 };
        let r = integrate_adaptive(|p| (p.x * 3.0).sin(), &g, &cfg);
        assert!(!r.converged);
        assert_eq!(r.levels, 0);
        assert_eq!(r.value, rule_56().integrate(&g, |p| (p.x * 3.0).sin()));
    }

    #[test]
    fn polynomial_converges_at_first_comparison() {
        let g = reference();
        let r = integrate_adaptive(|p| p.x.powi(4) * p.y.powi(2) * p.z.powi(2), &g, &AdaptiveConfig::default());
        assert!(r.converged);
        assert_eq!(r.levels, 1);
        let exact = 24.0 * 2.0 * 2.0 / (1..=11).map(|k| k as f64).product::<f64>();
        assert!((r.value - exact).abs() < 1e-16);
    }

    #[test]
    fn gauss_legendre_integrates_on_unit_interval() {
        let (x, w) = gauss_legendre_unit(5);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((m - 0.1).abs() < 1e-15);
    }
}
