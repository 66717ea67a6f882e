//! The 91 B-coefficients of a Worsey-Farin macroelement and their
//! distribution over the twelve subtetrahedra.

use std::sync::OnceLock;

use crate::bernstein::{domain_points, index_of, MultiIndex};
use crate::geometry::{Point3, Vec3};
use crate::mesh::LOCAL_EDGES;
use crate::split::{WfSplit, SUBTETS};

/// Hermite data of one macroelement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteData {
    pub values: [f64; 4],
    pub grads: [Vec3; 4],
    /// Unit vectors perpendicular to each local edge ([`LOCAL_EDGES`] order)
    /// and to each other.
    pub edge_perp: [[Vec3; 2]; 6],
    /// Directional derivatives along `edge_perp` at the edge midpoints.
    pub edge_derivs: [[f64; 2]; 6],
}

impl HermiteData {
    /// Exact data of a function with known gradient.
    pub fn from_function(
        verts: &[Point3; 4],
        edge_perp: [[Vec3; 2]; 6],
        f: impl Fn(Point3) -> (f64, Vec3),
    ) -> Self {
        let mut values = [0.0; 4];
        let mut grads = [Vec3::ZERO; 4];
        for i in 0..4 {
            (values[i], grads[i]) = f(verts[i]);
        }
        let mut edge_derivs = [[0.0; 2]; 6];
        for (k, [a, b]) in LOCAL_EDGES.iter().enumerate() {
            let (_, g) = f((verts[*a] + verts[*b]) * 0.5);
            edge_derivs[k] = [g.dot(edge_perp[k][0]), g.dot(edge_perp[k][1])];
        }
        HermiteData {
            values,
            grads,
            edge_perp,
            edge_derivs,
        }
    }

    /// Gradient at the midpoint of local edge `(a, b)`: the tangential part
    /// comes from the cubic Hermite interpolant along the edge, the normal
    /// part from the stored perpendicular derivatives.
    pub fn midpoint_gradient(&self, verts: &[Point3; 4], a: usize, b: usize) -> Vec3 {
        let k = LOCAL_EDGES
            .iter()
            .position(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
            .expect("distinct local vertices");
        let d = verts[b] - verts[a];
        let ds = 1.5 * (self.values[b] - self.values[a])
            - 0.25 * (self.grads[a].dot(d) + self.grads[b].dot(d));
        let [n1, n2] = self.edge_perp[k];
        let [d1, d2] = self.edge_derivs[k];
        d * (ds / d.norm_squared()) + n1 * d1 + n2 * d2
    }
}

/// Coefficients `c1..c91` stored zero-based (`c[g - 1]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroCoefficients(pub [f64; 91]);

impl MacroCoefficients {
    pub fn get(&self, g: usize) -> f64 {
        self.0[g - 1]
    }

    /// B-form coefficients of subtetrahedron `alpha` (zero-based).
    pub fn subtet(&self, alpha: usize) -> [f64; 20] {
        let map = coeff_map();
        std::array::from_fn(|k| self.0[map.global[k][alpha] as usize - 1])
    }
}

/// Interior coefficient next to edge `(v1, v2)` of a triangle `(v1, v2, v3)`
/// fixing the derivative towards `v3` at the edge midpoint.
///
/// `ring` is `[c300, c210, c120, c030]` along the edge and `side` is
/// `[c201, c021]`; the direction `v3 - η` has face coordinates
/// `a = (-1/2, -1/2, 1)`.
pub fn edge_interior_coefficient(
    grad_mid: Vec3,
    eta: Point3,
    v3: Point3,
    ring: [f64; 4],
    side: [f64; 2],
) -> f64 {
    const A: [f64; 3] = [-0.5, -0.5, 1.0];
    let du = grad_mid.dot(v3 - eta);
    4.0 / (6.0 * A[2]) * du
        - 0.5 * (side[0] + side[1])
        - A[0] / (2.0 * A[2]) * (ring[0] + 2.0 * ring[1] + ring[2])
        - A[1] / (2.0 * A[2]) * (ring[1] + 2.0 * ring[2] + ring[3])
}

/// All 91 coefficients of a macroelement.
pub fn compute_macro_coefficients(split: &WfSplit, data: &HermiteData) -> MacroCoefficients {
    let mut c = [0.0f64; 92];
    let p = &split.verts;
    let f = &data.values;
    let g = &data.grads;
    let [s5, s12, s19, s26] = split.sigma;
    let k = split.kappa;
    let (p5, p12, p19, p26, p91) = (
        split.node(5),
        split.node(12),
        split.node(19),
        split.node(26),
        split.node(91),
    );
    // coefficient one third of the way from vertex i towards x
    let dir = |i: usize, x: Point3| f[i - 1] + g[i - 1].dot(x - p[i - 1]) / 3.0;
    let sig = |s: [f64; 3], a: f64, b: f64, cc: f64| s[0] * a + s[1] * b + s[2] * cc;
    let kap = |a: f64, b: f64, cc: f64, d: f64| k[0] * a + k[1] * b + k[2] * cc + k[3] * d;

    // shell 0: vertices, macro edges, directions into face points
    c[1..=4].copy_from_slice(f);
    c[33] = dir(1, p[1]);
    c[34] = dir(2, p[0]);
    c[35] = dir(2, p[2]);
    c[36] = dir(3, p[1]);
    c[37] = dir(3, p[3]);
    c[38] = dir(4, p[2]);
    c[39] = dir(3, p[0]);
    c[40] = dir(1, p[2]);
    c[41] = dir(2, p[3]);
    c[42] = dir(4, p[1]);
    c[43] = dir(4, p[0]);
    c[44] = dir(1, p[3]);

    c[9] = dir(2, p5);
    c[10] = dir(3, p5);
    c[11] = dir(1, p5);
    c[16] = dir(4, p12);
    c[17] = dir(3, p12);
    c[18] = dir(2, p12);
    c[23] = dir(1, p19);
    c[24] = dir(3, p19);
    c[25] = dir(4, p19);
    c[30] = dir(2, p26);
    c[31] = dir(1, p26);
    c[32] = dir(4, p26);

    // shell 1 radial coefficients towards the incenter
    c[48] = dir(2, p91);
    c[49] = dir(3, p91);
    c[50] = dir(1, p91);
    c[52] = dir(4, p91);

    // edge-interior coefficients: (index, edge a-b, opposite node, side, ring)
    let edge_rows: [(usize, usize, usize, Point3, [usize; 2], [usize; 4]); 18] = [
        (61, 1, 2, p5, [11, 9], [1, 33, 34, 2]),
        (62, 2, 3, p5, [9, 10], [2, 35, 36, 3]),
        (63, 3, 1, p5, [10, 11], [3, 39, 40, 1]),
        (64, 2, 4, p12, [18, 16], [2, 41, 42, 4]),
        (65, 4, 3, p12, [16, 17], [4, 38, 37, 3]),
        (66, 3, 2, p12, [17, 18], [3, 36, 35, 2]),
        (67, 4, 1, p19, [25, 23], [4, 43, 44, 1]),
        (68, 1, 3, p19, [23, 24], [1, 40, 39, 3]),
        (69, 3, 4, p19, [24, 25], [3, 37, 38, 4]),
        (70, 4, 2, p26, [32, 30], [4, 42, 41, 2]),
        (71, 2, 1, p26, [30, 31], [2, 34, 33, 1]),
        (72, 1, 4, p26, [31, 32], [1, 44, 43, 4]),
        (73, 1, 2, p91, [50, 48], [1, 33, 34, 2]),
        (77, 2, 3, p91, [48, 49], [2, 35, 36, 3]),
        (78, 3, 1, p91, [49, 50], [3, 39, 40, 1]),
        (80, 2, 4, p91, [48, 52], [2, 41, 42, 4]),
        (79, 4, 3, p91, [52, 49], [4, 38, 37, 3]),
        (87, 1, 4, p91, [50, 52], [1, 44, 43, 4]),
    ];
    for (idx, a, b, x, side, ring) in edge_rows {
        let gm = data.midpoint_gradient(p, a - 1, b - 1);
        let eta = (p[a - 1] + p[b - 1]) * 0.5;
        c[idx] = edge_interior_coefficient(
            gm,
            eta,
            x,
            ring.map(|r| c[r]),
            side.map(|s| c[s]),
        );
    }

    // face coefficients around the split points
    c[6] = sig(s5, c[61], c[9], c[62]);
    c[7] = sig(s5, c[63], c[62], c[10]);
    c[8] = sig(s5, c[11], c[61], c[63]);
    c[5] = sig(s5, c[8], c[6], c[7]);

    c[13] = sig(s12, c[64], c[16], c[65]);
    c[14] = sig(s12, c[66], c[65], c[17]);
    c[15] = sig(s12, c[18], c[64], c[66]);
    c[12] = sig(s12, c[15], c[13], c[14]);

    c[20] = sig(s19, c[67], c[23], c[68]);
    c[21] = sig(s19, c[69], c[68], c[24]);
    c[22] = sig(s19, c[25], c[67], c[69]);
    c[19] = sig(s19, c[22], c[20], c[21]);

    c[27] = sig(s26, c[30], c[71], c[70]);
    c[28] = sig(s26, c[71], c[31], c[72]);
    c[29] = sig(s26, c[70], c[72], c[32]);
    c[26] = sig(s26, c[27], c[28], c[29]);

    // shell 1 on the inner faces
    c[74] = sig(s5, c[73], c[48], c[77]);
    c[75] = sig(s5, c[78], c[77], c[49]);
    c[76] = sig(s5, c[50], c[73], c[78]);
    c[54] = sig(s5, c[76], c[74], c[75]);

    c[81] = sig(s12, c[48], c[80], c[77]);
    c[82] = sig(s12, c[77], c[79], c[49]);
    c[83] = sig(s12, c[80], c[52], c[79]);
    c[56] = sig(s12, c[81], c[83], c[82]);

    c[84] = sig(s19, c[52], c[87], c[79]);
    c[85] = sig(s19, c[87], c[50], c[78]);
    c[86] = sig(s19, c[79], c[78], c[49]);
    c[58] = sig(s19, c[84], c[85], c[86]);

    c[88] = sig(s26, c[73], c[50], c[87]);
    c[89] = sig(s26, c[48], c[73], c[80]);
    c[90] = sig(s26, c[80], c[87], c[52]);
    c[60] = sig(s26, c[89], c[88], c[90]);

    // shell 2, after every shell 0/1 entry of all four regions
    c[45] = kap(c[73], c[48], c[80], c[77]);
    c[46] = kap(c[78], c[77], c[79], c[49]);
    c[47] = kap(c[50], c[73], c[87], c[78]);
    c[51] = kap(c[87], c[80], c[52], c[79]);

    c[53] = sig(s5, c[47], c[45], c[46]);
    c[55] = sig(s12, c[45], c[51], c[46]);
    c[57] = sig(s19, c[51], c[47], c[46]);
    c[59] = sig(s26, c[45], c[47], c[51]);

    // shell 3
    c[91] = kap(c[47], c[45], c[51], c[46]);

    let mut out = [0.0; 91];
    out.copy_from_slice(&c[1..]);
    MacroCoefficients(out)
}

/// Rows of the element mapping table: local multi-index, node index of the
/// external mesh tool, and the global coefficient for α = 1..12.
pub const MAPPING_TABLE: [(MultiIndex, u8, [u8; 12]); 20] = [
    ([3, 0, 0, 0], 1, [1, 2, 3, 2, 4, 3, 4, 1, 3, 2, 1, 4]),
    ([0, 3, 0, 0], 2, [2, 3, 1, 4, 3, 2, 1, 3, 4, 1, 4, 2]),
    ([0, 0, 3, 0], 3, [5, 5, 5, 12, 12, 12, 19, 19, 19, 26, 26, 26]),
    ([0, 0, 0, 3], 4, [91; 12]),
    ([2, 1, 0, 0], 5, [33, 35, 39, 41, 38, 36, 43, 40, 37, 34, 44, 42]),
    ([1, 2, 0, 0], 6, [34, 36, 40, 42, 37, 35, 44, 39, 38, 33, 43, 41]),
    ([0, 2, 1, 0], 7, [9, 10, 11, 16, 17, 18, 23, 24, 25, 31, 32, 30]),
    ([0, 1, 2, 0], 8, [6, 7, 8, 13, 14, 15, 20, 21, 22, 28, 29, 27]),
    ([1, 0, 2, 0], 9, [8, 6, 7, 15, 13, 14, 22, 20, 21, 27, 28, 29]),
    ([2, 0, 1, 0], 10, [11, 9, 10, 18, 16, 17, 25, 23, 24, 30, 31, 32]),
    ([1, 0, 0, 2], 11, [47, 45, 46, 45, 51, 46, 51, 47, 46, 45, 47, 51]),
    ([2, 0, 0, 1], 12, [50, 48, 49, 48, 52, 49, 52, 50, 49, 48, 50, 52]),
    ([0, 0, 1, 2], 13, [53, 53, 53, 55, 55, 55, 57, 57, 57, 59, 59, 59]),
    ([0, 0, 2, 1], 14, [54, 54, 54, 56, 56, 56, 58, 58, 58, 60, 60, 60]),
    ([0, 1, 0, 2], 15, [45, 46, 47, 51, 46, 45, 47, 46, 51, 47, 51, 45]),
    ([0, 2, 0, 1], 16, [48, 49, 50, 52, 49, 48, 50, 49, 52, 50, 52, 48]),
    ([1, 1, 1, 0], 17, [61, 62, 63, 64, 65, 66, 67, 68, 69, 71, 72, 70]),
    ([1, 1, 0, 1], 18, [73, 77, 78, 80, 79, 77, 87, 78, 79, 73, 87, 80]),
    ([1, 0, 1, 1], 19, [76, 74, 75, 81, 83, 82, 84, 85, 86, 89, 88, 90]),
    ([0, 1, 1, 1], 20, [74, 75, 76, 83, 82, 81, 85, 86, 84, 88, 90, 89]),
];

/// The mapping table rearranged into canonical Bernstein order.
#[derive(Debug, Clone)]
pub struct CoeffMap {
    /// `global[k][alpha]`: global index (1..=91) of local coefficient `k`.
    pub global: [[u8; 12]; 20],
    /// Node index of the external mesh tool for each canonical position.
    pub gmsh: [u8; 20],
}

pub fn coeff_map() -> &'static CoeffMap {
    static M: OnceLock<CoeffMap> = OnceLock::new();
    M.get_or_init(|| {
        let mut global = [[0u8; 12]; 20];
        let mut gmsh = [0u8; 20];
        for (mi, gm, row) in MAPPING_TABLE {
            let k = index_of(mi);
            global[k] = row;
            gmsh[k] = gm;
        }
        CoeffMap { global, gmsh }
    })
}

impl CoeffMap {
    pub fn lookup(&self, alpha: usize, mi: MultiIndex) -> u8 {
        self.global[index_of(mi)][alpha]
    }
}

/// Domain point of each of the 91 coefficients.
pub fn macro_domain_points(split: &WfSplit) -> [Point3; 91] {
    let map = coeff_map();
    let mut out = [Point3::ZERO; 91];
    for (a, labels) in SUBTETS.iter().enumerate() {
        let dp = domain_points(&labels.map(|l| split.node(l)), 3);
        for (k, p) in dp.iter().enumerate() {
            out[map.global[k][a] as usize - 1] = *p;
        }
    }
    out
}
