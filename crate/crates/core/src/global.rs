//! Global L² projection of a discontinuous field onto the continuous
//! piecewise-cubic space of the Worsey-Farin refined mesh.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::bernstein::{multi_indices, reference_mass, MultiIndex};
use crate::coefficients::{coeff_map, MacroCoefficients};
use crate::error::{Error, Result};
use crate::field::PiecewiseField;
use crate::mesh::TetMesh;
use crate::quadrature::rule_56;
use crate::split::{WfSplit, SPLIT_FACES, SUBTETS};

/// Vertex of the refined mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKey {
    Vertex(usize),
    Face(usize),
    Incenter(usize),
}

/// A cubic domain point written as the multiset of three refined-mesh
/// vertices it averages, sorted.
pub type DofKey = [NodeKey; 3];

fn label_key(mesh: &TetMesh, e: usize, label: u8) -> NodeKey {
    match label {
        1..=4 => NodeKey::Vertex(mesh.tets[e][label as usize - 1]),
        91 => NodeKey::Incenter(e),
        _ => {
            let s = crate::split::FACE_NODES
                .iter()
                .position(|&l| l == label)
                .expect("face node label");
            NodeKey::Face(mesh.tet_faces[e][SPLIT_FACES[s].1])
        }
    }
}

fn dof_key(labels: [NodeKey; 4], m: MultiIndex) -> DofKey {
    let mut out = Vec::with_capacity(3);
    for (k, &c) in labels.iter().zip(&m) {
        for _ in 0..c {
            out.push(*k);
        }
    }
    let mut key: DofKey = out.try_into().expect("cubic multi-index");
    key.sort_unstable();
    key
}

/// Global numbering of the distinct cubic nodes of the refined mesh.
#[derive(Debug, Clone)]
pub struct GlobalDofTable {
    /// `macro_dofs[e][g]`: global dof of coefficient `g + 1` of element `e`.
    pub macro_dofs: Vec<[usize; 91]>,
    pub num_dofs: usize,
}

impl GlobalDofTable {
    pub fn build(mesh: &TetMesh) -> Result<Self> {
        let map = coeff_map();
        let idx = multi_indices(3);
        let mut ids: HashMap<DofKey, usize> = HashMap::new();
        let mut macro_dofs = Vec::with_capacity(mesh.num_tets());
        for e in 0..mesh.num_tets() {
            let mut row = [usize::MAX; 91];
            for (a, labels) in SUBTETS.iter().enumerate() {
                let keys = labels.map(|l| label_key(mesh, e, l));
                for (k, m) in idx.iter().enumerate() {
                    let key = dof_key(keys, *m);
                    let next = ids.len();
                    let id = *ids.entry(key).or_insert(next);
                    let g = map.global[k][a] as usize - 1;
                    if row[g] == usize::MAX {
                        row[g] = id;
                    } else if row[g] != id {
                        return Err(Error::Mismatch(format!(
                            "coefficient {} of element {e} maps to two nodes",
                            g + 1
                        )));
                    }
                }
            }
            macro_dofs.push(row);
        }
        Ok(GlobalDofTable {
            macro_dofs,
            num_dofs: ids.len(),
        })
    }

    /// The 20 global dofs of subtetrahedron `alpha` in canonical order.
    pub fn subtet_dofs(&self, e: usize, alpha: usize) -> [usize; 20] {
        let map = coeff_map();
        std::array::from_fn(|k| self.macro_dofs[e][map.global[k][alpha] as usize - 1])
    }
}

/// Symmetric sparse matrix in compressed row form.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries; the triplets are sorted first, so the result
    /// does not depend on their order.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.par_sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[r.clone()]
                .iter()
                .zip(&self.vals[r])
                .map(|(&c, v)| v * x[c])
                .sum();
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let r = self.row_ptr[i]..self.row_ptr[i + 1];
                self.cols[r.clone()]
                    .iter()
                    .zip(&self.vals[r])
                    .find(|(&c, _)| c == i)
                    .map_or(0.0, |(_, v)| *v)
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`,
/// at most `max_iter` iterations.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, CgStats)> {
    let n = a.n;
    let inv_d: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, CgStats { iterations: 0, residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_d).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 1..=max_iter {
        a.mul(&p, &mut ap);
        let step = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        res = dot(&r, &r).sqrt() / bnorm;
        if res <= tol {
            return Ok((x, CgStats { iterations: it, residual: res }));
        }
        for i in 0..n {
            z[i] = r[i] * inv_d[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged {
        iterations: max_iter,
        residual: res,
    })
}

pub const GLOBAL_TOLERANCE: f64 = 1e-12;

/// Assembled mass system of the refined mesh for a given source field.
pub fn assemble(
    source: &PiecewiseField,
    mesh: &TetMesh,
    splits: &[WfSplit],
    dofs: &GlobalDofTable,
) -> (CsrMatrix, Vec<f64>) {
    let mref = reference_mass(3);
    let rule = rule_56();
    let per_elem: Vec<(Vec<(usize, usize, f64)>, Vec<(usize, f64)>)> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|e| {
            let mut trip = Vec::with_capacity(12 * 400);
            let mut rhs = Vec::with_capacity(12 * 20);
            let mut basis = [0.0; 20];
            for a in 0..12 {
                let g = &splits[e].subtets[a];
                let ids = dofs.subtet_dofs(e, a);
                for i in 0..20 {
                    for j in 0..20 {
                        trip.push((ids[i], ids[j], g.volume * mref[i * 20 + j]));
                    }
                }
                let mut acc = [0.0; 20];
                for (l, w) in rule.points.iter().zip(&rule.weights) {
                    let p = g.point(l);
                    let f = source.eval_local(mesh, e, &mesh.geometry[e].barycentric(p)).0;
                    crate::bernstein::basis_values(3, l, &mut basis);
                    for k in 0..20 {
                        acc[k] += w * f * basis[k];
                    }
                }
                for k in 0..20 {
                    rhs.push((ids[k], acc[k] * g.volume));
                }
            }
            (trip, rhs)
        })
        .collect();
    let mut b = vec![0.0; dofs.num_dofs];
    let mut trip = Vec::with_capacity(per_elem.iter().map(|p| p.0.len()).sum());
    for (t, r) in per_elem {
        trip.extend(t);
        for (i, v) in r {
            b[i] += v;
        }
    }
    (CsrMatrix::from_triplets(dofs.num_dofs, trip), b)
}

/// Continuous (C⁰) cubic spline on the split mesh closest in L² to `source`.
pub fn global_spline_projection(
    source: &PiecewiseField,
    mesh: &TetMesh,
    splits: &[WfSplit],
) -> Result<Vec<MacroCoefficients>> {
    source.check(mesh)?;
    if splits.len() != mesh.num_tets() {
        return Err(Error::Mismatch(format!(
            "{} splits for {} elements",
            splits.len(),
            mesh.num_tets()
        )));
    }
    let dofs = GlobalDofTable::build(mesh)?;
    let (a, b) = assemble(source, mesh, splits, &dofs);
    let cap = (50.0 * (dofs.num_dofs as f64).sqrt()).ceil() as usize;
    let (x, _) = pcg(&a, &b, GLOBAL_TOLERANCE, cap)?;
    Ok(dofs
        .macro_dofs
        .iter()
        .map(|row| MacroCoefficients(row.map(|i| x[i])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::domain_points;
    use crate::meshgen::{kuhn_grid, perturbed_kuhn};
    use crate::split::build_splits;

    #[test]
    fn single_macro_dofs_match_distinct_lattice_points() {
        let m = perturbed_kuhn(1, 1, 1, 0.0, 0);
        let one = TetMesh::new(m.tet_points(0).to_vec(), vec![[0, 1, 2, 3]]).unwrap();
        let splits = build_splits(&one).unwrap();
        let table = GlobalDofTable::build(&one).unwrap();
        let mut pts: Vec<[f64; 3]> = Vec::new();
        for labels in SUBTETS {
            for p in domain_points(&labels.map(|l| splits[0].node(l)), 3) {
                if !pts.iter().any(|q| (p - crate::geometry::Point3::from_array(*q)).norm() < 1e-12) {
                    pts.push(p.to_array());
                }
            }
        }
        assert_eq!(table.num_dofs, pts.len());
        assert_eq!(table.num_dofs, 91);
    }

    #[test]
    fn shared_faces_share_dofs() {
        let m = kuhn_grid(2, 1, 1);
        let t = GlobalDofTable::build(&m).unwrap();
        // the Clough-Tocher split of a face carries 19 cubic nodes
        let f = (0..m.faces.len()).find(|&f| !m.is_boundary_face(f)).unwrap();
        let [e0, e1] = m.face_tets[f];
        let a: std::collections::HashSet<_> = t.macro_dofs[e0].iter().collect();
        let shared = t.macro_dofs[e1].iter().filter(|d| a.contains(d)).count();
        assert_eq!(shared, 19);
        assert!(t.num_dofs < 91 * m.num_tets());
    }

    #[test]
    fn pcg_solves_small_spd() {
        let a = CsrMatrix::from_triplets(
            3,
            vec![(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0), (2, 2, 2.0), (2, 2, 0.5)],
        );
        let (x, s) = pcg(&a, &[1.0, 2.0, 5.0], 1e-14, 10).unwrap();
        assert!(s.iterations <= 3);
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-13);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-13);
        assert!((x[2] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 0.9), (1, 0, 0.9), (1, 1, 1.0)]);
        let r = pcg(&a, &[1.0, 0.0], 1e-30, 1);
        assert!(matches!(r, Err(Error::SolverDiverged { iterations: 1, .. })));
    }
}
