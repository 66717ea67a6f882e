//! Synchronization: single-valued Hermite data from a discontinuous field by
//! averaging over vertex and edge stars.

use rayon::prelude::*;

use crate::coefficients::HermiteData;
use crate::error::{Error, Result};
use crate::field::PiecewiseField;
use crate::geometry::{Bary4, Vec3};
use crate::mesh::{TetMesh, LOCAL_EDGES};

/// Fixed direction from which every edge's first perpendicular is derived.
pub const FRAME_REFERENCE: Vec3 = Vec3::new(0.267_261_241_912_424_4, 0.534_522_483_824_848_8, 0.801_783_725_737_273_2);
const FRAME_FALLBACK: Vec3 = Vec3::new(1.0, 0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFrame {
    /// Unit tangent from the lower to the higher vertex id.
    pub t: Vec3,
    pub n1: Vec3,
    pub n2: Vec3,
    pub midpoint: crate::geometry::Point3,
}

impl EdgeFrame {
    pub fn new(a: crate::geometry::Point3, b: crate::geometry::Point3) -> Self {
        let t = (b - a).normalized();
        let mut r = FRAME_REFERENCE;
        if t.cross(r).norm() < 1e-8 {
            r = FRAME_FALLBACK;
        }
        let n1 = (r - t * r.dot(t)).normalized();
        let n2 = t.cross(n1);
        EdgeFrame {
            t,
            n1,
            n2,
            midpoint: (a + b) * 0.5,
        }
    }
}

pub fn build_edge_frames(mesh: &TetMesh) -> Vec<EdgeFrame> {
    mesh.edges
        .iter()
        .map(|&[a, b]| EdgeFrame::new(mesh.vertices[a], mesh.vertices[b]))
        .collect()
}

/// Perpendicular pairs of an element's six edges.
pub fn element_frames(mesh: &TetMesh, frames: &[EdgeFrame], e: usize) -> [[Vec3; 2]; 6] {
    mesh.tet_edges[e].map(|g| [frames[g].n1, frames[g].n2])
}

/// Averaged Hermite data for every element. Contributions are summed in
/// ascending element order, so the result does not depend on threading.
pub fn synchronize(mesh: &TetMesh, field: &PiecewiseField) -> Result<Vec<HermiteData>> {
    if !(1..=3).contains(&field.degree) {
        return Err(Error::UnsupportedDegree(field.degree));
    }
    field.check(mesh)?;
    let frames = build_edge_frames(mesh);

    let vertex_data: Vec<(f64, Vec3)> = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|v| {
            let star = mesh.vertex_tets.get(v);
            let mut val = 0.0;
            let mut grad = Vec3::ZERO;
            for &e in star {
                let i = mesh.tets[e].iter().position(|&x| x == v).unwrap();
                let (f, g) = field.eval_local(mesh, e, &Bary4::vertex(i));
                val += f;
                grad += g;
            }
            let n = star.len() as f64;
            (val / n, grad / n)
        })
        .collect();

    let edge_data: Vec<[f64; 2]> = (0..mesh.edges.len())
        .into_par_iter()
        .map(|g| {
            let [a, b] = mesh.edges[g];
            let star = mesh.edge_tets.get(g);
            let mut d = [0.0; 2];
            for &e in star {
                let t = mesh.tets[e];
                let ia = t.iter().position(|&x| x == a).unwrap();
                let ib = t.iter().position(|&x| x == b).unwrap();
                let mut l = [0.0; 4];
                l[ia] = 0.5;
                l[ib] = 0.5;
                let (_, grad) = field.eval_local(mesh, e, &Bary4(l));
                d[0] += grad.dot(frames[g].n1);
                d[1] += grad.dot(frames[g].n2);
            }
            let n = star.len() as f64;
            [d[0] / n, d[1] / n]
        })
        .collect();

    Ok((0..mesh.num_tets())
        .map(|e| {
            let t = mesh.tets[e];
            let mut values = [0.0; 4];
            let mut grads = [Vec3::ZERO; 4];
            for i in 0..4 {
                (values[i], grads[i]) = vertex_data[t[i]];
            }
            let mut edge_derivs = [[0.0; 2]; 6];
            for k in 0..LOCAL_EDGES.len() {
                edge_derivs[k] = edge_data[mesh.tet_edges[e][k]];
            }
            HermiteData {
                values,
                grads,
                edge_perp: element_frames(mesh, &frames, e),
                edge_derivs,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    fn assert_orthonormal(f: &EdgeFrame) {
        for v in [f.t, f.n1, f.n2] {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
        assert!(f.t.dot(f.n1).abs() < 1e-15);
        assert!(f.t.dot(f.n2).abs() < 1e-15);
        assert!(f.n1.dot(f.n2).abs() < 1e-15);
        assert!((f.t.cross(f.n1) - f.n2).norm() < 1e-15);
    }

    #[test]
    fn frame_along_x() {
        let f = EdgeFrame::new(Point3::ZERO, Point3::new(2.0, 0.0, 0.0));
        assert_eq!(f.t, Vec3::new(1.0, 0.0, 0.0));
        assert_orthonormal(&f);
    }

    #[test]
    fn frame_parallel_to_reference_uses_fallback() {
        let f = EdgeFrame::new(Point3::ZERO, FRAME_REFERENCE * 3.0);
        assert_orthonormal(&f);
        assert!(f.n1.dot(FRAME_FALLBACK).abs() > 0.5);
    }

    #[test]
    fn degree_four_rejected() {
        let m = crate::meshgen::kuhn_grid(1, 1, 1);
        let f = PiecewiseField::zeros(4, m.num_tets());
        assert!(matches!(synchronize(&m, &f), Err(Error::UnsupportedDegree(4))));
    }
}
