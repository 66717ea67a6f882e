//! The twelve-subtetrahedron Worsey-Farin split of each mesh element.
//!
//! Node labels follow the macroelement numbering: 1..4 are the element
//! vertices, 5, 12, 19 and 26 the split points of faces (1,2,3), (2,4,3),
//! (4,1,3) and (2,1,4), and 91 the incenter.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    incenter, segment_face_intersection, Bary4, Point3, TetGeometry,
};
use crate::mesh::TetMesh;

/// Split faces in the order p5, p12, p19, p26: local vertex triples and the
/// local vertex opposite.
pub const SPLIT_FACES: [([usize; 3], usize); 4] = [
    ([0, 1, 2], 3),
    ([1, 3, 2], 0),
    ([3, 0, 2], 1),
    ([1, 0, 3], 2),
];

/// Node labels of the face split points, aligned with [`SPLIT_FACES`].
pub const FACE_NODES: [u8; 4] = [5, 12, 19, 26];

pub const INCENTER_NODE: u8 = 91;

/// Vertex labels `(a, b, face point, incenter)` of each subtetrahedron.
pub const SUBTETS: [[u8; 4]; 12] = [
    [1, 2, 5, 91],
    [2, 3, 5, 91],
    [3, 1, 5, 91],
    [2, 4, 12, 91],
    [4, 3, 12, 91],
    [3, 2, 12, 91],
    [4, 1, 19, 91],
    [1, 3, 19, 91],
    [3, 4, 19, 91],
    [2, 1, 26, 91],
    [1, 4, 26, 91],
    [4, 2, 26, 91],
];

/// Incenters of all elements, with barycentrics in local vertex order.
pub fn incenters(mesh: &TetMesh) -> Result<Vec<(Point3, Bary4)>> {
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|e| incenter(&mesh.tet_points(e)))
        .collect()
}

/// Split point of every mesh face, with σ relative to the sorted vertex ids
/// of the face.
#[derive(Debug, Clone)]
pub struct FaceSplits {
    pub points: Vec<Point3>,
    pub sigma: Vec<[f64; 3]>,
}

impl FaceSplits {
    pub fn build(mesh: &TetMesh, centers: &[(Point3, Bary4)]) -> Result<Self> {
        let sigma = (0..mesh.faces.len())
            .into_par_iter()
            .map(|f| {
                let [a, b] = mesh.face_tets[f];
                if mesh.is_boundary_face(f) {
                    return Ok([1.0 / 3.0; 3]);
                }
                let v = mesh.faces[f];
                let tri = [mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]];
                let (lo, hi) = (a.min(b), a.max(b));
                segment_face_intersection(centers[lo].0, centers[hi].0, &tri)
                    .map(|(_, s)| s)
                    .map_err(|_| Error::SplitGeometry {
                        elem: lo,
                        face: f,
                        a: centers[lo].0.to_array(),
                        b: centers[hi].0.to_array(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let points = sigma
            .iter()
            .zip(&mesh.faces)
            .map(|(s, v)| {
                mesh.vertices[v[0]] * s[0] + mesh.vertices[v[1]] * s[1] + mesh.vertices[v[2]] * s[2]
            })
            .collect();
        Ok(FaceSplits { points, sigma })
    }

    /// σ of face `f` reordered to follow the given global vertex ids.
    pub fn sigma_for(&self, mesh: &TetMesh, f: usize, verts: [usize; 3]) -> [f64; 3] {
        let sorted = mesh.faces[f];
        let s = self.sigma[f];
        verts.map(|g| s[sorted.iter().position(|&x| x == g).expect("vertex on face")])
    }
}

/// Worsey-Farin split of one macroelement.
#[derive(Debug, Clone)]
pub struct WfSplit {
    pub elem: usize,
    pub verts: [Point3; 4],
    pub incenter: Point3,
    /// Incenter barycentrics ordered (p1, p2, p4, p3).
    pub kappa: [f64; 4],
    /// p5, p12, p19, p26.
    pub face_points: [Point3; 4],
    /// σ of each face point in the face orders (1,2,3), (2,4,3), (4,1,3), (2,1,4).
    pub sigma: [[f64; 3]; 4],
    pub subtets: [TetGeometry; 12],
    /// Alfeld cells (face, incenter) in face order; cell `f` holds subtets
    /// `3f..3f+3`.
    pub cells: [TetGeometry; 4],
}

impl WfSplit {
    pub fn build(
        mesh: &TetMesh,
        elem: usize,
        centers: &[(Point3, Bary4)],
        faces: &FaceSplits,
    ) -> Result<Self> {
        let verts = mesh.tet_points(elem);
        let t = mesh.tets[elem];
        let (ic, k) = centers[elem];
        let mut face_points = [Point3::ZERO; 4];
        let mut sigma = [[0.0; 3]; 4];
        for (s, (loc, opp)) in SPLIT_FACES.iter().enumerate() {
            let f = mesh.tet_faces[elem][*opp];
            sigma[s] = faces.sigma_for(mesh, f, loc.map(|i| t[i]));
            face_points[s] = faces.points[f];
        }
        let mut split = WfSplit {
            elem,
            verts,
            incenter: ic,
            kappa: [k[0], k[1], k[3], k[2]],
            face_points,
            sigma,
            subtets: [TetGeometry::new(verts)?; 12],
            cells: [TetGeometry::new(verts)?; 4],
        };
        for (a, labels) in SUBTETS.iter().enumerate() {
            let p = labels.map(|l| split.node(l));
            split.subtets[a] = TetGeometry::new(p)
                .ok()
                .filter(|g| g.volume > 0.0)
                .ok_or(Error::SubtetOrientation {
                    elem,
                    alpha: a + 1,
                    volume: crate::geometry::signed_volume(&p),
                })?;
        }
        for (f, (loc, _)) in SPLIT_FACES.iter().enumerate() {
            let p = [verts[loc[0]], verts[loc[1]], verts[loc[2]], ic];
            split.cells[f] = TetGeometry::new(p)
                .ok()
                .filter(|g| g.volume > 0.0)
                .ok_or(Error::SubtetOrientation {
                    elem,
                    alpha: 3 * f + 1,
                    volume: crate::geometry::signed_volume(&p),
                })?;
        }
        Ok(split)
    }

    /// Position of a node label (1..4, 5, 12, 19, 26, 91).
    pub fn node(&self, label: u8) -> Point3 {
        match label {
            1..=4 => self.verts[label as usize - 1],
            5 => self.face_points[0],
            12 => self.face_points[1],
            19 => self.face_points[2],
            26 => self.face_points[3],
            91 => self.incenter,
            _ => panic!("unknown node label {label}"),
        }
    }

    /// Subtetrahedron containing `p` (zero-based α) and its barycentrics.
    ///
    /// Searches the Alfeld cell first, then its three pieces; the lowest α
    /// wins on shared faces.
    pub fn locate(&self, p: Point3) -> Result<(usize, Bary4)> {
        for tol in crate::bvh::INSIDE_TOLERANCES {
            for (f, cell) in self.cells.iter().enumerate() {
                if cell.barycentric(p).min() < -tol {
                    continue;
                }
                for a in 3 * f..3 * f + 3 {
                    let l = self.subtets[a].barycentric(p);
                    if l.min() >= -tol {
                        return Ok((a, l));
                    }
                }
            }
        }
        self.locate_exhaustive(p)
    }

    /// Lowest α whose subtetrahedron contains `p`, scanning all twelve.
    pub fn locate_exhaustive(&self, p: Point3) -> Result<(usize, Bary4)> {
        for tol in crate::bvh::INSIDE_TOLERANCES {
            for (a, g) in self.subtets.iter().enumerate() {
                let l = g.barycentric(p);
                if l.min() >= -tol {
                    return Ok((a, l));
                }
            }
        }
        Err(Error::SubtetNotFound {
            point: p.to_array(),
            elem: self.elem,
        })
    }
}

/// Splits of every element.
pub fn build_splits(mesh: &TetMesh) -> Result<Vec<WfSplit>> {
    let centers = incenters(mesh)?;
    let faces = FaceSplits::build(mesh, &centers)?;
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|e| WfSplit::build(mesh, e, &centers, &faces))
        .collect()
}
