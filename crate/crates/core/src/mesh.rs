//! Tetrahedral mesh with face, edge and vertex incidence.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{diameter, signed_volume, Point3, TetGeometry, DEGENERATE_REL_VOLUME, FACE_OPPOSITE};

/// Marker for a face without a neighbouring element.
pub const BOUNDARY: usize = usize::MAX;

/// Local vertex pairs of the six edges, in the order used everywhere.
pub const LOCAL_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Compressed list-of-lists.
#[derive(Debug, Clone, Default)]
pub struct Incidence {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Incidence {
    fn from_lists(lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut items = Vec::new();
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            items.extend_from_slice(&l);
            offsets.push(items.len());
        }
        Incidence { offsets, items }
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.items[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct TetMesh {
    pub vertices: Vec<Point3>,
    pub tets: Vec<[usize; 4]>,
    /// Neighbour across the face opposite each local vertex, or [`BOUNDARY`].
    pub face_neighbors: Vec<[usize; 4]>,
    /// Unique faces as sorted vertex triples.
    pub faces: Vec<[usize; 3]>,
    /// Global face id of the face opposite each local vertex.
    pub tet_faces: Vec<[usize; 4]>,
    /// Elements on each side of a face; the second is [`BOUNDARY`] on the hull.
    pub face_tets: Vec<[usize; 2]>,
    /// Unique edges as sorted vertex pairs.
    pub edges: Vec<[usize; 2]>,
    /// Global edge id per local edge (see [`LOCAL_EDGES`]).
    pub tet_edges: Vec<[usize; 6]>,
    pub vertex_tets: Incidence,
    pub edge_tets: Incidence,
    pub geometry: Vec<TetGeometry>,
}

impl TetMesh {
    /// Builds a mesh, repairing negatively oriented elements by swapping
    /// their third and fourth vertices.
    ///
    /// Errors report zero-based element indices.
    pub fn new(vertices: Vec<Point3>, mut tets: Vec<[usize; 4]>) -> Result<Self> {
        let nv = vertices.len();
        for (e, t) in tets.iter_mut().enumerate() {
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::Mismatch(format!(
                    "element {e} references a vertex beyond {nv}"
                )));
            }
            let p = [vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]];
            let vol = signed_volume(&p);
            let d = diameter(&p);
            if !(vol.abs() > DEGENERATE_REL_VOLUME * d * d * d) {
                return Err(Error::DegenerateElement { elem_id: e, volume: vol });
            }
            if vol < 0.0 {
                t.swap(2, 3);
            }
        }

        let geometry = tets
            .iter()
            .enumerate()
            .map(|(e, t)| {
                TetGeometry::new([vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]])
                    .map_err(|_| Error::DegenerateElement { elem_id: e, volume: 0.0 })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut face_ids: HashMap<[usize; 3], usize> = HashMap::with_capacity(tets.len() * 2);
        let mut faces = Vec::new();
        let mut face_tets: Vec<[usize; 2]> = Vec::new();
        let mut tet_faces = vec![[0usize; 4]; tets.len()];
        for (e, t) in tets.iter().enumerate() {
            for (i, f) in FACE_OPPOSITE.iter().enumerate() {
                let mut key = [t[f[0]], t[f[1]], t[f[2]]];
                key.sort_unstable();
                let id = *face_ids.entry(key).or_insert_with(|| {
                    faces.push(key);
                    face_tets.push([BOUNDARY, BOUNDARY]);
                    faces.len() - 1
                });
                let slot = &mut face_tets[id];
                if slot[0] == BOUNDARY {
                    slot[0] = e;
                } else if slot[1] == BOUNDARY {
                    slot[1] = e;
                } else {
                    return Err(Error::Mismatch(format!(
                        "face {key:?} is shared by more than two elements"
                    )));
                }
                tet_faces[e][i] = id;
            }
        }

        let face_neighbors = tet_faces
            .iter()
            .enumerate()
            .map(|(e, tf)| {
                let mut n = [BOUNDARY; 4];
                for i in 0..4 {
                    let [a, b] = face_tets[tf[i]];
                    n[i] = if a == e { b } else { a };
                }
                n
            })
            .collect();

        let mut edge_ids: HashMap<[usize; 2], usize> = HashMap::with_capacity(tets.len() * 2);
        let mut edges = Vec::new();
        let mut tet_edges = vec![[0usize; 6]; tets.len()];
        for (e, t) in tets.iter().enumerate() {
            for (k, le) in LOCAL_EDGES.iter().enumerate() {
                let (a, b) = (t[le[0]], t[le[1]]);
                let key = if a < b { [a, b] } else { [b, a] };
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
                tet_edges[e][k] = id;
            }
        }

        let mut vt = vec![Vec::new(); nv];
        let mut et = vec![Vec::new(); edges.len()];
        for (e, t) in tets.iter().enumerate() {
            for &v in t {
                vt[v].push(e);
            }
            for &g in &tet_edges[e] {
                et[g].push(e);
            }
        }

        Ok(TetMesh {
            vertices,
            tets,
            face_neighbors,
            faces,
            tet_faces,
            face_tets,
            edges,
            tet_edges,
            vertex_tets: Incidence::from_lists(vt),
            edge_tets: Incidence::from_lists(et),
            geometry,
        })
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn tet_points(&self, e: usize) -> [Point3; 4] {
        self.geometry[e].verts
    }

    pub fn volume(&self, e: usize) -> f64 {
        self.geometry[e].volume
    }

    pub fn total_volume(&self) -> f64 {
        self.geometry.iter().map(|g| g.volume).sum()
    }

    /// Characteristic size `(|Ω| / N)^(1/3)`.
    pub fn h(&self) -> f64 {
        (self.total_volume() / self.num_tets() as f64).cbrt()
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.face_tets[f][1] == BOUNDARY
    }

    pub fn num_interior_faces(&self) -> usize {
        self.face_tets.iter().filter(|t| t[1] != BOUNDARY).count()
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for &v in &self.vertices {
            lo = lo.min_components(v);
            hi = hi.max_components(v);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    pub(crate) fn kuhn_cube() -> TetMesh {
        let mut v = Vec::new();
        for k in 0..2 {
            for j in 0..2 {
                for i in 0..2 {
                    v.push(Point3::new(i as f64, j as f64, k as f64));
                }
            }
        }
        // six tets around the 0-7 diagonal
        let tets = vec![
            [0, 1, 3, 7],
            [0, 1, 5, 7],
            [0, 2, 3, 7],
            [0, 2, 6, 7],
            [0, 4, 5, 7],
            [0, 4, 6, 7],
        ];
        TetMesh::new(v, tets).unwrap()
    }

    #[test]
    fn single_tet() {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let m = TetMesh::new(v, vec![[0, 1, 2, 3]]).unwrap();
        assert_eq!(m.faces.len(), 4);
        assert!(m.face_neighbors[0].iter().all(|&n| n == BOUNDARY));
        assert_eq!(m.edges.len(), 6);
    }

    #[test]
    fn orientation_is_repaired() {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let m = TetMesh::new(v, vec![[0, 2, 1, 3]]).unwrap();
        assert!(m.volume(0) > 0.0);
    }

    #[test]
    fn degenerate_element_reports_index() {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let r = TetMesh::new(v, vec![[0, 1, 2, 4], [0, 1, 2, 3]]);
        assert!(matches!(r, Err(Error::DegenerateElement { elem_id: 1, .. })));
    }

    #[test]
    fn two_tets_share_one_face() {
        let v = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(0.0, 0.0, -1.0),
        ];
        let m = TetMesh::new(v, vec![[0, 1, 2, 3], [0, 2, 1, 4]]).unwrap();
        assert_eq!(m.num_interior_faces(), 1);
        assert_eq!(m.faces.len(), 7);
        assert_eq!(m.face_neighbors[0][3], 1);
        assert_eq!(m.face_neighbors[1][3], 0);
    }

    #[test]
    fn kuhn_cube_face_count_matches_brute_force() {
        let m = kuhn_cube();
        let mut all = Vec::new();
        for t in &m.tets {
            for f in FACE_OPPOSITE {
                let mut k = [t[f[0]], t[f[1]], t[f[2]]];
                k.sort_unstable();
                all.push(k);
            }
        }
        let unique: HashSet<_> = all.iter().copied().collect();
        let interior = unique
            .iter()
            .filter(|k| all.iter().filter(|a| a == k).count() == 2)
            .count();
        assert_eq!(unique.len(), 18);
        assert_eq!(interior, 6);
        assert_eq!(m.faces.len(), 18);
        assert_eq!(m.num_interior_faces(), 6);
        assert!((m.total_volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn adjacency_is_symmetric() {
        let m = kuhn_cube();
        for (e, n) in m.face_neighbors.iter().enumerate() {
            for &o in n {
                if o != BOUNDARY {
                    assert!(m.face_neighbors[o].contains(&e));
                }
            }
        }
    }

    #[test]
    fn stars_are_sorted_and_complete() {
        let m = kuhn_cube();
        assert_eq!(m.vertex_tets.get(0), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(m.vertex_tets.get(1), &[0, 1]);
        let diag = m.edges.iter().position(|&e| e == [0, 7]).unwrap();
        assert_eq!(m.edge_tets.get(diag).len(), 6);
    }
}
