//! Bounding volume hierarchy over element boxes and point location.

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::mesh::TetMesh;

/// Containment tolerances tried in order before giving up.
pub const INSIDE_TOLERANCES: [f64; 3] = [1e-10, 1e-8, 1e-6];

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone, Copy)]
struct Aabb {
    lo: Point3,
    hi: Point3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            lo: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            hi: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Point3) {
        self.lo = self.lo.min_components(p);
        self.hi = self.hi.max_components(p);
    }

    fn merge(&mut self, o: &Aabb) {
        self.lo = self.lo.min_components(o.lo);
        self.hi = self.hi.max_components(o.hi);
    }

    fn contains(&self, p: Point3, pad: f64) -> bool {
        p.x >= self.lo.x - pad
            && p.x <= self.hi.x + pad
            && p.y >= self.lo.y - pad
            && p.y <= self.hi.y + pad
            && p.z >= self.lo.z - pad
            && p.z <= self.hi.z + pad
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bbox: Aabb, start: usize, end: usize },
    Inner { bbox: Aabb, left: usize, right: usize },
}

/// Axis-aligned box tree; each element id appears in exactly one leaf.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
    pad: f64,
}

impl Bvh {
    pub fn build(mesh: &TetMesh) -> Self {
        let boxes: Vec<Aabb> = (0..mesh.num_tets())
            .map(|e| {
                let mut b = Aabb::empty();
                for p in mesh.tet_points(e) {
                    b.grow(p);
                }
                b
            })
            .collect();
        let centers: Vec<Point3> = boxes.iter().map(|b| (b.lo + b.hi) * 0.5).collect();
        let mut order: Vec<usize> = (0..boxes.len()).collect();
        let mut nodes = Vec::with_capacity(2 * boxes.len() / LEAF_SIZE + 1);
        if !order.is_empty() {
            build_node(&mut nodes, &mut order, 0, boxes.len(), &boxes, &centers);
        }
        // padding covers the widest tolerance of the sweep
        let max_diam = (0..mesh.num_tets())
            .map(|e| crate::geometry::diameter(&mesh.tet_points(e)))
            .fold(0.0, f64::max);
        let pad = 2.0 * INSIDE_TOLERANCES[2] * max_diam;
        Bvh { nodes, order, pad }
    }

    /// Element ids whose padded box contains `p`, ascending.
    pub fn candidates(&self, p: Point3) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match &self.nodes[n] {
                Node::Leaf { bbox, start, end } => {
                    if bbox.contains(p, self.pad) {
                        out.extend_from_slice(&self.order[*start..*end]);
                    }
                }
                Node::Inner { bbox, left, right } => {
                    if bbox.contains(p, self.pad) {
                        stack.push(*right);
                        stack.push(*left);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Lowest-id element containing `p` with all barycentrics `>= -tol`.
    pub fn locate_with_tol(&self, mesh: &TetMesh, p: Point3, tol: f64) -> Option<usize> {
        self.candidates(p)
            .into_iter()
            .find(|&e| mesh.geometry[e].barycentric(p).min() >= -tol)
    }

    /// Locates `p`, widening the tolerance through [`INSIDE_TOLERANCES`].
    pub fn locate(&self, mesh: &TetMesh, p: Point3) -> Result<usize> {
        let cands = self.candidates(p);
        for tol in INSIDE_TOLERANCES {
            if let Some(&e) = cands
                .iter()
                .find(|&&e| mesh.geometry[e].barycentric(p).min() >= -tol)
            {
                return Ok(e);
            }
        }
        Err(not_found(mesh, p))
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    order: &mut [usize],
    start: usize,
    end: usize,
    boxes: &[Aabb],
    centers: &[Point3],
) -> usize {
    let mut bbox = Aabb::empty();
    let mut cbox = Aabb::empty();
    for &e in &order[start..end] {
        bbox.merge(&boxes[e]);
        cbox.grow(centers[e]);
    }
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bbox, start, end });
        return id;
    }
    let ext = cbox.hi - cbox.lo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        centers[a][axis]
            .total_cmp(&centers[b][axis])
            .then(a.cmp(&b))
    });
    nodes.push(Node::Leaf { bbox, start, end });
    let left = build_node(nodes, order, start, mid, boxes, centers);
    let right = build_node(nodes, order, mid, end, boxes, centers);
    nodes[id] = Node::Inner { bbox, left, right };
    id
}

fn not_found(mesh: &TetMesh, p: Point3) -> Error {
    let (nearest, min_bary) = (0..mesh.num_tets())
        .map(|e| (e, mesh.geometry[e].barycentric(p).min()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    Error::PointNotFound {
        point: p.to_array(),
        nearest,
        min_bary,
    }
}

/// Exhaustive scan with the same tolerance sweep and tie-break as
/// [`Bvh::locate`].
pub fn locate_linear(mesh: &TetMesh, p: Point3) -> Result<usize> {
    for tol in INSIDE_TOLERANCES {
        if let Some(e) =
            (0..mesh.num_tets()).find(|&e| mesh.geometry[e].barycentric(p).min() >= -tol)
        {
            return Ok(e);
        }
    }
    Err(not_found(mesh, p))
}

/// Mesh bundled with its hierarchy.
#[derive(Debug, Clone)]
pub struct Located {
    pub mesh: TetMesh,
    pub bvh: Bvh,
}

impl Located {
    pub fn new(mesh: TetMesh) -> Self {
        let bvh = Bvh::build(&mesh);
        Located { mesh, bvh }
    }

    pub fn locate(&self, p: Point3) -> Result<usize> {
        self.bvh.locate(&self.mesh, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen::kuhn_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_element_in_one_leaf() {
        let m = kuhn_grid(3, 2, 2);
        let b = Bvh::build(&m);
        let mut seen = vec![0; m.num_tets()];
        for n in &b.nodes {
            if let Node::Leaf { start, end, .. } = n {
                for &e in &b.order[*start..*end] {
                    seen[e] += 1;
                }
            }
        }
        // inner nodes overwrite their placeholder leaf, so leaves are exact
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn centroid_found_in_own_element() {
        let m = kuhn_grid(2, 2, 2);
        let b = Bvh::build(&m);
        for e in 0..m.num_tets() {
            assert_eq!(b.locate(&m, m.geometry[e].centroid()).unwrap(), e);
        }
    }

    #[test]
    fn shared_face_goes_to_lowest_id() {
        let m = kuhn_grid(2, 2, 2);
        let b = Bvh::build(&m);
        let f = (0..m.faces.len()).find(|&f| !m.is_boundary_face(f)).unwrap();
        let [a, c] = m.face_tets[f];
        let v = m.faces[f];
        let p = (m.vertices[v[0]] + m.vertices[v[1]] + m.vertices[v[2]]) / 3.0;
        assert_eq!(b.locate(&m, p).unwrap(), a.min(c));
    }

    #[test]
    fn outside_point_is_not_found() {
        let m = kuhn_grid(2, 2, 2);
        let b = Bvh::build(&m);
        let r = b.locate(&m, Point3::new(1.5, 0.5, 0.5));
        assert!(matches!(r, Err(Error::PointNotFound { .. })));
    }

    #[test]
    fn matches_linear_scan() {
        let m = kuhn_grid(3, 3, 2);
        let b = Bvh::build(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let p = Point3::new(rng.random(), rng.random(), rng.random());
            assert_eq!(b.locate(&m, p).unwrap(), locate_linear(&m, p).unwrap());
        }
    }
}
