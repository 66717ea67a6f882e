//! Points, barycentric coordinates and the handful of tetrahedral predicates
//! everything else is built on.
//!
//! Orientation convention: a tetrahedron `(p1, p2, p3, p4)` is positively
//! oriented when `det[p2 - p1, p3 - p1, p4 - p1] > 0`.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point or vector in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Vec3 = Point3;

impl Point3 {
    pub const ZERO: Point3 = Point3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn min_components(self, o: Point3) -> Point3 {
        Point3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max_components(self, o: Point3) -> Point3 {
        Point3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point3 {
    type Output = Point3;
    #[inline]
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Point3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    #[inline]
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    #[inline]
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Point3> for f64 {
    type Output = Point3;
    #[inline]
    fn mul(self, p: Point3) -> Point3 {
        p * self
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    #[inline]
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Index<usize> for Point3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

/// Barycentric coordinates with respect to a tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bary4(pub [f64; 4]);

impl Bary4 {
    pub const CENTROID: Bary4 = Bary4([0.25; 4]);

    pub fn vertex(i: usize) -> Bary4 {
        let mut l = [0.0; 4];
        l[i] = 1.0;
        Bary4(l)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Inside test with an absolute tolerance on the normalized coordinates.
    pub fn is_inside(&self, tol: f64) -> bool {
        self.0.iter().all(|&l| l >= -tol)
    }

    pub fn combine(&self, verts: &[Point3; 4]) -> Point3 {
        verts[0] * self.0[0] + verts[1] * self.0[1] + verts[2] * self.0[2] + verts[3] * self.0[3]
    }
}

impl Index<usize> for Bary4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Relative volume tolerance below which a tetrahedron counts as degenerate.
pub const DEGENERATE_REL_VOLUME: f64 = 1e-13;

/// Signed volume of `(p1, p2, p3, p4)`; positive for positive orientation.
#[inline]
pub fn signed_volume(p: &[Point3; 4]) -> f64 {
    (p[1] - p[0]).dot((p[2] - p[0]).cross(p[3] - p[0])) / 6.0
}

/// Longest edge length.
pub fn diameter(p: &[Point3; 4]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            d = d.max(p[i].distance(p[j]));
        }
    }
    d
}

fn check_nondegenerate(p: &[Point3; 4]) -> Result<f64> {
    let vol = signed_volume(p);
    let d = diameter(p);
    if !(vol.abs() > DEGENERATE_REL_VOLUME * d * d * d) {
        return Err(Error::DegenerateTet { volume: vol });
    }
    Ok(vol)
}

/// Tetrahedron geometry with precomputed barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct TetGeometry {
    pub verts: [Point3; 4],
    pub volume: f64,
    /// `grad_lambda[i]` is the (constant) Cartesian gradient of the i-th
    /// barycentric coordinate.
    pub grad_lambda: [Vec3; 4],
}

impl TetGeometry {
    pub fn new(verts: [Point3; 4]) -> Result<Self> {
        let volume = check_nondegenerate(&verts)?;
        let e1 = verts[1] - verts[0];
        let e2 = verts[2] - verts[0];
        let e3 = verts[3] - verts[0];
        let det6 = 6.0 * volume;
        // rows of the inverse edge matrix
        let g1 = e2.cross(e3) / det6;
        let g2 = e3.cross(e1) / det6;
        let g3 = e1.cross(e2) / det6;
        let g0 = -(g1 + g2 + g3);
        Ok(TetGeometry {
            verts,
            volume,
            grad_lambda: [g0, g1, g2, g3],
        })
    }

    pub fn barycentric(&self, p: Point3) -> Bary4 {
        let d = p - self.verts[0];
        let l1 = self.grad_lambda[1].dot(d);
        let l2 = self.grad_lambda[2].dot(d);
        let l3 = self.grad_lambda[3].dot(d);
        Bary4([1.0 - l1 - l2 - l3, l1, l2, l3])
    }

    pub fn point(&self, l: &Bary4) -> Point3 {
        l.combine(&self.verts)
    }

    pub fn centroid(&self) -> Point3 {
        (self.verts[0] + self.verts[1] + self.verts[2] + self.verts[3]) * 0.25
    }
}

/// Barycentric coordinates of `p` with respect to the tetrahedron `verts`.
pub fn barycentric(verts: &[Point3; 4], p: Point3) -> Result<Bary4> {
    Ok(TetGeometry::new(*verts)?.barycentric(p))
}

/// Barycentric coordinates by signed sub-volumes (determinant method).
///
/// Independent of [`TetGeometry::barycentric`]; used where a second route is
/// wanted.
pub fn barycentric_subvolumes(verts: &[Point3; 4], p: Point3) -> Bary4 {
    let vol = signed_volume(verts);
    let mut l = [0.0; 4];
    for (i, li) in l.iter_mut().enumerate() {
        let mut v = *verts;
        v[i] = p;
        *li = signed_volume(&v) / vol;
    }
    Bary4(l)
}

pub fn triangle_area(a: Point3, b: Point3, c: Point3) -> f64 {
    0.5 * (b - a).cross(c - a).norm()
}

/// Local vertex indices of the face opposite vertex `i`.
pub const FACE_OPPOSITE: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// Incenter of a tetrahedron and its barycentric coordinates (ordered like the
/// input vertices).
///
/// The barycentric weights are the opposite-face areas normalized to sum 1.
pub fn incenter(verts: &[Point3; 4]) -> Result<(Point3, Bary4)> {
    check_nondegenerate(verts)?;
    let mut areas = [0.0; 4];
    for (i, a) in areas.iter_mut().enumerate() {
        let f = FACE_OPPOSITE[i];
        *a = triangle_area(verts[f[0]], verts[f[1]], verts[f[2]]);
    }
    let total: f64 = areas.iter().sum();
    let k = Bary4([
        areas[0] / total,
        areas[1] / total,
        areas[2] / total,
        areas[3] / total,
    ]);
    Ok((k.combine(verts), k))
}

/// Barycentric coordinates of `p` with respect to a triangle, computed from
/// signed sub-areas projected on the triangle normal.
pub fn face_barycentric(face: &[Point3; 3], p: Point3) -> [f64; 3] {
    let n = (face[1] - face[0]).cross(face[2] - face[0]);
    let nn = n.norm_squared();
    let s0 = n.dot((face[1] - p).cross(face[2] - p)) / nn;
    let s1 = n.dot((face[2] - p).cross(face[0] - p)) / nn;
    let s2 = 1.0 - s0 - s1;
    [s0, s1, s2]
}

/// Intersection of the segment `[a, b]` with the plane of `face`.
///
/// Returns the intersection point and its face barycentric coordinates. The
/// segment must cross the plane transversally and hit the open triangle.
pub fn segment_face_intersection(
    a: Point3,
    b: Point3,
    face: &[Point3; 3],
) -> Result<(Point3, [f64; 3])> {
    let n = (face[1] - face[0]).cross(face[2] - face[0]);
    let scale = n.norm() * (b - a).norm();
    let da = n.dot(a - face[0]);
    let db = n.dot(b - face[0]);
    if (da - db).abs() <= 1e-14 * scale {
        return Err(Error::NoCrossing("segment parallel to face plane"));
    }
    if da * db >= 0.0 {
        return Err(Error::NoCrossing("segment end points on the same side"));
    }
    let t = da / (da - db);
    let x = a + (b - a) * t;
    let s = face_barycentric(face, x);
    if s.iter().any(|&v| v <= 0.0) {
        return Err(Error::NoCrossing("intersection outside the open triangle"));
    }
    Ok((x, s))
}
