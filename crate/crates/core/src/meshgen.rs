//! Unit-cube test meshes: perturbed Kuhn decompositions refined uniformly.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{signed_volume, Point3};
use crate::mesh::TetMesh;
use crate::quadrature::{eight_children, subdivision_nodes};

fn grid_vertices(nx: usize, ny: usize, nz: usize) -> Vec<Point3> {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                v.push(Point3::new(
                    i as f64 / nx as f64,
                    j as f64 / ny as f64,
                    k as f64 / nz as f64,
                ));
            }
        }
    }
    v
}

/// Six tetrahedra per cell, each following one monotone path from the cell's
/// low corner to its high corner; neighbouring cells conform.
fn kuhn_tets(nx: usize, ny: usize, nz: usize) -> Vec<[usize; 4]> {
    let id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut c = [i, j, k];
                    let mut t = [id(c[0], c[1], c[2]), 0, 0, 0];
                    for (s, &axis) in perm.iter().enumerate() {
                        c[axis] += 1;
                        t[s + 1] = id(c[0], c[1], c[2]);
                    }
                    tets.push(t);
                }
            }
        }
    }
    tets
}

/// Unperturbed Kuhn mesh of the unit cube with `nx * ny * nz` cells.
pub fn kuhn_grid(nx: usize, ny: usize, nz: usize) -> TetMesh {
    TetMesh::new(grid_vertices(nx, ny, nz), kuhn_tets(nx, ny, nz)).expect("Kuhn grid is valid")
}

/// Kuhn mesh with random vertex displacements of up to `amplitude` times the
/// smallest cell spacing per component. Boundary vertices move only within
/// their boundary planes, so the domain stays the unit cube. The amplitude is
/// reduced until every element keeps at least a quarter of its volume.
pub fn perturbed_kuhn(nx: usize, ny: usize, nz: usize, amplitude: f64, seed: u64) -> TetMesh {
    let base = grid_vertices(nx, ny, nz);
    let tets = kuhn_tets(nx, ny, nz);
    let spacing = (1.0 / nx as f64).min(1.0 / ny as f64).min(1.0 / nz as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_bound = |x: f64| x == 0.0 || x == 1.0;
    let shifts: Vec<Point3> = base
        .iter()
        .map(|p| {
            let mut d = [0.0; 3];
            for (axis, slot) in d.iter_mut().enumerate() {
                let r: f64 = rng.random_range(-1.0..1.0);
                if !on_bound(p[axis]) {
                    *slot = r;
                }
            }
            Point3::from_array(d)
        })
        .collect();
    let vol0: Vec<f64> = tets
        .iter()
        .map(|t| signed_volume(&t.map(|i| base[i])))
        .collect();
    let mut amp = amplitude;
    loop {
        let v: Vec<Point3> = base
            .iter()
            .zip(&shifts)
            .map(|(p, d)| *p + *d * (amp * spacing))
            .collect();
        let ok = tets
            .iter()
            .zip(&vol0)
            .all(|(t, v0)| signed_volume(&t.map(|i| v[i])) / v0 > 0.25);
        if ok {
            return TetMesh::new(v, tets).expect("perturbed Kuhn mesh is valid");
        }
        amp *= 0.8;
    }
}

/// Uniform eight-way refinement; new vertices are the edge midpoints.
pub fn refine_uniform(mesh: &TetMesh) -> TetMesh {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices.clone();
    vertices.extend(
        mesh.edges
            .iter()
            .map(|&[a, b]| (mesh.vertices[a] + mesh.vertices[b]) * 0.5),
    );
    let mut tets = Vec::with_capacity(8 * mesh.num_tets());
    for (e, t) in mesh.tets.iter().enumerate() {
        let g = mesh.tet_edges[e];
        let ids = [
            t[0],
            t[1],
            t[2],
            t[3],
            nv + g[0],
            nv + g[1],
            nv + g[2],
            nv + g[3],
            nv + g[4],
            nv + g[5],
        ];
        let nodes = subdivision_nodes(&mesh.tet_points(e));
        for kid in eight_children(&nodes) {
            tets.push(kid.map(|i| ids[i]));
        }
    }
    TetMesh::new(vertices, tets).expect("refinement of a valid mesh")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Source,
    Target,
}

/// Default displacement amplitude relative to the cell spacing.
pub const DEFAULT_AMPLITUDE: f64 = 0.15;

/// Level-`level` mesh of the source or target sequence. Level 1 has 192
/// elements (4x4x2 cells for the source, 2x4x4 for the target); each further
/// level is a uniform refinement.
pub fn sequence_mesh(role: Role, level: usize, seed: u64) -> TetMesh {
    assert!(level >= 1, "levels start at 1");
    let mut m = match role {
        Role::Source => perturbed_kuhn(4, 4, 2, DEFAULT_AMPLITUDE, seed),
        Role::Target => perturbed_kuhn(2, 4, 4, DEFAULT_AMPLITUDE, seed.wrapping_add(0x9e37_79b9)),
    };
    for _ in 1..level {
        m = refine_uniform(&m);
    }
    m
}

/// Levels `1..=max_level` of one sequence, refining incrementally.
pub fn sequence(role: Role, max_level: usize, seed: u64) -> Vec<TetMesh> {
    let mut out: Vec<TetMesh> = Vec::with_capacity(max_level);
    for l in 1..=max_level {
        let m = match out.last() {
            None => sequence_mesh(role, 1, seed),
            Some(prev) => refine_uniform(prev),
        };
        out.push(m);
        debug_assert_eq!(out.len(), l);
    }
    out
}

/// Connectivity fingerprint used to check that two meshes differ.
pub fn connectivity_signature(mesh: &TetMesh) -> HashMap<[usize; 4], usize> {
    let mut h = HashMap::new();
    for t in &mesh.tets {
        let mut s = *t;
        s.sort_unstable();
        *h.entry(s).or_insert(0) += 1;
    }
    h
}
