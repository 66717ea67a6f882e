//! Gmsh MSH 4.1 ASCII reading and writing (tetrahedra only).
//!
//! Lower-dimensional elements (points, lines, triangles on 0-2 dimensional
//! entities) are skipped; any volume element other than the 4-node
//! tetrahedron is rejected.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::mesh::TetMesh;

const TET4: i64 = 4;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Ok(t);
            }
        }
        Err(self.err("unexpected end of file"))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn numbers<T: std::str::FromStr>(&mut self) -> Result<Vec<T>> {
        let l = self.next_line()?;
        l.split_whitespace()
            .map(|s| s.parse::<T>().map_err(|_| self.err(format!("bad number '{s}'"))))
            .collect()
    }

    fn expect(&mut self, tag: &str) -> Result<()> {
        let l = self.next_line()?;
        if l != tag {
            return Err(self.err(format!("expected {tag}, found '{l}'")));
        }
        Ok(())
    }
}

fn need<T: Copy>(lines: &Lines, v: &[T], n: usize) -> Result<()> {
    if v.len() < n {
        return Err(lines.err(format!("expected at least {n} fields, found {}", v.len())));
    }
    Ok(())
}

/// Parses MSH 4.1 ASCII text.
pub fn parse_msh(text: &str) -> Result<TetMesh> {
    let mut lines = Lines::new(text);
    let mut tags_to_index: HashMap<usize, usize> = HashMap::new();
    let mut vertices: Vec<Point3> = Vec::new();
    let mut tets: Vec<[usize; 4]> = Vec::new();
    let mut elem_tags: Vec<usize> = Vec::new();
    let mut seen_format = false;

    loop {
        let section = match lines.next_line() {
            Ok(s) => s,
            Err(_) => break,
        };
        match section {
            "$MeshFormat" => {
                let l = lines.next_line()?;
                let f: Vec<&str> = l.split_whitespace().collect();
                if f.len() < 3 || f[0] != "4.1" {
                    return Err(lines.err(format!("unsupported mesh format '{l}' (need 4.1)")));
                }
                if f[1] != "0" {
                    return Err(lines.err("binary msh files are not supported"));
                }
                lines.expect("$EndMeshFormat")?;
                seen_format = true;
            }
            "$Nodes" => {
                let h: Vec<usize> = lines.numbers()?;
                need(&lines, &h, 4)?;
                let (blocks, total) = (h[0], h[1]);
                vertices.reserve(total);
                for _ in 0..blocks {
                    let b: Vec<i64> = lines.numbers()?;
                    need(&lines, &b, 4)?;
                    let parametric = b[2] != 0;
                    let dim = b[0];
                    let n = b[3] as usize;
                    let mut tags = Vec::with_capacity(n);
                    for _ in 0..n {
                        let t: Vec<usize> = lines.numbers()?;
                        need(&lines, &t, 1)?;
                        tags.push(t[0]);
                    }
                    for tag in tags {
                        let c: Vec<f64> = lines.numbers()?;
                        let want = 3 + if parametric { dim.max(0) as usize } else { 0 };
                        need(&lines, &c, want)?;
                        if !c[..3].iter().all(|x| x.is_finite()) {
                            return Err(lines.err("non-finite node coordinate"));
                        }
                        tags_to_index.insert(tag, vertices.len());
                        vertices.push(Point3::new(c[0], c[1], c[2]));
                    }
                }
                lines.expect("$EndNodes")?;
            }
            "$Elements" => {
                let h: Vec<usize> = lines.numbers()?;
                need(&lines, &h, 4)?;
                for _ in 0..h[0] {
                    let b: Vec<i64> = lines.numbers()?;
                    need(&lines, &b, 4)?;
                    let (dim, etype, n) = (b[0], b[2], b[3] as usize);
                    for _ in 0..n {
                        let r: Vec<usize> = lines.numbers()?;
                        need(&lines, &r, 1)?;
                        if dim < 3 {
                            continue;
                        }
                        if etype != TET4 {
                            return Err(Error::UnsupportedElement {
                                elem_id: r[0],
                                elem_type: etype,
                            });
                        }
                        need(&lines, &r, 5)?;
                        let mut t = [0usize; 4];
                        for (k, slot) in t.iter_mut().enumerate() {
                            *slot = *tags_to_index.get(&r[k + 1]).ok_or_else(|| {
                                lines.err(format!("element {} uses unknown node {}", r[0], r[k + 1]))
                            })?;
                        }
                        tets.push(t);
                        elem_tags.push(r[0]);
                    }
                }
                lines.expect("$EndElements")?;
            }
            s if s.starts_with('$') => {
                // skip unknown sections such as $Entities or $PhysicalNames
                let end = format!("$End{}", &s[1..]);
                loop {
                    if lines.next_line()? == end {
                        break;
                    }
                }
            }
            other => return Err(lines.err(format!("unexpected content '{other}'"))),
        }
    }

    if !seen_format {
        return Err(Error::Parse {
            line: 1,
            msg: "missing $MeshFormat section".into(),
        });
    }
    if tets.is_empty() {
        return Err(Error::Parse {
            line: lines.line,
            msg: "no tetrahedra found".into(),
        });
    }
    TetMesh::new(vertices, tets).map_err(|e| match e {
        Error::DegenerateElement { elem_id, volume } => Error::DegenerateElement {
            elem_id: elem_tags[elem_id],
            volume,
        },
        other => other,
    })
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TetMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_msh(&text)
}

/// Serializes a mesh as MSH 4.1 ASCII with one node block and one element
/// block. Node and element tags are 1-based positions.
pub fn to_msh_string(mesh: &TetMesh) -> String {
    let nv = mesh.num_vertices();
    let ne = mesh.num_tets();
    let mut s = String::with_capacity(64 * (nv + ne));
    s.push_str("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");
    let _ = writeln!(s, "$Nodes\n1 {nv} 1 {nv}\n3 1 0 {nv}");
    for i in 1..=nv {
        let _ = writeln!(s, "{i}");
    }
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:.17e} {:.17e} {:.17e}", p.x, p.y, p.z);
    }
    s.push_str("$EndNodes\n");
    let _ = writeln!(s, "$Elements\n1 {ne} 1 {ne}\n3 1 4 {ne}");
    for (e, t) in mesh.tets.iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {} {}", e + 1, t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1);
    }
    s.push_str("$EndElements\n");
    s
}

pub fn write_mesh(mesh: &TetMesh, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_msh_string(mesh)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_TET: &str = "$MeshFormat
4.1 0 8
$EndMeshFormat
$Entities
0 0 0 1
1 0 0 0 1 1 1 0 0
$EndEntities
$Nodes
2 4 1 4
0 1 0 1
7
0 0 0
3 1 0 3
8
9
10
1 0 0
0 1 0
0 0 1
$EndNodes
$Elements
2 2 1 5
2 1 2 1
3 8 9 10
3 1 4 1
5 7 8 9 10
$EndElements
";

    #[test]
    fn parses_blocks_and_skips_triangles() {
        let m = parse_msh(ONE_TET).unwrap();
        assert_eq!(m.num_tets(), 1);
        assert_eq!(m.num_vertices(), 4);
        assert!((m.volume(0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_hexahedra() {
        let text = ONE_TET.replace("3 1 4 1\n5 7 8 9 10", "3 1 5 1\n5 7 8 9 10 7 8 9 10");
        assert!(matches!(
            parse_msh(&text),
            Err(Error::UnsupportedElement { elem_id: 5, elem_type: 5 })
        ));
    }

    #[test]
    fn degenerate_error_uses_file_tag() {
        let text = ONE_TET.replace("0 0 1\n$EndNodes", "1 1 0\n$EndNodes");
        assert!(matches!(
            parse_msh(&text),
            Err(Error::DegenerateElement { elem_id: 5, .. })
        ));
    }

    #[test]
    fn rejects_old_format() {
        let text = ONE_TET.replace("4.1 0 8", "2.2 0 8");
        assert!(matches!(parse_msh(&text), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn round_trip() {
        let m = parse_msh(ONE_TET).unwrap();
        let again = parse_msh(&to_msh_string(&m)).unwrap();
        assert_eq!(again.tets, m.tets);
        assert_eq!(again.vertices, m.vertices);
    }
}
