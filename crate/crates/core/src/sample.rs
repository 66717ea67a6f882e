//! Sampling a field at tensor Gauss points of the unit cube for export.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::Point3;
use crate::quadrature::gauss_legendre_unit;

#[derive(Debug, Clone)]
pub struct Samples {
    /// Gauss abscissae on [0, 1], shared by all three axes.
    pub axis: Vec<f64>,
    /// x-fastest order.
    pub values: Vec<f64>,
    pub grad_magnitude: Vec<f64>,
}

impl Samples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, idx: usize) -> Point3 {
        let n = self.axis.len();
        Point3::new(self.axis[idx % n], self.axis[idx / n % n], self.axis[idx / (n * n)])
    }
}

/// Value and gradient magnitude at the `n³` Gauss points.
pub fn sample(field: &impl Field, n: usize) -> Result<Samples> {
    let (axis, _) = gauss_legendre_unit(n);
    let rows: Vec<(f64, f64)> = (0..n * n * n)
        .into_par_iter()
        .map(|i| {
            let p = Point3::new(axis[i % n], axis[i / n % n], axis[i / (n * n)]);
            let (v, g) = field.eval(p)?;
            Ok((v, g.norm()))
        })
        .collect::<Result<_>>()?;
    let (values, grad_magnitude) = rows.into_iter().unzip();
    Ok(Samples {
        axis,
        values,
        grad_magnitude,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Legacy ASCII VTK. The Gauss abscissae are not equally spaced, so the
/// grid is written as a rectilinear grid with explicit coordinates.
pub fn to_vtk_string(s: &Samples, title: &str) -> String {
    let n = s.axis.len();
    let mut out = String::new();
    let coords: Vec<String> = s.axis.iter().map(|x| format!("{x:.14e}")).collect();
    let coords = coords.join(" ");
    let _ = writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET RECTILINEAR_GRID");
    let _ = writeln!(out, "DIMENSIONS {n} {n} {n}");
    for axis in ["X", "Y", "Z"] {
        let _ = writeln!(out, "{axis}_COORDINATES {n} double\n{coords}");
    }
    let _ = writeln!(out, "POINT_DATA {}", s.len());
    for (name, data) in [("value", &s.values), ("grad_magnitude", &s.grad_magnitude)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in data.iter() {
            let _ = writeln!(out, "{v:.14e}");
        }
    }
    out
}

pub fn write_vtk(s: &Samples, title: &str, path: &Path) -> Result<()> {
    std::fs::write(path, to_vtk_string(s, title)).map_err(io_err(path))
}

/// One header line, then `x,y,z,value,grad_magnitude` per sample.
pub fn write_csv(s: &Samples, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = std::io::BufWriter::new(file);
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "x,y,z,value,grad_magnitude")?;
        for i in 0..s.len() {
            let p = s.point(i);
            writeln!(
                w,
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}",
                p.x, p.y, p.z, s.values[i], s.grad_magnitude[i]
            )?;
        }
        w.flush()
    };
    body().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Gaussian;
    use crate::transfer::Constant;

    #[test]
    fn constant_field_samples() {
        let s = sample(&Constant(2.5), 5).unwrap();
        assert_eq!(s.len(), 125);
        assert!(s.values.iter().all(|&v| v == 2.5));
        assert!(s.grad_magnitude.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn ordering_is_x_fastest() {
        let s = sample(&Gaussian, 3).unwrap();
        for i in 0..s.len() {
            assert_eq!(s.values[i], crate::analytic::eval_u1(s.point(i)).0);
        }
        assert!(s.point(1).x > s.point(0).x);
        assert_eq!(s.point(1).y, s.point(0).y);
    }

    #[test]
    fn vtk_layout() {
        let s = sample(&Constant(1.0), 2).unwrap();
        let text = to_vtk_string(&s, "t");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[3], "DATASET RECTILINEAR_GRID");
        assert_eq!(lines[4], "DIMENSIONS 2 2 2");
        assert!(text.contains("POINT_DATA 8"));
        // header 5, coordinates 6, point data 1, two arrays of 2 + 8 lines
        assert_eq!(lines.len(), 5 + 6 + 1 + 2 * 10);
    }

    #[test]
    fn csv_written() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = sample(&Constant(1.0), 3).unwrap();
        write_csv(&s, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 28);
    }
}
