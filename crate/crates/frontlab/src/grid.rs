//! Rectangular grids for 1D lines, 2D planes, and axisymmetric cylinders.
//!
//! Cylinder grids carry axes `(x1, r)` with `r >= 0`; the effective dimension
//! `d_eff` enters only through the radial part of the Laplacian.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::reaction::Point;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Line,
    Plane,
    Cylinder { d_eff: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Mirror ghost nodes (second-order zero flux).
    NeumannZeroFlux,
    /// Ghost nodes held at zero.
    DirichletZero,
    /// Boundary nodes keep their initial values.
    DirichletFrozen,
}

#[derive(Clone, Debug)]
pub struct GridSpec {
    pub geometry: Geometry,
    /// Per-axis `[min, max]`.
    pub extent: Vec<[f64; 2]>,
    pub dx: f64,
    pub boundary: Boundary,
    n: [usize; 2],
}

impl GridSpec {
    pub fn new(geometry: Geometry, extent: Vec<[f64; 2]>, dx: f64, boundary: Boundary) -> Result<Self> {
        if dx <= 0.0 {
            return Err(Error::Geometry(format!("dx = {dx} must be > 0")));
        }
        let axes = match geometry {
            Geometry::Line => 1,
            Geometry::Plane => 2,
            Geometry::Cylinder { d_eff } => {
                if d_eff < 3 {
                    return Err(Error::Geometry(format!("cylinder d_eff = {d_eff} must be >= 3")));
                }
                2
            }
        };
        if extent.len() != axes {
            return Err(Error::Geometry(format!(
                "{geometry:?} needs {axes} extent axes, got {}",
                extent.len()
            )));
        }
        let mut n = [1usize; 2];
        for (ax, e) in extent.iter().enumerate() {
            let len = e[1] - e[0];
            if len <= 0.0 {
                return Err(Error::Geometry(format!("axis {ax} extent {e:?} is empty")));
            }
            let cells = len / dx;
            if (cells - cells.round()).abs() > 1e-6 * cells.max(1.0) {
                return Err(Error::Geometry(format!(
                    "axis {ax} length {len} is not an integer multiple of dx = {dx}"
                )));
            }
            n[ax] = cells.round() as usize + 1;
        }
        if let Geometry::Cylinder { .. } = geometry {
            if extent[1][0] != 0.0 {
                return Err(Error::Geometry("cylinder radial axis must start at r = 0".into()));
            }
        }
        Ok(GridSpec { geometry, extent, dx, boundary, n })
    }

    pub fn line(min: f64, max: f64, dx: f64, boundary: Boundary) -> Result<Self> {
        Self::new(Geometry::Line, vec![[min, max]], dx, boundary)
    }

    /// Nodes along axis 0.
    pub fn n0(&self) -> usize {
        self.n[0]
    }

    /// Nodes along axis 1 (1 for lines).
    pub fn n1(&self) -> usize {
        self.n[1]
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    pub fn coord(&self, i: usize, j: usize) -> Point {
        let x = self.extent[0][0] + i as f64 * self.dx;
        let y = if self.n[1] > 1 {
            self.extent[1][0] + j as f64 * self.dx
        } else {
            0.0
        };
        [x, y]
    }

    pub fn coord_of(&self, idx: usize) -> Point {
        self.coord(idx % self.n[0], idx / self.n[0])
    }

    /// Physical dimension used by radial prefactors and CFL counting.
    pub fn dim_factor(&self) -> f64 {
        match self.geometry {
            Geometry::Line => 1.0,
            Geometry::Plane => 2.0,
            Geometry::Cylinder { d_eff } => d_eff as f64,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        let eps = 1e-9 * self.dx;
        let in0 = p[0] >= self.extent[0][0] - eps && p[0] <= self.extent[0][1] + eps;
        let in1 = if self.n[1] > 1 {
            p[1] >= self.extent[1][0] - eps && p[1] <= self.extent[1][1] + eps
        } else {
            true
        };
        in0 && in1
    }
}

/// A scalar field on a grid at a fixed time.
#[derive(Clone, Debug)]
pub struct GridState {
    pub t: f64,
    pub u: Vec<f64>,
    pub spec: Arc<GridSpec>,
}

impl GridState {
    pub fn constant(spec: Arc<GridSpec>, value: f64) -> Self {
        let u = vec![value; spec.len()];
        GridState { t: 0.0, u, spec }
    }

    pub fn from_fn(spec: Arc<GridSpec>, f: impl Fn(Point) -> f64) -> Self {
        let mut u = Vec::with_capacity(spec.len());
        for j in 0..spec.n1() {
            for i in 0..spec.n0() {
                u.push(f(spec.coord(i, j)));
            }
        }
        GridState { t: 0.0, u, spec }
    }

    pub fn min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Snapshot CSV: header `x,u` (1D) or `x,y,u` (two axes), 9 significant
    /// digits, LF endings.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        if self.spec.n1() > 1 {
            out.push_str("x,y,u\n");
        } else {
            out.push_str("x,u\n");
        }
        for j in 0..self.spec.n1() {
            for i in 0..self.spec.n0() {
                let p = self.spec.coord(i, j);
                let v = self.u[self.spec.idx(i, j)];
                if self.spec.n1() > 1 {
                    let _ = writeln!(out, "{:.8e},{:.8e},{:.8e}", p[0], p[1], v);
                } else {
                    let _ = writeln!(out, "{:.8e},{:.8e}", p[0], v);
                }
            }
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Binary PGM (P5, maxval 255), u mapped linearly from [0,1].
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let w = self.spec.n0();
        let h = self.spec.n1();
        let mut data = Vec::with_capacity(w * h + 32);
        data.extend_from_slice(format!("P5\n{w} {h}\n255\n").as_bytes());
        for j in (0..h).rev() {
            for i in 0..w {
                let v = self.u[self.spec.idx(i, j)].clamp(0.0, 1.0);
                data.push((v * 255.0).round() as u8);
            }
        }
        fs::write(path, data)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::line(0.0, 1.0, 0.1, Boundary::NeumannZeroFlux).is_ok());
        assert!(GridSpec::line(0.0, 1.05, 0.1, Boundary::NeumannZeroFlux).is_err());
        assert!(GridSpec::new(
            Geometry::Cylinder { d_eff: 2 },
            vec![[0.0, 1.0], [0.0, 1.0]],
            0.1,
            Boundary::NeumannZeroFlux
        )
        .is_err());
        assert!(GridSpec::new(
            Geometry::Cylinder { d_eff: 3 },
            vec![[0.0, 1.0], [0.5, 1.0]],
            0.1,
            Boundary::NeumannZeroFlux
        )
        .is_err());
    }

    #[test]
    fn coords_and_indexing() {
        let spec = GridSpec::new(
            Geometry::Plane,
            vec![[-1.0, 1.0], [0.0, 0.5]],
            0.5,
            Boundary::NeumannZeroFlux,
        )
        .unwrap();
        assert_eq!(spec.n0(), 5);
        assert_eq!(spec.n1(), 2);
        assert_eq!(spec.coord(0, 0), [-1.0, 0.0]);
        assert_eq!(spec.coord(4, 1), [1.0, 0.5]);
        assert_eq!(spec.coord_of(spec.idx(3, 1)), spec.coord(3, 1));
    }
}
