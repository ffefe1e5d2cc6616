//! Cell-centered meshes: uniform or piecewise-uniform in 1D, uniform rectangular in 2D.

use crate::error::{invalid, Error, Result};

/// Tolerance used when matching material breakpoints to cell interfaces.
const INTERFACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    edges: Vec<f64>,
}

impl Mesh1D {
    /// `n` equal cells on [0, length].
    pub fn uniform(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid(format!("domain length must be positive, got {length}")));
        }
        if n == 0 {
            return Err(invalid("mesh needs at least one cell"));
        }
        let dx = length / n as f64;
        let edges = (0..=n)
            .map(|i| if i == n { length } else { i as f64 * dx })
            .collect();
        Ok(Self { edges })
    }

    /// Piecewise-uniform mesh from consecutive segments `(end, dx)` starting at 0.
    /// Each segment length must be an integer multiple of its cell width.
    pub fn graded(segments: &[(f64, f64)]) -> Result<Self> {
        if segments.is_empty() {
            return Err(invalid("graded mesh needs at least one segment"));
        }
        let mut edges = vec![0.0];
        let mut start = 0.0;
        for &(end, dx) in segments {
            if !(end > start) || !(dx > 0.0) {
                return Err(invalid(format!("bad mesh segment ending at {end} with width {dx}")));
            }
            let cells = ((end - start) / dx).round();
            if cells < 1.0 || ((cells * dx) - (end - start)).abs() > INTERFACE_TOL * end.max(1.0) {
                return Err(invalid(format!(
                    "segment [{start}, {end}] is not a whole number of cells of width {dx}"
                )));
            }
            let cells = cells as usize;
            for i in 1..=cells {
                edges.push(if i == cells { end } else { start + i as f64 * dx });
            }
            start = end;
        }
        Ok(Self { edges })
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn length(&self) -> f64 {
        self.edges[self.cells()]
    }

    pub fn dx(&self, j: usize) -> f64 {
        self.edges[j + 1] - self.edges[j]
    }

    pub fn center(&self, j: usize) -> f64 {
        0.5 * (self.edges[j] + self.edges[j + 1])
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells()).map(|j| self.center(j)).collect()
    }

    /// True when cells `a` and `b` have the same width to rounding.
    pub fn same_width(&self, a: usize, b: usize) -> bool {
        let (da, db) = (self.dx(a), self.dx(b));
        (da - db).abs() <= 1e-12 * da.max(db)
    }

    pub fn is_uniform(&self) -> bool {
        (1..self.cells()).all(|j| self.same_width(0, j))
    }

    /// Splits every cell into `factor` equal cells.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(invalid("refinement factor must be positive"));
        }
        let mut edges = Vec::with_capacity(self.cells() * factor + 1);
        edges.push(self.edges[0]);
        for j in 0..self.cells() {
            let (a, d) = (self.edges[j], self.dx(j) / factor as f64);
            for k in 1..factor {
                edges.push(a + k as f64 * d);
            }
            edges.push(self.edges[j + 1]);
        }
        Ok(Self { edges })
    }

    /// Checks that every breakpoint coincides with some cell interface.
    pub fn check_breakpoints(&self, breaks: &[f64]) -> Result<()> {
        for &b in breaks {
            if !self.edges.iter().any(|&e| (e - b).abs() <= INTERFACE_TOL * self.length().max(1.0)) {
                return Err(Error::Config(format!(
                    "material breakpoint {b} does not lie on a cell interface"
                )));
            }
        }
        Ok(())
    }
}

/// Uniform rectangular mesh on [0, lx] × [0, ly] with nx × ny cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub x: Mesh1D,
    pub y: Mesh1D,
}

impl Mesh2D {
    pub fn uniform(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Ok(Self {
            x: Mesh1D::uniform(lx, nx)?,
            y: Mesh1D::uniform(ly, ny)?,
        })
    }

    pub fn nx(&self) -> usize {
        self.x.cells()
    }

    pub fn ny(&self) -> usize {
        self.y.cells()
    }

    pub fn dx(&self) -> f64 {
        self.x.dx(0)
    }

    pub fn dy(&self) -> f64 {
        self.y.dx(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_geometry() {
        let m = Mesh1D::uniform(1.0, 10).unwrap();
        assert_eq!(m.cells(), 10);
        assert!((m.dx(3) - 0.1).abs() < 1e-15);
        assert!((m.center(0) - 0.05).abs() < 1e-15);
        assert_eq!(m.length(), 1.0);
        assert!(m.is_uniform());
    }

    #[test]
    fn graded_mesh_matches_two_segments() {
        let m = Mesh1D::graded(&[(1.0, 0.1), (11.0, 1.0)]).unwrap();
        assert_eq!(m.cells(), 20);
        assert!(!m.is_uniform());
        assert!(m.same_width(0, 9));
        assert!(!m.same_width(9, 10));
        assert_eq!(m.edges()[10], 1.0);
        assert_eq!(m.length(), 11.0);
    }

    #[test]
    fn graded_rejects_fractional_segments() {
        assert!(Mesh1D::graded(&[(1.0, 0.3)]).is_err());
    }

    #[test]
    fn breakpoints_must_be_interfaces() {
        let m = Mesh1D::uniform(2.0, 10).unwrap();
        assert!(m.check_breakpoints(&[1.0]).is_ok());
        assert!(m.check_breakpoints(&[1.1]).is_err());
    }
}
