//! Meshes of either dimension and transfer of cell averages between them.

use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, Mesh2D};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Slab(Mesh1D),
    Plane(Mesh2D),
}

impl Grid {
    /// The problem's mesh with `n` cells per axis.
    pub fn for_problem(spec: &ProblemSpec, n: usize) -> Result<Self> {
        match spec.dimension() {
            1 => Ok(Grid::Slab(spec.mesh_1d(n)?)),
            _ => Ok(Grid::Plane(spec.mesh_2d(n)?)),
        }
    }

    pub fn cells(&self) -> usize {
        match self {
            Grid::Slab(m) => m.cells(),
            Grid::Plane(m) => m.nx() * m.ny(),
        }
    }

    /// Cell measures, x fastest in 2D.
    pub fn sizes(&self) -> Vec<f64> {
        match self {
            Grid::Slab(m) => (0..m.cells()).map(|j| m.dx(j)).collect(),
            Grid::Plane(m) => {
                let mut out = Vec::with_capacity(m.nx() * m.ny());
                for j in 0..m.ny() {
                    for i in 0..m.nx() {
                        out.push(m.x.dx(i) * m.y.dx(j));
                    }
                }
                out
            }
        }
    }

    /// Every cell split into `factor` cells per axis.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        match self {
            Grid::Slab(m) => Ok(Grid::Slab(m.refine(factor)?)),
            Grid::Plane(m) => Ok(Grid::Plane(Mesh2D {
                x: m.x.refine(factor)?,
                y: m.y.refine(factor)?,
            })),
        }
    }

    /// Averages of `fine` (cell averages on `from`) over the cells of `self`.
    pub fn restrict(&self, from: &Grid, fine: &[f64]) -> Result<Vec<f64>> {
        match (self, from) {
            (Grid::Slab(c), Grid::Slab(f)) => {
                let w = overlap(c, f)?;
                Ok(w.iter()
                    .map(|row| row.iter().map(|&(k, a)| a * fine[k]).sum())
                    .collect())
            }
            (Grid::Plane(c), Grid::Plane(f)) => {
                let (wx, wy) = (overlap(&c.x, &f.x)?, overlap(&c.y, &f.y)?);
                let fnx = f.nx();
                let mut out = Vec::with_capacity(c.nx() * c.ny());
                for ry in &wy {
                    for rx in &wx {
                        let mut v = 0.0;
                        for &(l, ay) in ry {
                            for &(k, ax) in rx {
                                v += ax * ay * fine[l * fnx + k];
                            }
                        }
                        out.push(v);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::InvalidArgument("cannot restrict between dimensions".into())),
        }
    }
}

/// For each coarse cell, the fine cells it overlaps and their overlap fraction.
fn overlap(coarse: &Mesh1D, fine: &Mesh1D) -> Result<Vec<Vec<(usize, f64)>>> {
    let tol = 1e-12 * coarse.length().max(1.0);
    if (coarse.length() - fine.length()).abs() > tol {
        return Err(Error::InvalidArgument("meshes cover different intervals".into()));
    }
    let (ce, fe) = (coarse.edges(), fine.edges());
    let mut out = Vec::with_capacity(coarse.cells());
    let mut k = 0;
    for j in 0..coarse.cells() {
        let (a, b) = (ce[j], ce[j + 1]);
        let mut row = Vec::new();
        while k < fine.cells() && fe[k + 1] <= a + tol {
            k += 1;
        }
        let mut l = k;
        while l < fine.cells() && fe[l] < b - tol {
            let len = fe[l + 1].min(b) - fe[l].max(a);
            if len > tol {
                row.push((l, len / (b - a)));
            }
            l += 1;
        }
        out.push(row);
    }
    Ok(out)
}
