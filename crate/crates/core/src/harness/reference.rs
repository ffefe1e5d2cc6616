//! Reference cell averages of the scalar flux for error norms.

use serde::Serialize;

use super::config::{ReferenceChoice, RunConfig};
use super::grid::Grid;
use super::run::solve_grid;
use crate::error::{Error, Result};
use crate::oracles::diffusion::{
    diffusion_boundary_values, diffusion_exact_constant, diffusion_solve, square_series_cell_averages,
    DiffusionProblem,
};
use crate::problem::{
    cell_moments_1d, cell_moments_2d, resolve_inflow_1d, slab_profile, square_profile, Domain, Inflow,
    PiecewiseField, ProblemSpec, ReferenceKind, SourceField,
};
use crate::quadrature::gauss_legendre;
use crate::report::RunReport;

/// Cells of the finite-volume diffusion solve used for non-constant coefficients.
const DIFFUSION_CELLS: usize = 20_000;
/// Highest sine index kept in the square diffusion series.
const SERIES_TERMS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceSource {
    None,
    Manufactured,
    DiffusionLimit,
    FineMesh,
}

impl ReferenceSource {
    pub fn select(spec: &ProblemSpec, choice: ReferenceChoice) -> Self {
        match choice {
            ReferenceChoice::None => ReferenceSource::None,
            ReferenceChoice::FineMesh => ReferenceSource::FineMesh,
            ReferenceChoice::Auto => match spec.reference {
                ReferenceKind::Manufactured => ReferenceSource::Manufactured,
                ReferenceKind::DiffusionLimit => ReferenceSource::DiffusionLimit,
                ReferenceKind::FineMesh => ReferenceSource::FineMesh,
            },
        }
    }
}

/// Cell averages of the manufactured scalar flux.
pub fn manufactured(spec: &ProblemSpec, grid: &Grid) -> Result<Vec<f64>> {
    match (&spec.source, grid) {
        (SourceField::ManufacturedSlab { .. }, Grid::Slab(m)) => {
            Ok(cell_moments_1d(|x| 2.0 * slab_profile(x), m)?.avg)
        }
        (SourceField::ManufacturedSquare { .. }, Grid::Plane(m)) => {
            Ok(cell_moments_2d(|x, y| 4.0 * square_profile(x, y), m)?.avg)
        }
        _ => Err(Error::Config("problem has no manufactured solution".into())),
    }
}

fn constant_value(f: &PiecewiseField, eps: f64) -> Option<f64> {
    (f.x_breaks.is_empty() && f.y_breaks.is_empty() && f.values.len() == 1).then(|| f.values[0].at(eps))
}

/// Cell averages of the limiting diffusion solution: closed form for constant
/// slab data, a fine finite-volume solve for piecewise slab data, and the sine
/// series on the unit square with vacuum boundaries.
pub fn diffusion_limit(spec: &ProblemSpec, grid: &Grid) -> Result<Vec<f64>> {
    let eps = spec.epsilon;
    let SourceField::Piecewise(source) = &spec.source else {
        return Err(Error::Config("diffusion reference needs an isotropic source".into()));
    };
    let mat = &spec.material;
    let constants = (
        constant_value(&mat.sigma_t, eps),
        constant_value(&mat.sigma_a, eps),
        constant_value(source, eps),
    );
    match (grid, spec.domain) {
        (Grid::Slab(mesh), Domain::Slab { length }) => {
            let quad = gauss_legendre(spec.quadrature)?;
            let (f, g) = resolve_inflow_1d(&spec.boundary, &quad)?;
            let bc = diffusion_boundary_values(&quad, &f, &g);
            if let (Some(st), Some(sa), Some(q)) = constants {
                let exact = diffusion_exact_constant(st, sa, q, length, bc);
                return Ok(cell_moments_1d(|x| exact.eval(x), mesh)?.avg);
            }
            let (st, sa, q) = (mat.sigma_t.clone(), mat.sigma_a.clone(), source.clone());
            let problem = DiffusionProblem {
                length,
                sigma_t: Box::new(move |x| st.at(x, 0.0, eps)),
                sigma_a: Box::new(move |x| sa.at(x, 0.0, eps)),
                q: Box::new(move |x| q.at(x, 0.0, eps)),
                left: bc.0,
                right: bc.1,
            };
            let sol = diffusion_solve(&problem, DIFFUSION_CELLS)?;
            Ok(cell_moments_1d(|x| sol.eval(x), mesh)?.avg)
        }
        (Grid::Plane(mesh), Domain::Rectangle { lx, ly }) => {
            let b = &spec.boundary;
            let vacuum = [&b.left, &b.right, &b.bottom, &b.top]
                .iter()
                .all(|f| matches!(f, Inflow::Vacuum));
            let unit = lx == 1.0 && ly == 1.0 && mesh.nx() == mesh.ny();
            match constants {
                (Some(st), Some(sa), Some(q)) if vacuum && unit => {
                    Ok(square_series_cell_averages(st, sa, q, mesh.nx(), SERIES_TERMS))
                }
                _ => Err(Error::Config(
                    "2D diffusion reference needs constant data on the unit square with vacuum \
                     boundaries; use reference = \"fine-mesh\""
                        .into(),
                )),
            }
        }
        _ => Err(Error::InvalidArgument("mesh does not match the problem domain".into())),
    }
}

/// A run of the same solver on a refined mesh.
#[derive(Debug, Clone)]
pub struct FineMeshReference {
    pub grid: Grid,
    pub report: RunReport,
}

impl FineMeshReference {
    /// Solves on `finest` refined `factor` times per axis.
    pub fn compute(spec: &ProblemSpec, finest: &Grid, factor: usize, cfg: &RunConfig) -> Result<Self> {
        let grid = finest.refine(factor)?;
        let report = solve_grid(spec, &grid, cfg)?;
        Ok(Self { grid, report })
    }

    pub fn averages_on(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.restrict(&self.grid, &self.report.phi)
    }
}

/// Default refinement factor of fine-mesh references.
pub fn default_factor(spec: &ProblemSpec) -> usize {
    if spec.dimension() == 1 {
        4
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;

    #[test]
    fn manufactured_slab_averages() {
        let p = catalog(1).unwrap();
        let grid = Grid::for_problem(&p, 10).unwrap();
        let avg = manufactured(&p, &grid).unwrap();
        // ∫_0^1 2 x³(1−x)³ dx = 2/140
        let total: f64 = avg.iter().map(|a| a * 0.1).sum();
        assert!((total - 2.0 / 140.0).abs() < 1e-15);
        assert!(manufactured(&catalog(2).unwrap(), &grid).is_err());
    }

    #[test]
    fn diffusion_reference_routes_agree() {
        // closed form and finite volumes on the same constant-coefficient slab
        let p = catalog(2).unwrap();
        let grid = Grid::for_problem(&p, 10).unwrap();
        let closed = diffusion_limit(&p, &grid).unwrap();
        let mut split = p.clone();
        split.material.sigma_t = PiecewiseField::slabs(vec![0.5], vec![1.0.into(), 1.0.into()]);
        let fv = diffusion_limit(&split, &grid).unwrap();
        for (a, b) in closed.iter().zip(&fv) {
            assert!((a - b).abs() < 1e-7, "{a} {b}");
        }
    }

    #[test]
    fn square_diffusion_reference_is_symmetric() {
        let p = catalog(8).unwrap();
        let grid = Grid::for_problem(&p, 10).unwrap();
        let r = diffusion_limit(&p, &grid).unwrap();
        for j in 0..10 {
            for i in 0..10 {
                assert!((r[j * 10 + i] - r[i * 10 + j]).abs() < 1e-14);
                assert!((r[j * 10 + i] - r[j * 10 + 9 - i]).abs() < 1e-14);
            }
        }
        assert!(diffusion_limit(&catalog(10).unwrap(), &Grid::for_problem(&catalog(10).unwrap(), 50).unwrap()).is_err());
    }
}
