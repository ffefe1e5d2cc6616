//! Dense assembly and direct solution of the full linear discretization
//! (linear reconstruction everywhere), used to check the sweeping solvers.
//!
//! The reconstruction and ghost coefficients are re-derived here from their
//! defining moment conditions rather than taken from the solver's tables.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hweno::InflowClosure;
use crate::mesh::{Mesh1D, Mesh2D};
use crate::problem::{cell_moments_1d, cell_moments_2d, resolve_inflow_1d, ProblemSpec};
use crate::quadrature::{AngularQuadrature1D, AngularQuadrature2D};

/// Largest system the oracle will assemble.
pub const MAX_UNKNOWNS: usize = 4000;

/// Edge-value rows (left edge, right edge) of the degree-5 polynomial whose
/// averages and first moments match three unit cells centered at −1, 0, 1.
/// Rows are ordered `[avg_{-1}, avg_0, avg_1, mom_{-1}, mom_0, mom_1]`.
pub fn derived_edge_rows() -> Result<([f64; 6], [f64; 6])> {
    // Integral of ξ^k over [c − ½, c + ½].
    let int = |k: i32, c: f64| ((c + 0.5).powi(k + 1) - (c - 0.5).powi(k + 1)) / (k + 1) as f64;
    let mut a = DMatrix::<f64>::zeros(6, 6);
    for (r, c) in [-1.0, 0.0, 1.0].iter().enumerate() {
        for k in 0..6 {
            a[(r, k)] = int(k as i32, *c);
            // ∫ ξ^k (ξ − c) dξ
            a[(r + 3, k)] = int(k as i32 + 1, *c) - c * int(k as i32, *c);
        }
    }
    // Edge value e^T coef = e^T A^{-1} d, so the row is A^{-T} e.
    let at = a.transpose();
    let lu = at.lu();
    let solve = |x: f64| -> Result<[f64; 6]> {
        let e = DVector::from_iterator(6, (0..6).map(|k| x.powi(k)));
        let r = lu
            .solve(&e)
            .ok_or_else(|| Error::Singular("edge row derivation".into()))?;
        Ok(std::array::from_fn(|i| r[i]))
    };
    Ok((solve(-0.5)?, solve(0.5)?))
}

/// Weights on the five nearest interior cells (nearest first) reproducing the
/// next cell outward for data from any polynomial of degree ≤ 4 in the center.
pub fn derived_ghost_weights() -> Result<[f64; 5]> {
    // Interior centers at 0..4, ghost at −1: Σ w_i c_i^k = (−1)^k, k = 0..4.
    let mut a = DMatrix::<f64>::zeros(5, 5);
    let mut b = DVector::<f64>::zeros(5);
    for k in 0..5 {
        for i in 0..5 {
            a[(k, i)] = (i as f64).powi(k as i32);
        }
        b[k] = (-1.0f64).powi(k as i32);
    }
    let w = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("ghost weight derivation".into()))?;
    Ok(std::array::from_fn(|i| w[i]))
}

/// Coefficients of (inflow trace, avg_0, mom_0, avg_s, mom_s) giving the
/// outflow edge value at s/2 of the quartic matching the inflow trace at
/// −s/2 and the average and first moment of the unit cells centered at 0 and s.
pub fn derived_inflow_boundary_row(s: f64) -> Result<[f64; 5]> {
    let int = |k: i32, c: f64| ((c + 0.5).powi(k + 1) - (c - 0.5).powi(k + 1)) / (k + 1) as f64;
    let mut a = DMatrix::<f64>::zeros(5, 5);
    for k in 0..5 {
        let ki = k as i32;
        a[(0, k)] = (-0.5 * s).powi(ki);
        a[(1, k)] = int(ki, 0.0);
        a[(2, k)] = int(ki + 1, 0.0);
        a[(3, k)] = int(ki, s);
        a[(4, k)] = int(ki + 1, s) - s * int(ki, s);
    }
    let e = DVector::from_iterator(5, (0..5).map(|k| (0.5 * s).powi(k)));
    let r = a
        .transpose()
        .lu()
        .solve(&e)
        .ok_or_else(|| Error::Singular("boundary row derivation".into()))?;
    Ok(std::array::from_fn(|i| r[i]))
}

/// Sparse linear form Σ c_k x_k + constant used during assembly.
#[derive(Debug, Clone, Default)]
struct LinForm {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

impl LinForm {
    fn var(i: usize) -> Self {
        Self {
            terms: vec![(i, 1.0)],
            constant: 0.0,
        }
    }

    fn constant(c: f64) -> Self {
        Self {
            terms: vec![],
            constant: c,
        }
    }

    fn add_scaled(&mut self, other: &LinForm, s: f64) {
        for &(i, c) in &other.terms {
            self.terms.push((i, c * s));
        }
        self.constant += other.constant * s;
    }
}

/// Assembled system `matrix · x = rhs`.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    /// Moments stored per cell and direction.
    pub moments: usize,
    pub cells: usize,
    pub directions: usize,
}

impl DenseSystem {
    /// Unknown index of moment `k` of direction `d` in cell `c`.
    pub fn index(&self, d: usize, c: usize, k: usize) -> usize {
        index(self.moments, self.cells, d, c, k)
    }

    fn new(moments: usize, cells: usize, directions: usize) -> Result<Self> {
        let n = moments * cells * directions;
        if n > MAX_UNKNOWNS {
            return Err(Error::TooLarge {
                unknowns: n,
                cap: MAX_UNKNOWNS,
            });
        }
        Ok(Self {
            matrix: DMatrix::zeros(n, n),
            rhs: DVector::zeros(n),
            moments,
            cells,
            directions,
        })
    }

    fn add_equation(&mut self, row: usize, f: &LinForm, rhs: f64) {
        for &(i, c) in &f.terms {
            self.matrix[(row, i)] += c;
        }
        self.rhs[row] = rhs - f.constant;
    }

    pub fn unknowns(&self) -> usize {
        self.rhs.len()
    }
}

fn index(moments: usize, cells: usize, d: usize, c: usize, k: usize) -> usize {
    (d * cells + c) * moments + k
}

/// Solution of a dense system with the same indexing.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub values: DVector<f64>,
    pub moments: usize,
    pub cells: usize,
}

impl DenseSolution {
    pub fn get(&self, d: usize, c: usize, k: usize) -> f64 {
        self.values[index(self.moments, self.cells, d, c, k)]
    }
}

pub fn direct_solve(system: &DenseSystem) -> Result<DenseSolution> {
    let lu = system.matrix.clone().lu();
    let values = lu.solve(&system.rhs).ok_or_else(|| Error::Breakdown {
        cell: 0,
        direction: 0,
        what: "singular dense system".into(),
    })?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Breakdown {
            cell: 0,
            direction: 0,
            what: "non-finite dense solution".into(),
        });
    }
    Ok(DenseSolution {
        values,
        moments: system.moments,
        cells: system.cells,
    })
}

/// Max-norm residual of `solution` in `system`.
pub fn residual(system: &DenseSystem, solution: &DenseSolution) -> f64 {
    (&system.matrix * &solution.values - &system.rhs).amax()
}

/// Linear form of a cell quantity along a line of `n` cells, where `value(l)`
/// gives the form for interior cell l and ghosts at −1 and n are extrapolated.
fn line_cell(n: usize, l: isize, ghost: &[f64; 5], value: &dyn Fn(usize) -> LinForm) -> LinForm {
    if l >= 0 && (l as usize) < n {
        return value(l as usize);
    }
    let mut f = LinForm::default();
    for (i, w) in ghost.iter().enumerate() {
        let cell = if l < 0 { i } else { n - 1 - i };
        f.add_scaled(&value(cell), *w);
    }
    f
}

/// Edge value from the three-cell stencil centered at `center` along a line,
/// for a pair of quantities (average-like `a`, moment-like `b`).
fn line_edge(
    n: usize,
    center: usize,
    row: &[f64; 6],
    ghost: &[f64; 5],
    a: &dyn Fn(usize) -> LinForm,
    b: &dyn Fn(usize) -> LinForm,
) -> LinForm {
    let mut f = LinForm::default();
    for (o, off) in [-1isize, 0, 1].iter().enumerate() {
        let l = center as isize + off;
        f.add_scaled(&line_cell(n, l, ghost, a), row[o]);
        f.add_scaled(&line_cell(n, l, ghost, b), row[o + 3]);
    }
    f
}

/// Outflow trace of the first cell downstream of an inflow boundary.
fn boundary_edge(
    row: &[f64; 5],
    e_in: f64,
    cell: usize,
    down: usize,
    a: &dyn Fn(usize) -> LinForm,
    b: &dyn Fn(usize) -> LinForm,
) -> LinForm {
    let mut f = LinForm::constant(row[0] * e_in);
    f.add_scaled(&a(cell), row[1]);
    f.add_scaled(&b(cell), row[2]);
    f.add_scaled(&a(down), row[3]);
    f.add_scaled(&b(down), row[4]);
    f
}

/// Assembles the 1D system: unknowns (ψ, ψ̂) per cell and direction.
/// `inflow_closure` defaults to ghost extrapolation, as in the 1D sweeper.
pub fn assemble_global_1d(
    problem: &ProblemSpec,
    mesh: &Mesh1D,
    quad: &AngularQuadrature1D,
    inflow_closure: Option<InflowClosure>,
) -> Result<DenseSystem> {
    if !mesh.is_uniform() || mesh.cells() < 5 {
        return Err(Error::InvalidArgument(
            "dense assembly needs a uniform mesh with at least 5 cells".into(),
        ));
    }
    let (left_row, right_row) = derived_edge_rows()?;
    let ghost = derived_ghost_weights()?;
    let trace = inflow_closure.unwrap_or(InflowClosure::Ghost) == InflowClosure::Trace;
    let (fwd, bwd) = (derived_inflow_boundary_row(1.0)?, derived_inflow_boundary_row(-1.0)?);
    let n = mesh.cells();
    let nm = quad.count();
    let mut sys = DenseSystem::new(2, n, nm)?;
    let eps = problem.epsilon;
    let mat = problem.cell_material_1d(mesh)?;
    let (inflow_l, inflow_r) = resolve_inflow_1d(&problem.boundary, quad)?;
    let dx = mesh.dx(0);
    for m in 0..nm {
        let mu = quad.ordinates()[m];
        let q = cell_moments_1d(|x| problem.source.eval(x, 0.0, mu, 0.0, eps), mesh)?;
        let a = |c: usize| LinForm::var(index(2, n, m, c, 0));
        let b = |c: usize| LinForm::var(index(2, n, m, c, 1));
        // Upwind value at interface i (0..=n).
        let edge = |i: usize| -> LinForm {
            if mu > 0.0 {
                if i == 0 {
                    LinForm::constant(inflow_l[m])
                } else if i == 1 && trace {
                    boundary_edge(&fwd, inflow_l[m], 0, 1, &a, &b)
                } else {
                    line_edge(n, i - 1, &right_row, &ghost, &a, &b)
                }
            } else if i == n {
                LinForm::constant(inflow_r[m])
            } else if i == n - 1 && trace {
                boundary_edge(&bwd, inflow_r[m], n - 1, n - 2, &a, &b)
            } else {
                line_edge(n, i, &left_row, &ghost, &a, &b)
            }
        };
        let k = mu / dx;
        for j in 0..n {
            let s = mat.sigma_t[j] / eps;
            let half_c = 0.5 * (mat.sigma_t[j] / eps - eps * mat.sigma_a[j]);
            let (el, er) = (edge(j), edge(j + 1));
            for (mom, src) in [(0usize, q.avg[j]), (1, q.mom[j])] {
                let mut f = LinForm::default();
                if mom == 0 {
                    f.add_scaled(&er, k);
                    f.add_scaled(&el, -k);
                } else {
                    f.add_scaled(&er, 0.5 * k);
                    f.add_scaled(&el, 0.5 * k);
                    f.add_scaled(&a(j), -k);
                }
                f.add_scaled(&LinForm::var(index(2, n, m, j, mom)), s);
                for (mm, w) in quad.weights().iter().enumerate() {
                    f.add_scaled(&LinForm::var(index(2, n, mm, j, mom)), -half_c * w);
                }
                let row = sys.index(m, j, mom);
                sys.add_equation(row, &f, 0.5 * eps * src);
            }
        }
    }
    Ok(sys)
}

/// Assembles the 2D system: unknowns (ψ, ψ̂ₓ, ψ̃_y, ψ̂̃) per cell and direction,
/// cells numbered with x fastest.
/// `inflow_closure` defaults to the inflow-trace closure, as in the 2D sweeper.
pub fn assemble_global_2d(
    problem: &ProblemSpec,
    mesh: &Mesh2D,
    quad: &AngularQuadrature2D,
    inflow_closure: Option<InflowClosure>,
) -> Result<DenseSystem> {
    let (nx, ny) = (mesh.nx(), mesh.ny());
    if nx < 5 || ny < 5 {
        return Err(Error::InvalidArgument("dense assembly needs at least 5 cells per axis".into()));
    }
    let (left_row, right_row) = derived_edge_rows()?;
    let ghost = derived_ghost_weights()?;
    let trace = inflow_closure.unwrap_or(InflowClosure::Trace) == InflowClosure::Trace;
    let (fwd, bwd) = (derived_inflow_boundary_row(1.0)?, derived_inflow_boundary_row(-1.0)?);
    let cells = nx * ny;
    let nd = quad.count();
    let mut sys = DenseSystem::new(4, cells, nd)?;
    let eps = problem.epsilon;
    let mat = problem.cell_material_2d(mesh)?;
    let inflow = [
        problem.boundary.left.isotropic_value()?,
        problem.boundary.right.isotropic_value()?,
        problem.boundary.bottom.isotropic_value()?,
        problem.boundary.top.isotropic_value()?,
    ];
    let (dx, dy) = (mesh.dx(), mesh.dy());
    for d in 0..nd {
        let (mu, eta) = (quad.mu()[d], quad.eta()[d]);
        let q = cell_moments_2d(|x, y| problem.source.eval(x, y, mu, eta, eps), mesh)?;
        let var = |i: usize, j: usize, k: usize| LinForm::var(index(4, cells, d, j * nx + i, k));
        // x-face traces at interface i of row j: (y-average, y-moment).
        let xface = |i: usize, j: usize| -> (LinForm, LinForm) {
            let a0 = |l: usize| var(l, j, 0);
            let a1 = |l: usize| var(l, j, 1);
            let b0 = |l: usize| var(l, j, 2);
            let b1 = |l: usize| var(l, j, 3);
            if mu > 0.0 {
                if i == 0 {
                    (LinForm::constant(inflow[0]), LinForm::default())
                } else if i == 1 && trace {
                    (
                        boundary_edge(&fwd, inflow[0], 0, 1, &a0, &a1),
                        boundary_edge(&fwd, 0.0, 0, 1, &b0, &b1),
                    )
                } else {
                    (
                        line_edge(nx, i - 1, &right_row, &ghost, &a0, &a1),
                        line_edge(nx, i - 1, &right_row, &ghost, &b0, &b1),
                    )
                }
            } else if i == nx {
                (LinForm::constant(inflow[1]), LinForm::default())
            } else if i == nx - 1 && trace {
                (
                    boundary_edge(&bwd, inflow[1], nx - 1, nx - 2, &a0, &a1),
                    boundary_edge(&bwd, 0.0, nx - 1, nx - 2, &b0, &b1),
                )
            } else {
                (
                    line_edge(nx, i, &left_row, &ghost, &a0, &a1),
                    line_edge(nx, i, &left_row, &ghost, &b0, &b1),
                )
            }
        };
        // y-face traces at interface j of column i: (x-average, x-moment).
        let yface = |i: usize, j: usize| -> (LinForm, LinForm) {
            let a0 = |l: usize| var(i, l, 0);
            let a1 = |l: usize| var(i, l, 2);
            let b0 = |l: usize| var(i, l, 1);
            let b1 = |l: usize| var(i, l, 3);
            if eta > 0.0 {
                if j == 0 {
                    (LinForm::constant(inflow[2]), LinForm::default())
                } else if j == 1 && trace {
                    (
                        boundary_edge(&fwd, inflow[2], 0, 1, &a0, &a1),
                        boundary_edge(&fwd, 0.0, 0, 1, &b0, &b1),
                    )
                } else {
                    (
                        line_edge(ny, j - 1, &right_row, &ghost, &a0, &a1),
                        line_edge(ny, j - 1, &right_row, &ghost, &b0, &b1),
                    )
                }
            } else if j == ny {
                (LinForm::constant(inflow[3]), LinForm::default())
            } else if j == ny - 1 && trace {
                (
                    boundary_edge(&bwd, inflow[3], ny - 1, ny - 2, &a0, &a1),
                    boundary_edge(&bwd, 0.0, ny - 1, ny - 2, &b0, &b1),
                )
            } else {
                (
                    line_edge(ny, j, &left_row, &ghost, &a0, &a1),
                    line_edge(ny, j, &left_row, &ghost, &b0, &b1),
                )
            }
        };
        let (kx, ky) = (mu / dx, eta / dy);
        for j in 0..ny {
            for i in 0..nx {
                let c = j * nx + i;
                let s = mat.sigma_t[c] / eps;
                let quarter_c = 0.25 * (mat.sigma_t[c] / eps - eps * mat.sigma_a[c]);
                let (xl0, xl1) = xface(i, j);
                let (xr0, xr1) = xface(i + 1, j);
                let (yb0, yb1) = yface(i, j);
                let (yt0, yt1) = yface(i, j + 1);
                let srcs = [q.avg[c], q.mx[c], q.my[c], q.mxy[c]];
                for k in 0..4 {
                    let mut f = LinForm::default();
                    match k {
                        0 => {
                            f.add_scaled(&xr0, kx);
                            f.add_scaled(&xl0, -kx);
                            f.add_scaled(&yt0, ky);
                            f.add_scaled(&yb0, -ky);
                        }
                        1 => {
                            f.add_scaled(&xr0, 0.5 * kx);
                            f.add_scaled(&xl0, 0.5 * kx);
                            f.add_scaled(&var(i, j, 0), -kx);
                            f.add_scaled(&yt1, ky);
                            f.add_scaled(&yb1, -ky);
                        }
                        2 => {
                            f.add_scaled(&xr1, kx);
                            f.add_scaled(&xl1, -kx);
                            f.add_scaled(&yt0, 0.5 * ky);
                            f.add_scaled(&yb0, 0.5 * ky);
                            f.add_scaled(&var(i, j, 0), -ky);
                        }
                        _ => {
                            f.add_scaled(&xr1, 0.5 * kx);
                            f.add_scaled(&xl1, 0.5 * kx);
                            f.add_scaled(&var(i, j, 2), -kx);
                            f.add_scaled(&yt1, 0.5 * ky);
                            f.add_scaled(&yb1, 0.5 * ky);
                            f.add_scaled(&var(i, j, 1), -ky);
                        }
                    }
                    f.add_scaled(&var(i, j, k), s);
                    for (dd, w) in quad.weights().iter().enumerate() {
                        f.add_scaled(&LinForm::var(index(4, cells, dd, c, k)), -quarter_c * w);
                    }
                    let row = sys.index(d, c, k);
                    sys.add_equation(row, &f, 0.25 * eps * srcs[k]);
                }
            }
        }
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hweno;
    use crate::problem::{catalog, PiecewiseField, SourceField};
    use crate::quadrature::{gauss_legendre, product_quadrature};

    #[test]
    fn derived_rows_match_tables() {
        let (l, r) = derived_edge_rows().unwrap();
        for i in 0..6 {
            assert!((l[i] - hweno::BIG_LEFT[i]).abs() < 1e-12);
            assert!((r[i] - hweno::BIG_RIGHT[i]).abs() < 1e-12);
        }
        let g = derived_ghost_weights().unwrap();
        for i in 0..5 {
            assert!((g[i] - crate::ghost::GHOST_COEFFS[i]).abs() < 1e-12);
        }
        let row = hweno::INFLOW_TRACE_ROW;
        let fwd = derived_inflow_boundary_row(1.0).unwrap();
        let bwd = derived_inflow_boundary_row(-1.0).unwrap();
        let sign = [1.0, 1.0, -1.0, 1.0, -1.0];
        for i in 0..5 {
            assert!((fwd[i] - row[i]).abs() < 1e-12);
            assert!((bwd[i] - sign[i] * row[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let mut p = catalog(2).unwrap();
        p.source = SourceField::Piecewise(PiecewiseField::constant(0.0));
        let mesh = Mesh1D::uniform(1.0, 6).unwrap();
        let quad = gauss_legendre(2).unwrap();
        let sys = assemble_global_1d(&p, &mesh, &quad, None).unwrap();
        assert_eq!(sys.unknowns(), 2 * 6 * 2);
        let sol = direct_solve(&sys).unwrap();
        assert!(sol.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn residual_is_small() {
        let p = catalog(2).unwrap();
        let mesh = Mesh1D::uniform(1.0, 8).unwrap();
        let quad = gauss_legendre(4).unwrap();
        let sys = assemble_global_1d(&p, &mesh, &quad, None).unwrap();
        let sol = direct_solve(&sys).unwrap();
        assert!(residual(&sys, &sol) <= 1e-11);
    }

    #[test]
    fn sweeping_matches_direct_solve_1d() {
        use crate::hweno::{Mode, ReconOptions};
        use crate::report::IterationControl;
        use crate::sweep1d::solve_1d;
        let cases = [(1, 1.0, 10, 4), (2, 0.5, 12, 6), (3, 1.0, 10, 8), (9, 1.0, 10, 4)];
        for ((id, eps, n, mq), inflow) in cases.into_iter().flat_map(|c| [(c, None), (c, Some(InflowClosure::Trace))]) {
            let mut p = catalog(id).unwrap();
            p.epsilon = eps;
            let Ok(mesh) = p.mesh_1d(n) else { continue };
            if p.cell_material_1d(&mesh).is_err() {
                continue;
            }
            let quad = gauss_legendre(mq).unwrap();
            let sys = assemble_global_1d(&p, &mesh, &quad, inflow).unwrap();
            let direct = direct_solve(&sys).unwrap();
            assert!(residual(&sys, &direct) <= 1e-11);
            let opts = ReconOptions {
                mode: Mode::AlwaysLinear,
                inflow,
                ..ReconOptions::default()
            };
            let control = IterationControl {
                max_iter: 20_000,
                ..IterationControl::with_tol(1e-15)
            };
            let sol = solve_1d(&p, &mesh, &quad, &control, opts).unwrap();
            let mut err: f64 = 0.0;
            for m in 0..quad.count() {
                for j in 0..n {
                    err = err.max((sol.state.field.avg(m, j) - direct.get(m, j, 0)).abs());
                    err = err.max((sol.state.field.mom(m, j) - direct.get(m, j, 1)).abs());
                }
            }
            assert!(err <= 1e-10, "problem {id}: {err}");
        }
    }

    #[test]
    fn sweeping_matches_direct_solve_2d() {
        use crate::hweno::{Mode, ReconOptions};
        use crate::report::IterationControl;
        use crate::sweep2d::{solve_2d, RelaxationPolicy};
        for (id, eps, n, mq) in [(7, 1.0, 5, 2), (7, 0.5, 6, 2), (8, 1.0, 5, 2)] {
            let mut p = catalog(id).unwrap();
            p.epsilon = eps;
            let mesh = p.mesh_2d(n).unwrap();
            let quad = product_quadrature(mq).unwrap();
            let sys = assemble_global_2d(&p, &mesh, &quad, None).unwrap();
            let direct = direct_solve(&sys).unwrap();
            assert!(residual(&sys, &direct) <= 1e-11);
            let opts = ReconOptions {
                mode: Mode::AlwaysLinear,
                ..ReconOptions::default()
            };
            let control = IterationControl {
                max_iter: 20_000,
                ..IterationControl::with_tol(1e-15)
            };
            let sol = solve_2d(&p, &mesh, &quad, &control, opts, RelaxationPolicy::default()).unwrap();
            let mut err: f64 = 0.0;
            for d in 0..quad.count() {
                for j in 0..n {
                    for i in 0..n {
                        for k in 0..4 {
                            err = err.max((sol.state.field.get(d, i, j, k) - direct.get(d, j * n + i, k)).abs());
                        }
                    }
                }
            }
            assert!(err <= 1e-9, "problem {id}: {err}");
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let p = catalog(8).unwrap();
        let mesh = Mesh2D::uniform(1.0, 1.0, 10, 10).unwrap();
        let quad = product_quadrature(4).unwrap();
        assert!(matches!(
            assemble_global_2d(&p, &mesh, &quad, None),
            Err(Error::TooLarge { unknowns: 6400, .. })
        ));
        let mesh = Mesh2D::uniform(1.0, 1.0, 5, 5).unwrap();
        let quad = product_quadrature(2).unwrap();
        assert_eq!(assemble_global_2d(&p, &mesh, &quad, None).unwrap().unknowns(), 4 * 25 * 4);
    }
}
