//! Fast-sweeping Gauss–Seidel source iteration for the 1D slab.
//!
//! Each cell carries its average ψ and first moment ψ̂ per direction. A sweep
//! visits cells from upwind to downwind, solving the two moment equations
//! with the inflow edge known and the outflow edge written as an affine
//! function of the cell's own unknowns (reconstruction weights and downwind
//! data frozen at their latest values).

use crate::error::{Error, Result};
use crate::ghost::{extrapolate, Boundary};
use crate::hweno::{self, dot6, InflowClosure, MaterialStencil, ReconOptions, Side, INFLOW_TRACE_ROW};
use crate::mesh::Mesh1D;
use crate::problem::{cell_moments_1d, resolve_inflow_1d, CellMaterial, ProblemSpec};
use crate::quadrature::AngularQuadrature1D;
use crate::report::{EdgeFlux, IterationControl, Monitor, RunReport, StopReason};

/// Smallest 2×2 determinant magnitude accepted by the local solve.
pub const MIN_DET: f64 = 1e-300;

/// Outflow edge value as `own_avg · ψ_j + own_mom · ψ̂_j + constant`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutflowClosure {
    pub own_avg: f64,
    pub own_mom: f64,
    pub constant: f64,
}

/// Inputs to a single cell solve for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalProblem {
    pub mu: f64,
    pub sigma_t: f64,
    pub eps: f64,
    pub dx: f64,
    pub inflow_edge: f64,
    pub closure: OutflowClosure,
    pub source: f64,
    pub source_mom: f64,
    /// Indices used only for error reporting.
    pub cell: usize,
    pub direction: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSolution {
    pub avg: f64,
    pub mom: f64,
    /// Outflow edge from the closure evaluated at the solution.
    pub outflow_edge: f64,
}

/// Solves the cell's two moment equations
///   k (E_R − E_L) + s ψ = S,   k (½(E_R + E_L) − ψ) + s ψ̂ = Ŝ,
/// with k = μ/Δx, s = σ_t/ε, the inflow edge given and the outflow edge closed
/// by `closure`.
#[inline]
pub fn local_solve(p: &LocalProblem) -> Result<LocalSolution> {
    let k = p.mu / p.dx;
    let s = p.sigma_t / p.eps;
    let OutflowClosure { own_avg: ca, own_mom: cb, constant: cc } = p.closure;
    let e_in = p.inflow_edge;
    // Signed coefficient of the outflow edge in the balance equation.
    let sg = if p.mu > 0.0 { k } else { -k };
    let a00 = sg * ca + s;
    let a01 = sg * cb;
    let a10 = k * (0.5 * ca - 1.0);
    let a11 = 0.5 * k * cb + s;
    let r0 = p.source + sg * e_in - sg * cc;
    let r1 = p.source_mom - 0.5 * k * (e_in + cc);
    let det = a00 * a11 - a01 * a10;
    if !(det.abs() >= MIN_DET) {
        return Err(Error::Breakdown {
            cell: p.cell,
            direction: p.direction,
            what: format!("2x2 determinant {det:e}"),
        });
    }
    let avg = (r0 * a11 - a01 * r1) / det;
    let mom = (a00 * r1 - a10 * r0) / det;
    if !avg.is_finite() || !mom.is_finite() {
        return Err(Error::Divergence {
            cell: p.cell,
            direction: p.direction,
        });
    }
    Ok(LocalSolution {
        avg,
        mom,
        outflow_edge: ca * avg + cb * mom + cc,
    })
}

/// How the outflow edge of a cell is reconstructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellClosure {
    /// Fifth-order linear formula.
    Linear,
    /// Nonlinear weights with the given heterogeneity factors.
    Nonlinear([f64; 3]),
    /// Single-cell linear profile, used where the stencil is not uniform.
    CellLinear,
}

const CELL_LINEAR_RIGHT: [f64; 6] = [0.0, 1.0, 0.0, 0.0, 6.0, 0.0];
const CELL_LINEAR_LEFT: [f64; 6] = [0.0, 1.0, 0.0, 0.0, -6.0, 0.0];

impl CellClosure {
    /// Reconstruction row for stencil data `d` on `side`.
    #[inline]
    pub fn row(&self, d: &[f64; 6], side: Side, opts: &ReconOptions) -> [f64; 6] {
        match *self {
            CellClosure::Linear => *hweno::big_row(side),
            CellClosure::CellLinear => match side {
                Side::RightEdgeMinus => CELL_LINEAR_RIGHT,
                Side::LeftEdgePlus => CELL_LINEAR_LEFT,
            },
            CellClosure::Nonlinear(tau) => {
                let beta = hweno::smoothness_of(d);
                let bp = [tau[0] * beta[0], tau[1] * beta[1], tau[2] * beta[2]];
                let w = hweno::nonlinear_weights(hweno::linear_weights(side), bp, opts.eps_tilde);
                hweno::combined_row(side, Some(w))
            }
        }
    }
}

/// Angular flux moments per direction, with one ghost cell on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField1D {
    cells: usize,
    directions: usize,
    /// `avg[m * (cells + 2) + j + 1]` is ψ_{m,j}; indices 0 and cells + 1 are ghosts.
    avg: Vec<f64>,
    mom: Vec<f64>,
    /// `edge[m * (cells + 1) + i]` is the upwind value at interface i.
    edge: Vec<f64>,
}

impl FluxField1D {
    pub fn zeros(cells: usize, directions: usize) -> Self {
        Self {
            cells,
            directions,
            avg: vec![0.0; directions * (cells + 2)],
            mom: vec![0.0; directions * (cells + 2)],
            edge: vec![0.0; directions * (cells + 1)],
        }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn directions(&self) -> usize {
        self.directions
    }

    #[inline]
    fn at(&self, m: usize, j: usize) -> usize {
        m * (self.cells + 2) + j + 1
    }

    pub fn avg(&self, m: usize, j: usize) -> f64 {
        self.avg[self.at(m, j)]
    }

    pub fn mom(&self, m: usize, j: usize) -> f64 {
        self.mom[self.at(m, j)]
    }

    pub fn set(&mut self, m: usize, j: usize, avg: f64, mom: f64) {
        let k = self.at(m, j);
        self.avg[k] = avg;
        self.mom[k] = mom;
    }

    /// Interior averages of direction m.
    pub fn avg_row(&self, m: usize) -> &[f64] {
        let s = m * (self.cells + 2) + 1;
        &self.avg[s..s + self.cells]
    }

    pub fn mom_row(&self, m: usize) -> &[f64] {
        let s = m * (self.cells + 2) + 1;
        &self.mom[s..s + self.cells]
    }

    /// Ghost (average, moment) of direction m on `side`.
    pub fn ghost(&self, m: usize, side: Boundary) -> (f64, f64) {
        let k = match side {
            Boundary::Left => m * (self.cells + 2),
            Boundary::Right => m * (self.cells + 2) + self.cells + 1,
        };
        (self.avg[k], self.mom[k])
    }

    /// Upwind edge value of direction m at interface i.
    pub fn edge(&self, m: usize, i: usize) -> f64 {
        self.edge[m * (self.cells + 1) + i]
    }

    /// Recomputes the two ghost cells of direction m from interior data.
    pub fn refresh_ghosts(&mut self, m: usize) {
        let n = self.cells;
        let base = m * (n + 2);
        for arr in [&mut self.avg, &mut self.mom] {
            let l = extrapolate(&arr[base + 1..base + n + 1], Boundary::Left);
            let r = extrapolate(&arr[base + 1..base + n + 1], Boundary::Right);
            arr[base] = l;
            arr[base + n + 1] = r;
        }
    }
}

/// Scalar flux moments and sweep state.
#[derive(Debug, Clone, PartialEq)]
pub struct State1D {
    pub field: FluxField1D,
    /// φ_j = Σ ω_m ψ_{m,j}
    pub phi: Vec<f64>,
    /// φ̂_j = Σ ω_m ψ̂_{m,j}
    pub phi_hat: Vec<f64>,
}

/// Precomputed, run-invariant data for sweeping one problem on one mesh.
#[derive(Debug, Clone)]
pub struct Sweeper1D {
    mesh: Mesh1D,
    quad: AngularQuadrature1D,
    eps: f64,
    opts: ReconOptions,
    material: CellMaterial,
    closures: Vec<CellClosure>,
    /// ½ (σ_t/ε − ε σ_a) per cell.
    half_scatter: Vec<f64>,
    /// (ε/2) Q moments per direction and cell (rows shared when Q is isotropic).
    q_avg: Vec<Vec<f64>>,
    q_mom: Vec<Vec<f64>>,
    isotropic_source: bool,
    inflow_left: Vec<f64>,
    inflow_right: Vec<f64>,
}

impl Sweeper1D {
    pub fn new(problem: &ProblemSpec, mesh: &Mesh1D, quad: &AngularQuadrature1D, opts: ReconOptions) -> Result<Self> {
        problem.validate()?;
        if problem.dimension() != 1 {
            return Err(Error::InvalidArgument("problem is not one-dimensional".into()));
        }
        let n = mesh.cells();
        if n < 5 {
            return Err(Error::Config(format!("the 1D solver needs at least 5 cells, got {n}")));
        }
        if !(opts.eps_tilde > 0.0) {
            return Err(Error::InvalidArgument("eps_tilde must be positive".into()));
        }
        if !mesh.same_width(0, 4) || !mesh.same_width(n - 1, n - 5) || !(1..5).all(|j| mesh.same_width(0, j))
            || !(n - 5..n).all(|j| mesh.same_width(n - 1, j))
        {
            return Err(Error::Config(
                "the five cells next to each boundary must have equal widths".into(),
            ));
        }
        let eps = problem.epsilon;
        let material = problem.cell_material_1d(mesh)?;
        let sigma_s = material.sigma_s(eps);
        let mut closures = Vec::with_capacity(n);
        for j in 0..n {
            let l = j.saturating_sub(1);
            let r = (j + 1).min(n - 1);
            // Ghost cells take the width and material of the adjacent boundary cell.
            let uniform = mesh.same_width(l, j) && mesh.same_width(j, r);
            let closure = if !uniform {
                CellClosure::CellLinear
            } else {
                let ms = MaterialStencil {
                    sigma_t: [material.sigma_t[l], material.sigma_t[j], material.sigma_t[r]],
                    sigma_s: [sigma_s[l], sigma_s[j], sigma_s[r]],
                    dx: mesh.dx(j),
                };
                let tau = hweno::heterogeneity_factors_with(&ms, opts.pairing);
                if hweno::uses_linear(opts.mode, tau[2]) {
                    CellClosure::Linear
                } else {
                    CellClosure::Nonlinear(tau)
                }
            };
            closures.push(closure);
        }
        let half_scatter = (0..n)
            .map(|j| 0.5 * (material.sigma_t[j] / eps - eps * material.sigma_a[j]))
            .collect();
        let isotropic_source = problem.source.is_isotropic();
        let rows = if isotropic_source { 1 } else { quad.count() };
        let mut q_avg = Vec::with_capacity(rows);
        let mut q_mom = Vec::with_capacity(rows);
        for m in 0..rows {
            let mu = quad.ordinates()[m];
            let mo = cell_moments_1d(|x| problem.source.eval(x, 0.0, mu, 0.0, eps), mesh)?;
            q_avg.push(mo.avg.iter().map(|v| 0.5 * eps * v).collect());
            q_mom.push(mo.mom.iter().map(|v| 0.5 * eps * v).collect());
        }
        let (inflow_left, inflow_right) = resolve_inflow_1d(&problem.boundary, quad)?;
        Ok(Self {
            mesh: mesh.clone(),
            quad: quad.clone(),
            eps,
            opts,
            material,
            closures,
            half_scatter,
            q_avg,
            q_mom,
            isotropic_source,
            inflow_left,
            inflow_right,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn quadrature(&self) -> &AngularQuadrature1D {
        &self.quad
    }

    pub fn closures(&self) -> &[CellClosure] {
        &self.closures
    }

    pub fn zero_state(&self) -> State1D {
        let n = self.mesh.cells();
        State1D {
            field: FluxField1D::zeros(n, self.quad.count()),
            phi: vec![0.0; n],
            phi_hat: vec![0.0; n],
        }
    }

    fn q_row(&self, m: usize) -> usize {
        if self.isotropic_source {
            0
        } else {
            m
        }
    }

    /// Frozen right-hand sides (S, Ŝ) of direction m from the current φ, φ̂.
    pub fn update_source(&self, state: &State1D, m: usize) -> (Vec<f64>, Vec<f64>) {
        let qm = self.q_row(m);
        let s = (0..self.mesh.cells())
            .map(|j| self.half_scatter[j] * state.phi[j] + self.q_avg[qm][j])
            .collect();
        let sh = (0..self.mesh.cells())
            .map(|j| self.half_scatter[j] * state.phi_hat[j] + self.q_mom[qm][j])
            .collect();
        (s, sh)
    }

    /// Sweeps direction m across the slab in its upwind order, then refreshes
    /// that direction's ghost cells.
    pub fn sweep_direction(&self, state: &mut State1D, m: usize) -> Result<()> {
        let n = self.mesh.cells();
        let mu = self.quad.ordinates()[m];
        let qm = self.q_row(m);
        let field = &mut state.field;
        let base = m * (n + 2) + 1;
        let ebase = m * (n + 1);
        let forward = mu > 0.0;
        let side = if forward { Side::RightEdgeMinus } else { Side::LeftEdgePlus };
        let mut inflow = if forward { self.inflow_left[m] } else { self.inflow_right[m] };
        let trace = self.opts.inflow.unwrap_or(InflowClosure::Ghost) == InflowClosure::Trace;
        if forward {
            field.edge[ebase] = inflow;
        } else {
            field.edge[ebase + n] = inflow;
        }
        for step in 0..n {
            let j = if forward { step } else { n - 1 - step };
            let c = base + j;
            let d = [
                field.avg[c - 1],
                field.avg[c],
                field.avg[c + 1],
                field.mom[c - 1],
                field.mom[c],
                field.mom[c + 1],
            ];
            let closure = self.closures[j];
            let (own_avg, own_mom, constant) = if step == 0 && trace && closure == CellClosure::Linear {
                let r = INFLOW_TRACE_ROW;
                let (s, da, db) = if forward { (1.0, d[2], d[5]) } else { (-1.0, d[0], d[3]) };
                (r[1], s * r[2], r[0] * inflow + r[3] * da + s * r[4] * db)
            } else {
                let row = closure.row(&d, side, &self.opts);
                (row[1], row[4], row[0] * d[0] + row[2] * d[2] + row[3] * d[3] + row[5] * d[5])
            };
            let sol = local_solve(&LocalProblem {
                mu,
                sigma_t: self.material.sigma_t[j],
                eps: self.eps,
                dx: self.mesh.dx(j),
                inflow_edge: inflow,
                closure: OutflowClosure {
                    own_avg,
                    own_mom,
                    constant,
                },
                source: self.half_scatter[j] * state.phi[j] + self.q_avg[qm][j],
                source_mom: self.half_scatter[j] * state.phi_hat[j] + self.q_mom[qm][j],
                cell: j,
                direction: m,
            })?;
            field.avg[c] = sol.avg;
            field.mom[c] = sol.mom;
            let outflow = match closure {
                CellClosure::Nonlinear(_) => {
                    let d = [d[0], sol.avg, d[2], d[3], sol.mom, d[5]];
                    dot6(&closure.row(&d, side, &self.opts), &d)
                }
                _ => sol.outflow_edge,
            };
            if forward {
                field.edge[ebase + j + 1] = outflow;
            } else {
                field.edge[ebase + j] = outflow;
            }
            inflow = outflow;
        }
        field.refresh_ghosts(m);
        Ok(())
    }

    /// Recomputes φ and φ̂ from the angular moments; returns the change
    /// Σ |Δφ_j| Δx_j and the size Σ |φ_j| Δx_j of the new iterate.
    pub fn update_scalar(&self, state: &mut State1D) -> (f64, f64) {
        let n = self.mesh.cells();
        let w = self.quad.weights();
        let mut delta = 0.0;
        let mut size = 0.0;
        for j in 0..n {
            let mut p = 0.0;
            let mut ph = 0.0;
            for (m, wm) in w.iter().enumerate() {
                p += wm * state.field.avg(m, j);
                ph += wm * state.field.mom(m, j);
            }
            delta += (p - state.phi[j]).abs() * self.mesh.dx(j);
            size += p.abs() * self.mesh.dx(j);
            state.phi[j] = p;
            state.phi_hat[j] = ph;
        }
        (delta, size)
    }

    /// One source iteration: sweep every direction, then update φ, φ̂.
    /// Returns the absolute change and size of φ as in [`Self::update_scalar`].
    pub fn iterate_once(&self, state: &mut State1D, order: &[usize]) -> Result<(f64, f64)> {
        for &m in order {
            self.sweep_direction(state, m)?;
        }
        Ok(self.update_scalar(state))
    }

    /// Runs source iteration from `state` until the stopping rule triggers.
    pub fn iterate(&self, state: &mut State1D, control: &IterationControl) -> Result<IterationOutcome> {
        let order: Vec<usize> = (0..self.quad.count()).collect();
        let mut monitor = Monitor::new(control);
        loop {
            let (change, size) = self.iterate_once(state, &order)?;
            if let Some(stop) = monitor.record(change, size)? {
                return Ok(IterationOutcome {
                    stop,
                    seconds: monitor.seconds(),
                    history: monitor.into_history(),
                });
            }
        }
    }

    /// Scalar flux at interfaces: upwind values and one-sided reconstructions.
    pub fn edge_flux(&self, state: &State1D) -> EdgeFlux {
        let n = self.mesh.cells();
        let w = self.quad.weights();
        let mut upwind = vec![0.0; n + 1];
        let mut from_left = vec![0.0; n + 1];
        let mut from_right = vec![0.0; n + 1];
        from_left[0] = f64::NAN;
        from_right[n] = f64::NAN;
        let f = &state.field;
        for (m, wm) in w.iter().enumerate() {
            for i in 0..=n {
                upwind[i] += wm * f.edge(m, i);
            }
            for j in 0..n {
                let c = f.at(m, j);
                let d = [
                    f.avg[c - 1],
                    f.avg[c],
                    f.avg[c + 1],
                    f.mom[c - 1],
                    f.mom[c],
                    f.mom[c + 1],
                ];
                for (side, target, i) in [
                    (Side::RightEdgeMinus, &mut from_left, j + 1),
                    (Side::LeftEdgePlus, &mut from_right, j),
                ] {
                    let row = self.closures[j].row(&d, side, &self.opts);
                    target[i] += wm * dot6(&row, &d);
                }
            }
        }
        EdgeFlux {
            x: self.mesh.edges().to_vec(),
            upwind,
            from_left,
            from_right,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub stop: StopReason,
    pub history: Vec<f64>,
    pub seconds: f64,
}

/// Converged (or stopped) 1D run.
#[derive(Debug, Clone)]
pub struct Solution1D {
    pub report: RunReport,
    pub state: State1D,
}

/// Zero-initialized source iteration until δ < tol or a cap is reached.
pub fn solve_1d(
    problem: &ProblemSpec,
    mesh: &Mesh1D,
    quad: &AngularQuadrature1D,
    control: &IterationControl,
    opts: ReconOptions,
) -> Result<Solution1D> {
    let sweeper = Sweeper1D::new(problem, mesh, quad, opts)?;
    let mut state = sweeper.zero_state();
    let outcome = sweeper.iterate(&mut state, control)?;
    let report = RunReport {
        dimension: 1,
        cells: vec![mesh.cells()],
        epsilon: problem.epsilon,
        converged: outcome.stop == StopReason::Converged,
        stop: outcome.stop,
        iterations: outcome.history.len(),
        seconds: outcome.seconds,
        history: outcome.history,
        x: mesh.centers(),
        y: vec![],
        phi: state.phi.clone(),
        edges: Some(sweeper.edge_flux(&state)),
        errors: None,
    };
    Ok(Solution1D { report, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hweno::Mode;
    use crate::problem::{catalog, PiecewiseField, SourceField};
    use crate::quadrature::gauss_legendre;

    fn solve(id: u32, eps: f64, n: usize, control: IterationControl) -> Solution1D {
        let mut p = catalog(id).unwrap();
        p.epsilon = eps;
        let mesh = p.mesh_1d(n).unwrap();
        let quad = gauss_legendre(p.quadrature).unwrap();
        solve_1d(&p, &mesh, &quad, &control, ReconOptions::default()).unwrap()
    }

    #[test]
    fn zero_inflow_zero_source_local_solve() {
        let sol = local_solve(&LocalProblem {
            mu: 0.3,
            sigma_t: 1.0,
            eps: 0.1,
            dx: 0.1,
            inflow_edge: 0.0,
            closure: OutflowClosure {
                own_avg: 13.0 / 108.0,
                own_mom: 241.0 / 54.0,
                constant: 0.0,
            },
            source: 0.0,
            source_mom: 0.0,
            cell: 0,
            direction: 0,
        })
        .unwrap();
        assert_eq!((sol.avg, sol.mom, sol.outflow_edge), (0.0, 0.0, 0.0));
    }

    #[test]
    fn local_solve_reports_breakdown() {
        // s = 0 and a closure that makes the system singular
        let err = local_solve(&LocalProblem {
            mu: 1.0,
            sigma_t: 0.0,
            eps: 1.0,
            dx: 1.0,
            inflow_edge: 1.0,
            closure: OutflowClosure {
                own_avg: 2.0,
                own_mom: 0.0,
                constant: 0.0,
            },
            source: 0.0,
            source_mom: 0.0,
            cell: 3,
            direction: 7,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Breakdown { cell: 3, direction: 7, .. }));
    }

    #[test]
    fn local_solve_satisfies_its_equations() {
        let p = LocalProblem {
            mu: -0.7,
            sigma_t: 2.0,
            eps: 0.5,
            dx: 0.2,
            inflow_edge: 0.4,
            closure: OutflowClosure {
                own_avg: 0.58,
                own_mom: -4.46,
                constant: 0.31,
            },
            source: 1.3,
            source_mom: -0.2,
            cell: 0,
            direction: 0,
        };
        let sol = local_solve(&p).unwrap();
        let k = p.mu / p.dx;
        let s = p.sigma_t / p.eps;
        let (el, er) = (sol.outflow_edge, p.inflow_edge);
        assert!((k * (er - el) + s * sol.avg - p.source).abs() < 1e-13);
        assert!((k * (0.5 * (er + el) - sol.avg) + s * sol.mom - p.source_mom).abs() < 1e-13);
    }

    #[test]
    fn vacuum_zero_source_is_fixed_point() {
        let mut p = catalog(2).unwrap();
        p.source = SourceField::Piecewise(PiecewiseField::constant(0.0));
        let mesh = Mesh1D::uniform(1.0, 8).unwrap();
        let quad = gauss_legendre(4).unwrap();
        let sw = Sweeper1D::new(&p, &mesh, &quad, ReconOptions::default()).unwrap();
        let mut st = sw.zero_state();
        for m in 0..4 {
            sw.sweep_direction(&mut st, m).unwrap();
        }
        assert_eq!(st, sw.zero_state());
    }

    #[test]
    fn first_sweep_with_ramp_inflow_is_positive() {
        let p = catalog(3).unwrap();
        let mesh = p.mesh_1d(10).unwrap();
        let quad = gauss_legendre(12).unwrap();
        let sw = Sweeper1D::new(&p, &mesh, &quad, ReconOptions::default()).unwrap();
        let mut st = sw.zero_state();
        sw.sweep_direction(&mut st, 11).unwrap();
        assert!(st.field.avg(11, 0) > 0.0);
    }

    #[test]
    fn source_update_example() {
        let p = catalog(2).unwrap();
        let mesh = Mesh1D::uniform(1.0, 5).unwrap();
        let quad = gauss_legendre(2).unwrap();
        let sw = Sweeper1D::new(&p, &mesh, &quad, ReconOptions::default()).unwrap();
        let mut st = sw.zero_state();
        for m in 0..2 {
            for j in 0..5 {
                st.field.set(m, j, 1.0, 0.0);
            }
        }
        sw.update_scalar(&mut st);
        let (s, sh) = sw.update_source(&st, 0);
        for j in 0..5 {
            assert!((s[j] - 0.7).abs() < 1e-15);
            assert!(sh[j].abs() < 1e-15);
        }
        let zero = sw.zero_state();
        let mut p0 = p.clone();
        p0.source = SourceField::Piecewise(PiecewiseField::constant(0.0));
        let sw0 = Sweeper1D::new(&p0, &mesh, &quad, ReconOptions::default()).unwrap();
        let (s, sh) = sw0.update_source(&zero, 1);
        assert!(s.iter().chain(&sh).all(|&v| v == 0.0));
    }

    #[test]
    fn infinite_tolerance_stops_after_one_iteration() {
        let sol = solve(2, 1.0, 10, IterationControl::with_tol(f64::INFINITY));
        assert_eq!(sol.report.iterations, 1);
        assert!(sol.report.converged);
    }

    #[test]
    fn phi_consistent_with_quadrature() {
        let sol = solve(2, 1.0, 10, IterationControl::default());
        let quad = gauss_legendre(12).unwrap();
        for j in 0..10 {
            let s: f64 = (0..12).map(|m| quad.weights()[m] * sol.state.field.avg(m, j)).sum();
            assert!((s - sol.state.phi[j]).abs() <= 1e-13);
        }
    }

    #[test]
    fn manufactured_slab_accuracy_and_iterations() {
        let sol = solve(1, 1.0, 10, IterationControl::default());
        assert!(sol.report.converged);
        let mesh = Mesh1D::uniform(1.0, 10).unwrap();
        let exact = cell_moments_1d(|x| 2.0 * crate::problem::slab_profile(x), &mesh).unwrap();
        let e = crate::report::ErrorNorms::between(&sol.report.phi, &exact.avg, &[0.1; 10]);
        assert!(e.l1 < 1.26e-5 * 3.0 && e.l1 > 1.26e-5 / 3.0, "L1 = {:e}", e.l1);
        let it = sol.report.iterations as f64;
        assert!((it - 60.0).abs() <= 12.0, "iterations {it}");
    }

    #[test]
    fn direction_order_does_not_matter() {
        let p = catalog(4).unwrap();
        let mesh = p.mesh_1d(10).unwrap();
        let quad = gauss_legendre(12).unwrap();
        let sw = Sweeper1D::new(&p, &mesh, &quad, ReconOptions::default()).unwrap();
        let mut a = sw.zero_state();
        let mut b = sw.zero_state();
        let fwd: Vec<usize> = (0..12).collect();
        let rev: Vec<usize> = (0..12).rev().collect();
        for _ in 0..5 {
            sw.iterate_once(&mut a, &fwd).unwrap();
            sw.iterate_once(&mut b, &rev).unwrap();
        }
        assert_eq!(a.field, b.field);
    }

    #[test]
    fn hybrid_equals_linear_on_constant_material() {
        let p = catalog(2).unwrap();
        let mesh = p.mesh_1d(10).unwrap();
        let quad = gauss_legendre(12).unwrap();
        let c = IterationControl::default();
        let h = solve_1d(&p, &mesh, &quad, &c, ReconOptions::default()).unwrap();
        let l = solve_1d(
            &p,
            &mesh,
            &quad,
            &c,
            ReconOptions { mode: Mode::AlwaysLinear, ..Default::default() },
        )
        .unwrap();
        assert_eq!(h.state, l.state);
    }

    #[test]
    fn graded_mesh_uses_cell_closure_at_grading_only() {
        let p = catalog(5).unwrap();
        let mesh = p.mesh_1d(20).unwrap();
        let quad = gauss_legendre(12).unwrap();
        let sw = Sweeper1D::new(&p, &mesh, &quad, ReconOptions::default()).unwrap();
        for (j, c) in sw.closures().iter().enumerate() {
            assert_eq!(*c == CellClosure::CellLinear, j == 9 || j == 10, "cell {j}");
        }
    }

    #[test]
    fn too_few_cells_rejected() {
        let p = catalog(2).unwrap();
        let mesh = Mesh1D::uniform(1.0, 4).unwrap();
        let quad = gauss_legendre(2).unwrap();
        assert!(matches!(
            Sweeper1D::new(&p, &mesh, &quad, ReconOptions::default()),
            Err(Error::Config(_))
        ));
    }
}
