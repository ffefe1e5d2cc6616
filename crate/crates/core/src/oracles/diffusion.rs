//! Limiting diffusion problem −(1/(3σ_t)) φ'' + σ_a φ = Q and its solutions.

use crate::error::{Error, Result};
use crate::quadrature::AngularQuadrature1D;

/// Dirichlet values for the limiting diffusion equation from transport inflow:
/// φ(0) = (4/γ) Σ_{μ>0} μ f ω and φ(L) = (4/γ) Σ_{μ<0} |μ| g ω with
/// γ = 2 Σ_{μ>0} μ ω. `f` and `g` are indexed by direction; only incoming
/// entries are read.
pub fn diffusion_boundary_values(quad: &AngularQuadrature1D, f: &[f64], g: &[f64]) -> (f64, f64) {
    let gamma = quad.gamma();
    let (mu, w) = (quad.ordinates(), quad.weights());
    let left: f64 = quad.positive().map(|m| mu[m] * f[m] * w[m]).sum();
    let right: f64 = quad.negative().map(|m| mu[m].abs() * g[m] * w[m]).sum();
    (4.0 / gamma * left, 4.0 / gamma * right)
}

type Coef = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Slab diffusion problem with Dirichlet boundary values.
pub struct DiffusionProblem {
    pub length: f64,
    pub sigma_t: Coef,
    pub sigma_a: Coef,
    pub q: Coef,
    pub left: f64,
    pub right: f64,
}

impl DiffusionProblem {
    pub fn constant(sigma_t: f64, sigma_a: f64, q: f64, length: f64, bc: (f64, f64)) -> Self {
        Self {
            length,
            sigma_t: Box::new(move |_| sigma_t),
            sigma_a: Box::new(move |_| sigma_a),
            q: Box::new(move |_| q),
            left: bc.0,
            right: bc.1,
        }
    }
}

/// Cell-centered diffusion solution.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSolution {
    pub length: f64,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub left: f64,
    pub right: f64,
}

impl DiffusionSolution {
    /// Piecewise-linear interpolation through the boundary values and cell centers.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            let t = x / self.x[0];
            return self.left + t * (self.phi[0] - self.left);
        }
        if x >= self.x[n - 1] {
            let t = (x - self.x[n - 1]) / (self.length - self.x[n - 1]);
            return self.phi[n - 1] + t * (self.right - self.phi[n - 1]);
        }
        let i = self.x.partition_point(|&c| c <= x) - 1;
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.phi[i] + t * (self.phi[i + 1] - self.phi[i])
    }
}

/// Second-order conservative finite volumes on `n_cells` uniform cells with
/// harmonic-mean face diffusivities and Dirichlet data at the boundary faces.
pub fn diffusion_solve(problem: &DiffusionProblem, n_cells: usize) -> Result<DiffusionSolution> {
    if n_cells < 4 {
        return Err(Error::InvalidArgument(format!(
            "diffusion solve needs at least 4 cells, got {n_cells}"
        )));
    }
    let n = n_cells;
    let h = problem.length / n as f64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let d: Vec<f64> = x.iter().map(|&xi| 1.0 / (3.0 * (problem.sigma_t)(xi))).collect();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        diag[i] = (problem.sigma_a)(x[i]) * h;
        rhs[i] = (problem.q)(x[i]) * h;
        if i > 0 {
            let c = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]) / h;
            diag[i] += c;
            lower[i] = -c;
        } else {
            let c = 2.0 * d[0] / h;
            diag[0] += c;
            rhs[0] += c * problem.left;
        }
        if i + 1 < n {
            let c = 2.0 * d[i] * d[i + 1] / (d[i] + d[i + 1]) / h;
            diag[i] += c;
            upper[i] = -c;
        } else {
            let c = 2.0 * d[n - 1] / h;
            diag[n - 1] += c;
            rhs[n - 1] += c * problem.right;
        }
    }
    let phi = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    Ok(DiffusionSolution {
        length: problem.length,
        x,
        phi,
        left: problem.left,
        right: problem.right,
    })
}

/// Thomas algorithm; `lower[0]` and `upper[n−1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = diag[0];
    if !(piv.abs() > 1e-300) {
        return Err(Error::Breakdown {
            cell: 0,
            direction: 0,
            what: "zero pivot in tridiagonal solve".into(),
        });
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if !(piv.abs() > 1e-300) {
            return Err(Error::Breakdown {
                cell: i,
                direction: 0,
                what: "zero pivot in tridiagonal solve".into(),
            });
        }
        c[i] = if i + 1 < n { upper[i] / piv } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Closed-form solution for constant coefficients on [0, L].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffusionClosedForm {
    /// φ = Q/σ_a + c1 e^{−κx} + c2 e^{−κ(L−x)}
    Exponential { base: f64, kappa: f64, c1: f64, c2: f64, length: f64 },
    /// φ = φ0 + (φL − φ0) x/L + (3 σ_t Q / 2) x (L − x)
    Quadratic { left: f64, right: f64, curvature: f64, length: f64 },
}

impl DiffusionClosedForm {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            DiffusionClosedForm::Exponential { base, kappa, c1, c2, length } => {
                base + c1 * (-kappa * x).exp() + c2 * (-kappa * (length - x)).exp()
            }
            DiffusionClosedForm::Quadratic { left, right, curvature, length } => {
                left + (right - left) * x / length + curvature * x * (length - x)
            }
        }
    }
}

pub fn diffusion_exact_constant(sigma_t: f64, sigma_a: f64, q: f64, length: f64, bc: (f64, f64)) -> DiffusionClosedForm {
    if sigma_a == 0.0 {
        return DiffusionClosedForm::Quadratic {
            left: bc.0,
            right: bc.1,
            curvature: 1.5 * sigma_t * q,
            length,
        };
    }
    let kappa = (3.0 * sigma_t * sigma_a).sqrt();
    let base = q / sigma_a;
    let e = (-kappa * length).exp();
    let (r0, r1) = (bc.0 - base, bc.1 - base);
    // c1 + c2 e = r0, c1 e + c2 = r1
    let det = 1.0 - e * e;
    let c1 = (r0 - e * r1) / det;
    let c2 = (r1 - e * r0) / det;
    DiffusionClosedForm::Exponential {
        base,
        kappa,
        c1,
        c2,
        length,
    }
}

/// Cell averages of the solution of −(1/(3σ_t)) Δφ + σ_a φ = Q on the unit
/// square with zero boundary values, from the double sine series truncated to
/// odd indices up to `terms`.
pub fn square_series_cell_averages(sigma_t: f64, sigma_a: f64, q: f64, n: usize, terms: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let pi = std::f64::consts::PI;
    let d = 1.0 / (3.0 * sigma_t);
    let modes: Vec<usize> = (1..=terms).step_by(2).collect();
    // avg of sin(kπx) over cell i
    let table: Vec<Vec<f64>> = modes
        .iter()
        .map(|&k| {
            let kp = k as f64 * pi;
            (0..n)
                .map(|i| ((kp * i as f64 * h).cos() - (kp * (i + 1) as f64 * h).cos()) / (kp * h))
                .collect()
        })
        .collect();
    let mut out = vec![0.0; n * n];
    for (a, &m) in modes.iter().enumerate() {
        for (b, &k) in modes.iter().enumerate() {
            let (mf, kf) = (m as f64, k as f64);
            let coef = 16.0 * q / (pi * pi * mf * kf * (sigma_a + d * pi * pi * (mf * mf + kf * kf)));
            for j in 0..n {
                let cy = coef * table[b][j];
                for i in 0..n {
                    out[j * n + i] += cy * table[a][i];
                }
            }
        }
    }
    out
}
