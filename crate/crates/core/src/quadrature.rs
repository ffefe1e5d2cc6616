//! Angular quadrature sets for the discrete-ordinates discretization.
//!
//! The 1D set is the M-point Gauss–Legendre rule on [-1, 1]. The 2D set is the
//! tensor product of that rule with itself over (μ, η) ∈ [-1, 1]², so that the
//! scalar flux is the double sum Σ_{m,n} ω_m ω_n ψ(μ_m, η_n) with total weight 4.

use crate::error::{invalid, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX: usize = 100;

/// Evaluates P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1], ascending.
///
/// Only the nonnegative half is computed; the negative half is mirrored so the
/// returned rule is exactly symmetric.
pub(crate) fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let half = n / 2;
    let mut pos_nodes = Vec::with_capacity(half);
    let mut pos_weights = Vec::with_capacity(half);
    let nf = n as f64;
    for i in 1..=half {
        // Chebyshev-like asymptotic guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (nf + 0.5)).cos();
        for _ in 0..NEWTON_MAX {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        pos_nodes.push(x);
        pos_weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    // pos_nodes is descending; the negative half comes out ascending.
    for i in 0..half {
        nodes.push(-pos_nodes[i]);
        weights.push(pos_weights[i]);
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        nodes.push(0.0);
        weights.push(2.0 / (dp * dp));
    }
    for i in (0..half).rev() {
        nodes.push(pos_nodes[i]);
        weights.push(pos_weights[i]);
    }
    (nodes, weights)
}

/// Symmetric 1D ordinate set {μ_m, ω_m}.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularQuadrature1D {
    ordinates: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularQuadrature1D {
    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn count(&self) -> usize {
        self.ordinates.len()
    }

    /// Σ μ_m^k ω_m.
    pub fn moment(&self, k: u32) -> f64 {
        self.ordinates
            .iter()
            .zip(&self.weights)
            .map(|(&mu, &w)| mu.powi(k as i32) * w)
            .sum()
    }

    /// Indices of the directions with μ_m < 0 (the first half, ascending μ).
    pub fn negative(&self) -> std::ops::Range<usize> {
        0..self.count() / 2
    }

    /// Indices of the directions with μ_m > 0 (the second half, ascending μ).
    pub fn positive(&self) -> std::ops::Range<usize> {
        self.count() / 2..self.count()
    }

    /// γ = 2 Σ_{μ>0} μ_m ω_m, which is close to 1 for Gauss–Legendre sets.
    pub fn gamma(&self) -> f64 {
        2.0 * self
            .positive()
            .map(|m| self.ordinates[m] * self.weights[m])
            .sum::<f64>()
    }
}

/// The M-point Gauss–Legendre ordinate set (M even, 2 ≤ M ≤ 64).
pub fn gauss_legendre(m: usize) -> Result<AngularQuadrature1D> {
    if !m.is_multiple_of(2) || !(2..=64).contains(&m) {
        return Err(invalid(format!(
            "quadrature order must be even and in 2..=64, got {m}"
        )));
    }
    let (ordinates, weights) = legendre_rule(m);
    Ok(AngularQuadrature1D { ordinates, weights })
}

/// Σ μ_m^k ω_m for a 1D set.
pub fn moment(quad: &AngularQuadrature1D, k: u32) -> f64 {
    quad.moment(k)
}

/// Sign pattern of a 2D direction: which quadrant of (μ, η) it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrant {
    /// μ > 0, η > 0
    PlusPlus,
    /// μ < 0, η > 0
    MinusPlus,
    /// μ > 0, η < 0
    PlusMinus,
    /// μ < 0, η < 0
    MinusMinus,
}

impl Quadrant {
    /// The sweep orderings (I)–(IV) in their default processing order.
    pub const ALL: [Quadrant; 4] = [
        Quadrant::PlusPlus,
        Quadrant::MinusPlus,
        Quadrant::PlusMinus,
        Quadrant::MinusMinus,
    ];

    pub fn mu_positive(self) -> bool {
        matches!(self, Quadrant::PlusPlus | Quadrant::PlusMinus)
    }

    pub fn eta_positive(self) -> bool {
        matches!(self, Quadrant::PlusPlus | Quadrant::MinusPlus)
    }

    fn index(self) -> usize {
        match self {
            Quadrant::PlusPlus => 0,
            Quadrant::MinusPlus => 1,
            Quadrant::PlusMinus => 2,
            Quadrant::MinusMinus => 3,
        }
    }
}

/// Tensor-product set over (μ, η). Directions are stored grouped by quadrant in
/// the order of [`Quadrant::ALL`], each quadrant holding (M/2)² directions.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularQuadrature2D {
    base: AngularQuadrature1D,
    mu: Vec<f64>,
    eta: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularQuadrature2D {
    pub fn base(&self) -> &AngularQuadrature1D {
        &self.base
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Combined weights ω_m ω_n.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn count(&self) -> usize {
        self.mu.len()
    }

    pub fn quadrant_range(&self, q: Quadrant) -> std::ops::Range<usize> {
        let per = self.count() / 4;
        let start = q.index() * per;
        start..start + per
    }
}

/// Tensor product of `gauss_legendre(m)` with itself.
pub fn product_quadrature(m: usize) -> Result<AngularQuadrature2D> {
    let base = gauss_legendre(m)?;
    let mut mu = Vec::with_capacity(m * m);
    let mut eta = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for q in Quadrant::ALL {
        let ms = if q.mu_positive() {
            base.positive()
        } else {
            base.negative()
        };
        let ns = if q.eta_positive() {
            base.positive()
        } else {
            base.negative()
        };
        for n in ns {
            for mi in ms.clone() {
                mu.push(base.ordinates[mi]);
                eta.push(base.ordinates[n]);
                weights.push(base.weights[mi] * base.weights[n]);
            }
        }
    }
    Ok(AngularQuadrature2D {
        base,
        mu,
        eta,
        weights,
    })
}
