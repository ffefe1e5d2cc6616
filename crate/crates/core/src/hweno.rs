//! Fifth-order Hermite-WENO reconstruction of interface values from a three-cell
//! stencil of cell averages and first moments.
//!
//! Stencil data are ordered `[ψ_{j−1}, ψ_j, ψ_{j+1}, ψ̂_{j−1}, ψ̂_j, ψ̂_{j+1}]`
//! throughout; every candidate is a fixed linear form in these six values.

use serde::{Deserialize, Serialize};

/// Three cell averages and first moments around cell j on a uniform mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub avg: [f64; 3],
    pub mom: [f64; 3],
    pub dx: f64,
}

impl Stencil {
    pub fn data(&self) -> [f64; 6] {
        [self.avg[0], self.avg[1], self.avg[2], self.mom[0], self.mom[1], self.mom[2]]
    }
}

/// Total and scattering cross sections on the same three cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialStencil {
    pub sigma_t: [f64; 3],
    pub sigma_s: [f64; 3],
    pub dx: f64,
}

impl MaterialStencil {
    pub fn uniform(sigma_t: f64, sigma_s: f64, dx: f64) -> Self {
        Self {
            sigma_t: [sigma_t; 3],
            sigma_s: [sigma_s; 3],
            dx,
        }
    }
}

/// Which interface value of cell j is reconstructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Value at x_{j−1/2} from inside the cell.
    LeftEdgePlus,
    /// Value at x_{j+1/2} from inside the cell.
    RightEdgeMinus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Linear weights where the material is constant over the stencil,
    /// nonlinear weights elsewhere.
    #[default]
    Hybrid,
    AlwaysNonlinear,
    AlwaysLinear,
}

/// Pairing of the heterogeneity factors τ0, τ1 with the material jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TauPairing {
    /// τ0 from the (j, j+1) jump, τ1 from the (j−1, j) jump.
    #[default]
    Printed,
    /// τ0 from the (j−1, j) jump, τ1 from the (j, j+1) jump.
    Swapped,
}

/// Treatment of the outflow trace of the first cell downstream of an inflow
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InflowClosure {
    /// Three-cell stencil with an extrapolated ghost cell outside the boundary.
    Ghost,
    /// Quartic through the inflow trace and the moments of the cell and its
    /// downwind neighbour ([`INFLOW_TRACE_ROW`]); no ghost cell is used.
    Trace,
}

/// Outflow trace of a cell next to an inflow boundary, as coefficients of
/// (inflow trace, avg, mom, downwind avg, downwind mom) with moments taken
/// along the sweep direction. Exact for quartics.
pub const INFLOW_TRACE_ROW: [f64; 5] = [0.25, 7.0 / 16.0, 39.0 / 8.0, 5.0 / 16.0, -9.0 / 8.0];

/// Reconstruction settings shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconOptions {
    pub mode: Mode,
    pub eps_tilde: f64,
    pub pairing: TauPairing,
    /// Inflow boundary closure; `None` selects [`InflowClosure::Ghost`] in 1D
    /// and [`InflowClosure::Trace`] in 2D.
    #[serde(default)]
    pub inflow: Option<InflowClosure>,
}

impl Default for ReconOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Hybrid,
            eps_tilde: 1e-6,
            pairing: TauPairing::Printed,
            inflow: None,
        }
    }
}

/// Candidate rows p0, p1, p2 at x_{j−1/2}⁺.
pub const CANDIDATES_LEFT: [[f64; 6]; 3] = [
    [0.5, 0.5, 0.0, 2.0, -2.0, 0.0],
    [0.0, 0.25, 0.75, 0.0, -11.5, -3.5],
    [7.0 / 66.0, 5.0 / 6.0, 2.0 / 33.0, 0.0, -60.0 / 11.0, 0.0],
];

/// Candidate rows p0, p1, p2 at x_{j+1/2}⁻.
pub const CANDIDATES_RIGHT: [[f64; 6]; 3] = [
    [0.75, 0.25, 0.0, 3.5, 11.5, 0.0],
    [0.0, 0.5, 0.5, 0.0, 2.0, -2.0],
    [2.0 / 33.0, 5.0 / 6.0, 7.0 / 66.0, 0.0, 60.0 / 11.0, 0.0],
];

/// Fifth-order row q at x_{j−1/2}⁺.
pub const BIG_LEFT: [f64; 6] = [
    8.0 / 27.0,
    7.0 / 12.0,
    13.0 / 108.0,
    28.0 / 27.0,
    -241.0 / 54.0,
    -25.0 / 54.0,
];

/// Fifth-order row q at x_{j+1/2}⁻.
pub const BIG_RIGHT: [f64; 6] = [
    13.0 / 108.0,
    7.0 / 12.0,
    8.0 / 27.0,
    25.0 / 54.0,
    241.0 / 54.0,
    -28.0 / 27.0,
];

pub const GAMMA_LEFT: [f64; 3] = [14.0 / 27.0, 25.0 / 189.0, 22.0 / 63.0];
pub const GAMMA_RIGHT: [f64; 3] = [25.0 / 189.0, 14.0 / 27.0, 22.0 / 63.0];

pub fn candidate_rows(side: Side) -> &'static [[f64; 6]; 3] {
    match side {
        Side::LeftEdgePlus => &CANDIDATES_LEFT,
        Side::RightEdgeMinus => &CANDIDATES_RIGHT,
    }
}

pub fn big_row(side: Side) -> &'static [f64; 6] {
    match side {
        Side::LeftEdgePlus => &BIG_LEFT,
        Side::RightEdgeMinus => &BIG_RIGHT,
    }
}

pub fn linear_weights(side: Side) -> [f64; 3] {
    match side {
        Side::LeftEdgePlus => GAMMA_LEFT,
        Side::RightEdgeMinus => GAMMA_RIGHT,
    }
}

#[inline]
pub fn dot6(row: &[f64; 6], d: &[f64; 6]) -> f64 {
    row[0] * d[0] + row[1] * d[1] + row[2] * d[2] + row[3] * d[3] + row[4] * d[4] + row[5] * d[5]
}

/// Interface values (p0, p1, p2) of the three Hermite cubic candidates.
pub fn candidate_values(s: &Stencil, side: Side) -> [f64; 3] {
    let d = s.data();
    let rows = candidate_rows(side);
    [dot6(&rows[0], &d), dot6(&rows[1], &d), dot6(&rows[2], &d)]
}

/// Interface value of the fifth-order polynomial over the whole stencil.
pub fn big_value(s: &Stencil, side: Side) -> f64 {
    dot6(big_row(side), &s.data())
}

/// Smoothness indicators (β0, β1, β2) from stencil data `d`.
#[inline]
pub fn smoothness_of(d: &[f64; 6]) -> [f64; 3] {
    let [am, a0, ap, bm, b0, bp] = *d;
    let sq = |x: f64| x * x;
    let beta0 = sq(a0 - am - 54.0 * b0 - 6.0 * bm) / 16.0
        + 39.0 / 16.0 * sq(-5.0 * am + 5.0 * a0 - 38.0 * b0 - 22.0 * bm)
        + 3905.0 / 16.0 * sq(-am + a0 - 6.0 * b0 - 6.0 * bm);
    let beta1 = sq(a0 - ap + 54.0 * b0 + 6.0 * bp) / 16.0
        + 39.0 / 16.0 * sq(-5.0 * ap + 5.0 * a0 + 38.0 * b0 + 22.0 * bp)
        + 3905.0 / 16.0 * sq(-ap + a0 + 6.0 * b0 + 6.0 * bp);
    let beta2 = sq(-am + ap + 240.0 * b0) / 484.0
        + 13.0 / 12.0 * sq(-am + 2.0 * a0 - ap)
        + 355.0 / 44.0 * sq(-ap + am + 24.0 * b0);
    [beta0, beta1, beta2]
}

pub fn smoothness(s: &Stencil) -> [f64; 3] {
    smoothness_of(&s.data())
}

/// Material heterogeneity factors (τ0, τ1, τ2) with the printed pairing.
pub fn heterogeneity_factors(m: &MaterialStencil) -> [f64; 3] {
    heterogeneity_factors_with(m, TauPairing::Printed)
}

pub fn heterogeneity_factors_with(m: &MaterialStencil, pairing: TauPairing) -> [f64; 3] {
    let jump = |a: usize, b: usize| {
        (m.sigma_t[b] - m.sigma_t[a])
            .abs()
            .max((m.sigma_s[b] - m.sigma_s[a]).abs())
            * m.dx
    };
    let right = jump(1, 2);
    let left = jump(0, 1);
    let (t0, t1) = match pairing {
        TauPairing::Printed => (right, left),
        TauPairing::Swapped => (left, right),
    };
    [t0, t1, t0.max(t1)]
}

/// Normalized weights γ_k / (β'_k + ε̃)².
#[inline]
pub fn nonlinear_weights(gamma: [f64; 3], beta_prime: [f64; 3], eps_tilde: f64) -> [f64; 3] {
    let w0 = gamma[0] / ((beta_prime[0] + eps_tilde) * (beta_prime[0] + eps_tilde));
    let w1 = gamma[1] / ((beta_prime[1] + eps_tilde) * (beta_prime[1] + eps_tilde));
    let w2 = gamma[2] / ((beta_prime[2] + eps_tilde) * (beta_prime[2] + eps_tilde));
    let sum = w0 + w1 + w2;
    [w0 / sum, w1 / sum, w2 / sum]
}

/// Whether the linear formula is used for this material stencil and mode.
#[inline]
pub fn uses_linear(mode: Mode, tau2: f64) -> bool {
    match mode {
        Mode::AlwaysLinear => true,
        Mode::AlwaysNonlinear => false,
        Mode::Hybrid => tau2 == 0.0,
    }
}

/// The weights to apply to the candidate rows, or `None` for the linear branch
/// (which evaluates the fifth-order row directly).
#[inline]
pub fn weights_for(d: &[f64; 6], tau: [f64; 3], side: Side, opts: &ReconOptions) -> Option<[f64; 3]> {
    if uses_linear(opts.mode, tau[2]) {
        return None;
    }
    let beta = smoothness_of(d);
    let bp = [tau[0] * beta[0], tau[1] * beta[1], tau[2] * beta[2]];
    Some(nonlinear_weights(linear_weights(side), bp, opts.eps_tilde))
}

/// Combined reconstruction row for the given weights (or the fifth-order row).
#[inline]
pub fn combined_row(side: Side, weights: Option<[f64; 3]>) -> [f64; 6] {
    match weights {
        None => *big_row(side),
        Some(w) => {
            let r = candidate_rows(side);
            let mut out = [0.0; 6];
            for (i, o) in out.iter_mut().enumerate() {
                *o = w[0] * r[0][i] + w[1] * r[1][i] + w[2] * r[2][i];
            }
            out
        }
    }
}

/// Result of a single interface reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    pub value: f64,
    /// Weights on (p0, p1, p2); the linear weights when the linear branch ran.
    pub weights: [f64; 3],
    pub linear: bool,
}

/// Reconstructs the interface value on `side` of the center cell.
pub fn reconstruct(s: &Stencil, m: &MaterialStencil, side: Side, opts: &ReconOptions) -> Reconstruction {
    let d = s.data();
    let tau = heterogeneity_factors_with(m, opts.pairing);
    match weights_for(&d, tau, side, opts) {
        None => Reconstruction {
            value: dot6(big_row(side), &d),
            weights: linear_weights(side),
            linear: true,
        },
        Some(w) => {
            let p = candidate_values(s, side);
            Reconstruction {
                value: w[0] * p[0] + w[1] * p[1] + w[2] * p[2],
                weights: w,
                linear: false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LINEAR: Stencil = Stencil {
        avg: [-1.0, 0.0, 1.0],
        mom: [1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0],
        dx: 1.0,
    };

    /// Exact average and first moment of a polynomial (coefficients in x, low
    /// degree first) over the unit cell centered at `c`.
    fn poly_moments(coef: &[f64], c: f64) -> (f64, f64) {
        let (a, b) = (c - 0.5, c + 0.5);
        let mut avg = 0.0;
        let mut mom = 0.0;
        for (k, &ck) in coef.iter().enumerate() {
            let k = k as i32;
            avg += ck * (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
            mom += ck * ((b.powi(k + 2) - a.powi(k + 2)) / (k + 2) as f64
                - c * (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64);
        }
        (avg, mom)
    }

    fn poly_stencil(coef: &[f64]) -> Stencil {
        let mut s = Stencil { avg: [0.0; 3], mom: [0.0; 3], dx: 1.0 };
        for (i, c) in [-1.0, 0.0, 1.0].iter().enumerate() {
            let (a, m) = poly_moments(coef, *c);
            s.avg[i] = a;
            s.mom[i] = m;
        }
        s
    }

    fn poly_eval(coef: &[f64], x: f64) -> f64 {
        coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    #[test]
    fn candidates_on_constant_data() {
        let s = Stencil { avg: [3.5; 3], mom: [0.0; 3], dx: 0.1 };
        for side in [Side::LeftEdgePlus, Side::RightEdgeMinus] {
            for p in candidate_values(&s, side) {
                assert!((p - 3.5).abs() < 1e-14);
            }
            assert!((big_value(&s, side) - 3.5).abs() < 1e-14);
        }
    }

    #[test]
    fn candidates_on_linear_data() {
        for p in candidate_values(&LINEAR, Side::RightEdgeMinus) {
            assert!((p - 0.5).abs() < 1e-14);
        }
        for p in candidate_values(&LINEAR, Side::LeftEdgePlus) {
            assert!((p + 0.5).abs() < 1e-14);
        }
        assert!((big_value(&LINEAR, Side::RightEdgeMinus) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn smoothness_examples() {
        let c = Stencil { avg: [2.0; 3], mom: [0.0; 3], dx: 1.0 };
        assert_eq!(smoothness(&c), [0.0, 0.0, 0.0]);
        let b = smoothness(&LINEAR);
        for v in b {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn heterogeneity_examples() {
        let right = MaterialStencil { sigma_t: [1.0, 1.0, 100.0], sigma_s: [1.0, 1.0, 100.0], dx: 0.1 };
        let t = heterogeneity_factors(&right);
        assert!((t[0] - 9.9).abs() < 1e-12 && t[1] == 0.0 && (t[2] - 9.9).abs() < 1e-12);
        let left = MaterialStencil { sigma_t: [100.0, 1.0, 1.0], sigma_s: [100.0, 1.0, 1.0], dx: 0.1 };
        let t = heterogeneity_factors(&left);
        assert!(t[0] == 0.0 && (t[1] - 9.9).abs() < 1e-12 && (t[2] - 9.9).abs() < 1e-12);
        let t = heterogeneity_factors_with(&left, TauPairing::Swapped);
        assert!((t[0] - 9.9).abs() < 1e-12 && t[1] == 0.0);
        assert_eq!(heterogeneity_factors(&MaterialStencil::uniform(3.0, 2.0, 0.5)), [0.0; 3]);
    }

    #[test]
    fn nonlinear_weight_examples() {
        assert_eq!(nonlinear_weights(GAMMA_LEFT, [0.0; 3], 1e-6), GAMMA_LEFT);
        let w = nonlinear_weights(GAMMA_LEFT, [1e6, 0.0, 0.0], 1e-6);
        assert!(w[0] < 1e-10);
        assert!((w[1] / w[2] - GAMMA_LEFT[1] / GAMMA_LEFT[2]).abs() < 1e-10);
    }

    #[test]
    fn hybrid_matches_big_value_bitwise_on_constant_material() {
        let s = Stencil { avg: [0.3, -1.2, 4.0], mom: [0.01, 0.2, -0.3], dx: 0.1 };
        let m = MaterialStencil::uniform(1.0, 0.2, 0.1);
        for side in [Side::LeftEdgePlus, Side::RightEdgeMinus] {
            let r = reconstruct(&s, &m, side, &ReconOptions::default());
            assert_eq!(r.value.to_bits(), big_value(&s, side).to_bits());
            let lin = ReconOptions { mode: Mode::AlwaysLinear, ..Default::default() };
            assert_eq!(r.value.to_bits(), reconstruct(&s, &m, side, &lin).value.to_bits());
        }
    }

    #[test]
    fn nonlinear_close_to_big_on_smooth_data() {
        // ψ(x) = sin(x) sampled on cells of width 1/40 around x = 0.3
        let dx = 1.0 / 40.0;
        let f = |x: f64| x.sin();
        let mut s = Stencil { avg: [0.0; 3], mom: [0.0; 3], dx };
        for (i, c) in [0.3 - dx, 0.3, 0.3 + dx].iter().enumerate() {
            let (a, b) = (c - 0.5 * dx, c + 0.5 * dx);
            s.avg[i] = (a.cos() - b.cos()) / dx;
            // ∫ sin(x)(x − c) dx = [−x cos x + sin x + c cos x]
            let g = |x: f64| -x * x.cos() + x.sin() + c * x.cos();
            s.mom[i] = (g(b) - g(a)) / (dx * dx);
        }
        let m = MaterialStencil::uniform(1.0, 1.0, dx);
        let opts = ReconOptions { mode: Mode::AlwaysNonlinear, ..Default::default() };
        for side in [Side::LeftEdgePlus, Side::RightEdgeMinus] {
            let r = reconstruct(&s, &m, side, &opts);
            assert!((r.value - big_value(&s, side)).abs() <= 1e-10);
            let x = if side == Side::LeftEdgePlus { 0.3 - 0.5 * dx } else { 0.3 + 0.5 * dx };
            assert!((r.value - f(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn candidates_reproduce_cubics_and_big_reproduces_quintics() {
        let cubic = [0.3, -1.1, 0.7, 2.5];
        let quintic = [1.0, -0.5, 0.25, 2.0, -1.5, 0.75];
        for side in [Side::LeftEdgePlus, Side::RightEdgeMinus] {
            let x = if side == Side::LeftEdgePlus { -0.5 } else { 0.5 };
            // Candidate k uses cells {j−1, j}, {j, j+1}, {j−1, j, j+1} averages; data
            // outside the candidate stencil does not matter for its value.
            let s = poly_stencil(&cubic);
            for p in candidate_values(&s, side) {
                assert!((p - poly_eval(&cubic, x)).abs() < 1e-12, "{side:?}");
            }
            let s = poly_stencil(&quintic);
            assert!((big_value(&s, side) - poly_eval(&quintic, x)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn gamma_recombines_to_big(d in proptest::array::uniform6(-10.0f64..10.0)) {
            let s = Stencil { avg: [d[0], d[1], d[2]], mom: [d[3], d[4], d[5]], dx: 1.0 };
            for side in [Side::LeftEdgePlus, Side::RightEdgeMinus] {
                let g = linear_weights(side);
                prop_assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                let p = candidate_values(&s, side);
                let comb = g[0] * p[0] + g[1] * p[1] + g[2] * p[2];
                prop_assert!((comb - big_value(&s, side)).abs() < 1e-12);
            }
        }

        #[test]
        fn weights_convex_and_value_in_hull(
            d in proptest::array::uniform6(-10.0f64..10.0),
            st in proptest::array::uniform3(0.1f64..100.0),
        ) {
            let s = Stencil { avg: [d[0], d[1], d[2]], mom: [d[3], d[4], d[5]], dx: 0.1 };
            let m = MaterialStencil { sigma_t: st, sigma_s: st, dx: 0.1 };
            let opts = ReconOptions { mode: Mode::AlwaysNonlinear, ..Default::default() };
            for side in [Side::LeftEdgePlus, Side::RightEdgeMinus] {
                let r = reconstruct(&s, &m, side, &opts);
                prop_assert!(r.weights.iter().all(|&w| w >= 0.0));
                prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                let p = candidate_values(&s, side);
                let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
                prop_assert!(r.value >= lo - slack && r.value <= hi + slack);
            }
        }

        #[test]
        fn smoothness_scales_quadratically(
            d in proptest::array::uniform6(-5.0f64..5.0),
            k in -4.0f64..4.0,
        ) {
            let b = smoothness_of(&d);
            let scaled: [f64; 6] = std::array::from_fn(|i| k * d[i]);
            let bs = smoothness_of(&scaled);
            for i in 0..3 {
                prop_assert!((bs[i] - k * k * b[i]).abs() <= 1e-9 * (1.0 + bs[i].abs()));
            }
        }
    }
}
