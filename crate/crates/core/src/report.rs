//! Run summaries shared by the 1D and 2D solvers and the harness.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization of the iteration change δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaNorm {
    /// δ = Σ |φ_new − φ_old| · (cell size)
    Absolute,
    /// Absolute δ divided by Σ |φ_new| · (cell size).
    #[default]
    Relative,
}

impl DeltaNorm {
    /// δ from the absolute change and the L1 size of the new iterate.
    #[inline]
    pub fn apply(self, change: f64, size: f64) -> f64 {
        match self {
            DeltaNorm::Relative if size > 0.0 => change / size,
            _ => change,
        }
    }
}

/// Stopping rule and iteration cap for source iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationControl {
    /// Stop when δ falls below this.
    pub tol: f64,
    pub max_iter: usize,
    pub norm: DeltaNorm,
    /// Optional wall-clock budget in seconds; exceeding it ends the run unconverged.
    pub time_budget: Option<f64>,
    pub stall: Option<StallRule>,
}

/// Plateau detection: every `window` iterations, the run is stalled when the
/// smallest δ of the last window is not at least `min_drop` (relative) below
/// the smallest δ seen before it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StallRule {
    pub window: usize,
    pub min_drop: f64,
}

impl Default for StallRule {
    fn default() -> Self {
        Self {
            window: 200,
            min_drop: 1e-3,
        }
    }
}

impl Default for IterationControl {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 200_000,
            norm: DeltaNorm::default(),
            time_budget: None,
            stall: None,
        }
    }
}

impl IterationControl {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Applies an [`IterationControl`] to a stream of δ values.
#[derive(Debug, Clone)]
pub struct Monitor {
    control: IterationControl,
    start: Instant,
    history: Vec<f64>,
    best_before: f64,
    best_window: f64,
}

impl Monitor {
    pub fn new(control: &IterationControl) -> Self {
        Self {
            control: *control,
            start: Instant::now(),
            history: Vec::new(),
            best_before: f64::INFINITY,
            best_window: f64::INFINITY,
        }
    }

    /// Records the change and size of one iteration; returns the stop reason
    /// if the loop should end.
    pub fn record(&mut self, change: f64, size: f64) -> Result<Option<StopReason>> {
        let delta = self.control.norm.apply(change, size);
        self.history.push(delta);
        if !delta.is_finite() {
            return Err(Error::Divergence { cell: 0, direction: 0 });
        }
        let k = self.history.len();
        if delta < self.control.tol {
            return Ok(Some(StopReason::Converged));
        }
        if k >= self.control.max_iter {
            return Ok(Some(StopReason::MaxIterations));
        }
        if let Some(rule) = self.control.stall {
            self.best_window = self.best_window.min(delta);
            if rule.window > 0 && k.is_multiple_of(rule.window) {
                let stalled = k >= 2 * rule.window && self.best_window > (1.0 - rule.min_drop) * self.best_before;
                self.best_before = self.best_before.min(self.best_window);
                self.best_window = f64::INFINITY;
                if stalled {
                    return Ok(Some(StopReason::Stalled));
                }
            }
        }
        if let Some(budget) = self.control.time_budget {
            if k.is_multiple_of(16) && self.start.elapsed().as_secs_f64() > budget {
                return Ok(Some(StopReason::TimeBudget));
            }
        }
        Ok(None)
    }

    pub fn seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn into_history(self) -> Vec<f64> {
        self.history
    }
}

/// Why an iteration loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    Stalled,
    TimeBudget,
}

/// Scalar flux at cell interfaces (1D only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeFlux {
    pub x: Vec<f64>,
    /// Upwind interface values: boundary inflow for incoming directions and the
    /// reconstruction from the upwind cell otherwise.
    pub upwind: Vec<f64>,
    /// Σ ω ψ reconstructed from the cell to the left of each interface
    /// (NaN at the left boundary).
    pub from_left: Vec<f64>,
    /// Σ ω ψ reconstructed from the cell to the right of each interface
    /// (NaN at the right boundary).
    pub from_right: Vec<f64>,
}

/// Error norms of the scalar flux cell averages against a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    /// Domain-averaged absolute error Σ |φ − φ_ref| |cell| / |domain|.
    pub l1: f64,
    /// Σ |φ − φ_ref| |cell| without the domain normalization.
    pub l1_sum: f64,
    pub linf: f64,
}

impl ErrorNorms {
    /// Norms for cell averages `phi` against `reference` with cell sizes `size`.
    pub fn between(phi: &[f64], reference: &[f64], size: &[f64]) -> Self {
        let mut l1_sum = 0.0;
        let mut measure = 0.0;
        let mut linf: f64 = 0.0;
        for ((p, r), s) in phi.iter().zip(reference).zip(size) {
            let e = (p - r).abs();
            l1_sum += e * s;
            measure += s;
            linf = linf.max(e);
        }
        let l1 = if measure > 0.0 { l1_sum / measure } else { 0.0 };
        Self { l1, l1_sum, linf }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub dimension: usize,
    pub cells: Vec<usize>,
    pub epsilon: f64,
    pub converged: bool,
    pub stop: StopReason,
    pub iterations: usize,
    pub seconds: f64,
    /// δ after each iteration.
    pub history: Vec<f64>,
    /// Cell-center x coordinates (1D) or x of each cell with x fastest (2D).
    pub x: Vec<f64>,
    /// Cell-center y coordinates, empty in 1D.
    pub y: Vec<f64>,
    /// Scalar flux cell averages.
    pub phi: Vec<f64>,
    pub edges: Option<EdgeFlux>,
    pub errors: Option<ErrorNorms>,
}

impl RunReport {
    pub fn final_delta(&self) -> f64 {
        self.history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn min_phi(&self) -> f64 {
        self.phi.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
