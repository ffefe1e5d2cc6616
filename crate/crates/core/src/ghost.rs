//! One-cell ghost extrapolation at domain boundaries.
//!
//! Cell averages and first moments of a degree-4 polynomial are themselves
//! degree-4 polynomials in the cell center (degree 3 for moments), so the same
//! fifth-order finite-difference extrapolation reproduces both exactly.

use crate::error::{Error, Result};

/// Weights applied to the five interior cells nearest the boundary, nearest first.
pub const GHOST_COEFFS: [f64; 5] = [5.0, -10.0, 10.0, -5.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Left,
    Right,
}

/// Extrapolates one ghost value from `values` (interior cells, left to right).
#[inline]
pub fn extrapolate(values: &[f64], side: Boundary) -> f64 {
    let n = values.len();
    match side {
        Boundary::Left => {
            5.0 * values[0] - 10.0 * values[1] + 10.0 * values[2] - 5.0 * values[3] + values[4]
        }
        Boundary::Right => {
            5.0 * values[n - 1] - 10.0 * values[n - 2] + 10.0 * values[n - 3] - 5.0 * values[n - 4]
                + values[n - 5]
        }
    }
}

/// Ghost (average, moment) on `side` from interior averages and moments.
pub fn ghost_fill(avg: &[f64], mom: &[f64], side: Boundary) -> Result<(f64, f64)> {
    if avg.len() < 5 || mom.len() < 5 {
        return Err(Error::Config(format!(
            "ghost extrapolation needs at least 5 cells, got {}",
            avg.len().min(mom.len())
        )));
    }
    Ok((extrapolate(avg, side), extrapolate(mom, side)))
}
