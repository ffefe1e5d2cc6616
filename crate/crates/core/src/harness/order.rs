//! Observed convergence orders between consecutive runs.

use std::fmt;

use serde::{Serialize, Serializer};

/// Observed order of one row relative to the previous one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// First row of a sequence.
    None,
    /// The finer error is exactly zero.
    Exact,
    Value(f64),
}

impl Order {
    /// log(e_coarse / e_fine) / log(scale), where `scale` is the refinement
    /// ratio between the two runs (2 for halved Δx).
    pub fn between(coarse: f64, fine: f64, scale: f64) -> Self {
        if fine == 0.0 {
            return Order::Exact;
        }
        Order::Value((coarse / fine).ln() / scale.ln())
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Order::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::None => write!(f, "-"),
            Order::Exact => write!(f, "exact"),
            Order::Value(v) => write!(f, "{v:.2}"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Value(v) if v.is_finite() => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

/// Orders for errors on successively halved meshes.
pub fn order_table(errors: &[f64]) -> Vec<Order> {
    orders_for(errors, &vec![2.0; errors.len().saturating_sub(1)])
}

/// Orders for errors whose consecutive refinement ratios are `scales`
/// (`scales[i]` relates row i to row i + 1).
pub fn orders_for(errors: &[f64], scales: &[f64]) -> Vec<Order> {
    let mut out = Vec::with_capacity(errors.len());
    for (i, &e) in errors.iter().enumerate() {
        out.push(if i == 0 {
            Order::None
        } else {
            Order::between(errors[i - 1], e, scales[i - 1])
        });
    }
    out
}
