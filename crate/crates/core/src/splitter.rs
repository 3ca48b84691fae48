//! Optimal splitting of one data stream over a set of parallel paths.
//!
//! Path `k` moves `z_k` bits in `A_k * z_k` seconds, and the stream is done
//! when its slowest branch is. Minimizing that maximum subject to
//! `Σ z_k = s`, `z ≥ 0` has the closed-form optimum
//!
//! ```text
//! τ* = s / Σ_k (1 / A_k),    z_k = τ* / A_k
//! ```
//!
//! which loads every path to the same completion time. [`bisection_oracle`]
//! solves the same min-max problem by a feasibility search and exists only to
//! cross-check the closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for every split invariant.
pub const SPLIT_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitProblem {
    coefficients: Vec<f64>,
    stream_size: f64,
}

impl SplitProblem {
    /// `coefficients` are per-path seconds per bit; `stream_size` is in bits.
    pub fn new(coefficients: Vec<f64>, stream_size: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidSplitProblem("no paths".into()));
        }
        if let Some(a) = coefficients.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidSplitProblem(format!(
                "path coefficient {a} is not positive"
            )));
        }
        if !(stream_size.is_finite() && stream_size > 0.0) {
            return Err(Error::InvalidSplitProblem(format!(
                "stream size {stream_size} is not positive"
            )));
        }
        Ok(SplitProblem {
            coefficients,
            stream_size,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn stream_size(&self) -> f64 {
        self.stream_size
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSolution {
    /// Bits sent along each path, in problem order.
    #[serde(rename = "z")]
    pub allocations: Vec<f64>,
    /// Completion time of every branch, in seconds.
    #[serde(rename = "tau")]
    pub bottleneck_time: f64,
}

/// Optimal completion time for `bits` over paths whose inverse coefficients
/// sum to `conductance`.
pub fn bottleneck_time(bits: f64, conductance: f64) -> f64 {
    bits / conductance
}

pub fn optimal_split(p: &SplitProblem) -> SplitSolution {
    let conductance: f64 = p.coefficients.iter().map(|a| 1.0 / a).sum();
    let tau = bottleneck_time(p.stream_size, conductance);
    SplitSolution {
        allocations: p.coefficients.iter().map(|a| tau / a).collect(),
        bottleneck_time: tau,
    }
}

/// Smallest `τ` at which loading every path for `τ` seconds moves the whole
/// stream, found by bisection on `[0, s * min_k A_k]`. Stops once the
/// bracket is narrower than `tol` or can no longer shrink in floating point.
pub fn bisection_oracle(p: &SplitProblem, tol: f64) -> f64 {
    assert!(tol > 0.0, "tolerance must be positive");
    let s = p.stream_size;
    let feasible = |tau: f64| p.coefficients.iter().map(|a| tau / a).sum::<f64>() >= s;
    let min_a = p.coefficients.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (0.0_f64, s * min_a);
    // the best single path alone is always feasible
    debug_assert!(feasible(hi));
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// One loaded path of a routed stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// Seconds per bit.
    pub coefficient: f64,
    pub bits: f64,
}

/// How a stream travels between the servers of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Routing<'a> {
    SameServer,
    Branches(&'a [Branch]),
}

/// Transit time of a routed stream: zero when both endpoints share a server,
/// otherwise the completion time of the slowest branch.
pub fn routing_time(routing: Routing<'_>) -> f64 {
    match routing {
        Routing::SameServer => 0.0,
        Routing::Branches(branches) => branches
            .iter()
            .map(|b| b.coefficient * b.bits)
            .fold(0.0, f64::max),
    }
}
