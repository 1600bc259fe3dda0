//! Exact basis-level identities and rate estimates, runnable as checks.
//! These are the library's analytical self-test surface, so every sum here
//! is a plain O(m) loop over a basis row — no reformulations.
//!
//! The four checks:
//!
//! 1. `(i/m - x) b_{i,m}(x) = x(1-x) (b_{i-1,m-1}(x) - b_{i,m-1}(x))`,
//!    exact for every `i`, `m`, `x`.
//! 2. `sum_i |x - i/m| |b_{i-1,m-1}(x) - b_{i,m-1}(x)| = 1/m`
//!    (the binomial variance in disguise).
//! 3. `sum_i |i/m - x| b_{i,m}(x) = 2 x(1-x) b_{i0,m-1}(x)` with
//!    `i0 = floor(m x)`.
//! 4. The first absolute moment is O(1/sqrt(m)) — bounded by the
//!    Cauchy–Schwarz ceiling sqrt(x(1-x)/m) — and the fixed-width tail
//!    mass `sum_{|x - i/m| >= delta} b_{i,m}(x)` is o(1/m), with the
//!    Chebyshev bound x(1-x)/(m delta^2) as a hard ceiling.

use serde::Serialize;

use crate::basis::{basis_row_raw, bern_raw, check_unit_scalar, Degree};
use crate::{Error, Result};

/// Two sides of an identity, kept separate so the residual is inspectable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityResidual {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Check `(i/m - x) b_{i,m}(x) = x(1-x)(b_{i-1,m-1}(x) - b_{i,m-1}(x))`.
pub fn check_prop_a(i: usize, m: Degree, x: f64) -> Result<IdentityResidual> {
    check_unit_scalar(x)?;
    let m = m.get();
    if i > m {
        return Err(Error::InvalidArgument(format!(
            "index {i} exceeds degree {m}"
        )));
    }
    let lhs = (i as f64 / m as f64 - x) * bern_raw(i as i64, m, x);
    let rhs = x * (1.0 - x) * (bern_raw(i as i64 - 1, m - 1, x) - bern_raw(i as i64, m - 1, x));
    Ok(IdentityResidual { lhs, rhs })
}

/// `sum_{i=0}^m |x - i/m| |b_{i-1,m-1}(x) - b_{i,m-1}(x)|`, which equals
/// `1/m` identically on (0, 1) (and, through the zero-extension
/// convention, at the endpoints as well).
pub fn abs_diff_sum(m: Degree, x: f64) -> Result<f64> {
    check_unit_scalar(x)?;
    let m = m.get();
    let sub = basis_row_raw(m - 1, x);
    let mut total = 0.0;
    for i in 0..=m {
        let left = if i >= 1 { sub[i - 1] } else { 0.0 };
        let right = if i < m { sub[i] } else { 0.0 };
        total += (x - i as f64 / m as f64).abs() * (left - right).abs();
    }
    Ok(total)
}

/// First absolute moment both ways: direct summation on the left, the
/// closed form `2 x(1-x) b_{i0,m-1}(x)`, `i0 = floor(m x)` (clamped to
/// `m-1` at `x = 1`), on the right.
pub fn abs_moment_sum(m: Degree, x: f64) -> Result<IdentityResidual> {
    check_unit_scalar(x)?;
    let m = m.get();
    let row = basis_row_raw(m, x);
    let lhs = row
        .iter()
        .enumerate()
        .map(|(i, b)| (i as f64 / m as f64 - x).abs() * b)
        .sum();
    let i0 = ((m as f64 * x).floor() as usize).min(m - 1);
    let rhs = 2.0 * x * (1.0 - x) * bern_raw(i0 as i64, m - 1, x);
    Ok(IdentityResidual { lhs, rhs })
}

/// How a rate table's third column scales its second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateScaling {
    /// `scaled = value * sqrt(m)`
    SqrtM,
    /// `scaled = value * m`
    M,
}

impl RateScaling {
    pub fn apply(self, m: usize, value: f64) -> f64 {
        match self {
            RateScaling::SqrtM => value * (m as f64).sqrt(),
            RateScaling::M => value * m as f64,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RateScaling::SqrtM => "value_times_sqrt_m",
            RateScaling::M => "value_times_m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub m: usize,
    pub value: f64,
    pub scaled: f64,
}

/// A value swept over a strictly increasing degree ladder, with the rate
/// scaling applied alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateTable {
    pub scaling: RateScaling,
    pub rows: Vec<RateRow>,
}

fn check_ladder(degrees: &[Degree]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("no degrees given".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "degrees must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `S(m) = sum_i |i/m - x| b_{i,m}(x)` over a degree ladder, scaled by
/// `sqrt(m)`. The scaled column stays below `sqrt(x(1-x))` (Cauchy–Schwarz
/// against the binomial variance).
pub fn first_abs_moment_rate(degrees: &[Degree], x: f64) -> Result<RateTable> {
    check_unit_scalar(x)?;
    check_ladder(degrees)?;
    let rows = degrees
        .iter()
        .map(|&m| {
            let value = abs_moment_sum(m, x)?.lhs;
            Ok(RateRow {
                m: m.get(),
                value,
                scaled: RateScaling::SqrtM.apply(m.get(), value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable {
        scaling: RateScaling::SqrtM,
        rows,
    })
}

/// Basis mass at distance `delta` or more from `x`:
/// `sum_{|x - i/m| >= delta} b_{i,m}(x)`.
pub fn tail_mass(m: Degree, x: f64, delta: f64) -> Result<f64> {
    check_unit_scalar(x)?;
    if delta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let m = m.get();
    Ok(basis_row_raw(m, x)
        .iter()
        .enumerate()
        .filter(|(i, _)| (x - *i as f64 / m as f64).abs() >= delta)
        .map(|(_, b)| b)
        .sum())
}

/// Tail mass over a degree ladder, scaled by `m`; the scaled column must
/// head to zero (the tail is o(1/m)).
pub fn tail_mass_rate(degrees: &[Degree], x: f64, delta: f64) -> Result<RateTable> {
    check_ladder(degrees)?;
    let rows = degrees
        .iter()
        .map(|&m| {
            let value = tail_mass(m, x, delta)?;
            Ok(RateRow {
                m: m.get(),
                value,
                scaled: RateScaling::M.apply(m.get(), value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable {
        scaling: RateScaling::M,
        rows,
    })
}

/// Chebyshev ceiling for the tail mass, `x(1-x) / (m delta^2)`.
pub fn chebyshev_tail_ceiling(m: Degree, x: f64, delta: f64) -> f64 {
    x * (1.0 - x) / (m.get() as f64 * delta * delta)
}
