//! One-dimensional and tensor-product Bernstein basis functions.
//!
//! The degree-`m` basis on `[0, 1]` is
//!
//! ```text
//! b_{i,m}(t) = C(m, i) t^i (1 - t)^(m-i),   i = 0, 1, ..., m,
//! ```
//!
//! the probability mass P(Binomial(m, t) = i), hence nonnegative and a
//! partition of unity. The tensor-product basis on the unit cube is the
//! product of one-dimensional factors, one per axis.
//!
//! Indices outside `0..=m` evaluate to exactly zero. That zero-extension
//! convention lets the derivative relation
//!
//! ```text
//! b'_{i,m} = m (b_{i-1,m-1} - b_{i,m-1})
//! ```
//!
//! hold for every `i` without edge cases, and the same convention carries
//! through the density and partial-derivative formulas built on it.
//!
//! Evaluation switches scheme on the degree: up to [`DIRECT_DEGREE_MAX`] a
//! cached floating-point Pascal row and direct powers are exact and cheap;
//! above that, log-space evaluation through `ln_gamma` keeps the computation
//! overflow-free to degree 1000 and beyond.

use std::fmt;
use std::sync::LazyLock;

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Largest degree evaluated by direct binomial arithmetic; higher degrees
/// go through log-space.
pub const DIRECT_DEGREE_MAX: usize = 60;

/// Polynomial degree `m >= 1`; the per-axis grid has `m + 1` nodes and `m`
/// cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree(usize);

impl Degree {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDegree(m));
        }
        Ok(Degree(m))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Number of grid nodes per axis, `m + 1`.
    #[inline]
    pub fn nodes(self) -> usize {
        self.0 + 1
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<usize> for Degree {
    type Error = Error;

    fn try_from(m: usize) -> Result<Self> {
        Degree::new(m)
    }
}

/// Pascal rows 0..=DIRECT_DEGREE_MAX, built once.
static PASCAL: LazyLock<Vec<Vec<f64>>> = LazyLock::new(|| {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(DIRECT_DEGREE_MAX + 1);
    rows.push(vec![1.0]);
    for m in 1..=DIRECT_DEGREE_MAX {
        let prev = &rows[m - 1];
        let mut row = vec![1.0; m + 1];
        for i in 1..m {
            row[i] = prev[i - 1] + prev[i];
        }
        rows.push(row);
    }
    rows
});

#[inline]
fn ln_binomial(m: usize, i: usize) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(i as f64 + 1.0) - ln_gamma((m - i) as f64 + 1.0)
}

pub(crate) fn check_unit_scalar(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::PointOutOfRange { index: 0, value: t });
    }
    Ok(())
}

pub(crate) fn check_unit_point(x: &[f64]) -> Result<()> {
    for (index, &value) in x.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::PointOutOfRange { index, value });
        }
    }
    Ok(())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `b_{i,m}(t)` for any integer index; exactly 0 outside `0..=m`.
/// Accepts degree 0 (`b_{0,0} = 1`), which the difference formulas need.
/// Caller guarantees `t` in `[0, 1]`.
pub(crate) fn bern_raw(i: i64, m: usize, t: f64) -> f64 {
    if i < 0 || i as usize > m {
        return 0.0;
    }
    let i = i as usize;
    // t = 0 and t = 1 are handled exactly so that 0^0 never arises.
    if t == 0.0 {
        return if i == 0 { 1.0 } else { 0.0 };
    }
    if t == 1.0 {
        return if i == m { 1.0 } else { 0.0 };
    }
    if m <= DIRECT_DEGREE_MAX {
        PASCAL[m][i] * t.powi(i as i32) * (1.0 - t).powi((m - i) as i32)
    } else {
        // ln(1 - t) via ln_1p keeps accuracy for t near 1.
        let ln_b = ln_binomial(m, i) + i as f64 * t.ln() + (m - i) as f64 * (-t).ln_1p();
        ln_b.exp()
    }
}

/// All of `b_{0,m}(t), ..., b_{m,m}(t)`. Degree 0 gives `[1.0]`.
pub(crate) fn basis_row_raw(m: usize, t: f64) -> Vec<f64> {
    if t == 0.0 {
        let mut row = vec![0.0; m + 1];
        row[0] = 1.0;
        return row;
    }
    if t == 1.0 {
        let mut row = vec![0.0; m + 1];
        row[m] = 1.0;
        return row;
    }
    (0..=m).map(|i| bern_raw(i as i64, m, t)).collect()
}

/// Difference weights `b_{i-1,m-1}(t) - b_{i,m-1}(t)` for `i = 0..=m`,
/// with the zero-extension convention at both ends. Multiplying by `m`
/// gives the derivative weights `b'_{i,m}(t)`.
pub(crate) fn deriv_weight_row(m: usize, t: f64) -> Vec<f64> {
    let sub = basis_row_raw(m - 1, t);
    (0..=m)
        .map(|i| {
            let left = if i >= 1 { sub[i - 1] } else { 0.0 };
            let right = if i < m { sub[i] } else { 0.0 };
            left - right
        })
        .collect()
}

/// Evaluate `b_{i,m}(t)`.
///
/// `i` may be any integer; values outside `0..=m` return exactly 0.
pub fn bernstein_1d(i: i64, m: Degree, t: f64) -> Result<f64> {
    check_unit_scalar(t)?;
    Ok(bern_raw(i, m.get(), t))
}

/// Evaluate `b'_{i,m}(t) = m (b_{i-1,m-1}(t) - b_{i,m-1}(t))`.
pub fn bernstein_1d_derivative(i: i64, m: Degree, t: f64) -> Result<f64> {
    check_unit_scalar(t)?;
    let m = m.get();
    Ok(m as f64 * (bern_raw(i - 1, m - 1, t) - bern_raw(i, m - 1, t)))
}

/// Evaluate the tensor-product basis `B_{i,m}(x) = prod_k b_{i_k,m}(x_k)`.
pub fn bernstein_nd(indices: &[i64], m: Degree, x: &[f64]) -> Result<f64> {
    check_dim(indices.len(), x.len())?;
    check_unit_point(x)?;
    let m = m.get();
    Ok(indices
        .iter()
        .zip(x)
        .map(|(&i, &t)| bern_raw(i, m, t))
        .product())
}

/// The exact integral of any tensor basis function over the unit cube,
/// `1 / (m + 1)^n`. Serves as the oracle target for quadrature checks.
pub fn basis_integral_value(n: usize, m: Degree) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    Ok((m.get() as f64 + 1.0).powi(-(n as i32)))
}

/// All basis values of one degree at one point, `i = 0..=m`.
pub fn basis_row(m: Degree, t: f64) -> Result<Vec<f64>> {
    check_unit_scalar(t)?;
    Ok(basis_row_raw(m.get(), t))
}
