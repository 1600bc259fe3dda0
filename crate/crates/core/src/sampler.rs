//! The order-statistic sampler: exact draws whose joint CDF is the
//! Bernstein copula of the base copula.
//!
//! One draw works like this. Take `X ~ C` (the base copula must carry an
//! exact sampler) and, independently, `m` iid uniforms per axis. Per axis
//! `r`, sort the uniforms into order statistics and find which of the `m`
//! grid cells `((k-1)/m, k/m]`, `k = 1..=m`, contains `X_r`. The output is
//!
//! ```text
//! Y_r = (the k_r-th order statistic on axis r).
//! ```
//!
//! Then `P(Y_1 < x_1, ..., Y_n < x_n)` equals the degree-m Bernstein
//! approximation of `C` at `x` — each margin is uniform, and the joint law
//! is exactly the smoothed copula. The bridge behind that identity is the
//! duality between order statistics and counting variables: with
//! `N(x) = #{uniforms < x}`, the events `{N(x) >= k}` and
//! `{k-th order statistic < x}` coincide almost surely, and `N(x)` is
//! binomial — the Bernstein kernel. [`ordstat_count_duality_check`]
//! exercises that equivalence directly.
//!
//! Ties among the auxiliary uniforms and grid-line hits by `X` have
//! probability zero; floating point makes them merely rare. Tied rows are
//! re-drawn (bounded budget), and a coordinate exactly on a grid line
//! falls into the cell on its left.
//!
//! Batches derive one RNG stream per draw index from a counter-based
//! generator, so they are reproducible bit for bit regardless of thread
//! count or evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01};
use rayon::prelude::*;

use crate::basis::{check_dim, check_unit_point, Degree};
use crate::copula::Copula;
use crate::operator::BernsteinCopula;
use crate::{Error, Result};

/// How many times a tied auxiliary row is re-drawn before giving up.
pub const REDRAW_BUDGET: usize = 100;

/// A reproducible RNG coordinate: `(seed, stream)` pins the full draw
/// sequence bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngState { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// `#{v in values : v < x}` — the counting variable dual to the order
/// statistics.
pub fn count_below(values: &[f64], x: f64) -> usize {
    values.iter().filter(|&&v| v < x).count()
}

/// Ascending sort; entry `k - 1` is the k-th order statistic.
pub fn order_statistics(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
}

/// Draw `count` uniforms on (0,1), re-drawing until all are distinct.
/// Returns the raw row and its order statistics.
fn distinct_row(
    count: usize,
    axis: usize,
    rng: &mut (impl Rng + ?Sized),
) -> Result<(Vec<f64>, Vec<f64>)> {
    for _ in 0..REDRAW_BUDGET {
        let raw: Vec<f64> = (0..count).map(|_| Open01.sample(rng)).collect();
        let sorted = order_statistics(&raw);
        if sorted.windows(2).all(|w| w[0] < w[1]) {
            return Ok((raw, sorted));
        }
    }
    Err(Error::RedrawBudgetExhausted { axis, count })
}

/// The cell `k in 1..=m` with `(k-1)/m < t <= k/m`; exact grid-line hits
/// land in the left-open cell.
fn cell_index(t: f64, m: usize) -> usize {
    ((t * m as f64).ceil() as usize).clamp(1, m)
}

/// Everything one draw produces: the base point `X ~ C`, the auxiliary
/// uniforms, their per-axis order statistics, and the (1-based) grid cell
/// of each base coordinate.
#[derive(Debug, Clone)]
pub struct AuxiliaryDraw {
    pub base: Vec<f64>,
    pub aux: Vec<Vec<f64>>,
    pub order_stats: Vec<Vec<f64>>,
    pub cell: Vec<usize>,
}

impl AuxiliaryDraw {
    /// The sampled point: per axis, the order statistic whose rank is the
    /// cell index of the base coordinate.
    pub fn selected(&self) -> Vec<f64> {
        self.cell
            .iter()
            .zip(&self.order_stats)
            .map(|(&k, stats)| stats[k - 1])
            .collect()
    }
}

/// One full auxiliary draw from base copula `c` at degree `m`.
pub fn draw_auxiliary(
    c: &dyn Copula,
    m: Degree,
    rng: &mut (impl Rng + ?Sized),
) -> Result<AuxiliaryDraw> {
    let base = c
        .draw(rng)
        .ok_or_else(|| Error::NoSampler(c.descriptor()))?;
    let n = c.dim();
    let mm = m.get();
    let mut aux = Vec::with_capacity(n);
    let mut order_stats = Vec::with_capacity(n);
    for axis in 0..n {
        let (raw, sorted) = distinct_row(mm, axis, rng)?;
        aux.push(raw);
        order_stats.push(sorted);
    }
    let cell = base.iter().map(|&t| cell_index(t, mm)).collect();
    Ok(AuxiliaryDraw {
        base,
        aux,
        order_stats,
        cell,
    })
}

/// One point `Y` whose distribution is the degree-m Bernstein copula of
/// `c`. Requires an exact sampler on `c`.
pub fn order_stat_draw(
    c: &dyn Copula,
    m: Degree,
    rng: &mut (impl Rng + ?Sized),
) -> Result<Vec<f64>> {
    Ok(draw_auxiliary(c, m, rng)?.selected())
}

/// A batch of draws with full RNG provenance.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub points: Vec<Vec<f64>>,
    pub dim: usize,
    pub m: Degree,
    pub seed: u64,
    pub family: String,
    pub theta: Option<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Matches [`Copula::descriptor`] of the base copula.
    pub fn descriptor(&self) -> String {
        crate::copula::format_descriptor(&self.family, self.theta)
    }
}

/// `count` independent draws; draw `i` uses stream `i` of `seed`, so the
/// batch is identical no matter how the work is scheduled.
pub fn sample_batch(c: &dyn Copula, m: Degree, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let points: Vec<Vec<f64>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngState::new(seed, i as u64).rng();
            order_stat_draw(c, m, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(SampleBatch {
        points,
        dim: c.dim(),
        m,
        seed,
        family: c.name(),
        theta: c.parameter(),
    })
}

/// Empirical strict CDF of a batch against the model CDF, point by point.
#[derive(Debug, Clone)]
pub struct CdfTestReport {
    pub test_points: Vec<Vec<f64>>,
    pub empirical: Vec<f64>,
    pub model: Vec<f64>,
    pub max_abs_dev: f64,
    pub n_samples: usize,
}

/// Compare the batch's empirical strict CDF (`Y_r < x_r` on every axis,
/// matching the sampled law's atom-free strict-inequality statement) with
/// the Bernstein copula's CDF at each test point. The batch and model must
/// describe the same base copula and degree.
pub fn cdf_agreement_test(
    batch: &SampleBatch,
    model: &BernsteinCopula,
    test_points: &[Vec<f64>],
) -> Result<CdfTestReport> {
    if test_points.is_empty() {
        return Err(Error::InvalidArgument("no test points given".into()));
    }
    if batch.m != model.m() || batch.dim != model.dim() {
        return Err(Error::BatchMismatch(format!(
            "batch is {}-dimensional at degree {}, model {}-dimensional at degree {}",
            batch.dim,
            batch.m,
            model.dim(),
            model.m()
        )));
    }
    if batch.descriptor() != model.grid().source() {
        return Err(Error::BatchMismatch(format!(
            "batch drawn from '{}', model built from '{}'",
            batch.descriptor(),
            model.grid().source()
        )));
    }
    let n = batch.len() as f64;
    let mut empirical = Vec::with_capacity(test_points.len());
    let mut model_values = Vec::with_capacity(test_points.len());
    let mut max_abs_dev = 0.0f64;
    for point in test_points {
        check_dim(batch.dim, point.len())?;
        check_unit_point(point)?;
        let hits = batch
            .points
            .iter()
            .filter(|y| y.iter().zip(point).all(|(yr, xr)| yr < xr))
            .count();
        let emp = hits as f64 / n;
        let mv = model.cdf_unchecked(point);
        max_abs_dev = max_abs_dev.max((emp - mv).abs());
        empirical.push(emp);
        model_values.push(mv);
    }
    Ok(CdfTestReport {
        test_points: test_points.to_vec(),
        empirical,
        model: model_values,
        max_abs_dev,
        n_samples: batch.len(),
    })
}

/// Randomized check of the counting/order-statistic duality:
/// `#{uniforms < x} >= k` iff `(k-th order statistic) < x`, for every
/// `k = 1..=m`. True iff no trial violates it.
pub fn ordstat_count_duality_check(
    m: Degree,
    trials: usize,
    rng: &mut (impl Rng + ?Sized),
) -> Result<bool> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mm = m.get();
    for _ in 0..trials {
        let x: f64 = Open01.sample(rng);
        let (raw, sorted) = distinct_row(mm, 0, rng)?;
        let count = count_below(&raw, x);
        for k in 1..=mm {
            if (count >= k) != (sorted[k - 1] < x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Chi-square statistic of `values` against the uniform law on equal-width
/// bins; compare against a chi-square quantile with `bins - 1` degrees of
/// freedom.
pub fn chi_square_uniform_stat(values: &[f64], bins: usize) -> f64 {
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = ((v * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = values.len() as f64 / bins as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}
