//! Copula abstractions: the evaluation trait, the built-in analytic
//! families, difference operators, and box (C-volume) computations.
//!
//! A copula is an n-variate CDF on the unit cube that is grounded (zero
//! whenever some coordinate is zero), has uniform margins, and is
//! n-increasing (every axis-aligned box carries nonnegative mass). The
//! built-in families:
//!
//! * `independence` — `C(x) = prod x_k`, any dimension
//! * `min`          — the upper Fréchet–Hoeffding bound `min_k x_k`
//! * `w2`           — the lower Fréchet–Hoeffding bound
//!                    `max(u + v - 1, 0)`, a copula only for n = 2
//! * `fgm(theta)`   — Farlie–Gumbel–Morgenstern,
//!                    `prod x_k * (1 + theta * prod (1 - x_k))`, |theta| <= 1
//! * `clayton(theta)` — `(sum x_k^-theta - n + 1)^(-1/theta)`, theta > 0
//!
//! Each family evaluates analytically and carries analytic first partials;
//! all of them except n >= 3 FGM also carry an exact sampler of their
//! measure, which the order-statistic sampler requires.

use rand::RngCore;
use rand_distr::{Distribution, Exp, Gamma, Open01};

use crate::basis::{check_dim, check_unit_point};
use crate::{Error, Result, MAX_DIM};

/// Format "name" or "name(theta)" consistently; sample batches and sampled
/// grids both record this string.
pub(crate) fn format_descriptor(name: &str, parameter: Option<f64>) -> String {
    match parameter {
        Some(t) => format!("{name}({t})"),
        None => name.to_string(),
    }
}

/// An evaluable n-variate copula.
///
/// `cdf_unchecked` assumes a point of the right length inside the unit
/// cube; the checked wrappers validate and should be used at API
/// boundaries. Analytic partials and exact samplers are optional
/// capabilities.
pub trait Copula: Send + Sync {
    fn dim(&self) -> usize;

    /// Short family name, e.g. `"clayton"`.
    fn name(&self) -> String;

    /// Family parameter, if any.
    fn parameter(&self) -> Option<f64> {
        None
    }

    /// `"name"` or `"name(theta)"`.
    fn descriptor(&self) -> String {
        format_descriptor(&self.name(), self.parameter())
    }

    fn cdf_unchecked(&self, x: &[f64]) -> f64;

    fn cdf(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_unit_point(x)?;
        Ok(self.cdf_unchecked(x))
    }

    /// Analytic `dC/dx_axis`, if the copula provides one. `axis` is
    /// zero-based and already validated.
    fn partial_unchecked(&self, _axis: usize, _x: &[f64]) -> Option<f64> {
        None
    }

    fn has_partials(&self) -> bool {
        false
    }

    fn partial(&self, axis: usize, x: &[f64]) -> Result<f64> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        check_dim(self.dim(), x.len())?;
        check_unit_point(x)?;
        self.partial_unchecked(axis, x)
            .ok_or_else(|| Error::MissingPartial(self.descriptor()))
    }

    /// One exact draw from the copula's measure, if a sampler exists.
    fn draw(&self, _rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        None
    }

    fn has_sampler(&self) -> bool {
        false
    }
}

/// The built-in analytic families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Independence { dim: usize },
    Min { dim: usize },
    W2,
    Fgm { dim: usize, theta: f64 },
    Clayton { dim: usize, theta: f64 },
}

impl Family {
    /// Build a family from its CLI name. `w2` requires `dim == 2`; `fgm`
    /// takes `theta` in `[-1, 1]`; `clayton` takes `theta > 0`.
    pub fn new(name: &str, theta: Option<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "dimension must be at least 1".into(),
            ));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        let need_dim2 = |family: &'static str| {
            if dim != 2 {
                Err(Error::InvalidParameter {
                    family,
                    message: format!("only defined for n = 2, got n = {dim}"),
                })
            } else {
                Ok(())
            }
        };
        match name {
            "independence" => Ok(Family::Independence { dim }),
            "min" => Ok(Family::Min { dim }),
            "w2" => {
                need_dim2("w2")?;
                Ok(Family::W2)
            }
            "fgm" => {
                if dim < 2 {
                    return Err(Error::InvalidParameter {
                        family: "fgm",
                        message: format!("needs n >= 2, got n = {dim}"),
                    });
                }
                let theta = theta.ok_or(Error::InvalidParameter {
                    family: "fgm",
                    message: "theta is required".into(),
                })?;
                if !(-1.0..=1.0).contains(&theta) {
                    return Err(Error::InvalidParameter {
                        family: "fgm",
                        message: format!("theta must lie in [-1, 1], got {theta}"),
                    });
                }
                Ok(Family::Fgm { dim, theta })
            }
            "clayton" => {
                if dim < 2 {
                    return Err(Error::InvalidParameter {
                        family: "clayton",
                        message: format!("needs n >= 2, got n = {dim}"),
                    });
                }
                let theta = theta.ok_or(Error::InvalidParameter {
                    family: "clayton",
                    message: "theta is required".into(),
                })?;
                if !(theta > 0.0) || !theta.is_finite() {
                    return Err(Error::InvalidParameter {
                        family: "clayton",
                        message: format!("theta must be positive, got {theta}"),
                    });
                }
                Ok(Family::Clayton { dim, theta })
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl Copula for Family {
    fn dim(&self) -> usize {
        match self {
            Family::Independence { dim } | Family::Min { dim } => *dim,
            Family::W2 => 2,
            Family::Fgm { dim, .. } | Family::Clayton { dim, .. } => *dim,
        }
    }

    fn name(&self) -> String {
        match self {
            Family::Independence { .. } => "independence",
            Family::Min { .. } => "min",
            Family::W2 => "w2",
            Family::Fgm { .. } => "fgm",
            Family::Clayton { .. } => "clayton",
        }
        .to_string()
    }

    fn parameter(&self) -> Option<f64> {
        match self {
            Family::Fgm { theta, .. } | Family::Clayton { theta, .. } => Some(*theta),
            _ => None,
        }
    }

    fn cdf_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Family::Independence { .. } => x.iter().product(),
            Family::Min { .. } => x.iter().copied().fold(1.0, f64::min),
            Family::W2 => (x[0] + x[1] - 1.0).max(0.0),
            Family::Fgm { theta, .. } => {
                let p: f64 = x.iter().product();
                let q: f64 = x.iter().map(|&u| 1.0 - u).product();
                p * (1.0 + theta * q)
            }
            Family::Clayton { dim, theta } => {
                if x.iter().any(|&u| u == 0.0) {
                    return 0.0;
                }
                let s: f64 = x.iter().map(|&u| u.powf(-theta)).sum::<f64>() - (*dim as f64 - 1.0);
                s.powf(-1.0 / theta)
            }
        }
    }

    fn partial_unchecked(&self, axis: usize, x: &[f64]) -> Option<f64> {
        let value = match self {
            Family::Independence { .. } => {
                x.iter().enumerate().filter(|(k, _)| *k != axis).map(|(_, &u)| u).product()
            }
            Family::Min { .. } => {
                // 1 where x_axis is strictly the smallest, 0 where strictly
                // larger; the tie set has measure zero and gets 0.
                let others = x
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != axis)
                    .map(|(_, &u)| u)
                    .fold(1.0, f64::min);
                if x[axis] < others {
                    1.0
                } else {
                    0.0
                }
            }
            Family::W2 => {
                if x[0] + x[1] > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Fgm { theta, .. } => {
                let p_rest: f64 = x
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != axis)
                    .map(|(_, &u)| u)
                    .product();
                let q_rest: f64 = x
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != axis)
                    .map(|(_, &u)| 1.0 - u)
                    .product();
                p_rest * (1.0 + theta * (1.0 - 2.0 * x[axis]) * q_rest)
            }
            Family::Clayton { dim, theta } => {
                if x.iter().enumerate().any(|(k, &u)| k != axis && u == 0.0) {
                    return Some(0.0);
                }
                if x[axis] == 0.0 {
                    // limit of u^(-t-1) (u^-t + c)^(-(1+t)/t) as u -> 0 is 1
                    // when every other coordinate is positive
                    return Some(1.0);
                }
                let s: f64 = x.iter().map(|&u| u.powf(-theta)).sum::<f64>() - (*dim as f64 - 1.0);
                x[axis].powf(-theta - 1.0) * s.powf(-1.0 / theta - 1.0)
            }
        };
        Some(value)
    }

    fn has_partials(&self) -> bool {
        true
    }

    fn draw(&self, rng: &mut dyn RngCore) -> Option<Vec<f64>> {
        match self {
            Family::Independence { dim } => {
                Some((0..*dim).map(|_| Open01.sample(rng)).collect())
            }
            Family::Min { dim } => {
                let u: f64 = Open01.sample(rng);
                Some(vec![u; *dim])
            }
            Family::W2 => {
                let u: f64 = Open01.sample(rng);
                Some(vec![u, 1.0 - u])
            }
            Family::Fgm { dim, theta } => {
                if *dim != 2 {
                    return None;
                }
                let u: f64 = Open01.sample(rng);
                let p: f64 = Open01.sample(rng);
                // Invert the conditional CDF C_u(v) = (1+a) v - a v^2 with
                // a = theta (1 - 2u); the root that tends to p as a -> 0 is
                // v = 2p / (1 + a + sqrt((1+a)^2 - 4ap)).
                let a = theta * (1.0 - 2.0 * u);
                let v = if a.abs() < 1e-12 {
                    p
                } else {
                    let b = 1.0 + a;
                    2.0 * p / (b + (b * b - 4.0 * a * p).sqrt())
                };
                Some(vec![u, v.clamp(f64::MIN_POSITIVE, 1.0)])
            }
            Family::Clayton { dim, theta } => {
                // Gamma-frailty mixture: W ~ Gamma(1/theta, 1),
                // U_k = (1 + E_k / W)^(-1/theta) with E_k ~ Exp(1).
                let gamma = Gamma::new(1.0 / theta, 1.0).ok()?;
                let exp = Exp::new(1.0).ok()?;
                let w: f64 = gamma.sample(rng);
                Some(
                    (0..*dim)
                        .map(|_| {
                            let e: f64 = exp.sample(rng);
                            (1.0 + e / w).powf(-1.0 / theta)
                        })
                        .collect(),
                )
            }
        }
    }

    fn has_sampler(&self) -> bool {
        !matches!(self, Family::Fgm { dim, .. } if *dim != 2)
    }
}

/// First difference of `g` at `p` along displacement `v`:
/// `g(p + v) - g(p)`. Both endpoints must lie in the unit cube.
pub fn delta_along(g: impl Fn(&[f64]) -> f64, v: &[f64], p: &[f64]) -> Result<f64> {
    check_dim(p.len(), v.len())?;
    check_unit_point(p)?;
    let q: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + b).collect();
    check_unit_point(&q).map_err(|_| {
        Error::InvalidBox("p + v leaves the unit cube".into())
    })?;
    Ok(g(&q) - g(p))
}

/// An axis-aligned box inside the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl UnitBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidBox("box must have dimension >= 1".into()));
        }
        check_unit_point(&lower)?;
        check_unit_point(&upper)?;
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo > hi {
                return Err(Error::InvalidBox(format!(
                    "lower {lo} > upper {hi} on axis {k}"
                )));
            }
        }
        Ok(UnitBox { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// C-volume of a box: the 2^n-term inclusion–exclusion sum of corner
/// values, the composition of one first difference per axis. Nonnegative
/// (up to roundoff) exactly when `c` is n-increasing over the box.
pub fn c_volume(c: &dyn Copula, bx: &UnitBox) -> Result<f64> {
    check_dim(c.dim(), bx.dim())?;
    let n = bx.dim();
    let mut corner = vec![0.0; n];
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        let mut ones = 0usize;
        for (k, slot) in corner.iter_mut().enumerate() {
            if mask >> k & 1 == 1 {
                *slot = bx.upper()[k];
                ones += 1;
            } else {
                *slot = bx.lower()[k];
            }
        }
        let sign = if (n - ones) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * c.cdf_unchecked(&corner);
    }
    Ok(total)
}
