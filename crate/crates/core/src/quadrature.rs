//! Gauss–Legendre quadrature, one-dimensional and tensorized over boxes in
//! the unit cube.
//!
//! Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
//! iteration from the Abramowitz–Stegun starting guesses; weights are
//! `2 / ((1 - x^2) P_n'(x)^2)`. An order-`n` rule integrates polynomials of
//! degree `2n - 1` exactly, so order `m + 1` per axis is exact for the
//! degree-`m` basis functions and their tensor products.

use crate::basis::check_dim;
use crate::nd::for_each_multi_index;
use crate::{Error, Result};

/// Legendre `P_n(x)` and its derivative via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature order must be at least 1".into(),
            ));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[n - 1 - k] = x;
            weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        (
            self.nodes.iter().map(|&x| mid + half * x).collect(),
            self.weights.iter().map(|&w| w * half).collect(),
        )
    }
}

/// Tensor Gauss–Legendre integral of `f` over an axis-aligned box, the same
/// order on every axis.
pub fn integrate_box(
    lower: &[f64],
    upper: &[f64],
    order: usize,
    mut f: impl FnMut(&[f64]) -> f64,
) -> Result<f64> {
    check_dim(lower.len(), upper.len())?;
    if lower.is_empty() {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let rule = GaussLegendre::new(order)?;
    let dim = lower.len();
    let mut axis_nodes = Vec::with_capacity(dim);
    let mut axis_weights = Vec::with_capacity(dim);
    for k in 0..dim {
        if lower[k] > upper[k] {
            return Err(Error::InvalidBox(format!(
                "lower {} > upper {} on axis {k}",
                lower[k], upper[k]
            )));
        }
        let (n, w) = rule.mapped(lower[k], upper[k]);
        axis_nodes.push(n);
        axis_weights.push(w);
    }
    let mut total = 0.0;
    let mut point = vec![0.0; dim];
    for_each_multi_index(&vec![order; dim], |idx| {
        let mut w = 1.0;
        for (k, &j) in idx.iter().enumerate() {
            point[k] = axis_nodes[k][j];
            w *= axis_weights[k][j];
        }
        total += w * f(&point);
    });
    Ok(total)
}

/// Tensor Gauss–Legendre integral of `f` over the unit cube.
pub fn integrate_unit_cube(
    dim: usize,
    order: usize,
    f: impl FnMut(&[f64]) -> f64,
) -> Result<f64> {
    integrate_box(&vec![0.0; dim], &vec![1.0; dim], order, f)
}
