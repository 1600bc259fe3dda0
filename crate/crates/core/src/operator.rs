//! The tensor-product Bernstein approximation operator, the Bernstein
//! copula it produces, its density and first partial derivatives, and the
//! convergence diagnostics.
//!
//! For a grid of values `f(i/m)` the operator is
//!
//! ```text
//! B_m(f)(x) = sum_i f(i/m) b_{i_1,m}(x_1) ... b_{i_n,m}(x_n).
//! ```
//!
//! Evaluation builds one basis-weight vector per axis and contracts the
//! value tensor against them axis by axis, so a point costs about
//! `n*m + (m+1)^n` operations rather than `(m+1)^n * n` basis evaluations.
//!
//! Applied to a copula the operator yields another copula whose density is
//!
//! ```text
//! m^n sum_j (cell mass of j) b_{j_1,m-1}(x_1) ... b_{j_n,m-1}(x_n),
//! ```
//!
//! manifestly nonnegative when every cell mass is, and whose first partial
//! along axis k replaces that axis's weights by the difference weights
//! `b_{i-1,m-1} - b_{i,m-1}` (times `m`).

use std::time::{Duration, Instant};

use crate::basis::{basis_row_raw, check_dim, check_unit_point, deriv_weight_row, Degree};
use crate::copula::Copula;
use crate::grid::{validate_copula, validate_with_deltas, DeltaTensor, GridCopula, ValidityReport};
use crate::nd::contract;
use crate::{Error, Result};

/// Tolerance at which grids sampled from analytic copulas must validate.
pub const VALIDITY_TOL: f64 = 1e-10;

/// Evaluate the Bernstein approximation of a grid at one point.
pub fn bernstein_approx(grid: &GridCopula, x: &[f64]) -> Result<f64> {
    check_dim(grid.dim(), x.len())?;
    check_unit_point(x)?;
    Ok(approx_unchecked(grid, x))
}

pub(crate) fn approx_unchecked(grid: &GridCopula, x: &[f64]) -> f64 {
    let m = grid.m().get();
    let rows: Vec<Vec<f64>> = x.iter().map(|&t| basis_row_raw(m, t)).collect();
    contract(grid.values(), &rows)
}

/// A Bernstein copula: the sampled grid plus its cached cell masses.
/// Usable as a [`Copula`] in its own right (and so can be re-sampled,
/// re-approximated, or validity-checked like any other).
#[derive(Debug, Clone)]
pub struct BernsteinCopula {
    grid: GridCopula,
    deltas: DeltaTensor,
}

impl BernsteinCopula {
    /// Sample an analytic copula and assert the grid validates at
    /// [`VALIDITY_TOL`]; a failure signals a non-copula input.
    pub fn from_copula(c: &dyn Copula, m: Degree) -> Result<Self> {
        let grid = GridCopula::sample(c, m)?;
        let (b, report) = Self::from_grid(grid);
        if !report.is_copula_within(VALIDITY_TOL) {
            return Err(Error::validity(b.grid.source(), VALIDITY_TOL, &report));
        }
        Ok(b)
    }

    /// Wrap a grid without asserting validity (the route for empirical
    /// grids, which are only approximately copulas); the report is
    /// returned for the caller to inspect.
    pub fn from_grid(grid: GridCopula) -> (Self, ValidityReport) {
        let deltas = DeltaTensor::from_grid(&grid);
        let report = validate_with_deltas(&grid, &deltas);
        (BernsteinCopula { grid, deltas }, report)
    }

    pub fn m(&self) -> Degree {
        self.grid.m()
    }

    pub fn grid(&self) -> &GridCopula {
        &self.grid
    }

    pub fn deltas(&self) -> &DeltaTensor {
        &self.deltas
    }

    /// The density `m^n sum_j mass_j prod_k b_{j_k,m-1}(x_k)`; nonnegative
    /// whenever every cell mass is, and integrating to the total mass.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_unit_point(x)?;
        Ok(self.density_unchecked(x))
    }

    pub(crate) fn density_unchecked(&self, x: &[f64]) -> f64 {
        let m = self.m().get();
        let rows: Vec<Vec<f64>> = x.iter().map(|&t| basis_row_raw(m - 1, t)).collect();
        (m as f64).powi(self.dim() as i32) * contract(self.deltas.masses(), &rows)
    }

    /// First partial derivative along `axis` (zero-based):
    /// `m sum_i f(i/m) (b_{i_k-1,m-1} - b_{i_k,m-1}) prod_{r!=k} b_{i_r,m}`.
    pub fn partial_derivative(&self, axis: usize, x: &[f64]) -> Result<f64> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        check_dim(self.dim(), x.len())?;
        check_unit_point(x)?;
        Ok(self.partial_derivative_unchecked(axis, x))
    }

    pub(crate) fn partial_derivative_unchecked(&self, axis: usize, x: &[f64]) -> f64 {
        let m = self.m().get();
        let rows: Vec<Vec<f64>> = x
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                if k == axis {
                    deriv_weight_row(m, t)
                } else {
                    basis_row_raw(m, t)
                }
            })
            .collect();
        m as f64 * contract(self.grid.values(), &rows)
    }

    /// Validity of the wrapped grid (cheap; the masses are cached).
    pub fn validity(&self) -> ValidityReport {
        validate_with_deltas(&self.grid, &self.deltas)
    }
}

impl Copula for BernsteinCopula {
    fn dim(&self) -> usize {
        self.grid.dim()
    }

    fn name(&self) -> String {
        format!("bernstein[{}, m={}]", self.grid.source(), self.grid.m())
    }

    fn cdf_unchecked(&self, x: &[f64]) -> f64 {
        approx_unchecked(&self.grid, x)
    }

    fn partial_unchecked(&self, axis: usize, x: &[f64]) -> Option<f64> {
        Some(self.partial_derivative_unchecked(axis, x))
    }

    fn has_partials(&self) -> bool {
        true
    }
}

/// One rung of a sup-error convergence ladder.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub m: usize,
    pub sup_error: f64,
    pub argmax: Vec<f64>,
    pub elapsed: Duration,
}

/// Sup of `|B_m(C) - C|` over the `(grid_res+1)^n` lattice, one row per
/// degree (ascending). A dense lattice stands in for the true sup norm.
pub fn sup_error_study(
    c: &dyn Copula,
    degrees: &[Degree],
    grid_res: usize,
) -> Result<Vec<ConvergenceRow>> {
    if grid_res < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 2, got {grid_res}"
        )));
    }
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("no degrees given".into()));
    }
    let mut degrees = degrees.to_vec();
    degrees.sort();
    let lattice = crate::nd::unit_lattice(c.dim(), grid_res);
    let mut rows = Vec::with_capacity(degrees.len());
    for m in degrees {
        let start = Instant::now();
        let grid = GridCopula::sample(c, m)?;
        let mut sup_error = 0.0f64;
        let mut argmax = lattice[0].clone();
        for point in &lattice {
            let err = (approx_unchecked(&grid, point) - c.cdf_unchecked(point)).abs();
            if err > sup_error {
                sup_error = err;
                argmax = point.clone();
            }
        }
        rows.push(ConvergenceRow {
            m: m.get(),
            sup_error,
            argmax,
            elapsed: start.elapsed(),
        });
    }
    Ok(rows)
}

/// One entry of a derivative-error table.
#[derive(Debug, Clone)]
pub struct DerivativeErrorRow {
    pub m: usize,
    pub point: Vec<f64>,
    pub exact: f64,
    pub approx: f64,
    pub abs_error: f64,
}

/// `|d B_m(C)/dx_axis - dC/dx_axis|` at interior points, per degree.
/// Requires analytic partials on `c`; points must avoid the boundary,
/// where the convergence statement does not apply.
pub fn derivative_error_study(
    c: &dyn Copula,
    degrees: &[Degree],
    axis: usize,
    points: &[Vec<f64>],
) -> Result<Vec<DerivativeErrorRow>> {
    if axis >= c.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: c.dim(),
        });
    }
    if !c.has_partials() {
        return Err(Error::MissingPartial(c.descriptor()));
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("no evaluation points given".into()));
    }
    for p in points {
        check_dim(c.dim(), p.len())?;
        if p.iter().any(|&t| t <= 0.0 || t >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "point {p:?} is not strictly interior"
            )));
        }
    }
    let mut degrees = degrees.to_vec();
    degrees.sort();
    let mut rows = Vec::new();
    for m in degrees {
        let (b, _) = BernsteinCopula::from_grid(GridCopula::sample(c, m)?);
        for p in points {
            let exact = c.partial(axis, p)?;
            let approx = b.partial_derivative_unchecked(axis, p);
            rows.push(DerivativeErrorRow {
                m: m.get(),
                point: p.clone(),
                exact,
                approx,
                abs_error: (approx - exact).abs(),
            });
        }
    }
    Ok(rows)
}

/// Convenience: sample, difference, and validate in one call, reusing the
/// cached masses.
pub fn resampled_validity(c: &dyn Copula, m: Degree) -> Result<ValidityReport> {
    let grid = GridCopula::sample(c, m)?;
    Ok(validate_copula(&grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::Family;
    use crate::quadrature::{integrate_box, integrate_unit_cube};

    fn deg(m: usize) -> Degree {
        Degree::new(m).unwrap()
    }

    fn fam(name: &str, theta: Option<f64>, dim: usize) -> Family {
        Family::new(name, theta, dim).unwrap()
    }

    #[test]
    fn product_copula_reproduced_exactly() {
        let pi = fam("independence", None, 2);
        let g = GridCopula::sample(&pi, deg(7)).unwrap();
        assert!((bernstein_approx(&g, &[0.3, 0.6]).unwrap() - 0.18).abs() < 1e-15);
        for m in [1usize, 2, 13, 50] {
            let g = GridCopula::sample(&pi, deg(m)).unwrap();
            for p in crate::nd::unit_lattice(2, 10) {
                let err = (bernstein_approx(&g, &p).unwrap() - pi.cdf_unchecked(&p)).abs();
                assert!(err < 1e-12, "m={m} p={p:?} err={err}");
            }
        }
    }

    #[test]
    fn degree_one_collapses_to_product() {
        for dim in [2usize, 3] {
            for c in crate::copula_menu(dim).unwrap() {
                let g = GridCopula::sample(&c, deg(1)).unwrap();
                let pi = fam("independence", None, dim);
                for p in crate::nd::unit_lattice(dim, 4) {
                    let err = (approx_unchecked(&g, &p) - pi.cdf_unchecked(&p)).abs();
                    assert!(err < 1e-14, "{} at {p:?}", c.descriptor());
                }
            }
        }
    }

    #[test]
    fn min_copula_m2_pinned_point() {
        // 9-term sum by hand: 0.125 + 0.0625 + 0.0625 + 0.0625
        let g = GridCopula::sample(&fam("min", None, 2), deg(2)).unwrap();
        assert!((bernstein_approx(&g, &[0.5, 0.5]).unwrap() - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn from_copula_validates_and_wraps() {
        let b = BernsteinCopula::from_copula(&fam("independence", None, 2), deg(5)).unwrap();
        for p in crate::nd::unit_lattice(2, 10) {
            assert!((b.cdf_unchecked(&p) - p[0] * p[1]).abs() < 1e-12);
        }

        let b = BernsteinCopula::from_copula(&fam("min", None, 2), deg(2)).unwrap();
        assert!((b.deltas().mass(&[0, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((b.deltas().mass(&[1, 1]).unwrap() - 0.5).abs() < 1e-15);

        // a non-copula input must be rejected
        let skew = GridCopula::from_values(
            deg(1),
            2,
            vec![0.0, 0.2, 0.0, 1.0], // nonzero on a zero face
            "constructed",
        )
        .unwrap();
        let (_, report) = BernsteinCopula::from_grid(skew);
        assert!(!report.is_copula_within(1e-10));
    }

    #[test]
    fn density_pinned_values() {
        let b = BernsteinCopula::from_copula(&fam("independence", None, 2), deg(6)).unwrap();
        assert!((b.density(&[0.4, 0.9]).unwrap() - 1.0).abs() < 1e-12);
        let b = BernsteinCopula::from_copula(&fam("min", None, 2), deg(2)).unwrap();
        assert!((b.density(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(b.density(&[0.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        for dim in [2usize, 3] {
            for c in crate::copula_menu(dim).unwrap() {
                let m = 6usize;
                let b = BernsteinCopula::from_copula(&c, deg(m)).unwrap();
                let total =
                    integrate_unit_cube(dim, m.max(2), |p| b.density_unchecked(p)).unwrap();
                assert!(
                    (total - 1.0).abs() < 1e-8,
                    "{} dim {dim}: total {total}",
                    c.descriptor()
                );
            }
        }
    }

    #[test]
    fn density_matches_box_volumes() {
        // quadrature of the density over a box equals the box's C_m-volume
        let c = fam("clayton", Some(2.0), 2);
        for m in [2usize, 5, 8] {
            let b = BernsteinCopula::from_copula(&c, deg(m)).unwrap();
            for (lo, hi) in [([0.0, 0.0], [0.5, 0.5]), ([0.2, 0.4], [0.9, 0.7])] {
                let bx = crate::copula::UnitBox::new(lo.to_vec(), hi.to_vec()).unwrap();
                let vol = crate::copula::c_volume(&b, &bx).unwrap();
                let quad =
                    integrate_box(&lo, &hi, m + 2, |p| b.density_unchecked(p)).unwrap();
                assert!((vol - quad).abs() < 1e-6, "m={m}: {vol} vs {quad}");
            }
        }
    }

    #[test]
    fn density_equals_nested_differences_of_cdf() {
        let h = 1e-4;
        let b = BernsteinCopula::from_copula(&fam("fgm", Some(1.0), 2), deg(6)).unwrap();
        for p in crate::nd::interior_lattice(2, 5) {
            let (x, y) = (p[0], p[1]);
            let f = |u: f64, v: f64| b.cdf_unchecked(&[u, v]);
            let mixed = (f(x + h, y + h) - f(x - h, y + h) - f(x + h, y - h)
                + f(x - h, y - h))
                / (4.0 * h * h);
            let dens = b.density_unchecked(&p);
            assert!((mixed - dens).abs() < 1e-4, "at {p:?}: {mixed} vs {dens}");
        }
    }

    #[test]
    fn partial_derivative_pinned_values() {
        let b = BernsteinCopula::from_copula(&fam("independence", None, 2), deg(9)).unwrap();
        assert!((b.partial_derivative(0, &[0.3, 0.6]).unwrap() - 0.6).abs() < 1e-12);
        assert!((b.partial_derivative(1, &[0.3, 0.6]).unwrap() - 0.3).abs() < 1e-12);

        // the margin of any Bernstein copula is the identity
        for c in crate::copula_menu(2).unwrap() {
            let b = BernsteinCopula::from_copula(&c, deg(6)).unwrap();
            for &t in &[0.1, 0.5, 0.8] {
                let d = b.partial_derivative(0, &[t, 1.0]).unwrap();
                assert!((d - 1.0).abs() < 1e-12, "{} at {t}", c.descriptor());
            }
        }
    }

    #[test]
    fn partial_derivative_matches_finite_differences() {
        let h = 1e-6;
        for c in crate::copula_menu(2).unwrap() {
            let b = BernsteinCopula::from_copula(&c, deg(7)).unwrap();
            for p in crate::nd::interior_lattice(2, 4) {
                for axis in 0..2 {
                    let d = b.partial_derivative(axis, &p).unwrap();
                    let mut hi = p.clone();
                    let mut lo = p.clone();
                    hi[axis] += h;
                    lo[axis] -= h;
                    let fd = (b.cdf_unchecked(&hi) - b.cdf_unchecked(&lo)) / (2.0 * h);
                    assert!(
                        (d - fd).abs() < 1e-5,
                        "{} axis {axis} at {p:?}: {d} vs {fd}",
                        c.descriptor()
                    );
                }
            }
        }
    }

    #[test]
    fn partials_stay_in_unit_range() {
        for c in crate::copula_menu(2).unwrap() {
            let b = BernsteinCopula::from_copula(&c, deg(8)).unwrap();
            for p in crate::nd::unit_lattice(2, 8) {
                for axis in 0..2 {
                    let d = b.partial_derivative(axis, &p).unwrap();
                    assert!(
                        (-1e-10..=1.0 + 1e-10).contains(&d),
                        "{} axis {axis} at {p:?}: {d}",
                        c.descriptor()
                    );
                }
            }
        }
    }

    #[test]
    fn bernstein_copula_is_again_a_copula() {
        for dim in [2usize, 3] {
            for c in crate::copula_menu(dim).unwrap() {
                for m in [1usize, 3, 8, 12] {
                    let b = BernsteinCopula::from_copula(&c, deg(m)).unwrap();
                    let report = resampled_validity(&b, deg(8)).unwrap();
                    assert!(
                        report.max_boundary_violation <= 1e-10
                            && report.min_cell_mass >= -1e-12
                            && (report.mass_total - 1.0).abs() <= 1e-10,
                        "{} dim {dim} m {m}: {report}",
                        c.descriptor()
                    );
                }
            }
        }
    }

    #[test]
    fn monotone_along_axes() {
        for c in crate::copula_menu(2).unwrap() {
            let b = BernsteinCopula::from_copula(&c, deg(6)).unwrap();
            let res = 12usize;
            for j in 0..=res {
                let y = j as f64 / res as f64;
                let mut prev = 0.0;
                for i in 0..=res {
                    let x = i as f64 / res as f64;
                    let v = b.cdf_unchecked(&[x, y]);
                    assert!(v >= prev - 1e-12, "{} at ({x},{y})", c.descriptor());
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn sup_error_study_behaves() {
        let pi = fam("independence", None, 2);
        let degrees: Vec<Degree> = [2usize, 4, 8].iter().map(|&m| deg(m)).collect();
        let rows = sup_error_study(&pi, &degrees, 10).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.sup_error <= 1e-12));

        let min2 = fam("min", None, 2);
        let rows = sup_error_study(&min2, &[deg(2)], 2).unwrap();
        // hand value: at (0.5, 0.5), 0.5 - 0.3125
        assert!(rows[0].sup_error >= 0.1875 - 1e-15);
        assert_eq!(rows[0].argmax, vec![0.5, 0.5]);

        let degrees: Vec<Degree> = [4usize, 16, 64].iter().map(|&m| deg(m)).collect();
        let rows = sup_error_study(&min2, &degrees, 20).unwrap();
        assert!(rows[0].sup_error > rows[1].sup_error);
        assert!(rows[1].sup_error > rows[2].sup_error);

        assert!(sup_error_study(&pi, &degrees, 1).is_err());
    }

    #[test]
    fn derivative_error_study_behaves() {
        let pi = fam("independence", None, 2);
        let degrees: Vec<Degree> = [3usize, 9].iter().map(|&m| deg(m)).collect();
        let rows =
            derivative_error_study(&pi, &degrees, 0, &[vec![0.3, 0.7], vec![0.5, 0.5]]).unwrap();
        assert!(rows.iter().all(|r| r.abs_error <= 1e-12));

        let fgm = fam("fgm", Some(1.0), 2);
        let degrees: Vec<Degree> = [10usize, 40, 160].iter().map(|&m| deg(m)).collect();
        let rows = derivative_error_study(&fgm, &degrees, 0, &[vec![0.5, 0.5]]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].abs_error > rows[1].abs_error);
        assert!(rows[1].abs_error > rows[2].abs_error);

        // boundary points are rejected
        assert!(derivative_error_study(&pi, &degrees, 0, &[vec![0.0, 0.5]]).is_err());
    }
}
