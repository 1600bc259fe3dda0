//! Grid copulas: values of a copula on the `(m+1)^n` node lattice, the
//! cell-mass tensor obtained by nested first differences, copula-validity
//! verification, and the rank-based empirical (checkerboard) grid.

use serde::Serialize;

use crate::basis::{check_dim, Degree};
use crate::copula::Copula;
use crate::nd::{for_each_multi_index, linear_index};
use crate::{Error, Result, MAX_DIM};

/// Hard cap on total grid nodes, to keep `(m+1)^n` growth honest.
const MAX_GRID_NODES: u128 = 100_000_000;

fn grid_len(dim: usize, nodes_per_axis: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge(dim));
    }
    let total = (nodes_per_axis as u128).pow(dim as u32);
    if total > MAX_GRID_NODES {
        return Err(Error::GridTooLarge {
            nodes: total,
            limit: MAX_GRID_NODES,
        });
    }
    Ok(total as usize)
}

/// A copula sampled at the nodes `i/m` of the `(m+1)^n` lattice, stored
/// row-major (axis 0 slowest). Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCopula {
    m: Degree,
    dim: usize,
    values: Vec<f64>,
    source: String,
}

impl GridCopula {
    /// Evaluate `c` at every grid node.
    pub fn sample(c: &dyn Copula, m: Degree) -> Result<Self> {
        let dim = c.dim();
        let len = grid_len(dim, m.nodes())?;
        let mf = m.get() as f64;
        let mut values = Vec::with_capacity(len);
        let mut point = vec![0.0; dim];
        for_each_multi_index(&vec![m.nodes(); dim], |idx| {
            for (p, &i) in point.iter_mut().zip(idx) {
                *p = i as f64 / mf;
            }
            values.push(c.cdf_unchecked(&point));
        });
        Ok(GridCopula {
            m,
            dim,
            values,
            source: c.descriptor(),
        })
    }

    /// Wrap an existing value tensor (row-major, `(m+1)^dim` entries).
    pub fn from_values(m: Degree, dim: usize, values: Vec<f64>, source: &str) -> Result<Self> {
        let len = grid_len(dim, m.nodes())?;
        if values.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: values.len(),
            });
        }
        Ok(GridCopula {
            m,
            dim,
            values,
            source: source.to_string(),
        })
    }

    /// Rank-based empirical (checkerboard) grid from raw observations.
    ///
    /// Per-column average ranks break ties; pseudo-observations use the
    /// `rank / (N + 1)` convention so every value is strictly inside
    /// `(0, 1)`. Node values count pseudo-observations dominated by the
    /// node; the all-ones node is pinned to 1 and zero faces to 0.
    pub fn empirical(rows: &[Vec<f64>], m: Degree) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows < 2 {
            return Err(Error::EmpiricalData(format!(
                "need at least 2 rows, got {n_rows}"
            )));
        }
        let dim = rows[0].len();
        if dim < 2 {
            return Err(Error::EmpiricalData(format!(
                "need at least 2 columns, got {dim}"
            )));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge(dim));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DataRow {
                    row: r + 1,
                    message: format!("has {} columns, expected {dim}", row.len()),
                });
            }
            if let Some((c, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::DataRow {
                    row: r + 1,
                    message: format!("column {} holds non-finite value {v}", c + 1),
                });
            }
        }

        // Average ranks per column -> pseudo-observations in (0, 1).
        let mut pseudo = vec![vec![0.0f64; dim]; n_rows];
        for col in 0..dim {
            let mut order: Vec<usize> = (0..n_rows).collect();
            order.sort_by(|&a, &b| rows[a][col].total_cmp(&rows[b][col]));
            if rows[order[0]][col] == rows[order[n_rows - 1]][col] {
                return Err(Error::EmpiricalData(format!(
                    "column {} is constant",
                    col + 1
                )));
            }
            let denom = n_rows as f64 + 1.0;
            let mut start = 0usize;
            while start < n_rows {
                let mut end = start;
                while end + 1 < n_rows && rows[order[end + 1]][col] == rows[order[start]][col] {
                    end += 1;
                }
                // mean of the 1-based ranks start+1 ..= end+1
                let avg_rank = (start + end) as f64 / 2.0 + 1.0;
                for &r in &order[start..=end] {
                    pseudo[r][col] = avg_rank / denom;
                }
                start = end + 1;
            }
        }

        let len = grid_len(dim, m.nodes())?;
        let mf = m.get() as f64;
        let mut values = Vec::with_capacity(len);
        let mut threshold = vec![0.0f64; dim];
        for_each_multi_index(&vec![m.nodes(); dim], |idx| {
            for (t, &i) in threshold.iter_mut().zip(idx) {
                *t = i as f64 / mf;
            }
            if idx.iter().any(|&i| i == 0) {
                values.push(0.0);
                return;
            }
            if idx.iter().all(|&i| i == m.get()) {
                values.push(1.0);
                return;
            }
            let count = pseudo
                .iter()
                .filter(|u| u.iter().zip(&threshold).all(|(ui, ti)| ui <= ti))
                .count();
            values.push(count as f64 / n_rows as f64);
        });

        Ok(GridCopula {
            m,
            dim,
            values,
            source: format!("empirical(rows={n_rows})"),
        })
    }

    pub fn m(&self) -> Degree {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.m.nodes(); self.dim]
    }

    /// Value at one node multi-index.
    pub fn value(&self, idx: &[usize]) -> Result<f64> {
        check_dim(self.dim, idx.len())?;
        if let Some(&bad) = idx.iter().find(|&&i| i > self.m.get()) {
            return Err(Error::InvalidArgument(format!(
                "node index {bad} exceeds degree {}",
                self.m
            )));
        }
        Ok(self.values[linear_index(&self.shape(), idx)])
    }
}

/// Cell masses `Delta^n_{j,m} C` over the `m^n` grid cells: the n-fold
/// nested first difference of the node values. For a valid copula these
/// are the probability masses the copula assigns to the cells, so they are
/// nonnegative and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTensor {
    m: Degree,
    dim: usize,
    masses: Vec<f64>,
}

impl DeltaTensor {
    /// Difference the value tensor once along every axis.
    pub fn from_grid(grid: &GridCopula) -> Self {
        let mut dims = grid.shape();
        let mut data = grid.values().to_vec();
        for axis in 0..grid.dim() {
            data = diff_axis(&data, &mut dims, axis);
        }
        DeltaTensor {
            m: grid.m(),
            dim: grid.dim(),
            masses: data,
        }
    }

    pub fn m(&self) -> Degree {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.m.get(); self.dim]
    }

    /// Mass of the cell with lower corner `j/m`.
    pub fn mass(&self, idx: &[usize]) -> Result<f64> {
        check_dim(self.dim, idx.len())?;
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.m.get()) {
            return Err(Error::InvalidArgument(format!(
                "cell index {bad} out of range for degree {}",
                self.m
            )));
        }
        Ok(self.masses[linear_index(&self.shape(), idx)])
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn min_mass(&self) -> f64 {
        self.masses.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// One first difference along `axis`; shrinks that axis by one node.
fn diff_axis(data: &[f64], dims: &mut [usize], axis: usize) -> Vec<f64> {
    let stride: usize = dims[axis + 1..].iter().product();
    let block = dims[axis] * stride;
    let outer: usize = dims[..axis].iter().product();
    let mut out = Vec::with_capacity(data.len() / dims[axis] * (dims[axis] - 1));
    for o in 0..outer {
        let base = o * block;
        for i in 0..dims[axis] - 1 {
            let lo = base + i * stride;
            let hi = base + (i + 1) * stride;
            for s in 0..stride {
                out.push(data[hi + s] - data[lo + s]);
            }
        }
    }
    dims[axis] -= 1;
    out
}

/// Worst boundary violation, worst (most negative) cell mass, and total
/// mass of a grid, reported raw; apply a tolerance via
/// [`ValidityReport::is_copula_within`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    /// Largest deviation from the grounded/uniform-margin node values.
    pub max_boundary_violation: f64,
    /// Smallest nested-difference cell mass.
    pub min_cell_mass: f64,
    /// Sum of all cell masses (1 for an exact copula).
    pub mass_total: f64,
}

impl ValidityReport {
    pub fn is_copula_within(&self, tol: f64) -> bool {
        tol > 0.0
            && self.max_boundary_violation <= tol
            && self.min_cell_mass >= -tol
            && (self.mass_total - 1.0).abs() <= tol
    }
}

impl std::fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "boundary violation {:.3e}, min cell mass {:.3e}, total mass {}",
            self.max_boundary_violation, self.min_cell_mass, self.mass_total
        )
    }
}

/// Check grid boundary conditions (zero faces, uniform margins at the
/// nodes) and nonnegativity of every cell mass.
pub fn validate_copula(grid: &GridCopula) -> ValidityReport {
    let deltas = DeltaTensor::from_grid(grid);
    validate_with_deltas(grid, &deltas)
}

pub(crate) fn validate_with_deltas(grid: &GridCopula, deltas: &DeltaTensor) -> ValidityReport {
    let m = grid.m().get();
    let mf = m as f64;
    let shape = grid.shape();
    let mut max_boundary_violation = 0.0f64;
    let mut lin = 0usize;
    for_each_multi_index(&shape, |idx| {
        let v = grid.values()[lin];
        lin += 1;
        if idx.iter().any(|&i| i == 0) {
            max_boundary_violation = max_boundary_violation.max(v.abs());
            return;
        }
        // A margin node keeps every coordinate but one at m; there the
        // value must equal the free coordinate (uniform margins). The
        // all-ones corner falls out as the i = m case.
        for (k, &i) in idx.iter().enumerate() {
            let all_others_top = idx
                .iter()
                .enumerate()
                .all(|(r, &j)| r == k || j == m);
            if all_others_top {
                max_boundary_violation =
                    max_boundary_violation.max((v - i as f64 / mf).abs());
            }
        }
    });
    ValidityReport {
        max_boundary_violation,
        min_cell_mass: deltas.min_mass(),
        mass_total: deltas.total(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::Family;
    use proptest::prelude::*;

    fn deg(m: usize) -> Degree {
        Degree::new(m).unwrap()
    }

    fn fam(name: &str, theta: Option<f64>, dim: usize) -> Family {
        Family::new(name, theta, dim).unwrap()
    }

    #[test]
    fn sample_grid_pinned_values() {
        let g = GridCopula::sample(&fam("independence", None, 2), deg(1)).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0, 0.0, 1.0]);

        let g = GridCopula::sample(&fam("min", None, 2), deg(2)).unwrap();
        assert_eq!(g.value(&[1, 2]).unwrap(), 0.5);

        let g = GridCopula::sample(&fam("clayton", Some(2.0), 2), deg(2)).unwrap();
        assert!((g.value(&[1, 1]).unwrap() - 7.0f64.powf(-0.5)).abs() < 1e-15);
        assert!((g.value(&[1, 1]).unwrap() - 0.37796447300922720).abs() < 1e-15);
    }

    #[test]
    fn delta_tensor_pinned_values() {
        // product copula: every cell mass is (1/m)^n exactly
        let g = GridCopula::sample(&fam("independence", None, 2), deg(2)).unwrap();
        let d = DeltaTensor::from_grid(&g);
        for mass in d.masses() {
            assert!((mass - 0.25).abs() < 1e-14);
        }
        assert!((d.total() - 1.0).abs() < 1e-14);

        // min copula: diagonal cells carry 0.5, the rest nothing
        let g = GridCopula::sample(&fam("min", None, 2), deg(2)).unwrap();
        let d = DeltaTensor::from_grid(&g);
        assert!((d.mass(&[0, 0]).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.mass(&[1, 1]).unwrap() - 0.5).abs() < 1e-15);
        assert!(d.mass(&[0, 1]).unwrap().abs() < 1e-15);
        assert!(d.mass(&[1, 0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn masses_sum_to_one_across_families() {
        for dim in [2usize, 3] {
            for m in [1usize, 2, 5, 16] {
                for fam in crate::copula_menu(dim).unwrap() {
                    let g = GridCopula::sample(&fam, deg(m)).unwrap();
                    let d = DeltaTensor::from_grid(&g);
                    assert!(
                        (d.total() - 1.0).abs() < 1e-10,
                        "{} dim {dim} m {m}: total {}",
                        fam.descriptor(),
                        d.total()
                    );
                }
            }
        }
    }

    #[test]
    fn validate_copula_behavior() {
        let g = GridCopula::sample(&fam("independence", None, 2), deg(4)).unwrap();
        let report = validate_copula(&g);
        assert!(report.is_copula_within(1e-12));

        // inject a negative cell by bumping one interior node value
        let mut values = g.values().to_vec();
        values[6] += 0.01; // node (1,1) of the 5x5 grid
        let broken = GridCopula::from_values(deg(4), 2, values, "broken").unwrap();
        let report = validate_copula(&broken);
        assert!(report.min_cell_mass <= -0.01 + 1e-15);
        assert!(!report.is_copula_within(1e-3));
        assert!(report.is_copula_within(0.1));
    }

    #[test]
    fn built_in_families_validate_on_grids() {
        for dim in [2usize, 3] {
            for m in [1usize, 2, 7, 16] {
                for fam in crate::copula_menu(dim).unwrap() {
                    let g = GridCopula::sample(&fam, deg(m)).unwrap();
                    assert!(
                        validate_copula(&g).is_copula_within(1e-10),
                        "{} dim {dim} m {m}",
                        fam.descriptor()
                    );
                }
            }
        }
    }

    #[test]
    fn empirical_two_point_grid() {
        let rows = vec![vec![0.1, 0.1], vec![0.9, 0.9]];
        let g = GridCopula::empirical(&rows, deg(1)).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn empirical_comonotone_matches_min() {
        let rows: Vec<Vec<f64>> = (1..=10).map(|k| vec![k as f64, k as f64]).collect();
        let g = GridCopula::empirical(&rows, deg(5)).unwrap();
        for i in 0..=5usize {
            for j in 0..=5usize {
                let expected = (i.min(j)) as f64 / 5.0;
                let got = g.value(&[i, j]).unwrap();
                assert!(
                    (got - expected).abs() <= 1.0 / 11.0 + 1e-12,
                    "node ({i},{j}): {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn empirical_independent_rows_near_product() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Open01};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let rows: Vec<Vec<f64>> = (0..1000)
            .map(|_| vec![Open01.sample(&mut rng), Open01.sample(&mut rng)])
            .collect();
        let g = GridCopula::empirical(&rows, deg(4)).unwrap();
        let pi = fam("independence", None, 2);
        for i in 0..=4usize {
            for j in 0..=4usize {
                let node = [i as f64 / 4.0, j as f64 / 4.0];
                let diff = (g.value(&[i, j]).unwrap() - pi.cdf(&node).unwrap()).abs();
                assert!(diff < 0.05, "node ({i},{j}): diff {diff}");
            }
        }
        let report = validate_copula(&g);
        assert!((report.mass_total - 1.0).abs() < 1.0 / 50.0);
    }

    #[test]
    fn empirical_rejections() {
        assert!(GridCopula::empirical(&[vec![1.0, 2.0]], deg(2)).is_err());
        let constant = vec![vec![1.0, 2.0], vec![1.0, 5.0], vec![1.0, 3.0]];
        assert!(matches!(
            GridCopula::empirical(&constant, deg(2)),
            Err(Error::EmpiricalData(_))
        ));
        let ragged = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(GridCopula::empirical(&ragged, deg(2)).is_err());
        let nan = vec![vec![1.0, 2.0], vec![f64::NAN, 3.0]];
        assert!(matches!(
            GridCopula::empirical(&nan, deg(2)),
            Err(Error::DataRow { row: 2, .. })
        ));
    }

    proptest! {
        /// Strictly increasing per-column transforms leave the empirical
        /// grid exactly unchanged (ranks are all that matter).
        #[test]
        fn empirical_rank_invariance(
            raw in proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 4..40),
        ) {
            let rows: Vec<Vec<f64>> = raw.iter().map(|&(a, b)| vec![a, b]).collect();
            let transformed: Vec<Vec<f64>> = raw
                .iter()
                .map(|&(a, b)| vec![a.exp(), 3.0 * b + 1.0])
                .collect();
            let m = deg(3);
            match (GridCopula::empirical(&rows, m), GridCopula::empirical(&transformed, m)) {
                (Ok(g1), Ok(g2)) => prop_assert_eq!(g1.values(), g2.values()),
                (Err(_), Err(_)) => {} // both constant-column rejections
                _ => prop_assert!(false, "one construction failed, the other did not"),
            }
        }
    }
}
