//! Small row-major tensor helpers shared by the grid, operator, and
//! quadrature code. Axis 0 is slowest, the last axis fastest.

/// Visit every multi-index of the given shape in row-major order.
pub(crate) fn for_each_multi_index(shape: &[usize], mut f: impl FnMut(&[usize])) {
    if shape.iter().any(|&s| s == 0) {
        return;
    }
    let mut idx = vec![0usize; shape.len()];
    loop {
        f(&idx);
        // odometer increment, last axis fastest
        let mut axis = shape.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < shape[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Row-major linear offset of `idx` within `shape`.
pub(crate) fn linear_index(shape: &[usize], idx: &[usize]) -> usize {
    debug_assert_eq!(shape.len(), idx.len());
    let mut lin = 0usize;
    for (s, i) in shape.iter().zip(idx) {
        debug_assert!(i < s);
        lin = lin * s + i;
    }
    lin
}

/// Contract a row-major tensor against one weight vector per axis:
/// `sum_i values[i] * prod_k weights[k][i_k]`, folded one axis at a time
/// from the fastest axis inward. Cost is one multiply-add per surviving
/// tensor entry, about `values.len()` in total.
pub(crate) fn contract(values: &[f64], weights: &[Vec<f64>]) -> f64 {
    debug_assert!(!weights.is_empty());
    debug_assert_eq!(values.len(), weights.iter().map(Vec::len).product::<usize>());
    let last = &weights[weights.len() - 1];
    let width = last.len();
    let rows = values.len() / width;
    let mut cur: Vec<f64> = (0..rows)
        .map(|r| {
            values[r * width..(r + 1) * width]
                .iter()
                .zip(last)
                .map(|(v, w)| v * w)
                .sum()
        })
        .collect();
    for w in weights[..weights.len() - 1].iter().rev() {
        let width = w.len();
        let rows = cur.len() / width;
        cur = (0..rows)
            .map(|r| {
                cur[r * width..(r + 1) * width]
                    .iter()
                    .zip(w)
                    .map(|(v, c)| v * c)
                    .sum()
            })
            .collect();
    }
    debug_assert_eq!(cur.len(), 1);
    cur[0]
}

/// The `(res + 1)^dim` lattice with coordinates `j / res`, boundary included.
pub fn unit_lattice(dim: usize, res: usize) -> Vec<Vec<f64>> {
    let mut points = Vec::with_capacity((res + 1).pow(dim as u32));
    for_each_multi_index(&vec![res + 1; dim], |idx| {
        points.push(idx.iter().map(|&j| j as f64 / res as f64).collect());
    });
    points
}

/// The `per_axis^dim` interior lattice with coordinates `j / (per_axis + 1)`,
/// `j = 1..=per_axis`; never touches the boundary.
pub fn interior_lattice(dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let denom = (per_axis + 1) as f64;
    let mut points = Vec::with_capacity(per_axis.pow(dim as u32));
    for_each_multi_index(&vec![per_axis; dim], |idx| {
        points.push(idx.iter().map(|&j| (j + 1) as f64 / denom).collect());
    });
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_order_and_count() {
        let mut seen = Vec::new();
        for_each_multi_index(&[2, 3], |idx| seen.push(idx.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[5], vec![1, 2]);
        for (lin, idx) in seen.iter().enumerate() {
            assert_eq!(linear_index(&[2, 3], idx), lin);
        }
    }

    #[test]
    fn contract_matches_direct_sum() {
        // 2 x 3 tensor against two weight vectors
        let values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let w = vec![vec![0.5, 2.0], vec![1.0, 0.0, 3.0]];
        let mut direct = 0.0;
        for_each_multi_index(&[2, 3], |idx| {
            direct += values[linear_index(&[2, 3], idx)] * w[0][idx[0]] * w[1][idx[1]];
        });
        assert_eq!(contract(&values, &w), direct);
    }

    #[test]
    fn lattices() {
        let l = unit_lattice(2, 2);
        assert_eq!(l.len(), 9);
        assert_eq!(l[0], vec![0.0, 0.0]);
        assert_eq!(l[8], vec![1.0, 1.0]);
        let i = interior_lattice(2, 5);
        assert_eq!(i.len(), 25);
        assert!(i
            .iter()
            .all(|p| p.iter().all(|&c| c > 0.0 && c < 1.0)));
        assert_eq!(i[0], vec![1.0 / 6.0, 1.0 / 6.0]);
    }
}
