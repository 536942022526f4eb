//! Small dense rank computations.

use nalgebra::DMatrix;

/// Number of singular values above `rel_tol · σ_max` (zero for the zero matrix).
pub fn numerical_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let sv = singular_values(rows);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * smax).count()
}

/// Number of singular values above an absolute threshold.
pub fn rank_above(rows: &[Vec<f64>], abs_tol: f64) -> usize {
    singular_values(rows).iter().filter(|s| **s > abs_tol).count()
}

/// Dimension of the affine span of `points`, by [`numerical_rank`] of the
/// centred point cloud.
pub fn affine_rank(points: &[Vec<f64>], rel_tol: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let n = points.len() as f64;
    let dim = points[0].len();
    let mut centroid = vec![0.0; dim];
    for p in points {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / n;
        }
    }
    let centred: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&centroid).map(|(x, c)| x - c).collect())
        .collect();
    numerical_rank(&centred, rel_tol)
}

pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    if rows.is_empty() || rows[0].is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    m.singular_values().iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 0.0]];
        assert_eq!(numerical_rank(&rows, 1e-10), 2);
        assert_eq!(numerical_rank(&[vec![0.0, 0.0]], 1e-10), 0);
        let line = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        assert_eq!(affine_rank(&line, 1e-10), 1);
    }
}
