//! Dense numerical linear algebra helpers built on nalgebra's SVD.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Smallest acceptable ratio between the last nonzero and the first zero
/// singular value at the rank cut.
pub const DEFAULT_MIN_GAP_RATIO: f64 = 1e3;

/// Singular spectrum of a matrix together with its numerical kernel.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Singular values in descending order, one per column (zero-padded).
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `σ_rank / σ_(rank+1)`, infinite when there is no cut inside the spectrum.
    pub gap_ratio: f64,
    /// Orthonormal kernel basis, one column per kernel direction.
    pub kernel: DMatrix<f64>,
}

impl Spectrum {
    pub fn corank(&self) -> usize {
        self.singular_values.len() - self.rank
    }

    /// Singular values around the cut, at most `k` on each side.
    pub fn tail(&self, k: usize) -> Vec<f64> {
        let lo = self.rank.saturating_sub(k);
        let hi = (self.rank + k).min(self.singular_values.len());
        self.singular_values[lo..hi].to_vec()
    }
}

/// Full SVD spectrum with kernel. A singular value counts as zero iff it is
/// below `rel_tol * σ_max`.
pub fn spectrum(m: &DMatrix<f64>, rel_tol: f64) -> Spectrum {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Spectrum {
            singular_values: Vec::new(),
            rank: 0,
            gap_ratio: f64::INFINITY,
            kernel: DMatrix::zeros(0, 0),
        };
    }
    let work = if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.rows_mut(0, rows).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let values = svd.singular_values;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let max = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .take_while(|&&s| max > 0.0 && s >= rel_tol * max)
        .count();
    let gap_ratio = if rank == 0 || rank == cols {
        f64::INFINITY
    } else if singular_values[rank] == 0.0 {
        f64::INFINITY
    } else {
        singular_values[rank - 1] / singular_values[rank]
    };
    let mut kernel = DMatrix::zeros(cols, cols - rank);
    for (k, &idx) in order[rank..].iter().enumerate() {
        kernel.set_column(k, &v_t.row(idx).transpose());
    }
    Spectrum {
        singular_values,
        rank,
        gap_ratio,
        kernel,
    }
}

/// Numerical rank with a gap check; fails with `RankAmbiguous` when the cut
/// is not separated by at least `min_gap`.
pub fn numeric_rank(m: &DMatrix<f64>, rel_tol: f64, min_gap: f64) -> Result<Spectrum> {
    let s = spectrum(m, rel_tol);
    if s.gap_ratio < min_gap {
        return Err(Error::RankAmbiguous {
            ratio: s.gap_ratio,
            tail: s.tail(4),
        });
    }
    Ok(s)
}

/// Orthonormal basis of the column span, dropping directions below
/// `rel_tol * σ_max`.
pub fn orthonormal_columns(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let values = svd.singular_values;
    let max = values.iter().cloned().fold(0.0, f64::max);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| max > 0.0 && values[i] > rel_tol * max)
        .collect();
    let mut out = DMatrix::zeros(rows, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Removes the component of `v` in the span of the orthonormal columns `q`.
pub fn project_out(v: &DVector<f64>, q: &DMatrix<f64>) -> DVector<f64> {
    if q.ncols() == 0 {
        return v.clone();
    }
    v - q * (q.transpose() * v)
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.ncols() == 0 {
        return Ok(DVector::zeros(0));
    }
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(DVector::zeros(a.ncols()));
    }
    svd.solve(b, max * 1e-13).map_err(|_| Error::SingularSystem)
}

/// Operator 2-norm (largest singular value).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_rank_two_matrix() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0 + 1e-3]);
        let s = numeric_rank(&m, 1e-8, 1e3).unwrap();
        assert_eq!(s.rank, 2);
        assert_eq!(s.kernel.ncols(), 1);
        assert!((&m * s.kernel.column(0)).norm() < 1e-12);
    }

    #[test]
    fn ambiguous_cut_is_reported() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.0, 1e-7, 1e-9]));
        assert!(matches!(
            numeric_rank(&m, 1e-8, 1e3),
            Err(Error::RankAmbiguous { .. })
        ));
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_kernel() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let x = min_norm_solve(&a, &DVector::from_vec(alloc::vec![2.0])).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }
}
