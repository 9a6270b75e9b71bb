//! Gaussian kernel `K(x, y) = exp(-‖x − y‖² / (2s²))`.
//!
//! Squared distances are accumulated from the difference vector in a single
//! pass; the expansion `‖x‖² − 2x·y + ‖y‖²` is never used.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::error::{Result, SvddError};
use crate::window::check_dim;

#[inline]
pub(crate) fn squared_distance(x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

#[inline]
pub(crate) fn gaussian(x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>, inv_two_s2: f64) -> f64 {
    (-squared_distance(x, y) * inv_two_s2).exp()
}

#[inline]
pub(crate) fn inv_two_s2(bandwidth: f64) -> f64 {
    1.0 / (2.0 * bandwidth * bandwidth)
}

fn check_bandwidth(bandwidth: f64) -> Result<()> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(SvddError::InvalidParameter(format!(
            "bandwidth must be a positive finite number (got {bandwidth})"
        )));
    }
    Ok(())
}

/// Evaluates the Gaussian kernel for one pair of points.
pub fn kernel_eval(x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>, bandwidth: f64) -> Result<f64> {
    check_bandwidth(bandwidth)?;
    check_dim(x.len(), y.len())?;
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(SvddError::NonFinite("kernel argument".into()));
    }
    Ok(gaussian(x, y, inv_two_s2(bandwidth)))
}

/// Full n×n Gaussian Gram matrix of the rows of `data`.
///
/// Rows are filled by parallel workers; each entry is computed by the same
/// expression as [`kernel_eval`], so the result does not depend on the
/// number of threads.
pub fn kernel_matrix(data: ArrayView2<'_, f64>, bandwidth: f64) -> Result<Array2<f64>> {
    check_bandwidth(bandwidth)?;
    if data.iter().any(|v| !v.is_finite()) {
        return Err(SvddError::NonFinite("kernel matrix input".into()));
    }
    let n = data.nrows();
    let scale = inv_two_s2(bandwidth);
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let xi = data.row(i);
            for (j, slot) in row.iter_mut().enumerate() {
                // (a − b)² and (b − a)² are bitwise equal, so the matrix is exactly symmetric
                *slot = if i == j {
                    1.0
                } else {
                    gaussian(xi, data.row(j), scale)
                };
            }
        });
    Ok(Array2::from_shape_vec((n, n), out).expect("n*n buffer"))
}

/// Median of all pairwise Euclidean distances, used as a fallback bandwidth.
///
/// Windows larger than 2000 rows are subsampled with a fixed stride. Returns
/// 1.0 when every pair is coincident or the window has a single row.
pub fn median_distance_bandwidth(data: ArrayView2<'_, f64>) -> f64 {
    const MAX_ROWS: usize = 2000;
    let n = data.nrows();
    let stride = n.div_ceil(MAX_ROWS).max(1);
    let idx: Vec<usize> = (0..n).step_by(stride).collect();
    let mut dists: Vec<f64> = idx
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, &i)| {
            idx[a + 1..]
                .iter()
                .map(move |&j| squared_distance(data.row(i), data.row(j)).sqrt())
        })
        .collect();
    if dists.is_empty() {
        return 1.0;
    }
    let mid = dists.len() / 2;
    let (_, m, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if m > 0.0 && m.is_finite() {
        m
    } else {
        1.0
    }
}
