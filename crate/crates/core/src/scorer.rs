//! Scoring against a trained description.

use ndarray::{ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::error::{Result, SvddError};
use crate::kernel::{gaussian, inv_two_s2};
use crate::trainer::SvddModel;
use crate::window::check_dim;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreResult {
    pub dist2: f64,
    /// `dist2 > R²`; points exactly on the boundary are inliers.
    pub is_outlier: bool,
}

impl SvddModel {
    /// `dist²(z) = 1 − 2 Σᵢ αᵢ K(xᵢ, z) + w`, clamped at zero.
    pub(crate) fn dist2(&self, z: ArrayView1<'_, f64>) -> f64 {
        let scale = inv_two_s2(self.hyperparams.bandwidth());
        let cross: f64 = self
            .support_vectors
            .rows()
            .into_iter()
            .zip(&self.alphas)
            .map(|(x, a)| a * gaussian(x, z, scale))
            .sum();
        (1.0 - 2.0 * cross + self.offset_w).max(0.0)
    }

    pub(crate) fn classify(&self, z: ArrayView1<'_, f64>) -> ScoreResult {
        let dist2 = self.dist2(z);
        ScoreResult {
            dist2,
            is_outlier: dist2 > self.threshold_r2,
        }
    }
}

pub fn score(model: &SvddModel, z: ArrayView1<'_, f64>) -> Result<ScoreResult> {
    check_dim(model.q(), z.len())?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(SvddError::NonFinite("scoring observation".into()));
    }
    Ok(model.classify(z))
}

/// Scores every row; output order matches input order and each entry is
/// identical to [`score`] on that row.
pub fn score_batch(model: &SvddModel, data: ArrayView2<'_, f64>) -> Result<Vec<ScoreResult>> {
    if data.nrows() == 0 {
        return Ok(Vec::new());
    }
    check_dim(model.q(), data.ncols())?;
    if data.iter().any(|v| !v.is_finite()) {
        return Err(SvddError::NonFinite("scoring data".into()));
    }
    Ok((0..data.nrows())
        .into_par_iter()
        .map(|i| model.classify(data.row(i)))
        .collect())
}
