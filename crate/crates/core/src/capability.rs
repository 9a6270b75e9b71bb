//! The capability vector `[Cp, dist, p]`.
//!
//! * `Cp` is the ratio of specification-box volume to process-region volume,
//!   estimated by scoring uniform draws from the box: `Cp = N_ES / COUNT₁`
//!   where `COUNT₁` counts draws with `dist² ≤ R²`. Only the part of the
//!   inlier region inside the box is visible to this estimate.
//! * `dist` is the Euclidean distance between the model center `a` and the box
//!   center `c`.
//! * `p` is the fraction of window rows outside the box.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Result, SvddError};
use crate::params::{HyperParams, MonteCarloConfig};
use crate::sampling::{block_rows, fill_block, map_blocks};
use crate::trainer::{train, SvddModel};
use crate::window::{check_dim, ProcessWindow, SpecLimits};

/// Monte Carlo estimate of `Cp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpEstimate {
    pub cp: f64,
    pub n_es: usize,
    pub count_1: usize,
    /// Delta-method standard error `Cp·sqrt((1 − π̂) / (N_ES π̂))`, with
    /// `π̂ = COUNT₁ / N_ES`. Diagnostic only.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityVector {
    pub cp: f64,
    pub dist: f64,
    pub p: f64,
    pub n_es: usize,
    pub count_1: usize,
    pub cp_standard_error: f64,
}

impl CapabilityVector {
    pub fn components(&self) -> [f64; 3] {
        [self.cp, self.dist, self.p]
    }
}

/// Counts draws that fall inside the description.
pub fn compute_cp(
    model: &SvddModel,
    spec: &SpecLimits,
    mc: &MonteCarloConfig,
) -> Result<CpEstimate> {
    check_dim(model.q(), spec.q())?;
    let q = spec.q();
    let counts = map_blocks(mc, |b| {
        let rows = block_rows(mc.n_es(), b);
        let mut buf = Array2::zeros((rows.len(), q));
        fill_block(spec, mc.seed(), b, buf.view_mut());
        buf.rows()
            .into_iter()
            .filter(|z| !model.classify(z.view()).is_outlier)
            .count()
    });
    let count_1: usize = counts.into_iter().sum();
    let n_es = mc.n_es();
    if count_1 == 0 {
        return Err(SvddError::EmptyIntersection { n_es });
    }
    let cp = n_es as f64 / count_1 as f64;
    let pi = count_1 as f64 / n_es as f64;
    let standard_error = cp * ((1.0 - pi) / (n_es as f64 * pi)).sqrt();
    Ok(CpEstimate {
        cp,
        n_es,
        count_1,
        standard_error,
    })
}

pub fn compute_dist(model: &SvddModel, spec: &SpecLimits) -> Result<f64> {
    check_dim(model.q(), spec.q())?;
    let c = spec.center();
    Ok(model
        .center()
        .iter()
        .zip(c.iter())
        .map(|(a, c)| (a - c) * (a - c))
        .sum::<f64>()
        .sqrt())
}

/// Fraction of rows with at least one coordinate outside `[lsl, usl]`.
pub fn compute_p(window: &ProcessWindow, spec: &SpecLimits) -> Result<f64> {
    check_dim(spec.q(), window.q())?;
    if window.n() == 0 {
        return Err(SvddError::Empty("process window".into()));
    }
    let outside = window
        .observations()
        .rows()
        .into_iter()
        .filter(|r| !spec.contains(r.view()))
        .count();
    Ok(outside as f64 / window.n() as f64)
}

/// Trains on `window` and assembles the capability vector.
pub fn compute_pcsvdd(
    window: &ProcessWindow,
    spec: &SpecLimits,
    hp: HyperParams,
    mc: &MonteCarloConfig,
) -> Result<CapabilityVector> {
    check_dim(window.q(), spec.q()).map_err(|e| e.at_stage("input"))?;
    let model = train(window, hp).map_err(|e| e.at_stage("training"))?;
    capability_with_model(window, &model, spec, mc)
}

/// Capability vector for an already trained model.
pub fn capability_with_model(
    window: &ProcessWindow,
    model: &SvddModel,
    spec: &SpecLimits,
    mc: &MonteCarloConfig,
) -> Result<CapabilityVector> {
    let est = compute_cp(model, spec, mc).map_err(|e| e.at_stage("cp"))?;
    let dist = compute_dist(model, spec).map_err(|e| e.at_stage("dist"))?;
    let p = compute_p(window, spec).map_err(|e| e.at_stage("p"))?;
    Ok(CapabilityVector {
        cp: est.cp,
        dist,
        p,
        n_es: est.n_es,
        count_1: est.count_1,
        cp_standard_error: est.standard_error,
    })
}

/// Text report with a fixed field order, suitable for diffing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapabilityReport {
    pub cp: f64,
    pub dist: f64,
    pub p: f64,
    pub n_es: usize,
    pub count_1: usize,
    pub standard_error: f64,
    pub model_fingerprint: String,
    pub seed: u64,
}

impl CapabilityReport {
    pub fn new(vector: &CapabilityVector, model: &SvddModel, mc: &MonteCarloConfig) -> Self {
        Self::with_fingerprint(vector, model.fingerprint(), mc)
    }

    pub fn with_fingerprint(
        vector: &CapabilityVector,
        fingerprint: String,
        mc: &MonteCarloConfig,
    ) -> Self {
        Self {
            cp: vector.cp,
            dist: vector.dist,
            p: vector.p,
            n_es: vector.n_es,
            count_1: vector.count_1,
            standard_error: vector.cp_standard_error,
            model_fingerprint: fingerprint,
            seed: mc.seed(),
        }
    }

    pub fn render(&self) -> String {
        let mut out =
            String::from("# capability vector [cp, dist, p]; standard_error is a diagnostic\n");
        out.push_str(&toml::to_string(self).expect("report serializes"));
        out
    }
}
