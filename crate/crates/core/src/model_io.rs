//! Versioned TOML model documents.
//!
//! Floats are written in shortest round-trip form, so a saved model scores
//! bit-for-bit like the original.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SvddError};
use crate::params::HyperParams;
use crate::trainer::SvddModel;
use crate::window::Standardizer;

pub const FORMAT: &str = "svddcap-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    q: usize,
    n_train: usize,
    bandwidth: f64,
    outlier_fraction: f64,
    penalty: f64,
    columns: Vec<String>,
    threshold_r2: f64,
    offset_w: f64,
    center: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    standardization: Option<StandardizationRecord>,
    support_vectors: Vec<SupportVectorRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StandardizationRecord {
    means: Vec<f64>,
    scales: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SupportVectorRecord {
    alpha: f64,
    boundary: bool,
    x: Vec<f64>,
}

/// A model together with the input transform it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: SvddModel,
    pub standardizer: Option<Standardizer>,
}

impl ModelFile {
    pub fn new(model: SvddModel) -> Self {
        Self {
            model,
            standardizer: None,
        }
    }

    pub fn to_toml(&self) -> String {
        let m = &self.model;
        let doc = ModelDocument {
            format: FORMAT.into(),
            version: FORMAT_VERSION,
            q: m.q(),
            n_train: m.n_train,
            bandwidth: m.hyperparams.bandwidth(),
            outlier_fraction: m.hyperparams.outlier_fraction(),
            penalty: m.penalty,
            columns: m.column_names.clone(),
            threshold_r2: m.threshold_r2,
            offset_w: m.offset_w,
            center: m.center_a.to_vec(),
            standardization: self.standardizer.as_ref().map(|s| StandardizationRecord {
                means: s.means.clone(),
                scales: s.scales.clone(),
            }),
            support_vectors: m
                .support_vectors
                .rows()
                .into_iter()
                .zip(m.alphas.iter().zip(&m.boundary_mask))
                .map(|(x, (&alpha, &boundary))| SupportVectorRecord {
                    alpha,
                    boundary,
                    x: x.to_vec(),
                })
                .collect(),
        };
        toml::to_string(&doc).expect("model document serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: ModelDocument = toml::from_str(text).map_err(|e| SvddError::Parse {
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_owned(),
        })?;
        let bad = |msg: String| SvddError::Parse {
            line: 0,
            message: msg,
        };
        if doc.format != FORMAT {
            return Err(bad(format!(
                "not a model document (format = '{}')",
                doc.format
            )));
        }
        if doc.version != FORMAT_VERSION {
            return Err(bad(format!("unsupported model version {}", doc.version)));
        }
        let q = doc.q;
        if doc.columns.len() != q || doc.center.len() != q {
            return Err(bad(format!(
                "model dimension q = {q} disagrees with its fields"
            )));
        }
        if doc.support_vectors.is_empty() {
            return Err(bad("model has no support vectors".into()));
        }
        let hyperparams = HyperParams::new(doc.bandwidth, doc.outlier_fraction)?;
        let k = doc.support_vectors.len();
        let mut sv = Array2::zeros((k, q));
        let mut alphas = Vec::with_capacity(k);
        let mut boundary_mask = Vec::with_capacity(k);
        for (r, rec) in doc.support_vectors.iter().enumerate() {
            if rec.x.len() != q {
                return Err(bad(format!(
                    "support vector {r} has {} coordinates",
                    rec.x.len()
                )));
            }
            sv.row_mut(r).assign(&Array1::from(rec.x.clone()));
            alphas.push(rec.alpha);
            boundary_mask.push(rec.boundary);
        }
        let standardizer = match doc.standardization {
            Some(s) if s.means.len() == q && s.scales.len() == q => Some(Standardizer {
                means: s.means,
                scales: s.scales,
            }),
            Some(_) => return Err(bad("standardization has wrong dimension".into())),
            None => None,
        };
        Ok(Self {
            model: SvddModel {
                support_vectors: sv,
                alphas,
                threshold_r2: doc.threshold_r2,
                center_a: Array1::from(doc.center),
                offset_w: doc.offset_w,
                hyperparams,
                penalty: doc.penalty,
                n_train: doc.n_train,
                boundary_mask,
                column_names: doc.columns,
            },
            standardizer,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// First 16 hex digits of the SHA-256 of the serialized document.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl SvddModel {
    pub fn fingerprint(&self) -> String {
        ModelFile::new(self.clone()).fingerprint()
    }
}
