//! Support vector data description (SVDD) with a Gaussian kernel, and the
//! non-parametric multivariate process capability vector `[Cp, dist, p]`
//! built on it.
//!
//! The pipeline: train a description of an in-control [`ProcessWindow`],
//! draw uniform points from the engineering [`SpecLimits`] box, and count how
//! many the description accepts. `Cp` is the ratio of draws to accepted
//! draws, `dist` the distance between the description's center and the box
//! center, and `p` the share of observed rows outside the box.
//!
//! ```
//! use svddcap::{compute_pcsvdd, HyperParams, MonteCarloConfig, ProcessWindow, SpecLimits};
//!
//! let window = ProcessWindow::from_rows(&[
//!     vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.5],
//! ]).unwrap();
//! let spec = SpecLimits::from_bounds(&[(-4.0, 5.0), (-4.0, 5.0)]).unwrap();
//! let hp = HyperParams::new(0.8, 1e-6).unwrap();
//! let mc = MonteCarloConfig::new(20_000, 7).unwrap();
//! let vector = compute_pcsvdd(&window, &spec, hp, &mc).unwrap();
//! assert!(vector.cp > 1.0);
//! assert_eq!(vector.p, 0.0);
//! ```

pub mod capability;
pub mod datagen;
pub mod error;
pub mod kernel;
pub mod model_io;
pub mod params;
pub mod plot;
pub mod sampling;
pub mod scorer;
pub mod solver;
pub mod trainer;
pub mod window;

pub use capability::{
    capability_with_model, compute_cp, compute_dist, compute_p, compute_pcsvdd, CapabilityReport,
    CapabilityVector, CpEstimate,
};
pub use datagen::{generate, Shape, ShapeKind, ShapeSpec};
pub use error::{Result, SvddError};
pub use kernel::{kernel_eval, kernel_matrix, median_distance_bandwidth};
pub use model_io::ModelFile;
pub use params::{bound_tolerance, HyperParams, MonteCarloConfig, DEFAULT_OUTLIER_FRACTION};
pub use plot::InlierGrid;
pub use sampling::simulate_spec_uniform;
pub use scorer::{score, score_batch, ScoreResult};
pub use solver::{solve_dual, solve_dual_with, DualSolution, SolverOptions};
pub use trainer::{
    boundary_thresholds, compute_center, compute_threshold, train, train_detailed, SvddModel,
    TrainingReport,
};
pub use window::{ProcessWindow, SpecLimits, Standardizer};
