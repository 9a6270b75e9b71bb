//! Training: dual solve, support vector extraction, threshold and center.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Result, SvddError};
use crate::kernel::kernel_matrix;
use crate::params::{bound_tolerance, HyperParams};
use crate::solver::{self, DualSolution, SolverOptions};
use crate::window::ProcessWindow;

/// A trained data description.
///
/// Only the support vectors (multipliers above the bound tolerance) are
/// kept. `offset_w` is the constant `Σᵢⱼ αᵢ αⱼ K(xᵢ, xⱼ)` over them.
#[derive(Debug, Clone, PartialEq)]
pub struct SvddModel {
    pub(crate) support_vectors: Array2<f64>,
    pub(crate) alphas: Vec<f64>,
    pub(crate) threshold_r2: f64,
    pub(crate) center_a: Array1<f64>,
    pub(crate) offset_w: f64,
    pub(crate) hyperparams: HyperParams,
    pub(crate) penalty: f64,
    pub(crate) n_train: usize,
    pub(crate) boundary_mask: Vec<bool>,
    pub(crate) column_names: Vec<String>,
}

impl SvddModel {
    pub fn support_vectors(&self) -> ArrayView2<'_, f64> {
        self.support_vectors.view()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn threshold_r2(&self) -> f64 {
        self.threshold_r2
    }

    pub fn center(&self) -> &Array1<f64> {
        &self.center_a
    }

    pub fn offset_w(&self) -> f64 {
        self.offset_w
    }

    pub fn hyperparams(&self) -> HyperParams {
        self.hyperparams
    }

    /// Box bound `C` used in training.
    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn q(&self) -> usize {
        self.support_vectors.ncols()
    }

    pub fn n_support(&self) -> usize {
        self.alphas.len()
    }

    /// Support vectors with `ε < α < C − ε`, i.e. those on the boundary.
    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary_mask
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }
}

/// Convergence diagnostics from [`train_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub iterations: usize,
    pub kkt_violation: f64,
    pub objective: f64,
    /// Per-boundary-vector threshold values; their spread is a convergence
    /// check.
    pub boundary_thresholds: Vec<f64>,
}

impl TrainingReport {
    /// `(max − min) / mean` of the boundary thresholds, or 0 when fewer than
    /// two exist.
    pub fn relative_threshold_spread(&self) -> f64 {
        spread(&self.boundary_thresholds)
    }
}

pub(crate) fn spread(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean > 0.0 {
        (max - min) / mean
    } else {
        max - min
    }
}

pub fn train(window: &ProcessWindow, hp: HyperParams) -> Result<SvddModel> {
    train_detailed(window, hp, &SolverOptions::default()).map(|(m, _)| m)
}

/// Trains and also returns solver diagnostics.
///
/// Multipliers that end below the bound tolerance are removed and the
/// remaining problem is re-solved from the warm start, so the stored support
/// set satisfies the KKT conditions on its own.
pub fn train_detailed(
    window: &ProcessWindow,
    hp: HyperParams,
    options: &SolverOptions,
) -> Result<(SvddModel, TrainingReport)> {
    let n = window.n();
    let penalty = hp.penalty(n);
    let kernel = kernel_matrix(window.observations(), hp.bandwidth())?;
    let mut solution = solver::solve_dual_with(kernel.view(), penalty, options, |_, _| {})?;
    let mut iterations = solution.iterations;
    let eps = bound_tolerance(penalty);

    for _ in 0..8 {
        if !solution.converged {
            break;
        }
        let tiny: Vec<usize> = (0..n)
            .filter(|&i| solution.alphas[i] > 0.0 && solution.alphas[i] <= eps)
            .collect();
        if tiny.is_empty() {
            break;
        }
        let mut alphas = solution.alphas.clone();
        let mut mass = 0.0;
        for &i in &tiny {
            mass += alphas[i];
            alphas[i] = 0.0;
        }
        let active: Vec<usize> = (0..n).filter(|&i| alphas[i] > 0.0).collect();
        if let Some(&recv) = active.iter().find(|&&i| alphas[i] + mass <= penalty) {
            alphas[recv] += mass;
        } else {
            break;
        }
        solution =
            solver::solve_restricted(kernel.view(), penalty, alphas, &active, options, |_, _| {});
        iterations += solution.iterations;
    }

    if !solution.converged {
        return Err(SvddError::NotConverged {
            iterations,
            violation: solution.kkt_violation,
        });
    }

    // anything still at or below ε is not a support vector
    for a in solution.alphas.iter_mut() {
        if *a <= eps {
            *a = 0.0;
        }
    }
    let boundary = boundary_thresholds(&solution, kernel.view(), penalty);
    let threshold_r2 = compute_threshold(&solution, kernel.view(), penalty)?;
    let center_a = compute_center(&solution, window)?;

    let sv_idx: Vec<usize> = (0..n).filter(|&i| solution.alphas[i] > eps).collect();
    let q = window.q();
    let mut support_vectors = Array2::zeros((sv_idx.len(), q));
    for (r, &i) in sv_idx.iter().enumerate() {
        support_vectors.row_mut(r).assign(&window.row(i));
    }
    let alphas: Vec<f64> = sv_idx.iter().map(|&i| solution.alphas[i]).collect();
    let boundary_mask = alphas
        .iter()
        .map(|&a| a > eps && a < penalty - eps)
        .collect();
    let sub_kernel = Array2::from_shape_fn((sv_idx.len(), sv_idx.len()), |(a, b)| {
        kernel[[sv_idx[a], sv_idx[b]]]
    });
    let offset_w = solver::quadratic_form(sub_kernel.view(), &alphas);

    let model = SvddModel {
        support_vectors,
        alphas,
        threshold_r2,
        center_a,
        offset_w,
        hyperparams: hp,
        penalty,
        n_train: n,
        boundary_mask,
        column_names: window.column_names().to_vec(),
    };
    let report = TrainingReport {
        iterations,
        kkt_violation: solution.kkt_violation,
        objective: solution.objective,
        boundary_thresholds: boundary,
    };
    Ok((model, report))
}

/// `K(xₖ,xₖ) − 2Σᵢ αᵢ K(xᵢ,xₖ) + Σᵢⱼ αᵢαⱼ K(xᵢ,xⱼ)` for every multiplier
/// strictly inside `(ε, C − ε)`.
pub fn boundary_thresholds(
    solution: &DualSolution,
    kernel: ArrayView2<'_, f64>,
    penalty: f64,
) -> Vec<f64> {
    let eps = bound_tolerance(penalty);
    per_vector_thresholds(solution, kernel, |a| a > eps && a < penalty - eps)
}

fn per_vector_thresholds(
    solution: &DualSolution,
    kernel: ArrayView2<'_, f64>,
    select: impl Fn(f64) -> bool,
) -> Vec<f64> {
    let alphas = &solution.alphas;
    let w = solver::quadratic_form(kernel, alphas);
    let support: Vec<usize> = (0..alphas.len()).filter(|&i| alphas[i] != 0.0).collect();
    (0..alphas.len())
        .filter(|&k| select(alphas[k]))
        .map(|k| {
            let cross: f64 = support.iter().map(|&i| alphas[i] * kernel[[i, k]]).sum();
            kernel[[k, k]] - 2.0 * cross + w
        })
        .collect()
}

/// Threshold R², averaged over all boundary support vectors.
///
/// When every support vector sits at the upper bound the threshold is still
/// determined if they all share the same distance (for instance a single
/// training point); otherwise the model is degenerate.
pub fn compute_threshold(
    solution: &DualSolution,
    kernel: ArrayView2<'_, f64>,
    penalty: f64,
) -> Result<f64> {
    let eps = bound_tolerance(penalty);
    let mut values = boundary_thresholds(solution, kernel, penalty);
    if values.is_empty() {
        values = per_vector_thresholds(solution, kernel, |a| a > eps);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if values.is_empty() || max - min > 1e-9 {
            return Err(SvddError::DegenerateModel);
        }
    }
    let r2 = values.iter().sum::<f64>() / values.len() as f64;
    Ok(r2.max(0.0))
}

/// Input-space center `a = Σ αᵢ xᵢ`.
pub fn compute_center(solution: &DualSolution, window: &ProcessWindow) -> Result<Array1<f64>> {
    if solution.alphas.len() != window.n() {
        return Err(SvddError::DimensionMismatch {
            expected: window.n(),
            found: solution.alphas.len(),
        });
    }
    let mut a = Array1::zeros(window.q());
    for (i, &alpha) in solution.alphas.iter().enumerate() {
        if alpha != 0.0 {
            a.scaled_add(alpha, &window.row(i));
        }
    }
    Ok(a)
}
