//! Dual solver for the kernelized data description problem
//!
//! ```text
//! maximize   Σ αᵢ Kᵢᵢ − Σᵢⱼ αᵢ αⱼ Kᵢⱼ
//! subject to Σ αᵢ = 1,  0 ≤ αᵢ ≤ C
//! ```
//!
//! Two-variable working-set descent: each step moves mass from the
//! multiplier with the smallest dual gradient that can still decrease to the
//! one with the largest gradient that can still increase. The two-variable
//! subproblem is a concave quadratic along the direction `eᵢ − eⱼ` and is
//! solved in closed form, then clipped to the box. Every step keeps
//! `Σ α = 1`, and the objective never decreases.
//!
//! The dual gradient `hₖ = Kₖₖ − 2 (Kα)ₖ` differs from the scoring distance
//! `dist²(xₖ)` only by the constant `αᵀKα`, so the maximal KKT violation is
//! measured directly in units of squared feature-space distance.

use ndarray::ArrayView2;

use crate::error::{Result, SvddError};

/// KKT tolerance, relative to `min(1, R²)`.
pub const KKT_TOLERANCE: f64 = 1e-10;

/// Absolute floor on the stopping tolerance; double precision cannot resolve
/// gradient differences much below this.
const TOLERANCE_FLOOR: f64 = 1e-14;

const HARD_ITERATION_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    /// Defaults to `100 n²`, capped at 10⁷.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: KKT_TOLERANCE,
            max_iterations: None,
        }
    }
}

impl SolverOptions {
    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| 100usize.saturating_mul(n).saturating_mul(n))
            .clamp(1, HARD_ITERATION_CAP)
    }
}

/// Multipliers returned by [`solve_dual`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub kkt_violation: f64,
    pub converged: bool,
}

/// Solves the dual from the uniform start `αᵢ = 1/n`.
///
/// Hitting the iteration cap is not an error; the best iterate is returned
/// with `converged == false`.
pub fn solve_dual(kernel: ArrayView2<'_, f64>, penalty: f64) -> Result<DualSolution> {
    solve_dual_with(kernel, penalty, &SolverOptions::default(), |_, _| {})
}

/// [`solve_dual`] with explicit options and a per-iteration observer that
/// receives `(iteration, objective)`.
pub fn solve_dual_with<F>(
    kernel: ArrayView2<'_, f64>,
    penalty: f64,
    options: &SolverOptions,
    observer: F,
) -> Result<DualSolution>
where
    F: FnMut(usize, f64),
{
    let n = validate(kernel, penalty)?;
    let alphas = vec![1.0 / n as f64; n];
    let active: Vec<usize> = (0..n).collect();
    Ok(solve_restricted(
        kernel, penalty, alphas, &active, options, observer,
    ))
}

fn validate(kernel: ArrayView2<'_, f64>, penalty: f64) -> Result<usize> {
    let (n, m) = kernel.dim();
    if n == 0 {
        return Err(SvddError::Empty("kernel matrix".into()));
    }
    if n != m {
        return Err(SvddError::DimensionMismatch {
            expected: n,
            found: m,
        });
    }
    if kernel.iter().any(|v| !v.is_finite()) {
        return Err(SvddError::NonFinite("kernel matrix".into()));
    }
    if !(penalty.is_finite() && penalty * n as f64 >= 1.0 - 1e-12) {
        return Err(SvddError::InvalidParameter(format!(
            "penalty C = {penalty} is infeasible for n = {n}: need C >= 1/n"
        )));
    }
    Ok(n)
}

/// `αᵀKα` restricted to nonzero multipliers.
pub(crate) fn quadratic_form(kernel: ArrayView2<'_, f64>, alphas: &[f64]) -> f64 {
    let nz: Vec<usize> = (0..alphas.len()).filter(|&i| alphas[i] != 0.0).collect();
    nz.iter()
        .map(|&i| alphas[i] * nz.iter().map(|&j| alphas[j] * kernel[[i, j]]).sum::<f64>())
        .sum()
}

pub(crate) fn dual_objective(kernel: ArrayView2<'_, f64>, alphas: &[f64]) -> f64 {
    let linear: f64 = alphas
        .iter()
        .enumerate()
        .map(|(i, a)| a * kernel[[i, i]])
        .sum();
    linear - quadratic_form(kernel, alphas)
}

struct State<'a> {
    kernel: ArrayView2<'a, f64>,
    penalty: f64,
    alphas: Vec<f64>,
    /// `hₖ = Kₖₖ − 2 (Kα)ₖ` for every k in `active`.
    grad: Vec<f64>,
    active: &'a [usize],
}

impl State<'_> {
    fn refresh_gradient(&mut self) {
        let support: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&i| self.alphas[i] != 0.0)
            .collect();
        for &k in self.active {
            let ka: f64 = support
                .iter()
                .map(|&i| self.alphas[i] * self.kernel[[i, k]])
                .sum();
            self.grad[k] = self.kernel[[k, k]] - 2.0 * ka;
        }
    }

    /// Maximal violating pair `(up, down, violation)`; ties go to the lowest
    /// index.
    fn select_pair(&self) -> Option<(usize, usize, f64)> {
        let mut up: Option<usize> = None;
        let mut down: Option<usize> = None;
        for &k in self.active {
            let a = self.alphas[k];
            if a < self.penalty && up.is_none_or(|u| self.grad[k] > self.grad[u]) {
                up = Some(k);
            }
            if a > 0.0 && down.is_none_or(|d| self.grad[k] < self.grad[d]) {
                down = Some(k);
            }
        }
        let (u, d) = (up?, down?);
        Some((u, d, self.grad[u] - self.grad[d]))
    }

    /// Current estimate of R²: mean of `hₖ + αᵀKα` over multipliers strictly
    /// inside the box.
    fn threshold_estimate(&self) -> f64 {
        let w: f64 = self
            .active
            .iter()
            .map(|&i| self.alphas[i] * 0.5 * (self.kernel[[i, i]] - self.grad[i]))
            .sum();
        let free: Vec<f64> = self
            .active
            .iter()
            .filter(|&&i| self.alphas[i] > 0.0 && self.alphas[i] < self.penalty)
            .map(|&i| self.grad[i] + w)
            .collect();
        if free.is_empty() {
            1.0
        } else {
            free.iter().sum::<f64>() / free.len() as f64
        }
    }

    fn stopping_tolerance(&self, relative: f64) -> f64 {
        (relative * self.threshold_estimate().clamp(0.0, 1.0)).max(TOLERANCE_FLOOR)
    }

    /// Moves mass from `down` to `up`; returns the objective gain.
    fn step(&mut self, up: usize, down: usize) -> f64 {
        let k = &self.kernel;
        let gap = self.grad[up] - self.grad[down];
        let curvature = k[[up, up]] + k[[down, down]] - 2.0 * k[[up, down]];
        let room = (self.penalty - self.alphas[up]).min(self.alphas[down]);
        let t = if curvature > 1e-15 {
            (gap / (2.0 * curvature)).min(room)
        } else {
            room
        };
        if t <= 0.0 {
            return 0.0;
        }
        if t == self.penalty - self.alphas[up] {
            self.alphas[up] = self.penalty;
        } else {
            self.alphas[up] += t;
        }
        if t == self.alphas[down] {
            self.alphas[down] = 0.0;
        } else {
            self.alphas[down] -= t;
        }
        for &i in self.active {
            self.grad[i] -= 2.0 * t * (k[[i, up]] - k[[i, down]]);
        }
        t * gap - t * t * curvature
    }
}

/// Runs the pair descent over `active` indices only, starting from a
/// feasible `alphas` whose mass outside `active` is zero.
pub(crate) fn solve_restricted<F>(
    kernel: ArrayView2<'_, f64>,
    penalty: f64,
    alphas: Vec<f64>,
    active: &[usize],
    options: &SolverOptions,
    mut observer: F,
) -> DualSolution
where
    F: FnMut(usize, f64),
{
    let n = kernel.nrows();
    let cap = options.iteration_cap(active.len());
    let mut state = State {
        kernel,
        penalty,
        grad: vec![0.0; n],
        alphas,
        active,
    };
    state.refresh_gradient();
    let mut objective = dual_objective(kernel, &state.alphas);
    observer(0, objective);

    let mut iterations = 0;
    let mut violation;
    let mut converged = false;
    loop {
        let Some((up, down, v)) = state.select_pair() else {
            violation = 0.0;
            converged = true;
            break;
        };
        violation = v;
        if violation <= state.stopping_tolerance(options.tolerance) {
            // confirm against a freshly accumulated gradient
            state.refresh_gradient();
            match state.select_pair() {
                Some((_, _, v)) if v > state.stopping_tolerance(options.tolerance) => {
                    violation = v;
                }
                other => {
                    violation = other.map_or(0.0, |p| p.2.max(0.0));
                    converged = true;
                    break;
                }
            }
        }
        if iterations >= cap {
            break;
        }
        let (up, down) = match state.select_pair() {
            Some((u, d, _)) => (u, d),
            None => (up, down),
        };
        objective += state.step(up, down);
        iterations += 1;
        observer(iterations, objective);
    }

    let alphas = state.alphas;
    DualSolution {
        objective: dual_objective(kernel, &alphas),
        alphas,
        iterations,
        kkt_violation: violation.max(0.0),
        converged,
    }
}
