#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svddcap::{generate, median_distance_bandwidth, ProcessWindow, Shape, ShapeSpec, SpecLimits};

/// Exact optimum of `max dᵀα − αᵀKα, Σα = 1, 0 ≤ α ≤ C` by enumerating
/// every assignment of each multiplier to {lower bound, upper bound, free}
/// and solving the equality-constrained KKT system on the free set.
///
/// Returns `(objective, alphas)`. Only practical for n ≤ 8.
pub fn active_set_oracle(kernel: ArrayView2<'_, f64>, penalty: f64) -> (f64, Vec<f64>) {
    let n = kernel.nrows();
    assert!(n <= 8);
    let d: Vec<f64> = (0..n).map(|i| kernel[[i, i]]).collect();
    let objective = |a: &[f64]| -> f64 {
        let lin: f64 = a.iter().zip(&d).map(|(x, y)| x * y).sum();
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += a[i] * a[j] * kernel[[i, j]];
            }
        }
        lin - quad
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        // 0 = lower, 1 = upper, 2 = free
        let mut c = code;
        let mut state = vec![0u8; n];
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        let upper: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha = vec![0.0; n];
        for &i in &upper {
            alpha[i] = penalty;
        }
        let rest = 1.0 - penalty * upper.len() as f64;
        if free.is_empty() {
            if rest.abs() > 1e-12 {
                continue;
            }
        } else {
            let m = free.len();
            let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut b = DVector::<f64>::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = 2.0 * kernel[[i, j]];
                }
                a[(r, m)] = 1.0;
                a[(m, r)] = 1.0;
                let coupling: f64 = upper.iter().map(|&j| kernel[[i, j]] * penalty).sum();
                b[r] = d[i] - 2.0 * coupling;
            }
            b[m] = rest;
            let Some(sol) = a.lu().solve(&b) else {
                continue;
            };
            let mut ok = true;
            for (r, &i) in free.iter().enumerate() {
                let v = sol[r];
                if !(v >= -1e-12 && v <= penalty + 1e-12) {
                    ok = false;
                    break;
                }
                alpha[i] = v.clamp(0.0, penalty);
            }
            if !ok {
                continue;
            }
        }
        let obj = objective(&alpha);
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, alpha));
        }
    }
    best.expect("feasible set is non-empty when C >= 1/n")
}

/// Random dual instance: `(kernel, penalty, n, q)`.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (Array2<f64>, f64, usize, usize) {
    let n = rng.random_range(2..=6);
    let q = rng.random_range(1..=3);
    let data = Array2::from_shape_fn((n, q), |_| rng.random_range(-2.0..2.0));
    let s = rng.random_range(0.3..3.0);
    // mix tight boxes (f near 1) with effectively unbounded ones
    let f = match rng.random_range(0..3) {
        0 => rng.random_range(0.5..=1.0),
        1 => rng.random_range(0.05..0.5),
        _ => 1e-6,
    };
    let kernel = svddcap::kernel_matrix(data.view(), s).unwrap();
    (kernel, 1.0 / (n as f64 * f), n, q)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform disk of radius 2 at the origin.
pub fn disk_window(n: usize, seed: u64) -> ProcessWindow {
    generate(&ShapeSpec::new(Shape::default_disk(), n, seed)).unwrap()
}

pub fn disk_spec() -> SpecLimits {
    SpecLimits::from_bounds(&[(-4.0, 4.0), (-4.0, 4.0)]).unwrap()
}

pub fn disk_bandwidth(w: &ProcessWindow) -> f64 {
    median_distance_bandwidth(w.observations())
}

pub fn boomerang_window() -> ProcessWindow {
    generate(&ShapeSpec::new(Shape::default_boomerang(), 600, 3)).unwrap()
}

pub fn boomerang_spec() -> SpecLimits {
    SpecLimits::from_bounds(&[(-2.0, 12.0), (-2.0, 12.0)]).unwrap()
}

pub const BOOMERANG_BANDWIDTH: f64 = 0.7263714897;

pub fn two_donut_window() -> ProcessWindow {
    generate(&ShapeSpec::new(Shape::default_two_donut(), 600, 4)).unwrap()
}

pub fn two_donut_spec() -> SpecLimits {
    SpecLimits::from_bounds(&[(-10.0, 20.0), (-10.0, 30.0)]).unwrap()
}

pub const TWO_DONUT_BANDWIDTH: f64 = 2.8127912992;

/// 28 three-variable observations in a small ball inside the steel-sleeve
/// specification box (A ∈ [64, 171], B ∈ [0, 132], C ∈ [70, 147]).
pub fn sleeve_like_window() -> ProcessWindow {
    generate(&ShapeSpec::new(
        Shape::Disk {
            center: vec![120.0, 62.0, 110.0],
            radius: 12.0,
        },
        28,
        12,
    ))
    .unwrap()
}

pub fn sleeve_spec() -> SpecLimits {
    SpecLimits::from_bounds(&[(64.0, 171.0), (0.0, 132.0), (70.0, 147.0)]).unwrap()
}
