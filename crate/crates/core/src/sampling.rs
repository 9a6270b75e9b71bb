//! Reproducible uniform draws over a specification box.
//!
//! Draws are generated in fixed blocks of [`BLOCK_ROWS`] rows. Block `b`
//! uses `ChaCha8Rng::seed_from_u64(seed)` switched to stream `b`, so every
//! block is an independent substream of the master seed. Partitions are
//! contiguous runs of blocks handed to parallel workers; because the block
//! layout does not depend on the partition count, neither does the output.

use ndarray::{Array2, ArrayViewMut2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::params::MonteCarloConfig;
use crate::window::SpecLimits;

pub const BLOCK_ROWS: usize = 4096;

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn block_count(n_es: usize) -> usize {
    n_es.div_ceil(BLOCK_ROWS)
}

/// Fills `out` (rows of block `block`) with uniform draws.
pub(crate) fn fill_block(
    spec: &SpecLimits,
    seed: u64,
    block: usize,
    mut out: ArrayViewMut2<'_, f64>,
) {
    let mut rng = block_rng(seed, block as u64);
    let (lsl, usl) = (spec.lsl(), spec.usl());
    for mut row in out.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            let u: f64 = rng.random();
            *v = lsl[j] + (usl[j] - lsl[j]) * u;
        }
    }
}

/// Block ranges `[start, end)` assigned to each partition.
pub(crate) fn partition_blocks(n_es: usize, partitions: usize) -> Vec<std::ops::Range<usize>> {
    let nb = block_count(n_es);
    (0..partitions)
        .map(|p| (p * nb / partitions)..((p + 1) * nb / partitions))
        .collect()
}

pub(crate) fn block_rows(n_es: usize, block: usize) -> std::ops::Range<usize> {
    let start = block * BLOCK_ROWS;
    start..(start + BLOCK_ROWS).min(n_es)
}

/// Runs `f` on every block (in parallel over partitions) and returns the
/// per-block results in block order.
pub(crate) fn map_blocks<T, F>(mc: &MonteCarloConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    partition_blocks(mc.n_es(), mc.partitions())
        .into_par_iter()
        .flat_map_iter(|range| range.map(&f).collect::<Vec<_>>())
        .collect()
}

/// `n_es × q` matrix of draws, coordinate j uniform on `[lsl_j, usl_j)`.
pub fn simulate_spec_uniform(spec: &SpecLimits, mc: &MonteCarloConfig) -> Array2<f64> {
    let q = spec.q();
    let blocks = map_blocks(mc, |b| {
        let rows = block_rows(mc.n_es(), b);
        let mut buf = Array2::zeros((rows.len(), q));
        fill_block(spec, mc.seed(), b, buf.view_mut());
        buf
    });
    let mut out = Array2::zeros((mc.n_es(), q));
    for (b, buf) in blocks.into_iter().enumerate() {
        let rows = block_rows(mc.n_es(), b);
        out.slice_mut(ndarray::s![rows, ..]).assign(&buf);
    }
    out
}
