//! Rayon driver for the Monte-Carlo kernels.
//!
//! Chunks are computed in parallel but reduced in index order with the same
//! tree as the serial driver, so results do not depend on the worker count.

use pinchlink_core::montecarlo::{
    chunk_count, chunk_moments, chunk_moments_n, estimates_from, reduce_n, trial_channel_gain, trial_channel_gains,
    PhaseRandomization,
};
use pinchlink_core::stats::{tree_reduce, Moments};
use pinchlink_core::{McEstimate, Scheme, SystemConfig};
use rayon::prelude::*;

pub fn run_moments<F: Fn(u64) -> f64 + Sync>(trials: u64, f: F) -> Moments {
    let parts: Vec<Moments> = (0..chunk_count(trials))
        .into_par_iter()
        .map(|c| chunk_moments(c, trials, &f))
        .collect();
    tree_reduce(&parts)
}

pub fn run_moments_n<const N: usize, F: Fn(u64) -> [f64; N] + Sync>(trials: u64, f: F) -> [Moments; N] {
    let parts: Vec<[Moments; N]> = (0..chunk_count(trials))
        .into_par_iter()
        .map(|c| chunk_moments_n(c, trials, &f))
        .collect();
    reduce_n(&parts)
}

pub fn estimate_snr(
    scheme: Scheme,
    cfg: &SystemConfig,
    trials: u64,
    seed: u64,
    mode: PhaseRandomization,
) -> McEstimate {
    let gamma = cfg.transmit_snr();
    let m = run_moments(trials.max(1), |t| trial_channel_gain(scheme, cfg, mode, seed, t) * gamma);
    McEstimate::from_moments(scheme, m, seed)
}

/// All four schemes from shared draws, in [`Scheme::ALL`] order.
pub fn estimate_all(cfg: &SystemConfig, trials: u64, seed: u64, mode: PhaseRandomization) -> [McEstimate; 4] {
    let gamma = cfg.transmit_snr();
    let m = run_moments_n(trials.max(1), |t| trial_channel_gains(cfg, mode, seed, t).map(|g| g * gamma));
    estimates_from(m, seed)
}
