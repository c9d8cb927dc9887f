use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dyadic::japanese;

/// `|(tau - xi^2) - [(tau1 - xi1^2) + (tau2 - xi2^2) - 2 xi1 xi2]|` with
/// `(tau, xi) = (tau1 + tau2, xi1 + xi2)`.
pub fn resonance_defect(tau1: f64, xi1: f64, tau2: f64, xi2: f64) -> f64 {
    let (tau, xi) = (tau1 + tau2, xi1 + xi2);
    let lhs = tau - xi * xi;
    let rhs = (tau1 - xi1 * xi1) + (tau2 - xi2 * xi2) - 2.0 * xi1 * xi2;
    (lhs - rhs).abs()
}

/// `max(<tau - xi^2>, <tau1 - xi1^2>, <tau2 - xi2^2>) - 2^{-5} <xi1 xi2>`.
pub fn resonance_estimate_margin(tau1: f64, xi1: f64, tau2: f64, xi2: f64) -> f64 {
    let (tau, xi) = (tau1 + tau2, xi1 + xi2);
    let m = japanese(tau - xi * xi).max(japanese(tau1 - xi1 * xi1)).max(japanese(tau2 - xi2 * xi2));
    m - japanese(xi1 * xi2) / 32.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceScan {
    pub tuples: usize,
    pub max_defect: f64,
    pub min_margin: f64,
}

/// Random lattice tuples (multiples of `2^-10`, magnitudes log-spread up to
/// `2^12`, both signs), on which every product and sum above is exact in
/// double precision. Each chunk of 4096 tuples has its own ChaCha stream.
pub fn resonance_scan(tuples: usize, seed: u64) -> ResonanceScan {
    const CHUNK: usize = 4096;
    let chunks = tuples.div_ceil(CHUNK);
    let (max_defect, min_margin) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut draw = || {
                let mag = (2f64.powf(rng.gen_range(-10.0..12.0)) * 1024.0).round() / 1024.0;
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            };
            let n = CHUNK.min(tuples - c * CHUNK);
            let (mut d, mut m) = (0.0f64, f64::INFINITY);
            for k in 0..n {
                let (xi1, xi2) = (draw(), draw());
                // half of the draws sit near the parabola and its reflection,
                // where the margin is tightest
                let (tau1, tau2) = if k % 2 == 0 {
                    (xi1 * xi1 + draw().clamp(-4.0, 4.0), -xi2 * xi2 + draw().clamp(-4.0, 4.0))
                } else {
                    (draw(), draw())
                };
                d = d.max(resonance_defect(tau1, xi1, tau2, xi2));
                m = m.min(resonance_estimate_margin(tau1, xi1, tau2, xi2));
            }
            (d, m)
        })
        .reduce(|| (0.0, f64::INFINITY), |a, b| (a.0.max(b.0), a.1.min(b.1)));
    ResonanceScan { tuples, max_defect, min_margin }
}
