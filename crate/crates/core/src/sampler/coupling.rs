//! Per-vertex uniforms for monotonically coupled initial sets.
//!
//! Vertex `v` of trial `t` under master seed `s` gets the uniform
//!
//! ```text
//! key(s, t) = mix(mix(s ^ 0x243F_6A88_85A3_08D3) ^ t)
//! u(s, t, v) = (mix(key(s, t) + (v + 1) · 0x9E37_79B9_7F4A_7C15) >> 11) · 2⁻⁵³
//! ```
//!
//! (wrapping 64-bit arithmetic), where `mix` is the SplitMix64 finaliser.
//! `v` is included iff `u < p`, so for a fixed `(s, t)` raising `p` only
//! adds vertices, and every platform draws the same sets.

use crate::bitset::VertexSet;
use crate::graph::{Graph, VertexId};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x243F_6A88_85A3_08D3;
const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn trial_key(master_seed: u64, trial: u64) -> u64 {
    mix64(mix64(master_seed ^ SEED_SALT) ^ trial)
}

#[inline]
fn raw53(key: u64, v: u64) -> u64 {
    mix64(key.wrapping_add(v.wrapping_add(1).wrapping_mul(GOLDEN))) >> 11
}

/// The uniform in `[0, 1)` attached to `(master_seed, trial, vertex)`.
pub fn vertex_uniform(master_seed: u64, trial: u64, vertex: VertexId) -> f64 {
    raw53(trial_key(master_seed, trial), vertex as u64) as f64 / TWO_POW_53
}

/// Initial set of trial `trial`: each vertex independently with probability `p`.
pub fn sample_initial(g: &Graph, p: f64, master_seed: u64, trial: u64) -> VertexSet {
    sample_initial_n(g.order(), p, master_seed, trial)
}

pub(crate) fn sample_initial_n(n: usize, p: f64, master_seed: u64, trial: u64) -> VertexSet {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    let key = trial_key(master_seed, trial);
    // u < p  ⇔  raw53 < p·2⁵³ exactly, since both sides are exact in f64.
    let cut = p * TWO_POW_53;
    let mut words = vec![0u64; crate::bitset::words_for(n)];
    for (w, word) in words.iter_mut().enumerate() {
        let base = (w as u64) << 6;
        let top = (n as u64).saturating_sub(base).min(64);
        let mut bits = 0u64;
        for b in 0..top {
            if (raw53(key, base + b) as f64) < cut {
                bits |= 1 << b;
            }
        }
        *word = bits;
    }
    VertexSet::from_words(n, words)
}
