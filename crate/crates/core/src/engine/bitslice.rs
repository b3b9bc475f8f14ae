//! Bit-sliced majority kernel for `Q_n`.
//!
//! Vertex `v` lives at bit `v & 63` of word `v >> 6`. Its neighbour across
//! axis `i ≥ 6` is the same bit of word `w ^ (1 << (i - 6))`; across axis
//! `i < 6` it is a fixed in-word bit permutation. Summing the `n` permuted
//! words into five bit planes gives 64 neighbour counts at once.

use super::{EngineError, ThresholdSchedule};
use crate::bitset::{BitIter, VertexSet};

/// Positions whose bit `i` is zero, for `i < 6`.
const LOW: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

const PLANES: usize = 5;

#[inline(always)]
fn flip_axis(w: u64, i: u32) -> u64 {
    let s = 1u32 << i;
    ((w >> s) & LOW[i as usize]) | ((w & LOW[i as usize]) << s)
}

/// Mask of `count ≥ threshold` from bit planes (LSB first).
#[inline(always)]
fn at_least(planes: &[u64; PLANES], threshold: u32) -> u64 {
    if threshold >= 1 << PLANES {
        return 0;
    }
    let (mut gt, mut eq) = (0u64, u64::MAX);
    for j in (0..PLANES).rev() {
        let c = planes[j];
        if (threshold >> j) & 1 == 1 {
            eq &= c;
        } else {
            gt |= eq & c;
            eq &= !c;
        }
    }
    gt | eq
}

fn valid_mask(dim: u32) -> u64 {
    if dim >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << dim)) - 1
    }
}

/// Write into `new` the healthy vertices with at least `threshold` infected
/// neighbours. Returns the number of such vertices.
pub(super) fn new_infections(dim: u32, inf: &[u64], new: &mut [u64], threshold: u32) -> usize {
    let valid = valid_mask(dim);
    let low_axes = dim.min(6);
    let mut total = 0usize;
    for (w, out) in new.iter_mut().enumerate() {
        let healthy = !inf[w] & valid;
        if healthy == 0 {
            *out = 0;
            continue;
        }
        let mut planes = [0u64; PLANES];
        let mut add = |x: u64| {
            let mut carry = x;
            for p in planes.iter_mut() {
                if carry == 0 {
                    break;
                }
                let c = *p & carry;
                *p ^= carry;
                carry = c;
            }
        };
        for i in 0..low_axes {
            add(flip_axis(inf[w], i));
        }
        for i in 6..dim {
            add(inf[w ^ (1usize << (i - 6))]);
        }
        let joined = at_least(&planes, threshold) & healthy;
        *out = joined;
        total += joined.count_ones() as usize;
    }
    total
}

pub(super) struct Scratch {
    dim: u32,
    current: Vec<u64>,
    new: Vec<u64>,
}

impl Scratch {
    pub(super) fn new(dim: u32) -> Self {
        let words = crate::bitset::words_for(1usize << dim);
        Self {
            dim,
            current: vec![0; words],
            new: vec![0; words],
        }
    }

    pub(super) fn run(
        &mut self,
        initial: &VertexSet,
        sched: &ThresholdSchedule,
        cap: usize,
        mut rounds: Option<&mut [u32]>,
    ) -> Result<(Vec<usize>, VertexSet), EngineError> {
        let n = 1usize << self.dim;
        self.current.copy_from_slice(initial.words());
        let mut count = initial.count();
        let mut counts = vec![count];
        let k = sched.relaxed_rounds();
        let mut m = 0usize;
        loop {
            if m >= cap {
                return Err(EngineError::RoundCap { cap });
            }
            let added = if count == n {
                0
            } else {
                new_infections(self.dim, &self.current, &mut self.new, sched.threshold_at(m))
            };
            if added == 0 && m >= k {
                break;
            }
            if added > 0 {
                for (w, (cur, new)) in self.current.iter_mut().zip(&self.new).enumerate() {
                    *cur |= new;
                    if let Some(r) = rounds.as_deref_mut() {
                        for b in BitIter(*new) {
                            r[(w << 6) | b as usize] = (m + 1) as u32;
                        }
                    }
                }
            }
            count += added;
            counts.push(count);
            m += 1;
        }
        Ok((counts, VertexSet::from_words(n, self.current.clone())))
    }
}
