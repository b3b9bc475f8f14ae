//! Brute-force oracle: enumerate every initial set of a tiny graph.
//!
//! Runs its own dynamics on `u32` neighbourhood masks, independent of the
//! engines in [`crate::engine`].

use rayon::prelude::*;

use super::EstimateError;
use crate::engine::ThresholdSchedule;
use crate::graph::Graph;
use crate::numeric::neumaier_sum;

pub const EXACT_MAX_VERTICES: usize = 22;

/// `counts[s]` = number of percolating initial sets of size `s`, so that
/// `P_p(percolates) = Σ_s counts[s] pˢ (1-p)^(N-s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PercolationPolynomial {
    counts: Vec<u64>,
}

impl PercolationPolynomial {
    pub fn enumerate(g: &Graph, sched: &ThresholdSchedule) -> Result<Self, EstimateError> {
        let n = g.order();
        if n > EXACT_MAX_VERTICES {
            return Err(EstimateError::TooLarge {
                n,
                max: EXACT_MAX_VERTICES,
            });
        }
        let nbr: Vec<u32> = (0..n as u32)
            .map(|v| g.neighbors(v).iter().fold(0, |m, &u| m | 1 << u))
            .collect();
        let full: u32 = (1u32 << n) - 1;
        let k = sched.relaxed_rounds();
        let counts = (0..=full)
            .into_par_iter()
            .fold(
                || vec![0u64; n + 1],
                |mut acc, a0| {
                    if closure(&nbr, a0, sched, k) == full {
                        acc[a0.count_ones() as usize] += 1;
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; n + 1],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Ok(Self { counts })
    }

    pub fn order(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of percolating initial sets.
    pub fn percolating_sets(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn eval(&self, p: f64) -> f64 {
        let n = self.order() as i32;
        let q = 1.0 - p;
        neumaier_sum(
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(s, &c)| c as f64 * p.powi(s as i32) * q.powi(n - s as i32)),
        )
    }
}

fn closure(nbr: &[u32], mut cur: u32, sched: &ThresholdSchedule, k: usize) -> u32 {
    let mut m = 0;
    loop {
        let t = sched.threshold_at(m);
        let mut next = cur;
        for (v, &mask) in nbr.iter().enumerate() {
            if (mask & cur).count_ones() >= t {
                next |= 1 << v;
            }
        }
        if next == cur && m >= k {
            return cur;
        }
        cur = next;
        m += 1;
    }
}

/// `P_p(A percolates)` by enumerating all `2^N` initial sets.
pub fn exact_percolation_prob(
    g: &Graph,
    sched: &ThresholdSchedule,
    p: f64,
) -> Result<f64, EstimateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EstimateError::Probability(p));
    }
    Ok(PercolationPolynomial::enumerate(g, sched)?.eval(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> Graph {
        Graph::hypercube(2).unwrap()
    }

    #[test]
    fn q2_majority_counts() {
        // full set, four 3-sets, two antipodal pairs
        let poly = PercolationPolynomial::enumerate(&q2(), &ThresholdSchedule::constant(2)).unwrap();
        assert_eq!(poly.counts(), &[0, 0, 2, 4, 1]);
        assert_eq!(poly.eval(0.5), 0.4375);
    }

    #[test]
    fn q2_r1_matches_closed_form() {
        let s = ThresholdSchedule::constant(1);
        for p in [0.1, 0.3] {
            let exact = exact_percolation_prob(&q2(), &s, p).unwrap();
            assert!((exact - (1.0 - (1.0 - p).powi(4))).abs() < 1e-15);
        }
    }

    #[test]
    fn certain_at_full_density() {
        for (_, g) in crate::fixtures::cubic_twelve() {
            assert_eq!(exact_percolation_prob(&g, &ThresholdSchedule::majority(3), 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn half_density_is_dyadic() {
        let g = Graph::hypercube(3).unwrap();
        let poly = PercolationPolynomial::enumerate(&g, &ThresholdSchedule::majority(3)).unwrap();
        let scaled = poly.eval(0.5) * 256.0;
        assert_eq!(scaled, poly.percolating_sets() as f64);
    }

    #[test]
    fn refuses_large_graphs() {
        let g = Graph::hypercube(5).unwrap();
        assert!(matches!(
            exact_percolation_prob(&g, &ThresholdSchedule::constant(1), 0.5),
            Err(EstimateError::TooLarge { n: 32, .. })
        ));
    }
}
