//! Finite concentration inequalities and bound formulas, each evaluated with
//! explicit precondition flags, plus exact oracles to check them against.
//!
//! Logarithms are natural throughout. Bound values are never clamped to
//! `[0, 1]`.

mod binomial;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use statrs::function::factorial::ln_binomial;
use thiserror::Error;

pub use binomial::{binomial_cdf, binomial_median_bracket, exact_binomial_tail, MAX_BINOMIAL_N};

use crate::graph::SphereNeighborProfile;
use crate::numeric::neumaier_sum;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("{0}")]
    Domain(String),
    #[error("profile covers radii up to {have}, need {need}")]
    MissingRadius { have: u32, need: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Upper,
    Lower,
}

/// Which Chernoff tail: `P(S ≥ np + t)` or `P(S ≤ np - t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precondition {
    pub name: &'static str,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub name: &'static str,
    pub value: f64,
    pub direction: Direction,
    pub preconditions: Vec<Precondition>,
}

impl BoundResult {
    fn new(name: &'static str, value: f64, direction: Direction) -> Self {
        Self {
            name,
            value,
            direction,
            preconditions: Vec::new(),
        }
    }

    fn require(mut self, name: &'static str, ok: bool) -> Self {
        self.preconditions.push(Precondition { name, ok });
        self
    }

    pub fn preconditions_met(&self) -> bool {
        self.preconditions.iter().all(|c| c.ok)
    }

    /// Whether `exact` is on the promised side of the bound. Vacuously true
    /// outside the bound's regime.
    pub fn holds_for(&self, exact: f64) -> bool {
        !self.preconditions_met()
            || match self.direction {
                Direction::Upper => exact <= self.value,
                Direction::Lower => exact >= self.value,
            }
    }
}

/// `exp(-2t²/n)`, bounding `P(S ≥ np + t)` or `P(S ≤ np - t)` for
/// `S ~ Bin(n, p)`.
pub fn chernoff_upper(n: u64, p: f64, t: f64, side: Side) -> BoundResult {
    let name = match side {
        Side::Upper => "chernoff_upper",
        Side::Lower => "chernoff_lower_tail",
    };
    BoundResult::new(name, (-2.0 * t * t / n as f64).exp(), Direction::Upper)
        .require("t >= 0", t >= 0.0)
        .require("0 < p < 1", p > 0.0 && p < 1.0)
}

/// Regime limits for [`reverse_chernoff_lower`].
pub const REVERSE_CHERNOFF_N_MIN: u64 = 100;

/// `exp(-2δ²n - 4δ√(n/ln n) - (ln ln n)/2 - 6)`, a lower bound on
/// `P(S ≥ n/2 + C)` for `S ~ Bin(n, 1/2 - δ)`.
///
/// The argument asks for `n` large enough that `C ≤ ½√(n/ln n)`; that is
/// recorded as its own precondition, next to the `n ≥ n_min` floor.
pub fn reverse_chernoff_lower(n: u64, delta: f64, c: f64, n_min: u64) -> BoundResult {
    let nf = n as f64;
    let ln_n = nf.ln();
    let value = (-2.0 * delta * delta * nf
        - 4.0 * delta * (nf / ln_n).sqrt()
        - 0.5 * ln_n.ln()
        - 6.0)
        .exp();
    let regime = 8.0 * delta.powi(4) * nf;
    BoundResult::new("reverse_chernoff_lower", value, Direction::Lower)
        .require("C >= 0", c >= 0.0)
        .require("0 <= 8 delta^4 n <= 1", delta >= 0.0 && regime <= 1.0)
        .require("n >= n_min", n >= n_min.max(3))
        .require("C <= sqrt(n / ln n) / 2", c <= 0.5 * (nf / ln_n).sqrt())
}

/// The event bounded by [`reverse_chernoff_lower`], exactly.
pub fn reverse_chernoff_exact(n: u64, delta: f64, c: f64) -> Result<f64, BoundError> {
    let m = (n as f64 / 2.0 + c).ceil().max(0.0) as u64;
    exact_binomial_tail(n, 0.5 - delta, m)
}

/// `Y = Σ i·X_i` with independent `X_i ~ Bin(d_i, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBinomialSpec {
    pub layers: Vec<u64>,
    pub p: f64,
}

impl WeightedBinomialSpec {
    pub fn new(layers: Vec<u64>, p: f64) -> Self {
        Self { layers, p }
    }

    pub fn k(&self) -> usize {
        self.layers.len()
    }

    pub fn mean(&self) -> f64 {
        self.p * self.weighted(1) as f64
    }

    /// `D(k) = Σ i² d_i`.
    pub fn spread(&self) -> f64 {
        self.weighted(2) as f64
    }

    fn weighted(&self, power: u32) -> u64 {
        self.layers
            .iter()
            .enumerate()
            .map(|(i, &d)| (i as u64 + 1).pow(power) * d)
            .sum()
    }

    /// Exact law of `Y` by convolution; index `y` holds `P(Y = y)`.
    pub fn pmf(&self) -> Vec<f64> {
        let mut dist = vec![1.0];
        for (i, &d) in self.layers.iter().enumerate() {
            let w = i + 1;
            let layer: Vec<f64> = (0..=d)
                .map(|x| binomial_pmf(d, self.p, x))
                .collect();
            let mut next = vec![0.0; dist.len() + w * d as usize];
            for (y, &py) in dist.iter().enumerate() {
                for (x, &px) in layer.iter().enumerate() {
                    next[y + w * x] += py * px;
                }
            }
            dist = next;
        }
        dist
    }

    /// Exact `P(Y ≥ E(Y) + t)`.
    pub fn exact_tail(&self, t: f64) -> f64 {
        let cut = self.mean() + t;
        let pmf = self.pmf();
        // tolerate rounding in E(Y) when the cut is an integer
        neumaier_sum(
            pmf.iter()
                .enumerate()
                .filter(|(y, _)| *y as f64 >= cut - 1e-9)
                .map(|(_, &q)| q),
        )
    }

    /// Monte Carlo estimate of `P(Y ≥ E(Y) + t)` with its standard error.
    pub fn sample_tail(&self, t: f64, samples: u64, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let laws: Vec<Binomial> = self
            .layers
            .iter()
            .map(|&d| Binomial::new(d, self.p).expect("p in [0, 1]"))
            .collect();
        let cut = self.mean() + t - 1e-9;
        let hits = (0..samples)
            .filter(|_| {
                let y: u64 = laws
                    .iter()
                    .enumerate()
                    .map(|(i, law)| (i as u64 + 1) * law.sample(&mut rng))
                    .sum();
                y as f64 >= cut
            })
            .count();
        let est = hits as f64 / samples as f64;
        (est, (est * (1.0 - est) / samples as f64).sqrt())
    }
}

fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if p == 0.0 {
        f64::from(u8::from(k == 0))
    } else if p == 1.0 {
        f64::from(u8::from(k == n))
    } else {
        (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
    }
}

/// `(2t)^(k-1) exp(-2t²/D(k))`, bounding `P(Y ≥ E(Y) + t)`.
pub fn weighted_tail_upper(spec: &WeightedBinomialSpec, t: u64) -> BoundResult {
    let k = spec.k();
    let t = t as f64;
    let value = (2.0 * t).powi(k as i32 - 1) * (-2.0 * t * t / spec.spread()).exp();
    BoundResult::new("weighted_tail_upper", value, Direction::Upper)
        .require("t >= 1", t >= 1.0)
        .require("k >= 1", k >= 1)
        .require("0 < p < 1", spec.p > 0.0 && spec.p < 1.0)
}

/// `2 p^(m/2)`, bounding `P(Bin(n, p) ≥ m)` when `pn² ≤ 1`.
pub fn small_p_tail_upper(n: u64, p: f64, m: u64) -> BoundResult {
    let nf = n as f64;
    BoundResult::new("small_p_tail_upper", 2.0 * p.powf(m as f64 / 2.0), Direction::Upper)
        .require("p n^2 <= 1", p * nf * nf <= 1.0)
        .require("m <= n", m <= n)
        .require("0 < p < 1", p > 0.0 && p < 1.0)
}

/// `2^(n-1)/√(πn) · exp(-2m²/n - 1)`, a lower bound on `C(n, n/2 + m)`.
pub fn central_binomial_lower(n: u64, m: u64) -> BoundResult {
    let nf = n as f64;
    let mf = m as f64;
    let value = ((nf - 1.0) * std::f64::consts::LN_2
        - 0.5 * (std::f64::consts::PI * nf).ln()
        - 2.0 * mf * mf / nf
        - 1.0)
        .exp();
    BoundResult::new("central_binomial_lower", value, Direction::Lower)
        .require("n even", n % 2 == 0)
        .require("8m <= n", 8 * m <= n)
        .require("4m^3 <= n^2", 4 * (m as u128).pow(3) <= (n as u128).pow(2))
}

/// `C(n, n/2 + m)` in floating point (the quantity bounded by
/// [`central_binomial_lower`]); exact integer arithmetic while it fits.
pub fn central_binomial(n: u64, m: u64) -> f64 {
    let top = n / 2 + m;
    if top > n {
        return 0.0;
    }
    let k = top.min(n - top);
    let mut c: u128 = 1;
    for j in 0..k {
        match c.checked_mul(u128::from(n - j)) {
            Some(v) => c = v / u128::from(j + 1),
            None => return ln_binomial(n, top).exp(),
        }
    }
    c as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorityWindowBounds {
    pub n: u64,
    pub p_lower: f64,
    pub p_upper: f64,
}

/// `1/2 - ½√(ln n / n) + λ ln ln n / √(n ln n)`.
pub fn majority_window_p(n: u64, lambda: f64) -> Result<f64, BoundError> {
    if n < 16 {
        return Err(BoundError::Domain(format!("n = {n} < 16")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    Ok(0.5 - 0.5 * (ln_n / nf).sqrt() + lambda * ln_n.ln() / (nf * ln_n).sqrt())
}

/// The closed-form parts of the majority-threshold window on `Q_n`: the
/// lower expression at `λ = lambda_lo` and the upper at `λ = lambda_hi`
/// (the upper statement's `o(·)` term is not included).
pub fn majority_window_bounds(n: u64, lambda_lo: f64, lambda_hi: f64) -> Result<MajorityWindowBounds, BoundError> {
    Ok(MajorityWindowBounds {
        n,
        p_lower: majority_window_p(n, lambda_lo)?,
        p_upper: majority_window_p(n, lambda_hi)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DregCheck {
    /// `ln N`.
    pub ln_order: f64,
    /// `d^k / ((ωk)^k (f_{k-1} + f_k) Π_{i<k} f_i)`, the bound on `ln N`.
    pub exponent: f64,
    /// `ln(exponent) - ln(ln N)`; nonnegative iff the size condition holds.
    pub size_margin: f64,
    /// `max_{i ≤ k} f_i`.
    pub f_max: u32,
    /// `ln(d / (k ln d)) - ln f_max`; positive iff `f < d / (k ln d)`.
    pub smallness_margin: f64,
}

impl DregCheck {
    pub fn size_ok(&self) -> bool {
        self.size_margin >= 0.0
    }

    pub fn smallness_ok(&self) -> bool {
        self.smallness_margin > 0.0
    }
}

/// Check the size condition on `N` and the smallness of the profile for a
/// `d`-regular graph. `ln_order` is `ln N` so that huge graphs (`4^100`)
/// can be described.
pub fn dreg_condition_check(
    d: u64,
    k: u32,
    ln_order: f64,
    profile: &SphereNeighborProfile,
    omega: f64,
) -> Result<DregCheck, BoundError> {
    if d < 2 || k == 0 || omega.is_nan() || omega <= 0.0 || ln_order < 0.0 {
        return Err(BoundError::Domain(format!(
            "need d >= 2, k >= 1, omega > 0, N >= 1 (d={d}, k={k}, omega={omega})"
        )));
    }
    if profile.max_radius() < k {
        return Err(BoundError::MissingRadius {
            have: profile.max_radius(),
            need: k,
        });
    }
    let f = |i: u32| f64::from(profile.f(i).expect("radius checked"));
    let (df, kf) = (d as f64, f64::from(k));
    let ln_exponent = kf * df.ln()
        - kf * (omega * kf).ln()
        - (f(k - 1) + f(k)).ln()
        - (1..k).map(|i| f(i).ln()).sum::<f64>();
    let f_max = (1..=k).map(|i| profile.f(i).unwrap()).max().unwrap();
    Ok(DregCheck {
        ln_order,
        exponent: ln_exponent.exp(),
        size_margin: ln_exponent - ln_order.ln(),
        f_max,
        smallness_margin: (df / (kf * df.ln())).ln() - f64::from(f_max).ln(),
    })
}
