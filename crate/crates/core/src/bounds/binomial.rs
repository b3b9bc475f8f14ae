//! Exact binomial tails.
//!
//! Near the bulk the pmf is built by the ratio recurrence outward from the
//! mode and normalised by its own total, so `P(≥ m) + P(≤ m-1)` is 1 up to
//! rounding. Tails that underflow relative to the mode are evaluated in log
//! space from their first term.

use statrs::function::factorial::ln_binomial;

use super::BoundError;
use crate::numeric::Neumaier;

pub const MAX_BINOMIAL_N: u64 = 1_000_000;

/// Below this ratio to the mode's mass a tail switches to log space.
const FAR: f64 = 1e-200;

fn check(n: u64, p: f64) -> Result<(), BoundError> {
    if n > MAX_BINOMIAL_N {
        return Err(BoundError::Domain(format!("n = {n} exceeds {MAX_BINOMIAL_N}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(BoundError::Domain(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

fn mode(n: u64, p: f64) -> u64 {
    (((n + 1) as f64 * p).floor() as u64).min(n)
}

/// `ln P(Bin(n,p) = k)` for `0 < p < 1`.
fn ln_pmf(n: u64, p: f64, k: u64) -> f64 {
    ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

/// `ln Σ_{j ≥ m} P(= j)` for `m` above the mode, where terms decrease.
fn ln_far_upper(n: u64, p: f64, m: u64) -> f64 {
    let odds = p / (1.0 - p);
    let mut acc = Neumaier::default();
    let mut term = 1.0;
    let mut k = m;
    loop {
        acc.add(term);
        if k == n {
            break;
        }
        term *= (n - k) as f64 / (k + 1) as f64 * odds;
        k += 1;
        if term < 1e-18 * acc.value() {
            break;
        }
    }
    ln_pmf(n, p, m) + acc.value().ln()
}

/// Weights `w_k = P(= k) / P(= mode)` over the support, with the sums of the
/// parts below and at-or-above `m`.
fn split_mass(n: u64, p: f64, m: u64) -> (f64, f64, f64) {
    let md = mode(n, p);
    let odds = p / (1.0 - p);
    let (mut lower, mut upper) = (Neumaier::default(), Neumaier::default());
    let mut w_m = if m == md { 1.0 } else { 0.0 };
    let add = |k: u64, w: f64, lower: &mut Neumaier, upper: &mut Neumaier| {
        if k >= m {
            upper.add(w);
        } else {
            lower.add(w);
        }
    };
    add(md, 1.0, &mut lower, &mut upper);
    let mut w = 1.0;
    for k in md + 1..=n {
        w *= (n - k + 1) as f64 / k as f64 * odds;
        if k == m {
            w_m = w;
        }
        if w == 0.0 {
            break;
        }
        add(k, w, &mut lower, &mut upper);
    }
    let mut w = 1.0;
    for k in (0..md).rev() {
        w *= (k + 1) as f64 / (n - k) as f64 / odds;
        if k == m {
            w_m = w;
        }
        if w == 0.0 {
            break;
        }
        add(k, w, &mut lower, &mut upper);
    }
    (lower.value(), upper.value(), w_m)
}

/// `P(Bin(n, p) ≥ m)`.
pub fn exact_binomial_tail(n: u64, p: f64, m: u64) -> Result<f64, BoundError> {
    check(n, p)?;
    if m == 0 {
        return Ok(1.0);
    }
    if m > n {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let (lower, upper, w_m) = split_mass(n, p, m);
    if m > mode(n, p) && w_m < FAR {
        return Ok(ln_far_upper(n, p, m).exp());
    }
    Ok(upper / (lower + upper))
}

/// `P(Bin(n, p) ≤ m)`.
pub fn binomial_cdf(n: u64, p: f64, m: u64) -> Result<f64, BoundError> {
    check(n, p)?;
    if m >= n {
        return Ok(1.0);
    }
    // Bin(n,p) ≤ m  ⇔  Bin(n,1-p) ≥ n-m
    exact_binomial_tail(n, 1.0 - p, n - m)
}

/// `(P(S ≤ ⌊np⌋ - 1), P(S ≤ ⌈np⌉))`; the binomial median lies between,
/// so the first is at most 1/2 and the second at least 1/2.
pub fn binomial_median_bracket(n: u64, p: f64) -> Result<(f64, f64), BoundError> {
    check(n, p)?;
    let np = n as f64 * p;
    let floor = np.floor() as u64;
    let ceil = (np.ceil() as u64).min(n);
    let below = if floor == 0 {
        0.0
    } else {
        binomial_cdf(n, p, floor - 1)?
    };
    Ok((below, binomial_cdf(n, p, ceil)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_coin_sixty_of_hundred() {
        let v = exact_binomial_tail(100, 0.5, 60).unwrap();
        assert!((v - 0.028_443_966_820_490_4).abs() < 1e-15, "{v}");
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(exact_binomial_tail(10, 0.3, 0).unwrap(), 1.0);
        assert_eq!(exact_binomial_tail(10, 0.3, 11).unwrap(), 0.0);
        assert_eq!(exact_binomial_tail(10, 0.0, 1).unwrap(), 0.0);
        assert_eq!(exact_binomial_tail(10, 1.0, 10).unwrap(), 1.0);
        assert!(exact_binomial_tail(MAX_BINOMIAL_N + 1, 0.5, 3).is_err());
    }

    #[test]
    fn median_bracket_instance() {
        let (a, b) = binomial_median_bracket(10, 0.3).unwrap();
        assert!((a - 0.382_782_786_4).abs() < 1e-9, "{a}");
        assert!((b - 0.649_610_718_4).abs() < 1e-9, "{b}");
    }

    #[test]
    fn complement_sums_to_one() {
        for n in [1u64, 7, 50, 1000, 10_000] {
            for p in [0.01, 0.3, 0.5, 0.93] {
                for m in (0..=n).step_by((n / 37).max(1) as usize) {
                    let up = exact_binomial_tail(n, p, m).unwrap();
                    let down = if m == 0 { 0.0 } else { binomial_cdf(n, p, m - 1).unwrap() };
                    assert!((up + down - 1.0).abs() < 1e-12, "n={n} p={p} m={m}");
                }
            }
        }
    }

    #[test]
    fn far_tails_stay_positive() {
        // P(Bin(10^4, 1/2) = 10^4) = 2^-10000 underflows, but nearer ones do not
        let v = exact_binomial_tail(10_000, 0.5, 6_500).unwrap();
        assert!(v > 0.0 && v < 1e-180, "{v}");
        let log_v = ln_far_upper(10_000, 0.5, 6_500);
        assert!((v.ln() - log_v).abs() < 1e-9);
    }
}
