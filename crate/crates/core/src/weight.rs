//! Classical and optimal p-Hardy weights.
//!
//! The optimal weight is
//! `omega_p(n) = (1 - (1 - 1/n)^(1/q))^(p-1) - ((1 + 1/n)^(1/q) - 1)^(p-1)`.
//! Both brackets are `O(1/n)` while their difference is `O(n^-p)`, so the
//! direct route rewrites the difference through the gap between the two
//! bases, which is an even power series in `1/n` with terms of one sign.
//! Beyond a threshold the weight is taken from its moment expansion instead.

use crate::complex::HolderPair;
use crate::error::{domain, Result};
use crate::expansion::even_partial_sum;
use crate::moments::moments_combinatorial;
use crate::report::VerificationReport;

/// Index above which `omega_opt` switches to the moment expansion.
pub const DEFAULT_SERIES_THRESHOLD: f64 = 1e4;

/// Moment terms `k = 0..=SERIES_TERMS` used above the threshold.
const SERIES_TERMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSample {
    pub n: u64,
    pub omega_opt: f64,
    pub omega_classical: f64,
}

impl WeightSample {
    pub fn new(hp: &HolderPair, n: u64) -> Result<Self> {
        Ok(WeightSample {
            n,
            omega_opt: omega_opt(hp, n)?,
            omega_classical: omega_classical(hp, n)?,
        })
    }

    pub fn ratio(&self) -> f64 {
        self.omega_opt / self.omega_classical
    }
}

fn check_index(x: f64) -> Result<()> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(domain("weight index must be a finite number >= 1", x));
    }
    Ok(())
}

/// `((p-1)/p)^p / n^p`.
pub fn omega_classical(hp: &HolderPair, n: u64) -> Result<f64> {
    let x = n as f64;
    check_index(x)?;
    Ok(hp.landau_constant() / libm::pow(x, hp.p()))
}

/// `omega_p(n)`.
pub fn omega_opt(hp: &HolderPair, n: u64) -> Result<f64> {
    omega_opt_real(hp, n as f64)
}

/// `omega_p(x)` for real `x >= 1`.
pub fn omega_opt_real(hp: &HolderPair, x: f64) -> Result<f64> {
    omega_opt_with_threshold(hp, x, DEFAULT_SERIES_THRESHOLD)
}

pub fn omega_opt_with_threshold(hp: &HolderPair, x: f64, threshold: f64) -> Result<f64> {
    check_index(x)?;
    if x > threshold {
        Ok(omega_opt_series(hp, x))
    } else {
        Ok(bracket(hp, 1.0 / x))
    }
}

/// Direct evaluation of the defining formula, never switching to the series.
pub fn omega_opt_direct(hp: &HolderPair, x: f64) -> Result<f64> {
    check_index(x)?;
    Ok(bracket(hp, 1.0 / x))
}

fn omega_opt_series(hp: &HolderPair, x: f64) -> f64 {
    let h = 1.0 / x;
    let mv = moments_combinatorial(hp, SERIES_TERMS);
    let s = even_partial_sum(&mv, h, SERIES_TERMS, hp.landau_constant());
    s.value * libm::pow(h, hp.p())
}

/// `omega_p(n) - omega_p^H(n)`, computed without forming the difference of
/// two nearly equal numbers above the series threshold.
pub fn improvement(hp: &HolderPair, n: u64) -> Result<f64> {
    let x = n as f64;
    check_index(x)?;
    if x > DEFAULT_SERIES_THRESHOLD {
        let h = 1.0 / x;
        let mv = moments_combinatorial(hp, SERIES_TERMS);
        let h2 = h * h;
        let mut acc = 0.0;
        for k in (1..=SERIES_TERMS).rev() {
            acc = acc * h2 + mv.values[k];
        }
        Ok(acc * h2 * libm::pow(h, hp.p()))
    } else {
        Ok(omega_opt(hp, n)? - omega_classical(hp, n)?)
    }
}

/// Minimum of `omega_p(n) - omega_p^H(n)` over `1 <= n <= n_max`; passes iff positive.
pub fn improvement_margin(hp: &HolderPair, n_max: u64) -> VerificationReport {
    let mut min = f64::INFINITY;
    let mut at = 0;
    for n in 1..=n_max.max(1) {
        let m = improvement(hp, n).unwrap_or(f64::NAN);
        if !(m >= min) {
            min = m;
            at = n;
        }
    }
    VerificationReport::greater_than("weight.improvement", min, 0.0)
        .param("p", hp.p())
        .param("n_max", n_max as f64)
        .param("argmin", at as f64)
}

/// Relative gap `|n^p omega_p(n) / m_0 - 1|` at `n`, compared against
/// `scale * m_2 / (m_0 n^2)`, the size of the first correction term.
pub fn asymptotic_check(hp: &HolderPair, n: u64, scale: f64) -> VerificationReport {
    let x = n as f64;
    let m0 = hp.landau_constant();
    let mv = moments_combinatorial(hp, 1);
    let gap = match omega_opt(hp, n) {
        Ok(w) => (w * libm::pow(x, hp.p()) / m0 - 1.0).abs(),
        Err(_) => f64::NAN,
    };
    VerificationReport::at_most(
        "weight.asymptotic_limit",
        gap,
        scale * mv.values[1] / (m0 * x * x),
    )
    .param("p", hp.p())
    .param("n", x)
}

/// `A^s - B^s` with `A = 1 - (1 - h)^u`, `B = (1 + h)^u - 1`, `u = 1/q`,
/// `s = p - 1`, for `0 < h <= 1`. Equals `omega_p(1/h)`.
pub(crate) fn bracket(hp: &HolderPair, h: f64) -> f64 {
    let u = hp.inv_q();
    let s = hp.outer();
    let b = libm::expm1(u * libm::log1p(h));
    let gap = if h <= 0.5 {
        even_gap(u, h)
    } else {
        -libm::expm1(u * libm::log1p(-h)) - b
    };
    libm::pow(b, s) * libm::expm1(s * libm::log1p(gap / b))
}

/// `A - B = -2 sum_{j >= 1} C(u, 2j) h^(2j)`; every term is positive for `0 < u < 1`.
fn even_gap(u: f64, h: f64) -> f64 {
    let h2 = h * h;
    let mut c = 1.0;
    let mut power = 1.0;
    let mut sum = 0.0;
    let mut k = 0.0;
    loop {
        // advance C(u, k) by two indices
        c *= (u - k) / (k + 1.0);
        c *= (u - k - 1.0) / (k + 2.0);
        k += 2.0;
        power *= h2;
        let term = -2.0 * c * power;
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum || k > 400.0 {
            return sum;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn hp(p: f64) -> HolderPair {
        HolderPair::new(p).unwrap()
    }

    #[test]
    fn classical_examples() {
        assert_eq!(omega_classical(&hp(2.0), 1).unwrap(), 0.25);
        assert_eq!(omega_classical(&hp(2.0), 2).unwrap(), 0.0625);
        assert!((omega_classical(&hp(3.0), 1).unwrap() - 8.0 / 27.0).abs() < 1e-16);
        assert!(omega_classical(&hp(2.0), 0).is_err());
        assert!(omega_opt(&hp(2.0), 0).is_err());
    }

    #[test]
    fn optimal_examples() {
        let w1 = omega_opt(&hp(2.0), 1).unwrap();
        assert!((w1 - (2.0 - SQRT_2)).abs() < 1e-15);
        let w2 = omega_opt(&hp(2.0), 2).unwrap();
        let exact = 2.0 - libm::sqrt(0.5) - libm::sqrt(1.5);
        assert!((w2 - exact).abs() < 1e-15);
        let w3 = omega_opt(&hp(3.0), 1).unwrap();
        let c = libm::cbrt(4.0) - 1.0;
        assert!((w3 - (1.0 - c * c)).abs() < 1e-15);
    }

    #[test]
    fn gap_series_matches_direct_difference_at_moderate_h() {
        for p in [1.3, 2.0, 4.5] {
            let u = hp(p).inv_q();
            for h in [0.5, 0.3, 0.1] {
                let direct = -libm::expm1(u * libm::log1p(-h)) - libm::expm1(u * libm::log1p(h));
                let series = even_gap(u, h);
                assert!(((series - direct) / direct).abs() < 1e-12, "p={p} h={h}");
            }
        }
    }

    #[test]
    fn routes_agree_at_threshold() {
        for p in [1.1, 2.0, 3.0, 5.0] {
            let h = hp(p);
            for x in [5e3, 1e4, 2e4] {
                let direct = omega_opt_direct(&h, x).unwrap();
                let series = omega_opt_series(&h, x);
                assert!(((direct - series) / series).abs() < 1e-13, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn improvement_margin_examples() {
        let r = improvement_margin(&hp(2.0), 1);
        assert!(r.passed);
        assert!((r.metric - (2.0 - SQRT_2 - 0.25)).abs() < 1e-15);
        assert!(improvement_margin(&hp(2.0), 10_000).passed);
        assert!(improvement_margin(&hp(1.5), 1000).passed);
    }

    #[test]
    fn improvement_is_continuous_across_threshold() {
        let h = hp(2.5);
        let below = improvement(&h, 10_000).unwrap();
        let above = improvement(&h, 10_001).unwrap();
        assert!(above < below && above > 0.99 * below);
    }

    #[test]
    fn approaches_classical_limit() {
        for p in [1.1, 2.0, 5.0] {
            assert!(asymptotic_check(&hp(p), 1_000_000, 2.0).passed);
        }
    }
}
