//! The discrete p-Hardy inequality
//! `sum_{n>=1} |phi_n - phi_{n-1}|^p >= sum_{n>=1} w(n) |phi_n|^p`
//! (with `phi_0 = 0`) on finitely supported sequences, and the classical
//! averaged form `sum ((a_1 + ... + a_n)/n)^p <= (p/(p-1))^p sum a_n^p`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::HolderPair;
use crate::error::{domain, Result};
use crate::moments::{moments_combinatorial, Compensated};
use crate::report::VerificationReport;
use crate::weight::{omega_classical, omega_opt};

/// `phi_1 ..= phi_N`; `phi_0 = 0` and `phi_n = 0` for `n > N` are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSequence {
    values: Vec<f64>,
}

impl CompactSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain("sequence entries must be finite", *bad));
        }
        Ok(CompactSequence { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        CompactSequence {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightChoice {
    Optimal,
    Classical,
    /// `n^-p sum_{k <= K} m_2k n^-2k`, a lower bound for the optimal weight.
    TruncatedSeries(usize),
}

impl WeightChoice {
    pub fn name(self) -> &'static str {
        match self {
            WeightChoice::Optimal => "optimal",
            WeightChoice::Classical => "classical",
            WeightChoice::TruncatedSeries(_) => "truncated_series",
        }
    }
}

/// Weights `w(1) ..= w(n_max)` for a choice.
pub fn weight_values(hp: &HolderPair, choice: WeightChoice, n_max: usize) -> Result<Vec<f64>> {
    match choice {
        WeightChoice::Optimal => (1..=n_max as u64).map(|n| omega_opt(hp, n)).collect(),
        WeightChoice::Classical => (1..=n_max as u64).map(|n| omega_classical(hp, n)).collect(),
        WeightChoice::TruncatedSeries(k) => {
            let mv = moments_combinatorial(hp, k);
            Ok((1..=n_max)
                .map(|n| {
                    let h = 1.0 / n as f64;
                    let h2 = h * h;
                    let mut acc = 0.0;
                    for &m in mv.values.iter().rev() {
                        acc = acc * h2 + m;
                    }
                    acc * libm::pow(h, hp.p())
                })
                .collect())
        }
    }
}

/// `sum_{n=1}^{N+1} |phi_n - phi_{n-1}|^p`.
pub fn dirichlet_sum(hp: &HolderPair, phi: &CompactSequence) -> f64 {
    let p = hp.p();
    let mut acc = Compensated::default();
    let mut prev = 0.0;
    for &v in phi.values.iter().chain(core::iter::once(&0.0)) {
        acc.add(libm::pow((v - prev).abs(), p));
        prev = v;
    }
    acc.value()
}

/// `sum_{n=1}^{N} weight(n) |phi_n|^p`.
pub fn weighted_sum(weight: impl Fn(usize) -> f64, hp: &HolderPair, phi: &CompactSequence) -> f64 {
    let p = hp.p();
    let mut acc = Compensated::default();
    for (i, &v) in phi.values.iter().enumerate() {
        if v != 0.0 {
            acc.add(weight(i + 1) * libm::pow(v.abs(), p));
        }
    }
    acc.value()
}

/// Relative slack allowed for rounding in the difference form.
pub const RELATIVE_SLACK: f64 = 1e-12;

/// Reports `dirichlet - weighted`; passes iff it is `>= -1e-12 * dirichlet`.
/// The saturation ratio `weighted / dirichlet` is attached as a parameter.
pub fn verify_inequality(
    hp: &HolderPair,
    phi: &CompactSequence,
    choice: WeightChoice,
) -> VerificationReport {
    let weights = match weight_values(hp, choice, phi.len()) {
        Ok(w) => w,
        Err(e) => {
            return VerificationReport::at_least("hardy.difference_form", f64::NAN, 0.0)
                .note(&alloc::format!("{e}"))
        }
    };
    let d = dirichlet_sum(hp, phi);
    let w = weighted_sum(|n| weights[n - 1], hp, phi);
    let ratio = if d > 0.0 { w / d } else { 0.0 };
    let mut r = VerificationReport::at_least("hardy.difference_form", d - w, -RELATIVE_SLACK * d)
        .param("p", hp.p())
        .param("length", phi.len() as f64)
        .param("saturation", ratio);
    if let WeightChoice::TruncatedSeries(k) = choice {
        r = r.param("terms", k as f64);
    }
    r
}

/// Default number of extra terms summed past the support in the averaged form.
pub const DEFAULT_HORIZON: usize = 10_000;

struct Averaged {
    left: f64,
    tail: f64,
    right: f64,
}

fn averaged_sums(hp: &HolderPair, a: &[f64], horizon: usize) -> Averaged {
    let p = hp.p();
    let mut left = Compensated::default();
    let mut right = Compensated::default();
    let mut partial = 0.0;
    for (i, &v) in a.iter().enumerate() {
        partial += v;
        left.add(libm::pow(partial / (i + 1) as f64, p));
        right.add(libm::pow(v, p));
    }
    let n = a.len();
    let s_p = libm::pow(partial, p);
    if s_p > 0.0 {
        for m in n + 1..=n + horizon {
            left.add(s_p * libm::pow(m as f64, -p));
        }
    }
    // sum_{m > N+H} m^-p <= (N+H)^(1-p) / (p-1)
    let end = (n + horizon).max(1) as f64;
    let tail = s_p * libm::pow(end, 1.0 - p) / (p - 1.0);
    let constant = libm::pow(p / (p - 1.0), p);
    Averaged {
        left: left.value(),
        tail,
        right: constant * right.value(),
    }
}

/// Averaged form for a nonnegative sequence: the left side is summed over the
/// support and `horizon` further terms, plus an upper bound for the rest.
/// Passes iff `left + tail <= right (1 + 1e-12)`.
pub fn classical_averaged_check(hp: &HolderPair, a: &[f64], horizon: usize) -> VerificationReport {
    if let Some(&bad) = a.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return VerificationReport::at_most("hardy.averaged_form", f64::NAN, 0.0).note(
            &alloc::format!("entries must be finite and nonnegative (got {bad})"),
        );
    }
    let s = averaged_sums(hp, a, horizon);
    VerificationReport::at_most(
        "hardy.averaged_form",
        s.left + s.tail,
        s.right * (1.0 + RELATIVE_SLACK),
    )
    .param("p", hp.p())
    .param("horizon", horizon as f64)
    .param("left", s.left)
    .param("tail_bound", s.tail)
    .param("slack", s.right - s.left - s.tail)
}

/// `count` sequences of random length `1..=max_len` with heavy-tailed
/// (Pareto, tail index 1.5) magnitudes, random signs and occasional zeros.
pub fn random_corpus(seed: u64, count: usize, max_len: usize) -> Vec<CompactSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            let values = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        return 0.0;
                    }
                    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                    let magnitude = libm::pow(u, -1.0 / 1.5);
                    if rng.gen_bool(0.5) {
                        magnitude
                    } else {
                        -magnitude
                    }
                })
                .collect();
            CompactSequence { values }
        })
        .collect()
}

/// `phi_n = n` for `n <= rise`, then a linear taper reaching zero after `fall` more steps.
pub fn tapered_linear(rise: usize, fall: usize) -> CompactSequence {
    let top = rise as f64;
    let mut values: Vec<f64> = (1..=rise).map(|n| n as f64).collect();
    values.extend((1..=fall).map(|j| top * (1.0 - j as f64 / fall as f64)));
    CompactSequence { values }
}

/// Difference form over a random corpus. The metric is the smallest
/// `(dirichlet - weighted) / dirichlet`; passes iff `>= -1e-12`.
pub fn corpus_check(
    hp: &HolderPair,
    seed: u64,
    count: usize,
    max_len: usize,
    choice: WeightChoice,
) -> VerificationReport {
    let weights = match weight_values(hp, choice, max_len) {
        Ok(w) => w,
        Err(e) => {
            return VerificationReport::at_least("hardy.corpus", f64::NAN, 0.0)
                .note(&alloc::format!("{e}"))
        }
    };
    let mut worst = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for phi in random_corpus(seed, count, max_len) {
        let d = dirichlet_sum(hp, &phi);
        if d == 0.0 {
            continue;
        }
        let w = weighted_sum(|n| weights[n - 1], hp, &phi);
        worst = worst.min((d - w) / d);
        max_ratio = max_ratio.max(w / d);
    }
    let mut r = VerificationReport::at_least("hardy.corpus", worst, -RELATIVE_SLACK)
        .param("p", hp.p())
        .param("seed", seed as f64)
        .param("count", count as f64)
        .param("max_len", max_len as f64)
        .param("max_saturation", max_ratio)
        .note(choice.name());
    if let WeightChoice::TruncatedSeries(k) = choice {
        r = r.param("terms", k as f64);
    }
    r
}

/// Averaged form over `|phi|` for the same corpus; the metric is the
/// largest `(left + tail) / right - 1`.
pub fn averaged_corpus_check(
    hp: &HolderPair,
    seed: u64,
    count: usize,
    max_len: usize,
    horizon: usize,
) -> VerificationReport {
    let mut worst: f64 = 0.0;
    for phi in random_corpus(seed, count, max_len) {
        let a: Vec<f64> = phi.values.iter().map(|v| v.abs()).collect();
        let s = averaged_sums(hp, &a, horizon);
        if s.right > 0.0 {
            worst = worst.max((s.left + s.tail) / s.right);
        }
    }
    VerificationReport::at_most("hardy.averaged_corpus", worst - 1.0, RELATIVE_SLACK)
        .param("p", hp.p())
        .param("seed", seed as f64)
        .param("count", count as f64)
        .param("horizon", horizon as f64)
}
