//! Even moments `m_2k = ∫_{-1}^{1} t^(2k) rho_p(|t|) dt` of the boundary density.
//!
//! Four backends are available: adaptive quadrature of the density, the
//! composition-weight formula (any `p`), a finite binomial sum (integer `p`)
//! and closed forms for `k <= 2`. They are computed independently so that
//! agreement between them is meaningful.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::{generalized_binomial, HolderPair};
use crate::density::{rho_complement, rho_unchecked, DensityGrid};
use crate::error::{domain, Error, Result};
use crate::quadrature::{EndpointHint, Integrator};
use crate::report::VerificationReport;
use crate::weight;

/// Default highest moment index for tabulated vectors.
pub const DEFAULT_KMAX: usize = 64;

/// Default absolute tolerance for the quadrature backend.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentBackend {
    Quadrature,
    Combinatorial,
    IntegerBinomial,
    ClosedForm,
}

impl MomentBackend {
    pub const ALL: [MomentBackend; 4] = [
        MomentBackend::Quadrature,
        MomentBackend::Combinatorial,
        MomentBackend::IntegerBinomial,
        MomentBackend::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MomentBackend::Quadrature => "quadrature",
            MomentBackend::Combinatorial => "combinatorial",
            MomentBackend::IntegerBinomial => "integer",
            MomentBackend::ClosedForm => "closed_form",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        MomentBackend::ALL.into_iter().find(|b| b.name() == name)
    }
}

/// `m_{2k}` for `k = 0..=k_max` together with the backend that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub p: f64,
    pub values: Vec<f64>,
    pub backend: MomentBackend,
}

impl MomentVector {
    pub fn k_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }
}

/// Coefficients `Gamma_k^(n)` of `w^k` in `g(w)^n`, where
/// `g(w) = sum_{m >= 1} (1/p)_m / (m + 1)! w^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionWeights {
    k_max: usize,
    // powers[n - 1][k]
    powers: Vec<Vec<f64>>,
}

impl CompositionWeights {
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `Gamma_k^(n)`; zero when `n > k`, `n == 0` or `k > k_max`.
    pub fn get(&self, k: usize, n: usize) -> f64 {
        if n == 0 || n > k || k > self.k_max {
            return 0.0;
        }
        self.powers[n - 1][k]
    }
}

/// Builds `Gamma_k^(n)` for `1 <= n <= k <= k_max` by repeated truncated
/// multiplication with `g`.
pub fn gamma_table(hp: &HolderPair, k_max: usize) -> CompositionWeights {
    let a = 1.0 / hp.p();
    let mut g = vec![0.0; k_max + 1];
    let mut c = 1.0;
    for (m, slot) in g.iter_mut().enumerate().skip(1) {
        let mf = m as f64;
        c *= (a + mf - 1.0) / (mf + 1.0);
        *slot = c;
    }
    let mut powers: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    if k_max >= 1 {
        powers.push(g.clone());
    }
    for n in 2..=k_max {
        let prev = &powers[n - 2];
        let mut next = vec![0.0; k_max + 1];
        // g^(n-1) starts at degree n - 1, g at degree 1
        for k in n..=k_max {
            let mut acc = 0.0;
            for m in 1..=k - (n - 1) {
                acc += g[m] * prev[k - m];
            }
            next[k] = acc;
        }
        powers.push(next);
    }
    CompositionWeights { k_max, powers }
}

/// Neumaier-compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn combine(hp: &HolderPair, table: &CompositionWeights, k: usize) -> f64 {
    let s = hp.outer();
    let top = 2 * k + 1;
    let mut acc = Compensated::default();
    let mut binom = 1.0;
    for n in 1..=top {
        let nf = n as f64;
        binom = binom * (s - (nf - 1.0)) / nf;
        acc.add(binom * table.get(top, n));
    }
    2.0 * libm::pow(hp.inv_q(), s) * acc.value()
}

/// `m_{2k}` from the composition-weight formula.
pub fn moment_combinatorial(hp: &HolderPair, k: usize) -> f64 {
    combine(hp, &gamma_table(hp, 2 * k + 1), k)
}

/// `m_0 ..= m_{2 k_max}` from the composition-weight formula, sharing one table.
pub fn moments_combinatorial(hp: &HolderPair, k_max: usize) -> MomentVector {
    let table = gamma_table(hp, 2 * k_max + 1);
    MomentVector {
        p: hp.p(),
        values: (0..=k_max).map(|k| combine(hp, &table, k)).collect(),
        backend: MomentBackend::Combinatorial,
    }
}

/// `m_{2k} = 2 sum_j (-1)^(j+p) C(p-1, j) C(j (p-1)/p, 2k+p)` for integer `p >= 2`.
pub fn moment_integer(hp: &HolderPair, k: usize) -> Result<f64> {
    let p = hp.as_integer().ok_or(Error::NonIntegerExponent(hp.p()))?;
    let top = (2 * k) as u32 + p;
    let mut acc = Compensated::default();
    for j in 1..p {
        let sign = if (j + p) % 2 == 0 { 1.0 } else { -1.0 };
        let alpha = (j * (p - 1)) as f64 / p as f64;
        acc.add(sign * generalized_binomial((p - 1) as f64, j) * generalized_binomial(alpha, top));
    }
    Ok(2.0 * acc.value())
}

pub fn moments_integer(hp: &HolderPair, k_max: usize) -> Result<MomentVector> {
    let values = (0..=k_max)
        .map(|k| moment_integer(hp, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentVector {
        p: hp.p(),
        values,
        backend: MomentBackend::IntegerBinomial,
    })
}

/// `2 ∫_0^1 t^(2k) rho_p(t) dt` to absolute tolerance `tol`.
pub fn moment_quadrature(hp: &HolderPair, k: usize, tol: f64) -> Result<f64> {
    let e = hp.inv_q();
    let power = (2 * k) as f64;
    let r = Integrator::new(0.5 * tol).integrate(
        |t| libm::pow(t, power) * rho_unchecked(hp, t),
        0.0,
        1.0,
        Some(EndpointHint::both(e, e)),
    )?;
    if !r.converged {
        return Err(Error::NonConvergence {
            estimate: 2.0 * r.value,
            error_estimate: 2.0 * r.error_estimate,
            tolerance: tol,
        });
    }
    Ok(2.0 * r.value)
}

pub fn moments_quadrature(hp: &HolderPair, k_max: usize, tol: f64) -> Result<MomentVector> {
    let values = (0..=k_max)
        .map(|k| moment_quadrature(hp, k, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentVector {
        p: hp.p(),
        values,
        backend: MomentBackend::Quadrature,
    })
}

/// Closed forms for `m_0`, `m_2`, `m_4`.
pub fn moment_closed_form(hp: &HolderPair, k: usize) -> Result<f64> {
    let p = hp.p();
    let m0 = hp.landau_constant();
    match k {
        0 => Ok(m0),
        1 => Ok(m0 * (3.0 * p - 1.0) / (8.0 * p)),
        2 => Ok(m0 * (5.0 * p - 1.0) * (43.0 * p * p + p - 6.0) / (1152.0 * p * p * p)),
        _ => Err(domain("closed forms exist only for k <= 2", k as f64)),
    }
}

/// Dispatches to a backend. `tol` is used by quadrature only.
pub fn moments(
    hp: &HolderPair,
    backend: MomentBackend,
    k_max: usize,
    tol: f64,
) -> Result<MomentVector> {
    match backend {
        MomentBackend::Quadrature => moments_quadrature(hp, k_max, tol),
        MomentBackend::Combinatorial => Ok(moments_combinatorial(hp, k_max)),
        MomentBackend::IntegerBinomial => moments_integer(hp, k_max),
        MomentBackend::ClosedForm => {
            let values = (0..=k_max)
                .map(|k| moment_closed_form(hp, k))
                .collect::<Result<Vec<_>>>()?;
            Ok(MomentVector {
                p: hp.p(),
                values,
                backend,
            })
        }
    }
}

fn failed(claim: &str, threshold: f64, err: &Error) -> VerificationReport {
    VerificationReport::at_most(claim, f64::NAN, threshold).note(&format!("{err}"))
}

/// Largest pairwise deviation between quadrature, combinatorial and (for
/// integer `p`) integer-binomial moments for `k <= k_max`.
pub fn agreement_check(hp: &HolderPair, k_max: usize) -> VerificationReport {
    const CLAIM: &str = "moments.backend_agreement";
    const THRESHOLD: f64 = 1e-10;
    let mut vectors = vec![moments_combinatorial(hp, k_max)];
    match moments_quadrature(hp, k_max, DEFAULT_QUADRATURE_TOL) {
        Ok(v) => vectors.push(v),
        Err(e) => return failed(CLAIM, THRESHOLD, &e).param("p", hp.p()),
    }
    if hp.as_integer().is_some() {
        match moments_integer(hp, k_max) {
            Ok(v) => vectors.push(v),
            Err(e) => return failed(CLAIM, THRESHOLD, &e).param("p", hp.p()),
        }
    }
    let mut worst: f64 = 0.0;
    for (i, a) in vectors.iter().enumerate() {
        for b in &vectors[i + 1..] {
            for (x, y) in a.values.iter().zip(&b.values) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    VerificationReport::at_most(CLAIM, worst, THRESHOLD)
        .param("p", hp.p())
        .param("k_max", k_max as f64)
        .param("backends", vectors.len() as f64)
}

/// Relative deviation of the closed forms from the combinatorial backend.
pub fn closed_form_check(hp: &HolderPair) -> VerificationReport {
    let mv = moments_combinatorial(hp, 2);
    let mut worst: f64 = 0.0;
    for (k, &m) in mv.values.iter().enumerate() {
        let exact = moment_closed_form(hp, k).expect("k <= 2");
        worst = worst.max(((m - exact) / exact).abs());
    }
    VerificationReport::at_most("moments.closed_forms", worst, 1e-12).param("p", hp.p())
}

/// Positivity and `m_2k <= max_grid(rho) * 2/(2k+1)`; the metric is the
/// largest ratio of a moment to its bound.
pub fn positivity_decay_check(hp: &HolderPair, mv: &MomentVector) -> VerificationReport {
    let sup = DensityGrid::refined(hp, 1000)
        .expect("fixed grid size")
        .max_value();
    let mut worst: f64 = 0.0;
    let mut min: f64 = f64::INFINITY;
    for (k, &m) in mv.values.iter().enumerate() {
        let bound = sup * 2.0 / (2 * k + 1) as f64;
        worst = worst.max(m / bound);
        min = min.min(m);
    }
    VerificationReport::at_most("moments.positivity_decay", worst, 1.0)
        .param("p", hp.p())
        .param("k_max", mv.k_max() as f64)
        .param("min_moment", min)
        .require(min > 0.0, "non-positive moment")
}

/// Sum rule `sum_k m_2k = omega_p(1)`, checked through the integral form
/// `2 ∫_0^1 rho_p(t)/(1 - t^2) dt`. The truncated series sum with `k_max`
/// terms is reported alongside as a diagnostic.
pub fn sum_rule_check(hp: &HolderPair, k_max: usize) -> VerificationReport {
    const CLAIM: &str = "moments.sum_rule";
    const THRESHOLD: f64 = 1e-8;
    let target = weight::omega_opt_direct(hp, 1.0).expect("n = 1 is in range");
    let e = hp.inv_q();
    // rho/(1 - t) behaves like (1 - t)^(1/q - 1) at t = 1; the upper half
    // is integrated in c = 1 - t so the singular end stays resolved
    let tol = Integrator::new(1e-12);
    let lower = tol.integrate(
        |t| rho_unchecked(hp, t) / ((1.0 - t) * (1.0 + t)),
        0.0,
        0.5,
        Some(EndpointHint::left(e)),
    );
    let upper = tol.integrate(
        |c| {
            if c <= 0.0 {
                0.0
            } else {
                rho_complement(hp, c) / (c * (2.0 - c))
            }
        },
        0.0,
        0.5,
        Some(EndpointHint::left(e - 1.0)),
    );
    let integral = match (lower, upper) {
        (Ok(a), Ok(b)) if a.converged && b.converged => 2.0 * (a.value + b.value),
        (Ok(a), Ok(b)) => {
            let err = Error::NonConvergence {
                estimate: 2.0 * (a.value + b.value),
                error_estimate: 2.0 * (a.error_estimate + b.error_estimate),
                tolerance: 4e-12,
            };
            return failed(CLAIM, THRESHOLD, &err).param("p", hp.p());
        }
        (Err(err), _) | (_, Err(err)) => return failed(CLAIM, THRESHOLD, &err).param("p", hp.p()),
    };
    let mv = moments_combinatorial(hp, k_max);
    let mut partial = Compensated::default();
    for &m in &mv.values {
        partial.add(m);
    }
    VerificationReport::at_most(CLAIM, (integral - target).abs(), THRESHOLD)
        .param("p", hp.p())
        .param("omega_at_1", target)
        .param("partial_sum", partial.value())
        .param("partial_terms", (k_max + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hp(p: f64) -> HolderPair {
        HolderPair::new(p).unwrap()
    }

    #[test]
    fn gamma_table_examples() {
        let t = gamma_table(&hp(2.0), 4);
        assert_eq!(t.get(1, 1), 0.25);
        assert_eq!(t.get(2, 2), 0.0625);
        assert_eq!(t.get(2, 1), 0.125);
        assert_eq!(t.get(2, 3), 0.0);
        assert_eq!(t.get(0, 0), 0.0);
        assert_eq!(t.get(5, 1), 0.0);
    }

    #[test]
    fn gamma_single_part_is_pochhammer_ratio() {
        let h = hp(2.7);
        let t = gamma_table(&h, 30);
        let mut fact = 1.0;
        for k in 1..=30u32 {
            fact *= (k + 1) as f64;
            let expected = crate::complex::pochhammer(1.0 / 2.7, k) / fact;
            assert!((t.get(k as usize, 1) / expected - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn gamma_compositions_by_enumeration() {
        // brute force over compositions of k into n parts
        fn enumerate(k: usize, n: usize, c: &[f64]) -> f64 {
            if n == 0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            (1..=k).map(|r| c[r] * enumerate(k - r, n - 1, c)).sum()
        }
        let h = hp(3.3);
        let t = gamma_table(&h, 9);
        let a = 1.0 / 3.3;
        let mut c = vec![1.0; 10];
        for m in 1..10 {
            c[m] = c[m - 1] * (a + m as f64 - 1.0) / (m as f64 + 1.0);
        }
        for k in 1..=9 {
            for n in 1..=k {
                let e = enumerate(k, n, &c);
                assert!((t.get(k, n) - e).abs() <= 1e-15 * e.abs());
            }
        }
    }

    #[test]
    fn combinatorial_examples() {
        assert_eq!(moment_combinatorial(&hp(2.0), 0), 0.25);
        assert!((moment_combinatorial(&hp(2.0), 1) - 0.078125).abs() < 1e-16);
        assert!((moment_combinatorial(&hp(3.0), 0) - 8.0 / 27.0).abs() < 1e-16);
    }

    #[test]
    fn integer_examples() {
        assert!((moment_integer(&hp(2.0), 0).unwrap() - 0.25).abs() < 1e-16);
        assert!((moment_integer(&hp(2.0), 1).unwrap() - 0.078125).abs() < 1e-16);
        assert!((moment_integer(&hp(3.0), 0).unwrap() - 8.0 / 27.0).abs() < 1e-15);
        assert_eq!(
            moment_integer(&hp(2.5), 0),
            Err(Error::NonIntegerExponent(2.5))
        );
    }

    #[test]
    fn quadrature_examples() {
        let h = hp(2.0);
        assert!((moment_quadrature(&h, 0, 1e-12).unwrap() - 0.25).abs() < 1e-12);
        assert!((moment_quadrature(&h, 1, 1e-12).unwrap() - 0.078125).abs() < 1e-12);
        assert!((moment_quadrature(&h, 2, 1e-12).unwrap() - 21.0 / 512.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(moment_closed_form(&hp(2.0), 0).unwrap(), 0.25);
        assert!((moment_closed_form(&hp(5.0), 1).unwrap() - 0.114688).abs() < 1e-15);
        assert!((moment_closed_form(&hp(2.0), 2).unwrap() - 21.0 / 512.0).abs() < 1e-17);
        assert!(moment_closed_form(&hp(2.0), 3).is_err());
    }

    #[test]
    fn backends_agree_for_integer_p() {
        for p in [2.0, 3.0, 4.0, 5.0] {
            let r = agreement_check(&hp(p), 20);
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn backends_agree_for_fractional_p() {
        for p in [1.5, 2.7, core::f64::consts::PI, 6.25] {
            let r = agreement_check(&hp(p), 20);
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn positivity_decay_and_sum_rule() {
        for p in [1.1, 2.0, 4.7] {
            let h = hp(p);
            let mv = moments_combinatorial(&h, 20);
            assert!(positivity_decay_check(&h, &mv).passed);
            let r = sum_rule_check(&h, 20);
            assert!(r.passed, "{r:?}");
            // the truncated series approaches the target from below
            assert!(r.parameter("partial_sum").unwrap() < r.parameter("omega_at_1").unwrap());
        }
    }

    #[test]
    fn backend_names_round_trip() {
        for b in MomentBackend::ALL {
            assert_eq!(MomentBackend::parse(b.name()), Some(b));
        }
        assert_eq!(MomentBackend::parse("nope"), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn closed_forms_match_combinatorial(p in 1.0001f64..10.0) {
            prop_assert!(closed_form_check(&hp(p)).passed);
        }
    }
}
