//! Moment expansions of `omega_p` and `f_p`, and absolute monotonicity of the
//! rescaled weight `G(x) = x^-p omega_p(1/x) = sum_k m_2k x^2k`.

use alloc::vec::Vec;

use crate::complex::{generalized_binomial, ComplexPoint, HolderPair};
use crate::density::{rho_unchecked, sup_norm};
use crate::error::{domain, Result};
use crate::moments::MomentVector;
use crate::quadrature::{EndpointHint, Integrator};
use crate::report::VerificationReport;
use crate::weight::{bracket, omega_opt_direct};

/// A truncated series value with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvaluation<T> {
    pub at: T,
    pub terms: usize,
    pub value: T,
    pub tail_bound: f64,
}

fn check_moments(mv: &MomentVector, k_max: usize) -> Result<()> {
    if mv.values.len() <= k_max {
        return Err(domain(
            "moment vector shorter than truncation index",
            k_max as f64,
        ));
    }
    Ok(())
}

/// Bound on `m_2k` for all `k > k_max`: the smaller of `m_0` and
/// `2 ||rho||_inf / (2 k_max + 3)`.
pub fn tail_constant(hp: &HolderPair, k_max: usize) -> f64 {
    let decay = 2.0 * sup_norm(hp) / (2 * k_max + 3) as f64;
    hp.landau_constant().min(decay)
}

/// `sum_{k <= k_max} m_2k x^2k` with tail bound `c x^(2 k_max + 2) / (1 - x^2)`,
/// where `c` bounds every omitted moment.
pub fn even_partial_sum(mv: &MomentVector, x: f64, k_max: usize, c: f64) -> SeriesEvaluation<f64> {
    let x2 = x * x;
    let mut acc = 0.0;
    for k in (0..=k_max).rev() {
        acc = acc * x2 + mv.values[k];
    }
    SeriesEvaluation {
        at: x,
        terms: k_max,
        value: acc,
        tail_bound: c * libm::pow(x2, (k_max + 1) as f64) / (1.0 - x2),
    }
}

/// Partial sum of `x^-p omega_p(1/x) = sum_k m_2k x^2k` for `0 < x < 1`.
pub fn omega_series(
    hp: &HolderPair,
    x: f64,
    k_max: usize,
    mv: &MomentVector,
) -> Result<SeriesEvaluation<f64>> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain("series point must lie in (0, 1)", x));
    }
    check_moments(mv, k_max)?;
    Ok(even_partial_sum(mv, x, k_max, tail_constant(hp, k_max)))
}

/// Partial sum of `f_p(z) = -sum_k m_2k z^(-2k-1)` for `|z| > 1`.
pub fn f_series(
    hp: &HolderPair,
    z: ComplexPoint,
    k_max: usize,
    mv: &MomentVector,
) -> Result<SeriesEvaluation<ComplexPoint>> {
    z.check_finite()?;
    let r = z.abs();
    if !(r > 1.0) {
        return Err(domain("series point must satisfy |z| > 1", r));
    }
    check_moments(mv, k_max)?;
    let w = z.recip();
    let w2 = w * w;
    let mut acc = ComplexPoint::ZERO;
    for k in (0..=k_max).rev() {
        acc = acc * w2 + ComplexPoint::real(mv.values[k]);
    }
    let inv = 1.0 / r;
    let tail =
        tail_constant(hp, k_max) * libm::pow(inv, (2 * k_max + 3) as f64) / (1.0 - inv * inv);
    Ok(SeriesEvaluation {
        at: z,
        terms: k_max,
        value: -(acc * w),
        tail_bound: tail,
    })
}

/// `G(x) = |x|^-p omega_p(1/|x|)` on `[-1, 1]`, with `G(0) = m_0`.
pub fn rescaled_weight(hp: &HolderPair, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(domain("rescaled weight argument must lie in [-1, 1]", x));
    }
    Ok(rescaled_unchecked(hp, x.abs()))
}

fn rescaled_unchecked(hp: &HolderPair, x: f64) -> f64 {
    if x == 0.0 {
        return hp.landau_constant();
    }
    bracket(hp, x) / libm::pow(x, hp.p())
}

/// A derivative value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub at: f64,
    pub order: u32,
    pub value: f64,
    pub error: f64,
}

/// `G^(n)(x) = n! ∫_{-1}^{1} t^n rho_p(|t|) / (1 - t x)^(n+1) dt`, folded onto
/// `[0, 1]` with a kernel that is a sum of positive terms.
pub fn derivative_integral(
    hp: &HolderPair,
    n: u32,
    x: f64,
    rel_tol: f64,
) -> Result<DerivativeEstimate> {
    if !(x > -1.0 && x < 1.0) {
        return Err(domain("derivative point must lie in (-1, 1)", x));
    }
    let nf = n as f64;
    let coeffs: Vec<(f64, f64)> = (0..=n + 1)
        .filter(|j| j % 2 == n % 2)
        .map(|j| (2.0 * generalized_binomial(nf + 1.0, j), j as f64))
        .collect();
    let kernel = |t: f64| {
        let y = t * x;
        let num: f64 = coeffs.iter().map(|&(c, j)| c * libm::pow(y, j)).sum();
        let den = libm::pow((1.0 - y) * (1.0 + y), nf + 1.0);
        num / den
    };
    let e = hp.inv_q();
    let r = Integrator::new(f64::MIN_POSITIVE)
        .with_relative(rel_tol)
        .integrate(
            |t| libm::pow(t, nf) * rho_unchecked(hp, t) * kernel(t),
            0.0,
            1.0,
            Some(EndpointHint::both(e, e)),
        )?;
    let factorial: f64 = (1..=n).map(|i| i as f64).product();
    if !r.converged {
        return Err(crate::error::Error::NonConvergence {
            estimate: factorial * r.value,
            error_estimate: factorial * r.error_estimate,
            tolerance: rel_tol,
        });
    }
    Ok(DerivativeEstimate {
        at: x,
        order: n,
        value: factorial * r.value,
        error: factorial * r.error_estimate,
    })
}

/// Finite-difference derivative with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    /// Evaluation point: the requested `x` snapped to a multiple of `h/2`
    /// so that every node is exact.
    pub at: f64,
    pub order: u32,
    pub step: f64,
    pub value: f64,
    /// Rounding terms at `h` and `2h` plus `|D_h - D_2h| / 3`.
    pub error_budget: f64,
    pub extended: bool,
}

/// Highest order evaluated in double precision.
pub const DOUBLE_PRECISION_MAX_ORDER: u32 = 4;

/// Relative accuracy assumed for a double-precision evaluation of `G`.
const EVAL_EPS: f64 = 16.0 * f64::EPSILON;

fn step_for(n: u32, x: f64, eps: f64) -> f64 {
    let raw = (1.0 - x) * libm::pow(eps, 1.0 / (n as f64 + 2.0));
    libm::exp2(libm::round(libm::log2(raw)))
}

fn central_f64(hp: &HolderPair, n: u32, x: f64, h: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for j in 0..=n {
        let c = generalized_binomial(n as f64, j);
        let y = x + (0.5 * n as f64 - j as f64) * h;
        let g = rescaled_unchecked(hp, y.abs());
        sum += if j % 2 == 0 { c * g } else { -c * g };
        magnitude += c * g.abs();
    }
    let hn = libm::pow(h, n as f64);
    (sum / hn, magnitude / hn)
}

/// `G^(n)(x)` by central differences of order `n` with `O(h^2)` error.
/// Orders above [`DOUBLE_PRECISION_MAX_ORDER`] use extended precision when
/// the `extended` feature is enabled.
pub fn derivative_fd(hp: &HolderPair, n: u32, x: f64) -> Result<FdEstimate> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain("derivative point must lie in (0, 1)", x));
    }
    if n == 0 {
        let g = rescaled_unchecked(hp, x);
        return Ok(FdEstimate {
            at: x,
            order: 0,
            step: 0.0,
            value: g,
            error_budget: EVAL_EPS * g.abs(),
            extended: false,
        });
    }
    #[cfg(feature = "extended")]
    if n > DOUBLE_PRECISION_MAX_ORDER {
        return derivative_fd_extended(hp, n, x, crate::extended::DEFAULT_PRECISION);
    }
    let h = step_for(n, x, EVAL_EPS);
    let at = libm::round(x / (0.5 * h)) * (0.5 * h);
    let (d1, m1) = central_f64(hp, n, at, h);
    let (d2, m2) = central_f64(hp, n, at, 2.0 * h);
    Ok(FdEstimate {
        at,
        order: n,
        step: h,
        value: d1,
        error_budget: EVAL_EPS * (m1 + m2) + (d1 - d2).abs() / 3.0,
        extended: false,
    })
}

/// Same as [`derivative_fd`] but always in extended precision with `prec` bits.
#[cfg(feature = "extended")]
pub fn derivative_fd_extended(hp: &HolderPair, n: u32, x: f64, prec: usize) -> Result<FdEstimate> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain("derivative point must lie in (0, 1)", x));
    }
    let mut ext = crate::extended::Extended::new(prec)?;
    // a few guard bits for the transcendental kernels
    let eps = 64.0 * ext.epsilon();
    let h = step_for(n, x, eps);
    let at = libm::round(x / (0.5 * h)) * (0.5 * h);
    let d1 = ext.central_difference(hp, n, at, h)?;
    let d2 = ext.central_difference(hp, n, at, 2.0 * h)?;
    Ok(FdEstimate {
        at,
        order: n,
        step: h,
        value: d1.value,
        error_budget: eps * (d1.magnitude + d2.magnitude)
            + (d1.value - d2.value).abs() / 3.0
            + f64::EPSILON * d1.value.abs(),
        extended: true,
    })
}

/// Interior grid `i / (points + 1)`, `i = 1..=points`.
pub fn interior_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| i as f64 / (points + 1) as f64)
        .collect()
}

/// Relative tolerance of the integral route inside the monotonicity check.
pub const DERIVATIVE_REL_TOL: f64 = 1e-12;

/// For every order `n <= max_order` and grid point, computes `G^(n)` by the
/// integral route and by finite differences. The metric is the largest
/// `|integral - fd| / (fd budget + quadrature error)`; both values must also
/// be strictly positive.
pub fn absolute_monotonicity_check(
    hp: &HolderPair,
    max_order: u32,
    grid: &[f64],
) -> VerificationReport {
    let mut worst: f64 = 0.0;
    let mut min_value = f64::INFINITY;
    let mut failure = None;
    for n in 0..=max_order {
        for &x in grid {
            let fd = match derivative_fd(hp, n, x) {
                Ok(fd) => fd,
                Err(e) => {
                    failure = Some(e);
                    continue;
                }
            };
            let int = match derivative_integral(hp, n, fd.at, DERIVATIVE_REL_TOL) {
                Ok(d) => d,
                Err(e) => {
                    failure = Some(e);
                    continue;
                }
            };
            let ratio = (int.value - fd.value).abs() / (fd.error_budget + int.error);
            worst = worst.max(ratio);
            min_value = min_value.min(int.value).min(fd.value);
        }
    }
    let mut report = VerificationReport::at_most("expansion.absolute_monotonicity", worst, 1.0)
        .param("p", hp.p())
        .param("max_order", max_order as f64)
        .param("grid_points", grid.len() as f64)
        .param("min_derivative", min_value)
        .require(min_value > 0.0, "non-positive derivative");
    if let Some(e) = failure {
        report = report.require(false, &alloc::format!("{e}"));
    }
    report
}

/// Compares truncated series against the direct weight at the given points
/// for each truncation index; the metric is the largest
/// `|series - direct| / (tail bound + rounding)`. Also requires the tail
/// bound to shrink as the truncation index grows.
pub fn series_check(
    hp: &HolderPair,
    points: &[f64],
    truncations: &[usize],
    mv: &MomentVector,
) -> VerificationReport {
    let mut worst: f64 = 0.0;
    let mut shrinking = true;
    let sup = sup_norm(hp);
    for &x in points {
        let direct = match omega_opt_direct(hp, 1.0 / x) {
            Ok(w) => w / libm::pow(x, hp.p()),
            Err(_) => f64::NAN,
        };
        let mut prev = f64::INFINITY;
        for &k in truncations {
            if k >= mv.values.len() {
                shrinking = false;
                continue;
            }
            let c = hp.landau_constant().min(2.0 * sup / (2 * k + 3) as f64);
            let s = even_partial_sum(mv, x, k, c);
            let rounding = 64.0 * f64::EPSILON * direct.abs();
            worst = worst.max((s.value - direct).abs() / (s.tail_bound + rounding));
            shrinking &= s.tail_bound < prev;
            prev = s.tail_bound;
        }
    }
    VerificationReport::at_most("expansion.series_agreement", worst, 1.0)
        .param("p", hp.p())
        .param("points", points.len() as f64)
        .require(shrinking, "tail bound not decreasing")
}

/// Smallest derivative of the unrescaled map `x -> omega_p(1/x) = x^p G(x)`
/// for one order across a grid. Exploratory only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnrescaledScan {
    pub order: u32,
    pub min_value: f64,
    pub argmin: f64,
    pub negatives: usize,
}

/// Derivatives of `x^p G(x)` by the Leibniz rule over integral-route
/// derivatives of `G`.
pub fn unrescaled_derivative_scan(
    hp: &HolderPair,
    max_order: u32,
    grid: &[f64],
) -> Result<Vec<UnrescaledScan>> {
    let p = hp.p();
    let mut out = Vec::new();
    let mut derivs: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    for &x in grid {
        let row = (0..=max_order)
            .map(|m| derivative_integral(hp, m, x, DERIVATIVE_REL_TOL).map(|d| d.value))
            .collect::<Result<Vec<_>>>()?;
        derivs.push(row);
    }
    for n in 0..=max_order {
        let mut scan = UnrescaledScan {
            order: n,
            min_value: f64::INFINITY,
            argmin: f64::NAN,
            negatives: 0,
        };
        for (&x, row) in grid.iter().zip(&derivs) {
            // d^j/dx^j x^p = p (p-1) ... (p-j+1) x^(p-j)
            let mut acc = 0.0;
            let mut falling = 1.0;
            for j in 0..=n {
                let c = generalized_binomial(n as f64, j);
                acc += c * falling * libm::pow(x, p - j as f64) * row[(n - j) as usize];
                falling *= p - j as f64;
            }
            if acc < 0.0 {
                scan.negatives += 1;
            }
            if acc < scan.min_value {
                scan.min_value = acc;
                scan.argmin = x;
            }
        }
        out.push(scan);
    }
    Ok(out)
}
