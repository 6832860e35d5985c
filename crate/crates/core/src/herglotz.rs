//! The function `f_p(z) = -z^(p-1) omega_p(z)` on the cut plane `C \ [-1, 1]`,
//! its boundary values on the cut, and the property checks around it.
//!
//! In the upper half-plane two algebraically equivalent formulas are used:
//! the definition `z^(p-1) [((1 + 1/z)^(1/q) - 1)^(p-1) - (1 - (1 - 1/z)^(1/q))^(p-1)]`
//! for `|z| <= 2` and the product form
//! `(z (1 + 1/z)^(1/q) - z)^(p-1) - (z - z (1 - 1/z)^(1/q))^(p-1)` beyond.
//! The lower half-plane is reached by Schwarz reflection.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{boundary_rotation, generalized_binomial, ComplexPoint, HolderPair};
use crate::density::{rho, rho_unchecked};
use crate::error::{domain, Error, Result};
use crate::quadrature::{EndpointHint, Integrator};
use crate::report::VerificationReport;
use crate::weight::bracket;

/// Points closer than this to `[-1, 1]` are rejected.
pub const CUT_TOLERANCE: f64 = 1e-12;

/// Radius beyond which the product form is used in the upper half-plane.
pub const PRODUCT_FORM_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRoute {
    DefinitionForm,
    ProductForm,
    RealAxisLimit,
}

impl BranchRoute {
    pub fn name(self) -> &'static str {
        match self {
            BranchRoute::DefinitionForm => "definition_form",
            BranchRoute::ProductForm => "product_form",
            BranchRoute::RealAxisLimit => "real_axis_limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerglotzEval {
    pub z: ComplexPoint,
    pub value: ComplexPoint,
    pub branch_route: BranchRoute,
}

fn distance_to_cut(z: ComplexPoint) -> f64 {
    libm::hypot((z.re.abs() - 1.0).max(0.0), z.im)
}

fn check_point(z: ComplexPoint) -> Result<()> {
    z.check_finite()?;
    if distance_to_cut(z) <= CUT_TOLERANCE {
        return Err(Error::OnCut { re: z.re, im: z.im });
    }
    Ok(())
}

/// `f_p(z)` with the route that produced it.
pub fn evaluate(hp: &HolderPair, z: ComplexPoint) -> Result<HerglotzEval> {
    check_point(z)?;
    let (value, branch_route) = if z.im == 0.0 {
        (
            ComplexPoint::real(real_axis(hp, z.re)),
            BranchRoute::RealAxisLimit,
        )
    } else {
        let upper = if z.im > 0.0 { z } else { z.conj() };
        let (v, route) = if upper.abs() > PRODUCT_FORM_RADIUS {
            (product_upper(hp, upper), BranchRoute::ProductForm)
        } else {
            (definition(hp, upper), BranchRoute::DefinitionForm)
        };
        (if z.im > 0.0 { v } else { v.conj() }, route)
    };
    Ok(HerglotzEval {
        z,
        value,
        branch_route,
    })
}

pub fn f_p(hp: &HolderPair, z: ComplexPoint) -> Result<ComplexPoint> {
    evaluate(hp, z).map(|e| e.value)
}

/// The defining formula with principal branches, applied literally at any
/// point off the cut (including the lower half-plane).
pub fn f_p_definition(hp: &HolderPair, z: ComplexPoint) -> Result<ComplexPoint> {
    check_point(z)?;
    Ok(definition(hp, z))
}

/// The product form; valid in the upper half-plane and on `(1, inf)`.
pub fn f_p_product_form(hp: &HolderPair, z: ComplexPoint) -> Result<ComplexPoint> {
    z.check_finite()?;
    if !(z.im > 0.0 || (z.im == 0.0 && z.re > 1.0)) {
        return Err(domain("product form needs Im z > 0 or real z > 1", z.im));
    }
    check_point(z)?;
    Ok(product_upper(hp, z))
}

// x real, |x| > 1
fn real_axis(hp: &HolderPair, x: f64) -> f64 {
    let a = x.abs();
    let v = -libm::pow(a, hp.outer()) * bracket(hp, 1.0 / a);
    if x > 0.0 {
        v
    } else {
        -v
    }
}

fn definition(hp: &HolderPair, z: ComplexPoint) -> ComplexPoint {
    let u = hp.inv_q();
    let s = hp.outer();
    let w = z.recip();
    let d_plus = w.ln_1p().scale(u).exp_m1();
    let d_minus = -(-w).ln_1p().scale(u).exp_m1();
    z.powf(s) * (d_plus.powf(s) - d_minus.powf(s))
}

fn product_upper(hp: &HolderPair, z: ComplexPoint) -> ComplexPoint {
    let u = hp.inv_q();
    let s = hp.outer();
    let w = z.recip();
    let z_minus = z * -(-w).ln_1p().scale(u).exp_m1();
    if w.abs() <= 0.5 {
        // (z d+)^s = (z d-)^s (1 + r)^s with r = (d+ - d-)/d-; both bases
        // stay in the right half-plane here, so the branches agree
        let gap = even_gap(u, w);
        let r = (z * gap) / z_minus;
        z_minus.powf(s) * r.ln_1p().scale(s).exp_m1()
    } else {
        let z_plus = z * w.ln_1p().scale(u).exp_m1();
        z_plus.powf(s) - z_minus.powf(s)
    }
}

/// `(1 + w)^u + (1 - w)^u - 2 = 2 sum_{j >= 1} C(u, 2j) w^(2j)` for `|w| <= 1/2`.
fn even_gap(u: f64, w: ComplexPoint) -> ComplexPoint {
    let w2 = w * w;
    let mut power = ComplexPoint::ONE;
    let mut sum = ComplexPoint::ZERO;
    let mut j = 1;
    loop {
        power = power * w2;
        let term = power.scale(2.0 * generalized_binomial(u, 2 * j));
        sum += term;
        if term.abs() <= 0.25 * f64::EPSILON * sum.abs() || j >= 200 {
            return sum;
        }
        j += 1;
    }
}

/// `x^(p-1) [((1 + 1/x)^(1/q) - 1)^(p-1) - (1 - e^(i pi/q) (1/x - 1)^(1/q))^(p-1)]`
/// for `0 < x <= 1`, the limit of `f_p` from the upper half-plane.
pub fn boundary_value(hp: &HolderPair, x: f64) -> Result<ComplexPoint> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(domain("boundary point must lie in (0, 1]", x));
    }
    let u = hp.inv_q();
    let s = hp.outer();
    let first = libm::pow(x * libm::expm1(u * libm::log1p(1.0 / x)), s);
    // x (1/x - 1)^u = x^(1/p) (1 - x)^u keeps the magnitude bounded
    let scaled_t = libm::pow(x, 1.0 / hp.p()) * libm::pow(1.0 - x, u);
    let inner = ComplexPoint::real(x) - boundary_rotation(hp).scale(scaled_t);
    Ok(ComplexPoint::real(first) - inner.powf(s))
}

/// `∫_{-1}^{1} rho_p(|t|) / (t - z) dt = ∫_0^1 rho_p(t) 2z / (t^2 - z^2) dt`,
/// to absolute tolerance `tol`.
pub fn stieltjes_transform(hp: &HolderPair, z: ComplexPoint, tol: f64) -> Result<ComplexPoint> {
    check_point(z)?;
    let z2 = z * z;
    let two_z = z.scale(2.0);
    let e = hp.inv_q();
    let r = Integrator::new(tol).integrate(
        |t| {
            let denom = ComplexPoint::real(t * t) - z2;
            (two_z / denom).scale(rho_unchecked(hp, t))
        },
        0.0,
        1.0,
        Some(EndpointHint::both(e, e)),
    )?;
    if !r.converged {
        return Err(Error::NonConvergence {
            estimate: r.value.abs(),
            error_estimate: r.error_estimate,
            tolerance: tol,
        });
    }
    Ok(r.value)
}

/// Minimum of `Im f_p` over a log-radial grid in the upper half-plane
/// (radii `1e-2..1e3`, angles in `(0, pi)`); passes iff `>= -1e-12`.
pub fn herglotz_scan(hp: &HolderPair, samples: usize) -> VerificationReport {
    let samples = samples.max(1);
    let radii = libm::ceil(libm::sqrt(samples as f64)) as usize;
    let angles = samples.div_ceil(radii);
    let mut min = f64::INFINITY;
    let mut count = 0;
    'outer: for i in 0..radii {
        let frac = if radii > 1 {
            i as f64 / (radii - 1) as f64
        } else {
            0.5
        };
        let r = libm::pow(10.0, -2.0 + 5.0 * frac);
        for j in 0..angles {
            if count == samples {
                break 'outer;
            }
            let theta = PI * (j as f64 + 0.5) / angles as f64;
            let z = ComplexPoint::from_polar(r, theta);
            let im = f_p(hp, z).map(|v| v.im).unwrap_or(f64::NAN);
            if !(im >= min) {
                min = im;
            }
            count += 1;
        }
    }
    VerificationReport::at_least("herglotz.nonnegative_imaginary", min, -1e-12)
        .param("p", hp.p())
        .param("samples", count as f64)
}

fn random_off_axis(rng: &mut ChaCha8Rng) -> ComplexPoint {
    loop {
        let r = libm::pow(10.0, rng.gen_range(-2.0..3.0));
        let theta = rng.gen_range(-PI..PI);
        let z = ComplexPoint::from_polar(r, theta);
        if z.im.abs() > 1e-9 * r && distance_to_cut(z) > 1e-9 {
            return z;
        }
    }
}

/// Conjugation and oddness at `points` random points off the real axis.
/// Conjugation is tested on the literal definition (no reflection), oddness
/// on the routed evaluation. The metric is the worst relative violation.
pub fn symmetry_check(hp: &HolderPair, points: usize, seed: u64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let z = random_off_axis(&mut rng);
        let Ok(fz) = f_p(hp, z) else {
            worst = f64::NAN;
            break;
        };
        let scale = fz.abs();
        let conj = match (f_p_definition(hp, z.conj()), f_p_definition(hp, z)) {
            (Ok(a), Ok(b)) => (a - b.conj()).abs() / b.abs(),
            _ => f64::NAN,
        };
        let odd = match f_p(hp, -z) {
            Ok(v) => (v + fz).abs() / scale,
            Err(_) => f64::NAN,
        };
        if conj.is_nan() || odd.is_nan() {
            worst = f64::NAN;
            break;
        }
        worst = worst.max(conj).max(odd);
    }
    VerificationReport::at_most("herglotz.symmetry", worst, 1e-12)
        .param("p", hp.p())
        .param("points", points as f64)
        .param("seed", seed as f64)
}

/// `c(r) = r |z f_p(z) + m_0|` at `|z| = 1e2, 1e3, 1e4` along four rays.
/// `C = c(1e2)`; the metric is `max c(r) / C` over the larger radii and the
/// sequence must not increase.
pub fn asymptotic_check(hp: &HolderPair) -> VerificationReport {
    let m0 = hp.landau_constant();
    let directions = [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0, -PI / 3.0];
    let radii = [1e2, 1e3, 1e4];
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut calibrated: f64 = 0.0;
    for theta in directions {
        let c: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let z = ComplexPoint::from_polar(r, theta);
                match f_p(hp, z) {
                    Ok(v) => r * (z * v + ComplexPoint::real(m0)).abs(),
                    Err(_) => f64::NAN,
                }
            })
            .collect();
        calibrated = calibrated.max(c[0]);
        for i in 1..c.len() {
            worst = worst.max(c[i] / c[0]);
            monotone &= c[i] <= c[i - 1];
        }
        if c.iter().any(|v| v.is_nan()) {
            worst = f64::NAN;
        }
    }
    VerificationReport::at_most("herglotz.asymptotics", worst, 1.0)
        .param("p", hp.p())
        .param("calibrated_c", calibrated)
        .require(monotone, "bound increases with |z|")
}

/// `n` test points with radii log-spaced over `[1.2, 1e3]` and golden-angle
/// arguments, covering all four quadrants.
pub fn representation_points(n: usize) -> Vec<ComplexPoint> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..n)
        .map(|i| {
            let frac = if n > 1 {
                i as f64 / (n - 1) as f64
            } else {
                0.0
            };
            let r = 1.2 * libm::pow(1e3 / 1.2, frac);
            ComplexPoint::from_polar(r, 0.3 + golden * i as f64)
        })
        .collect()
}

/// Quadrature tolerance used by [`representation_check`].
pub const REPRESENTATION_QUAD_TOL: f64 = 1e-10;

/// `max |f_p(z) - stieltjes_transform(z)|` over [`representation_points`];
/// passes at `1e-8`.
pub fn representation_check(hp: &HolderPair, points: usize) -> VerificationReport {
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for z in representation_points(points) {
        match (
            f_p(hp, z),
            stieltjes_transform(hp, z, REPRESENTATION_QUAD_TOL),
        ) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
            (Err(e), _) | (_, Err(e)) => {
                failure = Some(e);
                worst = f64::NAN;
            }
        }
    }
    let mut r = VerificationReport::at_most("herglotz.representation", worst, 1e-8)
        .param("p", hp.p())
        .param("points", points as f64)
        .param("quad_tol", REPRESENTATION_QUAD_TOL);
    if let Some(e) = failure {
        r = r.note(&alloc::format!("{e}"));
    }
    r
}

/// Value at `0` of the interpolating polynomial through `(xs[i], ys[i])`.
fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p: Vec<f64> = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// Offsets used to approach the cut in [`boundary_check`].
pub const BOUNDARY_EPSILONS: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];

/// Extrapolates `Im f_p(x + i eps)` to `eps = 0` at `points` interior points
/// of `(-1, 1)` and compares with `pi rho_p(|x|)`.
pub fn boundary_check(hp: &HolderPair, points: usize) -> VerificationReport {
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let x = -1.0 + (2 * i + 1) as f64 / points as f64;
        let ys: Vec<f64> = BOUNDARY_EPSILONS
            .iter()
            .map(|&eps| {
                f_p(hp, ComplexPoint::new(x, eps))
                    .map(|v| v.im)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let limit = neville_at_zero(&BOUNDARY_EPSILONS, &ys);
        let target = PI * rho(hp, x.abs()).unwrap_or(f64::NAN);
        let err = (limit - target).abs();
        if !(err <= worst) {
            worst = err;
        }
    }
    VerificationReport::at_most("herglotz.boundary_values", worst, 1e-6)
        .param("p", hp.p())
        .param("points", points as f64)
        .note("tolerance 1e-6 is an engineering choice; the approach rate is not quantified")
}

/// The limit of `f_p` from the upper half-plane at real `x > 1` against
/// the real-axis formula.
pub fn real_axis_check(hp: &HolderPair, x: f64) -> VerificationReport {
    let eps = [1e-4, 1e-5, 1e-6, 1e-7];
    let ys: Vec<f64> = eps
        .iter()
        .map(|&e| {
            f_p(hp, ComplexPoint::new(x, e))
                .map(|v| v.re)
                .unwrap_or(f64::NAN)
        })
        .collect();
    let limit = neville_at_zero(&eps, &ys);
    let exact = f_p(hp, ComplexPoint::real(x))
        .map(|v| v.re)
        .unwrap_or(f64::NAN);
    VerificationReport::at_most(
        "herglotz.real_axis_continuity",
        (limit - exact).abs(),
        1e-10,
    )
    .param("p", hp.p())
    .param("x", x)
}
