//! The boundary density `rho_p` on `[0, 1]`.
//!
//! `rho_p(x) = -(1/pi) x^(p-1) Im[(1 - e^(i pi/q) t)^(p-1)]` with
//! `t = (1/x - 1)^(1/q)`, `rho_p(0) = 0` by continuity. The modulus part is
//! combined in the log domain so that `t` never overflows for tiny `x`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::complex::{boundary_rotation, generalized_binomial, HolderPair};
use crate::error::{domain, Error, Result};
use crate::report::VerificationReport;

/// `rho_p(x)` for `x` in `[0, 1]`.
pub fn rho(hp: &HolderPair, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("density argument must lie in [0, 1]", x));
    }
    Ok(rho_unchecked(hp, x))
}

pub(crate) fn rho_unchecked(hp: &HolderPair, x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    rho_split(hp, x, libm::log1p(-x))
}

/// `rho_p(1 - c)` for small `c > 0`, keeping the distance to 1 exact.
pub(crate) fn rho_complement(hp: &HolderPair, c: f64) -> f64 {
    if c <= 0.0 || c >= 1.0 {
        return 0.0;
    }
    rho_split(hp, 1.0 - c, libm::log(c))
}

fn rho_split(hp: &HolderPair, x: f64, ln_c: f64) -> f64 {
    let s = hp.outer();
    let rot = boundary_rotation(hp);
    // ln t = (ln(1 - x) - ln x) / q
    let ln_t = hp.inv_q() * (ln_c - libm::log(x));
    let (ln_mod, arg) = if ln_t < 0.0 {
        let t = libm::exp(ln_t);
        let (re, im) = (1.0 - rot.re * t, -rot.im * t);
        (libm::log(libm::hypot(re, im)), libm::atan2(im, re))
    } else {
        // w = t (1/t - e^(i pi/q)); the positive factor t leaves Arg unchanged
        let v = libm::exp(-ln_t);
        let (re, im) = (v - rot.re, -rot.im);
        (ln_t + libm::log(libm::hypot(re, im)), libm::atan2(im, re))
    };
    let modulus = libm::exp(s * (libm::log(x) + ln_mod));
    -modulus * libm::sin(s * arg) / PI
}

/// Finite binomial form of `rho_p`, valid for integer `p >= 2`.
pub fn rho_binomial(hp: &HolderPair, x: f64) -> Result<f64> {
    let p = hp.as_integer().ok_or(Error::NonIntegerExponent(hp.p()))?;
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("density argument must lie in [0, 1]", x));
    }
    let inv_q = hp.inv_q();
    let outer = hp.outer();
    let mut sum = 0.0;
    for j in 0..p {
        let jf = j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = generalized_binomial(outer, j)
            * sign
            * libm::sin(jf * PI * inv_q)
            * libm::pow(1.0 - x, jf * inv_q)
            * libm::pow(x, outer - jf * inv_q);
        sum += term;
    }
    Ok(-sum / PI)
}

/// Exponent of the algebraic behaviour of `rho_p` at `x = 0`: `(p - 1)/p`.
pub fn left_exponent(hp: &HolderPair) -> f64 {
    hp.inv_q()
}

/// Exponent of the algebraic behaviour of `rho_p` at `x = 1`: `1/q`.
pub fn right_exponent(hp: &HolderPair) -> f64 {
    hp.inv_q()
}

/// Sampled values of `rho_p` on `[0, 1]`. Nodes are sorted and include both
/// endpoints, where the value is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub endpoint_flags: Vec<bool>,
}

impl DensityGrid {
    /// `n >= 2` equally spaced nodes including `0` and `1`.
    pub fn uniform(hp: &HolderPair, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain("uniform grid needs at least two nodes", n as f64));
        }
        let nodes = (0..n)
            .map(|i| {
                if i == n - 1 {
                    1.0
                } else {
                    i as f64 / (n - 1) as f64
                }
            })
            .collect();
        Ok(Self::from_nodes(hp, nodes))
    }

    /// `interior` interior nodes: half uniform, the rest geometrically
    /// clustered toward both endpoints (down to a distance of `1e-12`),
    /// plus the two endpoints.
    pub fn refined(hp: &HolderPair, interior: usize) -> Result<Self> {
        if interior < 2 {
            return Err(domain(
                "refined grid needs at least two interior nodes",
                interior as f64,
            ));
        }
        Ok(Self::from_nodes(hp, refined_interior_nodes(interior, true)))
    }

    fn from_nodes(hp: &HolderPair, mut nodes: Vec<f64>) -> Self {
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let values = nodes.iter().map(|&x| rho_unchecked(hp, x)).collect();
        let endpoint_flags = nodes.iter().map(|&x| x == 0.0 || x == 1.0).collect();
        DensityGrid {
            nodes,
            values,
            endpoint_flags,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Minimum over interior nodes.
    pub fn interior_min(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.endpoint_flags)
            .filter(|(_, &end)| !end)
            .map(|(&v, _)| v)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest jump between neighbouring samples.
    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// Interior nodes: half uniform, a quarter geometric toward each endpoint.
/// With `with_endpoints`, `0` and `1` are appended.
pub(crate) fn refined_interior_nodes(interior: usize, with_endpoints: bool) -> Vec<f64> {
    let geometric = interior / 4;
    let uniform = interior - 2 * geometric;
    let mut nodes = Vec::with_capacity(interior + 2);
    for i in 1..=uniform {
        nodes.push(i as f64 / (uniform + 1) as f64);
    }
    for i in 0..geometric {
        // distances from 1e-1 down to 1e-12
        let frac = if geometric > 1 {
            i as f64 / (geometric - 1) as f64
        } else {
            0.0
        };
        let d = libm::pow(10.0, -1.0 - 11.0 * frac);
        nodes.push(d);
        nodes.push(1.0 - d);
    }
    if with_endpoints {
        nodes.push(0.0);
        nodes.push(1.0);
    }
    nodes
}

/// Estimate of `sup rho_p` on `[0, 1]`: maximum over a refined grid,
/// then polished by golden-section search around the best node.
pub fn sup_norm(hp: &HolderPair) -> f64 {
    let grid = DensityGrid::refined(hp, 1000).expect("fixed grid size");
    let (best, _) = grid
        .values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let lo = grid.nodes[best.saturating_sub(1)];
    let hi = grid.nodes[(best + 1).min(grid.len() - 1)];
    let polished = golden_max(|x| rho_unchecked(hp, x), lo, hi);
    polished.max(grid.max_value())
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Evaluates `rho_p` on `grid_size` interior points (uniform plus
/// endpoint-refined) and passes iff the minimum is strictly positive.
pub fn positivity_scan(hp: &HolderPair, grid_size: usize) -> VerificationReport {
    let nodes = refined_interior_nodes(grid_size.max(2), false);
    let min = nodes
        .iter()
        .map(|&x| rho_unchecked(hp, x))
        .fold(f64::INFINITY, f64::min);
    VerificationReport::greater_than("density.positive_interior", min, 0.0)
        .param("p", hp.p())
        .param("grid_size", nodes.len() as f64)
}

/// For `p = 2` the density is `sqrt(x (1 - x)) / pi`. Compares `rho_2` with
/// that closed form on `points` uniform nodes of `[0, 1]`, and the closed
/// form with an extended-precision evaluation when available.
pub fn p2_closed_form_check(points: usize) -> VerificationReport {
    let hp = HolderPair::new(2.0).expect("p = 2 is valid");
    let n = points.max(2);
    let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let closed = |x: f64| libm::sqrt(x * (1.0 - x)) / PI;
    let double = nodes
        .iter()
        .map(|&x| (rho_unchecked(&hp, x) - closed(x)).abs())
        .fold(0.0, f64::max);
    let mut report = VerificationReport::at_most("density.p2_closed_form", double, 1e-13)
        .param("p", 2.0)
        .param("points", n as f64)
        .param("max_deviation_double", double);
    if let Some(oracle) = extended_deviation(&hp, &nodes, closed) {
        match oracle {
            Ok(dev) => {
                report = report.param("max_deviation_extended", dev);
                report.metric = double.max(dev);
                report.scale_tolerance(1.0);
            }
            Err(e) => report = report.require(false, &alloc::format!("{e}")),
        }
    }
    report
}

#[cfg(feature = "extended")]
fn extended_deviation(
    hp: &HolderPair,
    nodes: &[f64],
    closed: impl Fn(f64) -> f64,
) -> Option<Result<f64>> {
    use crate::extended::{Extended, DEFAULT_PRECISION};
    let run = || -> Result<f64> {
        let mut ext = Extended::new(DEFAULT_PRECISION)?;
        let mut worst: f64 = 0.0;
        for &x in nodes {
            worst = worst.max((ext.rho(hp, x)? - closed(x)).abs());
        }
        Ok(worst)
    };
    Some(run())
}

#[cfg(not(feature = "extended"))]
fn extended_deviation(_: &HolderPair, _: &[f64], _: impl Fn(f64) -> f64) -> Option<Result<f64>> {
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(p: f64) -> HolderPair {
        HolderPair::new(p).unwrap()
    }

    // brute-force evaluation with plain complex arithmetic in f64
    fn rho_naive(p: f64, x: f64) -> f64 {
        use crate::complex::ComplexPoint;
        let h = hp(p);
        let t = libm::pow(1.0 / x - 1.0, h.inv_q());
        let w = ComplexPoint::ONE - boundary_rotation(&h) * t;
        -libm::pow(x, p - 1.0) * w.powf(p - 1.0).im / PI
    }

    #[test]
    fn p2_at_half() {
        let v = rho(&hp(2.0), 0.5).unwrap();
        assert!((v - 0.5 / PI).abs() < 1e-16, "{v}");
    }

    #[test]
    fn endpoints_are_zero() {
        for p in [1.1, 1.5, 2.0, 3.0, 7.3] {
            assert_eq!(rho(&hp(p), 0.0).unwrap(), 0.0);
            assert_eq!(rho(&hp(p), 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn p3_matches_brute_force() {
        // (1 - e^{2 pi i/3})^2 at x = 1/2 gives 0.25 * sqrt(3) * 3/2 / pi ... evaluated numerically
        let golden = rho_naive(3.0, 0.5);
        let direct = {
            let w_re = 1.0 - libm::cos(2.0 * PI / 3.0);
            let w_im = -libm::sin(2.0 * PI / 3.0);
            -0.25 * (2.0 * w_re * w_im) / PI
        };
        assert!((golden - direct).abs() < 1e-15);
        assert!((rho(&hp(3.0), 0.5).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn matches_naive_formula_away_from_endpoints() {
        for p in [1.2, 1.5, 2.5, 3.7, 6.0] {
            for i in 1..100 {
                let x = i as f64 / 100.0;
                let a = rho(&hp(p), x).unwrap();
                let b = rho_naive(p, x);
                assert!((a - b).abs() < 1e-14, "p={p} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(rho(&hp(2.0), -1e-3).is_err());
        assert!(rho(&hp(2.0), 1.0 + 1e-12).is_err());
        assert!(rho(&hp(2.0), f64::NAN).is_err());
        assert!(matches!(
            rho_binomial(&hp(2.5), 0.5),
            Err(Error::NonIntegerExponent(_))
        ));
    }

    #[test]
    fn binomial_form_examples() {
        assert!((rho_binomial(&hp(2.0), 0.5).unwrap() - 0.5 / PI).abs() < 1e-16);
        assert_eq!(rho_binomial(&hp(2.0), 0.0).unwrap(), 0.0);
        assert!(rho_binomial(&hp(2.0), 1.0).unwrap().abs() < 1e-16);
    }

    #[test]
    fn closed_form_for_p2() {
        let h = hp(2.0);
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            let exact = libm::sqrt(x * (1.0 - x)) / PI;
            assert!((rho(&h, x).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn p2_check_passes() {
        let r = p2_closed_form_check(1000);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.parameter("points"), Some(1000.0));
    }

    #[test]
    fn endpoint_scaling_limits() {
        // rho ~ sin(pi/q)/pi x^{(p-1)/p} at 0 and (p-1) sin(pi/q)/pi (1-x)^{1/q} at 1
        for p in [1.5, 2.0, 3.0, 5.5] {
            let h = hp(p);
            let s = libm::sin(PI * h.inv_q()) / PI;
            let mut prev_gap = f64::INFINITY;
            for k in 2..=8 {
                let x = libm::pow(10.0, -(k as f64));
                let left = rho(&h, x).unwrap() / libm::pow(x, left_exponent(&h));
                let gap = (left / s - 1.0).abs();
                assert!(gap < prev_gap || gap < 1e-12, "p={p} k={k}");
                prev_gap = gap;
            }
            // next correction is O(x^{1/q})
            let floor = 50.0 * libm::pow(1e-8, h.inv_q());
            assert!(prev_gap < floor, "p={p}: {prev_gap}");

            let mut prev_gap = f64::INFINITY;
            for k in 2..=8 {
                let d = libm::pow(10.0, -(k as f64));
                let right = rho(&h, 1.0 - d).unwrap() / libm::pow(d, right_exponent(&h));
                let gap = (right / ((p - 1.0) * s) - 1.0).abs();
                assert!(gap < prev_gap || gap < 1e-6, "p={p} k={k}");
                prev_gap = gap;
            }
            assert!(prev_gap < floor, "p={p}: {prev_gap}");
        }
    }

    #[test]
    fn grids_and_continuity() {
        let h = hp(2.7);
        let g = DensityGrid::uniform(&h, 5).unwrap();
        assert_eq!(g.nodes, [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.values[0], 0.0);
        assert_eq!(g.values[4], 0.0);
        assert_eq!(g.endpoint_flags, [true, false, false, false, true]);

        let mut prev = f64::INFINITY;
        for n in [11, 101, 1001, 10001] {
            let jump = DensityGrid::uniform(&h, n).unwrap().max_jump();
            assert!(jump < prev);
            prev = jump;
        }
        assert!(prev < 1e-2);

        let r = DensityGrid::refined(&h, 1000).unwrap();
        assert!(r.interior_min() > 0.0);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(DensityGrid::uniform(&h, 1).is_err());
    }

    #[test]
    fn positivity_examples() {
        for p in [2.0, 1.5, 7.3] {
            let r = positivity_scan(&hp(p), 1000);
            assert!(r.passed, "p={p}: {r:?}");
        }
    }

    #[test]
    fn sup_norm_for_p2() {
        assert!((sup_norm(&hp(2.0)) - 0.5 / PI).abs() < 1e-15);
    }
}
