//! Extended-precision evaluation used as an independent oracle and for
//! high-order finite differences.
//!
//! Backed by `astro-float`; the significand width is configurable and
//! defaults to 256 bits.

use alloc::vec::Vec;

pub use astro_float::{BigFloat, RoundingMode};
use astro_float::{Consts, Sign, WORD_BIT_SIZE};

use crate::complex::{generalized_binomial, HolderPair};
use crate::error::{domain, Result};

pub const DEFAULT_PRECISION: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

/// Rounds to the nearest `f64` (ignoring bits below the top word pair).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let mut top: u64 = 0;
    let mut bits = 0;
    for &w in words.iter().rev() {
        if bits >= 64 {
            break;
        }
        top |= w << (64 - WORD_BIT_SIZE - bits);
        bits += WORD_BIT_SIZE;
    }
    // the significand is a fraction in [1/2, 1)
    let v = libm::scalbn(top as f64, exponent - 64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// An evaluation context holding the precision and the constant cache.
pub struct Extended {
    prec: usize,
    cc: Consts,
}

/// Result of an `n`-th central difference: the quotient and
/// `sum_j C(n, j) |G(y_j)| / h^n`, the scale of its rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralDifference {
    pub value: f64,
    pub magnitude: f64,
}

impl Extended {
    pub fn new(prec: usize) -> Result<Self> {
        if prec < 64 {
            return Err(domain(
                "extended precision needs at least 64 bits",
                prec as f64,
            ));
        }
        let cc = Consts::new()
            .map_err(|_| domain("could not allocate the constant cache", prec as f64))?;
        Ok(Extended { prec, cc })
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    /// Unit roundoff `2^(1 - prec)`.
    pub fn epsilon(&self) -> f64 {
        libm::scalbn(1.0, 1 - self.prec as i32)
    }

    pub fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.prec)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.prec, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.prec, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.prec, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.prec, RM)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.prec, RM, &mut self.cc)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.prec, RM, &mut self.cc)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.prec, RM)
    }

    pub fn cos(&mut self, a: &BigFloat) -> BigFloat {
        a.cos(self.prec, RM, &mut self.cc)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.prec, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.prec, RM)
    }

    /// `a^y` for `a > 0`.
    pub fn powf(&mut self, a: &BigFloat, y: &BigFloat) -> BigFloat {
        let l = self.ln(a);
        let t = self.mul(y, &l);
        self.exp(&t)
    }

    /// `G(x) = |x|^-p omega_p(1/|x|)` for `0 < |x| <= 1`, and `m_0` at `x = 0`.
    pub fn rescaled_weight(&mut self, hp: &HolderPair, x: &BigFloat) -> BigFloat {
        let p = self.num(hp.p());
        let one = self.num(1.0);
        let s = self.sub(&p, &one);
        let u = self.div(&s, &p);
        if x.is_zero() {
            return self.powf(&u, &p);
        }
        let x = x.abs();
        let lo = self.sub(&one, &x);
        let hi = self.add(&one, &x);
        let a = if lo.is_zero() {
            one.clone()
        } else {
            let t = self.powf(&lo, &u);
            self.sub(&one, &t)
        };
        let t = self.powf(&hi, &u);
        let b = self.sub(&t, &one);
        let a_s = self.powf(&a, &s);
        let b_s = self.powf(&b, &s);
        let diff = self.sub(&a_s, &b_s);
        let xp = self.powf(&x, &p);
        self.div(&diff, &xp)
    }

    /// `rho_p(x)` evaluated in extended precision and rounded to `f64`.
    pub fn rho(&mut self, hp: &HolderPair, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain("density argument must lie in [0, 1]", x));
        }
        if x == 0.0 || x == 1.0 {
            return Ok(0.0);
        }
        let p = self.num(hp.p());
        let one = self.num(1.0);
        let s = self.sub(&p, &one);
        let u = self.div(&s, &p);
        let xb = self.num(x);
        let pi = self.pi();
        // t = (1/x - 1)^u
        let r = self.div(&one, &xb);
        let r = self.sub(&r, &one);
        let t = self.powf(&r, &u);
        let angle = self.mul(&pi, &u);
        let c = self.cos(&angle);
        let sn = self.sin(&angle);
        // w = 1 - e^(i pi u) t = re - i b with b > 0
        let ct = self.mul(&c, &t);
        let re = self.sub(&one, &ct);
        let b = self.mul(&sn, &t);
        let re2 = self.mul(&re, &re);
        let b2 = self.mul(&b, &b);
        let m2 = self.add(&re2, &b2);
        let modulus = self.sqrt(&m2);
        // Arg w = atan(re / b) - pi/2
        let q = self.div(&re, &b);
        let at = q.atan(self.prec, RM, &mut self.cc);
        let half_pi = self.div(&pi, &self.num(2.0));
        let arg = self.sub(&at, &half_pi);
        let xm = self.mul(&xb, &modulus);
        let scale = self.powf(&xm, &s);
        let phase = self.mul(&s, &arg);
        let sin_phase = self.sin(&phase);
        let v = self.mul(&scale, &sin_phase);
        let v = self.div(&v, &pi);
        let out = -to_f64(&v);
        if out.is_nan() {
            return Err(domain("extended-precision density evaluation failed", x));
        }
        Ok(out)
    }

    /// `n`-th central difference of `G` at `x` with step `h`, nodes
    /// `x + (n/2 - j) h` formed exactly.
    pub fn central_difference(
        &mut self,
        hp: &HolderPair,
        n: u32,
        x: f64,
        h: f64,
    ) -> Result<CentralDifference> {
        let xb = self.num(x);
        let hb = self.num(h);
        let mut sum = self.num(0.0);
        let mut magnitude = 0.0;
        let values: Vec<(f64, BigFloat)> = (0..=n)
            .map(|j| {
                let offset = self.num(0.5 * n as f64 - j as f64);
                let step = self.mul(&offset, &hb);
                let y = self.add(&xb, &step);
                (
                    generalized_binomial(n as f64, j),
                    self.rescaled_weight(hp, &y),
                )
            })
            .collect();
        for (j, (c, g)) in values.iter().enumerate() {
            let term = self.mul(&self.num(*c), g);
            sum = if j % 2 == 0 {
                self.add(&sum, &term)
            } else {
                self.sub(&sum, &term)
            };
            magnitude += c * to_f64(g).abs();
        }
        let hn = libm::pow(h, n as f64);
        let hn_b = hb.powi(n as usize, self.prec, RM);
        let value = to_f64(&self.div(&sum, &hn_b));
        if !value.is_finite() {
            return Err(domain("extended-precision difference failed", x));
        }
        Ok(CentralDifference {
            value,
            magnitude: magnitude / hn,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn conversion_round_trips() {
        let ext = Extended::new(DEFAULT_PRECISION).unwrap();
        for x in [1.0, -2.5, 1e-300, 3.0e250, PI, 0.1, -1e-5, 0.0] {
            assert_eq!(to_f64(&ext.num(x)), x);
        }
    }

    #[test]
    fn conversion_rounds_to_nearest() {
        let ext = Extended::new(DEFAULT_PRECISION).unwrap();
        let third = ext.div(&ext.num(1.0), &ext.num(3.0));
        assert_eq!(to_f64(&third), 1.0 / 3.0);
        let mut e2 = Extended::new(DEFAULT_PRECISION).unwrap();
        let pi = e2.pi();
        assert_eq!(to_f64(&pi), PI);
    }

    #[test]
    fn density_matches_p2_closed_form() {
        let hp = HolderPair::new(2.0).unwrap();
        let mut ext = Extended::new(DEFAULT_PRECISION).unwrap();
        for i in 1..100 {
            let x = i as f64 / 100.0;
            let exact = libm::sqrt(x * (1.0 - x)) / PI;
            assert!((ext.rho(&hp, x).unwrap() - exact).abs() < 1e-16);
        }
    }

    #[test]
    fn rescaled_weight_limits() {
        let hp = HolderPair::new(2.0).unwrap();
        let mut ext = Extended::new(DEFAULT_PRECISION).unwrap();
        let at0 = to_f64(&ext.rescaled_weight(&hp, &ext.num(0.0)));
        assert_eq!(at0, 0.25);
        let x = ext.num(0.5);
        // 4 omega_2(2) = 4 (2 - sqrt(1/2) - sqrt(3/2))
        let g = to_f64(&ext.rescaled_weight(&hp, &x));
        let exact = 4.0 * (2.0 - libm::sqrt(0.5) - libm::sqrt(1.5));
        assert!((g - exact).abs() < 1e-15);
        let tiny = ext.num(1e-30);
        assert!((to_f64(&ext.rescaled_weight(&hp, &tiny)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_low_precision() {
        assert!(Extended::new(32).is_err());
    }
}
