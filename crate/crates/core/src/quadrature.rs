//! Globally adaptive Gauss-Kronrod (7/15) integration on a finite interval,
//! with optional algebraic endpoint regularization.
//!
//! When an endpoint hint supplies an exponent `alpha` for behaviour like
//! `(x - a)^alpha`, the half-interval next to that endpoint is remapped by
//! `x = a + h s^m` with `m = max(1, 2 / (1 + alpha))`, so the leading term of
//! the transformed integrand grows like `s^1` instead of carrying a fractional
//! power. Real and complex integrands share the same subdivision tree; the
//! error of a complex panel is the larger of its two component errors.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Sub};

use crate::complex::ComplexPoint;
use crate::error::{domain, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

pub const DEFAULT_MAX_SUBDIVISIONS: usize = 1 << 14;

/// Values the integrator can accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    const ZERO: Self;
    /// Largest component magnitude.
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    const ZERO: f64 = 0.0;
    #[inline]
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for ComplexPoint {
    const ZERO: ComplexPoint = ComplexPoint::ZERO;
    #[inline]
    fn magnitude(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// Algebraic exponents of the integrand at the endpoints: `left = alpha`
/// means the integrand behaves like `(x - a)^alpha` near `a`, `right = beta`
/// like `(b - x)^beta` near `b`. Exponents must exceed `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EndpointHint {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl EndpointHint {
    pub fn both(alpha: f64, beta: f64) -> Self {
        EndpointHint {
            left: Some(alpha),
            right: Some(beta),
        }
    }

    pub fn left(alpha: f64) -> Self {
        EndpointHint {
            left: Some(alpha),
            right: None,
        }
    }

    pub fn right(beta: f64) -> Self {
        EndpointHint {
            left: None,
            right: Some(beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Integrator {
    pub fn new(abs_tol: f64) -> Self {
        Integrator {
            abs_tol,
            rel_tol: 0.0,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    /// Accept when the error estimate is below `max(abs_tol, rel_tol * |value|)`.
    pub fn with_relative(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn accepts(&self, error: f64, magnitude: f64) -> bool {
        error <= self.abs_tol.max(self.rel_tol * magnitude)
    }

    pub fn integrate<V, F>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        hint: Option<EndpointHint>,
    ) -> Result<QuadratureResult<V>>
    where
        V: QuadValue,
        F: FnMut(f64) -> V,
    {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(domain(
                "integration bounds must be finite with a < b",
                b - a,
            ));
        }
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) || self.abs_tol.is_nan() {
            return Err(domain("tolerance must be positive", self.abs_tol));
        }
        let pieces = split_pieces(a, b, hint.unwrap_or_default())?;

        let mut eval = |piece: &Piece, s: f64| -> V {
            let (x, jac) = piece.map(s);
            f(x) * jac
        };

        let mut heap = BinaryHeap::new();
        let mut frozen: Vec<Panel<V>> = Vec::new();
        let mut total_error = 0.0;
        let mut total_value = V::ZERO;
        for (index, piece) in pieces.iter().enumerate() {
            let panel = kronrod_panel(|s| eval(piece, s), index, 0.0, 1.0);
            total_error += panel.error;
            total_value = total_value + panel.value;
            heap.push(panel);
        }
        let mut subdivisions = pieces.len();

        loop {
            if self.accepts(total_error, total_value.magnitude()) {
                // resum exactly before trusting the incremental totals
                let (v, e) = resum(heap.iter().chain(frozen.iter()));
                total_value = v;
                total_error = e;
                if self.accepts(total_error, total_value.magnitude()) {
                    return Ok(QuadratureResult {
                        value: total_value,
                        error_estimate: total_error,
                        subdivisions,
                        converged: true,
                    });
                }
            }
            if subdivisions >= self.max_subdivisions {
                break;
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.lo + worst.hi);
            if !(mid > worst.lo && mid < worst.hi) {
                frozen.push(worst);
                continue;
            }
            let piece = &pieces[worst.piece];
            let left = kronrod_panel(|s| eval(piece, s), worst.piece, worst.lo, mid);
            let right = kronrod_panel(|s| eval(piece, s), worst.piece, mid, worst.hi);
            total_error += left.error + right.error - worst.error;
            total_value = total_value + left.value + right.value - worst.value;
            heap.push(left);
            heap.push(right);
            subdivisions += 1;
        }

        let (value, error_estimate) = resum(heap.iter().chain(frozen.iter()));
        Ok(QuadratureResult {
            value,
            error_estimate,
            subdivisions,
            converged: self.accepts(error_estimate, value.magnitude()),
        })
    }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<V, F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    hint: Option<EndpointHint>,
) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    Integrator::new(tol).integrate(f, a, b, hint)
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Linear { a: f64, len: f64 },
    // x = a + len * s^m
    FromLeft { a: f64, len: f64, m: f64 },
    // x = b - len * s^m
    FromRight { b: f64, len: f64, m: f64 },
}

impl Piece {
    #[inline]
    fn map(&self, s: f64) -> (f64, f64) {
        match *self {
            Piece::Linear { a, len } => (a + len * s, len),
            Piece::FromLeft { a, len, m } => {
                let sm1 = libm::pow(s, m - 1.0);
                (a + len * sm1 * s, len * m * sm1)
            }
            Piece::FromRight { b, len, m } => {
                let sm1 = libm::pow(s, m - 1.0);
                (b - len * sm1 * s, len * m * sm1)
            }
        }
    }
}

fn grading(exponent: f64) -> Result<f64> {
    if !(exponent > -1.0) || !exponent.is_finite() {
        return Err(domain(
            "endpoint exponent must be finite and > -1",
            exponent,
        ));
    }
    Ok((2.0 / (1.0 + exponent)).max(1.0))
}

fn split_pieces(a: f64, b: f64, hint: EndpointHint) -> Result<Vec<Piece>> {
    let left = hint.left.map(grading).transpose()?.filter(|&m| m > 1.0);
    let right = hint.right.map(grading).transpose()?.filter(|&m| m > 1.0);
    let mut pieces = Vec::with_capacity(2);
    match (left, right) {
        (None, None) => pieces.push(Piece::Linear { a, len: b - a }),
        (Some(m), None) => pieces.push(Piece::FromLeft { a, len: b - a, m }),
        (None, Some(m)) => pieces.push(Piece::FromRight { b, len: b - a, m }),
        (Some(ml), Some(mr)) => {
            let c = 0.5 * (a + b);
            pieces.push(Piece::FromLeft {
                a,
                len: c - a,
                m: ml,
            });
            pieces.push(Piece::FromRight {
                b,
                len: b - c,
                m: mr,
            });
        }
    }
    Ok(pieces)
}

#[derive(Debug, Clone, Copy)]
struct Panel<V> {
    piece: usize,
    lo: f64,
    hi: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<V> Eq for Panel<V> {}

impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            // deterministic tie-break: leftmost first
            .then_with(|| other.piece.cmp(&self.piece))
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod_panel<V: QuadValue>(
    mut g: impl FnMut(f64) -> V,
    piece: usize,
    lo: f64,
    hi: f64,
) -> Panel<V> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = g(center - dx) + g(center + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Panel {
        piece,
        lo,
        hi,
        value,
        error: if error.is_nan() { f64::INFINITY } else { error },
    }
}

// Neumaier-compensated sums of panel values and errors.
fn resum<'a, V: QuadValue + 'a>(panels: impl Iterator<Item = &'a Panel<V>>) -> (V, f64) {
    let mut sum = V::ZERO;
    let mut comp = V::ZERO;
    let mut err = 0.0;
    for p in panels {
        let t = sum + p.value;
        let big = if sum.magnitude() >= p.value.magnitude() {
            (sum - t) + p.value
        } else {
            (p.value - t) + sum
        };
        comp = comp + big;
        sum = t;
        err += p.error;
    }
    (sum + comp, err)
}
