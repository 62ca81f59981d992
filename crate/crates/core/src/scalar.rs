//! The two working precisions behind one trait.
//!
//! Detection runs at native `f64` ("fast"); every reported property is
//! re-evaluated in double-double arithmetic ("confirm", ~31 significant
//! decimal digits). `twofloat` provides the double-double add/sub/mul/div
//! and sqrt, but its trigonometric routines only reach f64 accuracy, so
//! sin/cos/acos are implemented here (Taylor series after range
//! reduction, Newton polish for acos). `Dd` is a newtype so the inexact
//! inherent trig methods of `TwoFloat` cannot be called by accident.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

/// Confirm-precision scalar: an unevaluated sum of two doubles.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct Dd(TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }
    pub fn lo(self) -> f64 {
        self.0.lo()
    }
    /// Rebuild from a stored component pair.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        Dd(TwoFloat::new_add(hi, lo))
    }
}

impl Debug for Dd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Dd({:e}, {:e})", self.0.hi(), self.0.lo())
    }
}

macro_rules! fwd_op {
    ($trait:ident, $fn:ident) => {
        impl $trait for Dd {
            type Output = Dd;
            fn $fn(self, rhs: Dd) -> Dd {
                Dd(self.0.$fn(rhs.0))
            }
        }
    };
}

fwd_op!(Add, add);
fwd_op!(Sub, sub);
fwd_op!(Mul, mul);

// twofloat 0.8's TwoFloat/TwoFloat division drops an fma and only reaches
// f64 accuracy, which would poison every confirm-precision residual.
// Divide via a Newton-refined reciprocal built on the (accurate) add/mul.
impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let one = TwoFloat::from_f64(1.0);
        let y0 = TwoFloat::from_f64(rhs.0.hi().recip());
        let e = one - rhs.0 * y0;
        let y1 = y0 + y0 * e;
        let q = self.0 * y1;
        let r = self.0 - q * rhs.0;
        Dd(q + r * y1)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

/// Arithmetic required by the geometry kernel, implemented for `f64`
/// (fast precision) and [`Dd`] (confirm precision).
pub trait Scalar:
    Copy
    + Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Relative tolerance at which a residual counts as zero in this
    /// precision: 1e-10 fast, 1e-24 confirm.
    fn rel_eps() -> Self;

    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    fn is_finite(self) -> bool;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    /// Inverse cosine, domain clamped to [-1, 1].
    fn acos(self) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_i64(0)
    }
    fn one() -> Self {
        Self::from_i64(1)
    }
    fn two() -> Self {
        Self::from_i64(2)
    }
    fn half(self) -> Self {
        self / Self::two()
    }
    fn sq(self) -> Self {
        self * self
    }
    fn max_s(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }
    fn min_s(self, other: Self) -> Self {
        if self < other {
            self
        } else {
            other
        }
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn hypot_s(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }
    /// Degrees to radians.
    fn radians(self) -> Self {
        self * Self::pi() / Self::from_i64(180)
    }
}

impl Scalar for f64 {
    fn rel_eps() -> Self {
        1e-10
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn acos(self) -> Self {
        f64::acos(self.clamp(-1.0, 1.0))
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

impl Scalar for Dd {
    fn rel_eps() -> Self {
        Dd::from_f64(1e-24)
    }
    fn from_f64(v: f64) -> Self {
        Dd(TwoFloat::from_f64(v))
    }
    fn from_i64(v: i64) -> Self {
        Dd(TwoFloat::from_f64(v as f64))
    }
    fn to_f64(self) -> f64 {
        self.0.hi()
    }
    fn is_finite(self) -> bool {
        self.0.is_valid() && self.0.hi().is_finite()
    }
    fn abs(self) -> Self {
        Dd(self.0.abs())
    }
    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }
    fn sin(self) -> Self {
        dd_sin(self)
    }
    fn cos(self) -> Self {
        dd_cos(self)
    }
    fn acos(self) -> Self {
        dd_acos(self)
    }
    fn pi() -> Self {
        Dd(twofloat::consts::PI)
    }
}

/// Reduce to `t` with |t| <= pi/4 + ulp slack and a quadrant index,
/// such that x = t + q * pi/2 (mod 2*pi).
fn reduce(x: Dd) -> (Dd, i64) {
    let half_pi = Dd(twofloat::consts::FRAC_PI_2);
    let m = (x / half_pi).to_f64().round();
    let t = x - half_pi * Dd::from_f64(m);
    (t, (m as i64).rem_euclid(4))
}

/// cos on |t| <= pi/4 by Taylor series in double-double arithmetic.
fn cos_kernel(t: Dd) -> Dd {
    let t2 = t * t;
    let mut term = Dd::from_f64(1.0);
    let mut sum = term;
    let mut k = 0i64;
    loop {
        k += 1;
        term = -term * t2 / Dd::from_f64(((2 * k - 1) * 2 * k) as f64);
        sum = sum + term;
        if term.abs().to_f64() < 1e-35 || k > 25 {
            break;
        }
    }
    sum
}

/// sin on |t| <= pi/4 by Taylor series in double-double arithmetic.
fn sin_kernel(t: Dd) -> Dd {
    let t2 = t * t;
    let mut term = t;
    let mut sum = term;
    let mut k = 0i64;
    loop {
        k += 1;
        term = -term * t2 / Dd::from_f64((2 * k * (2 * k + 1)) as f64);
        sum = sum + term;
        if term.abs().to_f64() < 1e-35 || k > 25 {
            break;
        }
    }
    sum
}

fn dd_cos(x: Dd) -> Dd {
    let (t, q) = reduce(x);
    match q {
        0 => cos_kernel(t),
        1 => -sin_kernel(t),
        2 => -cos_kernel(t),
        _ => sin_kernel(t),
    }
}

fn dd_sin(x: Dd) -> Dd {
    let (t, q) = reduce(x);
    match q {
        0 => sin_kernel(t),
        1 => cos_kernel(t),
        2 => -sin_kernel(t),
        _ => -cos_kernel(t),
    }
}

/// asin for |u| <= ~0.71: f64 seed plus Newton on sin(phi) = u, which is
/// well conditioned there (cos(phi) bounded away from 0).
fn dd_asin_small(u: Dd) -> Dd {
    let mut phi = Dd::from_f64(u.to_f64().clamp(-1.0, 1.0).asin());
    for _ in 0..2 {
        phi = phi - (dd_sin(phi) - u) / dd_cos(phi);
    }
    phi
}

fn dd_acos(x: Dd) -> Dd {
    let one = Dd::from_f64(1.0);
    let half = Dd::from_f64(0.5);
    let xc = if x > one {
        one
    } else if x < -one {
        -one
    } else {
        x
    };
    // Near the endpoints cos(theta) = x has a (near-)double root; the
    // half-angle form keeps the Newton iteration on a simple root.
    if xc > half {
        let u = ((one - xc) * half).sqrt();
        dd_asin_small(u) * Dd::from_f64(2.0)
    } else if xc < -half {
        let u = ((one + xc) * half).sqrt();
        Dd(twofloat::consts::PI) - dd_asin_small(u) * Dd::from_f64(2.0)
    } else {
        let mut theta = Dd::from_f64(xc.to_f64().acos());
        for _ in 0..2 {
            theta = theta + (dd_cos(theta) - xc) / dd_sin(theta);
        }
        theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(v: f64) -> Dd {
        Dd::from_f64(v)
    }

    #[test]
    fn dd_trig_is_confirm_accurate() {
        // cos(pi/3) = 1/2 exactly.
        let x = Dd::pi() / dd(3.0);
        let err = (x.cos() - dd(0.5)).abs();
        assert!(err.to_f64() < 1e-30, "cos err {:e}", err.to_f64());
        // sin(pi/6) = 1/2.
        let y = Dd::pi() / dd(6.0);
        let err = (y.sin() - dd(0.5)).abs();
        assert!(err.to_f64() < 1e-30, "sin err {:e}", err.to_f64());
        // Pythagorean identity at an awkward argument.
        let z = dd(1.234567890123456789);
        let id = (z.sin().sq() + z.cos().sq() - dd(1.0)).abs();
        assert!(id.to_f64() < 1e-30, "identity err {:e}", id.to_f64());
    }

    #[test]
    fn dd_acos_round_trips() {
        for &v in &[-0.999, -0.5, -0.1, 0.0, 0.3, 0.7071067811865476, 0.999] {
            let x = dd(v);
            let err = (x.acos().cos() - x).abs();
            assert!(err.to_f64() < 1e-30, "acos({v}) err {:e}", err.to_f64());
        }
    }

    #[test]
    fn dd_acos_endpoints() {
        assert!(dd(1.0).acos().abs().to_f64() < 1e-30);
        assert!((dd(-1.0).acos() - Dd::pi()).abs().to_f64() < 1e-30);
        // Out-of-range inputs clamp instead of going NaN.
        assert!(dd(1.0 + 1e-12).acos().is_finite());
    }

    #[test]
    fn parts_round_trip() {
        let x = Dd::pi() / dd(7.0);
        let y = Dd::from_parts(x.hi(), x.lo());
        assert_eq!(x, y);
    }

    #[test]
    fn rel_eps_ordering() {
        assert!(Dd::rel_eps().to_f64() < <f64 as Scalar>::rel_eps());
    }
}
