//! Extended-precision scalars: a precision context wrapping MPFR mantissa
//! sizes, and a complex number built from two [`rug::Float`]s.
//!
//! All solver arithmetic in this crate goes through these types so that the
//! working precision is an explicit, checkable parameter rather than an
//! accident of `f64`.

use rug::float::Constant;
use rug::{Float, Rational};
use std::fmt;

/// Completes a rug computation (incomplete value or owned Float) at the
/// given precision. Uniform sugar over `Float::with_val`.
pub trait CompleteAt {
    fn at(self, prec: u32) -> Float;
}

impl<T> CompleteAt for T
where
    Float: rug::ops::AssignRound<T, Round = rug::float::Round, Ordering = core::cmp::Ordering>,
{
    fn at(self, prec: u32) -> Float {
        Float::with_val(prec, self)
    }
}

/// Working precision for a computation, in mantissa bits (>= 53).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    bits: u32,
}

impl Default for PrecisionContext {
    /// 256 bits: enough for quantities down to ~e^{-80} squared with slack.
    fn default() -> Self {
        PrecisionContext { bits: 256 }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Self {
        PrecisionContext { bits: bits.max(53) }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn real(self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn real_u64(self, v: u64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn real_i64(self, v: i64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn zero(self) -> Float {
        Float::new(self.bits)
    }

    pub fn one(self) -> Float {
        Float::with_val(self.bits, 1)
    }

    pub fn pi(self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    pub fn two_pi(self) -> Float {
        let mut p = self.pi();
        p *= 2;
        p
    }

    /// Exact conversion of a rational number at this precision.
    pub fn from_rational(self, r: &Rational) -> Float {
        Float::with_val(self.bits, r)
    }

    /// 2^{-bits}: one unit of relative resolution.
    pub fn eps(self) -> Float {
        let mut e = self.one();
        e >>= self.bits;
        e
    }

    pub fn complex(self, re: f64, im: f64) -> CFloat {
        CFloat {
            re: self.real(re),
            im: self.real(im),
        }
    }

    /// e^{i·theta} for theta in radians.
    pub fn cis(self, theta: &Float) -> CFloat {
        let t = Float::with_val(self.bits, theta);
        let (sin, cos) = t.sin_cos(Float::new(self.bits));
        CFloat { re: cos, im: sin }
    }

    /// e^{2πi·turn} with the turn reduced into [0,1) exactly before any
    /// rounding happens; keeps root-of-unity cancellations at full precision.
    pub fn cis_turn(self, turn: &Rational) -> CFloat {
        let mut t = turn.clone();
        let floor = t.clone().floor();
        t -= floor;
        let theta = self.from_rational(&t) * self.two_pi();
        self.cis(&theta)
    }
}

/// Complex number in extended precision. Both parts always carry the same
/// mantissa size; binary operations produce results at the left operand's
/// precision.
#[derive(Clone, PartialEq)]
pub struct CFloat {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for CFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e}, {:e})", self.re.to_f64(), self.im.to_f64())
    }
}

impl CFloat {
    pub fn zero(prec: u32) -> Self {
        CFloat {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        CFloat {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let p = re.prec();
        CFloat {
            re,
            im: Float::new(p),
        }
    }

    pub fn from_f64s(prec: u32, re: f64, im: f64) -> Self {
        CFloat {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        CFloat {
            re: self.re.clone(),
            im: (-&self.im).at(self.im.prec()),
        }
    }

    pub fn neg(&self) -> Self {
        CFloat {
            re: (-&self.re).at(self.re.prec()),
            im: (-&self.im).at(self.im.prec()),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut s = (&self.re * &self.re).at(p);
        s += (&self.im * &self.im).at(p);
        s
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn add(&self, rhs: &CFloat) -> CFloat {
        let p = self.prec();
        CFloat {
            re: (&self.re + &rhs.re).at(p),
            im: (&self.im + &rhs.im).at(p),
        }
    }

    pub fn sub(&self, rhs: &CFloat) -> CFloat {
        let p = self.prec();
        CFloat {
            re: (&self.re - &rhs.re).at(p),
            im: (&self.im - &rhs.im).at(p),
        }
    }

    pub fn mul(&self, rhs: &CFloat) -> CFloat {
        let p = self.prec();
        let mut re = (&self.re * &rhs.re).at(p);
        re -= (&self.im * &rhs.im).at(p);
        let mut im = (&self.re * &rhs.im).at(p);
        im += (&self.im * &rhs.re).at(p);
        CFloat { re, im }
    }

    pub fn mul_real(&self, rhs: &Float) -> CFloat {
        let p = self.prec();
        CFloat {
            re: (&self.re * rhs).at(p),
            im: (&self.im * rhs).at(p),
        }
    }

    pub fn mul_f64(&self, rhs: f64) -> CFloat {
        let p = self.prec();
        CFloat {
            re: (&self.re * Float::with_val(p, rhs)).at(p),
            im: (&self.im * Float::with_val(p, rhs)).at(p),
        }
    }

    pub fn div(&self, rhs: &CFloat) -> CFloat {
        let d = rhs.norm_sqr();
        let num = self.mul(&rhs.conj());
        let p = self.prec();
        CFloat {
            re: (&num.re / &d).at(p),
            im: (&num.im / &d).at(p),
        }
    }

    pub fn div_real(&self, rhs: &Float) -> CFloat {
        let p = self.prec();
        CFloat {
            re: (&self.re / rhs).at(p),
            im: (&self.im / rhs).at(p),
        }
    }

    pub fn add_assign(&mut self, rhs: &CFloat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }

    pub fn sub_assign(&mut self, rhs: &CFloat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }

    /// self += a*b without allocating a full temporary pair.
    pub fn mul_add_assign(&mut self, a: &CFloat, b: &CFloat) {
        let p = self.prec();
        self.re += (&a.re * &b.re).at(p);
        self.re -= (&a.im * &b.im).at(p);
        self.im += (&a.re * &b.im).at(p);
        self.im += (&a.im * &b.re).at(p);
    }

    pub fn recip(&self) -> CFloat {
        CFloat::one(self.prec()).div(self)
    }

    pub fn powu(&self, mut e: u64) -> CFloat {
        let mut base = self.clone();
        let mut acc = CFloat::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// |self - rhs|, for test tolerances.
    pub fn dist(&self, rhs: &CFloat) -> Float {
        self.sub(rhs).abs()
    }
}

/// Sum of floats at the precision of the context, avoiding intermediate
/// rounding at lower precision.
pub fn float_sum<'a>(ctx: PrecisionContext, it: impl Iterator<Item = &'a Float>) -> Float {
    let mut acc = ctx.zero();
    for f in it {
        acc += f;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cis_turn_quarter_is_i() {
        let ctx = PrecisionContext::new(128);
        let z = ctx.cis_turn(&Rational::from((1, 4)));
        assert!(z.re.clone().abs() < ctx.eps() * 16u32);
        assert!((z.im.clone() - 1f64).abs() < ctx.eps() * 16u32);
    }

    #[test]
    fn complex_field_ops() {
        let ctx = PrecisionContext::new(128);
        let a = ctx.complex(1.5, -2.0);
        let b = ctx.complex(-0.25, 3.0);
        let prod = a.mul(&b);
        // (1.5 - 2i)(-0.25 + 3i) = -0.375 + 6 + (0.5 + 4.5)i
        assert!((prod.re.to_f64() - 5.625).abs() < 1e-30);
        assert!((prod.im.to_f64() - 5.0).abs() < 1e-30);
        let back = prod.div(&b);
        assert!(back.dist(&a) < ctx.eps() * 64u32);
    }

    #[test]
    fn powu_matches_repeated_mul() {
        let ctx = PrecisionContext::new(96);
        let z = ctx.complex(0.3, 0.7);
        let mut w = CFloat::one(96);
        for _ in 0..13 {
            w = w.mul(&z);
        }
        assert!(z.powu(13).dist(&w) < ctx.eps() * 128u32);
    }
}
