//! Exact complex rational arithmetic.
//!
//! All filter coefficients live in the Gaussian rationals Q(i). Quantities
//! proportional to sqrt(m) (m = |det M|) carry the square root symbolically
//! in [`Scaled`] so that nothing is ever rounded.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Exact power with a signed integer exponent. `0^0 = 1`.
pub fn rat_pow(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Parse "p/q", an integer, or a finite decimal ("-0.25") into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let num: Int = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den: Int = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') {
            -1i64
        } else {
            1
        };
        let ip: Int = if int_part.is_empty() || int_part == "-" {
            Int::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        let digits = frac_part.trim();
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let den = Int::from(10u32).pow(digits.len() as u32);
        let num: Int = if digits.is_empty() {
            Int::zero()
        } else {
            digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        let frac = Rat::new(num, den);
        let whole = Rat::from_integer(ip);
        return Ok(if sign < 0 { whole - frac } else { whole + frac });
    }
    let n: Int = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rat::from_integer(n))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        GaussRat {
            re,
            im: Rat::zero(),
        }
    }

    pub fn imaginary(im: Rat) -> Self {
        GaussRat {
            re: Rat::zero(),
            im,
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::real(rat_i64(n))
    }

    pub fn zero() -> Self {
        Self::real(Rat::zero())
    }

    pub fn one() -> Self {
        Self::real(Rat::one())
    }

    pub fn i() -> Self {
        Self::imaginary(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat {
            re: &self.re / &norm,
            im: -&self.im / &norm,
        })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        GaussRat {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", format_rat(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}{}i", format_rat(&self.re), format_rat(&self.im))
        } else {
            write!(f, "{}+{}i", format_rat(&self.re), format_rat(&self.im))
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op_re:expr) => {
        impl $trait<&GaussRat> for &GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: &GaussRat) -> GaussRat {
                $op_re(self, rhs)
            }
        }
        impl $trait<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: GaussRat) -> GaussRat {
                $op_re(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &GaussRat, b: &GaussRat| GaussRat {
    re: &a.re + &b.re,
    im: &a.im + &b.im,
});
forward_binop!(Sub, sub, |a: &GaussRat, b: &GaussRat| GaussRat {
    re: &a.re - &b.re,
    im: &a.im - &b.im,
});
forward_binop!(Mul, mul, |a: &GaussRat, b: &GaussRat| GaussRat {
    re: &a.re * &b.re - &a.im * &b.im,
    im: &a.re * &b.im + &a.im * &b.re,
});

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, rhs: &GaussRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, rhs: &GaussRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, rhs: &GaussRat) {
        *self = &*self * rhs;
    }
}

fn integer_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    for c in r.saturating_sub(2)..=r + 2 {
        if c * c == n {
            return Some(c);
        }
    }
    None
}

/// An exact value `v * sqrt(root)`. `root = None` means the value is plain
/// rational; `Some(b)` keeps an irrational factor sqrt(b) symbolic (b is
/// never a perfect square in canonical form).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scaled {
    pub v: GaussRat,
    pub root: Option<u64>,
}

impl Scaled {
    pub fn rational(v: GaussRat) -> Self {
        Scaled { v, root: None }
    }

    pub fn zero() -> Self {
        Scaled::rational(GaussRat::zero())
    }

    pub fn one() -> Self {
        Scaled::rational(GaussRat::one())
    }

    /// `v * sqrt(base)`, folding perfect squares into the mantissa.
    pub fn with_root(v: GaussRat, base: u64) -> Self {
        assert!(base >= 1);
        if v.is_zero() || base == 1 {
            return Scaled::rational(v);
        }
        if let Some(s) = integer_sqrt(base) {
            return Scaled::rational(v.scale(&rat_i64(s as i64)));
        }
        Scaled {
            v,
            root: Some(base),
        }
    }

    /// sqrt(base)^pow for a signed integer power.
    pub fn sqrt_pow(base: u64, pow: i32) -> Self {
        let whole = pow.div_euclid(2);
        let half = pow.rem_euclid(2);
        let b = Rat::from_integer(Int::from(base));
        let mantissa = if whole >= 0 {
            rat_pow(&b, whole as u32)
        } else {
            Rat::one() / rat_pow(&b, (-whole) as u32)
        };
        if half == 0 {
            Scaled::rational(GaussRat::real(mantissa))
        } else {
            Scaled::with_root(GaussRat::real(mantissa), base)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn mul(&self, other: &Scaled) -> Scaled {
        let v = &self.v * &other.v;
        match (self.root, other.root) {
            (None, None) => Scaled::rational(v),
            (Some(b), None) | (None, Some(b)) => Scaled::with_root(v, b),
            (Some(a), Some(b)) => {
                if a == b {
                    Scaled::rational(v.scale(&rat_i64(a as i64)))
                } else {
                    // sqrt(a)*sqrt(b) = sqrt(ab); folds if ab is a square
                    Scaled::with_root(v, a * b)
                }
            }
        }
    }

    pub fn add(&self, other: &Scaled) -> Result<Scaled> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.root != other.root {
            return Err(Error::ScaleMismatch);
        }
        Ok(Scaled {
            v: &self.v + &other.v,
            root: self.root,
        })
    }

    pub fn sub(&self, other: &Scaled) -> Result<Scaled> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scaled {
        Scaled {
            v: -&self.v,
            root: self.root,
        }
    }

    pub fn conj(&self) -> Scaled {
        Scaled {
            v: self.v.conj(),
            root: self.root,
        }
    }

    /// Exact ratio self/other; may pick up a 1/sqrt(b) = sqrt(b)/b factor.
    pub fn div(&self, other: &Scaled) -> Option<Scaled> {
        if other.is_zero() {
            return None;
        }
        let inv = Scaled {
            v: other.v.inv()?,
            root: None,
        };
        let base = match (self.root, other.root) {
            (a, None) => return Some(Scaled { v: (&self.v * &inv.v), root: a }),
            (None, Some(b)) => {
                // 1/sqrt(b) = sqrt(b)/b
                let v = (&self.v * &inv.v).scale(&(Rat::one() / rat_i64(b as i64)));
                return Some(Scaled::with_root(v, b));
            }
            (Some(a), Some(b)) if a == b => {
                return Some(Scaled::rational(&self.v * &inv.v));
            }
            (Some(a), Some(b)) => (a, b),
        };
        // sqrt(a)/sqrt(b) = sqrt(ab)/b
        let (a, b) = base;
        let v = (&self.v * &inv.v).scale(&(Rat::one() / rat_i64(b as i64)));
        Some(Scaled::with_root(v, a * b))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let (re, im) = self.v.to_f64_pair();
        let f = self.root.map(|b| (b as f64).sqrt()).unwrap_or(1.0);
        (re * f, im * f)
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            None => write!(f, "{}", self.v),
            Some(b) => write!(f, "({})*sqrt({})", self.v, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-7").unwrap(), rat_i64(-7));
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(format_rat(&rat(3, 4)), "3/4");
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn gaussian_field_ops() {
        let a = GaussRat::new(rat(1, 2), rat(3, 1));
        let b = GaussRat::new(rat(-2, 1), rat(1, 4));
        let prod = &a * &b;
        // (1/2 + 3i)(-2 + i/4) = -1 + i/8 - 6i + 3i^2/4 = -7/4 - 47i/8
        assert_eq!(prod.re, rat(-7, 4));
        assert_eq!(prod.im, rat(-47, 8));
        let q = prod.div(&b).unwrap();
        assert_eq!(q, a);
    }

    #[test]
    fn scaled_roots_fold() {
        // sqrt(4) folds to 2
        let s = Scaled::with_root(GaussRat::one(), 4);
        assert_eq!(s, Scaled::rational(GaussRat::from_i64(2)));
        // sqrt(3)*sqrt(3) = 3
        let r3 = Scaled::with_root(GaussRat::one(), 3);
        assert_eq!(r3.mul(&r3), Scaled::rational(GaussRat::from_i64(3)));
        // sqrt(3)^-1 = sqrt(3)/3
        let inv = Scaled::one().div(&r3).unwrap();
        assert_eq!(inv, Scaled::with_root(GaussRat::real(rat(1, 3)), 3));
        assert_eq!(Scaled::sqrt_pow(3, -2), Scaled::rational(GaussRat::real(rat(1, 3))));
        assert!(r3.add(&Scaled::one()).is_err());
    }
}
