//! Exact arithmetic in the field ℚ(√2)(i).
//!
//! Every amplitude that appears in the source derivation and in the
//! communication protocol is a Gaussian rational times a power of 1/√2, so
//! `Surd` (a + b√2 with rational a, b) and `ExactComplex` (re + i·im over
//! `Surd`) cover the whole pipeline without rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A real number `rat + irr·√2` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub rat: BigRational,
    pub irr: BigRational,
}

impl Surd {
    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        Surd { rat, irr }
    }

    pub fn zero() -> Self {
        Surd::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Surd::from_rational(BigRational::one())
    }

    pub fn from_rational(rat: BigRational) -> Self {
        Surd {
            rat,
            irr: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Surd::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn sqrt2() -> Self {
        Surd {
            rat: BigRational::zero(),
            irr: BigRational::one(),
        }
    }

    /// 1/√2 = √2/2.
    pub fn inv_sqrt2() -> Self {
        Surd {
            rat: BigRational::zero(),
            irr: BigRational::new(BigInt::from(1), BigInt::from(2)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    /// The rational value, if the √2 part vanishes.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.irr.is_zero().then(|| self.rat.clone())
    }

    /// Galois conjugate a − b√2.
    pub fn conjugate(&self) -> Self {
        Surd {
            rat: self.rat.clone(),
            irr: -self.irr.clone(),
        }
    }

    /// Field norm a² − 2b², a rational that is zero only for zero.
    fn field_norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(BigInt::from(2)) * &self.irr * &self.irr
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.field_norm();
        let c = self.conjugate();
        Some(Surd {
            rat: c.rat / &n,
            irr: c.irr / n,
        })
    }

    pub fn div(&self, other: &Surd) -> Option<Self> {
        other.recip().map(|r| self * &r)
    }

    pub fn signum(&self) -> i32 {
        // sign of a + b√2 via comparing a² and 2b² when the parts disagree
        let a = self.rat.signum();
        let b = self.irr.signum();
        let sa = if a.is_positive() { 1 } else if a.is_negative() { -1 } else { 0 };
        let sb = if b.is_positive() { 1 } else if b.is_negative() { -1 } else { 0 };
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        let a2 = &self.rat * &self.rat;
        let b2 = BigRational::from_integer(BigInt::from(2)) * &self.irr * &self.irr;
        if a2 > b2 {
            sa
        } else if a2 < b2 {
            sb
        } else {
            0
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        let b = self.irr.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.irr.is_zero()) {
            (_, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{}*sqrt2", self.irr),
            (false, false) => write!(f, "{} + {}*sqrt2", self.rat, self.irr),
        }
    }
}

impl<'a> Add<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        Surd {
            rat: &self.rat + &rhs.rat,
            irr: &self.irr + &rhs.irr,
        }
    }
}

impl<'a> Sub<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        Surd {
            rat: &self.rat - &rhs.rat,
            irr: &self.irr - &rhs.irr,
        }
    }
}

impl<'a> Mul<&'a Surd> for &'a Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let two = BigRational::from_integer(BigInt::from(2));
        Surd {
            rat: &self.rat * &rhs.rat + two * &self.irr * &rhs.irr,
            irr: &self.rat * &rhs.irr + &self.irr * &rhs.rat,
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            rat: -self.rat,
            irr: -self.irr,
        }
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        &self + &rhs
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        &self * &rhs
    }
}

/// A complex number with `Surd` real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: Surd,
    pub im: Surd,
}

impl ExactComplex {
    pub fn new(re: Surd, im: Surd) -> Self {
        ExactComplex { re, im }
    }

    pub fn zero() -> Self {
        ExactComplex::new(Surd::zero(), Surd::zero())
    }

    pub fn one() -> Self {
        ExactComplex::new(Surd::one(), Surd::zero())
    }

    pub fn i() -> Self {
        ExactComplex::new(Surd::zero(), Surd::one())
    }

    pub fn real(re: Surd) -> Self {
        ExactComplex::new(re, Surd::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExactComplex::real(Surd::from_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactComplex::new(self.re.clone(), -self.im.clone())
    }

    /// |z|² as an exact real.
    pub fn norm_sqr(&self) -> Surd {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn scale(&self, s: &Surd) -> Self {
        ExactComplex::new(&self.re * s, &self.im * s)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "i*({})", self.im)
        } else {
            write!(f, "({}) + i*({})", self.re, self.im)
        }
    }
}

impl<'a> Add<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl Add for ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: ExactComplex) -> ExactComplex {
        &self + &rhs
    }
}

impl Mul for ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: ExactComplex) -> ExactComplex {
        &self * &rhs
    }
}

impl Neg for ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re, -self.im)
    }
}

/// Shorthand for a `BigRational` from small integers.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Splits a rational into (numerator, denominator) as `i64` when both fit.
pub fn ratio_parts(r: &BigRational) -> Option<(i64, i64)> {
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}
