//! Exact complex-rational amplitudes.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `re + i·im` with exact rational parts.
pub type ComplexRational = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn real(num: i64, den: i64) -> ComplexRational {
    Complex::new(rational(num, den), Rational::zero())
}

pub fn complex(re: Rational, im: Rational) -> ComplexRational {
    Complex::new(re, im)
}

pub fn one() -> ComplexRational {
    Complex::new(Rational::one(), Rational::zero())
}

pub fn imag_unit() -> ComplexRational {
    Complex::new(Rational::zero(), Rational::one())
}

pub fn is_zero(z: &ComplexRational) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// `|z|²`, exact.
pub fn modulus_sq(z: &ComplexRational) -> Rational {
    &z.re * &z.re + &z.im * &z.im
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &num * &num == *r.numer() && &den * &den == *r.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// `q^e` as a rational.
pub fn power_of(q: u32, e: u32) -> Rational {
    BigRational::from_integer(BigInt::from(q).pow(e))
}

/// Largest `e` with `r = q^e` exactly, if `r` is such a power.
pub fn log_exact(r: &Rational, q: u32) -> Option<u32> {
    if !r.denom().is_one() || !r.is_positive() {
        return None;
    }
    let q = BigInt::from(q);
    let mut n = r.numer().clone();
    let mut e = 0;
    while !n.is_one() {
        if (&n % &q).is_zero() {
            n /= &q;
            e += 1;
        } else {
            return None;
        }
    }
    Some(e)
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}
