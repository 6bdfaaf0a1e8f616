//! Exact scalars: big rationals and Gaussian rationals over them.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let r = Rational::from_str(s).ok()?;
    Some(r)
}

/// `re + im·i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

pub type Gq = GaussianRational;

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::real(int(v))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::real(rat(p, q))
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return Err(Error::DegenerateScalar("inverse of zero"));
        }
        Ok(Self::new(&self.re / &d, -(&self.im / &d)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self)
    }

    pub fn powi(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inv()?.pow((-k) as u32))
        }
    }

    /// Bit size of the largest numerator or denominator; a coarse measure of growth.
    pub fn height(&self) -> u64 {
        [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()]
            .iter()
            .map(|b| b.bits())
            .max()
            .unwrap_or(0)
    }
}

/// Decimal rendering rounded to `digits` places, for presentation only.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (r * Rational::from_integer(scale)).round().to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = if s.len() <= digits { format!("{}{s}", "0".repeat(digits + 1 - s.len())) } else { s };
    let (int_part, frac) = s.split_at(s.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 { format!("{sign}{int_part}") } else { format!("{sign}{int_part}.{frac}") }
}

impl GaussianRational {
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.im.is_zero() {
            return to_decimal(&self.re, digits);
        }
        let im = to_decimal(&self.im, digits);
        let im = if im.starts_with('-') { im } else { format!("+{im}") };
        format!("{}{im}i", to_decimal(&self.re, digits))
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_i64(v)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn add_ref(a: &Gq, b: &Gq) -> Gq {
    Gq::new(&a.re + &b.re, &a.im + &b.im)
}

fn sub_ref(a: &Gq, b: &Gq) -> Gq {
    Gq::new(&a.re - &b.re, &a.im - &b.im)
}

fn mul_ref(a: &Gq, b: &Gq) -> Gq {
    if a.im.is_zero() && b.im.is_zero() {
        return Gq::real(&a.re * &b.re);
    }
    Gq::new(&a.re * &b.re - &a.im * &b.im, &a.re * &b.im + &a.im * &b.re)
}

macro_rules! forward_binop {
    ($Tr:ident, $m:ident, $f:ident) => {
        impl $Tr<&Gq> for &Gq {
            type Output = Gq;
            fn $m(self, rhs: &Gq) -> Gq {
                $f(self, rhs)
            }
        }
        impl $Tr<Gq> for &Gq {
            type Output = Gq;
            fn $m(self, rhs: Gq) -> Gq {
                $f(self, &rhs)
            }
        }
        impl $Tr<&Gq> for Gq {
            type Output = Gq;
            fn $m(self, rhs: &Gq) -> Gq {
                $f(&self, rhs)
            }
        }
        impl $Tr<Gq> for Gq {
            type Output = Gq;
            fn $m(self, rhs: Gq) -> Gq {
                $f(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, rhs: &Gq) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl AddAssign for Gq {
    fn add_assign(&mut self, rhs: Gq) {
        *self += &rhs;
    }
}

impl SubAssign<&Gq> for Gq {
    fn sub_assign(&mut self, rhs: &Gq) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Gq> for Gq {
    fn mul_assign(&mut self, rhs: &Gq) {
        *self = mul_ref(self, rhs);
    }
}

impl Sum for Gq {
    fn sum<I: Iterator<Item = Gq>>(iter: I) -> Gq {
        iter.fold(Gq::zero(), |a, b| a + b)
    }
}

impl Product for Gq {
    fn product<I: Iterator<Item = Gq>>(iter: I) -> Gq {
        iter.fold(Gq::one(), |a, b| a * b)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*i", self.re, sign, self.im.abs())
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/q+r/s*i`, `r/s*i`, `i`, `-i`, with optional spaces.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            col: 0,
            msg: format!("{msg}: {s:?}"),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad("empty scalar"));
        }
        let Some(body) = t.strip_suffix('i') else {
            return parse_rational(&t).map(Gq::real).ok_or_else(|| bad("bad rational"));
        };
        let body = body.strip_suffix('*').unwrap_or(body);
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last()
            .unwrap_or(0);
        let (re_s, im_s) = body.split_at(split);
        let re = if re_s.is_empty() {
            Rational::zero()
        } else {
            parse_rational(re_s).ok_or_else(|| bad("bad real part"))?
        };
        let im = match im_s {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            _ => parse_rational(im_s.strip_prefix('+').unwrap_or(im_s))
                .ok_or_else(|| bad("bad imaginary part"))?,
        };
        Ok(Gq::new(re, im))
    }
}

/// Rising factorial `(x)_k = x(x+1)...(x+k-1)`.
pub fn pochhammer(x: &Rational, k: usize) -> Rational {
    (0..k).fold(Rational::one(), |acc, j| acc * (x + int(j as i64)))
}

pub fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// `prod_{j=lo}^{hi} f(j)`, extended to `hi < lo - 1` as `1 / prod_{j=hi+1}^{lo-1} f(j)`.
pub fn extended_product(lo: i64, hi: i64, f: impl Fn(i64) -> Rational) -> Result<Rational> {
    if hi >= lo - 1 {
        return Ok((lo..=hi).map(f).fold(Rational::one(), |a, b| a * b));
    }
    let d: Rational = (hi + 1..lo).map(f).fold(Rational::one(), |a, b| a * b);
    if d.is_zero() {
        return Err(Error::DegenerateScalar("vanishing factor in reciprocal product"));
    }
    Ok(d.recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Gq {
        s.parse().unwrap()
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(-1, 3), 6), "-0.333333");
        assert_eq!(to_decimal(&rat(2, 3), 3), "0.667");
        assert_eq!(to_decimal(&rat(-1, 3000), 2), "0.00");
        assert_eq!(to_decimal(&int(12), 0), "12");
        assert_eq!(g("1/2-1/4*i").to_decimal(2), "0.50-0.25i");
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "3", "-7/2", "1/2+3/4*i", "1/2-3/4*i", "0+1*i", "-5-1/3*i"] {
            assert_eq!(g(s).to_string().parse::<Gq>().unwrap(), g(s));
        }
        assert_eq!(g("i"), Gq::i());
        assert_eq!(g("-i"), -Gq::i());
        assert_eq!(g("1+i"), Gq::new(int(1), int(1)));
        assert_eq!(g("2/3*i"), Gq::new(int(0), rat(2, 3)));
        assert_eq!(g("1/2+3/4*i").to_string(), "1/2+3/4*i");
        assert!("1/0".parse::<Gq>().is_err());
        assert!("abc".parse::<Gq>().is_err());
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert!(matches!(Gq::zero().inv(), Err(Error::DegenerateScalar(_))));
    }

    #[test]
    fn i_squared() {
        assert_eq!(Gq::i() * Gq::i(), -Gq::one());
        let z = g("1+2*i");
        assert_eq!(&z * &z.inv().unwrap(), Gq::one());
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&int(3), 0), int(1));
        assert_eq!(pochhammer(&int(3), 3), int(60));
        assert_eq!(pochhammer(&rat(1, 2), 2), rat(3, 4));
        assert_eq!(pochhammer(&int(-2), 3), int(0));
    }

    #[test]
    fn extended_product_reads_reversed_ranges_as_reciprocals() {
        let f = |j: i64| int(j);
        assert_eq!(extended_product(2, 4, f).unwrap(), int(24));
        assert_eq!(extended_product(2, 1, f).unwrap(), int(1));
        assert_eq!(extended_product(5, 2, f).unwrap(), rat(1, 12));
        assert!(extended_product(1, -2, f).is_err());
    }
}
