//! Exact scalars in the quadratic field Q(√2).
//!
//! Every classical construction in this crate is closed over rationals. The
//! one irrational family that matters in practice (rotations by multiples of
//! π/8, whose squared moduli are `1/2 ± √2/4`) lives in Q(√2), so the field is
//! extended just far enough to keep those computations exact as well.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Error;

/// `rat + surd·√2`, both parts exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    rat: BigRational,
    surd: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { rat: BigRational::zero(), surd: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(rat: BigRational) -> Self {
        Scalar { rat, surd: BigRational::zero() }
    }

    pub fn with_surd(rat: BigRational, surd: BigRational) -> Self {
        Scalar { rat, surd }
    }

    pub fn sqrt2() -> Self {
        Scalar { rat: BigRational::zero(), surd: BigRational::one() }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rat.is_one() && self.surd.is_zero()
    }

    /// Exact sign of `rat + surd·√2`.
    pub fn signum(&self) -> Ordering {
        let a = sign_of(&self.rat);
        let b = sign_of(&self.surd);
        if b == Ordering::Equal || a == b {
            return if a == Ordering::Equal { b } else { a };
        }
        if a == Ordering::Equal {
            return b;
        }
        // Opposite signs: compare a² against 2b².
        let a2 = &self.rat * &self.rat;
        let b2 = &self.surd * &self.surd * BigRational::from_integer(BigInt::from(2));
        if a2 > b2 {
            a
        } else {
            b
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// True when `0 <= self <= 1`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Scalar::one()
    }

    /// True when `0 < self < 1`.
    pub fn is_strictly_interior(&self) -> bool {
        self.is_positive() && *self < Scalar::one()
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        if self.surd.is_zero() {
            return Some(Scalar::from_rational(self.rat.recip()));
        }
        // 1/(a+b√2) = (a-b√2)/(a²-2b²); the norm is nonzero since √2 is irrational.
        let two = BigRational::from_integer(BigInt::from(2));
        let norm = &self.rat * &self.rat - &self.surd * &self.surd * two;
        Some(Scalar { rat: &self.rat / &norm, surd: -&self.surd / &norm })
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.surd.is_zero() {
            r
        } else {
            r + self.surd.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
        }
    }

    /// Exact rational value of a finite float.
    pub fn from_f64_exact(v: f64) -> Option<Scalar> {
        BigRational::from_float(v).map(Scalar::from_rational)
    }
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.surd.is_zero() && other.surd.is_zero() {
            return self.rat.cmp(&other.rat);
        }
        (self - other).signum()
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::from_rational(v)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar { rat: &self.rat + &rhs.rat, surd: &self.surd + &rhs.surd }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar { rat: &self.rat - &rhs.rat, surd: &self.surd - &rhs.surd }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        if self.surd.is_zero() && rhs.surd.is_zero() {
            return Scalar::from_rational(&self.rat * &rhs.rat);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        Scalar { rat: &self.rat * &rhs.rat + &self.surd * &rhs.surd * two, surd: &self.rat * &rhs.surd + &self.surd * &rhs.rat }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero, like the rational types underneath.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &'a Scalar) -> Scalar {
        let inv = rhs.recip().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { rat: -&self.rat, surd: -&self.surd }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { rat: -self.rat, surd: -self.surd }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &'a Scalar) -> Scalar {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl<'a> AddAssign<&'a Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &'a Scalar) {
        self.rat += &rhs.rat;
        if !rhs.surd.is_zero() {
            self.surd += &rhs.surd;
        }
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl<'a> SubAssign<&'a Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &'a Scalar) {
        self.rat -= &rhs.rat;
        if !rhs.surd.is_zero() {
            self.surd -= &rhs.surd;
        }
    }
}

impl SubAssign<Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// `n/d` for rationals, `a+b*sqrt(2)` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return f.write_str(&fmt_rational(&self.rat));
        }
        let coef = fmt_rational(&self.surd);
        if self.rat.is_zero() {
            write!(f, "{coef}*sqrt(2)")
        } else if self.surd.is_negative() {
            write!(f, "{}{coef}*sqrt(2)", fmt_rational(&self.rat))
        } else {
            write!(f, "{}+{coef}*sqrt(2)", fmt_rational(&self.rat))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        // Exact decimal: "0.25" -> 1/4.
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `n`, `n/d`, exact decimals, and `a+b*sqrt(2)` forms.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(head) = t.strip_suffix("sqrt(2)") else {
            return parse_rational(&t).map(Scalar::from_rational);
        };
        let head = head.strip_suffix('*').unwrap_or(head);
        // Split at the last sign that is not the leading one.
        let split = head.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        let (rat_str, coef_str) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("", head),
        };
        let rat = if rat_str.is_empty() { BigRational::zero() } else { parse_rational(rat_str)? };
        let surd = match coef_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c.strip_prefix('+').unwrap_or(c))?,
        };
        Ok(Scalar { rat, surd })
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an exact number as a string like \"1/2\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
        v.parse().map_err(|e: Error| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
        Ok(Scalar::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
        Ok(Scalar::from_rational(BigRational::from_integer(BigInt::from(v))))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(ScalarVisitor)
    }
}

/// Shorthand for `Scalar::ratio`.
pub fn q(num: i64, den: i64) -> Scalar {
    Scalar::ratio(num, den)
}
