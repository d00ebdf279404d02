//! Scalar abstraction shared by every solver: `f32`/`f64` for
//! tolerance-based runs, `BigRational` for exact arithmetic.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Numeric type for actions and payoffs.
///
/// All sign tests in stability definitions go through [`Scalar::sign_margin`]:
/// floating-point instantiations treat values within the margin of zero as
/// zero, exact types compare exactly. This keeps the weak/strict distinction
/// in the stability concepts meaningful under both arithmetic modes.
pub trait Scalar:
    Num + Signed + PartialOrd + Clone + Debug + Display + Send + Sync + 'static
{
    /// Margin used when comparing against zero; exact types return zero.
    fn sign_margin() -> Self;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Closest `f64`; for reporting and sampling only, never for decisions.
    fn approx(&self) -> f64;

    /// Stable byte representation used for state hashing.
    fn canonical_bytes(&self) -> Vec<u8>;

    fn is_finite_value(&self) -> bool {
        true
    }

    /// Strictly positive beyond the margin.
    fn gt_zero(&self) -> bool {
        *self > Self::sign_margin()
    }

    /// Nonnegative up to the margin.
    fn ge_zero(&self) -> bool {
        *self >= -Self::sign_margin()
    }

    fn lt_zero(&self) -> bool {
        !self.ge_zero()
    }

    fn le_zero(&self) -> bool {
        !self.gt_zero()
    }

    /// `self > other` beyond the margin.
    fn exceeds(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).gt_zero()
    }

    /// `self >= other` up to the margin.
    fn at_least(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).ge_zero()
    }

    /// Equal up to the margin.
    fn near(&self, other: &Self) -> bool {
        !self.exceeds(other) && !other.exceeds(self)
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }

    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    fn sign_margin() -> Self {
        1e-9
    }

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        self.to_bits().to_le_bytes().to_vec()
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn sign_margin() -> Self {
        1e-4
    }

    fn from_int(v: i64) -> Self {
        v as f32
    }

    fn approx(&self) -> f64 {
        f64::from(*self)
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        self.to_bits().to_le_bytes().to_vec()
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    fn sign_margin() -> Self {
        Self::zero()
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn canonical_bytes(&self) -> Vec<u8> {
        format!("{self}").into_bytes()
    }
}

/// Exact rational literal with machine-word numerator and denominator.
///
/// Constructors and config files speak in these; [`Ratio64::to_scalar`]
/// instantiates the value in whichever arithmetic mode is in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio64 {
    num: i64,
    den: i64,
}

impl Ratio64 {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let sign = if (num < 0) != (den < 0) && num != 0 {
            -1
        } else {
            1
        };
        let (num, den) = (num.abs(), den.abs());
        let g = num.gcd(&den).max(1);
        Ok(Ratio64 {
            num: sign * (num / g),
            den: den / g,
        })
    }

    pub fn int(v: i64) -> Self {
        Ratio64 { num: v, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn to_scalar<T: Scalar>(&self) -> T {
        T::from_ratio(self.num, self.den)
    }

    /// Parses `"3"`, `"3/4"`, `"-0.25"`, and the like.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse `{text}` as a rational"));
        if let Some((n, d)) = text.split_once('/') {
            let num: i64 = n.trim().parse().map_err(|_| bad())?;
            let den: i64 = d.trim().parse().map_err(|_| bad())?;
            return Ratio64::new(num, den);
        }
        if let Some((int_part, frac_part)) = text.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int_part.trim_start().starts_with('-');
            let int: i64 = if int_part.is_empty() || int_part == "-" {
                0
            } else {
                int_part.parse().map_err(|_| bad())?
            };
            let digits = frac_part.len() as u32;
            if digits > 12 {
                return Err(bad());
            }
            let scale = 10i64.pow(digits);
            let frac: i64 = frac_part.parse().map_err(|_| bad())?;
            let signed_frac = if negative { -frac } else { frac };
            return Ratio64::new(
                int.checked_mul(scale)
                    .and_then(|v| v.checked_add(signed_frac))
                    .ok_or_else(bad)?,
                scale,
            );
        }
        let num: i64 = text.parse().map_err(|_| bad())?;
        Ok(Ratio64::int(num))
    }
}

impl Display for Ratio64 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// FNV-1a over a byte stream; used for reproducible state hashes.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub(crate) fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}
