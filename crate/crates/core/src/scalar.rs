//! Number types used for distances, coefficients and norms.
//!
//! Everything in the crate is generic over [`Scalar`]. Two implementations
//! exist: [`Rational`] (arbitrary precision, all comparisons exact) and
//! [`Approx`] (an `f64` whose comparisons are taken up to a process-wide
//! tolerance, see [`set_tolerance`]).

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseNumberError;

/// Exact rational number.
pub type Rational = num_rational::BigRational;

/// Default comparison tolerance for [`Approx`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Sets the tolerance used by every [`Approx`] comparison in this process.
pub fn set_tolerance(tol: f64) {
    assert!(tol.is_finite() && tol >= 0.0, "tolerance must be finite and nonnegative");
    TOLERANCE_BITS.store(tol.to_bits(), AtomicOrdering::Relaxed);
}

pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(AtomicOrdering::Relaxed))
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when comparisons are exact.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    /// Three-way comparison; for inexact scalars values closer than the
    /// tolerance compare equal.
    fn cmp_tol(&self, other: &Self) -> Ordering;

    fn to_f64(&self) -> f64;

    /// Canonical string used in reports.
    fn render(&self) -> String;

    fn parse(s: &str) -> Result<Self, ParseNumberError>;

    fn same(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    fn is_zero_tol(&self) -> bool {
        self.cmp_tol(&Self::zero()) == Ordering::Equal
    }

    fn is_pos(&self) -> bool {
        self.cmp_tol(&Self::zero()) == Ordering::Greater
    }

    fn is_neg(&self) -> bool {
        self.cmp_tol(&Self::zero()) == Ordering::Less
    }

    fn abs_val(&self) -> Self {
        if self.is_neg() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b.cmp_tol(&a) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn cmp_tol(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse(s: &str) -> Result<Self, ParseNumberError> {
        parse_rational(s)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Floating point scalar with tolerance-aware comparisons.
#[derive(Clone, Copy, Debug, Default)]
pub struct Approx(pub f64);

impl Zero for Approx {
    fn zero() -> Self {
        Approx(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for Approx {
    fn one() -> Self {
        Approx(1.0)
    }
}

macro_rules! approx_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for Approx {
            type Output = Approx;
            fn $f(self, rhs: Approx) -> Approx {
                Approx(self.0 $op rhs.0)
            }
        }
    };
}

approx_binop!(Add, add, +);
approx_binop!(Sub, sub, -);
approx_binop!(Mul, mul, *);
approx_binop!(Div, div, /);

impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx(-self.0)
    }
}

impl Scalar for Approx {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        Approx(ratio_to_f64(r))
    }

    fn from_i64(v: i64) -> Self {
        Approx(v as f64)
    }

    fn cmp_tol(&self, other: &Self) -> Ordering {
        let diff = self.0 - other.0;
        if diff.abs() <= tolerance() {
            Ordering::Equal
        } else if diff < 0.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    fn to_f64(&self) -> f64 {
        self.0
    }

    fn render(&self) -> String {
        // 17 significant digits round-trips an f64.
        let s = format!("{:.17e}", self.0);
        match s.parse::<f64>() {
            Ok(v) if v == self.0 => trim_float(self.0),
            _ => s,
        }
    }

    fn parse(s: &str) -> Result<Self, ParseNumberError> {
        let r = parse_rational(s)?;
        Ok(Approx(ratio_to_f64(&r)))
    }
}

fn trim_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator/denominator: scale down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Parses `"3"`, `"-7/4"`, `"0.125"`, `"1.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseNumberError> {
    let err = || ParseNumberError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| err())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale.unsigned_abs() > 10_000 {
        return Err(err());
    }
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if neg { -value } else { value })
}

/// Convenience constructor used throughout tests and constructions.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact integer `p`-th root of a nonnegative rational, when it exists.
pub fn exact_root(r: &Rational, p: u32) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().nth_root(p);
    let d = r.denom().nth_root(p);
    if num_traits::pow(n.clone(), p as usize) == *r.numer()
        && num_traits::pow(d.clone(), p as usize) == *r.denom()
    {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Hashable key for grouping scalars that compare equal. Exact for rationals;
/// for floats the value is snapped to the tolerance grid.
pub trait ScalarKey {
    type Key: Hash + Eq + Ord + Clone + fmt::Debug;
    fn key(&self) -> Self::Key;
}

impl ScalarKey for Rational {
    type Key = Rational;
    fn key(&self) -> Rational {
        self.clone()
    }
}

impl ScalarKey for Approx {
    type Key = i64;
    fn key(&self) -> i64 {
        let tol = tolerance().max(f64::MIN_POSITIVE);
        (self.0 / (4.0 * tol)).round() as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_fractions_and_decimals() {
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-7/4").unwrap(), rat(-7, 4));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("2E2").unwrap(), rat(200, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn rational_render_round_trips() {
        for r in [rat(0, 1), rat(5, 1), rat(-3, 7), rat(22, 6)] {
            assert_eq!(parse_rational(&r.render()).unwrap(), r);
        }
    }

    #[test]
    fn approx_compares_within_tolerance() {
        let a = Approx(1.0);
        let b = Approx(1.0 + 1e-12);
        assert!(a.same(&b));
        assert_eq!(Approx(1.0).cmp_tol(&Approx(1.1)), Ordering::Less);
        assert_eq!(Approx(2.0f64.sqrt()).render().parse::<f64>().unwrap(), 2.0f64.sqrt());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&rat(9, 4), 2), Some(rat(3, 2)));
        assert_eq!(exact_root(&rat(2, 1), 2), None);
        assert_eq!(exact_root(&rat(27, 8), 3), Some(rat(3, 2)));
    }
}
