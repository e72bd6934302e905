//! Numeric back-ends: binary floating point and exact rationals.
//!
//! Every data type in the crate is generic over [`Scalar`]. Float mode uses
//! the tolerances in [`Tolerances`]; rational mode compares exactly, so every
//! tolerance collapses to zero.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact rational number used in rational mode.
pub type Rational = BigRational;

/// Which numeric back-end a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Float,
    Rational,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        }
    }
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Mode::Float),
            "rational" => Ok(Mode::Rational),
            other => Err(format!("unknown mode `{other}` (expected float|rational)")),
        }
    }
}

/// Float-mode tolerances. Ignored in rational mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Total-mass deviation allowed for a probability vector.
    pub mass: f64,
    /// Coordinate distance under which two atoms are the same point.
    pub geom: f64,
    /// Primal feasibility (marginal residuals).
    pub feas: f64,
    /// Dual feasibility and complementary slackness.
    pub dual: f64,
    /// W1 distance under which two conditional measures are the same meta-atom.
    pub meta: f64,
    /// Gradient norm under which a cost difference counts as critical.
    pub twist: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        mass: 1e-9,
        geom: 1e-12,
        feas: 1e-9,
        dual: 1e-7,
        meta: 1e-7,
        twist: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Field-like numeric type shared by the float and rational back-ends.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    const MODE: Mode;

    /// Converts a tolerance for this mode: itself in float mode, zero when exact.
    fn tol(eps: f64) -> Self;

    /// Total order used for canonical sorting.
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Lossy conversion to `f64` (exact for floats).
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion from `f64`; exact binary expansion in rational mode.
    fn from_f64_lossy(x: f64) -> Self;

    /// Conversion from an exact rational (rounded in float mode).
    fn from_rational(r: &Rational) -> Self;

    /// `sq^(p/2)`: the p-th power of a distance given its square.
    ///
    /// Exact in rational mode when `p` is an even integer or `sq` is a perfect
    /// square and `p` an integer; otherwise rounded through `f64`.
    fn pow_half(sq: &Self, p: f64) -> Self;

    /// `x^(1/p)` for `x >= 0`, exact whenever possible.
    fn root(x: &Self, p: f64) -> Self;

    fn is_finite_value(&self) -> bool;

    /// Normalises the representation (e.g. `-0.0` to `0.0`).
    fn canonical(self) -> Self {
        self
    }

    /// `|a - b| <= eps` in float mode, `a == b` when exact.
    fn near(a: &Self, b: &Self, eps: f64) -> bool {
        let d = (a.clone() - b.clone()).abs();
        d <= Self::tol(eps)
    }

    /// Strictly greater than zero (`0.0` and `-0.0` are not positive).
    fn gt_zero(&self) -> bool {
        *self > Self::zero()
    }

    /// Strictly below zero (`-0.0` is not negative).
    fn lt_zero(&self) -> bool {
        *self < Self::zero()
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every scalar")
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn tol(eps: f64) -> Self {
        eps
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn from_f64_lossy(x: f64) -> Self {
        x
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn pow_half(sq: &Self, p: f64) -> Self {
        if p == 2.0 {
            *sq
        } else if p == 1.0 {
            sq.sqrt()
        } else {
            sq.sqrt().powf(p)
        }
    }

    fn root(x: &Self, p: f64) -> Self {
        if p == 1.0 {
            *x
        } else if p == 2.0 {
            x.max(0.0).sqrt()
        } else {
            x.max(0.0).powf(1.0 / p)
        }
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn canonical(self) -> Self {
        if self == 0.0 {
            0.0
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn tol(_eps: f64) -> Self {
        Rational::zero()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Rational::zero)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn pow_half(sq: &Self, p: f64) -> Self {
        if p.fract() == 0.0 && p >= 0.0 {
            let k = p as i32;
            if k % 2 == 0 {
                return pow_int(sq, k / 2);
            }
            if let Some(r) = exact_sqrt(sq) {
                return pow_int(&r, k);
            }
        }
        Self::from_f64_lossy(f64::pow_half(&sq.to_f64_lossy(), p))
    }

    fn root(x: &Self, p: f64) -> Self {
        if p == 1.0 {
            return x.clone();
        }
        if p == 2.0 {
            if let Some(r) = exact_sqrt(x) {
                return r;
            }
        }
        Self::from_f64_lossy(f64::root(&x.to_f64_lossy(), p))
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

fn pow_int(x: &Rational, k: i32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Square root of a nonnegative rational when both parts are perfect squares.
pub fn exact_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

/// Parses `"p/q"`, `"p"`, or a decimal literal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).ok()?;
        let q = BigInt::from_str(q.trim()).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Ok(n) = BigInt::from_str(s) {
        return Some(Rational::from_integer(n));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= pow_int(&ten, scale);
    } else {
        value /= pow_int(&ten, -scale);
    }
    Some(if neg { -value } else { value })
}

/// Exact rational with the value of the shortest decimal that round-trips `x`.
pub fn rational_from_decimal_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse_decimal(&format!("{x:e}"))
}

/// Builds `p/q`; panics on a zero denominator.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
