//! Exact scalars in `Q` and real quadratic fields `Q(sqrt(D))`.
//!
//! A [`Scalar`] is `r + s*sqrt(D)` with arbitrary-precision rationals `r`, `s`
//! and a square-free radicand `D >= 2`, or a plain rational when `D = 0`.
//! Values from different quadratic fields never mix: arithmetic between
//! `Q(sqrt(2))` and `Q(sqrt(3))` is an error, not an approximation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

mod float;

pub use float::{
    to_bigfloat, BigFloat, FloatContext, FloatError, DEFAULT_PRECISION, DEFAULT_TOLERANCE_BITS,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("malformed scalar {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("negative radicand in {0:?}")]
    NegativeRadicand(String),
    #[error("incompatible radicands sqrt({0}) and sqrt({1})")]
    IncompatibleRadicands(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
}

/// Arithmetic operator selector for [`scalar_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// An exact element of `Q` or `Q(sqrt(D))`.
///
/// Invariant: `radicand` is `0` (pure rational, `surd == 0`) or a square-free
/// integer `>= 2` with `surd != 0`. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    rational: BigRational,
    surd: BigRational,
    radicand: u64,
}

impl Scalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self {
            rational: r,
            surd: BigRational::zero(),
            radicand: 0,
        }
    }

    /// `num/den` as an exact rational. Panics if `den == 0`.
    pub fn from_fraction(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    /// Builds `rational + surd*sqrt(radicand)`, extracting square factors from
    /// the radicand so that the stored form is canonical.
    pub fn new(rational: BigRational, surd: BigRational, radicand: u64) -> Self {
        if radicand == 0 || surd.is_zero() {
            return Self::from_rational(rational);
        }
        let (outside, inside) = split_square_factor(radicand);
        let surd = surd * BigRational::from_integer(BigInt::from(outside));
        if inside == 1 {
            Self::from_rational(rational + surd)
        } else {
            Self {
                rational,
                surd,
                radicand: inside,
            }
        }
    }

    /// `sqrt(n)` for a non-negative integer `n`, in canonical form.
    pub fn sqrt_of(n: u64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    /// Square-free radicand, `0` for pure rationals.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 0
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    /// Exact sign in `{-1, 0, 1}`.
    pub fn signum(&self) -> i32 {
        let r = sign_of(&self.rational);
        if self.radicand == 0 {
            return r;
        }
        let s = sign_of(&self.surd);
        if r == 0 || r == s {
            return s;
        }
        // Opposite signs: the part with the larger square wins. Equality is
        // impossible because sqrt(D) is irrational.
        let r2 = &self.rational * &self.rational;
        let s2 = &self.surd * &self.surd * BigRational::from_integer(BigInt::from(self.radicand));
        if r2 > s2 {
            r
        } else {
            s
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Radicand of the field that contains both operands.
    pub fn joint_radicand(&self, other: &Self) -> Result<u64, ScalarError> {
        match (self.radicand, other.radicand) {
            (0, d) | (d, 0) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(ScalarError::IncompatibleRadicands(d, e)),
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(rhs)?;
        Ok(Self::assemble(
            &self.rational + &rhs.rational,
            &self.surd + &rhs.surd,
            d,
        ))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(rhs)?;
        Ok(Self::assemble(
            &self.rational - &rhs.rational,
            &self.surd - &rhs.surd,
            d,
        ))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ScalarError> {
        let d = self.joint_radicand(rhs)?;
        let big_d = BigRational::from_integer(BigInt::from(d));
        let rational = &self.rational * &rhs.rational + &self.surd * &rhs.surd * big_d;
        let surd = &self.rational * &rhs.surd + &self.surd * &rhs.rational;
        Ok(Self::assemble(rational, surd, d))
    }

    /// Multiplicative inverse via the conjugate `r - s*sqrt(D)`.
    pub fn checked_recip(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let big_d = BigRational::from_integer(BigInt::from(self.radicand));
        let norm = &self.rational * &self.rational - &self.surd * &self.surd * big_d;
        Ok(Self::assemble(
            &self.rational / &norm,
            -(&self.surd / &norm),
            self.radicand,
        ))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        self.joint_radicand(rhs)?;
        self.checked_mul(&rhs.checked_recip()?)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Multiplies by an integer; never changes the field.
    pub fn scale(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self::assemble(&self.rational * &k, &self.surd * &k, self.radicand)
    }

    /// `Some(n)` when the value is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        let r = self.as_rational()?;
        if r.is_integer() {
            r.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Rough `f64` value, for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        if self.radicand == 0 {
            return r;
        }
        r + self.surd.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }

    fn assemble(rational: BigRational, surd: BigRational, radicand: u64) -> Self {
        if surd.is_zero() {
            Self::from_rational(rational)
        } else {
            Self {
                rational,
                surd,
                radicand,
            }
        }
    }

    fn expect_same_field(&self, rhs: &Self) {
        if let Err(e) = self.joint_radicand(rhs) {
            panic!("{e}");
        }
    }
}

/// Exact arithmetic with field checking.
pub fn scalar_arith(a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
    }
}

pub fn scalar_sign(s: &Scalar) -> i32 {
    s.signum()
}

pub fn scalar_parse(text: &str) -> Result<Scalar, ScalarError> {
    text.parse()
}

/// Ring operations shared by [`Scalar`] and [`BigFloat`], so recurrences and
/// the trace reduction loop can run on either backend.
pub trait Real: Clone + fmt::Debug + fmt::Display {
    /// The integer `n` in the same field or precision as `self`.
    fn int_like(&self, n: i64) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// `None` when the backend cannot decide the order.
    fn compare(&self, rhs: &Self) -> Option<Ordering>;
}

impl Real for Scalar {
    fn int_like(&self, n: i64) -> Self {
        Scalar::from_integer(n)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn compare(&self, rhs: &Self) -> Option<Ordering> {
        self.partial_cmp(rhs)
    }
}

impl Real for BigFloat {
    fn int_like(&self, n: i64) -> Self {
        self.context().from_i64(n)
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn compare(&self, rhs: &Self) -> Option<Ordering> {
        self.context().compare(self, rhs)
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Writes `n = outside^2 * inside` with `inside` square-free.
///
/// Trial division only runs up to the cube root of the unfactored rest; what
/// remains then has at most two prime factors and is either a prime square or
/// square-free.
pub(crate) fn split_square_factor(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 0);
    }
    let mut rest = n;
    let mut outside = 1u64;
    let mut inside = 1u64;
    let mut p = 2u64;
    while (p as u128) * (p as u128) * (p as u128) <= rest as u128 {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        outside *= p.pow(e / 2);
        if e % 2 == 1 {
            inside *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.isqrt();
    if root * root == rest {
        outside *= root;
    } else {
        inside *= rest;
    }
    (outside, inside)
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.expect_same_field(rhs);
                self.$checked(rhs).expect("field-compatible operands")
            }
        }
        impl std::ops::$trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

// Operators panic on mixed radicands or division by zero, like integer
// overflow; the `checked_*` methods report those as errors instead.
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match self.checked_div(rhs) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }
}

impl std::ops::Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            rational: -&self.rational,
            surd: -&self.surd,
            radicand: self.radicand,
        }
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl PartialOrd for Scalar {
    /// `None` when the operands live in different quadratic fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(diff.signum().cmp(&0))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        if self.radicand != 0 {
            write!(f, " + {}*sqrt({})", self.surd, self.radicand)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// Accepts sums of signed terms, each a rational (`p`, `p/q` or a
    /// decimal `1.25`), a surd `sqrt(n)`, or a product `c*sqrt(n)` / `c sqrt(n)`.
    /// This covers both `70 + 28*sqrt(6)` and `28*sqrt(6)+70`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        Parser::new(text).parse()
    }
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            text,
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn malformed(&self, reason: impl Into<String>) -> ScalarError {
        ScalarError::Malformed {
            text: self.text.to_string(),
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<Scalar, ScalarError> {
        if self.chars.is_empty() {
            return Err(self.malformed("empty input"));
        }
        if split_number(self.text) {
            return Err(self.malformed("whitespace inside a number"));
        }
        let mut total = Scalar::zero();
        let mut first = true;
        while self.peek().is_some() {
            let negate = if first || self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Err(self.malformed(format!("expected '+' or '-' at offset {}", self.pos)));
            };
            first = false;
            let term = self.term()?;
            let term = if negate { -term } else { term };
            total = total.checked_add(&term)?;
        }
        Ok(total)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut negative = false;
        loop {
            if self.eat('-') {
                negative = !negative;
            } else if !self.eat('+') {
                break;
            }
        }
        let value = if self.peek() == Some('s') {
            self.sqrt()?
        } else {
            let coeff = self.number()?;
            let star = self.eat('*');
            if self.peek() == Some('s') {
                Scalar::from_rational(coeff).checked_mul(&self.sqrt()?)?
            } else if star {
                return Err(self.malformed("expected sqrt(...) after '*'"));
            } else {
                Scalar::from_rational(coeff)
            }
        };
        Ok(if negative { -value } else { value })
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<BigRational, ScalarError> {
        let int = self
            .digits()
            .ok_or_else(|| self.malformed(format!("expected a number at offset {}", self.pos)))?;
        let int: BigInt = int.parse().expect("ascii digits");
        if self.eat('/') {
            let den = self
                .digits()
                .ok_or_else(|| self.malformed("expected a denominator after '/'"))?;
            let den: BigInt = den.parse().expect("ascii digits");
            if den.is_zero() {
                return Err(ScalarError::ZeroDenominator(self.text.to_string()));
            }
            Ok(BigRational::new(int, den))
        } else if self.eat('.') {
            let frac = self
                .digits()
                .ok_or_else(|| self.malformed("expected digits after '.'"))?;
            let scale = BigInt::from(10).pow(frac.len() as u32);
            let frac: BigInt = frac.parse().expect("ascii digits");
            Ok(BigRational::new(int * &scale + frac, scale))
        } else {
            Ok(BigRational::from_integer(int))
        }
    }

    fn sqrt(&mut self) -> Result<Scalar, ScalarError> {
        for c in "sqrt(".chars() {
            if !self.eat(c) {
                return Err(self.malformed("expected 'sqrt('"));
            }
        }
        if self.peek() == Some('-') {
            return Err(ScalarError::NegativeRadicand(self.text.to_string()));
        }
        let digits = self
            .digits()
            .ok_or_else(|| self.malformed("expected an integer radicand"))?;
        if !self.eat(')') {
            return Err(self.malformed("expected ')'"));
        }
        let n: u64 = digits
            .parse()
            .map_err(|_| self.malformed("radicand does not fit in 64 bits"))?;
        if n == 0 {
            return Err(self.malformed("radicand must be positive"));
        }
        Ok(Scalar::sqrt_of(n))
    }
}

/// Whether whitespace separates two digits, as in `1 2`.
fn split_number(text: &str) -> bool {
    let numeric = |c: char| c.is_ascii_digit() || c == '.';
    let mut prev: Option<char> = None;
    let mut gap = false;
    for c in text.chars() {
        if c.is_whitespace() {
            gap = true;
            continue;
        }
        if gap && numeric(c) && prev.is_some_and(numeric) {
            return true;
        }
        prev = Some(c);
        gap = false;
    }
    false
}
