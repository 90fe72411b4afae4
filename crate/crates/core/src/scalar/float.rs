//! Fixed-precision binary floats for the transcendental steps (`cosh`,
//! `arcosh`) of the root criteria, backed by `astro-float-num`.
//!
//! Every value carries its [`FloatContext`], so threshold comparisons know
//! which tolerance applies. A comparison closer than the tolerance is
//! reported as undecidable instead of being rounded either way.

use std::cmp::Ordering;
use std::fmt;

use astro_float_num::{BigFloat as Raw, Consts, Exponent, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::Scalar;

const RM: RoundingMode = RoundingMode::ToEven;

pub const DEFAULT_PRECISION: usize = 256;
pub const DEFAULT_TOLERANCE_BITS: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FloatError {
    #[error("precision must be a positive multiple of 64 bits, got {0}")]
    Precision(usize),
    #[error("tolerance 2^-{tolerance_bits} is finer than the {precision}-bit precision")]
    Tolerance { precision: usize, tolerance_bits: u32 },
}

/// Precision and comparison tolerance shared by a computation.
///
/// Comparisons against a threshold are decided only when the two values are
/// at least `2^-tolerance_bits` apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloatContext {
    pub precision: usize,
    pub tolerance_bits: u32,
}

impl Default for FloatContext {
    fn default() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            tolerance_bits: DEFAULT_TOLERANCE_BITS,
        }
    }
}

impl FloatContext {
    pub fn new(precision: usize, tolerance_bits: u32) -> Result<Self, FloatError> {
        if precision == 0 || !precision.is_multiple_of(64) {
            return Err(FloatError::Precision(precision));
        }
        if tolerance_bits as usize >= precision {
            return Err(FloatError::Tolerance {
                precision,
                tolerance_bits,
            });
        }
        Ok(Self {
            precision,
            tolerance_bits,
        })
    }

    pub fn from_i64(&self, n: i64) -> BigFloat {
        self.wrap(Raw::from_i64(n, self.precision.max(64)))
    }

    /// `2^-tolerance_bits`.
    pub fn tolerance(&self) -> BigFloat {
        self.pow2(-(self.tolerance_bits as i32))
    }

    /// `2^e`, exactly.
    pub fn pow2(&self, e: i32) -> BigFloat {
        let mut raw = Raw::from_u64(1, self.precision);
        raw.set_exponent(1 + e as Exponent);
        self.wrap(raw)
    }

    /// Rounds an exact scalar to this context's precision.
    ///
    /// The intermediate precision grows with the cancellation between the
    /// rational and surd parts, so the final rounding sees an essentially
    /// exact value.
    pub fn from_scalar(&self, s: &Scalar) -> BigFloat {
        let p = self.precision;
        let rational = s.rational_part();
        if s.radicand() == 0 {
            let mut raw = raw_from_rational(rational, 2 * p + 64);
            raw.set_precision(p, RM).expect("valid precision");
            return self.wrap(raw);
        }
        let mut wp = 2 * p + 64;
        loop {
            let a = raw_from_rational(rational, wp);
            let root = Raw::from_u64(s.radicand(), wp).sqrt(wp, RM);
            let b = raw_from_rational(s.surd_part(), wp).mul(&root, wp, RM);
            let sum = a.add(&b, wp, RM);
            let top = exponent(&a).max(exponent(&b));
            let lost = (top - exponent(&sum)).max(0) as usize;
            if lost + 2 * p + 64 <= wp {
                let mut raw = sum;
                raw.set_precision(p, RM).expect("valid precision");
                return self.wrap(raw);
            }
            wp = lost + 2 * p + 128;
        }
    }

    /// Three-way comparison with the context tolerance; `None` when
    /// `|a - b| < 2^-tolerance_bits`.
    pub fn compare(&self, a: &BigFloat, b: &BigFloat) -> Option<Ordering> {
        let diff = a.sub(b);
        if diff.abs().raw.cmp(&self.tolerance().raw)? < 0 {
            return None;
        }
        Some(diff.signum().cmp(&0))
    }

    fn wrap(&self, raw: Raw) -> BigFloat {
        BigFloat { raw, ctx: *self }
    }
}

/// A binary floating point number with a fixed mantissa precision.
#[derive(Clone)]
pub struct BigFloat {
    raw: Raw,
    ctx: FloatContext,
}

impl BigFloat {
    pub fn context(&self) -> FloatContext {
        self.ctx
    }

    pub fn precision(&self) -> usize {
        self.ctx.precision
    }

    fn with(&self, raw: Raw) -> Self {
        Self { raw, ctx: self.ctx }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.with(self.raw.add(&rhs.raw, self.ctx.precision, RM))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.with(self.raw.sub(&rhs.raw, self.ctx.precision, RM))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.with(self.raw.mul(&rhs.raw, self.ctx.precision, RM))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.with(self.raw.div(&rhs.raw, self.ctx.precision, RM))
    }

    pub fn neg(&self) -> Self {
        self.with(self.raw.neg())
    }

    pub fn abs(&self) -> Self {
        self.with(self.raw.abs())
    }

    pub fn sqrt(&self) -> Self {
        self.with(self.raw.sqrt(self.ctx.precision, RM))
    }

    pub fn cosh(&self) -> Self {
        let mut cc = consts();
        self.with(self.raw.cosh(self.ctx.precision, RM, &mut cc))
    }

    /// Inverse hyperbolic cosine; NaN below 1.
    pub fn acosh(&self) -> Self {
        let mut cc = consts();
        self.with(self.raw.acosh(self.ctx.precision, RM, &mut cc))
    }

    pub fn div_int(&self, k: i64) -> Self {
        self.div(&self.ctx.from_i64(k))
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.mul(&self.ctx.from_i64(k))
    }

    pub fn is_nan(&self) -> bool {
        self.raw.is_nan()
    }

    /// Exact sign of the stored value.
    pub fn signum(&self) -> i32 {
        if self.raw.is_zero() {
            0
        } else if self.raw.is_negative() {
            -1
        } else {
            1
        }
    }

    /// The stored binary value as an exact rational; `None` for NaN or
    /// infinities.
    pub fn to_rational(&self) -> Option<BigRational> {
        let (words, _, sign, e, _) = self.raw.as_raw_parts()?;
        let mantissa = BigInt::from_slice(
            num_bigint::Sign::Plus,
            &words
                .iter()
                .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                .collect::<Vec<_>>(),
        );
        let mantissa = if sign == Sign::Neg { -mantissa } else { mantissa };
        let shift = e as i64 - 64 * words.len() as i64;
        let one = BigInt::from(1);
        Some(if shift >= 0 {
            BigRational::from_integer(mantissa << shift as usize)
        } else {
            BigRational::new(mantissa, one << (-shift) as usize)
        })
    }

    /// Decimal rendering of the stored binary value.
    pub fn to_decimal(&self) -> String {
        let mut cc = consts();
        self.raw
            .format(Radix::Dec, RM, &mut cc)
            .unwrap_or_else(|_| "NaN".to_string())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({}, {} bits)", self.to_decimal(), self.ctx.precision)
    }
}

/// Rounds `s` to `precision` bits.
pub fn to_bigfloat(s: &Scalar, precision: usize) -> BigFloat {
    FloatContext {
        precision,
        tolerance_bits: DEFAULT_TOLERANCE_BITS.min(precision as u32 / 2),
    }
    .from_scalar(s)
}

fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

fn exponent(raw: &Raw) -> isize {
    if raw.is_zero() {
        isize::MIN / 4
    } else {
        raw.exponent().unwrap_or(0) as isize
    }
}

fn raw_from_bigint(n: &BigInt) -> Raw {
    let (sign, words) = n.to_u64_digits();
    if words.is_empty() {
        return Raw::from_u64(0, 64);
    }
    let sign = match sign {
        num_bigint::Sign::Minus => Sign::Neg,
        _ => Sign::Pos,
    };
    Raw::from_words(&words, sign, (words.len() * 64) as Exponent)
}

fn raw_from_rational(r: &BigRational, precision: usize) -> Raw {
    let num = raw_from_bigint(r.numer());
    let den = raw_from_bigint(r.denom());
    num.div(&den, precision, RM)
}
