//! `PSL(2,R)` elements as determinant-one matrices over [`Scalar`].
//!
//! Two kinds of matrix live here. [`Matrix2`] is a literal `SL(2)`
//! representative whose sign matters: traces of words in a generator pair
//! are computed on fixed representatives and may be negative.
//! [`GroupElement`] is a standalone element of `PSL(2,R)` with the sign
//! normalized, so its trace is never negative.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chebyshev::{power_trace, s_eval, s_pair};
use crate::scalar::{Real, Scalar, ScalarError};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Psl2Error {
    #[error("determinant is {0}, expected 1")]
    Determinant(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("root trace {root_trace} gives power trace {power_trace}, expected +-{trace}")]
    InconsistentRootTrace {
        root_trace: String,
        power_trace: String,
        trace: String,
    },
    #[error("root trace {0} has absolute value below 2")]
    RootTraceTooSmall(String),
    #[error("S_m vanishes at the root trace")]
    SingularRoot,
    #[error("root exponent must be positive")]
    ZeroExponent,
    #[error("computed root does not reproduce the element")]
    RootCheckFailed,
    #[error("no real pair realizes the traces {0}")]
    Unrealizable(String),
}

/// A literal `SL(2)` matrix `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix2 {
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
}

impl Matrix2 {
    /// Checks the determinant exactly; entries must share one field.
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self, Psl2Error> {
        let ad = a.checked_mul(&d)?;
        let bc = b.checked_mul(&c)?;
        let det = ad.checked_sub(&bc)?;
        if det != Scalar::one() {
            return Err(Psl2Error::Determinant(det.to_string()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Parses four entries in the scalar text format.
    pub fn parse(entries: [&str; 4]) -> Result<Self, Psl2Error> {
        let [a, b, c, d] = entries;
        Self::new(a.parse()?, b.parse()?, c.parse()?, d.parse()?)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self, Psl2Error> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self {
            a: Scalar::one(),
            b: Scalar::zero(),
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    pub fn a(&self) -> &Scalar {
        &self.a
    }
    pub fn b(&self) -> &Scalar {
        &self.b
    }
    pub fn c(&self) -> &Scalar {
        &self.c
    }
    pub fn d(&self) -> &Scalar {
        &self.d
    }

    pub fn entries(&self) -> [&Scalar; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// The common radicand of the entries (`0` when all are rational).
    pub fn radicand(&self) -> u64 {
        self.entries()
            .iter()
            .map(|s| s.radicand())
            .find(|&r| r != 0)
            .unwrap_or(0)
    }

    pub fn trace(&self) -> Scalar {
        &self.a + &self.d
    }

    pub fn det(&self) -> Scalar {
        &self.a * &self.d - &self.b * &self.c
    }

    /// The adjugate, which is the inverse for determinant one.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, Psl2Error> {
        let (p, q) = (self.radicand(), rhs.radicand());
        if p != 0 && q != 0 && p != q {
            return Err(ScalarError::IncompatibleRadicands(p, q).into());
        }
        Ok(self * rhs)
    }

    /// `s*M + t*E`, without a determinant check.
    fn affine(&self, s: &Scalar, t: &Scalar) -> Self {
        Self {
            a: s * &self.a + t,
            b: s * &self.b,
            c: s * &self.c,
            d: s * &self.d + t,
        }
    }

    /// `M^n` for any integer `n`, via `M^n = S_n(t) M - S_{n-1}(t) E`.
    pub fn pow(&self, n: i64) -> Self {
        if n < 0 {
            return self.inverse().pow(-n);
        }
        let (below, at) = s_pair(n, &self.trace());
        self.affine(&at, &-below)
    }

    /// The `PSL(2,R)` element represented by this matrix.
    pub fn canonical(&self) -> GroupElement {
        if canonical_sign(self) < 0 {
            GroupElement(self.neg())
        } else {
            GroupElement(self.clone())
        }
    }

    /// Equality in `PSL(2,R)`, i.e. up to sign.
    pub fn projectively_eq(&self, other: &Self) -> bool {
        self == other || *self == other.neg()
    }
}

/// `+1` when `m` already has the canonical sign, `-1` otherwise.
fn canonical_sign(m: &Matrix2) -> i32 {
    let t = m.trace().signum();
    if t != 0 {
        return t;
    }
    [&m.b, &m.c, &m.a]
        .into_iter()
        .map(Scalar::signum)
        .find(|&s| s != 0)
        .unwrap_or(1)
}

impl std::ops::Mul<&Matrix2> for &Matrix2 {
    type Output = Matrix2;

    /// Panics when the operands live in different quadratic fields.
    fn mul(self, r: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: &self.a * &r.a + &self.b * &r.c,
            b: &self.a * &r.b + &self.b * &r.d,
            c: &self.c * &r.a + &self.d * &r.c,
            d: &self.c * &r.b + &self.d * &r.d,
        }
    }
}

impl std::ops::Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, r: Matrix2) -> Matrix2 {
        &self * &r
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix2{self}")
    }
}

impl Serialize for Matrix2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [[&self.a, &self.b], [&self.c, &self.d]].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [[a, b], [c, d]] = <[[Scalar; 2]; 2]>::deserialize(deserializer)?;
        Matrix2::new(a, b, c, d).map_err(serde::de::Error::custom)
    }
}

/// An element of `PSL(2,R)`, stored as the representative with
/// non-negative trace (ties at trace zero broken by the first nonzero of
/// `b`, `c`, `a` being positive).
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupElement(Matrix2);

impl GroupElement {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix2 {
        self.0
    }

    pub fn trace(&self) -> Scalar {
        self.0.trace()
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Matrix2::identity()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement{}", self.0)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Matrix2::deserialize(deserializer)?.canonical())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementClass {
    Hyperbolic,
    Parabolic,
    Elliptic,
    Identity,
}

pub fn make_element(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<GroupElement, Psl2Error> {
    Ok(Matrix2::new(a, b, c, d)?.canonical())
}

pub fn multiply(g: &GroupElement, h: &GroupElement) -> Result<GroupElement, Psl2Error> {
    Ok(g.0.checked_mul(&h.0)?.canonical())
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    g.0.inverse().canonical()
}

pub fn trace(g: &GroupElement) -> Scalar {
    g.trace()
}

/// `g^n` by the power formula.
pub fn power(g: &GroupElement, n: u32) -> GroupElement {
    g.0.pow(n as i64).canonical()
}

pub fn element_class(g: &GroupElement) -> ElementClass {
    if g.is_identity() {
        return ElementClass::Identity;
    }
    match (g.trace() - Scalar::from_integer(2)).signum() {
        1 => ElementClass::Hyperbolic,
        0 => ElementClass::Parabolic,
        _ => ElementClass::Elliptic,
    }
}

/// The `m`-th root of `g` whose trace is `root_trace`:
/// `R = (+-g + S_{m-1}(x) E) / S_m(x)`, the sign chosen so that
/// `S_{m+1}(x) - S_{m-1}(x)` matches the trace of `+-g`.
pub fn root_via_formula(g: &GroupElement, m: u32, root_trace: &Scalar) -> Result<GroupElement, Psl2Error> {
    if m == 0 {
        return Err(Psl2Error::ZeroExponent);
    }
    let x = root_trace;
    if (x.abs() - Scalar::from_integer(2)).signum() < 0 {
        return Err(Psl2Error::RootTraceTooSmall(x.to_string()));
    }
    let t = g.trace();
    let pt = power_trace(m as i64, x);
    let base = if pt.checked_sub(&t)?.is_zero() {
        g.0.clone()
    } else if pt.checked_add(&t)?.is_zero() {
        g.0.neg()
    } else {
        return Err(Psl2Error::InconsistentRootTrace {
            root_trace: x.to_string(),
            power_trace: pt.to_string(),
            trace: t.to_string(),
        });
    };
    let (below, at) = s_pair(m as i64, x);
    if at.is_zero() {
        return Err(Psl2Error::SingularRoot);
    }
    let inv = at.checked_recip()?;
    let shift = below.checked_mul(&inv)?;
    let [a, b, c, d] = base.entries();
    let root = Matrix2::new(
        a.checked_mul(&inv)?.checked_add(&shift)?,
        b.checked_mul(&inv)?,
        c.checked_mul(&inv)?,
        d.checked_mul(&inv)?.checked_add(&shift)?,
    )?
    .canonical();
    if power(&root, m) != *g {
        return Err(Psl2Error::RootCheckFailed);
    }
    Ok(root)
}

/// `tr([U,V])` from the trace triple `(tr U, tr V, tr UV)`:
/// `x^2 + y^2 + z^2 - xyz - 2`.
pub fn commutator_trace_from<T: Real>(x: &T, y: &T, z: &T) -> T {
    let squares = x.mul_ref(x).add_ref(&y.mul_ref(y)).add_ref(&z.mul_ref(z));
    squares
        .sub_ref(&x.mul_ref(y).mul_ref(z))
        .sub_ref(&x.int_like(2))
}

/// An ordered pair of literal representatives together with the words
/// expressing them in the original generators `a`, `b`.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorPair {
    first: Matrix2,
    second: Matrix2,
    words: [Word; 2],
}

impl GeneratorPair {
    /// A pair of original generators, each represented with trace `>= 0`.
    pub fn new(a: &Matrix2, b: &Matrix2) -> Result<Self, Psl2Error> {
        Self::from_parts(
            a.canonical().into_matrix(),
            b.canonical().into_matrix(),
            [Word::a(), Word::b()],
        )
    }

    pub fn from_elements(a: &GroupElement, b: &GroupElement) -> Result<Self, Psl2Error> {
        Self::from_parts(a.matrix().clone(), b.matrix().clone(), [Word::a(), Word::b()])
    }

    /// Literal representatives as given, without sign normalization.
    pub fn from_parts(first: Matrix2, second: Matrix2, words: [Word; 2]) -> Result<Self, Psl2Error> {
        first.checked_mul(&second)?;
        Ok(Self { first, second, words })
    }

    /// A pair with literal trace triple `(x, y, z)` for rational traces,
    /// with entries in `Q` or a quadratic field over it.
    pub fn from_traces(x: &Scalar, y: &Scalar, z: &Scalar) -> Result<Self, Psl2Error> {
        let unrealizable = || Psl2Error::Unrealizable(format!("({x},{y},{z})"));
        let (xr, yr, zr) = match (x.as_rational(), y.as_rational(), z.as_rational()) {
            (Some(a), Some(b), Some(c)) => (a.clone(), b.clone(), c.clone()),
            _ => return Err(unrealizable()),
        };
        let two = BigRational::from_integer(2.into());
        let four = BigRational::from_integer(4.into());
        // U = [[x, -1], [1, 0]] and V = [[p, q], [r, y - p]] with q = +-1;
        // tr(UV) = z fixes r, and det V = 1 is a quadratic in p.
        for q in [1i64, -1] {
            let (sum, prod) = if q == 1 {
                // p^2 - (y - x) p - (z - 2) = 0
                (&yr - &xr, -(&zr - &two))
            } else {
                // p^2 - (x + y) p + (z + 2) = 0
                (&xr + &yr, &zr + &two)
            };
            let disc = &sum * &sum - &four * &prod;
            if disc.is_negative() {
                continue;
            }
            let root = rational_sqrt(&disc).ok_or_else(unrealizable)?;
            let p = (Scalar::from_rational(sum) + root) * Scalar::from_fraction(1, 2);
            let q = Scalar::from_integer(q);
            let r = if q.signum() > 0 {
                x * &p + Scalar::one() - z
            } else {
                x * &p - Scalar::one() - z
            };
            let u = Matrix2::new(x.clone(), Scalar::from_integer(-1), Scalar::one(), Scalar::zero())?;
            let v = Matrix2::new(p.clone(), q, r, y - &p)?;
            return Self::from_parts(u, v, [Word::a(), Word::b()]);
        }
        Err(unrealizable())
    }

    pub fn first(&self) -> &Matrix2 {
        &self.first
    }

    pub fn second(&self) -> &Matrix2 {
        &self.second
    }

    pub fn words(&self) -> &[Word; 2] {
        &self.words
    }

    pub fn product(&self) -> Matrix2 {
        &self.first * &self.second
    }

    /// `(tr U, tr V, tr UV)` on the literal representatives.
    pub fn traces(&self) -> [Scalar; 3] {
        [self.first.trace(), self.second.trace(), self.product().trace()]
    }

    /// The literal commutator `U V U^-1 V^-1`.
    pub fn commutator(&self) -> Matrix2 {
        &(&self.product() * &self.first.inverse()) * &self.second.inverse()
    }
}

impl fmt::Debug for GeneratorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GeneratorPair({} = {}, {} = {})",
            self.words[0], self.first, self.words[1], self.second
        )
    }
}

/// `sqrt(a/b) = sqrt(ab)/b` as a scalar, if `ab` fits in 64 bits.
fn rational_sqrt(r: &BigRational) -> Option<Scalar> {
    let ab = (r.numer() * r.denom()).to_u64()?;
    let den = Scalar::from_rational(BigRational::from_integer(r.denom().clone()));
    Some(Scalar::sqrt_of(ab) / den)
}

/// `tr([A,B])`, independent of the representatives chosen.
pub fn commutator_trace(pair: &GeneratorPair) -> Scalar {
    let [x, y, z] = pair.traces();
    commutator_trace_from(&x, &y, &z)
}

/// `tr([A^m, B^n]) = 2 + S_m(tr A)^2 S_n(tr B)^2 (tr([A,B]) - 2)`.
pub fn commutator_trace_of_powers(pair: &GeneratorPair, m: u32, n: u32) -> Scalar {
    let tau = commutator_trace(pair);
    let sm = s_eval(m as i64, &pair.first.trace());
    let sn = s_eval(n as i64, &pair.second.trace());
    let two = Scalar::from_integer(2);
    &two + &(sm.pow(2) * sn.pow(2) * (tau - &two))
}
