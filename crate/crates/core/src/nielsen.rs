//! Nielsen moves on generator pairs, applied to matrices, provenance words
//! and trace triples in lockstep.
//!
//! With `(x, y, z) = (tr U, tr V, tr UV)` the moves act on triples as:
//!
//! | move            | new pair        | new triple       |
//! |-----------------|-----------------|------------------|
//! | `swap`          | `(V, U)`        | `(y, x, z)`      |
//! | `invert_first`  | `(U^-1, V)`     | `(x, y, xy - z)` |
//! | `invert_second` | `(U, V^-1)`     | `(x, y, xy - z)` |
//! | `mul_right`     | `(U, VU)`       | `(x, z, xz - y)` |
//! | `mul_right_inv` | `(U, VU^-1)`    | `(x, xy - z, y)` |
//! | `mul_left`      | `(U, UV)`       | `(x, z, xz - y)` |
//! | `mul_left_inv`  | `(U, U^-1 V)`   | `(x, xy - z, y)` |
//! | `permute_b`     | `(U^-1, UV)`    | `(x, z, y)`      |
//! | `permute_c`     | `(UV, V^-1)`    | `(z, y, x)`      |
//! | `replace_e`     | `(U, U^-1 V)`   | `(x, xy - z, y)` |
//! | `replace_f`     | `(UV^-1, V)`    | `(xy - z, y, x)` |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::psl2::{GeneratorPair, Matrix2};
use crate::scalar::{Real, Scalar};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NielsenMove {
    Swap,
    InvertFirst,
    InvertSecond,
    MulRight,
    MulRightInv,
    MulLeft,
    MulLeftInv,
    PermuteB,
    PermuteC,
    ReplaceE,
    ReplaceF,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown Nielsen move {0:?}")]
pub struct UnknownMove(pub String);

impl NielsenMove {
    pub const ALL: [NielsenMove; 11] = [
        NielsenMove::Swap,
        NielsenMove::InvertFirst,
        NielsenMove::InvertSecond,
        NielsenMove::MulRight,
        NielsenMove::MulRightInv,
        NielsenMove::MulLeft,
        NielsenMove::MulLeftInv,
        NielsenMove::PermuteB,
        NielsenMove::PermuteC,
        NielsenMove::ReplaceE,
        NielsenMove::ReplaceF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NielsenMove::Swap => "swap",
            NielsenMove::InvertFirst => "invert_first",
            NielsenMove::InvertSecond => "invert_second",
            NielsenMove::MulRight => "mul_right",
            NielsenMove::MulRightInv => "mul_right_inv",
            NielsenMove::MulLeft => "mul_left",
            NielsenMove::MulLeftInv => "mul_left_inv",
            NielsenMove::PermuteB => "permute_b",
            NielsenMove::PermuteC => "permute_c",
            NielsenMove::ReplaceE => "replace_e",
            NielsenMove::ReplaceF => "replace_f",
        }
    }

    /// The move on any group-like values, e.g. matrices or words.
    pub fn transform<G: GroupLike>(self, u: &G, v: &G) -> (G, G) {
        match self {
            NielsenMove::Swap => (v.clone(), u.clone()),
            NielsenMove::InvertFirst => (u.inv(), v.clone()),
            NielsenMove::InvertSecond => (u.clone(), v.inv()),
            NielsenMove::MulRight => (u.clone(), v.op(u)),
            NielsenMove::MulRightInv => (u.clone(), v.op(&u.inv())),
            NielsenMove::MulLeft => (u.clone(), u.op(v)),
            NielsenMove::MulLeftInv | NielsenMove::ReplaceE => (u.clone(), u.inv().op(v)),
            NielsenMove::PermuteB => (u.inv(), u.op(v)),
            NielsenMove::PermuteC => (u.op(v), v.inv()),
            NielsenMove::ReplaceF => (u.op(&v.inv()), v.clone()),
        }
    }

    /// The effect of the move on a bare trace triple.
    pub fn apply_triple<T: Real>(self, t: &TraceTriple<T>) -> TraceTriple<T> {
        let TraceTriple { x, y, z } = t;
        let xy_z = || x.mul_ref(y).sub_ref(z);
        let xz_y = || x.mul_ref(z).sub_ref(y);
        let (x2, y2, z2) = match self {
            NielsenMove::Swap => (y.clone(), x.clone(), z.clone()),
            NielsenMove::InvertFirst | NielsenMove::InvertSecond => (x.clone(), y.clone(), xy_z()),
            NielsenMove::MulRight | NielsenMove::MulLeft => (x.clone(), z.clone(), xz_y()),
            NielsenMove::MulRightInv | NielsenMove::MulLeftInv | NielsenMove::ReplaceE => {
                (x.clone(), xy_z(), y.clone())
            }
            NielsenMove::PermuteB => (x.clone(), z.clone(), y.clone()),
            NielsenMove::PermuteC => (z.clone(), y.clone(), x.clone()),
            NielsenMove::ReplaceF => (xy_z(), y.clone(), x.clone()),
        };
        TraceTriple::new(x2, y2, z2)
    }
}

impl fmt::Display for NielsenMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NielsenMove {
    type Err = UnknownMove;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMove(s.to_string()))
    }
}

/// Values Nielsen moves can act on.
pub trait GroupLike: Clone {
    fn op(&self, rhs: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl GroupLike for Matrix2 {
    fn op(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
}

impl GroupLike for Word {
    fn op(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn inv(&self) -> Self {
        self.inverse()
    }
}

/// `(tr U, tr V, tr UV)` for a pair `(U, V)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceTriple<T = Scalar> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> TraceTriple<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [&T; 3] {
        [&self.x, &self.y, &self.z]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> TraceTriple<U> {
        TraceTriple::new(f(&self.x), f(&self.y), f(&self.z))
    }
}

impl TraceTriple<Scalar> {
    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        Self::new(x.into(), y.into(), z.into())
    }
}

impl<T: Real> TraceTriple<T> {
    /// `x^2 + y^2 + z^2 - xyz - 2`.
    pub fn commutator_trace(&self) -> T {
        crate::psl2::commutator_trace_from(&self.x, &self.y, &self.z)
    }
}

impl<T: fmt::Display> fmt::Display for TraceTriple<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

impl<T: fmt::Display> Serialize for TraceTriple<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.x.to_string(), self.y.to_string(), self.z.to_string()].serialize(serializer)
    }
}

impl<'de, T> Deserialize<'de> for TraceTriple<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[String; 3]>::deserialize(deserializer)?;
        let p = |s: &str| s.parse::<T>().map_err(serde::de::Error::custom);
        Ok(Self::new(p(&x)?, p(&y)?, p(&z)?))
    }
}

/// Pair-literal trace triple.
pub fn triple_of(pair: &GeneratorPair) -> TraceTriple {
    let [x, y, z] = pair.traces();
    TraceTriple::new(x, y, z)
}

/// Applies `mv` to the matrices and words of `pair`.
///
/// Panics if the recomputed triple disagrees with the move table; that
/// would be a bug in this module, not a property of the input.
pub fn apply_move(pair: &GeneratorPair, mv: NielsenMove) -> GeneratorPair {
    let predicted = mv.apply_triple(&triple_of(pair));
    let (u, v) = mv.transform(pair.first(), pair.second());
    let [wu, wv] = pair.words();
    let (wu, wv) = mv.transform(wu, wv);
    let next = GeneratorPair::from_parts(u, v, [wu, wv]).expect("moves stay in one field");
    assert_eq!(triple_of(&next), predicted, "trace table mismatch for {mv}");
    next
}

/// One logged move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: fmt::Display",
    deserialize = "T: FromStr, T::Err: fmt::Display"
))]
pub struct LogEntry<T = Scalar> {
    pub step: usize,
    #[serde(rename = "move")]
    pub mv: NielsenMove,
    pub before: TraceTriple<T>,
    #[serde(rename = "triple")]
    pub after: TraceTriple<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<[Word; 2]>,
}

/// The ordered record of moves taken by a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: fmt::Display",
    deserialize = "T: FromStr, T::Err: fmt::Display"
))]
#[serde(transparent)]
pub struct MoveLog<T = Scalar> {
    entries: Vec<LogEntry<T>>,
}

impl<T> Default for MoveLog<T> {
    fn default() -> Self {
        Self { entries: Vec::new() }
    }
}

impl<T> MoveLog<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, mv: NielsenMove, before: TraceTriple<T>, after: TraceTriple<T>, words: Option<[Word; 2]>) {
        let step = self.entries.len() + 1;
        self.entries.push(LogEntry {
            step,
            mv,
            before,
            after,
            words,
        });
    }

    pub fn entries(&self) -> &[LogEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn moves(&self) -> impl Iterator<Item = NielsenMove> + '_ {
        self.entries.iter().map(|e| e.mv)
    }
}

impl<T: fmt::Display> MoveLog<T> {
    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("log entries serialize") + "\n")
            .collect()
    }
}

impl MoveLog<Scalar> {
    /// Replays every move on `initial`, checking each logged triple.
    pub fn replay(&self, initial: &GeneratorPair) -> Result<GeneratorPair, ReplayError> {
        let mut pair = initial.clone();
        for e in &self.entries {
            if triple_of(&pair) != e.before {
                return Err(ReplayError { step: e.step });
            }
            pair = apply_move(&pair, e.mv);
            if triple_of(&pair) != e.after || e.words.as_ref().is_some_and(|w| w != pair.words()) {
                return Err(ReplayError { step: e.step });
            }
        }
        Ok(pair)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("replay diverges from the log at step {step}")]
pub struct ReplayError {
    pub step: usize,
}
