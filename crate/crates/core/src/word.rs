//! Freely reduced words in the generators `a`, `b` and their inverses `A`, `B`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid word {0:?}: letters must be a, A, b or B")]
pub struct WordError(pub String);

/// A reduced word; the empty word prints as `1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

fn inverse_letter(c: u8) -> u8 {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn a() -> Self {
        Self(vec![b'a'])
    }

    pub fn b() -> Self {
        Self(vec![b'b'])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|&c| inverse_letter(c)).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.0.clone();
        for &c in &rhs.0 {
            if out.last() == Some(&inverse_letter(c)) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        Self(out)
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.0.iter().map(|&c| c as char)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(std::str::from_utf8(&self.0).expect("ascii letters"))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Self::identity());
        }
        let mut w = Self::identity();
        for c in s.bytes() {
            if !matches!(c, b'a' | b'A' | b'b' | b'B') {
                return Err(WordError(s.to_string()));
            }
            w = w.mul(&Self(vec![c]));
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
