//! Trace minimization: repeatedly replace the largest entry `z` of a sorted
//! trace triple by `xy - z` until the triple is minimal, tracking the
//! Nielsen moves that realize each step.
//!
//! [`trace_minimize`] works on exact generator pairs. [`minimize_triple`]
//! runs the same loop on bare triples over any [`Real`] backend, stopping as
//! soon as an elliptic trace appears.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::nielsen::{apply_move, triple_of, MoveLog, NielsenMove, TraceTriple};
use crate::psl2::{commutator_trace, GeneratorPair};
use crate::scalar::{Real, Scalar};

pub const DEFAULT_MAX_ITERATIONS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceMinError {
    #[error("metabelian: tr([A,B]) = 2")]
    Metabelian,
    #[error("commutator trace {0} is not greater than 2")]
    TauNotAbove2(String),
    #[error("no termination within {0} iterations")]
    IterationCap(u64),
    #[error("comparison of {value} with {threshold} is within the float tolerance")]
    Ambiguous { value: String, threshold: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    TauLt2,
    TauGt2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceMinOptions {
    pub max_iterations: u64,
    /// Stop as soon as a trace of absolute value below 2 shows up.
    pub abort_on_elliptic: bool,
}

impl Default for TraceMinOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            abort_on_elliptic: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceMinResult {
    /// The input pair after choosing representatives with non-negative
    /// traces; the log replays from here.
    pub initial_pair: GeneratorPair,
    pub final_pair: GeneratorPair,
    /// Triple of `final_pair`.
    pub final_triple: TraceTriple,
    /// Sorted triples: after the initial normalization and after each
    /// iteration of the loop.
    pub sequence: Vec<TraceTriple>,
    /// Log length at the time each `sequence` entry was recorded.
    pub marks: Vec<usize>,
    pub tau: Scalar,
    pub case_tag: CaseTag,
    pub log: MoveLog,
    pub iterations: u64,
    /// The elliptic trace that stopped the run early, when
    /// [`TraceMinOptions::abort_on_elliptic`] is set.
    pub elliptic: Option<Scalar>,
}

impl TraceMinResult {
    /// For `tau < 2`: `2 < x <= y <= z <= xy/2`. For `tau > 2`: the
    /// returned pair has `0 <= tr U <= tr V` and `tr UV < 0`.
    pub fn satisfies_theorem_bounds(&self) -> bool {
        let t = &self.final_triple;
        let zero = Scalar::zero();
        match self.case_tag {
            CaseTag::TauLt2 => {
                t.x > Scalar::from_integer(2)
                    && t.x <= t.y
                    && t.y <= t.z
                    && &t.z + &t.z <= &t.x * &t.y
            }
            CaseTag::TauGt2 => zero <= t.x && t.x <= t.y && t.z < zero,
        }
    }
}

fn le<T: Real>(a: &T, b: &T) -> bool {
    a.compare(b) != Some(Ordering::Greater)
}

fn lt<T: Real>(a: &T, b: &T) -> bool {
    a.compare(b) == Some(Ordering::Less)
}

/// A triple, optionally with the pair realizing it, plus the move log.
struct Walker<T: Real> {
    triple: TraceTriple<T>,
    pair: Option<GeneratorPair>,
    log: MoveLog<T>,
}

impl<T: Real> Walker<T> {
    fn apply(&mut self, mv: NielsenMove) {
        let before = self.triple.clone();
        self.triple = mv.apply_triple(&before);
        let words = self.pair.as_mut().map(|p| {
            *p = apply_move(p, mv);
            p.words().clone()
        });
        self.log.push(mv, before, self.triple.clone(), words);
    }

    /// Makes `z >= 0` (one inversion), then sorts ascending.
    fn normalize(&mut self) {
        if lt(&self.triple.z, &self.triple.x.int_like(0)) {
            self.apply(NielsenMove::InvertSecond);
        }
        let t = &self.triple;
        if lt(&t.y, &t.x) && le(&t.y, &t.z) {
            self.apply(NielsenMove::Swap);
        } else if lt(&t.z, &t.x) && lt(&t.z, &t.y) {
            self.apply(NielsenMove::PermuteC);
        }
        if lt(&self.triple.z, &self.triple.y) {
            self.apply(NielsenMove::PermuteB);
        }
    }

    /// Replaces `z` by `w = xy - z` and re-sorts, with `w` placed first
    /// among equal entries.
    fn reduce(&mut self) {
        let t = &self.triple;
        let w = t.x.mul_ref(&t.y).sub_ref(&t.z);
        if le(&w, &t.x) {
            // (U, V) -> (VU^-1, U)
            self.apply(NielsenMove::MulRightInv);
            self.apply(NielsenMove::Swap);
        } else if le(&w, &t.y) {
            // (U, V) -> (U^-1, UV^-1)
            self.apply(NielsenMove::InvertSecond);
            self.apply(NielsenMove::PermuteB);
        } else {
            self.apply(NielsenMove::InvertSecond);
        }
    }
}

fn is_elliptic<T: Real>(v: &T) -> Result<bool, TraceMinError> {
    let ambiguous = |threshold| TraceMinError::Ambiguous {
        value: v.to_string(),
        threshold,
    };
    let above = v.compare(&v.int_like(-2)).ok_or_else(|| ambiguous(-2))?;
    let below = v.compare(&v.int_like(2)).ok_or_else(|| ambiguous(2))?;
    Ok(above == Ordering::Greater && below == Ordering::Less)
}

/// Trace minimization of a generator pair with exact entries.
///
/// For `tau > 2` the loop stops once the smallest trace is negative, and the
/// returned pair is `(V', (U'V')^-1)` built from the last pair `(U', V')`, so
/// that its product has negative trace.
pub fn trace_minimize(pair: &GeneratorPair, options: TraceMinOptions) -> Result<TraceMinResult, TraceMinError> {
    let tau = commutator_trace(pair);
    let two = Scalar::from_integer(2);
    let case_tag = match tau.partial_cmp(&two).expect("traces share one field") {
        Ordering::Equal => return Err(TraceMinError::Metabelian),
        Ordering::Less => CaseTag::TauLt2,
        Ordering::Greater => CaseTag::TauGt2,
    };
    let nonneg = |m: &crate::psl2::Matrix2| {
        if m.trace().signum() < 0 {
            m.neg()
        } else {
            m.clone()
        }
    };
    let initial_pair = GeneratorPair::from_parts(
        nonneg(pair.first()),
        nonneg(pair.second()),
        pair.words().clone(),
    )
    .expect("same field as the input");

    let mut walker = Walker {
        triple: triple_of(&initial_pair),
        pair: Some(initial_pair.clone()),
        log: MoveLog::new(),
    };
    let elliptic_in = |t: &TraceTriple| {
        t.as_array()
            .into_iter()
            .find(|v| is_elliptic(*v).expect("exact comparison"))
            .cloned()
    };
    let mut elliptic = None;
    if options.abort_on_elliptic {
        elliptic = elliptic_in(&walker.triple);
    }
    if elliptic.is_none() {
        walker.normalize();
    }
    let mut sequence = vec![walker.triple.clone()];
    let mut marks = vec![walker.log.len()];
    let mut iterations = 0;
    while elliptic.is_none() {
        let t = &walker.triple;
        let go = match case_tag {
            CaseTag::TauLt2 => &t.z + &t.z > &t.x * &t.y,
            CaseTag::TauGt2 => t.x.signum() >= 0,
        };
        if !go {
            break;
        }
        if iterations == options.max_iterations {
            return Err(TraceMinError::IterationCap(options.max_iterations));
        }
        walker.reduce();
        iterations += 1;
        sequence.push(walker.triple.clone());
        marks.push(walker.log.len());
        if options.abort_on_elliptic {
            elliptic = elliptic_in(&walker.triple);
        }
    }

    if elliptic.is_none() && case_tag == CaseTag::TauGt2 {
        // (U, V) -> (UV, V^-1) -> (V^-1, UV) -> (V, UV) -> (V, (UV)^-1)
        for mv in [
            NielsenMove::PermuteC,
            NielsenMove::Swap,
            NielsenMove::InvertFirst,
            NielsenMove::InvertSecond,
        ] {
            walker.apply(mv);
        }
    }

    let final_pair = walker.pair.take().expect("pair mode");
    let final_triple = walker.triple;
    assert_eq!(triple_of(&final_pair), final_triple);
    assert_eq!(commutator_trace(&final_pair), tau);
    let result = TraceMinResult {
        initial_pair,
        final_pair,
        final_triple,
        sequence,
        marks,
        tau,
        case_tag,
        log: walker.log,
        iterations,
        elliptic,
    };
    if result.elliptic.is_none() {
        let t = &result.final_triple;
        match case_tag {
            CaseTag::TauLt2 => assert!(t.x <= t.y && t.y <= t.z && &t.z + &t.z <= &t.x * &t.y),
            CaseTag::TauGt2 => {
                assert!(t.x.signum() >= 0 && t.x <= t.y && t.z.signum() < 0);
                assert!(result.final_pair.product().trace().signum() < 0);
            }
        }
    }
    Ok(result)
}

/// Outcome of [`minimize_triple`].
#[derive(Debug, Clone, PartialEq)]
pub enum TripleVerdict<T> {
    /// The smallest entry reached `<= -2`.
    Free,
    /// An entry with absolute value below 2 appeared.
    Elliptic { trace: T },
    /// A threshold comparison fell within the float tolerance.
    Ambiguous { value: T, threshold: i64 },
}

#[derive(Debug, Clone)]
pub struct TripleRun<T = Scalar> {
    pub initial: TraceTriple<T>,
    pub tau: T,
    pub sequence: Vec<TraceTriple<T>>,
    /// Log length at the time each `sequence` entry was recorded.
    pub marks: Vec<usize>,
    pub final_triple: TraceTriple<T>,
    pub log: MoveLog<T>,
    pub iterations: u64,
    pub verdict: TripleVerdict<T>,
}

/// The minimization loop on a bare triple with commutator trace above 2.
///
/// Entries with absolute value below 2 give [`TripleVerdict::Elliptic`],
/// both in the input and after every replacement. The run succeeds when
/// the smallest entry drops to `-2` or below.
pub fn minimize_triple<T: Real>(triple: TraceTriple<T>, max_iterations: u64) -> Result<TripleRun<T>, TraceMinError> {
    let tau = triple.commutator_trace();
    match tau.compare(&tau.int_like(2)) {
        None => {
            return Err(TraceMinError::Ambiguous {
                value: tau.to_string(),
                threshold: 2,
            })
        }
        Some(Ordering::Greater) => {}
        Some(_) => return Err(TraceMinError::TauNotAbove2(tau.to_string())),
    }
    let mut walker = Walker {
        triple: triple.clone(),
        pair: None,
        log: MoveLog::new(),
    };
    let mut sequence = Vec::new();
    let mut marks = Vec::new();
    let mut iterations = 0;
    let verdict = loop {
        if let Some(v) = check_entries(&walker.triple) {
            break v;
        }
        if sequence.is_empty() {
            walker.normalize();
            sequence.push(walker.triple.clone());
            marks.push(walker.log.len());
        }
        let x = &walker.triple.x;
        match x.compare(&x.int_like(-2)) {
            None => {
                break TripleVerdict::Ambiguous {
                    value: x.clone(),
                    threshold: -2,
                }
            }
            Some(Ordering::Greater) => {}
            Some(_) => break TripleVerdict::Free,
        }
        if iterations == max_iterations {
            return Err(TraceMinError::IterationCap(max_iterations));
        }
        walker.reduce();
        iterations += 1;
        sequence.push(walker.triple.clone());
        marks.push(walker.log.len());
    };
    Ok(TripleRun {
        initial: triple,
        tau,
        final_triple: walker.triple,
        sequence,
        marks,
        log: walker.log,
        iterations,
        verdict,
    })
}

fn check_entries<T: Real>(t: &TraceTriple<T>) -> Option<TripleVerdict<T>> {
    for v in t.as_array() {
        match is_elliptic(v) {
            Ok(true) => return Some(TripleVerdict::Elliptic { trace: v.clone() }),
            Ok(false) => {}
            Err(TraceMinError::Ambiguous { threshold, .. }) => {
                return Some(TripleVerdict::Ambiguous {
                    value: v.clone(),
                    threshold,
                })
            }
            Err(_) => unreachable!(),
        }
    }
    None
}
