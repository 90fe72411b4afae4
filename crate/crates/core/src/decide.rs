//! Decision procedures: whether a pair generates a free Fuchsian group of
//! rank 2, and whether roots (integer or rational) of its generators do.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{power_trace, s_eval, s_generic};
use crate::nielsen::{LogEntry, MoveLog, TraceTriple};
use crate::psl2::{commutator_trace, GeneratorPair, Matrix2};
use crate::scalar::{BigFloat, FloatContext, Real, Scalar};
use crate::tracemin::{
    minimize_triple, trace_minimize, TraceMinError, TraceMinOptions, TraceMinResult, TripleRun, TripleVerdict,
    DEFAULT_MAX_ITERATIONS,
};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("metabelian: tr([A,B]) = 2")]
    Metabelian,
    #[error("elliptic generator: |trace| = {0} is below 2")]
    EllipticGenerator(String),
    #[error("commutator trace {0} lies in (-2, 2), where no root criterion applies")]
    TauGap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid exponent: {0}")]
    Exponent(String),
    #[error(transparent)]
    TraceMin(#[from] TraceMinError),
}

impl DecideError {
    /// Errors that reflect the mathematical situation rather than bad input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            DecideError::Metabelian
                | DecideError::EllipticGenerator(_)
                | DecideError::TauGap(_)
                | DecideError::Precondition(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictValue {
    #[serde(rename = "TRUE")]
    True,
    #[serde(rename = "FALSE")]
    False,
    #[serde(rename = "AMBIGUOUS")]
    Ambiguous,
}

impl VerdictValue {
    pub fn from_bool(b: bool) -> Self {
        if b {
            VerdictValue::True
        } else {
            VerdictValue::False
        }
    }
}

impl fmt::Display for VerdictValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictValue::True => "TRUE",
            VerdictValue::False => "FALSE",
            VerdictValue::Ambiguous => "AMBIGUOUS",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    CaseANegativeTau,
    CaseBMinimized,
    TauInGap,
    EllipticEncountered,
    InequalityCase1,
    ParabolicRule,
    BoundaryTolerance,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().expect("string"))
    }
}

/// A value computed either exactly or in a float context.
#[derive(Debug, Clone)]
pub enum Number {
    Exact(Scalar),
    Float(BigFloat),
}

impl Number {
    pub fn is_exact(&self) -> bool {
        matches!(self, Number::Exact(_))
    }

    pub fn to_float(&self, ctx: &FloatContext) -> BigFloat {
        match self {
            Number::Exact(s) => ctx.from_scalar(s),
            Number::Float(f) => f.clone(),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(s) => s.fmt(f),
            Number::Float(x) => x.fmt(f),
        }
    }
}

/// Evidence behind a verdict. Numbers are strings: canonical scalars in
/// exact mode, decimals in float mode (then `precision` is set).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_pair: Option<[Matrix2; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_pair: Option<[Matrix2; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_words: Option<[Word; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sequence: Vec<TraceTriple<String>>,
    /// Number of `log` entries preceding each `sequence` entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_triple: Option<TraceTriple<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<LogEntry<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_traces: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_trace: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elliptic_trace: Option<String>,
    /// Mantissa bits, present when any value above came from floats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_bits: Option<u32>,
}

impl Witness {
    fn float(&mut self, ctx: &FloatContext) {
        self.precision = Some(ctx.precision);
        self.tolerance_bits = Some(ctx.tolerance_bits);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "verdict")]
    pub value: VerdictValue,
    pub reason: Reason,
    pub witness: Witness,
}

impl Verdict {
    pub fn is_true(&self) -> bool {
        self.value == VerdictValue::True
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    pub float: FloatContext,
    pub max_iterations: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            float: FloatContext::default(),
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

/// Rational exponents `m = p/q`, `n = p'/q'` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSpec {
    pub p: u32,
    pub q: u32,
    pub p_prime: u32,
    pub q_prime: u32,
}

impl RootSpec {
    pub fn new(p: u32, q: u32, p_prime: u32, q_prime: u32) -> Result<Self, DecideError> {
        for (num, den) in [(p, q), (p_prime, q_prime)] {
            if num == 0 || den == 0 {
                return Err(DecideError::Exponent(format!("{num}/{den} is not positive")));
            }
            if num.gcd(&den) != 1 {
                return Err(DecideError::Exponent(format!("{num}/{den} is not in lowest terms")));
            }
        }
        Ok(Self {
            p,
            q,
            p_prime,
            q_prime,
        })
    }

    /// Integer exponents `m`, `n`.
    pub fn integers(m: u32, n: u32) -> Result<Self, DecideError> {
        Self::new(m, 1, n, 1)
    }

    /// Parses `p/q` (or a bare integer) for each exponent.
    pub fn parse(m: &str, n: &str) -> Result<Self, DecideError> {
        let (p, q) = parse_fraction(m)?;
        let (pp, qp) = parse_fraction(n)?;
        Self::new(p, q, pp, qp)
    }
}

fn parse_fraction(text: &str) -> Result<(u32, u32), DecideError> {
    let bad = || DecideError::Exponent(format!("{text:?} is not a positive fraction p/q"));
    let (num, den) = match text.trim().split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), "1"),
    };
    Ok((u32::from_str(num).map_err(|_| bad())?, u32::from_str(den).map_err(|_| bad())?))
}

fn triple_strings<T: fmt::Display>(t: &TraceTriple<T>) -> TraceTriple<String> {
    t.map(|v| v.to_string())
}

fn log_strings<T: fmt::Display>(log: &MoveLog<T>) -> Vec<LogEntry<String>> {
    log.entries()
        .iter()
        .map(|e| LogEntry {
            step: e.step,
            mv: e.mv,
            before: triple_strings(&e.before),
            after: triple_strings(&e.after),
            words: e.words.clone(),
        })
        .collect()
}

/// The witness of a matrix trace minimization.
pub fn minimization_witness(tau: &Scalar, r: &TraceMinResult) -> Witness {
    Witness {
        tau: Some(tau.to_string()),
        initial_pair: Some([r.initial_pair.first().clone(), r.initial_pair.second().clone()]),
        final_pair: Some([r.final_pair.first().clone(), r.final_pair.second().clone()]),
        final_words: Some(r.final_pair.words().clone()),
        sequence: r.sequence.iter().map(triple_strings).collect(),
        marks: r.marks.clone(),
        final_triple: Some(triple_strings(&r.final_triple)),
        log: log_strings(&r.log),
        iterations: Some(r.iterations),
        elliptic_trace: r.elliptic.as_ref().map(|e| e.to_string()),
        ..Witness::default()
    }
}

fn exact_tau(pair: &GeneratorPair) -> Result<Scalar, DecideError> {
    let tau = commutator_trace(pair);
    if tau == Scalar::from_integer(2) {
        return Err(DecideError::Metabelian);
    }
    Ok(tau)
}

/// Minimizes a `tau > 2` pair; TRUE iff the result has `tr U >= 2`,
/// `tr V >= 2` and `tr UV <= -2`.
fn minimized_verdict(pair: &GeneratorPair, tau: &Scalar, options: &DecideOptions) -> Result<Verdict, DecideError> {
    let r = trace_minimize(
        pair,
        TraceMinOptions {
            max_iterations: options.max_iterations,
            abort_on_elliptic: true,
        },
    )?;
    let witness = minimization_witness(tau, &r);
    if r.elliptic.is_some() {
        return Ok(Verdict {
            value: VerdictValue::False,
            reason: Reason::EllipticEncountered,
            witness,
        });
    }
    let two = Scalar::from_integer(2);
    let t = &r.final_triple;
    let free = t.x >= two && t.y >= two && t.z <= -&two;
    Ok(Verdict {
        value: VerdictValue::from_bool(free),
        reason: Reason::CaseBMinimized,
        witness,
    })
}

/// Whether `pair` freely generates a discrete subgroup of rank 2:
/// `tau <= -2`, or `tau >= 18` and the minimized pair has
/// `2 <= tr U <= tr V` and `tr UV <= -2`.
pub fn is_free_rank2(pair: &GeneratorPair, options: &DecideOptions) -> Result<Verdict, DecideError> {
    let tau = exact_tau(pair)?;
    let two = Scalar::from_integer(2);
    if tau <= -&two {
        let r = trace_minimize(
            pair,
            TraceMinOptions {
                max_iterations: options.max_iterations,
                abort_on_elliptic: false,
            },
        )?;
        return Ok(Verdict {
            value: VerdictValue::True,
            reason: Reason::CaseANegativeTau,
            witness: minimization_witness(&tau, &r),
        });
    }
    if tau < Scalar::from_integer(18) {
        return Ok(Verdict {
            value: VerdictValue::False,
            reason: Reason::TauInGap,
            witness: Witness {
                tau: Some(tau.to_string()),
                ..Witness::default()
            },
        });
    }
    minimized_verdict(pair, &tau, options)
}

/// Hyperbolic half-angles and root traces of two generators.
#[derive(Debug, Clone)]
pub struct RootTraceData {
    pub phi1: BigFloat,
    pub phi2: BigFloat,
    /// `2 cosh(phi1 / m)`.
    pub x: BigFloat,
    /// `2 cosh(phi2 / n)`.
    pub y: BigFloat,
    /// `x` as an exact scalar, when it is rational.
    pub x_exact: Option<Scalar>,
    pub y_exact: Option<Scalar>,
}

impl RootTraceData {
    pub fn x_number(&self) -> Number {
        self.x_exact.clone().map_or_else(|| Number::Float(self.x.clone()), Number::Exact)
    }

    pub fn y_number(&self) -> Number {
        self.y_exact.clone().map_or_else(|| Number::Float(self.y.clone()), Number::Exact)
    }
}

fn check_generator_trace(t: &Scalar) -> Result<(), DecideError> {
    if (t - &Scalar::from_integer(2)).signum() < 0 {
        return Err(DecideError::EllipticGenerator(t.to_string()));
    }
    Ok(())
}

/// `(phi, 2 cosh(phi / k), exact root trace)` for a trace `t >= 2`.
fn root_trace(t: &Scalar, k: u32, ctx: &FloatContext) -> (BigFloat, BigFloat, Option<Scalar>) {
    let two = Scalar::from_integer(2);
    if *t == two {
        return (ctx.from_i64(0), ctx.from_i64(2), Some(two));
    }
    let phi = ctx.from_scalar(t).div_int(2).acosh();
    let x = phi.div_int(k as i64).cosh().mul_int(2);
    let exact = recognize_root_trace(t, k, &x);
    let x = exact.as_ref().map_or(x, |e| ctx.from_scalar(e));
    (phi, x, exact)
}

/// A rational `x` with `S_{k+1}(x) - S_{k-1}(x) = t`, searched among the
/// continued fraction convergents of the float approximation.
fn recognize_root_trace(t: &Scalar, k: u32, approx: &BigFloat) -> Option<Scalar> {
    if k == 1 {
        return Some(t.clone());
    }
    let target = approx.to_rational()?;
    let limit = num_bigint::BigInt::from(1u64 << 32);
    let mut rest = target;
    let (mut h0, mut h1) = (num_bigint::BigInt::from(0), num_bigint::BigInt::from(1));
    let (mut k0, mut k1) = (num_bigint::BigInt::from(1), num_bigint::BigInt::from(0));
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h = &a * &h1 + &h0;
        let d = &a * &k1 + &k0;
        if d > limit {
            break;
        }
        for candidate in [BigRational::new(h.clone(), d.clone()), BigRational::new(&h + 1, d.clone())] {
            let c = Scalar::from_rational(candidate);
            if c >= Scalar::from_integer(2) && power_trace(k as i64, &c) == *t {
                return Some(c);
            }
        }
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
        (h0, h1) = (h1, h);
        (k0, k1) = (k1, d);
    }
    None
}

/// Root traces `x = 2 cosh(phi1 / m)`, `y = 2 cosh(phi2 / n)` where
/// `2 cosh(phi_i)` are the given traces.
pub fn root_trace_data(
    tr_a: &Scalar,
    tr_b: &Scalar,
    m: u32,
    n: u32,
    ctx: &FloatContext,
) -> Result<RootTraceData, DecideError> {
    if m == 0 || n == 0 {
        return Err(DecideError::Exponent("root exponents must be positive".into()));
    }
    check_generator_trace(tr_a)?;
    check_generator_trace(tr_b)?;
    let (phi1, x, x_exact) = root_trace(tr_a, m, ctx);
    let (phi2, y, y_exact) = root_trace(tr_b, n, ctx);
    Ok(RootTraceData {
        phi1,
        phi2,
        x,
        y,
        x_exact,
        y_exact,
    })
}

/// Both sides of `S_m(x)^2 S_n(y)^2 <= 1/2 - tau/4`.
#[derive(Debug, Clone)]
pub struct CaseOne {
    pub data: RootTraceData,
    pub lhs: Number,
    pub rhs: Number,
    /// `None` when the sides are within the float tolerance.
    pub holds: Option<bool>,
}

/// Evaluates the negative commutator trace root inequality.
pub fn case_one_inequality(
    tr_a: &Scalar,
    tr_b: &Scalar,
    tau: &Scalar,
    m: u32,
    n: u32,
    ctx: &FloatContext,
) -> Result<CaseOne, DecideError> {
    let data = root_trace_data(tr_a, tr_b, m, n, ctx)?;
    let rhs = Scalar::from_fraction(1, 2) - tau * &Scalar::from_fraction(1, 4);
    if let (Some(x), Some(y)) = (&data.x_exact, &data.y_exact) {
        let lhs = s_eval(m as i64, x).pow(2) * s_eval(n as i64, y).pow(2);
        let holds = lhs.partial_cmp(&rhs).map(|o| o != Ordering::Greater);
        return Ok(CaseOne {
            data,
            lhs: Number::Exact(lhs),
            rhs: Number::Exact(rhs),
            holds,
        });
    }
    let sm = s_generic(m as i64, &data.x);
    let sn = s_generic(n as i64, &data.y);
    let lhs = sm.mul(&sm).mul(&sn).mul(&sn);
    let rhs_f = ctx.from_scalar(&rhs);
    let holds = ctx.compare(&lhs, &rhs_f).map(|o| o != Ordering::Greater);
    Ok(CaseOne {
        data,
        lhs: Number::Float(lhs),
        rhs: Number::Exact(rhs),
        holds,
    })
}

fn case_one_verdict(case: CaseOne, tau: &Scalar, ctx: &FloatContext) -> Verdict {
    let mut witness = Witness {
        tau: Some(tau.to_string()),
        root_traces: Some([case.data.x_number().to_string(), case.data.y_number().to_string()]),
        lhs: Some(case.lhs.to_string()),
        rhs: Some(case.rhs.to_string()),
        ..Witness::default()
    };
    if !(case.lhs.is_exact() && case.data.x_exact.is_some() && case.data.y_exact.is_some()) {
        witness.float(ctx);
    }
    match case.holds {
        Some(h) => Verdict {
            value: VerdictValue::from_bool(h),
            reason: Reason::InequalityCase1,
            witness,
        },
        None => Verdict {
            value: VerdictValue::Ambiguous,
            reason: Reason::BoundaryTolerance,
            witness,
        },
    }
}

/// Roots `R`, `S` with `R^m = A`, `S^n = B` of a pair with `tr([A,B]) <= -2`
/// generate a free Fuchsian group of rank 2 iff
/// `S_m(x)^2 S_n(y)^2 <= 1/2 - tau/4` for their traces `x`, `y`.
pub fn root_check_negative_tau(
    tr_a: &Scalar,
    tr_b: &Scalar,
    tau: &Scalar,
    m: u32,
    n: u32,
    options: &DecideOptions,
) -> Result<Verdict, DecideError> {
    let two = Scalar::from_integer(2);
    if (tau + &two).signum() > 0 {
        return Err(DecideError::Precondition(format!("commutator trace {tau} is not <= -2")));
    }
    for t in [tr_a, tr_b] {
        if (t - &two).signum() <= 0 {
            return Err(DecideError::Precondition(format!("generator trace {t} is not > 2")));
        }
    }
    let case = case_one_inequality(tr_a, tr_b, tau, m, n, &options.float)?;
    Ok(case_one_verdict(case, tau, &options.float))
}

/// Decides a pair of roots `(R, S)` whose commutator trace exceeds 2 by
/// trace minimization. Meaningful when `R`, `S` are roots of generators of a
/// free Fuchsian group of rank 2; that hypothesis is not checked.
pub fn root_check_positive_tau(pair: &GeneratorPair, options: &DecideOptions) -> Result<Verdict, DecideError> {
    let tau = exact_tau(pair)?;
    if tau < Scalar::from_integer(2) {
        return Err(DecideError::Precondition(format!("commutator trace {tau} is not > 2")));
    }
    minimized_verdict(pair, &tau, options)
}

/// For parabolic `A`, `B`, `AB` generating a free Fuchsian group of rank 2,
/// roots `R^m = A`, `S^n = B` do as well iff `m = n = 1`; the witness is
/// `tr(RS) = 2 - 4/(mn)`.
pub fn parabolic_root_check(m: u32, n: u32) -> Result<Verdict, DecideError> {
    if m == 0 || n == 0 {
        return Err(DecideError::Exponent("root exponents must be positive".into()));
    }
    let mn = m as i64 * n as i64;
    let product = Scalar::from_integer(2) - Scalar::from_fraction(4, mn);
    Ok(Verdict {
        value: VerdictValue::from_bool(m == 1 && n == 1),
        reason: Reason::ParabolicRule,
        witness: Witness {
            product_trace: Some(product.to_string()),
            ..Witness::default()
        },
    })
}

/// [`parabolic_root_check`] after verifying its hypotheses on `pair`.
pub fn parabolic_root_check_pair(
    pair: &GeneratorPair,
    m: u32,
    n: u32,
    options: &DecideOptions,
) -> Result<Verdict, DecideError> {
    let two = Scalar::from_integer(2);
    for (name, t) in ["A", "B", "AB"].into_iter().zip(pair.traces()) {
        if t.abs() != two {
            return Err(DecideError::Precondition(format!("{name} has trace {t}, not +-2")));
        }
    }
    let free = is_free_rank2(pair, options)?;
    if !free.is_true() {
        return Err(DecideError::Precondition(
            "the pair does not generate a free Fuchsian group of rank 2".into(),
        ));
    }
    let mut verdict = parabolic_root_check(m, n)?;
    verdict.witness.tau = free.witness.tau;
    Ok(verdict)
}

/// Everything computed by [`rational_power_decide`] before its verdict.
#[derive(Debug, Clone)]
pub struct RationalPowerRun {
    /// `A^q`, `B^q'` on the pair's representatives.
    pub powered: GeneratorPair,
    pub tau: Scalar,
    pub data: RootTraceData,
    pub branch: RationalBranch,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum RationalBranch {
    NegativeTau(CaseOne),
    Exact { z: Scalar, run: TripleRun<Scalar> },
    Float { z: BigFloat, run: TripleRun<BigFloat> },
}

/// Rational powers `R`, `S` with `R^p = A^q`, `S^p' = B^q'` of generators
/// of a free Fuchsian group of rank 2 (assumed, not checked).
///
/// With `tau = tr([A^q, B^q'])`: for `tau <= -2` the negative commutator
/// inequality decides with indices `p`, `p'`. For `tau > 2` the trace of
/// `RS` follows from
/// `z = (tr(A^q B^q') + s_{p+1} t_{p'-1} + s_{p-1} t_{p'+1}) / (s_p t_{p'})`,
/// `s_k = S_k(x)`, `t_k = S_k(y)`, and the triple `(x, y, z)` is minimized.
/// When both root traces are rational the whole branch is exact.
pub fn rational_power_run(
    pair: &GeneratorPair,
    spec: &RootSpec,
    options: &DecideOptions,
) -> Result<RationalPowerRun, DecideError> {
    let ctx = &options.float;
    let a = pair.first().pow(spec.q as i64);
    let b = pair.second().pow(spec.q_prime as i64);
    let words = [pow_word(&pair.words()[0], spec.q), pow_word(&pair.words()[1], spec.q_prime)];
    let powered = GeneratorPair::from_parts(a, b, words).map_err(|e| DecideError::Precondition(e.to_string()))?;
    let tau = exact_tau(&powered)?;
    let [tr_a, tr_b, tr_ab] = powered.traces();
    let data = root_trace_data(&tr_a.abs(), &tr_b.abs(), spec.p, spec.p_prime, ctx)?;
    let two = Scalar::from_integer(2);
    let branch = if tau <= -&two {
        RationalBranch::NegativeTau(case_one_inequality(
            &tr_a.abs(),
            &tr_b.abs(),
            &tau,
            spec.p,
            spec.p_prime,
            ctx,
        )?)
    } else if tau < two {
        return Err(DecideError::TauGap(tau.to_string()));
    } else {
        // Representatives with negative trace flip the sign of tr(AB).
        let sign = tr_a.signum() * tr_b.signum();
        let tr_ab = if sign < 0 { -tr_ab } else { tr_ab };
        let (p, pp) = (spec.p as i64, spec.p_prime as i64);
        match (&data.x_exact, &data.y_exact) {
            (Some(x), Some(y)) => {
                let z = root_product_trace(&tr_ab, x, y, p, pp);
                let run = minimize_triple(TraceTriple::new(x.clone(), y.clone(), z.clone()), options.max_iterations)?;
                RationalBranch::Exact { z, run }
            }
            _ => {
                let z = root_product_trace(&ctx.from_scalar(&tr_ab), &data.x, &data.y, p, pp);
                let run = minimize_triple(
                    TraceTriple::new(data.x.clone(), data.y.clone(), z.clone()),
                    options.max_iterations,
                )?;
                RationalBranch::Float { z, run }
            }
        }
    };
    Ok(RationalPowerRun {
        powered,
        tau,
        data,
        branch,
    })
}

fn pow_word(w: &Word, k: u32) -> Word {
    (0..k).fold(Word::identity(), |acc, _| acc.mul(w))
}

/// `tr(RS)` for roots with traces `x`, `y` of a pair with product trace
/// `tr_ab`.
pub fn root_product_trace<T: Real + RealDiv>(tr_ab: &T, x: &T, y: &T, p: i64, p_prime: i64) -> T {
    let s = |k| s_generic(k, x);
    let t = |k| s_generic(k, y);
    let num = tr_ab
        .add_ref(&s(p + 1).mul_ref(&t(p_prime - 1)))
        .add_ref(&s(p - 1).mul_ref(&t(p_prime + 1)));
    num.div_ref(&s(p).mul_ref(&t(p_prime)))
}

/// Division, for the backends that support it.
pub trait RealDiv {
    fn div_ref(&self, rhs: &Self) -> Self;
}

impl RealDiv for Scalar {
    fn div_ref(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

impl RealDiv for BigFloat {
    fn div_ref(&self, rhs: &Self) -> Self {
        self.div(rhs)
    }
}

fn run_witness<T: Real>(run: &TripleRun<T>, w: &mut Witness) {
    w.sequence = run.sequence.iter().map(triple_strings).collect();
    w.marks = run.marks.clone();
    w.final_triple = Some(triple_strings(&run.final_triple));
    w.log = log_strings(&run.log);
    w.iterations = Some(run.iterations);
}

fn triple_verdict<T: Real>(v: &TripleVerdict<T>, w: &mut Witness) -> (VerdictValue, Reason) {
    match v {
        TripleVerdict::Free => (VerdictValue::True, Reason::CaseBMinimized),
        TripleVerdict::Elliptic { trace } => {
            w.elliptic_trace = Some(trace.to_string());
            (VerdictValue::False, Reason::EllipticEncountered)
        }
        TripleVerdict::Ambiguous { .. } => (VerdictValue::Ambiguous, Reason::BoundaryTolerance),
    }
}

/// The verdict of [`rational_power_run`].
pub fn rational_power_decide(
    pair: &GeneratorPair,
    spec: &RootSpec,
    options: &DecideOptions,
) -> Result<Verdict, DecideError> {
    let run = rational_power_run(pair, spec, options)?;
    Ok(rational_power_verdict(&run, &options.float))
}

pub fn rational_power_verdict(run: &RationalPowerRun, ctx: &FloatContext) -> Verdict {
    match &run.branch {
        RationalBranch::NegativeTau(case) => case_one_verdict(case.clone(), &run.tau, ctx),
        RationalBranch::Exact { z, run: triple } => {
            let mut w = Witness {
                tau: Some(run.tau.to_string()),
                root_traces: Some([run.data.x_number().to_string(), run.data.y_number().to_string()]),
                z: Some(z.to_string()),
                ..Witness::default()
            };
            run_witness(triple, &mut w);
            let (value, reason) = triple_verdict(&triple.verdict, &mut w);
            Verdict {
                value,
                reason,
                witness: w,
            }
        }
        RationalBranch::Float { z, run: triple } => {
            let mut w = Witness {
                tau: Some(run.tau.to_string()),
                root_traces: Some([run.data.x.to_string(), run.data.y.to_string()]),
                z: Some(z.to_string()),
                ..Witness::default()
            };
            w.float(ctx);
            run_witness(triple, &mut w);
            let (value, reason) = triple_verdict(&triple.verdict, &mut w);
            Verdict {
                value,
                reason,
                witness: w,
            }
        }
    }
}
