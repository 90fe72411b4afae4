use std::fs;

use fuchsian_roots::decide::{
    is_free_rank2, minimization_witness, parabolic_root_check, parabolic_root_check_pair, rational_power_decide,
    root_check_negative_tau, root_check_positive_tau, DecideError, DecideOptions, RootSpec, Verdict, VerdictValue,
    Witness,
};
use fuchsian_roots::psl2::{commutator_trace, GeneratorPair, Matrix2};
use fuchsian_roots::scalar::{FloatContext, Scalar};
use fuchsian_roots::tracemin::{trace_minimize, CaseTag, TraceMinError, TraceMinOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Classify,
    TraceMin,
    RootCheck,
    RationalPower,
    ParabolicCheck,
}

/// A matrix as `[[a, b], [c, d]]` (strings or numbers), a JSON text of that
/// shape, or `@path` naming a file holding one.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Rows(Vec<Vec<Value>>),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ExponentInput {
    Int(u64),
    Text(String),
}

impl ExponentInput {
    fn text(&self) -> String {
        match self {
            ExponentInput::Int(n) => n.to_string(),
            ExponentInput::Text(s) => s.clone(),
        }
    }
}

/// One decision request, as given on the command line or as a batch line.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub command: CommandKind,
    #[serde(rename = "A", default)]
    pub a: Option<MatrixInput>,
    #[serde(rename = "B", default)]
    pub b: Option<MatrixInput>,
    #[serde(rename = "R", default)]
    pub r: Option<MatrixInput>,
    #[serde(rename = "S", default)]
    pub s: Option<MatrixInput>,
    #[serde(default)]
    pub m: Option<ExponentInput>,
    #[serde(default)]
    pub n: Option<ExponentInput>,
    #[serde(default)]
    pub log: Option<bool>,
    #[serde(default)]
    pub precision: Option<usize>,
    #[serde(default)]
    pub tolerance: Option<u32>,
    #[serde(default)]
    pub max_iterations: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub precision: usize,
    pub tolerance: u32,
    pub max_iterations: u64,
    pub log: bool,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Precondition(String),
    Ambiguous(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Ambiguous(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Precondition(m) | Failure::Ambiguous(m) => m,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Failure::Ambiguous(m) => json!({
                "verdict": "AMBIGUOUS",
                "reason": "boundary_tolerance",
                "message": m,
            }),
            Failure::Input(m) => json!({"error": "input", "message": m}),
            Failure::Precondition(m) => json!({"error": "precondition", "message": m}),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::TraceMin(t) => t.into(),
            DecideError::Exponent(_) => Failure::Input(e.to_string()),
            e if e.is_precondition() => Failure::Precondition(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<TraceMinError> for Failure {
    fn from(e: TraceMinError) -> Self {
        match e {
            TraceMinError::Ambiguous { .. } => Failure::Ambiguous(e.to_string()),
            e => Failure::Precondition(e.to_string()),
        }
    }
}

pub enum Report {
    Verdict(Verdict),
    TraceMin {
        case: CaseTag,
        bounds: bool,
        witness: Witness,
    },
}

impl Report {
    pub fn code(&self) -> u8 {
        match self {
            Report::Verdict(v) if v.value == VerdictValue::Ambiguous => 3,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Report::Verdict(v) => serde_json::to_value(v).expect("verdicts serialize"),
            Report::TraceMin { case, bounds, witness } => json!({
                "case": case,
                "satisfies_bounds": bounds,
                "witness": witness,
            }),
        }
    }

    fn witness_mut(&mut self) -> &mut Witness {
        match self {
            Report::Verdict(v) => &mut v.witness,
            Report::TraceMin { witness, .. } => witness,
        }
    }
}

pub fn read_matrix(input: &MatrixInput, name: &str) -> Result<Matrix2, Failure> {
    let bad = |msg: String| Failure::Input(format!("matrix {name}: {msg}"));
    let rows = match input {
        MatrixInput::Rows(rows) => rows.clone(),
        MatrixInput::Text(text) => {
            let body = match text.strip_prefix('@') {
                Some(path) => fs::read_to_string(path).map_err(|e| bad(format!("{path}: {e}")))?,
                None => text.clone(),
            };
            serde_json::from_str::<Vec<Vec<Value>>>(&body).map_err(|e| bad(e.to_string()))?
        }
    };
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(bad("expected [[a, b], [c, d]]".into()));
    }
    let mut entries = Vec::with_capacity(4);
    for v in rows.iter().flatten() {
        entries.push(match v {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            other => return Err(bad(format!("entry {other} is not an integer or a string"))),
        });
    }
    Matrix2::parse([&entries[0], &entries[1], &entries[2], &entries[3]]).map_err(|e| bad(e.to_string()))
}

fn required<'a, T>(field: &'a Option<T>, name: &str, command: CommandKind) -> Result<&'a T, Failure> {
    field.as_ref().ok_or_else(|| {
        Failure::Input(format!(
            "{} requires {name}",
            serde_json::to_value(command).expect("unit variant").as_str().unwrap_or_default()
        ))
    })
}

fn pair(a: &Matrix2, b: &Matrix2) -> Result<GeneratorPair, Failure> {
    GeneratorPair::new(a, b).map_err(|e| Failure::Input(e.to_string()))
}

fn integer_exponent(e: &ExponentInput, name: &str) -> Result<u32, Failure> {
    let text = e.text();
    match text.trim().parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Failure::Input(format!("{name} = {text:?} is not a positive integer"))),
    }
}

impl Request {
    fn options(&self, settings: &Settings) -> Result<(DecideOptions, bool), Failure> {
        let precision = self.precision.unwrap_or(settings.precision);
        let tolerance = self.tolerance.unwrap_or(settings.tolerance);
        let float = FloatContext::new(precision, tolerance).map_err(|e| Failure::Input(e.to_string()))?;
        let options = DecideOptions {
            float,
            max_iterations: self.max_iterations.unwrap_or(settings.max_iterations),
        };
        Ok((options, self.log.unwrap_or(settings.log)))
    }

    fn pair(&self) -> Result<GeneratorPair, Failure> {
        let a = read_matrix(required(&self.a, "--A", self.command)?, "A")?;
        let b = read_matrix(required(&self.b, "--B", self.command)?, "B")?;
        pair(&a, &b)
    }

    fn exponents(&self) -> Result<(&ExponentInput, &ExponentInput), Failure> {
        Ok((required(&self.m, "--m", self.command)?, required(&self.n, "--n", self.command)?))
    }

    /// Runs the request. Without logging the move log is dropped from the
    /// witness; the step sequence stays.
    pub fn run(&self, settings: &Settings) -> Result<Report, Failure> {
        let (options, log) = self.options(settings)?;
        let mut report = match self.command {
            CommandKind::Classify => Report::Verdict(is_free_rank2(&self.pair()?, &options)?),
            CommandKind::TraceMin => {
                let pair = self.pair()?;
                let r = trace_minimize(
                    &pair,
                    TraceMinOptions {
                        max_iterations: options.max_iterations,
                        abort_on_elliptic: false,
                    },
                )?;
                Report::TraceMin {
                    case: r.case_tag,
                    bounds: r.satisfies_theorem_bounds(),
                    witness: minimization_witness(&commutator_trace(&pair), &r),
                }
            }
            CommandKind::RootCheck => Report::Verdict(self.root_check(&options)?),
            CommandKind::RationalPower => {
                let (m, n) = self.exponents()?;
                let spec = RootSpec::parse(&m.text(), &n.text())?;
                Report::Verdict(rational_power_decide(&self.pair()?, &spec, &options)?)
            }
            CommandKind::ParabolicCheck => {
                let (m, n) = self.exponents()?;
                let (m, n) = (integer_exponent(m, "m")?, integer_exponent(n, "n")?);
                match (&self.a, &self.b) {
                    (None, None) => Report::Verdict(parabolic_root_check(m, n)?),
                    _ => Report::Verdict(parabolic_root_check_pair(&self.pair()?, m, n, &options)?),
                }
            }
        };
        if !log {
            let w = report.witness_mut();
            w.log.clear();
            w.marks.clear();
        }
        Ok(report)
    }

    /// Integer roots `R^m = A`, `S^n = B`. For `tau <= -2` the traces
    /// suffice; for `tau > 2` the roots are minimized when given, otherwise
    /// their product trace is derived from `A`, `B`.
    fn root_check(&self, options: &DecideOptions) -> Result<Verdict, Failure> {
        let (m, n) = self.exponents()?;
        let (m, n) = (integer_exponent(m, "m")?, integer_exponent(n, "n")?);
        let pair = self.pair()?;
        let roots = match (&self.r, &self.s) {
            (None, None) => None,
            (Some(r), Some(s)) => {
                let r = read_matrix(r, "R")?;
                let s = read_matrix(s, "S")?;
                if !r.pow(m as i64).projectively_eq(pair.first()) {
                    return Err(Failure::Input(format!("R^{m} is not A")));
                }
                if !s.pow(n as i64).projectively_eq(pair.second()) {
                    return Err(Failure::Input(format!("S^{n} is not B")));
                }
                Some(self::pair(&r, &s)?)
            }
            _ => return Err(Failure::Input("--R and --S go together".into())),
        };
        let tau = commutator_trace(&pair);
        let two = Scalar::from_integer(2);
        if tau == two {
            return Err(DecideError::Metabelian.into());
        }
        if tau <= -&two {
            let [tr_a, tr_b, _] = pair.traces();
            return Ok(root_check_negative_tau(&tr_a, &tr_b, &tau, m, n, options)?);
        }
        if tau < two {
            return Err(DecideError::TauGap(tau.to_string()).into());
        }
        Ok(match roots {
            Some(roots) => root_check_positive_tau(&roots, options)?,
            None => rational_power_decide(&pair, &RootSpec::integers(m, n)?, options)?,
        })
    }
}
