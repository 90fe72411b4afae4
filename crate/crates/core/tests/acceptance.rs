//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use fuchsian_roots::chebyshev::{s_eval, s_eval_float};
use fuchsian_roots::decide::{
    case_one_inequality, is_free_rank2, parabolic_root_check, rational_power_run, rational_power_verdict,
    root_check_negative_tau, DecideOptions, Number, RationalBranch, Reason, RootSpec, VerdictValue,
};
use fuchsian_roots::nielsen::{apply_move, triple_of};
use fuchsian_roots::psl2::{commutator_trace, commutator_trace_of_powers, power, GeneratorPair, Matrix2};
use fuchsian_roots::scalar::{FloatContext, Scalar};
use fuchsian_roots::tracemin::{trace_minimize, CaseTag, TraceMinOptions};
use fuchsian_roots::word::Word;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn first_run() -> Outcome {
    let pair = first_example();
    ensure!(commutator_trace(&pair) == int(-2), "tau = {}", commutator_trace(&pair));
    let r = trace_minimize(&pair, TraceMinOptions::default()).map_err(|e| e.to_string())?;
    let seq = triple_strings(&r.sequence);
    ensure!(
        seq == ["(6,87,507)", "(6,15,87)", "(3,6,15)", "(3,3,6)", "(3,3,3)"],
        "sequence {seq:?}"
    );
    let options = DecideOptions::default();
    let v = is_free_rank2(&pair, &options).map_err(|e| e.to_string())?;
    ensure!(v.value == VerdictValue::True, "verdict {}", v.value);
    let mut best = Duration::MAX;
    for _ in 0..5 {
        let start = Instant::now();
        is_free_rank2(&pair, &options).map_err(|e| e.to_string())?;
        best = best.min(start.elapsed());
    }
    ensure!(best < Duration::from_millis(10), "classification took {best:?}");
    Ok(format!("tau = -2, five triples, TRUE in {best:?}"))
}

fn second_run() -> Outcome {
    let pair = second_example();
    ensure!(commutator_trace(&pair) == s("177/4"), "tau = {}", commutator_trace(&pair));
    let r = trace_minimize(&pair, TraceMinOptions::default()).map_err(|e| e.to_string())?;
    let seq = triple_strings(&r.sequence);
    ensure!(
        seq == ["(5/2,26,53)", "(5/2,12,26)", "(5/2,4,12)", "(-2,5/2,4)"],
        "sequence {seq:?}"
    );
    ensure!(r.case_tag == CaseTag::TauGt2, "case {:?}", r.case_tag);
    let [u, v, uv] = r.final_pair.traces();
    ensure!(
        u == s("5/2") && v == int(4) && uv == int(-2),
        "returned traces ({u},{v},{uv})"
    );
    let verdict = is_free_rank2(&pair, &DecideOptions::default()).map_err(|e| e.to_string())?;
    ensure!(verdict.value == VerdictValue::True, "verdict {}", verdict.value);
    Ok("tau = 177/4, returned traces (5/2,4,-2), TRUE".into())
}

fn root_example_run() -> Outcome {
    let (a, b, r, s_root) = root_example();
    ensure!(r.pow(2) == a, "R^2 != A");
    ensure!(s_root.pow(3) == b, "S^3 != B");
    let pair = GeneratorPair::new(&a, &b).map_err(|e| e.to_string())?;
    let tau = commutator_trace(&pair);
    ensure!(tau == int(1_137_226_022_466), "tau = {tau}");
    let options = DecideOptions::default();
    let run = rational_power_run(&pair, &RootSpec::integers(2, 3).unwrap(), &options).map_err(|e| e.to_string())?;
    ensure!(
        run.data.x_exact == Some(int(14)) && run.data.y_exact == Some(int(138)),
        "root traces {:?} {:?}",
        run.data.x_exact,
        run.data.y_exact
    );
    let RationalBranch::Exact { z, run: triple } = &run.branch else {
        return Err("the exact branch was not taken".into());
    };
    ensure!(*z == int(10), "z = {z}");
    let seq = triple_strings(&triple.sequence);
    ensure!(
        seq == ["(10,14,138)", "(2,10,14)", "(2,6,10)", "(2,2,6)", "(-2,2,2)"],
        "sequence {seq:?}"
    );
    let v = rational_power_verdict(&run, &options.float);
    ensure!(v.value == VerdictValue::True, "verdict {}", v.value);
    Ok("tau = 1137226022466, x = 14, y = 138, z = 10, TRUE".into())
}

fn power_formula() -> Outcome {
    let mut rng = rng(4);
    for i in 0..200 {
        let g = sl2q(&mut rng);
        let n = rng.gen_range(0..=10);
        let mut direct = Matrix2::identity();
        for _ in 0..n {
            direct = &direct * &g;
        }
        ensure!(g.pow(n) == direct, "case {i}: {g}^{n}");
        ensure!(power(&g.canonical(), n as u32) == direct.canonical(), "case {i}: canonical {g}^{n}");
    }
    Ok("200 of 200 powers agree".into())
}

fn commutator_powers() -> Outcome {
    let direct = |pair: &GeneratorPair, m: i64, n: i64| {
        GeneratorPair::from_parts(pair.first().pow(m), pair.second().pow(n), [Word::a(), Word::b()])
            .unwrap()
            .commutator()
            .trace()
    };
    let ex = first_example();
    let v = commutator_trace_of_powers(&ex, 2, 3);
    ensure!(v == int(-37_088_098) && direct(&ex, 2, 3) == v, "example gives {v}");
    let mut rng = rng(5);
    for i in 0..100 {
        let pair = pair(&mut rng);
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let formula = commutator_trace_of_powers(&pair, m, n);
        ensure!(formula == direct(&pair, m as i64, n as i64), "case {i}: m = {m}, n = {n}");
    }
    Ok("100 of 100 pairs agree, example gives -37088098".into())
}

fn chebyshev_identities() -> Outcome {
    let mut xs = Vec::new();
    for den in 1..=3 {
        for num in (-30..=30).step_by(7) {
            xs.push(Scalar::from_fraction(num, den));
        }
    }
    let one = Scalar::one();
    let mut checks = 0usize;
    for x in &xs {
        for m in 0..=12i64 {
            for n in 0..=12i64 {
                let sum = s_eval(m, x) * s_eval(n + 1, x) - s_eval(m - 1, x) * s_eval(n, x);
                ensure!(s_eval(m + n, x) == sum, "addition at x = {x}, m = {m}, n = {n}");
                let inner = s_eval(n + 1, x) - s_eval(n - 1, x);
                ensure!(
                    s_eval(m * n, x) == s_eval(m, &inner) * s_eval(n, x),
                    "composition at x = {x}, m = {m}, n = {n}"
                );
                checks += 2;
            }
            let cassini = s_eval(m, x).pow(2) - s_eval(m + 1, x) * s_eval(m - 1, x);
            ensure!(cassini == one, "Cassini at x = {x}, n = {m}");
            checks += 1;
        }
    }
    for (p, q) in [(2, 1), (3, 1), (-2, 1), (1, 3), (5, 2), (-7, 3)] {
        let t = Scalar::from_fraction(p, q);
        let x = &t + &(Scalar::one() / t.clone());
        for n in 1..=12i64 {
            let closed = (Scalar::one() - t.pow(2 * n as u32)) / (t.pow(n as u32 - 1) * (Scalar::one() - t.pow(2)));
            ensure!(s_eval(n, &x) == closed, "closed form at t = {t}, n = {n}");
            checks += 1;
        }
    }
    let ctx = FloatContext::default();
    for n in 0..=50i64 {
        ensure!(s_eval(n, &int(2)) == int(n), "S_{n}(2)");
        ensure!(s_eval_float(n, &ctx.from_i64(2)).sub(&ctx.from_i64(n)).signum() == 0, "float S_{n}(2)");
        checks += 2;
    }
    Ok(format!("{checks} exact identity checks"))
}

fn nielsen_invariance() -> Outcome {
    let mut rng = rng(7);
    for i in 0..100 {
        let mut pair = pair(&mut rng);
        let tau = commutator_trace(&pair);
        for step in 0..20 {
            let mv = random_move(&mut rng);
            let predicted = mv.apply_triple(&triple_of(&pair));
            pair = apply_move(&pair, mv);
            ensure!(triple_of(&pair) == predicted, "pair {i}, step {step}: {mv}");
            ensure!(commutator_trace(&pair) == tau, "pair {i}, step {step}: tau changed");
        }
    }
    Ok("100 pairs x 20 moves, tau and triples exact".into())
}

fn uniqueness() -> Outcome {
    let seeds = [
        ("3", "3", "3"),
        ("3", "3", "4"),
        ("3", "4", "5"),
        ("4", "4", "4"),
        ("3", "5", "7"),
        ("5/2", "4", "4"),
        ("4", "5", "9"),
        ("6", "6", "7"),
        ("7/2", "4", "6"),
        ("3", "3", "5"),
    ];
    let mut rng = rng(8);
    for (x, y, z) in seeds {
        let start = GeneratorPair::from_traces(&s(x), &s(y), &s(z)).map_err(|e| e.to_string())?;
        let tau = commutator_trace(&start);
        ensure!(tau < int(2), "({x},{y},{z}) has tau = {tau}");
        let reference = trace_minimize(&start, TraceMinOptions::default())
            .map_err(|e| e.to_string())?
            .final_triple;
        for _ in 0..10 {
            let mut pair = start.clone();
            for _ in 0..rng.gen_range(1..=8) {
                pair = apply_move(&pair, random_move(&mut rng));
            }
            let r = trace_minimize(&pair, TraceMinOptions::default()).map_err(|e| e.to_string())?;
            ensure!(
                r.final_triple == reference,
                "({x},{y},{z}): {} vs {}",
                r.final_triple,
                reference
            );
        }
    }
    Ok("10 pairs x 10 scrambles, one minimal triple each".into())
}

fn case_one_boundary() -> Outcome {
    let options = DecideOptions::default();
    for (a, b) in [(3, 3), (87, 6), (5, 1000)] {
        let case = case_one_inequality(&int(a), &int(b), &int(-2), 1, 1, &options.float).map_err(|e| e.to_string())?;
        let (Number::Exact(lhs), Number::Exact(rhs)) = (&case.lhs, &case.rhs) else {
            return Err("m = n = 1 was not decided exactly".into());
        };
        ensure!(lhs == rhs && *lhs == int(1), "LHS {lhs} vs RHS {rhs}");
        let v = root_check_negative_tau(&int(a), &int(b), &int(-2), 1, 1, &options).map_err(|e| e.to_string())?;
        ensure!(v.value == VerdictValue::True, "m = n = 1 gives {}", v.value);
    }
    let case = case_one_inequality(&int(87), &int(6), &int(-2), 2, 1, &options.float).map_err(|e| e.to_string())?;
    let Number::Float(lhs) = &case.lhs else {
        return Err("expected a float LHS".into());
    };
    let ctx = options.float;
    let err = lhs.sub(&ctx.from_i64(89)).abs();
    ensure!(err.sub(&ctx.pow2(-200)).signum() < 0, "LHS = {lhs}");
    let v = root_check_negative_tau(&int(87), &int(6), &int(-2), 2, 1, &options).map_err(|e| e.to_string())?;
    ensure!(
        v.value == VerdictValue::False && v.reason == Reason::InequalityCase1,
        "verdict {} ({})",
        v.value,
        v.reason
    );
    Ok("equality at tau = -2, LHS(2,1) = 89 within 2^-200, FALSE".into())
}

fn parabolic_rule() -> Outcome {
    let expected = [
        ((1, 1), VerdictValue::True, "-2"),
        ((1, 2), VerdictValue::False, "0"),
        ((2, 1), VerdictValue::False, "0"),
        ((2, 2), VerdictValue::False, "1"),
    ];
    for ((m, n), value, trace) in expected {
        let v = parabolic_root_check(m, n).map_err(|e| e.to_string())?;
        ensure!(v.value == value, "({m},{n}) gives {}", v.value);
        let w = v.witness.product_trace.unwrap_or_default();
        ensure!(w == trace, "({m},{n}) witness {w}");
    }
    Ok("truth table and witness traces -2, 0, 0, 1".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("golden run, first minimization example", first_run),
        ("golden run, second minimization example", second_run),
        ("golden run, square and cube roots example", root_example_run),
        ("power formula oracle", power_formula),
        ("commutator trace of powers oracle", commutator_powers),
        ("Chebyshev identity suite", chebyshev_identities),
        ("Nielsen invariance", nielsen_invariance),
        ("uniqueness of the minimal triple", uniqueness),
        ("negative commutator trace boundary", case_one_boundary),
        ("parabolic rule", parabolic_rule),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    let _ = panic::take_hook();
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
