mod common;

use common::*;
use fuchsian_roots::chebyshev::s_eval;
use fuchsian_roots::decide::{
    is_free_rank2, rational_power_decide, rational_power_run, DecideError, DecideOptions, RationalBranch, RootSpec,
    VerdictValue,
};
use fuchsian_roots::nielsen::{apply_move, triple_of, NielsenMove};
use fuchsian_roots::psl2::{commutator_trace, GeneratorPair};
use fuchsian_roots::scalar::Scalar;
use fuchsian_roots::tracemin::{trace_minimize, CaseTag, TraceMinOptions};
use fuchsian_roots::word::Word;
use proptest::prelude::*;

fn powered(r: &GeneratorPair, m: u32, n: u32) -> GeneratorPair {
    GeneratorPair::new(&r.first().pow(m as i64), &r.second().pow(n as i64)).unwrap()
}

fn max3(t: &[Scalar; 3]) -> Scalar {
    t.iter().cloned().fold(t[0].clone(), |a, b| if b > a { b } else { a })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // tau(A,B) - 2 = S_m(x)^2 S_n(y)^2 (tau(R,S) - 2), so for tau(A,B) <= -2
    // the inequality holds exactly when tau(R,S) <= -2.
    #[test]
    fn negative_tau_roots_match_the_root_commutator(
        x in 3i64..9, y in 3i64..9, z in -6i64..40, m in 1u32..4, n in 1u32..4,
    ) {
        let roots = match GeneratorPair::from_traces(&int(x), &int(y), &int(z)) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let tau_rs = commutator_trace(&roots);
        let pair = powered(&roots, m, n);
        let tau = commutator_trace(&pair);
        prop_assume!(tau <= int(-2));
        let expected = (tau - int(2)) == (s_eval(m as i64, &int(x)) * s_eval(n as i64, &int(y))).pow(2) * (&tau_rs - &int(2));
        prop_assert!(expected);
        let v = rational_power_decide(&pair, &RootSpec::integers(m, n).unwrap(), &DecideOptions::default()).unwrap();
        prop_assert_eq!(v.value, VerdictValue::from_bool(tau_rs <= int(-2)));
    }

    #[test]
    fn positive_tau_roots_recover_the_product_trace(
        x in 3i64..8, y in 3i64..8, z in 0i64..6, m in 1u32..4, n in 1u32..4,
    ) {
        let roots = match GeneratorPair::from_traces(&int(x), &int(y), &int(z)) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let tau_rs = commutator_trace(&roots);
        prop_assume!(tau_rs > int(2));
        let pair = powered(&roots, m, n);
        let options = DecideOptions::default();
        let run = match rational_power_run(&pair, &RootSpec::integers(m, n).unwrap(), &options) {
            Err(DecideError::TauGap(_)) => return Ok(()),
            other => other.unwrap(),
        };
        let RationalBranch::Exact { z: found, .. } = &run.branch else {
            return Err(TestCaseError::fail("integer root traces were not recognised"));
        };
        prop_assert_eq!(found, &int(z));
        if tau_rs >= int(18) {
            let direct = is_free_rank2(&roots, &options).unwrap();
            let via_powers = rational_power_decide(&pair, &RootSpec::integers(m, n).unwrap(), &options).unwrap();
            prop_assert_eq!(direct.value, via_powers.value);
        }
    }

    #[test]
    fn minimization_is_monotone_and_replayable(
        x in 3i64..7, y in 3i64..7, z in 3i64..7, moves in prop::collection::vec(0usize..11, 0..6),
    ) {
        let start = GeneratorPair::from_traces(&int(x), &int(y), &int(z)).unwrap();
        let pair = moves.iter().fold(start, |p, &i| apply_move(&p, NielsenMove::ALL[i]));
        let tau = commutator_trace(&pair);
        prop_assume!(tau < int(2));
        let r = trace_minimize(&pair, TraceMinOptions::default()).unwrap();
        prop_assert_eq!(r.case_tag, CaseTag::TauLt2);
        prop_assert!(r.satisfies_theorem_bounds());
        let maxima: Vec<Scalar> = r.sequence.iter().map(|t| max3(&[t.x.clone(), t.y.clone(), t.z.clone()])).collect();
        for w in maxima.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        for e in r.log.entries() {
            prop_assert_eq!(e.after.commutator_trace(), tau.clone());
        }
        let replayed = r.log.replay(&r.initial_pair).unwrap();
        prop_assert_eq!(triple_of(&replayed), r.final_triple.clone());
        prop_assert_eq!(replayed.words(), r.final_pair.words());
    }
}

#[test]
fn log_lines_round_trip() {
    let r = trace_minimize(&first_example(), TraceMinOptions::default()).unwrap();
    let lines = r.log.to_json_lines();
    assert_eq!(lines.lines().count(), r.log.len());
    for (line, entry) in lines.lines().zip(r.log.entries()) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let triple: Vec<String> = serde_json::from_value(v["triple"].clone()).unwrap();
        assert_eq!(triple, entry.after.as_array().map(|s| s.to_string()));
        let words: Vec<Word> = serde_json::from_value(v["words"].clone()).unwrap();
        assert_eq!(words.len(), 2);
    }
}

#[test]
fn final_words_evaluate_to_final_matrices() {
    let r = trace_minimize(&second_example(), TraceMinOptions::default()).unwrap();
    let (a, b) = (r.initial_pair.first().clone(), r.initial_pair.second().clone());
    let eval = |w: &Word| {
        w.letters().fold(fuchsian_roots::psl2::Matrix2::identity(), |acc, l| {
            let g = match l {
                'a' => a.clone(),
                'A' => a.inverse(),
                'b' => b.clone(),
                _ => b.inverse(),
            };
            &acc * &g
        })
    };
    let [u, v] = r.final_pair.words();
    assert!(eval(u).projectively_eq(r.final_pair.first()));
    assert!(eval(v).projectively_eq(r.final_pair.second()));
}
