use std::fmt::Write;

use fuchsian_roots::decide::Witness;
use fuchsian_roots::nielsen::{LogEntry, TraceTriple};

use crate::request::Report;

pub fn text(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Verdict(v) => {
            steps(&mut out, &v.witness);
            writeln!(out, "verdict: {}", v.value).unwrap();
            writeln!(out, "reason: {}", v.reason).unwrap();
            fields(&mut out, &v.witness);
        }
        Report::TraceMin { case, bounds, witness } => {
            steps(&mut out, witness);
            let case = serde_json::to_value(case).expect("unit variant");
            writeln!(out, "case: {}", case.as_str().unwrap_or_default()).unwrap();
            writeln!(out, "bounds hold: {bounds}").unwrap();
            fields(&mut out, witness);
        }
    }
    out
}

fn move_line(out: &mut String, e: &LogEntry<String>) {
    write!(out, "    {}: {} -> {}", e.mv, e.before, e.after).unwrap();
    if let Some([u, v]) = &e.words {
        write!(out, "  U = {u}, V = {v}").unwrap();
    }
    out.push('\n');
}

/// Numbered steps: (1) tau, (2) the normalized triple, (4) each reduction,
/// (5) the end of the loop. Moves are listed under the step they belong to
/// when the log was kept.
fn steps(out: &mut String, w: &Witness) {
    if w.sequence.is_empty() {
        return;
    }
    if let Some(tau) = &w.tau {
        writeln!(out, "(1) tau = {tau}").unwrap();
    }
    let with_moves = w.marks.len() == w.sequence.len();
    let mut done = 0;
    for (k, t) in w.sequence.iter().enumerate() {
        if with_moves {
            for e in &w.log[done..w.marks[k]] {
                move_line(out, e);
            }
            done = w.marks[k];
        }
        writeln!(out, "({}) triple {t}", if k == 0 { 2 } else { 4 }).unwrap();
    }
    let last = w.sequence.last().expect("non-empty");
    match &w.final_triple {
        Some(f) if with_moves && done < w.log.len() => {
            for e in &w.log[done..] {
                move_line(out, e);
            }
            writeln!(out, "(5) return {f}").unwrap();
        }
        Some(f) if f != last => writeln!(out, "(5) return {f}").unwrap(),
        _ => writeln!(out, "(5) stop at {last}").unwrap(),
    }
}

fn fields(out: &mut String, w: &Witness) {
    let mut line = |k: &str, v: &dyn std::fmt::Display| writeln!(out, "{k}: {v}").unwrap();
    if w.sequence.is_empty() {
        if let Some(tau) = &w.tau {
            line("tau", tau);
        }
    }
    if let Some([x, y]) = &w.root_traces {
        line("root traces", &format!("{x}, {y}"));
    }
    if let Some(z) = &w.z {
        line("z", z);
    }
    if let (Some(l), Some(r)) = (&w.lhs, &w.rhs) {
        line("lhs", l);
        line("rhs", r);
    }
    if let Some(p) = &w.product_trace {
        line("product trace", p);
    }
    if let Some(e) = &w.elliptic_trace {
        line("elliptic trace", e);
    }
    if let Some(t) = &w.final_triple {
        line("final triple", t as &TraceTriple<String>);
    }
    if let Some([u, v]) = &w.final_words {
        line("final words", &format!("U = {u}, V = {v}"));
    }
    if let Some([u, v]) = &w.final_pair {
        line("final pair", &format!("U = {u}, V = {v}"));
    }
    if let Some(i) = w.iterations {
        line("iterations", &i);
    }
    if let (Some(p), Some(k)) = (w.precision, w.tolerance_bits) {
        line("float", &format!("{p} bits, tolerance 2^-{k}"));
    }
}
