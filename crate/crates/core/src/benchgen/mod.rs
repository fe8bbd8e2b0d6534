//! Parameterized benchmark families: washing-cycle schedulers, Boolean matrix
//! multiplication (static and dynamic), counters and adders.

pub mod regex;

use thiserror::Error;

use crate::aiger::{AigBuilder, Circuit, Experiment, Literal, MetaInfo, Status};
use crate::arena::{RunRecord, RunVerdict};
use regex::{encode_nfa, glushkov, Pred, Regex};

#[derive(Debug, Error, PartialEq)]
pub enum BenchgenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("conflicting verdicts for {0}")]
    ConflictingVerdicts(String),
}

/// One safety expression of a washing-cycle instance, with the latches of
/// its automaton (positions in the circuit's latch list).
#[derive(Debug, Clone)]
pub struct CycleExpr {
    pub name: String,
    pub regex: Regex,
    pub latches: Vec<usize>,
    pub accepting: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CycleSched {
    pub circuit: Circuit,
    pub exprs: Vec<CycleExpr>,
}

/// Input signal indices of a washing-cycle instance, in declaration order.
pub fn cycle_push(i: usize) -> usize {
    i
}
pub fn cycle_fill(n: usize, i: usize) -> usize {
    n + i
}
pub fn cycle_empty(n: usize, i: usize) -> usize {
    2 * n + i
}
pub fn cycle_light(n: usize) -> usize {
    3 * n
}

fn any_star() -> Regex {
    Regex::star(Regex::letter(Pred::True))
}

fn seq(parts: Vec<Regex>) -> Regex {
    Regex::Concat(parts)
}

/// The expressions A_i, B_i, C_i, C'_i for every tank, then D and E.
pub fn cycle_exprs(n: usize, d: usize, t: usize) -> Vec<(String, Regex)> {
    let k = d;
    let mut out = Vec::new();
    for i in 0..n {
        let push = Pred::sig(cycle_push(i));
        let fill = Pred::sig(cycle_fill(n, i));
        let empty = Pred::sig(cycle_empty(n, i));
        let tank = i + 1;
        out.push((
            format!("A{tank}"),
            seq(vec![
                any_star(),
                Regex::letter(push.clone()),
                Regex::power(Regex::letter(Pred::negate(fill.clone())), d),
            ]),
        ));
        out.push((
            format!("B{tank}"),
            seq(vec![
                any_star(),
                Regex::power(Regex::letter(Pred::negate(push)), d),
                Regex::letter(fill.clone()),
            ]),
        ));
        out.push((
            format!("C{tank}"),
            seq(vec![
                any_star(),
                Regex::letter(fill.clone()),
                Regex::power(Regex::letter(Pred::True), k),
                Regex::letter(Pred::negate(empty.clone())),
            ]),
        ));
        out.push((
            format!("Cp{tank}"),
            seq(vec![
                any_star(),
                Regex::letter(fill),
                Regex::power(Regex::Alt(vec![Regex::letter(Pred::True), Regex::Epsilon]), k - 1),
                Regex::letter(empty),
            ]),
        ));
    }
    let any_fill = Pred::Or((0..n).map(|i| Pred::sig(cycle_fill(n, i))).collect());
    out.push((
        "D".to_string(),
        seq(vec![
            any_star(),
            Regex::letter(Pred::Ne(Box::new(Pred::sig(cycle_light(n))), Box::new(any_fill))),
        ]),
    ));
    let mut clashes = Vec::new();
    for start in (0..n).step_by(t) {
        let pipe: Vec<usize> = (start..(start + t).min(n)).collect();
        for (a, &i) in pipe.iter().enumerate() {
            for &j in &pipe[a + 1..] {
                clashes.push(Pred::And(vec![
                    Pred::sig(cycle_fill(n, i)),
                    Pred::sig(cycle_fill(n, j)),
                ]));
            }
        }
    }
    if !clashes.is_empty() {
        out.push((
            "E".to_string(),
            seq(vec![any_star(), Regex::letter(Pred::Or(clashes))]),
        ));
    }
    out
}

/// Washing-cycle scheduler with `n` tanks, delay `d` and `t` tanks per pipe.
pub fn gen_cycle_sched_with_exprs(n: usize, d: usize, t: usize) -> Result<CycleSched, BenchgenError> {
    if n == 0 || d == 0 || t == 0 || t > n {
        return Err(BenchgenError::InvalidParams(format!(
            "cycle_sched needs n >= 1, d >= 1, 1 <= t <= n (got n={n}, d={d}, t={t})"
        )));
    }
    let mut b = AigBuilder::new();
    let mut sigs = Vec::new();
    for i in 1..=n {
        sigs.push(b.input(format!("push_{i}")));
    }
    for i in 1..=n {
        sigs.push(b.input(format!("controllable_fill_{i}")));
    }
    for i in 1..=n {
        sigs.push(b.input(format!("controllable_empty_{i}")));
    }
    sigs.push(b.input("controllable_light"));
    let boot = b.latch("booted");
    b.set_next(boot, Literal::TRUE);
    let mut next_latch = 1;
    let mut accs = Vec::new();
    let mut exprs = Vec::new();
    for (name, r) in cycle_exprs(n, d, t) {
        let nfa = glushkov(&r);
        let (acc, _) = encode_nfa(&mut b, &nfa, &name, &sigs, boot);
        accs.push(acc);
        exprs.push(CycleExpr {
            name,
            regex: r,
            latches: (next_latch..next_latch + nfa.num_states).collect(),
            accepting: nfa.accepting.iter().map(|q| next_latch + q).collect(),
        });
        next_latch += nfa.num_states;
    }
    let err = b.or_all(accs);
    b.output(err, "err");
    let mut circuit = b.finish();
    circuit.set_meta(&MetaInfo::default());
    Ok(CycleSched { circuit, exprs })
}

pub fn gen_cycle_sched(n: usize, d: usize, t: usize) -> Result<Circuit, BenchgenError> {
    gen_cycle_sched_with_exprs(n, d, t).map(|c| c.circuit)
}

/// Sum-of-products entry `(row · col)` of a Boolean matrix product.
fn dot(b: &mut AigBuilder, row: &[Literal], col: &[Literal]) -> Literal {
    let terms: Vec<Literal> = row.iter().zip(col).map(|(&x, &y)| b.and(x, y)).collect();
    b.or_all(terms)
}

/// `C = A·B` checked combinationally, A m×n and B n×o from the environment.
pub fn gen_mult_matrix(m: usize, n: usize, o: usize) -> Result<Circuit, BenchgenError> {
    if m == 0 || n == 0 || o == 0 {
        return Err(BenchgenError::InvalidParams(format!(
            "matrix dimensions must be positive (got {m}x{n}x{o})"
        )));
    }
    let mut b = AigBuilder::new();
    let a: Vec<Vec<Literal>> = (0..m)
        .map(|i| (0..n).map(|k| b.input(format!("a_{i}_{k}"))).collect())
        .collect();
    let bm: Vec<Vec<Literal>> = (0..n)
        .map(|k| (0..o).map(|j| b.input(format!("b_{k}_{j}"))).collect())
        .collect();
    let c: Vec<Vec<Literal>> = (0..m)
        .map(|i| (0..o).map(|j| b.input(format!("controllable_c_{i}_{j}"))).collect())
        .collect();
    let mut mismatches = Vec::new();
    for i in 0..m {
        for j in 0..o {
            let col: Vec<Literal> = (0..n).map(|k| bm[k][j]).collect();
            let p = dot(&mut b, &a[i], &col);
            mismatches.push(b.xor(c[i][j], p));
        }
    }
    let err = b.or_all(mismatches);
    b.output(err, "err");
    let mut circuit = b.finish();
    circuit.set_meta(&MetaInfo::default());
    Ok(circuit)
}

/// A latched m×n matrix B, starting in the parity pattern, multiplied each
/// step by an n×n matrix A whose first n/2 columns the system picks. The
/// error fires when some row of B is constant.
pub fn gen_mult_matrix_dyn(m: usize, n: usize) -> Result<Circuit, BenchgenError> {
    if m == 0 || n < 2 || !n.is_multiple_of(2) {
        return Err(BenchgenError::InvalidParams(format!(
            "dynamic matrix needs m >= 1 and even n >= 2 (got m={m}, n={n})"
        )));
    }
    let mut b = AigBuilder::new();
    let mut a = vec![vec![Literal::FALSE; n]; n];
    for (k, row) in a.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            if j >= n / 2 {
                *e = b.input(format!("a_{k}_{j}"));
            }
        }
    }
    for (k, row) in a.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate().take(n / 2) {
            *e = b.input(format!("controllable_a_{k}_{j}"));
        }
    }
    let boot = b.latch("booted");
    b.set_next(boot, Literal::TRUE);
    let latches: Vec<Vec<Literal>> = (0..m)
        .map(|i| (0..n).map(|j| b.latch(format!("b_{i}_{j}"))).collect())
        .collect();
    let cur: Vec<Vec<Literal>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let init = if (i + j) % 2 == 0 { Literal::TRUE } else { Literal::FALSE };
                    b.ite(boot, latches[i][j], init)
                })
                .collect()
        })
        .collect();
    for i in 0..m {
        for j in 0..n {
            let col: Vec<Literal> = (0..n).map(|k| a[k][j]).collect();
            let next = dot(&mut b, &cur[i], &col);
            b.set_next(latches[i][j], next);
        }
    }
    let mut bad = Vec::new();
    for row in &cur {
        let all1 = b.and_all(row.iter().copied());
        let all0 = b.and_all(row.iter().map(|&x| !x));
        bad.push(all1);
        bad.push(all0);
    }
    let err = b.or_all(bad);
    b.output(err, "err");
    let mut circuit = b.finish();
    circuit.set_meta(&MetaInfo::default());
    Ok(circuit)
}

/// n-bit counter advanced by `tick`; the system must clear it before it
/// saturates.
pub fn gen_counter(n: usize) -> Result<Circuit, BenchgenError> {
    if n == 0 {
        return Err(BenchgenError::InvalidParams("counter width must be positive".into()));
    }
    let mut b = AigBuilder::new();
    let tick = b.input("tick");
    let clear = b.input("controllable_clear");
    let bits: Vec<Literal> = (0..n).map(|i| b.latch(format!("cnt_{i}"))).collect();
    let mut carry = tick;
    for &x in &bits {
        let inc = b.xor(x, carry);
        carry = b.and(x, carry);
        let next = b.and(!clear, inc);
        b.set_next(x, next);
    }
    let full = b.and_all(bits.iter().copied());
    let err = b.and(full, !clear);
    b.output(err, "err");
    let mut circuit = b.finish();
    circuit.set_meta(&MetaInfo::default());
    Ok(circuit)
}

/// The system must present `a + b mod 2^n` on its inputs `s`.
pub fn gen_adder(n: usize) -> Result<Circuit, BenchgenError> {
    if n == 0 {
        return Err(BenchgenError::InvalidParams("adder width must be positive".into()));
    }
    let mut b = AigBuilder::new();
    let a: Vec<Literal> = (0..n).map(|i| b.input(format!("a_{i}"))).collect();
    let bb: Vec<Literal> = (0..n).map(|i| b.input(format!("b_{i}"))).collect();
    let s: Vec<Literal> = (0..n).map(|i| b.input(format!("controllable_s_{i}"))).collect();
    let mut carry = Literal::FALSE;
    let mut wrong = Vec::new();
    for i in 0..n {
        let half = b.xor(a[i], bb[i]);
        let sum = b.xor(half, carry);
        wrong.push(b.xor(s[i], sum));
        let g = b.and(a[i], bb[i]);
        let p = b.and(half, carry);
        carry = b.or(g, p);
    }
    let err = b.or_all(wrong);
    b.output(err, "err");
    let mut circuit = b.finish();
    circuit.set_meta(&MetaInfo::default());
    Ok(circuit)
}

pub fn cycle_sched_name(n: usize, d: usize, t: usize) -> String {
    format!("cycle_sched_{n}_{d}_{t}.aag")
}

pub fn mult_matrix_name(m: usize, n: usize, o: usize) -> String {
    format!("mult_bool_matrix_{m}_{n}_{o}.aag")
}

pub fn mult_matrix_dyn_name(m: usize, n: usize) -> String {
    format!("mult_bool_matrix_dyn_{m}_{n}.aag")
}

pub fn counter_name(n: usize) -> String {
    format!("cnt{n}.aag")
}

pub fn adder_name(n: usize) -> String {
    format!("add{n}.aag")
}

/// A small mixed corpus: (file name, circuit).
pub fn desk_corpus() -> Vec<(String, Circuit)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((counter_name(n), gen_counter(n).expect("valid")));
    }
    for n in 1..=4 {
        out.push((adder_name(n), gen_adder(n).expect("valid")));
    }
    for (m, n, o) in [(1, 1, 1), (1, 2, 1), (2, 1, 2), (2, 2, 2), (1, 3, 2), (2, 3, 2)] {
        out.push((mult_matrix_name(m, n, o), gen_mult_matrix(m, n, o).expect("valid")));
    }
    for (m, n) in [(1, 2), (2, 2), (3, 2)] {
        out.push((mult_matrix_dyn_name(m, n), gen_mult_matrix_dyn(m, n).expect("valid")));
    }
    for (n, d, t) in [(1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 1, 2)] {
        out.push((cycle_sched_name(n, d, t), gen_cycle_sched(n, d, t).expect("valid")));
    }
    out
}

/// Derives classification data from the runs of several configurations on
/// one benchmark. Runs that timed out or crashed count as not finished.
pub fn classify(benchmark: &str, runs: &[RunRecord], label: &str) -> Result<MetaInfo, BenchgenError> {
    let finished: Vec<&RunRecord> = runs
        .iter()
        .filter(|r| matches!(r.verdict, RunVerdict::Realizable | RunVerdict::Unrealizable))
        .collect();
    let realizable = finished.iter().any(|r| r.verdict == RunVerdict::Realizable);
    let unrealizable = finished.iter().any(|r| r.verdict == RunVerdict::Unrealizable);
    if realizable && unrealizable {
        return Err(BenchgenError::ConflictingVerdicts(benchmark.to_string()));
    }
    let status = if realizable {
        Status::Realizable
    } else if unrealizable {
        Status::Unrealizable
    } else {
        Status::Unknown
    };
    let configs = |rs: &[&RunRecord]| {
        let mut names: Vec<&str> = rs.iter().map(|r| r.config.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names.len() as u32
    };
    let all: Vec<&RunRecord> = runs.iter().collect();
    let total = configs(&all);
    let solved_by = (total > 0).then(|| Experiment {
        value: (configs(&finished), total),
        label: label.to_string(),
    });
    let solved_in = finished
        .iter()
        .map(|r| r.cpu_seconds)
        .min_by(f64::total_cmp)
        .map(|t| Experiment {
            value: t,
            label: label.to_string(),
        });
    let ref_size = finished
        .iter()
        .filter(|r| r.verified == Some(true))
        .filter_map(|r| r.solution_size)
        .min();
    Ok(MetaInfo {
        status,
        solved_by,
        solved_in,
        ref_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::{parse_aag, partition_inputs, write_aag};
    use crate::bdd::Config;
    use crate::game::game_from_circuit;
    use crate::synthesis::synthesize;
    use crate::verifier::{model_check, simulate, VerifyStatus};

    fn solve_and_verify(c: &Circuit) -> bool {
        let g = game_from_circuit(c, Config::default()).unwrap();
        let r = g.solve_classic();
        if r.realizable {
            let s = synthesize(c, &g, &r).unwrap();
            assert_eq!(model_check(&s.to_circuit(), 60.0).status, VerifyStatus::Verified);
        }
        r.realizable
    }

    #[test]
    fn cycle_sched_latch_count() {
        for (n, d, t) in [(1, 1, 1), (2, 2, 2), (3, 1, 2)] {
            let cs = gen_cycle_sched_with_exprs(n, d, t).unwrap();
            let states: usize = cycle_exprs(n, d, t).iter().map(|(_, r)| glushkov(r).num_states).sum();
            assert_eq!(cs.circuit.latches.len(), states + 1);
            assert_eq!(cs.exprs.iter().map(|e| e.latches.len()).sum::<usize>(), states);
        }
    }

    #[test]
    fn single_tank_pipes_have_no_exclusion() {
        assert!(cycle_exprs(3, 1, 1).iter().all(|(n, _)| n != "E"));
        assert!(cycle_exprs(2, 1, 2).iter().any(|(n, _)| n == "E"));
    }

    #[test]
    fn cycle_sched_inputs_and_rejection() {
        let c = gen_cycle_sched(2, 1, 1).unwrap();
        let p = partition_inputs(&c).unwrap();
        assert_eq!(p.uncontrollable.len(), 2);
        assert_eq!(p.controllable.len(), 5);
        assert!(gen_cycle_sched(2, 1, 3).is_err());
        assert!(gen_cycle_sched(0, 1, 1).is_err());
    }

    #[test]
    fn cycle_sched_error_lags_the_expressions() {
        // pushing and never filling matches A1 after d further steps
        let cs = gen_cycle_sched_with_exprs(1, 1, 1).unwrap();
        let width = cs.circuit.inputs.len();
        let mut w = vec![vec![false; width]; 3];
        w[0][cycle_push(0)] = true;
        let tr = simulate(&cs.circuit, &w).unwrap();
        assert_eq!(tr.outputs[0], vec![false]);
        assert_eq!(tr.outputs[1], vec![false]);
        assert_eq!(tr.outputs[2], vec![true]);
    }

    #[test]
    fn mult_1_1_1_is_the_and_check() {
        let c = gen_mult_matrix(1, 1, 1).unwrap();
        assert!(c.latches.is_empty());
        for bits in 0..8u32 {
            let v: Vec<bool> = (0..3).map(|i| bits >> i & 1 == 1).collect();
            let tr = simulate(&c, std::slice::from_ref(&v)).unwrap();
            assert_eq!(tr.outputs[0][0], v[2] != (v[0] && v[1]));
        }
        assert!(solve_and_verify(&c));
    }

    #[test]
    fn mult_gates_grow_with_volume() {
        let small = gen_mult_matrix(2, 2, 2).unwrap().ands.len();
        let big = gen_mult_matrix(4, 4, 4).unwrap().ands.len();
        assert!(big >= 6 * small, "{small} vs {big}");
    }

    #[test]
    fn dyn_initial_state_is_safe() {
        let c = gen_mult_matrix_dyn(1, 2).unwrap();
        assert_eq!(c.latches.len(), 1 + 2);
        let tr = simulate(&c, &[vec![false; c.inputs.len()]]).unwrap();
        assert_eq!(tr.outputs[0], vec![false]);
        assert!(gen_mult_matrix_dyn(1, 3).is_err());
    }

    #[test]
    fn toy_families_are_realizable() {
        for n in 1..=4 {
            assert!(solve_and_verify(&gen_counter(n).unwrap()), "cnt{n}");
            assert!(solve_and_verify(&gen_adder(n).unwrap()), "add{n}");
        }
    }

    #[test]
    fn generated_files_round_trip_with_unknown_status() {
        for (name, c) in desk_corpus() {
            let back = parse_aag(&write_aag(&c)).unwrap();
            assert_eq!(back, c, "{name}");
            assert_eq!(back.meta().unwrap().status, Status::Unknown);
        }
    }

    fn rec(config: &str, verdict: RunVerdict, cpu: f64, size: Option<u64>) -> RunRecord {
        RunRecord {
            benchmark: "x.aag".into(),
            config: config.into(),
            verdict,
            cpu_seconds: cpu,
            wall_seconds: cpu,
            solution_size: size,
            verified: size.map(|_| true),
            diagnostics: String::new(),
        }
    }

    #[test]
    fn classification_aggregates() {
        let runs = [
            rec("a", RunVerdict::Realizable, 0.5, Some(20)),
            rec("b", RunVerdict::Realizable, 0.12, Some(17)),
            rec("c", RunVerdict::Realizable, 0.3, Some(40)),
        ];
        let m = classify("x", &runs, "L").unwrap();
        assert_eq!(m.status, Status::Realizable);
        assert_eq!(m.solved_by.unwrap().value, (3, 3));
        assert_eq!(m.solved_in.unwrap().value, 0.12);
        assert_eq!(m.ref_size, Some(17));

        let none = [rec("a", RunVerdict::Timeout, 9.0, None)];
        let m = classify("x", &none, "L").unwrap();
        assert_eq!(m.status, Status::Unknown);
        assert!(m.solved_in.is_none());
        assert_eq!(m.solved_by.unwrap().value, (0, 1));

        let clash = [
            rec("a", RunVerdict::Realizable, 1.0, None),
            rec("b", RunVerdict::Unrealizable, 1.0, None),
        ];
        assert!(classify("x", &clash, "L").is_err());
    }
}
