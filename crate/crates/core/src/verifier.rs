//! Acceptance checks for controller circuits: syntactic conformance against
//! the specification, forward-reachability model checking, and simulation.

use thiserror::Error;

use crate::aiger::{is_controllable_name, partition_inputs, Circuit, Literal};
use crate::bdd::{Bdd, BddManager, Config, VarId};
use crate::clock::Deadline;
use crate::game::compile_literals;

pub const DEFAULT_TIMEOUT_SECS: f64 = 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyStatus {
    Verified,
    Falsified,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: VerifyStatus,
    /// Input vectors from the initial state, the last one raising the error.
    pub witness: Option<Vec<Vec<bool>>>,
    /// Image computations performed.
    pub iterations: usize,
}

/// One line per step with the input bits in declaration order.
pub fn witness_text(w: &[Vec<bool>]) -> String {
    let mut s = String::new();
    for step in w {
        s.extend(step.iter().map(|&b| if b { '1' } else { '0' }));
        s.push('\n');
    }
    s
}

pub fn parse_witness(text: &str) -> Vec<Vec<bool>> {
    text.lines()
        .map(|l| l.trim().chars().map(|c| c == '1').collect())
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntacticReport {
    pub issues: Vec<String>,
}

impl SyntacticReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Position-wise comparison of a solution's interface with the specification.
pub fn check_syntactic(spec: &Circuit, sol: &Circuit) -> SyntacticReport {
    let mut issues = Vec::new();
    if sol.outputs.len() != 1 {
        issues.push(format!("expected exactly one output, found {}", sol.outputs.len()));
    }
    if sol.latches.len() != spec.latches.len() {
        issues.push(format!(
            "latch count mismatch: specification has {}, solution has {}",
            spec.latches.len(),
            sol.latches.len()
        ));
    } else {
        for i in 0..spec.latches.len() {
            if spec.latch_name(i) != sol.latch_name(i) {
                issues.push(format!("latch {i} name mismatch"));
            }
        }
    }
    match partition_inputs(spec) {
        Err(e) => issues.push(format!("specification: {e}")),
        Ok(p) => {
            let expected: Vec<Option<&str>> = p.uncontrollable.iter().map(|&i| spec.input_name(i)).collect();
            let mut found = Vec::new();
            for i in 0..sol.inputs.len() {
                match sol.input_name(i) {
                    Some(n) if is_controllable_name(n) => {
                        issues.push(format!("controllable input {n} is left undriven"))
                    }
                    n => found.push(n),
                }
            }
            if found.len() != expected.len() {
                issues.push(format!(
                    "uncontrollable input count mismatch: specification has {}, solution has {}",
                    expected.len(),
                    found.len()
                ));
            } else {
                for (i, (a, b)) in expected.iter().zip(&found).enumerate() {
                    if a != b {
                        issues.push(format!("uncontrollable input {i} name mismatch"));
                    }
                }
            }
        }
    }
    SyntacticReport { issues }
}

struct Model {
    mgr: BddManager,
    inputs: Vec<VarId>,
    latches: Vec<VarId>,
    primed: Vec<VarId>,
    next: Vec<Bdd>,
    error: Bdd,
}

fn model(c: &Circuit) -> Model {
    let mgr = BddManager::with_config(Config::default());
    let mut aig_vars = vec![None; c.max_var as usize + 1];
    let inputs: Vec<VarId> = c
        .inputs
        .iter()
        .map(|l| {
            let v = mgr.new_var();
            aig_vars[l.var() as usize] = Some(v);
            v
        })
        .collect();
    let mut latches = Vec::new();
    let mut primed = Vec::new();
    for l in &c.latches {
        let v = mgr.new_var();
        aig_vars[l.state.var() as usize] = Some(v);
        latches.push(v);
        primed.push(mgr.new_var());
    }
    let mut targets: Vec<Literal> = c.latches.iter().map(|l| l.next).collect();
    targets.push(c.outputs[0]);
    let mut next = compile_literals(&mgr, c, &aig_vars, &targets);
    let error = next.pop().expect("error output");
    Model {
        mgr,
        inputs,
        latches,
        primed,
        next,
        error,
    }
}

/// Forward reachability from the all-zero state; the circuit is safe when no
/// reachable state admits inputs raising its (first) output.
pub fn model_check(sol: &Circuit, timeout_secs: f64) -> Verdict {
    let deadline = Deadline::after_secs(timeout_secs);
    let m = model(sol);
    let mgr = &m.mgr;
    let mut t = mgr.tt();
    for (p, f) in m.primed.iter().zip(&m.next) {
        t = t.and(&mgr.var(*p).expect("primed").iff(f));
    }
    let mut cur: Vec<VarId> = m.latches.clone();
    cur.extend_from_slice(&m.inputs);
    let cur_set = mgr.var_set(&cur).expect("registered");
    let input_set = mgr.var_set(&m.inputs).expect("registered");
    let primed_bdds: Vec<Bdd> = m.primed.iter().map(|&p| mgr.var(p).expect("primed")).collect();
    let latch_bdds: Vec<Bdd> = m.latches.iter().map(|&l| mgr.var(l).expect("latch")).collect();
    let unprime: Vec<(VarId, &Bdd)> = m.primed.iter().copied().zip(latch_bdds.iter()).collect();
    let to_primed: Vec<(VarId, &Bdd)> = m.latches.iter().copied().zip(primed_bdds.iter()).collect();
    let bad = m.error.exists(&input_set);
    let init_lits: Vec<(VarId, bool)> = m.latches.iter().map(|&v| (v, false)).collect();
    let init = mgr.cube(&init_lits).expect("latches");

    let mut rings = vec![init.clone()];
    let mut reached = init;
    let mut iterations = 0;
    loop {
        let frontier = rings.last().expect("ring").clone();
        if !frontier.and(&bad).is_false() {
            let witness = trace_back(&m, &rings, &t, &to_primed);
            return Verdict {
                status: VerifyStatus::Falsified,
                witness: Some(witness),
                iterations,
            };
        }
        if deadline.expired() {
            return Verdict {
                status: VerifyStatus::Timeout,
                witness: None,
                iterations,
            };
        }
        let image = frontier.and_exists(&t, &cur_set).compose(&unprime);
        iterations += 1;
        let new = image.and(&reached.not());
        if new.is_false() {
            return Verdict {
                status: VerifyStatus::Verified,
                witness: None,
                iterations,
            };
        }
        reached = reached.or(&new);
        rings.push(new);
    }
}

fn trace_back(m: &Model, rings: &[Bdd], t: &Bdd, to_primed: &[(VarId, &Bdd)]) -> Vec<Vec<bool>> {
    let last = rings.last().expect("ring");
    let mut all: Vec<VarId> = m.latches.clone();
    all.extend_from_slice(&m.inputs);
    let pick = |f: &Bdd| -> (Vec<bool>, Vec<bool>) {
        let bits = f.pick_minterm(&all).expect("nonempty");
        let (s, x) = bits.split_at(m.latches.len());
        (s.to_vec(), x.to_vec())
    };
    let cube_of = |vars: &[VarId], bits: &[bool]| -> Bdd {
        let lits: Vec<(VarId, bool)> = vars.iter().copied().zip(bits.iter().copied()).collect();
        m.mgr.cube(&lits).expect("registered")
    };
    let (mut state, x) = pick(&last.and(&m.error));
    let mut steps = vec![x];
    for ring in rings[..rings.len() - 1].iter().rev() {
        let target = cube_of(&m.latches, &state).compose(to_primed);
        let (s, x) = pick(&ring.and(&t.and(&target)));
        state = s;
        steps.push(x);
    }
    steps.reverse();
    steps
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("step {step}: expected {expected} input bits, got {got}")]
    Width { step: usize, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    /// Output values per step.
    pub outputs: Vec<Vec<bool>>,
    /// Latch values at the start of each step.
    pub states: Vec<Vec<bool>>,
    pub final_state: Vec<bool>,
}

/// Cycle-accurate evaluation with all latches starting at 0.
pub fn simulate(c: &Circuit, trace: &[Vec<bool>]) -> Result<SimTrace, SimError> {
    let order = c.topological_ands();
    let mut val = vec![false; c.max_var as usize + 1];
    let mut state = vec![false; c.latches.len()];
    let mut out = SimTrace {
        outputs: Vec::with_capacity(trace.len()),
        states: Vec::with_capacity(trace.len()),
        final_state: Vec::new(),
    };
    let get = |val: &[bool], l: Literal| val[l.var() as usize] ^ l.is_negated();
    for (step, x) in trace.iter().enumerate() {
        if x.len() != c.inputs.len() {
            return Err(SimError::Width {
                step,
                expected: c.inputs.len(),
                got: x.len(),
            });
        }
        for (l, &b) in c.inputs.iter().zip(x) {
            val[l.var() as usize] = b;
        }
        for (l, &b) in c.latches.iter().zip(&state) {
            val[l.state.var() as usize] = b;
        }
        for &g in &order {
            let a = c.ands[g];
            val[a.lhs.var() as usize] = get(&val, a.rhs0) && get(&val, a.rhs1);
        }
        out.states.push(state.clone());
        out.outputs.push(c.outputs.iter().map(|&o| get(&val, o)).collect());
        state = c.latches.iter().map(|l| get(&val, l.next)).collect();
    }
    out.final_state = state;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::{parse_aag, AigBuilder};

    fn mult111(c_is: Option<bool>) -> (Circuit, Circuit) {
        let mut b = AigBuilder::new();
        let a = b.input("a_0_0");
        let bb = b.input("b_0_0");
        let c = b.input("controllable_c_0_0");
        let p = b.and(a, bb);
        let e = b.xor(c, p);
        b.output(e, "err");
        let spec = b.finish();
        let mut s = AigBuilder::new();
        let a = s.input("a_0_0");
        let bb = s.input("b_0_0");
        let c = match c_is {
            None => s.and(a, bb),
            Some(true) => Literal::TRUE,
            Some(false) => Literal::FALSE,
        };
        let p = s.and(a, bb);
        let e = s.xor(c, p);
        s.output(e, "err");
        (spec, s.finish())
    }

    #[test]
    fn correct_product_verifies() {
        let (spec, sol) = mult111(None);
        assert!(check_syntactic(&spec, &sol).passed());
        let v = model_check(&sol, 10.0);
        assert_eq!(v.status, VerifyStatus::Verified);
        assert_eq!(v.iterations, 1);
    }

    #[test]
    fn sabotaged_product_is_falsified_with_replayable_witness() {
        let (_, sol) = mult111(Some(true));
        let v = model_check(&sol, 10.0);
        assert_eq!(v.status, VerifyStatus::Falsified);
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 1);
        assert!(!(w[0][0] && w[0][1]), "a witness needs a & b = 0");
        let sim = simulate(&sol, &w).unwrap();
        assert!(sim.outputs.last().unwrap()[0]);
        assert_eq!(parse_witness(&witness_text(&w)), w);
    }

    #[test]
    fn deep_witness_replays() {
        // 3-bit counter incrementing when x; error at 5
        let mut b = AigBuilder::new();
        let x = b.input("x");
        let l: Vec<Literal> = (0..3).map(|i| b.latch(format!("b{i}"))).collect();
        let mut carry = x;
        for &li in &l {
            let n = b.xor(li, carry);
            carry = b.and(li, carry);
            b.set_next(li, n);
        }
        let e = b.and_all([l[0], !l[1], l[2]]);
        b.output(e, "err");
        let c = b.finish();
        let v = model_check(&c, 10.0);
        assert_eq!(v.status, VerifyStatus::Falsified);
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 6);
        let sim = simulate(&c, &w).unwrap();
        assert!(sim.outputs.last().unwrap()[0]);
        assert!(sim.outputs[..5].iter().all(|o| !o[0]));
    }

    #[test]
    fn constant_false_error_verifies() {
        let c = parse_aag("aag 1 1 0 1 0\n2\n0\ni0 x\n").unwrap();
        assert_eq!(model_check(&c, 10.0).status, VerifyStatus::Verified);
    }

    #[test]
    fn syntactic_mismatches_are_reported() {
        let spec = parse_aag("aag 2 1 1 1 0\n2\n4 2\n4\ni0 controllable_x\nl0 s\n").unwrap();
        let no_latch = parse_aag("aag 0 0 0 1 0\n0\n").unwrap();
        let r = check_syntactic(&spec, &no_latch);
        assert!(r.issues.iter().any(|i| i.contains("latch count mismatch")));
        let r = check_syntactic(&spec, &spec);
        assert!(r.issues.iter().any(|i| i.contains("undriven")));
    }

    #[test]
    fn toggle_simulation() {
        let c = parse_aag("aag 1 0 1 1 0\n2 3\n2\n").unwrap();
        let t = simulate(&c, &[vec![], vec![], vec![]]).unwrap();
        assert_eq!(t.states, vec![vec![false], vec![true], vec![false]]);
        let e = simulate(&c, &[]).unwrap();
        assert!(e.outputs.is_empty());
        assert_eq!(e.final_state, vec![false]);
        assert!(matches!(simulate(&c, &[vec![true]]), Err(SimError::Width { .. })));
    }
}
