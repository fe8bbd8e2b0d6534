//! Strategy extraction from a winning region and controller emission as a
//! closed-loop AIGER circuit.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::aiger::{AigBuilder, Circuit, Literal, VarDef};
use crate::bdd::{Bdd, VarId};
use crate::game::{GameResult, SafetyGame};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("the initial state is not winning")]
    NotRealizable,
    #[error("some winning state has no safe move")]
    Incomplete,
    #[error("no move left while resolving controllable input {0}")]
    EmptyMoves(usize),
}

/// Moves that keep the play inside the winning region.
#[derive(Debug, Clone)]
pub struct StrategyRelation {
    pub lambda: Bdd,
    pub winning: Bdd,
}

/// `lambda = W & constraints & W(f)`, checked complete on `W`.
pub fn extract_strategy(g: &SafetyGame, w: &Bdd, constraints: &[Bdd]) -> Result<StrategyRelation, SynthesisError> {
    if !g.init.leq(w) {
        return Err(SynthesisError::NotRealizable);
    }
    let mut lambda = w.and(&g.substitute(w));
    for c in constraints {
        lambda = lambda.and(c);
    }
    let covered = lambda
        .exists(g.controllable_set())
        .forall(g.uncontrollable_set());
    if !w.leq(&covered) {
        return Err(SynthesisError::Incomplete);
    }
    Ok(StrategyRelation {
        lambda,
        winning: w.clone(),
    })
}

pub fn strategy_of(g: &SafetyGame, r: &GameResult) -> Result<StrategyRelation, SynthesisError> {
    extract_strategy(g, &r.winning_region, &r.constraints)
}

/// One function over latches and uncontrollable inputs per controllable
/// input, resolved in declaration order by cofactors. Where both values are
/// allowed the input is set to 0.
pub fn resolve_outputs(g: &SafetyGame, rel: &StrategyRelation) -> Result<Vec<Bdd>, SynthesisError> {
    let m = g.manager();
    let care = rel.lambda.exists(g.controllable_set());
    let mut lambda = rel.lambda.clone();
    let mut fns = Vec::with_capacity(g.controllable.len());
    for (k, &c) in g.controllable.iter().enumerate() {
        let rest = m.var_set(&g.controllable[k + 1..]).expect("registered");
        let p = lambda.cofactor(c, true).exists(&rest);
        let n = lambda.cofactor(c, false).exists(&rest);
        if !care.leq(&p.or(&n)) {
            return Err(SynthesisError::EmptyMoves(k));
        }
        let mut f = p.and(&n.not());
        // only the behaviour on states with a safe move matters
        if !care.is_false() {
            let r = f.restrict(&care).expect("nonempty care set");
            if r.node_count() < f.node_count() {
                f = r;
            }
        }
        lambda = lambda.compose(&[(c, &f)]);
        fns.push(f);
    }
    if !care.leq(&lambda) {
        return Err(SynthesisError::EmptyMoves(g.controllable.len()));
    }
    Ok(fns)
}

/// A closed-loop circuit: the specification with its controllable inputs
/// replaced by controller logic.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub circuit: Circuit,
    /// Former controllable inputs and the literal now driving them.
    pub wires: Vec<(String, Literal)>,
}

impl Solution {
    pub fn gate_count(&self) -> usize {
        self.circuit.ands.len()
    }

    /// The circuit with the wire table recorded as leading comment lines.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = self.circuit.clone();
        let mut comments: Vec<String> = self
            .wires
            .iter()
            .map(|(name, lit)| format!("wire {name} {lit}"))
            .collect();
        comments.append(&mut c.comments);
        c.comments = comments;
        c
    }
}

/// Rebuilds `c` through a folding, hashing builder, keeping only the gates
/// reachable from latch inputs, outputs and `roots`. Inputs, latches and
/// their names are kept in order. Returns the remapped roots.
pub fn rebuild(c: &Circuit, roots: &[Literal]) -> (Circuit, Vec<Literal>) {
    let mut b = AigBuilder::new();
    let mut map: Vec<Literal> = vec![Literal::FALSE; c.max_var as usize + 1];
    for (i, l) in c.inputs.iter().enumerate() {
        map[l.var() as usize] = b.input(c.input_name(i).unwrap_or_default().to_string());
    }
    for (i, l) in c.latches.iter().enumerate() {
        map[l.state.var() as usize] = b.latch(c.latch_name(i).unwrap_or_default().to_string());
    }
    finish_rebuild(c, b, map, roots, &[])
}

/// `roots` are literals of `c`; `built` are literals already in `b` and are
/// returned after the remapped `roots`.
fn finish_rebuild(
    c: &Circuit,
    mut b: AigBuilder,
    mut map: Vec<Literal>,
    roots: &[Literal],
    built: &[Literal],
) -> (Circuit, Vec<Literal>) {
    let defs = c.var_defs();
    let mut needed = vec![false; c.ands.len()];
    let mut stack: Vec<u32> = roots
        .iter()
        .chain(c.outputs.iter())
        .chain(c.latches.iter().map(|l| &l.next))
        .map(|l| l.var())
        .collect();
    while let Some(v) = stack.pop() {
        if let VarDef::And(g) = defs[v as usize] {
            if !needed[g] {
                needed[g] = true;
                stack.push(c.ands[g].rhs0.var());
                stack.push(c.ands[g].rhs1.var());
            }
        }
    }
    let lit = |map: &[Literal], l: Literal| map[l.var() as usize].negate_if(l.is_negated());
    for g in c.topological_ands() {
        if needed[g] {
            let a = c.ands[g];
            let r = b.and(lit(&map, a.rhs0), lit(&map, a.rhs1));
            map[a.lhs.var() as usize] = r;
        }
    }
    for l in &c.latches {
        let next = lit(&map, l.next);
        b.set_next(map[l.state.var() as usize], next);
    }
    for (i, &o) in c.outputs.iter().enumerate() {
        b.output(lit(&map, o), c.output_name(i).unwrap_or_default().to_string());
    }
    for line in &c.comments {
        b.comment(line.clone());
    }
    let new_roots: Vec<Literal> = roots
        .iter()
        .map(|&r| lit(&map, r))
        .chain(built.iter().copied())
        .collect();
    let built = b.finish();
    // the builder may leave gates only used by folded-away logic
    if built.ands.len() > live_gate_count(&built, &new_roots) {
        return rebuild(&built, &new_roots);
    }
    (built, new_roots)
}

fn live_gate_count(c: &Circuit, roots: &[Literal]) -> usize {
    let defs = c.var_defs();
    let mut needed = vec![false; c.ands.len()];
    let mut stack: Vec<u32> = roots
        .iter()
        .chain(c.outputs.iter())
        .chain(c.latches.iter().map(|l| &l.next))
        .map(|l| l.var())
        .collect();
    let mut n = 0;
    while let Some(v) = stack.pop() {
        if let VarDef::And(g) = defs[v as usize] {
            if !needed[g] {
                needed[g] = true;
                n += 1;
                stack.push(c.ands[g].rhs0.var());
                stack.push(c.ands[g].rhs1.var());
            }
        }
    }
    n
}

/// Emits the controller for `fns` (indexed like `g.controllable`) into the
/// specification `spec` that `g` was built from.
// Bdd hashes and compares by its edge alone; the manager handle inside is
// never part of the key.
#[allow(clippy::mutable_key_type)]
pub fn bdd_to_aig(spec: &Circuit, g: &SafetyGame, fns: &[Bdd]) -> Solution {
    assert_eq!(fns.len(), g.controllable.len());
    // controllable inputs of the spec, by variable, in declaration order
    let mut ctrl_pos: FxHashMap<u32, usize> = FxHashMap::default();
    let mut ctrl_names = Vec::new();
    let mut var_of_bdd: FxHashMap<VarId, u32> = FxHashMap::default();
    for (aig_var, bv) in g.aig_vars().iter().enumerate() {
        if let Some(bv) = bv {
            var_of_bdd.insert(*bv, aig_var as u32);
            if let Ok(k) = g.controllable.binary_search(bv) {
                ctrl_pos.insert(aig_var as u32, k);
            }
        }
    }
    for (i, l) in spec.inputs.iter().enumerate() {
        if ctrl_pos.contains_key(&l.var()) {
            ctrl_names.push((ctrl_pos[&l.var()], spec.input_name(i).unwrap_or_default().to_string()));
        }
    }
    ctrl_names.sort();

    let mut b = AigBuilder::new();
    let mut map: Vec<Literal> = vec![Literal::FALSE; spec.max_var as usize + 1];
    for (i, l) in spec.inputs.iter().enumerate() {
        if !ctrl_pos.contains_key(&l.var()) {
            map[l.var() as usize] = b.input(spec.input_name(i).unwrap_or_default().to_string());
        }
    }
    for (i, l) in spec.latches.iter().enumerate() {
        map[l.state.var() as usize] = b.latch(spec.latch_name(i).unwrap_or_default().to_string());
    }
    let mut memo: FxHashMap<Bdd, Literal> = FxHashMap::default();
    let mut drivers = Vec::new();
    for f in fns {
        let lit = emit(&mut b, f, &map, &var_of_bdd, &mut memo);
        drivers.push(lit);
    }
    for (&var, &k) in &ctrl_pos {
        map[var as usize] = drivers[k];
    }
    let (circuit, wires) = finish_rebuild(spec, b, map, &[], &drivers);
    Solution {
        circuit,
        wires: ctrl_names.into_iter().map(|(_, n)| n).zip(wires).collect(),
    }
}

#[allow(clippy::mutable_key_type)]
fn emit(
    b: &mut AigBuilder,
    f: &Bdd,
    map: &[Literal],
    var_of_bdd: &FxHashMap<VarId, u32>,
    memo: &mut FxHashMap<Bdd, Literal>,
) -> Literal {
    if f.is_true() {
        return Literal::TRUE;
    }
    if f.is_false() {
        return Literal::FALSE;
    }
    if let Some(&l) = memo.get(f) {
        return l;
    }
    if f.is_complemented() {
        let l = !emit(b, &f.not(), map, var_of_bdd, memo);
        memo.insert(f.clone(), l);
        return l;
    }
    let (v, lo, hi) = f.top().expect("not constant");
    let sel = map[var_of_bdd[&v] as usize];
    let h = emit(b, &hi, map, var_of_bdd, memo);
    let l = emit(b, &lo, map, var_of_bdd, memo);
    let r = b.ite(sel, h, l);
    memo.insert(f.clone(), r);
    r
}

/// Constant propagation, structural hashing and a dead-gate sweep.
pub fn minimize(s: &Solution) -> Solution {
    let roots: Vec<Literal> = s.wires.iter().map(|w| w.1).collect();
    let (circuit, roots) = rebuild(&s.circuit, &roots);
    Solution {
        circuit,
        wires: s.wires.iter().map(|w| w.0.clone()).zip(roots).collect(),
    }
}

/// Strategy extraction and emission for a solved game.
pub fn synthesize(spec: &Circuit, g: &SafetyGame, r: &GameResult) -> Result<Solution, SynthesisError> {
    if !r.realizable {
        return Err(SynthesisError::NotRealizable);
    }
    let rel = strategy_of(g, r)?;
    let fns = resolve_outputs(g, &rel)?;
    Ok(minimize(&bdd_to_aig(spec, g, &fns)))
}

/// Reads the `wire` comment lines written by [`Solution::to_circuit`].
pub fn wires_of(c: &Circuit) -> Vec<(String, Literal)> {
    c.comments
        .iter()
        .filter_map(|l| {
            let mut it = l.strip_prefix("wire ")?.split_whitespace();
            let name = it.next()?.to_string();
            let lit = it.next()?.parse().ok()?;
            Some((name, Literal(lit)))
        })
        .collect()
}
