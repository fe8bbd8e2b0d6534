//! Compositional solving: the error output is split into a disjunction of
//! smaller error functions, each subgame is solved on its own, and the
//! local results are combined by one of three aggregation schemes.

use crate::aiger::{Circuit, Literal, VarDef};
use crate::bdd::Bdd;
use crate::clock::Stopwatch;
use crate::game::{GameResult, SafetyGame};

pub const DEFAULT_CAP: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositionalOptions {
    /// Largest number of disjuncts distribution may produce.
    pub cap: usize,
    /// Replace transition functions outside a subgame's cone of influence
    /// by free environment inputs.
    pub aggressive: bool,
}

impl Default for CompositionalOptions {
    fn default() -> Self {
        CompositionalOptions {
            cap: DEFAULT_CAP,
            aggressive: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Global,
    Incremental,
    BackAndForth,
}

/// The error as a disjunction of conjunctions of circuit literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub disjuncts: Vec<Vec<Literal>>,
}

impl Decomposition {
    pub fn is_split(&self) -> bool {
        self.disjuncts.len() >= 2
    }

    pub fn compile(&self, g: &SafetyGame, c: &Circuit) -> Vec<Bdd> {
        let m = g.manager();
        self.disjuncts
            .iter()
            .map(|conj| {
                g.compile(c, conj)
                    .iter()
                    .fold(m.tt(), |acc, f| acc.and(f))
            })
            .collect()
    }
}

/// Conjunct leaves below `lit` along non-inverted AND edges.
fn conjuncts(defs: &[VarDef], c: &Circuit, lit: Literal) -> Vec<Literal> {
    let mut out = Vec::new();
    let mut stack = vec![lit];
    while let Some(l) = stack.pop() {
        match defs[l.var() as usize] {
            VarDef::And(g) if !l.is_negated() => {
                stack.push(c.ands[g].rhs1);
                stack.push(c.ands[g].rhs0);
            }
            _ => {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
    }
    out
}

/// Splits the error output into disjuncts by pushing inverted AND edges one
/// level down and distributing. Falls back to the single original error when
/// nothing can be split or the product exceeds `cap`.
pub fn decompose_error(c: &Circuit, cap: usize) -> Decomposition {
    let root = c.outputs[0];
    let single = Decomposition {
        disjuncts: vec![vec![root]],
    };
    let defs = c.var_defs();
    let leaves = conjuncts(&defs, c, root);
    let mut fixed = Vec::new();
    let mut choices: Vec<Vec<Literal>> = Vec::new();
    for l in leaves {
        if l.is_negated() && matches!(defs[l.var() as usize], VarDef::And(_)) {
            choices.push(conjuncts(&defs, c, l.positive()).into_iter().map(|x| !x).collect());
        } else {
            fixed.push(l);
        }
    }
    if choices.is_empty() {
        return single;
    }
    let total = choices
        .iter()
        .try_fold(1usize, |acc, ch| acc.checked_mul(ch.len()))
        .unwrap_or(usize::MAX);
    if total > cap {
        return single;
    }
    let mut disjuncts: Vec<Vec<Literal>> = vec![fixed];
    for ch in &choices {
        let mut next = Vec::with_capacity(disjuncts.len() * ch.len());
        for d in &disjuncts {
            for &l in ch {
                let mut e = d.clone();
                if !e.contains(&l) {
                    e.push(l);
                }
                next.push(e);
            }
        }
        disjuncts = next;
    }
    // a conjunction holding both polarities of a literal is empty
    disjuncts.retain(|d| !d.iter().any(|l| d.contains(&!*l)) && !d.contains(&Literal::FALSE));
    match disjuncts.len() {
        0 | 1 => single,
        _ => Decomposition { disjuncts },
    }
}

/// The solved subgame for one disjunct `e` of the error.
#[derive(Debug, Clone)]
pub struct SubgameSolution {
    pub index: usize,
    pub error: Bdd,
    /// The local attractor (states losing for this disjunct alone).
    pub losing: Bdd,
    /// Winning valuations: `W_i(s) & !e(s, x) & W_i(f(s, x))`.
    pub w: Bdd,
    pub iterations: usize,
}

impl SubgameSolution {
    pub fn winning(&self) -> Bdd {
        self.losing.not()
    }
}

fn subgame(g: &SafetyGame, e: &Bdd, aggressive: bool) -> SafetyGame {
    let sub = g.with_error(e.clone());
    if !aggressive {
        return sub;
    }
    let coi = sub.cone_of_influence(e);
    let m = g.manager();
    let mut transitions = sub.transitions.clone();
    let mut fresh = Vec::new();
    for (i, t) in transitions.iter_mut().enumerate() {
        if coi.binary_search(&i).is_err() {
            let v = m.new_var();
            fresh.push(v);
            *t = m.var(v).expect("fresh variable");
        }
    }
    sub.with_transitions(transitions).with_extra_uncontrollable(&fresh)
}

pub fn solve_subgame(g: &SafetyGame, index: usize, e: &Bdd, aggressive: bool) -> SubgameSolution {
    let sub = subgame(g, e, aggressive);
    let (losing, iterations) = sub.attractor_from(g.manager().ff());
    let win = losing.not();
    let w = win.and(&e.not()).and(&g.substitute(&win));
    SubgameSolution {
        index,
        error: e.clone(),
        losing,
        w,
        iterations,
    }
}

pub fn solve_subgames(g: &SafetyGame, errors: &[Bdd], aggressive: bool) -> Vec<SubgameSolution> {
    errors
        .iter()
        .enumerate()
        .map(|(i, e)| solve_subgame(g, i, e, aggressive))
        .collect()
}

/// Solves the global game whose moves must stay inside `AND_i w_i`.
pub fn aggregate_global(g: &SafetyGame, subs: &[SubgameSolution]) -> GameResult {
    let sw = Stopwatch::start();
    let parts: Vec<Bdd> = subs.iter().map(|s| s.w.clone()).collect();
    let mut reduced = g.clone();
    if !g.latches.is_empty() {
        let lambda = parts.iter().fold(g.manager().tt(), |a, w| a.and(w));
        if lambda.is_false() {
            return g.result_with(g.manager().ff(), 1, sw, vec![lambda]);
        }
        // the transition functions only matter inside the constraints
        let ts = g
            .transitions
            .iter()
            .map(|t| {
                let r = t.restrict(&lambda).expect("nonempty care set");
                if r.node_count() < t.node_count() {
                    r
                } else {
                    t.clone()
                }
            })
            .collect();
        reduced = g.with_transitions(ts);
    }
    let (w, iterations) = reduced.safe_region_parts(&parts);
    g.result_with(w, iterations, sw, parts)
}

/// Merges subgame solutions two at a time, cheapest pair first.
pub fn aggregate_incremental(g: &SafetyGame, subs: &[SubgameSolution]) -> GameResult {
    aggregate_incremental_by(g, subs, |list| {
        let m = g.manager();
        let mut best = (0, 1);
        let mut best_size = usize::MAX;
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let size = m.shared_size(&[&list[i].w, &list[j].w]);
                if size < best_size {
                    best_size = size;
                    best = (i, j);
                }
            }
        }
        best
    })
}

/// As [`aggregate_incremental`] with a caller-chosen pairing.
pub fn aggregate_incremental_by(
    g: &SafetyGame,
    subs: &[SubgameSolution],
    mut pick: impl FnMut(&[SubgameSolution]) -> (usize, usize),
) -> GameResult {
    let sw = Stopwatch::start();
    let mut list: Vec<SubgameSolution> = subs.to_vec();
    let mut iterations = 0;
    while list.len() > 1 {
        let (i, j) = pick(&list);
        assert!(i != j && i < list.len() && j < list.len());
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        let a = list.swap_remove(hi);
        let b = list.swap_remove(lo);
        let (win, it) = g.safe_region_parts(&[a.w.clone(), b.w.clone()]);
        iterations += it;
        let w = win.and(&a.w).and(&b.w).and(&g.substitute(&win));
        list.push(SubgameSolution {
            index: a.index.min(b.index),
            error: a.error.or(&b.error),
            losing: win.not(),
            w,
            iterations: it,
        });
    }
    let mut r = aggregate_global(g, &list);
    r.iterations += iterations;
    r.stats.seconds = sw.seconds();
    r
}

/// Interleaves global predecessor steps with local fixpoint recomputation
/// until neither the global losing set nor any local one changes.
pub fn back_and_forth(g: &SafetyGame, subs: &[SubgameSolution]) -> GameResult {
    let sw = Stopwatch::start();
    let m = g.manager();
    let safe: Vec<Bdd> = subs.iter().map(|s| s.error.not()).collect();
    let games: Vec<SafetyGame> = subs.iter().map(|s| g.with_error(s.error.clone())).collect();
    let mut local: Vec<Bdd> = subs.iter().map(|s| s.losing.clone()).collect();
    let unsafe_now = g.cpre_parts(&safe, &m.tt()).not();
    let mut u = local.iter().fold(unsafe_now, |a, l| a.or(l));
    let mut rounds = 0;
    loop {
        rounds += 1;
        let stepped = u.or(&g.cpre_parts(&safe, &u.not()).not());
        let mut grown = stepped.clone();
        for (sub, a) in games.iter().zip(local.iter_mut()) {
            if stepped.leq(a) {
                continue;
            }
            let (fix, _) = sub.attractor_from(a.or(&stepped));
            *a = fix;
            grown = grown.or(a);
        }
        if grown == u {
            break;
        }
        u = grown;
    }
    g.result_with(u.not(), rounds, sw, safe)
}

pub fn aggregate(g: &SafetyGame, subs: &[SubgameSolution], how: Aggregation) -> GameResult {
    match how {
        Aggregation::Global => aggregate_global(g, subs),
        Aggregation::Incremental => aggregate_incremental(g, subs),
        Aggregation::BackAndForth => back_and_forth(g, subs),
    }
}

/// Decomposes, solves the subgames and aggregates. `g` may have been built
/// without its error function; only the disjuncts are compiled.
pub fn solve_compositional(
    g: &SafetyGame,
    c: &Circuit,
    how: Aggregation,
    opts: CompositionalOptions,
) -> GameResult {
    let sw = Stopwatch::start();
    let d = decompose_error(c, opts.cap);
    let errors = d.compile(g, c);
    let subs = solve_subgames(g, &errors, opts.aggressive);
    let mut r = aggregate(g, &subs, how);
    r.stats.seconds = sw.seconds();
    r.stats.peak_nodes = g.manager().peak_node_count();
    r
}
