//! The symbolic safety game of a specification circuit and its classical
//! backward fixpoint.
//!
//! Every solver in this crate uses the same one-step semantics: from state
//! `s`, the environment wins the step into a set `A` if it has an input
//! `x_u` such that for every controllable `x_c` either the error output is
//! raised on `(s, x_u, x_c)` or the successor lies in `A`. With a
//! latch-only error this is the usual unsafe-seeded attractor.

use std::cell::OnceCell;

use thiserror::Error;

use crate::aiger::{partition_inputs, Circuit, ControlPartition, Literal, PartitionError, VarDef};
use crate::bdd::{Bdd, BddManager, Config, VarId, VarSet};
use crate::clock::Stopwatch;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("specification must have exactly one output, found {0}")]
    OutputCount(usize),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveStats {
    pub peak_nodes: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct GameResult {
    pub realizable: bool,
    /// States (over latch variables) from which the system keeps the play safe.
    pub winning_region: Bdd,
    pub iterations: usize,
    pub stats: SolveStats,
    /// Conjunction of move constraints the region was computed against,
    /// each implying the negated error. Strategy extraction stays inside them.
    pub constraints: Vec<Bdd>,
}

impl GameResult {
    /// Key-value rendering of the solver statistics.
    pub fn stats_text(&self) -> String {
        format!(
            "realizable={}\niterations={}\npeak_nodes={}\nseconds={:.6}\nwinning_nodes={}\n",
            self.realizable,
            self.iterations,
            self.stats.peak_nodes,
            self.stats.seconds,
            self.winning_region.node_count()
        )
    }
}

/// A safety game over latches `L`, uncontrollable inputs `X_u` and
/// controllable inputs `X_c`. Cheap to clone: all functions are shared handles.
#[derive(Clone, Debug)]
pub struct SafetyGame {
    mgr: BddManager,
    pub latches: Vec<VarId>,
    pub uncontrollable: Vec<VarId>,
    pub controllable: Vec<VarId>,
    /// Next-state function per latch position.
    pub transitions: Vec<Bdd>,
    /// The error output as a function of state and inputs.
    pub error: Bdd,
    pub init: Bdd,
    /// BDD variable of each AIG variable that is an input or a latch.
    aig_vars: Vec<Option<VarId>>,
    u_set: VarSet,
    c_set: VarSet,
    l_set: VarSet,
    primed: OnceCell<Vec<VarId>>,
}

/// Compiles circuit literals to BDDs, sharing work through a memo over AND gates.
pub fn compile_literals(
    mgr: &BddManager,
    c: &Circuit,
    aig_vars: &[Option<VarId>],
    lits: &[Literal],
) -> Vec<Bdd> {
    let defs = c.var_defs();
    let mut needed = vec![false; c.ands.len()];
    let mut stack: Vec<u32> = lits.iter().map(|l| l.var()).collect();
    while let Some(v) = stack.pop() {
        if let VarDef::And(g) = defs[v as usize] {
            if !needed[g] {
                needed[g] = true;
                stack.push(c.ands[g].rhs0.var());
                stack.push(c.ands[g].rhs1.var());
            }
        }
    }
    let mut memo: Vec<Option<Bdd>> = vec![None; c.max_var as usize + 1];
    memo[0] = Some(mgr.ff());
    for (v, bv) in aig_vars.iter().enumerate() {
        if let Some(bv) = bv {
            memo[v] = Some(mgr.var(*bv).expect("game variable"));
        }
    }
    let lit_of = |memo: &[Option<Bdd>], l: Literal| -> Bdd {
        memo[l.var() as usize]
            .as_ref()
            .expect("operand compiled before use")
            .not_if(l.is_negated())
    };
    for g in c.topological_ands() {
        if !needed[g] {
            continue;
        }
        let gate = c.ands[g];
        let r = lit_of(&memo, gate.rhs0).and(&lit_of(&memo, gate.rhs1));
        memo[gate.lhs.var() as usize] = Some(r);
    }
    lits.iter().map(|&l| lit_of(&memo, l)).collect()
}

/// Builds the game of a single-output specification. Variables are ordered
/// uncontrollable inputs, controllable inputs, then latches.
pub fn build_game(c: &Circuit, p: &ControlPartition, config: Config) -> Result<SafetyGame, GameError> {
    let mut g = build_transitions(c, p, config)?;
    g.error = g.compile(c, &[c.outputs[0]]).pop().expect("error output");
    Ok(g)
}

/// As [`build_game`] but leaves the error function false. Callers that work
/// on pieces of the error (the compositional solvers) install their own.
pub fn build_transitions(c: &Circuit, p: &ControlPartition, config: Config) -> Result<SafetyGame, GameError> {
    if c.outputs.len() != 1 {
        return Err(GameError::OutputCount(c.outputs.len()));
    }
    let mgr = BddManager::with_config(config);
    let mut aig_vars = vec![None; c.max_var as usize + 1];
    let mut uncontrollable = Vec::new();
    for &pos in &p.uncontrollable {
        let v = mgr.new_var();
        aig_vars[c.inputs[pos].var() as usize] = Some(v);
        uncontrollable.push(v);
    }
    let mut controllable = Vec::new();
    for &pos in &p.controllable {
        let v = mgr.new_var();
        aig_vars[c.inputs[pos].var() as usize] = Some(v);
        controllable.push(v);
    }
    let mut latches = Vec::new();
    for l in &c.latches {
        let v = mgr.new_var();
        aig_vars[l.state.var() as usize] = Some(v);
        latches.push(v);
    }
    let targets: Vec<Literal> = c.latches.iter().map(|l| l.next).collect();
    let transitions = compile_literals(&mgr, c, &aig_vars, &targets);
    let error = mgr.ff();
    let init_lits: Vec<(VarId, bool)> = latches.iter().map(|&v| (v, false)).collect();
    let init = mgr.cube(&init_lits).expect("latch variables");
    Ok(SafetyGame {
        u_set: mgr.var_set(&uncontrollable).expect("registered"),
        c_set: mgr.var_set(&controllable).expect("registered"),
        l_set: mgr.var_set(&latches).expect("registered"),
        mgr,
        latches,
        uncontrollable,
        controllable,
        transitions,
        error,
        init,
        aig_vars,
        primed: OnceCell::new(),
    })
}

/// Parses the input partition from symbol names and builds the game.
pub fn game_from_circuit(c: &Circuit, config: Config) -> Result<SafetyGame, GameError> {
    let p = partition_inputs(c)?;
    build_game(c, &p, config)
}

impl SafetyGame {
    pub fn manager(&self) -> &BddManager {
        &self.mgr
    }

    pub fn uncontrollable_set(&self) -> &VarSet {
        &self.u_set
    }

    pub fn controllable_set(&self) -> &VarSet {
        &self.c_set
    }

    pub fn latch_set(&self) -> &VarSet {
        &self.l_set
    }

    pub fn aig_vars(&self) -> &[Option<VarId>] {
        &self.aig_vars
    }

    /// Compiles further literals of the circuit this game was built from.
    pub fn compile(&self, c: &Circuit, lits: &[Literal]) -> Vec<Bdd> {
        compile_literals(&self.mgr, c, &self.aig_vars, lits)
    }

    /// The same game with another error function.
    pub fn with_error(&self, error: Bdd) -> SafetyGame {
        SafetyGame {
            error,
            ..self.clone()
        }
    }

    pub fn with_transitions(&self, transitions: Vec<Bdd>) -> SafetyGame {
        assert_eq!(transitions.len(), self.latches.len());
        SafetyGame {
            transitions,
            ..self.clone()
        }
    }

    /// Adds environment-controlled variables (e.g. free inputs replacing
    /// abstracted transition functions).
    pub fn with_extra_uncontrollable(&self, extra: &[VarId]) -> SafetyGame {
        let mut uncontrollable = self.uncontrollable.clone();
        uncontrollable.extend_from_slice(extra);
        SafetyGame {
            u_set: self.mgr.var_set(&uncontrollable).expect("registered"),
            uncontrollable,
            ..self.clone()
        }
    }

    /// Latch positions `i` whose variable occurs in the support of `f`.
    pub fn latch_positions_in(&self, f: &Bdd) -> Vec<usize> {
        let sup = f.support();
        self.latches
            .iter()
            .enumerate()
            .filter(|(_, v)| sup.contains(v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Latch positions in the transitive cone of influence of `f`.
    pub fn cone_of_influence(&self, f: &Bdd) -> Vec<usize> {
        let mut in_cone = vec![false; self.latches.len()];
        let mut work = self.latch_positions_in(f);
        while let Some(i) = work.pop() {
            if in_cone[i] {
                continue;
            }
            in_cone[i] = true;
            work.extend(self.latch_positions_in(&self.transitions[i]));
        }
        (0..self.latches.len()).filter(|&i| in_cone[i]).collect()
    }

    /// `S(f(L, X_u, X_c))`: the set `S` pulled back through one transition.
    pub fn substitute(&self, s: &Bdd) -> Bdd {
        let subs: Vec<(VarId, &Bdd)> = self
            .latches
            .iter()
            .copied()
            .zip(self.transitions.iter())
            .collect();
        s.compose(&subs)
    }

    /// `{ s | exists x_u forall x_c : S(f(s, x_u, x_c)) }`.
    pub fn upre(&self, s: &Bdd) -> Bdd {
        let moved = self.substitute(s);
        moved.forall(&self.c_set).exists(&self.u_set)
    }

    /// `{ s | forall x_u exists x_c : S(f(s, x_u, x_c)) }`, through the dual.
    pub fn cpre(&self, s: &Bdd) -> Bdd {
        self.upre(&s.not()).not()
    }

    /// The controllable predecessor computed directly.
    pub fn cpre_direct(&self, s: &Bdd) -> Bdd {
        self.substitute(s).exists(&self.c_set).forall(&self.u_set)
    }

    /// Environment step with the error folded in:
    /// `exists x_u forall x_c : error(s, x_u, x_c) | S(f(s, x_u, x_c))`.
    pub fn upre_step(&self, s: &Bdd) -> Bdd {
        self.cpre_step(&s.not()).not()
    }

    /// System step: `forall x_u exists x_c : !error & S(f(s, x_u, x_c))`.
    pub fn cpre_step(&self, s: &Bdd) -> Bdd {
        let moved = self.substitute(s);
        self.error
            .not()
            .and_exists(&moved, &self.c_set)
            .forall(&self.u_set)
    }

    /// System step against a conjunction of move constraints:
    /// `forall x_u exists x_c : AND_i parts_i & S(f)`. Conjuncts that share
    /// no controllable variable are quantified separately, which is exact
    /// because the universal block distributes over the conjunction.
    pub fn cpre_parts(&self, parts: &[Bdd], s: &Bdd) -> Bdd {
        let mut all: Vec<Bdd> = parts.to_vec();
        all.push(self.substitute(s));
        let ctrl: Vec<Vec<VarId>> = all
            .iter()
            .map(|f| {
                f.support()
                    .into_iter()
                    .filter(|v| self.controllable.binary_search(v).is_ok())
                    .collect()
            })
            .collect();
        // union-find over conjuncts sharing a controllable variable
        let mut parent: Vec<usize> = (0..all.len()).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let mut owner: rustc_hash::FxHashMap<VarId, usize> = Default::default();
        for (i, vs) in ctrl.iter().enumerate() {
            for v in vs {
                if let Some(&j) = owner.get(v) {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    parent[a] = b;
                } else {
                    owner.insert(*v, i);
                }
            }
        }
        let mut clusters: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..all.len() {
            let r = root(&mut parent, i);
            clusters.entry(r).or_default().push(i);
        }
        let mut result = self.mgr.tt();
        for members in clusters.values() {
            let mut vars: Vec<VarId> = members.iter().flat_map(|&i| ctrl[i].iter().copied()).collect();
            vars.sort();
            vars.dedup();
            let set = self.mgr.var_set(&vars).expect("registered");
            let (last, rest) = members.split_last().expect("nonempty cluster");
            let mut acc = self.mgr.tt();
            for &i in rest {
                acc = acc.and(&all[i]);
            }
            let r = acc.and_exists(&all[*last], &set).forall(&self.u_set);
            result = result.and(&r);
            if result.is_false() {
                break;
            }
        }
        result
    }

    /// Greatest fixpoint `nu Z. cpre_parts(parts, Z)`, i.e. the states from
    /// which the system can keep every move inside the constraints forever.
    pub fn safe_region_parts(&self, parts: &[Bdd]) -> (Bdd, usize) {
        let mut z = self.mgr.tt();
        let mut iterations = 0;
        loop {
            let next = z.and(&self.cpre_parts(parts, &z));
            iterations += 1;
            if next == z {
                return (z, iterations);
            }
            z = next;
        }
    }

    /// States where the environment can raise the error right away.
    pub fn unsafe_states(&self) -> Bdd {
        self.error.forall(&self.c_set).exists(&self.u_set)
    }

    /// Least fixpoint of the environment step starting from `losing`.
    /// Returns the attractor and the number of step applications.
    pub fn attractor_from(&self, losing: Bdd) -> (Bdd, usize) {
        let mut losing = losing;
        let mut iterations = 0;
        loop {
            let next = losing.or(&self.upre_step(&losing));
            iterations += 1;
            if next == losing {
                return (losing, iterations);
            }
            losing = next;
        }
    }

    fn result(&self, winning: Bdd, iterations: usize, sw: Stopwatch) -> GameResult {
        self.result_with(winning, iterations, sw, vec![self.error.not()])
    }

    pub fn result_with(
        &self,
        winning: Bdd,
        iterations: usize,
        sw: Stopwatch,
        constraints: Vec<Bdd>,
    ) -> GameResult {
        GameResult {
            constraints,
            realizable: self.init.leq(&winning),
            winning_region: winning,
            iterations,
            stats: SolveStats {
                peak_nodes: self.mgr.peak_node_count(),
                seconds: sw.seconds(),
            },
        }
    }

    /// The classical algorithm: the environment's attractor with partitioned
    /// transition functions and direct substitution; its complement is `W`.
    pub fn solve_classic(&self) -> GameResult {
        let sw = Stopwatch::start();
        let (losing, iterations) = self.attractor_from(self.mgr.ff());
        self.result(losing.not(), iterations, sw)
    }

    /// As [`Self::solve_classic`], knowing that `known_winning` is contained
    /// in the winning region: the attractor is only grown outside it.
    pub fn solve_classic_seeded(&self, known_winning: &Bdd) -> GameResult {
        let sw = Stopwatch::start();
        let outside = known_winning.not();
        let mut losing = self.mgr.ff();
        let mut iterations = 0;
        loop {
            let next = losing.or(&self.upre_step(&losing).and(&outside));
            iterations += 1;
            if next == losing {
                break;
            }
            losing = next;
        }
        self.result(losing.not(), iterations, sw)
    }

    /// Primed copies of the latch variables, allocated on first use and
    /// placed directly below their unprimed latch in the order.
    pub fn primed_latches(&self) -> &[VarId] {
        self.primed.get_or_init(|| {
            self.latches
                .iter()
                .map(|&l| {
                    let p = self.mgr.new_var();
                    self.mgr.move_to_level(p, self.mgr.level_of(l) + 1);
                    p
                })
                .collect()
        })
    }

    /// `T(L, X_u, X_c, L') = AND_i (l'_i <-> f_i)`.
    pub fn transition_relation(&self) -> Bdd {
        let primed = self.primed_latches().to_vec();
        let mut t = self.mgr.tt();
        for (p, f) in primed.iter().zip(&self.transitions) {
            t = t.and(&self.mgr.var(*p).expect("primed").iff(f));
        }
        t
    }

    /// The classical fixpoint computed through a monolithic transition
    /// relation over primed latch variables.
    pub fn solve_monolithic(&self) -> GameResult {
        let sw = Stopwatch::start();
        let primed = self.primed_latches().to_vec();
        let t = self.transition_relation();
        let primed_set = self.mgr.var_set(&primed).expect("registered");
        let prime_vars: Vec<Bdd> = primed.iter().map(|p| self.mgr.var(*p).expect("primed")).collect();
        let to_primed: Vec<(VarId, &Bdd)> = self.latches.iter().copied().zip(prime_vars.iter()).collect();
        let not_error = self.error.not();
        let mut losing = self.mgr.ff();
        let mut iterations = 0;
        loop {
            // safe moves: !error & exists L'. T & !losing(L')
            let safe_next = losing.not().compose(&to_primed);
            let into_safe = t.and_exists(&safe_next, &primed_set);
            let cpre = not_error.and_exists(&into_safe, &self.c_set).forall(&self.u_set);
            let next = losing.or(&cpre.not());
            iterations += 1;
            if next == losing {
                break;
            }
            losing = next;
        }
        self.result(losing.not(), iterations, sw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::parse_aag;

    fn game(text: &str) -> SafetyGame {
        let c = parse_aag(text).unwrap();
        game_from_circuit(&c, Config::default()).unwrap()
    }

    // one latch l, next = input, error = l
    fn one_latch(controllable: bool) -> SafetyGame {
        let name = if controllable { "controllable_x" } else { "x" };
        game(&format!("aag 2 1 1 1 0\n2\n4 2\n4\ni0 {name}\n"))
    }

    #[test]
    fn constant_next_and_latch_error() {
        let g = game("aag 1 0 1 1 0\n2 1\n2\n");
        assert!(g.transitions[0].is_true());
        assert_eq!(g.error, g.manager().var(g.latches[0]).unwrap());
        let r = g.solve_classic();
        // from l=0 the play moves to l=1 and raises the error there
        assert!(!r.realizable);
    }

    #[test]
    fn constant_false_error_is_realizable() {
        let g = game("aag 1 1 0 1 0\n2\n0\ni0 x\n");
        assert!(g.error.is_false());
        let r = g.solve_classic();
        assert!(r.realizable);
        assert!(r.winning_region.is_true());
        assert_eq!(r.iterations, 1);
        assert!(g.solve_monolithic().winning_region.is_true());
    }

    #[test]
    fn constant_true_error_is_unrealizable() {
        let g = game("aag 1 1 0 1 0\n2\n1\ni0 x\n");
        let r = g.solve_classic();
        assert!(!r.realizable);
        assert!(r.winning_region.is_false());
    }

    #[test]
    fn output_count_is_checked() {
        let c = parse_aag("aag 1 1 0 2 0\n2\n2\n3\ni0 x\n").unwrap();
        assert!(matches!(
            game_from_circuit(&c, Config::default()),
            Err(GameError::OutputCount(2))
        ));
    }

    #[test]
    fn predecessors_on_one_latch() {
        let g = one_latch(true);
        let m = g.manager();
        let l = m.var(g.latches[0]).unwrap();
        assert!(g.upre(&m.ff()).is_false());
        assert!(g.upre(&l).is_false());
        assert!(g.cpre(&l.not()).is_true());
        assert!(g.cpre(&m.tt()).is_true());

        let g = one_latch(false);
        let l = g.manager().var(g.latches[0]).unwrap();
        assert!(g.upre(&l).is_true());
    }

    #[test]
    fn cpre_duality_on_small_game() {
        let g = one_latch(true);
        let m = g.manager();
        let l = m.var(g.latches[0]).unwrap();
        for s in [m.ff(), m.tt(), l.clone(), l.not()] {
            assert_eq!(g.cpre(&s), g.cpre_direct(&s));
            assert_eq!(g.cpre_step(&s), g.upre_step(&s.not()).not());
        }
    }

    #[test]
    fn toggle_counter_agrees_between_representations() {
        // 2-bit counter that always increments, error at 3 unless
        // controllable clear; clear resets to 0
        let mut b = crate::aiger::AigBuilder::new();
        let clear = b.input("controllable_clear");
        let l0 = b.latch("b0");
        let l1 = b.latch("b1");
        let n0 = b.and(!l0, !clear);
        let t = b.xor(l1, l0);
        let n1 = b.and(t, !clear);
        b.set_next(l0, n0);
        b.set_next(l1, n1);
        let at3 = b.and(l0, l1);
        let err = b.and(at3, !clear);
        b.output(err, "err");
        let c = b.finish();
        let g = game_from_circuit(&c, Config::default()).unwrap();
        let a = g.solve_classic();
        let m = g.solve_monolithic();
        assert!(a.realizable);
        assert_eq!(a.winning_region, m.winning_region);
        assert_eq!(a.iterations, m.iterations);
        // without clear the play reaches 3
        let no_clear = g.with_error(g.error.and(&g.manager().tt()));
        let mut ts = no_clear.transitions.clone();
        let clear_var = g.controllable[0];
        let f = g.manager().ff();
        for t in ts.iter_mut() {
            *t = t.compose(&[(clear_var, &f)]);
        }
        let e = no_clear.error.compose(&[(clear_var, &f)]);
        let forced = no_clear.with_transitions(ts).with_error(e);
        let a = forced.solve_classic();
        let m = forced.solve_monolithic();
        assert!(!a.realizable);
        assert_eq!(a.winning_region, m.winning_region);
    }

    #[test]
    fn fixpoint_is_stable() {
        let g = one_latch(true);
        let r = g.solve_classic();
        let w = &r.winning_region;
        assert_eq!(w, &w.and(&g.cpre_step(w)).and(&g.unsafe_states().not()));
        assert_eq!(g.solve_classic_seeded(w).winning_region, *w);
    }

    #[test]
    fn partitioned_step_matches_monolithic_step() {
        // err = (x1 ^ c1) | (x2 ^ c2) with two latches recording the inputs
        let mut b = crate::aiger::AigBuilder::new();
        let x1 = b.input("x1");
        let x2 = b.input("x2");
        let c1 = b.input("controllable_c1");
        let c2 = b.input("controllable_c2");
        let l1 = b.latch("l1");
        let l2 = b.latch("l2");
        b.set_next(l1, x1);
        let n2 = b.and(l1, c2);
        b.set_next(l2, n2);
        let e1 = b.xor(x1, c1);
        let e2 = b.xor(x2, c2);
        let e2 = b.and(e2, l2);
        let err = b.or(e1, e2);
        b.output(err, "err");
        let c = b.finish();
        let g = game_from_circuit(&c, Config::default()).unwrap();
        let m = g.manager();
        let parts = g.compile(&c, &[!e1, !e2]);
        let l = m.var(g.latches[1]).unwrap();
        for s in [m.tt(), m.ff(), l.clone(), l.not()] {
            assert_eq!(g.cpre_parts(&parts, &s), g.cpre_step(&s));
            assert_eq!(g.cpre_parts(&[g.error.not()], &s), g.cpre_step(&s));
        }
        let (w, _) = g.safe_region_parts(&parts);
        assert_eq!(w, g.solve_classic().winning_region);
    }
}
