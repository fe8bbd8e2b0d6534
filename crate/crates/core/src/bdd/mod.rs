//! Reduced ordered binary decision diagrams with complement edges.
//!
//! A [`BddManager`] owns the node store; [`Bdd`] handles keep nodes alive
//! through reference counts. A manager and its handles are single-threaded;
//! separate managers are independent and can live on separate threads.

mod ops;
mod reorder;
mod store;

use std::cell::RefCell;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};
use std::rc::Rc;

use rustc_hash::FxHashMap;
use thiserror::Error;

pub use reorder::ReorderReport;
use store::{Edge, Store};

/// A variable identifier. Identifiers are stable under reordering; levels are not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reclamation {
    /// Free nodes as soon as their last reference goes away.
    #[default]
    Eager,
    /// Leave dead nodes in place and sweep them when the store grows.
    Deferred,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub reclamation: Reclamation,
    /// log2 of the computed-table size.
    pub cache_bits: u32,
    /// Sifting gives up on a direction once the store exceeds this factor
    /// times the best size seen.
    pub max_growth: f64,
    pub auto_reorder: bool,
    /// Live-node count that triggers the first automatic reordering; later
    /// triggers fire whenever the count doubles.
    pub reorder_threshold: usize,
    /// Minimum number of freed nodes before slots are recycled (and, for
    /// deferred reclamation, the store size that triggers a sweep).
    pub gc_threshold: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            reclamation: Reclamation::Eager,
            cache_bits: 16,
            max_growth: 1.2,
            auto_reorder: false,
            reorder_threshold: 4096,
            gc_threshold: 8192,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("variable {0} is not registered with this manager")]
    UnregisteredVariable(VarId),
    #[error("operands belong to different managers")]
    ManagerMismatch,
    #[error("care set is empty")]
    EmptyCareSet,
    #[error("function is unsatisfiable")]
    Unsatisfiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Xor,
}

/// A conjunction of literals, ordered by level at the time it was built.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cube(pub Vec<(VarId, bool)>);

impl Cube {
    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone)]
pub struct BddManager {
    store: Rc<RefCell<Store>>,
}

impl fmt::Debug for BddManager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.store.borrow();
        f.debug_struct("BddManager")
            .field("vars", &s.num_vars())
            .field("live_nodes", &s.live)
            .finish()
    }
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

/// A set of variables, kept as a positive cube for quantification.
#[derive(Clone, Debug)]
pub struct VarSet {
    cube: Bdd,
    vars: Vec<VarId>,
}

impl VarSet {
    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

impl BddManager {
    pub fn new() -> Self {
        Self::with_config(Config::default())
    }

    pub fn with_config(config: Config) -> Self {
        BddManager {
            store: Rc::new(RefCell::new(Store::new(config))),
        }
    }

    pub fn config(&self) -> Config {
        self.store.borrow().config
    }

    pub fn set_auto_reorder(&self, on: bool) {
        self.store.borrow_mut().config.auto_reorder = on;
    }

    pub fn new_var(&self) -> VarId {
        VarId(self.store.borrow_mut().new_var())
    }

    pub fn num_vars(&self) -> usize {
        self.store.borrow().num_vars()
    }

    fn check_var(&self, v: VarId) -> Result<(), BddError> {
        if (v.0 as usize) < self.num_vars() {
            Ok(())
        } else {
            Err(BddError::UnregisteredVariable(v))
        }
    }

    fn wrap(&self, e: Edge) -> Bdd {
        self.store.borrow_mut().inc(e);
        Bdd {
            mgr: self.clone(),
            edge: e,
        }
    }

    /// Runs `f` as one public operation: reordering and garbage collection
    /// may happen before it, intermediate nodes are reclaimed after it.
    fn op(&self, f: impl FnOnce(&mut Store) -> Edge) -> Bdd {
        let e = {
            let mut s = self.store.borrow_mut();
            if s.config.auto_reorder && s.live > s.reorder_threshold {
                let report = s.sift();
                s.reorder_threshold = (2 * report.nodes_after).max(s.config.reorder_threshold);
                log::debug!("automatic reordering: {report:?}");
            }
            s.begin_op();
            let e = f(&mut s);
            s.inc(e);
            s.end_op();
            e
        };
        Bdd {
            mgr: self.clone(),
            edge: e,
        }
    }

    pub fn constant(&self, value: bool) -> Bdd {
        self.wrap(if value { Edge::TRUE } else { Edge::FALSE })
    }

    pub fn tt(&self) -> Bdd {
        self.constant(true)
    }

    pub fn ff(&self) -> Bdd {
        self.constant(false)
    }

    /// The projection function of `v`.
    pub fn var(&self, v: VarId) -> Result<Bdd, BddError> {
        self.check_var(v)?;
        Ok(self.op(|s| s.mk(v.0, Edge::FALSE, Edge::TRUE)))
    }

    pub fn literal(&self, v: VarId, positive: bool) -> Result<Bdd, BddError> {
        Ok(self.var(v)?.not_if(!positive))
    }

    pub fn var_set(&self, vars: &[VarId]) -> Result<VarSet, BddError> {
        for &v in vars {
            self.check_var(v)?;
        }
        let raw: Vec<u32> = vars.iter().map(|v| v.0).collect();
        let cube = self.op(|s| s.cube_of(&raw));
        let mut vars = vars.to_vec();
        vars.sort();
        vars.dedup();
        Ok(VarSet { cube, vars })
    }

    pub fn cube(&self, lits: &[(VarId, bool)]) -> Result<Bdd, BddError> {
        let mut acc = self.tt();
        for &(v, pos) in lits {
            acc = acc.and(&self.literal(v, pos)?);
        }
        Ok(acc)
    }

    pub fn level_of(&self, v: VarId) -> u32 {
        self.store.borrow().var2level[v.0 as usize]
    }

    /// Variables from top to bottom.
    pub fn order(&self) -> Vec<VarId> {
        self.store.borrow().level2var.iter().map(|&v| VarId(v)).collect()
    }

    /// Nodes currently in the store (dead but unswept nodes included under
    /// deferred reclamation).
    pub fn node_count(&self) -> usize {
        self.store.borrow().live
    }

    pub fn peak_node_count(&self) -> usize {
        self.store.borrow().peak
    }

    /// Distinct nodes reachable from the given functions.
    pub fn shared_size(&self, fs: &[&Bdd]) -> usize {
        let edges: Vec<Edge> = fs.iter().map(|f| f.edge).collect();
        self.store.borrow().count_nodes(&edges)
    }

    pub fn collect_garbage(&self) {
        self.store.borrow_mut().collect_garbage();
    }

    pub fn reorder(&self) -> ReorderReport {
        let mut s = self.store.borrow_mut();
        let r = s.sift();
        s.reorder_threshold = (2 * r.nodes_after).max(s.config.reorder_threshold);
        r
    }

    pub fn reorderings(&self) -> usize {
        self.store.borrow().reorderings
    }

    /// Moves `v` to `level` by adjacent swaps.
    pub fn move_to_level(&self, v: VarId, level: u32) {
        let mut s = self.store.borrow_mut();
        s.collect_garbage();
        let mut cur = s.var2level[v.0 as usize];
        while cur < level {
            s.swap_levels(cur);
            cur += 1;
        }
        while cur > level {
            s.swap_levels(cur - 1);
            cur -= 1;
        }
        s.flush();
    }

    /// Structural invariants of the store; used by tests after public calls.
    pub fn audit(&self) -> Result<(), String> {
        self.store.borrow().audit()
    }

    /// Simultaneous substitution `f[v <- g]` for every pair in `subs`.
    pub fn vector_compose(&self, f: &Bdd, subs: &[(VarId, &Bdd)]) -> Bdd {
        self.same(f);
        let mut table = vec![None; self.num_vars()];
        for (v, g) in subs {
            self.same(g);
            table[v.0 as usize] = Some(g.edge);
        }
        self.op(|s| s.compose(f.edge, &table))
    }

    fn same(&self, f: &Bdd) {
        assert!(
            Rc::ptr_eq(&self.store, &f.mgr.store),
            "{}",
            BddError::ManagerMismatch
        );
    }

    pub fn owns(&self, f: &Bdd) -> bool {
        Rc::ptr_eq(&self.store, &f.mgr.store)
    }

    pub fn to_dot(&self, fs: &[(&str, &Bdd)]) -> String {
        use std::fmt::Write;
        let s = self.store.borrow();
        let mut out = String::from("digraph bdd {\n  node [shape=circle];\n  n0 [shape=box,label=\"1\"];\n");
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack: Vec<u32> = Vec::new();
        for (name, f) in fs {
            let _ = writeln!(out, "  \"{name}\" [shape=plaintext];");
            let style = if f.edge.is_complement() { "dotted" } else { "solid" };
            let _ = writeln!(out, "  \"{name}\" -> n{} [style={style}];", f.edge.index());
            stack.push(f.edge.index());
        }
        while let Some(i) = stack.pop() {
            if i == 0 || !seen.insert(i) {
                continue;
            }
            let n = s.nodes[i as usize];
            let _ = writeln!(out, "  n{i} [label=\"x{}\"];", n.var);
            let _ = writeln!(out, "  n{i} -> n{} [style=dashed];", n.low.index());
            let style = if n.high.is_complement() { "dotted" } else { "solid" };
            let _ = writeln!(out, "  n{i} -> n{} [style={style}];", n.high.index());
            stack.push(n.low.index());
            stack.push(n.high.index());
        }
        out.push_str("}\n");
        out
    }
}

/// A handle to a function in a [`BddManager`].
pub struct Bdd {
    mgr: BddManager,
    edge: Edge,
}

impl Clone for Bdd {
    fn clone(&self) -> Self {
        self.mgr.wrap(self.edge)
    }
}

impl Drop for Bdd {
    fn drop(&mut self) {
        if let Ok(mut s) = self.mgr.store.try_borrow_mut() {
            s.dec(self.edge);
        }
    }
}

impl PartialEq for Bdd {
    fn eq(&self, other: &Self) -> bool {
        self.edge == other.edge && Rc::ptr_eq(&self.mgr.store, &other.mgr.store)
    }
}

impl Eq for Bdd {}

impl std::hash::Hash for Bdd {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.edge.hash(state);
    }
}

impl fmt::Debug for Bdd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            write!(f, "Bdd(true)")
        } else if self.is_false() {
            write!(f, "Bdd(false)")
        } else {
            write!(f, "Bdd(#{}, {} nodes)", self.edge.0, self.node_count())
        }
    }
}

impl Bdd {
    pub fn manager(&self) -> &BddManager {
        &self.mgr
    }

    pub fn is_true(&self) -> bool {
        self.edge == Edge::TRUE
    }

    pub fn is_false(&self) -> bool {
        self.edge == Edge::FALSE
    }

    pub fn is_const(&self) -> bool {
        self.edge.is_const()
    }

    /// Constant-time negation.
    pub fn not(&self) -> Bdd {
        self.mgr.wrap(self.edge.not())
    }

    pub fn not_if(&self, c: bool) -> Bdd {
        self.mgr.wrap(self.edge.not_if(c))
    }

    pub fn apply(&self, op: BinOp, g: &Bdd) -> Result<Bdd, BddError> {
        if !self.mgr.owns(g) {
            return Err(BddError::ManagerMismatch);
        }
        let (f, g) = (self.edge, g.edge);
        Ok(match op {
            BinOp::And => self.mgr.op(|s| s.and(f, g)),
            BinOp::Or => self.mgr.op(|s| s.or(f, g)),
            BinOp::Xor => self.mgr.op(|s| s.xor(f, g)),
        })
    }

    /// # Panics
    /// If `g` belongs to another manager; [`Bdd::apply`] reports that as an error.
    pub fn and(&self, g: &Bdd) -> Bdd {
        self.apply(BinOp::And, g).unwrap()
    }

    pub fn or(&self, g: &Bdd) -> Bdd {
        self.apply(BinOp::Or, g).unwrap()
    }

    pub fn xor(&self, g: &Bdd) -> Bdd {
        self.apply(BinOp::Xor, g).unwrap()
    }

    pub fn iff(&self, g: &Bdd) -> Bdd {
        self.xor(g).not()
    }

    pub fn implies(&self, g: &Bdd) -> Bdd {
        self.and(&g.not()).not()
    }

    /// Whether `self => g` holds everywhere.
    pub fn leq(&self, g: &Bdd) -> bool {
        self.and(&g.not()).is_false()
    }

    pub fn ite(&self, then: &Bdd, els: &Bdd) -> Bdd {
        self.mgr.same(then);
        self.mgr.same(els);
        let (f, g, h) = (self.edge, then.edge, els.edge);
        self.mgr.op(|s| s.ite(f, g, h))
    }

    pub fn exists(&self, vars: &VarSet) -> Bdd {
        self.mgr.same(&vars.cube);
        let (f, c) = (self.edge, vars.cube.edge);
        self.mgr.op(|s| s.exists(f, c))
    }

    pub fn forall(&self, vars: &VarSet) -> Bdd {
        self.mgr.same(&vars.cube);
        let (f, c) = (self.edge, vars.cube.edge);
        self.mgr.op(|s| s.forall(f, c))
    }

    /// `exists vars. self & g`, computed in one pass.
    pub fn and_exists(&self, g: &Bdd, vars: &VarSet) -> Bdd {
        self.mgr.same(g);
        self.mgr.same(&vars.cube);
        let (f, g, c) = (self.edge, g.edge, vars.cube.edge);
        self.mgr.op(|s| s.and_exists(f, g, c))
    }

    pub fn compose(&self, subs: &[(VarId, &Bdd)]) -> Bdd {
        self.mgr.vector_compose(self, subs)
    }

    /// Shannon cofactor with respect to one variable.
    pub fn cofactor(&self, v: VarId, value: bool) -> Bdd {
        let c = self.mgr.constant(value);
        self.compose(&[(v, &c)])
    }

    /// Generalized cofactor (restrict): agrees with `self` wherever `care` holds.
    pub fn restrict(&self, care: &Bdd) -> Result<Bdd, BddError> {
        if !self.mgr.owns(care) {
            return Err(BddError::ManagerMismatch);
        }
        if care.is_false() {
            return Err(BddError::EmptyCareSet);
        }
        let (f, c) = (self.edge, care.edge);
        Ok(self.mgr.op(|s| s.restrict(f, c)))
    }

    pub fn support(&self) -> Vec<VarId> {
        self.mgr
            .store
            .borrow()
            .support(self.edge)
            .into_iter()
            .map(VarId)
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.mgr.store.borrow().count_nodes(&[self.edge])
    }

    /// The top variable with the else and then cofactors, or `None` for a constant.
    pub fn top(&self) -> Option<(VarId, Bdd, Bdd)> {
        if self.edge.is_const() {
            return None;
        }
        let (var, lo, hi) = {
            let s = self.mgr.store.borrow();
            let (lo, hi) = s.children(self.edge);
            (s.var_of(self.edge), lo, hi)
        };
        Some((VarId(var), self.mgr.wrap(lo), self.mgr.wrap(hi)))
    }

    /// Whether the root edge carries a complement mark; `f` and `!f` share
    /// nodes and differ only in this bit.
    pub fn is_complemented(&self) -> bool {
        self.edge.is_complement()
    }

    /// Number of satisfying assignments over `nvars` variables (which must
    /// include the support).
    pub fn sat_count(&self, nvars: usize) -> f64 {
        let mut memo = FxHashMap::default();
        self.mgr.store.borrow().density(self.edge, &mut memo) * 2f64.powi(nvars as i32)
    }

    /// Evaluates under an assignment given by variable id.
    pub fn eval(&self, value: impl Fn(VarId) -> bool) -> bool {
        self.mgr.store.borrow().eval(self.edge, &|v| value(VarId(v)))
    }

    /// Evaluates with `values[v]` the value of variable `v`.
    pub fn eval_slice(&self, values: &[bool]) -> bool {
        self.eval(|v| values[v.0 as usize])
    }

    /// A satisfying assignment over `vars`, smallest in level order with
    /// 0 preferred. Support variables outside `vars` are chosen the same way
    /// but not reported.
    pub fn pick_minterm(&self, vars: &[VarId]) -> Result<Vec<bool>, BddError> {
        if self.is_false() {
            return Err(BddError::Unsatisfiable);
        }
        let s = self.mgr.store.borrow();
        let mut chosen: FxHashMap<u32, bool> = FxHashMap::default();
        let mut e = self.edge;
        while !e.is_const() {
            let var = s.var_of(e);
            let (lo, hi) = s.children(e);
            if lo != Edge::FALSE {
                chosen.insert(var, false);
                e = lo;
            } else {
                chosen.insert(var, true);
                e = hi;
            }
        }
        debug_assert_eq!(e, Edge::TRUE);
        Ok(vars
            .iter()
            .map(|v| chosen.get(&v.0).copied().unwrap_or(false))
            .collect())
    }

    /// A prime implicant with few literals: start from a shortest path to
    /// true, then drop literals bottom-up while the cube still implies `self`.
    pub fn prime_implicant(&self) -> Result<Cube, BddError> {
        if self.is_false() {
            return Err(BddError::Unsatisfiable);
        }
        let path = {
            let s = self.mgr.store.borrow();
            shortest_path(&s, self.edge)
        };
        let mgr = &self.mgr;
        let mut lits: Vec<(VarId, bool)> = path;
        // lits are top-down; try removing the deepest first
        let mut i = lits.len();
        while i > 0 {
            i -= 1;
            let mut trial = lits.clone();
            trial.remove(i);
            let cube = mgr.cube(&trial).expect("path variables are registered");
            if cube.leq(self) {
                lits = trial;
            }
        }
        Ok(Cube(lits))
    }
}

/// Literals of a shortest path from `f` to the true terminal, top-down.
fn shortest_path(s: &Store, f: Edge) -> Vec<(VarId, bool)> {
    fn dist(s: &Store, e: Edge, memo: &mut FxHashMap<Edge, u32>) -> u32 {
        if e == Edge::TRUE {
            return 0;
        }
        if e == Edge::FALSE {
            return u32::MAX;
        }
        if let Some(&d) = memo.get(&e) {
            return d;
        }
        let (lo, hi) = s.children(e);
        let d = dist(s, lo, memo).min(dist(s, hi, memo)).saturating_add(1);
        memo.insert(e, d);
        d
    }
    let mut memo = FxHashMap::default();
    let mut out = Vec::new();
    let mut e = f;
    while !e.is_const() {
        let (lo, hi) = s.children(e);
        let var = VarId(s.var_of(e));
        if dist(s, lo, &mut memo) <= dist(s, hi, &mut memo) {
            out.push((var, false));
            e = lo;
        } else {
            out.push((var, true));
            e = hi;
        }
    }
    out
}

impl Not for &Bdd {
    type Output = Bdd;
    fn not(self) -> Bdd {
        Bdd::not(self)
    }
}

impl BitAnd for &Bdd {
    type Output = Bdd;
    fn bitand(self, rhs: &Bdd) -> Bdd {
        self.and(rhs)
    }
}

impl BitOr for &Bdd {
    type Output = Bdd;
    fn bitor(self, rhs: &Bdd) -> Bdd {
        self.or(rhs)
    }
}

impl BitXor for &Bdd {
    type Output = Bdd;
    fn bitxor(self, rhs: &Bdd) -> Bdd {
        self.xor(rhs)
    }
}

#[cfg(test)]
mod tests;
