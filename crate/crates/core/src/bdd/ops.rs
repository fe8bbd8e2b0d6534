//! Recursive algorithms over raw edges. None of these touch external
//! reference counts; callers wrap results in handles.

use rustc_hash::FxHashMap;

use super::store::{Edge, Op, Store, TERMINAL_LEVEL};

impl Store {
    pub fn and(&mut self, f: Edge, g: Edge) -> Edge {
        if f == Edge::FALSE || g == Edge::FALSE || f == g.not() {
            return Edge::FALSE;
        }
        if f == Edge::TRUE || f == g {
            return g;
        }
        if g == Edge::TRUE {
            return f;
        }
        let (f, g) = if f < g { (f, g) } else { (g, f) };
        if let Some(r) = self.cache_get(Op::And, f, g, Edge::TRUE) {
            return r;
        }
        let top = self.level(f).min(self.level(g));
        let var = self.level2var[top as usize];
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let lo = self.and(f0, g0);
        let hi = self.and(f1, g1);
        let r = self.mk(var, lo, hi);
        self.cache_put(Op::And, f, g, Edge::TRUE, r);
        r
    }

    pub fn or(&mut self, f: Edge, g: Edge) -> Edge {
        self.and(f.not(), g.not()).not()
    }

    pub fn xor(&mut self, f: Edge, g: Edge) -> Edge {
        if f == g {
            return Edge::FALSE;
        }
        if f == g.not() {
            return Edge::TRUE;
        }
        if f.is_const() {
            return g.not_if(f == Edge::TRUE);
        }
        if g.is_const() {
            return f.not_if(g == Edge::TRUE);
        }
        let neg = f.is_complement() ^ g.is_complement();
        let (f, g) = (f.regular(), g.regular());
        let (f, g) = if f < g { (f, g) } else { (g, f) };
        if let Some(r) = self.cache_get(Op::Xor, f, g, Edge::TRUE) {
            return r.not_if(neg);
        }
        let top = self.level(f).min(self.level(g));
        let var = self.level2var[top as usize];
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let lo = self.xor(f0, g0);
        let hi = self.xor(f1, g1);
        let r = self.mk(var, lo, hi);
        self.cache_put(Op::Xor, f, g, Edge::TRUE, r);
        r.not_if(neg)
    }

    pub fn ite(&mut self, f: Edge, g: Edge, h: Edge) -> Edge {
        if f == Edge::TRUE {
            return g;
        }
        if f == Edge::FALSE {
            return h;
        }
        if g == h {
            return g;
        }
        if g == Edge::TRUE && h == Edge::FALSE {
            return f;
        }
        if g == Edge::FALSE && h == Edge::TRUE {
            return f.not();
        }
        if g == Edge::TRUE || g == f {
            return self.or(f, h);
        }
        if g == Edge::FALSE || g == f.not() {
            return self.and(f.not(), h);
        }
        if h == Edge::FALSE || h == f {
            return self.and(f, g);
        }
        if h == Edge::TRUE || h == f.not() {
            return self.or(f.not(), g);
        }
        if g == h.not() {
            return self.xor(f, h);
        }
        // normalize: regular condition, regular then-branch
        let (f, g, h) = if f.is_complement() {
            (f.not(), h, g)
        } else {
            (f, g, h)
        };
        let neg = g.is_complement();
        let (g, h) = (g.not_if(neg), h.not_if(neg));
        if let Some(r) = self.cache_get(Op::Ite, f, g, h) {
            return r.not_if(neg);
        }
        let top = self.level(f).min(self.level(g)).min(self.level(h));
        let var = self.level2var[top as usize];
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let (h0, h1) = self.cofactors(h, top);
        let lo = self.ite(f0, g0, h0);
        let hi = self.ite(f1, g1, h1);
        let r = self.mk(var, lo, hi);
        self.cache_put(Op::Ite, f, g, h, r);
        r.not_if(neg)
    }

    /// Skips cube variables above `level`.
    #[inline]
    fn advance_cube(&self, mut cube: Edge, level: u32) -> Edge {
        while cube != Edge::TRUE && self.level(cube) < level {
            cube = self.children(cube).1;
        }
        cube
    }

    pub fn exists(&mut self, f: Edge, cube: Edge) -> Edge {
        if f.is_const() {
            return f;
        }
        let top = self.level(f);
        let cube = self.advance_cube(cube, top);
        if cube == Edge::TRUE {
            return f;
        }
        if let Some(r) = self.cache_get(Op::Exists, f, cube, Edge::TRUE) {
            return r;
        }
        let var = self.level2var[top as usize];
        let (f0, f1) = self.children(f);
        let r = if self.level(cube) == top {
            let rest = self.children(cube).1;
            let lo = self.exists(f0, rest);
            if lo == Edge::TRUE {
                Edge::TRUE
            } else {
                let hi = self.exists(f1, rest);
                self.or(lo, hi)
            }
        } else {
            let lo = self.exists(f0, cube);
            let hi = self.exists(f1, cube);
            self.mk(var, lo, hi)
        };
        self.cache_put(Op::Exists, f, cube, Edge::TRUE, r);
        r
    }

    pub fn forall(&mut self, f: Edge, cube: Edge) -> Edge {
        self.exists(f.not(), cube).not()
    }

    /// `exists cube. f & g` without building the conjunction.
    pub fn and_exists(&mut self, f: Edge, g: Edge, cube: Edge) -> Edge {
        if f == Edge::FALSE || g == Edge::FALSE || f == g.not() {
            return Edge::FALSE;
        }
        if f == Edge::TRUE && g == Edge::TRUE {
            return Edge::TRUE;
        }
        if cube == Edge::TRUE {
            return self.and(f, g);
        }
        if f == Edge::TRUE || f == g {
            return self.exists(g, cube);
        }
        if g == Edge::TRUE {
            return self.exists(f, cube);
        }
        let top = self.level(f).min(self.level(g));
        let cube = self.advance_cube(cube, top);
        if cube == Edge::TRUE {
            return self.and(f, g);
        }
        let (f, g) = if f < g { (f, g) } else { (g, f) };
        if let Some(r) = self.cache_get(Op::AndExists, f, g, cube) {
            return r;
        }
        let var = self.level2var[top as usize];
        let (f0, f1) = self.cofactors(f, top);
        let (g0, g1) = self.cofactors(g, top);
        let r = if self.level(cube) == top {
            let rest = self.children(cube).1;
            let lo = self.and_exists(f0, g0, rest);
            if lo == Edge::TRUE {
                Edge::TRUE
            } else {
                let hi = self.and_exists(f1, g1, rest);
                self.or(lo, hi)
            }
        } else {
            let lo = self.and_exists(f0, g0, cube);
            let hi = self.and_exists(f1, g1, cube);
            self.mk(var, lo, hi)
        };
        self.cache_put(Op::AndExists, f, g, cube, r);
        r
    }

    /// Simultaneous substitution. `subs` is indexed by variable; `None`
    /// leaves the variable in place.
    pub fn compose(&mut self, f: Edge, subs: &[Option<Edge>]) -> Edge {
        let deepest = subs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(v, _)| self.var2level[v])
            .max();
        let Some(deepest) = deepest else {
            return f;
        };
        let mut memo = FxHashMap::default();
        self.compose_rec(f, subs, deepest, &mut memo)
    }

    fn compose_rec(
        &mut self,
        f: Edge,
        subs: &[Option<Edge>],
        deepest: u32,
        memo: &mut FxHashMap<Edge, Edge>,
    ) -> Edge {
        let lvl = self.level(f);
        if lvl == TERMINAL_LEVEL || lvl > deepest {
            return f;
        }
        let neg = f.is_complement();
        let reg = f.regular();
        if let Some(&r) = memo.get(&reg) {
            return r.not_if(neg);
        }
        let var = self.var_of(reg);
        let (lo, hi) = self.children(reg);
        let lo = self.compose_rec(lo, subs, deepest, memo);
        let hi = self.compose_rec(hi, subs, deepest, memo);
        let r = match subs.get(var as usize).copied().flatten() {
            Some(g) => self.ite(g, hi, lo),
            None => {
                let v = self.mk(var, Edge::FALSE, Edge::TRUE);
                self.ite(v, hi, lo)
            }
        };
        memo.insert(reg, r);
        r.not_if(neg)
    }

    /// Coudert-Madre restrict; `care` must not be false.
    pub fn restrict(&mut self, f: Edge, care: Edge) -> Edge {
        debug_assert!(care != Edge::FALSE);
        if care == Edge::TRUE || f.is_const() {
            return f;
        }
        if f == care {
            return Edge::TRUE;
        }
        if f == care.not() {
            return Edge::FALSE;
        }
        if let Some(r) = self.cache_get(Op::Restrict, f, care, Edge::TRUE) {
            return r;
        }
        let fl = self.level(f);
        let cl = self.level(care);
        let r = if cl < fl {
            let (c0, c1) = self.children(care);
            let c = self.or(c0, c1);
            self.restrict(f, c)
        } else {
            let var = self.level2var[fl as usize];
            let (f0, f1) = self.children(f);
            let (c0, c1) = self.cofactors(care, fl);
            if c0 == Edge::FALSE {
                self.restrict(f1, c1)
            } else if c1 == Edge::FALSE {
                self.restrict(f0, c0)
            } else {
                let lo = self.restrict(f0, c0);
                let hi = self.restrict(f1, c1);
                self.mk(var, lo, hi)
            }
        };
        self.cache_put(Op::Restrict, f, care, Edge::TRUE, r);
        r
    }

    /// Conjunction of positive literals, built bottom-up.
    pub fn cube_of(&mut self, vars: &[u32]) -> Edge {
        let mut vs: Vec<u32> = vars.to_vec();
        vs.sort_by_key(|&v| std::cmp::Reverse(self.var2level[v as usize]));
        vs.dedup();
        let mut acc = Edge::TRUE;
        for v in vs {
            acc = self.mk(v, Edge::FALSE, acc);
        }
        acc
    }

    pub fn support(&self, f: Edge) -> Vec<u32> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut vars = rustc_hash::FxHashSet::default();
        let mut stack = vec![f.regular()];
        while let Some(e) = stack.pop() {
            if e.is_const() || !seen.insert(e.index()) {
                continue;
            }
            let n = self.node(e);
            vars.insert(n.var);
            stack.push(n.low.regular());
            stack.push(n.high.regular());
        }
        let mut v: Vec<u32> = vars.into_iter().collect();
        v.sort_by_key(|&v| self.var2level[v as usize]);
        v
    }

    pub fn count_nodes(&self, roots: &[Edge]) -> usize {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut stack: Vec<Edge> = roots.iter().map(|e| e.regular()).collect();
        while let Some(e) = stack.pop() {
            if e.is_const() || !seen.insert(e.index()) {
                continue;
            }
            let n = self.node(e);
            stack.push(n.low.regular());
            stack.push(n.high.regular());
        }
        seen.len()
    }

    /// Fraction of all assignments satisfying `f`.
    pub fn density(&self, f: Edge, memo: &mut FxHashMap<u32, f64>) -> f64 {
        if f == Edge::TRUE {
            return 1.0;
        }
        if f == Edge::FALSE {
            return 0.0;
        }
        let p = match memo.get(&f.index()) {
            Some(&p) => p,
            None => {
                let n = *self.node(f);
                let p = 0.5 * (self.density(n.low, memo) + self.density(n.high, memo));
                memo.insert(f.index(), p);
                p
            }
        };
        if f.is_complement() {
            1.0 - p
        } else {
            p
        }
    }

    pub fn eval(&self, mut f: Edge, value: &dyn Fn(u32) -> bool) -> bool {
        while !f.is_const() {
            let var = self.var_of(f);
            let (lo, hi) = self.children(f);
            f = if value(var) { hi } else { lo };
        }
        f == Edge::TRUE
    }
}
