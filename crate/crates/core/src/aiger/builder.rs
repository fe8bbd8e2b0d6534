use rustc_hash::FxHashMap;

use super::{AndGate, Circuit, Latch, Literal, SymbolKind};

/// Incremental circuit construction with constant folding and structural
/// hashing. Variables are numbered in creation order, so every gate's
/// operands have smaller indices than the gate itself.
#[derive(Debug, Default)]
pub struct AigBuilder {
    next_var: u32,
    inputs: Vec<Literal>,
    latches: Vec<Latch>,
    outputs: Vec<Literal>,
    ands: Vec<AndGate>,
    strash: FxHashMap<(Literal, Literal), Literal>,
    circuit_symbols: Vec<((SymbolKind, usize), String)>,
    comments: Vec<String>,
}

impl AigBuilder {
    pub fn new() -> Self {
        AigBuilder {
            next_var: 1,
            ..Default::default()
        }
    }

    fn fresh(&mut self) -> Literal {
        let l = Literal::from_var(self.next_var, false);
        self.next_var += 1;
        l
    }

    pub fn input(&mut self, name: impl Into<String>) -> Literal {
        let l = self.fresh();
        self.circuit_symbols
            .push(((SymbolKind::Input, self.inputs.len()), name.into()));
        self.inputs.push(l);
        l
    }

    /// Adds a latch whose next-state function is set later with [`Self::set_next`].
    pub fn latch(&mut self, name: impl Into<String>) -> Literal {
        let l = self.fresh();
        self.circuit_symbols
            .push(((SymbolKind::Latch, self.latches.len()), name.into()));
        self.latches.push(Latch {
            state: l,
            next: Literal::FALSE,
        });
        l
    }

    pub fn set_next(&mut self, latch: Literal, next: Literal) {
        let l = self
            .latches
            .iter_mut()
            .find(|l| l.state == latch)
            .expect("not a latch of this builder");
        l.next = next;
    }

    pub fn output(&mut self, lit: Literal, name: impl Into<String>) {
        self.circuit_symbols
            .push(((SymbolKind::Output, self.outputs.len()), name.into()));
        self.outputs.push(lit);
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn gate_count(&self) -> usize {
        self.ands.len()
    }

    pub fn and(&mut self, a: Literal, b: Literal) -> Literal {
        if a == Literal::FALSE || b == Literal::FALSE || a == !b {
            return Literal::FALSE;
        }
        if a == Literal::TRUE || a == b {
            return b;
        }
        if b == Literal::TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&l) = self.strash.get(&key) {
            return l;
        }
        let lhs = self.fresh();
        self.ands.push(AndGate {
            lhs,
            rhs0: key.1,
            rhs1: key.0,
        });
        self.strash.insert(key, lhs);
        lhs
    }

    pub fn or(&mut self, a: Literal, b: Literal) -> Literal {
        !self.and(!a, !b)
    }

    pub fn xor(&mut self, a: Literal, b: Literal) -> Literal {
        let l = self.and(a, !b);
        let r = self.and(!a, b);
        self.or(l, r)
    }

    pub fn xnor(&mut self, a: Literal, b: Literal) -> Literal {
        !self.xor(a, b)
    }

    /// `if c then t else e`.
    pub fn ite(&mut self, c: Literal, t: Literal, e: Literal) -> Literal {
        if t == e {
            return t;
        }
        if t == !e {
            return self.xnor(c, t);
        }
        match (t, e) {
            (Literal::FALSE, _) => return self.and(!c, e),
            (Literal::TRUE, _) => return self.or(c, e),
            (_, Literal::FALSE) => return self.and(c, t),
            (_, Literal::TRUE) => return self.or(!c, t),
            _ => {}
        }
        let hi = self.and(c, t);
        let lo = self.and(!c, e);
        self.or(hi, lo)
    }

    pub fn and_all(&mut self, lits: impl IntoIterator<Item = Literal>) -> Literal {
        let mut acc = Literal::TRUE;
        for l in lits {
            acc = self.and(acc, l);
        }
        acc
    }

    pub fn or_all(&mut self, lits: impl IntoIterator<Item = Literal>) -> Literal {
        let mut acc = Literal::FALSE;
        for l in lits {
            acc = self.or(acc, l);
        }
        acc
    }

    pub fn finish(self) -> Circuit {
        Circuit {
            max_var: self.next_var - 1,
            inputs: self.inputs,
            latches: self.latches,
            outputs: self.outputs,
            ands: self.ands,
            symbols: self.circuit_symbols.into_iter().collect(),
            comments: self.comments,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_and_hashing() {
        let mut b = AigBuilder::new();
        let x = b.input("x");
        let y = b.input("y");
        assert_eq!(b.and(x, Literal::TRUE), x);
        assert_eq!(b.and(x, !x), Literal::FALSE);
        let g = b.and(x, y);
        assert_eq!(b.and(y, x), g);
        assert_eq!(b.gate_count(), 1);
        assert_eq!(b.xor(g, g), Literal::FALSE);
        assert_eq!(b.gate_count(), 1);
    }

    #[test]
    fn gates_are_topologically_numbered() {
        let mut b = AigBuilder::new();
        let x = b.input("x");
        let l = b.latch("l");
        let n = b.xor(x, l);
        b.set_next(l, n);
        b.output(l, "err");
        let c = b.finish();
        for g in &c.ands {
            assert!(g.lhs.var() > g.rhs0.var() && g.lhs.var() > g.rhs1.var());
        }
        assert_eq!(c.latches[0].next, n);
        assert_eq!(c.max_var as usize, 2 + c.ands.len());
    }
}
