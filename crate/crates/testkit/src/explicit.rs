//! Gate-level circuit evaluation and explicit-state safety games.

use std::collections::HashMap;

use syntkit::aiger::{Circuit, Literal, SymbolKind};

/// Evaluates a circuit one step at a time by chasing gate definitions.
pub struct Evaluator<'a> {
    c: &'a Circuit,
    gate: HashMap<u32, (Literal, Literal)>,
    input_of: HashMap<u32, usize>,
    latch_of: HashMap<u32, usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(c: &'a Circuit) -> Self {
        Evaluator {
            c,
            gate: c.ands.iter().map(|g| (g.lhs.var(), (g.rhs0, g.rhs1))).collect(),
            input_of: c.inputs.iter().enumerate().map(|(i, l)| (l.var(), i)).collect(),
            latch_of: c.latches.iter().enumerate().map(|(i, l)| (l.state.var(), i)).collect(),
        }
    }

    fn value(&self, l: Literal, inputs: &[bool], state: &[bool], memo: &mut HashMap<u32, bool>) -> bool {
        let v = l.var();
        let base = if v == 0 {
            false
        } else if let Some(&i) = self.input_of.get(&v) {
            inputs[i]
        } else if let Some(&i) = self.latch_of.get(&v) {
            state[i]
        } else if let Some(&b) = memo.get(&v) {
            b
        } else {
            let (a, b) = self.gate[&v];
            let r = self.value(a, inputs, state, memo) && self.value(b, inputs, state, memo);
            memo.insert(v, r);
            r
        };
        base ^ l.is_negated()
    }

    /// Outputs and next state for one step.
    pub fn step(&self, inputs: &[bool], state: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let mut memo = HashMap::new();
        let outs = self
            .c
            .outputs
            .iter()
            .map(|&o| self.value(o, inputs, state, &mut memo))
            .collect();
        let next = self
            .c
            .latches
            .iter()
            .map(|l| self.value(l.next, inputs, state, &mut memo))
            .collect();
        (outs, next)
    }

    /// Outputs per step and the state at the start of each step, from all zeros.
    pub fn run(&self, word: &[Vec<bool>]) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
        let mut state = vec![false; self.c.latches.len()];
        let mut outs = Vec::new();
        let mut states = Vec::new();
        for x in word {
            let (o, n) = self.step(x, &state);
            outs.push(o);
            states.push(std::mem::replace(&mut state, n));
        }
        (outs, states)
    }
}

fn bits(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> i & 1 == 1).collect()
}

#[derive(Debug, Clone)]
pub struct ExplicitSolution {
    pub realizable: bool,
    /// Reachable states (latch vectors) with their winning status.
    pub states: Vec<(Vec<bool>, bool)>,
}

/// Solves the safety game over the states reachable from the initial state.
/// Inputs named `controllable_*` belong to the system. Returns `None` when
/// more than `max_edges` state/input pairs would be needed.
pub fn solve_explicit(c: &Circuit, max_edges: usize) -> Option<ExplicitSolution> {
    assert_eq!(c.outputs.len(), 1, "one error output");
    let ev = Evaluator::new(c);
    let names: Vec<bool> = (0..c.inputs.len())
        .map(|i| {
            c.symbols
                .get(&(SymbolKind::Input, i))
                .is_some_and(|n| n.starts_with("controllable_"))
        })
        .collect();
    let ctrl: Vec<usize> = (0..c.inputs.len()).filter(|&i| names[i]).collect();
    let unc: Vec<usize> = (0..c.inputs.len()).filter(|&i| !names[i]).collect();
    let nu = 1usize << unc.len();
    let nc = 1usize << ctrl.len();
    let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut states: Vec<Vec<bool>> = vec![vec![false; c.latches.len()]];
    index.insert(states[0].clone(), 0);
    // moves[s][u * nc + c] = None for error, Some(next) otherwise
    let mut moves: Vec<Vec<Option<usize>>> = Vec::new();
    let mut s = 0;
    while s < states.len() {
        if (s + 1) * nu * nc > max_edges {
            return None;
        }
        let mut row = Vec::with_capacity(nu * nc);
        for u in 0..nu {
            for cv in 0..nc {
                let mut x = vec![false; c.inputs.len()];
                for (k, b) in bits(u, unc.len()).into_iter().enumerate() {
                    x[unc[k]] = b;
                }
                for (k, b) in bits(cv, ctrl.len()).into_iter().enumerate() {
                    x[ctrl[k]] = b;
                }
                let (o, n) = ev.step(&x, &states[s]);
                if o[0] {
                    row.push(None);
                } else {
                    let next = *index.entry(n.clone()).or_insert_with(|| {
                        states.push(n);
                        states.len() - 1
                    });
                    row.push(Some(next));
                }
            }
        }
        moves.push(row);
        s += 1;
    }
    let mut losing = vec![false; states.len()];
    loop {
        let mut changed = false;
        for s in 0..states.len() {
            if losing[s] {
                continue;
            }
            let forced = (0..nu).any(|u| {
                (0..nc).all(|cv| match moves[s][u * nc + cv] {
                    None => true,
                    Some(n) => losing[n],
                })
            });
            if forced {
                losing[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Some(ExplicitSolution {
        realizable: !losing[0],
        states: states.into_iter().zip(losing.iter().map(|&l| !l)).collect(),
    })
}

/// Whether the output of an input-driven circuit stays false on every
/// reachable state, or `None` past `max_states`.
pub fn always_safe(c: &Circuit, max_states: usize) -> Option<bool> {
    let ev = Evaluator::new(c);
    let n = c.inputs.len();
    let mut seen: HashMap<Vec<bool>, ()> = HashMap::new();
    let mut todo = vec![vec![false; c.latches.len()]];
    seen.insert(todo[0].clone(), ());
    while let Some(s) = todo.pop() {
        for x in 0..1usize << n {
            let (o, next) = ev.step(&bits(x, n), &s);
            if o.iter().any(|&b| b) {
                return Some(false);
            }
            if !seen.contains_key(&next) {
                if seen.len() >= max_states {
                    return None;
                }
                seen.insert(next.clone(), ());
                todo.push(next);
            }
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use syntkit::aiger::AigBuilder;

    #[test]
    fn toggle_game() {
        // err = l; l' = x & !c: the system can always keep l low
        let mut b = AigBuilder::new();
        let x = b.input("x");
        let c = b.input("controllable_c");
        let l = b.latch("l");
        let n = b.and(x, !c);
        b.set_next(l, n);
        b.output(l, "err");
        let circ = b.finish();
        let s = solve_explicit(&circ, 1000).unwrap();
        assert!(s.realizable);
        assert_eq!(always_safe(&circ, 10), Some(false));
    }

    #[test]
    fn environment_wins_without_control() {
        let mut b = AigBuilder::new();
        let x = b.input("x");
        let l = b.latch("l");
        b.set_next(l, x);
        b.output(l, "err");
        assert!(!solve_explicit(&b.finish(), 1000).unwrap().realizable);
    }
}
