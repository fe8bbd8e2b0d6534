//! Regular expressions over input predicates, their position automata, and
//! the one-latch-per-state circuit encoding.

use crate::aiger::{AigBuilder, Literal};

/// A Boolean predicate over named input signals (by index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    True,
    Sig(usize),
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
    Ne(Box<Pred>, Box<Pred>),
}

impl Pred {
    pub fn sig(i: usize) -> Pred {
        Pred::Sig(i)
    }

    pub fn negate(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn eval(&self, v: &[bool]) -> bool {
        match self {
            Pred::True => true,
            Pred::Sig(i) => v[*i],
            Pred::Not(p) => !p.eval(v),
            Pred::And(ps) => ps.iter().all(|p| p.eval(v)),
            Pred::Or(ps) => ps.iter().any(|p| p.eval(v)),
            Pred::Ne(a, b) => a.eval(v) != b.eval(v),
        }
    }

    pub fn encode(&self, b: &mut AigBuilder, sigs: &[Literal]) -> Literal {
        match self {
            Pred::True => Literal::TRUE,
            Pred::Sig(i) => sigs[*i],
            Pred::Not(p) => !p.encode(b, sigs),
            Pred::And(ps) => {
                let ls: Vec<Literal> = ps.iter().map(|p| p.encode(b, sigs)).collect();
                b.and_all(ls)
            }
            Pred::Or(ps) => {
                let ls: Vec<Literal> = ps.iter().map(|p| p.encode(b, sigs)).collect();
                b.or_all(ls)
            }
            Pred::Ne(x, y) => {
                let (x, y) = (x.encode(b, sigs), y.encode(b, sigs));
                b.xor(x, y)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    Epsilon,
    Letter(Pred),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn letter(p: Pred) -> Regex {
        Regex::Letter(p)
    }

    pub fn star(r: Regex) -> Regex {
        Regex::Star(Box::new(r))
    }

    /// `r` repeated `n` times.
    pub fn power(r: Regex, n: usize) -> Regex {
        Regex::Concat(vec![r; n])
    }
}

/// A nondeterministic automaton whose edges carry input predicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicNfa {
    pub num_states: usize,
    pub initial: Vec<usize>,
    pub accepting: Vec<usize>,
    pub transitions: Vec<(usize, Pred, usize)>,
}

struct Positions {
    letters: Vec<Pred>,
}

/// nullable, first, last over position indices (1-based; 0 is the start state)
fn analyse(r: &Regex, pos: &mut Positions, follow: &mut Vec<Vec<usize>>) -> (bool, Vec<usize>, Vec<usize>) {
    match r {
        Regex::Epsilon => (true, vec![], vec![]),
        Regex::Letter(p) => {
            pos.letters.push(p.clone());
            follow.push(Vec::new());
            let i = pos.letters.len();
            (false, vec![i], vec![i])
        }
        Regex::Concat(rs) => {
            let mut nullable = true;
            let mut first = Vec::new();
            let mut last: Vec<usize> = Vec::new();
            for r in rs {
                let (n, f, l) = analyse(r, pos, follow);
                for &a in &last {
                    add_all(&mut follow[a - 1], &f);
                }
                if nullable {
                    add_all(&mut first, &f);
                }
                if n {
                    add_all(&mut last, &l);
                } else {
                    last = l;
                }
                nullable &= n;
            }
            (nullable, first, last)
        }
        Regex::Alt(rs) => {
            let mut nullable = false;
            let mut first = Vec::new();
            let mut last = Vec::new();
            for r in rs {
                let (n, f, l) = analyse(r, pos, follow);
                nullable |= n;
                add_all(&mut first, &f);
                add_all(&mut last, &l);
            }
            (nullable, first, last)
        }
        Regex::Star(r) => {
            let (_, f, l) = analyse(r, pos, follow);
            for &a in &l {
                add_all(&mut follow[a - 1], &f);
            }
            (true, f, l)
        }
    }
}

fn add_all(into: &mut Vec<usize>, from: &[usize]) {
    for &x in from {
        if !into.contains(&x) {
            into.push(x);
        }
    }
}

/// The position (Glushkov) automaton: one start state plus one state per
/// letter occurrence; entering a position reads its letter.
pub fn glushkov(r: &Regex) -> SymbolicNfa {
    let mut pos = Positions { letters: Vec::new() };
    let mut follow = Vec::new();
    let (nullable, first, last) = analyse(r, &mut pos, &mut follow);
    let mut transitions = Vec::new();
    for &p in &first {
        transitions.push((0, pos.letters[p - 1].clone(), p));
    }
    for (q, fs) in follow.iter().enumerate() {
        for &p in fs {
            transitions.push((q + 1, pos.letters[p - 1].clone(), p));
        }
    }
    let mut accepting = last;
    if nullable {
        accepting.push(0);
    }
    accepting.sort_unstable();
    SymbolicNfa {
        num_states: pos.letters.len() + 1,
        initial: vec![0],
        accepting,
        transitions,
    }
}

/// Adds one latch per automaton state. A state is occupied when its latch is
/// set, or at time 0 when it is initial (`boot` is the latch that turns 1
/// after the first step). Returns the disjunction of accepting latches, so it
/// reports a match one step after the last letter.
pub fn encode_nfa(b: &mut AigBuilder, nfa: &SymbolicNfa, name: &str, sigs: &[Literal], boot: Literal) -> (Literal, Vec<Literal>) {
    let latches: Vec<Literal> = (0..nfa.num_states)
        .map(|q| b.latch(format!("{name}_q{q}")))
        .collect();
    let occ: Vec<Literal> = (0..nfa.num_states)
        .map(|q| {
            if nfa.initial.contains(&q) {
                let fresh = !boot;
                b.or(latches[q], fresh)
            } else {
                latches[q]
            }
        })
        .collect();
    let mut into: Vec<Vec<Literal>> = vec![Vec::new(); nfa.num_states];
    for (q, p, r) in &nfa.transitions {
        let guard = p.encode(b, sigs);
        let lit = b.and(occ[*q], guard);
        into[*r].push(lit);
    }
    for (q, ins) in into.into_iter().enumerate() {
        let next = b.or_all(ins);
        b.set_next(latches[q], next);
    }
    let acc = b.or_all(nfa.accepting.iter().map(|&q| latches[q]));
    (acc, latches)
}
