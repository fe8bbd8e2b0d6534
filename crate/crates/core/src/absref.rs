//! Abstraction refinement by latch dropping. Dropped latches take arbitrary
//! values in every round; the must and may predecessors resolve that freedom
//! against and in favour of the system, bracketing the concrete winning region.

use thiserror::Error;

use crate::bdd::{Bdd, VarId, VarSet};
use crate::clock::Stopwatch;
use crate::game::{GameResult, SafetyGame};

/// Latch positions kept exact; all others are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction {
    pub precise: Vec<usize>,
}

impl Abstraction {
    pub fn dropped(&self, g: &SafetyGame) -> Vec<usize> {
        (0..g.latches.len())
            .filter(|i| self.precise.binary_search(i).is_err())
            .collect()
    }

    fn dropped_vars(&self, g: &SafetyGame) -> Vec<VarId> {
        self.dropped(g).into_iter().map(|i| g.latches[i]).collect()
    }

    pub fn is_exact(&self, g: &SafetyGame) -> bool {
        self.precise.len() == g.latches.len()
    }
}

#[derive(Debug, Clone)]
pub struct MayMustRegions {
    /// Surely winning (`W^M`), over the precise latches.
    pub must: Bdd,
    /// Possibly winning (`W^m`), over the precise latches.
    pub may: Bdd,
    pub iterations: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RefineError {
    #[error("the may/must boundary is empty")]
    EmptyBoundary,
}

/// Keeps the latches the error output reads.
pub fn initial_abstraction(g: &SafetyGame) -> Abstraction {
    Abstraction {
        precise: g.latch_positions_in(&g.error),
    }
}

struct Quantifiers {
    /// `X_u` together with the dropped latches.
    universal: VarSet,
    /// `X_c` together with the dropped latches.
    existential: VarSet,
}

fn quantifiers(g: &SafetyGame, a: &Abstraction) -> Quantifiers {
    let m = g.manager();
    let dropped = a.dropped_vars(g);
    let mut u = g.uncontrollable.clone();
    u.extend_from_slice(&dropped);
    let mut c = g.controllable.clone();
    c.extend_from_slice(&dropped);
    Quantifiers {
        universal: m.var_set(&u).expect("registered"),
        existential: m.var_set(&c).expect("registered"),
    }
}

fn must_step(g: &SafetyGame, q: &Quantifiers, s: &Bdd) -> Bdd {
    g.error
        .not()
        .and_exists(&g.substitute(s), g.controllable_set())
        .forall(&q.universal)
}

fn may_step(g: &SafetyGame, q: &Quantifiers, s: &Bdd) -> Bdd {
    g.error
        .not()
        .and_exists(&g.substitute(s), &q.existential)
        .forall(g.uncontrollable_set())
}

/// `forall x_u, d exists x_c : !error & S(f)` for `S` over precise latches.
pub fn cpre_must(g: &SafetyGame, a: &Abstraction, s: &Bdd) -> Bdd {
    must_step(g, &quantifiers(g, a), s)
}

/// `forall x_u exists x_c, d : !error & S(f)` for `S` over precise latches.
pub fn cpre_may(g: &SafetyGame, a: &Abstraction, s: &Bdd) -> Bdd {
    may_step(g, &quantifiers(g, a), s)
}

fn greatest(g: &SafetyGame, step: impl Fn(&Bdd) -> Bdd) -> (Bdd, usize) {
    let mut z = g.manager().tt();
    let mut n = 0;
    loop {
        let next = z.and(&step(&z));
        n += 1;
        if next == z {
            return (z, n);
        }
        z = next;
    }
}

pub fn solve_abstract(g: &SafetyGame, a: &Abstraction) -> MayMustRegions {
    let q = quantifiers(g, a);
    let (must, i) = greatest(g, |z| must_step(g, &q, z));
    let (may, j) = greatest(g, |z| may_step(g, &q, z));
    MayMustRegions {
        must,
        may,
        iterations: i + j,
    }
}

/// Adds the dropped latches occurring in a prime implicant of the states
/// that are not surely winning but can be forced into the surely winning set.
pub fn refine(g: &SafetyGame, a: &Abstraction, r: &MayMustRegions) -> Result<Abstraction, RefineError> {
    let boundary = r.must.not().and(&g.cpre_step(&r.must));
    let cube = boundary
        .prime_implicant()
        .map_err(|_| RefineError::EmptyBoundary)?;
    let dropped = a.dropped(g);
    let mut precise = a.precise.clone();
    for v in cube.vars() {
        if let Some(&i) = dropped.iter().find(|&&i| g.latches[i] == v) {
            precise.push(i);
        }
    }
    if precise.len() == a.precise.len() {
        return Err(RefineError::EmptyBoundary);
    }
    precise.sort_unstable();
    Ok(Abstraction { precise })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsrefEnd {
    AbstractWin,
    AbstractLoss,
    /// The boundary was empty; the concrete fixpoint decided.
    Fallback,
}

#[derive(Debug, Clone)]
pub struct AbsrefOutcome {
    pub result: GameResult,
    pub refinements: usize,
    pub end: AbsrefEnd,
}

/// The refinement loop, reporting every abstraction and its regions.
pub fn solve_absref_observed(
    g: &SafetyGame,
    exact_region: bool,
    mut observe: impl FnMut(&Abstraction, &MayMustRegions),
) -> AbsrefOutcome {
    let sw = Stopwatch::start();
    let mut a = initial_abstraction(g);
    let mut iterations = 0;
    let mut refinements = 0;
    loop {
        let r = solve_abstract(g, &a);
        observe(&a, &r);
        iterations += r.iterations;
        if g.init.leq(&r.must) {
            let w = if exact_region {
                g.solve_classic_seeded(&r.must).winning_region
            } else {
                r.must
            };
            return AbsrefOutcome {
                result: g.result_with(w, iterations, sw, vec![g.error.not()]),
                refinements,
                end: AbsrefEnd::AbstractWin,
            };
        }
        if !g.init.and(&r.may.not()).is_false() {
            return AbsrefOutcome {
                result: g.result_with(r.must, iterations, sw, vec![g.error.not()]),
                refinements,
                end: AbsrefEnd::AbstractLoss,
            };
        }
        match refine(g, &a, &r) {
            Ok(next) => {
                debug_assert!(next.precise.len() > a.precise.len());
                a = next;
                refinements += 1;
            }
            Err(RefineError::EmptyBoundary) => {
                let mut result = g.solve_classic();
                result.iterations += iterations;
                result.stats.seconds = sw.seconds();
                return AbsrefOutcome {
                    result,
                    refinements,
                    end: AbsrefEnd::Fallback,
                };
            }
        }
    }
}

pub fn solve_absref(g: &SafetyGame, exact_region: bool) -> GameResult {
    solve_absref_observed(g, exact_region, |_, _| {}).result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiger::AigBuilder;
    use crate::bdd::Config;
    use crate::game::game_from_circuit;

    // err = a & !s. The system may latch s (which silences the error for
    // good) only while the toggling latch t is low, and the environment can
    // raise a only while t is high. Forgetting t loses the alternation.
    fn chain() -> SafetyGame {
        let mut b = AigBuilder::new();
        let x = b.input("x");
        let c = b.input("controllable_c");
        let a = b.latch("a");
        let s = b.latch("s");
        let t = b.latch("t");
        let na = b.and(x, t);
        b.set_next(a, na);
        let set = b.and(c, !t);
        let ns = b.or(s, set);
        b.set_next(s, ns);
        b.set_next(t, !t);
        let err = b.and(a, !s);
        b.output(err, "err");
        game_from_circuit(&b.finish(), Config::default()).unwrap()
    }

    #[test]
    fn initial_abstraction_keeps_error_latches() {
        let g = chain();
        assert_eq!(initial_abstraction(&g).precise, vec![0, 1]);
    }

    #[test]
    fn exact_abstraction_matches_cpre() {
        let g = chain();
        let a = Abstraction { precise: vec![0, 1, 2] };
        let m = g.manager();
        let l0 = m.var(g.latches[1]).unwrap();
        for s in [m.tt(), m.ff(), l0.not(), l0.clone()] {
            assert_eq!(cpre_must(&g, &a, &s), g.cpre_step(&s));
            assert_eq!(cpre_may(&g, &a, &s), g.cpre_step(&s));
        }
        let r = solve_abstract(&g, &a);
        assert_eq!(r.must, g.solve_classic().winning_region);
        assert_eq!(r.may, r.must);
    }

    #[test]
    fn refinement_adds_the_deciding_latch() {
        let g = chain();
        let a = initial_abstraction(&g);
        let r = solve_abstract(&g, &a);
        assert!(r.must.leq(&r.may));
        assert!(!g.init.leq(&r.must));
        let next = refine(&g, &a, &r).unwrap();
        assert_eq!(next.precise, vec![0, 1, 2]);
        let out = solve_absref_observed(&g, false, |_, _| {});
        assert_eq!(out.end, AbsrefEnd::AbstractWin);
        assert_eq!(out.refinements, 1);
    }

    #[test]
    fn loop_agrees_with_classic() {
        let g = chain();
        let classic = g.solve_classic();
        let mut rounds = Vec::new();
        let out = solve_absref_observed(&g, true, |a, r| rounds.push((a.clone(), r.clone())));
        assert_eq!(out.result.realizable, classic.realizable);
        assert_eq!(out.result.winning_region, classic.winning_region);
        for (_, r) in &rounds {
            assert!(r.must.leq(&classic.winning_region));
            assert!(classic.winning_region.leq(&r.may));
        }
    }

    #[test]
    fn constant_errors_decide_in_first_round() {
        let g = chain();
        let m = g.manager();
        let out = solve_absref_observed(&g.with_error(m.ff()), false, |_, _| {});
        assert_eq!(out.end, AbsrefEnd::AbstractWin);
        assert_eq!(out.refinements, 0);
        assert!(out.result.winning_region.is_true());
        let out = solve_absref_observed(&g.with_error(m.tt()), false, |_, _| {});
        assert_eq!(out.end, AbsrefEnd::AbstractLoss);
        assert!(!out.result.realizable);
    }
}
