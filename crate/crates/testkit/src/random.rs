//! Small random safety games, for properties that should hold on any
//! circuit rather than just the generated families.

use rand::Rng;
use syntkit::aiger::{AigBuilder, Circuit, Literal};

/// A random game with the given numbers of uncontrollable inputs,
/// controllable inputs and latches. The error reads only the first latch
/// plus the inputs, so abstractions that drop latches are meaningful.
pub fn random_game(rng: &mut impl Rng, inputs: usize, controls: usize, latches: usize, gates: usize) -> Circuit {
    let mut b = AigBuilder::new();
    let mut ins: Vec<Literal> = (0..inputs).map(|i| b.input(format!("u{i}"))).collect();
    ins.extend((0..controls).map(|i| b.input(format!("controllable_c{i}"))));
    let ls: Vec<Literal> = (0..latches).map(|i| b.latch(format!("l{i}"))).collect();
    let mut pool: Vec<Literal> = ins.iter().chain(&ls).copied().collect();
    let pick = |rng: &mut dyn rand::RngCore, pool: &[Literal]| {
        let l = pool[rng.random_range(0..pool.len())];
        if rng.random() { !l } else { l }
    };
    for _ in 0..gates {
        let (x, y) = (pick(rng, &pool), pick(rng, &pool));
        let g = b.and(x, y);
        if !g.is_const() {
            pool.push(g);
        }
    }
    for &l in &ls {
        let next = pick(rng, &pool);
        b.set_next(l, next);
    }
    let mut err_pool = ins.clone();
    err_pool.push(ls[0]);
    let e1 = pick(rng, &err_pool);
    let e2 = pick(rng, &err_pool);
    let first = b.and(ls[0], e1);
    let err = b.and(first, e2);
    b.output(err, "err");
    b.finish()
}
