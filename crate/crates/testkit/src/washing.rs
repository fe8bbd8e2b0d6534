//! The washing-cycle safety expressions, written out directly over the
//! input vector `push_1..n, fill_1..n, empty_1..n, light`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syntkit::aiger::Circuit;

use crate::explicit::Evaluator;
use crate::regex::{cats, or, prefix_matches, rep, times, Alphabet, Re};

pub struct Expressions {
    pub alphabet: Alphabet,
    pub exprs: Vec<(String, Re)>,
}

pub fn expressions(n: usize, d: usize, t: usize) -> Expressions {
    let k = d;
    let mut al = Alphabet::new();
    let any = al.sym(|_| true);
    let mut exprs = Vec::new();
    for i in 0..n {
        let (push, fill, empty) = (i, n + i, 2 * n + i);
        let pushed = al.sym(move |v| v[push]);
        let not_pushed = al.sym(move |v| !v[push]);
        let filled = al.sym(move |v| v[fill]);
        let not_filled = al.sym(move |v| !v[fill]);
        let emptied = al.sym(move |v| v[empty]);
        let not_emptied = al.sym(move |v| !v[empty]);
        let tank = i + 1;
        exprs.push((format!("A{tank}"), cats([rep(any.clone()), pushed, times(&not_filled, d)])));
        exprs.push((format!("B{tank}"), cats([rep(any.clone()), times(&not_pushed, d), filled.clone()])));
        exprs.push((
            format!("C{tank}"),
            cats([rep(any.clone()), filled.clone(), times(&any, k), not_emptied]),
        ));
        exprs.push((
            format!("Cp{tank}"),
            cats([rep(any.clone()), filled, times(&or(any.clone(), Re::Empty), k - 1), emptied]),
        ));
    }
    let light = 3 * n;
    let wrong_light = al.sym(move |v| v[light] != (n..2 * n).any(|f| v[f]));
    exprs.push(("D".into(), cats([rep(any.clone()), wrong_light])));
    let pipes: Vec<Vec<usize>> = (0..n).collect::<Vec<_>>().chunks(t).map(|c| c.to_vec()).collect();
    if pipes.iter().any(|p| p.len() > 1) {
        let two_at_once = al.sym(move |v| {
            pipes
                .iter()
                .any(|p| p.iter().filter(|&&i| v[n + i]).count() >= 2)
        });
        exprs.push(("E".into(), cats([rep(any), two_at_once])));
    }
    Expressions { alphabet: al, exprs }
}

/// Runs `words` random input words through `c` and compares every named
/// automaton (given by its accepting latch positions) with the matching
/// expression, one step late. The error output must be their union.
pub fn check_random_words(
    c: &Circuit,
    automata: &[(&str, &[usize])],
    (n, d, t): (usize, usize, usize),
    words: usize,
    seed: u64,
) -> Result<(), String> {
    let oracle = expressions(n, d, t);
    let names: Vec<&str> = oracle.exprs.iter().map(|e| e.0.as_str()).collect();
    let built: Vec<&str> = automata.iter().map(|a| a.0).collect();
    if names != built {
        return Err(format!("expression names differ: {names:?} vs {built:?}"));
    }
    let ev = Evaluator::new(c);
    let width = c.inputs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // long enough for every pattern to complete at least once
    let max_len = 2 * d + 3;
    for _ in 0..words {
        let len = rng.random_range(1..=max_len);
        let mut word: Vec<Vec<bool>> = (0..len).map(|_| (0..width).map(|_| rng.random()).collect()).collect();
        // one extra step so the last letter's effect reaches the latches
        word.push(vec![false; width]);
        let (outs, states) = ev.run(&word);
        if outs[0][0] {
            return Err(format!("error raised before any input: {word:?}"));
        }
        let mut any = vec![false; len];
        for ((_, re), (name, acc)) in oracle.exprs.iter().zip(automata) {
            let expect = prefix_matches(&oracle.alphabet, re, &word[..len]);
            for step in 0..len {
                let got = acc.iter().any(|&l| states[step + 1][l]);
                if got != expect[step] {
                    return Err(format!("{name} on {n}_{d}_{t}, prefix {}: {word:?}", step + 1));
                }
                any[step] |= expect[step];
            }
        }
        for step in 0..len {
            if outs[step + 1][0] != any[step] {
                return Err(format!("err output on {n}_{d}_{t}, prefix {}: {word:?}", step + 1));
            }
        }
    }
    Ok(())
}
