//! Each washing-cycle automaton, read off the latches, accepts exactly the
//! prefixes its expression matches.

use syntkit::benchgen::gen_cycle_sched_with_exprs;
use syntkit_testkit::washing::check_random_words;

#[test]
fn small_instances_match_the_expressions() {
    for (n, d, t) in [(1, 1, 1), (2, 2, 2), (3, 1, 2), (2, 3, 1)] {
        let cs = gen_cycle_sched_with_exprs(n, d, t).unwrap();
        let automata: Vec<(&str, &[usize])> =
            cs.exprs.iter().map(|e| (e.name.as_str(), e.accepting.as_slice())).collect();
        let seed = (n * 100 + d * 10 + t) as u64;
        check_random_words(&cs.circuit, &automata, (n, d, t), 300, seed).unwrap();
    }
}
