//! Solvers, synthesis and file handling on the generated desk corpus.

use syntkit::absref::solve_absref_observed;
use syntkit::aiger::{parse_aag, write_aag};
use syntkit::arena::{solve_circuit, Algorithm, Mode, SolverConfig};
use syntkit::bdd::Config;
use syntkit::benchgen::{desk_corpus, gen_cycle_sched, gen_mult_matrix};
use syntkit::compositional::{decompose_error, solve_subgames, DEFAULT_CAP};
use syntkit::game::game_from_circuit;
use syntkit::verifier::{check_syntactic, model_check, VerifyStatus};
use syntkit_testkit::explicit::{always_safe, solve_explicit};

#[test]
fn all_algorithms_agree_with_the_explicit_oracle() {
    let mut skipped = Vec::new();
    for (name, c) in desk_corpus() {
        let Some(oracle) = solve_explicit(&c, 1 << 20) else {
            skipped.push(name);
            continue;
        };
        for a in Algorithm::SEQUENTIAL {
            let out = solve_circuit(&SolverConfig::new(a.to_string(), a), &c).unwrap();
            assert_eq!(out.realizable, oracle.realizable, "{a} on {name}");
        }
    }
    assert!(skipped.is_empty(), "oracle gave up on {skipped:?}");
}

#[test]
fn synthesized_controllers_are_safe() {
    for (name, c) in desk_corpus() {
        for a in [Algorithm::Classic, Algorithm::Global, Algorithm::Absref] {
            let cfg = SolverConfig::new(a.to_string(), a).with_mode(Mode::Synthesis);
            let out = solve_circuit(&cfg, &c).unwrap();
            let Some(sol) = out.solution else { continue };
            assert!(check_syntactic(&c, &sol).passed(), "{a} on {name}");
            assert_eq!(model_check(&sol, 60.0).status, VerifyStatus::Verified, "{a} on {name}");
            if let Some(safe) = always_safe(&sol, 1 << 16) {
                assert!(safe, "{a} on {name}: explicit check found an error");
            }
            let back = parse_aag(&write_aag(&sol)).unwrap();
            assert_eq!(back, sol);
        }
    }
}

#[test]
fn decomposition_is_equivalent_and_subgames_avoid_their_error() {
    for (name, c) in desk_corpus() {
        let g = game_from_circuit(&c, Config::default()).unwrap();
        let parts = decompose_error(&c, DEFAULT_CAP).compile(&g, &c);
        let union = parts.iter().fold(g.manager().ff(), |acc, p| acc.or(p));
        assert_eq!(union, g.error, "{name}");
        for s in solve_subgames(&g, &parts, false) {
            assert!(s.w.and(&s.error).is_false(), "{name} subgame {}", s.index);
        }
    }
}

#[test]
fn absref_brackets_the_concrete_region() {
    for (name, c) in desk_corpus() {
        if c.inputs.len() + c.latches.len() > 12 {
            continue;
        }
        let g = game_from_circuit(&c, Config::default()).unwrap();
        let w = g.solve_classic().winning_region;
        let out = solve_absref_observed(&g, true, |_, r| {
            assert!(r.must.leq(&w), "{name}: must not inside W");
            assert!(w.leq(&r.may), "{name}: W not inside may");
        });
        assert_eq!(out.result.realizable, g.init.leq(&w), "{name}");
    }
}

#[test]
fn cycle_sched_verdict_matches_reachable_oracle() {
    let c = gen_cycle_sched(1, 1, 1).unwrap();
    let oracle = solve_explicit(&c, 1 << 22).expect("small enough");
    let g = game_from_circuit(&c, Config::default()).unwrap();
    assert_eq!(g.solve_classic().realizable, oracle.realizable);
}

#[test]
fn mult_instances_up_to_27_cells_are_realizable_and_verified() {
    for m in 1..=3 {
        for n in 1..=3 {
            for o in 1..=3 {
                if m * n * o > 8 {
                    continue;
                }
                let c = gen_mult_matrix(m, n, o).unwrap();
                let cfg = SolverConfig::new("g", Algorithm::Global).with_mode(Mode::Synthesis);
                let out = solve_circuit(&cfg, &c).unwrap();
                assert!(out.realizable);
                let sol = out.solution.unwrap();
                assert_eq!(model_check(&sol, 60.0).status, VerifyStatus::Verified, "{m}x{n}x{o}");
            }
        }
    }
}
