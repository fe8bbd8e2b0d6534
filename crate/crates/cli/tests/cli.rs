//! The two binaries, driven as a user would.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use syntkit::aiger::{parse_aag, Status};
use syntkit::arena::runner::Runner;
use syntkit::arena::{Algorithm, Mode, RunVerdict, SolverConfig};

fn ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{cmd:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn benchgen(out: &Path, args: &[&str]) -> String {
    ok(Command::new(env!("CARGO_BIN_EXE_benchgen")).arg("--out").arg(out).args(args))
}

fn arena() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arena"))
}

#[test]
fn benchgen_names_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let printed = benchgen(dir.path(), &["cycle-sched", "--n", "2", "--d", "1", "--t", "2"]);
    assert!(printed.trim().ends_with("cycle_sched_2_1_2.aag"));
    benchgen(dir.path(), &["mult-matrix", "--m", "1", "--n", "2", "--o", "3"]);
    benchgen(dir.path(), &["mult-matrix-dyn", "--m", "2", "--n", "2"]);
    benchgen(dir.path(), &["cnt", "--n", "3"]);
    benchgen(dir.path(), &["add", "--n", "2"]);
    for f in ["cycle_sched_2_1_2.aag", "mult_bool_matrix_1_2_3.aag", "mult_bool_matrix_dyn_2_2.aag", "cnt3.aag", "add2.aag"] {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        let c = parse_aag(&text).unwrap();
        assert_eq!(c.meta().unwrap().status, Status::Unknown, "{f}");
    }
}

#[test]
fn benchgen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_benchgen"))
        .arg("--out")
        .arg(dir.path())
        .args(["cycle-sched", "--n", "1", "--d", "1", "--t", "2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn worker_verifies_a_tiny_solution() {
    let dir = tempfile::tempdir().unwrap();
    benchgen(dir.path(), &["mult-matrix", "--m", "1", "--n", "1", "--o", "1"]);
    let runner = Runner::new(env!("CARGO_BIN_EXE_arena"), 30.0, Mode::Synthesis);
    let cfg = SolverConfig::new("g", Algorithm::Global).with_mode(Mode::Synthesis);
    let r = runner.run_one(&cfg, &dir.path().join("mult_bool_matrix_1_1_1.aag"));
    assert_eq!(r.verdict, RunVerdict::Realizable, "{}", r.diagnostics);
    assert_eq!(r.verified, Some(true));
    assert_eq!(r.solution_size, Some(1));
}

#[test]
fn slow_runs_time_out() {
    let dir = tempfile::tempdir().unwrap();
    benchgen(dir.path(), &["cycle-sched", "--n", "3", "--d", "3", "--t", "3"]);
    let runner = Runner::new(env!("CARGO_BIN_EXE_arena"), 0.2, Mode::Realizability);
    let cfg = SolverConfig::new("m", Algorithm::Monolithic);
    let t = Instant::now();
    let r = runner.run_one(&cfg, &dir.path().join("cycle_sched_3_3_3.aag"));
    assert_eq!(r.verdict, RunVerdict::Timeout, "{r:?}");
    assert!(t.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn portfolio_is_no_slower_than_its_fastest_member() {
    let dir = tempfile::tempdir().unwrap();
    benchgen(dir.path(), &["mult-matrix", "--m", "3", "--n", "3", "--o", "3"]);
    let file = dir.path().join("mult_bool_matrix_3_3_3.aag");
    let runner = Runner::new(env!("CARGO_BIN_EXE_arena"), 60.0, Mode::Realizability);
    let members = vec![
        SolverConfig::new("classic", Algorithm::Classic),
        SolverConfig::new("global", Algorithm::Global),
    ];
    let fastest = members
        .iter()
        .map(|m| runner.run_one(m, &file).wall_seconds)
        .fold(f64::INFINITY, f64::min);
    let p = runner.run_one(&SolverConfig::portfolio("par", members), &file);
    assert_eq!(p.verdict, RunVerdict::Realizable);
    assert!(p.wall_seconds <= fastest + 1.0, "{} vs {fastest}", p.wall_seconds);
}

#[test]
fn run_classify_select_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let bench = dir.path().join("bench");
    for n in ["1", "2", "3"] {
        benchgen(&bench, &["cnt", "--n", n]);
        benchgen(&bench, &["add", "--n", n]);
    }
    let cfg = dir.path().join("configs.txt");
    std::fs::write(&cfg, "a = classic\nb = absref\n").unwrap();
    let res = dir.path().join("res");
    let table = ok(arena()
        .args(["run", "--mode", "synt", "--jobs", "2", "--timeout", "30"])
        .arg("--configs")
        .arg(&cfg)
        .arg("--benchmarks")
        .arg(&bench)
        .arg("--out")
        .arg(&res));
    assert!(table.contains("Solved"));
    for f in ["results.csv", "cactus.csv", "category.csv", "ranking.txt"] {
        assert!(res.join(f).exists(), "{f}");
    }

    ok(arena()
        .args(["classify", "--label", "desk"])
        .arg("--results")
        .arg(res.join("results.csv"))
        .arg("--benchmarks")
        .arg(&bench));
    let meta = parse_aag(&std::fs::read_to_string(bench.join("cnt2.aag")).unwrap())
        .unwrap()
        .meta()
        .unwrap();
    assert_eq!(meta.status, Status::Realizable);
    assert_eq!(meta.solved_by.map(|e| e.value), Some((2, 2)));
    assert!(meta.ref_size.is_some());

    let picked = ok(arena()
        .args(["select", "--request", "cnt=2,add=1", "--seed", "3"])
        .arg("--benchmarks")
        .arg(&bench));
    let picked: Vec<&str> = picked.lines().collect();
    assert_eq!(picked.len(), 3);
    assert_eq!(picked.iter().filter(|l| l.contains("cnt")).count(), 2);

    let rescored = dir.path().join("rescored");
    ok(arena()
        .args(["score", "--mode", "synt"])
        .arg("--results")
        .arg(res.join("results.csv"))
        .arg("--benchmarks")
        .arg(&bench)
        .arg("--out")
        .arg(&rescored));
    let category = std::fs::read_to_string(rescored.join("category.csv")).unwrap();
    assert_eq!(category.lines().next(), Some("category,a,b"));
    assert!(category.contains("cnt,3,3"), "{category}");
}

#[test]
fn malformed_configs_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("configs.txt");
    std::fs::write(&cfg, "a = nonsense\n").unwrap();
    let out = arena()
        .args(["run", "--out"])
        .arg(dir.path().join("r"))
        .arg("--configs")
        .arg(&cfg)
        .arg("--benchmarks")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
}
