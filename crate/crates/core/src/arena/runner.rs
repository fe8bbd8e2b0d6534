//! Isolated runs: every (configuration, benchmark) pair executes in a child
//! process with a hard CPU-time limit (sequential configurations) or a
//! wall-clock limit (portfolios), measured by the host.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::solve::solve_circuit;
use super::{parse_configs, Algorithm, Mode, RunRecord, RunVerdict, SolverConfig};
use crate::aiger::{parse_aag, write_aag};
use crate::verifier::{check_syntactic, model_check, VerifyStatus, DEFAULT_TIMEOUT_SECS};

pub const RESULT_PREFIX: &str = "RESULT ";

impl SolverConfig {
    /// Config-file lines that define this configuration, members first.
    pub fn to_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for m in &self.members {
            for l in m.to_lines() {
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
        let mut own = format!("{} = {}", self.name, self.algorithm);
        for (k, v) in &self.flags {
            own.push_str(&format!(" {k}={v}"));
        }
        out.push(own);
        out
    }
}

/// The body of `arena worker`: solves one benchmark with the last
/// configuration in `config_lines` and returns the line to print.
pub fn worker_main(config_lines: &[String], mode: Mode, benchmark: &Path, solution: Option<&Path>) -> Result<String, String> {
    let cfgs = parse_configs(&config_lines.join("\n")).map_err(|e| e.to_string())?;
    let cfg = cfgs.last().ok_or("no configuration given")?.clone().with_mode(mode);
    let text = std::fs::read_to_string(benchmark).map_err(|e| format!("{}: {e}", benchmark.display()))?;
    let spec = parse_aag(&text).map_err(|e| format!("{}: {e}", benchmark.display()))?;
    let out = solve_circuit(&cfg, &spec).map_err(|e| e.to_string())?;
    if let (Some(sol), Some(path)) = (&out.solution, solution) {
        std::fs::write(path, write_aag(sol)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let v = if out.realizable { RunVerdict::Realizable } else { RunVerdict::Unrealizable };
    Ok(format!("{RESULT_PREFIX}{v} {}", out.answered_by))
}

#[derive(Debug, Clone)]
pub struct Runner {
    /// Executable that understands the `worker` subcommand.
    pub exe: PathBuf,
    pub timeout_secs: f64,
    pub verify_timeout_secs: f64,
    pub mode: Mode,
}

struct ChildEnd {
    killed_for_time: bool,
    status: i32,
    cpu: f64,
    wall: f64,
    stdout: String,
    stderr: String,
}

impl Runner {
    pub fn new(exe: impl Into<PathBuf>, timeout_secs: f64, mode: Mode) -> Self {
        Runner {
            exe: exe.into(),
            timeout_secs,
            verify_timeout_secs: DEFAULT_TIMEOUT_SECS,
            mode,
        }
    }

    pub fn run_one(&self, cfg: &SolverConfig, benchmark: &Path) -> RunRecord {
        let id = benchmark
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| benchmark.display().to_string());
        let mut rec = RunRecord {
            benchmark: id,
            config: cfg.name.clone(),
            verdict: RunVerdict::Error,
            cpu_seconds: 0.0,
            wall_seconds: 0.0,
            solution_size: None,
            verified: None,
            diagnostics: String::new(),
        };
        let sol_file = match tempfile::Builder::new().suffix(".aag").tempfile() {
            Ok(f) => f,
            Err(e) => {
                rec.diagnostics = format!("temporary file: {e}");
                return rec;
            }
        };
        let mut cmd = Command::new(&self.exe);
        cmd.arg("worker")
            .arg("--mode")
            .arg(self.mode.to_string())
            .arg("--benchmark")
            .arg(benchmark)
            .arg("--solution")
            .arg(sol_file.path());
        for l in cfg.to_lines() {
            cmd.arg("--config").arg(l);
        }
        let portfolio = cfg.algorithm == Algorithm::Portfolio;
        let end = match spawn_limited(cmd, self.timeout_secs, portfolio) {
            Ok(e) => e,
            Err(e) => {
                rec.diagnostics = format!("spawn: {e}");
                return rec;
            }
        };
        rec.cpu_seconds = end.cpu;
        rec.wall_seconds = end.wall;
        if end.killed_for_time {
            rec.verdict = RunVerdict::Timeout;
            return rec;
        }
        let line = end.stdout.lines().find_map(|l| l.strip_prefix(RESULT_PREFIX));
        let verdict = line.and_then(|l| l.split_whitespace().next()).and_then(|v| v.parse().ok());
        match verdict {
            Some(v @ (RunVerdict::Realizable | RunVerdict::Unrealizable)) if end.status == 0 => rec.verdict = v,
            _ => {
                rec.diagnostics = format!("exit status {}: {}", end.status, end.stderr.trim());
                return rec;
            }
        }
        if self.mode == Mode::Synthesis && rec.verdict == RunVerdict::Realizable {
            let (size, ok) = self.verify(benchmark, sol_file.path());
            rec.solution_size = size;
            rec.verified = match &ok {
                Ok(()) => Some(true),
                Err(Check::TimedOut) => None,
                Err(Check::Failed(_)) => Some(false),
            };
            if let Err(e) = ok {
                rec.diagnostics = e.to_string();
            }
        }
        rec
    }

    fn verify(&self, benchmark: &Path, solution: &Path) -> (Option<u64>, Result<(), Check>) {
        let read = |p: &Path| {
            std::fs::read_to_string(p)
                .map_err(|e| e.to_string())
                .and_then(|t| parse_aag(&t).map_err(|e| e.to_string()))
        };
        let (spec, sol) = match (read(benchmark), read(solution)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return (None, Err(Check::Failed(e))),
        };
        let size = Some(sol.ands.len() as u64);
        let report = check_syntactic(&spec, &sol);
        if !report.passed() {
            return (size, Err(Check::Failed(report.issues.join("; "))));
        }
        match model_check(&sol, self.verify_timeout_secs).status {
            VerifyStatus::Verified => (size, Ok(())),
            VerifyStatus::Timeout => (size, Err(Check::TimedOut)),
            VerifyStatus::Falsified => (size, Err(Check::Failed("model check: error reachable".into()))),
        }
    }
}

enum Check {
    TimedOut,
    Failed(String),
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Check::TimedOut => f.write_str("model check timed out"),
            Check::Failed(e) => f.write_str(e),
        }
    }
}

#[cfg(unix)]
fn spawn_limited(mut cmd: Command, timeout: f64, wall_limit: bool) -> std::io::Result<ChildEnd> {
    use std::os::unix::process::{CommandExt, ExitStatusExt};

    cmd.stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    if !wall_limit {
        let secs = timeout.ceil().max(1.0) as libc::rlim_t;
        // SAFETY: setrlimit is async-signal-safe and touches only the child.
        unsafe {
            cmd.pre_exec(move || {
                let lim = libc::rlimit {
                    rlim_cur: secs,
                    rlim_max: secs + 1,
                };
                if libc::setrlimit(libc::RLIMIT_CPU, &lim) != 0 {
                    return Err(std::io::Error::last_os_error());
                }
                Ok(())
            });
        }
    }
    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let pid = child.id() as libc::pid_t;
    let mut out_pipe = child.stdout.take().expect("piped");
    let mut err_pipe = child.stderr.take().expect("piped");
    let out_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });
    // the CPU limit is the real bound for sequential runs; the wall clock is
    // only a backstop against a worker that sleeps or blocks
    let wall_bound = if wall_limit { timeout } else { 2.0 * timeout + 5.0 };
    let mut killed = false;
    let mut status: libc::c_int = 0;
    // SAFETY: rusage is plain data; zeroed is a valid value.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    loop {
        // SAFETY: pid is our own unreaped child.
        let r = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut usage) };
        if r == pid {
            break;
        }
        if r < 0 {
            return Err(std::io::Error::last_os_error());
        }
        if start.elapsed().as_secs_f64() > wall_bound {
            // SAFETY: as above.
            unsafe {
                libc::kill(pid, libc::SIGKILL);
                libc::wait4(pid, &mut status, 0, &mut usage);
            }
            killed = true;
            break;
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    let wall = start.elapsed().as_secs_f64();
    let tv = |t: libc::timeval| t.tv_sec as f64 + t.tv_usec as f64 * 1e-6;
    let cpu = tv(usage.ru_utime) + tv(usage.ru_stime);
    let es = std::process::ExitStatus::from_raw(status);
    let by_cpu = matches!(es.signal(), Some(libc::SIGXCPU) | Some(libc::SIGKILL)) && cpu + 0.5 >= timeout;
    let code = es.code().unwrap_or_else(|| -es.signal().unwrap_or(0));
    Ok(ChildEnd {
        killed_for_time: killed || by_cpu || (!wall_limit && cpu > timeout),
        status: code,
        cpu,
        wall,
        stdout: out_reader.join().unwrap_or_default(),
        stderr: err_reader.join().unwrap_or_default(),
    })
}

#[cfg(not(unix))]
fn spawn_limited(mut cmd: Command, timeout: f64, _wall_limit: bool) -> std::io::Result<ChildEnd> {
    // no rlimits: the wall clock is the only bound, and CPU time is not measured
    cmd.stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let mut killed = false;
    let status = loop {
        if let Some(s) = child.try_wait()? {
            break s;
        }
        if start.elapsed().as_secs_f64() > timeout {
            child.kill()?;
            killed = true;
            break child.wait()?;
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let wall = start.elapsed().as_secs_f64();
    let mut stdout = String::new();
    let mut stderr = String::new();
    if let Some(mut p) = child.stdout.take() {
        let _ = p.read_to_string(&mut stdout);
    }
    if let Some(mut p) = child.stderr.take() {
        let _ = p.read_to_string(&mut stderr);
    }
    Ok(ChildEnd {
        killed_for_time: killed,
        status: status.code().unwrap_or(-1),
        cpu: wall,
        wall,
        stdout,
        stderr,
    })
}

/// Runs every configuration on every benchmark with up to `jobs` workers at
/// once. The dispatch order is shuffled by `seed`; the records come back
/// sorted by benchmark and configuration.
pub fn run_all(runner: &Runner, configs: &[SolverConfig], benchmarks: &[PathBuf], jobs: usize, seed: u64) -> Vec<RunRecord> {
    let mut work: Vec<(SolverConfig, PathBuf)> = benchmarks
        .iter()
        .flat_map(|b| configs.iter().map(move |c| (c.clone(), b.clone())))
        .collect();
    work.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let queue = Arc::new(Mutex::new(work));
    let (tx, rx) = mpsc::channel();
    let mut handles = Vec::new();
    for _ in 0..jobs.max(1) {
        let queue = Arc::clone(&queue);
        let tx = tx.clone();
        let runner = runner.clone();
        handles.push(std::thread::spawn(move || loop {
            let next = queue.lock().expect("queue lock").pop();
            let Some((cfg, bench)) = next else { break };
            if tx.send(runner.run_one(&cfg, &bench)).is_err() {
                break;
            }
        }));
    }
    drop(tx);
    let mut records: Vec<RunRecord> = rx.into_iter().collect();
    for h in handles {
        let _ = h.join();
    }
    records.sort_by(|a, b| (&a.benchmark, &a.config).cmp(&(&b.benchmark, &b.config)));
    records
}

/// `.aag` files directly inside `dir`, sorted by name.
pub fn list_benchmarks(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "aag"))
        .collect();
    out.sort();
    Ok(out)
}
