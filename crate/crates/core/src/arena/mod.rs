//! Competition harness: solver configurations, isolated runs with resource
//! limits, scoring, benchmark selection and result files.

pub mod emit;
#[cfg(not(target_arch = "wasm32"))]
pub mod runner;
pub mod score;
pub mod select;
pub mod solve;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use emit::{emit_results, render_results};
pub use score::{quality_points, score, score_basic, score_quality, ConfigScore, Ranking};
pub use select::{category_of, select_benchmarks, Selection};
pub use solve::{solve_circuit, SolveOutput};

/// Desk-scale default per-run limit in seconds.
pub const DEFAULT_TIMEOUT_SECS: f64 = 60.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArenaError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("unknown configuration `{0}`")]
    UnknownConfig(String),
    #[error("solver failed: {0}")]
    Solver(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Classic,
    Monolithic,
    Global,
    Incremental,
    BackForth,
    Absref,
    Portfolio,
}

impl Algorithm {
    pub const SEQUENTIAL: [Algorithm; 6] = [
        Algorithm::Classic,
        Algorithm::Monolithic,
        Algorithm::Global,
        Algorithm::Incremental,
        Algorithm::BackForth,
        Algorithm::Absref,
    ];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Classic => "classic",
            Algorithm::Monolithic => "monolithic",
            Algorithm::Global => "global",
            Algorithm::Incremental => "incremental",
            Algorithm::BackForth => "backforth",
            Algorithm::Absref => "absref",
            Algorithm::Portfolio => "portfolio",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "classic" => Algorithm::Classic,
            "monolithic" => Algorithm::Monolithic,
            "global" => Algorithm::Global,
            "incremental" => Algorithm::Incremental,
            "backforth" => Algorithm::BackForth,
            "absref" => Algorithm::Absref,
            "portfolio" => Algorithm::Portfolio,
            other => return Err(format!("unknown algorithm `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Realizability,
    Synthesis,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Realizability => "real",
            Mode::Synthesis => "synt",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "real" | "realizability" => Ok(Mode::Realizability),
            "synt" | "synthesis" => Ok(Mode::Synthesis),
            other => Err(format!("unknown mode `{other}` (expected real or synt)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub name: String,
    pub algorithm: Algorithm,
    pub mode: Mode,
    /// Nonempty exactly for portfolios.
    pub members: Vec<SolverConfig>,
    pub flags: BTreeMap<String, String>,
}

const FLAGS: [&str; 5] = ["reorder", "reclaim", "cap", "aggressive", "members"];

impl SolverConfig {
    pub fn new(name: impl Into<String>, algorithm: Algorithm) -> Self {
        SolverConfig {
            name: name.into(),
            algorithm,
            mode: Mode::Realizability,
            members: Vec::new(),
            flags: BTreeMap::new(),
        }
    }

    pub fn portfolio(name: impl Into<String>, members: Vec<SolverConfig>) -> Self {
        let names: Vec<&str> = members.iter().map(|m| m.name.as_str()).collect();
        SolverConfig::new(name, Algorithm::Portfolio)
            .with_flag("members", &names.join(","))
            .with_members(members)
    }

    fn with_members(mut self, members: Vec<SolverConfig>) -> Self {
        self.members = members;
        self
    }

    pub fn with_flag(mut self, k: &str, v: &str) -> Self {
        self.flags.insert(k.to_string(), v.to_string());
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        for m in &mut self.members {
            m.mode = mode;
        }
        self
    }

    fn flag_on(&self, k: &str) -> bool {
        matches!(self.flags.get(k).map(String::as_str), Some("on" | "true" | "1" | "yes"))
    }

    pub fn bdd_config(&self) -> crate::bdd::Config {
        use crate::bdd::{Config, Reclamation};
        Config {
            auto_reorder: self.flag_on("reorder"),
            reclamation: match self.flags.get("reclaim").map(String::as_str) {
                Some("deferred") => Reclamation::Deferred,
                _ => Reclamation::Eager,
            },
            ..Config::default()
        }
    }

    pub fn compositional_options(&self) -> crate::compositional::CompositionalOptions {
        let mut o = crate::compositional::CompositionalOptions::default();
        if let Some(cap) = self.flags.get("cap").and_then(|c| c.parse().ok()) {
            o.cap = cap;
        }
        o.aggressive = self.flag_on("aggressive");
        o
    }
}

/// Parses `name = algorithm [flag=value ...]` lines. `#` starts a comment.
/// Portfolios list earlier configurations in `members=a,b,...`.
pub fn parse_configs(text: &str) -> Result<Vec<SolverConfig>, ArenaError> {
    let mut out: Vec<SolverConfig> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ArenaError::Config { line: i + 1, msg };
        let (name, rest) = line
            .split_once('=')
            .ok_or_else(|| err("expected `name = algorithm ...`".into()))?;
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(err(format!("bad configuration name `{name}`")));
        }
        if out.iter().any(|c| c.name == name) {
            return Err(err(format!("duplicate configuration `{name}`")));
        }
        let mut words = rest.split_whitespace();
        let algorithm: Algorithm = words
            .next()
            .ok_or_else(|| err("missing algorithm".into()))?
            .parse()
            .map_err(err)?;
        let mut cfg = SolverConfig::new(name, algorithm);
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| err(format!("expected flag=value, got `{w}`")))?;
            if !FLAGS.contains(&k) {
                return Err(err(format!("unknown flag `{k}`")));
            }
            cfg.flags.insert(k.to_string(), v.to_string());
        }
        if let Some(ms) = cfg.flags.get("members") {
            for m in ms.split(',') {
                let member = out
                    .iter()
                    .find(|c| c.name == m)
                    .ok_or_else(|| err(format!("unknown member `{m}`")))?;
                cfg.members.push(member.clone());
            }
        }
        if (algorithm == Algorithm::Portfolio) != !cfg.members.is_empty() {
            return Err(err("members are required for, and only for, portfolios".into()));
        }
        out.push(cfg);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RunVerdict {
    Realizable,
    Unrealizable,
    Timeout,
    Error,
}

impl RunVerdict {
    pub fn finished(self) -> bool {
        matches!(self, RunVerdict::Realizable | RunVerdict::Unrealizable)
    }
}

impl fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunVerdict::Realizable => "realizable",
            RunVerdict::Unrealizable => "unrealizable",
            RunVerdict::Timeout => "timeout",
            RunVerdict::Error => "error",
        })
    }
}

impl FromStr for RunVerdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "realizable" => RunVerdict::Realizable,
            "unrealizable" => RunVerdict::Unrealizable,
            "timeout" => RunVerdict::Timeout,
            "error" => RunVerdict::Error,
            other => return Err(format!("unknown verdict `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub benchmark: String,
    pub config: String,
    pub verdict: RunVerdict,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
    /// AND gates of the solution; synthesis runs answering realizable only.
    pub solution_size: Option<u64>,
    pub verified: Option<bool>,
    /// Worker stderr or failure reason for errors.
    pub diagnostics: String,
}

pub const RESULTS_HEADER: &str = "benchmark,config,verdict,cpu_s,wall_s,size,verified";

impl RunRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.4},{:.4},{},{}",
            self.benchmark,
            self.config,
            self.verdict,
            self.cpu_seconds,
            self.wall_seconds,
            self.solution_size.map(|s| s.to_string()).unwrap_or_default(),
            self.verified.map(|v| v.to_string()).unwrap_or_default(),
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<RunRecord, String> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(format!("expected 7 fields, got {}", f.len()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
        Ok(RunRecord {
            benchmark: f[0].to_string(),
            config: f[1].to_string(),
            verdict: f[2].parse()?,
            cpu_seconds: num(f[3])?,
            wall_seconds: num(f[4])?,
            solution_size: match f[5] {
                "" => None,
                s => Some(s.parse().map_err(|e| format!("`{s}`: {e}"))?),
            },
            verified: match f[6] {
                "" => None,
                s => Some(s.parse().map_err(|e| format!("`{s}`: {e}"))?),
            },
            diagnostics: String::new(),
        })
    }
}

/// Reads a results CSV as written by [`emit_results`].
pub fn parse_results(text: &str) -> Result<Vec<RunRecord>, String> {
    text.lines()
        .enumerate()
        .filter(|(i, l)| !(l.trim().is_empty() || (*i == 0 && l.starts_with("benchmark,"))))
        .map(|(i, l)| RunRecord::parse_csv_row(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let cs = parse_configs(
            "# seq\nseq1 = classic reorder=on\nseq2 = global cap=16 aggressive=on\npar = portfolio members=seq1,seq2\n",
        )
        .unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs[0].bdd_config().auto_reorder);
        assert_eq!(cs[1].compositional_options().cap, 16);
        assert!(cs[1].compositional_options().aggressive);
        assert_eq!(cs[2].members.len(), 2);
        assert_eq!(cs[2].members[1].algorithm, Algorithm::Global);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(parse_configs("x = magic"), Err(ArenaError::Config { line: 1, .. })));
        assert!(parse_configs("p = portfolio").is_err());
        assert!(parse_configs("a = classic\np = portfolio members=b").is_err());
        assert!(parse_configs("a = classic members=a").is_err());
        assert!(parse_configs("a = classic speed=11").is_err());
        assert!(parse_configs("a = classic\na = global").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let r = RunRecord {
            benchmark: "add2.aag".into(),
            config: "seq".into(),
            verdict: RunVerdict::Realizable,
            cpu_seconds: 0.25,
            wall_seconds: 0.5,
            solution_size: Some(7),
            verified: Some(true),
            diagnostics: String::new(),
        };
        let text = format!("{RESULTS_HEADER}\n{}\n", r.csv_row());
        assert_eq!(parse_results(&text).unwrap(), vec![r]);
    }
}
