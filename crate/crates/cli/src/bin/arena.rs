use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use syntkit::aiger::{parse_aag, write_aag, MetaInfo};
use syntkit::arena::runner::{list_benchmarks, run_all, worker_main, Runner};
use syntkit::arena::{
    emit_results, parse_configs, parse_results, score, select_benchmarks, Mode, DEFAULT_TIMEOUT_SECS,
};
use syntkit::benchgen::classify;

#[derive(Parser)]
#[command(name = "arena", about = "Run, score and select safety-synthesis benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every configuration on every benchmark and write result files.
    Run {
        #[arg(long)]
        configs: PathBuf,
        #[arg(long)]
        benchmarks: PathBuf,
        /// Per-run limit in seconds: CPU time, or wall time for portfolios.
        #[arg(long, default_value_t = DEFAULT_TIMEOUT_SECS)]
        timeout: f64,
        /// Model-checking limit for synthesized solutions.
        #[arg(long, default_value_t = 3600.0)]
        verify_timeout: f64,
        #[arg(long, default_value = "real")]
        mode: Mode,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-score a results CSV against the benchmarks' classification data.
    Score {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        benchmarks: PathBuf,
        #[arg(long, default_value = "real")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick a difficulty-balanced subset; prints one file per line.
    Select {
        #[arg(long)]
        benchmarks: PathBuf,
        /// `category=count` pairs, comma separated.
        #[arg(long)]
        request: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write classification paragraphs derived from a results CSV.
    Classify {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        benchmarks: PathBuf,
        /// Experiment label recorded with SOLVED_BY and SOLVED_IN.
        #[arg(long)]
        label: String,
        /// Where to write the classified files (default: in place).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one benchmark in this process (used by `run`).
    #[command(hide = true)]
    Worker {
        #[arg(long = "config", required = true)]
        config: Vec<String>,
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
}

fn read_library(dir: &Path) -> anyhow::Result<Vec<(PathBuf, MetaInfo)>> {
    let mut out = Vec::new();
    for p in list_benchmarks(dir).with_context(|| format!("listing {}", dir.display()))? {
        let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        let c = parse_aag(&text).with_context(|| format!("parsing {}", p.display()))?;
        out.push((p, c.meta().unwrap_or_default()));
    }
    Ok(out)
}

fn metas_by_name(lib: &[(PathBuf, MetaInfo)]) -> BTreeMap<String, MetaInfo> {
    lib.iter()
        .map(|(p, m)| (file_name(p), m.clone()))
        .collect()
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn main() -> anyhow::Result<()> {
    env_logger::init();
    match Cli::parse().cmd {
        Cmd::Worker { config, mode, benchmark, solution } => {
            match worker_main(&config, mode, &benchmark, solution.as_deref()) {
                Ok(line) => println!("{line}"),
                Err(e) => {
                    eprintln!("{e}");
                    std::process::exit(2);
                }
            }
        }
        Cmd::Run { configs, benchmarks, timeout, verify_timeout, mode, jobs, seed, out } => {
            let text = std::fs::read_to_string(&configs).with_context(|| format!("reading {}", configs.display()))?;
            let cfgs: Vec<_> = parse_configs(&text)?.into_iter().map(|c| c.with_mode(mode)).collect();
            if cfgs.is_empty() {
                bail!("{} defines no configurations", configs.display());
            }
            let lib = read_library(&benchmarks)?;
            let files: Vec<PathBuf> = lib.iter().map(|(p, _)| p.clone()).collect();
            let mut runner = Runner::new(std::env::current_exe()?, timeout, mode);
            runner.verify_timeout_secs = verify_timeout;
            let records = run_all(&runner, &cfgs, &files, jobs, seed);
            for r in records.iter().filter(|r| !r.diagnostics.is_empty()) {
                eprintln!("{} / {}: {}", r.benchmark, r.config, r.diagnostics);
            }
            let ranking = score(&records, &metas_by_name(&lib), mode);
            emit_results(&out, &records, &ranking)?;
            print!("{}", std::fs::read_to_string(out.join("ranking.txt"))?);
        }
        Cmd::Score { results, benchmarks, mode, out } => {
            let text = std::fs::read_to_string(&results).with_context(|| format!("reading {}", results.display()))?;
            let records = parse_results(&text).map_err(anyhow::Error::msg)?;
            let lib = read_library(&benchmarks)?;
            let ranking = score(&records, &metas_by_name(&lib), mode);
            emit_results(&out, &records, &ranking)?;
            print!("{}", std::fs::read_to_string(out.join("ranking.txt"))?);
        }
        Cmd::Select { benchmarks, request, seed } => {
            let mut per_cat = BTreeMap::new();
            for pair in request.split(',').filter(|s| !s.is_empty()) {
                let (cat, n) = pair.split_once('=').context("expected category=count")?;
                per_cat.insert(cat.trim().to_string(), n.trim().parse::<usize>()?);
            }
            let lib: Vec<(String, MetaInfo)> = read_library(&benchmarks)?
                .into_iter()
                .map(|(p, m)| (file_name(&p), m))
                .collect();
            let sel = select_benchmarks(&lib, &per_cat, seed);
            for n in &sel.notes {
                eprintln!("{n}");
            }
            for f in sel.files {
                println!("{f}");
            }
        }
        Cmd::Classify { results, benchmarks, label, out } => {
            let text = std::fs::read_to_string(&results).with_context(|| format!("reading {}", results.display()))?;
            let records = parse_results(&text).map_err(anyhow::Error::msg)?;
            let out = out.unwrap_or_else(|| benchmarks.clone());
            std::fs::create_dir_all(&out)?;
            for p in list_benchmarks(&benchmarks)? {
                let name = file_name(&p);
                let runs: Vec<_> = records.iter().filter(|r| r.benchmark == name).cloned().collect();
                if runs.is_empty() {
                    continue;
                }
                let meta = classify(&name, &runs, &label)?;
                let mut c = parse_aag(&std::fs::read_to_string(&p)?).with_context(|| format!("parsing {}", p.display()))?;
                c.set_meta(&meta);
                std::fs::write(out.join(&name), write_aag(&c))?;
                println!("{name}: {}", meta.status);
            }
        }
    }
    Ok(())
}
