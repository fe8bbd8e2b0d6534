use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};
use syntkit::aiger::write_aag;
use syntkit::benchgen::*;

#[derive(Parser)]
#[command(name = "benchgen", about = "Generate parameterized safety benchmarks as ASCII AIGER")]
struct Cli {
    /// Directory to write into.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    family: Family,
}

#[derive(Subcommand)]
enum Family {
    /// Washing-cycle scheduler: n tanks, delay d, t tanks per pipe.
    CycleSched {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    /// C = A·B for A m×n and B n×o.
    MultMatrix {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        o: usize,
    },
    /// Latched m×n matrix updated by a partly controllable n×n matrix.
    MultMatrixDyn {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// n-bit counter that must be cleared before it saturates.
    Cnt {
        #[arg(long)]
        n: usize,
    },
    /// n-bit adder the system must compute.
    Add {
        #[arg(long)]
        n: usize,
    },
    /// The small mixed corpus used by the test suite.
    Corpus,
}

fn main() -> anyhow::Result<()> {
    env_logger::init();
    let cli = Cli::parse();
    let files = match cli.family {
        Family::CycleSched { n, d, t } => vec![(cycle_sched_name(n, d, t), gen_cycle_sched(n, d, t)?)],
        Family::MultMatrix { m, n, o } => vec![(mult_matrix_name(m, n, o), gen_mult_matrix(m, n, o)?)],
        Family::MultMatrixDyn { m, n } => vec![(mult_matrix_dyn_name(m, n), gen_mult_matrix_dyn(m, n)?)],
        Family::Cnt { n } => vec![(counter_name(n), gen_counter(n)?)],
        Family::Add { n } => vec![(adder_name(n), gen_adder(n)?)],
        Family::Corpus => desk_corpus(),
    };
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    for (name, c) in files {
        let path = cli.out.join(name);
        std::fs::write(&path, write_aag(&c)).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}
