// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};

use autofix::{run_corpus, run_single, RunConfig, Target, EXIT_USAGE};
use autofix_core::feedback::Format;
use autofix_core::imp::Bounds;
use autofix_core::search::{CalleeMode, SearchConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CalleesArg {
    Student,
    Reference,
}

/// Repairs student submissions against a reference under an error model, and
/// explains the repair as line-anchored feedback.
#[derive(Debug, Parser)]
#[command(name = "autofix", version)]
#[command(group(ArgGroup::new("target").required(true).args(["student", "corpus"])))]
struct Cli {
    /// Reference solution (.imp).
    #[arg(long = "ref")]
    reference: PathBuf,
    /// One student submission (.imp).
    #[arg(long)]
    student: Option<PathBuf>,
    /// Directory of student submissions, graded in name order.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Error model (.eml).
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=32))]
    int_bits: u32,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(0..=16))]
    max_list: u64,
    /// Evaluation steps allowed per run.
    #[arg(long, default_value_t = 100_000)]
    fuel: u64,
    #[arg(long, default_value_t = 5)]
    max_cost: u32,
    /// Further distinct fixes to report after the cheapest one.
    #[arg(long, default_value_t = 0)]
    alternates: usize,
    /// Feedback detail, 1 (line only) to 4 (full message).
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(1..=4))]
    level: u8,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 10_000_000)]
    budget_candidates: u64,
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Which definitions calls to helper functions run.
    #[arg(long, value_enum, default_value_t = CalleesArg::Student)]
    callees: CalleesArg,
    /// Print the rewritten program with its choices and stop.
    #[arg(long)]
    dump_tilde: bool,
    /// Include wall-clock times in the output.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let target = match (cli.student, cli.corpus) {
        (Some(s), _) => Target::Student(s),
        (None, Some(c)) => Target::Corpus(c),
        (None, None) => unreachable!("clap enforces the target group"),
    };
    let cfg = RunConfig {
        reference: cli.reference,
        target,
        model: cli.model,
        bounds: Bounds { int_bits: cli.int_bits, max_list_len: cli.max_list as usize, fuel: cli.fuel },
        search: SearchConfig {
            max_cost: cli.max_cost,
            budget_candidates: cli.budget_candidates,
            budget_seconds: cli.budget_seconds,
            callees: match cli.callees {
                CalleesArg::Student => CalleeMode::Student,
                CalleesArg::Reference => CalleeMode::Reference,
            },
            ..SearchConfig::default()
        },
        alternates: cli.alternates,
        level: cli.level,
        format: match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        dump_tilde: cli.dump_tilde,
        timing: cli.timing,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let out = pool.install(|| match cfg.target {
        Target::Student(_) => run_single(&cfg),
        Target::Corpus(_) => run_corpus(&cfg),
    });
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
