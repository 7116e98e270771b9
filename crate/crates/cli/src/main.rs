//! `findyn`: build, check and report on finite relations as dynamical systems.

mod commands;
mod input;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use findyn_core::SemigroupWord;

use crate::input::{CapArgs, PrefixArgs};
use crate::report::Context;

/// Finite relations as dynamical systems.
///
/// Every subcommand except `export` prints a JSON report on standard output.
/// Exit status: 0 when all checks pass, 1 when a check fails (the report
/// carries a witness), 2 on usage, input or resource errors. The
/// `FINDYN_CAPS` environment variable picks the default cap profile
/// (`default`, `small` or `large`); explicit flags override it.
#[derive(Parser, Debug)]
#[command(name = "findyn", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Recurrence, transitivity, mixing, loop period and periods of a system.
    Classify {
        /// Shape literal (`loop:N`, `dumbbell:N,L,M`, `wedge:N,M`, `pointed:M`) or system JSON file.
        #[arg(long)]
        system: String,
        /// Largest period reported in the periodic window.
        #[arg(long, default_value_t = 12)]
        horizon: usize,
    },
    /// Enumerate maps between two systems.
    Maps {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
        /// How many tables to print.
        #[arg(long, default_value_t = 20)]
        show: usize,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Factor map onto a system from loops, dumbbells or a wedge.
    Cover {
        #[arg(long)]
        system: String,
        #[arg(long, value_enum, default_value_t = CoverKind::Dumbbell)]
        kind: CoverKind,
    },
    /// Threshold past which every K is a·m + b·n with a, b >= 1.
    Bound {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
    },
    /// Inverse-sequence prefixes.
    #[command(subcommand)]
    Shimomura(ShimomuraCmd),
    /// The {e, L} word semigroup.
    #[command(subcommand)]
    Word(WordCmd),
    /// Graphviz DOT for a system or one level of a prefix.
    Export(ExportArgs),
    /// Run a named bundle of checks; `list` shows the bundles.
    Verify {
        suite: String,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    All,
    Surjective,
    Factor,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum CoverKind {
    Loop,
    Dumbbell,
    LoopUnion,
    Wedge,
}

#[derive(Subcommand, Debug)]
enum ShimomuraCmd {
    /// Build a prefix and print it as JSON.
    Build {
        #[command(flatten)]
        prefix: PrefixArgs,
        /// Write the prefix here instead of into the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bifurcation, Shimomura and inverse-Shimomura flags plus ±lift checks.
    Verify {
        #[command(flatten)]
        prefix: PrefixArgs,
    },
    /// Search for a factor q1 from level k onto level n with no q2 up to level m.
    Factoring {
        #[command(flatten)]
        prefix: PrefixArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Deepest level searched for q2; defaults to the prefix depth.
        #[arg(long)]
        m_max: Option<usize>,
        /// Use explicit levels even when a symbolic loop form exists.
        #[arg(long)]
        explicit: bool,
        /// Cap on enumerated q1 in the symbolic route.
        #[arg(long, default_value_t = 1_000_000)]
        max_q1: usize,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Hitting times between the cylinders over level-n vertices i and j.
    Hitting {
        #[command(flatten)]
        prefix: PrefixArgs,
        /// Level of i and j.
        #[arg(long)]
        n: usize,
        /// 1-based source vertex.
        #[arg(long)]
        i: usize,
        /// 1-based target vertex.
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 40)]
        horizon: usize,
    },
}

#[derive(Subcommand, Debug)]
enum WordCmd {
    /// Concatenation product and its length function.
    Compose {
        left: SemigroupWord,
        right: SemigroupWord,
    },
    /// The map from pointed_loop(ℓ(n)) onto pointed_loop(n).
    Map {
        #[arg(long)]
        word: SemigroupWord,
        #[arg(long)]
        n: usize,
    },
    /// Level sizes of the constant-word prefix.
    Prefix {
        #[arg(long)]
        word: SemigroupWord,
        #[arg(long)]
        depth: usize,
        /// Build the levels explicitly and validate them.
        #[arg(long)]
        validate: bool,
    },
    /// Hitting times N(U_i, U_i) in a window, expected present for mixing words.
    Mixing {
        #[arg(long)]
        word: SemigroupWord,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// First time checked; defaults to the level size.
        #[arg(long)]
        from: Option<usize>,
        #[arg(long, default_value_t = 100)]
        window: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Certificate that N(U_i,U_i) ∩ N(U_i,U_{i-1}) misses [1, horizon].
    Obstruction {
        #[arg(long)]
        word: SemigroupWord,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        horizon: usize,
        #[arg(long, default_value_t = 9)]
        depth: usize,
    },
}

#[derive(Args, Debug)]
struct ExportArgs {
    /// Shape literal or system JSON file.
    #[arg(long, conflicts_with_all = ["name", "prefix"], required_unless_present_any = ["name", "prefix"])]
    system: Option<String>,
    /// Named construction.
    #[arg(long, conflicts_with = "prefix")]
    name: Option<findyn_core::PrefixName>,
    /// Prefix JSON file.
    #[arg(long)]
    prefix: Option<PathBuf>,
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Levels to build for a named construction.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Prefix level to export; defaults to the deepest.
    #[arg(long)]
    level: Option<usize>,
    /// Graph name in the DOT header.
    #[arg(long, default_value = "system")]
    graph: String,
}

fn run(cmd: Cmd, ctx: &mut Context) -> findyn_core::Result<report::Outcome> {
    use findyn_core::MapMode;
    match cmd {
        Cmd::Classify { system, horizon } => commands::classify(ctx, &system, horizon),
        Cmd::Maps { from, to, mode, show, caps } => {
            let mode = match mode {
                ModeArg::All => MapMode::All,
                ModeArg::Surjective => MapMode::Surjective,
                ModeArg::Factor => MapMode::Factor,
            };
            commands::maps(ctx, &from, &to, mode, show, &caps)
        }
        Cmd::Cover { system, kind } => commands::cover(ctx, &system, kind),
        Cmd::Bound { m, n } => commands::bound(m, n),
        Cmd::Shimomura(ShimomuraCmd::Build { prefix, out }) => commands::build(ctx, &prefix, out.as_deref()),
        Cmd::Shimomura(ShimomuraCmd::Verify { prefix }) => commands::verify_prefix(ctx, &prefix),
        Cmd::Shimomura(ShimomuraCmd::Factoring { prefix, k, n, m_max, explicit, max_q1, caps }) => {
            commands::factoring(ctx, &prefix, k, n, m_max, explicit, max_q1, &caps)
        }
        Cmd::Shimomura(ShimomuraCmd::Hitting { prefix, n, i, j, horizon }) => commands::hitting(ctx, &prefix, n, i, j, horizon),
        Cmd::Word(WordCmd::Compose { left, right }) => Ok(commands::word_compose(&left, &right)),
        Cmd::Word(WordCmd::Map { word, n }) => commands::word_map(&word, n),
        Cmd::Word(WordCmd::Prefix { word, depth, validate }) => commands::word_prefix(&word, depth, validate),
        Cmd::Word(WordCmd::Mixing { word, n, from, window, depth }) => commands::word_mixing(&word, n, from, window, depth),
        Cmd::Word(WordCmd::Obstruction { word, n, horizon, depth }) => commands::word_obstruction(&word, n, horizon, depth),
        Cmd::Export(a) => {
            let prefix = PrefixArgs { name: a.name, prefix: a.prefix, params: a.params, depth: a.depth };
            commands::export(ctx, a.system.as_deref(), &prefix, a.level, &a.graph)
        }
        Cmd::Verify { suite } => suites::run(ctx, &suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let mut ctx = Context::default();
    let outcome = run(cli.cmd, &mut ctx);
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(out) => {
            match &out.raw {
                Some(text) => print!("{text}"),
                None => print!("{}", report::render(&command, ctx, &out)),
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("findyn: {e}");
            ExitCode::from(2)
        }
    }
}
