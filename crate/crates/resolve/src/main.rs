use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use resolve::data::Dataset;
use resolve::explain::explain;
use resolve::goals::{all_goals, run, Goal, Plan};
use resolve_core::ideal::Budget;
use resolve_core::schubert::hasse;
use serde_json::json;

/// Certificate checker for the semi-stable resolution tower.
#[derive(Parser)]
#[command(name = "resolve", version)]
struct Cli {
    /// Worker threads for independent goals.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// S-pair budget per Gröbner computation.
    #[arg(long, global = true)]
    budget_spairs: Option<u64>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification goals.
    Verify {
        #[command(subcommand)]
        target: Target,
    },
    Schubert {
        #[command(subcommand)]
        command: SchubertCommand,
    },
    /// Print the derivation behind a goal, e.g. `step:3`, `nonvanishing:3`.
    Explain { goal: String },
}

#[derive(Subcommand)]
enum Target {
    All,
    Chart { name: String },
    Step { k: u32 },
    Identities {
        #[arg(long)]
        step: Option<u32>,
    },
    Nonvanishing {
        #[arg(long)]
        k: usize,
    },
    Cover,
    Semistable { chart: String },
}

#[derive(Subcommand)]
enum SchubertCommand {
    /// Hasse diagram of the Bruhat order on isotropic subsets.
    Hasse {
        #[arg(long)]
        g: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

const USAGE: u8 = 1;

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut budget = Budget::default();
    if let Some(n) = cli.budget_spairs {
        budget.max_spairs = n;
    }
    match cli.command {
        Command::Schubert { command: SchubertCommand::Hasse { g, format } } => {
            let h = match hasse(g) {
                Ok(h) => h,
                Err(e) => return fail(e),
            };
            match format {
                Format::Dot => print!("{}", h.to_dot()),
                Format::Json => {
                    let nodes: Vec<_> = h.nodes.iter().map(|n| json!({ "label": n.label(), "dimension": n.dimension() })).collect();
                    let v = json!({ "g": g, "nodes": nodes, "edges": h.edge_names() });
                    println!("{}", serde_json::to_string_pretty(&v).expect("json"));
                }
            }
            ExitCode::SUCCESS
        }
        Command::Explain { goal } => {
            let ds = match Dataset::load_default() {
                Ok(d) => d,
                Err(e) => return fail(e),
            };
            let goal = match Goal::parse(&goal, &ds) {
                Ok(g) => g,
                Err(e) => return fail(e),
            };
            match explain(&ds, &goal, &budget) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) if e.is_inconclusive() => {
                    eprintln!("{e}");
                    ExitCode::from(3)
                }
                Err(e) => fail(e),
            }
        }
        Command::Verify { target } => {
            let ds = match Dataset::load_default() {
                Ok(d) => d,
                Err(e) => return fail(e),
            };
            let goals = match target {
                Target::All => all_goals(&ds),
                Target::Chart { name } => vec![Goal::Chart(name)],
                Target::Step { k } => vec![Goal::Step(k)],
                Target::Identities { step } => vec![Goal::Identities(step)],
                Target::Nonvanishing { k } => vec![Goal::Nonvanishing(k)],
                Target::Cover => vec![Goal::Cover],
                Target::Semistable { chart } => vec![Goal::Semistable(chart)],
            };
            for g in &goals {
                if let Err(e) = g.check(&ds) {
                    return fail(e);
                }
            }
            let plan = Plan { goals, budget };
            let (report, times) = match run(&ds, &plan, cli.jobs) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            for (g, t) in report.goals.iter().zip(&times) {
                println!("{:<12} {:<16} {:>9.3}s", g.status.to_string(), g.goal, t.as_secs_f64());
                for c in g.checks.iter().filter(|c| c.status != resolve::report::Status::Pass) {
                    println!("    {}: {}", c.name, c.status);
                    for d in c.detail.iter().take(8) {
                        println!("      {d}");
                    }
                }
            }
            println!("overall: {}", report.status);
            if let Some(path) = &cli.report {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    return fail(format!("{}: {e}", path.display()));
                }
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
    }
}
