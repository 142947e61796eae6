//! CLI for the clock-as-control-device simulator.
//!
//! Exit codes: 0 all checks pass, 1 bound violation, 2 inconclusive (no
//! applicable samples), 3 usage error, 4 operational error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use qclock_core::runner::{
    execute_scenario, list_scenarios, load_config, verdict_status, verify_path,
    ExperimentConfig, ScenarioRun,
};

#[derive(Parser)]
#[command(name = "qclock", version, about = "Quantum-clock control-device simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write its artifacts.
    Run {
        /// Scenario name; see `list-scenarios`.
        scenario: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the coupling-strength sweep scenario.
    Sweep {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Check a persisted verdict (.json) or time series (.csv).
    Verify {
        /// Path to a verdict.json or series.csv artifact.
        path: PathBuf,
    },
    /// Print the available scenario names.
    ListScenarios,
}

#[derive(Args)]
struct RunOpts {
    /// Declarative config file; CLI flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory root (default `runs`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Grid size (power of two).
    #[arg(long)]
    n: Option<usize>,
    /// Final sampled time.
    #[arg(long)]
    t_max: Option<f64>,
    /// Seed for the random probe states.
    #[arg(long)]
    seed: Option<u64>,
    /// Emit a gnuplot script next to the CSV.
    #[arg(long)]
    emit_plot: bool,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 3;
        }
    };
    let outcome = match cli.command {
        Command::Run { scenario, opts } => run_one(&scenario, &opts),
        Command::Sweep { opts } => run_one("bound-sweep", &opts),
        Command::Verify { path } => verify_path(&path).map(|s| s.code()),
        Command::ListScenarios => {
            for name in list_scenarios() {
                println!("{name}");
            }
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            4
        }
    }
}

fn run_one(scenario: &str, opts: &RunOpts) -> qclock_core::Result<i32> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let mut c = load_config(path)?;
            c.scenario = scenario.to_string();
            c
        }
        None => ExperimentConfig::for_scenario(scenario),
    };
    // precedence: CLI > file > defaults
    if opts.dt.is_some() {
        cfg.dt = opts.dt;
    }
    if opts.n.is_some() {
        cfg.n = opts.n;
    }
    if opts.t_max.is_some() {
        cfg.t_max = opts.t_max;
    }
    if opts.seed.is_some() {
        cfg.seed = opts.seed;
    }
    if opts.emit_plot {
        cfg.emit_plot = Some(true);
    }
    let out_root = opts
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let run = execute_scenario(&cfg, &out_root, opts.emit_plot)?;
    print_summary(&run, &out_root.join(scenario));
    Ok(verdict_status(&run.verdict).code())
}

fn print_summary(run: &ScenarioRun, dir: &Path) {
    println!("scenario: {}", run.verdict.scenario);
    println!("artifacts: {}", dir.display());
    if let Some(err) = run.manifest.propagation_error {
        println!("propagation error estimate: {err:.3e}");
    }
    for c in &run.verdict.checks {
        let status = if c.pass { "pass" } else { "FAIL" };
        match c.worst_margin {
            Some(m) => println!("  [{status}] {} (worst margin {m:.3e})", c.name),
            None => println!("  [{status}] {} (not applicable)", c.name),
        }
    }
    for m in &run.members {
        let status = if m.run.verdict.pass { "pass" } else { "FAIL" };
        println!("  member {}: {status}", m.label);
    }
    for note in &run.verdict.notes {
        println!("  note: {note}");
    }
    let overall = if run.verdict.inconclusive {
        "INCONCLUSIVE"
    } else if run.verdict.pass {
        "PASS"
    } else {
        "FAIL"
    };
    println!("result: {overall}");
}
