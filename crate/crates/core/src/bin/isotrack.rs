use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use isotrack::analysis::functionals;
use isotrack::initial::approximate_initial_data;
use isotrack::io::{self, RunConfig, SUMMARY_FILE};
use isotrack::policy::RankineHugoniot;
use isotrack::{compute_budgets, run, solve_intermediate, Error, LogState, Result, RunOptions};

#[derive(Parser)]
#[command(name = "isotrack", version, about = "Front tracking for the isothermal p-system")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one or more TOML configurations.
    Run {
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Worker threads for independent runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Solve one Riemann problem given in (w, v) coordinates.
    Riemann {
        #[arg(long, allow_hyphen_values = true)]
        wl: f64,
        #[arg(long, allow_hyphen_values = true)]
        vl: f64,
        #[arg(long, allow_hyphen_values = true)]
        wr: f64,
        #[arg(long, allow_hyphen_values = true)]
        vr: f64,
    },
    /// Weighted relative entropy between the snapshots of two runs.
    Compare {
        /// Run directory providing the weight.
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the snapshots of a run in Eulerian coordinates.
    Convert {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, requires = "xb")]
        xa: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "xa")]
        xb: Option<f64>,
    },
    /// Replay an event log and check it against the case formulas and budgets.
    Audit {
        #[arg(long)]
        events: PathBuf,
        /// Defaults to summary.json beside the event log, if present.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Print the budget constants of a configuration.
    Budgets {
        #[arg(long)]
        config: PathBuf,
        /// Override the initial variation instead of computing it.
        #[arg(long)]
        v: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "v")]
        leftmost_w: Option<f64>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn run_one(path: &Path) -> Result<String> {
    let cfg = RunConfig::load(path)?;
    let opts = RunOptions::with_snapshots(cfg.effective_snapshot_times());
    let start = Instant::now();
    let record = run(&cfg.params, &cfg.initial, &opts)?;
    let wall = start.elapsed().as_secs_f64();
    io::write_run(&cfg.output, &cfg, &record, wall)?;
    let status = if record.report.all_pass { "budgets ok" } else { "BUDGET FAILURE" };
    Ok(format!(
        "{}: {} events, V = {:.6}, {status}, {:.3} s -> {}",
        path.display(),
        record.stats.events,
        record.budgets.v,
        wall,
        cfg.output.display()
    ))
}

fn cmd_run(configs: &[PathBuf], jobs: usize) -> Result<()> {
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| Error::Config(e.to_string()))?;
    let results: Vec<Result<String>> = pool.install(|| configs.par_iter().map(|c| run_one(c)).collect());
    let mut worst: Option<Error> = None;
    for (path, r) in configs.iter().zip(results) {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn cmd_audit(events: &Path, summary: Option<PathBuf>) -> Result<()> {
    let log = io::read_events(events)?;
    let summary_path = summary.or_else(|| {
        let p = events.parent().unwrap_or(Path::new(".")).join(SUMMARY_FILE);
        p.exists().then_some(p)
    });
    let summary = summary_path.as_deref().map(io::read_summary).transpose()?;
    let outcome = io::audit_events(&log, summary.as_ref());
    for m in &outcome.mismatches {
        eprintln!("{m}");
    }
    let outcome = outcome.into_result()?;
    println!("{} events replayed, no mismatches", outcome.events);
    if let Some(r) = &outcome.budgets {
        for c in &r.checks {
            println!(
                "{:<24} {:>14.6e} <= {:<14.6e} {}",
                c.name,
                c.observed,
                c.bound,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
    }
    Ok(())
}

fn cmd_budgets(config: &Path, v: Option<f64>, leftmost_w: Option<f64>) -> Result<()> {
    let cfg = RunConfig::load(config)?;
    let (v, lw) = match v {
        Some(v) => (v, leftmost_w.unwrap_or(0.0)),
        None => {
            let snap = approximate_initial_data(&cfg.initial, &cfg.params, &RankineHugoniot)?;
            (functionals(&snap).1, snap.leftmost_state.w)
        }
    };
    print!("{}", json(&compute_budgets(v, lw, &cfg.params)?));
    Ok(())
}

fn dispatch(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Run { configs, jobs } => cmd_run(&configs, jobs),
        Cmd::Riemann { wl, vl, wr, vr } => {
            let d = solve_intermediate(LogState::new(wl, vl), LogState::new(wr, vr))?;
            print!("{}", json(&d));
            Ok(())
        }
        Cmd::Compare { psi, u, out } => {
            let series = io::compare_runs(&psi, &u)?;
            let mut text = String::from("t,weighted_rel_entropy\n");
            for (t, e) in series {
                text.push_str(&format!("{t:.16e},{e:.16e}\n"));
            }
            emit(out.as_deref(), &text)
        }
        Cmd::Convert { run, out, xa, xb } => {
            let text = io::convert_run(&run, xa.zip(xb))?;
            emit(out.as_deref(), &text)
        }
        Cmd::Audit { events, summary } => cmd_audit(&events, summary),
        Cmd::Budgets { config, v, leftmost_w } => cmd_budgets(&config, v, leftmost_w),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
