//! Random BV data with total variation 2, run to T = 5, written to disk in
//! the standard output formats.
//!
//! cargo run --release --example flagship_run -- out/flagship

use std::path::PathBuf;
use std::time::Instant;

use isotrack::io::{write_run, RunConfig};
use isotrack::{run, RunOptions};

const CONFIG: &str = r#"
delta = 0.05
epsilon = 0.25
c0 = 1.0
c1 = 0.2
t_end = 5.0
domain_radius = 10.0
cone_speed = 100.0
beta = 0.01
seed = 7
snapshot_times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]

[data_box]
v_max = 10.0
tau_min = 0.01
tau_max = 100.0

[initial]
kind = "random-bv"
pieces = 30
total_variation = 2.0
"#;

fn main() -> isotrack::Result<()> {
    let mut cfg = RunConfig::from_toml(CONFIG)?;
    cfg.output = std::env::args().nth(1).map_or_else(|| PathBuf::from("out/flagship"), PathBuf::from);
    let start = Instant::now();
    let rec = run(&cfg.params, &cfg.initial, &RunOptions::with_snapshots(cfg.snapshot_times.clone()))?;
    let wall = start.elapsed().as_secs_f64();
    write_run(&cfg.output, &cfg, &rec, wall)?;

    println!("V = {:.6}, K1 = {:.6}, {} events in {wall:.3} s", rec.budgets.v, rec.budgets.k1, rec.stats.events);
    println!("fronts: {} initially, {} at most", rec.initial.snapshot.fronts.len(), rec.stats.max_fronts);
    for (code, n) in &rec.stats.counts {
        println!("  {code:<10} {n}");
    }
    for c in &rec.report.checks {
        println!("{:<22} {:>12.4e} <= {:<12.4e} {}", c.name, c.observed, c.bound, if c.pass { "ok" } else { "FAIL" });
    }
    println!("written to {}", cfg.output.display());
    Ok(())
}
