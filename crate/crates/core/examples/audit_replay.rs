//! Serialize an event log, then replay it: once as written and once with a
//! single record altered.

use isotrack::io::{audit_events, event_to_json, parse_events, RunConfig, Summary};
use isotrack::{run, RunOptions};

fn main() -> isotrack::Result<()> {
    let cfg = RunConfig::from_toml(include_str!("../../../configs/flagship.toml"))?;
    let rec = run(&cfg.params, &cfg.initial, &RunOptions::default())?;
    let summary = Summary::new(&cfg, &rec, 0.0);
    let text: String = rec.events.iter().map(|e| event_to_json(e) + "\n").collect();
    let events = parse_events(&text)?;
    println!("{} records, {} bytes", events.len(), text.len());

    let clean = audit_events(&events, Some(&summary));
    println!("clean log: {} mismatches", clean.mismatches.len());

    let mut forged = events.clone();
    forged[events.len() / 3].delta_s += 1e-9;
    let out = audit_events(&forged, Some(&summary));
    println!("altered log: {} mismatches", out.mismatches.len());
    for m in out.mismatches.iter().take(3) {
        println!("  {m}");
    }
    match out.into_result() {
        Ok(_) => println!("accepted"),
        Err(e) => println!("rejected with exit code {}: {e}", e.exit_code()),
    }
    Ok(())
}
