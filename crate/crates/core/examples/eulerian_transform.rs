//! Map a snapshot from mass coordinates to Eulerian space and back.

use isotrack::analysis::{anchor_position, eulerian_speed_bound, eulerian_speed_check, to_eulerian, to_lagrangian};
use isotrack::io::RunConfig;
use isotrack::{run, RunOptions};

fn main() -> isotrack::Result<()> {
    let cfg = RunConfig::from_toml(include_str!("../../../configs/flagship.toml"))?;
    let rec = run(&cfg.params, &cfg.initial, &RunOptions::with_snapshots([0.0, 2.5, 2.6, 5.0]))?;
    let p = rec.params;
    let reach = p.domain_radius + rec.budgets.lambda_hat * p.t_end + 1.0;
    let window = (-reach, reach);
    let mut eul = Vec::new();
    for s in &rec.snapshots {
        let snap = &s.snapshot;
        let e = to_eulerian(snap, window, anchor_position(snap.leftmost_state, window.0, snap.time))?;
        let (xs, _) = to_lagrangian(&e, window.0);
        let drift = xs
            .iter()
            .zip(std::iter::once(window.0).chain(snap.positions()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "t = {:.2}: y in [{:.4}, {:.4}], mass {:.12} (window {:.1}), round trip {drift:.1e}",
            e.time,
            e.y[0],
            e.y[e.y.len() - 1],
            e.total_mass(),
            window.1 - window.0
        );
        eul.push(e);
    }
    let speed = eulerian_speed_check(&eul[1], &eul[2])?;
    println!("fastest Eulerian discontinuity on [2.5, 2.6]: {speed:.4}, bound {:.4}", eulerian_speed_bound(&rec));
    Ok(())
}
