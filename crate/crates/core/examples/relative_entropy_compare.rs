//! Weighted relative entropy between a coarse and a fine approximation of
//! the same Riemann data, in the cone of information.

use isotrack::analysis::rel_entropy_series;
use isotrack::{run, InitialData, RunOptions, State};

fn main() -> isotrack::Result<()> {
    let base = isotrack::io::RunConfig::from_toml(include_str!("../../../configs/riemann.toml"))?;
    let data = InitialData::Riemann { left: State { tau: 1.0, v: 0.3 }, right: State { tau: 0.5, v: -0.2 }, x0: 0.0 };
    let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    let mut coarse = base.params;
    coarse.delta = 0.2;
    coarse.epsilon = 0.5;
    let mut fine = coarse;
    fine.delta = 0.0125;
    let psi = run(&coarse, &data, &RunOptions::with_snapshots(times.clone()))?;
    let u = run(&fine, &data, &RunOptions::with_snapshots(times))?;
    let series = rel_entropy_series(&psi.snapshots, &u.snapshots, &coarse)?;
    let b = psi.budgets;
    println!("a in [{:.3e}, {:.3e}]", b.a_min, b.a_max);
    println!("{:>6} {:>14}", "t", "E_a(t)");
    for (t, e) in series {
        println!("{t:>6.2} {e:>14.6e}");
    }
    Ok(())
}
