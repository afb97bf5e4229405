//! L1 error against the exact self-similar solution of a shock plus
//! rarefaction Riemann problem, for a sequence of fan meshes.

use isotrack::riemann::solve_intermediate;
use isotrack::{run, DataBox, InitialData, RunOptions, SchemeParams, State, Tolerances};

fn exact(ul: State, ur: State, x: f64, t: f64) -> State {
    let (l, r) = (ul.to_log().unwrap(), ur.to_log().unwrap());
    let d = solve_intermediate(l, r).unwrap();
    let m = d.middle();
    let xi = x / t;
    if xi < -(0.5 * (l.w + m.w)).exp() {
        ul
    } else if xi < m.w.exp() {
        m.to_state()
    } else if xi < r.w.exp() {
        let w = xi.ln();
        State { tau: (-w).exp(), v: m.v + (w - m.w) }
    } else {
        ur
    }
}

fn main() -> isotrack::Result<()> {
    let (left, right) = (State { tau: 1.0, v: 0.3 }, State { tau: 0.5, v: -0.2 });
    let data = InitialData::Riemann { left, right, x0: 0.0 };
    let mut prev: Option<f64> = None;
    println!("{:>8} {:>12} {:>8}", "delta", "L1 error", "ratio");
    for delta in [0.2, 0.1, 0.05, 0.025, 0.0125] {
        let p = SchemeParams {
            delta,
            epsilon: 0.5,
            c0: 1.0,
            c1: 0.2,
            t_end: 1.0,
            domain_radius: 5.0,
            cone_speed: 2.5,
            beta: 0.01,
            data_box: DataBox { v_max: 10.0, tau_min: 0.01, tau_max: 100.0 },
            seed: 0,
            tolerances: Tolerances::default(),
        };
        let snap = run(&p, &data, &RunOptions::default())?.last.snapshot;
        // Midpoint rule on a fine grid is plenty for a printed table.
        let n = 200_000;
        let h = 10.0 / n as f64;
        let err: f64 = (0..n)
            .map(|k| {
                let x = -5.0 + (k as f64 + 0.5) * h;
                let (a, b) = (snap.evaluate(x).to_state(), exact(left, right, x, 1.0));
                h * ((a.tau - b.tau).abs() + (a.v - b.v).abs())
            })
            .sum();
        let ratio = prev.map_or(String::new(), |e| format!("{:.3}", e / err));
        println!("{delta:>8} {err:>12.4e} {ratio:>8}");
        prev = Some(err);
    }
    Ok(())
}
