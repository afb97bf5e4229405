//! Watch the weight a(t, x) across every event of a run and report the
//! largest increase seen at any constant region.

use isotrack::weight::{eval_weight, WeightLevel};
use isotrack::{run_observed, EventObserver, InitialData, InteractionEvent, RunOptions, SchemeParams, Snapshot, State};

struct Monitor {
    params: SchemeParams,
    events: usize,
    worst: f64,
    worst_case: String,
}

impl EventObserver for Monitor {
    fn observe(
        &mut self,
        before: &Snapshot,
        bw: WeightLevel,
        after: &Snapshot,
        aw: WeightLevel,
        ev: &InteractionEvent,
    ) -> isotrack::Result<()> {
        self.events += 1;
        let mut xs: Vec<f64> = before.positions();
        xs.extend(after.positions());
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|b, a| *b - *a < 1e-9);
        let mids = xs.windows(2).map(|w| 0.5 * (w[0] + w[1]));
        for x in mids.chain([xs[0] - 1.0, xs[xs.len() - 1] + 1.0]) {
            let change = eval_weight(&aw, after, x, &self.params)? - eval_weight(&bw, before, x, &self.params)?;
            if change > self.worst {
                self.worst = change;
                self.worst_case = ev.case.to_string();
            }
        }
        Ok(())
    }
}

fn main() -> isotrack::Result<()> {
    let params = SchemeParams {
        t_end: 3.0,
        cone_speed: 20.0,
        ..isotrack::io::RunConfig::from_toml(include_str!("../../../configs/flagship.toml"))?.params
    };
    let data = InitialData::RandomBv { pieces: 24, total_variation: 1.5, center: State { tau: 1.0, v: 0.0 } };
    let mut monitor = Monitor { params, events: 0, worst: f64::NEG_INFINITY, worst_case: String::new() };
    let rec = run_observed(&params, &data, &RunOptions::default(), Some(&mut monitor))?;
    println!("{} events, L = {}, Q = {:.6}", monitor.events, rec.last.weight.l, rec.last.weight.q);
    println!("largest change a(t+, x) - a(t-, x): {:.3e} (case {})", monitor.worst, monitor.worst_case);
    Ok(())
}
