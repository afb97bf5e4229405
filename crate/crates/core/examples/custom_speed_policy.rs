//! Plug a different shock speed rule into the engine. Speeds keep the sign
//! of their family and stay under the cap; a rule that breaks this is
//! rejected at the first shock it emits.

use std::sync::Arc;

use isotrack::analysis::entropy_admissible;
use isotrack::front::WaveLabel;
use isotrack::policy::{ScaledSpeed, ShockSpeedPolicy};
use isotrack::{run, InitialData, LogState, RunOptions, State};

struct Backwards;

impl ShockSpeedPolicy for Backwards {
    fn speed(&self, label: WaveLabel, _: LogState, _: LogState) -> f64 {
        label.family.w_sign()
    }

    fn name(&self) -> &str {
        "backwards"
    }
}

fn main() -> isotrack::Result<()> {
    let params = isotrack::io::RunConfig::from_toml(include_str!("../../../configs/two-shock.toml"))?.params;
    let data = InitialData::RandomBv { pieces: 16, total_variation: 1.0, center: State { tau: 1.0, v: 0.0 } };
    for policy in [Arc::new(ScaledSpeed { factor: 0.9, cap: 3.0 }) as Arc<dyn ShockSpeedPolicy>, Arc::new(Backwards)] {
        let name = policy.name().to_string();
        let opts = RunOptions { snapshot_times: vec![], policy };
        match run(&params, &data, &opts) {
            Ok(rec) => {
                let shocks: Vec<_> = rec.last.snapshot.fronts.iter().filter(|f| f.label.is_shock()).collect();
                let entropic = shocks.iter().filter(|f| entropy_admissible(f)).count();
                println!("{name}: {} events, {entropic}/{} shocks dissipate entropy", rec.stats.events, shocks.len());
            }
            Err(e) => println!("{name}: rejected ({e})"),
        }
    }
    Ok(())
}
