//! Resolve one representative collision for every case code and tabulate
//! the changes in S, B, L and the weight factor Q.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use isotrack::front::{Front, ShockSize, WaveLabel};
use isotrack::interactions::{resolve_interaction, CaseCode};
use isotrack::riemann::{apply_wave_curve, rh_speed, Family};
use isotrack::{DataBox, LogState, SchemeParams, Tolerances};
use std::collections::BTreeMap;

fn front(id: u64, label: WaveLabel, sigma: f64, left: LogState) -> Front {
    let right = apply_wave_curve(label.family, sigma, left);
    let speed = if label.is_shock() { rh_speed(label.family, left, right) } else { label.family.lambda(right) };
    Front { id, label, left_state: left, right_state: right, origin: 0.0, speed, birth_time: 0.0 }
}

fn main() {
    let p = SchemeParams {
        delta: 0.05,
        epsilon: 0.25,
        c0: 1.0,
        c1: 0.2,
        t_end: 1.0,
        domain_radius: 5.0,
        cone_speed: 50.0,
        beta: 0.01,
        data_box: DataBox { v_max: 10.0, tau_min: 0.01, tau_max: 100.0 },
        seed: 0,
        tolerances: Tolerances::default(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut found: BTreeMap<String, (String, f64, f64, u32, f64)> = BTreeMap::new();
    for _ in 0..200_000 {
        if found.len() == 16 {
            break;
        }
        let family = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
        let mut pick = || match rng.gen_range(0..3) {
            0 => (WaveLabel::shock(family, ShockSize::Big), rng.gen_range(0.125..1.0)),
            1 => (WaveLabel::shock(family, ShockSize::Small), rng.gen_range(1e-3..0.25)),
            _ => (WaveLabel::rarefaction(family), -rng.gen_range(1e-3..0.05)),
        };
        let ((l1, s1), (l2, s2)) = (pick(), pick());
        if !l1.is_shock() && !l2.is_shock() {
            continue;
        }
        let f = front(0, l1, s1, LogState::new(0.0, 0.0));
        let g = front(1, l2, s2, f.right_state);
        if f.speed <= g.speed {
            continue;
        }
        if let Ok(out) = resolve_interaction(&f, &g, &p) {
            let pair = format!("{}{}", l1.letter(), l2.letter());
            found.entry(out.case.to_string()).or_insert((pair, out.delta_s, out.delta_b, out.delta_l, out.q_factor));
        }
    }
    println!("{:<6} {:<6} {:>12} {:>12} {:>4} {:>10}", "case", "pair", "dS", "dB", "dL", "q");
    for code in CaseCode::all_nontrivial().map(|c| c.to_string()) {
        match found.get(&code) {
            Some((pair, ds, db, dl, q)) => println!("{code:<6} {pair:<6} {ds:>12.6} {db:>12.6} {dl:>4} {q:>10.6}"),
            None => println!("{code:<6} not reached"),
        }
    }
}
