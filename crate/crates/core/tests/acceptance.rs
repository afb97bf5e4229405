//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use isotrack::analysis::{
    anchor_position, audit, eulerian_speed_bound, eulerian_speed_check, functionals, to_eulerian, to_lagrangian,
};
use isotrack::engine::{RecordedSnapshot, RunRecord};
use isotrack::front::{l1_distance, Front, Snapshot, WaveLabel};
use isotrack::initial::approximate_initial_data;
use isotrack::interactions::{resolve_interaction, symbolic_deltas, CaseCode};
use isotrack::io;
use isotrack::policy::RankineHugoniot;
use isotrack::riemann::{apply_wave_curve, rh_speed, solve_intermediate, Family};
use isotrack::state::{fit_entropy_constants, LogState, State, StateBox};
use isotrack::weight::{eval_weight, weight_profile, WeightLevel};
use isotrack::{
    run, run_observed, DataBox, EventObserver, InitialData, InteractionEvent, RunOptions, SchemeParams, Tolerances,
};

type Outcome = Result<String, String>;

// ---------------------------------------------------------------------------
// Independent oracles

fn big_w(s: f64) -> f64 {
    if s <= 0.0 {
        s
    } else {
        2.0 * (0.5 * s).sinh()
    }
}

/// Middle `w` of the Riemann problem by plain bisection.
fn bisect_middle(ul: LogState, ur: LogState) -> f64 {
    let dv = ul.v - ur.v;
    let g = |m: f64| big_w(m - ul.w) + big_w(m - ur.w) - dv;
    let (mut lo, mut hi) = (ul.w.min(ur.w) - dv.abs() - 1.0, ul.w.max(ur.w) + dv.abs() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn oracle_d(ul: LogState, ur: LogState) -> f64 {
    let m = bisect_middle(ul, ur);
    (m - ul.w).abs() + (m - ur.w).abs()
}

fn eta(s: State) -> f64 {
    0.5 * s.v * s.v - s.tau.ln()
}

fn eta_flux(s: State) -> f64 {
    s.v / s.tau
}

fn oracle_rel_entropy(a: State, b: State) -> f64 {
    eta(a) - eta(b) - ((-1.0 / b.tau) * (a.tau - b.tau) + b.v * (a.v - b.v))
}

fn oracle_xi(label: WaveLabel, sigma: f64, p: &SchemeParams) -> f64 {
    match (label.letter(), label.family) {
        ('a', _) => p.c1,
        ('c', _) => 1.0 / p.c1,
        ('b', _) => 1.0 - p.c0 * sigma,
        ('d', _) => 1.0 + p.c0 * sigma,
        _ => unreachable!("rarefactions have no multiplier"),
    }
}

fn entropy_residual(f: &Front) -> f64 {
    let (l, r) = (f.left_state.to_state(), f.right_state.to_state());
    (eta_flux(r) - eta_flux(l)) - f.speed * (eta(r) - eta(l))
}

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for i in 0..4 {
        s += W[i] * (f(c - h * X[i]) + f(c + h * X[i]));
    }
    s * h
}

// ---------------------------------------------------------------------------
// Shared run corpus

fn base_params() -> SchemeParams {
    SchemeParams {
        delta: 0.05,
        epsilon: 0.25,
        c0: 1.0,
        c1: 0.2,
        t_end: 3.0,
        domain_radius: 5.0,
        cone_speed: 1.0,
        beta: 0.01,
        data_box: DataBox { v_max: 10.0, tau_min: 0.01, tau_max: 100.0 },
        seed: 1,
        tolerances: Tolerances::default(),
    }
}

/// Set the cone speed just above `e^K1` for these data.
fn with_cone(mut p: SchemeParams, data: &InitialData) -> SchemeParams {
    let snap = approximate_initial_data(data, &p, &RankineHugoniot).expect("initial data");
    let (_, b0) = functionals(&snap);
    let k1 = snap.leftmost_state.w.abs() + b0;
    p.cone_speed = 1.05 * k1.exp();
    p
}

/// Piecewise data built from waves of a single family.
fn family_chain(rng: &mut ChaCha8Rng, family: Family, pieces: usize, r: f64) -> InitialData {
    let mut u = LogState::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
    let mut states = vec![u.to_state()];
    for _ in 1..pieces {
        u = apply_wave_curve(family, rng.gen_range(-0.3..0.6), u);
        states.push(u.to_state());
    }
    let width = 2.0 * r / pieces as f64;
    let breaks = (1..pieces).map(|k| -r + width * k as f64 + rng.gen_range(-0.3..0.3) * width).collect();
    InitialData::Piecewise { breaks, states }
}

/// 2-waves on the left half, 1-waves on the right half.
fn head_on(rng: &mut ChaCha8Rng, pieces: usize, r: f64) -> InitialData {
    let mut u = LogState::new(0.0, 0.0);
    let mut states = vec![u.to_state()];
    for k in 1..pieces {
        let family = if k < pieces / 2 { Family::Two } else { Family::One };
        u = apply_wave_curve(family, rng.gen_range(-0.25..0.5), u);
        states.push(u.to_state());
    }
    let width = 2.0 * r / pieces as f64;
    InitialData::Piecewise { breaks: (1..pieces).map(|k| -r + width * k as f64).collect(), states }
}

fn corpus() -> Vec<(SchemeParams, InitialData)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut jobs = Vec::new();
    for k in 0..30u64 {
        let mut p = base_params();
        p.seed = 100 + k;
        p.delta = if k % 2 == 0 { 0.05 } else { 0.1 };
        let data = InitialData::RandomBv {
            pieces: rng.gen_range(10..40),
            total_variation: rng.gen_range(0.5..2.5),
            center: State { tau: 1.0, v: 0.0 },
        };
        jobs.push((with_cone(p, &data), data));
    }
    for k in 0..20 {
        let p = base_params();
        let family = if k % 2 == 0 { Family::One } else { Family::Two };
        let pieces = rng.gen_range(6..14);
        let data = family_chain(&mut rng, family, pieces, p.domain_radius);
        jobs.push((with_cone(p, &data), data));
    }
    for _ in 0..10 {
        let p = base_params();
        let pieces = rng.gen_range(8..16);
        let data = head_on(&mut rng, pieces, p.domain_radius);
        jobs.push((with_cone(p, &data), data));
    }
    jobs
}

#[derive(Default)]
struct Watch {
    events: usize,
    points: usize,
    worst_increase: f64,
    shocks: usize,
    worst_ratio: f64,
    worst_entropy: f64,
    max_db: f64,
    cases: BTreeSet<String>,
    params: Option<SchemeParams>,
}

impl Watch {
    fn entropy(&mut self, snap: &Snapshot) {
        for f in snap.fronts.iter().filter(|f| f.label.is_shock()) {
            self.worst_entropy = self.worst_entropy.max(entropy_residual(f));
        }
    }
}

impl EventObserver for Watch {
    fn observe(
        &mut self,
        before: &Snapshot,
        bw: WeightLevel,
        after: &Snapshot,
        aw: WeightLevel,
        ev: &InteractionEvent,
    ) -> isotrack::Result<()> {
        let p = self.params.expect("params set");
        self.events += 1;
        self.max_db = self.max_db.max(ev.delta_b);
        self.cases.insert(ev.case.to_string());
        let mut xs: Vec<f64> = before.positions().into_iter().chain(after.positions()).collect();
        xs.sort_by(f64::total_cmp);
        // The colliding pair sits at x* only up to rounding; slivers narrower
        // than this are not constant regions of either pattern.
        xs.dedup_by(|b, a| *b - *a < 1e-9);
        let mut probes = Vec::with_capacity(xs.len() + 1);
        if let (Some(first), Some(last)) = (xs.first(), xs.last()) {
            probes.push(first - 1.0);
            probes.push(last + 1.0);
        } else {
            probes.push(0.0);
        }
        probes.extend(xs.windows(2).filter(|w| w[1] > w[0]).map(|w| 0.5 * (w[0] + w[1])));
        for x in probes {
            let a0 = eval_weight(&bw, before, x, &p)?;
            let a1 = eval_weight(&aw, after, x, &p)?;
            self.worst_increase = self.worst_increase.max(a1 - a0);
            self.points += 1;
        }
        let prof = weight_profile(&aw, after, &p)?;
        for (k, f) in after.fronts.iter().enumerate() {
            if f.label.is_shock() {
                let ratio = prof.values[k + 1] / prof.values[k];
                let xi = oracle_xi(f.label, f.sigma(), &p);
                self.worst_ratio = self.worst_ratio.max(((ratio - xi) / xi).abs());
                self.shocks += 1;
            }
        }
        self.entropy(after);
        Ok(())
    }
}

struct CorpusResult {
    records: Vec<RunRecord>,
    watch: Watch,
    errors: Vec<String>,
}

fn run_corpus() -> CorpusResult {
    let outs: Vec<(Result<RunRecord, String>, Watch)> = corpus()
        .into_par_iter()
        .map(|(p, data)| {
            let mut w = Watch { params: Some(p), ..Watch::default() };
            let r = run_observed(&p, &data, &RunOptions::with_snapshots([0.0, 1.0, 2.0]), Some(&mut w));
            if let Ok(rec) = &r {
                w.entropy(&rec.initial.snapshot);
                w.entropy(&rec.last.snapshot);
            }
            (r.map_err(|e| e.to_string()), w)
        })
        .collect();
    let mut all = Watch::default();
    let (mut records, mut errors) = (Vec::new(), Vec::new());
    for (r, w) in outs {
        all.events += w.events;
        all.points += w.points;
        all.shocks += w.shocks;
        all.worst_increase = all.worst_increase.max(w.worst_increase);
        all.worst_ratio = all.worst_ratio.max(w.worst_ratio);
        all.worst_entropy = all.worst_entropy.max(w.worst_entropy);
        all.max_db = all.max_db.max(w.max_db);
        all.cases.extend(w.cases);
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => errors.push(e),
        }
    }
    CorpusResult { records, watch: all, errors }
}

fn flagship_params() -> SchemeParams {
    SchemeParams { t_end: 5.0, domain_radius: 10.0, cone_speed: 100.0, seed: 7, ..base_params() }
}

fn flagship_data() -> InitialData {
    InitialData::RandomBv { pieces: 30, total_variation: 2.0, center: State { tau: 1.0, v: 0.0 } }
}

struct Flagship {
    record: RunRecord,
    wall: f64,
    watch: Watch,
}

fn run_flagship() -> Result<Flagship, String> {
    let p = flagship_params();
    let times: Vec<f64> = (0..=100).map(|k| 0.05 * k as f64).collect();
    let mut watch = Watch { params: Some(p), ..Watch::default() };
    let start = Instant::now();
    let record = run_observed(&p, &flagship_data(), &RunOptions::with_snapshots(times), Some(&mut watch))
        .map_err(|e| e.to_string())?;
    let wall = start.elapsed().as_secs_f64();
    watch.entropy(&record.initial.snapshot);
    Ok(Flagship { record, wall, watch })
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_riemann() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut recomp, mut agree) = (0.0_f64, 0.0_f64);
    for _ in 0..10_000 {
        let ul = LogState::new(rng.gen_range(-1.5..=1.5), rng.gen_range(-3.0..=3.0));
        let ur = LogState::new(rng.gen_range(-1.5..=1.5), rng.gen_range(-3.0..=3.0));
        let d = solve_intermediate(ul, ur).map_err(|e| e.to_string())?;
        let back = apply_wave_curve(Family::Two, d.sigma2, apply_wave_curve(Family::One, d.sigma1, ul));
        recomp = recomp.max((back.w - ur.w).abs()).max((back.v - ur.v).abs());
        agree = agree.max((d.w_m - bisect_middle(ul, ur)).abs());
    }
    let detail = format!("recomposition {recomp:.2e}, newton vs bisection {agree:.2e}");
    if recomp <= 1e-10 && agree <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c2_tvd(corpus: &CorpusResult, flag: &Flagship) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let mut u = || LogState::new(rng.gen_range(-1.5..=1.5), rng.gen_range(-3.0..=3.0));
        let (a, b, c) = (u(), u(), u());
        worst = worst.max(oracle_d(a, c) - oracle_d(a, b) - oracle_d(b, c));
    }
    let events = corpus.watch.events + flag.watch.events;
    let max_db = corpus.watch.max_db.max(flag.watch.max_db);
    let detail = format!("max D excess {worst:.2e}; max dB {max_db:.2e} over {events} events");
    if worst <= 1e-12 && max_db <= 1e-12 && events > 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_wave(rng: &mut ChaCha8Rng, family: Family, p: &SchemeParams) -> (WaveLabel, f64) {
    match rng.gen_range(0..3) {
        0 => (WaveLabel::shock(family, isotrack::front::ShockSize::Big), rng.gen_range(0.5 * p.epsilon..1.0)),
        1 => (WaveLabel::shock(family, isotrack::front::ShockSize::Small), rng.gen_range(1e-4..p.epsilon)),
        _ => (WaveLabel::rarefaction(family), -rng.gen_range(1e-4..=p.delta)),
    }
}

fn make_front(id: u64, label: WaveLabel, sigma: f64, left: LogState, x: f64) -> Front {
    let right = apply_wave_curve(label.family, sigma, left);
    let speed = if label.is_shock() { rh_speed(label.family, left, right) } else { label.family.lambda(right) };
    Front { id, label, left_state: left, right_state: right, origin: x, speed, birth_time: 0.0 }
}

fn list_functionals(fronts: &[Front]) -> (f64, f64) {
    let mut s = 0.0;
    let mut b = 0.0;
    for f in fronts {
        let dw = f.right_state.w - f.left_state.w;
        b += dw.abs();
        if f.label.is_small_shock() {
            s += dw.abs();
        }
    }
    (s, b)
}

fn expected_case(pair: (char, char), s1p: f64, s2p: f64, eps: f64) -> Option<&'static str> {
    Some(match pair {
        ('a', 'a') => "1",
        ('a', 'b') => "2",
        ('a', 'e') if s1p >= 0.5 * eps => "3A",
        ('a', 'e') => "3B",
        ('b', 'b') if s1p < eps => "4A",
        ('b', 'b') => "4B",
        ('b', 'e') if s1p > 0.0 => "5A",
        ('b', 'e') => "5B",
        ('c', 'c') => "6",
        ('c', 'd') => "7",
        ('c', 'f') if s2p >= 0.5 * eps => "8A",
        ('c', 'f') => "8B",
        ('d', 'd') if s2p < eps => "9A",
        ('d', 'd') => "9B",
        ('d', 'f') if s2p > 0.0 => "10A",
        ('d', 'f') => "10B",
        _ => return None,
    })
}

fn oracle_q(code: &str, wl: f64, wm: f64, wr: f64, p_: f64, c0: f64) -> f64 {
    match code {
        "2" => 1.0 - c0 * (wr - wm),
        "3A" => 1.0 / (1.0 + c0 * (p_ - wr)),
        "4A" => ((1.0 - c0 * (wm - wl)) * (1.0 - c0 * (wr - wm)) / (1.0 - c0 * (p_ - wl))).min(1.0),
        "5A" => (1.0 - c0 * (wm - wl)) / ((1.0 - c0 * (p_ - wl)) * (1.0 + c0 * (p_ - wr))),
        "5B" => (1.0 - c0 * (wm - wl)) / (1.0 + c0 * (p_ - wr)),
        _ => 1.0,
    }
}

fn c3_case_table() -> Outcome {
    let p = base_params();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut done, mut ambiguous) = (0, 0);
    let mut seen = BTreeSet::new();
    let (mut sym_err, mut list_err, mut triv_err, mut q_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut problems: Vec<String> = Vec::new();
    while done < 10_000 {
        let same = rng.gen_bool(0.8);
        let (fam_l, fam_r) = if same {
            let f = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
            (f, f)
        } else {
            (Family::Two, Family::One)
        };
        let (l1, s1) = random_wave(&mut rng, fam_l, &p);
        let (l2, s2) = random_wave(&mut rng, fam_r, &p);
        if same && !l1.is_shock() && !l2.is_shock() {
            continue;
        }
        let u0 = LogState::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let f = make_front(10, l1, s1, u0, 0.0);
        let g = make_front(11, l2, s2, f.right_state, 0.1);
        if !(f.speed > g.speed) {
            continue;
        }
        // Random chain around the pair.
        let mut prefix = Vec::new();
        let mut u = u0;
        for k in 0..rng.gen_range(0..5) {
            let fam = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
            let (lab, sig) = random_wave(&mut rng, fam, &p);
            let left = LogState::new(u.w - fam.w_sign() * sig, u.v + big_w(sig));
            let fr = make_front(k, lab, sig, left, -1.0 - k as f64);
            prefix.insert(0, Front { right_state: u, ..fr });
            u = left;
        }
        let mut suffix = Vec::new();
        let mut u = g.right_state;
        for k in 0..rng.gen_range(0..5) {
            let fam = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
            let (lab, sig) = random_wave(&mut rng, fam, &p);
            let fr = make_front(20 + k, lab, sig, u, 1.0 + k as f64);
            u = fr.right_state;
            suffix.push(fr);
        }

        let out = resolve_interaction(&f, &g, &p).map_err(|e| format!("{}+{}: {e}", l1.letter(), l2.letter()))?;
        let code = out.case.to_string();
        seen.insert(code.clone());
        let (a, b) = (l1.letter().min(l2.letter()), l1.letter().max(l2.letter()));
        let st = out.states;

        if same {
            let m = bisect_middle(f.left_state, g.right_state);
            let (s1p, s2p) = (m - f.left_state.w, m - g.right_state.w);
            let near =
                [s1p, s2p].iter().any(|s| [0.0, 0.5 * p.epsilon, p.epsilon].iter().any(|t| (s - t).abs() < 1e-9));
            match expected_case((a, b), s1p, s2p, p.epsilon) {
                Some(want) if want == code => {}
                Some(_) if near => ambiguous += 1,
                want => problems.push(format!("{a}+{b}: got {code}, expected {want:?}")),
            }
            let (ds, db) = symbolic_deltas(out.case, st);
            sym_err = sym_err.max((ds - out.delta_s).abs()).max((db - out.delta_b).abs());
            let q = oracle_q(&code, st.w_l, st.w_m, st.w_r, st.w_m_prime, p.c0);
            q_err = q_err.max((q - out.q_factor).abs());
            if matches!(code.as_str(), "4B" | "9B") && out.delta_s > -p.epsilon + 1e-12 {
                problems.push(format!("case {code} with dS = {} > -eps", out.delta_s));
            }
        } else {
            if out.case != CaseCode::Trivial(a, b) {
                problems.push(format!("trivial pair {a}+{b} classified as {code}"));
            }
            let mid = out.fronts[0].right_state.w;
            triv_err = triv_err.max((mid - (f.left_state.w + g.right_state.w - f.right_state.w)).abs());
        }
        let want_dl = matches!(code.as_str(), "1" | "3B" | "9B") as u32;
        if out.delta_l != want_dl {
            problems.push(format!("case {code} has dL = {}", out.delta_l));
        }
        let emitted: Vec<Front> = out
            .fronts
            .iter()
            .map(|bp| Front {
                id: 0,
                label: bp.label,
                left_state: bp.left_state,
                right_state: bp.right_state,
                origin: 0.05,
                speed: bp.speed,
                birth_time: 0.0,
            })
            .collect();
        if emitted.first().map(|f| f.left_state) != Some(f.left_state)
            || emitted.last().map(|f| f.right_state) != Some(g.right_state)
        {
            problems.push(format!("case {code}: outgoing fronts do not span the pair"));
        }
        for fr in &emitted {
            let s = fr.sigma();
            let ok = if fr.label.is_big_shock() {
                s >= 0.5 * p.epsilon - 1e-12
            } else if fr.label.is_small_shock() {
                s >= -1e-12 && s < p.epsilon
            } else {
                s <= 1e-12 && s >= -p.delta - 1e-12
            };
            if !ok {
                problems.push(format!("case {code}: outgoing {} with sigma {s}", fr.label.letter()));
            }
        }

        let before: Vec<Front> = prefix.iter().chain([&f, &g]).chain(suffix.iter()).copied().collect();
        let after: Vec<Front> = prefix.iter().chain(emitted.iter()).chain(suffix.iter()).copied().collect();
        let chain_ok = after.windows(2).all(|w| w[0].right_state == w[1].left_state);
        if !chain_ok {
            problems.push(format!("case {code}: outgoing fronts break the chain"));
        }
        let (s0, b0) = list_functionals(&before);
        let (s1, b1) = list_functionals(&after);
        list_err = list_err.max(((s1 - s0) - out.delta_s).abs()).max(((b1 - b0) - out.delta_b).abs());
        done += 1;
    }
    let nontrivial = seen.iter().filter(|c| !c.starts_with("TRIV")).count();
    let detail = format!(
        "{done} interactions, {nontrivial}/16 cases and {} trivial pairs seen; formula {sym_err:.1e}, \
         front lists {list_err:.1e}, trivial middle {triv_err:.1e}, q {q_err:.1e}, {ambiguous} threshold ties",
        seen.len() - nontrivial
    );
    if let Some(first) = problems.first() {
        return Err(format!("{detail}; {} problems, first: {first}", problems.len()));
    }
    if sym_err <= 1e-10 && list_err <= 1e-10 && triv_err <= 1e-10 && q_err <= 1e-12 && nontrivial == 16 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c4_weight(corpus: &CorpusResult) -> Outcome {
    let w = &corpus.watch;
    let runs = corpus.records.len();
    let detail = format!(
        "{runs} runs, {} events over {} case codes, {} probe points, max increase {:.2e}; \
         {} shock ratios, max rel error {:.2e}",
        w.events,
        w.cases.len(),
        w.points,
        w.worst_increase,
        w.shocks,
        w.worst_ratio
    );
    if !corpus.errors.is_empty() {
        return Err(format!("{detail}; run errors: {:?}", corpus.errors));
    }
    if runs >= 50 && w.events >= 500 && w.worst_increase <= 1e-12 && w.worst_ratio <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c5_budgets(corpus: &CorpusResult, extra: &[&RunRecord]) -> Outcome {
    let mut failures = Vec::new();
    let all: Vec<&RunRecord> = corpus.records.iter().chain(extra.iter().copied()).collect();
    let mut checks = 0;
    for (i, rec) in all.iter().enumerate() {
        for rep in [&rec.report, &audit(rec)] {
            for c in &rep.checks {
                checks += 1;
                if !c.pass {
                    failures.push(format!("run {i}: {} = {} > {}", c.name, c.observed, c.bound));
                }
            }
        }
        let st = &rec.stats;
        if st.max_abs_w > rec.budgets.k1 + 1e-12 {
            failures.push(format!("run {i}: |w| reached {} > K1 = {}", st.max_abs_w, rec.budgets.k1));
        }
    }
    let detail = format!("{} runs, {checks} checks", all.len());
    if corpus.errors.is_empty() && failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {:?} {:?}", corpus.errors, failures.first()))
    }
}

fn c6_flagship(flag: &Flagship) -> Outcome {
    let rec = &flag.record;
    let lip = rec.budgets.lambda_hat * rec.stats.sup_tv_conserved * 1.01;
    let p = rec.params;
    let reach = p.domain_radius + rec.budgets.lambda_hat * p.t_end + 1.0;
    let snaps: Vec<&RecordedSnapshot> = rec.snapshots.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let i = rng.gen_range(0..snaps.len());
        let mut j = rng.gen_range(0..snaps.len());
        while j == i {
            j = rng.gen_range(0..snaps.len());
        }
        let (a, b) = (&snaps[i].snapshot, &snaps[j].snapshot);
        let ratio = l1_distance(a, b, (-reach, reach)) / (a.time - b.time).abs();
        worst = worst.max(ratio);
    }
    let detail = format!(
        "V = {:.4}, {} events in {:.3} s; Lipschitz ratio {worst:.4} <= {lip:.4}",
        rec.budgets.v, rec.stats.events, flag.wall
    );
    if (rec.budgets.v - 2.0).abs() < 0.25 && flag.wall < 10.0 && worst <= lip && snaps.len() == 101 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c7_entropy(corpus: &CorpusResult, flag: &Flagship, extra: &[&RunRecord]) -> Outcome {
    let mut worst = corpus.watch.worst_entropy.max(flag.watch.worst_entropy);
    let mut shocks = corpus.watch.shocks + flag.watch.shocks;
    for rec in corpus.records.iter().chain(extra.iter().copied()).chain([&flag.record]) {
        for s in rec.snapshots.iter().chain([&rec.initial, &rec.last]) {
            for f in s.snapshot.fronts.iter().filter(|f| f.label.is_shock()) {
                worst = worst.max(entropy_residual(f));
                shocks += 1;
            }
        }
    }
    let detail = format!("{shocks} shock checks, max [q] - s[eta] = {worst:.2e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct ExactRiemann {
    ul: LogState,
    um: LogState,
    ur: LogState,
    shock: f64,
    fan: (f64, f64),
}

impl ExactRiemann {
    fn new(ul: LogState, ur: LogState) -> Self {
        let m = bisect_middle(ul, ur);
        let um = LogState::new(m, ul.v - big_w(m - ul.w));
        assert!(m > ul.w && m < ur.w, "data must give a 1-shock and a 2-rarefaction");
        ExactRiemann { ul, um, ur, shock: -(0.5 * (ul.w + m)).exp(), fan: (m.exp(), ur.w.exp()) }
    }

    fn at(&self, x: f64, t: f64) -> State {
        let xi = x / t;
        let s = if xi < self.shock {
            self.ul
        } else if xi < self.fan.0 {
            self.um
        } else if xi < self.fan.1 {
            let w = xi.ln();
            LogState::new(w, self.um.v + (w - self.um.w))
        } else {
            self.ur
        };
        s.to_state()
    }
}

fn c8_convergence() -> Outcome {
    let left = State { tau: 1.0, v: 0.3 };
    let right = State { tau: 0.5, v: -0.2 };
    let exact = ExactRiemann::new(left.to_log().unwrap(), right.to_log().unwrap());
    let data = InitialData::Riemann { left, right, x0: 0.0 };
    let mut errors = Vec::new();
    for delta in [0.2, 0.1, 0.05, 0.025] {
        let p = with_cone(SchemeParams { delta, epsilon: 0.5, t_end: 1.0, ..base_params() }, &data);
        let rec = run(&p, &data, &RunOptions::default()).map_err(|e| e.to_string())?;
        let snap = &rec.last.snapshot;
        let t = snap.time;
        let r = p.domain_radius;
        let mut cuts: Vec<f64> = snap.positions();
        cuts.extend([exact.shock * t, exact.fan.0 * t, exact.fan.1 * t, -r, r]);
        cuts.retain(|x| (-r..=r).contains(x));
        cuts.sort_by(f64::total_cmp);
        let mut err = 0.0;
        for w in cuts.windows(2) {
            let n = 8;
            let h = (w[1] - w[0]) / n as f64;
            for k in 0..n {
                let (a, b) = (w[0] + h * k as f64, w[0] + h * (k + 1) as f64);
                if b > a {
                    err += gauss_legendre(
                        |x| {
                            let e = exact.at(x, t);
                            let s = snap.evaluate(x).to_state();
                            (s.tau - e.tau).abs() + (s.v - e.v).abs()
                        },
                        a,
                        b,
                    );
                }
            }
        }
        errors.push((delta, err));
    }
    let detail = errors.iter().map(|(d, e)| format!("{d}: {e:.3e}")).collect::<Vec<_>>().join(", ");
    let decreasing = errors.windows(2).all(|w| w[1].1 < w[0].1);
    if decreasing && errors[3].1 < 0.5 * errors[0].1 {
        Ok(format!("L1 errors {detail}"))
    } else {
        Err(format!("L1 errors {detail}"))
    }
}

fn c9_comparability() -> Outcome {
    let bx = StateBox { tau_min: 0.2, tau_max: 5.0, v_max: 3.0 };
    let fit = fit_entropy_constants(&bx, 10_000, &mut ChaCha8Rng::seed_from_u64(9));
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut violations = 0;
    let mut n = 0;
    while n < 10_000 {
        let (a, b) = (bx.sample(&mut rng), bx.sample(&mut rng));
        let d2 = (a.tau - b.tau).powi(2) + (a.v - b.v).powi(2);
        if d2 == 0.0 {
            continue;
        }
        let e = oracle_rel_entropy(a, b);
        if e < fit.c_star * d2 || e > fit.c_star_star * d2 {
            violations += 1;
        }
        n += 1;
    }
    let finite_pos = |x: f64| x.is_finite() && x > 0.0;
    let detail = format!(
        "c* = {:.4e}, c** = {:.4e}, C = {:.4e}, {violations} violations in {n} pairs",
        fit.c_star, fit.c_star_star, fit.flux_c
    );
    if finite_pos(fit.c_star) && finite_pos(fit.c_star_star) && finite_pos(fit.flux_c) && violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c10_eulerian(flag: &Flagship) -> Outcome {
    let rec = &flag.record;
    let p = rec.params;
    let reach = p.domain_radius + rec.budgets.lambda_hat * p.t_end + 1.0;
    let window = (-reach, reach);
    let (mut mass_err, mut trip_err) = (0.0_f64, 0.0_f64);
    let mut eul = Vec::new();
    for s in &rec.snapshots {
        let snap = &s.snapshot;
        let e = to_eulerian(snap, window, anchor_position(snap.leftmost_state, window.0, snap.time))
            .map_err(|e| e.to_string())?;
        mass_err = mass_err.max((e.total_mass() - (window.1 - window.0)).abs() / (window.1 - window.0));
        let (xs, states) = to_lagrangian(&e, window.0);
        let mut want = vec![window.0];
        want.extend(snap.positions());
        want.push(window.1);
        if xs.len() != want.len() {
            return Err(format!("round trip gave {} breakpoints, expected {}", xs.len(), want.len()));
        }
        for (x, y) in xs.iter().zip(&want) {
            trip_err = trip_err.max((x - y).abs());
        }
        for (st, ls) in states.iter().zip(snap.states()) {
            let s0 = ls.to_state();
            trip_err = trip_err.max((st.tau - s0.tau).abs()).max((st.v - s0.v).abs());
        }
        eul.push(e);
    }
    let bound = eulerian_speed_bound(rec);
    let mut worst = 0.0_f64;
    for pair in eul.windows(2) {
        worst = worst.max(eulerian_speed_check(&pair[0], &pair[1]).map_err(|e| e.to_string())?);
    }
    let detail = format!(
        "mass rel error {mass_err:.2e}, round trip {trip_err:.2e}, max Eulerian speed {worst:.4} <= {bound:.4}"
    );
    if mass_err <= 1e-12 && trip_err <= 1e-10 && worst <= bound && worst > 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c11_compare() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let left = State { tau: 1.0, v: 0.3 };
    let right = State { tau: 0.5, v: -0.2 };
    let initial = InitialData::Riemann { left, right, x0: 0.0 };
    let times: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    let mut runs = Vec::new();
    for (name, delta) in [("coarse", 0.2), ("fine", 0.0125)] {
        let p = with_cone(SchemeParams { delta, epsilon: 0.5, t_end: 1.0, ..base_params() }, &initial);
        let cfg = io::RunConfig {
            params: p,
            initial: initial.clone(),
            snapshot_times: times.clone(),
            output: dir.path().join(name),
            emit: io::EmitFlags::default(),
        };
        let rec = run(&p, &initial, &RunOptions::with_snapshots(times.clone())).map_err(|e| e.to_string())?;
        io::write_run(&cfg.output, &cfg, &rec, 0.0).map_err(|e| e.to_string())?;
        runs.push(rec);
    }
    let series = io::compare_runs(&dir.path().join("coarse"), &dir.path().join("fine")).map_err(|e| e.to_string())?;
    let b = runs[0].budgets;
    let init = series.first().map_or(f64::NAN, |s| s.1);
    let soft = b.a_max / b.a_min * (init + 1.0);
    let complete = series.len() == times.len() && series.iter().all(|(_, v)| v.is_finite() && *v >= 0.0);
    let max = series.iter().map(|s| s.1).fold(0.0, f64::max);
    let soft_note = if max <= soft { "within" } else { "EXCEEDS (logged only)" };
    let detail =
        format!("{} points, initial {init:.3e}, max {max:.3e}, soft bound {soft:.3e} {soft_note}", series.len());
    if complete {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    // Runs under `cargo test`; ignore harness flags such as `--nocapture`.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let start = Instant::now();
    let corpus = run_corpus();
    let flagship = run_flagship();
    let riemann_extra: Vec<RunRecord> = {
        let left = State { tau: 1.0, v: 0.3 };
        let right = State { tau: 0.5, v: -0.2 };
        let data = InitialData::Riemann { left, right, x0: 0.0 };
        [0.2, 0.1, 0.05, 0.025]
            .iter()
            .filter_map(|&delta| {
                let p = with_cone(SchemeParams { delta, epsilon: 0.5, t_end: 1.0, ..base_params() }, &data);
                run(&p, &data, &RunOptions::default()).ok()
            })
            .collect()
    };

    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "riemann solver soundness", c1_riemann()));
    match &flagship {
        Ok(flag) => {
            let mut extra: Vec<&RunRecord> = riemann_extra.iter().collect();
            extra.push(&flag.record);
            results.push((2, "tvd", c2_tvd(&corpus, flag)));
            results.push((3, "case table fidelity", c3_case_table()));
            results.push((4, "weight monotonicity", c4_weight(&corpus)));
            results.push((5, "budgets", c5_budgets(&corpus, &extra)));
            results.push((6, "flagship well-posedness", c6_flagship(flag)));
            results.push((7, "entropy admissibility", c7_entropy(&corpus, flag, &extra)));
        }
        Err(e) => {
            results.push((2, "tvd", Err(format!("flagship run failed: {e}"))));
            results.push((3, "case table fidelity", c3_case_table()));
            results.push((4, "weight monotonicity", c4_weight(&corpus)));
            results.push((5, "budgets", Err(format!("flagship run failed: {e}"))));
            results.push((6, "flagship well-posedness", Err(e.clone())));
            results.push((7, "entropy admissibility", Err(format!("flagship run failed: {e}"))));
        }
    }
    results.push((8, "convergence on exact riemann data", c8_convergence()));
    results.push((9, "entropy comparability", c9_comparability()));
    results.push((10, "eulerian transform", flagship.as_ref().map_err(|e| e.clone()).and_then(c10_eulerian)));
    results.push((11, "weighted relative entropy diagnostic", c11_compare()));

    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(d) => println!("PASS  criterion {n:>2}  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  criterion {n:>2}  {name}: {d}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
