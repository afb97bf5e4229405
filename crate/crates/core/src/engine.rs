//! The event loop.
//!
//! Fronts are kept in a position-ordered vector. Only neighbours can collide,
//! so the next event is the earliest closing time over adjacent pairs; ties
//! within the tie tolerance go to the leftmost pair, and events sharing a
//! timestamp are executed one after another.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{budget_report, conserved_variation, functionals, BudgetReport};
use crate::error::{Error, Result};
use crate::front::{Front, Snapshot};
use crate::initial::{approximate_initial_data, InitialData};
use crate::interactions::{resolve_interaction_with, CaseCode};
use crate::params::SchemeParams;
use crate::policy::{check_shock_speed, RankineHugoniot, ShockSpeedPolicy};
use crate::weight::{compute_budgets, weight_profile, BudgetConstants, WeightLevel, WeightState};

const STATE_SLACK: f64 = 1e-12;

/// One executed interaction, as written to the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub index: u64,
    pub t: f64,
    pub x: f64,
    pub case: CaseCode,
    pub in_ids: [u64; 2],
    /// Letters of the left and right incoming waves.
    pub in_types: String,
    pub out_ids: Vec<u64>,
    /// Number of outgoing rarefaction fronts.
    pub out_rarefactions: u32,
    #[serde(rename = "dS")]
    pub delta_s: f64,
    #[serde(rename = "dB")]
    pub delta_b: f64,
    #[serde(rename = "dL")]
    pub delta_l: u32,
    pub q_factor: f64,
    #[serde(rename = "L_after")]
    pub l_after: u32,
    #[serde(rename = "Q_after")]
    pub q_after: f64,
    #[serde(rename = "S_after")]
    pub s_after: f64,
    #[serde(rename = "B_after")]
    pub b_after: f64,
    pub w_l: f64,
    pub w_m: f64,
    pub w_r: f64,
    pub w_m_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedSnapshot {
    pub snapshot: Snapshot,
    pub weight: WeightLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub s: f64,
    pub b: f64,
    pub l: u32,
    pub q: f64,
}

/// Extremes and counters accumulated during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub events: u64,
    pub counts: BTreeMap<String, u64>,
    /// Events of cases 2/7 and 4A/9A that emitted more than one rarefaction front.
    pub fan_emitting_2_7: u64,
    pub fan_emitting_4a_9a: u64,
    pub sum_pos_ds: f64,
    pub sum_neg_ds: f64,
    pub l_max: u32,
    pub q_min: f64,
    pub ln_a_min_seen: f64,
    pub ln_a_max_seen: f64,
    pub max_abs_w: f64,
    pub min_tau: f64,
    pub max_tau: f64,
    pub max_abs_v: f64,
    pub max_speed: f64,
    pub sup_tv_conserved: f64,
    pub max_fronts: usize,
    /// Largest `dB` seen, floored at 0; never positive beyond rounding.
    pub max_delta_b: f64,
}

impl RunStats {
    fn new() -> Self {
        RunStats {
            events: 0,
            counts: BTreeMap::new(),
            fan_emitting_2_7: 0,
            fan_emitting_4a_9a: 0,
            sum_pos_ds: 0.0,
            sum_neg_ds: 0.0,
            l_max: 0,
            q_min: 1.0,
            ln_a_min_seen: f64::INFINITY,
            ln_a_max_seen: f64::NEG_INFINITY,
            max_abs_w: 0.0,
            min_tau: f64::INFINITY,
            max_tau: 0.0,
            max_abs_v: 0.0,
            max_speed: 0.0,
            sup_tv_conserved: 0.0,
            max_fronts: 0,
            max_delta_b: 0.0,
        }
    }

    pub fn count(&self, code: &str) -> u64 {
        self.counts.get(code).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub params: SchemeParams,
    pub policy: String,
    pub budgets: BudgetConstants,
    pub initial: RecordedSnapshot,
    pub snapshots: Vec<RecordedSnapshot>,
    pub last: RecordedSnapshot,
    pub events: Vec<InteractionEvent>,
    pub series: Vec<SeriesPoint>,
    pub stats: RunStats,
    pub report: BudgetReport,
}

/// Called around every event with the pattern just before and just after it,
/// both at the event time.
pub trait EventObserver {
    fn observe(
        &mut self,
        before: &Snapshot,
        before_weight: WeightLevel,
        after: &Snapshot,
        after_weight: WeightLevel,
        event: &InteractionEvent,
    ) -> Result<()>;
}

#[derive(Clone)]
pub struct RunOptions {
    pub snapshot_times: Vec<f64>,
    pub policy: Arc<dyn ShockSpeedPolicy>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { snapshot_times: Vec::new(), policy: Arc::new(RankineHugoniot) }
    }
}

impl RunOptions {
    pub fn with_snapshots(times: impl IntoIterator<Item = f64>) -> Self {
        RunOptions { snapshot_times: times.into_iter().collect(), ..Self::default() }
    }
}

struct Engine<'a> {
    params: SchemeParams,
    policy: &'a dyn ShockSpeedPolicy,
    budgets: BudgetConstants,
    time: f64,
    leftmost: crate::state::LogState,
    fronts: Vec<Front>,
    next_id: u64,
    weight: WeightState,
    s: f64,
    b: f64,
    stats: RunStats,
    events: Vec<InteractionEvent>,
    series: Vec<SeriesPoint>,
}

impl<'a> Engine<'a> {
    fn snapshot(&self, t: f64) -> Snapshot {
        Snapshot { time: t, leftmost_state: self.leftmost, fronts: self.fronts.clone() }
    }

    fn speed_cap(&self) -> f64 {
        self.budgets.lambda_hat * (1.0 + STATE_SLACK)
    }

    fn next_collision(&self) -> Option<(f64, usize)> {
        let times: Vec<(usize, f64)> = self
            .fronts
            .windows(2)
            .enumerate()
            .filter_map(|(i, pair)| {
                let closing = pair[0].speed - pair[1].speed;
                if !(closing > 0.0) {
                    return None;
                }
                let gap = pair[1].position(self.time) - pair[0].position(self.time);
                Some((i, self.time + gap.max(0.0) / closing))
            })
            .collect();
        let t_min = times.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let tie = self.params.tolerances.tie;
        times.into_iter().find(|p| p.1 <= t_min + tie).map(|(i, t)| (t, i))
    }

    fn check_state_bounds(&mut self) -> Result<()> {
        let k1 = self.budgets.k1 + STATE_SLACK * (1.0 + self.budgets.k1);
        let states = std::iter::once(self.leftmost).chain(self.fronts.iter().map(|f| f.right_state));
        for s in states {
            if s.w.abs() > k1 {
                return Err(Error::Budget(format!(
                    "state w = {} exceeds K1 = {} at t = {}",
                    s.w, self.budgets.k1, self.time
                )));
            }
            self.stats.max_abs_w = self.stats.max_abs_w.max(s.w.abs());
            let tau = s.tau();
            self.stats.min_tau = self.stats.min_tau.min(tau);
            self.stats.max_tau = self.stats.max_tau.max(tau);
            self.stats.max_abs_v = self.stats.max_abs_v.max(s.v.abs());
        }
        Ok(())
    }

    fn full_check(&mut self) -> Result<()> {
        let snap = self.snapshot(self.time);
        snap.check_chain().map_err(|m| Error::Consistency(format!("{m} (after event {})", self.stats.events)))?;
        let (s, b) = functionals(&snap);
        let drift_tol = self.params.tolerances.consistency * (1.0 + self.stats.events as f64 / 1000.0);
        if (s - self.s).abs() > drift_tol || (b - self.b).abs() > drift_tol {
            return Err(Error::Consistency(format!(
                "functionals drifted at t = {}: S {} vs {}, B {} vs {}",
                self.time, s, self.s, b, self.b
            )));
        }
        self.check_state_bounds()?;
        let prof = weight_profile(&self.weight.level(), &snap, &self.params)?;
        let c1_ln_a_max = self.budgets.a_max.ln();
        for a in prof.values {
            let ln_a = a.ln();
            self.stats.ln_a_min_seen = self.stats.ln_a_min_seen.min(ln_a);
            self.stats.ln_a_max_seen = self.stats.ln_a_max_seen.max(ln_a);
            if ln_a < self.budgets.ln_a_min - STATE_SLACK || ln_a > c1_ln_a_max + STATE_SLACK {
                return Err(Error::Budget(format!(
                    "weight {a} left [a_min, a_max] = [exp({}), {}] at t = {}",
                    self.budgets.ln_a_min, self.budgets.a_max, self.time
                )));
            }
        }
        self.stats.sup_tv_conserved = self.stats.sup_tv_conserved.max(conserved_variation(&snap));
        Ok(())
    }

    fn check_counters(&self) -> Result<()> {
        let report = budget_report(&self.stats, &self.budgets);
        match report.checks.iter().find(|c| !c.pass) {
            Some(c) => Err(Error::Budget(format!(
                "{} = {} exceeds its bound {} at t = {}",
                c.name, c.observed, c.bound, self.time
            ))),
            None => Ok(()),
        }
    }

    fn register_front(&mut self, f: &Front) -> Result<()> {
        if f.label.is_shock() {
            check_shock_speed(f.family(), f.speed, self.speed_cap())?;
        }
        self.stats.max_speed = self.stats.max_speed.max(f.speed.abs());
        Ok(())
    }

    fn execute(&mut self, t: f64, i: usize, observer: &mut Option<&mut dyn EventObserver>) -> Result<()> {
        let before = observer.as_ref().map(|_| (self.snapshot(t), self.weight.level()));
        let (left, right) = (self.fronts[i], self.fronts[i + 1]);
        let out = resolve_interaction_with(&left, &right, &self.params, self.policy).map_err(|e| match e {
            Error::Consistency(m) => Error::Consistency(format!(
                "event {} at t = {t}, fronts {} ({}) and {} ({}): {m}",
                self.stats.events, left.id, left.label, right.id, right.label
            )),
            other => other,
        })?;
        let x = 0.5 * (left.position(t) + right.position(t));
        self.time = t;

        let mut new_fronts = Vec::with_capacity(out.fronts.len());
        for bp in &out.fronts {
            let f = Front {
                id: self.next_id,
                label: bp.label,
                left_state: bp.left_state,
                right_state: bp.right_state,
                origin: x,
                speed: bp.speed,
                birth_time: t,
            };
            self.next_id += 1;
            self.register_front(&f)?;
            new_fronts.push(f);
        }
        let out_ids: Vec<u64> = new_fronts.iter().map(|f| f.id).collect();
        let out_rarefactions = new_fronts.iter().filter(|f| !f.label.is_shock()).count() as u32;
        if new_fronts.is_empty() {
            // Every outgoing wave was degenerate: close the gap onto the left state.
            if let Some(next) = self.fronts.get_mut(i + 2) {
                next.left_state = left.left_state;
            }
        }
        self.fronts.splice(i..=i + 1, new_fronts);

        self.weight.update(out.delta_l, out.q_factor, &self.params.tolerances)?;
        self.s += out.delta_s;
        self.b += out.delta_b;

        let st = &mut self.stats;
        st.events += 1;
        *st.counts.entry(out.case.to_string()).or_insert(0) += 1;
        if out_rarefactions > 1 {
            match out.case {
                CaseCode::C2 | CaseCode::C7 => st.fan_emitting_2_7 += 1,
                CaseCode::C4A | CaseCode::C9A => st.fan_emitting_4a_9a += 1,
                _ => {}
            }
        }
        st.sum_pos_ds += out.delta_s.max(0.0);
        st.sum_neg_ds += (-out.delta_s).max(0.0);
        st.l_max = st.l_max.max(self.weight.l);
        st.q_min = st.q_min.min(self.weight.q);
        st.max_fronts = st.max_fronts.max(self.fronts.len());
        st.max_delta_b = st.max_delta_b.max(out.delta_b);

        let ev = InteractionEvent {
            index: self.events.len() as u64,
            t,
            x,
            case: out.case,
            in_ids: [left.id, right.id],
            in_types: format!("{}{}", left.label.letter(), right.label.letter()),
            out_ids,
            out_rarefactions,
            delta_s: out.delta_s,
            delta_b: out.delta_b,
            delta_l: out.delta_l,
            q_factor: out.q_factor,
            l_after: self.weight.l,
            q_after: self.weight.q,
            s_after: self.s,
            b_after: self.b,
            w_l: out.states.w_l,
            w_m: out.states.w_m,
            w_r: out.states.w_r,
            w_m_prime: out.states.w_m_prime,
        };
        self.series.push(SeriesPoint { t, s: self.s, b: self.b, l: self.weight.l, q: self.weight.q });

        self.check_counters()?;
        if self.stats.events.is_multiple_of(self.params.tolerances.full_check_every as u64) {
            self.full_check()?;
        }
        if let (Some(obs), Some((snap, level))) = (observer.as_mut(), before) {
            obs.observe(&snap, level, &self.snapshot(t), self.weight.level(), &ev)?;
        }
        self.events.push(ev);
        Ok(())
    }
}

/// Run the scheme on `data` until `params.t_end`.
pub fn run(params: &SchemeParams, data: &InitialData, opts: &RunOptions) -> Result<RunRecord> {
    run_observed(params, data, opts, None)
}

pub fn run_observed(
    params: &SchemeParams,
    data: &InitialData,
    opts: &RunOptions,
    mut observer: Option<&mut dyn EventObserver>,
) -> Result<RunRecord> {
    params.validate()?;
    let policy = opts.policy.as_ref();
    let initial = approximate_initial_data(data, params, policy)?;
    let (s0, b0) = functionals(&initial);
    let budgets = compute_budgets(b0, initial.leftmost_state.w, params)?;
    if params.cone_speed < budgets.lambda_hat {
        return Err(Error::Config(format!(
            "cone speed {} is below the maximal wave speed e^K1 = {}",
            params.cone_speed, budgets.lambda_hat
        )));
    }

    let mut eng = Engine {
        params: *params,
        policy,
        budgets,
        time: 0.0,
        leftmost: initial.leftmost_state,
        fronts: initial.fronts.clone(),
        next_id: initial.fronts.len() as u64,
        weight: WeightState::default(),
        s: s0,
        b: b0,
        stats: RunStats::new(),
        events: Vec::new(),
        series: vec![SeriesPoint { t: 0.0, s: s0, b: b0, l: 0, q: 1.0 }],
    };
    for f in initial.fronts.clone() {
        eng.register_front(&f)?;
    }
    eng.stats.max_fronts = eng.fronts.len();
    eng.full_check()?;

    let mut times: Vec<f64> = opts.snapshot_times.iter().copied().filter(|t| *t >= 0.0 && *t <= params.t_end).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut pending = times.into_iter().peekable();
    let mut snapshots = Vec::new();

    loop {
        let next = eng.next_collision().filter(|(t, _)| *t <= params.t_end);
        let horizon = next.map_or(f64::INFINITY, |(t, _)| t);
        while let Some(&ts) = pending.peek() {
            if ts < horizon {
                snapshots.push(RecordedSnapshot { snapshot: eng.snapshot(ts), weight: eng.weight.level() });
                pending.next();
            } else {
                break;
            }
        }
        let Some((t, i)) = next else { break };
        if eng.stats.events as usize >= params.tolerances.max_events {
            return Err(Error::Budget(format!("event cap {} reached at t = {}", params.tolerances.max_events, t)));
        }
        eng.execute(t, i, &mut observer)?;
    }
    eng.time = params.t_end;
    if !eng.stats.events.is_multiple_of(params.tolerances.full_check_every as u64) {
        eng.full_check()?;
    }

    let report = budget_report(&eng.stats, &eng.budgets);
    Ok(RunRecord {
        params: *params,
        policy: policy.name().to_string(),
        budgets: eng.budgets,
        initial: RecordedSnapshot { snapshot: initial, weight: WeightLevel::UNIT },
        snapshots,
        last: RecordedSnapshot { snapshot: eng.snapshot(params.t_end), weight: eng.weight.level() },
        events: eng.events,
        series: eng.series,
        stats: eng.stats,
        report,
    })
}

/// Independent runs in parallel; results keep the input order.
pub fn run_many(jobs: &[(SchemeParams, InitialData, RunOptions)]) -> Vec<Result<RunRecord>> {
    jobs.par_iter().map(|(p, d, o)| run(p, d, o)).collect()
}
