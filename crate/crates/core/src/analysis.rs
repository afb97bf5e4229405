//! Functionals, budget reports, entropy checks, the weighted relative
//! entropy between two runs, and the change to Eulerian coordinates.

use serde::{Deserialize, Serialize};

use crate::engine::{RecordedSnapshot, RunRecord, RunStats};
use crate::error::{Error, Result};
use crate::front::{Front, Profile, Snapshot};
use crate::params::SchemeParams;
use crate::state::{entropy, entropy_flux, rel_entropy, LogState, State};
use crate::weight::{weight_profile, BudgetConstants};

/// `S`, the total strength of small shocks, and `B`, the total variation of `w`.
pub fn functionals(snapshot: &Snapshot) -> (f64, f64) {
    snapshot.fronts.iter().fold((0.0, 0.0), |(s, b), f| {
        let small = if f.label.is_small_shock() { f.sigma() } else { 0.0 };
        (s + small, b + f.strength())
    })
}

/// Total variation of the conserved variables `(tau, v)` in the ℓ¹ norm.
pub fn conserved_variation(snapshot: &Snapshot) -> f64 {
    snapshot.fronts.iter().map(Front::conserved_jump).sum()
}

/// `[q] - s [eta]` across a front; non-positive for an entropic jump.
pub fn entropy_residual(front: &Front) -> f64 {
    let (l, r) = (front.left_state.to_state(), front.right_state.to_state());
    entropy_flux(r) - entropy_flux(l) - front.speed * (entropy(r) - entropy(l))
}

pub fn entropy_admissible(front: &Front) -> bool {
    entropy_residual(front) <= 1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub v: f64,
    pub checks: Vec<BudgetCheck>,
    pub all_pass: bool,
}

impl BudgetReport {
    pub fn check(&self, name: &str) -> Option<&BudgetCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Compare run counters and extremes with their budgets. Every check has the
/// form `observed <= bound`; lower bounds are expressed through negated logs.
pub fn budget_report(stats: &RunStats, b: &BudgetConstants) -> BudgetReport {
    let slack = |x: f64| 1e-10 * (1.0 + x.abs());
    let c = |name: &str, observed: f64, bound: f64, slackish: bool| {
        let tol = if slackish { slack(bound) } else { 0.0 };
        BudgetCheck { name: name.to_string(), observed, bound, pass: observed <= bound + tol }
    };
    let n = |code: &str| stats.count(code) as f64;
    let checks = vec![
        c("count(3B)+count(8B)", n("3B") + n("8B"), b.n_big_to_small as f64, false),
        c("count(4B)+count(9B)", n("4B") + n("9B"), b.n_small_to_big as f64, false),
        c("count(1)+count(6)", n("1") + n("6"), (b.n_big_to_small + b.n_small_to_big) as f64, false),
        c("fan-emitting(2,7)", stats.fan_emitting_2_7 as f64, b.n_fan_emitting as f64, false),
        c("fan-emitting(4A,9A)", stats.fan_emitting_4a_9a as f64, b.n_fan_emitting as f64, false),
        c("L_max", stats.l_max as f64, b.lambda as f64, false),
        c("sum(dS+)", stats.sum_pos_ds, b.k0, true),
        c("sum(dS-)", stats.sum_neg_ds, b.k0 + b.v, true),
        c("-ln(Q_min)", -stats.q_min.ln(), -b.ln_k, true),
        c("ln(a_max seen)", stats.ln_a_max_seen, b.a_max.ln(), true),
        c("-ln(a_min seen)", -stats.ln_a_min_seen, -b.ln_a_min, true),
        c("max|w|", stats.max_abs_w, b.k1, true),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    BudgetReport { v: b.v, checks, all_pass }
}

/// Recompute the counters from the event list and re-check the budgets.
pub fn audit(record: &RunRecord) -> BudgetReport {
    let mut stats = record.stats.clone();
    stats.counts.clear();
    stats.fan_emitting_2_7 = 0;
    stats.fan_emitting_4a_9a = 0;
    stats.sum_pos_ds = 0.0;
    stats.sum_neg_ds = 0.0;
    stats.l_max = 0;
    stats.q_min = 1.0;
    for e in &record.events {
        let code = e.case.to_string();
        if e.out_rarefactions > 1 {
            match code.as_str() {
                "2" | "7" => stats.fan_emitting_2_7 += 1,
                "4A" | "9A" => stats.fan_emitting_4a_9a += 1,
                _ => {}
            }
        }
        *stats.counts.entry(code).or_insert(0) += 1;
        stats.sum_pos_ds += e.delta_s.max(0.0);
        stats.sum_neg_ds += (-e.delta_s).max(0.0);
        stats.l_max = stats.l_max.max(e.l_after);
        stats.q_min = stats.q_min.min(e.q_after);
    }
    budget_report(&stats, &record.budgets)
}

/// `(2/rho_min)(lambda_hat + rho_max M)` from the realized density and
/// velocity extremes of a run.
pub fn eulerian_speed_bound(record: &RunRecord) -> f64 {
    let st = &record.stats;
    let (rho_min, rho_max) = (1.0 / st.max_tau, 1.0 / st.min_tau);
    2.0 / rho_min * (record.budgets.lambda_hat + rho_max * st.max_abs_v)
}

/// Largest Eulerian speed of a discontinuity present in both snapshots,
/// matched by front id.
pub fn eulerian_speed_check(e1: &EulerianSnapshot, e2: &EulerianSnapshot) -> Result<f64> {
    let dt = e2.time - e1.time;
    if !(dt > 0.0) {
        return Err(Error::Contract("Eulerian snapshots must be in increasing time order".into()));
    }
    let mut worst: f64 = 0.0;
    for (k, id) in e1.ids.iter().enumerate() {
        if let Some(j) = e2.ids.iter().position(|x| x == id) {
            worst = worst.max((e2.y[j + 1] - e1.y[k + 1]).abs() / dt);
        }
    }
    Ok(worst)
}

/// `int a_psi(x) eta(u | psi) dx` over the cone `[-R + l t, R - l t]`.
pub fn weighted_rel_entropy(psi: &RecordedSnapshot, u: &RecordedSnapshot, params: &SchemeParams) -> Result<f64> {
    let a = weight_profile(&psi.weight, &psi.snapshot, params)?;
    let states = psi.snapshot.profile();
    let joint = Profile { breaks: states.breaks, values: states.values.into_iter().zip(a.values).collect() };
    weighted_rel_entropy_profiles(&joint, &u.snapshot.profile(), psi.snapshot.time, params)
}

/// As [`weighted_rel_entropy`], from a profile of `(psi, a_psi)` pairs.
pub fn weighted_rel_entropy_profiles(
    psi: &Profile<(LogState, f64)>,
    u: &Profile<LogState>,
    t: f64,
    params: &SchemeParams,
) -> Result<f64> {
    let (lo, hi) = (-params.domain_radius + params.cone_speed * t, params.domain_radius - params.cone_speed * t);
    if !(hi > lo) {
        return Err(Error::Domain(format!("cone of information is empty at t = {t}")));
    }
    Ok(psi.integrate_with(u, lo, hi, |(p, weight), uu| weight * rel_entropy(uu.to_state(), p.to_state())))
}

/// Weighted relative entropy at every time present in both snapshot lists
/// for which the cone is non-empty.
pub fn rel_entropy_series(
    psi: &[RecordedSnapshot],
    u: &[RecordedSnapshot],
    params: &SchemeParams,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for p in psi {
        let t = p.snapshot.time;
        let Some(q) = u.iter().find(|q| (q.snapshot.time - t).abs() <= 1e-12) else { continue };
        if params.domain_radius - params.cone_speed * t <= -params.domain_radius + params.cone_speed * t {
            continue;
        }
        out.push((t, weighted_rel_entropy(p, q, params)?));
    }
    if out.is_empty() {
        return Err(Error::Domain("no common snapshot time inside the cone of information".into()));
    }
    Ok(out)
}

/// A snapshot in Eulerian coordinates: `rho[i], v[i]` on `[y[i], y[i+1])`.
/// `ids[k]` is the front sitting at the interior breakpoint `y[k+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerianSnapshot {
    pub time: f64,
    pub y: Vec<f64>,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub ids: Vec<u64>,
}

impl EulerianSnapshot {
    /// `int rho dy`, equal to the length of the mass window.
    pub fn total_mass(&self) -> f64 {
        self.y.windows(2).zip(&self.rho).map(|(w, r)| r * (w[1] - w[0])).sum()
    }
}

/// Map the mass window `[x_a, x_b]` of a snapshot to Eulerian space, with
/// the particle of mass coordinate `x_a` at `y_anchor`. Fronts sharing a
/// position produce zero-length intervals.
pub fn to_eulerian(snapshot: &Snapshot, window: (f64, f64), y_anchor: f64) -> Result<EulerianSnapshot> {
    let (xa, xb) = window;
    if !(xb > xa) {
        return Err(Error::Contract("empty mass window".into()));
    }
    let t = snapshot.time;
    let inside: Vec<&Front> = snapshot.fronts.iter().filter(|f| f.position(t) > xa && f.position(t) < xb).collect();
    let mut state = snapshot.evaluate(xa);
    let mut y = vec![y_anchor];
    let (mut rho, mut v) = (Vec::new(), Vec::new());
    let mut x = xa;
    let ends = inside.iter().map(|f| (f.position(t), Some(f.right_state))).chain(std::iter::once((xb, None)));
    for (x_next, next_state) in ends {
        let x_next = x_next.max(x);
        let s = state.to_state();
        if !(s.tau.is_finite() && s.tau > 0.0) {
            return Err(Error::Domain(format!("vacuum state tau = {} in Eulerian transform", s.tau)));
        }
        y.push(y.last().unwrap() + s.tau * (x_next - x));
        rho.push(s.rho());
        v.push(s.v);
        x = x_next;
        if let Some(ns) = next_state {
            state = ns;
        }
    }
    Ok(EulerianSnapshot { time: t, y, rho, v, ids: inside.iter().map(|f| f.id).collect() })
}

/// Inverse of [`to_eulerian`]: mass breakpoints starting at `x_a` and the
/// `(tau, v)` state on each interval.
pub fn to_lagrangian(e: &EulerianSnapshot, xa: f64) -> (Vec<f64>, Vec<State>) {
    let mut x = vec![xa];
    let mut states = Vec::with_capacity(e.rho.len());
    for (i, w) in e.y.windows(2).enumerate() {
        x.push(x.last().unwrap() + e.rho[i] * (w[1] - w[0]));
        states.push(State { tau: 1.0 / e.rho[i], v: e.v[i] });
    }
    (x, states)
}

/// Eulerian position of the particle with mass coordinate `x_a` at time `t`,
/// valid while `x_a` stays left of every front.
pub fn anchor_position(far_left: LogState, xa: f64, t: f64) -> f64 {
    xa * far_left.tau() + far_left.v * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::WaveLabel;
    use crate::params::test_params;
    use crate::riemann::{apply_wave_curve, rh_speed, Family};
    use crate::weight::WeightLevel;

    fn shock(l: LogState, sigma: f64, family: Family) -> Front {
        let r = apply_wave_curve(family, sigma, l);
        Front {
            id: 0,
            label: WaveLabel::shock(family, crate::front::ShockSize::Small),
            left_state: l,
            right_state: r,
            origin: 0.0,
            speed: rh_speed(family, l, r),
            birth_time: 0.0,
        }
    }

    #[test]
    fn lax_shocks_dissipate_entropy() {
        for sigma in [0.01, 0.3, 1.0, 2.0] {
            for fam in [Family::One, Family::Two] {
                let f = shock(LogState::new(0.2, -0.1), sigma, fam);
                assert!(entropy_admissible(&f), "sigma {sigma}");
                assert!(entropy_residual(&f) < 0.0);
            }
        }
        // An expansion shock violates the inequality.
        let f = shock(LogState::new(0.0, 0.0), -0.5, Family::One);
        assert!(!entropy_admissible(&f));
    }

    #[test]
    fn eulerian_round_trip() {
        let a = LogState::new(0.0, 0.0);
        let f = shock(a, 0.5, Family::One);
        let snap = Snapshot { time: 0.0, leftmost_state: a, fronts: vec![f] };
        let e = to_eulerian(&snap, (-2.0, 3.0), 0.0).unwrap();
        assert_eq!(e.ids, vec![0]);
        assert!((e.total_mass() - 5.0).abs() < 1e-12);
        assert!((e.y[1] - 2.0).abs() < 1e-12);
        let (x, states) = to_lagrangian(&e, -2.0);
        assert!((x[1] - 0.0).abs() < 1e-12 && (x[2] - 3.0).abs() < 1e-12);
        assert!((states[1].tau - f.right_state.tau()).abs() < 1e-12);
    }

    #[test]
    fn constant_tau_two_doubles_length() {
        let a = State { tau: 2.0, v: 0.3 }.to_log().unwrap();
        let e = to_eulerian(&Snapshot::constant(0.0, a), (0.0, 1.0), 0.0).unwrap();
        assert!((e.y[1] - 2.0).abs() < 1e-15);
        assert!((e.rho[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rel_entropy_of_identical_runs_is_zero() {
        let p = test_params();
        let a = LogState::new(0.0, 0.0);
        let snap = Snapshot { time: 0.0, leftmost_state: a, fronts: vec![shock(a, 0.2, Family::Two)] };
        let rs = RecordedSnapshot { snapshot: snap, weight: WeightLevel::UNIT };
        assert_eq!(weighted_rel_entropy(&rs, &rs, &p).unwrap(), 0.0);
        let mut late = rs.clone();
        late.snapshot.time = 10.0;
        assert!(weighted_rel_entropy(&late, &late, &p).is_err());
    }
}
