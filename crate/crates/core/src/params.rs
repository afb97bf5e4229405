use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances. The only values with defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Agreement between symbolic case formulas and recomputed functionals.
    pub consistency: f64,
    /// Slack allowed in `a(t+, x) <= a(t-, x)` and in `dB <= 0`.
    pub monotone: f64,
    /// Collision times closer than this are treated as simultaneous.
    pub tie: f64,
    /// Relative drift allowed between the running product `Q` and its audit list.
    pub q_drift: f64,
    /// Number of events between recomputations of `Q` from its factors.
    pub q_resync_every: usize,
    /// Full snapshot recomputation cadence (1 = after every event).
    pub full_check_every: usize,
    /// Hard cap on the number of events in one run.
    pub max_events: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            consistency: 1e-10,
            monotone: 1e-12,
            tie: 1e-13,
            q_drift: 1e-9,
            q_resync_every: 1000,
            full_check_every: 1,
            max_events: 5_000_000,
        }
    }
}

/// Admissible box for initial data: `tau_min <= tau <= tau_max`, `|v| <= v_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataBox {
    pub v_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
}

/// Parameters of the modified front tracking scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Rarefaction fan mesh, also the cell size of the initial averaging.
    pub delta: f64,
    /// Big/small shock threshold.
    pub epsilon: f64,
    /// Small-shock weight constant.
    pub c0: f64,
    /// Big-shock weight constant.
    pub c1: f64,
    pub t_end: f64,
    /// Initial data are constant outside `[-R, R]`.
    pub domain_radius: f64,
    /// Speed of the cone of information `[-R + l t, R - l t]`.
    pub cone_speed: f64,
    /// Vacuum floor: initial `tau >= beta`.
    pub beta: f64,
    pub data_box: DataBox,
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl SchemeParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let finite = [
            self.delta,
            self.epsilon,
            self.c0,
            self.c1,
            self.t_end,
            self.domain_radius,
            self.cone_speed,
            self.beta,
            self.data_box.v_max,
            self.data_box.tau_min,
            self.data_box.tau_max,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if !(self.delta > 0.0 && self.delta < 0.5 * self.epsilon) {
            return bad(format!("need 0 < delta < epsilon/2 (delta = {}, epsilon = {})", self.delta, self.epsilon));
        }
        if !(self.c0 > 0.0 && self.c0 <= 1.0) {
            return bad(format!("need 0 < c0 <= 1, got {}", self.c0));
        }
        if self.c0 * self.epsilon > 0.5 {
            return bad(format!("need c0 * epsilon <= 1/2, got {}", self.c0 * self.epsilon));
        }
        if !(self.c1 > 0.0 && self.c1 <= 0.25) {
            return bad(format!("need 0 < c1 <= 1/4, got {}", self.c1));
        }
        if !(self.t_end >= 0.0) {
            return bad("t_end must be non-negative".into());
        }
        if !(self.domain_radius > 0.0) {
            return bad("domain_radius must be positive".into());
        }
        if !(self.beta > 0.0) {
            return bad("beta must be positive".into());
        }
        if !(self.cone_speed > 0.0) {
            return bad("cone_speed must be positive".into());
        }
        let b = self.data_box;
        if !(b.tau_min > 0.0 && b.tau_min <= b.tau_max && b.v_max >= 0.0) {
            return bad("data box must satisfy 0 < tau_min <= tau_max and v_max >= 0".into());
        }
        let t = self.tolerances;
        if t.q_resync_every == 0 || t.full_check_every == 0 || t.max_events == 0 {
            return bad("tolerance cadences must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) fn test_params() -> SchemeParams {
    SchemeParams {
        delta: 0.05,
        epsilon: 0.25,
        c0: 1.0,
        c1: 0.2,
        t_end: 1.0,
        domain_radius: 5.0,
        cone_speed: 50.0,
        beta: 0.01,
        data_box: DataBox { v_max: 10.0, tau_min: 0.01, tau_max: 100.0 },
        seed: 1,
        tolerances: Tolerances::default(),
    }
}
