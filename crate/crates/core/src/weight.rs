//! The weight `a(t,x) = C1^L(t) * Q(t) * prod xi_i(t,x)` and its budgets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{Profile, ShockSize, Snapshot, WaveKind, WaveLabel};
use crate::params::{SchemeParams, Tolerances};
use crate::riemann::Family;

/// Factor applied to the right of a shock.
pub fn xi_multiplier(label: WaveLabel, sigma: f64, params: &SchemeParams) -> Result<f64> {
    match (label.family, label.kind) {
        (Family::One, WaveKind::Shock(ShockSize::Small)) => Ok(1.0 - params.c0 * sigma),
        (Family::Two, WaveKind::Shock(ShockSize::Small)) => Ok(1.0 + params.c0 * sigma),
        (Family::One, WaveKind::Shock(ShockSize::Big)) => Ok(params.c1),
        (Family::Two, WaveKind::Shock(ShockSize::Big)) => Ok(1.0 / params.c1),
        (_, WaveKind::Rarefaction) => Err(Error::Contract("rarefactions carry no weight multiplier".into())),
    }
}

/// `L`, `Q` and the list of small-shock numbers whose product is `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightState {
    pub l: u32,
    pub q: f64,
    pub factors: Vec<f64>,
    pub updates: usize,
}

impl Default for WeightState {
    fn default() -> Self {
        WeightState { l: 0, q: 1.0, factors: Vec::new(), updates: 0 }
    }
}

/// The `(L, Q)` part of the weight, enough to evaluate `a` on a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightLevel {
    pub l: u32,
    pub q: f64,
}

impl WeightLevel {
    pub const UNIT: WeightLevel = WeightLevel { l: 0, q: 1.0 };

    pub fn base(&self, c1: f64) -> f64 {
        c1.powi(self.l as i32) * self.q
    }
}

impl WeightState {
    pub fn level(&self) -> WeightLevel {
        WeightLevel { l: self.l, q: self.q }
    }

    /// Apply one event. Every `q_resync_every` updates, `Q` is recomputed from
    /// the factor list and compared against the running product.
    pub fn update(&mut self, delta_l: u32, q_factor: f64, tol: &Tolerances) -> Result<()> {
        if !(q_factor > 0.0 && q_factor <= 1.0) {
            return Err(Error::Consistency(format!("q-factor {q_factor} outside (0, 1]")));
        }
        self.l += delta_l;
        if q_factor != 1.0 {
            self.factors.push(q_factor);
            self.q *= q_factor;
        }
        self.updates += 1;
        if self.updates.is_multiple_of(tol.q_resync_every) {
            self.resync(tol.q_drift)?;
        }
        Ok(())
    }

    pub fn recomputed_q(&self) -> f64 {
        self.factors.iter().product()
    }

    fn resync(&mut self, max_drift: f64) -> Result<()> {
        let exact = self.recomputed_q();
        let drift = (self.q - exact).abs() / exact;
        if drift > max_drift {
            return Err(Error::Consistency(format!("running Q drifted by {drift:e} relative")));
        }
        self.q = exact;
        Ok(())
    }
}

/// `a(t, x)` for `x` not on a front; at a front the value to its right.
pub fn eval_weight(ws: &WeightLevel, snapshot: &Snapshot, x: f64, params: &SchemeParams) -> Result<f64> {
    let mut a = ws.base(params.c1);
    for f in &snapshot.fronts {
        if f.position(snapshot.time) > x {
            break;
        }
        if f.label.is_shock() {
            a *= xi_multiplier(f.label, f.sigma(), params)?;
        }
    }
    Ok(a)
}

/// `a(t, .)` as a piecewise-constant profile with a break at every front.
pub fn weight_profile(ws: &WeightLevel, snapshot: &Snapshot, params: &SchemeParams) -> Result<Profile<f64>> {
    let mut a = ws.base(params.c1);
    let mut values = Vec::with_capacity(snapshot.fronts.len() + 1);
    values.push(a);
    for f in &snapshot.fronts {
        if f.label.is_shock() {
            a *= xi_multiplier(f.label, f.sigma(), params)?;
        }
        values.push(a);
    }
    Ok(Profile { breaks: snapshot.positions(), values })
}

/// Constants bounding the counters, functionals and weight of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetConstants {
    /// Total variation of `w` at `t = 0+`.
    pub v: f64,
    pub k1: f64,
    pub c3: f64,
    pub k0: f64,
    /// Bound on `L`.
    pub lambda: u64,
    /// Lower bound on `Q`.
    pub k: f64,
    pub ln_k: f64,
    pub n_big: u64,
    pub a_min: f64,
    pub ln_a_min: f64,
    pub a_max: f64,
    /// `e^K1`, the largest characteristic speed on states with `|w| <= K1`.
    pub lambda_hat: f64,
    /// `ceil(V/eps)`, bound on big-to-small transitions.
    pub n_big_to_small: u64,
    /// `ceil((K0+V)/eps)`, bound on small-to-big transitions.
    pub n_small_to_big: u64,
    /// `ceil((K0+V)/delta)`, bound on each group of fan-emitting cases.
    pub n_fan_emitting: u64,
}

fn ceil_u(x: f64) -> u64 {
    x.ceil().max(0.0) as u64
}

pub fn compute_budgets(v: f64, leftmost_w: f64, params: &SchemeParams) -> Result<BudgetConstants> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Contract(format!("total variation must be finite and non-negative, got {v}")));
    }
    let (eps, c0, c1) = (params.epsilon, params.c0, params.c1);
    let k1 = leftmost_w.abs() + v;
    let c3 = k1.cosh();
    let k0 = 2.0 * (c3 + 1.0) * v;
    let n_big_to_small = ceil_u(v / eps);
    let n_small_to_big = ceil_u((k0 + v) / eps);
    let lambda = 2 * (n_small_to_big + n_big_to_small);
    let ln_k = -4.0 * c0 * v - 6.0 * c0 * (k0 + v) - 10.0 * c0 * c3 * v;
    let n_big = ceil_u(2.0 * v / eps);
    let ln_a_min = (lambda + n_big) as f64 * c1.ln() + ln_k - 2.0 * v;
    let a_max = (v - n_big as f64 * c1.ln()).exp();
    Ok(BudgetConstants {
        v,
        k1,
        c3,
        k0,
        lambda,
        k: ln_k.exp(),
        ln_k,
        n_big,
        a_min: ln_a_min.exp(),
        ln_a_min,
        a_max,
        lambda_hat: k1.exp(),
        n_big_to_small,
        n_small_to_big,
        n_fan_emitting: ceil_u((k0 + v) / params.delta),
    })
}
