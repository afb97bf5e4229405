//! Phase-space types and the entropy algebra of the isothermal p-system.
//!
//! Conserved variables are `(tau, v)` with pressure `p(tau) = 1/tau`. Wave
//! algebra is carried out in the log coordinates `(w, v)` with `w = -ln tau`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(tau, v)` of phase space: specific volume and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub tau: f64,
    pub v: f64,
}

/// The image `(w, v) = (-ln tau, v)` of a [`State`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogState {
    pub w: f64,
    pub v: f64,
}

/// Entropy value and entropy flux at a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPair {
    pub eta: f64,
    pub q: f64,
}

impl State {
    pub fn new(tau: f64, v: f64) -> Result<Self> {
        if !(tau.is_finite() && v.is_finite()) {
            return Err(Error::Domain(format!("non-finite state ({tau}, {v})")));
        }
        if tau <= 0.0 {
            return Err(Error::Domain(format!("specific volume must be positive, got {tau}")));
        }
        Ok(Self { tau, v })
    }

    pub fn rho(&self) -> f64 {
        1.0 / self.tau
    }

    pub fn pressure(&self) -> f64 {
        1.0 / self.tau
    }

    /// Flux of the p-system, `f(tau, v) = (-v, p(tau))`.
    pub fn flux(&self) -> (f64, f64) {
        (-self.v, self.pressure())
    }

    pub fn to_log(&self) -> Result<LogState> {
        to_log(*self)
    }

    /// ℓ¹ distance in conserved variables.
    pub fn l1_dist(&self, other: &State) -> f64 {
        (self.tau - other.tau).abs() + (self.v - other.v).abs()
    }
}

impl LogState {
    pub const fn new(w: f64, v: f64) -> Self {
        Self { w, v }
    }

    pub fn tau(&self) -> f64 {
        (-self.w).exp()
    }

    pub fn to_state(&self) -> State {
        from_log(*self)
    }
}

pub fn to_log(s: State) -> Result<LogState> {
    if s.tau <= 0.0 || !s.tau.is_finite() {
        return Err(Error::Domain(format!("specific volume must be positive, got {}", s.tau)));
    }
    Ok(LogState { w: -s.tau.ln(), v: s.v })
}

pub fn from_log(ls: LogState) -> State {
    State { tau: (-ls.w).exp(), v: ls.v }
}

/// `W(s) = s` for `s <= 0` and `2 sinh(s/2)` for `s > 0`.
///
/// Velocity drop along a wave curve as a function of the signed strength.
pub fn w_func(s: f64) -> f64 {
    if s <= 0.0 {
        s
    } else {
        2.0 * (0.5 * s).sinh()
    }
}

/// Derivative of [`w_func`]; equals 1 on the linear branch and `cosh(s/2)` above 0.
pub fn w_func_deriv(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else {
        (0.5 * s).cosh()
    }
}

/// Characteristic speeds `(-1/tau, 1/tau)`.
pub fn eigenvalues(s: State) -> (f64, f64) {
    let c = 1.0 / s.tau;
    (-c, c)
}

/// Characteristic speeds in log coordinates, `(-e^w, e^w)`.
pub fn eigenvalues_log(ls: LogState) -> (f64, f64) {
    let c = ls.w.exp();
    (-c, c)
}

/// `eta(tau, v) = v^2/2 - ln tau`.
pub fn entropy(s: State) -> f64 {
    0.5 * s.v * s.v - s.tau.ln()
}

/// `q(tau, v) = p(tau) v = v / tau`.
pub fn entropy_flux(s: State) -> f64 {
    s.v / s.tau
}

pub fn entropy_pair(s: State) -> EntropyPair {
    EntropyPair { eta: entropy(s), q: entropy_flux(s) }
}

/// Gradient of the entropy in conserved variables: `(-1/tau, v)`.
pub fn entropy_gradient(s: State) -> (f64, f64) {
    (-1.0 / s.tau, s.v)
}

/// Relative entropy `eta(a|b) = eta(a) - eta(b) - grad eta(b) . (a - b)`,
/// evaluated in its expanded closed form.
pub fn rel_entropy(a: State, b: State) -> f64 {
    let dv = a.v - b.v;
    0.5 * dv * dv + (b.tau / a.tau).ln() + (a.tau - b.tau) / b.tau
}

/// Relative entropy flux `q(a;b) = q(a) - q(b) - grad eta(b) . (f(a) - f(b))`.
pub fn rel_flux(a: State, b: State) -> f64 {
    let (g0, g1) = entropy_gradient(b);
    let (fa0, fa1) = a.flux();
    let (fb0, fb1) = b.flux();
    entropy_flux(a) - entropy_flux(b) - (g0 * (fa0 - fb0) + g1 * (fa1 - fb1))
}

/// Compact rectangle of states used to fit the comparability constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateBox {
    pub tau_min: f64,
    pub tau_max: f64,
    pub v_max: f64,
}

impl StateBox {
    pub fn contains(&self, s: State) -> bool {
        s.tau >= self.tau_min && s.tau <= self.tau_max && s.v.abs() <= self.v_max
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        State { tau: rng.gen_range(self.tau_min..=self.tau_max), v: rng.gen_range(-self.v_max..=self.v_max) }
    }

    fn corners(&self) -> [State; 4] {
        [
            State { tau: self.tau_min, v: -self.v_max },
            State { tau: self.tau_min, v: self.v_max },
            State { tau: self.tau_max, v: -self.v_max },
            State { tau: self.tau_max, v: self.v_max },
        ]
    }
}

/// Constants with `c_star |a-b|^2 <= eta(a|b) <= c_star_star |a-b|^2` and
/// `|q(a;b)| <= flux_c eta(a|b)` on a [`StateBox`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyConstants {
    pub c_star: f64,
    pub c_star_star: f64,
    pub flux_c: f64,
    /// Extremes of the sampled ratios before widening to the Hessian envelope.
    pub sampled_min: f64,
    pub sampled_max: f64,
    pub samples: usize,
}

/// Fit the comparability constants on `bx` from `samples` random pairs.
///
/// The sampled extremes of `eta(a|b)/|a-b|^2` are widened to half the extreme
/// Hessian eigenvalues over the box (`diag(1/tau^2, 1)`), which bound the ratio
/// on every segment inside the convex box. `flux_c` is the sampled supremum.
pub fn fit_entropy_constants<R: Rng + ?Sized>(bx: &StateBox, samples: usize, rng: &mut R) -> EntropyConstants {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut flux = 0.0_f64;
    let mut taken = 0;
    while taken < samples {
        let a = bx.sample(rng);
        let b = bx.sample(rng);
        let d2 = (a.tau - b.tau).powi(2) + (a.v - b.v).powi(2);
        if d2 < 1e-12 {
            continue;
        }
        let eta = rel_entropy(a, b);
        let ratio = eta / d2;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        flux = flux.max(rel_flux(a, b).abs() / eta);
        taken += 1;
    }
    let mut eig_lo = f64::INFINITY;
    let mut eig_hi = 0.0_f64;
    for c in bx.corners() {
        let h = 1.0 / (c.tau * c.tau);
        eig_lo = eig_lo.min(h.min(1.0));
        eig_hi = eig_hi.max(h.max(1.0));
    }
    EntropyConstants {
        c_star: lo.min(0.5 * eig_lo),
        c_star_star: hi.max(0.5 * eig_hi),
        flux_c: flux,
        sampled_min: lo,
        sampled_max: hi,
        samples,
    }
}
