//! Exact Riemann solution in the `(w, v)` plane.
//!
//! The `i`-wave curve through `(w_l, v_l)` is
//! `sigma -> (w_l + (-1)^(i-1) sigma, v_l - W(sigma))`; positive `sigma` is a
//! shock, negative a rarefaction. Strengths are always jumps in `w`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{eigenvalues_log, w_func, w_func_deriv, LogState};

/// Characteristic family of a wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    One,
    Two,
}

impl Family {
    pub fn index(self) -> u8 {
        match self {
            Family::One => 1,
            Family::Two => 2,
        }
    }

    /// Sign multiplying `sigma` in the `w` component of the wave curve.
    pub fn w_sign(self) -> f64 {
        match self {
            Family::One => 1.0,
            Family::Two => -1.0,
        }
    }

    /// Characteristic speed of this family at a state.
    pub fn lambda(self, s: LogState) -> f64 {
        let (l1, l2) = eigenvalues_log(s);
        match self {
            Family::One => l1,
            Family::Two => l2,
        }
    }

    /// Signed strength of the wave `(left, right)` read as a wave of this family.
    pub fn strength(self, left: LogState, right: LogState) -> f64 {
        self.w_sign() * (right.w - left.w)
    }
}

/// Waves with `|sigma|` below this are dropped and produce no front.
pub const ZERO_STRENGTH: f64 = 1e-14;

/// `T_family(sigma)(left)`.
pub fn apply_wave_curve(family: Family, sigma: f64, left: LogState) -> LogState {
    LogState { w: left.w + family.w_sign() * sigma, v: left.v - w_func(sigma) }
}

/// Solution of a Riemann problem: a 1-wave of strength `sigma1` followed by a
/// 2-wave of strength `sigma2` through the intermediate state `(w_m, v_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveDecomposition {
    pub sigma1: f64,
    pub sigma2: f64,
    pub w_m: f64,
    pub v_m: f64,
}

impl WaveDecomposition {
    pub fn middle(&self) -> LogState {
        LogState { w: self.w_m, v: self.v_m }
    }

    /// `|sigma1| + |sigma2|`, the total variation in `w` of the solution.
    pub fn total_strength(&self) -> f64 {
        self.sigma1.abs() + self.sigma2.abs()
    }

    pub fn sigma(&self, family: Family) -> f64 {
        match family {
            Family::One => self.sigma1,
            Family::Two => self.sigma2,
        }
    }
}

const MAX_ITER: usize = 200;

/// Find the intermediate state of the Riemann problem `(ul, ur)`.
///
/// Root of the strictly increasing map `m -> W(m - w_l) + W(m - w_r) - (v_l - v_r)`
/// by Newton's method, safeguarded by bisection on the bracket
/// `[min(w_l, w_r) - |dv|, max(w_l, w_r) + |dv|]`.
pub fn solve_intermediate(ul: LogState, ur: LogState) -> Result<WaveDecomposition> {
    if !(ul.w.is_finite() && ul.v.is_finite() && ur.w.is_finite() && ur.v.is_finite()) {
        return Err(Error::Domain("non-finite Riemann data".into()));
    }
    let dv = ul.v - ur.v;
    let residual = |m: f64| w_func(m - ul.w) + w_func(m - ur.w) - dv;
    let tol = 1e-13 * (1.0 + dv.abs());

    let mut lo = ul.w.min(ur.w) - dv.abs();
    let mut hi = ul.w.max(ur.w) + dv.abs();
    let mut m = (0.5 * (ul.w + ur.w + dv)).clamp(lo, hi);
    let mut f = residual(m);
    let mut iterations = 0;
    while iterations < MAX_ITER {
        if f == 0.0 {
            break;
        }
        if f > 0.0 {
            hi = m;
        } else {
            lo = m;
        }
        let slope = w_func_deriv(m - ul.w) + w_func_deriv(m - ur.w);
        let newton = m - f / slope;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - m).abs();
        m = next;
        f = residual(m);
        iterations += 1;
        if f.abs() <= tol && step <= 4.0 * f64::EPSILON * (1.0 + m.abs()) {
            break;
        }
        if hi - lo <= 2.0 * f64::EPSILON * (1.0 + m.abs()) && f.abs() <= tol {
            break;
        }
    }
    if !(f.abs() <= 10.0 * tol) {
        return Err(Error::Solver { iterations, residual: f });
    }
    Ok(WaveDecomposition { sigma1: m - ul.w, sigma2: m - ur.w, w_m: m, v_m: ul.v - w_func(m - ul.w) })
}

/// Rankine–Hugoniot speed `-/+ exp((w_l + w_r)/2)` without admissibility checks.
pub fn rh_speed(family: Family, ul: LogState, ur: LogState) -> f64 {
    let s = (0.5 * (ul.w + ur.w)).exp();
    match family {
        Family::One => -s,
        Family::Two => s,
    }
}

/// Rankine–Hugoniot speed of an admissible shock (`sigma >= 0`) of `family`.
pub fn shock_speed(ul: LogState, ur: LogState, family: Family) -> Result<f64> {
    let sigma = family.strength(ul, ur);
    if !(sigma >= 0.0) {
        return Err(Error::Contract(format!("({:?}) is not a {}-shock: sigma = {sigma}", (ul, ur), family.index())));
    }
    Ok(rh_speed(family, ul, ur))
}

/// One piece of a partitioned rarefaction fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanPiece {
    pub left_state: LogState,
    pub right_state: LogState,
    pub speed: f64,
}

/// Split an `i`-rarefaction of strength `sigma < 0` into `ceil(|sigma|/delta)`
/// equal pieces, each travelling at the characteristic speed of its right state.
pub fn fan_partition(family: Family, sigma: f64, left: LogState, delta: f64) -> Result<Vec<FanPiece>> {
    let right = apply_wave_curve(family, sigma, left);
    fan_between(family, sigma, left, right, delta)
}

/// As [`fan_partition`], but pinning the last piece's right state to `right`
/// so fronts chain exactly onto already existing states.
pub(crate) fn fan_between(
    family: Family,
    sigma: f64,
    left: LogState,
    right: LogState,
    delta: f64,
) -> Result<Vec<FanPiece>> {
    if !(sigma < 0.0) {
        return Err(Error::Contract(format!("fan needs sigma < 0, got {sigma}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Contract(format!("fan mesh must be positive, got {delta}")));
    }
    let pieces = (sigma.abs() / delta).ceil().max(1.0) as usize;
    let step = sigma / pieces as f64;
    let mut out = Vec::with_capacity(pieces);
    let mut prev = left;
    for l in 1..=pieces {
        let next = if l == pieces { right } else { apply_wave_curve(family, step * l as f64, left) };
        out.push(FanPiece { left_state: prev, right_state: next, speed: family.lambda(next) });
        prev = next;
    }
    Ok(out)
}

/// `D(u_l, u_r) = |w_l - w_m| + |w_m - w_r|`.
pub fn d_func(ul: LogState, ur: LogState) -> Result<f64> {
    Ok(solve_intermediate(ul, ur)?.total_strength())
}
