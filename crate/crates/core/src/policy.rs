//! Shock speed policies.
//!
//! The default is the Rankine–Hugoniot speed. Alternative policies may return
//! any speed with the sign of the shock's family and magnitude at most the
//! run's speed cap; the engine rejects anything else.

use crate::error::{Error, Result};
use crate::front::WaveLabel;
use crate::riemann::{rh_speed, Family};
use crate::state::LogState;

pub trait ShockSpeedPolicy: Send + Sync {
    fn speed(&self, label: WaveLabel, left: LogState, right: LogState) -> f64;

    fn name(&self) -> &str;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RankineHugoniot;

impl ShockSpeedPolicy for RankineHugoniot {
    fn speed(&self, label: WaveLabel, left: LogState, right: LogState) -> f64 {
        rh_speed(label.family, left, right)
    }

    fn name(&self) -> &str {
        "rankine-hugoniot"
    }
}

/// Rankine–Hugoniot speed scaled by a constant factor and clamped to `cap`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSpeed {
    pub factor: f64,
    pub cap: f64,
}

impl ShockSpeedPolicy for ScaledSpeed {
    fn speed(&self, label: WaveLabel, left: LogState, right: LogState) -> f64 {
        let s = self.factor * rh_speed(label.family, left, right);
        s.clamp(-self.cap, self.cap)
    }

    fn name(&self) -> &str {
        "scaled"
    }
}

/// 1-shocks must move with speed in `[-cap, 0)`, 2-shocks in `(0, cap]`.
pub fn check_shock_speed(family: Family, speed: f64, cap: f64) -> Result<()> {
    let ok = match family {
        Family::One => speed < 0.0 && speed >= -cap,
        Family::Two => speed > 0.0 && speed <= cap,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Contract(format!("{}-shock speed {speed} outside the admissible range (cap {cap})", family.index())))
    }
}
