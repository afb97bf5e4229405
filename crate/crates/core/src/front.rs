//! Fronts, wave labels and piecewise-constant snapshots.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::riemann::Family;
use crate::state::LogState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShockSize {
    Big,
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    Shock(ShockSize),
    Rarefaction,
}

/// Family plus kind of a wave. Only shocks carry a big/small size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WaveLabel {
    pub family: Family,
    pub kind: WaveKind,
}

impl WaveLabel {
    pub const BIG_1: WaveLabel = WaveLabel { family: Family::One, kind: WaveKind::Shock(ShockSize::Big) };
    pub const SMALL_1: WaveLabel = WaveLabel { family: Family::One, kind: WaveKind::Shock(ShockSize::Small) };
    pub const BIG_2: WaveLabel = WaveLabel { family: Family::Two, kind: WaveKind::Shock(ShockSize::Big) };
    pub const SMALL_2: WaveLabel = WaveLabel { family: Family::Two, kind: WaveKind::Shock(ShockSize::Small) };
    pub const RAR_1: WaveLabel = WaveLabel { family: Family::One, kind: WaveKind::Rarefaction };
    pub const RAR_2: WaveLabel = WaveLabel { family: Family::Two, kind: WaveKind::Rarefaction };

    pub fn shock(family: Family, size: ShockSize) -> Self {
        WaveLabel { family, kind: WaveKind::Shock(size) }
    }

    pub fn rarefaction(family: Family) -> Self {
        WaveLabel { family, kind: WaveKind::Rarefaction }
    }

    pub fn is_shock(&self) -> bool {
        matches!(self.kind, WaveKind::Shock(_))
    }

    pub fn is_small_shock(&self) -> bool {
        matches!(self.kind, WaveKind::Shock(ShockSize::Small))
    }

    pub fn is_big_shock(&self) -> bool {
        matches!(self.kind, WaveKind::Shock(ShockSize::Big))
    }

    /// Letter of the six wave types: a) big 1-shock, b) small 1-shock,
    /// c) big 2-shock, d) small 2-shock, e) 1-rarefaction, f) 2-rarefaction.
    pub fn letter(&self) -> char {
        match (self.family, self.kind) {
            (Family::One, WaveKind::Shock(ShockSize::Big)) => 'a',
            (Family::One, WaveKind::Shock(ShockSize::Small)) => 'b',
            (Family::Two, WaveKind::Shock(ShockSize::Big)) => 'c',
            (Family::Two, WaveKind::Shock(ShockSize::Small)) => 'd',
            (Family::One, WaveKind::Rarefaction) => 'e',
            (Family::Two, WaveKind::Rarefaction) => 'f',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        Some(match c {
            'a' => Self::BIG_1,
            'b' => Self::SMALL_1,
            'c' => Self::BIG_2,
            'd' => Self::SMALL_2,
            'e' => Self::RAR_1,
            'f' => Self::RAR_2,
            _ => return None,
        })
    }
}

impl fmt::Display for WaveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            WaveKind::Shock(ShockSize::Big) => "big shock",
            WaveKind::Shock(ShockSize::Small) => "small shock",
            WaveKind::Rarefaction => "rarefaction",
        };
        write!(f, "{}-{}", self.family.index(), what)
    }
}

/// One moving discontinuity of a front tracking pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub id: u64,
    pub label: WaveLabel,
    pub left_state: LogState,
    pub right_state: LogState,
    /// Position at `birth_time`.
    pub origin: f64,
    pub speed: f64,
    pub birth_time: f64,
}

impl Front {
    pub fn family(&self) -> Family {
        self.label.family
    }

    pub fn position(&self, t: f64) -> f64 {
        self.origin + self.speed * (t - self.birth_time)
    }

    /// Signed strength in the family's convention (positive for shocks).
    pub fn sigma(&self) -> f64 {
        self.family().strength(self.left_state, self.right_state)
    }

    /// `|sigma|`, the jump in `w`.
    pub fn strength(&self) -> f64 {
        (self.right_state.w - self.left_state.w).abs()
    }

    /// ℓ¹ jump in conserved variables.
    pub fn conserved_jump(&self) -> f64 {
        self.left_state.to_state().l1_dist(&self.right_state.to_state())
    }
}

/// A piecewise-constant profile at a fixed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub leftmost_state: LogState,
    /// Ordered by position.
    pub fronts: Vec<Front>,
}

impl Snapshot {
    pub fn constant(time: f64, state: LogState) -> Self {
        Snapshot { time, leftmost_state: state, fronts: Vec::new() }
    }

    pub fn positions(&self) -> Vec<f64> {
        self.fronts.iter().map(|f| f.position(self.time)).collect()
    }

    pub fn rightmost_state(&self) -> LogState {
        self.fronts.last().map_or(self.leftmost_state, |f| f.right_state)
    }

    /// The constant states, one more than the number of fronts.
    pub fn states(&self) -> Vec<LogState> {
        let mut out = Vec::with_capacity(self.fronts.len() + 1);
        out.push(self.leftmost_state);
        out.extend(self.fronts.iter().map(|f| f.right_state));
        out
    }

    /// State at `x`, right-continuous at fronts.
    pub fn evaluate(&self, x: f64) -> LogState {
        let mut state = self.leftmost_state;
        for f in &self.fronts {
            if f.position(self.time) <= x {
                state = f.right_state;
            } else {
                break;
            }
        }
        state
    }

    /// Chaining and ordering check: positions non-decreasing and each front's
    /// right state equal to the next front's left state.
    pub fn check_chain(&self) -> Result<(), String> {
        let mut prev_state = self.leftmost_state;
        let mut prev_x = f64::NEG_INFINITY;
        for f in &self.fronts {
            if f.left_state != prev_state {
                return Err(format!("front {} does not chain onto its left neighbour", f.id));
            }
            let x = f.position(self.time);
            if x < prev_x - 1e-9 * (1.0 + x.abs()) {
                return Err(format!("front {} out of order at t = {}", f.id, self.time));
            }
            prev_x = x.max(prev_x);
            prev_state = f.right_state;
        }
        Ok(())
    }

    pub fn profile(&self) -> Profile<LogState> {
        Profile { breaks: self.positions(), values: self.states() }
    }
}

/// Piecewise-constant function with `values.len() == breaks.len() + 1`;
/// `values[0]` holds on `(-inf, breaks[0])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    pub breaks: Vec<f64>,
    pub values: Vec<T>,
}

impl<T: Copy> Profile<T> {
    pub fn value_at(&self, x: f64) -> T {
        let idx = self.breaks.partition_point(|&b| b <= x);
        self.values[idx]
    }

    /// Exact integral over `[a, b]` of `g` applied to the values of `self` and
    /// `other`, splitting at the union of both break sets.
    pub fn integrate_with<U: Copy, F: Fn(T, U) -> f64>(&self, other: &Profile<U>, a: f64, b: f64, g: F) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let mut cuts: Vec<f64> =
            self.breaks.iter().chain(other.breaks.iter()).copied().filter(|&x| x > a && x < b).collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                (w[1] - w[0]) * g(self.value_at(mid), other.value_at(mid))
            })
            .sum()
    }
}

/// Exact ℓ¹ distance in conserved variables between two snapshots over `window`.
pub fn l1_distance(s1: &Snapshot, s2: &Snapshot, window: (f64, f64)) -> f64 {
    s1.profile().integrate_with(&s2.profile(), window.0, window.1, |a, b| a.to_state().l1_dist(&b.to_state()))
}
