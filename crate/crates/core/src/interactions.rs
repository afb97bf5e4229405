//! Classification and resolution of two-front collisions.
//!
//! Six wave types are tracked (letters `a`..`f`, see [`WaveLabel::letter`]).
//! A 2-wave meeting a 1-wave is a *trivial* interaction: both waves pass
//! through each other with unchanged strengths. Two waves of the same family
//! give one of the non-trivial cases `1`..`10`, several split into A/B
//! subcases by the strength of the outgoing same-family wave.
//!
//! For a same-family pair the outgoing Riemann solution depends only on the
//! outer states. The case formulas are written for the ordering in which the
//! alphabetically first letter sits on the left; when the actual order is
//! reversed they are evaluated with the middle state that ordering would have
//! had, `w_l + w_r - w_m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{Front, WaveLabel};
use crate::params::SchemeParams;
use crate::policy::{RankineHugoniot, ShockSpeedPolicy};
use crate::riemann::{fan_between, solve_intermediate, Family, ZERO_STRENGTH};
use crate::state::{w_func, LogState};
use crate::weight::xi_multiplier;

/// Outgoing waves whose strength has the wrong sign by less than this are
/// treated as degenerate and dropped.
const SIGN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseCode {
    C1,
    C2,
    C3A,
    C3B,
    C4A,
    C4B,
    C5A,
    C5B,
    C6,
    C7,
    C8A,
    C8B,
    C9A,
    C9B,
    C10A,
    C10B,
    /// Cross-family pair, letters sorted.
    Trivial(char, char),
    Impossible,
}

const NONTRIVIAL: [(CaseCode, &str); 16] = [
    (CaseCode::C1, "1"),
    (CaseCode::C2, "2"),
    (CaseCode::C3A, "3A"),
    (CaseCode::C3B, "3B"),
    (CaseCode::C4A, "4A"),
    (CaseCode::C4B, "4B"),
    (CaseCode::C5A, "5A"),
    (CaseCode::C5B, "5B"),
    (CaseCode::C6, "6"),
    (CaseCode::C7, "7"),
    (CaseCode::C8A, "8A"),
    (CaseCode::C8B, "8B"),
    (CaseCode::C9A, "9A"),
    (CaseCode::C9B, "9B"),
    (CaseCode::C10A, "10A"),
    (CaseCode::C10B, "10B"),
];

impl CaseCode {
    pub fn all_nontrivial() -> impl Iterator<Item = CaseCode> {
        NONTRIVIAL.iter().map(|(c, _)| *c)
    }

    pub fn is_trivial(self) -> bool {
        matches!(self, CaseCode::Trivial(..))
    }

    /// `L` increments on cases 1, 3B and 9B.
    pub fn delta_l(self) -> u32 {
        matches!(self, CaseCode::C1 | CaseCode::C3B | CaseCode::C9B) as u32
    }

    /// Cases whose Q-factor may differ from 1.
    pub fn has_q_factor(self) -> bool {
        matches!(self, CaseCode::C2 | CaseCode::C3A | CaseCode::C4A | CaseCode::C5A | CaseCode::C5B)
    }

    /// Expected labels of the outgoing 1-wave and 2-wave.
    pub fn outgoing_labels(self) -> Option<(WaveLabel, WaveLabel)> {
        use CaseCode::*;
        let (b1, s1, r1) = (WaveLabel::BIG_1, WaveLabel::SMALL_1, WaveLabel::RAR_1);
        let (b2, s2, r2) = (WaveLabel::BIG_2, WaveLabel::SMALL_2, WaveLabel::RAR_2);
        Some(match self {
            C1 | C2 | C4B => (b1, r2),
            C3A => (b1, s2),
            C3B | C5A | C8B | C10A => (s1, s2),
            C4A | C10B => (s1, r2),
            C5B | C9A => (r1, s2),
            C6 | C7 | C9B => (r1, b2),
            C8A => (s1, b2),
            Trivial(..) | Impossible => return None,
        })
    }
}

impl fmt::Display for CaseCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseCode::Trivial(a, b) => write!(f, "TRIV:{a}+{b}"),
            CaseCode::Impossible => write!(f, "IMPOSSIBLE"),
            code => {
                let name = NONTRIVIAL.iter().find(|(c, _)| c == code).map(|(_, n)| *n).unwrap_or("?");
                f.write_str(name)
            }
        }
    }
}

impl FromStr for CaseCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "IMPOSSIBLE" {
            return Ok(CaseCode::Impossible);
        }
        if let Some(pair) = s.strip_prefix("TRIV:") {
            let chars: Vec<char> = pair.chars().collect();
            if chars.len() == 3 && chars[1] == '+' {
                let (a, b) = (chars[0], chars[2]);
                if let (Some(la), Some(lb)) = (WaveLabel::from_letter(a), WaveLabel::from_letter(b)) {
                    if la.family != lb.family && a < b {
                        return Ok(CaseCode::Trivial(a, b));
                    }
                }
            }
            return Err(Error::Parse(format!("bad trivial case code {s:?}")));
        }
        NONTRIVIAL
            .iter()
            .find(|(_, n)| *n == s)
            .map(|(c, _)| *c)
            .ok_or_else(|| Error::Parse(format!("unknown case code {s:?}")))
    }
}

impl Serialize for CaseCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CaseCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Subcase selection from the outgoing strengths `s1p = w_m' - w_l` and
/// `s2p = w_m' - w_r`, for a sorted same-family letter pair.
pub fn nontrivial_code(pair: (char, char), s1p: f64, s2p: f64, epsilon: f64) -> Option<CaseCode> {
    use CaseCode::*;
    Some(match pair {
        ('a', 'a') => C1,
        ('a', 'b') => C2,
        ('a', 'e') => {
            if s1p >= 0.5 * epsilon {
                C3A
            } else {
                C3B
            }
        }
        ('b', 'b') => {
            if s1p < epsilon {
                C4A
            } else {
                C4B
            }
        }
        ('b', 'e') => {
            if s1p > 0.0 {
                C5A
            } else {
                C5B
            }
        }
        ('c', 'c') => C6,
        ('c', 'd') => C7,
        ('c', 'f') => {
            if s2p >= 0.5 * epsilon {
                C8A
            } else {
                C8B
            }
        }
        ('d', 'd') => {
            if s2p < epsilon {
                C9A
            } else {
                C9B
            }
        }
        ('d', 'f') => {
            if s2p > 0.0 {
                C10A
            } else {
                C10B
            }
        }
        _ => return None,
    })
}

/// Outer and middle `w` values of an interaction, with the middle value
/// normalised to the canonical ordering, plus the outgoing middle `w_m'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseStates {
    pub w_l: f64,
    pub w_m: f64,
    pub w_r: f64,
    pub w_m_prime: f64,
}

/// Closed-form `(dS, dB)` of a non-trivial case.
pub fn symbolic_deltas(code: CaseCode, s: CaseStates) -> (f64, f64) {
    use CaseCode::*;
    let CaseStates { w_l, w_m, w_r, w_m_prime: p } = s;
    match code {
        C1 | C6 => (0.0, 0.0),
        C2 => (-(w_r - w_m), 0.0),
        C3A => (p - w_r, -2.0 * (w_m - p)),
        C3B => ((p - w_l) + (p - w_r), -2.0 * (w_m - p)),
        C4A => (-(w_r - p), 0.0),
        C4B => (-(w_r - w_l), 0.0),
        C5A => (2.0 * p - w_m - w_r, -2.0 * (w_m - p)),
        C5B => (w_l - w_m + p - w_r, -2.0 * (w_m - w_l)),
        C7 => (w_r - w_m, 0.0),
        C8A => (p - w_l, -2.0 * (w_l - w_m - p + w_r)),
        C8B => (2.0 * p - w_l - w_r, -2.0 * (w_l - w_m - p + w_r)),
        C9A => (p - w_l, 0.0),
        C9B => (-(w_l - w_r), 0.0),
        C10A => (2.0 * p - 2.0 * w_l - w_r + w_m, -2.0 * (w_l - w_m + w_r - p)),
        C10B => (p - 2.0 * w_l + w_m, -2.0 * (w_l - w_m)),
        Trivial(..) | Impossible => (0.0, 0.0),
    }
}

/// The small-shock number appended to `K(t)`; 1 for cases without one.
pub fn q_factor(code: CaseCode, s: CaseStates, c0: f64) -> f64 {
    use CaseCode::*;
    let CaseStates { w_l, w_m, w_r, w_m_prime: p } = s;
    match code {
        C2 => 1.0 - c0 * (w_r - w_m),
        C3A => 1.0 / (1.0 + c0 * (p - w_r)),
        C4A => ((1.0 - c0 * (w_m - w_l)) * (1.0 - c0 * (w_r - w_m)) / (1.0 - c0 * (p - w_l))).min(1.0),
        C5A => (1.0 - c0 * (w_m - w_l)) / ((1.0 - c0 * (p - w_l)) * (1.0 + c0 * (p - w_r))),
        C5B => (1.0 - c0 * (w_m - w_l)) / (1.0 + c0 * (p - w_r)),
        _ => 1.0,
    }
}

/// A front to be created at the collision point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontBlueprint {
    pub label: WaveLabel,
    pub left_state: LogState,
    pub right_state: LogState,
    pub speed: f64,
}

/// An outgoing elementary wave before fan partitioning and dropping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutgoingWave {
    pub label: WaveLabel,
    pub left_state: LogState,
    pub right_state: LogState,
}

impl OutgoingWave {
    pub fn sigma(&self) -> f64 {
        self.label.family.strength(self.left_state, self.right_state)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionOutcome {
    pub case: CaseCode,
    /// Elementary outgoing waves in left-to-right order, before dropping.
    pub waves: Vec<OutgoingWave>,
    /// Fronts to insert, left to right. Empty if every outgoing wave dropped.
    pub fronts: Vec<FrontBlueprint>,
    pub states: CaseStates,
    /// Case formula values.
    pub delta_s: f64,
    pub delta_b: f64,
    /// Values recomputed from the incoming and outgoing waves.
    pub delta_s_recomputed: f64,
    pub delta_b_recomputed: f64,
    pub delta_l: u32,
    pub q_factor: f64,
    /// `a(t+)/a(t-)` immediately left and right of the collision point.
    pub weight_ratio_left: f64,
    pub weight_ratio_right: f64,
}

fn contribution(label: WaveLabel, sigma: f64) -> (f64, f64) {
    let s = if label.is_small_shock() { sigma } else { 0.0 };
    (s, sigma.abs())
}

/// Classify a colliding pair of adjacent fronts.
pub fn classify_pair(left: &Front, right: &Front, params: &SchemeParams) -> Result<CaseCode> {
    let (a, b) = (left.label, right.label);
    if a.family == b.family && !a.is_shock() && !b.is_shock() {
        return Ok(CaseCode::Impossible);
    }
    if !(left.speed > right.speed) {
        return Err(Error::Contract(format!(
            "fronts {} and {} do not collide (speeds {} and {})",
            left.id, right.id, left.speed, right.speed
        )));
    }
    match (a.family, b.family) {
        (Family::Two, Family::One) => {
            let (x, y) = sorted(a.letter(), b.letter());
            Ok(CaseCode::Trivial(x, y))
        }
        (Family::One, Family::Two) => {
            Err(Error::Contract(format!("1-wave {} cannot overtake 2-wave {} on its right", left.id, right.id)))
        }
        _ => {
            let d = solve_intermediate(left.left_state, right.right_state)?;
            let pair = sorted(a.letter(), b.letter());
            nontrivial_code(pair, d.sigma1, d.w_m - right.right_state.w, params.epsilon)
                .ok_or_else(|| Error::Contract(format!("no case for pair {}+{}", pair.0, pair.1)))
        }
    }
}

fn sorted(a: char, b: char) -> (char, char) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Trivial interaction: a 2-wave `(ul, um)` meets a 1-wave `(um, ur)`. The
/// waves swap order, keep their strengths, and the new middle state is
/// `T_1(sigma1)(ul)`, whose `w` equals `w_l + w_r - w_m`.
pub fn resolve_trivial(ul: LogState, um: LogState, ur: LogState) -> LogState {
    let sigma1 = Family::One.strength(um, ur);
    LogState { w: ul.w + sigma1, v: ul.v - w_func(sigma1) }
}

/// Resolve a collision with the Rankine–Hugoniot speed policy.
pub fn resolve_interaction(left: &Front, right: &Front, params: &SchemeParams) -> Result<InteractionOutcome> {
    resolve_interaction_with(left, right, params, &RankineHugoniot)
}

pub fn resolve_interaction_with(
    left: &Front,
    right: &Front,
    params: &SchemeParams,
    policy: &dyn ShockSpeedPolicy,
) -> Result<InteractionOutcome> {
    if left.right_state != right.left_state {
        return Err(Error::Contract(format!("fronts {} and {} are not adjacent", left.id, right.id)));
    }
    let case = classify_pair(left, right, params)?;
    let (ul, um, ur) = (left.left_state, left.right_state, right.right_state);
    let tol = params.tolerances;

    let (waves, states, delta_s, delta_b, q) = match case {
        CaseCode::Impossible => {
            return Err(Error::Consistency(format!(
                "two rarefaction pieces of one family collided (fronts {} and {})",
                left.id, right.id
            )))
        }
        CaseCode::Trivial(..) => {
            let mid = resolve_trivial(ul, um, ur);
            let waves = vec![
                OutgoingWave { label: right.label, left_state: ul, right_state: mid },
                OutgoingWave { label: left.label, left_state: mid, right_state: ur },
            ];
            let states = CaseStates { w_l: ul.w, w_m: um.w, w_r: ur.w, w_m_prime: mid.w };
            (waves, states, 0.0, 0.0, 1.0)
        }
        code => {
            let d = solve_intermediate(ul, ur)?;
            let mid = d.middle();
            let (l1, l2) = code.outgoing_labels().expect("non-trivial case has labels");
            let waves = vec![
                OutgoingWave { label: l1, left_state: ul, right_state: mid },
                OutgoingWave { label: l2, left_state: mid, right_state: ur },
            ];
            let reversed = left.label.letter() > right.label.letter();
            let w_m = if reversed { ul.w + ur.w - um.w } else { um.w };
            let states = CaseStates { w_l: ul.w, w_m, w_r: ur.w, w_m_prime: d.w_m };
            let (ds, db) = symbolic_deltas(code, states);
            let q = q_factor(code, states, params.c0);
            (waves, states, ds, db, q)
        }
    };

    // Sign check and reflected-shock assertions.
    for (i, wave) in waves.iter().enumerate() {
        let sigma = wave.sigma();
        let wrong_sign = if wave.label.is_shock() { sigma < 0.0 } else { sigma > 0.0 };
        if wrong_sign && sigma.abs() > SIGN_SLACK {
            return Err(Error::Consistency(format!(
                "case {case}: outgoing wave {i} labelled {} has strength {sigma}",
                wave.label
            )));
        }
        let in_family = left.label.family;
        if !case.is_trivial()
            && wave.label.family != in_family
            && wave.label.is_shock()
            && !(wave.label.is_small_shock() && sigma < params.epsilon)
        {
            return Err(Error::Consistency(format!("case {case}: reflected shock of strength {sigma} is not small")));
        }
    }

    let incoming = [left, right];
    let (mut s_in, mut b_in) = (0.0, 0.0);
    for f in incoming {
        let (s, b) = contribution(f.label, f.sigma());
        s_in += s;
        b_in += b;
    }
    let (mut s_out, mut b_out) = (0.0, 0.0);
    for w in &waves {
        let (s, b) = contribution(w.label, w.sigma());
        s_out += s;
        b_out += b;
    }
    let delta_s_recomputed = s_out - s_in;
    let delta_b_recomputed = b_out - b_in;
    for (name, sym, rec) in [("dS", delta_s, delta_s_recomputed), ("dB", delta_b, delta_b_recomputed)] {
        if (sym - rec).abs() > tol.consistency {
            return Err(Error::Consistency(format!(
                "case {case}: {name} formula gives {sym:e} but recomputation gives {rec:e}"
            )));
        }
    }
    if delta_b > tol.monotone {
        return Err(Error::Consistency(format!("case {case}: dB = {delta_b:e} > 0")));
    }

    if !(q > 0.0) || q > 1.0 + tol.monotone {
        return Err(Error::Consistency(format!("case {case}: q-factor {q} outside (0, 1]")));
    }
    let q = q.min(1.0);

    let fronts = emit_fronts(&waves, ul, ur, params.delta, policy, case.is_trivial())?;

    let delta_l = case.delta_l();
    let ratio_left = params.c1.powi(delta_l as i32) * q;
    let mut xi_in = 1.0;
    for f in incoming {
        if f.label.is_shock() {
            xi_in *= xi_multiplier(f.label, f.sigma(), params)?;
        }
    }
    let mut xi_out = 1.0;
    for f in &fronts {
        if f.label.is_shock() {
            xi_out *= xi_multiplier(f.label, f.label.family.strength(f.left_state, f.right_state), params)?;
        }
    }
    let ratio_right = ratio_left * xi_out / xi_in;
    for (side, r) in [("left", ratio_left), ("right", ratio_right)] {
        if r > 1.0 + tol.monotone {
            return Err(Error::Consistency(format!("case {case}: weight increases on the {side} by factor {r}")));
        }
    }

    Ok(InteractionOutcome {
        case,
        waves,
        fronts,
        states,
        delta_s,
        delta_b,
        delta_s_recomputed,
        delta_b_recomputed,
        delta_l,
        q_factor: q,
        weight_ratio_left: ratio_left,
        weight_ratio_right: ratio_right,
    })
}

/// Turn elementary waves into fronts, dropping degenerate ones. Endpoints are
/// pinned to `ul` and `ur` so the new fronts chain onto their neighbours.
/// A trivial interaction moves a single rarefaction piece, which is kept as
/// one piece instead of being re-partitioned.
pub(crate) fn emit_fronts(
    waves: &[OutgoingWave],
    ul: LogState,
    ur: LogState,
    delta: f64,
    policy: &dyn ShockSpeedPolicy,
    keep_pieces: bool,
) -> Result<Vec<FrontBlueprint>> {
    let kept: Vec<OutgoingWave> = waves
        .iter()
        .copied()
        .filter(|w| {
            let s = w.sigma();
            let wrong = if w.label.is_shock() { s < 0.0 } else { s > 0.0 };
            s.abs() >= ZERO_STRENGTH && !wrong
        })
        .collect();
    let n = kept.len();
    let mut out = Vec::new();
    for (i, w) in kept.iter().enumerate() {
        let left = if i == 0 { ul } else { w.left_state };
        let right = if i + 1 == n { ur } else { w.right_state };
        let family = w.label.family;
        let sigma = family.strength(left, right);
        if w.label.is_shock() {
            out.push(FrontBlueprint {
                label: w.label,
                left_state: left,
                right_state: right,
                speed: policy.speed(w.label, left, right),
            });
        } else if keep_pieces {
            out.push(FrontBlueprint {
                label: w.label,
                left_state: left,
                right_state: right,
                speed: family.lambda(right),
            });
        } else {
            for piece in fan_between(family, sigma, left, right, delta)? {
                out.push(FrontBlueprint {
                    label: w.label,
                    left_state: piece.left_state,
                    right_state: piece.right_state,
                    speed: piece.speed,
                });
            }
        }
    }
    Ok(out)
}
