//! Initial data and their front tracking approximation at `t = 0+`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{Front, ShockSize, Snapshot, WaveLabel};
use crate::interactions::{emit_fronts, OutgoingWave};
use crate::params::SchemeParams;
use crate::policy::ShockSpeedPolicy;
use crate::riemann::{apply_wave_curve, solve_intermediate, Family};
use crate::state::State;

/// Piecewise-constant `(tau, v)` data; constant outside `[-R, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    Constant {
        state: State,
    },
    Riemann {
        left: State,
        right: State,
        #[serde(default)]
        x0: f64,
    },
    /// `states[0]` on `(-inf, breaks[0])`, `states[i]` on `[breaks[i-1], breaks[i])`.
    Piecewise {
        breaks: Vec<f64>,
        states: Vec<State>,
    },
    /// Two states of equal `tau` moving towards each other with relative
    /// velocity `dv`; the jump at `x0` emits a 1-shock and a 2-shock.
    TwoShock {
        tau: f64,
        dv: f64,
        #[serde(default)]
        x0: f64,
    },
    /// CSV with header `x_left,tau,v`; the first row's `x_left` is ignored.
    File {
        path: std::path::PathBuf,
    },
    /// `pieces` equal pieces on `[-R, R]` joined by single elementary waves of
    /// random family and strength, with strengths summing to
    /// `total_variation`. Seeded from the run seed.
    RandomBv {
        pieces: usize,
        total_variation: f64,
        #[serde(default = "unit_state")]
        center: State,
    },
}

fn unit_state() -> State {
    State { tau: 1.0, v: 0.0 }
}

impl InitialData {
    /// Resolve presets into explicit breaks and states.
    pub fn to_piecewise(&self, params: &SchemeParams) -> Result<(Vec<f64>, Vec<State>)> {
        match self {
            InitialData::Constant { state } => Ok((vec![], vec![*state])),
            InitialData::Riemann { left, right, x0 } => Ok((vec![*x0], vec![*left, *right])),
            InitialData::Piecewise { breaks, states } => Ok((breaks.clone(), states.clone())),
            InitialData::TwoShock { tau, dv, x0 } => {
                Ok((vec![*x0], vec![State { tau: *tau, v: 0.5 * dv }, State { tau: *tau, v: -0.5 * dv }]))
            }
            InitialData::File { path } => read_data_file(path),
            InitialData::RandomBv { pieces, total_variation, center } => {
                random_walk(*pieces, *total_variation, *center, params.domain_radius, params.seed)
            }
        }
    }
}

fn random_walk(pieces: usize, tv: f64, center: State, r: f64, seed: u64) -> Result<(Vec<f64>, Vec<State>)> {
    if pieces == 0 || !(tv >= 0.0) {
        return Err(Error::Config("random-bv needs pieces >= 1 and total_variation >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps: Vec<(Family, f64)> = (1..pieces)
        .map(|_| {
            let family = if rng.gen_bool(0.5) { Family::One } else { Family::Two };
            (family, rng.gen_range(-0.5..1.0))
        })
        .collect();
    let raw: f64 = steps.iter().map(|(_, s)| s.abs()).sum();
    let scale = if raw > 0.0 { tv / raw } else { 0.0 };
    let mut u = center.to_log()?;
    let mut states = vec![u.to_state()];
    for (family, s) in steps {
        u = apply_wave_curve(family, scale * s, u);
        states.push(u.to_state());
    }
    let width = 2.0 * r / pieces as f64;
    let breaks = (1..pieces).map(|k| -r + width * k as f64).collect();
    Ok((breaks, states))
}

#[derive(Deserialize)]
struct DataRow {
    x_left: f64,
    tau: f64,
    v: f64,
}

fn read_data_file(path: &std::path::Path) -> Result<(Vec<f64>, Vec<State>)> {
    let err = |e| crate::io::csv_error(path, e);
    let mut rdr = csv::Reader::from_path(path).map_err(err)?;
    let (mut breaks, mut states) = (Vec::new(), Vec::new());
    for row in rdr.deserialize::<DataRow>() {
        let row = row.map_err(err)?;
        if !states.is_empty() {
            breaks.push(row.x_left);
        }
        states.push(State { tau: row.tau, v: row.v });
    }
    if states.is_empty() {
        return Err(Error::Parse(format!("{}: no data rows", path.display())));
    }
    Ok((breaks, states))
}

/// The averaged step data on the uniform mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct CellAverages {
    /// Interfaces between cells whose averages differ.
    pub interfaces: Vec<f64>,
    /// One more state than interfaces.
    pub states: Vec<State>,
}

fn check_data(breaks: &[f64], states: &[State], params: &SchemeParams) -> Result<()> {
    if states.len() != breaks.len() + 1 {
        return Err(Error::Config(format!(
            "{} breaks need {} states, got {}",
            breaks.len(),
            breaks.len() + 1,
            states.len()
        )));
    }
    let r = params.domain_radius;
    if breaks.windows(2).any(|p| !(p[0] < p[1])) || breaks.iter().any(|&x| !(x >= -r && x <= r)) {
        return Err(Error::Config("breaks must be increasing and inside [-R, R]".into()));
    }
    let b = params.data_box;
    for s in states {
        if !(s.tau >= params.beta) {
            return Err(Error::Domain(format!("tau = {} below the vacuum floor {}", s.tau, params.beta)));
        }
        if !(s.tau >= b.tau_min && s.tau <= b.tau_max && s.v.abs() <= b.v_max) {
            return Err(Error::Domain(format!("state ({}, {}) outside the data box", s.tau, s.v)));
        }
    }
    Ok(())
}

/// Exact averages of piecewise-constant data on `N = round(2R/delta)` cells
/// covering `[-R, R]`, with equal neighbouring cells merged.
pub fn cell_averages(breaks: &[f64], states: &[State], params: &SchemeParams) -> Result<CellAverages> {
    check_data(breaks, states, params)?;
    let r = params.domain_radius;
    let n = ((2.0 * r / params.delta).round() as usize).max(1);
    let h = 2.0 * r / n as f64;
    let sliver = 1e-12 * h;

    let mut cells = Vec::with_capacity(n + 2);
    cells.push(states[0]);
    let mut piece = 0;
    for j in 0..n {
        let (a, b) = (-r + h * j as f64, -r + h * (j + 1) as f64);
        while piece < breaks.len() && breaks[piece] <= a + sliver {
            piece += 1;
        }
        let (mut tau, mut v) = (0.0, 0.0);
        let mut lo = a;
        let mut k = piece;
        loop {
            let hi = if k < breaks.len() && breaks[k] < b - sliver { breaks[k] } else { b };
            let len = hi - lo;
            tau += len * states[k].tau;
            v += len * states[k].v;
            if hi >= b {
                break;
            }
            lo = hi;
            k += 1;
        }
        let avg = State { tau: tau / h, v: v / h };
        // An unbroken cell keeps its value exactly.
        cells.push(if k == piece { states[piece] } else { avg });
    }
    cells.push(*states.last().expect("at least one state"));

    let mut out = CellAverages { interfaces: vec![], states: vec![cells[0]] };
    for (j, pair) in cells.windows(2).enumerate() {
        if pair[1] != pair[0] {
            out.interfaces.push((-r + h * j as f64).min(r));
            out.states.push(pair[1]);
        }
    }
    Ok(out)
}

/// Label a shock born at `t = 0`: big iff its strength is at least `epsilon`.
pub fn initial_label(family: Family, sigma: f64, epsilon: f64) -> WaveLabel {
    if sigma > 0.0 {
        WaveLabel::shock(family, if sigma >= epsilon { ShockSize::Big } else { ShockSize::Small })
    } else {
        WaveLabel::rarefaction(family)
    }
}

/// Solve every Riemann problem of the averaged data and return the `t = 0+`
/// front list. Fronts are numbered from 0 in left-to-right order.
pub fn approximate_initial_data(
    data: &InitialData,
    params: &SchemeParams,
    policy: &dyn ShockSpeedPolicy,
) -> Result<Snapshot> {
    let (breaks, states) = data.to_piecewise(params)?;
    let cells = cell_averages(&breaks, &states, params)?;
    let logs = cells.states.iter().map(|s| s.to_log()).collect::<Result<Vec<_>>>()?;

    let mut fronts: Vec<Front> = Vec::new();
    let mut current = logs[0];
    for (x, &ur) in cells.interfaces.iter().zip(&logs[1..]) {
        let d = solve_intermediate(current, ur)?;
        let mid = d.middle();
        let waves = [
            OutgoingWave {
                label: initial_label(Family::One, d.sigma1, params.epsilon),
                left_state: current,
                right_state: mid,
            },
            OutgoingWave {
                label: initial_label(Family::Two, d.sigma2, params.epsilon),
                left_state: mid,
                right_state: ur,
            },
        ];
        let emitted = emit_fronts(&waves, current, ur, params.delta, policy, false)?;
        if emitted.is_empty() {
            continue;
        }
        for b in emitted {
            fronts.push(Front {
                id: fronts.len() as u64,
                label: b.label,
                left_state: b.left_state,
                right_state: b.right_state,
                origin: *x,
                speed: b.speed,
                birth_time: 0.0,
            });
        }
        current = ur;
    }
    Ok(Snapshot { time: 0.0, leftmost_state: logs[0], fronts })
}

/// Total variation of `tau` and of `v` of step data.
pub fn step_variation(states: &[State]) -> (f64, f64) {
    states.windows(2).fold((0.0, 0.0), |(a, b), p| (a + (p[1].tau - p[0].tau).abs(), b + (p[1].v - p[0].v).abs()))
}
