//! Run configuration files and the on-disk formats: `events.ndjson`,
//! `snapshots.csv`, `summary.json`; plus the audit replay and the
//! Eulerian export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{anchor_position, functionals, to_eulerian, weighted_rel_entropy_profiles, BudgetReport};
use crate::engine::{InteractionEvent, RecordedSnapshot, RunRecord, RunStats};
use crate::error::{Error, Result};
use crate::front::{Profile, Snapshot};
use crate::initial::InitialData;
use crate::interactions::{nontrivial_code, q_factor, symbolic_deltas, CaseCode, CaseStates};
use crate::params::{SchemeParams, Tolerances};
use crate::state::LogState;
use crate::weight::{weight_profile, BudgetConstants, WeightState};

pub const EVENTS_FILE: &str = "events.ndjson";
pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Contents of a TOML run file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub params: SchemeParams,
    pub initial: InitialData,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub emit: EmitFlags,
}

/// Which output files a run writes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmitFlags {
    pub events: bool,
    pub snapshots: bool,
    pub summary: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags { events: true, snapshots: true, summary: true }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.params.validate()?;
        if let Some(t) = cfg.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= cfg.params.t_end)) {
            return Err(Error::Config(format!("snapshot time {t} outside [0, {}]", cfg.params.t_end)));
        }
        Ok(cfg)
    }

    /// Read a file; relative data-file and output paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_toml(&fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        if let InitialData::File { path: p } = &mut cfg.initial {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Snapshot times actually written: the requested ones, or `0` and `T`.
    pub fn effective_snapshot_times(&self) -> Vec<f64> {
        if self.snapshot_times.is_empty() {
            vec![0.0, self.params.t_end]
        } else {
            self.snapshot_times.clone()
        }
    }
}

/// Floating point in 17 significant digits; non-finite values as JSON-safe strings.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"NaN\"".into()
    } else if x > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

fn csv_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn event_to_json(e: &InteractionEvent) -> String {
    let ids = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    format!(
        concat!(
            "{{\"index\":{},\"t\":{},\"x\":{},\"case\":\"{}\",\"in_ids\":[{}],\"in_types\":\"{}\",",
            "\"out_ids\":[{}],\"out_rarefactions\":{},\"dS\":{},\"dB\":{},\"dL\":{},\"q_factor\":{},",
            "\"L_after\":{},\"Q_after\":{},\"S_after\":{},\"B_after\":{},",
            "\"w_l\":{},\"w_m\":{},\"w_r\":{},\"w_m_prime\":{}}}"
        ),
        e.index,
        num(e.t),
        num(e.x),
        e.case,
        ids(&e.in_ids),
        e.in_types,
        ids(&e.out_ids),
        e.out_rarefactions,
        num(e.delta_s),
        num(e.delta_b),
        e.delta_l,
        num(e.q_factor),
        e.l_after,
        num(e.q_after),
        num(e.s_after),
        num(e.b_after),
        num(e.w_l),
        num(e.w_m),
        num(e.w_r),
        num(e.w_m_prime),
    )
}

pub fn write_events(path: &Path, events: &[InteractionEvent]) -> Result<()> {
    let mut out = String::with_capacity(events.len() * 400);
    for e in events {
        out.push_str(&event_to_json(e));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_events(path: &Path) -> Result<Vec<InteractionEvent>> {
    let text = fs::read_to_string(path)?;
    parse_events(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_events(text: &str) -> Result<Vec<InteractionEvent>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1))))
        .collect()
}

/// One row per constant region: the first has `x_left = -inf` and no front.
pub fn snapshot_rows(rs: &RecordedSnapshot, params: &SchemeParams, out: &mut String) -> Result<()> {
    let snap = &rs.snapshot;
    let a = weight_profile(&rs.weight, snap, params)?;
    let t = csv_num(snap.time);
    let row = |out: &mut String, x: f64, s: LogState, a: f64, id: String, label: String| {
        let _ = writeln!(
            out,
            "{t},{},{},{},{},{},{id},{label}",
            csv_num(x),
            csv_num(s.w),
            csv_num(s.tau()),
            csv_num(s.v),
            csv_num(a)
        );
    };
    row(out, f64::NEG_INFINITY, snap.leftmost_state, a.values[0], String::new(), String::new());
    for (k, f) in snap.fronts.iter().enumerate() {
        row(out, f.position(snap.time), f.right_state, a.values[k + 1], f.id.to_string(), f.label.letter().to_string());
    }
    Ok(())
}

pub const SNAPSHOT_HEADER: &str = "t,x_left,w,tau,v,a_left,front_id,label";

pub fn write_snapshots(path: &Path, snaps: &[RecordedSnapshot], params: &SchemeParams) -> Result<()> {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for s in snaps {
        snapshot_rows(s, params, &mut out)?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// A snapshot read back from CSV: the state and weight on each region.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSnapshot {
    pub time: f64,
    pub states: Profile<LogState>,
    pub weight: Profile<f64>,
    pub ids: Vec<Option<u64>>,
}

impl CsvSnapshot {
    pub fn joint(&self) -> Profile<(LogState, f64)> {
        Profile {
            breaks: self.states.breaks.clone(),
            values: self.states.values.iter().copied().zip(self.weight.values.iter().copied()).collect(),
        }
    }
}

#[derive(Deserialize)]
struct SnapshotRow {
    t: f64,
    x_left: f64,
    w: f64,
    v: f64,
    a_left: f64,
    front_id: Option<u64>,
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => Error::Parse(format!("{}: line {}: {e}", path.display(), pos.line())),
        None => Error::Parse(format!("{}: {e}", path.display())),
    }
}

pub fn read_snapshots(path: &Path) -> Result<Vec<CsvSnapshot>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.iter().collect::<Vec<_>>().join(",");
    if header != SNAPSHOT_HEADER {
        return Err(Error::Parse(format!("{}: line 1: expected header {SNAPSHOT_HEADER}", path.display())));
    }
    let mut out: Vec<CsvSnapshot> = Vec::new();
    for row in rdr.deserialize::<SnapshotRow>() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let state = LogState::new(row.w, row.v);
        if row.x_left == f64::NEG_INFINITY {
            out.push(CsvSnapshot {
                time: row.t,
                states: Profile { breaks: vec![], values: vec![state] },
                weight: Profile { breaks: vec![], values: vec![row.a_left] },
                ids: vec![None],
            });
            continue;
        }
        let Some(cur) = out.last_mut().filter(|s| s.time == row.t) else {
            return Err(Error::Parse(format!("{}: row at t = {} before its -inf region", path.display(), row.t)));
        };
        cur.states.breaks.push(row.x_left);
        cur.states.values.push(state);
        cur.weight.breaks.push(row.x_left);
        cur.weight.values.push(row.a_left);
        cur.ids.push(row.front_id);
    }
    Ok(out)
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub params: SchemeParams,
    pub policy: String,
    pub initial: InitialData,
    pub snapshot_times: Vec<f64>,
    pub budgets: BudgetConstants,
    pub report: BudgetReport,
    pub s0: f64,
    pub b0: f64,
    pub events: u64,
    pub stats: RunStats,
    pub wall_time_s: f64,
}

impl Summary {
    pub fn new(cfg: &RunConfig, record: &RunRecord, wall_time_s: f64) -> Self {
        let (s0, b0) = functionals(&record.initial.snapshot);
        Summary {
            params: record.params,
            policy: record.policy.clone(),
            initial: cfg.initial.clone(),
            snapshot_times: cfg.effective_snapshot_times(),
            budgets: record.budgets,
            report: record.report.clone(),
            s0,
            b0,
            events: record.stats.events,
            stats: record.stats.clone(),
            wall_time_s,
        }
    }
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Write the three output files of a run into `dir`.
pub fn write_run(dir: &Path, cfg: &RunConfig, record: &RunRecord, wall_time_s: f64) -> Result<()> {
    fs::create_dir_all(dir)?;
    if cfg.emit.events {
        write_events(&dir.join(EVENTS_FILE), &record.events)?;
    }
    if cfg.emit.snapshots {
        write_snapshots(&dir.join(SNAPSHOTS_FILE), &record.snapshots, &record.params)?;
    }
    if cfg.emit.summary {
        let summary = Summary::new(cfg, record, wall_time_s);
        let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(dir.join(SUMMARY_FILE), json)?;
    }
    Ok(())
}

/// Outcome of replaying an event log.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditOutcome {
    pub events: usize,
    pub mismatches: Vec<String>,
    /// Budget report rebuilt from the log, when a summary was available.
    pub budgets: Option<BudgetReport>,
}

impl AuditOutcome {
    pub fn into_result(self) -> Result<Self> {
        if let Some(m) = self.mismatches.first() {
            return Err(Error::Consistency(format!("{} mismatching records; first: {m}", self.mismatches.len())));
        }
        if let Some(r) = &self.budgets {
            if let Some(c) = r.checks.iter().find(|c| !c.pass) {
                return Err(Error::Budget(format!("{}: {} > {}", c.name, c.observed, c.bound)));
            }
        }
        Ok(self)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Replay an event log: recompute every case formula from the logged `w`
/// values, rebuild the functional chains and the running `Q`, and re-derive
/// the budget counters. Without a summary, `S0`/`B0` come from the first
/// record and the subcase thresholds and `q` values are not re-derived.
pub fn audit_events(events: &[InteractionEvent], summary: Option<&Summary>) -> AuditOutcome {
    const TOL: f64 = 1e-12;
    let mut bad = Vec::new();
    let tol = summary.map_or(Tolerances::default(), |s| s.params.tolerances);
    let (mut s, mut b) = match (summary, events.first()) {
        (Some(sm), _) => (sm.s0, sm.b0),
        (None, Some(e)) => (e.s_after - e.delta_s, e.b_after - e.delta_b),
        (None, None) => (0.0, 0.0),
    };
    let mut ws = WeightState::default();
    let mut t_prev = f64::NEG_INFINITY;

    for e in events {
        let mut flag = |m: String| bad.push(format!("event {}: {m}", e.index));
        let states = CaseStates { w_l: e.w_l, w_m: e.w_m, w_r: e.w_r, w_m_prime: e.w_m_prime };
        if e.t < t_prev {
            flag(format!("time {} precedes previous event time {t_prev}", e.t));
        }
        t_prev = e.t;
        let letters: Vec<char> = e.in_types.chars().collect();
        let pair = match letters.as_slice() {
            [x, y] => Some(if x <= y { (*x, *y) } else { (*y, *x) }),
            _ => {
                flag(format!("in_types {:?} is not two letters", e.in_types));
                None
            }
        };
        match e.case {
            CaseCode::Impossible => flag("impossible interaction logged".into()),
            CaseCode::Trivial(x, y) => {
                if pair.is_some_and(|p| p != (x, y)) {
                    flag(format!("case {} does not match incoming {}", e.case, e.in_types));
                }
                if !close(e.w_m_prime, e.w_l + e.w_r - e.w_m, 1e-10) {
                    flag(format!("trivial middle {} differs from w_l + w_r - w_m", e.w_m_prime));
                }
                if e.delta_s != 0.0 || e.delta_b != 0.0 {
                    flag(format!("trivial case with dS = {}, dB = {}", e.delta_s, e.delta_b));
                }
            }
            code => {
                let (ds, db) = symbolic_deltas(code, states);
                if !close(ds, e.delta_s, TOL) {
                    flag(format!("dS = {} but the case formula gives {ds}", e.delta_s));
                }
                if !close(db, e.delta_b, TOL) {
                    flag(format!("dB = {} but the case formula gives {db}", e.delta_b));
                }
                if let (Some(p), Some(sm)) = (pair, summary) {
                    let expect = nontrivial_code(p, e.w_m_prime - e.w_l, e.w_m_prime - e.w_r, sm.params.epsilon);
                    if expect != Some(code) {
                        flag(format!("case {code} but thresholds select {expect:?}"));
                    }
                }
            }
        }
        if e.delta_b > tol.monotone {
            flag(format!("dB = {} is positive", e.delta_b));
        }
        if e.delta_l != e.case.delta_l() {
            flag(format!("dL = {} for case {}", e.delta_l, e.case));
        }
        let expect_q = match summary {
            Some(sm) if !e.case.is_trivial() => Some(q_factor(e.case, states, sm.params.c0).min(1.0)),
            _ if !e.case.has_q_factor() => Some(1.0),
            _ => None,
        };
        if let Some(q) = expect_q {
            if !close(q, e.q_factor, TOL) {
                flag(format!("q_factor = {} but the case formula gives {q}", e.q_factor));
            }
        }
        s += e.delta_s;
        b += e.delta_b;
        if let Err(err) = ws.update(e.delta_l, e.q_factor, &tol) {
            flag(err.to_string());
        }
        if !close(s, e.s_after, TOL) || !close(b, e.b_after, TOL) {
            flag(format!("replayed (S, B) = ({s}, {b}) but logged ({}, {})", e.s_after, e.b_after));
        }
        if ws.l != e.l_after || !close(ws.q, e.q_after, TOL) {
            flag(format!("replayed (L, Q) = ({}, {}) but logged ({}, {})", ws.l, ws.q, e.l_after, e.q_after));
        }
    }

    let budgets = summary.map(|sm| {
        let record_stats = recount(events, &sm.stats);
        crate::analysis::budget_report(&record_stats, &sm.budgets)
    });
    AuditOutcome { events: events.len(), mismatches: bad, budgets }
}

fn recount(events: &[InteractionEvent], base: &RunStats) -> RunStats {
    let mut st = base.clone();
    st.counts.clear();
    st.fan_emitting_2_7 = 0;
    st.fan_emitting_4a_9a = 0;
    st.sum_pos_ds = 0.0;
    st.sum_neg_ds = 0.0;
    st.l_max = 0;
    st.q_min = 1.0;
    for e in events {
        if e.out_rarefactions > 1 {
            match e.case {
                CaseCode::C2 | CaseCode::C7 => st.fan_emitting_2_7 += 1,
                CaseCode::C4A | CaseCode::C9A => st.fan_emitting_4a_9a += 1,
                _ => {}
            }
        }
        *st.counts.entry(e.case.to_string()).or_insert(0) += 1;
        st.sum_pos_ds += e.delta_s.max(0.0);
        st.sum_neg_ds += (-e.delta_s).max(0.0);
        st.l_max = st.l_max.max(e.l_after);
        st.q_min = st.q_min.min(e.q_after);
    }
    st
}

/// Weighted relative entropy between the snapshots of two run directories,
/// paired by time. The first directory supplies the weight and the cone.
pub fn compare_runs(psi_dir: &Path, u_dir: &Path) -> Result<Vec<(f64, f64)>> {
    let summary = read_summary(&psi_dir.join(SUMMARY_FILE))?;
    let psi = read_snapshots(&psi_dir.join(SNAPSHOTS_FILE))?;
    let u = read_snapshots(&u_dir.join(SNAPSHOTS_FILE))?;
    let mut out = Vec::new();
    for p in &psi {
        let Some(q) = u.iter().find(|q| (q.time - p.time).abs() <= 1e-12 * (1.0 + p.time.abs())) else {
            continue;
        };
        let value = weighted_rel_entropy_profiles(&p.joint(), &q.states, p.time, &summary.params)?;
        out.push((p.time, value));
    }
    if out.is_empty() {
        return Err(Error::Contract("the two runs share no snapshot times".into()));
    }
    Ok(out)
}

fn snapshot_from_csv(c: &CsvSnapshot) -> Snapshot {
    use crate::front::{Front, WaveLabel};
    let s = &c.states;
    let fronts = s
        .breaks
        .iter()
        .enumerate()
        .map(|(k, &x)| Front {
            id: c.ids[k + 1].unwrap_or(k as u64),
            label: WaveLabel::RAR_1,
            left_state: s.values[k],
            right_state: s.values[k + 1],
            origin: x,
            speed: 0.0,
            birth_time: c.time,
        })
        .collect();
    Snapshot { time: c.time, leftmost_state: s.values[0], fronts }
}

/// Eulerian CSV (`t,y_left,rho,v`) for every snapshot of a run directory,
/// over the mass window `[xa, xb]`; by default one that contains every
/// front up to the final time.
pub fn convert_run(dir: &Path, window: Option<(f64, f64)>) -> Result<String> {
    let summary = read_summary(&dir.join(SUMMARY_FILE))?;
    let window = window.unwrap_or_else(|| {
        let p = &summary.params;
        let reach = p.domain_radius + summary.budgets.lambda_hat * p.t_end + 1.0;
        (-reach, reach)
    });
    let mut out = String::from("t,y_left,rho,v\n");
    for c in read_snapshots(&dir.join(SNAPSHOTS_FILE))? {
        let snap = snapshot_from_csv(&c);
        let anchor = anchor_position(snap.leftmost_state, window.0, c.time);
        let e = to_eulerian(&snap, window, anchor)?;
        for i in 0..e.rho.len() {
            let _ = writeln!(out, "{},{},{},{}", csv_num(e.time), csv_num(e.y[i]), csv_num(e.rho[i]), csv_num(e.v[i]));
        }
        let _ = writeln!(out, "{},{},,", csv_num(e.time), csv_num(*e.y.last().unwrap()));
    }
    Ok(out)
}
