use std::collections::BTreeMap;
use std::io::Write;

use psflab_core::{DualEvaluation, LPReport, ENGINE_VERSION};
use serde::Serialize;
use serde_json::Value;

/// One configuration's outcome. Field order is the output order.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub identity: String,
    pub params: BTreeMap<String, Value>,
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub abs_discrepancy: f64,
    pub lhs_tail: f64,
    pub rhs_tail: f64,
    pub shells_used: (u64, u64),
    pub chosen_side: String,
    pub passed: bool,
    pub wall_time_ms: Option<f64>,
    pub engine_version: String,
}

pub type Params = BTreeMap<String, Value>;

impl RunReport {
    pub fn from_eval(identity: &str, params: Params, ev: &DualEvaluation) -> Self {
        Self {
            identity: identity.to_string(),
            params,
            lhs: (ev.lhs_value.re, ev.lhs_value.im),
            rhs: (ev.rhs_value.re, ev.rhs_value.im),
            abs_discrepancy: ev.discrepancy,
            lhs_tail: ev.lhs_tail,
            rhs_tail: ev.rhs_tail,
            shells_used: (ev.shells_lhs, ev.shells_rhs),
            chosen_side: ev.chosen_side.to_string(),
            passed: ev.passed,
            wall_time_ms: None,
            engine_version: ENGINE_VERSION.to_string(),
        }
    }

    /// One row per level: the grid sup against the lattice-count bound.
    pub fn from_lp(report: &LPReport, seed: u64) -> Vec<Self> {
        report
            .levels
            .iter()
            .map(|level| {
                let mut params = Params::new();
                params.insert("n".into(), report.dim.into());
                params.insert("j".into(), level.j.into());
                params.insert("points".into(), report.grid_points.into());
                params.insert("seed".into(), seed.into());
                params.insert("ratio".into(), level.ratio.into());
                params.insert("max_ratio".into(), report.max_ratio.into());
                let bound = level.count_bound as f64;
                Self {
                    identity: "lp-report".into(),
                    params,
                    lhs: (level.sup_estimate, 0.0),
                    rhs: (bound, 0.0),
                    abs_discrepancy: (level.sup_estimate - bound).abs(),
                    lhs_tail: 0.0,
                    rhs_tail: 0.0,
                    shells_used: (0, 0),
                    chosen_side: "spatial".into(),
                    passed: level.sup_estimate <= bound * (1.0 + 1e-9) + 1e-9,
                    wall_time_ms: None,
                    engine_version: ENGINE_VERSION.to_string(),
                }
            })
            .collect()
    }
}

const CSV_HEADER: [&str; 15] = [
    "identity",
    "params",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "abs_discrepancy",
    "lhs_tail",
    "rhs_tail",
    "shells_lhs",
    "shells_rhs",
    "chosen_side",
    "passed",
    "wall_time_ms",
    "engine_version",
];

fn params_cell(params: &Params) -> String {
    params
        .iter()
        .map(|(k, v)| match v {
            Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_json<W: Write>(out: W, reports: &[RunReport]) -> std::io::Result<()> {
    let mut out = out;
    for r in reports {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn write_csv<W: Write>(out: W, reports: &[RunReport]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.identity.clone(),
            params_cell(&r.params),
            num(r.lhs.0),
            num(r.lhs.1),
            num(r.rhs.0),
            num(r.rhs.1),
            num(r.abs_discrepancy),
            num(r.lhs_tail),
            num(r.rhs_tail),
            r.shells_used.0.to_string(),
            r.shells_used.1.to_string(),
            r.chosen_side.clone(),
            r.passed.to_string(),
            r.wall_time_ms.map(num).unwrap_or_default(),
            r.engine_version.clone(),
        ])?;
    }
    w.flush()
}
