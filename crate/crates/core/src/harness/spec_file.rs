//! TOML sweep description.
//!
//! ```toml
//! [sweep]
//! axis = "rho_dB"            # M | rho_dB | T_t | B_bits | tau
//! values = [0, 10, 20, 30]
//! trials = 500
//! seed = 7
//! outputs = ["mc_rate", "deq_rate"]
//! label = "my-run"           # optional
//!
//! [system]
//! M = 10
//! K = 10
//! rho_db = 20.0
//! tau2 = 0.01                # optional, default 0
//!
//! [tdd]                      # optional, needed for T_t
//! T = 100
//! c = 10.0
//!
//! [fdd]                      # optional
//! b = 2.0
//! rvq_end_to_end = false
//! ```
//!
//! Unknown sections or keys are rejected.

use std::path::Path;

use serde::Deserialize;

use super::sweep::{Axis, FddSettings, Output, SweepSpec, TddSettings};
use crate::channel::SystemConfig;
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    sweep: SweepSection,
    system: SystemSection,
    tdd: Option<TddSection>,
    fdd: Option<FddSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axis: Axis,
    values: Vec<f64>,
    trials: usize,
    seed: u64,
    outputs: Vec<Output>,
    label: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "K")]
    k: usize,
    rho_db: f64,
    #[serde(default)]
    tau2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TddSection {
    #[serde(rename = "T")]
    t: usize,
    c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FddSection {
    b: f64,
    #[serde(default)]
    rvq_end_to_end: bool,
}

pub fn parse_spec(text: &str) -> Result<SweepSpec> {
    let f: FileSpec = toml::from_str(text)
        .map_err(|e| Error::Parse { context: "sweep spec".into(), message: e.to_string() })?;
    let spec = SweepSpec {
        axis: f.sweep.axis,
        values: f.sweep.values,
        system: SystemConfig::with_rho_db(f.system.m, f.system.k, f.system.rho_db, f.system.tau2)?,
        tdd: f.tdd.map(|t| TddSettings { coherence: t.t, c: t.c }),
        fdd: f.fdd.map(|d| FddSettings { b: d.b, rvq_end_to_end: d.rvq_end_to_end }),
        trials: f.sweep.trials,
        master_seed: f.sweep.seed,
        outputs: f.sweep.outputs.into_iter().collect(),
        label: f.sweep.label.unwrap_or_else(|| "custom".into()),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_spec(&text)
}
