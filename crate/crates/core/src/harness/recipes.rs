//! Canned sweeps reproducing the three standard figures.
//!
//! * `fig1`: R_s/M against M ∈ {8, 12, …, 32} at ρ = 20 dB, τ = 0.1, for
//!   β ∈ {0.5, 1}; Monte Carlo and large-system columns. The M grid and the β
//!   set are this crate's choice.
//! * `fig2`: per-antenna rate against ρ_dB ∈ {0, 5, …, 40} with M = K = 10,
//!   under perfect CSIT and under τ² = C/ρ planned for a 1-bit gap (b = 2).
//! * `fig3`: optimal training fraction T_t/T against ρ_dB ∈ {10, 15, …, 40}
//!   for M = K = 10, c = 10, T ∈ {100, 200, 400}: the integer grid optimum of
//!   the large-system rate and the high-SNR cubic root. No Monte Carlo.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::sweep::{
    run_sweep, Axis, FddSettings, Output, SweepResult, SweepRow, SweepSpec,
};
use crate::channel::{db_to_linear, SystemConfig};
use crate::error::{Error, Result};
use crate::tdd::{optimal_training_grid, TddConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Recipe::Fig1),
            "fig2" => Ok(Recipe::Fig2),
            "fig3" => Ok(Recipe::Fig3),
            other => Err(Error::invalid(format!("unknown recipe '{other}'"))),
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recipe::Fig1 => "fig1",
            Recipe::Fig2 => "fig2",
            Recipe::Fig3 => "fig3",
        })
    }
}

pub const DEFAULT_TRIALS: usize = 2000;

pub const FIG1_BETAS: [f64; 2] = [0.5, 1.0];
pub const FIG3_COHERENCE: [usize; 3] = [100, 200, 400];

pub fn run_recipe(recipe: Recipe, seed: u64, trials: usize) -> Result<SweepResult> {
    match recipe {
        Recipe::Fig1 => fig1(seed, trials),
        Recipe::Fig2 => fig2(seed, trials),
        Recipe::Fig3 => fig3(),
    }
}

pub fn fig1_specs(seed: u64, trials: usize) -> Result<Vec<SweepSpec>> {
    FIG1_BETAS
        .iter()
        .map(|&beta| {
            let m = 8;
            let k = (beta * m as f64).round() as usize;
            Ok(SweepSpec {
                axis: Axis::M,
                values: (8..=32).step_by(4).map(|m| m as f64).collect(),
                system: SystemConfig::with_rho_db(m, k, 20.0, 0.01)?,
                tdd: None,
                fdd: None,
                trials,
                master_seed: seed,
                outputs: [Output::McRate, Output::DeqRate].into_iter().collect(),
                label: format!("beta={beta}"),
            })
        })
        .collect()
}

pub fn fig1(seed: u64, trials: usize) -> Result<SweepResult> {
    run_all(Axis::M, fig1_specs(seed, trials)?)
}

pub fn fig2_specs(seed: u64, trials: usize) -> Result<Vec<SweepSpec>> {
    let values: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    let system = SystemConfig::with_rho_db(10, 10, 0.0, 0.0)?;
    let perfect = SweepSpec {
        axis: Axis::RhoDb,
        values: values.clone(),
        system,
        tdd: None,
        fdd: None,
        trials,
        master_seed: seed,
        outputs: [Output::McRate, Output::DeqRate].into_iter().collect(),
        label: "perfect".into(),
    };
    let planned = SweepSpec {
        fdd: Some(FddSettings { b: 2.0, rvq_end_to_end: false }),
        outputs: [Output::McRate, Output::DeqRate, Output::DeqPerfect, Output::Gap]
            .into_iter()
            .collect(),
        label: "tau2=C/rho,b=2".into(),
        ..perfect.clone()
    };
    Ok(vec![perfect, planned])
}

pub fn fig2(seed: u64, trials: usize) -> Result<SweepResult> {
    run_all(Axis::RhoDb, fig2_specs(seed, trials)?)
}

fn run_all(axis: Axis, specs: Vec<SweepSpec>) -> Result<SweepResult> {
    let mut out = SweepResult::new(axis);
    for spec in &specs {
        out.extend(run_sweep(spec)?);
    }
    Ok(out)
}

pub const FIG3_RHO_DB: [f64; 7] = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];

/// Rows come in pairs per (T, ρ): series `T=<T>/grid` then `T=<T>/cubic`,
/// each with `deq_value` = T_t/T.
pub fn fig3() -> Result<SweepResult> {
    let start = Instant::now();
    let mut out = SweepResult::new(Axis::RhoDb);
    for &t in &FIG3_COHERENCE {
        for &db in &FIG3_RHO_DB {
            let grid_label = format!("series=T={t}/grid");
            let cubic_label = format!("series=T={t}/cubic");
            let sol = TddConfig::new(10, 10, db_to_linear(db), 10.0, t)
                .and_then(|cfg| optimal_training_grid(&cfg));
            match sol {
                Ok(sol) => {
                    let mut g = SweepRow::empty(db, format!("{grid_label};t_opt={}", sol.t_opt_grid));
                    g.deq_value = Some(sol.t_opt_grid as f64 / t as f64);
                    out.rows.push(g);
                    match sol.t_opt_cubic {
                        Some(r) => {
                            let mut c = SweepRow::empty(db, format!("{cubic_label};t_opt={r:.16e}"));
                            c.deq_value = Some(r / t as f64);
                            out.rows.push(c);
                        }
                        None => out.rows.push(SweepRow::empty(
                            db,
                            format!("{cubic_label};error=no cubic root in (K, T)"),
                        )),
                    }
                }
                Err(e) => {
                    let msg = e.to_string().replace(';', ",");
                    out.rows.push(SweepRow::empty(db, format!("{grid_label};error={msg}")));
                    out.rows.push(SweepRow::empty(db, format!("{cubic_label};error={msg}")));
                }
            }
        }
    }
    out.meta.wall_time_s = start.elapsed().as_secs_f64();
    Ok(out)
}
