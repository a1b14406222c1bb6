//! Browser bindings. Every export returns a flat `Float64Array`; the page
//! slices it into records of fixed width. Points where a closed form is
//! undefined come back as NaN.

use rci_secrecy::channel::db_to_linear;
use rci_secrecy::fdd::{rate_gap, FddPlan, GapMode};
use rci_secrecy::tdd::{optimal_training_grid, training_curve, TddConfig};
use rci_secrecy::{secrecy_rate_deq_default, secrecy_rate_deq_perfect, SystemConfig};
use wasm_bindgen::prelude::*;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Records of `[rho_db, rate_per_antenna, rate_per_antenna_perfect]`.
pub fn rate_curve_impl(m: usize, k: usize, tau2: f64, db_lo: f64, db_hi: f64, n: usize) -> Result<Vec<f64>, String> {
    SystemConfig::new(m, k, 1.0, tau2).map_err(|e| e.to_string())?;
    let scale = k as f64 / m as f64;
    let mut out = Vec::with_capacity(3 * n);
    for db in grid(db_lo, db_hi, n) {
        let cfg = SystemConfig::with_rho_db(m, k, db, tau2).map_err(|e| e.to_string())?;
        let rate = secrecy_rate_deq_default(&cfg).map_or(f64::NAN, |p| p.rate_per_user * scale);
        let perfect = secrecy_rate_deq_perfect(cfg.beta(), cfg.rho()).map_or(f64::NAN, |r| r * scale);
        out.extend([db, rate, perfect]);
    }
    Ok(out)
}

/// Records of `[rho_db, gap_bits, feedback_bits]` with τ² = C/ρ.
pub fn fdd_curve_impl(m: usize, k: usize, b: f64, db_lo: f64, db_hi: f64, n: usize) -> Result<Vec<f64>, String> {
    let beta = k as f64 / m as f64;
    let mut out = Vec::with_capacity(3 * n);
    for db in grid(db_lo, db_hi, n) {
        let plan = FddPlan::new(m, beta, db, b).map_err(|e| e.to_string())?;
        let rho = db_to_linear(db);
        let gap = rate_gap(beta, rho, plan.tau2(rho), GapMode::Unclamped).unwrap_or(f64::NAN);
        out.extend([db, gap, plan.bits.approx]);
    }
    Ok(out)
}

/// `[t_opt_grid, rate_at_opt, t_opt_cubic, T_t, rate, T_t, rate, ...]`.
pub fn tdd_curve_impl(m: usize, k: usize, rho_db: f64, c: f64, coherence: usize) -> Result<Vec<f64>, String> {
    let cfg = TddConfig::new(m, k, db_to_linear(rho_db), c, coherence).map_err(|e| e.to_string())?;
    let sol = optimal_training_grid(&cfg).map_err(|e| e.to_string())?;
    let curve = training_curve(&cfg).map_err(|e| e.to_string())?;
    let mut out = vec![sol.t_opt_grid as f64, sol.rate_at_grid_opt, sol.t_opt_cubic.unwrap_or(f64::NAN)];
    for (tt, r) in curve {
        out.extend([tt as f64, r]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn rate_curve(m: usize, k: usize, tau2: f64, db_lo: f64, db_hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    rate_curve_impl(m, k, tau2, db_lo, db_hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fdd_curve(m: usize, k: usize, b: f64, db_lo: f64, db_hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    fdd_curve_impl(m, k, b, db_lo, db_hi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tdd_curve(m: usize, k: usize, rho_db: f64, c: f64, coherence: usize) -> Result<Vec<f64>, JsError> {
    tdd_curve_impl(m, k, rho_db, c, coherence).map_err(|e| JsError::new(&e))
}
