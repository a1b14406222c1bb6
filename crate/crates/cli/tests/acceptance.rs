//! Acceptance criteria, one test per criterion. Each sub-check prints a
//! `[PASS]` or `[FAIL]` line; run with `--nocapture` to see them.

use std::path::Path;
use std::process::Command;

use rand::Rng;
use rci_secrecy::channel::db_to_linear;
use rci_secrecy::fdd::{
    feedback_bits, mean_quantization_error, rate_gap, rvq_distortion_bound, scaling_constant,
    BetaRegime, GapMode,
};
use rci_secrecy::harness::ergodic_secrecy_rate_mc;
use rci_secrecy::tdd::{
    cubic_relative_residual, optimal_training_grid, solve_training_cubic, QReference, TddConfig,
};
use rci_secrecy::{
    g_function, optimal_regularizer, secrecy_rate_deq, secrecy_rate_deq_default,
    secrecy_rate_deq_perfect, RngSpec, SystemConfig,
};

struct Criterion {
    id: u32,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32) -> Self {
        Criterion { id, failures: Vec::new() }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl std::fmt::Display) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name} ({detail})", self.id);
        if !pass {
            self.failures.push(format!("{name}: {detail}"));
        }
    }

    fn finish(self) {
        let tag = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {} overall", self.id);
        assert!(self.failures.is_empty(), "criterion {} failed:\n{}", self.id, self.failures.join("\n"));
    }
}

#[test]
fn criterion_1_finite_size_convergence() {
    let mut c = Criterion::new(1);
    let limits = [(8, 0.12), (16, 0.08), (32, 0.05)];
    let mut errs = Vec::new();
    for (m, limit) in limits {
        let cfg = SystemConfig::with_rho_db(m, m, 20.0, 0.01).unwrap();
        let mc = ergodic_secrecy_rate_mc(&cfg, 2000, 1).unwrap();
        let deq = secrecy_rate_deq_default(&cfg).unwrap().rate_per_user;
        let err = (mc.mean / m as f64 - deq).abs() / deq;
        errs.push(err);
        c.check(
            &format!("relative error at M={m} below {limit}"),
            err < limit,
            format!("MC {:.4} vs limit {deq:.4}: {err:.4}", mc.mean / m as f64),
        );
    }
    c.check(
        "relative error strictly decreasing in M",
        errs.windows(2).all(|w| w[1] < w[0]),
        format!("{errs:.4?}"),
    );
    c.finish();
}

#[test]
fn criterion_2_perfect_csit_reduction() {
    let mut c = Criterion::new(2);
    let mut worst: f64 = 0.0;
    for beta in [0.2, 0.4, 0.6, 0.8, 1.0] {
        for rho_db in [0.0, 10.0, 20.0, 30.0] {
            let cfg = SystemConfig::with_rho_db(100, (100.0 * beta) as usize, rho_db, 0.0).unwrap();
            let xi = optimal_regularizer(beta, cfg.rho()).unwrap();
            let a = secrecy_rate_deq(&cfg, xi).unwrap().rate_per_user;
            let b = secrecy_rate_deq_perfect(beta, cfg.rho()).unwrap();
            worst = worst.max((a - b).abs() / b.abs());
        }
    }
    c.check("20-point grid agrees to 1e-12 relative", worst <= 1e-12, format!("max {worst:.2e}"));
    c.finish();
}

#[test]
fn criterion_3_fixed_point_identity() {
    let mut c = Criterion::new(3);
    let mut rng = RngSpec::new(2024, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let beta = 2.0 * (1.0 - rng.random::<f64>());
        let xi = 10.0 * (1.0 - rng.random::<f64>());
        let g = g_function(beta, xi).unwrap();
        worst = worst.max((xi * g + beta * g / (1.0 + g) - 1.0).abs());
    }
    c.check("max residual over 1000 points below 1e-10", worst < 1e-10, format!("{worst:.2e}"));
    c.finish();
}

#[test]
fn criterion_4_overloaded_system_has_zero_rate() {
    let mut c = Criterion::new(4);
    let (m, k) = (16, 20);
    for tau in [0.0, 0.1, 0.3] {
        let cfg = SystemConfig::with_rho_db(m, k, 40.0, tau * tau).unwrap();
        match secrecy_rate_deq_default(&cfg) {
            Ok(p) => c.check(
                &format!("large-system rate per user below 0.05 at tau={tau}"),
                p.rate_per_user < 0.05,
                format!("{:.4} bits (log-ratio {:.3})", p.rate_per_user, p.log_ratio),
            ),
            Err(e) => c.check(&format!("large-system rate per user below 0.05 at tau={tau}"), false, e),
        }
        let mc = ergodic_secrecy_rate_mc(&cfg, 1000, 4).unwrap();
        c.check(
            &format!("Monte Carlo rate per user below 0.1 at tau={tau}"),
            mc.mean / (k as f64) < 0.1,
            format!("{:.5} bits", mc.mean / k as f64),
        );
    }
    c.finish();
}

#[test]
fn criterion_5_feedback_gap() {
    let mut c = Criterion::new(5);
    let cst = scaling_constant(BetaRegime::BetaEqualOne, 2.0).unwrap();
    for (rho_db, tol) in [(30.0, 0.2), (40.0, 0.1)] {
        let rho = db_to_linear(rho_db);
        let gap = rate_gap(1.0, rho, cst / rho, GapMode::Unclamped).unwrap();
        c.check(
            &format!("large-system gap within {tol} of 1 bit at {rho_db} dB"),
            (gap - 1.0).abs() < tol,
            format!("{gap:.4} bits"),
        );
    }
    for rho_db in [30.0, 35.0] {
        let rho = db_to_linear(rho_db);
        let perfect = SystemConfig::new(10, 10, rho, 0.0).unwrap();
        let planned = perfect.with_tau2(cst / rho).unwrap();
        let a = ergodic_secrecy_rate_mc(&perfect, 2000, 5).unwrap().mean / 10.0;
        let b = ergodic_secrecy_rate_mc(&planned, 2000, 5).unwrap().mean / 10.0;
        let gap = a - b;
        c.check(
            &format!("Monte Carlo gap in [0.7, 1.3] at {rho_db} dB"),
            (0.7..=1.3).contains(&gap),
            format!("{gap:.4} bits"),
        );
    }
    c.finish();
}

#[test]
fn criterion_6_rvq_distortion_bound() {
    let mut c = Criterion::new(6);
    for (m, bits) in [(4, 8), (4, 12), (10, 12)] {
        let e = mean_quantization_error(m, bits, 10_000, 6).unwrap();
        let bound = rvq_distortion_bound(m, bits as f64).unwrap();
        c.check(
            &format!("mean quantization error below the bound at M={m}, B={bits}"),
            e < bound,
            format!("{e:.5} vs {bound:.5}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_7_feedback_bits() {
    let mut c = Criterion::new(7);
    let b20 = feedback_bits(10, BetaRegime::BetaBelowOne, 20.0, 2.0).unwrap().approx;
    let b23 = feedback_bits(10, BetaRegime::BetaBelowOne, 23.0, 2.0).unwrap().approx;
    c.check("bits at 20 dB within 0.05 of 66.25", (b20 - 66.25).abs() <= 0.05, format!("{b20:.6}"));
    let slope = b23 - b20;
    c.check("3 dB slope equals M-1", (slope - 9.0).abs() < 1e-12, format!("{slope:.15}"));
    c.finish();
}

#[test]
fn criterion_8_training_length() {
    let mut c = Criterion::new(8);
    for t in [100, 200, 400] {
        let mut diffs = Vec::new();
        let mut fractions = Vec::new();
        for rho_db in [20.0, 30.0, 40.0] {
            let cfg = TddConfig::new(10, 10, db_to_linear(rho_db), 10.0, t).unwrap();
            let root = solve_training_cubic(&cfg).unwrap();
            let res = cubic_relative_residual(&cfg, QReference::Operating, root).unwrap();
            c.check(&format!("cubic residual below 1e-6 at T={t}, {rho_db} dB"), res < 1e-6, format!("{res:.2e}"));
            let sol = optimal_training_grid(&cfg).unwrap();
            let grid = sol.t_opt_grid as f64;
            diffs.push((root - grid).abs() / grid);
            fractions.push(grid / t as f64);
        }
        c.check(
            &format!("cubic within 15% of grid at T={t}, 40 dB"),
            diffs[2] < 0.15,
            format!("{:.4}", diffs[2]),
        );
        c.check(
            &format!("agreement at 40 dB better than at 20 dB for T={t}"),
            diffs[2] < diffs[0],
            format!("{:.4} vs {:.4}", diffs[2], diffs[0]),
        );
        c.check(
            &format!("grid training fraction decreasing in SNR for T={t}"),
            fractions.windows(2).all(|w| w[1] < w[0]),
            format!("{fractions:.3?}"),
        );
    }
    c.finish();
}

fn fig1_csv(dir: &Path, name: &str, threads: Option<usize>) -> Vec<u8> {
    let out = dir.join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rcisec"));
    cmd.args(["sweep", "--recipe", "fig1", "--seed", "7", "--out"]).arg(&out);
    if let Some(n) = threads {
        cmd.args(["--threads", &n.to_string()]);
    }
    let status = cmd.status().expect("run rcisec");
    assert!(status.success(), "rcisec exited with {status}");
    std::fs::read(out).unwrap()
}

#[test]
fn criterion_9_byte_identical_sweeps() {
    let mut c = Criterion::new(9);
    let dir = tempfile::tempdir().unwrap();
    let a = fig1_csv(dir.path(), "a.csv", None);
    let b = fig1_csv(dir.path(), "b.csv", None);
    let d = fig1_csv(dir.path(), "c.csv", Some(3));
    c.check("repeated runs identical", a == b, format!("{} bytes", a.len()));
    c.check("different thread count identical", a == d, format!("{} bytes", d.len()));
    c.finish();
}
