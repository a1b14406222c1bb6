//! Regularized channel inversion (RCI) precoder and exact finite-size rates.
//!
//! The precoder is built from the CSIT estimate Ĥ only,
//!
//! ```text
//! W = (Ĥᴴ Ĥ + M ξ I)⁻¹ Ĥᴴ / √γ,   γ = ‖(Ĥᴴ Ĥ + M ξ I)⁻¹ Ĥᴴ‖_F²,
//! ```
//!
//! while the SINRs are evaluated on the true channel H. The regularized
//! inverse is never formed; it is applied through a Cholesky solve (LU when
//! the system is indefinite, e.g. ξ < 0).

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::CMatrix;
use crate::error::{Error, Result};

/// Pivot ratio below which an LU factorization is treated as singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-13;

/// Regularizer maximizing the large-system secrecy sum-rate under perfect CSIT.
///
/// The numerator of the closed form is a difference of two O(ρ²) terms when
/// β ≠ 1; in that case it is evaluated through its conjugate,
/// `(a² − c² D) / (a − c √D)`, whose numerator factors as
/// `−12 β ρ (βρ + β + 2ρ)(ρ(1−β)² + β² − 2β)`.
pub fn optimal_regularizer(beta: f64, rho: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid(format!("rho must be positive, got {rho}")));
    }
    let a = -2.0 * rho * rho * (1.0 - beta).powi(2) + 6.0 * rho * beta + 2.0 * beta * beta;
    let c = -2.0 * (beta * (rho + 1.0) - rho);
    let d = beta * beta * (rho * rho + rho + 1.0) - beta * (2.0 * rho * (rho - 1.0)) + rho * rho;
    let cs = c * d.sqrt();
    let num = if a * cs < 0.0 {
        let p = -12.0
            * beta
            * rho
            * (beta * rho + beta + 2.0 * rho)
            * (rho * (1.0 - beta).powi(2) + beta * beta - 2.0 * beta);
        p / (a - cs)
    } else {
        a + cs
    };
    let den = 6.0 * rho * rho * (beta + 2.0) + 6.0 * rho * beta;
    let xi = num / den;
    if !xi.is_finite() {
        return Err(Error::domain(format!("regularizer not finite at beta={beta}, rho={rho}")));
    }
    Ok(xi)
}

/// Which linear system is factorized to apply the regularized inverse.
///
/// `(ĤᴴĤ + MξI)⁻¹Ĥᴴ = Ĥᴴ(ĤĤᴴ + MξI)⁻¹`; the first is M x M, the second K x K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemForm {
    /// Smaller of the two.
    Auto,
    /// M x M: (ĤᴴĤ + MξI) Z = Ĥᴴ.
    Gram,
    /// K x K: Z = Ĥᴴ (ĤĤᴴ + MξI)⁻¹.
    Outer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    /// M x K, column k is ŵ_k.
    pub w: CMatrix,
    pub gamma: f64,
    pub xi: f64,
}

impl Precoder {
    pub fn antennas(&self) -> usize {
        self.w.nrows()
    }

    pub fn users(&self) -> usize {
        self.w.ncols()
    }

    /// tr(WᴴW), which is 1 by construction.
    pub fn total_power(&self) -> f64 {
        self.w.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn build_rci(hhat: &CMatrix, xi: f64) -> Result<Precoder> {
    build_rci_with(hhat, xi, SystemForm::Auto)
}

pub fn build_rci_with(hhat: &CMatrix, xi: f64, form: SystemForm) -> Result<Precoder> {
    if !xi.is_finite() {
        return Err(Error::invalid(format!("xi must be finite, got {xi}")));
    }
    let (k, m) = hhat.shape();
    if k == 0 || m == 0 {
        return Err(Error::DimensionMismatch(format!("empty channel estimate {k}x{m}")));
    }
    if hhat.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return Err(Error::DegenerateEstimate);
    }
    let form = match form {
        SystemForm::Auto if k <= m => SystemForm::Outer,
        SystemForm::Auto => SystemForm::Gram,
        f => f,
    };
    let ridge = Complex64::new(m as f64 * xi, 0.0);
    let hhat_h = hhat.adjoint();
    let z = match form {
        SystemForm::Gram => {
            let a = &hhat_h * hhat + DMatrix::from_diagonal_element(m, m, ridge);
            hermitian_solve(a, hhat_h, xi)?
        }
        SystemForm::Outer => {
            let b = hhat * &hhat_h + DMatrix::from_diagonal_element(k, k, ridge);
            // Ĥᴴ B⁻¹ = (B⁻¹ Ĥ)ᴴ since B is Hermitian.
            hermitian_solve(b, hhat.clone(), xi)?.adjoint()
        }
        SystemForm::Auto => unreachable!(),
    };
    let gamma: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::SingularSystem { xi });
    }
    let w = z.unscale(gamma.sqrt());
    Ok(Precoder { w, gamma, xi })
}

/// Solves `a x = rhs` for Hermitian `a`.
fn hermitian_solve(a: CMatrix, rhs: CMatrix, xi: f64) -> Result<CMatrix> {
    if let Some(chol) = Cholesky::new(a.clone()) {
        let d = chol.l_dirty().diagonal().map(|p| p.norm_sqr());
        if d.min() / d.max() >= SINGULAR_PIVOT_RATIO {
            return Ok(chol.solve(&rhs));
        }
    }
    let lu = a.lu();
    let u = lu.u();
    let pivots = u.diagonal();
    let max = pivots.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let min = pivots.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    if max == 0.0 || min / max < SINGULAR_PIVOT_RATIO {
        return Err(Error::SingularSystem { xi });
    }
    lu.solve(&rhs).ok_or(Error::SingularSystem { xi })
}

fn check_dims(h: &CMatrix, prec: &Precoder) -> Result<()> {
    if h.ncols() != prec.antennas() || h.nrows() != prec.users() {
        return Err(Error::DimensionMismatch(format!(
            "channel is {}x{}, precoder serves {} users on {} antennas",
            h.nrows(),
            h.ncols(),
            prec.users(),
            prec.antennas()
        )));
    }
    Ok(())
}

fn check_user(k: usize, users: usize) -> Result<()> {
    if k >= users {
        return Err(Error::IndexOutOfRange { index: k, users });
    }
    Ok(())
}

/// SINR of user `k` (0-based) for its own message:
/// ρ|h_kᴴŵ_k|² / (1 + ρ Σ_{j≠k} |h_kᴴŵ_j|²).
pub fn sinr_intended(h: &CMatrix, prec: &Precoder, rho: f64, k: usize) -> Result<f64> {
    check_dims(h, prec)?;
    check_user(k, prec.users())?;
    let gains = h.row(k) * &prec.w;
    let signal = gains[k].norm_sqr();
    let interference: f64 =
        gains.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g.norm_sqr()).sum();
    Ok(rho * signal / (1.0 + rho * interference))
}

/// SINR of the eavesdropper alliance (all users but `k`) for message `k`:
/// ρ‖H_k ŵ_k‖².
pub fn sinr_eavesdropper(h: &CMatrix, prec: &Precoder, rho: f64, k: usize) -> Result<f64> {
    check_dims(h, prec)?;
    check_user(k, prec.users())?;
    let leak = h * prec.w.column(k);
    let power: f64 =
        leak.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g.norm_sqr()).sum();
    Ok(rho * power)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub sinr_intended: Vec<f64>,
    pub sinr_eve: Vec<f64>,
    /// Bits/s/Hz, each user's difference clamped at zero before summing.
    pub secrecy_sum_rate: f64,
}

impl RatePoint {
    pub fn from_sinrs(sinr_intended: Vec<f64>, sinr_eve: Vec<f64>) -> Self {
        let secrecy_sum_rate = sinr_intended
            .iter()
            .zip(&sinr_eve)
            .map(|(&s, &e)| per_user_secrecy_rate(s, e))
            .sum();
        RatePoint { sinr_intended, sinr_eve, secrecy_sum_rate }
    }
}

/// [log₂(1 + s) − log₂(1 + e)]⁺
pub fn per_user_secrecy_rate(sinr: f64, sinr_eve: f64) -> f64 {
    ((1.0 + sinr).log2() - (1.0 + sinr_eve).log2()).max(0.0)
}

/// Exact secrecy sum-rate of one channel realization.
///
/// Forms the K x K effective gain matrix G = H W once; row k gives user k's
/// signal and interference, column k gives the leakage of message k.
pub fn secrecy_sum_rate(h: &CMatrix, prec: &Precoder, rho: f64) -> Result<RatePoint> {
    check_dims(h, prec)?;
    let g = h * &prec.w;
    let k = g.nrows();
    let power = g.map(|z| z.norm_sqr());
    let mut sinr = Vec::with_capacity(k);
    let mut eve = Vec::with_capacity(k);
    for u in 0..k {
        let signal = power[(u, u)];
        let row: f64 = power.row(u).sum();
        let col: f64 = power.column(u).sum();
        sinr.push(rho * signal / (1.0 + rho * (row - signal)));
        eve.push(rho * (col - signal));
    }
    Ok(RatePoint::from_sinrs(sinr, eve))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, sample_csit_pair, RngSpec, SystemConfig};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    // Frozen from a 40-digit evaluation of the closed form.
    #[test]
    fn regularizer_reference_values() {
        let cases = [
            (1.0, 1.0, 0.16666666666666667),
            (1.0, 100.0, 0.0031412031940985883),
            (0.5, 10.0, 0.023396683512091689),
            (1.0, 10.0, 0.027346489932440837),
            (0.8, 1000.0, 0.00039765726786704234),
            (1.25, 1e4, -0.01280557307328296),
            (2.0, 1e4, -0.16665833208439523),
            (0.5, 1e8, 2.4999999812500003e-9),
            (0.8, 1e6, 3.9999760005919802e-7),
            (0.2, 3.0, 0.03186817301005861),
            (1.5, 50.0, -0.044880451487386465),
            (1.0, 1e12, 3.333331408832436e-13),
        ];
        for (b, r, want) in cases {
            let got = optimal_regularizer(b, r).unwrap();
            assert!(rel(got, want) < 1e-11, "xi({b},{r}) = {got}, want {want}");
        }
        // high-SNR asymptote at beta = 1
        assert!(rel(optimal_regularizer(1.0, 100.0).unwrap(), 1.0 / 300.0) < 0.06);
    }

    #[test]
    fn regularizer_rejects_zero_snr() {
        assert!(optimal_regularizer(1.0, 0.0).is_err());
        assert!(optimal_regularizer(0.0, 1.0).is_err());
    }

    #[test]
    fn scalar_case_is_phase_alignment() {
        let h = DMatrix::from_element(1, 1, Complex64::new(0.6, -1.3));
        for xi in [1e-3, 0.5, 7.0] {
            let p = build_rci(&h, xi).unwrap();
            let w = p.w[(0, 0)];
            let want = h[(0, 0)].conj() / h[(0, 0)].norm();
            assert!((w - want).norm() < 1e-14);
            assert!((p.total_power() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_forcing_limit_diagonalizes() {
        let cfg = SystemConfig::new(6, 4, 1.0, 0.0).unwrap();
        let h = sample_channel(&cfg, RngSpec::new(4, 0));
        let p = build_rci(&h, 0.0).unwrap();
        let g = &h * &p.w;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(g[(i, j)].norm() < 1e-8, "G[{i},{j}] = {}", g[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn normalization_holds() {
        let cfg = SystemConfig::new(8, 6, 1.0, 0.0).unwrap();
        for s in 0..20 {
            let h = sample_channel(&cfg, RngSpec::new(6, s));
            let p = build_rci(&h, 0.1).unwrap();
            assert!((p.total_power() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn both_system_forms_agree() {
        for (m, k) in [(8, 6), (6, 8), (5, 5)] {
            let cfg = SystemConfig::new(m, k, 1.0, 0.0).unwrap();
            let h = sample_channel(&cfg, RngSpec::new(10, (m * k) as u64));
            for xi in [0.05, 1.3] {
                let a = build_rci_with(&h, xi, SystemForm::Gram).unwrap();
                let b = build_rci_with(&h, xi, SystemForm::Outer).unwrap();
                assert!(rel(a.gamma, b.gamma) < 1e-10);
                let diff = (&a.w - &b.w).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(diff < 1e-10, "{m}x{k} xi={xi}: {diff}");
            }
        }
    }

    #[test]
    fn degenerate_and_singular_inputs() {
        let zero = CMatrix::zeros(3, 4);
        assert!(matches!(build_rci(&zero, 0.1), Err(Error::DegenerateEstimate)));

        // Two identical users with no regularization.
        let cfg = SystemConfig::new(4, 1, 1.0, 0.0).unwrap();
        let row = sample_channel(&cfg, RngSpec::new(1, 2));
        let h = DMatrix::from_fn(2, 4, |_, j| row[(0, j)]);
        assert!(matches!(build_rci(&h, 0.0), Err(Error::SingularSystem { .. })));
        assert!(build_rci(&h, 0.01).is_ok());
    }

    #[test]
    fn negative_regularizer_is_accepted_when_invertible() {
        let cfg = SystemConfig::new(8, 16, 1.0, 0.0).unwrap();
        let h = sample_channel(&cfg, RngSpec::new(3, 3));
        let p = build_rci(&h, -0.01).unwrap();
        assert!((p.total_power() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_user_rates() {
        let cfg = SystemConfig::new(3, 1, 5.0, 0.2).unwrap();
        let pair = sample_csit_pair(&cfg, RngSpec::new(2, 1)).unwrap();
        let p = build_rci(&pair.hhat, 0.3).unwrap();
        let g = (pair.h.row(0) * p.w.column(0))[(0, 0)].norm_sqr();
        let s = sinr_intended(&pair.h, &p, 5.0, 0).unwrap();
        assert!(rel(s, 5.0 * g) < 1e-14);
        assert_eq!(sinr_eavesdropper(&pair.h, &p, 5.0, 0).unwrap(), 0.0);
        let r = secrecy_sum_rate(&pair.h, &p, 5.0).unwrap();
        assert!(rel(r.secrecy_sum_rate, (1.0 + s).log2()) < 1e-14);
    }

    #[test]
    fn zero_forcing_with_perfect_csit_has_no_interference() {
        let cfg = SystemConfig::new(6, 6, 10.0, 0.0).unwrap();
        let pair = sample_csit_pair(&cfg, RngSpec::new(12, 0)).unwrap();
        let p = build_rci(&pair.hhat, 1e-8).unwrap();
        let g = &pair.h * &p.w;
        for k in 0..6 {
            let intf: f64 = (0..6).filter(|&j| j != k).map(|j| g[(k, j)].norm_sqr()).sum();
            assert!(intf < 1e-6, "interference {intf}");
            let s = sinr_intended(&pair.h, &p, 10.0, k).unwrap();
            assert!(rel(s, 10.0 * g[(k, k)].norm_sqr()) < 1e-6);
        }
    }

    // Independent termwise expansion of the SINR expressions.
    fn termwise(h: &CMatrix, w: &CMatrix, rho: f64, k: usize) -> (f64, f64) {
        let (users, m) = h.shape();
        let inner = |r: usize, c: usize| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..m {
                acc += h[(r, a)] * w[(a, c)];
            }
            acc.norm_sqr()
        };
        let mut intf = 0.0;
        let mut leak = 0.0;
        for j in 0..users {
            if j != k {
                intf += inner(k, j);
                leak += inner(j, k);
            }
        }
        (rho * inner(k, k) / (1.0 + rho * intf), rho * leak)
    }

    #[test]
    fn sinrs_match_termwise_oracle() {
        let cfg = SystemConfig::new(4, 4, 10.0, 0.01).unwrap();
        for s in 0..10 {
            let pair = sample_csit_pair(&cfg, RngSpec::new(77, s)).unwrap();
            let xi = optimal_regularizer(cfg.beta(), cfg.rho()).unwrap();
            let p = build_rci(&pair.hhat, xi).unwrap();
            let rp = secrecy_sum_rate(&pair.h, &p, 10.0).unwrap();
            for k in 0..4 {
                let (si, se) = termwise(&pair.h, &p.w, 10.0, k);
                let a = sinr_intended(&pair.h, &p, 10.0, k).unwrap();
                let b = sinr_eavesdropper(&pair.h, &p, 10.0, k).unwrap();
                assert!(rel(a, si) < 1e-12 && rel(rp.sinr_intended[k], si) < 1e-12);
                assert!(rel(b, se) < 1e-12 && rel(rp.sinr_eve[k], se) < 1e-12);
            }
        }
    }

    #[test]
    fn index_and_dimension_errors() {
        let cfg = SystemConfig::new(4, 3, 1.0, 0.0).unwrap();
        let h = sample_channel(&cfg, RngSpec::new(0, 0));
        let p = build_rci(&h, 0.1).unwrap();
        assert!(matches!(sinr_intended(&h, &p, 1.0, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(sinr_eavesdropper(&h, &p, 1.0, 9), Err(Error::IndexOutOfRange { .. })));
        let other = CMatrix::zeros(2, 4);
        assert!(matches!(secrecy_sum_rate(&other, &p, 1.0), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn orthogonal_leakage_is_zero() {
        // user 0 sees only antenna 0, user 1 only antenna 1
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = Complex64::new(1.0, 0.5);
        h[(1, 1)] = Complex64::new(-0.3, 2.0);
        let p = build_rci(&h, 0.2).unwrap();
        assert!(sinr_eavesdropper(&h, &p, 10.0, 0).unwrap() < 1e-30);
        assert!(sinr_eavesdropper(&h, &p, 10.0, 1).unwrap() < 1e-30);
    }

    #[test]
    fn clamp_zeroes_losing_users() {
        let rp = RatePoint::from_sinrs(vec![1.0, 3.0], vec![2.0, 3.0]);
        assert_eq!(rp.secrecy_sum_rate, 0.0);
        let rp = RatePoint::from_sinrs(vec![3.0, 1.0], vec![1.0, 5.0]);
        assert!((rp.secrecy_sum_rate - 1.0).abs() < 1e-15);
    }
}
