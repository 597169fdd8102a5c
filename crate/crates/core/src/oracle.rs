//! Brute-force cross-checks that share no code path with the main pipeline.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{mirror_set, phase_matrix_with, scatter};
use crate::config::OpoConfig;
use crate::covariance::{output_covariance, prepare, propagate, rotate_to_sa, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::layout::{Basis, SaBasis, EXTENDED_SLOTS, OPTICAL_SLOTS};
use crate::numerics::{direct_sum, expm, product, ComplexMatrix};
use crate::phonon::{optomech_blocks, thermal_input_covariance};
use crate::sideband::{drift_matrix_sa, gain_matrix_sa, lambda_conjugate, lambda_transform};
use crate::steady_state::CavityLosses;

pub const RK4_MIN_STEPS: usize = 1000;
pub const RK4_TOLERANCE: f64 = 1e-8;
pub const DUAL_BASIS_TOLERANCE: f64 = 1e-10;
pub const FABRY_PEROT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub name: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, max_abs_error: f64, tolerance: f64) -> Self {
        Self { name: name.into(), max_abs_error, tolerance, passed: max_abs_error <= tolerance, detail: None }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.into(),
            max_abs_error: f64::INFINITY,
            tolerance,
            passed: false,
            detail: Some(err.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// RK4 solution of `dA/dξ = M·A`, `A(0) = 1`, at `ξ = 1`.
pub fn rk4_gain(m: &ComplexMatrix, steps: usize) -> Result<ComplexMatrix> {
    if steps < RK4_MIN_STEPS {
        return Err(Error::Validation(format!("rk4 needs at least {RK4_MIN_STEPS} steps, got {steps}")));
    }
    rk4_propagate(m, steps)
}

pub(crate) fn rk4_propagate(m: &ComplexMatrix, steps: usize) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension { op: "rk4", detail: format!("{}x{}", m.rows(), m.cols()) });
    }
    let h = 1.0 / steps as f64;
    let mut a = ComplexMatrix::identity(m.rows());
    for _ in 0..steps {
        let k1 = m * &a;
        let k2 = m * &(&a + &k1.scale_real(h / 2.0));
        let k3 = m * &(&a + &k2.scale_real(h / 2.0));
        let k4 = m * &(&a + &k3.scale_real(h));
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        a = &a + &incr.scale_real(h / 6.0);
    }
    Ok(a)
}

pub fn rk4_check(name: &str, m: &ComplexMatrix, steps: usize) -> OracleReport {
    match (rk4_gain(m, steps), expm(m)) {
        (Ok(a), Ok(b)) => OracleReport::new(name, a.max_abs_diff(&b), RK4_TOLERANCE),
        (Err(e), _) | (_, Err(e)) => OracleReport::failed(name, RK4_TOLERANCE, &e),
    }
}

/// Single-mode cavity reflection `r − t²·r′·e^{−2iφ}/(1 − r·r′·e^{−2iφ})`.
pub fn scalar_fabry_perot(gamma: f64, gamma_prime: f64, phi_oneway: f64) -> Complex64 {
    let r = (-gamma).exp();
    let rp = (-gamma_prime).exp();
    let t2 = 1.0 - r * r;
    let round = Complex64::from_polar(1.0, -2.0 * phi_oneway);
    r - t2 * rp * round / (1.0 - r * rp * round)
}

/// Empty-cavity reflection matrix against the scalar formula, slot by slot.
pub fn fabry_perot_check(cfg: &OpoConfig) -> OracleReport {
    const NAME: &str = "fabry-perot";
    let run = || -> Result<f64> {
        let losses = cfg.losses()?;
        let phase = phase_matrix_with(&cfg.operating_point(), cfg.model.sideband_phases);
        let r = scatter(&mirror_set(&losses), &phase.propagator(), &ComplexMatrix::identity(OPTICAL_SLOTS))?.reflection;
        Ok(fabry_perot_error(&losses, &phase.phi, &r))
    };
    match run() {
        Ok(err) => OracleReport::new(NAME, err, FABRY_PEROT_TOLERANCE),
        Err(e) => OracleReport::failed(NAME, FABRY_PEROT_TOLERANCE, &e),
    }
}

fn fabry_perot_error(losses: &CavityLosses, phi: &[f64], r: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..OPTICAL_SLOTS {
        for j in 0..OPTICAL_SLOTS {
            let expected = if i == j {
                let n = (i % 6) / 2;
                scalar_fabry_perot(losses.gamma[n], losses.gamma_prime[n], phi[i])
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((r[(i, j)] - expected).norm());
        }
    }
    worst
}

/// Covariance computed entirely in the S/A basis: gains from the S and A
/// drifts, mixing only through the rotated propagator `Λ·e^{−iφ}·Λ`.
pub fn sa_basis_covariance(cfg: &OpoConfig) -> Result<CovarianceMatrix> {
    let p = prepare(cfg)?;
    let mf = &p.mean_fields;
    let l = lambda_transform();
    match &p.phonons {
        None => {
            let gain =
                direct_sum(&gain_matrix_sa(SaBasis::Symmetric, mf)?, &gain_matrix_sa(SaBasis::Antisymmetric, mf)?)?;
            let prop = lambda_conjugate(&p.phase.propagator());
            let s = scatter(&p.mirrors, &prop, &gain)?;
            let mut v = propagate(&s, &CovarianceMatrix::identity(2 * OPTICAL_SLOTS, Basis::SymmetricAntisymmetric))?;
            v.basis = Basis::SymmetricAntisymmetric;
            Ok(v)
        }
        Some(pp) => {
            let (j, k) = optomech_blocks(pp, mf);
            let i = Complex64::new(0.0, 1.0);
            let mut drift = ComplexMatrix::zeros(EXTENDED_SLOTS, EXTENDED_SLOTS);
            drift.set_block(0, 0, &drift_matrix_sa(SaBasis::Symmetric, mf));
            drift.set_block(6, 6, &drift_matrix_sa(SaBasis::Antisymmetric, mf));
            drift.set_block(0, OPTICAL_SLOTS, &(&l * &j).scale(i));
            drift.set_block(OPTICAL_SLOTS, 0, &(&k * &l).scale(i));
            let gain = expm(&drift)?;
            let le = direct_sum(&l, &ComplexMatrix::identity(EXTENDED_SLOTS - OPTICAL_SLOTS))?;
            let prop = product(&[&le, &p.phase.extended().propagator(), &le]);
            let s = scatter(&p.mirrors.extended(), &prop, &gain)?;
            let mut v = propagate(&s, &thermal_input_covariance(pp))?.principal_block(0, OPTICAL_SLOTS);
            v.basis = Basis::SymmetricAntisymmetric;
            Ok(v)
        }
    }
}

/// Frequency-basis pipeline rotated at the end versus the S/A-basis pipeline.
pub fn dual_basis_check(cfg: &OpoConfig) -> OracleReport {
    const NAME: &str = "dual-basis";
    let run = || -> Result<f64> {
        let freq = output_covariance(cfg)?;
        let sa = sa_basis_covariance(cfg)?;
        Ok((rotate_to_sa(&freq.matrix) - &sa.matrix).amax())
    };
    match run() {
        Ok(err) => OracleReport::new(NAME, err, DUAL_BASIS_TOLERANCE),
        Err(e) => OracleReport::failed(NAME, DUAL_BASIS_TOLERANCE, &e),
    }
}
