//! Operating point to intracavity mean fields.
//!
//! Above threshold the pump amplitude is clamped and the downconverted
//! intensities grow as `√σ − 1`; everything is expressed through the
//! normalised input threshold `χ²|α_in|²_th`, so `χ` itself never appears.
//!
//! Two normalisations of the threshold are available (see [`ThresholdModel`]):
//! the closed-form expression derived from first-order round-trip gain, and
//! the exact oscillation point of the exponential-gain cavity loop used by the
//! rest of the model. They agree to first order in the losses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::Mode;
use crate::sideband::MeanFields;

/// Amplitude loss parameters per carrier: `r = e^{−γ}` for the coupling
/// mirror, `r′ = e^{−γ′}` for the spurious-loss (end) mirror.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityLosses {
    pub gamma: [f64; 3],
    pub gamma_prime: [f64; 3],
}

impl CavityLosses {
    pub fn new(gamma: [f64; 3], gamma_prime: [f64; 3]) -> Result<Self> {
        let losses = Self { gamma, gamma_prime };
        losses.validate()?;
        Ok(losses)
    }

    /// From intensity reflectivities, `γ = −ln √R`.
    pub fn from_reflectivities(coupler: [f64; 3], end_mirror: [f64; 3]) -> Result<Self> {
        let conv = |r: f64, field: &str| -> Result<f64> {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config(field, format!("intensity reflectivity {r} outside (0, 1]")));
            }
            Ok(-0.5 * r.ln())
        };
        let mut gamma = [0.0; 3];
        let mut gamma_prime = [0.0; 3];
        for n in 0..3 {
            gamma[n] = conv(coupler[n], "cavity.coupler_reflectivity")?;
            gamma_prime[n] = conv(end_mirror[n], "cavity.end_mirror_reflectivity")?;
        }
        Self::new(gamma, gamma_prime)
    }

    pub fn validate(&self) -> Result<()> {
        for n in 0..3 {
            for (v, name) in [(self.gamma[n], "gamma"), (self.gamma_prime[n], "gamma_prime")] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::config(
                        format!("{name}[{n}]"),
                        format!("loss parameter {v} must be finite and ≥ 0"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Round-trip loss `γᵗ = γ + γ′`.
    pub fn total(&self, mode: Mode) -> f64 {
        let n = mode.index();
        self.gamma[n] + self.gamma_prime[n]
    }

    pub fn r(&self, n: usize) -> f64 {
        (-self.gamma[n]).exp()
    }

    pub fn r_prime(&self, n: usize) -> f64 {
        (-self.gamma_prime[n]).exp()
    }

    /// Finesse `π√ρ / (1 − ρ)` with `ρ = e^{−γᵗ}`.
    pub fn finesse(&self, mode: Mode) -> f64 {
        let rho = (-self.total(mode)).exp();
        std::f64::consts::PI * rho.sqrt() / (1.0 - rho)
    }

    fn check_oscillator(&self) -> Result<()> {
        self.validate()?;
        for m in [Mode::Signal, Mode::Idler] {
            if self.total(m) <= 0.0 {
                return Err(Error::DegenerateCavity(format!("{} mode has zero round-trip loss", m.label())));
            }
        }
        if self.gamma[0] <= 0.0 {
            return Err(Error::DegenerateCavity("pump coupler is a perfect reflector; no pump can enter".into()));
        }
        Ok(())
    }
}

/// Where the cavity is operated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Pump power over threshold power.
    pub sigma: f64,
    /// `Ω/2π` in Hz.
    pub analysis_frequency_hz: f64,
    /// Carrier detunings `Δₙ` in rad/s.
    pub detuning_rad_s: [f64; 3],
    pub fsr_hz: [f64; 3],
}

impl OperatingPoint {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(Error::config("operating_point.sigma", format!("{} must be ≥ 0", self.sigma)));
        }
        for n in 0..3 {
            let fsr = self.fsr_hz[n];
            if !fsr.is_finite() || fsr <= 0.0 {
                return Err(Error::config(format!("cavity.fsr_hz[{n}]"), format!("{fsr} must be > 0")));
            }
            if !self.detuning_rad_s[n].is_finite() {
                return Err(Error::config(format!("cavity.detuning_rad_s[{n}]"), "must be finite"));
            }
            if !self.analysis_frequency_hz.is_finite() || self.analysis_frequency_hz.abs() >= fsr {
                return Err(Error::config(
                    "operating_point.omega_analysis_hz",
                    format!("|{}| must be below the free spectral range {fsr}", self.analysis_frequency_hz),
                ));
            }
        }
        Ok(())
    }
}

/// Normalisation of the oscillation threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdModel {
    /// Closed form `(1−e^{−γᵗ₀})²(e^{γᵗ₁}−1)(e^{γᵗ₂}−1) / 4(1−e^{−2γ₀})`.
    ClosedForm,
    /// Pump at which the exponential-gain loop `R·G·R′·G` reaches unit gain.
    #[default]
    Loop,
}

impl ThresholdModel {
    pub fn strength(self, losses: &CavityLosses) -> Result<f64> {
        match self {
            ThresholdModel::ClosedForm => threshold_strength(losses),
            ThresholdModel::Loop => loop_threshold_strength(losses),
        }
    }
}

/// `χ²|α_in|²_th` from the closed-form threshold expression.
pub fn threshold_strength(losses: &CavityLosses) -> Result<f64> {
    losses.check_oscillator()?;
    let gt0 = losses.total(Mode::Pump);
    let gt1 = losses.total(Mode::Signal);
    let gt2 = losses.total(Mode::Idler);
    let g0 = losses.gamma[0];
    Ok((-(-gt0).exp_m1()).powi(2) * gt1.exp_m1() * gt2.exp_m1() / (4.0 * -(-2.0 * g0).exp_m1()))
}

/// Clamped `χ|α0|` at which the downconverted loop `R·G·R′·G` has a unit eigenvalue.
///
/// For the two-mode squeezer `G = exp(s·[[0,1],[1,0]])` on `(a1, a2†)` the loop
/// determinant condition reduces to
/// `sinh²s = (1 − ρ₁)(1 − ρ₂) / ((r₁ + r₂)(r′₁ + r′₂))` with `ρₙ = rₙ r′ₙ`.
pub fn loop_threshold_pump(losses: &CavityLosses) -> Result<f64> {
    losses.check_oscillator()?;
    let (r1, r2) = (losses.r(1), losses.r(2));
    let (q1, q2) = (losses.r_prime(1), losses.r_prime(2));
    let rho1 = (-losses.total(Mode::Signal)).exp();
    let rho2 = (-losses.total(Mode::Idler)).exp();
    let sinh2 = (1.0 - rho1) * (1.0 - rho2) / ((r1 + r2) * (q1 + q2));
    Ok(sinh2.sqrt().asinh())
}

/// `χ²|α_in|²_th` chosen so the clamped pump equals [`loop_threshold_pump`].
pub fn loop_threshold_strength(losses: &CavityLosses) -> Result<f64> {
    let s = loop_threshold_pump(losses)?;
    Ok(s * s / pump_clamp_factor(losses))
}

/// `(1 − e^{−2γ₀}) / (1 − e^{−γᵗ₀})²`, ratio of clamped intracavity pump to threshold input.
fn pump_clamp_factor(losses: &CavityLosses) -> f64 {
    let gt0 = losses.total(Mode::Pump);
    -(-2.0 * losses.gamma[0]).exp_m1() / (-(-gt0).exp_m1()).powi(2)
}

/// `χ²|α₀|²` above threshold.
pub fn clamped_pump_intensity(losses: &CavityLosses, model: ThresholdModel) -> Result<f64> {
    Ok(pump_clamp_factor(losses) * model.strength(losses)?)
}

/// Mean fields with the closed-form threshold normalisation.
pub fn mean_fields(op: &OperatingPoint, losses: &CavityLosses) -> Result<MeanFields> {
    mean_fields_with(op.sigma, losses, ThresholdModel::ClosedForm)
}

/// Mean fields for pump ratio `sigma`; all phases real and non-negative.
///
/// Below threshold the downconverted fields vanish and the pump intensity is
/// `σ` times its clamped value.
pub fn mean_fields_with(sigma: f64, losses: &CavityLosses, model: ThresholdModel) -> Result<MeanFields> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::config("operating_point.sigma", format!("{sigma} must be ≥ 0")));
    }
    let thr = model.strength(losses)?;
    let factor = pump_clamp_factor(losses);
    if sigma < 1.0 {
        return Ok(MeanFields::real((sigma * factor * thr).sqrt(), 0.0, 0.0));
    }
    let gt0 = losses.total(Mode::Pump);
    let g0 = losses.gamma[0];
    let downconverted = |gtj: f64| {
        (2.0 * gt0).exp() * -(-2.0 * g0).exp_m1() * (sigma.sqrt() - 1.0) / (gt0.exp_m1() * gtj.exp_m1()) * thr
    };
    let a0 = (factor * thr).sqrt();
    let a1 = downconverted(losses.total(Mode::Signal)).sqrt();
    let a2 = downconverted(losses.total(Mode::Idler)).sqrt();
    let mf = MeanFields {
        chi_alpha0: Complex64::new(a0, 0.0),
        chi_alpha1: Complex64::new(a1, 0.0),
        chi_alpha2: Complex64::new(a2, 0.0),
    };
    debug_assert!(mf.is_finite());
    Ok(mf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toy_losses() -> CavityLosses {
        CavityLosses::from_reflectivities([0.70, 0.96, 0.96], [1.0, 0.995, 0.995]).unwrap()
    }

    fn reference_losses() -> CavityLosses {
        CavityLosses::from_reflectivities([0.70, 0.96, 0.96], [0.995, 0.995, 0.995]).unwrap()
    }

    #[test]
    fn threshold_matches_high_precision_evaluation() {
        // 40-digit evaluation of the closed form, computed offline.
        assert_relative_eq!(
            threshold_strength(&toy_losses()).unwrap(),
            1.194_816_632_532_427_1e-5,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            threshold_strength(&reference_losses()).unwrap(),
            1.225_651_846_708_319_3e-5,
            max_relative = 1e-13
        );
        let a0sq = clamped_pump_intensity(&toy_losses(), ThresholdModel::ClosedForm).unwrap();
        assert_relative_eq!(a0sq, 1.343_499_635_420_332e-4, max_relative = 1e-13);
    }

    #[test]
    fn threshold_linear_in_signal_factor() {
        let base = toy_losses();
        let gt1 = base.total(Mode::Signal);
        // choose γ′₁ so that e^{γᵗ₁} − 1 doubles
        let target = (2.0 * gt1.exp_m1()).ln_1p();
        let mut doubled = base;
        doubled.gamma_prime[1] = target - base.gamma[1];
        let ratio = threshold_strength(&doubled).unwrap() / threshold_strength(&base).unwrap();
        assert_relative_eq!(ratio, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn lossless_end_mirror_identity() {
        let l = toy_losses();
        let g0 = l.gamma[0];
        let lhs = 1.0 - (-2.0 * g0).exp();
        let rhs = (1.0 - (-l.total(Mode::Pump)).exp()) * (1.0 + (-g0).exp());
        assert_relative_eq!(lhs, rhs, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_cavities_are_rejected() {
        let l = CavityLosses::new([0.1, 0.0, 0.1], [0.0, 0.0, 0.01]).unwrap();
        assert!(matches!(threshold_strength(&l), Err(Error::DegenerateCavity(_))));
        let l = CavityLosses::new([0.0, 0.1, 0.1], [0.01, 0.0, 0.0]).unwrap();
        assert!(matches!(loop_threshold_pump(&l), Err(Error::DegenerateCavity(_))));
        assert!(CavityLosses::new([-0.1, 0.1, 0.1], [0.0; 3]).is_err());
        assert!(CavityLosses::from_reflectivities([0.0, 0.9, 0.9], [1.0; 3]).is_err());
    }

    #[test]
    fn sigma_one_has_no_downconverted_field() {
        for model in [ThresholdModel::ClosedForm, ThresholdModel::Loop] {
            let mf = mean_fields_with(1.0, &reference_losses(), model).unwrap();
            assert_eq!(mf.chi_alpha1.norm(), 0.0);
            assert_eq!(mf.chi_alpha2.norm(), 0.0);
            assert!(mf.chi_alpha0.re > 0.0);
        }
    }

    #[test]
    fn closed_form_downconverted_intensity() {
        let op =
            OperatingPoint { sigma: 1.5, analysis_frequency_hz: 21e6, detuning_rad_s: [0.0; 3], fsr_hz: [4.3e9; 3] };
        let mf = mean_fields(&op, &reference_losses()).unwrap();
        assert_relative_eq!(mf.chi_alpha1.norm_sqr(), 2.581_923_814_775_057e-4, max_relative = 1e-12);
    }

    #[test]
    fn amplitude_ratio_from_losses() {
        let l = CavityLosses::from_reflectivities([0.70, 0.96, 0.93], [0.995, 0.995, 0.99]).unwrap();
        let mf = mean_fields_with(1.75, &l, ThresholdModel::ClosedForm).unwrap();
        assert!(mf.chi_alpha1.re > 0.0 && mf.chi_alpha2.re > 0.0);
        let want = (l.total(Mode::Idler).exp_m1() / l.total(Mode::Signal).exp_m1()).sqrt();
        assert_relative_eq!(mf.chi_alpha1.re / mf.chi_alpha2.re, want, max_relative = 1e-13);
    }

    #[test]
    fn pump_is_clamped_above_threshold() {
        let l = reference_losses();
        for model in [ThresholdModel::ClosedForm, ThresholdModel::Loop] {
            let a = mean_fields_with(1.2, &l, model).unwrap().chi_alpha0;
            let b = mean_fields_with(1.7, &l, model).unwrap().chi_alpha0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn downconverted_intensity_follows_root_sigma_law() {
        let l = reference_losses();
        let base = mean_fields_with(1.21, &l, ThresholdModel::Loop).unwrap().chi_alpha1.norm_sqr() / 0.1;
        for sigma in [1.05, 1.3, 1.5, 1.75, 2.0] {
            let i = mean_fields_with(sigma, &l, ThresholdModel::Loop).unwrap().chi_alpha1.norm_sqr();
            assert_relative_eq!(i / (sigma.sqrt() - 1.0), base, max_relative = 1e-12);
        }
    }

    #[test]
    fn below_threshold_pump_scales_linearly() {
        let l = reference_losses();
        let clamp = clamped_pump_intensity(&l, ThresholdModel::Loop).unwrap();
        let mf = mean_fields_with(0.25, &l, ThresholdModel::Loop).unwrap();
        assert_relative_eq!(mf.chi_alpha0.norm_sqr(), 0.25 * clamp, max_relative = 1e-14);
        assert_eq!(mf.chi_alpha1.norm(), 0.0);
        assert_eq!(mean_fields_with(0.0, &l, ThresholdModel::Loop).unwrap(), MeanFields::ZERO);
    }

    #[test]
    fn loop_threshold_symmetric_cavity() {
        // equal signal/idler mirrors: s_th = γᵗ/2
        let l = reference_losses();
        assert_relative_eq!(loop_threshold_pump(&l).unwrap(), 0.5 * l.total(Mode::Signal), max_relative = 1e-13);
        assert_relative_eq!(loop_threshold_pump(&l).unwrap(), 0.011_458_634_085_949_854, max_relative = 1e-13);
        // the closed form agrees to first order only
        let closed = clamped_pump_intensity(&l, ThresholdModel::ClosedForm).unwrap().sqrt();
        assert_relative_eq!(closed, 0.011_590_943_168_786_274, max_relative = 1e-13);
    }

    #[test]
    fn finesse_of_reference_cavity() {
        let l = reference_losses();
        assert!((l.finesse(Mode::Signal) - 137.0).abs() < 1.0);
        assert!((l.finesse(Mode::Pump) - 17.4).abs() < 0.2);
    }

    #[test]
    fn operating_point_validation() {
        let mut op =
            OperatingPoint { sigma: 1.5, analysis_frequency_hz: 21e6, detuning_rad_s: [0.0; 3], fsr_hz: [4.3e9; 3] };
        assert!(op.validate().is_ok());
        op.analysis_frequency_hz = 5e9;
        assert!(op.validate().is_err());
        op.analysis_frequency_hz = 21e6;
        op.fsr_hz[2] = 0.0;
        assert!(op.validate().is_err());
    }
}
