//! The invariant and oracle suite behind `opo-sideband validate`.

use crate::cavity::{loop_matrix, scatter, PhaseMatrix, SidebandPhases};
use crate::config::OpoConfig;
use crate::covariance::{
    apply_detection, csa_is_structural_zero, output_covariance, physicality_report, prepare, to_sa_blocks,
    vs_is_structural_zero, CovarianceMatrix, PHYSICALITY_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::layout::{commutator_defect, Basis, SaBasis, OPTICAL_SLOTS};
use crate::oracle::{dual_basis_check, fabry_perot_check, rk4_check, OracleReport};
use crate::phonon::{extended_drift, extended_gain, extended_scattering};
use crate::sideband::{drift_matrix_full, gain_matrix_full, gain_matrix_sa};
use crate::steady_state::mean_fields_with;

pub const RK4_STEPS: usize = 10_000;
const CONSTRUCTION: f64 = 1e-14;
const ORACLE: f64 = 1e-10;
const STRUCTURAL: f64 = 1e-10;
const PHASE_ORIGIN: f64 = 1e-12;
const THRESHOLD_SINGULARITY: f64 = 1e-6;
const THRESHOLD_SIGMAS: [f64; 4] = [1.0, 1.2, 1.5, 1.75];

#[derive(Clone, Debug)]
pub struct ValidationSummary {
    pub reports: Vec<OracleReport>,
    /// The configured operating point sits on an oscillation boundary.
    pub at_boundary: bool,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &OracleReport> {
        self.reports.iter().filter(|r| !r.passed)
    }
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> OracleReport {
    match f() {
        Ok(err) => OracleReport::new(name, err, tolerance),
        Err(e) => OracleReport::failed(name, tolerance, &e),
    }
}

pub fn validate(cfg: &OpoConfig) -> Result<ValidationSummary> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let mf = prepared.mean_fields;
    let mut reports = Vec::new();

    reports.push(check("mirror-unitarity", CONSTRUCTION, || Ok(prepared.mirrors.unitarity_defect())));

    reports.push(check("gain-commutator", ORACLE, || {
        let mut worst = commutator_defect(&gain_matrix_full(&mf)?);
        for b in [SaBasis::Symmetric, SaBasis::Antisymmetric] {
            worst = worst.max(commutator_defect(&gain_matrix_sa(b, &mf)?));
        }
        if let Some(pp) = &prepared.phonons {
            worst = worst.max(commutator_defect(&extended_gain(&mf, pp)?));
        }
        Ok(worst)
    }));

    let drift = match &prepared.phonons {
        Some(pp) => extended_drift(&mf, pp),
        None => drift_matrix_full(&mf),
    };
    reports.push(rk4_check("rk4-vs-expm", &drift, RK4_STEPS));
    reports.push(fabry_perot_check(cfg));

    reports.push(check("scattering-commutator", ORACLE, || {
        let s = match &prepared.phonons {
            Some(pp) => extended_scattering(&prepared.mirrors, &prepared.phase, &extended_gain(&mf, pp)?)?,
            None => scatter(&prepared.mirrors, &prepared.phase.propagator(), &gain_matrix_full(&mf)?)?,
        };
        Ok(s.commutator_defect())
    }));

    reports.push(check("passive-identity", ORACLE, || {
        let passive = cfg.clone().with_sigma(0.0).with_phonons(false);
        let v = output_covariance(&passive)?;
        Ok(v.max_abs_diff(&CovarianceMatrix::identity(OPTICAL_SLOTS, Basis::FrequencySidebands)))
    }));

    reports.push(dual_basis_check(cfg));

    let output = output_covariance(cfg);
    let at_boundary = matches!(output, Err(Error::OscillationBoundary { .. }));
    reports.push(physicality_check("covariance-physicality", &output));
    if cfg.detection.enabled {
        let detected = output.as_ref().map_err(clone_error).and_then(|v| apply_detection(v, cfg.detection.efficiency));
        reports.push(physicality_check("detection-physicality", &detected));
    }

    reports.push(check("sa-phase-origin", PHASE_ORIGIN, || {
        let mut symmetric = cfg.clone().with_phonons(false);
        symmetric.model.sideband_phases = SidebandPhases::Symmetric;
        Ok(to_sa_blocks(&output_covariance(&symmetric)?)?.c_sa.amax())
    }));

    reports.push(check("threshold-loop", THRESHOLD_SINGULARITY, || {
        let losses = cfg.losses()?;
        let fields = mean_fields_with(1.0, &losses, cfg.model.threshold)?;
        let resonant = PhaseMatrix::zero(OPTICAL_SLOTS).propagator();
        let a = loop_matrix(&prepared.mirrors, &resonant, &gain_matrix_full(&fields)?)?;
        Ok(a.min_singular_value())
    }));

    reports.push(check("threshold-clamp", 0.0, || {
        let losses = cfg.losses()?;
        let pumps: Vec<f64> = THRESHOLD_SIGMAS
            .iter()
            .map(|&s| mean_fields_with(s, &losses, cfg.model.threshold).map(|m| m.chi_alpha0.norm_sqr()))
            .collect::<Result<_>>()?;
        let first_down = mean_fields_with(1.0, &losses, cfg.model.threshold)?;
        let spread = pumps.iter().map(|p| (p - pumps[0]).abs()).fold(0.0, f64::max);
        Ok(spread.max(first_down.chi_alpha1.norm()).max(first_down.chi_alpha2.norm()))
    }));

    let resonant = cfg.cavity.detuning_rad_s.iter().all(|&d| d == 0.0);
    if resonant && !cfg.phonons.enabled {
        let blocks = output.as_ref().map_err(clone_error).and_then(to_sa_blocks);
        reports.push(check("vs-pattern", STRUCTURAL, || {
            let b = blocks.as_ref().map_err(clone_error)?;
            Ok(structural_max(|i, j| vs_is_structural_zero(i, j).then(|| b.v_s[(i, j)])))
        }));
        reports.push(check("csa-pattern", STRUCTURAL, || {
            let b = blocks.as_ref().map_err(clone_error)?;
            let zeros = structural_max(|i, j| csa_is_structural_zero(i, j).then(|| b.c_sa[(i, j)]));
            let mut pairing: f64 = 0.0;
            for n in 0..3 {
                for m in 0..3 {
                    pairing = pairing.max((b.c_sa[(2 * n, 2 * m + 1)] + b.c_sa[(2 * m, 2 * n + 1)]).abs());
                    pairing = pairing.max((b.c_sa[(2 * n + 1, 2 * m)] + b.c_sa[(2 * m + 1, 2 * n)]).abs());
                }
            }
            Ok(zeros.max(pairing))
        }));
        reports.push(check("quarter-turn", STRUCTURAL, || {
            Ok(blocks.as_ref().map_err(clone_error)?.quarter_turn_defect())
        }));
    }

    Ok(ValidationSummary { reports, at_boundary })
}

fn structural_max(entry: impl Fn(usize, usize) -> Option<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            if let Some(x) = entry(i, j) {
                worst = worst.max(x.abs());
            }
        }
    }
    worst
}

fn physicality_check(name: &str, v: &Result<CovarianceMatrix>) -> OracleReport {
    let tolerance = -PHYSICALITY_TOLERANCE;
    match v {
        Ok(v) => check(name, tolerance, || Ok((-physicality_report(v)?.min_eigenvalue).max(0.0))),
        Err(e) => OracleReport::failed(name, tolerance, e),
    }
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::OscillationBoundary { pivot } => Error::OscillationBoundary { pivot: *pivot },
        Error::Unphysical { min_eigenvalue } => Error::Unphysical { min_eigenvalue: *min_eigenvalue },
        other => Error::Validation(other.to_string()),
    }
}

/// Smallest singular value of the cavity loop matrix at the configured point.
pub fn loop_margin(cfg: &OpoConfig) -> Result<f64> {
    let p = prepare(cfg)?;
    let (gain, prop, mirrors) = match &p.phonons {
        Some(pp) => (extended_gain(&p.mean_fields, pp)?, p.phase.extended().propagator(), p.mirrors.extended()),
        None => (gain_matrix_full(&p.mean_fields)?, p.phase.propagator(), p.mirrors.clone()),
    };
    Ok(loop_matrix(&mirrors, &prop, &gain)?.min_singular_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_config_passes() {
        for phonons in [false, true] {
            for detection in [false, true] {
                let cfg = OpoConfig::reference().with_phonons(phonons).with_detection(detection);
                let s = validate(&cfg).unwrap();
                let failed: Vec<_> = s.failures().collect();
                assert!(failed.is_empty(), "phonons {phonons} detection {detection}: {failed:?}");
                assert!(!s.at_boundary);
            }
        }
    }

    #[test]
    fn broken_mirror_is_named() {
        let mut cfg = OpoConfig::reference();
        cfg.fault_injection.mirror_transmission_offset = 0.01;
        let s = validate(&cfg).unwrap();
        assert!(!s.passed());
        assert!(s.failures().any(|r| r.name == "mirror-unitarity"));
    }

    #[test]
    fn closed_form_threshold_misses_the_loop_singularity() {
        let mut cfg = OpoConfig::reference();
        cfg.model.threshold = crate::steady_state::ThresholdModel::ClosedForm;
        let s = validate(&cfg).unwrap();
        let names: Vec<_> = s.failures().map(|r| r.name.as_str()).collect();
        assert_eq!(names, vec!["threshold-loop"]);
    }

    #[test]
    fn sigma_one_is_reported_not_crashed() {
        let s = validate(&OpoConfig::reference().with_sigma(1.0)).unwrap();
        assert!(s.passed(), "{:?}", s.failures().collect::<Vec<_>>());
        let at_zero = OpoConfig::reference().with_sigma(1.0).with_omega_hz(0.0);
        let s = validate(&at_zero).unwrap();
        assert!(s.at_boundary);
        assert!(s.failures().any(|r| r.name == "covariance-physicality"));
        assert!(loop_margin(&at_zero).unwrap() <= 1e-6);
    }
}
