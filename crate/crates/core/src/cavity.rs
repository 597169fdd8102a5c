//! Open linear cavity around the crystal.
//!
//! The coupling mirror `(R, T)` connects the input/reflected ports to the
//! intracavity field, the end mirror `(R′, T′)` connects it to the vacuum
//! modes of the spurious losses. Per half round trip the field picks up the
//! one-way phase and one crystal pass, `C = e^{−iφ}G·B`, `B′ = e^{−iφ}G·C′`.
//! Eliminating the internal fields gives
//!
//! ```text
//! D   = (1 − R·P·R′·P)⁻¹,            P = e^{−iφ}·G
//! R_χ = R − T·P·R′·P·D·T
//! T′_χ = T·P·(1 + R′·P·D·R·P)·T′
//! ```
//!
//! and the reflected output `A_R = R_χ·A_in + T′_χ·A_ν`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{EXTENDED_SLOTS, OPTICAL_SLOTS, PHONON_SLOTS};
use crate::numerics::{condition_number, direct_sum, product, ComplexMatrix, Lu};
use crate::steady_state::{CavityLosses, OperatingPoint};

/// Diagonal mirror matrices, entries repeated over `(a, a†)` and both sidebands.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorSet {
    pub r: ComplexMatrix,
    pub t: ComplexMatrix,
    pub r_prime: ComplexMatrix,
    pub t_prime: ComplexMatrix,
}

fn per_slot(values: [f64; 3]) -> Vec<f64> {
    (0..OPTICAL_SLOTS).map(|s| values[(s % 6) / 2]).collect()
}

/// Builds the coupling and end mirror matrices from the loss parameters.
pub fn mirror_set(losses: &CavityLosses) -> MirrorSet {
    let r: [f64; 3] = std::array::from_fn(|n| losses.r(n));
    let rp: [f64; 3] = std::array::from_fn(|n| losses.r_prime(n));
    let t = r.map(|x| (1.0 - x * x).sqrt());
    let tp = rp.map(|x| (1.0 - x * x).sqrt());
    MirrorSet {
        r: ComplexMatrix::from_real_diagonal(&per_slot(r)),
        t: ComplexMatrix::from_real_diagonal(&per_slot(t)),
        r_prime: ComplexMatrix::from_real_diagonal(&per_slot(rp)),
        t_prime: ComplexMatrix::from_real_diagonal(&per_slot(tp)),
    }
}

impl MirrorSet {
    pub fn dim(&self) -> usize {
        self.r.rows()
    }

    /// Largest `|r² + t² − 1|` over the optical slots of both mirrors.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..OPTICAL_SLOTS.min(self.dim()) {
            let a = self.r[(s, s)].norm_sqr() + self.t[(s, s)].norm_sqr() - 1.0;
            let b = self.r_prime[(s, s)].norm_sqr() + self.t_prime[(s, s)].norm_sqr() - 1.0;
            worst = worst.max(a.abs()).max(b.abs());
        }
        worst
    }

    /// Adds `offset` to every coupling-mirror transmission. Used only to
    /// build negative controls for the validation suite.
    pub fn with_transmission_offset(mut self, offset: f64) -> Self {
        for s in 0..self.dim() {
            self.t[(s, s)] += Complex64::new(offset, 0.0);
        }
        self
    }

    /// Mirrors seen by the phonon slots: no reflection, unit transmission.
    pub fn extended(&self) -> Self {
        let zero = ComplexMatrix::zeros(PHONON_SLOTS, PHONON_SLOTS);
        let one = ComplexMatrix::identity(PHONON_SLOTS);
        let lift = |m: &ComplexMatrix, b: &ComplexMatrix| direct_sum(m, b).expect("square");
        MirrorSet {
            r: lift(&self.r, &zero),
            t: lift(&self.t, &one),
            r_prime: lift(&self.r_prime, &zero),
            t_prime: lift(&self.t_prime, &one),
        }
    }
}

/// How the lower-sideband phase is derived from the upper one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SidebandPhases {
    /// `φ(−Ω)` evaluated at `−Ω` (the physical case).
    #[default]
    Opposite,
    /// Forces `φ(−Ω) = φ(+Ω)`, which removes all S/A mixing.
    Symmetric,
}

/// One-way propagation phases per slot.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatrix {
    pub phi: Vec<f64>,
}

/// One-way phase `(Δₙ ± Ω)/(2·FSRₙ)` with `Ω` in rad/s and the FSR in Hz;
/// creation slots carry the opposite sign. Multiples of the carrier resonance
/// are dropped, only the detuning and sideband offset remain.
pub fn phase_matrix(op: &OperatingPoint) -> PhaseMatrix {
    phase_matrix_with(op, SidebandPhases::Opposite)
}

pub fn phase_matrix_with(op: &OperatingPoint, phases: SidebandPhases) -> PhaseMatrix {
    let omega = 2.0 * PI * op.analysis_frequency_hz;
    let one_way = |n: usize, shift: f64| (op.detuning_rad_s[n] + shift) / (2.0 * op.fsr_hz[n]);
    let lower_shift = match phases {
        SidebandPhases::Opposite => -omega,
        SidebandPhases::Symmetric => omega,
    };
    let phi = (0..OPTICAL_SLOTS)
        .map(|s| {
            let n = (s % 6) / 2;
            let value = if s < 6 { one_way(n, omega) } else { one_way(n, lower_shift) };
            if s % 2 == 0 {
                value
            } else {
                -value
            }
        })
        .collect();
    PhaseMatrix { phi }
}

impl PhaseMatrix {
    pub fn zero(dim: usize) -> Self {
        Self { phi: vec![0.0; dim] }
    }

    pub fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.phi)
    }

    /// `e^{−iφ}`.
    pub fn propagator(&self) -> ComplexMatrix {
        let d: Vec<Complex64> = self.phi.iter().map(|&p| Complex64::from_polar(1.0, -p)).collect();
        ComplexMatrix::from_diagonal(&d)
    }

    /// `Ψ = φ ⊕ 0` for the extended layout.
    pub fn extended(&self) -> Self {
        let mut phi = self.phi.clone();
        phi.resize(EXTENDED_SLOTS, 0.0);
        Self { phi }
    }
}

/// Output maps of the cavity.
#[derive(Clone, Debug)]
pub struct Scattering {
    /// `R_χ`, input port to reflected port.
    pub reflection: ComplexMatrix,
    /// `T′_χ`, loss port to reflected port.
    pub transmission: ComplexMatrix,
}

/// `1 − R·P·R′·P` with `P = propagator·gain`.
pub fn loop_matrix(mirrors: &MirrorSet, propagator: &ComplexMatrix, gain: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(mirrors, propagator, gain)?;
    let p = propagator * gain;
    let round_trip = product(&[&mirrors.r, &p, &mirrors.r_prime, &p]);
    Ok(&ComplexMatrix::identity(p.rows()) - &round_trip)
}

fn check_dims(mirrors: &MirrorSet, propagator: &ComplexMatrix, gain: &ComplexMatrix) -> Result<()> {
    let n = mirrors.dim();
    for (m, name) in [(propagator, "propagator"), (gain, "gain")] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension {
                op: "cavity",
                detail: format!("{name} is {}x{}, mirrors are {n}x{n}", m.rows(), m.cols()),
            });
        }
    }
    Ok(())
}

fn resolvent(mirrors: &MirrorSet, propagator: &ComplexMatrix, gain: &ComplexMatrix) -> Result<ComplexMatrix> {
    let a = loop_matrix(mirrors, propagator, gain)?;
    let lu = Lu::new(&a).map_err(|e| match e {
        Error::Singular { pivot } => Error::OscillationBoundary { pivot },
        other => other,
    })?;
    if log::log_enabled!(log::Level::Debug) {
        if let Ok(cond) = condition_number(&a) {
            log::debug!("cavity loop: min pivot {:.3e}, condition number {cond:.3e}", lu.min_pivot());
        }
    }
    lu.solve(&ComplexMatrix::identity(a.rows()))
}

/// Loop resolvent `D(χ)`.
pub fn cavity_loop(mirrors: &MirrorSet, phase: &PhaseMatrix, gain: &ComplexMatrix) -> Result<ComplexMatrix> {
    resolvent(mirrors, &phase.propagator(), gain)
}

/// `R_χ` and `T′_χ` for an arbitrary (not necessarily diagonal) propagator.
pub fn scatter(mirrors: &MirrorSet, propagator: &ComplexMatrix, gain: &ComplexMatrix) -> Result<Scattering> {
    let d = resolvent(mirrors, propagator, gain)?;
    let p = propagator * gain;
    let n = p.rows();
    let reflection = &mirrors.r - &product(&[&mirrors.t, &p, &mirrors.r_prime, &p, &d, &mirrors.t]);
    let inner = &ComplexMatrix::identity(n) + &product(&[&mirrors.r_prime, &p, &d, &mirrors.r, &p]);
    let transmission = product(&[&mirrors.t, &p, &inner, &mirrors.t_prime]);
    Ok(Scattering { reflection, transmission })
}

pub fn reflection_matrix(mirrors: &MirrorSet, phase: &PhaseMatrix, gain: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(scatter(mirrors, &phase.propagator(), gain)?.reflection)
}

pub fn transmission_matrix(mirrors: &MirrorSet, phase: &PhaseMatrix, gain: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(scatter(mirrors, &phase.propagator(), gain)?.transmission)
}

impl Scattering {
    /// Max violation of `R_χ·K·R_χ† + T′_χ·K·T′_χ† = K`.
    pub fn commutator_defect(&self) -> f64 {
        let k = crate::layout::commutator_metric(self.reflection.rows());
        let lhs = &product(&[&self.reflection, &k, &self.reflection.conj_transpose()])
            + &product(&[&self.transmission, &k, &self.transmission.conj_transpose()]);
        lhs.max_abs_diff(&k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{Component, Mode, ModeLayout, Sideband};
    use crate::sideband::{gain_matrix_full, lambda_transform, MeanFields};
    use crate::steady_state::{mean_fields_with, ThresholdModel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_losses() -> CavityLosses {
        CavityLosses::from_reflectivities([0.70, 0.96, 0.96], [0.995, 0.995, 0.995]).unwrap()
    }

    fn op(sigma: f64, f: f64, detuning: [f64; 3]) -> OperatingPoint {
        OperatingPoint { sigma, analysis_frequency_hz: f, detuning_rad_s: detuning, fsr_hz: [4.3e9; 3] }
    }

    #[test]
    fn perfect_mirror() {
        let m = mirror_set(&CavityLosses::new([0.0; 3], [0.0; 3]).unwrap());
        assert_eq!(m.r, ComplexMatrix::identity(12));
        assert_eq!(m.t, ComplexMatrix::zeros(12, 12));
    }

    #[test]
    fn pump_coupler_reflectivity() {
        let m = mirror_set(&reference_losses());
        assert_relative_eq!(m.r[(0, 0)].re, 0.70f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.r[(7, 7)].re, 0.70f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.t[(2, 2)].re, 0.04f64.sqrt(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn mirrors_conserve_energy(g in proptest::array::uniform3(0.0f64..2.0), gp in proptest::array::uniform3(0.0f64..2.0)) {
            let m = mirror_set(&CavityLosses::new(g, gp).unwrap());
            prop_assert!(m.unitarity_defect() < 1e-14);
        }

        #[test]
        fn passive_cavity_is_unitary(
            g in proptest::array::uniform3(0.001f64..1.0),
            gp in proptest::array::uniform3(0.0f64..0.5),
            det in proptest::array::uniform3(-3e8f64..3e8),
            f in 0.0f64..2e8,
        ) {
            let mirrors = mirror_set(&CavityLosses::new(g, gp).unwrap());
            let phase = phase_matrix(&op(0.0, f, det));
            let s = scatter(&mirrors, &phase.propagator(), &ComplexMatrix::identity(12)).unwrap();
            let lhs = &(&s.reflection * &s.reflection.conj_transpose()) + &(&s.transmission * &s.transmission.conj_transpose());
            prop_assert!(lhs.max_abs_diff(&ComplexMatrix::identity(12)) < 1e-10);
        }
    }

    #[test]
    fn resonant_degenerate_phases_vanish() {
        assert!(phase_matrix(&op(1.0, 0.0, [0.0; 3])).phi.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn sideband_phases_are_opposite_at_zero_detuning() {
        let p = phase_matrix(&op(1.0, 21e6, [0.0; 3]));
        for n in Mode::ALL {
            let up = ModeLayout::frequency_slot(n, Sideband::Upper, Component::ANNIHILATION);
            let down = ModeLayout::frequency_slot(n, Sideband::Lower, Component::ANNIHILATION);
            assert_eq!(p.phi[up], -p.phi[down]);
            assert_eq!(p.phi[up + 1], -p.phi[up]);
        }
        // 2π·21 MHz / (2·4.3 GHz)
        assert_relative_eq!(p.phi[0], 1.5342661796601316e-2, max_relative = 1e-14);
        let prop = p.propagator();
        assert!(prop.diagonal().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn symmetric_phase_option() {
        let p = phase_matrix_with(&op(1.0, 21e6, [1e6, 0.0, 0.0]), SidebandPhases::Symmetric);
        for s in 0..6 {
            assert_eq!(p.phi[s], p.phi[s + 6]);
        }
    }

    #[test]
    fn lossless_resonant_loop_is_singular() {
        let mirrors = mirror_set(&CavityLosses::new([0.0; 3], [0.0; 3]).unwrap());
        let err = cavity_loop(&mirrors, &PhaseMatrix::zero(12), &ComplexMatrix::identity(12)).unwrap_err();
        assert!(matches!(err, Error::OscillationBoundary { .. }));
    }

    #[test]
    fn empty_loop_is_geometric_series() {
        let l = reference_losses();
        let mirrors = mirror_set(&l);
        let d = cavity_loop(&mirrors, &PhaseMatrix::zero(12), &ComplexMatrix::identity(12)).unwrap();
        for s in 0..12 {
            let n = (s % 6) / 2;
            assert_relative_eq!(d[(s, s)].re, 1.0 / (1.0 - l.r(n) * l.r_prime(n)), max_relative = 1e-13);
        }
        assert!((&d - &ComplexMatrix::from_diagonal(&d.diagonal())).max_abs() == 0.0);
    }

    #[test]
    fn lossless_empty_cavity_reflects_everything() {
        let l = CavityLosses::new([0.2, 0.02, 0.03], [0.0; 3]).unwrap();
        let r =
            reflection_matrix(&mirror_set(&l), &phase_matrix(&op(0.0, 13e6, [0.0; 3])), &ComplexMatrix::identity(12))
                .unwrap();
        assert!(r.diagonal().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!((&r - &ComplexMatrix::from_diagonal(&r.diagonal())).max_abs() < 1e-15);
        let t =
            transmission_matrix(&mirror_set(&l), &phase_matrix(&op(0.0, 13e6, [0.0; 3])), &ComplexMatrix::identity(12))
                .unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    fn reference_gain(sigma: f64) -> ComplexMatrix {
        gain_matrix_full(&mean_fields_with(sigma, &reference_losses(), ThresholdModel::Loop).unwrap()).unwrap()
    }

    #[test]
    fn reflection_mixes_modes_and_sidebands_with_gain() {
        let mirrors = mirror_set(&reference_losses());
        let phase = phase_matrix(&op(1.5, 21e6, [0.0; 3]));
        let r = reflection_matrix(&mirrors, &phase, &reference_gain(1.5)).unwrap();
        for row_mode in Mode::ALL {
            for col_mode in Mode::ALL {
                for sb in [Sideband::Upper, Sideband::Lower] {
                    let block_max = (0..2)
                        .flat_map(|a| (0..2).map(move |b| (a, b)))
                        .map(|(a, b)| {
                            let i = ModeLayout::frequency_slot(row_mode, Sideband::Upper, Component::ANNIHILATION) + a;
                            let j = ModeLayout::frequency_slot(col_mode, sb, Component::ANNIHILATION) + b;
                            r[(i, j)].norm()
                        })
                        .fold(0.0, f64::max);
                    assert!(block_max > 1e-6, "no coupling {row_mode:?} <- {col_mode:?} {sb:?}");
                }
            }
        }
    }

    #[test]
    fn output_map_preserves_commutators() {
        let mirrors = mirror_set(&reference_losses());
        for (sigma, det) in [(1.05, [0.0; 3]), (1.5, [0.0; 3]), (1.75, [2e6, -1e6, 5e5])] {
            let phase = phase_matrix(&op(sigma, 21e6, det));
            let s = scatter(&mirrors, &phase.propagator(), &reference_gain(sigma)).unwrap();
            assert!(s.commutator_defect() < 1e-10);
        }
    }

    #[test]
    fn loop_is_singular_at_threshold() {
        let mirrors = mirror_set(&reference_losses());
        let zero_phase = PhaseMatrix::zero(12).propagator();
        let a = loop_matrix(&mirrors, &zero_phase, &reference_gain(1.0)).unwrap();
        assert!(a.min_singular_value() <= 1e-6);
        let err = scatter(&mirrors, &zero_phase, &reference_gain(1.0)).unwrap_err();
        assert!(matches!(err, Error::OscillationBoundary { .. }));

        // the closed-form normalisation misses the exact loop threshold at second order
        let closed = mean_fields_with(1.0, &reference_losses(), ThresholdModel::ClosedForm).unwrap();
        let a = loop_matrix(&mirrors, &zero_phase, &gain_matrix_full(&closed).unwrap()).unwrap();
        let smin = a.min_singular_value();
        assert!(smin > 1e-4 && smin < 1e-3, "closed-form threshold mismatch {smin}");
    }

    #[test]
    fn sa_coupling_comes_from_opposite_phases() {
        let mirrors = mirror_set(&reference_losses());
        let gain = reference_gain(1.5);
        let l = lambda_transform();
        let point = op(1.5, 21e6, [0.0; 3]);

        let sym = reflection_matrix(&mirrors, &phase_matrix_with(&point, SidebandPhases::Symmetric), &gain).unwrap();
        let sym = product(&[&l, &sym, &l]);
        assert!(sym.block(0, 6, 6, 6).max_abs() < 1e-12);

        let opp = reflection_matrix(&mirrors, &phase_matrix(&point), &gain).unwrap();
        let opp = product(&[&l, &opp, &l]);
        assert!(opp.block(0, 6, 6, 6).max_abs() > 1e-4);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mirrors = mirror_set(&reference_losses());
        let err = cavity_loop(&mirrors, &PhaseMatrix::zero(12), &ComplexMatrix::identity(6)).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
        let _ = MeanFields::ZERO;
    }
}
