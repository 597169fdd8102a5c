//! Optomechanical coupling to three phonon reservoirs.
//!
//! Each optical carrier `n` scatters off reservoir `j` with strength `g[n][j]`.
//! The upper sideband couples through `L` (beam-splitter like), the lower one
//! through `L′` (squeezing like), and the reservoir operators are driven back
//! by `K = (L† | −L′†)`. Amplitudes entering `L` are the steady-state `χα`
//! divided by `amplitude_reference`; the output pipeline uses the input pump
//! amplitude at threshold, `χ|α_in|_th`, the same unit the mean fields are
//! scaled to.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{scatter, MirrorSet, PhaseMatrix, Scattering};
use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::layout::{Basis, EXTENDED_SLOTS, OPTICAL_SLOTS, PHONON_MODES, PHONON_SLOTS};
use crate::numerics::{expm, ComplexMatrix};
use crate::sideband::{drift_matrix_full, MeanFields};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhononParams {
    /// `coupling[n][j]`, optical carrier `n`, reservoir `j`.
    pub coupling: [[f64; PHONON_MODES]; 3],
    pub n_thermal: f64,
    pub amplitude_reference: f64,
}

impl Default for PhononParams {
    fn default() -> Self {
        Self { coupling: [[0.0; PHONON_MODES]; 3], n_thermal: 0.0, amplitude_reference: 1.0 }
    }
}

impl PhononParams {
    pub fn validate(&self) -> Result<()> {
        for (n, row) in self.coupling.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                if !g.is_finite() {
                    return Err(Error::config(format!("phonons.coupling[{n}][{j}]"), "must be finite"));
                }
            }
        }
        if !(self.n_thermal.is_finite() && self.n_thermal >= 0.0) {
            return Err(Error::config("phonons.n_thermal", "must be finite and >= 0"));
        }
        if !(self.amplitude_reference.is_finite() && self.amplitude_reference > 0.0) {
            return Err(Error::config("phonons.amplitude_reference", "must be finite and > 0"));
        }
        Ok(())
    }

    pub fn is_uncoupled(&self) -> bool {
        self.coupling.iter().flatten().all(|&g| g == 0.0)
    }
}

/// `J` (12×6) and `K` (6×12).
pub fn optomech_blocks(pp: &PhononParams, mf: &MeanFields) -> (ComplexMatrix, ComplexMatrix) {
    let mut l = ComplexMatrix::zeros(6, PHONON_SLOTS);
    let mut lp = ComplexMatrix::zeros(6, PHONON_SLOTS);
    for n in 0..3 {
        let alpha = mf.get(crate::layout::Mode::ALL[n]) / pp.amplitude_reference;
        for j in 0..PHONON_MODES {
            let g = pp.coupling[n][j];
            let (r, c) = (2 * n, 2 * j);
            l[(r, c)] = alpha * g;
            l[(r + 1, c + 1)] = -alpha.conj() * g;
            lp[(r, c + 1)] = alpha * g;
            lp[(r + 1, c)] = -alpha.conj() * g;
        }
    }
    let mut j_block = ComplexMatrix::zeros(OPTICAL_SLOTS, PHONON_SLOTS);
    j_block.set_block(0, 0, &l);
    j_block.set_block(6, 0, &lp);
    let mut k_block = ComplexMatrix::zeros(PHONON_SLOTS, OPTICAL_SLOTS);
    k_block.set_block(0, 0, &l.conj_transpose());
    k_block.set_block(0, 6, &-&lp.conj_transpose());
    (j_block, k_block)
}

/// 18×18 drift `[[M_χ, iJ], [iK, 0]]`.
pub fn extended_drift(mf: &MeanFields, pp: &PhononParams) -> ComplexMatrix {
    let (j, k) = optomech_blocks(pp, mf);
    let i = Complex64::new(0.0, 1.0);
    let mut m = ComplexMatrix::zeros(EXTENDED_SLOTS, EXTENDED_SLOTS);
    m.set_block(0, 0, &drift_matrix_full(mf));
    m.set_block(0, OPTICAL_SLOTS, &j.scale(i));
    m.set_block(OPTICAL_SLOTS, 0, &k.scale(i));
    m
}

pub fn extended_gain(mf: &MeanFields, pp: &PhononParams) -> Result<ComplexMatrix> {
    expm(&extended_drift(mf, pp))
}

/// Scattering with lifted mirrors (`R ⊕ 0`, `T ⊕ 1`, …) and phases (`φ ⊕ 0`).
pub fn extended_scattering(mirrors: &MirrorSet, phase: &PhaseMatrix, egain: &ComplexMatrix) -> Result<Scattering> {
    let lifted = if mirrors.dim() == EXTENDED_SLOTS { mirrors.clone() } else { mirrors.extended() };
    let psi = if phase.phi.len() == EXTENDED_SLOTS { phase.clone() } else { phase.extended() };
    scatter(&lifted, &psi.propagator(), egain)
}

/// 36×36 quadrature covariance of the stacked (input ⊕ loss) ports.
pub fn thermal_input_covariance(pp: &PhononParams) -> CovarianceMatrix {
    let thermal = 1.0 + 2.0 * pp.n_thermal;
    let port: Vec<f64> = (0..EXTENDED_SLOTS).map(|s| if s < OPTICAL_SLOTS { 1.0 } else { thermal }).collect();
    let diag: Vec<f64> = port.iter().chain(port.iter()).copied().collect();
    CovarianceMatrix::from_diagonal(&diag, Basis::FrequencySidebands)
}
