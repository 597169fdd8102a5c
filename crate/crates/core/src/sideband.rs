//! Crystal interaction for the six sideband modes.
//!
//! The linearised three-wave-mixing Hamiltonian couples each S (or A) triple
//! `(a0, a1, a2)` through one two-mode-squeezing term (strength `±χα0`) and
//! two beam-splitter terms (strengths `χα1`, `χα2`). The S and A subspaces
//! are never mixed by the crystal; only the cavity phases couple them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::layout::{Component, Mode, ModeLayout, SaBasis, OPTICAL_SLOTS};
use crate::numerics::{direct_sum, expm, ComplexMatrix};

/// Intracavity carrier amplitudes, always stored multiplied by `χ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFields {
    pub chi_alpha0: Complex64,
    pub chi_alpha1: Complex64,
    pub chi_alpha2: Complex64,
}

impl MeanFields {
    pub const ZERO: MeanFields = MeanFields {
        chi_alpha0: Complex64::new(0.0, 0.0),
        chi_alpha1: Complex64::new(0.0, 0.0),
        chi_alpha2: Complex64::new(0.0, 0.0),
    };

    pub fn real(a0: f64, a1: f64, a2: f64) -> Self {
        Self {
            chi_alpha0: Complex64::new(a0, 0.0),
            chi_alpha1: Complex64::new(a1, 0.0),
            chi_alpha2: Complex64::new(a2, 0.0),
        }
    }

    pub fn get(&self, mode: Mode) -> Complex64 {
        match mode {
            Mode::Pump => self.chi_alpha0,
            Mode::Signal => self.chi_alpha1,
            Mode::Idler => self.chi_alpha2,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.chi_alpha0, self.chi_alpha1, self.chi_alpha2].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// 6×6 drift `M_χs` or `M_χa` acting on `(a0, a0†, a1, a1†, a2, a2†)`.
pub fn drift_matrix_sa(basis: SaBasis, mf: &MeanFields) -> ComplexMatrix {
    let (a0, a1, a2) = (mf.chi_alpha0, mf.chi_alpha1, mf.chi_alpha2);
    let s = basis.sign();
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let entries = [
        z,         z,        -a2,        z,         -a1,        z,
        z,         z,         z,        -a2.conj(),  z,        -a1.conj(),
        a2.conj(), z,         z,         z,          z,         a0 * s,
        z,         a2,        z,         z,          a0.conj() * s, z,
        a1.conj(), z,         z,         a0 * s,     z,         z,
        z,         a1,        a0.conj() * s, z,      z,         z,
    ];
    ComplexMatrix::from_row_slice(6, 6, &entries).expect("6x6 literal")
}

/// Single-pass gain `G_s(a) = exp(M_χs(a))`, mean fields constant along the crystal.
pub fn gain_matrix_sa(basis: SaBasis, mf: &MeanFields) -> Result<ComplexMatrix> {
    expm(&drift_matrix_sa(basis, mf))
}

/// `Λ = Λ⁻¹ = (1/√2)[[1, 1], [1, −1]]` in 6×6 blocks.
pub fn lambda_transform() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(OPTICAL_SLOTS, OPTICAL_SLOTS, |i, j| {
        if i % 6 != j % 6 {
            Complex64::new(0.0, 0.0)
        } else if i >= 6 && j >= 6 {
            Complex64::new(-h, 0.0)
        } else {
            Complex64::new(h, 0.0)
        }
    })
}

/// `Λ·M·Λ` for a 12×12 `M`, evaluated as exact half-sums of sideband blocks.
pub fn lambda_conjugate(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.rows() == OPTICAL_SLOTS && m.cols() == OPTICAL_SLOTS);
    ComplexMatrix::from_fn(OPTICAL_SLOTS, OPTICAL_SLOTS, |i, j| {
        let (bi, bj) = (i / 6, j / 6);
        let (i0, j0) = (i % 6, j % 6);
        let sign = |b: usize, k: usize| if b == 1 && k == 1 { -1.0 } else { 1.0 };
        let mut acc = Complex64::new(0.0, 0.0);
        for ki in 0..2 {
            for kj in 0..2 {
                acc += m[(i0 + 6 * ki, j0 + 6 * kj)] * (sign(bi, ki) * sign(bj, kj));
            }
        }
        acc * 0.5
    })
}

/// 12×12 frequency-basis drift `Λ(M_s ⊕ M_a)Λ`.
pub fn drift_matrix_full(mf: &MeanFields) -> ComplexMatrix {
    let block = direct_sum(&drift_matrix_sa(SaBasis::Symmetric, mf), &drift_matrix_sa(SaBasis::Antisymmetric, mf))
        .expect("square blocks");
    lambda_conjugate(&block)
}

/// 12×12 frequency-basis gain `Λ(G_s ⊕ G_a)Λ`.
pub fn gain_matrix_full(mf: &MeanFields) -> Result<ComplexMatrix> {
    let block = direct_sum(&gain_matrix_sa(SaBasis::Symmetric, mf)?, &gain_matrix_sa(SaBasis::Antisymmetric, mf)?)?;
    Ok(lambda_conjugate(&block))
}

/// Frequency-basis slot helper for tests and diagnostics.
pub fn slot(mode: Mode, sideband: crate::layout::Sideband, comp: Component) -> usize {
    ModeLayout::frequency_slot(mode, sideband, comp)
}
