//! Index conventions for operator and quadrature vectors.
//!
//! Frequency basis (12 optical slots):
//!
//! ```text
//! 0  a0(+Ω)   1  a0(+Ω)†   2  a1(+Ω)   3  a1(+Ω)†   4  a2(+Ω)   5  a2(+Ω)†
//! 6  a0(−Ω)   7  a0(−Ω)†   8  a1(−Ω)   9  a1(−Ω)†  10  a2(−Ω)  11  a2(−Ω)†
//! ```
//!
//! Symmetric/antisymmetric basis: the same six-slot pattern for the S modes,
//! then for the A modes. The extended layout appends the three phonon
//! reservoirs `(d1, d1†, d2, d2†, d3, d3†)` at slots 12..18.
//!
//! Quadrature vectors reuse the slot numbering with `(p, q)` in place of
//! `(a, a†)`. Even slots are always annihilation operators (or `p`).

use num_complex::Complex64;

use crate::numerics::ComplexMatrix;

pub const OPTICAL_MODES: usize = 3;
pub const OPTICAL_SLOTS: usize = 12;
pub const PHONON_MODES: usize = 3;
pub const PHONON_SLOTS: usize = 6;
pub const EXTENDED_SLOTS: usize = OPTICAL_SLOTS + PHONON_SLOTS;

/// Carrier label `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Pump = 0,
    Signal = 1,
    Idler = 2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Pump, Mode::Signal, Mode::Idler];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::Pump => "pump",
            Mode::Signal => "signal",
            Mode::Idler => "idler",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sideband {
    Upper,
    Lower,
}

/// Which half of an `(a, a†)` or `(p, q)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    First = 0,
    Second = 1,
}

impl Component {
    pub const ANNIHILATION: Component = Component::First;
    pub const CREATION: Component = Component::Second;
    pub const P: Component = Component::First;
    pub const Q: Component = Component::Second;
}

/// Symmetric or antisymmetric sideband combination `(a(+Ω) ± a(−Ω))/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaBasis {
    Symmetric,
    Antisymmetric,
}

impl SaBasis {
    pub fn sign(self) -> f64 {
        match self {
            SaBasis::Symmetric => 1.0,
            SaBasis::Antisymmetric => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    FrequencySidebands,
    SymmetricAntisymmetric,
}

/// Ordering contract for the 12 optical slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeLayout {
    pub basis: Basis,
}

impl ModeLayout {
    pub const FREQUENCY: ModeLayout = ModeLayout { basis: Basis::FrequencySidebands };
    pub const SYMMETRIC_ANTISYMMETRIC: ModeLayout = ModeLayout { basis: Basis::SymmetricAntisymmetric };

    pub fn n_optical_modes(&self) -> usize {
        2 * OPTICAL_MODES
    }

    /// Slot of a frequency-basis operator.
    pub fn frequency_slot(mode: Mode, sideband: Sideband, comp: Component) -> usize {
        let offset = match sideband {
            Sideband::Upper => 0,
            Sideband::Lower => 6,
        };
        offset + 2 * mode.index() + comp as usize
    }

    /// Slot of an S/A-basis operator.
    pub fn sa_slot(mode: Mode, basis: SaBasis, comp: Component) -> usize {
        let offset = match basis {
            SaBasis::Symmetric => 0,
            SaBasis::Antisymmetric => 6,
        };
        offset + 2 * mode.index() + comp as usize
    }

    /// Inverse of the slot map for this layout.
    pub fn describe(&self, slot: usize) -> String {
        assert!(slot < OPTICAL_SLOTS);
        let mode = Mode::ALL[(slot % 6) / 2];
        let dagger = if slot % 2 == 1 { "†" } else { "" };
        match self.basis {
            Basis::FrequencySidebands => {
                let sb = if slot < 6 { "+" } else { "-" };
                format!("a{}({sb}Ω){dagger}", mode.index())
            }
            Basis::SymmetricAntisymmetric => {
                let sa = if slot < 6 { "s" } else { "a" };
                format!("a{}_{sa}{dagger}", mode.index())
            }
        }
    }
}

/// Slot of phonon reservoir `j` (0-based) in the extended layout.
pub fn phonon_slot(j: usize, comp: Component) -> usize {
    assert!(j < PHONON_MODES);
    OPTICAL_SLOTS + 2 * j + comp as usize
}

/// Commutator metric `K = diag(+1, −1, …)` with `[Aᵢ, Aⱼ†] = Kᵢⱼ`.
pub fn commutator_metric(slots: usize) -> ComplexMatrix {
    assert!(slots.is_multiple_of(2));
    let d: Vec<f64> = (0..slots).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    ComplexMatrix::from_real_diagonal(&d)
}

/// Swaps the two halves of every pair; `X·conj(A)` is the entry-wise adjoint vector.
pub fn pair_swap(slots: usize) -> Vec<usize> {
    (0..slots).map(|i| i ^ 1).collect()
}

/// Symplectic form `⊕ [[0, 1], [−1, 0]]` (so that `[p, q] = 2i`).
pub fn symplectic_form(quadratures: usize) -> ComplexMatrix {
    assert!(quadratures.is_multiple_of(2));
    let mut m = ComplexMatrix::zeros(quadratures, quadratures);
    for k in (0..quadratures).step_by(2) {
        m[(k, k + 1)] = Complex64::new(1.0, 0.0);
        m[(k + 1, k)] = Complex64::new(-1.0, 0.0);
    }
    m
}

/// Max violation of `G·K·G† = K`.
pub fn commutator_defect(g: &ComplexMatrix) -> f64 {
    let k = commutator_metric(g.rows());
    let lhs = crate::numerics::product(&[g, &k, &g.conj_transpose()]);
    lhs.max_abs_diff(&k)
}

/// Max violation of the pairing `M[i^1, j^1] = conj(M[i, j])`, which holds for
/// any linear map sending adjoint pairs to adjoint pairs.
pub fn pairing_defect(m: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            worst = worst.max((m[(i ^ 1, j ^ 1)] - m[(i, j)].conj()).norm());
        }
    }
    worst
}
