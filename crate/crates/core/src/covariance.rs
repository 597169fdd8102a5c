//! Quadrature covariance matrices of the reflected sidebands.
//!
//! Quadratures follow `a = (p + iq)/2`, so `X = N·A` with the per-pair block
//! `[[1, 1], [−i, i]]` and vacuum variance 1. A scattering map `A ↦ S·A`
//! becomes the real map `N·S·N⁻¹` on quadratures.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cavity::{mirror_set, phase_matrix_with, scatter, MirrorSet, PhaseMatrix, Scattering};
use crate::config::OpoConfig;
use crate::error::{Error, Result};
use crate::layout::{symplectic_form, Basis, OPTICAL_SLOTS};
use crate::numerics::{product, ComplexMatrix};
use crate::phonon::{extended_gain, extended_scattering, thermal_input_covariance, PhononParams};
use crate::sideband::{gain_matrix_full, lambda_conjugate, lambda_transform, MeanFields};
use crate::steady_state::mean_fields_with;

pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
pub const PHYSICALITY_TOLERANCE: f64 = -1e-8;

/// Real symmetric covariance in `(p, q)` pair ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    pub matrix: DMatrix<f64>,
    pub basis: Basis,
}

impl CovarianceMatrix {
    /// Symmetrises `m` after checking it is symmetric up to rounding.
    pub fn new(m: DMatrix<f64>, basis: Basis) -> Result<Self> {
        if !m.is_square() || !m.nrows().is_multiple_of(2) {
            return Err(Error::Dimension {
                op: "covariance",
                detail: format!("{}x{} is not an even square matrix", m.nrows(), m.ncols()),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { op: "covariance" });
        }
        let asym = asymmetry(&m);
        let scale = m.amax().max(1.0);
        if asym > SYMMETRY_TOLERANCE * scale {
            return Err(Error::Asymmetric { asymmetry: asym });
        }
        let matrix = (&m + m.transpose()) * 0.5;
        Ok(Self { matrix, basis })
    }

    pub fn identity(dim: usize, basis: Basis) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), basis }
    }

    pub fn from_diagonal(diag: &[f64], basis: Basis) -> Self {
        Self { matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)), basis }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        Self { matrix: self.matrix.view((start, start), (len, len)).into_owned(), basis: self.basis }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// `N` for `slots` operator slots.
pub fn quadrature_map(slots: usize) -> ComplexMatrix {
    pair_blocks(slots, [[1.0.into(), 1.0.into()], [Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)]])
}

/// `N⁻¹`, per-pair block `½[[1, i], [1, −i]]`.
pub fn quadrature_map_inverse(slots: usize) -> ComplexMatrix {
    pair_blocks(slots, [[0.5.into(), Complex64::new(0.0, 0.5)], [0.5.into(), Complex64::new(0.0, -0.5)]])
}

fn pair_blocks(slots: usize, block: [[Complex64; 2]; 2]) -> ComplexMatrix {
    assert!(slots.is_multiple_of(2));
    ComplexMatrix::from_fn(
        slots,
        slots,
        |i, j| {
            if i / 2 == j / 2 {
                block[i % 2][j % 2]
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
    )
}

/// `N·S·N⁻¹` for a square or stacked operator map; fails if the image is not real.
pub fn quadrature_transform(s: &ComplexMatrix) -> Result<DMatrix<f64>> {
    let q = product(&[&quadrature_map(s.rows()), s, &quadrature_map_inverse(s.cols())]);
    let tolerance = 1e-9 * q.max_abs().max(1.0);
    if q.max_imag() > tolerance {
        return Err(Error::Validation(format!(
            "operator map does not preserve adjoint pairs (imaginary part {:.3e})",
            q.max_imag()
        )));
    }
    Ok(q.real_part())
}

/// `V_R = R̃·V_in·R̃ᵀ + T̃′·V_ν·T̃′ᵀ`, where `ports` holds `V_in ⊕ V_ν`.
pub fn propagate(s: &Scattering, ports: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let n = s.reflection.rows();
    if ports.dim() != 2 * n {
        return Err(Error::Dimension {
            op: "propagate",
            detail: format!("port covariance is {0}x{0}, expected {1}x{1}", ports.dim(), 2 * n),
        });
    }
    let r = quadrature_transform(&s.reflection)?;
    let t = quadrature_transform(&s.transmission)?;
    let mut stacked = DMatrix::zeros(n, 2 * n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&r);
    stacked.view_mut((0, n), (n, n)).copy_from(&t);
    let v = &stacked * &ports.matrix * stacked.transpose();
    CovarianceMatrix::new((&v + v.transpose()) * 0.5, ports.basis)
}

/// Everything the scattering stage needs for one configuration.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub mean_fields: MeanFields,
    pub mirrors: MirrorSet,
    pub phase: PhaseMatrix,
    /// Present when the phonon reservoirs are switched on.
    pub phonons: Option<PhononParams>,
}

pub fn prepare(cfg: &OpoConfig) -> Result<Prepared> {
    cfg.validate()?;
    let losses = cfg.losses()?;
    let op = cfg.operating_point();
    let mean_fields = mean_fields_with(op.sigma, &losses, cfg.model.threshold)?;
    let mirrors = mirror_set(&losses).with_transmission_offset(cfg.fault_injection.mirror_transmission_offset);
    let phase = phase_matrix_with(&op, cfg.model.sideband_phases);
    let phonons = if cfg.phonons.enabled {
        let reference = cfg.model.threshold.strength(&losses)?.sqrt();
        Some(cfg.phonon_params(reference))
    } else {
        None
    };
    Ok(Prepared { mean_fields, mirrors, phase, phonons })
}

/// Reflected-field covariance before detection losses.
pub fn output_covariance(cfg: &OpoConfig) -> Result<CovarianceMatrix> {
    let p = prepare(cfg)?;
    let v = match &p.phonons {
        Some(pp) => {
            let eg = extended_gain(&p.mean_fields, pp)?;
            let s = extended_scattering(&p.mirrors, &p.phase, &eg)?;
            propagate(&s, &thermal_input_covariance(pp))?.principal_block(0, OPTICAL_SLOTS)
        }
        None => {
            let g = gain_matrix_full(&p.mean_fields)?;
            let s = scatter(&p.mirrors, &p.phase.propagator(), &g)?;
            propagate(&s, &CovarianceMatrix::identity(2 * OPTICAL_SLOTS, Basis::FrequencySidebands))?
        }
    };
    let report = physicality_report(&v)?;
    if report.min_eigenvalue < PHYSICALITY_TOLERANCE {
        return Err(Error::Unphysical { min_eigenvalue: report.min_eigenvalue });
    }
    Ok(v)
}

/// Output covariance with detection losses applied when enabled.
pub fn detected_covariance(cfg: &OpoConfig) -> Result<CovarianceMatrix> {
    let v = output_covariance(cfg)?;
    if cfg.detection.enabled {
        apply_detection(&v, cfg.detection.efficiency)
    } else {
        Ok(v)
    }
}

/// `Λ` acting on quadratures (it commutes with `N`).
pub fn sa_rotation() -> DMatrix<f64> {
    lambda_transform().real_part()
}

/// `Λ·V·Λ` on a 12×12 quadrature matrix, as exact half-sums.
pub fn rotate_to_sa(v: &DMatrix<f64>) -> DMatrix<f64> {
    let c = ComplexMatrix::from_fn(OPTICAL_SLOTS, OPTICAL_SLOTS, |i, j| Complex64::new(v[(i, j)], 0.0));
    lambda_conjugate(&c).real_part()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SABlocks {
    pub v_s: DMatrix<f64>,
    pub v_a: DMatrix<f64>,
    pub c_sa: DMatrix<f64>,
}

pub fn to_sa_blocks(v: &CovarianceMatrix) -> Result<SABlocks> {
    if v.dim() != OPTICAL_SLOTS || v.basis != Basis::FrequencySidebands {
        return Err(Error::Dimension {
            op: "to_sa_blocks",
            detail: format!("expected a 12x12 frequency-basis covariance, got {}x{} {:?}", v.dim(), v.dim(), v.basis),
        });
    }
    let w = rotate_to_sa(&v.matrix);
    Ok(SABlocks {
        v_s: w.view((0, 0), (6, 6)).into_owned(),
        v_a: w.view((6, 6), (6, 6)).into_owned(),
        c_sa: w.view((0, 6), (6, 6)).into_owned(),
    })
}

impl SABlocks {
    pub fn assemble(&self) -> Result<CovarianceMatrix> {
        let mut m = DMatrix::zeros(12, 12);
        m.view_mut((0, 0), (6, 6)).copy_from(&self.v_s);
        m.view_mut((6, 6), (6, 6)).copy_from(&self.v_a);
        m.view_mut((0, 6), (6, 6)).copy_from(&self.c_sa);
        m.view_mut((6, 0), (6, 6)).copy_from(&self.c_sa.transpose());
        CovarianceMatrix::new(m, Basis::SymmetricAntisymmetric)
    }

    /// Max deviation of `V_a` from `V_s` carried through `p_s → q_a`, `q_s → −p_a`.
    pub fn quarter_turn_defect(&self) -> f64 {
        let w = DMatrix::from_fn(6, 6, |i, j| match (i / 2 == j / 2, i % 2, j % 2) {
            (true, 0, 1) => -1.0,
            (true, 1, 0) => 1.0,
            _ => 0.0,
        });
        (&w * &self.v_s * w.transpose() - &self.v_a).amax()
    }

    /// Frobenius norm of the S/A cross block.
    pub fn cross_norm(&self) -> f64 {
        self.c_sa.norm()
    }

    /// Variance of `(p₁ − p₂)/√2` in the S modes, the twin-beam observable.
    pub fn amplitude_difference_variance(&self) -> f64 {
        let (p1, p2) = (2, 4);
        0.5 * (self.v_s[(p1, p1)] + self.v_s[(p2, p2)] - 2.0 * self.v_s[(p1, p2)])
    }
}

/// Per-carrier loss `V ↦ E·V·E + 1 − E²` with `E = diag(√η)`, on both sidebands.
pub fn apply_detection(v: &CovarianceMatrix, eta: [f64; 3]) -> Result<CovarianceMatrix> {
    for (n, e) in eta.iter().enumerate() {
        if !(e.is_finite() && *e > 0.0 && *e <= 1.0) {
            return Err(Error::config(format!("detection.efficiency[{n}]"), format!("{e} is outside (0, 1]")));
        }
    }
    if v.dim() != OPTICAL_SLOTS {
        return Err(Error::Dimension {
            op: "apply_detection",
            detail: format!("expected 12 quadratures, got {}", v.dim()),
        });
    }
    let e: Vec<f64> = (0..OPTICAL_SLOTS).map(|s| eta[(s % 6) / 2].sqrt()).collect();
    let m = DMatrix::from_fn(OPTICAL_SLOTS, OPTICAL_SLOTS, |i, j| {
        let loss = if i == j { 1.0 - e[i] * e[i] } else { 0.0 };
        e[i] * v.matrix[(i, j)] * e[j] + loss
    });
    CovarianceMatrix::new(m, v.basis)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalityReport {
    /// Smallest eigenvalue of `V + iΩ`; non-negative for a physical state.
    pub min_eigenvalue: f64,
    /// Symplectic eigenvalues, ascending; all ≥ 1 for a physical state.
    pub symplectic_eigenvalues: Vec<f64>,
    /// `1/√det V`, clipped to `[0, 1]`.
    pub purity: f64,
    pub asymmetry: f64,
}

impl PhysicalityReport {
    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue >= PHYSICALITY_TOLERANCE
    }
}

pub fn physicality_report(v: &CovarianceMatrix) -> Result<PhysicalityReport> {
    let asym = asymmetry(&v.matrix);
    if asym > SYMMETRY_TOLERANCE * v.matrix.amax().max(1.0) {
        return Err(Error::Asymmetric { asymmetry: asym });
    }
    let n = v.dim();
    let omega = symplectic_form(n);
    let i = Complex64::new(0.0, 1.0);
    let h = DMatrix::from_fn(n, n, |r, c| Complex64::new(v.matrix[(r, c)], 0.0) + i * omega[(r, c)]);
    let min_eigenvalue = SymmetricEigen::new(h).eigenvalues.min();

    let eig = SymmetricEigen::new(v.matrix.clone());
    let (symplectic_eigenvalues, purity) = if eig.eigenvalues.min() > 0.0 {
        let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let root = &eig.eigenvectors * sqrt_d * eig.eigenvectors.transpose();
        let root_c = root.map(|x| Complex64::new(x, 0.0));
        let iw = omega.as_nalgebra().map(|z| i * z);
        let a = &root_c * iw * &root_c;
        let mut nu: Vec<f64> = SymmetricEigen::new((&a + a.adjoint()) * Complex64::new(0.5, 0.0))
            .eigenvalues
            .iter()
            .copied()
            .filter(|x| *x > 0.0)
            .collect();
        nu.sort_by(f64::total_cmp);
        let log_det: f64 = eig.eigenvalues.iter().map(|x| x.ln()).sum();
        (nu, (-0.5 * log_det).exp().clamp(0.0, 1.0))
    } else {
        (Vec::new(), 0.0)
    };
    Ok(PhysicalityReport { min_eigenvalue, symplectic_eigenvalues, purity, asymmetry: asym })
}

/// Label of quadrature `slot` in `basis`, e.g. `p1+` or `q2a`.
pub fn quadrature_label(basis: Basis, slot: usize) -> String {
    let quad = if slot.is_multiple_of(2) { 'p' } else { 'q' };
    let mode = (slot % 6) / 2;
    let tag = match (basis, slot < 6) {
        (Basis::FrequencySidebands, true) => '+',
        (Basis::FrequencySidebands, false) => '-',
        (Basis::SymmetricAntisymmetric, true) => 's',
        (Basis::SymmetricAntisymmetric, false) => 'a',
    };
    format!("{quad}{mode}{tag}")
}

#[rustfmt::skip]
const VS_NAMES: [[&str; 6]; 6] = [
    ["rho0",  "e1",    "mu01",   "e2",        "mu02",      "e3"],
    ["e1",    "beta0", "e4",     "nu01",      "e5",        "nu02"],
    ["mu01",  "e4",    "rho1",   "e6",        "zeta12",    "e7"],
    ["e2",    "nu01",  "e6",     "beta1",     "e8",        "epsilon12"],
    ["mu02",  "e5",    "zeta12", "e8",        "rho2",      "e9"],
    ["e3",    "nu02",  "e7",     "epsilon12", "e9",        "beta2"],
];

#[rustfmt::skip]
const CSA_NAMES: [[&str; 6]; 6] = [
    ["delta0",    "zero",     "h1",      "-kappa01", "h2",       "-kappa02"],
    ["zero",      "delta0",   "lambda01", "h3",      "lambda02", "h4"],
    ["h3",        "kappa01",  "delta1",  "zero",     "h5",       "-varrho12"],
    ["-lambda01", "h1",       "zero",    "delta1",   "eta12",    "h6"],
    ["h4",        "kappa02",  "h6",      "varrho12", "delta2",   "zero"],
    ["-lambda02", "h2",       "-eta12",  "h5",       "zero",     "delta2"],
];

/// Conventional name of an entry of `V_s` or `C_sa` at zero detuning.
pub fn vs_entry_name(i: usize, j: usize) -> &'static str {
    VS_NAMES[i][j]
}

pub fn csa_entry_name(i: usize, j: usize) -> &'static str {
    CSA_NAMES[i][j]
}

/// `V_a` entries are named after the `V_s` entry they match under the quarter turn.
pub fn va_entry_name(i: usize, j: usize) -> String {
    let back = |k: usize| (k ^ 1, if k.is_multiple_of(2) { -1 } else { 1 });
    let (si, sa) = back(i);
    let (sj, sb) = back(j);
    let name = VS_NAMES[si][sj];
    if sa * sb < 0 {
        format!("-{name}")
    } else {
        name.to_string()
    }
}

/// Entries fixed at zero by the zero-detuning, phonon-free pattern.
pub fn vs_is_structural_zero(i: usize, j: usize) -> bool {
    (i + j) % 2 == 1
}

pub fn csa_is_structural_zero(i: usize, j: usize) -> bool {
    (i + j).is_multiple_of(2) || i / 2 == j / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::commutator_metric;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn quadrature_map_identities() {
        let n = quadrature_map(12);
        let ni = quadrature_map_inverse(12);
        assert!((&ni * &n).max_abs_diff(&ComplexMatrix::identity(12)) < 1e-14);
        let lhs = product(&[&n, &commutator_metric(12), &n.conj_transpose()]);
        let rhs = symplectic_form(12).scale(Complex64::new(0.0, 2.0));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn vacuum_has_unit_quadrature_variance() {
        // ⟨{A, A†}⟩/2 for vacuum in (a, a†) ordering is ½[[1, 0], [0, 1]] rotated:
        // the symmetrised second moments ⟨a a†⟩ = 1, ⟨a† a⟩ = 0 give ½ on the anti-diagonal.
        let sym = ComplexMatrix::from_real_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]).unwrap();
        let n = quadrature_map(2);
        let v = product(&[&n, &sym, &n.transpose()]);
        assert!(v.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn identity_splits_trivially() {
        let b = to_sa_blocks(&CovarianceMatrix::identity(12, Basis::FrequencySidebands)).unwrap();
        assert!((&b.v_s - DMatrix::<f64>::identity(6, 6)).amax() < 1e-15);
        assert!((&b.v_a - DMatrix::<f64>::identity(6, 6)).amax() < 1e-15);
        assert!(b.c_sa.amax() < 1e-15);
        assert_eq!(b.assemble().unwrap().basis, Basis::SymmetricAntisymmetric);
        assert!(to_sa_blocks(&CovarianceMatrix::identity(6, Basis::FrequencySidebands)).is_err());
    }

    #[test]
    fn detection_admixture() {
        let mut m = DMatrix::identity(12, 12);
        m[(2, 2)] = 0.5;
        let v = CovarianceMatrix::new(m, Basis::FrequencySidebands).unwrap();
        let d = apply_detection(&v, [0.65, 0.87, 0.87]).unwrap();
        assert_relative_eq!(d.get(2, 2), 0.565, max_relative = 1e-15);
        assert_eq!(apply_detection(&v, [1.0; 3]).unwrap(), v);
        let tiny = apply_detection(&v, [1e-300; 3]).unwrap();
        assert!((&tiny.matrix - DMatrix::<f64>::identity(12, 12)).amax() < 1e-15);
        assert!(matches!(apply_detection(&v, [0.0, 1.0, 1.0]), Err(Error::Config { .. })));
        assert!(matches!(apply_detection(&v, [1.0, 1.1, 1.0]), Err(Error::Config { .. })));
    }

    #[test]
    fn vacuum_and_thermal_reports() {
        let r = physicality_report(&CovarianceMatrix::identity(12, Basis::FrequencySidebands)).unwrap();
        assert!(r.min_eigenvalue.abs() < 1e-14);
        assert_relative_eq!(r.purity, 1.0, max_relative = 1e-14);
        let hot = CovarianceMatrix::from_diagonal(&[3.0; 12], Basis::FrequencySidebands);
        let r = physicality_report(&hot).unwrap();
        assert_eq!(r.symplectic_eigenvalues.len(), 6);
        assert!(r.symplectic_eigenvalues.iter().all(|x| (x - 3.0).abs() < 1e-13));
        assert_relative_eq!(r.purity, 3f64.powi(-6), max_relative = 1e-12);
    }

    #[test]
    fn squeezed_vacuum_is_pure_and_physical() {
        let s = 0.7f64;
        let v = CovarianceMatrix::from_diagonal(&[(-2.0 * s).exp(), (2.0 * s).exp()], Basis::FrequencySidebands);
        let r = physicality_report(&v).unwrap();
        assert!(r.is_physical());
        assert_relative_eq!(r.purity, 1.0, max_relative = 1e-12);
        assert_relative_eq!(r.symplectic_eigenvalues[0], 1.0, max_relative = 1e-12);
        let bad = CovarianceMatrix::from_diagonal(&[0.5, 1.0], Basis::FrequencySidebands);
        assert!(!physicality_report(&bad).unwrap().is_physical());
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut m = DMatrix::identity(4, 4);
        m[(0, 1)] = 0.1;
        assert!(matches!(CovarianceMatrix::new(m.clone(), Basis::FrequencySidebands), Err(Error::Asymmetric { .. })));
        let raw = CovarianceMatrix { matrix: m, basis: Basis::FrequencySidebands };
        assert!(matches!(physicality_report(&raw), Err(Error::Asymmetric { .. })));
    }

    #[test]
    fn entry_names() {
        assert_eq!(vs_entry_name(0, 0), "rho0");
        assert_eq!(vs_entry_name(3, 5), "epsilon12");
        assert_eq!(csa_entry_name(0, 3), "-kappa01");
        assert_eq!(csa_entry_name(4, 3), "varrho12");
        // V_a(q, q) pairs with V_s(p, p)
        assert_eq!(va_entry_name(1, 1), "rho0");
        assert_eq!(va_entry_name(0, 0), "beta0");
        assert_eq!(va_entry_name(1, 2), "-e2");
        assert_eq!(quadrature_label(Basis::FrequencySidebands, 9), "q1-");
        assert_eq!(quadrature_label(Basis::SymmetricAntisymmetric, 4), "p2s");
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(
                    vs_is_structural_zero(i, j),
                    vs_entry_name(i, j).starts_with('e') && !vs_entry_name(i, j).starts_with("ep")
                );
                let n = csa_entry_name(i, j);
                assert_eq!(csa_is_structural_zero(i, j), n == "zero" || n.starts_with("delta") || n.starts_with('h'));
            }
        }
    }

    proptest! {
        #[test]
        fn detection_keeps_states_physical(
            s in proptest::array::uniform6(-1.5f64..1.5),
            eta in proptest::array::uniform3(0.01f64..1.0),
            mix in 0.0f64..1.0,
        ) {
            // product of single-mode squeezers rotated by a beam splitter between slots 0..2 and 2..4
            let diag: Vec<f64> = (0..12).map(|k| {
                let r = s[k / 2];
                if k % 2 == 0 { (-2.0 * r).exp() } else { (2.0 * r).exp() }
            }).collect();
            let (c, sn) = (mix.cos(), mix.sin());
            let mut b = DMatrix::<f64>::identity(12, 12);
            for k in 0..2 {
                b[(k, k)] = c; b[(k + 2, k + 2)] = c;
                b[(k, k + 2)] = sn; b[(k + 2, k)] = -sn;
            }
            let v = &b * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) * b.transpose();
            let v = CovarianceMatrix::new((&v + v.transpose()) * 0.5, Basis::FrequencySidebands).unwrap();
            prop_assert!(physicality_report(&v).unwrap().is_physical());
            let d = apply_detection(&v, eta).unwrap();
            prop_assert!(physicality_report(&d).unwrap().is_physical());
        }
    }
}
