//! Finite-dimensional quantum state algebra: density matrices, fidelity,
//! trace distance, spectral projectors and entropy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const TOL_HERM: f64 = 1e-12;
pub const TOL_TRACE: f64 = 1e-12;
pub const TOL_PSD: f64 = 1e-12;
pub const TOL_NORM: f64 = 1e-12;
const ENTROPY_CUTOFF: f64 = 1e-14;

/// A normalized pure state of the controlled system.
#[derive(Debug, Clone, PartialEq)]
pub struct PureSystemState {
    amplitudes: DVector<Complex64>,
}

impl PureSystemState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        if v.is_empty() {
            return Err(Error::Validation("empty state vector".into()));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::Validation(format!(
                "state vector norm {norm} deviates from 1 beyond {TOL_NORM}"
            )));
        }
        Ok(Self { amplitudes: v })
    }

    /// Normalizes the input instead of rejecting it.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm <= 0.0 {
            return Err(Error::Validation("cannot normalize the zero vector".into()));
        }
        Ok(Self { amplitudes: v / Complex64::from(norm) })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }
}

/// A Hermitian operator on the system space (Hamiltonians, coupling
/// operators, projectors).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        check_square(&mat)?;
        if hermiticity_defect(&mat) > TOL_HERM {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian within {TOL_HERM}"
            )));
        }
        Ok(Self { mat: hermitize(&mat) })
    }

    pub fn zero(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    pub fn pauli_z() -> Self {
        Self {
            mat: DMatrix::from_row_slice(2, 2, &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
            ]),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            mat: DMatrix::from_row_slice(2, 2, &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ]),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Real eigenvalues (ascending) and the unitary of eigenvectors.
    pub fn eig(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        herm_eig(&self.mat)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> f64 {
        let (vals, _) = self.eig();
        vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// True if P^2 = P within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        let p2 = &self.mat * &self.mat;
        (&p2 - &self.mat).iter().all(|e| e.norm() <= tol)
    }
}

/// A Hermitian, PSD, unit-trace system state.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDensityMatrix {
    mat: DMatrix<Complex64>,
}

impl SystemDensityMatrix {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        check_square(&mat)?;
        if hermiticity_defect(&mat) > TOL_HERM {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian within {TOL_HERM}"
            )));
        }
        let mat = hermitize(&mat);
        let tr: Complex64 = mat.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::Validation(format!(
                "trace {tr} deviates from 1 beyond {TOL_TRACE}"
            )));
        }
        let (vals, _) = herm_eig(&mat);
        if vals.iter().any(|&l| l < -TOL_PSD) {
            return Err(Error::Validation(format!(
                "negative eigenvalue beyond -{TOL_PSD}: {:?}",
                vals
            )));
        }
        Ok(Self { mat })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = DMatrix::identity(dim, dim) * Complex64::from(1.0 / dim as f64);
        Self { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Eigenvalues clipped into [0, 1] for spectral functions.
    fn clipped_spectrum(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let (mut vals, vecs) = herm_eig(&self.mat);
        for v in vals.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        (vals, vecs)
    }

    /// Expectation value (xi, rho xi) of a pure state.
    pub fn expectation(&self, xi: &PureSystemState) -> f64 {
        let v = xi.amplitudes();
        let rv = &self.mat * v;
        v.dotc(&rv).re
    }
}

/// rho = |psi><psi|.
pub fn density_from_pure(psi: &PureSystemState) -> SystemDensityMatrix {
    let v = psi.amplitudes();
    let mat = v * v.adjoint();
    SystemDensityMatrix { mat }
}

/// Uhlmann fidelity tr sqrt(sqrt(rho0) rho1 sqrt(rho0)), in [0, 1].
pub fn fidelity(rho0: &SystemDensityMatrix, rho1: &SystemDensityMatrix) -> Result<f64> {
    check_same_dim(rho0, rho1)?;
    let s0 = psd_sqrt(rho0);
    let inner = &s0 * rho1.matrix() * &s0;
    let (vals, _) = herm_eig(&hermitize(&inner));
    let f: f64 = vals.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Trace distance tr|rho0 - rho1| in the unnormalized convention, range [0, 2].
pub fn trace_distance(rho0: &SystemDensityMatrix, rho1: &SystemDensityMatrix) -> Result<f64> {
    check_same_dim(rho0, rho1)?;
    let diff = rho0.matrix() - rho1.matrix();
    let (vals, _) = herm_eig(&diff);
    Ok(vals.iter().map(|l| l.abs()).sum())
}

/// D <= 2 sqrt(1 - F^2) up to slack 1e-9.
pub fn fuchs_van_de_graaf_check(
    rho0: &SystemDensityMatrix,
    rho1: &SystemDensityMatrix,
) -> Result<bool> {
    let f = fidelity(rho0, rho1)?;
    let d = trace_distance(rho0, rho1)?;
    Ok(d <= 2.0 * (1.0 - f * f).max(0.0).sqrt() + 1e-9)
}

/// Projector onto the eigenspaces of `a` with eigenvalue >= 0 (the zero
/// eigenspace is included).
pub fn positive_part_projector(a: &HermitianOperator) -> HermitianOperator {
    let (vals, vecs) = a.eig();
    projector_from_columns(&vals, &vecs, |l| l >= 0.0)
}

/// Projector onto the eigenvectors of `rho` with eigenvalue > `eps`.
pub fn support_projector(rho: &SystemDensityMatrix, eps: f64) -> HermitianOperator {
    let (vals, vecs) = herm_eig(rho.matrix());
    projector_from_columns(&vals, &vecs, |l| l > eps)
}

/// tr(rho^2); equals 1 iff pure.
pub fn purity(rho: &SystemDensityMatrix) -> f64 {
    let sq = rho.matrix() * rho.matrix();
    sq.trace().re
}

/// -sum lambda ln lambda over eigenvalues above 1e-14, in nats.
pub fn von_neumann_entropy(rho: &SystemDensityMatrix) -> f64 {
    let (vals, _) = rho.clipped_spectrum();
    vals.iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Eigenbasis (as pure states) of the eigenvalue >= 0 part of `a`.
/// Used for the per-vector inequality family summing to E+.
pub fn nonnegative_eigenbasis(a: &HermitianOperator) -> Vec<PureSystemState> {
    let (vals, vecs) = a.eig();
    vals.iter()
        .enumerate()
        .filter(|(_, &l)| l >= 0.0)
        .map(|(i, _)| PureSystemState {
            amplitudes: vecs.column(i).into_owned(),
        })
        .collect()
}

pub(crate) fn projector_from_columns(
    vals: &[f64],
    vecs: &DMatrix<Complex64>,
    keep: impl Fn(f64) -> bool,
) -> HermitianOperator {
    let dim = vecs.nrows();
    let mut p = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, &l) in vals.iter().enumerate() {
        if keep(l) {
            let c = vecs.column(i);
            p += c * c.adjoint();
        }
    }
    HermitianOperator { mat: hermitize(&p) }
}

/// sqrt of a PSD matrix with negative drift clipped to zero.
fn psd_sqrt(rho: &SystemDensityMatrix) -> DMatrix<Complex64> {
    let (vals, vecs) = rho.clipped_spectrum();
    spectral_apply(&vals, &vecs, f64::sqrt)
}

pub(crate) fn spectral_apply(
    vals: &[f64],
    vecs: &DMatrix<Complex64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<Complex64> {
    let dim = vecs.nrows();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        vals.iter().map(|&l| Complex64::from(f(l))),
    ));
    vecs * d * vecs.adjoint()
}

/// exp(-i H t / hbar) for Hermitian H, via eigendecomposition.
pub fn unitary_exp(h: &HermitianOperator, t: f64, hbar: f64) -> DMatrix<Complex64> {
    let (vals, vecs) = h.eig();
    let dim = vecs.nrows();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        vals.iter()
            .map(|&l| Complex64::new(0.0, -l * t / hbar).exp()),
    ));
    &vecs * d * vecs.adjoint()
}

/// Hermitian eigendecomposition (ascending eigenvalues, unitary columns).
pub fn herm_eig(mat: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = nalgebra::SymmetricEigen::new(hermitize(mat));
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let dim = mat.nrows();
    let mut vecs = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub(crate) fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::from(0.5)
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().fold(0.0_f64, |mx, e| mx.max(e.norm()))
}

fn check_square(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Validation(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_same_dim(a: &SystemDensityMatrix, b: &SystemDensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}
