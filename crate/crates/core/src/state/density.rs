use nalgebra::DMatrix;
use num_complex::Complex64;

use super::StateVector;
use crate::error::{Error, Result};

/// Largest register for which density matrices are materialized.
pub const DENSITY_LIMIT: usize = 10;

const HERMITIAN_TOL: f64 = 1e-10;

/// Mixed n-qubit state as a dense 2^n × 2^n matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: DMatrix<Complex64>,
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input("state needs at least one qubit"));
    }
    if n > DENSITY_LIMIT {
        return Err(Error::capability(format!(
            "density matrices limited to {DENSITY_LIMIT} qubits, got {n}"
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (eigenvalue floor
    /// −1e-10).
    pub fn from_matrix(n: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        check_size(n)?;
        let d = 1 << n;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::input(format!("expected {d}×{d} matrix")));
        }
        let herm_err = (&mat - mat.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if herm_err > HERMITIAN_TOL {
            return Err(Error::input(format!(
                "matrix not Hermitian (deviation {herm_err:e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::input(format!("trace {tr} is not 1")));
        }
        let min_eig = mat.clone().symmetric_eigenvalues().min();
        if min_eig < -HERMITIAN_TOL {
            return Err(Error::input(format!(
                "matrix not positive (eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix { n, mat })
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_pure(s: &StateVector) -> Result<Self> {
        check_size(s.n())?;
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        Ok(DensityMatrix {
            n: s.n(),
            mat: &v * v.adjoint(),
        })
    }

    /// `I / 2^n`
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_size(n)?;
        let d = 1 << n;
        Ok(DensityMatrix {
            n,
            mat: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        })
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`; the weights must be nonnegative and sum to 1.
    pub fn mixture(components: &[(f64, StateVector)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::input("empty mixture"));
        };
        let n = first.n();
        check_size(n)?;
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if components.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::input(
                "mixture weights must be nonnegative and sum to 1",
            ));
        }
        let d = 1 << n;
        let mut mat = DMatrix::zeros(d, d);
        for (p, s) in components {
            if s.n() != n {
                return Err(Error::input("mixture components differ in qubit count"));
            }
            let v = nalgebra::DVector::from_column_slice(s.amplitudes());
            mat += (&v * v.adjoint()) * Complex64::new(*p, 0.0);
        }
        Ok(DensityMatrix { n, mat })
    }

    /// `(1 − p)|ψ⟩⟨ψ| + p I/2^n`
    pub fn depolarized(s: &StateVector, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!(
                "depolarizing probability {p} outside [0,1]"
            )));
        }
        let pure = Self::from_pure(s)?;
        let mixed = Self::maximally_mixed(s.n())?;
        Ok(DensityMatrix {
            n: s.n(),
            mat: pure.mat * Complex64::new(1.0 - p, 0.0) + mixed.mat * Complex64::new(p, 0.0),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Re Tr(ρ A) for a Hermitian `A` of matching dimension.
    pub fn expectation(&self, a: &DMatrix<Complex64>) -> Result<f64> {
        if a.shape() != self.mat.shape() {
            return Err(Error::input("operator dimension does not match state"));
        }
        // Tr(ρA) = Σ_ij ρ_ij A_ji
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.mat.nrows() {
            for j in 0..self.mat.ncols() {
                acc += self.mat[(i, j)] * a[(j, i)];
            }
        }
        Ok(acc.re)
    }

    /// `⟨b|ρ|b⟩`
    pub fn expectation_pure(&self, b: &StateVector) -> Result<f64> {
        if b.n() != self.n {
            return Err(Error::input(format!(
                "qubit count mismatch: {} vs {}",
                self.n,
                b.n()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(b.amplitudes());
        Ok((v.adjoint() * &self.mat * &v)[(0, 0)].re)
    }

    /// Z-basis outcome distribution `⟨z|ρ|z⟩`.
    pub fn z_distribution(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|c| c.re).collect()
    }
}
