use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Vertex;

const UNITARY_TOL: f64 = 1e-10;

/// Pauli axis for single-qubit rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Common single-qubit gates.
pub mod gates {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn identity() -> Matrix2<Complex64> {
        Matrix2::identity()
    }

    pub fn hadamard() -> Matrix2<Complex64> {
        let h = FRAC_1_SQRT_2;
        Matrix2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))
    }

    /// `diag(1, e^{iφ})`
    pub fn phase(phi: f64) -> Matrix2<Complex64> {
        Matrix2::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, phi),
        )
    }

    /// `T = diag(1, e^{iπ/4})`
    pub fn t() -> Matrix2<Complex64> {
        phase(FRAC_PI_4)
    }

    pub fn pauli(axis: Axis) -> Matrix2<Complex64> {
        match axis {
            Axis::X => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
            Axis::Y => Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
            Axis::Z => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        }
    }

    /// `exp(−i δ σ_axis / 2)`
    pub fn rotation(axis: Axis, delta: f64) -> Matrix2<Complex64> {
        let (cs, sn) = ((delta / 2.0).cos(), (delta / 2.0).sin());
        identity() * c(cs, 0.0) - pauli(axis) * c(0.0, sn)
    }
}

pub(crate) fn is_identity(u: &Matrix2<Complex64>) -> bool {
    (u - Matrix2::identity()).iter().all(|c| c.norm() == 0.0)
}

fn check_unitary(u: &Matrix2<Complex64>) -> Result<()> {
    let dev = (u.adjoint() * u - Matrix2::identity())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if dev > UNITARY_TOL || !dev.is_finite() {
        return Err(Error::input(format!(
            "matrix is not unitary (deviation {dev:e})"
        )));
    }
    Ok(())
}

/// A product of single-qubit unitaries `⊗_k U_k`, one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrame {
    unitaries: Vec<Matrix2<Complex64>>,
}

impl LocalFrame {
    pub fn new(unitaries: Vec<Matrix2<Complex64>>) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::input("frame needs at least one qubit"));
        }
        for u in &unitaries {
            check_unitary(u)?;
        }
        Ok(LocalFrame { unitaries })
    }

    pub fn identity(n: usize) -> Self {
        LocalFrame {
            unitaries: vec![Matrix2::identity(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitary(&self, k: Vertex) -> &Matrix2<Complex64> {
        &self.unitaries[k - 1]
    }

    /// `⊗_k U_k^†`
    pub fn adjoint(&self) -> Self {
        LocalFrame {
            unitaries: self.unitaries.iter().map(Matrix2::adjoint).collect(),
        }
    }

    /// Left-multiplies `u` onto the unitary at vertex `k` (apply after).
    pub fn then_apply(&mut self, k: Vertex, u: &Matrix2<Complex64>) -> Result<()> {
        check_unitary(u)?;
        let slot = self
            .unitaries
            .get_mut(k.wrapping_sub(1))
            .ok_or_else(|| Error::input(format!("vertex {k} outside frame")))?;
        *slot = u * *slot;
        Ok(())
    }
}
