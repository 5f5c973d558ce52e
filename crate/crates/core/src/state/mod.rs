//! Dense statevector simulation of weighted graph states and single-qubit
//! measurements.
//!
//! Vertex `k` is bit `k - 1` of an amplitude index. A Z outcome of `1` means
//! the qubit was found in `|1⟩`.

mod density;
mod frame;

pub use density::{DensityMatrix, DENSITY_LIMIT};
pub use frame::{gates, Axis, LocalFrame};

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};

/// Largest register for pure-state operations.
pub const DENSE_LIMIT: usize = 24;

pub(crate) const NORM_TOL: f64 = 1e-10;

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Equatorial measurement basis `{|α⟩, |α+π⟩}` with
/// `|α⟩ = (|0⟩ + e^{iα}|1⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneBasis {
    alpha: f64,
}

impl PlaneBasis {
    pub fn new(alpha: f64) -> Self {
        PlaneBasis {
            alpha: reduce_angle(alpha),
        }
    }

    /// Canonical angle in `[0, 2π)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Amplitudes of `|α⟩`.
    pub fn plus_state(&self) -> [Complex64; 2] {
        [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, self.alpha),
        ]
    }

    /// Amplitudes of `|α+π⟩`.
    pub fn minus_state(&self) -> [Complex64; 2] {
        PlaneBasis::new(self.alpha + PI).plus_state()
    }
}

/// Outcome of a plane measurement: `Plus` projects onto `|α⟩`, `Minus` onto
/// `|α+π⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneOutcome {
    Plus,
    Minus,
}

/// Pure n-qubit state with 2^n amplitudes.
///
/// Measured qubits stay in the register, pinned to their post-measurement
/// state, so vertex indices are stable through a protocol round. Measuring a
/// pinned qubit again is a state error.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
    pinned: usize,
}

impl StateVector {
    fn check_size(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::input("state needs at least one qubit"));
        }
        if n > DENSE_LIMIT {
            return Err(Error::capability(format!(
                "dense statevector limited to {DENSE_LIMIT} qubits, got {n}"
            )));
        }
        Ok(())
    }

    /// `|+⟩^{⊗n}`
    pub fn plus(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let a = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(StateVector {
            n,
            amps: vec![a; 1 << n],
            pinned: 0,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::check_size(n)?;
        if index >= 1 << n {
            return Err(Error::input(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps, pinned: 0 })
    }

    /// Wraps raw amplitudes; the squared norm must be 1 within 1e-10.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::input(format!(
                "expected {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        let s = StateVector { n, amps, pinned: 0 };
        if (s.norm_sqr() - 1.0).abs() > NORM_TOL {
            return Err(Error::input(format!(
                "state not normalized: |ψ|² = {}",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(n: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::input("cannot normalize a zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(n, amps)
    }

    /// The weighted graph state `|G⟩`: amplitude of `z` is
    /// `2^{-n/2} exp(i Σ_{(j,k)∈E} θ_jk z_j z_k)`.
    pub fn weighted_graph_state(g: &WeightedGraph) -> Result<Self> {
        let mut s = Self::plus(g.n())?;
        let edges: Vec<(usize, f64)> = g
            .edges()
            .map(|((j, k), t)| ((1 << (j - 1)) | (1 << (k - 1)), t))
            .collect();
        let scale = s.amps[0].re;
        for (z, a) in s.amps.iter_mut().enumerate() {
            let phase: f64 = edges
                .iter()
                .filter(|(mask, _)| z & mask == *mask)
                .map(|(_, t)| t)
                .sum();
            *a = Complex64::from_polar(scale, phase);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::input(format!(
                "qubit count mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn is_pinned(&self, k: Vertex) -> bool {
        k >= 1 && k <= self.n && self.pinned & (1 << (k - 1)) != 0
    }

    fn check_measurable(&self, k: Vertex) -> Result<usize> {
        if k == 0 || k > self.n {
            return Err(Error::input(format!(
                "vertex {k} out of range 1..={}",
                self.n
            )));
        }
        if self.is_pinned(k) {
            return Err(Error::State(format!("qubit {k} was already measured")));
        }
        Ok(1 << (k - 1))
    }

    /// Born probability of Z outcome 1 on vertex `k`.
    pub fn prob_one(&self, k: Vertex) -> Result<f64> {
        let bit = self.check_measurable(k)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Measures vertex `k` in the Z basis. The outcome is 0 for `|0⟩` and 1
    /// for `|1⟩`; the returned state is renormalized.
    pub fn measure_z<R: Rng + ?Sized>(mut self, k: Vertex, rng: &mut R) -> Result<(u8, Self)> {
        let bit = self.check_measurable(k)?;
        let p1 = self.prob_one(k)?;
        let outcome = u8::from(rng.random::<f64>() >= 1.0 - p1);
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p <= f64::MIN_POSITIVE {
            return Err(Error::State(format!(
                "Z outcome on qubit {k} has zero probability"
            )));
        }
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.pinned |= bit;
        Ok((outcome, self))
    }

    /// Born probability of the `Plus` outcome (projection onto `|α⟩`).
    pub fn prob_plane_plus(&self, k: Vertex, basis: PlaneBasis) -> Result<f64> {
        let bit = self.check_measurable(k)?;
        let rot = Complex64::from_polar(1.0, -basis.alpha());
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(i, a0)| 0.5 * (a0 + rot * self.amps[i | bit]).norm_sqr())
            .sum())
    }

    /// Measures vertex `k` in `{|α⟩, |α+π⟩}`.
    pub fn measure_plane<R: Rng + ?Sized>(
        mut self,
        k: Vertex,
        basis: PlaneBasis,
        rng: &mut R,
    ) -> Result<(PlaneOutcome, Self)> {
        let bit = self.check_measurable(k)?;
        let p_plus = self.prob_plane_plus(k, basis)?;
        let (outcome, sign, p) = if rng.random::<f64>() < p_plus {
            (PlaneOutcome::Plus, 1.0, p_plus)
        } else {
            (PlaneOutcome::Minus, -1.0, 1.0 - p_plus)
        };
        if p <= f64::MIN_POSITIVE {
            return Err(Error::State(format!(
                "plane outcome on qubit {k} has zero probability"
            )));
        }
        let rot = Complex64::from_polar(sign, -basis.alpha());
        let scale = 1.0 / p.sqrt();
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            // Component along the chosen basis state, then re-expanded.
            let c = 0.5 * (self.amps[i] + rot * self.amps[i | bit]) * scale;
            self.amps[i] = c;
            self.amps[i | bit] = c * rot.conj();
        }
        self.pinned |= bit;
        Ok((outcome, self))
    }

    /// Applies a 2×2 unitary to vertex `k`.
    pub(crate) fn apply_single(&mut self, k: Vertex, u: &nalgebra::Matrix2<Complex64>) {
        let bit = 1 << (k - 1);
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            self.amps[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
    }

    /// Applies `⊗_k U_k`. Pins are cleared since the frame moves qubits out
    /// of their measured states.
    pub fn apply_local_frame(mut self, frame: &LocalFrame) -> Result<Self> {
        if frame.n() != self.n {
            return Err(Error::input(format!(
                "frame has {} qubits, state has {}",
                frame.n(),
                self.n
            )));
        }
        for k in 1..=self.n {
            let u = frame.unitary(k);
            if !frame::is_identity(u) {
                self.apply_single(k, u);
            }
        }
        self.pinned = 0;
        Ok(self)
    }

    /// Applies the diagonal phase `exp(i φ(z))` entrywise.
    pub fn apply_diagonal(mut self, phase: impl Fn(usize) -> f64) -> Self {
        for (z, a) in self.amps.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, phase(z));
        }
        self
    }

    /// Text dump, one `index re im` line per amplitude in index order.
    pub fn to_dump(&self) -> String {
        let mut out = String::with_capacity(self.amps.len() * 48);
        for (i, a) in self.amps.iter().enumerate() {
            out.push_str(&format!("{i} {:?} {:?}\n", a.re, a.im));
        }
        out
    }

    /// Reads a dump written by [`StateVector::to_dump`].
    pub fn from_dump(text: &str) -> Result<Self> {
        let mut amps = Vec::new();
        for (lineno, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let t: Vec<&str> = line.split_whitespace().collect();
            let parsed = (t.len() == 3)
                .then(|| {
                    Some((
                        t[0].parse::<usize>().ok()?,
                        t[1].parse::<f64>().ok()?,
                        t[2].parse::<f64>().ok()?,
                    ))
                })
                .flatten();
            let Some((idx, re, im)) = parsed else {
                return Err(Error::input(format!("bad dump line {}", lineno + 1)));
            };
            if idx != amps.len() {
                return Err(Error::input(format!("dump index {idx} out of order")));
            }
            amps.push(Complex64::new(re, im));
        }
        if !amps.len().is_power_of_two() {
            return Err(Error::input("dump length is not a power of two"));
        }
        let n = amps.len().trailing_zeros() as usize;
        Self::from_amplitudes(n, amps)
    }
}

/// α_k(z) = Σ_{j∈C_k} θ_jk z_j reduced to `[0, 2π)`, where `z` supplies the
/// Z outcome of every neighbor of `k`.
pub fn alpha_expected(g: &WeightedGraph, k: Vertex, z: &BTreeMap<Vertex, u8>) -> Result<f64> {
    let mut a = 0.0;
    for &j in g.neighbors(k)? {
        match z.get(&j) {
            Some(0) => {}
            Some(1) => a += g.weight(j, k),
            Some(v) => {
                return Err(Error::input(format!(
                    "outcome {v} for vertex {j} is not 0/1"
                )))
            }
            None => {
                return Err(Error::input(format!(
                    "missing Z outcome for neighbor {j} of {k}"
                )))
            }
        }
    }
    Ok(reduce_angle(a))
}

/// α_k with neighbor outcomes read from the bits of `z` (bit `j - 1`).
pub(crate) fn alpha_from_bits(g: &WeightedGraph, k: Vertex, z: usize) -> f64 {
    let a: f64 = g
        .neighbors(k)
        .expect("vertex checked by caller")
        .iter()
        .filter(|&&j| z & (1 << (j - 1)) != 0)
        .map(|&j| g.weight(j, k))
        .sum();
    reduce_angle(a)
}

/// Either kind of state accepted by [`fidelity`].
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        StateRef::Mixed(s)
    }
}

/// `|⟨b|a⟩|²` for pure `a`, `⟨b|a|b⟩` for mixed `a`, clamped to `[0, 1]`.
pub fn fidelity<'a>(a: impl Into<StateRef<'a>>, b: &StateVector) -> Result<f64> {
    let f = match a.into() {
        StateRef::Pure(s) => b.inner(s)?.norm_sqr(),
        StateRef::Mixed(rho) => rho.expectation_pure(b)?,
    };
    Ok(f.clamp(0.0, 1.0))
}
