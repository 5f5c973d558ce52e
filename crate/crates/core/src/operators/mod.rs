//! Dense test operators for the verification protocols, with spectral gaps
//! and operator norms from full Hermitian eigendecomposition.
//!
//! Every builder materializes a 2^n × 2^n matrix, so all of them are
//! limited to [`ORACLE_LIMIT`] qubits. The protocol runner never needs them;
//! they exist to certify the protocol formulas on small instances.

mod report;

pub use report::{certify, CertificateReport, FormulaCheck, GapRequest, Relation};

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{IndependenceCover, Vertex, WeightedGraph};
use crate::state::{alpha_from_bits, reduce_angle, StateVector};

/// Largest qubit count for dense operators.
pub const ORACLE_LIMIT: usize = 10;

/// Tolerance for eigenvalue-based certificates.
pub const EIGEN_TOL: f64 = 1e-10;

pub type Operator = DMatrix<Complex64>;

/// Which test operator a matrix realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Ω(𝒜): exact adaptive bases.
    AdaptiveExact,
    /// Ω_h(𝒜): adaptive bases rounded to the h-point grid.
    AdaptiveH,
    /// Ω̄(𝒜)_𝐡: exact bases, each hit with probability 1/h(k).
    NonadaptiveHvec,
    /// Ω̄_h(𝒜): grid bases, each vertex drawing its own grid basis.
    NonadaptiveH,
    /// Grid bases with one shared draw per copy.
    NonadaptiveHShared,
}

impl OperatorKind {
    /// Whether the operator is guaranteed to satisfy Ω ≥ |G⟩⟨G|.
    pub fn dominates_target(self) -> bool {
        matches!(
            self,
            OperatorKind::AdaptiveExact | OperatorKind::NonadaptiveHvec
        )
    }
}

/// A dense Hermitian test operator together with how it was built.
#[derive(Debug, Clone)]
pub struct TestOperator {
    n: usize,
    matrix: Operator,
    kind: OperatorKind,
}

impl TestOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// ⟨ψ|Ω|ψ⟩
    pub fn expectation(&self, s: &StateVector) -> Result<f64> {
        if s.n() != self.n {
            return Err(Error::input("state and operator differ in qubit count"));
        }
        let v = nalgebra::DVector::from_column_slice(s.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// Tr Ω
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Grid angle `jπ/h` picked by the half-open window
/// `jπ/h − π/(2h) ≤ α < jπ/h + π/(2h)`, with `j` reduced mod 2h.
///
/// The h hardware bases are `{|bπ/h⟩, |bπ/h + π⟩}` for `b = 1..=h`. A grid
/// angle lies in basis `b ≡ j (mod h)`; when `j < h` and `b = h`, or when
/// `j > h`, it is the second state `|bπ/h + π⟩` of that basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridAngle {
    index: u32,
    h: u32,
}

impl GridAngle {
    pub fn of(alpha: f64, h: u32) -> Result<Self> {
        if h == 0 {
            return Err(Error::config("number of bases h must be at least 1"));
        }
        let x = reduce_angle(alpha) * f64::from(h) / PI + 0.5;
        // Angles within 1e-9 grid units of a window edge sit on the edge.
        let j = if (x - x.round()).abs() < 1e-9 {
            x.round()
        } else {
            x.floor()
        };
        let index = (j as u64 % (2 * u64::from(h))) as u32;
        Ok(GridAngle { index, h })
    }

    /// The grid angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        f64::from(self.index) * PI / f64::from(self.h)
    }

    /// Hardware basis label in `1..=h`.
    pub fn basis_index(&self) -> u32 {
        match self.index % self.h {
            0 => self.h,
            b => b,
        }
    }

    /// Angle of the first state of the hardware basis, `bπ/h`.
    pub fn basis_angle(&self) -> f64 {
        f64::from(self.basis_index()) * PI / f64::from(self.h)
    }

    /// True when the grid state is `|bπ/h + π⟩` rather than `|bπ/h⟩`.
    pub fn is_second_element(&self) -> bool {
        reduce_angle(self.angle() - self.basis_angle()) > PI / 2.0
    }
}

/// `α^h`: the grid angle nearest α (see [`GridAngle`]), in `[0, 2π)`.
pub fn discretize_angle(alpha: f64, h: u32) -> Result<f64> {
    GridAngle::of(alpha, h).map(|g| g.angle())
}

/// `|α⟩⟨α|` as a 2×2 matrix.
pub fn plane_projector(alpha: f64) -> Matrix2<Complex64> {
    let e = Complex64::from_polar(0.5, alpha);
    Matrix2::new(
        Complex64::new(0.5, 0.0),
        e.conj(),
        e,
        Complex64::new(0.5, 0.0),
    )
}

/// Per-vertex check applied on A_l given the Z outcomes on A_l^c.
#[derive(Debug, Clone, Copy)]
enum LocalCheck {
    Exact,
    Grid(u32),
    /// (1/h)|α⟩⟨α| + (1 − 1/h) I
    Smeared(u32),
    SmearedGrid(u32),
}

fn local_block(check: LocalCheck, alpha: f64) -> Matrix2<Complex64> {
    let mix = |p: Matrix2<Complex64>, h: u32| {
        let w = 1.0 / f64::from(h);
        p * Complex64::new(w, 0.0) + Matrix2::identity() * Complex64::new(1.0 - w, 0.0)
    };
    match check {
        LocalCheck::Exact => plane_projector(alpha),
        LocalCheck::Grid(h) => plane_projector(GridAngle::of(alpha, h).unwrap().angle()),
        LocalCheck::Smeared(h) => mix(plane_projector(alpha), h),
        LocalCheck::SmearedGrid(h) => {
            mix(plane_projector(GridAngle::of(alpha, h).unwrap().angle()), h)
        }
    }
}

fn check_oracle(g: &WeightedGraph, cover: &IndependenceCover) -> Result<()> {
    if g.n() > ORACLE_LIMIT {
        return Err(Error::capability(format!(
            "dense test operators limited to n <= {ORACLE_LIMIT}, got {}",
            g.n()
        )));
    }
    cover.check_against(g)
}

/// Dense operator `Σ_{z on A_l^c} |z⟩⟨z| ⊗ ⊗_{k∈A_l} B_k(z)` where `block`
/// returns the 2×2 block for vertex `k` given the full index `z`.
fn block_diagonal_operator<F>(n: usize, part: &[Vertex], block: F) -> Operator
where
    F: Fn(Vertex, usize) -> Matrix2<Complex64>,
{
    let dim = 1usize << n;
    let mask: usize = part.iter().fold(0, |m, &v| m | (1 << (v - 1)));
    let mut out = DMatrix::zeros(dim, dim);
    let mut blocks: Vec<Matrix2<Complex64>> = Vec::with_capacity(part.len());
    for rest in (0..dim).filter(|z| z & mask == 0) {
        blocks.clear();
        blocks.extend(part.iter().map(|&k| block(k, rest)));
        // Iterate all (x, y) pairs that agree with `rest` off A_l.
        let mut ys = mask;
        loop {
            let y = rest | ys;
            let mut xs = mask;
            loop {
                let x = rest | xs;
                let mut entry = Complex64::new(1.0, 0.0);
                for (b, &k) in blocks.iter().zip(part) {
                    let bit = 1 << (k - 1);
                    entry *= b[((x & bit != 0) as usize, (y & bit != 0) as usize)];
                }
                out[(x, y)] = entry;
                if xs == 0 {
                    break;
                }
                xs = (xs - 1) & mask;
            }
            if ys == 0 {
                break;
            }
            ys = (ys - 1) & mask;
        }
    }
    out
}

fn average_over_parts(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    check: impl Fn(Vertex) -> LocalCheck,
) -> Operator {
    let dim = 1usize << g.n();
    let mut omega = DMatrix::zeros(dim, dim);
    for part in cover.parts() {
        omega += block_diagonal_operator(g.n(), part, |k, z| {
            local_block(check(k), alpha_from_bits(g, k, z))
        });
    }
    omega / Complex64::new(cover.m() as f64, 0.0)
}

/// `Q_k = Σ_z |α_k(z)⟩⟨α_k(z)|_k ⊗ |z⟩⟨z|_{A_l^c}`, identity on `A_l \ {k}`.
/// `l` is the 0-based part index.
pub fn build_projector_q(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    l: usize,
    k: Vertex,
) -> Result<Operator> {
    check_oracle(g, cover)?;
    if l >= cover.m() || !cover.part(l).contains(&k) {
        return Err(Error::input(format!("vertex {k} is not in part {}", l + 1)));
    }
    let part = cover.part(l);
    Ok(block_diagonal_operator(g.n(), part, |v, z| {
        if v == k {
            plane_projector(alpha_from_bits(g, v, z))
        } else {
            Matrix2::identity()
        }
    }))
}

/// `P_l = ∏_{k∈A_l} Q_k` (0-based `l`).
pub fn build_projector_p(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    l: usize,
) -> Result<Operator> {
    check_oracle(g, cover)?;
    if l >= cover.m() {
        return Err(Error::input(format!("part index {} out of range", l + 1)));
    }
    Ok(block_diagonal_operator(g.n(), cover.part(l), |k, z| {
        plane_projector(alpha_from_bits(g, k, z))
    }))
}

/// `Ω(𝒜) = Σ_l P_l / m`
pub fn build_omega_adaptive(g: &WeightedGraph, cover: &IndependenceCover) -> Result<TestOperator> {
    check_oracle(g, cover)?;
    Ok(TestOperator {
        n: g.n(),
        matrix: average_over_parts(g, cover, |_| LocalCheck::Exact),
        kind: OperatorKind::AdaptiveExact,
    })
}

/// `Ω_h(𝒜)`: as Ω(𝒜) with every α_k replaced by its grid angle α^h_k.
pub fn build_omega_adaptive_h(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    h: u32,
) -> Result<TestOperator> {
    check_oracle(g, cover)?;
    GridAngle::of(0.0, h)?;
    Ok(TestOperator {
        n: g.n(),
        matrix: average_over_parts(g, cover, |_| LocalCheck::Grid(h)),
        kind: OperatorKind::AdaptiveH,
    })
}

/// `Ω̄(𝒜)_𝐡 = Σ_l P̄_l / m` with `P̄_l = ∏_{k∈A_l}(Q_k/h(k) + (1 − 1/h(k)) I)`.
/// `hvec[k - 1]` is h(k).
pub fn build_omega_nonadaptive(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    hvec: &[u32],
) -> Result<TestOperator> {
    check_oracle(g, cover)?;
    check_hvec(g, hvec)?;
    Ok(TestOperator {
        n: g.n(),
        matrix: average_over_parts(g, cover, |k| LocalCheck::Smeared(hvec[k - 1])),
        kind: OperatorKind::NonadaptiveHvec,
    })
}

pub(crate) fn check_hvec(g: &WeightedGraph, hvec: &[u32]) -> Result<()> {
    if hvec.len() != g.n() {
        return Err(Error::input(format!(
            "expected {} entries in h vector, got {}",
            g.n(),
            hvec.len()
        )));
    }
    if hvec.contains(&0) {
        return Err(Error::input("every h(k) must be at least 1"));
    }
    Ok(())
}

/// `Ω̄_h(𝒜) = Σ_l P̄_{l;h} / m` with grid projectors `Q_{k;h}`.
pub fn build_omega_nonadaptive_h(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    h: u32,
) -> Result<TestOperator> {
    check_oracle(g, cover)?;
    GridAngle::of(0.0, h)?;
    Ok(TestOperator {
        n: g.n(),
        matrix: average_over_parts(g, cover, |_| LocalCheck::SmearedGrid(h)),
        kind: OperatorKind::NonadaptiveH,
    })
}

/// POVM element realized when all vertices of A_l share one uniformly drawn
/// grid basis F: `(1/h) Σ_F ⊗_k [F matches α^h_k ? Q_{k;h} : I]`.
pub fn build_omega_nonadaptive_h_shared(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    h: u32,
) -> Result<TestOperator> {
    check_oracle(g, cover)?;
    GridAngle::of(0.0, h)?;
    let dim = 1usize << g.n();
    let mut omega: Operator = DMatrix::zeros(dim, dim);
    for part in cover.parts() {
        for f in 1..=h {
            omega += block_diagonal_operator(g.n(), part, |k, z| {
                let grid = GridAngle::of(alpha_from_bits(g, k, z), h).unwrap();
                if grid.basis_index() == f {
                    plane_projector(grid.angle())
                } else {
                    Matrix2::identity()
                }
            });
        }
    }
    Ok(TestOperator {
        n: g.n(),
        matrix: omega / Complex64::new((cover.m() as u64 * u64::from(h)) as f64, 0.0),
        kind: OperatorKind::NonadaptiveHShared,
    })
}

/// Result of [`spectral_gap`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGap {
    /// ν = 1 − ‖Ω − |G⟩⟨G|‖
    pub value: f64,
    /// Smallest eigenvalue of Ω − |G⟩⟨G|.
    pub min_eigenvalue: f64,
    /// Whether Ω ≥ |G⟩⟨G| holds within [`EIGEN_TOL`]. When false the gap is
    /// still reported but does not carry its usual meaning.
    pub dominates: bool,
}

/// ν(Ω) = 1 − ‖Ω − |G⟩⟨G|‖ from the eigenvalues of Ω − |G⟩⟨G|.
pub fn spectral_gap(omega: &Operator, target: &StateVector) -> Result<SpectralGap> {
    let dim = target.dim();
    if omega.nrows() != dim || omega.ncols() != dim {
        return Err(Error::input(format!(
            "operator is {}×{}, state has dimension {dim}",
            omega.nrows(),
            omega.ncols()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(target.amplitudes());
    let diff = omega - &v * v.adjoint();
    let eig = diff.symmetric_eigenvalues();
    let max_abs = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let min = eig.min();
    Ok(SpectralGap {
        value: 1.0 - max_abs,
        min_eigenvalue: min,
        dominates: min >= -EIGEN_TOL,
    })
}

/// ‖A‖ = largest singular value; for Hermitian input, the largest |eigenvalue|.
pub fn operator_norm(a: &Operator) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::input(format!(
            "operator norm needs a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    let herm_dev = (a - a.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if herm_dev <= EIGEN_TOL {
        Ok(a.clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs())))
    } else {
        Ok(a.clone().singular_values().max())
    }
}

/// Whether `a` is Hermitian with spectrum inside `[−tol, 1 + tol]`.
pub fn is_effect(a: &Operator, tol: f64) -> bool {
    let herm_dev = (a - a.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if herm_dev > tol {
        return false;
    }
    let e = a.clone().symmetric_eigenvalues();
    e.min() >= -tol && e.max() <= 1.0 + tol
}

/// `(1 − sin²(π/4h))^{max_l |A_l|}`: honest pass probability floor for Ω_h.
pub fn adaptive_h_overlap_bound(h: u32, max_part: usize) -> f64 {
    (1.0 - (PI / (4.0 * f64::from(h))).sin().powi(2)).powi(max_part as i32)
}

/// `(Σ_l |A_l| / m) sin(π/4h)`: bound on ‖Ω_h − Ω‖.
pub fn adaptive_h_perturbation_bound(h: u32, cover: &IndependenceCover) -> f64 {
    cover.n() as f64 / cover.m() as f64 * (PI / (4.0 * f64::from(h))).sin()
}

/// `(1 − sin²(π/4h)/h)^{max_l |A_l|}`: honest pass probability floor for Ω̄_h.
pub fn nonadaptive_h_overlap_bound(h: u32, max_part: usize) -> f64 {
    let hf = f64::from(h);
    (1.0 - (PI / (4.0 * hf)).sin().powi(2) / hf).powi(max_part as i32)
}

/// `(Σ_l |A_l| / (m h)) sin(π/4h)`: bound on ‖Ω̄_h − Ω̄(𝒜)_h‖.
pub fn nonadaptive_h_perturbation_bound(h: u32, cover: &IndependenceCover) -> f64 {
    adaptive_h_perturbation_bound(h, cover) / f64::from(h)
}

/// 1/m
pub fn adaptive_gap_formula(cover: &IndependenceCover) -> f64 {
    1.0 / cover.m() as f64
}

/// 1/(m · max_k h(k))
pub fn nonadaptive_gap_formula(cover: &IndependenceCover, hvec: &[u32]) -> f64 {
    let hmax = hvec.iter().copied().max().unwrap_or(1);
    1.0 / (cover.m() as f64 * f64::from(hmax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Random graph with a random cover of exactly `m` parts.
    fn random_instance(
        rng: &mut ChaCha8Rng,
        n: usize,
        m: usize,
    ) -> (WeightedGraph, IndependenceCover) {
        let mut colors: Vec<usize> = (0..n)
            .map(|i| if i < m { i } else { rng.random_range(0..m) })
            .collect();
        for i in (1..n).rev() {
            colors.swap(i, rng.random_range(0..=i));
        }
        let mut edges = Vec::new();
        for j in 1..=n {
            for k in j + 1..=n {
                if colors[j - 1] != colors[k - 1] && rng.random_bool(0.6) {
                    edges.push((j, k, rng.random_range(0.05..TAU)));
                }
            }
        }
        let g = WeightedGraph::from_edges(n, edges).unwrap();
        let cover = IndependenceCover::from_colors(&g, &colors).unwrap();
        (g, cover)
    }

    /// Independent route: Ω(𝒜) = U (Σ_l ⊗_{k∈A_l}|+⟩⟨+|_k / m) U† with U the
    /// diagonal entangling unitary of |G⟩ = U|+⟩^{⊗n}.
    fn conjugated_omega(g: &WeightedGraph, cover: &IndependenceCover) -> Operator {
        let dim = 1usize << g.n();
        let plus = StateVector::plus(g.n()).unwrap();
        let gs = StateVector::weighted_graph_state(g).unwrap();
        let u: Vec<Complex64> = (0..dim)
            .map(|z| gs.amplitudes()[z] / plus.amplitudes()[z])
            .collect();
        let mut inner: Operator = DMatrix::zeros(dim, dim);
        for part in cover.parts() {
            let mask: usize = part.iter().fold(0, |a, &v| a | (1 << (v - 1)));
            let w = 0.5f64.powi(part.len() as i32);
            for y in 0..dim {
                for x in 0..dim {
                    if (x ^ y) & !mask == 0 {
                        inner[(x, y)] += c(w, 0.0);
                    }
                }
            }
        }
        let mut out = DMatrix::zeros(dim, dim);
        for x in 0..dim {
            for y in 0..dim {
                out[(x, y)] = u[x] * inner[(x, y)] * u[y].conj() / c(cover.m() as f64, 0.0);
            }
        }
        out
    }

    fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn discretize_examples() {
        assert_abs_diff_eq!(
            discretize_angle(FRAC_PI_4, 4).unwrap(),
            FRAC_PI_4,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            discretize_angle(7.0 * PI / 8.0, 4).unwrap(),
            PI,
            epsilon = 1e-15
        );
        assert_eq!(discretize_angle(0.3, 4).unwrap(), 0.0);
        assert!(discretize_angle(0.3, 0).is_err());
        // Just below 2π rounds to the 0 grid point.
        assert_eq!(discretize_angle(TAU - 1e-3, 4).unwrap(), 0.0);
    }

    #[test]
    fn discretize_window_membership() {
        // Oracle: scan all 2h grid points and pick the one whose window holds α.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5000 {
            let h = rng.random_range(1..=16u32);
            let alpha = rng.random_range(0.0..TAU);
            let step = PI / f64::from(h);
            let hit: Vec<u32> = (0..=2 * h)
                .filter(|&j| {
                    let c = f64::from(j) * step;
                    c - step / 2.0 <= alpha && alpha < c + step / 2.0
                })
                .collect();
            assert_eq!(hit.len(), 1);
            let expect = reduce_angle(f64::from(hit[0]) * step);
            assert_abs_diff_eq!(discretize_angle(alpha, h).unwrap(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_basis_labels() {
        // h = 1: basis {|π⟩, |2π⟩}; α = 0 is the second element.
        let g = GridAngle::of(0.0, 1).unwrap();
        assert_eq!(g.basis_index(), 1);
        assert!(g.is_second_element());
        let g = GridAngle::of(PI, 1).unwrap();
        assert!(!g.is_second_element());
        let g = GridAngle::of(5.0 * PI / 4.0, 4).unwrap();
        assert_eq!(g.basis_index(), 1);
        assert!(g.is_second_element());
        let g = GridAngle::of(3.0 * PI / 4.0, 4).unwrap();
        assert_eq!(g.basis_index(), 3);
        assert!(!g.is_second_element());
    }

    #[test]
    fn single_vertex_q_is_plus_projector() {
        let g = WeightedGraph::empty(1).unwrap();
        let cover = IndependenceCover::singletons(&g);
        let q = build_projector_q(&g, &cover, 0, 1).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_abs_diff_eq!(q[(i, j)].re, 0.5, epsilon = 1e-15);
        }
        let omega = build_omega_adaptive(&g, &cover).unwrap();
        let s = StateVector::weighted_graph_state(&g).unwrap();
        assert_abs_diff_eq!(
            spectral_gap(omega.matrix(), &s).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn two_path_q_matrix_by_hand() {
        // θ = π, A_2 = {2}: Q_2 = Σ_{z1} |z1⟩⟨z1| ⊗ |z1 π⟩⟨z1 π|.
        let g = WeightedGraph::from_edges(2, [(1, 2, PI)]).unwrap();
        let cover = IndependenceCover::singletons(&g);
        let q = build_projector_q(&g, &cover, 1, 2).unwrap();
        // Index = z1 + 2 z2.
        let mut expect = DMatrix::<Complex64>::zeros(4, 4);
        for (z1, sign) in [(0usize, 1.0), (1, -1.0)] {
            expect[(z1, z1)] = c(0.5, 0.0);
            expect[(z1 + 2, z1 + 2)] = c(0.5, 0.0);
            expect[(z1, z1 + 2)] = c(0.5 * sign, 0.0);
            expect[(z1 + 2, z1)] = c(0.5 * sign, 0.0);
        }
        assert!(max_abs_diff(&q, &expect) < 1e-15);
        assert!(build_projector_q(&g, &cover, 0, 2).is_err());
    }

    #[test]
    fn q_is_projector_and_p_terms_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (g, cover) = random_instance(&mut rng, 5, 3);
            for l in 0..cover.m() {
                for &k in cover.part(l) {
                    let q = build_projector_q(&g, &cover, l, k).unwrap();
                    assert!(max_abs_diff(&(&q * &q), &q) < 1e-10);
                }
            }
            let p: Vec<Operator> = (0..cover.m())
                .map(|l| build_projector_p(&g, &cover, l).unwrap())
                .collect();
            for a in &p {
                for b in &p {
                    assert!(max_abs_diff(&(a * b), &(b * a)) < 1e-10);
                }
            }
        }
    }

    /// P(B) = ∏_{k∉B}(I − P_k) ∏_{j∈B} P_j over subsets B of the parts.
    fn p_of_subset(p: &[Operator], b: usize) -> Operator {
        let dim = p[0].nrows();
        let mut out = DMatrix::identity(dim, dim);
        for (l, pl) in p.iter().enumerate() {
            out = if b & (1 << l) != 0 {
                out * pl
            } else {
                out * (DMatrix::identity(dim, dim) - pl)
            };
        }
        out
    }

    #[test]
    fn subset_projectors_resolve_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for m in 2..=4 {
            let (g, cover) = random_instance(&mut rng, 6, m);
            let p: Vec<Operator> = (0..m)
                .map(|l| build_projector_p(&g, &cover, l).unwrap())
                .collect();
            let dim = p[0].nrows();
            let all: Vec<Operator> = (0..1usize << m).map(|b| p_of_subset(&p, b)).collect();
            let total = all.iter().fold(DMatrix::zeros(dim, dim), |acc, x| acc + x);
            assert!(max_abs_diff(&total, &DMatrix::identity(dim, dim)) < 1e-10);
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let prod = a * b;
                    if i == j {
                        assert!(max_abs_diff(&prod, a) < 1e-10);
                    } else {
                        assert!(prod.iter().all(|c| c.norm() < 1e-10));
                    }
                }
            }
            // P([m]) = |G⟩⟨G|
            let gs = StateVector::weighted_graph_state(&g).unwrap();
            let v = nalgebra::DVector::from_column_slice(gs.amplitudes());
            assert!(max_abs_diff(&all[(1 << m) - 1], &(&v * v.adjoint())) < 1e-10);
        }
    }

    /// Q(B) over subsets of one part: completeness and orthogonality.
    #[test]
    fn part_subset_projectors_resolve_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (g, cover) = random_instance(&mut rng, 6, 2);
        let l = (0..2).max_by_key(|&l| cover.part(l).len()).unwrap();
        let q: Vec<Operator> = cover
            .part(l)
            .iter()
            .map(|&k| build_projector_q(&g, &cover, l, k).unwrap())
            .collect();
        let dim = q[0].nrows();
        let all: Vec<Operator> = (0..1usize << q.len()).map(|b| p_of_subset(&q, b)).collect();
        let total = all.iter().fold(DMatrix::zeros(dim, dim), |acc, x| acc + x);
        assert!(max_abs_diff(&total, &DMatrix::identity(dim, dim)) < 1e-10);
        for (i, a) in all.iter().enumerate() {
            for b in all.iter().skip(i + 1) {
                assert!((a * b).iter().all(|c| c.norm() < 1e-10));
            }
        }
    }

    #[test]
    fn adaptive_omega_matches_conjugated_form_and_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for trial in 0..20 {
            let m = 2 + trial % 3;
            let (g, cover) = random_instance(&mut rng, m + trial % 4, m);
            let omega = build_omega_adaptive(&g, &cover).unwrap();
            assert!(max_abs_diff(omega.matrix(), &conjugated_omega(&g, &cover)) < 1e-12);
            let gs = StateVector::weighted_graph_state(&g).unwrap();
            let gap = spectral_gap(omega.matrix(), &gs).unwrap();
            assert!(gap.dominates);
            assert_abs_diff_eq!(gap.value, 1.0 / m as f64, epsilon = 1e-10);
            assert_abs_diff_eq!(omega.expectation(&gs).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn three_path_gap_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let g = WeightedGraph::from_edges(
            3,
            [
                (1, 2, rng.random_range(0.1..6.0)),
                (2, 3, rng.random_range(0.1..6.0)),
            ],
        )
        .unwrap();
        let cover = IndependenceCover::new(&g, vec![vec![1, 3], vec![2]]).unwrap();
        let omega = build_omega_adaptive(&g, &cover).unwrap();
        let gs = StateVector::weighted_graph_state(&g).unwrap();
        assert_abs_diff_eq!(
            spectral_gap(omega.matrix(), &gs).unwrap().value,
            0.5,
            epsilon = 1e-10
        );
    }

    #[test]
    fn nonadaptive_reduces_and_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..10 {
            let (g, cover) = random_instance(&mut rng, 5, 2);
            let gs = StateVector::weighted_graph_state(&g).unwrap();
            let ones = vec![1; g.n()];
            let a = build_omega_adaptive(&g, &cover).unwrap();
            let b = build_omega_nonadaptive(&g, &cover, &ones).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-14);
            let h4 = vec![4; g.n()];
            let c4 = build_omega_nonadaptive(&g, &cover, &h4).unwrap();
            let gap = spectral_gap(c4.matrix(), &gs).unwrap();
            assert!(gap.dominates);
            assert_abs_diff_eq!(gap.value, 0.125, epsilon = 1e-10);
            let hv: Vec<u32> = (0..g.n()).map(|_| rng.random_range(1..=5)).collect();
            let cv = build_omega_nonadaptive(&g, &cover, &hv).unwrap();
            let gap = spectral_gap(cv.matrix(), &gs).unwrap();
            assert_abs_diff_eq!(
                gap.value,
                nonadaptive_gap_formula(&cover, &hv),
                epsilon = 1e-10
            );
        }
        let g = WeightedGraph::empty(2).unwrap();
        let cover = IndependenceCover::singletons(&g);
        assert!(build_omega_nonadaptive(&g, &cover, &[1, 0]).is_err());
        assert!(build_omega_nonadaptive(&g, &cover, &[1]).is_err());
    }

    #[test]
    fn grid_aligned_operators_coincide_with_exact() {
        // Weights that are multiples of π/4 give α on the h = 4 grid.
        let g = WeightedGraph::from_edges(
            4,
            [
                (1, 2, PI / 4.0),
                (2, 3, 3.0 * PI / 4.0),
                (3, 4, PI / 2.0),
                (1, 4, PI),
            ],
        )
        .unwrap();
        let cover = IndependenceCover::new(&g, vec![vec![1, 3], vec![2, 4]]).unwrap();
        let exact = build_omega_adaptive(&g, &cover).unwrap();
        let grid = build_omega_adaptive_h(&g, &cover, 4).unwrap();
        assert!(max_abs_diff(exact.matrix(), grid.matrix()) < 1e-12);
        let hv = build_omega_nonadaptive(&g, &cover, &[4; 4]).unwrap();
        let hg = build_omega_nonadaptive_h(&g, &cover, 4).unwrap();
        assert!(max_abs_diff(hv.matrix(), hg.matrix()) < 1e-12);
    }

    #[test]
    fn lemma_bounds_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..12 {
            let (g, cover) = random_instance(&mut rng, 4 + trial % 3, 2 + trial % 3);
            let gs = StateVector::weighted_graph_state(&g).unwrap();
            let exact = build_omega_adaptive(&g, &cover).unwrap();
            for h in [1u32, 2, 4, 8] {
                let oh = build_omega_adaptive_h(&g, &cover, h).unwrap();
                assert!(is_effect(oh.matrix(), 1e-10));
                let ov = oh.expectation(&gs).unwrap();
                assert!(ov >= adaptive_h_overlap_bound(h, cover.max_part_size()) - 1e-9);
                let d = operator_norm(&(oh.matrix() - exact.matrix())).unwrap();
                assert!(d <= adaptive_h_perturbation_bound(h, &cover) + 1e-9);

                let smeared = build_omega_nonadaptive(&g, &cover, &vec![h; g.n()]).unwrap();
                let nh = build_omega_nonadaptive_h(&g, &cover, h).unwrap();
                assert!(is_effect(nh.matrix(), 1e-10));
                assert!(
                    nh.expectation(&gs).unwrap()
                        >= nonadaptive_h_overlap_bound(h, cover.max_part_size()) - 1e-9
                );
                let d = operator_norm(&(nh.matrix() - smeared.matrix())).unwrap();
                assert!(d <= nonadaptive_h_perturbation_bound(h, &cover) + 1e-9);
                let shared = build_omega_nonadaptive_h_shared(&g, &cover, h).unwrap();
                assert!(is_effect(shared.matrix(), 1e-10));
            }
        }
    }

    #[test]
    fn shared_draw_equals_per_vertex_for_singleton_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let (g, _) = random_instance(&mut rng, 4, 4);
        let cover = IndependenceCover::singletons(&g);
        let a = build_omega_nonadaptive_h(&g, &cover, 3).unwrap();
        let b = build_omega_nonadaptive_h_shared(&g, &cover, 3).unwrap();
        assert!(max_abs_diff(a.matrix(), b.matrix()) < 1e-12);
    }

    #[test]
    fn single_qubit_projector_distance() {
        // ‖|α⟩⟨α| − |α'⟩⟨α'|‖ = |sin((α − α')/2)|
        let d = plane_projector(0.0) - plane_projector(PI / 4.0);
        let dm = DMatrix::from_iterator(2, 2, d.iter().copied());
        assert_abs_diff_eq!(
            operator_norm(&dm).unwrap(),
            (PI / 8.0).sin(),
            epsilon = 1e-14
        );
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10_000 {
            let alpha = rng.random_range(0.0..TAU);
            let h = rng.random_range(1..=64u32);
            let a_h = discretize_angle(alpha, h).unwrap();
            let d = plane_projector(alpha) - plane_projector(a_h);
            let dm = DMatrix::from_iterator(2, 2, d.iter().copied());
            assert!(operator_norm(&dm).unwrap() <= (PI / (4.0 * f64::from(h))).sin() + 1e-12);
        }
    }

    #[test]
    fn operator_norm_basics() {
        assert_abs_diff_eq!(
            operator_norm(&DMatrix::identity(4, 4)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(operator_norm(&DMatrix::zeros(4, 4)).unwrap(), 0.0);
        assert!(operator_norm(&DMatrix::zeros(2, 3)).is_err());
        // Non-Hermitian: [[0, 2], [0, 0]] has norm 2.
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = c(2.0, 0.0);
        assert_abs_diff_eq!(operator_norm(&a).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn gap_of_target_projector_is_one() {
        let g = WeightedGraph::from_edges(3, [(1, 2, 0.3), (2, 3, 1.2)]).unwrap();
        let gs = StateVector::weighted_graph_state(&g).unwrap();
        let v = nalgebra::DVector::from_column_slice(gs.amplitudes());
        let proj = &v * v.adjoint();
        assert_abs_diff_eq!(
            spectral_gap(&proj, &gs).unwrap().value,
            1.0,
            epsilon = 1e-12
        );
        assert!(spectral_gap(&DMatrix::identity(4, 4), &gs).is_err());
    }

    #[test]
    fn convergence_along_powers_of_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let (g, cover) = random_instance(&mut rng, 5, 3);
        let exact = build_omega_adaptive(&g, &cover).unwrap();
        let mut prev_bound = f64::INFINITY;
        for t in 0..7 {
            let h = 1u32 << t;
            let d = operator_norm(
                &(build_omega_adaptive_h(&g, &cover, h).unwrap().matrix() - exact.matrix()),
            )
            .unwrap();
            let bound = adaptive_h_perturbation_bound(h, &cover);
            assert!(d <= bound + 1e-9);
            assert!(bound < prev_bound);
            prev_bound = bound;
        }
    }

    #[test]
    fn oracle_cap() {
        let g = WeightedGraph::empty(ORACLE_LIMIT + 1).unwrap();
        let cover = IndependenceCover::singletons(&g);
        assert!(matches!(
            build_omega_adaptive(&g, &cover),
            Err(Error::Capability(_))
        ));
    }
}
