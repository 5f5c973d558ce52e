//! Instance generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use wgverify::{IndependenceCover, StateVector, WeightedGraph};

/// Random edge weight; a third of the time a multiple of π/4 so grid ties occur.
pub fn random_weight<R: Rng>(rng: &mut R) -> f64 {
    if rng.random_bool(0.3) {
        f64::from(rng.random_range(1..8u32)) * FRAC_PI_4
    } else {
        rng.random_range(0.05..2.0 * PI - 0.05)
    }
}

/// Random m-partite weighted graph on `n ≥ m` vertices with its m-part cover.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    edge_prob: f64,
) -> (WeightedGraph, IndependenceCover) {
    assert!(n >= m);
    let mut colors: Vec<usize> = (0..n)
        .map(|i| if i < m { i } else { rng.random_range(0..m) })
        .collect();
    colors.shuffle(rng);
    let mut edges = Vec::new();
    for j in 1..=n {
        for k in j + 1..=n {
            if colors[j - 1] != colors[k - 1] && rng.random_bool(edge_prob) {
                edges.push((j, k, random_weight(rng)));
            }
        }
    }
    let g = WeightedGraph::from_edges(n, edges).unwrap();
    let cover = IndependenceCover::from_colors(&g, &colors).unwrap();
    (g, cover)
}

fn bit(z: usize, v: usize) -> f64 {
    ((z >> (v - 1)) & 1) as f64
}

/// `Σ_{j<k} θ_jk z_j z_k`, the phase of `⟨z|G⟩` relative to `⟨z|+^n⟩`.
pub fn graph_phase(g: &WeightedGraph, z: usize) -> f64 {
    g.edges().map(|((j, k), t)| t * bit(z, j) * bit(z, k)).sum()
}

/// `|G⟩` from the amplitude formula `2^{-n/2} e^{iφ(z)}`.
pub fn graph_state_oracle(g: &WeightedGraph) -> Vec<Complex64> {
    let dim = 1usize << g.n();
    let a = (dim as f64).sqrt().recip();
    (0..dim)
        .map(|z| Complex64::from_polar(a, graph_phase(g, z)))
        .collect()
}

/// Adaptive exact-basis test operator in conjugated form:
/// `U (1/m Σ_l ⊗_{k∈A_l} |+⟩⟨+| ⊗ I) U†` with `U = diag(e^{iφ(z)})`.
pub fn omega_oracle(g: &WeightedGraph, cover: &IndependenceCover) -> DMatrix<Complex64> {
    let dim = 1usize << g.n();
    let m = cover.m() as f64;
    let phase: Vec<f64> = (0..dim).map(|z| graph_phase(g, z)).collect();
    DMatrix::from_fn(dim, dim, |x, y| {
        let mut s = 0.0;
        for l in 0..cover.m() {
            let mask = cover
                .part(l)
                .iter()
                .fold(0usize, |acc, &v| acc | (1 << (v - 1)));
            if (x ^ y) & !mask == 0 {
                s += 0.5f64.powi(cover.part(l).len() as i32);
            }
        }
        Complex64::from_polar(s / m, phase[x] - phase[y])
    })
}

/// Normalized state with independent uniform real and imaginary parts.
pub fn random_state<R: Rng>(rng: &mut R, n: usize) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(n, amps).unwrap()
}

/// `|⟨a|b⟩|²` from raw amplitudes.
pub fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

/// `ψ ↦ ⟨ψ|A|ψ⟩` for a Hermitian matrix.
pub fn quadratic_form(a: &DMatrix<Complex64>, psi: &[Complex64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    (v.adjoint() * a * &v)[(0, 0)].re
}

/// Binomial standard deviation of a rate estimated from `runs` trials.
pub fn binomial_sigma(p: f64, runs: usize) -> f64 {
    (p * (1.0 - p) / runs as f64).sqrt()
}
