//! Mølmer–Sørensen graph states and IQP circuits as weighted graph states
//! up to local unitaries, their Z-basis output distributions, the Z_R
//! exponential sum, and the fidelity-to-l1 link.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::protocols::{copies_required, CopyPlan, PlanResource, ProtocolKind};
use crate::state::{gates, LocalFrame, StateVector};

/// Largest n for the brute-force Z_R sum.
pub const ZR_LIMIT: usize = 20;

/// A weighted graph state followed by a product of single-qubit unitaries
/// and a global phase: `e^{iφ} (⊗_i U_i) |G⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedGraphState {
    pub graph: WeightedGraph,
    pub frame: LocalFrame,
    pub global_phase: f64,
}

impl FramedGraphState {
    pub fn state(&self) -> Result<StateVector> {
        let s = StateVector::weighted_graph_state(&self.graph)?.apply_local_frame(&self.frame)?;
        let phase = self.global_phase;
        Ok(s.apply_diagonal(|_| phase))
    }
}

/// Graph with MS couplings θ_ij ∈ {π/8, π/4}.
#[derive(Debug, Clone, PartialEq)]
pub struct MsInstance {
    n: usize,
    edges: BTreeMap<(Vertex, Vertex), f64>,
}

impl MsInstance {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, f64)>,
    {
        let edges: Vec<(Vertex, Vertex, f64)> = edges.into_iter().collect();
        for &(j, k, t) in &edges {
            if (t - FRAC_PI_8).abs() > 1e-12 && (t - FRAC_PI_4).abs() > 1e-12 {
                return Err(Error::input(format!(
                    "MS coupling on ({j},{k}) must be π/8 or π/4, got {t}"
                )));
            }
        }
        // Reuses the graph checks for range, loops and duplicates.
        let g = WeightedGraph::from_edges(n, edges)?;
        Ok(MsInstance {
            n,
            edges: g.edges().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = ((Vertex, Vertex), f64)> + '_ {
        self.edges.iter().map(|(&e, &t)| (e, t))
    }
}

/// `e^{−iθZZ} = e^{−iθ} · diag(1, e^{2iθ})⊗diag(1, e^{2iθ}) · Λ(−4θ)`, so the
/// MS state is the weighted graph with θ'_ij = −4θ_ij (mod 2π) followed by
/// `U_i = diag(1, e^{2iΣ_j θ_ij})` and the global phase `−Σθ_ij`.
pub fn build_ms_state(inst: &MsInstance) -> Result<FramedGraphState> {
    let graph = WeightedGraph::from_edges(
        inst.n,
        inst.edges()
            .map(|((j, k), t)| (j, k, crate::state::reduce_angle(-4.0 * t))),
    )?;
    let mut shift = vec![0.0; inst.n];
    let mut global = 0.0;
    for ((j, k), t) in inst.edges() {
        shift[j - 1] += 2.0 * t;
        shift[k - 1] += 2.0 * t;
        global -= t;
    }
    let frame = LocalFrame::new(shift.into_iter().map(gates::phase).collect())?;
    Ok(FramedGraphState {
        graph,
        frame,
        global_phase: global,
    })
}

/// `∏ e^{−iθ_ij Z_i Z_j} |+⟩^{⊗n}` evaluated amplitude by amplitude.
pub fn ms_state_direct(inst: &MsInstance) -> Result<StateVector> {
    let edges: Vec<((Vertex, Vertex), f64)> = inst.edges().collect();
    let spin = |z: usize, v: Vertex| if z & (1 << (v - 1)) == 0 { 1.0 } else { -1.0 };
    Ok(StateVector::plus(inst.n)?.apply_diagonal(|z| {
        edges
            .iter()
            .map(|&((j, k), t)| -t * spin(z, j) * spin(z, k))
            .sum()
    }))
}

/// IQP instance with integer coefficients `w_jk, v_l ∈ {0, …, 7}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IqpInstance {
    n: usize,
    w: BTreeMap<(Vertex, Vertex), u8>,
    v: Vec<u8>,
}

impl IqpInstance {
    /// Zero coefficients may be listed or omitted.
    pub fn new<W, V>(n: usize, w: W, v: V) -> Result<Self>
    where
        W: IntoIterator<Item = (Vertex, Vertex, u8)>,
        V: IntoIterator<Item = (Vertex, u8)>,
    {
        if n == 0 {
            return Err(Error::input("IQP instance needs at least one qubit"));
        }
        let in_range = |x: Vertex| x >= 1 && x <= n;
        let mut inst = IqpInstance {
            n,
            w: BTreeMap::new(),
            v: vec![0; n],
        };
        for (j, k, val) in w {
            if !in_range(j) || !in_range(k) || j == k {
                return Err(Error::input(format!(
                    "invalid w pair ({j},{k}) for n = {n}"
                )));
            }
            if val > 7 {
                return Err(Error::input(format!("w_{j},{k} = {val} outside 0..=7")));
            }
            let key = (j.min(k), j.max(k));
            if inst.w.insert(key, val).is_some() {
                return Err(Error::input(format!(
                    "duplicate w entry ({},{})",
                    key.0, key.1
                )));
            }
        }
        let mut seen = vec![false; n];
        for (l, val) in v {
            if !in_range(l) {
                return Err(Error::input(format!("invalid v index {l} for n = {n}")));
            }
            if val > 7 {
                return Err(Error::input(format!("v_{l} = {val} outside 0..=7")));
            }
            if std::mem::replace(&mut seen[l - 1], true) {
                return Err(Error::input(format!("duplicate v entry {l}")));
            }
            inst.v[l - 1] = val;
        }
        inst.w.retain(|_, val| *val != 0);
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self, j: Vertex, k: Vertex) -> u8 {
        self.w.get(&(j.min(k), j.max(k))).copied().unwrap_or(0)
    }

    pub fn v(&self, l: Vertex) -> u8 {
        self.v[l - 1]
    }

    /// Nonzero `w` entries in ascending pair order.
    pub fn couplings(&self) -> impl Iterator<Item = ((Vertex, Vertex), u8)> + '_ {
        self.w.iter().map(|(&e, &x)| (e, x))
    }

    /// Text format: `n N`, then `w j k value` and `v l value` lines; `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_named(text, "<input>")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_named(&text, &path.display().to_string())
    }

    fn parse_named(text: &str, name: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: name.to_string(),
            line,
            msg,
        };
        let mut n = None;
        let mut w = Vec::new();
        let mut v = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(line_no, format!("expected an integer, got '{s}'")))
            };
            match fields.as_slice() {
                ["n", x] if n.is_none() => n = Some(num(x)?),
                ["n", _] => return Err(err(line_no, "repeated 'n' line".into())),
                _ if n.is_none() => return Err(err(line_no, "first entry must be 'n N'".into())),
                ["w", j, k, x] => w.push((num(j)?, num(k)?, num(x)?)),
                ["v", l, x] => v.push((num(l)?, num(x)?)),
                _ => return Err(err(line_no, format!("unrecognized line '{line}'"))),
            }
        }
        let n = n.ok_or_else(|| err(0, "missing 'n N' line".into()))?;
        let small = |x: usize| u8::try_from(x).unwrap_or(u8::MAX);
        Self::new(
            n,
            w.into_iter().map(|(j, k, x)| (j, k, small(x))),
            v.into_iter().map(|(l, x)| (l, small(x))),
        )
        .map_err(|e| Error::Parse {
            path: name.to_string(),
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for ((j, k), x) in self.couplings() {
            let _ = writeln!(out, "w {j} {k} {x}");
        }
        for (i, x) in self.v.iter().enumerate().filter(|(_, x)| **x != 0) {
            let _ = writeln!(out, "v {} {x}", i + 1);
        }
        out
    }

    /// Phase of the diagonal gate D at computational basis state `z`:
    /// `Σ_l v_l π/4 z_l + Σ_{j<k} w_jk (π/2 z_j z_k − π/4 z_j − π/4 z_k)`.
    fn diagonal_phase(&self, z: usize) -> f64 {
        let bit = |v: Vertex| ((z >> (v - 1)) & 1) as f64;
        let single: f64 = (1..=self.n)
            .map(|l| f64::from(self.v[l - 1]) * FRAC_PI_4 * bit(l))
            .sum();
        let pair: f64 = self
            .couplings()
            .map(|((j, k), x)| {
                f64::from(x)
                    * (FRAC_PI_2 * bit(j) * bit(k) - FRAC_PI_4 * bit(j) - FRAC_PI_4 * bit(k))
            })
            .sum();
        single + pair
    }
}

/// The IQP state as the weighted graph with θ_jk = w_jk π/2 followed by
/// `U_l = H · T^{v_l} · (T†)^{Σ_k w_lk}`.
pub fn build_iqp_state(inst: &IqpInstance) -> Result<FramedGraphState> {
    // w = 4 gives θ = 2π, which is no edge at all.
    let graph = WeightedGraph::from_edges(
        inst.n,
        inst.couplings()
            .filter(|(_, x)| x % 4 != 0)
            .map(|((j, k), x)| (j, k, f64::from(x % 4) * FRAC_PI_2)),
    )?;
    let mut t_power = inst.v.iter().map(|&x| i32::from(x)).collect::<Vec<_>>();
    for ((j, k), x) in inst.couplings() {
        t_power[j - 1] -= i32::from(x);
        t_power[k - 1] -= i32::from(x);
    }
    let frame = LocalFrame::new(
        t_power
            .into_iter()
            .map(|p| gates::hadamard() * gates::phase(f64::from(p.rem_euclid(8)) * FRAC_PI_4))
            .collect(),
    )?;
    Ok(FramedGraphState {
        graph,
        frame,
        global_phase: 0.0,
    })
}

/// `H^{⊗n} D H^{⊗n} |0⟩^{⊗n}` with D evaluated as a diagonal phase.
pub fn iqp_state_direct(inst: &IqpInstance) -> Result<StateVector> {
    let hadamards = LocalFrame::new(vec![gates::hadamard(); inst.n])?;
    StateVector::basis(inst.n, 0)?
        .apply_local_frame(&hadamards)?
        .apply_diagonal(|z| inst.diagonal_phase(z))
        .apply_local_frame(&hadamards)
}

/// `p_z = |⟨z|ψ⟩|²` indexed like the amplitudes.
pub fn output_distribution(state: &StateVector) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

fn check_distribution(p: &[f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if p.iter().any(|x| x.is_nan() || *x < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::input(format!(
            "not a probability vector (sum {total})"
        )));
    }
    Ok(())
}

/// `Σ_z |p_z − q_z|`
pub fn l1_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::input(format!(
            "distributions have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// `2√(1 − F)`: bound on the l1 distance between the Z-basis output
/// distributions of two states with fidelity F.
pub fn fidelity_to_l1_bound(fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::input(format!("fidelity {fidelity} outside [0, 1]")));
    }
    Ok(2.0 * (1.0 - fidelity).sqrt())
}

/// Bit string for amplitude index `z`, vertex 1 leftmost.
pub fn bit_string(z: usize, n: usize) -> String {
    (0..n)
        .map(|i| if z & (1 << i) != 0 { '1' } else { '0' })
        .collect()
}

/// One `bits probability` line per outcome, sorted by bit string.
pub fn format_distribution(p: &[f64], n: usize) -> String {
    let mut rows: Vec<(String, f64)> = p
        .iter()
        .enumerate()
        .map(|(z, &x)| (bit_string(z, n), x))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::new();
    for (s, x) in rows {
        let _ = writeln!(out, "{s} {x:?}");
    }
    out
}

/// `Z_R = Σ_{z∈{±1}^n} exp(iπ/8 (Σ_{j<k} w_jk z_j z_k + Σ_l v_l z_l))` by
/// brute force.
pub fn compute_z_r(inst: &IqpInstance) -> Result<Complex64> {
    if inst.n > ZR_LIMIT {
        return Err(Error::capability(format!(
            "Z_R brute force limited to n <= {ZR_LIMIT}, got {}",
            inst.n
        )));
    }
    // The exponent is an integer multiple of π/8; count hits per 16th root.
    let roots: Vec<Complex64> = (0..8)
        .map(|r| Complex64::from_polar(1.0, f64::from(r) * PI / 8.0))
        .collect();
    let couplings: Vec<((Vertex, Vertex), i64)> =
        inst.couplings().map(|(e, x)| (e, i64::from(x))).collect();
    let v: Vec<i64> = inst.v.iter().map(|&x| i64::from(x)).collect();
    let counts = (0..1usize << inst.n)
        .into_par_iter()
        .fold(
            || [0u64; 16],
            |mut acc, b| {
                let spin = |k: Vertex| 1 - 2 * ((b >> (k - 1)) & 1) as i64;
                let e: i64 = couplings
                    .iter()
                    .map(|&((j, k), x)| x * spin(j) * spin(k))
                    .sum::<i64>()
                    + v.iter()
                        .enumerate()
                        .map(|(l, &x)| x * spin(l + 1))
                        .sum::<i64>();
                acc[e.rem_euclid(16) as usize] += 1;
                acc
            },
        )
        .reduce(
            || [0u64; 16],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    // ω^{r+8} = −ω^r, so opposite roots cancel exactly in integer arithmetic.
    Ok((0..8)
        .map(|r| roots[r] * (counts[r] as i64 - counts[r + 8] as i64) as f64)
        .sum())
}

/// Copies needed to verify an IQP state to error ε: nonadaptive with exact
/// bases, e(k) ≤ 2 since every α_k is a multiple of π/2, and m ≤ n.
pub fn verification_params_iqp(n: usize, epsilon: f64, beta: f64) -> Result<CopyPlan> {
    copies_required(
        ProtocolKind::NonadaptiveE,
        n,
        n,
        epsilon,
        beta,
        PlanResource::MaxBases(2),
    )
}

/// As [`verification_params_iqp`] for MS graph states, with e(k) ≤ 8 for
/// angles that are multiples of π/8.
pub fn verification_params_ms(n: usize, epsilon: f64, beta: f64) -> Result<CopyPlan> {
    copies_required(
        ProtocolKind::NonadaptiveE,
        n,
        n,
        epsilon,
        beta,
        PlanResource::MaxBases(8),
    )
}
