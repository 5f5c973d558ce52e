//! Producers of the copies handed to the verifier.
//!
//! Honest sources emit the target graph state. The adversarial ones model
//! noise, miscalibrated gates and copies that are not i.i.d., such as a
//! single planted bad copy or a fixed multiset in random order.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Vertex, WeightedGraph};
use crate::state::{gates, Axis, DensityMatrix, LocalFrame, StateVector, DENSITY_LIMIT};

/// A stream of n-qubit states. Successive copies may be arbitrarily
/// correlated; nothing is assumed about their joint distribution.
pub trait StateSource: Send {
    fn n(&self) -> usize;

    /// Produces the next copy. Fails once the source is exhausted.
    fn next_copy(&mut self, rng: &mut dyn RngCore) -> Result<StateVector>;

    /// The single-copy density matrix when copies are i.i.d. and small
    /// enough to materialize.
    fn iid_density(&self) -> Option<DensityMatrix> {
        None
    }
}

/// A single state relative to a target graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// The target graph state |G⟩.
    Target,
    /// `|+⟩^{⊗n}`
    Plus,
    /// `Z_v|G⟩`, orthogonal to |G⟩.
    PhaseFlip { vertex: Vertex },
    /// Computational basis state with the given amplitude index.
    Basis { index: usize },
    /// Graph state with θ_jk shifted by `delta` (a missing edge gets weight `delta`).
    WrongWeight { edge: (Vertex, Vertex), delta: f64 },
    /// `exp(−iδσ/2)` on every qubit of |G⟩.
    Rotated { axis: Axis, delta: f64 },
}

impl StateSpec {
    pub fn build(&self, g: &WeightedGraph) -> Result<StateVector> {
        match self {
            StateSpec::Target => StateVector::weighted_graph_state(g),
            StateSpec::Plus => StateVector::plus(g.n()),
            StateSpec::PhaseFlip { vertex } => {
                g.check_vertex(*vertex)
                    .map_err(|e| Error::Config(e.to_string()))?;
                let mut frame = LocalFrame::identity(g.n());
                frame.then_apply(*vertex, &gates::pauli(Axis::Z))?;
                StateVector::weighted_graph_state(g)?.apply_local_frame(&frame)
            }
            StateSpec::Basis { index } => {
                StateVector::basis(g.n(), *index).map_err(|e| Error::Config(e.to_string()))
            }
            StateSpec::WrongWeight {
                edge: (j, k),
                delta,
            } => {
                if !delta.is_finite() {
                    return Err(Error::config("weight perturbation must be finite"));
                }
                let perturbed = g
                    .with_weight(*j, *k, g.weight(*j, *k) + delta)
                    .map_err(|e| Error::Config(e.to_string()))?;
                StateVector::weighted_graph_state(&perturbed)
            }
            StateSpec::Rotated { axis, delta } => {
                if !delta.is_finite() {
                    return Err(Error::config("rotation angle must be finite"));
                }
                let frame = LocalFrame::new(vec![gates::rotation(*axis, *delta); g.n()])?;
                StateVector::weighted_graph_state(g)?.apply_local_frame(&frame)
            }
        }
    }
}

/// One term of an i.i.d. mixture source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleComponent {
    pub weight: f64,
    pub state: StateSpec,
}

/// Serializable description of a source, as found in run manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    /// Every copy is |G⟩.
    Honest,
    /// Every copy is the same given state.
    Fixed { state: StateSpec },
    /// i.i.d. copies of `(1 − p)|G⟩⟨G| + p I/2^n`.
    Depolarized { p: f64 },
    /// i.i.d. copies of |G⟩ rotated on every qubit.
    Rotated { axis: Axis, delta: f64 },
    /// i.i.d. copies of a graph state with one weight off by `delta`.
    WrongWeight { edge: (Vertex, Vertex), delta: f64 },
    /// Honest copies except the one at 1-based `position`.
    PlantedBad { position: usize, bad: StateSpec },
    /// Exactly the listed N + 1 states, in uniformly random order.
    PermutedIid { states: Vec<StateSpec> },
    /// i.i.d. draws from a finite mixture.
    Ensemble { components: Vec<EnsembleComponent> },
}

enum Emitter {
    Fixed(StateVector),
    Depolarized {
        target: StateVector,
        p: f64,
    },
    Planted {
        honest: StateVector,
        bad: StateVector,
        position: usize,
    },
    Permuted {
        states: Vec<StateVector>,
        shuffled: bool,
    },
    Ensemble {
        states: Vec<StateVector>,
        weights: Vec<f64>,
        index: WeightedIndex<f64>,
    },
}

/// Source built from a [`SourceSpec`], limited to N + 1 copies.
pub struct SpecSource {
    n: usize,
    capacity: usize,
    emitted: usize,
    emitter: Emitter,
}

/// Builds the source for a run testing `copies` = N copies.
pub fn make_source(
    spec: &SourceSpec,
    g: &WeightedGraph,
    copies: usize,
) -> Result<Box<dyn StateSource>> {
    Ok(Box::new(SpecSource::new(spec, g, copies)?))
}

impl SpecSource {
    pub fn new(spec: &SourceSpec, g: &WeightedGraph, copies: usize) -> Result<Self> {
        let capacity = copies + 1;
        let emitter = match spec {
            SourceSpec::Honest => Emitter::Fixed(StateVector::weighted_graph_state(g)?),
            SourceSpec::Fixed { state } => Emitter::Fixed(state.build(g)?),
            SourceSpec::Depolarized { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::config(format!(
                        "depolarizing probability {p} outside [0, 1]"
                    )));
                }
                Emitter::Depolarized {
                    target: StateVector::weighted_graph_state(g)?,
                    p: *p,
                }
            }
            SourceSpec::Rotated { axis, delta } => Emitter::Fixed(
                StateSpec::Rotated {
                    axis: *axis,
                    delta: *delta,
                }
                .build(g)?,
            ),
            SourceSpec::WrongWeight { edge, delta } => Emitter::Fixed(
                StateSpec::WrongWeight {
                    edge: *edge,
                    delta: *delta,
                }
                .build(g)?,
            ),
            SourceSpec::PlantedBad { position, bad } => {
                if !(1..=capacity).contains(position) {
                    return Err(Error::config(format!(
                        "planted position {position} outside 1..={capacity}"
                    )));
                }
                Emitter::Planted {
                    honest: StateVector::weighted_graph_state(g)?,
                    bad: bad.build(g)?,
                    position: *position,
                }
            }
            SourceSpec::PermutedIid { states } => {
                if states.len() != capacity {
                    return Err(Error::config(format!(
                        "permuted source needs exactly {capacity} states, got {}",
                        states.len()
                    )));
                }
                Emitter::Permuted {
                    states: states.iter().map(|s| s.build(g)).collect::<Result<_>>()?,
                    shuffled: false,
                }
            }
            SourceSpec::Ensemble { components } => {
                let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
                let total: f64 = weights.iter().sum();
                if components.is_empty()
                    || weights.iter().any(|w| w.is_nan() || *w < 0.0)
                    || (total - 1.0).abs() > 1e-9
                {
                    return Err(Error::config(
                        "ensemble weights must be nonnegative and sum to 1",
                    ));
                }
                let index =
                    WeightedIndex::new(&weights).map_err(|e| Error::config(e.to_string()))?;
                Emitter::Ensemble {
                    states: components
                        .iter()
                        .map(|c| c.state.build(g))
                        .collect::<Result<_>>()?,
                    weights,
                    index,
                }
            }
        };
        Ok(SpecSource {
            n: g.n(),
            capacity,
            emitted: 0,
            emitter,
        })
    }

    /// Copies left before the source is exhausted.
    pub fn remaining(&self) -> usize {
        self.capacity - self.emitted
    }
}

impl StateSource for SpecSource {
    fn n(&self) -> usize {
        self.n
    }

    fn next_copy(&mut self, rng: &mut dyn RngCore) -> Result<StateVector> {
        if self.emitted >= self.capacity {
            return Err(Error::Source(format!(
                "source exhausted after {} copies",
                self.capacity
            )));
        }
        self.emitted += 1;
        let copy = match &mut self.emitter {
            Emitter::Fixed(s) => s.clone(),
            Emitter::Depolarized { target, p } => {
                // I/2^n is the uniform mixture of computational basis states.
                if rng.random_bool(*p) {
                    StateVector::basis(self.n, rng.random_range(0..1usize << self.n))?
                } else {
                    target.clone()
                }
            }
            Emitter::Planted {
                honest,
                bad,
                position,
            } => {
                if self.emitted == *position {
                    bad.clone()
                } else {
                    honest.clone()
                }
            }
            Emitter::Permuted { states, shuffled } => {
                if !*shuffled {
                    states.shuffle(rng);
                    *shuffled = true;
                }
                states[self.emitted - 1].clone()
            }
            Emitter::Ensemble { states, index, .. } => states[index.sample(rng)].clone(),
        };
        Ok(copy)
    }

    fn iid_density(&self) -> Option<DensityMatrix> {
        if self.n > DENSITY_LIMIT {
            return None;
        }
        match &self.emitter {
            Emitter::Fixed(s) => DensityMatrix::from_pure(s).ok(),
            Emitter::Depolarized { target, p } => DensityMatrix::depolarized(target, *p).ok(),
            Emitter::Ensemble {
                states, weights, ..
            } => {
                let comps: Vec<(f64, StateVector)> = weights
                    .iter()
                    .copied()
                    .zip(states.iter().cloned())
                    .collect();
                DensityMatrix::mixture(&comps).ok()
            }
            Emitter::Planted { .. } | Emitter::Permuted { .. } => None,
        }
    }
}

/// Emits a caller-supplied sequence of states in order.
pub struct SequenceSource {
    n: usize,
    states: std::vec::IntoIter<StateVector>,
}

impl SequenceSource {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        let n = states
            .first()
            .map(StateVector::n)
            .ok_or_else(|| Error::config("empty state sequence"))?;
        if states.iter().any(|s| s.n() != n) {
            return Err(Error::config(
                "states in a sequence must have equal qubit counts",
            ));
        }
        Ok(SequenceSource {
            n,
            states: states.into_iter(),
        })
    }
}

impl StateSource for SequenceSource {
    fn n(&self) -> usize {
        self.n
    }

    fn next_copy(&mut self, _rng: &mut dyn RngCore) -> Result<StateVector> {
        self.states
            .next()
            .ok_or_else(|| Error::Source("state sequence exhausted".into()))
    }
}

/// Undoes a local frame on every copy of an inner source: a copy of
/// `(⊗U_i)|G⟩` comes out as `|G⟩`. This is how states that are weighted graph
/// states up to local unitaries are fed to the graph-state protocols.
pub struct FrameCorrected {
    inner: Box<dyn StateSource>,
    undo: LocalFrame,
}

impl FrameCorrected {
    pub fn new(inner: Box<dyn StateSource>, frame: &LocalFrame) -> Result<Self> {
        if frame.n() != inner.n() {
            return Err(Error::config(format!(
                "frame on {} qubits, source emits {}",
                frame.n(),
                inner.n()
            )));
        }
        Ok(FrameCorrected {
            inner,
            undo: frame.adjoint(),
        })
    }
}

impl StateSource for FrameCorrected {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn next_copy(&mut self, rng: &mut dyn RngCore) -> Result<StateVector> {
        self.inner.next_copy(rng)?.apply_local_frame(&self.undo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::fidelity;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn graph() -> WeightedGraph {
        WeightedGraph::from_edges(3, [(1, 2, 0.9), (2, 3, 1.7)]).unwrap()
    }

    #[test]
    fn honest_copies_have_unit_fidelity() {
        let g = graph();
        let target = StateVector::weighted_graph_state(&g).unwrap();
        let mut src = make_source(&SourceSpec::Honest, &g, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let c = src.next_copy(&mut rng).unwrap();
            assert_abs_diff_eq!(fidelity(&c, &target).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert!(matches!(src.next_copy(&mut rng), Err(Error::Source(_))));
    }

    #[test]
    fn fully_depolarized_density_fidelity() {
        let g = WeightedGraph::from_edges(2, [(1, 2, 0.5)]).unwrap();
        let src = SpecSource::new(&SourceSpec::Depolarized { p: 1.0 }, &g, 1).unwrap();
        let rho = src.iid_density().unwrap();
        let any = StateVector::weighted_graph_state(&g).unwrap();
        assert_abs_diff_eq!(fidelity(&rho, &any).unwrap(), 0.25, epsilon = 1e-14);
        assert!(SpecSource::new(&SourceSpec::Depolarized { p: 1.5 }, &g, 1).is_err());
    }

    #[test]
    fn depolarized_trajectories_average_to_density() {
        let g = graph();
        let p = 0.3;
        let mut src = SpecSource::new(&SourceSpec::Depolarized { p }, &g, 19_999).unwrap();
        let target = StateVector::weighted_graph_state(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mean: f64 = (0..20_000)
            .map(|_| fidelity(&src.next_copy(&mut rng).unwrap(), &target).unwrap())
            .sum::<f64>()
            / 20_000.0;
        let expect = (1.0 - p) + p / 8.0;
        assert!((mean - expect).abs() < 0.02, "{mean} vs {expect}");
    }

    #[test]
    fn planted_copy_position() {
        let g = graph();
        let target = StateVector::weighted_graph_state(&g).unwrap();
        let spec = SourceSpec::PlantedBad {
            position: 3,
            bad: StateSpec::PhaseFlip { vertex: 2 },
        };
        let mut src = make_source(&spec, &g, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..5)
            .map(|_| fidelity(&src.next_copy(&mut rng).unwrap(), &target).unwrap())
            .collect();
        assert_abs_diff_eq!(f[2], 0.0, epsilon = 1e-14);
        assert!(f
            .iter()
            .enumerate()
            .all(|(i, &x)| i == 2 || (x - 1.0).abs() < 1e-14));
        assert!(src.iid_density().is_none());
        let spec = SourceSpec::PlantedBad {
            position: 6,
            bad: StateSpec::Plus,
        };
        assert!(make_source(&spec, &g, 4).is_err());
    }

    #[test]
    fn permuted_source_emits_multiset() {
        let g = graph();
        let states: Vec<StateSpec> = (0..4).map(|i| StateSpec::Basis { index: i }).collect();
        let spec = SourceSpec::PermutedIid { states };
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut src = make_source(&spec, &g, 3).unwrap();
        let mut seen: Vec<usize> = (0..4)
            .map(|_| {
                let c = src.next_copy(&mut rng).unwrap();
                c.amplitudes().iter().position(|a| a.norm() > 0.5).unwrap()
            })
            .collect();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2, 3]);
        assert!(make_source(&spec, &g, 4).is_err());
    }

    #[test]
    fn ensemble_density_and_validation() {
        let g = WeightedGraph::empty(1).unwrap();
        let spec = SourceSpec::Ensemble {
            components: vec![
                EnsembleComponent {
                    weight: 0.25,
                    state: StateSpec::Basis { index: 0 },
                },
                EnsembleComponent {
                    weight: 0.75,
                    state: StateSpec::Target,
                },
            ],
        };
        let rho = SpecSource::new(&spec, &g, 1)
            .unwrap()
            .iid_density()
            .unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.25 + 0.375, epsilon = 1e-14);
        let bad = SourceSpec::Ensemble {
            components: vec![EnsembleComponent {
                weight: 0.5,
                state: StateSpec::Target,
            }],
        };
        assert!(make_source(&bad, &g, 1).is_err());
    }

    #[test]
    fn state_specs() {
        let g = graph();
        let target = StateVector::weighted_graph_state(&g).unwrap();
        let flip = StateSpec::PhaseFlip { vertex: 1 }.build(&g).unwrap();
        assert_abs_diff_eq!(fidelity(&flip, &target).unwrap(), 0.0, epsilon = 1e-14);
        let same = StateSpec::WrongWeight {
            edge: (1, 2),
            delta: 0.0,
        }
        .build(&g)
        .unwrap();
        assert_abs_diff_eq!(fidelity(&same, &target).unwrap(), 1.0, epsilon = 1e-14);
        // A Z rotation by δ on one qubit of |+⟩: fidelity cos²(δ/2).
        let g1 = WeightedGraph::empty(1).unwrap();
        let r = StateSpec::Rotated {
            axis: Axis::Z,
            delta: 0.6,
        }
        .build(&g1)
        .unwrap();
        assert_abs_diff_eq!(
            fidelity(&r, &StateVector::plus(1).unwrap()).unwrap(),
            0.3f64.cos().powi(2),
            epsilon = 1e-14
        );
        assert!(StateSpec::PhaseFlip { vertex: 9 }.build(&g).is_err());
        assert!(StateSpec::Basis { index: 8 }.build(&g).is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = SourceSpec::PlantedBad {
            position: 2,
            bad: StateSpec::WrongWeight {
                edge: (1, 2),
                delta: 0.5,
            },
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SourceSpec>(&text).unwrap(), spec);
        let toml_spec: SourceSpec = toml::from_str("kind = \"depolarized\"\np = 0.1\n").unwrap();
        assert_eq!(toml_spec, SourceSpec::Depolarized { p: 0.1 });
    }

    #[test]
    fn sequence_source() {
        let mut src = SequenceSource::new(vec![StateVector::plus(2).unwrap(); 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(src.next_copy(&mut rng).is_ok());
        assert!(src.next_copy(&mut rng).is_ok());
        assert!(src.next_copy(&mut rng).is_err());
        assert!(SequenceSource::new(vec![]).is_err());
    }

    #[test]
    fn frame_correction_recovers_graph_state() {
        let g = graph();
        let frame = LocalFrame::new(vec![
            gates::hadamard(),
            gates::t(),
            gates::rotation(Axis::Y, 0.3),
        ])
        .unwrap();
        let framed = StateVector::weighted_graph_state(&g)
            .unwrap()
            .apply_local_frame(&frame)
            .unwrap();
        let inner = SequenceSource::new(vec![framed]).unwrap();
        let mut src = FrameCorrected::new(Box::new(inner), &frame).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let out = src.next_copy(&mut rng).unwrap();
        let target = StateVector::weighted_graph_state(&g).unwrap();
        assert_abs_diff_eq!(fidelity(&out, &target).unwrap(), 1.0, epsilon = 1e-14);
        assert!(FrameCorrected::new(
            Box::new(SequenceSource::new(vec![StateVector::plus(1).unwrap()]).unwrap()),
            &frame
        )
        .is_err());
    }
}
