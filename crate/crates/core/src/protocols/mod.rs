//! Measurement-only verification protocols and the N-random sampling test.
//!
//! A run draws N + 1 copies from an untrusted [`StateSource`], withholds one
//! uniformly at random, runs the per-copy test on the other N and accepts
//! iff all of them pass. An accepted run carries a lower bound on the
//! fidelity of the withheld copy with the target graph state.

mod bounds;

pub use crate::sources::StateSource;
pub use bounds::{
    certificate_bound, completeness_bound, copies_required, sampling_tail_bound, BoundInputs,
    CopyPlan, PlanResource,
};
pub use copy_test::{
    test_copy_adaptive_exact, test_copy_adaptive_h, test_copy_nonadaptive_e,
    test_copy_nonadaptive_h, CandidateBases, CopyRecord, VertexCheck, CANDIDATE_DEGREE_LIMIT,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{IndependenceCover, WeightedGraph};
use crate::operators::{self, TestOperator};
use crate::state::StateVector;

/// The four protocol families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    AdaptiveExact,
    AdaptiveH,
    NonadaptiveE,
    NonadaptiveH,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::AdaptiveExact,
        ProtocolKind::AdaptiveH,
        ProtocolKind::NonadaptiveE,
        ProtocolKind::NonadaptiveH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::AdaptiveExact => "adaptive_exact",
            ProtocolKind::AdaptiveH => "adaptive_h",
            ProtocolKind::NonadaptiveE => "nonadaptive_e",
            ProtocolKind::NonadaptiveH => "nonadaptive_h",
        }
    }

    /// Accepts both `snake_case` and `kebab-case` spellings.
    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::config(format!("unknown protocol '{s}'")))
    }
}

/// A protocol with its basis-resource parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    AdaptiveExact,
    AdaptiveH {
        h: u32,
    },
    NonadaptiveE(CandidateBases),
    /// `shared_draw` selects one basis label per copy instead of one per
    /// vertex. Only the per-vertex draw realizes the product-form operator.
    NonadaptiveH {
        h: u32,
        shared_draw: bool,
    },
}

impl Protocol {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            Protocol::AdaptiveExact => ProtocolKind::AdaptiveExact,
            Protocol::AdaptiveH { .. } => ProtocolKind::AdaptiveH,
            Protocol::NonadaptiveE(_) => ProtocolKind::NonadaptiveE,
            Protocol::NonadaptiveH { .. } => ProtocolKind::NonadaptiveH,
        }
    }

    /// h, max_k e(k), or 0 for the exact adaptive protocol.
    pub fn resource(&self) -> u32 {
        match self {
            Protocol::AdaptiveExact => 0,
            Protocol::AdaptiveH { h } | Protocol::NonadaptiveH { h, .. } => *h,
            Protocol::NonadaptiveE(c) => c.max_count() as u32,
        }
    }

    pub(crate) fn validate(&self, g: &WeightedGraph) -> Result<()> {
        match self {
            Protocol::AdaptiveH { h } | Protocol::NonadaptiveH { h, .. } if *h == 0 => {
                Err(Error::config("number of bases h must be at least 1"))
            }
            Protocol::NonadaptiveE(c) if c.n() != g.n() => Err(Error::config(format!(
                "candidate lists cover {} vertices, graph has {}",
                c.n(),
                g.n()
            ))),
            _ => Ok(()),
        }
    }

    /// Dense operator realized by the per-copy test (n ≤ 10).
    pub fn test_operator(
        &self,
        g: &WeightedGraph,
        cover: &IndependenceCover,
    ) -> Result<TestOperator> {
        match self {
            Protocol::AdaptiveExact => operators::build_omega_adaptive(g, cover),
            Protocol::AdaptiveH { h } => operators::build_omega_adaptive_h(g, cover, *h),
            Protocol::NonadaptiveE(c) => operators::build_omega_nonadaptive(g, cover, &c.counts()),
            Protocol::NonadaptiveH {
                h,
                shared_draw: false,
            } => operators::build_omega_nonadaptive_h(g, cover, *h),
            Protocol::NonadaptiveH {
                h,
                shared_draw: true,
            } => operators::build_omega_nonadaptive_h_shared(g, cover, *h),
        }
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    protocol: Protocol,
    cover: IndependenceCover,
    copies: usize,
    beta: f64,
}

impl ProtocolConfig {
    /// Checks the cover against `g`, the protocol parameters and the β
    /// precondition of the certificate.
    pub fn new(
        g: &WeightedGraph,
        cover: IndependenceCover,
        protocol: Protocol,
        copies: usize,
        beta: f64,
    ) -> Result<Self> {
        cover.check_against(g)?;
        protocol.validate(g)?;
        let cfg = ProtocolConfig {
            protocol,
            cover,
            copies,
            beta,
        };
        cfg.bound_inputs().validate()?;
        Ok(cfg)
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn kind(&self) -> ProtocolKind {
        self.protocol.kind()
    }

    pub fn cover(&self) -> &IndependenceCover {
        &self.cover
    }

    /// N, the number of tested copies.
    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn bound_inputs(&self) -> BoundInputs {
        BoundInputs {
            kind: self.kind(),
            n: self.cover.n(),
            m: self.cover.m(),
            max_part: self.cover.max_part_size(),
            copies: self.copies,
            beta: self.beta,
            resource: self.protocol.resource(),
        }
    }

    pub fn certificate(&self) -> Certificate {
        let bound = certificate_bound(&self.bound_inputs()).expect("validated at construction");
        Certificate {
            bound,
            beta: self.beta,
            informative: bound > 0.0,
        }
    }

    pub fn completeness_bound(&self) -> f64 {
        completeness_bound(&self.bound_inputs())
    }
}

/// Fidelity lower bound for the withheld copy, holding at significance β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub bound: f64,
    pub beta: f64,
    /// False when the bound is ≤ 0 and certifies nothing.
    pub informative: bool,
}

/// Result of [`run_random_sampling_test`].
#[derive(Debug, Clone)]
pub struct ProtocolReport {
    pub accepted: bool,
    /// 1-based position of the withheld copy among the N + 1 drawn.
    pub withheld: usize,
    /// One record per tested copy, in draw order.
    pub transcript: Vec<CopyRecord>,
    /// Present iff the run was accepted.
    pub certificate: Option<Certificate>,
    /// Predicted acceptance probability for an honest i.i.d. source.
    pub completeness_bound: f64,
    /// The untested copy, to be used by the caller.
    pub remaining_copy: StateVector,
}

impl ProtocolReport {
    pub fn failed_copies(&self) -> usize {
        self.transcript.iter().filter(|r| !r.passed).count()
    }
}

/// The N-random sampling test: draws N + 1 copies, withholds a uniformly
/// random one and tests the rest. Accepts iff all N tested copies pass.
pub fn run_random_sampling_test<R: Rng>(
    src: &mut dyn StateSource,
    g: &WeightedGraph,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolReport> {
    if src.n() != g.n() {
        return Err(Error::config(format!(
            "source emits {} qubits, graph has {}",
            src.n(),
            g.n()
        )));
    }
    cfg.cover.check_against(g)?;
    let total = cfg.copies + 1;
    let withheld = rng.random_range(0..total);
    let mut transcript = Vec::with_capacity(cfg.copies);
    let mut remaining = None;
    for i in 0..total {
        let copy = src.next_copy(rng)?;
        if copy.n() != g.n() {
            return Err(Error::Source(format!(
                "copy {} has {} qubits, expected {}",
                i + 1,
                copy.n(),
                g.n()
            )));
        }
        if i == withheld {
            remaining = Some(copy);
        } else {
            transcript.push(copy_test::run_copy(
                copy,
                g,
                &cfg.cover,
                &cfg.protocol,
                rng,
            )?);
        }
    }
    let accepted = transcript.iter().all(|r| r.passed);
    Ok(ProtocolReport {
        accepted,
        withheld: withheld + 1,
        transcript,
        certificate: accepted.then(|| cfg.certificate()),
        completeness_bound: cfg.completeness_bound(),
        remaining_copy: remaining.expect("withheld index is below the copy count"),
    })
}
