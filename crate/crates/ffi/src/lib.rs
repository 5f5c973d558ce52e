//! C interface to the `wgverify` toolkit.
//!
//! Graphs and covers are opaque handles created by `wgv_*` constructors and
//! released with the matching `_free` function. Every fallible call returns
//! a [`WgvStatus`]; on failure the message is available from
//! [`wgv_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wgverify::graph::greedy_cover;
use wgverify::operators::{build_omega_adaptive, build_omega_nonadaptive, spectral_gap};
use wgverify::protocols::{
    certificate_bound, copies_required, run_random_sampling_test, BoundInputs, CandidateBases,
    PlanResource, Protocol, ProtocolConfig, ProtocolKind,
};
use wgverify::sources::{make_source, SourceSpec};
use wgverify::{Error, IndependenceCover, StateVector, WeightedGraph};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgvStatus {
    Ok = 0,
    NullPointer = 1,
    Input = 2,
    Capability = 3,
    Config = 4,
    State = 5,
    Source = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WgvProtocolKind {
    AdaptiveExact = 0,
    AdaptiveH = 1,
    NonadaptiveE = 2,
    NonadaptiveH = 3,
}

impl From<WgvProtocolKind> for ProtocolKind {
    fn from(k: WgvProtocolKind) -> Self {
        match k {
            WgvProtocolKind::AdaptiveExact => ProtocolKind::AdaptiveExact,
            WgvProtocolKind::AdaptiveH => ProtocolKind::AdaptiveH,
            WgvProtocolKind::NonadaptiveE => ProtocolKind::NonadaptiveE,
            WgvProtocolKind::NonadaptiveH => ProtocolKind::NonadaptiveH,
        }
    }
}

/// Opaque weighted graph.
pub struct WgvGraph(WeightedGraph);

/// Opaque independence cover.
pub struct WgvCover(IndependenceCover);

/// Settings for [`wgv_run`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WgvRunParams {
    pub kind: WgvProtocolKind,
    /// Basis count for the grid protocols; ignored otherwise.
    pub h: u32,
    /// One basis label per copy instead of per vertex (nonadaptive_h only).
    pub shared_draw: bool,
    /// Tested copies N.
    pub copies: usize,
    pub beta: f64,
    /// Depolarizing probability of the simulated source; 0 is honest.
    pub noise: f64,
    pub seed: u64,
    /// RNG stream, so that runs sharing a seed stay independent.
    pub stream: u64,
}

/// Outcome of [`wgv_run`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WgvRunResult {
    pub accepted: bool,
    /// 1-based position of the withheld copy.
    pub withheld: usize,
    pub failed_copies: usize,
    /// Fidelity lower bound; NaN when the run was rejected.
    pub certificate: f64,
    pub completeness_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> WgvStatus {
    match e {
        Error::Capability(_) => WgvStatus::Capability,
        Error::Config(_) => WgvStatus::Config,
        Error::State(_) => WgvStatus::State,
        Error::Source(_) => WgvStatus::Source,
        Error::Input(_) | Error::Parse { .. } | Error::Io(_) => WgvStatus::Input,
    }
}

/// Runs `f`, recording any error or panic for [`wgv_last_error`].
fn guard(f: impl FnOnce() -> Result<(), WgvStatusError>) -> WgvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WgvStatus::Ok,
        Ok(Err(WgvStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WgvStatus::Panic
        }
    }
}

struct WgvStatusError(WgvStatus, String);

impl From<Error> for WgvStatusError {
    fn from(e: Error) -> Self {
        WgvStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> WgvStatusError {
    WgvStatusError(WgvStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, WgvStatusError> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the buffer size needed for the full message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn wgv_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}

/// Parses a graph in text format (`n N`, `edge j k angle`).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_graph_parse(
    text: *const c_char,
    out: *mut *mut WgvGraph,
) -> WgvStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| WgvStatusError(WgvStatus::Input, "graph text is not UTF-8".into()))?;
        let g = wgverify::graph::parse_graph(s)?;
        *out = Box::into_raw(Box::new(WgvGraph(g)));
        Ok(())
    })
}

/// Builds a graph from parallel arrays of 1-based endpoints and weights.
///
/// # Safety
/// `j`, `k` and `theta` must be valid for `edges` reads (or null when
/// `edges` is 0); `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_graph_from_edges(
    n: usize,
    j: *const usize,
    k: *const usize,
    theta: *const f64,
    edges: usize,
    out: *mut *mut WgvGraph,
) -> WgvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let list = if edges == 0 {
            Vec::new()
        } else {
            if j.is_null() || k.is_null() || theta.is_null() {
                return Err(null("edge array"));
            }
            let (j, k, t) = (
                std::slice::from_raw_parts(j, edges),
                std::slice::from_raw_parts(k, edges),
                std::slice::from_raw_parts(theta, edges),
            );
            (0..edges).map(|i| (j[i], k[i], t[i])).collect()
        };
        *out = Box::into_raw(Box::new(WgvGraph(WeightedGraph::from_edges(n, list)?)));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from a `wgv_graph_*` constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wgv_graph_free(g: *mut WgvGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn wgv_graph_vertex_count(g: *const WgvGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Writes the 2^n amplitudes of the graph state as interleaved (re, im)
/// pairs. `*needed` receives the required length in doubles; a short
/// buffer yields `BufferTooSmall` without writing.
///
/// # Safety
/// `g` must be a live graph handle; `buf` valid for `len` doubles or null;
/// `needed` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_graph_state(
    g: *const WgvGraph,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> WgvStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let s = StateVector::weighted_graph_state(&g.0)?;
        let need = 2 * s.dim();
        if let Some(n) = needed.as_mut() {
            *n = need;
        }
        if buf.is_null() || len < need {
            return Err(WgvStatusError(
                WgvStatus::BufferTooSmall,
                format!("need {need} doubles, got {len}"),
            ));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (i, a) in s.amplitudes().iter().enumerate() {
            out[2 * i] = a.re;
            out[2 * i + 1] = a.im;
        }
        Ok(())
    })
}

/// Greedy cover in vertex order.
///
/// # Safety
/// `g` must be a live graph handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_cover_greedy(
    g: *const WgvGraph,
    out: *mut *mut WgvCover,
) -> WgvStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let order: Vec<usize> = g.0.vertices().collect();
        *out = Box::into_raw(Box::new(WgvCover(greedy_cover(&g.0, &order)?)));
        Ok(())
    })
}

/// Cover from 0-based colors, one per vertex.
///
/// # Safety
/// `g` must be a live graph handle; `colors` valid for `len` reads; `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_cover_from_colors(
    g: *const WgvGraph,
    colors: *const usize,
    len: usize,
    out: *mut *mut WgvCover,
) -> WgvStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        if colors.is_null() {
            return Err(null("colors"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let colors = std::slice::from_raw_parts(colors, len);
        *out = Box::into_raw(Box::new(WgvCover(IndependenceCover::from_colors(
            &g.0, colors,
        )?)));
        Ok(())
    })
}

/// Number of parts m, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live cover handle.
#[no_mangle]
pub unsafe extern "C" fn wgv_cover_part_count(c: *const WgvCover) -> usize {
    c.as_ref().map_or(0, |c| c.0.m())
}

/// # Safety
/// `c` must be null or a cover handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wgv_cover_free(c: *mut WgvCover) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Spectral gap of the exact-basis test operator: adaptive when `hvec` is
/// null, otherwise nonadaptive with per-vertex basis counts `hvec[0..len]`.
///
/// # Safety
/// `g` and `c` must be live handles; `hvec` null or valid for `len` reads;
/// `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_spectral_gap(
    g: *const WgvGraph,
    c: *const WgvCover,
    hvec: *const u32,
    len: usize,
    out: *mut f64,
) -> WgvStatus {
    guard(|| {
        let (g, c) = (deref(g, "graph")?, deref(c, "cover")?);
        if out.is_null() {
            return Err(null("out"));
        }
        let omega = if hvec.is_null() {
            build_omega_adaptive(&g.0, &c.0)?
        } else {
            build_omega_nonadaptive(&g.0, &c.0, std::slice::from_raw_parts(hvec, len))?
        };
        let target = StateVector::weighted_graph_state(&g.0)?;
        *out = spectral_gap(omega.matrix(), &target)?.value;
        Ok(())
    })
}

/// Fidelity certificate for an accepted run. `resource` is h for the grid
/// protocols and max e(k) for nonadaptive_e.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_certificate_bound(
    kind: WgvProtocolKind,
    n: usize,
    m: usize,
    copies: usize,
    beta: f64,
    resource: u32,
    out: *mut f64,
) -> WgvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inp = BoundInputs {
            kind: kind.into(),
            n,
            m,
            max_part: n,
            copies,
            beta,
            resource,
        };
        *out = certificate_bound(&inp)?;
        Ok(())
    })
}

/// Sufficient copy count for error `epsilon` at significance `beta`.
/// `resource` is max e(k) for nonadaptive_e and the scale b for adaptive_h;
/// it is ignored otherwise. `*h` receives the basis count (0 when unused).
///
/// # Safety
/// `copies` and `h` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_copies_required(
    kind: WgvProtocolKind,
    n: usize,
    m: usize,
    epsilon: f64,
    beta: f64,
    resource: f64,
    copies: *mut u64,
    h: *mut u32,
) -> WgvStatus {
    guard(|| {
        if copies.is_null() || h.is_null() {
            return Err(null("out"));
        }
        let res = match kind {
            WgvProtocolKind::AdaptiveExact => PlanResource::None,
            WgvProtocolKind::NonadaptiveE => PlanResource::MaxBases(resource as u32),
            WgvProtocolKind::AdaptiveH => PlanResource::Scale(resource),
            WgvProtocolKind::NonadaptiveH => PlanResource::Optimal,
        };
        let plan = copies_required(kind.into(), n, m, epsilon, beta, res)?;
        *copies = plan.copies;
        *h = plan.h.unwrap_or(0);
        Ok(())
    })
}

/// One sampling test against a simulated (optionally depolarized) source.
///
/// # Safety
/// `g`, `c` must be live handles; `params` valid for reads; `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn wgv_run(
    g: *const WgvGraph,
    c: *const WgvCover,
    params: *const WgvRunParams,
    out: *mut WgvRunResult,
) -> WgvStatus {
    guard(|| {
        let (g, c, p) = (
            deref(g, "graph")?,
            deref(c, "cover")?,
            deref(params, "params")?,
        );
        if out.is_null() {
            return Err(null("out"));
        }
        let protocol = match p.kind {
            WgvProtocolKind::AdaptiveExact => Protocol::AdaptiveExact,
            WgvProtocolKind::AdaptiveH => Protocol::AdaptiveH { h: p.h },
            WgvProtocolKind::NonadaptiveE => Protocol::NonadaptiveE(CandidateBases::derive(&g.0)?),
            WgvProtocolKind::NonadaptiveH => Protocol::NonadaptiveH {
                h: p.h,
                shared_draw: p.shared_draw,
            },
        };
        let cfg = ProtocolConfig::new(&g.0, c.0.clone(), protocol, p.copies, p.beta)?;
        let spec = if p.noise == 0.0 {
            SourceSpec::Honest
        } else {
            SourceSpec::Depolarized { p: p.noise }
        };
        let mut src = make_source(&spec, &g.0, p.copies)?;
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(p.stream);
        let r = run_random_sampling_test(src.as_mut(), &g.0, &cfg, &mut rng)?;
        *out = WgvRunResult {
            accepted: r.accepted,
            withheld: r.withheld,
            failed_copies: r.failed_copies(),
            certificate: r.certificate.map_or(f64::NAN, |c| c.bound),
            completeness_bound: r.completeness_bound,
        };
        Ok(())
    })
}
