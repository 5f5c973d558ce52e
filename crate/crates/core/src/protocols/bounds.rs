use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ProtocolKind;
use crate::error::{Error, Result};

/// Everything the closed-form certificates depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub kind: ProtocolKind,
    /// Qubit count n.
    pub n: usize,
    /// Number of cover parts m.
    pub m: usize,
    /// Largest part size max_l |A_l|.
    pub max_part: usize,
    /// Tested copies N.
    pub copies: usize,
    pub beta: f64,
    /// h for the grid protocols, max_k e(k) for nonadaptive_e, unused for
    /// adaptive_exact.
    pub resource: u32,
}

impl BoundInputs {
    fn resource_f(&self) -> f64 {
        f64::from(self.resource.max(1))
    }

    /// Spectral gap of the exact-basis test operator behind the protocol.
    pub fn gap(&self) -> f64 {
        match self.kind {
            ProtocolKind::AdaptiveExact | ProtocolKind::AdaptiveH => 1.0 / self.m as f64,
            ProtocolKind::NonadaptiveE | ProtocolKind::NonadaptiveH => {
                1.0 / (self.m as f64 * self.resource_f())
            }
        }
    }

    /// Smallest β for which the certificate is valid.
    pub fn min_beta(&self) -> f64 {
        match self.kind {
            ProtocolKind::AdaptiveExact | ProtocolKind::NonadaptiveE => {
                1.0 / (self.copies as f64 * self.gap() + 1.0)
            }
            ProtocolKind::AdaptiveH | ProtocolKind::NonadaptiveH => {
                1.0 / (self.copies as f64 + 1.0)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.m > self.n {
            return Err(Error::config(format!(
                "need 1 <= m <= n, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.copies == 0 {
            return Err(Error::config("at least one copy must be tested"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::config(format!(
                "significance level {} outside (0, 1]",
                self.beta
            )));
        }
        if self.kind != ProtocolKind::AdaptiveExact && self.resource == 0 {
            return Err(Error::config("basis count must be at least 1"));
        }
        let min = self.min_beta();
        // Relative slack so that β exactly at the threshold is accepted.
        if self.beta < min * (1.0 - 1e-12) {
            return Err(Error::config(format!(
                "significance level {} below the minimum {min:.6} for N = {}",
                self.beta, self.copies
            )));
        }
        Ok(())
    }
}

/// Fidelity lower bound for the withheld copy after an accepted run.
/// May be ≤ 0, in which case it certifies nothing.
pub fn certificate_bound(inp: &BoundInputs) -> Result<f64> {
    inp.validate()?;
    let (n, m, big_n, beta) = (inp.n as f64, inp.m as f64, inp.copies as f64, inp.beta);
    let r = inp.resource_f();
    let grid_error = || n * (PI / (4.0 * r)).sin();
    Ok(match inp.kind {
        ProtocolKind::AdaptiveExact => 1.0 - m * (1.0 - beta) / (big_n * beta),
        ProtocolKind::AdaptiveH => 1.0 - (m * (1.0 - beta) / (beta * big_n) + grid_error()),
        ProtocolKind::NonadaptiveE => 1.0 - m * (1.0 - beta) * r / (big_n * beta),
        ProtocolKind::NonadaptiveH => 1.0 - (m * r * (1.0 - beta) / (beta * big_n) + grid_error()),
    })
}

/// Lower bound on the probability that an honest i.i.d. source is accepted.
pub fn completeness_bound(inp: &BoundInputs) -> f64 {
    let r = inp.resource_f();
    let s2 = (PI / (4.0 * r)).sin().powi(2);
    let exponent = (inp.copies * inp.max_part) as f64;
    match inp.kind {
        ProtocolKind::AdaptiveExact | ProtocolKind::NonadaptiveE => 1.0,
        ProtocolKind::AdaptiveH => (1.0 - s2).powf(exponent),
        ProtocolKind::NonadaptiveH => (1.0 - s2 / r).powf(exponent),
    }
}

/// Bound on Pr{withheld bit = 1} given that all N sampled bits are 0, over
/// N + 1 arbitrarily correlated binary variables with one uniformly
/// withheld, valid whenever the conditioning event has probability ≥ β.
pub fn sampling_tail_bound(copies: usize, beta: f64) -> Result<f64> {
    if copies == 0 {
        return Err(Error::config("at least one copy must be sampled"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::config(format!(
            "significance level {beta} outside (0, 1]"
        )));
    }
    let n = copies as f64;
    if beta < (1.0 / (n + 1.0)) * (1.0 - 1e-12) {
        return Err(Error::config(format!(
            "significance level {beta} below 1/(N+1) for N = {copies}"
        )));
    }
    Ok((1.0 - beta) / (beta * n))
}

/// Resource parameter for [`copies_required`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanResource {
    /// adaptive_exact needs nothing beyond m.
    None,
    /// nonadaptive_e: max_k e(k).
    MaxBases(u32),
    /// adaptive_h: h = ⌈b·n⌉.
    Scale(f64),
    /// nonadaptive_h at the optimal scale b = π/(2ε).
    Optimal,
}

/// Copies and basis count that guarantee fidelity ≥ 1 − ε at significance β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopyPlan {
    pub copies: u64,
    /// Number of bases per vertex, for the grid protocols.
    pub h: Option<u32>,
    /// Scale factors in N = a·n (or a·n²) and h = b·n.
    pub a: Option<f64>,
    pub b: Option<f64>,
}

/// ⌈x⌉ ignoring float noise just above an integer.
pub(crate) fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

fn to_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x > 9.0e15 {
        return Err(Error::config(format!(
            "copy count {x} is not representable"
        )));
    }
    Ok(ceil_tol(x).max(1.0) as u64)
}

fn to_h(x: f64) -> Result<u32> {
    if !x.is_finite() || x > f64::from(u32::MAX) {
        return Err(Error::config(format!(
            "basis count {x} is not representable"
        )));
    }
    Ok(ceil_tol(x).max(1.0) as u32)
}

/// Sufficient number of tested copies for target error ε at significance β.
///
/// The grid protocols use the asymptotic scalings N = a·n, h = ⌈b·n⌉
/// (adaptive_h) and N = ⌈π(1−β)n²/(βε²)⌉, h = ⌈πn/(2ε)⌉ (nonadaptive_h);
/// both bound m by n.
pub fn copies_required(
    kind: ProtocolKind,
    n: usize,
    m: usize,
    epsilon: f64,
    beta: f64,
    resource: PlanResource,
) -> Result<CopyPlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::config(format!(
            "target error {epsilon} outside (0, 1)"
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::config(format!(
            "significance level {beta} outside (0, 1]"
        )));
    }
    if n == 0 || m == 0 || m > n {
        return Err(Error::config(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let odds = (1.0 - beta) / beta;
    let nf = n as f64;
    let plan = |copies, h, a, b| CopyPlan { copies, h, a, b };
    match (kind, resource) {
        (ProtocolKind::AdaptiveExact, PlanResource::None) => {
            Ok(plan(to_count(m as f64 * odds / epsilon)?, None, None, None))
        }
        (ProtocolKind::NonadaptiveE, PlanResource::MaxBases(e)) if e >= 1 => Ok(plan(
            to_count(m as f64 * f64::from(e) * odds / epsilon)?,
            None,
            None,
            None,
        )),
        (ProtocolKind::AdaptiveH, PlanResource::Scale(b)) if b > 0.0 && b.is_finite() => {
            let slack = epsilon - PI / (4.0 * b);
            if slack <= 0.0 {
                return Err(Error::config(format!(
                    "target error {epsilon} not reachable with scale b = {b}: need ε > π/(4b) = {:.6}",
                    PI / (4.0 * b)
                )));
            }
            let a = odds / slack;
            Ok(plan(
                to_count(a * nf)?,
                Some(to_h(b * nf)?),
                Some(a),
                Some(b),
            ))
        }
        (ProtocolKind::NonadaptiveH, PlanResource::Optimal) => {
            let b = PI / (2.0 * epsilon);
            let a = PI * odds / (epsilon * epsilon);
            Ok(plan(
                to_count(a * nf * nf)?,
                Some(to_h(b * nf)?),
                Some(a),
                Some(b),
            ))
        }
        (kind, resource) => Err(Error::config(format!(
            "resource {resource:?} does not apply to protocol {}",
            kind.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inputs(
        kind: ProtocolKind,
        m: usize,
        copies: usize,
        beta: f64,
        resource: u32,
    ) -> BoundInputs {
        BoundInputs {
            kind,
            n: 10,
            m,
            max_part: 5,
            copies,
            beta,
            resource,
        }
    }

    #[test]
    fn certificate_examples() {
        let b = certificate_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 100, 0.05, 0)).unwrap();
        assert_abs_diff_eq!(b, 0.62, epsilon = 1e-12);
        let b = certificate_bound(&inputs(ProtocolKind::NonadaptiveE, 2, 1000, 0.05, 8)).unwrap();
        assert_abs_diff_eq!(b, 0.696, epsilon = 1e-12);
    }

    #[test]
    fn grid_certificates_include_discretization_term() {
        let exact =
            certificate_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 100, 0.5, 0)).unwrap();
        let grid = certificate_bound(&inputs(ProtocolKind::AdaptiveH, 2, 100, 0.5, 40)).unwrap();
        assert_abs_diff_eq!(exact - grid, 10.0 * (PI / 160.0).sin(), epsilon = 1e-12);
        let nh = certificate_bound(&inputs(ProtocolKind::NonadaptiveH, 2, 100, 0.5, 40)).unwrap();
        assert_abs_diff_eq!(
            1.0 - nh,
            2.0 * 40.0 * 0.5 / 50.0 + 10.0 * (PI / 160.0).sin(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn asymptotic_adaptive_h_limit() {
        // N = a n, h = b n, m = n: the bound tends to 1 − [(1−β)/(aβ) + π/(4b)].
        let (a, b, beta) = (50.0, 20.0, 0.1);
        let limit = 1.0 - ((1.0 - beta) / (a * beta) + PI / (4.0 * b));
        let n = 100_000usize;
        let inp = BoundInputs {
            kind: ProtocolKind::AdaptiveH,
            n,
            m: n,
            max_part: 1,
            copies: (a * n as f64) as usize,
            beta,
            resource: (b * n as f64) as u32,
        };
        assert_abs_diff_eq!(certificate_bound(&inp).unwrap(), limit, epsilon = 1e-8);
    }

    #[test]
    fn beta_preconditions() {
        // adaptive_exact with m = 2, N = 100 needs β ≥ 1/51.
        assert!(
            certificate_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 100, 1.0 / 51.0, 0)).is_ok()
        );
        assert!(matches!(
            certificate_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 100, 0.019, 0)),
            Err(Error::Config(_))
        ));
        assert!(
            certificate_bound(&inputs(ProtocolKind::AdaptiveH, 2, 100, 1.0 / 101.0, 4)).is_ok()
        );
        assert!(certificate_bound(&inputs(ProtocolKind::AdaptiveH, 2, 100, 0.009, 4)).is_err());
        assert!(certificate_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 100, 0.0, 0)).is_err());
        assert!(certificate_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 0, 0.5, 0)).is_err());
        assert!(certificate_bound(&inputs(ProtocolKind::AdaptiveH, 2, 100, 0.5, 0)).is_err());
    }

    #[test]
    fn completeness_values() {
        assert_eq!(
            completeness_bound(&inputs(ProtocolKind::AdaptiveExact, 2, 50, 0.5, 0)),
            1.0
        );
        let c = completeness_bound(&inputs(ProtocolKind::AdaptiveH, 2, 10, 0.5, 4));
        assert_abs_diff_eq!(
            c,
            (1.0 - (PI / 16.0).sin().powi(2)).powi(50),
            epsilon = 1e-14
        );
        let c = completeness_bound(&inputs(ProtocolKind::NonadaptiveH, 2, 10, 0.5, 4));
        assert_abs_diff_eq!(
            c,
            (1.0 - (PI / 16.0).sin().powi(2) / 4.0).powi(50),
            epsilon = 1e-14
        );
    }

    #[test]
    fn tail_bound_examples() {
        assert_abs_diff_eq!(sampling_tail_bound(19, 0.05).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            sampling_tail_bound(100, 0.5).unwrap(),
            0.01,
            epsilon = 1e-15
        );
        assert!(sampling_tail_bound(19, 0.04).is_err());
        assert!(sampling_tail_bound(0, 0.5).is_err());
    }

    #[test]
    fn copy_count_examples() {
        let ms = copies_required(
            ProtocolKind::NonadaptiveE,
            10,
            10,
            0.1,
            0.05,
            PlanResource::MaxBases(8),
        )
        .unwrap();
        assert_eq!(ms.copies, 15200);
        let iqp = copies_required(
            ProtocolKind::NonadaptiveE,
            10,
            10,
            0.1,
            0.05,
            PlanResource::MaxBases(2),
        )
        .unwrap();
        assert_eq!(iqp.copies, 3800);
        let opt = copies_required(
            ProtocolKind::NonadaptiveH,
            10,
            10,
            0.1,
            0.5,
            PlanResource::Optimal,
        )
        .unwrap();
        assert_eq!(opt.copies, 31416);
        assert_eq!(opt.h, Some(158));
        assert_abs_diff_eq!(opt.b.unwrap(), PI / 0.2, epsilon = 1e-12);
        let ex = copies_required(
            ProtocolKind::AdaptiveExact,
            10,
            2,
            0.38,
            0.05,
            PlanResource::None,
        )
        .unwrap();
        assert_eq!(ex.copies, 100);
    }

    #[test]
    fn adaptive_h_plan_meets_target() {
        for &(n, eps, beta, b) in &[
            (10usize, 0.2, 0.05, 10.0),
            (6, 0.3, 0.2, 4.0),
            (20, 0.1, 0.1, 30.0),
        ] {
            let plan = copies_required(
                ProtocolKind::AdaptiveH,
                n,
                n,
                eps,
                beta,
                PlanResource::Scale(b),
            )
            .unwrap();
            let inp = BoundInputs {
                kind: ProtocolKind::AdaptiveH,
                n,
                m: n,
                max_part: 1,
                copies: plan.copies as usize,
                beta,
                resource: plan.h.unwrap(),
            };
            assert!(certificate_bound(&inp).unwrap() >= 1.0 - eps - 1e-12);
        }
        assert!(copies_required(
            ProtocolKind::AdaptiveH,
            10,
            10,
            0.1,
            0.05,
            PlanResource::Scale(5.0)
        )
        .is_err());
    }

    #[test]
    fn plan_rejects_bad_inputs() {
        assert!(copies_required(
            ProtocolKind::AdaptiveExact,
            10,
            2,
            1.0,
            0.05,
            PlanResource::None
        )
        .is_err());
        assert!(copies_required(
            ProtocolKind::AdaptiveExact,
            10,
            2,
            0.1,
            0.0,
            PlanResource::None
        )
        .is_err());
        assert!(copies_required(
            ProtocolKind::AdaptiveExact,
            2,
            3,
            0.1,
            0.5,
            PlanResource::None
        )
        .is_err());
        assert!(copies_required(
            ProtocolKind::AdaptiveExact,
            10,
            2,
            0.1,
            0.5,
            PlanResource::Optimal
        )
        .is_err());
    }

    #[test]
    fn ceil_ignores_float_noise() {
        assert_eq!(ceil_tol(15200.000000001), 15200.0);
        assert_eq!(ceil_tol(15200.01), 15201.0);
        assert_eq!(ceil_tol(0.3), 1.0);
    }
}
