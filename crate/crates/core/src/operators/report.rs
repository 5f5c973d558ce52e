use std::fmt::Write as _;

use super::*;

/// Which test operator to certify, with its discretization parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapRequest {
    AdaptiveExact,
    AdaptiveH(u32),
    /// Per-vertex basis counts `h(k)`, indexed by `k - 1`.
    Nonadaptive(Vec<u32>),
    NonadaptiveH(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// |computed − predicted| ≤ 1e-10
    Equal,
    /// computed ≥ predicted − 1e-9
    AtLeast,
    /// computed ≤ predicted + 1e-9
    AtMost,
}

impl Relation {
    fn holds(self, computed: f64, predicted: f64) -> bool {
        match self {
            Relation::Equal => (computed - predicted).abs() <= EIGEN_TOL,
            Relation::AtLeast => computed >= predicted - 1e-9,
            Relation::AtMost => computed <= predicted + 1e-9,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "==",
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        }
    }
}

/// One numerically checked formula.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaCheck {
    pub name: String,
    pub computed: f64,
    pub predicted: f64,
    pub relation: Relation,
    pub holds: bool,
}

impl FormulaCheck {
    fn new(name: &str, computed: f64, relation: Relation, predicted: f64) -> Self {
        FormulaCheck {
            name: name.to_string(),
            computed,
            predicted,
            relation,
            holds: relation.holds(computed, predicted),
        }
    }
}

/// Numerical check of the spectral-gap and perturbation formulas for one
/// graph, cover and protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub n: usize,
    pub m: usize,
    pub max_part: usize,
    pub request: GapRequest,
    pub checks: Vec<FormulaCheck>,
    /// Informational quantities that carry no pass/fail verdict.
    pub notes: Vec<(String, f64)>,
}

impl CertificateReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let label = match &self.request {
            GapRequest::AdaptiveExact => "adaptive-exact".to_string(),
            GapRequest::AdaptiveH(h) => format!("adaptive-h (h = {h})"),
            GapRequest::Nonadaptive(hv) => format!(
                "nonadaptive (h = {})",
                hv.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            ),
            GapRequest::NonadaptiveH(h) => format!("nonadaptive-h (h = {h})"),
        };
        let _ = writeln!(out, "protocol   {label}");
        let _ = writeln!(out, "vertices   {}", self.n);
        let _ = writeln!(out, "parts      {} (largest {})", self.m, self.max_part);
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<5} {:<28} {:.12} {} {:.12}",
                if c.holds { "ok" } else { "FAIL" },
                c.name,
                c.computed,
                c.relation.symbol(),
                c.predicted
            );
        }
        for (name, v) in &self.notes {
            let _ = writeln!(out, "info  {name:<28} {v:.12}");
        }
        out
    }
}

fn gap_check(
    name: &str,
    omega: &TestOperator,
    target: &StateVector,
    predicted: f64,
) -> Result<FormulaCheck> {
    let gap = spectral_gap(omega.matrix(), target)?;
    let mut check = FormulaCheck::new(name, gap.value, Relation::Equal, predicted);
    check.holds &= gap.dominates;
    Ok(check)
}

/// Builds the requested operator densely and checks its gap, the honest
/// overlap bound and the distance to the ideal operator against the
/// closed-form predictions.
pub fn certify(
    g: &WeightedGraph,
    cover: &IndependenceCover,
    request: &GapRequest,
) -> Result<CertificateReport> {
    check_oracle(g, cover)?;
    let target = StateVector::weighted_graph_state(g)?;
    let max_part = cover.max_part_size();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    match request {
        GapRequest::AdaptiveExact => {
            let omega = build_omega_adaptive(g, cover)?;
            checks.push(gap_check(
                "spectral gap",
                &omega,
                &target,
                adaptive_gap_formula(cover),
            )?);
        }
        GapRequest::AdaptiveH(h) => {
            let exact = build_omega_adaptive(g, cover)?;
            let grid = build_omega_adaptive_h(g, cover, *h)?;
            checks.push(gap_check(
                "spectral gap (exact bases)",
                &exact,
                &target,
                adaptive_gap_formula(cover),
            )?);
            checks.push(FormulaCheck::new(
                "honest pass probability",
                grid.expectation(&target)?,
                Relation::AtLeast,
                adaptive_h_overlap_bound(*h, max_part),
            ));
            checks.push(FormulaCheck::new(
                "distance to exact operator",
                operator_norm(&(grid.matrix() - exact.matrix()))?,
                Relation::AtMost,
                adaptive_h_perturbation_bound(*h, cover),
            ));
        }
        GapRequest::Nonadaptive(hvec) => {
            let omega = build_omega_nonadaptive(g, cover, hvec)?;
            checks.push(gap_check(
                "spectral gap",
                &omega,
                &target,
                nonadaptive_gap_formula(cover, hvec),
            )?);
        }
        GapRequest::NonadaptiveH(h) => {
            let smeared = build_omega_nonadaptive(g, cover, &vec![*h; g.n()])?;
            let grid = build_omega_nonadaptive_h(g, cover, *h)?;
            checks.push(gap_check(
                "spectral gap (exact bases)",
                &smeared,
                &target,
                1.0 / (cover.m() as f64 * f64::from(*h)),
            )?);
            checks.push(FormulaCheck::new(
                "honest pass probability",
                grid.expectation(&target)?,
                Relation::AtLeast,
                nonadaptive_h_overlap_bound(*h, max_part),
            ));
            checks.push(FormulaCheck::new(
                "distance to exact operator",
                operator_norm(&(grid.matrix() - smeared.matrix()))?,
                Relation::AtMost,
                nonadaptive_h_perturbation_bound(*h, cover),
            ));
            let shared = build_omega_nonadaptive_h_shared(g, cover, *h)?;
            notes.push((
                "shared-draw operator distance".to_string(),
                operator_norm(&(shared.matrix() - grid.matrix()))?,
            ));
            notes.push((
                "shared-draw pass probability".to_string(),
                shared.expectation(&target)?,
            ));
        }
    }
    Ok(CertificateReport {
        n: g.n(),
        m: cover.m(),
        max_part,
        request: request.clone(),
        checks,
        notes,
    })
}
