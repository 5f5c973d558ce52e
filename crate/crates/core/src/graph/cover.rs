use std::collections::BTreeSet;
use std::fmt;

use super::{Vertex, WeightedGraph};
use crate::error::{Error, Result};

/// Largest graph for which [`chromatic_number_exact`] runs.
pub const CHROMATIC_SEARCH_LIMIT: usize = 12;

/// A partition of the vertex set into nonempty independent sets A_1..A_m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCover {
    parts: Vec<Vec<Vertex>>,
    /// `color[k - 1]` is the 0-based index of the part holding `k`.
    color: Vec<usize>,
}

/// One reason a proposed cover is not an independence cover of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    /// Part indices are 1-based to match A_1..A_m.
    EdgeInside {
        part: usize,
        edge: (Vertex, Vertex),
    },
    Overlap {
        vertex: Vertex,
        parts: (usize, usize),
    },
    Uncovered(Vertex),
    EmptyPart(usize),
    OutOfRange {
        part: usize,
        vertex: Vertex,
    },
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::EdgeInside { part, edge } => {
                write!(f, "edge ({},{}) inside A_{part}", edge.0, edge.1)
            }
            CoverViolation::Overlap { vertex, parts } => {
                write!(f, "vertex {vertex} in both A_{} and A_{}", parts.0, parts.1)
            }
            CoverViolation::Uncovered(v) => write!(f, "vertex {v} uncovered"),
            CoverViolation::EmptyPart(l) => write!(f, "A_{l} is empty"),
            CoverViolation::OutOfRange { part, vertex } => {
                write!(f, "A_{part} contains out-of-range vertex {vertex}")
            }
        }
    }
}

/// Lists every way `parts` fails to be an independence cover (partition
/// into independent sets) of `g`. An empty result means the cover is valid.
pub fn validate_cover(g: &WeightedGraph, parts: &[Vec<Vertex>]) -> Vec<CoverViolation> {
    let mut violations = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; g.n()];
    for (l, part) in parts.iter().enumerate() {
        let label = l + 1;
        if part.is_empty() {
            violations.push(CoverViolation::EmptyPart(label));
        }
        let mut seen = BTreeSet::new();
        for &v in part {
            if v == 0 || v > g.n() {
                violations.push(CoverViolation::OutOfRange {
                    part: label,
                    vertex: v,
                });
                continue;
            }
            if !seen.insert(v) {
                continue;
            }
            match owner[v - 1] {
                Some(prev) => violations.push(CoverViolation::Overlap {
                    vertex: v,
                    parts: (prev, label),
                }),
                None => owner[v - 1] = Some(label),
            }
        }
        for &j in &seen {
            for &k in seen.range(j + 1..) {
                if g.weight(j, k) != 0.0 {
                    violations.push(CoverViolation::EdgeInside {
                        part: label,
                        edge: (j, k),
                    });
                }
            }
        }
    }
    for (i, o) in owner.iter().enumerate() {
        if o.is_none() {
            violations.push(CoverViolation::Uncovered(i + 1));
        }
    }
    violations
}

impl IndependenceCover {
    /// Validates `parts` against `g`. Vertices within a part are sorted.
    pub fn new(g: &WeightedGraph, parts: Vec<Vec<Vertex>>) -> Result<Self> {
        let violations = validate_cover(g, &parts);
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::input(format!("invalid cover: {}", msg.join("; "))));
        }
        let mut color = vec![0; g.n()];
        let parts: Vec<Vec<Vertex>> = parts
            .into_iter()
            .enumerate()
            .map(|(l, mut p)| {
                p.sort_unstable();
                p.dedup();
                for &v in &p {
                    color[v - 1] = l;
                }
                p
            })
            .collect();
        Ok(IndependenceCover { parts, color })
    }

    /// Builds a cover from a 0-based color per vertex (`colors[k - 1]`).
    /// Colors must be contiguous from 0.
    pub fn from_colors(g: &WeightedGraph, colors: &[usize]) -> Result<Self> {
        if colors.len() != g.n() {
            return Err(Error::input(format!(
                "expected {} colors, got {}",
                g.n(),
                colors.len()
            )));
        }
        let m = colors.iter().max().map_or(0, |c| c + 1);
        let mut parts = vec![Vec::new(); m];
        for (i, &c) in colors.iter().enumerate() {
            parts[c].push(i + 1);
        }
        Self::new(g, parts)
    }

    /// Each vertex in its own part, in vertex order (m = n).
    pub fn singletons(g: &WeightedGraph) -> Self {
        let parts = g.vertices().map(|v| vec![v]).collect();
        Self::new(g, parts).expect("singletons always form a cover")
    }

    /// Number of parts m.
    pub fn m(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    /// A_l for a 0-based index `l`.
    pub fn part(&self, l: usize) -> &[Vertex] {
        &self.parts[l]
    }

    /// 0-based index of the part containing `k`.
    pub fn color_of(&self, k: Vertex) -> usize {
        self.color[k - 1]
    }

    pub fn n(&self) -> usize {
        self.color.len()
    }

    /// max_l |A_l|
    pub fn max_part_size(&self) -> usize {
        self.parts.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Bitmask (bit k-1 for vertex k) of A_l.
    pub fn part_mask(&self, l: usize) -> usize {
        self.parts[l].iter().fold(0, |acc, &v| acc | (1 << (v - 1)))
    }

    /// Checks the cover still matches `g` (used when a cover travels
    /// separately from its graph).
    pub fn check_against(&self, g: &WeightedGraph) -> Result<()> {
        let violations = validate_cover(g, &self.parts);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::input(format!(
                "cover does not fit graph: {}",
                violations[0]
            )))
        }
    }
}

/// Greedy coloring along `order`: each vertex takes the smallest color not
/// used by an already-colored neighbor. Part `l` of the result holds color `l`.
pub fn greedy_cover(g: &WeightedGraph, order: &[Vertex]) -> Result<IndependenceCover> {
    let mut seen = vec![false; g.n()];
    if order.len() != g.n() {
        return Err(Error::input("order is not a permutation of the vertices"));
    }
    for &v in order {
        g.check_vertex(v)?;
        if std::mem::replace(&mut seen[v - 1], true) {
            return Err(Error::input(format!("vertex {v} repeated in order")));
        }
    }
    let mut color: Vec<Option<usize>> = vec![None; g.n()];
    for &v in order {
        let taken: BTreeSet<usize> = g
            .neighbors(v)?
            .iter()
            .filter_map(|&u| color[u - 1])
            .collect();
        let c = (0..).find(|c| !taken.contains(c)).unwrap();
        color[v - 1] = Some(c);
    }
    let colors: Vec<usize> = color.into_iter().map(Option::unwrap).collect();
    IndependenceCover::from_colors(g, &colors)
}

/// χ(G) by iterative deepening on the number of colors with backtracking.
pub fn chromatic_number_exact(g: &WeightedGraph) -> Result<usize> {
    if g.n() > CHROMATIC_SEARCH_LIMIT {
        return Err(Error::capability(format!(
            "exact chromatic number limited to n <= {CHROMATIC_SEARCH_LIMIT}, got {}",
            g.n()
        )));
    }
    let adj: Vec<Vec<usize>> = g
        .vertices()
        .map(|v| g.neighbors(v).unwrap().iter().map(|u| u - 1).collect())
        .collect();
    // Highest degree first prunes earliest.
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].len()));
    for k in 1..=g.n() {
        let mut color = vec![usize::MAX; g.n()];
        if color_with(&adj, &order, 0, k, &mut color) {
            return Ok(k);
        }
    }
    unreachable!("n colors always suffice")
}

fn color_with(
    adj: &[Vec<usize>],
    order: &[usize],
    pos: usize,
    k: usize,
    color: &mut [usize],
) -> bool {
    let Some(&v) = order.get(pos) else {
        return true;
    };
    // Symmetry breaking: never open more than one new color at a time.
    let used = color
        .iter()
        .filter(|&&c| c != usize::MAX)
        .max()
        .map_or(0, |c| c + 1);
    for c in 0..k.min(used + 1) {
        if adj[v].iter().all(|&u| color[u] != c) {
            color[v] = c;
            if color_with(adj, order, pos + 1, k, color) {
                return true;
            }
            color[v] = usize::MAX;
        }
    }
    false
}
