//! Weighted graphs and independence covers.

mod cover;
mod format;

pub use cover::{
    chromatic_number_exact, greedy_cover, validate_cover, CoverViolation, IndependenceCover,
    CHROMATIC_SEARCH_LIMIT,
};
pub use format::{load_graph, parse_angle, parse_graph};

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// A 1-indexed vertex label.
pub type Vertex = usize;

/// Undirected graph with a nonzero real weight (radians) on every edge.
///
/// Edge keys are normalized to `(j, k)` with `j < k`. Weights are stored as
/// given and only reduced modulo 2π where they are used.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: BTreeMap<(Vertex, Vertex), f64>,
    adjacency: Vec<BTreeSet<Vertex>>,
}

impl WeightedGraph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("graph needs at least one vertex"));
        }
        Ok(WeightedGraph {
            n,
            weights: BTreeMap::new(),
            adjacency: vec![BTreeSet::new(); n],
        })
    }

    /// Builds a graph from `(j, k, theta)` triples. Either orientation of an
    /// edge is accepted; listing the same unordered pair twice is an error.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, f64)>,
    {
        let mut g = Self::empty(n)?;
        for (j, k, theta) in edges {
            g.insert_edge(j, k, theta)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, j: Vertex, k: Vertex, theta: f64) -> Result<()> {
        self.check_vertex(j)?;
        self.check_vertex(k)?;
        if j == k {
            return Err(Error::input(format!("self-loop on vertex {j}")));
        }
        if !theta.is_finite() {
            return Err(Error::input(format!(
                "edge ({j},{k}) has non-finite weight"
            )));
        }
        if theta == 0.0 {
            return Err(Error::input(format!("edge ({j},{k}) has zero weight")));
        }
        let key = edge_key(j, k);
        if self.weights.insert(key, theta).is_some() {
            return Err(Error::input(format!(
                "duplicate edge ({},{})",
                key.0, key.1
            )));
        }
        self.adjacency[j - 1].insert(k);
        self.adjacency[k - 1].insert(j);
        Ok(())
    }

    /// Copy of the graph with the weight of `(j, k)` replaced. A zero weight
    /// removes the edge; a previously absent pair becomes an edge.
    pub fn with_weight(&self, j: Vertex, k: Vertex, theta: f64) -> Result<Self> {
        self.check_vertex(j)?;
        self.check_vertex(k)?;
        if j == k {
            return Err(Error::input(format!("self-loop on vertex {j}")));
        }
        let key = edge_key(j, k);
        let edges = self
            .edges()
            .filter(|&(e, _)| e != key)
            .map(|((a, b), t)| (a, b, t))
            .chain((theta != 0.0).then_some((key.0, key.1, theta)));
        Self::from_edges(self.n, edges.collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Edges in ascending `(j, k)` order.
    pub fn edges(&self) -> impl Iterator<Item = ((Vertex, Vertex), f64)> + '_ {
        self.weights.iter().map(|(&e, &t)| (e, t))
    }

    /// θ_jk, or 0 when `(j, k)` is not an edge.
    pub fn weight(&self, j: Vertex, k: Vertex) -> f64 {
        self.weights.get(&edge_key(j, k)).copied().unwrap_or(0.0)
    }

    /// The neighborhood C_k.
    pub fn neighbors(&self, k: Vertex) -> Result<&BTreeSet<Vertex>> {
        self.check_vertex(k)?;
        Ok(&self.adjacency[k - 1])
    }

    pub fn degree(&self, k: Vertex) -> Result<usize> {
        self.neighbors(k).map(BTreeSet::len)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    pub fn check_vertex(&self, k: Vertex) -> Result<()> {
        if k == 0 || k > self.n {
            Err(Error::input(format!(
                "vertex {k} out of range 1..={}",
                self.n
            )))
        } else {
            Ok(())
        }
    }

    /// Writes the graph in the text format read by [`parse_graph`]. Weights
    /// use the shortest decimal form that round-trips.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for ((j, k), t) in self.edges() {
            out.push_str(&format!("edge {j} {k} {t:?}\n"));
        }
        out
    }
}

fn edge_key(j: Vertex, k: Vertex) -> (Vertex, Vertex) {
    if j < k {
        (j, k)
    } else {
        (k, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, [(1, 2, PI), (2, 3, PI / 4.0)]).unwrap()
    }

    #[test]
    fn single_edge_neighbors() {
        let g = WeightedGraph::from_edges(2, [(1, 2, 0.3)]).unwrap();
        assert_eq!(
            g.neighbors(1).unwrap().iter().copied().collect::<Vec<_>>(),
            vec![2]
        );
    }

    #[test]
    fn isolated_vertex_has_no_neighbors() {
        let g = WeightedGraph::from_edges(3, [(1, 2, 0.3)]).unwrap();
        assert!(g.neighbors(3).unwrap().is_empty());
    }

    #[test]
    fn triangle_neighbors() {
        let g = WeightedGraph::from_edges(3, [(1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0)]).unwrap();
        assert_eq!(
            g.neighbors(2).unwrap().iter().copied().collect::<Vec<_>>(),
            vec![1, 3]
        );
    }

    #[test]
    fn neighbors_out_of_range() {
        let g = path3();
        assert!(matches!(g.neighbors(0), Err(Error::Input(_))));
        assert!(matches!(g.neighbors(4), Err(Error::Input(_))));
    }

    #[test]
    fn non_edge_weight_is_zero_and_orientation_is_ignored() {
        let g = path3();
        assert_eq!(g.weight(1, 3), 0.0);
        assert_eq!(g.weight(3, 2), PI / 4.0);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::from_edges(2, [(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, [(1, 2, 0.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, [(1, 2, 1.0), (2, 1, 2.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, [(1, 3, 1.0)]).is_err());
        assert!(WeightedGraph::empty(0).is_err());
    }

    #[test]
    fn with_weight_replaces_and_removes() {
        let g = path3();
        let h = g.with_weight(2, 1, 0.5).unwrap();
        assert_eq!(h.weight(1, 2), 0.5);
        let r = g.with_weight(1, 2, 0.0).unwrap();
        assert_eq!(r.edge_count(), 1);
        assert!(r.neighbors(1).unwrap().is_empty());
    }

    #[test]
    fn text_round_trip() {
        let g = path3();
        assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }
}
