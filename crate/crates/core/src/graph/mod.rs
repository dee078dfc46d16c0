//! Simple undirected graphs with dense vertex ids and induced-degree queries.

pub mod formats;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub use formats::{load_graph, to_edge_list, GraphFormat};

/// A finite simple undirected graph on vertices `0..order`.
///
/// Adjacency is held twice: as bit-packed rows (for masked counting and trace
/// extraction) and as sorted neighbor lists. Every vertex also carries the
/// name it had in the input file.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<BitVector>,
    neighbors: Vec<Vec<usize>>,
    names: Vec<String>,
}

impl Graph {
    pub fn empty(order: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(order); order],
            neighbors: vec![Vec::new(); order],
            names: (0..order).map(|v| v.to_string()).collect(),
        }
    }

    /// Builds a graph from an edge list. Duplicate edges collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(
        order: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = Self::empty(order);
        for (u, v) in edges {
            for x in [u, v] {
                if x >= order {
                    return Err(Error::VertexOutOfRange { vertex: x, order });
                }
            }
            if u == v {
                return Err(Error::SelfLoop {
                    line: 0,
                    vertex: u.to_string(),
                });
            }
            g.rows[u].set(v, true);
            g.rows[v].set(u, true);
        }
        for v in 0..order {
            g.neighbors[v] = g.rows[v].iter_ones().collect();
        }
        Ok(g)
    }

    /// Replaces the vertex names. Names must be distinct.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: names.len(),
            });
        }
        let mut seen = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if seen.insert(n.as_str(), i).is_some() {
                return Err(Error::InvalidProblem(format!(
                    "duplicate vertex name {n:?}"
                )));
            }
        }
        self.names = names;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u].get(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn row(&self, v: usize) -> &BitVector {
        &self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Resolves vertex names to ids.
    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<VertexSet> {
        let index: HashMap<&str, usize> = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let ids = names
            .iter()
            .map(|n| {
                index
                    .get(n.as_ref())
                    .copied()
                    .ok_or_else(|| Error::UnknownVertex(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VertexSet::new(ids))
    }

    pub fn names_of(&self, set: impl IntoIterator<Item = usize>) -> Vec<String> {
        set.into_iter().map(|v| self.names[v].clone()).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn complement(&self) -> Graph {
        let n = self.order();
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        let g = Graph::from_edges(n, edges.filter(|&(u, v)| !self.adjacent(u, v)))
            .expect("complement of a simple graph is simple");
        Graph {
            names: self.names.clone(),
            ..g
        }
    }

    /// `|N(v) ∩ S|` where `mask` is the indicator of `S`.
    pub fn degree_into(&self, v: usize, mask: &BitVector) -> usize {
        self.rows[v].and_count(mask)
    }

    /// Degree of every member of `set` inside `G[set]`, keyed by vertex.
    pub fn induced_degrees(&self, set: &VertexSet) -> Result<BTreeMap<usize, usize>> {
        set.check_within(self.order())?;
        let mask = set.mask(self.order());
        Ok(set
            .iter()
            .map(|v| (v, self.degree_into(v, &mask)))
            .collect())
    }

    pub fn is_regular(&self, set: &VertexSet) -> Result<Regularity> {
        let degrees = self.induced_degrees(set)?;
        let mut values = degrees.values();
        let Some(&first) = values.next() else {
            return Ok(Regularity::Empty);
        };
        if values.all(|&d| d == first) {
            Ok(Regularity::Regular(first))
        } else {
            Ok(Regularity::Irregular)
        }
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::range(self.order())
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("order", &self.order())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Result of [`Graph::is_regular`]. The empty set is regular with no degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Empty,
    Regular(usize),
    Irregular,
}

impl Regularity {
    pub fn is_regular(self) -> bool {
        !matches!(self, Regularity::Irregular)
    }

    pub fn degree(self) -> Option<usize> {
        match self {
            Regularity::Regular(d) => Some(d),
            _ => None,
        }
    }
}

/// A sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut members: Vec<usize> = ids.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn range(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Index of `v` in the sorted member list.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.members.first().copied()
    }

    pub fn check_within(&self, order: usize) -> Result<()> {
        match self.members.last() {
            Some(&v) if v >= order => Err(Error::VertexOutOfRange { vertex: v, order }),
            _ => Ok(()),
        }
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// First member of `self` missing from `other`, if any.
    pub fn first_outside(&self, other: &VertexSet) -> Option<usize> {
        self.iter().find(|&v| !other.contains(v))
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            members: self.iter().filter(|&v| !other.contains(v)).collect(),
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            members: self.iter().filter(|&v| other.contains(v)).collect(),
        }
    }

    /// Indicator vector of length `order`.
    pub fn mask(&self, order: usize) -> BitVector {
        BitVector::from_indices(order, self.iter()).expect("members checked against order")
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = usize;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter().copied()
    }
}

/// Small named graphs used across tests and fixtures.
pub mod families {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).unwrap()
    }

    pub fn star(leaves: usize) -> Graph {
        complete_bipartite(1, leaves)
    }

    /// Outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5.
    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Graph::from_edges(10, edges).unwrap()
    }
}
