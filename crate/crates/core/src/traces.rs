//! Trace tables and the exact tail obstruction.
//!
//! For a core `U` and a tail `R`, the trace of `x ∈ R` is `N(x) ∩ U`. Traces
//! are stored as bit masks over the sorted members of `U` (bit `i` is the
//! `i`-th smallest core vertex). The tail function `ρ_R(u) = |N(u) ∩ R|`
//! decomposes as `Σ_B n_B·1_B`, and modulo constant vectors only the oriented
//! differences `n_B − n_{U∖B}` of complementary traces survive.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::{Graph, VertexSet};
use crate::witness::quotient_coords_at;

/// Multiplicities and realizers of every trace of a tail on a core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTable {
    core: VertexSet,
    tail: VertexSet,
    /// Realized traces only; realizers sorted ascending.
    entries: BTreeMap<BitVector, Vec<usize>>,
}

pub fn compute_traces(g: &Graph, core: &VertexSet, tail: &VertexSet) -> Result<TraceTable> {
    core.check_within(g.order())?;
    tail.check_within(g.order())?;
    if let Some(v) = tail.iter().find(|&v| core.contains(v)) {
        return Err(Error::Overlap(v));
    }
    let mut entries: BTreeMap<BitVector, Vec<usize>> = BTreeMap::new();
    for x in tail {
        let row = g.row(x);
        let bits: Vec<bool> = core.iter().map(|u| row.get(u)).collect();
        entries
            .entry(BitVector::from_bools(&bits))
            .or_default()
            .push(x);
    }
    Ok(TraceTable {
        core: core.clone(),
        tail: tail.clone(),
        entries,
    })
}

impl TraceTable {
    /// Builds a table from explicit realizer lists, e.g. for a synthetic core.
    pub fn from_entries(core: VertexSet, entries: BTreeMap<BitVector, Vec<usize>>) -> Result<Self> {
        let mut tail = Vec::new();
        let mut cleaned = BTreeMap::new();
        for (mask, mut realizers) in entries {
            if mask.len() != core.len() {
                return Err(Error::DimensionMismatch {
                    expected: core.len(),
                    found: mask.len(),
                });
            }
            if realizers.is_empty() {
                continue;
            }
            realizers.sort_unstable();
            tail.extend_from_slice(&realizers);
            cleaned.insert(mask, realizers);
        }
        let tail_set = VertexSet::new(tail.iter().copied());
        if tail_set.len() != tail.len() {
            return Err(Error::InvalidProblem("a vertex realizes two traces".into()));
        }
        if let Some(v) = tail_set.iter().find(|&v| core.contains(v)) {
            return Err(Error::Overlap(v));
        }
        Ok(Self {
            core,
            tail: tail_set,
            entries: cleaned,
        })
    }

    pub fn core(&self) -> &VertexSet {
        &self.core
    }

    pub fn tail(&self) -> &VertexSet {
        &self.tail
    }

    pub fn core_size(&self) -> usize {
        self.core.len()
    }

    /// `n_B`; zero for unrealized traces.
    pub fn count(&self, trace: &BitVector) -> usize {
        self.entries.get(trace).map_or(0, Vec::len)
    }

    pub fn realizers(&self, trace: &BitVector) -> &[usize] {
        self.entries.get(trace).map_or(&[], Vec::as_slice)
    }

    /// Realized traces in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = (&BitVector, &[usize])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Traces with `n_B >= q`, in ascending mask order.
    pub fn available(&self, q: u64) -> impl Iterator<Item = (&BitVector, &[usize])> {
        self.iter().filter(move |(_, r)| r.len() as u64 >= q)
    }

    /// Core vertices of a trace mask.
    pub fn members(&self, trace: &BitVector) -> Vec<usize> {
        trace.iter_ones().map(|i| self.core.as_slice()[i]).collect()
    }

    /// Mask of a set of core vertices.
    pub fn mask_of(&self, vertices: &[usize]) -> Result<BitVector> {
        let positions = vertices
            .iter()
            .map(|&v| {
                self.core.position(v).ok_or(Error::NotSubset {
                    what: "trace must lie in the core",
                    vertex: v,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BitVector::from_indices(self.core.len(), positions)
    }

    pub fn to_document(&self, g: Option<&Graph>) -> TraceTableDocument {
        let name = |v: usize| g.map_or_else(|| v.to_string(), |g| g.name(v).to_string());
        TraceTableDocument {
            core: self.core.iter().map(name).collect(),
            tail: self.tail.iter().map(name).collect(),
            traces: self
                .iter()
                .map(|(mask, realizers)| TraceEntryDocument {
                    trace: self.members(mask).into_iter().map(name).collect(),
                    count: realizers.len(),
                    realizers: realizers.iter().map(|&v| name(v)).collect(),
                })
                .collect(),
        }
    }
}

/// JSON form of a [`TraceTable`], with vertices given by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceTableDocument {
    pub core: Vec<String>,
    pub tail: Vec<String>,
    pub traces: Vec<TraceEntryDocument>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntryDocument {
    pub trace: Vec<String>,
    pub count: usize,
    pub realizers: Vec<String>,
}

/// `ρ_R(u) = Σ_{B ∋ u} n_B`, aligned with the sorted core.
pub fn rho(table: &TraceTable) -> Vec<i64> {
    let mut out = vec![0i64; table.core_size()];
    for (mask, realizers) in table.iter() {
        for i in mask.iter_ones() {
            out[i] += realizers.len() as i64;
        }
    }
    out
}

/// A class in `F2^U / <1_U>`, as coordinates relative to the smallest core vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientClass(pub BitVector);

impl QuotientClass {
    /// Class of a vector indexed by core positions.
    pub fn of(x: &BitVector) -> Self {
        if x.is_empty() {
            return QuotientClass(BitVector::zeros(0));
        }
        QuotientClass(quotient_coords_at(x, 0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn coords(&self) -> &BitVector {
        &self.0
    }
}

fn parity_vector(values: impl Iterator<Item = i64>) -> BitVector {
    let bits: Vec<bool> = values.map(|x| x.rem_euclid(2) == 1).collect();
    BitVector::from_bools(&bits)
}

/// Orbit representative: the smaller of `B` and `U ∖ B`, or `None` for the
/// constant orbit `{∅, U}`.
fn orbit_representative(trace: &BitVector) -> Option<(BitVector, BitVector)> {
    let comp = trace.complement();
    if trace.is_zero() || comp.is_zero() {
        return None;
    }
    if *trace <= comp {
        Some((trace.clone(), comp))
    } else {
        Some((comp, trace.clone()))
    }
}

/// Realized complement orbits as `(representative, complement)` pairs, ascending.
fn complement_orbits(table: &TraceTable) -> Vec<(BitVector, BitVector)> {
    let mut orbits: BTreeMap<BitVector, BitVector> = BTreeMap::new();
    for (mask, _) in table.iter() {
        if let Some((rep, comp)) = orbit_representative(mask) {
            orbits.insert(rep, comp);
        }
    }
    orbits.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementDifference {
    /// `(B, n_B − n_{U∖B})` for every realized nonconstant orbit.
    pub terms: Vec<(BitVector, i64)>,
    /// `Σ (n_B − n_{U∖B})·1_B`, which equals `ρ_R` up to a constant vector.
    pub representative: Vec<i64>,
    /// Class of the representative reduced mod 2.
    pub class: QuotientClass,
}

pub fn complement_difference_class(table: &TraceTable) -> Result<ComplementDifference> {
    let m = table.core_size();
    if m == 0 {
        return Err(Error::InvalidProblem("core is empty".into()));
    }
    let mut representative = vec![0i64; m];
    let mut terms = Vec::new();
    for (rep, comp) in complement_orbits(table) {
        let coeff = table.count(&rep) as i64 - table.count(&comp) as i64;
        for i in rep.iter_ones() {
            representative[i] += coeff;
        }
        terms.push((rep, coeff));
    }
    let r = rho(table);
    let offset = r[0] - representative[0];
    assert!(
        r.iter().zip(&representative).all(|(a, b)| a - b == offset),
        "complement-difference representative differs from rho by a non-constant vector"
    );
    let class = QuotientClass::of(&parity_vector(representative.iter().copied()));
    Ok(ComplementDifference {
        terms,
        representative,
        class,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NextBit {
    /// `Θ_m`, the class of `(ρ − c·1)/2^m mod 2`.
    Class(QuotientClass),
    /// `ρ` is not constant modulo `2^m`, so `Θ_m` is undefined.
    NotConstantModulo { modulus_log2: u32 },
}

fn pow2(m: u32) -> i128 {
    // Differences of i64 values are below 2^65 in magnitude.
    1i128 << m.min(100)
}

/// The next-bit obstruction of an integer vector over the core.
pub fn next_bit_obstruction(rho: &[i64], m: u32) -> NextBit {
    if rho.is_empty() {
        return NextBit::Class(QuotientClass(BitVector::zeros(0)));
    }
    let modulus = pow2(m);
    let c = rho[0] as i128;
    if rho.iter().any(|&x| (x as i128 - c) % modulus != 0) {
        return NextBit::NotConstantModulo { modulus_log2: m };
    }
    let bits: Vec<bool> = rho
        .iter()
        .map(|&x| ((x as i128 - c) / modulus).rem_euclid(2) == 1)
        .collect();
    NextBit::Class(QuotientClass::of(&BitVector::from_bools(&bits)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitForm {
    Class(QuotientClass),
    /// Some orbit difference is not divisible by `2^m`.
    DivisibilityFails {
        trace: BitVector,
        difference: i64,
    },
}

/// `Σ ((n_B − n_{U∖B}) / 2^m mod 2)·[1_B]` over realized orbits.
pub fn oriented_orbit_form(table: &TraceTable, m: u32) -> Result<OrbitForm> {
    let cd = complement_difference_class(table)?;
    let modulus = pow2(m);
    let size = table.core_size();
    let mut acc = vec![0i64; size];
    for (rep, diff) in &cd.terms {
        if (*diff as i128) % modulus != 0 {
            return Ok(OrbitForm::DivisibilityFails {
                trace: rep.clone(),
                difference: *diff,
            });
        }
        if ((*diff as i128) / modulus).rem_euclid(2) == 1 {
            for i in rep.iter_ones() {
                acc[i] += 1;
            }
        }
    }
    let class = QuotientClass::of(&parity_vector(acc.into_iter()));
    if let NextBit::Class(theta) = next_bit_obstruction(&rho(table), m) {
        assert_eq!(
            theta, class,
            "oriented orbit form disagrees with next-bit obstruction"
        );
    }
    Ok(OrbitForm::Class(class))
}

/// The graph `H_2` on the core whose edges are the q-heavy two-point traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairTraceGraph {
    /// Edges as pairs of core vertex ids, ascending.
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
    /// Smallest odd-cardinality trace with `n_C >= q`, if any.
    pub odd_heavy_trace: Option<BitVector>,
}

pub fn pair_trace_graph(table: &TraceTable, q: u64) -> Result<PairTraceGraph> {
    let m = table.core_size();
    if m < 2 {
        return Err(Error::InvalidProblem(
            "pair-trace graph needs |U| >= 2".into(),
        ));
    }
    let core = table.core().as_slice();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut edges = Vec::new();
    let mut odd_heavy_trace = None;
    for (mask, _) in table.available(q) {
        let ones: Vec<usize> = mask.iter_ones().collect();
        if ones.len() == 2 {
            edges.push((core[ones[0]], core[ones[1]]));
            let (a, b) = (find(&mut parent, ones[0]), find(&mut parent, ones[1]));
            parent[a] = b;
        }
        if ones.len() % 2 == 1 && odd_heavy_trace.is_none() {
            odd_heavy_trace = Some(mask.clone());
        }
    }
    edges.sort_unstable();
    let root = find(&mut parent, 0);
    let connected = (1..m).all(|i| find(&mut parent, i) == root);
    Ok(PairTraceGraph {
        edges,
        connected,
        odd_heavy_trace,
    })
}

/// Partition into twin classes: `u ~ v` iff `N(u) ∖ {v} = N(v) ∖ {u}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodDiversity {
    /// Classes in order of their smallest vertex; members ascending.
    pub classes: Vec<Vec<usize>>,
}

impl NeighborhoodDiversity {
    pub fn value(&self) -> usize {
        self.classes.len()
    }

    pub fn largest_class(&self) -> Option<&[usize]> {
        self.classes
            .iter()
            .max_by_key(|c| c.len())
            .map(Vec::as_slice)
    }
}

pub fn are_twins(g: &Graph, u: usize, v: usize) -> bool {
    let mut nu = g.row(u).clone();
    let mut nv = g.row(v).clone();
    nu.set(v, false);
    nv.set(u, false);
    nu == nv
}

pub fn neighborhood_diversity(g: &Graph) -> NeighborhoodDiversity {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..g.order() {
        match classes.iter_mut().find(|c| are_twins(g, c[0], v)) {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    NeighborhoodDiversity { classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    /// Core {1,2,3,4} = ids 0..4, tail x = 4 with trace {1}, y = 5 with trace {2,3,4}.
    fn complement_sum_example() -> (Graph, VertexSet, VertexSet) {
        let g = Graph::from_edges(6, [(4, 0), (5, 1), (5, 2), (5, 3)]).unwrap();
        (g, VertexSet::new(0..4), VertexSet::new([4, 5]))
    }

    #[test]
    fn empty_tail_gives_empty_table() {
        let g = cycle(5);
        let t = compute_traces(&g, &VertexSet::new([0, 1]), &VertexSet::default()).unwrap();
        assert!(t.is_empty());
        assert_eq!(rho(&t), vec![0, 0]);
    }

    #[test]
    fn overlapping_core_and_tail_rejected() {
        let g = cycle(5);
        assert!(matches!(
            compute_traces(&g, &VertexSet::new([0, 1]), &VertexSet::new([1, 2])),
            Err(Error::Overlap(1))
        ));
    }

    #[test]
    fn complementary_traces_cancel() {
        let (g, core, tail) = complement_sum_example();
        let t = compute_traces(&g, &core, &tail).unwrap();
        assert_eq!(t.count(&t.mask_of(&[0]).unwrap()), 1);
        assert_eq!(t.count(&t.mask_of(&[1, 2, 3]).unwrap()), 1);
        assert_eq!(rho(&t), vec![1, 1, 1, 1]);
        let cd = complement_difference_class(&t).unwrap();
        assert_eq!(cd.terms, vec![(t.mask_of(&[0]).unwrap(), 0)]);
        assert!(cd.class.is_zero());
        for m in 0..6 {
            assert_eq!(
                next_bit_obstruction(&rho(&t), m),
                NextBit::Class(QuotientClass::of(&BitVector::zeros(4)))
            );
            assert!(
                matches!(oriented_orbit_form(&t, m).unwrap(), OrbitForm::Class(c) if c.is_zero())
            );
        }
    }

    #[test]
    fn full_trace_is_constant() {
        let g = complete_bipartite(3, 2);
        let t = compute_traces(&g, &VertexSet::new([0, 1, 2]), &VertexSet::new([3, 4])).unwrap();
        let cd = complement_difference_class(&t).unwrap();
        assert!(cd.terms.is_empty());
        assert!(cd.class.is_zero());
    }

    #[test]
    fn next_bit_examples() {
        match next_bit_obstruction(&[0, 2, 0, 0], 1) {
            NextBit::Class(c) => assert_eq!(c.coords(), &BitVector::from_indices(3, [0]).unwrap()),
            other => panic!("{other:?}"),
        }
        assert!(
            next_bit_obstruction(&[3, 3, 3], 0)
                == NextBit::Class(QuotientClass::of(&BitVector::zeros(3)))
        );
        assert_eq!(
            next_bit_obstruction(&[0, 1], 1),
            NextBit::NotConstantModulo { modulus_log2: 1 }
        );
    }

    #[test]
    fn divisibility_failure_is_reported() {
        let (g, core, _) = complement_sum_example();
        let t = compute_traces(&g, &core, &VertexSet::new([4])).unwrap();
        assert!(matches!(
            oriented_orbit_form(&t, 1).unwrap(),
            OrbitForm::DivisibilityFails { difference: 1, .. }
        ));
    }

    #[test]
    fn pair_trace_graph_basics() {
        let g = Graph::empty(3);
        let t = compute_traces(&g, &VertexSet::new([0, 1]), &VertexSet::new([2])).unwrap();
        let h = pair_trace_graph(&t, 1).unwrap();
        assert!(h.edges.is_empty());
        assert!(!h.connected);
        assert!(pair_trace_graph(
            &compute_traces(&g, &VertexSet::new([0]), &VertexSet::default()).unwrap(),
            1
        )
        .is_err());
    }

    #[test]
    fn nd_examples() {
        assert_eq!(neighborhood_diversity(&complete(6)).value(), 1);
        assert_eq!(neighborhood_diversity(&complete_bipartite(3, 4)).value(), 2);
        let c5 = cycle(5);
        let brute = (0..5)
            .map(|u| (0..5).filter(|&v| are_twins(&c5, u, v)).count())
            .all(|k| k == 1);
        assert!(brute);
        assert_eq!(neighborhood_diversity(&c5).value(), 5);
    }
}
