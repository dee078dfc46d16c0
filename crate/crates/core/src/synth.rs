//! Graph instances with a prescribed trace reservoir and top-bit label.
//!
//! Given a core size `m`, a power of two `q`, the traces that must be
//! available (multiplicity at least `q`) and a label `b`, [`synthesize`]
//! builds a graph with a q-modular witness `A = U ∪ R` whose available
//! nonconstant traces are exactly the prescribed ones and whose top-bit label
//! on `U` is exactly `b`. Padding uses unavailable traces (multiplicity below
//! `q`), core-internal edges, and constant traces `∅` and `U`; the constant
//! traces may end up available but contribute nothing modulo constants.
//!
//! Core vertices are `0..m`, named `1..m`; tail vertices are named `x1, x2, ...`.

use std::collections::BTreeMap;

use crate::absorb::AbsorptionProblem;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::{Graph, VertexSet};

pub const MAX_SYNTH_CORE: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub core_size: usize,
    pub q: u64,
    /// Traces (masks over core positions) that must be available.
    pub available: Vec<BitVector>,
    /// Top-bit label over core positions.
    pub label: BitVector,
}

#[derive(Clone, Debug)]
pub struct SyntheticInstance {
    pub graph: Graph,
    pub witness: VertexSet,
    pub core: VertexSet,
    pub q: u64,
}

impl SyntheticInstance {
    pub fn problem(&self) -> Result<AbsorptionProblem<'_>> {
        AbsorptionProblem::from_parts(&self.graph, self.witness.clone(), self.core.clone(), self.q)
    }
}

/// One adjustable contribution to the core degrees.
struct Generator {
    /// Core positions that gain one per unit.
    support: Vec<usize>,
    counts: std::ops::Range<usize>,
    kind: GeneratorKind,
}

#[derive(Clone, Copy)]
enum GeneratorKind {
    Trace(u64),
    Edge(usize, usize),
}

/// States are core increments modulo 2q, normalized so position 0 is zero,
/// packed as base-2q digits for positions 1..m.
struct StateSpace {
    m: usize,
    modulus: usize,
}

impl StateSpace {
    fn size(&self) -> usize {
        self.modulus.pow(self.m as u32 - 1)
    }

    fn encode(&self, v: &[usize]) -> usize {
        (1..self.m).rev().fold(0, |acc, i| {
            acc * self.modulus + (v[i] + self.modulus - v[0] % self.modulus) % self.modulus
        })
    }

    fn add(&self, state: usize, g: &Generator, count: usize) -> usize {
        let mut digits = self.decode(state);
        for &i in &g.support {
            digits[i] += count;
        }
        self.encode(&digits)
    }

    fn decode(&self, mut state: usize) -> Vec<usize> {
        let mut v = vec![0; self.m];
        for d in v.iter_mut().skip(1) {
            *d = state % self.modulus;
            state /= self.modulus;
        }
        v
    }
}

fn validate(spec: &InstanceSpec) -> Result<()> {
    let m = spec.core_size;
    if m == 0 || m > MAX_SYNTH_CORE {
        return Err(Error::InvalidProblem(format!(
            "core size must be in 1..={MAX_SYNTH_CORE}"
        )));
    }
    if spec.q < 2 || !spec.q.is_power_of_two() || spec.q > 64 {
        return Err(Error::InvalidModulus(
            spec.q,
            "q must be a power of two in 2..=64",
        ));
    }
    if spec.label.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: spec.label.len(),
        });
    }
    if let Some(b) = spec.available.iter().find(|b| b.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    Ok(())
}

fn mask_bits(b: &BitVector) -> u64 {
    b.iter_ones().fold(0, |acc, i| acc | 1 << i)
}

/// Synthesizes an instance for every label of one reservoir at once.
pub struct Synthesizer {
    m: usize,
    q: usize,
    prescribed: Vec<u64>,
    generators: Vec<Generator>,
    space: StateSpace,
    /// `choice[g][s]`: count of generator `g` used to first reach `s` in layer `g`.
    choice: Vec<Vec<Option<u8>>>,
}

impl Synthesizer {
    pub fn new(core_size: usize, q: u64, available: &[BitVector]) -> Result<Self> {
        validate(&InstanceSpec {
            core_size,
            q,
            available: available.to_vec(),
            label: BitVector::zeros(core_size),
        })?;
        let m = core_size;
        let q = q as usize;
        let full = (1u64 << m) - 1;
        let mut prescribed: Vec<u64> = available.iter().map(mask_bits).collect();
        prescribed.sort_unstable();
        prescribed.dedup();

        let mut generators = Vec::new();
        for u in 0..m {
            for v in u + 1..m {
                generators.push(Generator {
                    support: vec![u, v],
                    counts: 0..2,
                    kind: GeneratorKind::Edge(u, v),
                });
            }
        }
        // Singletons first so padding prefers small traces.
        let mut masks: Vec<u64> = (1..full).collect();
        masks.sort_by_key(|b| (b.count_ones(), *b));
        for b in masks.into_iter().chain([0, full]) {
            let counts = if prescribed.contains(&b) {
                q..3 * q
            } else if b == 0 || b == full {
                // Extra full-trace vertices are added after the search.
                continue;
            } else {
                0..q
            };
            generators.push(Generator {
                support: (0..m).filter(|i| b >> i & 1 == 1).collect(),
                counts,
                kind: GeneratorKind::Trace(b),
            });
        }

        let space = StateSpace { m, modulus: 2 * q };
        let size = space.size();
        let mut reached = vec![false; size];
        reached[0] = true;
        let mut choice = Vec::with_capacity(generators.len());
        for g in &generators {
            let mut next = vec![None; size];
            for s in (0..size).filter(|&s| reached[s]) {
                for c in g.counts.clone() {
                    let t = space.add(s, g, c);
                    if next[t].is_none() {
                        next[t] = Some(c as u8);
                    }
                }
            }
            reached = next.iter().map(Option::is_some).collect();
            choice.push(next);
        }
        Ok(Self {
            m,
            q,
            prescribed,
            generators,
            space,
            choice,
        })
    }

    /// Builds the instance realizing `label`.
    pub fn instance(&self, label: &BitVector) -> Result<SyntheticInstance> {
        let (m, q) = (self.m, self.q);
        if label.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: label.len(),
            });
        }
        let target: Vec<usize> = (0..m).map(|i| if label.get(i) { q } else { 0 }).collect();
        let mut state = self.space.encode(&target);
        if self.choice.last().is_some_and(|c| c[state].is_none()) {
            return Err(Error::InvalidProblem(
                "label is not realizable with this reservoir".into(),
            ));
        }
        let mut counts = vec![0usize; self.generators.len()];
        for gi in (0..self.generators.len()).rev() {
            let c = self.choice[gi][state].expect("reachable state has a recorded choice") as usize;
            counts[gi] = c;
            // Step back: subtract c units of this generator.
            let g = &self.generators[gi];
            state = self.space.add(state, g, (2 * q - c % (2 * q)) % (2 * q));
        }
        debug_assert_eq!(state, 0);

        let mut edges = Vec::new();
        let mut traces: BTreeMap<u64, usize> = BTreeMap::new();
        let mut degree = vec![0usize; m];
        for (g, &c) in self.generators.iter().zip(&counts) {
            if c == 0 {
                continue;
            }
            match g.kind {
                GeneratorKind::Edge(u, v) => edges.push((u, v)),
                GeneratorKind::Trace(b) => {
                    traces.insert(b, c);
                }
            }
            for &i in &g.support {
                degree[i] += c;
            }
        }
        let full = (1u64 << m) - 1;

        // degree[u] − q·b_u is constant modulo 2q; pick the residue r and
        // the number of extra full-trace vertices z.
        let modulus = 2 * q;
        let k = (degree[0] + modulus - target[0]) % modulus;
        let (r, z) = if k < q {
            (k, 0)
        } else if k > q {
            (0, modulus - k)
        } else {
            (0, q)
        };
        if z > 0 {
            *traces.entry(full).or_insert(0) += z;
        }

        let mut tail_traces = Vec::new();
        for (&b, &c) in &traces {
            tail_traces.extend(std::iter::repeat_n(b, c));
        }
        let targets: Vec<usize> = tail_traces
            .iter()
            .map(|b| (r + q * m - b.count_ones() as usize) % q)
            .collect();
        let (pads, tail_edges) = tail_layout(&targets, r, q)
            .ok_or_else(|| Error::Internal("no tail-internal layout found".into()))?;

        let order = m + tail_traces.len() + pads;
        for (i, &b) in tail_traces.iter().enumerate() {
            let x = m + i;
            edges.extend((0..m).filter(|u| b >> u & 1 == 1).map(|u| (u, x)));
        }
        edges.extend(tail_edges.into_iter().map(|(x, y)| (m + x, m + y)));
        let names = (0..m)
            .map(|u| (u + 1).to_string())
            .chain((1..=order - m).map(|i| format!("x{i}")))
            .collect();
        let graph = Graph::from_edges(order, edges)?.with_names(names)?;
        let instance = SyntheticInstance {
            graph,
            witness: VertexSet::range(order),
            core: VertexSet::range(m),
            q: q as u64,
        };
        self.check(&instance, label, r)?;
        Ok(instance)
    }

    fn check(&self, instance: &SyntheticInstance, label: &BitVector, r: usize) -> Result<()> {
        let problem = instance.problem()?;
        let full = (1u64 << self.m) - 1;
        let ok = problem.lift() == r as u64
            && &problem.label().bits == label
            && problem.table().iter().all(|(b, realizers)| {
                let bits = mask_bits(b);
                bits == 0
                    || bits == full
                    || (realizers.len() >= self.q) == self.prescribed.contains(&bits)
            })
            && self
                .prescribed
                .iter()
                .all(|&b| problem.table().count(&BitVector::from_u64(self.m, b)) >= self.q);
        if ok {
            Ok(())
        } else {
            Err(Error::Internal(
                "synthesized instance does not match the requested reservoir and label".into(),
            ))
        }
    }
}

/// Tail-internal edges giving tail vertex `i` a degree congruent to
/// `targets[i]` modulo `q`, after appending some `∅`-trace padding vertices.
/// Returns the padding count and edges over tail indices.
fn tail_layout(targets: &[usize], r: usize, q: usize) -> Option<(usize, Vec<(usize, usize)>)> {
    for pads in 0..=2 * q + 4 {
        for pad_target in [r, r + q] {
            let mut degrees: Vec<usize> = targets.to_vec();
            degrees.extend(std::iter::repeat_n(pad_target, pads));
            if let Some(edges) = havel_hakimi(&degrees) {
                return Some((pads, edges));
            }
        }
    }
    None
}

/// A simple graph with the given degree sequence, if one exists.
fn havel_hakimi(degrees: &[usize]) -> Option<Vec<(usize, usize)>> {
    if degrees.iter().sum::<usize>() % 2 == 1 {
        return None;
    }
    let mut remaining: Vec<(usize, usize)> = degrees.iter().copied().zip(0..).collect();
    let mut edges = Vec::new();
    loop {
        remaining.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let Some(&(d, v)) = remaining.first() else {
            return Some(edges);
        };
        if d == 0 {
            return Some(edges);
        }
        if d >= remaining.len() {
            return None;
        }
        remaining[0].0 = 0;
        for entry in remaining.iter_mut().skip(1).take(d) {
            if entry.0 == 0 {
                return None;
            }
            entry.0 -= 1;
            edges.push((v.min(entry.1), v.max(entry.1)));
        }
    }
}

/// One-shot form of [`Synthesizer`].
pub fn synthesize(spec: &InstanceSpec) -> Result<SyntheticInstance> {
    validate(spec)?;
    Synthesizer::new(spec.core_size, spec.q, &spec.available)?.instance(&spec.label)
}

/// Small hand-built instances used in documentation, fixtures and tests.
pub mod examples {
    use super::*;

    fn named(order: usize, core: usize, edges: &[(usize, usize)]) -> Graph {
        let names = (0..order)
            .map(|v| {
                if v < core {
                    (v + 1).to_string()
                } else {
                    format!("x{}", v + 1 - core)
                }
            })
            .collect();
        Graph::from_edges(order, edges.iter().copied())
            .and_then(|g| g.with_names(names))
            .expect("static example is well formed")
    }

    /// Core `1..4`; tail `x1` with trace `{1}` and `x2` with trace `{2,3,4}`.
    /// The tail function is constant although the complement orbit has odd
    /// total multiplicity.
    pub fn complement_sum() -> (Graph, VertexSet, VertexSet) {
        let g = named(6, 4, &[(0, 4), (1, 5), (2, 5), (3, 5)]);
        (g, VertexSet::range(4), VertexSet::new([4, 5]))
    }

    /// A 2-modular witness on core `1..4` with label `(1,0,1,0)` and tail of
    /// one equal-trace pair on `{1}` and one on `{3}`; deleting the tail
    /// leaves a 4-modular core.
    pub fn twin_pair_lift() -> SyntheticInstance {
        let g = named(8, 4, &[(0, 4), (0, 5), (4, 5), (2, 6), (2, 7), (6, 7)]);
        SyntheticInstance {
            graph: g,
            witness: VertexSet::range(8),
            core: VertexSet::range(4),
            q: 2,
        }
    }

    /// Core `1..5` whose heavy pair traces form the path `1-2-3-4-5`, each with
    /// multiplicity `q`, and label `(1,0,1,0,0)`.
    pub fn pair_trace_path(q: u64) -> Result<SyntheticInstance> {
        let available = [[0, 1], [1, 2], [2, 3], [3, 4]]
            .iter()
            .map(|p| BitVector::from_indices(5, p.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        synthesize(&InstanceSpec {
            core_size: 5,
            q,
            available,
            label: BitVector::from_indices(5, [0, 2])?,
        })
    }

    /// Core `1..4` with only even traces `{1,2}` and `{3,4}` available and an
    /// odd label `(1,0,0,0)`: not absorbable.
    pub fn even_traces_only(q: u64) -> Result<SyntheticInstance> {
        let available = vec![
            BitVector::from_indices(4, [0, 1])?,
            BitVector::from_indices(4, [2, 3])?,
        ];
        synthesize(&InstanceSpec {
            core_size: 4,
            q,
            available,
            label: BitVector::from_indices(4, [0])?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::absorb::Certificate;

    fn all_labels(m: usize) -> impl Iterator<Item = BitVector> {
        (0..1u64 << m).map(move |b| BitVector::from_u64(m, b))
    }

    #[test]
    fn havel_hakimi_basics() {
        assert_eq!(havel_hakimi(&[0, 0]), Some(vec![]));
        assert!(havel_hakimi(&[1]).is_none());
        assert!(havel_hakimi(&[3, 1, 1]).is_none());
        let edges = havel_hakimi(&[2, 2, 2]).unwrap();
        assert_eq!(edges.len(), 3);
    }

    #[test]
    fn every_label_for_small_reservoirs() {
        for q in [2u64, 4] {
            for m in 1..=4 {
                let pair = if m >= 2 {
                    vec![BitVector::from_indices(m, [0, 1]).unwrap()]
                } else {
                    vec![]
                };
                for available in [vec![], pair] {
                    let s = Synthesizer::new(m, q, &available).unwrap();
                    for b in all_labels(m) {
                        // With two core vertices and no available singleton the
                        // degree difference is below q, so the label is constant.
                        let forced = m == 2 && b.count_ones() == 1;
                        match s.instance(&b) {
                            Ok(inst) => assert_eq!(inst.problem().unwrap().label().bits, b),
                            Err(e) => assert!(forced, "m={m} q={q} b={b:?}: {e}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn empty_reservoir_absorbs_only_constant_labels() {
        let s = Synthesizer::new(3, 2, &[]).unwrap();
        for b in all_labels(3) {
            let inst = s.instance(&b).unwrap();
            let p = inst.problem().unwrap();
            let constant = b.is_zero() || b.count_ones() == 3;
            assert_eq!(p.solve_core_correction().unwrap().is_deletion(), constant);
        }
    }

    #[test]
    fn twin_pair_lift_is_consistent() {
        let inst = examples::twin_pair_lift();
        let p = inst.problem().unwrap();
        assert_eq!(p.lift(), 0);
        assert_eq!(p.label().bits, BitVector::from_indices(4, [0, 2]).unwrap());
    }

    #[test]
    fn pair_trace_path_example() {
        let inst = examples::pair_trace_path(2).unwrap();
        let p = inst.problem().unwrap();
        let Certificate::Deletion(d) = p.solve_core_correction().unwrap() else {
            panic!("expected a deletion certificate");
        };
        let traces: Vec<Vec<usize>> = d
            .tuples
            .iter()
            .map(|t| p.table().members(&t.trace))
            .collect();
        assert_eq!(traces, vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn even_traces_example_is_cut() {
        let inst = examples::even_traces_only(2).unwrap();
        let p = inst.problem().unwrap();
        assert!(!p.solve_core_correction().unwrap().is_deletion());
    }
}
