//! Modular witnesses and top-bit labels.
//!
//! A vertex set is q-modular when all of its induced degrees agree modulo q.
//! For a dyadic witness (q a power of two) the degree of each member modulo
//! 2q is `d + q·b(v)` for a lift `d` of the common residue; `b` is the top-bit
//! label and only its class modulo constant vectors matters.

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Modularity {
    /// All degrees agree mod q. `residue` is `None` for the empty set.
    Modular { residue: Option<u64> },
    /// Two members whose degrees differ mod q.
    NotModular { u: usize, v: usize },
}

impl Modularity {
    pub fn is_modular(self) -> bool {
        matches!(self, Modularity::Modular { .. })
    }
}

pub fn is_q_modular(g: &Graph, set: &VertexSet, q: u64) -> Result<Modularity> {
    if q < 1 {
        return Err(Error::InvalidModulus(q, "must be at least 1"));
    }
    let degrees = g.induced_degrees(set)?;
    let mut it = degrees.iter();
    let Some((&u, &du)) = it.next() else {
        return Ok(Modularity::Modular { residue: None });
    };
    let residue = du as u64 % q;
    for (&v, &dv) in it {
        if dv as u64 % q != residue {
            return Ok(Modularity::NotModular { u, v });
        }
    }
    Ok(Modularity::Modular {
        residue: Some(residue),
    })
}

fn check_power_of_two(q: u64) -> Result<()> {
    if q >= 1 && q.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidModulus(q, "must be a power of two"))
    }
}

/// A nonempty q-modular set with q a power of two.
#[derive(Clone, Debug)]
pub struct ModularWitness<'g> {
    graph: &'g Graph,
    set: VertexSet,
    q: u64,
    residue: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// `|A| <= q`, so `G[A]` is regular of this degree.
    Regular(usize),
    TooLarge,
}

impl<'g> ModularWitness<'g> {
    pub fn new(graph: &'g Graph, set: VertexSet, q: u64) -> Result<Self> {
        check_power_of_two(q)?;
        if set.is_empty() {
            return Err(Error::InvalidProblem("witness set is empty".into()));
        }
        match is_q_modular(graph, &set, q)? {
            Modularity::Modular { residue } => Ok(Self {
                graph,
                set,
                q,
                residue: residue.expect("nonempty set has a residue"),
            }),
            Modularity::NotModular { u, v } => {
                let deg = graph.induced_degrees(&set)?;
                Err(Error::NotModular {
                    q,
                    u,
                    deg_u: deg[&u],
                    v,
                    deg_v: deg[&v],
                })
            }
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn set(&self) -> &VertexSet {
        &self.set
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Common degree residue in `[0, q)`.
    pub fn residue(&self) -> u64 {
        self.residue
    }

    fn degree_in_witness(&self, v: usize, mask: &BitVector) -> u64 {
        self.graph.degree_into(v, mask) as u64
    }

    /// If `|A| <= q`, degrees lie in `[0, q-1]` and agree mod q, hence are equal.
    pub fn terminal_check(&self) -> Terminal {
        if self.set.len() as u64 > self.q {
            return Terminal::TooLarge;
        }
        let degrees = self
            .graph
            .induced_degrees(&self.set)
            .expect("witness members are in range");
        let first = *degrees.values().next().expect("witness is nonempty");
        assert!(
            degrees.values().all(|&d| d == first),
            "q-modular set of size <= q is not regular"
        );
        Terminal::Regular(first)
    }

    /// Top-bit labels on `subset` with the canonical lift `d = residue`.
    pub fn top_bit_label(&self, subset: &VertexSet) -> Result<TopBitLabel> {
        self.top_bit_label_with_lift(subset, self.residue)
    }

    /// Top-bit labels relative to an arbitrary lift `lift ≡ residue (mod q)`.
    pub fn top_bit_label_with_lift(&self, subset: &VertexSet, lift: u64) -> Result<TopBitLabel> {
        if lift % self.q != self.residue {
            return Err(Error::InvalidProblem(format!(
                "lift {lift} is not congruent to residue {} mod {}",
                self.residue, self.q
            )));
        }
        if let Some(v) = subset.first_outside(&self.set) {
            return Err(Error::NotSubset {
                what: "label subset must lie in the witness",
                vertex: v,
            });
        }
        let modulus = 2 * self.q;
        let lift = lift % modulus;
        let mask = self.set.mask(self.graph.order());
        let bits = subset
            .iter()
            .map(|v| {
                let deg = self.degree_in_witness(v, &mask) % modulus;
                (deg + modulus - lift) % modulus >= self.q
            })
            .collect::<Vec<_>>();
        Ok(TopBitLabel {
            base_lift: lift,
            q: self.q,
            vertices: subset.clone(),
            bits: BitVector::from_bools(&bits),
        })
    }

    /// Whether `ρ_R(v) − q·b(v)` is constant mod 2q on `wset`, with
    /// `R = A ∖ wset`. Equivalent to `wset` being 2q-modular.
    pub fn affine_lift_check(&self, wset: &VertexSet) -> Result<bool> {
        if let Some(v) = wset.first_outside(&self.set) {
            return Err(Error::NotSubset {
                what: "lift set must lie in the witness",
                vertex: v,
            });
        }
        let tail = self.set.difference(wset);
        let tail_mask = tail.mask(self.graph.order());
        let label = self.top_bit_label(wset)?;
        let modulus = 2 * self.q as i64;
        let mut values = wset.iter().enumerate().map(|(i, v)| {
            let rho = self.graph.degree_into(v, &tail_mask) as i64;
            let b = i64::from(label.bits.get(i));
            (rho - self.q as i64 * b).rem_euclid(modulus)
        });
        let Some(first) = values.next() else {
            return Ok(true);
        };
        Ok(values.all(|x| x == first))
    }
}

/// Top-bit labels of a set of witness vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopBitLabel {
    /// The lift `d` modulo 2q.
    pub base_lift: u64,
    pub q: u64,
    pub vertices: VertexSet,
    /// `bits[i]` labels `vertices[i]`.
    pub bits: BitVector,
}

impl TopBitLabel {
    pub fn label(&self, v: usize) -> Option<bool> {
        self.vertices.position(v).map(|i| self.bits.get(i))
    }
}

/// Coordinates of the class of `x` in `F2^U / <1_U>` relative to base vertex
/// `u0`: `(x(u) + x(u0))` for `u ∈ U ∖ {u0}` in ascending order.
pub fn quotient_coords(core: &VertexSet, x: &BitVector, u0: usize) -> Result<BitVector> {
    if x.len() != core.len() {
        return Err(Error::DimensionMismatch {
            expected: core.len(),
            found: x.len(),
        });
    }
    let base = core.position(u0).ok_or(Error::NotSubset {
        what: "base vertex must lie in the core",
        vertex: u0,
    })?;
    Ok(quotient_coords_at(x, base))
}

/// [`quotient_coords`] with the base given as a position in `0..x.len()`.
pub(crate) fn quotient_coords_at(x: &BitVector, base: usize) -> BitVector {
    let shift = x.get(base);
    let bits: Vec<bool> = (0..x.len())
        .filter(|&i| i != base)
        .map(|i| x.get(i) ^ shift)
        .collect();
    BitVector::from_bools(&bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    #[test]
    fn modularity_examples() {
        let c5 = cycle(5);
        assert_eq!(
            is_q_modular(&c5, &c5.all_vertices(), 1000).unwrap(),
            Modularity::Modular { residue: Some(2) }
        );
        let star = star(3);
        assert_eq!(
            is_q_modular(&star, &star.all_vertices(), 2).unwrap(),
            Modularity::Modular { residue: Some(1) }
        );
        assert!(matches!(
            is_q_modular(&star, &star.all_vertices(), 4).unwrap(),
            Modularity::NotModular { .. }
        ));
        assert!(is_q_modular(&star, &star.all_vertices(), 0).is_err());
    }

    #[test]
    fn terminal_examples() {
        let c5 = cycle(5);
        let w = ModularWitness::new(&c5, c5.all_vertices(), 8).unwrap();
        assert_eq!(w.terminal_check(), Terminal::Regular(2));

        let g = Graph::empty(3);
        let w = ModularWitness::new(&g, g.all_vertices(), 4).unwrap();
        assert_eq!(w.terminal_check(), Terminal::Regular(0));

        let s = star(3);
        let w = ModularWitness::new(&s, s.all_vertices(), 2).unwrap();
        assert_eq!(w.terminal_check(), Terminal::TooLarge);
    }

    #[test]
    fn witness_rejects_bad_inputs() {
        let s = star(3);
        assert!(matches!(
            ModularWitness::new(&s, s.all_vertices(), 4),
            Err(Error::NotModular { .. })
        ));
        assert!(ModularWitness::new(&s, s.all_vertices(), 3).is_err());
        assert!(ModularWitness::new(&s, VertexSet::default(), 2).is_err());
    }

    #[test]
    fn defect_free_and_all_ones_labels() {
        // C5 degrees are all 2: with q = 2 and d = 0 every label is 1.
        let c5 = cycle(5);
        let w = ModularWitness::new(&c5, c5.all_vertices(), 2).unwrap();
        let lab = w.top_bit_label(&c5.all_vertices()).unwrap();
        assert_eq!(lab.base_lift, 0);
        assert_eq!(lab.bits.count_ones(), 5);
        let coords = quotient_coords(&lab.vertices, &lab.bits, 0).unwrap();
        assert!(coords.is_zero());
        // With lift d = 2 the labels vanish.
        let lab2 = w.top_bit_label_with_lift(&c5.all_vertices(), 2).unwrap();
        assert!(lab2.bits.is_zero());
        assert!(w.top_bit_label_with_lift(&c5.all_vertices(), 1).is_err());
    }

    #[test]
    fn quotient_coordinate_examples() {
        let core = VertexSet::new([1, 2, 3, 4, 5]);
        let ones = BitVector::ones(5);
        assert!(quotient_coords(&core, &ones, 3).unwrap().is_zero());
        let point = BitVector::from_indices(5, [0]).unwrap();
        assert_eq!(
            quotient_coords(&core, &point, 1).unwrap(),
            BitVector::ones(4)
        );
        let b = BitVector::from_indices(5, [0, 2]).unwrap();
        assert_eq!(
            quotient_coords(&core, &b, 5).unwrap(),
            BitVector::from_indices(4, [0, 2]).unwrap()
        );
        assert!(quotient_coords(&core, &b, 9).is_err());
    }

    #[test]
    fn empty_tail_lift_reduces_to_constant_labels() {
        let s = star(3);
        let w = ModularWitness::new(&s, s.all_vertices(), 2).unwrap();
        // Degrees 3,1,1,1 mod 4 with d = 1: labels 1,0,0,0, not constant.
        assert!(!w.affine_lift_check(&s.all_vertices()).unwrap());
        assert!(w.affine_lift_check(&VertexSet::new([1, 2, 3])).unwrap());
        assert!(w.affine_lift_check(&VertexSet::default()).unwrap());
    }
}
