//! The absorption-or-obstruction engine.
//!
//! Fix a power of two `q`, a q-modular witness `A`, and a core `U ⊆ A` with
//! tail `R = A ∖ U`. Deleting `q` tail vertices of a common trace `B` shifts
//! every core degree by `q·1_B`, i.e. flips the top bit on `B`. The core can
//! be synchronized modulo 2q exactly when the class of the top-bit label lies
//! in the span of the available trace classes (`n_B >= q`) in
//! `F2^U / <1_U>`. Otherwise an even set `Y ⊆ U` meets every available trace
//! evenly and the label oddly.
//!
//! Quotient classes are written in coordinates relative to the smallest core
//! vertex `u0`.

pub mod criteria;
pub mod document;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector, SolveOutcome};
use crate::graph::{Graph, VertexSet};
use crate::traces::{compute_traces, pair_trace_graph, QuotientClass, TraceTable};
use crate::witness::{is_q_modular, quotient_coords_at, ModularWitness, TopBitLabel};

pub use document::{CertificateDocument, CertificateKind, CERTIFICATE_SCHEMA};

/// The linear system `M ε = t` of a trace table against top-bit labels.
#[derive(Clone, Debug)]
pub struct CoreSystem {
    core_size: usize,
    available: Vec<BitVector>,
    matrix: BitMatrix,
}

/// Solution of a [`CoreSystem`] for one label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Correction {
    /// Indices into [`CoreSystem::available`] of the traces to delete once.
    Absorb(Vec<usize>),
    /// Indicator of the parity cut over core positions.
    Cut(BitVector),
}

impl CoreSystem {
    pub fn new(table: &TraceTable, q: u64) -> Result<Self> {
        let core_size = table.core_size();
        if core_size == 0 {
            return Err(Error::InvalidProblem("core is empty".into()));
        }
        let available: Vec<BitVector> = table.available(q).map(|(m, _)| m.clone()).collect();
        let columns: Vec<BitVector> = available.iter().map(|b| quotient_coords_at(b, 0)).collect();
        let matrix = BitMatrix::from_columns(core_size - 1, &columns)?;
        Ok(Self {
            core_size,
            available,
            matrix,
        })
    }

    pub fn available(&self) -> &[BitVector] {
        &self.available
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        gf2::rank(&self.matrix)
    }

    /// Whether the available classes span the `(|U|−1)`-dimensional quotient.
    pub fn spans(&self) -> bool {
        self.rank() == self.core_size - 1
    }

    /// Indices of available traces forming a basis of their span.
    pub fn basis(&self) -> Vec<usize> {
        gf2::column_basis(&self.matrix)
    }

    /// Solves for `label` (indexed by core positions).
    pub fn solve(&self, label: &BitVector) -> Result<Correction> {
        if label.len() != self.core_size {
            return Err(Error::DimensionMismatch {
                expected: self.core_size,
                found: label.len(),
            });
        }
        let target = quotient_coords_at(label, 0);
        match gf2::solve_or_dual(&self.matrix, &target)? {
            SolveOutcome::Solution(eps) => Ok(Correction::Absorb(eps.iter_ones().collect())),
            SolveOutcome::Dual(y) => {
                // y lives on U ∖ {u0}; add u0 when needed to make Y even.
                let mut cut = BitVector::zeros(self.core_size);
                for i in y.iter_ones() {
                    cut.set(i + 1, true);
                }
                if y.count_ones() % 2 == 1 {
                    cut.set(0, true);
                }
                Ok(Correction::Cut(cut))
            }
        }
    }
}

/// A fixed-core absorption instance.
#[derive(Clone, Debug)]
pub struct AbsorptionProblem<'g> {
    witness: ModularWitness<'g>,
    core: VertexSet,
    tail: VertexSet,
    label: TopBitLabel,
    table: TraceTable,
}

impl<'g> AbsorptionProblem<'g> {
    pub fn new(witness: ModularWitness<'g>, core: VertexSet) -> Result<Self> {
        if core.is_empty() {
            return Err(Error::InvalidProblem("core is empty".into()));
        }
        if let Some(v) = core.first_outside(witness.set()) {
            return Err(Error::NotSubset {
                what: "core must lie in the witness",
                vertex: v,
            });
        }
        let tail = witness.set().difference(&core);
        let label = witness.top_bit_label(&core)?;
        let table = compute_traces(witness.graph(), &core, &tail)?;
        Ok(Self {
            witness,
            core,
            tail,
            label,
            table,
        })
    }

    /// Convenience constructor from raw parts.
    pub fn from_parts(
        graph: &'g Graph,
        witness: VertexSet,
        core: VertexSet,
        q: u64,
    ) -> Result<Self> {
        Self::new(ModularWitness::new(graph, witness, q)?, core)
    }

    pub fn graph(&self) -> &'g Graph {
        self.witness.graph()
    }

    pub fn witness(&self) -> &ModularWitness<'g> {
        &self.witness
    }

    pub fn core(&self) -> &VertexSet {
        &self.core
    }

    pub fn tail(&self) -> &VertexSet {
        &self.tail
    }

    pub fn label(&self) -> &TopBitLabel {
        &self.label
    }

    pub fn table(&self) -> &TraceTable {
        &self.table
    }

    pub fn q(&self) -> u64 {
        self.witness.q()
    }

    /// The lift `d`.
    pub fn lift(&self) -> u64 {
        self.label.base_lift
    }

    pub fn system(&self) -> Result<CoreSystem> {
        CoreSystem::new(&self.table, self.q())
    }

    pub fn label_class(&self) -> QuotientClass {
        QuotientClass::of(&self.label.bits)
    }

    /// Degrees of the core vertices inside `G[A ∖ deleted]`, recomputed from adjacency.
    fn core_degrees_after(&self, deleted: &VertexSet) -> Vec<usize> {
        let g = self.graph();
        let kept = self.witness.set().difference(deleted);
        let mask = kept.mask(g.order());
        self.core.iter().map(|u| g.degree_into(u, &mask)).collect()
    }

    fn common_residue(&self, degrees: &[usize]) -> Option<u64> {
        let modulus = 2 * self.q();
        let first = *degrees.first()? as u64 % modulus;
        degrees
            .iter()
            .all(|&d| d as u64 % modulus == first)
            .then_some(first)
    }

    fn direct_trace(&self, x: usize) -> BitVector {
        let row = self.graph().row(x);
        let bits: Vec<bool> = self.core.iter().map(|u| row.get(u)).collect();
        BitVector::from_bools(&bits)
    }

    /// Runs the engine: a deletion certificate if the label class lies in the
    /// span of the available traces, otherwise a parity cut.
    pub fn solve_core_correction(&self) -> Result<Certificate> {
        let system = self.system()?;
        let cert = match system.solve(&self.label.bits)? {
            Correction::Absorb(chosen) => {
                let q = self.q() as usize;
                let tuples = chosen
                    .into_iter()
                    .map(|i| {
                        let trace = system.available()[i].clone();
                        let deleted = self.table.realizers(&trace)[..q].to_vec();
                        TraceTuple { trace, deleted }
                    })
                    .collect();
                Certificate::Deletion(DeletionCertificate { tuples })
            }
            Correction::Cut(cut) => Certificate::ParityCut(ParityCut {
                cut: cut.iter_ones().map(|i| self.core.as_slice()[i]).collect(),
            }),
        };
        let ok = match &cert {
            Certificate::Deletion(d) => self.verify_deletion_certificate(d)?,
            Certificate::ParityCut(p) => self.verify_parity_cut(&p.cut)?,
        };
        if !ok {
            return Err(Error::Internal(format!(
                "engine output fails its verifier: {cert:?}"
            )));
        }
        Ok(cert)
    }

    fn check_deletion_shape(&self, cert: &DeletionCertificate) -> Result<VertexSet> {
        let q = self.q() as usize;
        let mut seen = BTreeSet::new();
        for t in &cert.tuples {
            if t.trace.len() != self.core.len() {
                return Err(Error::MalformedCertificate(
                    "trace mask has the wrong length".into(),
                ));
            }
            if t.deleted.len() != q {
                return Err(Error::MalformedCertificate(format!(
                    "tuple has {} vertices, expected q = {q}",
                    t.deleted.len()
                )));
            }
            for &x in &t.deleted {
                if !self.tail.contains(x) {
                    return Err(Error::MalformedCertificate(format!(
                        "vertex {x} is not in the tail"
                    )));
                }
                if !seen.insert(x) {
                    return Err(Error::MalformedCertificate(format!(
                        "vertex {x} is deleted twice"
                    )));
                }
                if self.direct_trace(x) != t.trace {
                    return Err(Error::MalformedCertificate(format!(
                        "vertex {x} does not have the cited trace"
                    )));
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Physically deletes the cited tuples and checks that the core degrees
    /// agree modulo 2q. Uses only adjacency, not the linear system.
    pub fn verify_deletion_certificate(&self, cert: &DeletionCertificate) -> Result<bool> {
        let deleted = self.check_deletion_shape(cert)?;
        Ok(self
            .common_residue(&self.core_degrees_after(&deleted))
            .is_some())
    }

    /// Common core residue modulo 2q after the deletion, if any.
    pub fn residue_after(&self, cert: &DeletionCertificate) -> Result<Option<u64>> {
        let deleted = self.check_deletion_shape(cert)?;
        Ok(self.common_residue(&self.core_degrees_after(&deleted)))
    }

    /// Checks `|Y|` even, `Σ_Y b` odd and `|B ∩ Y|` even for all available `B`.
    pub fn verify_parity_cut(&self, cut: &VertexSet) -> Result<bool> {
        if let Some(v) = cut.first_outside(&self.core) {
            return Err(Error::NotSubset {
                what: "parity cut must lie in the core",
                vertex: v,
            });
        }
        if cut.len() % 2 == 1 {
            return Ok(false);
        }
        let detected = cut
            .iter()
            .filter(|&u| self.label.label(u) == Some(true))
            .count();
        if detected % 2 == 0 {
            return Ok(false);
        }
        let positions: Vec<usize> = cut.iter().map(|u| self.core.position(u).unwrap()).collect();
        let y = BitVector::from_indices(self.core.len(), positions)?;
        Ok(self
            .table
            .available(self.q())
            .all(|(b, _)| b.and_count(&y) % 2 == 0))
    }

    /// Whether deleting the whole tail (retaining exactly `U`) makes `U` 2q-modular,
    /// decided from the trace multiplicities.
    pub fn all_tail_identity_check(&self) -> TailIdentity {
        let q = self.q() as usize;
        let mut sum = BitVector::zeros(self.core.len());
        for (mask, realizers) in self.table.iter() {
            if realizers.len() % q != 0 {
                return TailIdentity::Fails(TailFailure::Divisibility {
                    trace: mask.clone(),
                    count: realizers.len(),
                });
            }
            if (realizers.len() / q) % 2 == 1 {
                sum.xor_assign(mask);
            }
        }
        if QuotientClass::of(&sum) != self.label_class() {
            return TailIdentity::Fails(TailFailure::ClassMismatch);
        }
        let after = is_q_modular(self.graph(), &self.core, 2 * self.q()).expect("core is in range");
        assert!(
            after.is_modular(),
            "all-tail identity holds but the retained core is not 2q-modular"
        );
        TailIdentity::Holds
    }

    /// Retained tail vertices whose degree in `G[W]` misses the common core
    /// residue modulo 2q, where `W` is `A` minus the certificate's deletions.
    pub fn self_layer_check(&self, cert: &DeletionCertificate) -> Result<Vec<usize>> {
        let deleted = self.check_deletion_shape(cert)?;
        let residue = self
            .common_residue(&self.core_degrees_after(&deleted))
            .ok_or(Error::UnverifiedCertificate)?;
        let g = self.graph();
        let kept = self.witness.set().difference(&deleted);
        let mask = kept.mask(g.order());
        let modulus = 2 * self.q();
        Ok(kept
            .difference(&self.core)
            .iter()
            .filter(|&y| g.degree_into(y, &mask) as u64 % modulus != residue)
            .collect())
    }

    pub fn rank_rich_check(&self) -> Result<RankRich> {
        let system = self.system()?;
        let basis: Vec<BitVector> = system
            .basis()
            .into_iter()
            .map(|i| system.available()[i].clone())
            .collect();
        Ok(RankRich {
            spans: basis.len() == self.core.len() - 1,
            basis,
        })
    }

    /// Connected heavy pair traces, plus an odd heavy trace when `|U|` is even.
    pub fn pair_trace_sufficiency(&self) -> Result<PairTraceVerdict> {
        let h = pair_trace_graph(&self.table, self.q())?;
        let verdict = if !h.connected {
            PairTraceVerdict::DoesNotApply(PairTraceGap::Disconnected)
        } else if self.core.len().is_multiple_of(2) && h.odd_heavy_trace.is_none() {
            PairTraceVerdict::DoesNotApply(PairTraceGap::NoOddTrace)
        } else {
            PairTraceVerdict::Applies
        };
        if verdict == PairTraceVerdict::Applies {
            assert!(
                self.rank_rich_check()?.spans,
                "pair-trace condition holds but available traces do not span"
            );
        }
        Ok(verdict)
    }

    /// Groups each trace's realizers into consecutive q-blocks, lowest ids first.
    pub fn twin_tail_decompose(&self) -> TwinTail {
        let q = self.q() as usize;
        let mut blocks = Vec::new();
        for (mask, realizers) in self.table.iter() {
            if realizers.len() % q != 0 {
                return TwinTail::NotTwinTail {
                    trace: mask.clone(),
                    count: realizers.len(),
                };
            }
            blocks.extend(realizers.chunks(q).map(<[usize]>::to_vec));
        }
        TwinTail::Blocks(blocks)
    }

    /// Singleton-basis pattern on a q-fold twin-tail decomposition of the
    /// tail, with distinguished core vertex `u0`.
    pub fn basis_tail_check(&self, blocks: &[Vec<usize>], u0: usize) -> Result<BasisTail> {
        let q = self.q() as usize;
        let m = self.core.len();
        let base = self.core.position(u0).ok_or(Error::NotSubset {
            what: "distinguished vertex must lie in the core",
            vertex: u0,
        })?;
        let mut covered = BTreeSet::new();
        let mut singleton_counts = vec![0usize; m];
        let mut remainder = BitVector::zeros(m);
        for block in blocks {
            if block.len() != q {
                return Err(Error::InvalidProblem(format!(
                    "block of size {} (expected q = {q})",
                    block.len()
                )));
            }
            for &x in block {
                if !self.tail.contains(x) || !covered.insert(x) {
                    return Err(Error::InvalidProblem(format!(
                        "vertex {x} is outside the tail or in two blocks"
                    )));
                }
            }
            let trace = self.direct_trace(block[0]);
            if block[1..].iter().any(|&x| self.direct_trace(x) != trace) {
                return Err(Error::InvalidProblem("block mixes traces".into()));
            }
            match trace.iter_ones().collect::<Vec<_>>().as_slice() {
                [i] if *i != base => singleton_counts[*i] += 1,
                _ => remainder.xor_assign(&trace),
            }
        }
        if covered.len() != self.tail.len() {
            return Err(Error::InvalidProblem("blocks do not cover the tail".into()));
        }
        let b = &self.label.bits;
        for i in (0..m).filter(|&i| i != base) {
            if (singleton_counts[i] % 2 == 1) != (b.get(i) ^ b.get(base)) {
                return Ok(BasisTail::Fails(BasisTailFailure::SingletonParity {
                    vertex: self.core.as_slice()[i],
                }));
            }
        }
        if !QuotientClass::of(&remainder).is_zero() {
            return Ok(BasisTail::Fails(BasisTailFailure::RemainderNonzero));
        }
        let after = is_q_modular(self.graph(), &self.core, 2 * self.q()).expect("core is in range");
        assert!(
            after.is_modular(),
            "basis-tail pattern holds but the retained core is not 2q-modular"
        );
        Ok(BasisTail::Holds)
    }
}

/// One deleted equal-trace q-tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTuple {
    /// Trace mask over core positions.
    pub trace: BitVector,
    pub deleted: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeletionCertificate {
    pub tuples: Vec<TraceTuple>,
}

impl DeletionCertificate {
    pub fn deleted_count(&self) -> usize {
        self.tuples.iter().map(|t| t.deleted.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCut {
    pub cut: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Deletion(DeletionCertificate),
    ParityCut(ParityCut),
}

impl Certificate {
    pub fn is_deletion(&self) -> bool {
        matches!(self, Certificate::Deletion(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailIdentity {
    Holds,
    Fails(TailFailure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailFailure {
    /// `q ∤ n_B`.
    Divisibility { trace: BitVector, count: usize },
    /// The multiplicity sum does not represent the label class.
    ClassMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankRich {
    pub spans: bool,
    /// A basis of the span of the available classes, at most `|U| − 1` traces.
    pub basis: Vec<BitVector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairTraceVerdict {
    Applies,
    DoesNotApply(PairTraceGap),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairTraceGap {
    Disconnected,
    NoOddTrace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwinTail {
    Blocks(Vec<Vec<usize>>),
    NotTwinTail { trace: BitVector, count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisTail {
    Holds,
    Fails(BasisTailFailure),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisTailFailure {
    /// Singleton-trace block count at this vertex has the wrong parity.
    SingletonParity { vertex: usize },
    /// The remaining block traces do not cancel in the quotient.
    RemainderNonzero,
}
