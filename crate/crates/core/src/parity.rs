//! Constructive even-degree bipartition.
//!
//! Over GF(2) let `L = A + D` (adjacency plus the diagonal of degree
//! parities) and `d` the degree-parity vector. Any `c` with `Lc = d` splits
//! the vertices into two classes that each induce only even degrees, and one
//! class holds at least half of the vertices.

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector, SolveOutcome};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityPartition {
    /// Vertices with `c_v = 0`.
    pub zero: VertexSet,
    /// Vertices with `c_v = 1`.
    pub one: VertexSet,
}

impl ParityPartition {
    pub fn larger(&self) -> &VertexSet {
        if self.one.len() > self.zero.len() {
            &self.one
        } else {
            &self.zero
        }
    }
}

fn laplacian_mod2(g: &Graph) -> Result<(BitMatrix, BitVector)> {
    let n = g.order();
    let mut d = BitVector::zeros(n);
    let rows = (0..n)
        .map(|v| {
            let mut row = g.row(v).clone();
            if g.degree(v) % 2 == 1 {
                row.set(v, true);
                d.set(v, true);
            }
            row
        })
        .collect();
    Ok((BitMatrix::from_rows(n, rows)?, d))
}

/// Splits `g` into two parts that each induce even degrees.
///
/// Fails with [`Error::Internal`] if `Lc = d` is inconsistent, which cannot
/// happen for a simple graph.
pub fn parity_partition(g: &Graph) -> Result<ParityPartition> {
    let (l, d) = laplacian_mod2(g)?;
    let c = match gf2::solve_or_dual(&l, &d)? {
        SolveOutcome::Solution(c) => c,
        SolveOutcome::Dual(y) => {
            return Err(Error::Internal(format!(
                "mod-2 Laplacian system Lc = d is inconsistent (functional {y:?})"
            )))
        }
    };
    if gf2::mat_vec(&l, &c)? != d {
        return Err(Error::Internal(
            "solution fails Lc = d on re-multiplication".into(),
        ));
    }
    let one: VertexSet = c.iter_ones().collect();
    let zero = VertexSet::range(g.order()).difference(&one);
    Ok(ParityPartition { zero, one })
}

/// Checks that `part0`/`part1` partition the vertices and that every vertex
/// has even degree inside its own part.
pub fn verify_even_partition(g: &Graph, part0: &VertexSet, part1: &VertexSet) -> Result<bool> {
    part0.check_within(g.order())?;
    part1.check_within(g.order())?;
    if let Some(v) = part0.iter().find(|&v| part1.contains(v)) {
        return Err(Error::Overlap(v));
    }
    if part0.len() + part1.len() != g.order() {
        return Err(Error::InvalidProblem(format!(
            "parts cover {} of {} vertices",
            part0.len() + part1.len(),
            g.order()
        )));
    }
    for part in [part0, part1] {
        if g.induced_degrees(part)?.values().any(|d| d % 2 == 1) {
            return Ok(false);
        }
    }
    Ok(true)
}
