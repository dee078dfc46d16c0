//! Exhaustive ground truth for small instances.
//!
//! Nothing here touches the GF(2) machinery: regularity and absorption are
//! decided by enumerating subsets and recounting degrees from neighbor lists.

use crate::absorb::AbsorptionProblem;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::graph::{Graph, VertexSet};

pub const MAX_ORACLE_ORDER: usize = 24;
pub const MAX_ORACLE_TRACES: usize = 20;

fn check_order(g: &Graph) -> Result<()> {
    if g.order() > MAX_ORACLE_ORDER {
        Err(Error::GraphTooLarge {
            order: g.order(),
            max: MAX_ORACLE_ORDER,
        })
    } else {
        Ok(())
    }
}

/// Largest regular induced subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxRegular {
    pub size: usize,
    /// Lexicographically smallest maximum witness.
    pub witness: VertexSet,
}

fn mask_set(mask: u32) -> VertexSet {
    (0..32).filter(|&v| (mask >> v) & 1 == 1).collect()
}

/// For equal-size sets, `a` precedes `b` in sorted-list order iff `a` holds
/// the smallest element of their symmetric difference.
fn lex_less(a: u32, b: u32) -> bool {
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// `f(G)` by Gray-code enumeration of all vertex subsets with incremental
/// degree updates.
pub fn brute_force_fg(g: &Graph) -> Result<MaxRegular> {
    check_order(g)?;
    let n = g.order();
    let mut deg = vec![0i32; n];
    let mut current: u32 = 0;
    let mut best: u32 = 0;
    let mut best_size = 0usize;
    for step in 1u64..(1u64 << n) {
        let v = step.trailing_zeros() as usize;
        let adding = (current >> v) & 1 == 0;
        current ^= 1 << v;
        let delta = if adding { 1 } else { -1 };
        for &w in g.neighbors(v) {
            deg[w] += delta;
        }
        let size = current.count_ones() as usize;
        if size < best_size || (size == best_size && !lex_less(current, best)) {
            continue;
        }
        let mut members = (0..n).filter(|&u| (current >> u) & 1 == 1);
        let first = deg[members.next().expect("nonempty")];
        if members.all(|u| deg[u] == first) {
            best = current;
            best_size = size;
        }
    }
    Ok(MaxRegular {
        size: best_size,
        witness: mask_set(best),
    })
}

fn max_clique_masks(adj: &[u32]) -> usize {
    fn expand(adj: &[u32], size: usize, candidates: u32, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let mut rest = candidates;
        while rest != 0 {
            if size + rest.count_ones() as usize <= *best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            expand(adj, size + 1, rest & adj[v], best);
        }
    }
    let n = adj.len();
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = 0;
    expand(adj, 0, all, &mut best);
    best
}

/// Independence number and clique number.
pub fn brute_force_alpha_omega(g: &Graph) -> Result<(usize, usize)> {
    check_order(g)?;
    let n = g.order();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let co_adj: Vec<u32> = (0..n).map(|v| !adj[v] & full & !(1 << v)).collect();
    Ok((max_clique_masks(&co_adj), max_clique_masks(&adj)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleAbsorption {
    pub exists: bool,
    /// Available traces chosen by the first successful subset, in mask order.
    pub chosen: Option<Vec<BitVector>>,
}

/// Tries every subset of available traces, deleting the `q` lowest-id
/// realizers of each chosen trace.
pub fn brute_force_absorption(problem: &AbsorptionProblem<'_>) -> Result<OracleAbsorption> {
    let q = problem.q() as usize;
    brute_force_absorption_with(problem, |_, realizers| realizers[..q].to_vec())
}

/// As [`brute_force_absorption`], with the deleted tuple of each trace picked by `choose`.
pub fn brute_force_absorption_with<F>(
    problem: &AbsorptionProblem<'_>,
    mut choose: F,
) -> Result<OracleAbsorption>
where
    F: FnMut(&BitVector, &[usize]) -> Vec<usize>,
{
    let q = problem.q() as usize;
    let available: Vec<(BitVector, Vec<usize>)> = problem
        .table()
        .available(problem.q())
        .map(|(m, r)| {
            let tuple = choose(m, r);
            assert_eq!(tuple.len(), q, "tuple must have q vertices");
            assert!(
                tuple.iter().all(|x| r.contains(x)),
                "tuple must realize the trace"
            );
            (m.clone(), tuple)
        })
        .collect();
    if available.len() > MAX_ORACLE_TRACES {
        return Err(Error::TooManyTraces {
            count: available.len(),
            max: MAX_ORACLE_TRACES,
        });
    }
    let g = problem.graph();
    let witness = problem.witness().set();
    let modulus = 2 * problem.q() as usize;
    let mut in_w = vec![false; g.order()];
    for eps in 0u32..(1 << available.len()) {
        for (v, slot) in in_w.iter_mut().enumerate() {
            *slot = witness.contains(v);
        }
        for (i, (_, tuple)) in available.iter().enumerate() {
            if (eps >> i) & 1 == 1 {
                for &x in tuple {
                    in_w[x] = false;
                }
            }
        }
        let mut residues = problem
            .core()
            .iter()
            .map(|u| g.neighbors(u).iter().filter(|&&w| in_w[w]).count() % modulus);
        let first = residues.next().expect("core is nonempty");
        if residues.all(|r| r == first) {
            let chosen = available
                .iter()
                .enumerate()
                .filter(|(i, _)| (eps >> i) & 1 == 1)
                .map(|(_, (m, _))| m.clone())
                .collect();
            return Ok(OracleAbsorption {
                exists: true,
                chosen: Some(chosen),
            });
        }
    }
    Ok(OracleAbsorption {
        exists: false,
        chosen: None,
    })
}
