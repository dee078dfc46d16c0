use std::collections::BTreeMap;

use modcert::absorb::{AbsorptionProblem, Certificate};
use modcert::gf2::{self, BitMatrix, BitVector, SolveOutcome};
use modcert::graph::{Graph, VertexSet};
use modcert::oracle;
use modcert::parity::{parity_partition, verify_even_partition};
use modcert::synth::Synthesizer;
use modcert::traces::{self, NextBit, OrbitForm, TraceTable};
use modcert::witness::{is_q_modular, ModularWitness};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn subset_of(g: &Graph, mask: u64) -> VertexSet {
    (0..g.order())
        .filter(|&v| mask >> (v % 64) & 1 == 1)
        .collect()
}

fn matrix_strategy(
    max_rows: usize,
    max_cols: usize,
) -> impl Strategy<Value = (Vec<Vec<bool>>, Vec<bool>)> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        (
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r),
            proptest::collection::vec(any::<bool>(), r),
        )
    })
}

fn to_matrix(rows: &[Vec<bool>]) -> BitMatrix {
    let cols = rows[0].len();
    BitMatrix::from_rows(
        cols,
        rows.iter().map(|r| BitVector::from_bools(r)).collect(),
    )
    .unwrap()
}

/// Textbook elimination on boolean rows; returns the rank.
fn reference_rank(rows: &[Vec<bool>]) -> usize {
    let mut a: Vec<Vec<bool>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c]) else {
            continue;
        };
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank && a[i][c] {
                let pivot = a[rank].clone();
                for (x, y) in a[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn handshake_and_degrees(g in graph_strategy(20), mask in any::<u64>()) {
        let s = subset_of(&g, mask);
        let degrees = g.induced_degrees(&s).unwrap();
        prop_assert_eq!(degrees.values().sum::<usize>() % 2, 0);
        let all = g.induced_degrees(&g.all_vertices()).unwrap();
        for v in 0..g.order() {
            prop_assert_eq!(all[&v], g.degree(v));
        }
        let distinct: std::collections::BTreeSet<_> = degrees.values().collect();
        prop_assert_eq!(g.is_regular(&s).unwrap().is_regular(), distinct.len() <= 1);
    }

    #[test]
    fn solve_or_dual_round_trip((rows, t) in matrix_strategy(64, 64)) {
        let m = to_matrix(&rows);
        let t = BitVector::from_bools(&t);
        let mut augmented = rows.clone();
        for (row, &ti) in augmented.iter_mut().zip(&t.to_bools()) {
            row.push(ti);
        }
        let consistent = reference_rank(&rows) == reference_rank(&augmented);
        prop_assert_eq!(gf2::rank(&m), reference_rank(&rows));
        match gf2::solve_or_dual(&m, &t).unwrap() {
            SolveOutcome::Solution(eps) => {
                prop_assert!(consistent);
                prop_assert_eq!(gf2::mat_vec(&m, &eps).unwrap(), t);
            }
            SolveOutcome::Dual(y) => {
                prop_assert!(!consistent);
                prop_assert!(gf2::mat_vec(&m.transpose(), &y).unwrap().is_zero());
                prop_assert!(gf2::dot(&y, &t).unwrap());
            }
        }
    }

    #[test]
    fn rank_nullity((rows, _t) in matrix_strategy(12, 12)) {
        let m = to_matrix(&rows);
        let cols = m.cols();
        let kernel = (0u64..1 << cols)
            .filter(|&x| gf2::mat_vec(&m, &BitVector::from_u64(cols, x)).unwrap().is_zero())
            .count();
        prop_assert_eq!(1usize << (cols - gf2::rank(&m)), kernel);
    }

    #[test]
    fn parity_partition_is_even(g in graph_strategy(40)) {
        let p = parity_partition(&g).unwrap();
        prop_assert!(verify_even_partition(&g, &p.zero, &p.one).unwrap());
        prop_assert!(2 * p.larger().len() >= g.order());
        prop_assert!(is_q_modular(&g, p.larger(), 2).unwrap().is_modular());
        if (0..g.order()).all(|v| g.degree(v) % 2 == 0) {
            prop_assert_eq!(p.zero.len(), g.order());
        }
    }

    #[test]
    fn lift_choice_only_shifts_labels(g in graph_strategy(14), qlog in 0u32..3) {
        let q = 1u64 << qlog;
        let all = g.all_vertices();
        let Ok(w) = ModularWitness::new(&g, all.clone(), q) else { return Ok(()) };
        let a = w.top_bit_label(&all).unwrap();
        let b = w.top_bit_label_with_lift(&all, w.residue() + q).unwrap();
        prop_assert_eq!(&a.bits.complement(), &b.bits);
        prop_assert_eq!(
            traces::QuotientClass::of(&a.bits),
            traces::QuotientClass::of(&b.bits)
        );
    }

    #[test]
    fn affine_lift_matches_direct(g in graph_strategy(16), mask in any::<u64>()) {
        // Use the larger parity part as a 2-modular witness.
        let p = parity_partition(&g).unwrap();
        let a = p.larger().clone();
        let w = ModularWitness::new(&g, a.clone(), 2);
        let Ok(w) = w else { return Ok(()) };
        let sub: VertexSet = a.iter().filter(|&v| mask >> (v % 64) & 1 == 1).collect();
        let direct = is_q_modular(&g, &sub, 4).unwrap().is_modular();
        prop_assert_eq!(w.affine_lift_check(&sub).unwrap(), direct);
    }

    #[test]
    fn terminal_check_is_sound(g in graph_strategy(10), qlog in 0u32..4) {
        let q = 1u64 << qlog;
        if let Ok(w) = ModularWitness::new(&g, g.all_vertices(), q) {
            if let modcert::witness::Terminal::Regular(d) = w.terminal_check() {
                prop_assert_eq!(g.is_regular(&g.all_vertices()).unwrap().degree(), Some(d));
            }
        }
    }

    #[test]
    fn trace_table_consistency(g in graph_strategy(18), core_mask in any::<u64>(), tail_mask in any::<u64>()) {
        let core = subset_of(&g, core_mask);
        let tail: VertexSet = subset_of(&g, tail_mask).difference(&core);
        if core.is_empty() { return Ok(()) }
        let table = traces::compute_traces(&g, &core, &tail).unwrap();
        prop_assert_eq!(table.iter().map(|(_, r)| r.len()).sum::<usize>(), tail.len());
        for (mask, realizers) in table.iter() {
            for &x in realizers {
                let direct: Vec<usize> = core.iter().filter(|&u| g.adjacent(u, x)).collect();
                prop_assert_eq!(table.members(mask), direct);
            }
        }
        let tail_bits = tail.mask(g.order());
        let r = traces::rho(&table);
        for (i, u) in core.iter().enumerate() {
            prop_assert_eq!(r[i], g.degree_into(u, &tail_bits) as i64);
        }
        let cd = traces::complement_difference_class(&table).unwrap();
        let offset = r[0] - cd.representative[0];
        prop_assert!(r.iter().zip(&cd.representative).all(|(a, b)| a - b == offset));
    }

    #[test]
    fn next_bit_zero_iff_constant(rho in proptest::collection::vec(-40i64..40, 1..7), m in 0u32..5) {
        let constant_mod = |k: u32| rho.iter().all(|&x| (x - rho[0]).rem_euclid(1 << k) == 0);
        match traces::next_bit_obstruction(&rho, m) {
            NextBit::Class(c) => {
                prop_assert!(constant_mod(m));
                prop_assert_eq!(c.is_zero(), constant_mod(m + 1));
            }
            NextBit::NotConstantModulo { .. } => prop_assert!(!constant_mod(m)),
        }
    }

    #[test]
    fn orbit_form_matches_next_bit(
        counts in proptest::collection::vec(0usize..6, 16),
        m in 0u32..3,
    ) {
        // Synthetic table over a 4-vertex core; traces are all 16 masks.
        let mut entries = BTreeMap::new();
        let mut next = 4;
        for (mask, &c) in counts.iter().enumerate() {
            if c > 0 {
                entries.insert(BitVector::from_u64(4, mask as u64), (next..next + c).collect());
                next += c;
            }
        }
        let table = TraceTable::from_entries(VertexSet::range(4), entries).unwrap();
        // The function asserts agreement internally whenever both are defined.
        if let OrbitForm::Class(c) = traces::oriented_orbit_form(&table, m).unwrap() {
            if let NextBit::Class(theta) = traces::next_bit_obstruction(&traces::rho(&table), m) {
                prop_assert_eq!(c, theta);
            }
        }
    }

    #[test]
    fn neighborhood_diversity_structure(g in graph_strategy(14)) {
        let nd = traces::neighborhood_diversity(&g);
        for class in &nd.classes {
            for (i, &u) in class.iter().enumerate() {
                for &v in &class[i + 1..] {
                    prop_assert!(traces::are_twins(&g, u, v));
                }
            }
        }
        for (i, a) in nd.classes.iter().enumerate() {
            for b in &nd.classes[i + 1..] {
                prop_assert!(!traces::are_twins(&g, a[0], b[0]));
                let adjacent = g.adjacent(a[0], b[0]);
                prop_assert!(a.iter().all(|&u| b.iter().all(|&v| g.adjacent(u, v) == adjacent)));
            }
        }
    }

    #[test]
    fn oracle_calibration(g in graph_strategy(12)) {
        let f = oracle::brute_force_fg(&g).unwrap();
        let (alpha, omega) = oracle::brute_force_alpha_omega(&g).unwrap();
        prop_assert!(f.size >= alpha.max(omega));
        prop_assert!(g.is_regular(&f.witness).unwrap().is_regular());
        prop_assert_eq!(f.witness.len(), f.size);
        let nd = traces::neighborhood_diversity(&g).value();
        prop_assert!(f.size * nd >= g.order());
    }

    #[test]
    fn dichotomy_on_random_reservoirs(
        m in 2usize..=4,
        qlog in 1u32..=2,
        masks in proptest::collection::vec(1u64..15, 0..4),
        label in any::<u64>(),
    ) {
        let q = 1u64 << qlog;
        let full = (1u64 << m) - 1;
        let available: Vec<BitVector> = masks
            .iter()
            .map(|&b| b & full)
            .filter(|&b| b != 0 && b != full)
            .map(|b| BitVector::from_u64(m, b))
            .collect();
        let s = Synthesizer::new(m, q, &available).unwrap();
        let Ok(inst) = s.instance(&BitVector::from_u64(m, label & full)) else { return Ok(()) };
        let p = inst.problem().unwrap();
        let cert = p.solve_core_correction().unwrap();
        let oracle = oracle::brute_force_absorption(&p).unwrap();
        prop_assert_eq!(cert.is_deletion(), oracle.exists);
        match &cert {
            Certificate::Deletion(d) => prop_assert!(p.verify_deletion_certificate(d).unwrap()),
            Certificate::ParityCut(c) => {
                prop_assert!(p.verify_parity_cut(&c.cut).unwrap());
                prop_assert!(p.system().unwrap().rank() + 2 <= m);
            }
        }
        // Which q realizers are deleted does not matter.
        let reversed = oracle::brute_force_absorption_with(&p, |_, r| r[r.len() - q as usize..].to_vec()).unwrap();
        prop_assert_eq!(reversed.exists, oracle.exists);
    }
}

#[test]
fn problem_round_trip_is_deterministic() {
    let s = Synthesizer::new(
        4,
        2,
        &[
            BitVector::from_u64(4, 0b0011),
            BitVector::from_u64(4, 0b0110),
        ],
    )
    .unwrap();
    let inst = s.instance(&BitVector::from_u64(4, 0b0101)).unwrap();
    let a = AbsorptionProblem::from_parts(&inst.graph, inst.witness.clone(), inst.core.clone(), 2)
        .unwrap();
    let b = AbsorptionProblem::from_parts(&inst.graph, inst.witness.clone(), inst.core.clone(), 2)
        .unwrap();
    assert_eq!(
        a.solve_core_correction().unwrap(),
        b.solve_core_correction().unwrap()
    );
}
