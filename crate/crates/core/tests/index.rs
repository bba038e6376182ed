use num_complex::Complex64;
use proptest::prelude::*;
use unigate_core::word::evaluate_word;
use unigate_core::{
    haar_random, make_variants, GateSet, GateWord, IndexMode, IndexParams, IndexedPoint, NnIndex, ProductTable,
    Unitary, VariantMode,
};

const BUDGET: u64 = 1 << 30;

fn gate_set(seed: u64) -> GateSet {
    make_variants(&haar_random(4, seed).unwrap(), VariantMode::Four).unwrap()
}

/// `1 - |Tr(A^dagger B)| / N` over explicit entries.
fn naive_infidelity(a: &Unitary, b: &Unitary) -> f64 {
    let n = a.dim();
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            t += a.get(i, j).conj() * b.get(i, j);
        }
    }
    1.0 - t.norm() / n as f64
}

/// Linear scan over every word of `depth`, ties within 1e-12 going to the
/// smaller word index.
fn naive_nearest(gs: &GateSet, depth: usize, target: &Unitary) -> (u64, f64) {
    let count = (gs.len() as u64).pow(depth as u32);
    let mut best = (0u64, f64::INFINITY);
    for id in 0..count {
        let w = GateWord::from_index(id, depth, gs.len());
        let inf = naive_infidelity(&evaluate_word(gs, &w).unwrap(), target);
        if inf < best.1 - 1e-12 {
            best = (id, inf);
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_index_matches_linear_scan(gs_seed in any::<u64>(), target_seed in any::<u64>(), depth in 1usize..=5) {
        let gs = gate_set(gs_seed);
        let table = ProductTable::build(&gs, depth, BUDGET).unwrap();
        let index = NnIndex::build(&table, IndexMode::Exact, IndexParams::default(), BUDGET).unwrap();
        let target = haar_random(4, target_seed).unwrap();
        let hit = index.query_nearest(&target, 1).unwrap()[0];
        let (id, inf) = naive_nearest(&gs, depth, &target);
        prop_assert_eq!(hit.word_id, id);
        prop_assert!((hit.infidelity - inf).abs() < 1e-12);
    }

    #[test]
    fn global_phase_does_not_change_results(target_seed in any::<u64>(), phi in -7.0f64..7.0) {
        let gs = gate_set(11);
        let table = ProductTable::build(&gs, 4, BUDGET).unwrap();
        let target = haar_random(4, target_seed).unwrap();
        let phased = target.scale_phase(Complex64::from_polar(1.0, phi)).unwrap();
        for mode in [IndexMode::Exact, IndexMode::Approximate] {
            let index = NnIndex::build(&table, mode, IndexParams::default(), BUDGET).unwrap();
            let a = index.query_nearest(&target, 3).unwrap();
            let b = index.query_nearest(&phased, 3).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!(x.word_id, y.word_id);
                prop_assert!((x.infidelity - y.infidelity).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn exact_top_k_is_sorted_and_complete() {
    let gs = gate_set(3);
    let table = ProductTable::build(&gs, 3, BUDGET).unwrap();
    let index = NnIndex::build(&table, IndexMode::Exact, IndexParams::default(), BUDGET).unwrap();
    let target = haar_random(4, 99).unwrap();
    let hits = index.query_nearest(&target, 1000).unwrap();
    assert_eq!(hits.len(), 64);
    let mut expected: Vec<f64> = (0..64).map(|i| naive_infidelity(&table.unitary(i), &target)).collect();
    expected.sort_by(f64::total_cmp);
    for (h, e) in hits.iter().zip(&expected) {
        assert!((h.infidelity - e).abs() < 1e-12);
    }
}

#[test]
fn approximate_build_is_deterministic() {
    let gs = gate_set(5);
    let table = ProductTable::build(&gs, 5, BUDGET).unwrap();
    let params = IndexParams {
        seed: 17,
        ..IndexParams::default()
    };
    let a = NnIndex::build(&table, IndexMode::Approximate, params, BUDGET).unwrap();
    let b = NnIndex::build(&table, IndexMode::Approximate, params, BUDGET).unwrap();
    assert_eq!(a.coarse_vectors(), b.coarse_vectors());
    assert_eq!(a.graph().unwrap().to_parts(), b.graph().unwrap().to_parts());
    for s in 0..20 {
        let t = haar_random(4, 500 + s).unwrap();
        assert_eq!(a.query_nearest(&t, 5).unwrap(), b.query_nearest(&t, 5).unwrap());
    }
}

#[test]
fn approximate_results_are_exact_infidelities() {
    let gs = gate_set(8);
    let table = ProductTable::build(&gs, 4, BUDGET).unwrap();
    let index = NnIndex::build(&table, IndexMode::Approximate, IndexParams::default(), BUDGET).unwrap();
    let target = haar_random(4, 1234).unwrap();
    for hit in index.query_nearest(&target, 4).unwrap() {
        let u = table.unitary(hit.point);
        assert!((hit.infidelity - naive_infidelity(&u, &target)).abs() < 1e-12);
    }
}

#[test]
fn from_points_and_budget() {
    let gs = gate_set(1);
    let points: Vec<IndexedPoint> = (0..16u64)
        .map(|id| IndexedPoint::new(&evaluate_word(&gs, &GateWord::from_index(id, 2, 4)).unwrap(), 100 + id))
        .collect();
    let index = NnIndex::from_points(&points, IndexMode::Exact, IndexParams::default(), BUDGET).unwrap();
    let target = evaluate_word(&gs, &GateWord::from_index(9, 2, 4)).unwrap();
    let hit = index.query_nearest(&target, 1).unwrap()[0];
    assert_eq!(hit.word_id, 109);
    assert!(hit.infidelity < 1e-12);
    assert!(NnIndex::from_points(&points, IndexMode::Exact, IndexParams::default(), 100).is_err());
    assert!(NnIndex::from_points(&[], IndexMode::Exact, IndexParams::default(), BUDGET).is_err());
}
