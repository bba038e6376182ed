use proptest::prelude::*;
use unigate_core::variants::swap_conjugate;
use unigate_core::word::{enumerate_products, evaluate_word, product_count};
use unigate_core::{haar_random, make_variants, GateSet, GateWord, ProductTable, Unitary, VariantMode};

const BUDGET: u64 = 1 << 30;

fn gate_set(seed: u64, mode: VariantMode) -> GateSet {
    make_variants(&haar_random(4, seed).unwrap(), mode).unwrap()
}

fn word_strategy(base: u8, max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..base, 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evaluation_is_a_homomorphism(seed in any::<u64>(), a in word_strategy(4, 6), b in word_strategy(4, 6)) {
        let gs = gate_set(seed, VariantMode::Four);
        let wa = GateWord::new(a, 4).unwrap();
        let wb = GateWord::new(b, 4).unwrap();
        let joined = evaluate_word(&gs, &wa.concat(&wb)).unwrap();
        let split = evaluate_word(&gs, &wb).unwrap().mul(&evaluate_word(&gs, &wa).unwrap()).unwrap();
        prop_assert!(joined.max_abs_diff(&split).unwrap() < 1e-12);
    }

    #[test]
    fn index_round_trip(letters in word_strategy(4, 10)) {
        let w = GateWord::new(letters, 4).unwrap();
        let back = GateWord::from_index(w.index(4), w.depth(), 4);
        prop_assert_eq!(back, w);
    }

    #[test]
    fn variants_are_unitary(seed in any::<u64>()) {
        let gs = gate_set(seed, VariantMode::Four);
        for v in gs.variants() {
            prop_assert!(v.unitarity_deviation() < 1e-10);
        }
    }
}

#[test]
fn variant_relations() {
    let gs = gate_set(7, VariantMode::Four);
    let [u, us, ut, ust] = [0, 1, 2, 3].map(|i| gs.variants()[i].clone());
    let swap = Unitary::swap();
    assert!(us.max_abs_diff(&swap.mul(&u).unwrap().mul(&swap).unwrap()).unwrap() < 1e-12);
    assert!(ut.max_abs_diff(&u.transpose()).unwrap() < 1e-15);
    assert!(ust.max_abs_diff(&us.transpose()).unwrap() < 1e-15);
    assert!(swap_conjugate(&us).unwrap().max_abs_diff(&u).unwrap() < 1e-12);
    let two = gate_set(7, VariantMode::Two);
    assert_eq!(two.len(), 2);
    assert_eq!(two.variants()[1], us);
}

#[test]
fn stream_is_lexicographic_and_matches_evaluation() {
    let gs = gate_set(2, VariantMode::Four);
    let all: Vec<_> = enumerate_products(&gs, 3, BUDGET).unwrap().collect();
    assert_eq!(all.len() as u64, product_count(4, 3).unwrap());
    for (i, (w, u)) in all.iter().enumerate() {
        assert_eq!(w.index(4), i as u64);
        assert!(u.max_abs_diff(&evaluate_word(&gs, w).unwrap()).unwrap() < 1e-12);
    }
    let table = ProductTable::build(&gs, 3, BUDGET).unwrap();
    for (i, (_, u)) in all.iter().enumerate() {
        assert_eq!(table.unitary(i), *u);
    }
}

#[test]
fn depth_zero_is_identity_and_budget_is_checked() {
    let gs = gate_set(2, VariantMode::Two);
    let all: Vec<_> = enumerate_products(&gs, 0, BUDGET).unwrap().collect();
    assert_eq!(all.len(), 1);
    assert_eq!(all[0].1, Unitary::identity(4));
    assert!(enumerate_products(&gs, 10, 1000).is_err());
    assert!(ProductTable::build(&gs, 40, u64::MAX).is_err());
}
