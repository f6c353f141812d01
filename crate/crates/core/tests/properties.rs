//! Randomized invariants over relations, 1-cells and 2-cells.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relcat::cells::{self, OneCell, TwoCell};
use relcat::relcore::{Permutation, Rel};
use relcat::structures;

use common::*;

fn rel(src: usize, dst: usize) -> impl Strategy<Value = Rel> {
    proptest::collection::vec(any::<bool>(), src * dst)
        .prop_map(move |bits| Rel::from_fn(&set(src), &set(dst), |a, b| bits[b * src + a]))
}

fn endo(max: usize) -> impl Strategy<Value = (Rel, Rel, Rel)> {
    (1..=max).prop_flat_map(|n| (rel(n, n), rel(n, n), rel(n, n)))
}

/// Three composable relations `a -> b -> c -> d`.
fn chain() -> impl Strategy<Value = (Rel, Rel, Rel)> {
    (1..=4usize, 1..=4usize, 1..=4usize, 1..=4usize).prop_flat_map(|(a, b, c, d)| (rel(a, b), rel(b, c), rel(c, d)))
}

fn one_cell(src: usize, dst: usize) -> impl Strategy<Value = OneCell> {
    proptest::collection::vec(0..=2usize, src * dst)
        .prop_map(move |sizes| OneCell::from_sizes(&set(src), &set(dst), &sizes).unwrap())
}

/// A seed for building 2-cells over generated 1-cells.
fn seed() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn composition_is_associative((a, b, c) in chain()) {
        prop_assert!(rel_assoc(&a, &b, &c));
    }

    #[test]
    fn identities_are_units((a, _, _) in chain()) {
        prop_assert!(rel_units(&a));
    }

    #[test]
    fn converse_reverses_composition((a, b, _) in chain()) {
        prop_assert!(converse_laws(&a, &b));
    }

    #[test]
    fn kernel_is_universal((s, r, _) in chain()) {
        prop_assert!(kernel_universal(&r, &s));
    }

    #[test]
    fn product_interchanges_with_composition((a, x, _) in endo(3), (b, y, _) in endo(3)) {
        prop_assert!(product_interchange(&a, &b, &x, &y));
    }

    #[test]
    fn endomorphism_inverses_are_two_sided(n in 1..=4usize, mut rng in seed()) {
        let (s, t) = random_endo_pair(&mut rng, n);
        prop_assert!(endo_inverse(&s, &t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn two_cell_laws(
        (a1, a2, a3, b1, b2, c1) in (1..=3usize, 1..=3usize, 1..=2usize, 1..=2usize).prop_flat_map(|(s, t, u, v)| (
            one_cell(s, t), one_cell(s, t), one_cell(s, t), one_cell(t, u), one_cell(t, u), one_cell(u, v),
        )),
        mut rng in seed(),
    ) {
        let f = random_two_cell(&mut rng, &a1, &a2);
        let g = random_two_cell(&mut rng, &a2, &a3);
        let h = random_two_cell(&mut rng, &a3, &a1);
        let u = random_two_cell(&mut rng, &b1, &b2);
        let v = random_two_cell(&mut rng, &b2, &b1);
        let w = TwoCell::identity(&c1);
        prop_assert!(vassoc(&f, &g, &h));
        prop_assert!(hassoc(&f, &u, &w));
        prop_assert!(hunits(&f));
        prop_assert!(interchange(&f, &g, &u, &v));
        prop_assert!(two_converse(&f, &g));
    }

    #[test]
    fn one_cell_composition_is_strict(
        (a, b, c) in (1..=3usize, 1..=3usize, 1..=3usize, 1..=3usize)
            .prop_flat_map(|(s, t, u, v)| (one_cell(s, t), one_cell(t, u), one_cell(u, v))),
    ) {
        let l = cells::hcompose_one(&cells::hcompose_one(&a, &b).unwrap(), &c).unwrap();
        let r = cells::hcompose_one(&a, &cells::hcompose_one(&b, &c).unwrap()).unwrap();
        prop_assert!(l == r);
        let id_l = OneCell::identity(a.src());
        let id_r = OneCell::identity(a.dst());
        prop_assert!(cells::hcompose_one(&id_l, &a).unwrap() == a);
        prop_assert!(cells::hcompose_one(&a, &id_r).unwrap() == a);
    }

    #[test]
    fn tensor_respects_vertical_composition(
        (a1, a2, b1, b2) in (1..=2usize, 1..=2usize, 1..=2usize, 1..=2usize)
            .prop_flat_map(|(s, t, u, v)| (one_cell(s, t), one_cell(s, t), one_cell(u, v), one_cell(u, v))),
        mut rng in seed(),
    ) {
        let (f, g) = (random_two_cell(&mut rng, &a1, &a2), random_two_cell(&mut rng, &a2, &a1));
        let (x, y) = (random_two_cell(&mut rng, &b1, &b2), random_two_cell(&mut rng, &b2, &b1));
        let l = cells::tensor(&cells::vcompose(&f, &g).unwrap(), &cells::vcompose(&x, &y).unwrap());
        let r = cells::vcompose(&cells::tensor(&f, &x), &cells::tensor(&g, &y)).unwrap();
        prop_assert!(l == r);
    }

    #[test]
    fn snakes_hold_for_permutation_cups(n in 1..=5usize, mut rng in seed()) {
        let p = random_bijection(&mut rng, n).as_function().unwrap();
        let pair = structures::cup_from_permutation(&Permutation::new(p).unwrap());
        prop_assert!(pair.snake_check());
        prop_assert!(structures::twist_delete_holds(&pair));
        prop_assert!(structures::twist_create_holds(&pair));
    }

    #[test]
    fn non_permutation_cups_break_a_snake(n in 1..=3usize, mask in any::<u64>()) {
        let s = set(n);
        let cup = Rel::from_mask(&relcat::relcore::FiniteSet::unit(), &s.product(&s), mask & ((1 << (n * n)) - 1));
        let pair = structures::DualityPair { carrier: s.clone(), cap: cup.converse(), cup };
        let is_perm = pair.permutation().is_some();
        prop_assume!(!is_perm);
        prop_assert!(!pair.snake_check());
    }
}
