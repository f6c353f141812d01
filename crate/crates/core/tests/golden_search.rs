//! Search results against counts and triples computed by a separate
//! brute-force program working directly on bitmasks.
//!
//! Mask layouts used below: E bit `(p*K + k)*C + c`, D bit `k*P + p`.

mod common;

use std::collections::BTreeSet;

use relcat::relcore::Permutation;
use relcat::search::{self, Constraint, SearchSpec, DEFAULT_BUDGET};

use common::{key_of, Key};

fn keys(sizes: (usize, usize, usize), cs: &[Constraint], dedup: bool) -> Vec<Key> {
    let spec = SearchSpec::new(sizes.0, sizes.1, sizes.2, cs).with_dedup(dedup);
    search::enumerate(&spec, DEFAULT_BUDGET, None)
        .unwrap()
        .iter()
        .map(|r| key_of(&r.triple))
        .collect()
}

/// sizes, correct solutions, correct with S1, orbits under relabeling
type Row = ((usize, usize, usize), usize, usize, Option<usize>);

#[test]
fn counts_match_the_reference_program() {
    let table: [Row; 5] = [
        ((1, 1, 1), 1, 1, Some(1)),
        ((2, 2, 2), 8, 8, Some(4)),
        ((2, 2, 1), 4, 4, Some(2)),
        ((1, 2, 2), 98, 98, Some(32)),
        ((2, 1, 2), 0, 0, None),
    ];
    let correct = [Constraint::Correctness];
    let with_s1 = [Constraint::Correctness, Constraint::S1];
    for (sizes, n_correct, n_s1, orbits) in table {
        assert_eq!(keys(sizes, &correct, false).len(), n_correct, "{sizes:?}");
        assert_eq!(keys(sizes, &with_s1, false).len(), n_s1, "{sizes:?} with S1");
        if let Some(o) = orbits {
            assert_eq!(keys(sizes, &with_s1, true).len(), o, "{sizes:?} orbits");
        }
    }
}

#[test]
fn bit_triples_match_the_reference_program() {
    let expected: BTreeSet<Key> = [
        (vec![0, 1], vec![6, 6], 60),
        (vec![0, 1], vec![6, 9], 150),
        (vec![0, 1], vec![9, 6], 105),
        (vec![0, 1], vec![9, 9], 195),
        (vec![1, 0], vec![6, 6], 195),
        (vec![1, 0], vec![6, 9], 105),
        (vec![1, 0], vec![9, 6], 150),
        (vec![1, 0], vec![9, 9], 60),
    ]
    .into_iter()
    .collect();
    let got: BTreeSet<Key> = keys((2, 2, 2), &[Constraint::Correctness], false).into_iter().collect();
    assert_eq!(got, expected);
    assert!(got.contains(&(Permutation::identity(2).as_slice().to_vec(), vec![9, 6], 105)));
}

#[test]
fn output_is_independent_of_thread_count() {
    let spec = SearchSpec::new(1, 2, 2, &[Constraint::Correctness]);
    let one = search::enumerate(&spec, DEFAULT_BUDGET, Some(1)).unwrap();
    let many = search::enumerate(&spec, DEFAULT_BUDGET, Some(4)).unwrap();
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&many).unwrap()
    );
}

#[test]
fn evaluator_agrees_with_the_naive_enumerator_at_every_small_size() {
    for sizes in [
        (1, 1, 1),
        (2, 2, 1),
        (1, 2, 2),
        (2, 1, 2),
        (1, 1, 2),
        (2, 1, 1),
        (1, 2, 1),
    ] {
        for (need_s1, cs) in [
            (false, vec![Constraint::Correctness]),
            (true, vec![Constraint::Correctness, Constraint::S1]),
        ] {
            let ours: BTreeSet<Key> = keys(sizes, &cs, false).into_iter().collect();
            assert_eq!(
                ours,
                common::naive_set(sizes.0, sizes.1, sizes.2, need_s1),
                "{sizes:?} {cs:?}"
            );
        }
    }
}
