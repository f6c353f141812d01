//! Theorem checks at a size too large to enumerate.

use relcat::search::sample_theorems;

#[test]
fn no_counterexamples_in_a_hundred_thousand_candidates_at_size_three() {
    let rep = sample_theorems((3, 3, 3), 100_000, 0, None).unwrap();
    let t = &rep.theorems;
    assert_eq!(rep.sampled, 100_000);
    assert!(
        t.correct > 1000,
        "too few correct candidates to say anything: {}",
        t.correct
    );
    assert_eq!(t.counterexamples(), 0, "{t:?}");
    assert_eq!(t.d_bijective.checked, t.correct);
    assert_eq!(t.s1_implies_rest.checked, t.correct_with_s1);
}
