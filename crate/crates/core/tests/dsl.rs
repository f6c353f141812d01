//! The term language: corpus round trips, error fixtures, and agreement
//! between evaluated terms and direct relation algebra.

mod common;

use std::path::{Path, PathBuf};

use proptest::prelude::*;
use relcat::dsl::{self, ast::Span, DslError, Term, Verdict};
use relcat::relcore::Rel;

use common::set;

fn corpus() -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut files = Vec::new();
    for dir in [root.join("../../specs"), root.join("tests/fixtures")] {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().is_some_and(|x| x == "rcat") {
                files.push(p);
            }
        }
    }
    files.sort();
    files
}

#[test]
fn every_parsable_file_round_trips() {
    let mut parsed = 0;
    for path in corpus() {
        let text = std::fs::read_to_string(&path).unwrap();
        let Ok(tree) = dsl::parse(&text) else {
            assert!(path.ends_with("syntax_error.rcat"), "{} fails to parse", path.display());
            continue;
        };
        let printed = dsl::pretty(&tree);
        assert_eq!(dsl::parse(&printed).unwrap(), tree, "{}", path.display());
        parsed += 1;
    }
    assert!(parsed >= 20, "only {parsed} files");
}

#[test]
fn syntax_error_is_located() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/syntax_error.rcat");
    let err = dsl::check_source(&std::fs::read_to_string(path).unwrap()).unwrap_err();
    assert!(matches!(err, DslError::Syntax { .. }));
    assert_eq!(err.position(), (3, 5));
}

#[test]
fn type_errors_are_reported_per_check() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/type_error.rcat");
    let reports = dsl::check_source(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(reports[0].verdict, Verdict::TypeError);
    assert_eq!(dsl::exit_code(&reports), 2);
}

#[test]
fn ill_typed_definitions_fail_elaboration() {
    for (src, line) in [
        ("set K = 2\nset P = 3\ndef bad = id(K) ; id(P)\n", 3),
        ("set K = 2\nbuiltin cup = cup(K)\n", 2),
        ("set K = 2\ndef x = id(K)\ndef x = id(K)\n", 3),
        ("set K = 2\ngen g : K -> K = {5 -> 0}\n", 2),
    ] {
        let err = dsl::check_source(src).unwrap_err();
        assert!(matches!(err, DslError::Type { .. }), "{src}: {err}");
        assert_eq!(err.position().0, line, "{src}: {err}");
    }
}

/// `{a -> b, ...}` over plain indices.
fn data(r: &Rel) -> String {
    let pairs: Vec<String> = r.pairs().map(|(a, b)| format!("{a} -> {b}")).collect();
    format!("{{{}}}", pairs.join(", "))
}

fn rel(src: usize, dst: usize) -> impl Strategy<Value = Rel> {
    proptest::collection::vec(any::<bool>(), src * dst)
        .prop_map(move |bits| Rel::from_fn(&set(src), &set(dst), |a, b| bits[b * src + a]))
}

fn name() -> impl Strategy<Value = String> {
    prop_oneof![Just("f"), Just("g"), Just("h_1"), Just("copy-2")].prop_map(String::from)
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = name().prop_map(|n| Term::Name(n, Span::default()));
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Seq(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Then(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Term::Par(Box::new(a), Box::new(b))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printed_terms_parse_back(t in term()) {
        let text = t.to_string();
        prop_assert_eq!(dsl::parse_term(&text).unwrap(), t);
    }

    /// Vertical composition is relational composition, and horizontal
    /// composition and tensor of scalars are the Kronecker product.
    #[test]
    fn evaluation_is_compositional(
        (a, b, c) in (1..=3usize, 1..=3usize, 1..=3usize, 1..=2usize, 1..=2usize)
            .prop_flat_map(|(x, y, z, u, v)| (rel(x, y), rel(y, z), rel(u, v))),
        flip in any::<bool>(),
    ) {
        let seq = a.compose(&b).unwrap();
        let mut prod = a.product(&c);
        if flip {
            // a wrong expectation must be caught
            let (i, j) = (0, 0);
            if prod.get(i, j) { prod.remove(i, j) } else { prod.insert(i, j) }
        }
        let (x, y, z) = (a.src().size(), a.dst().size(), b.dst().size());
        let (u, v) = (c.src().size(), c.dst().size());
        let src = format!(
            "set X = {x}\nset Y = {y}\nset Z = {z}\nset U = {u}\nset V = {v}\n\
             gen a : X -> Y = {}\ngen b : Y -> Z = {}\ngen c : U -> V = {}\n\
             gen ab : X -> Z = {}\ngen ac : X . U -> Y . V = {}\n\
             check seq: a ; b == ab\ncheck then: a . c == ac\ncheck par: a * c == ac\n",
            data(&a), data(&b), data(&c), data(&seq), pair_data(&prod, u, v),
        );
        let reports = dsl::check_source(&src).unwrap();
        prop_assert_eq!(reports[0].verdict, Verdict::Equal);
        let want = if flip { Verdict::Unequal } else { Verdict::Equal };
        prop_assert_eq!(reports[1].verdict, want);
        prop_assert_eq!(reports[2].verdict, want);

        let prog = dsl::elaborate(&dsl::parse(&src).unwrap()).unwrap();
        let ab = dsl::evaluate(&prog.names["ab"]);
        prop_assert_eq!(&ab.components()[0], &seq);
    }
}

/// Data for a relation between products, written with tuples; `u` and
/// `v` are the sizes of the right factors.
fn pair_data(r: &Rel, u: usize, v: usize) -> String {
    let pairs: Vec<String> = r
        .pairs()
        .map(|(s, t)| format!("({}, {}) -> ({}, {})", s / u, s % u, t / v, t % v))
        .collect();
    format!("{{{}}}", pairs.join(", "))
}
