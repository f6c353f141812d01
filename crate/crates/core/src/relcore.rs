//! Finite sets and binary relations between them, stored as dense bit
//! matrices.
//!
//! A [`Rel`] from `A` to `B` keeps one bit row per element of `B`; bit `a`
//! of row `b` is set iff `a` is related to `b`. Pairs in a cartesian
//! product are encoded left-high: `(x, y)` in `X × Y` is `x * |Y| + y`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("pair ({a}, {b}) out of range for a relation {src} -> {dst}")]
    OutOfRange { a: usize, b: usize, src: usize, dst: usize },
    #[error("cannot compose: left relation ends in a {left}-element set, right starts in a {right}-element set")]
    Mismatch { left: usize, right: usize },
    #[error("labels must be pairwise distinct, `{0}` repeats")]
    DuplicateLabel(String),
    #[error("not a permutation of 0..{size}: {detail}")]
    NotPermutation { size: usize, detail: String },
}

/// A finite carrier. Elements are the indices `0..size`.
#[derive(Clone, Debug, Default)]
pub struct FiniteSet {
    size: usize,
    labels: Option<Arc<[String]>>,
}

impl FiniteSet {
    pub fn new(size: usize) -> Self {
        FiniteSet { size, labels: None }
    }

    /// The one-element set.
    pub fn unit() -> Self {
        FiniteSet::new(1)
    }

    pub fn labeled<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, RelError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(RelError::DuplicateLabel(l.clone()));
            }
        }
        Ok(FiniteSet {
            size: labels.len(),
            labels: Some(labels.into()),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Human-readable name of element `i`: its label if present, else the index.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(ls) if i < ls.len() => ls[i].clone(),
            _ => i.to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// Cartesian product, encoded left-high.
    pub fn product(&self, other: &FiniteSet) -> FiniteSet {
        let labels = match (&self.labels, &other.labels) {
            (None, None) => None,
            _ => Some(
                (0..self.size)
                    .flat_map(|x| (0..other.size).map(move |y| (x, y)))
                    .map(|(x, y)| format!("({},{})", self.label(x), other.label(y)))
                    .collect::<Vec<_>>()
                    .into(),
            ),
        };
        FiniteSet {
            size: self.size * other.size,
            labels,
        }
    }
}

/// Sets compare by cardinality; labels are for reporting only.
impl PartialEq for FiniteSet {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
    }
}

impl Eq for FiniteSet {}

#[derive(Clone)]
pub struct Rel {
    src: FiniteSet,
    dst: FiniteSet,
    stride: usize,
    bits: Vec<u64>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

impl Rel {
    pub fn empty(src: &FiniteSet, dst: &FiniteSet) -> Rel {
        let stride = words(src.size);
        Rel {
            src: src.clone(),
            dst: dst.clone(),
            stride,
            bits: vec![0; stride * dst.size],
        }
    }

    pub fn identity(set: &FiniteSet) -> Rel {
        let mut r = Rel::empty(set, set);
        for a in 0..set.size {
            r.insert(a, a);
        }
        r
    }

    /// The total relation: everything related to everything.
    pub fn full(src: &FiniteSet, dst: &FiniteSet) -> Rel {
        Rel::from_fn(src, dst, |_, _| true)
    }

    pub fn from_fn(src: &FiniteSet, dst: &FiniteSet, mut f: impl FnMut(usize, usize) -> bool) -> Rel {
        let mut r = Rel::empty(src, dst);
        for b in 0..dst.size {
            for a in 0..src.size {
                if f(a, b) {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// Graph of a function given as a lookup table `a -> map[a]`.
    pub fn graph(src: &FiniteSet, dst: &FiniteSet, map: &[usize]) -> Result<Rel, RelError> {
        Rel::make(src, dst, map.iter().copied().enumerate())
    }

    pub fn make(
        src: &FiniteSet,
        dst: &FiniteSet,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Rel, RelError> {
        let mut r = Rel::empty(src, dst);
        for (a, b) in pairs {
            if a >= src.size || b >= dst.size {
                return Err(RelError::OutOfRange {
                    a,
                    b,
                    src: src.size,
                    dst: dst.size,
                });
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    /// Builds a relation from a dense 0/1 matrix with one row per target element.
    pub fn from_matrix(src: &FiniteSet, dst: &FiniteSet, rows: &[Vec<u8>]) -> Result<Rel, RelError> {
        let mut r = Rel::empty(src, dst);
        if rows.len() != dst.size {
            return Err(RelError::OutOfRange {
                a: 0,
                b: rows.len(),
                src: src.size,
                dst: dst.size,
            });
        }
        for (b, row) in rows.iter().enumerate() {
            if row.len() != src.size {
                return Err(RelError::OutOfRange {
                    a: row.len(),
                    b,
                    src: src.size,
                    dst: dst.size,
                });
            }
            for (a, &v) in row.iter().enumerate() {
                if v != 0 {
                    r.insert(a, b);
                }
            }
        }
        Ok(r)
    }

    pub fn src(&self) -> &FiniteSet {
        &self.src
    }

    pub fn dst(&self) -> &FiniteSet {
        &self.dst
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> bool {
        (self.bits[b * self.stride + a / 64] >> (a % 64)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[b * self.stride + a / 64] |= 1 << (a % 64);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.bits[b * self.stride + a / 64] &= !(1 << (a % 64));
    }

    /// Bit row of target `b`: the preimage of `b` as a bitset over the source.
    pub fn row(&self, b: usize) -> &[u64] {
        &self.bits[b * self.stride..(b + 1) * self.stride]
    }

    /// Sources related to `b`.
    pub fn preimage(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(b))
    }

    /// Targets related to `a`.
    pub fn image(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.dst.size).filter(move |&b| self.get(a, b))
    }

    /// All related pairs, ordered by target then source.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dst.size).flat_map(move |b| self.preimage(b).map(move |a| (a, b)))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Row-major bit dump (target-major), used for lexicographic ordering.
    pub fn bit_vec(&self) -> Vec<bool> {
        (0..self.dst.size)
            .flat_map(|b| (0..self.src.size).map(move |a| (a, b)))
            .map(|(a, b)| self.get(a, b))
            .collect()
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.dst.size)
            .map(|b| (0..self.src.size).map(|a| self.get(a, b) as u8).collect())
            .collect()
    }

    /// `self` first, then `next`: relates `a` to `c` iff some `b` has
    /// `(a, b)` in `self` and `(b, c)` in `next`.
    pub fn compose(&self, next: &Rel) -> Result<Rel, RelError> {
        if self.dst.size != next.src.size {
            return Err(RelError::Mismatch {
                left: self.dst.size,
                right: next.src.size,
            });
        }
        let mut out = Rel::empty(&self.src, &next.dst);
        let stride = self.stride;
        for c in 0..next.dst.size {
            let (lo, hi) = (c * stride, (c + 1) * stride);
            for b in next.preimage(c) {
                let row = &self.bits[b * stride..(b + 1) * stride];
                for (o, w) in out.bits[lo..hi].iter_mut().zip(row) {
                    *o |= *w;
                }
            }
        }
        Ok(out)
    }

    pub fn converse(&self) -> Rel {
        let mut out = Rel::empty(&self.dst, &self.src);
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    /// Kronecker product: `((a, c), (b, d))` related iff `(a, b)` in `self`
    /// and `(c, d)` in `other`.
    pub fn product(&self, other: &Rel) -> Rel {
        let src = self.src.product(&other.src);
        let dst = self.dst.product(&other.dst);
        let mut out = Rel::empty(&src, &dst);
        let (ns, nd) = (other.src.size, other.dst.size);
        for (a, b) in self.pairs() {
            for (c, d) in other.pairs() {
                out.insert(a * ns + c, b * nd + d);
            }
        }
        out
    }

    pub fn union(&self, other: &Rel) -> Result<Rel, RelError> {
        if self.src != other.src || self.dst != other.dst {
            return Err(RelError::Mismatch {
                left: self.dst.size,
                right: other.dst.size,
            });
        }
        let mut out = self.clone();
        for (o, w) in out.bits.iter_mut().zip(&other.bits) {
            *o |= *w;
        }
        Ok(out)
    }

    /// The part of the source on which the relation halts.
    pub fn kernel(&self) -> KernelResult {
        let dead: Vec<usize> = (0..self.src.size).filter(|&a| self.image(a).next().is_none()).collect();
        let labels = self
            .src
            .labels()
            .map(|ls| dead.iter().map(|&a| ls[a].clone()).collect::<Vec<_>>());
        let carrier = match labels {
            Some(ls) => FiniteSet::labeled(ls).expect("sub-labels stay distinct"),
            None => FiniteSet::new(dead.len()),
        };
        let inclusion = Rel::graph(&carrier, &self.src, &dead).expect("kernel indices in range");
        KernelResult { carrier, inclusion }
    }

    pub fn predicates(&self) -> Predicates {
        let mut out_deg = vec![0usize; self.src.size];
        let mut in_deg = vec![0usize; self.dst.size];
        for (a, b) in self.pairs() {
            out_deg[a] += 1;
            in_deg[b] += 1;
        }
        let is_function = out_deg.iter().all(|&d| d <= 1);
        let is_total = out_deg.iter().all(|&d| d >= 1);
        let is_injective = in_deg.iter().all(|&d| d <= 1);
        let is_surjective = in_deg.iter().all(|&d| d >= 1);
        Predicates {
            is_function,
            is_total,
            is_injective,
            is_surjective,
            is_bijection: is_function && is_total && is_injective && is_surjective,
        }
    }

    /// The function this relation is the graph of, if it is one.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        let p = self.predicates();
        if !(p.is_function && p.is_total) {
            return None;
        }
        Some((0..self.src.size).map(|a| self.image(a).next().unwrap()).collect())
    }

    /// Every relation `src -> dst`, in increasing order of the bit pattern
    /// (bit `b * |src| + a`).
    pub fn all(src: &FiniteSet, dst: &FiniteSet) -> impl Iterator<Item = Rel> {
        let n = src.size * dst.size;
        assert!(n < 64, "relation space too large to enumerate");
        let (src, dst) = (src.clone(), dst.clone());
        (0u64..1 << n).map(move |m| Rel::from_mask(&src, &dst, m))
    }

    /// Relation whose pair `(a, b)` is bit `b * |src| + a` of `mask`.
    pub fn from_mask(src: &FiniteSet, dst: &FiniteSet, mask: u64) -> Rel {
        let ns = src.size;
        Rel::from_fn(src, dst, |a, b| (mask >> (b * ns + a)) & 1 == 1)
    }
}

impl PartialEq for Rel {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && self.bits == other.bits
    }
}

impl Eq for Rel {}

impl std::hash::Hash for Rel {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.src.size.hash(state);
        self.dst.size.hash(state);
        self.bits.hash(state);
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rel({} -> {}) {{", self.src.size, self.dst.size)?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in 0..self.dst.size {
            let row: Vec<&str> = (0..self.src.size)
                .map(|a| if self.get(a, b) { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let tz = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + tz)
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub is_function: bool,
    pub is_total: bool,
    pub is_injective: bool,
    pub is_surjective: bool,
    pub is_bijection: bool,
}

#[derive(Clone, Debug)]
pub struct KernelResult {
    pub carrier: FiniteSet,
    /// Injective function `carrier -> A`.
    pub inclusion: Rel,
}

impl KernelResult {
    /// Factors `sigma: X -> A` through the inclusion, when every element
    /// `sigma` reaches lies in the kernel.
    pub fn factor(&self, sigma: &Rel) -> Option<Rel> {
        let position: Vec<Option<usize>> = {
            let mut pos = vec![None; self.inclusion.dst().size()];
            for (k, a) in self.inclusion.pairs() {
                pos[a] = Some(k);
            }
            pos
        };
        let mut out = Rel::empty(sigma.src(), &self.carrier);
        for (x, a) in sigma.pairs() {
            out.insert(x, position[a]?);
        }
        Some(out)
    }
}

/// A bijection on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, RelError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(RelError::NotPermutation {
                    size: n,
                    detail: format!("{v} out of range"),
                });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(RelError::NotPermutation {
                    size: n,
                    detail: format!("{v} appears twice"),
                });
            }
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation {
            map: self.map.iter().map(|&i| next.map[i]).collect(),
        }
    }

    pub fn to_rel(&self) -> Rel {
        let s = FiniteSet::new(self.map.len());
        Rel::graph(&s, &s, &self.map).expect("permutation in range")
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation { map: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> FiniteSet {
        FiniteSet::new(n)
    }

    #[test]
    fn make_handles_zero_identity_and_shared_fiber() {
        let e = Rel::make(&set(2), &set(2), []).unwrap();
        assert!(e.is_empty());
        let id = Rel::make(&set(2), &set(2), [(0, 0), (1, 1)]).unwrap();
        assert_eq!(id, Rel::identity(&set(2)));
        let dup = Rel::make(&set(2), &set(2), [(0, 0), (0, 0), (1, 1)]).unwrap();
        assert_eq!(dup, id);
        let e_fiber = Rel::make(&set(4), &set(2), [(0, 0), (1, 1), (2, 1), (3, 0)]).unwrap();
        assert_eq!(e_fiber.to_matrix(), vec![vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
    }

    #[test]
    fn make_rejects_out_of_range() {
        let err = Rel::make(&set(2), &set(3), [(0, 0), (2, 1)]).unwrap_err();
        assert_eq!(
            err,
            RelError::OutOfRange {
                a: 2,
                b: 1,
                src: 2,
                dst: 3
            }
        );
        assert!(err.to_string().contains("(2, 1)"));
    }

    #[test]
    fn compose_examples() {
        let r = Rel::make(&set(2), &set(2), [(0, 1)]).unwrap();
        let s = Rel::make(&set(2), &set(2), [(1, 0)]).unwrap();
        assert_eq!(r.compose(&s).unwrap(), Rel::make(&set(2), &set(2), [(0, 0)]).unwrap());
        let id = Rel::identity(&set(2));
        assert_eq!(id.compose(&r).unwrap(), r);
        let empty = Rel::empty(&set(2), &set(3));
        assert!(r.compose(&empty).unwrap().is_empty());
        let err = r.compose(&Rel::empty(&set(3), &set(1))).unwrap_err();
        assert_eq!(err, RelError::Mismatch { left: 2, right: 3 });
    }

    #[test]
    fn compose_wide_relations_cross_word_boundaries() {
        let n = set(130);
        let shift = Rel::from_fn(&n, &n, |a, b| b == (a + 65) % 130);
        let twice = shift.compose(&shift).unwrap();
        for a in 0..130 {
            assert_eq!(twice.image(a).collect::<Vec<_>>(), vec![(a + 130) % 130]);
        }
    }

    #[test]
    fn converse_examples() {
        let id = Rel::identity(&set(3));
        assert_eq!(id.converse(), id);
        let eta = Rel::make(&set(1), &set(4), [(0, 0), (0, 3)]).unwrap();
        let cap = eta.converse();
        assert_eq!(cap.to_matrix(), vec![vec![1, 0, 0, 1]]);
        let r = Rel::make(&set(3), &set(2), [(0, 1), (2, 0), (2, 1)]).unwrap();
        assert_eq!(r.converse().converse(), r);
    }

    #[test]
    fn product_examples() {
        let p = Rel::identity(&set(2)).product(&Rel::identity(&set(3)));
        assert_eq!(p, Rel::identity(&set(6)));
        assert!(Rel::empty(&set(2), &set(1))
            .product(&Rel::full(&set(3), &set(3)))
            .is_empty());
        let full12 = Rel::full(&set(1), &set(2));
        assert_eq!(full12.product(&full12), Rel::full(&set(1), &set(4)));
    }

    #[test]
    fn product_is_left_high() {
        // (a, c) -> (b, d) with left factor high: r = {0->1}, s = {1->0}
        let r = Rel::make(&set(2), &set(2), [(0, 1)]).unwrap();
        let s = Rel::make(&set(3), &set(2), [(1, 0)]).unwrap();
        let p = r.product(&s);
        assert_eq!(p.pairs().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn kernel_examples() {
        let k = Rel::empty(&set(3), &set(2)).kernel();
        assert_eq!(k.carrier.size(), 3);
        assert_eq!(k.inclusion, Rel::identity(&set(3)));
        assert_eq!(Rel::full(&set(3), &set(2)).kernel().carrier.size(), 0);
        let r = Rel::make(&set(3), &set(2), [(0, 0), (2, 1)]).unwrap();
        let k = r.kernel();
        assert_eq!(k.carrier.size(), 1);
        assert_eq!(k.inclusion.pairs().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(k.inclusion.compose(&r).unwrap().is_empty());
    }

    #[test]
    fn kernel_factoring_fails_outside_kernel() {
        let r = Rel::make(&set(3), &set(2), [(0, 0), (2, 1)]).unwrap();
        let sigma = Rel::make(&set(1), &set(3), [(0, 0)]).unwrap();
        assert!(r.kernel().factor(&sigma).is_none());
    }

    #[test]
    fn predicate_examples() {
        let p = Rel::identity(&set(3)).predicates();
        assert!(p.is_bijection);
        let p = Rel::empty(&set(2), &set(2)).predicates();
        assert!(p.is_function && !p.is_total && !p.is_bijection);
        let d1 = Rel::make(&set(2), &set(2), [(0, 1), (1, 0)]).unwrap();
        assert!(d1.predicates().is_bijection);
        let many = Rel::full(&set(1), &set(2)).predicates();
        assert!(!many.is_function && many.is_injective && many.is_surjective);
    }

    #[test]
    fn labels_must_be_distinct() {
        assert!(FiniteSet::labeled(["a", "b"]).is_ok());
        assert_eq!(
            FiniteSet::labeled(["a", "a"]).unwrap_err(),
            RelError::DuplicateLabel("a".into())
        );
    }

    #[test]
    fn permutations_enumerate_lexicographically() {
        let ps = Permutation::all(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0].as_slice(), &[0, 1, 2]);
        assert_eq!(ps[5].as_slice(), &[2, 1, 0]);
        assert_eq!(Permutation::all(0).len(), 1);
        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        assert_eq!(p.then(&p.inverse()), Permutation::identity(3));
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn all_relations_count() {
        assert_eq!(Rel::all(&set(2), &set(2)).count(), 16);
        assert_eq!(Rel::all(&set(0), &set(3)).count(), 1);
    }
}
