//! 1-cells and 2-cells of the bicategory of matrices of relations.
//!
//! A 1-cell `S -> T` is a `|T| × |S|` matrix of finite sets (fibers),
//! stored row-major with `t` outer. Every fiber element carries a path
//! key; horizontal composition concatenates keys as
//! `left ++ [t] ++ right` (the middle digit is dropped when the middle
//! 0-cell has one element) and orders each fiber by key. Concatenation
//! is associative, so composites are strictly associative, and identity
//! 1-cells are recognised structurally and absorbed, so unit laws are
//! strict too.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::relcore::{FiniteSet, Rel, RelError};

pub type Key = Box<[u32]>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("0-cell mismatch: {what} has {left} elements but {right} were expected")]
    ZeroCell {
        what: &'static str,
        left: usize,
        right: usize,
    },
    #[error("2-cells are not composable: {0}")]
    NotComposable(String),
    #[error("component ({t}, {s}) has shape {got:?}, fibers need {want:?}")]
    ComponentShape {
        t: usize,
        s: usize,
        got: (usize, usize),
        want: (usize, usize),
    },
    #[error("swap needs 1-cells between one-element 0-cells")]
    SwapShape,
    #[error("horizontal composite has colliding element keys")]
    AmbiguousEncoding,
    #[error(transparent)]
    Rel(#[from] RelError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Fiber {
    keys: Vec<Key>,
}

#[derive(Clone)]
pub struct OneCell {
    src: FiniteSet,
    dst: FiniteSet,
    fibers: Arc<Vec<Fiber>>,
}

impl OneCell {
    /// A 1-cell with plain fibers of the given sizes, row-major `(t, s)`.
    pub fn from_sizes(src: &FiniteSet, dst: &FiniteSet, sizes: &[usize]) -> Result<OneCell, CellError> {
        if sizes.len() != src.size() * dst.size() {
            return Err(CellError::ZeroCell {
                what: "fiber matrix",
                left: sizes.len(),
                right: src.size() * dst.size(),
            });
        }
        let fibers = sizes
            .iter()
            .map(|&n| Fiber {
                keys: (0..n as u32).map(|i| vec![i].into_boxed_slice()).collect(),
            })
            .collect();
        Ok(OneCell {
            src: src.clone(),
            dst: dst.clone(),
            fibers: Arc::new(fibers),
        })
    }

    /// A 1-cell between one-element 0-cells whose single fiber is `set`.
    pub fn scalar(set: &FiniteSet) -> OneCell {
        let unit = FiniteSet::unit();
        OneCell::from_sizes(&unit, &unit, &[set.size()]).expect("one fiber")
    }

    /// The identity 1-cell: singleton fibers on the diagonal, empty elsewhere.
    pub fn identity(s: &FiniteSet) -> OneCell {
        let n = s.size();
        let fibers = (0..n * n)
            .map(|i| Fiber {
                keys: if i / n.max(1) == i % n.max(1) {
                    vec![Key::default()]
                } else {
                    vec![]
                },
            })
            .collect();
        OneCell {
            src: s.clone(),
            dst: s.clone(),
            fibers: Arc::new(fibers),
        }
    }

    /// A 1-cell all of whose fibers are singletons.
    pub fn singletons(src: &FiniteSet, dst: &FiniteSet) -> OneCell {
        let fibers = (0..src.size() * dst.size())
            .map(|_| Fiber {
                keys: vec![Key::default()],
            })
            .collect();
        OneCell {
            src: src.clone(),
            dst: dst.clone(),
            fibers: Arc::new(fibers),
        }
    }

    pub fn src(&self) -> &FiniteSet {
        &self.src
    }

    pub fn dst(&self) -> &FiniteSet {
        &self.dst
    }

    fn index(&self, t: usize, s: usize) -> usize {
        t * self.src.size() + s
    }

    pub fn fiber_size(&self, t: usize, s: usize) -> usize {
        self.fibers[self.index(t, s)].keys.len()
    }

    /// The fiber at `(t, s)` as a finite set.
    pub fn fiber(&self, t: usize, s: usize) -> FiniteSet {
        FiniteSet::new(self.fiber_size(t, s))
    }

    pub fn key(&self, t: usize, s: usize, i: usize) -> &[u32] {
        &self.fibers[self.index(t, s)].keys[i]
    }

    /// Fiber sizes, row-major.
    pub fn sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(|f| f.keys.len()).collect()
    }

    /// Total number of fiber elements.
    pub fn width(&self) -> usize {
        self.fibers.iter().map(|f| f.keys.len()).sum()
    }

    pub fn is_identity(&self) -> bool {
        let n = self.src.size();
        self.dst.size() == n
            && self.fibers.iter().enumerate().all(|(i, f)| {
                if i / n == i % n {
                    f.keys.len() == 1 && f.keys[0].is_empty()
                } else {
                    f.keys.is_empty()
                }
            })
    }

    pub fn is_scalar(&self) -> bool {
        self.src.size() == 1 && self.dst.size() == 1
    }
}

impl PartialEq for OneCell {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && self.fibers == other.fibers
    }
}

impl Eq for OneCell {}

impl fmt::Debug for OneCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "OneCell({} -> {}, {:?})",
            self.src.size(),
            self.dst.size(),
            self.sizes()
        )
    }
}

impl fmt::Display for OneCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.src.size();
        write!(f, "{} -> {} [", n, self.dst.size())?;
        for t in 0..self.dst.size() {
            if t > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..n).map(|s| self.fiber_size(t, s).to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Where each element `(t, a, b)` of a horizontal composite lands in its fiber.
pub struct Layout {
    fibers: Vec<FiberLayout>,
    src: usize,
}

struct FiberLayout {
    offsets: Vec<usize>,
    right_sizes: Vec<usize>,
    pos: Vec<usize>,
}

impl Layout {
    /// Position in fiber `(u, s)` of the pair (element `a` of `A_{t,s}`,
    /// element `b` of `B_{u,t}`).
    pub fn position(&self, u: usize, s: usize, t: usize, a: usize, b: usize) -> usize {
        let f = &self.fibers[u * self.src + s];
        f.pos[f.offsets[t] + a * f.right_sizes[t] + b]
    }
}

/// Horizontal composite `A . B` (first `A: S -> T`, then `B: T -> U`).
pub fn hcompose_one(a: &OneCell, b: &OneCell) -> Result<OneCell, CellError> {
    hcompose_layout(a, b).map(|(c, _)| c)
}

pub fn hcompose_layout(a: &OneCell, b: &OneCell) -> Result<(OneCell, Layout), CellError> {
    if a.dst != b.src {
        return Err(CellError::ZeroCell {
            what: "middle 0-cell",
            left: a.dst.size(),
            right: b.src.size(),
        });
    }
    let (ns, nt, nu) = (a.src.size(), a.dst.size(), b.dst.size());
    let left_id = a.is_identity();
    let right_id = !left_id && b.is_identity();
    let mark_middle = nt != 1;
    let mut fibers = Vec::with_capacity(nu * ns);
    let mut layouts = Vec::with_capacity(nu * ns);
    for u in 0..nu {
        for s in 0..ns {
            let mut offsets = Vec::with_capacity(nt);
            let mut right_sizes = Vec::with_capacity(nt);
            let mut entries: Vec<(Key, usize)> = Vec::new();
            for t in 0..nt {
                offsets.push(entries.len());
                let (na, nb) = (a.fiber_size(t, s), b.fiber_size(u, t));
                right_sizes.push(nb);
                for ia in 0..na {
                    for ib in 0..nb {
                        let (key, direct) = if left_id {
                            (b.key(u, t, ib).into(), ib)
                        } else if right_id {
                            (a.key(t, s, ia).into(), ia)
                        } else {
                            let ka = a.key(t, s, ia);
                            let kb = b.key(u, t, ib);
                            let mut k = Vec::with_capacity(ka.len() + kb.len() + 1);
                            k.extend_from_slice(ka);
                            if mark_middle {
                                k.push(t as u32);
                            }
                            k.extend_from_slice(kb);
                            (k.into_boxed_slice(), 0)
                        };
                        entries.push((key, direct));
                    }
                }
            }
            let pos: Vec<usize>;
            let keys: Vec<Key>;
            if left_id || right_id {
                pos = entries.iter().map(|e| e.1).collect();
                let mut ks = vec![Key::default(); entries.len()];
                for (k, p) in entries.into_iter().map(|e| e.0).zip(&pos) {
                    ks[*p] = k;
                }
                keys = ks;
            } else {
                let mut order: Vec<usize> = (0..entries.len()).collect();
                order.sort_by(|&i, &j| entries[i].0.cmp(&entries[j].0));
                let mut p = vec![0; entries.len()];
                for (rank, &i) in order.iter().enumerate() {
                    p[i] = rank;
                }
                if order.windows(2).any(|w| entries[w[0]].0 == entries[w[1]].0) {
                    return Err(CellError::AmbiguousEncoding);
                }
                let mut slots: Vec<Option<Key>> = entries.into_iter().map(|e| Some(e.0)).collect();
                keys = order.iter().map(|&i| slots[i].take().unwrap()).collect();
                pos = p;
            }
            fibers.push(Fiber { keys });
            layouts.push(FiberLayout {
                offsets,
                right_sizes,
                pos,
            });
        }
    }
    Ok((
        OneCell {
            src: a.src.clone(),
            dst: b.dst.clone(),
            fibers: Arc::new(fibers),
        },
        Layout {
            fibers: layouts,
            src: ns,
        },
    ))
}

/// Tensor of 1-cells: 0-cells and fibers multiply, left factor high.
pub fn tensor_one(a: &OneCell, b: &OneCell) -> OneCell {
    tensor_one_layout(a, b).0
}

/// Returns the tensor and, per fiber, the position of pair `(ia, ib)` at
/// flat index `ia * |B_fiber| + ib`.
fn tensor_one_layout(a: &OneCell, b: &OneCell) -> (OneCell, Vec<Vec<usize>>) {
    let src = a.src.product(&b.src);
    let dst = a.dst.product(&b.dst);
    let (bs, bt) = (b.src.size(), b.dst.size());
    let mut fibers = Vec::with_capacity(src.size() * dst.size());
    let mut layouts = Vec::with_capacity(src.size() * dst.size());
    for t in 0..dst.size() {
        let (t1, t2) = (t / bt, t % bt);
        for s in 0..src.size() {
            let (s1, s2) = (s / bs, s % bs);
            let (na, nb) = (a.fiber_size(t1, s1), b.fiber_size(t2, s2));
            let mut entries: Vec<Key> = Vec::with_capacity(na * nb);
            for ia in 0..na {
                for ib in 0..nb {
                    let mut k = a.key(t1, s1, ia).to_vec();
                    k.extend_from_slice(b.key(t2, s2, ib));
                    entries.push(k.into_boxed_slice());
                }
            }
            let mut order: Vec<usize> = (0..entries.len()).collect();
            order.sort_by(|&i, &j| entries[i].cmp(&entries[j]));
            let mut pos = vec![0; entries.len()];
            for (rank, &i) in order.iter().enumerate() {
                pos[i] = rank;
            }
            let keys = order.iter().map(|&i| entries[i].clone()).collect();
            fibers.push(Fiber { keys });
            layouts.push(pos);
        }
    }
    (
        OneCell {
            src,
            dst,
            fibers: Arc::new(fibers),
        },
        layouts,
    )
}

#[derive(Clone, PartialEq, Eq)]
pub struct TwoCell {
    domain: OneCell,
    codomain: OneCell,
    components: Vec<Rel>,
}

/// The first place two 2-cells disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Difference {
    Domain {
        left: OneCell,
        right: OneCell,
    },
    Codomain {
        left: OneCell,
        right: OneCell,
    },
    Component {
        t: usize,
        s: usize,
        a: usize,
        b: usize,
        in_left: bool,
    },
}

impl fmt::Display for Difference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Difference::Domain { left, right } => write!(f, "domains differ: {left} vs {right}"),
            Difference::Codomain { left, right } => write!(f, "codomains differ: {left} vs {right}"),
            Difference::Component { t, s, a, b, in_left } => write!(
                f,
                "component ({t}, {s}): pair {a} -> {b} only on the {} side",
                if *in_left { "left" } else { "right" }
            ),
        }
    }
}

impl TwoCell {
    pub fn new(domain: OneCell, codomain: OneCell, components: Vec<Rel>) -> Result<TwoCell, CellError> {
        parallel(&domain, &codomain)?;
        let ns = domain.src.size();
        if components.len() != ns * domain.dst.size() {
            return Err(CellError::ZeroCell {
                what: "component matrix",
                left: components.len(),
                right: ns * domain.dst.size(),
            });
        }
        for (i, r) in components.iter().enumerate() {
            let (t, s) = (i / ns, i % ns);
            let want = (domain.fiber_size(t, s), codomain.fiber_size(t, s));
            let got = (r.src().size(), r.dst().size());
            if got != want {
                return Err(CellError::ComponentShape { t, s, got, want });
            }
        }
        Ok(TwoCell {
            domain,
            codomain,
            components,
        })
    }

    /// Builds each component from a predicate on `(t, s, a, b)`.
    pub fn from_fn(
        domain: &OneCell,
        codomain: &OneCell,
        mut f: impl FnMut(usize, usize, usize, usize) -> bool,
    ) -> Result<TwoCell, CellError> {
        parallel(domain, codomain)?;
        let ns = domain.src.size();
        let components = (0..ns * domain.dst.size())
            .map(|i| {
                let (t, s) = (i / ns, i % ns);
                Rel::from_fn(&domain.fiber(t, s), &codomain.fiber(t, s), |a, b| f(t, s, a, b))
            })
            .collect();
        Ok(TwoCell {
            domain: domain.clone(),
            codomain: codomain.clone(),
            components,
        })
    }

    pub fn identity(a: &OneCell) -> TwoCell {
        TwoCell::from_fn(a, a, |_, _, x, y| x == y).expect("parallel")
    }

    pub fn empty(domain: &OneCell, codomain: &OneCell) -> Result<TwoCell, CellError> {
        TwoCell::from_fn(domain, codomain, |_, _, _, _| false)
    }

    /// A 2-cell between scalar 1-cells, given by its single component.
    pub fn scalar(r: &Rel) -> TwoCell {
        TwoCell {
            domain: OneCell::scalar(r.src()),
            codomain: OneCell::scalar(r.dst()),
            components: vec![r.clone()],
        }
    }

    /// Scalar 2-cell with explicit 1-cells, e.g. a structured domain `P . K`.
    pub fn scalar_between(domain: &OneCell, codomain: &OneCell, r: &Rel) -> Result<TwoCell, CellError> {
        TwoCell::new(domain.clone(), codomain.clone(), vec![r.clone()])
    }

    pub fn domain(&self) -> &OneCell {
        &self.domain
    }

    pub fn codomain(&self) -> &OneCell {
        &self.codomain
    }

    pub fn component(&self, t: usize, s: usize) -> &Rel {
        &self.components[t * self.domain.src.size() + s]
    }

    pub fn components(&self) -> &[Rel] {
        &self.components
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.components.iter().all(|r| *r == Rel::identity(r.src()))
    }
}

impl fmt::Debug for TwoCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TwoCell({:?} => {:?}, {:?})",
            self.domain, self.codomain, self.components
        )
    }
}

fn parallel(a: &OneCell, b: &OneCell) -> Result<(), CellError> {
    if a.src != b.src {
        return Err(CellError::ZeroCell {
            what: "codomain source",
            left: b.src.size(),
            right: a.src.size(),
        });
    }
    if a.dst != b.dst {
        return Err(CellError::ZeroCell {
            what: "codomain target",
            left: b.dst.size(),
            right: a.dst.size(),
        });
    }
    Ok(())
}

/// Vertical composite: `alpha` first, then `beta`, componentwise.
pub fn vcompose(alpha: &TwoCell, beta: &TwoCell) -> Result<TwoCell, CellError> {
    if alpha.codomain != beta.domain {
        return Err(CellError::NotComposable(format!(
            "codomain {} does not match domain {}",
            alpha.codomain, beta.domain
        )));
    }
    let components = alpha
        .components
        .iter()
        .zip(&beta.components)
        .map(|(r, s)| r.compose(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TwoCell {
        domain: alpha.domain.clone(),
        codomain: beta.codomain.clone(),
        components,
    })
}

/// Horizontal composite of 2-cells `alpha: A => A'` and `beta: B => B'`,
/// giving `A . B => A' . B'`.
pub fn hcompose_two(alpha: &TwoCell, beta: &TwoCell) -> Result<TwoCell, CellError> {
    let (dom, dl) = hcompose_layout(&alpha.domain, &beta.domain)?;
    let (cod, cl) = hcompose_layout(&alpha.codomain, &beta.codomain)?;
    let (ns, nt, nu) = (dom.src.size(), alpha.domain.dst.size(), dom.dst.size());
    let mut components = Vec::with_capacity(ns * nu);
    for u in 0..nu {
        for s in 0..ns {
            let mut r = Rel::empty(&dom.fiber(u, s), &cod.fiber(u, s));
            for t in 0..nt {
                let ra = alpha.component(t, s);
                let rb = beta.component(u, t);
                if ra.is_empty() || rb.is_empty() {
                    continue;
                }
                let pb: Vec<(usize, usize)> = rb.pairs().collect();
                for (ia, ja) in ra.pairs() {
                    for &(ib, jb) in &pb {
                        r.insert(dl.position(u, s, t, ia, ib), cl.position(u, s, t, ja, jb));
                    }
                }
            }
            components.push(r);
        }
    }
    Ok(TwoCell {
        domain: dom,
        codomain: cod,
        components,
    })
}

/// Horizontal composite of several 2-cells, left to right.
pub fn hcompose_all(cells: &[&TwoCell]) -> Result<TwoCell, CellError> {
    let (first, rest) = cells
        .split_first()
        .ok_or_else(|| CellError::NotComposable("empty horizontal composite".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, c| hcompose_two(&acc, c))
}

/// Vertical composite of several 2-cells, first to last.
pub fn vcompose_all(cells: &[&TwoCell]) -> Result<TwoCell, CellError> {
    let (first, rest) = cells
        .split_first()
        .ok_or_else(|| CellError::NotComposable("empty vertical composite".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, c| vcompose(&acc, c))
}

/// Tensor (Kronecker) product of 2-cells.
pub fn tensor(alpha: &TwoCell, beta: &TwoCell) -> TwoCell {
    let (dom, dl) = tensor_one_layout(&alpha.domain, &beta.domain);
    let (cod, cl) = tensor_one_layout(&alpha.codomain, &beta.codomain);
    let (bs, bt) = (beta.domain.src.size(), beta.domain.dst.size());
    let ns = dom.src.size();
    let components = (0..ns * dom.dst.size())
        .map(|i| {
            let (t, s) = (i / ns, i % ns);
            let (t1, t2, s1, s2) = (t / bt, t % bt, s / bs, s % bs);
            let ra = alpha.component(t1, s1);
            let rb = beta.component(t2, s2);
            let (nb_dom, nb_cod) = (rb.src().size(), rb.dst().size());
            let mut r = Rel::empty(&dom.fiber(t, s), &cod.fiber(t, s));
            for (ia, ja) in ra.pairs() {
                for (ib, jb) in rb.pairs() {
                    r.insert(dl[i][ia * nb_dom + ib], cl[i][ja * nb_cod + jb]);
                }
            }
            r
        })
        .collect();
    TwoCell {
        domain: dom,
        codomain: cod,
        components,
    }
}

pub fn converse(alpha: &TwoCell) -> TwoCell {
    TwoCell {
        domain: alpha.codomain.clone(),
        codomain: alpha.domain.clone(),
        components: alpha.components.iter().map(Rel::converse).collect(),
    }
}

/// Exact equality; on failure, the first difference in row-major order.
pub fn equal(alpha: &TwoCell, beta: &TwoCell) -> Result<(), Difference> {
    if alpha.domain != beta.domain {
        return Err(Difference::Domain {
            left: alpha.domain.clone(),
            right: beta.domain.clone(),
        });
    }
    if alpha.codomain != beta.codomain {
        return Err(Difference::Codomain {
            left: alpha.codomain.clone(),
            right: beta.codomain.clone(),
        });
    }
    let ns = alpha.domain.src.size();
    for (i, (r, s)) in alpha.components.iter().zip(&beta.components).enumerate() {
        if r == s {
            continue;
        }
        for b in 0..r.dst().size() {
            for a in 0..r.src().size() {
                let (x, y) = (r.get(a, b), s.get(a, b));
                if x != y {
                    return Err(Difference::Component {
                        t: i / ns,
                        s: i % ns,
                        a,
                        b,
                        in_left: x,
                    });
                }
            }
        }
    }
    Ok(())
}

/// The symmetry `A . B => B . A` for 1-cells between one-element 0-cells.
pub fn swap(a: &OneCell, b: &OneCell) -> Result<TwoCell, CellError> {
    if !(a.is_scalar() && b.is_scalar()) {
        return Err(CellError::SwapShape);
    }
    let (ab, l1) = hcompose_layout(a, b)?;
    let (ba, l2) = hcompose_layout(b, a)?;
    let mut r = Rel::empty(&ab.fiber(0, 0), &ba.fiber(0, 0));
    for ia in 0..a.fiber_size(0, 0) {
        for ib in 0..b.fiber_size(0, 0) {
            r.insert(l1.position(0, 0, 0, ia, ib), l2.position(0, 0, 0, ib, ia));
        }
    }
    TwoCell::new(ab, ba, vec![r])
}
