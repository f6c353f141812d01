//! Helpers shared by the integration suites: a brute-force search that
//! never touches the cell evaluator, law checkers, and random inputs.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use relcat::cells::{self, OneCell, TwoCell};
use relcat::relcore::{FiniteSet, Rel};
use relcat::search::Triple;

pub fn set(n: usize) -> FiniteSet {
    FiniteSet::new(n)
}

/// `(π, D masks, E mask)` with E bit `(p*K + k)*C + c` and D bit `k*P + p`.
pub type Key = (Vec<usize>, Vec<u64>, u64);

pub fn e_mask(t: &Triple) -> u64 {
    let c = t.e.dst().size();
    t.e.pairs().fold(0, |m, (x, cc)| m | 1 << (x * c + cc))
}

pub fn d_masks(t: &Triple) -> Vec<u64> {
    let p = t.d[0].dst().size();
    t.d.iter()
        .map(|r| r.pairs().fold(0, |m, (j, pp)| m | 1 << (j * p + pp)))
        .collect()
}

pub fn key_of(t: &Triple) -> Key {
    (t.pi.as_slice().to_vec(), d_masks(t), e_mask(t))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Every correct implementation, found with nested loops over bitmasks.
/// Plaintext `p` with key `k` may produce `c ∈ E(p, k)`, after which Bob
/// holds key `π k` and decrypts to `D_c(π k)`; correctness asks that the
/// set of outcomes `(c, p')` be exactly `{(c, p) : c ∈ C}`.
/// The flag records whether every plaintext can reach every ciphertext.
#[allow(clippy::needless_range_loop)]
pub fn naive_solutions(p: usize, k: usize, c: usize) -> Vec<(Key, bool)> {
    let d_bits = k * p;
    let e_bits = p * k * c;
    let mut out = Vec::new();
    for pi in permutations(k) {
        let mut dm = vec![0u64; c];
        loop {
            for em in 0u64..1 << e_bits {
                let mut ok = true;
                for pp in 0..p {
                    let mut outcome = 0u64;
                    for kk in 0..k {
                        for cc in 0..c {
                            if (em >> ((pp * k + kk) * c + cc)) & 1 == 0 {
                                continue;
                            }
                            for q in 0..p {
                                if (dm[cc] >> (pi[kk] * p + q)) & 1 == 1 {
                                    outcome |= 1 << (cc * p + q);
                                }
                            }
                        }
                    }
                    let want = (0..c).fold(0u64, |m, cc| m | 1 << (cc * p + pp));
                    if outcome != want {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                let reach_all =
                    (0..p).all(|pp| (0..c).all(|cc| (0..k).any(|kk| (em >> ((pp * k + kk) * c + cc)) & 1 == 1)));
                out.push(((pi.clone(), dm.clone(), em), reach_all));
            }
            // odometer over the D family
            let Some(i) = (0..c).find(|&i| dm[i] + 1 < 1 << d_bits) else {
                break;
            };
            dm[i] += 1;
            for x in dm.iter_mut().take(i) {
                *x = 0;
            }
        }
    }
    out
}

pub fn naive_set(p: usize, k: usize, c: usize, need_s1: bool) -> BTreeSet<Key> {
    naive_solutions(p, k, c)
        .into_iter()
        .filter(|(_, s1)| !need_s1 || *s1)
        .map(|(key, _)| key)
        .collect()
}

// ---- laws ------------------------------------------------------------

fn c(a: &Rel, b: &Rel) -> Rel {
    a.compose(b).expect("composable")
}

pub fn rel_assoc(a: &Rel, b: &Rel, x: &Rel) -> bool {
    c(&c(a, b), x) == c(a, &c(b, x))
}

pub fn rel_units(a: &Rel) -> bool {
    c(&Rel::identity(a.src()), a) == *a && c(a, &Rel::identity(a.dst())) == *a
}

pub fn converse_laws(a: &Rel, b: &Rel) -> bool {
    c(a, b).converse() == c(&b.converse(), &a.converse()) && a.converse().converse() == *a
}

/// `(a ⊗ b) ; (x ⊗ y) = (a ; x) ⊗ (b ; y)`
pub fn product_interchange(a: &Rel, b: &Rel, x: &Rel, y: &Rel) -> bool {
    c(&a.product(b), &x.product(y)) == c(a, x).product(&c(b, y))
}

/// `sigma` factors through the kernel of `r` exactly when `sigma ; r` is
/// empty, and then the factor composed with the inclusion gives `sigma`.
pub fn kernel_universal(r: &Rel, sigma: &Rel) -> bool {
    let k = r.kernel();
    let incl_ok =
        k.inclusion.predicates().is_function && k.inclusion.predicates().is_injective && c(&k.inclusion, r).is_empty();
    let zero = c(sigma, r).is_empty();
    incl_ok
        && match k.factor(sigma) {
            Some(f) => zero && c(&f, &k.inclusion) == *sigma,
            None => !zero,
        }
}

/// One-sided inverses of endorelations are two-sided.
pub fn endo_inverse(sigma: &Rel, tau: &Rel) -> bool {
    let id = Rel::identity(sigma.src());
    c(tau, sigma) != id || c(sigma, tau) == id
}

pub fn two_endo_inverse(sigma: &TwoCell, tau: &TwoCell) -> bool {
    let id = TwoCell::identity(sigma.domain());
    cells::vcompose(tau, sigma).unwrap() != id || cells::vcompose(sigma, tau).unwrap() == id
}

pub fn vassoc(a: &TwoCell, b: &TwoCell, x: &TwoCell) -> bool {
    let l = cells::vcompose(&cells::vcompose(a, b).unwrap(), x).unwrap();
    let r = cells::vcompose(a, &cells::vcompose(b, x).unwrap()).unwrap();
    l == r
}

pub fn hassoc(a: &TwoCell, b: &TwoCell, x: &TwoCell) -> bool {
    let l = cells::hcompose_two(&cells::hcompose_two(a, b).unwrap(), x).unwrap();
    let r = cells::hcompose_two(a, &cells::hcompose_two(b, x).unwrap()).unwrap();
    l == r
}

pub fn hunits(a: &TwoCell) -> bool {
    let il = TwoCell::identity(&OneCell::identity(a.domain().src()));
    let ir = TwoCell::identity(&OneCell::identity(a.domain().dst()));
    cells::hcompose_two(&il, a).unwrap() == *a && cells::hcompose_two(a, &ir).unwrap() == *a
}

/// `(a ; b) . (x ; y) = (a . x) ; (b . y)`
pub fn interchange(a: &TwoCell, b: &TwoCell, x: &TwoCell, y: &TwoCell) -> bool {
    let l = cells::hcompose_two(&cells::vcompose(a, b).unwrap(), &cells::vcompose(x, y).unwrap()).unwrap();
    let r = cells::vcompose(&cells::hcompose_two(a, x).unwrap(), &cells::hcompose_two(b, y).unwrap()).unwrap();
    l == r
}

pub fn two_converse(a: &TwoCell, b: &TwoCell) -> bool {
    let l = cells::converse(&cells::vcompose(a, b).unwrap());
    let r = cells::vcompose(&cells::converse(b), &cells::converse(a)).unwrap();
    l == r && cells::converse(&cells::converse(a)) == *a
}

// ---- random inputs ---------------------------------------------------

pub fn random_rel(rng: &mut ChaCha8Rng, src: usize, dst: usize) -> Rel {
    Rel::from_fn(&set(src), &set(dst), |_, _| rng.gen_bool(0.5))
}

pub fn random_one_cell(rng: &mut ChaCha8Rng, src: usize, dst: usize, max_fiber: usize) -> OneCell {
    let sizes: Vec<usize> = (0..src * dst).map(|_| rng.gen_range(0..=max_fiber)).collect();
    OneCell::from_sizes(&set(src), &set(dst), &sizes).unwrap()
}

pub fn random_two_cell(rng: &mut ChaCha8Rng, dom: &OneCell, cod: &OneCell) -> TwoCell {
    TwoCell::from_fn(dom, cod, |_, _, _, _| rng.gen_bool(0.5)).unwrap()
}

/// A random bijection on `n` points, as a relation.
pub fn random_bijection(rng: &mut ChaCha8Rng, n: usize) -> Rel {
    let mut map: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        map.swap(i, rng.gen_range(0..=i));
    }
    Rel::graph(&set(n), &set(n), &map).unwrap()
}

/// A pair of endorelations that is often, but not always, a pair of
/// one-sided inverses.
pub fn random_endo_pair(rng: &mut ChaCha8Rng, n: usize) -> (Rel, Rel) {
    match rng.gen_range(0..3) {
        0 => (random_rel(rng, n, n), random_rel(rng, n, n)),
        _ => {
            let sigma = random_bijection(rng, n);
            let mut tau = sigma.converse();
            if rng.gen_bool(0.5) {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if tau.get(a, b) {
                    tau.remove(a, b);
                } else {
                    tau.insert(a, b);
                }
            }
            (sigma, tau)
        }
    }
}
