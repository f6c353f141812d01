//! Exhaustive and sampled synthesis of encrypted-communication
//! implementations at small sizes.
//!
//! Keys pads range over permutation cups, decryption over every family
//! of relations `K -> P` indexed by ciphertexts, and encryption over
//! every relation `P×K -> C`. The space is sharded by the first row of
//! `E` and merged in a fixed order, so results never depend on thread
//! scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cells::{self, hcompose_one, OneCell, TwoCell};
use crate::protocols::otp::{self, ProtocolInstance, Security};
use crate::relcore::{FiniteSet, Permutation, Rel};
use crate::structures::{self, controlled_between, ControlledOp, DualityPair, Side};

pub const DEFAULT_BUDGET: u128 = 1 << 30;
pub const BUDGET_ENV: &str = "RELCAT_BUDGET";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("search space needs an estimated {estimated} composite checks, over the budget of {budget}")]
    Budget { estimated: u128, budget: u128 },
    #[error("sizes must be at least 1, got {0:?}")]
    Sizes((usize, usize, usize)),
    #[error("unknown constraint `{0}` (expected correctness, S1, S2, S3 or S4)")]
    Constraint(String),
    #[error("could not build a thread pool: {0}")]
    Threads(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Constraint {
    #[serde(rename = "correctness")]
    Correctness,
    S1,
    S2,
    S3,
    S4,
}

impl Constraint {
    pub fn name(self) -> &'static str {
        match self {
            Constraint::Correctness => "correctness",
            Constraint::S1 => "S1",
            Constraint::S2 => "S2",
            Constraint::S3 => "S3",
            Constraint::S4 => "S4",
        }
    }

    fn security(self) -> Option<Security> {
        match self {
            Constraint::Correctness => None,
            Constraint::S1 => Some(Security::S1),
            Constraint::S2 => Some(Security::S2),
            Constraint::S3 => Some(Security::S3),
            Constraint::S4 => Some(Security::S4),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constraint {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "correctness" | "correct" => Ok(Constraint::Correctness),
            "S1" | "s1" => Ok(Constraint::S1),
            "S2" | "s2" => Ok(Constraint::S2),
            "S3" | "s3" => Ok(Constraint::S3),
            "S4" | "s4" => Ok(Constraint::S4),
            other => Err(SearchError::Constraint(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    pub sizes: (usize, usize, usize),
    pub constraints: Vec<Constraint>,
    pub dedup: bool,
}

impl SearchSpec {
    pub fn new(p: usize, k: usize, c: usize, constraints: &[Constraint]) -> SearchSpec {
        let mut constraints = constraints.to_vec();
        constraints.sort();
        constraints.dedup();
        SearchSpec {
            sizes: (p, k, c),
            constraints,
            dedup: false,
        }
    }

    pub fn with_dedup(mut self, dedup: bool) -> SearchSpec {
        self.dedup = dedup;
        self
    }

    /// Number of (η, D, E) triples, or `None` if it overflows.
    pub fn candidates(&self) -> Option<u128> {
        let (p, k, c) = self.sizes;
        let perms: u128 = (1..=k as u128).product();
        let d_bits = (k * p * c) as u32;
        let e_bits = (p * k * c) as u32;
        let d = 1u128.checked_shl(d_bits).filter(|_| d_bits < 128)?;
        let e = 1u128.checked_shl(e_bits).filter(|_| e_bits < 128)?;
        perms.checked_mul(d)?.checked_mul(e)
    }

    /// Candidates times composite checks per candidate.
    pub fn estimated_cost(&self) -> Option<u128> {
        self.candidates()?.checked_mul(self.constraints.len().max(1) as u128)
    }

    fn validate(&self, budget: u128) -> Result<(), SearchError> {
        let (p, k, c) = self.sizes;
        if p == 0 || k == 0 || c == 0 {
            return Err(SearchError::Sizes(self.sizes));
        }
        match self.estimated_cost() {
            Some(cost) if cost <= budget => Ok(()),
            cost => Err(SearchError::Budget {
                estimated: cost.unwrap_or(u128::MAX),
                budget,
            }),
        }
    }
}

/// The budget from `RELCAT_BUDGET`, if set and valid, else the default.
pub fn budget_from_env() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// One candidate implementation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub pi: Permutation,
    /// Decryption under each ciphertext, `K -> P`.
    pub d: Vec<Rel>,
    /// `P×K -> C`
    pub e: Rel,
}

impl Triple {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.d[0].dst().size(), self.pi.len(), self.e.dst().size())
    }

    pub fn instance(&self) -> ProtocolInstance {
        let (p, k, c) = (self.e.src().size() / self.pi.len(), self.pi.len(), self.e.dst().size());
        ProtocolInstance::from_parts(p, k, c, self.e.clone(), self.d.clone(), &self.pi).expect("well-shaped triple")
    }

    pub fn cup(&self) -> Rel {
        structures::cup_from_permutation(&self.pi).cup
    }

    /// E bits (rows by ciphertext), then each D fiber, then the cup row.
    pub fn bits(&self) -> Vec<bool> {
        let mut out = self.e.bit_vec();
        for r in &self.d {
            out.extend(r.bit_vec());
        }
        out.extend(self.cup().bit_vec());
        out
    }

    /// Relabels plaintexts by `sp`, keys by `sk` and ciphertexts by `sc`.
    pub fn relabel(&self, sp: &Permutation, sk: &Permutation, sc: &Permutation) -> Triple {
        let (k, c) = (self.pi.len(), self.e.dst().size());
        let mut e = Rel::empty(self.e.src(), self.e.dst());
        for (x, cc) in self.e.pairs() {
            let (p, kk) = (x / k, x % k);
            e.insert(sp.apply(p) * k + sk.apply(kk), sc.apply(cc));
        }
        let mut d = vec![Rel::empty(self.d[0].src(), self.d[0].dst()); c];
        for (cc, r) in self.d.iter().enumerate() {
            for (j, p) in r.pairs() {
                d[sc.apply(cc)].insert(sk.apply(j), sp.apply(p));
            }
        }
        let pi = sk.inverse().then(&self.pi).then(sk);
        Triple { pi, d, e }
    }

    /// Lexicographically least relabeling.
    pub fn canonical(&self) -> Triple {
        let (p, k, c) = (self.e.src().size() / self.pi.len(), self.pi.len(), self.e.dst().size());
        let (ps, ks, cs) = (Permutation::all(p), Permutation::all(k), Permutation::all(c));
        let mut best: Option<(Vec<bool>, Triple)> = None;
        for sp in &ps {
            for sk in &ks {
                for sc in &cs {
                    let t = self.relabel(sp, sk, sc);
                    let b = t.bits();
                    if best.as_ref().is_none_or(|(bb, _)| b < *bb) {
                        best = Some((b, t));
                    }
                }
            }
        }
        best.expect("nonempty relabeling group").1
    }
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionRecord {
    pub pi: Vec<usize>,
    /// Cup row over encoded key pairs.
    pub eta: Vec<u8>,
    /// One row per ciphertext, one column per encoded (plaintext, key).
    pub e: Vec<Vec<u8>>,
    /// Per ciphertext: one row per plaintext, one column per key.
    pub d: Vec<Vec<Vec<u8>>>,
    pub verdicts: BTreeMap<String, bool>,
    pub canonical: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_size: Option<usize>,
    #[serde(skip)]
    pub triple: Triple,
}

impl SolutionRecord {
    fn new(triple: Triple, verdicts: BTreeMap<String, bool>) -> SolutionRecord {
        SolutionRecord {
            pi: triple.pi.as_slice().to_vec(),
            eta: triple.cup().to_matrix().into_iter().map(|r| r[0]).collect(),
            e: triple.e.to_matrix(),
            d: triple.d.iter().map(Rel::to_matrix).collect(),
            canonical: bit_string(&triple.canonical().bits()),
            verdicts,
            orbit_size: None,
            triple,
        }
    }
}

/// Cells shared by every candidate of a given size.
struct Frame {
    p: FiniteSet,
    k: FiniteSet,
    c: FiniteSet,
    wk: OneCell,
    wp: OneCell,
    pk: OneCell,
    region: OneCell,
    id_k: TwoCell,
    rhs: TwoCell,
}

impl Frame {
    fn new(p: usize, k: usize, c: usize) -> Frame {
        let (p, k, c) = (FiniteSet::new(p), FiniteSet::new(k), FiniteSet::new(c));
        let wp = OneCell::scalar(&p);
        let wk = OneCell::scalar(&k);
        let rs = structures::region_structure(&c);
        let rhs = cells::hcompose_two(&rs.create_region, &TwoCell::identity(&wp)).expect("composable");
        Frame {
            pk: hcompose_one(&wp, &wk).expect("scalars compose"),
            region: rs.region(),
            id_k: TwoCell::identity(&wk),
            p,
            k,
            c,
            wk,
            wp,
            rhs,
        }
    }

    /// `E . id_K`
    fn e_part(&self, e: &Rel) -> TwoCell {
        let cell = TwoCell::scalar_between(&self.pk, &self.region, e).expect("E fits");
        cells::hcompose_two(&cell, &self.id_k).expect("composable")
    }

    /// `id_P . η`
    fn eta_part(&self, pair: &DualityPair) -> TwoCell {
        let eta = pair.cup_cell(&self.wk).expect("cup fits");
        cells::hcompose_two(&TwoCell::identity(&self.wp), &eta).expect("composable")
    }

    /// `id_L . D`
    fn d_part(&self, family: &[Rel]) -> TwoCell {
        let op = ControlledOp::new(&self.c, &self.k, &self.p, family.to_vec(), Side::Left).expect("family fits");
        let d = controlled_between(&op, &self.wk, &self.wp).expect("controlled");
        let rs = structures::region_structure(&self.c);
        cells::hcompose_two(&TwoCell::identity(&rs.boundary_left), &d).expect("composable")
    }
}

fn d_families(k: &FiniteSet, p: &FiniteSet, c: usize) -> Vec<Vec<Rel>> {
    let fibers: Vec<Rel> = Rel::all(k, p).collect();
    let mut out = vec![vec![]];
    for _ in 0..c {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Rel>| {
                fibers.iter().map(move |f| {
                    let mut v = prefix.clone();
                    v.push(f.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, SearchError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n.max(1));
    }
    b.build().map_err(|e| SearchError::Threads(e.to_string()))
}

/// Enumerates every candidate, keeping those meeting all constraints.
///
/// `cups` lists the key pads to try; `None` means every permutation cup.
pub fn enumerate_with(
    spec: &SearchSpec,
    budget: u128,
    threads: Option<usize>,
    cups: Option<Vec<DualityPair>>,
) -> Result<Vec<SolutionRecord>, SearchError> {
    spec.validate(budget)?;
    let (p, k, c) = spec.sizes;
    let frame = Frame::new(p, k, c);
    let pads: Vec<DualityPair> = cups.unwrap_or_else(|| {
        Permutation::all(k)
            .iter()
            .map(structures::cup_from_permutation)
            .collect()
    });
    let pads: Vec<(DualityPair, Permutation, TwoCell)> = pads
        .into_iter()
        .map(|pair| {
            let pi = pair
                .permutation()
                .expect("snake-satisfying cups are permutation graphs");
            let part = frame.eta_part(&pair);
            (pair, pi, part)
        })
        .collect();
    let families = d_families(&frame.k, &frame.p, c);
    let want_correct = spec.constraints.contains(&Constraint::Correctness);
    let wants = |x: Constraint| spec.constraints.contains(&x);
    let d_parts: Vec<(TwoCell, Option<bool>)> = families
        .iter()
        .map(|fam| {
            let s4 = wants(Constraint::S4).then(|| {
                let t = Triple {
                    pi: Permutation::identity(k),
                    d: fam.clone(),
                    e: Rel::empty(&frame.p.product(&frame.k), &frame.c),
                };
                otp::check_security(&t.instance(), Security::S4).holds
            });
            (frame.d_part(fam), s4)
        })
        .collect();

    let pk_set = frame.p.product(&frame.k);
    let row_bits = p * k;
    let rest_bits = row_bits * (c - 1);
    let pool = pool(threads)?;
    let shards: Vec<Vec<SolutionRecord>> = pool.install(|| {
        (0u64..1 << row_bits)
            .into_par_iter()
            .map(|first| {
                let mut found = Vec::new();
                for rest in 0u64..1 << rest_bits {
                    let e = Rel::from_fn(&pk_set, &frame.c, |x, cc| {
                        if cc == 0 {
                            (first >> x) & 1 == 1
                        } else {
                            (rest >> ((cc - 1) * row_bits + x)) & 1 == 1
                        }
                    });
                    let e_part = want_correct.then(|| frame.e_part(&e));
                    let mut e_only: BTreeMap<&str, bool> = BTreeMap::new();
                    for x in [Constraint::S2, Constraint::S3] {
                        if wants(x) {
                            let t = Triple {
                                pi: pads[0].1.clone(),
                                d: families[0].clone(),
                                e: e.clone(),
                            };
                            e_only.insert(
                                x.name(),
                                otp::check_security(&t.instance(), x.security().unwrap()).holds,
                            );
                        }
                    }
                    if e_only.values().any(|&b| !b) {
                        continue;
                    }
                    for (_, pi, eta_part) in &pads {
                        let s1 = wants(Constraint::S1).then(|| {
                            let t = Triple {
                                pi: pi.clone(),
                                d: families[0].clone(),
                                e: e.clone(),
                            };
                            otp::check_security(&t.instance(), Security::S1).holds
                        });
                        if s1 == Some(false) {
                            continue;
                        }
                        let front = e_part
                            .as_ref()
                            .map(|ep| cells::vcompose(eta_part, ep).expect("composable"));
                        for (fam, (d_part, s4)) in families.iter().zip(&d_parts) {
                            if *s4 == Some(false) {
                                continue;
                            }
                            if let Some(front) = &front {
                                let lhs = cells::vcompose(front, d_part).expect("composable");
                                if cells::equal(&lhs, &frame.rhs).is_err() {
                                    continue;
                                }
                            }
                            let mut verdicts: BTreeMap<String, bool> =
                                spec.constraints.iter().map(|x| (x.name().to_string(), true)).collect();
                            verdicts.extend(e_only.iter().map(|(n, b)| (n.to_string(), *b)));
                            found.push(SolutionRecord::new(
                                Triple {
                                    pi: pi.clone(),
                                    d: fam.clone(),
                                    e: e.clone(),
                                },
                                verdicts,
                            ));
                        }
                    }
                }
                found
            })
            .collect()
    });
    let mut all: Vec<SolutionRecord> = shards.into_iter().flatten().collect();
    all.sort_by_cached_key(|r| r.triple.bits());
    if spec.dedup {
        all = dedup(all);
    }
    Ok(all)
}

pub fn enumerate(spec: &SearchSpec, budget: u128, threads: Option<usize>) -> Result<Vec<SolutionRecord>, SearchError> {
    enumerate_with(spec, budget, threads, None)
}

/// Every cup on `K` that completes to a duality, found by brute force
/// over all relations `1 -> K×K` rather than via the classification.
pub fn snake_filtered_cups(k: usize) -> Vec<DualityPair> {
    let ks = FiniteSet::new(k);
    let pairs = ks.product(&ks);
    let unit = FiniteSet::unit();
    let mut out: Vec<DualityPair> = Vec::new();
    for cup in Rel::all(&unit, &pairs) {
        for cap in Rel::all(&pairs, &unit) {
            let pair = DualityPair {
                carrier: ks.clone(),
                cup: cup.clone(),
                cap,
            };
            if pair.snake_check() {
                out.push(pair);
                break;
            }
        }
    }
    out
}

/// Quotients by relabeling, keeping each orbit's least member.
pub fn dedup(records: Vec<SolutionRecord>) -> Vec<SolutionRecord> {
    let mut orbits: BTreeMap<String, (usize, Option<SolutionRecord>)> = BTreeMap::new();
    for r in records {
        let entry = orbits.entry(r.canonical.clone()).or_insert((0, None));
        entry.0 += 1;
        if bit_string(&r.triple.bits()) == r.canonical {
            entry.1 = Some(r);
        }
    }
    orbits
        .into_values()
        .filter_map(|(n, rep)| {
            rep.map(|mut r| {
                r.orbit_size = Some(n);
                r
            })
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TheoremTally {
    pub checked: usize,
    pub counterexamples: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<String>,
}

impl TheoremTally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.counterexamples += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }

    fn merge(&mut self, other: TheoremTally) {
        self.checked += other.checked;
        self.counterexamples += other.counterexamples;
        for e in other.examples {
            if self.examples.len() < 5 {
                self.examples.push(e);
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub sizes: (usize, usize, usize),
    pub candidates: u128,
    pub correct: usize,
    pub correct_with_s1: usize,
    /// Whether the endomorphism-based theorems apply (|P| = |K|).
    pub applicable: bool,
    pub d_bijective: TheoremTally,
    pub d_inverse: TheoremTally,
    pub e_reconstruction: TheoremTally,
    pub e_noninvertible: TheoremTally,
    pub s1_implies_rest: TheoremTally,
    /// Correct solutions failing S1, with how many satisfy S2, S3, S4.
    pub s1_violating: usize,
    pub s1_violating_status: BTreeMap<String, usize>,
}

impl TheoremReport {
    pub fn counterexamples(&self) -> usize {
        [
            &self.d_bijective,
            &self.d_inverse,
            &self.e_reconstruction,
            &self.e_noninvertible,
            &self.s1_implies_rest,
        ]
        .iter()
        .map(|t| t.counterexamples)
        .sum()
    }

    fn absorb(&mut self, triple: &Triple) {
        let inst = triple.instance();
        self.correct += 1;
        let label = || format!("pi={:?} e={:?} d={:?}", triple.pi.as_slice(), triple.e, triple.d);
        let square = inst.plaintext_matches_key();
        if square {
            let bij = inst.d.family.iter().all(|r| r.predicates().is_bijection);
            self.d_bijective.record(bij, label);
            match otp::derive_d_inverse(&inst) {
                Ok((_, v)) => self.d_inverse.record(v.holds, label),
                Err(_) => self.d_inverse.record(false, label),
            }
            let rec = otp::reconstruct_e(&inst).map(|v| v.holds).unwrap_or(false);
            self.e_reconstruction.record(rec, label);
        }
        self.e_noninvertible
            .record(otp::check_e_noninvertible(&inst).holds, label);
        let imp = otp::check_implications(&inst);
        if imp.s1.holds {
            self.correct_with_s1 += 1;
            if square {
                self.s1_implies_rest.record(imp.implication.holds, label);
            }
        } else {
            self.s1_violating += 1;
            for v in [&imp.s2, &imp.s3, &imp.s4] {
                if v.holds {
                    *self.s1_violating_status.entry(v.name.clone()).or_default() += 1;
                }
            }
        }
    }

    fn merge(&mut self, other: TheoremReport) {
        self.correct += other.correct;
        self.correct_with_s1 += other.correct_with_s1;
        self.d_bijective.merge(other.d_bijective);
        self.d_inverse.merge(other.d_inverse);
        self.e_reconstruction.merge(other.e_reconstruction);
        self.e_noninvertible.merge(other.e_noninvertible);
        self.s1_implies_rest.merge(other.s1_implies_rest);
        self.s1_violating += other.s1_violating;
        for (k, n) in other.s1_violating_status {
            *self.s1_violating_status.entry(k).or_default() += n;
        }
    }
}

/// Runs every theorem check over all correct implementations.
pub fn verify_theorems(
    sizes: (usize, usize, usize),
    budget: u128,
    threads: Option<usize>,
) -> Result<TheoremReport, SearchError> {
    let spec = SearchSpec::new(sizes.0, sizes.1, sizes.2, &[Constraint::Correctness]);
    let solutions = enumerate(&spec, budget, threads)?;
    let mut report = TheoremReport {
        sizes,
        candidates: spec.candidates().unwrap_or(u128::MAX),
        applicable: sizes.0 == sizes.1,
        ..TheoremReport::default()
    };
    for s in &solutions {
        report.absorb(&s.triple);
    }
    Ok(report)
}

fn random_rel(rng: &mut ChaCha8Rng, src: &FiniteSet, dst: &FiniteSet) -> Rel {
    Rel::from_fn(src, dst, |_, _| rng.gen_bool(0.5))
}

fn random_function(rng: &mut ChaCha8Rng, src: &FiniteSet, dst: &FiniteSet) -> Rel {
    let map: Vec<usize> = (0..src.size()).map(|_| rng.gen_range(0..dst.size())).collect();
    Rel::graph(src, dst, &map).expect("in range")
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    Permutation::new(map).expect("shuffle is a bijection")
}

/// Draws one candidate: uniform relations, random functions, or a
/// relabeled group table with matching decryption (sometimes perturbed).
fn sample_triple(rng: &mut ChaCha8Rng, p: usize, k: usize, c: usize) -> Triple {
    let (ps, ks, cs) = (FiniteSet::new(p), FiniteSet::new(k), FiniteSet::new(c));
    let pk = ps.product(&ks);
    let pi = random_permutation(rng, k);
    match rng.gen_range(0..3) {
        0 => Triple {
            pi,
            d: (0..c).map(|_| random_rel(rng, &ks, &ps)).collect(),
            e: random_rel(rng, &pk, &cs),
        },
        1 => Triple {
            pi,
            d: (0..c).map(|_| random_function(rng, &ks, &ps)).collect(),
            e: random_function(rng, &pk, &cs),
        },
        _ => {
            let n = p.max(k).max(c);
            let (a, b, r) = (
                random_permutation(rng, n),
                random_permutation(rng, n),
                random_permutation(rng, n),
            );
            let table = |pp: usize, kk: usize| r.apply((a.apply(pp) + b.apply(kk)) % n);
            let mut e = Rel::empty(&pk, &cs);
            for pp in 0..p {
                for kk in 0..k {
                    let cc = table(pp, kk);
                    if cc < c {
                        e.insert(pp * k + kk, cc);
                    }
                }
            }
            let mut d: Vec<Rel> = (0..c).map(|_| Rel::empty(&ks, &ps)).collect();
            for pp in 0..p {
                for kk in 0..k {
                    let cc = table(pp, kk);
                    if cc < c {
                        d[cc].insert(pi.apply(kk), pp);
                    }
                }
            }
            if rng.gen_bool(0.25) {
                let cc = rng.gen_range(0..c);
                let (j, pp) = (rng.gen_range(0..k), rng.gen_range(0..p));
                if d[cc].get(j, pp) {
                    d[cc].remove(j, pp);
                } else {
                    d[cc].insert(j, pp);
                }
            }
            Triple { pi, d, e }
        }
    }
}

const SAMPLE_CHUNK: usize = 1024;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub seed: u64,
    pub sampled: usize,
    pub theorems: TheoremReport,
}

/// Theorem checks over random candidates, for sizes too large to enumerate.
/// Chunks draw from independently seeded generators, so the outcome
/// depends only on `seed` and `samples`.
pub fn sample_theorems(
    sizes: (usize, usize, usize),
    samples: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<SampleReport, SearchError> {
    let (p, k, c) = sizes;
    if p == 0 || k == 0 || c == 0 {
        return Err(SearchError::Sizes(sizes));
    }
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let pool = pool(threads)?;
    let parts: Vec<TheoremReport> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let n = SAMPLE_CHUNK.min(samples - i * SAMPLE_CHUNK);
                let mut rep = TheoremReport::default();
                for _ in 0..n {
                    let t = sample_triple(&mut rng, p, k, c);
                    if otp::check_correctness(&t.instance()).holds {
                        rep.absorb(&t);
                    }
                }
                rep
            })
            .collect()
    });
    let mut theorems = TheoremReport {
        sizes,
        candidates: samples as u128,
        applicable: p == k,
        ..TheoremReport::default()
    };
    for part in parts {
        theorems.merge(part);
    }
    Ok(SampleReport {
        seed,
        sampled: samples,
        theorems,
    })
}
