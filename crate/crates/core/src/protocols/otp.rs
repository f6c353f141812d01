//! Encrypted communication with a one-time pad.
//!
//! `E : P . K => [C]` publishes a ciphertext, `D : R_C . K => R_C . P`
//! decrypts under the public ciphertext, and the cup `eta : id => K . K`
//! creates the shared key, left leg to Alice, right leg to Bob.

use serde::Serialize;

use super::{h, v, EquationVerdict, ProtocolError, Witness};
use crate::cells::{hcompose_one, OneCell, TwoCell};
use crate::relcore::{FiniteSet, Permutation, Rel};
use crate::structures::{
    self, canonical_cup, controlled_between, controlled_rewrite, ControlledOp, DualityPair, RegionStructure, Side,
};

#[derive(Clone, Debug)]
pub struct ProtocolInstance {
    pub p: FiniteSet,
    pub k: FiniteSet,
    pub c: FiniteSet,
    /// `P×K -> C`, pairs encoded `p * |K| + k`.
    pub e: Rel,
    pub d: ControlledOp,
    pub eta: DualityPair,
}

/// The 1-cells and generator 2-cells every equation is assembled from.
pub(crate) struct Kit {
    pub wp: OneCell,
    pub wk: OneCell,
    pub region: RegionStructure,
    pub id_p: TwoCell,
    pub id_k: TwoCell,
    pub id_l: TwoCell,
    pub id_r: TwoCell,
    pub e: TwoCell,
    pub d: TwoCell,
    pub eta: TwoCell,
    pub eps: TwoCell,
}

fn scalar_cell(r: &Rel, dom: &OneCell, cod: &OneCell) -> Result<TwoCell, ProtocolError> {
    Ok(TwoCell::scalar_between(dom, cod, r)?)
}

impl Kit {
    /// `id_1 => W`, the random creation of a value.
    pub fn create(&self, w: &OneCell) -> Result<TwoCell, ProtocolError> {
        let unit = FiniteSet::unit();
        scalar_cell(&structures::create(&w.fiber(0, 0)), &OneCell::identity(&unit), w)
    }

    /// `W => id_1`
    pub fn delete(&self, w: &OneCell) -> Result<TwoCell, ProtocolError> {
        let unit = FiniteSet::unit();
        scalar_cell(&structures::delete(&w.fiber(0, 0)), w, &OneCell::identity(&unit))
    }
}

impl ProtocolInstance {
    pub fn new(
        p: FiniteSet,
        k: FiniteSet,
        c: FiniteSet,
        e: Rel,
        d: ControlledOp,
        eta: DualityPair,
    ) -> Result<ProtocolInstance, ProtocolError> {
        if e.src().size() != p.size() * k.size() || e.dst().size() != c.size() {
            return Err(ProtocolError::Invalid(format!(
                "E must be a relation {} -> {}, got {} -> {}",
                p.size() * k.size(),
                c.size(),
                e.src().size(),
                e.dst().size()
            )));
        }
        if d.public_carrier.size() != c.size()
            || d.in_private.size() != k.size()
            || d.out_private.size() != p.size()
            || d.side != Side::Left
        {
            return Err(ProtocolError::Invalid(
                "D must be controlled by C on its left, mapping K to P".into(),
            ));
        }
        if eta.carrier.size() != k.size() || !eta.snake_check() {
            return Err(ProtocolError::Invalid("eta must be a duality on K".into()));
        }
        Ok(ProtocolInstance { p, k, c, e, d, eta })
    }

    /// Builds an instance from plain data: `d_family[c]` relates keys to plaintexts.
    pub fn from_parts(
        p: usize,
        k: usize,
        c: usize,
        e: Rel,
        d_family: Vec<Rel>,
        pi: &Permutation,
    ) -> Result<ProtocolInstance, ProtocolError> {
        let (ps, ks, cs) = (FiniteSet::new(p), FiniteSet::new(k), FiniteSet::new(c));
        let d = ControlledOp::new(&cs, &ks, &ps, d_family, Side::Left)?;
        ProtocolInstance::new(ps, ks, cs, e, d, structures::cup_from_permutation(pi))
    }

    pub fn plaintext_matches_key(&self) -> bool {
        self.p.size() == self.k.size()
    }

    pub(crate) fn kit(&self) -> Result<Kit, ProtocolError> {
        let wp = OneCell::scalar(&self.p);
        let wk = OneCell::scalar(&self.k);
        let region = structures::region_structure(&self.c);
        let pk = hcompose_one(&wp, &wk)?;
        let e = scalar_cell(&self.e, &pk, &region.region())?;
        let d = controlled_between(&self.d, &wk, &wp)?;
        let eta = self.eta.cup_cell(&wk)?;
        let eps = self.eta.cap_cell(&wk)?;
        Ok(Kit {
            id_p: TwoCell::identity(&wp),
            id_k: TwoCell::identity(&wk),
            id_l: TwoCell::identity(&region.boundary_left),
            id_r: TwoCell::identity(&region.boundary_right),
            wp,
            wk,
            region,
            e,
            d,
            eta,
            eps,
        })
    }
}

/// The single-bit instance: `E` is addition in Z₂, `D` is (identity, flip).
pub fn single_bit_instance() -> ProtocolInstance {
    let two = FiniteSet::new(2);
    let four = FiniteSet::new(4);
    let e = Rel::from_matrix(&four, &two, &[vec![1, 0, 0, 1], vec![0, 1, 1, 0]]).expect("2x4 matrix");
    let id = Rel::from_matrix(&two, &two, &[vec![1, 0], vec![0, 1]]).expect("2x2 matrix");
    let flip = Rel::from_matrix(&two, &two, &[vec![0, 1], vec![1, 0]]).expect("2x2 matrix");
    let d = ControlledOp::new(&two, &two, &two, vec![id, flip], Side::Left).expect("two members");
    ProtocolInstance::new(two.clone(), two.clone(), two.clone(), e, d, canonical_cup(&two)).expect("valid")
}

/// `P = K = C = Z_n` with `E(p, k) = p + k` and `D_c(k) = c - k`.
pub fn group_instance(n: usize) -> Result<ProtocolInstance, ProtocolError> {
    if n < 1 {
        return Err(ProtocolError::Invalid("group order must be at least 1".into()));
    }
    let z = FiniteSet::new(n);
    let e = Rel::graph(
        &z.product(&z),
        &z,
        &(0..n * n).map(|x| (x / n + x % n) % n).collect::<Vec<_>>(),
    )?;
    let family = (0..n)
        .map(|c| Rel::graph(&z, &z, &(0..n).map(|k| (c + n - k) % n).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let d = ControlledOp::new(&z, &z, &z, family, Side::Left)?;
    ProtocolInstance::new(z.clone(), z.clone(), z.clone(), e, d, canonical_cup(&z))
}

/// Decryption recovers the plaintext, in the simplified form where the
/// ciphertext region stays put.
pub fn check_correctness(inst: &ProtocolInstance) -> EquationVerdict {
    let name = "correctness";
    let kit = match inst.kit() {
        Ok(k) => k,
        Err(e) => return EquationVerdict::fail(name, Witness::note(e.to_string())),
    };
    EquationVerdict::compare(name, correctness_lhs(&kit, &kit.d), correctness_rhs(&kit))
}

fn correctness_lhs(kit: &Kit, d: &TwoCell) -> Result<TwoCell, ProtocolError> {
    v(&[
        h(&[&kit.id_p, &kit.eta])?,
        h(&[&kit.e, &kit.id_k])?,
        h(&[&kit.id_l, d])?,
    ])
}

fn correctness_rhs(kit: &Kit) -> Result<TwoCell, ProtocolError> {
    h(&[&kit.region.create_region, &kit.id_p])
}

/// Correctness with Bob's step written out: he copies the ciphertext
/// region, decrypts under the copy, then discards it; the plaintext
/// crosses the created region on the right-hand side.
pub fn check_correctness_expanded(inst: &ProtocolInstance) -> EquationVerdict {
    let name = "correctness-expanded";
    let build = || -> Result<(TwoCell, TwoCell), ProtocolError> {
        let kit = inst.kit()?;
        let bob = controlled_rewrite(&inst.d, &kit.d)?;
        let lhs = correctness_lhs(&kit, &bob)?;
        let swap = crate::cells::swap(&kit.wp, &kit.region.region())?;
        let rhs = v(&[h(&[&kit.id_p, &kit.region.create_region])?, swap])?;
        Ok((lhs, rhs))
    };
    match build() {
        Ok((l, r)) => EquationVerdict::compare(name, Ok(l), Ok(r)),
        Err(e) => EquationVerdict::fail(name, Witness::note(e.to_string())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Security {
    /// Encrypting under one key copy and deleting the other gives random ciphertext.
    S1,
    /// Encrypting with a random key gives random ciphertext.
    S2,
    /// Encrypting a random message under a given key gives random ciphertext.
    S3,
    /// Decrypting under a random key can produce every message.
    S4,
}

impl Security {
    pub const ALL: [Security; 4] = [Security::S1, Security::S2, Security::S3, Security::S4];

    pub fn name(self) -> &'static str {
        match self {
            Security::S1 => "S1",
            Security::S2 => "S2",
            Security::S3 => "S3",
            Security::S4 => "S4",
        }
    }
}

pub fn check_security(inst: &ProtocolInstance, which: Security) -> EquationVerdict {
    let name = which.name();
    let kit = match inst.kit() {
        Ok(k) => k,
        Err(e) => return EquationVerdict::fail(name, Witness::note(e.to_string())),
    };
    let sides = || -> Result<(TwoCell, TwoCell), ProtocolError> {
        let create_region = &kit.region.create_region;
        Ok(match which {
            Security::S1 => (
                v(&[h(&[&kit.id_p, &kit.eta])?, h(&[&kit.e, &kit.delete(&kit.wk)?])?])?,
                h(&[&kit.delete(&kit.wp)?, create_region])?,
            ),
            Security::S2 => (
                v(&[h(&[&kit.id_p, &kit.create(&kit.wk)?])?, kit.e.clone()])?,
                h(&[&kit.delete(&kit.wp)?, create_region])?,
            ),
            Security::S3 => (
                v(&[h(&[&kit.create(&kit.wp)?, &kit.id_k])?, kit.e.clone()])?,
                h(&[&kit.delete(&kit.wk)?, create_region])?,
            ),
            Security::S4 => (
                v(&[h(&[&kit.id_r, &kit.create(&kit.wk)?])?, kit.d.clone()])?,
                h(&[&kit.id_r, &kit.create(&kit.wp)?])?,
            ),
        })
    };
    match sides() {
        Ok((l, r)) => EquationVerdict::compare(name, Ok(l), Ok(r)),
        Err(e) => EquationVerdict::fail(name, Witness::note(e.to_string())),
    }
}

const NOT_SQUARE: &str = "not applicable: the theorem treats D as an endomorphism, which needs |P| = |K|";

/// `D⁻¹ : R_C . P => R_C . K`, built from `E` with two legs bent round.
pub fn d_inverse_cell(inst: &ProtocolInstance) -> Result<TwoCell, ProtocolError> {
    let kit = inst.kit()?;
    v(&[
        h(&[&kit.id_r, &kit.id_p, &kit.eta])?,
        h(&[&kit.id_r, &kit.e, &kit.id_k])?,
        h(&[&kit.region.compare, &kit.id_r, &kit.id_k])?,
    ])
}

/// Constructs `D⁻¹` and checks it is a two-sided inverse with bijective fibers.
pub fn derive_d_inverse(inst: &ProtocolInstance) -> Result<(TwoCell, EquationVerdict), ProtocolError> {
    let name = "d-inverse";
    if !check_correctness(inst).holds {
        return Err(ProtocolError::Precondition("correctness does not hold".into()));
    }
    let dinv = d_inverse_cell(inst)?;
    if !inst.plaintext_matches_key() {
        return Ok((dinv, EquationVerdict::pass(name).with_note(NOT_SQUARE)));
    }
    let kit = inst.kit()?;
    if let Some(c) = inst.d.family.iter().position(|r| !r.predicates().is_bijection) {
        let w = Witness::note(format!("decryption under ciphertext {c} is not a bijection"));
        return Ok((dinv, EquationVerdict::fail(name, w)));
    }
    let right = EquationVerdict::compare(
        name,
        v(&[kit.d.clone(), dinv.clone()]),
        Ok(TwoCell::identity(kit.d.domain())),
    );
    if !right.holds {
        return Ok((dinv, right));
    }
    let left = EquationVerdict::compare(
        name,
        v(&[dinv.clone(), kit.d.clone()]),
        Ok(TwoCell::identity(kit.d.codomain())),
    );
    Ok((dinv, left))
}

/// Searches for a two-sided relational inverse of `E`.
///
/// Each row of a candidate inverse is constrained independently by
/// `G ; E = id`, so rows are drawn only from the subsets that satisfy
/// it; the remaining condition is checked on every combination.
pub fn e_inverse(inst: &ProtocolInstance) -> Option<Rel> {
    let e = &inst.e;
    let (nx, nc) = (e.src().size(), e.dst().size());
    let images: Vec<u64> = (0..nx).map(|x| e.image(x).fold(0u64, |m, c| m | 1 << c)).collect();
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(nc);
    for c in 0..nc {
        let allowed: Vec<usize> = (0..nx).filter(|&x| images[x] & !(1 << c) == 0).collect();
        let mut cands = Vec::new();
        for sub in 0u64..1 << allowed.len() {
            let set = allowed
                .iter()
                .enumerate()
                .filter(|(i, _)| (sub >> i) & 1 == 1)
                .fold(0u64, |m, (_, &x)| m | 1 << x);
            let reach = (0..nx)
                .filter(|&x| (set >> x) & 1 == 1)
                .fold(0u64, |m, x| m | images[x]);
            if reach == 1 << c {
                cands.push(set);
            }
        }
        if cands.is_empty() {
            return None;
        }
        rows.push(cands);
    }
    let mut idx = vec![0usize; nc];
    loop {
        // E ; G = id: each x reaches exactly itself
        let ok = (0..nx).all(|x| {
            let reach = (0..nc)
                .filter(|&c| (images[x] >> c) & 1 == 1)
                .fold(0u64, |m, c| m | rows[c][idx[c]]);
            reach == 1 << x
        });
        if ok {
            return Some(Rel::from_fn(e.dst(), e.src(), |c, x| (rows[c][idx[c]] >> x) & 1 == 1));
        }
        let c = (0..nc).find(|&c| idx[c] + 1 < rows[c].len())?;
        idx[c] += 1;
        for i in idx.iter_mut().take(c) {
            *i = 0;
        }
    }
}

/// Holds when the message space is trivial or `E` has no relational inverse.
pub fn check_e_noninvertible(inst: &ProtocolInstance) -> EquationVerdict {
    let name = "e-noninvertible";
    let inverse = e_inverse(inst);
    if inst.p.size() <= 1 {
        let state = if inverse.is_some() {
            "invertible"
        } else {
            "not invertible"
        };
        return EquationVerdict::pass(name).with_note(format!("trivial message space; E is {state}"));
    }
    match inverse {
        None => EquationVerdict::pass(name),
        Some(g) => EquationVerdict::fail(name, Witness::note(format!("E has inverse {g:?}"))),
    }
}

/// Rebuilds `E` from `D⁻¹` and the key counit.
pub fn reconstruct_e_with(inst: &ProtocolInstance, dinv: &TwoCell) -> Result<EquationVerdict, ProtocolError> {
    let kit = inst.kit()?;
    let lhs = v(&[
        h(&[&kit.region.create_region, &kit.id_p, &kit.id_k])?,
        h(&[&kit.id_l, dinv, &kit.id_k])?,
        h(&[&kit.id_l, &kit.id_r, &kit.eps])?,
    ]);
    Ok(EquationVerdict::compare("e-reconstruction", lhs, Ok(kit.e.clone())))
}

pub fn reconstruct_e(inst: &ProtocolInstance) -> Result<EquationVerdict, ProtocolError> {
    let (dinv, _) = derive_d_inverse(inst)?;
    let verdict = reconstruct_e_with(inst, &dinv)?;
    if !inst.plaintext_matches_key() && !verdict.holds {
        return Ok(EquationVerdict::pass("e-reconstruction").with_note(NOT_SQUARE));
    }
    Ok(verdict)
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationReport {
    pub s1: EquationVerdict,
    pub s2: EquationVerdict,
    pub s3: EquationVerdict,
    pub s4: EquationVerdict,
    /// S1 implies S2, S3 and S4.
    pub implication: EquationVerdict,
}

pub fn check_implications(inst: &ProtocolInstance) -> ImplicationReport {
    let [s1, s2, s3, s4] = Security::ALL.map(|s| check_security(inst, s));
    let name = "s1-implies-s2-s3-s4";
    let implication = if !s1.holds {
        EquationVerdict::pass(name).with_note("vacuous: S1 does not hold")
    } else if !inst.plaintext_matches_key() {
        EquationVerdict::pass(name).with_note(NOT_SQUARE)
    } else if let Some(bad) = [&s2, &s3, &s4].into_iter().find(|s| !s.holds) {
        EquationVerdict::fail(name, Witness::note(format!("S1 holds but {} fails", bad.name)))
    } else {
        EquationVerdict::pass(name)
    };
    ImplicationReport {
        s1,
        s2,
        s3,
        s4,
        implication,
    }
}

/// Every check on an instance, in a fixed order: correctness (both
/// forms), S1 to S4, the decryption inverse, reconstruction of `E`,
/// non-invertibility of `E` and the S1 implication.
pub fn verify_all(inst: &ProtocolInstance) -> Vec<EquationVerdict> {
    let mut vs = vec![check_correctness(inst), check_correctness_expanded(inst)];
    vs.extend(Security::ALL.map(|s| check_security(inst, s)));
    match derive_d_inverse(inst) {
        Ok((_, v)) => vs.push(v),
        Err(e) => vs.push(EquationVerdict::fail("d-inverse", Witness::note(e.to_string()))),
    }
    match reconstruct_e(inst) {
        Ok(v) => vs.push(v),
        Err(e) => vs.push(EquationVerdict::fail("e-reconstruction", Witness::note(e.to_string()))),
    }
    vs.push(check_e_noninvertible(inst));
    vs.push(check_implications(inst).implication);
    vs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bit_instance_shapes() {
        let inst = single_bit_instance();
        let pairs: Vec<_> = inst.e.pairs().map(|(x, c)| ((x / 2, x % 2), c)).collect();
        assert_eq!(pairs, vec![((0, 0), 0), ((1, 1), 0), ((0, 1), 1), ((1, 0), 1)]);
        assert_eq!(inst.d.family[0], Rel::identity(&FiniteSet::new(2)));
        assert_eq!(inst.d.family[1].as_function(), Some(vec![1, 0]));
        assert_eq!(inst.eta.cup.bit_vec(), vec![true, false, false, true]);
    }

    #[test]
    fn group_two_is_the_single_bit_instance() {
        let g = group_instance(2).unwrap();
        let p = single_bit_instance();
        assert_eq!(g.e, p.e);
        assert_eq!(g.d.family, p.d.family);
        assert_eq!(g.eta, p.eta);
        assert!(group_instance(0).is_err());
    }

    #[test]
    fn correctness_of_group_instances() {
        for n in 1..=6 {
            let inst = group_instance(n).unwrap();
            assert!(check_correctness(&inst).holds, "n = {n}");
            assert!(check_correctness_expanded(&inst).holds, "n = {n}");
            assert!(check_security(&inst, Security::S1).holds, "n = {n}");
        }
    }

    #[test]
    fn swapped_key_pad_without_adjusting_d_fails() {
        let mut inst = single_bit_instance();
        inst.eta = structures::cup_from_permutation(&Permutation::new(vec![1, 0]).unwrap());
        let v = check_correctness(&inst);
        assert!(!v.holds);
        assert!(v.witness.unwrap().component.is_some());
    }

    #[test]
    fn constant_encryption_breaks_s1() {
        let mut inst = single_bit_instance();
        inst.e = Rel::from_fn(inst.e.src(), inst.e.dst(), |_, c| c == 0);
        assert!(!check_security(&inst, Security::S1).holds);
    }

    #[test]
    fn d_inverse_of_bit_instance_is_d() {
        let inst = single_bit_instance();
        let (dinv, verdict) = derive_d_inverse(&inst).unwrap();
        assert!(verdict.holds);
        assert_eq!(dinv.components(), inst.kit().unwrap().d.components());
    }

    #[test]
    fn d_inverse_of_z3() {
        let inst = group_instance(3).unwrap();
        let (dinv, verdict) = derive_d_inverse(&inst).unwrap();
        assert!(verdict.holds);
        for c in 0..3 {
            let f = dinv.component(0, c).as_function().unwrap();
            assert_eq!(f, (0..3).map(|p| (c + 3 - p) % 3).collect::<Vec<_>>());
        }
    }

    #[test]
    fn broken_d_fails_the_precondition() {
        let mut inst = single_bit_instance();
        inst.d.family[1] = Rel::full(&FiniteSet::new(2), &FiniteSet::new(2));
        assert!(matches!(derive_d_inverse(&inst), Err(ProtocolError::Precondition(_))));
    }

    #[test]
    fn e_noninvertibility() {
        assert!(e_inverse(&single_bit_instance()).is_none());
        assert!(check_e_noninvertible(&single_bit_instance()).holds);
        let one = group_instance(1).unwrap();
        assert!(e_inverse(&one).is_some());
        let v = check_e_noninvertible(&one);
        assert!(v.holds && v.note.unwrap().contains("trivial"));
        assert!(e_inverse(&group_instance(3).unwrap()).is_none());
    }

    #[test]
    fn reconstruction() {
        for inst in [single_bit_instance(), group_instance(4).unwrap()] {
            assert!(reconstruct_e(&inst).unwrap().holds);
        }
    }

    #[test]
    fn tampered_inverse_breaks_reconstruction() {
        let inst = group_instance(3).unwrap();
        let (dinv, _) = derive_d_inverse(&inst).unwrap();
        let mut comps = dinv.components().to_vec();
        comps.swap(0, 1);
        let tampered = TwoCell::new(dinv.domain().clone(), dinv.codomain().clone(), comps).unwrap();
        let v = reconstruct_e_with(&inst, &tampered).unwrap();
        assert!(!v.holds && v.witness.is_some());
    }

    #[test]
    fn implications() {
        let r = check_implications(&single_bit_instance());
        assert!(r.s1.holds && r.s2.holds && r.s3.holds && r.s4.holds && r.implication.holds);
        let mut inst = single_bit_instance();
        inst.e = Rel::empty(inst.e.src(), inst.e.dst());
        let r = check_implications(&inst);
        assert!(!r.s1.holds);
        assert!(r.implication.note.unwrap().contains("vacuous"));
    }

    #[test]
    fn s4_for_z3() {
        assert!(check_security(&group_instance(3).unwrap(), Security::S4).holds);
    }
}
