//! Diffie–Hellman key exchange over a cyclic group of prime order `q`.
//!
//! Group element `i` stands for `g^i`, so raising element `p` to the
//! exponent `x` gives element `p·x mod q`. The check runs once per
//! ambient base `b`: the ambient public region is the one-element set
//! `{b}`, which keeps every composite at most `q^4` elements wide.

use rayon::prelude::*;
use serde::Serialize;

use super::{h, v, EquationVerdict, ProtocolError, Witness};
use crate::cells::{swap, OneCell, TwoCell};
use crate::relcore::{FiniteSet, Rel};
use crate::structures::{canonical_cup, controlled_between, region_structure, ControlledOp, Side};

pub const DH_PRIME_CAP: usize = 11;

#[derive(Clone, Debug, Serialize)]
pub struct DHInstance {
    pub group_order: usize,
    #[serde(skip)]
    pub elements: FiniteSet,
    #[serde(skip)]
    pub exponents: FiniteSet,
    pub base_set: Vec<usize>,
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl DHInstance {
    /// Bases default to the non-identity elements, i.e. the generators.
    pub fn new(q: usize) -> Result<DHInstance, ProtocolError> {
        if !is_prime(q) {
            return Err(ProtocolError::Invalid(format!("{q} is not prime")));
        }
        if q > DH_PRIME_CAP {
            return Err(ProtocolError::Invalid(format!(
                "q = {q} exceeds the cap of {DH_PRIME_CAP}"
            )));
        }
        Ok(DHInstance {
            group_order: q,
            elements: FiniteSet::new(q),
            exponents: FiniteSet::new(q),
            base_set: (1..q).collect(),
        })
    }

    pub fn with_bases(mut self, bases: Vec<usize>) -> Result<DHInstance, ProtocolError> {
        if let Some(&b) = bases.iter().find(|&&b| b >= self.group_order) {
            return Err(ProtocolError::Invalid(format!("base {b} is not a group element")));
        }
        self.base_set = bases;
        Ok(self)
    }

    pub fn including_identity(self) -> DHInstance {
        let mut bases = vec![0];
        bases.extend(self.base_set.iter().copied().filter(|&b| b != 0));
        DHInstance {
            base_set: bases,
            ..self
        }
    }

    /// `x ↦ p^x` as a relation from exponents to elements.
    pub fn power(&self, p: usize) -> Rel {
        let q = self.group_order;
        Rel::graph(
            &self.exponents,
            &self.elements,
            &(0..q).map(|x| p * x % q).collect::<Vec<_>>(),
        )
        .expect("in range")
    }

    /// The exponentiation family controlled by a public group element.
    pub fn d_exp(&self, side: Side) -> ControlledOp {
        let family = (0..self.group_order).map(|p| self.power(p)).collect();
        ControlledOp::new(&self.elements, &self.exponents, &self.elements, family, side).expect("shapes agree")
    }
}

struct BaseKit {
    copy: TwoCell,
    i_r: TwoCell,
    i_l: TwoCell,
    i_x: TwoCell,
    i_z: TwoCell,
    i_region: TwoCell,
    i_lg: TwoCell,
    i_rg: TwoCell,
    cup_x: TwoCell,
    cup_z: TwoCell,
    alice_base: TwoCell,
    bob_base: TwoCell,
    publish: TwoCell,
    delete_region: TwoCell,
    create_region: TwoCell,
    apply_left: TwoCell,
    apply_right: TwoCell,
    swap_gx: TwoCell,
    swap_xg: TwoCell,
    swap_zg: TwoCell,
}

fn base_kit(dh: &DHInstance, base: usize) -> Result<BaseKit, ProtocolError> {
    let ambient = FiniteSet::new(1);
    let amb = region_structure(&ambient);
    let group = region_structure(&dh.elements);
    let wx = OneCell::scalar(&dh.exponents);
    let wz = OneCell::scalar(&dh.elements);
    let region = group.region();
    let fixed = |side| {
        ControlledOp::new(&ambient, &dh.exponents, &dh.elements, vec![dh.power(base)], side).expect("one member")
    };
    Ok(BaseKit {
        copy: amb.copy.clone(),
        i_r: TwoCell::identity(&amb.boundary_right),
        i_l: TwoCell::identity(&amb.boundary_left),
        i_x: TwoCell::identity(&wx),
        i_z: TwoCell::identity(&wz),
        i_region: TwoCell::identity(&region),
        i_lg: TwoCell::identity(&group.boundary_left),
        i_rg: TwoCell::identity(&group.boundary_right),
        cup_x: canonical_cup(&dh.exponents).cup_cell(&wx)?,
        cup_z: canonical_cup(&dh.elements).cup_cell(&wz)?,
        alice_base: controlled_between(&fixed(Side::Left), &wx, &wz)?,
        bob_base: controlled_between(&fixed(Side::Right), &wx, &wz)?,
        publish: group.publish.clone(),
        delete_region: group.delete_region.clone(),
        create_region: group.create_region.clone(),
        apply_left: controlled_between(&dh.d_exp(Side::Left), &wx, &wz)?,
        apply_right: controlled_between(&dh.d_exp(Side::Right), &wx, &wz)?,
        swap_gx: swap(&region, &wx)?,
        swap_xg: swap(&wx, &region)?,
        swap_zg: swap(&wz, &region)?,
    })
}

/// Exponents drawn and duplicated, first powers published, exchanged
/// and applied, leaving the regions of the second step open.
fn exchange_prefix(k: &BaseKit) -> Result<Vec<TwoCell>, ProtocolError> {
    Ok(vec![
        k.copy.clone(),
        h(&[&k.i_r, &k.cup_x, &k.cup_x, &k.i_l])?,
        h(&[&k.alice_base, &k.i_x, &k.i_x, &k.bob_base])?,
        h(&[&k.i_r, &k.publish, &k.i_x, &k.i_x, &k.publish, &k.i_l])?,
        h(&[&k.i_r, &k.swap_gx, &k.i_x, &k.i_region, &k.i_l])?,
        h(&[&k.i_r, &k.i_x, &k.i_lg, &k.apply_left, &k.i_region, &k.i_l])?,
    ])
}

fn dh_lhs(k: &BaseKit) -> Result<TwoCell, ProtocolError> {
    let mut steps = exchange_prefix(k)?;
    steps.extend([
        h(&[&k.i_r, &k.i_x, &k.delete_region, &k.i_z, &k.i_region, &k.i_l])?,
        h(&[&k.i_r, &k.i_x, &k.swap_zg, &k.i_l])?,
        h(&[&k.i_r, &k.apply_right, &k.i_rg, &k.i_z, &k.i_l])?,
        h(&[&k.i_r, &k.i_z, &k.delete_region, &k.i_z, &k.i_l])?,
    ]);
    v(&steps)
}

fn dh_rhs(k: &BaseKit) -> Result<TwoCell, ProtocolError> {
    v(&[k.copy.clone(), h(&[&k.i_r, &k.cup_z, &k.i_l])?])
}

fn dh_lhs_kept(k: &BaseKit) -> Result<TwoCell, ProtocolError> {
    let mut steps = exchange_prefix(k)?;
    steps.extend([
        h(&[&k.i_r, &k.i_x, &k.i_region, &k.swap_zg, &k.i_l])?,
        h(&[&k.i_r, &k.swap_xg, &k.i_region, &k.i_z, &k.i_l])?,
        h(&[&k.i_r, &k.i_region, &k.apply_right, &k.i_rg, &k.i_z, &k.i_l])?,
    ]);
    v(&steps)
}

fn dh_rhs_kept(k: &BaseKit) -> Result<TwoCell, ProtocolError> {
    v(&[
        k.copy.clone(),
        h(&[&k.i_r, &k.cup_z, &k.i_l])?,
        h(&[&k.i_r, &k.create_region, &k.i_z, &k.create_region, &k.i_z, &k.i_l])?,
    ])
}

/// Both sides of the exchange equation at one base.
pub fn dh_sides(dh: &DHInstance, base: usize) -> Result<(TwoCell, TwoCell), ProtocolError> {
    let k = base_kit(dh, base)?;
    Ok((dh_lhs(&k)?, dh_rhs(&k)?))
}

type Sides = fn(&BaseKit) -> Result<TwoCell, ProtocolError>;

fn per_base(dh: &DHInstance, name: &str, lhs: Sides, rhs: Sides) -> EquationVerdict {
    let results: Vec<(usize, EquationVerdict)> = dh
        .base_set
        .par_iter()
        .map(|&b| {
            let verdict = match base_kit(dh, b) {
                Ok(k) => EquationVerdict::compare(name, lhs(&k), rhs(&k)),
                Err(e) => EquationVerdict::fail(name, Witness::note(e.to_string())),
            };
            (b, verdict)
        })
        .collect();
    let failed: Vec<usize> = results.iter().filter(|(_, v)| !v.holds).map(|(b, _)| *b).collect();
    match results.into_iter().find(|(_, v)| !v.holds) {
        None => EquationVerdict::pass(name).with_note(format!("checked bases {:?}", dh.base_set)),
        Some((b, v)) => {
            let mut w = v.witness.unwrap_or_else(|| Witness::note("sides differ"));
            w.base = Some(b);
            let what = if b == 0 { "identity element" } else { "element" };
            w.detail = format!("base {b} ({what}): {}", w.detail);
            EquationVerdict::fail(name, w).with_note(format!("failing bases {failed:?}"))
        }
    }
}

/// Shared keys agree and do not depend on the base, for every base in the set.
pub fn check_dh(dh: &DHInstance) -> EquationVerdict {
    per_base(dh, "diffie-hellman", dh_lhs, dh_rhs)
}

/// The exchange without erasing the published values, compared against
/// independent random public values; expected to fail.
pub fn check_dh_without_erasure(dh: &DHInstance) -> EquationVerdict {
    per_base(dh, "diffie-hellman-no-erasure", dh_lhs_kept, dh_rhs_kept)
}
