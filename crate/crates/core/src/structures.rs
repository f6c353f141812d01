//! Named generators: dualities (cups and caps), deletion and random
//! creation, public regions with their Frobenius structure, publication,
//! sampling and controlled computation.

use serde::Serialize;
use thiserror::Error;

use crate::cells::{self, hcompose_all, vcompose_all, CellError, OneCell, TwoCell};
use crate::relcore::{FiniteSet, Permutation, Rel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructError {
    #[error("exhaustive classification is capped at size {cap}, got {size}")]
    TooLarge { size: usize, cap: usize },
    #[error("controlled family has {got} members but the public set has {want} elements")]
    FamilyLength { got: usize, want: usize },
    #[error("controlled family member {index} is {got:?}, expected {want:?}")]
    FamilyShape {
        index: usize,
        got: (usize, usize),
        want: (usize, usize),
    },
    #[error("candidate cup is not the graph of a permutation")]
    NotPermutationCup,
    #[error(transparent)]
    Cell(#[from] CellError),
}

pub const CLASSIFY_CAP: usize = 4;

/// A cup `1 -> S×S` and cap `S×S -> 1` exhibiting `S` as self-dual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityPair {
    pub carrier: FiniteSet,
    pub cup: Rel,
    pub cap: Rel,
}

impl DualityPair {
    /// Both zig-zag composites reduce to the identity on `S`.
    pub fn snake_check(&self) -> bool {
        let id = Rel::identity(&self.carrier);
        let zig = self.cup.product(&id).compose(&id.product(&self.cap)).map(|r| r == id);
        let zag = id.product(&self.cup).compose(&self.cap.product(&id)).map(|r| r == id);
        zig == Ok(true) && zag == Ok(true)
    }

    /// The cup as a 2-cell from the identity on the unit to `W . W`.
    pub fn cup_cell(&self, wire: &OneCell) -> Result<TwoCell, CellError> {
        let ww = cells::hcompose_one(wire, wire)?;
        TwoCell::scalar_between(&OneCell::identity(&FiniteSet::unit()), &ww, &self.cup)
    }

    pub fn cap_cell(&self, wire: &OneCell) -> Result<TwoCell, CellError> {
        let ww = cells::hcompose_one(wire, wire)?;
        TwoCell::scalar_between(&ww, &OneCell::identity(&FiniteSet::unit()), &self.cap)
    }

    /// The permutation this cup is the graph of.
    pub fn permutation(&self) -> Option<Permutation> {
        cup_permutation(&self.cup, self.carrier.size())
    }
}

fn pair_set(s: &FiniteSet) -> FiniteSet {
    s.product(s)
}

/// The diagonal cup `Σ (a, a)` and its converse.
pub fn canonical_cup(s: &FiniteSet) -> DualityPair {
    cup_from_permutation(&Permutation::identity(s.size()))
}

/// Cup `Σ (s, π s)` together with the counit `Σ (π b, b)` that completes
/// the snake equations.
pub fn cup_from_permutation(pi: &Permutation) -> DualityPair {
    let n = pi.len();
    let carrier = FiniteSet::new(n);
    let pairs = pair_set(&carrier);
    let unit = FiniteSet::unit();
    let cup = Rel::make(&unit, &pairs, (0..n).map(|s| (0, s * n + pi.apply(s)))).expect("in range");
    let cap = Rel::make(&pairs, &unit, (0..n).map(|b| (pi.apply(b) * n + b, 0))).expect("in range");
    let pair = DualityPair { carrier, cup, cap };
    debug_assert!(pair.snake_check());
    pair
}

fn cup_permutation(cup: &Rel, n: usize) -> Option<Permutation> {
    let mut map = vec![usize::MAX; n];
    for (_, x) in cup.pairs() {
        let (a, b) = (x / n, x % n);
        if map[a] != usize::MAX {
            return None;
        }
        map[a] = b;
    }
    Permutation::new(map).ok()
}

/// Boolean `n × n` matrices packed into a `u64`, bit `a * n + b`.
fn mat_mul_is_identity(x: u64, y: u64, n: usize) -> bool {
    for a in 0..n {
        for c in 0..n {
            let hit = (0..n).any(|b| (x >> (a * n + b)) & 1 == 1 && (y >> (b * n + c)) & 1 == 1);
            if hit != (a == c) {
                return false;
            }
        }
    }
    true
}

/// Every cup/cap pair satisfying the snake equations, as bit masks over
/// encoded pairs. Caps are searched column by column, which stays
/// exhaustive while avoiding the full product of candidate spaces.
pub fn all_dualities(s: &FiniteSet) -> Result<Vec<(u64, u64)>, StructError> {
    let n = s.size();
    if n > CLASSIFY_CAP {
        return Err(StructError::TooLarge {
            size: n,
            cap: CLASSIFY_CAP,
        });
    }
    // In mask form the snakes read cup·cap = id and cap·cup = id.
    let nn = n * n;
    let mut out = Vec::new();
    for cup in 0u64..1 << nn {
        // admissible columns of the cap for each x
        let mut columns: Vec<Vec<u64>> = Vec::with_capacity(n);
        for x in 0..n {
            let ok: Vec<u64> = (0u64..1 << n)
                .filter(|&col| {
                    (0..n).all(|a| {
                        let hit = (0..n).any(|b| (col >> b) & 1 == 1 && (cup >> (a * n + b)) & 1 == 1);
                        hit == (a == x)
                    })
                })
                .collect();
            if ok.is_empty() {
                break;
            }
            columns.push(ok);
        }
        if columns.len() < n {
            continue;
        }
        let mut idx = vec![0usize; n];
        loop {
            let mut cap = 0u64;
            for x in 0..n {
                let col = columns[x][idx[x]];
                for b in 0..n {
                    if (col >> b) & 1 == 1 {
                        cap |= 1 << (b * n + x);
                    }
                }
            }
            if mat_mul_is_identity(cap, cup, n) {
                out.push((cup, cap));
            }
            let Some(x) = (0..n).find(|&x| idx[x] + 1 < columns[x].len()) else {
                break;
            };
            idx[x] += 1;
            for i in idx.iter_mut().take(x) {
                *i = 0;
            }
        }
    }
    Ok(out)
}

/// Classifies all dualities on `S`, returning the permutation behind each cup.
pub fn classify_cups(s: &FiniteSet) -> Result<Vec<Permutation>, StructError> {
    let n = s.size();
    let unit = FiniteSet::unit();
    let pairs = pair_set(s);
    let mut perms = Vec::new();
    for (cup, _) in all_dualities(s)? {
        let rel = Rel::from_fn(&unit, &pairs, |_, x| (cup >> x) & 1 == 1);
        perms.push(cup_permutation(&rel, n).ok_or(StructError::NotPermutationCup)?);
    }
    Ok(perms)
}

/// The total relation `S -> 1`.
pub fn delete(s: &FiniteSet) -> Rel {
    Rel::full(s, &FiniteSet::unit())
}

/// The total relation `1 -> S`: an arbitrary, random state.
pub fn create(s: &FiniteSet) -> Rel {
    Rel::full(&FiniteSet::unit(), s)
}

/// All relations `S -> 1` with empty kernel.
pub fn zero_kernel_to_unit(s: &FiniteSet) -> Vec<Rel> {
    Rel::all(s, &FiniteSet::unit())
        .filter(|r| r.kernel().carrier.is_empty())
        .collect()
}

/// Creating a shared key and deleting either leg leaves a random key.
pub fn twist_delete_holds(pair: &DualityPair) -> bool {
    let s = &pair.carrier;
    let id = Rel::identity(s);
    let right = pair.cup.compose(&id.product(&delete(s)));
    let left = pair.cup.compose(&delete(s).product(&id));
    right == Ok(create(s)) && left == Ok(create(s))
}

/// Any given key might match one created nondeterministically.
pub fn twist_create_holds(pair: &DualityPair) -> bool {
    let s = &pair.carrier;
    let id = Rel::identity(s);
    let right = id.product(&create(s)).compose(&pair.cap);
    let left = create(s).product(&id).compose(&pair.cap);
    right == Ok(delete(s)) && left == Ok(delete(s))
}

/// The public-region generators on a 0-cell.
#[derive(Clone, Debug)]
pub struct RegionStructure {
    pub carrier: FiniteSet,
    /// `1 -> S`, singleton fibers.
    pub boundary_left: OneCell,
    /// `S -> 1`, singleton fibers.
    pub boundary_right: OneCell,
    /// `id_S => R . L`
    pub copy: TwoCell,
    /// `R . L => id_S`
    pub compare: TwoCell,
    /// `L . R => id_1`
    pub delete_region: TwoCell,
    /// `id_1 => L . R`
    pub create_region: TwoCell,
    /// private wire `S => L . R`
    pub publish: TwoCell,
    /// `L . R =>` private wire `S`
    pub sample: TwoCell,
}

impl RegionStructure {
    /// The open region `L . R`, a scalar 1-cell whose fiber is `S`.
    pub fn region(&self) -> OneCell {
        cells::hcompose_one(&self.boundary_left, &self.boundary_right).expect("boundaries compose")
    }
}

pub fn region_structure(s: &FiniteSet) -> RegionStructure {
    let unit = FiniteSet::unit();
    let left = OneCell::singletons(&unit, s);
    let right = OneCell::singletons(s, &unit);
    let id_s = OneCell::identity(s);
    let id_1 = OneCell::identity(&unit);
    let rl = cells::hcompose_one(&right, &left).expect("boundaries compose");
    let lr = cells::hcompose_one(&left, &right).expect("boundaries compose");
    let copy = TwoCell::from_fn(&id_s, &rl, |_, _, _, _| true).expect("parallel");
    let delete_region = TwoCell::from_fn(&lr, &id_1, |_, _, _, _| true).expect("parallel");
    let wire = OneCell::scalar(s);
    let publish = TwoCell::from_fn(&wire, &lr, |_, _, a, b| a == b).expect("parallel");
    RegionStructure {
        carrier: s.clone(),
        compare: cells::converse(&copy),
        create_region: cells::converse(&delete_region),
        sample: cells::converse(&publish),
        boundary_left: left,
        boundary_right: right,
        copy,
        delete_region,
        publish,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<String>,
}

fn axiom(name: &str, lhs: Result<TwoCell, CellError>, rhs: Result<TwoCell, CellError>) -> AxiomResult {
    let outcome = match (lhs, rhs) {
        (Ok(l), Ok(r)) => cells::equal(&l, &r).map_err(|d| d.to_string()),
        (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
    };
    AxiomResult {
        axiom: name.to_string(),
        holds: outcome.is_ok(),
        difference: outcome.err(),
    }
}

/// Checks the unit, counit, symmetry and bubble laws of a region
/// structure, then associativity and the Frobenius law of the induced
/// algebra on the open region.
pub fn frobenius_check(rs: &RegionStructure) -> Vec<AxiomResult> {
    let l = TwoCell::identity(&rs.boundary_left);
    let r = TwoCell::identity(&rs.boundary_right);
    let region = rs.region();
    let id_region = TwoCell::identity(&region);
    let h = |cs: &[&TwoCell]| hcompose_all(cs);
    let v = |cs: &[Result<TwoCell, CellError>]| -> Result<TwoCell, CellError> {
        let cs: Vec<TwoCell> = cs.iter().cloned().collect::<Result<_, _>>()?;
        vcompose_all(&cs.iter().collect::<Vec<_>>())
    };
    let mult = h(&[&l, &rs.compare, &r]);
    let comult = h(&[&l, &rs.copy, &r]);
    let mut out = vec![
        axiom(
            "copy-delete-right",
            v(&[h(&[&rs.copy, &r]), h(&[&r, &rs.delete_region])]),
            Ok(r.clone()),
        ),
        axiom(
            "copy-delete-left",
            v(&[h(&[&l, &rs.copy]), h(&[&rs.delete_region, &l])]),
            Ok(l.clone()),
        ),
        axiom(
            "create-compare-right",
            v(&[h(&[&r, &rs.create_region]), h(&[&rs.compare, &r])]),
            Ok(r.clone()),
        ),
        axiom(
            "create-compare-left",
            v(&[h(&[&rs.create_region, &l]), h(&[&l, &rs.compare])]),
            Ok(l.clone()),
        ),
    ];
    let swap = cells::swap(&region, &region);
    out.push(axiom(
        "compare-symmetric",
        v(&[swap.clone(), mult.clone()]),
        mult.clone(),
    ));
    out.push(axiom("copy-symmetric", v(&[comult.clone(), swap]), comult.clone()));
    out.push(axiom(
        "copy-compare-bubble",
        v(&[Ok(rs.copy.clone()), Ok(rs.compare.clone())]),
        Ok(TwoCell::identity(rs.copy.domain())),
    ));
    out.push(axiom(
        "copy-associative",
        v(&[comult.clone(), comult.clone().and_then(|c| h(&[&c, &id_region]))]),
        v(&[comult.clone(), comult.clone().and_then(|c| h(&[&id_region, &c]))]),
    ));
    out.push(axiom(
        "frobenius-left",
        v(&[
            comult.clone().and_then(|c| h(&[&c, &id_region])),
            mult.clone().and_then(|m| h(&[&id_region, &m])),
        ]),
        v(&[mult.clone(), comult.clone()]),
    ));
    out.push(axiom(
        "frobenius-right",
        v(&[
            comult.clone().and_then(|c| h(&[&id_region, &c])),
            mult.clone().and_then(|m| h(&[&m, &id_region])),
        ]),
        v(&[mult, comult]),
    ));
    out
}

/// A Frobenius algebra on a scalar object, as plain relations.
#[derive(Clone, Debug)]
pub struct FrobeniusAlgebra {
    pub carrier: FiniteSet,
    /// `A×A -> A`
    pub mult: Rel,
    /// `1 -> A`
    pub unit: Rel,
    /// `A -> A×A`
    pub comult: Rel,
    /// `A -> 1`
    pub counit: Rel,
}

impl FrobeniusAlgebra {
    /// Read off from a region structure on `S`: the algebra on the open region.
    pub fn from_region(rs: &RegionStructure) -> FrobeniusAlgebra {
        let s = &rs.carrier;
        let unit = FiniteSet::unit();
        let n = s.size();
        let pairs = s.product(s);
        FrobeniusAlgebra {
            carrier: s.clone(),
            comult: Rel::from_fn(s, &pairs, |a, x| x == a * n + a),
            mult: Rel::from_fn(&pairs, s, |x, a| x == a * n + a),
            unit: Rel::full(&unit, s),
            counit: Rel::full(s, &unit),
        }
    }

    pub fn check(&self) -> Vec<AxiomResult> {
        let a = &self.carrier;
        let id = Rel::identity(a);
        let n = a.size();
        let sw = Rel::from_fn(&a.product(a), &a.product(a), |x, y| {
            y == (x % n.max(1)) * n + x / n.max(1)
        });
        let law = |name: &str, l: Result<Rel, _>, r: Result<Rel, _>| AxiomResult {
            axiom: name.to_string(),
            holds: matches!((&l, &r), (Ok(x), Ok(y)) if x == y),
            difference: None,
        };
        let m = &self.mult;
        let d = &self.comult;
        vec![
            law("unit-left", self.unit.product(&id).compose(m), Ok(id.clone())),
            law("unit-right", id.product(&self.unit).compose(m), Ok(id.clone())),
            law("counit-left", d.compose(&self.counit.product(&id)), Ok(id.clone())),
            law("counit-right", d.compose(&id.product(&self.counit)), Ok(id.clone())),
            law("associative", m.product(&id).compose(m), id.product(m).compose(m)),
            law("coassociative", d.compose(&d.product(&id)), d.compose(&id.product(d))),
            law("commutative", sw.compose(m), Ok(m.clone())),
            law("cocommutative", d.compose(&sw), Ok(d.clone())),
            law("frobenius", d.product(&id).compose(&id.product(m)), m.compose(d)),
            law("special", d.compose(m), Ok(id)),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The public region sits to the left: `R_S . X => R_S . Y`.
    Left,
    /// The public region sits to the right: `X . L_S => Y . L_S`.
    Right,
}

/// A private operation indexed by a public value.
#[derive(Clone, Debug)]
pub struct ControlledOp {
    pub public_carrier: FiniteSet,
    pub in_private: FiniteSet,
    pub out_private: FiniteSet,
    pub family: Vec<Rel>,
    pub side: Side,
}

impl ControlledOp {
    pub fn new(
        public_carrier: &FiniteSet,
        in_private: &FiniteSet,
        out_private: &FiniteSet,
        family: Vec<Rel>,
        side: Side,
    ) -> Result<ControlledOp, StructError> {
        if family.len() != public_carrier.size() {
            return Err(StructError::FamilyLength {
                got: family.len(),
                want: public_carrier.size(),
            });
        }
        let want = (in_private.size(), out_private.size());
        for (index, r) in family.iter().enumerate() {
            let got = (r.src().size(), r.dst().size());
            if got != want {
                return Err(StructError::FamilyShape { index, got, want });
            }
        }
        Ok(ControlledOp {
            public_carrier: public_carrier.clone(),
            in_private: in_private.clone(),
            out_private: out_private.clone(),
            family,
            side,
        })
    }

    fn boundary(&self) -> OneCell {
        let unit = FiniteSet::unit();
        match self.side {
            Side::Left => OneCell::singletons(&self.public_carrier, &unit),
            Side::Right => OneCell::singletons(&unit, &self.public_carrier),
        }
    }

    fn wrap(&self, wire: &OneCell) -> Result<OneCell, CellError> {
        let b = self.boundary();
        match self.side {
            Side::Left => cells::hcompose_one(&b, wire),
            Side::Right => cells::hcompose_one(wire, &b),
        }
    }
}

/// The controlled 2-cell with plain private wires.
pub fn controlled(op: &ControlledOp) -> Result<TwoCell, StructError> {
    controlled_between(op, &OneCell::scalar(&op.in_private), &OneCell::scalar(&op.out_private))
}

/// The controlled 2-cell with the given scalar 1-cells as private wires.
pub fn controlled_between(op: &ControlledOp, input: &OneCell, output: &OneCell) -> Result<TwoCell, StructError> {
    let dom = op.wrap(input)?;
    let cod = op.wrap(output)?;
    let family = &op.family;
    Ok(TwoCell::from_fn(&dom, &cod, |t, s, a, b| {
        let p = match op.side {
            Side::Left => s,
            Side::Right => t,
        };
        family[p].get(a, b)
    })?)
}

/// The rewriting in which the public value is copied, the operation
/// runs on the copy, and the copy is then deleted.
pub fn controlled_rewrite(op: &ControlledOp, cell: &TwoCell) -> Result<TwoCell, CellError> {
    let rs = region_structure(&op.public_carrier);
    let input = OneCell::scalar(&op.in_private);
    let output = OneCell::scalar(&op.out_private);
    let (x, y) = (TwoCell::identity(&input), TwoCell::identity(&output));
    let l = TwoCell::identity(&rs.boundary_left);
    let r = TwoCell::identity(&rs.boundary_right);
    let steps = match op.side {
        Side::Left => [
            hcompose_all(&[&rs.copy, &r, &x])?,
            hcompose_all(&[&r, &l, cell])?,
            hcompose_all(&[&r, &rs.delete_region, &y])?,
        ],
        Side::Right => [
            hcompose_all(&[&x, &l, &rs.copy])?,
            hcompose_all(&[cell, &r, &l])?,
            hcompose_all(&[&y, &rs.delete_region, &l])?,
        ],
    };
    vcompose_all(&steps.iter().collect::<Vec<_>>())
}

/// A controlled computation cannot modify public data: its copy-rewrite
/// equals the original.
pub fn controlled_lemma_holds(op: &ControlledOp) -> Result<bool, StructError> {
    let cell = controlled(op)?;
    let rewritten = controlled_rewrite(op, &cell)?;
    Ok(cells::equal(&cell, &rewritten).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> FiniteSet {
        FiniteSet::new(n)
    }

    #[test]
    fn canonical_cups() {
        assert_eq!(canonical_cup(&set(1)).cup, Rel::full(&set(1), &set(1)));
        assert_eq!(
            canonical_cup(&set(2)).cup.to_matrix(),
            vec![vec![1], vec![0], vec![0], vec![1]]
        );
        for n in 1..=6 {
            assert!(canonical_cup(&set(n)).snake_check());
        }
    }

    #[test]
    fn swapped_cup() {
        let p = cup_from_permutation(&Permutation::new(vec![1, 0]).unwrap());
        assert_eq!(p.cup.bit_vec(), vec![false, true, true, false]);
        assert!(p.snake_check());
    }

    #[test]
    fn three_cycle_counit_is_not_the_converse() {
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        let p = cup_from_permutation(&pi);
        assert!(p.snake_check());
        let naive = DualityPair {
            cap: p.cup.converse(),
            ..p.clone()
        };
        assert!(!naive.snake_check());
    }

    #[test]
    fn classification_counts() {
        assert_eq!(classify_cups(&set(1)).unwrap().len(), 1);
        assert_eq!(classify_cups(&set(2)).unwrap().len(), 2);
        assert_eq!(classify_cups(&set(3)).unwrap().len(), 6);
        assert!(matches!(classify_cups(&set(5)), Err(StructError::TooLarge { .. })));
    }

    #[test]
    fn delete_has_zero_kernel_and_is_unique() {
        for n in 1..=5 {
            assert!(delete(&set(n)).kernel().carrier.is_empty());
        }
        for n in 1..=4 {
            assert_eq!(zero_kernel_to_unit(&set(n)), vec![delete(&set(n))]);
        }
    }

    #[test]
    fn twist_equations() {
        for n in 1..=4 {
            for pi in Permutation::all(n) {
                let p = cup_from_permutation(&pi);
                assert!(twist_delete_holds(&p));
                assert!(twist_create_holds(&p));
            }
        }
    }

    #[test]
    fn region_boundaries_compose_to_the_carrier() {
        let rs = region_structure(&set(3));
        assert_eq!(rs.region().sizes(), vec![3]);
    }

    #[test]
    fn unit_region_generators_are_identity_like() {
        let rs = region_structure(&set(1));
        assert!(rs.copy.components().iter().all(|r| *r == Rel::identity(r.src())));
        assert!(rs.publish.components()[0].predicates().is_bijection);
        assert!(rs.region().is_identity());
    }

    #[test]
    fn frobenius_axioms_hold() {
        for n in 0..=4 {
            let report = frobenius_check(&region_structure(&set(n)));
            for a in &report {
                assert!(a.holds, "size {n}: {} failed: {:?}", a.axiom, a.difference);
            }
        }
    }

    #[test]
    fn empty_compare_breaks_counit_laws() {
        let mut rs = region_structure(&set(2));
        rs.compare = TwoCell::empty(rs.compare.domain(), rs.compare.codomain()).unwrap();
        let report = frobenius_check(&rs);
        let failed: Vec<&str> = report.iter().filter(|a| !a.holds).map(|a| a.axiom.as_str()).collect();
        assert!(failed.contains(&"create-compare-right"));
        assert!(failed.contains(&"create-compare-left"));
        let located = report.iter().find(|a| a.axiom == "create-compare-right").unwrap();
        assert!(located.difference.as_deref().unwrap().contains("component"));
    }

    #[test]
    fn scalar_frobenius_algebra() {
        for n in 1..=4 {
            let fa = FrobeniusAlgebra::from_region(&region_structure(&set(n)));
            assert!(fa.check().iter().all(|a| a.holds));
        }
    }

    #[test]
    fn permuted_comultiplication_stays_symmetric_but_loses_counit() {
        let mut fa = FrobeniusAlgebra::from_region(&region_structure(&set(2)));
        let sigma = Permutation::new(vec![1, 0]).unwrap().to_rel();
        fa.comult = sigma.compose(&fa.comult).unwrap();
        let report = fa.check();
        let holds = |n: &str| report.iter().find(|a| a.axiom == n).unwrap().holds;
        assert!(holds("cocommutative"));
        assert!(!holds("counit-left"));
    }

    #[test]
    fn controlled_examples() {
        let s = set(2);
        let id = Rel::identity(&s);
        let flip = Permutation::new(vec![1, 0]).unwrap().to_rel();
        let op = ControlledOp::new(&s, &s, &s, vec![id.clone(), id.clone()], Side::Left).unwrap();
        let c = controlled(&op).unwrap();
        assert!(c.is_identity());
        let d = ControlledOp::new(&s, &s, &s, vec![id.clone(), flip.clone()], Side::Left).unwrap();
        let cell = controlled(&d).unwrap();
        assert_eq!(cell.component(0, 1), &flip);
        assert!(controlled_lemma_holds(&d).unwrap());
        let dr = ControlledOp { side: Side::Right, ..d };
        assert!(controlled_lemma_holds(&dr).unwrap());
        assert!(matches!(
            ControlledOp::new(&s, &s, &s, vec![id], Side::Left),
            Err(StructError::FamilyLength { got: 1, want: 2 })
        ));
    }
}
