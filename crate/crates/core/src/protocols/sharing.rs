//! Secret sharing built from a one-time pad instance.
//!
//! A public message is split by running the decryption step `D` on one
//! leg of a fresh pad; the recombination step is the encryption `E`.

use super::otp::{check_correctness, ProtocolInstance};
use super::{h, v, EquationVerdict, ProtocolError};
use crate::cells::TwoCell;
use crate::relcore::{FiniteSet, Rel};
use crate::structures::{cup_from_permutation, ControlledOp, DualityPair};

#[derive(Clone, Debug)]
pub struct SecretSharingInstance {
    pub message_set: FiniteSet,
    /// Pad whose left leg feeds `D`.
    pub share_pad: DualityPair,
    pub d_share: ControlledOp,
    /// `P×K -> M`, the recombination.
    pub e_combine: Rel,
}

/// Derives the sharing scheme and checks correctness plus both erasure laws.
pub fn secret_sharing_from_otp(
    inst: &ProtocolInstance,
) -> Result<(SecretSharingInstance, Vec<EquationVerdict>), ProtocolError> {
    if !check_correctness(inst).holds {
        return Err(ProtocolError::Precondition("correctness does not hold".into()));
    }
    let pi = inst
        .eta
        .permutation()
        .ok_or_else(|| ProtocolError::Invalid("key pad is not a permutation cup".into()))?;
    // The share pad carries (π k, k); its left leg is the one D decrypts.
    let share_pad = cup_from_permutation(&pi.inverse());
    let shared = SecretSharingInstance {
        message_set: inst.c.clone(),
        share_pad: share_pad.clone(),
        d_share: inst.d.clone(),
        e_combine: inst.e.clone(),
    };
    let kit = inst.kit()?;
    let pad = share_pad.cup_cell(&kit.wk)?;
    let id_r = &kit.id_r;
    let rs = &kit.region;

    let correct = EquationVerdict::compare(
        "sharing-correctness",
        (|| v(&[h(&[id_r, &pad])?, h(&[&kit.d, &kit.id_k])?, h(&[id_r, &kit.e])?]))(),
        h(&[&rs.copy, id_r]),
    );
    let erase_second = EquationVerdict::compare(
        "sharing-erase-second",
        (|| v(&[h(&[id_r, &pad])?, h(&[&kit.d, &kit.delete(&kit.wk)?])?]))(),
        (|| h(&[id_r, &kit.create(&kit.wp)?]))(),
    );
    let erase_first = EquationVerdict::compare(
        "sharing-erase-first",
        (|| {
            let decrypt_then_drop = v(&[kit.d.clone(), h(&[id_r, &kit.delete(&kit.wp)?])?])?;
            v(&[h(&[id_r, &pad])?, h(&[&decrypt_then_drop, &kit.id_k])?])
        })(),
        (|| h(&[id_r, &kit.create(&kit.wk)?]))(),
    );
    Ok((shared, vec![correct, erase_second, erase_first]))
}

/// The sharing correctness composite, exposed for cross-checks.
pub fn sharing_lhs(inst: &ProtocolInstance) -> Result<TwoCell, ProtocolError> {
    let kit = inst.kit()?;
    let pi = inst
        .eta
        .permutation()
        .ok_or_else(|| ProtocolError::Invalid("key pad is not a permutation cup".into()))?;
    let pad = cup_from_permutation(&pi.inverse()).cup_cell(&kit.wk)?;
    v(&[
        h(&[&kit.id_r, &pad])?,
        h(&[&kit.d, &kit.id_k])?,
        h(&[&kit.id_r, &kit.e])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::otp::{group_instance, single_bit_instance};
    use crate::relcore::Permutation;

    #[test]
    fn bit_instance_shares_correctly() {
        let (s, verdicts) = secret_sharing_from_otp(&single_bit_instance()).unwrap();
        assert_eq!(s.message_set.size(), 2);
        for v in verdicts {
            assert!(v.holds, "{} failed: {:?}", v.name, v.witness);
        }
    }

    #[test]
    fn group_instances_share_correctly() {
        for n in 1..=4 {
            let (_, verdicts) = secret_sharing_from_otp(&group_instance(n).unwrap()).unwrap();
            assert!(verdicts.iter().all(|v| v.holds), "n = {n}");
        }
    }

    #[test]
    fn permuted_pad_is_compensated() {
        // D adjusted for a 3-cycle pad: D_c(π k) = c - k
        let n = 3;
        let pi = Permutation::new(vec![1, 2, 0]).unwrap();
        let z = FiniteSet::new(n);
        let e = Rel::graph(
            &z.product(&z),
            &z,
            &(0..9).map(|x| (x / 3 + x % 3) % 3).collect::<Vec<_>>(),
        )
        .unwrap();
        let family = (0..n)
            .map(|c| Rel::from_fn(&z, &z, |j, p| p == (c + n - pi.inverse().apply(j)) % n))
            .collect();
        let inst = ProtocolInstance::from_parts(n, n, n, e, family, &pi).unwrap();
        assert!(check_correctness(&inst).holds);
        let (_, verdicts) = secret_sharing_from_otp(&inst).unwrap();
        assert!(verdicts.iter().all(|v| v.holds));
    }

    #[test]
    fn broken_instance_is_rejected() {
        let mut inst = single_bit_instance();
        inst.d.family[1] = Rel::identity(&FiniteSet::new(2));
        assert!(matches!(
            secret_sharing_from_otp(&inst),
            Err(ProtocolError::Precondition(_))
        ));
    }
}
