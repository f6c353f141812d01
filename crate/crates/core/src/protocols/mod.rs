//! Concrete protocol instances and the equations they must satisfy.

pub mod dh;
pub mod otp;
pub mod sharing;

use serde::Serialize;
use thiserror::Error;

use crate::cells::{self, CellError, Difference, TwoCell};
use crate::relcore::RelError;
use crate::structures::StructError;

pub use dh::{check_dh, check_dh_without_erasure, DHInstance};
pub use otp::{
    check_correctness, check_correctness_expanded, check_e_noninvertible, check_implications, check_security,
    derive_d_inverse, group_instance, reconstruct_e, single_bit_instance, verify_all, ImplicationReport,
    ProtocolInstance, Security,
};
pub use sharing::{secret_sharing_from_otp, SecretSharingInstance};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    Struct(#[from] StructError),
    #[error(transparent)]
    Rel(#[from] RelError),
}

/// Where two sides of an equation first disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<u32>>,
    /// Whether the differing pair occurs on the left-hand side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_lhs: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
}

impl Witness {
    pub fn note(detail: impl Into<String>) -> Witness {
        Witness {
            detail: detail.into(),
            component: None,
            source: None,
            target: None,
            in_lhs: None,
            base: None,
        }
    }

    /// Locates a difference, reading element keys off the left-hand side.
    pub fn from_difference(d: &Difference, lhs: &TwoCell) -> Witness {
        match *d {
            Difference::Component { t, s, a, b, in_left } => Witness {
                detail: d.to_string(),
                component: Some((t, s)),
                source: Some(lhs.domain().key(t, s, a).to_vec()),
                target: Some(lhs.codomain().key(t, s, b).to_vec()),
                in_lhs: Some(in_left),
                base: None,
            },
            _ => Witness::note(d.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationVerdict {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl EquationVerdict {
    pub fn pass(name: &str) -> EquationVerdict {
        EquationVerdict {
            name: name.to_string(),
            holds: true,
            witness: None,
            note: None,
        }
    }

    pub fn fail(name: &str, witness: Witness) -> EquationVerdict {
        EquationVerdict {
            name: name.to_string(),
            holds: false,
            witness: Some(witness),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> EquationVerdict {
        self.note = Some(note.into());
        self
    }

    /// Compares two composites, turning construction errors into failures.
    pub fn compare(
        name: &str,
        lhs: Result<TwoCell, ProtocolError>,
        rhs: Result<TwoCell, ProtocolError>,
    ) -> EquationVerdict {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => match cells::equal(&l, &r) {
                Ok(()) => EquationVerdict::pass(name),
                Err(d) => EquationVerdict::fail(name, Witness::from_difference(&d, &l)),
            },
            (Err(e), _) | (_, Err(e)) => EquationVerdict::fail(name, Witness::note(format!("type error: {e}"))),
        }
    }
}

pub(crate) fn h(cs: &[&TwoCell]) -> Result<TwoCell, ProtocolError> {
    Ok(cells::hcompose_all(cs)?)
}

pub(crate) fn v(cs: &[TwoCell]) -> Result<TwoCell, ProtocolError> {
    Ok(cells::vcompose_all(&cs.iter().collect::<Vec<_>>())?)
}
