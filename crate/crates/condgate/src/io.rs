//! JSON documents for states, operators, and command results.
//!
//! Every writer emits pretty-printed JSON with a fixed key order and a
//! trailing newline, so identical inputs produce byte-identical files.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockOperator, FockStateVector, Occupation};
use crate::gates::ApplyOutcome;

/// State document: `{"amplitudes": [{"occ": [..], "re": .., "im": ..}, ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateDoc {
    pub amplitudes: Vec<AmplitudeRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmplitudeRecord {
    pub occ: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

/// Operator document: the full basis listing in canonical order plus the
/// sparse nonzero entries and the sector shift.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub basis: Vec<Vec<u8>>,
    pub entries: Vec<EntryRecord>,
    pub sector_shift: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryRecord {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

/// `apply` result document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApplyDoc {
    pub probability: f64,
    pub normalized_state: Option<StateDoc>,
    pub unnormalized_state: StateDoc,
}

/// `distribution` result document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub outcomes: Vec<OutcomeRecord>,
    pub total_probability: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub count: Vec<u8>,
    pub probability: f64,
}

/// `check` result document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckDoc {
    pub completeness_residual: f64,
    pub unitarity_residual: f64,
}

/// Error document emitted under `--json-errors`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorDoc {
    pub error: ErrorBody,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

fn syntax(err: serde_json::Error) -> Error {
    Error::Syntax { line: err.line(), column: err.column(), message: err.to_string() }
}

/// Serialize any result document: pretty, fixed key order, trailing newline.
pub fn to_pretty_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("document serialization");
    text.push('\n');
    text
}

/// Parse a state document onto the given basis.
pub fn read_state(text: &str, basis: FockBasis) -> Result<FockStateVector> {
    let doc: StateDoc = serde_json::from_str(text).map_err(syntax)?;
    let amplitudes = doc
        .amplitudes
        .into_iter()
        .map(|record| (Occupation::new(record.occ), C64::new(record.re, record.im)));
    FockStateVector::from_amplitudes(basis, amplitudes)
}

/// Render a state vector, amplitudes in basis order.
pub fn state_doc(state: &FockStateVector) -> StateDoc {
    let amplitudes = state
        .iter()
        .map(|(occ, a)| AmplitudeRecord { occ: occ.counts().to_vec(), re: a.re, im: a.im })
        .collect();
    StateDoc { amplitudes }
}

/// Render an operator with its full basis listing and sparse entries in
/// row-major order.
pub fn operator_doc(op: &FockOperator) -> OperatorDoc {
    let basis = op.basis().states().iter().map(|occ| occ.counts().to_vec()).collect();
    let entries = op
        .entries()
        .map(|(row, col, value)| EntryRecord { row, col, re: value.re, im: value.im })
        .collect();
    OperatorDoc { basis, entries, sector_shift: op.sector_shift() }
}

/// Parse an operator document. The basis listing must be exactly the
/// canonical (total, lexicographic) enumeration for its inferred mode count
/// and photon cap; entry indices must address it and respect the declared
/// sector shift.
pub fn read_operator(text: &str) -> Result<FockOperator> {
    let doc: OperatorDoc = serde_json::from_str(text).map_err(syntax)?;
    let Some(first) = doc.basis.first() else {
        return Err(Error::NonCanonicalBasis);
    };
    let modes = first.len();
    let max_total = doc
        .basis
        .iter()
        .map(|occ| occ.iter().map(|&c| c as usize).sum::<usize>())
        .max()
        .unwrap_or(0);
    let basis = FockBasis::new(modes, max_total)?;
    if basis.len() != doc.basis.len()
        || basis
            .states()
            .iter()
            .zip(&doc.basis)
            .any(|(state, listed)| state.counts() != listed.as_slice())
    {
        return Err(Error::NonCanonicalBasis);
    }
    let mut op = FockOperator::zero(basis, doc.sector_shift);
    for record in &doc.entries {
        let len = op.basis().len();
        let bad = [record.row, record.col].into_iter().find(|&index| index >= len);
        if let Some(index) = bad {
            return Err(Error::EntryOutOfRange { index, len });
        }
        op.add_entry(record.row, record.col, C64::new(record.re, record.im))?;
    }
    Ok(op)
}

/// Render an `apply` outcome.
pub fn apply_doc(outcome: &ApplyOutcome) -> ApplyDoc {
    ApplyDoc {
        probability: outcome.probability,
        normalized_state: outcome.normalized.as_ref().map(state_doc),
        unnormalized_state: state_doc(&outcome.unnormalized),
    }
}

/// Render an outcome distribution.
pub fn distribution_doc(distribution: &[(Occupation, f64)]) -> DistributionDoc {
    let outcomes = distribution
        .iter()
        .map(|(count, probability)| OutcomeRecord {
            count: count.counts().to_vec(),
            probability: *probability,
        })
        .collect();
    let total_probability = distribution.iter().map(|(_, p)| p).sum();
    DistributionDoc { outcomes, total_probability }
}

/// Render an error as the `--json-errors` document.
pub fn error_doc(err: &Error) -> ErrorDoc {
    ErrorDoc { error: ErrorBody { kind: err.kind().to_string(), message: err.to_string() } }
}
