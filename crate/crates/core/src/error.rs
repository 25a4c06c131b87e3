//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by model construction and substructuring operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix dimensions do not line up.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: String,
        found: String,
    },

    /// A matrix that must be symmetric is not.
    #[error("matrix {name} must be symmetric (max asymmetry {max_asym:e})")]
    NotSymmetric { name: &'static str, max_asym: f64 },

    /// A matrix that must be invertible is singular.
    #[error("singular {name}: {detail}")]
    Singular { name: &'static str, detail: String },

    /// Reciprocal condition number below the configured guard.
    #[error(
        "ill-conditioned {name}: 1/cond = {rcond:e} < {threshold:e}; {hint}"
    )]
    IllConditioned {
        name: &'static str,
        rcond: f64,
        threshold: f64,
        hint: &'static str,
    },

    /// Operation applied to a model of the wrong output kind.
    #[error("{op} expects a {expected} model, got {found}")]
    WrongOutputKind {
        op: &'static str,
        expected: &'static str,
        found: String,
    },

    /// FRF quantities of the operands disagree.
    #[error("{op}: mixed FRF quantities ({0:?} vs {1:?})", .quantities.0, .quantities.1)]
    MixedQuantities {
        op: &'static str,
        quantities: (crate::frf::FrfQuantity, crate::frf::FrfQuantity),
    },

    /// A DOF label was not found.
    #[error("unknown DOF label '{label}' in {context}")]
    UnknownLabel { label: String, context: String },

    /// A DOF label query matched more than one label.
    #[error("ambiguous DOF label '{label}': qualify as 'structure/name'")]
    AmbiguousLabel { label: String },

    /// A DOF label appears twice where uniqueness is required.
    #[error("duplicate DOF label '{label}' in {context}")]
    DuplicateLabel { label: String, context: String },

    /// Empty output or input selection.
    #[error("{op}: selection must keep at least one output and one input")]
    EmptySelection { op: &'static str },

    /// A matrix has lower rank than the operation requires.
    #[error("{context}: rank {found} < required {required}")]
    RankDeficient {
        context: String,
        found: usize,
        required: usize,
    },

    /// The resolvent (jwI - A) is singular at the listed frequencies.
    #[error("FRF evaluation singular at {} of {} grid lines (first at {first_hz} Hz)", .count, .total)]
    SingularAtFrequency {
        count: usize,
        total: usize,
        first_hz: f64,
    },

    /// Frequency grids of two FRF matrices differ.
    #[error("frequency grids differ: {detail}")]
    GridMismatch { detail: String },

    /// Label sets of two FRF matrices cannot be matched.
    #[error("label sets differ: {detail}")]
    LabelMismatch { detail: String },

    /// A non-finite entry was produced or supplied.
    #[error("non-finite entry in {context}")]
    NonFinite { context: String },

    /// Invalid parameter value.
    #[error("invalid {what}: {detail}")]
    InvalidParameter { what: &'static str, detail: String },

    /// File I/O failure.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Parse failure with location diagnostics.
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },
}

impl Error {
    pub(crate) fn dims(context: impl Into<String>, expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected: expected.into(),
            found: found.into(),
        }
    }
}
