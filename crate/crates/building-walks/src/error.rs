//! Crate-wide error type. Every failure mode a caller can trigger has its own
//! variant with a stable `kind()` tag, so front ends can emit machine-readable
//! error objects without parsing messages.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Parameters outside a documented operation domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Walk coefficients violating the probability-simplex constraints.
    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    /// Breadth-first enumeration exceeded its element cap; the group is too
    /// large, or infinite.
    #[error("group too large or infinite: enumeration exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    /// Gonality m for which the Feit-Higman theorem rules out a finite thick
    /// geometry; raised by constructors that require a realizable system. The
    /// admissibility checker builds such systems anyway through the
    /// unrestricted entry point.
    #[error("rejected by the Feit-Higman theorem: no finite thick generalized {m}-gon exists")]
    RejectedGonality { m: u32 },

    /// An explicit incidence model failed a consistency audit.
    #[error("not a building: {0}")]
    NotABuilding(String),

    /// A lattice convolution landed outside the shipped and derivable
    /// recursion rows. Never silently guessed.
    #[error("unsupported boundary: no recursion row covers A_({k},{l})*{gen}")]
    UnsupportedBoundary { k: u64, l: u64, gen: &'static str },

    /// Evaluation requested on the singular set of the c-function. Callers
    /// must perturb; quadrature grids never hit it.
    #[error("singular point: ({z1}, {z2}) lies on the singular set of the c-function")]
    SingularPoint { z1: String, z2: String },

    /// Exact arithmetic cannot represent a required quantity (for example a
    /// square root outside the current field); the floating mode can.
    #[error("not representable exactly: {0}")]
    NotRepresentable(String),

    /// Malformed serialized data.
    #[error("deserialization: {0}")]
    Deserialize(String),
}

impl Error {
    /// Stable machine-readable tag for this error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::InvalidWalk(_) => "invalid-walk",
            Error::GroupTooLarge { .. } => "group-too-large-or-infinite",
            Error::RejectedGonality { .. } => "rejected-by-feit-higman",
            Error::NotABuilding(_) => "not-a-building",
            Error::UnsupportedBoundary { .. } => "unsupported-boundary",
            Error::SingularPoint { .. } => "singular-point",
            Error::NotRepresentable(_) => "not-representable",
            Error::Deserialize(_) => "deserialize",
        }
    }
}
