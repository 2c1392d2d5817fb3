//! Crate-wide error type.

use crate::correlations::OutcomeLabel;

/// Everything that can go wrong while building observables, POVMs, or plans.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A direction vector too close to zero to normalize.
    #[error("direction has norm {0:.3e}, too small to normalize")]
    ZeroDirection(f64),

    /// A matrix expected to be Hermitian was not.
    #[error("matrix is not Hermitian (largest deviation {0:.3e})")]
    NotHermitian(f64),

    /// Operator and state dimensions disagree.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// Tensor product of an empty operator list.
    #[error("tensor product needs at least one operator")]
    EmptyTensor,

    /// Qubit count outside the supported range.
    #[error("unsupported qubit count {0} (supported: 1 through 3)")]
    UnsupportedQubitCount(usize),

    /// A density matrix failed validation.
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// A sharpness factor outside [0, 1].
    #[error("sharpness {0} outside [0, 1]")]
    SharpnessOutOfRange(f64),

    /// The Busch criterion rejects the requested joint measurement.
    #[error("joint measurement infeasible: Busch margin {0:.6e} is negative")]
    Infeasible(f64),

    /// Sum of squared sharpness factors exceeds one.
    #[error("three-direction condition violated: alpha^2 + beta^2 + gamma^2 = {0:.6} > 1")]
    ThreeDirectionCondition(f64),

    /// Directions that must be mutually orthogonal are not.
    #[error("directions not mutually orthogonal (largest |dot| = {0:.3e})")]
    NotOrthogonal(f64),

    /// The two POVM directions do not sum to a unit vector, so no third
    /// outcome can be read off as their sum.
    #[error("direction sum has norm {0:.6}, expected 1 for an inferred outcome")]
    InferredNotUnit(f64),

    /// A correlation or probability query referenced an outcome label the
    /// party's plan does not produce.
    #[error("party {party} does not produce outcome label {label:?}")]
    LabelNotInPlan { party: usize, label: OutcomeLabel },

    /// Wrong number of labels for the number of parties in a plan.
    #[error("selection has {got} labels for a plan with {want} parties")]
    SelectionLength { got: usize, want: usize },

    /// An equality chain needs at least two product terms to constrain anything.
    #[error("coincidence predicate needs at least two product terms")]
    PredicateTooShort,

    /// The objective returned NaN or an infinity.
    #[error("objective is not finite at {0:?}")]
    NonFiniteObjective(Vec<f64>),

    /// A search was requested with no evaluation budget.
    #[error("search budget must be at least 1")]
    ZeroBudget,
}

pub type Result<T> = std::result::Result<T, Error>;
