use thiserror::Error;

use crate::graded::Slot;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("slot {0} does not exist in the graded space")]
    InvalidSlot(Slot),

    #[error("inputs {0:?} contain a repeated odd slot; the value is forced to vanish")]
    Annihilated(Vec<Slot>),

    #[error("bracket output has degree {found}, expected {expected}")]
    DegreeMismatch { expected: i32, found: i32 },

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("bracket of arity {expected} applied to {found} arguments")]
    ArityMismatch { expected: usize, found: usize },

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate bound: the product of norms must be positive (got {0})")]
    DegenerateBound(f64),

    #[error("operation requires a flat algebra, but the curvature is nonzero")]
    Curved,

    #[error("cohomology in degree {degree} is nonzero (dimension {dimension})")]
    NonzeroCohomology { degree: i32, dimension: usize },

    #[error("base point is not a Maurer-Cartan element")]
    BaseNotMaurerCartan,

    #[error("prefix is not a deformation: derivative of order {order} of the Maurer-Cartan curve is nonzero")]
    NotDeformation { order: usize },

    #[error("first-order term is not a cocycle of the twisted differential")]
    NotCocycle,

    #[error("series diverges: residual {residual:e} after {order} terms")]
    Divergent { order: usize, residual: f64 },

    #[error("polynomial degree budget exceeded: {0}")]
    DegreeBudget(String),

    #[error("structure is not a Lie bracket: the Jacobiator is nonzero")]
    NotLie,

    #[error("outside perturbation neighbourhood: Neumann quantity {0:.3e} >= 1")]
    OutsideNeighbourhood(f64),

    #[error("parse error: {0}")]
    Parse(String),
}
