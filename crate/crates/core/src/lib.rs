//! Deformation calculus for finite-dimensional strict L∞-algebras.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod combinatorics;
pub mod error;
pub mod graded;
pub mod instances;
pub mod lie;
pub mod matrix;
pub mod obstruction;
pub mod scalar;

pub use algebra::{
    cohomology_dim, differential_blocks, differential_matrix, enumerate_unshuffles,
    homotopy_operators, jacobiator, mc_eval, twist, twisted_eval, verify_linfty, HomotopyPair,
    JacobiCheck, LInftyAlgebra, LInftyReport,
};
pub use error::{Error, Result};
pub use graded::{
    canonicalize, eval_bracket, koszul_sign, Bracket, Canonical, Element, GradedSpace, Slot,
};
pub use lie::{Cochain, LieStructure};
pub use matrix::{Matrix, RationalMatrix};
pub use obstruction::{
    alpha_bound, appendix_b_check, certify, coefficient_bounds, extend_formal, extend_formal_from,
    lemma_dmc2_check, obstruction, psi, sum_series, taylor_mc, taylor_mc_substitution,
    verify_cocycle, ConvergenceCertificate, FormalSeries, Norm, ObstructionReport, Obstructions,
    Reading,
};
pub use scalar::{format_rational, int, parse_rational, ratio, Poly, Rational, Scalar};
