//! Integral Apollonian circle packings.
//!
//! Exact quadruple algebra, reduction to root quadruples, root counts via
//! class numbers, curvature censuses with congruence analysis, extremal
//! growth of group words, and SVG rendering of bounded packings.
//!
//! All algebra is generic over [`Scalar`], an exact signed integer type
//! (`i64`, `i128` or `BigInt`). The aliases below fix the common choices.

pub mod arith;
pub mod census;
mod error;
pub mod descartes;
pub mod geometry;
pub mod group;
pub mod roots;
pub mod scalar;

pub use census::{census, census_with, Census, CensusOptions, Mode};
pub use descartes::{
    descartes_defect, fourth_circle, is_primitive, metrics, solve_fourth, to_lorentz,
    FourthCircle, LorentzQuadruple, Metrics, Quadruple,
};
pub use error::{Error, Result};
pub use geometry::{
    child_placement, initial_placement, render_svg, Configuration, Placement, RenderOptions,
};
pub use group::{
    apply_generator, apply_word, is_root, reduce, word_matrix, word_to_matrix, ExactElement,
    Generator, GroupElement, ReductionResult, Word,
};
pub use scalar::Scalar;

/// A quadruple of 64-bit curvatures.
pub type Quad = Quadruple<i64>;
/// A quadruple of arbitrary-precision curvatures.
pub type BigQuad = Quadruple<num_bigint::BigInt>;
pub type Element = GroupElement<i64>;
pub type BigElement = GroupElement<num_bigint::BigInt>;
