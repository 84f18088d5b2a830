//! Piecewise-linear interpolants as small neural networks.
//!
//! The central move: a function sampled at knots has a chord interpolant,
//! and that interpolant is exactly the forward pass of a one-hidden-layer
//! network whose units switch on one interval each. This crate builds those
//! networks ([`compile_scalar`], [`compile_composite`],
//! [`compile_multivariate`]), evaluates and transforms them ([`forward`],
//! [`collapse_linear`], [`permute_layer`], [`split_first_type`]), counts the
//! weight assignments that realize the same function ([`count_symmetric`],
//! [`count_composed_decomposed`]), and walks back from weights to the
//! interpolant they encode ([`invert_hard_layer`], [`reconstruct_function`]).
//! A small deterministic trainer ([`train`]) covers the gradient-descent
//! side of the story.

pub mod activation;
mod error;
pub mod rng;

mod compile;
mod eval;
mod inversion;
mod network;
mod partition;
mod piecewise;
mod solutions;
mod trainer;

pub use activation::{
    convert_unit, relu_pair_from_hard, unit_center, unit_derivative, unit_eval, ActivationKind,
    ActivationUnit, CenterProfile,
};
pub use compile::{
    compile_composite, compile_multivariate, compile_scalar, compile_scalar_mode, linearize_grid,
    weight_matrices, LinearizerWeights, SmoothMode, WeightMatrices,
};
pub use error::{Error, Result};
pub use eval::{
    classify, collapse_linear, conv_to_dense, forward, forward_trace, linear_path_count,
    Classification, LayerTrace, NetKind, VarScope,
};
pub use inversion::{invert_hard_layer, reconstruct_function, UnitDescription};
pub use network::{CombineMode, Layer, LayerInput, LayerSpec, NetworkSpec, WeightMat};
pub use partition::{interpolant_eval, uniform_partition, Partition};
pub use piecewise::PiecewiseLinear;
pub use solutions::{
    count_composed_decomposed, count_symmetric, identity_cover, permute_layer, solve_cover,
    split_first_type, verify_equivalent, CoverAssign, EquivalenceReport,
};
pub use trainer::{train, Dataset, TrainConfig, Trained};
