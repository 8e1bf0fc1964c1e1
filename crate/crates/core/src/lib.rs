//! Structural-expectation registration of warped curve samples.
//!
//! Given curves `Y_ij = f(h_i^{-1}(t_ij))` observed under random increasing
//! time warps `h_i`, the structural expectation `f o phi^{-1}` (with `phi`
//! the mean warp) is identifiable and estimable without choosing a
//! reference curve. This crate provides:
//!
//! * [`estimators`]: the inverse and forward structural expectation,
//!   individual warp estimates, plug-in variances and pointwise bands;
//! * [`monotonize`]: the variation-accumulating transform that extends the
//!   estimators to piecewise-monotone curves;
//! * [`smooth`]: Gaussian kernel denoising with matching-criterion
//!   bandwidth selection;
//! * [`simulate`]: a seeded random warping process and warped test bundles;
//! * [`equity`]: score-distribution homogeneity tests and structural
//!   rescaling of scores across examiner groups;
//! * [`io`]: the long-format CSV files used by the command-line tool;
//! * [`validation`]: Monte Carlo experiments checking the estimators.

pub mod curves;
pub mod equity;
pub mod error;
pub mod estimators;
pub mod io;
pub mod monotonize;
pub mod pipeline;
pub mod simulate;
pub mod smooth;
pub mod stats;
pub mod validation;

pub use curves::{
    eval_step_inverse, generalized_inverse, nearest_index, CurveBundle, GeneralizedInverse, Grid,
    MonotoneInterpolant, SampledCurve, StepInverseEstimate,
};
pub use error::{Error, Result};
pub use estimators::{
    band_inverse_se, band_warp, forward_se, inverse_se, oracle_inverse_se_continuous,
    variance_inverse_se, variance_warp, warp_estimate, ConfidenceBand, InverseSEResult,
    Monotonicity, WarpResult,
};
pub use monotonize::{
    change_points, monotonize_bundle, monotonize_discrete, monotonize_exact,
    structural_mean_nonmonotone, warp_estimate_nonmonotone, ChangePointSet, MonotonizedCurve,
};
pub use pipeline::{structural_estimate, StructuralEstimate};
pub use simulate::{make_bundle, simulate_warps, TestFunction, WarpSample, WarpSimConfig};
pub use smooth::{
    kernel_smooth, select_bandwidth, smooth_bundle, BandwidthSelection, MatchingCriterion,
    SmoothingConfig,
};
