//! Executable moment-problem toolkit.
//!
//! * [`polyring`]: sparse multivariate polynomials, axis scaling and truncated
//!   formal square roots.
//! * [`norms`]: weighted `l_{p,r}` norms on coefficient sequences, their duals,
//!   the diagonal scaling isometry and evaluation-functional continuity.
//! * [`moments`]: truncated moment sequences, (localized) moment matrices,
//!   positive-semidefiniteness and quadratic-module checks.
//! * [`approx`]: coefficientwise approximation by squares and weighted-norm
//!   approximation of box-nonnegative polynomials by sums of squares.
//! * [`measures`]: atomic measures, their moments and recovery of atomic
//!   representing measures on boxes.
//! * [`io`]: JSON file formats shared with the command-line front end.

pub mod approx;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod moments;
pub mod norms;
pub mod numeric;
pub mod polyring;

pub use approx::{
    box_sos_approx, coefficientwise_report, convergence_sweep, sos_certify, sqrt_square_approx, ApproxEntry,
    ApproxReport, BoxApproximation, BoxSosConfig, Perturbation, SosCertificate, SosConfig,
};
pub use error::{Error, Result};
pub use linalg::SymmetricMatrix;
pub use measures::{
    box_from_weight, moments_of_measure, recover_measure, verify_representation, AtomicMeasure, BoxSpec,
    RecoveredMeasure, RecoveryConfig, RepresentationReport,
};
pub use moments::{
    check_localizing, check_quadratic_module, dual_norm_of_moments, is_psd_functional,
    localized_moment_matrix, moment_matrix, DualNormReport, GeneratorCheck, MomentMatrix, MomentSequence,
    QuadraticModuleReport,
};
pub use norms::{
    conjugate_exponent, dual_weight, eval_sequence_norm, holder_product_norm, is_evaluation_continuous,
    scaling_isometry, weighted_norm, Direction, DualSpec, Exponent, WeightSpec,
};
pub use polyring::{monomial_basis, MultiIndex, Polynomial};
