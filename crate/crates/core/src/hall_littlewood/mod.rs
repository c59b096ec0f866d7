//! Hall-Littlewood polynomials over integer signatures, evaluated exactly through the
//! branching rule, and the corner laws and moment predictions built from them.

mod chains;
mod corners;
mod eval;
mod haar;
mod moments;
mod poly;

pub use chains::{enumerate_chains, psi, signatures_below, InterlacingChain};
pub use corners::{
    corner_distribution, joint_corner_distribution, kth_corner_distribution, CornerChain,
    DistributionEntry, SignatureDistribution,
};
pub use eval::{
    geometric_points, hl_p_eval, hl_p_poly, hl_p_symmetrized_oracle, hl_skew_eval, hl_skew_poly,
    principal_specialization, v_lambda, Variable,
};
pub use haar::{
    b_lambda, cauchy_kernel, haar_corner_increment_mean, haar_corner_increment_pgf,
    haar_corner_lln, hl_haar_corner_measure, hl_q_eval, QConvention, TruncatedDistribution,
    MAX_CUTOFF,
};
pub use moments::{
    bidiagonal_l, corner_weight_covariance, corner_weight_pgf, exact_determinant,
    expected_corner_weight, expected_corner_weight_direct, law_of_spec, leading_principal_minors,
    lln_prediction, verify_corner_inequality, CornerCovariance, CornerInequalityReport,
};
pub use poly::{rational, rational_pow, ExactScalar, UniPoly};
