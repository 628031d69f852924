//! Potential functions: leading order, Fano closed form with bulk, gapped
//! tails, and Laurent calculus at Novikov points.

mod bulk;
mod calculus;
mod function;

pub use bulk::{BulkDeformation, BulkEntry};
pub use calculus::{
    certified_gradient, det_series, euler_check, evaluate, gradient_residual, hessian, hessian_matrix, second_log_derivative, tight_gradient, EulerCheck, HessianData,
};
pub use function::{
    fano_bulk_potential, leading_potential, log_derivative, with_gapped_tail, GappedTerm, PotentialFunction,
};
