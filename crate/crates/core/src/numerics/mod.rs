//! Dense complex linear algebra: Hermitian and generalized dominant
//! eigenpairs and dominant left singular vectors.

mod eigen;
mod matrix;

pub use eigen::{
    cholesky, dominant_eigpair, dominant_left_singular, generalized_dominant_eigpair,
    hermitian_eigen, rayleigh_quotient, EigenPair, HermitianEigen, HERMITIAN_TOL, MAX_CONDITION,
    RESIDUAL_TOL,
};
pub use matrix::{dot, dot_u, ComplexMatrix, ComplexVector};
