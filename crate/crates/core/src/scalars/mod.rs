//! Exact coefficient arithmetic: rational functions in q over the 8th
//! cyclotomic rationals, q-combinatorial constants, and the Pfaffian.

mod cyclo;
mod pfaffian;
mod poly;
pub mod qseries;
mod scalar;

pub use cyclo::Cyclo;
pub use pfaffian::{determinant, pfaffian};
pub use poly::Poly;
pub use qseries::{
    eta, expand_poch_ratio, gamma_coeff, poch_finite, q_int, verify_x_identity, x_coeff, Half,
    QSeriesExpansion, XIdentityReport,
};
pub use scalar::Scalar;

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("X_{{k,l}} has a singular denominator at k={k}, l={l} (k+l=0)")]
    SingularXCoeff { k: Half, l: Half },
    #[error("Pfaffian requires even dimension, got {size}")]
    OddPfaffian { size: usize },
    #[error("Pfaffian input is not square")]
    NotSquare,
    #[error("matrix is not antisymmetric at ({row},{col})")]
    NotAntisymmetric { row: usize, col: usize },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_is_eighth_root() {
        let z = Scalar::zeta_pow(1);
        assert_eq!(z.pow(4), -Scalar::one());
        assert_eq!(z.pow(8), Scalar::one());
        // ζ² = (−1)^{1/2}
        assert_eq!(Scalar::zeta_pow(2).pow(2), -Scalar::one());
    }

    #[test]
    fn field_inverse() {
        let a = Scalar::q_pow(3) + Scalar::zeta_pow(1) * Scalar::q_pow(-2) - Scalar::from_int(7);
        let b = &a * &a.inv();
        assert!(b.is_one());
    }

    #[test]
    fn canonical_equality() {
        // (q^2-1)/(q-1) reduces to q+1
        let lhs = (Scalar::q_pow(2) - Scalar::one()) / (Scalar::q_pow(1) - Scalar::one());
        assert_eq!(lhs, Scalar::q_pow(1) + Scalar::one());
    }

    #[test]
    fn numeric_eval_consistency() {
        let a = (Scalar::q_pow(2) - Scalar::one()) / (Scalar::q_pow(1) - Scalar::one());
        let q = 0.6;
        let direct = (q * q - 1.0) / (q - 1.0);
        assert!((a.eval(q).re - direct).abs() < 1e-12);
        assert!(a.eval(q).im.abs() < 1e-12);
    }
}
