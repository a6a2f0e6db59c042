//! Floating-point scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. Complex matrices are built on
//! `num_complex::Complex<T>`.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by the library: `f32` or `f64`.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Residual tolerance for closure, membership and Hermiticity checks.
    fn closure_tol() -> Self;

    /// Eigenvalues with magnitude at or below this are treated as zero by
    /// the spectral sign.
    fn sign_tol() -> Self;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f64 {
    fn closure_tol() -> Self {
        1e-10
    }

    fn sign_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn closure_tol() -> Self {
        2e-4
    }

    fn sign_tol() -> Self {
        1e-6
    }
}
