use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use nalgebra::{DMatrix, Dyn, LU};
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate.
///
/// Everything numerical is written against `num_traits::Float`. Dense factorizations
/// are delegated to nalgebra through the concrete `f32`/`f64` implementations, which
/// keeps nalgebra's own method names out of generic code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
    + rustfft::FftNum
    + nalgebra::Scalar
{
    /// Opaque LU factorization of a square dense matrix.
    type Lu: Send + Sync;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn lu_factor(matrix: DMatrix<Self>) -> Self::Lu;

    /// Solves with a previously computed factorization; `None` if the factor is singular.
    fn lu_solve(lu: &Self::Lu, rhs: &[Self]) -> Option<Vec<Self>>;

    /// Singular values of a symmetric matrix, i.e. the absolute eigenvalues, unsorted.
    fn symmetric_singular_values(matrix: DMatrix<Self>) -> Vec<Self>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            type Lu = LU<$t, Dyn, Dyn>;

            fn lu_factor(matrix: DMatrix<$t>) -> Self::Lu {
                matrix.lu()
            }

            fn lu_solve(lu: &Self::Lu, rhs: &[$t]) -> Option<Vec<$t>> {
                let b = nalgebra::DVector::from_column_slice(rhs);
                lu.solve(&b).map(|x| x.as_slice().to_vec())
            }

            fn symmetric_singular_values(matrix: DMatrix<$t>) -> Vec<$t> {
                matrix
                    .symmetric_eigenvalues()
                    .iter()
                    .map(|v| v.abs())
                    .collect()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
