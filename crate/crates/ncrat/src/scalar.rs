//! Scalar abstraction for the floating-point side of the library.
//!
//! All numerical modules are generic over [`Scalar`], which is any real
//! field nalgebra can factor (f32 or f64 in practice). Exact integer
//! arithmetic lives in [`crate::fock`] and does not go through this trait.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar: f32 or f64.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T: RealField + Copy + FromPrimitive + ToPrimitive> Scalar for T {}

/// Converts an f64 constant (tolerances, literals) into the working scalar.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// Converts the working scalar back to f64 for reporting.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().expect("scalar must convert to f64")
}
