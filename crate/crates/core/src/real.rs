//! Scalar abstraction so the physics and analysis code can run at any
//! floating-point precision. Everything downstream is generic over [`Real`];
//! the crate root exports `f64` aliases for ordinary use.

use std::fmt::{Debug, Display};

/// Floating-point scalar usable throughout the simulator.
///
/// Bundles the `num-traits` capabilities the math actually needs plus a
/// couple of constructors so numeric literals stay readable at call sites.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal. Panics on non-finite input,
    /// which only happens on programmer error.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    /// Lossy conversion back to `f64` (exact for `f64`, widening for `f32`).
    fn f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("real scalar converts to f64")
    }

    fn half(self) -> Self {
        self / Self::of(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_roundtrip_is_exact_for_f64() {
        let x = f64::of(0.310);
        assert_eq!(x, 0.310);
        assert_eq!(x.f64(), 0.310);
    }

    #[test]
    fn f32_conversion_is_close() {
        let x = f32::of(9.81);
        assert!((x.f64() - 9.81).abs() < 1e-6);
    }
}
