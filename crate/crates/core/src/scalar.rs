//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Conversion from an index or count.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn to_f(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Gamma function at a half-integer argument `k/2`, `k >= 1`.
pub fn gamma_half<T: Real>(k: usize) -> T {
    assert!(k >= 1, "gamma_half needs a positive argument");
    // Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(x + 1) = x Gamma(x).
    let (mut value, mut twice_x) = if k.is_multiple_of(2) {
        (T::one(), 2usize)
    } else {
        (T::PI().sqrt(), 1usize)
    };
    while twice_x < k {
        value *= T::of(twice_x) / T::lit(2.0);
        twice_x += 2;
    }
    value
}

/// Area of the unit sphere `S^{d}` sitting in `R^{d+1}`: `2 pi^{(d+1)/2} / Gamma((d+1)/2)`.
pub fn sphere_area<T: Real>(d: usize) -> T {
    let half = T::lit(0.5) * T::of(d + 1);
    T::lit(2.0) * T::PI().powf(half) / gamma_half::<T>(d + 1)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume<T: Real>(n: usize) -> T {
    sphere_area::<T>(n - 1) / T::of(n)
}

/// Multiplicity of the eigenvalue `l(l+n-2)` of the round sphere `S^{n-1}`.
pub fn harmonic_multiplicity(n: usize, l: usize) -> usize {
    assert!(n >= 2);
    if n == 2 {
        return if l == 0 { 1 } else { 2 };
    }
    // dim of degree-l harmonics in n variables: C(l+n-1, n-1) - C(l+n-3, n-1)
    let c = |a: usize, b: usize| -> usize {
        if b > a {
            return 0;
        }
        let b = b.min(a - b);
        (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
    };
    if l < 2 {
        return c(l + n - 1, n - 1);
    }
    c(l + n - 1, n - 1) - c(l + n - 3, n - 1)
}

/// `l(l + n - 2)`, the `l`-th distinct eigenvalue of `S^{n-1}`.
pub fn angular_eigenvalue<T: Real>(n: usize, l: usize) -> T {
    T::of(l) * T::of(l + n - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area::<f64>(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area::<f64>(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area::<f64>(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((ball_volume::<f64>(2) - PI).abs() < 1e-14);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_half::<f64>(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half::<f64>(3) - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half::<f64>(6), 2.0);
    }

    #[test]
    fn multiplicities() {
        // S^1: 1, 2, 2, ...
        assert_eq!(harmonic_multiplicity(2, 0), 1);
        assert_eq!(harmonic_multiplicity(2, 5), 2);
        // S^2: 2l + 1
        for l in 0..10 {
            assert_eq!(harmonic_multiplicity(3, l), 2 * l + 1);
        }
        // S^3: (l + 1)^2
        for l in 0..10 {
            assert_eq!(harmonic_multiplicity(4, l), (l + 1) * (l + 1));
        }
    }
}
