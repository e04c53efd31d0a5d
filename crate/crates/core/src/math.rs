//! Thin wrappers over `libm` so the numerical code reads like ordinary
//! float arithmetic in both `std` and `no_std` builds.

use crate::error::{Error, Result};

pub(crate) const PI: f64 = core::f64::consts::PI;
pub(crate) const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}
#[inline]
pub(crate) fn exp2(x: f64) -> f64 {
    libm::exp2(x)
}
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}
#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub(crate) fn sincos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}
#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}
#[inline]
pub(crate) fn tgamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `2^e`, refusing exponents whose result is not a normal finite float.
pub(crate) fn checked_exp2(e: f64) -> Result<f64> {
    if !e.is_finite() || e.abs() > 1000.0 {
        return Err(Error::Overflow { exponent: e });
    }
    Ok(exp2(e))
}

/// Binomial coefficient as a float (small arguments only).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Falling product `x (x-1) ... (x-q+1)`.
pub(crate) fn falling(x: f64, q: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..q {
        r *= x - i as f64;
    }
    r
}
