//! Thin wrappers over the transcendental functions so the crate builds both
//! with the standard library and against `libm` in `no_std` mode.

#![allow(dead_code)]

macro_rules! wrap {
    ($name:ident) => {
        #[cfg(feature = "std")]
        #[inline]
        pub fn $name(x: f64) -> f64 {
            x.$name()
        }
        #[cfg(not(feature = "std"))]
        #[inline]
        pub fn $name(x: f64) -> f64 {
            libm::$name(x)
        }
    };
}

wrap!(sqrt);
wrap!(exp);
wrap!(sin);
wrap!(cos);
wrap!(sinh);
wrap!(cosh);
wrap!(tanh);
wrap!(trunc);

/// Fractional part with the sign of `x`.
#[inline]
pub fn fract(x: f64) -> f64 {
    x - trunc(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn ln(x: f64) -> f64 {
    x.ln()
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[cfg(feature = "std")]
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(not(feature = "std"))]
#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Integer power by repeated multiplication, exact for small exponents.
pub fn powi(x: f64, n: i32) -> f64 {
    let mut acc = 1.0;
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}
