//! The Gans model of the hyperbolic plane.
//!
//! The model is the full plane (the affine slice z = 1 with the third
//! coordinate dropped), carrying the metric
//!
//! ```text
//! h = ((1 + v^2) du^2 - 2uv du dv + (1 + u^2) dv^2) / (1 + u^2 + v^2)
//! ```
//!
//! It is reached from the upper unit hemisphere by central projection and
//! from the Poincare disk by the diffeomorphism `F`. Isometries are the
//! conjugates of disk automorphisms by `F`; rotations about the origin and
//! reflections across origin lines act as plain Euclidean motions of the
//! (u, v) plane. Geodesics through the origin are straight lines; all
//! others are hyperbola branches, and in suitable coordinates a unit-speed
//! geodesic satisfies u'' = u.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::fmath;

/// A point of the Gans plane.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct GansPoint {
    pub u: f64,
    pub v: f64,
}

impl GansPoint {
    pub fn new(u: f64, v: f64) -> Self {
        GansPoint { u, v }
    }
}

/// Components of a symmetric 2x2 metric tensor.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Metric2 {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl Metric2 {
    /// Determinant `h11*h22 - h12^2`.
    pub fn det(&self) -> f64 {
        self.h11 * self.h22 - self.h12 * self.h12
    }

    /// Inner product of two tangent vectors.
    pub fn inner(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        self.h11 * a[0] * b[0] + self.h12 * (a[0] * b[1] + a[1] * b[0]) + self.h22 * a[1] * b[1]
    }

    /// Squared norm of a tangent vector.
    pub fn norm_sq(&self, a: [f64; 2]) -> f64 {
        self.inner(a, a)
    }

    /// Components of the inverse metric as `(h^11, h^12, h^22)`.
    pub fn inverse(&self) -> (f64, f64, f64) {
        let d = self.det();
        (self.h22 / d, -self.h12 / d, self.h11 / d)
    }
}

/// Christoffel symbols of a 2-dimensional metric, indexed `gamma[k][i][j]`
/// for the coefficient of the k-th coordinate acceleration, symmetric in
/// `(i, j)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Christoffel2 {
    pub gamma: [[[f64; 2]; 2]; 2],
}

/// An isometry of the Gans plane.
///
/// Rotations and reflections fix the origin and act linearly. The general
/// kind carries a disk automorphism `z -> e^{i theta} (z - a)/(1 - conj(a) z)`,
/// optionally precomposed with complex conjugation, transported by the
/// disk diffeomorphism; it reaches every isometry.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum GansIsometry {
    /// Rotation about the origin by `theta`.
    Rotation { theta: f64 },
    /// Euclidean reflection across the line `a*u + b*v = 0`; `(a, b)` must
    /// not both vanish.
    Reflection { a: f64, b: f64 },
    /// Conjugate of a disk automorphism; requires `|a| < 1`.
    General {
        a: Complex64,
        theta: f64,
        conjugate: bool,
    },
}

/// One sample of an integrated geodesic.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: GansPoint,
    /// Coordinate velocity at the sample; unit h-norm up to integration error.
    pub velocity: [f64; 2],
}

/// Domain failures of the model maps.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum GansError {
    /// Input to [`hemisphere_to_plane`] is not on the unit sphere.
    NotOnSphere { norm_sq: f64 },
    /// Input to [`hemisphere_to_plane`] lies on or below the equator.
    NotUpperHemisphere { z: f64 },
    /// Input to [`disk_to_gans`] lies outside the open unit disk.
    OutsideDisk { norm_sq: f64 },
}

impl fmt::Display for GansError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GansError::NotOnSphere { norm_sq } => {
                write!(f, "point is not on the unit sphere (|p|^2 = {})", norm_sq)
            }
            GansError::NotUpperHemisphere { z } => {
                write!(f, "point is not on the open upper hemisphere (z = {})", z)
            }
            GansError::OutsideDisk { norm_sq } => {
                write!(f, "point is outside the open unit disk (|p|^2 = {})", norm_sq)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GansError {}

/// Central projection of the open upper unit hemisphere onto the plane,
/// `(x, y, z) -> (x/z, y/z)`. An isometry onto the Gans model.
pub fn hemisphere_to_plane(x: f64, y: f64, z: f64) -> Result<GansPoint, GansError> {
    let norm_sq = x * x + y * y + z * z;
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(GansError::NotOnSphere { norm_sq });
    }
    if z <= 0.0 {
        return Err(GansError::NotUpperHemisphere { z });
    }
    Ok(GansPoint::new(x / z, y / z))
}

/// The diffeomorphism from the Poincare disk onto the Gans plane,
/// `F(x, y) = (2x, 2y)/(1 - x^2 - y^2)`.
pub fn disk_to_gans(x: f64, y: f64) -> Result<GansPoint, GansError> {
    let norm_sq = x * x + y * y;
    if norm_sq >= 1.0 {
        return Err(GansError::OutsideDisk { norm_sq });
    }
    let s = 2.0 / (1.0 - norm_sq);
    Ok(GansPoint::new(s * x, s * y))
}

/// Inverse of [`disk_to_gans`]: `(u, v) -> (u, v)/(1 + sqrt(1 + u^2 + v^2))`.
/// Total on the plane; the image lies in the open unit disk.
pub fn gans_to_disk(p: GansPoint) -> (f64, f64) {
    let s = 1.0 + fmath::sqrt(1.0 + p.u * p.u + p.v * p.v);
    (p.u / s, p.v / s)
}

/// The Gans metric at `p`.
pub fn metric_at(p: GansPoint) -> Metric2 {
    let (u, v) = (p.u, p.v);
    let d = 1.0 + u * u + v * v;
    Metric2 {
        h11: (1.0 + v * v) / d,
        h12: -u * v / d,
        h22: (1.0 + u * u) / d,
    }
}

/// The Christoffel symbols of the Gans metric at `p`.
pub fn christoffel_at(p: GansPoint) -> Christoffel2 {
    let (u, v) = (p.u, p.v);
    let d = 1.0 + u * u + v * v;
    let g111 = -u * (v * v + 1.0) / d;
    let g112 = u * u * v / d;
    let g122 = -(u * u * u + u) / d;
    let g211 = -(v * v * v + v) / d;
    let g212 = u * v * v / d;
    let g222 = -(u * u + 1.0) * v / d;
    Christoffel2 {
        gamma: [[[g111, g112], [g112, g122]], [[g211, g212], [g212, g222]]],
    }
}

/// Integrate the geodesic equation from `start` with initial `velocity`
/// (rescaled internally to unit h-norm), using the classical 4th-order
/// one-step method with the given step size. The last step is shortened to
/// land exactly on `t_max`. Samples include both endpoints.
///
/// Panics if `step` or `t_max` is not positive or the velocity is zero or
/// not finite.
pub fn geodesic(start: GansPoint, velocity: [f64; 2], t_max: f64, step: f64) -> Vec<GeodesicSample> {
    assert!(step > 0.0 && t_max > 0.0, "step and t_max must be positive");
    let speed_sq = metric_at(start).norm_sq(velocity);
    assert!(
        speed_sq > 0.0 && speed_sq.is_finite(),
        "initial velocity must be nonzero and finite"
    );
    let scale = 1.0 / fmath::sqrt(speed_sq);
    let mut state = [start.u, start.v, velocity[0] * scale, velocity[1] * scale];

    fn rhs(s: [f64; 4]) -> [f64; 4] {
        let gamma = christoffel_at(GansPoint::new(s[0], s[1])).gamma;
        let w = [s[2], s[3]];
        let mut acc = [0.0_f64; 2];
        for k in 0..2 {
            let mut sum = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    sum += gamma[k][i][j] * w[i] * w[j];
                }
            }
            acc[k] = -sum;
        }
        [s[2], s[3], acc[0], acc[1]]
    }

    fn rk4_step(s: [f64; 4], h: f64) -> [f64; 4] {
        let add = |a: [f64; 4], b: [f64; 4], c: f64| {
            [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2], a[3] + c * b[3]]
        };
        let k1 = rhs(s);
        let k2 = rhs(add(s, k1, h / 2.0));
        let k3 = rhs(add(s, k2, h / 2.0));
        let k4 = rhs(add(s, k3, h));
        let mut out = s;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    let mut out = Vec::new();
    let mut t = 0.0;
    out.push(GeodesicSample {
        t,
        point: GansPoint::new(state[0], state[1]),
        velocity: [state[2], state[3]],
    });
    while t < t_max {
        let h = step.min(t_max - t);
        state = rk4_step(state, h);
        t += h;
        out.push(GeodesicSample {
            t,
            point: GansPoint::new(state[0], state[1]),
            velocity: [state[2], state[3]],
        });
        if h < step {
            break;
        }
    }
    out
}

/// Apply an isometry to a point.
pub fn apply_isometry(iso: &GansIsometry, p: GansPoint) -> GansPoint {
    match *iso {
        GansIsometry::Rotation { theta } => {
            let (s, c) = (fmath::sin(theta), fmath::cos(theta));
            GansPoint::new(c * p.u - s * p.v, s * p.u + c * p.v)
        }
        GansIsometry::Reflection { a, b } => {
            let n2 = a * a + b * b;
            debug_assert!(n2 > 0.0, "reflection line normal must be nonzero");
            // reflection across the line a*u + b*v = 0 with normal (a, b)
            let k = 2.0 * (a * p.u + b * p.v) / n2;
            GansPoint::new(p.u - k * a, p.v - k * b)
        }
        GansIsometry::General { a, theta, conjugate } => {
            debug_assert!(a.norm_sqr() < 1.0, "Mobius parameter must lie in the disk");
            let (x, y) = gans_to_disk(p);
            let mut z = Complex64::new(x, y);
            if conjugate {
                z = z.conj();
            }
            let phase = Complex64::new(fmath::cos(theta), fmath::sin(theta));
            let w = phase * (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z);
            disk_to_gans(w.re, w.im).expect("disk automorphisms preserve the disk")
        }
    }
}
