//! The 3-dimensional Heisenberg group.
//!
//! We work in exponential coordinates: the group is all of R^3 with the
//! product
//!
//! ```text
//! (a, b, c) * (x, y, z) = (a + x, b + y, c + z + (a y - b x)/2)
//! ```
//!
//! carrying the left-invariant metric
//!
//! ```text
//! ds^2 = dx^2 + dy^2 + ((y/2) dx - (x/2) dy + dz)^2
//! ```
//!
//! The frame E1 = d/dx - (y/2) d/dz, E2 = d/dy + (x/2) d/dz, E3 = d/dz is
//! left invariant and orthonormal, and the Levi-Civita connection has
//! constant coefficients on it. Every isometry is a left translation
//! composed with a rotation about the z-axis or with a reflection that
//! flips z along with a line reflection of the (x, y) plane.

use core::fmt;

use crate::fmath;

/// A point of the group in exponential coordinates.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct HeisPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HeisPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        HeisPoint { x, y, z }
    }
}

/// A tangent vector expressed on the orthonormal frame E1, E2, E3 at some
/// point. The point is carried by context; the frame being orthonormal,
/// inner products are Euclidean on the coefficients.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct FrameVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl FrameVector {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        FrameVector { c1, c2, c3 }
    }

    pub fn dot(&self, o: &FrameVector) -> f64 {
        self.c1 * o.c1 + self.c2 * o.c2 + self.c3 * o.c3
    }

    pub fn norm(&self) -> f64 {
        fmath::sqrt(self.dot(self))
    }
}

impl core::ops::Add for FrameVector {
    type Output = FrameVector;
    fn add(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

impl core::ops::Sub for FrameVector {
    type Output = FrameVector;
    fn sub(self, o: FrameVector) -> FrameVector {
        FrameVector::new(self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3)
    }
}

impl core::ops::Neg for FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector::new(-self.c1, -self.c2, -self.c3)
    }
}

impl core::ops::Mul<f64> for FrameVector {
    type Output = FrameVector;
    fn mul(self, s: f64) -> FrameVector {
        FrameVector::new(self.c1 * s, self.c2 * s, self.c3 * s)
    }
}

/// The orthogonal part of an isometry fixing the origin.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum OrthPart {
    /// Rotation about the z-axis by `theta`.
    RotationZ { theta: f64 },
    /// Composition of the reflection across the plane z = 0 with the
    /// reflection of the (x, y) plane across the line at angle `theta/2`:
    /// (x, y, z) -> (x cos t + y sin t, x sin t - y cos t, -z) with t = theta.
    Reflection { theta: f64 },
}

/// An isometry `p -> translation * (A p)` with `A` the orthogonal part.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct HeisIsometry {
    pub translation: HeisPoint,
    pub orth: OrthPart,
}

impl fmt::Display for HeisIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.translation;
        match self.orth {
            OrthPart::RotationZ { theta } => {
                write!(f, "L({}, {}, {}) . Rot({})", t.x, t.y, t.z, theta)
            }
            OrthPart::Reflection { theta } => {
                write!(f, "L({}, {}, {}) . Refl({})", t.x, t.y, t.z, theta)
            }
        }
    }
}

/// Group product.
pub fn multiply(p: HeisPoint, q: HeisPoint) -> HeisPoint {
    HeisPoint::new(
        p.x + q.x,
        p.y + q.y,
        p.z + q.z + (p.x * q.y - p.y * q.x) / 2.0,
    )
}

/// Group inverse; the cross term cancels, so it is the coordinate negation.
pub fn inverse(p: HeisPoint) -> HeisPoint {
    HeisPoint::new(-p.x, -p.y, -p.z)
}

/// The left-invariant orthonormal frame at `p`, as rows of coordinate-basis
/// components: E1 = (1, 0, -y/2), E2 = (0, 1, x/2), E3 = (0, 0, 1).
pub fn frame_at(p: HeisPoint) -> [[f64; 3]; 3] {
    [
        [1.0, 0.0, -p.y / 2.0],
        [0.0, 1.0, p.x / 2.0],
        [0.0, 0.0, 1.0],
    ]
}

/// The metric tensor of ds^2 at `p` in coordinates, as a symmetric matrix.
pub fn metric_at(p: HeisPoint) -> [[f64; 3]; 3] {
    let (x, y) = (p.x, p.y);
    [
        [1.0 + y * y / 4.0, -x * y / 4.0, y / 2.0],
        [-x * y / 4.0, 1.0 + x * x / 4.0, -x / 2.0],
        [y / 2.0, -x / 2.0, 1.0],
    ]
}

/// Inner product of coordinate-basis vectors under `metric_at(p)`.
pub fn metric_inner(p: HeisPoint, a: [f64; 3], b: [f64; 3]) -> f64 {
    let g = metric_at(p);
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += g[i][j] * a[i] * b[j];
        }
    }
    s
}

/// The Levi-Civita connection on the frame: `connection_frame(i, j)` is the
/// frame expansion of the derivative of E_j in the direction E_i, with
/// `i, j` in 1..=3. The coefficients are constant on the group.
///
/// Panics if an index is out of range.
pub fn connection_frame(i: usize, j: usize) -> FrameVector {
    assert!((1..=3).contains(&i) && (1..=3).contains(&j), "frame indices are 1, 2, 3");
    match (i, j) {
        (1, 2) => FrameVector::new(0.0, 0.0, 0.5),
        (2, 1) => FrameVector::new(0.0, 0.0, -0.5),
        (1, 3) | (3, 1) => FrameVector::new(0.0, -0.5, 0.0),
        (2, 3) | (3, 2) => FrameVector::new(0.5, 0.0, 0.0),
        _ => FrameVector::default(),
    }
}

/// Covariant derivative of a frame-component field along a surface chart.
///
/// The field assigns to chart coordinates (x, y) a vector with frame
/// components `(c1, c2, c3)`. For a graph, the tangent vector `direction`
/// has frame components whose first two entries are exactly the chart
/// components of the underlying direction, so the coefficient derivatives
/// are taken along `(direction.c1, direction.c2)` in the chart; the
/// connection terms use all three components. Coefficient derivatives are
/// formed by central differences of 4th order.
pub fn covariant_derivative<W>(field: W, at: (f64, f64), direction: FrameVector) -> FrameVector
where
    W: Fn(f64, f64) -> FrameVector,
{
    let h = 1e-3;
    let diff = |g: &dyn Fn(f64) -> FrameVector| {
        let (m2, m1, p1, p2) = (g(-2.0 * h), g(-h), g(h), g(2.0 * h));
        FrameVector::new(
            (-p2.c1 + p1.c1 * 8.0 - m1.c1 * 8.0 + m2.c1) / (12.0 * h),
            (-p2.c2 + p1.c2 * 8.0 - m1.c2 * 8.0 + m2.c2) / (12.0 * h),
            (-p2.c3 + p1.c3 * 8.0 - m1.c3 * 8.0 + m2.c3) / (12.0 * h),
        )
    };
    let (x0, y0) = at;
    let ddx = diff(&|t| field(x0 + t, y0));
    let ddy = diff(&|t| field(x0, y0 + t));
    covariant_derivative_parts(field(x0, y0), ddx, ddy, direction)
}

/// Exact form of [`covariant_derivative`] when the chart partials of the
/// component functions are known analytically.
pub fn covariant_derivative_parts(
    value: FrameVector,
    ddx: FrameVector,
    ddy: FrameVector,
    direction: FrameVector,
) -> FrameVector {
    let mut out = ddx * direction.c1 + ddy * direction.c2;
    let dir = [direction.c1, direction.c2, direction.c3];
    let val = [value.c1, value.c2, value.c3];
    for i in 1..=3 {
        for j in 1..=3 {
            out = out + connection_frame(i, j) * (dir[i - 1] * val[j - 1]);
        }
    }
    out
}

/// Apply an isometry: orthogonal part first, then left translation.
pub fn apply_isometry(iso: &HeisIsometry, p: HeisPoint) -> HeisPoint {
    let rotated = match iso.orth {
        OrthPart::RotationZ { theta } => {
            let (s, c) = (fmath::sin(theta), fmath::cos(theta));
            HeisPoint::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
        }
        OrthPart::Reflection { theta } => {
            let (s, c) = (fmath::sin(theta), fmath::cos(theta));
            HeisPoint::new(c * p.x + s * p.y, s * p.x - c * p.y, -p.z)
        }
    };
    multiply(iso.translation, rotated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn product_fixed_values() {
        let e = HeisPoint::default();
        let p = HeisPoint::new(1.3, -0.4, 2.0);
        assert_eq!(multiply(p, e), p);
        assert_eq!(multiply(e, p), p);
        let q = multiply(HeisPoint::new(1.0, 0.0, 0.0), HeisPoint::new(0.0, 1.0, 0.0));
        assert_eq!(q, HeisPoint::new(1.0, 1.0, 0.5));
    }

    #[test]
    fn inverse_cancels() {
        assert_eq!(inverse(HeisPoint::default()), HeisPoint::default());
        let p = HeisPoint::new(1.0, 2.0, 3.0);
        assert_eq!(multiply(p, inverse(p)), HeisPoint::default());
        assert_eq!(multiply(inverse(p), p), HeisPoint::default());
    }

    #[test]
    fn frame_fixed_values() {
        let f = frame_at(HeisPoint::default());
        assert_eq!(f, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let f = frame_at(HeisPoint::new(0.0, 2.0, 0.0));
        assert_eq!(f[0], [1.0, 0.0, -1.0]);
    }

    #[test]
    fn metric_fixed_values() {
        let g = metric_at(HeisPoint::default());
        assert_eq!(g, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let g = metric_at(HeisPoint::new(0.0, 2.0, 0.0));
        assert_eq!(g[0][0], 2.0);
        assert_eq!(g[0][2], 1.0);
        assert_eq!(g[1][1], 1.0);
        assert_eq!(g[1][2], 0.0);
        assert_eq!(g[0][1], 0.0);
        assert_eq!(g[2][2], 1.0);
    }

    #[test]
    fn connection_table_marked_entries() {
        assert_eq!(connection_frame(1, 2), FrameVector::new(0.0, 0.0, 0.5));
        assert_eq!(connection_frame(1, 3), FrameVector::new(0.0, -0.5, 0.0));
        assert_eq!(connection_frame(2, 2), FrameVector::default());
        assert_eq!(connection_frame(2, 1), FrameVector::new(0.0, 0.0, -0.5));
        assert_eq!(connection_frame(3, 2), FrameVector::new(0.5, 0.0, 0.0));
    }

    #[test]
    fn covariant_derivative_of_constant_vertical_field() {
        let d = covariant_derivative(
            |_, _| FrameVector::new(0.0, 0.0, 1.0),
            (0.3, -0.8),
            FrameVector::new(1.0, 0.0, 0.0),
        );
        assert_abs_diff_eq!(d.c1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.c2, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.c3, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn covariant_derivative_picks_up_coefficient_derivatives() {
        // field x E1 along direction E1 at the origin: coefficient derivative
        // is 1, the connection term x * (nabla_{E1} E1) vanishes there
        let d = covariant_derivative(
            |x, _| FrameVector::new(x, 0.0, 0.0),
            (0.0, 0.0),
            FrameVector::new(1.0, 0.0, 0.0),
        );
        assert_abs_diff_eq!(d.c1, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.c2, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.c3, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn isometry_fixed_images() {
        let rot = HeisIsometry {
            translation: HeisPoint::default(),
            orth: OrthPart::RotationZ {
                theta: core::f64::consts::FRAC_PI_2,
            },
        };
        let q = apply_isometry(&rot, HeisPoint::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(q.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.y, 1.0, epsilon = 1e-15);
        assert_eq!(q.z, 0.0);

        let refl = HeisIsometry {
            translation: HeisPoint::default(),
            orth: OrthPart::Reflection { theta: 0.0 },
        };
        let q = apply_isometry(&refl, HeisPoint::new(0.4, 0.7, -1.1));
        assert_eq!(q, HeisPoint::new(0.4, -0.7, 1.1));
    }

    #[test]
    fn left_translation_of_a_graph_point() {
        // L_(a,b,c)(x, y, f) has third slot c + f + (a y - b x)/2
        let (a, b, c) = (0.7, -0.3, 1.9);
        let (x, y, f) = (1.1, 0.5, -0.25);
        let iso = HeisIsometry {
            translation: HeisPoint::new(a, b, c),
            orth: OrthPart::RotationZ { theta: 0.0 },
        };
        let q = apply_isometry(&iso, HeisPoint::new(x, y, f));
        assert_eq!(q.x, a + x);
        assert_eq!(q.y, b + y);
        assert_abs_diff_eq!(q.z, c + f + (a * y - b * x) / 2.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn product_is_associative(
            ax in -3.0..3.0f64, ay in -3.0..3.0f64, az in -3.0..3.0f64,
            bx in -3.0..3.0f64, by in -3.0..3.0f64, bz in -3.0..3.0f64,
            cx in -3.0..3.0f64, cy in -3.0..3.0f64, cz in -3.0..3.0f64,
        ) {
            let a = HeisPoint::new(ax, ay, az);
            let b = HeisPoint::new(bx, by, bz);
            let c = HeisPoint::new(cx, cy, cz);
            let lhs = multiply(multiply(a, b), c);
            let rhs = multiply(a, multiply(b, c));
            prop_assert!((lhs.x - rhs.x).abs() <= 1e-12);
            prop_assert!((lhs.y - rhs.y).abs() <= 1e-12);
            prop_assert!((lhs.z - rhs.z).abs() <= 1e-12);
        }

        #[test]
        fn frame_is_orthonormal(
            x in -4.0..4.0f64, y in -4.0..4.0f64, z in -4.0..4.0f64,
        ) {
            let p = HeisPoint::new(x, y, z);
            let f = frame_at(p);
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((metric_inner(p, f[i], f[j]) - want).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn metric_determinant_is_one(
            x in -4.0..4.0f64, y in -4.0..4.0f64,
        ) {
            let g = metric_at(HeisPoint::new(x, y, 0.0));
            let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
                - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
                + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
            prop_assert!((det - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn connection_is_metric_compatible(
            x in -1.0..1.0f64, y in -1.0..1.0f64,
            d1 in -1.0..1.0f64, d2 in -1.0..1.0f64, d3 in -1.0..1.0f64,
        ) {
            // two polynomial test fields with analytic chart partials
            let w1 = |x: f64, y: f64| FrameVector::new(x, y, x * y);
            let w1x = |_x: f64, y: f64| FrameVector::new(1.0, 0.0, y);
            let w1y = |x: f64, _y: f64| FrameVector::new(0.0, 1.0, x);
            let w2 = |x: f64, y: f64| FrameVector::new(y, x * x, 1.0);
            let w2x = |x: f64, _y: f64| FrameVector::new(0.0, 2.0 * x, 0.0);
            let w2y = |_x: f64, _y: f64| FrameVector::new(1.0, 0.0, 0.0);

            let dir = FrameVector::new(d1, d2, d3);
            let dv1 = covariant_derivative_parts(w1(x, y), w1x(x, y), w1y(x, y), dir);
            let dv2 = covariant_derivative_parts(w2(x, y), w2x(x, y), w2y(x, y), dir);

            // v<W1, W2> with the chart part of v only, since the components
            // are functions of the chart
            let dot_x = w1x(x, y).dot(&w2(x, y)) + w1(x, y).dot(&w2x(x, y));
            let dot_y = w1y(x, y).dot(&w2(x, y)) + w1(x, y).dot(&w2y(x, y));
            let lhs = d1 * dot_x + d2 * dot_y;
            let rhs = dv1.dot(&w2(x, y)) + w1(x, y).dot(&dv2);
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }

        #[test]
        fn rotation_preserves_the_metric(
            x in -2.0..2.0f64, y in -2.0..2.0f64, z in -2.0..2.0f64,
            vx in -1.0..1.0f64, vy in -1.0..1.0f64, vz in -1.0..1.0f64,
            theta in 0.0..6.3f64,
        ) {
            // rotations are linear, so the differential equals the map
            let p = HeisPoint::new(x, y, z);
            let iso = HeisIsometry {
                translation: HeisPoint::default(),
                orth: OrthPart::RotationZ { theta },
            };
            let q = apply_isometry(&iso, p);
            let (s, c) = (theta.sin(), theta.cos());
            let dv = [c * vx - s * vy, s * vx + c * vy, vz];
            let before = metric_inner(p, [vx, vy, vz], [vx, vy, vz]);
            let after = metric_inner(q, dv, dv);
            prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.abs()));
        }
    }
}
