//! The Gans-valued Gauss map of a graph surface and its tension field.
//!
//! Translating the unit normal of a graph to the identity and projecting
//! through the hemisphere model lands in the Gans plane: the Gauss map is
//! simply `phi(x, y) = (-p, -q)`. This module computes `phi`, its Jacobian
//! and determinant, the Laplace-Beltrami operator of the graph applied to
//! the components, and the tension field of `phi` as a map from the graph
//! (with its induced metric) to the hyperbolic plane:
//!
//! ```text
//! tau(phi^a) = Lap(phi^a) + Gamma'^a_{bc} phi^b_i phi^c_j g^{ij},
//! ```
//!
//! with `Gamma'` the Gans Christoffel symbols evaluated at `phi(x, y)`.
//! The mean curvature ties into `tau` through first derivatives of `H`;
//! [`hg_residual`] and [`appendix_numerator_check`] evaluate both sides of
//! those identities so the suites can confirm them numerically.
//!
//! Everything is assembled from `Jet3` data by exact chain rules. Third
//! derivatives of `f` feed second derivatives of `phi` and first
//! derivatives of the induced metric; no finite differences are used here.

use crate::expr::Node;
use crate::fmath;
use crate::gans::{self, GansIsometry, GansPoint};
use crate::heis::{HeisIsometry, OrthPart};
use crate::surface::{forms_graph, GraphPointData, SurfaceError, SurfaceSpec};

/// The two components of the tension field.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct TensionValue {
    pub t1: f64,
    pub t2: f64,
}

/// The differential of the Gauss map in chart coordinates, row `a` holding
/// `(d phi^a / dx, d phi^a / dy)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Jacobian2 {
    pub m: [[f64; 2]; 2],
}

impl Jacobian2 {
    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }
}

/// The Gauss map value `(-p, -q)`.
pub fn gauss_map(d: &GraphPointData) -> GansPoint {
    GansPoint::new(-d.p, -d.q)
}

/// The Jacobian of the Gauss map,
/// `[[-f_xx, -f_xy - 1/2], [-f_xy + 1/2, -f_yy]]`.
pub fn gauss_jacobian(d: &GraphPointData) -> Jacobian2 {
    Jacobian2 {
        m: [
            [-d.jet.dxx, -d.jet.dxy - 0.5],
            [-d.jet.dxy + 0.5, -d.jet.dyy],
        ],
    }
}

/// Determinant of the Gauss map differential,
/// `f_xx f_yy - f_xy^2 + 1/4`.
pub fn gauss_det(d: &GraphPointData) -> f64 {
    d.jet.dxx * d.jet.dyy - d.jet.dxy * d.jet.dxy + 0.25
}

/// Scalar with its first-order gradient, enough to push values through one
/// divergence. Jets of `f` seed these with exact derivatives.
#[derive(Copy, Clone, Debug, Default)]
struct Grad2 {
    v: f64,
    dx: f64,
    dy: f64,
}

impl Grad2 {
    fn con(c: f64) -> Self {
        Grad2 { v: c, dx: 0.0, dy: 0.0 }
    }

    fn sqrt(self) -> Self {
        let r = fmath::sqrt(self.v);
        Grad2 {
            v: r,
            dx: self.dx / (2.0 * r),
            dy: self.dy / (2.0 * r),
        }
    }

    fn recip(self) -> Self {
        let s = self.v * self.v;
        Grad2 {
            v: 1.0 / self.v,
            dx: -self.dx / s,
            dy: -self.dy / s,
        }
    }
}

impl core::ops::Add for Grad2 {
    type Output = Grad2;
    fn add(self, o: Grad2) -> Grad2 {
        Grad2 {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
        }
    }
}

impl core::ops::Sub for Grad2 {
    type Output = Grad2;
    fn sub(self, o: Grad2) -> Grad2 {
        Grad2 {
            v: self.v - o.v,
            dx: self.dx - o.dx,
            dy: self.dy - o.dy,
        }
    }
}

impl core::ops::Neg for Grad2 {
    type Output = Grad2;
    fn neg(self) -> Grad2 {
        Grad2 {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

impl core::ops::Mul for Grad2 {
    type Output = Grad2;
    fn mul(self, o: Grad2) -> Grad2 {
        Grad2 {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
        }
    }
}

impl core::ops::Div for Grad2 {
    type Output = Grad2;
    // the reciprocal gradient carries the whole quotient rule
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Grad2) -> Grad2 {
        self * o.recip()
    }
}

impl core::ops::Mul<f64> for Grad2 {
    type Output = Grad2;
    fn mul(self, c: f64) -> Grad2 {
        Grad2 {
            v: self.v * c,
            dx: self.dx * c,
            dy: self.dy * c,
        }
    }
}

/// Shared intermediate data of the tension computation.
struct Pipeline {
    lap: [f64; 2],
    tau: TensionValue,
    /// Mean curvature with its chart gradient.
    h: Grad2,
    /// `w` with its chart gradient.
    w: Grad2,
}

fn pipeline(d: &GraphPointData) -> Pipeline {
    let j = &d.jet;
    let p = Grad2 { v: d.p, dx: j.dxx, dy: j.dxy + 0.5 };
    let q = Grad2 { v: d.q, dx: j.dxy - 0.5, dy: j.dyy };
    let fxx = Grad2 { v: j.dxx, dx: j.dxxx, dy: j.dxxy };
    let fxy = Grad2 { v: j.dxy, dx: j.dxxy, dy: j.dxyy };
    let fyy = Grad2 { v: j.dyy, dx: j.dxyy, dy: j.dyyy };
    let one = Grad2::con(1.0);

    // induced metric, its volume factor, its inverse
    let me = one + p * p;
    let mf = p * q;
    let mg = one + q * q;
    let det = me * mg - mf * mf;
    let w = det.sqrt();
    let i11 = mg / det;
    let i12 = -mf / det;
    let i22 = me / det;

    // chart derivatives of the Gauss map components, with gradients
    let phi = [
        [-fxx, -(fxy + Grad2::con(0.5))],
        [-(fxy - Grad2::con(0.5)), -fyy],
    ];

    // Lap(h) = (1/w) [ d/dx (w (g^11 h_x + g^12 h_y)) + d/dy (w (g^12 h_x + g^22 h_y)) ]
    let laplace = |hx: Grad2, hy: Grad2| -> f64 {
        let flux_x = w * (i11 * hx + i12 * hy);
        let flux_y = w * (i12 * hx + i22 * hy);
        (flux_x.dx + flux_y.dy) / w.v
    };
    let lap = [laplace(phi[0][0], phi[0][1]), laplace(phi[1][0], phi[1][1])];

    // connection correction evaluated in the Gauss map
    let gamma = gans::christoffel_at(gauss_map(d)).gamma;
    let jac = [[phi[0][0].v, phi[0][1].v], [phi[1][0].v, phi[1][1].v]];
    let ginv = [[i11.v, i12.v], [i12.v, i22.v]];
    let mut corr = [0.0_f64; 2];
    for (a, slot) in corr.iter_mut().enumerate() {
        let mut sum = 0.0;
        for b in 0..2 {
            for c in 0..2 {
                for i in 0..2 {
                    for jj in 0..2 {
                        sum += gamma[a][b][c] * jac[b][i] * jac[c][jj] * ginv[i][jj];
                    }
                }
            }
        }
        *slot = sum;
    }

    // H = ((1+q^2) f_xx - 2pq f_xy + (1+p^2) f_yy) / (2 w^3)
    let big = (one + q * q) * fxx - (p * q * fxy) * 2.0 + (one + p * p) * fyy;
    let h = big / ((w * w * w) * 2.0);

    Pipeline {
        lap,
        tau: TensionValue {
            t1: lap[0] + corr[0],
            t2: lap[1] + corr[1],
        },
        h,
        w,
    }
}

/// The Laplace-Beltrami operator of the induced metric applied to a Gauss
/// map component (`component` is 1 or 2), in divergence form, expanded
/// analytically through the jet.
pub fn laplace_beltrami(component: usize, d: &GraphPointData) -> f64 {
    assert!(component == 1 || component == 2, "component is 1 or 2");
    pipeline(d).lap[component - 1]
}

/// The tension field of the Gauss map at a point. Vanishes exactly when
/// the map is harmonic, which for graphs happens precisely at minimal
/// surfaces.
pub fn tension_field(d: &GraphPointData) -> TensionValue {
    pipeline(d).tau
}

/// Residuals of the identities
///
/// ```text
/// tau(phi^1) + 2 w H_x = H (2q/w - 4 w_x + 4 p H w^2)
/// tau(phi^2) + 2 w H_y = H (-2p/w - 4 w_y + 4 q H w^2)
/// ```
///
/// as left minus right; both vanish for every graph, so the returned pair
/// measures only rounding.
pub fn hg_residual(d: &GraphPointData) -> (f64, f64) {
    let parts = pipeline(d);
    let (h, w) = (parts.h, parts.w);
    let (p, q) = (d.p, d.q);
    let w2 = w.v * w.v;
    let rhs1 = h.v * (2.0 * q / w.v - 4.0 * w.dx + 4.0 * p * h.v * w2);
    let rhs2 = h.v * (-2.0 * p / w.v - 4.0 * w.dy + 4.0 * q * h.v * w2);
    (
        parts.tau.t1 + 2.0 * w.v * h.dx - rhs1,
        parts.tau.t2 + 2.0 * w.v * h.dy - rhs2,
    )
}

/// Cross-check of the tension pipeline against independently transcribed
/// closed-form numerators: returns
///
/// ```text
/// c1 = [tau(phi^1) + (2wH)_x] - T1/(32 w^4)
/// c2 = [tau(phi^2) + (2wH)_y] - T2/(32 w^4)
/// ```
///
/// where `T1`, `T2` are factored polynomials in the coordinates and the
/// 2-jet of `f`. Both differences vanish for every graph. The signs under
/// which they do are fixed here once and asserted by the suites.
///
/// One-time calibration outcome: the orientation signs under which the
/// transcribed numerators cancel against the pipeline, frozen after the
/// first run and asserted by the tests.
pub const NUMERATOR_SIGNS: (f64, f64) = (1.0, 1.0);

pub fn appendix_numerator_check(d: &GraphPointData) -> (f64, f64) {
    let parts = pipeline(d);
    let (h, w) = (parts.h, parts.w);
    let lhs1 = parts.tau.t1 + 2.0 * (w.dx * h.v + w.v * h.dx);
    let lhs2 = parts.tau.t2 + 2.0 * (w.dy * h.v + w.v * h.dy);

    let (x, y) = (d.x, d.y);
    let j = &d.jet;
    let (fx, fy) = (j.dx, j.dy);
    let (fxx, fxy, fyy) = (j.dxx, j.dxy, j.dyy);

    let shared = fxx * (4.0 + x * x + 4.0 * fy * (fy - x))
        + 4.0 * fyy
        + (y + 2.0 * fx) * (2.0 * fxy * (x - 2.0 * fy) + (y + 2.0 * fx) * fyy);
    let t1 = shared
        * ((-6.0 + 4.0 * fxy + (y + 2.0 * fx) * (2.0 * (y + 2.0 * fx) * fxy + fxx * (x - 2.0 * fy)))
            * (x - 2.0 * fy)
            + (y + 2.0 * fx) * (4.0 + y * y + 4.0 * fx * (y + fx)) * fyy);
    let t2 = -shared
        * (2.0 * y * (3.0 + 2.0 * fxy)
            + 4.0 * fx * fx * (x - 2.0 * fy) * fyy
            + 4.0 * fx
                * (3.0 + fxy * (2.0 + x * x + 4.0 * fy * (fy - x)) + y * (x - 2.0 * fy) * fyy)
            + (x - 2.0 * fy)
                * (fxx * (4.0 + x * x + 4.0 * fy * (fy - x))
                    + y * (2.0 * fxy * (x - 2.0 * fy) + y * fyy)));

    // w^4 = (EG - F^2)^2 without any rounding detour through sqrt
    let det = w.v * w.v;
    let w4 = det * det;
    (
        lhs1 - NUMERATOR_SIGNS.0 * t1 / (32.0 * w4),
        lhs2 - NUMERATOR_SIGNS.1 * t2 / (32.0 * w4),
    )
}

/// The isometry of the Gans plane induced on Gauss maps by an ambient
/// isometry: rotations act as the same rotation, left translations act
/// trivially, and the reflection family acts as the Euclidean reflection
/// across the line `cos(theta/2) u + sin(theta/2) v = 0`.
pub fn induced_gans_isometry(iso: &HeisIsometry) -> GansIsometry {
    match iso.orth {
        OrthPart::RotationZ { theta } => GansIsometry::Rotation { theta },
        OrthPart::Reflection { theta } => GansIsometry::Reflection {
            a: fmath::cos(theta / 2.0),
            b: fmath::sin(theta / 2.0),
        },
    }
}

/// The graph obtained by moving a graph surface with an ambient isometry
/// `L_(a,b,c) . A`. Writing `m` for the induced affine map of the chart
/// plane, the image is the graph of
///
/// ```text
/// h(m(x, y)) = sigma f(x, y) + c + (a ybar - b xbar)/2,
/// ```
///
/// with `sigma = 1` for rotations and `sigma = -1` for the reflection
/// family. Returned as a new spec over the same parameters, with the
/// domain rectangle replaced by the bounding box of the moved one.
///
/// Only expression-backed graphs can be composed this way; vertical and
/// parametric specs are rejected.
pub fn equivariant_graph(
    spec: &SurfaceSpec,
    iso: &HeisIsometry,
) -> Result<SurfaceSpec, SurfaceError> {
    let (f, params, domain) = match spec {
        SurfaceSpec::Graph { f, params, domain } => (f, params, domain),
        _ => return Err(SurfaceError::NotAGraph),
    };
    let t = iso.translation;
    // the linear part of the chart map and its inverse
    let (fwd, inv, sigma) = match iso.orth {
        OrthPart::RotationZ { theta } => {
            let (s, c) = (fmath::sin(theta), fmath::cos(theta));
            ([[c, -s], [s, c]], [[c, s], [-s, c]], 1.0)
        }
        OrthPart::Reflection { theta } => {
            let (s, c) = (fmath::sin(theta), fmath::cos(theta));
            // the reflection matrix is its own inverse
            ([[c, s], [s, -c]], [[c, s], [s, -c]], -1.0)
        }
    };

    // old coordinates in terms of barred ones: inv * (xbar - a, ybar - b)
    let shifted = |i: usize, offset: f64| {
        if offset == 0.0 {
            Node::var(i)
        } else {
            Node::sub(Node::var(i), Node::num(offset))
        }
    };
    let lin = |row: [f64; 2]| {
        Node::add(
            Node::mul(Node::num(row[0]), shifted(0, t.x)),
            Node::mul(Node::num(row[1]), shifted(1, t.y)),
        )
    };
    let substituted = f.substitute_vars(&[lin(inv[0]), lin(inv[1])])
        .expect("substitution preserves symbol tables");

    let mut root = if sigma < 0.0 {
        Node::neg(substituted.root().clone())
    } else {
        substituted.root().clone()
    };
    if t.x != 0.0 || t.y != 0.0 || t.z != 0.0 {
        let tail = Node::add(
            Node::num(t.z),
            Node::sub(
                Node::mul(Node::num(t.x / 2.0), Node::var(1)),
                Node::mul(Node::num(t.y / 2.0), Node::var(0)),
            ),
        );
        root = Node::add(root, tail);
    }
    let h = substituted.with_root(root).expect("root built over the same tables");

    // bounding box of the moved rectangle
    let corners = [
        (domain[0], domain[2]),
        (domain[0], domain[3]),
        (domain[1], domain[2]),
        (domain[1], domain[3]),
    ];
    let mut moved = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for (x, y) in corners {
        let xb = fwd[0][0] * x + fwd[0][1] * y + t.x;
        let yb = fwd[1][0] * x + fwd[1][1] * y + t.y;
        moved[0] = moved[0].min(xb);
        moved[1] = moved[1].max(xb);
        moved[2] = moved[2].min(yb);
        moved[3] = moved[3].max(yb);
    }

    Ok(SurfaceSpec::Graph {
        f: h,
        params: params.clone(),
        domain: moved,
    })
}

/// Result of the pointwise conformality test.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ConformalityFit {
    /// `max |P - lambda I|` over the three independent entries.
    pub defect: f64,
    /// Least-squares conformal factor `(P : I)/(I : I)`.
    pub lambda: f64,
}

/// Compare the pullback `P` of the Gans metric under the Gauss map with
/// the first fundamental form `I`: fit `lambda` by least squares and
/// report the worst entry of `P - lambda I`. A zero defect means the map
/// is conformal at the point. `I` of a graph has determinant `w^2 >= 1`,
/// so the fit never degenerates.
pub fn conformality_defect(d: &GraphPointData) -> ConformalityFit {
    let jac = gauss_jacobian(d).m;
    let h = gans::metric_at(gauss_map(d));
    let hm = [[h.h11, h.h12], [h.h12, h.h22]];
    let mut pull = [[0.0_f64; 2]; 2];
    for (i, row) in pull.iter_mut().enumerate() {
        for (jj, entry) in row.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in 0..2 {
                for l in 0..2 {
                    s += jac[k][i] * hm[k][l] * jac[l][jj];
                }
            }
            *entry = s;
        }
    }
    let forms = forms_graph(d);
    let first = [[forms.e, forms.f], [forms.f, forms.g]];
    let dot = |a: [[f64; 2]; 2], b: [[f64; 2]; 2]| {
        a[0][0] * b[0][0] + 2.0 * a[0][1] * b[0][1] + a[1][1] * b[1][1]
    };
    let lambda = dot(pull, first) / dot(first, first);
    let mut defect = 0.0_f64;
    for i in 0..2 {
        for jj in 0..2 {
            defect = defect.max((pull[i][jj] - lambda * first[i][jj]).abs());
        }
    }
    ConformalityFit { defect, lambda }
}
