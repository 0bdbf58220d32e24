//! Finite-difference oracles.
//!
//! Everything in this module recomputes geometry from scalar samples alone,
//! so agreement with `hgauss-core` is a genuine cross check and not a
//! tautology. The graph oracles sample only the expression value `f(x, y)`;
//! first derivatives use 4th-order five-point stencils, second derivatives
//! the 4th-order five-point stencil, and the tension field a three-level
//! nesting (derivatives of `f`, then of the map components, then the outer
//! divergence) with steps chosen so truncation and roundoff both stay well
//! under the advertised tolerances.
//!
//! The oracles panic if a sample lands outside the expression domain; the
//! suites only feed them functions that are smooth on a neighborhood of the
//! sampling box.

use hgauss_core::expr::{eval_scalar, Jet3};
use hgauss_core::gans::{christoffel_at, metric_at, Christoffel2, GansPoint};
use hgauss_core::gaussmap::TensionValue;
use hgauss_core::heis::{self, FrameVector, HeisIsometry, HeisPoint};
use hgauss_core::surface::{graph_point, unit_normal, SurfaceSpec};

/// Step for derivatives of the scalar `f` itself.
pub const H_INNER: f64 = 1e-3;
/// Step for derivatives of quantities that are themselves finite
/// differences (map components, fluxes, curvatures).
pub const H_OUTER: f64 = 5e-3;
/// Default step for [`fd_jet3`]; callers with third derivatives in mind
/// should widen it to about 1e-3.
pub const H_JET: f64 = 1e-4;

/// First derivative, 4th order: (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h.
pub fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Second derivative, 4th order:
/// (-f(x+2h) + 16f(x+h) - 30f(x) + 16f(x-h) - f(x-2h)) / 12h^2.
pub fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Full order-3 jet from 2nd-order central stencils at step `h`.
///
/// Third-derivative stencils divide by `h^3`, so `h` must not be taken tiny:
/// at `h = 1e-3` their roundoff floor is about `1e-6 * |f|`, while the
/// default `h = 1e-4` is only good through order two.
pub fn fd_jet3(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> Jet3 {
    let v = f(x, y);
    let fpo = f(x + h, y);
    let fmo = f(x - h, y);
    let fop = f(x, y + h);
    let fom = f(x, y - h);
    let fpp = f(x + h, y + h);
    let fpm = f(x + h, y - h);
    let fmp = f(x - h, y + h);
    let fmm = f(x - h, y - h);
    let h2 = h * h;
    let h3 = h2 * h;
    Jet3 {
        v,
        dx: (fpo - fmo) / (2.0 * h),
        dy: (fop - fom) / (2.0 * h),
        dxx: (fpo - 2.0 * v + fmo) / h2,
        dxy: (fpp - fpm - fmp + fmm) / (4.0 * h2),
        dyy: (fop - 2.0 * v + fom) / h2,
        dxxx: (f(x + 2.0 * h, y) - 2.0 * fpo + 2.0 * fmo - f(x - 2.0 * h, y)) / (2.0 * h3),
        dxxy: (fpp - 2.0 * fop + fmp - fpm + 2.0 * fom - fmm) / (2.0 * h3),
        dxyy: (fpp - 2.0 * fpo + fpm - fmp + 2.0 * fmo - fmm) / (2.0 * h3),
        dyyy: (f(x, y + 2.0 * h) - 2.0 * fop + 2.0 * fom - f(x, y - 2.0 * h)) / (2.0 * h3),
    }
}

/// Richardson combination `(4 J(h/2) - J(h)) / 3` of [`fd_jet3`], killing
/// the leading `h^2` error term entrywise.
pub fn fd_jet3_richardson(f: impl Fn(f64, f64) -> f64 + Copy, x: f64, y: f64, h: f64) -> Jet3 {
    let a = fd_jet3(f, x, y, h).entries();
    let b = fd_jet3(f, x, y, 0.5 * h).entries();
    let mut r = [0.0; 10];
    for i in 0..10 {
        r[i] = (4.0 * b[i] - a[i]) / 3.0;
    }
    Jet3 {
        v: r[0],
        dx: r[1],
        dy: r[2],
        dxx: r[3],
        dxy: r[4],
        dyy: r[5],
        dxxx: r[6],
        dxxy: r[7],
        dxyy: r[8],
        dyyy: r[9],
    }
}

/// Value of the graph function backing `spec`. Panics on non-graph specs
/// and on evaluation errors; see the module docs.
fn graph_value(spec: &SurfaceSpec, x: f64, y: f64) -> f64 {
    match spec {
        SurfaceSpec::Graph { f, params, .. } => {
            eval_scalar(f, x, y, params).expect("oracle sample outside the expression domain")
        }
        _ => panic!("the finite-difference oracle needs a plain graph"),
    }
}

/// `(p, q, w)` at `(x, y)` from first differences of `f` alone.
fn pqw_fd(spec: &SurfaceSpec, x: f64, y: f64) -> (f64, f64, f64) {
    let p = d1(|t| graph_value(spec, t, y), x, H_INNER) + 0.5 * y;
    let q = d1(|t| graph_value(spec, x, t), y, H_INNER) - 0.5 * x;
    (p, q, (1.0 + p * p + q * q).sqrt())
}

/// Mean curvature from finite differences of `f` only.
pub fn mean_curvature_fd(spec: &SurfaceSpec, x: f64, y: f64) -> f64 {
    let (p, q, w) = pqw_fd(spec, x, y);
    let fxx = d2(|t| graph_value(spec, t, y), x, H_INNER);
    let fyy = d2(|t| graph_value(spec, x, t), y, H_INNER);
    let fxy = d1(
        |s| d1(|t| graph_value(spec, t, s), x, H_INNER),
        y,
        H_INNER,
    );
    let r = (1.0 + q * q) * fxx - 2.0 * p * q * fxy + (1.0 + p * p) * fyy;
    r / (2.0 * w * w * w)
}

/// Gauss map components from finite differences, `(-p, -q)`.
fn phi_fd(spec: &SurfaceSpec, x: f64, y: f64) -> [f64; 2] {
    let (p, q, _) = pqw_fd(spec, x, y);
    [-p, -q]
}

/// One flux component `w (g^{i1} d_x phi^a + g^{i2} d_y phi^a)` of the
/// divergence form of the Laplace-Beltrami operator, everything from
/// finite differences.
fn flux_fd(spec: &SurfaceSpec, x: f64, y: f64, i: usize, component: usize) -> f64 {
    let (p, q, w) = pqw_fd(spec, x, y);
    let det = 1.0 + p * p + q * q;
    // Inverse of I = [[1+p^2, pq], [pq, 1+q^2]].
    let inv = [
        [(1.0 + q * q) / det, -p * q / det],
        [-p * q / det, (1.0 + p * p) / det],
    ];
    let a = component - 1;
    let px = d1(|t| phi_fd(spec, t, y)[a], x, H_OUTER);
    let py = d1(|t| phi_fd(spec, x, t)[a], y, H_OUTER);
    w * (inv[i][0] * px + inv[i][1] * py)
}

/// Laplace-Beltrami of the Gauss map component (`component` is 1 or 2)
/// with respect to the induced metric, entirely from finite differences.
pub fn laplace_fd(spec: &SurfaceSpec, x: f64, y: f64, component: usize) -> f64 {
    assert!(component == 1 || component == 2, "component must be 1 or 2");
    let (_, _, w) = pqw_fd(spec, x, y);
    let div = d1(|t| flux_fd(spec, t, y, 0, component), x, H_OUTER)
        + d1(|t| flux_fd(spec, x, t, 1, component), y, H_OUTER);
    div / w
}

/// Tension field of the Gauss map from finite differences: the
/// Laplace-Beltrami part plus the target-connection correction, with the
/// map differential also taken by divided differences.
pub fn tension_fd(spec: &SurfaceSpec, x: f64, y: f64) -> TensionValue {
    let (p, q, _) = pqw_fd(spec, x, y);
    let det = 1.0 + p * p + q * q;
    let inv = [
        [(1.0 + q * q) / det, -p * q / det],
        [-p * q / det, (1.0 + p * p) / det],
    ];
    // Rows are the map components, columns the chart directions.
    let jac = [
        [
            d1(|t| phi_fd(spec, t, y)[0], x, H_OUTER),
            d1(|t| phi_fd(spec, x, t)[0], y, H_OUTER),
        ],
        [
            d1(|t| phi_fd(spec, t, y)[1], x, H_OUTER),
            d1(|t| phi_fd(spec, x, t)[1], y, H_OUTER),
        ],
    ];
    let gamma = christoffel_at(GansPoint::new(-p, -q)).gamma;
    let mut tau = [0.0; 2];
    for a in 0..2 {
        let mut corr = 0.0;
        for b in 0..2 {
            for c in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        corr += gamma[a][b][c] * jac[b][i] * jac[c][j] * inv[i][j];
                    }
                }
            }
        }
        tau[a] = laplace_fd(spec, x, y, a + 1) + corr;
    }
    TensionValue {
        t1: tau[0],
        t2: tau[1],
    }
}

/// Residuals of the tension identity with every ingredient (tension, mean
/// curvature and its gradient, `w` and its gradient) taken from finite
/// differences.
pub fn hg_residual_fd(spec: &SurfaceSpec, x: f64, y: f64) -> (f64, f64) {
    let (p, q, w) = pqw_fd(spec, x, y);
    let hh = mean_curvature_fd(spec, x, y);
    let hx = d1(|t| mean_curvature_fd(spec, t, y), x, H_OUTER);
    let hy = d1(|t| mean_curvature_fd(spec, x, t), y, H_OUTER);
    let wx = d1(|t| pqw_fd(spec, t, y).2, x, H_OUTER);
    let wy = d1(|t| pqw_fd(spec, x, t).2, y, H_OUTER);
    let tau = tension_fd(spec, x, y);
    let r1 = tau.t1 + 2.0 * w * hx - hh * (2.0 * q / w - 4.0 * wx + 4.0 * p * hh * w * w);
    let r2 = tau.t2 + 2.0 * w * hy - hh * (-2.0 * p / w - 4.0 * wy + 4.0 * q * hh * w * w);
    (r1, r2)
}

/// Christoffel symbols of the Gans metric by the textbook formula
/// `G^l_{mn} = h^{ls} (d_m h_{ns} + d_n h_{ms} - d_s h_{mn}) / 2` with the
/// metric derivatives taken by finite differences.
#[allow(clippy::needless_range_loop)]
pub fn gans_christoffel_fd(p: GansPoint, h: f64) -> Christoffel2 {
    let comp = |u: f64, v: f64| {
        let m = metric_at(GansPoint::new(u, v));
        [[m.h11, m.h12], [m.h12, m.h22]]
    };
    // dm[k][i][j] holds d h_{ij} / d x^k.
    let mut dm = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            dm[0][i][j] = d1(|t| comp(t, p.v)[i][j], p.u, h);
            dm[1][i][j] = d1(|t| comp(p.u, t)[i][j], p.v, h);
        }
    }
    let m = metric_at(p);
    let (i11, i12, i22) = m.inverse();
    let inv = [[i11, i12], [i12, i22]];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for l in 0..2 {
        for mm in 0..2 {
            for n in 0..2 {
                let mut s = 0.0;
                for k in 0..2 {
                    s += inv[l][k] * (dm[mm][n][k] + dm[n][mm][k] - dm[k][mm][n]);
                }
                gamma[l][mm][n] = 0.5 * s;
            }
        }
    }
    Christoffel2 { gamma }
}

/// Derivative of the unit normal along the chart direction `v`, one
/// centered stencil per frame component.
pub fn normal_derivative_fd(spec: &SurfaceSpec, x: f64, y: f64, v: [f64; 2], h: f64) -> FrameVector {
    let comp = |t: f64, k: usize| {
        let d = graph_point(spec, x + t * v[0], y + t * v[1]).expect("oracle sample failed");
        let n = unit_normal(&d);
        [n.c1, n.c2, n.c3][k]
    };
    FrameVector::new(
        d1(|t| comp(t, 0), 0.0, h),
        d1(|t| comp(t, 1), 0.0, h),
        d1(|t| comp(t, 2), 0.0, h),
    )
}

/// Differential of a Heisenberg isometry at `p` applied to the coordinate
/// tangent vector `xi`, by centered differences along a straight
/// coordinate line.
pub fn heis_differential_fd(iso: &HeisIsometry, p: HeisPoint, xi: [f64; 3], h: f64) -> [f64; 3] {
    let img = |t: f64, k: usize| {
        let q = HeisPoint::new(p.x + t * xi[0], p.y + t * xi[1], p.z + t * xi[2]);
        let m = heis::apply_isometry(iso, q);
        [m.x, m.y, m.z][k]
    };
    [
        d1(|t| img(t, 0), 0.0, h),
        d1(|t| img(t, 1), 0.0, h),
        d1(|t| img(t, 2), 0.0, h),
    ]
}

/// Differential of a Gans isometry at `p` applied to `xi`, by centered
/// differences.
pub fn gans_differential_fd(
    iso: &hgauss_core::gans::GansIsometry,
    p: GansPoint,
    xi: [f64; 2],
    h: f64,
) -> [f64; 2] {
    let img = |t: f64, k: usize| {
        let q = hgauss_core::gans::apply_isometry(
            iso,
            GansPoint::new(p.u + t * xi[0], p.v + t * xi[1]),
        );
        [q.u, q.v][k]
    };
    [d1(|t| img(t, 0), 0.0, h), d1(|t| img(t, 1), 0.0, h)]
}
