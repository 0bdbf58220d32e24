//! Surfaces in the Heisenberg group and their curvature data.
//!
//! Two kinds of immersed surfaces are covered:
//!
//! * graphs over the exp-chart xy-plane, `X(x, y) = (x, y, f(x, y))`, with
//!   `f` given as an expression or, for one catalog entry, parametrically;
//! * vertical ruled surfaces `X(t, s) = (t, a(t), s)` over a profile curve
//!   in the xy-plane.
//!
//! For a graph the tangent frame is `X_x = E1 + p E3`, `X_y = E2 + q E3`
//! with `p = f_x + y/2` and `q = f_y - x/2`, and the upward unit normal is
//! `(-p/w, -q/w, 1/w)` on the left-invariant frame, `w^2 = 1 + p^2 + q^2`.
//! All second-order data (fundamental forms, mean curvature, Weingarten
//! operator) comes out of jets of `f`; nothing here differentiates
//! numerically.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{eval_jet3, EvalError, Expression, Jet3};
use crate::fmath;
use crate::heis::{covariant_derivative_parts, FrameVector};

/// Description of a surface, ready for pointwise evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceSpec {
    /// Graph `z = f(x, y)` over the rectangle `domain = [x0, x1, y0, y1]`.
    Graph {
        f: Expression,
        params: BTreeMap<String, f64>,
        domain: [f64; 4],
    },
    /// Vertical surface `X(t, s) = (t, a(t), s)` with `t` in `t_range`.
    VerticalRuled {
        a: Expression,
        params: BTreeMap<String, f64>,
        t_range: [f64; 2],
    },
    /// Graph `z = x * H(y)` where `H` is known only through a parameter:
    /// `H(y(s)) = h(s)`. Derivatives in `y` come from the chain rule
    /// through `y(s)`, so no numeric inversion of `y` is ever needed.
    ParamGraph {
        h: Expression,
        y: Expression,
        params: BTreeMap<String, f64>,
        s_range: [f64; 2],
        x_range: [f64; 2],
    },
}

impl SurfaceSpec {
    /// Bound parameter values of the spec.
    pub fn params(&self) -> &BTreeMap<String, f64> {
        match self {
            SurfaceSpec::Graph { params, .. }
            | SurfaceSpec::VerticalRuled { params, .. }
            | SurfaceSpec::ParamGraph { params, .. } => params,
        }
    }

    /// True for the two graph-like variants.
    pub fn is_graph(&self) -> bool {
        !matches!(self, SurfaceSpec::VerticalRuled { .. })
    }
}

/// Everything first-order and higher about a graph at one point: the chart
/// coordinates, the jet of `f`, and the derived quantities `p`, `q`, `w`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GraphPointData {
    pub x: f64,
    pub y: f64,
    /// Jet of `f` at `(x, y)` through order three.
    pub jet: Jet3,
    /// `f_x + y/2`.
    pub p: f64,
    /// `f_y - x/2`.
    pub q: f64,
    /// `sqrt(1 + p^2 + q^2)`, at least 1.
    pub w: f64,
}

/// Coefficients of the first and second fundamental forms.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    /// `e*g - f^2`, positive for an immersion.
    pub det_i: f64,
}

/// Failures of surface evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceError {
    /// Expression evaluation failed (domain error or unbound parameter).
    Eval(EvalError),
    /// A graph-only operation was applied to a vertical surface.
    NotAGraph,
    /// The first fundamental form is not positive definite.
    DegenerateForms { det_i: f64 },
    /// A parametric graph hit a point where `dy/ds = 0`, so the chain rule
    /// through `y(s)` breaks down.
    DegenerateChart { dy_ds: f64 },
    /// Argument outside the admissible interval of a profile.
    OutsideProfileDomain { t: f64 },
    /// `catalog` was asked for a name it does not know.
    UnknownCatalog(String),
    /// A catalog parameter is missing, unknown, or inadmissible.
    InvalidCatalogParams(String),
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceError::Eval(e) => write!(f, "{}", e),
            SurfaceError::NotAGraph => write!(f, "operation requires a graph surface"),
            SurfaceError::DegenerateForms { det_i } => {
                write!(f, "degenerate first fundamental form (EG - F^2 = {})", det_i)
            }
            SurfaceError::DegenerateChart { dy_ds } => {
                write!(f, "parametric chart is degenerate (dy/ds = {})", dy_ds)
            }
            SurfaceError::OutsideProfileDomain { t } => {
                write!(f, "t = {} is outside the admissible profile interval", t)
            }
            SurfaceError::UnknownCatalog(name) => write!(f, "unknown catalog surface '{}'", name),
            SurfaceError::InvalidCatalogParams(msg) => write!(f, "{}", msg),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SurfaceError {}

impl From<EvalError> for SurfaceError {
    fn from(e: EvalError) -> Self {
        SurfaceError::Eval(e)
    }
}

/// Evaluate the graph data bundle at a chart point.
///
/// For a [`SurfaceSpec::ParamGraph`] the second argument is the profile
/// parameter `s`, and the returned `y` is the actual coordinate `y(s)`.
/// Vertical surfaces are rejected with [`SurfaceError::NotAGraph`].
pub fn graph_point(spec: &SurfaceSpec, x: f64, y: f64) -> Result<GraphPointData, SurfaceError> {
    let (jet, y_coord) = match spec {
        SurfaceSpec::Graph { f, params, .. } => (eval_jet3(f, x, y, params)?, y),
        SurfaceSpec::ParamGraph { h, y: y_of_s, params, .. } => {
            let s = y;
            let hj = eval_jet3(h, s, 0.0, params)?;
            let yj = eval_jet3(y_of_s, s, 0.0, params)?;
            if yj.dx == 0.0 {
                return Err(SurfaceError::DegenerateChart { dy_ds: yj.dx });
            }
            // H(y(s)) = h(s); derivatives of H with respect to y by the
            // chain rule, then the jet of f(x, y) = x * H(y)
            let h1 = hj.dx / yj.dx;
            let h2 = (hj.dxx - h1 * yj.dxx) / (yj.dx * yj.dx);
            let h3 = (hj.dxxx - 3.0 * h2 * yj.dx * yj.dxx - h1 * yj.dxxx)
                / (yj.dx * yj.dx * yj.dx);
            let jet = Jet3 {
                v: x * hj.v,
                dx: hj.v,
                dy: x * h1,
                dxx: 0.0,
                dxy: h1,
                dyy: x * h2,
                dxxx: 0.0,
                dxxy: 0.0,
                dxyy: h2,
                dyyy: x * h3,
            };
            (jet, yj.v)
        }
        SurfaceSpec::VerticalRuled { .. } => return Err(SurfaceError::NotAGraph),
    };
    let p = jet.dx + y_coord / 2.0;
    let q = jet.dy - x / 2.0;
    let w = fmath::sqrt(1.0 + p * p + q * q);
    Ok(GraphPointData {
        x,
        y: y_coord,
        jet,
        p,
        q,
        w,
    })
}

/// The upward unit normal of a graph on the left-invariant frame,
/// `(-p/w, -q/w, 1/w)`.
pub fn unit_normal(d: &GraphPointData) -> FrameVector {
    FrameVector::new(-d.p / d.w, -d.q / d.w, 1.0 / d.w)
}

/// First and second fundamental forms of a graph at a point.
pub fn forms_graph(d: &GraphPointData) -> FundamentalForms {
    let (p, q, w) = (d.p, d.q, d.w);
    let e = 1.0 + p * p;
    let f = p * q;
    let g = 1.0 + q * q;
    let l = (d.jet.dxx + q * p) / w;
    let m = (d.jet.dxy + 0.5 * q * q - 0.5 * p * p) / w;
    let n = (d.jet.dyy - q * p) / w;
    FundamentalForms {
        e,
        f,
        g,
        l,
        m,
        n,
        det_i: e * g - f * f,
    }
}

/// Fundamental forms of a vertical surface `X(t, s) = (t, a(t), s)` at `t`.
/// The coefficients do not depend on `s`.
pub fn forms_vertical(spec: &SurfaceSpec, t: f64) -> Result<FundamentalForms, SurfaceError> {
    let (a_expr, params) = match spec {
        SurfaceSpec::VerticalRuled { a, params, .. } => (a, params),
        _ => return Err(SurfaceError::NotAGraph),
    };
    let j = eval_jet3(a_expr, t, 0.0, params)?;
    let (a, da, dda) = (j.v, j.dx, j.dxx);
    let r = a - t * da;
    let one = 1.0 + da * da;
    let e = one + r * r / 4.0;
    let f = r / 2.0;
    let g = 1.0;
    let l = (r * one - 2.0 * dda) / (2.0 * fmath::sqrt(one));
    let m = fmath::sqrt(one) / 2.0;
    let n = 0.0;
    Ok(FundamentalForms {
        e,
        f,
        g,
        l,
        m,
        n,
        det_i: e * g - f * f,
    })
}

/// Mean curvature from the fundamental forms,
/// `H = (EN + GL - 2FM) / (2(EG - F^2))`.
pub fn mean_curvature(forms: &FundamentalForms) -> Result<f64, SurfaceError> {
    // the negated comparisons also catch NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(forms.det_i > 0.0) || !(forms.e > 0.0) {
        return Err(SurfaceError::DegenerateForms { det_i: forms.det_i });
    }
    Ok((forms.e * forms.n + forms.g * forms.l - 2.0 * forms.f * forms.m) / (2.0 * forms.det_i))
}

/// Left side of the minimal graph equation,
/// `(1 + q^2) f_xx - 2 p q f_xy + (1 + p^2) f_yy`, which equals `2 H w^3`.
pub fn minimal_residual_graph(d: &GraphPointData) -> f64 {
    let (p, q) = (d.p, d.q);
    (1.0 + q * q) * d.jet.dxx - 2.0 * p * q * d.jet.dxy + (1.0 + p * p) * d.jet.dyy
}

/// Profile of the vertical surface with constant mean curvature `H`.
///
/// Solving the curve equation `a'' = -2H (1 + a'^2)^{3/2}` with
/// `a(0) = a'(0) = 0` gives the circular arc
///
/// ```text
/// a(t) = -2 H t^2 / (1 + sqrt(1 - 4 H^2 t^2)),
/// ```
///
/// admissible for `4 H^2 t^2 < 1`. The profile traces the circle of radius
/// `1/(2|H|)` through the origin, as a cylinder of that radius must.
pub fn cmc_vertical_profile(h: f64, t: f64) -> Result<f64, SurfaceError> {
    let disc = 1.0 - 4.0 * h * h * t * t;
    if disc <= 0.0 {
        return Err(SurfaceError::OutsideProfileDomain { t });
    }
    Ok(-2.0 * h * t * t / (1.0 + fmath::sqrt(disc)))
}

/// The shape operator applied to a tangent vector, `A_eta v = -nabla_v eta`,
/// where `v = v1 X_x + v2 X_y` is given in chart components. Returns frame
/// components. Exact: the chart partials of the normal components are
/// assembled from the jet, not differenced.
pub fn weingarten(d: &GraphPointData, v: [f64; 2]) -> FrameVector {
    let (p, q, w) = (d.p, d.q, d.w);
    let (px, py) = (d.jet.dxx, d.jet.dxy + 0.5);
    let (qx, qy) = (d.jet.dxy - 0.5, d.jet.dyy);
    let wx = (p * px + q * qx) / w;
    let wy = (p * py + q * qy) / w;
    let w2 = w * w;
    // chart partials of (-p/w, -q/w, 1/w)
    let ddx = FrameVector::new(
        -(px * w - p * wx) / w2,
        -(qx * w - q * wx) / w2,
        -wx / w2,
    );
    let ddy = FrameVector::new(
        -(py * w - p * wy) / w2,
        -(qy * w - q * wy) / w2,
        -wy / w2,
    );
    let dir = FrameVector::new(v[0], v[1], v[0] * p + v[1] * q);
    -covariant_derivative_parts(unit_normal(d), ddx, ddy, dir)
}

/// One entry of the built-in surface catalog.
#[derive(Copy, Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// Parameter names with their default values.
    pub params: &'static [(&'static str, f64)],
}

/// The built-in surfaces.
pub fn catalog_entries() -> &'static [CatalogEntry] {
    &[
        CatalogEntry {
            name: "plane",
            summary: "affine graph a*x + b*y + c; minimal for every choice of coefficients",
            params: &[("a", 0.0), ("b", 0.0), ("c", 0.0)],
        },
        CatalogEntry {
            name: "scherk",
            summary: "saddle-type minimal graph x*y/2 + k*(ln(y + sqrt(1 + y^2)) + y*sqrt(1 + y^2))",
            params: &[("k", 1.0)],
        },
        CatalogEntry {
            name: "daniel",
            summary: "minimal graph x*H(y) with H(y(s)) = s - tanh(s)/2, y(s) = coth(s) - 2*s",
            params: &[],
        },
        CatalogEntry {
            name: "rank1",
            summary: "minimal graph x*y/2 + k*x + c; its Gauss map has rank one",
            params: &[("k", 1.0), ("c", 0.0)],
        },
        CatalogEntry {
            name: "vertical_plane",
            summary: "vertical plane A*x + B*y = C as a ruled surface over t (B nonzero)",
            params: &[("A", 1.0), ("B", 1.0), ("C", 0.0)],
        },
        CatalogEntry {
            name: "cmc_vertical",
            summary: "vertical cylinder over a circular arc, constant mean curvature H",
            params: &[("H", -0.5)],
        },
    ]
}

/// Build a catalog surface. Unknown names and unknown or inadmissible
/// parameters are rejected; omitted parameters take their defaults.
pub fn catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<SurfaceSpec, SurfaceError> {
    let entry = catalog_entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| SurfaceError::UnknownCatalog(name.to_owned()))?;
    let mut merged: BTreeMap<String, f64> = entry
        .params
        .iter()
        .map(|(k, v)| ((*k).to_owned(), *v))
        .collect();
    for (k, v) in params {
        if !merged.contains_key(k) {
            return Err(SurfaceError::InvalidCatalogParams(alloc::format!(
                "surface '{}' has no parameter '{}'",
                name,
                k
            )));
        }
        merged.insert(k.clone(), *v);
    }

    let graph = |text: &str, names: &[&str], merged: BTreeMap<String, f64>| SurfaceSpec::Graph {
        f: Expression::parse(text, &["x", "y"], names).expect("catalog expression parses"),
        params: merged,
        domain: [-2.0, 2.0, -2.0, 2.0],
    };

    Ok(match name {
        "plane" => graph("a*x + b*y + c", &["a", "b", "c"], merged),
        "scherk" => graph(
            "x*y/2 + k*(ln(y + sqrt(1 + y^2)) + y*sqrt(1 + y^2))",
            &["k"],
            merged,
        ),
        "rank1" => graph("x*y/2 + k*x + c", &["k", "c"], merged),
        "daniel" => SurfaceSpec::ParamGraph {
            h: Expression::parse("s - tanh(s)/2", &["s"], &[]).expect("catalog expression parses"),
            y: Expression::parse("coth(s) - 2*s", &["s"], &[]).expect("catalog expression parses"),
            params: merged,
            s_range: [0.2, 3.0],
            x_range: [-2.0, 2.0],
        },
        "vertical_plane" => {
            if merged["B"] == 0.0 {
                return Err(SurfaceError::InvalidCatalogParams(
                    "vertical_plane requires B != 0 to solve for y = a(t)".to_owned(),
                ));
            }
            SurfaceSpec::VerticalRuled {
                a: Expression::parse("(C - A*t)/B", &["t"], &["A", "B", "C"])
                    .expect("catalog expression parses"),
                params: merged,
                t_range: [0.1, 2.0],
            }
        }
        "cmc_vertical" => {
            let h = merged["H"];
            if h == 0.0 {
                return Err(SurfaceError::InvalidCatalogParams(
                    "cmc_vertical requires H != 0; the H = 0 case is the vertical plane".to_owned(),
                ));
            }
            // keep away from the rim 4 H^2 t^2 = 1 where the chart folds over
            let t_max = 0.9 / (2.0 * h.abs());
            SurfaceSpec::VerticalRuled {
                a: Expression::parse(
                    "-2*H*t^2/(1 + sqrt(1 - 4*H^2*t^2))",
                    &["t"],
                    &["H"],
                )
                .expect("catalog expression parses"),
                params: merged,
                t_range: [0.0, t_max],
            }
        }
        _ => unreachable!("entry table and match are in sync"),
    })
}

/// Sample points of a spec's natural domain: a small deterministic grid
/// used by tests and the check suites. Returns `(x, y)` chart pairs (for a
/// parametric graph, `(x, s)`; for a vertical surface, `(t, 0)`).
pub fn sample_domain(spec: &SurfaceSpec, per_side: usize) -> Vec<(f64, f64)> {
    let lin = |a: f64, b: f64, i: usize| a + (b - a) * (i as f64 + 0.5) / per_side as f64;
    let mut out = Vec::new();
    match spec {
        SurfaceSpec::Graph { domain, .. } => {
            for i in 0..per_side {
                for j in 0..per_side {
                    out.push((lin(domain[0], domain[1], i), lin(domain[2], domain[3], j)));
                }
            }
        }
        SurfaceSpec::ParamGraph { s_range, x_range, .. } => {
            for i in 0..per_side {
                for j in 0..per_side {
                    out.push((lin(x_range[0], x_range[1], i), lin(s_range[0], s_range[1], j)));
                }
            }
        }
        SurfaceSpec::VerticalRuled { t_range, .. } => {
            for i in 0..per_side {
                out.push((lin(t_range[0], t_range[1], i), 0.0));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn catalog_of(name: &str, params: &[(&str, f64)]) -> SurfaceSpec {
        let map: BTreeMap<String, f64> =
            params.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect();
        catalog(name, &map).unwrap()
    }

    #[test]
    fn graph_point_fixed_values() {
        let plane = catalog_of("plane", &[("a", 1.0), ("b", 2.0)]);
        let d = graph_point(&plane, 0.0, 0.0).unwrap();
        assert_eq!((d.p, d.q), (1.0, 2.0));
        assert_abs_diff_eq!(d.w, 6.0_f64.sqrt(), epsilon = 1e-15);

        let saddle = catalog_of("rank1", &[("k", 0.0), ("c", 0.0)]);
        let d = graph_point(&saddle, 0.7, -1.3).unwrap();
        assert_abs_diff_eq!(d.p, -1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(d.q, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.w, (1.0 + 1.3 * 1.3_f64).sqrt(), epsilon = 1e-15);

        let flat = catalog_of("plane", &[]);
        let d = graph_point(&flat, 0.0, 0.0).unwrap();
        assert_eq!((d.p, d.q, d.w), (0.0, 0.0, 1.0));
    }

    #[test]
    fn unit_normal_fixed_values() {
        let flat = catalog_of("plane", &[]);
        let n = unit_normal(&graph_point(&flat, 0.0, 0.0).unwrap());
        assert_eq!((n.c1, n.c2, n.c3), (0.0, 0.0, 1.0));

        let plane = catalog_of("plane", &[("a", 1.0), ("b", 2.0)]);
        let n = unit_normal(&graph_point(&plane, 0.0, 0.0).unwrap());
        let r = 1.0 / 6.0_f64.sqrt();
        assert_abs_diff_eq!(n.c1, -r, epsilon = 1e-15);
        assert_abs_diff_eq!(n.c2, -2.0 * r, epsilon = 1e-15);
        assert_abs_diff_eq!(n.c3, r, epsilon = 1e-15);
        assert_abs_diff_eq!(n.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn forms_of_a_tilted_plane() {
        let plane = catalog_of("plane", &[("a", 1.0), ("b", 2.0)]);
        let forms = forms_graph(&graph_point(&plane, 0.0, 0.0).unwrap());
        let r = 1.0 / 6.0_f64.sqrt();
        assert_eq!((forms.e, forms.f, forms.g), (2.0, 2.0, 5.0));
        assert_abs_diff_eq!(forms.l, 2.0 * r, epsilon = 1e-15);
        assert_abs_diff_eq!(forms.m, 1.5 * r, epsilon = 1e-15);
        assert_abs_diff_eq!(forms.n, -2.0 * r, epsilon = 1e-15);
    }

    #[test]
    fn forms_of_the_flat_graph_off_axis() {
        let flat = catalog_of("plane", &[]);
        let d = graph_point(&flat, 2.0, 0.0).unwrap();
        assert_eq!((d.p, d.q), (0.0, -1.0));
        let forms = forms_graph(&d);
        assert_eq!((forms.e, forms.f, forms.g), (1.0, 0.0, 2.0));
        assert_eq!(forms.l, 0.0);
        assert_abs_diff_eq!(forms.m, 0.5 / 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_eq!(forms.n, 0.0);
    }

    #[test]
    fn forms_of_vertical_surfaces() {
        let line = SurfaceSpec::VerticalRuled {
            a: Expression::parse("t", &["t"], &[]).unwrap(),
            params: BTreeMap::new(),
            t_range: [0.1, 2.0],
        };
        let forms = forms_vertical(&line, 1.0).unwrap();
        assert_eq!((forms.e, forms.f, forms.g), (2.0, 0.0, 1.0));
        assert_eq!(forms.l, 0.0);
        assert_abs_diff_eq!(forms.m, 2.0_f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_eq!(forms.n, 0.0);

        let c = 1.7;
        let level = SurfaceSpec::VerticalRuled {
            a: Expression::parse("c", &["t"], &["c"]).unwrap(),
            params: [("c".to_owned(), c)].into_iter().collect(),
            t_range: [0.1, 2.0],
        };
        let forms = forms_vertical(&level, 0.6).unwrap();
        assert_abs_diff_eq!(forms.e, 1.0 + c * c / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(forms.f, c / 2.0, epsilon = 1e-15);
        assert_eq!(forms.g, 1.0);
        assert_abs_diff_eq!(forms.l, c / 2.0, epsilon = 1e-15);
        assert_eq!(forms.m, 0.5);
        assert_eq!(forms.n, 0.0);
    }

    #[test]
    fn mean_curvature_fixed_values() {
        // paraboloid profile a(t) = t^2 at t = 0: H = -a''/2 = -1
        let para = SurfaceSpec::VerticalRuled {
            a: Expression::parse("t^2", &["t"], &[]).unwrap(),
            params: BTreeMap::new(),
            t_range: [0.0, 1.0],
        };
        let h = mean_curvature(&forms_vertical(&para, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(h, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn minimal_residual_fixed_values() {
        let bowl = SurfaceSpec::Graph {
            f: Expression::parse("(x^2 + y^2)/2", &["x", "y"], &[]).unwrap(),
            params: BTreeMap::new(),
            domain: [-2.0, 2.0, -2.0, 2.0],
        };
        let r = minimal_residual_graph(&graph_point(&bowl, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn catalog_minimal_surfaces_have_vanishing_mean_curvature() {
        for (name, params) in [
            ("plane", alloc::vec![("a", 0.7), ("b", -1.2), ("c", 3.0)]),
            ("scherk", alloc::vec![("k", 1.0)]),
            ("scherk", alloc::vec![("k", 2.0)]),
            ("rank1", alloc::vec![("k", -0.6), ("c", 0.4)]),
            ("daniel", alloc::vec![]),
        ] {
            let spec = catalog_of(name, &params);
            for (x, y) in sample_domain(&spec, 5) {
                let d = graph_point(&spec, x, y).unwrap();
                let h = mean_curvature(&forms_graph(&d)).unwrap();
                assert!(h.abs() <= 1e-10, "{} at ({}, {}): H = {}", name, x, y, h);
                assert!(minimal_residual_graph(&d).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn vertical_plane_is_minimal() {
        let spec = catalog_of("vertical_plane", &[("A", 1.0), ("B", 1.0), ("C", 0.0)]);
        for (t, _) in sample_domain(&spec, 9) {
            let h = mean_curvature(&forms_vertical(&spec, t).unwrap()).unwrap();
            assert!(h.abs() <= 1e-12, "t = {}: H = {}", t, h);
        }
    }

    #[test]
    fn scherk_slope_functions() {
        let spec = catalog_of("scherk", &[("k", 0.8)]);
        for (x, y) in sample_domain(&spec, 4) {
            let d = graph_point(&spec, x, y).unwrap();
            assert_abs_diff_eq!(d.p, y, epsilon = 1e-12);
            assert_abs_diff_eq!(d.q, 2.0 * 0.8 * (1.0 + y * y).sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn parametric_chain_rule_matches_reference_values() {
        // reference jet of the parametric catalog graph at s = 0.8,
        // computed symbolically from h(s) = s - tanh(s)/2, y(s) = coth(s) - 2s
        let spec = catalog_of("daniel", &[]);
        let x = 1.5;
        let d = graph_point(&spec, x, 0.8).unwrap();
        assert_abs_diff_eq!(d.y, -0.094059297956293378774, epsilon = 1e-14);
        assert_abs_diff_eq!(d.jet.dx, 0.46798161486607551816, epsilon = 1e-14);
        assert_abs_diff_eq!(d.jet.dxy, -0.22047241613387801073, epsilon = 1e-14);
        assert_abs_diff_eq!(d.jet.dyy, x * 0.11360140384384754468, epsilon = 1e-13);
        assert_abs_diff_eq!(d.jet.dyyy, x * -0.023721574381215397055, epsilon = 1e-13);
        assert_eq!(d.jet.dxx, 0.0);
        assert_eq!(d.jet.dxxy, 0.0);
    }

    #[test]
    fn cmc_profile_values_and_domain() {
        // H = -1/2 integrates to a(t) = 1 - sqrt(1 - t^2)
        let a = cmc_vertical_profile(-0.5, 0.5).unwrap();
        assert_abs_diff_eq!(a, 1.0 - 0.75_f64.sqrt(), epsilon = 1e-15);
        let a = cmc_vertical_profile(-0.5, 1e-8).unwrap();
        assert!(a.abs() < 1e-15);
        assert!(matches!(
            cmc_vertical_profile(-0.5, 1.1),
            Err(SurfaceError::OutsideProfileDomain { .. })
        ));
    }

    #[test]
    fn cmc_vertical_surface_has_constant_mean_curvature() {
        let h0 = -0.5;
        let spec = catalog_of("cmc_vertical", &[("H", h0)]);
        for (t, _) in sample_domain(&spec, 12) {
            let h = mean_curvature(&forms_vertical(&spec, t).unwrap()).unwrap();
            assert!(
                (h.abs() - h0.abs()).abs() <= 1e-12,
                "t = {}: |H| = {}",
                t,
                h.abs()
            );
            // the catalog expression agrees with the closed-form profile
            let a_expr = match &spec {
                SurfaceSpec::VerticalRuled { a, params, .. } => {
                    crate::expr::eval_scalar(a, t, 0.0, params).unwrap()
                }
                _ => unreachable!(),
            };
            assert_abs_diff_eq!(a_expr, cmc_vertical_profile(h0, t).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn weingarten_reproduces_the_second_form() {
        let spec = SurfaceSpec::Graph {
            f: Expression::parse("sin(x)*cosh(y) + x*y/2", &["x", "y"], &[]).unwrap(),
            params: BTreeMap::new(),
            domain: [-1.0, 1.0, -1.0, 1.0],
        };
        for (x, y) in sample_domain(&spec, 4) {
            let d = graph_point(&spec, x, y).unwrap();
            let forms = forms_graph(&d);
            let xx = FrameVector::new(1.0, 0.0, d.p);
            let xy = FrameVector::new(0.0, 1.0, d.q);
            let ax = weingarten(&d, [1.0, 0.0]);
            let ay = weingarten(&d, [0.0, 1.0]);
            assert_abs_diff_eq!(ax.dot(&xx), forms.l, epsilon = 1e-12);
            assert_abs_diff_eq!(ax.dot(&xy), forms.m, epsilon = 1e-12);
            assert_abs_diff_eq!(ay.dot(&xx), forms.m, epsilon = 1e-12);
            assert_abs_diff_eq!(ay.dot(&xy), forms.n, epsilon = 1e-12);
        }
    }

    #[test]
    fn catalog_rejects_bad_requests() {
        assert!(matches!(
            catalog("helicoid", &BTreeMap::new()),
            Err(SurfaceError::UnknownCatalog(_))
        ));
        let bad: BTreeMap<String, f64> = [("zeta".to_owned(), 1.0)].into_iter().collect();
        assert!(matches!(
            catalog("plane", &bad),
            Err(SurfaceError::InvalidCatalogParams(_))
        ));
        let flat: BTreeMap<String, f64> = [("B".to_owned(), 0.0)].into_iter().collect();
        assert!(matches!(
            catalog("vertical_plane", &flat),
            Err(SurfaceError::InvalidCatalogParams(_))
        ));
        let zero: BTreeMap<String, f64> = [("H".to_owned(), 0.0)].into_iter().collect();
        assert!(matches!(
            catalog("cmc_vertical", &zero),
            Err(SurfaceError::InvalidCatalogParams(_))
        ));
    }

    #[test]
    fn graph_operations_reject_vertical_surfaces() {
        let spec = catalog_of("vertical_plane", &[]);
        assert!(matches!(
            graph_point(&spec, 0.5, 0.0),
            Err(SurfaceError::NotAGraph)
        ));
        let plane = catalog_of("plane", &[]);
        assert!(matches!(
            forms_vertical(&plane, 0.5),
            Err(SurfaceError::NotAGraph)
        ));
    }

    proptest! {
        #[test]
        fn first_form_determinant_is_w_squared(
            x in -2.0..2.0f64,
            y in -2.0..2.0f64,
            k in 0.25..2.0f64,
        ) {
            let spec = catalog_of("scherk", &[("k", k)]);
            let d = graph_point(&spec, x, y).unwrap();
            let forms = forms_graph(&d);
            prop_assert!((forms.det_i - d.w * d.w).abs() <= 1e-12 * d.w * d.w);
        }

        #[test]
        fn vertical_first_form_determinant(
            t in 0.3..1.8f64,
        ) {
            let spec = SurfaceSpec::VerticalRuled {
                a: Expression::parse("sin(t)*2 + t^2", &["t"], &[]).unwrap(),
                params: BTreeMap::new(),
                t_range: [0.1, 2.0],
            };
            let j = eval_jet3(
                match &spec { SurfaceSpec::VerticalRuled { a, .. } => a, _ => unreachable!() },
                t, 0.0, &BTreeMap::new(),
            ).unwrap();
            let forms = forms_vertical(&spec, t).unwrap();
            let want = 1.0 + j.dx * j.dx;
            prop_assert!((forms.det_i - want).abs() <= 1e-12 * want);
        }

        #[test]
        fn residual_is_twice_h_w_cubed(
            x in -1.5..1.5f64,
            y in -1.5..1.5f64,
        ) {
            let spec = SurfaceSpec::Graph {
                f: Expression::parse("sin(x)*cosh(y) + x^3*y/4 - y^2", &["x", "y"], &[]).unwrap(),
                params: BTreeMap::new(),
                domain: [-2.0, 2.0, -2.0, 2.0],
            };
            let d = graph_point(&spec, x, y).unwrap();
            let h = mean_curvature(&forms_graph(&d)).unwrap();
            let lhs = minimal_residual_graph(&d);
            let rhs = 2.0 * h * d.w * d.w * d.w;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }

        #[test]
        fn plane_graphs_are_minimal(
            a in -2.0..2.0f64,
            b in -2.0..2.0f64,
            c in -2.0..2.0f64,
            x in -3.0..3.0f64,
            y in -3.0..3.0f64,
        ) {
            let spec = catalog_of("plane", &[("a", a), ("b", b), ("c", c)]);
            let d = graph_point(&spec, x, y).unwrap();
            let h = mean_curvature(&forms_graph(&d)).unwrap();
            prop_assert!(h.abs() <= 1e-12);
        }

        #[test]
        fn normals_are_unit(
            x in -2.0..2.0f64,
            y in -2.0..2.0f64,
        ) {
            let spec = catalog_of("scherk", &[("k", 1.0)]);
            let n = unit_normal(&graph_point(&spec, x, y).unwrap());
            prop_assert!((n.norm() - 1.0).abs() <= 1e-12);
        }
    }
}
