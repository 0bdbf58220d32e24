//! Grid sampling and export.
//!
//! A grid row bundles every per-point quantity the library computes for a
//! graph surface. Rows are computed in parallel and always written in
//! index order (y fastest), so exports are byte-for-byte reproducible.
//! CSV uses `.` as the decimal separator, `,` as the field separator, a
//! header line, and 17 significant digits; JSON is an array of objects
//! with the same fields.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use hgauss_core::gans::GeodesicSample;
use hgauss_core::gaussmap::{gauss_det, gauss_map, tension_field};
use hgauss_core::surface::{
    forms_graph, graph_point, mean_curvature, SurfaceError, SurfaceSpec,
};

/// Everything computed at one grid node of a graph surface.
///
/// For a parametric graph the chart is `(x, s)` and `y` holds the actual
/// second coordinate `y(s)` of the point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub f: f64,
    pub p: f64,
    pub q: f64,
    pub w: f64,
    #[serde(rename = "E")]
    pub ee: f64,
    #[serde(rename = "F")]
    pub ff: f64,
    #[serde(rename = "G")]
    pub gg: f64,
    #[serde(rename = "L")]
    pub ll: f64,
    #[serde(rename = "M")]
    pub mm: f64,
    #[serde(rename = "N")]
    pub nn: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub phi_u: f64,
    pub phi_v: f64,
    pub det_phi: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// Column order of [`Row`], shared by the CSV header and the writer.
pub const COLUMNS: &str = "x,y,f,p,q,w,E,F,G,L,M,N,H,phi_u,phi_v,det_phi,tau1,tau2";

/// Failures of grid evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum GridError {
    /// Grids need a graph; vertical surfaces only expose a profile.
    NotAGraph,
    /// Fewer than two nodes per side.
    BadShape { nx: usize, ny: usize },
    /// Evaluation failed at one node.
    Node {
        index: usize,
        x: f64,
        y: f64,
        source: SurfaceError,
    },
}

impl std::fmt::Display for GridError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridError::NotAGraph => {
                write!(f, "grid sampling needs a graph surface (try 'hgauss eval' for vertical surfaces)")
            }
            GridError::BadShape { nx, ny } => {
                write!(f, "grid needs at least 2 nodes per side, got {}x{}", nx, ny)
            }
            GridError::Node { index, x, y, source } => {
                write!(f, "node {} at ({}, {}): {}", index, x, y, source)
            }
        }
    }
}

impl std::error::Error for GridError {}

/// Compute the full row bundle at one chart point.
pub fn row_at(spec: &SurfaceSpec, x: f64, y: f64) -> Result<Row, SurfaceError> {
    let d = graph_point(spec, x, y)?;
    let forms = forms_graph(&d);
    let h = mean_curvature(&forms)?;
    let phi = gauss_map(&d);
    let tau = tension_field(&d);
    Ok(Row {
        x: d.x,
        y: d.y,
        f: d.jet.v,
        p: d.p,
        q: d.q,
        w: d.w,
        ee: forms.e,
        ff: forms.f,
        gg: forms.g,
        ll: forms.l,
        mm: forms.m,
        nn: forms.n,
        h,
        phi_u: phi.u,
        phi_v: phi.v,
        det_phi: gauss_det(&d),
        tau1: tau.t1,
        tau2: tau.t2,
    })
}

/// The natural sampling rectangle of a graph-like spec, `[x0, x1, y0, y1]`
/// (for a parametric graph, the `s` range sits in the `y` slots).
pub fn natural_domain(spec: &SurfaceSpec) -> Option<[f64; 4]> {
    match spec {
        SurfaceSpec::Graph { domain, .. } => Some(*domain),
        SurfaceSpec::ParamGraph { s_range, x_range, .. } => {
            Some([x_range[0], x_range[1], s_range[0], s_range[1]])
        }
        SurfaceSpec::VerticalRuled { .. } => None,
    }
}

/// Sample `nx` by `ny` nodes (endpoints included) over `domain` and
/// compute every row. Rows are evaluated in parallel; the result is in
/// index order with `y` varying fastest.
pub fn compute_rows(
    spec: &SurfaceSpec,
    nx: usize,
    ny: usize,
    domain: [f64; 4],
) -> Result<Vec<Row>, GridError> {
    if !spec.is_graph() {
        return Err(GridError::NotAGraph);
    }
    if nx < 2 || ny < 2 {
        return Err(GridError::BadShape { nx, ny });
    }
    let node = |k: usize| {
        let (i, j) = (k / ny, k % ny);
        let x = domain[0] + (domain[1] - domain[0]) * i as f64 / (nx - 1) as f64;
        let y = domain[2] + (domain[3] - domain[2]) * j as f64 / (ny - 1) as f64;
        (x, y)
    };
    let results: Vec<Result<Row, GridError>> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (x, y) = node(k);
            row_at(spec, x, y).map_err(|source| GridError::Node {
                index: k,
                x,
                y,
                source,
            })
        })
        .collect();
    // report the lowest failing index regardless of scheduling
    results.into_iter().collect()
}

fn write_fields(out: &mut impl Write, fields: &[f64]) -> io::Result<()> {
    for (i, v) in fields.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{:.16e}", v)?;
    }
    out.write_all(b"\n")
}

impl Row {
    /// Field values in the order of [`COLUMNS`].
    pub fn fields(&self) -> [f64; 18] {
        [
            self.x, self.y, self.f, self.p, self.q, self.w, self.ee, self.ff, self.gg, self.ll,
            self.mm, self.nn, self.h, self.phi_u, self.phi_v, self.det_phi, self.tau1, self.tau2,
        ]
    }
}

/// Write rows as CSV with a header line.
pub fn write_csv(rows: &[Row], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{}", COLUMNS)?;
    for row in rows {
        write_fields(out, &row.fields())?;
    }
    Ok(())
}

/// Write rows as a JSON array of objects mirroring the CSV fields.
pub fn write_json(rows: &[Row], out: &mut impl Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)?;
    out.write_all(b"\n")
}

/// Write geodesic samples as CSV `t,u,v,du,dv`.
pub fn write_geodesic_csv(samples: &[GeodesicSample], out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "t,u,v,du,dv")?;
    for s in samples {
        write_fields(
            out,
            &[s.t, s.point.u, s.point.v, s.velocity[0], s.velocity[1]],
        )?;
    }
    Ok(())
}
