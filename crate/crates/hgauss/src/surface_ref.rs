//! Surface references on the command line.
//!
//! Two schemes:
//!
//! * `catalog:<name>` with optional parameter overrides in a query string,
//!   for example `catalog:scherk?k=1`.
//! * `expr:<function of x and y>` with parameter bindings and an optional
//!   sampling rectangle, for example
//!   `expr:x*y/2 + k*x?k=0.5&domain=-2,2,-2,2`.
//!
//! A reference resolves to a [`SurfaceSpec`]; every failure carries a
//! message precise enough to fix the reference from the terminal.

use std::collections::BTreeMap;
use std::fmt;

use hgauss_core::expr::{scan_identifiers, Expression};
use hgauss_core::surface::{catalog, SurfaceError, SurfaceSpec};

/// Default sampling rectangle for `expr:` references without a `domain`.
pub const DEFAULT_DOMAIN: [f64; 4] = [-2.0, 2.0, -2.0, 2.0];

/// A parsed but not yet resolved surface reference.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceRef {
    Catalog {
        name: String,
        params: BTreeMap<String, f64>,
    },
    Expr {
        text: String,
        params: BTreeMap<String, f64>,
        domain: [f64; 4],
    },
}

/// Failures of reference parsing or resolution.
#[derive(Clone, Debug, PartialEq)]
pub enum RefError {
    /// No `scheme:` prefix.
    MissingScheme,
    /// A scheme other than `catalog` or `expr`.
    UnknownScheme(String),
    /// Empty catalog name or expression body.
    EmptyBody,
    /// A query item that is not `name=value`.
    BadPair(String),
    /// A value that does not parse as a number.
    BadValue { key: String, value: String },
    /// A `domain` that is not four comma-separated numbers with
    /// `x0 < x1` and `y0 < y1`.
    BadDomain(String),
    /// Parameters referenced by the expression but not bound in the query.
    UnboundParams(Vec<String>),
    /// Query parameters the expression never mentions.
    UnusedParams(Vec<String>),
    /// The expression body does not parse; offset into the body text.
    BadExpression { offset: usize, message: String },
    /// The catalog rejected the name or the parameters.
    Surface(String),
}

impl fmt::Display for RefError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefError::MissingScheme => {
                write!(f, "surface reference needs a 'catalog:' or 'expr:' prefix")
            }
            RefError::UnknownScheme(s) => {
                write!(f, "unknown scheme '{}', expected 'catalog' or 'expr'", s)
            }
            RefError::EmptyBody => write!(f, "surface reference has an empty body"),
            RefError::BadPair(s) => write!(f, "query item '{}' is not name=value", s),
            RefError::BadValue { key, value } => {
                write!(f, "value '{}' of '{}' is not a number", value, key)
            }
            RefError::BadDomain(s) => write!(
                f,
                "domain '{}' must be x0,x1,y0,y1 with x0 < x1 and y0 < y1",
                s
            ),
            RefError::UnboundParams(names) => {
                write!(f, "unbound parameters: {}", names.join(", "))
            }
            RefError::UnusedParams(names) => {
                write!(f, "parameters not used by the expression: {}", names.join(", "))
            }
            RefError::BadExpression { offset, message } => {
                write!(f, "bad expression at offset {}: {}", offset, message)
            }
            RefError::Surface(msg) => write!(f, "{}", msg),
        }
    }
}

impl std::error::Error for RefError {}

fn parse_value(key: &str, value: &str) -> Result<f64, RefError> {
    value.parse::<f64>().map_err(|_| RefError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
    })
}

fn parse_domain(text: &str) -> Result<[f64; 4], RefError> {
    let bad = || RefError::BadDomain(text.to_owned());
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let mut d = [0.0; 4];
    for (slot, part) in d.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| bad())?;
    }
    if !(d[0] < d[1] && d[2] < d[3]) {
        return Err(bad());
    }
    Ok(d)
}

impl SurfaceRef {
    /// Parse a reference string. Resolution against the catalog or the
    /// expression grammar happens later, in [`SurfaceRef::resolve`].
    pub fn parse(text: &str) -> Result<SurfaceRef, RefError> {
        let (scheme, rest) = text.split_once(':').ok_or(RefError::MissingScheme)?;
        let (body, query) = match rest.split_once('?') {
            Some((b, q)) => (b, Some(q)),
            None => (rest, None),
        };
        if body.trim().is_empty() {
            return Err(RefError::EmptyBody);
        }
        let mut params = BTreeMap::new();
        let mut domain = None;
        if let Some(query) = query {
            for item in query.split('&').filter(|s| !s.is_empty()) {
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| RefError::BadPair(item.to_owned()))?;
                let key = key.trim();
                if key == "domain" {
                    domain = Some(parse_domain(value)?);
                } else {
                    params.insert(key.to_owned(), parse_value(key, value)?);
                }
            }
        }
        match scheme {
            "catalog" => {
                if let Some(d) = domain {
                    // the catalog knows its own domains; an override here
                    // would be silently shadowed by `--domain`
                    return Err(RefError::BadPair(format!(
                        "domain={},{},{},{} (catalog surfaces take --domain instead)",
                        d[0], d[1], d[2], d[3]
                    )));
                }
                Ok(SurfaceRef::Catalog {
                    name: body.trim().to_owned(),
                    params,
                })
            }
            "expr" => Ok(SurfaceRef::Expr {
                text: body.to_owned(),
                params,
                domain: domain.unwrap_or(DEFAULT_DOMAIN),
            }),
            other => Err(RefError::UnknownScheme(other.to_owned())),
        }
    }

    /// Resolve the reference to a concrete surface.
    pub fn resolve(&self) -> Result<SurfaceSpec, RefError> {
        match self {
            SurfaceRef::Catalog { name, params } => catalog(name, params).map_err(|e| {
                RefError::Surface(match e {
                    SurfaceError::UnknownCatalog(n) => format!(
                        "unknown catalog surface '{}'; run 'hgauss catalog' for the list",
                        n
                    ),
                    other => other.to_string(),
                })
            }),
            SurfaceRef::Expr {
                text,
                params,
                domain,
            } => {
                let idents = scan_identifiers(text);
                let names: Vec<&str> = idents
                    .iter()
                    .map(String::as_str)
                    .filter(|n| *n != "x" && *n != "y")
                    .collect();
                let missing: Vec<String> = names
                    .iter()
                    .filter(|n| !params.contains_key(**n))
                    .map(|n| (*n).to_owned())
                    .collect();
                if !missing.is_empty() {
                    return Err(RefError::UnboundParams(missing));
                }
                let unused: Vec<String> = params
                    .keys()
                    .filter(|k| !names.contains(&k.as_str()))
                    .cloned()
                    .collect();
                if !unused.is_empty() {
                    return Err(RefError::UnusedParams(unused));
                }
                let f = Expression::parse(text, &["x", "y"], &names).map_err(|e| {
                    RefError::BadExpression {
                        offset: e.offset,
                        message: e.to_string(),
                    }
                })?;
                Ok(SurfaceSpec::Graph {
                    f,
                    params: params.clone(),
                    domain: *domain,
                })
            }
        }
    }
}

impl fmt::Display for SurfaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceRef::Catalog { name, params } => {
                write!(f, "catalog:{}", name)?;
                for (i, (k, v)) in params.iter().enumerate() {
                    write!(f, "{}{}={}", if i == 0 { "?" } else { "&" }, k, v)?;
                }
                Ok(())
            }
            SurfaceRef::Expr {
                text,
                params,
                domain,
            } => {
                write!(f, "expr:{}", text)?;
                let mut sep = '?';
                for (k, v) in params {
                    write!(f, "{}{}={}", sep, k, v)?;
                    sep = '&';
                }
                write!(
                    f,
                    "{}domain={},{},{},{}",
                    sep, domain[0], domain[1], domain[2], domain[3]
                )
            }
        }
    }
}
