//! Expressions and third-order jets.
//!
//! A surface is described by a scalar function given as text, for example
//! `"x*y/2 + k*x"` with a named parameter `k`. This module parses such text
//! into an [`Expression`] and evaluates it together with every partial
//! derivative up to order three, packaged as a [`Jet3`]. Derivatives are
//! exact (truncated Taylor arithmetic on the AST), never finite differences:
//! the curvature identities downstream need clean third derivatives.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' base)?          -- exponent must be a numeric constant
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Recognized functions: `sqrt ln exp sin cos sinh cosh tanh coth`.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;

/// Value and all partial derivatives up to order three of a scalar function
/// of two variables at a point. Mixed partials are stored once; symmetry is
/// structural.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Jet3 {
    /// Function value.
    pub v: f64,
    /// First derivative in `x`.
    pub dx: f64,
    /// First derivative in `y`.
    pub dy: f64,
    /// Second derivative in `x`.
    pub dxx: f64,
    /// Mixed second derivative.
    pub dxy: f64,
    /// Second derivative in `y`.
    pub dyy: f64,
    /// Third derivative `xxx`.
    pub dxxx: f64,
    /// Third derivative `xxy`.
    pub dxxy: f64,
    /// Third derivative `xyy`.
    pub dxyy: f64,
    /// Third derivative `yyy`.
    pub dyyy: f64,
}

impl Jet3 {
    /// Jet of the constant function `c`.
    pub fn constant(c: f64) -> Self {
        Jet3 {
            v: c,
            ..Jet3::default()
        }
    }

    /// Jet of the coordinate function `x` at `x = x0`.
    pub fn x(x0: f64) -> Self {
        Jet3 {
            v: x0,
            dx: 1.0,
            ..Jet3::default()
        }
    }

    /// Jet of the coordinate function `y` at `y = y0`.
    pub fn y(y0: f64) -> Self {
        Jet3 {
            v: y0,
            dy: 1.0,
            ..Jet3::default()
        }
    }

    /// All ten entries as an array, in declaration order.
    pub fn entries(&self) -> [f64; 10] {
        [
            self.v, self.dx, self.dy, self.dxx, self.dxy, self.dyy, self.dxxx, self.dxxy,
            self.dxyy, self.dyyy,
        ]
    }

    /// Chain rule for `g(self)` where `g` is a function of one variable with
    /// derivatives `d = [g, g', g'', g''']` evaluated at `self.v`.
    pub fn compose(&self, d: [f64; 4]) -> Jet3 {
        let u = self;
        Jet3 {
            v: d[0],
            dx: d[1] * u.dx,
            dy: d[1] * u.dy,
            dxx: d[2] * u.dx * u.dx + d[1] * u.dxx,
            dxy: d[2] * u.dx * u.dy + d[1] * u.dxy,
            dyy: d[2] * u.dy * u.dy + d[1] * u.dyy,
            dxxx: d[3] * u.dx * u.dx * u.dx + 3.0 * d[2] * u.dx * u.dxx + d[1] * u.dxxx,
            dxxy: d[3] * u.dx * u.dx * u.dy
                + d[2] * (u.dxx * u.dy + 2.0 * u.dx * u.dxy)
                + d[1] * u.dxxy,
            dxyy: d[3] * u.dx * u.dy * u.dy
                + d[2] * (u.dyy * u.dx + 2.0 * u.dy * u.dxy)
                + d[1] * u.dxyy,
            dyyy: d[3] * u.dy * u.dy * u.dy + 3.0 * d[2] * u.dy * u.dyy + d[1] * u.dyyy,
        }
    }

    /// Multiplicative inverse `1/self`. The value must be nonzero.
    pub fn recip(&self) -> Jet3 {
        let s = self.v;
        self.compose([1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s), -6.0 / (s * s * s * s)])
    }

    /// Square root; the value must be positive.
    pub fn sqrt(&self) -> Jet3 {
        let s = self.v;
        let r = fmath::sqrt(s);
        self.compose([r, 0.5 / r, -0.25 / (r * s), 0.375 / (r * s * s)])
    }

    /// Natural logarithm; the value must be positive.
    pub fn ln(&self) -> Jet3 {
        let s = self.v;
        self.compose([fmath::ln(s), 1.0 / s, -1.0 / (s * s), 2.0 / (s * s * s)])
    }

    /// Exponential.
    pub fn exp(&self) -> Jet3 {
        let e = fmath::exp(self.v);
        self.compose([e, e, e, e])
    }

    /// Sine.
    pub fn sin(&self) -> Jet3 {
        let (s, c) = (fmath::sin(self.v), fmath::cos(self.v));
        self.compose([s, c, -s, -c])
    }

    /// Cosine.
    pub fn cos(&self) -> Jet3 {
        let (s, c) = (fmath::sin(self.v), fmath::cos(self.v));
        self.compose([c, -s, -c, s])
    }

    /// Hyperbolic sine.
    pub fn sinh(&self) -> Jet3 {
        let (s, c) = (fmath::sinh(self.v), fmath::cosh(self.v));
        self.compose([s, c, s, c])
    }

    /// Hyperbolic cosine.
    pub fn cosh(&self) -> Jet3 {
        let (s, c) = (fmath::sinh(self.v), fmath::cosh(self.v));
        self.compose([c, s, c, s])
    }

    /// Hyperbolic tangent.
    pub fn tanh(&self) -> Jet3 {
        let t = fmath::tanh(self.v);
        let d1 = 1.0 - t * t;
        self.compose([t, d1, -2.0 * t * d1, d1 * (6.0 * t * t - 2.0)])
    }

    /// Hyperbolic cotangent; the value must be nonzero. Satisfies the same
    /// derivative recurrence as `tanh`: `coth' = 1 - coth^2`.
    pub fn coth(&self) -> Jet3 {
        let c = fmath::cosh(self.v) / fmath::sinh(self.v);
        let d1 = 1.0 - c * c;
        self.compose([c, d1, -2.0 * c * d1, d1 * (6.0 * c * c - 2.0)])
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, n: i32) -> Jet3 {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Jet3::constant(1.0);
        let mut base = *self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Real power; the value must be positive.
    pub fn powf(&self, r: f64) -> Jet3 {
        let s = self.v;
        self.compose([
            fmath::powf(s, r),
            r * fmath::powf(s, r - 1.0),
            r * (r - 1.0) * fmath::powf(s, r - 2.0),
            r * (r - 1.0) * (r - 2.0) * fmath::powf(s, r - 3.0),
        ])
    }
}

impl core::ops::Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
            dxxx: self.dxxx + o.dxxx,
            dxxy: self.dxxy + o.dxxy,
            dxyy: self.dxyy + o.dxyy,
            dyyy: self.dyyy + o.dyyy,
        }
    }
}

impl core::ops::Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        self + (-o)
    }
}

impl core::ops::Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3 {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
            dxxx: -self.dxxx,
            dxxy: -self.dxxy,
            dxyy: -self.dxyy,
            dyyy: -self.dyyy,
        }
    }
}

impl core::ops::Mul for Jet3 {
    type Output = Jet3;
    /// Leibniz rule through order three.
    fn mul(self, o: Jet3) -> Jet3 {
        let (a, b) = (self, o);
        Jet3 {
            v: a.v * b.v,
            dx: a.dx * b.v + a.v * b.dx,
            dy: a.dy * b.v + a.v * b.dy,
            dxx: a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
            dxy: a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            dyy: a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy,
            dxxx: a.dxxx * b.v + 3.0 * a.dxx * b.dx + 3.0 * a.dx * b.dxx + a.v * b.dxxx,
            dxxy: a.dxxy * b.v
                + a.dxx * b.dy
                + 2.0 * a.dxy * b.dx
                + 2.0 * a.dx * b.dxy
                + a.dy * b.dxx
                + a.v * b.dxxy,
            dxyy: a.dxyy * b.v
                + a.dyy * b.dx
                + 2.0 * a.dxy * b.dy
                + 2.0 * a.dy * b.dxy
                + a.dx * b.dyy
                + a.v * b.dxyy,
            dyyy: a.dyyy * b.v + 3.0 * a.dyy * b.dy + 3.0 * a.dy * b.dyy + a.v * b.dyyy,
        }
    }
}

impl core::ops::Div for Jet3 {
    type Output = Jet3;
    // the reciprocal jet carries the whole quotient rule
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl core::ops::Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: f64) -> Jet3 {
        self * Jet3::constant(c)
    }
}

/// Unary operations of the expression language.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sqrt,
    Ln,
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Coth,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Ln => "ln",
            UnaryOp::Exp => "exp",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Coth => "coth",
        }
    }

    fn from_name(s: &str) -> Option<UnaryOp> {
        Some(match s {
            "sqrt" => UnaryOp::Sqrt,
            "ln" => UnaryOp::Ln,
            "exp" => UnaryOp::Exp,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "sinh" => UnaryOp::Sinh,
            "cosh" => UnaryOp::Cosh,
            "tanh" => UnaryOp::Tanh,
            "coth" => UnaryOp::Coth,
            _ => return None,
        })
    }
}

/// Binary operations of the expression language.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Power with a constant exponent (the right operand is always `Num`).
    Pow,
}

/// A node of the expression tree. Variables and parameters are indices into
/// the symbol tables carried by the owning [`Expression`].
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Param(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
}

#[allow(clippy::should_implement_trait)]
impl Node {
    pub fn num(c: f64) -> Node {
        Node::Num(c)
    }
    pub fn var(i: usize) -> Node {
        Node::Var(i)
    }
    pub fn param(i: usize) -> Node {
        Node::Param(i)
    }
    pub fn neg(a: Node) -> Node {
        Node::Unary(UnaryOp::Neg, Box::new(a))
    }
    pub fn add(a: Node, b: Node) -> Node {
        Node::Binary(BinaryOp::Add, Box::new(a), Box::new(b))
    }
    pub fn sub(a: Node, b: Node) -> Node {
        Node::Binary(BinaryOp::Sub, Box::new(a), Box::new(b))
    }
    pub fn mul(a: Node, b: Node) -> Node {
        Node::Binary(BinaryOp::Mul, Box::new(a), Box::new(b))
    }
    pub fn div(a: Node, b: Node) -> Node {
        Node::Binary(BinaryOp::Div, Box::new(a), Box::new(b))
    }
}

/// A parsed scalar function together with its declared variable and
/// parameter names. Immutable after construction; evaluation is pure.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    vars: Vec<String>,
    params: Vec<String>,
    root: Node,
}

/// Why a piece of text failed to parse.
#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnknownIdentifier(String),
    NotAFunction(String),
    InvalidNumber,
    NonConstantExponent,
}

/// Parse failure at a byte offset of the input.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character '{}' at offset {}", c, self.offset)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of input at offset {}", self.offset)
            }
            ParseErrorKind::UnknownIdentifier(name) => {
                write!(f, "unknown identifier '{}' at offset {}", name, self.offset)
            }
            ParseErrorKind::NotAFunction(name) => {
                write!(f, "'{}' is not a function (offset {})", name, self.offset)
            }
            ParseErrorKind::InvalidNumber => {
                write!(f, "invalid numeric literal at offset {}", self.offset)
            }
            ParseErrorKind::NonConstantExponent => {
                write!(f, "exponent must be a numeric constant (offset {})", self.offset)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

/// Structural problem in a programmatically built tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AstError {
    VarIndexOutOfRange(usize),
    ParamIndexOutOfRange(usize),
    NonConstantExponent,
}

impl fmt::Display for AstError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AstError::VarIndexOutOfRange(i) => write!(f, "variable index {} out of range", i),
            AstError::ParamIndexOutOfRange(i) => write!(f, "parameter index {} out of range", i),
            AstError::NonConstantExponent => write!(f, "exponent must be a numeric constant"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AstError {}

/// Evaluation failure.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    /// A subexpression left the domain of its operation (`ln` or `sqrt` of a
    /// non-positive value, division by zero, `coth` at zero, fractional
    /// power of a non-positive base).
    Domain {
        op: &'static str,
        arg: f64,
        expr: String,
    },
    /// A parameter declared by the expression was not bound at evaluation.
    UnboundParameter(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain { op, arg, expr } => {
                write!(f, "domain error: {} of {} in `{}`", op, arg, expr)
            }
            EvalError::UnboundParameter(name) => write!(f, "parameter '{}' is not bound", name),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

impl Expression {
    /// Parse `text` against the declared variable and parameter names.
    pub fn parse(text: &str, variables: &[&str], parameters: &[&str]) -> Result<Expression, ParseError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
            vars: variables,
            params: parameters,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err_here(ParseErrorKind::UnexpectedChar(p.src[p.pos] as char)));
        }
        Ok(Expression {
            vars: variables.iter().map(|s| (*s).to_owned()).collect(),
            params: parameters.iter().map(|s| (*s).to_owned()).collect(),
            root,
        })
    }

    /// Build an expression from an explicit tree, validating symbol indices
    /// and the constant-exponent restriction.
    pub fn from_parts(vars: Vec<String>, params: Vec<String>, root: Node) -> Result<Expression, AstError> {
        fn check(n: &Node, nv: usize, np: usize) -> Result<(), AstError> {
            match n {
                Node::Num(_) => Ok(()),
                Node::Var(i) => {
                    if *i < nv {
                        Ok(())
                    } else {
                        Err(AstError::VarIndexOutOfRange(*i))
                    }
                }
                Node::Param(i) => {
                    if *i < np {
                        Ok(())
                    } else {
                        Err(AstError::ParamIndexOutOfRange(*i))
                    }
                }
                Node::Unary(_, a) => check(a, nv, np),
                Node::Binary(BinaryOp::Pow, a, b) => {
                    if !matches!(**b, Node::Num(_)) {
                        return Err(AstError::NonConstantExponent);
                    }
                    check(a, nv, np)
                }
                Node::Binary(_, a, b) => {
                    check(a, nv, np)?;
                    check(b, nv, np)
                }
            }
        }
        check(&root, vars.len(), params.len())?;
        Ok(Expression { vars, params, root })
    }

    /// Declared variable names, in seed order (`x` then `y`).
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Declared parameter names.
    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// Root of the tree.
    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Replace every variable by the corresponding node (over the same
    /// symbol tables). Used to compose a graph function with an affine
    /// change of coordinates.
    pub fn substitute_vars(&self, subs: &[Node]) -> Result<Expression, AstError> {
        assert_eq!(subs.len(), self.vars.len(), "one replacement per variable");
        fn walk(n: &Node, subs: &[Node]) -> Node {
            match n {
                Node::Num(c) => Node::Num(*c),
                Node::Var(i) => subs[*i].clone(),
                Node::Param(i) => Node::Param(*i),
                Node::Unary(op, a) => Node::Unary(*op, Box::new(walk(a, subs))),
                Node::Binary(op, a, b) => {
                    Node::Binary(*op, Box::new(walk(a, subs)), Box::new(walk(b, subs)))
                }
            }
        }
        Expression::from_parts(self.vars.clone(), self.params.clone(), walk(&self.root, subs))
    }

    /// Same expression with a different root (shares the symbol tables).
    pub fn with_root(&self, root: Node) -> Result<Expression, AstError> {
        Expression::from_parts(self.vars.clone(), self.params.clone(), root)
    }

    fn render(&self, n: &Node, out: &mut String) {
        // Precedence: additive 1, multiplicative 2, power 3, atoms 4.
        fn prec(n: &Node) -> u8 {
            match n {
                Node::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
                Node::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
                Node::Binary(BinaryOp::Pow, ..) => 3,
                Node::Unary(UnaryOp::Neg, _) => 3,
                Node::Num(c) if *c < 0.0 => 0,
                _ => 4,
            }
        }
        fn go(e: &Expression, n: &Node, out: &mut String, min_prec: u8) {
            let wrap = prec(n) < min_prec;
            if wrap {
                out.push('(');
            }
            match n {
                Node::Num(c) => {
                    use fmt::Write;
                    write!(out, "{}", c).unwrap();
                }
                Node::Var(i) => out.push_str(&e.vars[*i]),
                Node::Param(i) => out.push_str(&e.params[*i]),
                Node::Unary(UnaryOp::Neg, a) => {
                    out.push('-');
                    go(e, a, out, 4);
                }
                Node::Unary(op, a) => {
                    out.push_str(op.name());
                    out.push('(');
                    go(e, a, out, 0);
                    out.push(')');
                }
                Node::Binary(op, a, b) => {
                    let (sym, p) = match op {
                        BinaryOp::Add => (" + ", 1),
                        BinaryOp::Sub => (" - ", 1),
                        BinaryOp::Mul => ("*", 2),
                        BinaryOp::Div => ("/", 2),
                        BinaryOp::Pow => ("^", 3),
                    };
                    go(e, a, out, p);
                    out.push_str(sym);
                    // Left associative: the right operand of '-' and '/'
                    // needs strictly higher precedence.
                    go(e, b, out, p + 1);
                }
            }
            if wrap {
                out.push(')');
            }
        }
        go(self, n, out, 0)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(&self.root, &mut s);
        f.write_str(&s)
    }
}

/// Collect the identifiers of `text` that are used as variables or
/// parameters (function names applied to an argument list are skipped).
/// Order of first appearance, without duplicates. Helps a caller declare
/// symbol tables before parsing free-form input.
pub fn scan_identifiers(text: &str) -> Vec<String> {
    let b = text.as_bytes();
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let name = &text[start..i];
            let mut j = i;
            while j < b.len() && b[j].is_ascii_whitespace() {
                j += 1;
            }
            let is_call = j < b.len() && b[j] == b'(';
            if !(is_call && UnaryOp::from_name(name).is_some())
                && !out.iter().any(|s| s == name)
            {
                out.push(name.to_string());
            }
        } else if c.is_ascii_digit() {
            // skip a numeric literal, including any exponent part, so the
            // 'e' of `1e-3` is not picked up as an identifier
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
        } else {
            i += 1;
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
    params: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            offset: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'+' => BinaryOp::Add,
                b'-' => BinaryOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'*' => BinaryOp::Mul,
                b'/' => BinaryOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let exponent = self.base()?;
            let c = match fold_const(&exponent) {
                Some(c) => c,
                None => {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::NonConstantExponent,
                    })
                }
            };
            return Ok(Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(Node::Num(c))));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.err_here(ParseErrorKind::UnexpectedEnd)),
        };
        match c {
            b'-' => {
                self.pos += 1;
                let inner = self.base()?;
                // fold a negated literal so printing round-trips exactly
                Ok(match inner {
                    Node::Num(v) => Node::Num(-v),
                    other => Node::neg(other),
                })
            }
            b'(' => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            b'0'..=b'9' => self.number(),
            c if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            other => Err(self.err_here(ParseErrorKind::UnexpectedChar(other as char))),
        }
    }

    fn expect(&mut self, want: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.err_here(ParseErrorKind::UnexpectedChar(c as char))),
            None => Err(self.err_here(ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // optional exponent, only when followed by digits
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut j = self.pos + 1;
            if j < self.src.len() && (self.src[j] == b'+' || self.src[j] == b'-') {
                j += 1;
            }
            if j < self.src.len() && self.src[j].is_ascii_digit() {
                self.pos = j;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii span");
        match text.parse::<f64>() {
            Ok(v) => Ok(Node::Num(v)),
            Err(_) => Err(ParseError {
                offset: start,
                kind: ParseErrorKind::InvalidNumber,
            }),
        }
    }

    fn ident(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii span");
        if self.peek() == Some(b'(') {
            let op = match UnaryOp::from_name(name) {
                Some(op) => op,
                None => {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::NotAFunction(name.to_owned()),
                    })
                }
            };
            self.pos += 1;
            let arg = self.expr()?;
            self.expect(b')')?;
            return Ok(Node::Unary(op, Box::new(arg)));
        }
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(i));
        }
        if let Some(i) = self.params.iter().position(|p| *p == name) {
            return Ok(Node::Param(i));
        }
        Err(ParseError {
            offset: start,
            kind: ParseErrorKind::UnknownIdentifier(name.to_owned()),
        })
    }
}

fn fold_const(n: &Node) -> Option<f64> {
    match n {
        Node::Num(c) => Some(*c),
        Node::Unary(UnaryOp::Neg, a) => fold_const(a).map(|c| -c),
        _ => None,
    }
}

/// Evaluate `e` and all partial derivatives up to order three at `(x, y)`.
/// The first declared variable seeds the `x` slot, the second the `y` slot;
/// a one-variable expression (a profile curve) simply has vanishing
/// `y`-derivatives.
pub fn eval_jet3(
    e: &Expression,
    x: f64,
    y: f64,
    params: &BTreeMap<String, f64>,
) -> Result<Jet3, EvalError> {
    let bound = bind_params(e, params)?;
    eval_node(e, &e.root, x, y, &bound)
}

/// Evaluate only the value of `e` at `(x, y)`. Cheaper than [`eval_jet3`];
/// this is what finite-difference cross checks sample.
pub fn eval_scalar(
    e: &Expression,
    x: f64,
    y: f64,
    params: &BTreeMap<String, f64>,
) -> Result<f64, EvalError> {
    let bound = bind_params(e, params)?;
    eval_value(e, &e.root, x, y, &bound)
}

fn bind_params(e: &Expression, params: &BTreeMap<String, f64>) -> Result<Vec<f64>, EvalError> {
    e.params
        .iter()
        .map(|name| {
            params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundParameter(name.clone()))
        })
        .collect()
}

fn domain_err(e: &Expression, n: &Node, op: &'static str, arg: f64) -> EvalError {
    let mut s = String::new();
    e.render(n, &mut s);
    EvalError::Domain { op, arg, expr: s }
}

/// Domain checks shared by the jet and scalar evaluators. Returns an error
/// description for `op` applied to the value `v`, or `None` if admissible.
fn check_domain(op: UnaryOp, v: f64) -> Option<&'static str> {
    match op {
        UnaryOp::Sqrt if v <= 0.0 => Some("sqrt"),
        UnaryOp::Ln if v <= 0.0 => Some("ln"),
        UnaryOp::Coth if v == 0.0 => Some("coth"),
        _ => None,
    }
}

fn eval_node(e: &Expression, n: &Node, x: f64, y: f64, params: &[f64]) -> Result<Jet3, EvalError> {
    Ok(match n {
        Node::Num(c) => Jet3::constant(*c),
        Node::Var(0) => Jet3::x(x),
        Node::Var(_) => Jet3::y(y),
        Node::Param(i) => Jet3::constant(params[*i]),
        Node::Unary(op, a) => {
            let ja = eval_node(e, a, x, y, params)?;
            if let Some(name) = check_domain(*op, ja.v) {
                return Err(domain_err(e, n, name, ja.v));
            }
            match op {
                UnaryOp::Neg => -ja,
                UnaryOp::Sqrt => ja.sqrt(),
                UnaryOp::Ln => ja.ln(),
                UnaryOp::Exp => ja.exp(),
                UnaryOp::Sin => ja.sin(),
                UnaryOp::Cos => ja.cos(),
                UnaryOp::Sinh => ja.sinh(),
                UnaryOp::Cosh => ja.cosh(),
                UnaryOp::Tanh => ja.tanh(),
                UnaryOp::Coth => ja.coth(),
            }
        }
        Node::Binary(op, a, b) => {
            let ja = eval_node(e, a, x, y, params)?;
            match op {
                BinaryOp::Add => ja + eval_node(e, b, x, y, params)?,
                BinaryOp::Sub => ja - eval_node(e, b, x, y, params)?,
                BinaryOp::Mul => ja * eval_node(e, b, x, y, params)?,
                BinaryOp::Div => {
                    let jb = eval_node(e, b, x, y, params)?;
                    if jb.v == 0.0 {
                        return Err(domain_err(e, n, "division by zero", jb.v));
                    }
                    ja / jb
                }
                BinaryOp::Pow => {
                    let c = match **b {
                        Node::Num(c) => c,
                        _ => unreachable!("exponent is a literal by construction"),
                    };
                    if fmath::fract(c) == 0.0 && c.abs() <= i32::MAX as f64 {
                        let k = c as i32;
                        if k < 0 && ja.v == 0.0 {
                            return Err(domain_err(e, n, "negative power of zero", ja.v));
                        }
                        ja.powi(k)
                    } else {
                        if ja.v <= 0.0 {
                            return Err(domain_err(e, n, "fractional power of non-positive base", ja.v));
                        }
                        ja.powf(c)
                    }
                }
            }
        }
    })
}

fn eval_value(e: &Expression, n: &Node, x: f64, y: f64, params: &[f64]) -> Result<f64, EvalError> {
    Ok(match n {
        Node::Num(c) => *c,
        Node::Var(0) => x,
        Node::Var(_) => y,
        Node::Param(i) => params[*i],
        Node::Unary(op, a) => {
            let v = eval_value(e, a, x, y, params)?;
            if let Some(name) = check_domain(*op, v) {
                return Err(domain_err(e, n, name, v));
            }
            match op {
                UnaryOp::Neg => -v,
                UnaryOp::Sqrt => fmath::sqrt(v),
                UnaryOp::Ln => fmath::ln(v),
                UnaryOp::Exp => fmath::exp(v),
                UnaryOp::Sin => fmath::sin(v),
                UnaryOp::Cos => fmath::cos(v),
                UnaryOp::Sinh => fmath::sinh(v),
                UnaryOp::Cosh => fmath::cosh(v),
                UnaryOp::Tanh => fmath::tanh(v),
                UnaryOp::Coth => fmath::cosh(v) / fmath::sinh(v),
            }
        }
        Node::Binary(op, a, b) => {
            let va = eval_value(e, a, x, y, params)?;
            match op {
                BinaryOp::Add => va + eval_value(e, b, x, y, params)?,
                BinaryOp::Sub => va - eval_value(e, b, x, y, params)?,
                BinaryOp::Mul => va * eval_value(e, b, x, y, params)?,
                BinaryOp::Div => {
                    let vb = eval_value(e, b, x, y, params)?;
                    if vb == 0.0 {
                        return Err(domain_err(e, n, "division by zero", vb));
                    }
                    va / vb
                }
                BinaryOp::Pow => {
                    let c = match **b {
                        Node::Num(c) => c,
                        _ => unreachable!("exponent is a literal by construction"),
                    };
                    if fmath::fract(c) == 0.0 && c.abs() <= i32::MAX as f64 {
                        let k = c as i32;
                        if k < 0 && va == 0.0 {
                            return Err(domain_err(e, n, "negative power of zero", va));
                        }
                        fmath::powi(va, k)
                    } else {
                        if va <= 0.0 {
                            return Err(domain_err(e, n, "fractional power of non-positive base", va));
                        }
                        fmath::powf(va, c)
                    }
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params_of(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect()
    }

    fn jet(text: &str, x: f64, y: f64) -> Jet3 {
        let e = Expression::parse(text, &["x", "y"], &[]).unwrap();
        eval_jet3(&e, x, y, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn parses_product_quotient_shape() {
        let e = Expression::parse("x*y/2", &["x", "y"], &[]).unwrap();
        let expected = Node::div(Node::mul(Node::var(0), Node::var(1)), Node::num(2.0));
        assert_eq!(*e.root(), expected);
    }

    #[test]
    fn parses_saddle_expression_with_parameter() {
        let text = "x*y/2 + k*(ln(y + sqrt(1 + y^2)) + y*sqrt(1 + y^2))";
        let e = Expression::parse(text, &["x", "y"], &["k"]).unwrap();
        let j = eval_jet3(&e, 0.3, -0.4, &params_of(&[("k", 1.0)])).unwrap();
        assert!(j.v.is_finite());
    }

    #[test]
    fn incomplete_input_reports_offset() {
        let err = Expression::parse("x*", &["x", "y"], &[]).unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
    }

    #[test]
    fn unknown_identifier_reports_name_and_offset() {
        let err = Expression::parse("x + foo", &["x", "y"], &[]).unwrap_err();
        assert_eq!(err.offset, 4);
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
    }

    #[test]
    fn variable_used_as_function_is_rejected() {
        let err = Expression::parse("x(2)", &["x", "y"], &[]).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NotAFunction("x".into()));
    }

    #[test]
    fn non_constant_exponent_is_rejected() {
        let err = Expression::parse("x^y", &["x", "y"], &[]).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonConstantExponent);
    }

    #[test]
    fn print_parse_round_trips() {
        let samples = [
            "x*y/2",
            "x*y/2 + k*(ln(y + sqrt(1 + y^2)) + y*sqrt(1 + y^2))",
            "-x",
            "-(x*y)",
            "x^-2",
            "x^2.5",
            "(x + y)/(x - y)",
            "a*x + b*y + c",
            "coth(x) - 2*x",
            "sin(x)*cosh(y) + x^3*y",
            "1 - 2 - 3",
            "x/(y*y)/2",
        ];
        for text in samples {
            let vars: Vec<&str> = alloc::vec!["x", "y"];
            let idents = scan_identifiers(text);
            let params: Vec<&str> = idents
                .iter()
                .map(|s| s.as_str())
                .filter(|s| *s != "x" && *s != "y")
                .collect();
            let e = Expression::parse(text, &vars, &params).unwrap();
            let printed = alloc::format!("{}", e);
            let e2 = Expression::parse(&printed, &vars, &params).unwrap();
            assert_eq!(e, e2, "round trip of `{}` via `{}`", text, printed);
        }
    }

    #[test]
    fn scan_identifiers_skips_functions_and_exponents() {
        let ids = scan_identifiers("x*y/2 + k*(ln(y + sqrt(1 + y^2)) + 1e-3*beta)");
        assert_eq!(ids, alloc::vec!["x".to_owned(), "y".to_owned(), "k".to_owned(), "beta".to_owned()]);
    }

    #[test]
    fn jet_of_saddle_term() {
        let j = jet("x*y/2", 1.0, 2.0);
        assert_eq!(j.v, 1.0);
        assert_eq!(j.dx, 1.0);
        assert_eq!(j.dy, 0.5);
        assert_eq!(j.dxy, 0.5);
        for (i, entry) in j.entries().iter().enumerate() {
            if ![0, 1, 2, 4].contains(&i) {
                assert_eq!(*entry, 0.0, "entry {}", i);
            }
        }
    }

    #[test]
    fn jet_of_constant_is_flat() {
        let j = jet("3.25", 0.7, -0.2);
        assert_eq!(j.v, 3.25);
        assert!(j.entries()[1..].iter().all(|d| *d == 0.0));
    }

    #[test]
    fn jet_of_inverse_hyperbolic_sine_at_zero() {
        // ln(y + sqrt(1 + y^2)) = y - y^3/6 + ...
        let j = jet("ln(y + sqrt(1 + y^2))", 0.0, 0.0);
        assert_abs_diff_eq!(j.v, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dy, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dyy, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dyyy, -1.0, epsilon = 1e-15);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn jet_of_inverse_hyperbolic_sine_at_point() {
        // reference values computed with exact symbolic differentiation
        let j = jet("ln(y + sqrt(1 + y^2))", 0.0, 0.4);
        assert_abs_diff_eq!(j.v, 0.39003531977071527608, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dy, 0.92847669088525931573, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dyy, -0.32016437616733079853, epsilon = 1e-14);
        assert_abs_diff_eq!(j.dyyy, -0.46920641334867444612, epsilon = 1e-14);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn jet_matches_symbolic_reference() {
        // sin(x)*cosh(y) + x^3*y at (0.3, -0.7), exact reference values
        let j = jet("sin(x)*cosh(y) + x^3*y", 0.3, -0.7);
        let expected = [
            0.35202780393896437757,
            1.0101087510987431155,
            -0.19717681233754294294,
            -1.6309278039389643776,
            -0.45470269042328545795,
            0.37092780393896437757,
            -5.3991087510987431155,
            2.0241768123375429429,
            1.1991087510987431155,
            -0.22417681233754294294,
        ];
        for (got, want) in j.entries().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn domain_errors_report_the_offending_node() {
        let e = Expression::parse("ln(x)", &["x", "y"], &[]).unwrap();
        let err = eval_jet3(&e, -1.5, 0.0, &BTreeMap::new()).unwrap_err();
        match err {
            EvalError::Domain { op, arg, expr } => {
                assert_eq!(op, "ln");
                assert_eq!(arg, -1.5);
                assert_eq!(expr, "ln(x)");
            }
            other => panic!("unexpected error {:?}", other),
        }
        let e = Expression::parse("coth(x)", &["x", "y"], &[]).unwrap();
        assert!(eval_jet3(&e, 0.0, 0.0, &BTreeMap::new()).is_err());
        let e = Expression::parse("1/x", &["x", "y"], &[]).unwrap();
        assert!(eval_jet3(&e, 0.0, 1.0, &BTreeMap::new()).is_err());
    }

    #[test]
    fn unbound_parameter_is_an_error() {
        let e = Expression::parse("k*x", &["x", "y"], &["k"]).unwrap();
        let err = eval_jet3(&e, 1.0, 0.0, &BTreeMap::new()).unwrap_err();
        assert_eq!(err, EvalError::UnboundParameter("k".into()));
    }

    #[test]
    fn scalar_and_jet_values_agree() {
        let e = Expression::parse(
            "sin(x)*cosh(y) + tanh(x*y) - x^3/(2 + cos(y))",
            &["x", "y"],
            &[],
        )
        .unwrap();
        let empty = BTreeMap::new();
        for &(x, y) in &[(0.3, -0.7), (1.1, 0.4), (-0.8, -0.2)] {
            let a = eval_scalar(&e, x, y, &empty).unwrap();
            let b = eval_jet3(&e, x, y, &empty).unwrap().v;
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn integer_powers_are_exact_products() {
        let j = jet("x^3", 2.0, 0.0);
        assert_eq!(j.v, 8.0);
        assert_eq!(j.dx, 12.0);
        assert_eq!(j.dxx, 12.0);
        assert_eq!(j.dxxx, 6.0);
        let j = jet("x^-2", 2.0, 0.0);
        assert_abs_diff_eq!(j.v, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(j.dx, -0.25, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn jet_combination_is_linear(
            a in -3.0..3.0f64,
            b in -3.0..3.0f64,
            x in -1.5..1.5f64,
            y in -1.5..1.5f64,
        ) {
            let e1 = Expression::parse("sin(x)*y", &["x", "y"], &[]).unwrap();
            let e2 = Expression::parse("x*x + cosh(y)", &["x", "y"], &[]).unwrap();
            let combo = Expression::from_parts(
                alloc::vec!["x".to_owned(), "y".to_owned()],
                alloc::vec![],
                Node::add(
                    Node::mul(Node::num(a), e1.root().clone()),
                    Node::mul(Node::num(b), e2.root().clone()),
                ),
            ).unwrap();
            let empty = BTreeMap::new();
            let j1 = eval_jet3(&e1, x, y, &empty).unwrap();
            let j2 = eval_jet3(&e2, x, y, &empty).unwrap();
            let jc = eval_jet3(&combo, x, y, &empty).unwrap();
            for ((c, u), w) in jc.entries().iter().zip(j1.entries()).zip(j2.entries()) {
                prop_assert!((c - (a * u + b * w)).abs() <= 1e-12_f64.max(1e-12 * c.abs()));
            }
        }

        #[test]
        fn product_rule_at_order_one(
            x in -1.5..1.5f64,
            y in -1.5..1.5f64,
        ) {
            let e1 = Expression::parse("sin(x) + y*y", &["x", "y"], &[]).unwrap();
            let e2 = Expression::parse("cosh(y) - x", &["x", "y"], &[]).unwrap();
            let prod = Expression::from_parts(
                alloc::vec!["x".to_owned(), "y".to_owned()],
                alloc::vec![],
                Node::mul(e1.root().clone(), e2.root().clone()),
            ).unwrap();
            let empty = BTreeMap::new();
            let j1 = eval_jet3(&e1, x, y, &empty).unwrap();
            let j2 = eval_jet3(&e2, x, y, &empty).unwrap();
            let jp = eval_jet3(&prod, x, y, &empty).unwrap();
            prop_assert!((jp.dx - (j1.v * j2.dx + j1.dx * j2.v)).abs() < 1e-12);
            prop_assert!((jp.dy - (j1.v * j2.dy + j1.dy * j2.v)).abs() < 1e-12);
        }

        #[test]
        fn quotient_times_divisor_recovers_numerator(
            x in -1.2..1.2f64,
            y in -1.2..1.2f64,
        ) {
            let num = Expression::parse("sin(x)*y + 1", &["x", "y"], &[]).unwrap();
            let den = Expression::parse("2 + cos(x) + y*y", &["x", "y"], &[]).unwrap();
            let quot = Expression::from_parts(
                alloc::vec!["x".to_owned(), "y".to_owned()],
                alloc::vec![],
                Node::div(num.root().clone(), den.root().clone()),
            ).unwrap();
            let empty = BTreeMap::new();
            let jn = eval_jet3(&num, x, y, &empty).unwrap();
            let jd = eval_jet3(&den, x, y, &empty).unwrap();
            let jq = eval_jet3(&quot, x, y, &empty).unwrap();
            let back = jq * jd;
            for (got, want) in back.entries().iter().zip(jn.entries()) {
                prop_assert!((got - want).abs() <= 1e-11_f64.max(1e-11 * want.abs()));
            }
        }
    }
}
