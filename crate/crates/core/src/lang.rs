//! The `.geo` construction language: parser, evaluator, formatter.
//!
//! A script declares a triangle, optional shape constraints, a sequence
//! of single-assignment construction statements, and assertions:
//!
//! ```text
//! triangle ABC;
//! constrain ratio(a, b, c) = 7:9:10;
//! D = gergonne(A, B, C);
//! E = touch(A, B, C);
//! assert colline(A, D, E);
//! ```
//!
//! Multi-valued constructions (`intersect` with a circle, `apollonius`)
//! must be wrapped in `select(...)` with enough selectors to pin one
//! branch; anything else is a parse-time error, so every script denotes
//! a single figure. Scalars `a`, `b`, `c`, `s`, `K` of the declared
//! triangle are always in scope.
//!
//! The grammar is LL(1); see `docs/geo-format.md` for the EBNF.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::apollonius::{self, Constraint as TanConstraint, Selector, TangencyProblem};
use crate::error::GeomError;
use crate::geom::{
    self, dist, foot, intersect_cc, intersect_lc, intersect_ll, line_through, midpoint,
    parallel_through, perpendicular_through, reflect, Circle, GeoObject, Line, Point, Tolerance,
};
use crate::scalar::Scalar;
use crate::triangle::{CenterKind, Triangle, Vertex};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Source location, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LangError {
    #[error("syntax error at {span}: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("unknown function `{name}` at {span}")]
    UnknownFunction { span: Span, name: String },
    #[error("arity error at {span}: {msg}")]
    Arity { span: Span, msg: String },
    #[error("type error at {span}: {msg}")]
    Type { span: Span, msg: String },
    #[error("use of undefined name `{name}` at {span}")]
    UseBeforeDef { span: Span, name: String },
    #[error("`{name}` is already defined (single assignment) at {span}")]
    Rebind { span: Span, name: String },
    #[error("multi-valued construction at {span} must be wrapped in select(...)")]
    MultiNeedsSelect { span: Span },
    #[error("evaluation error at {span}: {source}")]
    Eval { span: Span, source: GeomError },
    #[error("triangle violates script constraint (relative residual {residual:e})")]
    ConstraintViolation { residual: f64 },
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

/// Object kinds the type checker tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Point,
    Line,
    Circle,
    Scalar,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Point => "point",
            Kind::Line => "line",
            Kind::Circle => "circle",
            Kind::Scalar => "scalar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Reference to a bound name.
    Ref(String, Span),
    /// Numeric literal (scalar).
    Num(f64, Span),
    Call {
        name: String,
        args: Vec<Expr>,
        span: Span,
    },
    /// Scalar arithmetic.
    Bin {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        span: Span,
    },
    /// Scalar negation.
    Neg(Box<Expr>, Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ref(_, s) | Expr::Num(_, s) | Expr::Neg(_, s) => *s,
            Expr::Call { span, .. } | Expr::Bin { span, .. } => *span,
        }
    }
}

/// Shape constraints over the side lengths.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintAst {
    /// ratio(a,b,c) = p:q:r — two independent equations.
    Ratio(i64, i64, i64),
    /// angle(V) = deg(value).
    AngleDeg(String, f64),
    /// angle(V1) = k * angle(V2).
    AngleMul(String, i64, String),
    /// lhs = rhs over a, b, c, s and numbers.
    PolyEq(Expr, Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub name: String,
    pub rhs: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub pred: String,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    /// Vertex names from the header, e.g. ["A", "B", "C"].
    pub vertices: [String; 3],
    pub constraints: Vec<ConstraintAst>,
    pub stmts: Vec<Stmt>,
    pub asserts: Vec<Assertion>,
}

// ---------------------------------------------------------------------------
// Function signatures
// ---------------------------------------------------------------------------

/// Signature of a built-in construction function.
#[derive(Debug, Clone, Copy)]
pub struct FnSig {
    pub name: &'static str,
    pub args: &'static [Kind],
    pub ret: Kind,
    /// True when the result is a candidate list requiring select(...).
    pub multi: bool,
}

use Kind::{Circle as KC, Line as KL, Point as KP, Scalar as KS};

/// Fixed-signature builtins. `intersect`, `apollonius` and `select` are
/// polymorphic and handled separately.
pub const BUILTINS: &[FnSig] = &[
    // Centers: first three point args are the triangle; excenter and the
    // cevian-trace functions are relative to the first vertex argument.
    FnSig { name: "gergonne", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "nagel", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "incenter", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "centroid", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "circumcenter", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "orthocenter", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "symmedian", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "mittenpunkt", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "feuerbach", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "ninepointcenter", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "spieker", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "insimilicenter", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "excenter", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "touch", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "nageltrace", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "mixtouch", args: &[KP, KP, KP], ret: KP, multi: false },
    FnSig { name: "mixtouchside", args: &[KP, KP, KP], ret: KP, multi: false },
    // Kernel constructions.
    FnSig { name: "midpoint", args: &[KP, KP], ret: KP, multi: false },
    FnSig { name: "foot", args: &[KP, KL], ret: KP, multi: false },
    FnSig { name: "reflect", args: &[KP, KL], ret: KP, multi: false },
    FnSig { name: "line", args: &[KP, KP], ret: KL, multi: false },
    FnSig { name: "parallel", args: &[KP, KL], ret: KL, multi: false },
    FnSig { name: "perpendicular", args: &[KP, KL], ret: KL, multi: false },
    FnSig { name: "perpbisector", args: &[KP, KP], ret: KL, multi: false },
    FnSig { name: "bisector", args: &[KP, KP, KP], ret: KL, multi: false },
    // Circles.
    FnSig { name: "circle3", args: &[KP, KP, KP], ret: KC, multi: false },
    FnSig { name: "circle2", args: &[KP, KP], ret: KC, multi: false },
    FnSig { name: "incircle", args: &[KP, KP, KP], ret: KC, multi: false },
    FnSig { name: "circumcircle", args: &[KP, KP, KP], ret: KC, multi: false },
    FnSig { name: "ninepointcircle", args: &[KP, KP, KP], ret: KC, multi: false },
    FnSig { name: "excircle", args: &[KP, KP, KP], ret: KC, multi: false },
    FnSig { name: "mixtilinear", args: &[KP, KP, KP], ret: KC, multi: false },
    FnSig { name: "center", args: &[KC], ret: KP, multi: false },
    // Measures.
    FnSig { name: "dist", args: &[KP, KP], ret: KS, multi: false },
    FnSig { name: "area", args: &[KP, KP, KP], ret: KS, multi: false },
    FnSig { name: "quadarea", args: &[KP, KP, KP, KP], ret: KS, multi: false },
    FnSig { name: "angle", args: &[KP, KP, KP], ret: KS, multi: false },
    FnSig { name: "radius", args: &[KC], ret: KS, multi: false },
    FnSig { name: "inradius", args: &[KP, KP, KP], ret: KS, multi: false },
    FnSig { name: "circumradius", args: &[KP, KP, KP], ret: KS, multi: false },
];

pub fn builtin(name: &str) -> Option<&'static FnSig> {
    BUILTINS.iter().find(|f| f.name == name)
}

/// Selector names and their point-argument counts.
const SELECTORS: &[(&str, usize)] = &[
    ("nearest", 1),
    ("farthest", 1),
    ("other", 1),
    ("inside", 3),
    ("insideangle", 3),
    ("internal", 0),
    ("external", 0),
    ("smallest", 0),
    ("largest", 0),
];

/// Assertion predicate names with argument kinds; `on`, `tangent` and
/// `eq` are checked specially.
const PREDICATES: &[(&str, &[Kind])] = &[
    ("colline", &[KP, KP, KP]),
    ("concur", &[KL, KL, KL]),
    ("parallel", &[KL, KL]),
    ("perpendicular", &[KL, KL]),
    ("coincide", &[KP, KP]),
    ("congruent", &[KC, KC]),
];

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Sym(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> Result<Vec<Token>, LangError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let span = Span { line, col };
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                // Comment to end of line.
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Ident(s),
                    span,
                });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() || c == '.' {
                        s.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let v: f64 = s.parse().map_err(|_| LangError::Syntax {
                    span,
                    msg: format!("bad number literal `{s}`"),
                })?;
                out.push(Token {
                    tok: Tok::Number(v),
                    span,
                });
            }
            c if "();,=:+-*/^".contains(c) => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::Sym(c),
                    span,
                });
            }
            c => {
                return Err(LangError::Syntax {
                    span,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span { line, col },
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser (recursive descent, LL(1)) with integrated type checking
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Symbol table: name -> kind.
    syms: HashMap<String, Kind>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> LangError {
        LangError::Syntax {
            span: self.peek().span,
            msg: msg.into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), LangError> {
        match self.next().tok {
            Tok::Sym(s) if s == c => Ok(()),
            other => Err(LangError::Syntax {
                span: self.toks[self.pos - 1].span,
                msg: format!("expected `{c}`, found {other:?}"),
            }),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Span), LangError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(LangError::Syntax {
                span: t.span,
                msg: format!("expected identifier, found {other:?}"),
            }),
        }
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.peek().tok, Tok::Sym(s) if s == c)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_integer(&mut self) -> Result<i64, LangError> {
        let t = self.next();
        match t.tok {
            Tok::Number(v) if v.fract() == 0.0 => Ok(v as i64),
            other => Err(LangError::Syntax {
                span: t.span,
                msg: format!("expected integer, found {other:?}"),
            }),
        }
    }

    fn script(&mut self) -> Result<Script, LangError> {
        // Header: triangle ABC;
        if !self.at_keyword("triangle") {
            return Err(self.err("script must start with `triangle <Vertices>;`"));
        }
        self.next();
        let (name, span) = self.expect_ident()?;
        let letters: Vec<char> = name.chars().collect();
        if letters.len() != 3
            || letters.iter().any(|c| !c.is_ascii_uppercase())
            || letters[0] == letters[1]
            || letters[1] == letters[2]
            || letters[0] == letters[2]
        {
            return Err(LangError::Syntax {
                span,
                msg: "triangle header needs three distinct uppercase vertex letters".into(),
            });
        }
        self.expect_sym(';')?;
        let vertices = [
            letters[0].to_string(),
            letters[1].to_string(),
            letters[2].to_string(),
        ];
        for v in &vertices {
            self.syms.insert(v.clone(), Kind::Point);
        }
        for sc in ["a", "b", "c", "s", "K", "pi"] {
            self.syms.insert(sc.to_string(), Kind::Scalar);
        }

        let mut constraints = Vec::new();
        while self.at_keyword("constrain") {
            self.next();
            constraints.push(self.constraint(&vertices)?);
            self.expect_sym(';')?;
        }

        let mut stmts = Vec::new();
        let mut asserts = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Ident(kw) if kw == "assert" => {
                    self.next();
                    asserts.push(self.assertion()?);
                    self.expect_sym(';')?;
                }
                Tok::Ident(_) => {
                    if !asserts.is_empty() {
                        return Err(self.err("statements must precede assertions"));
                    }
                    stmts.push(self.stmt()?);
                    self.expect_sym(';')?;
                }
                other => return Err(self.err(format!("unexpected token {other:?}"))),
            }
        }
        Ok(Script {
            vertices,
            constraints,
            stmts,
            asserts,
        })
    }

    fn constraint(&mut self, vertices: &[String; 3]) -> Result<ConstraintAst, LangError> {
        if self.at_keyword("ratio") {
            self.next();
            self.expect_sym('(')?;
            for (i, want) in ["a", "b", "c"].iter().enumerate() {
                let (got, sp) = self.expect_ident()?;
                if got != *want {
                    return Err(LangError::Syntax {
                        span: sp,
                        msg: format!("ratio constraint must be over (a, b, c), got `{got}`"),
                    });
                }
                if i < 2 {
                    self.expect_sym(',')?;
                }
            }
            self.expect_sym(')')?;
            self.expect_sym('=')?;
            let p = self.expect_integer()?;
            self.expect_sym(':')?;
            let q = self.expect_integer()?;
            self.expect_sym(':')?;
            let r = self.expect_integer()?;
            return Ok(ConstraintAst::Ratio(p, q, r));
        }
        if self.at_keyword("angle") {
            self.next();
            self.expect_sym('(')?;
            let (v, sp) = self.expect_ident()?;
            if !vertices.contains(&v) {
                return Err(LangError::Syntax {
                    span: sp,
                    msg: format!("`{v}` is not a vertex of the triangle"),
                });
            }
            self.expect_sym(')')?;
            self.expect_sym('=')?;
            if self.at_keyword("deg") {
                self.next();
                self.expect_sym('(')?;
                let t = self.next();
                let val = match t.tok {
                    Tok::Number(x) => x,
                    other => {
                        return Err(LangError::Syntax {
                            span: t.span,
                            msg: format!("expected degree value, found {other:?}"),
                        })
                    }
                };
                self.expect_sym(')')?;
                return Ok(ConstraintAst::AngleDeg(v, val));
            }
            let k = self.expect_integer()?;
            self.expect_sym('*')?;
            if !self.at_keyword("angle") {
                return Err(self.err("expected `angle(V)` after multiplier"));
            }
            self.next();
            self.expect_sym('(')?;
            let (v2, sp2) = self.expect_ident()?;
            if !vertices.contains(&v2) {
                return Err(LangError::Syntax {
                    span: sp2,
                    msg: format!("`{v2}` is not a vertex of the triangle"),
                });
            }
            self.expect_sym(')')?;
            return Ok(ConstraintAst::AngleMul(v, k, v2));
        }
        // Polynomial equality over a, b, c, s.
        let lhs = self.scalar_expr(true)?;
        self.expect_sym('=')?;
        let rhs = self.scalar_expr(true)?;
        Ok(ConstraintAst::PolyEq(lhs, rhs))
    }

    fn stmt(&mut self) -> Result<Stmt, LangError> {
        let (name, span) = self.expect_ident()?;
        if self.syms.contains_key(&name) {
            return Err(LangError::Rebind { span, name });
        }
        self.expect_sym('=')?;
        let rhs = self.expr()?;
        let (kind, multi) = self.kind_of(&rhs)?;
        if multi {
            return Err(LangError::MultiNeedsSelect { span: rhs.span() });
        }
        self.syms.insert(name.clone(), kind);
        Ok(Stmt { name, rhs, span })
    }

    fn assertion(&mut self) -> Result<Assertion, LangError> {
        let (pred, span) = self.expect_ident()?;
        self.expect_sym('(')?;
        let mut args = Vec::new();
        if !self.at_sym(')') {
            loop {
                args.push(self.expr()?);
                if self.at_sym(',') {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect_sym(')')?;
        self.check_predicate(&pred, &args, span)?;
        Ok(Assertion { pred, args, span })
    }

    fn check_predicate(
        &mut self,
        pred: &str,
        args: &[Expr],
        span: Span,
    ) -> Result<(), LangError> {
        let kinds: Vec<Kind> = args
            .iter()
            .map(|a| self.kind_of(a).map(|(k, _)| k))
            .collect::<Result<_, _>>()?;
        if args.iter().any(|a| matches!(self.kind_of(a), Ok((_, true)))) {
            return Err(LangError::MultiNeedsSelect { span });
        }
        if let Some((_, want)) = PREDICATES.iter().find(|(n, _)| *n == pred) {
            if kinds.as_slice() != *want {
                return Err(LangError::Type {
                    span,
                    msg: format!("`{pred}` expects {want:?}, got {kinds:?}"),
                });
            }
            return Ok(());
        }
        match pred {
            "on" => match kinds.as_slice() {
                [Kind::Point, Kind::Line] | [Kind::Point, Kind::Circle] => Ok(()),
                _ => Err(LangError::Type {
                    span,
                    msg: format!("`on` expects (point, line|circle), got {kinds:?}"),
                }),
            },
            "tangent" => match kinds.as_slice() {
                [Kind::Circle, Kind::Circle] | [Kind::Circle, Kind::Line] => Ok(()),
                _ => Err(LangError::Type {
                    span,
                    msg: format!("`tangent` expects (circle, circle|line), got {kinds:?}"),
                }),
            },
            "eq" => match kinds.as_slice() {
                [Kind::Scalar, Kind::Scalar] => Ok(()),
                _ => Err(LangError::Type {
                    span,
                    msg: format!("`eq` expects two scalars, got {kinds:?}"),
                }),
            },
            _ => Err(LangError::UnknownFunction {
                span,
                name: pred.to_string(),
            }),
        }
    }

    /// Result kind of a (type-correct) expression; bool = multi-valued.
    fn kind_of(&self, e: &Expr) -> Result<(Kind, bool), LangError> {
        match e {
            Expr::Num(..) => Ok((Kind::Scalar, false)),
            Expr::Ref(name, span) => self
                .syms
                .get(name)
                .map(|&k| (k, false))
                .ok_or_else(|| LangError::UseBeforeDef {
                    span: *span,
                    name: name.clone(),
                }),
            Expr::Neg(inner, span) => {
                let (k, _) = self.kind_of(inner)?;
                if k != Kind::Scalar {
                    return Err(LangError::Type {
                        span: *span,
                        msg: "negation applies to scalars".into(),
                    });
                }
                Ok((Kind::Scalar, false))
            }
            Expr::Bin { lhs, rhs, span, .. } => {
                for side in [lhs, rhs] {
                    let (k, _) = self.kind_of(side)?;
                    if k != Kind::Scalar {
                        return Err(LangError::Type {
                            span: *span,
                            msg: format!("arithmetic applies to scalars, got {}", k.name()),
                        });
                    }
                }
                Ok((Kind::Scalar, false))
            }
            Expr::Call { name, args, span } => self.check_call(name, args, *span),
        }
    }

    fn check_call(
        &self,
        name: &str,
        args: &[Expr],
        span: Span,
    ) -> Result<(Kind, bool), LangError> {
        // No multi-valued argument anywhere except select's first slot.
        let arg_kind = |i: usize| -> Result<Kind, LangError> {
            let (k, multi) = self.kind_of(&args[i])?;
            if multi {
                return Err(LangError::MultiNeedsSelect {
                    span: args[i].span(),
                });
            }
            Ok(k)
        };
        if let Some(sig) = builtin(name) {
            if args.len() != sig.args.len() {
                return Err(LangError::Arity {
                    span,
                    msg: format!(
                        "`{name}` expects {} arguments, got {}",
                        sig.args.len(),
                        args.len()
                    ),
                });
            }
            for (i, want) in sig.args.iter().enumerate() {
                let got = arg_kind(i)?;
                if got != *want {
                    return Err(LangError::Type {
                        span: args[i].span(),
                        msg: format!(
                            "`{name}` argument {} expects {}, got {}",
                            i + 1,
                            want.name(),
                            got.name()
                        ),
                    });
                }
            }
            return Ok((sig.ret, sig.multi));
        }
        match name {
            "intersect" => {
                if args.len() != 2 {
                    return Err(LangError::Arity {
                        span,
                        msg: format!("`intersect` expects 2 arguments, got {}", args.len()),
                    });
                }
                let (k1, k2) = (arg_kind(0)?, arg_kind(1)?);
                match (k1, k2) {
                    (Kind::Line, Kind::Line) => Ok((Kind::Point, false)),
                    (Kind::Line, Kind::Circle)
                    | (Kind::Circle, Kind::Line)
                    | (Kind::Circle, Kind::Circle) => Ok((Kind::Point, true)),
                    _ => Err(LangError::Type {
                        span,
                        msg: format!(
                            "`intersect` expects lines/circles, got ({}, {})",
                            k1.name(),
                            k2.name()
                        ),
                    }),
                }
            }
            "apollonius" => {
                if args.len() != 3 {
                    return Err(LangError::Arity {
                        span,
                        msg: format!("`apollonius` expects 3 arguments, got {}", args.len()),
                    });
                }
                for i in 0..3 {
                    let k = arg_kind(i)?;
                    if k == Kind::Scalar {
                        return Err(LangError::Type {
                            span: args[i].span(),
                            msg: "`apollonius` constraints are points, lines or circles".into(),
                        });
                    }
                }
                Ok((Kind::Circle, true))
            }
            "select" => {
                if args.is_empty() {
                    return Err(LangError::Arity {
                        span,
                        msg: "`select` needs a candidate expression".into(),
                    });
                }
                let (k, multi) = self.kind_of(&args[0])?;
                if !multi {
                    return Err(LangError::Type {
                        span: args[0].span(),
                        msg: "`select` applies to multi-valued constructions only".into(),
                    });
                }
                if args.len() == 1 {
                    return Err(LangError::Arity {
                        span,
                        msg: "`select` needs at least one selector".into(),
                    });
                }
                for sel in &args[1..] {
                    self.check_selector(sel)?;
                }
                Ok((k, false))
            }
            _ => Err(LangError::UnknownFunction {
                span,
                name: name.to_string(),
            }),
        }
    }

    fn check_selector(&self, e: &Expr) -> Result<(), LangError> {
        let (name, args, span) = match e {
            Expr::Call { name, args, span } => (name.as_str(), args.as_slice(), *span),
            Expr::Ref(name, span) => (name.as_str(), &[] as &[Expr], *span),
            other => {
                return Err(LangError::Type {
                    span: other.span(),
                    msg: "selector expected".into(),
                })
            }
        };
        let Some((_, arity)) = SELECTORS.iter().find(|(n, _)| *n == name) else {
            return Err(LangError::UnknownFunction {
                span,
                name: name.to_string(),
            });
        };
        if args.len() != *arity {
            return Err(LangError::Arity {
                span,
                msg: format!("selector `{name}` expects {arity} point arguments"),
            });
        }
        for a in args {
            let (k, multi) = self.kind_of(a)?;
            if k != Kind::Point || multi {
                return Err(LangError::Type {
                    span: a.span(),
                    msg: format!("selector `{name}` arguments must be points"),
                });
            }
        }
        Ok(())
    }

    // Expression grammar. General expressions are calls/refs; scalar
    // arithmetic (+ - * / ^, unary -) is layered on top and type-checked
    // to scalars afterwards.
    fn expr(&mut self) -> Result<Expr, LangError> {
        self.scalar_expr(false)
    }

    /// `constraint_mode` restricts identifiers to the side-length scalars.
    fn scalar_expr(&mut self, constraint_mode: bool) -> Result<Expr, LangError> {
        let mut lhs = self.term(constraint_mode)?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => break,
            };
            let span = self.peek().span;
            self.next();
            let rhs = self.term(constraint_mode)?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self, cm: bool) -> Result<Expr, LangError> {
        let mut lhs = self.power(cm)?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => break,
            };
            let span = self.peek().span;
            self.next();
            let rhs = self.power(cm)?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span,
            };
        }
        Ok(lhs)
    }

    fn power(&mut self, cm: bool) -> Result<Expr, LangError> {
        let base = self.atom(cm)?;
        if self.at_sym('^') {
            let span = self.peek().span;
            self.next();
            let exp = self.atom(cm)?;
            return Ok(Expr::Bin {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exp),
                span,
            });
        }
        Ok(base)
    }

    fn atom(&mut self, cm: bool) -> Result<Expr, LangError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Sym('-') => {
                self.next();
                let inner = self.atom(cm)?;
                Ok(Expr::Neg(Box::new(inner), t.span))
            }
            Tok::Sym('(') => {
                self.next();
                let inner = self.scalar_expr(cm)?;
                self.expect_sym(')')?;
                Ok(inner)
            }
            Tok::Number(v) => {
                self.next();
                Ok(Expr::Num(v, t.span))
            }
            Tok::Ident(name) => {
                self.next();
                if self.at_sym('(') {
                    if cm {
                        return Err(LangError::Syntax {
                            span: t.span,
                            msg: "function calls are not allowed in constraints".into(),
                        });
                    }
                    self.next();
                    let mut args = Vec::new();
                    if !self.at_sym(')') {
                        loop {
                            args.push(self.expr()?);
                            if self.at_sym(',') {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_sym(')')?;
                    Ok(Expr::Call {
                        name,
                        args,
                        span: t.span,
                    })
                } else {
                    if cm && !["a", "b", "c", "s"].contains(&name.as_str()) {
                        return Err(LangError::Syntax {
                            span: t.span,
                            msg: format!("constraints may only reference a, b, c, s; got `{name}`"),
                        });
                    }
                    Ok(Expr::Ref(name, t.span))
                }
            }
            other => Err(LangError::Syntax {
                span: t.span,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parse and type-check a `.geo` script.
pub fn parse(text: &str) -> Result<Script, LangError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        syms: HashMap::new(),
    };
    p.script()
}

// ---------------------------------------------------------------------------
// Formatter
// ---------------------------------------------------------------------------

fn fmt_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Ref(n, _) => out.push_str(n),
        Expr::Num(v, _) => {
            let _ = write!(out, "{v}");
        }
        Expr::Neg(inner, _) => {
            out.push('-');
            fmt_expr(inner, out);
        }
        Expr::Bin { op, lhs, rhs, .. } => {
            // Fully parenthesized: format is canonical and trivially
            // re-parses to the same tree.
            out.push('(');
            fmt_expr(lhs, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            fmt_expr(rhs, out);
            out.push(')');
        }
        Expr::Call { name, args, .. } => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                fmt_expr(a, out);
            }
            out.push(')');
        }
    }
}

/// Canonical text rendering; `parse(format(s))` structurally equals `s`
/// up to source spans.
pub fn format(s: &Script) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "triangle {}{}{};",
        s.vertices[0], s.vertices[1], s.vertices[2]
    );
    for c in &s.constraints {
        match c {
            ConstraintAst::Ratio(p, q, r) => {
                let _ = writeln!(out, "constrain ratio(a, b, c) = {p}:{q}:{r};");
            }
            ConstraintAst::AngleDeg(v, d) => {
                let _ = writeln!(out, "constrain angle({v}) = deg({d});");
            }
            ConstraintAst::AngleMul(v, k, v2) => {
                let _ = writeln!(out, "constrain angle({v}) = {k} * angle({v2});");
            }
            ConstraintAst::PolyEq(l, r) => {
                out.push_str("constrain ");
                fmt_expr(l, &mut out);
                out.push_str(" = ");
                fmt_expr(r, &mut out);
                out.push_str(";\n");
            }
        }
    }
    for st in &s.stmts {
        out.push_str(&st.name);
        out.push_str(" = ");
        fmt_expr(&st.rhs, &mut out);
        out.push_str(";\n");
    }
    for a in &s.asserts {
        out.push_str("assert ");
        out.push_str(&a.pred);
        out.push('(');
        for (i, arg) in a.args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            fmt_expr(arg, &mut out);
        }
        out.push_str(");\n");
    }
    out
}

/// Structural equality ignoring spans, the round-trip invariant.
pub fn ast_eq(x: &Script, y: &Script) -> bool {
    fn expr_eq(a: &Expr, b: &Expr) -> bool {
        match (a, b) {
            (Expr::Ref(n, _), Expr::Ref(m, _)) => n == m,
            (Expr::Num(v, _), Expr::Num(w, _)) => v == w,
            (Expr::Neg(i, _), Expr::Neg(j, _)) => expr_eq(i, j),
            (
                Expr::Bin {
                    op: o1,
                    lhs: l1,
                    rhs: r1,
                    ..
                },
                Expr::Bin {
                    op: o2,
                    lhs: l2,
                    rhs: r2,
                    ..
                },
            ) => o1 == o2 && expr_eq(l1, l2) && expr_eq(r1, r2),
            (
                Expr::Call {
                    name: n1, args: a1, ..
                },
                Expr::Call {
                    name: n2, args: a2, ..
                },
            ) => n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| expr_eq(x, y)),
            _ => false,
        }
    }
    fn constraint_eq(a: &ConstraintAst, b: &ConstraintAst) -> bool {
        match (a, b) {
            (ConstraintAst::Ratio(p, q, r), ConstraintAst::Ratio(p2, q2, r2)) => {
                p == p2 && q == q2 && r == r2
            }
            (ConstraintAst::AngleDeg(v, d), ConstraintAst::AngleDeg(v2, d2)) => {
                v == v2 && d == d2
            }
            (ConstraintAst::AngleMul(v, k, w), ConstraintAst::AngleMul(v2, k2, w2)) => {
                v == v2 && k == k2 && w == w2
            }
            (ConstraintAst::PolyEq(l, r), ConstraintAst::PolyEq(l2, r2)) => {
                expr_eq(l, l2) && expr_eq(r, r2)
            }
            _ => false,
        }
    }
    x.vertices == y.vertices
        && x.constraints.len() == y.constraints.len()
        && x.constraints
            .iter()
            .zip(&y.constraints)
            .all(|(a, b)| constraint_eq(a, b))
        && x.stmts.len() == y.stmts.len()
        && x.stmts
            .iter()
            .zip(&y.stmts)
            .all(|(a, b)| a.name == b.name && expr_eq(&a.rhs, &b.rhs))
        && x.asserts.len() == y.asserts.len()
        && x.asserts
            .iter()
            .zip(&y.asserts)
            .all(|(a, b)| a.pred == b.pred
                && a.args.len() == b.args.len()
                && a.args.iter().zip(&b.args).all(|(x, y)| expr_eq(x, y)))
}

// ---------------------------------------------------------------------------
// Constraint residuals (shared with the sampler)
// ---------------------------------------------------------------------------

impl ConstraintAst {
    /// Number of scalar equations this constraint contributes.
    pub fn equation_count(&self) -> usize {
        match self {
            ConstraintAst::Ratio(..) => 2,
            _ => 1,
        }
    }

    /// Residual vector at side lengths (a, b, c); zero iff satisfied.
    /// Residuals are smooth in (a, b, c) so Newton solvers apply.
    pub fn residuals<S: Scalar>(&self, a: S, b: S, c: S) -> Vec<S> {
        let s = (a + b + c).half();
        match self {
            ConstraintAst::Ratio(p, q, r) => {
                let (p, q, r) = (S::from_i64(*p), S::from_i64(*q), S::from_i64(*r));
                vec![a * q - b * p, b * r - c * q]
            }
            ConstraintAst::AngleDeg(v, degrees) => {
                // Law of cosines for the angle at `v` (first header vertex
                // is opposite side a, so angle(A) pairs with a).
                let cos_t = S::from_f64(*degrees).radians().cos();
                vec![match v_index(v) {
                    0 => b.sq() + c.sq() - a.sq() - S::two() * b * c * cos_t,
                    1 => c.sq() + a.sq() - b.sq() - S::two() * c * a * cos_t,
                    _ => a.sq() + b.sq() - c.sq() - S::two() * a * b * cos_t,
                }]
            }
            ConstraintAst::AngleMul(v1, k, v2) => {
                let ang = |i: usize| -> S {
                    let cosv = match i {
                        0 => (b.sq() + c.sq() - a.sq()) / (S::two() * b * c),
                        1 => (c.sq() + a.sq() - b.sq()) / (S::two() * c * a),
                        _ => (a.sq() + b.sq() - c.sq()) / (S::two() * a * b),
                    };
                    cosv.acos()
                };
                vec![ang(v_index(v1)) - S::from_i64(*k) * ang(v_index(v2))]
            }
            ConstraintAst::PolyEq(l, r) => {
                let env = |name: &str| -> S {
                    match name {
                        "a" => a,
                        "b" => b,
                        "c" => c,
                        _ => s,
                    }
                };
                vec![eval_scalar_ast(l, &env) - eval_scalar_ast(r, &env)]
            }
        }
    }
}

/// Header-relative vertex index by convention: the constraint sub-
/// language always refers to angles by position (first vertex = 0), and
/// vertex letters in practice are A, B, C.
fn v_index(name: &str) -> usize {
    match name {
        "B" => 1,
        "C" => 2,
        _ => 0,
    }
}

fn eval_scalar_ast<S: Scalar>(e: &Expr, env: &dyn Fn(&str) -> S) -> S {
    match e {
        Expr::Num(v, _) => S::from_f64(*v),
        Expr::Ref(n, _) => env(n),
        Expr::Neg(inner, _) => -eval_scalar_ast(inner, env),
        Expr::Bin { op, lhs, rhs, .. } => {
            let l = eval_scalar_ast(lhs, env);
            let r = eval_scalar_ast(rhs, env);
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => l / r,
                BinOp::Pow => {
                    // Integer exponents only (enforced by usage).
                    let n = r.to_f64() as i64;
                    let mut acc = S::one();
                    for _ in 0..n.unsigned_abs() {
                        acc = acc * l;
                    }
                    if n < 0 {
                        acc.recip()
                    } else {
                        acc
                    }
                }
            }
        }
        Expr::Call { .. } => unreachable!("constraints contain no calls"),
    }
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

/// A definitional fact recorded during evaluation: an incidence or
/// tangency that holds by construction, used by the triviality filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefFact {
    pub kind: &'static str,
    pub operands: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct AssertResult {
    pub index: usize,
    pub pred: String,
    pub pass: bool,
    /// Relative residual of the predicate's defining quantity.
    pub residual: f64,
}

/// One concrete realization of a script.
#[derive(Debug, Clone)]
pub struct Env<S> {
    pub triangle: Triangle<S>,
    pub bindings: Vec<(String, GeoObject<S>)>,
    pub facts: Vec<DefFact>,
    pub asserts: Vec<AssertResult>,
}

impl<S: Scalar> Env<S> {
    pub fn get(&self, name: &str) -> Option<&GeoObject<S>> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }

    pub fn all_asserts_pass(&self) -> bool {
        self.asserts.iter().all(|r| r.pass)
    }
}

/// Candidate list produced by a multi-valued construction, carried only
/// between a construction and its wrapping `select`.
enum Candidates<S: Scalar> {
    Points(Vec<Point<S>>),
    Circles {
        sols: Vec<apollonius::TangencySolution<S>>,
        problem: TangencyProblem<S>,
    },
}

enum Value<S: Scalar> {
    One(GeoObject<S>),
    Many(Candidates<S>),
}

struct Evaluator<S: Scalar> {
    tri: Triangle<S>,
    tol: Tolerance<S>,
    vals: HashMap<String, GeoObject<S>>,
    facts: Vec<DefFact>,
}

/// Evaluate a script on a concrete triangle. The triangle must satisfy
/// the script's constraints; assertion failures are reported in the Env,
/// never as errors.
pub fn evaluate<S: Scalar>(script: &Script, tri: &Triangle<S>) -> Result<Env<S>, LangError> {
    evaluate_with_overrides(script, tri, &HashMap::new())
}

/// Evaluate with selected statements replaced by externally supplied
/// objects (the overridden right-hand side is never evaluated). Used to
/// build baseline figures where a construction-specific element is
/// swapped for a generic one.
pub fn evaluate_with_overrides<S: Scalar>(
    script: &Script,
    tri: &Triangle<S>,
    overrides: &HashMap<String, GeoObject<S>>,
) -> Result<Env<S>, LangError> {
    // Constraint gate, relative to the normalized perimeter.
    let norm = S::from_i64(3) / (tri.a + tri.b + tri.c);
    let (na, nb, nc) = (tri.a * norm, tri.b * norm, tri.c * norm);
    for cst in &script.constraints {
        for r in cst.residuals(na, nb, nc) {
            let r = r.abs().to_f64();
            if r > 1e-6 {
                return Err(LangError::ConstraintViolation { residual: r });
            }
        }
    }

    let mut ev = Evaluator {
        tri: *tri,
        tol: tri.tolerance(),
        vals: HashMap::new(),
        facts: Vec::new(),
    };
    ev.vals
        .insert(script.vertices[0].clone(), GeoObject::Point(tri.va));
    ev.vals
        .insert(script.vertices[1].clone(), GeoObject::Point(tri.vb));
    ev.vals
        .insert(script.vertices[2].clone(), GeoObject::Point(tri.vc));
    for (n, v) in [
        ("a", tri.a),
        ("b", tri.b),
        ("c", tri.c),
        ("s", tri.s),
        ("K", tri.area),
        ("pi", S::pi()),
    ] {
        ev.vals.insert(n.to_string(), GeoObject::Scalar(v));
    }

    let mut bindings: Vec<(String, GeoObject<S>)> = vec![
        (script.vertices[0].clone(), GeoObject::Point(tri.va)),
        (script.vertices[1].clone(), GeoObject::Point(tri.vb)),
        (script.vertices[2].clone(), GeoObject::Point(tri.vc)),
    ];

    for st in &script.stmts {
        if let Some(obj) = overrides.get(&st.name) {
            ev.vals.insert(st.name.clone(), *obj);
            bindings.push((st.name.clone(), *obj));
            continue;
        }
        let v = ev.eval_expr(&st.rhs, Some(&st.name))?;
        let obj = match v {
            Value::One(o) => o,
            Value::Many(_) => {
                return Err(LangError::MultiNeedsSelect {
                    span: st.rhs.span(),
                })
            }
        };
        if !obj.is_finite() {
            return Err(LangError::Eval {
                span: st.span,
                source: GeomError::SolverFailure("non-finite construction result".into()),
            });
        }
        ev.vals.insert(st.name.clone(), obj);
        bindings.push((st.name.clone(), obj));
    }

    let mut asserts = Vec::new();
    for (i, a) in script.asserts.iter().enumerate() {
        let (pass, residual) = ev.eval_assert(a)?;
        asserts.push(AssertResult {
            index: i,
            pred: a.pred.clone(),
            pass,
            residual,
        });
    }

    Ok(Env {
        triangle: *tri,
        bindings,
        facts: ev.facts,
        asserts,
    })
}

impl<S: Scalar> Evaluator<S> {
    fn geo_err(&self, span: Span) -> impl Fn(GeomError) -> LangError {
        move |source| LangError::Eval { span, source }
    }

    /// Name of an expression when it is a plain reference (for fact
    /// recording); anonymous sub-expressions yield "_".
    fn ref_name(e: &Expr) -> String {
        match e {
            Expr::Ref(n, _) => n.clone(),
            _ => "_".into(),
        }
    }

    fn fact(&mut self, kind: &'static str, operands: Vec<String>) {
        self.facts.push(DefFact { kind, operands });
    }

    fn point(&mut self, e: &Expr) -> Result<Point<S>, LangError> {
        match self.eval_expr(e, None)? {
            Value::One(GeoObject::Point(p)) => Ok(p),
            _ => unreachable!("type checked"),
        }
    }

    fn line(&mut self, e: &Expr) -> Result<Line<S>, LangError> {
        match self.eval_expr(e, None)? {
            Value::One(GeoObject::Line(l)) => Ok(l),
            _ => unreachable!("type checked"),
        }
    }

    fn circle(&mut self, e: &Expr) -> Result<Circle<S>, LangError> {
        match self.eval_expr(e, None)? {
            Value::One(GeoObject::Circle(c)) => Ok(c),
            _ => unreachable!("type checked"),
        }
    }

    fn scalar(&mut self, e: &Expr) -> Result<S, LangError> {
        match self.eval_expr(e, None)? {
            Value::One(GeoObject::Scalar(v)) => Ok(v),
            _ => unreachable!("type checked"),
        }
    }

    /// Triangle from three point arguments, preserving vertex order.
    fn arg_triangle(&mut self, args: &[Expr], span: Span) -> Result<Triangle<S>, LangError> {
        let p = self.point(&args[0])?;
        let q = self.point(&args[1])?;
        let r = self.point(&args[2])?;
        Triangle::new(p, q, r).map_err(self.geo_err(span))
    }

    fn eval_expr(&mut self, e: &Expr, target: Option<&str>) -> Result<Value<S>, LangError> {
        match e {
            Expr::Num(v, _) => Ok(Value::One(GeoObject::Scalar(S::from_f64(*v)))),
            Expr::Ref(name, span) => {
                self.vals
                    .get(name)
                    .copied()
                    .map(Value::One)
                    .ok_or_else(|| LangError::UseBeforeDef {
                        span: *span,
                        name: name.clone(),
                    })
            }
            Expr::Neg(inner, _) => {
                let v = self.scalar(inner)?;
                Ok(Value::One(GeoObject::Scalar(-v)))
            }
            Expr::Bin { op, lhs, rhs, .. } => {
                let l = self.scalar(lhs)?;
                let r = self.scalar(rhs)?;
                let v = match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => {
                        let n = r.to_f64() as i64;
                        let mut acc = S::one();
                        for _ in 0..n.unsigned_abs() {
                            acc = acc * l;
                        }
                        if n < 0 {
                            acc.recip()
                        } else {
                            acc
                        }
                    }
                };
                Ok(Value::One(GeoObject::Scalar(v)))
            }
            Expr::Call { name, args, span } => self.eval_call(name, args, *span, target),
        }
    }

    fn eval_call(
        &mut self,
        name: &str,
        args: &[Expr],
        span: Span,
        target: Option<&str>,
    ) -> Result<Value<S>, LangError> {
        let err = self.geo_err(span);
        let center_kinds: &[(&str, CenterKind)] = &[
            ("gergonne", CenterKind::Gergonne),
            ("nagel", CenterKind::Nagel),
            ("incenter", CenterKind::Incenter),
            ("centroid", CenterKind::Centroid),
            ("circumcenter", CenterKind::Circumcenter),
            ("orthocenter", CenterKind::Orthocenter),
            ("symmedian", CenterKind::Symmedian),
            ("mittenpunkt", CenterKind::Mittenpunkt),
            ("feuerbach", CenterKind::Feuerbach),
            ("ninepointcenter", CenterKind::NinePointCenter),
            ("spieker", CenterKind::Spieker),
            ("insimilicenter", CenterKind::Insimilicenter),
            ("excenter", CenterKind::Excenter(Vertex::A)),
        ];
        if let Some((_, kind)) = center_kinds.iter().find(|(n, _)| *n == name) {
            let t = self.arg_triangle(args, span)?;
            return Ok(Value::One(GeoObject::Point(t.center(*kind).map_err(err)?)));
        }
        match name {
            "touch" | "nageltrace" => {
                // First argument names the vertex; trace on the opposite side.
                let t = self.arg_triangle(args, span)?;
                let p = if name == "touch" {
                    t.touch_point(Vertex::A)
                } else {
                    t.nagel_trace(Vertex::A)
                };
                if let Some(out) = target {
                    self.fact(
                        "on-segment",
                        vec![
                            out.into(),
                            Self::ref_name(&args[1]),
                            Self::ref_name(&args[2]),
                        ],
                    );
                }
                Ok(Value::One(GeoObject::Point(p)))
            }
            "mixtouch" => {
                let t = self.arg_triangle(args, span)?;
                let (_, tc, _) = t.mixtilinear_incircle(Vertex::A).map_err(err)?;
                Ok(Value::One(GeoObject::Point(tc)))
            }
            "mixtouchside" => {
                // Tangency of the apex mixtilinear incircle on the side from
                // the apex to the second point argument.
                let t = self.arg_triangle(args, span)?;
                let (_, _, [tp, _]) = t.mixtilinear_incircle(Vertex::A).map_err(err)?;
                if let Some(out) = target {
                    self.fact(
                        "on-segment",
                        vec![
                            out.into(),
                            Self::ref_name(&args[0]),
                            Self::ref_name(&args[1]),
                        ],
                    );
                }
                Ok(Value::One(GeoObject::Point(tp)))
            }
            "midpoint" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                if let Some(out) = target {
                    self.fact(
                        "midpoint",
                        vec![
                            out.into(),
                            Self::ref_name(&args[0]),
                            Self::ref_name(&args[1]),
                        ],
                    );
                }
                Ok(Value::One(GeoObject::Point(midpoint(p, q))))
            }
            "foot" => {
                let p = self.point(&args[0])?;
                let l = self.line(&args[1])?;
                if let Some(out) = target {
                    self.fact("on", vec![out.into(), Self::ref_name(&args[1])]);
                }
                Ok(Value::One(GeoObject::Point(foot(p, &l))))
            }
            "reflect" => {
                let p = self.point(&args[0])?;
                let l = self.line(&args[1])?;
                Ok(Value::One(GeoObject::Point(reflect(p, &l))))
            }
            "line" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                if let Some(out) = target {
                    self.fact(
                        "line-through",
                        vec![
                            out.into(),
                            Self::ref_name(&args[0]),
                            Self::ref_name(&args[1]),
                        ],
                    );
                }
                Ok(Value::One(GeoObject::Line(
                    line_through(p, q, &self.tol).map_err(err)?,
                )))
            }
            "parallel" => {
                let p = self.point(&args[0])?;
                let l = self.line(&args[1])?;
                if let Some(out) = target {
                    self.fact("parallel", vec![out.into(), Self::ref_name(&args[1])]);
                }
                Ok(Value::One(GeoObject::Line(
                    parallel_through(p, &l).map_err(err)?,
                )))
            }
            "perpendicular" => {
                let p = self.point(&args[0])?;
                let l = self.line(&args[1])?;
                if let Some(out) = target {
                    self.fact("perpendicular", vec![out.into(), Self::ref_name(&args[1])]);
                }
                Ok(Value::One(GeoObject::Line(
                    perpendicular_through(p, &l).map_err(err)?,
                )))
            }
            "perpbisector" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                let m = midpoint(p, q);
                let base = line_through(p, q, &self.tol).map_err(&err)?;
                Ok(Value::One(GeoObject::Line(
                    perpendicular_through(m, &base).map_err(err)?,
                )))
            }
            "bisector" => {
                // Internal bisector at the first point of the angle formed
                // with the other two.
                let v = self.point(&args[0])?;
                let p = self.point(&args[1])?;
                let q = self.point(&args[2])?;
                let np = dist(v, p);
                let nq = dist(v, q);
                if !(np > S::zero()) || !(nq > S::zero()) {
                    return Err(err(GeomError::DegenerateInput(
                        "bisector at coincident points".into(),
                    )));
                }
                let ux = (p.x - v.x) / np + (q.x - v.x) / nq;
                let uy = (p.y - v.y) / np + (q.y - v.y) / nq;
                let through = Point::new(v.x + ux, v.y + uy);
                Ok(Value::One(GeoObject::Line(
                    line_through(v, through, &self.tol).map_err(err)?,
                )))
            }
            "circle3" => {
                let t = self.arg_triangle(args, span)?;
                Ok(Value::One(GeoObject::Circle(t.circumcircle().map_err(err)?)))
            }
            "circle2" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                let r = dist(p, q);
                if !(r > S::zero()) {
                    return Err(err(GeomError::DegenerateInput(
                        "circle through its own center".into(),
                    )));
                }
                if let Some(out) = target {
                    self.fact("center-of", vec![Self::ref_name(&args[0]), out.into()]);
                }
                Ok(Value::One(GeoObject::Circle(Circle { center: p, radius: r })))
            }
            "incircle" | "circumcircle" | "ninepointcircle" | "excircle" => {
                let t = self.arg_triangle(args, span)?;
                let c = match name {
                    "incircle" => t.incircle(),
                    "circumcircle" => t.circumcircle(),
                    "ninepointcircle" => t.nine_point_circle(),
                    _ => t.excircle(Vertex::A),
                }
                .map_err(err)?;
                if let Some(out) = target {
                    if name == "incircle" || name == "excircle" {
                        for a in args {
                            self.fact("tangent-side", vec![out.into(), Self::ref_name(a)]);
                        }
                    }
                }
                Ok(Value::One(GeoObject::Circle(c)))
            }
            "mixtilinear" => {
                let t = self.arg_triangle(args, span)?;
                let (c, _, _) = t.mixtilinear_incircle(Vertex::A).map_err(err)?;
                Ok(Value::One(GeoObject::Circle(c)))
            }
            "dist" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                Ok(Value::One(GeoObject::Scalar(dist(p, q))))
            }
            "area" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                let r = self.point(&args[2])?;
                Ok(Value::One(GeoObject::Scalar(
                    geom::signed_area(p, q, r).abs(),
                )))
            }
            "quadarea" => {
                // Shoelace area of the quadrilateral in vertex order,
                // split along the first diagonal with consistent signs
                // so reflex and crossed orderings are handled.
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                let r = self.point(&args[2])?;
                let t = self.point(&args[3])?;
                Ok(Value::One(GeoObject::Scalar(
                    (geom::signed_area(p, q, r) + geom::signed_area(p, r, t)).abs(),
                )))
            }
            "angle" => {
                let p = self.point(&args[0])?;
                let q = self.point(&args[1])?;
                let r = self.point(&args[2])?;
                Ok(Value::One(GeoObject::Scalar(
                    geom::angle(p, q, r).map_err(err)?,
                )))
            }
            "center" => {
                let c = self.circle(&args[0])?;
                if let Some(out) = target {
                    self.fact("center-of", vec![out.into(), Self::ref_name(&args[0])]);
                }
                Ok(Value::One(GeoObject::Point(c.center)))
            }
            "radius" => {
                let c = self.circle(&args[0])?;
                Ok(Value::One(GeoObject::Scalar(c.radius)))
            }
            "inradius" => {
                let t = self.arg_triangle(args, span)?;
                Ok(Value::One(GeoObject::Scalar(t.area / t.s)))
            }
            "circumradius" => {
                let t = self.arg_triangle(args, span)?;
                Ok(Value::One(GeoObject::Scalar(
                    t.a * t.b * t.c / (S::from_i64(4) * t.area),
                )))
            }
            "intersect" => {
                let a = self.eval_expr(&args[0], None)?;
                let b = self.eval_expr(&args[1], None)?;
                let (Value::One(a), Value::One(b)) = (a, b) else {
                    unreachable!("type checked")
                };
                if let Some(out) = target {
                    self.fact("on", vec![out.into(), Self::ref_name(&args[0])]);
                    self.fact("on", vec![out.into(), Self::ref_name(&args[1])]);
                }
                match (a, b) {
                    (GeoObject::Line(l1), GeoObject::Line(l2)) => Ok(Value::One(GeoObject::Point(
                        intersect_ll(&l1, &l2, &self.tol).map_err(err)?,
                    ))),
                    (GeoObject::Line(l), GeoObject::Circle(c))
                    | (GeoObject::Circle(c), GeoObject::Line(l)) => Ok(Value::Many(
                        Candidates::Points(intersect_lc(&l, &c, &self.tol)),
                    )),
                    (GeoObject::Circle(c1), GeoObject::Circle(c2)) => Ok(Value::Many(
                        Candidates::Points(intersect_cc(&c1, &c2, &self.tol).map_err(err)?),
                    )),
                    _ => unreachable!("type checked"),
                }
            }
            "apollonius" => {
                let mut cs = Vec::new();
                for a in args {
                    let Value::One(v) = self.eval_expr(a, None)? else {
                        unreachable!("type checked")
                    };
                    cs.push(match v {
                        GeoObject::Point(p) => TanConstraint::Point(p),
                        GeoObject::Line(l) => TanConstraint::Line(l),
                        GeoObject::Circle(c) => TanConstraint::Circle(c),
                        GeoObject::Scalar(_) => unreachable!("type checked"),
                    });
                }
                let problem = TangencyProblem {
                    constraints: [cs[0], cs[1], cs[2]],
                };
                let sols = apollonius::solve(&problem, &self.tol).map_err(err)?;
                if let Some(out) = target {
                    for a in args {
                        self.fact("tangent-constraint", vec![out.into(), Self::ref_name(a)]);
                    }
                }
                Ok(Value::Many(Candidates::Circles { sols, problem }))
            }
            "select" => {
                let cands = match self.eval_expr(&args[0], target)? {
                    Value::Many(c) => c,
                    Value::One(_) => unreachable!("type checked"),
                };
                self.apply_selectors(cands, &args[1..], span)
            }
            _ => unreachable!("type checked: unknown function"),
        }
    }

    fn apply_selectors(
        &mut self,
        cands: Candidates<S>,
        sels: &[Expr],
        span: Span,
    ) -> Result<Value<S>, LangError> {
        let err = self.geo_err(span);
        // Pre-evaluate selector arguments.
        let mut parsed: Vec<(String, Vec<Point<S>>)> = Vec::new();
        for sel in sels {
            let (name, sargs) = match sel {
                Expr::Call { name, args, .. } => (name.clone(), args.as_slice()),
                Expr::Ref(name, _) => (name.clone(), &[] as &[Expr]),
                _ => unreachable!("type checked"),
            };
            let pts = sargs
                .iter()
                .map(|a| self.point(a))
                .collect::<Result<Vec<_>, _>>()?;
            parsed.push((name, pts));
        }
        match cands {
            Candidates::Circles { sols, problem } => {
                let mut selectors = Vec::new();
                for (name, pts) in &parsed {
                    selectors.push(match name.as_str() {
                        "nearest" => Selector::Nearest(pts[0]),
                        "farthest" => Selector::Farthest(pts[0]),
                        "inside" => Selector::InsideTriangle(pts[0], pts[1], pts[2]),
                        "insideangle" => Selector::InsideAngle {
                            v: pts[0],
                            p: pts[1],
                            q: pts[2],
                        },
                        "internal" => Selector::Internal,
                        "external" => Selector::External,
                        "smallest" => Selector::Smallest,
                        "largest" => Selector::Largest,
                        "other" => {
                            return Err(LangError::Type {
                                span,
                                msg: "`other` selects among points, not circles".into(),
                            })
                        }
                        _ => unreachable!("type checked"),
                    });
                }
                let hit =
                    apollonius::select(&sols, &selectors, &problem, &self.tol).map_err(err)?;
                Ok(Value::One(GeoObject::Circle(hit.circle)))
            }
            Candidates::Points(pts) => {
                let mut alive: Vec<Point<S>> = pts;
                for (name, sargs) in &parsed {
                    let prev = alive.clone();
                    alive.retain(|&p| match name.as_str() {
                        "nearest" => prev
                            .iter()
                            .all(|&q| coords_eq(q, p) || dist(q, sargs[0]) > dist(p, sargs[0])),
                        "farthest" => prev
                            .iter()
                            .all(|&q| coords_eq(q, p) || dist(q, sargs[0]) < dist(p, sargs[0])),
                        "other" => dist(p, sargs[0]) > self.tol.len(),
                        "inside" => {
                            let s1 = geom::cross2(sargs[0], sargs[1], p);
                            let s2 = geom::cross2(sargs[1], sargs[2], p);
                            let s3 = geom::cross2(sargs[2], sargs[0], p);
                            (s1 > S::zero() && s2 > S::zero() && s3 > S::zero())
                                || (s1 < S::zero() && s2 < S::zero() && s3 < S::zero())
                        }
                        "insideangle" => {
                            let sp = geom::cross2(sargs[0], sargs[1], p)
                                * geom::cross2(sargs[0], sargs[1], sargs[2]);
                            let sq = geom::cross2(sargs[0], sargs[2], p)
                                * geom::cross2(sargs[0], sargs[2], sargs[1]);
                            sp > S::zero() && sq > S::zero()
                        }
                        _ => false, // internal/external/smallest/largest: circle-only
                    });
                }
                if alive.len() != 1 {
                    return Err(LangError::Eval {
                        span,
                        source: GeomError::AmbiguousSelection(alive.len()),
                    });
                }
                Ok(Value::One(GeoObject::Point(alive[0])))
            }
        }
    }

    fn eval_assert(&mut self, a: &Assertion) -> Result<(bool, f64), LangError> {
        let tol = self.tol;
        let scale = self.tri.scale().to_f64();
        // Relative residual plus pass/fail under the precision's epsilon.
        let r = match a.pred.as_str() {
            "colline" => {
                let p = self.point(&a.args[0])?;
                let q = self.point(&a.args[1])?;
                let r = self.point(&a.args[2])?;
                geom::cross2(p, q, r).abs().to_f64() / (scale * scale)
            }
            "concur" => {
                let l1 = self.line(&a.args[0])?;
                let l2 = self.line(&a.args[1])?;
                let l3 = self.line(&a.args[2])?;
                let det = l1.a * (l2.b * l3.c - l3.b * l2.c) - l1.b * (l2.a * l3.c - l3.a * l2.c)
                    + l1.c * (l2.a * l3.b - l3.a * l2.b);
                det.abs().to_f64() / scale
            }
            "parallel" => {
                let l1 = self.line(&a.args[0])?;
                let l2 = self.line(&a.args[1])?;
                (l1.a * l2.b - l2.a * l1.b).abs().to_f64()
            }
            "perpendicular" => {
                let l1 = self.line(&a.args[0])?;
                let l2 = self.line(&a.args[1])?;
                (l1.a * l2.a + l1.b * l2.b).abs().to_f64()
            }
            "coincide" => {
                let p = self.point(&a.args[0])?;
                let q = self.point(&a.args[1])?;
                dist(p, q).to_f64() / scale
            }
            "congruent" => {
                let c1 = self.circle(&a.args[0])?;
                let c2 = self.circle(&a.args[1])?;
                (c1.radius - c2.radius).abs().to_f64() / scale
            }
            "on" => {
                let p = self.point(&a.args[0])?;
                match self.eval_expr(&a.args[1], None)? {
                    Value::One(GeoObject::Line(l)) => l.signed_dist(p).abs().to_f64() / scale,
                    Value::One(GeoObject::Circle(c)) => {
                        (dist(p, c.center) - c.radius).abs().to_f64() / scale
                    }
                    _ => unreachable!("type checked"),
                }
            }
            "tangent" => {
                let c1 = self.circle(&a.args[0])?;
                match self.eval_expr(&a.args[1], None)? {
                    Value::One(GeoObject::Circle(c2)) => {
                        let d = dist(c1.center, c2.center);
                        let ext = (d - (c1.radius + c2.radius)).abs();
                        let int = (d - (c1.radius - c2.radius).abs()).abs();
                        ext.min_s(int).to_f64() / scale
                    }
                    Value::One(GeoObject::Line(l)) => {
                        (l.signed_dist(c1.center).abs() - c1.radius).abs().to_f64() / scale
                    }
                    _ => unreachable!("type checked"),
                }
            }
            "eq" => {
                let x = self.scalar(&a.args[0])?;
                let y = self.scalar(&a.args[1])?;
                let mag = x.abs().max_s(y.abs()).max_s(S::one()).to_f64();
                (x - y).abs().to_f64() / mag
            }
            _ => unreachable!("type checked"),
        };
        let _ = tol;
        Ok((r <= S::rel_eps().to_f64(), r))
    }
}

fn coords_eq<S: Scalar>(p: Point<S>, q: Point<S>) -> bool {
    p.x == q.x && p.y == q.y
}
