//! Line-oriented manifold description language.
//!
//! ```text
//! # comment
//! dim 5
//! coords x y z u v
//! frame e1 = exp(-v) d x        # e1 = exp(-v) * d/dx
//! frame e5 = d v
//! metric identity               # or rows: metric 1 0; 0 1
//! xi e5
//! phi e1 -> e3
//! phi e3 -> -e1
//! vector V = x d x + y d y + d v
//! function f = v
//! soliton fit vector=V alpha=1 beta=0 k=k mode=trace
//! ```
//!
//! Frames may instead be declared bare (`frame e1`) and described through
//! their structure functions: `bracket e1 e5 = e1`. Unlisted brackets are
//! zero and `[b, a] = -[a, b]` is implied.
//!
//! Names must be declared before they are referenced: `dim` before
//! `coords`, coordinates before frames, frames before `xi`, `phi` and
//! `bracket`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use kenmotsu_core::expr::{is_ident_char, is_ident_start, lex, parse_tokens, Rational, Token, TokenKind};
use kenmotsu_core::linalg::Matrix;
use kenmotsu_core::soliton::Mode;
use kenmotsu_core::{
    build_manifold, build_manifold_relaxed, CoeffExpr, CoordinateVectorField, Error, FrameAxis,
    FrameSpec, FrameVectorField, FramedManifold, ManifoldSpec,
};

const RESERVED: [&str; 3] = ["d", "exp", "xi"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    Parse { expected: String },
    DuplicateDirective { directive: String },
    UndeclaredCoordinate { name: String },
    UndeclaredFrameField { name: String },
    UnknownName { name: String },
    Build(Error),
}

/// An error with a 1-based position; line 0 denotes a command-line value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslError {
    pub line: usize,
    pub column: usize,
    pub kind: DslErrorKind,
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "argument, column {}: ", self.column)?;
        } else {
            write!(f, "line {}, column {}: ", self.line, self.column)?;
        }
        match &self.kind {
            DslErrorKind::Parse { expected } => write!(f, "expected {expected}"),
            DslErrorKind::DuplicateDirective { directive } => {
                write!(f, "duplicate directive `{directive}`")
            }
            DslErrorKind::UndeclaredCoordinate { name } => {
                write!(f, "undeclared coordinate `{name}`")
            }
            DslErrorKind::UndeclaredFrameField { name } => {
                write!(f, "undeclared frame field `{name}`")
            }
            DslErrorKind::UnknownName { name } => {
                write!(f, "`{name}` is not a declared vector, function or frame field")
            }
            DslErrorKind::Build(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DslError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameDecl {
    pub name: String,
    /// Coordinate pieces of `frame NAME = EXPR d COORD [+ ...]`; `None`
    /// for a bare frame described by brackets.
    pub pieces: Option<Vec<(CoeffExpr, String)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketDecl {
    pub left: String,
    pub right: String,
    /// Rational combination of frame-field symbols.
    pub value: CoeffExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricDecl {
    Identity,
    Rows(Matrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorDecl {
    pub name: String,
    /// `(coefficient, coordinate)` pieces of a coordinate-basis field.
    pub pieces: Vec<(CoeffExpr, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SolitonDecl {
    pub name: String,
    pub vector: Option<String>,
    pub function: Option<String>,
    pub alpha: Option<CoeffExpr>,
    pub beta: Option<CoeffExpr>,
    pub k: Option<CoeffExpr>,
    pub lambda: Option<CoeffExpr>,
    pub mode: Option<Mode>,
    pub star: Option<bool>,
}

/// Parsed directives, without positions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Content {
    pub dim: Option<usize>,
    pub coords: Vec<String>,
    pub frames: Vec<FrameDecl>,
    pub brackets: Vec<BracketDecl>,
    pub metric: Option<MetricDecl>,
    pub xi: Option<CoeffExpr>,
    pub phi: Vec<(String, CoeffExpr)>,
    pub vectors: Vec<VectorDecl>,
    pub functions: Vec<(String, CoeffExpr)>,
    pub solitons: Vec<SolitonDecl>,
}

/// Source text with its parsed directives and their line numbers.
#[derive(Clone, Debug)]
pub struct ManifoldDocument {
    pub source: String,
    pub content: Content,
    lines: BTreeMap<String, usize>,
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl Line<'_> {
    fn column(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].chars().count() + 1
    }

    fn err(&self, offset: usize, kind: DslErrorKind) -> DslError {
        DslError {
            line: self.number,
            column: self.column(offset),
            kind,
        }
    }

    fn expected(&self, offset: usize, what: &str) -> DslError {
        self.err(
            offset,
            DslErrorKind::Parse {
                expected: what.into(),
            },
        )
    }

    /// Whitespace-separated words with their byte offsets.
    fn words(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, c) in self.text.char_indices() {
            match (c.is_whitespace(), start) {
                (true, Some(s)) => {
                    out.push((s, &self.text[s..i]));
                    start = None;
                }
                (false, None) => start = Some(i),
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, &self.text[s..]));
        }
        out
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char)
}

/// Maps a core error inside an expression starting at `base` to a position.
fn expr_error(line: &Line, base: usize, e: Error) -> DslError {
    match e {
        Error::Parse { offset, expected } => line.err(base + offset, DslErrorKind::Parse { expected }),
        other => line.err(base, DslErrorKind::Build(other)),
    }
}

fn lex_at(line: &Line, base: usize) -> Result<Vec<Token>, DslError> {
    lex(&line.text[base..]).map_err(|e| expr_error(line, base, e))
}

fn parse_expr_at(line: &Line, base: usize, end: usize) -> Result<CoeffExpr, DslError> {
    let src = &line.text[base..end];
    let tokens = lex(src).map_err(|e| expr_error(line, base, e))?;
    parse_tokens(&tokens, src.len()).map_err(|e| expr_error(line, base, e))
}

fn ident_offset(tokens: &[Token], name: &str) -> Option<usize> {
    tokens
        .iter()
        .find(|t| matches!(&t.kind, TokenKind::Ident(s) if s == name))
        .map(|t| t.offset)
}

struct Parser {
    content: Content,
    lines: BTreeMap<String, usize>,
}

impl Parser {
    fn once(&mut self, line: &Line, key: String, offset: usize) -> Result<(), DslError> {
        if self.lines.contains_key(&key) {
            return Err(line.err(
                offset,
                DslErrorKind::DuplicateDirective { directive: key },
            ));
        }
        self.lines.insert(key, line.number);
        Ok(())
    }

    fn frame_names(&self) -> Vec<&str> {
        self.content.frames.iter().map(|f| f.name.as_str()).collect()
    }

    fn check_symbols(
        &self,
        line: &Line,
        base: usize,
        e: &CoeffExpr,
    ) -> Result<(), DslError> {
        for s in e.symbols() {
            if !self.content.coords.iter().any(|c| c == s) {
                let tokens = lex_at(line, base)?;
                let at = ident_offset(&tokens, s).map_or(base, |o| base + o);
                return Err(line.err(
                    at,
                    DslErrorKind::UndeclaredCoordinate { name: s.into() },
                ));
            }
        }
        Ok(())
    }

    fn new_name(&self, line: &Line, offset: usize, name: &str) -> Result<(), DslError> {
        if !is_ident(name) || RESERVED.contains(&name) {
            return Err(line.expected(offset, "a name (letters, digits, '_'; not d, exp or xi)"));
        }
        Ok(())
    }

    fn need_coords(&self, line: &Line, offset: usize) -> Result<(), DslError> {
        if self.content.coords.is_empty() {
            return Err(line.expected(offset, "`coords` before this directive"));
        }
        Ok(())
    }

    /// Rational combination of declared frame fields, or `0`.
    fn combination(&self, line: &Line, base: usize) -> Result<CoeffExpr, DslError> {
        let e = parse_expr_at(line, base, line.text.len())?;
        let tokens = lex_at(line, base)?;
        let names = self.frame_names();
        for (monomial, _) in e.term_refs() {
            let powers = monomial.powers();
            let ok = monomial.exp_weights().is_empty()
                && powers.len() == 1
                && powers.values().all(|p| *p == 1);
            if !ok {
                return Err(line.expected(base, "a rational combination of frame fields, or 0"));
            }
            let name = powers.keys().next().expect("one symbol");
            if !names.contains(&name.as_str()) {
                let at = ident_offset(&tokens, name).map_or(base, |o| base + o);
                return Err(line.err(
                    at,
                    DslErrorKind::UndeclaredFrameField { name: name.clone() },
                ));
            }
        }
        Ok(e)
    }

    /// Splits `c1 d x1 + c2 d x2 ...` at each `d COORD` boundary.
    fn pieces(&self, line: &Line, base: usize) -> Result<Vec<(CoeffExpr, String)>, DslError> {
        let tokens = lex_at(line, base)?;
        let mut out = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < tokens.len() {
            let is_d = matches!(&tokens[i].kind, TokenKind::Ident(s) if s == "d");
            if !is_d {
                i += 1;
                continue;
            }
            let Some(Token {
                kind: TokenKind::Ident(coord),
                offset: coord_at,
            }) = tokens.get(i + 1)
            else {
                let at = tokens.get(i + 1).map_or(line.text.len(), |t| base + t.offset);
                return Err(line.expected(at, "a coordinate after `d`"));
            };
            if let Some(next) = tokens.get(i + 2) {
                if !matches!(next.kind, TokenKind::Plus | TokenKind::Minus) {
                    return Err(line.expected(base + next.offset, "'+', '-' or end of line"));
                }
            }
            if !self.content.coords.iter().any(|c| c == coord) {
                return Err(line.err(
                    base + coord_at,
                    DslErrorKind::UndeclaredCoordinate {
                        name: coord.clone(),
                    },
                ));
            }
            let mut coeff_tokens = &tokens[start..i];
            if coeff_tokens.first().is_some_and(|t| t.kind == TokenKind::Plus) {
                coeff_tokens = &coeff_tokens[1..];
            }
            let coeff_base = coeff_tokens.first().map_or(base + tokens[i].offset, |t| base + t.offset);
            let coeff = match coeff_tokens {
                [] => CoeffExpr::one(),
                [Token {
                    kind: TokenKind::Minus,
                    ..
                }] => -CoeffExpr::one(),
                _ => {
                    let rel: Vec<Token> = coeff_tokens
                        .iter()
                        .map(|t| Token {
                            kind: t.kind.clone(),
                            offset: t.offset - (coeff_base - base),
                        })
                        .collect();
                    let end = tokens[i].offset - (coeff_base - base);
                    parse_tokens(&rel, end).map_err(|e| expr_error(line, coeff_base, e))?
                }
            };
            self.check_symbols(line, coeff_base, &coeff)?;
            out.push((coeff, coord.clone()));
            start = i + 2;
            i += 2;
        }
        if start < tokens.len() {
            return Err(line.expected(base + tokens[start].offset, "`d COORD` after the coefficient"));
        }
        if out.is_empty() {
            return Err(line.expected(line.text.len(), "`EXPR d COORD`"));
        }
        Ok(out)
    }

    /// Offset just past `=` (or `->`) following `at`.
    fn after(&self, line: &Line, at: usize, sep: &str) -> Result<usize, DslError> {
        let rest = &line.text[at..];
        let trimmed = rest.trim_start();
        let pos = at + (rest.len() - trimmed.len());
        if !trimmed.starts_with(sep) {
            return Err(line.expected(pos, &format!("`{sep}`")));
        }
        let after = pos + sep.len();
        if line.text[after..].trim().is_empty() {
            return Err(line.expected(line.text.len(), "a value"));
        }
        Ok(after)
    }

    fn directive(&mut self, line: &Line) -> Result<(), DslError> {
        let words = line.words();
        let Some(&(kw_at, kw)) = words.first() else {
            return Ok(());
        };
        let arg = words.get(1).copied();
        let end_of = |w: (usize, &str)| w.0 + w.1.len();
        match kw {
            "dim" => {
                self.once(line, "dim".into(), kw_at)?;
                let (at, w) = arg.ok_or_else(|| line.expected(line.text.len(), "dimension"))?;
                let d: usize = w
                    .parse()
                    .ok()
                    .filter(|d| *d > 0)
                    .ok_or_else(|| line.expected(at, "a positive integer dimension"))?;
                if let Some(&(at, _)) = words.get(2) {
                    return Err(line.expected(at, "end of line"));
                }
                self.content.dim = Some(d);
            }
            "coords" => {
                self.once(line, "coords".into(), kw_at)?;
                let Some(dim) = self.content.dim else {
                    return Err(line.expected(kw_at, "`dim` before `coords`"));
                };
                let mut seen = BTreeSet::new();
                for &(at, w) in &words[1..] {
                    self.new_name(line, at, w)?;
                    if !seen.insert(w) {
                        return Err(line.expected(at, "distinct coordinate names"));
                    }
                }
                if words.len() - 1 != dim {
                    return Err(line.expected(
                        line.text.len(),
                        &format!("{dim} coordinates, found {}", words.len() - 1),
                    ));
                }
                self.content.coords = words[1..].iter().map(|w| w.1.to_string()).collect();
            }
            "frame" => {
                self.need_coords(line, kw_at)?;
                let (at, name) = arg.ok_or_else(|| line.expected(line.text.len(), "frame field name"))?;
                self.new_name(line, at, name)?;
                if self.content.coords.iter().any(|c| c == name) {
                    return Err(line.expected(at, "a frame name distinct from the coordinates"));
                }
                self.once(line, format!("frame {name}"), kw_at)?;
                let pieces = if words.len() == 2 {
                    None
                } else {
                    let base = self.after(line, end_of((at, name)), "=")?;
                    Some(self.pieces(line, base)?)
                };
                self.content.frames.push(FrameDecl {
                    name: name.into(),
                    pieces,
                });
            }
            "bracket" => {
                let (a_at, a) = arg.ok_or_else(|| line.expected(line.text.len(), "two frame fields"))?;
                let (b_at, b) = words
                    .get(2)
                    .copied()
                    .ok_or_else(|| line.expected(line.text.len(), "a second frame field"))?;
                for (at, n) in [(a_at, a), (b_at, b)] {
                    if !self.frame_names().contains(&n) {
                        return Err(line.err(
                            at,
                            DslErrorKind::UndeclaredFrameField { name: n.into() },
                        ));
                    }
                }
                if a == b {
                    return Err(line.expected(b_at, "two distinct frame fields"));
                }
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                self.once(line, format!("bracket {lo} {hi}"), kw_at)?;
                let base = self.after(line, end_of((b_at, b)), "=")?;
                let value = self.combination(line, base)?;
                self.content.brackets.push(BracketDecl {
                    left: a.into(),
                    right: b.into(),
                    value,
                });
            }
            "metric" => {
                self.once(line, "metric".into(), kw_at)?;
                let rest_at = arg.map_or(line.text.len(), |w| w.0);
                if arg.is_some_and(|w| w.1 == "identity") {
                    if let Some(&(at, _)) = words.get(2) {
                        return Err(line.expected(at, "end of line"));
                    }
                    self.content.metric = Some(MetricDecl::Identity);
                } else {
                    let mut rows = Vec::new();
                    let mut row = Vec::new();
                    for &(at, w) in &words[1..] {
                        for (j, piece) in w.split(';').enumerate() {
                            if j > 0 {
                                rows.push(std::mem::take(&mut row));
                            }
                            if piece.is_empty() {
                                continue;
                            }
                            let r: Rational = piece
                                .parse()
                                .map_err(|_| line.expected(at, "a rational matrix entry"))?;
                            row.push(r);
                        }
                    }
                    rows.push(row);
                    if rows.iter().all(Vec::is_empty) {
                        return Err(line.expected(rest_at, "`identity` or matrix rows separated by ';'"));
                    }
                    self.content.metric = Some(MetricDecl::Rows(rows));
                }
            }
            "xi" => {
                self.once(line, "xi".into(), kw_at)?;
                if arg.is_none() {
                    return Err(line.expected(line.text.len(), "a frame field"));
                }
                let base = end_of((kw_at, kw));
                self.content.xi = Some(self.combination(line, base)?);
            }
            "phi" => {
                let (at, name) = arg.ok_or_else(|| line.expected(line.text.len(), "frame field"))?;
                if !self.frame_names().contains(&name) {
                    return Err(line.err(
                        at,
                        DslErrorKind::UndeclaredFrameField { name: name.into() },
                    ));
                }
                self.once(line, format!("phi {name}"), kw_at)?;
                let base = self.after(line, end_of((at, name)), "->")?;
                let image = self.combination(line, base)?;
                self.content.phi.push((name.into(), image));
            }
            "vector" | "function" => {
                self.need_coords(line, kw_at)?;
                let (at, name) = arg.ok_or_else(|| line.expected(line.text.len(), "a name"))?;
                self.new_name(line, at, name)?;
                self.once(line, format!("name {name}"), at)?;
                let base = self.after(line, end_of((at, name)), "=")?;
                if kw == "vector" {
                    let pieces = self.pieces(line, base)?;
                    self.content.vectors.push(VectorDecl {
                        name: name.into(),
                        pieces,
                    });
                } else {
                    let e = parse_expr_at(line, base, line.text.len())?;
                    self.check_symbols(line, base, &e)?;
                    self.content.functions.push((name.into(), e));
                }
            }
            "soliton" => {
                let (at, name) = arg.ok_or_else(|| line.expected(line.text.len(), "a name"))?;
                self.new_name(line, at, name)?;
                self.once(line, format!("soliton {name}"), at)?;
                let mut decl = SolitonDecl {
                    name: name.into(),
                    ..SolitonDecl::default()
                };
                let mut keys = BTreeSet::new();
                for &(at, w) in &words[2..] {
                    let Some((key, value)) = w.split_once('=') else {
                        return Err(line.expected(at, "key=value"));
                    };
                    if !keys.insert(key) {
                        return Err(line.err(
                            at,
                            DslErrorKind::DuplicateDirective {
                                directive: format!("soliton {name} {key}"),
                            },
                        ));
                    }
                    let vat = at + key.len() + 1;
                    if value.is_empty() {
                        return Err(line.expected(vat, "a value"));
                    }
                    let expr = || parse_expr_at(line, vat, vat + value.len());
                    match key {
                        "vector" => decl.vector = Some(value.into()),
                        "function" => decl.function = Some(value.into()),
                        "alpha" => decl.alpha = Some(expr()?),
                        "beta" => decl.beta = Some(expr()?),
                        "k" => decl.k = Some(expr()?),
                        "lambda" => decl.lambda = Some(expr()?),
                        "mode" => {
                            decl.mode = Some(
                                Mode::parse(value)
                                    .ok_or_else(|| line.expected(vat, "exact, trace or xi-trace"))?,
                            )
                        }
                        "star" => {
                            decl.star = Some(match value {
                                "true" => true,
                                "false" => false,
                                _ => return Err(line.expected(vat, "true or false")),
                            })
                        }
                        _ => {
                            return Err(line.expected(
                                at,
                                "one of vector, function, alpha, beta, k, lambda, mode, star",
                            ))
                        }
                    }
                }
                self.content.solitons.push(decl);
            }
            _ => {
                return Err(line.expected(
                    kw_at,
                    "a directive (dim, coords, frame, bracket, metric, xi, phi, vector, function, soliton)",
                ))
            }
        }
        Ok(())
    }
}

pub fn parse_manifold_dsl(text: &str) -> Result<ManifoldDocument, DslError> {
    let mut p = Parser {
        content: Content::default(),
        lines: BTreeMap::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("");
        p.directive(&Line { number: i + 1, text })?;
    }
    let last = text.lines().count().max(1);
    for required in ["dim", "coords", "xi"] {
        if !p.lines.contains_key(required) {
            return Err(DslError {
                line: last,
                column: 1,
                kind: DslErrorKind::Parse {
                    expected: format!("a `{required}` directive"),
                },
            });
        }
    }
    Ok(ManifoldDocument {
        source: text.into(),
        content: p.content,
        lines: p.lines,
    })
}

fn compact(e: &CoeffExpr) -> String {
    e.to_string().replace(' ', "")
}

fn piece_source(c: &CoeffExpr, coord: &str) -> String {
    if c.is_one() {
        format!("d {coord}")
    } else if c.len() == 1 {
        format!("{c} d {coord}")
    } else {
        format!("({c}) d {coord}")
    }
}

fn pieces_source(pieces: &[(CoeffExpr, String)]) -> String {
    let parts: Vec<String> = pieces.iter().map(|(c, x)| piece_source(c, x)).collect();
    parts.join(" + ")
}

/// Sums pieces per coordinate, in coordinate order, dropping zeros.
fn collect_pieces(coords: &[String], pieces: &[(CoeffExpr, String)]) -> Vec<CoeffExpr> {
    let mut comps = vec![CoeffExpr::zero(); coords.len()];
    for (c, coord) in pieces {
        let i = coords.iter().position(|x| x == coord).expect("declared");
        comps[i] += c;
    }
    comps
}

impl Content {
    /// Canonical source text; reparsing it yields equal content.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        let mut push = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        if let Some(d) = self.dim {
            push(format!("dim {d}"));
        }
        if !self.coords.is_empty() {
            push(format!("coords {}", self.coords.join(" ")));
        }
        for f in &self.frames {
            match &f.pieces {
                Some(pieces) => push(format!("frame {} = {}", f.name, pieces_source(pieces))),
                None => push(format!("frame {}", f.name)),
            }
        }
        for b in &self.brackets {
            push(format!("bracket {} {} = {}", b.left, b.right, b.value));
        }
        match &self.metric {
            Some(MetricDecl::Identity) => push("metric identity".into()),
            Some(MetricDecl::Rows(rows)) => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                push(format!("metric {}", rows.join(" ; ")));
            }
            None => {}
        }
        if let Some(xi) = &self.xi {
            push(format!("xi {xi}"));
        }
        for (name, image) in &self.phi {
            push(format!("phi {name} -> {image}"));
        }
        for v in &self.vectors {
            push(format!("vector {} = {}", v.name, pieces_source(&v.pieces)));
        }
        for (name, e) in &self.functions {
            push(format!("function {name} = {e}"));
        }
        for s in &self.solitons {
            let mut parts = vec![format!("soliton {}", s.name)];
            if let Some(v) = &s.vector {
                parts.push(format!("vector={v}"));
            }
            if let Some(v) = &s.function {
                parts.push(format!("function={v}"));
            }
            for (key, value) in [("alpha", &s.alpha), ("beta", &s.beta), ("k", &s.k), ("lambda", &s.lambda)] {
                if let Some(v) = value {
                    parts.push(format!("{key}={}", compact(v)));
                }
            }
            if let Some(m) = s.mode {
                parts.push(format!("mode={}", m.as_str()));
            }
            if let Some(b) = s.star {
                parts.push(format!("star={b}"));
            }
            push(parts.join(" "));
        }
        out
    }
}

fn combination_vector(names: &[String], e: &CoeffExpr) -> Vec<Rational> {
    names
        .iter()
        .map(|n| {
            e.term_refs()
                .find(|(m, _)| m.powers().contains_key(n))
                .map_or_else(|| Rational::from_integer(0.into()), |(_, c)| c.clone())
        })
        .collect()
}

impl ManifoldDocument {
    fn line_of(&self, key: &str) -> usize {
        self.lines.get(key).copied().unwrap_or(1)
    }

    fn build_error(&self, key: &str, e: Error) -> DslError {
        DslError {
            line: self.line_of(key),
            column: 1,
            kind: DslErrorKind::Build(e),
        }
    }

    pub fn frame_names(&self) -> Vec<String> {
        self.content.frames.iter().map(|f| f.name.clone()).collect()
    }

    pub fn manifold_spec(&self) -> Result<ManifoldSpec, DslError> {
        let c = &self.content;
        let dim = c.dim.expect("checked by the parser");
        let names = self.frame_names();
        if names.len() != dim {
            let key = c.frames.last().map_or("dim".into(), |f| format!("frame {}", f.name));
            return Err(self.build_error(
                &key,
                Error::ArityMismatch {
                    what: "frame fields",
                    expected: dim,
                    found: names.len(),
                },
            ));
        }
        let with_axis = c.frames.iter().filter(|f| f.pieces.is_some()).count();
        let frame = if with_axis == dim {
            if let Some(b) = c.brackets.first() {
                let (lo, hi) = if b.left < b.right { (&b.left, &b.right) } else { (&b.right, &b.left) };
                return Err(self.build_error(
                    &format!("bracket {lo} {hi}"),
                    Error::BadStructure("brackets are derived from the frame axes here".into()),
                ));
            }
            let mut axes = Vec::with_capacity(dim);
            for f in &c.frames {
                let comps = collect_pieces(&c.coords, f.pieces.as_deref().expect("all present"));
                let mut support = comps.iter().enumerate().filter(|(_, e)| !e.is_zero());
                match (support.next(), support.next()) {
                    (Some((coord, scale)), None) => axes.push(FrameAxis {
                        coord,
                        scale: scale.clone(),
                    }),
                    _ => {
                        return Err(self.build_error(
                            &format!("frame {}", f.name),
                            Error::BadFrame(format!(
                                "{} must be a multiple of a single coordinate vector field",
                                f.name
                            )),
                        ))
                    }
                }
            }
            FrameSpec::Diagonal(axes)
        } else if with_axis == 0 {
            let mut table = vec![vec![FrameVectorField::zero(dim); dim]; dim];
            for b in &c.brackets {
                let i = names.iter().position(|n| *n == b.left).expect("declared");
                let j = names.iter().position(|n| *n == b.right).expect("declared");
                let v = FrameVectorField::from_rationals(&combination_vector(&names, &b.value));
                table[j][i] = -&v;
                table[i][j] = v;
            }
            FrameSpec::Structure(table)
        } else {
            let f = c.frames.iter().find(|f| f.pieces.is_none()).expect("mixed");
            return Err(self.build_error(
                &format!("frame {}", f.name),
                Error::BadFrame("frames must all have axes or all be bare".into()),
            ));
        };
        let metric = match &c.metric {
            None | Some(MetricDecl::Identity) => None,
            Some(MetricDecl::Rows(r)) => Some(r.clone()),
        };
        let xi = combination_vector(&names, c.xi.as_ref().expect("checked by the parser"));
        let mut phi = vec![vec![Rational::from_integer(0.into()); dim]; dim];
        for (name, image) in &c.phi {
            let i = names.iter().position(|n| n == name).expect("declared");
            phi[i] = combination_vector(&names, image);
        }
        Ok(ManifoldSpec {
            dim,
            coords: c.coords.clone(),
            frame_names: names,
            frame,
            metric,
            xi,
            phi,
        })
    }

    /// Builds the manifold. `strict` enforces `eta(xi) = 1` at build time;
    /// otherwise it is left to the almost contact checks.
    pub fn build(&self, strict: bool) -> Result<FramedManifold, DslError> {
        let spec = self.manifold_spec()?;
        let result = if strict {
            build_manifold(spec)
        } else {
            build_manifold_relaxed(spec)
        };
        result.map_err(|e| {
            let key = match &e {
                Error::XiNotUnit(_) => "xi".to_string(),
                Error::BadMetric(_) => "metric".into(),
                Error::EvenDimension(_) => "dim".into(),
                Error::NonUnitFrameScale { index, .. } => {
                    format!("frame {}", self.content.frames[*index].name)
                }
                Error::BadStructure(_) => self
                    .lines
                    .keys()
                    .find(|k| k.starts_with("bracket "))
                    .cloned()
                    .unwrap_or_else(|| "dim".into()),
                _ => "dim".into(),
            };
            self.build_error(&key, e)
        })
    }

    /// A named vector (`xi`, a frame field or a `vector` declaration) or an
    /// inline `EXPR d COORD + ...` expression, in frame components.
    pub fn resolve_vector(&self, m: &FramedManifold, spec: &str) -> Result<FrameVectorField, DslError> {
        let spec = spec.trim();
        if spec == "xi" {
            return Ok(m.xi().clone());
        }
        if let Some(i) = self.content.frames.iter().position(|f| f.name == spec) {
            return Ok(m.basis(i));
        }
        let pieces = match self.content.vectors.iter().find(|v| v.name == spec) {
            Some(v) => v.pieces.clone(),
            None if is_ident(spec) => {
                return Err(DslError {
                    line: 0,
                    column: 1,
                    kind: DslErrorKind::UnknownName { name: spec.into() },
                })
            }
            None => self.inline(spec, |p, line| p.pieces(line, 0))?,
        };
        let comps = collect_pieces(m.coords(), &pieces);
        m.to_frame_components(&CoordinateVectorField::new(comps))
            .map_err(|e| DslError {
                line: 0,
                column: 1,
                kind: DslErrorKind::Build(e),
            })
    }

    /// A named `function` declaration or an inline expression.
    pub fn resolve_function(&self, spec: &str) -> Result<CoeffExpr, DslError> {
        let spec = spec.trim();
        if let Some((_, e)) = self.content.functions.iter().find(|(n, _)| n == spec) {
            return Ok(e.clone());
        }
        self.inline(spec, |p, line| {
            let e = parse_expr_at(line, 0, line.text.len())?;
            p.check_symbols(line, 0, &e)?;
            Ok(e)
        })
    }

    fn inline<T>(
        &self,
        text: &str,
        f: impl FnOnce(&Parser, &Line) -> Result<T, DslError>,
    ) -> Result<T, DslError> {
        let p = Parser {
            content: self.content.clone(),
            lines: self.lines.clone(),
        };
        f(&p, &Line { number: 0, text })
    }
}

const KENMOTSU5: &str = include_str!("../corpus/kenmotsu5.mf");
const KENMOTSU5_BRACKETS: &str = include_str!("../corpus/kenmotsu5-brackets.mf");
const ABELIAN5: &str = include_str!("../corpus/abelian5.mf");

/// Names of the shipped documents.
pub const BUILTINS: [&str; 3] = ["kenmotsu5", "kenmotsu5-brackets", "abelian5"];

pub fn builtin(name: &str) -> Option<&'static str> {
    match name {
        "kenmotsu5" => Some(KENMOTSU5),
        "kenmotsu5-brackets" => Some(KENMOTSU5_BRACKETS),
        "abelian5" => Some(ABELIAN5),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kenmotsu_core::fixtures::kenmotsu5;

    fn err(text: &str) -> DslError {
        parse_manifold_dsl(text).unwrap_err()
    }

    #[test]
    fn builtin_matches_the_reference_manifold() {
        let doc = parse_manifold_dsl(builtin("kenmotsu5").unwrap()).unwrap();
        assert_eq!(doc.build(true).unwrap(), kenmotsu5());
    }

    #[test]
    fn bracket_form_has_the_same_brackets() {
        let doc = parse_manifold_dsl(builtin("kenmotsu5-brackets").unwrap()).unwrap();
        let m = doc.build(true).unwrap();
        let reference = kenmotsu5();
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.bracket(i, j), reference.bracket(i, j));
            }
        }
    }

    #[test]
    fn coordinate_arity() {
        let e = err("dim 5\ncoords x y z u\n");
        assert_eq!(e.line, 2);
        assert!(matches!(e.kind, DslErrorKind::Parse { .. }));
    }

    #[test]
    fn undeclared_coordinate_in_scale() {
        let e = err("dim 3\ncoords x y v\nframe e1 = exp(-1*w) d x\n");
        assert_eq!(e.line, 3);
        assert_eq!(e.column, 19);
        assert_eq!(
            e.kind,
            DslErrorKind::UndeclaredCoordinate { name: "w".into() }
        );
        let e = err("dim 3\ncoords x y v\nframe e1 = d q\n");
        assert_eq!(e.kind, DslErrorKind::UndeclaredCoordinate { name: "q".into() });
        assert_eq!(e.column, 14);
    }

    #[test]
    fn duplicates_and_undeclared_frames() {
        let e = err("dim 3\ndim 3\n");
        assert_eq!(e.kind, DslErrorKind::DuplicateDirective { directive: "dim".into() });
        let e = err("dim 3\ncoords x y v\nframe a = d x\nxi b\n");
        assert_eq!(e.kind, DslErrorKind::UndeclaredFrameField { name: "b".into() });
        assert_eq!((e.line, e.column), (4, 4));
        let e = err("dim 3\ncoords x y v\nframe a = d x\nphi a -> a\nphi a -> 0\n");
        assert!(matches!(e.kind, DslErrorKind::DuplicateDirective { .. }));
    }

    #[test]
    fn unknown_directive() {
        let e = err("dim 3\nwarp 2\n");
        assert_eq!((e.line, e.column), (2, 1));
    }

    #[test]
    fn round_trip() {
        for name in BUILTINS {
            let doc = parse_manifold_dsl(builtin(name).unwrap()).unwrap();
            let text = doc.content.to_source();
            let again = parse_manifold_dsl(&text).unwrap();
            assert_eq!(again.content, doc.content, "{name}");
            assert_eq!(again.content.to_source(), text);
        }
    }

    #[test]
    fn vectors_resolve_to_frame_components() {
        let doc = parse_manifold_dsl(builtin("kenmotsu5").unwrap()).unwrap();
        let m = doc.build(true).unwrap();
        let v = doc.resolve_vector(&m, "V").unwrap();
        assert_eq!(v[0], CoeffExpr::parse("x*exp(v)").unwrap());
        let dx = doc.resolve_vector(&m, "d x").unwrap();
        assert_eq!(dx[0], CoeffExpr::parse("exp(v)").unwrap());
        let w = doc.resolve_vector(&m, "x + y d x - d v").unwrap();
        assert_eq!(w[0], CoeffExpr::parse("x*exp(v) + y*exp(v)").unwrap());
        assert_eq!(w[4], CoeffExpr::parse("-1").unwrap());
        assert_eq!(&doc.resolve_vector(&m, "xi").unwrap(), m.xi());
        assert!(doc.resolve_vector(&m, "W").is_err());
        assert_eq!(doc.resolve_function("f").unwrap(), CoeffExpr::parse("v").unwrap());
        assert!(doc.resolve_function("q").is_err());
    }
}
