//! Exact coefficient algebra.
//!
//! Every tensor component in this crate is a [`CoeffExpr`]: a finite sum of
//! terms `c * x1^p1 * ... * exp(q1*y1 + ...)` with `c` rational, the `p`
//! nonnegative integers and the `q` rational. The set is closed under ring
//! operations and partial differentiation, and single exponential terms are
//! units.
//!
//! Symbols are plain strings. Manifold coordinates and free parameters (such
//! as soliton constants) live in the same namespace; a parameter is simply a
//! symbol that no frame field differentiates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// Shorthand for the rational `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// The non-coefficient part of a term: coordinate powers and exponential
/// weights. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    powers: BTreeMap<String, u32>,
    exp_weights: BTreeMap<String, Rational>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new<P, W>(powers: P, exp_weights: W) -> Self
    where
        P: IntoIterator<Item = (String, u32)>,
        W: IntoIterator<Item = (String, Rational)>,
    {
        let mut m = Monomial::one();
        for (s, p) in powers {
            *m.powers.entry(s).or_insert(0) += p;
        }
        for (s, q) in exp_weights {
            *m.exp_weights.entry(s).or_insert_with(Rational::zero) += q;
        }
        m.powers.retain(|_, p| *p != 0);
        m.exp_weights.retain(|_, q| !q.is_zero());
        m
    }

    pub fn var(name: &str) -> Self {
        Self::new([(name.to_string(), 1)], [])
    }

    pub fn exp(name: &str, weight: Rational) -> Self {
        Self::new([], [(name.to_string(), weight)])
    }

    pub fn powers(&self) -> &BTreeMap<String, u32> {
        &self.powers
    }

    pub fn exp_weights(&self) -> &BTreeMap<String, Rational> {
        &self.exp_weights
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty() && self.exp_weights.is_empty()
    }

    pub fn depends_on(&self, symbol: &str) -> bool {
        self.powers.contains_key(symbol) || self.exp_weights.contains_key(symbol)
    }

    fn symbols(&self) -> impl Iterator<Item = &str> {
        self.powers
            .keys()
            .chain(self.exp_weights.keys())
            .map(String::as_str)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (s, p) in &other.powers {
            *out.powers.entry(s.clone()).or_insert(0) += *p;
        }
        for (s, q) in &other.exp_weights {
            let e = out
                .exp_weights
                .entry(s.clone())
                .or_insert_with(Rational::zero);
            *e += q;
            if e.is_zero() {
                out.exp_weights.remove(s);
            }
        }
        out
    }

    /// `self / other` when every power of `other` is covered by `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.clone();
        for (s, p) in &other.powers {
            let have = out.powers.get(s).copied().unwrap_or(0);
            if have < *p {
                return None;
            }
            if have == *p {
                out.powers.remove(s);
            } else {
                out.powers.insert(s.clone(), have - p);
            }
        }
        for (s, q) in &other.exp_weights {
            let e = out
                .exp_weights
                .entry(s.clone())
                .or_insert_with(Rational::zero);
            *e -= q;
            if e.is_zero() {
                out.exp_weights.remove(s);
            }
        }
        Some(out)
    }
}

/// A single `coeff * monomial` summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Rational,
    pub monomial: Monomial,
}

impl Term {
    pub fn new(coeff: Rational, monomial: Monomial) -> Self {
        Term { coeff, monomial }
    }
}

/// Canonical element of the coefficient algebra.
///
/// Terms are keyed by monomial in a `BTreeMap`, so the representation is
/// unique: structural equality is mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoeffExpr {
    terms: BTreeMap<Monomial, Rational>,
}

impl CoeffExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_terms([Term::new(c, Monomial::one())])
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::from_terms([Term::new(Rational::one(), Monomial::var(name))])
    }

    /// `exp(weight * name)`.
    pub fn exp(name: &str, weight: Rational) -> Self {
        Self::from_terms([Term::new(Rational::one(), Monomial::exp(name, weight))])
    }

    pub fn monomial(coeff: Rational, monomial: Monomial) -> Self {
        Self::from_terms([Term::new(coeff, monomial)])
    }

    /// Builds the canonical form of an arbitrary list of terms: like terms
    /// are merged and zero coefficients dropped.
    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut out = BTreeMap::new();
        for t in terms {
            if t.coeff.is_zero() {
                continue;
            }
            accumulate(&mut out, t.monomial, t.coeff);
        }
        CoeffExpr { terms: out }
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms
            .iter()
            .map(|(m, c)| Term::new(c.clone(), m.clone()))
    }

    pub fn term_refs(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|c| c.is_one())
    }

    /// The rational value when the expression has no symbolic part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn symbols(&self) -> BTreeSet<&str> {
        self.terms.keys().flat_map(Monomial::symbols).collect()
    }

    pub fn depends_on(&self, symbol: &str) -> bool {
        self.terms.keys().any(|m| m.depends_on(symbol))
    }

    /// True when no symbol in `symbols` occurs.
    pub fn is_constant_in<S: AsRef<str>>(&self, symbols: &[S]) -> bool {
        !symbols.iter().any(|s| self.depends_on(s.as_ref()))
    }

    pub fn scale(&self, c: &Rational) -> CoeffExpr {
        if c.is_zero() {
            return CoeffExpr::zero();
        }
        CoeffExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> CoeffExpr {
        let mut acc = CoeffExpr::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative with respect to `symbol`.
    pub fn partial(&self, symbol: &str) -> CoeffExpr {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some(&p) = m.powers.get(symbol) {
                let mut lowered = m.clone();
                if p == 1 {
                    lowered.powers.remove(symbol);
                } else {
                    lowered.powers.insert(symbol.to_string(), p - 1);
                }
                accumulate(&mut out, lowered, c * Rational::from_integer(BigInt::from(p)));
            }
            if let Some(q) = m.exp_weights.get(symbol) {
                accumulate(&mut out, m.clone(), c * q);
            }
        }
        CoeffExpr { terms: out }
    }

    /// A unit of the algebra is a single term without polynomial factors.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().all(|m| m.powers.is_empty())
    }

    pub fn invert_unit(&self) -> Result<CoeffExpr, Error> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        let (m, c) = self.terms.iter().next().ok_or(Error::ZeroElement)?;
        let inv = Monomial {
            powers: BTreeMap::new(),
            exp_weights: m
                .exp_weights
                .iter()
                .map(|(s, q)| (s.clone(), -q))
                .collect(),
        };
        Ok(CoeffExpr::monomial(c.recip(), inv))
    }

    /// Exact quotient `self / divisor`, when it exists inside the algebra.
    ///
    /// Handles unit divisors, single-term divisors that divide every term,
    /// and multi-term divisors whose quotient is a single term.
    pub fn div_exact(&self, divisor: &CoeffExpr) -> Result<CoeffExpr, Error> {
        if divisor.is_zero() {
            return Err(Error::ZeroElement);
        }
        if self.is_zero() {
            return Ok(CoeffExpr::zero());
        }
        if divisor.is_unit() {
            return Ok(self * &divisor.invert_unit()?);
        }
        if divisor.terms.len() == 1 {
            let (dm, dc) = divisor.terms.iter().next().ok_or(Error::ZeroElement)?;
            let mut out = BTreeMap::new();
            for (m, c) in &self.terms {
                let q = m.div(dm).ok_or_else(|| not_divisible(self, divisor))?;
                accumulate(&mut out, q, c / dc);
            }
            return Ok(CoeffExpr { terms: out });
        }
        let (lead_m, lead_c) = self.terms.iter().next().ok_or(Error::ZeroElement)?;
        for (dm, dc) in &divisor.terms {
            if let Some(qm) = lead_m.div(dm) {
                let q = CoeffExpr::monomial(lead_c / dc, qm);
                if &(&q * divisor) == self {
                    return Ok(q);
                }
            }
        }
        Err(not_divisible(self, divisor))
    }

    /// Replaces a symbol by a rational value. Exponential dependence on the
    /// symbol is only allowed when the value is zero.
    pub fn substitute(&self, symbol: &str, value: &Rational) -> Result<CoeffExpr, Error> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut m = m.clone();
            let mut c = c.clone();
            if let Some(q) = m.exp_weights.remove(symbol) {
                if !value.is_zero() {
                    return Err(Error::TranscendentalSubstitution {
                        symbol: symbol.to_string(),
                        weight: q.to_string(),
                    });
                }
            }
            if let Some(p) = m.powers.remove(symbol) {
                c *= num_traits::pow(value.clone(), p as usize);
            }
            if !c.is_zero() {
                accumulate(&mut out, m, c);
            }
        }
        Ok(CoeffExpr { terms: out })
    }

    /// Root of `self` viewed as a degree-one polynomial in `symbol` with
    /// rational coefficients: `a + b*symbol = 0` gives `-a/b`.
    pub fn linear_root(&self, symbol: &str) -> Option<Rational> {
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        for (m, c) in &self.terms {
            if !m.exp_weights.is_empty() {
                return None;
            }
            match (m.powers.len(), m.powers.get(symbol)) {
                (0, _) => a += c,
                (1, Some(1)) => b += c,
                _ => return None,
            }
        }
        (!b.is_zero()).then(|| -a / b)
    }

    /// Applies the same sign to every term if possible. Used to classify
    /// expressions that are provably positive or negative on every point.
    pub fn rational_sign(&self) -> Option<core::cmp::Ordering> {
        self.as_rational().map(|c| c.cmp(&Rational::zero()))
    }

    pub fn parse(src: &str) -> Result<CoeffExpr, Error> {
        let tokens = lex(src)?;
        parse_tokens(&tokens, src.len())
    }
}

fn not_divisible(a: &CoeffExpr, b: &CoeffExpr) -> Error {
    Error::NotDivisible {
        dividend: a.to_string(),
        divisor: b.to_string(),
    }
}

fn accumulate(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use alloc::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl From<Rational> for CoeffExpr {
    fn from(c: Rational) -> Self {
        CoeffExpr::constant(c)
    }
}

impl From<i64> for CoeffExpr {
    fn from(n: i64) -> Self {
        CoeffExpr::integer(n)
    }
}

impl FromStr for CoeffExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CoeffExpr::parse(s)
    }
}

// ---------------------------------------------------------------------------
// ring operations

impl<'a> Add<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;

    fn add(self, rhs: &'a CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;

    fn sub(self, rhs: &'a CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a CoeffExpr> for &'a CoeffExpr {
    type Output = CoeffExpr;

    fn mul(self, rhs: &'a CoeffExpr) -> CoeffExpr {
        let mut out = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                accumulate(&mut out, ma.mul(mb), ca * cb);
            }
        }
        CoeffExpr { terms: out }
    }
}

impl Neg for &CoeffExpr {
    type Output = CoeffExpr;

    fn neg(self) -> CoeffExpr {
        CoeffExpr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl AddAssign<&CoeffExpr> for CoeffExpr {
    fn add_assign(&mut self, rhs: &CoeffExpr) {
        for (m, c) in &rhs.terms {
            accumulate(&mut self.terms, m.clone(), c.clone());
        }
    }
}

impl SubAssign<&CoeffExpr> for CoeffExpr {
    fn sub_assign(&mut self, rhs: &CoeffExpr) {
        for (m, c) in &rhs.terms {
            accumulate(&mut self.terms, m.clone(), -c);
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<CoeffExpr> for CoeffExpr {
            type Output = CoeffExpr;
            fn $method(self, rhs: CoeffExpr) -> CoeffExpr {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a CoeffExpr> for CoeffExpr {
            type Output = CoeffExpr;
            fn $method(self, rhs: &'a CoeffExpr) -> CoeffExpr {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<CoeffExpr> for &'a CoeffExpr {
            type Output = CoeffExpr;
            fn $method(self, rhs: CoeffExpr) -> CoeffExpr {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for CoeffExpr {
    type Output = CoeffExpr;

    fn neg(self) -> CoeffExpr {
        -&self
    }
}

impl AddAssign<CoeffExpr> for CoeffExpr {
    fn add_assign(&mut self, rhs: CoeffExpr) {
        *self += &rhs;
    }
}

impl core::iter::Sum for CoeffExpr {
    fn sum<I: Iterator<Item = CoeffExpr>>(iter: I) -> Self {
        let mut acc = CoeffExpr::zero();
        for x in iter {
            acc += &x;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// surface syntax: printing

fn fmt_weighted_symbol(f: &mut fmt::Formatter<'_>, q: &Rational, s: &str) -> fmt::Result {
    if q.is_one() {
        write!(f, "{s}")
    } else if (-q).is_one() {
        write!(f, "-{s}")
    } else {
        write!(f, "{q}*{s}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, p) in &self.powers {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *p == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{p}")?;
            }
        }
        for (s, q) in &self.exp_weights {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str("exp(")?;
            fmt_weighted_symbol(f, q, s)?;
            f.write_str(")")?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// surface syntax: lexing and parsing

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Number(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

/// A token with its byte offset in the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub offset: usize,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits expression text into tokens.
pub fn lex(src: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(off, c)) = chars.peek() {
        let simple = match c {
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '/' => Some(TokenKind::Slash),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = simple {
            chars.next();
            out.push(Token { kind, offset: off });
            continue;
        }
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = off;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let n: BigInt = src[off..end].parse().map_err(|_| Error::Parse {
                offset: off,
                expected: "integer literal".into(),
            })?;
            out.push(Token {
                kind: TokenKind::Number(n),
                offset: off,
            });
        } else if is_ident_start(c) {
            let mut end = off;
            while let Some(&(i, d)) = chars.peek() {
                if !is_ident_char(d) {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            out.push(Token {
                kind: TokenKind::Ident(src[off..end].to_string()),
                offset: off,
            });
        } else {
            return Err(Error::Parse {
                offset: off,
                expected: "number, symbol, operator or parenthesis".into(),
            });
        }
    }
    Ok(out)
}

/// Parses a complete token slice as one expression. `end` is the offset
/// reported when input ends early.
pub fn parse_tokens(tokens: &[Token], end: usize) -> Result<CoeffExpr, Error> {
    let mut p = Parser {
        tokens,
        pos: 0,
        end,
    };
    if tokens.is_empty() {
        return Err(Error::Parse {
            offset: end,
            expected: "expression".into(),
        });
    }
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(Error::Parse {
            offset: t.offset,
            expected: "operator or end of expression".into(),
        });
    }
    Ok(e)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn fail<T>(&self, expected: &str) -> Result<T, Error> {
        Err(Error::Parse {
            offset: self.here(),
            expected: expected.into(),
        })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().is_some_and(|t| &t.kind == kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<CoeffExpr, Error> {
        let mut acc = self.signed_term()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                acc += self.signed_term()?;
            } else if self.eat(&TokenKind::Minus) {
                acc -= &self.signed_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    /// A term with an optional leading sign, as in `-3/2*x` or `a + -b`.
    fn signed_term(&mut self) -> Result<CoeffExpr, Error> {
        if self.eat(&TokenKind::Minus) {
            Ok(-self.term()?)
        } else {
            self.eat(&TokenKind::Plus);
            self.term()
        }
    }

    fn term(&mut self) -> Result<CoeffExpr, Error> {
        let mut acc = self.power()?;
        loop {
            if self.eat(&TokenKind::Star) {
                acc = acc * self.power()?;
            } else if self.eat(&TokenKind::Slash) {
                let at = self.here();
                let d = self.number()?;
                if d.is_zero() {
                    return Err(Error::Parse {
                        offset: at,
                        expected: "nonzero divisor".into(),
                    });
                }
                acc = acc.scale(&Rational::from_integer(d).recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<CoeffExpr, Error> {
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            let at = self.here();
            let e = self.number()?;
            let e = e.to_u32().filter(|e| *e <= 64).ok_or(Error::Parse {
                offset: at,
                expected: "small nonnegative exponent".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<BigInt, Error> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Number(n),
                ..
            }) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.fail("integer literal"),
        }
    }

    fn atom(&mut self) -> Result<CoeffExpr, Error> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("number, symbol, exp(...) or '('");
        };
        match tok.kind {
            TokenKind::Number(n) => {
                self.pos += 1;
                Ok(CoeffExpr::constant(Rational::from_integer(n)))
            }
            TokenKind::Ident(name) if name == "exp" => {
                self.pos += 1;
                if !self.eat(&TokenKind::LParen) {
                    return self.fail("'(' after exp");
                }
                let arg_at = self.here();
                let arg = self.expr()?;
                if !self.eat(&TokenKind::RParen) {
                    return self.fail("')'");
                }
                exp_of_linear(&arg).ok_or(Error::Parse {
                    offset: arg_at,
                    expected: "linear exponent of the form q*symbol + ...".into(),
                })
            }
            TokenKind::Ident(name) => {
                self.pos += 1;
                Ok(CoeffExpr::var(&name))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(&TokenKind::RParen) {
                    return self.fail("')'");
                }
                Ok(inner)
            }
            _ => self.fail("number, symbol, exp(...) or '('"),
        }
    }
}

/// `exp(arg)` when `arg` is a homogeneous linear form in symbols.
fn exp_of_linear(arg: &CoeffExpr) -> Option<CoeffExpr> {
    let mut weights = Vec::new();
    for (m, c) in arg.term_refs() {
        if !m.exp_weights.is_empty() || m.powers.len() != 1 {
            return None;
        }
        let (s, p) = m.powers.iter().next()?;
        if *p != 1 {
            return None;
        }
        weights.push((s.clone(), c.clone()));
    }
    Some(CoeffExpr::monomial(
        Rational::one(),
        Monomial::new([], weights),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> CoeffExpr {
        CoeffExpr::parse(s).unwrap()
    }

    #[test]
    fn exponential_weights_cancel() {
        assert_eq!(e("exp(-v)") * e("exp(v)"), CoeffExpr::one());
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(e("x*exp(v)") + e("x*exp(v)"), e("2*x*exp(v)"));
    }

    #[test]
    fn cancellation() {
        assert_eq!(e("x + y") + e("-x"), e("y"));
    }

    #[test]
    fn derivatives() {
        assert_eq!(e("x*exp(v)").partial("x"), e("exp(v)"));
        assert_eq!(e("exp(-v)").partial("v"), e("-exp(-v)"));
        assert!(e("x").partial("y").is_zero());
        assert_eq!(e("x^3*y").partial("x"), e("3*x^2*y"));
        assert_eq!(e("x*exp(2*x)").partial("x"), e("exp(2*x) + 2*x*exp(2*x)"));
    }

    #[test]
    fn unit_inversion() {
        assert_eq!(e("exp(-v)").invert_unit().unwrap(), e("exp(v)"));
        assert_eq!(e("3").invert_unit().unwrap(), CoeffExpr::constant(ratio(1, 3)));
        assert!(matches!(e("x").invert_unit(), Err(Error::NotAUnit(_))));
        assert!(matches!(e("1 + exp(v)").invert_unit(), Err(Error::NotAUnit(_))));
        assert_eq!(CoeffExpr::zero().invert_unit(), Err(Error::ZeroElement));
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "0",
            "1",
            "-3/2",
            "x*exp(v)",
            "-exp(-v)",
            "2*x^2*y - 1/3*exp(3/2*u)*exp(-z) + 7",
            "alpha - 2*beta + 4/5*k",
        ] {
            let a = e(src);
            assert_eq!(e(&a.to_string()), a, "{src} -> {a}");
        }
        assert_eq!(e("x*exp(v)").to_string(), "x*exp(v)");
        assert_eq!(e("1 - exp(-v)").to_string(), "1 - exp(-v)");
    }

    #[test]
    fn parser_accepts_grouping_and_division() {
        assert_eq!(e("(x + 1)^2"), e("x^2 + 2*x + 1"));
        assert_eq!(e("(4*a - 10*b - 8*k)/5"), e("4/5*a - 2*b - 8/5*k"));
        assert_eq!(e("exp(-1*w)"), e("exp(-w)"));
        assert_eq!(e("exp(x - 2*v)"), e("exp(x)*exp(-2*v)"));
        assert_eq!(e("a + -3/2*b"), e("a - 3/2*b"));
        assert_eq!(e("x - -2"), e("x + 2"));
    }

    #[test]
    fn parser_errors_carry_offsets() {
        assert!(matches!(CoeffExpr::parse("x +"), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(CoeffExpr::parse("exp(x^2)"), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(CoeffExpr::parse("x $ y"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(CoeffExpr::parse("x/0"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(CoeffExpr::parse(""), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn exact_division() {
        assert_eq!(e("8*k").div_exact(&e("k")).unwrap(), e("8"));
        assert_eq!(e("x*exp(v)").div_exact(&e("exp(v)")).unwrap(), e("x"));
        assert_eq!(e("2*a + 2*b").div_exact(&e("a + b")).unwrap(), e("2"));
        assert!(e("1").div_exact(&e("k")).is_err());
        assert!(e("a").div_exact(&e("a + b")).is_err());
    }

    #[test]
    fn substitution_and_roots() {
        let lam = e("4/5 - 8/5*k");
        assert_eq!(lam.linear_root("k"), Some(ratio(1, 2)));
        assert_eq!(lam.substitute("k", &ratio(1, 2)).unwrap(), CoeffExpr::zero());
        assert!(e("exp(k)").substitute("k", &int(1)).is_err());
        assert_eq!(e("x*exp(k)").substitute("k", &int(0)).unwrap(), e("x"));
        assert_eq!(e("k^2").linear_root("k"), None);
    }

    #[test]
    fn constancy_queries() {
        let a = e("alpha*exp(v) + 2");
        assert!(a.depends_on("v"));
        assert!(!a.is_constant_in(&["x", "v"]));
        assert!(a.is_constant_in(&["x", "y"]));
        assert_eq!(e("5").as_rational(), Some(int(5)));
        assert_eq!(e("x").as_rational(), None);
    }
}
