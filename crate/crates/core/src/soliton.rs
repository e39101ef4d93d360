//! Ricci-Yamabe soliton residuals and the closed-form consequences on
//! Kenmotsu manifolds.
//!
//! The soliton equation is
//! `k L_V g + 2 alpha S + (2 Lambda - beta r) g = 0`, with `(S, r)` replaced
//! by `(S*, r*)` in the starred variant. `alpha`, `beta` and `Lambda` may be
//! rationals or expressions in parameter symbols (symbols that are not
//! coordinates); `k` may also depend on the coordinates.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::analysis::Geometry;
use crate::connection::{covariant_derivative, Connection};
use crate::error::Error;
use crate::expr::{int, ratio, CoeffExpr, Rational};
use crate::manifold::{FrameVectorField, FramedManifold};
use crate::tensor::{OneForm, Tensor02};

/// Placeholder symbol used for an undetermined `Lambda`.
pub const LAMBDA_SYMBOL: &str = "Lambda";

/// `(L_V g)(e_i, e_j) = g(nabla_i V, e_j) + g(e_i, nabla_j V)`.
pub fn lie_derivative_metric(
    m: &FramedManifold,
    conn: &Connection,
    v: &FrameVectorField,
) -> Result<Tensor02, Error> {
    let nabla: Vec<FrameVectorField> = (0..m.dim())
        .map(|i| covariant_derivative(m, conn, &m.basis(i), v))
        .collect::<Result<_, _>>()?;
    Ok(Tensor02::from_fn(m.dim(), |i, j| {
        m.pairing(&nabla[i], &m.basis(j)) + m.pairing(&m.basis(i), &nabla[j])
    }))
}

/// `(L_V g)(X, Y) = V g(X, Y) - g([V, X], Y) - g(X, [V, Y])`; the first
/// term vanishes for a constant frame metric.
pub fn lie_derivative_metric_brackets(
    m: &FramedManifold,
    v: &FrameVectorField,
) -> Result<Tensor02, Error> {
    let brackets: Vec<FrameVectorField> = (0..m.dim())
        .map(|i| m.lie_bracket(v, &m.basis(i)))
        .collect::<Result<_, _>>()?;
    Ok(Tensor02::from_fn(m.dim(), |i, j| {
        -(m.pairing(&brackets[i], &m.basis(j)) + m.pairing(&m.basis(i), &brackets[j]))
    }))
}

/// `div V = Tr(X -> nabla_X V)`.
pub fn divergence(
    m: &FramedManifold,
    conn: &Connection,
    v: &FrameVectorField,
) -> Result<CoeffExpr, Error> {
    let mut acc = CoeffExpr::zero();
    for i in 0..m.dim() {
        acc += covariant_derivative(m, conn, &m.basis(i), v)?[i].clone();
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    /// Full tensor equation with a supplied `Lambda`.
    Exact,
    /// Full trace solved for `Lambda`.
    Trace,
    /// `(xi, xi)` contraction solved for `Lambda`.
    XiTrace,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Trace => "trace",
            Mode::XiTrace => "xi-trace",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "exact" => Some(Mode::Exact),
            "trace" => Some(Mode::Trace),
            "xi-trace" => Some(Mode::XiTrace),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Classification {
    Expanding,
    Steady,
    Shrinking,
    Indeterminate,
}

impl Classification {
    /// Expanding, steady or shrinking according as `Lambda` is positive,
    /// zero or negative.
    pub fn of(lambda: &CoeffExpr) -> Classification {
        match lambda.rational_sign() {
            Some(Ordering::Greater) => Classification::Expanding,
            Some(Ordering::Equal) => Classification::Steady,
            Some(Ordering::Less) => Classification::Shrinking,
            None => Classification::Indeterminate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Expanding => "expanding",
            Classification::Steady => "steady",
            Classification::Shrinking => "shrinking",
            Classification::Indeterminate => "indeterminate",
        }
    }
}

/// Sign change of a `Lambda` that is affine in a single parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub symbol: String,
    pub root: Rational,
    /// Classification for parameter values above the root.
    pub above: Classification,
    pub below: Classification,
}

impl Threshold {
    pub fn of(lambda: &CoeffExpr) -> Option<Threshold> {
        let symbols = lambda.symbols();
        if symbols.len() != 1 {
            return None;
        }
        let symbol = *symbols.iter().next()?;
        let root = lambda.linear_root(symbol)?;
        let slope = lambda.partial(symbol).as_rational()?;
        let (above, below) = if slope.is_positive() {
            (Classification::Expanding, Classification::Shrinking)
        } else {
            (Classification::Shrinking, Classification::Expanding)
        };
        Some(Threshold {
            symbol: symbol.into(),
            root,
            above,
            below,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialCase {
    Ricci,
    Yamabe,
    Einstein,
    General,
}

impl SpecialCase {
    /// `(1, 0)`, `(0, 2)` and `(1, 1)` for `(alpha, beta)`.
    pub fn of(alpha: &CoeffExpr, beta: &CoeffExpr) -> SpecialCase {
        let (Some(a), Some(b)) = (alpha.as_rational(), beta.as_rational()) else {
            return SpecialCase::General;
        };
        if a == int(1) && b.is_zero() {
            SpecialCase::Ricci
        } else if a.is_zero() && b == int(2) {
            SpecialCase::Yamabe
        } else if a == int(1) && b == int(1) {
            SpecialCase::Einstein
        } else {
            SpecialCase::General
        }
    }

    pub fn label(self, star: bool) -> String {
        let base = match self {
            SpecialCase::Ricci => "Ricci",
            SpecialCase::Yamabe => "Yamabe",
            SpecialCase::Einstein => "Einstein",
            SpecialCase::General => return "general".into(),
        };
        if star {
            alloc::format!("*-k-{base}")
        } else {
            alloc::format!("k-{base}")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolitonParams {
    pub alpha: CoeffExpr,
    pub beta: CoeffExpr,
    pub k: CoeffExpr,
    pub lambda: Option<CoeffExpr>,
    /// Use `(S*, r*)` instead of `(S, r)`.
    pub star: bool,
}

impl SolitonParams {
    pub fn new(alpha: CoeffExpr, beta: CoeffExpr, k: CoeffExpr) -> Self {
        SolitonParams {
            alpha,
            beta,
            k,
            lambda: None,
            star: true,
        }
    }

    pub fn with_lambda(mut self, lambda: CoeffExpr) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_star(mut self, star: bool) -> Self {
        self.star = star;
        self
    }

    /// `k != 0`; `alpha`, `beta` and `Lambda` constant on the manifold.
    pub fn validate(&self, m: &FramedManifold) -> Result<(), Error> {
        if self.k.is_zero() {
            return Err(Error::ZeroK);
        }
        let named = [("alpha", Some(&self.alpha)), ("beta", Some(&self.beta)), ("lambda", self.lambda.as_ref())];
        for (name, value) in named {
            if let Some(v) = value {
                if !m.is_constant(v) {
                    return Err(Error::NonConstantParameter {
                        name,
                        value: alloc::format!("{v}"),
                    });
                }
            }
        }
        Ok(())
    }

    fn require_constant_k(&self, m: &FramedManifold) -> Result<(), Error> {
        if m.is_constant(&self.k) {
            Ok(())
        } else {
            Err(Error::NonConstantK(alloc::format!("{}", self.k)))
        }
    }

    fn require_lambda(&self) -> Result<&CoeffExpr, Error> {
        self.lambda.as_ref().ok_or(Error::UnknownLambda)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolitonReport {
    pub mode: Mode,
    pub star: bool,
    /// `k L_V g + 2 alpha S + (2 Lambda - beta r) g` with the `Lambda` used.
    pub residual: Tensor02,
    /// Full trace of the residual, or its `(xi, xi)` entry in xi-trace mode.
    pub trace_residual: CoeffExpr,
    /// `Lambda` solved from the trace equation, when it is constant.
    pub fitted_lambda: Option<CoeffExpr>,
    /// `Lambda` substituted into the residual; a free `Lambda` symbol when
    /// it could be neither fitted nor taken from the parameters.
    pub lambda: CoeffExpr,
    pub classification: Classification,
    pub threshold: Option<Threshold>,
    pub special_case: SpecialCase,
}

impl SolitonReport {
    pub fn residual_is_zero(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn witness(&self) -> Option<(usize, usize, &CoeffExpr)> {
        self.residual.nonzero().next()
    }
}

fn assemble(
    geom: &Geometry,
    lie: &Tensor02,
    params: &SolitonParams,
    mode: Mode,
) -> Result<SolitonReport, Error> {
    let m = &geom.manifold;
    params.validate(m)?;
    let (s, r) = geom.ricci_pair(params.star);
    let dim = int(m.dim() as i64);
    let g = Tensor02::metric(m);
    let two = int(2);
    let alpha = &params.alpha;
    let beta = &params.beta;
    let k = &params.k;

    let fitted = match mode {
        Mode::Exact => {
            params.require_lambda()?;
            None
        }
        Mode::Trace => {
            params.require_constant_k(m)?;
            let num = &(k * &lie.trace(m)) + &(alpha * r).scale(&two);
            let num = num - (beta * r).scale(&dim);
            Some((-num).scale(&(Rational::one() / (&two * &dim))))
        }
        Mode::XiTrace => {
            params.require_constant_k(m)?;
            let xi = m.xi();
            let gxx = m.pairing(xi, xi)
                .as_rational()
                .expect("constant metric pairing of a constant field");
            let num = (beta * r).scale(&gxx)
                - k * &lie.eval(xi, xi)
                - (alpha * &s.eval(xi, xi)).scale(&two);
            Some(num.scale(&(Rational::one() / (&two * &gxx))))
        }
    };
    let fitted = fitted.filter(|l| m.is_constant(l));
    let lambda = fitted
        .clone()
        .or_else(|| params.lambda.clone())
        .unwrap_or_else(|| CoeffExpr::var(LAMBDA_SYMBOL));
    let coeff = lambda.scale(&two) - beta * r;
    let residual = &(&lie.scale(k) + &s.scale_rational(&two).scale(alpha)) + &g.scale(&coeff);
    let trace_residual = match mode {
        Mode::XiTrace => residual.eval(m.xi(), m.xi()),
        _ => residual.trace(m),
    };
    Ok(SolitonReport {
        mode,
        star: params.star,
        residual,
        trace_residual,
        classification: Classification::of(&lambda),
        threshold: Threshold::of(&lambda),
        special_case: SpecialCase::of(alpha, beta),
        fitted_lambda: fitted,
        lambda,
    })
}

/// Evaluates the soliton equation for the potential `v`.
pub fn soliton_residual(
    geom: &Geometry,
    v: &FrameVectorField,
    params: &SolitonParams,
    mode: Mode,
) -> Result<SolitonReport, Error> {
    let lie = lie_derivative_metric(&geom.manifold, &geom.connection, v)?;
    assemble(geom, &lie, params, mode)
}

fn require_kenmotsu(geom: &Geometry) -> Result<(), Error> {
    if geom.is_kenmotsu() {
        Ok(())
    } else {
        Err(Error::NotKenmotsu)
    }
}

fn require_constant_r(geom: &Geometry) -> Result<(), Error> {
    if geom.manifold.is_constant(&geom.scalar) {
        Ok(())
    } else {
        Err(Error::NonConstantScalarCurvature(alloc::format!("{}", geom.scalar)))
    }
}

/// `r + 4n^2`.
fn star_scalar_closed(m: &FramedManifold, r: &CoeffExpr) -> CoeffExpr {
    let n = m.n() as i64;
    r + &CoeffExpr::integer(4 * n * n)
}

/// `Lambda = beta (r + 4n^2) / 2`, forced by the `xi`-contraction of the
/// soliton equation with potential `xi`.
pub fn xi_trace_lambda(geom: &Geometry, beta: &CoeffExpr) -> Result<CoeffExpr, Error> {
    require_kenmotsu(geom)?;
    require_constant_r(geom)?;
    Ok((beta * &star_scalar_closed(&geom.manifold, &geom.scalar)).scale(&ratio(1, 2)))
}

/// The flat specialization `Lambda = 2 beta n^2`.
pub fn flat_xi_trace_lambda(n: usize, beta: &CoeffExpr) -> CoeffExpr {
    beta.scale(&int(2 * (n * n) as i64))
}

/// `numerator / denominator`, with the quotient when it exists in the
/// coefficient algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub numerator: CoeffExpr,
    pub denominator: CoeffExpr,
    pub value: Option<CoeffExpr>,
}

impl Quotient {
    pub fn new(numerator: CoeffExpr, denominator: CoeffExpr) -> Self {
        let value = numerator.div_exact(&denominator).ok();
        Quotient {
            numerator,
            denominator,
            value,
        }
    }
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "({})/({})", self.numerator, self.denominator),
        }
    }
}

fn laplacian_checked(m: &FramedManifold, params: &SolitonParams) -> Result<CoeffExpr, Error> {
    params.validate(m)?;
    params.require_constant_k(m)?;
    Ok(params.require_lambda()?.clone())
}

/// `Delta f = -(r + 4n^2)/k [alpha - beta (2n + 1)/2] - Lambda (2n + 1)/k`.
pub fn laplacian_identity(
    m: &FramedManifold,
    r: &CoeffExpr,
    params: &SolitonParams,
) -> Result<Quotient, Error> {
    let lambda = laplacian_checked(m, params)?;
    let d = int(m.dim() as i64);
    let rs = star_scalar_closed(m, r);
    let bracket = &params.alpha - &params.beta.scale(&(&d / int(2)));
    let num = -(&rs * &bracket) - lambda.scale(&d);
    Ok(Quotient::new(num, params.k.clone()))
}

/// The three special Laplacian forms for `(alpha, beta)` equal to
/// `(1, 0)`, `(0, 2)` and `(1, 1)`, written as the simplified formulas
/// rather than by substitution into [`laplacian_identity`].
pub fn laplacian_special_case(
    m: &FramedManifold,
    r: &CoeffExpr,
    params: &SolitonParams,
) -> Result<Option<(SpecialCase, Quotient)>, Error> {
    let lambda = laplacian_checked(m, params)?;
    let d = int(m.dim() as i64);
    let rs = star_scalar_closed(m, r);
    let case = SpecialCase::of(&params.alpha, &params.beta);
    let num = match case {
        SpecialCase::Ricci => -&rs - lambda.scale(&d),
        SpecialCase::Yamabe => (&rs - &lambda).scale(&d),
        SpecialCase::Einstein => {
            let bracket = Rational::one() - &d / int(2);
            -rs.scale(&bracket) - lambda.scale(&d)
        }
        SpecialCase::General => return Ok(None),
    };
    Ok(Some((case, Quotient::new(num, params.k.clone()))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConformalKind {
    Killing,
    ProperHomothetic,
    /// Constant but not provably nonzero (depends on parameters).
    Homothetic,
    /// Non-constant conformal factor.
    Proper,
}

impl ConformalKind {
    pub fn of(m: &FramedManifold, omega: &CoeffExpr) -> ConformalKind {
        if omega.is_zero() {
            ConformalKind::Killing
        } else if omega.as_rational().is_some() {
            ConformalKind::ProperHomothetic
        } else if m.is_constant(omega) {
            ConformalKind::Homothetic
        } else {
            ConformalKind::Proper
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConformalKind::Killing => "killing",
            ConformalKind::ProperHomothetic => "proper-homothetic",
            ConformalKind::Homothetic => "homothetic",
            ConformalKind::Proper => "proper",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalKilling {
    pub omega: CoeffExpr,
    pub kind: ConformalKind,
}

/// Detects `L_V g = 2 Omega g`.
pub fn conformal_killing_classify(
    m: &FramedManifold,
    conn: &Connection,
    v: &FrameVectorField,
) -> Result<Option<ConformalKilling>, Error> {
    let lie = lie_derivative_metric(m, conn, v)?;
    let g00 = m.metric()[0][0].clone();
    let omega = lie.get(0, 0).scale(&(Rational::one() / (int(2) * g00)));
    let g = Tensor02::metric(m);
    if !(&lie - &g.scale(&omega).scale_rational(&int(2))).is_zero() {
        return Ok(None);
    }
    let kind = ConformalKind::of(m, &omega);
    Ok(Some(ConformalKilling { omega, kind }))
}

/// Consequences of a soliton whose potential is conformal Killing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalTheorem {
    /// `Omega = (beta (r + 4n^2)/2 - Lambda) / k`.
    pub omega: Quotient,
    pub kind: Option<ConformalKind>,
    /// The `Lambda` for which the potential is Killing.
    pub killing_lambda: CoeffExpr,
    /// The manifold is forced to be eta-Einstein when `alpha != 0`;
    /// `None` when the sign of `alpha` is not determined.
    pub eta_einstein: Option<bool>,
}

pub fn conformal_theorem(
    m: &FramedManifold,
    r: &CoeffExpr,
    params: &SolitonParams,
) -> Result<ConformalTheorem, Error> {
    params.validate(m)?;
    let killing_lambda = (&params.beta * &star_scalar_closed(m, r)).scale(&ratio(1, 2));
    let lambda = params.require_lambda()?;
    let omega = Quotient::new(&killing_lambda - lambda, params.k.clone());
    let kind = match &omega.value {
        Some(v) => Some(ConformalKind::of(m, v)),
        None if omega.numerator.is_zero() => Some(ConformalKind::Killing),
        None => None,
    };
    let eta_einstein = params.alpha.as_rational().map(|a| !a.is_zero());
    Ok(ConformalTheorem {
        omega,
        kind,
        killing_lambda,
        eta_einstein,
    })
}

/// `S = a g + b eta (x) eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaEinsteinData {
    pub a: CoeffExpr,
    pub b: CoeffExpr,
}

impl EtaEinsteinData {
    /// `r = a (2n + 1) + b`.
    pub fn trace_consistent(&self, m: &FramedManifold, r: &CoeffExpr) -> bool {
        &self.a.scale(&int(m.dim() as i64)) + &self.b == *r
    }
}

pub fn eta_einstein_analyze(m: &FramedManifold, s: &Tensor02) -> Option<EtaEinsteinData> {
    let i = (0..m.dim()).find(|&i| m.eta(&m.basis(i)).is_zero())?;
    let gii = m.metric()[i][i].clone();
    let a = s.get(i, i).scale(&(Rational::one() / gii));
    let xi = m.xi();
    let gxx = m.pairing(xi, xi).as_rational()?;
    let exx = m.eta(xi).as_rational()?;
    if exx.is_zero() {
        return None;
    }
    let b = (s.eval(xi, xi) - a.scale(&gxx)).scale(&(Rational::one() / (&exx * &exx)));
    let fit = &Tensor02::metric(m).scale(&a) + &Tensor02::eta_eta(m).scale(&b);
    (fit == *s).then_some(EtaEinsteinData { a, b })
}

/// `Lambda = -a alpha - 2n alpha + beta (r + 4n^2)/2 - b alpha`.
pub fn lambda_eta_einstein(
    m: &FramedManifold,
    data: &EtaEinsteinData,
    r: &CoeffExpr,
    params: &SolitonParams,
) -> CoeffExpr {
    let alpha = &params.alpha;
    let n2 = int(2 * m.n() as i64);
    let half_beta = (&params.beta * &star_scalar_closed(m, r)).scale(&ratio(1, 2));
    -(&data.a * alpha) - alpha.scale(&n2) + half_beta - &data.b * alpha
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TorseSubtype {
    Parallel,
    Concurrent,
    Concircular,
    Recurrent,
    Torqued,
    Generic,
}

impl TorseSubtype {
    pub fn as_str(self) -> &'static str {
        match self {
            TorseSubtype::Parallel => "parallel",
            TorseSubtype::Concurrent => "concurrent",
            TorseSubtype::Concircular => "concircular",
            TorseSubtype::Recurrent => "recurrent",
            TorseSubtype::Torqued => "torqued",
            TorseSubtype::Generic => "generic",
        }
    }
}

/// `nabla_X tau = psi X + omega(X) tau`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorseForming {
    pub psi: CoeffExpr,
    pub omega: OneForm,
    pub omega_tau: CoeffExpr,
    pub subtype: TorseSubtype,
}

/// Solves `nabla_{e_i} tau = psi e_i + omega_i tau` by elimination.
///
/// `psi` is read from a diagonal entry where `tau` has no component, else
/// from the least index other than a unit component `u` of `tau`, after
/// eliminating `omega` through component `u`. Returns `None` when the
/// resulting candidate fails any equation.
pub fn torse_forming_classify(
    m: &FramedManifold,
    conn: &Connection,
    tau: &FrameVectorField,
) -> Result<Option<TorseForming>, Error> {
    let dim = m.dim();
    let u = (0..dim)
        .find(|&i| tau[i].is_unit())
        .ok_or(Error::NotNowhereVanishing)?;
    let inv_u = tau[u].invert_unit()?;
    let d: Vec<FrameVectorField> = (0..dim)
        .map(|i| covariant_derivative(m, conn, &m.basis(i), tau))
        .collect::<Result<_, _>>()?;
    let psi = match (0..dim).find(|&i| tau[i].is_zero()) {
        Some(i) => d[i][i].clone(),
        None => {
            let i = (0..dim).find(|&i| i != u).expect("dimension at least 3");
            let w = &d[i][u] * &inv_u;
            &d[i][i] - &(&w * &tau[i])
        }
    };
    let mut omega = Vec::with_capacity(dim);
    for (i, di) in d.iter().enumerate() {
        let rest = di - &m.basis(i).scale(&psi);
        let w = &rest[u] * &inv_u;
        if rest != tau.scale(&w) {
            return Ok(None);
        }
        omega.push(w);
    }
    let omega = OneForm::new(omega);
    let omega_tau = omega.apply(tau);
    let subtype = match (psi.is_zero(), omega.is_zero()) {
        (true, true) => TorseSubtype::Parallel,
        (false, true) if psi.is_one() => TorseSubtype::Concurrent,
        (false, true) => TorseSubtype::Concircular,
        (true, false) => TorseSubtype::Recurrent,
        (false, false) if omega_tau.is_zero() => TorseSubtype::Torqued,
        (false, false) => TorseSubtype::Generic,
    };
    Ok(Some(TorseForming {
        psi,
        omega,
        omega_tau,
        subtype,
    }))
}

/// `Lambda = beta (r + 4n^2)/2 - k psi - alpha (2n - 1)
///           - (alpha r + alpha + k omega(tau)) / (2n + 1)`.
pub fn lambda_torse(
    m: &FramedManifold,
    r: &CoeffExpr,
    params: &SolitonParams,
    psi: &CoeffExpr,
    omega_tau: &CoeffExpr,
) -> CoeffExpr {
    torse_formula(m, r, params, &(&params.k * psi), omega_tau)
}

fn torse_formula(
    m: &FramedManifold,
    r: &CoeffExpr,
    params: &SolitonParams,
    k_psi: &CoeffExpr,
    omega_tau: &CoeffExpr,
) -> CoeffExpr {
    let n = m.n() as i64;
    let alpha = &params.alpha;
    let half_beta = (&params.beta * &star_scalar_closed(m, r)).scale(&ratio(1, 2));
    let tail = &(&(alpha * r) + alpha) + &(&params.k * omega_tau);
    half_beta - k_psi.clone() - alpha.scale(&int(2 * n - 1)) - tail.scale(&ratio(1, 2 * n + 1))
}

/// One subtype specialization of the torse-forming `Lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorseCase {
    pub subtype: TorseSubtype,
    /// Obtained by substituting the subtype's `psi`, `omega` into the
    /// general formula.
    pub lambda: CoeffExpr,
    /// The commonly quoted closed form, which writes the concurrent term
    /// `k psi` as `1`.
    pub quoted: CoeffExpr,
}

impl TorseCase {
    pub fn matches_quoted(&self) -> bool {
        self.lambda == self.quoted
    }
}

/// The five subtype specializations, keeping `psi` and `omega(tau)` where
/// the subtype leaves them free.
pub fn torse_cases(
    m: &FramedManifold,
    r: &CoeffExpr,
    params: &SolitonParams,
    psi: &CoeffExpr,
    omega_tau: &CoeffExpr,
) -> Vec<TorseCase> {
    let zero = CoeffExpr::zero();
    let one = CoeffExpr::one();
    let cases = [
        (TorseSubtype::Concircular, psi, &zero),
        (TorseSubtype::Concurrent, &one, &zero),
        (TorseSubtype::Recurrent, &zero, omega_tau),
        (TorseSubtype::Parallel, &zero, &zero),
        (TorseSubtype::Torqued, psi, &zero),
    ];
    cases
        .into_iter()
        .map(|(subtype, p, w)| {
            let lambda = lambda_torse(m, r, params, p, w);
            let quoted = if subtype == TorseSubtype::Concurrent {
                torse_formula(m, r, params, &one, w)
            } else {
                lambda.clone()
            };
            TorseCase {
                subtype,
                lambda,
                quoted,
            }
        })
        .collect()
}

/// Potential `Df`, Hessian and the gradient soliton residual
/// `k Hess f + alpha S + (Lambda - beta r / 2) g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradientReport {
    pub f: CoeffExpr,
    pub df: FrameVectorField,
    pub hess: Tensor02,
    /// `Tr Hess f`.
    pub laplacian: CoeffExpr,
    pub report: SolitonReport,
    /// The Laplacian forced by the trace identity, when it applies.
    pub predicted_laplacian: Option<Quotient>,
}

pub fn gradient_residual(
    geom: &Geometry,
    f: &CoeffExpr,
    params: &SolitonParams,
    mode: Mode,
) -> Result<GradientReport, Error> {
    let m = &geom.manifold;
    let conn = &geom.connection;
    let grad: Vec<CoeffExpr> = (0..m.dim())
        .map(|i| m.frame_derivative(i, f))
        .collect::<Result<_, _>>()?;
    let df = m.raise(&grad);
    let nabla: Vec<FrameVectorField> = (0..m.dim())
        .map(|i| covariant_derivative(m, conn, &m.basis(i), &df))
        .collect::<Result<_, _>>()?;
    let hess = Tensor02::from_fn(m.dim(), |i, j| m.pairing(&nabla[i], &m.basis(j)));
    let laplacian = hess.trace(m);
    let mut report = assemble(geom, &hess.scale_rational(&int(2)), params, mode)?;
    report.residual = report.residual.scale_rational(&ratio(1, 2));
    report.trace_residual = report.trace_residual.scale(&ratio(1, 2));
    let predicted_laplacian = if geom.is_kenmotsu() && params.star && m.is_constant(&report.lambda) {
        let p = params.clone().with_lambda(report.lambda.clone());
        laplacian_identity(m, &geom.scalar, &p).ok()
    } else {
        None
    };
    Ok(GradientReport {
        f: f.clone(),
        df,
        hess,
        laplacian,
        report,
        predicted_laplacian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::kenmotsu5;
    use alloc::vec;

    fn e(s: &str) -> CoeffExpr {
        CoeffExpr::parse(s).unwrap()
    }

    fn potential() -> FrameVectorField {
        FrameVectorField::new(vec![
            e("x*exp(v)"),
            e("y*exp(v)"),
            e("z*exp(v)"),
            e("u*exp(v)"),
            e("1"),
        ])
    }

    fn geom() -> Geometry {
        Geometry::new(kenmotsu5()).unwrap()
    }

    #[test]
    fn lie_derivative_of_example_potential() {
        let g = geom();
        let m = &g.manifold;
        let lie = lie_derivative_metric(m, &g.connection, &potential()).unwrap();
        let expected = (&Tensor02::metric(m) - &Tensor02::eta_eta(m)).scale_rational(&int(4));
        assert_eq!(lie, expected);
        assert_eq!(lie, lie_derivative_metric_brackets(m, &potential()).unwrap());
        assert_eq!(divergence(m, &g.connection, &potential()).unwrap(), e("8"));
        assert_eq!(divergence(m, &g.connection, m.xi()).unwrap(), e("4"));
    }

    #[test]
    fn trace_fit_is_symbolic() {
        let g = geom();
        let p = SolitonParams::new(e("alpha"), e("beta"), e("k"));
        let rep = soliton_residual(&g, &potential(), &p, Mode::Trace).unwrap();
        assert_eq!(rep.fitted_lambda, Some(e("4/5*alpha - 2*beta - 8/5*k")));
        assert!(rep.trace_residual.is_zero());
        assert_eq!(rep.classification, Classification::Indeterminate);
    }

    #[test]
    fn exact_mode_exposes_full_residual() {
        let g = geom();
        let p = SolitonParams::new(e("1"), e("0"), e("1")).with_lambda(e("-4/5"));
        let rep = soliton_residual(&g, &potential(), &p, Mode::Exact).unwrap();
        assert_eq!(rep.residual.get(4, 4), &e("-8/5"));
        assert_eq!(rep.residual.get(0, 0), &e("2/5"));
        assert_eq!(rep.classification, Classification::Shrinking);
        assert_eq!(rep.special_case, SpecialCase::Ricci);
    }

    #[test]
    fn thresholds() {
        let t = Threshold::of(&e("4/5 - 8/5*k")).unwrap();
        assert_eq!(t.root, ratio(1, 2));
        assert_eq!(t.above, Classification::Shrinking);
        assert_eq!(Threshold::of(&e("alpha + k")), None);
    }

    #[test]
    fn torse_forming_xi_and_e1() {
        let g = geom();
        let m = &g.manifold;
        let t = torse_forming_classify(m, &g.connection, m.xi()).unwrap().unwrap();
        assert!(t.psi.is_one());
        assert_eq!(t.omega, OneForm::new(OneForm::eta(m).values().iter().map(|v| -v).collect()));
        assert_eq!(t.subtype, TorseSubtype::Generic);
        assert_eq!(
            torse_forming_classify(m, &g.connection, &m.basis(0)).unwrap(),
            None
        );
        let zero = FrameVectorField::new(vec![e("x"), e("0"), e("0"), e("0"), e("0")]);
        assert_eq!(
            torse_forming_classify(m, &g.connection, &zero),
            Err(Error::NotNowhereVanishing)
        );
    }

    #[test]
    fn conformal_classification() {
        let g = geom();
        let m = &g.manifold;
        let dx = FrameVectorField::new(vec![e("exp(v)"), e("0"), e("0"), e("0"), e("0")]);
        let c = conformal_killing_classify(m, &g.connection, &dx).unwrap().unwrap();
        assert_eq!(c.kind, ConformalKind::Killing);
        assert_eq!(conformal_killing_classify(m, &g.connection, &potential()).unwrap(), None);
    }

    #[test]
    fn gradient_of_v() {
        let g = geom();
        let p = SolitonParams::new(e("alpha"), e("beta"), e("alpha")).with_lambda(e("-2*beta"));
        let rep = gradient_residual(&g, &e("v"), &p, Mode::Exact).unwrap();
        assert_eq!(&rep.df, g.manifold.xi());
        assert!(rep.report.residual_is_zero());
        assert_eq!(rep.laplacian, e("4"));
    }

    #[test]
    fn eta_einstein_round_trip() {
        let g = geom();
        let m = &g.manifold;
        let d = eta_einstein_analyze(m, &g.ricci).unwrap();
        assert_eq!((d.a.clone(), d.b.clone()), (e("-4"), e("0")));
        let synthetic = &Tensor02::metric(m).scale_rational(&int(2))
            + &Tensor02::eta_eta(m).scale_rational(&int(3));
        let d = eta_einstein_analyze(m, &synthetic).unwrap();
        assert_eq!((d.a.clone(), d.b.clone()), (e("2"), e("3")));
        assert!(d.trace_consistent(m, &e("13")));
    }
}
