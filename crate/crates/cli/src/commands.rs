//! Analysis pipelines behind each subcommand, producing report sections.

use std::fmt;

use kenmotsu_core::connection::covariant_derivative;
use kenmotsu_core::soliton::{
    conformal_killing_classify, conformal_theorem, divergence, eta_einstein_analyze,
    flat_xi_trace_lambda, gradient_residual, laplacian_identity, laplacian_special_case,
    lambda_eta_einstein, lambda_torse, lie_derivative_metric, soliton_residual, torse_cases,
    torse_forming_classify, xi_trace_lambda, ConformalKind, Mode, SolitonParams, SolitonReport,
    LAMBDA_SYMBOL,
};
use kenmotsu_core::verify::{check_nabla_qstar_expansion, check_qstar_formula};
use kenmotsu_core::{CoeffExpr, Error, FrameVectorField, Geometry};
use serde_json::{json, Map, Value};

use crate::dsl::{DslError, DslErrorKind, ManifoldDocument, SolitonDecl};
use crate::report::{self, agreement, expr, flag, opt_expr, tensor, vector, Report, Spot};

/// An input or computation error; reported with exit status 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<DslError> for CliError {
    fn from(e: DslError) -> Self {
        CliError(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

/// Parses a command-line expression such as `--alpha 4/5`.
pub fn parse_flag(flag: &str, text: &str) -> Result<CoeffExpr, CliError> {
    CoeffExpr::parse(text).map_err(|e| {
        let e = match e {
            Error::Parse { offset, expected } => DslError {
                line: 0,
                column: text[..offset.min(text.len())].chars().count() + 1,
                kind: DslErrorKind::Parse { expected },
            },
            other => DslError {
                line: 0,
                column: 1,
                kind: DslErrorKind::Build(other),
            },
        };
        CliError(format!("--{flag}: {e}"))
    })
}

/// Soliton parameters as given, before defaults.
#[derive(Clone, Debug, Default)]
pub struct ParamArgs {
    pub alpha: Option<CoeffExpr>,
    pub beta: Option<CoeffExpr>,
    pub k: Option<CoeffExpr>,
    pub lambda: Option<CoeffExpr>,
    pub mode: Option<Mode>,
    pub star: Option<bool>,
}

impl ParamArgs {
    pub fn from_decl(d: &SolitonDecl) -> Self {
        ParamArgs {
            alpha: d.alpha.clone(),
            beta: d.beta.clone(),
            k: d.k.clone(),
            lambda: d.lambda.clone(),
            mode: d.mode,
            star: d.star,
        }
    }

    /// Unspecified `alpha`, `beta`, `k` stay symbolic.
    pub fn params(&self) -> SolitonParams {
        let or_var = |v: &Option<CoeffExpr>, name: &str| v.clone().unwrap_or_else(|| CoeffExpr::var(name));
        let mut p = SolitonParams::new(
            or_var(&self.alpha, "alpha"),
            or_var(&self.beta, "beta"),
            or_var(&self.k, "k"),
        )
        .with_star(self.star.unwrap_or(true));
        p.lambda = self.lambda.clone();
        p
    }

    /// Exact when `Lambda` is given, otherwise the full trace fit.
    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(if self.lambda.is_some() {
            Mode::Exact
        } else {
            Mode::Trace
        })
    }
}

pub enum Potential {
    Vector(String),
    Function(String),
}

pub struct Context<'a> {
    pub doc: &'a ManifoldDocument,
    pub geom: &'a Geometry,
    pub spot: Spot,
}

impl<'a> Context<'a> {
    pub fn new(doc: &'a ManifoldDocument, geom: &'a Geometry, digits: u32) -> Self {
        Context {
            doc,
            geom,
            spot: Spot::new(&geom.manifold, digits),
        }
    }

    pub fn resolve_vector(&self, spec: &str) -> Result<FrameVectorField, CliError> {
        Ok(self.doc.resolve_vector(&self.geom.manifold, spec)?)
    }

    pub fn manifold_summary(&self) -> Value {
        let m = &self.geom.manifold;
        json!({
            "dim": m.dim(),
            "n": m.n(),
            "coordinates": m.coords(),
            "frame_fields": m.frame_names(),
            "xi": vector(m, m.xi()),
            "kenmotsu": self.geom.is_kenmotsu(),
            "spot_evaluation": self.spot.describe(),
        })
    }

    pub fn checks(&self) -> Result<Vec<Value>, CliError> {
        let m = &self.geom.manifold;
        Ok(self
            .geom
            .all_checks()?
            .iter()
            .map(|c| report::check(m, &self.spot, c))
            .collect())
    }

    /// Checks of the closed forms `Q* X = -X + eta(X) xi` and its covariant
    /// derivative, which hold on the warped example.
    pub fn example_checks(&self) -> Result<Vec<Value>, CliError> {
        let g = self.geom;
        let m = &g.manifold;
        let q = g.star_ricci_operator();
        Ok(vec![
            report::check(m, &self.spot, &check_qstar_formula(m, &q)),
            report::check(m, &self.spot, &check_nabla_qstar_expansion(m, &g.connection, &q)?),
        ])
    }

    /// Top-level tensor tables.
    pub fn curvature(&self, report: &mut Report) {
        let g = self.geom;
        let m = &g.manifold;
        let names = m.frame_names();
        let dim = m.dim();
        let mut brackets = Map::new();
        let mut connection = Map::new();
        for i in 0..dim {
            for j in 0..dim {
                let b = m.bracket(i, j);
                if i < j && !b.is_zero() {
                    brackets.insert(format!("[{},{}]", names[i], names[j]), vector(m, b));
                }
                let nabla = g.connection.nabla_frame(i, j);
                if !nabla.is_zero() {
                    connection.insert(format!("nabla_{} {}", names[i], names[j]), vector(m, nabla));
                }
            }
        }
        let riemann: Map<String, Value> = g
            .riemann
            .nonzero()
            .map(|(i, j, k, v)| (format!("R({},{}){}", names[i], names[j], names[k]), vector(m, v)))
            .collect();
        report.insert("brackets", Value::Object(brackets));
        report.insert("connection", Value::Object(connection));
        report.insert("riemann", Value::Object(riemann));
        report.insert("ricci", tensor(&g.ricci));
        report.insert("scalar_curvature", expr(&g.scalar));
        report.insert("star_ricci", tensor(&g.star_ricci));
        report.insert("star_scalar_curvature", expr(&g.star_scalar));
        report.insert(
            "star_ricci_closed_form",
            g.star_ricci_closed_form().map_or(Value::Null, |t| tensor(&t)),
        );
    }

    fn soliton_fields(&self, rep: &SolitonReport, params: &SolitonParams) -> Map<String, Value> {
        let m = &self.geom.manifold;
        let names = m.frame_names();
        let mut o = Map::new();
        o.insert("mode".into(), json!(rep.mode.as_str()));
        o.insert("star".into(), json!(rep.star));
        o.insert(
            "parameters".into(),
            json!({
                "alpha": expr(&params.alpha),
                "beta": expr(&params.beta),
                "k": expr(&params.k),
                "lambda": opt_expr(params.lambda.as_ref()),
            }),
        );
        o.insert("special_case".into(), json!(rep.special_case.label(rep.star)));
        o.insert("fitted_lambda".into(), opt_expr(rep.fitted_lambda.as_ref()));
        o.insert("lambda".into(), expr(&rep.lambda));
        o.insert("classification".into(), json!(rep.classification.as_str()));
        o.insert(
            "threshold".into(),
            rep.threshold.as_ref().map_or(Value::Null, |t| {
                json!({
                    "symbol": t.symbol,
                    "root": t.root.to_string(),
                    "above": t.above.as_str(),
                    "below": t.below.as_str(),
                })
            }),
        );
        o.insert("trace_residual".into(), expr(&rep.trace_residual));
        o.insert("residual_zero".into(), json!(rep.residual_is_zero()));
        let residual: Map<String, Value> = rep
            .residual
            .nonzero()
            .filter(|(i, j, _)| i <= j)
            .map(|(i, j, e)| (format!("({},{})", names[i], names[j]), expr(e)))
            .collect();
        o.insert("residual".into(), Value::Object(residual));
        o
    }

    /// One soliton analysis and whether it succeeded: a zero residual in
    /// exact mode, a zero fitted trace otherwise.
    pub fn soliton(
        &self,
        potential: &Potential,
        args: &ParamArgs,
    ) -> Result<(Value, bool), CliError> {
        let g = self.geom;
        let m = &g.manifold;
        let params = args.params();
        let mode = args.mode();
        match potential {
            Potential::Vector(spec) => {
                let v = self.resolve_vector(spec)?;
                let rep = soliton_residual(g, &v, &params, mode)?;
                let mut o = self.soliton_fields(&rep, &params);
                o.insert(
                    "potential".into(),
                    json!({ "kind": "vector", "name": spec, "field": vector(m, &v) }),
                );
                o.insert("divergence".into(), expr(&divergence(m, &g.connection, &v)?));
                Ok((Value::Object(o), succeeded(&rep)))
            }
            Potential::Function(spec) => {
                let f = self.doc.resolve_function(spec)?;
                let grad = gradient_residual(g, &f, &params, mode)?;
                let mut o = self.soliton_fields(&grad.report, &params);
                o.insert(
                    "potential".into(),
                    json!({
                        "kind": "gradient",
                        "name": spec,
                        "function": expr(&f),
                        "gradient": vector(m, &grad.df),
                    }),
                );
                o.insert("hessian".into(), tensor(&grad.hess));
                o.insert("laplacian".into(), expr(&grad.laplacian));
                o.insert(
                    "predicted_laplacian".into(),
                    grad.predicted_laplacian
                        .as_ref()
                        .map_or(Value::Null, |q| json!(q.to_string())),
                );
                Ok((Value::Object(o), succeeded(&grad.report)))
            }
        }
    }

    /// Soliton blocks declared in the document, keyed by block name, with
    /// one check per block.
    pub fn document_solitons(&self) -> Result<(Value, Vec<Value>), CliError> {
        let mut sections = Map::new();
        let mut checks = Vec::new();
        for decl in &self.doc.content.solitons {
            let potential = match (&decl.vector, &decl.function) {
                (Some(v), None) => Potential::Vector(v.clone()),
                (None, Some(f)) => Potential::Function(f.clone()),
                _ => {
                    return Err(CliError(format!(
                        "soliton {}: exactly one of vector= and function= is required",
                        decl.name
                    )))
                }
            };
            let (section, ok) = self
                .soliton(&potential, &ParamArgs::from_decl(decl))
                .map_err(|e| CliError(format!("soliton {}: {e}", decl.name)))?;
            sections.insert(decl.name.clone(), section);
            checks.push(flag(&format!("soliton.{}", decl.name), ok));
        }
        Ok((Value::Object(sections), checks))
    }

    pub fn classify_vector(&self, spec: &str) -> Result<Value, CliError> {
        let g = self.geom;
        let m = &g.manifold;
        let v = self.resolve_vector(spec)?;
        let lie = lie_derivative_metric(m, &g.connection, &v)?;
        let torse = match torse_forming_classify(m, &g.connection, &v) {
            Ok(Some(t)) => json!({
                "psi": expr(&t.psi),
                "omega": t.omega.values().iter().map(expr).collect::<Vec<_>>(),
                "omega_tau": expr(&t.omega_tau),
                "subtype": t.subtype.as_str(),
            }),
            Ok(None) => json!(false),
            Err(Error::NotNowhereVanishing) => json!("undetermined: no component is nowhere vanishing"),
            Err(e) => return Err(e.into()),
        };
        let conformal = conformal_killing_classify(m, &g.connection, &v)?;
        let nabla: Map<String, Value> = (0..m.dim())
            .map(|i| {
                let d = covariant_derivative(m, &g.connection, &m.basis(i), &v)?;
                Ok((format!("nabla_{}", m.frame_names()[i]), vector(m, &d)))
            })
            .collect::<Result<_, Error>>()?;
        Ok(json!({
            "name": spec,
            "field": vector(m, &v),
            "field_at_point": v.components().iter().map(|c| self.spot.value(c)).collect::<Vec<_>>(),
            "covariant_derivatives": nabla,
            "lie_derivative_metric": tensor(&lie),
            "divergence": expr(&divergence(m, &g.connection, &v)?),
            "torse_forming": torse,
            "conformal_killing": conformal.as_ref().map_or(json!(false), |c| json!({
                "omega": expr(&c.omega),
                "kind": c.kind.as_str(),
            })),
            "killing": conformal.is_some_and(|c| c.kind == ConformalKind::Killing),
        }))
    }

    /// Closed-form `Lambda` values and their mutual consistency checks. The
    /// optional `vector` adds the Laplacian identity against its divergence.
    pub fn theorems(
        &self,
        args: &ParamArgs,
        vector_spec: Option<&str>,
    ) -> Result<(Value, Vec<Value>), CliError> {
        let g = self.geom;
        let m = &g.manifold;
        let r = &g.scalar;
        if !g.is_kenmotsu() {
            return Ok((
                json!({ "applicable": false, "reason": Error::NotKenmotsu.to_string() }),
                vec![flag("theorems.kenmotsu", false)],
            ));
        }
        let mut params = args.params();
        let lambda = params
            .lambda
            .clone()
            .unwrap_or_else(|| CoeffExpr::var(LAMBDA_SYMBOL));
        params.lambda = Some(lambda.clone());
        let unfitted = SolitonParams {
            lambda: None,
            ..params.clone()
        };
        let mut o = Map::new();
        let mut checks = Vec::new();

        let xi_lambda = xi_trace_lambda(g, &params.beta)?;
        o.insert("xi_trace_lambda".into(), expr(&xi_lambda));
        o.insert(
            "flat_xi_trace_lambda".into(),
            expr(&flat_xi_trace_lambda(m.n(), &params.beta)),
        );

        match eta_einstein_analyze(m, &g.ricci) {
            Some(data) => {
                let l = lambda_eta_einstein(m, &data, r, &params);
                o.insert(
                    "eta_einstein".into(),
                    json!({
                        "a": expr(&data.a),
                        "b": expr(&data.b),
                        "trace_consistent": data.trace_consistent(m, r),
                        "lambda": expr(&l),
                    }),
                );
                checks.push(agreement("theorems.eta_einstein_lambda", &l, &xi_lambda));
            }
            None => {
                o.insert("eta_einstein".into(), json!(false));
            }
        }

        let conformal = conformal_theorem(m, r, &params)?;
        let killing_params = params.clone().with_lambda(conformal.killing_lambda.clone());
        let at_killing = conformal_theorem(m, r, &killing_params)?;
        o.insert(
            "conformal".into(),
            json!({
                "omega": conformal.omega.to_string(),
                "kind": conformal.kind.map(ConformalKind::as_str),
                "killing_lambda": expr(&conformal.killing_lambda),
                "eta_einstein_forced": conformal.eta_einstein,
            }),
        );
        checks.push(agreement(
            "theorems.killing_lambda",
            &conformal.killing_lambda,
            &xi_lambda,
        ));
        checks.push(flag(
            "theorems.killing_at_killing_lambda",
            at_killing.kind == Some(ConformalKind::Killing),
        ));

        if let Some(t) = torse_forming_classify(m, &g.connection, m.xi())? {
            let l = lambda_torse(m, r, &params, &t.psi, &t.omega_tau);
            let cases: Vec<Value> = torse_cases(m, r, &params, &t.psi, &t.omega_tau)
                .iter()
                .map(|c| {
                    json!({
                        "subtype": c.subtype.as_str(),
                        "lambda": expr(&c.lambda),
                        "quoted": expr(&c.quoted),
                        "matches_quoted": c.matches_quoted(),
                    })
                })
                .collect();
            let fit = soliton_residual(g, m.xi(), &unfitted, Mode::Trace)?;
            let at_k_alpha = SolitonParams {
                k: params.alpha.clone(),
                ..params.clone()
            };
            let l_k_alpha = lambda_torse(m, r, &at_k_alpha, &t.psi, &t.omega_tau);
            o.insert(
                "torse_forming_xi".into(),
                json!({
                    "psi": expr(&t.psi),
                    "omega_tau": expr(&t.omega_tau),
                    "subtype": t.subtype.as_str(),
                    "lambda": expr(&l),
                    "lambda_at_k_alpha": expr(&l_k_alpha),
                    "trace_fit": opt_expr(fit.fitted_lambda.as_ref()),
                    "cases": cases,
                }),
            );
            if let Some(fitted) = &fit.fitted_lambda {
                checks.push(agreement("theorems.torse_lambda_trace_fit", &l, fitted));
            }
            checks.push(agreement("theorems.torse_lambda_at_k_alpha", &l_k_alpha, &xi_lambda));
        } else {
            o.insert("torse_forming_xi".into(), json!(false));
        }

        let laplacian = match laplacian_identity(m, r, &params) {
            Ok(q) => q.to_string(),
            Err(e) => format!("not applicable: {e}"),
        };
        let special = match laplacian_special_case(m, r, &params) {
            Ok(Some((case, q))) => json!({ "case": case.label(true), "laplacian": q.to_string() }),
            Ok(None) => Value::Null,
            Err(e) => json!(format!("not applicable: {e}")),
        };
        o.insert("laplacian".into(), json!({ "general": laplacian, "special_case": special }));

        if let Some(spec) = vector_spec {
            let v = self.resolve_vector(spec)?;
            let fit = soliton_residual(g, &v, &unfitted, Mode::Trace)?;
            let div = divergence(m, &g.connection, &v)?;
            let predicted = match &fit.fitted_lambda {
                Some(l) => laplacian_identity(m, r, &unfitted.clone().with_lambda(l.clone()))
                    .ok()
                    .and_then(|q| q.value),
                None => None,
            };
            o.insert(
                "laplacian_check".into(),
                json!({
                    "vector": spec,
                    "fitted_lambda": opt_expr(fit.fitted_lambda.as_ref()),
                    "predicted": opt_expr(predicted.as_ref()),
                    "divergence": expr(&div),
                }),
            );
            match predicted {
                Some(p) => checks.push(agreement("theorems.laplacian_divergence", &p, &div)),
                None => checks.push(flag("theorems.laplacian_divergence", false)),
            }
        }
        Ok((Value::Object(o), checks))
    }
}

fn succeeded(rep: &SolitonReport) -> bool {
    match rep.mode {
        Mode::Exact => rep.residual_is_zero(),
        Mode::Trace | Mode::XiTrace => rep.trace_residual.is_zero(),
    }
}
