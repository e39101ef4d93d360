//! Exact identity checks with witnesses.
//!
//! Every check scans frame tuples in lexicographic order and stops at the
//! first tuple whose residual is nonzero in canonical form.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::connection::{
    covariant_derivative, covariant_derivative_endomorphism, covariant_derivative_form,
    Connection,
};
use crate::curvature::{star_scalar_kenmotsu, RiemannTensor};
use crate::error::Error;
use crate::expr::{int, CoeffExpr};
use crate::soliton::lie_derivative_metric;
use crate::manifold::{FrameSpec, FrameVectorField, FramedManifold, ManifoldSpec};
use crate::tensor::{Endomorphism, OneForm, Tensor02};

/// The first offending frame tuple of a failing check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Frame indices the identity was evaluated on.
    pub frames: Vec<usize>,
    /// Frame component of a vector-valued residual.
    pub component: Option<usize>,
    pub residual: CoeffExpr,
}

impl Witness {
    pub fn render(&self, names: &[String]) -> String {
        let frames: Vec<&str> = self
            .frames
            .iter()
            .map(|&i| names.get(i).map_or("?", String::as_str))
            .collect();
        match self.component {
            Some(c) => format!(
                "({}) component {}: {}",
                frames.join(", "),
                names.get(c).map_or("?", String::as_str),
                self.residual
            ),
            None => format!("({}): {}", frames.join(", "), self.residual),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub witness: Option<Witness>,
}

impl CheckResult {
    pub fn pass(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            witness: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn all_pass(checks: &[CheckResult]) -> bool {
    checks.iter().all(CheckResult::passed)
}

fn tuples(dim: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(arity as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = code % dim;
            code /= dim;
        }
        t
    })
}

fn scan_scalar(
    name: &str,
    dim: usize,
    arity: usize,
    mut f: impl FnMut(&[usize]) -> Result<CoeffExpr, Error>,
) -> Result<CheckResult, Error> {
    for t in tuples(dim, arity) {
        let residual = f(&t)?;
        if !residual.is_zero() {
            return Ok(CheckResult {
                name: name.to_string(),
                witness: Some(Witness {
                    frames: t,
                    component: None,
                    residual,
                }),
            });
        }
    }
    Ok(CheckResult::pass(name))
}

fn scan_vector(
    name: &str,
    dim: usize,
    arity: usize,
    mut f: impl FnMut(&[usize]) -> Result<FrameVectorField, Error>,
) -> Result<CheckResult, Error> {
    for t in tuples(dim, arity) {
        let residual = f(&t)?;
        let first = residual.support().next();
        if let Some(c) = first {
            return Ok(CheckResult {
                name: name.to_string(),
                witness: Some(Witness {
                    frames: t,
                    component: Some(c),
                    residual: residual[c].clone(),
                }),
            });
        }
    }
    Ok(CheckResult::pass(name))
}

fn scan_tensor(name: &str, t: &Tensor02) -> CheckResult {
    match t.nonzero().next() {
        Some((i, j, r)) => CheckResult {
            name: name.to_string(),
            witness: Some(Witness {
                frames: vec![i, j],
                component: None,
                residual: r.clone(),
            }),
        },
        None => CheckResult::pass(name),
    }
}

/// `-X + eta(X) xi`.
fn phi_squared_target(m: &FramedManifold, x: &FrameVectorField) -> FrameVectorField {
    &m.xi().scale(&m.eta(x)) - x
}

/// Almost contact metric axioms.
pub fn verify_almost_contact(m: &FramedManifold) -> Result<Vec<CheckResult>, Error> {
    let dim = m.dim();
    let e = |i: usize| m.basis(i);
    Ok(vec![
        scan_vector("almost_contact.phi_squared", dim, 1, |t| {
            let x = e(t[0]);
            Ok(&m.phi(&m.phi(&x)) - &phi_squared_target(m, &x))
        })?,
        scan_scalar("almost_contact.eta_of_xi", dim, 0, |_| {
            Ok(m.eta(m.xi()) - CoeffExpr::one())
        })?,
        scan_scalar("almost_contact.eta_after_phi", dim, 1, |t| {
            Ok(m.eta(&m.phi(&e(t[0]))))
        })?,
        scan_vector("almost_contact.phi_of_xi", dim, 0, |_| Ok(m.phi(m.xi())))?,
        scan_scalar("almost_contact.metric_compatibility", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            Ok(m.pairing(&m.phi(&x), &m.phi(&y)) - m.pairing(&x, &y) + &m.eta(&x) * &m.eta(&y))
        })?,
        scan_scalar("almost_contact.phi_skew", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            Ok(m.pairing(&x, &m.phi(&y)) + m.pairing(&m.phi(&x), &y))
        })?,
    ])
}

/// The two defining conditions of a Kenmotsu manifold.
pub fn verify_kenmotsu(m: &FramedManifold, conn: &Connection) -> Result<Vec<CheckResult>, Error> {
    let dim = m.dim();
    let phi = Endomorphism::phi(m);
    let e = |i: usize| m.basis(i);
    Ok(vec![
        scan_vector("kenmotsu.nabla_phi", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            let lhs = covariant_derivative_endomorphism(m, conn, &x, &phi)?.apply(&y);
            let rhs = &(-&m.xi().scale(&m.pairing(&x, &m.phi(&y))))
                - &m.phi(&x).scale(&m.eta(&y));
            Ok(&lhs - &rhs)
        })?,
        scan_vector("kenmotsu.nabla_xi", dim, 1, |t| {
            let x = e(t[0]);
            let lhs = covariant_derivative(m, conn, &x, m.xi())?;
            Ok(&(&lhs - &x) + &m.xi().scale(&m.eta(&x)))
        })?,
    ])
}

/// Standard Kenmotsu identities for curvature, Ricci and `eta`.
pub fn identity_suite(
    m: &FramedManifold,
    conn: &Connection,
    r: &RiemannTensor,
    s: &Tensor02,
) -> Result<Vec<CheckResult>, Error> {
    let dim = m.dim();
    let n2 = int(2 * m.n() as i64);
    let e = |i: usize| m.basis(i);
    let xi = m.xi();
    let eta = OneForm::eta(m);
    let lie_xi = lie_derivative_metric(m, conn, xi)?;
    let g = Tensor02::metric(m);
    let ee = Tensor02::eta_eta(m);
    Ok(vec![
        scan_scalar("identity.eta_of_curvature", dim, 3, |t| {
            let (x, y, z) = (e(t[0]), e(t[1]), e(t[2]));
            let lhs = m.eta(&r.apply(&x, &y, &z));
            let rhs = &m.pairing(&x, &z) * &m.eta(&y) - &m.pairing(&y, &z) * &m.eta(&x);
            Ok(lhs - rhs)
        })?,
        scan_vector("identity.curvature_on_xi", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            let rhs = &y.scale(&m.eta(&x)) - &x.scale(&m.eta(&y));
            Ok(&r.apply(&x, &y, xi) - &rhs)
        })?,
        scan_vector("identity.curvature_xi_slot", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            let rhs = &xi.scale(&m.pairing(&x, &y)) - &x.scale(&m.eta(&y));
            Ok(&r.apply(&x, xi, &y) - &rhs)
        })?,
        scan_scalar("identity.ricci_on_xi", dim, 1, |t| {
            let x = e(t[0]);
            Ok(s.eval(&x, xi) + m.eta(&x).scale(&n2))
        })?,
        scan_scalar("identity.ricci_phi_invariance", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            let lhs = s.eval(&m.phi(&x), &m.phi(&y));
            Ok(lhs - s.eval(&x, &y) - (&m.eta(&x) * &m.eta(&y)).scale(&n2))
        })?,
        scan_scalar("identity.nabla_eta", dim, 2, |t| {
            let (x, y) = (e(t[0]), e(t[1]));
            let lhs = covariant_derivative_form(m, conn, &x, &eta)?.apply(&y);
            Ok(lhs - m.pairing(&x, &y) + &m.eta(&x) * &m.eta(&y))
        })?,
        scan_tensor(
            "identity.lie_xi_metric",
            &(&lie_xi - &(&g - &ee).scale_rational(&int(2))),
        ),
    ])
}

/// `(nabla_Y Q*) xi = nabla_Y xi`, `(nabla_xi Q*) Y = 0` and their
/// difference `(nabla_Y Q*) xi - (nabla_xi Q*) Y = nabla_Y xi`.
pub fn lemma_nabla_qstar(
    m: &FramedManifold,
    conn: &Connection,
    qstar: &Endomorphism,
) -> Result<Vec<CheckResult>, Error> {
    let dim = m.dim();
    let xi = m.xi();
    let along_xi = covariant_derivative_endomorphism(m, conn, xi, qstar)?;
    let mut on_xi = Vec::with_capacity(dim);
    for y in 0..dim {
        let d = covariant_derivative_endomorphism(m, conn, &m.basis(y), qstar)?;
        on_xi.push(d.apply(xi));
    }
    let nabla_xi: Vec<FrameVectorField> = (0..dim)
        .map(|y| covariant_derivative(m, conn, &m.basis(y), xi))
        .collect::<Result<_, _>>()?;
    Ok(vec![
        scan_vector("lemma.nabla_qstar_on_xi", dim, 1, |t| {
            Ok(&on_xi[t[0]] - &nabla_xi[t[0]])
        })?,
        scan_vector("lemma.nabla_xi_qstar", dim, 1, |t| {
            Ok(along_xi.apply(&m.basis(t[0])))
        })?,
        scan_vector("lemma.nabla_qstar_difference", dim, 1, |t| {
            let y = m.basis(t[0]);
            Ok(&(&on_xi[t[0]] - &along_xi.apply(&y)) - &nabla_xi[t[0]])
        })?,
    ])
}

/// `Q* X = -X + eta(X) xi`, which holds when `S* = -g + eta (x) eta`.
pub fn check_qstar_formula(m: &FramedManifold, qstar: &Endomorphism) -> CheckResult {
    let dim = m.dim();
    scan_vector("example.qstar_formula", dim, 1, |t| {
        let x = m.basis(t[0]);
        Ok(&qstar.apply(&x) - &phi_squared_target(m, &x))
    })
    .expect("no fallible steps")
}

/// `(nabla_Y Q*) X = g(X, Y) xi - 2 eta(X) eta(Y) xi + eta(X) Y`.
pub fn check_nabla_qstar_expansion(
    m: &FramedManifold,
    conn: &Connection,
    qstar: &Endomorphism,
) -> Result<CheckResult, Error> {
    let dim = m.dim();
    let two = int(2);
    let derivs: Vec<Endomorphism> = (0..dim)
        .map(|y| covariant_derivative_endomorphism(m, conn, &m.basis(y), qstar))
        .collect::<Result<_, _>>()?;
    scan_vector("example.nabla_qstar_expansion", dim, 2, |t| {
        let (x, y) = (m.basis(t[0]), m.basis(t[1]));
        let lhs = derivs[t[1]].apply(&x);
        let ex = m.eta(&x);
        let coeff = m.pairing(&x, &y) - (&ex * &m.eta(&y)).scale(&two);
        let rhs = &m.xi().scale(&coeff) + &y.scale(&ex);
        Ok(&lhs - &rhs)
    })
}

/// Jacobi identity for the frame brackets.
pub fn check_jacobi(m: &FramedManifold) -> Result<CheckResult, Error> {
    let dim = m.dim();
    scan_vector("structure.jacobi", dim, 3, |t| {
        let (x, y, z) = (m.basis(t[0]), m.basis(t[1]), m.basis(t[2]));
        let a = m.lie_bracket(&x, &m.lie_bracket(&y, &z)?)?;
        let b = m.lie_bracket(&y, &m.lie_bracket(&z, &x)?)?;
        let c = m.lie_bracket(&z, &m.lie_bracket(&x, &y)?)?;
        Ok(&(&a + &b) + &c)
    })
}

/// Torsion-freeness and metric compatibility of the connection.
pub fn check_connection(m: &FramedManifold, conn: &Connection) -> Vec<CheckResult> {
    let dim = m.dim();
    let torsion = scan_vector("connection.torsion_free", dim, 2, |t| {
        let (i, j) = (t[0], t[1]);
        Ok(&(conn.nabla_frame(i, j) - conn.nabla_frame(j, i)) - m.bracket(i, j))
    })
    .expect("no fallible steps");
    let metric = scan_scalar("connection.metric_compatible", dim, 3, |t| {
        let (k, i, j) = (t[0], t[1], t[2]);
        Ok(m.pairing(conn.nabla_frame(k, i), &m.basis(j))
            + m.pairing(&m.basis(i), conn.nabla_frame(k, j)))
    })
    .expect("no fallible steps");
    vec![torsion, metric]
}

/// Antisymmetry, first Bianchi identity and pair symmetry.
pub fn check_riemann_symmetries(m: &FramedManifold, r: &RiemannTensor) -> Vec<CheckResult> {
    let dim = m.dim();
    let antisym = scan_vector("riemann.antisymmetry", dim, 3, |t| {
        Ok(r.component(t[0], t[1], t[2]) + r.component(t[1], t[0], t[2]))
    });
    let bianchi = scan_vector("riemann.first_bianchi", dim, 3, |t| {
        let (i, j, k) = (t[0], t[1], t[2]);
        Ok(&(r.component(i, j, k) + r.component(j, k, i)) + r.component(k, i, j))
    });
    let pair = scan_scalar("riemann.pair_symmetry", dim, 4, |t| {
        let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
        Ok(m.pairing(r.component(i, j, k), &m.basis(l))
            - m.pairing(r.component(k, l, i), &m.basis(j)))
    });
    [antisym, bianchi, pair]
        .into_iter()
        .map(|c| c.expect("no fallible steps"))
        .collect()
}

/// Symmetry of the Ricci tensor and agreement of the two *-Ricci routes.
pub fn check_ricci_data(
    m: &FramedManifold,
    s: &Tensor02,
    r: &CoeffExpr,
    star_definitional: &Tensor02,
    star_closed_form: Option<&Tensor02>,
    star_r: &CoeffExpr,
) -> Vec<CheckResult> {
    let mut out = vec![scan_tensor(
        "ricci.symmetric",
        &Tensor02::from_fn(m.dim(), |i, j| s.get(i, j) - s.get(j, i)),
    )];
    if let Some(closed) = star_closed_form {
        out.push(scan_tensor(
            "star_ricci.routes_agree",
            &(star_definitional - closed),
        ));
        out.push(
            scan_scalar("star_ricci.scalar_formula", 1, 0, |_| {
                Ok(star_r - &star_scalar_kenmotsu(m, r))
            })
            .expect("no fallible steps"),
        );
    }
    out
}

/// A named single-sign perturbation of a manifold description.
#[derive(Clone, Debug)]
pub struct Mutation {
    pub name: String,
    pub spec: ManifoldSpec,
}

fn structure_table(m: &FramedManifold) -> Vec<Vec<FrameVectorField>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.bracket(i, j).clone()).collect())
        .collect()
}

/// Systematic single-sign perturbations of a valid description: each image
/// `phi(e_i)` for `i` outside `xi`, the sign of `xi`, each nonzero bracket
/// pair `[e_i, e_j] = -[e_j, e_i]` written through structure functions, and
/// the exponent of the first non-constant frame scale.
pub fn mutations(spec: &ManifoldSpec, m: &FramedManifold) -> Vec<Mutation> {
    let mut out = Vec::new();
    for i in 0..spec.dim {
        if spec.phi[i].iter().all(Zero::is_zero) {
            continue;
        }
        let mut s = spec.clone();
        for c in s.phi[i].iter_mut() {
            *c = -c.clone();
        }
        out.push(Mutation {
            name: format!("phi({}) negated", spec.frame_names[i]),
            spec: s,
        });
    }
    let mut s = spec.clone();
    s.xi = s.xi.iter().map(|c| -c.clone()).collect();
    out.push(Mutation {
        name: "xi negated".into(),
        spec: s,
    });
    let table = structure_table(m);
    for i in 0..spec.dim {
        for j in i + 1..spec.dim {
            if table[i][j].is_zero() {
                continue;
            }
            let mut t = table.clone();
            t[i][j] = -&table[i][j];
            t[j][i] = -&table[j][i];
            let mut s = spec.clone();
            s.frame = FrameSpec::Structure(t);
            out.push(Mutation {
                name: format!(
                    "[{}, {}] negated",
                    spec.frame_names[i], spec.frame_names[j]
                ),
                spec: s,
            });
        }
    }
    if let FrameSpec::Diagonal(axes) = &spec.frame {
        if let Some(i) = axes.iter().position(|a| a.scale.as_rational().is_none()) {
            let mut s = spec.clone();
            if let FrameSpec::Diagonal(axes) = &mut s.frame {
                axes[i].scale = axes[i].scale.invert_unit().expect("validated unit");
            }
            out.push(Mutation {
                name: format!("scale of {} inverted", spec.frame_names[i]),
                spec: s,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::koszul_connection;
    use crate::curvature::{riemann, ricci};
    use crate::expr::int;
    use crate::fixtures::{abelian5_spec, kenmotsu5, kenmotsu5_spec};
    use crate::manifold::{build_manifold, build_manifold_relaxed};

    #[test]
    fn example_passes_everything() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let r = riemann(&m, &c).unwrap();
        let s = ricci(&r);
        assert!(all_pass(&verify_almost_contact(&m).unwrap()));
        assert!(all_pass(&verify_kenmotsu(&m, &c).unwrap()));
        assert!(all_pass(&identity_suite(&m, &c, &r, &s).unwrap()));
        assert!(check_jacobi(&m).unwrap().passed());
        assert!(all_pass(&check_connection(&m, &c)));
        assert!(all_pass(&check_riemann_symmetries(&m, &r)));
    }

    #[test]
    fn phi_perturbation_has_witness_e1() {
        let mut spec = kenmotsu5_spec();
        spec.phi[2][0] = int(1);
        let m = build_manifold(spec).unwrap();
        let checks = verify_almost_contact(&m).unwrap();
        let w = checks[0].witness.as_ref().unwrap();
        assert_eq!(w.frames, vec![0]);
        assert_eq!(w.component, Some(0));
        assert_eq!(w.residual, CoeffExpr::integer(2));
    }

    #[test]
    fn rescaled_xi_fails_normalization() {
        let mut spec = kenmotsu5_spec();
        spec.xi[4] = int(2);
        let m = build_manifold_relaxed(spec).unwrap();
        let checks = verify_almost_contact(&m).unwrap();
        assert!(!checks[1].passed());
    }

    #[test]
    fn abelian_frame_is_not_kenmotsu() {
        let m = build_manifold(abelian5_spec()).unwrap();
        let c = koszul_connection(&m);
        assert!(all_pass(&verify_almost_contact(&m).unwrap()));
        let k = verify_kenmotsu(&m, &c).unwrap();
        assert!(!k[1].passed());
    }

    #[test]
    fn ten_mutations() {
        let spec = kenmotsu5_spec();
        let m = kenmotsu5();
        assert_eq!(mutations(&spec, &m).len(), 10);
    }
}
