//! Riemann, Ricci and *-Ricci data.
//!
//! Conventions: `R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`,
//! `S(X, Y) = Tr(Z -> R(Z, X)Y)` and `S*(X, Y) = 1/2 Tr(Z -> phi R(X, phi Y) Z)`.

use alloc::vec::Vec;

use crate::connection::{covariant_derivative, Connection};
use crate::error::Error;
use crate::expr::{int, ratio, CoeffExpr};
use crate::manifold::{FrameVectorField, FramedManifold};
use crate::tensor::{Endomorphism, Tensor02};

/// `R(e_i, e_j) e_k` for every index triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiemannTensor {
    components: Vec<Vec<Vec<FrameVectorField>>>,
}

impl RiemannTensor {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize, j: usize, k: usize) -> &FrameVectorField {
        &self.components[i][j][k]
    }

    /// `R(X, Y)Z`, extended trilinearly.
    pub fn apply(
        &self,
        x: &FrameVectorField,
        y: &FrameVectorField,
        z: &FrameVectorField,
    ) -> FrameVectorField {
        let mut out = FrameVectorField::zero(self.dim());
        for i in x.support() {
            for j in y.support() {
                for k in z.support() {
                    let c = &self.components[i][j][k];
                    if !c.is_zero() {
                        out = &out + &c.scale(&(&(&x[i] * &y[j]) * &z[k]));
                    }
                }
            }
        }
        out
    }

    /// Nonzero `(i, j, k, R(e_i, e_j) e_k)` in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, &FrameVectorField)> {
        self.components.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().flat_map(move |(j, col)| {
                col.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(move |(k, v)| (i, j, k, v))
            })
        })
    }
}

pub fn riemann(m: &FramedManifold, conn: &Connection) -> Result<RiemannTensor, Error> {
    let dim = m.dim();
    let mut components = Vec::with_capacity(dim);
    for i in 0..dim {
        let ei = m.basis(i);
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            let ej = m.basis(j);
            let mut col = Vec::with_capacity(dim);
            for k in 0..dim {
                if i == j {
                    col.push(FrameVectorField::zero(dim));
                    continue;
                }
                let first = covariant_derivative(m, conn, &ei, conn.nabla_frame(j, k))?;
                let second = covariant_derivative(m, conn, &ej, conn.nabla_frame(i, k))?;
                let third = covariant_derivative(m, conn, m.bracket(i, j), &m.basis(k))?;
                col.push(&(&first - &second) - &third);
            }
            row.push(col);
        }
        components.push(row);
    }
    Ok(RiemannTensor { components })
}

/// `S(e_i, e_j) = sum_k (R(e_k, e_i) e_j)^k`.
pub fn ricci(r: &RiemannTensor) -> Tensor02 {
    let dim = r.dim();
    Tensor02::from_fn(dim, |i, j| {
        (0..dim).map(|k| r.component(k, i, j)[k].clone()).sum()
    })
}

pub fn scalar_curvature(m: &FramedManifold, s: &Tensor02) -> CoeffExpr {
    s.trace(m)
}

/// `S*(X, Y) = 1/2 sum_k (phi R(X, phi Y) e_k)^k`.
pub fn star_ricci_definitional(m: &FramedManifold, r: &RiemannTensor) -> Tensor02 {
    let dim = m.dim();
    let half = ratio(1, 2);
    Tensor02::from_fn(dim, |i, j| {
        let ei = m.basis(i);
        let phi_ej = m.phi(&m.basis(j));
        let mut acc = CoeffExpr::zero();
        for k in 0..dim {
            let image = m.phi(&r.apply(&ei, &phi_ej, &m.basis(k)));
            acc += image[k].clone();
        }
        acc.scale(&half)
    })
}

/// Whether the closed-form *-Ricci formula may be used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KenmotsuGate {
    Verified,
    Failed,
    /// Caller asserts the formula regardless of the verification outcome.
    Override,
}

/// `S* = S + (2n - 1) g + eta (x) eta`, valid on Kenmotsu manifolds.
pub fn star_ricci_kenmotsu(
    m: &FramedManifold,
    s: &Tensor02,
    gate: KenmotsuGate,
) -> Result<Tensor02, Error> {
    if gate == KenmotsuGate::Failed {
        return Err(Error::NotKenmotsu);
    }
    let coeff = int(2 * m.n() as i64 - 1);
    let g = Tensor02::metric(m).scale_rational(&coeff);
    Ok(&(s + &g) + &Tensor02::eta_eta(m))
}

pub fn star_scalar(m: &FramedManifold, star: &Tensor02) -> CoeffExpr {
    star.trace(m)
}

/// `r + 4n^2`.
pub fn star_scalar_kenmotsu(m: &FramedManifold, r: &CoeffExpr) -> CoeffExpr {
    let n = m.n() as i64;
    r + &CoeffExpr::integer(4 * n * n)
}

/// The endomorphism `A` with `g(A X, Y) = T(X, Y)`.
pub fn raise(m: &FramedManifold, t: &Tensor02) -> Endomorphism {
    Endomorphism::new((0..m.dim()).map(|i| m.raise(&t.rows()[i])).collect())
}

/// `(Q, Q*)`.
pub fn ricci_operators(
    m: &FramedManifold,
    s: &Tensor02,
    star: &Tensor02,
) -> (Endomorphism, Endomorphism) {
    (raise(m, s), raise(m, star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::koszul_connection;
    use crate::fixtures::kenmotsu5;

    #[test]
    fn example_curvature_samples() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let r = riemann(&m, &c).unwrap();
        assert_eq!(r.component(0, 1, 1), &-&m.basis(0));
        assert_eq!(r.component(0, 4, 0), &m.basis(4));
        assert!(r.component(0, 1, 2).is_zero());
        assert_eq!(r.nonzero().count(), 40);
    }

    #[test]
    fn ricci_and_star_ricci() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let r = riemann(&m, &c).unwrap();
        let s = ricci(&r);
        assert_eq!(s, Tensor02::metric(&m).scale_rational(&int(-4)));
        assert_eq!(scalar_curvature(&m, &s), CoeffExpr::integer(-20));
        let def = star_ricci_definitional(&m, &r);
        let closed = star_ricci_kenmotsu(&m, &s, KenmotsuGate::Verified).unwrap();
        assert_eq!(def, closed);
        assert_eq!(def.get(0, 0), &CoeffExpr::integer(-1));
        assert!(def.get(4, 4).is_zero());
        assert_eq!(star_scalar(&m, &def), CoeffExpr::integer(-4));
        assert_eq!(
            star_ricci_kenmotsu(&m, &s, KenmotsuGate::Failed),
            Err(Error::NotKenmotsu)
        );
    }

    #[test]
    fn operators() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let r = riemann(&m, &c).unwrap();
        let s = ricci(&r);
        let (q, qs) = ricci_operators(&m, &s, &star_ricci_definitional(&m, &r));
        assert_eq!(q.column(0), &m.basis(0).scale_rational(&int(-4)));
        assert_eq!(qs.column(0), &-&m.basis(0));
        assert!(qs.column(4).is_zero());
    }
}
