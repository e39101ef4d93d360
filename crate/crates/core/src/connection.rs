//! Levi-Civita connection on frame fields.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::expr::{ratio, CoeffExpr};
use crate::manifold::{FrameVectorField, FramedManifold};
use crate::tensor::{Endomorphism, OneForm};

/// `gamma[i][j] = nabla_{e_i} e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    gamma: Vec<Vec<FrameVectorField>>,
}

impl Connection {
    pub fn nabla_frame(&self, i: usize, j: usize) -> &FrameVectorField {
        &self.gamma[i][j]
    }

    /// `Gamma^k_ij`.
    pub fn christoffel(&self, i: usize, j: usize, k: usize) -> &CoeffExpr {
        &self.gamma[i][j][k]
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }
}

/// Koszul's formula for a constant frame metric:
///
/// `2 g(nabla_i e_j, e_l) = -g(e_i, [e_j, e_l]) - g(e_j, [e_i, e_l]) + g(e_l, [e_i, e_j])`.
pub fn koszul_connection(m: &FramedManifold) -> Connection {
    let dim = m.dim();
    let half = ratio(1, 2);
    let ginv = m.metric_inverse();
    let mut gamma = Vec::with_capacity(dim);
    for i in 0..dim {
        let ei = m.basis(i);
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            let ej = m.basis(j);
            let lowered: Vec<CoeffExpr> = (0..dim)
                .map(|l| {
                    let el = m.basis(l);
                    let s = m.pairing(&el, m.bracket(i, j))
                        - m.pairing(&ei, m.bracket(j, l))
                        - m.pairing(&ej, m.bracket(i, l));
                    s.scale(&half)
                })
                .collect();
            let mut v = Vec::with_capacity(dim);
            for row in ginv.iter().take(dim) {
                let mut acc = CoeffExpr::zero();
                for (l, c) in lowered.iter().enumerate() {
                    if !row[l].is_zero() {
                        acc += c.scale(&row[l]);
                    }
                }
                v.push(acc);
            }
            row.push(FrameVectorField::new(v));
        }
        gamma.push(row);
    }
    Connection { gamma }
}

/// `nabla_X W = X(W^j) e_j + X^i W^j nabla_{e_i} e_j`.
pub fn covariant_derivative(
    m: &FramedManifold,
    conn: &Connection,
    x: &FrameVectorField,
    w: &FrameVectorField,
) -> Result<FrameVectorField, Error> {
    let mut out = Vec::with_capacity(m.dim());
    for j in 0..m.dim() {
        out.push(m.directional_derivative(x, &w[j])?);
    }
    let mut out = FrameVectorField::new(out);
    for i in x.support() {
        for j in w.support() {
            let g = &conn.gamma[i][j];
            if !g.is_zero() {
                out = &out + &g.scale(&(&x[i] * &w[j]));
            }
        }
    }
    Ok(out)
}

/// `(nabla_X w)(Y) = X(w(Y)) - w(nabla_X Y)`, returned on the frame.
pub fn covariant_derivative_form(
    m: &FramedManifold,
    conn: &Connection,
    x: &FrameVectorField,
    w: &OneForm,
) -> Result<OneForm, Error> {
    let mut out = Vec::with_capacity(m.dim());
    for j in 0..m.dim() {
        let ej = m.basis(j);
        let d = m.directional_derivative(x, &w.values()[j])?;
        let nabla = covariant_derivative(m, conn, x, &ej)?;
        out.push(d - w.apply(&nabla));
    }
    Ok(OneForm::new(out))
}

/// `(nabla_X A)(W) = nabla_X(A W) - A(nabla_X W)` for each frame field `W`.
pub fn covariant_derivative_endomorphism(
    m: &FramedManifold,
    conn: &Connection,
    x: &FrameVectorField,
    a: &Endomorphism,
) -> Result<Endomorphism, Error> {
    let mut cols = Vec::with_capacity(m.dim());
    for i in 0..m.dim() {
        let ei = m.basis(i);
        let first = covariant_derivative(m, conn, x, a.column(i))?;
        let second = a.apply(&covariant_derivative(m, conn, x, &ei)?);
        cols.push(&first - &second);
    }
    Ok(Endomorphism::new(cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::kenmotsu5;
    use alloc::vec;

    fn e(s: &str) -> CoeffExpr {
        CoeffExpr::parse(s).unwrap()
    }

    #[test]
    fn connection_table_matches_example() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        for i in 0..5 {
            for j in 0..5 {
                let expected = match (i, j) {
                    (i, j) if i < 4 && i == j => -&m.basis(4),
                    (i, 4) if i < 4 => m.basis(i),
                    _ => FrameVectorField::zero(5),
                };
                assert_eq!(c.nabla_frame(i, j), &expected, "nabla_e{} e{}", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn derivative_of_the_example_potential() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let v = FrameVectorField::new(vec![
            e("x*exp(v)"),
            e("y*exp(v)"),
            e("z*exp(v)"),
            e("u*exp(v)"),
            e("1"),
        ]);
        let d = covariant_derivative(&m, &c, &m.basis(0), &v).unwrap();
        assert_eq!(
            d,
            FrameVectorField::new(vec![e("2"), e("0"), e("0"), e("0"), e("-x*exp(v)")])
        );
        let d2 = covariant_derivative(&m, &c, &m.basis(1), m.xi()).unwrap();
        assert_eq!(d2, m.basis(1));
        assert!(covariant_derivative(&m, &c, &m.basis(4), m.xi()).unwrap().is_zero());
    }

    #[test]
    fn nabla_phi_vanishes_on_e1_e1() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let phi = Endomorphism::phi(&m);
        let d = covariant_derivative_endomorphism(&m, &c, &m.basis(0), &phi).unwrap();
        assert!(d.column(0).is_zero());
    }

    #[test]
    fn nabla_eta_on_frame() {
        let m = kenmotsu5();
        let c = koszul_connection(&m);
        let d = covariant_derivative_form(&m, &c, &m.basis(0), &OneForm::eta(&m)).unwrap();
        assert!(d.values()[0].is_one());
        assert!(d.values()[4].is_zero());
    }
}
