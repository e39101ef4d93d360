//! All derived data of a framed manifold, computed once.

use alloc::vec::Vec;

use crate::connection::{koszul_connection, Connection};
use crate::curvature::{
    raise, ricci, riemann, scalar_curvature, star_ricci_definitional, star_ricci_kenmotsu,
    star_scalar, KenmotsuGate, RiemannTensor,
};
use crate::error::Error;
use crate::expr::CoeffExpr;
use crate::manifold::FramedManifold;
use crate::tensor::{Endomorphism, Tensor02};
use crate::verify::{self, all_pass, CheckResult};

#[derive(Clone, Debug)]
pub struct Geometry {
    pub manifold: FramedManifold,
    pub connection: Connection,
    pub riemann: RiemannTensor,
    pub ricci: Tensor02,
    pub scalar: CoeffExpr,
    /// *-Ricci tensor from its defining trace.
    pub star_ricci: Tensor02,
    pub star_scalar: CoeffExpr,
    pub almost_contact: Vec<CheckResult>,
    pub kenmotsu: Vec<CheckResult>,
}

impl Geometry {
    pub fn new(manifold: FramedManifold) -> Result<Self, Error> {
        let connection = koszul_connection(&manifold);
        let riemann = riemann(&manifold, &connection)?;
        let ricci = ricci(&riemann);
        let scalar = scalar_curvature(&manifold, &ricci);
        let star_ricci = star_ricci_definitional(&manifold, &riemann);
        let star_scalar = star_scalar(&manifold, &star_ricci);
        let almost_contact = verify::verify_almost_contact(&manifold)?;
        let kenmotsu = verify::verify_kenmotsu(&manifold, &connection)?;
        Ok(Geometry {
            manifold,
            connection,
            riemann,
            ricci,
            scalar,
            star_ricci,
            star_scalar,
            almost_contact,
            kenmotsu,
        })
    }

    /// Both the almost contact axioms and the Kenmotsu conditions hold.
    pub fn is_kenmotsu(&self) -> bool {
        all_pass(&self.almost_contact) && all_pass(&self.kenmotsu)
    }

    pub fn gate(&self) -> KenmotsuGate {
        if self.is_kenmotsu() {
            KenmotsuGate::Verified
        } else {
            KenmotsuGate::Failed
        }
    }

    /// `(S*, r*)` or `(S, r)`.
    pub fn ricci_pair(&self, star: bool) -> (&Tensor02, &CoeffExpr) {
        if star {
            (&self.star_ricci, &self.star_scalar)
        } else {
            (&self.ricci, &self.scalar)
        }
    }

    pub fn star_ricci_closed_form(&self) -> Result<Tensor02, Error> {
        star_ricci_kenmotsu(&self.manifold, &self.ricci, self.gate())
    }

    pub fn ricci_operator(&self) -> Endomorphism {
        raise(&self.manifold, &self.ricci)
    }

    pub fn star_ricci_operator(&self) -> Endomorphism {
        raise(&self.manifold, &self.star_ricci)
    }

    /// Every structural and identity check, in a fixed order. The identity
    /// suite and the lemma are only meaningful on Kenmotsu manifolds but are
    /// always evaluated so that failures carry witnesses.
    pub fn all_checks(&self) -> Result<Vec<CheckResult>, Error> {
        let m = &self.manifold;
        let mut out = Vec::new();
        out.push(verify::check_jacobi(m)?);
        out.extend(verify::check_connection(m, &self.connection));
        out.extend(verify::check_riemann_symmetries(m, &self.riemann));
        let closed = self.star_ricci_closed_form().ok();
        out.extend(verify::check_ricci_data(
            m,
            &self.ricci,
            &self.scalar,
            &self.star_ricci,
            closed.as_ref(),
            &self.star_scalar,
        ));
        out.extend(self.almost_contact.iter().cloned());
        out.extend(self.kenmotsu.iter().cloned());
        out.extend(verify::identity_suite(
            m,
            &self.connection,
            &self.riemann,
            &self.ricci,
        )?);
        out.extend(verify::lemma_nabla_qstar(
            m,
            &self.connection,
            &self.star_ricci_operator(),
        )?);
        Ok(out)
    }
}
