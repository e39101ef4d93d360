//! Odd-dimensional manifolds described by an orthonormal-style frame and an
//! almost contact structure `(phi, xi, eta, g)`.
//!
//! Two frame descriptions are supported:
//!
//! * diagonal-unit frames, `e_i = u_i * d/d(x_sigma(i))` with every `u_i` a
//!   unit of the coefficient algebra, so brackets can be re-expressed in the
//!   frame exactly;
//! * explicit structure functions `[e_i, e_j] = c^k_ij e_k`, for frames that
//!   are only known through their brackets. Frame derivatives of
//!   non-constant coefficients are unavailable in this form.
//!
//! The metric is constant on frame indices and `eta` is always derived as
//! `g(., xi)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::Error;
use crate::expr::{CoeffExpr, Rational};
use crate::linalg::{self, Matrix};

/// Components of a vector field in the frame basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrameVectorField {
    components: Vec<CoeffExpr>,
}

impl FrameVectorField {
    pub fn new(components: Vec<CoeffExpr>) -> Self {
        FrameVectorField { components }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(alloc::vec![CoeffExpr::zero(); dim])
    }

    /// The frame field `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.components[i] = CoeffExpr::one();
        v
    }

    pub fn from_rationals(values: &[Rational]) -> Self {
        Self::new(values.iter().cloned().map(CoeffExpr::constant).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[CoeffExpr] {
        &self.components
    }

    pub fn into_components(self) -> Vec<CoeffExpr> {
        self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(CoeffExpr::is_zero)
    }

    pub fn scale(&self, f: &CoeffExpr) -> Self {
        Self::new(self.components.iter().map(|c| c * f).collect())
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        Self::new(self.components.iter().map(|x| x.scale(c)).collect())
    }

    /// Indices of nonzero components.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i)
    }

    /// Renders as a linear combination of the named frame fields.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for i in self.support() {
            let c = &self.components[i];
            let name = names.get(i).map_or("?", String::as_str);
            let text = if c.is_one() {
                String::from(name)
            } else if (-c).is_one() {
                format!("-{name}")
            } else if c.len() == 1 {
                format!("{c}*{name}")
            } else {
                format!("({c})*{name}")
            };
            if out.is_empty() {
                out = text;
            } else if let Some(rest) = text.strip_prefix('-') {
                out = format!("{out} - {rest}");
            } else {
                out = format!("{out} + {text}");
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl Index<usize> for FrameVectorField {
    type Output = CoeffExpr;

    fn index(&self, i: usize) -> &CoeffExpr {
        &self.components[i]
    }
}

impl Add for &FrameVectorField {
    type Output = FrameVectorField;

    fn add(self, rhs: &FrameVectorField) -> FrameVectorField {
        FrameVectorField::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &FrameVectorField {
    type Output = FrameVectorField;

    fn sub(self, rhs: &FrameVectorField) -> FrameVectorField {
        FrameVectorField::new(
            self.components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &FrameVectorField {
    type Output = FrameVectorField;

    fn neg(self) -> FrameVectorField {
        FrameVectorField::new(self.components.iter().map(|a| -a).collect())
    }
}

impl Add for FrameVectorField {
    type Output = FrameVectorField;

    fn add(self, rhs: FrameVectorField) -> FrameVectorField {
        &self + &rhs
    }
}

impl Sub for FrameVectorField {
    type Output = FrameVectorField;

    fn sub(self, rhs: FrameVectorField) -> FrameVectorField {
        &self - &rhs
    }
}

impl fmt::Display for FrameVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.dim()).map(|i| format!("e{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

/// Components of a vector field in the coordinate basis `d/dx_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateVectorField {
    components: Vec<CoeffExpr>,
}

impl CoordinateVectorField {
    pub fn new(components: Vec<CoeffExpr>) -> Self {
        CoordinateVectorField { components }
    }

    pub fn components(&self) -> &[CoeffExpr] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// One axis of a diagonal-unit frame: `e = scale * d/d(coords[coord])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameAxis {
    pub coord: usize,
    pub scale: CoeffExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameSpec {
    Diagonal(Vec<FrameAxis>),
    /// `brackets[i][j] = [e_i, e_j]` in frame components.
    Structure(Vec<Vec<FrameVectorField>>),
}

/// Input description of a framed manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifoldSpec {
    pub dim: usize,
    pub coords: Vec<String>,
    pub frame_names: Vec<String>,
    pub frame: FrameSpec,
    /// Constant frame metric; identity when absent.
    pub metric: Option<Matrix>,
    /// Frame components of the Reeb field.
    pub xi: Vec<Rational>,
    /// `phi[i]` holds the frame components of `phi(e_i)`.
    pub phi: Matrix,
}

impl ManifoldSpec {
    /// Reeb field equal to the frame field `e_index`.
    pub fn xi_basis(dim: usize, index: usize) -> Vec<Rational> {
        (0..dim)
            .map(|i| if i == index { Rational::one() } else { Rational::zero() })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramedManifold {
    dim: usize,
    coords: Vec<String>,
    frame_names: Vec<String>,
    frame: FrameSpec,
    metric: Matrix,
    metric_inv: Matrix,
    xi: FrameVectorField,
    xi_raw: Vec<Rational>,
    phi: Matrix,
    brackets: Vec<Vec<FrameVectorField>>,
}

/// Builds and fully validates a manifold, including `eta(xi) = 1`.
pub fn build_manifold(spec: ManifoldSpec) -> Result<FramedManifold, Error> {
    let m = build_manifold_relaxed(spec)?;
    let norm = m.pairing(&m.xi, &m.xi);
    if !norm.is_one() {
        return Err(Error::XiNotUnit(format!("{norm}")));
    }
    Ok(m)
}

/// Like [`build_manifold`] but without the normalization `eta(xi) = 1`, so
/// that the contact verifier can report it as a failing check instead.
pub fn build_manifold_relaxed(spec: ManifoldSpec) -> Result<FramedManifold, Error> {
    let ManifoldSpec {
        dim,
        coords,
        frame_names,
        frame,
        metric,
        xi,
        phi,
    } = spec;
    if dim % 2 == 0 {
        return Err(Error::EvenDimension(dim));
    }
    if dim < 3 {
        return Err(Error::BadFrame(format!(
            "dimension {dim} is below the minimum 3 (n >= 1)"
        )));
    }
    if coords.len() != dim {
        return Err(Error::ArityMismatch {
            what: "coordinates",
            expected: dim,
            found: coords.len(),
        });
    }
    if coords.iter().collect::<BTreeSet<_>>().len() != dim {
        return Err(Error::BadFrame("duplicate coordinate name".into()));
    }
    if frame_names.len() != dim {
        return Err(Error::ArityMismatch {
            what: "frame fields",
            expected: dim,
            found: frame_names.len(),
        });
    }
    if frame_names.iter().collect::<BTreeSet<_>>().len() != dim {
        return Err(Error::BadFrame("duplicate frame field name".into()));
    }
    let check_symbols = |e: &CoeffExpr| -> Result<(), Error> {
        match e.symbols().into_iter().find(|s| !coords.iter().any(|c| c == s)) {
            Some(s) => Err(Error::UnknownSymbol(s.into())),
            None => Ok(()),
        }
    };
    match &frame {
        FrameSpec::Diagonal(axes) => {
            if axes.len() != dim {
                return Err(Error::ArityMismatch {
                    what: "frame fields",
                    expected: dim,
                    found: axes.len(),
                });
            }
            let targets: BTreeSet<usize> = axes.iter().map(|a| a.coord).collect();
            if targets.len() != dim || targets.iter().any(|&c| c >= dim) {
                return Err(Error::BadFrame(
                    "frame targets must be a permutation of the coordinates".into(),
                ));
            }
            for (i, a) in axes.iter().enumerate() {
                check_symbols(&a.scale)?;
                if !a.scale.is_unit() {
                    return Err(Error::NonUnitFrameScale {
                        index: i,
                        scale: format!("{}", a.scale),
                    });
                }
            }
        }
        FrameSpec::Structure(table) => {
            if table.len() != dim || table.iter().any(|r| r.len() != dim) {
                return Err(Error::BadStructure(format!("expected a {dim}x{dim} bracket table")));
            }
            for (i, row) in table.iter().enumerate() {
                for (j, b) in row.iter().enumerate() {
                    if b.dim() != dim {
                        return Err(Error::BadStructure(format!(
                            "[e{}, e{}] has {} components",
                            i + 1,
                            j + 1,
                            b.dim()
                        )));
                    }
                    for c in b.components() {
                        check_symbols(c)?;
                    }
                    if b != &-&table[j][i] {
                        return Err(Error::BadStructure(format!(
                            "[e{}, e{}] is not antisymmetric",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
    }
    let metric = metric.unwrap_or_else(|| linalg::identity(dim));
    if !linalg::is_square(&metric, dim) {
        return Err(Error::BadMetric(format!("expected a {dim}x{dim} matrix")));
    }
    if !linalg::is_symmetric(&metric) {
        return Err(Error::BadMetric("not symmetric".into()));
    }
    if !linalg::is_positive_definite(&metric) {
        return Err(Error::BadMetric("not positive definite".into()));
    }
    let metric_inv = linalg::inverse(&metric)
        .ok_or_else(|| Error::BadMetric("singular".into()))?;
    if xi.len() != dim {
        return Err(Error::ArityMismatch {
            what: "xi components",
            expected: dim,
            found: xi.len(),
        });
    }
    if !linalg::is_square(&phi, dim) {
        return Err(Error::BadPhiShape(format!(
            "expected {dim} images of {dim} components each"
        )));
    }
    let mut m = FramedManifold {
        dim,
        coords,
        frame_names,
        frame,
        metric,
        metric_inv,
        xi: FrameVectorField::from_rationals(&xi),
        xi_raw: xi,
        phi,
        brackets: Vec::new(),
    };
    m.brackets = match &m.frame {
        FrameSpec::Structure(table) => table.clone(),
        FrameSpec::Diagonal(_) => {
            let mut rows = Vec::with_capacity(dim);
            for i in 0..dim {
                let mut row = Vec::with_capacity(dim);
                for j in 0..dim {
                    row.push(m.coordinate_bracket(&m.basis(i), &m.basis(j))?);
                }
                rows.push(row);
            }
            rows
        }
    };
    Ok(m)
}

impl FramedManifold {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n` in `dim = 2n + 1`.
    pub fn n(&self) -> usize {
        (self.dim - 1) / 2
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn frame_names(&self) -> &[String] {
        &self.frame_names
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.frame
    }

    pub fn metric(&self) -> &Matrix {
        &self.metric
    }

    pub fn metric_inverse(&self) -> &Matrix {
        &self.metric_inv
    }

    pub fn phi_matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn xi(&self) -> &FrameVectorField {
        &self.xi
    }

    /// Index of `xi` when it is one of the frame fields.
    pub fn xi_index(&self) -> Option<usize> {
        let mut support = self.xi.support();
        let i = support.next()?;
        (support.next().is_none() && self.xi_raw[i].is_one()).then_some(i)
    }

    pub fn basis(&self, i: usize) -> FrameVectorField {
        FrameVectorField::basis(self.dim, i)
    }

    /// `[e_i, e_j]`.
    pub fn bracket(&self, i: usize, j: usize) -> &FrameVectorField {
        &self.brackets[i][j]
    }

    pub fn is_constant(&self, a: &CoeffExpr) -> bool {
        a.is_constant_in(&self.coords)
    }

    /// `e_i(a)`.
    pub fn frame_derivative(&self, i: usize, a: &CoeffExpr) -> Result<CoeffExpr, Error> {
        match &self.frame {
            FrameSpec::Diagonal(axes) => {
                let axis = &axes[i];
                Ok(&axis.scale * &a.partial(&self.coords[axis.coord]))
            }
            FrameSpec::Structure(_) => {
                if self.is_constant(a) {
                    Ok(CoeffExpr::zero())
                } else {
                    Err(Error::StructureOnlyFrame)
                }
            }
        }
    }

    /// `X(a)` for a frame vector field `X`.
    pub fn directional_derivative(
        &self,
        x: &FrameVectorField,
        a: &CoeffExpr,
    ) -> Result<CoeffExpr, Error> {
        if self.is_constant(a) {
            return Ok(CoeffExpr::zero());
        }
        let mut acc = CoeffExpr::zero();
        for i in x.support() {
            acc += &x[i] * &self.frame_derivative(i, a)?;
        }
        Ok(acc)
    }

    /// Lie bracket `[X, Y]` in frame components.
    pub fn lie_bracket(
        &self,
        x: &FrameVectorField,
        y: &FrameVectorField,
    ) -> Result<FrameVectorField, Error> {
        match &self.frame {
            FrameSpec::Diagonal(_) => self.coordinate_bracket(x, y),
            FrameSpec::Structure(_) => self.structure_bracket(x, y),
        }
    }

    fn coordinate_bracket(
        &self,
        x: &FrameVectorField,
        y: &FrameVectorField,
    ) -> Result<FrameVectorField, Error> {
        let xc = self.to_coordinate_components(x)?;
        let yc = self.to_coordinate_components(y)?;
        let mut z = Vec::with_capacity(self.dim);
        for c in 0..self.dim {
            let mut acc = CoeffExpr::zero();
            for (d, name) in self.coords.iter().enumerate() {
                acc += &xc.components[d] * &yc.components[c].partial(name);
                acc -= &(&yc.components[d] * &xc.components[c].partial(name));
            }
            z.push(acc);
        }
        self.to_frame_components(&CoordinateVectorField::new(z))
    }

    /// `[X, Y] = X(Y^j) e_j - Y(X^j) e_j + X^i Y^j [e_i, e_j]`.
    pub fn structure_bracket(
        &self,
        x: &FrameVectorField,
        y: &FrameVectorField,
    ) -> Result<FrameVectorField, Error> {
        let mut out = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            out.push(
                self.directional_derivative(x, &y[j])?
                    - self.directional_derivative(y, &x[j])?,
            );
        }
        let mut out = FrameVectorField::new(out);
        for i in x.support() {
            for j in y.support() {
                let b = &self.brackets[i][j];
                if !b.is_zero() {
                    out = &out + &b.scale(&(&x[i] * &y[j]));
                }
            }
        }
        Ok(out)
    }

    /// Re-expresses a coordinate-basis field in the frame.
    pub fn to_frame_components(
        &self,
        w: &CoordinateVectorField,
    ) -> Result<FrameVectorField, Error> {
        let FrameSpec::Diagonal(axes) = &self.frame else {
            return Err(Error::StructureOnlyFrame);
        };
        if w.dim() != self.dim {
            return Err(Error::ArityMismatch {
                what: "coordinate components",
                expected: self.dim,
                found: w.dim(),
            });
        }
        let mut out = Vec::with_capacity(self.dim);
        for axis in axes {
            let c = &w.components[axis.coord];
            out.push(if c.is_zero() {
                CoeffExpr::zero()
            } else {
                c * &axis.scale.invert_unit()?
            });
        }
        Ok(FrameVectorField::new(out))
    }

    pub fn to_coordinate_components(
        &self,
        x: &FrameVectorField,
    ) -> Result<CoordinateVectorField, Error> {
        let FrameSpec::Diagonal(axes) = &self.frame else {
            return Err(Error::StructureOnlyFrame);
        };
        let mut out = alloc::vec![CoeffExpr::zero(); self.dim];
        for (i, axis) in axes.iter().enumerate() {
            out[axis.coord] = &x[i] * &axis.scale;
        }
        Ok(CoordinateVectorField::new(out))
    }

    /// `phi(X)`.
    pub fn phi(&self, x: &FrameVectorField) -> FrameVectorField {
        let mut out = FrameVectorField::zero(self.dim);
        for i in x.support() {
            for (k, c) in self.phi[i].iter().enumerate() {
                if !c.is_zero() {
                    out.components[k] += x[i].scale(c);
                }
            }
        }
        out
    }

    /// `g(X, Y)`.
    pub fn pairing(&self, x: &FrameVectorField, y: &FrameVectorField) -> CoeffExpr {
        let mut acc = CoeffExpr::zero();
        for i in x.support() {
            for j in y.support() {
                let g = &self.metric[i][j];
                if !g.is_zero() {
                    acc += (&x[i] * &y[j]).scale(g);
                }
            }
        }
        acc
    }

    /// `eta(X) = g(X, xi)`.
    pub fn eta(&self, x: &FrameVectorField) -> CoeffExpr {
        self.pairing(x, &self.xi)
    }

    /// Raises a covector given by its values on the frame: returns the
    /// vector `W` with `g(W, e_i) = values[i]`.
    pub fn raise(&self, values: &[CoeffExpr]) -> FrameVectorField {
        let mut out = FrameVectorField::zero(self.dim);
        for k in 0..self.dim {
            for (l, v) in values.iter().enumerate() {
                let g = &self.metric_inv[k][l];
                if !g.is_zero() && !v.is_zero() {
                    out.components[k] += v.scale(g);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::int;
    use crate::fixtures::{kenmotsu5, kenmotsu5_spec};
    use alloc::string::ToString;
    use alloc::vec;

    fn e(s: &str) -> CoeffExpr {
        CoeffExpr::parse(s).unwrap()
    }

    #[test]
    fn builds_the_five_dimensional_example() {
        let m = kenmotsu5();
        assert_eq!(m.n(), 2);
        assert_eq!(m.xi_index(), Some(4));
    }

    #[test]
    fn rejects_even_dimension() {
        let mut spec = kenmotsu5_spec();
        spec.dim = 4;
        assert_eq!(build_manifold(spec), Err(Error::EvenDimension(4)));
    }

    #[test]
    fn rejects_non_unit_scale() {
        let mut spec = kenmotsu5_spec();
        if let FrameSpec::Diagonal(axes) = &mut spec.frame {
            axes[0].scale = e("x");
        }
        assert!(matches!(
            build_manifold(spec),
            Err(Error::NonUnitFrameScale { index: 0, .. })
        ));
    }

    #[test]
    fn rejects_bad_phi_and_xi() {
        let mut spec = kenmotsu5_spec();
        spec.phi.pop();
        assert!(matches!(build_manifold(spec), Err(Error::BadPhiShape(_))));

        let mut spec = kenmotsu5_spec();
        spec.xi[4] = int(2);
        assert!(matches!(build_manifold(spec.clone()), Err(Error::XiNotUnit(_))));
        assert!(build_manifold_relaxed(spec).is_ok());
    }

    #[test]
    fn rejects_bad_metric() {
        let mut spec = kenmotsu5_spec();
        let mut g = linalg::identity(5);
        g[0][0] = int(-1);
        spec.metric = Some(g);
        assert!(matches!(build_manifold(spec), Err(Error::BadMetric(_))));
    }

    #[test]
    fn frame_derivatives() {
        let m = kenmotsu5();
        let v = e("x*exp(v)");
        assert_eq!(m.frame_derivative(0, &v).unwrap(), CoeffExpr::one());
        assert_eq!(m.frame_derivative(4, &v).unwrap(), v);
        assert!(m.frame_derivative(1, &e("x")).unwrap().is_zero());
    }

    #[test]
    fn bracket_table_matches_example() {
        let m = kenmotsu5();
        for i in 0..5 {
            for j in 0..5 {
                let expected = match (i, j) {
                    (i, 4) if i < 4 => m.basis(i),
                    (4, j) if j < 4 => -&m.basis(j),
                    _ => FrameVectorField::zero(5),
                };
                assert_eq!(m.bracket(i, j), &expected, "[e{}, e{}]", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn frame_re_expression() {
        let m = kenmotsu5();
        let dx = CoordinateVectorField::new(vec![e("1"), e("0"), e("0"), e("0"), e("0")]);
        let f = m.to_frame_components(&dx).unwrap();
        assert_eq!(f.to_string(), "exp(v)*e1");
        let dv = CoordinateVectorField::new(vec![e("0"), e("0"), e("0"), e("0"), e("1")]);
        assert_eq!(m.to_frame_components(&dv).unwrap(), m.basis(4));
        let v = CoordinateVectorField::new(vec![e("x"), e("y"), e("z"), e("u"), e("1")]);
        let vf = m.to_frame_components(&v).unwrap();
        assert_eq!(
            vf,
            FrameVectorField::new(vec![
                e("x*exp(v)"),
                e("y*exp(v)"),
                e("z*exp(v)"),
                e("u*exp(v)"),
                e("1")
            ])
        );
        assert_eq!(m.to_coordinate_components(&vf).unwrap(), v);
    }

    #[test]
    fn contact_action() {
        let m = kenmotsu5();
        assert_eq!(m.phi(&m.basis(0)), m.basis(2));
        assert!(m.eta(&m.basis(4)).is_one());
        assert_eq!(m.phi(&m.phi(&m.basis(0))), -&m.basis(0));
    }

    #[test]
    fn structure_form_needs_constant_coefficients() {
        let m = kenmotsu5();
        let table: Vec<Vec<FrameVectorField>> = (0..5)
            .map(|i| (0..5).map(|j| m.bracket(i, j).clone()).collect())
            .collect();
        let mut spec = kenmotsu5_spec();
        spec.frame = FrameSpec::Structure(table);
        let s = build_manifold(spec).unwrap();
        assert_eq!(s.frame_derivative(0, &e("x")), Err(Error::StructureOnlyFrame));
        assert!(s.frame_derivative(0, &e("alpha")).unwrap().is_zero());
        let b = s.lie_bracket(&s.basis(0), &s.basis(4)).unwrap();
        assert_eq!(b, s.basis(0));
    }
}
