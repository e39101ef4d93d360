//! Frame-component tables for (0,2) tensors, (1,1) tensors and 1-forms.

use alloc::vec::Vec;
use core::ops::{Add, Sub};

use crate::expr::{CoeffExpr, Rational};
use crate::manifold::{FrameVectorField, FramedManifold};

/// A (0,2) tensor by its values `T(e_i, e_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor02 {
    entries: Vec<Vec<CoeffExpr>>,
}

impl Tensor02 {
    pub fn new(entries: Vec<Vec<CoeffExpr>>) -> Self {
        Tensor02 { entries }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| CoeffExpr::zero())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> CoeffExpr) -> Self {
        Tensor02 {
            entries: (0..dim)
                .map(|i| (0..dim).map(|j| f(i, j)).collect())
                .collect(),
        }
    }

    pub fn try_from_fn<E>(
        dim: usize,
        mut f: impl FnMut(usize, usize) -> Result<CoeffExpr, E>,
    ) -> Result<Self, E> {
        let mut entries = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut row = Vec::with_capacity(dim);
            for j in 0..dim {
                row.push(f(i, j)?);
            }
            entries.push(row);
        }
        Ok(Tensor02 { entries })
    }

    /// The metric `g`.
    pub fn metric(m: &FramedManifold) -> Self {
        Self::from_fn(m.dim(), |i, j| CoeffExpr::constant(m.metric()[i][j].clone()))
    }

    /// `eta (x) eta`.
    pub fn eta_eta(m: &FramedManifold) -> Self {
        let eta: Vec<CoeffExpr> = (0..m.dim()).map(|i| m.eta(&m.basis(i))).collect();
        Self::from_fn(m.dim(), |i, j| &eta[i] * &eta[j])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &CoeffExpr {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<CoeffExpr>] {
        &self.entries
    }

    /// `T(X, Y)` for arbitrary frame fields.
    pub fn eval(&self, x: &FrameVectorField, y: &FrameVectorField) -> CoeffExpr {
        let mut acc = CoeffExpr::zero();
        for i in x.support() {
            for j in y.support() {
                let t = &self.entries[i][j];
                if !t.is_zero() {
                    acc += &(&x[i] * &y[j]) * t;
                }
            }
        }
        acc
    }

    /// Metric trace `g^{ij} T_ij`.
    pub fn trace(&self, m: &FramedManifold) -> CoeffExpr {
        let ginv = m.metric_inverse();
        let mut acc = CoeffExpr::zero();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                acc += t.scale(&ginv[i][j]);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(CoeffExpr::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn scale(&self, f: &CoeffExpr) -> Self {
        Self::from_fn(self.dim(), |i, j| &self.entries[i][j] * f)
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        Self::from_fn(self.dim(), |i, j| self.entries[i][j].scale(c))
    }

    /// Nonzero entries in row-major order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &CoeffExpr)> {
        self.entries.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, t)| !t.is_zero())
                .map(move |(j, t)| (i, j, t))
        })
    }
}

impl Add for &Tensor02 {
    type Output = Tensor02;

    fn add(self, rhs: &Tensor02) -> Tensor02 {
        Tensor02::from_fn(self.dim(), |i, j| &self.entries[i][j] + &rhs.entries[i][j])
    }
}

impl Sub for &Tensor02 {
    type Output = Tensor02;

    fn sub(self, rhs: &Tensor02) -> Tensor02 {
        Tensor02::from_fn(self.dim(), |i, j| &self.entries[i][j] - &rhs.entries[i][j])
    }
}

/// A (1,1) tensor by the images of the frame fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endomorphism {
    columns: Vec<FrameVectorField>,
}

impl Endomorphism {
    /// `columns[i] = A(e_i)`.
    pub fn new(columns: Vec<FrameVectorField>) -> Self {
        Endomorphism { columns }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new((0..dim).map(|i| FrameVectorField::basis(dim, i)).collect())
    }

    /// The structure tensor `phi`.
    pub fn phi(m: &FramedManifold) -> Self {
        Self::new((0..m.dim()).map(|i| m.phi(&m.basis(i))).collect())
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, i: usize) -> &FrameVectorField {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[FrameVectorField] {
        &self.columns
    }

    pub fn apply(&self, x: &FrameVectorField) -> FrameVectorField {
        let mut out = FrameVectorField::zero(self.dim());
        for i in x.support() {
            out = &out + &self.columns[i].scale(&x[i]);
        }
        out
    }

    /// Trace `sum_i (A e_i)^i`.
    pub fn trace(&self) -> CoeffExpr {
        self.columns
            .iter()
            .enumerate()
            .map(|(i, c)| c[i].clone())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(FrameVectorField::is_zero)
    }
}

/// A 1-form by its values `w(e_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    values: Vec<CoeffExpr>,
}

impl OneForm {
    pub fn new(values: Vec<CoeffExpr>) -> Self {
        OneForm { values }
    }

    /// `eta = g(., xi)`.
    pub fn eta(m: &FramedManifold) -> Self {
        Self::new((0..m.dim()).map(|i| m.eta(&m.basis(i))).collect())
    }

    pub fn values(&self) -> &[CoeffExpr] {
        &self.values
    }

    pub fn apply(&self, x: &FrameVectorField) -> CoeffExpr {
        x.support().map(|i| &x[i] * &self.values[i]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(CoeffExpr::is_zero)
    }
}
