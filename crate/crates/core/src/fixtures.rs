//! Ready-made manifold descriptions used by tests and benchmarks.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::expr::{int, CoeffExpr, Rational};
use crate::manifold::{build_manifold, FrameAxis, FramedManifold, ManifoldSpec, FrameSpec};

/// `phi` pairing `e_i -> e_{i+n}`, `e_{i+n} -> -e_i`, `xi -> 0`.
pub fn standard_phi(n: usize) -> Vec<Vec<Rational>> {
    let dim = 2 * n + 1;
    let mut phi = alloc::vec![alloc::vec![Rational::zero(); dim]; dim];
    for i in 0..n {
        phi[i][i + n] = Rational::one();
        phi[i + n][i] = int(-1);
    }
    phi
}

fn spec_with(coords: Vec<String>, scale: &str) -> ManifoldSpec {
    let dim = coords.len();
    let n = (dim - 1) / 2;
    let t = coords[dim - 1].clone();
    let axes = (0..dim)
        .map(|i| FrameAxis {
            coord: i,
            scale: if i + 1 == dim || scale.is_empty() {
                CoeffExpr::one()
            } else {
                CoeffExpr::parse(&scale.replace('#', &t)).expect("fixture scale")
            },
        })
        .collect();
    ManifoldSpec {
        dim,
        coords,
        frame_names: (1..=dim).map(|i| format!("e{i}")).collect(),
        frame: FrameSpec::Diagonal(axes),
        metric: None,
        xi: ManifoldSpec::xi_basis(dim, dim - 1),
        phi: standard_phi(n),
    }
}

/// The five-dimensional example: `e_i = exp(-v) d/dx_i` for
/// `x_i in {x, y, z, u}`, `e_5 = d/dv`, `xi = e_5`.
pub fn kenmotsu5_spec() -> ManifoldSpec {
    let coords = ["x", "y", "z", "u", "v"].map(ToString::to_string).to_vec();
    spec_with(coords, "exp(-#)")
}

pub fn kenmotsu5() -> FramedManifold {
    build_manifold(kenmotsu5_spec()).expect("example manifold is valid")
}

/// The same warped frame in dimension `2n + 1`, coordinates `x1..x2n, t`.
pub fn kenmotsu_spec(n: usize) -> ManifoldSpec {
    let mut coords: Vec<String> = (1..=2 * n).map(|i| format!("x{i}")).collect();
    coords.push("t".into());
    spec_with(coords, "exp(-#)")
}

/// Flat coordinate frame with the same `phi` and `xi`; almost contact but
/// not Kenmotsu.
pub fn abelian5_spec() -> ManifoldSpec {
    let coords = ["x", "y", "z", "u", "v"].map(ToString::to_string).to_vec();
    spec_with(coords, "")
}
