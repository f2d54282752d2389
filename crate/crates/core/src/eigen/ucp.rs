//! Unique continuation: `(U - e^{iθ}) ψ = 0` determines `ψ(x)` from
//! `ψ(x + e1)` and `ψ(x + e2)`.
//!
//! The Left and Down rows of the eigen-equation at `x` read `ψ_L(x)`,
//! `ψ_D(x)` directly off the neighbours; the Right and Up rows at `x + e1`,
//! `x + e2` involve rows of `C(x)` applied to `ψ(x)`. Stacking them gives
//! `M ψ(x) = A1 ψ(x + e1) + A2 ψ(x + e2)`.

use crate::error::{Error, Result};
use crate::lattice::{phase, Amp4, CoinField, Field, Site};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

/// Floor on `|det M|`; matches the validator's minor floor.
pub const UCP_DET_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSystem {
    pub m: Matrix4<Complex64>,
    pub a1: Matrix4<Complex64>,
    pub a2: Matrix4<Complex64>,
}

pub fn local_system(c: &CoinField, theta: f64, x: Site) -> LocalSystem {
    let e = phase(theta);
    let cx = c.at(x);
    let c1 = c.at(x + Site::unit(0));
    let c2 = c.at(x + Site::unit(1));
    let zero = Complex64::new(0.0, 0.0);
    let mut m = Matrix4::from_element(zero);
    let mut a1 = Matrix4::from_element(zero);
    let mut a2 = Matrix4::from_element(zero);
    // Left row at x, Right row at x + e1
    m[(0, 0)] = e;
    a1.set_row(0, &c1.row(0));
    m.set_row(1, &cx.row(1));
    a1[(1, 1)] = e;
    // Down row at x, Up row at x + e2
    m[(2, 2)] = e;
    a2.set_row(2, &c2.row(2));
    m.set_row(3, &cx.row(3));
    a2[(3, 3)] = e;
    LocalSystem { m, a1, a2 }
}

pub fn ucp_reconstruct(
    c: &CoinField,
    theta: f64,
    x: Site,
    forward1: Amp4,
    forward2: Amp4,
) -> Result<Amp4> {
    let s = local_system(c, theta, x);
    let det = s.m.determinant().norm();
    if !(det >= UCP_DET_FLOOR) {
        return Err(Error::SingularLocalSystem { site: x, det });
    }
    let rhs = s.a1 * Vector4::from_column_slice(&forward1) + s.a2 * Vector4::from_column_slice(&forward2);
    let sol = s
        .m
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularLocalSystem { site: x, det })?;
    Ok([sol[0], sol[1], sol[2], sol[3]])
}

/// Largest componentwise gap between `u(x)` and its reconstruction over `sites`.
pub fn ucp_defect(
    c: &CoinField,
    u: &dyn Field,
    theta: f64,
    sites: impl IntoIterator<Item = Site>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in sites {
        let r = ucp_reconstruct(c, theta, x, u.eval(x + Site::unit(0)), u.eval(x + Site::unit(1)))?;
        let v = u.eval(x);
        for k in 0..4 {
            worst = worst.max((r[k] - v[k]).norm());
        }
    }
    Ok(worst)
}
