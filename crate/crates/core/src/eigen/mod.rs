//! Generalized eigenfunctions of `U`: the distorted Fourier construction
//! `F^(±)(θ)* φ`, the combinatorial long-time limit, and unique continuation.

mod combinatorial;
mod fourier;
mod ucp;
mod vector;

pub use combinatorial::{
    build_ud, combinatorial_eigenfunction, combinatorial_eigenfunction_with,
    observed_decay_rate, spectral_radius_bound, CombinatorialEigenfunction, GelfandBound, UdMatrix,
    CONTRACTION_MARGIN,
};
pub use fourier::{
    f0, f0_star, fpm, fpm_star, fpm_star_with, fpm_with, GeneralizedEigenfunction, PlaneWave,
    ScatteredWave,
};
pub use ucp::{local_system, ucp_defect, ucp_reconstruct, LocalSystem, UCP_DET_FLOOR};
pub use vector::BoundaryVector;

use crate::lattice::{phase, walk_at, CoinField, Field, Region, Site, Window};
use num_complex::Complex64;

/// `sup |(U u - e^{iθ} u)(x)|` over the sites of `window` whose neighbours are
/// all available: every site for closed-form fields, the interior for
/// window-truncated ones.
pub fn eigen_residual(c: &CoinField, u: &dyn Field, theta: f64, window: Window) -> f64 {
    let limit = match u.region() {
        Region::Window(w) => w.half_width().min(window.half_width()) - 1,
        _ => window.half_width(),
    };
    let e = phase(theta);
    let mut worst: f64 = 0.0;
    for x in window.sites().filter(|x| x.sup_norm() <= limit) {
        let uu = walk_at(c, u, x);
        let v = u.eval(x);
        for k in 0..4 {
            worst = worst.max((uu[k] - e * v[k]).norm());
        }
    }
    worst
}

/// Least-squares `κ` minimising `Σ |a(x) - κ b(x)|²` over `sites`.
pub fn matching_constant(a: &dyn Field, b: &dyn Field, sites: impl IntoIterator<Item = Site>) -> Complex64 {
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for x in sites {
        let (va, vb) = (a.eval(x), b.eval(x));
        for k in 0..4 {
            num += vb[k].conj() * va[k];
            den += vb[k].norm_sqr();
        }
    }
    if den == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        num / den
    }
}
