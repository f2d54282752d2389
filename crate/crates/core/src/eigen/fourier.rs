//! The Fourier operators `F^(0)(θ)`, `F^(±)(θ)` onto `h(θ)` and their adjoints,
//! whose ranges are the generalized eigenfunctions of `U0` and `U`.

use super::BoundaryVector;
use crate::error::Result;
use crate::green::{assemble_boundary_system, BoundarySystem, ResolventField, Side};
use crate::lattice::{phase, v_adjoint_at, Amp4, Chirality, CoinField, Field, Site, SparseField, ZERO4};
use num_complex::Complex64;
use std::f64::consts::TAU;

pub(crate) fn inv_sqrt_2pi() -> f64 {
    1.0 / TAU.sqrt()
}

/// `F^(0)(θ) f`: per channel, `(2π)^{-1/2} Σ_t e^{-i s θ t} f_p` along each line,
/// with `s = +1` for Left/Down and `-1` for Right/Up.
pub fn f0(f: &SparseField, theta: f64) -> BoundaryVector {
    let mut out = BoundaryVector::zeros(theta);
    let c = inv_sqrt_2pi();
    for (x, v) in f.iter() {
        for p in Chirality::ALL {
            let z = v[p.index()];
            if z != Complex64::new(0.0, 0.0) {
                let t = x.longitudinal(p);
                out.add(p, x.transverse(p), c * phase(-(p.sign() * t) as f64 * theta) * z);
            }
        }
    }
    out
}

/// `F^(0)(θ)* φ`, a superposition of plane waves solving `(U0 - e^{iθ}) u = 0`.
#[derive(Clone, Debug)]
pub struct PlaneWave {
    phi: BoundaryVector,
}

impl PlaneWave {
    pub fn data(&self) -> &BoundaryVector {
        &self.phi
    }

    pub fn theta(&self) -> f64 {
        self.phi.theta()
    }
}

impl Field for PlaneWave {
    fn eval(&self, x: Site) -> Amp4 {
        let mut out = ZERO4;
        let c = inv_sqrt_2pi();
        let th = self.phi.theta();
        for p in Chirality::ALL {
            let a = self.phi.get(p, x.transverse(p));
            if a != Complex64::new(0.0, 0.0) {
                out[p.index()] = c * phase((p.sign() * x.longitudinal(p)) as f64 * th) * a;
            }
        }
        out
    }
}

pub fn f0_star(phi: &BoundaryVector) -> PlaneWave {
    PlaneWave { phi: phi.clone() }
}

/// `F^(±)(θ) f = F^(0)(θ)(f - V R(θ±i0) f)`, with the side taken from `system`.
pub fn fpm_with(system: &BoundarySystem, f: &SparseField) -> Result<BoundaryVector> {
    let g = system.v_resolvent(f)?;
    Ok(f0(&f.sub(&g), system.theta()))
}

pub fn fpm(f: &SparseField, theta: f64, side: Side, c: &CoinField) -> Result<BoundaryVector> {
    fpm_with(&assemble_boundary_system(c, theta, side)?, f)
}

/// `u - F^(0)(θ)* φ = e^{iθ} U R(θ∓i0) h` with `h = V* F^(0)(θ)* φ`,
/// evaluated as `e^{iθ}(h + e^{iθ} R h)`.
#[derive(Clone, Debug)]
pub struct ScatteredWave {
    theta: f64,
    source: SparseField,
    resolvent: ResolventField,
}

impl ScatteredWave {
    /// `h = V* F^(0)(θ)* φ`, supported in the coin box.
    pub fn source(&self) -> &SparseField {
        &self.source
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl Field for ScatteredWave {
    fn eval(&self, x: Site) -> Amp4 {
        let e = phase(self.theta);
        let r = self.resolvent.eval(x);
        let h = self.source.get(x);
        std::array::from_fn(|k| e * (h[k] + e * r[k]))
    }
}

/// `u^(±) = F^(±)(θ)* φ`.
#[derive(Clone, Debug)]
pub struct GeneralizedEigenfunction {
    side: Side,
    plane: PlaneWave,
    scattered: ScatteredWave,
}

impl GeneralizedEigenfunction {
    pub fn side(&self) -> Side {
        self.side
    }

    pub fn theta(&self) -> f64 {
        self.plane.theta()
    }

    pub fn plane(&self) -> &PlaneWave {
        &self.plane
    }

    pub fn scattered(&self) -> &ScatteredWave {
        &self.scattered
    }
}

impl Field for GeneralizedEigenfunction {
    fn eval(&self, x: Site) -> Amp4 {
        let a = self.plane.eval(x);
        let b = self.scattered.eval(x);
        std::array::from_fn(|k| a[k] + b[k])
    }
}

/// `F^(±)(θ)* φ` using a system assembled on the opposite side, `θ ∓ i0`.
pub fn fpm_star_with(
    system: &BoundarySystem,
    phi: &BoundaryVector,
) -> Result<GeneralizedEigenfunction> {
    let plane = f0_star(phi);
    let c = system.coin();
    let source: SparseField = c
        .sites()
        .map(|x| (x, v_adjoint_at(c, &plane, x)))
        .filter(|(_, v)| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        .collect();
    let resolvent = system.apply(&source)?;
    Ok(GeneralizedEigenfunction {
        side: system.side().opposite(),
        plane,
        scattered: ScatteredWave {
            theta: phi.theta(),
            source,
            resolvent,
        },
    })
}

pub fn fpm_star(phi: &BoundaryVector, side: Side, c: &CoinField) -> Result<GeneralizedEigenfunction> {
    let system = assemble_boundary_system(c, phi.theta(), side.opposite())?;
    fpm_star_with(&system, phi)
}
