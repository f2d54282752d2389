//! The scattering matrix `Σ̂(θ) = 1 - 2π e^{iθ} A(θ)` on a finite block of
//! `h(θ)`, where `A(θ) = F^(-)(θ) V* F^(0)(θ)*`.

use crate::eigen::{f0_star, fpm_star_with, fpm_with, BoundaryVector, ScatteredWave};
use crate::error::Result;
use crate::green::{assemble_boundary_system, BoundarySystem, CMatrix, Side};
use crate::lattice::{phase, v_adjoint_at, Amp4, Chirality, CoinField, Field, Site, SparseField};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Frobenius-defect tolerance for unitarity of the block.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Modulus tolerance for the entries that must vanish outside the corridors.
pub const CORRIDOR_TOL: f64 = 1e-12;

/// `A(θ)` and `Σ̂(θ)` on transverse indices `-m..=m` of every channel.
///
/// Rows and columns are indexed by `(chirality, k)` at position
/// `chirality.index() * (2m + 1) + (k + m)`.
#[derive(Clone, Debug)]
pub struct SMatrixBlock {
    pub theta: f64,
    pub m: i64,
    /// Declared half-width of the perturbation box.
    pub n0: i64,
    pub a: CMatrix,
    pub sigma: CMatrix,
    /// Largest `|A|` entry that fell outside the block rows; zero when the
    /// block captures the whole image.
    pub leakage: f64,
}

impl SMatrixBlock {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn index(&self, p: Chirality, k: i64) -> Option<usize> {
        BoundaryVector::block_index(self.m, p, k)
    }

    pub fn label(&self, i: usize) -> (Chirality, i64) {
        let w = (2 * self.m + 1) as usize;
        (Chirality::from_index(i / w).unwrap(), (i % w) as i64 - self.m)
    }

    /// `Σ̂(θ) φ` for `φ` supported in the block.
    pub fn apply_sigma(&self, phi: &BoundaryVector) -> BoundaryVector {
        let v = CMatrix::from_column_slice(self.dim(), 1, &phi.to_block(self.m));
        let out = &self.sigma * v;
        BoundaryVector::from_block(self.theta, self.m, out.as_slice())
    }
}

fn v_adjoint_source(c: &CoinField, u: &dyn Field) -> SparseField {
    c.sites()
        .map(|x| (x, v_adjoint_at(c, u, x)))
        .filter(|(_, v)| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        .collect()
}

/// `A(θ) φ = F^(-)(θ) V* F^(0)(θ)* φ` with a system assembled at `θ - i0`.
pub fn apply_a_with(minus: &BoundarySystem, phi: &BoundaryVector) -> Result<BoundaryVector> {
    debug_assert_eq!(minus.side(), Side::Minus);
    let h = v_adjoint_source(minus.coin(), &f0_star(phi));
    fpm_with(minus, &h)
}

pub fn compute_a(c: &CoinField, theta: f64, m: i64) -> Result<SMatrixBlock> {
    let minus = assemble_boundary_system(c, theta, Side::Minus)?;
    compute_a_with(&minus, m)
}

pub fn compute_a_with(minus: &BoundarySystem, m: i64) -> Result<SMatrixBlock> {
    assert!(m >= 0, "transverse range must be nonnegative");
    let theta = minus.theta();
    let dim = 4 * (2 * m + 1) as usize;
    let mut a = CMatrix::zeros(dim, dim);
    let mut leakage: f64 = 0.0;
    for p in Chirality::ALL {
        for y in -m..=m {
            let j = BoundaryVector::block_index(m, p, y).unwrap();
            let phi = BoundaryVector::single(theta, p, y, Complex64::new(1.0, 0.0));
            let col = apply_a_with(minus, &phi)?;
            leakage = leakage.max(col.max_outside(m));
            for (i, z) in col.to_block(m).into_iter().enumerate() {
                a[(i, j)] = z;
            }
        }
    }
    let sigma = CMatrix::identity(dim, dim) - &a * (phase(theta) * TAU);
    Ok(SMatrixBlock {
        theta,
        m,
        n0: minus.coin().n0() as i64,
        a,
        sigma,
        leakage,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitarityReport {
    /// `||Σ̂ Σ̂* - I||_F`
    pub left_defect: f64,
    /// `||Σ̂* Σ̂ - I||_F`
    pub right_defect: f64,
    pub passed: bool,
}

impl UnitarityReport {
    pub fn defect(&self) -> f64 {
        self.left_defect.max(self.right_defect)
    }
}

pub fn check_unitarity(b: &SMatrixBlock) -> UnitarityReport {
    check_unitarity_tol(b, UNITARITY_TOL)
}

pub fn check_unitarity_tol(b: &SMatrixBlock, tol: f64) -> UnitarityReport {
    let id = CMatrix::identity(b.dim(), b.dim());
    let left_defect = (&b.sigma * b.sigma.adjoint() - &id).norm();
    let right_defect = (b.sigma.adjoint() * &b.sigma - id).norm();
    UnitarityReport {
        left_defect,
        right_defect,
        passed: left_defect <= tol && right_defect <= tol,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorridorReport {
    /// Largest `|A|` over entries with either transverse index `|k| >= n0 + 1`.
    pub max_band: f64,
    /// Number of entries in the band.
    pub band_size: usize,
    pub passed: bool,
}

pub fn check_corridor(b: &SMatrixBlock) -> CorridorReport {
    let mut max_band: f64 = 0.0;
    let mut band_size = 0;
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            let (_, ki) = b.label(i);
            let (_, kj) = b.label(j);
            if ki.abs() > b.n0 || kj.abs() > b.n0 {
                band_size += 1;
                max_band = max_band.max(b.a[(i, j)].norm());
            }
        }
    }
    CorridorReport {
        max_band,
        band_size,
        passed: max_band <= CORRIDOR_TOL && b.leakage <= CORRIDOR_TOL,
    }
}

/// `v^(+) = F^(+)(θ)* φ - F^(0)(θ)* φ` with its asymptotic closed forms.
///
/// On the outgoing corridor of channel `p` (longitudinal coordinate `t` with
/// `s t <= -(n + 1)`, `s = +1` for Left/Down and `-1` for Right/Up) the wave
/// equals `-sqrt(2π) e^{iθ} e^{iθ s t} (A_p(θ) φ)(k)` exactly.
#[derive(Clone, Debug)]
pub struct ScatteredField {
    wave: ScatteredWave,
    a_phi: BoundaryVector,
    extent: i64,
}

pub fn scattered_wave(c: &CoinField, phi: &BoundaryVector) -> Result<ScatteredField> {
    let minus = assemble_boundary_system(c, phi.theta(), Side::Minus)?;
    scattered_wave_with(&minus, phi)
}

/// As [`scattered_wave`] with a system assembled at `θ - i0`.
pub fn scattered_wave_with(minus: &BoundarySystem, phi: &BoundaryVector) -> Result<ScatteredField> {
    let u = fpm_star_with(minus, phi)?;
    Ok(ScatteredField {
        wave: u.scattered().clone(),
        a_phi: apply_a_with(minus, phi)?,
        extent: minus.coin().extent() as i64,
    })
}

impl ScatteredField {
    /// `A(θ) φ`.
    pub fn a_phi(&self) -> &BoundaryVector {
        &self.a_phi
    }

    pub fn in_outgoing_corridor(&self, x: Site, p: Chirality) -> bool {
        p.sign() * x.longitudinal(p) <= -(self.extent + 1)
    }

    /// Closed form of component `p` at `x`, when `x` lies in that channel's outgoing corridor.
    pub fn closed_form(&self, x: Site, p: Chirality) -> Option<Complex64> {
        if !self.in_outgoing_corridor(x, p) {
            return None;
        }
        let th = self.wave.theta();
        let t = x.longitudinal(p);
        Some(-TAU.sqrt() * phase(th) * phase(th * (p.sign() * t) as f64) * self.a_phi.get(p, x.transverse(p)))
    }
}

impl Field for ScatteredField {
    fn eval(&self, x: Site) -> Amp4 {
        self.wave.eval(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelRole {
    Transmitted,
    Reflected,
    Deflected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelAmplitude {
    /// Outgoing channel; amplitude in channel `q` leaves along `q`'s direction of travel.
    pub chirality: Chirality,
    pub transverse: i64,
    pub role: ChannelRole,
    pub amplitude: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelTable {
    pub theta: f64,
    pub incident_row: i64,
    pub incident: Chirality,
    pub amplitudes: Vec<ChannelAmplitude>,
    /// `Σ |amplitude|²`; one for a unitary scattering matrix.
    pub flux: f64,
}

impl ChannelTable {
    pub fn flux_defect(&self) -> f64 {
        (self.flux - 1.0).abs()
    }

    pub fn get(&self, q: Chirality, k: i64) -> Complex64 {
        self.amplitudes
            .iter()
            .find(|a| a.chirality == q && a.transverse == k)
            .map(|a| a.amplitude)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

/// Column of `Σ̂(θ)` for the single-mode incidence `δ_b e_p`.
///
/// Far along channel `q`'s outgoing corridor the full eigenfunction
/// `F^(+)(θ)* φ` reads `(2π)^{-1/2} e^{iθ s t} (Σ̂(θ) φ)_q(k)`, so the
/// amplitudes are reported relative to the incident plane wave: the identity
/// coin gives exactly 1 in the incident channel.
pub fn channel_amplitudes(c: &CoinField, theta: f64, row: i64, p: Chirality) -> Result<ChannelTable> {
    let minus = assemble_boundary_system(c, theta, Side::Minus)?;
    let phi = BoundaryVector::single(theta, p, row, Complex64::new(1.0, 0.0));
    let a_phi = apply_a_with(&minus, &phi)?;
    let out = phi.sub(&a_phi.scaled(phase(theta) * TAU));
    let n = c.extent() as i64;
    let mut amplitudes = Vec::new();
    for q in Chirality::ALL {
        for k in -n.max(row.abs())..=n.max(row.abs()) {
            let role = if q == p {
                ChannelRole::Transmitted
            } else if q == p.reversed() {
                ChannelRole::Reflected
            } else {
                ChannelRole::Deflected
            };
            amplitudes.push(ChannelAmplitude {
                chirality: q,
                transverse: k,
                role,
                amplitude: out.get(q, k),
            });
        }
    }
    let flux = out.iter().map(|(_, _, v)| v.norm_sqr()).sum();
    Ok(ChannelTable {
        theta,
        incident_row: row,
        incident: p,
        amplitudes,
        flux,
    })
}
