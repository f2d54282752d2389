//! Truncated anisotropic Agmon–Hörmander norms.
//!
//! Left/Right amplitudes are binned by `|x1|`, Down/Up amplitudes by `|x2|`.
//! Dyadic shells are `I_0 = {0}` and `I_j = {2^(j-1) <= |y| < 2^j}` for `j >= 1`.

use super::{Chirality, GridField};

/// `||f||_{l^{2,1/2}} <= L2S_HALF_OVER_B * ||f||_B`.
///
/// On `I_j`, `(1 + y²)^{1/2} <= sqrt(2) r_j`, hence `b_{j,1/2} <= 2^{1/4} r_j^{1/2} a_j`.
pub const L2S_HALF_OVER_B: f64 = 1.189_207_115_002_721;

/// `M_B*(u) <= BSTAR_OVER_L2S_MINUS_HALF * ||u||_{l^{2,-1/2}}`, since
/// `1/ρ <= (1 + y²)^{-1/2}` whenever `|y| < ρ`.
pub const BSTAR_OVER_L2S_MINUS_HALF: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    /// `(s, ||f||_{l^{2,s}})` for each requested weight.
    pub l2s: Vec<(f64, f64)>,
    /// `Σ_j r_j^{1/2} a_j`.
    pub b_norm: f64,
    /// `M_B*` with the supremum over `ρ ∈ {1, ..., L}`.
    pub b_star_norm: f64,
    /// `sup_j r_j^{-1/2} a_j`.
    pub b_star_dual: f64,
    /// `a_j` for `j = 0..=depth`, where shell `depth` contains `L`.
    pub shells: Vec<f64>,
}

impl NormReport {
    pub fn shell(&self, j: usize) -> f64 {
        self.shells.get(j).copied().unwrap_or(0.0)
    }

    pub fn l2s(&self, s: f64) -> Option<f64> {
        self.l2s.iter().find(|(t, _)| *t == s).map(|(_, v)| *v)
    }
}

pub(crate) fn shell_index(y: i64) -> usize {
    let a = y.unsigned_abs();
    if a == 0 {
        0
    } else {
        (64 - a.leading_zeros()) as usize
    }
}

fn radius(j: usize) -> f64 {
    (1u64 << j) as f64
}

pub fn norms(f: &GridField, s_list: &[f64]) -> NormReport {
    let l = f.window().half_width();
    let depth = shell_index(l);
    let mut shell_sq = vec![0.0; depth + 1];
    // mass[k] = anisotropic mass at binning coordinate |y| = k
    let mut mass = vec![0.0; l as usize + 1];
    let mut weighted = vec![0.0; s_list.len()];
    let mut l2 = 0.0;
    for (x, v) in f.iter() {
        for p in Chirality::ALL {
            let m = v[p.index()].norm_sqr();
            if m == 0.0 {
                continue;
            }
            let y = x.longitudinal(p);
            l2 += m;
            shell_sq[shell_index(y)] += m;
            mass[y.unsigned_abs() as usize] += m;
            for (w, s) in weighted.iter_mut().zip(s_list) {
                *w += (1.0 + (y * y) as f64).powf(*s) * m;
            }
        }
    }
    let shells: Vec<f64> = shell_sq.iter().map(|m| m.sqrt()).collect();
    let b_norm = shells
        .iter()
        .enumerate()
        .map(|(j, a)| radius(j).sqrt() * a)
        .sum();
    let b_star_dual = shells
        .iter()
        .enumerate()
        .map(|(j, a)| a / radius(j).sqrt())
        .fold(0.0, f64::max);
    let mut b_star_sq: f64 = 0.0;
    let mut partial = 0.0;
    for rho in 1..=l {
        // |y| < rho adds the mass at |y| = rho - 1
        partial += mass[(rho - 1) as usize];
        b_star_sq = b_star_sq.max(partial / rho as f64);
    }
    NormReport {
        l2: l2.sqrt(),
        l2s: s_list
            .iter()
            .zip(weighted)
            .map(|(s, w)| (*s, w.sqrt()))
            .collect(),
        b_norm,
        b_star_norm: b_star_sq.sqrt(),
        b_star_dual,
        shells,
    }
}
