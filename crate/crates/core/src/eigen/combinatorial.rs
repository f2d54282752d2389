//! Generalized eigenfunctions as the long-time limit of a plane wave fed into
//! the perturbation box, computed through the compression `U_D = χ U χ*`.

use crate::error::{Error, Result};
use crate::green::{CMatrix, DenseLu};
use crate::lattice::{phase, walk_at, Amp4, Chirality, CoinField, Field, Site, SparseField, Window, ZERO4};
use num_complex::Complex64;
use std::collections::HashMap;

/// Threshold below which a power-norm bound counts as a strict contraction.
pub const CONTRACTION_MARGIN: f64 = 1e-6;

/// Dense `U_D` on the coin box, basis ordered by `(x1, x2, chirality)`.
#[derive(Clone, Debug)]
pub struct UdMatrix {
    half_width: usize,
    matrix: CMatrix,
}

impl UdMatrix {
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn window(&self) -> Window {
        Window::new(self.half_width)
    }

    pub fn index(&self, x: Site, p: Chirality) -> Option<usize> {
        self.window().index(x).map(|i| 4 * i + p.index())
    }

    pub fn site(&self, i: usize) -> (Site, Chirality) {
        (self.window().site(i / 4), Chirality::from_index(i % 4).unwrap())
    }

    fn to_sparse(&self, v: &CMatrix) -> SparseField {
        let mut out = SparseField::new();
        for i in 0..self.dim() {
            let (x, p) = self.site(i);
            let mut a = ZERO4;
            a[p.index()] = v[(i, 0)];
            out.add_at(x, a);
        }
        out
    }
}

/// `U_D = χ U χ*`: column `(y, q)` holds `U δ_y e_q` restricted to the box.
pub fn build_ud(c: &CoinField) -> UdMatrix {
    let n = c.extent();
    let w = Window::new(n);
    let dim = 4 * w.num_sites();
    let mut matrix = CMatrix::zeros(dim, dim);
    for (iy, y) in w.sites().enumerate() {
        let cy = c.at(y);
        for q in Chirality::ALL {
            for p in Chirality::ALL {
                // (U f)_p(x) = (C f)_p(x + source_offset(p)), so the mass at y lands on y - offset.
                if let Some(ix) = w.index(y - p.source_offset()) {
                    matrix[(4 * ix + p.index(), 4 * iy + q.index())] = cy[(p.index(), q.index())];
                }
            }
        }
    }
    UdMatrix {
        half_width: n,
        matrix,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GelfandBound {
    /// `min_k ||U_D^k||_2^{1/k}` over the powers examined.
    pub bound: f64,
    /// Power attaining the minimum.
    pub power: usize,
    /// `||U_D^k||_2^{1/k}` for `k = 1, 2, ...`.
    pub history: Vec<f64>,
}

fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Gelfand upper bound on the spectral radius from the first `max_power` powers.
///
/// Stops early once a power vanishes exactly. Fails with
/// [`Error::InconclusiveBound`] when the bound never drops below `1 - 1e-6`.
pub fn spectral_radius_bound(m: &UdMatrix, max_power: usize) -> Result<GelfandBound> {
    assert!(max_power >= 1, "max_power must be positive");
    let a = m.matrix();
    let mut power = a.clone();
    let mut best = f64::INFINITY;
    let mut best_k = 1;
    let mut history = Vec::with_capacity(max_power);
    for k in 1..=max_power {
        if k > 1 {
            power = &power * a;
        }
        let root = if power.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            0.0
        } else {
            spectral_norm(&power).powf(1.0 / k as f64)
        };
        history.push(root);
        if root < best {
            best = root;
            best_k = k;
        }
        if root == 0.0 {
            break;
        }
    }
    if !(best < 1.0 - CONTRACTION_MARGIN) {
        return Err(Error::InconclusiveBound {
            best,
            max_power,
        });
    }
    Ok(GelfandBound {
        bound: best,
        power: best_k,
        history,
    })
}

/// `Ψ∞ = χ*φ∞ + Ψ_out + Ψ0` for a unit plane wave entering the box along
/// the transverse line `row` in channel `chirality`.
///
/// The incident wave is `e^{iθ s t} e_p` on the half-line `s t >= n0 + 1`
/// (`t` the longitudinal coordinate, `s = +1` for Left/Down, `-1` for Right/Up),
/// which travels towards the box.
#[derive(Clone, Debug)]
pub struct CombinatorialEigenfunction {
    theta: f64,
    row: i64,
    chirality: Chirality,
    ud: UdMatrix,
    source: CMatrix,
    phi_inf: CMatrix,
    interior: SparseField,
    boundary_source: SparseField,
    /// `(U f∞)(x̃)` at the sites just outside the box.
    exits: HashMap<Site, Amp4>,
}

fn incident_value(theta: f64, row: i64, p: Chirality, n: i64, x: Site) -> Complex64 {
    let t = x.longitudinal(p);
    if x.transverse(p) == row && p.sign() * t > n {
        phase(theta * (p.sign() * t) as f64)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

pub fn combinatorial_eigenfunction(
    c: &CoinField,
    theta: f64,
    row: i64,
    chirality: Chirality,
) -> Result<CombinatorialEigenfunction> {
    combinatorial_eigenfunction_with(c, build_ud(c), theta, row, chirality)
}

/// As [`combinatorial_eigenfunction`], reusing a prebuilt `U_D` of the same coin.
pub fn combinatorial_eigenfunction_with(
    c: &CoinField,
    ud: UdMatrix,
    theta: f64,
    row: i64,
    chirality: Chirality,
) -> Result<CombinatorialEigenfunction> {
    let n = ud.half_width() as i64;
    if row.abs() > n {
        return Err(Error::InvalidArgument(format!(
            "incidence row {row} outside [-{n}, {n}]"
        )));
    }
    let p = chirality;
    // χ U Ψ0: only the box site adjacent to the half-line is fed.
    let entry = Site::along(p, p.sign() * n, row);
    let mut source = CMatrix::zeros(ud.dim(), 1);
    source[(ud.index(entry, p).unwrap(), 0)] = phase(theta * (n + 1) as f64);

    let e = phase(theta);
    let system = CMatrix::identity(ud.dim(), ud.dim()) * e - ud.matrix();
    let phi_inf = DenseLu::factor(&system)?.solve(&source)?;
    let interior = ud.to_sparse(&phi_inf);
    let boundary_source: SparseField = interior
        .iter()
        .filter(|(x, _)| x.sup_norm() == n)
        .map(|(x, v)| (x, *v))
        .collect();
    let mut exits = HashMap::new();
    for k in -n..=n {
        for x in [
            Site::new(n + 1, k),
            Site::new(-n - 1, k),
            Site::new(k, n + 1),
            Site::new(k, -n - 1),
        ] {
            exits.insert(x, walk_at(c, &boundary_source, x));
        }
    }
    Ok(CombinatorialEigenfunction {
        theta,
        row,
        chirality,
        ud,
        source,
        phi_inf,
        interior,
        boundary_source,
        exits,
    })
}

impl CombinatorialEigenfunction {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn row(&self) -> i64 {
        self.row
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn half_width(&self) -> i64 {
        self.ud.half_width() as i64
    }

    pub fn ud(&self) -> &UdMatrix {
        &self.ud
    }

    /// `φ∞` on the box.
    pub fn phi_inf(&self) -> &SparseField {
        &self.interior
    }

    /// `f∞ = δ_B χ* φ∞`, the part of `φ∞` on the boundary ring of the box.
    pub fn boundary_source(&self) -> &SparseField {
        &self.boundary_source
    }

    /// `χ U Ψ0`.
    pub fn feed(&self) -> SparseField {
        self.ud.to_sparse(&self.source)
    }

    pub fn incident(&self, x: Site) -> Amp4 {
        let mut v = ZERO4;
        let p = self.chirality;
        v[p.index()] = incident_value(self.theta, self.row, p, self.half_width(), x);
        v
    }

    /// `Ψ_out(x) = e^{-iμθ} (U f∞)(x̃)` in the four corridors, zero elsewhere.
    pub fn outgoing(&self, x: Site) -> Amp4 {
        let n = self.half_width();
        let (a1, a2) = (x.x1.abs(), x.x2.abs());
        let (mu, entry) = if a1 > n && a2 <= n {
            (a1 - n, Site::new(x.x1.signum() * (n + 1), x.x2))
        } else if a1 <= n && a2 > n {
            (a2 - n, Site::new(x.x1, x.x2.signum() * (n + 1)))
        } else {
            return ZERO4;
        };
        let u = self.exits[&entry];
        let ph = phase(-(mu as f64) * self.theta);
        u.map(|z| z * ph)
    }

    /// `||e^{-itθ} φ_t - φ∞||` for `t = 0..=t_max`, with
    /// `φ_0 = 0`, `φ_{t+1} = U_D φ_t + e^{itθ} χ U Ψ0`.
    pub fn finite_time_errors(&self, t_max: usize) -> Vec<f64> {
        let mut phi = CMatrix::zeros(self.ud.dim(), 1);
        let mut out = Vec::with_capacity(t_max + 1);
        for t in 0..=t_max {
            let rotated = &phi * phase(-(t as f64) * self.theta);
            out.push((rotated - &self.phi_inf).norm());
            phi = self.ud.matrix() * &phi + &self.source * phase(t as f64 * self.theta);
        }
        out
    }
}

/// Geometric decay rate of an error sequence, measured over the second half
/// of the steps whose error stays above `floor` times the initial error.
///
/// Returns `None` when fewer than four steps clear the floor.
pub fn observed_decay_rate(errors: &[f64], floor: f64) -> Option<f64> {
    let start = *errors.get(1)?;
    let cutoff = start * floor;
    let last = errors.iter().rposition(|&e| e > cutoff && e > 0.0)?;
    let first = last / 2;
    if last < 4 || first < 1 || errors[first] <= 0.0 {
        return None;
    }
    Some((errors[last] / errors[first]).powf(1.0 / (last - first) as f64))
}

impl Field for CombinatorialEigenfunction {
    fn eval(&self, x: Site) -> Amp4 {
        if x.sup_norm() <= self.half_width() {
            return self.interior.get(x);
        }
        let a = self.incident(x);
        let b = self.outgoing(x);
        std::array::from_fn(|k| a[k] + b[k])
    }
}
