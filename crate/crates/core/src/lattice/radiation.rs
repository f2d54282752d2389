use super::{amp_max, amp_sub, ops::shift_at, phase, step, Amp4, Field, GridField, Region, Site, Window, ZERO4};

/// `Plus` selects `B₊` (incoming test), `Minus` selects `B₋` (outgoing test).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiationSign {
    Plus,
    Minus,
}

impl RadiationSign {
    fn sgn(self) -> i64 {
        match self {
            RadiationSign::Plus => 1,
            RadiationSign::Minus => -1,
        }
    }

    /// Applies the half-space cut-off `B±` at site `x`.
    pub fn cut(self, x: Site, v: Amp4) -> Amp4 {
        let s = self.sgn();
        let keep = [
            step(s * x.x1),
            step(-s * x.x1),
            step(s * x.x2),
            step(-s * x.x2),
        ];
        let mut out = ZERO4;
        for k in 0..4 {
            if keep[k] {
                out[k] = v[k];
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct RadiationResidual {
    /// `B±Su - e^{iθ}u` on the probed sites, zero elsewhere.
    pub residual: GridField,
    pub probe_radius: i64,
    /// Largest componentwise modulus over the probed sites.
    pub sup: f64,
    /// `(1/ρ) Σ_{|x_axis| < ρ} |r_p(x)|²` for `ρ = 1..=L`, binned anisotropically.
    pub indicator: Vec<f64>,
}

impl RadiationResidual {
    pub fn indicator_sup(&self) -> f64 {
        self.indicator.iter().copied().fold(0.0, f64::max)
    }
}

/// Evaluates `B±Su - e^{iθ}u` on the sites of `window` with `max(|x1|, |x2|) >= probe_radius`.
///
/// When `u` is itself a window-truncated field its outermost ring is skipped,
/// since the shift there would read past the stored data.
pub fn radiation_residual(
    u: &dyn Field,
    theta: f64,
    sign: RadiationSign,
    probe_radius: i64,
    window: Window,
) -> RadiationResidual {
    let outer = match u.region() {
        Region::Window(w) => w.half_width().min(window.half_width()) - 1,
        _ => window.half_width(),
    };
    let e = phase(theta);
    let mut residual = GridField::zeros(window);
    let mut sup: f64 = 0.0;
    let l = window.half_width();
    let mut mass = vec![0.0; l as usize + 1];
    for x in window.sites() {
        let r = x.sup_norm();
        if r < probe_radius || r > outer {
            continue;
        }
        let ux = u.eval(x);
        let su = sign.cut(x, shift_at(u, x));
        let scaled = [ux[0] * e, ux[1] * e, ux[2] * e, ux[3] * e];
        let v = amp_sub(&su, &scaled);
        sup = sup.max(amp_max(&v));
        for p in super::Chirality::ALL {
            mass[x.longitudinal(p).unsigned_abs() as usize] += v[p.index()].norm_sqr();
        }
        residual.set(x, v);
    }
    let mut indicator = Vec::with_capacity(l as usize);
    let mut partial = 0.0;
    for rho in 1..=l {
        partial += mass[(rho - 1) as usize];
        indicator.push(partial / rho as f64);
    }
    RadiationResidual {
        residual,
        probe_radius,
        sup,
        indicator,
    }
}
