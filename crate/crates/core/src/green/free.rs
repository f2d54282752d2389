use super::{green0_entry, Side};
use crate::lattice::{Amp4, Chirality, Field, GridField, Site, SparseField, ZERO4};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// `R0(θ±i0) f` for a finitely supported `f`, evaluable at every site of Z².
///
/// The source is stored grouped by the line each chirality travels on
/// (rows for Left/Right, columns for Down/Up), so one evaluation is a finite
/// one-sided sum along a single line.
#[derive(Clone, Debug)]
pub struct FreeResolvent {
    theta: f64,
    side: Side,
    /// `lines[p][transverse] = [(longitudinal, f_p)]`
    lines: [BTreeMap<i64, Vec<(i64, Complex64)>>; 4],
}

impl FreeResolvent {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// `(R0 f)_p(x)`.
    pub fn component(&self, x: Site, p: Chirality) -> Complex64 {
        let Some(line) = self.lines[p.index()].get(&x.transverse(p)) else {
            return Complex64::new(0.0, 0.0);
        };
        let t = x.longitudinal(p);
        let mut acc = Complex64::new(0.0, 0.0);
        for (y, v) in line {
            let d = Site::along(p, t - y, 0);
            acc += green0_entry(d, p, self.theta, self.side) * v;
        }
        acc
    }
}

impl Field for FreeResolvent {
    fn eval(&self, x: Site) -> Amp4 {
        let mut out = ZERO4;
        for p in Chirality::ALL {
            out[p.index()] = self.component(x, p);
        }
        out
    }
}

/// Builds the evaluator for `R0(θ±i0) f`.
pub fn apply_r0(f: &SparseField, theta: f64, side: Side) -> FreeResolvent {
    let mut lines: [BTreeMap<i64, Vec<(i64, Complex64)>>; 4] = Default::default();
    for (x, v) in f.iter() {
        for p in Chirality::ALL {
            let z = v[p.index()];
            if z != Complex64::new(0.0, 0.0) {
                lines[p.index()]
                    .entry(x.transverse(p))
                    .or_default()
                    .push((x.longitudinal(p), z));
            }
        }
    }
    FreeResolvent { theta, side, lines }
}

pub fn apply_r0_grid(f: &GridField, theta: f64, side: Side) -> FreeResolvent {
    apply_r0(&f.to_sparse(), theta, side)
}
