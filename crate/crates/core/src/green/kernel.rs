use super::Side;
use crate::lattice::{phase, step, Amp4, Chirality, Field, Site, ZERO4};
use num_complex::Complex64;

/// Diagonal of the free Green kernel `G0(x; θ±i0)` in the order (Left, Right, Down, Up).
///
/// Each entry is either zero or a unimodular phase: the kernel lives on the
/// row `x2 = 0` for Left/Right and on the column `x1 = 0` for Down/Up.
pub fn green0(x: Site, theta: f64, side: Side) -> Amp4 {
    let mut out = ZERO4;
    for p in Chirality::ALL {
        out[p.index()] = green0_entry(x, p, theta, side);
    }
    out
}

/// Single diagonal entry `r_p(x; θ±i0)`.
#[inline]
pub fn green0_entry(x: Site, p: Chirality, theta: f64, side: Side) -> Complex64 {
    if x.transverse(p) != 0 {
        return Complex64::new(0.0, 0.0);
    }
    let t = x.longitudinal(p);
    // Left/Down carry e^{iθ(t-1)}, Right/Up carry e^{-iθ(t+1)}.
    let s = p.sign();
    let ph = phase(theta * (s * t - 1) as f64);
    match side {
        // supported on s·t >= 1
        Side::Plus => {
            if step(s * t - 1) {
                ph
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        // supported on s·t <= 0
        Side::Minus => {
            if step(-s * t) {
                -ph
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }
}

/// The kernel at a fixed spectral point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenKernel {
    pub theta: f64,
    pub side: Side,
}

impl GreenKernel {
    pub fn new(theta: f64, side: Side) -> Self {
        GreenKernel { theta, side }
    }

    pub fn entries(&self, x: Site) -> Amp4 {
        green0(x, self.theta, self.side)
    }

    /// The field `G0(· - y) e_p`.
    pub fn column(&self, y: Site, p: Chirality) -> KernelColumn {
        KernelColumn {
            kernel: *self,
            source: y,
            chirality: p,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KernelColumn {
    kernel: GreenKernel,
    source: Site,
    chirality: Chirality,
}

impl Field for KernelColumn {
    fn eval(&self, x: Site) -> Amp4 {
        let mut v = ZERO4;
        let p = self.chirality;
        v[p.index()] = green0_entry(x - self.source, p, self.kernel.theta, self.kernel.side);
        v
    }
}
