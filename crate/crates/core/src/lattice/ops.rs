//! The shift `S`, coin `C`, walks `U = SC`, `U0 = S`, the perturbation
//! `V = U - U0` and their adjoints, on windows and pointwise on fields.
//!
//! Window operations read zero for any source site outside the window, so
//! they are exact only on fields supported strictly inside it.

use super::{Amp4, Chirality, CoinField, Field, GridField, Site, ZERO4};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

fn mat_apply(m: &Matrix4<Complex64>, v: &Amp4) -> Amp4 {
    let r = m * Vector4::from_column_slice(v);
    [r[0], r[1], r[2], r[3]]
}

/// Axis-aligned box of sites, inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub lo: Site,
    pub hi: Site,
}

impl BoundingBox {
    pub fn square(n: i64) -> Self {
        BoundingBox {
            lo: Site::new(-n, -n),
            hi: Site::new(n, n),
        }
    }

    pub fn contains(&self, x: Site) -> bool {
        (self.lo.x1..=self.hi.x1).contains(&x.x1) && (self.lo.x2..=self.hi.x2).contains(&x.x2)
    }
}

/// A window field together with a box guaranteed to contain its support.
#[derive(Clone, Debug, PartialEq)]
pub struct Supported {
    pub field: GridField,
    pub bbox: BoundingBox,
}

pub fn apply_shift(f: &GridField) -> GridField {
    GridField::from_fn(f.window(), |x| shift_at(f, x))
}

pub fn apply_shift_inverse(f: &GridField) -> GridField {
    GridField::from_fn(f.window(), |x| shift_inverse_at(f, x))
}

pub fn apply_coin(c: &CoinField, f: &GridField) -> GridField {
    f.map(|x, v| {
        if c.in_support(x) {
            mat_apply(&c.at(x), &v)
        } else {
            v
        }
    })
}

pub fn apply_coin_adjoint(c: &CoinField, f: &GridField) -> GridField {
    f.map(|x, v| {
        if c.in_support(x) {
            mat_apply(&c.at(x).adjoint(), &v)
        } else {
            v
        }
    })
}

/// `U f = S C f`.
pub fn apply_walk(c: &CoinField, f: &GridField) -> GridField {
    apply_shift(&apply_coin(c, f))
}

/// `U* f = C* S^{-1} f`.
pub fn apply_walk_adjoint(c: &CoinField, f: &GridField) -> GridField {
    apply_coin_adjoint(c, &apply_shift_inverse(f))
}

pub fn apply_free_walk(f: &GridField) -> GridField {
    apply_shift(f)
}

pub fn apply_free_walk_adjoint(f: &GridField) -> GridField {
    apply_shift_inverse(f)
}

/// Box containing the image of `V = S(C - I)`: the coin support moved one step
/// against each chirality's direction of travel.
fn v_image_box(c: &CoinField) -> BoundingBox {
    let e = c.extent() as i64;
    let mut lo = Site::new(i64::MAX, i64::MAX);
    let mut hi = Site::new(i64::MIN, i64::MIN);
    for p in Chirality::ALL {
        let off = p.source_offset();
        lo = Site::new(lo.x1.min(-e - off.x1), lo.x2.min(-e - off.x2));
        hi = Site::new(hi.x1.max(e - off.x1), hi.x2.max(e - off.x2));
    }
    BoundingBox { lo, hi }
}

/// `V f = S (C - I) f`.
pub fn apply_v(c: &CoinField, f: &GridField) -> Supported {
    let bbox = v_image_box(c);
    let field = GridField::from_fn(f.window(), |x| {
        if !bbox.contains(x) {
            return ZERO4;
        }
        let mut out = ZERO4;
        for p in Chirality::ALL {
            let y = x + p.source_offset();
            if c.in_support(y) {
                let cy = c.at(y);
                let fy = f.get(y);
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..4 {
                    let m = cy[(p.index(), q)] - if q == p.index() { 1.0 } else { 0.0 };
                    acc += m * fy[q];
                }
                out[p.index()] = acc;
            }
        }
        out
    });
    Supported { field, bbox }
}

/// `V* f = (C* - I) S^{-1} f`, supported in the coin box.
pub fn apply_v_adjoint(c: &CoinField, f: &GridField) -> Supported {
    let e = c.extent() as i64;
    let field = GridField::from_fn(f.window(), |x| v_adjoint_at(c, f, x));
    Supported {
        field,
        bbox: BoundingBox::square(e),
    }
}

/// `(S u)(x)`.
pub fn shift_at(u: &dyn Field, x: Site) -> Amp4 {
    let mut out = ZERO4;
    for p in Chirality::ALL {
        out[p.index()] = u.eval(x + p.source_offset())[p.index()];
    }
    out
}

/// `(S^{-1} u)(x)`.
pub fn shift_inverse_at(u: &dyn Field, x: Site) -> Amp4 {
    let mut out = ZERO4;
    for p in Chirality::ALL {
        out[p.index()] = u.eval(x - p.source_offset())[p.index()];
    }
    out
}

pub fn free_walk_at(u: &dyn Field, x: Site) -> Amp4 {
    shift_at(u, x)
}

/// `(U u)(x) = (C u)_p(x + source_offset(p))` componentwise.
pub fn walk_at(c: &CoinField, u: &dyn Field, x: Site) -> Amp4 {
    let mut out = ZERO4;
    for p in Chirality::ALL {
        let y = x + p.source_offset();
        let uy = u.eval(y);
        out[p.index()] = if c.in_support(y) {
            let cy = c.at(y);
            (0..4).map(|q| cy[(p.index(), q)] * uy[q]).sum()
        } else {
            uy[p.index()]
        };
    }
    out
}

/// `(V* u)(x)`; zero outside the coin support.
pub fn v_adjoint_at(c: &CoinField, u: &dyn Field, x: Site) -> Amp4 {
    if !c.in_support(x) {
        return ZERO4;
    }
    let s = shift_inverse_at(u, x);
    let m = c.at(x).adjoint() - Matrix4::identity();
    mat_apply(&m, &s)
}

/// `U^t f` on the window.
pub fn evolve(c: &CoinField, f: &GridField, t: usize) -> GridField {
    let mut state = f.clone();
    for _ in 0..t {
        state = apply_walk(c, &state);
    }
    state
}

/// `L - t - r` where `r` is the support radius of `f`: nonnegative exactly when
/// no amplitude can have reached the window edge and been truncated after `t` steps.
pub fn interior_validity_radius(f: &GridField, t: usize) -> i64 {
    let r = f.support_radius().unwrap_or(0);
    f.window().half_width() - t as i64 - r
}
