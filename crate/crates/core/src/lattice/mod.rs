//! Lattice states on Z² with four chiralities, the walk operators and the
//! anisotropic norms used throughout the crate.

mod coin;
mod field;
mod norms;
mod ops;
mod radiation;

pub use coin::{
    validate_coin, CoinFailure, CoinField, FailedCondition, SiteDiagnostics, ValidationOptions,
    ValidationReport,
};
pub use field::{Field, FnField, GridField, Region, SparseField};
pub use norms::{norms, NormReport, L2S_HALF_OVER_B, BSTAR_OVER_L2S_MINUS_HALF};
pub use ops::{
    apply_coin, apply_coin_adjoint, apply_free_walk, apply_free_walk_adjoint, apply_shift,
    apply_shift_inverse, apply_v, apply_v_adjoint, apply_walk, apply_walk_adjoint, evolve,
    free_walk_at, interior_validity_radius, shift_at, v_adjoint_at, walk_at, BoundingBox,
    Supported,
};
pub use radiation::{radiation_residual, RadiationResidual, RadiationSign};

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Value of a state at one site, in the order (Left, Right, Down, Up).
pub type Amp4 = [Complex64; 4];

pub const ZERO4: Amp4 = [Complex64 { re: 0.0, im: 0.0 }; 4];

/// Internal degree of freedom of the walker.
///
/// Left and Down are the "+" chiralities: the shift reads them from `x + e_j`,
/// so their amplitude travels towards decreasing coordinates. Right and Up read
/// from `x - e_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chirality {
    Left,
    Right,
    Down,
    Up,
}

impl Chirality {
    pub const ALL: [Chirality; 4] = [
        Chirality::Left,
        Chirality::Right,
        Chirality::Down,
        Chirality::Up,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Chirality> {
        Self::ALL.get(i).copied()
    }

    /// 0 for horizontal propagation (x1), 1 for vertical (x2).
    pub fn axis(self) -> usize {
        match self {
            Chirality::Left | Chirality::Right => 0,
            Chirality::Down | Chirality::Up => 1,
        }
    }

    /// +1 for Left/Down, -1 for Right/Up.
    pub fn sign(self) -> i64 {
        match self {
            Chirality::Left | Chirality::Down => 1,
            Chirality::Right | Chirality::Up => -1,
        }
    }

    /// Offset the shift reads this component from: `(S f)_p(x) = f_p(x + source_offset)`.
    pub fn source_offset(self) -> Site {
        Site::unit(self.axis()).scale(self.sign())
    }

    /// Chirality travelling the opposite way along the same axis.
    pub fn reversed(self) -> Chirality {
        match self {
            Chirality::Left => Chirality::Right,
            Chirality::Right => Chirality::Left,
            Chirality::Down => Chirality::Up,
            Chirality::Up => Chirality::Down,
        }
    }

    pub fn label(self) -> char {
        match self {
            Chirality::Left => 'L',
            Chirality::Right => 'R',
            Chirality::Down => 'D',
            Chirality::Up => 'U',
        }
    }

    pub fn from_label(s: &str) -> Option<Chirality> {
        match s.trim() {
            "L" | "l" | "left" | "Left" => Some(Chirality::Left),
            "R" | "r" | "right" | "Right" => Some(Chirality::Right),
            "D" | "d" | "down" | "Down" => Some(Chirality::Down),
            "U" | "u" | "up" | "Up" => Some(Chirality::Up),
            _ => None,
        }
    }

    pub fn unit(self) -> Amp4 {
        let mut v = ZERO4;
        v[self.index()] = Complex64::new(1.0, 0.0);
        v
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A point of Z².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Site {
    pub x1: i64,
    pub x2: i64,
}

impl Site {
    pub const ORIGIN: Site = Site { x1: 0, x2: 0 };

    pub const fn new(x1: i64, x2: i64) -> Self {
        Site { x1, x2 }
    }

    pub fn unit(axis: usize) -> Site {
        if axis == 0 {
            Site::new(1, 0)
        } else {
            Site::new(0, 1)
        }
    }

    pub fn coord(self, axis: usize) -> i64 {
        if axis == 0 {
            self.x1
        } else {
            self.x2
        }
    }

    pub fn with_coord(self, axis: usize, v: i64) -> Site {
        if axis == 0 {
            Site::new(v, self.x2)
        } else {
            Site::new(self.x1, v)
        }
    }

    /// Coordinate along which chirality `p` propagates.
    pub fn longitudinal(self, p: Chirality) -> i64 {
        self.coord(p.axis())
    }

    /// Coordinate labelling the row (Left/Right) or column (Down/Up) of `p`.
    pub fn transverse(self, p: Chirality) -> i64 {
        self.coord(1 - p.axis())
    }

    /// Site with longitudinal coordinate `along` and transverse coordinate `across` for `p`.
    pub fn along(p: Chirality, along: i64, across: i64) -> Site {
        if p.axis() == 0 {
            Site::new(along, across)
        } else {
            Site::new(across, along)
        }
    }

    pub fn scale(self, k: i64) -> Site {
        Site::new(self.x1 * k, self.x2 * k)
    }

    pub fn sup_norm(self) -> i64 {
        self.x1.abs().max(self.x2.abs())
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.x1, -self.x2)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x1, self.x2)
    }
}

/// Square truncation `|x1| <= L, |x2| <= L` of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    half_width: i64,
}

impl Window {
    pub fn new(half_width: usize) -> Self {
        assert!(half_width >= 1, "window half-width must be positive");
        Window {
            half_width: half_width as i64,
        }
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn side(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn num_sites(&self) -> usize {
        self.side() * self.side()
    }

    pub fn contains(&self, x: Site) -> bool {
        x.sup_norm() <= self.half_width
    }

    /// Sites whose four neighbours are all inside the window.
    pub fn is_interior(&self, x: Site) -> bool {
        x.sup_norm() < self.half_width
    }

    /// Lexicographic (x1, x2) position of a site.
    pub fn index(&self, x: Site) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let side = self.side() as i64;
        Some(((x.x1 + self.half_width) * side + (x.x2 + self.half_width)) as usize)
    }

    pub fn site(&self, index: usize) -> Site {
        let side = self.side();
        Site::new(
            (index / side) as i64 - self.half_width,
            (index % side) as i64 - self.half_width,
        )
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let l = self.half_width;
        (-l..=l).flat_map(move |x1| (-l..=l).map(move |x2| Site::new(x1, x2)))
    }

    pub fn interior_sites(&self) -> impl Iterator<Item = Site> + '_ {
        let l = self.half_width - 1;
        (-l..=l).flat_map(move |x1| (-l..=l).map(move |x2| Site::new(x1, x2)))
    }
}

/// Heaviside step with `F(0) = 1`.
#[inline]
pub(crate) fn step(s: i64) -> bool {
    s >= 0
}

#[inline]
pub fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

pub(crate) fn amp_sub(a: &Amp4, b: &Amp4) -> Amp4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub(crate) fn amp_add(a: &Amp4, b: &Amp4) -> Amp4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub(crate) fn amp_scale(a: &Amp4, s: Complex64) -> Amp4 {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

pub(crate) fn amp_norm(a: &Amp4) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest componentwise modulus.
pub(crate) fn amp_max(a: &Amp4) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
