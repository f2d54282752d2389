use super::{amp_add, amp_norm, Amp4, Chirality, Site, Window, ZERO4};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Where a field's values are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Closed form valid at every site of Z².
    Everywhere,
    /// Stored values inside the window, zero (by truncation) outside.
    Window(Window),
    /// Finitely supported; exact everywhere, zero outside the given box.
    Box { lo: Site, hi: Site },
}

/// A C⁴-valued state on Z² that can be evaluated pointwise.
///
/// Evaluation is deterministic: the same site always yields bit-identical values.
pub trait Field: Sync {
    fn eval(&self, x: Site) -> Amp4;

    fn region(&self) -> Region {
        Region::Everywhere
    }

    fn materialize(&self, window: Window) -> GridField {
        GridField::from_fn(window, |x| self.eval(x))
    }
}

impl<T: Field + ?Sized> Field for &T {
    fn eval(&self, x: Site) -> Amp4 {
        (**self).eval(x)
    }
    fn region(&self) -> Region {
        (**self).region()
    }
}

/// Closure-backed field.
pub struct FnField<F> {
    f: F,
    region: Region,
}

impl<F: Fn(Site) -> Amp4 + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        FnField {
            f,
            region: Region::Everywhere,
        }
    }

    pub fn with_region(f: F, region: Region) -> Self {
        FnField { f, region }
    }
}

impl<F: Fn(Site) -> Amp4 + Sync> Field for FnField<F> {
    fn eval(&self, x: Site) -> Amp4 {
        (self.f)(x)
    }
    fn region(&self) -> Region {
        self.region
    }
}

/// Dense state on a square window; reads as zero outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    window: Window,
    data: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(window: Window) -> Self {
        GridField {
            window,
            data: vec![Complex64::new(0.0, 0.0); 4 * window.num_sites()],
        }
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(Site) -> Amp4) -> Self {
        let mut data = Vec::with_capacity(4 * window.num_sites());
        for x in window.sites() {
            data.extend_from_slice(&f(x));
        }
        GridField { window, data }
    }

    /// Unit mass at `x` in chirality `p`.
    pub fn delta(window: Window, x: Site, p: Chirality) -> Self {
        let mut g = GridField::zeros(window);
        g.set_component(x, p, Complex64::new(1.0, 0.0));
        g
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, x: Site) -> Amp4 {
        match self.window.index(x) {
            Some(i) => {
                let s = &self.data[4 * i..4 * i + 4];
                [s[0], s[1], s[2], s[3]]
            }
            None => ZERO4,
        }
    }

    pub fn component(&self, x: Site, p: Chirality) -> Complex64 {
        self.get(x)[p.index()]
    }

    /// Panics if `x` lies outside the window.
    pub fn set(&mut self, x: Site, v: Amp4) {
        let i = self.window.index(x).expect("site outside window");
        self.data[4 * i..4 * i + 4].copy_from_slice(&v);
    }

    pub fn set_component(&mut self, x: Site, p: Chirality, v: Complex64) {
        let i = self.window.index(x).expect("site outside window");
        self.data[4 * i + p.index()] = v;
    }

    pub fn norm_l2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Pairing `(self, other) = Σ_x <self(x), other(x)>`, conjugate-linear in `other`.
    pub fn inner(&self, other: &GridField) -> Complex64 {
        assert_eq!(self.window, other.window, "window mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `max(|x1|, |x2|)` over sites carrying a nonzero value, `None` for the zero field.
    pub fn support_radius(&self) -> Option<i64> {
        self.nonzero_sites().map(|x| x.sup_norm()).max()
    }

    pub fn nonzero_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.data
            .chunks_exact(4)
            .enumerate()
            .filter(|(_, c)| c.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            .map(move |(i, _)| self.window.site(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, Amp4)> + '_ {
        self.data
            .chunks_exact(4)
            .enumerate()
            .map(move |(i, c)| (self.window.site(i), [c[0], c[1], c[2], c[3]]))
    }

    pub fn sup_diff(&self, other: &GridField) -> f64 {
        assert_eq!(self.window, other.window, "window mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_sparse(&self) -> SparseField {
        let mut s = SparseField::new();
        for (x, v) in self.iter() {
            if v.iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
                s.insert(x, v);
            }
        }
        s
    }

    pub fn map(&self, f: impl Fn(Site, Amp4) -> Amp4) -> GridField {
        GridField::from_fn(self.window, |x| f(x, self.get(x)))
    }
}

impl Field for GridField {
    fn eval(&self, x: Site) -> Amp4 {
        self.get(x)
    }
    fn region(&self) -> Region {
        Region::Window(self.window)
    }
}

/// Finitely supported state stored site by site.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseField {
    entries: BTreeMap<Site, Amp4>,
}

impl SparseField {
    pub fn new() -> Self {
        SparseField::default()
    }

    pub fn delta(x: Site, p: Chirality) -> Self {
        let mut s = SparseField::new();
        s.insert(x, p.unit());
        s
    }

    pub fn insert(&mut self, x: Site, v: Amp4) {
        self.entries.insert(x, v);
    }

    pub fn add_at(&mut self, x: Site, v: Amp4) {
        let e = self.entries.entry(x).or_insert(ZERO4);
        *e = amp_add(e, &v);
    }

    pub fn get(&self, x: Site) -> Amp4 {
        self.entries.get(&x).copied().unwrap_or(ZERO4)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, &Amp4)> {
        self.entries.iter().map(|(x, v)| (*x, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_l2(&self) -> f64 {
        self.entries
            .values()
            .map(|v| amp_norm(v).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Pairing `(u, self) = Σ_x <u(x), self(x)>` with a field of unbounded support.
    pub fn pair_with(&self, u: &dyn Field) -> Complex64 {
        self.entries
            .iter()
            .map(|(x, f)| {
                let ux = u.eval(*x);
                (0..4).map(|k| ux[k] * f[k].conj()).sum::<Complex64>()
            })
            .sum()
    }

    /// Bounding box of the support, `None` when empty.
    pub fn bounding_box(&self) -> Option<(Site, Site)> {
        let mut it = self.entries.keys();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for x in it {
            lo = Site::new(lo.x1.min(x.x1), lo.x2.min(x.x2));
            hi = Site::new(hi.x1.max(x.x1), hi.x2.max(x.x2));
        }
        Some((lo, hi))
    }

    pub fn scaled(&self, s: Complex64) -> SparseField {
        SparseField {
            entries: self
                .entries
                .iter()
                .map(|(x, v)| (*x, super::amp_scale(v, s)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &SparseField) -> SparseField {
        let mut out = self.clone();
        for (x, v) in other.iter() {
            out.add_at(x, super::amp_scale(v, Complex64::new(-1.0, 0.0)));
        }
        out
    }

    pub fn to_grid(&self, window: Window) -> GridField {
        let mut g = GridField::zeros(window);
        for (x, v) in self.iter() {
            if window.contains(x) {
                g.set(x, *v);
            }
        }
        g
    }
}

impl Field for SparseField {
    fn eval(&self, x: Site) -> Amp4 {
        self.get(x)
    }
    fn region(&self) -> Region {
        match self.bounding_box() {
            Some((lo, hi)) => Region::Box { lo, hi },
            None => Region::Everywhere,
        }
    }
}

impl FromIterator<(Site, Amp4)> for SparseField {
    fn from_iter<I: IntoIterator<Item = (Site, Amp4)>>(iter: I) -> Self {
        let mut s = SparseField::new();
        for (x, v) in iter {
            s.add_at(x, v);
        }
        s
    }
}
