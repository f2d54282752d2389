use crate::lattice::Chirality;
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Element of `h(θ)`: four finitely supported transverse sequences
/// `φ_L(x2), φ_R(x2), φ_D(x1), φ_U(x1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryVector {
    theta: f64,
    comps: [BTreeMap<i64, Complex64>; 4],
}

impl BoundaryVector {
    pub fn zeros(theta: f64) -> Self {
        BoundaryVector {
            theta,
            comps: Default::default(),
        }
    }

    /// `value` at transverse coordinate `k` in channel `p`.
    pub fn single(theta: f64, p: Chirality, k: i64, value: Complex64) -> Self {
        let mut v = Self::zeros(theta);
        v.set(p, k, value);
        v
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn get(&self, p: Chirality, k: i64) -> Complex64 {
        self.comps[p.index()]
            .get(&k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, p: Chirality, k: i64, value: Complex64) {
        self.comps[p.index()].insert(k, value);
    }

    pub fn add(&mut self, p: Chirality, k: i64, value: Complex64) {
        *self.comps[p.index()]
            .entry(k)
            .or_insert(Complex64::new(0.0, 0.0)) += value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Chirality, i64, Complex64)> + '_ {
        Chirality::ALL
            .into_iter()
            .flat_map(move |p| self.comps[p.index()].iter().map(move |(k, v)| (p, *k, *v)))
    }

    /// `(self, other)_{h(θ)}`, conjugate-linear in `other`.
    pub fn inner(&self, other: &BoundaryVector) -> Complex64 {
        self.iter()
            .map(|(p, k, v)| v * other.get(p, k).conj())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Smallest and largest transverse index carrying a stored entry.
    pub fn support(&self) -> Option<(i64, i64)> {
        let ks: Vec<i64> = self.iter().map(|(_, k, _)| k).collect();
        Some((*ks.iter().min()?, *ks.iter().max()?))
    }

    pub fn scaled(&self, s: Complex64) -> BoundaryVector {
        let mut out = Self::zeros(self.theta);
        for (p, k, v) in self.iter() {
            out.set(p, k, v * s);
        }
        out
    }

    pub fn sub(&self, other: &BoundaryVector) -> BoundaryVector {
        let mut out = self.clone();
        for (p, k, v) in other.iter() {
            out.add(p, k, -v);
        }
        out
    }

    /// Position of `(p, k)` in the block layout of width `2m + 1` per channel.
    pub fn block_index(m: i64, p: Chirality, k: i64) -> Option<usize> {
        (-m..=m)
            .contains(&k)
            .then(|| p.index() * (2 * m + 1) as usize + (k + m) as usize)
    }

    /// Dense coordinates on `-m..=m` per channel; entries outside are dropped.
    pub fn to_block(&self, m: i64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); 4 * (2 * m + 1) as usize];
        for (p, k, v) in self.iter() {
            if let Some(i) = Self::block_index(m, p, k) {
                out[i] += v;
            }
        }
        out
    }

    pub fn from_block(theta: f64, m: i64, data: &[Complex64]) -> Self {
        assert_eq!(data.len(), 4 * (2 * m + 1) as usize, "block length");
        let mut out = Self::zeros(theta);
        for p in Chirality::ALL {
            for k in -m..=m {
                let v = data[Self::block_index(m, p, k).unwrap()];
                if v != Complex64::new(0.0, 0.0) {
                    out.set(p, k, v);
                }
            }
        }
        out
    }

    /// Largest modulus outside `-m..=m`.
    pub fn max_outside(&self, m: i64) -> f64 {
        self.iter()
            .filter(|(_, k, _)| k.abs() > m)
            .map(|(_, _, v)| v.norm())
            .fold(0.0, f64::max)
    }
}
