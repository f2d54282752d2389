use super::Site;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use std::fmt;

/// Site-dependent coin `C(x)`, equal to the identity outside a square box.
///
/// `n0` is the declared half-width of the perturbation box `D`. The stored
/// matrices cover a box of half-width `extent() >= n0`; for every coin built by
/// the regular constructors the two coincide. Algorithms that need the support
/// of `C - I` use `extent()`, checks of the corridor structure use `n0()`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinField {
    n0: usize,
    extent: usize,
    coins: Vec<Matrix4<Complex64>>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real4(rows: [[f64; 4]; 4]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| c(rows[i][j], 0.0))
}

impl CoinField {
    pub fn from_fn(n0: usize, f: impl Fn(Site) -> Matrix4<Complex64>) -> Self {
        assert!(n0 >= 1, "n0 must be positive");
        let coins = box_sites(n0).map(f).collect();
        CoinField {
            n0,
            extent: n0,
            coins,
        }
    }

    pub fn uniform(n0: usize, m: Matrix4<Complex64>) -> Self {
        Self::from_fn(n0, |_| m)
    }

    pub fn identity(n0: usize) -> Self {
        Self::uniform(n0, Matrix4::identity())
    }

    /// Build from matrices listed in lexicographic (x1, x2) order over `D`.
    pub fn from_matrices(n0: usize, coins: Vec<Matrix4<Complex64>>) -> Option<Self> {
        if n0 == 0 || coins.len() != (2 * n0 + 1).pow(2) {
            return None;
        }
        Some(CoinField {
            n0,
            extent: n0,
            coins,
        })
    }

    /// Same coin with a smaller declared box; only useful as a negative control.
    pub fn with_declared_n0(mut self, n0: usize) -> Self {
        assert!(n0 >= 1 && n0 <= self.extent);
        self.n0 = n0;
        self
    }

    /// First example of the introduction: `(1/2)[[1,1,1,1],[1,-1,1,-1],[1,1,-1,-1],[1,-1,-1,1]]`.
    pub fn example1_matrix() -> Matrix4<Complex64> {
        real4([
            [1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0],
        ]) * c(0.5, 0.0)
    }

    pub fn example2_matrix() -> Matrix4<Complex64> {
        let s2 = 1.0 / 2f64.sqrt();
        let s6 = 1.0 / 6f64.sqrt();
        let s12 = 1.0 / 12f64.sqrt();
        real4([
            [s2, s6, s12, 0.5],
            [-s2, s6, s12, 0.5],
            [0.0, -2.0 * s6, s12, 0.5],
            [0.0, 0.0, 3.0 * s12, -0.5],
        ])
    }

    pub fn grover_matrix() -> Matrix4<Complex64> {
        real4([
            [-1.0, 1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0, 1.0],
            [1.0, 1.0, 1.0, -1.0],
        ]) * c(0.5, 0.0)
    }

    pub fn fourier_matrix() -> Matrix4<Complex64> {
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        Matrix4::new(
            one, one, one, one, //
            one, i, -one, -i, //
            one, -one, one, -one, //
            one, -i, -one, i,
        ) * c(0.5, 0.0)
    }

    /// Named coins: `example1`, `example2`, `grover`, `fourier`, `identity`.
    pub fn builtin_matrix(name: &str) -> Option<Matrix4<Complex64>> {
        match name {
            "example1" => Some(Self::example1_matrix()),
            "example2" => Some(Self::example2_matrix()),
            "grover" => Some(Self::grover_matrix()),
            "fourier" => Some(Self::fourier_matrix()),
            "identity" => Some(Matrix4::identity()),
            _ => None,
        }
    }

    pub fn builtin(name: &str, n0: usize) -> Option<Self> {
        Self::builtin_matrix(name).map(|m| Self::uniform(n0, m))
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    /// Half-width of the box on which `C(x)` may differ from the identity.
    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn in_support(&self, x: Site) -> bool {
        x.sup_norm() <= self.extent as i64
    }

    pub fn in_box(&self, x: Site) -> bool {
        x.sup_norm() <= self.n0 as i64
    }

    fn index(&self, x: Site) -> Option<usize> {
        let e = self.extent as i64;
        if x.sup_norm() > e {
            return None;
        }
        let side = 2 * e + 1;
        Some(((x.x1 + e) * side + (x.x2 + e)) as usize)
    }

    pub fn at(&self, x: Site) -> Matrix4<Complex64> {
        match self.index(x) {
            Some(i) => self.coins[i],
            None => Matrix4::identity(),
        }
    }

    /// Stored sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Site> {
        box_sites(self.extent)
    }

    pub fn matrices(&self) -> &[Matrix4<Complex64>] {
        &self.coins
    }

    pub fn is_identity(&self) -> bool {
        self.coins.iter().all(|m| *m == Matrix4::identity())
    }
}

/// Sites of `{|x1| <= n, |x2| <= n}` in lexicographic order.
pub(crate) fn box_sites(n: usize) -> impl Iterator<Item = Site> {
    let n = n as i64;
    (-n..=n).flat_map(move |x1| (-n..=n).map(move |x2| Site::new(x1, x2)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationOptions {
    /// Bound on `||C C* - I||_F`.
    pub unitarity_tol: f64,
    /// Lower bound on the moduli of both 2x2 chirality minors.
    pub minor_floor: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            unitarity_tol: 1e-12,
            minor_floor: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FailedCondition {
    Unitarity { defect: f64 },
    /// Minor on rows/columns (Left, Down).
    OddMinor { modulus: f64 },
    /// Minor on rows/columns (Right, Up).
    EvenMinor { modulus: f64 },
    /// Coin differs from the identity outside the declared box.
    OutsideBox,
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailedCondition::Unitarity { defect } => write!(f, "unitarity defect {defect:.3e}"),
            FailedCondition::OddMinor { modulus } => write!(f, "odd minor |det| = {modulus:.3e}"),
            FailedCondition::EvenMinor { modulus } => {
                write!(f, "even minor |det| = {modulus:.3e}")
            }
            FailedCondition::OutsideBox => write!(f, "non-identity coin outside declared box"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoinFailure {
    pub site: Site,
    pub condition: FailedCondition,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteDiagnostics {
    pub site: Site,
    pub unitarity_defect: f64,
    pub odd_minor: f64,
    pub even_minor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub options: ValidationOptions,
    pub sites: Vec<SiteDiagnostics>,
    pub failures: Vec<CoinFailure>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn max_unitarity_defect(&self) -> f64 {
        self.sites
            .iter()
            .map(|s| s.unitarity_defect)
            .fold(0.0, f64::max)
    }

    pub fn min_minor(&self) -> f64 {
        self.sites
            .iter()
            .map(|s| s.odd_minor.min(s.even_minor))
            .fold(f64::INFINITY, f64::min)
    }
}

fn minor(m: &Matrix4<Complex64>, a: usize, b: usize) -> f64 {
    Matrix2::new(m[(a, a)], m[(a, b)], m[(b, a)], m[(b, b)])
        .determinant()
        .norm()
}

/// Check unitarity and the two chirality-minor conditions at every stored site.
pub fn validate_coin(coin: &CoinField, options: ValidationOptions) -> ValidationReport {
    let mut sites = Vec::new();
    let mut failures = Vec::new();
    for x in coin.sites() {
        let m = coin.at(x);
        let defect = (m * m.adjoint() - Matrix4::identity()).norm();
        let odd = minor(&m, 0, 2);
        let even = minor(&m, 1, 3);
        if !(defect <= options.unitarity_tol) {
            failures.push(CoinFailure {
                site: x,
                condition: FailedCondition::Unitarity { defect },
            });
        }
        if !coin.in_box(x) {
            if m != Matrix4::identity() {
                failures.push(CoinFailure {
                    site: x,
                    condition: FailedCondition::OutsideBox,
                });
            }
        } else {
            if !(odd >= options.minor_floor) {
                failures.push(CoinFailure {
                    site: x,
                    condition: FailedCondition::OddMinor { modulus: odd },
                });
            }
            if !(even >= options.minor_floor) {
                failures.push(CoinFailure {
                    site: x,
                    condition: FailedCondition::EvenMinor { modulus: even },
                });
            }
        }
        sites.push(SiteDiagnostics {
            site: x,
            unitarity_defect: defect,
            odd_minor: odd,
            even_minor: even,
        });
    }
    ValidationReport {
        options,
        sites,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(name: &str) -> ValidationReport {
        validate_coin(
            &CoinField::builtin(name, 1).unwrap(),
            ValidationOptions::default(),
        )
    }

    #[test]
    fn examples_pass() {
        assert!(check("example1").passed());
        assert!(check("example2").passed());
    }

    #[test]
    fn grover_and_fourier_fail_on_minors_only() {
        for name in ["grover", "fourier"] {
            let r = check(name);
            assert!(!r.passed(), "{name}");
            assert!(r.max_unitarity_defect() < 1e-12, "{name} should be unitary");
            assert!(r.failures.iter().all(|f| matches!(
                f.condition,
                FailedCondition::OddMinor { .. } | FailedCondition::EvenMinor { .. }
            )));
        }
    }

    #[test]
    fn all_ones_fails_unitarity() {
        let coin = CoinField::uniform(1, Matrix4::from_element(c(1.0, 0.0)));
        let r = validate_coin(&coin, ValidationOptions::default());
        assert!(r
            .failures
            .iter()
            .any(|f| matches!(f.condition, FailedCondition::Unitarity { .. })));
        assert_eq!(r.sites.len(), 9);
    }

    #[test]
    fn nan_entries_fail() {
        let mut m = CoinField::example1_matrix();
        m[(0, 0)] = c(f64::NAN, 0.0);
        let r = validate_coin(&CoinField::uniform(1, m), ValidationOptions::default());
        assert!(!r.passed());
    }

    #[test]
    fn identity_outside_box() {
        let coin = CoinField::builtin("example1", 2).unwrap();
        assert_eq!(coin.at(Site::new(3, 0)), Matrix4::identity());
        assert_eq!(coin.at(Site::new(2, -2)), CoinField::example1_matrix());
        let bad = coin.with_declared_n0(1);
        let r = validate_coin(&bad, ValidationOptions::default());
        assert!(r
            .failures
            .iter()
            .any(|f| f.condition == FailedCondition::OutsideBox));
    }

    #[test]
    fn from_matrices_checks_length() {
        assert!(CoinField::from_matrices(1, vec![Matrix4::identity(); 8]).is_none());
        let coin = CoinField::from_matrices(1, vec![Matrix4::identity(); 9]).unwrap();
        assert!(coin.is_identity());
    }
}
