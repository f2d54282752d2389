//! Experiment configuration, read from JSON.

use anyhow::{bail, Context, Result};
use nalgebra::Matrix4;
use num_complex::Complex64;
use qwscatter::lattice::{CoinField, Window};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

/// One 4x4 matrix as four rows of `[re, im]` pairs.
pub type MatrixSpec = [[[f64; 2]; 4]; 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinSpec {
    pub n0: usize,
    /// One of `example1`, `example2`, `grover`, `fourier`, `identity`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// Per-site matrices over the box in lexicographic `(x1, x2)` order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum ThetaSpec {
    /// Explicit quasi-energies.
    Values(Vec<f64>),
    /// `N` equispaced points `2πk/N`, `k = 0..N`.
    Grid(usize),
}

impl ThetaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ThetaSpec::Values(v) => v.clone(),
            ThetaSpec::Grid(n) => theta_grid(*n),
        }
    }
}

pub fn theta_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct Tolerances {
    pub coin_unitarity: f64,
    pub minor_floor: f64,
    pub kernel: f64,
    pub resolvent: f64,
    pub eigen_residual: f64,
    pub agreement: f64,
    pub unitarity: f64,
    pub corridor: f64,
    pub radiation: f64,
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            coin_unitarity: 1e-12,
            minor_floor: 1e-10,
            kernel: 1e-12,
            resolvent: 1e-10,
            eigen_residual: 1e-10,
            agreement: 1e-8,
            unitarity: 1e-10,
            corridor: 1e-12,
            radiation: 1e-12,
            norm: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub coin: CoinSpec,
    /// Half-width `L` of the square window; defaults to `n0 + 20`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Defaults to a 32-point grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn builtin(name: &str, n0: usize) -> Self {
        ExperimentConfig {
            coin: CoinSpec {
                n0,
                builtin: Some(name.to_string()),
                matrices: None,
            },
            window: None,
            theta: None,
            out: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Structural checks that do not involve the coin's physics.
    pub fn check(&self) -> Result<()> {
        let n0 = self.coin.n0;
        if n0 == 0 {
            bail!("coin.n0 must be positive");
        }
        match (&self.coin.builtin, &self.coin.matrices) {
            (Some(_), Some(_)) => bail!("coin: give either `builtin` or `matrices`, not both"),
            (None, None) => bail!("coin: one of `builtin` or `matrices` is required"),
            (Some(name), None) if CoinField::builtin_matrix(name).is_none() => {
                bail!("unknown builtin coin `{name}`")
            }
            (None, Some(m)) if m.len() != (2 * n0 + 1).pow(2) => bail!(
                "coin.matrices has {} entries, expected {} for n0 = {n0}",
                m.len(),
                (2 * n0 + 1).pow(2)
            ),
            _ => {}
        }
        let values = self.thetas();
        if values.is_empty() || values.iter().any(|t| !t.is_finite()) {
            bail!("theta list must be nonempty and finite");
        }
        if let Some(l) = self.window {
            if l < n0 + 2 {
                bail!("window {l} is smaller than n0 + 2 = {}", n0 + 2);
            }
        }
        Ok(())
    }

    pub fn coin_field(&self) -> Result<CoinField> {
        let n0 = self.coin.n0;
        if let Some(name) = &self.coin.builtin {
            return CoinField::builtin(name, n0).with_context(|| format!("unknown builtin `{name}`"));
        }
        let specs = self.coin.matrices.as_ref().context("coin has no matrices")?;
        let mats = specs
            .iter()
            .map(|m| Matrix4::from_fn(|i, j| Complex64::new(m[i][j][0], m[i][j][1])))
            .collect();
        CoinField::from_matrices(n0, mats).context("coin.matrices has the wrong length")
    }

    pub fn window(&self) -> Window {
        Window::new(self.window.unwrap_or(self.coin.n0 + 20))
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.theta
            .as_ref()
            .map(ThetaSpec::values)
            .unwrap_or_else(|| theta_grid(32))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("qws-out"))
    }
}

pub fn matrix_spec(m: &Matrix4<Complex64>) -> MatrixSpec {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_config_roundtrips() {
        let mut cfg = ExperimentConfig::builtin("example1", 1);
        cfg.theta = Some(ThetaSpec::Values(vec![0.1, 0.7]));
        cfg.window = Some(12);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
    }

    #[test]
    fn explicit_matrices_roundtrip_and_match_builtin() {
        let m = CoinField::example2_matrix();
        let cfg = ExperimentConfig {
            coin: CoinSpec {
                n0: 1,
                builtin: None,
                matrices: Some(vec![matrix_spec(&m); 9]),
            },
            window: None,
            theta: Some(ThetaSpec::Grid(4)),
            out: Some(PathBuf::from("o")),
            tolerances: Tolerances::default(),
        };
        let back: ExperimentConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(
            back.coin_field().unwrap(),
            CoinField::builtin("example2", 1).unwrap()
        );
    }

    #[test]
    fn rejects_inconsistent_coin() {
        let mut cfg = ExperimentConfig::builtin("example1", 1);
        cfg.coin.matrices = Some(vec![]);
        assert!(cfg.check().is_err());
        let cfg = ExperimentConfig::builtin("nope", 1);
        assert!(cfg.check().is_err());
        let mut cfg = ExperimentConfig::builtin("example1", 2);
        cfg.window = Some(3);
        assert!(cfg.check().is_err());
    }

    #[test]
    fn partial_tolerances_keep_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"coin": {"n0": 1, "builtin": "grover"}, "tolerances": {"unitarity": 1e-9}}"#,
        )
        .unwrap();
        assert_eq!(cfg.tolerances.unitarity, 1e-9);
        assert_eq!(cfg.tolerances.corridor, 1e-12);
        assert_eq!(cfg.thetas().len(), 32);
    }
}
