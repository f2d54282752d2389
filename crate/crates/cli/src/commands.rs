//! The five subcommands. Each writes its data files under the output
//! directory and prints a short summary to stdout.

use crate::config::ExperimentConfig;
use crate::output::{field_csv, parse_field_csv, pgm_heatmap, svg_heatmap, svg_lines, write_atomic, write_json};
use crate::verify::{self, Context};
use crate::{Cli, CmdResult, Command, Failure, Method, EXIT_INVALID_COIN, EXIT_PROPERTY};
use anyhow::Context as _;
use num_complex::Complex64;
use qwscatter::eigen::{
    combinatorial_eigenfunction, eigen_residual, fpm_star, matching_constant, BoundaryVector,
};
use qwscatter::green::{assemble_boundary_system, CMatrix, Side};
use qwscatter::lattice::{
    evolve, interior_validity_radius, validate_coin, apply_walk, Chirality, CoinField, Field,
    GridField, Site, ValidationOptions,
};
use qwscatter::smatrix::{check_corridor, check_unitarity_tol, compute_a_with};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Validate { config } => validate(cli, config),
        Command::Smatrix {
            config,
            theta_grid,
            m,
            svg,
        } => smatrix(cli, config, *theta_grid, *m, *svg),
        Command::Eigenfunction {
            config,
            theta,
            row,
            chirality,
            method,
            figures,
        } => eigenfunction(cli, config, *theta, *row, chirality, *method, *figures),
        Command::Evolve {
            config,
            steps,
            initial,
        } => evolve_cmd(cli, config, *steps, initial.as_deref()),
        Command::Verify { config, suite } => verify_cmd(cli, config, *suite),
    }
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| cfg.out_dir())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FailureRecord {
    site: [i64; 2],
    condition: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SiteRecord {
    site: [i64; 2],
    unitarity_defect: f64,
    odd_minor: f64,
    even_minor: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationRecord {
    passed: bool,
    n0: usize,
    unitarity_tol: f64,
    minor_floor: f64,
    max_unitarity_defect: f64,
    min_minor: f64,
    failures: Vec<FailureRecord>,
    sites: Vec<SiteRecord>,
}

fn validation_record(coin: &CoinField, options: ValidationOptions) -> ValidationRecord {
    let report = validate_coin(coin, options);
    ValidationRecord {
        passed: report.passed(),
        n0: coin.n0(),
        unitarity_tol: options.unitarity_tol,
        minor_floor: options.minor_floor,
        max_unitarity_defect: report.max_unitarity_defect(),
        min_minor: report.min_minor(),
        failures: report
            .failures
            .iter()
            .map(|f| FailureRecord {
                site: [f.site.x1, f.site.x2],
                condition: f.condition.to_string(),
            })
            .collect(),
        sites: report
            .sites
            .iter()
            .map(|s| SiteRecord {
                site: [s.site.x1, s.site.x2],
                unitarity_defect: s.unitarity_defect,
                odd_minor: s.odd_minor,
                even_minor: s.even_minor,
            })
            .collect(),
    }
}

fn options(cfg: &ExperimentConfig) -> ValidationOptions {
    ValidationOptions {
        unitarity_tol: cfg.tolerances.coin_unitarity,
        minor_floor: cfg.tolerances.minor_floor,
    }
}

/// Load the config and coin and reject coins the scattering theory does not cover.
fn load_valid(path: &Path) -> Result<(ExperimentConfig, CoinField), Failure> {
    let cfg = ExperimentConfig::load(path)?;
    let coin = cfg.coin_field()?;
    let rec = validation_record(&coin, options(&cfg));
    if !rec.passed {
        let first = &rec.failures[0];
        return Err(Failure::with_code(
            EXIT_INVALID_COIN,
            format!(
                "coin fails validation at ({}, {}): {}",
                first.site[0], first.site[1], first.condition
            ),
        ));
    }
    Ok((cfg, coin))
}

fn validate(cli: &Cli, path: &Path) -> CmdResult {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(t) = cli.tol {
        cfg.tolerances.coin_unitarity = t;
    }
    let coin = cfg.coin_field()?;
    let rec = validation_record(&coin, options(&cfg));
    let dir = out_dir(cli, &cfg);
    write_json(&dir.join("validate.json"), &rec)?;
    println!("{}", serde_json::to_string(&rec).context("serializing report")?);
    if rec.passed {
        Ok(())
    } else {
        Err(Failure::with_code(
            EXIT_INVALID_COIN,
            format!("{} validation failure(s)", rec.failures.len()),
        ))
    }
}

/// Dense matrix as row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        MatrixRecord {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex64::new(re, im)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SMatrixRecord {
    pub theta: f64,
    pub m: i64,
    pub n0: i64,
    #[serde(rename = "A")]
    pub a: MatrixRecord,
    pub sigma: MatrixRecord,
    pub unitarity_defect: f64,
    pub corridor_max: f64,
    pub leakage: f64,
    pub passed: bool,
}

impl SMatrixRecord {
    /// Recompute the unitarity defect from the stored `sigma`.
    pub fn recheck_unitarity(&self) -> f64 {
        let s = self.sigma.to_matrix();
        let id = CMatrix::identity(s.nrows(), s.ncols());
        let l = (&s * s.adjoint() - &id).norm();
        let r = (s.adjoint() * &s - id).norm();
        l.max(r)
    }

    /// Recompute the largest `|A|` entry in the band that must vanish.
    pub fn recheck_corridor(&self) -> f64 {
        let a = self.a.to_matrix();
        let w = (2 * self.m + 1) as usize;
        let mut worst: f64 = 0.0;
        for i in 0..a.nrows() {
            let k = (i % w) as i64 - self.m;
            if k.abs() > self.n0 {
                for j in 0..a.ncols() {
                    worst = worst.max(a[(i, j)].norm());
                }
            }
        }
        worst
    }
}

fn smatrix(cli: &Cli, path: &Path, grid: Option<usize>, m: Option<i64>, svg: bool) -> CmdResult {
    let (cfg, coin) = load_valid(path)?;
    let thetas = match grid {
        Some(0) => return Err(Failure::with_code(crate::EXIT_USAGE, "--theta-grid must be positive")),
        Some(n) => crate::config::theta_grid(n),
        None => cfg.thetas(),
    };
    let m = m.unwrap_or(coin.n0() as i64 + 2);
    if m < 0 {
        return Err(Failure::with_code(crate::EXIT_USAGE, "--m must be nonnegative"));
    }
    let tol = cli.tol.unwrap_or(cfg.tolerances.unitarity);
    let corridor_tol = cfg.tolerances.corridor;
    let records: Vec<SMatrixRecord> = thetas
        .par_iter()
        .map(|&th| -> qwscatter::Result<SMatrixRecord> {
            let minus = assemble_boundary_system(&coin, th, Side::Minus)?;
            let block = compute_a_with(&minus, m)?;
            let u = check_unitarity_tol(&block, tol);
            let c = check_corridor(&block);
            let corridor_max = c.max_band.max(block.leakage);
            Ok(SMatrixRecord {
                theta: th,
                m,
                n0: block.n0,
                a: MatrixRecord::from_matrix(&block.a),
                sigma: MatrixRecord::from_matrix(&block.sigma),
                unitarity_defect: u.defect(),
                corridor_max,
                leakage: block.leakage,
                passed: u.passed && corridor_max <= corridor_tol,
            })
        })
        .collect::<qwscatter::Result<_>>()?;
    let dir = out_dir(cli, &cfg);
    write_json(&dir.join("smatrix.json"), &records)?;
    let mut csv = String::from("theta,unitarityDefect,corridorMax,leakage,passed\n");
    for r in &records {
        let _ = writeln!(csv, "{},{},{},{},{}", r.theta, r.unitarity_defect, r.corridor_max, r.leakage, r.passed);
    }
    write_atomic(&dir.join("smatrix_summary.csv"), csv.as_bytes())?;
    if svg {
        let dim = records.first().map_or(0, |r| r.sigma.rows);
        let series: Vec<(String, Vec<f64>)> = (0..dim)
            .map(|i| {
                let w = (2 * m + 1) as usize;
                let p = Chirality::from_index(i / w).unwrap();
                let k = (i % w) as i64 - m;
                let ys = records
                    .iter()
                    .map(|r| {
                        let [re, im] = r.sigma.data[i * r.sigma.cols + i];
                        re.hypot(im)
                    })
                    .collect();
                (format!("|sigma[{p}{k},{p}{k}]|"), ys)
            })
            .collect();
        let xs: Vec<f64> = records.iter().map(|r| r.theta).collect();
        write_atomic(
            &dir.join("smatrix_diagonal.svg"),
            svg_lines("diagonal of the scattering matrix", &xs, &series).as_bytes(),
        )?;
    }
    let worst = records.iter().map(|r| r.unitarity_defect).fold(0.0, f64::max);
    let worst_band = records.iter().map(|r| r.corridor_max).fold(0.0, f64::max);
    println!(
        "smatrix: {} quasi-energies, max unitarity defect {worst:.3e}, max corridor entry {worst_band:.3e}",
        records.len()
    );
    if records.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::with_code(
            EXIT_PROPERTY,
            format!("scattering matrix check failed (unitarity tol {tol:e}, corridor tol {corridor_tol:e})"),
        ))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MethodRecord {
    file: String,
    residual: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EigenRecord {
    theta: f64,
    row: i64,
    chirality: String,
    window: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    combinatorial: Option<MethodRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolvent: Option<MethodRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matching_constant: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matched_difference: Option<f64>,
    residual_tol: f64,
    agreement_tol: f64,
    passed: bool,
}

fn eigenfunction(
    cli: &Cli,
    path: &Path,
    theta: f64,
    row: i64,
    chirality: &str,
    method: Method,
    figures: bool,
) -> CmdResult {
    let p = Chirality::from_label(chirality)
        .ok_or_else(|| Failure::with_code(crate::EXIT_USAGE, format!("unknown chirality `{chirality}`")))?;
    if !theta.is_finite() {
        return Err(Failure::with_code(crate::EXIT_USAGE, "--theta must be finite"));
    }
    let (cfg, coin) = load_valid(path)?;
    let n0 = coin.n0() as i64;
    if row.abs() > n0 {
        return Err(Failure::with_code(
            crate::EXIT_USAGE,
            format!("--row {row} lies outside [-{n0}, {n0}]"),
        ));
    }
    let w = cfg.window();
    let dir = out_dir(cli, &cfg);
    let res_tol = cli.tol.unwrap_or(cfg.tolerances.eigen_residual);
    let agree_tol = cfg.tolerances.agreement;
    let mut rec = EigenRecord {
        theta,
        row,
        chirality: p.to_string(),
        window: w.half_width(),
        combinatorial: None,
        resolvent: None,
        matching_constant: None,
        matched_difference: None,
        residual_tol: res_tol,
        agreement_tol: agree_tol,
        passed: true,
    };
    let mut grids: Vec<(&str, GridField)> = Vec::new();
    let mut comb = None;
    if matches!(method, Method::Combinatorial | Method::Both) {
        let psi = combinatorial_eigenfunction(&coin, theta, row, p)?;
        let residual = eigen_residual(&coin, &psi, theta, w);
        let g = GridField::from_fn(w, |x| psi.eval(x));
        write_atomic(&dir.join("eigen_combinatorial.csv"), field_csv(&g).as_bytes())?;
        rec.passed &= residual <= res_tol;
        rec.combinatorial = Some(MethodRecord {
            file: "eigen_combinatorial.csv".into(),
            residual,
        });
        grids.push(("combinatorial", g.clone()));
        comb = Some(g);
    }
    let mut dist = None;
    if matches!(method, Method::Resolvent | Method::Both) {
        let phi = BoundaryVector::single(theta, p, row, Complex64::new(TAU.sqrt(), 0.0));
        let u = fpm_star(&phi, Side::Plus, &coin)?;
        let residual = eigen_residual(&coin, &u, theta, w);
        let g = GridField::from_fn(w, |x| u.eval(x));
        write_atomic(&dir.join("eigen_resolvent.csv"), field_csv(&g).as_bytes())?;
        rec.passed &= residual <= res_tol;
        rec.resolvent = Some(MethodRecord {
            file: "eigen_resolvent.csv".into(),
            residual,
        });
        grids.push(("resolvent", g.clone()));
        dist = Some(g);
    }
    if let (Some(a), Some(b)) = (&comb, &dist) {
        let incident = (n0 + 1..=w.half_width()).map(|t| Site::along(p, p.sign() * t, row));
        let kappa = matching_constant(a, b, incident);
        let diff = GridField::from_fn(w, |x| {
            let (u, v) = (a.get(x), b.get(x));
            std::array::from_fn(|k| u[k] - kappa * v[k])
        });
        let sup = diff.iter().flat_map(|(_, v)| v).map(|z| z.norm()).fold(0.0, f64::max);
        write_atomic(&dir.join("eigen_difference.csv"), field_csv(&diff).as_bytes())?;
        rec.matching_constant = Some([kappa.re, kappa.im]);
        rec.matched_difference = Some(sup);
        rec.passed &= sup <= agree_tol;
        grids.push(("difference", diff));
    }
    if figures {
        for (name, g) in &grids {
            for q in Chirality::ALL {
                write_atomic(
                    &dir.join(format!("eigen_{name}_{}.pgm", q.label())),
                    pgm_heatmap(g, q).as_bytes(),
                )?;
            }
            write_atomic(&dir.join(format!("eigen_{name}.svg")), svg_heatmap(g, 4).as_bytes())?;
        }
    }
    write_json(&dir.join("eigenfunction.json"), &rec)?;
    println!("{}", serde_json::to_string(&rec).context("serializing record")?);
    if rec.passed {
        Ok(())
    } else {
        Err(Failure::with_code(EXIT_PROPERTY, "eigenfunction check exceeded tolerance"))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EvolveRecord {
    steps: usize,
    window: i64,
    validity_radius: i64,
    truncated: bool,
    max_norm_drift: f64,
    norm_tol: f64,
    passed: bool,
}

fn evolve_cmd(cli: &Cli, path: &Path, steps: usize, initial: Option<&Path>) -> CmdResult {
    let (cfg, coin) = load_valid(path)?;
    let w = cfg.window();
    let start = match initial {
        Some(file) => {
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("reading initial field {}", file.display()))?;
            let sparse = parse_field_csv(&text)
                .with_context(|| format!("parsing initial field {}", file.display()))?;
            if let Some((x, _)) = sparse.iter().find(|(x, _)| !w.contains(*x)) {
                return Err(Failure::with_code(
                    crate::EXIT_USAGE,
                    format!("initial field has a site {x} outside the window"),
                ));
            }
            sparse.to_grid(w)
        }
        None => GridField::delta(w, Site::ORIGIN, Chirality::Left),
    };
    let norm_tol = cli.tol.unwrap_or(cfg.tolerances.norm);
    let n_start = start.norm_l2();
    let mut csv = String::from("step,l2norm,validityRadius\n");
    let mut state = start.clone();
    let mut drift: f64 = 0.0;
    for t in 0..=steps {
        if t > 0 {
            state = apply_walk(&coin, &state);
        }
        let radius = interior_validity_radius(&start, t);
        let n = state.norm_l2();
        if radius >= 0 {
            drift = drift.max((n - n_start).abs());
        }
        let _ = writeln!(csv, "{t},{n},{radius}");
    }
    debug_assert_eq!(state, evolve(&coin, &start, steps));
    let radius = interior_validity_radius(&start, steps);
    if radius < 0 {
        eprintln!(
            "qws: warning: {steps} steps exceed the interior-validity radius by {}; amplitude leaving the window is dropped",
            -radius
        );
    }
    let dir = out_dir(cli, &cfg);
    write_atomic(&dir.join("evolve_norms.csv"), csv.as_bytes())?;
    write_atomic(&dir.join("evolve_final.csv"), field_csv(&state).as_bytes())?;
    let rec = EvolveRecord {
        steps,
        window: w.half_width(),
        validity_radius: radius,
        truncated: radius < 0,
        max_norm_drift: drift,
        norm_tol,
        passed: drift <= norm_tol,
    };
    write_json(&dir.join("evolve.json"), &rec)?;
    println!("{}", serde_json::to_string(&rec).context("serializing record")?);
    if rec.passed {
        Ok(())
    } else {
        Err(Failure::with_code(EXIT_PROPERTY, "norm drifted within the validity radius"))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VerifyRecord<'a> {
    suite: verify::Suite,
    seed: u64,
    passed: bool,
    verdicts: &'a [verify::Verdict],
    #[serde(skip_serializing_if = "Option::is_none")]
    first_counterexample: Option<&'a verify::Verdict>,
}

fn verify_cmd(cli: &Cli, path: &Path, suite: verify::Suite) -> CmdResult {
    let (cfg, coin) = load_valid(path)?;
    let thetas = cfg.thetas();
    let ctx = Context {
        coin: &coin,
        thetas: &thetas,
        window: cfg.window(),
        tol: cfg.tolerances,
        seed: cli.seed,
    };
    let verdicts = verify::run(&ctx, suite)?;
    let rec = VerifyRecord {
        suite,
        seed: cli.seed,
        passed: verdicts.iter().all(|v| v.passed),
        verdicts: &verdicts,
        first_counterexample: verdicts.iter().find(|v| !v.passed),
    };
    write_json(&out_dir(cli, &cfg).join("verify.json"), &rec)?;
    println!("{}", serde_json::to_string_pretty(&rec).context("serializing verdicts")?);
    if rec.passed {
        Ok(())
    } else {
        let f = rec.first_counterexample.unwrap();
        Err(Failure::with_code(
            EXIT_PROPERTY,
            format!("property {} failed: {:.3e} > {:.3e}", f.property, f.value, f.tolerance),
        ))
    }
}
