//! Acceptance criteria 1 to 13, each checked against an oracle written here
//! rather than the library routine under test. Prints one line per criterion
//! and exits nonzero if any fails.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qwscatter::eigen::{
    build_ud, combinatorial_eigenfunction, f0, f0_star, fpm, fpm_star, spectral_radius_bound,
    ucp_defect, BoundaryVector,
};
use qwscatter::green::{apply_r, apply_r0, green0, GreenKernel, Side};
use qwscatter::lattice::{norms, Amp4, Chirality, CoinField, Field, Site, SparseField, Window, ZERO4};
use qwscatter::smatrix::compute_a;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::sync::Mutex;
use std::time::{Duration, Instant};

type C = Complex64;

fn cis(a: f64) -> C {
    C::from_polar(1.0, a)
}

/// Hand-written walk operators, independent of the library's `ops`.
mod oracle {
    use super::*;

    /// Site the shift reads chirality `k` from.
    pub fn source(x: Site, k: usize) -> Site {
        match k {
            0 => Site::new(x.x1 + 1, x.x2),
            1 => Site::new(x.x1 - 1, x.x2),
            2 => Site::new(x.x1, x.x2 + 1),
            _ => Site::new(x.x1, x.x2 - 1),
        }
    }

    pub fn shift(u: &dyn Field, x: Site) -> Amp4 {
        std::array::from_fn(|k| u.eval(source(x, k))[k])
    }

    /// `(S C u)(x)`, reading the coin straight from its stored matrices.
    pub fn walk(c: &CoinField, u: &dyn Field, x: Site) -> Amp4 {
        std::array::from_fn(|k| {
            let y = source(x, k);
            let m = c.at(y);
            let v = u.eval(y);
            (0..4).map(|j| m[(k, j)] * v[j]).sum()
        })
    }

    /// `sup_k |(W u)_k(x) - e^{iθ} u_k(x) - f_k(x)|` at one site.
    pub fn gap(w: Amp4, u: Amp4, theta: f64, f: Amp4) -> f64 {
        let e = cis(theta);
        (0..4).map(|k| (w[k] - e * u[k] - f[k]).norm()).fold(0.0, f64::max)
    }

    /// Closed form of the free kernel, written from the one-dimensional
    /// geometric series along each chirality's line.
    pub fn kernel(x: Site, k: usize, theta: f64, plus: bool) -> C {
        let (along, across, sign) = match k {
            0 => (x.x1, x.x2, 1),
            1 => (x.x1, x.x2, -1),
            2 => (x.x2, x.x1, 1),
            _ => (x.x2, x.x1, -1),
        };
        if across != 0 {
            return C::new(0.0, 0.0);
        }
        let n = sign * along;
        match (plus, n >= 1) {
            (true, true) => cis(theta * (n - 1) as f64),
            (false, false) => -cis(theta * (n - 1) as f64),
            _ => C::new(0.0, 0.0),
        }
    }

    /// `B₋`: keep Left/Down on the nonpositive half and Right/Up on the nonnegative half.
    pub fn outgoing_cut(x: Site, v: Amp4) -> Amp4 {
        let keep = [x.x1 <= 0, x.x1 >= 0, x.x2 <= 0, x.x2 >= 0];
        std::array::from_fn(|k| if keep[k] { v[k] } else { C::new(0.0, 0.0) })
    }

    /// `χ U χ*` on the box `|x| <= n`, indexed by (site lexicographic, chirality).
    pub fn box_compression(c: &CoinField, n: i64) -> (DMatrix<C>, Vec<(Site, usize)>) {
        let mut labels = Vec::new();
        for a in -n..=n {
            for b in -n..=n {
                for k in 0..4 {
                    labels.push((Site::new(a, b), k));
                }
            }
        }
        let index = |x: Site, k: usize| -> Option<usize> {
            (x.x1.abs() <= n && x.x2.abs() <= n)
                .then(|| (((x.x1 + n) * (2 * n + 1) + (x.x2 + n)) as usize) * 4 + k)
        };
        let dim = labels.len();
        let mut m = DMatrix::from_element(dim, dim, C::new(0.0, 0.0));
        for (i, &(x, k)) in labels.iter().enumerate() {
            let y = source(x, k);
            let coin = c.at(y);
            for j in 0..4 {
                if let Some(col) = index(y, j) {
                    m[(i, col)] += coin[(k, j)];
                }
            }
        }
        (m, labels)
    }

    /// `min_{k <= max} ||M^k||_2^{1/k}`, and the first power that is exactly zero.
    pub fn gelfand(m: &DMatrix<C>, max: usize) -> (f64, Option<usize>) {
        let mut p = m.clone();
        let mut best = f64::INFINITY;
        for k in 1..=max {
            if p.iter().all(|z| *z == C::new(0.0, 0.0)) {
                return (0.0, Some(k));
            }
            let s = p.clone().singular_values().max();
            best = best.min(s.powf(1.0 / k as f64));
            p = &p * m;
        }
        (best, None)
    }

    /// Least-squares `κ` with `a ≈ κ b` on the listed components.
    pub fn match_amplitude(a: &[C], b: &[C]) -> C {
        let num: C = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        num / den
    }
}

fn window_sites(l: i64) -> impl Iterator<Item = Site> {
    (-l..=l).flat_map(move |a| (-l..=l).map(move |b| Site::new(a, b)))
}

fn random_source(rng: &mut ChaCha8Rng, radius: i64, count: usize) -> SparseField {
    (0..count)
        .map(|_| {
            let x = Site::new(rng.gen_range(-radius..=radius), rng.gen_range(-radius..=radius));
            let v = std::array::from_fn(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            (x, v)
        })
        .collect()
}

fn thetas(n: usize) -> Vec<f64> {
    // offset samples generic points rather than the CLI grid 2πk/n
    (0..n).map(|k| TAU * (k as f64 + 0.37) / n as f64).collect()
}

fn example_coins(sizes: &[usize]) -> Vec<(String, CoinField)> {
    let mut out = Vec::new();
    for name in ["example1", "example2"] {
        for &n in sizes {
            out.push((format!("{name}/n0={n}"), CoinField::builtin(name, n).unwrap()));
        }
    }
    out
}

fn channels(n: i64) -> Vec<(Chirality, i64)> {
    Chirality::ALL
        .into_iter()
        .flat_map(|p| (-n..=n).map(move |b| (p, b)))
        .collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() || b > a { b } else { a })
}

struct Outcome {
    passed: bool,
    summary: String,
}

fn check(value: f64, tol: f64, what: &str) -> Outcome {
    Outcome {
        passed: value <= tol,
        summary: format!("{what} {value:.3e} (tol {tol:.0e})"),
    }
}

fn fundamental_solution() -> Outcome {
    let l = 40;
    let ths = thetas(32);
    let worst = max_of(ths.par_iter().map(|&th| {
        let mut w: f64 = 0.0;
        for side in [Side::Plus, Side::Minus] {
            let plus = side == Side::Plus;
            for p in Chirality::ALL {
                let k = p.index();
                let col = GreenKernel::new(th, side).column(Site::ORIGIN, p);
                for x in window_sites(l) {
                    let mut delta = ZERO4;
                    if x == Site::ORIGIN {
                        delta[k] = C::new(1.0, 0.0);
                    }
                    w = w.max(oracle::gap(oracle::shift(&col, x), col.eval(x), th, delta));
                    // the materialized kernel is the closed form
                    let g = green0(x, th, side);
                    for (j, gj) in g.iter().enumerate() {
                        w = w.max((gj - oracle::kernel(x, j, th, plus)).norm());
                    }
                }
            }
        }
        w
    }).collect::<Vec<_>>());
    check(worst, 1e-12, "max |(U0 - e^{iθ})G0 e_p - δ e_p|")
}

fn free_resolvent() -> Outcome {
    let l = 40;
    let worst = max_of((0..50u64).into_par_iter().map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let th = rng.gen_range(0.0..TAU);
        let f = random_source(&mut rng, 6, 1 + (i as usize % 8));
        let mut w: f64 = 0.0;
        for side in [Side::Plus, Side::Minus] {
            let r = apply_r0(&f, th, side);
            for x in window_sites(l) {
                w = w.max(oracle::gap(oracle::shift(&r, x), r.eval(x), th, f.get(x)));
            }
        }
        w
    }).collect::<Vec<_>>());
    check(worst, 1e-12, "max residual over 50 sources")
}

fn perturbed_resolvent() -> Outcome {
    let coins = example_coins(&[1, 2]);
    let ths = thetas(16);
    let jobs: Vec<(usize, usize)> = (0..coins.len()).flat_map(|c| (0..ths.len()).map(move |t| (c, t))).collect();
    let worst = max_of(jobs.par_iter().map(|&(ci, ti)| {
        let c = &coins[ci].1;
        let th = ths[ti];
        let mut rng = ChaCha8Rng::seed_from_u64((ci * 100 + ti) as u64);
        let l = c.n0() as i64 + 8;
        let mut w: f64 = 0.0;
        for side in [Side::Plus, Side::Minus] {
            let f = random_source(&mut rng, c.n0() as i64 + 2, 6);
            let r = apply_r(c, &f, th, side).unwrap();
            for x in window_sites(l) {
                w = w.max(oracle::gap(oracle::walk(c, &r, x), r.eval(x), th, f.get(x)));
            }
        }
        w
    }).collect::<Vec<_>>());
    check(worst, 1e-10, "max residual, 4 coins x 16 θ x both sides")
}

fn eigen_residuals() -> Outcome {
    let coins = example_coins(&[1, 2]);
    let ths = thetas(8);
    let jobs: Vec<(usize, usize)> = (0..coins.len()).flat_map(|c| (0..ths.len()).map(move |t| (c, t))).collect();
    let worst = max_of(jobs.par_iter().map(|&(ci, ti)| {
        let c = &coins[ci].1;
        let th = ths[ti];
        let n = c.n0() as i64;
        let l = n + 20;
        let mut w: f64 = 0.0;
        for (p, b) in channels(n) {
            let comb = combinatorial_eigenfunction(c, th, b, p).unwrap();
            let phi = BoundaryVector::single(th, p, b, C::new(TAU.sqrt(), 0.0));
            let dist = fpm_star(&phi, Side::Plus, c).unwrap();
            for x in window_sites(l) {
                w = w.max(oracle::gap(oracle::walk(c, &comb, x), comb.eval(x), th, ZERO4));
                w = w.max(oracle::gap(oracle::walk(c, &dist, x), dist.eval(x), th, ZERO4));
            }
        }
        w
    }).collect::<Vec<_>>());
    check(worst, 1e-10, "max |(U - e^{iθ})u|, both constructions, all channels")
}

fn cross_agreement() -> Outcome {
    let coins = example_coins(&[1, 2]);
    let ths = thetas(8);
    let jobs: Vec<(usize, usize)> = (0..coins.len()).flat_map(|c| (0..ths.len()).map(move |t| (c, t))).collect();
    let results: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(ci, ti)| {
            let c = &coins[ci].1;
            let th = ths[ti];
            let n = c.n0() as i64;
            let l = n + 20;
            let mut gap: f64 = 0.0;
            let mut kappa_dev: f64 = 0.0;
            for (p, b) in channels(n) {
                let comb = combinatorial_eigenfunction(c, th, b, p).unwrap();
                let phi = BoundaryVector::single(th, p, b, C::new(TAU.sqrt(), 0.0));
                let dist = fpm_star(&phi, Side::Plus, c).unwrap();
                // match on the incident half-line of the incoming channel
                let line: Vec<Site> = (n + 1..=l).map(|t| Site::along(p, p.sign() * t, b)).collect();
                let a: Vec<C> = line.iter().map(|&x| comb.eval(x)[p.index()]).collect();
                let d: Vec<C> = line.iter().map(|&x| dist.eval(x)[p.index()]).collect();
                let kappa = oracle::match_amplitude(&a, &d);
                kappa_dev = kappa_dev.max((kappa - 1.0).norm());
                for x in window_sites(l) {
                    let (u, v) = (comb.eval(x), dist.eval(x));
                    for k in 0..4 {
                        gap = gap.max((u[k] - kappa * v[k]).norm());
                    }
                }
            }
            (gap, kappa_dev)
        })
        .collect();
    let gap = max_of(results.iter().map(|r| r.0));
    let dev = max_of(results.iter().map(|r| r.1));
    let mut o = check(gap, 1e-8, "max matched difference");
    o.summary.push_str(&format!(", max |κ - 1| {dev:.1e}"));
    o
}

fn smatrix_unitarity() -> Outcome {
    let coins = example_coins(&[1, 2]);
    let ths = thetas(32);
    let jobs: Vec<(usize, usize)> = (0..coins.len()).flat_map(|c| (0..ths.len()).map(move |t| (c, t))).collect();
    let results: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(ci, ti)| {
            let c = &coins[ci].1;
            let th = ths[ti];
            let n = c.n0() as i64;
            let block = compute_a(c, th, n + 2).unwrap();
            let s = &block.sigma;
            let id = DMatrix::<C>::identity(s.nrows(), s.ncols());
            let defect = (s * s.adjoint() - &id).norm().max((s.adjoint() * s - &id).norm());
            // second route: read the matrix off the far field of the
            // resolvent-free construction
            let w = (2 * block.m + 1) as usize;
            let mut far: f64 = 0.0;
            for (p, b) in channels(n) {
                let psi = combinatorial_eigenfunction(c, th, b, p).unwrap();
                let col = p.index() * w + (b + block.m) as usize;
                for q in Chirality::ALL {
                    for k in -block.m..=block.m {
                        let t = -q.sign() * (n + 5);
                        let x = Site::along(q, t, k);
                        let amp = psi.eval(x)[q.index()] * cis(-th * (q.sign() * t) as f64);
                        let row = q.index() * w + (k + block.m) as usize;
                        far = far.max((amp - s[(row, col)]).norm());
                    }
                }
            }
            (defect, far)
        })
        .collect();
    let defect = max_of(results.iter().map(|r| r.0));
    let far = max_of(results.iter().map(|r| r.1));
    Outcome {
        passed: defect <= 1e-10 && far <= 1e-8,
        summary: format!(
            "max Frobenius defect {defect:.3e} (tol 1e-10), far-field route gap {far:.3e} (tol 1e-8)"
        ),
    }
}

fn corridor() -> Outcome {
    let coins = example_coins(&[1, 2]);
    let ths = thetas(32);
    let worst = max_of(coins.iter().flat_map(|(_, c)| {
        let n = c.n0() as i64;
        ths.par_iter()
            .map(|&th| {
                let block = compute_a(c, th, n + 2).unwrap();
                let w = (2 * block.m + 1) as usize;
                let mut band: f64 = block.leakage;
                for i in 0..block.a.nrows() {
                    let k = (i % w) as i64 - block.m;
                    if k.abs() > n {
                        for j in 0..block.a.ncols() {
                            band = band.max(block.a[(i, j)].norm().max(block.a[(j, i)].norm()));
                        }
                    }
                }
                band
            })
            .collect::<Vec<_>>()
    }).collect::<Vec<_>>());
    check(worst, 1e-12, "max |A| in the band |k| >= n0 + 1")
}

fn identity_degeneracy() -> Outcome {
    let c = CoinField::identity(1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for th in thetas(8) {
        let f = random_source(&mut rng, 3, 5);
        for side in [Side::Plus, Side::Minus] {
            let r = apply_r(&c, &f, th, side).unwrap();
            let r0 = apply_r0(&f, th, side);
            for x in window_sites(10) {
                let (a, b) = (r.eval(x), r0.eval(x));
                for k in 0..4 {
                    worst = worst.max((a[k] - b[k]).norm());
                }
            }
            let (fp, ff) = (fpm(&f, th, side, &c).unwrap(), f0(&f, th));
            worst = worst.max(fp.sub(&ff).norm());
        }
        let block = compute_a(&c, th, 3).unwrap();
        let id = DMatrix::<C>::identity(block.dim(), block.dim());
        worst = worst.max(block.a.norm()).max((&block.sigma - id).norm());
    }
    check(worst, 1e-13, "max deviation of R, F±, A, Σ̂ from the free objects")
}

fn stone_identity() -> Outcome {
    let coins = example_coins(&[1, 2]);
    let mut worst: f64 = 0.0;
    for (ci, (_, c)) in coins.iter().enumerate() {
        let n = c.n0() as i64;
        let grid = Window::new(n as usize + 4);
        let mut rng = ChaCha8Rng::seed_from_u64(900 + ci as u64);
        for _ in 0..20 {
            let th = rng.gen_range(0.0..TAU);
            let f = random_source(&mut rng, n + 3, 5);
            let g = random_source(&mut rng, n + 3, 5);
            let scale = norms(&f.to_grid(grid), &[]).b_norm * norms(&g.to_grid(grid), &[]).b_norm;
            let rp = apply_r(c, &f, th, Side::Plus).unwrap();
            let rm = apply_r(c, &f, th, Side::Minus).unwrap();
            // (u, g) = Σ u · conj(g)
            let lhs: C = g
                .iter()
                .map(|(x, gx)| {
                    let (a, b) = (rp.eval(x), rm.eval(x));
                    (0..4).map(|k| (a[k] - b[k]) * gx[k].conj()).sum::<C>()
                })
                .sum();
            for side in [Side::Plus, Side::Minus] {
                let ff = fpm(&f, th, side, c).unwrap();
                let fg = fpm(&g, th, side, c).unwrap();
                let inner: C = ff.iter().map(|(p, k, v)| v * fg.get(p, k).conj()).sum();
                let rhs = TAU * cis(-th) * inner;
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
    }
    check(worst, 1e-10, "max |lhs - rhs| / (|f|_B |g|_B) over 20 pairs per coin, F+ and F-")
}

/// Oracle Gelfand bound for a coin, computed once and shared by criteria 10 and 11.
fn oracle_bound(name: &str, c: &CoinField) -> f64 {
    static CACHE: Mutex<Vec<(String, f64)>> = Mutex::new(Vec::new());
    if let Some((_, b)) = CACHE.lock().unwrap().iter().find(|(n, _)| n == name) {
        return *b;
    }
    let (m, _) = oracle::box_compression(c, c.extent() as i64);
    let (bound, _) = oracle::gelfand(&m, 512);
    CACHE.lock().unwrap().push((name.to_string(), bound));
    bound
}

fn contraction() -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for (name, c) in example_coins(&[1, 2]) {
        let n = c.extent() as i64;
        let (m, labels) = oracle::box_compression(&c, n);
        // the library's matrix must be the same operator
        let ud = build_ud(&c);
        let mut same: f64 = 0.0;
        for (i, &(x, k)) in labels.iter().enumerate() {
            for (j, &(y, q)) in labels.iter().enumerate() {
                let li = ud.index(x, Chirality::from_index(k).unwrap()).unwrap();
                let lj = ud.index(y, Chirality::from_index(q).unwrap()).unwrap();
                same = same.max((ud.matrix()[(li, lj)] - m[(i, j)]).norm());
            }
        }
        let bound = oracle_bound(&name, &c);
        let lib = spectral_radius_bound(&ud, 512).map(|b| b.bound).unwrap_or(f64::NAN);
        let ok = bound < 1.0 - 1e-6 && same == 0.0 && (lib - bound).abs() < 1e-9;
        passed &= ok;
        lines.push(format!("{name} {bound:.6}{}", if ok { "" } else { " (mismatch)" }));
    }
    for n0 in [1usize, 2] {
        let c = CoinField::identity(n0);
        let (m, _) = oracle::box_compression(&c, n0 as i64);
        let (bound, zero_at) = oracle::gelfand(&m, 512);
        // U_D^k vanishes first at k = 2 n0 + 1
        passed &= bound == 0.0 && zero_at == Some(2 * n0 + 1);
        lines.push(format!("identity/n0={n0} nilpotent at k={}", zero_at.map_or(0, |k| k)));
    }
    Outcome {
        passed,
        summary: format!("Gelfand bounds: {}", lines.join(", ")),
    }
}

/// Geometric rate over the second half of the steps that stay 1e10 above the floor.
fn decay_rate(errs: &[f64]) -> Option<f64> {
    let cutoff = errs[1] * 1e-10;
    let last = (1..errs.len()).rev().find(|&t| errs[t] > cutoff)?;
    let first = last / 2;
    (last >= 8).then(|| (errs[last] / errs[first]).powf(1.0 / (last - first) as f64))
}

fn finite_time_convergence() -> Outcome {
    let mut excess: f64 = f64::NEG_INFINITY;
    let mut passed = true;
    for (name, c) in example_coins(&[1, 2]) {
        let bound = oracle_bound(&name, &c);
        for th in thetas(4) {
            for (p, b) in channels(c.n0() as i64) {
                let psi = combinatorial_eigenfunction(&c, th, b, p).unwrap();
                let errs = psi.finite_time_errors(800);
                match decay_rate(&errs) {
                    Some(rate) => {
                        excess = excess.max(rate - bound);
                        passed &= rate <= bound + 1e-3;
                    }
                    None => passed = false,
                }
            }
        }
    }
    Outcome {
        passed,
        summary: format!("max (observed rate - Gelfand bound) {excess:+.3e} (tol +1e-3)"),
    }
}

fn unique_continuation() -> Outcome {
    let mut worst: f64 = 0.0;
    for (_, c) in example_coins(&[1, 2]) {
        let n = c.n0() as i64;
        let l = n + 10;
        let interior: Vec<Site> = window_sites(l - 1).collect();
        for th in thetas(4) {
            for (p, b) in channels(n) {
                let psi = combinatorial_eigenfunction(&c, th, b, p).unwrap();
                worst = worst.max(ucp_defect(&c, &psi, th, interior.iter().copied()).unwrap());
                let phi = BoundaryVector::single(th, p, b, C::new(TAU.sqrt(), 0.0));
                let u = fpm_star(&phi, Side::Plus, &c).unwrap();
                worst = worst.max(ucp_defect(&c, &u, th, interior.iter().copied()).unwrap());
            }
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let mut rejected = Vec::new();
    for name in ["grover", "fourier"] {
        let cfg = dir.path().join(format!("{name}.json"));
        std::fs::write(&cfg, format!(r#"{{"coin": {{"n0": 1, "builtin": "{name}"}}}}"#)).unwrap();
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_qws"))
            .arg("validate")
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap()
            .status;
        rejected.push((name, status.code()));
    }
    let all_rejected = rejected.iter().all(|(_, code)| *code == Some(2));
    Outcome {
        passed: worst <= 1e-10 && all_rejected,
        summary: format!(
            "max reconstruction gap {worst:.3e} (tol 1e-10), validator exit codes {}",
            rejected
                .iter()
                .map(|(n, c)| format!("{n}={}", c.map_or("none".into(), |c| c.to_string())))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    }
}

fn radiation() -> Outcome {
    let mut scattered: f64 = 0.0;
    let mut control = f64::INFINITY;
    for (_, c) in example_coins(&[1, 2]) {
        let n = c.n0() as i64;
        let l = n + 20;
        for th in thetas(4) {
            for (p, b) in channels(n) {
                let phi = BoundaryVector::single(th, p, b, C::new(TAU.sqrt(), 0.0));
                let u = fpm_star(&phi, Side::Plus, &c).unwrap();
                let plane = f0_star(&phi);
                let mut bare: f64 = 0.0;
                for x in window_sites(l).filter(|x| x.sup_norm() >= n + 2) {
                    let v = qwscatter::lattice::FnField::new(|y: Site| {
                        let (a, z) = (u.eval(y), plane.eval(y));
                        std::array::from_fn(|k| a[k] - z[k])
                    });
                    let cut = oracle::outgoing_cut(x, oracle::shift(&v, x));
                    scattered = scattered.max(oracle::gap(cut, v.eval(x), th, ZERO4));
                    let cut = oracle::outgoing_cut(x, oracle::shift(&plane, x));
                    bare = bare.max(oracle::gap(cut, plane.eval(x), th, ZERO4));
                }
                control = control.min(bare);
            }
        }
    }
    Outcome {
        passed: scattered <= 1e-12 && control >= 0.1,
        summary: format!(
            "max residual of v(+) {scattered:.3e} (tol 1e-12), min plane-wave residual {control:.3} (need >= 0.1)"
        ),
    }
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "fundamental solution", limit: Some(Duration::from_secs(5)), run: fundamental_solution },
        Criterion { id: 2, name: "free resolvent equation", limit: Some(Duration::from_secs(5)), run: free_resolvent },
        Criterion { id: 3, name: "perturbed resolvent", limit: Some(Duration::from_secs(30)), run: perturbed_resolvent },
        Criterion { id: 4, name: "eigenfunction residual", limit: Some(Duration::from_secs(60)), run: eigen_residuals },
        Criterion { id: 5, name: "cross-construction agreement", limit: None, run: cross_agreement },
        Criterion { id: 6, name: "scattering matrix unitarity", limit: None, run: smatrix_unitarity },
        Criterion { id: 7, name: "corridor band vanishes", limit: None, run: corridor },
        Criterion { id: 8, name: "identity-coin degeneracy", limit: None, run: identity_degeneracy },
        Criterion { id: 9, name: "Stone-type identity", limit: None, run: stone_identity },
        Criterion { id: 10, name: "box compression contracts", limit: None, run: contraction },
        Criterion { id: 11, name: "finite-time convergence", limit: None, run: finite_time_convergence },
        Criterion { id: 12, name: "unique continuation", limit: None, run: unique_continuation },
        Criterion { id: 13, name: "radiation residual", limit: None, run: radiation },
    ];
    let total = Instant::now();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        let in_time = c.limit.is_none_or(|l| elapsed <= l);
        let ok = out.passed && in_time;
        if !ok {
            failed += 1;
        }
        let limit = c.limit.map_or(String::new(), |l| format!(", limit {}s", l.as_secs()));
        println!(
            "criterion {:>2} {} {}: {} [{:.2}s{limit}]",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            out.summary,
            elapsed.as_secs_f64()
        );
    }
    let total = total.elapsed();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s (target 180s)",
        criteria.len() - failed,
        criteria.len(),
        total.as_secs_f64()
    );
    if failed > 0 || total > Duration::from_secs(180) {
        std::process::exit(1);
    }
}
