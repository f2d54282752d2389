//! Property suites run by `qws verify`.

use crate::config::Tolerances;
use anyhow::Result;
use num_complex::Complex64;
use qwscatter::eigen::{
    build_ud, combinatorial_eigenfunction_with, eigen_residual, fpm_star_with, fpm_with,
    matching_constant, observed_decay_rate, spectral_radius_bound, ucp_defect, BoundaryVector,
};
use qwscatter::green::{apply_r0, assemble_boundary_system, green0, GreenKernel, Side};
use qwscatter::lattice::{
    free_walk_at, norms, phase, radiation_residual, walk_at, Chirality, CoinField, Field,
    RadiationSign, Site, SparseField, Window,
};
use qwscatter::smatrix::{
    channel_amplitudes, check_corridor, check_unitarity_tol, compute_a_with, scattered_wave_with,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Kernels,
    Resolvents,
    Eigen,
    Smatrix,
    All,
}

impl Suite {
    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Kernels, Suite::Resolvents, Suite::Eigen, Suite::Smatrix],
            s => vec![s],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub suite: Suite,
    pub property: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub tolerance: f64,
    /// Where the worst value occurred; present only on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

/// Running maximum together with the inputs that produced it.
struct Worst {
    value: f64,
    at: Value,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            at: Value::Null,
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> Value) {
        // NaN always wins so it surfaces as a failure
        if value.is_nan() || value > self.value {
            self.value = value;
            self.at = at();
        }
    }

    fn merge(mut self, other: Worst) -> Worst {
        self.update(other.value, || other.at);
        self
    }

    fn verdict(self, suite: Suite, property: &str, tolerance: f64) -> Verdict {
        let passed = self.value <= tolerance;
        Verdict {
            suite,
            property: property.to_string(),
            passed,
            value: self.value,
            tolerance,
            counterexample: (!passed).then_some(self.at),
        }
    }
}

fn fold_worst(items: Vec<Worst>) -> Worst {
    items.into_iter().fold(Worst::new(), Worst::merge)
}

pub struct Context<'a> {
    pub coin: &'a CoinField,
    pub thetas: &'a [f64],
    pub window: Window,
    pub tol: Tolerances,
    pub seed: u64,
}

impl Context<'_> {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn extent(&self) -> i64 {
        self.coin.extent() as i64
    }

    fn random_source(&self, rng: &mut ChaCha8Rng) -> SparseField {
        let r = self.extent() + 2;
        (0..6)
            .map(|_| {
                let x = Site::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
                let v = std::array::from_fn(|_| {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                (x, v)
            })
            .collect()
    }

    fn channels(&self) -> Vec<(Chirality, i64)> {
        let n = self.extent();
        Chirality::ALL
            .into_iter()
            .flat_map(|p| (-n..=n).map(move |b| (p, b)))
            .collect()
    }
}

fn sides() -> [Side; 2] {
    [Side::Plus, Side::Minus]
}

fn sup_gap(lhs: [Complex64; 4], rhs: [Complex64; 4]) -> f64 {
    (0..4).map(|k| (lhs[k] - rhs[k]).norm()).fold(0.0, f64::max)
}

fn kernels(ctx: &Context) -> Vec<Verdict> {
    let w = ctx.window;
    let fundamental = fold_worst(
        ctx.thetas
            .par_iter()
            .map(|&th| {
                let mut worst = Worst::new();
                let e = phase(th);
                for side in sides() {
                    for p in Chirality::ALL {
                        let col = GreenKernel::new(th, side).column(Site::ORIGIN, p);
                        for x in w.sites() {
                            let s = free_walk_at(&col, x);
                            let u = col.eval(x);
                            let mut target = [Complex64::new(0.0, 0.0); 4];
                            if x == Site::ORIGIN {
                                target[p.index()] = Complex64::new(1.0, 0.0);
                            }
                            let lhs = std::array::from_fn(|k| s[k] - e * u[k]);
                            let r = sup_gap(lhs, target);
                            worst.update(r, || json!({"theta": th, "side": side.label(), "chirality": p.to_string(), "site": [x.x1, x.x2]}));
                        }
                    }
                }
                worst
            })
            .collect(),
    );
    let free = fold_worst(
        ctx.thetas
            .par_iter()
            .enumerate()
            .map(|(i, &th)| {
                let mut rng = ctx.rng(100 + i as u64);
                let mut worst = Worst::new();
                let e = phase(th);
                for side in sides() {
                    let f = ctx.random_source(&mut rng);
                    let r = apply_r0(&f, th, side);
                    for x in w.sites() {
                        let s = free_walk_at(&r, x);
                        let u = r.eval(x);
                        let lhs = std::array::from_fn(|k| s[k] - e * u[k]);
                        let v = sup_gap(lhs, f.get(x));
                        worst.update(v, || json!({"theta": th, "side": side.label(), "site": [x.x1, x.x2]}));
                    }
                }
                worst
            })
            .collect(),
    );
    let mut symmetry = Worst::new();
    for &th in ctx.thetas {
        for x in Window::new(6).sites() {
            for side in sides() {
                let g = green0(x, th, side);
                let gm = green0(-x, th, side);
                let v = (g[1] - gm[0]).norm().max((g[3] - gm[2]).norm());
                symmetry.update(v, || json!({"theta": th, "site": [x.x1, x.x2]}));
            }
        }
    }
    vec![
        fundamental.verdict(Suite::Kernels, "fundamental_solution", ctx.tol.kernel),
        free.verdict(Suite::Kernels, "free_resolvent_inverse", ctx.tol.kernel),
        symmetry.verdict(Suite::Kernels, "kernel_reflection_symmetry", 0.0),
    ]
}

fn resolvents(ctx: &Context) -> Result<Vec<Verdict>> {
    let c = ctx.coin;
    let w = Window::new((ctx.extent() as usize + 6).min(ctx.window.half_width() as usize));
    let per_theta: Vec<Result<[Worst; 3]>> = ctx
        .thetas
        .par_iter()
        .enumerate()
        .map(|(i, &th)| {
            let mut rng = ctx.rng(200 + i as u64);
            let plus = assemble_boundary_system(c, th, Side::Plus)?;
            let minus = assemble_boundary_system(c, th, Side::Minus)?;
            let e = phase(th);
            let mut residual = Worst::new();
            let mut stone = Worst::new();
            let mut adjoint = Worst::new();
            for sys in [&plus, &minus] {
                let f = ctx.random_source(&mut rng);
                let r = sys.apply(&f)?;
                for x in w.sites() {
                    let u = walk_at(c, &r, x);
                    let v = r.eval(x);
                    let lhs = std::array::from_fn(|k| u[k] - e * v[k]);
                    let d = sup_gap(lhs, f.get(x));
                    residual.update(d, || json!({"theta": th, "side": sys.side().label(), "site": [x.x1, x.x2]}));
                }
            }
            let f = ctx.random_source(&mut rng);
            let g = ctx.random_source(&mut rng);
            let big = Window::new(ctx.extent() as usize + 3);
            let scale = norms(&f.to_grid(big), &[]).b_norm * norms(&g.to_grid(big), &[]).b_norm;
            let rp = plus.apply(&f)?;
            let rm = minus.apply(&f)?;
            let lhs = g.pair_with(&rp) - g.pair_with(&rm);
            for sys in [&plus, &minus] {
                let ff = fpm_with(sys, &f)?;
                let fg = fpm_with(sys, &g)?;
                let rhs = TAU * phase(-th) * ff.inner(&fg);
                stone.update((lhs - rhs).norm() / scale, || json!({"theta": th, "side": sys.side().label()}));
            }
            // (R(θ+i0) f, g) = (f, -e^{iθ} U R(θ-i0) g)
            let rg = minus.apply(&g)?;
            let rhs: Complex64 = f
                .iter()
                .map(|(x, fx)| {
                    let u = walk_at(c, &rg, x);
                    (0..4).map(|k| fx[k] * (-e * u[k]).conj()).sum::<Complex64>()
                })
                .sum();
            adjoint.update((g.pair_with(&rp) - rhs).norm(), || json!({"theta": th}));
            Ok([residual, stone, adjoint])
        })
        .collect();
    let mut acc = [Worst::new(), Worst::new(), Worst::new()];
    for item in per_theta {
        for (a, b) in acc.iter_mut().zip(item?) {
            let cur = std::mem::replace(a, Worst::new());
            *a = cur.merge(b);
        }
    }
    let [residual, stone, adjoint] = acc;
    Ok(vec![
        residual.verdict(Suite::Resolvents, "perturbed_resolvent_inverse", ctx.tol.resolvent),
        stone.verdict(Suite::Resolvents, "stone_identity", ctx.tol.resolvent),
        adjoint.verdict(Suite::Resolvents, "adjoint_relation", ctx.tol.resolvent),
    ])
}

fn eigen(ctx: &Context) -> Result<Vec<Verdict>> {
    let c = ctx.coin;
    let n = ctx.extent();
    let w = ctx.window;
    let ud = build_ud(c);
    let (bound, bound_verdict) = match spectral_radius_bound(&ud, 512) {
        Ok(b) => (b.bound, Worst { value: 0.0, at: Value::Null }),
        Err(e) => (
            1.0,
            Worst {
                value: 1.0,
                at: json!({"error": e.to_string()}),
            },
        ),
    };
    let per_theta: Vec<Result<[Worst; 6]>> = ctx
        .thetas
        .par_iter()
        .map(|&th| {
            let minus = assemble_boundary_system(c, th, Side::Minus)?;
            let plus = assemble_boundary_system(c, th, Side::Plus)?;
            let mut res_fourier = Worst::new();
            let mut res_comb = Worst::new();
            let mut agree = Worst::new();
            let mut ucp = Worst::new();
            let mut radiation = Worst::new();
            let mut decay = Worst::new();
            for (p, b) in ctx.channels() {
                let at = || json!({"theta": th, "chirality": p.to_string(), "row": b});
                let phi = BoundaryVector::single(th, p, b, Complex64::new(TAU.sqrt(), 0.0));
                let u = fpm_star_with(&minus, &phi)?;
                res_fourier.update(eigen_residual(c, &u, th, w), at);
                let v = fpm_star_with(&plus, &phi)?;
                res_fourier.update(eigen_residual(c, &v, th, w), at);
                let psi = combinatorial_eigenfunction_with(c, ud.clone(), th, b, p)?;
                res_comb.update(eigen_residual(c, &psi, th, w), at);
                let incident = (n + 1..=w.half_width()).map(|t| Site::along(p, p.sign() * t, b));
                let kappa = matching_constant(&psi, &u, incident);
                let mut gap: f64 = 0.0;
                for x in w.sites() {
                    let (a, d) = (psi.eval(x), u.eval(x));
                    for k in 0..4 {
                        gap = gap.max((a[k] - kappa * d[k]).norm());
                    }
                }
                agree.update(gap, || json!({"theta": th, "chirality": p.to_string(), "row": b, "kappa": [kappa.re, kappa.im]}));
                ucp.update(ucp_defect(c, &psi, th, c.sites())?, at);
                let rad = radiation_residual(u.scattered(), th, RadiationSign::Minus, n + 2, w);
                radiation.update(rad.sup, at);
                // finite-time iterates approach the limit at the contraction rate
                if bound > 0.0 {
                    let errs = psi.finite_time_errors(600);
                    if let Some(rate) = observed_decay_rate(&errs, 1e-10) {
                        decay.update((rate - bound).max(0.0), || json!({"theta": th, "chirality": p.to_string(), "row": b, "rate": rate, "bound": bound}));
                    }
                }
            }
            Ok([res_fourier, res_comb, agree, ucp, radiation, decay])
        })
        .collect();
    let mut acc: [Worst; 6] = std::array::from_fn(|_| Worst::new());
    for item in per_theta {
        for (a, b) in acc.iter_mut().zip(item?) {
            let cur = std::mem::replace(a, Worst::new());
            *a = cur.merge(b);
        }
    }
    let [res_fourier, res_comb, agree, ucp, radiation, decay] = acc;
    Ok(vec![
        res_fourier.verdict(Suite::Eigen, "distorted_plane_wave_residual", ctx.tol.eigen_residual),
        res_comb.verdict(Suite::Eigen, "combinatorial_residual", ctx.tol.eigen_residual),
        agree.verdict(Suite::Eigen, "cross_construction_agreement", ctx.tol.agreement),
        ucp.verdict(Suite::Eigen, "unique_continuation", ctx.tol.eigen_residual),
        radiation.verdict(Suite::Eigen, "outgoing_radiation_residual", ctx.tol.radiation),
        bound_verdict.verdict(Suite::Eigen, "box_compression_contracts", 0.0),
        decay.verdict(Suite::Eigen, "finite_time_convergence_rate", 1e-3),
    ])
}

fn smatrix(ctx: &Context) -> Result<Vec<Verdict>> {
    let c = ctx.coin;
    let m = c.n0() as i64 + 2;
    let per_theta: Vec<Result<[Worst; 4]>> = ctx
        .thetas
        .par_iter()
        .enumerate()
        .map(|(i, &th)| {
            let minus = assemble_boundary_system(c, th, Side::Minus)?;
            let block = compute_a_with(&minus, m)?;
            let mut unitarity = Worst::new();
            let mut corridor = Worst::new();
            let mut flux = Worst::new();
            let mut closed = Worst::new();
            unitarity.update(check_unitarity_tol(&block, ctx.tol.unitarity).defect(), || json!({"theta": th}));
            let cr = check_corridor(&block);
            corridor.update(cr.max_band.max(block.leakage), || json!({"theta": th}));
            for (p, b) in ctx.channels() {
                let t = channel_amplitudes(c, th, b, p)?;
                flux.update(t.flux_defect(), || json!({"theta": th, "chirality": p.to_string(), "row": b}));
            }
            let mut rng = ctx.rng(400 + i as u64);
            let mut phi = BoundaryVector::zeros(th);
            for p in Chirality::ALL {
                for k in -m..=m {
                    phi.set(p, k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
            }
            let v = scattered_wave_with(&minus, &phi)?;
            let reach = ctx.window.half_width();
            for _ in 0..50 {
                let x = Site::new(rng.gen_range(-reach..=reach), rng.gen_range(-reach..=reach));
                for p in Chirality::ALL {
                    if let Some(z) = v.closed_form(x, p) {
                        closed.update((z - v.eval(x)[p.index()]).norm(), || json!({"theta": th, "site": [x.x1, x.x2], "chirality": p.to_string()}));
                    }
                }
            }
            Ok([unitarity, corridor, flux, closed])
        })
        .collect();
    let mut acc: [Worst; 4] = std::array::from_fn(|_| Worst::new());
    for item in per_theta {
        for (a, b) in acc.iter_mut().zip(item?) {
            let cur = std::mem::replace(a, Worst::new());
            *a = cur.merge(b);
        }
    }
    let [unitarity, corridor, flux, closed] = acc;
    Ok(vec![
        unitarity.verdict(Suite::Smatrix, "sigma_unitarity", ctx.tol.unitarity),
        corridor.verdict(Suite::Smatrix, "corridor_band_vanishes", ctx.tol.corridor),
        flux.verdict(Suite::Smatrix, "channel_flux_conservation", ctx.tol.unitarity),
        closed.verdict(Suite::Smatrix, "scattered_wave_closed_forms", ctx.tol.corridor),
    ])
}

pub fn run(ctx: &Context, suite: Suite) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for s in suite.members() {
        match s {
            Suite::Kernels => out.extend(kernels(ctx)),
            Suite::Resolvents => out.extend(resolvents(ctx)?),
            Suite::Eigen => out.extend(eigen(ctx)?),
            Suite::Smatrix => out.extend(smatrix(ctx)?),
            Suite::All => unreachable!(),
        }
    }
    Ok(out)
}
