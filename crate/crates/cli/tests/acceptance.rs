//! Acceptance criteria, one pass/fail line each. Failing sub-checks are
//! listed underneath with the observed numbers. Exits nonzero if any
//! criterion fails.

use std::f64::consts::SQRT_2;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use serde_json::{json, Value};
use smoothlab::grid::{random_function, Dim, GridFunction, NormSpec};
use smoothlab::lab::{self, estimate_convexity_constant, space_moduli, verify_duality, PairKind};
use smoothlab::ops::{self, fejer_kernel, identity_split, ModulusGrid, OperatorSpec, Semigroup};
use smoothlab::scan::log_grid;
use smoothlab::young::{
    check_delta2, check_nabla2, complementary, patch, power_concavity_regions, YoungFunction, PATCH_GRID_POINTS,
};
use smoothlab_cli::{emit, execute, ExperimentConfig, Format};

struct Sub {
    name: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    subs: Vec<Sub>,
}

impl Criterion {
    fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.subs.push(Sub { name: name.into(), ok, detail: detail.into() });
    }

    fn passed(&self) -> bool {
        !self.subs.is_empty() && self.subs.iter().all(|s| s.ok)
    }
}

type R<T> = Result<T, Box<dyn std::error::Error>>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_abs_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.samples().iter().zip(b.samples()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn randoms(n: usize, d: Dim, seed: u64, count: u64) -> R<Vec<GridFunction>> {
    Ok((0..count).map(|i| random_function(n, d, seed, i)).collect::<Result<_, _>>()?)
}

/// `J₀(t) = Σ_m (−1)^m (t/2)^{2m} / (m!)²`.
fn bessel_j0(t: f64) -> f64 {
    let x = 0.25 * t * t;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..60 {
        term *= -x / (m as f64 * m as f64);
        sum += term;
    }
    sum
}

fn phis() -> R<Vec<YoungFunction>> {
    Ok(vec![YoungFunction::power(2.0)?, YoungFunction::zygmund(2.0, 0.5)?, YoungFunction::two_power(1.5, 3.0)?])
}

fn criterion_1() -> R<Criterion> {
    let mut c = Criterion::default();
    let fs = randoms(256, Dim::One, 11, 100)?;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let phi = YoungFunction::power(p)?;
        let worst = fs.iter().map(|f| rel(f.luxemburg_norm(&phi), f.lp_norm(p))).fold(0.0, f64::max);
        c.check(format!("Luxemburg(u^{p}) = L_{p}"), worst <= 1e-10, format!("max rel error {worst:e}"));

        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for f in &fs {
            let ratio = f.orlicz_norm(&phi)? / f.luxemburg_norm(&phi);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        c.check(
            format!("Luxemburg ≤ Orlicz ≤ 2·Luxemburg, u^{p}"),
            lo >= 1.0 - 1e-8 && hi <= 2.0 + 1e-8,
            format!("ratio range [{lo}, {hi}]"),
        );
    }
    let cos = GridFunction::discretize(|x, _| x.cos(), 1024, Dim::One)?;
    let sq = YoungFunction::power(2.0)?;
    let lux = cos.luxemburg_norm(&sq);
    c.check("Luxemburg(u², cos) = 1/√2", (lux - 0.5f64.sqrt()).abs() <= 1e-9, format!("{lux}"));
    let orl = cos.orlicz_norm(&sq)?;
    c.check("Orlicz(u², cos) = √2", (orl - SQRT_2).abs() <= 1e-6, format!("{orl}"));
    Ok(c)
}

fn criterion_2() -> R<Criterion> {
    let mut c = Criterion::default();
    let sq = YoungFunction::power(2.0)?;
    let psi = complementary(&sq, 1e4, 401)?;
    let v = psi.eval(2.0);
    c.check("complementary(x²)(2) = 1", (v - 1.0).abs() <= 1e-6, format!("{v}"));

    let candidates = vec![
        YoungFunction::power(1.5)?,
        YoungFunction::power(2.0)?,
        YoungFunction::power(3.0)?,
        YoungFunction::power(4.0)?,
        YoungFunction::two_power(1.5, 3.0)?,
        YoungFunction::zygmund(2.0, 0.5)?,
        YoungFunction::log_power(3.0)?,
        YoungFunction::exp(),
    ];
    let xs = log_grid(1e-2, 10.0, 61);
    let mut tested = Vec::new();
    for phi in &candidates {
        if !(check_delta2(phi, 1e-3, 1e3)?.holds && check_nabla2(phi, 1e-3, 1e3)?.holds) {
            continue;
        }
        tested.push(phi.tag());
        // Ψ is needed up to Φ'(10), the slope at the top of the tested range.
        let y_max = 2.0 * phi.deriv_right(10.0);
        let back = complementary(&complementary(phi, y_max, 801)?, 20.0, 801)?;
        let worst = xs.iter().map(|&x| rel(back.eval(x), phi.eval(x))).fold(0.0, f64::max);
        c.check(format!("Ψ** = Φ for {}", phi.tag()), worst <= 1e-6, format!("max rel error {worst:e}"));
    }
    c.check(
        "Δ₂∧∇₂ selection excludes exp and keeps the rest",
        tested.len() == candidates.len() - 1,
        format!("{tested:?}"),
    );

    let r_min = (3.0 + 5f64.sqrt()) / 2.0;
    let gate = YoungFunction::log_power(r_min - 1e-6).is_err()
        && YoungFunction::log_power(2.5).is_err()
        && YoungFunction::log_power(r_min + 1e-6).is_ok();
    c.check("log-power gate at (3+√5)/2", gate, format!("threshold {r_min}"));

    // Concavity region of Φ(u^{1/s}), Φ = u^3(1+|ln u|), s = 4, above u = 1.
    let phi = YoungFunction::log_power(3.0)?;
    let regions = power_concavity_regions(&phi, 4.0, 1e-3, 1e6, 4001)?;
    let upper = regions.intervals.iter().find(|(_, b)| *b >= 1e6 * (1.0 - 1e-9)).map(|&(a, _)| a);
    let target = (16.0f64 / 3.0).exp();
    match upper {
        Some(u0) => c.check(
            "region boundary u₀ within 1% of exp(16/3)",
            rel(u0, target) <= 0.01,
            format!("concave region above the kink starts at u₀ = {u0}; target exp(16/3) = {target}"),
        ),
        None => c.check("region boundary u₀ within 1% of exp(16/3)", false, format!("{:?}", regions.intervals)),
    }

    // Patch: second differences of Φ̃(u^{1/s}) on a log grid.
    let s = 4.0;
    let out = patch(&phi, s, 0.5, 2.0)?;
    let us = log_grid(1e-12, 1e12, PATCH_GRID_POINTS);
    let g: Vec<f64> = us.iter().map(|u| out.phi.eval(u.powf(1.0 / s))).collect();
    let mut worst = f64::NEG_INFINITY;
    for i in 1..us.len() - 1 {
        let s1 = (g[i] - g[i - 1]) / (us[i] - us[i - 1]);
        let s2 = (g[i + 1] - g[i]) / (us[i + 1] - us[i]);
        worst = worst.max((s2 - s1) / (s1.abs() + s2.abs()));
    }
    c.check(
        "patched Φ̃(u^{1/s}) has nonpositive second differences",
        worst <= 1e-10,
        format!("largest relative slope jump {worst:e}"),
    );
    c.check("patch reports finite A", out.a_equiv.is_finite() && out.a_equiv >= 1.0, format!("A = {}", out.a_equiv));
    Ok(c)
}

fn criterion_3() -> R<Criterion> {
    let mut c = Criterion::default();
    for (d, n) in [(Dim::One, 256), (Dim::Two, 32)] {
        for sg in [Semigroup::Heat, Semigroup::Abel] {
            let mut worst = 0.0f64;
            for f in randoms(n, d, 3, 5)? {
                for (a, b) in [(0.01, 0.02), (0.1, 0.3), (0.5, 0.25)] {
                    let two = sg.apply(&sg.apply(&f, a)?, b)?;
                    let one = sg.apply(&f, a + b)?;
                    worst = worst.max(max_abs_diff(&two, &one) / f.max_abs());
                }
            }
            c.check(format!("T(a)T(b) = T(a+b), {} d={}", sg.name(), d.get()), worst <= 1e-12, format!("{worst:e}"));
        }
    }

    let mut norms = Vec::new();
    for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
        norms.push(NormSpec::lp(p)?);
    }
    for phi in phis()? {
        norms.push(NormSpec::luxemburg(phi));
    }
    let one_d: Vec<OperatorSpec> = serde_json::from_value(json!([
        {"op": "heat", "t": 0.05},
        {"op": "abel", "t": 0.1},
        {"op": "cesaro", "n": 16, "l": 1},
        {"op": "cesaro", "n": 10, "l": 3},
    ]))?;
    let two_d: Vec<OperatorSpec> = serde_json::from_value(json!([
        {"op": "heat", "t": 0.05},
        {"op": "abel", "t": 0.1},
        {"op": "sphmean", "t": 0.4, "l": 1},
    ]))?;
    for (d, n, ops) in [(Dim::One, 256, one_d), (Dim::Two, 32, two_d)] {
        let fs = randoms(n, d, 21, 100)?;
        for op in ops {
            let outs: Vec<GridFunction> = fs.iter().map(|f| op.apply(f)).collect::<Result<_, _>>()?;
            for b in &norms {
                let worst = fs.iter().zip(&outs).map(|(f, g)| g.norm(b) / f.norm(b)).fold(0.0, f64::max);
                c.check(
                    format!("contraction {} in {} (d={})", serde_json::to_string(&op)?, b.label(), d.get()),
                    worst <= 1.0 + 1e-10,
                    format!("largest ‖Tf‖/‖f‖ = {worst}"),
                );
            }
        }
    }

    let low = (1..=64).flat_map(|m| fejer_kernel(m, 256)).fold(f64::INFINITY, f64::min);
    c.check("Fejér kernel ≥ 0", low >= -1e-12, format!("min {low:e}"));

    let f = random_function(128, Dim::One, 5, 0)?;
    let mut worst = 0.0f64;
    for sg in [Semigroup::shift(), Semigroup::Heat, Semigroup::Abel] {
        for r in 1..=3 {
            for (h, s) in [(0.1, 0.05), (0.3, 0.2), (0.02, 0.7)] {
                let lhs = sg.difference(&f, h, r)?;
                let rhs = identity_split(&f, &sg, h, s, r)?;
                worst = worst.max(max_abs_diff(&lhs, &rhs) / f.max_abs());
            }
        }
    }
    c.check("splitting identity, r ≤ 3", worst <= 1e-10, format!("{worst:e}"));

    let one = GridFunction::constant(1.0, 64, Dim::Two)?;
    let v1 = ops::spherical_mean(&one, 0.7, 1, 256)?;
    let exact = v1.samples().iter().all(|&v| v == 1.0);
    c.check("V_t 1 = 1", exact, format!("max |V_t 1 − 1| = {:e}", v1.samples().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)));

    let cosx = GridFunction::discretize(|x, _| x.cos(), 64, Dim::Two)?;
    let mut worst = 0.0f64;
    for t in [0.1, 0.5, 1.0, 2.0, 2.4048, 3.0] {
        let v = ops::spherical_mean(&cosx, t, 1, 256)?;
        worst = worst.max(max_abs_diff(&v, &cosx.scale(bessel_j0(t))));
    }
    c.check("V_t cos x = J₀(t) cos x", worst <= 1e-8, format!("{worst:e}"));
    Ok(c)
}

fn criterion_4() -> R<Criterion> {
    let mut c = Criterion::default();
    let cos = GridFunction::discretize(|x, _| x.cos(), 1024, Dim::One)?;
    let l2 = NormSpec::lp(2.0)?;
    let (mut w_om, mut w_av) = (0.0f64, 0.0f64);
    for i in 1..=30 {
        let t = 0.1 * i as f64;
        let om = ops::modulus(&cos, 1, t, &l2, ModulusGrid::default())?;
        w_om = w_om.max((om - SQRT_2 * (0.5 * t).sin()).abs());
        let av = ops::averaged_modulus(&cos, 1, t, &Semigroup::shift(), &l2, 512)?;
        w_av = w_av.max((av - 2.0 * SQRT_2 / t * (1.0 - (0.5 * t).cos())).abs());
    }
    c.check("ω¹(cos,t) = √2 sin(t/2)", w_om <= 1e-6, format!("max error {w_om:e}"));
    c.check("w¹(cos,t) = (2√2/t)(1 − cos(t/2))", w_av <= 1e-6, format!("max error {w_av:e}"));

    let rep = lab::run_check("averaged-7.3", &json!({ "r": [1, 2, 3] }))?;
    let ratios = rep.live_ratios();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    c.check(
        "w ≤ ω ≤ C(r)·w with C(r) ≤ 20, r ≤ 3",
        rep.passed() && lo >= 1.0 - 1e-12 && hi <= 20.0,
        format!("ratio range [{lo}, {hi}]; {:?}", rep.notes),
    );
    Ok(c)
}

fn criterion_5() -> R<Criterion> {
    let mut c = Criterion::default();
    let rep = lab::run_check(
        "basic-2.1",
        &json!({ "B": {"norm": "lp", "p": 2}, "s": 2, "m": 1, "T": {"op": "shift", "h": [0.3]}, "r": [1, 2], "L": 10 }),
    )?;
    let m1 = rep.constant.unwrap_or(f64::NAN);
    c.check("empirical m₁ ≥ 0.48", rep.passed() && m1 >= 0.48, format!("m₁ = {m1}"));
    Ok(c)
}

fn criterion_6() -> R<Criterion> {
    let mut c = Criterion::default();
    let runs = [
        ("jackson-1.4", json!({ "B": {"norm": "lp", "p": 2}, "r": [1, 2], "n": [1, 8] })),
        ("jackson-1.4", json!({ "B": {"norm": "lp", "p": 4}, "r": [1, 2], "n": [1, 8] })),
        ("jackson-8.10", json!({ "d": 1 })),
        ("jackson-8.10", json!({ "d": 2 })),
        ("kfunc-8.9", json!({})),
        ("jackson-5.9", json!({})),
        ("jackson-5.10", json!({})),
        ("jackson-4.8", json!({})),
        ("jackson-4.9", json!({})),
    ];
    for (id, params) in runs {
        let rep = lab::run_check(id, &params)?;
        let spread = rep.spread.unwrap_or(f64::INFINITY);
        c.check(
            format!("{id} {params}"),
            rep.passed() && spread <= 10.0,
            format!("constant {:?}, spread {spread}, notes {:?}", rep.constant, rep.notes),
        );
    }
    Ok(c)
}

fn criterion_7() -> R<Criterion> {
    let mut c = Criterion::default();
    let l2 = NormSpec::lp(2.0)?;
    let est = estimate_convexity_constant(&l2, 2.0, 64, Dim::One, 1, 200)?;
    c.check("m̂(L₂, s=2) ≥ 0.98", est.m_hat >= 0.98, format!("m̂ = {}", est.m_hat));

    let l1 = NormSpec::lp(1.0)?;
    let est = estimate_convexity_constant(&l1, 2.0, 64, Dim::One, 1, 200)?;
    // Independent witness check: F ≡ 1, G = cos gives ‖F ± G‖₁ = 1 = ‖F‖₁.
    let w = &est.witness;
    let top = w.f.add(&w.g).lp_norm(1.0).max(w.f.sub(&w.g).lp_norm(1.0));
    c.check(
        "L₁ witness certifies m̂ = 0",
        est.m_hat == 0.0 && w.kind == PairKind::Dominated && (top - w.f.lp_norm(1.0)).abs() <= 1e-12 && w.g.lp_norm(1.0) > 0.1,
        format!("m̂ = {}, witness {:?}, max‖F±G‖ − ‖F‖ = {:e}", est.m_hat, w.kind, top - w.f.lp_norm(1.0)),
    );

    for (q, dim) in [(2.0, 4), (1.5, 8)] {
        let rep = verify_duality(q, dim, 1, 400)?;
        c.check(format!("duality q={q}, dim={dim}"), rep.passed(), format!("{:?}", rep.notes));
    }
    let rejected = match verify_duality(2.5, 4, 1, 400) {
        Err(e) => e.to_string().contains("nontrivial"),
        Ok(_) => false,
    };
    c.check("q = 2.5 rejected", rejected, "");

    let g = space_moduli(&l2, 64, Dim::One, 1, 24)?;
    c.check("η exponent 2 ± 0.1", (g.eta_exponent - 2.0).abs() <= 0.1, format!("{}", g.eta_exponent));
    c.check("δ exponent 2 ± 0.1", (g.delta_exponent - 2.0).abs() <= 0.1, format!("{}", g.delta_exponent));
    Ok(c)
}

fn criterion_8() -> R<Criterion> {
    let mut c = Criterion::default();
    let phi: Vec<Value> = phis()?.into_iter().map(serde_json::to_value).collect::<Result<_, _>>()?;
    let rep = lab::run_check("cesaro-5.1", &json!({ "phi": phi, "l": 1, "trials": 100, "slack": 1e-10 }))?;
    c.check(
        "Fejér means contract Luxemburg and Orlicz norms",
        rep.passed() && rep.rows.len() == 600,
        format!("largest ratio {:?}, rows {}, notes {:?}", rep.constant, rep.rows.len(), rep.notes),
    );
    Ok(c)
}

fn criterion_9() -> R<Criterion> {
    let mut c = Criterion::default();
    let checks: Vec<Value> = lab::list().into_iter().map(|(id, _)| json!({ "id": id })).collect();
    let config = ExperimentConfig::parse(&json!({ "checks": checks, "seed": 17 }).to_string())?;
    let tmp = tempfile::tempdir()?;
    let mut runs = Vec::new();
    for (dir, jobs) in [("a", Some(1)), ("b", None)] {
        let outcomes = execute(&config, jobs)?;
        emit(&tmp.path().join(dir), &[Format::Csv], &outcomes)?;
        runs.push(tmp.path().join(dir));
    }
    let mut names: Vec<String> = fs::read_dir(&runs[0])?.map(|e| Ok(e?.file_name().to_string_lossy().into_owned())).collect::<R<_>>()?;
    names.sort();
    let mut differing = Vec::new();
    for name in &names {
        let (a, b) = (fs::read_to_string(runs[0].join(name))?, fs::read_to_string(runs[1].join(name))?);
        let same = if name == "summary.csv" {
            // runtime_ms is wall-clock time; compare the other columns.
            let strip = |s: &str| s.lines().map(|l| l.rsplit_once(',').map_or(l, |x| x.0).to_string()).collect::<Vec<_>>();
            strip(&a) == strip(&b)
        } else {
            a == b
        };
        if !same {
            differing.push(name.clone());
        }
    }
    c.check(
        "byte-identical CSVs across runs",
        differing.is_empty() && names.len() == lab::list().len() + 1,
        format!("{} files compared, differing: {differing:?}", names.len()),
    );
    Ok(c)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> R<Criterion>); 9] = [
        ("norm conformance", criterion_1),
        ("Young toolkit", criterion_2),
        ("operator laws", criterion_3),
        ("closed-form moduli", criterion_4),
        ("lower estimate at the proof constant", criterion_5),
        ("sharp Jackson suite", criterion_6),
        ("convexity geometry", criterion_7),
        ("Cesàro/Orlicz contraction", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut all = true;
    let mut report = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(c) => {
                let ok = c.passed();
                all &= ok;
                println!("criterion {} ({title}): {} [{secs:.1}s]", i + 1, if ok { "PASS" } else { "FAIL" });
                for s in c.subs.iter().filter(|s| !s.ok) {
                    println!("    failed: {} ({})", s.name, s.detail);
                }
                report.push((i + 1, c));
            }
            Err(e) => {
                all = false;
                println!("criterion {} ({title}): FAIL [{secs:.1}s]", i + 1);
                println!("    error: {e}");
            }
        }
    }
    if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
        for (i, c) in &report {
            for s in &c.subs {
                println!("  {i}. {} {}: {}", if s.ok { "ok  " } else { "FAIL" }, s.name, s.detail);
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
