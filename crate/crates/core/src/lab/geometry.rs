//! Geometric constants of a norm: the convexity constant `m` of
//! `max(‖F+G‖, ‖F−G‖)^s ≥ ‖F‖^s + m‖G‖^s`, the moduli `η_B` and `δ_X` of
//! the unit ball, and the smoothness/convexity duality on `ℓ_q^n`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{judge_rows, CheckReport, Direction, Judge, Row};
use crate::error::{Error, Result};
use crate::grid::{random_function, Dim, GridFunction, NormSpec};
use crate::par;
use crate::scan;

/// How a sampled pair was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Smooth,
    NearParallel,
    DisjointSupport,
    /// `|G| ≤ F` pointwise, e.g. `F ≡ 1`, `G = cos`.
    Dominated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: PairKind,
    pub index: usize,
    pub ratio: f64,
    pub f: GridFunction,
    pub g: GridFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityEstimate {
    /// `max(0, min ratio)` over the samples.
    pub m_hat: f64,
    pub s: f64,
    pub samples: usize,
    pub seed: u64,
    /// The minimizing pair.
    pub witness: Witness,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

/// Indicator of the first (`first = true`) or second half in `x`.
fn half_mask(f: &GridFunction, first: bool) -> GridFunction {
    let n = f.n();
    let row = match f.dim() {
        Dim::One => 1,
        Dim::Two => n,
    };
    let samples = f
        .samples()
        .iter()
        .enumerate()
        .map(|(i, v)| if ((i / row) < n / 2) == first { *v } else { 0.0 })
        .collect();
    f.with_samples(samples)
}

/// Pair number `i` of the sampler.
fn sample_pair(n: usize, d: Dim, seed: u64, i: usize) -> Result<(PairKind, GridFunction, GridFunction)> {
    let mut rng = rng_for(seed, 0x5eed_0000 + i as u64);
    let rf = |k: u64| random_function(n, d, seed, 1000 + 3 * i as u64 + k);
    let kind = match i % 4 {
        0 => PairKind::Smooth,
        1 => PairKind::NearParallel,
        2 => PairKind::DisjointSupport,
        _ => PairKind::Dominated,
    };
    let (f, g) = match kind {
        PairKind::Smooth => {
            let a = log_uniform(&mut rng, 0.05, 5.0);
            (rf(0)?, rf(1)?.scale(a))
        }
        PairKind::NearParallel => {
            let f = rf(0)?;
            let alpha = log_uniform(&mut rng, 0.05, 2.0);
            let delta = alpha * log_uniform(&mut rng, 1e-3, 0.1);
            let g = f.scale(alpha).axpy(delta, &rf(1)?);
            (f, g)
        }
        PairKind::DisjointSupport => {
            let a = log_uniform(&mut rng, 0.05, 5.0);
            (half_mask(&rf(0)?, true), half_mask(&rf(1)?, false).scale(a))
        }
        PairKind::Dominated => {
            // The first of these is exactly F ≡ 1, G = cos x.
            let (k, a) = if i == 3 { (1.0, 1.0) } else { (rng.random_range(1..=4) as f64, rng.random::<f64>().max(0.05)) };
            let one = GridFunction::constant(1.0, n, d)?;
            let g = GridFunction::discretize(|x, _| a * (k * x).cos(), n, d)?;
            (one, g)
        }
    };
    Ok((kind, f, g))
}

/// `(max(‖F+G‖,‖F−G‖)^s − ‖F‖^s) / ‖G‖^s`.
pub fn convexity_ratio(f: &GridFunction, g: &GridFunction, b: &NormSpec, s: f64) -> f64 {
    let top = f.add(g).norm(b).max(f.sub(g).norm(b));
    (top.powf(s) - f.norm(b).powf(s)) / g.norm(b).powf(s)
}

/// Empirical convexity constant `m̂` over `trials` seeded pairs on an
/// `n`-point grid; the minimizing pair is returned as a witness.
pub fn estimate_convexity_constant(b: &NormSpec, s: f64, n: usize, d: Dim, seed: u64, trials: usize) -> Result<ConvexityEstimate> {
    if !(s >= 2.0 && s.is_finite()) {
        return Err(Error::param("s", format!("need 2 ≤ s < ∞, got {s}")));
    }
    if trials < 100 {
        return Err(Error::param("trials", format!("need at least 100 samples, got {trials}")));
    }
    crate::grid::check_n(n)?;
    let ratios = par::map_range(trials, |i| -> Result<f64> {
        let (_, f, g) = sample_pair(n, d, seed, i)?;
        Ok(convexity_ratio(&f, &g, b, s))
    });
    let mut best = (f64::INFINITY, 0usize);
    for (i, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if r < best.0 {
            best = (r, i);
        }
    }
    let (kind, f, g) = sample_pair(n, d, seed, best.1)?;
    Ok(ConvexityEstimate {
        m_hat: best.0.max(0.0),
        s,
        samples: trials,
        seed,
        witness: Witness { kind, index: best.1, ratio: best.0, f, g },
    })
}

/// Empirical moduli of the unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceGeometry {
    pub sigma: Vec<f64>,
    /// `η_B(σ)`: sup of `½‖F+G‖ + ½‖F−G‖ − 1` over `‖F‖ = 1`, `‖G‖ = σ`.
    pub eta: Vec<f64>,
    pub epsilon: Vec<f64>,
    /// `δ(ε)`: inf of `1 − ‖(x+y)/2‖` over unit `x, y` with `‖x−y‖ = ε`.
    pub delta: Vec<f64>,
    pub eta_exponent: f64,
    pub delta_exponent: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `0` followed by 15 log-spaced points in `[0.02, 0.5]`.
pub fn moduli_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(scan::log_grid(0.02, 0.5, 15));
    g
}

fn unit(f: GridFunction, b: &NormSpec) -> GridFunction {
    let v = f.norm(b);
    f.scale(1.0 / v)
}

/// `g` with its `L₂` component along `f` removed.
fn orthogonalize(g: &GridFunction, f: &GridFunction) -> GridFunction {
    g.axpy(-g.inner(f) / f.inner(f), f)
}

/// Unit `x, y` with `‖x − y‖ = ε`, built as normalized `F ± τG`.
fn pair_at_distance(f: &GridFunction, g: &GridFunction, b: &NormSpec, eps: f64) -> Option<(GridFunction, GridFunction)> {
    let make = |tau: f64| (unit(f.axpy(tau, g), b), unit(f.axpy(-tau, g), b));
    let dist = |tau: f64| {
        let (x, y) = make(tau);
        x.sub(&y).norm(b)
    };
    let mut hi = 1.0;
    while dist(hi) < eps {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    let (_, tau) = scan::bisect(|t| dist(t) >= eps, 0.0, hi, 1e-14, false);
    Some(make(tau))
}

/// Samples `η_B` and `δ` on [`moduli_grid`] and fits power exponents by
/// log-log regression over the positive grid points.
pub fn space_moduli(b: &NormSpec, n: usize, d: Dim, seed: u64, trials: usize) -> Result<SpaceGeometry> {
    if trials == 0 {
        return Err(Error::param("trials", "need at least one sample"));
    }
    crate::grid::check_n(n)?;
    let grid = moduli_grid();
    let pairs: Vec<(GridFunction, GridFunction)> = par::map_range(trials, |i| -> Result<_> {
        let f = unit(random_function(n, d, seed, 2 * i as u64)?, b);
        let h = random_function(n, d, seed, 2 * i as u64 + 1)?;
        // Even samples are balanced (L₂-orthogonal), odd ones are raw.
        let g = if i % 2 == 0 { orthogonalize(&h, &f) } else { h };
        Ok((f, unit(g, b)))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let eta_raw: Vec<f64> = par::map(&grid, |&sigma| {
        if sigma == 0.0 {
            return 0.0;
        }
        pairs
            .iter()
            .map(|(f, g)| 0.5 * f.axpy(sigma, g).norm(b) + 0.5 * f.axpy(-sigma, g).norm(b) - 1.0)
            .fold(0.0, f64::max)
    });
    let delta_raw: Vec<f64> = par::map(&grid, |&eps| {
        if eps == 0.0 {
            return 0.0;
        }
        pairs
            .iter()
            .filter_map(|(f, g)| pair_at_distance(f, g, b, eps))
            .map(|(x, y)| 1.0 - 0.5 * x.add(&y).norm(b))
            .fold(f64::INFINITY, f64::min)
    });

    // η is estimated from below, so the running max is still a lower bound;
    // δ is estimated from above, so take the running min from the right.
    let mut eta = eta_raw;
    for i in 1..eta.len() {
        eta[i] = eta[i].max(eta[i - 1]);
    }
    let mut delta = delta_raw;
    for i in (0..delta.len() - 1).rev() {
        delta[i] = delta[i].min(delta[i + 1]);
    }
    delta[0] = 0.0;

    let fit = |ys: &[f64]| {
        let (lx, ly): (Vec<f64>, Vec<f64>) = grid
            .iter()
            .zip(ys)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
            .map(|(x, y)| (x.ln(), y.ln()))
            .unzip();
        if lx.len() < 2 {
            f64::NAN
        } else {
            scan::slope(&lx, &ly)
        }
    };
    Ok(SpaceGeometry {
        eta_exponent: fit(&eta),
        delta_exponent: fit(&delta),
        sigma: grid.clone(),
        eta,
        epsilon: grid,
        delta,
        samples: trials,
        seed,
    })
}

fn lq_norm(x: &[f64], q: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// Vector pair number `i` for the `ℓ_p^dim` samplers.
fn vector_pair(dim: usize, seed: u64, stream: u64, i: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_for(seed, stream + i as u64);
    let x = gaussian(&mut rng, dim);
    let mut y = gaussian(&mut rng, dim);
    match i % 4 {
        0 => {}
        1 => {
            // Disjoint supports.
            let cut = 1 + (i / 4) % (dim - 1);
            let x: Vec<f64> = x.iter().enumerate().map(|(k, v)| if k < cut { *v } else { 0.0 }).collect();
            let y: Vec<f64> = y.iter().enumerate().map(|(k, v)| if k >= cut { *v } else { 0.0 }).collect();
            return (x, y);
        }
        2 => {
            // Small perturbation.
            let a = log_uniform(&mut rng, 1e-3, 0.3);
            y.iter_mut().for_each(|v| *v *= a);
        }
        _ => {
            // Large perturbation.
            let a = log_uniform(&mut rng, 3.0, 300.0);
            y.iter_mut().for_each(|v| *v *= a);
        }
    }
    (x, y)
}

fn plus_minus(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (x.iter().zip(y).map(|(a, b)| a + b).collect(), x.iter().zip(y).map(|(a, b)| a - b).collect())
}

/// Smallest `M` with `½‖x+y‖ + ½‖x−y‖ ≤ (‖x‖^q + M‖y‖^q)^{1/q}` on one pair.
fn smoothness_ratio(x: &[f64], y: &[f64], q: f64) -> f64 {
    let (p, m) = plus_minus(x, y);
    let avg = 0.5 * lq_norm(&p, q) + 0.5 * lq_norm(&m, q);
    (avg.powf(q) - lq_norm(x, q).powf(q)) / lq_norm(y, q).powf(q)
}

/// Theorem-style duality between power-type smoothness of `ℓ_q^dim` and
/// power-type convexity of its dual `ℓ_s^dim`, `1/s + 1/q = 1`.
///
/// Estimates `M̂` on `ℓ_q`, predicts `m = M̂^{−1/(q−1)}`, then checks the
/// convexity inequality on `ℓ_s` against `m − 3·tol`, where `tol` is the
/// disagreement between the two halves of the `ℓ_q` sample (floored at
/// `1e−3·m`).
pub fn verify_duality(q: f64, dim: usize, seed: u64, trials: usize) -> Result<CheckReport> {
    let start = Instant::now();
    if q > 2.0 {
        return Err(Error::param(
            "q",
            format!(
                "q = {q} > 2: no nontrivial Banach space satisfies the smoothness inequality with q > 2, \
                 since η_B(σ)/σ² is equivalent to a nonincreasing function"
            ),
        ));
    }
    if !(q > 1.0) {
        return Err(Error::param("q", format!("need 1 < q ≤ 2, got {q}")));
    }
    if dim < 2 {
        return Err(Error::param("dim", "need dim ≥ 2"));
    }
    if trials < 8 {
        return Err(Error::param("trials", "need at least 8 samples"));
    }
    let s = q / (q - 1.0);
    let m_of = |big_m: f64| big_m.powf(-1.0 / (q - 1.0));

    let primal = par::map_range(trials, |i| {
        let (x, y) = vector_pair(dim, seed, 0x1000_0000, i);
        smoothness_ratio(&x, &y, q)
    });
    let half = |parity: usize| primal.iter().skip(parity).step_by(2).cloned().fold(0.0, f64::max);
    let big_m = half(0).max(half(1));
    let m_pred = m_of(big_m);
    let tol = (m_of(half(0)) - m_of(half(1))).abs().max(1e-3 * m_pred);

    let rows: Vec<Row> = par::map_range(trials, |i| {
        let (phi, psi) = vector_pair(dim, seed, 0x2000_0000, i);
        let (p, m) = plus_minus(&phi, &psi);
        let top = lq_norm(&p, s).max(lq_norm(&m, s));
        let lhs = top.powf(s) - lq_norm(&phi, s).powf(s);
        let rhs = lq_norm(&psi, s).powf(s);
        Row::new("dual", i as i64, lhs, rhs, rhs, Direction::GeqC)
    });
    let judge = Judge::new(Direction::GeqC, None).at_least(m_pred - 3.0 * tol);
    let v = judge_rows(&rows, judge);
    let mut notes = v.notes;
    notes.push(format!("M̂ = {big_m} on ℓ_{q}^{dim}; predicted m = {m_pred} on ℓ_{s}^{dim}; tolerance {tol}"));
    Ok(CheckReport {
        id: "duality".into(),
        params: json!({ "q": q, "dim": dim, "trials": trials, "seed": seed }),
        direction: Direction::GeqC,
        rows,
        constant: v.constant,
        spread: v.spread,
        spread_bound: None,
        verdict: v.verdict,
        runtime_ms: start.elapsed().as_millis() as u64,
        seed,
        resolutions: json!({ "M_hat": big_m, "m_pred": m_pred, "s": s, "tol": tol }),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_convexity_constant() {
        let b = NormSpec::lp(2.0).unwrap();
        let est = estimate_convexity_constant(&b, 2.0, 32, Dim::One, 7, 100).unwrap();
        assert!(est.m_hat >= 0.98, "{}", est.m_hat);
    }

    #[test]
    fn l1_certificate() {
        let b = NormSpec::lp(1.0).unwrap();
        let est = estimate_convexity_constant(&b, 2.0, 32, Dim::One, 7, 100).unwrap();
        assert_eq!(est.m_hat, 0.0);
        assert_eq!(est.witness.kind, PairKind::Dominated);
    }

    #[test]
    fn few_trials_rejected() {
        let b = NormSpec::lp(2.0).unwrap();
        assert!(estimate_convexity_constant(&b, 2.0, 32, Dim::One, 7, 10).is_err());
    }

    #[test]
    fn duality_cases() {
        assert!(verify_duality(2.0, 4, 1, 400).unwrap().passed());
        assert!(verify_duality(1.5, 8, 1, 400).unwrap().passed());
        let err = verify_duality(2.5, 4, 1, 400).unwrap_err().to_string();
        assert!(err.contains("nontrivial"), "{err}");
    }

    #[test]
    fn hilbert_moduli() {
        let b = NormSpec::lp(2.0).unwrap();
        let g = space_moduli(&b, 32, Dim::One, 3, 16).unwrap();
        assert_eq!(g.eta[0], 0.0);
        assert_eq!(g.delta[0], 0.0);
        for (i, &e) in g.epsilon.iter().enumerate().skip(1) {
            let exact = 1.0 - (1.0 - e * e / 4.0).sqrt();
            assert!((g.delta[i] - exact).abs() < 1e-9 * exact.max(1e-6) + 1e-12, "{} {}", g.delta[i], exact);
        }
        assert!((g.eta_exponent - 2.0).abs() < 0.1);
        assert!((g.delta_exponent - 2.0).abs() < 0.1);
    }
}
