//! Best approximation by trigonometric polynomials and K-functionals.
//!
//! A band is a set of frequencies `{k : |k|² ≤ K}` (Euclidean in 2D). Two
//! linear means give guaranteed upper bounds for `E(f)_B`; an optional
//! projected subgradient descent on the band coefficients tightens them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dim, GridFunction, NormKind, NormSpec};
use crate::ops::{self, ModulusGrid, Semigroup};
use crate::par;
use crate::spectral::Spectrum;

/// Frequencies `k` with `k₁² + k₂² ≤ max_sq`; empty when `max_sq < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub max_sq: i64,
}

impl Band {
    /// Trigonometric polynomials of degree `≤ n` (`|k| ≤ n`).
    pub fn degree(n: usize) -> Self {
        Self { max_sq: (n * n) as i64 }
    }

    /// `{|k| < λ}`, the class in `E_λ`.
    pub fn below(lambda: f64) -> Self {
        if lambda <= 0.0 {
            return Self { max_sq: -1 };
        }
        Self { max_sq: ((lambda * lambda).ceil() as i64 - 1).max(0) }
    }

    #[inline]
    pub fn contains(&self, k1: i64, k2: i64) -> bool {
        k1 * k1 + k2 * k2 <= self.max_sq
    }

    /// Radius `2m` of the first frequency outside the band.
    fn outer(&self) -> f64 {
        ((self.max_sq + 1) as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionKind {
    PartialSum,
    ValleePoussin,
}

/// Vallée-Poussin weight: 1 for `|k| ≤ m`, linear down to 0 at `|k| = 2m`.
fn vp_weight(k: f64, m: f64) -> f64 {
    if m <= 0.0 {
        return if k == 0.0 { 1.0 } else { 0.0 };
    }
    ((2.0 * m - k) / m).clamp(0.0, 1.0)
}

/// `partial_sum` keeps `|k| ≤ n`; `vallee_poussin` keeps `|k| ≤ n` and ramps
/// linearly to zero at `|k| = 2n`.
pub fn projection(f: &GridFunction, n: usize, kind: ProjectionKind) -> GridFunction {
    f.with_samples(projection_spectrum(&f.spectrum(), n as f64, kind).to_real())
}

fn projection_spectrum(spec: &Spectrum, n: f64, kind: ProjectionKind) -> Spectrum {
    match kind {
        ProjectionKind::PartialSum => {
            let b = Band { max_sq: (n * n).floor() as i64 };
            spec.mask(|a, c| b.contains(a, c))
        }
        ProjectionKind::ValleePoussin => spec.map_real(|a, c| vp_weight((a * a + c * c).sqrt(), n)),
    }
}

/// Near-best approximation result for one band.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxResult {
    /// Largest admitted `|k|²`.
    pub band_sq: i64,
    /// `min` of `‖f − mean‖_B` over the two linear means.
    pub upper: f64,
    /// Value after convex refinement, when requested.
    pub optimized: Option<f64>,
    pub method: String,
}

impl ApproxResult {
    pub fn best(&self) -> f64 {
        self.optimized.unwrap_or(self.upper).min(self.upper)
    }
}

/// Refinement budget for [`best_approx`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refine {
    pub iterations: usize,
    /// Initial step as a fraction of the starting error.
    pub step: f64,
}

impl Default for Refine {
    fn default() -> Self {
        Self { iterations: 500, step: 0.1 }
    }
}

/// `E_n(f)_B`: distance to trigonometric polynomials of degree `≤ n`.
pub fn best_approx(f: &GridFunction, n: usize, b: &NormSpec, refine: Option<Refine>) -> ApproxResult {
    best_approx_band(f, &f.spectrum(), Band::degree(n), b, refine)
}

/// `E_λ(f)_B` with the strict bound `|k| < λ`.
pub fn best_approx_lambda(f: &GridFunction, lambda: f64, b: &NormSpec, refine: Option<Refine>) -> ApproxResult {
    best_approx_band(f, &f.spectrum(), Band::below(lambda), b, refine)
}

fn is_plain_l2(f: &GridFunction, b: &NormSpec) -> bool {
    matches!(b.kind, NormKind::Lp { p } if p == 2.0) && f.weight().is_none()
}

pub fn best_approx_band(
    f: &GridFunction,
    spec: &Spectrum,
    band: Band,
    b: &NormSpec,
    refine: Option<Refine>,
) -> ApproxResult {
    if band.max_sq < 0 {
        let v = f.norm(b);
        return ApproxResult { band_sq: band.max_sq, upper: v, optimized: refine.map(|_| v), method: "empty".into() };
    }
    let ps = spec.mask(|a, c| band.contains(a, c));
    let vp = spec.map_real(|a, c| vp_weight((a * a + c * c).sqrt(), band.outer() / 2.0));
    let err = |approx: &Spectrum| {
        let coeffs: Vec<_> = spec.raw().iter().zip(approx.raw()).map(|(x, y)| x - y).collect();
        ops::spectrum_norm(f, &Spectrum::from_parts(spec.dim(), spec.n(), coeffs), b)
    };
    let (e_ps, e_vp) = (err(&ps), err(&vp));
    let (upper, start, method) = if e_ps <= e_vp {
        (e_ps, ps, "partial_sum")
    } else {
        (e_vp, vp, "vallee_poussin")
    };
    let optimized = refine.map(|cfg| {
        if is_plain_l2(f, b) {
            e_ps
        } else {
            descend(f, &start.to_real(), band, b, upper, cfg).min(upper)
        }
    });
    ApproxResult { band_sq: band.max_sq, upper, optimized, method: method.into() }
}

/// Subgradient density of `e ↦ ‖e‖_B` with respect to the normalized
/// measure, or `None` at `e = 0`.
pub fn norm_subgradient(e: &GridFunction, b: &NormSpec) -> Option<Vec<f64>> {
    let v = e.norm(b);
    if v == 0.0 {
        return None;
    }
    let sgn = |x: f64| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
    let s = e.samples();
    let g = match &b.kind {
        NormKind::Lp { p } if p.is_infinite() => {
            let top = e.max_abs();
            let hits: Vec<usize> = (0..s.len()).filter(|&i| s[i].abs() == top).collect();
            let mut g = vec![0.0; s.len()];
            let w = s.len() as f64 / hits.len() as f64;
            for i in hits {
                g[i] = sgn(s[i]) * w;
            }
            g
        }
        NormKind::Lp { p } => s.iter().map(|&x| sgn(x) * (x.abs() / v).powf(p - 1.0)).collect(),
        NormKind::Luxemburg { phi } => {
            let denom = e.integrate(|x| phi.deriv_right(x.abs() / v) * x.abs());
            if denom <= 0.0 {
                return None;
            }
            s.iter().map(|&x| v * phi.deriv_right(x.abs() / v) * sgn(x) / denom).collect()
        }
        NormKind::Orlicz { phi } => {
            // Envelope theorem on the Amemiya form at its minimizer k*.
            let k = amemiya_k(e, phi);
            s.iter().map(|&x| phi.deriv_right(k * x.abs()) * sgn(x)).collect()
        }
    };
    Some(match e.weight() {
        Some(w) => g.iter().zip(w).map(|(a, b)| a * b).collect(),
        None => g,
    })
}

fn amemiya_k(e: &GridFunction, phi: &crate::young::YoungFunction) -> f64 {
    // k* satisfies ∫Ψ(Φ′(k|e|)) = 1, i.e. ∫ (k|e|Φ′(k|e|) − Φ(k|e|)) = 1.
    let m = |k: f64| e.integrate(|x| {
        let y = k * x.abs();
        y * phi.deriv_right(y) - phi.eval(y)
    });
    let mut hi = 1.0 / e.max_abs();
    let mut guard = 0;
    while m(hi) < 1.0 && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = hi / 2.0;
    while m(lo) >= 1.0 && lo > 1e-300 {
        hi = lo;
        lo /= 2.0;
    }
    crate::scan::bisect(|k| m(k) >= 1.0, lo, hi, 1e-13, false).1
}

/// Normalized projected subgradient descent over band coefficients,
/// starting from `phi0`; returns the best value seen.
fn descend(f: &GridFunction, phi0: &[f64], band: Band, b: &NormSpec, upper: f64, cfg: Refine) -> f64 {
    let mut phi = f.with_samples(phi0.to_vec());
    let mut best = upper;
    for k in 0..cfg.iterations {
        let e = f.sub(&phi);
        let val = e.norm(b);
        best = best.min(val);
        let Some(g) = norm_subgradient(&e, b) else { break };
        let pg = f.with_samples(g).spectrum().mask(|a, c| band.contains(a, c));
        let size = pg.l2_norm();
        if size == 0.0 {
            break;
        }
        let step = upper * cfg.step / ((k + 1) as f64).sqrt();
        phi = phi.axpy(step / size, &f.with_samples(pg.to_real()));
    }
    best.min(f.sub(&phi).norm(b))
}

/// `E` over a list of bands, with the running minimum enforced: an
/// approximant admissible for a smaller band is admissible for every larger
/// one, so the reported values are nonincreasing along inclusion.
pub fn best_approx_profile(f: &GridFunction, bands: &[Band], b: &NormSpec, refine: Option<Refine>) -> Vec<f64> {
    let spec = f.spectrum();
    let raw = par::map(bands, |band| best_approx_band(f, &spec, *band, b, refine).best());
    let mut order: Vec<usize> = (0..bands.len()).collect();
    order.sort_by_key(|&i| bands[i].max_sq);
    let mut out = raw.clone();
    let mut run = f64::INFINITY;
    for i in order {
        run = run.min(raw[i]);
        out[i] = run;
    }
    out
}

/// How a K-functional value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KRoute {
    /// `min_g ‖f − g‖ + t^{2ℓ}‖Δ^ℓ g‖` over `g ∈ {0, f, VP(f,⌈1/t⌉), VP(f,2⌈1/t⌉)}`.
    Realization,
    /// `‖(W(t²) − I)^ℓ f‖` with the heat semigroup `W`.
    Heat,
    /// `‖V_{ℓ,t} f − f‖`, 𝕋² only.
    Sphmean,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KFuncResult {
    pub t: f64,
    pub l: u32,
    pub route: KRoute,
    pub value: f64,
    pub companions: Vec<(KRoute, f64)>,
}

/// `K_{Δ^ℓ}(f, t^{2ℓ})_B` by one route.
pub fn k_functional_route(f: &GridFunction, spec: &Spectrum, l: u32, t: f64, b: &NormSpec, route: KRoute) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("need t > 0, got {t}")));
    }
    match route {
        KRoute::Realization => Ok(realization(f, spec, t.powi(2 * l as i32), b, |a, c| {
            (-(a * a + c * c)).powi(l as i32)
        }, 1.0 / t)),
        KRoute::Heat => Ok(Semigroup::Heat.difference_norm(f, spec, t * t, l, b)),
        KRoute::Sphmean => {
            if f.dim() != Dim::Two {
                return Err(Error::Inapplicable("the spherical-mean route needs d = 2".into()));
            }
            let v = ops::spherical_mean_spectrum(f, spec, t, l, ops::CIRCLE_POINTS)?;
            let coeffs: Vec<_> = v.raw().iter().zip(spec.raw()).map(|(x, y)| x - y).collect();
            Ok(ops::spectrum_norm(f, &Spectrum::from_parts(spec.dim(), spec.n(), coeffs), b))
        }
    }
}

/// `min_g ‖f − g‖ + weight·‖D g‖` over the realization candidates, where `D`
/// has real symbol `sym` and the Vallée-Poussin degree is set by `scale`.
fn realization<S: Fn(f64, f64) -> f64>(f: &GridFunction, spec: &Spectrum, weight: f64, b: &NormSpec, sym: S, scale: f64) -> f64 {
    let m = scale.ceil().max(1.0);
    let zero_spec = spec.map_real(|_, _| 0.0);
    let mut cands = vec![zero_spec, spec.clone()];
    for deg in [m, 2.0 * m] {
        cands.push(projection_spectrum(spec, deg, ProjectionKind::ValleePoussin));
    }
    cands
        .iter()
        .map(|g| {
            let diff: Vec<_> = spec.raw().iter().zip(g.raw()).map(|(x, y)| x - y).collect();
            let dist = ops::spectrum_norm(f, &Spectrum::from_parts(spec.dim(), spec.n(), diff), b);
            let dg = g.map_real(&sym);
            dist + weight * ops::spectrum_norm(f, &dg, b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Primary route plus every other applicable route as companions.
pub fn k_functional(f: &GridFunction, l: u32, t: f64, b: &NormSpec, route: KRoute) -> Result<KFuncResult> {
    let spec = f.spectrum();
    let value = k_functional_route(f, &spec, l, t, b, route)?;
    let mut companions = Vec::new();
    for other in [KRoute::Realization, KRoute::Heat, KRoute::Sphmean] {
        if other == route || (other == KRoute::Sphmean && f.dim() != Dim::Two) {
            continue;
        }
        companions.push((other, k_functional_route(f, &spec, l, t, b, other)?));
    }
    Ok(KFuncResult { t, l, route, value, companions })
}

/// Realization form of `K_{𝒜^r}(f, t^r)_B` for the generator of a semigroup.
pub fn k_generator_realization(f: &GridFunction, spec: &Spectrum, r: u32, t: f64, b: &NormSpec, semigroup: &Semigroup) -> f64 {
    let scale = match semigroup {
        Semigroup::Heat => 1.0 / t.sqrt(),
        _ => 1.0 / t,
    };
    let sym = |a: f64, c: f64| {
        let z = semigroup.generator(a, c);
        (0..r).fold(rustfft::num_complex::Complex64::new(1.0, 0.0), |acc, _| acc * z).re
    };
    realization(f, spec, t.powi(r as i32), b, sym, scale)
}

/// One row of the weak converse scaffold: `ω^{r+1}(f, 2^{−n+j})` against
/// `Σ_{k=0}^{n−j} 2^{−k(r+1)} E_{2^{n−j−k}}(f) + 2^{−(n−j)(r+1)}‖f‖`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakConverseRow {
    pub j: u32,
    pub omega: f64,
    pub bound: f64,
}

pub fn weak_converse_rows(f: &GridFunction, r: u32, n: u32, b: &NormSpec, grid: ModulusGrid) -> Result<Vec<WeakConverseRow>> {
    let spec = f.spectrum();
    let bands: Vec<Band> = (0..=n).map(|m| Band::below(2f64.powi(m as i32))).collect();
    let e = best_approx_profile(f, &bands, b, None);
    let norm = f.norm(b);
    let js: Vec<u32> = (1..=n).collect();
    let rows = par::map(&js, |&j| -> Result<WeakConverseRow> {
        let omega = ops::modulus_spec(f, &spec, r + 1, 2f64.powi(j as i32 - n as i32), b, grid)?;
        let top = n - j;
        let mut bound: f64 = (0..=top).map(|k| 2f64.powi(-((k * (r + 1)) as i32)) * e[(top - k) as usize]).sum();
        bound += 2f64.powi(-((top * (r + 1)) as i32)) * norm;
        Ok(WeakConverseRow { j, omega, bound })
    });
    rows.into_iter().collect()
}

/// Directions `θ = πj/count`, `j = 0..count`, as unit vectors in dimension `d`.
pub fn directions(d: Dim, count: usize) -> Vec<Vec<f64>> {
    match d {
        Dim::One => vec![vec![1.0]],
        Dim::Two => (0..count)
            .map(|j| {
                let th = std::f64::consts::PI * j as f64 / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
    }
}

/// `(ω^r(g,τ)_B, τ^r max_ξ ‖(∂/∂ξ)^r g‖_B)` for `g = VP(f, n)`, with the
/// same 8 directions in the sup and in the max.
pub fn derivative_bound(f: &GridFunction, n: usize, r: u32, tau: f64, b: &NormSpec, radii: usize) -> Result<(f64, f64)> {
    let g = projection(f, n, ProjectionKind::ValleePoussin);
    let dirs = directions(f.dim(), 8);
    let lhs = ops::modulus(&g, r, tau, b, ModulusGrid { directions: dirs.len(), radii })?;
    let mut top = 0.0f64;
    for xi in &dirs {
        top = top.max(ops::directional_derivative(&g, xi, r)?.norm(b));
    }
    Ok((lhs, tau.powi(r as i32) * top))
}
