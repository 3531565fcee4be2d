//! Linear operators on grid functions and the moduli built from them.
//!
//! Everything is a Fourier multiplier: shifts are phase rotations, the heat
//! and Abel semigroups damp coefficient `k` by `e^{−t|k|²}` and `e^{−t|k|}`,
//! Cesàro means taper the partial sums, and the circle mean `V_t` multiplies
//! by the average of `e^{i t k·θ}` over equispaced directions `θ`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dim, GridFunction, NormKind, NormSpec};
use crate::par;
use crate::spectral::Spectrum;

/// Default number of circle points for spherical means.
pub const CIRCLE_POINTS: usize = 256;
/// Default quadrature points for averaged moduli.
pub const AVERAGE_POINTS: usize = 128;
/// Default polar grid for the modulus sup.
pub const MODULUS_RADII: usize = 64;
pub const MODULUS_DIRECTIONS: usize = 64;

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn cpow(z: Complex64, r: u32) -> Complex64 {
    (0..r).fold(Complex64::new(1.0, 0.0), |acc, _| acc * z)
}

/// `e^{iθ} − 1` without cancellation for small `θ`.
fn unit_minus_one(theta: f64) -> Complex64 {
    let half = (0.5 * theta).sin();
    Complex64::new(-2.0 * half * half, theta.sin())
}

fn dot(h: &[f64], k1: f64, k2: f64) -> f64 {
    h[0] * k1 + h.get(1).copied().unwrap_or(0.0) * k2
}

fn check_h(f: &GridFunction, h: &[f64]) -> Result<()> {
    if h.len() != f.dim().get() {
        return Err(Error::Dimension(format!(
            "shift vector has {} components, grid has d={}",
            h.len(),
            f.dim().get()
        )));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("h", "shift components must be finite"));
    }
    Ok(())
}

/// Norm of the real function behind a spectrum, with a Parseval shortcut
/// for unweighted `L₂`.
pub fn spectrum_norm(template: &GridFunction, spec: &Spectrum, b: &NormSpec) -> f64 {
    if matches!(b.kind, NormKind::Lp { p } if p == 2.0) && template.weight().is_none() {
        return spec.l2_norm();
    }
    template.with_samples(spec.to_real()).norm(b)
}

/// `f(· + h)` by trigonometric interpolation.
pub fn translate(f: &GridFunction, h: &[f64]) -> Result<GridFunction> {
    check_h(f, h)?;
    let out = f.spectrum().map(|k1, k2| Complex64::from_polar(1.0, dot(h, k1, k2)));
    Ok(f.with_samples(out.to_real()))
}

/// `Δ_h^r f` as the multiplier `(e^{ik·h} − 1)^r`.
pub fn difference(f: &GridFunction, h: &[f64], r: u32) -> Result<GridFunction> {
    check_h(f, h)?;
    Ok(f.with_samples(difference_spectrum(&f.spectrum(), h, r).to_real()))
}

pub fn difference_spectrum(spec: &Spectrum, h: &[f64], r: u32) -> Spectrum {
    spec.map(|k1, k2| cpow(unit_minus_one(dot(h, k1, k2)), r))
}

/// `Σ_k (−1)^{r−k} C(r,k) f(· + kh)`, the expanded form of `Δ_h^r f`.
pub fn difference_binomial(f: &GridFunction, h: &[f64], r: u32) -> Result<GridFunction> {
    check_h(f, h)?;
    let mut acc = f.scale(0.0);
    for k in 0..=r {
        let sign = if (r - k) % 2 == 0 { 1.0 } else { -1.0 };
        let hk: Vec<f64> = h.iter().map(|v| v * k as f64).collect();
        acc = acc.axpy(sign * binomial(r as u64, k as u64), &translate(f, &hk)?);
    }
    Ok(acc)
}

/// Polar grid of shifts with `|h| ≤ t`: radii `t·i/radii`, and directions
/// over `[0, π)` in 2D. `Δ_{−h}^r f` is a translate of `±Δ_h^r f`, so half
/// the circle suffices.
pub fn shift_grid(d: Dim, t: f64, directions: usize, radii: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 1..=radii {
        let rho = t * i as f64 / radii as f64;
        match d {
            Dim::One => out.push(vec![rho]),
            Dim::Two => {
                for j in 0..directions {
                    let th = PI * j as f64 / directions as f64;
                    out.push(vec![rho * th.cos(), rho * th.sin()]);
                }
            }
        }
    }
    out
}

/// Resolution of the discretized sup in `ω^r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusGrid {
    pub directions: usize,
    pub radii: usize,
}

impl Default for ModulusGrid {
    fn default() -> Self {
        Self { directions: MODULUS_DIRECTIONS, radii: MODULUS_RADII }
    }
}

/// `ω^r(f,t)_B ≈ sup_{|h| ≤ t} ‖Δ_h^r f‖_B` over a polar grid; a lower bound
/// of the true sup that can only grow when the grid is refined by integer
/// factors.
pub fn modulus(f: &GridFunction, r: u32, t: f64, b: &NormSpec, grid: ModulusGrid) -> Result<f64> {
    modulus_spec(f, &f.spectrum(), r, t, b, grid)
}

/// [`modulus`] with a precomputed spectrum of `f`.
pub fn modulus_spec(f: &GridFunction, spec: &Spectrum, r: u32, t: f64, b: &NormSpec, grid: ModulusGrid) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("need t ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let hs = shift_grid(f.dim(), t, grid.directions.max(1), grid.radii.max(1));
    if matches!(b.kind, NormKind::Lp { p } if p == 2.0) && f.weight().is_none() {
        let table = L2Differences::new(spec);
        let norms = par::map(&hs, |h| table.norm(h, r));
        return Ok(norms.into_iter().fold(0.0, f64::max));
    }
    let norms = par::map(&hs, |h| spectrum_norm(f, &difference_spectrum(spec, h, r), b));
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// `‖Δ_h^r f‖_{L₂}` by Parseval without building the difference spectrum:
/// `|e^{ik·h} − 1|^{2r} = (4 sin²(k·h/2))^r`, with the half-angle sine
/// assembled from per-axis tables. Nyquist coefficients go through the
/// same averaging as [`Spectrum::map`].
struct L2Differences {
    n: usize,
    d: usize,
    /// `|f̂(k)|²`, zero at Nyquist entries.
    power: Vec<f64>,
    nyquist: Vec<(f64, f64, Complex64)>,
}

impl L2Differences {
    fn new(spec: &Spectrum) -> Self {
        let (n, d) = (spec.n(), spec.dim());
        let half = (n / 2) as i64;
        let mut power = vec![0.0; spec.len()];
        let mut nyquist = Vec::new();
        for (idx, w) in power.iter_mut().enumerate() {
            let (k1, k2) = spec.freqs(idx);
            let c = spec.coeff(idx);
            if k1 == half || (d == 2 && k2 == half) {
                nyquist.push((k1 as f64, k2 as f64, c));
            } else {
                *w = c.norm_sqr();
            }
        }
        L2Differences { n, d, power, nyquist }
    }

    fn axis(&self, h: f64) -> Vec<(f64, f64)> {
        (0..self.n).map(|j| (0.5 * h * crate::spectral::freq(j, self.n) as f64).sin_cos()).collect()
    }

    fn norm(&self, h: &[f64], r: u32) -> f64 {
        let t1 = self.axis(h[0]);
        let t2 = if self.d == 2 { self.axis(h[1]) } else { vec![(0.0, 1.0)] };
        let mut acc = 0.0;
        for (i1, &(s1, c1)) in t1.iter().enumerate() {
            let row = &self.power[i1 * t2.len()..(i1 + 1) * t2.len()];
            for (w, &(s2, c2)) in row.iter().zip(&t2) {
                let s = s1 * c2 + c1 * s2;
                acc += w * (4.0 * s * s).powi(r as i32);
            }
        }
        let half = (self.n / 2) as f64;
        for &(k1, k2, c) in &self.nyquist {
            let m = crate::spectral::nyquist_avg(
                &|a: f64, b: f64| cpow(unit_minus_one(dot(h, a, b)), r),
                (k1, k1 == half),
                (k2, self.d == 2 && k2 == half),
            );
            acc += (c * m).norm_sqr();
        }
        acc.sqrt()
    }
}

/// A one-parameter semigroup `T(u)` acting by multipliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Semigroup {
    /// `T(u) f = f(· + uξ)` for a unit direction `ξ`.
    Shift {
        #[serde(default = "unit_x")]
        direction: Vec<f64>,
    },
    /// `e^{−u|k|²}`.
    Heat,
    /// `e^{−u|k|}`.
    Abel,
}

fn unit_x() -> Vec<f64> {
    vec![1.0]
}

impl Semigroup {
    pub fn shift() -> Self {
        Semigroup::Shift { direction: unit_x() }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Semigroup::Shift { .. } => "shift",
            Semigroup::Heat => "heat",
            Semigroup::Abel => "abel",
        }
    }

    /// Multiplier of `T(u)` at frequency `(k₁, k₂)`.
    pub fn symbol(&self, u: f64, k1: f64, k2: f64) -> Complex64 {
        match self {
            Semigroup::Shift { direction } => Complex64::from_polar(1.0, u * dot(direction, k1, k2)),
            Semigroup::Heat => Complex64::new((-u * (k1 * k1 + k2 * k2)).exp(), 0.0),
            Semigroup::Abel => Complex64::new((-u * (k1 * k1 + k2 * k2).sqrt()).exp(), 0.0),
        }
    }

    /// `symbol(u) − 1`, accurate for small `u`.
    pub fn symbol_minus_one(&self, u: f64, k1: f64, k2: f64) -> Complex64 {
        match self {
            Semigroup::Shift { direction } => unit_minus_one(u * dot(direction, k1, k2)),
            Semigroup::Heat => Complex64::new((-u * (k1 * k1 + k2 * k2)).exp_m1(), 0.0),
            Semigroup::Abel => Complex64::new((-u * (k1 * k1 + k2 * k2).sqrt()).exp_m1(), 0.0),
        }
    }

    /// Eigenvalue of the generator, `T(u) = e^{u 𝒜}`.
    pub fn generator(&self, k1: f64, k2: f64) -> Complex64 {
        match self {
            Semigroup::Shift { direction } => Complex64::new(0.0, dot(direction, k1, k2)),
            Semigroup::Heat => Complex64::new(-(k1 * k1 + k2 * k2), 0.0),
            Semigroup::Abel => Complex64::new(-(k1 * k1 + k2 * k2).sqrt(), 0.0),
        }
    }

    fn validate(&self, d: Dim) -> Result<()> {
        if let Semigroup::Shift { direction } = self {
            if direction.len() != d.get() {
                return Err(Error::Dimension(format!(
                    "shift direction has {} components, grid has d={}",
                    direction.len(),
                    d.get()
                )));
            }
        }
        Ok(())
    }

    pub fn apply(&self, f: &GridFunction, u: f64) -> Result<GridFunction> {
        self.validate(f.dim())?;
        if !(u >= 0.0) {
            return Err(Error::param("t", format!("semigroup time must be ≥ 0, got {u}")));
        }
        Ok(f.with_samples(f.spectrum().map(|a, b| self.symbol(u, a, b)).to_real()))
    }

    /// `(T(u) − I)^r` applied to a spectrum.
    pub fn difference_spectrum(&self, spec: &Spectrum, u: f64, r: u32) -> Spectrum {
        spec.map(|a, b| cpow(self.symbol_minus_one(u, a, b), r))
    }

    pub fn difference(&self, f: &GridFunction, u: f64, r: u32) -> Result<GridFunction> {
        self.validate(f.dim())?;
        Ok(f.with_samples(self.difference_spectrum(&f.spectrum(), u, r).to_real()))
    }

    /// `‖(T(u) − I)^r f‖_B`.
    pub fn difference_norm(&self, f: &GridFunction, spec: &Spectrum, u: f64, r: u32, b: &NormSpec) -> f64 {
        spectrum_norm(f, &self.difference_spectrum(spec, u, r), b)
    }
}

/// `e^{−t|k|²}` or `e^{−t|k|}` applied to `f`.
pub fn spectral_semigroup(f: &GridFunction, t: f64, kind: &Semigroup) -> Result<GridFunction> {
    if matches!(kind, Semigroup::Shift { .. }) {
        return Err(Error::param("kind", "spectral semigroup is heat or abel"));
    }
    kind.apply(f, t)
}

/// Averaged and sup moduli of a semigroup computed on one grid of `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SemigroupModuli {
    /// `w^r_T(f,t) = (1/t)∫₀ᵗ ‖(T(u)−I)^r f‖ du` by the composite midpoint rule.
    pub averaged: f64,
    /// `ω^r_T(f,t) = sup_{0≤u≤t} ‖(T(u)−I)^r f‖` over midpoints and nodes.
    pub sup: f64,
}

/// Both moduli from norms at `u = t·j/(2Q)`, `j = 1..=2Q`. The odd `j` are
/// the midpoint nodes, so `averaged ≤ sup` holds exactly.
pub fn semigroup_moduli(
    f: &GridFunction,
    spec: &Spectrum,
    r: u32,
    t: f64,
    semigroup: &Semigroup,
    b: &NormSpec,
    quad_points: usize,
) -> Result<SemigroupModuli> {
    semigroup.validate(f.dim())?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("need t > 0, got {t}")));
    }
    let q = quad_points.max(1);
    let norms = par::map_range(2 * q, |j| {
        let u = t * (j + 1) as f64 / (2 * q) as f64;
        semigroup.difference_norm(f, spec, u, r, b)
    });
    let averaged = norms.iter().step_by(2).sum::<f64>() / q as f64;
    let sup = norms.iter().cloned().fold(0.0, f64::max);
    Ok(SemigroupModuli { averaged, sup })
}

/// `w^r_T(f,t)_B` by the composite midpoint rule with `quad_points` nodes.
pub fn averaged_modulus(
    f: &GridFunction,
    r: u32,
    t: f64,
    semigroup: &Semigroup,
    b: &NormSpec,
    quad_points: usize,
) -> Result<f64> {
    Ok(semigroup_moduli(f, &f.spectrum(), r, t, semigroup, b, quad_points)?.averaged)
}

/// Multiplier of the Cesàro mean `C_n^ℓ` at `|k|`:
/// `A_{n−k}^ℓ / A_n^ℓ = Π_{i=1}^ℓ (n−k+i)/(n+i)` for `k ≤ n`, else 0.
pub fn cesaro_weight(k: f64, n: usize, l: u32) -> f64 {
    let k = k.abs();
    if k > n as f64 {
        return 0.0;
    }
    (1..=l).fold(1.0, |acc, i| acc * (n as f64 - k + i as f64) / (n as f64 + i as f64))
}

pub fn cesaro(f: &GridFunction, n: usize, l: u32) -> Result<GridFunction> {
    if f.dim() != Dim::One {
        return Err(Error::Inapplicable("Cesàro means are implemented on 𝕋¹ only".into()));
    }
    if l == 0 {
        return Err(Error::param("l", "Cesàro order must be ≥ 1"));
    }
    Ok(f.with_samples(f.spectrum().map_real(|k, _| cesaro_weight(k, n, l)).to_real()))
}

/// Fejér kernel `1 + 2Σ_{k=1}^n (1 − k/(n+1)) cos(kx)` sampled on the grid,
/// by direct summation.
pub fn fejer_kernel(n: usize, grid_n: usize) -> Vec<f64> {
    (0..grid_n)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / grid_n as f64;
            1.0 + 2.0 * (1..=n).map(|k| (1.0 - k as f64 / (n + 1) as f64) * (k as f64 * x).cos()).sum::<f64>()
        })
        .collect()
}

/// `Δ^ℓ f` via the multiplier `(−|k|²)^ℓ`.
pub fn laplacian_power(f: &GridFunction, l: u32) -> GridFunction {
    f.with_samples(laplacian_spectrum(&f.spectrum(), l).to_real())
}

pub fn laplacian_spectrum(spec: &Spectrum, l: u32) -> Spectrum {
    spec.map_real(|a, b| (-(a * a + b * b)).powi(l as i32))
}

/// `(∂/∂ξ)^r f` via the multiplier `(i k·ξ)^r`.
pub fn directional_derivative(f: &GridFunction, xi: &[f64], r: u32) -> Result<GridFunction> {
    check_h(f, xi)?;
    let out = f.spectrum().map(|a, b| cpow(Complex64::new(0.0, dot(xi, a, b)), r));
    Ok(f.with_samples(out.to_real()))
}

/// Multiplier of the circle mean `V_t` at `(k₁, k₂)`.
pub fn circle_symbol(t: f64, k1: f64, k2: f64, quad_points: usize) -> f64 {
    let q = quad_points.max(1);
    (0..q)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / q as f64;
            (t * (k1 * th.cos() + k2 * th.sin())).cos()
        })
        .sum::<f64>()
        / q as f64
}

/// Coefficients `c_j` with `V_{ℓ,t} = Σ_j c_j V_{jt}`, `j = 1..=ℓ`.
pub fn combined_mean_coefficients(l: u32) -> Vec<f64> {
    let c = binomial(2 * l as u64, l as u64);
    (1..=l)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 / c * sign * binomial(2 * l as u64, (l - j) as u64)
        })
        .collect()
}

/// Multiplier of `V_{ℓ,t}`.
pub fn combined_mean_symbol(t: f64, l: u32, k1: f64, k2: f64, quad_points: usize) -> f64 {
    combined_mean_coefficients(l)
        .iter()
        .enumerate()
        .map(|(j, c)| c * circle_symbol((j + 1) as f64 * t, k1, k2, quad_points))
        .sum()
}

/// `V_{ℓ,t} f` on 𝕋²; `ℓ = 1` is the plain circle mean `V_t`.
pub fn spherical_mean(f: &GridFunction, t: f64, l: u32, quad_points: usize) -> Result<GridFunction> {
    Ok(f.with_samples(spherical_mean_spectrum(f, &f.spectrum(), t, l, quad_points)?.to_real()))
}

pub fn spherical_mean_spectrum(f: &GridFunction, spec: &Spectrum, t: f64, l: u32, quad_points: usize) -> Result<Spectrum> {
    if f.dim() != Dim::Two {
        return Err(Error::Inapplicable("spherical means need d = 2".into()));
    }
    if l == 0 {
        return Err(Error::param("l", "spherical mean order must be ≥ 1"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("need t > 0, got {t}")));
    }
    Ok(spec.map_real(|a, b| combined_mean_symbol(t, l, a, b, quad_points)))
}

/// Right side of the splitting identity
/// `(T(h)−I)^r = Σ_{k=1}^r (−1)^k C(r,k) [T(kh)(T(ks)−I)^r − (T(h+ks)−I)^r]`,
/// applied to `f`.
pub fn identity_split(f: &GridFunction, semigroup: &Semigroup, h: f64, s: f64, r: u32) -> Result<GridFunction> {
    semigroup.validate(f.dim())?;
    let spec = f.spectrum();
    let out = spec.map(|a, b| {
        (1..=r)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let kf = k as f64;
                let t = |u: f64| semigroup.symbol(u, a, b);
                let term = t(kf * h) * cpow(t(kf * s) - 1.0, r) - cpow(t(h + kf * s) - 1.0, r);
                term * sign * binomial(r as u64, k as u64)
            })
            .sum::<Complex64>()
    });
    Ok(f.with_samples(out.to_real()))
}

/// A linear map on grid functions, as named in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum OperatorSpec {
    Shift { h: Vec<f64> },
    Heat { t: f64 },
    Abel { t: f64 },
    Cesaro { n: usize, #[serde(alias = "ell")] l: u32 },
    Sphmean {
        t: f64,
        #[serde(alias = "ell", default = "one")]
        l: u32,
        #[serde(default = "circle_points")]
        quad_points: usize,
    },
    Lap { #[serde(alias = "ell")] l: u32 },
}

fn one() -> u32 {
    1
}

fn circle_points() -> usize {
    CIRCLE_POINTS
}

impl OperatorSpec {
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        match self {
            OperatorSpec::Shift { h } => translate(f, h),
            OperatorSpec::Heat { t } => Semigroup::Heat.apply(f, *t),
            OperatorSpec::Abel { t } => Semigroup::Abel.apply(f, *t),
            OperatorSpec::Cesaro { n, l } => cesaro(f, *n, *l),
            OperatorSpec::Sphmean { t, l, quad_points } => spherical_mean(f, *t, *l, *quad_points),
            OperatorSpec::Lap { l } => Ok(laplacian_power(f, *l)),
        }
    }

    /// Fourier multiplier of the operator at `(k₁, k₂)`.
    pub fn symbol(&self, k1: f64, k2: f64) -> Complex64 {
        match self {
            OperatorSpec::Shift { h } => Complex64::from_polar(1.0, dot(h, k1, k2)),
            OperatorSpec::Heat { t } => Semigroup::Heat.symbol(*t, k1, k2),
            OperatorSpec::Abel { t } => Semigroup::Abel.symbol(*t, k1, k2),
            OperatorSpec::Cesaro { n, l } => Complex64::new(cesaro_weight(k1, *n, *l), 0.0),
            OperatorSpec::Sphmean { t, l, quad_points } => {
                Complex64::new(combined_mean_symbol(*t, *l, k1, k2, *quad_points), 0.0)
            }
            OperatorSpec::Lap { l } => Complex64::new((-(k1 * k1 + k2 * k2)).powi(*l as i32), 0.0),
        }
    }

    /// Rejects operators that do not act on functions of dimension `d`.
    pub fn validate(&self, d: Dim) -> Result<()> {
        match self {
            OperatorSpec::Shift { h } if h.len() != d.get() => Err(Error::Dimension(format!(
                "shift vector has {} components, grid has d={}",
                h.len(),
                d.get()
            ))),
            OperatorSpec::Cesaro { .. } if d != Dim::One => {
                Err(Error::Inapplicable("Cesàro means are implemented on 𝕋¹ only".into()))
            }
            OperatorSpec::Sphmean { .. } if d != Dim::Two => {
                Err(Error::Inapplicable("spherical means need d = 2".into()))
            }
            _ => Ok(()),
        }
    }

    /// Whether the operator is a contraction in every admitted norm.
    pub fn is_contraction(&self) -> bool {
        !matches!(self, OperatorSpec::Lap { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random_function;

    fn cos1(n: usize) -> GridFunction {
        GridFunction::discretize(|x, _| x.cos(), n, Dim::One).unwrap()
    }

    fn max_dev(a: &GridFunction, b: &GridFunction) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn translate_cases() {
        let f = cos1(64);
        assert!(max_dev(&translate(&f, &[0.0]).unwrap(), &f) < 1e-15);
        let g = translate(&f, &[PI / 2.0]).unwrap();
        let want = GridFunction::discretize(|x, _| -x.sin(), 64, Dim::One).unwrap();
        assert!(max_dev(&g, &want) <= 1e-12);
        let r = random_function(64, Dim::One, 3, 0).unwrap();
        let two = translate(&translate(&r, &[0.3]).unwrap(), &[0.45]).unwrap();
        assert!(max_dev(&two, &translate(&r, &[0.75]).unwrap()) < 1e-12);
        assert!(translate(&f, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn differences() {
        let f = cos1(128);
        assert!(difference(&f, &[0.0], 2).unwrap().max_abs() < 1e-15);
        for &h in &[0.1, 0.7, 2.0] {
            let v = difference(&f, &[h], 1).unwrap().lp_norm(2.0);
            // Oracle: direct quadrature of cos(x+h) − cos(x) on a fine grid.
            let m = 20_000;
            let q: f64 = (0..m)
                .map(|j| {
                    let x = 2.0 * PI * j as f64 / m as f64;
                    ((x + h).cos() - x.cos()).powi(2)
                })
                .sum::<f64>()
                / m as f64;
            assert!((v - q.sqrt()).abs() < 1e-12);
            assert!((v - 2f64.sqrt() * (h / 2.0).sin().abs()).abs() < 1e-12);
        }
        let r = random_function(64, Dim::Two, 9, 1).unwrap();
        for k in 1..=4 {
            let a = difference(&r, &[0.3, -0.2], k).unwrap();
            let b = difference_binomial(&r, &[0.3, -0.2], k).unwrap();
            assert!(max_dev(&a, &b) < 1e-12 * (1u32 << k) as f64);
        }
    }

    #[test]
    fn l2_fast_path_matches_spectrum() {
        for (n, d) in [(32, Dim::One), (16, Dim::Two)] {
            let f = random_function(n, d, 5, 0).unwrap();
            let spec = f.spectrum();
            let table = L2Differences::new(&spec);
            for h in shift_grid(d, 1.3, 4, 5) {
                for r in 1..=3 {
                    let slow = difference_spectrum(&spec, &h, r).l2_norm();
                    assert!((table.norm(&h, r) - slow).abs() <= 1e-12 * slow.max(1.0), "{h:?} {r}");
                }
            }
        }
    }

    #[test]
    fn modulus_of_cos_closed_form() {
        let f = cos1(256);
        let l2 = NormSpec::lp(2.0).unwrap();
        assert_eq!(modulus(&f, 1, 0.0, &l2, ModulusGrid::default()).unwrap(), 0.0);
        for i in 1..=30 {
            let t = 0.1 * i as f64;
            let w = modulus(&f, 1, t, &l2, ModulusGrid::default()).unwrap();
            assert!((w - 2f64.sqrt() * (t / 2.0).sin()).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn modulus_refinement_is_monotone() {
        let f = random_function(64, Dim::One, 11, 0).unwrap();
        let l3 = NormSpec::lp(3.0).unwrap();
        let coarse = modulus(&f, 2, 0.4, &l3, ModulusGrid { directions: 1, radii: 8 }).unwrap();
        let fine = modulus(&f, 2, 0.4, &l3, ModulusGrid { directions: 1, radii: 32 }).unwrap();
        assert!(fine >= coarse);
    }

    #[test]
    fn averaged_modulus_of_cos() {
        let f = cos1(256);
        let l2 = NormSpec::lp(2.0).unwrap();
        for &t in &[0.1, 1.0, 3.0] {
            let w = averaged_modulus(&f, 1, t, &Semigroup::shift(), &l2, 512).unwrap();
            let want = 2.0 * 2f64.sqrt() / t * (1.0 - (t / 2.0).cos());
            assert!((w - want).abs() < 1e-6, "t={t}: {w} vs {want}");
        }
        let c = GridFunction::constant(2.0, 32, Dim::One).unwrap();
        assert!(averaged_modulus(&c, 1, 0.5, &Semigroup::shift(), &l2, 16).unwrap() < 1e-14);
    }

    #[test]
    fn semigroups() {
        let f = cos1(64);
        let t = 0.37;
        let h = Semigroup::Heat.apply(&f, t).unwrap();
        assert!(max_dev(&h, &f.scale((-t).exp())) < 1e-14);
        assert!(max_dev(&Semigroup::Heat.apply(&f, 0.0).unwrap(), &f) < 1e-15);
        let r = random_function(64, Dim::One, 5, 0).unwrap();
        for s in [Semigroup::Heat, Semigroup::Abel] {
            let ab = s.apply(&s.apply(&r, 0.2).unwrap(), 0.3).unwrap();
            assert!(max_dev(&ab, &s.apply(&r, 0.5).unwrap()) < 1e-12);
        }
        assert!(spectral_semigroup(&f, 0.1, &Semigroup::shift()).is_err());
    }

    #[test]
    fn cesaro_cases() {
        let f = cos1(32);
        let c = cesaro(&f, 2, 1).unwrap();
        assert!(max_dev(&c, &f.scale(2.0 / 3.0)) < 1e-14);
        let one = GridFunction::constant(1.5, 32, Dim::One).unwrap();
        for (n, l) in [(0, 1), (3, 2), (10, 4)] {
            assert!(max_dev(&cesaro(&one, n, l).unwrap(), &one) < 1e-14);
        }
        for n in [0, 1, 5, 16, 40] {
            assert!(fejer_kernel(n, 128).iter().all(|&v| v >= -1e-12));
        }
        assert!(cesaro(&GridFunction::constant(1.0, 8, Dim::Two).unwrap(), 2, 1).is_err());
    }

    #[test]
    fn laplacian_cases() {
        let f = cos1(32);
        assert!(max_dev(&laplacian_power(&f, 1), &f.scale(-1.0)) < 1e-13);
        let c2 = GridFunction::discretize(|x, _| (2.0 * x).cos(), 32, Dim::One).unwrap();
        // Rounding noise near k = 16 is amplified by |k|⁴ ≈ 6.5e4.
        let d = max_dev(&laplacian_power(&c2, 2), &c2.scale(16.0));
        assert!(d < 1e-9, "{d}");
        assert!(laplacian_power(&GridFunction::constant(4.0, 16, Dim::One).unwrap(), 1).max_abs() < 1e-13);
    }

    #[test]
    fn spherical_means() {
        let one = GridFunction::constant(1.0, 32, Dim::Two).unwrap();
        let v = spherical_mean(&one, 0.7, 1, CIRCLE_POINTS).unwrap();
        assert!(v.samples().iter().all(|&x| x == 1.0 || (x - 1.0).abs() < 1e-15));
        assert_eq!(combined_mean_coefficients(1), vec![1.0]);
        let f = GridFunction::discretize(|x, _| x.cos(), 32, Dim::Two).unwrap();
        for &t in &[0.3, 1.0, 2.5] {
            // Oracle: dense midpoint quadrature of (1/2π)∫ cos(t cos θ) dθ.
            let m = 100_000;
            let j0 = (0..m).map(|j| (t * (2.0 * PI * (j as f64 + 0.5) / m as f64).cos()).cos()).sum::<f64>() / m as f64;
            let v = spherical_mean(&f, t, 1, CIRCLE_POINTS).unwrap();
            assert!(max_dev(&v, &f.scale(j0)) < 1e-8, "t={t}");
        }
        // Combined means reproduce constants too: Σ c_j = 1.
        for l in 1..=4 {
            assert!((combined_mean_coefficients(l).iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        assert!(spherical_mean(&cos1(16), 0.5, 1, 64).is_err());
    }

    #[test]
    fn splitting_identity() {
        let sg = Semigroup::shift();
        for i in 0..5 {
            let f = random_function(64, Dim::One, 21, i).unwrap();
            for r in 1..=3 {
                let lhs = sg.difference(&f, 0.3, r).unwrap();
                let rhs = identity_split(&f, &sg, 0.3, 0.17 * (i + 1) as f64, r).unwrap();
                assert!(max_dev(&lhs, &rhs) < 1e-10);
            }
        }
    }

    #[test]
    fn operator_spec_json() {
        let op: OperatorSpec = serde_json::from_str(r#"{"op":"cesaro","n":4,"l":1}"#).unwrap();
        assert_eq!(op, OperatorSpec::Cesaro { n: 4, l: 1 });
        let op: OperatorSpec = serde_json::from_str(r#"{"op":"sphmean","t":0.5}"#).unwrap();
        assert_eq!(op, OperatorSpec::Sphmean { t: 0.5, l: 1, quad_points: CIRCLE_POINTS });
        assert!(!OperatorSpec::Lap { l: 1 }.is_contraction());
        let f = cos1(16);
        let g = OperatorSpec::Heat { t: 0.1 }.apply(&f).unwrap();
        assert!(g.lp_norm(2.0) < f.lp_norm(2.0));
    }
}
