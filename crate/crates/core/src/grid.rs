//! Grid functions on `[0, 2π)^d` with the normalized measure, and the norms
//! `‖·‖_B` used throughout: `L_p`, Luxemburg and Orlicz.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan;
use crate::spectral::Spectrum;
use crate::young::YoungFunction;

/// Torus dimension. Serialized as the integer `1` or `2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn get(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

impl TryFrom<u8> for Dim {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            other => Err(Error::Dimension(format!("d must be 1 or 2, got {other}"))),
        }
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.get() as u8
    }
}

pub fn check_n(n: usize) -> Result<()> {
    if n >= 8 && n % 2 == 0 {
        Ok(())
    } else {
        Err(Error::GridSize(n))
    }
}

/// Real samples `f(x_i, y_j)` with `x_j = 2πj/N`, stored row-major.
///
/// An optional weight `w` (mean one, nonnegative) turns the measure into
/// `w(x) dx / (2π)^d`; operators carry the weight through unchanged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRecord", into = "GridRecord")]
pub struct GridFunction {
    d: Dim,
    n: usize,
    samples: Vec<f64>,
    weight: Option<Arc<[f64]>>,
}

#[derive(Serialize, Deserialize)]
struct GridRecord {
    d: Dim,
    #[serde(rename = "N")]
    n: usize,
    samples: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Vec<f64>>,
}

impl TryFrom<GridRecord> for GridFunction {
    type Error = Error;
    fn try_from(r: GridRecord) -> Result<Self> {
        let f = GridFunction::new(r.d, r.n, r.samples)?;
        match r.weight {
            Some(w) => f.with_weight(w),
            None => Ok(f),
        }
    }
}

impl From<GridFunction> for GridRecord {
    fn from(f: GridFunction) -> Self {
        GridRecord {
            d: f.d,
            n: f.n,
            samples: f.samples,
            weight: f.weight.map(|w| w.to_vec()),
        }
    }
}

impl GridFunction {
    pub fn new(d: Dim, n: usize, samples: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        let want = n.pow(d.get() as u32);
        if samples.len() != want {
            return Err(Error::Dimension(format!(
                "expected {want} samples for d={}, N={n}, got {}",
                d.get(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { d, n, samples, weight: None })
    }

    /// Samples `expr(x, y)` on the grid; `y = 0` when `d = 1`.
    pub fn discretize<E: Fn(f64, f64) -> f64>(expr: E, n: usize, d: Dim) -> Result<Self> {
        check_n(n)?;
        let h = 2.0 * PI / n as f64;
        let samples = match d {
            Dim::One => (0..n).map(|j| expr(h * j as f64, 0.0)).collect(),
            Dim::Two => (0..n * n).map(|k| expr(h * (k / n) as f64, h * (k % n) as f64)).collect(),
        };
        Self::new(d, n, samples)
    }

    pub fn constant(c: f64, n: usize, d: Dim) -> Result<Self> {
        Self::discretize(|_, _| c, n, d)
    }

    /// Attaches a nonnegative weight, rescaled to have mean one.
    pub fn with_weight(mut self, w: Vec<f64>) -> Result<Self> {
        if w.len() != self.samples.len() {
            return Err(Error::Dimension("weight length differs from sample count".into()));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::bad("weight", "entries must be finite and nonnegative"));
        }
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        if mean <= 0.0 {
            return Err(Error::bad("weight", "weight must have positive mass"));
        }
        self.weight = Some(w.into_iter().map(|v| v / mean).collect());
        Ok(self)
    }

    pub fn dim(&self) -> Dim {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn weight(&self) -> Option<&[f64]> {
        self.weight.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Same grid and weight, new samples. Callers guarantee finiteness.
    pub fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), self.samples.len());
        Self {
            d: self.d,
            n: self.n,
            samples,
            weight: self.weight.clone(),
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        self.with_samples(self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        debug_assert!(self.same_grid(other));
        self.with_samples(self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.d == other.d && self.n == other.n
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + c * b)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::forward(self.d.get(), self.n, &self.samples)
    }

    /// Integral of `g(f(x))` against the (weighted) normalized measure.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let total = self.samples.len() as f64;
        match &self.weight {
            None => self.samples.iter().map(|&v| g(v)).sum::<f64>() / total,
            Some(w) => self.samples.iter().zip(w.iter()).map(|(&v, &w)| w * g(v)).sum::<f64>() / total,
        }
    }

    /// `∫ f·g`, with the weight of `self`.
    pub fn inner(&self, other: &Self) -> f64 {
        let total = self.samples.len() as f64;
        let w = self.weight.as_deref();
        self.samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .map(|(i, (a, b))| a * b * w.map_or(1.0, |w| w[i]))
            .sum::<f64>()
            / total
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        if p == 2.0 {
            return self.integrate(|v| v * v).sqrt();
        }
        if p == 1.0 {
            return self.integrate(f64::abs);
        }
        // Factor out the sup to avoid overflow for large p.
        let top = self.max_abs();
        if top == 0.0 {
            return 0.0;
        }
        top * self.integrate(|v| (v.abs() / top).powf(p)).powf(1.0 / p)
    }

    /// `M_Φ(f) = ∫ Φ(|f|)`.
    pub fn orlicz_functional(&self, phi: &YoungFunction) -> f64 {
        self.integrate(|v| phi.of_abs(v))
    }

    /// `inf{a > 0 : M_Φ(f/a) ≤ 1}`.
    pub fn luxemburg_norm(&self, phi: &YoungFunction) -> f64 {
        let top = self.max_abs();
        if top == 0.0 {
            return 0.0;
        }
        let m = |a: f64| self.integrate(|v| phi.eval(v.abs() / a));
        let mut hi = top;
        while m(hi) > 1.0 {
            hi *= 2.0;
        }
        let mut lo = hi * 0.5;
        while m(lo) <= 1.0 && lo > f64::MIN_POSITIVE * 1e10 {
            hi = lo;
            lo *= 0.5;
        }
        let (_, hi) = scan::bisect(|a| m(a) <= 1.0, lo, hi, 1e-15, false);
        hi
    }

    /// Orlicz norm through the Amemiya form `inf_k (1 + M_Φ(kf))/k`.
    pub fn orlicz_norm(&self, phi: &YoungFunction) -> Result<f64> {
        if !phi.is_superlinear() {
            return Err(Error::ComplementUndefined(format!(
                "Orlicz norm needs a superlinear Young function, `{}` is not",
                phi.tag()
            )));
        }
        Ok(self.amemiya(phi).1)
    }

    /// `(k*, value)` minimizing the Amemiya functional.
    fn amemiya(&self, phi: &YoungFunction) -> (f64, f64) {
        let lux = self.luxemburg_norm(phi);
        if lux == 0.0 {
            return (1.0, 0.0);
        }
        // Negated objective in log k so the scan maximizes.
        let obj = |lk: f64| {
            let k = lk.exp();
            -(1.0 + self.integrate(|v| phi.eval(k * v.abs()))) / k
        };
        let base = (1.0 / lux).ln();
        let grid: Vec<f64> = (0..200).map(|i| base - 8.0 + 16.0 * i as f64 / 199.0).collect();
        let (best, _) = grid
            .iter()
            .map(|&x| obj(x))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let lo = grid[best.saturating_sub(1)];
        let hi = grid[(best + 1).min(grid.len() - 1)];
        // Absolute tolerance in log k; golden_max uses a relative bracket.
        let shift = 100.0 - lo;
        let (x, v) = scan::golden_max(|y| obj(y - shift), lo + shift, hi + shift, 1e-13);
        ((x - shift).exp(), -v)
    }

    /// Lower bound for the Orlicz norm from its dual definition:
    /// `sup ∫|f g|` over `g = Φ′(k h)` with `M_Ψ(g) = 1`, for a deterministic
    /// candidate set of shapes `h`. Uses `Ψ(Φ′(x)) = xΦ′(x) − Φ(x)`, so no
    /// numerical conjugation is needed.
    pub fn orlicz_dual_lower_bound(&self, phi: &YoungFunction, seed: u64, random_shapes: usize) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let abs: Vec<f64> = self.samples.iter().map(|v| v.abs()).collect();
        let mut shapes: Vec<Vec<f64>> = vec![
            abs.clone(),
            abs.iter().map(|v| v.sqrt()).collect(),
            abs.iter().map(|v| v * v).collect(),
            vec![1.0; abs.len()],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..random_shapes {
            shapes.push(
                abs.iter()
                    .map(|v| v * (1.0 + 0.5 * rng.sample::<f64, _>(StandardNormal)).abs())
                    .collect(),
            );
        }
        let total = abs.len() as f64;
        let w = self.weight.as_deref();
        let wt = |i: usize| w.map_or(1.0, |w| w[i]);
        let mut best = 0.0f64;
        for h in &shapes {
            let top = h.iter().cloned().fold(0.0, f64::max);
            if top == 0.0 {
                continue;
            }
            let m_psi = |k: f64| {
                h.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let x = k * v;
                        wt(i) * (x * phi.deriv_right(x) - phi.eval(x)).max(0.0)
                    })
                    .sum::<f64>()
                    / total
            };
            let mut hi = 1.0 / top;
            let mut guard = 0;
            while m_psi(hi) < 1.0 && guard < 200 {
                hi *= 2.0;
                guard += 1;
            }
            if m_psi(hi) < 1.0 {
                continue;
            }
            let mut lo = hi * 0.5;
            while m_psi(lo) >= 1.0 && lo > 1e-300 {
                hi = lo;
                lo *= 0.5;
            }
            // Largest k with M_Ψ ≤ 1 keeps g admissible.
            let (k, _) = scan::bisect(|k| m_psi(k) > 1.0, lo, hi, 1e-14, false);
            let val = h
                .iter()
                .enumerate()
                .map(|(i, &v)| wt(i) * abs[i] * phi.deriv_right(k * v))
                .sum::<f64>()
                / total;
            best = best.max(val);
        }
        best
    }

    pub fn norm(&self, spec: &NormSpec) -> f64 {
        match &spec.kind {
            NormKind::Lp { p } => self.lp_norm(*p),
            NormKind::Luxemburg { phi } => self.luxemburg_norm(phi),
            NormKind::Orlicz { phi } => self.amemiya(phi).1,
        }
    }
}

/// Which Banach norm `‖·‖_B` to use.
#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    Lp { p: f64 },
    Luxemburg { phi: YoungFunction },
    Orlicz { phi: YoungFunction },
}

/// A norm together with its optional convexity data `s, q, m, M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormRecord", into = "NormRecord")]
pub struct NormSpec {
    pub kind: NormKind,
    s: Option<f64>,
    q: Option<f64>,
    pub m: Option<f64>,
    pub big_m: Option<f64>,
}

impl NormSpec {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::param("p", format!("need 1 ≤ p ≤ ∞, got {p}")));
        }
        Ok(Self::bare(NormKind::Lp { p }))
    }

    pub fn luxemburg(phi: YoungFunction) -> Self {
        Self::bare(NormKind::Luxemburg { phi })
    }

    pub fn orlicz(phi: YoungFunction) -> Result<Self> {
        if !phi.is_superlinear() {
            return Err(Error::ComplementUndefined(format!(
                "Orlicz norm needs a superlinear Young function, `{}` is not",
                phi.tag()
            )));
        }
        Ok(Self::bare(NormKind::Orlicz { phi }))
    }

    fn bare(kind: NormKind) -> Self {
        Self { kind, s: None, q: None, m: None, big_m: None }
    }

    /// Sets the convexity exponent `s ≥ 2`; fills `q = s/(s−1)` if unset.
    pub fn with_s(mut self, s: f64) -> Result<Self> {
        if !(s >= 2.0 && s.is_finite()) {
            return Err(Error::param("s", format!("need 2 ≤ s < ∞, got {s}")));
        }
        self.s = Some(s);
        self.check_pair()?;
        Ok(self)
    }

    pub fn with_q(mut self, q: f64) -> Result<Self> {
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::param("q", format!("need 1 < q ≤ 2, got {q}")));
        }
        self.q = Some(q);
        self.check_pair()?;
        Ok(self)
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    fn check_pair(&self) -> Result<()> {
        if let (Some(s), Some(q)) = (self.s, self.q) {
            if (1.0 / s + 1.0 / q - 1.0).abs() > 1e-12 {
                return Err(Error::param("s,q", format!("1/s + 1/q must be 1, got s={s}, q={q}")));
            }
        }
        Ok(())
    }

    /// Convexity exponent: explicit value, else `max(p, 2)` for `L_p`,
    /// `1 < p < ∞`, else the conjugate of `q`.
    pub fn s(&self) -> Option<f64> {
        self.s.or(match self.kind {
            NormKind::Lp { p } if p > 1.0 && p.is_finite() => Some(p.max(2.0)),
            _ => self.q.map(|q| q / (q - 1.0)),
        })
    }

    pub fn q(&self) -> Option<f64> {
        self.q.or_else(|| self.s().map(|s| s / (s - 1.0)))
    }

    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Lp { p } if p.is_infinite() => "L_inf".into(),
            NormKind::Lp { p } => format!("L_{p}"),
            NormKind::Luxemburg { phi } => format!("luxemburg({})", phi.tag()),
            NormKind::Orlicz { phi } => format!("orlicz({})", phi.tag()),
        }
    }

    pub fn phi(&self) -> Option<&YoungFunction> {
        match &self.kind {
            NormKind::Lp { .. } => None,
            NormKind::Luxemburg { phi } | NormKind::Orlicz { phi } => Some(phi),
        }
    }
}

/// `p` may be a number or the string `"inf"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum PValue {
    Num(f64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct NormRecord {
    norm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<YoungFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    big_m: Option<f64>,
}

impl TryFrom<NormRecord> for NormSpec {
    type Error = Error;
    fn try_from(r: NormRecord) -> Result<Self> {
        let need_phi = || r.phi.clone().ok_or_else(|| Error::MissingParam("phi".into()));
        let mut spec = match r.norm.as_str() {
            "lp" => {
                let p = match &r.p {
                    Some(PValue::Num(p)) => *p,
                    Some(PValue::Text(t)) if matches!(t.as_str(), "inf" | "infinity") => f64::INFINITY,
                    Some(PValue::Text(t)) => return Err(Error::bad("p", format!("not a number: `{t}`"))),
                    None => return Err(Error::MissingParam("p".into())),
                };
                NormSpec::lp(p)?
            }
            "luxemburg" => NormSpec::luxemburg(need_phi()?),
            "orlicz" => NormSpec::orlicz(need_phi()?)?,
            other => return Err(Error::bad("norm", format!("unknown norm `{other}`"))),
        };
        if let Some(s) = r.s {
            spec = spec.with_s(s)?;
        }
        if let Some(q) = r.q {
            spec = spec.with_q(q)?;
        }
        spec.m = r.m;
        spec.big_m = r.big_m;
        Ok(spec)
    }
}

impl From<NormSpec> for NormRecord {
    fn from(n: NormSpec) -> Self {
        let (norm, p, phi) = match n.kind {
            NormKind::Lp { p } if p.is_infinite() => ("lp", Some(PValue::Text("inf".into())), None),
            NormKind::Lp { p } => ("lp", Some(PValue::Num(p)), None),
            NormKind::Luxemburg { phi } => ("luxemburg", None, Some(phi)),
            NormKind::Orlicz { phi } => ("orlicz", None, Some(phi)),
        };
        NormRecord {
            norm: norm.into(),
            p,
            phi,
            s: n.s,
            q: n.q,
            m: n.m,
            big_m: n.big_m,
        }
    }
}

/// Named test functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// `cos x` (`cos x + cos y` in 2D).
    Cos,
    /// `|sin x|`: Lipschitz but not `C¹`.
    AbsSin,
    /// Partial sum `Σ_{k≤K} sin(kx)/k` with `K = min(64, N/2 − 1)`.
    Sawtooth,
    /// Seeded random band-limited function with `1/k²` tails.
    Random,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [Self::Cos, Self::AbsSin, Self::Sawtooth, Self::Random];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cos => "cos",
            Self::AbsSin => "abs_sin",
            Self::Sawtooth => "sawtooth",
            Self::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }

    pub fn build(self, n: usize, d: Dim, seed: u64) -> Result<GridFunction> {
        let both = |g: &dyn Fn(f64) -> f64| match d {
            Dim::One => GridFunction::discretize(|x, _| g(x), n, d),
            Dim::Two => GridFunction::discretize(|x, y| g(x) + g(y), n, d),
        };
        match self {
            Self::Cos => both(&f64::cos),
            Self::AbsSin => both(&|x: f64| x.sin().abs()),
            Self::Sawtooth => {
                let top = 64.min(n / 2 - 1);
                both(&move |x: f64| (1..=top).map(|k| (k as f64 * x).sin() / k as f64).sum())
            }
            Self::Random => random_function(n, d, seed, 0),
        }
    }
}

/// The standard family `{cos, |sin|, sawtooth, random}` in dimension `d`.
pub fn standard_family(n: usize, d: Dim, seed: u64) -> Result<Vec<(String, GridFunction)>> {
    TestFunction::ALL
        .iter()
        .map(|f| Ok((f.name().to_string(), f.build(n, d, seed)?)))
        .collect()
}

/// Random real function number `index` of the stream seeded by `seed`.
///
/// Fourier coefficients are standard normal for `|k|_∞ ≤ 8` and
/// `N(0,1)/|k|²` up to `|k|_∞ ≤ N/4`; the result is scaled to unit `L₂` norm.
/// Each index draws from its own ChaCha stream, so the `i`-th function does
/// not depend on how many others are generated.
pub fn random_function(n: usize, d: Dim, seed: u64, index: u64) -> Result<GridFunction> {
    random_band_limited(n, d, seed, index, n / 4, true)
}

/// Like [`random_function`] with a hard band limit and optional tails.
pub fn random_band_limited(
    n: usize,
    d: Dim,
    seed: u64,
    index: u64,
    band: usize,
    tails: bool,
) -> Result<GridFunction> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let band = band.min(n / 2 - 1) as i64;
    let dd = d.get();
    let len = n.pow(dd as u32);
    let zero = GridFunction::new(d, n, vec![0.0; len])?;
    let spec = zero.spectrum();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
    // Draw in a fixed frequency order so the stream layout is stable.
    for (idx, c) in coeffs.iter_mut().enumerate() {
        let (k1, k2) = spec.freqs(idx);
        let kmax = k1.abs().max(k2.abs());
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let amp = if kmax <= 8.min(band) {
            1.0
        } else if tails && kmax <= band {
            1.0 / (k1 * k1 + k2 * k2) as f64
        } else {
            0.0
        };
        *c = Complex64::new(re, im) * amp;
    }
    let samples = Spectrum::from_parts(dd, n, coeffs).to_real();
    let f = GridFunction::new(d, n, samples)?;
    let norm = f.lp_norm(2.0);
    Ok(f.scale(1.0 / norm))
}

/// Band-limited random function plus small white noise; used where an exact
/// `L₂` best-approximation error is needed as an oracle.
pub fn random_band_plus_noise(n: usize, d: Dim, seed: u64, index: u64, band: usize, noise: f64) -> Result<GridFunction> {
    let base = random_band_limited(n, d, seed, index, band, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.set_stream(index);
    let samples = base.samples().iter().map(|v| v + noise * rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(base.with_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosf(n: usize) -> GridFunction {
        GridFunction::discretize(|x, _| x.cos(), n, Dim::One).unwrap()
    }

    #[test]
    fn discretize_basics() {
        assert_eq!(cosf(8).samples()[0], 1.0);
        let c = GridFunction::constant(1.0, 16, Dim::Two).unwrap();
        assert!(c.samples().iter().all(|&v| v == 1.0));
        assert!(matches!(GridFunction::constant(1.0, 5, Dim::One), Err(Error::GridSize(5))));
        assert!(GridFunction::constant(1.0, 6, Dim::One).is_err());
    }

    #[test]
    fn lp_norms_of_cos() {
        let f = cosf(64);
        assert!((f.lp_norm(2.0) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((f.lp_norm(f64::INFINITY) - 1.0).abs() < 1e-15);
        let c = GridFunction::constant(-3.0, 16, Dim::One).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((c.lp_norm(p) - 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn orlicz_functional_cases() {
        let sq = YoungFunction::power(2.0).unwrap();
        assert!((GridFunction::constant(3.0, 8, Dim::One).unwrap().orlicz_functional(&sq) - 9.0).abs() < 1e-14);
        assert!((cosf(32).orlicz_functional(&sq) - 0.5).abs() < 1e-14);
        assert_eq!(GridFunction::constant(0.0, 8, Dim::One).unwrap().orlicz_functional(&sq), 0.0);
    }

    #[test]
    fn luxemburg_and_orlicz_of_cos() {
        let sq = YoungFunction::power(2.0).unwrap();
        let f = cosf(64);
        assert!((f.luxemburg_norm(&sq) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((f.orlicz_norm(&sq).unwrap() - 2f64.sqrt()).abs() < 1e-9);
        let z = GridFunction::constant(0.0, 8, Dim::One).unwrap();
        assert_eq!(z.luxemburg_norm(&sq), 0.0);
        assert_eq!(z.orlicz_norm(&sq).unwrap(), 0.0);
    }

    #[test]
    fn luxemburg_zygmund_constant() {
        // Oracle: x* solving x² ln(2 + x) = 1 by plain bisection.
        let (mut lo, mut hi) = (0.5f64, 1.5f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * (2.0 + mid).ln() > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let xs = 0.5 * (lo + hi);
        assert!((xs - 0.9600).abs() < 1e-4);
        let z = YoungFunction::zygmund(2.0, 0.5).unwrap();
        let c = 2.5;
        let f = GridFunction::constant(c, 16, Dim::One).unwrap();
        assert!((f.luxemburg_norm(&z) - c / xs).abs() < 1e-12);
    }

    #[test]
    fn dual_bound_touches_orlicz_norm() {
        let z = YoungFunction::zygmund(2.0, 0.5).unwrap();
        let f = random_function(64, Dim::One, 7, 0).unwrap();
        let orl = f.orlicz_norm(&z).unwrap();
        let dual = f.orlicz_dual_lower_bound(&z, 1, 8);
        assert!(dual <= orl * (1.0 + 1e-9), "{dual} > {orl}");
        assert!(dual >= orl * (1.0 - 1e-6), "{dual} ≪ {orl}");
    }

    #[test]
    fn norm_spec_json() {
        let n: NormSpec = serde_json::from_str(r#"{"norm":"lp","p":2}"#).unwrap();
        assert_eq!(n.s(), Some(2.0));
        let n: NormSpec = serde_json::from_str(r#"{"norm":"lp","p":4}"#).unwrap();
        assert_eq!(n.s(), Some(4.0));
        assert_eq!(n.q(), Some(4.0 / 3.0));
        let n: NormSpec = serde_json::from_str(r#"{"norm":"lp","p":"inf"}"#).unwrap();
        assert_eq!(n.label(), "L_inf");
        let n: NormSpec =
            serde_json::from_str(r#"{"norm":"orlicz","phi":{"kind":"power","params":[2]}}"#).unwrap();
        assert_eq!(n.label(), "orlicz(power)");
        assert!(serde_json::from_str::<NormSpec>(r#"{"norm":"lp","p":2,"s":3,"q":2}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(r#"{"norm":"orlicz","phi":{"kind":"power","params":[1]}}"#).is_err());
    }

    #[test]
    fn grid_json_round_trip() {
        let f = cosf(8);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with(r#"{"d":1,"N":8,"samples":"#));
        let back: GridFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<GridFunction>(r#"{"d":3,"N":8,"samples":[]}"#).is_err());
    }

    #[test]
    fn weights_are_normalized() {
        let f = GridFunction::constant(2.0, 8, Dim::One).unwrap().with_weight(vec![3.0; 8]).unwrap();
        assert!((f.lp_norm(1.0) - 2.0).abs() < 1e-15);
        assert!(GridFunction::constant(2.0, 8, Dim::One).unwrap().with_weight(vec![-1.0; 8]).is_err());
    }

    #[test]
    fn random_functions_are_deterministic_and_prefix_stable() {
        let a = random_function(64, Dim::One, 42, 3).unwrap();
        let b = random_function(64, Dim::One, 42, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_function(64, Dim::One, 42, 4).unwrap());
        assert!((a.lp_norm(2.0) - 1.0).abs() < 1e-12);
        assert!(random_function(16, Dim::Two, 1, 0).unwrap().len() == 256);
    }

    #[test]
    fn families_build() {
        for d in [Dim::One, Dim::Two] {
            let fam = standard_family(32, d, 5).unwrap();
            assert_eq!(fam.len(), 4);
            assert!(fam.iter().all(|(_, f)| f.lp_norm(2.0) > 0.1));
        }
    }
}
