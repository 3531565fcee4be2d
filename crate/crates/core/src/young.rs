//! Young functions: builtin families, numerical conjugation, Δ₂/∇₂
//! diagnostics, power-concavity regions and the concave patching construction.
//!
//! A Young function is a convex, strictly increasing `Φ: [0, ∞) → [0, ∞)` with
//! `Φ(0) = 0`. Every variant here is an evaluable record with one-sided
//! derivatives; nothing is stored as a sample table.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scan::{self, X_HI, X_LO};

/// Threshold on `r` for `u^r (1 + |ln u|)` to be convex: `(3 + √5) / 2`.
pub const LOG_POWER_MIN_R: f64 = 2.618_033_988_749_895;

/// Default number of log-grid points used by conjugation scans.
pub const DEFAULT_CONJUGATE_RESOLUTION: usize = 401;

#[derive(Clone, Debug, PartialEq)]
pub enum YoungKind {
    /// `u^p`, `p ≥ 1`.
    Power { p: f64 },
    /// `max(u^α, u^β)`, `1 < α < β`.
    TwoPower { alpha: f64, beta: f64 },
    /// `u^r (1 + |ln u|)`, `r ≥ (3+√5)/2`.
    LogPower { r: f64 },
    /// `u^p ln(2+u)^{αp}`, `p ≥ 1`, `αp ≥ 1`.
    Zygmund { p: f64, alpha: f64 },
    /// `e^u − 1 − u`. Fails Δ₂; used for negative tests.
    Exp,
    Patched(Box<Patch>),
    Complementary(Box<Conjugate>),
}

/// Piecewise construction that makes `Φ̃(u^{1/s})` globally concave.
///
/// `Φ̃ = c₁Φ` on `[0, a]`, `Φ̃ = c₂ + Φ` on `[b, ∞)`, and in between
/// `Φ̃′(x) = k x^{1−1/s}` with `k = Φ′(b+) b^{1/s−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub base: YoungFunction,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    k: f64,
}

/// `Ψ(y) = sup_{x ≥ 0} (xy − Φ(x))`, evaluated on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct Conjugate {
    pub base: YoungFunction,
    pub y_max: f64,
    pub resolution: usize,
    grid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungRecord", into = "YoungRecord")]
pub struct YoungFunction {
    kind: YoungKind,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("power requires p ≥ 1, got {p}")));
        }
        Ok(Self::from_kind(YoungKind::Power { p }))
    }

    pub fn two_power(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 1.0 && beta > alpha && beta.is_finite()) {
            return Err(Error::param(
                "alpha,beta",
                format!("two_power requires 1 < α < β, got α={alpha}, β={beta}"),
            ));
        }
        Ok(Self::from_kind(YoungKind::TwoPower { alpha, beta }))
    }

    pub fn log_power(r: f64) -> Result<Self> {
        if !(r >= LOG_POWER_MIN_R && r.is_finite()) {
            return Err(Error::param(
                "r",
                format!("log_power requires r ≥ (3+√5)/2 ≈ {LOG_POWER_MIN_R:.6} for convexity, got {r}"),
            ));
        }
        Ok(Self::from_kind(YoungKind::LogPower { r }))
    }

    pub fn zygmund(p: f64, alpha: f64) -> Result<Self> {
        if !(p >= 1.0 && alpha * p >= 1.0 && p.is_finite() && alpha.is_finite()) {
            return Err(Error::param(
                "p,alpha",
                format!("zygmund requires p ≥ 1 and αp ≥ 1, got p={p}, α={alpha}"),
            ));
        }
        Ok(Self::from_kind(YoungKind::Zygmund { p, alpha }))
    }

    pub fn exp() -> Self {
        Self::from_kind(YoungKind::Exp)
    }

    /// Builds a builtin from its JSON kind tag and parameter list.
    pub fn builtin(kind: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::param(
                    "params",
                    format!("`{kind}` takes {n} parameter(s), got {}", params.len()),
                ))
            }
        };
        match kind {
            "power" => want(1).and_then(|_| Self::power(params[0])),
            "two_power" => want(2).and_then(|_| Self::two_power(params[0], params[1])),
            "log_power" => want(1).and_then(|_| Self::log_power(params[0])),
            "zygmund" => want(2).and_then(|_| Self::zygmund(params[0], params[1])),
            "exp" => want(0).map(|_| Self::exp()),
            other => Err(Error::param("kind", format!("unknown Young function kind `{other}`"))),
        }
    }

    fn from_kind(kind: YoungKind) -> Self {
        Self { kind }
    }

    pub fn kind(&self) -> &YoungKind {
        &self.kind
    }

    /// Short tag used in JSON records and report labels.
    pub fn tag(&self) -> &'static str {
        match self.kind {
            YoungKind::Power { .. } => "power",
            YoungKind::TwoPower { .. } => "two_power",
            YoungKind::LogPower { .. } => "log_power",
            YoungKind::Zygmund { .. } => "zygmund",
            YoungKind::Exp => "exp",
            YoungKind::Patched(_) => "patched",
            YoungKind::Complementary(_) => "complementary",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            YoungKind::Power { p } => x.powf(*p),
            YoungKind::TwoPower { alpha, beta } => {
                if x <= 1.0 {
                    x.powf(*alpha)
                } else {
                    x.powf(*beta)
                }
            }
            YoungKind::LogPower { r } => x.powf(*r) * (1.0 + x.ln().abs()),
            YoungKind::Zygmund { p, alpha } => x.powf(*p) * (2.0 + x).ln().powf(alpha * p),
            YoungKind::Exp => x.exp_m1() - x,
            YoungKind::Patched(pt) => pt.eval(x),
            YoungKind::Complementary(cj) => cj.eval(x),
        }
    }

    /// Right derivative `Φ′(x+)`.
    pub fn deriv_right(&self, x: f64) -> f64 {
        self.deriv(x.max(0.0), true)
    }

    /// Left derivative `Φ′(x−)`; equals the right derivative at `x = 0`.
    pub fn deriv_left(&self, x: f64) -> f64 {
        self.deriv(x.max(0.0), x <= 0.0)
    }

    fn deriv(&self, x: f64, right: bool) -> f64 {
        match &self.kind {
            YoungKind::Power { p } => {
                if x == 0.0 {
                    if *p == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    p * x.powf(p - 1.0)
                }
            }
            YoungKind::TwoPower { alpha, beta } => {
                if x < 1.0 || (x == 1.0 && !right) {
                    if x == 0.0 {
                        0.0
                    } else {
                        alpha * x.powf(alpha - 1.0)
                    }
                } else {
                    beta * x.powf(beta - 1.0)
                }
            }
            YoungKind::LogPower { r } => {
                if x == 0.0 {
                    0.0
                } else if x < 1.0 || (x == 1.0 && !right) {
                    x.powf(r - 1.0) * (r - 1.0 - r * x.ln())
                } else {
                    x.powf(r - 1.0) * (r + 1.0 + r * x.ln())
                }
            }
            YoungKind::Zygmund { p, alpha } => {
                let l = (2.0 + x).ln();
                let lead = if x == 0.0 {
                    if *p == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    x.powf(p - 1.0)
                };
                p * lead * l.powf(alpha * p - 1.0) * (l + alpha * x / (2.0 + x))
            }
            YoungKind::Exp => x.exp_m1(),
            YoungKind::Patched(pt) => pt.deriv(x, right),
            YoungKind::Complementary(cj) => cj.argmax(x),
        }
    }

    /// Numerical superlinearity: `Φ(X_HI)/X_HI ≥ 2 Φ(1)` on the working range.
    pub fn is_superlinear(&self) -> bool {
        let top = self.eval(X_HI) / X_HI;
        top.is_nan() || top >= 2.0 * self.eval(1.0)
    }

    /// Orlicz functional kernel shorthand: `Φ(|v|)`.
    #[inline]
    pub fn of_abs(&self, v: f64) -> f64 {
        self.eval(v.abs())
    }
}

impl Patch {
    fn eval(&self, x: f64) -> f64 {
        let e = 2.0 - 1.0 / self.s;
        if x <= self.a {
            self.c1 * self.base.eval(x)
        } else if x <= self.b {
            self.c1 * self.base.eval(self.a) + self.k * (x.powf(e) - self.a.powf(e)) / e
        } else {
            self.c2 + self.base.eval(x)
        }
    }

    fn deriv(&self, x: f64, right: bool) -> f64 {
        let below_a = x < self.a || (x == self.a && !right);
        let above_b = x > self.b || (x == self.b && right);
        if below_a {
            self.c1 * self.base.deriv(x, right)
        } else if above_b {
            self.base.deriv(x, right)
        } else {
            self.k * x.powf(1.0 - 1.0 / self.s)
        }
    }
}

impl Conjugate {
    fn eval(&self, y: f64) -> f64 {
        self.sup(y).1
    }

    /// Maximizer of `xy − Φ(x)`; this is `Ψ′(y)`.
    fn argmax(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        self.sup(y).0
    }

    fn sup(&self, y: f64) -> (f64, f64) {
        if y <= 0.0 {
            return (0.0, 0.0);
        }
        let g = |x: f64| x * y - self.base.eval(x);
        let (x, v, _) = scan::grid_then_golden(g, &self.grid, 1e-11);
        if v > 0.0 {
            (x, v)
        } else {
            (0.0, 0.0)
        }
    }
}

/// The complementary Young function `Ψ(y) = sup{xy − Φ(x) : x ≥ 0}`.
///
/// Evaluation maximizes over a log grid on `[1e-6, 1e6]` with `resolution`
/// points and refines by golden-section search. Values are trustworthy for
/// `y ≤ y_max`; the constructor rejects `Φ` whose slope at the top of the
/// grid does not exceed `y_max`.
pub fn complementary(phi: &YoungFunction, y_max: f64, resolution: usize) -> Result<YoungFunction> {
    if !(y_max > 0.0 && y_max.is_finite()) {
        return Err(Error::param("y_max", format!("must be positive and finite, got {y_max}")));
    }
    if resolution < 16 {
        return Err(Error::param("resolution", format!("need at least 16 points, got {resolution}")));
    }
    let slope_top = phi.deriv_left(X_HI);
    if !phi.is_superlinear() || !(slope_top.is_nan() || slope_top > y_max) {
        return Err(Error::ComplementUndefined(format!(
            "{} has slope {slope_top:.6e} at x={X_HI:e}, not above y_max={y_max:e}",
            phi.tag()
        )));
    }
    let grid = scan::log_grid(X_LO, X_HI, resolution);
    Ok(YoungFunction::from_kind(YoungKind::Complementary(Box::new(Conjugate {
        base: phi.clone(),
        y_max,
        resolution,
        grid,
    }))))
}

/// Outcome of the Δ₂ scan `Φ(2x) ≤ KΦ(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Delta2Report {
    pub holds: bool,
    /// `sup Φ(2x)/Φ(x)` over the grid; infinite on overflow.
    pub k: f64,
    /// Change of `log10` of the ratio over the top decade of the range.
    pub slope_per_decade: f64,
}

/// Growth-slope threshold above which the Δ₂ ratio is declared exploding.
pub const DELTA2_SLOPE_THRESHOLD: f64 = 0.01;

pub fn check_delta2(phi: &YoungFunction, u_lo: f64, u_hi: f64) -> Result<Delta2Report> {
    check_range(u_lo, u_hi)?;
    let ratio = |x: f64| phi.eval(2.0 * x) / phi.eval(x);
    let grid = scan::log_grid(u_lo, u_hi, points_for(u_lo, u_hi));
    let mut k = 0.0f64;
    for &x in &grid {
        let r = ratio(x);
        if r.is_nan() || r.is_infinite() {
            k = f64::INFINITY;
            break;
        }
        k = k.max(r);
    }
    let decades = (u_hi / u_lo).log10().min(1.0);
    let below = u_hi / 10f64.powf(decades);
    let slope = (ratio(u_hi).log10() - ratio(below).log10()) / decades;
    let holds = k.is_finite() && slope.is_finite() && slope < DELTA2_SLOPE_THRESHOLD;
    Ok(Delta2Report {
        holds,
        k,
        slope_per_decade: if slope.is_nan() { f64::INFINITY } else { slope },
    })
}

/// Outcome of the ∇₂ search `Ψ(x) ≤ Ψ(ax)/(2a)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Nabla2Report {
    pub holds: bool,
    /// Smallest feasible `a` on the grid `2^{k/32}`, `k = 1..=192`.
    pub a: Option<f64>,
}

pub fn check_nabla2(psi: &YoungFunction, u_lo: f64, u_hi: f64) -> Result<Nabla2Report> {
    check_range(u_lo, u_hi)?;
    let xs = scan::log_grid(u_lo, u_hi, points_for(u_lo, u_hi));
    let vals: Vec<f64> = xs.iter().map(|&x| psi.eval(x)).collect();
    for k in 1..=192 {
        let a = 2f64.powf(k as f64 / 32.0);
        let ok = xs.iter().zip(&vals).all(|(&x, &v)| {
            let rhs = psi.eval(a * x) / (2.0 * a);
            v <= rhs * (1.0 + 1e-12)
        });
        if ok {
            return Ok(Nabla2Report { holds: true, a: Some(a) });
        }
    }
    Ok(Nabla2Report { holds: false, a: None })
}

fn check_range(u_lo: f64, u_hi: f64) -> Result<()> {
    if !(u_lo > 0.0 && u_hi > u_lo && u_hi.is_finite()) {
        return Err(Error::param("u_lo,u_hi", format!("need 0 < u_lo < u_hi, got [{u_lo}, {u_hi}]")));
    }
    Ok(())
}

fn points_for(lo: f64, hi: f64) -> usize {
    ((hi / lo).log10() * 50.0).ceil().max(64.0) as usize
}

/// Maximal intervals on which `u ↦ Φ(u^{1/s})` is concave.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcavityRegions {
    pub s: f64,
    pub u_lo: f64,
    pub u_hi: f64,
    /// Disjoint, ordered `[u₁, u₂]` pairs. An endpoint equal to `u_lo` or
    /// `u_hi` means the region reaches the end of the scanned range.
    pub intervals: Vec<(f64, f64)>,
}

impl ConcavityRegions {
    /// Whether a single interval covers `[lo, hi]` (relative slack `1e-9`).
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| a <= lo * (1.0 + 1e-9) && b >= hi * (1.0 - 1e-9))
    }

    pub fn covers_all(&self) -> bool {
        self.covers(self.u_lo, self.u_hi)
    }
}

const CONCAVITY_REL_TOL: f64 = 1e-9;

/// Relative slope jump of `g` across `x1` for the stencil `x0 < x1 < x2`:
/// positive means convex, nonpositive means concave.
fn slope_jump<G: Fn(f64) -> f64>(g: &G, x0: f64, x1: f64, x2: f64) -> f64 {
    let (g0, g1, g2) = (g(x0), g(x1), g(x2));
    let s1 = (g1 - g0) / (x1 - x0);
    let s2 = (g2 - g1) / (x2 - x1);
    let scale = s1.abs() + s2.abs();
    if scale == 0.0 {
        0.0
    } else {
        (s2 - s1) / scale
    }
}

pub(crate) fn power_slope_jump(phi: &YoungFunction, s: f64, x0: f64, x1: f64, x2: f64) -> f64 {
    let g = |u: f64| phi.eval(u.powf(1.0 / s));
    slope_jump(&g, x0, x1, x2)
}

pub fn power_concavity_regions(
    phi: &YoungFunction,
    s: f64,
    u_lo: f64,
    u_hi: f64,
    resolution: usize,
) -> Result<ConcavityRegions> {
    if !(s >= 2.0 && s.is_finite()) {
        return Err(Error::param("s", format!("need s ≥ 2, got {s}")));
    }
    check_range(u_lo, u_hi)?;
    if resolution < 8 {
        return Err(Error::param("resolution", "need at least 8 points"));
    }
    let grid = scan::log_grid(u_lo, u_hi, resolution);
    let concave: Vec<bool> = (1..grid.len() - 1)
        .map(|i| power_slope_jump(phi, s, grid[i - 1], grid[i], grid[i + 1]) <= CONCAVITY_REL_TOL)
        .collect();
    // Pointwise predicate with a narrow stencil, used to sharpen boundaries.
    let eta = 1e-6;
    let local = |u: f64| power_slope_jump(phi, s, u * (1.0 - eta), u, u * (1.0 + eta)) <= 1e-6;
    let jump = |x0: f64, x1: f64, x2: f64| power_slope_jump(phi, s, x0, x1, x2);

    // Runs of concave interior points; concave[j] sits at grid[j + 1].
    let mut runs = Vec::new();
    let mut i = 0;
    while i < concave.len() {
        if !concave[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < concave.len() && concave[i] {
            i += 1;
        }
        runs.push((start, i - 1));
    }
    // Each edge is searched across the whole gap to the neighbouring run,
    // since a wide stencil flags several cells around a kink.
    let last = concave.len() - 1;
    let mut intervals = Vec::with_capacity(runs.len());
    for (k, &(start, end)) in runs.iter().enumerate() {
        let left = if start == 0 {
            u_lo
        } else {
            let from = if k == 0 { 0 } else { runs[k - 1].1 + 1 };
            edge(&local, &jump, grid[from], grid[start + 1], true)
        };
        let right = if end == last {
            u_hi
        } else {
            let to = runs.get(k + 1).map_or(last + 2, |r| r.0 + 1);
            edge(&local, &jump, grid[end + 1], grid[to], false)
        };
        intervals.push((left, right));
    }
    Ok(ConcavityRegions { s, u_lo, u_hi, intervals })
}

/// Edge of a concave region inside `[a, b]`: the last change of `local`
/// into `entering` (left edge) or out of it (right edge). A wide stencil
/// flags a kink from several neighbouring grid cells, so the bracket
/// spans the gap and is scanned finely before bisecting. A kink can be
/// narrower than the fine spacing; then we zoom in on the largest slope
/// jump until the bracket collapses.
fn edge<P, J>(local: &P, jump: &J, mut a: f64, mut b: f64, left: bool) -> f64
where
    P: Fn(f64) -> bool,
    J: Fn(f64, f64, f64) -> f64,
{
    for _ in 0..16 {
        let fine = scan::log_grid(a, b, 257);
        let flags: Vec<bool> = fine.iter().map(|&u| local(u)).collect();
        let pair = if left {
            (1..fine.len()).rev().find(|&i| flags[i] && !flags[i - 1])
        } else {
            (1..fine.len()).find(|&i| flags[i - 1] && !flags[i])
        };
        if let Some(i) = pair {
            let (lo, hi) = if left {
                scan::bisect(local, fine[i - 1], fine[i], 1e-12, true)
            } else {
                scan::bisect(|u| !local(u), fine[i - 1], fine[i], 1e-12, true)
            };
            return 0.5 * (lo + hi);
        }
        let i = (1..fine.len() - 1)
            .max_by(|&i, &j| {
                let ji = jump(fine[i - 1], fine[i], fine[i + 1]);
                let jj = jump(fine[j - 1], fine[j], fine[j + 1]);
                ji.total_cmp(&jj)
            })
            .unwrap_or(128);
        (a, b) = (fine[i - 1], fine[i + 1]);
        if b / a - 1.0 <= 1e-12 {
            break;
        }
    }
    (a * b).sqrt()
}

/// Largest positive relative slope jump of `Φ(u^{1/s})` over a log grid;
/// `≤ 0` up to rounding means the composition is concave there.
pub fn max_power_convexity(phi: &YoungFunction, s: f64, grid: &[f64]) -> f64 {
    grid.windows(3)
        .map(|w| power_slope_jump(phi, s, w[0], w[1], w[2]))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Threshold beyond which the second derivative of `Φ(u^{1/s})` for
/// `Φ = u^r(1+|ln u|)`, `s > r`, is guaranteed nonpositive: the solution of
/// `(r/s)(r/s − 1) ln u₀ = −1`. It is a sufficient bound, not the boundary
/// of the concavity region.
pub fn log_power_sufficient_threshold(r: f64, s: f64) -> Result<f64> {
    if !(s > r) {
        return Err(Error::param("s", format!("threshold needs s > r, got r={r}, s={s}")));
    }
    let k = r / s;
    Ok((-1.0 / (k * (k - 1.0))).exp())
}

/// Result of [`patch`].
#[derive(Clone, Debug, PartialEq)]
pub struct PatchResult {
    pub phi: YoungFunction,
    pub c1: f64,
    pub c2: f64,
    /// Equivalence constant: `A⁻¹Φ ≤ Φ̃ ≤ AΦ` on the working grid.
    pub a_equiv: f64,
}

/// Points used for the equivalence-constant scan and concavity checks.
pub const PATCH_GRID_POINTS: usize = 4096;

/// Glues `c₁Φ` on `[0, a]` to `c₂ + Φ` on `[b, ∞)` through a middle piece
/// with `Φ̃′(x) ∝ x^{1−1/s}`, producing a Young function with `Φ̃(u^{1/s})`
/// concave on all of `(0, ∞)`.
///
/// `a` and `b` are arguments of `Φ`; the concavity precondition is checked
/// on `u ∈ (0, a^s]` and `u ∈ [b^s, ∞)`.
pub fn patch(phi: &YoungFunction, s: f64, a: f64, b: f64) -> Result<PatchResult> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::param("a,b", format!("need 0 < a < b, got a={a}, b={b}")));
    }
    if !(s >= 2.0 && s.is_finite()) {
        return Err(Error::param("s", format!("need s ≥ 2, got {s}")));
    }
    let (ua, ub) = (a.powf(s), b.powf(s));
    let u_lo = (ua.min(1.0) * X_LO).max(1e-300);
    let u_hi = (ub.max(1.0) * X_HI).min(1e300);
    let regions = power_concavity_regions(phi, s, u_lo, u_hi, 4097)?;
    if !regions.covers(u_lo, ua) || !regions.covers(ub, u_hi) {
        return Err(Error::param(
            "a,b",
            format!(
                "Φ(u^(1/s)) is not concave on (0, a^s] and [b^s, ∞) for s={s}, a={a}, b={b}; regions {:?}",
                regions.intervals
            ),
        ));
    }
    let k = phi.deriv_right(b) * b.powf(1.0 / s - 1.0);
    let c1 = k * a.powf(1.0 - 1.0 / s) / phi.deriv_left(a);
    let e = 2.0 - 1.0 / s;
    let at_b = c1 * phi.eval(a) + k * (b.powf(e) - a.powf(e)) / e;
    let c2 = at_b - phi.eval(b);
    let patched = YoungFunction::from_kind(YoungKind::Patched(Box::new(Patch {
        base: phi.clone(),
        s,
        a,
        b,
        c1,
        c2,
        k,
    })));
    let a_equiv = scan::log_grid(X_LO, X_HI, PATCH_GRID_POINTS)
        .into_iter()
        .filter_map(|x| {
            let (p, q) = (phi.eval(x), patched.eval(x));
            (p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()).then(|| (q / p).max(p / q))
        })
        .fold(1.0, f64::max);
    Ok(PatchResult { phi: patched, c1, c2, a_equiv })
}

/// JSON form `{kind, params, breakpoints, c1, c2}`; `base` carries the
/// underlying function for `patched` and `complementary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungRecord {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<YoungRecord>>,
}

fn one() -> f64 {
    1.0
}

impl From<YoungFunction> for YoungRecord {
    fn from(f: YoungFunction) -> Self {
        let plain = |kind: &str, params: Vec<f64>| YoungRecord {
            kind: kind.to_string(),
            params,
            breakpoints: Vec::new(),
            c1: 1.0,
            c2: 0.0,
            base: None,
        };
        match f.kind {
            YoungKind::Power { p } => plain("power", vec![p]),
            YoungKind::TwoPower { alpha, beta } => plain("two_power", vec![alpha, beta]),
            YoungKind::LogPower { r } => plain("log_power", vec![r]),
            YoungKind::Zygmund { p, alpha } => plain("zygmund", vec![p, alpha]),
            YoungKind::Exp => plain("exp", vec![]),
            YoungKind::Patched(pt) => YoungRecord {
                kind: "patched".into(),
                params: vec![pt.s],
                breakpoints: vec![pt.a, pt.b],
                c1: pt.c1,
                c2: pt.c2,
                base: Some(Box::new(pt.base.clone().into())),
            },
            YoungKind::Complementary(cj) => YoungRecord {
                kind: "complementary".into(),
                params: vec![cj.y_max, cj.resolution as f64],
                breakpoints: Vec::new(),
                c1: 1.0,
                c2: 0.0,
                base: Some(Box::new(cj.base.clone().into())),
            },
        }
    }
}

impl TryFrom<YoungRecord> for YoungFunction {
    type Error = Error;

    fn try_from(rec: YoungRecord) -> Result<Self> {
        let base = || -> Result<YoungFunction> {
            rec.base
                .clone()
                .ok_or_else(|| Error::param("base", format!("`{}` record needs a base", rec.kind)))
                .and_then(|b| YoungFunction::try_from(*b))
        };
        match rec.kind.as_str() {
            "patched" => {
                let (s, a, b) = match (rec.params.as_slice(), rec.breakpoints.as_slice()) {
                    ([s], [a, b]) => (*s, *a, *b),
                    _ => return Err(Error::param("params", "patched needs params [s] and breakpoints [a, b]")),
                };
                let out = patch(&base()?, s, a, b)?;
                if (out.c1 - rec.c1).abs() > 1e-9 * out.c1.abs() {
                    return Err(Error::param(
                        "c1",
                        format!("recorded c1={} disagrees with recomputed {}", rec.c1, out.c1),
                    ));
                }
                Ok(out.phi)
            }
            "complementary" => match rec.params.as_slice() {
                [y_max, res] => complementary(&base()?, *y_max, *res as usize),
                _ => Err(Error::param("params", "complementary needs params [y_max, resolution]")),
            },
            kind => YoungFunction::builtin(kind, &rec.params),
        }
    }
}
