//! Inequality registry: every check evaluates both sides of an inequality
//! on a dyadic range and reports the empirical constant, its stability and a
//! verdict.

mod checks;
mod geometry;
mod params;
mod report;

use std::time::Instant;

use serde_json::Value;

pub use checks::{MAX_TERMS, TAIL_REL};
pub use geometry::{
    convexity_ratio, estimate_convexity_constant, moduli_grid, space_moduli, verify_duality, ConvexityEstimate,
    PairKind, SpaceGeometry, Witness,
};
pub use params::{DEFAULT_N_1D, DEFAULT_N_2D};
pub use report::{CheckReport, Direction, Row, Verdict, DEFAULT_SPREAD_BOUND, DEGENERATE_REL};

use crate::error::{Error, Result};
use params::Params;
use report::judge_rows;

/// Registry entry.
pub struct CheckInfo {
    pub id: &'static str,
    /// One-line statement of what the check is about.
    pub anchor: &'static str,
    pub direction: Direction,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// `(name, default, meaning)`.
    pub params: &'static [(&'static str, &'static str, &'static str)],
    run: fn(&Params) -> Result<checks::Outcome>,
}

const COMMON: [(&str, &str, &str); 6] = [
    ("f", "\"family\"", "test function name, list of names, \"family\", or an explicit grid function"),
    ("d", "1", "dimension of the torus (1 or 2)"),
    ("N", "1024 (d=1), 256 (d=2)", "grid size"),
    ("B", "{\"norm\":\"lp\",\"p\":2}", "norm"),
    ("s", "from B", "convexity exponent"),
    ("spread_bound", "10", "largest admitted per-series spread; null disables"),
];

macro_rules! with_common {
    ($($extra:expr),* $(,)?) => {
        &[COMMON[0], COMMON[1], COMMON[2], COMMON[3], COMMON[4], COMMON[5], ("seed", "0", "seed of the random family member"), $($extra),*]
    };
}

const R12: (&str, &str, &str) = ("r", "[1,2]", "orders, a number or a list");
const N18: (&str, &str, &str) = ("n", "[1,8]", "dyadic range");
const GRID: (&str, &str, &str) = ("directions, radii", "1, 64 (d=1); 16, 32 (d=2)", "polar grid of the modulus sup");

pub static REGISTRY: &[CheckInfo] = &[
    CheckInfo {
        id: "basic-2.1",
        anchor: "linear contraction operator T: lower estimate of (T−I)^r f by the powers T^(2^j), proof constant m₁ = m^{1/s}/2",
        direction: Direction::GeqC,
        lhs: "‖(T−I)^r f‖_B",
        rhs: "m₁·(Σ_{j=0}^{ℓ} 2^{−jrs} ‖(T^{2^j}−I)^{r+1} f‖_B^s)^{1/s}, rows ℓ = 0..L; pass needs the constant ≥ m^{1/s}/2 − tol",
        params: with_common!(
            R12,
            ("T", "{\"op\":\"shift\",\"h\":[0.3]}", "the contraction (shift, heat, abel, cesaro, sphmean)"),
            ("L", "10", "number of powers"),
            ("m", "1 for L_p, p ≥ 2; p−1 for 1<p<2", "convexity constant of B"),
            ("tol", "0.02", "allowed shortfall from m^{1/s}/2"),
        ),
        run: checks::basic_2_1,
    },
    CheckInfo {
        id: "jackson-1.4",
        anchor: "sharp Jackson inequality with moduli of smoothness, sharper than the classical Marchaud form",
        direction: Direction::LeqC,
        lhs: "2^{−nr}(Σ_{j=1}^n 2^{jrs} ω^{r+1}(f,2^{−j})_B^s)^{1/s}",
        rhs: "ω^r(f,2^{−n})_B",
        params: with_common!(R12, N18, GRID),
        run: checks::jackson_1_4,
    },
    CheckInfo {
        id: "jackson-4.8",
        anchor: "heat semigroup, where Δ is the Laplacian: K_{Δ^r} bounded below by higher K-functionals",
        direction: Direction::GeqC,
        lhs: "K_{Δ^r}(f,t^r)_B ≈ ‖(W(t)−I)^r f‖_B, t = 4^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} K_{Δ^{r+1}}(f,(2^j t)^{r+1})_B^s)^{1/s}, or t^r(∫_t^∞ u^{−rs} K_{Δ^{r+1}}(f,u^{r+1})^s du/u)^{1/s} with form=integral",
        params: with_common!(
            R12,
            N18,
            ("form", "\"sum\"", "\"sum\" or \"integral\""),
            ("route", "\"semigroup\"", "\"semigroup\" (heat differences) or \"realization\""),
        ),
        run: checks::jackson_4_8,
    },
    CheckInfo {
        id: "jackson-4.9",
        anchor: "heat semigroup, where Δ is the Laplacian: K_{Δ^r} bounded below by best approximation with entire functions",
        direction: Direction::GeqC,
        lhs: "K_{Δ^r}(f,t^r)_B ≈ ‖(W(t)−I)^r f‖_B, t = 4^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} E_{(2^j t)^{−1/2}}(f)_B^s)^{1/s}, or t^r(∫_{√t}^∞ u^{−2rs} E_{1/u}(f)^s du/u)^{1/s} with form=integral",
        params: with_common!(
            R12,
            N18,
            ("form", "\"sum\"", "\"sum\" or \"integral\""),
            ("route", "\"semigroup\"", "\"semigroup\" or \"realization\""),
            ("refine", "false", "refine best approximations by subgradient descent"),
        ),
        run: checks::jackson_4_9,
    },
    CheckInfo {
        id: "jackson-5.9",
        anchor: "holomorphic Abel–Poisson semigroup generated by Cesàro-bounded expansions: K_{𝒜^r} bounded below by higher K-functionals",
        direction: Direction::GeqC,
        lhs: "K_{𝒜^r}(f,t^r)_B ≈ ‖(P(t)−I)^r f‖_B, t = 2^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} K_{𝒜^{r+1}}(f,t^{r+1}2^{j(r+1)})_B^s)^{1/s}",
        params: with_common!(R12, N18, ("route", "\"semigroup\"", "\"semigroup\" or \"realization\"")),
        run: checks::jackson_5_9,
    },
    CheckInfo {
        id: "jackson-5.10",
        anchor: "holomorphic Abel–Poisson semigroup: K_{𝒜^r} bounded below by best polynomial approximation, dyadic or full-index form",
        direction: Direction::GeqC,
        lhs: "K_{𝒜^r}(f,2^{−nr})_B ≈ ‖(P(2^{−n})−I)^r f‖_B",
        rhs: "(Σ_{j=1}^n 2^{−jrs} E_{2^{n−j}}(f)_B^s)^{1/s}, or t^r(Σ_{k=1}^{[1/t]} k^{rs−1} E_k(f)^s)^{1/s} with form=integral",
        params: with_common!(
            R12,
            N18,
            ("form", "\"sum\"", "\"sum\" or \"integral\" (full-index form)"),
            ("exponent", "\"corrected\"", "full-index exponent: \"corrected\" (rs−1) or \"printed\" (−rs−1)"),
            ("route", "\"semigroup\"", "\"semigroup\" or \"realization\""),
            ("refine", "false", "refine best approximations"),
        ),
        run: checks::jackson_5_10,
    },
    CheckInfo {
        id: "entire-4.12",
        anchor: "best approximation by entire functions of exponential type is dominated by the Laplacian K-functional",
        direction: Direction::LeqC,
        lhs: "E_λ(f)_B over |k| ≤ λ, λ = 2^n",
        rhs: "K_{Δ^r}(f,λ^{−2r})_B",
        params: with_common!(
            R12,
            ("n", "[0,8]", "dyadic range, λ = 2^n"),
            ("route", "\"realization\"", "\"realization\", \"heat\" or \"sphmean\" (d=2)"),
            ("refine", "false", "refine best approximations"),
            ("spread_bound", "null", "here opt-in: the estimate is one-sided and not sharp per function"),
        ),
        run: checks::entire_4_12,
    },
    CheckInfo {
        id: "cesaro-5.1",
        anchor: "operators with positive symmetric kernels of mass one are contractions in Luxemburg and Orlicz norms (Jensen)",
        direction: Direction::LeqC,
        lhs: "‖C_n^ℓ f‖ in the Luxemburg and in the Orlicz norm",
        rhs: "‖f‖ in the same norm; pass needs every ratio ≤ 1 + slack",
        params: &[
            ("phi", "[zygmund(2,0.5)]", "list of Young functions"),
            ("l", "1", "Cesàro order (1 = Fejér)"),
            ("n", "16", "Cesàro degree"),
            ("trials", "100", "number of random functions"),
            ("N", "256", "grid size"),
            ("seed", "0", "seed"),
            ("slack", "1e-10", "relative slack"),
        ],
        run: checks::cesaro_5_1,
    },
    CheckInfo {
        id: "averaged-7.3",
        anchor: "averaged and sup semigroup moduli, w ≤ ω_T ≤ C(r) w",
        direction: Direction::LeqC,
        lhs: "ω_T^r(f,t) = sup_{0<u≤t} ‖(T(u)−I)^r f‖_B, t = 2^{−n}",
        rhs: "w_T^r(f,t) = (1/t)∫_0^t ‖(T(u)−I)^r f‖_B du; pass also needs every ratio ≥ 1",
        params: with_common!(
            ("r", "[1,2,3]", "orders"),
            ("n", "[0,6]", "dyadic range"),
            ("semigroup", "{\"kind\":\"shift\"}", "shift, heat or abel"),
            ("quad_points", "128", "midpoint nodes of the average"),
            ("slack", "1e-12", "slack of w ≤ ω"),
        ),
        run: checks::averaged_7_3,
    },
    CheckInfo {
        id: "semigroup-7.4",
        anchor: "C₀ contraction semigroups: sharp lower estimate of the sup modulus",
        direction: Direction::GeqC,
        lhs: "ω_T^r(f,t)_B, t = 2^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} ω_T^{r+1}(f,2^j t)_B^s)^{1/s}",
        params: with_common!(
            R12,
            N18,
            ("semigroup", "{\"kind\":\"heat\"}", "shift, heat or abel"),
            ("quad_points", "64", "the sup uses 2·quad_points nodes"),
        ),
        run: checks::semigroup_7_4,
    },
    CheckInfo {
        id: "shift-7.5",
        anchor: "the translation semigroup with T(u)f(x) = f(x+u)",
        direction: Direction::GeqC,
        lhs: "ω_T^r(f,t)_B with T(u)f = f(· + uξ), t = 2^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} ω_T^{r+1}(f,2^j t)_B^s)^{1/s}",
        params: with_common!(
            R12,
            N18,
            ("direction", "[1] or [1,0]", "shift direction ξ"),
            ("quad_points", "64", "the sup uses 2·quad_points nodes"),
        ),
        run: checks::shift_7_5,
    },
    CheckInfo {
        id: "kfunc-8.9",
        anchor: "modulus of smoothness bounded below by Laplacian K-functionals, for any ℓ such that 2ℓ > r",
        direction: Direction::GeqC,
        lhs: "ω^r(f,t)_B, t = 2^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} K_{Δ^ℓ}(f,(2^j t)^{2ℓ})_B^s)^{1/s}",
        params: with_common!(
            R12,
            N18,
            GRID,
            ("l", "⌊r/2⌋+1", "Laplacian power, one value or one per order"),
            ("route", "\"realization\"", "\"realization\", \"heat\" or \"sphmean\" (d=2)"),
        ),
        run: checks::kfunc_8_9,
    },
    CheckInfo {
        id: "jackson-8.10",
        anchor: "sharp Jackson inequality with best trigonometric approximation E_λ, the analogue of the entire-function form",
        direction: Direction::GeqC,
        lhs: "ω^r(f,t)_B, t = 2^{−n}",
        rhs: "(Σ_{j≥1} 2^{−jrs} E_{1/(t2^j)}(f)_B^s)^{1/s}, E_λ over |k| < λ",
        params: with_common!(R12, N18, GRID, ("refine", "false", "refine best approximations")),
        run: checks::jackson_8_10,
    },
    CheckInfo {
        id: "lower-8.12",
        anchor: "finite-range lower estimate of ω^r under the conditions of the sharp Jackson theorem",
        direction: Direction::GeqC,
        lhs: "ω^r(f,t)_B, t = 2^{−n}",
        rhs: "(Σ_{j=1}^{L} 2^{−jrs} ω^{r+1}(f,2^j t)_B^s)^{1/s}, L = n; the ratio is C₁^{1/s}",
        params: with_common!(R12, N18, GRID),
        run: checks::lower_8_12,
    },
    CheckInfo {
        id: "orlicz-sandwich",
        anchor: "Luxemburg and Orlicz norms: ‖f‖_{O_L(Φ)} ≤ ‖f‖_{O(Φ)} ≤ 2‖f‖_{O_L(Φ)}",
        direction: Direction::LeqC,
        lhs: "‖f‖_{O(Φ)} (Amemiya form)",
        rhs: "‖f‖_{O_L(Φ)}; pass needs every ratio in [1, 2] up to slack",
        params: &[
            ("phi", "[power(2), zygmund(2,0.5), two_power(1.5,3)]", "list of Young functions"),
            ("trials", "20", "random functions, in addition to the standard family"),
            ("N", "256", "grid size"),
            ("seed", "0", "seed"),
            ("slack", "1e-8", "slack at both ends"),
        ],
        run: checks::orlicz_sandwich,
    },
];

pub fn lookup(id: &str) -> Option<&'static CheckInfo> {
    REGISTRY.iter().find(|c| c.id == id)
}

/// `(id, anchor)` for every registered check.
pub fn list() -> Vec<(&'static str, &'static str)> {
    REGISTRY.iter().map(|c| (c.id, c.anchor)).collect()
}

/// Human-readable description of a check.
pub fn describe(id: &str) -> Result<String> {
    let c = lookup(id).ok_or_else(|| Error::UnknownCheck(id.to_string()))?;
    let dir = match c.direction {
        Direction::LeqC => "LHS ≤ C·RHS (constant = largest LHS/RHS)",
        Direction::GeqC => "LHS ≥ C·RHS (constant = smallest LHS/RHS)",
    };
    let mut out = format!("{}\n  {}\n\n  LHS: {}\n  RHS: {}\n  {}\n\n  parameters:\n", c.id, c.anchor, c.lhs, c.rhs, dir);
    for (name, default, meaning) in c.params {
        out.push_str(&format!("    {name:<18} default {default:<28} {meaning}\n"));
    }
    out.push_str(&format!(
        "\n  Infinite sums stop at the first term below {TAIL_REL:e} of the partial sum (at most {MAX_TERMS} terms).\n  \
         Pass: constant finite (and positive for ≥), per-series spread within the bound.\n"
    ));
    Ok(out)
}

/// Runs check `id` with a JSON parameter record.
pub fn run_check(id: &str, params: &Value) -> Result<CheckReport> {
    let info = lookup(id).ok_or_else(|| Error::UnknownCheck(id.to_string()))?;
    let start = Instant::now();
    let p = Params::new(params)?;
    let outcome = (info.run)(&p)?;
    p.finish()?;
    if outcome.rows.is_empty() {
        return Err(Error::bad("params", "the selection produced an empty table"));
    }
    let v = judge_rows(&outcome.rows, outcome.judge);
    let mut notes = outcome.notes;
    notes.extend(v.notes);
    let effective = p.effective();
    let seed = effective.get("seed").and_then(Value::as_u64).unwrap_or(0);
    Ok(CheckReport {
        id: id.to_string(),
        params: effective,
        direction: outcome.judge.direction,
        rows: outcome.rows,
        constant: v.constant,
        spread: v.spread,
        spread_bound: outcome.judge.spread_bound,
        verdict: v.verdict,
        runtime_ms: start.elapsed().as_millis() as u64,
        seed,
        resolutions: outcome.resolutions,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn registry_is_complete() {
        let ids: Vec<_> = list().into_iter().map(|(id, _)| id).collect();
        for id in [
            "basic-2.1", "jackson-1.4", "jackson-4.8", "jackson-4.9", "jackson-5.9", "jackson-5.10", "entire-4.12",
            "cesaro-5.1", "averaged-7.3", "semigroup-7.4", "shift-7.5", "kfunc-8.9", "jackson-8.10", "lower-8.12",
            "orlicz-sandwich",
        ] {
            assert!(ids.contains(&id), "{id}");
        }
        assert!(describe("basic-2.1").unwrap().contains("m^{1/s}/2"));
        assert!(describe("cesaro-5.1").unwrap().contains("contraction"));
        assert!(matches!(describe("nope"), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn unknown_params_are_rejected() {
        let err = run_check("jackson-1.4", &json!({ "N": 64, "bogus": 1 })).unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert!(matches!(run_check("jackson-99", &json!({})), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn basic_reaches_proof_constant() {
        let rep = run_check("basic-2.1", &json!({ "N": 64, "f": "cos" })).unwrap();
        assert!(rep.passed(), "{:?}", rep.notes);
        assert!(rep.constant.unwrap() >= 0.48);
    }

    #[test]
    fn sandwich_small() {
        let rep = run_check("orlicz-sandwich", &json!({ "N": 32, "trials": 3 })).unwrap();
        assert!(rep.passed(), "{:?}", rep.notes);
    }
}
