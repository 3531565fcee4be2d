//! Typed access to a JSON parameter record, with defaults recorded so the
//! report shows exactly what was used.

use std::cell::RefCell;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::grid::{self, Dim, GridFunction, NormSpec, TestFunction};
use crate::ops::ModulusGrid;

pub(crate) struct Params {
    given: Map<String, Value>,
    used: RefCell<Map<String, Value>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl Params {
    pub fn new(v: &Value) -> Result<Self> {
        let given = match v {
            Value::Null => Map::new(),
            Value::Object(m) => m.clone(),
            _ => return Err(Error::bad("params", "expected a JSON object")),
        };
        Ok(Params { given, used: RefCell::new(Map::new()) })
    }

    pub fn record<T: Serialize>(&self, key: &str, v: &T) {
        if let Ok(j) = serde_json::to_value(v) {
            self.used.borrow_mut().insert(key.to_string(), j);
        }
    }

    pub fn get<T: DeserializeOwned + Serialize>(&self, key: &str) -> Result<Option<T>> {
        match self.given.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => {
                let t: T = serde_json::from_value(v.clone()).map_err(|e| Error::bad(key, e.to_string()))?;
                self.record(key, &t);
                Ok(Some(t))
            }
        }
    }

    pub fn or<T: DeserializeOwned + Serialize>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                self.record(key, &default);
                Ok(default)
            }
        }
    }

    pub fn list_u32(&self, key: &str, default: &[u32]) -> Result<Vec<u32>> {
        let v = match self.given.get(key) {
            None | Some(Value::Null) => default.to_vec(),
            Some(v) => match serde_json::from_value::<OneOrMany<u32>>(v.clone()) {
                Ok(OneOrMany::One(x)) => vec![x],
                Ok(OneOrMany::Many(xs)) => xs,
                Err(e) => return Err(Error::bad(key, e.to_string())),
            },
        };
        if v.is_empty() {
            return Err(Error::bad(key, "list must not be empty"));
        }
        self.record(key, &v);
        Ok(v)
    }

    /// `[lo, hi]` or a single integer.
    pub fn range(&self, key: &str, default: (i64, i64)) -> Result<(i64, i64)> {
        let (lo, hi) = match self.given.get(key) {
            None | Some(Value::Null) => default,
            Some(v) => match serde_json::from_value::<OneOrMany<i64>>(v.clone()) {
                Ok(OneOrMany::One(x)) => (x, x),
                Ok(OneOrMany::Many(xs)) if xs.len() == 2 => (xs[0], xs[1]),
                Ok(_) => return Err(Error::bad(key, "expected an integer or a pair [lo, hi]")),
                Err(e) => return Err(Error::bad(key, e.to_string())),
            },
        };
        if lo > hi {
            return Err(Error::bad(key, format!("empty range [{lo}, {hi}]")));
        }
        self.record(key, &[lo, hi]);
        Ok((lo, hi))
    }

    /// Rejects keys that no part of the check read.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        for k in self.given.keys() {
            if !used.contains_key(k) {
                return Err(Error::bad(k.clone(), "unknown parameter for this check"));
            }
        }
        Ok(())
    }

    pub fn effective(&self) -> Value {
        Value::Object(self.used.borrow().clone())
    }
}

/// Settings shared by the function-based checks.
pub(crate) struct Common {
    pub d: Dim,
    pub n: usize,
    pub b: NormSpec,
    pub s: f64,
    pub funcs: Vec<(String, GridFunction)>,
    pub spread_bound: Option<f64>,
}

pub const DEFAULT_N_1D: usize = 1024;
pub const DEFAULT_N_2D: usize = 256;

impl Common {
    pub fn read(p: &Params) -> Result<Self> {
        Self::read_with(p, Some(super::report::DEFAULT_SPREAD_BOUND))
    }

    /// As [`Common::read`] with a check-specific default spread bound.
    pub fn read_with(p: &Params, default_spread: Option<f64>) -> Result<Self> {
        let seed: u64 = p.or("seed", 0)?;
        let b: NormSpec = p.or("B", NormSpec::lp(2.0)?)?;
        let s = match p.get::<f64>("s")? {
            Some(s) => {
                if !(s >= 2.0 && s.is_finite()) {
                    return Err(Error::bad("s", format!("need 2 ≤ s < ∞, got {s}")));
                }
                s
            }
            None => {
                let s = b.s().ok_or_else(|| Error::MissingParam("s".into()))?;
                p.record("s", &s);
                s
            }
        };
        let spread_bound = p.or("spread_bound", default_spread)?;

        let explicit: Option<GridFunction> = match p.given.get("f") {
            Some(Value::Object(_)) => p.get("f")?,
            _ => None,
        };
        let (d, n, funcs) = if let Some(f) = explicit {
            let (d, n) = (f.dim(), f.n());
            p.record("d", &d);
            p.record("N", &n);
            (d, n, vec![("f".to_string(), f)])
        } else {
            let d: Dim = p.or("d", Dim::One)?;
            let n: usize = p.or(
                "N",
                match d {
                    Dim::One => DEFAULT_N_1D,
                    Dim::Two => DEFAULT_N_2D,
                },
            )?;
            grid::check_n(n).map_err(|e| Error::bad("N", e.to_string()))?;
            let funcs = family(p, n, d, seed)?;
            (d, n, funcs)
        };
        Ok(Common { d, n, b, s, funcs, spread_bound })
    }

    pub fn scale(&self, f: &GridFunction) -> f64 {
        f.norm(&self.b)
    }

    pub fn modulus_grid(&self, p: &Params) -> Result<ModulusGrid> {
        let (dirs, radii) = match self.d {
            Dim::One => (1, 64),
            Dim::Two => (16, 32),
        };
        let g = ModulusGrid { directions: p.or("directions", dirs)?, radii: p.or("radii", radii)? };
        if g.directions == 0 || g.radii == 0 {
            return Err(Error::bad("radii", "modulus grid needs at least one radius and one direction"));
        }
        Ok(g)
    }

    pub fn require_1d(&self, what: &str) -> Result<()> {
        if self.d != Dim::One {
            return Err(Error::Inapplicable(format!("{what} is implemented on 𝕋¹ only")));
        }
        Ok(())
    }
}

/// `f`: a test-function name, a list of names, or `"family"`.
fn family(p: &Params, n: usize, d: Dim, seed: u64) -> Result<Vec<(String, GridFunction)>> {
    let names: Vec<String> = match p.given.get("f") {
        None | Some(Value::Null) => vec!["family".into()],
        Some(v) => match serde_json::from_value::<OneOrMany<String>>(v.clone()) {
            Ok(OneOrMany::One(s)) => vec![s],
            Ok(OneOrMany::Many(v)) => v,
            Err(e) => return Err(Error::bad("f", e.to_string())),
        },
    };
    p.record("f", &names);
    let mut out = Vec::new();
    for name in &names {
        if name == "family" {
            out.extend(grid::standard_family(n, d, seed)?);
        } else {
            let t = TestFunction::parse(name).ok_or_else(|| {
                Error::bad("f", format!("unknown test function `{name}` (cos, abs_sin, sawtooth, random, family)"))
            })?;
            out.push((name.clone(), t.build(n, d, seed)?));
        }
    }
    if out.is_empty() {
        return Err(Error::bad("f", "no functions selected"));
    }
    Ok(out)
}
