//! Numerical workbench for Orlicz-space norms, moduli of smoothness,
//! K-functionals and sharp Jackson-type inequalities on periodic grids.
//!
//! Functions live on the torus `[0, 2π)^d` (`d ∈ {1, 2}`) sampled on a uniform
//! grid with the normalized measure `dx / (2π)^d`. Every operator is realized
//! as a Fourier multiplier, every norm is computed by periodic trapezoid
//! quadrature, and every inequality is checked numerically with the implied
//! constant reported rather than proved.
//!
//! Module map:
//!
//! * [`young`]: Young functions, conjugation, Δ₂/∇₂ diagnostics, patching.
//! * [`grid`]: grid functions, `L_p`, Luxemburg and Orlicz norms.
//! * [`spectral`]: FFT plumbing shared by the operators.
//! * [`ops`]: shifts, differences, moduli, semigroups, Cesàro and spherical means.
//! * [`approx`]: best approximation and K-functionals.
//! * [`lab`]: space geometry estimates and the inequality registry.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Results are
//! always collected in index order so output does not depend on scheduling.

pub mod approx;
pub mod error;
pub mod grid;
pub mod lab;
pub mod ops;
pub mod par;
pub mod scan;
pub mod spectral;
pub mod young;

pub use error::{Error, Result};
pub use grid::{Dim, GridFunction, NormKind, NormSpec};
pub use lab::{CheckReport, Direction};
pub use ops::{OperatorSpec, Semigroup};
pub use young::YoungFunction;
