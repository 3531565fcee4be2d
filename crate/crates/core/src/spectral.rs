//! FFT plumbing: forward transforms of grid samples and Fourier multipliers.
//!
//! Coefficients are stored unnormalized in FFT order, row-major for `d = 2`
//! (first index along `x`, second along `y`). Multipliers are evaluated on
//! signed frequencies. At the Nyquist index `N/2` the multiplier is averaged
//! over `±N/2` in that coordinate, which keeps the result Hermitian so the
//! inverse transform is real up to rounding.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plans = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, Plans)>> = OnceLock::new();
    let lock = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = lock.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, cache) = &mut *guard;
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Signed frequency of FFT index `j` on an `n`-point grid; `n/2` maps to `+n/2`.
#[inline]
pub fn freq(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn transform(d: usize, n: usize, data: &mut [Complex64], inverse: bool) {
    let fft = plan(n, inverse);
    if d == 1 {
        fft.process(data);
        return;
    }
    // Rows are contiguous (fixed x index, varying y).
    fft.process(data);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = data[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            data[r * n + c] = col[r];
        }
    }
}

/// Fourier coefficients of real grid data on `[0, 2π)^d`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    d: usize,
    n: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn forward(d: usize, n: usize, samples: &[f64]) -> Self {
        debug_assert_eq!(samples.len(), n.pow(d as u32));
        let mut coeffs: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(d, n, &mut coeffs, false);
        Self { d, n, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn total(&self) -> f64 {
        (self.n as f64).powi(self.d as i32)
    }

    /// Signed frequency pair of flat index `idx` (`k2 = 0` when `d = 1`).
    #[inline]
    pub fn freqs(&self, idx: usize) -> (i64, i64) {
        if self.d == 1 {
            (freq(idx, self.n), 0)
        } else {
            (freq(idx / self.n, self.n), freq(idx % self.n, self.n))
        }
    }

    /// Normalized coefficient `f̂(k)` for flat index `idx`.
    pub fn coeff(&self, idx: usize) -> Complex64 {
        self.coeffs[idx] / self.total()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Multiplies coefficient `k` by `m(k₁, k₂)` with Nyquist averaging.
    pub fn map<M: Fn(f64, f64) -> Complex64>(&self, m: M) -> Spectrum {
        let half = (self.n / 2) as i64;
        let mut coeffs = self.coeffs.clone();
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let (k1, k2) = self.freqs(idx);
            let f1 = (k1 as f64, k1 == half);
            let f2 = (k2 as f64, self.d == 2 && k2 == half);
            *c *= nyquist_avg(&m, f1, f2);
        }
        Spectrum { d: self.d, n: self.n, coeffs }
    }

    /// Like [`Spectrum::map`] but with a real multiplier depending only on
    /// the frequency; cheaper when the multiplier is even in each variable.
    pub fn map_real<M: Fn(f64, f64) -> f64>(&self, m: M) -> Spectrum {
        self.map(|a, b| Complex64::new(m(a, b), 0.0))
    }

    /// Keeps coefficients where `keep(k₁, k₂)` holds.
    pub fn mask<P: Fn(i64, i64) -> bool>(&self, keep: P) -> Spectrum {
        let mut coeffs = self.coeffs.clone();
        for (idx, c) in coeffs.iter_mut().enumerate() {
            let (k1, k2) = self.freqs(idx);
            if !keep(k1, k2) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        Spectrum { d: self.d, n: self.n, coeffs }
    }

    /// Real samples of the inverse transform.
    pub fn to_real(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        transform(self.d, self.n, &mut data, true);
        let scale = 1.0 / self.total();
        data.into_iter().map(|c| c.re * scale).collect()
    }

    /// `L₂` norm under the normalized measure, by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        s.sqrt() / self.total()
    }

    /// Largest `|k|_∞` over nonzero coefficients (relative threshold `tol`).
    pub fn band_limit(&self, tol: f64) -> i64 {
        let top = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut best = 0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tol * top {
                let (a, b) = self.freqs(idx);
                best = best.max(a.abs()).max(b.abs());
            }
        }
        best
    }

    pub(crate) fn from_parts(d: usize, n: usize, coeffs: Vec<Complex64>) -> Self {
        Self { d, n, coeffs }
    }

    pub(crate) fn raw(&self) -> &[Complex64] {
        &self.coeffs
    }
}

pub(crate) fn nyquist_avg<M: Fn(f64, f64) -> Complex64>(m: &M, f1: (f64, bool), f2: (f64, bool)) -> Complex64 {
    match (f1.1, f2.1) {
        (false, false) => m(f1.0, f2.0),
        (true, false) => 0.5 * (m(f1.0, f2.0) + m(-f1.0, f2.0)),
        (false, true) => 0.5 * (m(f1.0, f2.0) + m(f1.0, -f2.0)),
        (true, true) => 0.25 * (m(f1.0, f2.0) + m(-f1.0, f2.0) + m(f1.0, -f2.0) + m(-f1.0, -f2.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cos_samples(n: usize, k: f64) -> Vec<f64> {
        (0..n).map(|j| (k * 2.0 * PI * j as f64 / n as f64).cos()).collect()
    }

    #[test]
    fn round_trip_1d_and_2d() {
        let v: Vec<f64> = (0..16).map(|j| (j as f64 * 0.37).sin() + 0.1 * j as f64).collect();
        let back = Spectrum::forward(1, 16, &v).to_real();
        assert!(v.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-13));
        let w: Vec<f64> = (0..64).map(|j| ((j * j) % 7) as f64).collect();
        let back = Spectrum::forward(2, 8, &w).to_real();
        assert!(w.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn parseval_matches_quadrature() {
        let v = cos_samples(32, 3.0);
        let direct = (v.iter().map(|x| x * x).sum::<f64>() / 32.0).sqrt();
        assert!((Spectrum::forward(1, 32, &v).l2_norm() - direct).abs() < 1e-14);
    }

    #[test]
    fn nyquist_shift_stays_real() {
        // cos(4x) on 8 points lives entirely at the Nyquist index.
        let v = cos_samples(8, 4.0);
        let h = 0.3;
        let out = Spectrum::forward(1, 8, &v)
            .map(|k, _| Complex64::from_polar(1.0, k * h))
            .to_real();
        for (j, y) in out.iter().enumerate() {
            let x = 2.0 * PI * j as f64 / 8.0;
            // Real trigonometric interpolant of the Nyquist mode is cos(4h)cos(4x).
            assert!((y - (4.0 * h).cos() * (4.0 * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn freq_convention() {
        assert_eq!(freq(0, 8), 0);
        assert_eq!(freq(4, 8), 4);
        assert_eq!(freq(5, 8), -3);
    }
}
