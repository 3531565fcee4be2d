//! Scalar search helpers: geometric grids, golden-section refinement and
//! bisection on monotone predicates.

/// Lower end of the default scan range for "sup over x > 0" problems.
pub const X_LO: f64 = 1e-6;
/// Upper end of the default scan range.
pub const X_HI: f64 = 1e6;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// `n` points spaced geometrically from `lo` to `hi` inclusive.
///
/// Exponents are interpolated in base 10 so that symmetric decade ranges
/// with an odd point count contain `1.0` exactly.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.log10(), hi.log10());
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                10f64.powf(a + (b - a) * (i as f64) / last)
            }
        })
        .collect()
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(argmax, max)`. Stops when the bracket is narrower than
/// `rel_tol * max(|a|, |b|)` or after 200 iterations.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes `f` over the points of `grid`, then refines with golden-section
/// search between the neighbours of the best grid point.
///
/// Correct whenever `f` is unimodal on the grid's span. Returns
/// `(argmax, max, index)` where `index` is the best grid point.
pub fn grid_then_golden<F: Fn(f64) -> f64>(f: F, grid: &[f64], rel_tol: f64) -> (f64, f64, usize) {
    let (best, fbest) = grid
        .iter()
        .map(|&x| f(x))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi <= lo {
        return (grid[best], fbest, best);
    }
    let (x, fx) = golden_max(&f, lo, hi, rel_tol);
    if fx >= fbest {
        (x, fx, best)
    } else {
        (grid[best], fbest, best)
    }
}

/// Bisection for the boundary of a monotone predicate on `[lo, hi]`, where
/// `pred(lo)` is false and `pred(hi)` is true. Returns the final bracket.
///
/// When `geometric` is set the midpoint is taken in log space, which suits
/// positive brackets spanning several decades.
pub fn bisect<P: Fn(f64) -> bool>(
    pred: P,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    geometric: bool,
) -> (f64, f64) {
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi.abs().max(lo.abs()) {
            break;
        }
        let mid = if geometric { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
