//! Composite quadrature on sample grids.
//!
//! Simpson's rule is used whenever the grid is uniform with an even number
//! of intervals (the CLI default of 2001 points satisfies this); otherwise
//! the trapezoid rule is the fallback.

use num_complex::Complex64;

pub(crate) fn grid_is_uniform(grid: &[f64]) -> bool {
    if grid.len() < 3 {
        return true;
    }
    let h = grid[1] - grid[0];
    let span = grid[grid.len() - 1] - grid[0];
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * span.abs().max(1.0))
}

fn weights_apply<T, F>(grid: &[f64], samples: &[T], zero: T, add: F) -> T
where
    T: Copy,
    F: Fn(T, T, f64) -> T,
{
    assert_eq!(grid.len(), samples.len(), "grid/sample length mismatch");
    let n = grid.len();
    if n < 2 {
        return zero;
    }
    let intervals = n - 1;
    if intervals.is_multiple_of(2) && grid_is_uniform(grid) {
        // Composite Simpson.
        let h = (grid[n - 1] - grid[0]) / intervals as f64;
        let mut acc = add(zero, samples[0], 1.0);
        acc = add(acc, samples[n - 1], 1.0);
        for (k, &s) in samples.iter().enumerate().take(n - 1).skip(1) {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc = add(acc, s, w);
        }
        add(zero, acc, h / 3.0)
    } else {
        // Trapezoid on the (possibly non-uniform) grid.
        let mut acc = zero;
        for k in 0..intervals {
            let h = grid[k + 1] - grid[k];
            acc = add(acc, samples[k], 0.5 * h);
            acc = add(acc, samples[k + 1], 0.5 * h);
        }
        acc
    }
}

#[cfg(test)]
pub(crate) fn integrate(grid: &[f64], samples: &[f64]) -> f64 {
    weights_apply(grid, samples, 0.0, |acc, s, w| acc + s * w)
}

pub(crate) fn integrate_complex(grid: &[f64], samples: &[Complex64]) -> Complex64 {
    weights_apply(grid, samples, Complex64::ZERO, |acc, s, w| acc + s * w)
}

/// Integral over a uniform grid with step `dt` (Simpson when the interval
/// count is even, trapezoid otherwise).
pub(crate) fn integrate_uniform(dt: f64, samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    if intervals.is_multiple_of(2) {
        let mut acc = samples[0] + samples[n - 1];
        for (k, &s) in samples.iter().enumerate().take(n - 1).skip(1) {
            acc += if k % 2 == 1 { 4.0 * s } else { 2.0 * s };
        }
        acc * dt / 3.0
    } else {
        let mut acc = 0.0;
        for k in 0..intervals {
            acc += 0.5 * dt * (samples[k] + samples[k + 1]);
        }
        acc
    }
}
