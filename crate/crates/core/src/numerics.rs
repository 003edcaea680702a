//! Compensated summation and quadrature on uniform grids.
//!
//! The differential signal of the gradiometer (~1e-2 rad) sits nine orders of
//! magnitude below the common-mode phases (~1e7 rad), so every accumulation in
//! this crate goes through a Neumaier-compensated summator instead of a bare
//! `+=` loop.

/// Kahan summation in the Neumaier variant: exact for each pair addition,
/// carries the running error term explicitly.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}

/// Composite quadrature of samples on a uniform grid with spacing `dt`.
///
/// Uses Simpson's rule when the interval count is even; an odd count is
/// handled with Simpson on the leading part and the 3/8 rule on the final
/// three intervals. A single interval falls back to the trapezoid. Summation
/// order is fixed, so results are bit-reproducible.
pub fn integrate_uniform(values: &[f64], dt: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * dt * (values[0] + values[1]),
        _ if n.is_multiple_of(2) => simpson_even(values, dt),
        3 => simpson38(values, dt),
        _ => {
            // odd n >= 5: even-count head + 3/8 tail
            simpson_even(&values[..n - 2], dt) + simpson38(&values[n - 3..], dt)
        }
    }
}

fn simpson_even(values: &[f64], dt: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let mut acc = KahanSum::new();
    acc.add(values[0]);
    acc.add(values[n]);
    for (j, &v) in values.iter().enumerate().take(n).skip(1) {
        acc.add(if j % 2 == 1 { 4.0 * v } else { 2.0 * v });
    }
    acc.value() * dt / 3.0
}

fn simpson38(values: &[f64], dt: f64) -> f64 {
    debug_assert_eq!(values.len(), 4);
    0.375 * dt * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_recovers_cancelled_tail() {
        // 1 + 1e-16 * 1e4 loses the tail with naive summation
        let mut naive = 1.0f64;
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            naive += 1e-16;
            acc.add(1e-16);
        }
        assert_eq!(naive, 1.0);
        assert_relative_eq!(acc.value(), 1.0 + 1e-12, max_relative = 1e-12);
    }

    #[test]
    fn simpson_exact_for_cubic() {
        let n = 100;
        let dt = 0.01;
        let f: Vec<f64> = (0..=n).map(|j| {
            let t = j as f64 * dt;
            t * t * t - 2.0 * t + 1.0
        }).collect();
        // integral of t^3 - 2t + 1 over [0,1] = 1/4 - 1 + 1 = 0.25
        assert_relative_eq!(integrate_uniform(&f, dt), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn odd_interval_counts_converge() {
        // exp(t) over [0, 1]: fourth-order error for the mixed rule
        for n in [3usize, 5, 7, 101] {
            let dt = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|j| (j as f64 * dt).exp()).collect();
            let exact = std::f64::consts::E - 1.0;
            let err = (integrate_uniform(&f, dt) - exact).abs();
            assert!(err < 3.0 / (n as f64).powi(4), "n={n} err={err:e}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(integrate_uniform(&[], 0.1), 0.0);
        assert_eq!(integrate_uniform(&[3.0], 0.1), 0.0);
        assert_relative_eq!(integrate_uniform(&[1.0, 3.0], 0.5), 1.0);
    }
}
