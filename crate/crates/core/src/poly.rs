//! Dense univariate polynomials with Taylor-ordered coefficients and a
//! least-squares fitter.
//!
//! Coefficients are stored ascending (`c[0] + c[1] z + c[2] z^2 + ...`), which
//! is the Taylor form used by the curvature-phase series. Fitting runs on a
//! domain scaled to `[-1, 1]` and maps the result back, so degrees around ten
//! over a metres-wide region stay well conditioned.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::KahanSum;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc.mul_add(z, c))
    }

    /// Value together with first and second derivative in one Horner pass.
    pub fn eval_with_derivatives(&self, z: f64) -> (f64, f64, f64) {
        let mut p = 0.0f64;
        let mut d1 = 0.0f64;
        let mut d2 = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            d2 = d2.mul_add(z, 2.0 * d1);
            d1 = d1.mul_add(z, p);
            p = p.mul_add(z, c);
        }
        (p, d1, d2)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as f64 + 1.0) * c)
                .collect(),
        )
    }

    /// Antiderivative with the constant chosen so that it vanishes at `z_ref`.
    pub fn antiderivative(&self, z_ref: f64) -> Polynomial {
        let mut coeffs = vec![0.0];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i as f64 + 1.0)),
        );
        let mut p = Polynomial::new(coeffs);
        p.coeffs[0] = -p.eval(z_ref);
        p
    }

    /// Divided difference (p(a) - p(b)) / (a - b), evaluated without the
    /// subtraction: sum of c_n * (a^{n-1} + a^{n-2} b + ... + b^{n-1}).
    ///
    /// This is what keeps arm-difference integrands accurate when a and b
    /// agree to ten significant digits.
    pub fn divided_difference(&self, a: f64, b: f64) -> f64 {
        let mut s = 0.0f64; // symmetric power sum, s_n = a*s_{n-1} + b^{n-1}
        let mut b_pow = 1.0;
        let mut acc = KahanSum::new();
        for &c in self.coeffs.iter().skip(1) {
            s = s.mul_add(a, b_pow);
            b_pow *= b;
            acc.add(c * s);
        }
        acc.value()
    }

    /// Compose with a linear map: returns q with q(z) = p(alpha z + beta).
    pub fn compose_linear(&self, alpha: f64, beta: f64) -> Polynomial {
        let mut result = vec![*self.coeffs.last().unwrap()];
        for &c in self.coeffs.iter().rev().skip(1) {
            // result = result * (alpha z + beta) + c
            let mut next = vec![0.0; result.len() + 1];
            for (i, &r) in result.iter().enumerate() {
                next[i + 1] += alpha * r;
                next[i] += beta * r;
            }
            next[0] += c;
            result = next;
        }
        Polynomial::new(result)
    }
}

/// Least-squares polynomial fit of (x, y) samples.
///
/// Returns the polynomial in the original variable and the RMS residual.
/// Errors on underdetermined input or a rank-deficient system.
pub fn fit_least_squares(x: &[f64], y: &[f64], degree: usize) -> Result<(Polynomial, f64)> {
    if x.len() != y.len() {
        return Err(Error::Fit("x and y lengths differ".into()));
    }
    if x.len() <= degree {
        return Err(Error::Fit(format!(
            "need more than {} samples for a degree-{} fit, got {}",
            degree,
            degree,
            x.len()
        )));
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi - lo).is_finite() || (degree > 0 && hi <= lo) {
        return Err(Error::Fit("degenerate abscissa range".into()));
    }
    // map to u in [-1, 1]; for degree 0 the scale is irrelevant
    let (alpha, beta) = if hi > lo {
        (2.0 / (hi - lo), -(hi + lo) / (hi - lo))
    } else {
        (1.0, 0.0)
    };

    let rows = x.len();
    let cols = degree + 1;
    let mut design = DMatrix::zeros(rows, cols);
    for (r, &xv) in x.iter().enumerate() {
        let u = alpha.mul_add(xv, beta);
        let mut p = 1.0;
        for c in 0..cols {
            design[(r, c)] = p;
            p *= u;
        }
    }
    let rhs = DVector::from_column_slice(y);
    let svd = design.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let tol = s_max * f64::EPSILON * rows.max(cols) as f64;
    if svd.singular_values.iter().any(|&s| s <= tol) {
        return Err(Error::Fit("rank-deficient normal system".into()));
    }
    let sol = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::Fit(e.to_string()))?;

    let in_u = Polynomial::new(sol.iter().copied().collect());
    let fitted = in_u.compose_linear(alpha, beta);

    let mut acc = KahanSum::new();
    for (&xv, &yv) in x.iter().zip(y) {
        let r = fitted.eval(xv) - yv;
        acc.add(r * r);
    }
    let rms = (acc.value() / rows as f64).sqrt();
    Ok((fitted, rms))
}
