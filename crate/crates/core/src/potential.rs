//! One-dimensional gravitational field models.
//!
//! A model provides the potential phi(z), the local acceleration
//! g(z) = d(phi)/dz and the curvature Gamma(z) = d2(phi)/dz2. Three variants
//! exist: the ideal quadratic potential, an explicit polynomial, and sampled
//! g(z) data that is fitted by a polynomial at construction. Sampled and
//! synthetic fields carry a region of interest; evaluating or propagating
//! outside it is a hard error, because extrapolated curvature is silently
//! wrong.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::poly::{fit_least_squares, Polynomial};

/// Height interval over which a fitted field is valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roi {
    pub z_min: f64,
    pub z_max: f64,
}

impl Roi {
    pub fn new(z_min: f64, z_max: f64) -> Result<Self> {
        if !(z_max > z_min) {
            return Err(Error::InvalidParameter(format!(
                "degenerate region of interest [{z_min}, {z_max}]"
            )));
        }
        Ok(Self { z_min, z_max })
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.z_min && z <= self.z_max
    }

    pub fn span(&self) -> f64 {
        self.z_max - self.z_min
    }
}

/// phi, g = phi', Gamma = phi'' at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    pub phi: f64,
    pub g: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone)]
pub enum PotentialModel {
    /// phi = g z + Gamma0 z^2 / 2: uniform acceleration plus constant gradient.
    Ideal { g: f64, gamma0: f64 },
    /// Explicit Taylor polynomial of phi, optionally restricted to a region.
    Polynomial { phi: Polynomial, roi: Option<Roi> },
    /// Sampled g(z) data, fitted by a polynomial at construction. Evaluation
    /// is restricted to the sampled range.
    Sampled {
        z: Vec<f64>,
        g: Vec<f64>,
        degree: usize,
        phi: Polynomial,
        residual_rms: f64,
        roi: Roi,
    },
}

/// Default fit degree for sampled data.
pub const DEFAULT_FIT_DEGREE: usize = 8;
/// Default fit degree for synthetic profiles.
pub const DEFAULT_SYNTH_DEGREE: usize = 10;

impl PotentialModel {
    pub fn ideal(g: f64, gamma0: f64) -> Self {
        PotentialModel::Ideal { g, gamma0 }
    }

    /// Build from Taylor coefficients of phi (ascending powers).
    pub fn from_phi_coeffs(coeffs: Vec<f64>, roi: Option<Roi>) -> Self {
        PotentialModel::Polynomial { phi: Polynomial::new(coeffs), roi }
    }

    /// Least-squares fit of sampled accelerations g(z_i). The potential is the
    /// analytic antiderivative of the fit with phi(z_min) = 0; the curvature
    /// is its analytic derivative.
    pub fn fit_polynomial(z: &[f64], g: &[f64], degree: usize) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::Fit("need at least two samples".into()));
        }
        for w in z.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Fit(format!(
                    "sample heights must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        let (g_poly, residual_rms) = fit_least_squares(z, g, degree)?;
        let roi = Roi::new(z[0], z[z.len() - 1])?;
        let phi = g_poly.antiderivative(roi.z_min);
        Ok(PotentialModel::Sampled {
            z: z.to_vec(),
            g: g.to_vec(),
            degree,
            phi,
            residual_rms,
            roi,
        })
    }

    /// Sampled g(z) from a CSV file with header `z_m,g_mps2` (extra columns
    /// are ignored), fitted at the given degree.
    pub fn from_csv<P: AsRef<Path>>(path: P, degree: usize) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let (z, g) = read_samples(std::io::BufReader::new(file))?;
        Self::fit_polynomial(&z, &g, degree)
    }

    /// RMS residual of the fit, for sampled models.
    pub fn fit_residual(&self) -> Option<f64> {
        match self {
            PotentialModel::Sampled { residual_rms, .. } => Some(*residual_rms),
            _ => None,
        }
    }

    pub fn roi(&self) -> Option<Roi> {
        match self {
            PotentialModel::Ideal { .. } => None,
            PotentialModel::Polynomial { roi, .. } => *roi,
            PotentialModel::Sampled { roi, .. } => Some(*roi),
        }
    }

    /// Taylor coefficients of phi. For the ideal variant these are
    /// [0, g, Gamma0/2]; fitted variants expose the fit.
    pub fn phi_coeffs(&self) -> Vec<f64> {
        match self {
            PotentialModel::Ideal { g, gamma0 } => vec![0.0, *g, 0.5 * gamma0],
            PotentialModel::Polynomial { phi, .. } | PotentialModel::Sampled { phi, .. } => {
                phi.coeffs().to_vec()
            }
        }
    }

    pub fn check_roi(&self, z: f64) -> Result<()> {
        if let Some(roi) = self.roi() {
            if !roi.contains(z) {
                return Err(Error::OutsideRoi { z, z_min: roi.z_min, z_max: roi.z_max });
            }
        }
        Ok(())
    }

    /// Potential, acceleration and curvature at height z.
    pub fn eval(&self, z: f64) -> Result<PotentialSample> {
        self.check_roi(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: f64) -> PotentialSample {
        match self {
            PotentialModel::Ideal { g, gamma0 } => PotentialSample {
                phi: z * g.mul_add(1.0, 0.5 * gamma0 * z), // g z + Gamma0 z^2 / 2
                g: gamma0.mul_add(z, *g),
                gamma: *gamma0,
            },
            PotentialModel::Polynomial { phi, .. } | PotentialModel::Sampled { phi, .. } => {
                let (p, d1, d2) = phi.eval_with_derivatives(z);
                PotentialSample { phi: p, g: d1, gamma: d2 }
            }
        }
    }

    /// -g(z), the equation of motion right-hand side.
    pub(crate) fn accel(&self, z: f64) -> f64 {
        match self {
            PotentialModel::Ideal { g, gamma0 } => -gamma0.mul_add(z, *g),
            PotentialModel::Polynomial { phi, .. } | PotentialModel::Sampled { phi, .. } => {
                let (_, d1, _) = phi.eval_with_derivatives(z);
                -d1
            }
        }
    }

    /// (g(a) - g(b)) / (a - b) in cancellation-free form; drives the relative
    /// dynamics of a kicked arm against the unkicked reference path.
    pub(crate) fn g_divided_difference(&self, a: f64, b: f64) -> f64 {
        match self {
            PotentialModel::Ideal { gamma0, .. } => *gamma0,
            PotentialModel::Polynomial { phi, .. } | PotentialModel::Sampled { phi, .. } => {
                // derivative coefficients on the fly would allocate; reuse the
                // second-difference identity on phi' instead
                phi.derivative_divided_difference(a, b)
            }
        }
    }

    /// (phi(a) - phi(b)) / (a - b) in cancellation-free form.
    pub(crate) fn phi_divided_difference(&self, a: f64, b: f64) -> f64 {
        match self {
            PotentialModel::Ideal { g, gamma0 } => g + 0.5 * gamma0 * (a + b),
            PotentialModel::Polynomial { phi, .. } | PotentialModel::Sampled { phi, .. } => {
                phi.divided_difference(a, b)
            }
        }
    }
}

/// One Gaussian curvature bump of a synthetic profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    /// Center height `[m]`.
    pub center: f64,
    /// Gaussian width `[m]`.
    pub width: f64,
    /// Peak curvature excursion `[1/s^2]`.
    pub amplitude: f64,
}

/// Synthetic stand-in for a measured vertical gravity profile: a base
/// gradient plus Gaussian curvature bumps, integrated analytically to g(z)
/// and fitted by a polynomial so that downstream derivatives are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSpec {
    /// Acceleration at the bottom of the region `[m/s^2]`.
    pub g_ref: f64,
    /// Baseline gradient `[1/s^2]`.
    pub gamma_base: f64,
    pub bumps: Vec<Bump>,
    pub roi: Roi,
}

impl ProfileSpec {
    pub fn validate(&self) -> Result<()> {
        for b in &self.bumps {
            if !(b.width > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "bump width {} m must be > 0",
                    b.width
                )));
            }
        }
        Ok(())
    }

    /// Profile resembling a tall-building baseline: curvature varying by
    /// about 1e-7 1/s^2 over an 8 m region, bump widths above a metre.
    pub fn tower_default() -> Self {
        Self {
            g_ref: 9.812,
            gamma_base: -2.7e-6,
            bumps: vec![
                Bump { center: 2.8, width: 2.2, amplitude: 6e-8 },
                Bump { center: 5.8, width: 2.6, amplitude: -5e-8 },
            ],
            roi: Roi { z_min: 0.0, z_max: 8.0 },
        }
    }

    /// Curvature of the generating field (before the polynomial fit).
    pub fn gamma_at(&self, z: f64) -> f64 {
        let mut gamma = self.gamma_base;
        for b in &self.bumps {
            let u = (z - b.center) / b.width;
            gamma += b.amplitude * (-0.5 * u * u).exp();
        }
        gamma
    }

    /// Acceleration of the generating field: g_ref plus the analytic integral
    /// of the curvature from the bottom of the region.
    pub fn g_at(&self, z: f64) -> f64 {
        let mut g = self.g_ref + self.gamma_base * (z - self.roi.z_min);
        let sqrt2 = std::f64::consts::SQRT_2;
        let half_sqrt_2pi = (std::f64::consts::PI / 2.0).sqrt();
        for b in &self.bumps {
            let hi = libm::erf((z - b.center) / (b.width * sqrt2));
            let lo = libm::erf((self.roi.z_min - b.center) / (b.width * sqrt2));
            g += b.amplitude * b.width * half_sqrt_2pi * (hi - lo);
        }
        g
    }
}

/// Number of g(z) samples drawn across the region when synthesizing.
const SYNTH_SAMPLES: usize = 241;

/// Build a polynomial field from a synthetic profile specification.
pub fn synthesize_profile(spec: &ProfileSpec, degree: usize) -> Result<PotentialModel> {
    spec.validate()?;
    let n = SYNTH_SAMPLES.max(2 * (degree + 1));
    let step = spec.roi.span() / (n - 1) as f64;
    let z: Vec<f64> = (0..n).map(|i| spec.roi.z_min + step * i as f64).collect();
    let g: Vec<f64> = z.iter().map(|&zv| spec.g_at(zv)).collect();
    let (g_poly, _) = fit_least_squares(&z, &g, degree)?;
    let phi = g_poly.antiderivative(spec.roi.z_min);
    Ok(PotentialModel::Polynomial { phi, roi: Some(spec.roi) })
}

impl Polynomial {
    /// Divided difference of the derivative polynomial, without allocating it.
    fn derivative_divided_difference(&self, a: f64, b: f64) -> f64 {
        let mut s = 0.0f64;
        let mut b_pow = 1.0;
        let mut acc = crate::numerics::KahanSum::new();
        for (i, &c) in self.coeffs().iter().enumerate().skip(2) {
            s = s.mul_add(a, b_pow);
            b_pow *= b;
            acc.add(i as f64 * c * s);
        }
        acc.value()
    }
}

/// Parse `z_m,g_mps2` samples; extra columns are ignored, z must increase.
pub fn read_samples<R: BufRead>(reader: R) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut z = Vec::new();
    let mut g = Vec::new();
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Csv { line: 1, msg: "empty file".into() }),
    };
    let mut cols = header.split(',');
    if cols.next().map(str::trim) != Some("z_m") || cols.next().map(str::trim) != Some("g_mps2") {
        return Err(Error::Csv {
            line: 1,
            msg: format!("expected header starting with z_m,g_mps2, got `{header}`"),
        });
    }
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |s: Option<&str>, what: &str| -> Result<f64> {
            s.map(str::trim)
                .ok_or_else(|| Error::Csv { line: lineno, msg: format!("missing {what}") })?
                .parse::<f64>()
                .map_err(|e| Error::Csv { line: lineno, msg: format!("bad {what}: {e}") })
        };
        let zv = parse(fields.next(), "z_m")?;
        let gv = parse(fields.next(), "g_mps2")?;
        if let Some(&prev) = z.last() {
            if zv <= prev {
                return Err(Error::Csv {
                    line: lineno,
                    msg: format!("z must be strictly increasing ({prev} then {zv})"),
                });
            }
        }
        z.push(zv);
        g.push(gv);
    }
    Ok((z, g))
}
