//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an out-of-contract value.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Evaluation requested outside the fitted region of a sampled/synthetic field.
    #[error("height {z} m is outside the fitted region [{z_min}, {z_max}] m")]
    OutsideRoi { z: f64, z_min: f64, z_max: f64 },

    /// A trajectory left the fitted region during propagation.
    #[error("trajectory left the fitted region at t = {time} s, z = {z} m")]
    RoiExit { time: f64, z: f64 },

    /// Least-squares system was rank deficient or otherwise unsolvable.
    #[error("polynomial fit failed: {0}")]
    Fit(String),

    /// Two trajectories do not share a time grid (or launch state).
    #[error("trajectory grids do not match: {0}")]
    GridMismatch(String),

    /// A kick time does not coincide with a node of the integration grid.
    #[error("kick time {time} s does not fall on a grid node (dt = {dt} s)")]
    KickOffGrid { time: f64, dt: f64 },

    /// Optimal-detuning denominator vanishes; the detuning diverges.
    #[error("optimal detuning diverges: T_R = {t_r} s is within {tol} s of the pole at {pole} s")]
    DetuningPole { t_r: f64, pole: f64, tol: f64 },

    /// Curvature series order exceeds the polynomial degree of the field.
    #[error("series order {n_max} exceeds the polynomial degree {degree}")]
    SeriesOrder { n_max: usize, degree: usize },

    /// A sweep was requested over an empty evaluation range.
    #[error("empty evaluation range")]
    EmptyRange,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed sample CSV.
    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures caused by leaving the model's region of validity or
    /// hitting a singular configuration (as opposed to bad configuration).
    pub fn is_domain_exit(&self) -> bool {
        matches!(
            self,
            Error::OutsideRoi { .. } | Error::RoiExit { .. } | Error::DetuningPole { .. }
        )
    }
}
