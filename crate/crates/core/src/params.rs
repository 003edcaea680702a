//! Physical constants, atom and laser parameters, launch kinematics.
//!
//! All types are plain immutable value types; constructors validate the
//! invariants once and evaluation code trusts them afterwards.

use crate::error::{Error, Result};

/// Reduced Planck constant, CODATA 2018 `[J s]`.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum `[m/s]`.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Atomic mass unit, CODATA 2018 `[kg]`.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant `[J s]`.
    pub hbar: f64,
    /// Speed of light `[m/s]`; may be `f64::INFINITY` for idealized runs, in
    /// which case every 1/c and 1/c^2 correction evaluates to zero.
    pub c: f64,
    /// Atomic mass unit `[kg]`.
    pub amu: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: HBAR, c: SPEED_OF_LIGHT, amu: ATOMIC_MASS_UNIT }
    }
}

impl PhysicalConstants {
    /// CODATA values with the speed of light sent to infinity.
    pub fn with_infinite_c() -> Self {
        Self { c: f64::INFINITY, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) || !(self.amu > 0.0) || !(self.c > 0.0) {
            return Err(Error::InvalidParameter(
                "physical constants must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpecies {
    /// Atomic mass `[kg]`.
    pub mass: f64,
}

impl AtomSpecies {
    pub fn new(mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("atom mass {mass} kg must be > 0")));
        }
        Ok(Self { mass })
    }

    pub fn from_amu(mass_amu: f64, consts: &PhysicalConstants) -> Result<Self> {
        Self::new(mass_amu * consts.amu)
    }

    /// 87 amu, the species used throughout the reference configuration.
    pub fn rubidium87(consts: &PhysicalConstants) -> Self {
        Self { mass: 87.0 * consts.amu }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserConfig {
    /// Effective wave number per momentum quantum `[1/m]`.
    pub k: f64,
    /// Momentum-quantum multiplier N (the MZI transfers 2N quanta).
    pub n: u32,
    /// Recoil frequency parameter used by the analytic catalogue `[rad/s]`.
    ///
    /// Kept independent of `k` and the atomic mass; see
    /// [`recoil_quantities`] for the value derived from them.
    pub omega_r: f64,
    /// Laser height z_U `[m]`.
    pub z_upper: f64,
    /// Retro-mirror height z_L `[m]`.
    pub z_lower: f64,
    /// Fractional wave-number shift applied from the mirror pulse onward.
    pub mirror_detuning: f64,
    /// Additional fractional shift of the final pulse only.
    pub final_detuning: f64,
}

impl LaserConfig {
    /// Reference configuration: k = 4e6 1/m, N = 1, omega_R = 1e7 rad/s,
    /// lasers at 10 m above the mirror.
    pub fn reference() -> Self {
        Self {
            k: 4e6,
            n: 1,
            omega_r: 1e7,
            z_upper: 10.0,
            z_lower: 0.0,
            mirror_detuning: 0.0,
            final_detuning: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) {
            return Err(Error::InvalidParameter(format!("wave number k = {} must be > 0", self.k)));
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("momentum multiplier N must be >= 1".into()));
        }
        if !(self.z_upper > self.z_lower) {
            return Err(Error::InvalidParameter(format!(
                "laser height {} must lie above the mirror at {}",
                self.z_upper, self.z_lower
            )));
        }
        if self.mirror_detuning.abs() >= 1.0 || self.final_detuning.abs() >= 1.0 {
            return Err(Error::InvalidParameter("fractional detunings must satisfy |d| < 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentParams {
    /// Initial height `[m]`.
    pub z0: f64,
    /// Initial velocity `[m/s]`.
    pub v0: f64,
    /// Half interferometer time T_R `[s]`; pulses at 0, T_R, 2 T_R.
    pub t_r: f64,
    /// Integration steps over [0, 2 T_R]; must be even so the mirror pulse
    /// falls on a grid node.
    pub n_steps: usize,
}

/// Default step count; halving the step size changes the differential phase
/// by far less than the phase resolution of interest.
pub const DEFAULT_N_STEPS: usize = 20_000;

impl ExperimentParams {
    pub fn new(z0: f64, v0: f64, t_r: f64, n_steps: usize) -> Result<Self> {
        let p = Self { z0, v0, t_r, n_steps };
        p.validate()?;
        Ok(p)
    }

    /// Reference kinematics: z0 = 5 m, v0 = 6 m/s, T_R = 0.6 s.
    pub fn reference() -> Self {
        Self { z0: 5.0, v0: 6.0, t_r: 0.6, n_steps: DEFAULT_N_STEPS }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_r > 0.0) {
            return Err(Error::InvalidParameter(format!("T_R = {} s must be > 0", self.t_r)));
        }
        if self.n_steps < 2 || !self.n_steps.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "n_steps = {} must be even and >= 2",
                self.n_steps
            )));
        }
        if !self.z0.is_finite() || !self.v0.is_finite() {
            return Err(Error::InvalidParameter("z0 and v0 must be finite".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.t_r / self.n_steps as f64
    }
}

/// Single-quantum recoil velocity hbar k / m and the recoil frequency
/// hbar k^2 / (2 m) derived from the wave number and atomic mass.
///
/// Does not touch `LaserConfig::omega_r`: the catalogue treats omega_R as an
/// independent parameter.
pub fn recoil_quantities(
    laser: &LaserConfig,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
) -> (f64, f64) {
    let v_rec = consts.hbar * laser.k / atom.mass;
    (v_rec, 0.5 * v_rec * laser.k)
}

/// Launch kinematics placing the trajectory apex at the mirror pulse:
/// T_R = sqrt(2 dh / g), v0 = g T_R.
pub fn launch_from_height(delta_h: f64, g_local: f64) -> Result<(f64, f64)> {
    if !(delta_h > 0.0) || !(g_local > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "launch needs delta_h > 0 and g > 0, got {delta_h}, {g_local}"
        )));
    }
    let t_r = (2.0 * delta_h / g_local).sqrt();
    Ok((t_r, g_local * t_r))
}
