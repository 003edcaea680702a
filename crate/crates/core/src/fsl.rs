//! Finite-speed-of-light phase corrections and their mitigation by a
//! last-pulse detuning, for two-photon transitions with both lasers at z_U
//! and a retro-mirror at z_L.
//!
//! Everything here is closed form; the numerical engine treats pulses as
//! simultaneous at t = 0, T_R, 2 T_R and leaves photon flight times to this
//! module.

use crate::error::{Error, Result};
use crate::params::{AtomSpecies, PhysicalConstants};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FslConfig {
    /// Laser height z_U `[m]`.
    pub z_upper: f64,
    /// Retro-mirror height z_L `[m]`.
    pub z_lower: f64,
    /// Launch velocity `[m/s]`.
    pub v0: f64,
    /// Half interferometer time `[s]`.
    pub t_r: f64,
    /// Momentum-quantum multiplier.
    pub n: u32,
    /// Effective wave number `[1/m]`.
    pub k: f64,
}

impl FslConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.z_upper > self.z_lower) {
            return Err(Error::InvalidParameter(format!(
                "lasers at {} m must sit above the mirror at {} m",
                self.z_upper, self.z_lower
            )));
        }
        if !(self.k > 0.0) || self.n < 1 || !(self.t_r > 0.0) {
            return Err(Error::InvalidParameter("need k > 0, N >= 1, T_R > 0".into()));
        }
        Ok(())
    }

    fn recoil(&self, atom: &AtomSpecies, consts: &PhysicalConstants) -> f64 {
        consts.hbar * self.k / atom.mass
    }
}

/// Finite-speed-of-light phase, split into its T_R-dependent part and the
/// time-independent offset set by the laser/mirror placement:
///
/// time_dependent = (4 hbar N^2 k^2 T_R / m c) (4 g T_R - v0 - N hbar k / m)
/// static_part    = (2 hbar N^2 k^2 / m c) (2 z_L - z0 - z_U)
///
/// Both vanish at infinite c.
pub fn fsl_phase(
    cfg: &FslConfig,
    z0: f64,
    g: f64,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if consts.c.is_infinite() {
        return Ok((0.0, 0.0));
    }
    let n = cfg.n as f64;
    let w = cfg.recoil(atom, consts);
    let hk2_mc = consts.hbar * cfg.k * cfg.k / (atom.mass * consts.c); // hbar k^2 / (m c)
    let time_dependent = 4.0 * n * n * hk2_mc * cfg.t_r * (4.0 * g * cfg.t_r - cfg.v0 - n * w);
    let static_part = 2.0 * n * n * hk2_mc * (2.0 * cfg.z_lower - z0 - cfg.z_upper);
    Ok((time_dependent, static_part))
}

/// Phase generated by scaling the final pulse as k -> (1 + delta) k:
/// 2 N k T_R delta (v0 + N hbar k / m - g T_R).
///
/// The bracket vanishes exactly on the launch-mode constraint
/// v0 + N hbar k / m = g T_R, where this knob loses its grip.
pub fn detuning_phase(
    cfg: &FslConfig,
    delta_det: f64,
    g: f64,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
) -> Result<f64> {
    cfg.validate()?;
    let n = cfg.n as f64;
    let w = cfg.recoil(atom, consts);
    Ok(2.0 * n * cfg.k * cfg.t_r * delta_det * (cfg.v0 + n * w - g * cfg.t_r))
}

/// The detuning plan that cancels the time-dependent FSL phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningPlan {
    /// Fractional wave-number shift of the final pulse.
    pub delta_det: f64,
    /// Corresponding laser frequency shift c k delta `[Hz]`.
    pub nu_det: f64,
    /// T_R at which the required detuning diverges, (v0 + N hbar k/m)/g `[s]`.
    pub pole_t_r: f64,
}

/// How close to the pole the plan refuses to operate `[s]`.
pub const POLE_GUARD: f64 = 1e-6;

/// Final-pulse detuning cancelling the time-dependent FSL phase exactly:
///
/// delta = 2 N (v0 + N hbar k/m - 4 g T_R) / (v0 + N hbar k/m - g T_R) * hbar k / (m c)
///
/// The leading N keeps the cancellation identity exact for every N; at N = 1
/// it reduces to the single-interaction form.
pub fn optimal_detuning(
    cfg: &FslConfig,
    g: f64,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
) -> Result<DetuningPlan> {
    cfg.validate()?;
    if !(g > 0.0) {
        return Err(Error::InvalidParameter(format!("optimal detuning needs g > 0, got {g}")));
    }
    let n = cfg.n as f64;
    let w = cfg.recoil(atom, consts);
    let pole_t_r = (cfg.v0 + n * w) / g;
    if (cfg.t_r - pole_t_r).abs() < POLE_GUARD {
        return Err(Error::DetuningPole { t_r: cfg.t_r, pole: pole_t_r, tol: POLE_GUARD });
    }
    let numer = cfg.v0 + n * w - 4.0 * g * cfg.t_r;
    let denom = cfg.v0 + n * w - g * cfg.t_r;
    let delta_det = 2.0 * n * (numer / denom) * consts.hbar * cfg.k / (atom.mass * consts.c);
    Ok(DetuningPlan { delta_det, nu_det: consts.c * cfg.k * delta_det, pole_t_r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::LaserConfig;
    use approx::assert_relative_eq;

    fn setup() -> (AtomSpecies, PhysicalConstants) {
        let consts = PhysicalConstants::default();
        (AtomSpecies::rubidium87(&consts), consts)
    }

    fn cfg(v0: f64, t_r: f64, n: u32) -> FslConfig {
        let laser = LaserConfig::reference();
        FslConfig { z_upper: 10.0, z_lower: 0.0, v0, t_r, n, k: laser.k }
    }

    #[test]
    fn fsl_phase_reference_values() {
        let (atom, consts) = setup();
        let (td, st) = fsl_phase(&cfg(5.886, 0.6, 1), 0.0, 9.81, &atom, &consts).unwrap();
        assert_relative_eq!(td, 1.6509e-3, max_relative = 1e-3);
        assert_relative_eq!(st, -7.792e-4, max_relative = 1e-3);
    }

    #[test]
    fn fsl_phase_vanishes_at_infinite_c() {
        let (atom, _) = setup();
        let consts = PhysicalConstants::with_infinite_c();
        let (td, st) = fsl_phase(&cfg(5.886, 0.6, 1), 0.0, 9.81, &atom, &consts).unwrap();
        assert_eq!((td, st), (0.0, 0.0));
    }

    #[test]
    fn fsl_phase_is_odd_in_inverse_c() {
        let (atom, consts) = setup();
        let mut doubled = consts;
        doubled.c *= 2.0;
        let (td1, st1) = fsl_phase(&cfg(5.0, 0.3, 2), 1.0, 9.81, &atom, &consts).unwrap();
        let (td2, st2) = fsl_phase(&cfg(5.0, 0.3, 2), 1.0, 9.81, &atom, &doubled).unwrap();
        assert_relative_eq!(td2, 0.5 * td1, max_relative = 1e-14);
        assert_relative_eq!(st2, 0.5 * st1, max_relative = 1e-14);
    }

    #[test]
    fn detuning_phase_reference_value() {
        let (atom, consts) = setup();
        let phi = detuning_phase(&cfg(5.0, 0.2, 1), 1e-11, 9.81, &atom, &consts).unwrap();
        assert_relative_eq!(phi, 4.865e-5, max_relative = 1e-3);
        assert_eq!(detuning_phase(&cfg(5.0, 0.2, 1), 0.0, 9.81, &atom, &consts).unwrap(), 0.0);
    }

    #[test]
    fn detuning_phase_dies_on_the_launch_constraint() {
        // v0 + N hbar k / m = g T_R makes the bracket vanish for any delta
        let (atom, consts) = setup();
        let w = consts.hbar * 4e6 / atom.mass;
        let t_r = 0.4;
        let v0 = 9.81 * t_r - w;
        for delta in [1e-12, -3e-11, 0.5e-9] {
            let phi = detuning_phase(&cfg(v0, t_r, 1), delta, 9.81, &atom, &consts).unwrap();
            assert!(phi.abs() < 1e-20, "{phi}");
        }
    }

    #[test]
    fn optimal_detuning_reference_values() {
        let (atom, consts) = setup();
        let plan = optimal_detuning(&cfg(5.0, 0.2, 1), 9.81, &atom, &consts).unwrap();
        assert_relative_eq!(plan.delta_det, -1.8226e-11, max_relative = 1e-3);
        assert_relative_eq!(plan.nu_det, consts.c * 4e6 * plan.delta_det, max_relative = 1e-14);
        // pole near half a second for a 5 m/s launch
        assert_relative_eq!(plan.pole_t_r, 0.50998, max_relative = 1e-4);
        // frequency shift lands in the tens of kHz
        assert!(plan.nu_det.abs() > 1e4 && plan.nu_det.abs() < 1e5, "{}", plan.nu_det);
    }

    #[test]
    fn optimal_detuning_zero_at_quarter_pole() {
        // 4 g T_R = v0 + N hbar k / m makes the numerator vanish
        let (atom, consts) = setup();
        let w = consts.hbar * 4e6 / atom.mass;
        let t_r = (5.0 + w) / (4.0 * 9.81);
        let plan = optimal_detuning(&cfg(5.0, t_r, 1), 9.81, &atom, &consts).unwrap();
        assert!(plan.delta_det.abs() < 1e-26, "{}", plan.delta_det);
    }

    #[test]
    fn pole_is_a_hard_error() {
        let (atom, consts) = setup();
        let w = consts.hbar * 4e6 / atom.mass;
        let pole = (5.0 + w) / 9.81;
        match optimal_detuning(&cfg(5.0, pole + 2e-7, 1), 9.81, &atom, &consts) {
            Err(Error::DetuningPole { pole: p, .. }) => {
                assert_relative_eq!(p, pole, max_relative = 1e-12)
            }
            other => panic!("expected DetuningPole, got {other:?}"),
        }
    }

    #[test]
    fn mitigation_cancels_time_dependent_part_for_all_n() {
        let (atom, consts) = setup();
        for n in [1u32, 2, 4] {
            for (v0, t_r) in [(5.0, 0.2), (2.0, 0.45), (8.0, 0.1), (5.886, 0.6)] {
                let c = cfg(v0, t_r, n);
                let plan = optimal_detuning(&c, 9.81, &atom, &consts).unwrap();
                let (td, _) = fsl_phase(&c, 0.0, 9.81, &atom, &consts).unwrap();
                let add = detuning_phase(&c, plan.delta_det, 9.81, &atom, &consts).unwrap();
                assert!(
                    (add + td).abs() <= 1e-15 * td.abs().max(1e-30),
                    "N={n} v0={v0} T={t_r}: residual {}",
                    add + td
                );
            }
        }
    }
}
