//! Gravity-gradient estimation from the co-located differential phase.
//!
//! The estimator divides the differential phase by the ideal scale factor
//! `f = 2 N^2 hbar k^2 T_R^3 / m` and assigns the result to the height the
//! atoms effectively sample: the launch height shifted up by the cubic mean
//! of the trajectory, `(16/35)^{1/3} * delta_h ~ 0.77 delta_h` for a
//! launch-mode parabola.

use crate::analytic::scale_factor;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::interferometer::run_cgi;
use crate::numerics::{integrate_uniform, KahanSum};
use crate::params::{
    launch_from_height, AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants,
};
use crate::potential::PotentialModel;

/// (16/35)^{1/3}: cubic mean of a launch-mode parabola in units of the
/// baseline delta_h. From integral(tau^3 (2-tau)^3, 0..2) = 32/35.
pub fn cubic_mean_ratio() -> f64 {
    (16.0 / 35.0f64).cbrt()
}

/// Cubic mean of the atomic position relative to its launch height,
/// ((1/2T) * integral |z - z0|^3 dt)^{1/3}, by compensated Simpson.
pub fn cubic_mean(traj: &Trajectory) -> f64 {
    let z0 = traj.z(0);
    let n = traj.end_node();
    let values: Vec<f64> = (0..=n)
        .map(|j| {
            let d = traj.z(j) - z0;
            d.abs().powi(3)
        })
        .collect();
    let total_time = traj.dt() * n as f64;
    // kicks leave the position continuous; the cusp of |.|^3 is at worst at
    // the apex, where the integrand is flat
    let integral = integrate_uniform(&values, traj.dt());
    (integral / total_time).cbrt()
}

/// One row of a profile sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub z_eval: f64,
    pub gamma_hat: f64,
    pub gamma_true: f64,
    pub phase: f64,
    pub z_launch: f64,
}

/// Sweep result: per-height estimates plus aggregate errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEstimate {
    pub rows: Vec<EstimateRow>,
    pub delta_h: f64,
    /// sqrt(mean((gamma_hat - gamma_true)^2)) `[1/s^2]`.
    pub rms_error: f64,
    /// Mean |differential phase| across the sweep `[rad]`; the signal-strength
    /// proxy traded off against spatial resolution.
    pub mean_abs_phase: f64,
}

/// Default spacing of the evaluation grid `[m]`.
pub const DEFAULT_EVAL_SPACING: f64 = 0.1;

/// Estimate the gravity gradient at `z_eval` with baseline `delta_h`.
///
/// Launches from `z_eval - (16/35)^{1/3} delta_h` with apex-at-mirror
/// kinematics driven by the local acceleration, runs the co-located pair and
/// divides the differential by the ideal scale factor.
pub fn estimate_gamma(
    model: &PotentialModel,
    laser: &LaserConfig,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
    z_eval: f64,
    delta_h: f64,
    n_steps: usize,
) -> Result<EstimateRow> {
    let z_launch = z_eval - cubic_mean_ratio() * delta_h;
    let g_local = model.eval(z_launch)?.g;
    let (t_r, v0) = launch_from_height(delta_h, g_local)?;
    let params = ExperimentParams { z0: z_launch, v0, t_r, n_steps };
    let result = run_cgi(laser, &params, model, atom, consts)?;
    let f = scale_factor(laser, atom, t_r, consts);
    let gamma_true = model.eval(z_eval)?.gamma;
    Ok(EstimateRow {
        z_eval,
        gamma_hat: result.differential / f,
        gamma_true,
        phase: result.differential,
        z_launch,
    })
}

/// Estimate across a grid of evaluation heights.
pub fn sweep_estimate(
    model: &PotentialModel,
    laser: &LaserConfig,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
    z_eval: &[f64],
    delta_h: f64,
    n_steps: usize,
) -> Result<ProfileEstimate> {
    if z_eval.is_empty() {
        return Err(Error::EmptyRange);
    }
    let rows: Vec<EstimateRow> = z_eval
        .iter()
        .map(|&z| estimate_gamma(model, laser, atom, consts, z, delta_h, n_steps))
        .collect::<Result<_>>()?;
    Ok(aggregate_rows(rows, delta_h))
}

/// Assemble per-point rows (computed serially or in parallel) into a profile
/// estimate with its aggregate errors.
pub fn aggregate_rows(rows: Vec<EstimateRow>, delta_h: f64) -> ProfileEstimate {
    let mut sq = KahanSum::new();
    let mut abs_phase = KahanSum::new();
    for r in &rows {
        let e = r.gamma_hat - r.gamma_true;
        sq.add(e * e);
        abs_phase.add(r.phase.abs());
    }
    let n = rows.len() as f64;
    ProfileEstimate {
        delta_h,
        rms_error: (sq.value() / n).sqrt(),
        mean_abs_phase: abs_phase.value() / n,
        rows,
    }
}

/// Evaluation heights reachable with baseline `delta_h` inside the model's
/// fitted region: launch point and whole trajectory must stay inside, with
/// `margin` kept clear at both ends for the recoil excursion and the
/// launch-mode return to the launch height at 2 T_R.
pub fn feasible_eval_grid(
    model: &PotentialModel,
    delta_h: f64,
    spacing: f64,
    margin: f64,
) -> Result<Vec<f64>> {
    let roi = model.roi().ok_or_else(|| {
        Error::InvalidParameter("feasible grid needs a model with a fitted region".into())
    })?;
    let shift = cubic_mean_ratio() * delta_h;
    let lo = roi.z_min + shift + margin;
    let hi = roi.z_max - delta_h + shift - margin;
    if !(hi > lo) {
        return Err(Error::EmptyRange);
    }
    let n = ((hi - lo) / spacing).floor() as usize;
    Ok((0..=n).map(|i| lo + spacing * i as f64).collect())
}

/// Sampling-design numbers for an interferometer array resolving a
/// time-varying field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    /// Smallest interferometer time at which the curvature signal reaches the
    /// phase resolution `[s]`.
    pub t_r_min: f64,
    /// Largest resolvable variation frequency, 1/(2 T_R_min) `[Hz]`.
    pub nu_max: f64,
    /// Baseline corresponding to T_R_min in launch mode `[m]`.
    pub delta_h_min: f64,
}

/// Solve f(T_R) |gamma| = phase_resolution for the minimal interferometer
/// time; the cycle constraint nu^-1 > 2 T_R then caps the variation frequency.
pub fn plan_sampling(
    laser: &LaserConfig,
    atom: &AtomSpecies,
    consts: &PhysicalConstants,
    gamma_scale: f64,
    phase_resolution: f64,
    g_local: f64,
) -> Result<SamplingPlan> {
    if !(gamma_scale.abs() > 0.0) || !(phase_resolution > 0.0) || !(g_local > 0.0) {
        return Err(Error::InvalidParameter(
            "plan_sampling needs gamma != 0, resolution > 0, g > 0".into(),
        ));
    }
    let f_per_t3 = scale_factor(laser, atom, 1.0, consts); // f = f_per_t3 * T^3
    let t_r_min = (phase_resolution / (f_per_t3 * gamma_scale.abs())).cbrt();
    Ok(SamplingPlan {
        t_r_min,
        nu_max: 1.0 / (2.0 * t_r_min),
        delta_h_min: 0.5 * g_local * t_r_min * t_r_min,
    })
}
