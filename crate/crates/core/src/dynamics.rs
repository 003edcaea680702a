//! Classical trajectories with instantaneous photon-recoil kicks.
//!
//! Every arm is integrated as a pair (base, offset): the base is the unkicked
//! trajectory from the shared initial conditions, the offset is the
//! recoil-induced deviation of the arm, driven by the cancellation-free
//! divided difference of the field. Arms of both interferometers then share
//! the base bit-for-bit, and phase differences can be assembled from offsets
//! that carry full relative precision even though they sit ten orders of
//! magnitude below the absolute positions.
//!
//! The integrator is classical fixed-step RK4 with Neumaier-compensated state
//! accumulation; for the ideal (quadratic) potential the stage polynomials are
//! exact and the only error left is rounding.

use crate::error::{Error, Result};
use crate::numerics::{integrate_uniform, KahanSum};
use crate::params::ExperimentParams;
use crate::potential::PotentialModel;

/// One instantaneous atom-light interaction on an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickEvent {
    /// Interaction time within [0, 2 T_R]; must fall on a grid node.
    pub time: f64,
    /// Signed momentum change in units of hbar k.
    pub delta_p_quanta: i32,
    /// Fractional wave-number modifier of this pulse (detuning).
    pub k_scale: f64,
}

impl KickEvent {
    /// Momentum quanta weighted by the pulse's wave-number scale.
    pub fn effective_quanta(&self) -> f64 {
        self.delta_p_quanta as f64 * (1.0 + self.k_scale)
    }
}

/// Launch state plus the ordered kick schedule of one interferometer arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSpec {
    pub z0: f64,
    pub v0: f64,
    pub kicks: Vec<KickEvent>,
}

impl ArmSpec {
    pub fn new(z0: f64, v0: f64, kicks: Vec<KickEvent>) -> Result<Self> {
        for w in kicks.windows(2) {
            if !(w[1].time > w[0].time) {
                return Err(Error::InvalidParameter(format!(
                    "kick times must be strictly increasing ({} then {})",
                    w[0].time, w[1].time
                )));
            }
        }
        Ok(Self { z0, v0, kicks })
    }
}

/// A kick resolved onto the integration grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridKick {
    pub node: usize,
    /// delta_p_quanta * (1 + k_scale)
    pub effective_quanta: f64,
}

/// Sampled classical path of one arm over [0, 2 T_R], in split representation.
///
/// Absolute values are `z = z_base + dz`, `v = v_base + dv`; the base is the
/// unkicked trajectory from the same launch state. Velocities are stored
/// before the kick at each node (`dv_pre`) and after it (`dv_post`); the two
/// agree away from kick nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dt: f64,
    z_base: Vec<f64>,
    v_base: Vec<f64>,
    dz: Vec<f64>,
    dv_pre: Vec<f64>,
    dv_post: Vec<f64>,
    kicks: Vec<GridKick>,
}

impl Trajectory {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of grid intervals.
    pub fn n_steps(&self) -> usize {
        self.z_base.len() - 1
    }

    pub fn time(&self, node: usize) -> f64 {
        node as f64 * self.dt
    }

    pub fn z(&self, node: usize) -> f64 {
        self.z_base[node] + self.dz[node]
    }

    pub fn v_pre(&self, node: usize) -> f64 {
        self.v_base[node] + self.dv_pre[node]
    }

    pub fn v_post(&self, node: usize) -> f64 {
        self.v_base[node] + self.dv_post[node]
    }

    pub fn z_base(&self, node: usize) -> f64 {
        self.z_base[node]
    }

    pub fn v_base(&self, node: usize) -> f64 {
        self.v_base[node]
    }

    pub fn dz(&self, node: usize) -> f64 {
        self.dz[node]
    }

    pub fn dv_pre(&self, node: usize) -> f64 {
        self.dv_pre[node]
    }

    pub fn dv_post(&self, node: usize) -> f64 {
        self.dv_post[node]
    }

    pub fn kicks(&self) -> &[GridKick] {
        &self.kicks
    }

    pub fn end_node(&self) -> usize {
        self.z_base.len() - 1
    }

    /// True when two trajectories live on the same grid with the same base
    /// path, which every pairwise phase operation requires.
    pub fn shares_grid_with(&self, other: &Trajectory) -> bool {
        self.dt == other.dt
            && self.z_base.len() == other.z_base.len()
            && self.z_base[0] == other.z_base[0]
            && self.v_base[0] == other.v_base[0]
    }
}

/// Internal RK4 state: base trajectory plus arm offset, each component with a
/// Neumaier compensation term carried across steps.
struct PairState {
    z_b: Comp,
    v_b: Comp,
    dz: Comp,
    dv: Comp,
}

#[derive(Clone, Copy)]
struct Comp {
    value: f64,
    residual: f64,
}

impl Comp {
    fn new(value: f64) -> Self {
        Self { value, residual: 0.0 }
    }

    #[inline]
    fn add(&mut self, incr: f64) {
        let t = self.value + incr;
        if self.value.abs() >= incr.abs() {
            self.residual += (self.value - t) + incr;
        } else {
            self.residual += (incr - t) + self.value;
        }
        self.value = t;
    }

    fn get(&self) -> f64 {
        self.value + self.residual
    }
}

#[inline]
fn rhs(model: &PotentialModel, z_b: f64, dz: f64) -> (f64, f64) {
    let a_base = model.accel(z_b);
    let a_delta = -dz * model.g_divided_difference(z_b + dz, z_b);
    (a_base, a_delta)
}

/// Propagate one arm through the field.
///
/// `v_quantum` is the single-quantum recoil velocity hbar k / m; each kick
/// changes the arm velocity by `delta_p_quanta * (1 + k_scale) * v_quantum`.
/// Kick times must coincide with grid nodes. The trajectory is checked
/// against the model's region of validity at every node.
pub fn propagate_arm(
    model: &PotentialModel,
    arm: &ArmSpec,
    params: &ExperimentParams,
    v_quantum: f64,
) -> Result<Trajectory> {
    params.validate()?;
    let n = params.n_steps;
    let dt = params.dt();
    let total = 2.0 * params.t_r;

    let mut kicks = Vec::with_capacity(arm.kicks.len());
    for k in &arm.kicks {
        if k.time < -1e-12 || k.time > total * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "kick time {} s outside [0, {}] s",
                k.time, total
            )));
        }
        let node_f = k.time / dt;
        let node = node_f.round() as usize;
        if (node_f - node as f64).abs() > 1e-9 * n as f64 || node > n {
            return Err(Error::KickOffGrid { time: k.time, dt });
        }
        if let Some(prev) = kicks.last() {
            let prev: &GridKick = prev;
            if prev.node == node {
                return Err(Error::InvalidParameter(format!(
                    "two kicks resolve to the same grid node {node}"
                )));
            }
        }
        kicks.push(GridKick { node, effective_quanta: k.effective_quanta() });
    }

    let len = n + 1;
    let mut z_base = vec![0.0; len];
    let mut v_base = vec![0.0; len];
    let mut dz = vec![0.0; len];
    let mut dv_pre = vec![0.0; len];
    let mut dv_post = vec![0.0; len];

    let mut state = PairState {
        z_b: Comp::new(arm.z0),
        v_b: Comp::new(arm.v0),
        dz: Comp::new(0.0),
        dv: Comp::new(0.0),
    };
    let mut kick_iter = kicks.iter().peekable();

    for node in 0..=n {
        let zb = state.z_b.get();
        let vb = state.v_b.get();
        let dzv = state.dz.get();
        z_base[node] = zb;
        v_base[node] = vb;
        dz[node] = dzv;
        dv_pre[node] = state.dv.get();

        let z_arm = zb + dzv;
        if let Some(roi) = model.roi() {
            if !roi.contains(z_arm) {
                return Err(Error::RoiExit { time: node as f64 * dt, z: z_arm });
            }
        }

        while let Some(k) = kick_iter.peek() {
            if k.node == node {
                state.dv.add(k.effective_quanta * v_quantum);
                kick_iter.next();
            } else {
                break;
            }
        }
        dv_post[node] = state.dv.get();

        if node == n {
            break;
        }

        // RK4 stage evaluations on the joint (base, offset) system
        let (zb, vb, dzv, dvv) = (state.z_b.get(), state.v_b.get(), state.dz.get(), state.dv.get());
        let (ab1, ad1) = rhs(model, zb, dzv);
        let (kz1, kv1, kdz1, kdv1) = (vb, ab1, dvv, ad1);

        let (ab2, ad2) = rhs(model, zb + 0.5 * dt * kz1, dzv + 0.5 * dt * kdz1);
        let (kz2, kv2, kdz2, kdv2) = (vb + 0.5 * dt * kv1, ab2, dvv + 0.5 * dt * kdv1, ad2);

        let (ab3, ad3) = rhs(model, zb + 0.5 * dt * kz2, dzv + 0.5 * dt * kdz2);
        let (kz3, kv3, kdz3, kdv3) = (vb + 0.5 * dt * kv2, ab3, dvv + 0.5 * dt * kdv2, ad3);

        let (ab4, ad4) = rhs(model, zb + dt * kz3, dzv + dt * kdz3);
        let (kz4, kv4, kdz4, kdv4) = (vb + dt * kv3, ab4, dvv + dt * kdv3, ad4);

        let sixth = dt / 6.0;
        state.z_b.add(sixth * (kz1 + 2.0 * (kz2 + kz3) + kz4));
        state.v_b.add(sixth * (kv1 + 2.0 * (kv2 + kv3) + kv4));
        state.dz.add(sixth * (kdz1 + 2.0 * (kdz2 + kdz3) + kdz4));
        state.dv.add(sixth * (kdv1 + 2.0 * (kdv2 + kdv3) + kdv4));
    }

    Ok(Trajectory { dt, z_base, v_base, dz, dv_pre, dv_post, kicks })
}

/// First-order closed-form trajectory in the ideal potential:
/// position and velocity of an arm kicked by `n_quanta` at t = 0.
///
/// `v_quantum` is hbar k / m. Valid to first order in Gamma0; the quadratic
/// correction scales as Gamma0^2 t^4 z / 24.
pub fn ideal_trajectory(
    t: f64,
    n_quanta: i32,
    v_quantum: f64,
    z0: f64,
    v0: f64,
    g: f64,
    gamma0: f64,
) -> (f64, f64) {
    let v_start = v0 + n_quanta as f64 * v_quantum;
    let z = z0 + v_start * t
        - 0.5 * g * t * t
        - 0.5 * gamma0 * (z0 * t * t + v_start * t * t * t / 3.0 - g * t * t * t * t / 12.0);
    let v = v_start
        - g * t
        - 0.5 * gamma0 * (2.0 * z0 * t + v_start * t * t - g * t * t * t / 3.0);
    (z, v)
}

/// Segment boundaries for quadrature: node 0, every kick node of either
/// trajectory, and the final node.
pub(crate) fn segment_nodes(up: &Trajectory, lo: &Trajectory) -> Vec<usize> {
    let mut nodes: Vec<usize> = up
        .kicks()
        .iter()
        .chain(lo.kicks().iter())
        .map(|k| k.node)
        .chain([0, up.end_node()])
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Geometry moment A(n) = integral of (z_up^n - z_low^n) dt over the
/// interferometer, by compensated Simpson on the shared grid.
///
/// The integrand is evaluated as (z_up - z_low) * sum_i z_up^i z_low^{n-1-i},
/// which is the same polynomial but free of the catastrophic cancellation of
/// the naive difference.
pub fn moment_integral(up: &Trajectory, lo: &Trajectory, n: u32) -> Result<f64> {
    moment_integral_about(up, lo, n, 0.0)
}

/// Geometry moment about a reference height:
/// integral of ((z_up - z_ref)^n - (z_low - z_ref)^n) dt.
///
/// Moments with n >= 2 are origin dependent; series built from them converge
/// fastest when referenced to the neighbourhood the atoms actually sample.
pub fn moment_integral_about(
    up: &Trajectory,
    lo: &Trajectory,
    n: u32,
    z_ref: f64,
) -> Result<f64> {
    if !up.shares_grid_with(lo) {
        return Err(Error::GridMismatch("moment integral needs a shared grid".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let len = up.end_node() + 1;
    let mut integrand = Vec::with_capacity(len);
    for j in 0..len {
        let zu = up.z(j) - z_ref;
        let zl = lo.z(j) - z_ref;
        let d = (up.dz(j) - lo.dz(j)) + (up.z_base(j) - lo.z_base(j));
        // symmetric power sum: zu^{n-1} + zu^{n-2} zl + ... + zl^{n-1}
        let mut s = 0.0f64;
        let mut zl_pow = 1.0f64;
        for _ in 0..n {
            s = s.mul_add(zu, zl_pow);
            zl_pow *= zl;
        }
        integrand.push(d * s);
    }
    let mut acc = KahanSum::new();
    let bounds = segment_nodes(up, lo);
    for w in bounds.windows(2) {
        acc.add(integrate_uniform(&integrand[w[0]..=w[1]], up.dt()));
    }
    Ok(acc.value())
}

/// Time average of the shared base trajectory, the natural expansion point
/// for curvature series.
pub fn base_mean_height(traj: &Trajectory) -> f64 {
    let len = traj.end_node() + 1;
    let values: Vec<f64> = (0..len).map(|j| traj.z_base(j)).collect();
    integrate_uniform(&values, traj.dt()) / (traj.dt() * traj.end_node() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{recoil_quantities, AtomSpecies, LaserConfig, PhysicalConstants};
    use approx::assert_relative_eq;

    fn v_quantum() -> f64 {
        let consts = PhysicalConstants::default();
        let laser = LaserConfig::reference();
        let atom = AtomSpecies::rubidium87(&consts);
        recoil_quantities(&laser, &atom, &consts).0
    }

    fn params(n_steps: usize) -> ExperimentParams {
        ExperimentParams { z0: 5.0, v0: 6.0, t_r: 0.6, n_steps }
    }

    fn mzi_up_arm(p: &ExperimentParams) -> ArmSpec {
        ArmSpec::new(
            p.z0,
            p.v0,
            vec![
                KickEvent { time: 0.0, delta_p_quanta: 2, k_scale: 0.0 },
                KickEvent { time: p.t_r, delta_p_quanta: -2, k_scale: 0.0 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn free_rest_stays_put() {
        let model = PotentialModel::ideal(0.0, 0.0);
        let p = ExperimentParams { z0: 1.0, v0: 0.0, t_r: 0.6, n_steps: 200 };
        let arm = ArmSpec::new(1.0, 0.0, vec![]).unwrap();
        let traj = propagate_arm(&model, &arm, &p, v_quantum()).unwrap();
        for j in 0..=200 {
            assert_eq!(traj.z(j), 1.0);
            assert_eq!(traj.v_pre(j), 0.0);
        }
    }

    #[test]
    fn ideal_trajectory_closed_form_points() {
        // free fall apex: z(T) = v0^2 / 2g
        let (z, v) = ideal_trajectory(0.6, 0, 0.0, 0.0, 5.886, 9.81, 0.0);
        assert_relative_eq!(z, 1.7658, max_relative = 1e-12);
        assert!(v.abs() < 1e-12);
        // pure recoil drift
        let w = v_quantum();
        let (z, _) = ideal_trajectory(0.6, 1, w, 0.0, 0.0, 0.0, 0.0);
        assert_relative_eq!(z, 1.75194e-3, max_relative = 1e-4);
        // rest without kicks
        let (z, v) = ideal_trajectory(0.37, 0, w, 1.0, 0.0, 0.0, 0.0);
        assert_eq!((z, v), (1.0, 0.0));
    }

    #[test]
    fn propagation_matches_closed_form_uniform_gravity() {
        let model = PotentialModel::ideal(9.81, 0.0);
        let p = params(20_000);
        let w = v_quantum();
        let arm = mzi_up_arm(&p);
        let traj = propagate_arm(&model, &arm, &p, w).unwrap();
        let nh = p.n_steps / 2;
        for j in [0, 1, nh / 2, nh, nh + 1, 3 * nh / 2, 2 * nh] {
            let t = traj.time(j);
            let expect = if j <= nh {
                ideal_trajectory(t, 2, w, p.z0, p.v0, 9.81, 0.0).0
            } else {
                let (z_mid, v_mid) = ideal_trajectory(p.t_r, 2, w, p.z0, p.v0, 9.81, 0.0);
                ideal_trajectory(t - p.t_r, -2, w, z_mid, v_mid, 9.81, 0.0).0
            };
            assert!(
                (traj.z(j) - expect).abs() < 1e-12,
                "node {j}: {} vs {}",
                traj.z(j),
                expect
            );
        }
    }

    #[test]
    fn propagation_matches_first_order_form_in_weak_gradient() {
        // the closed form is first order in Gamma0; at Gamma0 = -2.7e-7 the
        // quadratic remainder sits below 1e-13 m over the full span
        let gamma0 = -2.7e-7;
        let model = PotentialModel::ideal(9.81, gamma0);
        let p = params(20_000);
        let w = v_quantum();
        let arm = ArmSpec::new(
            p.z0,
            p.v0,
            vec![KickEvent { time: 0.0, delta_p_quanta: 2, k_scale: 0.0 }],
        )
        .unwrap();
        let traj = propagate_arm(&model, &arm, &p, w).unwrap();
        for j in [0, 5_000, 10_000, 16_000, 20_000] {
            let (expect, _) = ideal_trajectory(traj.time(j), 2, w, p.z0, p.v0, 9.81, gamma0);
            assert!(
                (traj.z(j) - expect).abs() < 1e-12,
                "node {j}: {} vs {}",
                traj.z(j),
                expect
            );
        }
    }

    #[test]
    fn first_order_form_residual_scales_quadratically_in_gamma() {
        let p = params(20_000);
        let w = v_quantum();
        let mut gaps = Vec::new();
        for gamma0 in [-2.7e-6, -2.7e-7] {
            let model = PotentialModel::ideal(9.81, gamma0);
            let arm = ArmSpec::new(p.z0, p.v0, vec![]).unwrap();
            let traj = propagate_arm(&model, &arm, &p, w).unwrap();
            let j = 20_000;
            let (expect, _) = ideal_trajectory(traj.time(j), 0, w, p.z0, p.v0, 9.81, gamma0);
            gaps.push((traj.z(j) - expect).abs());
        }
        // tenfold smaller Gamma0 -> hundredfold smaller residual
        assert!(gaps[1] < gaps[0] / 50.0, "gaps {gaps:?}");
    }

    #[test]
    fn kicks_summing_to_zero_restore_velocity() {
        let model = PotentialModel::ideal(0.0, 0.0);
        let p = ExperimentParams { z0: 0.0, v0: 0.3, t_r: 0.6, n_steps: 1_000 };
        let arm = ArmSpec::new(
            0.0,
            0.3,
            vec![
                KickEvent { time: 0.0, delta_p_quanta: 3, k_scale: 0.0 },
                KickEvent { time: 0.6, delta_p_quanta: -6, k_scale: 0.0 },
                KickEvent { time: 1.2, delta_p_quanta: 3, k_scale: 0.0 },
            ],
        )
        .unwrap();
        let traj = propagate_arm(&model, &arm, &p, v_quantum()).unwrap();
        assert_relative_eq!(traj.v_post(traj.end_node()), 0.3, max_relative = 1e-13);
    }

    #[test]
    fn off_grid_kick_is_rejected() {
        let model = PotentialModel::ideal(9.81, 0.0);
        let p = params(20_000);
        let arm = ArmSpec::new(
            p.z0,
            p.v0,
            vec![KickEvent { time: 0.300001231, delta_p_quanta: 2, k_scale: 0.0 }],
        )
        .unwrap();
        assert!(matches!(
            propagate_arm(&model, &arm, &p, v_quantum()),
            Err(Error::KickOffGrid { .. })
        ));
    }

    #[test]
    fn roi_exit_reports_time_and_height() {
        // apex at 2 + 6^2/(2 g) = 3.83 m pierces a region capped at 3.5 m
        let z: Vec<f64> = (0..36).map(|i| 0.1 * i as f64).collect();
        let g: Vec<f64> = z.iter().map(|_| 9.81).collect();
        let model = PotentialModel::fit_polynomial(&z, &g, 1).unwrap();
        let p = ExperimentParams { z0: 2.0, v0: 6.0, t_r: 0.6, n_steps: 2_000 };
        let arm = ArmSpec::new(2.0, 6.0, vec![]).unwrap();
        match propagate_arm(&model, &arm, &p, v_quantum()) {
            Err(Error::RoiExit { time, z }) => {
                assert!(z > 3.5, "exit height {z}");
                assert!(time > 0.2 && time < 0.5, "exit time {time}");
            }
            other => panic!("expected RoiExit, got {other:?}"),
        }
    }

    #[test]
    fn energy_conserved_along_kick_free_segment() {
        let spec = crate::potential::ProfileSpec::tower_default();
        let model = crate::potential::synthesize_profile(&spec, 10).unwrap();
        let p = ExperimentParams { z0: 1.0, v0: 7.0, t_r: 0.6, n_steps: 20_000 };
        let arm = ArmSpec::new(1.0, 7.0, vec![]).unwrap();
        let traj = propagate_arm(&model, &arm, &p, v_quantum()).unwrap();
        let e0 = 0.5 * traj.v_pre(0).powi(2) + model.eval(traj.z(0)).unwrap().phi;
        for j in (0..=20_000).step_by(2_500) {
            let e = 0.5 * traj.v_pre(j).powi(2) + model.eval(traj.z(j)).unwrap().phi;
            assert_relative_eq!(e, e0, max_relative = 1e-10);
        }
    }

    #[test]
    fn halving_step_size_is_converged() {
        let spec = crate::potential::ProfileSpec::tower_default();
        let model = crate::potential::synthesize_profile(&spec, 10).unwrap();
        let w = v_quantum();
        let mut ends = Vec::new();
        for n_steps in [20_000, 40_000] {
            let p = ExperimentParams { z0: 1.0, v0: 6.0, t_r: 0.6, n_steps };
            let arm = ArmSpec::new(
                1.0,
                6.0,
                vec![
                    KickEvent { time: 0.0, delta_p_quanta: 2, k_scale: 0.0 },
                    KickEvent { time: 0.6, delta_p_quanta: -2, k_scale: 0.0 },
                ],
            )
            .unwrap();
            let traj = propagate_arm(&model, &arm, &p, w).unwrap();
            ends.push(traj.z(traj.end_node()));
        }
        assert!((ends[0] - ends[1]).abs() < 1e-12, "{ends:?}");
    }

    #[test]
    fn moment_a1_is_the_spacetime_area() {
        let model = PotentialModel::ideal(9.81, 0.0);
        let p = params(20_000);
        let w = v_quantum();
        let up = propagate_arm(&model, &mzi_up_arm(&p), &p, w).unwrap();
        let lo_arm = ArmSpec::new(
            p.z0,
            p.v0,
            vec![
                KickEvent { time: p.t_r, delta_p_quanta: 2, k_scale: 0.0 },
                KickEvent { time: 2.0 * p.t_r, delta_p_quanta: -2, k_scale: 0.0 },
            ],
        )
        .unwrap();
        let lo = propagate_arm(&model, &lo_arm, &p, w).unwrap();
        let a1 = moment_integral(&up, &lo, 1).unwrap();
        // 2 N hbar k T^2 / m with N = 1
        assert_relative_eq!(a1, 2.0 * w * 0.36, max_relative = 1e-12);
        assert_relative_eq!(a1, 2.1023e-3, max_relative = 1e-4);
    }

    #[test]
    fn moment_a2_zero_gravity_against_piecewise_oracle() {
        let model = PotentialModel::ideal(0.0, 0.0);
        let p = ExperimentParams { z0: 0.0, v0: 0.0, t_r: 0.6, n_steps: 20_000 };
        let w = v_quantum();
        let up = propagate_arm(&model, &mzi_up_arm(&p), &p, w).unwrap();
        let lo_arm = ArmSpec::new(
            0.0,
            0.0,
            vec![
                KickEvent { time: p.t_r, delta_p_quanta: 2, k_scale: 0.0 },
                KickEvent { time: 2.0 * p.t_r, delta_p_quanta: -2, k_scale: 0.0 },
            ],
        )
        .unwrap();
        let lo = propagate_arm(&model, &lo_arm, &p, w).unwrap();
        let a2 = moment_integral(&up, &lo, 2).unwrap();
        // piecewise quadratic integral: (2 N w)^2 T^3
        let t = p.t_r;
        assert_relative_eq!(a2, (2.0 * w) * (2.0 * w) * t * t * t, max_relative = 1e-10);
        assert_relative_eq!(a2, 7.366e-6, max_relative = 1e-3);

        // SDDI arms are mirror images: squares cancel
        let su = ArmSpec::new(
            0.0,
            0.0,
            vec![
                KickEvent { time: 0.0, delta_p_quanta: 1, k_scale: 0.0 },
                KickEvent { time: p.t_r, delta_p_quanta: -2, k_scale: 0.0 },
            ],
        )
        .unwrap();
        let sl = ArmSpec::new(
            0.0,
            0.0,
            vec![
                KickEvent { time: 0.0, delta_p_quanta: -1, k_scale: 0.0 },
                KickEvent { time: p.t_r, delta_p_quanta: 2, k_scale: 0.0 },
            ],
        )
        .unwrap();
        let sut = propagate_arm(&model, &su, &p, w).unwrap();
        let slt = propagate_arm(&model, &sl, &p, w).unwrap();
        assert!(moment_integral(&sut, &slt, 2).unwrap().abs() < 1e-18);
    }

    #[test]
    fn moment_with_gravity_matches_symbolic_piecewise_integral() {
        // A_MZI(2) = w2^2 T^3 - (7/6) w2 g T^4 with w2 = 2 N hbar k / m
        let g = 9.81;
        let model = PotentialModel::ideal(g, 0.0);
        let p = ExperimentParams { z0: 0.0, v0: 0.0, t_r: 0.6, n_steps: 20_000 };
        let w = v_quantum();
        let up = propagate_arm(&model, &mzi_up_arm(&p), &p, w).unwrap();
        let lo_arm = ArmSpec::new(
            0.0,
            0.0,
            vec![
                KickEvent { time: p.t_r, delta_p_quanta: 2, k_scale: 0.0 },
                KickEvent { time: 2.0 * p.t_r, delta_p_quanta: -2, k_scale: 0.0 },
            ],
        )
        .unwrap();
        let lo = propagate_arm(&model, &lo_arm, &p, w).unwrap();
        let a2 = moment_integral(&up, &lo, 2).unwrap();
        let w2 = 2.0 * w;
        let t = p.t_r;
        let expect = w2 * w2 * t.powi(3) - (7.0 / 6.0) * w2 * g * t.powi(4);
        assert_relative_eq!(a2, expect, max_relative = 1e-9);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let model = PotentialModel::ideal(9.81, 0.0);
        let w = v_quantum();
        let a = propagate_arm(&model, &ArmSpec::new(0.0, 0.0, vec![]).unwrap(),
            &ExperimentParams { z0: 0.0, v0: 0.0, t_r: 0.6, n_steps: 2_000 }, w).unwrap();
        let b = propagate_arm(&model, &ArmSpec::new(0.0, 0.0, vec![]).unwrap(),
            &ExperimentParams { z0: 0.0, v0: 0.0, t_r: 0.6, n_steps: 4_000 }, w).unwrap();
        assert!(matches!(moment_integral(&a, &b, 1), Err(Error::GridMismatch(_))));
    }
}
