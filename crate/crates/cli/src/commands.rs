//! Command implementations: deterministic CSV emission for every workflow.

use std::fmt::Write;

use rayon::prelude::*;

use cgi_core::analytic::table1_catalog;
use cgi_core::estimator::{feasible_eval_grid, DEFAULT_EVAL_SPACING};
use cgi_core::fsl::{optimal_detuning, FslConfig};
use cgi_core::interferometer::{build_geometry, run_cgi, run_geometry, GeometryKind};
use cgi_core::params::ExperimentParams;
use cgi_core::poly::fit_least_squares;

use crate::config::{RunConfig, SweepRange};
use crate::CliError;

/// Full round-trip float formatting: 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn rational(r: cgi_core::analytic::Prefactor) -> String {
    if *r.denom() == 1 {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn simulate(cfg: &RunConfig, geometry: GeometryKind) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let geom = build_geometry(geometry, &cfg.laser, &cfg.run).map_err(CliError::Core)?;
    let run = run_geometry(&geom, &model, &cfg.atom, &cfg.constants).map_err(CliError::Core)?;
    let b = run.breakdown;
    writeln!(&mut out,
        "geometry,propagation_rad,kick_rad,separation_rad,total_rad,output_dz_m,output_dv_mps"
    )?;
    writeln!(&mut out,
        "{},{},{},{},{},{},{}",
        geometry.label(),
        fmt(b.propagation),
        fmt(b.kick),
        fmt(b.separation),
        fmt(b.total),
        fmt(b.output_separation_dz),
        fmt(b.output_dv)
    )?;
    if b.separation_warning() {
        eprintln!(
            "warning: output port separation {:.3e} m exceeds {:.0e} m; the separation phase dominates",
            b.output_separation_dz,
            cgi_core::interferometer::SEPARATION_WARN_THRESHOLD
        );
    }
    Ok(out)
}

const CGI_HEADER: &str = "mzi_prop_rad,mzi_kick_rad,mzi_sep_rad,mzi_total_rad,\
sddi_prop_rad,sddi_kick_rad,sddi_sep_rad,sddi_total_rad,differential_rad";

fn cgi_row(r: &cgi_core::interferometer::CgiResult) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt(r.mzi.propagation),
        fmt(r.mzi.kick),
        fmt(r.mzi.separation),
        fmt(r.mzi.total),
        fmt(r.sddi.propagation),
        fmt(r.sddi.kick),
        fmt(r.sddi.separation),
        fmt(r.sddi.total),
        fmt(r.differential)
    )
}

pub fn cgi(cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let r = run_cgi(&cfg.laser, &cfg.run, &model, &cfg.atom, &cfg.constants)
        .map_err(CliError::Core)?;
    writeln!(&mut out, "{CGI_HEADER}")?;
    writeln!(&mut out, "{}", cgi_row(&r))?;
    Ok(out)
}

/// Differential phase as a function of T_R, with a quartic fit of the
/// differential reported on stderr.
pub fn sweep_tr(cfg: &RunConfig, range: &SweepRange) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let ts = range.values();
    if ts.is_empty() {
        return Err(CliError::Core(cgi_core::Error::EmptyRange));
    }
    let rows: Vec<(f64, String, f64)> = ts
        .par_iter()
        .map(|&t_r| {
            let params = ExperimentParams { t_r, ..cfg.run };
            let r = run_cgi(&cfg.laser, &params, &model, &cfg.atom, &cfg.constants)?;
            Ok((t_r, cgi_row(&r), r.differential))
        })
        .collect::<Result<_, cgi_core::Error>>()
        .map_err(CliError::Core)?;

    writeln!(&mut out, "t_r_s,{CGI_HEADER}")?;
    for (t_r, row, _) in &rows {
        writeln!(&mut out, "{},{}", fmt(*t_r), row)?;
    }

    if rows.len() > 4 {
        let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let (poly, residual) = fit_least_squares(&xs, &ys, 4).map_err(CliError::Core)?;
        let c = poly.coeffs();
        eprintln!(
            "quartic fit of differential vs T_R: c0={} c1={} c2={} c3={} c4={} residual_rms={}",
            fmt(c[0]),
            fmt(c[1]),
            fmt(c[2]),
            fmt(c[3]),
            fmt(c[4]),
            fmt(residual)
        );
    } else {
        eprintln!("quartic fit skipped: need at least 5 sweep points");
    }
    Ok(out)
}

pub fn sweep_z0(cfg: &RunConfig, range: &SweepRange) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let zs = range.values();
    if zs.is_empty() {
        return Err(CliError::Core(cgi_core::Error::EmptyRange));
    }
    let rows: Vec<(f64, String)> = zs
        .par_iter()
        .map(|&z0| {
            let params = ExperimentParams { z0, ..cfg.run };
            let r = run_cgi(&cfg.laser, &params, &model, &cfg.atom, &cfg.constants)?;
            Ok((z0, cgi_row(&r)))
        })
        .collect::<Result<_, cgi_core::Error>>()
        .map_err(CliError::Core)?;
    writeln!(&mut out, "z0_m,{CGI_HEADER}")?;
    for (z0, row) in &rows {
        writeln!(&mut out, "{},{}", fmt(*z0), row)?;
    }
    Ok(out)
}

pub fn estimate(
    cfg: &RunConfig,
    delta_h: f64,
    grid_override: Option<&SweepRange>,
) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let grid: Vec<f64> = match grid_override {
        Some(r) => r.values(),
        None => feasible_eval_grid(&model, delta_h, DEFAULT_EVAL_SPACING, 0.02)
            .map_err(CliError::Core)?,
    };
    // rows are independent; compute in parallel, emit in grid order
    let rows: Vec<cgi_core::estimator::EstimateRow> = grid
        .par_iter()
        .map(|&z| {
            cgi_core::estimator::estimate_gamma(
                &model,
                &cfg.laser,
                &cfg.atom,
                &cfg.constants,
                z,
                delta_h,
                cfg.run.n_steps,
            )
        })
        .collect::<Result<_, cgi_core::Error>>()
        .map_err(CliError::Core)?;
    let est = cgi_core::estimator::aggregate_rows(rows, delta_h);
    writeln!(&mut out, "z_eval_m,gamma_hat_si,gamma_true_si,phase_rad,z_launch_m")?;
    for r in &est.rows {
        writeln!(&mut out,
            "{},{},{},{},{}",
            fmt(r.z_eval),
            fmt(r.gamma_hat),
            fmt(r.gamma_true),
            fmt(r.phase),
            fmt(r.z_launch)
        )?;
    }
    eprintln!(
        "delta_h={} rows={} rms_error={} mean_abs_phase={}",
        fmt(est.delta_h),
        est.rows.len(),
        fmt(est.rms_error),
        fmt(est.mean_abs_phase)
    );
    Ok(out)
}

pub fn table1(cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let sample = model.eval(cfg.run.z0).map_err(CliError::Core)?;
    let rows = table1_catalog(
        &cfg.laser,
        &cfg.atom,
        &cfg.run,
        sample.g,
        sample.gamma,
        &cfg.constants,
    );
    writeln!(&mut out, "id,expr,pref_mzi,pref_sddi,pref_diff,value_rad")?;
    for row in rows {
        writeln!(&mut out,
            "{},{},{},{},{},{}",
            row.id,
            row.expression,
            rational(row.prefactor_mzi),
            rational(row.prefactor_sddi),
            rational(row.prefactor_diff),
            fmt(row.value)
        )?;
    }
    Ok(out)
}

pub fn fsl_detuning(cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let model = cfg.build_model()?;
    let g_local = model.eval(cfg.run.z0).map_err(CliError::Core)?.g;
    let fsl_cfg = FslConfig {
        z_upper: cfg.laser.z_upper,
        z_lower: cfg.laser.z_lower,
        v0: cfg.run.v0,
        t_r: cfg.run.t_r,
        n: cfg.laser.n,
        k: cfg.laser.k,
    };
    let plan =
        optimal_detuning(&fsl_cfg, g_local, &cfg.atom, &cfg.constants).map_err(CliError::Core)?;
    writeln!(&mut out, "delta_det,nu_det_hz,pole_t_r_s")?;
    writeln!(&mut out, "{},{},{}", fmt(plan.delta_det), fmt(plan.nu_det), fmt(plan.pole_t_r))?;
    Ok(out)
}

/// Emit the generating field of the synthetic profile, reusable as sampled
/// input (`z_m,g_mps2` prefix).
pub fn synth_profile(cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::new();
    let spec = cfg.profile_spec()?;
    spec.validate().map_err(CliError::Core)?;
    let n = 400usize;
    writeln!(&mut out, "z_m,g_mps2,gamma_si")?;
    for i in 0..=n {
        let z = spec.roi.z_min + spec.roi.span() * i as f64 / n as f64;
        writeln!(&mut out, "{},{},{}", fmt(z), fmt(spec.g_at(z)), fmt(spec.gamma_at(z)))?;
    }
    Ok(out)
}

