//! Parameter-isolation regression: the numerical engine against the
//! closed-form phase catalogue, term by term, in the ideal potential at
//! infinite light speed.
//!
//! Varying (g, Gamma0, z0, v0) one at a time isolates each catalogue
//! monomial; the recovered coefficient must match the catalogue prefactor to
//! 0.1% for every phase component and for the totals.

use cgi_core::analytic::{closed_form_breakdown, table1_catalog};
use cgi_core::interferometer::{build_geometry, run_geometry, GeometryKind, PhaseBreakdown};
use cgi_core::params::{AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants};
use cgi_core::potential::PotentialModel;

const G: f64 = 9.81;
const GAMMA0: f64 = -2.7e-6;
const Z0: f64 = 5.0;
const V0: f64 = 6.0;
const T_R: f64 = 0.6;

struct Phases {
    prop: f64,
    kick: f64,
    sep: f64,
    total: f64,
}

impl From<PhaseBreakdown> for Phases {
    fn from(b: PhaseBreakdown) -> Self {
        Phases { prop: b.propagation, kick: b.kick, sep: b.separation, total: b.total }
    }
}

fn numeric(kind: GeometryKind, g: f64, gamma0: f64, z0: f64, v0: f64) -> Phases {
    let consts = PhysicalConstants::with_infinite_c();
    let laser = LaserConfig::reference();
    let atom = AtomSpecies::rubidium87(&consts);
    let params = ExperimentParams { z0, v0, t_r: T_R, n_steps: 20_000 };
    let model = PotentialModel::ideal(g, gamma0);
    let geom = build_geometry(kind, &laser, &params).unwrap();
    run_geometry(&geom, &model, &atom, &consts).unwrap().breakdown.into()
}

fn closed(kind: GeometryKind, g: f64, gamma0: f64, z0: f64, v0: f64) -> Phases {
    let consts = PhysicalConstants::with_infinite_c();
    let laser = LaserConfig::reference();
    let atom = AtomSpecies::rubidium87(&consts);
    let params = ExperimentParams { z0, v0, t_r: T_R, n_steps: 20_000 };
    closed_form_breakdown(kind, &laser, &atom, &params, g, gamma0, &consts, false).into()
}

/// Coefficients of the five non-relativistic catalogue monomials, recovered
/// by isolation runs: (row1 g, row2 z0, row3 v0, row4 g*Gamma, row5 recoil).
fn isolate(runner: &dyn Fn(f64, f64, f64, f64) -> f64) -> [f64; 5] {
    let consts = PhysicalConstants::default();
    let laser = LaserConfig::reference();
    let atom = AtomSpecies::rubidium87(&consts);
    let n = laser.n as f64;
    let k = laser.k;
    let w = consts.hbar * k / atom.mass;
    let (t2, t3, t4) = (T_R * T_R, T_R.powi(3), T_R.powi(4));

    let base_g = runner(G, 0.0, 0.0, 0.0);
    let base_gamma = runner(0.0, GAMMA0, 0.0, 0.0);
    let with_z0 = runner(0.0, GAMMA0, Z0, 0.0);
    let with_v0 = runner(0.0, GAMMA0, 0.0, V0);
    let cross = runner(G, GAMMA0, 0.0, 0.0);

    [
        base_g / (n * k * G * t2),
        (with_z0 - base_gamma) / (n * k * Z0 * GAMMA0 * t2),
        (with_v0 - base_gamma) / (n * k * V0 * GAMMA0 * t3),
        (cross - base_g - base_gamma) / (n * k * G * GAMMA0 * t4),
        base_gamma / (n * n * w * k * GAMMA0 * t3),
    ]
}

fn assert_coefficients(label: &str, got: [f64; 5], expect: [f64; 5]) {
    for (i, (g, e)) in got.iter().zip(expect).enumerate() {
        if e == 0.0 {
            assert!(g.abs() < 2e-3, "{label} row {i}: expected 0, got {g}");
        } else {
            assert!(
                ((g - e) / e).abs() < 1e-3,
                "{label} row {i}: expected {e}, got {g}"
            );
        }
    }
}

#[test]
fn totals_recover_catalogue_prefactors() {
    for (kind, row5) in [(GeometryKind::Mzi, 2.0), (GeometryKind::Sddi, 0.0)] {
        let coeffs = isolate(&|g, gamma, z0, v0| numeric(kind, g, gamma, z0, v0).total);
        assert_coefficients(kind.label(), coeffs, [2.0, 2.0, 2.0, -7.0 / 6.0, row5]);
    }
}

#[test]
fn per_phase_coefficients_match_closed_forms() {
    type Extract = fn(&Phases) -> f64;
    let components: [(&str, Extract); 3] = [
        ("prop", |p| p.prop),
        ("kick", |p| p.kick),
        ("sep", |p| p.sep),
    ];
    for kind in [GeometryKind::Mzi, GeometryKind::Sddi] {
        for (name, extract) in components {
            let num = isolate(&|g, gamma, z0, v0| extract(&numeric(kind, g, gamma, z0, v0)));
            let cf = isolate(&|g, gamma, z0, v0| extract(&closed(kind, g, gamma, z0, v0)));
            for (i, (a, b)) in num.iter().zip(cf).enumerate() {
                let tol = 1e-3 * b.abs().max(2.0);
                assert!(
                    (a - b).abs() < tol,
                    "{} {name} row {i}: numeric {a}, closed form {b}",
                    kind.label()
                );
            }
        }
    }
}

#[test]
fn totals_match_closed_forms_at_reference_point() {
    for kind in [GeometryKind::Mzi, GeometryKind::Sddi] {
        let num = numeric(kind, G, GAMMA0, Z0, V0);
        let cf = closed(kind, G, GAMMA0, Z0, V0);
        // closed forms are first order in Gamma0; the engine carries all orders
        assert!((num.total - cf.total).abs() < 1e-4 * cf.total.abs());
        assert!((num.prop - cf.prop).abs() < 1e-4 * cf.prop.abs().max(1.0));
        assert!((num.kick - cf.kick).abs() < 1e-6 * cf.kick.abs());
        assert!((num.sep - cf.sep).abs() < 1e-4 * cf.sep.abs().max(1.0));
    }
}

#[test]
fn relativistic_rows_checked_catalogue_internally() {
    // rows 6-10 are not produced by the engine; the catalogue must keep the
    // differential column exact
    let consts = PhysicalConstants::default();
    let laser = LaserConfig::reference();
    let atom = AtomSpecies::rubidium87(&consts);
    let params = ExperimentParams::reference();
    let rows = table1_catalog(&laser, &atom, &params, G, GAMMA0, &consts);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        assert_eq!(row.prefactor_diff, row.prefactor_mzi - row.prefactor_sddi, "{}", row.id);
        assert!(row.value.is_finite() && row.value >= 0.0);
    }
}

#[test]
fn disputed_sddi_term_would_double_the_differential() {
    // with the disputed term the closed-form differential becomes 2 f Gamma0,
    // which the engine rules out
    let consts = PhysicalConstants::with_infinite_c();
    let laser = LaserConfig::reference();
    let atom = AtomSpecies::rubidium87(&consts);
    let params = ExperimentParams::reference();
    let mzi = closed_form_breakdown(
        GeometryKind::Mzi, &laser, &atom, &params, G, GAMMA0, &consts, false,
    );
    let sddi_disputed = closed_form_breakdown(
        GeometryKind::Sddi, &laser, &atom, &params, G, GAMMA0, &consts, true,
    );
    let diff_disputed = mzi.total - sddi_disputed.total;
    let numeric_diff = numeric(GeometryKind::Mzi, G, GAMMA0, Z0, V0).total
        - numeric(GeometryKind::Sddi, G, GAMMA0, Z0, V0).total;
    // the engine agrees with the undisputed form and rejects the disputed one
    assert!((numeric_diff - diff_disputed / 2.0).abs() < 1e-4 * numeric_diff.abs());
    assert!((numeric_diff - diff_disputed).abs() > 0.4 * numeric_diff.abs());
}
