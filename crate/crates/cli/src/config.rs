//! INI-style configuration with command-line overrides.
//!
//! Sections: `constants`, `atom`, `laser`, `run`, `potential`. Unknown sections or
//! keys are hard errors with line numbers. Every parameter has a default
//! except the potential selection.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cgi_core::params::{AtomSpecies, ExperimentParams, LaserConfig, PhysicalConstants};
use cgi_core::potential::{
    synthesize_profile, Bump, PotentialModel, ProfileSpec, Roi, DEFAULT_FIT_DEGREE,
    DEFAULT_SYNTH_DEGREE,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Ideal,
    Poly,
    Csv,
    Synth,
}

impl PotentialKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "ideal" => Ok(Self::Ideal),
            "poly" => Ok(Self::Poly),
            "csv" => Ok(Self::Csv),
            "synth" => Ok(Self::Synth),
            other => Err(CliError::config(format!(
                "unknown potential kind `{other}` (expected ideal|poly|csv|synth)"
            ))),
        }
    }
}

/// Raw potential section before it is turned into a model.
#[derive(Debug, Clone, Default)]
pub struct PotentialSelection {
    pub kind: Option<PotentialKind>,
    pub g: Option<f64>,
    pub gamma0: Option<f64>,
    pub coeffs: Option<Vec<f64>>,
    pub roi: Option<(f64, f64)>,
    pub csv: Option<PathBuf>,
    pub degree: Option<usize>,
    pub g_ref: Option<f64>,
    pub gamma_base: Option<f64>,
    pub bumps: Option<Vec<Bump>>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub atom: AtomSpecies,
    pub laser: LaserConfig,
    pub run: ExperimentParams,
    pub potential: PotentialSelection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let constants = PhysicalConstants::default();
        Self {
            constants,
            atom: AtomSpecies::rubidium87(&constants),
            laser: LaserConfig::reference(),
            run: ExperimentParams::reference(),
            potential: PotentialSelection::default(),
        }
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64, CliError> {
    if value.eq_ignore_ascii_case("inf") || value.eq_ignore_ascii_case("infinite") {
        return Ok(f64::INFINITY);
    }
    value
        .parse()
        .map_err(|e| CliError::config(format!("line {line}: bad number `{value}`: {e}")))
}

fn parse_usize(value: &str, line: usize) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|e| CliError::config(format!("line {line}: bad integer `{value}`: {e}")))
}

fn parse_pair(value: &str, line: usize) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 2 {
        return Err(CliError::config(format!("line {line}: expected MIN:MAX, got `{value}`")));
    }
    Ok((parse_f64(parts[0], line)?, parse_f64(parts[1], line)?))
}

fn parse_bumps(value: &str, line: usize) -> Result<Vec<Bump>, CliError> {
    value
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::config(format!(
                    "line {line}: bump must be CENTER:WIDTH:AMPLITUDE, got `{item}`"
                )));
            }
            Ok(Bump {
                center: parse_f64(parts[0], line)?,
                width: parse_f64(parts[1], line)?,
                amplitude: parse_f64(parts[2], line)?,
            })
        })
        .collect()
}

impl RunConfig {
    /// Parse an INI file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_ini(&text)?;
        Ok(cfg)
    }

    pub fn apply_ini(&mut self, text: &str) -> Result<(), CliError> {
        let mut section = String::new();
        let mut mass_amu: Option<f64> = None;
        let mut mass_kg: Option<f64> = None;
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    CliError::config(format!("line {line_no}: unterminated section `{raw}`"))
                })?;
                section = name.trim().to_string();
                if !matches!(section.as_str(), "constants" | "atom" | "laser" | "run" | "potential")
                {
                    return Err(CliError::config(format!(
                        "line {line_no}: unknown section [{section}]"
                    )));
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {line_no}: expected key = value, got `{raw}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(CliError::config(format!(
                    "line {line_no}: key `{key}` outside any section"
                )));
            }
            let qualified = format!("{section}.{key}");
            if let Some(first) = seen.insert(qualified.clone(), line_no) {
                return Err(CliError::config(format!(
                    "line {line_no}: `{qualified}` already set on line {first}"
                )));
            }

            match (section.as_str(), key) {
                ("constants", "hbar") => self.constants.hbar = parse_f64(value, line_no)?,
                ("constants", "c") => self.constants.c = parse_f64(value, line_no)?,
                ("constants", "amu") => self.constants.amu = parse_f64(value, line_no)?,
                ("atom", "mass_amu") => mass_amu = Some(parse_f64(value, line_no)?),
                ("atom", "mass_kg") => mass_kg = Some(parse_f64(value, line_no)?),
                ("laser", "k") => self.laser.k = parse_f64(value, line_no)?,
                ("laser", "n") => self.laser.n = parse_usize(value, line_no)? as u32,
                ("laser", "omega_r") => self.laser.omega_r = parse_f64(value, line_no)?,
                ("laser", "z_upper") => self.laser.z_upper = parse_f64(value, line_no)?,
                ("laser", "z_lower") => self.laser.z_lower = parse_f64(value, line_no)?,
                ("laser", "mirror_detuning") => {
                    self.laser.mirror_detuning = parse_f64(value, line_no)?
                }
                ("laser", "final_detuning") => {
                    self.laser.final_detuning = parse_f64(value, line_no)?
                }
                ("run", "z0") => self.run.z0 = parse_f64(value, line_no)?,
                ("run", "v0") => self.run.v0 = parse_f64(value, line_no)?,
                ("run", "t_r") => self.run.t_r = parse_f64(value, line_no)?,
                ("run", "n_steps") => self.run.n_steps = parse_usize(value, line_no)?,
                ("potential", "kind") => self.potential.kind = Some(PotentialKind::parse(value)?),
                ("potential", "g") => self.potential.g = Some(parse_f64(value, line_no)?),
                ("potential", "gamma0") => self.potential.gamma0 = Some(parse_f64(value, line_no)?),
                ("potential", "coeffs") => {
                    let coeffs: Result<Vec<f64>, CliError> =
                        value.split(',').map(|s| parse_f64(s.trim(), line_no)).collect();
                    self.potential.coeffs = Some(coeffs?);
                }
                ("potential", "roi") => self.potential.roi = Some(parse_pair(value, line_no)?),
                ("potential", "csv") => self.potential.csv = Some(PathBuf::from(value)),
                ("potential", "degree") => {
                    self.potential.degree = Some(parse_usize(value, line_no)?)
                }
                ("potential", "g_ref") => self.potential.g_ref = Some(parse_f64(value, line_no)?),
                ("potential", "gamma_base") => {
                    self.potential.gamma_base = Some(parse_f64(value, line_no)?)
                }
                ("potential", "bumps") => self.potential.bumps = Some(parse_bumps(value, line_no)?),
                (s, k) => {
                    return Err(CliError::config(format!("line {line_no}: unknown key `{k}` in [{s}]")))
                }
            }
        }

        match (mass_amu, mass_kg) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("both mass_amu and mass_kg given".into()))
            }
            (Some(amu), None) => self.atom.mass = amu * self.constants.amu,
            (None, Some(kg)) => self.atom.mass = kg,
            (None, None) => {}
        }
        Ok(())
    }

    /// Resolve the potential section into a model.
    pub fn build_model(&self) -> Result<PotentialModel, CliError> {
        let p = &self.potential;
        let inferred = self.infer_kind()?;
        let kind = match (p.kind, inferred) {
            (Some(k), Some(i)) if k != i => {
                return Err(CliError::config(
                    "conflicting potential selections: kind does not match the keys given".into(),
                ))
            }
            (Some(k), _) => k,
            (None, Some(i)) => i,
            (None, None) => return Err(CliError::config("no potential selected".into())),
        };
        match kind {
            PotentialKind::Ideal => Ok(PotentialModel::ideal(
                p.g.unwrap_or(9.81),
                p.gamma0.unwrap_or(-2.7e-6),
            )),
            PotentialKind::Poly => {
                let coeffs = p
                    .coeffs
                    .clone()
                    .ok_or_else(|| CliError::config("poly potential needs coeffs".into()))?;
                let roi = match p.roi {
                    Some((a, b)) => Some(Roi::new(a, b).map_err(CliError::Core)?),
                    None => None,
                };
                Ok(PotentialModel::from_phi_coeffs(coeffs, roi))
            }
            PotentialKind::Csv => {
                let path = p
                    .csv
                    .as_ref()
                    .ok_or_else(|| CliError::config("csv potential needs a file path".into()))?;
                PotentialModel::from_csv(path, p.degree.unwrap_or(DEFAULT_FIT_DEGREE))
                    .map_err(CliError::Core)
            }
            PotentialKind::Synth => {
                let spec = self.profile_spec()?;
                synthesize_profile(&spec, p.degree.unwrap_or(DEFAULT_SYNTH_DEGREE))
                    .map_err(CliError::Core)
            }
        }
    }

    pub fn profile_spec(&self) -> Result<ProfileSpec, CliError> {
        let p = &self.potential;
        let mut spec = ProfileSpec::tower_default();
        if let Some(g_ref) = p.g_ref {
            spec.g_ref = g_ref;
        }
        if let Some(base) = p.gamma_base {
            spec.gamma_base = base;
        }
        if let Some(bumps) = &p.bumps {
            spec.bumps = bumps.clone();
        }
        if let Some((a, b)) = p.roi {
            spec.roi = Roi::new(a, b).map_err(CliError::Core)?;
        }
        Ok(spec)
    }

    fn infer_kind(&self) -> Result<Option<PotentialKind>, CliError> {
        let p = &self.potential;
        let groups = [
            (p.g.is_some() || p.gamma0.is_some(), PotentialKind::Ideal),
            (p.coeffs.is_some(), PotentialKind::Poly),
            (p.csv.is_some(), PotentialKind::Csv),
            (
                p.g_ref.is_some() || p.gamma_base.is_some() || p.bumps.is_some(),
                PotentialKind::Synth,
            ),
        ];
        let hit: Vec<PotentialKind> =
            groups.iter().filter(|(on, _)| *on).map(|(_, k)| *k).collect();
        match hit.len() {
            0 => Ok(None),
            1 => Ok(Some(hit[0])),
            _ => Err(CliError::config(
                "conflicting potential selections: keys from more than one kind".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.constants.validate().map_err(CliError::Core)?;
        self.laser.validate().map_err(CliError::Core)?;
        self.run.validate().map_err(CliError::Core)?;
        if !(self.atom.mass > 0.0) {
            return Err(CliError::config("atom mass must be positive".into()));
        }
        Ok(())
    }
}

/// START:STOP:STEP inclusive range for sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::config(format!(
                "expected START:STOP:STEP, got `{s}`"
            )));
        }
        let mut nums = [0.0; 3];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|e| CliError::config(format!("bad range number `{part}`: {e}")))?;
        }
        let range = Self { start: nums[0], stop: nums[1], step: nums[2] };
        if !(range.step > 0.0) || range.stop < range.start {
            return Err(CliError::config(format!("degenerate range `{s}`")));
        }
        Ok(range)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|i| self.start + self.step * i as f64).collect()
    }
}
