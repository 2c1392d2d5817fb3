//! Scenario configuration files: schema, loading, validation, and execution.
//!
//! The format is TOML with a fixed schema; unknown keys are rejected so a
//! typo fails loudly instead of silently running defaults.

use std::path::{Path, PathBuf};

use bellmeas::inequalities::{bounds, presets, ExpressionName, HierarchyRegime};
use bellmeas::pauli::Direction;
use serde::Deserialize;

use crate::parse::{parse_direction, parse_preset, parse_state, DirectionPreset};
use crate::report::{Format, ReportRow};
use crate::scenarios::{self, RunOptions};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Expression name: chsh, mermin, gisin3, gisin4, mermin_joint,
    /// gisin3_joint, gisin_xyz_joint, or ghz_hierarchy.
    pub scenario: String,
    /// singlet, ghz, or random:SEED; defaults to the scenario's canonical state.
    pub state: Option<String>,
    /// Accepted for explicitness; each scenario fixes its own regime.
    pub regime: Option<String>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    /// table or csv.
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub directions: Option<DirectionsSection>,
    pub sharpness: Option<SharpnessSection>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionsSection {
    /// xy, ghz-xy, gisin-coplanar, or xyz-octahedral.
    pub preset: Option<String>,
    /// Explicit per-party setting lists; entries are axis names or triples.
    pub party1: Option<Vec<String>>,
    pub party2: Option<Vec<String>>,
    pub party3: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha: Option<SweepGrid>,
}

/// Either an inclusive arithmetic range (start/stop/step) or an explicit
/// value list.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub values: Option<Vec<f64>>,
}

impl SweepGrid {
    pub fn grid(&self) -> Result<Vec<f64>, String> {
        match (self.start, self.stop, self.step, &self.values) {
            (None, None, None, Some(vs)) => {
                if vs.is_empty() {
                    return Err("sweep.alpha.values is empty".into());
                }
                Ok(vs.clone())
            }
            (Some(start), Some(stop), Some(step), None) => {
                if step <= 0.0 {
                    return Err("sweep.alpha.step must be positive".into());
                }
                if stop < start {
                    return Err("sweep.alpha.stop is below start".into());
                }
                let n = ((stop - start) / step).round() as usize;
                let mut vs = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let v = start + step * k as f64;
                    if v <= stop + step * 1e-9 {
                        vs.push(v);
                    }
                }
                Ok(vs)
            }
            _ => Err("sweep.alpha needs either start/stop/step or values".into()),
        }
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Output format requested by the config, if any.
pub fn config_format(cfg: &ScenarioConfig) -> Result<Option<Format>, String> {
    cfg.format.as_deref().map(str::parse).transpose()
}

/// Runs the configured scenario (or sweep) and returns its rows. Command
/// line values fill whatever the file leaves unset.
pub fn run_config(cfg: &ScenarioConfig, cli_opts: &RunOptions) -> Result<Vec<ReportRow>, String> {
    let opts = RunOptions {
        seed: cfg.seed.unwrap_or(cli_opts.seed),
        budget: cfg.budget.unwrap_or(cli_opts.budget),
        tolerance: cli_opts.tolerance,
    };
    config_format(cfg)?;
    let scenario: ExpressionName = cfg.scenario.parse()?;
    match scenario {
        ExpressionName::Chsh => {
            expect_regime(cfg, "sharp")?;
            no_sharpness(cfg)?;
            no_sweep(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("singlet");
            let rho = parse_state(state_spec, 2)?;
            let (dirs, preset_used) = chsh_directions(cfg)?;
            let canonical = preset_used && state_spec == "singlet";
            Ok(vec![scenarios::chsh_row(
                &rho, dirs, canonical, false, &opts,
            )?])
        }
        ExpressionName::Mermin => {
            expect_regime(cfg, "sharp")?;
            no_sharpness(cfg)?;
            no_sweep(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("ghz");
            let rho = parse_state(state_spec, 3)?;
            let (xs, ys, preset_used) = mermin_directions(cfg)?;
            let canonical = preset_used && state_spec == "ghz";
            Ok(vec![scenarios::mermin_row(
                &rho, xs, ys, canonical, false, &opts,
            )?])
        }
        ExpressionName::Gisin3 => {
            expect_regime(cfg, "sharp")?;
            no_sharpness(cfg)?;
            no_sweep(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("singlet");
            let rho = parse_state(state_spec, 2)?;
            let (ones, twos, preset_used) = gisin3_directions(cfg)?;
            let canonical = preset_used && state_spec == "singlet";
            Ok(vec![scenarios::gisin3_row(&rho, ones, twos, canonical)?])
        }
        ExpressionName::Gisin4 => {
            expect_regime(cfg, "sharp")?;
            no_sharpness(cfg)?;
            no_sweep(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("singlet");
            let rho = parse_state(state_spec, 2)?;
            let (ones, twos, preset_used) = gisin4_directions(cfg)?;
            let canonical = preset_used && state_spec == "singlet";
            Ok(vec![scenarios::gisin4_row(&rho, ones, twos, canonical)?])
        }
        ExpressionName::MerminJoint => {
            expect_regime(cfg, "joint-on-two")?;
            no_directions(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("ghz");
            if state_spec != "ghz" {
                return Err("scenario mermin_joint is defined on the ghz state".into());
            }
            if let Some(grid) = sweep_grid(cfg)? {
                if cfg.sharpness.is_some() {
                    return Err("sweep.alpha and [sharpness] are mutually exclusive".into());
                }
                return grid
                    .iter()
                    .map(|&v| scenarios::mermin_joint_row([v, v, v, v]))
                    .collect();
            }
            let sh = cfg.sharpness.as_ref();
            let alpha = sh
                .and_then(|s| s.alpha)
                .unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
            let beta = sh.and_then(|s| s.beta).unwrap_or(alpha);
            let alpha2 = sh.and_then(|s| s.alpha2).unwrap_or(alpha);
            let beta2 = sh.and_then(|s| s.beta2).unwrap_or(beta);
            Ok(vec![scenarios::mermin_joint_row([
                alpha, beta, alpha2, beta2,
            ])?])
        }
        ExpressionName::Gisin3Joint => {
            expect_regime(cfg, "joint-on-one")?;
            no_directions(cfg)?;
            single_sharpness(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("singlet");
            let rho = parse_state(state_spec, 2)?;
            let canonical = state_spec == "singlet";
            if let Some(grid) = sweep_grid(cfg)? {
                if cfg.sharpness.is_some() {
                    return Err("sweep.alpha and [sharpness] are mutually exclusive".into());
                }
                return grid
                    .iter()
                    .map(|&v| scenarios::gisin3_joint_row(&rho, v, canonical))
                    .collect();
            }
            let alpha = cfg
                .sharpness
                .as_ref()
                .and_then(|s| s.alpha)
                .unwrap_or_else(bounds::coplanar_max_sharpness);
            Ok(vec![scenarios::gisin3_joint_row(&rho, alpha, canonical)?])
        }
        ExpressionName::GisinXyzJoint => {
            expect_regime(cfg, "joint-on-one")?;
            no_directions(cfg)?;
            single_sharpness(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("singlet");
            if state_spec != "singlet" {
                return Err("scenario gisin_xyz_joint is defined on the singlet".into());
            }
            if let Some(grid) = sweep_grid(cfg)? {
                if cfg.sharpness.is_some() {
                    return Err("sweep.alpha and [sharpness] are mutually exclusive".into());
                }
                return grid
                    .iter()
                    .map(|&v| scenarios::gisin_xyz_joint_row(v))
                    .collect();
            }
            let alpha = cfg
                .sharpness
                .as_ref()
                .and_then(|s| s.alpha)
                .unwrap_or_else(|| 1.0 / 3f64.sqrt());
            Ok(vec![scenarios::gisin_xyz_joint_row(alpha)?])
        }
        ExpressionName::GhzHierarchy => {
            no_directions(cfg)?;
            no_sharpness(cfg)?;
            no_sweep(cfg)?;
            let state_spec = cfg.state.as_deref().unwrap_or("ghz");
            if state_spec != "ghz" {
                return Err("scenario ghz_hierarchy is defined on the ghz state".into());
            }
            let regimes = match &cfg.regime {
                Some(r) => vec![r.parse::<HierarchyRegime>()?],
                None => vec![
                    HierarchyRegime::Sharp,
                    HierarchyRegime::JointOnOne,
                    HierarchyRegime::JointOnTwo,
                ],
            };
            scenarios::hierarchy_rows(&regimes, &opts)
        }
    }
}

fn expect_regime(cfg: &ScenarioConfig, allowed: &str) -> Result<(), String> {
    match &cfg.regime {
        None => Ok(()),
        Some(r) if r == allowed => Ok(()),
        Some(r) => Err(format!(
            "scenario {} runs in the {allowed} regime, not '{r}'",
            cfg.scenario
        )),
    }
}

fn no_sweep(cfg: &ScenarioConfig) -> Result<(), String> {
    if cfg.sweep.is_some() {
        return Err(format!(
            "scenario {} has no sweepable parameter",
            cfg.scenario
        ));
    }
    Ok(())
}

fn no_sharpness(cfg: &ScenarioConfig) -> Result<(), String> {
    if cfg.sharpness.is_some() {
        return Err(format!(
            "scenario {} takes no sharpness parameters",
            cfg.scenario
        ));
    }
    Ok(())
}

fn no_directions(cfg: &ScenarioConfig) -> Result<(), String> {
    if cfg.directions.is_some() {
        return Err(format!(
            "scenario {} uses its built-in geometry",
            cfg.scenario
        ));
    }
    Ok(())
}

fn single_sharpness(cfg: &ScenarioConfig) -> Result<(), String> {
    if let Some(s) = &cfg.sharpness {
        if s.beta.is_some() || s.alpha2.is_some() || s.beta2.is_some() {
            return Err(format!(
                "scenario {} takes a single sharpness.alpha",
                cfg.scenario
            ));
        }
    }
    Ok(())
}

fn sweep_grid(cfg: &ScenarioConfig) -> Result<Option<Vec<f64>>, String> {
    let Some(sweep) = &cfg.sweep else {
        return Ok(None);
    };
    let Some(grid) = &sweep.alpha else {
        return Err("sweep section present but sweep.alpha missing".into());
    };
    Ok(Some(grid.grid()?))
}

fn parse_party(list: &[String], field: &str, want: usize) -> Result<Vec<Direction>, String> {
    if list.len() != want {
        return Err(format!(
            "directions.{field} needs {want} entries, got {}",
            list.len()
        ));
    }
    list.iter()
        .enumerate()
        .map(|(i, s)| parse_direction(s).map_err(|e| format!("directions.{field}[{i}]: {e}")))
        .collect()
}

fn require_party<'a>(
    list: &'a Option<Vec<String>>,
    field: &str,
) -> Result<&'a [String], String> {
    list.as_deref()
        .ok_or_else(|| format!("directions.{field} is required without a preset"))
}

fn section_preset(
    section: &DirectionsSection,
    scenario: &str,
) -> Result<Option<DirectionPreset>, String> {
    let Some(name) = &section.preset else {
        return Ok(None);
    };
    if section.party1.is_some() || section.party2.is_some() || section.party3.is_some() {
        return Err("directions: give either a preset or explicit party lists".into());
    }
    let preset = parse_preset(name)?;
    let fits = matches!(
        (scenario, preset),
        ("chsh", DirectionPreset::Xy)
            | ("mermin", DirectionPreset::GhzXy)
            | ("gisin3", DirectionPreset::GisinCoplanar)
            | ("gisin4", DirectionPreset::XyzOctahedral)
    );
    if !fits {
        return Err(format!("preset '{name}' does not fit scenario {scenario}"));
    }
    Ok(Some(preset))
}

fn chsh_directions(cfg: &ScenarioConfig) -> Result<([Direction; 4], bool), String> {
    let default = || {
        let (ones, twos) = presets::chsh_optimal();
        ([ones[0], ones[1], twos[0], twos[1]], true)
    };
    let Some(section) = &cfg.directions else {
        return Ok(default());
    };
    if section_preset(section, "chsh")?.is_some() {
        return Ok(default());
    }
    if section.party3.is_some() {
        return Err("scenario chsh has two parties".into());
    }
    let p1 = parse_party(require_party(&section.party1, "party1")?, "party1", 2)?;
    let p2 = parse_party(require_party(&section.party2, "party2")?, "party2", 2)?;
    Ok(([p1[0], p1[1], p2[0], p2[1]], false))
}

fn mermin_directions(
    cfg: &ScenarioConfig,
) -> Result<([Direction; 3], [Direction; 3], bool), String> {
    let default = || {
        let (xs, ys) = presets::ghz_xy();
        (xs, ys, true)
    };
    let Some(section) = &cfg.directions else {
        return Ok(default());
    };
    if section_preset(section, "mermin")?.is_some() {
        return Ok(default());
    }
    let p1 = parse_party(require_party(&section.party1, "party1")?, "party1", 2)?;
    let p2 = parse_party(require_party(&section.party2, "party2")?, "party2", 2)?;
    let p3 = parse_party(require_party(&section.party3, "party3")?, "party3", 2)?;
    Ok((
        [p1[0], p2[0], p3[0]],
        [p1[1], p2[1], p3[1]],
        false,
    ))
}

fn gisin3_directions(
    cfg: &ScenarioConfig,
) -> Result<([Direction; 3], [Direction; 3], bool), String> {
    let default = || {
        let (ones, twos) = presets::gisin_coplanar();
        (ones, twos, true)
    };
    let Some(section) = &cfg.directions else {
        return Ok(default());
    };
    if section_preset(section, "gisin3")?.is_some() {
        return Ok(default());
    }
    if section.party3.is_some() {
        return Err("scenario gisin3 has two parties".into());
    }
    let p1 = parse_party(require_party(&section.party1, "party1")?, "party1", 3)?;
    let p2 = parse_party(require_party(&section.party2, "party2")?, "party2", 3)?;
    Ok(([p1[0], p1[1], p1[2]], [p2[0], p2[1], p2[2]], false))
}

fn gisin4_directions(
    cfg: &ScenarioConfig,
) -> Result<([Direction; 4], [Direction; 3], bool), String> {
    let default = || {
        let (ones, twos) = presets::gisin_xyz();
        (ones, twos, true)
    };
    let Some(section) = &cfg.directions else {
        return Ok(default());
    };
    if section_preset(section, "gisin4")?.is_some() {
        return Ok(default());
    }
    if section.party3.is_some() {
        return Err("scenario gisin4 has two parties".into());
    }
    let p1 = parse_party(require_party(&section.party1, "party1")?, "party1", 4)?;
    let p2 = parse_party(require_party(&section.party2, "party2")?, "party2", 3)?;
    Ok((
        [p1[0], p1[1], p1[2], p1[3]],
        [p2[0], p2[1], p2[2]],
        false,
    ))
}
