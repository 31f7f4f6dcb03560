//! Flat key–value run configuration.
//!
//! A config file is a flat TOML document; every key is optional and defaults
//! to the working-point values. Unknown keys are rejected. `--set KEY=VAL`
//! overrides individual keys after the file is read.
//!
//! Grid-valued keys take either an inclusive linspace `"start:stop:count"`
//! or an explicit comma list `"0.5,1.0,2.0"`. `e_max` is an integer where a
//! negative value lifts the total-excitation cutoff.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorOpts;
use crate::error::{Error, Result};
use crate::experiments::SpaceSpec;
use crate::model::{LaserFrequencies, SystemParams};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "d_w1")]
    pub w1: f64,
    #[serde(default = "d_w2")]
    pub w2: f64,
    #[serde(rename = "J", default = "d_j")]
    pub j: f64,
    #[serde(default = "d_kappa")]
    pub kappa: f64,
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "d_omega")]
    pub omega1: f64,
    #[serde(default = "d_omega")]
    pub omega2: f64,
    #[serde(default = "d_omega")]
    pub omega3: f64,
    /// Photon cutoff per cavity.
    #[serde(default = "d_n_max")]
    pub n_max: u32,
    /// Total-excitation cutoff; negative lifts the truncation.
    #[serde(default = "d_e_max")]
    pub e_max: i64,
    #[serde(rename = "wL1", default, skip_serializing_if = "Option::is_none")]
    pub wl1: Option<f64>,
    #[serde(rename = "wL2", default, skip_serializing_if = "Option::is_none")]
    pub wl2: Option<f64>,
    #[serde(rename = "wL3", default, skip_serializing_if = "Option::is_none")]
    pub wl3: Option<f64>,
    #[serde(default = "d_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "d_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "d_max_step")]
    pub max_step: f64,
    #[serde(default = "d_gt_final")]
    pub gt_final: f64,
    #[serde(default = "d_sample_step")]
    pub sample_step: f64,
    /// Initial state for `evolve`: "vacuum", "target" or "random".
    #[serde(default = "d_initial")]
    pub initial: String,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default = "d_cooperativity")]
    pub cooperativity: f64,
    #[serde(default = "d_fig3_grid")]
    pub fig3_j_grid: String,
    #[serde(default = "d_fig4a_j_grid")]
    pub fig4a_j_grid: String,
    #[serde(default = "d_fig4a_omega_grid")]
    pub fig4a_omega_grid: String,
    #[serde(default = "d_fig4b_ratio_grid")]
    pub fig4b_ratio_grid: String,
    /// Robustness target: "J" or "Omega".
    #[serde(default = "d_robust_target")]
    pub robust_target: String,
    #[serde(default = "d_robust_size")]
    pub robust_size: f64,
}

fn d_w1() -> f64 { 8.0 }
fn d_w2() -> f64 { 18.0 }
fn d_j() -> f64 { 1.1 }
fn d_kappa() -> f64 { 0.1 }
fn d_gamma() -> f64 { 0.2 }
fn d_omega() -> f64 { 0.03 }
fn d_n_max() -> u32 { 2 }
fn d_e_max() -> i64 { 2 }
fn d_rel_tol() -> f64 { 1e-8 }
fn d_abs_tol() -> f64 { 1e-10 }
fn d_max_step() -> f64 { 1.0 }
fn d_gt_final() -> f64 { 1500.0 }
fn d_sample_step() -> f64 { 5.0 }
fn d_initial() -> String { "vacuum".into() }
fn d_seed() -> u64 { 20120720 }
fn d_cooperativity() -> f64 { 50.0 }
fn d_fig3_grid() -> String { "0.1:3.0:30".into() }
fn d_fig4a_j_grid() -> String { "0.0:2.0:9".into() }
fn d_fig4a_omega_grid() -> String { "0.0:0.06:7".into() }
fn d_fig4b_ratio_grid() -> String { "0.5:3.0:11".into() }
fn d_robust_target() -> String { "J".into() }
fn d_robust_size() -> f64 { 0.1 }

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config populates all defaults")
    }
}

impl RunConfig {
    /// Read a config file; a missing path is a configuration error naming it.
    pub fn load(path: &Path) -> Result<toml::Table> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        text.parse::<toml::Table>()
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    /// Assemble from an optional file plus `KEY=VAL` override strings.
    pub fn from_sources(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut table = match path {
            Some(p) => Self::load(p)?,
            None => toml::Table::new(),
        };
        for pair in overrides {
            let (key, val) = pair.split_once('=').ok_or_else(|| {
                Error::config(format!("override `{pair}` is not KEY=VAL"))
            })?;
            let key = key.trim();
            let val = val.trim();
            // parse the value as TOML; fall back to a bare string
            let parsed: toml::Value = match format!("v = {val}").parse::<toml::Table>() {
                Ok(mut t) => t.remove("v").unwrap(),
                Err(_) => toml::Value::String(val.to_string()),
            };
            table.insert(key.to_string(), parsed);
        }
        table
            .try_into()
            .map_err(|e| Error::config(format!("invalid configuration: {e}")))
    }

    pub fn params(&self) -> Result<SystemParams> {
        let mut params = SystemParams::new(
            self.w1,
            self.w2,
            self.j,
            self.kappa,
            self.gamma,
            [self.omega1, self.omega2, self.omega3],
        )?;
        match (self.wl1, self.wl2, self.wl3) {
            (None, None, None) => {}
            (Some(wl1), Some(wl2), Some(wl3)) => {
                params = params.with_laser_freqs(LaserFrequencies { wl1, wl2, wl3 });
                params.validate()?;
            }
            _ => {
                return Err(Error::config(
                    "laser frequencies must be given as all of wL1, wL2, wL3 or none",
                ))
            }
        }
        Ok(params)
    }

    pub fn space(&self) -> SpaceSpec {
        SpaceSpec {
            n_max: self.n_max,
            e_max: if self.e_max < 0 { None } else { Some(self.e_max as u32) },
        }
    }

    pub fn integrator(&self) -> Result<IntegratorOpts> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::config("integrator tolerances must be positive"));
        }
        Ok(IntegratorOpts {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
        })
    }

    /// Validated (gt_final, sample_step).
    pub fn times(&self) -> Result<(f64, f64)> {
        if !(self.gt_final > 0.0 && self.sample_step > 0.0) {
            return Err(Error::config(
                "gt_final and sample_step must be positive",
            ));
        }
        Ok((self.gt_final, self.sample_step))
    }
}

/// Parse `"start:stop:count"` (inclusive linspace) or a comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::config(format!(
                "grid `{spec}` must be start:stop:count"
            )));
        }
        let start: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad grid start in `{spec}`")))?;
        let stop: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad grid stop in `{spec}`")))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("bad grid count in `{spec}`")))?;
        if count == 0 {
            return Err(Error::config(format!("grid `{spec}` is empty")));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = (stop - start) / (count - 1) as f64;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad grid value `{s}`")))
            })
            .collect()
    }
}
