use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use fracmin::interaction::ModelOptions;
use fracmin::mincut::MinimizeOptions;
use fracmin::verify::DEFAULT_SEED;
use fracmin::{Error, Exec, Result};

/// Every parameter of a run. Commands read the fields they need.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub name: String,
    pub s: f64,
    pub s_list: Option<Vec<f64>>,
    pub shape: String,
    pub input: Option<PathBuf>,
    pub point: Option<[f64; 2]>,
    pub delta: Option<f64>,
    pub m: Vec<f64>,
    pub radius: Vec<f64>,
    pub eps: Vec<f64>,
    pub grid: Option<usize>,
    pub h: Option<f64>,
    pub omega_radius: f64,
    pub origin: [f64; 2],
    pub r_ext: Option<f64>,
    pub r_cut: Option<f64>,
    pub small_s_radius: Option<f64>,
    pub tol: f64,
    pub tol_near: f64,
    pub tol_far: f64,
    pub tol_tail: f64,
    pub quantum_bits: u32,
    pub t_step: f64,
    pub epsilon: f64,
    pub xbar: f64,
    pub suite: String,
    pub criterion: Option<u32>,
    pub exec: Exec,
    pub threads: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let model = ModelOptions::default();
        RunConfig {
            command: String::new(),
            name: String::new(),
            s: 0.25,
            s_list: None,
            shape: "square".into(),
            input: None,
            point: None,
            delta: None,
            m: vec![8.0, 16.0, 32.0],
            radius: vec![4.0, 8.0, 16.0],
            eps: vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
            grid: None,
            h: None,
            omega_radius: 2.0,
            origin: [0.0, 0.0],
            r_ext: None,
            r_cut: None,
            small_s_radius: None,
            tol: 1e-9,
            tol_near: model.tol_near,
            tol_far: model.tol_far,
            tol_tail: model.tol_tail,
            quantum_bits: MinimizeOptions::default().quantum_bits,
            t_step: 0.02,
            epsilon: 1e-3,
            xbar: 0.0,
            suite: "core".into(),
            criterion: None,
            exec: Exec::default(),
            threads: None,
            seed: DEFAULT_SEED,
            out: None,
        }
    }
}

/// Flags shared by every command; each overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    /// JSON file with any subset of the run parameters.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Fractional order s in (0, 1/2).
    #[arg(long)]
    pub s: Option<f64>,
    /// Comma-separated list of s values for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub s_list: Option<Vec<f64>>,
    /// square, disk, rotated_square, two_squares, polygon, graph or mask.
    #[arg(long)]
    pub shape: Option<String>,
    /// Input file: polygon or graph CSV, mask PGM, or problem JSON.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Boundary point.
    #[arg(long, value_delimiter = ',', value_name = "X,Y")]
    pub point: Option<Vec<f64>>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Oscillation heights.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<f64>>,
    /// Ball radii for the flatness and growth experiments.
    #[arg(long, value_delimiter = ',')]
    pub radius: Option<Vec<f64>>,
    /// Cell sides for the digitization experiment.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Cells across the free region.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Cell side for grid evaluations and mask input.
    #[arg(long)]
    pub h: Option<f64>,
    /// Radius of the ball Ω for the s -> 0 sweep.
    #[arg(long)]
    pub omega_radius: Option<f64>,
    /// Lower-left corner of a mask input.
    #[arg(long, value_delimiter = ',', value_name = "X,Y")]
    pub origin: Option<Vec<f64>>,
    #[arg(long)]
    pub r_ext: Option<f64>,
    #[arg(long)]
    pub r_cut: Option<f64>,
    /// Ball radius for the small-s curvature coefficients.
    #[arg(long)]
    pub small_s_radius: Option<f64>,
    /// Boundary quadrature tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub tol_near: Option<f64>,
    #[arg(long)]
    pub tol_far: Option<f64>,
    #[arg(long)]
    pub tol_tail: Option<f64>,
    #[arg(long)]
    pub quantum_bits: Option<u32>,
    #[arg(long)]
    pub t_step: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub xbar: Option<f64>,
    /// core, acceptance or all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Run a single acceptance criterion.
    #[arg(long)]
    pub criterion: Option<u32>,
    /// Force the sequential code paths.
    #[arg(long)]
    pub sequential: bool,
    /// Worker cap; defaults to FRACMIN_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for JSON, CSV and PGM outputs.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn pair(flag: &str, v: Vec<f64>) -> Result<[f64; 2]> {
    match v[..] {
        [x, y] => Ok([x, y]),
        _ => Err(Error::InvalidParameter(format!("--{flag} takes two numbers x,y, got {v:?}"))),
    }
}

impl Overrides {
    pub fn resolve(&self, command: &str, name: &str) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => load(path)?,
            None => RunConfig::default(),
        };
        c.command = command.to_string();
        c.name = name.to_string();
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = self.$f.clone() { c.$f = v; })* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $(if self.$f.is_some() { c.$f = self.$f.clone(); })* };
        }
        set!(s, shape, omega_radius, tol, tol_near, tol_far, tol_tail, quantum_bits, t_step, epsilon, xbar, suite, seed, m, radius, eps);
        set_opt!(s_list, grid, h, input, delta, r_ext, r_cut, small_s_radius, criterion, threads, out);
        if let Some(p) = self.point.clone() {
            c.point = Some(pair("point", p)?);
        }
        if let Some(o) = self.origin.clone() {
            c.origin = pair("origin", o)?;
        }
        if self.sequential {
            c.exec = Exec::Sequential;
        }
        if c.threads.is_none() {
            c.threads = threads_from_env()?;
        }
        Ok(c)
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("FRACMIN_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::InvalidParameter(format!("FRACMIN_THREADS = {v:?} is not a worker count"))),
        _ => Ok(None),
    }
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn model(&self) -> ModelOptions {
        ModelOptions {
            tol_near: self.tol_near,
            tol_far: self.tol_far,
            tol_tail: self.tol_tail,
            r_cut: self.r_cut,
            exec: self.exec,
            ..ModelOptions::default()
        }
    }

    pub fn minimize(&self) -> MinimizeOptions {
        MinimizeOptions { model: self.model(), quantum_bits: self.quantum_bits }
    }

    pub fn read_input(&self) -> Result<String> {
        let path = self.input.as_ref().ok_or_else(|| Error::InvalidParameter(format!("{} needs --input", self.command)))?;
        Ok(std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"s": 0.1, "sigma": 2}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"s": 0.1}"#).unwrap();
        assert_eq!(c.s, 0.1);
        assert_eq!(c.m, RunConfig::default().m);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"s": 0.1, "grid": 32, "delta": 0.2}"#).unwrap();
        let o = Overrides { config: Some(path), grid: Some(16), ..Overrides::default() };
        let c = o.resolve("experiment", "ring").unwrap();
        assert_eq!((c.s, c.grid, c.delta, c.name.as_str()), (0.1, Some(16), Some(0.2), "ring"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = Overrides::default().resolve("perimeter", "square").unwrap();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
