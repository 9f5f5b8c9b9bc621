//! Command-line front end: `simulate`, `radonify`, `verify`, `certificate`.
//!
//! Every run is configured by one TOML file. The seed comes from `--seed`,
//! then the `CYLRAD_SEED` environment variable, then the config file, and is
//! generated (and echoed) only when none of these is set. Payload files are a
//! pure function of the resolved config; wall-clock data goes to `meta.json`.
//!
//! Output schemas (`format_version` 1):
//!
//! * `paths.csv`: `replica,coord,t,value`, one row per coordinate and event time.
//! * `jumps.csv`: `replica,coord,t,size`.
//! * `coords.csv`: `replica,t,c_1,…,c_m`.
//! * `qnorm.csv`: `replica,t,qnorm,qnorm_left`.
//! * `summary.json`, `plan.json`, `report.json`, `certificate.json`: objects
//!   with `format_version`, `command`, the resolved `config`, and the payload.

use std::ffi::OsString;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cylindrical::{CylPathSample, CylindricalLevy, DriverSpec, PathSource};
use crate::error::{Error, Result};
use crate::operators::{LinearOperator, OperatorSpec};
use crate::regularize::{choose_truncation, Radonifier, RegularizedPath, TruncationPlan};
use crate::space::{HilbertianSeminorm, SeminormSpec};
use crate::stats::mean_stderr;
use crate::verify::{run_checks, sazonov_certificate, CheckName, MCConfig, VerifySettings};

pub const FORMAT_VERSION: u32 = 1;
pub const SEED_ENV: &str = "CYLRAD_SEED";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cylrad", version, about = "Radon versions of cylindrical Lévy processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample driver paths and write them as CSV.
    Simulate(Common),
    /// Regularize `X∘S` and write coordinate and dual-norm paths.
    Radonify(Common),
    /// Run Monte Carlo checks and write a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated check names, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
    },
    /// Search a Sazonov continuity certificate.
    Certificate {
        #[command(flatten)]
        common: Common,
        /// Overrides `certificate.epsilon`.
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicas: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default = "two")]
    pub r: f64,
}

fn two() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "alpha_default")]
    pub alpha: f64,
    #[serde(default = "k_default")]
    pub k: f64,
}

fn alpha_default() -> f64 {
    0.01
}
fn k_default() -> f64 {
    5.0
}

impl Default for McSection {
    fn default() -> Self {
        Self { alpha: alpha_default(), k: k_default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSection {
    #[serde(default = "eps_default")]
    pub epsilon: f64,
    #[serde(default = "c_max_default")]
    pub c_max: f64,
}

fn eps_default() -> f64 {
    0.1
}
fn c_max_default() -> f64 {
    10.0
}

impl Default for CertificateSection {
    fn default() -> Self {
        Self { epsilon: eps_default(), c_max: c_max_default() }
    }
}

/// The full run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    #[serde(default = "horizon_default")]
    pub horizon: f64,
    #[serde(default = "resolution_default")]
    pub grid_resolution: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "replicas_default")]
    pub replicas: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub driver: DriverSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default = "SeminormSpec::identity")]
    pub seminorm: SeminormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationSpec>,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub verify: VerifySettings,
    #[serde(default)]
    pub certificate: CertificateSection,
}

fn horizon_default() -> f64 {
    1.0
}
fn resolution_default() -> usize {
    256
}
fn replicas_default() -> usize {
    100
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("`dim` must be positive".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("`horizon` must be positive, got {}", self.horizon)));
        }
        if self.grid_resolution == 0 {
            return Err(Error::Config("`grid_resolution` must be positive".into()));
        }
        if self.replicas == 0 {
            return Err(Error::Config("`replicas` must be positive".into()));
        }
        if let Some(t) = &self.truncation {
            if t.m.is_some() == t.tol.is_some() {
                return Err(Error::Config("[truncation] needs exactly one of `m` or `tol`".into()));
            }
        }
        Ok(())
    }

    pub fn mc_config(&self) -> MCConfig {
        MCConfig {
            replicas: self.replicas,
            seed: self.seed(),
            grid_resolution: self.grid_resolution,
            alpha: self.mc.alpha,
            k: self.mc.k,
        }
    }

    pub fn process(&self) -> Result<CylindricalLevy> {
        CylindricalLevy::iid(driver_label(&self.driver), self.driver.build()?, self.dim)
    }

    pub fn operator(&self) -> Result<LinearOperator> {
        self.operator
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs an [operator] section".into()))?
            .build(self.dim)
    }

    pub fn seminorm(&self) -> Result<HilbertianSeminorm> {
        self.seminorm.build(self.dim)
    }
}

fn driver_label(d: &DriverSpec) -> &'static str {
    match d {
        DriverSpec::Zero => "zero",
        DriverSpec::Wiener { .. } => "wiener",
        DriverSpec::Cpoisson { .. } => "cpoisson",
        DriverSpec::Stable { .. } => "stable",
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(c) => {
            let (cfg, out) = resolve(&c)?;
            run_simulate(&cfg, &out)?;
            Ok(true)
        }
        Command::Radonify(c) => {
            let (cfg, out) = resolve(&c)?;
            run_radonify(&cfg, &out)?;
            Ok(true)
        }
        Command::Verify { common, checks } => {
            let (cfg, out) = resolve(&common)?;
            let names = CheckName::parse_list(&checks)?;
            run_verify(&cfg, &names, &out)
        }
        Command::Certificate { common, epsilon } => {
            let (mut cfg, out) = resolve(&common)?;
            if let Some(e) = epsilon {
                cfg.certificate.epsilon = e;
            }
            run_certificate(&cfg, &out)
        }
    }
}

fn resolve(c: &Common) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::load(&c.config)?;
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(s) => Some(s.trim().parse::<u64>().map_err(|e| Error::Config(format!("{SEED_ENV}={s:?}: {e}")))?),
        Err(_) => None,
    };
    cfg.seed = c.seed.or(env_seed).or(cfg.seed).or_else(|| {
        let seed = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
        eprintln!("no seed given; using {seed}");
        Some(seed)
    });
    if let Some(r) = c.replicas {
        cfg.replicas = r;
    }
    cfg.validate()?;
    let out = c.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    Ok((cfg, out))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    payload: T,
}

fn write_json<T: Serialize>(out: &Path, file: &str, command: &str, cfg: &RunConfig, payload: T) -> Result<()> {
    let env = Envelope { format_version: FORMAT_VERSION, command, config: cfg, payload };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    fs::write(out.join(file), text)?;
    write_meta(out, command)
}

fn write_meta(out: &Path, command: &str) -> Result<()> {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = serde_json::json!({
        "format_version": FORMAT_VERSION,
        "command": command,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "unix_time": now,
    });
    fs::write(out.join("meta.json"), format!("{}\n", serde_json::to_string_pretty(&meta)?))?;
    Ok(())
}

fn csv_writer(path: PathBuf) -> Result<csv::Writer<BufWriter<fs::File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(fs::File::create(path)?)))
}

fn sample_all(cfg: &RunConfig, x: &CylindricalLevy) -> Result<Vec<CylPathSample>> {
    (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| x.sample_paths(cfg.horizon, cfg.grid_resolution, cfg.seed(), r))
        .collect()
}

#[derive(Serialize)]
struct CoordStats {
    coord: usize,
    increment_mean: f64,
    increment_var: f64,
    terminal_mean: f64,
    terminal_stderr: f64,
    mean_jumps: f64,
}

#[derive(Serialize)]
struct SimulateSummary {
    replicas: usize,
    total_jumps: usize,
    coordinates: Vec<CoordStats>,
}

/// Write `paths.csv`, `jumps.csv` and `summary.json`.
pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let x = cfg.process()?;
    let samples = sample_all(cfg, &x)?;
    let mut paths = csv_writer(out.join("paths.csv"))?;
    paths.write_record(["replica", "coord", "t", "value"])?;
    let mut jumps = csv_writer(out.join("jumps.csv"))?;
    jumps.write_record(["replica", "coord", "t", "size"])?;
    for s in &samples {
        let r = s.replica().to_string();
        for i in 0..s.dim() {
            let d = s.driver(i);
            let c = (i + 1).to_string();
            for (t, v) in d.times.iter().zip(d.values) {
                paths.write_record([r.as_str(), c.as_str(), &t.to_string(), &v.to_string()])?;
            }
            for (t, dx) in d.jumps {
                jumps.write_record([r.as_str(), c.as_str(), &t.to_string(), &dx.to_string()])?;
            }
        }
    }
    paths.flush()?;
    jumps.flush()?;

    let n = cfg.grid_resolution;
    let coordinates = (0..cfg.dim)
        .map(|i| {
            let mut incs = Vec::with_capacity(samples.len() * n);
            let mut terminal = Vec::with_capacity(samples.len());
            let mut count = 0usize;
            for s in &samples {
                let d = s.driver(i);
                let g = s.grid_index();
                incs.extend(g.windows(2).map(|w| d.values[w[1]] - d.values[w[0]]));
                terminal.push(*d.values.last().expect("nonempty"));
                count += d.jumps.len();
            }
            let (im, _) = mean_stderr(&incs);
            let iv = incs.iter().map(|v| (v - im).powi(2)).sum::<f64>() / (incs.len().max(2) - 1) as f64;
            let (tm, tse) = mean_stderr(&terminal);
            CoordStats {
                coord: i + 1,
                increment_mean: im,
                increment_var: iv,
                terminal_mean: tm,
                terminal_stderr: if tse.is_finite() { tse } else { 0.0 },
                mean_jumps: count as f64 / samples.len() as f64,
            }
        })
        .collect();
    let summary = SimulateSummary {
        replicas: samples.len(),
        total_jumps: samples.iter().map(CylPathSample::total_jumps).sum(),
        coordinates,
    };
    write_json(out, "summary.json", "simulate", cfg, serde_json::json!({ "summary": summary }))
}

#[derive(Serialize)]
pub struct RadonifyPlan {
    pub m: usize,
    /// Planner output when the truncation is tolerance-driven.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<TruncationPlan>,
    /// `4·K·Σ_{j>m} ‖Sφ_j‖²` over the system in use, for martingale drivers.
    pub tail_bound: Option<f64>,
    /// `Σ_{j>m} ‖Sφ_j‖²`
    pub discarded_hs_mass: f64,
    pub domination_constant: f64,
    pub sup_qnorm: Vec<f64>,
}

/// Build the radonifier and choose `m` from the config.
pub fn build_radonifier(cfg: &RunConfig) -> Result<(Radonifier, Option<TruncationPlan>)> {
    let x = cfg.process()?;
    let s = cfg.operator()?;
    let q = cfg.seminorm()?;
    let (m, plan) = match &cfg.truncation {
        Some(TruncationSpec { m: Some(m), .. }) => (Some(*m), None),
        Some(TruncationSpec { tol: Some(tol), r, .. }) => {
            let plan = choose_truncation(&s, &x, *r, *tol, cfg.horizon, x.is_martingale())?;
            (Some(plan.m), Some(plan))
        }
        _ => (None, None),
    };
    let rad = Radonifier::new(x, s, &q, 0)?;
    let m = m.unwrap_or(rad.system().len());
    Ok((rad.with_m(m)?, plan))
}

/// Write `coords.csv`, `qnorm.csv` and `plan.json`.
pub fn run_radonify(cfg: &RunConfig, out: &Path) -> Result<()> {
    let (rad, plan) = build_radonifier(cfg)?;
    let paths: Vec<RegularizedPath> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| rad.replica(cfg.horizon, cfg.grid_resolution, cfg.seed(), r))
        .collect::<Result<_>>()?;
    let m = rad.m();
    let mut coords = csv_writer(out.join("coords.csv"))?;
    let mut header = vec!["replica".to_string(), "t".to_string()];
    header.extend((1..=m).map(|j| format!("c_{j}")));
    coords.write_record(&header)?;
    let mut qnorm = csv_writer(out.join("qnorm.csv"))?;
    qnorm.write_record(["replica", "t", "qnorm", "qnorm_left"])?;
    for y in &paths {
        let r = y.replica().to_string();
        let qn = y.qnorm_path();
        for (k, t) in y.times().iter().enumerate() {
            let mut row = vec![r.clone(), t.to_string()];
            row.extend(y.coords().iter().map(|c| c.values[k].to_string()));
            coords.write_record(&row)?;
            qnorm.write_record([r.as_str(), &t.to_string(), &qn.values[k].to_string(), &qn.left[k].to_string()])?;
        }
    }
    coords.flush()?;
    qnorm.flush()?;
    let payload = RadonifyPlan {
        m,
        plan,
        tail_bound: rad.tail_bound(m, cfg.horizon),
        discarded_hs_mass: rad.discarded_mass(m),
        domination_constant: rad.domination_constant(),
        sup_qnorm: paths.iter().map(RegularizedPath::sup_qnorm).collect(),
    };
    write_json(out, "plan.json", "radonify", cfg, payload)
}

/// Run the named checks, write `report.json`, and return overall pass.
pub fn run_verify(cfg: &RunConfig, names: &[CheckName], out: &Path) -> Result<bool> {
    let (rad, _) = build_radonifier(cfg)?;
    let report = run_checks(&rad, cfg.horizon, names, &cfg.verify, &cfg.mc_config())?;
    for c in &report.checks {
        eprintln!("{:<16} {} statistic={:e} threshold={:e}", c.check, if c.pass { "PASS" } else { "FAIL" }, c.statistic, c.threshold);
    }
    let pass = report.pass;
    write_json(out, "report.json", "verify", cfg, serde_json::json!({ "report": report }))?;
    Ok(pass)
}

/// Run the certificate search, write `certificate.json`, and return its pass flag.
pub fn run_certificate(cfg: &RunConfig, out: &Path) -> Result<bool> {
    let (rad, _) = build_radonifier(cfg)?;
    let cert = sazonov_certificate(&rad, cfg.horizon, cfg.certificate.epsilon, cfg.certificate.c_max, &cfg.mc_config())?;
    match cert.scale {
        Some(c) => eprintln!("admissible c = {c:.6} (c·‖S‖_HS = {:.6})", cert.hs_cost.unwrap_or(f64::NAN)),
        None => eprintln!("no admissible c <= {}; violating probe {}", cert.c_max, cert.worst_probe.as_deref().unwrap_or("?")),
    }
    let pass = cert.pass;
    write_json(out, "certificate.json", "certificate", cfg, serde_json::json!({ "certificate": cert }))?;
    Ok(pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = r#"
dim = 4
horizon = 1.0
grid_resolution = 16
seed = 7
replicas = 3

[driver]
kind = "wiener"

[operator]
decay = 1.0

[truncation]
tol = 0.5
r = 2
"#;

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::from_toml(REFERENCE).unwrap();
        let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.seminorm, SeminormSpec::identity());
        assert_eq!(cfg.mc, McSection::default());
    }

    #[test]
    fn config_errors_name_the_line() {
        let err = RunConfig::from_toml("dim = 4\nhorizon = 1.0\nhorizn = 2.0\n[driver]\nkind = \"wiener\"\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        let both = RunConfig::from_toml(&format!("{REFERENCE}m = 2\n")).unwrap();
        assert!(both.validate().is_err());
    }

    #[test]
    fn tolerance_plan_is_minimal() {
        let cfg = RunConfig::from_toml(REFERENCE).unwrap();
        let (rad, plan) = build_radonifier(&cfg).unwrap();
        let plan = plan.unwrap();
        let tail = |m: usize| 4.0 * ((m + 1)..=4).map(|j| 1.0 / (j * j) as f64).sum::<f64>();
        let oracle = (0..=4).find(|&m| tail(m) <= 0.5).unwrap();
        assert_eq!(plan.m, oracle);
        assert_eq!(rad.m(), oracle);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["cylrad", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["cylrad", "simulate", "--config", "/nonexistent/cfg.toml"]), EXIT_USAGE);
    }
}
