//! File-based runner behind the `fhrn` binary.
//!
//! A run is described by a [`RunConfig`] (TOML, every section optional) plus
//! command-line overrides; flags win over file values. [`execute`] writes the
//! outputs of one subcommand into the output directory and finishes with
//! `manifest.json`, which lists every emitted file with its SHA-256. If any
//! step fails, files already written for the run are removed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{
    discrete_step, BlockMapping, FastWeightTrace, ModelParams, ReentryFlow, ReentryOperator, StateVector,
};
use crate::error::{Error, Result};
use crate::integrate::{propagate, simulate, IntegratorConfig};
use crate::io::CsvTable;
use crate::lyapunov::{lyapunov_rate, lyapunov_value};
use crate::oja::{simulate_oja, OjaConfig};
use crate::operators::{random_antisymmetric, random_symmetric, rotation_generator, scale_to_norm, OperatorFamily};
use crate::rng::stream;
use crate::spectral::{stability_map, StatePlane};
use crate::sweep::{critical_surface, sweep_grid, SweepSpec};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "FHRN_OUT";
pub const MANIFEST_NAME: &str = "manifest.json";

/// How the reentry matrix `W` is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// Rotation generator: ±1 blocks on the first two coordinates.
    Rotation {
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Rows of an explicit square matrix.
    Explicit { matrix: Vec<Vec<f64>> },
    Antisymmetric {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "one")]
        norm: f64,
    },
    Symmetric {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "one")]
        norm: f64,
    },
    /// `Q_a + mu·Q_s`.
    Mixed {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "one")]
        norm: f64,
        #[serde(default = "half")]
        mu: f64,
    },
}

fn default_dim() -> usize {
    2
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

impl Default for OperatorSpec {
    fn default() -> Self {
        OperatorSpec::Rotation { dim: 2 }
    }
}

impl OperatorSpec {
    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Explicit { matrix } => matrix.len(),
            OperatorSpec::Rotation { dim }
            | OperatorSpec::Antisymmetric { dim, .. }
            | OperatorSpec::Symmetric { dim, .. }
            | OperatorSpec::Mixed { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim() == 0 {
            return Err(Error::ConfigInvalid("operator dimension must be ≥ 1".into()));
        }
        match self {
            OperatorSpec::Rotation { dim } if *dim < 2 => {
                Err(Error::ConfigInvalid("rotation operator needs dim ≥ 2".into()))
            }
            OperatorSpec::Explicit { matrix } => {
                let n = matrix.len();
                if let Some(row) = matrix.iter().find(|r| r.len() != n) {
                    return Err(Error::ConfigInvalid(format!(
                        "operator matrix must be square: {n} rows but a row of length {}",
                        row.len()
                    )));
                }
                if matrix.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::ConfigInvalid("operator matrix must be finite".into()));
                }
                Ok(())
            }
            OperatorSpec::Antisymmetric { norm, .. }
            | OperatorSpec::Symmetric { norm, .. }
            | OperatorSpec::Mixed { norm, .. }
                if !(*norm >= 0.0 && norm.is_finite()) =>
            {
                Err(Error::ConfigInvalid("operator norm must be finite and ≥ 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Builds `W`; random generators draw from the `"operator"` stream of `seed`.
    pub fn build(&self, seed: u64) -> Result<ReentryOperator> {
        self.validate()?;
        let mut rng = stream(seed, "operator", 0);
        let m = match self {
            OperatorSpec::Rotation { dim } => rotation_generator(*dim),
            OperatorSpec::Explicit { matrix } => {
                let n = matrix.len();
                DMatrix::from_row_iterator(n, n, matrix.iter().flatten().copied())
            }
            OperatorSpec::Antisymmetric { dim, norm } => scale_to_norm(&random_antisymmetric(*dim, &mut rng), *norm),
            OperatorSpec::Symmetric { dim, norm } => scale_to_norm(&random_symmetric(*dim, &mut rng), *norm),
            OperatorSpec::Mixed { dim, norm, mu } => {
                let m = random_antisymmetric(*dim, &mut rng) + random_symmetric(*dim, &mut rng) * *mu;
                scale_to_norm(&m, *norm)
            }
        };
        ReentryOperator::new(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    /// Initial state; defaults to `0.5·e₁`.
    pub y0: Option<Vec<f64>>,
    /// Keep every `stride`-th sample.
    pub stride: usize,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection { y0: None, stride: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PortraitSection {
    /// Seed lattice `[nx, ny]`.
    pub grid: [usize; 2],
    /// `[y1_lo, y1_hi, y2_lo, y2_hi]`.
    pub extent: [f64; 4],
    pub horizon: f64,
    pub stride: usize,
}

impl Default for PortraitSection {
    fn default() -> Self {
        PortraitSection {
            grid: [7, 7],
            extent: [-1.5, 1.5, -1.5, 1.5],
            horizon: 10.0,
            stride: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaneSection {
    pub grid: [usize; 2],
    pub extent: [f64; 4],
}

impl Default for PlaneSection {
    fn default() -> Self {
        PlaneSection {
            grid: [201, 201],
            extent: [-1.5, 1.5, -1.5, 1.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapSection {
    pub grid: [usize; 2],
    pub extent: [f64; 4],
    /// Starting radii of the radial traces (along `e₁`).
    pub radii: Vec<f64>,
    pub horizon: f64,
    pub stride: usize,
}

impl Default for LyapSection {
    fn default() -> Self {
        LyapSection {
            grid: [101, 101],
            extent: [-1.5, 1.5, -1.5, 1.5],
            radii: vec![0.1, 0.5, 1.5, 2.0, 3.0],
            horizon: 5.0,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSection {
    #[serde(flatten)]
    pub spec: SweepSpec,
    pub family: OperatorFamily,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscreteSection {
    pub steps: usize,
    pub dt: f64,
    /// Constant external drive; defaults to `e₁`.
    pub x_ex: Option<Vec<f64>>,
    /// Previous output at step 0; defaults to `e₁` (the gain is singular at
    /// the origin when `β = 1`).
    pub y0: Option<Vec<f64>>,
}

impl Default for DiscreteSection {
    fn default() -> Self {
        DiscreteSection {
            steps: 200,
            dt: 0.05,
            x_ex: None,
            y0: None,
        }
    }
}

/// Subcommand tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Simulate,
    Portrait,
    Specmap,
    Lyap,
    Sweep,
    Oja,
    Discrete,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Portrait => "portrait",
            Command::Specmap => "specmap",
            Command::Lyap => "lyap",
            Command::Sweep => "sweep",
            Command::Oja => "oja",
            Command::Discrete => "discrete",
        }
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub out: PathBuf,
    pub params: ModelParams,
    pub operator: OperatorSpec,
    pub integrator: IntegratorConfig,
    pub simulate: SimulateSection,
    pub portrait: PortraitSection,
    pub specmap: PlaneSection,
    pub lyap: LyapSection,
    pub sweep: SweepSection,
    pub oja: OjaConfig,
    pub discrete: DiscreteSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::default(),
            seed: 0,
            out: PathBuf::from("fhrn-out"),
            params: ModelParams::default(),
            operator: OperatorSpec::default(),
            integrator: IntegratorConfig::default(),
            simulate: SimulateSection::default(),
            portrait: PortraitSection::default(),
            specmap: PlaneSection::default(),
            lyap: LyapSection::default(),
            sweep: SweepSection::default(),
            oja: OjaConfig::default(),
            discrete: DiscreteSection::default(),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::ConfigInvalid(e.to_string())
}

fn check_extent(name: &str, extent: &[f64; 4], grid: &[usize; 2]) -> Result<()> {
    if extent.iter().any(|v| !v.is_finite()) || extent[0] >= extent[1] || extent[2] >= extent[3] {
        return Err(Error::ConfigInvalid(format!("{name}: extent must be a,b,c,d with a < b and c < d")));
    }
    if grid[0] < 2 || grid[1] < 2 {
        return Err(Error::ConfigInvalid(format!("{name}: grid needs at least 2 points per axis")));
    }
    Ok(())
}

fn check_len(name: &str, v: &Option<Vec<f64>>, dim: usize) -> Result<()> {
    match v {
        Some(v) if v.len() != dim => Err(Error::ConfigInvalid(format!(
            "{name} has {} entries but the operator dimension is {dim}",
            v.len()
        ))),
        Some(v) if v.iter().any(|x| !x.is_finite()) => Err(Error::ConfigInvalid(format!("{name} must be finite"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    /// Parses a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything the selected subcommand will use.
    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::InvalidArgument(m) => Error::ConfigInvalid(m),
            other => other,
        };
        self.params.validate().map_err(as_config)?;
        self.operator.validate()?;
        let d = self.operator.dim();
        match self.command {
            Command::Simulate => {
                self.integrator.validate()?;
                check_len("simulate.y0", &self.simulate.y0, d)?;
                if self.simulate.stride == 0 {
                    return Err(Error::ConfigInvalid("simulate.stride must be ≥ 1".into()));
                }
            }
            Command::Portrait => {
                check_extent("portrait", &self.portrait.extent, &self.portrait.grid)?;
                if d < 2 {
                    return Err(Error::ConfigInvalid("portrait needs an operator of dim ≥ 2".into()));
                }
                IntegratorConfig {
                    horizon: self.portrait.horizon,
                    ..self.integrator
                }
                .validate()?;
                if self.portrait.stride == 0 {
                    return Err(Error::ConfigInvalid("portrait.stride must be ≥ 1".into()));
                }
            }
            Command::Specmap => {
                check_extent("specmap", &self.specmap.extent, &self.specmap.grid)?;
                if d != 2 {
                    return Err(Error::ConfigInvalid("specmap needs a 2-dimensional operator".into()));
                }
            }
            Command::Lyap => {
                check_extent("lyap", &self.lyap.extent, &self.lyap.grid)?;
                if d < 2 {
                    return Err(Error::ConfigInvalid("lyap needs an operator of dim ≥ 2".into()));
                }
                if self.lyap.radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
                    return Err(Error::ConfigInvalid("lyap.radii must be finite and ≥ 0".into()));
                }
                IntegratorConfig {
                    horizon: self.lyap.horizon,
                    ..self.integrator
                }
                .validate()?;
                if self.lyap.stride == 0 {
                    return Err(Error::ConfigInvalid("lyap.stride must be ≥ 1".into()));
                }
            }
            Command::Sweep => {
                self.sweep.spec.validate()?;
                if self.sweep.spec.empirical {
                    self.sweep.family.validate(self.sweep.spec.dim).map_err(as_config)?;
                }
            }
            Command::Oja => self.oja.validate()?,
            Command::Discrete => {
                check_len("discrete.x_ex", &self.discrete.x_ex, d)?;
                check_len("discrete.y0", &self.discrete.y0, d)?;
                if !(self.discrete.dt > 0.0 && self.discrete.dt.is_finite()) {
                    return Err(Error::ConfigInvalid("discrete.dt must be > 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    pub wall_time_s: f64,
    pub files: Vec<ManifestEntry>,
}

impl RunManifest {
    pub fn file(&self, name: &str) -> Option<&ManifestEntry> {
        self.files.iter().find(|f| f.path == name)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

// Writes files into the output directory and remembers them for cleanup.
struct Emitter {
    dir: PathBuf,
    written: Vec<PathBuf>,
    entries: Vec<ManifestEntry>,
}

impl Emitter {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Emitter {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            entries: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.entries.push(ManifestEntry {
            path: name.to_string(),
            sha256: sha256_hex(contents),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        self.write(name, table.as_str().as_bytes())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn discard(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

fn unit_state(dim: usize, radius: f64) -> StateVector {
    let mut y = DVector::zeros(dim);
    y[0] = radius;
    StateVector::new(y)
}

fn run_simulate(cfg: &RunConfig, op: ReentryOperator, out: &mut Emitter) -> Result<()> {
    let d = op.dim();
    let y0 = cfg.simulate.y0.as_ref().map_or_else(|| unit_state(d, 0.5), |v| StateVector::from_slice(v));
    let flow = ReentryFlow::autonomous(op, cfg.params)?;
    let traj = simulate(flow.field(), &y0, &cfg.integrator)?;
    out.csv("trajectory.csv", &traj.to_csv(cfg.simulate.stride))
}

fn run_portrait(cfg: &RunConfig, op: ReentryOperator, out: &mut Emitter) -> Result<()> {
    let p = &cfg.portrait;
    let d = op.dim();
    let flow = ReentryFlow::autonomous(op, cfg.params)?;
    let field = flow.field();
    let integ = IntegratorConfig {
        horizon: p.horizon,
        ..cfg.integrator
    };
    let plane = StatePlane::new(p.extent, p.grid[0], p.grid[1]);
    let mut table = CsvTable::new(&["seed", "t", "y_1", "y_2", "norm"]);
    let mut id = 0usize;
    for &a in &plane.y1 {
        for &b in &plane.y2 {
            let mut y0 = vec![0.0; d];
            y0[0] = a;
            y0[1] = b;
            let mut k = 0usize;
            propagate(&field, &y0, &integ, |t, y| {
                if k % p.stride == 0 {
                    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    table.push_numbers(&[id as f64, t, y[0], y[1], n]);
                }
                k += 1;
                true
            })?;
            id += 1;
        }
    }
    out.csv("portrait.csv", &table)
}

fn run_specmap(cfg: &RunConfig, op: ReentryOperator, out: &mut Emitter) -> Result<()> {
    let s = &cfg.specmap;
    let grid = stability_map(&StatePlane::new(s.extent, s.grid[0], s.grid[1]), &op, &cfg.params)?;
    out.csv("specmap.csv", &grid.to_csv())?;
    out.json("specmap.json", &grid.sidecar())
}

fn run_lyap(cfg: &RunConfig, op: ReentryOperator, out: &mut Emitter) -> Result<()> {
    let l = &cfg.lyap;
    let d = op.dim();
    let flow = ReentryFlow::autonomous(op, cfg.params)?;
    let plane = StatePlane::new(l.extent, l.grid[0], l.grid[1]);
    let mut surface = CsvTable::new(&["y_1", "y_2", "v", "v_dot"]);
    for &a in &plane.y1 {
        for &b in &plane.y2 {
            let mut y = vec![0.0; d];
            y[0] = a;
            y[1] = b;
            let y = StateVector::from(y);
            let ydot = flow.eval(&y)?;
            surface.push_numbers(&[a, b, lyapunov_value(&y), lyapunov_rate(&y, &ydot)]);
        }
    }
    out.csv("lyap_surface.csv", &surface)?;

    let integ = IntegratorConfig {
        horizon: l.horizon,
        ..cfg.integrator
    };
    let mut radial = CsvTable::new(&["r0", "t", "radius", "v"]);
    for &r0 in &l.radii {
        let traj = simulate(flow.field(), &unit_state(d, r0), &integ)?;
        for (i, (t, y)) in traj.times().iter().zip(traj.states()).enumerate() {
            if i % l.stride == 0 || i + 1 == traj.len() {
                radial.push_numbers(&[r0, *t, y.radius(), lyapunov_value(y)]);
            }
        }
    }
    out.csv("lyap_radial.csv", &radial)
}

fn run_sweep(cfg: &RunConfig, out: &mut Emitter) -> Result<()> {
    let spec = SweepSpec {
        seed: cfg.seed,
        ..cfg.sweep.spec.clone()
    };
    out.csv("critical_surface.csv", &critical_surface(&spec)?)?;
    let grid = sweep_grid(&spec, &cfg.sweep.family)?;
    out.csv("sweep.csv", &grid.to_csv())?;
    let mut side = grid.sidecar();
    side["fixed_radius"] = spec.fixed_radius.into();
    side["family"] = serde_json::to_value(cfg.sweep.family).map_err(|e| Error::Io(e.to_string()))?;
    out.json("sweep.json", &side)
}

fn run_oja(cfg: &RunConfig, out: &mut Emitter) -> Result<()> {
    let trace = simulate_oja(&cfg.oja)?;
    out.csv("oja.csv", &trace.to_csv())
}

fn run_discrete(cfg: &RunConfig, op: ReentryOperator, out: &mut Emitter) -> Result<()> {
    let s = &cfg.discrete;
    let d = op.dim();
    let x_ex = s.x_ex.as_ref().map_or_else(|| unit_state(d, 1.0).into_inner(), |v| DVector::from_column_slice(v));
    let mut y = s.y0.as_ref().map_or_else(|| unit_state(d, 1.0), |v| StateVector::from_slice(v));
    let mut trace = FastWeightTrace::zeros(d);
    let h = BlockMapping::identity(d);
    let mut header = vec!["step".to_string()];
    header.extend((1..=d).map(|i| format!("y_{i}")));
    header.extend(["norm".to_string(), "trace_norm".to_string()]);
    let mut table = CsvTable::new(&header);
    let row = |k: usize, y: &StateVector, a: &FastWeightTrace, table: &mut CsvTable| {
        let mut r = vec![k as f64];
        r.extend_from_slice(y.as_slice());
        r.push(y.radius());
        r.push(a.matrix().norm());
        table.push_numbers(&r);
    };
    row(0, &y, &trace, &mut table);
    for k in 1..=s.steps {
        let (next_y, next_trace) = discrete_step(&x_ex, &y, &trace, &h, &op, &cfg.params, s.dt)?;
        if !next_y.is_finite() {
            return Err(Error::NonFiniteState { time: k as f64 * s.dt });
        }
        y = next_y;
        trace = next_trace;
        row(k, &y, &trace, &mut table);
    }
    out.csv("discrete.csv", &table)
}

fn dispatch(cfg: &RunConfig, out: &mut Emitter) -> Result<()> {
    match cfg.command {
        Command::Sweep => run_sweep(cfg, out),
        Command::Oja => run_oja(cfg, out),
        other => {
            let op = cfg.operator.build(cfg.seed)?;
            match other {
                Command::Simulate => run_simulate(cfg, op, out),
                Command::Portrait => run_portrait(cfg, op, out),
                Command::Specmap => run_specmap(cfg, op, out),
                Command::Lyap => run_lyap(cfg, op, out),
                Command::Discrete => run_discrete(cfg, op, out),
                Command::Sweep | Command::Oja => unreachable!(),
            }
        }
    }
}

/// Validates `cfg`, runs its subcommand and writes the manifest last.
/// On failure every file written by this run is removed.
pub fn execute(cfg: &RunConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let started_at = unix_now();
    let clock = Instant::now();
    let mut out = Emitter::new(&cfg.out)?;
    let result = dispatch(cfg, &mut out).and_then(|()| {
        let manifest = RunManifest {
            command: cfg.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config: cfg.clone(),
            started_at,
            finished_at: unix_now(),
            wall_time_s: clock.elapsed().as_secs_f64(),
            files: out.entries.clone(),
        };
        let value = serde_json::to_value(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        out.json(MANIFEST_NAME, &value)?;
        Ok(manifest)
    });
    if result.is_err() {
        out.discard();
    }
    result
}

/// Machine-readable error report, `{"error": {"kind", "message"}}`.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({ "error": { "kind": err.kind(), "message": err.to_string() } }).to_string()
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Parser)]
#[command(name = "fhrn", version, about = "Homeostatic reentry network simulator and stability toolkit")]
pub struct Cli {
    /// Output directory [default: fhrn-out]
    #[arg(long, global = true, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    /// TOML run configuration; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Integrate the autonomous flow from one initial state
    Simulate(SimulateArgs),
    /// Trajectories from a lattice of seeds in the (y1, y2) plane
    Portrait(PortraitArgs),
    /// Spectral abscissa of the Jacobian over the (y1, y2) plane
    Specmap,
    /// Lyapunov energy surface and radial traces
    Lyap,
    /// Critical surface and effective-gain stability map
    Sweep(SweepArgs),
    /// Oja weight flow against its activity-space image
    Oja,
    /// Iterate the discrete fast-weight update
    Discrete(DiscreteArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with model parameters (gamma, beta, kappa, theta, lambda_a)
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Initial state, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y0: Option<Vec<f64>>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PortraitArgs {
    /// Seed lattice nx,ny
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub grid: Option<Vec<usize>>,
    /// a,b,c,d for [a, b] × [c, d]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub extent: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML sweep specification
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Also integrate each cell to classify it empirically
    #[arg(long)]
    pub empirical: bool,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[arg(long)]
    pub steps: Option<usize>,
}

fn exactly<const N: usize, T: Copy>(name: &str, v: &[T]) -> Result<[T; N]> {
    v.try_into()
        .map_err(|_| Error::ConfigInvalid(format!("--{name} expects {N} comma-separated values, got {}", v.len())))
}

impl Cli {
    /// Merges the config file (if any) with the flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(out) = self.out {
            cfg.out = out;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.command = match self.command {
            CliCommand::Simulate(a) => {
                if let Some(p) = a.params {
                    let text = fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    cfg.params = toml::from_str(&text).map_err(config_err)?;
                }
                if a.y0.is_some() {
                    cfg.simulate.y0 = a.y0;
                }
                if let Some(dt) = a.dt {
                    cfg.integrator.dt = dt;
                }
                if let Some(h) = a.horizon {
                    cfg.integrator.horizon = h;
                }
                Command::Simulate
            }
            CliCommand::Portrait(a) => {
                if let Some(g) = a.grid {
                    cfg.portrait.grid = exactly("grid", &g)?;
                }
                if let Some(e) = a.extent {
                    cfg.portrait.extent = exactly("extent", &e)?;
                }
                Command::Portrait
            }
            CliCommand::Specmap => Command::Specmap,
            CliCommand::Lyap => Command::Lyap,
            CliCommand::Sweep(a) => {
                if let Some(p) = a.spec {
                    let text = fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    cfg.sweep = toml::from_str(&text).map_err(config_err)?;
                }
                if a.empirical {
                    cfg.sweep.spec.empirical = true;
                }
                Command::Sweep
            }
            CliCommand::Oja => Command::Oja,
            CliCommand::Discrete(a) => {
                if let Some(n) = a.steps {
                    cfg.discrete.steps = n;
                }
                Command::Discrete
            }
        };
        Ok(cfg)
    }
}

/// Entry point used by the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match cli.into_config().and_then(|cfg| execute(&cfg)) {
        Ok(manifest) => {
            println!("{}", Path::new(&manifest.config.out).join(MANIFEST_NAME).display());
            0
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            1
        }
    }
}
