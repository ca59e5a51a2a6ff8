//! Run configuration: strict TOML schema, overrides, validation and the
//! canonical form echoed into every manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use dampwave::model::validate;
use dampwave::{
    DisturbanceSpec, Grid, InitialDataSpec, ModelVariant, Objective, PhysicalParams, Profile,
    ThermoacousticParams,
};

pub const DEFAULT_N: usize = 256;
pub const DEFAULT_COURANT: f64 = 1.0;
pub const DEFAULT_T_END: f64 = 10.0;

/// Every problem found while reading a configuration, not just the first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Simulate,
    Certify,
    CheckIss,
    Converge,
    SweepSigma,
    ThermoacousticEquiv,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::Simulate,
        Self::Certify,
        Self::CheckIss,
        Self::Converge,
        Self::SweepSigma,
        Self::ThermoacousticEquiv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Certify => "certify",
            Self::CheckIss => "check-iss",
            Self::Converge => "converge",
            Self::SweepSigma => "sweep-sigma",
            Self::ThermoacousticEquiv => "thermoacoustic-equiv",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Spatial resolution and time step: exactly one of `courant` and `dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub courant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

fn default_n() -> usize {
    DEFAULT_N
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_N,
            courant: Some(DEFAULT_COURANT),
            dt: None,
        }
    }
}

impl GridConfig {
    /// `dt` if set, otherwise `courant · h / c`.
    pub fn time_step(&self, c: f64) -> f64 {
        self.dt
            .unwrap_or_else(|| self.courant.unwrap_or(DEFAULT_COURANT) / (self.n as f64 * c))
    }
}

/// Initial profile: one of the core presets, or a two-column file
/// (`x value`, whitespace or comma separated) interpolated onto the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Zero,
    Sine {
        amplitude: f64,
        wavenumber: f64,
    },
    GaussianPulse {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Bump {
        amplitude: f64,
        center: f64,
        radius: f64,
    },
    Polynomial {
        coefficients: Vec<f64>,
    },
    Tabulated {
        path: PathBuf,
    },
}

impl ProfileSpec {
    /// Resolves to a core profile, reading tabulated files.
    pub fn resolve(&self) -> Result<Profile, String> {
        Ok(match self.clone() {
            Self::Zero => Profile::Zero,
            Self::Sine {
                amplitude,
                wavenumber,
            } => Profile::Sine {
                amplitude,
                wavenumber,
            },
            Self::GaussianPulse {
                amplitude,
                center,
                width,
            } => Profile::GaussianPulse {
                amplitude,
                center,
                width,
            },
            Self::Bump {
                amplitude,
                center,
                radius,
            } => Profile::Bump {
                amplitude,
                center,
                radius,
            },
            Self::Polynomial { coefficients } => Profile::Polynomial { coefficients },
            Self::Tabulated { path } => {
                let (x, values) = read_table(&path)?.into_iter().unzip();
                Profile::Tabulated { x, values }
            }
        })
    }
}

/// Reads `x value` rows; `#` starts a comment.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|s| s.parse().ok()).collect();
        match parsed.as_deref() {
            Some([x, v]) if x.is_finite() && v.is_finite() => rows.push((*x, *v)),
            _ => {
                return Err(format!(
                    "{}:{}: expected two finite numbers",
                    path.display(),
                    lineno + 1
                ))
            }
        }
    }
    if rows.len() < 2 || rows.windows(2).any(|p| p[1].0 <= p[0].0) {
        return Err(format!(
            "{}: need at least two rows with strictly increasing x",
            path.display()
        ));
    }
    if rows[0].0 > 0.0 || rows[rows.len() - 1].0 < 1.0 {
        return Err(format!("{}: x must cover [0, 1]", path.display()));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub u: ProfileSpec,
    #[serde(default)]
    pub w: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ProfileSpec>,
}

impl InitialConfig {
    pub fn resolve(&self) -> Result<InitialDataSpec, String> {
        Ok(InitialDataSpec {
            u: self.u.resolve()?,
            w: self.w.resolve()?,
            theta: self.theta.as_ref().map(|p| p.resolve()).transpose()?,
        })
    }

    fn files(&self) -> impl Iterator<Item = &PathBuf> {
        [Some(&self.u), Some(&self.w), self.theta.as_ref()]
            .into_iter()
            .flatten()
            .filter_map(|p| match p {
                ProfileSpec::Tabulated { path } => Some(path),
                _ => None,
            })
    }

    fn files_mut(&mut self) -> impl Iterator<Item = &mut PathBuf> {
        [Some(&mut self.u), Some(&mut self.w), self.theta.as_mut()]
            .into_iter()
            .flatten()
            .filter_map(|p| match p {
                ProfileSpec::Tabulated { path } => Some(path),
                _ => None,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub range: (f64, f64),
    pub objective: Objective,
}

/// Fixed `r`, or a search over `optimize.range` when `optimize` is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
}

fn default_r() -> f64 {
    1.0
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self {
            r: 1.0,
            optimize: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Against the finest grid of the list.
    #[default]
    SelfConvergence,
    /// Against the manufactured exact solution.
    Manufactured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    #[serde(default = "default_converge_list")]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub reference: Reference,
}

fn default_converge_list() -> Vec<usize> {
    vec![32, 64, 128, 256]
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            n_list: default_converge_list(),
            reference: Reference::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sigmas")]
    pub sigmas: Vec<f64>,
}

fn default_sigmas() -> Vec<f64> {
    vec![1.0, 0.3, 0.1, 0.03, 0.01]
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigmas: default_sigmas(),
        }
    }
}

/// The thermoacoustic system reuses `a, c, b, k, lambda, sigma` from `params`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoConfig {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_equiv_list")]
    pub n_list: Vec<usize>,
}

fn default_gamma() -> f64 {
    1.4
}

fn default_equiv_list() -> Vec<usize> {
    vec![128, 256]
}

impl Default for ThermoConfig {
    fn default() -> Self {
        Self {
            gamma: default_gamma(),
            n_list: default_equiv_list(),
        }
    }
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub variant: ModelVariant,
    pub t_end: f64,
    pub params: PhysicalParams,
    pub grid: GridConfig,
    pub initial: InitialConfig,
    pub disturbance: DisturbanceSpec,
    pub certificate: CertificateConfig,
    pub converge: ConvergeConfig,
    pub sweep: SweepConfig,
    pub thermoacoustic: ThermoConfig,
}

/// Command-line pieces that shape the configuration.
#[derive(Debug, Clone, Default)]
pub struct Sources<'a> {
    pub config_path: Option<&'a Path>,
    pub experiment: Option<&'a str>,
    pub overrides: &'a [String],
}

const KEYS: [&str; 11] = [
    "experiment",
    "variant",
    "t_end",
    "params",
    "grid",
    "initial",
    "disturbance",
    "certificate",
    "converge",
    "sweep",
    "thermoacoustic",
];

/// Reads the file (if any), applies `--override` and `--experiment`, then
/// validates everything and reports all problems together.
pub fn parse_config(sources: &Sources) -> Result<RunConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let (mut table, base_dir) = match sources.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigErrors(vec![format!("{}: {e}", path.display())]))?;
            let table: toml::Table = toml::from_str(&text)
                .map_err(|e| ConfigErrors(vec![format!("{}: {e}", path.display())]))?;
            (table, path.parent().map(Path::to_path_buf))
        }
        None => (toml::Table::new(), None),
    };
    for item in sources.overrides {
        if let Err(e) = apply_override(&mut table, item) {
            errors.push(e);
        }
    }
    if let Some(name) = sources.experiment {
        table.insert("experiment".into(), toml::Value::String(name.into()));
    }
    let mut config = from_table(table, &mut errors);
    if let (Some(cfg), Some(dir)) = (config.as_mut(), base_dir) {
        for path in cfg.initial.files_mut() {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }
    if let Some(cfg) = &config {
        errors.extend(check(cfg));
    }
    match config {
        Some(cfg) if errors.is_empty() => Ok(cfg),
        _ => Err(ConfigErrors(errors)),
    }
}

/// Parses a canonical configuration (as written by [`canonical_toml`]).
pub fn parse_canonical(text: &str) -> Result<RunConfig, ConfigErrors> {
    let table: toml::Table = toml::from_str(text).map_err(|e| ConfigErrors(vec![e.to_string()]))?;
    let mut errors = Vec::new();
    let config = from_table(table, &mut errors);
    if let Some(cfg) = &config {
        errors.extend(check(cfg));
    }
    match config {
        Some(cfg) if errors.is_empty() => Ok(cfg),
        _ => Err(ConfigErrors(errors)),
    }
}

/// Canonical TOML with every default filled in.
pub fn canonical_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("run configuration serializes")
}

/// `key.path=value`; the value is read as TOML, falling back to a bare string.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), String> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| format!("override `{item}` is not key=value"))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("override `{item}` has an empty key segment"));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| format!("override `{item}`: `{part}` is not a table"))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn section<T: DeserializeOwned + Default>(
    table: &mut toml::Table,
    key: &str,
    errors: &mut Vec<String>,
) -> Option<T> {
    match table.remove(key) {
        None => Some(T::default()),
        Some(value) => value
            .try_into()
            .map_err(|e: toml::de::Error| errors.push(format!("{key}: {}", e.message().trim())))
            .ok(),
    }
}

fn from_table(mut table: toml::Table, errors: &mut Vec<String>) -> Option<RunConfig> {
    for key in table.keys() {
        if !KEYS.contains(&key.as_str()) {
            errors.push(format!("unknown key `{key}`"));
        }
    }
    let experiment = match table.remove("experiment") {
        None => {
            errors.push(format!(
                "no experiment selected; choose one of {}",
                Experiment::ALL.map(|e| e.name()).join(", ")
            ));
            None
        }
        Some(toml::Value::String(s)) => Experiment::parse(&s).or_else(|| {
            errors.push(format!("unknown experiment `{s}`"));
            None
        }),
        Some(other) => {
            errors.push(format!("experiment must be a string, got {other}"));
            None
        }
    };
    let variant: Option<ModelVariant> = match table.remove("variant") {
        None => {
            errors.push("variant is required (A, B, C, D or thermoacoustic)".into());
            None
        }
        Some(v) => v
            .try_into()
            .map_err(|e: toml::de::Error| errors.push(format!("variant: {}", e.message().trim())))
            .ok(),
    };
    let t_end = match table.remove("t_end") {
        None => Some(DEFAULT_T_END),
        Some(toml::Value::Float(f)) => Some(f),
        Some(toml::Value::Integer(i)) => Some(i as f64),
        Some(other) => {
            errors.push(format!("t_end must be a number, got {other}"));
            None
        }
    };
    let params = section::<PhysicalParams>(&mut table, "params", errors);
    let grid = section::<GridConfig>(&mut table, "grid", errors);
    let initial = section::<InitialConfig>(&mut table, "initial", errors);
    let disturbance = section::<DisturbanceSpec>(&mut table, "disturbance", errors);
    let certificate = section::<CertificateConfig>(&mut table, "certificate", errors);
    let converge = section::<ConvergeConfig>(&mut table, "converge", errors);
    let sweep = section::<SweepConfig>(&mut table, "sweep", errors);
    let thermoacoustic = section::<ThermoConfig>(&mut table, "thermoacoustic", errors);
    let mut grid = grid?;
    if grid.courant.is_none() && grid.dt.is_none() {
        grid.courant = Some(DEFAULT_COURANT);
    }
    Some(RunConfig {
        experiment: experiment?,
        variant: variant?,
        t_end: t_end?,
        params: params?,
        grid,
        initial: initial?,
        disturbance: disturbance?,
        certificate: certificate?,
        converge: converge?,
        sweep: sweep?,
        thermoacoustic: thermoacoustic?,
    })
}

impl RunConfig {
    pub fn thermo_params(&self) -> ThermoacousticParams {
        let p = &self.params;
        ThermoacousticParams {
            a: p.a,
            c: p.c,
            gamma: self.thermoacoustic.gamma,
            b: p.b,
            k: p.k,
            lambda: p.lambda,
            sigma: p.sigma,
        }
    }

    pub fn dt(&self) -> f64 {
        self.grid.time_step(self.params.c)
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Semantic checks; physical constraints come from the model validator.
fn check(cfg: &RunConfig) -> Vec<String> {
    let mut errors = Vec::new();
    let variant = cfg.variant;
    let thermo = variant == ModelVariant::Thermoacoustic;
    match (cfg.experiment, thermo) {
        (Experiment::ThermoacousticEquiv, false) => {
            errors.push("thermoacoustic-equiv needs variant = \"thermoacoustic\"".into())
        }
        (e, true) if e != Experiment::ThermoacousticEquiv => errors.push(format!(
            "variant thermoacoustic is only used by thermoacoustic-equiv, not {e}"
        )),
        _ => {}
    }
    if cfg.experiment == Experiment::SweepSigma && variant != ModelVariant::D {
        errors.push("sweep-sigma needs variant = \"D\"".into());
    }

    if thermo {
        errors.extend(cfg.thermo_params().validate().violations);
    } else {
        errors.extend(validate(&cfg.params, variant).violations);
        errors.extend(cfg.disturbance.check_against(variant).violations);
    }

    if !(cfg.t_end.is_finite() && cfg.t_end >= 0.0) {
        errors.push("t_end must be >= 0".into());
    }
    if cfg.grid.n < 8 {
        errors.push(format!("grid.n must be >= 8, got {}", cfg.grid.n));
    }
    if let Some(c) = cfg.grid.courant {
        if !positive(c) {
            errors.push("grid.courant must be > 0".into());
        }
    }
    if let Some(dt) = cfg.grid.dt {
        if !positive(dt) {
            errors.push("grid.dt must be > 0".into());
        }
    }
    if cfg.grid.dt.is_some() && cfg.grid.courant.is_some() {
        errors.push("give grid.dt or grid.courant, not both".into());
    }

    if !positive(cfg.certificate.r) {
        errors.push("certificate.r must be > 0".into());
    }
    if let Some(opt) = &cfg.certificate.optimize {
        let (lo, hi) = opt.range;
        if !(positive(lo) && hi.is_finite() && lo <= hi) {
            errors.push("certificate.optimize.range must satisfy 0 < lo <= hi".into());
        }
    }

    for path in cfg.initial.files() {
        if !path.exists() {
            errors.push(format!("initial profile file {} does not exist", path.display()));
        } else if let Err(e) = read_table(path) {
            errors.push(e);
        }
    }

    match cfg.experiment {
        Experiment::Simulate | Experiment::CheckIss if !thermo && cfg.grid.n >= 8 => {
            if let Ok(grid) = Grid::new(cfg.grid.n) {
                if let Ok(spec) = cfg.initial.resolve() {
                    match spec.sample(&grid, variant) {
                        Ok(data) => {
                            let d0 = cfg.disturbance.d.eval(0.0).unwrap_or(0.0);
                            errors.extend(
                                data.check(&grid, variant, &cfg.params.effective(variant), d0)
                                    .violations
                                    .into_iter()
                                    .map(|v| format!("initial: {v}")),
                            );
                        }
                        Err(e) => errors.push(format!("initial: {e}")),
                    }
                }
            }
        }
        _ => {}
    }
    if cfg.experiment == Experiment::Converge {
        let list = &cfg.converge.n_list;
        let min = match cfg.converge.reference {
            Reference::SelfConvergence => 3,
            Reference::Manufactured => 2,
        };
        if list.len() < min {
            errors.push(format!("converge.n_list needs at least {min} entries"));
        }
        if list.windows(2).any(|p| p[1] <= p[0]) || list.iter().any(|n| *n < 8) {
            errors.push("converge.n_list must be ascending with every N >= 8".into());
        }
        if cfg.converge.reference == Reference::Manufactured
            && !matches!(variant, ModelVariant::B | ModelVariant::C | ModelVariant::D)
        {
            errors.push("manufactured convergence is available for B, C and D".into());
        }
    }
    if cfg.experiment == Experiment::SweepSigma {
        let s = &cfg.sweep.sigmas;
        if s.is_empty() || s.iter().any(|v| !positive(*v)) || s.windows(2).any(|p| p[1] >= p[0]) {
            errors.push("sweep.sigmas must be positive and strictly descending".into());
        }
    }
    if cfg.experiment == Experiment::ThermoacousticEquiv {
        let list = &cfg.thermoacoustic.n_list;
        if list.is_empty() || list.windows(2).any(|p| p[1] <= p[0]) || list.iter().any(|n| *n < 8) {
            errors.push("thermoacoustic.n_list must be ascending with every N >= 8".into());
        }
    }
    errors
}
