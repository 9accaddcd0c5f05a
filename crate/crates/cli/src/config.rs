//! Run configuration: a TOML file per run, strict about unknown keys, with
//! dotted-path command-line overrides applied before deserialization. The
//! fully resolved configuration is recorded in the run manifest.

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::init::Descriptor;

fn default_speed() -> f64 {
    1.0
}

fn default_stride() -> usize {
    1
}

fn default_tol_angle() -> f64 {
    0.15
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub nx: usize,
    pub dx: f64,
    pub dt: f64,
    /// Wave speed; must stay 1 for the gauge-field runs.
    #[serde(default = "default_speed")]
    pub a: f64,
}

impl LatticeConfig {
    pub fn build(&self) -> Result<trihelix_core::waves::WaveParams, CliError> {
        trihelix_core::waves::WaveParams::new(self.a, self.nx, self.dx, self.dt)
            .map_err(|e| CliError::config(format!("lattice: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub steps: usize,
    /// Snapshot stride (every `stride` steps; the initial state is always
    /// written).
    #[serde(default = "default_stride")]
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputLayout {
    /// One CSV per emitted snapshot.
    PerSnapshot,
    /// One long-format CSV holding every emitted snapshot.
    Long,
}

impl Default for OutputLayout {
    fn default() -> Self {
        OutputLayout::PerSnapshot
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; relative paths resolve under the directory named
    /// by the TRIHELIX_OUT_ROOT environment variable when it is set.
    pub dir: String,
    #[serde(default)]
    pub layout: OutputLayout,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveInitialConfig {
    /// Descriptors for the three-component field c; contributions sum.
    #[serde(default)]
    pub c: Vec<Descriptor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub lattice: LatticeConfig,
    pub evolution: EvolutionConfig,
    pub output: OutputConfig,
    pub initial: WaveInitialConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DhCouplingConfig {
    pub e: f64,
    /// Instability abort threshold on any field magnitude.
    pub field_ceiling: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DhInitialConfig {
    #[serde(default)]
    pub u: Vec<Descriptor>,
    #[serde(default)]
    pub a1: Vec<Descriptor>,
    /// When set (default), the temporal-potential velocity is derived from
    /// `a1` so the initial data satisfies the Lorenz condition exactly.
    #[serde(default = "crate::config::default_true")]
    pub lorenz_consistent: bool,
}

pub(crate) fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DhConfig {
    pub lattice: LatticeConfig,
    pub coupling: DhCouplingConfig,
    pub evolution: EvolutionConfig,
    pub output: OutputConfig,
    pub initial: DhInitialConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThCouplingConfig {
    pub g: f64,
    pub field_ceiling: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThInitialConfig {
    #[serde(default)]
    pub u: Vec<Descriptor>,
    /// Spatial gauge potential; the temporal potential starts at zero with
    /// the Lorenz-consistent velocity, which keeps the gauge condition
    /// satisfied through first order for any coupling.
    #[serde(default)]
    pub w1: Vec<Descriptor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThConfig {
    pub lattice: LatticeConfig,
    pub coupling: ThCouplingConfig,
    pub evolution: EvolutionConfig,
    pub output: OutputConfig,
    pub initial: ThInitialConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotateDemoConfig {
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordsConfig {
    /// Institution matrix b: rows (G, S, B), columns (W, N, L).
    pub matrix: CoordsMatrixConfig,
    /// Angular tolerance for regime classification, radians.
    #[serde(default = "default_tol_angle")]
    pub tolerance_angle: f64,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordsMatrixConfig {
    pub b: [[f64; 3]; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractalConfig {
    /// "TH" or "DH".
    pub mode: String,
    pub generations: u32,
    /// Any of "dot", "json" (both by default).
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    pub output: OutputConfig,
}

fn default_formats() -> Vec<String> {
    vec!["dot".to_owned(), "json".to_owned()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    /// Superposition residual of two source-free non-Abelian runs.
    ThSuperposition,
    /// Superposition residual of two source-free Abelian runs.
    DhSuperposition,
    /// Distance of a non-Abelian run from the component-decoupled linear run.
    AbelianLimit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub mode: CompareMode,
    pub lattice: LatticeConfig,
    pub steps: usize,
    /// Couplings to sweep (g for the non-Abelian modes, e for the Abelian
    /// one); one residual row per value.
    pub couplings: Vec<f64>,
    pub field_ceiling: Option<f64>,
    /// Fails the run (exit code 1) when any residual exceeds this bound.
    pub tolerance: Option<f64>,
    pub initial_a: ThInitialConfig,
    /// Second state for the superposition modes; ignored by abelian-limit.
    pub initial_b: Option<ThInitialConfig>,
    pub output: OutputConfig,
}

/// Reads a TOML file, applies `key.path=value` overrides, and deserializes
/// into the typed config, rejecting unknown keys by name.
pub fn load_config<T: serde::de::DeserializeOwned>(
    path: &std::path::Path,
    overrides: &[String],
) -> Result<(T, toml::Value), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    load_config_text::<T>(&text, overrides)
}

/// [`load_config`] on already-loaded text; also the entry point for built-in
/// default configs.
pub fn load_config_text<T: serde::de::DeserializeOwned>(
    text: &str,
    overrides: &[String],
) -> Result<(T, toml::Value), CliError> {
    let mut tree: toml::Value = text
        .parse()
        .map_err(|e| CliError::config(format!("config parse error: {e}")))?;
    for entry in overrides {
        apply_override(&mut tree, entry)?;
    }
    let typed: T = tree
        .clone()
        .try_into()
        .map_err(|e| CliError::config(format!("config error: {e}")))?;
    Ok((typed, tree))
}

/// Applies one `dotted.path=value` override onto the TOML tree; the value is
/// parsed as TOML (so strings need quotes only when ambiguous).
fn apply_override(tree: &mut toml::Value, entry: &str) -> Result<(), CliError> {
    let (path, raw_value) = entry
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override '{entry}' is not key=value")))?;
    let value: toml::Value = raw_value
        .parse()
        .or_else(|_| format!("\"{raw_value}\"").parse())
        .map_err(|e| CliError::config(format!("override value '{raw_value}': {e}")))?;
    let mut node = tree;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| CliError::config(format!("override path '{path}' crosses a non-table")))?;
        if i + 1 == segments.len() {
            table.insert((*seg).to_owned(), value);
            return Ok(());
        }
        node = table
            .entry((*seg).to_owned())
            .or_insert(toml::Value::Table(Default::default()));
    }
    Ok(())
}
