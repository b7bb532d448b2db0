use std::path::{Path, PathBuf};

use regbench::harness::{GridSpec, Preset};
use regbench::{Error, Result};
use serde::Deserialize;

/// Contents of a `--config` TOML file. Every key is optional; flags given
/// on the command line win over the file.
///
/// ```toml
/// preset = "desk"
/// seed = 7
/// workers = 4
/// out = "results"
/// alpha_grid = [100.0, 1.0, 0.01]
///
/// [grid]            # overrides levels of the preset grid
/// features_p = [16]
/// sample_ns = [100, 1000]
/// snrs = [0.04, 1.0]
/// seeds_per_config = 3
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub alpha_grid: Option<Vec<f64>>,
    pub grid: Option<toml::Table>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// The preset grid with the `[grid]` table laid over it.
    pub fn grid_spec(&self, preset: Preset) -> Result<GridSpec> {
        let base = GridSpec::preset(preset);
        let Some(overrides) = &self.grid else {
            return Ok(base);
        };
        let mut table = match toml::Value::try_from(&base) {
            Ok(toml::Value::Table(t)) => t,
            _ => return Err(Error::Parse("grid does not serialize to a table".into())),
        };
        for (k, v) in overrides {
            if !table.contains_key(k) {
                return Err(Error::Parse(format!("unknown grid key `{k}`")));
            }
            table.insert(k.clone(), v.clone());
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::Parse(format!("invalid [grid] section: {e}")))
    }
}

/// Comma-separated penalty list given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid(pub Vec<f64>);

pub fn parse_alpha_grid(s: &str) -> std::result::Result<AlphaGrid, String> {
    let grid: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if grid.is_empty() || grid.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
        return Err("alpha grid needs positive finite values".into());
    }
    Ok(AlphaGrid(grid))
}
