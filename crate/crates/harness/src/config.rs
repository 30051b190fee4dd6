//! Key-value run configuration and user coefficient tables.
//!
//! A config file mirrors the command-line flags; flags given on the command
//! line win over the file.
//!
//! ```toml
//! problem = "ex1"
//! scheme = "MaStBM4+BM4"
//! steps = 400
//! t_final = 1.0
//!
//! [tables.BM4]
//! order = 4
//! stages = ["T 0.0792036964311957", "W 0.209515106613362", "..."]
//!
//! [converge]
//! schemes = ["S2+OMF76", "S3+OMF85@11"]
//! steps = [25, 50, 100, 200]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use laser_magnus::{Overrides, Scheme, SplitScheme};
use serde::Deserialize;

use crate::error::{HarnessError, Result};

/// A user-supplied inner splitting.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub order: u32,
    /// Stage strings `"T a"`, `"W b"` or `"WU b c"` in application order.
    pub stages: Vec<String>,
}

/// A field sampled at equispaced times, read from a text file.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldFileConfig {
    pub path: PathBuf,
    /// Interpolation degree, 5 when absent.
    pub degree: Option<usize>,
    /// Polarization of a two-column file on a grid of more than one axis.
    pub direction: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    #[serde(default)]
    pub schemes: Vec<String>,
    #[serde(default)]
    pub steps: Vec<usize>,
    /// Scheme of the fine reference run, `S2+OMF85` when absent.
    pub reference: Option<String>,
    /// Reference steps per finest-run step, 8 when absent.
    pub reference_factor: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: Option<String>,
    pub scheme: Option<String>,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub knots: Option<usize>,
    /// Grid points per axis.
    pub grid: Option<usize>,
    pub t_final: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub field_scale: Option<f64>,
    pub absorber_strength: Option<f64>,
    pub field: Option<FieldFileConfig>,
    pub converge: Option<ConvergeConfig>,
    #[serde(default)]
    pub tables: BTreeMap<String, TableConfig>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Request(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut config = Self::parse(&text).map_err(|e| HarnessError::Request(format!("{}: {e}", path.display())))?;
        // Relative field paths are relative to the config file.
        if let (Some(field), Some(dir)) = (config.field.as_mut(), path.parent()) {
            if field.path.is_relative() {
                field.path = dir.join(&field.path);
            }
        }
        Ok(config)
    }

    /// `self` with every value set in `flags` replaced by the flag.
    pub fn overridden_by(self, flags: Config) -> Config {
        let mut tables = self.tables;
        tables.extend(flags.tables);
        Config {
            problem: flags.problem.or(self.problem),
            scheme: flags.scheme.or(self.scheme),
            // A step count or a step size on the command line replaces both.
            steps: if flags.steps.is_some() || flags.dt.is_some() { flags.steps } else { self.steps },
            dt: if flags.steps.is_some() || flags.dt.is_some() { flags.dt } else { self.dt },
            knots: flags.knots.or(self.knots),
            grid: flags.grid.or(self.grid),
            t_final: flags.t_final.or(self.t_final),
            out: flags.out.or(self.out),
            threads: flags.threads.or(self.threads),
            field_scale: flags.field_scale.or(self.field_scale),
            absorber_strength: flags.absorber_strength.or(self.absorber_strength),
            field: flags.field.or(self.field),
            converge: flags.converge.or(self.converge),
            tables,
        }
    }

    pub fn overrides(&self) -> Overrides {
        Overrides {
            points: self.grid,
            t_final: self.t_final,
            knots: self.knots,
            steps: self.steps,
            field_scale: self.field_scale,
            absorber_strength: self.absorber_strength,
        }
    }

    pub fn table_set(&self) -> Result<TableSet> {
        TableSet::new(&self.tables)
    }
}

/// Shipped tables plus the validated user tables.
#[derive(Clone, Debug, Default)]
pub struct TableSet {
    user: BTreeMap<String, SplitScheme>,
}

impl TableSet {
    pub fn new(tables: &BTreeMap<String, TableConfig>) -> Result<Self> {
        let user = tables
            .iter()
            .map(|(name, t)| Ok((name.clone(), SplitScheme::parse(name.clone(), &t.stages, t.order)?)))
            .collect::<Result<_>>()?;
        Ok(Self { user })
    }

    pub fn insert(&mut self, table: SplitScheme) {
        self.user.insert(table.name.clone(), table);
    }

    /// User tables shadow the shipped ones.
    pub fn lookup(&self, name: &str) -> laser_magnus::Result<SplitScheme> {
        match self.user.get(name) {
            Some(t) => Ok(t.clone()),
            None => SplitScheme::builtin(name),
        }
    }
}

/// A scheme string with an optional `@k` knot count, as in `S2+OMF85@11`.
#[derive(Clone, Debug)]
pub struct SchemeSpec {
    pub text: String,
    pub scheme: Scheme,
    pub knots: Option<usize>,
}

impl SchemeSpec {
    pub fn parse(text: &str, tables: &TableSet) -> Result<Self> {
        let (body, knots) = match text.split_once('@') {
            Some((body, k)) => {
                let k = k
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k > 0)
                    .ok_or_else(|| HarnessError::Request(format!("'{text}': knot count '{k}' is not a positive integer")))?;
                (body, Some(k))
            }
            None => (text, None),
        };
        let scheme = Scheme::parse(body, |name| tables.lookup(name))?;
        Ok(Self {
            text: text.to_string(),
            scheme,
            knots,
        })
    }

    /// Knots of this scheme, falling back to the problem's.
    pub fn knots_or(&self, default: usize) -> usize {
        self.knots.unwrap_or(default)
    }
}
