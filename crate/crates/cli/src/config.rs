//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! checks      = ledoux, talenti
//! families    = F1{a=1}, F2{a=0.25|0.5|1}, F3{r=0;delta=0.1|0.25}, const
//! dims        = [1, 2, 4, 8]
//! n_samples   = 100000
//! grid_size   = 256
//! seeds       = 0, 1, 2
//! tolerance.talenti = 1e-3
//! cap.feissner = 1.2
//! output_dir  = out
//! format      = both
//! ```
//!
//! Lists are comma separated, optionally in brackets. `all` selects every
//! registered check or family. Inside braces `;` separates parameters and
//! `|` separates the values of one parameter; the family expands to the
//! Cartesian product.

use gaussym::sampler::{FamilyRegistry, CATALOG_DIMS};
use gaussym::suite::CheckRegistry;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub const MIN_N_SAMPLES: usize = 1000;
pub const MIN_GRID_SIZE: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key {0}")]
    UnknownKey(String),
    #[error("duplicate key {0}")]
    DuplicateKey(String),
    #[error("unknown check {0}")]
    UnknownCheck(String),
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("invalid value for {key}: {msg}")]
    Invalid { key: String, msg: String },
    #[error("cannot read {path}: {msg}")]
    Read { path: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("expected csv, json or both, got {other}")),
        }
    }
}

/// One family with a grid of parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub name: String,
    /// Parameter name to candidate values, in the order written.
    pub grid: Vec<(String, Vec<f64>)>,
}

impl FamilySpec {
    /// Every parameter combination, last parameter varying fastest.
    pub fn expand(&self) -> Vec<BTreeMap<String, f64>> {
        let mut out = vec![BTreeMap::new()];
        for (key, values) in &self.grid {
            out = out
                .into_iter()
                .flat_map(|m| {
                    values.iter().map(move |v| {
                        let mut m = m.clone();
                        m.insert(key.clone(), *v);
                        m
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.grid.is_empty() {
            return Ok(());
        }
        let parts: Vec<String> = self
            .grid
            .iter()
            .map(|(k, vs)| format!("{k}={}", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("|")))
            .collect();
        write!(f, "{{{}}}", parts.join(";"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub checks: Vec<String>,
    pub families: Vec<FamilySpec>,
    pub dims: Vec<usize>,
    pub n_samples: usize,
    pub grid_size: usize,
    pub seeds: Vec<u64>,
    /// Minimum tolerance per check id.
    pub tolerances: BTreeMap<String, f64>,
    /// Ratio caps per check id.
    pub caps: BTreeMap<String, f64>,
    /// Exponent of the Feissner and dual Poincaré ratios.
    pub p: f64,
    /// Exponent of the `LS_Lp` ratio.
    pub ls_p: f64,
    pub window: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    /// Every check and default family in the catalog dimensions, seed 0.
    pub fn default_suite(families: &FamilyRegistry) -> Self {
        Self {
            checks: CheckRegistry.ids().iter().map(|s| s.to_string()).collect(),
            families: families.names().into_iter().map(|name| FamilySpec { name, grid: Vec::new() }).collect(),
            dims: CATALOG_DIMS.to_vec(),
            n_samples: 100_000,
            grid_size: 256,
            seeds: vec![0],
            tolerances: BTreeMap::new(),
            caps: BTreeMap::new(),
            p: 2.0,
            ls_p: 2.0,
            window: None,
            output_dir: None,
            format: OutputFormat::Both,
        }
    }

    pub fn from_file(path: &Path, families: &FamilyRegistry) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), msg: e.to_string() })?;
        Self::parse(&text, families)
    }

    /// Parses and validates a configuration. Keys left out keep the values
    /// of [`RunConfig::default_suite`].
    pub fn parse(text: &str, families: &FamilyRegistry) -> Result<Self, ConfigError> {
        let mut cfg = Self::default_suite(families);
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, msg: format!("expected key = value, got {line:?}") })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(ConfigError::DuplicateKey(key.into()));
            }
            seen.push(key.to_string());
            cfg.set(key, value, families)?;
        }
        cfg.validate(families)?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, families: &FamilyRegistry) -> Result<(), ConfigError> {
        match key {
            "checks" => {
                let items = split_list(value);
                self.checks = if items == ["all"] {
                    CheckRegistry.ids().iter().map(|s| s.to_string()).collect()
                } else {
                    items
                };
            }
            "families" => {
                let items = split_list(value);
                self.families = if items == ["all"] {
                    families.names().into_iter().map(|name| FamilySpec { name, grid: Vec::new() }).collect()
                } else {
                    items.iter().map(|s| parse_family(s)).collect::<Result<_, _>>()?
                };
            }
            "dims" => self.dims = parse_items(key, value)?,
            "seeds" => self.seeds = parse_items(key, value)?,
            "n_samples" => self.n_samples = parse_one(key, value)?,
            "grid_size" => self.grid_size = parse_one(key, value)?,
            "p" => self.p = parse_one(key, value)?,
            "ls_p" => self.ls_p = parse_one(key, value)?,
            "window" => self.window = Some(parse_one(key, value)?),
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            "format" => {
                self.format = value.parse().map_err(|msg| ConfigError::Invalid { key: key.into(), msg })?;
            }
            _ => {
                if let Some(id) = key.strip_prefix("tolerance.") {
                    self.tolerances.insert(id.to_string(), parse_one(key, value)?);
                } else if let Some(id) = key.strip_prefix("cap.") {
                    self.caps.insert(id.to_string(), parse_one(key, value)?);
                } else {
                    return Err(ConfigError::UnknownKey(key.into()));
                }
            }
        }
        Ok(())
    }

    /// Checks every id against the registries and the numeric bounds.
    pub fn validate(&self, families: &FamilyRegistry) -> Result<(), ConfigError> {
        let invalid = |key: &str, msg: String| ConfigError::Invalid { key: key.into(), msg };
        for id in self.checks.iter().chain(self.tolerances.keys()).chain(self.caps.keys()) {
            if CheckRegistry.get(id).is_none() {
                return Err(ConfigError::UnknownCheck(id.clone()));
            }
        }
        for fam in &self.families {
            let builder = families.get(&fam.name).ok_or_else(|| ConfigError::UnknownFamily(fam.name.clone()))?;
            for (k, vs) in &fam.grid {
                if !builder.defaults.iter().any(|(d, _)| d == k) {
                    return Err(invalid("families", format!("family {} has no parameter {k}", fam.name)));
                }
                if vs.is_empty() {
                    return Err(invalid("families", format!("no values for {}.{k}", fam.name)));
                }
            }
        }
        if self.n_samples < MIN_N_SAMPLES {
            return Err(invalid("n_samples", format!("{} < {MIN_N_SAMPLES}", self.n_samples)));
        }
        if self.grid_size < MIN_GRID_SIZE {
            return Err(invalid("grid_size", format!("{} < {MIN_GRID_SIZE}", self.grid_size)));
        }
        if self.dims.contains(&0) {
            return Err(invalid("dims", "dimensions must be at least 1".into()));
        }
        for (key, v) in [("p", self.p), ("ls_p", self.ls_p)] {
            if !v.is_finite() || v < 1.0 {
                return Err(invalid(key, format!("exponent must be a finite number >= 1, got {v}")));
            }
        }
        if let Some(w) = self.window {
            if w == 0 || w > self.n_samples {
                return Err(invalid("window", format!("{w} outside 1..={}", self.n_samples)));
            }
        }
        for (id, t) in &self.tolerances {
            if !t.is_finite() || *t < 0.0 {
                return Err(invalid(&format!("tolerance.{id}"), format!("{t} is not a nonnegative number")));
            }
        }
        for (id, c) in &self.caps {
            if !c.is_finite() {
                return Err(invalid(&format!("cap.{id}"), format!("{c} is not finite")));
            }
        }
        Ok(())
    }
}

/// Splits on commas outside braces; drops surrounding brackets.
fn split_list(value: &str) -> Vec<String> {
    let v = value.trim();
    let v = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(v);
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in v.chars() {
        match c {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| ConfigError::Invalid { key: key.into(), msg: format!("{value:?}: {e}") })
}

fn parse_items<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    split_list(value).iter().map(|s| parse_one(key, s)).collect()
}

/// `F2`, `F2{a=0.25|0.5}` or `F3{r=0;delta=0.1|0.25}`.
pub fn parse_family(s: &str) -> Result<FamilySpec, ConfigError> {
    let invalid = |msg: String| ConfigError::Invalid { key: "families".into(), msg };
    let s = s.trim();
    let Some(open) = s.find('{') else {
        if s.contains('}') {
            return Err(invalid(format!("unbalanced braces in {s:?}")));
        }
        return Ok(FamilySpec { name: s.to_string(), grid: Vec::new() });
    };
    let body = s[open + 1..].strip_suffix('}').ok_or_else(|| invalid(format!("unbalanced braces in {s:?}")))?;
    let name = s[..open].trim().to_string();
    let mut grid: Vec<(String, Vec<f64>)> = Vec::new();
    for part in body.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, vs) = part.split_once('=').ok_or_else(|| invalid(format!("expected name=values in {part:?}")))?;
        let k = k.trim().to_string();
        if grid.iter().any(|(g, _)| *g == k) {
            return Err(invalid(format!("parameter {k} repeated in {s:?}")));
        }
        let values = vs
            .split('|')
            .map(|v| v.trim().parse::<f64>().map_err(|e| invalid(format!("{v:?} in {s:?}: {e}"))))
            .collect::<Result<Vec<f64>, _>>()?;
        grid.push((k, values));
    }
    Ok(FamilySpec { name, grid })
}
