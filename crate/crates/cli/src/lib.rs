//! Batch runner for the gaussym inequality suite: parses a run
//! configuration, runs the selected checks over the family catalog and
//! writes a summary CSV and per-check JSON reports.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{ConfigError, FamilySpec, OutputFormat, RunConfig};
pub use runner::{build_members, count_violations, execute, expected_rows, RunError};

use gaussym::sampler::FamilyRegistry;
use gaussym::suite::{CheckRegistry, InequalityReport};
use std::ffi::OsString;
use std::path::PathBuf;

/// Environment variable holding the default output directory.
pub const OUT_ENV: &str = "GAUSSYM_OUT";
pub const DEFAULT_OUT_DIR: &str = "gaussym-out";

/// Every check with its anchor, then every family with its default
/// parameters. Both sections are sorted.
pub fn list_catalog(families: &FamilyRegistry) -> Vec<String> {
    let mut out = vec!["checks:".to_string()];
    out.extend(CheckRegistry.listing().into_iter().map(|l| format!("  {l}")));
    out.push("families:".into());
    for b in families.iter() {
        let params = if b.defaults.is_empty() {
            String::new()
        } else {
            let kv: Vec<String> = b.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{{{}}}", kv.join(";"))
        };
        out.push(format!("  {}{params}  {}", b.name, b.description));
    }
    out
}

/// `--out`, then the config's `output_dir`, then the environment, then
/// [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(cli: Option<PathBuf>, cfg: Option<PathBuf>, env: Option<OsString>) -> PathBuf {
    cli.or(cfg)
        .or_else(|| env.filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed_override: Option<u64>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub reports: Vec<InequalityReport>,
    pub violations: usize,
    pub out_dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl RunSummary {
    /// 0 when nothing is violated, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.violations > 0)
    }
}

/// Applies the command-line overrides, runs the configuration and writes
/// the reports.
pub fn run(mut cfg: RunConfig, families: &FamilyRegistry, opts: &RunOptions) -> Result<RunSummary, RunError> {
    if let Some(seed) = opts.seed_override {
        cfg.seeds = vec![seed];
    }
    if let Some(f) = opts.format {
        cfg.format = f;
    }
    let out_dir = resolve_out_dir(opts.out_dir.clone(), cfg.output_dir.clone(), std::env::var_os(OUT_ENV));
    let reports = execute(&cfg, families)?;
    let written = output::write_reports(&out_dir, &reports, &cfg.checks, cfg.grid_size, cfg.format.csv(), cfg.format.json())?;
    Ok(RunSummary { violations: count_violations(&reports), reports, out_dir, written })
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaussym::sampler::{Constant, FamilyBuilder};
    use std::sync::Arc;

    #[test]
    fn listing_contents() {
        let reg = FamilyRegistry::with_defaults();
        let lines = list_catalog(&reg);
        assert!(lines.iter().any(|l| l.trim() == "ledoux (eq. ledo)"));
        assert!(lines.iter().any(|l| l.trim() == "oscillation (eq. rea)"));
        assert!(lines.iter().any(|l| l.trim_start().starts_with("F2{a=0.5}")));
        assert_eq!(lines, list_catalog(&reg));
    }

    #[test]
    fn custom_family_grows_listing() {
        let mut reg = FamilyRegistry::with_defaults();
        let before = list_catalog(&reg).len();
        reg.register(FamilyBuilder::new("zz", "constant two", &[], |_, dim| Ok(Arc::new(Constant { c: 2.0, dim }))));
        assert_eq!(list_catalog(&reg).len(), before + 1);
    }

    #[test]
    fn out_dir_precedence() {
        let p = |s: &str| Some(PathBuf::from(s));
        assert_eq!(resolve_out_dir(p("a"), p("b"), Some("c".into())), PathBuf::from("a"));
        assert_eq!(resolve_out_dir(None, p("b"), Some("c".into())), PathBuf::from("b"));
        assert_eq!(resolve_out_dir(None, None, Some("c".into())), PathBuf::from("c"));
        assert_eq!(resolve_out_dir(None, None, Some("".into())), PathBuf::from(DEFAULT_OUT_DIR));
        assert_eq!(resolve_out_dir(None, None, None), PathBuf::from(DEFAULT_OUT_DIR));
    }
}
