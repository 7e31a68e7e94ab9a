use crate::config::{ConfigError, RunConfig};
use gaussym::sampler::{sample_rearrangement, BoxedFunction, FamilyRegistry};
use gaussym::suite::{run_check, CheckContext, CheckRegistry, InequalityReport, Verdict};
use rayon::prelude::*;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Check { context: String, source: gaussym::Error },
    #[error("cannot write {path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl RunError {
    /// 2 for configuration errors, 3 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// One built family member in one dimension.
#[derive(Debug, Clone)]
pub struct Member {
    pub function: BoxedFunction,
    pub dim: usize,
}

/// Builds every family member in every configured dimension, in config
/// order. Parameter values the family rejects are configuration errors.
pub fn build_members(cfg: &RunConfig, families: &FamilyRegistry) -> Result<Vec<Member>, ConfigError> {
    let mut out = Vec::new();
    for spec in &cfg.families {
        for params in spec.expand() {
            for &dim in &cfg.dims {
                let function = families.build(&spec.name, &params, dim).map_err(|e| ConfigError::Invalid {
                    key: "families".into(),
                    msg: format!("{spec}: {e}"),
                })?;
                out.push(Member { function, dim });
            }
        }
    }
    Ok(out)
}

/// Number of summary rows a config produces.
pub fn expected_rows(cfg: &RunConfig) -> usize {
    let members: usize = cfg.families.iter().map(|f| f.expand().len()).sum();
    cfg.checks.len() * members * cfg.dims.len() * cfg.seeds.len()
}

fn context(cfg: &RunConfig, seed: u64) -> CheckContext {
    CheckContext {
        n_samples: cfg.n_samples,
        seed,
        grid_size: cfg.grid_size,
        window: cfg.window,
        p: cfg.p,
        ls_p: cfg.ls_p,
        caps: cfg.caps.clone(),
    }
}

/// Runs every (check, member, seed) combination. Each (member, seed) pair
/// shares one sample across its checks; pairs run in parallel. Reports come
/// back ordered by check, then family member, then dimension, then seed.
pub fn execute(cfg: &RunConfig, families: &FamilyRegistry) -> Result<Vec<InequalityReport>, RunError> {
    cfg.validate(families)?;
    let members = build_members(cfg, families)?;
    if cfg.checks.is_empty() {
        return Ok(Vec::new());
    }
    let needs_sample = cfg.checks.iter().any(|id| CheckRegistry.get(id).is_some_and(|c| c.needs_sample));
    let pairs: Vec<(usize, usize)> =
        (0..members.len()).flat_map(|m| (0..cfg.seeds.len()).map(move |s| (m, s))).collect();

    let results: Vec<Vec<(usize, usize, usize, InequalityReport)>> = pairs
        .par_iter()
        .map(|&(mi, si)| {
            let member = &members[mi];
            let seed = cfg.seeds[si];
            let ctx = context(cfg, seed);
            let f = &member.function;
            let sample = if needs_sample {
                Some(sample_rearrangement(f.as_ref(), cfg.n_samples, seed).map_err(|source| RunError::Check {
                    context: format!("sampling {} (n={}, seed={seed})", f.id(), member.dim),
                    source,
                })?)
            } else {
                None
            };
            cfg.checks
                .iter()
                .enumerate()
                .map(|(ci, id)| {
                    let mut r = run_check(id, f, sample.as_ref(), &ctx).map_err(|source| RunError::Check {
                        context: format!("{id} on {} (n={}, seed={seed})", f.id(), member.dim),
                        source,
                    })?;
                    if let Some(&floor) = cfg.tolerances.get(id) {
                        r = r.with_tolerance_floor(floor);
                    }
                    Ok((ci, mi, si, r))
                })
                .collect()
        })
        .collect::<Result<_, RunError>>()?;

    let mut flat: Vec<(usize, usize, usize, InequalityReport)> = results.into_iter().flatten().collect();
    flat.sort_by_key(|(c, m, s, _)| (*c, *m, *s));
    Ok(flat.into_iter().map(|(.., r)| r).collect())
}

pub fn count_violations(reports: &[InequalityReport]) -> usize {
    reports.iter().filter(|r| r.verdict == Verdict::Violated).count()
}
