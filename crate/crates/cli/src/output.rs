use crate::runner::RunError;
use gaussym::suite::{Comparison, InequalityReport};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const JSON_DIR: &str = "json";

/// Summary columns, in order.
pub const SUMMARY_COLUMNS: [&str; 11] = [
    "inequality_id",
    "function_id",
    "dim",
    "n_samples",
    "grid_size",
    "seed",
    "lhs_summary",
    "rhs_summary",
    "worst_margin",
    "tolerance",
    "verdict",
];

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    inequality_id: &'a str,
    function_id: &'a str,
    dim: usize,
    n_samples: usize,
    grid_size: usize,
    seed: u64,
    lhs_summary: f64,
    rhs_summary: f64,
    worst_margin: f64,
    tolerance: f64,
    verdict: &'static str,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> RunError + '_ {
    move |e| RunError::Io { path: path.to_path_buf(), msg: e.to_string() }
}

/// Summary CSV bytes: a header row, then one row per report.
pub fn summary_csv(reports: &[InequalityReport]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SUMMARY_COLUMNS).expect("in-memory write");
    for r in reports {
        w.serialize(SummaryRow {
            inequality_id: &r.inequality_id,
            function_id: &r.function_id,
            dim: r.dim,
            n_samples: r.n_samples,
            grid_size: r.grid_size,
            seed: r.seed,
            lhs_summary: r.lhs_summary,
            rhs_summary: r.rhs_summary,
            worst_margin: r.worst_margin,
            tolerance: r.tolerance,
            verdict: r.verdict.as_str(),
        })
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Keeps at most `cap` comparisons, evenly spaced, always including the
/// worst one and every scalar.
pub fn subsample(points: &[Comparison], cap: usize, worst: Option<usize>) -> Vec<Comparison> {
    let curve: Vec<usize> = (0..points.len()).filter(|&i| points[i].t.is_some()).collect();
    let mut keep: Vec<usize> = (0..points.len()).filter(|&i| points[i].t.is_none()).collect();
    if curve.len() <= cap || cap < 2 {
        keep.extend(&curve);
    } else {
        let m = curve.len() - 1;
        keep.extend((0..cap).map(|j| curve[j * m / (cap - 1)]));
    }
    keep.extend(worst);
    keep.sort_unstable();
    keep.dedup();
    keep.into_iter().map(|i| points[i].clone()).collect()
}

fn worst_index(r: &InequalityReport) -> Option<usize> {
    r.points.iter().position(|c| c.label == r.worst_label && c.t == r.worst_t && c.lhs == r.lhs_summary)
}

/// JSON text of every report of one check, curves capped at `grid_size`.
pub fn check_json(reports: &[&InequalityReport], grid_size: usize) -> String {
    let trimmed: Vec<InequalityReport> = reports
        .iter()
        .map(|r| {
            let mut r = (*r).clone();
            r.points = subsample(&r.points, grid_size, worst_index(&r));
            r
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&trimmed).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `contents` to a temporary sibling and renames it into place, so an
/// interrupted run never leaves a truncated file behind.
fn write_file(path: &Path, contents: &[u8]) -> Result<(), RunError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(contents).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Writes the summary CSV and/or one JSON file per check id. Returns the
/// paths written.
pub fn write_reports(
    dir: &Path,
    reports: &[InequalityReport],
    checks: &[String],
    grid_size: usize,
    csv: bool,
    json: bool,
) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    if csv {
        let path = dir.join(SUMMARY_FILE);
        write_file(&path, &summary_csv(reports))?;
        written.push(path);
    }
    if json {
        let jdir = dir.join(JSON_DIR);
        fs::create_dir_all(&jdir).map_err(io_err(&jdir))?;
        let mut by_check: BTreeMap<&str, Vec<&InequalityReport>> = BTreeMap::new();
        for r in reports {
            by_check.entry(r.inequality_id.as_str()).or_default().push(r);
        }
        for id in checks {
            let group = by_check.remove(id.as_str()).unwrap_or_default();
            let path = jdir.join(format!("{id}.json"));
            write_file(&path, check_json(&group, grid_size).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(t: Option<f64>, lhs: f64) -> Comparison {
        Comparison { label: "c".into(), t, lhs, rhs: 1.0, tolerance: 0.1 }
    }

    #[test]
    fn header_only_for_no_reports() {
        let bytes = summary_csv(&[]);
        assert_eq!(String::from_utf8(bytes).unwrap(), SUMMARY_COLUMNS.join(",") + "\n");
    }

    #[test]
    fn one_header_then_rows() {
        let r = gaussym::suite::ReportBuilder::new("ledoux", "F1{a=1}", 2).samples(1000, 4).grid(64).finish();
        let text = String::from_utf8(summary_csv(&[r.clone(), r])).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], SUMMARY_COLUMNS.join(","));
        assert!(lines[1].starts_with("ledoux,F1{a=1},2,1000,64,4,"));
        assert!(lines[1].ends_with(",holds"));
    }

    #[test]
    fn subsample_keeps_worst_and_scalars() {
        let mut pts: Vec<Comparison> = (0..1000).map(|i| comp(Some(i as f64), 0.0)).collect();
        pts.push(comp(None, 0.5));
        let out = subsample(&pts, 64, Some(501));
        assert!(out.len() <= 64 + 2);
        assert!(out.iter().any(|c| c.t == Some(501.0)));
        assert!(out.iter().any(|c| c.t.is_none()));
        assert_eq!(out.first().unwrap().t, Some(0.0));
        assert!(out.iter().any(|c| c.t == Some(999.0)));
        assert_eq!(subsample(&pts[..10], 64, None).len(), 10);
    }
}
