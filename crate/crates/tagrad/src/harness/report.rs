//! Artifact emission: aggregate-curve CSV per method and a campaign summary
//! JSON. All floats are written with 17 significant digits so emitted files
//! are byte-stable and parse back to the exact same values.

use crate::harness::campaign::{AggregateCurve, CampaignResult};
use crate::integrator::Outcome;
use serde_json::json;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report io failed for {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("curve csv line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Decimal float with 17 significant digits, the round-trip precision of
/// f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CURVE_HEADER: &str = "iter,mean_E,min_E,max_E,frac_converged";

pub fn curve_to_csv(curve: &AggregateCurve) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for t in 0..curve.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            t,
            fmt17(curve.mean_e[t]),
            fmt17(curve.min_e[t]),
            fmt17(curve.max_e[t]),
            fmt17(curve.frac_converged[t]),
        ));
    }
    out
}

/// Parses the CSV columns back. Only the per-iteration columns exist in the
/// file, so the scalar summary fields of the result are NaN.
pub fn parse_curve_csv(text: &str) -> Result<AggregateCurve, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CURVE_HEADER => {}
        other => {
            return Err(ReportError::Parse {
                line: 1,
                message: format!("expected header {CURVE_HEADER:?}, got {other:?}"),
            })
        }
    }
    let mut curve = AggregateCurve {
        median_converge_iter: f64::NAN,
        mean_wall_clock: f64::NAN,
        ..AggregateCurve::default()
    };
    for (idx, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| ReportError::Parse {
            line: idx + 1,
            message,
        };
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 {
            return Err(parse_err(format!("expected 5 columns, got {}", cells.len())));
        }
        let iter: usize = cells[0]
            .parse()
            .map_err(|e| parse_err(format!("bad iter: {e}")))?;
        if iter != curve.mean_e.len() {
            return Err(parse_err(format!(
                "iterations must be contiguous, expected {}",
                curve.mean_e.len()
            )));
        }
        let mut nums = cells[1..].iter().map(|c| c.parse::<f64>());
        let mut next = |name: &str| {
            nums.next()
                .unwrap()
                .map_err(|e| parse_err(format!("bad {name}: {e}")))
        };
        curve.mean_e.push(next("mean_E")?);
        curve.min_e.push(next("min_E")?);
        curve.max_e.push(next("max_E")?);
        curve.frac_converged.push(next("frac_converged")?);
    }
    curve.frac_converged_final = *curve.frac_converged.last().unwrap_or(&0.0);
    Ok(curve)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn emit_csv(path: &Path, curve: &AggregateCurve) -> Result<(), ReportError> {
    std::fs::write(path, curve_to_csv(curve)).map_err(io_err(path))
}

/// One JSON entry per (method, seed): outcome, convergence iteration at the
/// configured stop energy, final energy, wall clock, and safeguard count.
pub fn summary_json(result: &CampaignResult) -> serde_json::Value {
    let mut entries = Vec::new();
    for method in &result.methods {
        for (seed, record) in method.records.iter().enumerate() {
            let (outcome, outcome_iter) = match record.outcome {
                Outcome::Converged(k) => ("converged", Some(k)),
                Outcome::MaxIters => ("max_iters", None),
                Outcome::Diverged(k) => ("diverged", Some(k)),
            };
            entries.push(json!({
                "method": method.label,
                "seed": seed,
                "outcome": outcome,
                "outcome_iter": outcome_iter,
                "converge_iter": record.converge_iter(record.config.stop_energy),
                "final_energy": record.final_energy(),
                "iterations": record.points.len().saturating_sub(1),
                "wall_clock_seconds": record.wall_clock_total,
                "clamp_events": record.clamp_events(),
            }));
        }
    }
    serde_json::Value::Array(entries)
}

pub fn emit_summary(path: &Path, result: &CampaignResult) -> Result<(), ReportError> {
    let mut text = serde_json::to_string_pretty(&summary_json(result)).expect("json serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

/// Filesystem-safe method label: lowercase alphanumerics with single dashes.
pub fn label_slug(label: &str) -> String {
    let mut slug = String::new();
    for c in label.to_lowercase().chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('-') && !slug.is_empty() {
            slug.push('-');
        }
    }
    slug.trim_end_matches('-').to_string()
}

/// Writes `<index>-<slug>.csv` per method plus `summary.json` under `dir`,
/// returning the paths written.
pub fn emit_campaign(dir: &Path, result: &CampaignResult) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (idx, method) in result.methods.iter().enumerate() {
        let path = dir.join(format!("{:02}-{}.csv", idx, label_slug(&method.label)));
        emit_csv(&path, &method.curve)?;
        written.push(path);
    }
    let summary = dir.join("summary.json");
    emit_summary(&summary, result)?;
    written.push(summary);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::campaign::run_campaign;
    use crate::integrator::{Method, OptConfig};
    use crate::objectives::Quadratic;
    use crate::rate::LrRule;

    fn small_campaign() -> CampaignResult {
        let objective = Quadratic::one_d(1.0, 1.0);
        let methods = vec![
            ("fixed".to_string(), Method::Rule(LrRule::fixed(0.25))),
            ("ta".to_string(), Method::Rule(LrRule::ta(1.0, 3.0, 1.0))),
        ];
        run_campaign(&objective, &methods, &OptConfig::new(1.0, 15, 1e-8), 3)
    }

    #[test]
    fn fmt17_round_trips_exactly() {
        for &x in &[0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, 1.5] {
            let parsed: f64 = fmt17(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn empty_curve_is_header_only() {
        let csv = curve_to_csv(&AggregateCurve::default());
        assert_eq!(csv, "iter,mean_E,min_E,max_E,frac_converged\n");
        let parsed = parse_curve_csv(&csv).unwrap();
        assert!(parsed.is_empty());
    }

    #[test]
    fn curve_csv_round_trips_byte_identically() {
        let result = small_campaign();
        for method in &result.methods {
            let csv = curve_to_csv(&method.curve);
            let parsed = parse_curve_csv(&csv).unwrap();
            assert_eq!(curve_to_csv(&parsed), csv);
            assert_eq!(parsed.mean_e, method.curve.mean_e);
            assert_eq!(parsed.frac_converged, method.curve.frac_converged);
        }
    }

    #[test]
    fn parse_rejects_malformed_curves() {
        assert!(parse_curve_csv("nope\n").is_err());
        assert!(parse_curve_csv("iter,mean_E,min_E,max_E,frac_converged\n0,1,2\n").is_err());
        assert!(
            parse_curve_csv("iter,mean_E,min_E,max_E,frac_converged\n5,1,2,3,4\n").is_err(),
            "non-contiguous iters"
        );
    }

    #[test]
    fn summary_has_one_entry_per_method_seed() {
        let result = small_campaign();
        let value = summary_json(&result);
        let entries = value.as_array().unwrap();
        assert_eq!(entries.len(), 6);
        assert_eq!(entries[0]["method"], "fixed");
        assert_eq!(entries[0]["seed"], 0);
        assert_eq!(entries[0]["outcome"], "converged");
        assert!(entries[0]["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    }

    #[test]
    fn slugs_are_filesystem_safe() {
        assert_eq!(label_slug("pfta(alpha=0.03,q/p=0.65)"), "pfta-alpha-0-03-q-p-0-65");
        assert_eq!(label_slug("SGD"), "sgd");
        assert_eq!(label_slug("((x))"), "x");
    }

    #[test]
    fn emit_campaign_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let result = small_campaign();
        let written = emit_campaign(dir.path(), &result).unwrap();
        assert_eq!(written.len(), 3);
        assert!(written[0].file_name().unwrap() == "00-fixed.csv");
        assert!(written[2].file_name().unwrap() == "summary.json");
        for path in &written {
            assert!(path.exists());
        }
    }
}
