//! Monte-Carlo experiments, configuration, output and the command line.
//!
//! [`run`] executes one experiment and writes its files into the configured
//! output directory:
//!
//! | subcommand        | files                                   |
//! |-------------------|-----------------------------------------|
//! | `coverage`        | `coverage.json`                         |
//! | `supermartingale` | `supermartingale.csv`, `supermartingale.json` |
//! | `tightness`       | `tightness.csv`                         |
//! | `bandit`          | `coverage.json`, `bandit.json`          |
//! | `online`          | `online.csv`, `online.json`             |
//! | `batch`           | `batch_monitor.csv`, `batch.json`       |

pub mod cli;
pub mod config;
pub mod coverage;
pub mod experiments;
pub mod output;

use thiserror::Error;

pub use cli::cli_main;
pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use coverage::{run_coverage, CoverageReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl From<crate::Error> for HarnessError {
    fn from(e: crate::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

/// Validates `config` for `kind`, runs it, writes outputs and returns a one-line summary.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<String, HarnessError> {
    config.validate(kind)?;
    let dir = config.output.as_path();
    output::ensure_dir(dir)?;
    let summary = match kind {
        ExperimentKind::Coverage => {
            let r = run_coverage(config)?;
            output::write_json(&dir.join("coverage.json"), &r)?;
            format!(
                "coverage[{}/{}]: {}/{} violations (freq {:.4}, limit {:.4}) {}",
                r.target,
                r.posterior_set,
                r.violations_anytime,
                r.trials,
                r.violation_freq,
                r.limit,
                if r.within_limit { "ok" } else { "EXCEEDED" }
            )
        }
        ExperimentKind::Supermartingale => {
            let (report, rows) = experiments::run_supermartingale(config)?;
            output::write_csv(&dir.join("supermartingale.csv"), &experiments::SUPERMARTINGALE_HEADER, &rows)?;
            output::write_json(&dir.join("supermartingale.json"), &report)?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            format!("supermartingale: {} checks, {} with mean above 1 + 3 stderr", report.checks.len(), failed)
        }
        ExperimentKind::Tightness => {
            let rows = experiments::run_tightness(config)?;
            let records: Vec<Vec<String>> = rows.iter().map(experiments::TightnessRow::to_record).collect();
            output::write_csv(&dir.join("tightness.csv"), &experiments::TIGHTNESS_HEADER, &records)?;
            format!("tightness: {} rows", rows.len())
        }
        ExperimentKind::Bandit => {
            let (coverage, report) = experiments::run_bandit(config)?;
            output::write_json(&dir.join("coverage.json"), &coverage)?;
            output::write_json(&dir.join("bandit.json"), &report)?;
            format!(
                "bandit: {}/{} uncovered (bound {:.6}), lemma5 max ratio {:.6}, lemma6 freq {:.4}",
                report.coverage_violations,
                report.trials,
                report.certificate.value,
                report.lemma5_max_ratio,
                report.lemma6_freq
            )
        }
        ExperimentKind::Online => {
            let (report, rows) = experiments::run_online(config)?;
            output::write_csv(&dir.join("online.csv"), &experiments::ONLINE_HEADER, &rows)?;
            output::write_json(&dir.join("online.json"), &report)?;
            format!(
                "online: {} steps, certificate {:.6}, cumulative risk {:.6}",
                report.horizon, report.certificate.value, report.cumulative_risk
            )
        }
        ExperimentKind::Batch => {
            let (report, rows) = experiments::run_batch(config)?;
            output::write_csv(&dir.join("batch_monitor.csv"), &experiments::MONITOR_HEADER, &rows)?;
            output::write_json(&dir.join("batch.json"), &report)?;
            format!(
                "batch: m = {}, certificate {:.6}, E_Q[R] = {:.6}",
                report.m, report.certificate.value, report.risk_q
            )
        }
    };
    Ok(summary)
}
