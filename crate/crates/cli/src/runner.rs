//! Run orchestration: execute a scenario, write the artifact set
//! (trace.csv, metrics.txt, metadata.txt), and the concurrent parameter
//! sweep built on the same machinery.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mfes_core::metrics::{compute_metrics, RunMetrics};
use mfes_core::scenario::ScenarioConfig;
use mfes_core::sim::{run_simulation, RunOutcome};

use crate::config_file::{from_scenario, RawConfig};
use crate::metadata;
use crate::trace_csv;

#[derive(Debug)]
pub struct RunArtifacts {
    pub outcome: RunOutcome,
    pub metrics: RunMetrics,
    pub trace_path: PathBuf,
}

/// Exit status conventions: 0 completed, 2 validation failure, 3 divergence.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

/// Runs a scenario and writes trace.csv, metrics.txt, metadata.txt and the
/// resolved scenario.cfg into `out_dir`. A diverged run still writes its
/// partial artifacts.
pub fn run_to_dir(config: &ScenarioConfig, out_dir: &Path) -> Result<RunArtifacts> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    let outcome = match run_simulation(config) {
        Ok(o) => o,
        Err(violations) => {
            let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            bail!("scenario validation failed:\n  {}", lines.join("\n  "));
        }
    };
    let metrics = compute_metrics(&outcome.trace, config);

    let trace_path = out_dir.join("trace.csv");
    fs::write(&trace_path, trace_csv::to_csv(&outcome.trace))
        .with_context(|| format!("cannot write {}", trace_path.display()))?;
    fs::write(out_dir.join("metadata.txt"), metadata::render(config, &outcome, &metrics))?;
    fs::write(out_dir.join("scenario.cfg"), from_scenario(config).to_text())?;

    let m = &metrics;
    let metrics_text = format!(
        "first_entry_time = {}\nterminal_oscillation = {}\nterminal_z_band = {}\nmax_abs_e = {}\nswitch_count = {}\n",
        m.first_entry_time.map(|t| t.to_string()).unwrap_or_else(|| "absent".into()),
        m.terminal_oscillation,
        m.terminal_z_band,
        m.max_abs_e,
        m.switch_count,
    );
    fs::write(out_dir.join("metrics.txt"), metrics_text)?;

    Ok(RunArtifacts {
        outcome,
        metrics,
        trace_path,
    })
}

/// One sweep point: the overridden value, run metrics when the run executed,
/// and a status string (completed / diverged / error text).
pub type SweepRow = (String, Option<RunMetrics>, String);

/// Runs the scenario once per value of `param` (a dotted config key),
/// concurrently; each run's artifacts go to `out_dir/<param>=<value>/` and a
/// summary lands in `out_dir/sweep.csv`. Failed runs are marked in the
/// summary without affecting the others.
pub fn sweep(raw: &RawConfig, param: &str, values: &[String], out_dir: &Path) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        bail!("sweep needs a nonempty value list");
    }
    fs::create_dir_all(out_dir)?;

    let results: Vec<SweepRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = values
            .iter()
            .map(|value| {
                let mut raw = raw.clone();
                let dir = out_dir.join(format!("{}={}", param.replace('.', "_"), value));
                scope.spawn(move || -> SweepRow {
                    let config = match raw.set(param, value).and_then(|_| raw.build()) {
                        Ok(c) => c,
                        Err(e) => return (value.clone(), None, format!("error: {e}")),
                    };
                    match run_to_dir(&config, &dir) {
                        Ok(art) => {
                            let status = if art.outcome.completed() {
                                "completed".to_string()
                            } else {
                                "diverged".to_string()
                            };
                            (value.clone(), Some(art.metrics), status)
                        }
                        Err(e) => (value.clone(), None, format!("error: {e}")),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    fs::write(out_dir.join("sweep.csv"), metadata::render_metrics_csv(&results))?;
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mfes_core::scenario::preset_example1;

    #[test]
    fn artifacts_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = preset_example1(4.0);
        c.grid.horizon = 0.1;
        let art = run_to_dir(&c, dir.path()).unwrap();
        assert!(art.trace_path.exists());
        assert!(dir.path().join("metrics.txt").exists());
        assert!(dir.path().join("metadata.txt").exists());
        assert!(dir.path().join("scenario.cfg").exists());
        let meta = std::fs::read_to_string(dir.path().join("metadata.txt")).unwrap();
        assert!(meta.contains("k_m_effective = 1"));
    }

    #[test]
    fn sweep_runs_concurrently_and_marks_failures() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = preset_example1(4.0);
        c.grid.horizon = 0.05;
        let raw = from_scenario(&c);
        let values: Vec<String> = ["0.05", "0.1", "0"].iter().map(|s| s.to_string()).collect();
        let rows = sweep(&raw, "controller.r", &values, dir.path()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].1.is_some());
        assert!(rows[1].1.is_some());
        // r = 0 fails validation and is marked, not fatal
        assert!(rows[2].1.is_none());
        assert!(rows[2].2.contains("error"));
        assert!(dir.path().join("sweep.csv").exists());
    }

    #[test]
    fn empty_sweep_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let raw = from_scenario(&preset_example1(4.0));
        assert!(sweep(&raw, "controller.r", &[], dir.path()).is_err());
    }

    #[test]
    fn sweep_matches_serial_runs() {
        // concurrency must not change results: rerun one point serially
        let dir = tempfile::tempdir().unwrap();
        let mut c = preset_example1(4.0);
        c.grid.horizon = 0.2;
        let raw = from_scenario(&c);
        let values: Vec<String> = ["1", "2"].iter().map(|s| s.to_string()).collect();
        let rows = sweep(&raw, "noise.seed", &values, dir.path()).unwrap();
        let mut serial = raw.clone();
        serial.set("noise.seed", "1").unwrap();
        let config = serial.build().unwrap();
        let out = mfes_core::sim::run_simulation(&config).unwrap();
        let m = compute_metrics(&out.trace, &config);
        assert_eq!(rows[0].1.unwrap(), m);
    }
}
