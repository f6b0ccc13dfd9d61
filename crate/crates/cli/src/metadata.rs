//! Run metadata: the effective (mu-scaled) gains, map diagnostics, field
//! calibration, metrics, and termination status, as flat `key = value` text.

use std::fmt::Write as _;

use mfes_core::controller::ControlMode;
use mfes_core::metrics::RunMetrics;
use mfes_core::scenario::{OutputSpec, ScenarioConfig};
use mfes_core::sim::{RunOutcome, Termination};

pub fn render(config: &ScenarioConfig, outcome: &RunOutcome, metrics: &RunMetrics) -> String {
    let mut s = String::new();
    let diag = config.map_diagnostics();

    let _ = writeln!(s, "[run]");
    let _ = writeln!(
        s,
        "status = {}",
        match outcome.termination {
            Termination::Completed => "completed".to_string(),
            Termination::Diverged { t, .. } => format!("diverged at t = {t}"),
        }
    );
    let _ = writeln!(s, "samples = {}", outcome.trace.rows.len());
    let _ = writeln!(s, "switches = {}", outcome.switch_count);
    let _ = writeln!(s, "phi2_breaches = {}", outcome.phi2_breaches);

    let _ = writeln!(s, "\n[effective-gains]");
    let _ = writeln!(
        s,
        "mode = {}",
        match config.controller.mode {
            ControlMode::RelativeDegreeOne => "rd1",
            ControlMode::Scaled => "scaled",
        }
    );
    let _ = writeln!(s, "mu = {}", config.controller.mu);
    let _ = writeln!(s, "k_m_base = {}", config.controller.k_m);
    let _ = writeln!(s, "lambda_base = {}", config.controller.lambda);
    let _ = writeln!(s, "k_m_effective = {}", outcome.effective_k_m);
    let _ = writeln!(s, "lambda_effective = {}", outcome.effective_lambda);
    if let Some(k) = config.resolved_kp_min() {
        let _ = writeln!(s, "kp_min = {k}");
    }
    let _ = writeln!(s, "r = {}", config.controller.r);

    let _ = writeln!(s, "\n[diagnostics]");
    let _ = writeln!(s, "z_star = {}", diag.z_star);
    let _ = writeln!(s, "y_star = {}", config.y_star());
    let _ = writeln!(s, "m_phi = {}", diag.m_phi);
    let _ = writeln!(s, "l_phi = {}", diag.l_phi);
    let _ = writeln!(s, "delta_radius = {}", diag.delta / 2.0);
    if let OutputSpec::Field(f) = &config.output {
        // calibration of the synthetic light field; not paper ground truth
        let _ = writeln!(s, "field_width = {}", f.width);
        let _ = writeln!(s, "field_amplitude = {}", f.amplitude);
        let _ = writeln!(s, "field_ambient = {}", f.ambient);
        let _ = writeln!(s, "sensor_cap = {}", f.cap);
    }

    let _ = writeln!(s, "\n[metrics]");
    let _ = writeln!(
        s,
        "first_entry_time = {}",
        metrics
            .first_entry_time
            .map(|t| format!("{t}"))
            .unwrap_or_else(|| "absent".to_string())
    );
    let _ = writeln!(s, "terminal_oscillation = {}", metrics.terminal_oscillation);
    let _ = writeln!(s, "terminal_z_band = {}", metrics.terminal_z_band);
    let _ = writeln!(s, "max_abs_e = {}", metrics.max_abs_e);
    let _ = writeln!(s, "switch_count = {}", metrics.switch_count);
    s
}

pub fn render_metrics_csv(rows: &[(String, Option<RunMetrics>, String)]) -> String {
    let mut s = String::from("value,status,first_entry,terminal_oscillation,terminal_z_band,max_abs_e,switches\n");
    for (value, metrics, status) in rows {
        match metrics {
            Some(m) => {
                let fe = m
                    .first_entry_time
                    .map(|t| format!("{t}"))
                    .unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{value},{status},{fe},{},{},{},{}",
                    m.terminal_oscillation, m.terminal_z_band, m.max_abs_e, m.switch_count
                );
            }
            None => {
                let _ = writeln!(s, "{value},{status},,,,,");
            }
        }
    }
    s
}
