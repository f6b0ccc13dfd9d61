//! The verification suite: one check per acceptance criterion, shared by the
//! `verify` subcommand and the acceptance test target. Every tolerance is
//! pinned here.

use std::fmt::Write as _;
use std::time::Instant;

use mfes_core::map::CostMap;
use mfes_core::metrics::{bound_check, check_norm_bound, compute_metrics};
use mfes_core::scenario::{preset_cart, preset_example1, OutputSpec, PlantSpec, ScenarioConfig};
use mfes_core::sim::{run_simulation, RunOutcome};

use crate::trace_csv;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: &'static str, name: &'static str) -> Self {
        CriterionResult {
            id,
            name,
            passed: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.passed = false;
        }
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        let _ = write!(self.detail, "{}{}", if ok { "" } else { "FAILED " }, what);
    }
}

fn run(config: &ScenarioConfig) -> RunOutcome {
    run_simulation(config).expect("scenario must validate")
}

/// Terminal-band tolerance of the flagship scenario: 1.5 r with r = 0.1.
const E1_BAND: f64 = 0.15;

/// C1: global convergence of the flagship scenario from z(0) in {2, 4, 7}:
/// enters the Delta-vicinity in finite time and holds max|y - 1.5| <= 0.15
/// over the last 20% of a 15 s horizon at h = 1 ms, under 5 s of wall clock
/// per run.
pub fn c1_example1_global_convergence() -> CriterionResult {
    let mut r = CriterionResult::new("C1", "global convergence to the global maximum");
    for z0 in [2.0, 4.0, 7.0] {
        let config = preset_example1(z0);
        let started = Instant::now();
        let out = run(&config);
        let elapsed = started.elapsed().as_secs_f64();
        let m = compute_metrics(&out.trace, &config);
        r.check(out.completed(), &format!("z0={z0} run completes 15 s"));
        r.check(
            m.first_entry_time.is_some(),
            &format!("z0={z0} enters D_Delta (t={:?})", m.first_entry_time),
        );
        r.check(
            m.terminal_oscillation <= E1_BAND,
            &format!(
                "z0={z0} terminal max|y-1.5| = {:.4} <= {}",
                m.terminal_oscillation, E1_BAND
            ),
        );
        r.check(elapsed < 5.0, &format!("z0={z0} runtime {elapsed:.2}s < 5s"));
    }
    r
}

/// C2: the z(0)=2 trajectory passes the local maximum near z=3 (attains
/// z > 3.5) under the global-seek variant. Checked on the preset and on the
/// paper-literal sequence c(k) = 2/(k+1); the literal run's long-horizon
/// termination is reported as observed.
pub fn c2_local_extremum_escape() -> CriterionResult {
    let mut r = CriterionResult::new("C2", "escape of the local maximum from z(0)=2");

    let config = preset_example1(2.0);
    let out = run(&config);
    let m = compute_metrics(&out.trace, &config);
    let zmax = out.trace.rows.iter().fold(f64::NEG_INFINITY, |a, row| a.max(row.z));
    r.check(zmax > 3.5, &format!("preset attains z = {zmax:.3} > 3.5"));
    r.check(m.first_entry_time.is_some(), "preset reaches D_Delta");

    let mut literal = preset_example1(2.0);
    literal.monitoring.c_scale = 2.0;
    let out = run(&literal);
    let m = compute_metrics(&out.trace, &literal);
    let entry = m.first_entry_time;
    let zmax_by_entry = match entry {
        Some(t) => out
            .trace
            .rows
            .iter()
            .take_while(|row| row.t <= t)
            .fold(f64::NEG_INFINITY, |a, row| a.max(row.z)),
        None => f64::NEG_INFINITY,
    };
    r.check(
        entry.is_some() && zmax_by_entry > 3.5,
        &format!(
            "literal c(k)=2/(k+1) attains z > 3.5 and reaches D_Delta (entry={entry:?}, run {})",
            if out.completed() { "completed" } else { "diverges later; see ledger" }
        ),
    );
    r
}

/// C3: |e(t_i)| <= phi_m(t_i) + eps_step at every sample of every accepted
/// run, with eps_step the trace's maximum one-step growth of |e|; switch
/// samples are additionally checked against the expiring envelope segment.
pub fn c3_monitoring_bound() -> CriterionResult {
    let mut r = CriterionResult::new("C3", "monitoring envelope bounds |e| on accepted runs");
    let mut scenarios: Vec<(String, ScenarioConfig)> = vec![
        ("cart-fixed".into(), preset_cart(false)),
        ("cart-moving".into(), preset_cart(true)),
    ];
    for z0 in [2.0, 4.0, 7.0] {
        scenarios.push((format!("example1 z0={z0}"), preset_example1(z0)));
    }
    for (name, config) in scenarios {
        let out = run(&config);
        let rep = bound_check(&out.trace, &config);
        r.check(
            rep.pass,
            &format!(
                "{name}: recorded exceedance {:.2e} <= 0, pre-switch {:.4} <= allowance {:.4}",
                rep.max_recorded_exceedance, rep.max_pre_switch_exceedance, rep.pre_switch_allowance
            ),
        );
    }
    r
}

/// C4: direction-frozen behavior from Proposition 1. Wrong direction outside
/// the vicinity: |e| grows monotonically over the final 50% of a 5 s run.
/// Correct direction: e crosses zero in finite time and stays within the
/// one-step band 2 h max|e'| while the trajectory remains outside D_Delta.
pub fn c4_frozen_direction() -> CriterionResult {
    let mut r = CriterionResult::new("C4", "frozen-direction error growth and finite-time reaching");

    // wrong branch: sigma = -1 at z(0) = 4 (left flank, k_p > 0), reference
    // started above the peak so e stays negative
    let mut wrong = preset_example1(4.0);
    wrong.freeze_direction = Some(-1);
    wrong.controller.y_m0 = 3.0;
    wrong.guard = 1e50;
    wrong.grid.horizon = 5.0;
    let out = run(&wrong);
    r.check(out.completed(), "wrong-direction run completes under raised guard");
    let n = out.trace.rows.len();
    let tail = &out.trace.rows[n / 2..];
    let monotone = tail.windows(2).all(|w| w[1].e.abs() >= w[0].e.abs() - 1e-9);
    r.check(monotone, "|e| nondecreasing over the final 50%");
    let m = compute_metrics(&out.trace, &wrong);
    r.check(m.first_entry_time.is_none(), "trajectory never enters D_Delta");

    // correct branch: sigma = +1 on the flank of the global peak, short
    // reaching phase, sliding until the vicinity is reached
    let z0 = 4.2;
    let mut correct = preset_example1(z0);
    correct.freeze_direction = Some(1);
    correct.controller.y_m0 = CostMap::example1().eval(z0) - 0.05;
    correct.guard = 1e50;
    correct.grid.horizon = 5.0;
    let out = run(&correct);
    let diag = correct.map_diagnostics();
    let radius = diag.delta / 2.0;
    let h = correct.grid.step;

    let mut t_cross = None;
    for w in out.trace.rows.windows(2) {
        if w[1].e == 0.0 || (w[1].e < 0.0) != (w[0].e < 0.0) {
            t_cross = Some(w[1].t);
            break;
        }
    }
    r.check(
        matches!(t_cross, Some(t) if t < 1.0),
        &format!("zero crossing in finite time (t={t_cross:?})"),
    );
    if let Some(tc) = t_cross {
        let entry = out
            .trace
            .rows
            .iter()
            .find(|row| row.t >= tc && (row.z - diag.z_star).abs() < radius)
            .map(|row| row.t);
        if let Some(te) = entry {
            let window: Vec<_> = out
                .trace
                .rows
                .iter()
                .filter(|row| row.t >= tc && row.t <= te)
                .collect();
            let max_e = window.iter().fold(0.0f64, |a, row| a.max(row.e.abs()));
            let max_de = window
                .windows(2)
                .fold(0.0f64, |a, w| a.max((w[1].e - w[0].e).abs() / h));
            let band = 2.0 * h * max_de;
            r.check(
                max_e <= band,
                &format!("sliding band: max|e| = {max_e:.4} <= 2 h max|e'| = {band:.4} until D_Delta entry at t={te}"),
            );
        } else {
            r.check(false, "trajectory reaches D_Delta after the crossing");
        }
    }
    r
}

/// C5: cart with a fixed source settles with terminal oscillation band
/// max|y - y*| <= 3 r, r = 0.2 sqrt(mu).
pub fn c5_cart_fixed() -> CriterionResult {
    let mut r = CriterionResult::new("C5", "cart fixed-source residual band");
    let config = preset_cart(false);
    let out = run(&config);
    let m = compute_metrics(&out.trace, &config);
    let band = 3.0 * config.controller.r;
    r.check(out.completed(), "run completes");
    r.check(
        m.terminal_oscillation <= band,
        &format!("terminal max|y-y*| = {:.4} <= 3r = {band:.4}", m.terminal_oscillation),
    );
    r.check(m.first_entry_time.is_some(), "cart reaches the source vicinity");
    r
}

/// C6: moving-source tracking: the cart stays practically stopped while the
/// source is dark, then follows the schedule with bounded lag while the
/// light intensity holds within 1.5x the fixed-source band.
pub fn c6_cart_moving() -> CriterionResult {
    let mut r = CriterionResult::new("C6", "cart moving-source tracking");
    let config = preset_cart(true);
    let out = run(&config);
    r.check(out.completed(), "run completes");

    let (ambient, cap_y) = match &config.output {
        OutputSpec::Field(f) => (f.ambient, f.y_star()),
        _ => unreachable!("cart preset uses a source field"),
    };

    // dark phase [0, 4): ambient-only output, cart essentially parked
    let dark: Vec<_> = out.trace.rows.iter().filter(|row| row.t < 4.0).collect();
    let ambient_only = dark.iter().all(|row| row.y == ambient);
    let max_p_dark = dark.iter().fold(0.0f64, |a, row| a.max(row.z.abs()));
    r.check(ambient_only, "dark phase reads ambient light only");
    r.check(
        max_p_dark <= 0.15,
        &format!("dark phase max|p| = {max_p_dark:.4} <= 0.15 m (practically stopped)"),
    );

    // motion phase [15, 30]: bounded lag, intensity within 1.5x fixed band
    let motion: Vec<_> = out
        .trace
        .rows
        .iter()
        .filter(|row| row.t >= 15.0 && row.t <= 30.0)
        .collect();
    let max_lag = motion
        .iter()
        .fold(0.0f64, |a, row| a.max((row.z - row.src.unwrap()).abs()));
    let max_dip = motion.iter().fold(0.0f64, |a, row| a.max(cap_y - row.y));
    let intensity_band = 1.5 * 3.0 * config.controller.r;
    r.check(
        max_lag <= 0.3,
        &format!("motion max|p - s(t)| = {max_lag:.4} <= 0.3 m"),
    );
    r.check(
        max_dip <= intensity_band,
        &format!("motion max(y* - y) = {max_dip:.4} <= 1.5 * 3r = {intensity_band:.4}"),
    );
    r
}

/// C7: simulating the cart in the dilated time base t = mu tau on the tau
/// grid reproduces the real-time trajectory within 10 h pointwise in z.
pub fn c7_time_scaling_consistency() -> CriterionResult {
    let mut r = CriterionResult::new("C7", "time-scaling consistency");
    let mu = 0.5;
    let mut base = preset_cart(false);
    base.grid.horizon = 3.0;
    let real = run(&base);
    let dilated = run(&base.dilated(mu));

    // tau sample j sits at physical time mu j h; with mu = 1/2 every second
    // tau sample aligns with a real-time sample
    let h = base.grid.step;
    let mut max_diff = 0.0f64;
    for (i, row) in real.trace.rows.iter().enumerate() {
        let j = 2 * i;
        if j >= dilated.trace.rows.len() {
            break;
        }
        let tau_row = &dilated.trace.rows[j];
        debug_assert!((tau_row.t - row.t).abs() < 1e-12);
        max_diff = max_diff.max((row.z - tau_row.z).abs());
    }
    let tol = 10.0 * h;
    r.check(
        max_diff <= tol,
        &format!("max |z_t - z_tau| = {max_diff:.6} <= 10h = {tol}"),
    );
    r
}

/// C8: the norm-observer bound ||eta(t)|| <= eta_bar(t) holds at every
/// sample when eta_bar(0) >= ||eta(0)||, and the fitted-R check passes for
/// the zero-start preset runs.
pub fn c8_norm_observer_bound() -> CriterionResult {
    let mut r = CriterionResult::new("C8", "norm-observer bound");
    for z0 in [2.0, 4.0, 7.0] {
        let config = preset_example1(z0);
        let out = run(&config);
        let lambda0 = config.observer.unwrap().lambda0;
        let rep = check_norm_bound(&out.trace, lambda0, 1.0);
        let per_sample = out
            .trace
            .rows
            .iter()
            .all(|row| row.eta_norm.unwrap() <= row.eta_bar + 1e-9);
        r.check(
            per_sample,
            &format!("z0={z0}: ||eta|| <= eta_bar at all {} samples", out.trace.rows.len()),
        );
        r.check(
            rep.pass && rep.fitted_r <= 1e-9,
            &format!("z0={z0}: fitted R = {:.2e} (cap {:.2e})", rep.fitted_r, rep.r_cap),
        );
    }

    // nonzero start with eta_bar(0) = ||eta(0)||
    let mut config = preset_example1(4.0);
    if let PlantSpec::NormalForm(p) = &mut config.plant {
        p.eta[0] = 0.5;
    }
    config.observer = config.observer.map(|mut o| {
        o.eta_bar0 = 0.5;
        o
    });
    let out = run(&config);
    let per_sample = out
        .trace
        .rows
        .iter()
        .all(|row| row.eta_norm.unwrap() <= row.eta_bar + 1e-9);
    r.check(per_sample, "eta_bar(0)=||eta(0)||=0.5: bound holds at every sample");
    r
}

/// C9: determinism (identical CSV bytes across repeated runs of each preset)
/// and the finite-difference derivative oracle at 1e-6 relative tolerance.
pub fn c9_determinism_and_oracle() -> CriterionResult {
    let mut r = CriterionResult::new("C9", "determinism and derivative oracle");
    let presets: Vec<(&str, ScenarioConfig)> = vec![
        ("example1 z0=4", preset_example1(4.0)),
        ("cart-fixed", preset_cart(false)),
        ("cart-moving", preset_cart(true)),
    ];
    for (name, config) in presets {
        let a = trace_csv::to_csv(&run(&config).trace);
        let b = trace_csv::to_csv(&run(&config).trace);
        r.check(a == b, &format!("{name}: repeated runs give identical CSV bytes ({} bytes)", a.len()));
    }

    let map = CostMap::example1();
    let mut worst = 0.0f64;
    let mut ok = true;
    for i in 0..1000 {
        let z = -10.0 + 25.0 * i as f64 / 999.0;
        let an = map.derivative(z);
        let fd = (map.eval(z + 1e-6) - map.eval(z - 1e-6)) / 2e-6;
        let err = (an - fd).abs() / an.abs().max(1.0);
        worst = worst.max(err);
        ok &= err <= 1e-6;
    }
    r.check(
        ok,
        &format!("map_derivative matches central differences: worst relative error {worst:.2e} <= 1e-6"),
    );
    r
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        c1_example1_global_convergence(),
        c2_local_extremum_escape(),
        c3_monitoring_bound(),
        c4_frozen_direction(),
        c5_cart_fixed(),
        c6_cart_moving(),
        c7_time_scaling_consistency(),
        c8_norm_observer_bound(),
        c9_determinism_and_oracle(),
    ]
}

/// Renders the one-line-per-criterion report; returns overall pass.
pub fn report(results: &[CriterionResult], out: &mut String) -> bool {
    let mut all = true;
    for r in results {
        all &= r.passed;
        let _ = writeln!(
            out,
            "[{}] {} — {}\n      {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.detail
        );
    }
    all
}
