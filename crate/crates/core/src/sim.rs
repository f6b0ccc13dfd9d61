//! Fixed-step explicit-Euler simulation of the closed loop. Per sample the
//! order is: read outputs, update the monitoring decision, compute the
//! modulation and relay output, then integrate plant, observer, and
//! reference model in lockstep from the current-sample values.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::controller::RelayController;
use crate::math;
use crate::monitoring::{Monitor, SwitchDecision};
use crate::observer::NormObserver;
use crate::scenario::{OutputSpec, PlantSpec, ScenarioConfig, Violation};

/// Uniform sampling grid t_i = i * step, i = 0..N-1, N = floor(T/step) + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub step: f64,
    pub horizon: f64,
}

impl TimeGrid {
    pub fn new(step: f64, horizon: f64) -> Self {
        TimeGrid { step, horizon }
    }

    pub fn samples(&self) -> usize {
        (math::floor(self.horizon / self.step) as usize) + 1
    }
}

/// One recorded sample. `v` is present for integrator-driven plants and
/// `src` for source-field scenarios; `eta_norm` is a diagnostic carried in
/// memory for the norm-observer checks and is not part of the CSV contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub z: f64,
    pub y: f64,
    pub y_m: f64,
    pub e: f64,
    pub phi_m: f64,
    pub u: f64,
    pub v: Option<f64>,
    pub rho: f64,
    pub k: u32,
    pub sigma: i8,
    pub eta_bar: f64,
    pub src: Option<f64>,
    pub eta_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
}

impl SimTrace {
    pub fn last_t(&self) -> f64 {
        self.rows.last().map(|r| r.t).unwrap_or(0.0)
    }

    /// Rows in the final `fraction` of the recorded horizon.
    pub fn tail(&self, fraction: f64) -> &[TraceRow] {
        let t_from = self.last_t() * (1.0 - fraction);
        let start = self.rows.partition_point(|r| r.t < t_from);
        &self.rows[start..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// trajectory left the guard region; the trace is partial and ends at
    /// the offending sample
    Diverged { t: f64, sample: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: SimTrace,
    pub termination: Termination,
    pub switch_count: u32,
    /// samples at which |phi2| fell below its declared lower bound
    pub phi2_breaches: u32,
    pub effective_k_m: f64,
    pub effective_lambda: f64,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        matches!(self.termination, Termination::Completed)
    }
}

/// One explicit-Euler step: state + h * derivative, elementwise.
pub fn euler_step(state: &[f64], derivative: &[f64], h: f64) -> Vec<f64> {
    debug_assert_eq!(state.len(), derivative.len());
    state
        .iter()
        .zip(derivative.iter())
        .map(|(x, d)| x + h * d)
        .collect()
}

fn uniform_pm1(rng: &mut ChaCha8Rng) -> f64 {
    // 53 mantissa bits -> [0,1), mapped to [-1,1)
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0);
    2.0 * u - 1.0
}

/// Runs a validated scenario to completion or divergence. Deterministic:
/// identical configs (including the noise seed) produce identical traces.
pub fn run_simulation(config: &ScenarioConfig) -> Result<RunOutcome, Vec<Violation>> {
    config.validate()?;

    let md = config.time_dilation;
    let grid = TimeGrid::new(config.grid.step, config.grid.horizon);
    let n = grid.samples();
    let h_eff = grid.step * md;

    let mut plant = config.plant.clone();
    let mut observer = config
        .observer
        .map(|o| NormObserver::new(o.lambda0, o.gain, o.offset, o.eta_bar0));
    let mut monitor = Monitor::new(
        config.monitoring.variant,
        config.controller.effective_lambda(),
        config.controller.r,
        config.monitoring.a_offset,
        config.monitoring.a_slope,
        config.monitoring.c_scale,
    );
    let mut controller = RelayController {
        sigma: config.freeze_direction.unwrap_or(1),
        mode: config.controller.mode,
        k_pi: 0,
        delta: config.controller.delta,
        kp_min: config.resolved_kp_min().expect("validated"),
        lambda: config.controller.effective_lambda(),
        k_m: config.controller.effective_k_m(),
        mu: config.controller.mu,
        bounds: config.controller.bounds,
        pi: config.controller.pi,
        last_switch_t: 0.0,
    };
    let mut reference = crate::controller::ReferenceModel::new(
        config.controller.y_m0,
        controller.k_m,
        config.controller.y_sat,
    );
    let mut rng = (config.noise.amplitude > 0.0).then(|| ChaCha8Rng::seed_from_u64(config.noise.seed));

    let mut rows: Vec<TraceRow> = Vec::with_capacity(n);
    let mut termination = Termination::Completed;
    let mut phi2_breaches = 0u32;

    for i in 0..n {
        let t = i as f64 * grid.step * md;

        let (z, v, eta_norm) = match &plant {
            PlantSpec::NormalForm(p) => (p.z, None, Some(p.eta_norm())),
            PlantSpec::LinearSensor(p) => (p.output(), Some(p.v), None),
        };
        let (y_clean, src) = match &config.output {
            OutputSpec::Map(m) => (m.eval(z), None),
            OutputSpec::Field(f) => (f.output(z, t), Some(f.source_at(t))),
        };
        let y = match rng.as_mut() {
            Some(r) => y_clean + config.noise.amplitude * uniform_pm1(r),
            None => y_clean,
        };
        let e = y - reference.y_m;

        if i == 0 {
            monitor.seed(math::abs(e));
        }
        if config.freeze_direction.is_none()
            && monitor.detect_switch(math::abs(e), t) == SwitchDecision::SwitchRegistered
        {
            controller.flip_direction(t);
        }
        let phi_m = monitor.envelope(t);

        let eta_bar = observer.as_ref().map(|o| o.eta_bar).unwrap_or(0.0);
        let rho = controller.modulation(e, eta_bar, z, t);
        let u = controller.control_output(rho, e);

        rows.push(TraceRow {
            t,
            z,
            y,
            y_m: reference.y_m,
            e,
            phi_m,
            u,
            v,
            rho,
            k: monitor.k,
            sigma: controller.sigma,
            eta_bar,
            src,
            eta_norm,
        });

        let finite = z.is_finite() && e.is_finite() && y.is_finite() && rho.is_finite();
        if math::abs(z) > config.guard || math::abs(e) > config.guard || !finite {
            termination = Termination::Diverged { t, sample: i };
            break;
        }

        match &mut plant {
            PlantSpec::NormalForm(p) => {
                if !p.step(u, h_eff) {
                    phi2_breaches += 1;
                }
            }
            PlantSpec::LinearSensor(p) => p.step(u, h_eff),
        }
        if let Some(o) = observer.as_mut() {
            o.step(z, h_eff);
        }
        reference.step(h_eff);
    }

    Ok(RunOutcome {
        trace: SimTrace { rows },
        termination,
        switch_count: monitor.k,
        phi2_breaches,
        effective_k_m: controller.k_m,
        effective_lambda: controller.lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{preset_cart, preset_example1};

    #[test]
    fn euler_step_examples() {
        assert_eq!(euler_step(&[1.0], &[-1.0], 0.001), alloc::vec![0.999]);
        assert_eq!(euler_step(&[0.0, 0.0], &[0.0, 0.0], 0.01), alloc::vec![0.0, 0.0]);
        assert_eq!(euler_step(&[2.0], &[3.0], 0.5), alloc::vec![3.5]);
    }

    #[test]
    fn grid_sample_count() {
        assert_eq!(TimeGrid::new(1e-3, 15.0).samples(), 15_001);
        assert_eq!(TimeGrid::new(0.5, 1.0).samples(), 3);
    }

    #[test]
    fn zero_gain_degenerate_scenario_holds_state() {
        // k_m = 0 with y_m0 = Phi(z0) pins e at 0, so u = rho sgn(0) = 0 and
        // the unforced integrator holds z(0) exactly
        let mut c = preset_example1(4.0);
        let z0 = 4.0;
        c.plant = crate::scenario::PlantSpec::NormalForm(crate::plant::NormalFormPlant::integrator(z0));
        c.observer = None;
        c.controller.k_m = 0.0;
        c.controller.lambda = 1e-300;
        c.controller.delta = 1e-300; // rho floor effectively zero
        c.controller.y_m0 = crate::map::CostMap::example1().eval(z0);
        c.controller.bounds = crate::controller::DominationBounds {
            alpha1_gain: 0.0,
            phi1_gain: 0.0,
            phi1_offset: 0.0,
            phi_bar_offset: 0.0,
            phi_bar_slope: 0.0,
        };
        c.controller.pi.enabled = false;
        c.grid.horizon = 1.0;
        let out = run_simulation(&c).unwrap();
        assert!(out.completed());
        for r in &out.trace.rows {
            assert_eq!(r.z, z0);
            assert_eq!(r.u, 0.0);
        }
    }

    #[test]
    fn rows_are_uniform_and_finite() {
        let mut c = preset_example1(4.0);
        c.grid.horizon = 2.0;
        let out = run_simulation(&c).unwrap();
        assert!(out.completed());
        assert_eq!(out.trace.rows.len(), 2001);
        let h = c.grid.step;
        for (i, r) in out.trace.rows.iter().enumerate() {
            assert!((r.t - i as f64 * h).abs() < 1e-12);
            for v in [r.z, r.y, r.y_m, r.e, r.phi_m, r.u, r.rho, r.eta_bar] {
                assert!(v.is_finite());
            }
        }
    }

    #[test]
    fn determinism_bitwise() {
        let mut c = preset_example1(2.0);
        c.grid.horizon = 3.0;
        c.noise.amplitude = 0.01;
        c.noise.seed = 42;
        let a = run_simulation(&c).unwrap();
        let b = run_simulation(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_seed_changes_trace() {
        let mut c = preset_example1(2.0);
        c.grid.horizon = 0.5;
        c.noise.amplitude = 0.01;
        c.noise.seed = 1;
        let a = run_simulation(&c).unwrap();
        c.noise.seed = 2;
        let b = run_simulation(&c).unwrap();
        assert_ne!(a.trace, b.trace);
    }

    #[test]
    fn divergence_guard_aborts_with_partial_trace() {
        // frozen wrong direction with a small guard: the run must abort and
        // keep the rows up to the offending sample
        let mut c = preset_example1(4.0);
        c.freeze_direction = Some(-1);
        c.guard = 100.0;
        c.grid.horizon = 5.0;
        let out = run_simulation(&c).unwrap();
        match out.termination {
            Termination::Diverged { t, sample } => {
                assert!(t < 5.0);
                assert_eq!(out.trace.rows.len(), sample + 1);
            }
            Termination::Completed => panic!("expected divergence"),
        }
    }

    #[test]
    fn switch_count_matches_k_column_and_sigma_flips() {
        let out = run_simulation(&preset_example1(4.0)).unwrap();
        assert!(out.completed());
        assert_eq!(out.switch_count, out.trace.rows.last().unwrap().k);
        // sigma flips exactly at k increments
        let mut flips = 0u32;
        for w in out.trace.rows.windows(2) {
            let k_jump = w[1].k != w[0].k;
            let s_flip = w[1].sigma != w[0].sigma;
            assert_eq!(k_jump, s_flip, "at t={}", w[1].t);
            if s_flip {
                flips += 1;
            }
        }
        assert_eq!(flips, out.switch_count);
    }

    #[test]
    fn cart_fixed_runs_clean() {
        let out = run_simulation(&preset_cart(false)).unwrap();
        assert!(out.completed());
        assert_eq!(out.trace.rows.len(), 15_001);
        assert!((out.effective_k_m - 1.0).abs() < 1e-15);
        assert!((out.effective_lambda - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_refinement_consistency_example1() {
        // halving h moves the terminal z by less than the chattering-band
        // tolerance (first-order convergence sanity, not a sharp bound)
        let mut c = preset_example1(4.0);
        c.grid.horizon = 15.0;
        let coarse = run_simulation(&c).unwrap();
        c.grid.step = 5e-4;
        let fine = run_simulation(&c).unwrap();
        let zc = coarse.trace.rows.last().unwrap().z;
        let zf = fine.trace.rows.last().unwrap().z;
        assert!((zc - zf).abs() < 0.5, "zc={zc} zf={zf}");
    }
}
