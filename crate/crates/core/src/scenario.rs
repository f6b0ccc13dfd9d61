//! Scenario configuration: plant + map/field + controller + observer +
//! monitoring + grid + initial conditions, with validation and the two
//! preset scenarios (the multi-extremum numerical example and the
//! light-seeking servo cart).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::controller::{ControlMode, DominationBounds, PiSchedule};
use crate::map::{CostMap, MapDiagnostics};
use crate::math;
use crate::monitoring::MonitorVariant;
use crate::plant::{LinearSensorPlant, NormalFormPlant, SourceField};

/// One failed validation rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlantSpec {
    NormalForm(NormalFormPlant),
    LinearSensor(LinearSensorPlant),
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutputSpec {
    Map(CostMap),
    Field(SourceField),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSpec {
    pub mode: ControlMode,
    /// error-dynamics / envelope gain; a base value scaled by mu in scaled mode
    pub lambda: f64,
    /// reference ramp slope; a base value scaled by mu in scaled mode
    pub k_m: f64,
    pub y_m0: f64,
    pub y_sat: Option<f64>,
    pub delta: f64,
    pub r: f64,
    pub kp_min: Option<f64>,
    pub l_phi: Option<f64>,
    pub mu: f64,
    pub bounds: DominationBounds,
    pub pi: PiSchedule,
}

impl ControllerSpec {
    pub fn effective_k_m(&self) -> f64 {
        match self.mode {
            ControlMode::RelativeDegreeOne => self.k_m,
            ControlMode::Scaled => self.mu * self.k_m,
        }
    }

    pub fn effective_lambda(&self) -> f64 {
        match self.mode {
            ControlMode::RelativeDegreeOne => self.lambda,
            ControlMode::Scaled => self.mu * self.lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverSpec {
    pub lambda0: f64,
    pub gain: f64,
    pub offset: f64,
    pub eta_bar0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitoringSpec {
    pub variant: MonitorVariant,
    pub a_offset: f64,
    pub a_slope: f64,
    pub c_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub step: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub plant: PlantSpec,
    pub output: OutputSpec,
    pub controller: ControllerSpec,
    pub observer: Option<ObserverSpec>,
    pub monitoring: MonitoringSpec,
    pub grid: GridSpec,
    pub noise: NoiseSpec,
    /// abort threshold on |z| and |e|
    pub guard: f64,
    /// simulate in a dilated time base: every physical rate is multiplied by
    /// this factor and the wall-clock of the run covers horizon/dilation of
    /// physical time per simulated unit; 1.0 means real time
    pub time_dilation: f64,
    /// direction override for open-loop direction studies: monitoring
    /// switching is disabled and sigma is pinned to the given sign
    pub freeze_direction: Option<i8>,
}

impl ScenarioConfig {
    /// kp_min as configured, or derived from l_phi and the plant gain bound.
    pub fn resolved_kp_min(&self) -> Option<f64> {
        if let Some(k) = self.controller.kp_min {
            return Some(k);
        }
        let l = self.controller.l_phi?;
        match &self.plant {
            PlantSpec::NormalForm(p) => Some(l * p.phi2_min),
            PlantSpec::LinearSensor(p) => Some(l * math::abs(p.dc_gain())),
        }
    }

    /// Gradient lower bound used for Delta-vicinity diagnostics.
    pub fn diagnostic_l_phi(&self) -> f64 {
        if let Some(l) = self.controller.l_phi {
            return l;
        }
        let k = self.controller.kp_min.unwrap_or(1.0);
        match &self.plant {
            PlantSpec::NormalForm(p) => k / p.phi2_min,
            PlantSpec::LinearSensor(p) => k / math::abs(p.dc_gain()).max(1e-12),
        }
    }

    /// Diagnostics of the map being maximized (source-relative for fields).
    pub fn map_diagnostics(&self) -> MapDiagnostics {
        match &self.output {
            OutputSpec::Map(m) => m.diagnostics(self.diagnostic_l_phi()),
            OutputSpec::Field(f) => f.diagnostics(self.diagnostic_l_phi()),
        }
    }

    /// Ground-truth optimum of the measured output.
    pub fn y_star(&self) -> f64 {
        match &self.output {
            OutputSpec::Map(m) => m.diagnostics(self.diagnostic_l_phi()).y_star,
            OutputSpec::Field(f) => f.y_star(),
        }
    }

    /// Target the output maximizer tracks: the map's z* or the source path.
    pub fn z_target(&self, t: f64) -> f64 {
        match &self.output {
            OutputSpec::Map(m) => m.diagnostics(self.diagnostic_l_phi()).z_star,
            OutputSpec::Field(f) => f.source_at(t),
        }
    }

    /// A copy of the scenario running in the dilated time base t = factor * tau.
    pub fn dilated(&self, factor: f64) -> ScenarioConfig {
        let mut c = self.clone();
        c.time_dilation = factor;
        // same physical horizon, more simulated samples
        c.grid.horizon = self.grid.horizon / factor;
        c
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut errs: Vec<Violation> = Vec::new();
        let mut push = |field: &str, rule: String| {
            errs.push(Violation {
                field: String::from(field),
                rule,
            })
        };

        // grid
        if !(self.grid.step > 0.0) {
            push("grid.h", String::from("step size must be positive"));
        }
        if !(self.grid.horizon >= self.grid.step) {
            push("grid.t_end", String::from("horizon must be at least one step"));
        }

        // plant
        match &self.plant {
            PlantSpec::NormalForm(p) => {
                if let Err(e) = p.validate() {
                    push("plant", e);
                }
                if self.controller.mode == ControlMode::Scaled {
                    push(
                        "controller.mode",
                        String::from("scaled mode requires a linear-sensor plant"),
                    );
                }
            }
            PlantSpec::LinearSensor(p) => {
                if let Err(e) =
                    LinearSensorPlant::new(p.a.clone(), p.b.clone(), p.c.clone(), p.x.clone(), p.v)
                {
                    push("plant", e);
                }
                if self.controller.mode == ControlMode::RelativeDegreeOne {
                    push(
                        "controller.mode",
                        String::from("rd1 mode requires a normal-form plant"),
                    );
                }
            }
        }

        // output
        match &self.output {
            OutputSpec::Map(m) => {
                if let Err(e) = m.validate() {
                    push("map", e);
                }
            }
            OutputSpec::Field(f) => {
                if let Err(e) = f.validate() {
                    push("field", e);
                }
            }
        }

        // controller
        let c = &self.controller;
        if !(c.r > 0.0) {
            push("controller.r", String::from("r must be positive"));
        }
        if !(c.delta > 0.0) {
            push("controller.delta", String::from("delta must be positive"));
        }
        if !(c.lambda > 0.0) {
            push("controller.lambda", String::from("lambda must be positive"));
        }
        if !(c.k_m > 0.0) && c.k_m != 0.0 {
            push("controller.k_m", String::from("k_m must be nonnegative"));
        }
        if !(c.mu > 0.0 && c.mu <= 1.0) {
            push("controller.mu", String::from("mu must lie in (0, 1]"));
        }
        if let Err(e) = c.bounds.validate() {
            push("controller.bounds", e);
        }
        match self.resolved_kp_min() {
            Some(k) if k > 0.0 => {
                // scaled mode: kp_min may not exceed L_phi |C A^-1 B|
                if c.mode == ControlMode::Scaled {
                    if let (Some(l), PlantSpec::LinearSensor(p)) = (c.l_phi, &self.plant) {
                        let max_kp = l * math::abs(p.dc_gain());
                        if k > max_kp * (1.0 + 1e-12) {
                            push(
                                "controller.kp_min",
                                format!("must not exceed l_phi * |C A^-1 B| = {max_kp}"),
                            );
                        }
                    }
                }
            }
            _ => push(
                "controller.kp_min",
                String::from("kp_min (or l_phi to derive it) must be given and positive"),
            ),
        }
        if c.pi.enabled && !(c.pi.a_offset > 0.0 && c.pi.a_slope > 0.0) {
            push("controller.pi", String::from("Pi sequence a(k) must be positive increasing"));
        }

        // observer
        match (&self.observer, &self.plant) {
            (Some(o), _) => {
                let obs = crate::observer::NormObserver::new(o.lambda0, o.gain, o.offset, o.eta_bar0);
                if let Err(e) = obs.validate(self.grid.step) {
                    push("observer", e);
                }
            }
            (None, PlantSpec::NormalForm(p)) if p.eta_dim() > 0 && c.mode == ControlMode::RelativeDegreeOne => {
                push(
                    "observer",
                    String::from("rd1 control of a plant with internal dynamics needs a norm observer"),
                );
            }
            _ => {}
        }

        // monitoring
        let mon = crate::monitoring::Monitor::new(
            self.monitoring.variant,
            c.effective_lambda().max(f64::MIN_POSITIVE),
            c.r,
            self.monitoring.a_offset,
            self.monitoring.a_slope,
            self.monitoring.c_scale,
        );
        if let Err(e) = mon.validate() {
            push("monitoring", e);
        }

        // misc
        if !(self.guard > 0.0) {
            push("diagnostics.guard", String::from("divergence guard must be positive"));
        }
        if !(self.time_dilation > 0.0) {
            push("diagnostics.time_dilation", String::from("time dilation must be positive"));
        }
        if self.noise.amplitude < 0.0 {
            push("noise.amplitude", String::from("noise amplitude must be nonnegative"));
        }
        if let Some(f) = self.freeze_direction {
            if f != 1 && f != -1 {
                push("diagnostics.freeze_sigma", String::from("frozen direction must be +1 or -1"));
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

/// The multi-extremum numerical example: relative-degree-one plant
/// x' = [[-1,1],[1,1]] x + [0,1]^T u with the two-Gaussian map, global-seek
/// monitoring, and the published tuning (L_phi = 2/3, lambda = 2, k_m = 1,
/// delta = 0.1, r = 0.1, lambda0 = 0.8, phi0 = 2|z|, Pi(k) = a(k) e^{-t/a(k)}
/// with a(k) = k + 1).
///
/// Two knobs differ from the published example, both forced by long-horizon
/// stability (see the project README): the global-seek sequence is
/// c(k) = 0.5/(k+1) rather than 2/(k+1), and the Pi reset fires on the cap
/// alone rather than cap-plus-quiet-dwell. |Phi'| is dominated by its
/// computed supremum rather than a |z|-growing envelope.
pub fn preset_example1(z0: f64) -> ScenarioConfig {
    let map = CostMap::example1();
    let m_phi = map.diagnostics(2.0 / 3.0).m_phi;
    ScenarioConfig {
        plant: PlantSpec::NormalForm(NormalFormPlant::example1(z0)),
        output: OutputSpec::Map(map),
        controller: ControllerSpec {
            mode: ControlMode::RelativeDegreeOne,
            lambda: 2.0,
            k_m: 1.0,
            y_m0: 0.0,
            y_sat: None,
            delta: 0.1,
            r: 0.1,
            kp_min: None,
            l_phi: Some(2.0 / 3.0),
            mu: 1.0,
            bounds: DominationBounds {
                alpha1_gain: 1.0,
                phi1_gain: 1.0,
                phi1_offset: 0.0,
                phi_bar_offset: m_phi,
                phi_bar_slope: 0.0,
            },
            pi: PiSchedule {
                enabled: true,
                a_offset: 1.0,
                a_slope: 1.0,
                cap: 10.0,
                dwell: 0.0,
            },
        },
        observer: Some(ObserverSpec {
            lambda0: 0.8,
            gain: 2.0,
            offset: 0.0,
            eta_bar0: 0.0,
        }),
        monitoring: MonitoringSpec {
            variant: MonitorVariant::GlobalSeek,
            a_offset: 1.0,
            a_slope: 1.0,
            c_scale: 0.5,
        },
        grid: GridSpec {
            step: 1e-3,
            horizon: 15.0,
        },
        noise: NoiseSpec {
            amplitude: 0.0,
            seed: 0,
        },
        guard: 1e6,
        time_dilation: 1.0,
        freeze_direction: None,
    }
}

/// The light-seeking servo cart: DC motor z' = -17.2 z + 3.9 v behind the
/// chattering-alleviation integrator v' = u, photosensor saturating at 5 V,
/// time-scaled controller with mu = 0.5, k_m = 2 mu, lambda = mu,
/// r = 0.2 sqrt(mu), L_phi = 20 r, kp_min = 0.2 L_phi, delta = 0.1 and y_m
/// saturated at 5.
///
/// The field shape is not published; this preset uses a calibrated Gaussian
/// (peak 5 V, width 0.1 m^2, ambient 0.5 V) over the cart position, source
/// 0.4 m from the cart's start. `moving` adds the experiment-II schedule:
/// dark until t = 4 s, source fixed until t = 15 s, then moved linearly to
/// 0.8 m over t in [15, 30] s.
pub fn preset_cart(moving: bool) -> ScenarioConfig {
    let mu = 0.5;
    let r = 0.2 * math::sqrt(mu);
    let l_phi = 20.0 * r;
    ScenarioConfig {
        plant: PlantSpec::LinearSensor(LinearSensorPlant::dc_motor()),
        output: OutputSpec::Field(SourceField {
            amplitude: 5.0,
            width: 0.1,
            ambient: 0.5,
            cap: 5.0,
            source_position: 0.4,
            source_off_until: if moving { 4.0 } else { 0.0 },
            move_start: if moving { 15.0 } else { 0.0 },
            move_end: if moving { 30.0 } else { 0.0 },
            move_to: if moving { 0.8 } else { 0.4 },
        }),
        controller: ControllerSpec {
            mode: ControlMode::Scaled,
            lambda: 1.0,
            k_m: 2.0,
            y_m0: 0.0,
            y_sat: Some(5.0),
            delta: 0.1,
            r,
            kp_min: Some(0.2 * l_phi),
            l_phi: Some(l_phi),
            mu,
            bounds: DominationBounds {
                alpha1_gain: 0.0,
                phi1_gain: 0.0,
                phi1_offset: 0.0,
                phi_bar_offset: 0.0,
                phi_bar_slope: 0.0,
            },
            pi: PiSchedule {
                enabled: false,
                a_offset: 1.0,
                a_slope: 1.0,
                cap: 10.0,
                dwell: 0.0,
            },
        },
        observer: None,
        monitoring: MonitoringSpec {
            variant: MonitorVariant::New,
            a_offset: 1.0,
            a_slope: 1.0,
            c_scale: 0.0,
        },
        grid: GridSpec {
            step: 1e-3,
            horizon: if moving { 30.0 } else { 15.0 },
        },
        noise: NoiseSpec {
            amplitude: 0.0,
            seed: 0,
        },
        guard: 1e6,
        time_dilation: 1.0,
        freeze_direction: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for z0 in [2.0, 4.0, 7.0] {
            preset_example1(z0).validate().unwrap();
        }
        preset_cart(false).validate().unwrap();
        preset_cart(true).validate().unwrap();
    }

    #[test]
    fn example1_effective_gains_are_unscaled() {
        let c = preset_example1(4.0);
        assert_eq!(c.controller.effective_k_m(), 1.0);
        assert_eq!(c.controller.effective_lambda(), 2.0);
        assert!((c.resolved_kp_min().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cart_effective_gains_are_mu_scaled() {
        let c = preset_cart(false);
        assert!((c.controller.effective_k_m() - 1.0).abs() < 1e-15);
        assert!((c.controller.effective_lambda() - 0.5).abs() < 1e-15);
        // kp_min = 0.2 L_phi <= L_phi |C A^-1 B| since |CA^-1B| = 0.2267
        let k = c.resolved_kp_min().unwrap();
        assert!((k - 0.2 * 20.0 * 0.2 * math::sqrt(0.5)).abs() < 1e-12);
    }

    #[test]
    fn zero_r_is_rejected() {
        let mut c = preset_example1(4.0);
        c.controller.r = 0.0;
        let errs = c.validate().unwrap_err();
        assert!(errs.iter().any(|v| v.field == "controller.r"));
    }

    #[test]
    fn mode_plant_mismatch_rejected() {
        let mut c = preset_example1(4.0);
        c.controller.mode = ControlMode::Scaled;
        let errs = c.validate().unwrap_err();
        assert!(errs.iter().any(|v| v.rule.contains("linear-sensor")));

        let mut c = preset_cart(false);
        c.controller.mode = ControlMode::RelativeDegreeOne;
        let errs = c.validate().unwrap_err();
        assert!(errs.iter().any(|v| v.rule.contains("normal-form")));
    }

    #[test]
    fn observer_step_bound_rejected() {
        let mut c = preset_example1(4.0);
        c.grid.step = 2.0; // h >= 1/lambda0
        let errs = c.validate().unwrap_err();
        assert!(errs.iter().any(|v| v.field == "observer"));
    }

    #[test]
    fn scaled_kp_min_upper_bound_enforced() {
        let mut c = preset_cart(false);
        c.controller.kp_min = Some(10.0); // far above L_phi |C A^-1 B|
        let errs = c.validate().unwrap_err();
        assert!(errs.iter().any(|v| v.field == "controller.kp_min"));
    }

    #[test]
    fn dilation_preserves_physical_horizon() {
        let c = preset_cart(false);
        let d = c.dilated(0.5);
        assert_eq!(d.time_dilation, 0.5);
        assert_eq!(d.grid.horizon, 30.0); // twice the simulated samples
    }
}
