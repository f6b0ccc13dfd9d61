//! Relay control law u = -sigma rho sgn(e) with the direction sigma flipped
//! by the monitoring function, the ramp reference model, and the two
//! modulation-function designs: the relative-degree-one form built from the
//! norm-observer and domination bounds, and the time-scaled form for the
//! integrator-plus-stable-linear-plant configuration.

use alloc::string::String;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    /// relative degree one, modulation from domination bounds + Pi(k)
    RelativeDegreeOne,
    /// arbitrary relative degree via time scaling, modulation mu-scaled
    Scaled,
}

/// Known domination functions of the modulation design, in the affine family
/// a flat config can express:
///   alpha1(s)    = alpha1_gain * s
///   varphi1(z,t) = phi1_gain * |z| + phi1_offset
///   Phi_bar(s)   = phi_bar_offset + phi_bar_slope * s
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationBounds {
    pub alpha1_gain: f64,
    pub phi1_gain: f64,
    pub phi1_offset: f64,
    pub phi_bar_offset: f64,
    pub phi_bar_slope: f64,
}

impl DominationBounds {
    pub fn validate(&self) -> Result<(), String> {
        if self.alpha1_gain < 0.0
            || self.phi1_gain < 0.0
            || self.phi1_offset < 0.0
            || self.phi_bar_offset < 0.0
            || self.phi_bar_slope < 0.0
        {
            return Err(String::from("domination bound coefficients must be nonnegative"));
        }
        Ok(())
    }

    /// bar{phi}_1 = alpha1(2 |eta_bar|) + varphi1(z, t)
    pub fn phi1_bar(&self, eta_bar: f64, z: f64) -> f64 {
        self.alpha1_gain * 2.0 * math::abs(eta_bar) + self.phi1_gain * math::abs(z) + self.phi1_offset
    }

    /// bar{Phi}(|z|) dominating |Phi'|
    pub fn phi_bar(&self, z: f64) -> f64 {
        self.phi_bar_offset + self.phi_bar_slope * math::abs(z)
    }
}

/// Pi(k) = a(k) e^{-t / a(k)} with a(k) = a_offset + a_slope k, plus the
/// reset rule that reinitializes k once Pi exceeds `cap` (checked whenever k
/// advances; `dwell` additionally requires the envelope to have been
/// respected for that long since the last switch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiSchedule {
    pub enabled: bool,
    pub a_offset: f64,
    pub a_slope: f64,
    pub cap: f64,
    pub dwell: f64,
}

impl PiSchedule {
    pub fn value(&self, k_pi: u32, t: f64) -> f64 {
        if !self.enabled {
            return 0.0;
        }
        let a = self.a_offset + self.a_slope * k_pi as f64;
        a * math::exp(-t / a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayController {
    /// +1 selects the u+ branch (u = -rho sgn e), -1 the u- branch
    pub sigma: i8,
    pub mode: ControlMode,
    pub k_pi: u32,
    pub delta: f64,
    pub kp_min: f64,
    pub lambda: f64,
    pub k_m: f64,
    pub mu: f64,
    pub bounds: DominationBounds,
    pub pi: PiSchedule,
    /// time of the last monitoring switch, for the reset dwell
    pub last_switch_t: f64,
}

impl RelayController {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.delta > 0.0) {
            return Err(String::from("delta must be positive"));
        }
        if !(self.kp_min > 0.0) {
            return Err(String::from("kp_min must be positive"));
        }
        if !(self.lambda > 0.0) {
            return Err(String::from("lambda must be positive"));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(String::from("mu must lie in (0, 1]"));
        }
        self.bounds.validate()
    }

    /// u = -sigma rho sgn(e); sgn(0) = 0 so the relay rests on e = 0.
    pub fn control_output(&self, rho: f64, e: f64) -> f64 {
        -(self.sigma as f64) * rho * math::sgn(e)
    }

    /// Direction flip on a monitoring switch; advances the Pi index and
    /// applies the reset rule.
    pub fn flip_direction(&mut self, t: f64) {
        self.sigma = -self.sigma;
        if self.pi.enabled {
            self.k_pi += 1;
            self.maybe_reset_pi(t);
        }
        self.last_switch_t = t;
    }

    /// Reset k once Pi(k) at the current time exceeds the cap, provided the
    /// envelope has been respected for the dwell window.
    pub fn maybe_reset_pi(&mut self, t: f64) {
        if self.pi.value(self.k_pi, t) > self.pi.cap && t - self.last_switch_t >= self.pi.dwell {
            self.k_pi = 0;
        }
    }

    /// Relative-degree-one modulation:
    /// rho = [phi1_bar Phi_bar + Phi_bar^2 + k_m + lambda |e|] / kp_min + Pi(k) + delta.
    pub fn modulation_rd1(&self, e: f64, eta_bar: f64, z: f64, t: f64) -> f64 {
        let phi1_bar = self.bounds.phi1_bar(eta_bar, z);
        let phi_bar = self.bounds.phi_bar(z);
        (phi1_bar * phi_bar + phi_bar * phi_bar + self.k_m + self.lambda * math::abs(e)) / self.kp_min
            + self.pi.value(self.k_pi, t)
            + self.delta
    }

    /// Time-scaled modulation: rho = (mu / kp_min)(k_m + lambda |e|) + mu delta.
    /// k_m and lambda here are the already-scaled effective gains.
    pub fn modulation_scaled(&self, e: f64) -> f64 {
        (self.mu / self.kp_min) * (self.k_m + self.lambda * math::abs(e)) + self.mu * self.delta
    }

    pub fn modulation(&self, e: f64, eta_bar: f64, z: f64, t: f64) -> f64 {
        match self.mode {
            ControlMode::RelativeDegreeOne => self.modulation_rd1(e, eta_bar, z, t),
            ControlMode::Scaled => self.modulation_scaled(e),
        }
    }
}

/// Ramp reference y_m' = k_m, optionally saturated at a rough upper bound of
/// the attainable optimum so the reference cannot run away from the plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceModel {
    pub y_m: f64,
    pub k_m: f64,
    pub y_sat: Option<f64>,
}

impl ReferenceModel {
    pub fn new(y_m0: f64, k_m: f64, y_sat: Option<f64>) -> Self {
        ReferenceModel { y_m: y_m0, k_m, y_sat }
    }

    pub fn step(&mut self, h: f64) {
        self.y_m += h * self.k_m;
        if let Some(cap) = self.y_sat {
            if self.y_m > cap {
                self.y_m = cap;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rd1_controller() -> RelayController {
        RelayController {
            sigma: 1,
            mode: ControlMode::RelativeDegreeOne,
            k_pi: 0,
            delta: 0.1,
            kp_min: 2.0 / 3.0,
            lambda: 2.0,
            k_m: 1.0,
            mu: 1.0,
            bounds: DominationBounds {
                alpha1_gain: 1.0,
                phi1_gain: 1.0,
                phi1_offset: 0.0,
                phi_bar_offset: 1.2934,
                phi_bar_slope: 1.0,
            },
            pi: PiSchedule {
                enabled: true,
                a_offset: 1.0,
                a_slope: 1.0,
                cap: 10.0,
                dwell: 1.0,
            },
            last_switch_t: 0.0,
        }
    }

    #[test]
    fn relay_branches() {
        let mut c = rd1_controller();
        assert_eq!(c.control_output(2.0, 0.5), -2.0); // u+ branch
        c.sigma = -1;
        assert_eq!(c.control_output(2.0, 0.5), 2.0); // u- branch
        assert_eq!(c.control_output(2.0, 0.0), 0.0); // sgn(0) = 0
    }

    #[test]
    fn flip_is_involution() {
        let mut c = rd1_controller();
        c.pi.enabled = false;
        c.flip_direction(0.1);
        assert_eq!(c.sigma, -1);
        c.flip_direction(0.2);
        assert_eq!(c.sigma, 1);
    }

    #[test]
    fn reference_ramp_and_saturation() {
        let mut rm = ReferenceModel::new(0.0, 1.0, None);
        rm.step(1e-3);
        assert!((rm.y_m - 0.001).abs() < 1e-15);

        let mut rm = ReferenceModel::new(5.0, 1.0, Some(5.0));
        rm.step(1e-3);
        assert_eq!(rm.y_m, 5.0); // §5 practice: saturated at the sensor cap
    }

    #[test]
    fn pi_term_values() {
        let c = rd1_controller();
        // Pi(0) at t=0 is 1 * e^0 = 1
        assert_eq!(c.pi.value(0, 0.0), 1.0);
        assert!((c.pi.value(2, 1.0) - 3.0 * math::exp(-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn modulation_rd1_plugin_value() {
        // e=0, eta_bar=0, z=0 with alpha1(s)=s, varphi1=|z|, Phi_bar=M+|z|:
        // rho = (M^2 + k_m)/kp_min + Pi(0)|_{t=0} + delta
        let c = rd1_controller();
        let m = c.bounds.phi_bar_offset;
        let want = (m * m + 1.0) / (2.0 / 3.0) + 1.0 + 0.1;
        let got = c.modulation_rd1(0.0, 0.0, 0.0, 0.0);
        assert!((got - want).abs() < 1e-12, "rho={got} want={want}");
    }

    #[test]
    fn modulation_floor_without_terms() {
        let mut c = rd1_controller();
        c.bounds = DominationBounds {
            alpha1_gain: 0.0,
            phi1_gain: 0.0,
            phi1_offset: 0.0,
            phi_bar_offset: 0.0,
            phi_bar_slope: 0.0,
        };
        c.k_m = 0.0;
        c.lambda = 1.0; // lambda itself must stay positive
        c.pi.enabled = false;
        assert!((c.modulation_rd1(0.0, 0.0, 0.0, 0.0) - c.delta).abs() < 1e-15);
    }

    #[test]
    fn modulation_scaled_cart_value() {
        // mu=0.5, k_m=2mu=1, lambda=mu=0.5, r=0.2 sqrt(mu), L=20r, kp=0.2L, delta=0.1
        let r = 0.2 * math::sqrt(0.5);
        let c = RelayController {
            sigma: 1,
            mode: ControlMode::Scaled,
            k_pi: 0,
            delta: 0.1,
            kp_min: 0.2 * 20.0 * r,
            lambda: 0.5,
            k_m: 1.0,
            mu: 0.5,
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
            last_switch_t: 0.0,
        };
        let got = c.modulation_scaled(0.0);
        assert!((got - 0.933_883_476_483_184_4).abs() < 1e-12, "rho={got}");
        // floor with k_m = 0
        let mut c0 = c;
        c0.k_m = 0.0;
        assert!((c0.modulation_scaled(0.0) - 0.5 * 0.1).abs() < 1e-15);
        // affine in |e|: doubling |e| adds mu lambda |e| / kp_min
        let e = 0.8;
        let d = c.modulation_scaled(2.0 * e) - c.modulation_scaled(e);
        assert!((d - c.mu * c.lambda * e / c.kp_min).abs() < 1e-12);
    }

    #[test]
    fn pi_reset_needs_cap_and_dwell() {
        let mut c = rd1_controller();
        // Pi(k) = 12 > cap at k=30, t=11: 31 e^{-11/31} = 21.7 — use a state
        // where the value is just above the cap
        c.k_pi = 30;
        c.last_switch_t = 0.0;
        // quiet for 11 s >= dwell 1 s and Pi > cap: reset
        assert!(c.pi.value(30, 11.0) > c.pi.cap);
        c.maybe_reset_pi(11.0);
        assert_eq!(c.k_pi, 0);
        // below the cap: unchanged
        c.k_pi = 1;
        c.maybe_reset_pi(11.0);
        assert_eq!(c.k_pi, 1);
        // above the cap but inside the dwell window: unchanged
        let mut c2 = rd1_controller();
        c2.k_pi = 30;
        c2.last_switch_t = 10.5;
        c2.maybe_reset_pi(11.0);
        assert_eq!(c2.k_pi, 30);
    }

    #[test]
    fn pi_can_be_disabled_for_first_order_plants() {
        let mut c = rd1_controller();
        c.pi.enabled = false;
        assert_eq!(c.pi.value(5, 0.0), 0.0);
        let rho = c.modulation_rd1(0.0, 0.0, 0.0, 0.0);
        let m = c.bounds.phi_bar_offset;
        assert!((rho - ((m * m + 1.0) / (2.0 / 3.0) + 0.1)).abs() < 1e-12);
    }
}
