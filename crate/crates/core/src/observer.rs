//! First-order norm observer for the unmeasured internal state:
//! eta_bar' = -lambda0 eta_bar + phi0(z, t), with ||eta|| <= eta_bar plus an
//! exponentially decaying initial-condition term. The observer output feeds
//! the modulation bound, never the plant.

use alloc::string::String;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormObserver {
    pub eta_bar: f64,
    pub lambda0: f64,
    /// phi0(z, t) = gain * |z| + offset. The absolute value keeps the input
    /// nonnegative as the norm-observability assumption requires, even where
    /// the worked example writes the signed form.
    pub gain: f64,
    pub offset: f64,
}

impl NormObserver {
    pub fn new(lambda0: f64, gain: f64, offset: f64, eta_bar0: f64) -> Self {
        NormObserver {
            eta_bar: eta_bar0,
            lambda0,
            gain,
            offset,
        }
    }

    /// Observer for the paper's example: lambda0 = 0.8, phi0 = 2|z|.
    pub fn example1() -> Self {
        NormObserver::new(0.8, 2.0, 0.0, 0.0)
    }

    pub fn phi0(&self, z: f64) -> f64 {
        self.gain * math::abs(z) + self.offset
    }

    pub fn validate(&self, h: f64) -> Result<(), String> {
        if !(self.lambda0 > 0.0) {
            return Err(String::from("lambda0 must be positive"));
        }
        if self.gain < 0.0 || self.offset < 0.0 {
            return Err(String::from("phi0 coefficients must be nonnegative"));
        }
        if !(h < 1.0 / self.lambda0) {
            // Euler would lose the nonnegativity invariant
            return Err(String::from("step size must satisfy h < 1/lambda0"));
        }
        if self.eta_bar < 0.0 {
            return Err(String::from("eta_bar(0) must be nonnegative"));
        }
        Ok(())
    }

    pub fn step(&mut self, z: f64, h: f64) {
        self.eta_bar += h * (-self.lambda0 * self.eta_bar + self.phi0(z));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_hand_step() {
        let mut o = NormObserver::example1();
        o.step(1.0, 1e-3);
        assert!((o.eta_bar - 0.002).abs() < 1e-15);
    }

    #[test]
    fn pure_decay() {
        let mut o = NormObserver::example1();
        o.eta_bar = 1.0;
        o.step(0.0, 1e-3);
        assert!((o.eta_bar - 0.9992).abs() < 1e-15);
    }

    #[test]
    fn fixed_point_under_constant_input() {
        // constant z = 1: eta_bar -> phi0/lambda0 = 2/0.8 = 2.5
        let mut o = NormObserver::example1();
        for _ in 0..40_000 {
            o.step(1.0, 1e-3);
        }
        assert!((o.eta_bar - 2.5).abs() < 1e-5, "eta_bar={}", o.eta_bar);
    }

    #[test]
    fn validation_rules() {
        let o = NormObserver::example1();
        assert!(o.validate(1e-3).is_ok());
        assert!(o.validate(1.3).is_err()); // h >= 1/lambda0
        let bad = NormObserver::new(0.0, 2.0, 0.0, 0.0);
        assert!(bad.validate(1e-3).is_err());
    }

    #[test]
    fn nonnegativity_is_invariant() {
        let mut o = NormObserver::example1();
        for i in 0..10_000 {
            o.step(if i % 2 == 0 { -3.0 } else { 0.0 }, 1e-3);
            assert!(o.eta_bar >= 0.0);
        }
    }
}
