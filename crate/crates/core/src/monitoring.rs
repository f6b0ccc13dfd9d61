//! The monitoring function: a decaying envelope over |e| whose violation
//! means the current control-direction estimate is wrong. Three envelope
//! variants are supported:
//!
//! * `New`       phi_k(t) = |e(t_k)| e^{-lambda (t - t_k)} + r
//! * `Legacy`    phi_k(t) = |e(t_k)| e^{-lambda (t - t_k)} + a(k) e^{-t/a(k)}
//! * `GlobalSeek` New plus a decreasing c(k), which tolerates the output dips
//!   needed to pass through local maxima before shrinking to the New floor.

use alloc::string::String;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorVariant {
    New,
    Legacy,
    GlobalSeek,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchDecision {
    NoSwitch,
    SwitchRegistered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monitor {
    pub variant: MonitorVariant,
    /// switch count; also indexes the a/c sequences
    pub k: u32,
    pub t_k: f64,
    /// |e(t_k)| frozen at the last switch (or the initial sample)
    pub e_k: f64,
    pub lambda: f64,
    pub r: f64,
    /// a(k) = a_offset + a_slope * k, positive increasing unbounded
    pub a_offset: f64,
    pub a_slope: f64,
    /// c(k) = c_scale / (k + 1), positive decreasing to zero
    pub c_scale: f64,
    seeded: bool,
}

impl Monitor {
    pub fn new(variant: MonitorVariant, lambda: f64, r: f64, a_offset: f64, a_slope: f64, c_scale: f64) -> Self {
        Monitor {
            variant,
            k: 0,
            t_k: 0.0,
            e_k: 0.0,
            lambda,
            r,
            a_offset,
            a_slope,
            c_scale,
            seeded: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.r > 0.0) {
            return Err(String::from("r must be positive"));
        }
        if !(self.lambda > 0.0) {
            return Err(String::from("lambda must be positive"));
        }
        if self.variant == MonitorVariant::Legacy && !(self.a_offset > 0.0 && self.a_slope > 0.0) {
            return Err(String::from("legacy a(k) must be positive and increasing"));
        }
        if self.variant == MonitorVariant::GlobalSeek {
            if !(self.c_scale > 0.0) {
                return Err(String::from("c(0) must be positive"));
            }
            if self.c_scale <= self.r {
                return Err(String::from("c(0) must exceed the residual floor r"));
            }
        }
        Ok(())
    }

    pub fn a_seq(&self, k: u32) -> f64 {
        self.a_offset + self.a_slope * k as f64
    }

    pub fn c_seq(&self, k: u32) -> f64 {
        self.c_scale / (k as f64 + 1.0)
    }

    /// Envelope value phi_m(t) of the active segment. Requires t >= t_k.
    pub fn envelope(&self, t: f64) -> f64 {
        debug_assert!(t >= self.t_k, "envelope queried before the active switch time");
        let decay = self.e_k * math::exp(-self.lambda * (t - self.t_k));
        match self.variant {
            MonitorVariant::New => decay + self.r,
            MonitorVariant::GlobalSeek => decay + self.r + self.c_seq(self.k),
            MonitorVariant::Legacy => {
                let a = self.a_seq(self.k);
                decay + a * math::exp(-t / a)
            }
        }
    }

    /// Seeds the first envelope segment from the initial error sample.
    pub fn seed(&mut self, e0_abs: f64) {
        if !self.seeded {
            self.e_k = e0_abs;
            self.seeded = true;
        }
    }

    /// Per-sample violation test: |e| >= phi_m registers a switch and starts
    /// a new segment seeded at |e|. At most one switch per sample.
    pub fn detect_switch(&mut self, e_abs: f64, t: f64) -> SwitchDecision {
        if e_abs >= self.envelope(t) {
            self.k += 1;
            self.t_k = t;
            self.e_k = e_abs;
            SwitchDecision::SwitchRegistered
        } else {
            SwitchDecision::NoSwitch
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn new_monitor(lambda: f64, r: f64) -> Monitor {
        Monitor::new(MonitorVariant::New, lambda, r, 1.0, 1.0, 0.0)
    }

    #[test]
    fn envelope_closed_form() {
        let mut m = new_monitor(2.0, 0.1);
        m.seed(1.0);
        // e^{-1} + 0.1
        let want = math::exp(-1.0) + 0.1;
        assert!((m.envelope(0.5) - want).abs() < 1e-15);
        assert!((m.envelope(0.5) - 0.467_879_441_171_442_33).abs() < 1e-15);
    }

    #[test]
    fn envelope_at_switch_time_and_floor() {
        let mut m = new_monitor(2.0, 0.1);
        m.seed(1.0);
        assert!((m.envelope(0.0) - 1.1).abs() < 1e-15);
        assert!((m.envelope(1e6) - 0.1).abs() < 1e-12); // floor r
    }

    #[test]
    fn detect_switch_rules() {
        let mut m = new_monitor(2.0, 0.1);
        m.seed(0.4);
        assert_eq!(m.detect_switch(0.2, 0.0), SwitchDecision::NoSwitch);
        assert_eq!(m.k, 0);
        // equality triggers under the discrete >= rule
        let mut m2 = new_monitor(2.0, 0.1);
        m2.seed(0.4);
        assert_eq!(m2.detect_switch(0.5, 0.0), SwitchDecision::SwitchRegistered);
        assert_eq!(m2.k, 1);
        assert_eq!(m2.e_k, 0.5);
        assert_eq!(m2.t_k, 0.0);
        // right after a switch the envelope re-opens slack r above |e|
        assert!((m2.envelope(0.0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn decaying_error_never_switches() {
        // |e(t)| = 0.4 e^{-t} stays under 0.4 e^{-2t} + 0.1: the margin
        // 0.4 (e^{-t} - 0.5)^2-shaped term bottoms out near 1e-9 at t = ln 2,
        // which brute simulation on the grid confirms.
        let mut m = new_monitor(2.0, 0.1);
        m.seed(0.4);
        let h = 1e-3;
        for i in 0..2000 {
            let t = i as f64 * h;
            let e = 0.4 * math::exp(-t);
            assert_eq!(m.detect_switch(e, t), SwitchDecision::NoSwitch, "t={t}");
        }
        assert_eq!(m.k, 0);
    }

    #[test]
    fn legacy_term_grows_in_k_at_fixed_time() {
        // a(k) e^{-t/a(k)} evaluated at t = 1 increases with k for a(k) = k+1
        let m = Monitor::new(MonitorVariant::Legacy, 2.0, 0.1, 1.0, 1.0, 0.0);
        let term = |k: u32| m.a_seq(k) * math::exp(-1.0 / m.a_seq(k));
        for k in 0..10 {
            assert!(term(k + 1) > term(k), "k={k}");
        }
    }

    #[test]
    fn global_seek_excess_is_c_and_vanishes() {
        let mut gs = Monitor::new(MonitorVariant::GlobalSeek, 2.0, 0.1, 1.0, 1.0, 2.0);
        let mut nw = new_monitor(2.0, 0.1);
        gs.seed(1.0);
        nw.seed(1.0);
        for k in [0u32, 1, 5, 100, 1_000_000] {
            gs.k = k;
            nw.k = k;
            let diff = gs.envelope(0.7) - nw.envelope(0.7);
            assert!((diff - gs.c_seq(k)).abs() < 1e-15);
        }
        assert!(gs.c_seq(1_000_000) < 3e-6);
    }

    #[test]
    fn validation_rules() {
        assert!(new_monitor(2.0, 0.0).validate().is_err());
        assert!(new_monitor(0.0, 0.1).validate().is_err());
        assert!(Monitor::new(MonitorVariant::GlobalSeek, 2.0, 0.1, 1.0, 1.0, 0.05)
            .validate()
            .is_err());
        assert!(Monitor::new(MonitorVariant::GlobalSeek, 2.0, 0.1, 1.0, 1.0, 0.5)
            .validate()
            .is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // strictly decreasing between switches, bounded below by r (inputs
        // kept where the decaying term is still resolvable in f64)
        #[test]
        fn envelope_monotone_and_floored(
            e_k in 1e-3f64..1e3,
            lambda in 0.1f64..5.0,
            r in 1e-4f64..1.0,
            t1 in 0.0f64..5.0,
            dt in 1e-4f64..10.0,
        ) {
            let mut m = new_monitor(lambda, r);
            m.seed(e_k);
            let a = m.envelope(t1);
            let b = m.envelope(t1 + dt);
            prop_assert!(b < a);
            prop_assert!(b >= r);
        }

        // after any switch the bound holds with slack exactly r (+ c(k))
        #[test]
        fn post_switch_slack(
            e in 0.0f64..100.0,
            e_k in 0.0f64..1.0,
            t in 0.1f64..10.0,
        ) {
            let mut m = new_monitor(2.0, 0.1);
            m.seed(e_k);
            if m.detect_switch(e, t) == SwitchDecision::SwitchRegistered {
                prop_assert!((m.envelope(t) - (e + 0.1)).abs() < 1e-12);
            } else {
                prop_assert!(e < m.envelope(t));
            }
        }
    }
}
