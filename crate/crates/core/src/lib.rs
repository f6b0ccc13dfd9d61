//! Output-feedback extremum seeking control via monitoring functions.
//!
//! The controller drives the output of an uncertain plant to the extremum of
//! an unknown static map using only output measurements. A relay control law
//! with an unknown direction is supervised by a monitoring function: a
//! decaying envelope on the output tracking error whose violation signals a
//! wrong control-direction estimate and triggers a relay flip. A first-order
//! norm observer bounds the unmeasured internal state for the modulation
//! design, and a time-scaling reduction extends the scheme to stable linear
//! plants of arbitrary relative degree.
//!
//! The crate is `no_std` (alloc only); file formats, the CLI, and scenario
//! I/O live in the companion `mfes-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod controller;
pub mod linalg;
pub mod map;
pub mod math;
pub mod metrics;
pub mod monitoring;
pub mod observer;
pub mod plant;
pub mod scenario;
pub mod sim;

pub use controller::{ControlMode, DominationBounds, PiSchedule, ReferenceModel, RelayController};
pub use map::{CostMap, MapDiagnostics};
pub use metrics::{
    MonitorBoundReport, NormBoundReport, RunMetrics, bound_check, check_norm_bound,
    compute_metrics,
};
pub use monitoring::{Monitor, MonitorVariant, SwitchDecision};
pub use observer::NormObserver;
pub use plant::{LinearSensorPlant, NormalFormPlant, SourceField};
pub use scenario::{
    ControllerSpec, GridSpec, MonitoringSpec, NoiseSpec, ObserverSpec, OutputSpec, PlantSpec,
    ScenarioConfig, Violation, preset_cart, preset_example1,
};
pub use sim::{RunOutcome, SimTrace, Termination, TimeGrid, TraceRow, euler_step, run_simulation};
