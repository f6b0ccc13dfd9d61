//! Scenario files: flat `key = value` lines grouped under `[section]`
//! headers. Unknown sections or keys are errors, `#` starts a comment.
//! Overrides address keys as `section.key`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use mfes_core::controller::{ControlMode, DominationBounds, PiSchedule};
use mfes_core::map::{CostMap, GaussComponent};
use mfes_core::monitoring::MonitorVariant;
use mfes_core::plant::{LinearSensorPlant, NormalFormPlant, SourceField};
use mfes_core::scenario::{
    ControllerSpec, GridSpec, MonitoringSpec, NoiseSpec, ObserverSpec, OutputSpec, PlantSpec,
    ScenarioConfig,
};

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    (
        "plant",
        &[
            "kind", "eta_dim", "a_eta_eta", "a_eta_z", "a_z_eta", "a_z_z", "phi2", "phi2_min",
            "a", "b", "c",
        ],
    ),
    (
        "map",
        &["kind", "amplitudes", "centers", "widths", "offset", "curvature", "center", "z", "y"],
    ),
    (
        "field",
        &[
            "amplitude",
            "width",
            "ambient",
            "cap",
            "source_position",
            "source_off_until",
            "move_start",
            "move_end",
            "move_to",
        ],
    ),
    (
        "controller",
        &[
            "mode", "lambda", "k_m", "y_m0", "y_sat", "delta", "r", "kp_min", "l_phi", "mu",
            "alpha1_gain", "phi1_gain", "phi1_offset", "phi_bar_offset", "phi_bar_slope",
            "pi_enabled", "pi_a_offset", "pi_a_slope", "pi_cap", "pi_dwell",
        ],
    ),
    ("observer", &["enabled", "lambda0", "gain", "offset", "eta_bar0"]),
    ("monitoring", &["variant", "a_offset", "a_slope", "c_scale"]),
    ("grid", &["h", "t_end"]),
    ("init", &["z0", "eta0", "x0", "v0"]),
    ("noise", &["amplitude", "seed"]),
    ("diagnostics", &["guard", "time_dilation", "freeze_sigma"]),
];

fn key_known(section: &str, key: &str) -> bool {
    KNOWN_KEYS
        .iter()
        .any(|(s, keys)| *s == section && keys.contains(&key))
}

/// Parsed but untyped scenario text; overrides are applied at this level.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig> {
        let mut cfg = RawConfig::default();
        let mut section = String::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim().to_string();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) {
                    bail!("line {}: unknown section [{}]", ln + 1, name);
                }
                section = name;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", ln + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if section.is_empty() {
                bail!("line {}: key outside any [section]", ln + 1);
            }
            if !key_known(&section, key) {
                bail!("line {}: unknown key {}.{}", ln + 1, section, key);
            }
            cfg.sections
                .entry(section.clone())
                .or_default()
                .insert(key.to_string(), value.to_string());
        }
        Ok(cfg)
    }

    /// Applies a `section.key=value` override; the key must be known.
    pub fn set(&mut self, dotted: &str, value: &str) -> Result<()> {
        let (section, key) = dotted
            .split_once('.')
            .ok_or_else(|| anyhow!("override `{dotted}` must look like section.key"))?;
        if !key_known(section, key) {
            bail!("override names unknown config key {section}.{key}");
        }
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (section, keys) in &self.sections {
            let _ = writeln!(out, "[{section}]");
            for (k, v) in keys {
                let _ = writeln!(out, "{k} = {v}");
            }
            let _ = writeln!(out);
        }
        out
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(|s| s.as_str())
    }

    fn f64_req(&self, section: &str, key: &str) -> Result<f64> {
        let v = self
            .get(section, key)
            .ok_or_else(|| anyhow!("missing required key {section}.{key}"))?;
        v.parse::<f64>()
            .with_context(|| format!("{section}.{key}: `{v}` is not a number"))
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(section, key) {
            Some(v) => v
                .parse::<f64>()
                .with_context(|| format!("{section}.{key}: `{v}` is not a number")),
            None => Ok(default),
        }
    }

    fn f64_opt(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            Some(v) => Ok(Some(
                v.parse::<f64>()
                    .with_context(|| format!("{section}.{key}: `{v}` is not a number"))?,
            )),
            None => Ok(None),
        }
    }

    fn list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        let v = self
            .get(section, key)
            .ok_or_else(|| anyhow!("missing required key {section}.{key}"))?;
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("{section}.{key}: `{s}` is not a number"))
            })
            .collect()
    }

    fn list_or(&self, section: &str, key: &str, default: Vec<f64>) -> Result<Vec<f64>> {
        if self.get(section, key).is_some() {
            self.list(section, key)
        } else {
            Ok(default)
        }
    }

    fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => bail!("{section}.{key}: `{v}` is not a boolean"),
            None => Ok(default),
        }
    }

    /// Builds the typed scenario from the raw keys.
    pub fn build(&self) -> Result<ScenarioConfig> {
        let plant = match self.get("plant", "kind").unwrap_or("normal-form") {
            "normal-form" => {
                let eta_dim = self.f64_or("plant", "eta_dim", 1.0)? as usize;
                let eta0 = self.list_or("init", "eta0", vec![0.0; eta_dim])?;
                let z0 = self.f64_or("init", "z0", 0.0)?;
                PlantSpec::NormalForm(NormalFormPlant {
                    eta: eta0,
                    z: z0,
                    a_eta_eta: self.list_or("plant", "a_eta_eta", vec![0.0; eta_dim * eta_dim])?,
                    a_eta_z: self.list_or("plant", "a_eta_z", vec![0.0; eta_dim])?,
                    a_z_eta: self.list_or("plant", "a_z_eta", vec![0.0; eta_dim])?,
                    a_z_z: self.f64_or("plant", "a_z_z", 0.0)?,
                    phi2: self.f64_or("plant", "phi2", 1.0)?,
                    phi2_min: self.f64_or("plant", "phi2_min", 1.0)?,
                })
            }
            "linear-sensor" => {
                let b = self.list("plant", "b")?;
                let n = b.len();
                let x0 = self.list_or("init", "x0", vec![0.0; n])?;
                let v0 = self.f64_or("init", "v0", 0.0)?;
                let a = self.list("plant", "a")?;
                let c = self.list("plant", "c")?;
                PlantSpec::LinearSensor(
                    LinearSensorPlant::new(a, b, c, x0, v0).map_err(|e| anyhow!("plant: {e}"))?,
                )
            }
            other => bail!("plant.kind: unknown kind `{other}`"),
        };

        let output = if self.sections.contains_key("field") {
            OutputSpec::Field(SourceField {
                amplitude: self.f64_req("field", "amplitude")?,
                width: self.f64_req("field", "width")?,
                ambient: self.f64_or("field", "ambient", 0.0)?,
                cap: self.f64_or("field", "cap", f64::INFINITY)?,
                source_position: self.f64_or("field", "source_position", 0.0)?,
                source_off_until: self.f64_or("field", "source_off_until", 0.0)?,
                move_start: self.f64_or("field", "move_start", 0.0)?,
                move_end: self.f64_or("field", "move_end", 0.0)?,
                move_to: self.f64_or("field", "move_to", self.f64_or("field", "source_position", 0.0)?)?,
            })
        } else {
            let map = match self.get("map", "kind").unwrap_or("gaussian-mixture") {
                "gaussian-mixture" => {
                    let amps = self.list("map", "amplitudes")?;
                    let centers = self.list("map", "centers")?;
                    let widths = self.list("map", "widths")?;
                    if amps.len() != centers.len() || amps.len() != widths.len() {
                        bail!("map: amplitudes/centers/widths must have equal length");
                    }
                    CostMap::GaussianMixture(
                        amps.into_iter()
                            .zip(centers)
                            .zip(widths)
                            .map(|((amplitude, center), width)| GaussComponent {
                                amplitude,
                                center,
                                width,
                            })
                            .collect(),
                    )
                }
                "quadratic" => CostMap::Quadratic {
                    offset: self.f64_req("map", "offset")?,
                    curvature: self.f64_req("map", "curvature")?,
                    center: self.f64_req("map", "center")?,
                },
                "table" => CostMap::Table {
                    z: self.list("map", "z")?,
                    y: self.list("map", "y")?,
                },
                other => bail!("map.kind: unknown kind `{other}`"),
            };
            OutputSpec::Map(map)
        };

        let mode = match self.get("controller", "mode").unwrap_or("rd1") {
            "rd1" => ControlMode::RelativeDegreeOne,
            "scaled" => ControlMode::Scaled,
            other => bail!("controller.mode: unknown mode `{other}`"),
        };
        let controller = ControllerSpec {
            mode,
            lambda: self.f64_req("controller", "lambda")?,
            k_m: self.f64_req("controller", "k_m")?,
            y_m0: self.f64_or("controller", "y_m0", 0.0)?,
            y_sat: self.f64_opt("controller", "y_sat")?,
            delta: self.f64_req("controller", "delta")?,
            r: self.f64_req("controller", "r")?,
            kp_min: self.f64_opt("controller", "kp_min")?,
            l_phi: self.f64_opt("controller", "l_phi")?,
            mu: self.f64_or("controller", "mu", 1.0)?,
            bounds: DominationBounds {
                alpha1_gain: self.f64_or("controller", "alpha1_gain", 0.0)?,
                phi1_gain: self.f64_or("controller", "phi1_gain", 0.0)?,
                phi1_offset: self.f64_or("controller", "phi1_offset", 0.0)?,
                phi_bar_offset: self.f64_or("controller", "phi_bar_offset", 0.0)?,
                phi_bar_slope: self.f64_or("controller", "phi_bar_slope", 0.0)?,
            },
            pi: PiSchedule {
                enabled: self.bool_or("controller", "pi_enabled", false)?,
                a_offset: self.f64_or("controller", "pi_a_offset", 1.0)?,
                a_slope: self.f64_or("controller", "pi_a_slope", 1.0)?,
                cap: self.f64_or("controller", "pi_cap", 10.0)?,
                dwell: self.f64_or("controller", "pi_dwell", 1.0)?,
            },
        };

        let observer = if self.bool_or("observer", "enabled", self.sections.contains_key("observer"))? {
            Some(ObserverSpec {
                lambda0: self.f64_req("observer", "lambda0")?,
                gain: self.f64_or("observer", "gain", 0.0)?,
                offset: self.f64_or("observer", "offset", 0.0)?,
                eta_bar0: self.f64_or("observer", "eta_bar0", 0.0)?,
            })
        } else {
            None
        };

        let monitoring = MonitoringSpec {
            variant: match self.get("monitoring", "variant").unwrap_or("new") {
                "new" => MonitorVariant::New,
                "legacy" => MonitorVariant::Legacy,
                "global-seek" => MonitorVariant::GlobalSeek,
                other => bail!("monitoring.variant: unknown variant `{other}`"),
            },
            a_offset: self.f64_or("monitoring", "a_offset", 1.0)?,
            a_slope: self.f64_or("monitoring", "a_slope", 1.0)?,
            c_scale: self.f64_or("monitoring", "c_scale", 2.0)?,
        };

        let freeze = self.f64_opt("diagnostics", "freeze_sigma")?;
        Ok(ScenarioConfig {
            plant,
            output,
            controller,
            observer,
            monitoring,
            grid: GridSpec {
                step: self.f64_req("grid", "h")?,
                horizon: self.f64_req("grid", "t_end")?,
            },
            noise: NoiseSpec {
                amplitude: self.f64_or("noise", "amplitude", 0.0)?,
                seed: match self.get("noise", "seed") {
                    Some(v) => v
                        .parse::<u64>()
                        .with_context(|| format!("noise.seed: `{v}` is not an integer"))?,
                    None => 0,
                },
            },
            guard: self.f64_or("diagnostics", "guard", 1e6)?,
            time_dilation: self.f64_or("diagnostics", "time_dilation", 1.0)?,
            freeze_direction: freeze.map(|f| f as i8),
        })
    }
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Serializes a scenario back to the raw key/value representation, so preset
/// scenarios accept the same overrides as file-based ones.
pub fn from_scenario(config: &ScenarioConfig) -> RawConfig {
    let mut raw = RawConfig::default();
    let mut put = |section: &str, key: &str, value: String| {
        raw.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value);
    };

    match &config.plant {
        PlantSpec::NormalForm(p) => {
            put("plant", "kind", "normal-form".into());
            put("plant", "eta_dim", format!("{}", p.eta_dim()));
            put("plant", "a_eta_eta", fmt_list(&p.a_eta_eta));
            put("plant", "a_eta_z", fmt_list(&p.a_eta_z));
            put("plant", "a_z_eta", fmt_list(&p.a_z_eta));
            put("plant", "a_z_z", format!("{}", p.a_z_z));
            put("plant", "phi2", format!("{}", p.phi2));
            put("plant", "phi2_min", format!("{}", p.phi2_min));
            put("init", "z0", format!("{}", p.z));
            put("init", "eta0", fmt_list(&p.eta));
        }
        PlantSpec::LinearSensor(p) => {
            put("plant", "kind", "linear-sensor".into());
            put("plant", "a", fmt_list(&p.a));
            put("plant", "b", fmt_list(&p.b));
            put("plant", "c", fmt_list(&p.c));
            put("init", "x0", fmt_list(&p.x));
            put("init", "v0", format!("{}", p.v));
        }
    }

    match &config.output {
        OutputSpec::Map(CostMap::GaussianMixture(comps)) => {
            put("map", "kind", "gaussian-mixture".into());
            put("map", "amplitudes", fmt_list(&comps.iter().map(|c| c.amplitude).collect::<Vec<_>>()));
            put("map", "centers", fmt_list(&comps.iter().map(|c| c.center).collect::<Vec<_>>()));
            put("map", "widths", fmt_list(&comps.iter().map(|c| c.width).collect::<Vec<_>>()));
        }
        OutputSpec::Map(CostMap::Quadratic { offset, curvature, center }) => {
            put("map", "kind", "quadratic".into());
            put("map", "offset", format!("{offset}"));
            put("map", "curvature", format!("{curvature}"));
            put("map", "center", format!("{center}"));
        }
        OutputSpec::Map(CostMap::Table { z, y }) => {
            put("map", "kind", "table".into());
            put("map", "z", fmt_list(z));
            put("map", "y", fmt_list(y));
        }
        OutputSpec::Field(f) => {
            put("field", "amplitude", format!("{}", f.amplitude));
            put("field", "width", format!("{}", f.width));
            put("field", "ambient", format!("{}", f.ambient));
            put("field", "cap", format!("{}", f.cap));
            put("field", "source_position", format!("{}", f.source_position));
            put("field", "source_off_until", format!("{}", f.source_off_until));
            put("field", "move_start", format!("{}", f.move_start));
            put("field", "move_end", format!("{}", f.move_end));
            put("field", "move_to", format!("{}", f.move_to));
        }
    }

    let c = &config.controller;
    put(
        "controller",
        "mode",
        match c.mode {
            ControlMode::RelativeDegreeOne => "rd1".into(),
            ControlMode::Scaled => "scaled".into(),
        },
    );
    put("controller", "lambda", format!("{}", c.lambda));
    put("controller", "k_m", format!("{}", c.k_m));
    put("controller", "y_m0", format!("{}", c.y_m0));
    if let Some(s) = c.y_sat {
        put("controller", "y_sat", format!("{s}"));
    }
    put("controller", "delta", format!("{}", c.delta));
    put("controller", "r", format!("{}", c.r));
    if let Some(k) = c.kp_min {
        put("controller", "kp_min", format!("{k}"));
    }
    if let Some(l) = c.l_phi {
        put("controller", "l_phi", format!("{l}"));
    }
    put("controller", "mu", format!("{}", c.mu));
    put("controller", "alpha1_gain", format!("{}", c.bounds.alpha1_gain));
    put("controller", "phi1_gain", format!("{}", c.bounds.phi1_gain));
    put("controller", "phi1_offset", format!("{}", c.bounds.phi1_offset));
    put("controller", "phi_bar_offset", format!("{}", c.bounds.phi_bar_offset));
    put("controller", "phi_bar_slope", format!("{}", c.bounds.phi_bar_slope));
    put("controller", "pi_enabled", format!("{}", c.pi.enabled));
    put("controller", "pi_a_offset", format!("{}", c.pi.a_offset));
    put("controller", "pi_a_slope", format!("{}", c.pi.a_slope));
    put("controller", "pi_cap", format!("{}", c.pi.cap));
    put("controller", "pi_dwell", format!("{}", c.pi.dwell));

    match &config.observer {
        Some(o) => {
            put("observer", "enabled", "true".into());
            put("observer", "lambda0", format!("{}", o.lambda0));
            put("observer", "gain", format!("{}", o.gain));
            put("observer", "offset", format!("{}", o.offset));
            put("observer", "eta_bar0", format!("{}", o.eta_bar0));
        }
        None => {}
    }

    put(
        "monitoring",
        "variant",
        match config.monitoring.variant {
            MonitorVariant::New => "new".into(),
            MonitorVariant::Legacy => "legacy".into(),
            MonitorVariant::GlobalSeek => "global-seek".into(),
        },
    );
    put("monitoring", "a_offset", format!("{}", config.monitoring.a_offset));
    put("monitoring", "a_slope", format!("{}", config.monitoring.a_slope));
    put("monitoring", "c_scale", format!("{}", config.monitoring.c_scale));

    put("grid", "h", format!("{}", config.grid.step));
    put("grid", "t_end", format!("{}", config.grid.horizon));
    put("noise", "amplitude", format!("{}", config.noise.amplitude));
    put("noise", "seed", format!("{}", config.noise.seed));
    put("diagnostics", "guard", format!("{}", config.guard));
    put("diagnostics", "time_dilation", format!("{}", config.time_dilation));
    if let Some(f) = config.freeze_direction {
        put("diagnostics", "freeze_sigma", format!("{f}"));
    }

    raw
}
