//! Design configuration file: a JSON object with SI-suffixed keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::microstrip::SubstrateSpec;
use crate::netsim::{Spacing, SweepGrid};
use crate::synthesis::{CouplingModel, FilterSpec, RippleSpec, Topology, REFERENCE_G1};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub f0_hz: f64,
    pub fbw: f64,
    pub z0_ohm: f64,
    pub order: usize,
    pub ripple: RippleSpec,
    pub topology: Topology,
    #[serde(default)]
    pub q_unloaded: Option<f64>,
    #[serde(default)]
    pub coupling_model: CouplingModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstrateConfig {
    pub eps_r: f64,
    pub h_m: f64,
    pub tan_delta: f64,
    pub t_metal_m: f64,
    pub sigma_s_per_m: f64,
}

impl Default for SubstrateConfig {
    fn default() -> Self {
        SubstrateSpec::rt6010().into()
    }
}

impl From<SubstrateSpec> for SubstrateConfig {
    fn from(s: SubstrateSpec) -> Self {
        SubstrateConfig {
            eps_r: s.eps_r,
            h_m: s.h_m,
            tan_delta: s.tan_delta,
            t_metal_m: s.t_metal_m,
            sigma_s_per_m: s.sigma_s_per_m,
        }
    }
}

impl From<SubstrateConfig> for SubstrateSpec {
    fn from(s: SubstrateConfig) -> Self {
        SubstrateSpec {
            eps_r: s.eps_r,
            h_m: s.h_m,
            tan_delta: s.tan_delta,
            t_metal_m: s.t_metal_m,
            sigma_s_per_m: s.sigma_s_per_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorConfig {
    /// Impedance of the line the resonator is drawn in.
    pub line_z0_ohm: f64,
    pub base_fraction: f64,
}

impl Default for ResonatorConfig {
    fn default() -> Self {
        ResonatorConfig {
            line_z0_ohm: 50.0,
            base_fraction: 1.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            f_start_hz: 1.2e9,
            f_stop_hz: 1.6e9,
            n_points: 4001,
            spacing: Spacing::Linear,
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Result<SweepGrid> {
        SweepGrid::new(self.f_start_hz, self.f_stop_hz, self.n_points, self.spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Return-loss level defining a passband. Defaults to the ripple-level
    /// return loss less [`RIPPLE_THRESHOLD_MARGIN_DB`].
    #[serde(default)]
    pub rl_threshold_db: Option<f64>,
}

/// Margin below the ripple-level return loss used as the default band
/// threshold, so equal-ripple touch points do not split a band.
pub const RIPPLE_THRESHOLD_MARGIN_DB: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub touchstone: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub filter: FilterConfig,
    #[serde(default)]
    pub substrate: SubstrateConfig,
    #[serde(default)]
    pub resonator: ResonatorConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

impl DesignConfig {
    /// 1.4 GHz, 3.4 %, two-pole design on 1.27 mm εr = 10.7 substrate.
    pub fn reference(topology: Topology) -> Self {
        DesignConfig {
            filter: FilterConfig {
                f0_hz: 1.4e9,
                fbw: 0.034,
                z0_ohm: 50.0,
                order: 2,
                ripple: RippleSpec::FitG1(REFERENCE_G1),
                topology,
                q_unloaded: None,
                coupling_model: CouplingModel::IdealInverter,
            },
            substrate: SubstrateConfig::default(),
            resonator: ResonatorConfig::default(),
            sweep: SweepConfig::default(),
            metrics: MetricsConfig::default(),
            outputs: OutputConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Checks every field against its invariants without doing any of
    /// the numeric work.
    pub fn validate(&self) -> Result<()> {
        let f = &self.filter;
        require_positive("f0_hz", f.f0_hz)?;
        if !(f.fbw > 0.0 && f.fbw < 1.0) {
            return Err(Error::domain("fbw", f.fbw, "must lie in (0, 1)"));
        }
        require_positive("z0_ohm", f.z0_ohm)?;
        if f.order == 0 {
            return Err(Error::domain("order", 0.0, "must be >= 1"));
        }
        match f.ripple {
            RippleSpec::RippleDb(v) => require_positive("ripple_db", v)?,
            RippleSpec::ReturnLossDb(v) => require_positive("return_loss_db", v)?,
            RippleSpec::FitG1(v) => require_positive("fit_g1", v)?,
        };
        if let Some(q) = f.q_unloaded {
            require_positive("q_unloaded", q)?;
        }

        SubstrateSpec::from(self.substrate).validate()?;
        require_positive("line_z0_ohm", self.resonator.line_z0_ohm)?;
        let bf = self.resonator.base_fraction;
        if !(bf > 0.0 && bf < 1.0) {
            return Err(Error::domain("base_fraction", bf, "must lie in (0, 1)"));
        }
        self.sweep.grid()?;
        if let Some(t) = self.metrics.rl_threshold_db {
            require_positive("rl_threshold_db", t)?;
        }

        let o = &self.outputs;
        let paths: Vec<&PathBuf> = [&o.report, &o.touchstone, &o.csv]
            .into_iter()
            .flatten()
            .collect();
        for (i, p) in paths.iter().enumerate() {
            if paths[..i].contains(p) {
                return Err(Error::Config(format!(
                    "output path {} requested twice",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    /// Resolves the filter section (fits the ripple when asked to).
    pub fn filter_spec(&self) -> Result<FilterSpec> {
        let f = &self.filter;
        Ok(
            FilterSpec::new(f.f0_hz, f.fbw, f.z0_ohm, f.order, f.ripple, f.topology)?
                .with_q_unloaded(f.q_unloaded)
                .with_coupling_model(f.coupling_model),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = DesignConfig::from_json(
            r#"{"filter": {"f0_hz": 1.4e9, "fbw": 0.034, "z0_ohm": 50, "order": 2,
                "ripple": {"return_loss_db": 20}, "topology": "single_band"}}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.sweep, SweepConfig::default());
        assert_eq!(cfg.filter.coupling_model, CouplingModel::IdealInverter);
        let spec = cfg.filter_spec().unwrap();
        assert!((spec.ripple_db - 0.04365).abs() < 1e-5);
        assert_eq!(spec.ripple_given, RippleSpec::ReturnLossDb(20.0));
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = DesignConfig::from_json(
            r#"{"filter": {"f0_hz": 1.4e9, "fbw": 0.034, "z0_ohm": 50, "order": 2,
                "ripple": {"ripple_db": 0.1}, "topology": "single_band", "f0_ghz": 1.4}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("f0_ghz"), "{err}");

        let err = DesignConfig::from_json(
            r#"{"filter": {"f0_hz": 1.4e9, "fbw": 0.034, "z0_ohm": 50, "order": 2,
                "ripple": {"ripple_db": 0.1}, "topology": "single_band"}, "plot": true}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("plot"), "{err}");
    }

    #[test]
    fn validation_names_fields() {
        let mut cfg = DesignConfig::reference(Topology::SingleBand);
        cfg.filter.fbw = 0.0;
        assert!(cfg.validate().unwrap_err().to_string().contains("fbw"));

        let mut cfg = DesignConfig::reference(Topology::SingleBand);
        cfg.sweep.n_points = 1;
        assert!(cfg.validate().unwrap_err().to_string().contains("n_points"));

        let mut cfg = DesignConfig::reference(Topology::SingleBand);
        cfg.outputs.csv = Some("a".into());
        cfg.outputs.touchstone = Some("a".into());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reference_round_trips_through_json() {
        let cfg = DesignConfig::reference(Topology::DualBand);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert!(text.contains("\"fit_g1\""));
        assert_eq!(DesignConfig::from_json(&text).unwrap(), cfg);
    }
}
