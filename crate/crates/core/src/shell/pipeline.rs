//! End-to-end design flow and artifact output.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{DesignConfig, RIPPLE_THRESHOLD_MARGIN_DB};
use super::{csv, touchstone};
use crate::error::{Error, Result};
use crate::microstrip::{self, MicrostripLine, SubstrateSpec, UShapeGeometry};
use crate::netlist::Netlist;
use crate::netsim::{self, BandMetrics, SParamSweep};
use crate::prototype::{self, PrototypeCoefficients};
use crate::synthesis::{self, BandpassElements, CouplingParams, FilterSpec};

pub const TOOLKIT_VERSION: &str = concat!("bpfsynth ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Prototype,
    Synthesis,
    Netlist,
    Simulation,
    Metrics,
    Geometry,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Config => "config",
            Stage::Prototype => "prototype",
            Stage::Synthesis => "synthesis",
            Stage::Netlist => "netlist",
            Stage::Simulation => "simulation",
            Stage::Metrics => "metrics",
            Stage::Geometry => "geometry",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorLayout {
    pub substrate: SubstrateSpec,
    pub line: MicrostripLine,
    pub geometry: UShapeGeometry,
    /// Bounding box in guided wavelengths.
    pub electrical_size: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub version: String,
    pub config: DesignConfig,
    pub filter: FilterSpec,
    pub validated_configuration: bool,
    pub prototype: PrototypeCoefficients,
    pub coupling: CouplingParams,
    pub elements: BandpassElements,
    pub netlist: Netlist,
    pub rl_threshold_db: f64,
    pub bands: Vec<BandMetrics>,
    pub layout: ResonatorLayout,
}

/// Everything the pipeline computes, before anything is written.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: DesignReport,
    pub sweep: SParamSweep,
}

/// Band threshold used when the config does not set one.
pub fn default_rl_threshold(spec: &FilterSpec) -> Result<f64> {
    Ok(prototype::return_loss_from_ripple(spec.ripple_db)? - RIPPLE_THRESHOLD_MARGIN_DB)
}

pub fn synthesize(
    cfg: &DesignConfig,
) -> std::result::Result<(FilterSpec, PrototypeCoefficients, synthesis::Synthesis), PipelineError> {
    cfg.validate().at(Stage::Config)?;
    let spec = cfg.filter_spec().at(Stage::Prototype)?;
    let proto = spec.prototype().at(Stage::Prototype)?;
    let syn = synthesis::bandpass_elements(&spec, &proto).at(Stage::Synthesis)?;
    Ok((spec, proto, syn))
}

pub fn layout(cfg: &DesignConfig) -> std::result::Result<ResonatorLayout, PipelineError> {
    cfg.validate().at(Stage::Config)?;
    let substrate = SubstrateSpec::from(cfg.substrate);
    let f0 = cfg.filter.f0_hz;
    let line = microstrip::synthesize_width(cfg.resonator.line_z0_ohm, &substrate, f0)
        .at(Stage::Geometry)?;
    let geometry =
        microstrip::u_fold_geometry(&line, f0, cfg.resonator.base_fraction).at(Stage::Geometry)?;
    let electrical_size =
        microstrip::electrical_size(geometry.bbox, line.lambda_g_m).at(Stage::Geometry)?;
    Ok(ResonatorLayout {
        substrate,
        line,
        geometry,
        electrical_size,
    })
}

/// prototype → synthesis → netlist → sweep → metrics → geometry.
pub fn compute(cfg: &DesignConfig) -> std::result::Result<PipelineOutput, PipelineError> {
    let (spec, proto, syn) = synthesize(cfg)?;
    let netlist = synthesis::build_netlist(&spec, &syn).at(Stage::Netlist)?;

    let grid = cfg.sweep.grid().at(Stage::Simulation)?;
    let sweep = netsim::sweep_sparams(&netlist, &grid);
    if let Some(bad) = sweep.singular.first() {
        return Err(PipelineError {
            stage: Stage::Simulation,
            source: Error::Netlist(bad.diagnostic.clone()),
        });
    }

    let rl_threshold_db = match cfg.metrics.rl_threshold_db {
        Some(t) => t,
        None => default_rl_threshold(&spec).at(Stage::Metrics)?,
    };
    let bands = netsim::extract_band_metrics(&sweep, rl_threshold_db).at(Stage::Metrics)?;
    let layout = layout(cfg)?;

    let report = DesignReport {
        version: TOOLKIT_VERSION.to_string(),
        config: cfg.clone(),
        validated_configuration: spec.is_validated_configuration() && proto.is_validated_order(),
        filter: spec,
        prototype: proto,
        coupling: syn.coupling,
        elements: syn.elements,
        netlist,
        rl_threshold_db,
        bands,
        layout,
    };
    Ok(PipelineOutput { report, sweep })
}

pub fn render_report(report: &DesignReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_report(text: &str) -> Result<DesignReport> {
    Ok(serde_json::from_str(text)?)
}

/// Writes all files or none: contents are staged in temporaries next to
/// their targets, then renamed; a failed rename removes earlier ones.
pub fn write_all(files: &[(PathBuf, String)]) -> Result<()> {
    use std::io::Write;

    let mut staged = Vec::with_capacity(files.len());
    for (path, text) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(path, e))?;
        tmp.write_all(text.as_bytes())
            .map_err(|e| Error::io(path, e))?;
        staged.push((path, tmp));
    }
    let mut done: Vec<&Path> = Vec::new();
    for (path, tmp) in staged {
        if let Err(e) = tmp.persist(path) {
            for p in done {
                let _ = std::fs::remove_file(p);
            }
            return Err(Error::io(path, e.error));
        }
        done.push(path);
    }
    Ok(())
}

/// Runs the full flow and writes whichever artifacts the config requests.
pub fn run_pipeline(cfg: &DesignConfig) -> std::result::Result<DesignReport, PipelineError> {
    let out = compute(cfg)?;
    let o = &cfg.outputs;
    let mut files = Vec::new();
    if let Some(p) = &o.report {
        files.push((p.clone(), render_report(&out.report).at(Stage::Output)?));
    }
    if let Some(p) = &o.touchstone {
        files.push((
            p.clone(),
            touchstone::render_touchstone(&out.sweep).at(Stage::Output)?,
        ));
    }
    if let Some(p) = &o.csv {
        files.push((p.clone(), csv::render_csv(&out.sweep).at(Stage::Output)?));
    }
    write_all(&files).at(Stage::Output)?;
    Ok(out.report)
}
