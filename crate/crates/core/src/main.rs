use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bpfsynth::netsim;
use bpfsynth::shell::pipeline::{self, PipelineError, Stage};
use bpfsynth::shell::{csv, touchstone, DesignConfig};
use bpfsynth::synthesis::{self, RippleSpec, Topology};
use bpfsynth::Error;

#[derive(Parser)]
#[command(
    name = "bpfsynth",
    version,
    about = "Coupled-resonator bandpass filter design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chebyshev lowpass prototype g-values.
    Prototype(Common),
    /// Element values, coupling parameters and netlist.
    Synth(Common),
    /// S-parameter sweep and band metrics.
    Sim {
        #[command(flatten)]
        common: Common,
        /// Touchstone output path.
        #[arg(long)]
        s2p: Option<PathBuf>,
        /// CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Microstrip line and U-resonator geometry.
    Geom {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        line_z0: Option<f64>,
        #[arg(long)]
        base_fraction: Option<f64>,
    },
    /// Full pipeline; writes the outputs named in the config or flags.
    Report {
        #[command(flatten)]
        common: Common,
        /// Report JSON path (stdout when absent and not set in the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        s2p: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Single,
    Dual,
}

#[derive(Args)]
struct Common {
    /// JSON design configuration; the 1.4 GHz reference design if absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long)]
    fbw: Option<f64>,
    #[arg(long, value_enum)]
    topology: Option<TopologyArg>,
    /// `start:stop:points` in Hz.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, conflicts_with_all = ["return_loss_db", "fit_g1"])]
    ripple_db: Option<f64>,
    #[arg(long, conflicts_with = "fit_g1")]
    return_loss_db: Option<f64>,
    #[arg(long)]
    fit_g1: Option<f64>,
    /// Unloaded resonator Q.
    #[arg(long)]
    qu: Option<f64>,
}

fn config_err(e: Error) -> PipelineError {
    PipelineError {
        stage: Stage::Config,
        source: e,
    }
}

impl Common {
    fn load(&self) -> Result<DesignConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(p) => DesignConfig::load(p).map_err(config_err)?,
            None => DesignConfig::reference(Topology::SingleBand),
        };
        let f = &mut cfg.filter;
        if let Some(v) = self.f0 {
            f.f0_hz = v;
        }
        if let Some(v) = self.fbw {
            f.fbw = v;
        }
        if let Some(t) = self.topology {
            f.topology = match t {
                TopologyArg::Single => Topology::SingleBand,
                TopologyArg::Dual => Topology::DualBand,
            };
        }
        if let Some(n) = self.order {
            f.order = n;
        }
        if let Some(v) = self.ripple_db {
            f.ripple = RippleSpec::RippleDb(v);
        }
        if let Some(v) = self.return_loss_db {
            f.ripple = RippleSpec::ReturnLossDb(v);
        }
        if let Some(v) = self.fit_g1 {
            f.ripple = RippleSpec::FitG1(v);
        }
        if self.qu.is_some() {
            f.q_unloaded = self.qu;
        }
        if let Some(s) = &self.sweep {
            let parts: Vec<&str> = s.split(':').collect();
            let bad = || {
                config_err(Error::Config(format!(
                    "--sweep expects start:stop:points, got {s}"
                )))
            };
            if parts.len() != 3 {
                return Err(bad());
            }
            cfg.sweep.f_start_hz = parts[0].parse().map_err(|_| bad())?;
            cfg.sweep.f_stop_hz = parts[1].parse().map_err(|_| bad())?;
            cfg.sweep.n_points = parts[2].parse().map_err(|_| bad())?;
        }
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), PipelineError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| PipelineError {
        stage: Stage::Output,
        source: e.into(),
    })?;
    println!("{text}");
    Ok(())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Prototype(common) => {
            let cfg = common.load()?;
            let proto_err = |source| PipelineError {
                stage: Stage::Prototype,
                source,
            };
            let spec = cfg.filter_spec().map_err(proto_err)?;
            let proto = spec.prototype().map_err(proto_err)?;
            #[derive(Serialize)]
            struct Out<'a> {
                ripple_given: RippleSpec,
                ripple_db: f64,
                prototype: &'a bpfsynth::prototype::PrototypeCoefficients,
            }
            print_json(&Out {
                ripple_given: spec.ripple_given,
                ripple_db: spec.ripple_db,
                prototype: &proto,
            })
        }
        Command::Synth(common) => {
            let cfg = common.load()?;
            let (spec, proto, syn) = pipeline::synthesize(&cfg)?;
            let netlist =
                synthesis::build_netlist(&spec, &syn).map_err(|source| PipelineError {
                    stage: Stage::Netlist,
                    source,
                })?;
            print_json(&serde_json::json!({
                "filter": spec,
                "prototype": proto,
                "coupling": syn.coupling,
                "elements": syn.elements,
                "netlist": netlist,
            }))
        }
        Command::Sim {
            common,
            s2p,
            csv: csv_path,
        } => {
            let cfg = common.load()?;
            let out = pipeline::compute(&cfg)?;
            let out_err = |source| PipelineError {
                stage: Stage::Output,
                source,
            };
            let mut files = Vec::new();
            if let Some(p) = s2p {
                files.push((
                    p,
                    touchstone::render_touchstone(&out.sweep).map_err(out_err)?,
                ));
            }
            if let Some(p) = csv_path {
                files.push((p, csv::render_csv(&out.sweep).map_err(out_err)?));
            }
            pipeline::write_all(&files).map_err(out_err)?;
            print_json(&serde_json::json!({
                "rl_threshold_db": out.report.rl_threshold_db,
                "bands": out.report.bands,
                "peaks": netsim::transmission_peaks(&out.sweep),
            }))
        }
        Command::Geom {
            common,
            line_z0,
            base_fraction,
        } => {
            let mut cfg = common.load()?;
            if let Some(z) = line_z0 {
                cfg.resonator.line_z0_ohm = z;
            }
            if let Some(b) = base_fraction {
                cfg.resonator.base_fraction = b;
            }
            print_json(&pipeline::layout(&cfg)?)
        }
        Command::Report {
            common,
            out,
            s2p,
            csv,
        } => {
            let mut cfg = common.load()?;
            if out.is_some() {
                cfg.outputs.report = out;
            }
            if s2p.is_some() {
                cfg.outputs.touchstone = s2p;
            }
            if csv.is_some() {
                cfg.outputs.csv = csv;
            }
            let to_stdout = cfg.outputs.report.is_none();
            let report = pipeline::run_pipeline(&cfg)?;
            if to_stdout {
                print_json(&report)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
