//! Coupled-resonator bandpass filter synthesis and circuit-level
//! simulation.
//!
//! The flow runs from a Chebyshev lowpass prototype ([`prototype`]) to
//! inverter-coupled shunt resonators ([`synthesis`]), through AC nodal
//! analysis ([`netsim`]) to S-parameters and band metrics. The
//! [`microstrip`] module sizes the folded half-wave resonator, and
//! [`shell`] ties the stages together behind a JSON configuration.
//!
//! ```
//! use bpfsynth::synthesis::{bandpass_elements, build_netlist, FilterSpec, Topology};
//! use bpfsynth::netsim::{sweep_sparams, extract_band_metrics, SweepGrid};
//!
//! let spec = FilterSpec::reference(Topology::DualBand);
//! let syn = bandpass_elements(&spec, &spec.prototype().unwrap()).unwrap();
//! let net = build_netlist(&spec, &syn).unwrap();
//! let sweep = sweep_sparams(&net, &SweepGrid::linear(1.2e9, 1.6e9, 801).unwrap());
//! let bands = extract_band_metrics(&sweep, 18.0).unwrap();
//! assert_eq!(bands.len(), 2);
//! ```

pub mod error;
pub mod microstrip;
pub mod netlist;
pub mod netsim;
pub mod prototype;
pub mod roots;
pub mod shell;
pub mod synthesis;

pub use error::{Error, Result};
