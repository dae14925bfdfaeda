//! Lowpass-to-bandpass transformation onto inverter-coupled shunt
//! resonators, plus the single-band and dual-band netlist builders.
//!
//! All resonators are identical shunt LC tanks with susceptance slope
//! `b = ω0·C`. Couplings are admittance inverters; in
//! [`CouplingModel::InductivePi`] each inverter is realized at `f0` by an
//! inductor Π whose negative shunt arms are folded into the neighbouring
//! tanks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::netlist::{Netlist, NetlistBuilder, Port, GROUND};
use crate::prototype::{self, PrototypeCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    SingleBand,
    DualBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingModel {
    #[default]
    IdealInverter,
    InductivePi,
}

/// How the passband ripple was specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RippleSpec {
    RippleDb(f64),
    ReturnLossDb(f64),
    /// Ripple recovered from a published `g1` at the filter order.
    FitG1(f64),
}

impl RippleSpec {
    pub fn resolve(&self, order: usize) -> Result<f64> {
        match *self {
            RippleSpec::RippleDb(r) => require_positive("ripple_db", r),
            RippleSpec::ReturnLossDb(rl) => prototype::ripple_from_return_loss(rl),
            RippleSpec::FitG1(g1) => prototype::fit_ripple_to_g1(order, g1),
        }
    }
}

/// Designer intent for one filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub f0_hz: f64,
    pub fbw: f64,
    pub z0_ohm: f64,
    pub order: usize,
    /// Resolved passband ripple.
    pub ripple_db: f64,
    /// What the designer actually supplied.
    pub ripple_given: RippleSpec,
    pub topology: Topology,
    pub q_unloaded: Option<f64>,
    pub coupling_model: CouplingModel,
}

/// `g1` of the two-pole reference prototype.
pub const REFERENCE_G1: f64 = 0.6648;

impl FilterSpec {
    pub fn new(
        f0_hz: f64,
        fbw: f64,
        z0_ohm: f64,
        order: usize,
        ripple: RippleSpec,
        topology: Topology,
    ) -> Result<Self> {
        check_fields(f0_hz, fbw, z0_ohm, order, None)?;
        let ripple_db = ripple.resolve(order)?;
        Ok(FilterSpec {
            f0_hz,
            fbw,
            z0_ohm,
            order,
            ripple_db,
            ripple_given: ripple,
            topology,
            q_unloaded: None,
            coupling_model: CouplingModel::IdealInverter,
        })
    }

    /// The 1.4 GHz, 3.4 % two-pole design in a 50 Ω system, with ripple
    /// fitted to `g1 = 0.6648`.
    pub fn reference(topology: Topology) -> Self {
        Self::new(
            1.4e9,
            0.034,
            50.0,
            2,
            RippleSpec::FitG1(REFERENCE_G1),
            topology,
        )
        .expect("reference design is valid")
    }

    pub fn with_q_unloaded(mut self, q: Option<f64>) -> Self {
        self.q_unloaded = q;
        self
    }

    pub fn with_coupling_model(mut self, model: CouplingModel) -> Self {
        self.coupling_model = model;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_fields(
            self.f0_hz,
            self.fbw,
            self.z0_ohm,
            self.order,
            self.q_unloaded,
        )?;
        require_positive("ripple_db", self.ripple_db)?;
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f0_hz
    }

    /// Whether this configuration is one the synthesis was checked against
    /// (two-pole single band, or its four-resonator dual-band extension).
    pub fn is_validated_configuration(&self) -> bool {
        self.order == 2
    }

    pub fn prototype(&self) -> Result<PrototypeCoefficients> {
        prototype::chebyshev_g_values(self.order, self.ripple_db)
    }
}

fn check_fields(f0: f64, fbw: f64, z0: f64, order: usize, qu: Option<f64>) -> Result<()> {
    require_positive("f0_hz", f0)?;
    if !(fbw > 0.0 && fbw < 1.0) {
        return Err(Error::domain("fbw", fbw, "must lie in (0, 1)"));
    }
    require_positive("z0_ohm", z0)?;
    if order == 0 {
        return Err(Error::domain("order", 0.0, "must be >= 1"));
    }
    if let Some(q) = qu {
        require_positive("q_unloaded", q)?;
    }
    Ok(())
}

/// Coupling coefficient between adjacent resonators, `FBW / sqrt(g1·g2)`.
pub fn coupling_coefficient(fbw: f64, g1: f64, g2: f64) -> Result<f64> {
    require_positive("fbw", fbw)?;
    require_positive("g1", g1)?;
    require_positive("g2", g2)?;
    Ok(fbw / (g1 * g2).sqrt())
}

/// External quality factor of an end resonator, `g0·g1 / FBW`.
pub fn external_q(fbw: f64, g0: f64, g1: f64) -> Result<f64> {
    require_positive("fbw", fbw)?;
    require_positive("g0", g0)?;
    require_positive("g1", g1)?;
    Ok(g0 * g1 / fbw)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    /// Coupling coefficient of the first resonator pair.
    pub m: f64,
    /// Input external Q.
    pub qe: f64,
    /// Susceptance slope `ω0·C` of every resonator, S.
    pub b_slope: f64,
    /// Input inverter, S.
    pub j01: f64,
    /// First inter-resonator inverter, S.
    pub j12: f64,
    /// Output inverter, S.
    pub j_out: f64,
    /// Every inverter along the main line, `J(k,k+1)` for `k = 0..=n`.
    pub inverters: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandpassElements {
    pub c_res: f64,
    pub l_res: f64,
    /// `1/(ω0·J01)`.
    pub l_io: f64,
    /// `1/(ω0·J12)`.
    pub l_inter: f64,
    /// `1/(ω0·J)` for every main-line inverter.
    pub l_couplings: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub elements: BandpassElements,
    pub coupling: CouplingParams,
}

/// Denormalizes a prototype onto identical shunt resonators.
pub fn bandpass_elements(spec: &FilterSpec, proto: &PrototypeCoefficients) -> Result<Synthesis> {
    spec.validate()?;
    if spec.order != proto.order {
        return Err(Error::Config(format!(
            "filter order {} does not match prototype order {}",
            spec.order, proto.order
        )));
    }
    if spec.order < 2 {
        return Err(Error::Config(
            "coupled-resonator synthesis needs at least two resonators".into(),
        ));
    }

    let n = spec.order;
    let g = &proto.g;
    let w0 = spec.omega0();
    let (fbw, z0) = (spec.fbw, spec.z0_ohm);

    let c_res = g[1] / (fbw * w0 * z0);
    let l_res = 1.0 / (w0 * w0 * c_res);
    let b_slope = w0 * c_res;

    let j01 = (b_slope * fbw / (z0 * g[0] * g[1])).sqrt();
    let j_out = (b_slope * fbw / (z0 * g[n] * g[n + 1])).sqrt();
    let mut inverters = Vec::with_capacity(n + 1);
    inverters.push(j01);
    for k in 1..n {
        inverters.push(b_slope * coupling_coefficient(fbw, g[k], g[k + 1])?);
    }
    inverters.push(j_out);

    let m = coupling_coefficient(fbw, g[1], g[2])?;
    let qe = external_q(fbw, g[0], g[1])?;
    let j12 = b_slope * m;

    let l_couplings: Vec<f64> = inverters.iter().map(|j| 1.0 / (w0 * j)).collect();
    Ok(Synthesis {
        elements: BandpassElements {
            c_res,
            l_res,
            l_io: 1.0 / (w0 * j01),
            l_inter: 1.0 / (w0 * j12),
            l_couplings,
        },
        coupling: CouplingParams {
            m,
            qe,
            b_slope,
            j01,
            j12,
            j_out,
            inverters,
        },
    })
}

fn resonator_name(k: usize) -> String {
    if k < 26 {
        ((b'A' + k as u8) as char).to_string()
    } else {
        format!("R{}", k + 1)
    }
}

/// Collects couplings and resonators, then lowers them to netlist elements
/// for the selected coupling model.
struct CircuitPlan<'a> {
    spec: &'a FilterSpec,
    syn: &'a Synthesis,
    builder: NetlistBuilder,
    resonators: Vec<usize>,
    couplings: Vec<(usize, usize, f64)>,
}

impl<'a> CircuitPlan<'a> {
    fn new(spec: &'a FilterSpec, syn: &'a Synthesis) -> Self {
        CircuitPlan {
            spec,
            syn,
            builder: NetlistBuilder::new(),
            resonators: Vec::new(),
            couplings: Vec::new(),
        }
    }

    fn resonator(&mut self, name: String) -> usize {
        let id = self.builder.node(name);
        self.resonators.push(id);
        id
    }

    fn couple(&mut self, a: usize, b: usize, j: f64) {
        if j > 0.0 {
            self.couplings.push((a, b, j));
        }
    }

    fn finish(mut self, p1: usize, p2: usize) -> Result<Netlist> {
        let e = &self.syn.elements;
        let b_slope = self.syn.coupling.b_slope;
        let w0 = self.spec.omega0();
        let node_count = self.resonators.len() + 2;
        let mut absorbed = vec![0.0; node_count + 1];

        match self.spec.coupling_model {
            CouplingModel::IdealInverter => {
                for &(a, b, j) in &self.couplings {
                    self.builder.inverter(a, b, j);
                }
            }
            CouplingModel::InductivePi => {
                for &(a, b, j) in &self.couplings {
                    let l = 1.0 / (w0 * j);
                    self.builder.inductor(a, b, l);
                    absorbed[a] += 1.0 / l;
                    absorbed[b] += 1.0 / l;
                }
                // No tank on the port side: use the capacitor with the same
                // susceptance as the negative arm at f0.
                for p in [p1, p2] {
                    if absorbed[p] > 0.0 {
                        self.builder.capacitor(p, GROUND, absorbed[p] / (w0 * w0));
                    }
                }
            }
        }

        for &r in &self.resonators {
            let inv_l = 1.0 / e.l_res - absorbed[r];
            if inv_l <= 0.0 {
                return Err(Error::Config(format!(
                    "coupling arms at node {r} exceed the resonator inductance; \
                     the inductive Π realization is not possible"
                )));
            }
            self.builder.capacitor(r, GROUND, e.c_res);
            self.builder.inductor(r, GROUND, 1.0 / inv_l);
            if let Some(q) = self.spec.q_unloaded {
                self.builder.resistor(r, GROUND, q / b_slope);
            }
        }

        let z0 = self.spec.z0_ohm;
        self.builder.build(
            Port {
                node: p1,
                z_ref: z0,
            },
            Port {
                node: p2,
                z_ref: z0,
            },
        )
    }
}

fn main_line(plan: &mut CircuitPlan<'_>) -> (usize, usize, Vec<usize>) {
    let inverters = plan.syn.coupling.inverters.clone();
    let n = plan.spec.order;
    let p1 = plan.builder.node("P1");
    let main: Vec<usize> = (0..n).map(|k| plan.resonator(resonator_name(k))).collect();
    let p2 = plan.builder.node("P2");

    plan.couple(p1, main[0], inverters[0]);
    for k in 0..n - 1 {
        plan.couple(main[k], main[k + 1], inverters[k + 1]);
    }
    plan.couple(main[n - 1], p2, inverters[n]);
    (p1, p2, main)
}

fn expect_topology(spec: &FilterSpec, want: Topology) -> Result<()> {
    if spec.topology != want {
        return Err(Error::Config(format!(
            "netlist builder for {want:?} called with topology {:?}",
            spec.topology
        )));
    }
    Ok(())
}

/// `P1 — J01 — A — J12 — B — J23 — P2` with shunt tanks at A and B.
pub fn build_single_band_netlist(spec: &FilterSpec, syn: &Synthesis) -> Result<Netlist> {
    expect_topology(spec, Topology::SingleBand)?;
    let mut plan = CircuitPlan::new(spec, syn);
    let (p1, p2, _) = main_line(&mut plan);
    plan.finish(p1, p2)
}

/// Main line as in the single-band case, with one side resonator hung off
/// every main resonator through the same inter-resonator coupling.
pub fn build_dual_band_netlist(spec: &FilterSpec, syn: &Synthesis) -> Result<Netlist> {
    build_dual_band_netlist_with_side(spec, syn, syn.coupling.j12)
}

/// [`build_dual_band_netlist`] with an explicit side-coupling admittance.
/// `side_j = 0` leaves the side resonators uncoupled.
pub fn build_dual_band_netlist_with_side(
    spec: &FilterSpec,
    syn: &Synthesis,
    side_j: f64,
) -> Result<Netlist> {
    expect_topology(spec, Topology::DualBand)?;
    if !(side_j.is_finite() && side_j >= 0.0) {
        return Err(Error::domain("side_j", side_j, "must be finite and >= 0"));
    }
    let mut plan = CircuitPlan::new(spec, syn);
    let (p1, p2, main) = main_line(&mut plan);
    for (k, &m) in main.iter().enumerate() {
        let side = plan.resonator(format!("{}1", resonator_name(k)));
        plan.couple(m, side, side_j);
    }
    plan.finish(p1, p2)
}

/// Dispatches on `spec.topology`.
pub fn build_netlist(spec: &FilterSpec, syn: &Synthesis) -> Result<Netlist> {
    match spec.topology {
        Topology::SingleBand => build_single_band_netlist(spec, syn),
        Topology::DualBand => build_dual_band_netlist(spec, syn),
    }
}
