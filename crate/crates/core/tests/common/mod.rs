#![allow(dead_code)]

use std::f64::consts::PI;

use bpfsynth::netlist::Netlist;
use bpfsynth::netsim::{sweep_sparams, SParamSweep, SweepGrid};
use bpfsynth::synthesis::{bandpass_elements, build_netlist, FilterSpec, Synthesis, Topology};
use num_complex::Complex64;

pub type C = Complex64;

pub fn design(spec: &FilterSpec) -> (Synthesis, Netlist) {
    let syn = bandpass_elements(spec, &spec.prototype().unwrap()).unwrap();
    let net = build_netlist(spec, &syn).unwrap();
    (syn, net)
}

pub fn reference(topology: Topology) -> (FilterSpec, Synthesis, Netlist) {
    let spec = FilterSpec::reference(topology);
    let (syn, net) = design(&spec);
    (spec, syn, net)
}

pub fn default_grid() -> SweepGrid {
    SweepGrid::linear(1.2e9, 1.6e9, 4001).unwrap()
}

pub fn reference_sweep(topology: Topology) -> SParamSweep {
    let (_, _, net) = reference(topology);
    sweep_sparams(&net, &default_grid())
}

type Abcd = [[C; 2]; 2];

fn mul(a: Abcd, b: Abcd) -> Abcd {
    let mut r = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                r[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    r
}

fn inverter(j: f64) -> Abcd {
    [
        [C::new(0.0, 0.0), C::new(0.0, 1.0 / j)],
        [C::new(0.0, j), C::new(0.0, 0.0)],
    ]
}

fn shunt(y: C) -> Abcd {
    [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [y, C::new(1.0, 0.0)]]
}

/// Independent cascade-matrix evaluation of the inverter-coupled ladder,
/// side resonators folded in as `J²/Y`. Returns `(s11, s21)`.
pub fn abcd_oracle(spec: &FilterSpec, syn: &Synthesis, side_j: Option<f64>, f: f64) -> (C, C) {
    let w = 2.0 * PI * f;
    let e = &syn.elements;
    let mut y_res = C::new(0.0, w * e.c_res) + C::new(0.0, -1.0 / (w * e.l_res));
    if let Some(q) = spec.q_unloaded {
        y_res += C::new(syn.coupling.b_slope / q, 0.0);
    }
    let y_main = match side_j {
        Some(j) if j > 0.0 => y_res + C::new(j * j, 0.0) / y_res,
        _ => y_res,
    };
    let inv = &syn.coupling.inverters;
    let mut m = inverter(inv[0]);
    for k in 0..spec.order {
        m = mul(m, shunt(y_main));
        m = mul(m, inverter(inv[k + 1]));
    }
    let z0 = spec.z0_ohm;
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let den = a + b / z0 + c * z0 + d;
    let s11 = (a + b / z0 - c * z0 - d) / den;
    let s21 = C::new(2.0, 0.0) / den;
    (s11, s21)
}

/// Chebyshev polynomial of the first kind, any real argument.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if n == 0 {
        return t0;
    }
    for _ in 1..n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

/// |S21|² of the lowpass ladder built from `g` (shunt C first, series L
/// next, load conductance or resistance `g(n+1)`) at normalized
/// frequency `omega`.
pub fn ladder_transmission(g: &[f64], omega: f64) -> f64 {
    let n = g.len() - 2;
    let mut m: Abcd = [
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(1.0, 0.0)],
    ];
    for (k, &gk) in g.iter().enumerate().take(n + 1).skip(1) {
        let x = C::new(0.0, omega * gk);
        let el = if k % 2 == 1 {
            shunt(x)
        } else {
            [[C::new(1.0, 0.0), x], [C::new(0.0, 0.0), C::new(1.0, 0.0)]]
        };
        m = mul(m, el);
    }
    // g(n+1) is a resistance after a shunt C, a conductance after a series L.
    let rl = if n % 2 == 1 { g[n + 1] } else { 1.0 / g[n + 1] };
    let rs = g[0];
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let vs_over_vl = a + b / rl + rs * (c + d / rl);
    4.0 * rs / rl / vs_over_vl.norm_sqr()
}
