//! Exit criteria for the toolkit. Prints one line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use bpfsynth::microstrip::{analyze_microstrip, synthesize_width, SubstrateSpec};
use bpfsynth::netlist::ElementKind;
use bpfsynth::netsim::{extract_band_metrics, solve_point, sweep_sparams, BandMetrics};
use bpfsynth::prototype::{chebyshev_g_values, fit_ripple_to_g1};
use bpfsynth::shell::pipeline::{compute, default_rl_threshold, parse_report};
use bpfsynth::shell::{parse_touchstone, run_pipeline, DesignConfig};
use bpfsynth::synthesis::{build_dual_band_netlist_with_side, FilterSpec, Topology};
use common::{default_grid, design, reference};

/// Outcome of one criterion: each sub-check with its measured detail.
struct Criterion {
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push((ok, detail.into()));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.0)
    }
}

fn prototype_reproduction() -> Criterion {
    let mut c = Criterion::new();
    let ripple = fit_ripple_to_g1(2, 0.6648).unwrap();
    let p = chebyshev_g_values(2, ripple).unwrap();
    let want = [1.0, 0.6648, 0.5445, 1.2210];
    for (k, (g, w)) in p.g.iter().zip(want).enumerate() {
        c.check(
            (g - w).abs() <= 5e-5,
            format!("g{k}={g:.6} (|Δ|={:.1e})", (g - w).abs()),
        );
    }
    c
}

fn element_values() -> Criterion {
    let mut c = Criterion::new();
    let (_, syn, _) = reference(Topology::SingleBand);
    let e = &syn.elements;
    for (name, got, want) in [
        ("C", e.c_res, 44.4564e-12),
        ("L", e.l_res, 0.2907e-9),
        ("L01", e.l_io, 5.6841e-9),
        ("L12", e.l_inter, 5.1442e-9),
    ] {
        let rel = (got - want).abs() / want;
        c.check(rel <= 2e-4, format!("{name} rel err {rel:.1e}"));
    }
    c
}

fn coupling_parameters() -> Criterion {
    let mut c = Criterion::new();
    let (_, syn, _) = reference(Topology::SingleBand);
    let m_rel = (syn.coupling.m - 0.0565).abs() / 0.0565;
    let q_rel = (syn.coupling.qe - 19.5529).abs() / 19.5529;
    c.check(
        m_rel <= 5e-4,
        format!("M={:.6} rel {m_rel:.1e}", syn.coupling.m),
    );
    c.check(
        q_rel <= 5e-4,
        format!("Qe={:.5} rel {q_rel:.1e}", syn.coupling.qe),
    );
    c
}

fn bands_of(topology: Topology) -> (f64, Vec<BandMetrics>) {
    let (spec, _, net) = reference(topology);
    let thr = default_rl_threshold(&spec).unwrap();
    let sweep = sweep_sparams(&net, &default_grid());
    (thr, extract_band_metrics(&sweep, thr).unwrap())
}

fn single_band_response() -> Criterion {
    let mut c = Criterion::new();
    let (thr, bands) = bands_of(Topology::SingleBand);
    c.check(
        bands.len() == 1,
        format!("{} band(s) at RL ≥ {thr:.3} dB", bands.len()),
    );
    if let Some(b) = bands.first() {
        c.check(
            (b.f_center - 1.4e9).abs() <= 2e6,
            format!("center {:.4} GHz", b.f_center / 1e9),
        );
        c.check((b.fbw - 0.034).abs() <= 0.002, format!("FBW {:.4}", b.fbw));
        c.check(
            b.rl_min_db >= 19.9,
            format!("in-band RL {:.3} dB", b.rl_min_db),
        );
        c.check(
            b.il_db <= 0.01,
            format!("IL at center {:.4} dB (limit 0.01)", b.il_db),
        );
    }
    c
}

fn dual_band_response() -> Criterion {
    let mut c = Criterion::new();
    let (thr, bands) = bands_of(Topology::DualBand);
    c.check(
        bands.len() == 2,
        format!("{} band(s) at RL ≥ {thr:.3} dB", bands.len()),
    );
    if bands.len() == 2 {
        let (lo, hi) = (bands[0], bands[1]);
        let mid = 0.5 * (lo.f_center + hi.f_center);
        let sep = hi.f_center - lo.f_center;
        c.check(
            (mid - 1.4e9).abs() <= 5e6,
            format!(
                "centers {:.4}/{:.4} GHz, midpoint off by {:.2} MHz",
                lo.f_center / 1e9,
                hi.f_center / 1e9,
                (mid - 1.4e9) / 1e6
            ),
        );
        c.check(
            (79e6..=105e6).contains(&sep),
            format!("separation {:.2} MHz", sep / 1e6),
        );
        for (i, b) in bands.iter().enumerate() {
            c.check(
                b.il_db <= 0.01,
                format!("band {} IL at center {:.4} dB (limit 0.01)", i + 1, b.il_db),
            );
        }
    }
    c
}

fn lossy_mode() -> Criterion {
    let mut c = Criterion::new();
    let (_, bands) = bands_of(Topology::DualBand);
    let centers: Vec<f64> = bands.iter().map(|b| b.f_center).collect();
    let mut prev = vec![0.0; centers.len()];
    for q in [1000.0, 800.0, 600.0, 400.0, 200.0] {
        let spec = FilterSpec::reference(Topology::DualBand).with_q_unloaded(Some(q));
        let (_, net) = design(&spec);
        let il: Vec<f64> = centers
            .iter()
            .map(|&f| -20.0 * solve_point(&net, f).unwrap().s21().norm().log10())
            .collect();
        let rising = il.iter().zip(&prev).all(|(a, b)| a > b);
        let positive = il.iter().all(|&x| x > 0.0);
        c.check(
            rising && positive,
            format!("Qu={q}: IL {:.3}/{:.3} dB", il[0], il[1]),
        );
        prev = il;
    }
    c
}

fn property_suite() -> Criterion {
    let mut c = Criterion::new();
    let grid = default_grid();

    let mut recip: f64 = 0.0;
    let mut unit: f64 = 0.0;
    for topo in [Topology::SingleBand, Topology::DualBand] {
        for qu in [None, Some(500.0)] {
            let spec = FilterSpec::reference(topo).with_q_unloaded(qu);
            let (_, net) = design(&spec);
            for m in &sweep_sparams(&net, &grid).s {
                recip = recip.max((m.s12() - m.s21()).norm());
                if qu.is_none() {
                    unit = unit.max((m.s11().norm_sqr() + m.s21().norm_sqr() - 1.0).abs());
                }
            }
        }
    }
    c.check(recip <= 1e-12, format!("reciprocity {recip:.1e}"));
    c.check(unit <= 1e-10, format!("unitarity {unit:.1e}"));

    let mut res: f64 = 0.0;
    for topo in [Topology::SingleBand, Topology::DualBand] {
        let (spec, _, net) = reference(topo);
        let mut tanks = vec![(0.0, 0.0); net.node_count() + 1];
        for e in net.elements() {
            match (e.kind, e.nodes.1) {
                (ElementKind::Capacitor, 0) => tanks[e.nodes.0].0 = e.value,
                (ElementKind::Inductor, 0) => tanks[e.nodes.0].1 = e.value,
                _ => {}
            }
        }
        for (cap, ind) in tanks.into_iter().filter(|t| t.0 > 0.0) {
            let f = 1.0 / (2.0 * PI * (cap * ind).sqrt());
            res = res.max((f - spec.f0_hz).abs() / spec.f0_hz);
        }
    }
    c.check(res <= 1e-9, format!("resonance {res:.1e}"));

    let (_, syn, _) = reference(Topology::SingleBand);
    let k = &syn.coupling;
    let jb = (k.j12 - k.b_slope * k.m).abs() / k.j12;
    c.check(jb <= 1e-15, format!("j12=b·M {jb:.1e}"));

    let mut cov: f64 = 0.0;
    for alpha in [0.1, 0.5, 3.0, 17.0] {
        for topo in [Topology::SingleBand, Topology::DualBand] {
            let base = FilterSpec::reference(topo);
            let mut scaled = base.clone();
            scaled.f0_hz *= alpha;
            let (_, n1) = design(&base);
            let (_, n2) = design(&scaled);
            let g2 =
                bpfsynth::netsim::SweepGrid::linear(1.2e9 * alpha, 1.6e9 * alpha, 401).unwrap();
            let g1 = bpfsynth::netsim::SweepGrid::linear(1.2e9, 1.6e9, 401).unwrap();
            let (a, b) = (sweep_sparams(&n1, &g1), sweep_sparams(&n2, &g2));
            for (x, y) in a.s.iter().zip(&b.s) {
                for i in 0..2 {
                    for j in 0..2 {
                        cov = cov.max((x.0[i][j] - y.0[i][j]).norm());
                    }
                }
            }
        }
    }
    c.check(cov <= 1e-9, format!("scaling covariance {cov:.1e}"));

    let (spec, syn, _) = reference(Topology::DualBand);
    let (_, _, single) = reference(Topology::SingleBand);
    let dual0 = build_dual_band_netlist_with_side(&spec, &syn, 0.0).unwrap();
    let (a, b) = (sweep_sparams(&dual0, &grid), sweep_sparams(&single, &grid));
    let mut red: f64 = 0.0;
    for (x, y) in a.s.iter().zip(&b.s) {
        for i in 0..2 {
            for j in 0..2 {
                red = red.max((x.0[i][j] - y.0[i][j]).norm());
            }
        }
    }
    c.check(red <= 1e-10, format!("zero side coupling {red:.1e}"));
    c
}

fn microstrip_round_trip() -> Criterion {
    let mut c = Criterion::new();
    for eps_r in [1.0, 2.2, 10.7] {
        let sub = SubstrateSpec {
            eps_r,
            ..SubstrateSpec::rt6010()
        };
        let mut worst: f64 = 0.0;
        let mut ee_air: f64 = 0.0;
        for k in 0..=100 {
            let u = 10f64.powf(-1.0 + 2.0 * k as f64 / 100.0);
            let w = u * sub.h_m;
            let (z0, ee) = analyze_microstrip(w, &sub).unwrap();
            let back = synthesize_width(z0, &sub, 1.4e9).unwrap().w_m;
            worst = worst.max((back - w).abs());
            ee_air = ee_air.max((ee - 1.0).abs());
        }
        c.check(
            worst <= 0.1e-6,
            format!("εr={eps_r}: worst |ΔW| {:.2e} µm", worst * 1e6),
        );
        if eps_r == 1.0 {
            c.check(ee_air == 0.0, format!("εr=1 eps_eff deviation {ee_air:e}"));
        }
    }
    let w50 = synthesize_width(50.0, &SubstrateSpec::rt6010(), 1.4e9)
        .unwrap()
        .w_m;
    c.check(
        (0.95e-3..=1.25e-3).contains(&w50),
        format!("50 Ω width {:.4} mm", w50 * 1e3),
    );
    c
}

fn io_round_trip() -> Criterion {
    let mut c = Criterion::new();
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = DesignConfig::reference(Topology::DualBand);
    let paths = ["report.json", "dual.s2p", "dual.csv"].map(|f| dir.path().join(f));
    cfg.outputs.report = Some(paths[0].clone());
    cfg.outputs.touchstone = Some(paths[1].clone());
    cfg.outputs.csv = Some(paths[2].clone());

    let report = run_pipeline(&cfg).unwrap();
    let sweep = compute(&cfg).unwrap().sweep;
    let first: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    run_pipeline(&cfg).unwrap();
    let second: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    c.check(first == second, "byte-identical outputs across runs");

    let ts = parse_touchstone(std::str::from_utf8(&first[1]).unwrap(), &paths[1]).unwrap();
    let mut err: f64 = 0.0;
    for (m, n) in ts.s.iter().zip(&sweep.s) {
        for i in 0..2 {
            for j in 0..2 {
                err = err.max((m.0[i][j] - n.0[i][j]).norm());
            }
        }
    }
    let f_err = ts
        .frequencies
        .iter()
        .zip(&sweep.frequencies)
        .map(|(a, b)| (a - b).abs() / b)
        .fold(0.0, f64::max);
    c.check(
        ts.s.len() == sweep.len() && err <= 1e-9 && f_err <= 1e-9,
        format!("Touchstone max |ΔS| {err:.1e}, rel Δf {f_err:.1e}"),
    );

    let parsed = parse_report(std::str::from_utf8(&first[0]).unwrap()).unwrap();
    c.check(
        parsed == report,
        "JSON report re-parses to the in-memory report",
    );
    c
}

fn main() -> ExitCode {
    type Check = fn() -> Criterion;
    let criteria: [(&str, Check); 9] = [
        ("prototype reproduction", prototype_reproduction),
        ("element-value reproduction", element_values),
        ("coupling parameters", coupling_parameters),
        ("single-band response", single_band_response),
        ("dual-band response", dual_band_response),
        ("lossy-mode sanity", lossy_mode),
        ("property suite", property_suite),
        ("microstrip round trip", microstrip_round_trip),
        ("I/O round trip", io_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        let details: Vec<String> = c
            .checks
            .iter()
            .map(|(ok, d)| if *ok { d.clone() } else { format!("!! {d}") })
            .collect();
        println!(
            "[{tag}] criterion {}: {name}: {}",
            i + 1,
            details.join("; ")
        );
        if !c.passed() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
