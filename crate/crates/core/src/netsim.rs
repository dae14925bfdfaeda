//! AC nodal analysis of R/L/C/inverter netlists and two-port S-parameters.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{ElementKind, Netlist, GROUND};

/// Smallest LU pivot accepted, relative to the largest matrix entry.
const PIVOT_TOLERANCE: f64 = 1e-13;

/// Floor applied when converting magnitudes to dB.
pub const DB_FLOOR: f64 = -200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub f_start: f64,
    pub f_stop: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl SweepGrid {
    pub fn new(f_start: f64, f_stop: f64, n_points: usize, spacing: Spacing) -> Result<Self> {
        let grid = SweepGrid {
            f_start,
            f_stop,
            n_points,
            spacing,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn linear(f_start: f64, f_stop: f64, n_points: usize) -> Result<Self> {
        Self::new(f_start, f_stop, n_points, Spacing::Linear)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_start.is_finite() && self.f_start > 0.0) {
            return Err(Error::domain("f_start", self.f_start, "must be > 0"));
        }
        if !(self.f_stop.is_finite() && self.f_stop > self.f_start) {
            return Err(Error::domain("f_stop", self.f_stop, "must exceed f_start"));
        }
        if self.n_points < 2 {
            return Err(Error::domain(
                "n_points",
                self.n_points as f64,
                "must be >= 2",
            ));
        }
        Ok(())
    }

    /// Grid frequencies in ascending order; endpoints are exact.
    pub fn frequencies(&self) -> Vec<f64> {
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i == self.n_points - 1 {
                    return self.f_stop;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.f_start + (self.f_stop - self.f_start) * t,
                    Spacing::Log => self.f_start * (self.f_stop / self.f_start).powf(t),
                }
            })
            .collect()
    }

    /// Same span with `n_points` doubled.
    pub fn refined(&self) -> SweepGrid {
        SweepGrid {
            n_points: self.n_points * 2,
            ..*self
        }
    }
}

/// 2×2 scattering matrix, row-major (`s[0][1]` is S12).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SMatrix(pub [[Complex64; 2]; 2]);

impl SMatrix {
    pub fn s11(&self) -> Complex64 {
        self.0[0][0]
    }
    pub fn s12(&self) -> Complex64 {
        self.0[0][1]
    }
    pub fn s21(&self) -> Complex64 {
        self.0[1][0]
    }
    pub fn s22(&self) -> Complex64 {
        self.0[1][1]
    }

    fn nan() -> Self {
        let n = Complex64::new(f64::NAN, f64::NAN);
        SMatrix([[n, n], [n, n]])
    }
}

/// A grid point where the nodal system could not be solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSample {
    pub index: usize,
    pub f_hz: f64,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SParamSweep {
    pub grid: SweepGrid,
    pub frequencies: Vec<f64>,
    pub z_ref: [f64; 2],
    /// One matrix per frequency; NaN-filled at singular samples.
    pub s: Vec<SMatrix>,
    pub singular: Vec<SingularSample>,
}

impl SParamSweep {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.singular.is_empty()
    }

    /// `20·log10|S11|` per point, floored at [`DB_FLOOR`].
    pub fn s11_db(&self) -> Vec<f64> {
        self.s.iter().map(|m| magnitude_db(m.s11())).collect()
    }

    pub fn s21_db(&self) -> Vec<f64> {
        self.s.iter().map(|m| magnitude_db(m.s21())).collect()
    }
}

pub fn magnitude_db(z: Complex64) -> f64 {
    let db = 20.0 * z.norm().log10();
    if db.is_nan() {
        db
    } else {
        db.max(DB_FLOOR)
    }
}

/// Node-admittance matrix at `f` (ground row/column removed; node `k` maps
/// to index `k - 1`).
pub fn stamp_admittance(netlist: &Netlist, f: f64) -> DMatrix<Complex64> {
    let n = netlist.node_count();
    let mut y = DMatrix::zeros(n, n);
    stamp_into(netlist, f, &mut y, |node| Some(node - 1));
    y
}

fn stamp_into<M>(netlist: &Netlist, f: f64, y: &mut DMatrix<Complex64>, map: M)
where
    M: Fn(usize) -> Option<usize>,
{
    let omega = 2.0 * PI * f;
    let idx = |node: usize| if node == GROUND { None } else { map(node) };
    for e in netlist.elements() {
        let (a, b) = (idx(e.nodes.0), idx(e.nodes.1));
        if e.kind == ElementKind::Inverter {
            let jj = Complex64::new(0.0, e.value);
            if let (Some(a), Some(b)) = (a, b) {
                y[(a, b)] += jj;
                y[(b, a)] += jj;
            }
            continue;
        }
        let adm = match e.kind {
            ElementKind::Resistor => Complex64::new(1.0 / e.value, 0.0),
            ElementKind::Capacitor => Complex64::new(0.0, omega * e.value),
            ElementKind::Inductor => Complex64::new(0.0, -1.0 / (omega * e.value)),
            ElementKind::Inverter => unreachable!(),
        };
        if let Some(a) = a {
            y[(a, a)] += adm;
        }
        if let Some(b) = b {
            y[(b, b)] += adm;
        }
        if let (Some(a), Some(b)) = (a, b) {
            y[(a, b)] -= adm;
            y[(b, a)] -= adm;
        }
    }
}

/// Precomputed node reduction for repeated solves of one netlist.
///
/// Nodes with no non-ground path to a port carry no current and are
/// dropped, so decoupled sub-circuits never make the system singular.
struct PortSolver<'a> {
    netlist: &'a Netlist,
    map: Vec<Option<usize>>,
    size: usize,
}

impl<'a> PortSolver<'a> {
    fn new(netlist: &'a Netlist) -> Self {
        let active = netlist.component_of_ports();
        let mut map = vec![None; active.len()];
        let mut size = 0;
        for (node, &on) in active.iter().enumerate().skip(1) {
            if on {
                map[node] = Some(size);
                size += 1;
            }
        }
        PortSolver { netlist, map, size }
    }

    fn solve(&self, f: f64) -> std::result::Result<SMatrix, String> {
        let mut y = DMatrix::zeros(self.size, self.size);
        stamp_into(self.netlist, f, &mut y, |node| self.map[node]);

        let ports = self.netlist.ports();
        let pidx = [
            self.map[ports[0].node].expect("port 1 is active"),
            self.map[ports[1].node].expect("port 2 is active"),
        ];
        for (p, &i) in ports.iter().zip(&pidx) {
            y[(i, i)] += Complex64::new(1.0 / p.z_ref, 0.0);
        }

        let scale = y.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let lu = y.lu();
        // nalgebra only rejects exactly-zero pivots; rank deficiency shows
        // up as a pivot at rounding level.
        let u = lu.u();
        if u.diagonal()
            .iter()
            .any(|d| d.norm() <= PIVOT_TOLERANCE * scale)
        {
            return Err(format!("singular nodal matrix at {f} Hz"));
        }
        let mut s = [[Complex64::new(0.0, 0.0); 2]; 2];
        for j in 0..2 {
            // Thevenin source 2·sqrt(Zj) behind Zj gives unit incident wave.
            let mut rhs = DVector::zeros(self.size);
            rhs[pidx[j]] = Complex64::new(2.0 / ports[j].z_ref.sqrt(), 0.0);
            let v = lu
                .solve(&rhs)
                .ok_or_else(|| format!("singular nodal matrix at {f} Hz"))?;
            for i in 0..2 {
                let mut b = v[pidx[i]] / ports[i].z_ref.sqrt();
                if i == j {
                    b -= 1.0;
                }
                if !(b.re.is_finite() && b.im.is_finite()) {
                    return Err(format!("non-finite solution at {f} Hz"));
                }
                s[i][j] = b;
            }
        }
        Ok(SMatrix(s))
    }
}

/// Solves a single frequency point.
pub fn solve_point(netlist: &Netlist, f: f64) -> Result<SMatrix> {
    PortSolver::new(netlist).solve(f).map_err(Error::Netlist)
}

fn assemble(
    netlist: &Netlist,
    grid: SweepGrid,
    frequencies: Vec<f64>,
    results: Vec<std::result::Result<SMatrix, String>>,
) -> SParamSweep {
    let ports = netlist.ports();
    let mut s = Vec::with_capacity(results.len());
    let mut singular = Vec::new();
    for (index, (r, &f_hz)) in results.into_iter().zip(&frequencies).enumerate() {
        match r {
            Ok(m) => s.push(m),
            Err(diagnostic) => {
                s.push(SMatrix::nan());
                singular.push(SingularSample {
                    index,
                    f_hz,
                    diagnostic,
                });
            }
        }
    }
    SParamSweep {
        grid,
        frequencies,
        z_ref: [ports[0].z_ref, ports[1].z_ref],
        s,
        singular,
    }
}

/// Single-threaded sweep; the reference the parallel path must match.
pub fn sweep_sparams_sequential(netlist: &Netlist, grid: &SweepGrid) -> SParamSweep {
    let solver = PortSolver::new(netlist);
    let freqs = grid.frequencies();
    let results = freqs.iter().map(|&f| solver.solve(f)).collect();
    assemble(netlist, *grid, freqs, results)
}

/// Sweep with frequency points spread across the rayon pool. Output order
/// and values are identical to [`sweep_sparams_sequential`].
#[cfg(feature = "parallel")]
pub fn sweep_sparams_parallel(netlist: &Netlist, grid: &SweepGrid) -> SParamSweep {
    use rayon::prelude::*;

    let solver = PortSolver::new(netlist);
    let freqs = grid.frequencies();
    let results = freqs.par_iter().map(|&f| solver.solve(f)).collect();
    assemble(netlist, *grid, freqs, results)
}

/// Evaluates the two-port S-matrix over the grid.
pub fn sweep_sparams(netlist: &Netlist, grid: &SweepGrid) -> SParamSweep {
    #[cfg(feature = "parallel")]
    {
        sweep_sparams_parallel(netlist, grid)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_sparams_sequential(netlist, grid)
    }
}

/// Passband figures extracted from a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMetrics {
    pub f_center: f64,
    /// Insertion loss at `f_center`, positive dB.
    pub il_db: f64,
    /// Worst return loss inside the band, positive dB.
    pub rl_min_db: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub fbw: f64,
}

fn lerp_crossing(f0: f64, y0: f64, f1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (f0 + f1);
    }
    f0 + (level - y0) * (f1 - f0) / (y1 - y0)
}

fn interp_at(freqs: &[f64], values: &[f64], f: f64) -> f64 {
    let k = freqs.partition_point(|&x| x < f);
    if k == 0 {
        return values[0];
    }
    if k >= freqs.len() {
        return values[freqs.len() - 1];
    }
    let (f0, f1) = (freqs[k - 1], freqs[k]);
    let t = (f - f0) / (f1 - f0);
    values[k - 1] + t * (values[k] - values[k - 1])
}

/// Finds every maximal run of samples with return loss at or above
/// `rl_threshold_db` and reports it as a band.
///
/// Band edges are interpolated linearly (in dB) between the samples that
/// straddle the threshold; runs touching the end of the sweep use the end
/// frequency.
pub fn extract_band_metrics(sweep: &SParamSweep, rl_threshold_db: f64) -> Result<Vec<BandMetrics>> {
    crate::error::require_positive("rl_threshold_db", rl_threshold_db)?;
    if sweep.is_empty() {
        return Err(Error::Config(
            "cannot extract bands from an empty sweep".into(),
        ));
    }
    let f = &sweep.frequencies;
    let rl: Vec<f64> = sweep.s11_db().iter().map(|d| -d).collect();
    let il: Vec<f64> = sweep.s21_db().iter().map(|d| -d).collect();
    let inside = |i: usize| rl[i] >= rl_threshold_db;

    let mut bands = Vec::new();
    let mut i = 0;
    while i < f.len() {
        if !inside(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < f.len() && inside(i + 1) {
            i += 1;
        }
        let end = i;
        i += 1;

        let f_lo = if start == 0 {
            f[0]
        } else {
            lerp_crossing(
                f[start - 1],
                rl[start - 1],
                f[start],
                rl[start],
                rl_threshold_db,
            )
        };
        let f_hi = if end + 1 == f.len() {
            f[end]
        } else {
            lerp_crossing(f[end], rl[end], f[end + 1], rl[end + 1], rl_threshold_db)
        };
        if f_hi <= f_lo {
            continue;
        }
        let f_center = 0.5 * (f_lo + f_hi);
        let rl_min_db = rl[start..=end]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        bands.push(BandMetrics {
            f_center,
            il_db: interp_at(f, &il, f_center).max(0.0),
            rl_min_db,
            f_lo,
            f_hi,
            fbw: (f_hi - f_lo) / f_center,
        });
    }
    Ok(bands)
}

/// Local maxima of |S21| as `(frequency, insertion loss dB)`.
pub fn transmission_peaks(sweep: &SParamSweep) -> Vec<(f64, f64)> {
    let il: Vec<f64> = sweep.s21_db().iter().map(|d| -d).collect();
    (1..il.len().saturating_sub(1))
        .filter(|&i| il[i] < il[i - 1] && il[i] <= il[i + 1])
        .map(|i| (sweep.frequencies[i], il[i]))
        .collect()
}
