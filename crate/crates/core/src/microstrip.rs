//! Quasi-static microstrip analysis and synthesis (Hammerstad closed
//! forms, zero strip thickness) and folded half-wave U resonator geometry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::roots::bisect;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// W/h range searched by [`synthesize_width`].
pub const WIDTH_RATIO_BRACKET: (f64, f64) = (0.05, 20.0);

/// Largest |Z0 - target| accepted from width synthesis, Ω.
pub const Z0_TOLERANCE_OHM: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubstrateSpec {
    pub eps_r: f64,
    pub h_m: f64,
    pub tan_delta: f64,
    /// Cladding thickness; carried for reporting, not used by the model.
    pub t_metal_m: f64,
    pub sigma_s_per_m: f64,
}

impl SubstrateSpec {
    /// 1.27 mm, εr = 10.7 ceramic-PTFE laminate with 35 µm copper.
    pub fn rt6010() -> Self {
        SubstrateSpec {
            eps_r: 10.7,
            h_m: 1.27e-3,
            tan_delta: 0.0023,
            t_metal_m: 35e-6,
            sigma_s_per_m: 5.8e7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_r.is_finite() && self.eps_r >= 1.0) {
            return Err(Error::domain("eps_r", self.eps_r, "must be >= 1"));
        }
        require_positive("h_m", self.h_m)?;
        require_positive("t_metal_m", self.t_metal_m)?;
        require_positive("sigma_s_per_m", self.sigma_s_per_m)?;
        if !(self.tan_delta.is_finite() && self.tan_delta >= 0.0) {
            return Err(Error::domain("tan_delta", self.tan_delta, "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrostripLine {
    pub w_m: f64,
    pub z0_ohm: f64,
    pub eps_eff: f64,
    /// Frequency at which `lambda_g_m` is stated.
    pub f_hz: f64,
    pub lambda_g_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UShapeGeometry {
    pub total_length_m: f64,
    pub base_len_m: f64,
    pub arm_len_m: f64,
    pub trace_width_m: f64,
    /// Outer (width, height): width across the two arms, height along them.
    pub bbox: (f64, f64),
}

/// Characteristic impedance and effective permittivity of a strip of
/// width `w_m`.
pub fn analyze_microstrip(w_m: f64, sub: &SubstrateSpec) -> Result<(f64, f64)> {
    require_positive("w_m", w_m)?;
    sub.validate()?;
    Ok(analyze_ratio(w_m / sub.h_m, sub.eps_r))
}

fn analyze_ratio(u: f64, eps_r: f64) -> (f64, f64) {
    let half_minus = (eps_r - 1.0) / 2.0;
    let mut fill = (1.0 + 12.0 / u).powf(-0.5);
    if u < 1.0 {
        fill += 0.04 * (1.0 - u).powi(2);
    }
    let eps_eff = (eps_r + 1.0) / 2.0 + half_minus * fill;
    let z0 = if u <= 1.0 {
        60.0 / eps_eff.sqrt() * (8.0 / u + u / 4.0).ln()
    } else {
        120.0 * PI / eps_eff.sqrt() / (u + 1.393 + 0.667 * (u + 1.444).ln())
    };
    (z0, eps_eff)
}

/// Guided wavelength `c / (f·sqrt(eps_eff))`.
pub fn guided_wavelength(f_hz: f64, eps_eff: f64) -> Result<f64> {
    require_positive("f_hz", f_hz)?;
    if !(eps_eff.is_finite() && eps_eff >= 1.0) {
        return Err(Error::domain("eps_eff", eps_eff, "must be >= 1"));
    }
    Ok(SPEED_OF_LIGHT / (f_hz * eps_eff.sqrt()))
}

/// Width giving `z0_target`, with the guided wavelength stated at `f_hz`.
///
/// Z0 falls monotonically with width, so the bracket is bisected down to
/// float resolution.
pub fn synthesize_width(z0_target: f64, sub: &SubstrateSpec, f_hz: f64) -> Result<MicrostripLine> {
    require_positive("z0_target", z0_target)?;
    sub.validate()?;
    let (u_lo, u_hi) = WIDTH_RATIO_BRACKET;
    let z_max = analyze_ratio(u_lo, sub.eps_r).0;
    let z_min = analyze_ratio(u_hi, sub.eps_r).0;
    if !(z_min..=z_max).contains(&z0_target) {
        return Err(Error::NoSolution {
            what: "z0_ohm",
            target: z0_target,
            lo: u_lo * sub.h_m,
            hi: u_hi * sub.h_m,
            achievable_lo: z_min,
            achievable_hi: z_max,
        });
    }

    let res = bisect(
        |u| analyze_ratio(u, sub.eps_r).0 - z0_target,
        u_lo,
        u_hi,
        0.0,
        300,
    );
    if res.residual.abs() > Z0_TOLERANCE_OHM {
        // Only possible inside the small step of the closed forms at W = h.
        return Err(Error::NoSolution {
            what: "z0_ohm",
            target: z0_target,
            lo: u_lo * sub.h_m,
            hi: u_hi * sub.h_m,
            achievable_lo: z_min,
            achievable_hi: z_max,
        });
    }

    let w_m = res.x * sub.h_m;
    let (z0_ohm, eps_eff) = analyze_ratio(res.x, sub.eps_r);
    Ok(MicrostripLine {
        w_m,
        z0_ohm,
        eps_eff,
        f_hz,
        lambda_g_m: guided_wavelength(f_hz, eps_eff)?,
    })
}

/// Folds a half-wave line (at `f0`) into a U whose base takes
/// `base_fraction` of the length and whose two arms share the rest.
pub fn u_fold_geometry(
    line: &MicrostripLine,
    f0: f64,
    base_fraction: f64,
) -> Result<UShapeGeometry> {
    if !(base_fraction > 0.0 && base_fraction < 1.0) {
        return Err(Error::domain(
            "base_fraction",
            base_fraction,
            "must lie in (0, 1)",
        ));
    }
    require_positive("trace_width_m", line.w_m)?;
    let total = guided_wavelength(f0, line.eps_eff)? / 2.0;
    let base = base_fraction * total;
    let arm = (1.0 - base_fraction) / 2.0 * total;
    let w = line.w_m;
    Ok(UShapeGeometry {
        total_length_m: total,
        base_len_m: base,
        arm_len_m: arm,
        trace_width_m: w,
        // Two parallel arms across; one strip (the base) along.
        bbox: (base + w, arm + w / 2.0),
    })
}

/// Bounding box expressed in guided wavelengths.
pub fn electrical_size(bbox: (f64, f64), lambda_g: f64) -> Result<(f64, f64)> {
    require_positive("bbox width", bbox.0)?;
    require_positive("bbox height", bbox.1)?;
    require_positive("lambda_g", lambda_g)?;
    Ok((bbox.0 / lambda_g, bbox.1 / lambda_g))
}
