//! Chebyshev lowpass prototype element values and ripple conversions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::roots::bisect;

/// Highest order the recursion is validated for; larger orders are still
/// evaluated but [`PrototypeCoefficients::is_validated_order`] reports false.
pub const MAX_VALIDATED_ORDER: usize = 20;

/// Ripple bracket searched by [`fit_ripple_to_g1`], in dB.
pub const RIPPLE_BRACKET_DB: (f64, f64) = (1e-6, 3.0);

const G1_TOLERANCE: f64 = 1e-12;

/// Normalized lowpass prototype `g0 ..= g(n+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototypeCoefficients {
    pub order: usize,
    pub ripple_db: f64,
    pub g: Vec<f64>,
}

impl PrototypeCoefficients {
    /// `g_k` for `k` in `0..=order+1`.
    pub fn g(&self, k: usize) -> f64 {
        self.g[k]
    }

    /// Source termination `g0`.
    pub fn source(&self) -> f64 {
        self.g[0]
    }

    /// Load termination `g(n+1)`.
    pub fn load(&self) -> f64 {
        self.g[self.order + 1]
    }

    /// Reactive elements `g1 ..= gn`.
    pub fn elements(&self) -> &[f64] {
        &self.g[1..=self.order]
    }

    pub fn is_validated_order(&self) -> bool {
        self.order <= MAX_VALIDATED_ORDER
    }
}

/// The `β` parameter of the Chebyshev recursion for a ripple in dB.
fn beta(ripple_db: f64) -> f64 {
    let x = ripple_db / 17.37;
    (1.0 / x.tanh()).ln()
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::domain("order", 0.0, "must be >= 1"))
    } else {
        Ok(())
    }
}

/// Evaluates the equal-ripple lowpass prototype of the given order.
pub fn chebyshev_g_values(order: usize, ripple_db: f64) -> Result<PrototypeCoefficients> {
    check_order(order)?;
    require_positive("ripple_db", ripple_db)?;

    let n = order as f64;
    let beta = beta(ripple_db);
    let gamma = (beta / (2.0 * n)).sinh();
    let a = |k: usize| ((2 * k - 1) as f64 * PI / (2.0 * n)).sin();
    let b = |k: usize| gamma * gamma + (k as f64 * PI / n).sin().powi(2);

    let mut g = Vec::with_capacity(order + 2);
    g.push(1.0);
    g.push(2.0 * a(1) / gamma);
    for k in 2..=order {
        let prev = g[k - 1];
        g.push(4.0 * a(k - 1) * a(k) / (b(k - 1) * prev));
    }
    let load = if order % 2 == 1 {
        1.0
    } else {
        let c = 1.0 / (beta / 4.0).tanh();
        c * c
    };
    g.push(load);

    Ok(PrototypeCoefficients {
        order,
        ripple_db,
        g,
    })
}

/// Passband ripple whose peak reflection matches a given return loss.
pub fn ripple_from_return_loss(rl_db: f64) -> Result<f64> {
    require_positive("rl_db", rl_db)?;
    let reflected = 10f64.powf(-rl_db / 10.0);
    Ok(-10.0 * (-reflected).ln_1p() / std::f64::consts::LN_10)
}

/// Return loss at the ripple peaks, the inverse of [`ripple_from_return_loss`].
pub fn return_loss_from_ripple(ripple_db: f64) -> Result<f64> {
    require_positive("ripple_db", ripple_db)?;
    let transmitted = 10f64.powf(-ripple_db / 10.0);
    Ok(-10.0 * (1.0 - transmitted).log10())
}

/// Recovers the ripple that yields a prescribed `g1` at the given order.
///
/// `g1` grows strictly with ripple, so bisection over
/// [`RIPPLE_BRACKET_DB`] always converges when the target is reachable.
pub fn fit_ripple_to_g1(order: usize, g1_target: f64) -> Result<f64> {
    check_order(order)?;
    require_positive("g1_target", g1_target)?;

    let (lo, hi) = RIPPLE_BRACKET_DB;
    let g1 = |r: f64| chebyshev_g_values(order, r).map(|p| p.g[1]);
    let g1_lo = g1(lo)?;
    let g1_hi = g1(hi)?;
    if !(g1_lo..=g1_hi).contains(&g1_target) {
        return Err(Error::NoSolution {
            what: "g1",
            target: g1_target,
            lo,
            hi,
            achievable_lo: g1_lo,
            achievable_hi: g1_hi,
        });
    }

    let res = bisect(
        |r| g1(r).map(|v| v - g1_target).unwrap_or(f64::NAN),
        lo,
        hi,
        G1_TOLERANCE,
        400,
    );
    Ok(res.x)
}
