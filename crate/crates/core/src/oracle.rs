//! Closed-form reference values.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::omega;
use crate::quantities::limit_target;

/// Euclidean spheroid `(x² + y²)/a² + z²/c² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpheroidReference {
    pub a: f64,
    pub c: f64,
    pub area: f64,
    /// `∫ H dμ` with `H = κ₁ + κ₂`.
    pub total_mean_curvature: f64,
    /// Deficit with `f ≡ 1`, `m = 0`: `∫H/(8π) − √(|Σ|/4π)`.
    pub minkowski_deficit: f64,
}

pub fn spheroid(a: f64, c: f64) -> Result<SpheroidReference> {
    if !(a > 0.0 && c > 0.0 && a.is_finite() && c.is_finite()) {
        return Err(Error::Domain(format!("spheroid semi-axes must be positive, got a={a}, c={c}")));
    }
    let (area, total) = if c > a {
        let s = (c * c - a * a).sqrt();
        let e = s / c;
        (
            2.0 * PI * a * a * (1.0 + c / (a * e) * e.asin()),
            2.0 * PI * (2.0 * c + 2.0 * a * a * ((c + s) / a).ln() / s),
        )
    } else if a > c {
        let s = (a * a - c * c).sqrt();
        let e = s / a;
        (
            2.0 * PI * a * a * (1.0 + (1.0 - e * e) / e * e.atanh()),
            2.0 * PI * (2.0 * c + 2.0 * a * a * (c / a).acos() / s),
        )
    } else {
        (4.0 * PI * a * a, 8.0 * PI * a)
    };
    Ok(SpheroidReference {
        a,
        c,
        area,
        total_mean_curvature: total,
        minkowski_deficit: total / (8.0 * PI) - (area / (4.0 * PI)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionReference {
    pub n: usize,
    /// Area of the unit (n−1)-sphere.
    pub omega: f64,
    /// `(n−1) ω^{1/(n−1)}`.
    pub limit_target: f64,
    /// Horizon radius `(2m)^{1/(n−2)}` for `m = 1`.
    pub unit_mass_horizon: f64,
}

pub fn dimension(n: usize) -> Result<DimensionReference> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(n, "n >= 3"));
    }
    Ok(DimensionReference {
        n,
        omega: omega(n - 1)?,
        limit_target: limit_target(n)?,
        unit_mass_horizon: 2f64.powf(1.0 / (n as f64 - 2.0)),
    })
}

/// `Q` along IMCF of a coordinate sphere of radius `r` in n = 3
/// Schwarzschild of mass `m_metric` with weight `f = V`, and `m_metric` in
/// the mass slot: `Q̃ = (4√π/r)(2m + r V^{3/2})`. Increasing in `r` once
/// `3√V > 2`, which is the non-static negative control.
pub fn lapse_weight_q(m_metric: f64, r: f64) -> f64 {
    let v = 1.0 - 2.0 * m_metric / r;
    4.0 * PI.sqrt() / r * (2.0 * m_metric + r * v.powf(1.5))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTable {
    pub dimensions: Vec<DimensionReference>,
    pub spheroids: Vec<SpheroidReference>,
    /// `(r, Q̃)` for the lapse weight in n = 3, m = 1.
    pub lapse_weight_q: Vec<(f64, f64)>,
}

pub fn table() -> Result<OracleTable> {
    Ok(OracleTable {
        dimensions: (3..=7).map(dimension).collect::<Result<_>>()?,
        spheroids: [(1.0, 2.0), (2.0, 1.0), (1.0, 3.0)]
            .into_iter()
            .map(|(a, c)| spheroid(a, c))
            .collect::<Result<_>>()?,
        lapse_weight_q: [3.0, 3.6, 4.0, 6.0, 10.0].into_iter().map(|r| (r, lapse_weight_q(1.0, r))).collect(),
    })
}
