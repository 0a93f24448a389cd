//! Per-slice functionals (total weighted mean curvature, Q, Minkowski
//! deficit, Hawking mass) and the monotonicity/limit verdict along a trace.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowTrace;
use crate::geometry::{surface_integral, umbilicity_deficit, Layout, SurfaceGeometry};
use crate::metric::{omega, ManifoldSpec, PotentialKind, StaticPotential};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceQuantities {
    pub t: f64,
    pub area: f64,
    /// `∫_Σ f H dμ`.
    pub weighted_total_h: f64,
    pub q: f64,
    pub minkowski_deficit: f64,
    /// Only defined for n = 3.
    pub hawking_mass: Option<f64>,
    pub umbilicity_deficit: f64,
    /// `| |Σ_t| e^{−t} / |Σ₀| − 1 |`.
    pub area_residual: f64,
}

/// `lim Q = (n−1) ω_{n−1}^{1/(n−1)}`.
pub fn limit_target(n: usize) -> Result<f64> {
    let k = (n - 1) as f64;
    Ok(k * omega(n - 1)?.powf(1.0 / k))
}

fn potential_at_nodes(spec: &ManifoldSpec, geom: &SurfaceGeometry, f: &StaticPotential) -> Result<Vec<f64>> {
    geom.node_radii()
        .iter()
        .map(|&r| {
            if !(r > 0.0 && spec.lapse_squared(r) > 0.0) {
                return Err(Error::Domain(format!("potential undefined at r={r} (inside horizon)")));
            }
            if let PotentialKind::Sampled(s) = &f.kind {
                if !s.contains(r) {
                    return Err(Error::Domain(format!("r={r} outside the sampled potential's range")));
                }
            }
            Ok(f.value(spec, r))
        })
        .collect()
}

pub fn weighted_total_mean_curvature(spec: &ManifoldSpec, geom: &SurfaceGeometry, f: &StaticPotential) -> Result<f64> {
    let fv = potential_at_nodes(spec, geom, f)?;
    let integrand: Vec<f64> = fv.iter().zip(&geom.mean_curvature).map(|(f, h)| f * h).collect();
    surface_integral(geom, &integrand)
}

pub fn q_value(spec: &ManifoldSpec, geom: &SurfaceGeometry, f: &StaticPotential, m: f64) -> Result<f64> {
    if !(geom.area > 0.0) {
        return Err(Error::Domain(format!("non-positive area {}", geom.area)));
    }
    let n = spec.n as f64;
    let w = weighted_total_mean_curvature(spec, geom, f)?;
    let mass_term = 2.0 * (n - 1.0) * omega(spec.n - 1)? * m;
    Ok(geom.area.powf(-(n - 2.0) / (n - 1.0)) * (mass_term + w))
}

/// `1 − f·√V` at `r`, without cancellation for the closed-form weights.
fn weight_gap(spec: &ManifoldSpec, f: &StaticPotential, r: f64) -> f64 {
    let p = spec.profile_at(r);
    let raw = match f.kind {
        // √V·√V = 1 − (1 − V)
        PotentialKind::Lapse => p.deficit,
        // 1 − V^{e+1/2}
        PotentialKind::LapsePower(e) => -((e + 0.5) * (-p.deficit).ln_1p()).exp_m1(),
        // 1 − √V = (1 − V)/(1 + √V)
        PotentialKind::Unit => p.deficit / (1.0 + p.v.sqrt()),
        PotentialKind::Sampled(_) => return 1.0 - f.value(spec, r) * p.v.sqrt(),
    };
    if f.scale == 1.0 {
        raw
    } else {
        1.0 - f.scale * (1.0 - raw)
    }
}

/// `(1/((n−1)ω)) ∫ fH − (|Σ|/ω)^{(n−2)/(n−1)} + 2m`.
///
/// On a coordinate sphere of radius `r` this is exactly `2m − r^{n−2}(1 − f√V)`,
/// which is evaluated directly since both surface terms grow like `r^{n−2}`.
pub fn minkowski_deficit(spec: &ManifoldSpec, geom: &SurfaceGeometry, f: &StaticPotential, m: f64) -> Result<f64> {
    let n = spec.n as f64;
    let w = omega(spec.n - 1)?;
    if let Layout::Sphere { radius } = geom.layout {
        potential_at_nodes(spec, geom, f)?;
        return Ok(2.0 * m - radius.powi(spec.n as i32 - 2) * weight_gap(spec, f, radius));
    }
    let lhs = weighted_total_mean_curvature(spec, geom, f)? / ((n - 1.0) * w);
    let rhs = (geom.area / w).powf((n - 2.0) / (n - 1.0));
    Ok(lhs - rhs + 2.0 * m)
}

/// `√(|Σ|/16π) (1 − (1/16π) ∫ H²)`, three dimensions only.
pub fn hawking_mass(geom: &SurfaceGeometry) -> Result<f64> {
    if geom.n != 3 {
        return Err(Error::UnsupportedDimension(geom.n, "n = 3 for the Hawking mass"));
    }
    let h2: Vec<f64> = geom.mean_curvature.iter().map(|h| h * h).collect();
    let willmore = surface_integral(geom, &h2)?;
    Ok((geom.area / (16.0 * PI)).sqrt() * (1.0 - willmore / (16.0 * PI)))
}

pub fn slice_quantities(
    spec: &ManifoldSpec,
    geom: &SurfaceGeometry,
    f: &StaticPotential,
    m: f64,
    t: f64,
    initial_area: f64,
) -> Result<SliceQuantities> {
    Ok(SliceQuantities {
        t,
        area: geom.area,
        weighted_total_h: weighted_total_mean_curvature(spec, geom, f)?,
        q: q_value(spec, geom, f, m)?,
        minkowski_deficit: minkowski_deficit(spec, geom, f, m)?,
        hawking_mass: (geom.n == 3).then(|| hawking_mass(geom)).transpose()?,
        umbilicity_deficit: umbilicity_deficit(geom),
        area_residual: (geom.area * (-t).exp() / initial_area - 1.0).abs(),
    })
}

/// Fills `trace.quantities`, one record per output slice.
pub fn attach_quantities(trace: &mut FlowTrace, spec: &ManifoldSpec, f: &StaticPotential, m: f64) -> Result<()> {
    let a0 = trace
        .slices
        .first()
        .ok_or_else(|| Error::InsufficientData("empty trace".into()))?
        .geometry
        .area;
    trace.quantities = trace
        .slices
        .iter()
        .map(|s| slice_quantities(spec, &s.geometry, f, m, s.t, a0))
        .collect::<Result<_>>()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityVerdict {
    pub monotone: bool,
    pub eps_mono: f64,
    /// `max_k Q(t_{k+1}) − Q(t_k)`.
    pub worst_increase: f64,
    /// `Q(t_0) − Q(t_K)`.
    pub total_decrease: f64,
    /// `Q(t_K) − (n−1) ω^{1/(n−1)}`.
    pub limit_gap: f64,
    /// Q extrapolated to `t = ∞` in the variable `e^{−t/(n−1)}`.
    pub extrapolated_limit: f64,
}

pub fn monotonicity_verdict(
    trace: &FlowTrace,
    spec: &ManifoldSpec,
    f: &StaticPotential,
    m: f64,
    eps_mono: f64,
) -> Result<MonotonicityVerdict> {
    if trace.slices.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "monotonicity needs at least 2 slices, trace has {}",
            trace.slices.len()
        )));
    }
    let qs: Vec<f64> = trace
        .slices
        .iter()
        .map(|s| q_value(spec, &s.geometry, f, m))
        .collect::<Result<_>>()?;
    let worst_increase = qs.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let last = qs[qs.len() - 1];
    let target = limit_target(spec.n)?;
    Ok(MonotonicityVerdict {
        monotone: worst_increase <= eps_mono,
        eps_mono,
        worst_increase,
        total_decrease: qs[0] - last,
        limit_gap: last - target,
        extrapolated_limit: extrapolate_limit(&trace.times(), &qs, spec.n),
    })
}

/// Quadratic extrapolation of `Q` to `x = e^{−t/(n−1)} → 0` through the
/// slices at one third, two thirds and the end of the trace.
pub fn extrapolate_limit(times: &[f64], qs: &[f64], n: usize) -> f64 {
    let k = qs.len() - 1;
    if k < 2 {
        return qs[k];
    }
    let idx = [k.div_ceil(3), (2 * k).div_ceil(3), k];
    if idx[0] == idx[1] || idx[1] == idx[2] {
        return qs[k];
    }
    let x: Vec<f64> = idx.iter().map(|&i| (-times[i] / (n - 1) as f64).exp()).collect();
    let y: Vec<f64> = idx.iter().map(|&i| qs[i]).collect();
    // Lagrange form evaluated at x = 0.
    (0..3)
        .map(|a| {
            let mut w = y[a];
            for b in 0..3 {
                if b != a {
                    w *= x[b] / (x[b] - x[a]);
                }
            }
            w
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sphere_geometry, CoordinateSphere};

    fn sphere(spec: &ManifoldSpec, r: f64) -> SurfaceGeometry {
        sphere_geometry(spec, &CoordinateSphere { radius: r }).unwrap()
    }

    #[test]
    fn flat_unit_sphere_values() {
        let spec = ManifoldSpec::flat(3).unwrap();
        let g = sphere(&spec, 1.0);
        let f = StaticPotential::unit();
        assert!((weighted_total_mean_curvature(&spec, &g, &f).unwrap() - 8.0 * PI).abs() < 1e-13);
        assert!((q_value(&spec, &g, &f, 0.0).unwrap() - 4.0 * PI.sqrt()).abs() < 1e-13);
        assert!(hawking_mass(&g).unwrap().abs() < 1e-15);
        assert!(minkowski_deficit(&spec, &g, &f, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn schwarzschild_sphere_values() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        let f = StaticPotential::lapse();
        for r in [2.5, 4.0, 10.0, 37.0] {
            let g = sphere(&spec, r);
            let w = weighted_total_mean_curvature(&spec, &g, &f).unwrap();
            assert!((w - 8.0 * PI * (r - 2.0)).abs() < 1e-11 * r);
            assert!((q_value(&spec, &g, &f, 1.0).unwrap() - 7.0898154036220635).abs() < 1e-13);
            assert!((hawking_mass(&g).unwrap() - 1.0).abs() < 1e-13);
        }
        let g = sphere(&spec, 4.0);
        assert_eq!(minkowski_deficit(&spec, &g, &f, 1.0).unwrap(), 0.0);

        let neg = ManifoldSpec::schwarzschild(3, -0.5).unwrap();
        let g = sphere(&neg, 3.0);
        assert!(minkowski_deficit(&neg, &g, &f, -0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn five_dimensional_weighted_integral() {
        let spec = ManifoldSpec::schwarzschild(5, 0.5).unwrap();
        let g = sphere(&spec, 2.0);
        let w = weighted_total_mean_curvature(&spec, &g, &StaticPotential::lapse()).unwrap();
        // fH = V·(n−1)/r = 7/4 on a sphere of area (8π²/3)·16.
        assert!((w - 224.0 * PI * PI / 3.0).abs() < 1e-11);
    }

    #[test]
    fn hawking_mass_needs_three_dimensions() {
        let spec = ManifoldSpec::schwarzschild(4, 1.0).unwrap();
        assert!(matches!(hawking_mass(&sphere(&spec, 3.0)), Err(Error::UnsupportedDimension(4, _))));
    }

    #[test]
    fn weight_gap_forms_agree_with_direct_evaluation() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        for f in [StaticPotential::lapse(), StaticPotential::lapse_power(1.0), StaticPotential::unit()] {
            for r in [2.5, 4.0, 9.0] {
                let direct = 1.0 - f.value(&spec, r) * spec.lapse_squared(r).sqrt();
                assert!((weight_gap(&spec, &f, r) - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn extrapolation_recovers_quadratic() {
        let times: Vec<f64> = (0..=30).map(|k| k as f64 * 0.1).collect();
        let qs: Vec<f64> = times.iter().map(|t| {
            let x = (-t / 2.0f64).exp();
            7.0 + 0.3 * x - 0.2 * x * x
        }).collect();
        assert!((extrapolate_limit(&times, &qs, 3) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_needs_two_slices() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        let mut trace = crate::flow::flow_sphere(&spec, &CoordinateSphere { radius: 4.0 }, 1.0, 1.0).unwrap();
        trace.slices.truncate(1);
        let err = monotonicity_verdict(&trace, &spec, &StaticPotential::lapse(), 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }
}
