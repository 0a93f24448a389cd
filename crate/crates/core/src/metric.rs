//! Rotationally symmetric static manifolds `g = V(r)⁻¹ dr² + r² dΩ²_{n−1}`.
//!
//! Curvature is written in the orthonormal frame `{√V ∂_r, r⁻¹ e_i}`:
//!
//! ```text
//! Ric(ν,ν) = −(n−1) V′ / (2r)
//! Ric(e,e) = −V′ / (2r) + (n−2)(1−V) / r²
//! ```
//!
//! and for a radial function `f(r)` the Hessian has components
//! `∇²f(ν,ν) = V f″ + V′ f′ / 2` and `∇²f(e,e) = V f′ / r`.

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Default inner cutoff when the profile has no horizon.
pub const DEFAULT_R_MIN: f64 = 0.1;
/// Default outer truncation radius for asymptotic operations.
pub const DEFAULT_R_MAX: f64 = 1000.0;
/// Absolute tolerance of the horizon bisection.
pub const HORIZON_TOL: f64 = 1e-12;

/// Area of the unit `k`-sphere, `2π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn omega(k: usize) -> Result<f64> {
    use std::f64::consts::PI;
    match k {
        0 => Err(Error::Domain("omega(k) requires k >= 1".into())),
        1 => Ok(2.0 * PI),
        2 => Ok(4.0 * PI),
        // ω_k = 2π ω_{k−2} / (k − 1)
        _ => Ok(2.0 * PI * omega(k - 2)? / (k - 1) as f64),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `V = 1 − 2m r^{2−n}`. For `m > 0` the horizon radius is cached so that
    /// `V(r_h)` evaluates to exactly zero.
    Schwarzschild { m: f64, horizon: Option<f64> },
    /// `V = 1 − 2m r^{2−n} + q² r^{2(2−n)}`; not scalar-flat unless `q = 0`.
    Charged { m: f64, q: f64 },
    /// Tabulated `(r, V)` samples, interpolated by a natural cubic spline.
    Tabulated(CubicSpline),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassParam {
    Nominal(f64),
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub n: usize,
    pub profile: RadialProfile,
    pub mass_param: MassParam,
    pub r_min: f64,
    pub r_max: f64,
}

/// `(V, V′, V″)` at a radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValues {
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
    /// `1 − V`, evaluated without cancellation where the form allows.
    pub deficit: f64,
}

fn check_dimension(n: usize) -> Result<()> {
    if (3..=7).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n, "3 <= n <= 7"))
    }
}

impl ManifoldSpec {
    pub fn schwarzschild(n: usize, m: f64) -> Result<Self> {
        check_dimension(n)?;
        if !m.is_finite() {
            return Err(Error::Domain(format!("mass must be finite, got {m}")));
        }
        let horizon = (m > 0.0).then(|| (2.0 * m).powf(1.0 / (n - 2) as f64));
        Ok(Self {
            n,
            profile: RadialProfile::Schwarzschild { m, horizon },
            mass_param: MassParam::Nominal(m),
            r_min: horizon.unwrap_or(DEFAULT_R_MIN),
            r_max: DEFAULT_R_MAX,
        })
    }

    pub fn flat(n: usize) -> Result<Self> {
        Self::schwarzschild(n, 0.0)
    }

    pub fn charged(n: usize, m: f64, q: f64) -> Result<Self> {
        check_dimension(n)?;
        let mut spec = Self {
            n,
            profile: RadialProfile::Charged { m, q },
            mass_param: MassParam::Nominal(m),
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
        };
        spec.r_min = horizon_radius(&spec).unwrap_or(DEFAULT_R_MIN);
        Ok(spec)
    }

    /// Custom profile from tabulated `(r, V)` pairs. The working domain is the
    /// table range, cut at the outermost zero of `V` if there is one.
    pub fn tabulated(n: usize, radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_dimension(n)?;
        let spline = CubicSpline::new(radii, values)?;
        let (lo, hi) = spline.domain();
        let mut spec = Self {
            n,
            profile: RadialProfile::Tabulated(spline),
            mass_param: MassParam::Custom,
            r_min: lo,
            r_max: hi,
        };
        if let Some(rh) = horizon_radius(&spec) {
            spec.r_min = rh;
        }
        Ok(spec)
    }

    pub fn with_r_min(mut self, r_min: f64) -> Result<Self> {
        if let Some(rh) = horizon_radius(&self) {
            if r_min < rh {
                return Err(Error::Domain(format!(
                    "r_min={r_min} lies inside the horizon r_h={rh}"
                )));
            }
        }
        if let RadialProfile::Tabulated(s) = &self.profile {
            if !s.contains(r_min) {
                return Err(Error::Domain(format!("r_min={r_min} outside tabulated range")));
            }
        }
        if !(r_min > 0.0 && r_min < self.r_max) {
            return Err(Error::Domain(format!("r_min={r_min} must lie in (0, r_max)")));
        }
        self.r_min = r_min;
        Ok(self)
    }

    pub fn with_r_max(mut self, r_max: f64) -> Result<Self> {
        if let RadialProfile::Tabulated(s) = &self.profile {
            if !s.contains(r_max) {
                return Err(Error::Domain(format!("r_max={r_max} outside tabulated range")));
            }
        }
        if !(r_max > self.r_min) || !r_max.is_finite() {
            return Err(Error::Domain(format!("r_max={r_max} must exceed r_min={}", self.r_min)));
        }
        self.r_max = r_max;
        Ok(self)
    }

    /// Nominal mass of the Schwarzschild family, `None` for custom profiles.
    pub fn nominal_mass(&self) -> Option<f64> {
        match self.mass_param {
            MassParam::Nominal(m) => Some(m),
            MassParam::Custom => None,
        }
    }

    /// ADM mass read off the metric at `r_max`: `m = r^{n−2}(1 − V)/2`.
    /// Exact for the Schwarzschild family.
    pub fn adm_mass(&self) -> f64 {
        match self.profile {
            RadialProfile::Schwarzschild { m, .. } => m,
            _ => {
                let p = self.profile_at(self.r_max);
                0.5 * self.r_max.powi(self.n as i32 - 2) * p.deficit
            }
        }
    }

    pub fn in_domain(&self, r: f64) -> bool {
        r > self.r_min && r <= self.r_max * (1.0 + 1e-12)
    }

    pub fn check_domain(&self, r: f64) -> Result<()> {
        if self.in_domain(r) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "r={r} outside working domain ({}, {}]",
                self.r_min, self.r_max
            )))
        }
    }

    /// Profile values without domain checks. Closed-form profiles accept any
    /// `r > 0`; tabulated profiles extrapolate their end cubics.
    pub fn profile_at(&self, r: f64) -> ProfileValues {
        let n = self.n as f64;
        match &self.profile {
            RadialProfile::Schwarzschild { m, horizon } => {
                // u = 2m r^{2−n}
                let u = match horizon {
                    Some(rh) => (rh / r).powi(self.n as i32 - 2),
                    None => 2.0 * m * r.powi(2 - self.n as i32),
                };
                ProfileValues {
                    v: 1.0 - u,
                    dv: (n - 2.0) * u / r,
                    d2v: -(n - 2.0) * (n - 1.0) * u / (r * r),
                    deficit: u,
                }
            }
            RadialProfile::Charged { m, q } => {
                let x = r.powi(2 - self.n as i32);
                let dx = (2.0 - n) * x / r;
                let d2x = (2.0 - n) * (1.0 - n) * x / (r * r);
                let deficit = 2.0 * m * x - q * q * x * x;
                let slope = -2.0 * m + 2.0 * q * q * x;
                ProfileValues {
                    v: 1.0 - deficit,
                    dv: slope * dx,
                    d2v: 2.0 * q * q * dx * dx + slope * d2x,
                    deficit,
                }
            }
            RadialProfile::Tabulated(s) => {
                let (v, dv, d2v) = s.eval(r);
                ProfileValues { v, dv, d2v, deficit: 1.0 - v }
            }
        }
    }

    pub fn lapse_squared(&self, r: f64) -> f64 {
        self.profile_at(r).v
    }

    /// Log-spaced radii spanning the diagnostic range `[max(1.1 r_min, 0.5), r_max]`.
    pub fn diagnostic_radii(&self, count: usize) -> Vec<f64> {
        let lo = (1.1 * self.r_min).max(0.5).min(self.r_max);
        log_spaced(lo, self.r_max, count)
    }
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| {
                    if i + 1 == count {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `f = √V`, the static potential of the Schwarzschild family.
    Lapse,
    /// `f = V^p`. Static only for `p = 1/2`; `p = 1` is the standard negative control.
    LapsePower(f64),
    /// `f ≡ 1`, static on flat space.
    Unit,
    /// Tabulated `(r, f)` samples.
    Sampled(CubicSpline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticPotential {
    pub kind: PotentialKind,
    /// Multiplicative rescaling applied to the raw form.
    pub scale: f64,
    /// Whether `scale` was chosen so that `f → 1` at infinity.
    pub normalized: bool,
}

/// `(f, f′, f″)` at a radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValues {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

impl StaticPotential {
    pub fn lapse() -> Self {
        Self { kind: PotentialKind::Lapse, scale: 1.0, normalized: true }
    }

    pub fn lapse_power(p: f64) -> Self {
        Self { kind: PotentialKind::LapsePower(p), scale: 1.0, normalized: true }
    }

    pub fn unit() -> Self {
        Self { kind: PotentialKind::Unit, scale: 1.0, normalized: true }
    }

    /// Sampled potential; not normalized until [`StaticPotential::normalize`] runs.
    pub fn sampled(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self {
            kind: PotentialKind::Sampled(CubicSpline::new(radii, values)?),
            scale: 1.0,
            normalized: false,
        })
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self.kind, PotentialKind::Sampled(_))
    }

    pub fn eval(&self, spec: &ManifoldSpec, r: f64) -> PotentialValues {
        let raw = match &self.kind {
            PotentialKind::Lapse => {
                let p = spec.profile_at(r);
                let v = p.v.max(0.0);
                let s = v.sqrt();
                PotentialValues {
                    f: s,
                    df: p.dv / (2.0 * s),
                    d2f: p.d2v / (2.0 * s) - p.dv * p.dv / (4.0 * v * s),
                }
            }
            PotentialKind::LapsePower(e) => {
                let p = spec.profile_at(r);
                let v = p.v.max(0.0);
                PotentialValues {
                    f: v.powf(*e),
                    df: e * v.powf(e - 1.0) * p.dv,
                    d2f: e * (e - 1.0) * v.powf(e - 2.0) * p.dv * p.dv + e * v.powf(e - 1.0) * p.d2v,
                }
            }
            PotentialKind::Unit => PotentialValues { f: 1.0, df: 0.0, d2f: 0.0 },
            PotentialKind::Sampled(s) => {
                let (f, df, d2f) = s.eval(r);
                PotentialValues { f, df, d2f }
            }
        };
        PotentialValues {
            f: self.scale * raw.f,
            df: self.scale * raw.df,
            d2f: self.scale * raw.d2f,
        }
    }

    pub fn value(&self, spec: &ManifoldSpec, r: f64) -> f64 {
        self.eval(spec, r).f
    }

    /// Asymptotic constant `lim f` of the unscaled potential. Closed forms over
    /// analytic profiles tend to exactly 1; otherwise `f ≈ c + b r^{2−n}` is
    /// fitted on the tail and `c` returned.
    pub fn asymptotic_constant(&self, spec: &ManifoldSpec, tail: &RadialInterval) -> Result<f64> {
        let analytic_profile = !matches!(spec.profile, RadialProfile::Tabulated(_));
        if self.is_closed_form() && analytic_profile {
            return Ok(1.0);
        }
        let radii = tail.radii(spec)?;
        let xs: Vec<f64> = radii.iter().map(|r| r.powi(2 - spec.n as i32)).collect();
        let ys: Vec<f64> = radii.iter().map(|&r| self.value(spec, r) / self.scale).collect();
        let (c, _) = linear_fit(&xs, &ys);
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::FitQuality {
                reason: format!("asymptotic constant {c} is not positive"),
                residual: f64::NAN,
            });
        }
        Ok(c)
    }

    /// Rescales so that `f → 1` at infinity.
    pub fn normalize(mut self, spec: &ManifoldSpec, tail: &RadialInterval) -> Result<Self> {
        let c = self.asymptotic_constant(spec, tail)?;
        self.scale = 1.0 / c;
        self.normalized = true;
        Ok(self)
    }
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}

/// Radial interval sampled at log-spaced radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialInterval {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl RadialInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, samples: 64 }
    }

    pub fn radii(&self, spec: &ManifoldSpec) -> Result<Vec<f64>> {
        if self.samples < 10 {
            return Err(Error::FitQuality {
                reason: format!("tail has {} samples, need at least 10", self.samples),
                residual: f64::NAN,
            });
        }
        if !(self.lo < self.hi) {
            return Err(Error::FitQuality {
                reason: format!("empty tail [{}, {}]", self.lo, self.hi),
                residual: f64::NAN,
            });
        }
        spec.check_domain(self.lo)?;
        spec.check_domain(self.hi)?;
        Ok(log_spaced(self.lo, self.hi, self.samples))
    }
}

/// `R = (n−1)[(n−2)(1−V)/r² − V′/r]`.
pub fn scalar_curvature(spec: &ManifoldSpec, r: f64) -> Result<f64> {
    spec.check_domain(r)?;
    let n = spec.n as f64;
    let p = spec.profile_at(r);
    Ok((n - 1.0) * ((n - 2.0) * p.deficit / r - p.dv) / r)
}

/// Ricci curvature `(Ric(ν,ν), Ric(e,e))` in the orthonormal frame.
pub fn ricci(spec: &ManifoldSpec, r: f64) -> (f64, f64) {
    let n = spec.n as f64;
    let p = spec.profile_at(r);
    let radial = -(n - 1.0) * p.dv / (2.0 * r);
    let tangential = -p.dv / (2.0 * r) + (n - 2.0) * p.deficit / (r * r);
    (radial, tangential)
}

/// Radial-radial and tangential-tangential frame components of
/// `Δf·g − ∇²f + f·Ric`.
pub fn static_residual(spec: &ManifoldSpec, f: &StaticPotential, r: f64) -> Result<(f64, f64)> {
    spec.check_domain(r)?;
    let p = spec.profile_at(r);
    let fv = f.eval(spec, r);
    let (ric_rr, ric_tt) = ricci(spec, r);
    let laplacian = laplacian(spec, &fv, r);
    let hess_rr = p.v * fv.d2f + 0.5 * p.dv * fv.df;
    let hess_tt = p.v * fv.df / r;
    Ok((
        laplacian - hess_rr + fv.f * ric_rr,
        laplacian - hess_tt + fv.f * ric_tt,
    ))
}

fn laplacian(spec: &ManifoldSpec, fv: &PotentialValues, r: f64) -> f64 {
    let n = spec.n as f64;
    let p = spec.profile_at(r);
    p.v * fv.d2f + (0.5 * p.dv + (n - 1.0) * p.v / r) * fv.df
}

/// `Δ_g f = V f″ + [V′/2 + (n−1)V/r] f′`.
pub fn harmonicity_residual(spec: &ManifoldSpec, f: &StaticPotential, r: f64) -> Result<f64> {
    spec.check_domain(r)?;
    Ok(laplacian(spec, &f.eval(spec, r), r))
}

/// Normalized flux `∫_{S_r} ∇f·ν / ((n−2) ω_{n−1})`, which equals the ADM mass
/// for a static potential.
pub fn adm_mass_flux(spec: &ManifoldSpec, f: &StaticPotential, r: f64) -> Result<f64> {
    spec.check_domain(r)?;
    let p = spec.profile_at(r);
    let fv = f.eval(spec, r);
    // ω_{n−1} cancels between the sphere area and the normalization.
    Ok(p.v.sqrt() * fv.df * r.powi(spec.n as i32 - 1) / (spec.n as f64 - 2.0))
}

/// Least-squares fit of `f ≈ 1 − m̂ r^{2−n}` over the tail.
pub fn adm_mass_fit(spec: &ManifoldSpec, f: &StaticPotential, tail: &RadialInterval) -> Result<f64> {
    let radii = tail.radii(spec)?;
    let xs: Vec<f64> = radii.iter().map(|r| r.powi(2 - spec.n as i32)).collect();
    let gaps: Vec<f64> = radii.iter().map(|&r| 1.0 - f.value(spec, r)).collect();

    let worst = gaps.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    if !(worst <= 0.5) {
        return Err(Error::FitQuality {
            reason: format!("f is not near 1 on the tail (max |1 - f| = {worst:.3e})"),
            residual: worst,
        });
    }

    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&gaps).map(|(x, g)| x * g).sum();
    let m_hat = sxy / sxx;

    let count = xs.len() as f64;
    let rms = (xs.iter().zip(&gaps).map(|(x, g)| (g - m_hat * x).powi(2)).sum::<f64>() / count).sqrt();
    let scale = (sxx / count).sqrt() * m_hat.abs();
    if rms > 0.05 * scale.max(1e-14) {
        return Err(Error::FitQuality {
            reason: "tail does not follow 1 - m r^(2-n)".into(),
            residual: rms,
        });
    }
    Ok(m_hat)
}

/// Outermost zero of `V` below `r_max`, or `None` when `V > 0` throughout.
/// Closed form for the Schwarzschild family; scan plus bisection otherwise.
pub fn horizon_radius(spec: &ManifoldSpec) -> Option<f64> {
    match &spec.profile {
        RadialProfile::Schwarzschild { horizon, .. } => *horizon,
        RadialProfile::Charged { .. } => scan_for_horizon(spec, 1e-4, spec.r_max),
        RadialProfile::Tabulated(s) => {
            let (lo, hi) = s.domain();
            scan_for_horizon(spec, lo, hi.min(spec.r_max))
        }
    }
}

fn scan_for_horizon(spec: &ManifoldSpec, lo: f64, hi: f64) -> Option<f64> {
    let grid = log_spaced(lo, hi, 4096);
    let v = |r: f64| spec.profile_at(r).v;
    grid.windows(2)
        .rev()
        .find(|w| v(w[0]) <= 0.0 && v(w[1]) > 0.0)
        .map(|w| bisect_root(v, w[0], w[1], HORIZON_TOL))
}

/// Bisection for a sign change of `g` on `[lo, hi]` with `g(lo) ≤ 0 < g(hi)`.
/// Returns the upper end of the final bracket.
pub fn bisect_root(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_low_dimensions() {
        assert_eq!(omega(1).unwrap(), 2.0 * PI);
        assert!((omega(2).unwrap() - 12.566370614).abs() < 1e-9);
        assert!((omega(3).unwrap() - 19.739208802).abs() < 1e-9);
        assert!(matches!(omega(0), Err(Error::Domain(_))));
    }

    #[test]
    fn flat_space_is_scalar_flat() {
        let spec = ManifoldSpec::flat(3).unwrap();
        for r in [0.2, 1.0, 17.0] {
            assert_eq!(scalar_curvature(&spec, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn schwarzschild_scalar_flat_at_r4() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        assert!(scalar_curvature(&spec, 4.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        assert!(scalar_curvature(&spec, 2.0).is_err());
        assert!(scalar_curvature(&spec, 1.0e4).is_err());
        assert!(ManifoldSpec::schwarzschild(8, 1.0).is_err());
        assert!(ManifoldSpec::schwarzschild(2, 1.0).is_err());
    }

    #[test]
    fn static_weight_vs_negative_control() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        let (a, b) = static_residual(&spec, &StaticPotential::lapse(), 3.0).unwrap();
        assert!(a.abs() < 1e-14 && b.abs() < 1e-14);
        let (a, b) = static_residual(&spec, &StaticPotential::lapse_power(1.0), 3.0).unwrap();
        assert!(a.abs() > 1e-3 && b.abs() > 1e-3, "{a} {b}");
    }

    #[test]
    fn horizon_closed_forms() {
        assert_eq!(horizon_radius(&ManifoldSpec::schwarzschild(3, 1.0).unwrap()), Some(2.0));
        assert_eq!(horizon_radius(&ManifoldSpec::schwarzschild(4, 2.0).unwrap()), Some(2.0));
        assert_eq!(horizon_radius(&ManifoldSpec::schwarzschild(3, -1.0).unwrap()), None);
        assert_eq!(horizon_radius(&ManifoldSpec::flat(5).unwrap()), None);
    }

    #[test]
    fn charged_horizon_is_outer_root() {
        let spec = ManifoldSpec::charged(3, 1.0, 0.5).unwrap();
        let rh = horizon_radius(&spec).unwrap();
        assert!((rh - (1.0 + 0.75f64.sqrt())).abs() < 1e-11);
        assert_eq!(spec.r_min, rh);
    }

    #[test]
    fn flat_fit_is_exactly_zero() {
        let spec = ManifoldSpec::flat(3).unwrap();
        let m = adm_mass_fit(&spec, &StaticPotential::unit(), &RadialInterval::new(100.0, 1000.0)).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn fit_rejects_short_tail() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        let tail = RadialInterval { lo: 100.0, hi: 1000.0, samples: 5 };
        assert!(matches!(
            adm_mass_fit(&spec, &StaticPotential::lapse(), &tail),
            Err(Error::FitQuality { .. })
        ));
    }

    #[test]
    fn fit_rejects_non_asymptotic_weight() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        let mut f = StaticPotential::lapse();
        f.scale = 3.0;
        assert!(matches!(
            adm_mass_fit(&spec, &f, &RadialInterval::new(100.0, 1000.0)),
            Err(Error::FitQuality { .. })
        ));
    }

    #[test]
    fn sampled_potential_normalizes_to_one() {
        let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
        let radii = log_spaced(2.5, 1000.0, 400);
        let values: Vec<f64> = radii.iter().map(|r| 2.0 * (1.0 - 2.0 / r).sqrt()).collect();
        let f = StaticPotential::sampled(radii, values)
            .unwrap()
            .normalize(&spec, &RadialInterval::new(100.0, 1000.0))
            .unwrap();
        assert!((f.scale - 0.5).abs() < 1e-4);
        let m = adm_mass_fit(&spec, &f, &RadialInterval::new(100.0, 1000.0)).unwrap();
        assert!((m - 1.0).abs() < 2e-2, "{m}");
    }

    #[test]
    fn tabulated_profile_recovers_schwarzschild() {
        let radii = log_spaced(2.0, 1000.0, 2000);
        let values: Vec<f64> = radii.iter().map(|r| 1.0 - 2.0 / r).collect();
        let spec = ManifoldSpec::tabulated(3, radii, values).unwrap();
        let rh = horizon_radius(&spec).unwrap();
        assert!((rh - 2.0).abs() < 1e-9, "{rh}");
        assert!((spec.adm_mass() - 1.0).abs() < 1e-9);
        assert!(scalar_curvature(&spec, 10.0).unwrap().abs() < 1e-5);
    }
}
