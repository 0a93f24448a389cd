//! Flow slices and their extrinsic geometry.
//!
//! A radial graph `r = ρ(θ)` in `V⁻¹dr² + r²(dθ² + sin²θ dφ²)` has induced
//! metric `g_θθ = ρ′²/V + ρ²`, `g_φφ = ρ² sin²θ` and outward conormal
//! `dr − ρ′ dθ` of length `|N| = √(V + ρ′²/ρ²)`. Its principal curvatures are
//!
//! ```text
//! κ_θ = [−ρ″ + V′ρ′²/(2V) + Vρ + 2ρ′²/ρ] / (|N| g_θθ)
//! κ_φ = [Vρ − ρ′ cot θ] / (|N| ρ²)
//! ```
//!
//! with `ρ′ cot θ → ρ″` at the poles.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{omega, ManifoldSpec};
use crate::spline::{parse_two_columns, CubicSpline};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateSphere {
    pub radius: f64,
}

/// Axisymmetric radial graph sampled at `θ_j = jπ/N`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymmetricGraph {
    pub rho: Vec<f64>,
}

impl AxisymmetricGraph {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        let intervals = rho.len().saturating_sub(1);
        if intervals < 2 || !intervals.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "graph needs an even number of intervals (got {intervals})"
            )));
        }
        if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Domain("graph radii must be finite and positive".into()));
        }
        Ok(Self { rho })
    }

    pub fn from_fn(intervals: usize, rho: impl Fn(f64) -> f64) -> Result<Self> {
        let step = PI / intervals as f64;
        Self::new((0..=intervals).map(|j| rho(j as f64 * step)).collect())
    }

    pub fn constant(intervals: usize, radius: f64) -> Result<Self> {
        Self::from_fn(intervals, |_| radius)
    }

    pub fn intervals(&self) -> usize {
        self.rho.len() - 1
    }

    pub fn step(&self) -> f64 {
        PI / self.intervals() as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        if j == self.intervals() {
            PI
        } else {
            j as f64 * self.step()
        }
    }

    /// Second-order one-sided derivatives `(ρ′(0), ρ′(π))`.
    pub fn pole_slopes(&self) -> (f64, f64) {
        let r = &self.rho;
        let h = self.step();
        let k = r.len() - 1;
        (
            (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * h),
            (3.0 * r[k] - 4.0 * r[k - 1] + r[k - 2]) / (2.0 * h),
        )
    }

    /// Pole regularity check: both one-sided slopes below `tol · max ρ`.
    pub fn check_pole_regularity(&self, tol: f64) -> Result<()> {
        let (a, b) = self.pole_slopes();
        let scale = self.rho.iter().fold(0.0f64, |m, r| m.max(*r));
        if a.abs() > tol * scale || b.abs() > tol * scale {
            return Err(Error::Domain(format!(
                "graph is not regular at the poles (rho'(0)={a:.3e}, rho'(pi)={b:.3e})"
            )));
        }
        Ok(())
    }

    pub fn min_radius(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Two-column `θ ρ` text, full precision.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# theta rho\n");
        for (j, r) in self.rho.iter().enumerate() {
            out.push_str(&format!("{} {}\n", self.theta(j), r));
        }
        out
    }

    /// Reads `θ ρ` samples spanning `[0, π]` and resamples them onto a grid
    /// with `intervals` intervals by cubic interpolation. The samples are
    /// reflected evenly across both poles first, so the spline sees a smooth
    /// periodic extension instead of natural end conditions.
    pub fn from_text(text: &str, intervals: usize) -> Result<Self> {
        let (theta, rho) = parse_two_columns(text).map_err(|msg| Error::Config {
            path: "surface.rho0_file".into(),
            msg,
        })?;
        let (lo, hi) = (theta.first().copied(), theta.last().copied());
        match (lo, hi) {
            (Some(lo), Some(hi)) if lo.abs() < 1e-9 && (hi - PI).abs() < 1e-9 => {}
            _ => {
                return Err(Error::Domain("graph samples must span theta in [0, pi]".into()));
            }
        }
        if theta.len() == intervals + 1 {
            let step = PI / intervals as f64;
            let uniform = theta.iter().enumerate().all(|(j, t)| (t - j as f64 * step).abs() < 1e-9);
            if uniform {
                return Self::new(rho);
            }
        }
        let pad = (theta.len() - 1).min(8);
        let mut x = Vec::with_capacity(theta.len() + 2 * pad);
        let mut y = Vec::with_capacity(x.capacity());
        for j in (1..=pad).rev() {
            x.push(-theta[j]);
            y.push(rho[j]);
        }
        x.extend_from_slice(&theta);
        y.extend_from_slice(&rho);
        let last = theta.len() - 1;
        for j in 1..=pad {
            x.push(2.0 * PI - theta[last - j]);
            y.push(rho[last - j]);
        }
        let spline = CubicSpline::new(x, y)?;
        Self::from_fn(intervals, |t| spline.value(t))
    }

    pub fn load(path: &Path, intervals: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, intervals)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Sphere { radius: f64 },
    Graph {
        step: f64,
        radii: Vec<f64>,
        /// `J(θ) = ρ sin θ √g_θθ`; the area is `2π ∫ J dθ`.
        /// Quadrature weight of each node, `2π w_j ρ √g_θθ`; sums to the area.
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGeometry {
    pub n: usize,
    pub layout: Layout,
    pub mean_curvature: Vec<f64>,
    pub second_form_norm_sq: Vec<f64>,
    /// `Σ_{i<j} (κ_i − κ_j)²`, identical to `(n−1)|A|² − H²` but free of cancellation.
    pub principal_spread: Vec<f64>,
    pub area: f64,
    pub mean_convex: bool,
}

impl SurfaceGeometry {
    pub fn node_radii(&self) -> &[f64] {
        match &self.layout {
            Layout::Sphere { radius } => std::slice::from_ref(radius),
            Layout::Graph { radii, .. } => radii,
        }
    }

    pub fn node_count(&self) -> usize {
        self.mean_curvature.len()
    }

    pub fn min_mean_curvature(&self) -> f64 {
        self.mean_curvature.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn sphere_geometry(spec: &ManifoldSpec, s: &CoordinateSphere) -> Result<SurfaceGeometry> {
    let r = s.radius;
    let v = spec.lapse_squared(r);
    if !(r > 0.0 && v > 0.0) {
        return Err(Error::InsideHorizon { radius: r, horizon: spec.r_min });
    }
    let k = (spec.n - 1) as f64;
    Ok(SurfaceGeometry {
        n: spec.n,
        layout: Layout::Sphere { radius: r },
        mean_curvature: vec![k * v.sqrt() / r],
        second_form_norm_sq: vec![k * v / (r * r)],
        principal_spread: vec![0.0],
        area: omega(spec.n - 1)? * r.powi(spec.n as i32 - 1),
        mean_convex: true,
    })
}

/// Pointwise geometry of a graph node.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GraphNode {
    pub mean_curvature: f64,
    pub norm_sq: f64,
    pub spread: f64,
    /// `ρ √g_θθ`, the area element without its `sin θ` factor.
    pub area_density: f64,
    /// `|N|`, so that the radial speed of IMCF is `|N| / H`.
    pub normal_norm: f64,
    /// Coefficient of `ρ″` in `ρ_t`, i.e. `1/(H² g_θθ)`.
    pub diffusivity: f64,
}

/// `cot θ` table for a uniform θ grid on `[0, π]`.
pub(crate) struct PolarGrid {
    pub step: f64,
    /// Unused at the poles.
    cot: Vec<f64>,
}

impl PolarGrid {
    pub fn new(nodes: usize) -> Self {
        let last = nodes - 1;
        let step = PI / last as f64;
        let cot = (0..nodes)
            .map(|j| {
                if j == 0 || j == last {
                    return 0.0;
                }
                let (s, c) = (j as f64 * step).sin_cos();
                c / s
            })
            .collect();
        Self { step, cot }
    }

    pub fn len(&self) -> usize {
        self.cot.len()
    }
}

/// Evaluates node geometry for every grid point, with even reflection across the poles.
pub(crate) fn graph_nodes(
    spec: &ManifoldSpec,
    rho: &[f64],
    visit: impl FnMut(usize, GraphNode),
) -> Result<()> {
    graph_nodes_on(&PolarGrid::new(rho.len()), spec, rho, visit)
}

#[inline]
pub(crate) fn graph_nodes_on(
    grid: &PolarGrid,
    spec: &ManifoldSpec,
    rho: &[f64],
    mut visit: impl FnMut(usize, GraphNode),
) -> Result<()> {
    debug_assert_eq!(grid.len(), rho.len());
    let last = rho.len() - 1;
    let h = grid.step;
    for j in 0..=last {
        let prev = if j == 0 { rho[1] } else { rho[j - 1] };
        let next = if j == last { rho[last - 1] } else { rho[j + 1] };
        let r = rho[j];
        let p = spec.profile_at(r);
        if !(p.v > 0.0) || !(r > 0.0) {
            return Err(Error::InsideHorizon { radius: r, horizon: spec.r_min });
        }
        let d1 = (next - prev) / (2.0 * h);
        let d2 = (next - 2.0 * r + prev) / (h * h);
        let pole = j == 0 || j == last;

        let g_tt = d1 * d1 / p.v + r * r;
        let normal_norm = (p.v + d1 * d1 / (r * r)).sqrt();
        let h_tt = (-d2 + p.dv * d1 * d1 / (2.0 * p.v) + p.v * r + 2.0 * d1 * d1 / r) / normal_norm;
        let kappa_theta = h_tt / g_tt;
        let cot_term = if pole { d2 } else { d1 * grid.cot[j] };
        let kappa_phi = (p.v * r - cot_term) / (normal_norm * r * r);

        let mean_curvature = kappa_theta + kappa_phi;
        visit(
            j,
            GraphNode {
                mean_curvature,
                norm_sq: kappa_theta * kappa_theta + kappa_phi * kappa_phi,
                spread: (kappa_theta - kappa_phi).powi(2),
                area_density: r * g_tt.sqrt(),
                normal_norm,
                diffusivity: 1.0 / (mean_curvature * mean_curvature * g_tt),
            },
        );
    }
    Ok(())
}

pub fn graph_geometry(spec: &ManifoldSpec, g: &AxisymmetricGraph) -> Result<SurfaceGeometry> {
    if spec.n != 3 {
        return Err(Error::UnsupportedDimension(spec.n, "n = 3 for axisymmetric graphs"));
    }
    let count = g.rho.len();
    let mut mean_curvature = vec![0.0; count];
    let mut second_form_norm_sq = vec![0.0; count];
    let mut principal_spread = vec![0.0; count];
    let mut weights = clenshaw_curtis_weights(count - 1);
    graph_nodes(spec, &g.rho, |j, node| {
        mean_curvature[j] = node.mean_curvature;
        second_form_norm_sq[j] = node.norm_sq;
        principal_spread[j] = node.spread;
        weights[j] *= 2.0 * PI * node.area_density;
    })?;
    let step = g.step();
    let area = weights.iter().sum();
    let mean_convex = mean_curvature.iter().all(|h| *h > 0.0);
    Ok(SurfaceGeometry {
        n: spec.n,
        layout: Layout::Graph { step, radii: g.rho.clone(), weights },
        mean_curvature,
        second_form_norm_sq,
        principal_spread,
        area,
        mean_convex,
    })
}

/// Clenshaw–Curtis weights for `∫₀^π g(θ) sin θ dθ = ∫₋₁¹ g dx` on the
/// uniform grid `θ_j = jπ/N`, i.e. the Chebyshev points `x_j = cos θ_j`.
/// Exact for `g` polynomial in `cos θ` of degree ≤ N, spectrally accurate for
/// smooth axisymmetric `g`.
pub fn clenshaw_curtis_weights(intervals: usize) -> Vec<f64> {
    let n = intervals;
    assert!(n >= 1, "need at least one interval");
    let cos_table: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
    (0..=n)
        .map(|j| {
            let mut sum = 1.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                sum -= b / (4.0 * (k * k) as f64 - 1.0) * cos_table[(k * j) % n];
            }
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            c * sum / n as f64
        })
        .collect()
}

pub fn surface_integral(geom: &SurfaceGeometry, integrand: &[f64]) -> Result<f64> {
    if integrand.len() != geom.node_count() {
        return Err(Error::Shape { expected: geom.node_count(), got: integrand.len() });
    }
    match &geom.layout {
        Layout::Sphere { .. } => Ok(integrand[0] * geom.area),
        Layout::Graph { weights, .. } => Ok(integrand.iter().zip(weights).map(|(a, w)| a * w).sum()),
    }
}

/// Largest `(n−1)|A|² − H²` over the nodes; zero exactly on totally umbilic slices.
pub fn umbilicity_deficit(geom: &SurfaceGeometry) -> f64 {
    geom.principal_spread.iter().copied().fold(0.0, f64::max)
}
