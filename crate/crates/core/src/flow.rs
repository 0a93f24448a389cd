//! Smooth inverse mean curvature flow, `∂x/∂t = ν/H`.
//!
//! Coordinate spheres follow `r(t) = r₀ e^{t/(n−1)}` exactly. Radial graphs
//! move with radial speed `ρ_t = |N|/H`, so that the normal speed is `1/H`;
//! the resulting quasilinear parabolic equation is discretized in θ by the
//! same stencils as [`crate::geometry::graph_geometry`] and advanced by
//! Dormand–Prince with a diffusive step cap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{graph_geometry, graph_nodes_on, sphere_geometry, PolarGrid, AxisymmetricGraph, CoordinateSphere, SurfaceGeometry};
use crate::metric::ManifoldSpec;
use crate::quantities::SliceQuantities;
use crate::rk::{DormandPrince, StageFailure, StepStats, StopReason};

/// Smallest admissible initial mean curvature.
pub const MIN_INITIAL_H: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverParams {
    /// Number of θ intervals (even).
    pub n_grid: usize,
    pub rel_tol: f64,
    pub dt_out: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { n_grid: 200, rel_tol: 1e-7, dt_out: 0.1, t_end: 3.0, cfl_safety: 0.5 }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.n_grid < 4 || !self.n_grid.is_multiple_of(2) {
            return bad(format!("solver.n_grid must be an even number >= 4, got {}", self.n_grid));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return bad(format!("solver.rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("solver.t_end must be positive, got {}", self.t_end));
        }
        if !(self.dt_out > 0.0 && self.dt_out <= self.t_end) {
            return bad(format!("solver.dt_out must lie in (0, t_end], got {}", self.dt_out));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("solver.cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        Ok(())
    }

    /// `t_k = k·dt_out` up to `t_end`, with `t_end` appended if it is not on the lattice.
    pub fn output_times(&self) -> Vec<f64> {
        let count = (self.t_end / self.dt_out + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|k| k as f64 * self.dt_out).collect();
        if let Some(last) = times.last_mut() {
            if (self.t_end - *last).abs() <= 1e-9 * self.t_end {
                *last = self.t_end;
            } else {
                times.push(self.t_end);
            }
        }
        times
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowSurface {
    Sphere(CoordinateSphere),
    Graph(AxisymmetricGraph),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSlice {
    pub t: f64,
    pub surface: FlowSurface,
    pub geometry: SurfaceGeometry,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum FlowStatus {
    Completed,
    Halted { reason: String, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub n: usize,
    pub slices: Vec<FlowSlice>,
    /// Filled by [`crate::quantities::attach_quantities`].
    pub quantities: Vec<SliceQuantities>,
    pub status: FlowStatus,
    pub stats: StepStats,
}

impl FlowTrace {
    pub fn times(&self) -> Vec<f64> {
        self.slices.iter().map(|s| s.t).collect()
    }

    pub fn final_slice(&self) -> Option<&FlowSlice> {
        self.slices.last()
    }
}

pub fn flow_sphere(spec: &ManifoldSpec, s: &CoordinateSphere, t_end: f64, dt_out: f64) -> Result<FlowTrace> {
    let params = SolverParams { t_end, dt_out, ..SolverParams::default() };
    params.validate()?;
    let k = (spec.n - 1) as f64;
    let slices = params
        .output_times()
        .into_iter()
        .map(|t| {
            let sphere = CoordinateSphere { radius: s.radius * (t / k).exp() };
            Ok(FlowSlice { t, geometry: sphere_geometry(spec, &sphere)?, surface: FlowSurface::Sphere(sphere) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowTrace {
        n: spec.n,
        slices,
        quantities: Vec::new(),
        status: FlowStatus::Completed,
        stats: StepStats::default(),
    })
}

/// Radial speed `|N|/H` at every node; returns the diffusive step cap.
fn graph_speed(
    grid: &PolarGrid,
    spec: &ManifoldSpec,
    rho: &[f64],
    out: &mut [f64],
    cfl_safety: f64,
) -> std::result::Result<f64, StageFailure> {
    let step = grid.step;
    let mut max_diffusivity = 0.0f64;
    let mut lost: Option<(usize, f64)> = None;
    graph_nodes_on(grid, spec, rho, |j, node| {
        if !(node.mean_curvature > 0.0) {
            lost.get_or_insert((j, node.mean_curvature));
        }
        out[j] = node.normal_norm / node.mean_curvature;
        max_diffusivity = max_diffusivity.max(node.diffusivity);
    })
    .map_err(|e| match e {
        Error::InsideHorizon { .. } => StageFailure("horizon".into()),
        other => StageFailure(other.to_string()),
    })?;
    if let Some((_, h)) = lost {
        return Err(StageFailure(format!("H<=0 (min H = {h:.3e})")));
    }
    Ok(cfl_safety * step * step / max_diffusivity)
}

pub fn flow_graph(spec: &ManifoldSpec, g: &AxisymmetricGraph, params: &SolverParams) -> Result<FlowTrace> {
    params.validate()?;
    if g.intervals() != params.n_grid {
        return Err(Error::Shape { expected: params.n_grid + 1, got: g.rho.len() });
    }
    let initial = graph_geometry(spec, g)?;
    let min_h = initial.min_mean_curvature();
    if !(min_h > MIN_INITIAL_H) {
        return Err(Error::NotMeanConvex { min_h });
    }

    let mut rho = g.rho.clone();
    let mut t = 0.0;
    let mut slices = vec![FlowSlice { t, surface: FlowSurface::Graph(g.clone()), geometry: initial }];
    let mut status = FlowStatus::Completed;

    let safety = params.cfl_safety;
    let grid = PolarGrid::new(rho.len());
    let mut rhs = |y: &[f64], dy: &mut [f64]| graph_speed(&grid, spec, y, dy, safety);
    let mut rk = DormandPrince::new(rho.len(), params.rel_tol, params.rel_tol, params.dt_out);

    for &t_out in params.output_times().iter().skip(1) {
        match rk.advance(&mut rhs, &mut t, &mut rho, t_out) {
            Ok(()) => {}
            Err(StopReason::Halted { t, reason }) => {
                status = FlowStatus::Halted { reason, t };
                break;
            }
            Err(StopReason::Underflow { t, dt }) => {
                return Err(Error::SolverFailure { t, dt, reason: "step size underflow".into() });
            }
        }
        let graph = AxisymmetricGraph { rho: rho.clone() };
        let geometry = graph_geometry(spec, &graph)?;
        if !geometry.mean_convex {
            status = FlowStatus::Halted { reason: "H<=0".into(), t };
            break;
        }
        slices.push(FlowSlice { t: t_out, surface: FlowSurface::Graph(graph), geometry });
    }

    Ok(FlowTrace { n: spec.n, slices, quantities: Vec::new(), status, stats: rk.stats })
}

/// `max_t | |Σ_t| e^{−t} / |Σ₀| − 1 |`.
pub fn area_law_residual(trace: &FlowTrace) -> Result<f64> {
    let first = trace
        .slices
        .first()
        .ok_or_else(|| Error::InsufficientData("empty trace".into()))?;
    let a0 = first.geometry.area;
    Ok(trace
        .slices
        .iter()
        .map(|s| (s.geometry.area * (-s.t).exp() / a0 - 1.0).abs())
        .fold(0.0, f64::max))
}
