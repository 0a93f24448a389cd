use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{area_law_residual, flow_graph, flow_sphere, FlowStatus, FlowTrace};
use crate::metric::{
    adm_mass_fit, adm_mass_flux, harmonicity_residual, horizon_radius, scalar_curvature, static_residual, ManifoldSpec,
    PotentialKind, StaticPotential,
};
use crate::quantities::{attach_quantities, limit_target, monotonicity_verdict, SliceQuantities};
use crate::rk::StepStats;
use crate::scenario::config::{Analysis, ConfigDocument, InitialSurface, ScenarioConfig};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const SOLVER: i32 = 4;
    pub const MONOTONICITY: i32 = 5;
    pub const DEFICIT: i32 = 6;
    /// Area law, limit or staticity verdict failed, or a warning under `--strict`.
    pub const OTHER_VERDICT: i32 = 7;
}

/// Exit code for an error that stopped a scenario before any verdict.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => exit::IO,
        Error::Config { .. } | Error::Expression { .. } => exit::PARSE,
        Error::Validation(_)
        | Error::Domain(_)
        | Error::InsideHorizon { .. }
        | Error::UnsupportedDimension(..)
        | Error::Shape { .. }
        | Error::NotMeanConvex { .. } => exit::VALIDATION,
        Error::SolverFailure { .. } | Error::InsufficientData(_) | Error::FitQuality { .. } => exit::SOLVER,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Treat warnings as failures.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Masses {
    /// Mass entering `Q`, read off the metric.
    pub adm_mass: f64,
    /// Flux of `∇f` through the sphere at `r_max`.
    pub flux_at_r_max: f64,
    /// Tail fit of `f ≈ 1 − m r^{2−n}`; `None` if the fit was rejected.
    pub tail_fit: Option<f64>,
    pub horizon_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub samples: usize,
    pub r_lo: f64,
    pub r_hi: f64,
    /// Sup over the grid of both frame components of `Δf g − ∇²f + f Ric`.
    pub max_static_residual: f64,
    pub max_harmonicity_residual: f64,
    pub max_abs_scalar_curvature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StaticReport {
    pub scenario: String,
    pub n: usize,
    pub masses: Masses,
    pub diagnostics: Diagnostics,
    pub staticity: StaticityVerdict,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneVerdict {
    pub pass: bool,
    pub tolerance_key: &'static str,
    pub eps_mono: f64,
    pub worst_increase: f64,
    pub total_decrease: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeficitVerdict {
    pub pass: bool,
    pub tolerance_key: &'static str,
    pub eps_deficit: f64,
    pub initial: f64,
    pub min_over_trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AreaLawVerdict {
    pub pass: bool,
    pub tolerance_key: &'static str,
    pub area_tol: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitVerdict {
    pub pass: bool,
    pub tolerance_key: &'static str,
    pub limit_rel_tol: f64,
    pub target: f64,
    pub final_q: f64,
    pub limit_gap: f64,
    pub extrapolated: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticityVerdict {
    pub pass: bool,
    pub tolerance_key: &'static str,
    pub static_tol: f64,
    pub max_static_residual: f64,
    pub max_harmonicity_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdicts {
    pub monotone: MonotoneVerdict,
    pub deficit: DeficitVerdict,
    pub area_law: AreaLawVerdict,
    pub limit: LimitVerdict,
    pub staticity: StaticityVerdict,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.monotone.pass && self.deficit.pass && self.area_law.pass && self.limit.pass && self.staticity.pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSummary {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl From<StepStats> for SolverSummary {
    fn from(s: StepStats) -> Self {
        Self { accepted_steps: s.accepted, rejected_steps: s.rejected }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub n: usize,
    pub surface_kind: &'static str,
    /// Spheres in a rotationally symmetric end are outer-minimizing; for
    /// graphs the property is assumed, not checked.
    pub outer_minimizing: &'static str,
    pub status: FlowStatus,
    pub masses: Masses,
    pub diagnostics: Diagnostics,
    pub rows: Vec<SliceQuantities>,
    pub verdicts: Verdicts,
    pub warnings: Vec<String>,
    pub solver: SolverSummary,
    pub exit_code: i32,
    pub limit_target: f64,
    pub config: ConfigDocument,
    pub csv_name: std::path::PathBuf,
    pub json_name: std::path::PathBuf,
    pub elapsed: Duration,
}

/// Sup of the staticity diagnostics over log-spaced radii outside the horizon
/// (and inside the sampled range of a tabulated potential).
pub fn diagnostics(spec: &ManifoldSpec, f: &StaticPotential, samples: usize) -> Result<Diagnostics> {
    let mut radii = spec.diagnostic_radii(samples.max(2));
    if let Some(rh) = horizon_radius(spec) {
        let lo = 1.01 * rh;
        if lo >= spec.r_max {
            return Err(Error::Validation(format!("horizon r_h={rh} leaves no exterior below r_max")));
        }
        if radii[0] < lo {
            radii = crate::metric::log_spaced(lo, spec.r_max, samples.max(2));
        }
    }
    if let PotentialKind::Sampled(s) = &f.kind {
        radii.retain(|&r| s.contains(r));
    }
    if radii.is_empty() {
        return Err(Error::InsufficientData("no diagnostic radii inside the potential's range".into()));
    }
    let mut d = Diagnostics {
        samples: radii.len(),
        r_lo: radii[0],
        r_hi: radii[radii.len() - 1],
        max_static_residual: 0.0,
        max_harmonicity_residual: 0.0,
        max_abs_scalar_curvature: 0.0,
    };
    for &r in &radii {
        let (a, b) = static_residual(spec, f, r)?;
        d.max_static_residual = d.max_static_residual.max(a.abs()).max(b.abs());
        d.max_harmonicity_residual = d.max_harmonicity_residual.max(harmonicity_residual(spec, f, r)?.abs());
        d.max_abs_scalar_curvature = d.max_abs_scalar_curvature.max(scalar_curvature(spec, r)?.abs());
    }
    Ok(d)
}

fn staticity(d: &Diagnostics, a: &Analysis) -> StaticityVerdict {
    StaticityVerdict {
        pass: d.max_static_residual <= a.static_tol && d.max_harmonicity_residual <= a.static_tol,
        tolerance_key: "analysis.static_tol",
        static_tol: a.static_tol,
        max_static_residual: d.max_static_residual,
        max_harmonicity_residual: d.max_harmonicity_residual,
    }
}

fn masses(cfg: &ScenarioConfig, warnings: &mut Vec<String>) -> Result<Masses> {
    let spec = &cfg.manifold;
    let f = &cfg.potential;
    let flux = adm_mass_flux(spec, f, spec.r_max)?;
    let tail_fit = match adm_mass_fit(spec, f, &cfg.analysis.tail) {
        Ok(m) => Some(m),
        Err(e) => {
            warnings.push(format!("tail fit rejected: {e}"));
            None
        }
    };
    let adm_mass = spec.adm_mass();
    let tol = 1e-6 * adm_mass.abs().max(1e-3);
    if (flux - adm_mass).abs() > tol {
        warnings.push(format!("potential flux {flux} differs from the metric ADM mass {adm_mass}"));
    }
    Ok(Masses { adm_mass, flux_at_r_max: flux, tail_fit, horizon_radius: horizon_radius(spec) })
}

/// Diagnostics only, without a flow.
pub fn static_check(cfg: &ScenarioConfig) -> Result<StaticReport> {
    let mut warnings = Vec::new();
    let masses = masses(cfg, &mut warnings)?;
    let diagnostics = diagnostics(&cfg.manifold, &cfg.potential, cfg.analysis.diagnostic_samples)?;
    Ok(StaticReport {
        scenario: cfg.name.clone(),
        n: cfg.manifold.n,
        masses,
        staticity: staticity(&diagnostics, &cfg.analysis),
        diagnostics,
        warnings,
    })
}

fn run_flow(cfg: &ScenarioConfig) -> Result<FlowTrace> {
    match &cfg.surface {
        InitialSurface::Sphere(s) => flow_sphere(&cfg.manifold, s, cfg.solver.t_end, cfg.solver.dt_out),
        InitialSurface::Graph(g) => flow_graph(&cfg.manifold, g, &cfg.solver),
    }
}

pub fn run_scenario(cfg: &ScenarioConfig, opts: RunOptions) -> Result<RunReport> {
    let started = Instant::now();
    let spec = &cfg.manifold;
    let f = &cfg.potential;
    let a = &cfg.analysis;

    let mut warnings = Vec::new();
    let masses = masses(cfg, &mut warnings)?;
    let diagnostics = diagnostics(spec, f, a.diagnostic_samples)?;

    let mut trace = run_flow(cfg)?;
    let m = masses.adm_mass;
    attach_quantities(&mut trace, spec, f, m)?;
    if let FlowStatus::Halted { reason, t } = &trace.status {
        warnings.push(format!("flow halted at t={t}: {reason}"));
    }

    let mono = monotonicity_verdict(&trace, spec, f, m, a.eps_mono)?;
    let rows = trace.quantities.clone();
    let initial = rows[0].minkowski_deficit;
    let min_deficit = rows.iter().map(|q| q.minkowski_deficit).fold(f64::INFINITY, f64::min);
    let area_residual = area_law_residual(&trace)?;
    let target = limit_target(spec.n)?;
    let relative_error = (mono.extrapolated_limit - target).abs() / target;

    let verdicts = Verdicts {
        monotone: MonotoneVerdict {
            pass: mono.monotone,
            tolerance_key: "analysis.eps_mono",
            eps_mono: mono.eps_mono,
            worst_increase: mono.worst_increase,
            total_decrease: mono.total_decrease,
        },
        deficit: DeficitVerdict {
            pass: initial >= -a.eps_deficit,
            tolerance_key: "analysis.eps_deficit",
            eps_deficit: a.eps_deficit,
            initial,
            min_over_trace: min_deficit,
        },
        area_law: AreaLawVerdict {
            pass: area_residual < a.area_tol,
            tolerance_key: "analysis.area_tol",
            area_tol: a.area_tol,
            residual: area_residual,
        },
        limit: LimitVerdict {
            pass: relative_error <= a.limit_rel_tol,
            tolerance_key: "analysis.limit_rel_tol",
            limit_rel_tol: a.limit_rel_tol,
            target,
            final_q: rows[rows.len() - 1].q,
            limit_gap: mono.limit_gap,
            extrapolated: mono.extrapolated_limit,
            relative_error,
        },
        staticity: staticity(&diagnostics, a),
    };

    let exit_code = if !verdicts.monotone.pass {
        exit::MONOTONICITY
    } else if !verdicts.deficit.pass {
        exit::DEFICIT
    } else if !verdicts.all_pass() || (opts.strict && !warnings.is_empty()) {
        exit::OTHER_VERDICT
    } else {
        exit::PASS
    };

    let (surface_kind, outer_minimizing) = match cfg.surface {
        InitialSurface::Sphere(_) => ("sphere", "sphere"),
        InitialSurface::Graph(_) => ("graph", "assumed"),
    };

    Ok(RunReport {
        scenario: cfg.name.clone(),
        n: spec.n,
        surface_kind,
        outer_minimizing,
        status: trace.status.clone(),
        masses,
        diagnostics,
        rows,
        verdicts,
        warnings,
        solver: trace.stats.into(),
        exit_code,
        limit_target: target,
        config: cfg.document.clone(),
        csv_name: cfg.csv.clone(),
        json_name: cfg.json.clone(),
        elapsed: started.elapsed(),
    })
}
