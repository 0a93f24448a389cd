use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::SolverParams;
use crate::geometry::{AxisymmetricGraph, CoordinateSphere};
use crate::metric::{horizon_radius, ManifoldSpec, RadialInterval, StaticPotential};
use crate::scenario::expr::Expr;
use crate::spline::read_two_columns;

/// Tolerance on the one-sided pole slopes of an initial graph, relative to `max ρ`.
const POLE_TOL: f64 = 1e-4;

/// Config document as written; echoed verbatim into the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub manifold: ManifoldSection,
    #[serde(default)]
    pub potential: PotentialSection,
    pub surface: SurfaceSection,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub outputs: OutputsSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Schwarzschild,
    Flat,
    ReissnerNordstrom,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSection {
    pub family: Family,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Two-column `(r, V)` file for `family = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialChoice {
    /// `f = √V`.
    #[default]
    Static,
    /// `f = V^exponent`, a custom weight.
    LapsePower,
    Unit,
    /// Two-column `(r, f)` file, normalized to 1 at infinity.
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    #[serde(default)]
    pub kind: PotentialChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    Sphere,
    Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub kind: SurfaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Expression in `theta`, e.g. `"4 + 0.3*P2(cos(theta))"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0_file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    /// Defaults to `1e-6 (200/N)²` for graphs and `1e-6` for spheres.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_mono: Option<f64>,
    pub eps_deficit: f64,
    pub area_tol: f64,
    pub static_tol: f64,
    pub limit_rel_tol: f64,
    pub tail: [f64; 2],
    pub tail_samples: usize,
    pub diagnostic_samples: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            eps_mono: None,
            eps_deficit: 1e-8,
            area_tol: 1e-4,
            static_tol: 1e-8,
            limit_rel_tol: 0.01,
            tail: [100.0, 1000.0],
            tail_samples: 64,
            diagnostic_samples: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSurface {
    Sphere(CoordinateSphere),
    Graph(AxisymmetricGraph),
}

/// Resolved analysis tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analysis {
    pub eps_mono: f64,
    pub eps_deficit: f64,
    pub area_tol: f64,
    pub static_tol: f64,
    pub limit_rel_tol: f64,
    pub tail: RadialInterval,
    pub diagnostic_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub document: ConfigDocument,
    pub manifold: ManifoldSpec,
    pub potential: StaticPotential,
    pub surface: InitialSurface,
    pub solver: SolverParams,
    pub analysis: Analysis,
    /// Output file names, relative to the run's output directory.
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn resolve(base: &Path, file: &str) -> Result<PathBuf> {
    let path = base.join(file);
    if !path.is_file() {
        return Err(invalid(format!("referenced file `{}` does not exist", path.display())));
    }
    Ok(path)
}

/// Parses the document only; no validation beyond the schema.
pub fn parse_document(text: &str) -> Result<ConfigDocument> {
    let de = toml::Deserializer::new(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let msg = e.into_inner().message().trim().to_string();
        Error::Config { path, msg }
    })
}

/// Parses and validates a scenario. Relative file references resolve against
/// `base_dir`; `default_name` names the scenario when the document does not.
pub fn parse_config(text: &str, base_dir: &Path, default_name: &str) -> Result<ScenarioConfig> {
    let document = parse_document(text)?;
    validate(document, base_dir, default_name)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_config(&text, base, stem)
}

fn build_manifold(sec: &ManifoldSection, base: &Path) -> Result<ManifoldSpec> {
    let need = |v: Option<f64>, key: &str| v.ok_or_else(|| invalid(format!("manifold.{key} is required for this family")));
    let forbid = |present: bool, key: &str| {
        if present {
            Err(invalid(format!("manifold.{key} does not apply to family {:?}", sec.family)))
        } else {
            Ok(())
        }
    };
    let mut spec = match sec.family {
        Family::Schwarzschild => {
            forbid(sec.q.is_some(), "q")?;
            forbid(sec.profile_file.is_some(), "profile_file")?;
            ManifoldSpec::schwarzschild(sec.n, need(sec.m, "m")?)?
        }
        Family::Flat => {
            forbid(sec.m.is_some_and(|m| m != 0.0), "m")?;
            forbid(sec.q.is_some(), "q")?;
            forbid(sec.profile_file.is_some(), "profile_file")?;
            ManifoldSpec::flat(sec.n)?
        }
        Family::ReissnerNordstrom => {
            forbid(sec.profile_file.is_some(), "profile_file")?;
            ManifoldSpec::charged(sec.n, need(sec.m, "m")?, need(sec.q, "q")?)?
        }
        Family::Custom => {
            forbid(sec.m.is_some(), "m")?;
            forbid(sec.q.is_some(), "q")?;
            let file = sec
                .profile_file
                .as_deref()
                .ok_or_else(|| invalid("manifold.profile_file is required for family custom"))?;
            let (r, v) = read_two_columns(&resolve(base, file)?)?;
            ManifoldSpec::tabulated(sec.n, r, v)?
        }
    };
    if let Some(r_max) = sec.r_max {
        spec = spec.with_r_max(r_max).map_err(|e| invalid(format!("manifold.r_max: {e}")))?;
    }
    if let Some(r_min) = sec.r_min {
        spec = spec.with_r_min(r_min).map_err(|e| invalid(format!("manifold.r_min: {e}")))?;
    }
    Ok(spec)
}

fn build_potential(sec: &PotentialSection, spec: &ManifoldSpec, tail: &RadialInterval, base: &Path) -> Result<StaticPotential> {
    if sec.exponent.is_some() && sec.kind != PotentialChoice::LapsePower {
        return Err(invalid("potential.exponent only applies to kind = \"lapse-power\""));
    }
    if sec.file.is_some() && sec.kind != PotentialChoice::Tabulated {
        return Err(invalid("potential.file only applies to kind = \"tabulated\""));
    }
    match sec.kind {
        PotentialChoice::Static => Ok(StaticPotential::lapse()),
        PotentialChoice::Unit => Ok(StaticPotential::unit()),
        PotentialChoice::LapsePower => {
            let e = sec.exponent.ok_or_else(|| invalid("potential.exponent is required for kind = \"lapse-power\""))?;
            Ok(StaticPotential::lapse_power(e))
        }
        PotentialChoice::Tabulated => {
            let file = sec.file.as_deref().ok_or_else(|| invalid("potential.file is required for kind = \"tabulated\""))?;
            let (r, f) = read_two_columns(&resolve(base, file)?)?;
            StaticPotential::sampled(r, f)?.normalize(spec, tail)
        }
    }
}

fn build_surface(sec: &SurfaceSection, spec: &ManifoldSpec, solver: &SolverParams, base: &Path) -> Result<InitialSurface> {
    let horizon = horizon_radius(spec);
    let inside = |r: f64| match horizon {
        Some(rh) => r <= rh,
        None => r <= spec.r_min,
    };
    let inside_msg = || match horizon {
        Some(rh) => format!("surface inside horizon (r_h={rh})"),
        None => format!("surface inside inner cutoff (r_min={})", spec.r_min),
    };
    match sec.kind {
        SurfaceKind::Sphere => {
            if sec.rho0.is_some() || sec.rho0_file.is_some() {
                return Err(invalid("surface.rho0 / rho0_file apply to kind = \"graph\" only"));
            }
            let r0 = sec.r0.ok_or_else(|| invalid("surface.r0 is required for kind = \"sphere\""))?;
            if inside(r0) {
                return Err(invalid(inside_msg()));
            }
            Ok(InitialSurface::Sphere(CoordinateSphere { radius: r0 }))
        }
        SurfaceKind::Graph => {
            if spec.n != 3 {
                return Err(invalid(format!("graph surfaces require n = 3, got n = {}", spec.n)));
            }
            if sec.r0.is_some() {
                return Err(invalid("surface.r0 applies to kind = \"sphere\" only"));
            }
            let graph = match (&sec.rho0, &sec.rho0_file) {
                (Some(src), None) => {
                    let e = Expr::parse(src)?;
                    AxisymmetricGraph::from_fn(solver.n_grid, |t| e.eval(t))?
                }
                (None, Some(file)) => AxisymmetricGraph::load(&resolve(base, file)?, solver.n_grid)?,
                _ => return Err(invalid("exactly one of surface.rho0 and surface.rho0_file is required")),
            };
            graph.check_pole_regularity(POLE_TOL)?;
            if inside(graph.min_radius()) {
                return Err(invalid(inside_msg()));
            }
            Ok(InitialSurface::Graph(graph))
        }
    }
}

fn validate(document: ConfigDocument, base: &Path, default_name: &str) -> Result<ScenarioConfig> {
    document.solver.validate()?;
    let a = &document.analysis;
    let tail = RadialInterval { lo: a.tail[0], hi: a.tail[1], samples: a.tail_samples };
    for (key, v) in [
        ("eps_deficit", a.eps_deficit),
        ("area_tol", a.area_tol),
        ("static_tol", a.static_tol),
        ("limit_rel_tol", a.limit_rel_tol),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(invalid(format!("analysis.{key} must be a non-negative number, got {v}")));
        }
    }

    let manifold = build_manifold(&document.manifold, base)?;
    let potential = build_potential(&document.potential, &manifold, &tail, base)?;
    let surface = build_surface(&document.surface, &manifold, &document.solver, base)?;

    let eps_mono = match (a.eps_mono, &surface) {
        (Some(e), _) => e,
        (None, InitialSurface::Graph(_)) => 1e-6 * (200.0 / document.solver.n_grid as f64).powi(2),
        (None, InitialSurface::Sphere(_)) => 1e-6,
    };
    let analysis = Analysis {
        eps_mono,
        eps_deficit: a.eps_deficit,
        area_tol: a.area_tol,
        static_tol: a.static_tol,
        limit_rel_tol: a.limit_rel_tol,
        tail,
        diagnostic_samples: a.diagnostic_samples.max(2),
    };

    let name = document.name.clone().unwrap_or_else(|| default_name.to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(invalid(format!("scenario name `{name}` is not a valid file stem")));
    }
    let csv = PathBuf::from(document.outputs.csv.clone().unwrap_or_else(|| format!("{name}.csv")));
    let json = PathBuf::from(document.outputs.json.clone().unwrap_or_else(|| format!("{name}.json")));

    Ok(ScenarioConfig {
        name,
        solver: document.solver,
        document,
        manifold,
        potential,
        surface,
        analysis,
        csv,
        json,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[manifold]
family = "schwarzschild"
n = 3
m = 1.0

[surface]
kind = "sphere"
r0 = 4.0
"#;

    fn parse(text: &str) -> Result<ScenarioConfig> {
        parse_config(text, Path::new("."), "test")
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse(MINIMAL).unwrap();
        assert_eq!(cfg.solver.n_grid, 200);
        assert_eq!(cfg.solver.rel_tol, 1e-7);
        assert_eq!(cfg.solver.dt_out, 0.1);
        assert_eq!(cfg.analysis.eps_mono, 1e-6);
        assert_eq!(cfg.csv, PathBuf::from("test.csv"));
        assert_eq!(cfg.potential, StaticPotential::lapse());
    }

    #[test]
    fn inside_horizon_rejected() {
        let text = MINIMAL.replace("r0 = 4.0", "r0 = 1.5");
        match parse(&text) {
            Err(Error::Validation(msg)) => assert_eq!(msg, "surface inside horizon (r_h=2)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected_by_name() {
        let text = MINIMAL.replace("m = 1.0", "m = 1.0\ncolour = \"red\"");
        match parse(&text) {
            Err(Error::Config { path, msg }) => {
                assert!(msg.contains("colour"), "{msg}");
                assert_eq!(path, "manifold.colour");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn type_mismatch_reports_key_path() {
        let text = MINIMAL.replace("n = 3", "n = \"three\"");
        match parse(&text) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "manifold.n"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_required_key() {
        let text = MINIMAL.replace("m = 1.0", "");
        assert!(matches!(parse(&text), Err(Error::Validation(msg)) if msg.contains("manifold.m")));
        let text = MINIMAL.replace("[surface]\nkind = \"sphere\"\nr0 = 4.0", "");
        assert!(matches!(parse(&text), Err(Error::Config { .. })));
    }

    #[test]
    fn graph_expression_and_refined_eps() {
        let text = MINIMAL.replace(
            "kind = \"sphere\"\nr0 = 4.0",
            "kind = \"graph\"\nrho0 = \"4 + 0.3*P2(cos(theta))\"\n\n[solver]\nn_grid = 400",
        );
        let cfg = parse(&text).unwrap();
        match &cfg.surface {
            InitialSurface::Graph(g) => assert_eq!(g.rho.len(), 401),
            _ => panic!(),
        }
        assert!((cfg.analysis.eps_mono - 2.5e-7).abs() < 1e-20);
    }

    #[test]
    fn graphs_need_three_dimensions() {
        let text = MINIMAL
            .replace("n = 3", "n = 4")
            .replace("kind = \"sphere\"\nr0 = 4.0", "kind = \"graph\"\nrho0 = \"4\"");
        assert!(matches!(parse(&text), Err(Error::Validation(msg)) if msg.contains("n = 3")));
    }

    #[test]
    fn irregular_graph_rejected() {
        let text = MINIMAL.replace("kind = \"sphere\"\nr0 = 4.0", "kind = \"graph\"\nrho0 = \"4 + 0.3*sin(theta)\"");
        assert!(matches!(parse(&text), Err(Error::Domain(msg)) if msg.contains("poles")));
    }

    #[test]
    fn missing_file_reported() {
        let text = r#"
[manifold]
family = "custom"
n = 3
profile_file = "does-not-exist.dat"
[surface]
kind = "sphere"
r0 = 4.0
"#;
        assert!(matches!(parse(text), Err(Error::Validation(msg)) if msg.contains("does-not-exist")));
    }

    #[test]
    fn exponent_requires_lapse_power() {
        let text = format!("{MINIMAL}\n[potential]\nkind = \"static\"\nexponent = 1.0\n");
        assert!(parse(&text).is_err());
        let text = format!("{MINIMAL}\n[potential]\nkind = \"lapse-power\"\nexponent = 1.0\n");
        assert_eq!(parse(&text).unwrap().potential, StaticPotential::lapse_power(1.0));
    }
}
