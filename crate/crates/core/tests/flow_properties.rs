use imcf_core::flow::{area_law_residual, flow_graph, flow_sphere, FlowStatus, FlowSurface, FlowTrace, SolverParams};
use imcf_core::geometry::{AxisymmetricGraph, CoordinateSphere};
use imcf_core::metric::{ManifoldSpec, StaticPotential};
use imcf_core::oracle::lapse_weight_q;
use imcf_core::quantities::{attach_quantities, limit_target, monotonicity_verdict};

fn p2(x: f64) -> f64 {
    0.5 * (3.0 * x * x - 1.0)
}

fn graph_rho(trace: &FlowTrace, k: usize) -> &[f64] {
    match &trace.slices[k].surface {
        FlowSurface::Graph(g) => &g.rho,
        FlowSurface::Sphere(_) => panic!("expected a graph"),
    }
}

fn perturbed(intervals: usize, t_end: f64) -> FlowTrace {
    let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
    let g = AxisymmetricGraph::from_fn(intervals, |t| 4.0 + 0.3 * p2(t.cos())).unwrap();
    let params = SolverParams { n_grid: intervals, t_end, ..Default::default() };
    flow_graph(&spec, &g, &params).unwrap()
}

#[test]
fn constant_graph_follows_exact_sphere_law() {
    let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
    let g = AxisymmetricGraph::constant(100, 4.0).unwrap();
    let params = SolverParams { n_grid: 100, t_end: 2.0, dt_out: 0.5, ..Default::default() };
    let trace = flow_graph(&spec, &g, &params).unwrap();
    assert_eq!(trace.status, FlowStatus::Completed);
    for (k, slice) in trace.slices.iter().enumerate() {
        let exact = 4.0 * (slice.t / 2.0).exp();
        for r in graph_rho(&trace, k) {
            assert!((r - exact).abs() < 1e-6 * exact, "t={} r={r} exact={exact}", slice.t);
        }
    }
}

#[test]
fn area_law_holds_and_converges() {
    let coarse = area_law_residual(&perturbed(100, 1.0)).unwrap();
    let fine = area_law_residual(&perturbed(200, 1.0)).unwrap();
    assert!(fine < 1e-4);
    let order = (coarse / fine).log2();
    assert!(order >= 1.0, "area law residual order {order} ({coarse:e} -> {fine:e})");
}

#[test]
fn sphere_area_law_is_exact() {
    for n in 3..=7 {
        let spec = ManifoldSpec::schwarzschild(n, 0.5).unwrap();
        let trace = flow_sphere(&spec, &CoordinateSphere { radius: 2.0 }, 3.0, 0.1).unwrap();
        assert!(area_law_residual(&trace).unwrap() < 1e-13, "n={n}");
    }
}

#[test]
fn output_times_commute_with_flow() {
    // Slices at shared output times agree whether or not the flow stopped in between.
    let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
    let g = AxisymmetricGraph::from_fn(100, |t| 4.0 + 0.3 * p2(t.cos())).unwrap();
    let dense = SolverParams { n_grid: 100, t_end: 1.0, dt_out: 0.1, ..Default::default() };
    let sparse = SolverParams { dt_out: 0.5, ..dense };
    let a = flow_graph(&spec, &g, &dense).unwrap();
    let b = flow_graph(&spec, &g, &sparse).unwrap();
    for (ka, kb) in [(5, 1), (10, 2)] {
        assert!((a.slices[ka].t - b.slices[kb].t).abs() < 1e-12);
        let worst = graph_rho(&a, ka)
            .iter()
            .zip(graph_rho(&b, kb))
            .map(|(x, y)| ((x - y) / y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 10.0 * dense.rel_tol, "t={}: {worst:e}", a.slices[ka].t);
    }
}

#[test]
fn flat_quadrupole_decays_at_linear_rate() {
    // Linearised IMCF about a round sphere damps the relative P2 amplitude like e^{−3t/2}.
    let flat = ManifoldSpec::flat(3).unwrap();
    let eps = 0.01;
    let g = AxisymmetricGraph::from_fn(100, |t| 1.0 + eps * p2(t.cos())).unwrap();
    let params = SolverParams { n_grid: 100, t_end: 2.0, dt_out: 1.0, ..Default::default() };
    let trace = flow_graph(&flat, &g, &params).unwrap();
    let amplitude = |k: usize| {
        let rho = graph_rho(&trace, k);
        let (pole, equator) = (rho[0], rho[rho.len() / 2]);
        (pole - equator) / (pole + 2.0 * equator)
    };
    let rate = (amplitude(0) / amplitude(2)).ln() / 2.0;
    assert!((rate - 1.5).abs() < 0.03, "decay rate {rate}");
}

#[test]
fn static_weight_is_monotone_and_tends_to_the_limit() {
    let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
    let mut trace = perturbed(200, 3.0);
    let f = StaticPotential::lapse();
    attach_quantities(&mut trace, &spec, &f, 1.0).unwrap();
    let verdict = monotonicity_verdict(&trace, &spec, &f, 1.0, 1e-6).unwrap();
    assert!(verdict.monotone);
    assert!(verdict.total_decrease > 1e-4);
    let target = limit_target(3).unwrap();
    assert!((verdict.extrapolated_limit - target).abs() < 0.01 * target);
    for q in &trace.quantities {
        assert!(q.q >= target - 1e-6);
        assert!(q.hawking_mass.unwrap() <= 1.0 + 1e-6);
    }
    // The Hawking mass is nondecreasing along the flow as well.
    for w in trace.quantities.windows(2) {
        assert!(w[1].hawking_mass.unwrap() >= w[0].hawking_mass.unwrap() - 1e-8);
    }
}

#[test]
fn lapse_weight_breaks_monotonicity_on_spheres() {
    let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
    let f = StaticPotential::lapse_power(1.0);
    let mut trace = flow_sphere(&spec, &CoordinateSphere { radius: 4.0 }, 3.0, 0.1).unwrap();
    attach_quantities(&mut trace, &spec, &f, spec.adm_mass()).unwrap();
    for (slice, q) in trace.slices.iter().zip(&trace.quantities) {
        let r = 4.0 * (slice.t / 2.0).exp();
        assert!((q.q - lapse_weight_q(1.0, r)).abs() < 1e-12, "t={}", slice.t);
    }
    let verdict = monotonicity_verdict(&trace, &spec, &f, 1.0, 1e-6).unwrap();
    assert!(!verdict.monotone);
    assert!(verdict.worst_increase > 1e-2);
}

#[test]
fn lapse_weight_breaks_monotonicity_on_graphs() {
    let spec = ManifoldSpec::schwarzschild(3, 1.0).unwrap();
    let f = StaticPotential::lapse_power(1.0);
    let mut trace = perturbed(200, 3.0);
    attach_quantities(&mut trace, &spec, &f, 1.0).unwrap();
    let verdict = monotonicity_verdict(&trace, &spec, &f, 1.0, 1e-6).unwrap();
    assert!(!verdict.monotone);
    assert!(verdict.worst_increase > 1e-2);
}

#[test]
fn mean_convexity_is_preserved() {
    let trace = perturbed(100, 2.0);
    assert_eq!(trace.status, FlowStatus::Completed);
    for s in &trace.slices {
        assert!(s.geometry.mean_convex);
    }
}
