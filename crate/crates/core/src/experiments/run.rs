use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Command, ExperimentConfig};
use crate::assembly::{assemble_singular_rhs, element_weights, AssembledForms};
use crate::correctors::{measure_decay, WeightedForms};
use crate::error::{Error, Result};
use crate::geometry::{Point2, SingularSet, WeightSpec};
use crate::linalg::{norm_inf, CgOptions};
use crate::mesh::MeshHierarchy;
use crate::multiscale::{
    convergence_study, run_multiscale, solve_reference, weighted_h1_seminorm_error, StudyConfig,
};
use crate::quadrature::{gauss_legendre_unit, WeightedQuadrature};
use crate::quasi_interp::{build_interpolation, measure_stability};

/// What a run wrote and what it reports on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub csv: String,
    pub messages: Vec<String>,
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Runs the experiment and writes its CSV to `cfg.output`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let summary = match cfg.command {
        Command::Solve => solve(cfg),
        Command::Convergence => convergence(cfg),
        Command::Decay => decay(cfg),
        Command::InterpCheck => interp_check(cfg),
        Command::QuadCheck => quad_check(cfg),
    }
    .map_err(|e| e.context(cfg.command.name()))?;
    write_atomic(&cfg.output, &summary.csv)?;
    Ok(summary)
}

fn finest_coarse(cfg: &ExperimentConfig) -> u32 {
    *cfg.coarse_levels.last().expect("validated non-empty")
}

fn solve(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let field = cfg.coefficient.build()?;
    let alpha = cfg.alphas[0];
    let hier = MeshHierarchy::build(finest_coarse(cfg), cfg.fine_level)?;
    let fine = hier.fine();
    let forms = AssembledForms::new(fine, &field)?;
    let rhs = assemble_singular_rhs(fine, &cfg.source);
    let reference = solve_reference(fine, &forms, &rhs, cfg.reference_tol)?;
    let run = run_multiscale(
        &hier,
        &field,
        &cfg.source,
        &forms,
        &rhs,
        alpha,
        cfg.k,
        &cfg.quad,
        cfg.corrector_tol,
        cfg.allow_endpoint,
    )?;
    let err = weighted_h1_seminorm_error(fine, &run.trial_forms.elements, &reference, &run.solution.fine);
    let mut csv = String::from("x,y,multiscale,reference\n");
    for (i, x) in fine.nodes().iter().enumerate() {
        writeln!(csv, "{},{},{:.16e},{:.16e}", x.x, x.y, run.solution.fine[i], reference[i]).expect("string write");
    }
    Ok(RunSummary {
        csv,
        messages: vec![format!(
            "alpha={alpha} H=2^-{} h=2^-{} error={err:.6e} pivot_ratio={:.3e}",
            hier.coarse().level(),
            cfg.fine_level,
            run.solution.pivot_ratio
        )],
    })
}

fn convergence(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let study = StudyConfig {
        field: cfg.coefficient.build()?,
        source: cfg.source.clone(),
        alphas: cfg.alphas.clone(),
        coarse_levels: cfg.coarse_levels.clone(),
        fine_level: cfg.fine_level,
        k: cfg.k,
        quad: cfg.quad.clone(),
        corrector_tol: cfg.corrector_tol,
        reference_tol: cfg.reference_tol,
        allow_endpoint: cfg.allow_endpoint,
    };
    let report = convergence_study(&study)?;
    let mut csv = String::from("alpha,H,error,rate,predicted_rate\n");
    let mut messages = Vec::new();
    for r in &report.rows {
        let rate = r.rate.map_or(String::new(), |x| format!("{x:.6}"));
        writeln!(csv, "{},{},{:.10e},{rate},{}", r.alpha, r.h, r.error, r.predicted_rate).expect("string write");
        messages.push(format!(
            "alpha={} H={} error={:.4e} rate={rate} coarse_p1_error={:.4e}",
            r.alpha, r.h, r.error, r.coarse_p1_error
        ));
    }
    for (alpha, fit) in &report.fitted {
        if let Some(f) = fit {
            messages.push(format!("alpha={alpha} fitted_rate={f:.4}"));
        }
    }
    Ok(RunSummary { csv, messages })
}

fn decay(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let field = cfg.coefficient.build()?;
    let hier = MeshHierarchy::build(finest_coarse(cfg), cfg.fine_level)?;
    let coarse = hier.coarse();
    let v = coarse
        .interior_nodes()
        .iter()
        .copied()
        .min_by(|a, b| {
            let (pa, pb) = (coarse.nodes()[*a], coarse.nodes()[*b]);
            pa.dist(cfg.node).total_cmp(&pb.dist(cfg.node))
        })
        .ok_or_else(|| Error::config("coarse mesh has no interior node"))?;
    let beta = cfg.betas[0];
    let w = weight(&cfg.source, beta, cfg.allow_endpoint)?;
    let forms = WeightedForms::new(&hier, &field, Some(&w), &cfg.quad)?;
    let table = measure_decay(&hier, &forms, v, &cfg.decay_k, &CgOptions::with_tol(cfg.corrector_tol))?;
    let mut csv = String::from("k,error,ratio\n");
    for r in &table.rows {
        let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.6}"));
        writeln!(csv, "{},{:.10e},{ratio}", r.k, r.error).expect("string write");
    }
    let node = coarse.nodes()[v];
    let theta = table.theta.map_or("n/a".to_string(), |t| format!("{t:.4}"));
    Ok(RunSummary {
        csv,
        messages: vec![format!("node=({}, {}) beta={beta} theta={theta}", node.x, node.y)],
    })
}

fn weight(source: &SingularSet<f64>, beta: f64, allow_endpoint: bool) -> Result<WeightSpec<f64>> {
    if allow_endpoint {
        WeightSpec::new_allow_endpoint(source.clone(), beta)
    } else {
        WeightSpec::new(source.clone(), beta)
    }
}

/// Worst residuals of the projection and coarse-reproduction identities over
/// seeded random vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpResiduals {
    pub projectivity: f64,
    pub reproduction: f64,
}

pub fn interpolation_residuals(
    hier: &MeshHierarchy<f64>,
    op: &crate::quasi_interp::InterpolationOperator<f64>,
    samples: usize,
    seed: u64,
) -> Result<InterpResiduals> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = InterpResiduals {
        projectivity: 0.0,
        reproduction: 0.0,
    };
    let rel = |a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        norm_inf(&d) / norm_inf(b).max(f64::MIN_POSITIVE)
    };
    let nc = hier.coarse().interior_nodes().len();
    for _ in 0..samples {
        let u: Vec<f64> = (0..hier.fine().num_nodes()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let once = op.apply(&u)?;
        let twice = op.apply(&hier.prolong_free(&once))?;
        out.projectivity = out.projectivity.max(rel(&twice, &once));
        let vh: Vec<f64> = (0..nc).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = op.apply(&hier.prolong_free(&vh))?;
        out.reproduction = out.reproduction.max(rel(&back, &vh));
    }
    Ok(out)
}

fn interp_check(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let one = crate::coefficients::CoefficientField::constant(1.0)?;
    let mut csv = String::from("beta,H,projectivity,reproduction,l2_ratio,h1_ratio,approx_ratio\n");
    let mut messages = Vec::new();
    for &beta in &cfg.betas {
        let w = weight(&cfg.source, beta, cfg.allow_endpoint)?;
        for &level in &cfg.coarse_levels {
            let hier = MeshHierarchy::build(level, cfg.fine_level)?;
            let op = build_interpolation(&hier, Some(&w), &cfg.quad)?;
            let res = interpolation_residuals(&hier, &op, cfg.samples, cfg.seed)?;
            let ew = element_weights(hier.fine(), &one, Some(&w), &cfg.quad)?;
            let st = measure_stability(&op, &hier, &ew, cfg.samples, cfg.seed)?;
            let h = hier.coarse().h();
            writeln!(
                csv,
                "{beta},{h},{:.3e},{:.3e},{:.6},{:.6},{:.6}",
                res.projectivity, res.reproduction, st.l2, st.h1, st.approximation
            )
            .expect("string write");
            messages.push(format!(
                "beta={beta} H={h} projectivity={:.2e} reproduction={:.2e}",
                res.projectivity, res.reproduction
            ));
        }
    }
    Ok(RunSummary { csv, messages })
}

/// `∫_T |x|^(2β)` over the triangle `(0,0), (1,0), (0,1)` by the polar form
/// `∫_0^{π/2} R(θ)^(2β+2) / (2β+2) dθ` with `R(θ) = 1 / (cos θ + sin θ)`.
pub fn reference_vertex_integral(beta: f64) -> f64 {
    let (x, w) = gauss_legendre_unit(20);
    let panels = 32;
    let width = std::f64::consts::FRAC_PI_2 / panels as f64;
    let p = 2.0 * beta + 2.0;
    let mut s = 0.0;
    for k in 0..panels {
        for (xi, wi) in x.iter().zip(&w) {
            let th = (k as f64 + xi) * width;
            s += wi * width * (th.cos() + th.sin()).powf(-p) / p;
        }
    }
    s
}

fn quad_check(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let tri = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    let lambda = SingularSet::point(tri[0], 1.0)?;
    let mut csv = String::from("beta,measured,oracle,rel_error\n");
    let mut messages = Vec::new();
    for &beta in &cfg.betas {
        let w = weight(&lambda, beta, cfg.allow_endpoint)?;
        let q = WeightedQuadrature::new(w, cfg.quad.clone())?;
        let measured = q.integrate(&tri, |_| 1.0);
        let oracle = reference_vertex_integral(beta);
        let rel = (measured - oracle).abs() / oracle.abs();
        writeln!(csv, "{beta},{measured:.16e},{oracle:.16e},{rel:.3e}").expect("string write");
        messages.push(format!("beta={beta} rel_error={rel:.3e}"));
    }
    Ok(RunSummary { csv, messages })
}
