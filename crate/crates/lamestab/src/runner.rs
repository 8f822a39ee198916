//! Turns a config into experiments, runs them on a worker pool and gathers
//! the results in experiment-id order.
//!
//! Randomness: the three-sphere centers come from ChaCha8 seeded with
//! `seed + CENTER_STREAM`; reconstruction noise for level `i`, replicate
//! `k` comes from ChaCha8 seeded with `seed + 1000 i + k`.

use std::sync::Arc;

use anyhow::{anyhow, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use lamestab_core::elasticity::{assemble, solve_dirichlet, DisplacementField};
use lamestab_core::estimates::{
    calibrate_doubling, calibrate_three_sphere, holder_stability_experiment,
    integral_estimate_check, interpolation_family_check, lps_check, strain_lower_bound_check,
    three_sphere_check, DoublingMode, EstimateCheck, HolderOptions, Verdict, MIN_R_SQUARED,
};
use lamestab_core::fields::{
    make_phantom_with_degree, validate_lame, BoundaryGenerator, BoundaryTrace, FourierMode,
    LamePair, ScalarField,
};
use lamestab_core::geometry::{build_mesh, interior_mask, TriMesh};
use lamestab_core::norms::{
    boundary_norm_table, boundary_sobolev_norm, linf_on_mask, BoundaryNormTable,
};
use lamestab_core::reconstruct::noise_sweep;
use lamestab_core::Point;

use crate::config::{CheckName, ExperimentConfig};
use crate::report::{
    BoundarySummary, CheckRow, ExperimentSummary, MeshSummary, Report, Summary, Table,
    SCHEMA_VERSION,
};

/// Offset of the three-sphere center stream from the config seed.
pub const CENTER_STREAM: u64 = 0x7472_6573;

/// Interpolation slope window: the guaranteed exponent `1/2` less slack,
/// up to `1`.
pub const INTERPOLATION_SLOPE_RANGE: (f64, f64) = (0.45, 1.0);

/// Problem data shared by every experiment.
#[derive(Debug, Clone)]
pub struct Setup {
    pub mesh: Arc<TriMesh>,
    pub pair: LamePair,
    pub shape: ScalarField,
    pub g: BoundaryTrace,
    pub boundary: BoundaryNormTable,
}

pub fn realize_pair(
    cfg: &ExperimentConfig,
    mesh: &Arc<TriMesh>,
    mu_degree: u8,
) -> Result<LamePair> {
    let deg = cfg.lame.degree;
    let lambda = make_phantom_with_degree(mesh.clone(), &cfg.lame.lambda.spec(), deg)?.field;
    let mu = make_phantom_with_degree(mesh.clone(), &cfg.lame.mu.spec(), mu_degree)?.field;
    let pair = LamePair::new(
        lambda,
        mu,
        cfg.lame.alpha0,
        cfg.lame.beta0,
        cfg.lame.m_bound,
    )?;
    let report = validate_lame(&pair);
    if !report.pass() {
        let failed: Vec<String> = report.failures().map(|c| c.name.to_string()).collect();
        return Err(anyhow!(
            "coefficients leave the admissible budget: {}",
            failed.join(", ")
        ));
    }
    Ok(pair)
}

/// Meshes the domain and realizes the coefficients and data; no solves.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Setup> {
    let mesh = Arc::new(build_mesh(cfg.domain.spec(), cfg.mesh_h).context("meshing the domain")?);
    let pair = realize_pair(cfg, &mesh, cfg.lame.degree)?;
    let shape =
        make_phantom_with_degree(mesh.clone(), &cfg.lame.shape.spec(), cfg.lame.degree)?.field;
    let g = cfg.boundary_g.generator().trace(mesh.clone())?;
    let boundary = boundary_norm_table(&g).context("boundary norms of g")?;
    Ok(Setup {
        mesh,
        pair,
        shape,
        g,
        boundary,
    })
}

/// What one experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub id: String,
    pub checks: Vec<EstimateCheck>,
    pub details: serde_json::Value,
    pub tables: Vec<Table>,
}

impl ExperimentOutput {
    fn new(id: &str) -> Self {
        ExperimentOutput {
            id: id.into(),
            checks: Vec::new(),
            details: json!({}),
            tables: Vec::new(),
        }
    }

    fn push(&mut self, c: EstimateCheck) {
        self.checks.push(c.with_id(&self.id));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    Family,
    ThreeSphere,
    Doubling,
    Lps,
    StrainLowerBound,
    Reconstruction,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::Family => "family",
            Experiment::ThreeSphere => "three_sphere",
            Experiment::Doubling => "doubling",
            Experiment::Lps => "lps",
            Experiment::StrainLowerBound => "strain_lower_bound",
            Experiment::Reconstruction => "reconstruction",
        }
    }

    /// Needs the base forward solution.
    pub fn uses_base_solution(self) -> bool {
        matches!(
            self,
            Experiment::ThreeSphere
                | Experiment::Doubling
                | Experiment::Lps
                | Experiment::StrainLowerBound
        )
    }
}

/// Experiments requested by `cfg`, sorted by id.
pub fn plan(cfg: &ExperimentConfig) -> Vec<Experiment> {
    let mut out = Vec::new();
    if cfg.wants_family() {
        out.push(Experiment::Family);
    }
    for (check, exp) in [
        (CheckName::ThreeSphere, Experiment::ThreeSphere),
        (CheckName::Doubling, Experiment::Doubling),
        (CheckName::Lps, Experiment::Lps),
        (CheckName::StrainLowerBound, Experiment::StrainLowerBound),
        (CheckName::Reconstruction, Experiment::Reconstruction),
    ] {
        if cfg.wants(check) {
            out.push(exp);
        }
    }
    out.sort_by_key(|e| e.id());
    out
}

/// Forward solves per experiment on top of the shared base solution,
/// counting `u` and `v` once per scale for the perturbation family.
pub fn solve_counts(cfg: &ExperimentConfig) -> Vec<(Experiment, usize)> {
    plan(cfg)
        .into_iter()
        .map(|e| {
            let n = match e {
                Experiment::Family => 2 * cfg.scales.len(),
                Experiment::Lps => cfg.lps.frequencies.len(),
                Experiment::Reconstruction => 1,
                _ => 0,
            };
            (e, n)
        })
        .collect()
}

fn solve(pair: &LamePair, g: &BoundaryTrace) -> Result<DisplacementField> {
    Ok(solve_dirichlet(
        &assemble(pair.mu.mesh().clone(), pair)?,
        g,
        None,
    )?)
}

fn peak_of_shape(setup: &Setup, d: f64) -> Result<Point> {
    let mask = interior_mask(&setup.mesh, d)?;
    Ok(linf_on_mask(&setup.shape, &mask)?.1)
}

fn run_family(cfg: &ExperimentConfig, setup: &Setup) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(Experiment::Family.id());
    let options = HolderOptions {
        radius_fractions: cfg.strain_lower_bound.radius_fractions.clone(),
    };
    let ex = holder_stability_experiment(
        &setup.pair,
        &setup.shape,
        &cfg.scales,
        cfg.d,
        &setup.g,
        &options,
    )?;
    let mut details = serde_json::Map::new();

    let mut fam = Table::new(
        "family",
        &[
            "scale",
            "eta",
            "l2_mismatch",
            "grad_mismatch",
            "lemma_lhs",
            "lemma_rhs",
            "linf_gap",
        ],
    );
    for s in &ex.family.samples {
        fam.push(vec![
            s.scale,
            s.eta,
            s.l2_mismatch,
            s.grad_mismatch,
            s.lemma_lhs,
            s.lemma_rhs,
            s.linf_gap,
        ]);
    }
    out.tables.push(fam);

    if cfg.wants(CheckName::IntegralEstimate) {
        let ie = integral_estimate_check(&ex.family)?;
        for c in ie.checks {
            out.push(c);
        }
        details.insert(
            "integral_estimate".into(),
            json!({ "constant": ie.constant, "spread": ie.spread, "held_out_scale": ie.held_out_scale }),
        );
    }
    if cfg.wants(CheckName::Interpolation) {
        let ip = interpolation_family_check(&ex.family)?;
        for c in ip.checks {
            out.push(c);
        }
        let slope = ip.slope.slope;
        let mut c = EstimateCheck::new(
            "interpolation_slope",
            0.0,
            slope,
            INTERPOLATION_SLOPE_RANGE.1,
        );
        c.fitted_constant = 1.0;
        c.exponent = Some(slope);
        c.verdict = Verdict::from_bool(
            (INTERPOLATION_SLOPE_RANGE.0..=INTERPOLATION_SLOPE_RANGE.1).contains(&slope),
        );
        out.push(c);
        details.insert(
            "interpolation".into(),
            json!({ "constant": ip.constant, "slope": slope, "r_squared": ip.slope.r_squared }),
        );
    }
    if cfg.wants(CheckName::HolderStability) {
        for c in ex.checks() {
            out.push(c);
        }
        let mut c = EstimateCheck::new("holder_rate", 0.0, ex.fitted_delta, ex.observed.exponent);
        c.fitted_constant = 1.0;
        c.exponent = Some(ex.fitted_delta);
        c.verdict = Verdict::from_bool(ex.pass() && ex.observed.r_squared >= MIN_R_SQUARED);
        out.push(c);
        let mut t = Table::new(
            "stability",
            &[
                "scale",
                "eta",
                "l2_mismatch",
                "epsilon_sq",
                "linf_gap",
                "lambda_bar",
                "small_branch",
                "bound",
                "pass",
            ],
        );
        for r in &ex.reports {
            t.push(vec![
                r.scale,
                r.eta,
                r.l2_mismatch,
                r.epsilon_sq,
                r.linf_gap,
                r.lambda_bar,
                f64::from(u8::from(r.small_branch)),
                r.bound,
                f64::from(u8::from(r.pass)),
            ]);
        }
        out.tables.push(t);
        details.insert(
            "holder".into(),
            json!({
                "fitted_delta": ex.fitted_delta,
                "n1": ex.n1,
                "n2": ex.n2,
                "c_lemma": ex.c_lemma,
                "x0": ex.x0,
                "observed_exponent": ex.observed.exponent,
                "observed_r_squared": ex.observed.r_squared,
                "strain_bound_r_squared": ex.strain_bound.r_squared,
                "small_branch": ex.reports.iter().map(|r| r.small_branch).collect::<Vec<_>>(),
            }),
        );
    }
    out.details = serde_json::Value::Object(details);
    Ok(out)
}

/// Affine fields `x ↦ A x` spanning the symmetric matrices.
fn constant_strain_fields(mesh: &Arc<TriMesh>) -> Vec<DisplacementField> {
    [
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, 1.0], [1.0, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ]
    .into_iter()
    .map(|a: [[f64; 2]; 2]| {
        DisplacementField::from_fn(mesh.clone(), move |p| {
            [
                a[0][0] * p[0] + a[0][1] * p[1],
                a[1][0] * p[0] + a[1][1] * p[1],
            ]
        })
    })
    .collect()
}

/// `n` centers with `B_{2 r₃}(x) ⊂ Ω`, uniform in the admissible region.
pub fn random_centers(mesh: &TriMesh, n: usize, reach: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(CENTER_STREAM));
    let ext = mesh.domain().max_extent();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n && tries < 10_000 * n.max(1) {
        tries += 1;
        let p = [rng.random_range(-ext..ext), rng.random_range(-ext..ext)];
        if mesh.domain().distance_to_boundary(p) >= reach {
            out.push(p);
        }
    }
    out
}

fn run_three_sphere(
    cfg: &ExperimentConfig,
    setup: &Setup,
    u: &DisplacementField,
) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(Experiment::ThreeSphere.id());
    let tc = &cfg.three_sphere;
    let fields = constant_strain_fields(&setup.mesh);
    let refs: Vec<(&DisplacementField, Point)> = fields.iter().map(|f| (f, [0.0, 0.0])).collect();
    let c = calibrate_three_sphere(&refs, tc.radii)?;
    let centers = random_centers(&setup.mesh, tc.centers, 2.0 * tc.radii[2], cfg.seed);
    if centers.len() < tc.centers {
        return Err(anyhow!(
            "only {} of {} centers fit with B_{{2 r3}} inside the domain",
            centers.len(),
            tc.centers
        ));
    }
    let outcomes: Vec<_> = centers
        .par_iter()
        .map(|&x| three_sphere_check(u, x, tc.radii, c, tc.relax, (tc.window[0], tc.window[1])))
        .collect::<lamestab_core::Result<_>>()?;
    let mut t = Table::new(
        "three_sphere",
        &[
            "center",
            "x",
            "y",
            "e1",
            "e2",
            "e3",
            "delta_calibrated",
            "delta_relaxed",
        ],
    );
    for (i, (o, x)) in outcomes.into_iter().zip(&centers).enumerate() {
        t.push(vec![
            i as f64,
            x[0],
            x[1],
            o.energies[0],
            o.energies[1],
            o.energies[2],
            o.delta_calibrated,
            o.delta_relaxed,
        ]);
        out.push(EstimateCheck {
            param: i as f64,
            ..o.check
        });
    }
    out.tables.push(t);
    out.details = json!({
        "calibrated_constant": c,
        "relax": tc.relax,
        "delta_star": (tc.radii[2] / tc.radii[1]).ln() / (tc.radii[2] / tc.radii[0]).ln(),
    });
    Ok(out)
}

fn run_doubling(cfg: &ExperimentConfig, u: &DisplacementField) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(Experiment::Doubling.id());
    let dc = &cfg.doubling;
    let mut details = serde_json::Map::new();
    for (mode, key) in [
        (DoublingMode::Displacement, "displacement"),
        (DoublingMode::Strain, "strain"),
    ] {
        let (bound, reps) = calibrate_doubling(u, mode, dc.center, &dc.radii, cfg.d, dc.margin)?;
        let ratios: Vec<f64> = reps.iter().map(|r| r.check.ratio()).collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
            (lo.min(r), hi.max(r))
        });
        details.insert(
            key.into(),
            json!({
                "bound": bound,
                "ratios": ratios,
                "spread": hi / lo,
                "caccioppoli": reps.iter().map(|r| r.caccioppoli).collect::<Vec<_>>(),
                "korn": reps.iter().map(|r| r.korn).collect::<Vec<_>>(),
            }),
        );
        for r in reps {
            out.push(r.check);
        }
    }
    out.details = serde_json::Value::Object(details);
    Ok(out)
}

fn count_increases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] > w[0]).count()
}

fn run_lps(
    cfg: &ExperimentConfig,
    setup: &Setup,
    u: &DisplacementField,
) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(Experiment::Lps.id());
    let lc = &cfg.lps;
    let base = lps_check(u, lc.rho, None, 0.0)?;
    out.push(base.check.clone());
    let trend: Vec<(u32, f64)> = lc
        .frequencies
        .par_iter()
        .map(|&k| -> Result<(u32, f64)> {
            let g = BoundaryGenerator::FourierModes(vec![FourierMode {
                component: 0,
                k,
                amp_cos: 1.0,
                amp_sin: 0.0,
            }])
            .trace(setup.mesh.clone())?;
            let v = solve(&setup.pair, &g)?;
            Ok((k, lps_check(&v, lc.rho, None, 0.0)?.c_rho))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("lps_frequency", &["k", "c_rho"]);
    for &(k, c) in &trend {
        t.push(vec![k as f64, c]);
        let mut row = EstimateCheck::new("lps_frequency", k as f64, c, 1.0);
        row.fitted_constant = c;
        row.verdict = Verdict::from_bool(c > 0.0);
        out.push(row);
    }
    out.tables.push(t);
    if trend.len() >= 2 {
        let cs: Vec<f64> = trend.iter().map(|t| t.1).collect();
        let inversions = count_increases(&cs);
        let mut c = EstimateCheck::new(
            "lps_trend",
            lc.rho,
            inversions as f64,
            lc.max_inversions as f64,
        );
        c.fitted_constant = 1.0;
        c.verdict = Verdict::from_bool(inversions <= lc.max_inversions);
        out.push(c);
    }
    out.details = json!({
        "c_rho": base.c_rho,
        "argmin": base.argmin,
        "centers": base.centers,
        "frequency_trend": trend,
    });
    Ok(out)
}

fn run_strain_bound(
    cfg: &ExperimentConfig,
    setup: &Setup,
    u: &DisplacementField,
) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(Experiment::StrainLowerBound.id());
    let x0 = match cfg.strain_lower_bound.x0 {
        Some(x) => x,
        None => peak_of_shape(setup, cfg.d)?,
    };
    let radii: Vec<f64> = cfg
        .strain_lower_bound
        .radius_fractions
        .iter()
        .map(|f| f * cfg.d)
        .collect();
    let rep = strain_lower_bound_check(u, boundary_sobolev_norm(&setup.g, 0.5), x0, cfg.d, &radii)?;
    out.details = json!({ "k": rep.k, "c_d": rep.c_d, "r_squared": rep.r_squared, "x0": x0, "energies": rep.energies });
    out.push(rep.check);
    Ok(out)
}

fn run_reconstruction(cfg: &ExperimentConfig, setup: &Setup) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::new(Experiment::Reconstruction.id());
    let rc = &cfg.reconstruction;
    let truth = realize_pair(cfg, &setup.mesh, rc.truth_degree)?;
    let sweep = noise_sweep(
        &truth,
        &setup.g,
        cfg.d,
        &rc.noise_levels,
        cfg.seed,
        rc.reg_weight,
    )?;
    let mut t = Table::new(
        "noise_sweep",
        &["sigma", "median_error", "min_error", "max_error"],
    );
    for row in &sweep.rows {
        let lo = row.errors.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.errors.iter().copied().fold(0.0, f64::max);
        t.push(vec![row.sigma, row.median_error, lo, hi]);
        let mut c = EstimateCheck::new(
            "reconstruction_error",
            row.sigma,
            row.median_error,
            f64::NAN,
        );
        c.verdict = Verdict::Calibration;
        out.push(c);
    }
    out.tables.push(t);
    let inversions = sweep.inversions();
    let p = sweep.fit.as_ref().map(|f| f.exponent).unwrap_or(f64::NAN);
    let mut c = EstimateCheck::new("reconstruction_rate", 0.0, p, 1.0);
    c.fitted_constant = 1.0;
    c.exponent = Some(p);
    c.verdict = Verdict::from_bool(p > 0.0 && p <= 1.0 && inversions <= rc.max_inversions);
    out.push(c);
    out.details = json!({
        "reg_weight": sweep.reg_weight,
        "exponent": p,
        "r_squared": sweep.fit.as_ref().map(|f| f.r_squared),
        "inversions": inversions,
        "noiseless_error": sweep.rows.first().map(|r| r.median_error),
    });
    Ok(out)
}

fn run_one(
    cfg: &ExperimentConfig,
    setup: &Setup,
    u: Option<&DisplacementField>,
    e: Experiment,
) -> Result<ExperimentOutput> {
    let need = || u.ok_or_else(|| anyhow!("base solution missing"));
    match e {
        Experiment::Family => run_family(cfg, setup),
        Experiment::ThreeSphere => run_three_sphere(cfg, setup, need()?),
        Experiment::Doubling => run_doubling(cfg, need()?),
        Experiment::Lps => run_lps(cfg, setup, need()?),
        Experiment::StrainLowerBound => run_strain_bound(cfg, setup, need()?),
        Experiment::Reconstruction => run_reconstruction(cfg, setup),
    }
    .with_context(|| format!("experiment '{}'", e.id()))
}

fn count(checks: &[EstimateCheck], v: Verdict) -> usize {
    checks.iter().filter(|c| c.verdict == v).count()
}

/// Runs every requested experiment on a pool of `jobs` threads (`0` lets
/// rayon choose) and assembles the report. Output is independent of `jobs`.
pub fn run(cfg: &ExperimentConfig, jobs: usize) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let setup = prepare(cfg)?;
    let experiments = plan(cfg);
    let u = if experiments.iter().any(|e| e.uses_base_solution()) {
        Some(solve(&setup.pair, &setup.g).context("base forward solve")?)
    } else {
        None
    };
    let mut outputs: Vec<ExperimentOutput> = experiments
        .par_iter()
        .map(|&e| run_one(cfg, &setup, u.as_ref(), e))
        .collect::<Result<_>>()?;
    outputs.sort_by(|a, b| a.id.cmp(&b.id));

    let mesh = &setup.mesh;
    let checks: Vec<CheckRow> = outputs
        .iter()
        .flat_map(|o| o.checks.iter().map(CheckRow::from))
        .collect();
    let exit_status = Summary::exit_status_of(&checks);
    let experiments = outputs
        .iter()
        .map(|o| ExperimentSummary {
            id: o.id.clone(),
            passed: count(&o.checks, Verdict::Pass),
            failed: count(&o.checks, Verdict::Fail),
            skipped: count(&o.checks, Verdict::Skipped),
            calibration: count(&o.checks, Verdict::Calibration),
            details: o.details.clone(),
        })
        .collect();
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        name: cfg.name.clone(),
        seed: cfg.seed,
        mesh: MeshSummary {
            h_target: cfg.mesh_h,
            h_max: mesh.h_max(),
            vertices: mesh.vertex_count(),
            triangles: mesh.triangle_count(),
            nodes: mesh.node_count(),
            vector_dofs: 2 * mesh.node_count(),
            min_angle_degrees: mesh.min_angle_degrees(),
        },
        boundary: BoundarySummary::from(&setup.boundary),
        experiments,
        failed_checks: checks
            .iter()
            .filter(|c| c.pass == Verdict::Fail.as_str())
            .count(),
        checks,
        exit_status,
    };
    Ok(Report {
        summary,
        boundary: setup.boundary,
        tables: outputs.into_iter().flat_map(|o| o.tables).collect(),
    })
}
