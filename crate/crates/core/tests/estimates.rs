use std::f64::consts::PI;
use std::sync::Arc;

use lamestab_core::elasticity::*;
use lamestab_core::estimates::*;
use lamestab_core::fields::*;
use lamestab_core::geometry::*;
use lamestab_core::norms::boundary_sobolev_norm;
use lamestab_core::Error;

fn disk(h: f64) -> Arc<TriMesh> {
    Arc::new(build_mesh(DomainSpec::unit_disk(), h).unwrap())
}

const A: [[f64; 2]; 2] = [[1.0, 0.3], [0.3, -0.5]];

fn affine_field(mesh: &Arc<TriMesh>, a: [[f64; 2]; 2]) -> DisplacementField {
    DisplacementField::from_fn(mesh.clone(), |p| {
        [
            a[0][0] * p[0] + a[0][1] * p[1],
            a[1][0] * p[0] + a[1][1] * p[1],
        ]
    })
}

fn sym_norm2(a: [[f64; 2]; 2]) -> f64 {
    let off = 0.5 * (a[0][1] + a[1][0]);
    a[0][0] * a[0][0] + a[1][1] * a[1][1] + 2.0 * off * off
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn phantom_pair(mesh: &Arc<TriMesh>) -> LamePair {
    let spec = PhantomSpec {
        background: 1.0,
        inclusions: vec![Inclusion {
            center: [-0.3, 0.2],
            radius: 0.2,
            contrast: 0.5,
        }],
        mollification_width: 0.15,
        floor: None,
    };
    let mu = make_phantom(mesh.clone(), &spec).unwrap().field;
    LamePair::new(ScalarField::constant(mesh.clone(), 1.0), mu, 0.5, 0.5, 20.0).unwrap()
}

fn bump(mesh: &Arc<TriMesh>) -> ScalarField {
    let spec = PhantomSpec {
        background: 0.0,
        inclusions: vec![Inclusion {
            center: [0.2, -0.1],
            radius: 0.15,
            contrast: 1.0,
        }],
        mollification_width: 0.15,
        floor: None,
    };
    make_phantom(mesh.clone(), &spec).unwrap().field
}

#[test]
fn three_sphere_constant_strain_hits_area_exponent() {
    let mesh = disk(0.08);
    let u = affine_field(&mesh, A);
    let radii = [0.1, 0.2, 0.4];
    let c = calibrate_three_sphere(&[(&u, [0.0, 0.0])], radii).unwrap();
    assert!((c - 1.0).abs() < 1e-3, "C = {c}");
    let out = three_sphere_check(&u, [0.05, -0.05], radii, c, 1.5, (0.01, 0.99)).unwrap();
    assert!(
        (out.delta_calibrated - 0.5).abs() < 1e-3,
        "{}",
        out.delta_calibrated
    );
    assert!(out.check.pass());
    // raw energies are π r² |Â|²
    for (e, r) in out.energies.iter().zip(radii) {
        assert!(rel(*e, PI * r * r * sym_norm2(A)) < 1e-3);
    }
}

#[test]
fn three_sphere_delta_tends_to_the_ends() {
    let mesh = disk(0.08);
    let u = affine_field(&mesh, A);
    let near_inner =
        three_sphere_check(&u, [0.0, 0.0], [0.1, 0.1001, 0.4], 1.0, 1.0, (0.01, 0.99)).unwrap();
    let near_outer =
        three_sphere_check(&u, [0.0, 0.0], [0.1, 0.3999, 0.4], 1.0, 1.0, (0.01, 0.99)).unwrap();
    assert!(near_inner.delta_calibrated > 0.99);
    assert!(near_outer.delta_calibrated < 0.01);
}

#[test]
fn three_sphere_rigid_is_skipped() {
    let mesh = disk(0.1);
    let u = DisplacementField::from_fn(mesh.clone(), |p| [0.3 - 0.2 * p[1], 0.2 * p[0]]);
    let out = three_sphere_check(&u, [0.0, 0.0], [0.1, 0.2, 0.4], 1.0, 1.5, (0.01, 0.99)).unwrap();
    assert_eq!(out.check.verdict, Verdict::Skipped);
}

#[test]
fn three_sphere_rejects_bad_radii_and_escaping_balls() {
    let mesh = disk(0.1);
    let u = affine_field(&mesh, A);
    assert!(three_sphere_check(&u, [0.0, 0.0], [0.2, 0.1, 0.4], 1.0, 1.5, (0.01, 0.99)).is_err());
    assert!(three_sphere_check(&u, [0.7, 0.0], [0.1, 0.2, 0.4], 1.0, 1.5, (0.01, 0.99)).is_err());
}

#[test]
fn three_sphere_delta_formula() {
    // E = r²: δ* solves r₂² = r₁^{2δ} r₃^{2(1−δ)}
    let d = three_sphere_delta(0.01, 0.04, 0.16, 1.0);
    assert!((d - 0.5).abs() < 1e-12);
    assert!(three_sphere_delta(0.01, 0.04, 0.16, 2.0) > d);
}

#[test]
fn displacement_doubling_of_linear_field_is_sixteen() {
    let mesh = disk(0.08);
    let u = affine_field(&mesh, A);
    let rep = doubling_check(&u, DoublingMode::Displacement, [0.0, 0.0], 0.15, 0.1, None).unwrap();
    assert!(rel(rep.check.ratio(), 16.0) < 1e-3, "{}", rep.check.ratio());
    assert_eq!(rep.check.verdict, Verdict::Calibration);
    let strain =
        doubling_check(&u, DoublingMode::Strain, [0.1, 0.0], 0.15, 0.1, Some(4.01)).unwrap();
    assert!(rel(strain.check.ratio(), 4.0) < 1e-3);
    assert!(strain.check.pass());
    // the local rigid residual of a symmetric linear field is the field itself
    let korn = strain.korn.unwrap();
    assert!(korn.is_finite() && korn > 0.0);
}

#[test]
fn rigid_average_recovers_rigid_motion() {
    let mesh = disk(0.08);
    let u = DisplacementField::from_fn(mesh.clone(), |p| {
        [0.3 - 0.7 * (p[1] - 0.1), -0.2 + 0.7 * (p[0] + 0.1)]
    });
    let (m, area) = rigid_average(&u, [-0.1, 0.1], 0.2);
    assert!(rel(area, PI * 0.04) < 1e-3);
    // chord polygons shift the centroid slightly
    assert!((m.a[0] - 0.3).abs() < 1e-5 && (m.a[1] + 0.2).abs() < 1e-5);
    assert!((m.w - 0.7).abs() < 1e-9);
}

#[test]
fn calibrated_doubling_judges_held_out_radii() {
    let mesh = disk(0.05);
    let pair = phantom_pair(&mesh);
    let g = BoundaryGenerator::Affine {
        matrix: A,
        offset: [0.0, 0.0],
    }
    .trace(mesh.clone())
    .unwrap();
    let u = solve_dirichlet(&assemble(mesh.clone(), &pair).unwrap(), &g, None).unwrap();
    let radii = [0.02, 0.04, 0.06, 0.08, 0.1];
    let (bound, reps) =
        calibrate_doubling(&u, DoublingMode::Strain, [-0.2, 0.1], &radii, 0.1, 1.5).unwrap();
    assert!(bound > 0.0);
    for (i, r) in reps.iter().enumerate() {
        if i % 2 == 0 {
            assert_eq!(r.check.verdict, Verdict::Calibration);
        } else {
            assert!(r.check.pass(), "{r:?}");
        }
    }
}

#[test]
fn lps_constant_strain_is_area_ratio() {
    let mesh = disk(0.08);
    let u = affine_field(&mesh, A);
    let rep = lps_check(&u, 0.1, Some(0.01), 0.1).unwrap();
    assert!(rel(rep.c_rho, 0.01) < 0.02, "{}", rep.c_rho);
    assert!(rep.check.pass());
    // lattice spacing ρ/2 inside Ω_{5ρ}: all points within radius 0.5
    assert!(rep.centers >= 60);
}

#[test]
fn lps_rigid_and_empty_grid() {
    let mesh = disk(0.1);
    let rigid = DisplacementField::from_fn(mesh.clone(), |p| [-p[1], p[0]]);
    let rep = lps_check(&rigid, 0.1, None, 0.1).unwrap();
    assert_eq!(rep.check.verdict, Verdict::Skipped);
    let u = affine_field(&mesh, A);
    assert!(matches!(
        lps_check(&u, 0.3, None, 0.1),
        Err(Error::EmptySubdomain { .. })
    ));
}

#[test]
fn strain_lower_bound_for_constant_strain() {
    let mesh = disk(0.08);
    let g = BoundaryGenerator::Affine {
        matrix: A,
        offset: [0.0, 0.0],
    }
    .trace(mesh.clone())
    .unwrap();
    let u = affine_field(&mesh, A);
    let d = 0.3;
    let gh = boundary_sobolev_norm(&g, 0.5);
    let rep = strain_lower_bound_check(&u, gh, [0.1, 0.1], d, &[0.05, 0.1, 0.2, 0.3]).unwrap();
    assert!((rep.k - 2.0).abs() < 1e-3, "K = {}", rep.k);
    assert!(rel(rep.c_d, sym_norm2(A) * PI * d * d / (gh * gh)) < 1e-3);
    assert!(rep.check.pass());
    assert!(strain_lower_bound_check(&u, gh, [0.1, 0.1], d, &[0.1, 0.2]).is_err());
    assert!(strain_lower_bound_check(&u, gh, [0.1, 0.1], d, &[0.1, 0.2, 0.4]).is_err());
}

#[test]
fn checks_are_invariant_under_scaling_the_field() {
    let mesh = disk(0.05);
    let pair = phantom_pair(&mesh);
    let g = BoundaryGenerator::Affine {
        matrix: A,
        offset: [0.0, 0.0],
    }
    .trace(mesh.clone())
    .unwrap();
    let u = solve_dirichlet(&assemble(mesh.clone(), &pair).unwrap(), &g, None).unwrap();
    let u3 = u.scaled(3.0);
    let x = [-0.2, 0.15];
    let a = three_sphere_check(&u, x, [0.05, 0.1, 0.2], 1.0, 1.5, (0.05, 0.95)).unwrap();
    let b = three_sphere_check(&u3, x, [0.05, 0.1, 0.2], 1.0, 1.5, (0.05, 0.95)).unwrap();
    assert!(rel(b.energies[1], 9.0 * a.energies[1]) < 1e-12);
    assert!(
        rel(
            b.check.lhs / b.check.rhs_unscaled,
            a.check.lhs / a.check.rhs_unscaled
        ) < 1e-9
    );
    for mode in [DoublingMode::Displacement, DoublingMode::Strain] {
        let a = doubling_check(&u, mode, x, 0.1, 0.1, None).unwrap();
        let b = doubling_check(&u3, mode, x, 0.1, 0.1, None).unwrap();
        assert!(rel(b.check.lhs, 9.0 * a.check.lhs) < 1e-12);
        assert!(rel(b.check.ratio(), a.check.ratio()) < 1e-12);
    }
    let a = lps_check(&u, 0.1, None, 0.0).unwrap();
    let b = lps_check(&u3, 0.1, None, 0.0).unwrap();
    assert!(rel(b.c_rho, a.c_rho) < 1e-12);
}

#[test]
fn identical_fields_give_zero_lemma_and_interpolation_sides() {
    let mesh = disk(0.1);
    let u = affine_field(&mesh, A);
    let zero = ScalarField::constant(mesh.clone(), 0.0);
    let (lhs, rhs) = lemma_sides(&u, &u, &zero).unwrap();
    assert_eq!(lhs, 0.0);
    assert_eq!(rhs, 0.0);
    let c = interpolation_check(&u, &u, 1.0, 1.0, Some(1.0)).unwrap();
    assert_eq!(c.lhs, 0.0);
    assert_eq!(c.ratio(), 0.0);
    assert!(c.pass());
}

#[test]
fn holder_rate_fit_recovers_synthetic_power() {
    let xs: Vec<f64> = (0..8).map(|i| 10f64.powf(-(i as f64) * 0.5)).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x.powf(0.3)).collect();
    let fit = fit_holder_rate(&xs, &ys).unwrap();
    assert!((fit.exponent - 0.3).abs() < 1e-6);
    assert!((fit.r_squared - 1.0).abs() < 1e-12);
}

#[test]
fn perturbation_family_and_stability_report() {
    let mesh = disk(0.08);
    let base = phantom_pair(&mesh);
    let shape = bump(&mesh);
    let g = BoundaryGenerator::Affine {
        matrix: A,
        offset: [0.0, 0.0],
    }
    .trace(mesh.clone())
    .unwrap();
    let scales = [1e-4, 1e-3, 1e-2, 1e-1];
    let ex =
        holder_stability_experiment(&base, &shape, &scales, 0.1, &g, &HolderOptions::default())
            .unwrap();
    let peak = shape.sup_norm();
    let mut last = 0.0;
    for s in &ex.family.samples {
        // interior bump: η = 0, gap = t max|shape|
        assert!(s.eta < 1e-14);
        assert!(rel(s.linf_gap, s.scale * peak) < 1e-9);
        assert!(s.l2_mismatch >= last * (1.0 - 1e-6));
        last = s.l2_mismatch;
    }
    assert!(ex.fitted_delta > 0.0 && ex.fitted_delta <= 1.0);
    assert!(ex.observed.r_squared >= 0.9);
    assert_eq!(ex.reports.len(), 4);
    assert!(ex
        .reports
        .iter()
        .all(|r| r.bound > 0.0 && r.epsilon_sq > 0.0));
    let ie = integral_estimate_check(&ex.family).unwrap();
    assert_eq!(ie.held_out_scale, 1e-4);
    assert_eq!(
        ie.checks
            .iter()
            .filter(|c| c.verdict == Verdict::Calibration)
            .count(),
        3
    );
    let slope = interpolation_slope(&ex.family).unwrap();
    assert!(slope.slope > 0.45 && slope.slope <= 1.05);
}

#[test]
fn family_preconditions() {
    let mesh = disk(0.1);
    let base = phantom_pair(&mesh);
    let shape = bump(&mesh);
    let g = BoundaryGenerator::Affine {
        matrix: A,
        offset: [0.0, 0.0],
    }
    .trace(mesh.clone())
    .unwrap();
    // μ₂ = μ₁ − 5 · bump leaves the budget before anything is solved
    assert!(matches!(
        solve_family(&base, &shape, &g, &[1e-2, -5.0], 0.1),
        Err(Error::BudgetViolation(_))
    ));
    let fam = solve_family(&base, &shape, &g, &[1e-3, 1e-2, 1e-1], 0.1).unwrap();
    assert!(matches!(
        integral_estimate_check(&fam),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        holder_stability_experiment(
            &base,
            &shape,
            &[1e-2, 1e-1],
            0.1,
            &g,
            &HolderOptions::default()
        ),
        Err(Error::InsufficientData(_))
    ));
}

#[test]
fn zero_scale_has_zero_gap() {
    let mesh = disk(0.1);
    let base = phantom_pair(&mesh);
    let shape = bump(&mesh);
    let g = BoundaryGenerator::Affine {
        matrix: A,
        offset: [0.0, 0.0],
    }
    .trace(mesh.clone())
    .unwrap();
    let fam = solve_family(&base, &shape, &g, &[0.0, 1e-2], 0.1).unwrap();
    let zero = &fam.samples[0];
    assert_eq!(zero.linf_gap, 0.0);
    assert_eq!(zero.lemma_lhs, 0.0);
    assert!(zero.l2_mismatch < 1e-12);
}
