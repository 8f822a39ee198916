use std::f64::consts::PI;
use std::sync::Arc;

use lamestab_core::elasticity::DisplacementField;
use lamestab_core::fields::*;
use lamestab_core::geometry::*;
use lamestab_core::norms::*;
use lamestab_core::{Error, Point};
use num_complex::Complex64;
use proptest::prelude::*;

fn disk(h: f64) -> Arc<TriMesh> {
    Arc::new(build_mesh(DomainSpec::unit_disk(), h).unwrap())
}

fn ellipse(h: f64) -> Arc<TriMesh> {
    let spec = DomainSpec {
        kind: DomainKind::Ellipse { a: 1.0, b: 0.6 },
        scale: 1.0,
    };
    Arc::new(build_mesh(spec, h).unwrap())
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn constant_trace_has_only_mode_zero() {
    for mesh in [disk(0.1), ellipse(0.1)] {
        let g = trace_from_closure(mesh.clone(), |_| [0.6, -0.8]).unwrap();
        for s in [0.5, 1.0, 1.5] {
            assert!(close(
                boundary_sobolev_norm(&g, s),
                g.perimeter().sqrt(),
                1e-12
            ));
        }
    }
}

#[test]
fn cosine_on_the_circle() {
    let mesh = disk(0.1);
    let g = trace_from_closure(mesh.clone(), |p| [p[0], 0.0]).unwrap();
    for s in [0.5, 1.0, 1.5] {
        let want = (PI * 2f64.powf(s)).sqrt();
        assert!(close(boundary_sobolev_norm(&g, s), want, 1e-12), "s = {s}");
    }
    assert!(close(
        boundary_sobolev_norm(&g, 0.5),
        (PI * 2f64.sqrt()).sqrt(),
        1e-12
    ));
}

#[test]
fn norms_are_homogeneous() {
    let mesh = ellipse(0.1);
    let g = trace_from_closure(mesh, |p| [p[0] * p[1], (3.0 * p[0]).sin()]).unwrap();
    for s in [0.5, 1.0, 1.5] {
        let n = boundary_sobolev_norm(&g, s);
        assert!(close(
            boundary_sobolev_norm(&g.scaled(-3.0), s),
            3.0 * n,
            1e-13
        ));
    }
}

#[test]
fn rigid_traces_have_zero_distance() {
    let mesh = ellipse(0.1);
    let r = RigidMotion::new([0.4, -1.3], 0.75);
    let g = r.trace(mesh).unwrap();
    let (theta, m) = rigid_motion_distance(&g).unwrap();
    assert!(theta < 1e-12);
    assert!(
        (m.a[0] - 0.4).abs() < 1e-9 && (m.a[1] + 1.3).abs() < 1e-9 && (m.w - 0.75).abs() < 1e-9
    );
    assert!(matches!(frequency(&g), Err(Error::RigidTrace)));
    assert!(boundary_norm_table(&g).unwrap().frequency.is_none());
}

#[test]
fn distance_ignores_added_rigid_motions() {
    let mesh = ellipse(0.1);
    let g = trace_from_closure(mesh.clone(), |p| [p[0] * p[0], (2.0 * p[1]).sin()]).unwrap();
    let r = RigidMotion::new([2.0, -1.0], -0.6).trace(mesh).unwrap();
    let (t0, _) = rigid_motion_distance(&g).unwrap();
    let (t1, _) = rigid_motion_distance(&g.add_scaled(&r, 1.0).unwrap()).unwrap();
    assert!(close(t1, t0, 1e-10));
}

// Minimizes ‖g − c·e‖²_{H^{1/2}} by a coarse-to-fine grid search over
// (a₁, a₂, w) ∈ [−2, 2]³ using Fourier coefficients built here.
fn grid_search_theta(g: &BoundaryTrace) -> (f64, [f64; 3]) {
    let mesh = g.mesh().clone();
    let n = g.params().len();
    let l = g.perimeter();
    let km = g.k_max() as i64;
    let coeffs = |f: &dyn Fn(Point) -> [f64; 2]| -> Vec<[Complex64; 2]> {
        (-km..=km)
            .map(|k| {
                let kt = 2.0 * PI * k as f64 / l;
                let mut acc = [Complex64::new(0.0, 0.0); 2];
                for &s in g.params() {
                    let v = f(mesh.domain().point_at(s));
                    let e = Complex64::from_polar(l / n as f64 / l.sqrt(), -kt * s);
                    acc[0] += e * v[0];
                    acc[1] += e * v[1];
                }
                acc
            })
            .collect()
    };
    let gs: Vec<[Complex64; 2]> = g.modes().map(|(_, a, b)| [a, b]).collect();
    let e = [
        coeffs(&|_| [1.0, 0.0]),
        coeffs(&|_| [0.0, 1.0]),
        coeffs(&|p| [-p[1], p[0]]),
    ];
    let weights: Vec<f64> = (-km..=km)
        .map(|k| (1.0 + (2.0 * PI * k as f64 / l).powi(2)).sqrt())
        .collect();
    let obj = |c: [f64; 3]| -> f64 {
        let mut s = 0.0;
        for m in 0..gs.len() {
            for comp in 0..2 {
                let r = gs[m][comp]
                    - e[0][m][comp] * c[0]
                    - e[1][m][comp] * c[1]
                    - e[2][m][comp] * c[2];
                s += weights[m] * r.norm_sqr();
            }
        }
        s
    };
    let mut center = [0.0; 3];
    let mut half = 2.0;
    let steps = 20;
    for _ in 0..8 {
        let mut best = (f64::INFINITY, center);
        for i in 0..=steps {
            for j in 0..=steps {
                for k in 0..=steps {
                    let c = [
                        center[0] - half + 2.0 * half * i as f64 / steps as f64,
                        center[1] - half + 2.0 * half * j as f64 / steps as f64,
                        center[2] - half + 2.0 * half * k as f64 / steps as f64,
                    ];
                    let v = obj(c);
                    if v < best.0 {
                        best = (v, c);
                    }
                }
            }
        }
        center = best.1;
        half /= 4.0;
    }
    (obj(center).sqrt(), center)
}

#[test]
fn identity_trace_matches_grid_search() {
    let mesh = disk(0.1);
    let g = trace_from_closure(mesh, |p| p).unwrap();
    let (theta, _) = rigid_motion_distance(&g).unwrap();
    let (brute, _) = grid_search_theta(&g);
    assert!((theta - brute).abs() < 1e-3);
    // x is orthogonal to every rigid motion on the circle
    assert!(close(theta, (2.0 * PI * 2f64.sqrt()).sqrt(), 1e-10));
}

#[test]
fn shifted_trace_matches_grid_search() {
    let mesh = ellipse(0.1);
    let g = trace_from_closure(mesh, |p| {
        [
            p[0] + 0.3 - 0.5 * p[1] + (2.0 * p[1]).cos(),
            p[1] - 0.2 + 0.5 * p[0] + p[0] * p[1],
        ]
    })
    .unwrap();
    let (theta, m) = rigid_motion_distance(&g).unwrap();
    let (brute, c) = grid_search_theta(&g);
    assert!((theta - brute).abs() < 1e-3);
    assert!(
        (m.a[0] - c[0]).abs() < 1e-2 && (m.a[1] - c[1]).abs() < 1e-2 && (m.w - c[2]).abs() < 1e-2
    );
}

#[test]
fn projection_is_orthogonal() {
    let mesh = ellipse(0.1);
    let g = trace_from_closure(mesh, |p| [(3.0 * p[0]).sin() + p[1], p[0] * p[0] - 1.0]).unwrap();
    let p = rigid_projection(&g).unwrap();
    let n = boundary_sobolev_norm(&g, 0.5);
    assert!((p.theta.powi(2) + p.projection_norm.powi(2) - n * n).abs() <= 1e-9 * n * n);
    assert!(p.orthogonality <= 1e-9);
}

#[test]
fn frequency_is_scale_invariant_and_budgeted() {
    let mesh = disk(0.1);
    let g = BoundaryGenerator::FourierModes(vec![FourierMode {
        component: 0,
        k: 3,
        amp_cos: 1.0,
        amp_sin: 0.0,
    }])
    .trace(mesh)
    .unwrap();
    let f = frequency(&g).unwrap();
    assert!(close(frequency(&g.scaled(7.0)).unwrap(), f, 1e-12));
    let t = boundary_norm_table(&g).unwrap();
    let (l0, delta0) = (t.h_three_halves, t.theta);
    assert!(f <= l0 / delta0);
    assert!(t.within_budget(l0 * 1.001, delta0 * 0.999));
    assert!(t.h_half <= t.h_one && t.h_one <= t.h_three_halves);
}

#[test]
fn linf_on_mask_examples() {
    let mesh = disk(0.05);
    let mask = interior_mask(&mesh, 0.2).unwrap();
    let c = ScalarField::constant(mesh.clone(), -2.5);
    assert_eq!(linf_on_mask(&c, &mask).unwrap().0, 2.5);
    let z = ScalarField::constant(mesh.clone(), 0.0);
    let (v, p) = linf_on_mask(&z, &mask).unwrap();
    assert_eq!(v, 0.0);
    // ties: the first flagged dof wins
    let first = (0..mesh.vertex_count())
        .find(|&i| mask.node_flags[i])
        .unwrap();
    assert_eq!(p, mesh.node_point(first));

    let spec = PhantomSpec {
        background: 1.0,
        inclusions: vec![Inclusion {
            center: [0.2, 0.1],
            radius: 0.2,
            contrast: 0.7,
        }],
        mollification_width: 0.1,
        floor: None,
    };
    let mu = make_phantom(mesh.clone(), &spec).unwrap().field;
    let phi = mu
        .add_scaled(&ScalarField::constant(mesh.clone(), 1.0), -1.0)
        .unwrap();
    let (v, p) = linf_on_mask(&phi, &mask).unwrap();
    assert!((v - 0.7).abs() < 1e-12);
    assert!(((p[0] - 0.2).powi(2) + (p[1] - 0.1).powi(2)).sqrt() <= 0.2 + 1e-12);
}

#[test]
fn linf_on_mask_rejects_other_meshes() {
    let a = disk(0.1);
    let b = disk(0.05);
    let mask = interior_mask(&b, 0.2).unwrap();
    assert!(linf_on_mask(&ScalarField::constant(a, 1.0), &mask).is_err());
}

#[test]
fn ball_energies() {
    let mesh = disk(0.05);
    let rigid = DisplacementField::from_fn(mesh.clone(), |p| [0.3 - 0.2 * p[1], 0.1 + 0.2 * p[0]]);
    let a = [[0.4, 1.0], [-0.2, 0.3]];
    let lin = DisplacementField::from_fn(mesh.clone(), |p| {
        [
            a[0][0] * p[0] + a[0][1] * p[1],
            a[1][0] * p[0] + a[1][1] * p[1],
        ]
    });
    let off = 0.5 * (a[0][1] + a[1][0]);
    let sym2 = a[0][0] * a[0][0] + a[1][1] * a[1][1] + 2.0 * off * off;
    let mut prev = 0.0;
    for r in [0.1, 0.2, 0.3, 0.5] {
        for center in [[0.0, 0.0], [0.2, -0.3], [0.9, 0.0]] {
            let ball = ball_quadrature(&mesh, center, r, 4);
            assert!(strain_energy_on_ball(&rigid, &ball) < 1e-24);
            let e = strain_energy_on_ball(&lin, &ball);
            assert!(close(e, sym2 * ball.area(), 1e-12));
        }
        let e = strain_energy_on_ball(&lin, &ball_quadrature(&mesh, [0.0, 0.0], r, 4));
        assert!(e >= prev);
        prev = e;
    }
}

#[test]
fn ball_covering_the_domain_gives_the_total() {
    let mesh = disk(0.05);
    let u = DisplacementField::from_fn(mesh.clone(), |p| [p[0] * p[1], p[0] * p[0]]);
    let whole = strain_energy(&u);
    let ball = ball_quadrature(&mesh, [0.0, 0.0], 1.5, 4);
    assert!(close(strain_energy_on_ball(&u, &ball), whole, 1e-10));
}

fn random_trace(mesh: Arc<TriMesh>, amps: &[(u32, f64, f64, f64)]) -> BoundaryTrace {
    let modes = amps
        .iter()
        .enumerate()
        .map(|(i, &(k, c, s, _))| FourierMode {
            component: i % 2,
            k,
            amp_cos: c,
            amp_sin: s,
        })
        .collect();
    BoundaryGenerator::FourierModes(modes).trace(mesh).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norms_increase_with_order(amps in prop::collection::vec((0u32..8, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64), 1..5)) {
        let g = random_trace(ellipse(0.15), &amps);
        let a = boundary_sobolev_norm(&g, 0.5);
        let b = boundary_sobolev_norm(&g, 1.0);
        let c = boundary_sobolev_norm(&g, 1.5);
        prop_assert!(a <= b * (1.0 + 1e-14) && b <= c * (1.0 + 1e-14));
    }

    #[test]
    fn distance_is_minimal(
        amps in prop::collection::vec((0u32..8, -1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64), 1..5),
        a in prop::array::uniform2(-2.0..2.0f64),
        w in -2.0..2.0f64,
    ) {
        let mesh = ellipse(0.15);
        let g = random_trace(mesh.clone(), &amps);
        let (theta, _) = rigid_motion_distance(&g).unwrap();
        let r = RigidMotion::new(a, w).trace(mesh).unwrap();
        let d = boundary_sobolev_norm(&g.add_scaled(&r, -1.0).unwrap(), 0.5);
        prop_assert!(theta <= d * (1.0 + 1e-12) + 1e-12);
    }
}
