#![allow(clippy::needless_range_loop)]

use std::sync::Arc;

use lamestab_core::elasticity::*;
use lamestab_core::fields::*;
use lamestab_core::geometry::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn disk(h: f64) -> Arc<TriMesh> {
    Arc::new(build_mesh(DomainSpec::unit_disk(), h).unwrap())
}

fn constant_pair(mesh: &Arc<TriMesh>, lambda: f64, mu: f64) -> LamePair {
    LamePair::new(
        ScalarField::constant(mesh.clone(), lambda),
        ScalarField::constant(mesh.clone(), mu),
        0.1,
        0.1,
        100.0,
    )
    .unwrap()
}

fn affine(a: [[f64; 2]; 2], b: [f64; 2]) -> BoundaryGenerator {
    BoundaryGenerator::Affine {
        matrix: a,
        offset: b,
    }
}

#[test]
fn affine_data_is_reproduced_exactly() {
    let mesh = disk(0.1);
    let sys = assemble(mesh.clone(), &constant_pair(&mesh, 1.0, 1.0)).unwrap();
    let a = [[0.3, -1.2], [0.7, 0.4]];
    let g = affine(a, [0.1, -0.2]).trace(mesh.clone()).unwrap();
    let u = solve_dirichlet(&sys, &g, None).unwrap();
    for (i, v) in u.values().iter().enumerate() {
        let p = mesh.node_point(i);
        let e = affine(a, [0.1, -0.2]).eval(p);
        assert!((v[0] - e[0]).abs() < 1e-9 && (v[1] - e[1]).abs() < 1e-9);
    }
    assert!(interior_residual(&sys, &u, None).unwrap() <= 1e-10);
}

#[test]
fn rigid_data_has_no_strain_energy() {
    let mesh = disk(0.1);
    let sys = assemble(mesh.clone(), &constant_pair(&mesh, 2.0, 0.5)).unwrap();
    let g = BoundaryGenerator::Rigid {
        a: [0.3, -0.1],
        w: 0.7,
    }
    .trace(mesh.clone())
    .unwrap();
    let u = solve_dirichlet(&sys, &g, None).unwrap();
    assert!(energy_product(&sys, &u, &u).abs() < 1e-10);
    assert!(u.strain_l2_norm() < 1e-9);
}

#[test]
fn rigid_motions_are_in_the_kernel() {
    let mesh = disk(0.2);
    let sys = assemble(mesh.clone(), &constant_pair(&mesh, 1.0, 1.0)).unwrap();
    let r = DisplacementField::from_fn(mesh.clone(), |p| [1.0 - 0.5 * p[1], 2.0 + 0.5 * p[0]]);
    let kr = sys.full.mul_vec(&r.to_dof_vector());
    assert!(kr.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn stiffness_is_symmetric() {
    let mesh = disk(0.2);
    let mu = ScalarField::from_fn(mesh.clone(), 1, |p| 1.0 + 0.3 * p[0]).unwrap();
    let pair = LamePair::new(
        ScalarField::constant(mesh.clone(), 0.7),
        mu,
        0.1,
        0.1,
        100.0,
    )
    .unwrap();
    let sys = assemble(mesh, &pair).unwrap();
    let scale = sys.full.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(sys.full.is_symmetric(1e-12 * scale));
}

// P1 hats are the P2 combinations vertex + half of the two adjacent edge
// bubbles; the strain form of P1 hats on the reference triangle with λ = 0,
// μ = 1 integrates a constant and can be written out by hand.
#[test]
fn p1_element_matrix_matches_hand_computation() {
    let mesh = disk(0.2);
    let t = 0;
    let tri = mesh.triangle_points(t);
    let pair = constant_pair(&mesh, 0.0, 1.0);
    let k2 = element_stiffness(&mesh, &pair, StressConvention::Standard, t);
    // P1 hat a = φ_a + ½ (φ_{edge a,b} + φ_{edge a,c}) in local numbering
    let edges = [[0usize, 1], [1, 2], [2, 0]];
    let mut p = [[0.0; 3]; 6];
    for a in 0..3 {
        p[a][a] = 1.0;
        for (e, ed) in edges.iter().enumerate() {
            if ed.contains(&a) {
                p[3 + e][a] = 0.5;
            }
        }
    }
    let mut k1 = [[0.0; 6]; 6];
    for a in 0..3 {
        for i in 0..2 {
            for b in 0..3 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for r in 0..6 {
                        for c in 0..6 {
                            s += p[r][a] * k2[2 * r + i][2 * c + j] * p[c][b];
                        }
                    }
                    k1[2 * a + i][2 * b + j] = s;
                }
            }
        }
    }
    // hand formula: K[(a,i),(b,j)] = area · ½ (δ_ij ∇λ_a·∇λ_b + ∂_jλ_a ∂_iλ_b)
    let [x0, x1, x2] = tri;
    let det = (x1[0] - x0[0]) * (x2[1] - x0[1]) - (x2[0] - x0[0]) * (x1[1] - x0[1]);
    let area = det / 2.0;
    let grads = [
        [(x1[1] - x2[1]) / det, (x2[0] - x1[0]) / det],
        [(x2[1] - x0[1]) / det, (x0[0] - x2[0]) / det],
        [(x0[1] - x1[1]) / det, (x1[0] - x0[0]) / det],
    ];
    for a in 0..3 {
        for i in 0..2 {
            for b in 0..3 {
                for j in 0..2 {
                    let dot = grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1];
                    let d = if i == j { dot } else { 0.0 };
                    let want = area * 0.5 * (d + grads[a][j] * grads[b][i]);
                    assert!(
                        (k1[2 * a + i][2 * b + j] - want).abs() < 1e-12,
                        "{a}{i}{b}{j}"
                    );
                }
            }
        }
    }
}

#[test]
fn reference_triangle_strain_form() {
    // λ = 0, μ = 1, hats λ0 = 1 − x − y, λ1 = x, λ2 = y on the unit
    // right triangle of area ½; entries worked out by hand.
    let g = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    let area = 0.5;
    let hand = [
        [1.5, 0.5, -1.0, -0.5, -0.5, 0.0],
        [0.5, 1.5, 0.0, -0.5, -0.5, -1.0],
        [-1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [-0.5, -0.5, 0.0, 0.5, 0.5, 0.0],
        [-0.5, -0.5, 0.0, 0.5, 0.5, 0.0],
        [0.0, -1.0, 0.0, 0.0, 0.0, 1.0],
    ];
    for a in 0..3 {
        for i in 0..2 {
            for b in 0..3 {
                for j in 0..2 {
                    let dot: f64 = g[a][0] * g[b][0] + g[a][1] * g[b][1];
                    let d = if i == j { dot } else { 0.0 };
                    let v = area * 0.5 * (d + g[a][j] * g[b][i]);
                    assert!((v - 0.5 * hand[2 * a + i][2 * b + j]).abs() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn strain_examples() {
    let mesh = disk(0.2);
    let skew = DisplacementField::from_fn(mesh.clone(), |p| [-p[1], p[0]]);
    let shear = DisplacementField::from_fn(mesh.clone(), |p| [p[0], -p[1]]);
    let quad = DisplacementField::from_fn(mesh.clone(), |p| [p[1] * p[1], 0.0]);
    for s in strain(&skew) {
        assert!(frob2(&s.strain) < 1e-24);
    }
    for s in strain(&shear) {
        assert!((s.strain[0][0] - 1.0).abs() < 1e-12 && (s.strain[1][1] + 1.0).abs() < 1e-12);
        assert!(s.strain[0][1].abs() < 1e-12);
    }
    for s in strain(&quad) {
        let y = s.point[1];
        assert!(s.strain[0][0].abs() < 1e-12 && s.strain[1][1].abs() < 1e-12);
        assert!((s.strain[0][1] - y).abs() < 1e-12 && (s.strain[1][0] - y).abs() < 1e-12);
    }
}

#[test]
fn strain_plus_skew_is_the_gradient() {
    let mesh = disk(0.2);
    let u = DisplacementField::from_fn(mesh.clone(), |p| {
        [p[0] * p[1] + p[1], p[0] * p[0] - 2.0 * p[1]]
    });
    for t in 0..mesh.triangle_count() {
        let l = [0.2, 0.3, 0.5];
        let g = u.gradient(t, l);
        let (e, w) = (sym(g), skew(g));
        for i in 0..2 {
            for j in 0..2 {
                assert!((e[i][j] + w[i][j] - g[i][j]).abs() < 1e-14);
            }
        }
    }
}

// u* = (x², xy): ∇̂u = [[2x, y/2], [y/2, x]], div u = 3x. With unit
// coefficients σ = 3x I + ∇̂u and div σ = (5.5, 0).
fn polynomial_force(_: [f64; 2]) -> [f64; 2] {
    [-5.5, 0.0]
}

#[test]
fn polynomial_manufactured_solution_is_exact() {
    let mesh = disk(0.1);
    let sys = assemble(mesh.clone(), &constant_pair(&mesh, 1.0, 1.0)).unwrap();
    let exact = |p: [f64; 2]| [p[0] * p[0], p[0] * p[1]];
    let g = trace_from_closure(mesh.clone(), exact).unwrap();
    let u = solve_dirichlet(&sys, &g, Some(&polynomial_force)).unwrap();
    assert!(u.l2_error(exact) < 1e-9, "{}", u.l2_error(exact));
}

#[test]
fn smooth_manufactured_solution_converges_at_third_order() {
    // u* = (sin 2x cos y, cos x sin 2y), f = −[(λ + μ/2) ∇div u + (μ/2) Δu]
    let exact = |p: [f64; 2]| {
        [
            (2.0 * p[0]).sin() * p[1].cos(),
            p[0].cos() * (2.0 * p[1]).sin(),
        ]
    };
    let force = |p: [f64; 2]| {
        let (x, y) = (p[0], p[1]);
        // div u = 2 cos 2x cos y + 2 cos x cos 2y
        let grad_div = [
            -4.0 * (2.0 * x).sin() * y.cos() - 2.0 * x.sin() * (2.0 * y).cos(),
            -2.0 * (2.0 * x).cos() * y.sin() - 4.0 * x.cos() * (2.0 * y).sin(),
        ];
        let lap = [
            -5.0 * (2.0 * x).sin() * y.cos(),
            -5.0 * x.cos() * (2.0 * y).sin(),
        ];
        [
            -(1.5 * grad_div[0] + 0.5 * lap[0]),
            -(1.5 * grad_div[1] + 0.5 * lap[1]),
        ]
    };
    let mut errors = Vec::new();
    for h in [0.08, 0.04, 0.02] {
        let mesh = disk(h);
        let sys = assemble(mesh.clone(), &constant_pair(&mesh, 1.0, 1.0)).unwrap();
        let g = trace_from_closure(mesh.clone(), exact).unwrap();
        let u = solve_dirichlet(&sys, &g, Some(&force)).unwrap();
        errors.push(u.l2_error(exact));
    }
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 6.0, "{errors:?}");
    }
}

#[test]
fn solve_is_linear_in_the_data() {
    let mesh = disk(0.1);
    let mu = ScalarField::from_fn(mesh.clone(), 1, |p| 1.0 + 0.5 * p[0] * p[0]).unwrap();
    let pair = LamePair::new(
        ScalarField::constant(mesh.clone(), 1.0),
        mu,
        0.1,
        0.1,
        100.0,
    )
    .unwrap();
    let sys = assemble(mesh.clone(), &pair).unwrap();
    let g1 = BoundaryGenerator::FourierModes(vec![FourierMode {
        component: 0,
        k: 2,
        amp_cos: 1.0,
        amp_sin: 0.3,
    }])
    .trace(mesh.clone())
    .unwrap();
    let g2 = affine([[0.2, 1.0], [0.0, -0.4]], [0.0, 0.0])
        .trace(mesh.clone())
        .unwrap();
    let c = -2.5;
    let u1 = solve_dirichlet(&sys, &g1, None).unwrap();
    let u2 = solve_dirichlet(&sys, &g2, None).unwrap();
    let u12 = solve_dirichlet(&sys, &g1.add_scaled(&g2, c).unwrap(), None).unwrap();
    let combo = u1.add_scaled(&u2, c).unwrap();
    let diff = u12.add_scaled(&combo, -1.0).unwrap();
    assert!(diff.l2_norm() <= 1e-9 * u12.l2_norm());
}

fn phantom_pair(mesh: &Arc<TriMesh>, contrast: f64) -> LamePair {
    let spec = PhantomSpec {
        background: 1.0,
        inclusions: vec![Inclusion {
            center: [0.1, -0.2],
            radius: 0.25,
            contrast,
        }],
        mollification_width: 0.15,
        floor: None,
    };
    let mu = make_phantom(mesh.clone(), &spec).unwrap().field;
    LamePair::new(
        ScalarField::constant(mesh.clone(), 1.0),
        mu,
        0.1,
        0.1,
        100.0,
    )
    .unwrap()
}

#[test]
fn weak_identity_holds_for_random_test_fields() {
    let mesh = disk(0.05);
    let p1 = phantom_pair(&mesh, 0.8);
    let p2 = phantom_pair(&mesh, 0.0);
    let g = affine([[1.0, 0.3], [0.3, -0.5]], [0.0, 0.0])
        .trace(mesh.clone())
        .unwrap();
    let u = solve_dirichlet(&assemble(mesh.clone(), &p1).unwrap(), &g, None).unwrap();
    let v = solve_dirichlet(&assemble(mesh.clone(), &p2).unwrap(), &g, None).unwrap();
    let phi = p1.mu.add_scaled(&p2.mu, -1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let flags = mesh.boundary_node_flags();
    for _ in 0..10 {
        let vals = (0..mesh.node_count())
            .map(|i| {
                if flags[i] {
                    [0.0, 0.0]
                } else {
                    [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
                }
            })
            .collect();
        let zeta = DisplacementField::from_nodal(mesh.clone(), vals).unwrap();
        let gap = weak_identity_gap(
            &u,
            &v,
            &p1.lambda,
            &p2.mu,
            &phi,
            &zeta,
            StressConvention::Standard,
        )
        .unwrap();
        assert!(gap.relative() <= 1e-8, "{gap:?}");
        assert!(gap.lhs.abs() > 1e3 * gap.gap.abs());
    }
    let zero = DisplacementField::zeros(mesh.clone());
    let gap = weak_identity_gap(
        &u,
        &v,
        &p1.lambda,
        &p2.mu,
        &phi,
        &zero,
        StressConvention::Standard,
    )
    .unwrap();
    assert_eq!(gap.gap, 0.0);
}

#[test]
fn weak_identity_rejects_boundary_test_fields() {
    let mesh = disk(0.2);
    let p = constant_pair(&mesh, 1.0, 1.0);
    let u = DisplacementField::from_fn(mesh.clone(), |x| x);
    let phi = ScalarField::constant(mesh.clone(), 0.0);
    assert!(weak_identity_gap(
        &u,
        &u,
        &p.lambda,
        &p.mu,
        &phi,
        &u,
        StressConvention::Standard
    )
    .is_err());
}

#[test]
fn engineering_convention_doubles_the_shear_term() {
    let mesh = disk(0.2);
    let p = constant_pair(&mesh, 0.0, 1.0);
    let a = assemble_with(mesh.clone(), &p, StressConvention::Standard).unwrap();
    let b = assemble_with(mesh.clone(), &p, StressConvention::Engineering).unwrap();
    for (x, y) in a.full.values.iter().zip(&b.full.values) {
        assert!((2.0 * x - y).abs() < 1e-12 * (1.0 + y.abs()));
    }
}

#[test]
fn invalid_coefficients_are_refused() {
    let mesh = disk(0.2);
    let p = constant_pair(&mesh, 1.0, 0.0);
    assert!(matches!(
        assemble(mesh, &p),
        Err(lamestab_core::Error::BudgetViolation(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_is_coercive_on_interior_fields(seed in any::<u64>()) {
        let mesh = disk(0.2);
        let pair = phantom_pair(&mesh, 0.5);
        let sys = assemble(mesh.clone(), &pair).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flags = mesh.boundary_node_flags();
        let vals = (0..mesh.node_count())
            .map(|i| if flags[i] { [0.0, 0.0] } else { [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)] })
            .collect();
        let w = DisplacementField::from_nodal(mesh.clone(), vals).unwrap();
        let e = energy_product(&sys, &w, &w);
        let s = w.strain_l2_norm().powi(2);
        // λ ≥ 0 here, so a(w, w) ≥ min μ ‖∇̂w‖²
        prop_assert!(e >= pair.mu.value_bounds().0 * s * (1.0 - 1e-10));
    }
}
