use proptest::prelude::*;

use wlod::assembly::{assemble_singular_rhs, assemble_stiffness};
use wlod::coefficients::CoefficientField;
use wlod::correctors::{build_global_basis, PatchSystem, WeightedForms};
use wlod::experiments::{run, ExperimentConfig, RawConfig};
use wlod::geometry::{Point2, SingularSet, WeightSpec};
use wlod::linalg::{dot, CgOptions};
use wlod::mesh::{patch, MeshHierarchy, MeshLevel};
use wlod::quadrature::{QuadParams, WeightedQuadrature};
use wlod::quasi_interp::build_interpolation;

type PlaneMap = fn(f64, f64) -> (f64, f64);

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn interior_node(mesh: &MeshLevel<f64>, pick: usize) -> usize {
    let nodes = mesh.interior_nodes();
    nodes[pick % nodes.len()]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn triangles_have_exact_area(level in 0u32..7) {
        let mesh = MeshLevel::<f64>::build(level).unwrap();
        let want = 2f64.powi(-2 * level as i32 - 1);
        for t in 0..mesh.num_triangles() {
            prop_assert_eq!(mesh.area(t), want);
        }
        for (v, x) in mesh.nodes().iter().enumerate() {
            let on_boundary = x.x == 0.0 || x.x == 1.0 || x.y == 0.0 || x.y == 1.0;
            prop_assert_eq!(mesh.is_interior(v), !on_boundary);
        }
    }

    #[test]
    fn patches_grow_and_saturate(level in 1u32..5, pick in 0usize..1000) {
        let mesh = MeshLevel::<f64>::build(level).unwrap();
        let v = interior_node(&mesh, pick);
        let mut prev = patch(&mesh, v, 0).unwrap();
        prop_assert_eq!(prev.elements.len(), 6);
        for k in 1..=mesh.cells_per_side() * 2 {
            let next = patch(&mesh, v, k).unwrap();
            prop_assert!(prev.elements.iter().all(|t| next.contains(*t)));
            prev = next;
        }
        prop_assert_eq!(prev.elements.len(), mesh.num_triangles());
    }

    #[test]
    fn children_areas_sum_to_parent(coarse in 0u32..4, extra in 1u32..3) {
        let hier = MeshHierarchy::<f64>::build(coarse, coarse + extra).unwrap();
        for ct in 0..hier.coarse().num_triangles() {
            let sum: f64 = hier.children(ct).iter().map(|&f| hier.fine().area(f)).sum();
            prop_assert!(rel(sum, hier.coarse().area(ct)) <= 1e-14);
        }
    }

    #[test]
    fn prolongation_reproduces_linear_functions(
        coarse in 0u32..4,
        extra in 1u32..3,
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        c in -2.0f64..2.0,
    ) {
        let hier = MeshHierarchy::<f64>::build(coarse, coarse + extra).unwrap();
        let f = |p: &Point2<f64>| a + b * p.x + c * p.y;
        let vc: Vec<f64> = hier.coarse().nodes().iter().map(f).collect();
        let vf = hier.prolong(&vc);
        for (x, y) in hier.fine().nodes().iter().zip(&vf) {
            prop_assert!((f(x) - y).abs() <= 1e-13);
        }
    }

    #[test]
    fn weighted_integrals_respect_square_symmetry(
        tri in prop::array::uniform3((0.05f64..0.95, 0.05f64..0.95)),
        beta in -0.9f64..0.9,
    ) {
        let tri = tri.map(|(x, y)| Point2::new(x, y));
        let area = ((tri[1].x - tri[0].x) * (tri[2].y - tri[0].y) - (tri[2].x - tri[0].x) * (tri[1].y - tri[0].y)).abs();
        prop_assume!(area > 1e-3);
        let lambda = SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap();
        let q = WeightedQuadrature::new(WeightSpec::new(lambda, beta).unwrap(), QuadParams::default()).unwrap();
        let base = q.integrate(&tri, |_| 1.0);
        let maps: [PlaneMap; 7] = [
            |x, y| (1.0 - x, y),
            |x, y| (x, 1.0 - y),
            |x, y| (1.0 - x, 1.0 - y),
            |x, y| (y, x),
            |x, y| (1.0 - y, x),
            |x, y| (y, 1.0 - x),
            |x, y| (1.0 - y, 1.0 - x),
        ];
        for m in maps {
            let image = tri.map(|p| {
                let (x, y) = m(p.x, p.y);
                Point2::new(x, y)
            });
            prop_assert!(rel(q.integrate(&image, |_| 1.0), base) <= 1e-12);
        }
    }

    #[test]
    fn graded_quadrature_is_stable_under_refinement(beta in -0.95f64..-0.05, x in 0.1f64..0.9, y in 0.1f64..0.9) {
        let tri = [Point2::new(0.5, 0.5), Point2::new(0.625, 0.5), Point2::new(0.5, 0.625)];
        let g = |x: Point2<f64>| 1.0 + x.x * x.y;
        let deeper = QuadParams { depth: QuadParams::default().depth + 2, ..QuadParams::default() };
        for p in [Point2::new(0.5 + x * 0.06, 0.5 + y * 0.06), Point2::new(0.5 + x * 0.125, 0.5 - 0.002 * y)] {
            let w = WeightSpec::new(SingularSet::point(p, 1.0).unwrap(), beta).unwrap();
            let coarse = WeightedQuadrature::new(w.clone(), QuadParams::default()).unwrap();
            let fine = WeightedQuadrature::new(w, deeper.clone()).unwrap();
            prop_assert!(rel(coarse.integrate(&tri, g), fine.integrate(&tri, g)) <= 1e-5);
        }
    }

    #[test]
    fn oscillatory_field_is_periodic(x in 0.0f64..0.9, y in 0.0f64..0.9) {
        let eps = 1.0 / 32.0;
        let a = CoefficientField::oscillatory(eps).unwrap();
        let v = a.evaluate(Point2::new(x, y));
        prop_assert!((a.evaluate(Point2::new(x + 2.0 * eps, y)) - v).abs() <= 1e-12);
        prop_assert!((a.evaluate(Point2::new(x, y + 2.0 * eps)) - v).abs() <= 1e-12);
        let (lo, hi) = a.bounds();
        prop_assert!(lo <= v && v <= hi);
    }

    #[test]
    fn weighted_stiffness_is_spd(beta in -0.9f64..0.9, seed in any::<u64>()) {
        let mesh = MeshLevel::<f64>::build(3).unwrap();
        let w = WeightSpec::new(SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap(), beta).unwrap();
        let field = CoefficientField::oscillatory(1.0 / 32.0).unwrap();
        let k = assemble_stiffness(&mesh, &field, Some(&w), &QuadParams::default()).unwrap();
        prop_assert!(k.symmetry_defect() <= 1e-12);
        let free = mesh.interior_nodes();
        let mut state = seed;
        let mut x = vec![0.0; mesh.num_nodes()];
        for &i in free {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            x[i] = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        }
        prop_assert!(dot(&x, &k.mul_vec(&x)) > 0.0);
    }

    #[test]
    fn rhs_total_mass(
        px in 0.01f64..0.99, py in 0.01f64..0.99, f in -3.0f64..3.0,
        qx in 0.01f64..0.99, qy in 0.01f64..0.99,
    ) {
        let mesh = MeshLevel::<f64>::build(4).unwrap();
        let (p, q) = (Point2::new(px, py), Point2::new(qx, qy));
        let b = assemble_singular_rhs(&mesh, &SingularSet::point(p, f).unwrap());
        prop_assert!((b.iter().sum::<f64>() - f).abs() <= 1e-12);
        prop_assume!(p.dist(q) > 1e-3);
        let b = assemble_singular_rhs(&mesh, &SingularSet::segment(p, q, f).unwrap());
        prop_assert!((b.iter().sum::<f64>() - f * p.dist(q)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn interpolation_is_a_local_projection(beta in -0.9f64..0.9, px in 0.2f64..0.8, py in 0.2f64..0.8) {
        let hier = MeshHierarchy::<f64>::build(2, 4).unwrap();
        let w = WeightSpec::new(SingularSet::point(Point2::new(px, py), 1.0).unwrap(), beta).unwrap();
        let op = build_interpolation(&hier, Some(&w), &QuadParams::default()).unwrap();
        let nc = hier.coarse().interior_nodes().len();
        for k in 0..nc {
            let mut e = vec![0.0; nc];
            e[k] = 1.0;
            let back = op.apply(&hier.prolong_free(&e)).unwrap();
            for (i, x) in back.iter().enumerate() {
                prop_assert!((x - e[i]).abs() <= 1e-10);
            }
            let omega = patch(hier.coarse(), op.nodes()[k], 0).unwrap();
            for &f in &op.row(k).indices {
                prop_assert!(hier.fine().elements_of(f).iter().any(|&t| omega.contains(hier.element_parent(t))));
            }
        }
    }

    #[test]
    fn correctors_satisfy_constraints_and_stay_local(
        beta in -0.5f64..0.5,
        pick in 0usize..100,
        k in 1usize..3,
        j_pick in 0usize..7,
    ) {
        let hier = MeshHierarchy::<f64>::build(3, 5).unwrap();
        let field = CoefficientField::oscillatory(1.0 / 32.0).unwrap();
        let w = WeightSpec::new(SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap(), beta).unwrap();
        let forms = WeightedForms::new(&hier, &field, Some(&w), &QuadParams::default()).unwrap();
        let coarse = hier.coarse();
        let v = interior_node(coarse, pick);
        let sys = PatchSystem::new(&hier, &forms, v, Some(k)).unwrap();
        let mut js: Vec<usize> = coarse.elements_of(v).iter().flat_map(|&t| coarse.triangles()[t]).collect();
        js.sort_unstable();
        js.dedup();
        let mut hat = vec![0.0; coarse.num_nodes()];
        hat[js[j_pick % js.len()]] = 1.0;
        let q = sys.solve_rhs(&sys.rhs(&hier, &forms, &hat), &CgOptions::with_tol(1e-11)).unwrap();
        let mut full = vec![0.0; hier.fine().num_nodes()];
        for (i, x) in q.indices.iter().zip(&q.values) {
            full[*i] = *x;
            prop_assert!(hier.fine().elements_of(*i).iter().all(|&t| sys.patch.contains(hier.element_parent(t))));
        }
        let scale = q.values.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        for &c in &sys.patch.constraint_nodes {
            let r = forms.interpolation.row(coarse.free_index(c).unwrap());
            let row_scale: f64 = r.values.iter().map(|x| x.abs()).sum();
            prop_assert!(r.dot_dense(&full).abs() <= 1e-8 * row_scale * scale);
        }
    }
}

#[test]
fn global_correctors_are_orthogonal_to_fine_scales() {
    let hier = MeshHierarchy::<f64>::build(2, 4).unwrap();
    let field = CoefficientField::oscillatory(1.0 / 32.0).unwrap();
    let w = WeightSpec::new(SingularSet::point(Point2::new(0.5, 0.5), 1.0).unwrap(), 0.3).unwrap();
    let forms = WeightedForms::new(&hier, &field, Some(&w), &QuadParams::default()).unwrap();
    let basis = build_global_basis(&hier, &forms, &CgOptions::with_tol(1e-13)).unwrap();
    let sys = PatchSystem::new(&hier, &forms, hier.coarse().interior_nodes()[0], None).unwrap();
    let nf = hier.fine().num_nodes();
    let energy = |x: &[f64]| dot(x, &forms.stiffness.mul_vec(x)).sqrt();
    let mut state = 7u64;
    for _ in 0..10 {
        let mut local: Vec<f64> = (0..sys.dofs.len())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        sys.constraints.project(&mut local);
        let mut wf = vec![0.0; nf];
        for (i, x) in sys.dofs.iter().zip(&local) {
            wf[*i] = *x;
        }
        let kw = forms.stiffness.mul_vec(&wf);
        for ms in &basis.ms_basis {
            let mut m = vec![0.0; nf];
            for (i, x) in ms.indices.iter().zip(&ms.values) {
                m[*i] = *x;
            }
            assert!(dot(&m, &kw).abs() <= 1e-8 * energy(&m) * energy(&wf));
        }
    }
}

fn raw(pairs: &[(&str, &str)]) -> RawConfig {
    let mut r = RawConfig::default();
    for (k, v) in pairs {
        r.set(k, v).unwrap();
    }
    r
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rejected_exponents_name_the_interval(alpha in prop_oneof![-3.0f64..0.0, 1.0f64..3.0]) {
        let a = alpha.to_string();
        let err = ExperimentConfig::from_raw(&raw(&[("command", "convergence"), ("alpha", &a)])).unwrap_err();
        prop_assert_eq!(err.exit_code(), 2);
        prop_assert!(err.to_string().contains("(0, 1)"), "{}", err);
    }

    #[test]
    fn admissible_exponents_are_accepted(alpha in 0.01f64..0.99, beta in -0.99f64..0.99) {
        let (a, b) = (alpha.to_string(), beta.to_string());
        prop_assert!(ExperimentConfig::from_raw(&raw(&[("command", "convergence"), ("alpha", &a)])).is_ok());
        prop_assert!(ExperimentConfig::from_raw(&raw(&[("command", "decay"), ("beta", &b)])).is_ok());
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let cfg = ExperimentConfig::from_raw(&raw(&[
            ("command", "interp-check"),
            ("beta", "-0.5,0.5"),
            ("H", "2^-2"),
            ("h", "2^-4"),
            ("samples", "5"),
            ("seed", "11"),
            ("output", out.to_str().unwrap()),
        ]))
        .unwrap();
        run(&cfg).unwrap();
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
