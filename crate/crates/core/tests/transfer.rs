use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wfspline::analytic::{AnalyticField, Polynomial};
use wfspline::field::Field;
use wfspline::meshgen::{kuhn_grid, perturbed_kuhn, refine_uniform};
use wfspline::msh::{parse_msh, to_msh_string};
use wfspline::transfer::{
    l2_error, mass, project_analytic, transfer_l2, transfer_linear, transfer_wf, QuadMode, SplineMode,
    TransferConfig,
};
use wfspline::{build_splits, Located};

#[test]
fn msh_round_trip_preserves_mesh() {
    let mesh = perturbed_kuhn(2, 3, 2, 0.15, 4);
    let back = parse_msh(&to_msh_string(&mesh)).unwrap();
    assert_eq!(back.tets, mesh.tets);
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        assert!((*a - *b).norm() <= 1e-15);
    }
}

#[test]
fn refinement_keeps_volume() {
    let mesh = perturbed_kuhn(2, 2, 2, 0.15, 9);
    let fine = refine_uniform(&mesh);
    assert_eq!(fine.num_tets(), 8 * mesh.num_tets());
    assert!((fine.total_volume() - 1.0).abs() <= 1e-13);
}

#[test]
fn wf_transfer_reproduces_cubics_at_k3() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = Polynomial::random(3, &mut rng);
    let source_mesh = perturbed_kuhn(2, 2, 2, 0.15, 1);
    let target = perturbed_kuhn(3, 2, 2, 0.15, 2);
    let source = project_analytic(&p, &source_mesh, 3, &QuadMode::Fixed).unwrap();
    let located = Located::new(source_mesh);
    let splits = build_splits(&located.mesh).unwrap();
    let out = transfer_wf(&source, &located, &splits, &target, &TransferConfig::new(3)).unwrap();
    let located_t = Located::new(target);
    let err = l2_error(&out.target.on(&located_t), &p).unwrap();
    assert!(err <= 1e-10, "{err:e}");
}

#[test]
fn global_projection_reproduces_cubics() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = Polynomial::random(3, &mut rng);
    let mesh = perturbed_kuhn(2, 2, 2, 0.15, 3);
    let source = project_analytic(&p, &mesh, 3, &QuadMode::Fixed).unwrap();
    let located = Located::new(mesh);
    let splits = build_splits(&located.mesh).unwrap();
    let spline = wfspline::transfer::build_spline(&source, &located, &splits, SplineMode::GlobalProjection).unwrap();
    let scale = p.terms.iter().map(|(c, _)| c.abs()).sum::<f64>();
    let err = l2_error(&spline, &p).unwrap();
    assert!(err / scale <= 1e-9, "{err:e}");
}

#[test]
fn l2_transfer_conserves_mass_on_nested_meshes() {
    let coarse = kuhn_grid(2, 2, 2);
    let fine = refine_uniform(&coarse);
    let source = project_analytic(&AnalyticField::U1, &coarse, 2, &QuadMode::Fixed).unwrap();
    let located = Located::new(coarse);
    let out = transfer_l2(&source, &located, &fine, 2, &QuadMode::Fixed).unwrap();
    let m0 = source.mass(&located.mesh);
    let m1 = out.mass(&fine);
    assert!((m0 - m1).abs() <= 1e-13, "{m0} {m1}");
}

#[test]
fn linear_transfer_is_exact_for_affine_data() {
    let p = Polynomial::new(vec![(0.5, [0, 0, 0]), (1.0, [1, 0, 0]), (-2.0, [0, 0, 1])]);
    let mesh = perturbed_kuhn(2, 2, 2, 0.15, 7);
    let target = perturbed_kuhn(2, 3, 2, 0.15, 8);
    let source = project_analytic(&p, &mesh, 1, &QuadMode::Fixed).unwrap();
    let located = Located::new(mesh);
    let out = transfer_linear(&source, &located, &target, 1, &QuadMode::Fixed).unwrap();
    let lt = Located::new(target);
    assert!(l2_error(&out.on(&lt), &p).unwrap() <= 1e-12);
}

#[test]
fn quadrature_mass_matches_closed_form() {
    let mesh = perturbed_kuhn(3, 3, 3, 0.15, 1);
    // ∫ x y² over the unit cube
    let p = Polynomial::new(vec![(1.0, [1, 2, 0])]);
    let m = mass(&p, &mesh, &QuadMode::Fixed).unwrap();
    assert!((m - 1.0 / 6.0).abs() <= 1e-14);
    let v = p.value(wfspline::Point3::new(0.5, 0.5, 0.5)).unwrap();
    assert!((v - 0.125).abs() <= 1e-15);
}
