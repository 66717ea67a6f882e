use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use wfspline::analytic::AnalyticField;
use wfspline::bernstein::{decasteljau, num_basis};
use wfspline::coefficients::{compute_macro_coefficients, HermiteData};
use wfspline::geometry::{Bary4, Point3};
use wfspline::meshgen::{sequence_mesh, Role};
use wfspline::quadrature::{integrate_adaptive, rule_56, AdaptiveConfig};
use wfspline::smoothing::{build_edge_frames, element_frames};
use wfspline::transfer::{project_analytic, transfer_wf};
use wfspline::{build_splits, Located, QuadMode, TransferConfig};

fn kernels(c: &mut Criterion) {
    let coeffs: Vec<f64> = (0..num_basis(3)).map(|i| (i as f64).sin()).collect();
    let l = Bary4([0.1, 0.2, 0.3, 0.4]);
    c.bench_function("decasteljau_cubic", |b| {
        b.iter(|| decasteljau(3, black_box(&coeffs), black_box(&l)))
    });

    let mesh = sequence_mesh(Role::Source, 1, 1);
    let splits = build_splits(&mesh).unwrap();
    let frames = build_edge_frames(&mesh);
    let s = &splits[17];
    let data = HermiteData::from_function(&s.verts, element_frames(&mesh, &frames, 17), |p| {
        AnalyticField::U1.eval_point(p)
    });
    c.bench_function("macro_coefficients", |b| {
        b.iter(|| compute_macro_coefficients(black_box(s), black_box(&data)))
    });
    c.bench_function("build_splits_grid1", |b| b.iter(|| build_splits(black_box(&mesh))));

    let located = Located::new(mesh.clone());
    let p = Point3::new(0.31, 0.47, 0.73);
    c.bench_function("bvh_locate", |b| b.iter(|| located.locate(black_box(p))));

    let g = &mesh.geometry[5];
    let u1 = |q: Point3| AnalyticField::U1.eval_point(q).0;
    c.bench_function("rule_56", |b| b.iter(|| rule_56().integrate(black_box(g), u1)));
    c.bench_function("adaptive_u1", |b| {
        b.iter(|| integrate_adaptive(u1, black_box(g), &AdaptiveConfig::default()))
    });

    let target = sequence_mesh(Role::Target, 1, 1);
    let source = project_analytic(&AnalyticField::U1, &mesh, 1, &QuadMode::Fixed).unwrap();
    let mut group = c.benchmark_group("transfer");
    group.sample_size(10);
    group.bench_function("wf_grid1_k1", |b| {
        b.iter(|| transfer_wf(&source, &located, &splits, &target, &TransferConfig::new(1)).unwrap().target)
    });
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
