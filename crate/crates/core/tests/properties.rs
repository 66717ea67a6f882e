use proptest::prelude::*;

use wfspline::bernstein::{basis_values, coeff_bounds, decasteljau, num_basis};
use wfspline::geometry::Bary4;
use wfspline::meshgen::perturbed_kuhn;
use wfspline::{build_splits, Located};

fn bary() -> impl Strategy<Value = Bary4> {
    prop::array::uniform4(0.0f64..1.0).prop_filter_map("degenerate", |a| {
        let s: f64 = a.iter().sum();
        (s > 1e-6).then(|| Bary4(a.map(|x| x / s)))
    })
}

proptest! {
    #[test]
    fn basis_is_partition_of_unity(n in 0usize..=6, l in bary()) {
        let mut b = vec![0.0; num_basis(n)];
        basis_values(n, &l, &mut b);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() <= 1e-13);
        prop_assert!(b.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn bernstein_values_stay_in_hull(
        c in prop::collection::vec(-10.0f64..10.0, 20),
        l in bary(),
    ) {
        let (lo, hi) = coeff_bounds(&c);
        let v = decasteljau(3, &c, &l);
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }

    #[test]
    fn decasteljau_is_linear_in_coefficients(
        a in prop::collection::vec(-1.0f64..1.0, 10),
        b in prop::collection::vec(-1.0f64..1.0, 10),
        s in -3.0f64..3.0,
        l in bary(),
    ) {
        let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + s * y).collect();
        let lhs = decasteljau(2, &ab, &l);
        let rhs = decasteljau(2, &a, &l) + s * decasteljau(2, &b, &l);
        prop_assert!((lhs - rhs).abs() <= 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn splits_partition_every_element(seed in 0u64..1000, amp in 0.0f64..0.3) {
        let mesh = perturbed_kuhn(2, 2, 2, amp, seed);
        for s in build_splits(&mesh).unwrap() {
            let v = mesh.volume(s.elem);
            let sum: f64 = s.subtets.iter().map(|g| g.volume).sum();
            prop_assert!((sum - v).abs() <= 1e-12 * v);
            prop_assert!(s.subtets.iter().all(|g| g.volume > 0.0));
        }
    }

    #[test]
    fn located_points_lie_in_their_element(
        seed in 0u64..1000,
        p in prop::array::uniform3(0.0f64..=1.0),
    ) {
        let located = Located::new(perturbed_kuhn(3, 2, 2, 0.15, seed));
        let q = wfspline::Point3::new(p[0], p[1], p[2]);
        let e = located.locate(q).unwrap();
        let l = located.mesh.geometry[e].barycentric(q);
        prop_assert!(l.min() >= -1e-12);
        prop_assert!((located.mesh.geometry[e].point(&l) - q).norm() <= 1e-12);
    }
}
