use proptest::prelude::*;
use wickrot::analysis::phi_weight;
use wickrot::index::{graded_index_exact, mckean_singer_index, residue_pairing_analytic, Unitary, WindingGrid};
use wickrot::linalg::{self, c64, CMat};
use wickrot::models::finite_geometry;
use wickrot::operator::universal_bounds;
use wickrot::{DerivedOperators, TruncatedOperator};

fn matrix(n: usize, m: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * m)
        .prop_map(move |v| CMat::from_fn(n, m, |i, j| c64::new(v[i * m + j].0, v[i * m + j].1)))
}

fn square() -> impl Strategy<Value = CMat> {
    (1usize..10).prop_flat_map(|n| matrix(n, n))
}

fn block() -> impl Strategy<Value = CMat> {
    (1usize..7, 1usize..7).prop_flat_map(|(p, q)| matrix(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wick_square_splits_into_laplacian_and_defect(d in square()) {
        let op = TruncatedOperator::from_matrix(d, "D").unwrap();
        let der = DerivedOperators::new(&op);
        let scale = 1.0 + linalg::op_norm(op.matrix()).powi(2);
        prop_assert!(linalg::hermitian_residual(der.wick_plus.matrix()) <= 1e-13 * scale);
        let e = der.wick_plus.matrix();
        let lhs = e * e;
        let rhs = der.mean_square.matrix() + der.curvature_defect.matrix();
        prop_assert!(linalg::op_norm(&(&lhs - &rhs)) <= 1e-12 * scale);
    }

    #[test]
    fn universal_bounds_hold(d in square()) {
        let op = TruncatedOperator::from_matrix(d, "D").unwrap();
        let b = universal_bounds(&op).unwrap();
        prop_assert!(b.holds(1e-10), "{:?}", b);
    }

    #[test]
    fn phi_is_positive_and_decreasing_on_positive_operators(
        d in (2usize..8).prop_flat_map(|n| (matrix(n, n), matrix(n, n))),
        s in 0.2f64..4.0,
    ) {
        let (d, a) = d;
        let h = CMat::from_fn(d.nrows(), d.ncols(), |i, j| (d[(i, j)] + d[(j, i)].conj()) * 0.5);
        let dop = TruncatedOperator::from_matrix(h, "D").unwrap();
        let t = TruncatedOperator::from_matrix(a.adjoint() * &a, "T").unwrap();
        let lo = phi_weight(&t, &dop, s).unwrap().value;
        let hi = phi_weight(&t, &dop, s + 0.5).unwrap().value;
        prop_assert!(lo >= -1e-12);
        prop_assert!(hi <= lo + 1e-12);
        // the weights never exceed the trace
        let tr: f64 = (0..t.dim()).map(|i| t.matrix()[(i, i)].re).sum();
        prop_assert!(lo <= tr + 1e-10);
    }

    #[test]
    fn graded_trace_is_the_kernel_index(b in block(), deficient in any::<bool>()) {
        let b = if deficient && b.nrows() > 1 {
            // repeat the first row: rank drops when rows outnumber columns
            CMat::from_fn(b.nrows(), b.ncols(), |i, j| b[(if i == 1 { 0 } else { i }, j)])
        } else {
            b
        };
        let m = finite_geometry(&b).unwrap();
        let r = mckean_singer_index(&m, &[0.1, 0.5, 1.0, 2.0]).unwrap();
        prop_assert!(r.spread.unwrap() <= 1e-10);
        prop_assert_eq!(r.pairing, graded_index_exact(&b));
        prop_assert_eq!(r.oracle, Some(graded_index_exact(&b)));
        prop_assert!(r.pass);
    }

    #[test]
    fn winding_pairing_matches_the_degree(m in -4i64..=4) {
        let s_grid: Vec<f64> = (0..30).map(|k| 0.55 + 0.05 * k as f64).collect();
        let r = residue_pairing_analytic(&Unitary::Winding(m), &s_grid, &WindingGrid::default()).unwrap();
        prop_assert!((r.raw + m as f64).abs() <= 1e-10);
        prop_assert_eq!(r.pairing, m);
        prop_assert_eq!(r.oracle, Some(m));
    }
}

#[test]
fn square_block_has_index_zero() {
    let b = CMat::from_fn(3, 3, |i, j| c64::new((i + 2 * j) as f64, 0.0));
    assert_eq!(graded_index_exact(&b), 0);
    let wide = CMat::from_fn(1, 2, |_, j| c64::new(1.0 - j as f64, 0.0));
    assert_eq!(graded_index_exact(&wide), 1);
}
