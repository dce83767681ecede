use nalgebra::DMatrix;
use proptest::prelude::*;

use lattice_decomp::{FundamentalDomain, Lattice};

fn generator(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-0.3f64..0.3, n * n).prop_map(move |e| {
        let mut b = DMatrix::from_vec(n, n, e);
        for i in 0..n {
            b[(i, i)] += 1.0;
        }
        b
    })
}

fn point(n: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, n)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Closest point by scanning a coefficient box around Babai rounding.
/// Returns `None` when the box is not provably large enough.
fn brute_closest(b: &DMatrix<f64>, x: &[f64]) -> Option<(Vec<i64>, f64)> {
    let n = x.len();
    let inv = b.clone().try_inverse()?;
    let xv = nalgebra::DVector::from_column_slice(x);
    let c0: Vec<i64> = (inv.clone() * &xv)
        .iter()
        .map(|t| t.round() as i64)
        .collect();
    let p0 = b * nalgebra::DVector::from_iterator(n, c0.iter().map(|&c| c as f64));
    let r = (xv - p0).norm();
    let w = (0..n)
        .map(|i| (inv.row(i).norm() * 2.0 * r).ceil() as i64 + 1)
        .max()
        .unwrap();
    if w > 4 {
        return None;
    }
    let mut best: Option<(Vec<i64>, f64)> = None;
    let mut off = vec![-w; n];
    loop {
        let c: Vec<i64> = c0.iter().zip(&off).map(|(a, o)| a + o).collect();
        let p = b * nalgebra::DVector::from_iterator(n, c.iter().map(|&v| v as f64));
        let d = dist2(p.as_slice(), x);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((c, d));
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if off[i] < w {
                off[i] += 1;
                break;
            }
            off[i] = -w;
        }
    }
}

#[test]
fn tiling_bitwise_on_exact_subtractions() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let left = FundamentalDomain::interval(0.0, 1.0).unwrap();
    let centered = FundamentalDomain::centered_interval(1.0).unwrap();
    let dyadic = FundamentalDomain::centered_interval(0.25).unwrap();
    for _ in 0..10_000 {
        let x: f64 = rng.random_range(-1e4..1e4);
        for d in [&centered, &dyadic] {
            let (y, q) = d.decompose_point(&[x]).unwrap();
            assert_eq!(y[0] + q.coords[0], x);
        }
        let (y, q) = left.decompose_point(&[x.abs()]).unwrap();
        assert_eq!(y[0] + q.coords[0], x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tiling_within_one_ulp(b in generator(2), x in point(2, 50.0)) {
        let d = FundamentalDomain::basis_parallelotope(Lattice::new(b).unwrap());
        let (y, q) = d.decompose_point(&x).unwrap();
        for i in 0..2 {
            let scale = x[i].abs().max(q.coords[i].abs());
            prop_assert!((y[i] + q.coords[i] - x[i]).abs() <= scale * f64::EPSILON);
        }
    }

    #[test]
    fn parallelotope_membership_and_periodicity(
        b in generator(3),
        x in point(3, 20.0),
        shift in prop::collection::vec(-15i64..15, 3),
    ) {
        let l = Lattice::new(b).unwrap();
        let d = FundamentalDomain::basis_parallelotope(l.clone());
        let (y, q) = d.decompose_point(&x).unwrap();
        let t = l.basis_coordinates(&y);
        prop_assert!(t.iter().all(|v| (0.0..1.0).contains(v)));
        let lam = l.point(&shift);
        let moved: Vec<f64> = x.iter().zip(&lam.coords).map(|(a, b)| a + b).collect();
        let (y2, q2) = d.decompose_point(&moved).unwrap();
        prop_assert!(dist2(&y, &y2).sqrt() <= 1e-9);
        let expect: Vec<i64> = q.coeffs.iter().zip(&shift).map(|(a, b)| a + b).collect();
        prop_assert_eq!(q2.coeffs, expect);
    }

    #[test]
    fn interval_membership_and_periodicity(
        a in 0.1f64..5.0,
        left in -3.0f64..3.0,
        x in -100.0f64..100.0,
        k in -50i64..50,
    ) {
        let d = FundamentalDomain::interval(left, a).unwrap();
        let (y, q) = d.decompose_point(&[x]).unwrap();
        prop_assert!(y[0] >= left && y[0] < left + a);
        let (y2, q2) = d.decompose_point(&[x + a * k as f64]).unwrap();
        prop_assert!((y[0] - y2[0]).abs() <= 1e-9);
        prop_assert_eq!(q2.coeffs[0], q.coeffs[0] + k);
    }

    #[test]
    fn voronoi_membership(b in generator(2), x in point(2, 10.0)) {
        let l = Lattice::new(b).unwrap();
        let d = FundamentalDomain::voronoi(l.clone()).unwrap();
        let y = d.wrap_point(&x).unwrap();
        let r = 2.0 * (0..2).map(|j| l.column_norm(j)).fold(0.0, f64::max);
        let origin = dist2(&y, &[0.0, 0.0]);
        for p in l.enumerate_points(&y, r + origin.sqrt()).unwrap() {
            prop_assert!(dist2(&y, &p.coords) >= origin - 1e-9);
        }
    }
}

fn voronoi_vs_brute(n: usize) {
    let checked = std::cell::Cell::new(0usize);
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig {
        cases: 3000,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    runner
        .run(&(generator(n), point(n, 10.0)), |(b, x)| {
            let Some((_, best)) = brute_closest(&b, &x) else {
                return Ok(());
            };
            checked.set(checked.get() + 1);
            let d = FundamentalDomain::voronoi(Lattice::new(b).unwrap()).unwrap();
            let q = d.quantize_point(&x).unwrap();
            prop_assert!((dist2(&q.coords, &x) - best).abs() <= 1e-9);
            Ok(())
        })
        .unwrap();
    assert!(
        checked.get() >= 1000,
        "only {} inputs checked",
        checked.get()
    );
}

#[test]
fn voronoi_matches_brute_force_1d() {
    voronoi_vs_brute(1);
}

#[test]
fn voronoi_matches_brute_force_2d() {
    voronoi_vs_brute(2);
}

#[test]
fn voronoi_matches_brute_force_3d() {
    voronoi_vs_brute(3);
}

#[test]
fn voronoi_matches_brute_force_4d() {
    voronoi_vs_brute(4);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn enumeration_is_complete(b in generator(2), c in point(2, 3.0), r in 0.5f64..4.0) {
        let l = Lattice::new(b.clone()).unwrap();
        let mut got: Vec<Vec<i64>> = l
            .enumerate_points(&c, r)
            .unwrap()
            .into_iter()
            .map(|p| p.coeffs)
            .collect();
        got.sort();
        let mut want = Vec::new();
        for i in -20i64..=20 {
            for j in -20i64..=20 {
                let p = l.point(&[i, j]);
                if dist2(&p.coords, &c) <= r * r {
                    want.push(vec![i, j]);
                }
            }
        }
        prop_assert_eq!(got, want);
    }

    #[test]
    fn covolume_scales(b in generator(3), a in 0.1f64..4.0) {
        let l = Lattice::new(b.clone()).unwrap();
        let s = l.scaled(a).unwrap();
        prop_assert!((s.covolume() - a.powi(3) * l.covolume()).abs() <= 1e-12 * s.covolume().max(1.0));
        prop_assert!((l.covolume() - b.determinant().abs()).abs() <= 1e-12);
    }

    #[test]
    fn lattice_points_match_coefficients(b in generator(3), c in prop::collection::vec(-1000i64..1000, 3)) {
        let l = Lattice::new(b.clone()).unwrap();
        let p = l.point(&c);
        let v = &b * nalgebra::DVector::from_iterator(3, c.iter().map(|&x| x as f64));
        for i in 0..3 {
            prop_assert!((p.coords[i] - v[i]).abs() <= 1e-9);
        }
    }
}
