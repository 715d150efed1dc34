use henon_core::continuation::fit_sqrt_law;
use henon_core::dynamics::{horseshoe_strips, iterate_orbit};
use henon_core::homoclinic::MismatchProblem;
use henon_core::manifold2d::compute_coeffs_2d;
use henon_core::manifold4d::{compute_coeffs_4d, tri_index, tri_len};
use henon_core::{Branch, MapParams2D, MapParams4D, Series2D};
use proptest::prelude::*;
use std::sync::OnceLock;

fn series_2d(branch: Branch) -> &'static Series2D {
    static U: OnceLock<Series2D> = OnceLock::new();
    static S: OnceLock<Series2D> = OnceLock::new();
    let cell = if branch == Branch::Unstable { &U } else { &S };
    cell.get_or_init(|| compute_coeffs_2d(MapParams2D::new(-2.5, 1.0), branch, 100).unwrap())
}

fn params_2d() -> impl Strategy<Value = MapParams2D> {
    (-3.0f64..-2.1, 0.5f64..=1.0).prop_map(|(c, d)| MapParams2D::new(c, d))
}

fn params_4d() -> impl Strategy<Value = MapParams4D> {
    (-3.0f64..-2.3, 0.8f64..=1.0, 0.0f64..0.15).prop_map(|(c, d, b)| MapParams4D::new(c, d, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn planar_inverse_round_trip(p in params_2d(), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let f = p.apply([x, y]).unwrap();
        let back = p.inverse(f).unwrap();
        prop_assert!((back[0] - x).abs() < 1e-11 && (back[1] - y).abs() < 1e-11);
        let g = p.inverse([x, y]).unwrap();
        let fwd = p.apply(g).unwrap();
        prop_assert!((fwd[0] - x).abs() < 1e-11 && (fwd[1] - y).abs() < 1e-11);
    }

    #[test]
    fn coupled_inverse_round_trip(p in params_4d(), z in prop::array::uniform4(-1.0f64..1.0)) {
        let back = p.inverse(p.apply(z).unwrap()).unwrap();
        for i in 0..4 {
            prop_assert!((back[i] - z[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn jacobian_determinants(p in params_4d(), z in prop::array::uniform4(-1.0f64..1.0)) {
        let planar = p.chain();
        let d2 = planar.jacobian([z[0], z[1]]).determinant();
        prop_assert_eq!(d2, p.delta);
        let d4 = p.jacobian(z).determinant();
        prop_assert!((d4 - p.delta * p.delta).abs() < 1e-12 * (1.0 + d4.abs()));
    }

    #[test]
    fn reversor_conjugacy_at_unit_delta(c in -3.0f64..-2.1, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        // f = rho o f^{-1} o rho with rho(x, y) = (y, x)
        let p = MapParams2D::new(c, 1.0);
        let lhs = p.apply([x, y]).unwrap();
        let g = p.inverse([y, x]).unwrap();
        prop_assert!((lhs[0] - g[1]).abs() < 1e-12 && (lhs[1] - g[0]).abs() < 1e-12);
    }

    #[test]
    fn chain_swap_commutes(p in params_4d(), z in prop::array::uniform4(-1.0f64..1.0)) {
        let f = p.apply(z).unwrap();
        let fs = p.apply([z[2], z[3], z[0], z[1]]).unwrap();
        prop_assert_eq!([f[2], f[3], f[0], f[1]], fs);
    }

    #[test]
    fn planar_series_odd(t in -1.6f64..1.6) {
        for br in [Branch::Unstable, Branch::Stable] {
            let s = series_2d(br);
            let (p, q) = (s.eval(t), s.eval(-t));
            prop_assert!((p[0] + q[0]).abs() < 1e-15 && (p[1] + q[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn mismatch_odd_at_unit_delta(tu in -1.5f64..1.5, ts in -1.5f64..1.5) {
        let prob = MismatchProblem::new(
            series_2d(Branch::Unstable).clone(),
            series_2d(Branch::Stable).clone(),
            0,
            0,
            1.6,
        )
        .unwrap();
        let a = prob.mismatch(&[tu, ts]).unwrap();
        let b = prob.mismatch(&[-tu, -ts]).unwrap();
        prop_assert!((a[0] + b[0]).abs() < 1e-14 && (a[1] + b[1]).abs() < 1e-14);
    }

    #[test]
    fn escape_monotone_in_radius(x in -0.8f64..0.8, y in -0.8f64..0.8, r in 2.0f64..100.0) {
        let p = MapParams2D::new(-2.5, 1.0);
        let near = iterate_orbit(&p, &[x, y], 200, r);
        let far = iterate_orbit(&p, &[x, y], 200, 10.0 * r);
        let k1 = near.escape_index.unwrap_or(usize::MAX);
        let k2 = far.escape_index.unwrap_or(usize::MAX);
        prop_assert!(k2 >= k1);
    }

    #[test]
    fn sqrt_law_round_trip(a in 0.05f64..5.0, dc in 0.5f64..0.99, n in 3usize..30) {
        let data: Vec<(f64, f64)> = (1..=n)
            .map(|k| {
                let d = dc + 1e-3 * k as f64;
                (d, a * (d - dc).sqrt())
            })
            .collect();
        let fit = fit_sqrt_law(&data).unwrap();
        prop_assert!((fit.amplitude_a - a).abs() < 1e-6 * a);
        prop_assert!((fit.delta_c - dc).abs() < 1e-9);
        prop_assert_eq!(fit.points_used, n);
    }

    #[test]
    fn triangle_index_is_bijective(order in 1usize..40) {
        let mut seen = vec![false; tri_len(order)];
        for d in 0..=order {
            for m in 0..=d {
                let k = tri_index(d - m, m);
                prop_assert!(!seen[k]);
                seen[k] = true;
            }
        }
        prop_assert!(seen.iter().all(|s| *s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coupled_series_invariants(p in params_4d()) {
        let s = compute_coeffs_4d(p, Branch::Unstable, 15).unwrap();
        let (la, lb) = s.lambdas;
        for d in 0..=15 {
            for m in 0..=d {
                let n = d - m;
                let mu = la.powi(n as i32) * lb.powi(m as i32);
                prop_assert!((s.coeff(1, n, m) - mu * s.coeff(0, n, m)).abs() <= 1e-12 * (1.0 + s.coeff(1, n, m).abs()));
                prop_assert!((s.coeff(3, n, m) - mu * s.coeff(2, n, m)).abs() <= 1e-12 * (1.0 + s.coeff(3, n, m).abs()));
                if d % 2 == 0 {
                    for i in 0..4 {
                        prop_assert_eq!(s.coeff(i, n, m), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn horseshoe_sets_nested(n in 2usize..60, a in 3.0f64..6.0) {
        let sets = horseshoe_strips(a, n).unwrap();
        prop_assert!(sets.both.iter().all(|p| sets.forward.contains(p)));
        prop_assert!(sets.forward.iter().all(|p| sets.square.contains(p)));
    }
}
