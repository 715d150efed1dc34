use henon_core::exact::{coupled_exact_nonzero, planar_exact_nonzero, QS};
use num_traits::Zero;

#[test]
fn field_arithmetic() {
    let s = QS::new((0, 1), (1, 1));
    assert_eq!(s.clone() * s.clone(), QS::rational(129, 1));
    let x = QS::new((3, 7), (-2, 5));
    let y = QS::new((1, 3), (4, 9));
    assert_eq!((x.clone() / y.clone()) * y.clone(), x);
    assert!((x.clone() - x).is_zero());
}

#[test]
fn planar_defining_equation_exact_to_order_five() {
    assert_eq!(planar_exact_nonzero(5), 0);
}

#[test]
fn planar_defining_equation_exact_to_order_nine() {
    assert_eq!(planar_exact_nonzero(9), 0);
}

#[test]
fn coupled_defining_equation_exact_to_order_five() {
    assert_eq!(coupled_exact_nonzero(5), 0);
}

#[test]
fn oracle_detects_a_perturbed_coefficient() {
    use henon_core::exact::planar_residual;
    use henon_core::manifold2d::recurrence_2d;
    let c = QS::rational(-5, 2);
    let delta = QS::rational(1, 1);
    let lambda = QS::rational(-2, 1);
    let (mut a, b) =
        recurrence_2d(&c, &delta, &lambda, [QS::rational(1, 1), QS::rational(-2, 1)], 5).unwrap();
    a[3] = a[3].clone() + QS::rational(1, 1_000_000);
    let res = planar_residual(&c, &delta, &lambda, &a, &b, 5);
    assert!(res.iter().flatten().any(|x| !x.is_zero()));
}
