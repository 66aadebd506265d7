use approx::assert_relative_eq;
use proptest::prelude::*;

use finsler_jet::conformal::{conformal_lift, ConformalFactor};
use finsler_jet::expr::{Coord, Coords, Expr};
use finsler_jet::geometry::{DomainSpec, MetricSpace, Point, Probe};
use finsler_jet::jet::{Jet, Scalar};

const ORDER: usize = 3;

fn jet() -> impl Strategy<Value = Jet> {
    prop::collection::vec(-2.0f64..2.0, 1 << ORDER).prop_map(|c| Jet::from_coefficients(&c))
}

fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
    a.coefficients().iter().zip(b.coefficients()).all(|(u, v)| (u - v).abs() <= tol * (1.0 + u.abs().max(v.abs())))
}

/// Smooth expressions over x1, x2, y1, y2 that are defined everywhere.
fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1..=2usize).prop_map(|i| format!("x{i}")),
        (1..=2usize).prop_map(|i| format!("y{i}")),
        (1..9i32).prop_map(|k| format!("{}", k)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (2 + cos({b})))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("atan({a})")),
            inner.clone().prop_map(|a| format!("exp(sin({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("log(2 + cos({a}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = Point> {
    (prop::array::uniform2(-1.0f64..1.0), prop::array::uniform2(-1.0f64..1.0)).prop_map(|(x, y)| Point::new(x, y))
}

fn direction() -> impl Strategy<Value = Coord> {
    prop_oneof![(0..2usize).prop_map(Coord::x), (0..2usize).prop_map(Coord::y)]
}

proptest! {
    #[test]
    fn jet_ring_laws(a in jet(), b in jet(), c in jet()) {
        prop_assert!(close(&(a * b), &(b * a), 1e-12));
        prop_assert!(close(&((a * b) * c), &(a * (b * c)), 1e-12));
        prop_assert!(close(&(a * (b + c)), &(a * b + a * c), 1e-12));
        prop_assert!(close(&(a - a), &Jet::constant_of(0.0), 0.0));
    }

    #[test]
    fn jet_division_inverts_multiplication(a in jet(), b in jet(), shift in 1.0f64..3.0) {
        let b = b + Jet::constant_of(b.value().signum() * shift);
        prop_assert!(close(&((a * b) / b), &a, 1e-10));
    }

    #[test]
    fn exp_and_log_are_inverse(a in jet()) {
        let positive = a + Jet::constant_of(a.value().abs() + 0.5);
        prop_assert!(close(&positive.ln().exp(), &positive, 1e-12));
        prop_assert!(close(&a.exp().ln(), &a, 1e-12));
    }

    #[test]
    fn product_rule_on_first_derivatives(u in -2.0f64..2.0, v in -2.0f64..2.0, du in -2.0f64..2.0, dv in -2.0f64..2.0) {
        let a = Jet::from_coefficients(&[u, du]);
        let b = Jet::from_coefficients(&[v, dv]);
        let p = a * b;
        prop_assert!((p.top() - (du * v + u * dv)).abs() < 1e-14);
    }

    #[test]
    fn parse_print_round_trip(text in expr_text(), p in point()) {
        let e = Expr::parse(&text, 2).unwrap();
        let again = Expr::parse(&e.to_string(), 2).unwrap();
        prop_assert_eq!(&again, &e);
        let at = Coords::new(&p.x, &p.y);
        prop_assert_eq!(e.eval(&at).unwrap(), again.eval(&at).unwrap());
    }

    #[test]
    fn mixed_partials_commute(text in expr_text(), p in point(), dirs in prop::collection::vec(direction(), 2..5)) {
        let e = Expr::parse(&text, 2).unwrap();
        let first = Probe::plain(&e, &p).value::<f64>(&dirs).unwrap();
        let mut reversed = dirs.clone();
        reversed.reverse();
        let second = Probe::plain(&e, &p).value::<f64>(&reversed).unwrap();
        prop_assert!((first - second).abs() <= 1e-10 * (1.0 + first.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jet_value_matches_real_evaluation(text in expr_text(), p in point(), dirs in prop::collection::vec(direction(), 0..4)) {
        let e = Expr::parse(&text, 2).unwrap();
        let real = e.eval(&Coords::new(&p.x, &p.y)).unwrap();
        let seeded = finsler_jet::expr::seed(&p.x, &p.y, &dirs).unwrap();
        let jet = e.eval(&seeded).unwrap();
        prop_assert_eq!(jet.value().to_bits(), real.to_bits());
    }
}

fn lifted_metric(space: &MetricSpace, sigmas: &[&str], p: &Point) -> f64 {
    let mut s = space.clone();
    for text in sigmas {
        s = conformal_lift(&s, &ConformalFactor::new(text, space.dim).unwrap()).unwrap();
    }
    s.metric.eval(&Coords::new(&p.x, &p.y)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifts_compose_additively(a in -1.0f64..1.0, b in -1.0f64..1.0, p in point()) {
        prop_assume!(p.y.iter().any(|v| v.abs() > 0.1));
        let space = MetricSpace::new(
            "randers",
            2,
            "sqrt(y1^2 + y2^2) + y1/3",
            DomainSpec::boxed(2, [-1.0, 1.0], [-1.0, 1.0]),
        )
        .unwrap();
        let s1 = format!("{a} * x1");
        let s2 = format!("{b} * sin(x2)");
        let sum = format!("{a} * x1 + {b} * sin(x2)");
        let twice = lifted_metric(&space, &[&s1, &s2], &p);
        let once = lifted_metric(&space, &[&sum], &p);
        assert_relative_eq!(twice, once, max_relative = 1e-13);
    }
}
