mod common;

use common::{fd_gap, jet_derivative, richardson, FD_STEP};
use finsler_jet::expr::Coord;
use finsler_jet::registry::{catalogue, registry};
use finsler_jet::sampling::{sample_points, DEFAULT_SEED};

#[test]
fn orders_one_to_three_match_finite_differences() {
    for e in catalogue() {
        let space = e.space().unwrap();
        for p in sample_points(&space, 50, DEFAULT_SEED).unwrap() {
            let gap = fd_gap(&space, &p);
            assert!(gap.iter().all(|g| *g < 1e-5), "{} at {p:?}: {gap:?}", e.name);
        }
    }
}

#[test]
fn second_y_derivative_of_cube() {
    let cube = finsler_jet::expr::Expr::parse("y1^3", 2).unwrap();
    let p = finsler_jet::geometry::Point::new([0.3, 0.0], [1.5, 1.0]);
    let d2 = jet_derivative(&cube, &p, &[Coord::y(0), Coord::y(0)]);
    assert_eq!(d2, 9.0);
    let d3 = jet_derivative(&cube, &p, &[Coord::y(0); 3]);
    assert_eq!(d3, 6.0);
}

/// Full fourth y-derivatives of the 4D quartic metric, each checked by
/// differencing the jet's third derivative once.
#[test]
fn quartic_fourth_derivatives() {
    let space = registry("ex32").unwrap().space().unwrap();
    let dirs = [Coord::y(0), Coord::y(1), Coord::y(2), Coord::y(3)];
    for p in sample_points(&space, 10, DEFAULT_SEED).unwrap() {
        let jet = jet_derivative(&space.metric, &p, &dirs);
        let lower = |q: &finsler_jet::geometry::Point| jet_derivative(&space.metric, q, &dirs[..3]);
        let fd = richardson(&lower, &p, dirs[3], FD_STEP);
        assert!((jet - fd).abs() <= 1e-4 * (1.0 + jet.abs()), "{p:?}: jet {jet}, fd {fd}");
    }
}
