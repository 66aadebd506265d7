#![allow(dead_code)]

use finsler_jet::expr::{Coord, Coords, Expr};
use finsler_jet::geometry::{MetricSpace, Point, Probe};

pub const FD_STEP: f64 = 1e-4;

fn shifted(p: &Point, c: Coord, t: f64) -> Point {
    let mut q = p.clone();
    match c.axis {
        finsler_jet::expr::Axis::X => q.x[c.index] += t,
        finsler_jet::expr::Axis::Y => q.y[c.index] += t,
    }
    q
}

/// Central difference of `f` along `c` with one Richardson step:
/// `(4 D(h/2) − D(h)) / 3`.
pub fn richardson(f: &dyn Fn(&Point) -> f64, p: &Point, c: Coord, h: f64) -> f64 {
    let d = |h: f64| (f(&shifted(p, c, h)) - f(&shifted(p, c, -h))) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Nested Richardson differences of `f` along every direction in `dirs`.
pub fn nested(f: &dyn Fn(&Point) -> f64, p: &Point, dirs: &[Coord], h: f64) -> f64 {
    match dirs.split_last() {
        None => f(p),
        Some((&last, rest)) => {
            let inner = |q: &Point| nested(f, q, rest, h);
            richardson(&inner, p, last, h)
        }
    }
}

pub fn eval(expr: &Expr, p: &Point) -> f64 {
    expr.eval(&Coords::new(&p.x, &p.y)).expect("metric evaluates inside the domain")
}

pub fn jet_derivative(expr: &Expr, p: &Point, dirs: &[Coord]) -> f64 {
    Probe::plain(expr, p).value::<f64>(dirs).expect("jet evaluates inside the domain")
}

/// All nondecreasing index tuples of length `order` over `n` directions.
pub fn tuples(n: usize, order: usize) -> Vec<Vec<usize>> {
    if order == 0 {
        return vec![vec![]];
    }
    tuples(n, order - 1)
        .into_iter()
        .flat_map(|t| {
            let start = t.last().copied().unwrap_or(0);
            (start..n).map(move |i| {
                let mut u = t.clone();
                u.push(i);
                u
            })
        })
        .collect()
}

/// Worst normalized gap between jet and finite-difference derivatives of
/// `F` at one point, over all y-derivatives of orders 1..=3 and the mixed
/// `x_i y_j` second derivatives.
///
/// Orders one and two difference `F` directly. Third derivatives difference
/// the jet's second derivative once more: differencing `F` three times at the
/// pinned step would lose about `ε/h³ ≈ 1e-4` to rounding alone.
pub fn fd_gap(space: &MetricSpace, p: &Point) -> [f64; 3] {
    let expr = &space.metric;
    let n = space.dim;
    let f = |q: &Point| eval(expr, q);
    let mut worst = [0.0f64; 3];
    for order in 1..=3 {
        let mut jets = Vec::new();
        let mut fds = Vec::new();
        for t in tuples(n, order) {
            let dirs: Vec<Coord> = t.iter().map(|&i| Coord::y(i)).collect();
            jets.push(jet_derivative(expr, p, &dirs));
            fds.push(if order < 3 {
                nested(&f, p, &dirs, FD_STEP)
            } else {
                let (last, rest) = dirs.split_last().unwrap();
                let lower = |q: &Point| jet_derivative(expr, q, rest);
                richardson(&lower, p, *last, FD_STEP)
            });
        }
        if order == 2 {
            for i in 0..n {
                for j in 0..n {
                    let dirs = [Coord::x(i), Coord::y(j)];
                    jets.push(jet_derivative(expr, p, &dirs));
                    fds.push(nested(&f, p, &dirs, FD_STEP));
                }
            }
        }
        let scale = jets.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let gap = jets.iter().zip(&fds).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst[order - 1] = gap / (1.0 + scale);
    }
    worst
}
