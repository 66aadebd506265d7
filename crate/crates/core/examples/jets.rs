//! Mixed partials from nilpotent jets.
use finsler_jet::expr::{seed, Coord, Expr};
use finsler_jet::jet::Scalar;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Expr::parse("y1^3 * sin(x2) + y1*y2", 2)?;
    let (x, y) = ([0.0, 0.5], [2.0, -1.0]);

    // One generator per differentiation; repeating a direction gives a pure
    // higher partial.
    let dirs = [Coord::y(0), Coord::y(0), Coord::x(1)];
    let j = f.eval(&seed(&x, &y, &dirs)?)?;
    println!("value            {}", j.value());
    println!("d/dy1            {}", j.extract(&[0]));
    println!("d2/dy1^2         {}", j.extract(&[0, 1]));
    println!("d3/dy1^2 dx2     {}", j.top());
    println!("expected         {}", 6.0 * y[0] * x[1].cos());
    Ok(())
}
