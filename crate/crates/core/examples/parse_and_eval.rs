//! Parse a metric string, print it back, evaluate it.
use finsler_jet::expr::{Coords, Expr};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Expr::parse("sqrt(y1^2 + y2^2) * exp(x1) + y1/3", 2)?;
    println!("parsed:  {f}");

    let at = Coords::new(&[0.0, 1.0], &[3.0, 4.0]);
    println!("F(x=(0,1), y=(3,4)) = {}", f.eval(&at)?);

    // Domain errors name the offending subexpression.
    let bad = Expr::parse("log(y1 - y2)", 2)?;
    if let Err(e) = bad.eval(&at) {
        println!("error:   {e}");
    }
    Ok(())
}
