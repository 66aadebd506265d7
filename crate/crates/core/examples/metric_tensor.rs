//! Fundamental tensor, its inverse and the angular metric of a Randers metric.
use finsler_jet::geometry::{metric_pack, DomainSpec, MetricSpace, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = MetricSpace::new(
        "randers",
        2,
        "sqrt(y1^2 + y2^2) + y1/2",
        DomainSpec::boxed(2, [-1.0, 1.0], [-1.0, 1.0]),
    )?;
    let p = Point::new([0.0, 0.0], [1.0, 2.0]);
    let m = metric_pack(&space, &p)?;
    println!("F     = {:.12}", m.f);
    println!("l_i   = {:?}", m.l);
    println!("g_ij  =\n{:.6}", m.g);
    println!("g^ij  =\n{:.6}", m.g_inv);
    println!("h_ij  =\n{:.6}", m.h);
    Ok(())
}
