//! Spray coefficients, Berwald and Landsberg tensors.
use finsler_jet::geometry::{berwald_tensor, landsberg_tensor, spray_pack, DomainSpec, MetricSpace, Point};
use finsler_jet::tensor::max_abs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Conformally flat Riemannian metric: quadratic spray, no Berwald tensor.
    let riem = MetricSpace::new(
        "conformally flat",
        2,
        "exp(x2) * sqrt(y1^2 + y2^2)",
        DomainSpec::boxed(2, [-1.0, 1.0], [-1.0, 1.0]),
    )?;
    // Randers metric with x-dependent drift: not Berwald.
    let randers = MetricSpace::new(
        "randers",
        2,
        "sqrt(y1^2 + y2^2) + x1*y2/4",
        DomainSpec::boxed(2, [-1.0, 1.0], [-1.0, 1.0]),
    )?;
    let p = Point::new([0.3, 0.2], [1.0, 0.5]);
    for space in [&riem, &randers] {
        let s = spray_pack(space, &p)?;
        let g = berwald_tensor(space, &p)?;
        let l = landsberg_tensor(space, &p)?;
        println!("{}", space.name);
        println!("  G^i           {:.6?}", s.g);
        println!("  max|G^i_jkh|  {:.3e}", max_abs(&g.g4));
        println!("  max|L_jkh|    {:.3e}", max_abs(&l.l));
    }
    Ok(())
}
