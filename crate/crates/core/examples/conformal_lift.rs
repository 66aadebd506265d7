//! Lift a metric by exp(sigma) and compare the change of every quantity with
//! its closed formula.
use finsler_jet::conformal::{conformal_lift, ConformalPoint};
use finsler_jet::registry::registry;
use finsler_jet::sampling::sample_points;
use finsler_jet::tensor::{max_abs, residual_between};

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join("  ")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let entry = registry("ex51")?;
    let space = entry.space()?;
    let cf = entry.conformal_factor()?.expect("ex51 has a factor");
    let lifted = conformal_lift(&space, &cf)?;
    println!("F    = {}", space.metric);
    println!("Fbar = {}", lifted.metric);

    let p = &sample_points(&space, 1, 42)?[0];
    let cp = ConformalPoint::new(&space, &lifted, &cf, p);
    println!("scaling residuals (l, g, g^-1)  {}", sci(&cp.scaling_residuals()?));
    println!("spray residuals (B1, B2, B3)    {}", sci(&cp.spray_residuals()?));

    let direct = cp.b4_direct()?;
    println!("max|B^i_jkh|                    {:.3e}", max_abs(&direct));
    println!("direct vs formula               {:.2e}", residual_between(&direct, &cp.b4_formula()?));
    println!("direct vs T-form                {:.2e}", residual_between(&direct, &cp.b4_t_form()?));
    println!("Landsberg law residual          {:.2e}", cp.landsberg_law()?);
    let (_, st) = cp.sigma_t()?;
    println!("max|sigma_r T^r_jkh|            {st:.2e}");
    Ok(())
}
