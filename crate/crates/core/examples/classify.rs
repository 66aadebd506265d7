//! Pointwise classification of registry metrics and their lifts.
use finsler_jet::classify::{classify_point, Tier};
use finsler_jet::conformal::conformal_lift;
use finsler_jet::registry::registry;
use finsler_jet::sampling::sample_points;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tier::Default.tolerance();
    for name in ["euclidean3", "ex31", "ex51", "ex53"] {
        let entry = registry(name)?;
        let space = entry.space()?;
        let lifted = match entry.conformal_factor()? {
            Some(cf) => Some(conformal_lift(&space, &cf)?),
            None => None,
        };
        for p in sample_points(&space, 2, 7)? {
            let c = classify_point(&space, &p, tol)?;
            print!(
                "{name:<11} riemannian {:<5} berwald {:<5} landsberg {:<5}",
                c.riemannian.holds, c.berwald.holds, c.landsberg.holds
            );
            if let Some(l) = &lifted {
                let cl = classify_point(l, &p, tol)?;
                print!(" | lifted berwald {:<5} landsberg {:<5}", cl.berwald.holds, cl.landsberg.holds);
            }
            println!();
        }
    }
    Ok(())
}
