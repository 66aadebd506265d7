//! Full check run on one entry, rendered and as JSON.
use finsler_jet::checks::CheckKind;
use finsler_jet::registry::registry;
use finsler_jet::report::{run_report, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::from(registry("ex51")?)
        .with_checks(&[CheckKind::Identities, CheckKind::ConformalLaws, CheckKind::SigmaT])
        .with_points(20, 42);
    let report = run_report(&cfg)?;
    print!("{}", report.render());

    let json = report.to_json()?;
    println!("{} bytes of JSON, all hold: {}", json.len(), report.all_hold());
    if let Some(item) = report.item(CheckKind::ConformalLaws, "landsbergLaw") {
        println!("landsbergLaw max residual {:?}", item.max_residual);
    }
    Ok(())
}
