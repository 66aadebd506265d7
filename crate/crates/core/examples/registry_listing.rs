//! The built-in example metrics.
use finsler_jet::registry::catalogue;

fn main() {
    for e in catalogue() {
        println!("{} (n = {})", e.name, e.dim);
        println!("  F     = {}", e.metric);
        if let Some(s) = &e.sigma {
            println!("  sigma = {s}");
        }
        for c in &e.expected_claims {
            println!("  claim: {}", c.claim.label());
        }
        for n in &e.notes {
            println!("  note:  {n}");
        }
    }
}
