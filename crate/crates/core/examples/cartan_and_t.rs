//! Cartan tensor, its identities and the T-tensor of a registry metric.
use finsler_jet::geometry::{cartan_pack, t_tensor_pack, verify_c_identities};
use finsler_jet::registry::registry;
use finsler_jet::sampling::sample_points;
use finsler_jet::tensor::max_abs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = registry("ex31")?.space()?;
    for p in sample_points(&space, 3, 42)? {
        let c = cartan_pack(&space, &p, 4)?;
        let t = t_tensor_pack(&space, &p, false)?;
        let ids = verify_c_identities(&space, &p)?;
        println!("y = {:.3?}", p.y);
        println!("  max|C_ijk| {:.3e}   C^2 {:.3e}", max_abs(&c.c3), c.c_sq);
        println!("  max|T_ijkh| {:.3e}  T {:.3e}", max_abs(&t.t4), t.t);
        println!("  C identities, worst residual {:.2e}", ids.max());
    }
    Ok(())
}
