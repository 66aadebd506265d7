//! Seeded rejection sampling of admissible points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{MetricSpace, Point};

pub const DEFAULT_SEED: u64 = 42;
pub const MAX_ATTEMPTS: usize = 1_000_000;

/// Draw `count` points uniformly from the domain's coordinate box, keeping
/// only those that satisfy every constraint and where `F > 0`.
pub fn sample_points(space: &MetricSpace, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        if attempts == MAX_ATTEMPTS {
            return Err(Error::EmptySample { attempts });
        }
        attempts += 1;
        let draw = |rng: &mut ChaCha8Rng, r: &[f64; 2]| if r[0] < r[1] { rng.gen_range(r[0]..r[1]) } else { r[0] };
        let x: Vec<f64> = space.domain.x_ranges.iter().map(|r| draw(&mut rng, r)).collect();
        let y: Vec<f64> = space.domain.y_ranges.iter().map(|r| draw(&mut rng, r)).collect();
        let p = Point::new(x, y);
        if space.admits(&p) && space.f(&p).is_ok_and(|f| f > 0.0) {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    #[test]
    fn deterministic_and_admissible() {
        let d = DomainSpec::boxed(2, [-1.0, 1.0], [-1.0, 1.0]).with_constraints(&["y1 - y2"]);
        let s = MetricSpace::new("t", 2, "sqrt(y1^2 + y2^2)", d).unwrap();
        let a = sample_points(&s, 20, 7).unwrap();
        let b = sample_points(&s, 20, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.y[0] - p.y[1] > 1e-3));
        assert_ne!(a, sample_points(&s, 20, 8).unwrap());
    }

    #[test]
    fn impossible_domain_reports_attempts() {
        let d = DomainSpec::boxed(2, [0.0, 1.0], [0.0, 1.0]).with_constraints(&["-1 - y1^2"]);
        let s = MetricSpace::new("t", 2, "sqrt(y1^2 + y2^2)", d).unwrap();
        assert!(matches!(sample_points(&s, 1, 1), Err(Error::EmptySample { .. })));
    }
}
