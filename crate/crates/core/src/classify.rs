//! Pointwise classification flags and special-form residuals.

use ndarray::{ArrayD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::geometry::{LocalGeometry, MetricSpace, Point};
use crate::linalg::{is_positive_definite, min_eigenvalue};
use crate::tensor::{max_abs, normalized, residual_between};

/// Tolerance tiers for "holds" verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Tier {
    Strict,
    Default,
    Loose,
}

impl Tier {
    pub fn tolerance(self) -> f64 {
        match self {
            Tier::Strict => 1e-10,
            Tier::Default => 1e-8,
            Tier::Loose => 1e-6,
        }
    }

    /// Tightest tier a residual passes, if any.
    pub fn of(residual: f64) -> Option<Tier> {
        [Tier::Strict, Tier::Default, Tier::Loose]
            .into_iter()
            .find(|t| residual < t.tolerance())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub residual: f64,
    pub holds: bool,
}

impl Flag {
    fn below(residual: f64, tol: f64) -> Self {
        Flag {
            residual,
            holds: residual < tol,
        }
    }
}

/// Special algebraic forms. `None` marks a residual that is undefined at the
/// point (vanishing `C²`, or dimension two for the S₃-like form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpecialForms {
    pub c_reducible: f64,
    pub c2_like: Option<f64>,
    pub s3_like: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointClassification {
    pub point: Point,
    /// Residual is `max|C_ijk|` against the metric scale.
    pub riemannian: Flag,
    pub berwald: Flag,
    pub landsberg: Flag,
    /// Residual is the smallest eigenvalue of `g`.
    pub positive_definite: Flag,
    pub special: SpecialForms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationRecord {
    pub points: Vec<PointClassification>,
    pub seed: Option<u64>,
    pub tolerance: f64,
}

impl ClassificationRecord {
    pub fn new(points: Vec<PointClassification>, seed: Option<u64>, tolerance: f64) -> Self {
        ClassificationRecord { points, seed, tolerance }
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// Whether a flag holds at every point of the sample.
    pub fn holds_everywhere(&self, flag: impl Fn(&PointClassification) -> Flag) -> bool {
        self.points.iter().all(|p| flag(p).holds)
    }

    pub fn worst(&self, flag: impl Fn(&PointClassification) -> Flag) -> f64 {
        self.points.iter().map(|p| flag(p).residual).fold(0.0, f64::max)
    }
}

pub fn classify_point(space: &MetricSpace, p: &Point, tol: f64) -> Result<PointClassification> {
    Ok(classify_geometry(&LocalGeometry::new(space, p), tol)?)
}

pub(crate) fn classify_geometry(geo: &LocalGeometry, tol: f64) -> Result<PointClassification, GeometryError> {
    let m = geo.metric()?;
    let c3 = geo.c3()?;
    let riemannian = normalized(max_abs(c3), max_abs(&m.g));
    let g_conn = &geo.spray()?.g_conn;
    let g4 = geo.berwald()?;
    let berwald = normalized(max_abs(g4), max_abs(g_conn));
    // L is F ℓ_i G^i_jkh / 2, so its reference carries the same factor
    let l_scale = 0.5 * m.f * max_abs(&m.l) * max_abs(g_conn);
    let landsberg = normalized(max_abs(&geo.landsberg()?), l_scale);
    let lambda = min_eigenvalue(&m.g);
    Ok(PointClassification {
        point: geo.point().clone(),
        riemannian: Flag::below(riemannian, tol),
        berwald: Flag::below(berwald, tol),
        landsberg: Flag::below(landsberg, tol),
        positive_definite: Flag {
            residual: lambda,
            holds: is_positive_definite(&m.g),
        },
        special: special_forms(geo)?,
    })
}

/// Below this `C²` the C₂-like quotient is not formed.
pub const C_SQ_FLOOR: f64 = 1e-14;

pub fn special_form_residuals(space: &MetricSpace, p: &Point) -> Result<SpecialForms> {
    Ok(special_forms(&LocalGeometry::new(space, p))?)
}

pub(crate) fn special_forms(geo: &LocalGeometry) -> Result<SpecialForms, GeometryError> {
    let n = geo.dim();
    let m = geo.metric()?;
    let h = &m.h;
    let tp = geo.t_pack()?;

    let k = tp.t / ((n * n - 1) as f64);
    let t_red = ArrayD::from_shape_fn(IxDyn(&[n; 4]), |ix| {
        let (a, i, j, l) = (ix[0], ix[1], ix[2], ix[3]);
        k * (h[[a, i]] * h[[j, l]] + h[[i, j]] * h[[a, l]] + h[[j, a]] * h[[i, l]])
    });
    let c_reducible = residual_between(&tp.t4, &t_red);

    let cp = geo.cartan(3)?;
    let c2_like = (cp.c_sq.abs() >= C_SQ_FLOOR).then(|| {
        let c = &cp.c1;
        let form = ArrayD::from_shape_fn(IxDyn(&[n; 3]), |ix| c[ix[0]] * c[ix[1]] * c[ix[2]] / cp.c_sq);
        residual_between(&cp.c3, &form)
    });

    let v = geo.v_curvature()?;
    let s3_like = v.rho.map(|rho| {
        let form = ArrayD::from_shape_fn(IxDyn(&[n; 4]), |ix| {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            rho * (h[[i, k]] * h[[j, l]] - h[[i, l]] * h[[j, k]])
        });
        residual_between(&v.s4, &form)
    });

    Ok(SpecialForms {
        c_reducible,
        c2_like,
        s3_like,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    fn space(n: usize, f: &str) -> MetricSpace {
        MetricSpace::new("t", n, f, DomainSpec::boxed(n, [-1.0, 1.0], [0.3, 2.0])).unwrap()
    }

    #[test]
    fn tiers_are_ordered() {
        assert_eq!(Tier::of(1e-12), Some(Tier::Strict));
        assert_eq!(Tier::of(1e-9), Some(Tier::Default));
        assert_eq!(Tier::of(1e-7), Some(Tier::Loose));
        assert_eq!(Tier::of(1e-3), None);
    }

    #[test]
    fn euclidean_holds_everything() {
        let s = space(3, "sqrt(y1^2 + y2^2 + y3^2)");
        let c = classify_point(&s, &Point::new([0.1, 0.2, 0.3], [0.5, 1.0, 1.5]), 1e-10).unwrap();
        assert!(c.riemannian.holds && c.berwald.holds && c.landsberg.holds && c.positive_definite.holds);
        assert!(c.special.c_reducible < 1e-14);
        assert!(c.special.c2_like.is_none());
        assert!(c.special.s3_like.unwrap() < 1e-14);
    }

    #[test]
    fn riemannian_conformally_flat_is_berwald() {
        let s = space(2, "sqrt(exp(2*x1)*(y1^2 + y2^2))");
        let c = classify_point(&s, &Point::new([0.4, -0.3], [0.8, 1.2]), 1e-10).unwrap();
        assert!(c.riemannian.holds && c.berwald.holds && c.landsberg.holds);
        assert!(c.special.s3_like.is_none());
    }

    #[test]
    fn randers_is_not_riemannian_and_c_reducible() {
        let s = space(3, "sqrt(y1^2 + y2^2 + y3^2) + 0.3*y1 - 0.1*y3");
        let c = classify_point(&s, &Point::new([0.1, 0.2, 0.3], [0.7, 1.1, 0.4]), 1e-8).unwrap();
        assert!(!c.riemannian.holds);
        assert!(c.positive_definite.holds && c.positive_definite.residual > 0.0);
        // Minkowski Randers: Berwald, and its Cartan tensor is C-reducible
        assert!(c.berwald.holds);
        assert!(c.special.c_reducible < 1e-10, "{}", c.special.c_reducible);
    }

    #[test]
    fn three_dimensional_metrics_are_s3_like() {
        let s = space(3, "sqrt(y1^2 + y2^2 + y3^2) + 0.3*y1");
        let c = classify_point(&s, &Point::new([0.0; 3], [0.7, 1.1, 0.4]), 1e-8).unwrap();
        assert!(c.special.s3_like.unwrap() < 1e-10);
    }
}
