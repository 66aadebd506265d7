use serde::{Deserialize, Serialize};

use crate::error::{Error, GeometryError, Result};
use crate::expr::{Coords, Expr};

/// Default margin every strict domain constraint must exceed.
pub const DEFAULT_MARGIN: f64 = 1e-3;

/// A point `(x, y)` of the tangent bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: impl Into<Vec<f64>>, y: impl Into<Vec<f64>>) -> Self {
        Point { x: x.into(), y: y.into() }
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn with_y(&self, y: Vec<f64>) -> Self {
        Point { x: self.x.clone(), y }
    }
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

/// Admissible sampling region: strict inequalities `constraint > margin`
/// plus per-coordinate uniform ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DomainSpec {
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub x_ranges: Vec<[f64; 2]>,
    pub y_ranges: Vec<[f64; 2]>,
}

impl DomainSpec {
    pub fn boxed(dim: usize, x: [f64; 2], y: [f64; 2]) -> Self {
        DomainSpec {
            constraints: vec![],
            margin: DEFAULT_MARGIN,
            x_ranges: vec![x; dim],
            y_ranges: vec![y; dim],
        }
    }

    pub fn with_constraints(mut self, constraints: &[&str]) -> Self {
        self.constraints = constraints.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }
}

pub(crate) fn parse_expr(text: &str, dim: usize) -> Result<Expr> {
    Expr::parse(text, dim).map_err(|source| Error::Parse {
        text: text.to_string(),
        source,
    })
}

/// A Finsler function `F(x, y)` on an `n`-dimensional chart together with the
/// region where it is sampled.
#[derive(Debug, Clone)]
pub struct MetricSpace {
    pub name: String,
    pub dim: usize,
    pub metric_text: String,
    pub metric: Expr,
    pub domain: DomainSpec,
    constraints: Vec<Expr>,
}

impl MetricSpace {
    pub fn new(name: &str, dim: usize, metric_text: &str, domain: DomainSpec) -> Result<Self> {
        let metric = parse_expr(metric_text, dim)?;
        Self::from_expr(name, dim, metric, domain)
    }

    pub fn from_expr(name: &str, dim: usize, metric: Expr, domain: DomainSpec) -> Result<Self> {
        if domain.x_ranges.len() != dim || domain.y_ranges.len() != dim {
            return Err(Error::Config(format!(
                "domain ranges must list {dim} x- and {dim} y-intervals"
            )));
        }
        let constraints = domain
            .constraints
            .iter()
            .map(|c| parse_expr(c, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(MetricSpace {
            name: name.to_string(),
            dim,
            metric_text: metric.to_string(),
            metric,
            domain,
            constraints,
        })
    }

    /// Every constraint evaluates and exceeds the margin.
    pub fn admits(&self, p: &Point) -> bool {
        let coords = Coords::new(&p.x, &p.y);
        self.constraints
            .iter()
            .all(|c| matches!(c.eval(&coords), Ok(v) if v > self.domain.margin))
    }

    pub fn f(&self, p: &Point) -> Result<f64, GeometryError> {
        Ok(self.metric.eval(&Coords::new(&p.x, &p.y))?)
    }

    /// Largest relative deviation of `F(x, λy)` from `λ F(x, y)`.
    pub fn homogeneity_defect(&self, p: &Point, lambdas: &[f64]) -> Result<f64, GeometryError> {
        let base = self.f(p)?;
        let mut worst = 0.0f64;
        for &lambda in lambdas {
            let scaled = p.with_y(p.y.iter().map(|v| v * lambda).collect());
            let v = self.f(&scaled)?;
            worst = worst.max((v - lambda * base).abs() / (lambda * base).abs().max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraints_use_margin() {
        let d = DomainSpec::boxed(2, [-1.0, 1.0], [-1.0, 1.0]).with_constraints(&["y1"]);
        let s = MetricSpace::new("t", 2, "sqrt(y1^2+y2^2)", d).unwrap();
        assert!(s.admits(&Point::new([0.0, 0.0], [0.5, 0.0])));
        assert!(!s.admits(&Point::new([0.0, 0.0], [0.0005, 0.0])));
        assert!(!s.admits(&Point::new([0.0, 0.0], [-0.5, 0.0])));
    }

    #[test]
    fn homogeneity_probe_detects_wrong_degree() {
        let d = DomainSpec::boxed(2, [-1.0, 1.0], [0.5, 1.0]);
        let good = MetricSpace::new("g", 2, "sqrt(y1^2+y2^2+y1*y2)", d.clone()).unwrap();
        let bad = MetricSpace::new("b", 2, "sqrt(y1^2+y2^3)", d).unwrap();
        let p = Point::new([0.1, 0.2], [0.7, 0.9]);
        assert!(good.homogeneity_defect(&p, &[0.5, 2.0, 3.0]).unwrap() < 1e-14);
        assert!(bad.homogeneity_defect(&p, &[0.5, 2.0, 3.0]).unwrap() > 1e-3);
    }

    #[test]
    fn mismatched_ranges_rejected() {
        let d = DomainSpec::boxed(3, [-1.0, 1.0], [0.5, 1.0]);
        assert!(MetricSpace::new("t", 2, "y1", d).is_err());
    }
}
