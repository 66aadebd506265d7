//! Run configuration, report assembly and the human-readable rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{evaluate_point, pinned_tolerance, CheckKind, CheckOutcome, Expectation, Subject};
use crate::conformal::conformal_lift;
use crate::error::{Error, GeometryError, Result};
use crate::geometry::Point;
use crate::registry::{homogeneity_defect, RegistryEntry};
use crate::sampling::{sample_points, DEFAULT_SEED};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_POINTS: usize = 50;

const L_NOTATION_NOTE: &str = "the B^i term written with L^2 is evaluated with F^2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointsSpec {
    #[serde(default = "default_points")]
    pub count: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for PointsSpec {
    fn default() -> Self {
        PointsSpec {
            count: DEFAULT_POINTS,
            seed: DEFAULT_SEED,
        }
    }
}

/// A registry entry plus sampling, check selection and tolerances. Any
/// registry entry's JSON is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    #[serde(flatten)]
    pub entry: RegistryEntry,
    #[serde(default)]
    pub points: PointsSpec,
    /// Empty means every check the entry supports.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckKind>,
    /// Default tolerance for items without a pinned one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Overrides keyed by item name or check name; items win over checks.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl From<RegistryEntry> for RunConfig {
    fn from(entry: RegistryEntry) -> Self {
        RunConfig {
            entry,
            points: PointsSpec::default(),
            checks: Vec::new(),
            tolerance: None,
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn with_checks(mut self, checks: &[CheckKind]) -> Self {
        self.checks = checks.to_vec();
        self
    }

    pub fn with_points(mut self, count: usize, seed: u64) -> Self {
        self.points = PointsSpec { count, seed };
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    /// Requested checks in canonical order, defaulting to all applicable.
    pub fn resolved_checks(&self) -> Vec<CheckKind> {
        let mut out: Vec<CheckKind> = if self.checks.is_empty() {
            CheckKind::ALL
                .into_iter()
                .filter(|c| self.entry.sigma.is_some() || !c.needs_sigma())
                .filter(|c| !matches!(c, CheckKind::Claims) || self.claims_supported())
                .collect()
        } else {
            self.checks.clone()
        };
        out.sort();
        out.dedup();
        out
    }

    fn claims_supported(&self) -> bool {
        self.entry.sigma.is_some() || self.entry.expected_claims.iter().all(|c| !c.claim.needs_sigma())
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.count == 0 {
            return Err(Error::Config("point count must be at least 1".into()));
        }
        if self.entry.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        let tols = self.tolerance.iter().chain(self.tolerances.values());
        if let Some(t) = tols.into_iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::Config(format!("tolerance {t} is not a positive number")));
        }
        if self.entry.sigma.is_none() {
            let checks = self.resolved_checks();
            if let Some(c) = checks.iter().find(|c| c.needs_sigma()) {
                return Err(Error::Config(format!("check `{c}` needs a conformal factor but sigma is absent")));
            }
            let claims_used = checks.iter().any(|c| matches!(c, CheckKind::Claims | CheckKind::ClosedForms));
            if let Some(c) = self.entry.expected_claims.iter().find(|c| claims_used && c.claim.needs_sigma()) {
                return Err(Error::Config(format!("claim `{}` needs a conformal factor but sigma is absent", c.claim.label())));
            }
        }
        Ok(())
    }

    /// Tolerance for an item of a check.
    pub fn tolerance_for(&self, check: CheckKind, item: &str) -> f64 {
        self.tolerances
            .get(item)
            .or_else(|| self.tolerances.get(check.name()))
            .copied()
            .or_else(|| pinned_tolerance(item))
            .unwrap_or(self.tolerance.unwrap_or(DEFAULT_TOLERANCE))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Holds,
    Fails,
    /// No point produced a value; never counts as a failure.
    Undefined,
}

impl Verdict {
    pub fn holds(self) -> bool {
        !matches!(self, Verdict::Fails)
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "FAILS",
            Verdict::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WorstPoint {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl WorstPoint {
    fn new(index: usize, p: &Point) -> Self {
        WorstPoint {
            index,
            x: p.x.clone(),
            y: p.y.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ItemReport {
    pub name: String,
    pub expectation: Expectation,
    /// Tolerance for vanishing items, threshold for exceeding ones.
    pub tolerance: f64,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    /// Smallest value; only meaningful for positivity items.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
    pub verdict: Verdict,
    /// Largest value, or smallest for positivity items.
    pub worst_point: Option<WorstPoint>,
    pub defined_points: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub failed_points: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub check: CheckKind,
    /// Largest residual among the vanishing items.
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub verdict: Verdict,
    /// Worst point of the item furthest outside (or least inside) its
    /// tolerance.
    pub worst_point: Option<WorstPoint>,
    pub items: Vec<ItemReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub environment: Environment,
    pub checks: Vec<CheckReport>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.verdict.holds())
    }

    pub fn failing(&self) -> Vec<&CheckReport> {
        self.checks.iter().filter(|c| !c.verdict.holds()).collect()
    }

    pub fn check(&self, kind: CheckKind) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == kind)
    }

    pub fn item(&self, kind: CheckKind, name: &str) -> Option<&ItemReport> {
        self.check(kind)?.items.iter().find(|i| i.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text rendering of the report.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let e = &self.config.entry;
        let _ = writeln!(s, "{} (n={})  F = {}", e.name, e.dim, e.metric);
        if let Some(sigma) = &e.sigma {
            let _ = writeln!(s, "sigma = {sigma}");
        }
        let _ = writeln!(
            s,
            "{} points, seed {}, version {}, schema {}",
            self.environment.points, self.environment.seed, self.environment.version, self.schema_version
        );
        for c in &self.checks {
            let _ = writeln!(s, "\n[{}] {}  max {}  mean {}", c.check, c.verdict.label(), num(c.max_residual), num(c.mean_residual));
            for i in &c.items {
                let detail = match i.expectation {
                    Expectation::Vanishes => format!("{} (<= {:.0e})", num(i.max_residual), i.tolerance),
                    Expectation::Exceeds => format!("{} (> {:.0e})", num(i.max_residual), i.tolerance),
                    Expectation::Positive => format!("{} (smallest eigenvalue)", num(i.min_value)),
                };
                let _ = writeln!(s, "  {:<36} {:<9} {}", i.name, i.verdict.label(), detail);
            }
            if let Some(w) = &c.worst_point {
                let _ = writeln!(s, "  worst point #{}: x = {}  y = {}", w.index, coords(&w.x), coords(&w.y));
            }
            for err in &c.errors {
                let _ = writeln!(s, "  error: {err}");
            }
        }
        if !self.warnings.is_empty() {
            let _ = writeln!(s, "\nwarnings:");
            for w in &self.warnings {
                let _ = writeln!(s, "  - {w}");
            }
        }
        let _ = writeln!(s, "\noverall: {}", if self.all_hold() { "all verdicts hold" } else { "some verdicts fail" });
        s
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.3e}"))
}

fn coords(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{c:.16e}")).collect();
    format!("({})", parts.join(", "))
}

/// Sample points and evaluate every requested check over them.
pub fn run_report(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let entry = &config.entry;
    let space = entry.space()?;
    let cf = entry.conformal_factor()?;
    let lifted = cf.as_ref().map(|cf| conformal_lift(&space, cf)).transpose()?;
    let checks = config.resolved_checks();
    let points = sample_points(&space, config.points.count, config.points.seed)?;

    let subject = Subject {
        space: &space,
        lifted: lifted.as_ref(),
        cf: cf.as_ref(),
    };
    let outcomes: Vec<Vec<CheckOutcome>> = points
        .par_iter()
        .map(|p| {
            let tol = |check: CheckKind, item: &str| config.tolerance_for(check, item);
            evaluate_point(&subject, p, &checks, &entry.expected_claims, &tol)
        })
        .collect();

    let check_reports = checks
        .iter()
        .enumerate()
        .map(|(k, &check)| aggregate(check, &points, outcomes.iter().map(|o| &o[k])))
        .collect();

    let mut warnings: Vec<String> = entry.notes.clone();
    if entry.sigma.is_some() && checks.iter().any(|c| matches!(c, CheckKind::BHierarchy | CheckKind::ConformalLaws)) {
        warnings.push(L_NOTATION_NOTE.into());
    }
    match homogeneity_defect(&space) {
        Some(d) if d > 1e-12 => warnings.push(format!("homogeneity probe: F fails degree-one homogeneity (defect {d:.3e})")),
        None => warnings.push("homogeneity probe: F could not be evaluated at the probe points".into()),
        _ => {}
    }
    warnings.push(format!(
        "verdicts hold on this sample of {} points (seed {}); they are not proofs",
        points.len(),
        config.points.seed
    ));

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            seed: config.points.seed,
            points: points.len(),
        },
        checks: check_reports,
        warnings,
    })
}

fn aggregate<'a>(check: CheckKind, points: &[Point], outcomes: impl Iterator<Item = &'a CheckOutcome>) -> CheckReport {
    struct Acc {
        expectation: Expectation,
        tolerance: f64,
        values: Vec<(usize, f64)>,
        all_ok: bool,
        failed: usize,
    }
    let mut items: Vec<(String, Acc)> = Vec::new();
    let mut errors: BTreeMap<String, usize> = BTreeMap::new();
    let mut hard_error = false;
    for (idx, o) in outcomes.enumerate() {
        if let Some(e) = &o.error {
            hard_error |= !matches!(e, GeometryError::Undefined(_));
            *errors.entry(e.to_string()).or_default() += 1;
        }
        for r in &o.rows {
            let pos = match items.iter().position(|(n, _)| *n == r.item) {
                Some(p) => p,
                None => {
                    items.push((
                        r.item.clone(),
                        Acc {
                            expectation: r.expectation,
                            tolerance: r.tolerance,
                            values: Vec::new(),
                            all_ok: true,
                            failed: 0,
                        },
                    ));
                    items.len() - 1
                }
            };
            let acc = &mut items[pos].1;
            match (r.value, &r.error) {
                (Some(v), _) => acc.values.push((idx, v)),
                (None, Some(e)) if !matches!(e, GeometryError::Undefined(_)) => {
                    acc.failed += 1;
                    *errors.entry(e.to_string()).or_default() += 1;
                }
                _ => {}
            }
            acc.all_ok &= r.ok || r.value.is_none();
        }
    }

    let mut reports = Vec::with_capacity(items.len());
    // (item index, how far past or short of the tolerance)
    let mut worst: Option<(usize, f64)> = None;
    for (name, acc) in items {
        let finite = acc.values.iter().all(|(_, v)| v.is_finite());
        let pick_max = !matches!(acc.expectation, Expectation::Positive);
        let extreme = acc.values.iter().copied().fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
            Some((_, b)) if (pick_max && !(v > b)) || (!pick_max && !(v < b)) => best,
            _ => Some((i, v)),
        });
        let max = acc.values.iter().map(|(_, v)| *v).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
        let min = acc.values.iter().map(|(_, v)| *v).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
        let mean = (!acc.values.is_empty()).then(|| acc.values.iter().map(|(_, v)| v).sum::<f64>() / acc.values.len() as f64);
        let verdict = if acc.failed > 0 || !finite {
            Verdict::Fails
        } else if acc.values.is_empty() {
            Verdict::Undefined
        } else {
            let ok = match acc.expectation {
                Expectation::Vanishes => max.is_some_and(|m| m <= acc.tolerance),
                Expectation::Exceeds => max.is_some_and(|m| m > acc.tolerance),
                Expectation::Positive => acc.all_ok,
            };
            if ok {
                Verdict::Holds
            } else {
                Verdict::Fails
            }
        };
        let severity = match (acc.expectation, max) {
            (Expectation::Vanishes, Some(m)) => m / acc.tolerance,
            (Expectation::Exceeds, Some(m)) if m > 0.0 => acc.tolerance / m,
            (Expectation::Positive, _) if !acc.all_ok => f64::INFINITY,
            _ => 0.0,
        };
        if extreme.is_some() && worst.is_none_or(|(_, s)| severity > s) {
            worst = Some((reports.len(), severity));
        }
        reports.push(ItemReport {
            name,
            expectation: acc.expectation,
            tolerance: acc.tolerance,
            max_residual: max,
            mean_residual: mean,
            min_value: matches!(acc.expectation, Expectation::Positive).then_some(min).flatten(),
            verdict,
            worst_point: extreme.map(|(i, _)| WorstPoint::new(i, &points[i])),
            defined_points: acc.values.len(),
            failed_points: acc.failed,
        });
    }

    let vanishing: Vec<&ItemReport> = reports.iter().filter(|i| i.expectation == Expectation::Vanishes).collect();
    let max_residual = vanishing.iter().filter_map(|i| i.max_residual).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let means: Vec<f64> = vanishing.iter().filter_map(|i| i.mean_residual).collect();
    let mean_residual = (!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64);
    let verdict = if hard_error || reports.iter().any(|i| i.verdict == Verdict::Fails) {
        Verdict::Fails
    } else if !reports.is_empty() && reports.iter().all(|i| i.verdict == Verdict::Undefined) {
        Verdict::Undefined
    } else {
        Verdict::Holds
    };
    CheckReport {
        check,
        max_residual,
        mean_residual,
        verdict,
        worst_point: worst.and_then(|(i, _)| reports[i].worst_point.clone()),
        items: reports,
        errors: errors.into_iter().map(|(e, n)| format!("{e} ({n} points)")).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::registry;

    fn quick(name: &str, checks: &[CheckKind], n: usize) -> Report {
        let cfg = RunConfig::from(registry(name).unwrap()).with_checks(checks).with_points(n, 42);
        run_report(&cfg).unwrap()
    }

    #[test]
    fn euclidean_all_checks_hold() {
        let r = quick("euclidean2", &[], 10);
        assert!(r.all_hold(), "{}", r.render());
        for c in &r.checks {
            assert!(c.max_residual.unwrap_or(0.0) < 1e-12, "{}: {:?}", c.check, c.max_residual);
        }
        assert_eq!(r.checks.len(), r.config.resolved_checks().len());
    }

    #[test]
    fn json_is_deterministic_and_round_trips() {
        let a = quick("ex31", &[CheckKind::SigmaT, CheckKind::Classify], 5).to_json().unwrap();
        let b = quick("ex31", &[CheckKind::SigmaT, CheckKind::Classify], 5).to_json().unwrap();
        assert_eq!(a, b);
        let back: Report = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json().unwrap(), a);
    }

    #[test]
    fn registry_entry_json_is_a_config() {
        let json = serde_json::to_string(&registry("ex51").unwrap()).unwrap();
        let cfg: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg.points, PointsSpec::default());
        assert!(cfg.checks.is_empty());
    }

    #[test]
    fn sigma_checks_need_sigma() {
        let mut e = registry("euclidean3").unwrap();
        e.sigma = None;
        e.expected_claims.clear();
        let cfg = RunConfig::from(e).with_checks(&[CheckKind::SigmaT]);
        assert!(matches!(run_report(&cfg), Err(Error::Config(_))));
        let cfg = RunConfig::from(registry("euclidean2").unwrap()).with_points(0, 1);
        assert!(matches!(run_report(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn tolerance_resolution_order() {
        let mut cfg = RunConfig::from(registry("euclidean2").unwrap()).with_tolerance(1e-6);
        assert_eq!(cfg.tolerance_for(CheckKind::Classify, "berwald"), 1e-6);
        assert_eq!(cfg.tolerance_for(CheckKind::ConformalLaws, "scalingL"), 1e-10);
        cfg.tolerances.insert("conformal-laws".into(), 1e-9);
        assert_eq!(cfg.tolerance_for(CheckKind::ConformalLaws, "scalingL"), 1e-9);
        cfg.tolerances.insert("scalingL".into(), 1e-11);
        assert_eq!(cfg.tolerance_for(CheckKind::ConformalLaws, "scalingL"), 1e-11);
    }

    #[test]
    fn ex51_classify_pattern() {
        let r = quick("ex51", &[CheckKind::Classify, CheckKind::NecessaryCondition], 8);
        assert_eq!(r.item(CheckKind::Classify, "berwald").unwrap().verdict, Verdict::Holds);
        assert_eq!(r.item(CheckKind::Classify, "liftedLandsberg").unwrap().verdict, Verdict::Holds);
        assert_eq!(r.item(CheckKind::Classify, "liftedBerwald").unwrap().verdict, Verdict::Fails);
        assert_eq!(r.item(CheckKind::NecessaryCondition, "phi").unwrap().verdict, Verdict::Fails);
        assert!(!r.all_hold());
        assert!(r.render().contains("[necessary-condition] FAILS"));
    }
}
