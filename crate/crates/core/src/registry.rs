//! Built-in catalogue of example spaces with their sampling domains and the
//! claims each one is expected to satisfy.

use serde::{Deserialize, Serialize};

use crate::conformal::ConformalFactor;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, MetricSpace, Point};

/// A scalar or tensor quantity a claim talks about. Index fields are
/// 1-based, as written in formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "camelCase")]
pub enum Quantity {
    Cartan,
    Berwald,
    Landsberg,
    TTensor,
    VCurvature,
    LiftedBerwald,
    LiftedLandsberg,
    /// `σ_r T^r_jkh`
    SigmaT,
    /// `σ_r B^{ir}_jkh` for one fixed `r`, no summation.
    SigmaBirSlot { slot: usize },
    /// `B^{ir}_jkh`
    Bir,
    /// `σ_r C^r`
    SigmaC,
    /// Left-hand scalar of the necessary Berwald condition.
    Phi,
    /// `G^i_jkh + B^i_jkh` with `B` in closed form.
    BerwaldPlusDelta,
    /// `T^h_ijk` for one fixed upper index.
    TRaisedSlice { upper: usize },
    /// A single component `T^h_ijk`, written `[h, i, j, k]`.
    TRaisedComponent { index: [usize; 4] },
}

impl Quantity {
    pub fn needs_sigma(&self) -> bool {
        matches!(
            self,
            Quantity::LiftedBerwald
                | Quantity::LiftedLandsberg
                | Quantity::SigmaT
                | Quantity::SigmaBirSlot { .. }
                | Quantity::SigmaC
                | Quantity::Phi
                | Quantity::BerwaldPlusDelta
        )
    }

    pub fn label(&self) -> String {
        match self {
            Quantity::Cartan => "C_ijk".into(),
            Quantity::Berwald => "G^i_jkh".into(),
            Quantity::Landsberg => "L_jkh".into(),
            Quantity::TTensor => "T_hijk".into(),
            Quantity::VCurvature => "S_ijkh".into(),
            Quantity::LiftedBerwald => "lifted G^i_jkh".into(),
            Quantity::LiftedLandsberg => "lifted L_jkh".into(),
            Quantity::SigmaT => "sigma_r T^r_jkh".into(),
            Quantity::SigmaBirSlot { slot } => format!("sigma_{slot} B^(i{slot})_jkh"),
            Quantity::Bir => "B^(ir)_jkh".into(),
            Quantity::SigmaC => "sigma_r C^r".into(),
            Quantity::Phi => "phi".into(),
            Quantity::BerwaldPlusDelta => "G^i_jkh + B^i_jkh".into(),
            Quantity::TRaisedSlice { upper } => format!("T^{upper}_ijk"),
            Quantity::TRaisedComponent { index: [h, i, j, k] } => format!("T^{h}_{i}{j}{k}"),
        }
    }
}

/// Closed-form expressions known for particular entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ClosedForm {
    /// `T^4_444` of the 4D quartic metric, as printed.
    QuarticT4444,
    /// `B^{44}_444` of the 4D quartic metric, as printed.
    QuarticB44444Printed,
    /// `B^{44}_444` of the 4D quartic metric, derived symbolically.
    QuarticB44444Derived,
}

impl ClosedForm {
    pub fn label(self) -> &'static str {
        match self {
            ClosedForm::QuarticT4444 => "T^4_444 closed form",
            ClosedForm::QuarticB44444Printed => "B^(44)_444 printed closed form",
            ClosedForm::QuarticB44444Derived => "B^(44)_444 derived closed form",
        }
    }

    /// Value of the closed form at `y` (with `F` supplied where needed).
    pub fn value(self, y: &[f64], f: f64) -> f64 {
        let (y1, y2, y3, y4) = (y[0], y[1], y[2], y[3]);
        let q = 3.0 * y2 * y2 + 2.0 * y2 * y4 + 2.0 * y4 * y4;
        match self {
            ClosedForm::QuarticT4444 => {
                3.0 * y1 * y2.powi(3) * y3 * y4 * (3.0 * y2 + y4) / (f.powi(3) * (y1 * y2).sqrt() * q * q)
            }
            ClosedForm::QuarticB44444Printed => {
                768.0 * y2 * y4.powi(3) * (y2.powi(3) + y2 * y2 * y4 - 3.0 * y2 * y4 * y4 - 2.0 * y4.powi(3)) / q.powi(4)
            }
            ClosedForm::QuarticB44444Derived => {
                96.0 * y2.powi(3) * y4 * (3.0 * y2 + y4) * (9.0 * y2 * y2 + 6.0 * y2 * y4 - 4.0 * y4 * y4) / q.powi(4)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Claim {
    Vanishes { quantity: Quantity },
    Exceeds { quantity: Quantity, threshold: f64 },
    PositiveDefinite,
    ClosedForm { form: ClosedForm, tolerance: f64 },
}

impl Claim {
    pub fn needs_sigma(&self) -> bool {
        match self {
            Claim::Vanishes { quantity } | Claim::Exceeds { quantity, .. } => quantity.needs_sigma(),
            Claim::ClosedForm { form, .. } => matches!(form, ClosedForm::QuarticB44444Printed | ClosedForm::QuarticB44444Derived),
            Claim::PositiveDefinite => false,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Claim::Vanishes { quantity } => format!("{} = 0", quantity.label()),
            Claim::Exceeds { quantity, threshold } => format!("max |{}| > {threshold:e}", quantity.label()),
            Claim::PositiveDefinite => "g positive definite".into(),
            Claim::ClosedForm { form, .. } => form.label().into(),
        }
    }
}

/// A claim together with the neutral statement it encodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpectedClaim {
    #[serde(flatten)]
    pub claim: Claim,
    pub anchor: String,
}

fn claim(claim: Claim, anchor: &str) -> ExpectedClaim {
    ExpectedClaim {
        claim,
        anchor: anchor.to_string(),
    }
}

fn vanishes(q: Quantity) -> Claim {
    Claim::Vanishes { quantity: q }
}

fn exceeds(q: Quantity, threshold: f64) -> Claim {
    Claim::Exceeds { quantity: q, threshold }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegistryEntry {
    pub name: String,
    pub dim: usize,
    #[serde(alias = "F")]
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    pub domain: DomainSpec,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub expected_claims: Vec<ExpectedClaim>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RegistryEntry {
    pub fn space(&self) -> Result<MetricSpace> {
        MetricSpace::new(&self.name, self.dim, &self.metric, self.domain.clone())
    }

    pub fn conformal_factor(&self) -> Result<Option<ConformalFactor>> {
        self.sigma.as_deref().map(|s| ConformalFactor::new(s, self.dim)).transpose()
    }
}

const LAMBDAS: [f64; 3] = [0.5, 2.0, 3.0];
const HOMOGENEITY_TOL: f64 = 1e-12;

/// Deterministic spot points for the homogeneity probe: the first few points
/// of the domain's y-box that satisfy its constraints.
fn probe_points(space: &MetricSpace) -> Vec<Point> {
    let n = space.dim;
    let mut out = Vec::new();
    let fractions = [0.37, 0.61, 0.83, 0.19, 0.71];
    for (k, &t) in fractions.iter().enumerate() {
        let pick = |r: &[f64; 2], i: usize| {
            let s = (t + 0.13 * i as f64 + 0.07 * k as f64).fract();
            r[0] + s * (r[1] - r[0])
        };
        let x: Vec<f64> = (0..n).map(|i| pick(&space.domain.x_ranges[i], i)).collect();
        let y: Vec<f64> = (0..n).map(|i| pick(&space.domain.y_ranges[i], i + 1)).collect();
        let p = Point::new(x, y);
        if space.admits(&p) {
            out.push(p);
        }
    }
    out
}

/// Largest homogeneity defect over the spot points, `None` if the metric
/// could not be evaluated at any of them.
pub fn homogeneity_defect(space: &MetricSpace) -> Option<f64> {
    let pts = probe_points(space);
    let defects: Vec<f64> = pts
        .iter()
        .filter_map(|p| space.homogeneity_defect(p, &LAMBDAS).ok())
        .collect();
    (!defects.is_empty()).then(|| defects.into_iter().fold(0.0, f64::max))
}

const EX52_PRINTED: &str = "sqrt(y1^2 + y2^2 + y2^3 + y2*sqrt(y1^2 + y3^2))*exp(1/sqrt(3)*atan(2*y2/sqrt(3*(y1^2 + y3^2)) + 1/sqrt(3)))";
const EX52_HOMOGENEOUS: &str = "sqrt(y1^2 + y3^2 + y2^2 + y2*sqrt(y1^2 + y3^2))*exp(1/sqrt(3)*atan(2*y2/sqrt(3*(y1^2 + y3^2)) + 1/sqrt(3)))";

/// Free function inside the exponential factor of `ex53`; the lift uses half
/// of it.
const EX53_TAU: &str = "sin(x1) + x2^2";

fn euclidean(n: usize) -> RegistryEntry {
    let metric = format!(
        "sqrt({})",
        (1..=n).map(|i| format!("y{i}^2")).collect::<Vec<_>>().join(" + ")
    );
    let sigma = match n {
        2 => "x2",
        3 => "x1 + 2*x3",
        _ => "0.5*x4 - x1*x2",
    };
    RegistryEntry {
        name: format!("euclidean{n}"),
        dim: n,
        metric,
        sigma: Some(sigma.into()),
        domain: DomainSpec::boxed(n, [-1.0, 1.0], [-2.0, 2.0]).with_constraints(&[&euclidean_norm_sq(n)]),
        summary: format!("Euclidean norm on R^{n}; every tensor beyond g vanishes"),
        expected_claims: trivial_claims(),
        notes: vec![],
    }
}

fn euclidean_norm_sq(n: usize) -> String {
    (1..=n).map(|i| format!("y{i}^2")).collect::<Vec<_>>().join(" + ")
}

fn trivial_claims() -> Vec<ExpectedClaim> {
    let a = "Riemannian: all tensors beyond g vanish";
    vec![
        claim(vanishes(Quantity::Cartan), a),
        claim(vanishes(Quantity::Berwald), a),
        claim(vanishes(Quantity::Landsberg), a),
        claim(vanishes(Quantity::TTensor), a),
        claim(vanishes(Quantity::VCurvature), a),
        claim(Claim::PositiveDefinite, a),
    ]
}

fn riemannian_exp() -> RegistryEntry {
    RegistryEntry {
        name: "riemannianExp".into(),
        dim: 2,
        metric: "sqrt(exp(2*x1)*(y1^2 + y2^2))".into(),
        sigma: Some("sin(x2)".into()),
        domain: DomainSpec::boxed(2, [-1.0, 1.0], [-2.0, 2.0]).with_constraints(&["y1^2 + y2^2"]),
        summary: "conformally flat metric e^(2x1)(dx1^2 + dx2^2); Berwald with Christoffel symbols".into(),
        expected_claims: trivial_claims(),
        notes: vec![],
    }
}

fn ex31() -> RegistryEntry {
    let a = "sigma_r T^r_ijk = sigma_2 T^2_ijk = 0 while T^1_111 != 0";
    RegistryEntry {
        name: "ex31".into(),
        dim: 3,
        metric: "((y1*y3 + y3*sqrt(y1^2 + y3^2))*y2^2)^(1/4)".into(),
        sigma: Some("log(2 + x2)".into()),
        domain: DomainSpec::boxed(3, [-1.0, 1.0], [-2.0, 2.0])
            .with_constraints(&["y1*y3 + y3*sqrt(y1^2 + y3^2)", "y2^2"])
            .with_margin(0.05),
        summary: "R^3 quartic-root metric with factor sigma(x2): Landsberg property survives the lift although T != 0".into(),
        expected_claims: vec![
            claim(vanishes(Quantity::SigmaT), a),
            claim(vanishes(Quantity::TRaisedSlice { upper: 2 }), a),
            claim(exceeds(Quantity::TRaisedComponent { index: [1, 1, 1, 1] }, 1e-7), a),
            claim(vanishes(Quantity::LiftedLandsberg), "the lift of a Landsberg space with sigma_r T^r_jkh = 0 is Landsberg"),
        ],
        notes: vec![],
    }
}

fn ex32() -> RegistryEntry {
    let a = "sigma_r T^r_ijk = sigma_1 T^1_ijk = sigma_3 T^3_ijk = 0 while T^4_444 != 0";
    let b = "B^i_jkh = 0 and sigma_1 B^(i1)_jkh = sigma_3 B^(i3)_jkh = 0 while B^(44)_444 != 0";
    RegistryEntry {
        name: "ex32".into(),
        dim: 4,
        metric: "(sqrt(y1*y2)*y3*y4*(y2 + y4))^(1/4)".into(),
        sigma: Some("log(3 + x1 + x3^2)".into()),
        domain: DomainSpec::boxed(4, [-1.0, 1.0], [0.1, 2.0])
            .with_constraints(&["y1*y2", "y3*y4*(y2 + y4)"])
            .with_margin(0.01),
        summary: "R^4 quartic-root metric with factor sigma(x1, x3): Berwald space that stays Berwald although B^(ir)_jkh != 0".into(),
        expected_claims: vec![
            claim(vanishes(Quantity::SigmaT), a),
            claim(Claim::ClosedForm { form: ClosedForm::QuarticT4444, tolerance: 1e-7 }, a),
            claim(vanishes(Quantity::Berwald), b),
            claim(vanishes(Quantity::LiftedBerwald), b),
            claim(vanishes(Quantity::SigmaBirSlot { slot: 1 }), b),
            claim(vanishes(Quantity::SigmaBirSlot { slot: 3 }), b),
            claim(exceeds(Quantity::Bir, 1e-3), b),
            claim(Claim::ClosedForm { form: ClosedForm::QuarticB44444Printed, tolerance: 1e-7 }, b),
            claim(Claim::ClosedForm { form: ClosedForm::QuarticB44444Derived, tolerance: 1e-7 }, b),
        ],
        notes: vec![
            "the printed B^(44)_444 expression equals -1/2 d^3/(dy2)^3 (F^2 g^22); the derived form is checked alongside".into(),
        ],
    }
}

fn landsberg_non_berwald_claims(slot: usize) -> Vec<ExpectedClaim> {
    let a = format!("sigma_r T^r_ijk = sigma_{slot} T^{slot}_ijk = 0, sigma_r C^r = sigma_{slot} C^{slot} != 0, T^1_111 != 0");
    let b = "the lift is Landsberg but not Berwald; the necessary condition fails";
    vec![
        claim(vanishes(Quantity::SigmaT), &a),
        claim(exceeds(Quantity::SigmaC, 1e-7), &a),
        claim(exceeds(Quantity::TRaisedComponent { index: [1, 1, 1, 1] }, 1e-7), &a),
        claim(vanishes(Quantity::LiftedLandsberg), b),
        claim(exceeds(Quantity::LiftedBerwald, 1e-3), b),
        claim(exceeds(Quantity::Phi, 1e-7), b),
    ]
}

fn ex51() -> RegistryEntry {
    RegistryEntry {
        name: "ex51".into(),
        dim: 3,
        metric: "sqrt(y3^2 + y1*y2 + y3*sqrt(y1*y2))*exp(1/sqrt(3)*atan(2*y3/sqrt(3*y1*y2) + 1/sqrt(3)))".into(),
        sigma: Some("log(2 + x3)".into()),
        domain: DomainSpec::boxed(3, [-1.0, 1.0], [-2.0, 2.0])
            .with_constraints(&["y1*y2", "y1"])
            .with_margin(0.05),
        summary: "R^3 arctan-exponential metric with factor sigma(x3): lift is Landsberg, not Berwald".into(),
        expected_claims: landsberg_non_berwald_claims(3),
        notes: vec![],
    }
}

/// `ex52` as printed does not pass the homogeneity probe; the entry then
/// switches to the degree-two radicand of the same pattern as `ex51`.
fn ex52() -> RegistryEntry {
    let domain = DomainSpec::boxed(3, [-1.0, 1.0], [-2.0, 2.0])
        .with_constraints(&["y1^2 + y3^2"])
        .with_margin(0.05);
    let mut notes = vec![
        "the printed metric also carries a leading factor sigma(x2); it is left out of F and only used in the lift".to_string(),
    ];
    let printed = MetricSpace::new("ex52", 3, EX52_PRINTED, domain.clone()).expect("printed ex52 parses");
    let metric = match homogeneity_defect(&printed) {
        Some(d) if d < HOMOGENEITY_TOL => EX52_PRINTED,
        defect => {
            let shown = defect.map_or("not evaluable".to_string(), |d| format!("{d:.3e}"));
            notes.push(format!(
                "printed radicand (y1)^2+(y2)^2+(y2)^3+y2*sqrt((y1)^2+(y3)^2) fails the homogeneity probe (defect {shown}); \
                 substituted (y1)^2+(y3)^2+(y2)^2+y2*sqrt((y1)^2+(y3)^2)"
            ));
            EX52_HOMOGENEOUS
        }
    };
    RegistryEntry {
        name: "ex52".into(),
        dim: 3,
        metric: metric.into(),
        sigma: Some("log(2 + x2)".into()),
        domain,
        summary: "R^3 arctan-exponential metric with factor sigma(x2): lift is Landsberg, not Berwald".into(),
        expected_claims: landsberg_non_berwald_claims(2),
        notes,
    }
}

fn ex53() -> RegistryEntry {
    let a = "the lift is Berwald while the base is not, so G^i_jkh = -B^i_jkh; the lifted Landsberg tensor vanishes";
    RegistryEntry {
        name: "ex53".into(),
        dim: 3,
        metric: format!("((y1^2 + y2^2)^2 + exp(-2*({EX53_TAU}))*y3^4)^(1/4)"),
        sigma: Some(format!("({EX53_TAU})/2")),
        domain: DomainSpec::boxed(3, [-1.0, 1.0], [-2.0, 2.0])
            .with_constraints(&["y1^2 + y2^2", "y3^2"])
            .with_margin(0.04),
        summary: "R^3 quartic metric with embedded factor exp(-2 tau(x1, x2)): a non-Berwald space whose lift is Berwald".into(),
        expected_claims: vec![
            claim(vanishes(Quantity::LiftedBerwald), a),
            claim(exceeds(Quantity::Berwald, 1e-3), a),
            claim(vanishes(Quantity::BerwaldPlusDelta), a),
            claim(vanishes(Quantity::LiftedLandsberg), a),
        ],
        notes: vec![format!(
            "tau = {EX53_TAU}; the lift factor is exp(tau/2), the one that cancels the embedded factor (with exp(tau) the lift leaves G^i_jkh unchanged)"
        )],
    }
}

fn randers_control() -> RegistryEntry {
    RegistryEntry {
        name: "randersControl".into(),
        dim: 3,
        metric: "sqrt(y1^2 + y2^2 + y3^2) + 0.3*y1 - 0.2*y3".into(),
        sigma: Some("0.5*x1 + x2*x3".into()),
        domain: DomainSpec::boxed(3, [-1.0, 1.0], [-2.0, 2.0]).with_constraints(&["y1^2 + y2^2 + y3^2"]).with_margin(0.05),
        summary: "Minkowski Randers control metric: positive definite, C-reducible, Berwald, T != 0".into(),
        expected_claims: vec![
            claim(vanishes(Quantity::Berwald), "Minkowski metrics are Berwald"),
            claim(exceeds(Quantity::Cartan, 1e-3), "Randers metrics are not Riemannian"),
            claim(Claim::PositiveDefinite, "|b| < 1 Randers metrics are regular"),
        ],
        notes: vec![],
    }
}

/// All entries, sorted by name.
pub fn catalogue() -> Vec<RegistryEntry> {
    let mut all = vec![
        euclidean(2),
        euclidean(3),
        euclidean(4),
        riemannian_exp(),
        ex31(),
        ex32(),
        ex51(),
        ex52(),
        ex53(),
        randers_control(),
    ];
    all.sort_by(|a, b| a.name.cmp(&b.name));
    all
}

pub fn registry(name: &str) -> Result<RegistryEntry> {
    catalogue()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// One line per entry: name, dimension and a summary of its claims.
pub fn list_examples() -> Vec<String> {
    catalogue()
        .iter()
        .map(|e| format!("{:<16} n={}  {}", e.name, e.dim, e.summary))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_sorted_and_complete() {
        let names: Vec<String> = catalogue().into_iter().map(|e| e.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert!(names.len() >= 9);
        for n in ["euclidean2", "euclidean3", "euclidean4", "riemannianExp", "ex31", "ex32", "ex51", "ex52", "ex53"] {
            assert!(names.iter().any(|x| x == n), "{n}");
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(registry("ex32").unwrap().dim, 4);
        assert_eq!(registry("ex31").unwrap().dim, 3);
        assert!(registry("nope").is_err());
    }

    #[test]
    fn entries_parse_and_are_homogeneous() {
        for e in catalogue() {
            let s = e.space().unwrap();
            e.conformal_factor().unwrap();
            let d = homogeneity_defect(&s).unwrap_or_else(|| panic!("{} has no probe point", e.name));
            assert!(d < HOMOGENEITY_TOL, "{}: {d}", e.name);
        }
    }

    #[test]
    fn ex52_substitution_is_logged() {
        let e = registry("ex52").unwrap();
        assert_eq!(e.metric, EX52_HOMOGENEOUS);
        assert!(e.notes.iter().any(|n| n.contains("homogeneity probe")));
    }

    #[test]
    fn ex31_domain_rejects_bad_directions() {
        let s = registry("ex31").unwrap().space().unwrap();
        assert!(s.admits(&Point::new([0.0; 3], [0.5, 1.0, 1.0])));
        assert!(!s.admits(&Point::new([0.0; 3], [0.5, 1.0, -1.0])));
        assert!(!s.admits(&Point::new([0.0; 3], [0.5, 0.01, 1.0])));
    }

    #[test]
    fn entries_round_trip_through_json() {
        for e in catalogue() {
            let text = serde_json::to_string(&e).unwrap();
            let back: RegistryEntry = serde_json::from_str(&text).unwrap();
            assert_eq!(back, e);
        }
    }

    #[test]
    fn listing_mentions_every_entry() {
        let lines = list_examples();
        assert!(lines.iter().any(|l| l.starts_with("ex31")));
        assert_eq!(lines.len(), catalogue().len());
    }

    #[test]
    fn quartic_closed_forms_at_a_point() {
        // printed form equals -1/2 of the y2-derivative counterpart; here just pin values
        let y = [0.7, 0.4, 1.1, 0.8];
        let derived = ClosedForm::QuarticB44444Derived.value(&y, 0.0);
        assert!((derived - 0.237_037_037_037_036).abs() < 1e-12);
        let printed = ClosedForm::QuarticB44444Printed.value(&y, 0.0);
        assert!((printed + 7.585_185_185_185_19).abs() < 1e-11);
    }
}
