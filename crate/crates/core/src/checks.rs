//! Per-point evaluation of the named checks and of registry claims.

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayD, IxDyn};
use serde::{Deserialize, Serialize};

use crate::classify::{classify_geometry, special_forms};
use crate::conformal::{ConformalFactor, ConformalPoint};
use crate::error::{Error, GeometryError};
use crate::geometry::{c4_via_c3_derivative, LocalGeometry, MetricSpace, Point};
use crate::registry::{Claim, ClosedForm, ExpectedClaim, Quantity};
use crate::tensor::{contract_vector, max_abs, normalized, raise, raise_all, residual_between, IndexSymmetry, TensorBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Identities,
    Classify,
    ConformalLaws,
    SigmaT,
    NecessaryCondition,
    SpecialForms,
    BHierarchy,
    ClosedForms,
    Claims,
}

impl CheckKind {
    pub const ALL: [CheckKind; 9] = [
        CheckKind::Identities,
        CheckKind::Classify,
        CheckKind::ConformalLaws,
        CheckKind::SigmaT,
        CheckKind::NecessaryCondition,
        CheckKind::SpecialForms,
        CheckKind::BHierarchy,
        CheckKind::ClosedForms,
        CheckKind::Claims,
    ];

    pub fn needs_sigma(self) -> bool {
        matches!(
            self,
            CheckKind::ConformalLaws | CheckKind::SigmaT | CheckKind::NecessaryCondition | CheckKind::BHierarchy
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Identities => "identities",
            CheckKind::Classify => "classify",
            CheckKind::ConformalLaws => "conformal-laws",
            CheckKind::SigmaT => "sigma-t",
            CheckKind::NecessaryCondition => "necessary-condition",
            CheckKind::SpecialForms => "special-forms",
            CheckKind::BHierarchy => "b-hierarchy",
            CheckKind::ClosedForms => "closed-forms",
            CheckKind::Claims => "claims",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown check `{s}`")))
    }
}

/// How the values of an item turn into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Expectation {
    /// Normalized residual below tolerance at every point.
    Vanishes,
    /// Largest magnitude over the sample above the threshold.
    Exceeds,
    /// Positive at every point; the value is reported for information.
    Positive,
}

/// One item's value at one point. `value` is `None` where the quantity is
/// undefined.
#[derive(Debug, Clone)]
pub struct Row {
    pub check: CheckKind,
    pub item: String,
    pub expectation: Expectation,
    pub tolerance: f64,
    pub value: Option<f64>,
    /// Pointwise verdict, used by [`Expectation::Positive`].
    pub ok: bool,
    /// Why `value` is missing, when it is.
    pub error: Option<GeometryError>,
}

/// Built-in tolerance for items that carry their own; everything else uses
/// the run's default.
pub fn pinned_tolerance(item: &str) -> Option<f64> {
    match item {
        "scalingL" | "scalingG" | "scalingGInv" => Some(1e-10),
        "landsbergLaw" | "landsbergDelta" | "b4DirectFormula" | "b4DirectTForm" | "b4FormulaTForm" => Some(1e-7),
        "eulerChain" | "tSymmetry" | "tTransversality" | "sAntisymmetry" | "cSContraction" => Some(1e-9),
        "homogeneity" => Some(1e-12),
        "c4DualPath" => Some(1e-7),
        _ => None,
    }
}

/// The spaces and conformal factor shared by every point of a run.
pub struct Subject<'a> {
    pub space: &'a MetricSpace,
    pub lifted: Option<&'a MetricSpace>,
    pub cf: Option<&'a ConformalFactor>,
}

struct Ctx<'a> {
    plain: Option<LocalGeometry<'a>>,
    cp: Option<ConformalPoint<'a>>,
    point: Point,
}

impl<'a> Ctx<'a> {
    fn new(subject: &Subject<'a>, p: &Point) -> Self {
        match (subject.lifted, subject.cf) {
            (Some(lifted), Some(cf)) => Ctx {
                plain: None,
                cp: Some(ConformalPoint::new(subject.space, lifted, cf, p)),
                point: p.clone(),
            },
            _ => Ctx {
                plain: Some(LocalGeometry::new(subject.space, p)),
                cp: None,
                point: p.clone(),
            },
        }
    }

    fn geo(&self) -> &LocalGeometry<'a> {
        match (&self.cp, &self.plain) {
            (Some(cp), _) => &cp.base,
            (None, Some(g)) => g,
            (None, None) => unreachable!("context always holds a geometry"),
        }
    }

    fn conformal(&self) -> Result<&ConformalPoint<'a>, GeometryError> {
        self.cp.as_ref().ok_or(GeometryError::Undefined("conformal factor"))
    }
}

struct Rows<'t> {
    rows: Vec<Row>,
    check: CheckKind,
    tolerance: &'t dyn Fn(CheckKind, &str) -> f64,
}

impl Rows<'_> {
    fn push(&mut self, item: &str, expectation: Expectation, value: Option<f64>, ok: bool) {
        let tolerance = (self.tolerance)(self.check, item);
        self.rows.push(Row {
            check: self.check,
            item: item.to_string(),
            expectation,
            tolerance,
            value,
            ok,
            error: None,
        });
    }

    fn failed(&mut self, item: &str, e: GeometryError) {
        self.push(item, Expectation::Vanishes, None, false);
        if let Some(r) = self.rows.last_mut() {
            r.error = Some(e);
        }
    }

    fn vanish(&mut self, item: &str, value: f64) {
        self.push(item, Expectation::Vanishes, Some(value), true);
    }

    fn vanish_opt(&mut self, item: &str, value: Option<f64>) {
        self.push(item, Expectation::Vanishes, value, true);
    }

    fn with_threshold(&mut self, item: &str, expectation: Expectation, threshold: f64, value: Option<f64>, ok: bool) {
        self.rows.push(Row {
            check: self.check,
            item: item.to_string(),
            expectation,
            tolerance: threshold,
            value,
            ok,
            error: None,
        });
    }
}

/// Rows produced by one check at one point. `error` is set when the check
/// as a whole could not be evaluated there.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: CheckKind,
    pub rows: Vec<Row>,
    pub error: Option<GeometryError>,
}

/// Evaluate the requested checks at one point. Tensors are shared between
/// checks through the point's caches; a failure in one check leaves the
/// others untouched.
pub fn evaluate_point(
    subject: &Subject,
    p: &Point,
    checks: &[CheckKind],
    claims: &[ExpectedClaim],
    tolerance: &dyn Fn(CheckKind, &str) -> f64,
) -> Vec<CheckOutcome> {
    let ctx = Ctx::new(subject, p);
    checks
        .iter()
        .map(|&check| {
            let mut rows = Rows {
                rows: Vec::new(),
                check,
                tolerance,
            };
            let error = run_check(&ctx, subject, check, claims, &mut rows).err();
            CheckOutcome {
                check,
                rows: rows.rows,
                error,
            }
        })
        .collect()
}

fn run_check(
    ctx: &Ctx,
    subject: &Subject,
    check: CheckKind,
    claims: &[ExpectedClaim],
    rows: &mut Rows,
) -> Result<(), GeometryError> {
    let tolerance = rows.tolerance;
    match check {
        CheckKind::Identities => identities(ctx, subject.space, rows)?,
        CheckKind::Classify => {
            let tol = tolerance(check, "classify");
            let c = classify_geometry(ctx.geo(), tol)?;
            rows.vanish("riemannian", c.riemannian.residual);
            rows.vanish("berwald", c.berwald.residual);
            rows.vanish("landsberg", c.landsberg.residual);
            rows.push("positiveDefinite", Expectation::Positive, Some(c.positive_definite.residual), c.positive_definite.holds);
            if let Some(cp) = &ctx.cp {
                let c = classify_geometry(&cp.lifted, tol)?;
                rows.vanish("liftedRiemannian", c.riemannian.residual);
                rows.vanish("liftedBerwald", c.berwald.residual);
                rows.vanish("liftedLandsberg", c.landsberg.residual);
                rows.push("liftedPositiveDefinite", Expectation::Positive, Some(c.positive_definite.residual), c.positive_definite.holds);
            }
        }
        CheckKind::ConformalLaws => {
            let cp = ctx.conformal()?;
            let [l, g, gi] = cp.scaling_residuals()?;
            rows.vanish("scalingL", l);
            rows.vanish("scalingG", g);
            rows.vanish("scalingGInv", gi);
            rows.vanish("landsbergLaw", cp.landsberg_law()?);
            rows.vanish("landsbergDelta", cp.landsberg_delta_residual()?);
        }
        CheckKind::SigmaT => {
            let (st, scale) = ctx.conformal()?.sigma_t()?;
            rows.vanish("sigmaT", normalized(max_abs(&st), scale));
        }
        CheckKind::NecessaryCondition => {
            let ns = ctx.conformal()?.necessary_scalars()?;
            rows.vanish("phi", normalized(ns.phi.abs(), ns.scale));
            rows.vanish_opt("phiS3", ns.phi_s3.map(|v| normalized(v.abs(), ns.scale)));
        }
        CheckKind::SpecialForms => {
            let s = special_forms(ctx.geo())?;
            rows.vanish("cReducible", s.c_reducible);
            rows.vanish_opt("c2Like", s.c2_like);
            rows.vanish_opt("s3Like", s.s3_like);
        }
        CheckKind::BHierarchy => {
            let cp = ctx.conformal()?;
            let [b1, b2, b3] = cp.spray_residuals()?;
            rows.vanish("b1", b1);
            rows.vanish("b2", b2);
            rows.vanish("b3", b3);
            let direct = cp.b4_direct()?;
            let formula = cp.b4_formula()?;
            let t_form = cp.b4_t_form()?;
            rows.vanish("b4DirectFormula", residual_between(&direct, &formula));
            rows.vanish("b4DirectTForm", residual_between(&direct, &t_form));
            rows.vanish("b4FormulaTForm", residual_between(&formula, &t_form));
            rows.vanish("b4Bir", residual_between(&direct, &cp.b4_from_bir()?));
        }
        CheckKind::ClosedForms => {
            for c in claims {
                if let Claim::ClosedForm { form, tolerance } = c.claim {
                    let v = closed_form_error(ctx, form)?;
                    rows.with_threshold(form.label(), Expectation::Vanishes, tolerance, Some(v), true);
                }
            }
        }
        CheckKind::Claims => {
            for c in claims.iter().filter(|c| !matches!(c.claim, Claim::ClosedForm { .. })) {
                if let Err(e) = claim_row(ctx, &c.claim, rows) {
                    rows.failed(&c.claim.label(), e);
                }
            }
        }
    }
    Ok(())
}

fn identities(ctx: &Ctx, space: &MetricSpace, rows: &mut Rows) -> Result<(), GeometryError> {
    let geo = ctx.geo();
    let m = geo.metric()?;
    let n = geo.dim();
    rows.vanish("homogeneity", space.homogeneity_defect(&ctx.point, &[0.5, 2.0, 3.0])?);
    let prod = ArrayD::from_shape_fn(IxDyn(&[n, n]), |ix| (0..n).map(|k| m.g[[ix[0], k]] * m.g_inv[[k, ix[1]]]).sum());
    let id = ArrayD::from_shape_fn(IxDyn(&[n, n]), |ix| if ix[0] == ix[1] { 1.0 } else { 0.0 });
    rows.vanish("gInverse", residual_between(&prod, &id));
    rows.vanish("eulerChain", geo.euler_chain()?);
    let l_form = m.h.mapv(|v| v / m.f);
    rows.vanish("angularMetric", residual_between(&m.l_deriv, &l_form));

    let all = |r: usize| IndexSymmetry::Symmetric((0..r).collect());
    rows.vanish("cartanSymmetry", TensorBlock::new("C", geo.c3()?.clone(), vec![all(3)]).symmetry_residual());
    let t4 = &geo.t_pack()?.t4;
    rows.vanish("tSymmetry", TensorBlock::new("T", t4.clone(), vec![all(4)]).symmetry_residual());
    let ty = contract_last(t4, &ctx.point.y);
    rows.vanish("tTransversality", normalized(max_abs(&ty), max_abs(t4) * max_abs(&ctx.point.y)));
    let g4 = geo.berwald()?;
    rows.vanish(
        "berwaldSymmetry",
        TensorBlock::new("G4", g4.clone(), vec![IndexSymmetry::Symmetric(vec![1, 2, 3])]).symmetry_residual(),
    );
    rows.vanish("landsbergSymmetry", TensorBlock::new("L", geo.landsberg()?, vec![all(3)]).symmetry_residual());

    let v = geo.v_curvature()?;
    rows.vanish(
        "sAntisymmetry",
        TensorBlock::new("S", v.s4.clone(), vec![IndexSymmetry::Antisymmetric(0, 1), IndexSymmetry::Antisymmetric(2, 3)])
            .symmetry_residual(),
    );
    rows.vanish("cSContraction", c_s_contraction(geo)?);
    rows.vanish("cIdentities", geo.c_identities()?.max());
    let c4_path = c4_via_c3_derivative(geo.expr(), &ctx.point)?;
    rows.vanish("c4DualPath", residual_between(geo.c4()?, &c4_path));
    Ok(())
}

/// Normalized `C^{hij} S_ijkl`, with the sum of absolute products as scale.
fn c_s_contraction(geo: &LocalGeometry) -> Result<f64, GeometryError> {
    let m = geo.metric()?;
    let n = geo.dim();
    let c_up = raise_all(geo.c3()?, &[0, 1, 2], &m.g_inv);
    let s4 = &geo.v_curvature()?.s4;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for h in 0..n {
        for k in 0..n {
            for l in 0..n {
                let (mut acc, mut abs) = (0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        let t = c_up[[h, i, j]] * s4[[i, j, k, l]];
                        acc += t;
                        abs += t.abs();
                    }
                }
                worst = worst.max(acc.abs());
                scale = scale.max(abs);
            }
        }
    }
    Ok(normalized(worst, scale))
}

fn closed_form_error(ctx: &Ctx, form: ClosedForm) -> Result<f64, GeometryError> {
    let geo = ctx.geo();
    let m = geo.metric()?;
    let y = &ctx.point.y;
    if y.len() != 4 {
        return Err(GeometryError::Undefined("closed form outside four dimensions"));
    }
    let engine = match form {
        ClosedForm::QuarticT4444 => {
            let t4 = &geo.t_pack()?.t4;
            (0..4).map(|r| m.g_inv[[3, r]] * t4[[r, 3, 3, 3]]).sum()
        }
        ClosedForm::QuarticB44444Printed | ClosedForm::QuarticB44444Derived => ctx.conformal()?.bir()?[[3, 3, 3, 3, 3]],
    };
    let expected = form.value(y, m.f);
    Ok(relative_error(engine, expected))
}

pub fn relative_error(value: f64, expected: f64) -> f64 {
    let d = (value - expected).abs();
    let s = value.abs().max(expected.abs());
    if s == 0.0 {
        0.0
    } else {
        d / s
    }
}

fn claim_row(ctx: &Ctx, claim: &Claim, rows: &mut Rows) -> Result<(), GeometryError> {
    let label = claim.label();
    match claim {
        Claim::Vanishes { quantity } => {
            let (_, residual) = measure(ctx, quantity)?;
            rows.vanish(&label, residual);
        }
        Claim::Exceeds { quantity, threshold } => {
            let (raw, _) = measure(ctx, quantity)?;
            rows.with_threshold(&label, Expectation::Exceeds, *threshold, Some(raw), true);
        }
        Claim::PositiveDefinite => {
            let m = ctx.geo().metric()?;
            rows.push(
                &label,
                Expectation::Positive,
                Some(crate::linalg::min_eigenvalue(&m.g)),
                crate::linalg::is_positive_definite(&m.g),
            );
        }
        Claim::ClosedForm { form, tolerance } => {
            let v = closed_form_error(ctx, *form)?;
            rows.with_threshold(&label, Expectation::Vanishes, *tolerance, Some(v), true);
        }
    }
    Ok(())
}

/// Largest magnitude of a quantity and its normalized residual.
fn measure(ctx: &Ctx, q: &Quantity) -> Result<(f64, f64), GeometryError> {
    let zero = |a: &ArrayD<f64>, scale: f64| {
        let m = max_abs(a);
        (m, normalized(m, scale))
    };
    let geo = ctx.geo();
    Ok(match q {
        Quantity::Cartan => zero(geo.c3()?, max_abs(&geo.metric()?.g)),
        Quantity::Berwald => zero(geo.berwald()?, max_abs(&geo.spray()?.g_conn)),
        Quantity::Landsberg => landsberg_measure(geo)?,
        Quantity::TTensor => {
            let m = geo.metric()?;
            let scale = m.f * max_abs(geo.c4()?) + max_abs(geo.c3()?) * max_abs(&m.l);
            zero(&geo.t_pack()?.t4, scale)
        }
        Quantity::VCurvature => {
            let c = max_abs(geo.c3()?);
            zero(&geo.v_curvature()?.s4, c * c * max_abs(&geo.metric()?.g_inv))
        }
        Quantity::LiftedBerwald => {
            let lg = &ctx.conformal()?.lifted;
            zero(lg.berwald()?, max_abs(&lg.spray()?.g_conn))
        }
        Quantity::LiftedLandsberg => landsberg_measure(&ctx.conformal()?.lifted)?,
        Quantity::SigmaT => {
            let (st, scale) = ctx.conformal()?.sigma_t()?;
            zero(&st, scale)
        }
        Quantity::SigmaBirSlot { slot } => {
            let cp = ctx.conformal()?;
            let r = slot.checked_sub(1).filter(|r| *r < geo.dim()).ok_or(GeometryError::Undefined("slot index"))?;
            let s = cp.sigma()?;
            let bir = cp.bir()?;
            let slice = bir.index_axis(ndarray::Axis(1), r).mapv(|v| s.grad[r] * v);
            zero(&slice, s.grad[r].abs() * max_abs(bir))
        }
        Quantity::Bir => zero(ctx.conformal()?.bir()?, 0.0),
        Quantity::SigmaC => {
            let v = ctx.conformal()?.sigma_c()?.sigma_c.abs();
            (v, normalized(v, 0.0))
        }
        Quantity::Phi => {
            let ns = ctx.conformal()?.necessary_scalars()?;
            (ns.phi.abs(), normalized(ns.phi.abs(), ns.scale))
        }
        Quantity::BerwaldPlusDelta => {
            let cp = ctx.conformal()?;
            let g4 = geo.berwald()?;
            let b = cp.b4_formula()?;
            let sum = g4 + &b;
            zero(&sum, max_abs(g4).max(max_abs(&b)))
        }
        Quantity::TRaisedSlice { upper } => {
            let h = upper.checked_sub(1).filter(|h| *h < geo.dim()).ok_or(GeometryError::Undefined("upper index"))?;
            let t_up = raise(&geo.t_pack()?.t4, 0, &geo.metric()?.g_inv);
            let slice = t_up.index_axis(ndarray::Axis(0), h).to_owned();
            zero(&slice, max_abs(&t_up))
        }
        Quantity::TRaisedComponent { index } => {
            if index.iter().any(|&i| i == 0 || i > geo.dim()) {
                return Err(GeometryError::Undefined("component index"));
            }
            let t_up = raise(&geo.t_pack()?.t4, 0, &geo.metric()?.g_inv);
            let v = t_up[[index[0] - 1, index[1] - 1, index[2] - 1, index[3] - 1]].abs();
            (v, normalized(v, max_abs(&t_up)))
        }
    })
}

fn landsberg_measure(geo: &LocalGeometry) -> Result<(f64, f64), GeometryError> {
    let m = geo.metric()?;
    let l = geo.landsberg()?;
    let raw = max_abs(&l);
    let scale = 0.5 * m.f * max_abs(&m.l) * max_abs(&geo.spray()?.g_conn);
    Ok((raw, normalized(raw, scale)))
}

/// `T^h_ijk` with the first slot raised.
pub fn t_raised(geo: &LocalGeometry) -> Result<ArrayD<f64>, GeometryError> {
    Ok(raise(&geo.t_pack()?.t4, 0, &geo.metric()?.g_inv))
}

/// `σ_r B^{ir}_jkh` for one `r` (0-based), no summation.
pub fn sigma_bir_slot(cp: &ConformalPoint, r: usize) -> Result<ArrayD<f64>, GeometryError> {
    let s = cp.sigma()?;
    let bir = cp.bir()?;
    Ok(bir.index_axis(ndarray::Axis(1), r).mapv(|v| s.grad[r] * v))
}

/// `G^i_jkh y^h`-style contraction helper re-exported for examples.
pub fn contract_last(t: &ArrayD<f64>, v: &[f64]) -> ArrayD<f64> {
    contract_vector(t, t.ndim() - 1, v)
}
