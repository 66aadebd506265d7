//! Conformal change `F̄ = e^{σ(x)} F` and the transformation laws of the
//! spray hierarchy, Berwald and Landsberg tensors.

use ndarray::{ArrayD, IxDyn};
use once_cell::unsync::OnceCell;

use crate::error::{Error, GeometryError, Result};
use crate::expr::{Axis, BinaryOp, Coord, Expr, UnaryOp};
use crate::geometry::{base, lift, parse_expr, LocalGeometry, MetricSpace, Point, Probe};
use crate::jet::Jet;
use crate::tensor::{max_abs, raise, raise_all, residual_between};

/// A conformal factor `e^σ` with `σ` a function of position only.
#[derive(Debug, Clone)]
pub struct ConformalFactor {
    pub text: String,
    pub sigma: Expr,
}

impl ConformalFactor {
    pub fn new(text: &str, dim: usize) -> Result<Self> {
        let sigma = parse_expr(text, dim)?;
        Self::from_expr(sigma)
    }

    pub fn from_expr(sigma: Expr) -> Result<Self> {
        if sigma.mentions(Axis::Y) {
            return Err(Error::Config(format!(
                "conformal factor `{sigma}` must not depend on y"
            )));
        }
        Ok(ConformalFactor {
            text: sigma.to_string(),
            sigma,
        })
    }

    pub fn zero() -> Self {
        ConformalFactor {
            text: "0".into(),
            sigma: Expr::constant(0.0),
        }
    }
}

/// The space with metric `exp(σ)·F` on the same domain.
pub fn conformal_lift(space: &MetricSpace, cf: &ConformalFactor) -> Result<MetricSpace> {
    if cf.sigma.mentions(Axis::Y) {
        return Err(Error::Config("conformal factor must not depend on y".into()));
    }
    if cf.sigma.max_index().is_some_and(|i| i >= space.dim) {
        return Err(Error::Config("conformal factor uses a coordinate beyond the dimension".into()));
    }
    let lifted = Expr::Binary(
        BinaryOp::Mul,
        Box::new(Expr::Unary(UnaryOp::Exp, Box::new(cf.sigma.clone()))),
        Box::new(space.metric.clone()),
    );
    MetricSpace::from_expr(&format!("{}~", space.name), space.dim, lifted, space.domain.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPack {
    pub sigma: f64,
    pub exp_sigma: f64,
    /// `σ_i = ∂_i σ`
    pub grad: Vec<f64>,
    /// `σ_0 = σ_i y^i`
    pub sigma0: f64,
    /// `σ^i = g^{ij} σ_j`
    pub up: Vec<f64>,
}

/// Raised Cartan data shared by the conformal formulas.
struct Raised {
    n: usize,
    f: f64,
    l: Vec<f64>,
    l_up: Vec<f64>,
    g: ArrayD<f64>,
    h: ArrayD<f64>,
    /// `C_abc`
    c3: ArrayD<f64>,
    /// `C^a_bc`
    c_m: ArrayD<f64>,
    /// `C^{ab}_c`
    c_uu: ArrayD<f64>,
    /// `C^a_bcd`
    c4_m: ArrayD<f64>,
    /// `C^{ab}_cd`
    c4_uu: ArrayD<f64>,
}

impl Raised {
    fn new(geo: &LocalGeometry) -> Result<Self, GeometryError> {
        let m = geo.metric()?;
        let gi = &m.g_inv;
        let c3 = geo.c3()?.clone();
        let c4 = geo.c4()?;
        Ok(Raised {
            n: geo.dim(),
            f: m.f,
            l: m.l.clone(),
            l_up: m.l_up(),
            g: m.g.clone(),
            h: m.h.clone(),
            c_m: raise(&c3, 0, gi),
            c_uu: raise_all(&c3, &[0, 1], gi),
            c4_m: raise(c4, 0, gi),
            c4_uu: raise_all(c4, &[0, 1], gi),
            c3,
        })
    }

    fn sum(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.n).map(f).sum()
    }
}

/// Everything needed to compare a space with its conformal lift at one point.
pub struct ConformalPoint<'a> {
    pub base: LocalGeometry<'a>,
    pub lifted: LocalGeometry<'a>,
    sigma_expr: &'a Expr,
    point: Point,
    bir: OnceCell<ArrayD<f64>>,
}

impl<'a> ConformalPoint<'a> {
    pub fn new(space: &'a MetricSpace, lifted: &'a MetricSpace, cf: &'a ConformalFactor, p: &Point) -> Self {
        ConformalPoint {
            base: LocalGeometry::new(space, p),
            lifted: LocalGeometry::new(lifted, p),
            sigma_expr: &cf.sigma,
            point: p.clone(),
            bir: OnceCell::new(),
        }
    }

    fn n(&self) -> usize {
        self.point.dim()
    }

    pub fn sigma(&self) -> Result<SigmaPack, GeometryError> {
        sigma_with(&self.base, self.sigma_expr, &self.point)
    }

    /// Normalized residuals of `ℓ̄ = e^σ ℓ`, `ḡ = e^{2σ} g`, `ḡ⁻¹ = e^{−2σ} g⁻¹`.
    pub fn scaling_residuals(&self) -> Result<[f64; 3], GeometryError> {
        let s = self.sigma()?;
        let m = self.base.metric()?;
        let mb = self.lifted.metric()?;
        let e = s.exp_sigma;
        let vec = |v: &[f64]| ArrayD::from_shape_vec(IxDyn(&[v.len()]), v.to_vec()).expect("vector");
        Ok([
            residual_between(&vec(&mb.l), &vec(&m.l).mapv(|v| e * v)),
            residual_between(&mb.g, &m.g.mapv(|v| e * e * v)),
            residual_between(&mb.g_inv, &m.g_inv.mapv(|v| v / (e * e))),
        ])
    }

    /// `B^i = σ_0 y^i − ½ F² σ^i`
    pub fn b1(&self) -> Result<Vec<f64>, GeometryError> {
        let s = self.sigma()?;
        let f = self.base.metric()?.f;
        Ok((0..self.n())
            .map(|i| s.sigma0 * self.point.y[i] - 0.5 * f * f * s.up[i])
            .collect())
    }

    /// `B^i_j = σ_j y^i + σ_0 δ^i_j − F σ^i ℓ_j + F² σ_r C^{ir}_j`
    pub fn b2(&self) -> Result<ArrayD<f64>, GeometryError> {
        let s = self.sigma()?;
        let r = Raised::new(&self.base)?;
        let y = &self.point.y;
        let f = r.f;
        Ok(ArrayD::from_shape_fn(IxDyn(&[r.n, r.n]), |ix| {
            let (i, j) = (ix[0], ix[1]);
            s.grad[j] * y[i] + if i == j { s.sigma0 } else { 0.0 } - f * s.up[i] * r.l[j]
                + f * f * r.sum(|q| s.grad[q] * r.c_uu[[i, q, j]])
        }))
    }

    /// `B^i_jk` in closed form.
    pub fn b3(&self) -> Result<ArrayD<f64>, GeometryError> {
        let s = self.sigma()?;
        let r = Raised::new(&self.base)?;
        let f = r.f;
        let n = r.n;
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Ok(ArrayD::from_shape_fn(IxDyn(&[n, n, n]), |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            s.grad[j] * d(i, k) + s.grad[k] * d(i, j) - s.up[i] * r.g[[j, k]]
                + r.sum(|q| {
                    s.grad[q]
                        * (2.0 * f * r.c_uu[[i, q, k]] * r.l[j]
                            + 2.0 * f * r.c_uu[[i, q, j]] * r.l[k]
                            + f * f
                                * (r.c4_uu[[i, q, j, k]]
                                    - 2.0 * r.sum(|t| r.c_m[[q, t, j]] * r.c_uu[[i, t, k]])
                                    - 2.0 * r.sum(|t| r.c_m[[i, t, j]] * r.c_uu[[q, t, k]])))
                })
        }))
    }

    /// Normalized residuals of `Ḡ^i − G^i = B^i`, and likewise for `G^i_j`
    /// and `G^i_jk`.
    pub fn spray_residuals(&self) -> Result<[f64; 3], GeometryError> {
        let sp = self.base.spray()?;
        let spb = self.lifted.spray()?;
        let vec = |v: &[f64]| ArrayD::from_shape_vec(IxDyn(&[v.len()]), v.to_vec()).expect("vector");
        let d1 = vec(&spb.g) - vec(&sp.g);
        let d2 = &spb.g_jac - &sp.g_jac;
        let d3 = &spb.g_conn - &sp.g_conn;
        Ok([
            residual_between(&d1, &vec(&self.b1()?)),
            residual_between(&d2, &self.b2()?),
            residual_between(&d3, &self.b3()?),
        ])
    }

    /// `Ḡ^i_jkh − G^i_jkh` from jets on both spaces.
    pub fn b4_direct(&self) -> Result<ArrayD<f64>, GeometryError> {
        Ok(self.lifted.berwald()? - self.base.berwald()?)
    }

    /// `B^{ir}_jkh = ∂̇_j ∂̇_k ∂̇_h (F² g^{ir})` at `[i, r, j, k, h]`.
    pub fn bir(&self) -> Result<&ArrayD<f64>, GeometryError> {
        self.bir.get_or_try_init(|| {
            lift(self.base.expr(), &self.point, 3, |p| {
                let b = base::<Jet>(p)?;
                let f2 = b.f * b.f;
                Ok(b.g_inv.mapv(|v| f2 * v))
            })
        })
    }

    /// `−½ B^{ir}_jkh σ_r` at `[i, j, k, h]`.
    pub fn b4_from_bir(&self) -> Result<ArrayD<f64>, GeometryError> {
        let s = self.sigma()?;
        let bir = self.bir()?;
        Ok(crate::tensor::contract_vector(bir, 1, &s.grad).mapv(|v| -0.5 * v))
    }

    /// `B^i_jkh` in direct form from Cartan tensors up to rank five.
    pub fn b4_formula(&self) -> Result<ArrayD<f64>, GeometryError> {
        let s = self.sigma()?;
        let r = Raised::new(&self.base)?;
        let gi = &self.base.metric()?.g_inv;
        let c5u = raise_all(self.base.c5()?, &[0, 1], gi);
        let (n, f, l, g) = (r.n, r.f, &r.l, &r.g);
        let (c3, cm, cu, c4m, c4u) = (&r.c3, &r.c_m, &r.c_uu, &r.c4_m, &r.c4_uu);
        Ok(ArrayD::from_shape_fn(IxDyn(&[n; 4]), |ix| {
            let (i, j, k, h) = (ix[0], ix[1], ix[2], ix[3]);
            // C^r_sa C^{si}_b + C^i_sa C^{sr}_b
            let pair = |q: usize, a: usize, b: usize| r.sum(|t| cm[[q, t, a]] * cu[[t, i, b]] + cm[[i, t, a]] * cu[[t, q, b]]);
            // C^r_sab C^{si}_c + C^i_sab C^{sr}_c
            let pair4 = |q: usize, a: usize, b: usize, c: usize| {
                r.sum(|t| c4m[[q, t, a, b]] * cu[[t, i, c]] + c4m[[i, t, a, b]] * cu[[t, q, c]])
            };
            let per_r = |q: usize| {
                f * f * c5u[[i, q, j, k, h]]
                    + 2.0 * (cu[[i, q, j]] * g[[k, h]] + cu[[i, q, h]] * g[[j, k]] + cu[[i, q, k]] * g[[j, h]])
                    + 2.0 * f * (c4u[[i, q, j, k]] * l[h] + c4u[[i, q, h, j]] * l[k] + c4u[[i, q, k, h]] * l[j])
                    - 4.0 * f * (pair(q, j, k) * l[h] + pair(q, j, h) * l[k] + pair(q, k, h) * l[j])
                    - 2.0 * f * f * (pair4(q, j, k, h) + pair4(q, j, h, k) + pair4(q, k, h, j))
                    + 4.0
                        * f
                        * f
                        * r.sum(|u| {
                            r.sum(|t| {
                                (c3[[u, t, j]] * cu[[t, i, k]] + c3[[u, t, k]] * cu[[t, i, j]]) * cu[[u, q, h]]
                                    + (c3[[u, t, j]] * cu[[i, t, h]] + c3[[u, t, h]] * cu[[i, t, j]]) * cu[[u, q, k]]
                                    + (c3[[u, t, k]] * cu[[i, t, h]] + c3[[u, t, h]] * cu[[i, t, k]]) * cu[[u, q, j]]
                            })
                        })
            };
            // −2σ^i C_jkh is the y-derivative of g_jk in the −σ^i g_jk term of B^i_jk
            r.sum(|q| s.grad[q] * per_r(q)) - 2.0 * s.up[i] * c3[[j, k, h]]
        }))
    }

    /// `B^i_jkh` through the T-tensor, its y-derivative and the v-curvature.
    pub fn b4_t_form(&self) -> Result<ArrayD<f64>, GeometryError> {
        let s = self.sigma()?;
        let r = Raised::new(&self.base)?;
        let m = self.base.metric()?;
        let gi = &m.g_inv;
        let (n, f, l, lu, hl) = (r.n, r.f, &r.l, &r.l_up, &r.h);
        let (c3, cm, cu) = (&r.c3, &r.c_m, &r.c_uu);
        let h_m = raise(hl, 0, gi); // h^i_h
        let h_uu = raise_all(hl, &[0, 1], gi); // h^{ir}
        let t4 = &self.base.t_pack()?.t4;
        let tm = raise(t4, 0, gi); // T^a_bcd
        let tu = raise_all(t4, &[0, 1], gi); // T^{ab}_cd
        let t5 = self.base.t5()?;
        let s4 = &self.base.v_curvature()?.s4;
        let s_uu = raise_all(s4, &[1, 2], gi); // S_t^{ab}_c
        let s_last = raise(s4, 3, gi); // S_tab^c
        Ok(ArrayD::from_shape_fn(IxDyn(&[n; 4]), |ix| {
            let (i, j, k, h) = (ix[0], ix[1], ix[2], ix[3]);
            let per_r = |q: usize| {
                f * t5[[q, i, j, k, h]]
                    + (tu[[q, i, j, h]] * l[k] + tu[[q, i, k, h]] * l[j] + tu[[q, i, j, k]] * l[h]
                        - tm[[q, j, k, h]] * lu[i]
                        - tm[[i, j, k, h]] * lu[q])
                    - f * r.sum(|t| {
                        tm[[i, t, j, h]] * cu[[t, q, k]] + tm[[q, t, k, h]] * cu[[t, i, j]] + tm[[q, t, j, h]] * cu[[t, i, k]]
                            + tm[[i, t, k, h]] * cu[[t, q, j]]
                            - tu[[q, i, t, h]] * cm[[t, j, k]]
                            - tm[[t, j, k, h]] * cu[[q, i, t]]
                    })
                    + (cu[[q, i, j]] * hl[[k, h]] + cu[[q, i, k]] * hl[[j, h]] + 2.0 * cu[[i, q, h]] * hl[[j, k]]
                        - cm[[q, j, k]] * h_m[[i, h]]
                        - cm[[i, j, k]] * h_m[[q, h]]
                        - 2.0 * c3[[j, k, h]] * h_uu[[i, q]])
                    + f * f
                        * r.sum(|t| {
                            cm[[t, h, j]] * s_uu[[t, i, q, k]] + cm[[t, h, k]] * s_uu[[t, q, i, j]]
                                - cu[[t, i, h]] * s_last[[t, j, k, q]]
                                - cu[[t, q, h]] * s_last[[t, k, j, i]]
                                - cu[[t, i, j]] * s_last[[t, h, k, q]]
                                - cu[[t, q, k]] * s_last[[t, h, j, i]]
                        })
            };
            r.sum(|q| s.grad[q] * per_r(q))
        }))
    }

    /// `σ_r T^r_jkh` at `[j, k, h]` and the largest single product
    /// `|σ_r T^r_jkh|` as reference scale.
    pub fn sigma_t(&self) -> Result<(ArrayD<f64>, f64), GeometryError> {
        let s = self.sigma()?;
        let m = self.base.metric()?;
        let t_up = raise(&self.base.t_pack()?.t4, 0, &m.g_inv);
        let scale = t_up
            .indexed_iter()
            .map(|(ix, v)| (s.grad[ix[0]] * v).abs())
            .fold(0.0, f64::max);
        Ok((crate::tensor::contract_vector(&t_up, 0, &s.grad), scale))
    }

    /// Residual of `L̄ = e^{2σ}(L + F σ_r T^r_jkh)`.
    pub fn landsberg_law(&self) -> Result<f64, GeometryError> {
        let (lb, rhs) = self.landsberg_sides(2.0)?;
        Ok(residual_between(&lb, &rhs))
    }

    /// Residual of `L̄ = e^σ L + e^{2σ} F σ_r T^r_jkh`, with the first term
    /// scaled by `e^σ` instead of `e^{2σ}`.
    pub fn landsberg_law_single_weight(&self) -> Result<f64, GeometryError> {
        let (lb, rhs) = self.landsberg_sides(1.0)?;
        Ok(residual_between(&lb, &rhs))
    }

    fn landsberg_sides(&self, weight: f64) -> Result<(ArrayD<f64>, ArrayD<f64>), GeometryError> {
        let s = self.sigma()?;
        let f = self.base.metric()?.f;
        let l = self.base.landsberg()?;
        let lb = self.lifted.landsberg()?;
        let (st, _) = self.sigma_t()?;
        let e = s.exp_sigma;
        let rhs = &l.mapv(|v| e.powf(weight) * v) + &st.mapv(|v| e * e * f * v);
        Ok((lb, rhs))
    }

    /// `−½ F ℓ_i B^i_jkh` against `F σ_r T^r_jkh`.
    pub fn landsberg_delta_residual(&self) -> Result<f64, GeometryError> {
        let m = self.base.metric()?;
        let b4 = self.b4_direct()?;
        let lhs = crate::tensor::contract_vector(&b4, 0, &m.l).mapv(|v| -0.5 * m.f * v);
        let (st, _) = self.sigma_t()?;
        Ok(residual_between(&lhs, &st.mapv(|v| m.f * v)))
    }

    /// Left-hand scalars of the necessary condition for the lift of a
    /// Berwald space to be Berwald, in general form and in the form for
    /// `S_3`-like spaces.
    pub fn necessary_scalars(&self) -> Result<NecessaryScalars, GeometryError> {
        let s = self.sigma()?;
        let m = self.base.metric()?;
        let gi = &m.g_inv;
        let n = self.n();
        let cp = self.base.cartan(3)?;
        let t = self.base.t_pack()?;
        let v = self.base.v_curvature()?;
        let c_up3 = raise_all(&cp.c3, &[0, 1, 2], gi);
        let ricci_mixed = raise(&v.ricci, 1, gi); // S_u^r
        let l_up = m.l_up();
        let f = m.f;
        let tc = |r: usize| -> f64 {
            (0..n).flat_map(|u| (0..n).map(move |w| (u, w))).map(|(u, w)| t.t2[[u, w]] * c_up3[[u, w, r]]).sum()
        };
        let cs = |r: usize| -> f64 { (0..n).map(|u| cp.c1_up[u] * ricci_mixed[[u, r]]).sum() };
        let nm2 = n as f64 - 2.0;
        let mut phi = 0.0;
        let mut phi_s3 = 0.0;
        let mut scale = 0.0f64;
        for r in 0..n {
            let terms = [nm2 * cp.c1_up[r], f * f * cs(r), -f * tc(r), -t.t * l_up[r]];
            phi += s.grad[r] * terms.iter().sum::<f64>();
            scale = scale.max(terms.iter().map(|x| (s.grad[r] * x).abs()).fold(0.0, f64::max));
            if let Some(rho) = v.rho {
                phi_s3 += s.grad[r] * (nm2 * (1.0 + f * f * rho) * cp.c1_up[r] - f * tc(r) - t.t * l_up[r]);
            }
        }
        Ok(NecessaryScalars {
            phi,
            phi_s3: v.rho.map(|_| phi_s3),
            scale,
        })
    }

    /// `σ_r C^r` and the largest component of `σ_r C^r_jk`.
    pub fn sigma_c(&self) -> Result<SigmaC, GeometryError> {
        let s = self.sigma()?;
        let cp = self.base.cartan(3)?;
        let gi = &self.base.metric()?.g_inv;
        let cm = raise(&cp.c3, 0, gi);
        let contracted = crate::tensor::contract_vector(&cm, 0, &s.grad);
        Ok(SigmaC {
            sigma_c: s.grad.iter().zip(&cp.c1_up).map(|(a, b)| a * b).sum(),
            sigma_c2_max: max_abs(contracted.iter()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NecessaryScalars {
    pub phi: f64,
    pub phi_s3: Option<f64>,
    /// Largest single term entering `phi`.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaC {
    pub sigma_c: f64,
    pub sigma_c2_max: f64,
}

#[derive(Debug, Clone)]
pub struct ConformalDeltas {
    pub b1: Vec<f64>,
    pub b2: ArrayD<f64>,
    pub b3: ArrayD<f64>,
    pub b4_direct: ArrayD<f64>,
    pub b4_formula: ArrayD<f64>,
    pub b4_t_form: ArrayD<f64>,
    pub bir: ArrayD<f64>,
}

impl ConformalDeltas {
    /// Pairwise residuals `(direct, formula)`, `(direct, T-form)`,
    /// `(formula, T-form)`.
    pub fn agreement(&self) -> [f64; 3] {
        [
            residual_between(&self.b4_direct, &self.b4_formula),
            residual_between(&self.b4_direct, &self.b4_t_form),
            residual_between(&self.b4_formula, &self.b4_t_form),
        ]
    }
}

pub fn sigma_pack(cf: &ConformalFactor, space: &MetricSpace, p: &Point) -> Result<SigmaPack, GeometryError> {
    let geo = LocalGeometry::new(space, p);
    sigma_with(&geo, &cf.sigma, p)
}

fn sigma_with(geo: &LocalGeometry, sigma: &Expr, p: &Point) -> Result<SigmaPack, GeometryError> {
    let probe = Probe::plain(sigma, p);
    let n = p.dim();
    let value: f64 = probe.value(&[])?;
    let grad = (0..n)
        .map(|i| probe.value::<f64>(&[Coord::x(i)]))
        .collect::<Result<Vec<_>, _>>()?;
    let m = geo.metric()?;
    let up = (0..n).map(|i| (0..n).map(|j| m.g_inv[[i, j]] * grad[j]).sum()).collect();
    Ok(SigmaPack {
        sigma: value,
        exp_sigma: value.exp(),
        sigma0: grad.iter().zip(&p.y).map(|(a, b)| a * b).sum(),
        grad,
        up,
    })
}

pub fn b_hierarchy(space: &MetricSpace, cf: &ConformalFactor, p: &Point) -> Result<ConformalDeltas> {
    let lifted = conformal_lift(space, cf)?;
    let cp = ConformalPoint::new(space, &lifted, cf, p);
    Ok(ConformalDeltas {
        b1: cp.b1()?,
        b2: cp.b2()?,
        b3: cp.b3()?,
        b4_direct: cp.b4_direct()?,
        b4_formula: cp.b4_formula()?,
        b4_t_form: cp.b4_t_form()?,
        bir: cp.bir()?.clone(),
    })
}

pub fn landsberg_law_residual(space: &MetricSpace, cf: &ConformalFactor, p: &Point) -> Result<f64> {
    let lifted = conformal_lift(space, cf)?;
    Ok(ConformalPoint::new(space, &lifted, cf, p).landsberg_law()?)
}

/// Outcome of testing `σ_r T^r_jkh = 0` over a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionOutcome {
    pub max_residual: f64,
    pub holds: bool,
}

pub fn sigma_t_condition(space: &MetricSpace, cf: &ConformalFactor, points: &[Point], tol: f64) -> Result<ConditionOutcome> {
    let lifted = conformal_lift(space, cf)?;
    let mut worst = 0.0f64;
    for p in points {
        let (st, scale) = ConformalPoint::new(space, &lifted, cf, p).sigma_t()?;
        worst = worst.max(crate::tensor::normalized(max_abs(st.iter()), scale));
    }
    Ok(ConditionOutcome {
        max_residual: worst,
        holds: worst < tol,
    })
}

pub fn berwald_necessary_scalar(space: &MetricSpace, cf: &ConformalFactor, p: &Point) -> Result<NecessaryScalars> {
    let lifted = conformal_lift(space, cf)?;
    Ok(ConformalPoint::new(space, &lifted, cf, p).necessary_scalars()?)
}

pub fn sigma_c_contractions(space: &MetricSpace, cf: &ConformalFactor, p: &Point) -> Result<SigmaC> {
    let lifted = conformal_lift(space, cf)?;
    Ok(ConformalPoint::new(space, &lifted, cf, p).sigma_c()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use approx::assert_abs_diff_eq;

    fn space(n: usize, f: &str) -> MetricSpace {
        MetricSpace::new("t", n, f, DomainSpec::boxed(n, [-1.0, 1.0], [0.2, 2.0])).unwrap()
    }

    #[test]
    fn sigma_derivatives() {
        let s = space(3, "sqrt(y1^2 + y2^2 + y3^2)");
        let p = Point::new([0.3, 0.5, -0.2], [1.0, 2.0, 0.5]);
        let lin = sigma_pack(&ConformalFactor::new("x1 + 2*x3", 3).unwrap(), &s, &p).unwrap();
        assert_eq!(lin.grad, vec![1.0, 0.0, 2.0]);
        assert_abs_diff_eq!(lin.sigma0, 2.0, epsilon = 1e-15);
        let log = sigma_pack(&ConformalFactor::new("log(x2)", 3).unwrap(), &s, &Point::new([0.3, 2.0, -0.2], [1.0, 2.0, 0.5])).unwrap();
        assert_abs_diff_eq!(log.grad[1], 0.5, epsilon = 1e-15);
        assert_eq!((log.grad[0], log.grad[2]), (0.0, 0.0));
        let zero = sigma_pack(&ConformalFactor::zero(), &s, &p).unwrap();
        assert_eq!((zero.sigma0, zero.exp_sigma), (0.0, 1.0));
    }

    #[test]
    fn sigma_must_not_depend_on_y() {
        assert!(ConformalFactor::new("x1 + y2", 2).is_err());
    }

    #[test]
    fn zero_factor_changes_nothing() {
        let s = space(3, "(y1^4 + y2^4 + y3^4)^(1/4)*exp(x1)");
        let d = b_hierarchy(&s, &ConformalFactor::zero(), &Point::new([0.1, 0.2, 0.3], [0.5, 1.1, 0.9])).unwrap();
        assert!(max_abs(&d.b1) < 1e-14);
        for t in [&d.b2, &d.b3, &d.b4_direct, &d.b4_formula, &d.b4_t_form] {
            assert!(max_abs(t) < 1e-10, "{}", max_abs(t));
        }
    }

    #[test]
    fn euclidean_lift_scales_metric() {
        let s = space(2, "sqrt(y1^2 + y2^2)");
        let cf = ConformalFactor::new("x2", 2).unwrap();
        let lifted = conformal_lift(&s, &cf).unwrap();
        let p = Point::new([0.4, 0.7], [1.0, 0.3]);
        let g = crate::geometry::metric_pack(&lifted, &p).unwrap().g;
        let e = (2.0f64 * 0.7).exp();
        assert_abs_diff_eq!(g[[0, 0]], e, epsilon = 1e-13);
        assert_abs_diff_eq!(g[[1, 1]], e, epsilon = 1e-13);
        assert_abs_diff_eq!(g[[0, 1]], 0.0, epsilon = 1e-13);
        assert!(landsberg_law_residual(&s, &cf, &p).unwrap() < 1e-14);
    }

    #[test]
    fn randers_lift_laws() {
        let s = space(3, "sqrt(y1^2 + y2^2 + y3^2) + 0.3*y1 - 0.2*y3");
        let cf = ConformalFactor::new("0.5*x1 + x2*x3", 3).unwrap();
        let p = Point::new([0.2, -0.3, 0.5], [0.9, 0.4, 1.3]);
        let d = b_hierarchy(&s, &cf, &p).unwrap();
        for r in d.agreement() {
            assert!(r < 1e-9, "{r}");
        }
        assert!(landsberg_law_residual(&s, &cf, &p).unwrap() < 1e-9);
        let outcome = sigma_t_condition(&s, &cf, std::slice::from_ref(&p), 1e-8).unwrap();
        assert!(!outcome.holds);
    }
}
