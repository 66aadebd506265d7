//! Intrinsic tensors of a Finsler function at a point of the slit tangent
//! bundle.
//!
//! Every array is stored with lower indices in the order the symbol is
//! written, e.g. `G^i_jkh` lives at `[i, j, k, h]`. Raised variants are formed
//! on demand with [`crate::tensor::raise`].

mod kernels;
mod probe;
mod space;

use ndarray::{ArrayD, IxDyn};
use once_cell::unsync::OnceCell;

use crate::error::GeometryError;
use crate::expr::{Coord, Expr};
use crate::jet::Jet;
use crate::tensor::{raise, raise_all, residual_between, residual_of_sum, trace};

pub(crate) use kernels::{base, cartan, lift, spray, t_from_probe, vector_array};
pub use probe::Probe;
pub(crate) use space::parse_expr;
pub use space::{DomainSpec, MetricSpace, Point, DEFAULT_MARGIN};

#[derive(Debug, Clone)]
pub struct MetricPack {
    pub f: f64,
    /// `ℓ_i = ∂̇_i F`
    pub l: Vec<f64>,
    pub g: ArrayD<f64>,
    pub g_inv: ArrayD<f64>,
    /// Angular metric `h_ij = g_ij − ℓ_i ℓ_j`.
    pub h: ArrayD<f64>,
    /// `ℓ_ij = ∂̇_j ℓ_i`, taken directly from second derivatives of `F`.
    pub l_deriv: ArrayD<f64>,
}

impl MetricPack {
    pub fn dim(&self) -> usize {
        self.l.len()
    }

    /// `ℓ^i = g^{ij} ℓ_j`
    pub fn l_up(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.g_inv[[i, j]] * self.l[j]).sum()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct CartanPack {
    /// `C_ijk = ½ ∂̇_k g_ij`
    pub c3: ArrayD<f64>,
    /// `C^h_ij` stored at `[i, j, h]`.
    pub c_mixed: ArrayD<f64>,
    /// Mean Cartan torsion `C_i = C_ijk g^{jk}`.
    pub c1: Vec<f64>,
    pub c1_up: Vec<f64>,
    /// `C² = C_i C^i`
    pub c_sq: f64,
    /// `C_ijkh = ∂̇_h C_ijk`
    pub c4: Option<ArrayD<f64>>,
    /// `C_lijkh = ∂̇_h C_lijk`
    pub c5: Option<ArrayD<f64>>,
}

#[derive(Debug, Clone)]
pub struct SprayPack {
    pub g: Vec<f64>,
    /// `G^i_j` at `[i, j]`.
    pub g_jac: ArrayD<f64>,
    /// `G^i_jk` at `[i, j, k]`.
    pub g_conn: ArrayD<f64>,
}

#[derive(Debug, Clone)]
pub struct BerwaldTensor {
    /// `G^i_jkh` at `[i, j, k, h]`.
    pub g4: ArrayD<f64>,
}

#[derive(Debug, Clone)]
pub struct LandsbergTensor {
    pub l: ArrayD<f64>,
}

#[derive(Debug, Clone)]
pub struct TTensorPack {
    pub t4: ArrayD<f64>,
    /// `T_ij = T_ijhk g^{hk}`
    pub t2: ArrayD<f64>,
    pub t: f64,
    /// `∂̇_h T^{ri}_jk` at `[r, i, j, k, h]`.
    pub t5: Option<ArrayD<f64>>,
}

#[derive(Debug, Clone)]
pub struct VCurvaturePack {
    /// `S_ijkh = C^r_ih C_rjk − C^r_ik C_rjh`
    pub s4: ArrayD<f64>,
    /// `S_i^h_jk` at `[i, h, j, k]`.
    pub s_mixed: ArrayD<f64>,
    /// `S_ik = S_ijkl g^{jl}`
    pub ricci: ArrayD<f64>,
    pub s: f64,
    /// `S / ((n−1)(n−2))`; absent in dimension two.
    pub rho: Option<f64>,
}

/// Residuals of the Cartan derivative identities and of the expression for
/// `C^{ir}_jkh` through the T-tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CIdentityResiduals {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub via_t: f64,
}

impl CIdentityResiduals {
    pub fn max(&self) -> f64 {
        [self.a, self.b, self.c, self.d, self.via_t].into_iter().fold(0.0, f64::max)
    }
}

/// Lazily computed tensors of one metric at one point. Dependents share the
/// metric and Cartan data computed for the same point.
pub struct LocalGeometry<'a> {
    expr: &'a Expr,
    point: Point,
    metric: OnceCell<MetricPack>,
    c3: OnceCell<ArrayD<f64>>,
    c4: OnceCell<ArrayD<f64>>,
    c5: OnceCell<ArrayD<f64>>,
    spray: OnceCell<SprayPack>,
    g4: OnceCell<ArrayD<f64>>,
    t: OnceCell<TTensorPack>,
    t5: OnceCell<ArrayD<f64>>,
    v: OnceCell<VCurvaturePack>,
}

impl<'a> LocalGeometry<'a> {
    pub fn new(space: &'a MetricSpace, point: &Point) -> Self {
        Self::of_expr(&space.metric, point)
    }

    pub fn of_expr(expr: &'a Expr, point: &Point) -> Self {
        LocalGeometry {
            expr,
            point: point.clone(),
            metric: OnceCell::new(),
            c3: OnceCell::new(),
            c4: OnceCell::new(),
            c5: OnceCell::new(),
            spray: OnceCell::new(),
            g4: OnceCell::new(),
            t: OnceCell::new(),
            t5: OnceCell::new(),
            v: OnceCell::new(),
        }
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn expr(&self) -> &Expr {
        self.expr
    }

    fn probe(&self) -> Probe<'_> {
        Probe::plain(self.expr, &self.point)
    }

    pub fn metric(&self) -> Result<&MetricPack, GeometryError> {
        self.metric.get_or_try_init(|| {
            let probe = self.probe();
            let b = base::<f64>(&probe)?;
            let n = self.dim();
            let h = ArrayD::from_shape_fn(IxDyn(&[n, n]), |ix| b.g[[ix[0], ix[1]]] - b.l[ix[0]] * b.l[ix[1]]);
            let l_deriv = crate::tensor::symmetric_from_fn(n, 2, |ix| {
                probe.value::<f64>(&[Coord::y(ix[0]), Coord::y(ix[1])])
            })?;
            Ok(MetricPack {
                f: b.f,
                l: b.l,
                g: b.g,
                g_inv: b.g_inv,
                h,
                l_deriv,
            })
        })
    }

    pub fn c3(&self) -> Result<&ArrayD<f64>, GeometryError> {
        self.c3.get_or_try_init(|| cartan::<f64>(&self.probe(), 3))
    }

    pub fn c4(&self) -> Result<&ArrayD<f64>, GeometryError> {
        self.c4.get_or_try_init(|| cartan::<f64>(&self.probe(), 4))
    }

    pub fn c5(&self) -> Result<&ArrayD<f64>, GeometryError> {
        self.c5.get_or_try_init(|| cartan::<f64>(&self.probe(), 5))
    }

    pub fn cartan(&self, depth: usize) -> Result<CartanPack, GeometryError> {
        let m = self.metric()?;
        let c3 = self.c3()?.clone();
        let c_mixed = raise(&c3, 2, &m.g_inv);
        let n = self.dim();
        let c1: Vec<f64> = trace(&c3, 1, 2, &m.g_inv).iter().copied().collect();
        let c1_up: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m.g_inv[[i, j]] * c1[j]).sum()).collect();
        let c_sq = c1.iter().zip(&c1_up).map(|(a, b)| a * b).sum();
        Ok(CartanPack {
            c3,
            c_mixed,
            c1,
            c1_up,
            c_sq,
            c4: if depth >= 4 { Some(self.c4()?.clone()) } else { None },
            c5: if depth >= 5 { Some(self.c5()?.clone()) } else { None },
        })
    }

    pub fn spray(&self) -> Result<&SprayPack, GeometryError> {
        self.spray.get_or_try_init(|| {
            let probe = self.probe();
            let m = self.metric()?;
            let g = spray::<f64>(&probe, &m.g_inv)?;
            let formula = |p: &Probe| -> Result<ArrayD<Jet>, GeometryError> {
                let b = base::<Jet>(p)?;
                Ok(vector_array(spray::<Jet>(p, &b.g_inv)?))
            };
            let g_jac = lift(self.expr, &self.point, 1, formula)?;
            let g_conn = lift(self.expr, &self.point, 2, formula)?;
            Ok(SprayPack { g, g_jac, g_conn })
        })
    }

    pub fn berwald(&self) -> Result<&ArrayD<f64>, GeometryError> {
        self.g4.get_or_try_init(|| {
            lift(self.expr, &self.point, 3, |p| {
                let b = base::<Jet>(p)?;
                Ok(vector_array(spray::<Jet>(p, &b.g_inv)?))
            })
        })
    }

    /// `L_jkh = −½ F ℓ_i G^i_jkh`
    pub fn landsberg(&self) -> Result<ArrayD<f64>, GeometryError> {
        let m = self.metric()?;
        let g4 = self.berwald()?;
        let contracted = crate::tensor::contract_vector(g4, 0, &m.l);
        Ok(contracted.mapv(|v| -0.5 * m.f * v))
    }

    pub fn t_pack(&self) -> Result<&TTensorPack, GeometryError> {
        self.t.get_or_try_init(|| {
            let m = self.metric()?;
            let t4 = kernels::t_tensor(m.f, &m.l, &m.g_inv, self.c3()?, self.c4()?);
            let t2 = trace(&t4, 2, 3, &m.g_inv);
            let t = trace(&t2, 0, 1, &m.g_inv)[IxDyn(&[])];
            Ok(TTensorPack { t4, t2, t, t5: None })
        })
    }

    /// `∂̇_h T^{ri}_jk` at `[r, i, j, k, h]`, by differentiating the T-tensor
    /// assembly over jets.
    pub fn t5(&self) -> Result<&ArrayD<f64>, GeometryError> {
        self.t5.get_or_try_init(|| {
            lift(self.expr, &self.point, 1, |p| {
                let (b, t) = t_from_probe::<Jet>(p)?;
                Ok(raise_all(&t, &[0, 1], &b.g_inv))
            })
        })
    }

    pub fn t_pack_with_derivative(&self) -> Result<TTensorPack, GeometryError> {
        let mut pack = self.t_pack()?.clone();
        pack.t5 = Some(self.t5()?.clone());
        Ok(pack)
    }

    pub fn v_curvature(&self) -> Result<&VCurvaturePack, GeometryError> {
        self.v.get_or_try_init(|| {
            let m = self.metric()?;
            let c3 = self.c3()?;
            let cm = raise(c3, 0, &m.g_inv); // C^r_ab at [r, a, b]
            let n = self.dim();
            let s4 = ArrayD::from_shape_fn(IxDyn(&[n, n, n, n]), |ix| {
                let (i, j, k, h) = (ix[0], ix[1], ix[2], ix[3]);
                (0..n)
                    .map(|r| cm[[r, i, h]] * c3[[r, j, k]] - cm[[r, i, k]] * c3[[r, j, h]])
                    .sum()
            });
            let s_mixed = raise(&s4, 1, &m.g_inv);
            let ricci = trace(&s4, 1, 3, &m.g_inv);
            let s = trace(&ricci, 0, 1, &m.g_inv)[IxDyn(&[])];
            let rho = (n > 2).then(|| s / (((n - 1) * (n - 2)) as f64));
            Ok(VCurvaturePack {
                s4,
                s_mixed,
                ricci,
                s,
                rho,
            })
        })
    }

    /// Both sides of the derivative identities for raised Cartan tensors,
    /// with the left sides taken from jets and the right sides from closed
    /// forms.
    pub fn c_identities(&self) -> Result<CIdentityResiduals, GeometryError> {
        let n = self.dim();
        let m = self.metric()?;
        let gi = &m.g_inv;
        let c3 = self.c3()?;
        let c4 = self.c4()?;
        let c5 = self.c5()?;
        let c_m = raise(c3, 0, gi); // C^r_sj  [r,s,j]
        let c_uu = raise_all(c3, &[0, 1], gi); // C^{ir}_j [i,r,j]
        let c4_m = raise(c4, 0, gi); // C^r_ijk [r,i,j,k]
        let c4_uu = raise_all(c4, &[0, 1], gi); // C^{ir}_jk
        let c5_uu = raise_all(c5, &[0, 1], gi); // C^{ir}_jkh

        // left sides: one lift per identity, all over a single y-direction
        let lhs_a = lift(self.expr, &self.point, 1, |p| {
            let b = base::<Jet>(p)?;
            Ok(raise_all(&cartan::<Jet>(p, 3)?, &[0, 1], &b.g_inv))
        })?;
        let lhs_b = lift(self.expr, &self.point, 1, |p| {
            let b = base::<Jet>(p)?;
            Ok(raise(&cartan::<Jet>(p, 3)?, 0, &b.g_inv))
        })?;
        let lhs_c = lift(self.expr, &self.point, 1, |p| {
            let b = base::<Jet>(p)?;
            Ok(raise_all(&cartan::<Jet>(p, 4)?, &[0, 1], &b.g_inv))
        })?;
        let lhs_d = lift(self.expr, &self.point, 1, |p| {
            let b = base::<Jet>(p)?;
            Ok(raise(&cartan::<Jet>(p, 4)?, 0, &b.g_inv))
        })?;

        let sum = |f: &dyn Fn(usize) -> f64| (0..n).map(f).sum::<f64>();
        let rhs_a = ArrayD::from_shape_fn(IxDyn(&[n, n, n, n]), |ix| {
            let (i, r, j, h) = (ix[0], ix[1], ix[2], ix[3]);
            c4_uu[[i, r, j, h]]
                - 2.0 * sum(&|s| c_m[[r, s, j]] * c_uu[[i, s, h]])
                - 2.0 * sum(&|s| c_m[[i, s, j]] * c_uu[[r, s, h]])
        });
        let rhs_b = ArrayD::from_shape_fn(IxDyn(&[n, n, n, n]), |ix| {
            let (r, s, j, h) = (ix[0], ix[1], ix[2], ix[3]);
            c4_m[[r, s, j, h]] - 2.0 * sum(&|l| c3[[l, s, j]] * c_uu[[r, l, h]])
        });
        let c5_m_uu = &c5_uu;
        let c4_m2 = &c4_m;
        let rhs_c = ArrayD::from_shape_fn(IxDyn(&[n, n, n, n, n]), |ix| {
            let (i, r, j, k, h) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            c5_m_uu[[i, r, j, k, h]]
                - 2.0 * sum(&|s| c4_m2[[r, s, j, k]] * c_uu[[i, s, h]])
                - 2.0 * sum(&|s| c4_m2[[i, s, j, k]] * c_uu[[r, s, h]])
        });
        let c5_m = raise(c5, 0, gi);
        let rhs_d = ArrayD::from_shape_fn(IxDyn(&[n, n, n, n, n]), |ix| {
            let (r, i, j, k, h) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            c5_m[[r, i, j, k, h]] - 2.0 * sum(&|s| c_uu[[r, s, h]] * c4[[s, i, j, k]])
        });

        let via_t = residual_between(&c5_uu, &self.c5_via_t()?);
        Ok(CIdentityResiduals {
            a: residual_between(&lhs_a, &rhs_a),
            b: residual_between(&lhs_b, &rhs_b),
            c: residual_between(&lhs_c, &rhs_c),
            d: residual_between(&lhs_d, &rhs_d),
            via_t,
        })
    }

    /// `C^{ir}_jkh` at `[i, r, j, k, h]` expressed through `∂̇_h T^{ri}_jk` and
    /// Cartan tensors up to rank four.
    pub fn c5_via_t(&self) -> Result<ArrayD<f64>, GeometryError> {
        let n = self.dim();
        let m = self.metric()?;
        let gi = &m.g_inv;
        let f = m.f;
        let c3 = self.c3()?;
        let l = &m.l;
        let l_up = m.l_up();
        let ld = &m.l_deriv;
        let ld_up = raise(ld, 0, gi); // ℓ^i_h
        let c_m = raise(c3, 0, gi); // C^a_bc
        let c_uu = raise_all(c3, &[0, 1], gi); // C^{ab}_c
        let c4_m = raise(self.c4()?, 0, gi); // C^a_bcd
        let c4_uu = raise_all(self.c4()?, &[0, 1], gi); // C^{ab}_cd
        let t_m = raise(&self.t_pack()?.t4, 0, gi); // T^a_bcd
        let t5 = self.t5()?;
        let sum = |f: &dyn Fn(usize) -> f64| (0..n).map(f).sum::<f64>();
        Ok(ArrayD::from_shape_fn(IxDyn(&[n; 5]), |ix| {
            let (i, r, j, k, h) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            let over_f = t5[[r, i, j, k, h]]
                + 2.0 * sum(&|s| t_m[[r, s, j, k]] * c_uu[[i, s, h]] + t_m[[i, s, j, k]] * c_uu[[s, r, h]])
                - (c_uu[[r, i, j]] * ld[[k, h]]
                    + c_uu[[r, i, k]] * ld[[j, h]]
                    + c_m[[r, j, k]] * ld_up[[i, h]]
                    + c_m[[i, j, k]] * ld_up[[r, h]])
                + sum(&|s| {
                    c_m[[i, s, j]] * c_uu[[r, s, k]] + c_m[[r, s, j]] * c_uu[[i, s, k]] + c_uu[[r, i, s]] * c_m[[s, j, k]]
                }) * l[h]
                - (c4_uu[[i, r, j, h]] * l[k]
                    + c4_uu[[i, r, k, h]] * l[j]
                    + c4_uu[[i, r, j, k]] * l[h]
                    + c4_m[[r, j, k, h]] * l_up[i]
                    + c4_m[[i, j, k, h]] * l_up[r]);
            let cubic = sum(&|s| {
                sum(&|q| {
                    (c_m[[i, s, j]] * c_m[[r, q, k]] + c_m[[r, s, j]] * c_m[[i, q, k]] + c_uu[[r, i, s]] * c3[[q, j, k]])
                        * c_uu[[s, q, h]]
                })
            });
            let quartic = sum(&|s| {
                c4_m[[i, s, j, h]] * c_uu[[s, r, k]]
                    + c_m[[i, s, j]] * c4_uu[[s, r, k, h]]
                    + c4_m[[r, s, j, h]] * c_uu[[s, i, k]]
                    + c_m[[r, s, j]] * c4_uu[[s, i, k, h]]
                    + c4_uu[[i, r, s, h]] * c_m[[s, j, k]]
                    + c_uu[[r, i, s]] * c4_m[[s, j, k, h]]
            });
            over_f / f - 2.0 * cubic + quartic
        }))
    }

    /// Largest normalized residual among the Euler-type contractions with `y`.
    pub fn euler_chain(&self) -> Result<f64, GeometryError> {
        let m = self.metric()?;
        let y = &self.point.y;
        let n = self.dim();
        let mut worst = 0.0f64;
        let ly: f64 = (0..n).map(|i| m.l[i] * y[i]).sum();
        worst = worst.max((ly - m.f).abs() / (1.0 + m.f.abs()));
        let gy = crate::tensor::contract_vector(&m.g, 1, y);
        let fl = ArrayD::from_shape_fn(IxDyn(&[n]), |ix| m.f * m.l[ix[0]]);
        worst = worst.max(residual_between(&gy, &fl));
        let c3 = self.c3()?;
        worst = worst.max(residual_of_sum(&crate::tensor::contract_vector(c3, 2, y), &[c3]));
        let sp = self.spray()?;
        let conn_y = crate::tensor::contract_vector(&sp.g_conn, 2, y);
        worst = worst.max(residual_between(&conn_y, &sp.g_jac));
        let g4 = self.berwald()?;
        worst = worst.max(residual_of_sum(&crate::tensor::contract_vector(g4, 3, y), &[g4, &sp.g_conn]));
        let lt = self.landsberg()?;
        worst = worst.max(residual_of_sum(&crate::tensor::contract_vector(&lt, 2, y), &[&lt, c3]));
        let t4 = &self.t_pack()?.t4;
        worst = worst.max(residual_of_sum(&crate::tensor::contract_vector(t4, 3, y), &[t4, c3]));
        Ok(worst)
    }
}

/// Jet-based y-derivative of the Cartan tensor, used as the second path for
/// rank-four Cartan data.
pub fn c4_via_c3_derivative(expr: &Expr, point: &Point) -> Result<ArrayD<f64>, GeometryError> {
    lift(expr, point, 1, |p| cartan::<Jet>(p, 3))
}

pub fn metric_pack(space: &MetricSpace, p: &Point) -> Result<MetricPack, GeometryError> {
    LocalGeometry::new(space, p).metric().cloned()
}

pub fn cartan_pack(space: &MetricSpace, p: &Point, depth: usize) -> Result<CartanPack, GeometryError> {
    LocalGeometry::new(space, p).cartan(depth)
}

pub fn verify_c_identities(space: &MetricSpace, p: &Point) -> Result<CIdentityResiduals, GeometryError> {
    LocalGeometry::new(space, p).c_identities()
}

pub fn spray_pack(space: &MetricSpace, p: &Point) -> Result<SprayPack, GeometryError> {
    LocalGeometry::new(space, p).spray().cloned()
}

pub fn berwald_tensor(space: &MetricSpace, p: &Point) -> Result<BerwaldTensor, GeometryError> {
    Ok(BerwaldTensor {
        g4: LocalGeometry::new(space, p).berwald()?.clone(),
    })
}

pub fn landsberg_tensor(space: &MetricSpace, p: &Point) -> Result<LandsbergTensor, GeometryError> {
    Ok(LandsbergTensor {
        l: LocalGeometry::new(space, p).landsberg()?,
    })
}

pub fn t_tensor_pack(space: &MetricSpace, p: &Point, with_derivative: bool) -> Result<TTensorPack, GeometryError> {
    let geo = LocalGeometry::new(space, p);
    if with_derivative {
        geo.t_pack_with_derivative()
    } else {
        geo.t_pack().cloned()
    }
}

pub fn v_curvature_pack(space: &MetricSpace, p: &Point) -> Result<VCurvaturePack, GeometryError> {
    LocalGeometry::new(space, p).v_curvature().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs, IndexSymmetry, TensorBlock};
    use approx::assert_abs_diff_eq;

    fn space(n: usize, f: &str) -> MetricSpace {
        MetricSpace::new("t", n, f, DomainSpec::boxed(n, [-1.0, 1.0], [0.2, 2.0])).unwrap()
    }

    #[test]
    fn euclidean_metric_at_three_four() {
        let s = space(2, "sqrt(y1^2 + y2^2)");
        let m = metric_pack(&s, &Point::new([0.4, -0.7], [3.0, 4.0])).unwrap();
        assert_abs_diff_eq!(m.f, 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.l[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(m.l[1], 0.8, epsilon = 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(m.g[[i, j]], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
        let c = cartan_pack(&s, &Point::new([0.0, 0.0], [3.0, 4.0]), 3).unwrap();
        assert!(c.c_sq.abs() < 1e-28);
        assert!(max_abs(&c.c1) < 1e-14);
    }

    #[test]
    fn conformally_flat_spray_matches_christoffel_symbols() {
        // g = e^{2x1} δ: Γ¹₁₁ = 1, Γ¹₂₂ = −1, Γ²₁₂ = 1, so
        // G¹ = ½(y1² − y2²), G² = y1 y2.
        let s = space(2, "sqrt(exp(2*x1)*(y1^2 + y2^2))");
        let p = Point::new([0.3, -0.5], [0.7, 1.3]);
        let sp = spray_pack(&s, &p).unwrap();
        assert_abs_diff_eq!(sp.g[0], 0.5 * (0.49 - 1.69), epsilon = 1e-13);
        assert_abs_diff_eq!(sp.g[1], 0.7 * 1.3, epsilon = 1e-13);
        let conn = [[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert_abs_diff_eq!(sp.g_conn[[i, j, k]], conn[i][j][k], epsilon = 1e-12);
                }
            }
        }
        let geo = LocalGeometry::new(&s, &p);
        assert!(max_abs(geo.c3().unwrap()) < 1e-13);
        assert!(max_abs(geo.berwald().unwrap()) < 1e-9);
        assert!(max_abs(&geo.t_pack().unwrap().t4) < 1e-12);
        assert_eq!(geo.v_curvature().unwrap().rho, None);
    }

    #[test]
    fn minkowski_spray_vanishes() {
        let s = space(3, "(y1^4 + y2^4 + y3^4)^(1/4)");
        let sp = spray_pack(&s, &Point::new([0.1, 0.2, 0.3], [0.5, 1.1, 0.9])).unwrap();
        assert_eq!(max_abs(&sp.g), 0.0);
        assert_eq!(max_abs(&sp.g_conn), 0.0);
    }

    #[test]
    fn quartic_tensors_obey_symmetries_and_euler_chain() {
        let s = space(3, "((y1*y3 + y3*sqrt(y1^2 + y3^2))*y2^2)^(1/4)*exp(x1*x2)");
        let p = Point::new([0.2, -0.4, 0.6], [0.8, 1.2, 0.5]);
        let geo = LocalGeometry::new(&s, &p);
        let all = |r: usize| IndexSymmetry::Symmetric((0..r).collect());
        assert!(TensorBlock::new("T", geo.t_pack().unwrap().t4.clone(), vec![all(4)]).symmetry_residual() < 1e-10);
        assert!(TensorBlock::new("L", geo.landsberg().unwrap(), vec![all(3)]).symmetry_residual() < 1e-10);
        let s4 = geo.v_curvature().unwrap().s4.clone();
        let anti = vec![IndexSymmetry::Antisymmetric(0, 1), IndexSymmetry::Antisymmetric(2, 3)];
        assert!(TensorBlock::new("S", s4, anti).symmetry_residual() < 1e-12);
        assert!(geo.euler_chain().unwrap() < 1e-9);
        assert!(geo.c_identities().unwrap().max() < 1e-8);
        let via = c4_via_c3_derivative(geo.expr(), &p).unwrap();
        assert!(crate::tensor::residual_between(geo.c4().unwrap(), &via) < 1e-7);
        assert!(geo.v_curvature().unwrap().rho.is_some());
    }

    #[test]
    fn euclidean_identity_residuals_are_exact() {
        let s = space(3, "sqrt(y1^2 + y2^2 + y3^2)");
        let r = verify_c_identities(&s, &Point::new([0.0; 3], [0.3, 0.9, 1.4])).unwrap();
        assert!(r.max() < 1e-14, "{}", r.max());
    }

    #[test]
    fn nonpositive_metric_is_outside_domain() {
        let s = space(2, "y1 - y2");
        let e = metric_pack(&s, &Point::new([0.0, 0.0], [0.5, 1.0])).unwrap_err();
        assert!(matches!(e, GeometryError::OutsideDomain(_)));
    }
}
