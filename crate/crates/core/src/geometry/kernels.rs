//! Formulas written once over [`Scalar`] so they can be evaluated on reals or
//! differentiated further by running them over jets.

use ndarray::{ArrayD, Dimension, IxDyn};

use crate::error::GeometryError;
use crate::expr::{Coord, Expr};
use crate::jet::{Jet, Scalar};
use crate::linalg::invert;
use crate::tensor::{raise, symmetric_from_fn};

use super::probe::{ys, Probe};
use super::Point;

pub(crate) struct Base<S> {
    pub f: S,
    pub l: Vec<S>,
    pub g: ArrayD<S>,
    pub g_inv: ArrayD<S>,
}

pub(crate) fn base<S: Scalar>(probe: &Probe) -> Result<Base<S>, GeometryError> {
    let n = probe.dim();
    let f: S = probe.value(&[])?;
    if !(f.value() > 0.0) {
        return Err(GeometryError::OutsideDomain(f.value()));
    }
    let l = (0..n)
        .map(|i| probe.value(&[Coord::y(i)]))
        .collect::<Result<Vec<S>, _>>()?;
    let g = symmetric_from_fn(n, 2, |ix| probe.squared::<S>(&ys(ix)).map(|v| v.scale(0.5)))?;
    let g_inv = invert(&g)?;
    Ok(Base { f, l, g, g_inv })
}

/// `¼ ∂̇ᵏ F²` for `k = rank`, i.e. the Cartan tensor for rank 3 and its
/// successive y-derivatives above that.
pub(crate) fn cartan<S: Scalar>(probe: &Probe, rank: usize) -> Result<ArrayD<S>, GeometryError> {
    symmetric_from_fn(probe.dim(), rank, |ix| {
        probe.squared::<S>(&ys(ix)).map(|v| v.scale(0.25))
    })
}

/// Geodesic coefficients `Gⁱ = ¼ gⁱʰ (yʳ ∂_r ∂̇_h F² − ∂_h F²)`.
pub(crate) fn spray<S: Scalar>(probe: &Probe, g_inv: &ArrayD<S>) -> Result<Vec<S>, GeometryError> {
    let n = probe.dim();
    let mut v = Vec::with_capacity(n);
    for h in 0..n {
        let mut acc = -probe.squared::<S>(&[Coord::x(h)])?;
        for r in 0..n {
            let mixed: S = probe.squared(&[Coord::x(r), Coord::y(h)])?;
            acc += probe.coord::<S>(Coord::y(r)) * mixed;
        }
        v.push(acc);
    }
    Ok((0..n)
        .map(|i| {
            let mut acc = S::zero();
            for (h, vh) in v.iter().enumerate() {
                acc += g_inv[[i, h]] * *vh;
            }
            acc.scale(0.25)
        })
        .collect())
}

/// `T_rijk = F C_rijk − F (C_sij C^s_rk + C_sjr C^s_ik + C_sir C^s_jk)
///  + C_rij ℓ_k + C_rik ℓ_j + C_rjk ℓ_i + C_ijk ℓ_r`.
pub(crate) fn t_tensor<S: Scalar>(
    f: S,
    l: &[S],
    g_inv: &ArrayD<S>,
    c3: &ArrayD<S>,
    c4: &ArrayD<S>,
) -> ArrayD<S> {
    let n = l.len();
    let cm = raise(c3, 0, g_inv);
    // every component is evaluated so that total symmetry is a genuine check
    ArrayD::from_shape_fn(IxDyn(&[n; 4]), |ix| {
        let (r, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let mut p = S::zero();
        for s in 0..n {
            p += c3[[s, i, j]] * cm[[s, r, k]] + c3[[s, j, r]] * cm[[s, i, k]] + c3[[s, i, r]] * cm[[s, j, k]];
        }
        f * (c4[[r, i, j, k]] - p) + c3[[r, i, j]] * l[k] + c3[[r, i, k]] * l[j] + c3[[r, j, k]] * l[i] + c3[[i, j, k]] * l[r]
    })
}

/// T-tensor assembled from scratch over the probe's scalar type.
pub(crate) fn t_from_probe<S: Scalar>(probe: &Probe) -> Result<(Base<S>, ArrayD<S>), GeometryError> {
    let b = base::<S>(probe)?;
    let c3 = cartan::<S>(probe, 3)?;
    let c4 = cartan::<S>(probe, 4)?;
    let t = t_tensor(b.f, &b.l, &b.g_inv, &c3, &c4);
    Ok((b, t))
}

/// Differentiate an array-valued formula along `depth` y-directions.
///
/// The formula is re-run over jets once per sorted tuple of directions and
/// the top coefficients are written to every permutation of that tuple. The
/// derivative indices are appended after the formula's own indices.
pub(crate) fn lift(
    expr: &Expr,
    point: &Point,
    depth: usize,
    formula: impl Fn(&Probe) -> Result<ArrayD<Jet>, GeometryError>,
) -> Result<ArrayD<f64>, GeometryError> {
    let n = point.dim();
    let mut out: Option<ArrayD<f64>> = None;
    let mut tuple = vec![0usize; depth];
    loop {
        if tuple.windows(2).all(|w| w[0] <= w[1]) {
            let probe = Probe::with_outer(expr, point, ys(&tuple));
            let value = formula(&probe)?;
            let base_shape = value.shape().to_vec();
            let dst = out.get_or_insert_with(|| {
                let mut shape = base_shape.clone();
                shape.extend(std::iter::repeat_n(n, depth));
                ArrayD::zeros(IxDyn(&shape))
            });
            for perm in crate::tensor::permutations(&tuple) {
                for (idx, v) in value.indexed_iter() {
                    let mut full = idx.slice().to_vec();
                    full.extend_from_slice(&perm);
                    dst[full.as_slice()] = v.top();
                }
            }
        }
        // advance odometer
        let mut pos = depth;
        loop {
            if pos == 0 {
                return Ok(out.unwrap_or_else(|| ArrayD::zeros(IxDyn(&[]))));
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

pub(crate) fn vector_array<S: Scalar>(v: Vec<S>) -> ArrayD<S> {
    let n = v.len();
    ArrayD::from_shape_vec(IxDyn(&[n]), v).expect("shape matches length")
}
