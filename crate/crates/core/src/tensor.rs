//! Dense index arrays, index raising, symmetry bookkeeping and the
//! normalized residual used by every verdict.

use std::collections::HashMap;

use ndarray::{ArrayD, Dimension, IxDyn};

use crate::jet::Scalar;

/// Residual normalization: `max|difference| / (1 + reference scale)` where the
/// scale is the largest absolute component among the combined terms.
pub fn normalized(diff_max: f64, scale: f64) -> f64 {
    diff_max / (1.0 + scale)
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Normalized residual of `lhs - rhs` with both sides as reference terms.
pub fn residual_between(lhs: &ArrayD<f64>, rhs: &ArrayD<f64>) -> f64 {
    debug_assert_eq!(lhs.shape(), rhs.shape());
    let diff = lhs.iter().zip(rhs.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    normalized(diff, max_abs(lhs).max(max_abs(rhs)))
}

/// Normalized residual of a quantity that should vanish, given the terms
/// that were summed to produce it.
pub fn residual_of_sum(value: &ArrayD<f64>, terms: &[&ArrayD<f64>]) -> f64 {
    let scale = terms.iter().map(|t| max_abs(t.iter())).fold(0.0, f64::max);
    normalized(max_abs(value), scale.max(max_abs(value)))
}

/// Residual of a single tensor that should vanish.
pub fn residual_zero(value: &ArrayD<f64>) -> f64 {
    let m = max_abs(value);
    normalized(m, m)
}

/// Build a totally symmetric rank-`rank` tensor by evaluating `component`
/// once per sorted index tuple.
pub fn symmetric_from_fn<S, E>(
    n: usize,
    rank: usize,
    mut component: impl FnMut(&[usize]) -> Result<S, E>,
) -> Result<ArrayD<S>, E>
where
    S: Scalar,
{
    let mut cache: HashMap<Vec<usize>, S> = HashMap::new();
    let mut out = ArrayD::from_elem(IxDyn(&vec![n; rank]), S::zero());
    for (idx, slot) in out.indexed_iter_mut() {
        let mut key = idx.slice().to_vec();
        key.sort_unstable();
        let v = match cache.get(&key) {
            Some(v) => *v,
            None => {
                let v = component(&key)?;
                cache.insert(key, v);
                v
            }
        };
        *slot = v;
    }
    Ok(out)
}

/// Contract slot `slot` of `t` with the symmetric matrix `ginv`.
pub fn raise<S: Scalar>(t: &ArrayD<S>, slot: usize, ginv: &ArrayD<S>) -> ArrayD<S> {
    let n = ginv.shape()[0];
    let mut out = ArrayD::from_elem(t.raw_dim(), S::zero());
    let mut src = vec![0; t.ndim()];
    for (idx, slot_value) in out.indexed_iter_mut() {
        src.copy_from_slice(idx.slice());
        let mut acc = S::zero();
        for a in 0..n {
            src[slot] = a;
            acc += ginv[[idx[slot], a]] * t[src.as_slice()];
        }
        *slot_value = acc;
    }
    out
}

/// Raise every listed slot in turn.
pub fn raise_all<S: Scalar>(t: &ArrayD<S>, slots: &[usize], ginv: &ArrayD<S>) -> ArrayD<S> {
    slots.iter().fold(t.clone(), |acc, &s| raise(&acc, s, ginv))
}

/// Contract slot `slot` with a vector.
pub fn contract_vector<S: Scalar>(t: &ArrayD<S>, slot: usize, v: &[S]) -> ArrayD<S> {
    let mut shape = t.shape().to_vec();
    shape.remove(slot);
    let mut out = ArrayD::from_elem(IxDyn(&shape), S::zero());
    let mut src = vec![0; t.ndim()];
    for (idx, slot_value) in out.indexed_iter_mut() {
        let idx = idx.slice();
        src[..slot].copy_from_slice(&idx[..slot]);
        src[slot + 1..].copy_from_slice(&idx[slot..]);
        let mut acc = S::zero();
        for (a, va) in v.iter().enumerate() {
            src[slot] = a;
            acc += *va * t[src.as_slice()];
        }
        *slot_value = acc;
    }
    out
}

/// Trace over two slots with `ginv`.
pub fn trace<S: Scalar>(t: &ArrayD<S>, first: usize, second: usize, ginv: &ArrayD<S>) -> ArrayD<S> {
    assert!(first < second);
    let n = ginv.shape()[0];
    let mut shape = t.shape().to_vec();
    shape.remove(second);
    shape.remove(first);
    let mut out = ArrayD::from_elem(IxDyn(&shape), S::zero());
    let mut src = vec![0; t.ndim()];
    for (idx, slot_value) in out.indexed_iter_mut() {
        let idx = idx.slice();
        let mut k = 0;
        for (s, v) in src.iter_mut().enumerate() {
            if s != first && s != second {
                *v = idx[k];
                k += 1;
            }
        }
        let mut acc = S::zero();
        for a in 0..n {
            for b in 0..n {
                src[first] = a;
                src[second] = b;
                acc += ginv[[a, b]] * t[src.as_slice()];
            }
        }
        *slot_value = acc;
    }
    out
}

/// Top coefficient of every component of a jet-valued array.
pub fn tops(t: &ArrayD<crate::jet::Jet>) -> ArrayD<f64> {
    t.mapv(|j| j.top())
}

pub fn values<S: Scalar>(t: &ArrayD<S>) -> ArrayD<f64> {
    t.mapv(|j| j.value())
}

/// Declared index symmetry of a [`TensorBlock`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexSymmetry {
    /// Invariant under every permutation of the listed slots.
    Symmetric(Vec<usize>),
    /// Changes sign when the two slots are swapped.
    Antisymmetric(usize, usize),
}

/// Dense multi-index array with declared symmetries.
#[derive(Debug, Clone)]
pub struct TensorBlock {
    pub name: String,
    pub data: ArrayD<f64>,
    pub symmetries: Vec<IndexSymmetry>,
}

impl TensorBlock {
    pub fn new(name: impl Into<String>, data: ArrayD<f64>, symmetries: Vec<IndexSymmetry>) -> Self {
        TensorBlock {
            name: name.into(),
            data,
            symmetries,
        }
    }

    pub fn rank(&self) -> usize {
        self.data.ndim()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.data.iter())
    }

    /// Largest normalized deviation from any declared symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let scale = self.max_abs();
        let mut worst = 0.0f64;
        for sym in &self.symmetries {
            match sym {
                IndexSymmetry::Symmetric(slots) => {
                    for perm in permutations(slots) {
                        let mut axes: Vec<usize> = (0..self.rank()).collect();
                        for (from, to) in slots.iter().zip(&perm) {
                            axes[*from] = *to;
                        }
                        let permuted = self.data.view().permuted_axes(IxDyn(&axes));
                        let d = self
                            .data
                            .iter()
                            .zip(permuted.iter())
                            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                        worst = worst.max(d);
                    }
                }
                IndexSymmetry::Antisymmetric(a, b) => {
                    let mut axes: Vec<usize> = (0..self.rank()).collect();
                    axes.swap(*a, *b);
                    let permuted = self.data.view().permuted_axes(IxDyn(&axes));
                    let d = self
                        .data
                        .iter()
                        .zip(permuted.iter())
                        .fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
                    worst = worst.max(d);
                }
            }
        }
        normalized(worst, scale)
    }
}

/// All permutations of `items` (Heap's algorithm).
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a = items.to_vec();
    let mut out = Vec::new();
    heap(a.len(), &mut a, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(&[0, 1, 2, 3]).len(), 24);
        let mut p = permutations(&[0, 1, 2]);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn raising_with_identity_is_noop() {
        let t = array![[1.0, 2.0], [3.0, 4.0]].into_dyn();
        let id = array![[1.0, 0.0], [0.0, 1.0]].into_dyn();
        assert_eq!(raise(&t, 1, &id), t);
        let g = array![[2.0, 0.0], [0.0, 0.5]].into_dyn();
        assert_eq!(raise(&t, 0, &g), array![[2.0, 4.0], [1.5, 2.0]].into_dyn());
        assert_eq!(trace(&t, 0, 1, &g).into_iter().next().unwrap(), 2.0 + 2.0);
    }

    #[test]
    fn symmetric_fill_visits_sorted_tuples_once() {
        let mut calls = 0;
        let t = symmetric_from_fn::<f64, ()>(3, 3, |idx| {
            calls += 1;
            Ok((idx[0] * 100 + idx[1] * 10 + idx[2]) as f64)
        })
        .unwrap();
        assert_eq!(calls, 10);
        assert_eq!(t[[2, 0, 1]], 12.0);
        let block = TensorBlock::new("t", t, vec![IndexSymmetry::Symmetric(vec![0, 1, 2])]);
        assert_eq!(block.symmetry_residual(), 0.0);
    }

    #[test]
    fn antisymmetry_residual_detects_violation() {
        let t = array![[0.0, 1.0], [-1.0, 0.0]].into_dyn();
        let b = TensorBlock::new("a", t.clone(), vec![IndexSymmetry::Antisymmetric(0, 1)]);
        assert_eq!(b.symmetry_residual(), 0.0);
        let b = TensorBlock::new("a", t, vec![IndexSymmetry::Symmetric(vec![0, 1])]);
        assert!(b.symmetry_residual() > 0.5);
    }
}
