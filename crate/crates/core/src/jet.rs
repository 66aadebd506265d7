//! Truncated multilinear jets.
//!
//! A [`Jet`] of order `m` is an element of the commutative algebra generated
//! by `m` nilpotent symbols `ε₁..ε_m` with `εᵢ² = 0`. Its coefficients are
//! indexed by generator subsets (bit masks): the empty subset is the value
//! part and the coefficient of `∏_{i∈S} εᵢ` is the mixed partial derivative
//! of the evaluated function along the directions seeded into the generators
//! of `S`. Seeding the same coordinate into several generators gives repeated
//! (pure) derivatives.
//!
//! Elementary functions are applied by evaluating the univariate Taylor
//! coefficients at the value part and recomposing with the nilpotent part,
//! which is exact because the nilpotent part to the power `m + 1` vanishes.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Maximum number of generators a jet can carry.
pub const MAX_GENERATORS: usize = 6;
const CAPACITY: usize = 1 << MAX_GENERATORS;

/// Scalar type the expression evaluator and the tensor routines are generic
/// over. Implemented for plain `f64` and for [`Jet`].
pub trait Scalar:
    Copy
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn constant(value: f64) -> Self;
    fn value(&self) -> f64;
    /// True when no derivative part is carried.
    fn is_constant(&self) -> bool;
    fn scale(self, factor: f64) -> Self;
    fn recip(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan(self) -> Self;
    /// Real power with a constant exponent; the value part must be positive
    /// unless the scalar is constant.
    fn powf(self, exponent: f64) -> Self;
    /// Integer power by repeated multiplication.
    fn powi(self, exponent: i32) -> Self {
        let mut base = if exponent < 0 { self.recip() } else { self };
        let mut k = exponent.unsigned_abs();
        let mut acc = Self::constant(1.0);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            k >>= 1;
            if k > 0 {
                base = base * base;
            }
        }
        acc
    }
    /// Convert a jet over the caller's outer generators into this scalar.
    /// For `f64` only the value part is kept.
    fn from_jet(jet: &Jet) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }
    fn one() -> Self {
        Self::constant(1.0)
    }
}

impl Scalar for f64 {
    fn constant(value: f64) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn is_constant(&self) -> bool {
        true
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn recip(self) -> Self {
        1.0 / self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn powf(self, exponent: f64) -> Self {
        f64::powf(self, exponent)
    }
    fn from_jet(jet: &Jet) -> Self {
        jet.value()
    }
}

/// Error raised when a jet would need more than [`MAX_GENERATORS`] generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("jet order {0} exceeds the generator cap of {MAX_GENERATORS}")]
pub struct TooManyGenerators(pub usize);

/// Dense truncated multilinear jet.
#[derive(Clone, Copy)]
pub struct Jet {
    order: u8,
    coeffs: [f64; CAPACITY],
}

impl Jet {
    pub fn constant_of(value: f64) -> Self {
        let mut coeffs = [0.0; CAPACITY];
        coeffs[0] = value;
        Jet { order: 0, coeffs }
    }

    /// Jet with the given value whose singleton coefficient is 1 for every
    /// generator in `mask`.
    pub fn seeded(value: f64, order: usize, mask: u32) -> Result<Self, TooManyGenerators> {
        if order > MAX_GENERATORS {
            return Err(TooManyGenerators(order));
        }
        let mut jet = Jet::constant_of(value);
        jet.order = order as u8;
        for g in 0..order {
            if mask & (1 << g) != 0 {
                jet.coeffs[1 << g] = 1.0;
            }
        }
        Ok(jet)
    }

    /// Build from an explicit coefficient slice of length `2^order`.
    pub fn from_coefficients(coeffs: &[f64]) -> Self {
        let size = coeffs.len();
        assert!(size.is_power_of_two() && size <= CAPACITY, "bad jet length {size}");
        let mut jet = Jet::constant_of(0.0);
        jet.order = size.trailing_zeros() as u8;
        jet.coeffs[..size].copy_from_slice(coeffs);
        jet
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    fn size(&self) -> usize {
        1 << self.order
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs[..self.size()]
    }

    /// Coefficient of the generator subset `mask`; zero outside the order.
    pub fn coefficient(&self, mask: u32) -> f64 {
        let mask = mask as usize;
        if mask < self.size() {
            self.coeffs[mask]
        } else {
            0.0
        }
    }

    /// Mixed partial along the seeded directions of the listed generators
    /// (zero-based generator numbers).
    pub fn extract(&self, generators: &[usize]) -> f64 {
        let mask = generators.iter().fold(0u32, |m, &g| m | (1 << g));
        self.coefficient(mask)
    }

    /// Coefficient of the product of all generators.
    pub fn top(&self) -> f64 {
        self.coeffs[self.size() - 1]
    }

    /// Restrict a jet over `inner + outer` generators (inner ones first) to
    /// the part that carries every inner generator, re-indexed as a jet over
    /// the outer generators only.
    pub fn project(&self, inner: usize) -> Jet {
        // A jet that never met some inner generator has no such part.
        let Some(outer) = self.order().checked_sub(inner) else {
            return Jet::constant_of(0.0);
        };
        let inner_mask = (1usize << inner) - 1;
        let mut out = Jet::constant_of(0.0);
        out.order = outer as u8;
        for s in 0..(1usize << outer) {
            out.coeffs[s] = self.coeffs[inner_mask | (s << inner)];
        }
        out
    }

    fn nilpotent(&self) -> Jet {
        let mut n = *self;
        n.coeffs[0] = 0.0;
        n
    }

    /// Apply `f(a₀ + n) = Σ c_k nᵏ` given the Taylor coefficients
    /// `c_k = f⁽ᵏ⁾(a₀)/k!` for `k = 0..=order`.
    fn compose(&self, taylor: &[f64]) -> Jet {
        let m = self.order();
        debug_assert!(taylor.len() > m);
        let n = self.nilpotent();
        let mut acc = Jet::constant_of(taylor[m]);
        for k in (0..m).rev() {
            acc = acc * n;
            acc.coeffs[0] += taylor[k];
        }
        acc.order = self.order;
        acc
    }

    fn taylor_powf(a0: f64, q: f64, m: usize) -> Vec<f64> {
        let mut c = Vec::with_capacity(m + 1);
        let mut binom = 1.0;
        let base = a0.powf(q);
        let mut p = base;
        for k in 0..=m {
            c.push(binom * p);
            binom *= (q - k as f64) / (k as f64 + 1.0);
            p /= a0;
        }
        c
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coefficients())
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        let size = self.size().max(other.size());
        self.coeffs[..size] == other.coeffs[..size]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.order = self.order.max(rhs.order);
        for (a, b) in self.coeffs[..1 << self.order].iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        self.order = self.order.max(rhs.order);
        for (a, b) in self.coeffs[..1 << self.order].iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in &mut self.coeffs[..1 << self.order] {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        if self.order == 0 {
            return rhs.scale(self.coeffs[0]);
        }
        if rhs.order == 0 {
            return self.scale(rhs.coeffs[0]);
        }
        let order = self.order.max(rhs.order);
        let size = 1usize << order;
        let mut out = Jet::constant_of(0.0);
        out.order = order;
        // subset convolution: c[S] = Σ_{T ⊆ S} a[T] b[S \ T]
        for s in 0..size {
            let mut acc = 0.0;
            let mut t = s;
            loop {
                acc += self.coeffs[t] * rhs.coeffs[s ^ t];
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
            out.coeffs[s] = acc;
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        let b0 = rhs.coeffs[0];
        if rhs.order == 0 {
            let mut out = self;
            for a in &mut out.coeffs[..1 << self.order] {
                *a /= b0;
            }
            return out;
        }
        // Keep the value part identical to real division.
        let mut out = self * rhs.recip();
        out.coeffs[0] = self.coeffs[0] / b0;
        out
    }
}

impl Scalar for Jet {
    fn constant(value: f64) -> Self {
        Jet::constant_of(value)
    }
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn is_constant(&self) -> bool {
        self.coeffs[1..self.size()].iter().all(|c| *c == 0.0)
    }
    fn scale(mut self, factor: f64) -> Self {
        for a in &mut self.coeffs[..1 << self.order] {
            *a *= factor;
        }
        self
    }
    fn recip(self) -> Self {
        let a0 = self.value();
        let m = self.order();
        let mut c = Vec::with_capacity(m + 1);
        let mut p = 1.0 / a0;
        for _ in 0..=m {
            c.push(p);
            p = -p / a0;
        }
        self.compose(&c)
    }
    fn sqrt(self) -> Self {
        let a0 = self.value();
        let m = self.order();
        let mut c = Jet::taylor_powf(a0, 0.5, m);
        c[0] = a0.sqrt();
        self.compose(&c)
    }
    fn exp(self) -> Self {
        let e = self.value().exp();
        let mut c = Vec::with_capacity(self.order() + 1);
        let mut fact = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                fact *= k as f64;
            }
            c.push(e / fact);
        }
        self.compose(&c)
    }
    fn ln(self) -> Self {
        let a0 = self.value();
        let mut c = vec![a0.ln()];
        let mut p = 1.0;
        for k in 1..=self.order() {
            p /= a0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            c.push(sign * p / k as f64);
        }
        self.compose(&c)
    }
    fn sin(self) -> Self {
        let (s, co) = self.value().sin_cos();
        let cycle = [s, co, -s, -co];
        let mut c = Vec::with_capacity(self.order() + 1);
        let mut fact = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                fact *= k as f64;
            }
            c.push(cycle[k % 4] / fact);
        }
        self.compose(&c)
    }
    fn cos(self) -> Self {
        let (s, co) = self.value().sin_cos();
        let cycle = [co, -s, -co, s];
        let mut c = Vec::with_capacity(self.order() + 1);
        let mut fact = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                fact *= k as f64;
            }
            c.push(cycle[k % 4] / fact);
        }
        self.compose(&c)
    }
    fn atan(self) -> Self {
        // atan'(a0 + s) = 1 / (p0 + p1 s + s²) expanded as a power series in s,
        // then integrated term by term.
        let a0 = self.value();
        let m = self.order();
        let p0 = 1.0 + a0 * a0;
        let p1 = 2.0 * a0;
        let mut d = Vec::with_capacity(m);
        for k in 0..m {
            let prev1 = if k >= 1 { d[k - 1] } else { 0.0 };
            let prev2 = if k >= 2 { d[k - 2] } else { 0.0 };
            let dk = if k == 0 { 1.0 / p0 } else { -(p1 * prev1 + prev2) / p0 };
            d.push(dk);
        }
        let mut c = vec![a0.atan()];
        for k in 1..=m {
            c.push(d[k - 1] / k as f64);
        }
        self.compose(&c)
    }
    fn powf(self, exponent: f64) -> Self {
        let a0 = self.value();
        if self.order == 0 {
            return Jet::constant_of(a0.powf(exponent));
        }
        let c = Jet::taylor_powf(a0, exponent, self.order());
        self.compose(&c)
    }
    fn from_jet(jet: &Jet) -> Self {
        *jet
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn var(value: f64, order: usize, mask: u32) -> Jet {
        Jet::seeded(value, order, mask).unwrap()
    }

    #[test]
    fn product_rule_on_distinct_generators() {
        // f = a*b with a seeded on ε0 and b on ε1
        let a = var(3.0, 2, 0b01);
        let b = var(5.0, 2, 0b10);
        let p = a * b;
        assert_eq!(p.value(), 15.0);
        assert_eq!(p.extract(&[0]), 5.0);
        assert_eq!(p.extract(&[1]), 3.0);
        assert_eq!(p.extract(&[0, 1]), 1.0);
    }

    #[test]
    fn cube_third_derivative() {
        let y = var(2.0, 3, 0b111);
        let f = y * y * y;
        assert_eq!(f.top(), 6.0);
        assert_eq!(f.extract(&[0, 1]), 12.0);
        assert_eq!(f.extract(&[0]), 12.0);
    }

    #[test]
    fn elementary_functions_match_closed_derivatives() {
        let x0: f64 = 0.7;
        let x = var(x0, 3, 0b111);
        let cases: [(Jet, [f64; 4]); 6] = [
            (x.exp(), [x0.exp(), x0.exp(), x0.exp(), x0.exp()]),
            (x.ln(), [x0.ln(), 1.0 / x0, -1.0 / (x0 * x0), 2.0 / x0.powi(3)]),
            (x.sin(), [x0.sin(), x0.cos(), -x0.sin(), -x0.cos()]),
            (x.cos(), [x0.cos(), -x0.sin(), -x0.cos(), x0.sin()]),
            (
                x.sqrt(),
                [
                    x0.sqrt(),
                    0.5 * x0.powf(-0.5),
                    -0.25 * x0.powf(-1.5),
                    0.375 * x0.powf(-2.5),
                ],
            ),
            (
                x.atan(),
                [
                    x0.atan(),
                    1.0 / (1.0 + x0 * x0),
                    -2.0 * x0 / (1.0 + x0 * x0).powi(2),
                    (6.0 * x0 * x0 - 2.0) / (1.0 + x0 * x0).powi(3),
                ],
            ),
        ];
        for (jet, expected) in cases {
            assert_relative_eq!(jet.value(), expected[0], max_relative = 1e-14);
            assert_relative_eq!(jet.extract(&[0]), expected[1], max_relative = 1e-14);
            assert_relative_eq!(jet.extract(&[0, 1]), expected[2], max_relative = 1e-13);
            assert_relative_eq!(jet.top(), expected[3], max_relative = 1e-13);
        }
    }

    #[test]
    fn division_and_integer_powers() {
        let x = var(1.5, 2, 0b11);
        let r = Jet::constant(1.0) / x;
        assert_relative_eq!(r.top(), 2.0 / 1.5f64.powi(3), max_relative = 1e-14);
        let q = x.powi(-2);
        assert_relative_eq!(q.top(), 6.0 / 1.5f64.powi(4), max_relative = 1e-14);
        let c = x.powi(3);
        assert_relative_eq!(c.top(), 6.0 * 1.5, max_relative = 1e-14);
    }

    #[test]
    fn projection_keeps_inner_generators() {
        // f = y^4 with 2 inner and 1 outer generator; projecting over the
        // inner pair yields a jet of f'' over the outer generator.
        let y = var(2.0, 3, 0b111);
        let f = y.powi(4);
        let p = f.project(2);
        assert_eq!(p.order(), 1);
        assert_relative_eq!(p.value(), 12.0 * 4.0, max_relative = 1e-14);
        assert_relative_eq!(p.top(), 24.0 * 2.0, max_relative = 1e-14);
        assert_eq!(Jet::constant_of(3.0).project(2).value(), 0.0);
    }

    #[test]
    fn generator_cap_enforced() {
        assert!(Jet::seeded(1.0, 7, 0).is_err());
        assert!(Jet::seeded(1.0, 6, 0).is_ok());
    }

    #[test]
    fn mixed_orders_promote() {
        let a = var(2.0, 1, 0b1);
        let b = var(3.0, 2, 0b10);
        let s = a + b;
        assert_eq!(s.order(), 2);
        assert_eq!(s.coefficients(), &[5.0, 1.0, 1.0, 0.0]);
        let p = a * b;
        assert_eq!(p.coefficients(), &[6.0, 3.0, 2.0, 1.0]);
    }
}
