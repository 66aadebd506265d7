use crate::error::GeometryError;
use crate::expr::{seed, Coord, Expr};
use crate::jet::{Jet, Scalar};

use super::Point;

/// Evaluates derivatives of an expression at a point.
///
/// A probe carries a list of *outer* directions. Every query seeds the
/// requested *inner* directions first and the outer ones after them, then
/// keeps only the part of the result that carries every inner generator.
/// The answer is therefore the inner derivative as a jet over the outer
/// directions, which lets any formula assembled from these queries be
/// differentiated further simply by evaluating it over jets.
#[derive(Debug, Clone)]
pub struct Probe<'a> {
    expr: &'a Expr,
    point: &'a Point,
    outer: Vec<Coord>,
}

impl<'a> Probe<'a> {
    pub fn plain(expr: &'a Expr, point: &'a Point) -> Self {
        Probe {
            expr,
            point,
            outer: Vec::new(),
        }
    }

    pub fn with_outer(expr: &'a Expr, point: &'a Point, outer: Vec<Coord>) -> Self {
        Probe { expr, point, outer }
    }

    pub fn outer(&self) -> &[Coord] {
        &self.outer
    }

    pub fn point(&self) -> &Point {
        self.point
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    fn jet(&self, inner: &[Coord], squared: bool) -> Result<Jet, GeometryError> {
        let mut dirs = Vec::with_capacity(inner.len() + self.outer.len());
        dirs.extend_from_slice(inner);
        dirs.extend_from_slice(&self.outer);
        let coords = seed(&self.point.x, &self.point.y, &dirs)?;
        let v = self.expr.eval(&coords)?;
        let v = if squared { v * v } else { v };
        Ok(v.project(inner.len()))
    }

    /// Derivative of the expression along `inner`.
    pub fn value<S: Scalar>(&self, inner: &[Coord]) -> Result<S, GeometryError> {
        Ok(S::from_jet(&self.jet(inner, false)?))
    }

    /// Derivative of the squared expression along `inner`.
    pub fn squared<S: Scalar>(&self, inner: &[Coord]) -> Result<S, GeometryError> {
        Ok(S::from_jet(&self.jet(inner, true)?))
    }

    /// A coordinate as a scalar over the outer directions.
    pub fn coord<S: Scalar>(&self, c: Coord) -> S {
        let v = match c.axis {
            crate::expr::Axis::X => self.point.x[c.index],
            crate::expr::Axis::Y => self.point.y[c.index],
        };
        let mask = self
            .outer
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == c)
            .fold(0u32, |m, (i, _)| m | (1 << i));
        // outer.len() is bounded by the jet cap already enforced in `jet`
        let jet = Jet::seeded(v, self.outer.len(), mask).unwrap_or_else(|_| Jet::constant_of(v));
        S::from_jet(&jet)
    }
}

pub(crate) fn ys(indices: &[usize]) -> Vec<Coord> {
    indices.iter().map(|&i| Coord::y(i)).collect()
}
