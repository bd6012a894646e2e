//! Finite atomic measure spaces and functions sampled on their atoms.
//!
//! A bounded set is modelled as a finite partition into atoms, each carrying
//! its measure as a positive weight. Functions are constant on atoms, so every
//! integral reduces to an exact finite sum over the atoms.
//!
//! Each space also carries a translation rule. Interval models shift point
//! identifiers and drop whatever falls outside the space (functions are
//! extended by zero). Group models wrap around: identifiers are the elements
//! `0..order` of a finite abelian group `Z_{n1} x ... x Z_{nk}` in mixed radix
//! with the last factor varying fastest.

use std::sync::Arc;

use crate::error::{Error, Result};

/// How translations act on the point identifiers of a space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    /// Identifiers shift by the translation; points leaving the space are clipped.
    Interval,
    /// Identifiers are elements of `Z_{n1} x ... x Z_{nk}`; translations wrap.
    Group(GroupShape),
}

/// The factor list of a finite abelian group `Z_{n1} x ... x Z_{nk}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupShape {
    factors: Vec<usize>,
    order: usize,
}

impl GroupShape {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::InvalidGroup(factors));
        }
        let order = factors.iter().product();
        Ok(Self { factors, order })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Reduces an arbitrary integer to an element id in `0..order`.
    pub fn reduce(&self, x: i64) -> usize {
        x.rem_euclid(self.order as i64) as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, n| (x + y) % n)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, n| (x + n - y) % n)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.sub(0, a)
    }

    fn combine(&self, a: usize, b: usize, op: impl Fn(usize, usize, usize) -> usize) -> usize {
        if self.factors.len() == 1 {
            return op(a, b, self.order);
        }
        let mut out = 0;
        let mut stride = 1;
        let (mut a, mut b) = (a, b);
        for &n in self.factors.iter().rev() {
            out += op(a % n, b % n, n) * stride;
            stride *= n;
            a /= n;
            b /= n;
        }
        out
    }
}

/// A finite weighted point set standing in for a bounded domain or a finite
/// group with Haar weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    points: Vec<i64>,
    weights: Vec<f64>,
    label: String,
    topology: Topology,
}

impl MeasureSpace {
    /// Interval model over strictly increasing point identifiers.
    pub fn new(points: Vec<i64>, weights: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        Self::with_topology(points, weights, label, Topology::Interval)
    }

    pub fn with_topology(
        points: Vec<i64>,
        weights: Vec<f64>,
        label: impl Into<String>,
        topology: Topology,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySpace);
        }
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: weights.len(),
            });
        }
        for pair in points.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicatePoint(pair[0]));
            }
            if pair[0] > pair[1] {
                return Err(Error::UnorderedPoints {
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        for (&point, &weight) in points.iter().zip(&weights) {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidWeight { point, weight });
            }
        }
        if let Topology::Group(shape) = &topology {
            let canonical = points.iter().enumerate().all(|(i, &p)| p == i as i64);
            if !canonical || points.len() != shape.order() {
                return Err(Error::NotAGroup);
            }
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::InvalidWeight {
                point: points[0],
                weight: total,
            });
        }
        Ok(Self {
            points,
            weights,
            label: label.into(),
            topology,
        })
    }

    /// `n` atoms `0..n` of equal weight on an interval.
    pub fn uniform_interval(n: usize, weight: f64) -> Result<Self> {
        Self::new(
            (0..n as i64).collect(),
            vec![weight; n],
            format!("interval[{n}]"),
        )
    }

    /// `n` atoms of weight `1/n`: a probability space.
    pub fn probability_interval(n: usize) -> Result<Self> {
        Self::uniform_interval(n, 1.0 / n as f64)
    }

    /// Counting measure on the index set `0..n`.
    pub fn counting(n: usize) -> Result<Self> {
        Self::uniform_interval(n, 1.0)
    }

    /// The cyclic group `Z_n` with every element weighted `weight`.
    pub fn cyclic(n: usize, weight: f64) -> Result<Self> {
        Self::group(GroupShape::cyclic(n)?, weight)
    }

    pub fn group(shape: GroupShape, weight: f64) -> Result<Self> {
        let n = shape.order();
        let label = format!(
            "Z_{}",
            shape
                .factors()
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(" x Z_")
        );
        Self::with_topology(
            (0..n as i64).collect(),
            vec![weight; n],
            label,
            Topology::Group(shape),
        )
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    pub fn group_shape(&self) -> Option<&GroupShape> {
        match &self.topology {
            Topology::Group(shape) => Some(shape),
            Topology::Interval => None,
        }
    }

    /// Position of a point identifier, if present.
    pub fn index_of(&self, point: i64) -> Option<usize> {
        match &self.topology {
            Topology::Group(shape) => (0..shape.order() as i64)
                .contains(&point)
                .then_some(point as usize),
            Topology::Interval => self.points.binary_search(&point).ok(),
        }
    }

    /// Translates the atom at `index` by `shift`, following the space's rule.
    /// Returns `None` when an interval translate leaves the space.
    pub fn translate_index(&self, index: usize, shift: i64) -> Option<usize> {
        match &self.topology {
            Topology::Group(shape) => Some(shape.add(index, shape.reduce(shift))),
            Topology::Interval => self.index_of(self.points[index].checked_add(shift)?),
        }
    }

    /// Measure of a set of atom positions.
    pub fn mass_of(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.weights[i]).sum()
    }

    /// Same points and topology with new weights.
    pub fn reweighted(&self, weights: Vec<f64>) -> Result<Self> {
        Self::with_topology(
            self.points.clone(),
            weights,
            self.label.clone(),
            self.topology.clone(),
        )
    }
}

pub(crate) fn same_space(a: &Arc<MeasureSpace>, b: &Arc<MeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A real-valued function, constant on each atom of a measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    space: Arc<MeasureSpace>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(space: Arc<MeasureSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                point: space.points()[i],
            });
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: Arc<MeasureSpace>) -> Self {
        let values = vec![0.0; space.len()];
        Self { space, values }
    }

    pub fn constant(space: Arc<MeasureSpace>, c: f64) -> Result<Self> {
        let values = vec![c; space.len()];
        Self::new(space, values)
    }

    /// Characteristic function of a set of point identifiers.
    pub fn indicator(space: Arc<MeasureSpace>, points: &[i64]) -> Result<Self> {
        let mut values = vec![0.0; space.len()];
        for &p in points {
            let i = space.index_of(p).ok_or(Error::UnknownPoint(p))?;
            values[i] = 1.0;
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(
            self.space.clone(),
            self.values.iter().map(|v| c * v).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn abs(&self) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    /// The same values on another space with the same number of atoms.
    pub fn rehome(&self, space: Arc<MeasureSpace>) -> Result<Self> {
        Self::new(space, self.values.clone())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Self::new(
            self.space.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        )
    }
}
