//! Axis-parallel open boxes and canonical finite unions of them.
//!
//! Canonical form is produced by a recursive slab sweep: along the first
//! axis of the sweep order the line is cut at every box face, each slab gets
//! the canonical cross-section of the boxes spanning it, and neighbouring
//! slabs with identical cross-sections are merged. The result depends only
//! on the point set (up to measure zero), so it is idempotent and
//! independent of input order.

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::scalar::{ExactScalar, Scalar};

pub const MAX_DIM: usize = 3;

/// Open axis-parallel box; one interval per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AxisBox<T = ExactScalar> {
    axes: Vec<Interval<T>>,
}

impl<T: Scalar> AxisBox<T> {
    pub fn new(axes: Vec<Interval<T>>) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension(axes.len()));
        }
        Ok(Self { axes })
    }

    /// Builds a box from per-axis `(lo, hi)` pairs.
    pub fn from_bounds(bounds: Vec<(T, T)>) -> Result<Self> {
        let axes = bounds
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// Lower-dimensional cell used by fiber decompositions; may have zero axes.
    pub(crate) fn cell(axes: Vec<Interval<T>>) -> Self {
        Self { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval<T>] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Interval<T> {
        &self.axes[i]
    }

    pub fn volume(&self) -> T {
        self.axes.iter().fold(T::one(), |acc, iv| acc * iv.length())
    }

    pub fn contains(&self, point: &[T]) -> bool {
        self.axes.iter().zip(point).all(|(iv, x)| iv.contains(x))
    }

    /// Volume of the intersection with another box of the same dimension.
    pub fn overlap_volume(&self, other: &Self) -> T {
        let mut acc = T::one();
        for (a, b) in self.axes.iter().zip(&other.axes) {
            match a.intersect(b) {
                Some(iv) => acc = acc * iv.length(),
                None => return T::zero(),
            }
        }
        acc
    }

    pub fn translate(&self, offset: &[T]) -> Self {
        Self {
            axes: self
                .axes
                .iter()
                .zip(offset)
                .map(|(iv, c)| iv.translate(c))
                .collect(),
        }
    }

    pub fn scale(&self, lambda: &T) -> Self {
        Self {
            axes: self.axes.iter().map(|iv| iv.scale(lambda)).collect(),
        }
    }

    /// Inserts `interval` as axis `axis` of a lower-dimensional cell.
    pub fn extrude(&self, axis: usize, interval: Interval<T>) -> Self {
        let mut axes = self.axes.clone();
        axes.insert(axis, interval);
        Self { axes }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AxisBox<U> {
        AxisBox {
            axes: self.axes.iter().map(|iv| iv.map(&f)).collect(),
        }
    }
}

/// Finite union of pairwise disjoint open boxes in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxSet<T = ExactScalar> {
    dim: usize,
    boxes: Vec<AxisBox<T>>,
}

/// Canonical decomposition piece: a cell over all sweep axes but the last,
/// and the fiber over the last sweep axis.
type Piece<T> = (Vec<Interval<T>>, IntervalSet<T>);

fn sweep<T: Scalar>(boxes: &[&AxisBox<T>], order: &[usize]) -> Vec<Piece<T>> {
    let axis = order[0];
    if order.len() == 1 {
        let fiber = IntervalSet::from_intervals(boxes.iter().map(|b| b.axis(axis).clone()));
        return if fiber.is_empty() {
            Vec::new()
        } else {
            vec![(Vec::new(), fiber)]
        };
    }
    let mut cuts: Vec<T> = boxes
        .iter()
        .flat_map(|b| [b.axis(axis).lo().clone(), b.axis(axis).hi().clone()])
        .collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();

    // (slab, cross-section) with merged neighbours
    let mut slabs: Vec<(Interval<T>, Vec<Piece<T>>)> = Vec::new();
    for w in cuts.windows(2) {
        let slab = Interval::try_new(w[0].clone(), w[1].clone()).expect("sorted distinct cuts");
        let active: Vec<&AxisBox<T>> = boxes
            .iter()
            .copied()
            .filter(|b| b.axis(axis).covers(&slab))
            .collect();
        let cross = if active.is_empty() {
            Vec::new()
        } else {
            sweep(&active, &order[1..])
        };
        if cross.is_empty() {
            continue;
        }
        if let Some((prev, prev_cross)) = slabs.last_mut() {
            if prev.hi() == slab.lo() && *prev_cross == cross {
                *prev = Interval::try_new(prev.lo().clone(), slab.hi().clone()).expect("widened");
                continue;
            }
        }
        slabs.push((slab, cross));
    }

    slabs
        .into_iter()
        .flat_map(|(slab, cross)| {
            cross.into_iter().map(move |(mut cell, fiber)| {
                cell.insert(0, slab.clone());
                (cell, fiber)
            })
        })
        .collect()
}

impl<T: Scalar> BoxSet<T> {
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            dim,
            boxes: Vec::new(),
        })
    }

    /// Canonicalizes a list of boxes sharing dimension `dim`.
    pub fn canonicalize(dim: usize, raw: Vec<AxisBox<T>>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(bad) = raw.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let order: Vec<usize> = (0..dim).collect();
        let refs: Vec<&AxisBox<T>> = raw.iter().collect();
        let boxes = if refs.is_empty() {
            Vec::new()
        } else {
            sweep(&refs, &order)
                .into_iter()
                .flat_map(|(cell, fiber)| {
                    fiber
                        .intervals()
                        .iter()
                        .map(|iv| {
                            let mut axes = cell.clone();
                            axes.push(iv.clone());
                            AxisBox { axes }
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        };
        Ok(Self { dim, boxes })
    }

    pub fn from_box(b: AxisBox<T>) -> Self {
        Self {
            dim: b.dim(),
            boxes: vec![b],
        }
    }

    /// One-dimensional box set with the intervals of `set`.
    pub fn from_interval_set(set: &IntervalSet<T>) -> Self {
        Self {
            dim: 1,
            boxes: set
                .intervals()
                .iter()
                .map(|iv| AxisBox {
                    axes: vec![iv.clone()],
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[AxisBox<T>] {
        &self.boxes
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn measure(&self) -> T {
        self.boxes.iter().fold(T::zero(), |acc, b| acc + b.volume())
    }

    pub fn contains(&self, point: &[T]) -> bool {
        self.boxes.iter().any(|b| b.contains(point))
    }

    /// Volume of `self ∩ probe`.
    pub fn overlap_volume(&self, probe: &AxisBox<T>) -> T {
        self.boxes
            .iter()
            .fold(T::zero(), |acc, b| acc + b.overlap_volume(probe))
    }

    /// Smallest box containing the set.
    pub fn bounding_box(&self) -> Option<AxisBox<T>> {
        let first = self.boxes.first()?;
        let mut axes: Vec<Interval<T>> = first.axes.clone();
        for b in &self.boxes[1..] {
            for (acc, iv) in axes.iter_mut().zip(&b.axes) {
                let lo = T::min_of(acc.lo().clone(), iv.lo().clone());
                let hi = T::max_of(acc.hi().clone(), iv.hi().clone());
                *acc = Interval::try_new(lo, hi).expect("hull of nonempty intervals");
            }
        }
        Some(AxisBox { axes })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        Self::canonicalize(
            self.dim,
            self.boxes.iter().chain(&other.boxes).cloned().collect(),
        )
    }

    /// Splits the set into cells of the orthogonal complement of `axis`,
    /// each carrying its constant fiber along `axis`.
    ///
    /// Cells are boxes of dimension `dim - 1` (axis removed); for `dim == 1`
    /// there is a single zero-dimensional cell.
    pub fn fiber_decompose(&self, axis: usize) -> Result<Vec<(AxisBox<T>, IntervalSet<T>)>> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        if self.boxes.is_empty() {
            return Ok(Vec::new());
        }
        let order: Vec<usize> = (0..self.dim).filter(|&i| i != axis).chain([axis]).collect();
        let refs: Vec<&AxisBox<T>> = self.boxes.iter().collect();
        Ok(sweep(&refs, &order)
            .into_iter()
            .map(|(cell, fiber)| (AxisBox::cell(cell), fiber))
            .collect())
    }

    pub fn translate(&self, offset: &[T]) -> Self {
        Self {
            dim: self.dim,
            boxes: self.boxes.iter().map(|b| b.translate(offset)).collect(),
        }
    }

    pub fn scale(&self, lambda: &T) -> Self {
        Self {
            dim: self.dim,
            boxes: self.boxes.iter().map(|b| b.scale(lambda)).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BoxSet<U> {
        BoxSet {
            dim: self.dim,
            boxes: self.boxes.iter().map(|b| b.map(&f)).collect(),
        }
    }

    pub fn to_f64(&self) -> BoxSet<f64> {
        self.map(|x| x.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn square(x0: i64, y0: i64, x1: i64, y1: i64) -> AxisBox {
        AxisBox::from_bounds(vec![(q(x0, 1), q(x1, 1)), (q(y0, 1), q(y1, 1))]).unwrap()
    }

    #[test]
    fn identical_squares_collapse() {
        let s = BoxSet::canonicalize(2, vec![square(0, 0, 1, 1), square(0, 0, 1, 1)]).unwrap();
        assert_eq!(s.boxes().len(), 1);
        assert_eq!(s.measure(), q(1, 1));
    }

    #[test]
    fn overlapping_squares_inclusion_exclusion() {
        let s = BoxSet::canonicalize(2, vec![square(0, 0, 2, 2), square(1, 1, 3, 3)]).unwrap();
        assert_eq!(s.measure(), q(4 + 4 - 1, 1));
        for (i, a) in s.boxes().iter().enumerate() {
            for b in &s.boxes()[i + 1..] {
                assert_eq!(a.overlap_volume(b), q(0, 1));
            }
        }
    }

    #[test]
    fn empty_list_is_empty_set() {
        let s: BoxSet = BoxSet::canonicalize(2, vec![]).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.measure(), q(0, 1));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let b1 = AxisBox::from_bounds(vec![(q(0, 1), q(1, 1))]).unwrap();
        assert!(matches!(
            BoxSet::canonicalize(2, vec![square(0, 0, 1, 1), b1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn order_independent() {
        let boxes = vec![square(0, 0, 2, 1), square(1, 0, 3, 2), square(-1, 1, 0, 4)];
        let a = BoxSet::canonicalize(2, boxes.clone()).unwrap();
        let mut rev = boxes;
        rev.reverse();
        let b = BoxSet::canonicalize(2, rev).unwrap();
        assert_eq!(a, b);
        let again = BoxSet::canonicalize(2, a.boxes().to_vec()).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn fiber_of_single_box() {
        let s = BoxSet::from_box(square(0, 0, 1, 2));
        let cells = s.fiber_decompose(1).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].0.axis(0), &Interval::new(q(0, 1), q(1, 1)).unwrap());
        assert_eq!(
            cells[0].1,
            IntervalSet::from_pairs([(q(0, 1), q(2, 1))])
        );
    }

    #[test]
    fn stacked_squares_share_one_cell() {
        let s = BoxSet::canonicalize(2, vec![square(0, 0, 1, 1), square(0, 2, 1, 3)]).unwrap();
        let cells = s.fiber_decompose(1).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(
            cells[0].1,
            IntervalSet::from_pairs([(q(0, 1), q(1, 1)), (q(2, 1), q(3, 1))])
        );
        // reassembly reproduces the set on a grid
        for i in -4..16 {
            for j in -4..16 {
                let p = [q(2 * i + 1, 8), q(2 * j + 1, 8)];
                let in_cells = cells
                    .iter()
                    .any(|(c, f)| c.axis(0).contains(&p[0]) && f.contains(&p[1]));
                assert_eq!(in_cells, s.contains(&p));
            }
        }
    }

    #[test]
    fn l_shape_has_two_cells() {
        let s = BoxSet::canonicalize(2, vec![square(0, 0, 2, 1), square(0, 1, 1, 2)]).unwrap();
        let cells = s.fiber_decompose(0).unwrap();
        assert_eq!(cells.len(), 2);
        assert_ne!(cells[0].1, cells[1].1);
    }

    #[test]
    fn axis_out_of_range() {
        let s = BoxSet::from_box(square(0, 0, 1, 1));
        assert!(matches!(
            s.fiber_decompose(2),
            Err(Error::AxisOutOfRange { axis: 2, dim: 2 })
        ));
    }

    #[test]
    fn three_dimensional_union() {
        let a = AxisBox::from_bounds(vec![(q(0, 1), q(2, 1)); 3]).unwrap();
        let b = AxisBox::from_bounds(vec![(q(1, 1), q(3, 1)); 3]).unwrap();
        let s = BoxSet::canonicalize(3, vec![a, b]).unwrap();
        assert_eq!(s.measure(), q(8 + 8 - 1, 1));
        let cells = s.fiber_decompose(2).unwrap();
        let total = cells
            .iter()
            .fold(q(0, 1), |acc, (c, f)| acc + c.volume() * f.measure());
        assert_eq!(total, q(15, 1));
    }
}
