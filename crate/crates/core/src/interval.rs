//! Open intervals and canonical finite unions of them.

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, Scalar};

/// Open interval `(lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval<T = ExactScalar> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::EmptyInterval {
                lo: lo.render(),
                hi: hi.render(),
            })
        }
    }

    /// `None` when the interval would be empty.
    pub fn try_new(lo: T, hi: T) -> Option<Self> {
        (lo < hi).then_some(Self { lo, hi })
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn length(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn contains(&self, x: &T) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Closed-hull containment of another interval.
    pub fn covers(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = T::max_of(self.lo.clone(), other.lo.clone());
        let hi = T::min_of(self.hi.clone(), other.hi.clone());
        Self::try_new(lo, hi)
    }

    /// Length of the overlap with another interval (zero if disjoint).
    pub fn overlap(&self, other: &Self) -> T {
        self.intersect(other).map(|i| i.length()).unwrap_or_else(T::zero)
    }

    pub fn translate(&self, c: &T) -> Self {
        Self {
            lo: self.lo.clone() + c.clone(),
            hi: self.hi.clone() + c.clone(),
        }
    }

    /// Image under `x -> lambda * x` for `lambda > 0`.
    pub fn scale(&self, lambda: &T) -> Self {
        assert!(lambda > &T::zero(), "dilation factor must be positive");
        Self {
            lo: self.lo.clone() * lambda.clone(),
            hi: self.hi.clone() * lambda.clone(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Interval<U> {
        Interval {
            lo: f(&self.lo),
            hi: f(&self.hi),
        }
    }
}

/// Finite union of open intervals in canonical form: sorted, pairwise
/// disjoint, and separated by gaps of positive length.
///
/// Touching pieces are merged, since the shared endpoint has measure zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSet<T = ExactScalar> {
    intervals: Vec<Interval<T>>,
}

impl<T: Scalar> Default for IntervalSet<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn single(interval: Interval<T>) -> Self {
        Self {
            intervals: vec![interval],
        }
    }

    /// Canonicalizes an arbitrary collection of intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval<T>>>(raw: I) -> Self {
        let mut items: Vec<Interval<T>> = raw.into_iter().collect();
        items.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.hi.total_cmp(&a.hi)));
        let mut merged: Vec<Interval<T>> = Vec::with_capacity(items.len());
        for iv in items {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        Self { intervals: merged }
    }

    /// Builds a set from `(lo, hi)` pairs, skipping empty pairs.
    pub fn from_pairs<I: IntoIterator<Item = (T, T)>>(pairs: I) -> Self {
        Self::from_intervals(pairs.into_iter().filter_map(|(a, b)| Interval::try_new(a, b)))
    }

    pub fn intervals(&self) -> &[Interval<T>] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> T {
        self.intervals
            .iter()
            .fold(T::zero(), |acc, iv| acc + iv.length())
    }

    pub fn contains(&self, x: &T) -> bool {
        let idx = self.intervals.partition_point(|iv| &iv.hi <= x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<Interval<T>> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval {
            lo: first.lo.clone(),
            hi: last.hi.clone(),
        })
    }

    /// `|self ∩ (-inf, x)|`.
    pub fn measure_below(&self, x: &T) -> T {
        let mut acc = T::zero();
        for iv in &self.intervals {
            if &iv.hi <= x {
                acc = acc + iv.length();
            } else {
                if &iv.lo < x {
                    acc = acc + (x.clone() - iv.lo.clone());
                }
                break;
            }
        }
        acc
    }

    /// `|self ∩ (lo, hi)|`.
    pub fn measure_in(&self, window: &Interval<T>) -> T {
        self.intervals
            .iter()
            .fold(T::zero(), |acc, iv| acc + iv.overlap(window))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).cloned())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.intervals.len() && j < other.intervals.len() {
            let a = &self.intervals[i];
            let b = &other.intervals[j];
            if let Some(iv) = a.intersect(b) {
                out.push(iv);
            }
            if a.hi <= b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let mut j = 0;
        for a in &self.intervals {
            let mut cursor = a.lo.clone();
            while j < other.intervals.len() && other.intervals[j].hi <= a.lo {
                j += 1;
            }
            let mut k = j;
            while k < other.intervals.len() && other.intervals[k].lo < a.hi {
                let b = &other.intervals[k];
                if let Some(iv) = Interval::try_new(cursor.clone(), b.lo.clone()) {
                    out.push(iv);
                }
                if b.hi > cursor {
                    cursor = b.hi.clone();
                }
                k += 1;
            }
            if let Some(iv) = Interval::try_new(cursor, a.hi.clone()) {
                out.push(iv);
            }
        }
        Self::from_intervals(out)
    }

    /// Every interval of `other` lies inside one interval of `self`.
    pub fn contains_set(&self, other: &Self) -> bool {
        other
            .intervals
            .iter()
            .all(|b| self.intervals.iter().any(|a| a.covers(b)))
    }

    pub fn translate(&self, c: &T) -> Self {
        Self {
            intervals: self.intervals.iter().map(|iv| iv.translate(c)).collect(),
        }
    }

    pub fn scale(&self, lambda: &T) -> Self {
        Self {
            intervals: self.intervals.iter().map(|iv| iv.scale(lambda)).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> IntervalSet<U> {
        IntervalSet::from_intervals(self.intervals.iter().map(|iv| iv.map(&f)))
    }

    pub fn to_f64(&self) -> IntervalSet<f64> {
        self.map(|x| x.to_f64())
    }
}
