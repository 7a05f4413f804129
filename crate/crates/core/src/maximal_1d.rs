//! Exact superlevel sets of the one-dimensional uncentered maximal function
//! of two-valued inputs `χ_E + γ χ_{E^c}`.
//!
//! A point `x` has `M χ_E(x) > α` iff some `s <= x <= t` satisfies
//! `G(t) > G(s)` for `G(u) = |E ∩ (-∞, u)| - α u`. With `L` the running
//! minimum of `G` from the left and `R` the running maximum from the right,
//! the superlevel set is `{R > L}`. Both envelopes are piecewise linear with
//! kinks only at endpoints of `E` and at one crossing per segment, so the set
//! is computed in closed form in whatever ordered field the input uses.

use num_traits::One;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::scalar::{ExactScalar, Scalar};

/// `χ_E + γ χ_{E^c}` with `0 <= γ < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedIndicator<T = ExactScalar> {
    base: IntervalSet<T>,
    floor: T,
}

impl<T: Scalar> MixedIndicator<T> {
    pub fn new(base: IntervalSet<T>, floor: T) -> Result<Self> {
        if floor < T::zero() || floor >= T::one() {
            return Err(Error::FloorOutOfRange {
                gamma: floor.render(),
            });
        }
        Ok(Self { base, floor })
    }

    pub fn base(&self) -> &IntervalSet<T> {
        &self.base
    }

    pub fn floor(&self) -> &T {
        &self.floor
    }
}

/// Superlevel set at `level` together with `|set| / |E|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperlevelResult<T = ExactScalar> {
    pub level: T,
    pub set: IntervalSet<T>,
    pub ratio: T,
}

fn check_level<T: Scalar>(alpha: &T) -> Result<()> {
    if alpha <= &T::zero() || alpha >= &T::one() {
        return Err(Error::LevelOutOfRange {
            alpha: alpha.render(),
        });
    }
    Ok(())
}

/// `{x : M χ_E(x) > α}` for `0 < α < 1`.
pub fn superlevel_indicator<T: Scalar>(e: &IntervalSet<T>, alpha: &T) -> Result<SuperlevelResult<T>> {
    check_level(alpha)?;
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    let set = rising_sun(e, alpha);
    let ratio = set.measure() / e.measure();
    Ok(SuperlevelResult {
        level: alpha.clone(),
        set,
        ratio,
    })
}

fn rising_sun<T: Scalar>(e: &IntervalSet<T>, alpha: &T) -> IntervalSet<T> {
    let mut pts: Vec<T> = Vec::with_capacity(2 * e.len());
    for iv in e.intervals() {
        pts.push(iv.lo().clone());
        pts.push(iv.hi().clone());
    }
    let k = pts.len() - 1;

    // G at the breakpoints; segment i is (pts[i], pts[i+1]), inside E iff i is even
    let mut g = Vec::with_capacity(pts.len());
    let mut covered = T::zero();
    for (i, p) in pts.iter().enumerate() {
        if i > 0 && i % 2 == 1 {
            covered = covered + (p.clone() - pts[i - 1].clone());
        }
        g.push(covered.clone() - alpha.clone() * p.clone());
    }

    let mut left_min = g.clone();
    for i in 1..=k {
        left_min[i] = T::min_of(left_min[i - 1].clone(), g[i].clone());
    }
    let mut right_max = g.clone();
    for i in (0..k).rev() {
        right_max[i] = T::max_of(right_max[i + 1].clone(), g[i].clone());
    }

    let mut pieces: Vec<Interval<T>> = Vec::new();
    let mut push = |lo: T, hi: T| {
        if let Some(iv) = Interval::try_new(lo, hi) {
            pieces.push(iv);
        }
    };

    // left ray: G decreasing, L = G, condition G(x) < R(p0)
    push(
        pts[0].clone() - (right_max[0].clone() - g[0].clone()) / alpha.clone(),
        pts[0].clone(),
    );
    // right ray: R = G, condition G(x) > L(pK)
    push(
        pts[k].clone(),
        pts[k].clone() + (g[k].clone() - left_min[k].clone()) / alpha.clone(),
    );

    for i in 0..k {
        let (a, b) = (pts[i].clone(), pts[i + 1].clone());
        if i % 2 == 0 {
            // G rises with slope 1 - α: G(x) > L(a) on the whole segment
            push(a, b);
            continue;
        }
        // gap: G falls with slope α
        // G(x) > L(a)  <=>  x < a + (G(a) - L(a)) / α
        let cut_left = a.clone() + (g[i].clone() - left_min[i].clone()) / alpha.clone();
        push(a.clone(), T::min_of(cut_left, b.clone()));
        // G(x) < R(b)  <=>  x > a + (G(a) - R(b)) / α
        let cut_right = a.clone() + (g[i].clone() - right_max[i + 1].clone()) / alpha.clone();
        push(T::max_of(cut_right, a), b);
    }

    IntervalSet::from_intervals(pieces)
}

/// `(α - γ) / (1 - γ)`: the indicator level equivalent to level `α` for
/// `χ_E + γ χ_{E^c}`.
pub fn reduced_level<T: Scalar>(alpha: &T, gamma: &T) -> T {
    (alpha.clone() - gamma.clone()) / (T::one() - gamma.clone())
}

/// `{x : M(χ_E + γ χ_{E^c})(x) > α}` for `γ < α < 1`.
pub fn superlevel_mixed<T: Scalar>(f: &MixedIndicator<T>, alpha: &T) -> Result<SuperlevelResult<T>> {
    if alpha <= f.floor() {
        return Err(Error::LevelNotAboveFloor {
            alpha: alpha.render(),
            gamma: f.floor().render(),
        });
    }
    check_level(alpha)?;
    let reduced = reduced_level(alpha, f.floor());
    let mut res = superlevel_indicator(f.base(), &reduced)?;
    res.level = alpha.clone();
    Ok(res)
}

/// `1 + 4 (1 - α) / (α - γ)`.
pub fn lemma1_bound<T: Scalar>(alpha: &T, gamma: &T) -> Result<T> {
    if gamma < &T::zero() || gamma >= &T::one() {
        return Err(Error::FloorOutOfRange {
            gamma: gamma.render(),
        });
    }
    if alpha <= gamma {
        return Err(Error::LevelNotAboveFloor {
            alpha: alpha.render(),
            gamma: gamma.render(),
        });
    }
    check_level(alpha)?;
    let four = T::from_ratio(4, 1);
    Ok(T::one() + four * (T::one() - alpha.clone()) / (alpha.clone() - gamma.clone()))
}

/// Subfamily with the same union as `cover` in which every point lies in at
/// most two members.
///
/// Greedy: scan by left endpoint (longer first on ties) and keep an interval
/// only if the kept ones do not already cover it; then repeatedly drop any
/// interval covered by the union of its two neighbours.
pub fn bounded_overlap_select<T: Scalar>(cover: &[Interval<T>]) -> Vec<Interval<T>> {
    let mut sorted: Vec<Interval<T>> = cover.to_vec();
    sorted.sort_by(|a, b| a.lo().total_cmp(b.lo()).then(b.hi().total_cmp(a.hi())));

    let mut kept: Vec<Interval<T>> = Vec::new();
    // last connected component of the kept union
    let mut reach: Option<(T, T)> = None;
    for iv in sorted {
        let covered = match &reach {
            Some((start, end)) => start <= iv.lo() && iv.hi() <= end,
            None => false,
        };
        if covered {
            continue;
        }
        reach = match reach {
            Some((start, end)) if iv.lo() < &end => Some((start, T::max_of(end, iv.hi().clone()))),
            _ => Some((iv.lo().clone(), iv.hi().clone())),
        };
        kept.push(iv);
    }

    loop {
        let mut dropped = false;
        let mut i = 1;
        while i + 1 < kept.len() {
            let (prev, next) = (&kept[i - 1], &kept[i + 1]);
            let bridged = next.lo() < prev.hi();
            if bridged && prev.lo() <= kept[i].lo() && kept[i].hi() <= next.hi() {
                kept.remove(i);
                dropped = true;
            } else {
                i += 1;
            }
        }
        if !dropped {
            break;
        }
    }
    kept
}

/// Largest number of members covering a single point.
pub fn max_overlap<T: Scalar>(family: &[Interval<T>]) -> usize {
    let mut probes: Vec<T> = Vec::new();
    for iv in family {
        probes.push(iv.lo().clone());
        probes.push(iv.hi().clone());
    }
    probes.sort_by(|a, b| a.total_cmp(b));
    probes.dedup();
    let two = T::one() + T::one();
    let mut mids: Vec<T> = probes
        .windows(2)
        .map(|w| (w[0].clone() + w[1].clone()) / two.clone())
        .collect();
    mids.extend(probes);
    mids.iter()
        .map(|x| family.iter().filter(|iv| iv.contains(x)).count())
        .max()
        .unwrap_or(0)
}

/// Convenience: exact ratio law `2/α - 1` for a single interval.
pub fn single_interval_ratio(alpha: &ExactScalar) -> ExactScalar {
    ExactScalar::from_integer(2.into()) / alpha - ExactScalar::one()
}
