//! Majorant chain for the iterated directional maximal operator.
//!
//! With `α_j = 1 - (1 - α_1)^j`, each step replaces the current set `E_j` by
//! `{M_axis(χ_{E_j} + α_j χ_{E_j^c}) > α_{j+1}}`, computed fiber by fiber
//! with the exact one-dimensional engine. Box sets with rational corners are
//! closed under this step.

use rayon::prelude::*;

use crate::boxset::{AxisBox, BoxSet};
use crate::error::{Error, Result};
use crate::maximal_1d::{lemma1_bound, superlevel_mixed, MixedIndicator};
use crate::scalar::{ExactScalar, Scalar};

/// Levels `α_0 = 0 < α_1 < ... < α_n < 1` with `1 - α_j = (1 - α_1)^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaChain<T = ExactScalar> {
    levels: Vec<T>,
}

impl<T: Scalar> AlphaChain<T> {
    pub fn new(alpha1: T, n: usize) -> Result<Self> {
        if alpha1 <= T::zero() || alpha1 >= T::one() {
            return Err(Error::LevelOutOfRange {
                alpha: alpha1.render(),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "chain length must be at least 1".into(),
            });
        }
        let miss = T::one() - alpha1;
        let mut levels = vec![T::zero()];
        let mut tail = T::one();
        for _ in 0..n {
            tail = tail * miss.clone();
            levels.push(T::one() - tail.clone());
        }
        Ok(Self { levels })
    }

    /// `α_0, ..., α_n`.
    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level(&self, j: usize) -> &T {
        &self.levels[j]
    }

    /// `(1 - α_{j+1}) / (α_{j+1} - α_j)` for `j = 0..n-1`.
    pub fn ratios(&self) -> Vec<T> {
        self.levels
            .windows(2)
            .map(|w| (T::one() - w[1].clone()) / (w[1].clone() - w[0].clone()))
            .collect()
    }

    /// Every ratio equals `(1 - α_1) / α_1`.
    pub fn telescoping_holds(&self) -> bool {
        let a1 = self.levels[1].clone();
        let target = (T::one() - a1.clone()) / a1;
        self.ratios().into_iter().all(|r| r == target)
    }

    /// Single-step Tauberian factor `1 + 4 (1 - α_1) / α_1`.
    pub fn step_factor(&self) -> T {
        lemma1_bound(&self.levels[1], &T::zero()).expect("α_1 validated at construction")
    }
}

/// The sets `E_0 = E, E_1, ..., E_n` of a chain run and their measures.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTrace<T = ExactScalar> {
    pub dim: usize,
    pub axes: Vec<usize>,
    pub levels: Vec<T>,
    pub sets: Vec<BoxSet<T>>,
    pub measures: Vec<T>,
    pub bound_factor: T,
}

impl<T: Scalar> ChainTrace<T> {
    /// `|E_j| <= factor^j |E|` for every recorded step.
    pub fn bound_holds(&self) -> bool {
        let Some(base) = self.measures.first() else {
            return true;
        };
        let mut cap = base.clone();
        for m in &self.measures {
            if m > &cap {
                return false;
            }
            cap = cap * self.bound_factor.clone();
        }
        true
    }

    pub fn final_set(&self) -> Option<&BoxSet<T>> {
        self.sets.last()
    }

    pub fn final_level(&self) -> &T {
        self.levels.last().expect("levels include α_0")
    }
}

/// `{x : M_axis(χ_S + γ χ_{S^c})(x) > α}` as a canonical box set.
pub fn chain_step<T: Scalar>(s: &BoxSet<T>, gamma: &T, alpha: &T, axis: usize) -> Result<BoxSet<T>> {
    if alpha <= gamma {
        return Err(Error::LevelNotAboveFloor {
            alpha: alpha.render(),
            gamma: gamma.render(),
        });
    }
    let cells = s.fiber_decompose(axis)?;
    let pieces: Vec<Vec<AxisBox<T>>> = cells
        .par_iter()
        .map(|(cell, fiber)| {
            let f = MixedIndicator::new(fiber.clone(), gamma.clone())?;
            let level = superlevel_mixed(&f, alpha)?;
            Ok(level
                .set
                .intervals()
                .iter()
                .map(|iv| cell.extrude(axis, iv.clone()))
                .collect())
        })
        .collect::<Result<_>>()?;
    BoxSet::canonicalize(s.dim(), pieces.into_iter().flatten().collect())
}

/// Runs the chain over `axes` (default `0..n`) starting from `α_1`.
///
/// A null set yields a trace with no steps.
pub fn run_chain<T: Scalar>(e: &BoxSet<T>, alpha1: &T, axes: Option<&[usize]>) -> Result<ChainTrace<T>> {
    let n = e.dim();
    let axes: Vec<usize> = match axes {
        Some(a) => a.to_vec(),
        None => (0..n).collect(),
    };
    if axes.is_empty() {
        return Err(Error::InvalidParameter {
            name: "axes",
            reason: "at least one axis is required".into(),
        });
    }
    if let Some(&bad) = axes.iter().find(|&&a| a >= n) {
        return Err(Error::AxisOutOfRange { axis: bad, dim: n });
    }
    let chain = AlphaChain::new(alpha1.clone(), axes.len())?;
    let bound_factor = chain.step_factor();
    if e.measure() == T::zero() {
        return Ok(ChainTrace {
            dim: n,
            axes,
            levels: chain.levels().to_vec(),
            sets: Vec::new(),
            measures: Vec::new(),
            bound_factor,
        });
    }
    let mut sets = vec![e.clone()];
    for (j, &axis) in axes.iter().enumerate() {
        let next = chain_step(&sets[j], chain.level(j), chain.level(j + 1), axis)?;
        sets.push(next);
    }
    let measures = sets.iter().map(|s| s.measure()).collect();
    Ok(ChainTrace {
        dim: n,
        axes,
        levels: chain.levels().to_vec(),
        sets,
        measures,
        bound_factor,
    })
}

/// `(1 + 4 t / (1 - t))^n` with `t = (1 - α)^{1/n}`.
pub fn theorem2_bound(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::LevelOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "dimension must be at least 1".into(),
        });
    }
    if n == 1 {
        return Ok(1.0 + 4.0 * (1.0 - alpha) / alpha);
    }
    let t = (1.0 - alpha).powf(1.0 / n as f64);
    Ok((1.0 + 4.0 * t / (1.0 - t)).powi(n as i32))
}

/// `α_1 = 1 - (1 - α)^{1/n}`.
pub fn first_level_for(alpha: f64, n: usize) -> f64 {
    1.0 - (1.0 - alpha).powf(1.0 / n as f64)
}
