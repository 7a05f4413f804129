//! Level sweeps, paired upper bounds, and the level-one probe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{FamilyKind, OperatorFamily};
use super::sampler::{passes, sample_superlevel, CandidateSpec, GridSpec};
use super::slab::{slab_halo_height, SlabShape};
use crate::ball::{ball_slab_volume, Ball};
use crate::boxset::BoxSet;
use crate::chain::theorem2_bound;
use crate::covering::{optimal_delta, theorem3_bound};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::maximal_1d::superlevel_indicator;
use crate::scalar::{exact_from_f64, format_exact, ExactScalar, Scalar};

/// Share of each long face of the slab counted in the sweep; the rest is
/// left to the lateral faces and corners.
pub const SLAB_FACE_SHARE: f64 = 0.8;

/// One level of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub lower_ratio: f64,
    pub upper_bound: Option<f64>,
    pub family: String,
    pub set: String,
    pub grid: f64,
    pub candidates: u64,
    pub seed: u64,
    /// Exact ratio as `"num/den"` when the exact engine produced the record.
    pub exact_ratio: Option<String>,
}

/// What a sweep measures.
#[derive(Clone, Debug)]
pub enum SweepTarget {
    /// Exact one-dimensional engine on a rational set.
    Exact1d(IntervalSet<ExactScalar>),
    /// Grid lower bound for a family on a float box set.
    Sampled {
        family: OperatorFamily,
        set: BoxSet<f64>,
        label: String,
        grid: GridSpec,
        candidates: CandidateSpec,
    },
    /// Optimized protrusion on the slab; ratio `1 + 0.8 h`.
    Slab { shape: SlabShape, n: usize },
    /// Grid lower bound of the protrusion of uncentered balls centered on
    /// one normal line of the slab; ratio `1 + 0.8 h`.
    SlabColumn {
        n: usize,
        grid: GridSpec,
        candidates: CandidateSpec,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Theorem-2 bound for iterated and rectangle families, Theorem-3
    /// bound for ball families, none otherwise.
    Auto,
    None,
    Theorem2,
    Theorem3,
}

/// Validates a level list: strictly increasing inside `(0, 1)`.
pub fn check_levels(alphas: &[f64]) -> Result<()> {
    if let Some(&a) = alphas.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::LevelOutOfRange { alpha: a.to_string() });
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter {
            name: "alphas",
            reason: "levels must be strictly increasing".into(),
        });
    }
    Ok(())
}

fn auto_bound(kind: Option<FamilyKind>, n: usize, alpha: f64) -> Result<Option<f64>> {
    use FamilyKind::*;
    Ok(match kind {
        Some(UncenteredIntervals1d) => Some(theorem2_bound(alpha, 1)?),
        Some(IteratedDirectional) | Some(AxisRectangles) => Some(theorem2_bound(alpha, n)?),
        Some(UncenteredBalls) | Some(CenteredBalls) => Some(theorem3_bound(alpha, optimal_delta(alpha, n), n)?),
        _ => None,
    })
}

fn bound_for(source: BoundSource, kind: Option<FamilyKind>, n: usize, alpha: f64) -> Result<Option<f64>> {
    match source {
        BoundSource::Auto => auto_bound(kind, n, alpha),
        BoundSource::None => Ok(None),
        BoundSource::Theorem2 => Ok(Some(theorem2_bound(alpha, n)?)),
        BoundSource::Theorem3 => Ok(Some(theorem3_bound(alpha, optimal_delta(alpha, n), n)?)),
    }
}

/// Sampled lower bound as a sweep record (no paired bound, seed 0).
pub fn sampled_superlevel_ratio(
    family: &OperatorFamily,
    set: &BoxSet<f64>,
    alpha: f64,
    grid: &GridSpec,
    candidates: &CandidateSpec,
) -> Result<SweepRecord> {
    let s = sample_superlevel(family, set, alpha, grid, candidates)?;
    Ok(SweepRecord {
        alpha,
        lower_ratio: s.ratio,
        upper_bound: None,
        family: family.to_string(),
        set: describe_set(set),
        grid: grid.step,
        candidates: s.candidates,
        seed: 0,
        exact_ratio: None,
    })
}

/// Short description of a box set: dimension, box count and measure.
pub fn describe_set(set: &BoxSet<f64>) -> String {
    format!("boxes{}d:{}:{}", set.dim(), set.boxes().len(), set.measure())
}

/// Grid lower bound of the protrusion of balls centered on a normal line of
/// the slab `{|x_n| < 1}` (balls are far smaller than the lateral extent).
pub fn slab_column_height(n: usize, alpha: f64, grid: &GridSpec, candidates: &CandidateSpec) -> Result<(f64, u64)> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let radii = candidates.radii();
    let h = grid.step;
    let cs = candidates.center_step;
    let top = (1.0 + candidates.r_max) / cs;
    let centers: Vec<f64> = (0..=top.floor() as i64).map(|k| k as f64 * cs).collect();
    let cells = centers
        .par_iter()
        .map(|&c| {
            let mut best = 0i64;
            let mut center = vec![0.0; n];
            center[n - 1] = c;
            for &r in &radii {
                if c + r <= 1.0 || c - r >= 1.0 {
                    continue;
                }
                let b = Ball::new(center.clone(), r).expect("positive radius");
                let d = ball_slab_volume(&b, -1.0, 1.0, n - 1).expect("valid slab") / b.volume();
                if passes(d, alpha) {
                    // column cells (1 + (k + 1/2) h) strictly below the top
                    let k = ((c + r - 1.0) / h - 0.5).ceil() as i64;
                    best = best.max(k);
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok((cells as f64 * h, (centers.len() * radii.len()) as u64))
}

fn record(target: &SweepTarget, source: BoundSource, alpha: f64, seed: u64) -> Result<SweepRecord> {
    match target {
        SweepTarget::Exact1d(e) => {
            let a = exact_from_f64(alpha)?;
            let res = superlevel_indicator(e, &a)?;
            Ok(SweepRecord {
                alpha,
                lower_ratio: res.ratio.to_f64(),
                upper_bound: bound_for(source, Some(FamilyKind::UncenteredIntervals1d), 1, alpha)?,
                family: "intervals1d-exact".into(),
                set: format!("intervals:{}:{}", e.len(), format_exact(&e.measure())),
                grid: 0.0,
                candidates: 0,
                seed,
                exact_ratio: Some(format_exact(&res.ratio)),
            })
        }
        SweepTarget::Sampled {
            family,
            set,
            label,
            grid,
            candidates,
        } => {
            let mut r = sampled_superlevel_ratio(family, set, alpha, grid, candidates)?;
            r.upper_bound = bound_for(source, Some(family.kind()), family.dim(), alpha)?;
            r.set = label.clone();
            r.seed = seed;
            Ok(r)
        }
        SweepTarget::Slab { shape, n } => {
            let h = slab_halo_height(*shape, *n, alpha)?;
            let kind = (*shape == SlabShape::Ball).then_some(FamilyKind::UncenteredBalls);
            Ok(SweepRecord {
                alpha,
                lower_ratio: 1.0 + SLAB_FACE_SHARE * h.height,
                upper_bound: bound_for(source, kind, *n, alpha)?,
                family: format!("slab-{shape}{n}d"),
                set: "slab".into(),
                grid: 0.0,
                candidates: h.evaluations as u64,
                seed,
                exact_ratio: None,
            })
        }
        SweepTarget::SlabColumn { n, grid, candidates } => {
            let (h, count) = slab_column_height(*n, alpha, grid, candidates)?;
            Ok(SweepRecord {
                alpha,
                lower_ratio: 1.0 + SLAB_FACE_SHARE * h,
                upper_bound: bound_for(source, Some(FamilyKind::UncenteredBalls), *n, alpha)?,
                family: format!("balls{n}d"),
                set: "slab".into(),
                grid: grid.step,
                candidates: count,
                seed,
                exact_ratio: None,
            })
        }
    }
}

/// Evaluates a target at every level, in parallel, in input order.
pub fn alpha_sweep(target: &SweepTarget, alphas: &[f64], bound: BoundSource, seed: u64) -> Result<Vec<SweepRecord>> {
    check_levels(alphas)?;
    alphas.par_iter().map(|&a| record(target, bound, a, seed)).collect()
}

/// Ratios nonincreasing along the sweep up to `tol`.
pub fn is_nonincreasing(records: &[SweepRecord], tol: f64) -> bool {
    records.windows(2).all(|w| w[1].lower_ratio <= w[0].lower_ratio + tol)
}

/// Sampled excess `|{M χ_E > α}| / |E| - 1` along a ladder `α → 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelOneProbe {
    pub points: Vec<(f64, f64)>,
    pub excess: Vec<f64>,
    pub tolerance: f64,
    pub nonincreasing: bool,
    pub below_tolerance: bool,
}

pub fn theorem4_probe(
    set: &BoxSet<f64>,
    family: &OperatorFamily,
    alphas: &[f64],
    grid: &GridSpec,
    candidates: &CandidateSpec,
    tolerance: f64,
) -> Result<LevelOneProbe> {
    if family.kind() == FamilyKind::IteratedDirectional {
        return Err(Error::IncompatibleFamily {
            family: family.to_string(),
            reason: "the probe needs a family of convex sets".into(),
        });
    }
    check_levels(alphas)?;
    let ratios: Vec<f64> = alphas
        .par_iter()
        .map(|&a| sample_superlevel(family, set, a, grid, candidates).map(|s| s.ratio))
        .collect::<Result<_>>()?;
    let excess: Vec<f64> = ratios.iter().map(|r| r - 1.0).collect();
    let nonincreasing = excess.windows(2).all(|w| w[1] <= w[0]);
    let below_tolerance = excess.last().is_some_and(|&e| e < tolerance);
    Ok(LevelOneProbe {
        points: alphas.iter().copied().zip(ratios).collect(),
        excess,
        tolerance,
        nonincreasing,
        below_tolerance,
    })
}

/// Exact excess `|{M χ_E > α}| - |E|` for `α = 1 - 2^{-k}`.
pub fn theorem4_probe_exact_1d(e: &IntervalSet<ExactScalar>, ks: std::ops::RangeInclusive<u32>) -> Result<Vec<(ExactScalar, ExactScalar)>> {
    let base = e.measure();
    ks.map(|k| {
        let alpha = ExactScalar::from_ratio(1, 1) - ExactScalar::from_ratio(1, 1i64 << k);
        let res = superlevel_indicator(e, &alpha)?;
        Ok((alpha, res.set.measure() - base.clone()))
    })
    .collect()
}
