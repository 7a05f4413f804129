//! Grid lower bounds for `|{M χ_E > α}|`.
//!
//! Every family is replaced by a finite candidate subfamily, and a grid cell
//! is counted when its center lies in some candidate of density above the
//! level. Since the supremum over a subfamily never exceeds the true one,
//! the counted set is contained in the true superlevel set up to the
//! cell-center convention.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{FamilyKind, OperatorFamily};
use crate::ball::{ball_boxset_volume, Ball};
use crate::boxset::BoxSet;
use crate::error::{Error, Result};

/// Evaluation grid with cubic cells of side `step`, aligned to the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step: f64,
}

/// Candidate averaging sets: centers on a lattice of spacing `center_step`
/// and radii (half-sides for cubes and rectangles) on the geometric ladder
/// `r_min = r_0 < ... < r_{rungs-1} = r_max`. Centered families ignore
/// `center_step` and center every candidate at the evaluation point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSpec {
    pub center_step: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub rungs: usize,
}

impl CandidateSpec {
    pub fn radii(&self) -> Vec<f64> {
        if self.rungs == 1 {
            return vec![self.r_min];
        }
        let ratio = self.r_max / self.r_min;
        (0..self.rungs)
            .map(|k| {
                if k + 1 == self.rungs {
                    self.r_max
                } else {
                    self.r_min * ratio.powf(k as f64 / (self.rungs - 1) as f64)
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} is not a positive number"),
                })
            }
        };
        positive("center_step", self.center_step)?;
        positive("r_min", self.r_min)?;
        positive("r_max", self.r_max)?;
        if self.rungs == 0 || self.r_min > self.r_max {
            return Err(Error::InvalidParameter {
                name: "rungs",
                reason: "radius ladder is empty".into(),
            });
        }
        Ok(())
    }

    /// Same lattice and ladder dilated by `lambda`.
    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            center_step: self.center_step * lambda,
            r_min: self.r_min * lambda,
            r_max: self.r_max * lambda,
            rungs: self.rungs,
        }
    }
}

/// Outcome of one sampled evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledSet {
    pub marked_cells: u64,
    pub cell_volume: f64,
    pub measure: f64,
    pub ratio: f64,
    pub candidates: u64,
}

/// Density test. At `α >= 1` the superlevel set is empty, and the sampler
/// reports the level set `{M χ_E = 1}` instead.
pub(crate) fn passes(density: f64, alpha: f64) -> bool {
    if alpha < 1.0 {
        density > alpha
    } else {
        density >= 1.0 - 1e-12
    }
}

#[derive(Clone, Debug)]
struct EvalGrid {
    step: f64,
    first: Vec<i64>,
    counts: Vec<usize>,
}

impl EvalGrid {
    fn covering(bounds: &[(f64, f64)], step: f64) -> Self {
        let first: Vec<i64> = bounds.iter().map(|(lo, _)| (lo / step).floor() as i64).collect();
        let counts = bounds
            .iter()
            .zip(&first)
            .map(|((_, hi), &f)| ((hi / step).ceil() as i64 - f).max(1) as usize)
            .collect();
        Self { step, first, counts }
    }

    fn center(&self, axis: usize, k: usize) -> f64 {
        (self.first[axis] as f64 + k as f64 + 0.5) * self.step
    }

    /// Cells along `axis` whose centers lie in `(c - w, c + w)`.
    fn span(&self, axis: usize, c: f64, w: f64) -> (usize, usize) {
        let h = self.step;
        let lo = ((c - w) / h - 0.5).floor() as i64 + 1 - self.first[axis];
        let hi = ((c + w) / h - 0.5).ceil() as i64 - self.first[axis];
        let n = self.counts[axis] as i64;
        (lo.clamp(0, n) as usize, hi.clamp(0, n) as usize)
    }

    fn total(&self) -> usize {
        self.counts.iter().product()
    }

    fn cell_volume(&self) -> f64 {
        self.step.powi(self.counts.len() as i32)
    }
}

fn set_bounds(set: &BoxSet<f64>) -> Result<Vec<(f64, f64)>> {
    let bb = set.bounding_box().ok_or(Error::EmptySet)?;
    if !(set.measure() > 0.0) {
        return Err(Error::EmptySet);
    }
    Ok(bb.axes().iter().map(|iv| (*iv.lo(), *iv.hi())).collect())
}

fn pad(bounds: &[(f64, f64)], margin: f64) -> Vec<(f64, f64)> {
    bounds.iter().map(|(lo, hi)| (lo - margin, hi + margin)).collect()
}

/// `|E ∩ box| / |box|` for the box with the given center and half-sides.
fn box_density(set: &BoxSet<f64>, center: &[f64], half: &[f64]) -> f64 {
    let mut inside = 0.0;
    for b in set.boxes() {
        let mut v = 1.0;
        for (a, iv) in b.axes().iter().enumerate() {
            let lo = iv.lo().max(center[a] - half[a]);
            let hi = iv.hi().min(center[a] + half[a]);
            if hi <= lo {
                v = 0.0;
                break;
            }
            v *= hi - lo;
        }
        inside += v;
    }
    inside / half.iter().map(|w| 2.0 * w).product::<f64>()
}

#[derive(Clone, Copy)]
enum Shape {
    Ball,
    Cube,
    Rect,
}

/// Per-row difference arrays over all axes but the last.
struct Marks {
    cols: usize,
    diff: Vec<i32>,
}

impl Marks {
    fn new(grid: &EvalGrid) -> Self {
        let n = grid.counts.len();
        let cols = grid.counts[n - 1];
        let rows: usize = grid.counts[..n - 1].iter().product();
        Self {
            cols,
            diff: vec![0; rows * (cols + 1)],
        }
    }

    fn mark(&mut self, row: usize, lo: usize, hi: usize) {
        if lo < hi {
            let base = row * (self.cols + 1);
            self.diff[base + lo] += 1;
            self.diff[base + hi] -= 1;
        }
    }

    fn add(&mut self, other: &Marks) {
        for (a, b) in self.diff.iter_mut().zip(&other.diff) {
            *a += b;
        }
    }

    fn count(&self) -> u64 {
        let mut total = 0u64;
        for row in self.diff.chunks(self.cols + 1) {
            let mut acc = 0i32;
            for d in &row[..self.cols] {
                acc += d;
                if acc > 0 {
                    total += 1;
                }
            }
        }
        total
    }
}

fn mark_footprint(marks: &mut Marks, grid: &EvalGrid, shape: Shape, center: &[f64], half: &[f64]) {
    let n = center.len();
    let last = n - 1;
    match shape {
        Shape::Ball => {
            let r = half[0];
            let (i_lo, i_hi) = grid.span(0, center[0], r);
            if n == 2 {
                for i in i_lo..i_hi {
                    let dx = grid.center(0, i) - center[0];
                    let w2 = r * r - dx * dx;
                    if w2 > 0.0 {
                        let (lo, hi) = grid.span(last, center[last], w2.sqrt());
                        marks.mark(i, lo, hi);
                    }
                }
            } else {
                let (j_lo, j_hi) = grid.span(1, center[1], r);
                for i in i_lo..i_hi {
                    let dx = grid.center(0, i) - center[0];
                    for j in j_lo..j_hi {
                        let dy = grid.center(1, j) - center[1];
                        let w2 = r * r - dx * dx - dy * dy;
                        if w2 > 0.0 {
                            let (lo, hi) = grid.span(last, center[last], w2.sqrt());
                            marks.mark(i * grid.counts[1] + j, lo, hi);
                        }
                    }
                }
            }
        }
        Shape::Cube | Shape::Rect => {
            let (lo, hi) = grid.span(last, center[last], half[last]);
            let (i_lo, i_hi) = grid.span(0, center[0], half[0]);
            if n == 2 {
                for i in i_lo..i_hi {
                    marks.mark(i, lo, hi);
                }
            } else {
                let (j_lo, j_hi) = grid.span(1, center[1], half[1]);
                for i in i_lo..i_hi {
                    for j in j_lo..j_hi {
                        marks.mark(i * grid.counts[1] + j, lo, hi);
                    }
                }
            }
        }
    }
}

fn density(set: &BoxSet<f64>, shape: Shape, center: &[f64], half: &[f64]) -> f64 {
    match shape {
        Shape::Ball => {
            let b = Ball::new(center.to_vec(), half[0]).expect("positive radius");
            ball_boxset_volume(&b, set) / b.volume()
        }
        Shape::Cube | Shape::Rect => box_density(set, center, half),
    }
}

fn shapes(shape: Shape, n: usize, radii: &[f64]) -> Vec<Vec<f64>> {
    match shape {
        Shape::Ball | Shape::Cube => radii.iter().map(|&r| vec![r; n]).collect(),
        Shape::Rect => {
            let mut out: Vec<Vec<f64>> = vec![Vec::new()];
            for _ in 0..n {
                out = out
                    .into_iter()
                    .flat_map(|p| {
                        radii.iter().map(move |&r| {
                            let mut q = p.clone();
                            q.push(r);
                            q
                        })
                    })
                    .collect();
            }
            out
        }
    }
}

fn uncentered(set: &BoxSet<f64>, shape: Shape, alpha: f64, grid: &GridSpec, cand: &CandidateSpec) -> Result<SampledSet> {
    let n = set.dim();
    let bounds = set_bounds(set)?;
    let r_max = cand.r_max;
    let eval = EvalGrid::covering(&pad(&bounds, 2.0 * r_max), grid.step);
    let cs = cand.center_step;
    let lattice: Vec<(i64, i64)> = bounds
        .iter()
        .map(|(lo, hi)| (((lo - r_max) / cs).ceil() as i64, ((hi + r_max) / cs).floor() as i64))
        .collect();
    let halves = shapes(shape, n, &cand.radii());
    let per_row: u64 = lattice[1..]
        .iter()
        .map(|(a, b)| (b - a + 1).max(0) as u64)
        .product::<u64>()
        * halves.len() as u64;
    let rows: Vec<i64> = (lattice[0].0..=lattice[0].1).collect();
    let chunk = rows.len().div_ceil(rayon::current_num_threads().max(1)).max(1);

    let partial: Vec<Marks> = rows
        .par_chunks(chunk)
        .map(|chunk_rows| {
            let mut marks = Marks::new(&eval);
            let mut center = vec![0.0; n];
            for &k0 in chunk_rows {
                center[0] = k0 as f64 * cs;
                let mut idx: Vec<i64> = lattice[1..].iter().map(|(a, _)| *a).collect();
                loop {
                    for (a, &k) in idx.iter().enumerate() {
                        center[a + 1] = k as f64 * cs;
                    }
                    for half in &halves {
                        if passes(density(set, shape, &center, half), alpha) {
                            mark_footprint(&mut marks, &eval, shape, &center, half);
                        }
                    }
                    // advance the odometer over the remaining axes
                    let mut a = 0;
                    loop {
                        if a == idx.len() {
                            break;
                        }
                        idx[a] += 1;
                        if idx[a] <= lattice[a + 1].1 {
                            break;
                        }
                        idx[a] = lattice[a + 1].0;
                        a += 1;
                    }
                    if a == idx.len() {
                        break;
                    }
                }
            }
            marks
        })
        .collect();
    let mut marks = Marks::new(&eval);
    for m in &partial {
        marks.add(m);
    }
    Ok(finish(set, &eval, marks.count(), rows.len() as u64 * per_row))
}

fn finish(set: &BoxSet<f64>, eval: &EvalGrid, marked: u64, candidates: u64) -> SampledSet {
    let cell_volume = eval.cell_volume();
    let measure = marked as f64 * cell_volume;
    SampledSet {
        marked_cells: marked,
        cell_volume,
        measure,
        ratio: measure / set.measure(),
        candidates,
    }
}

fn centered(set: &BoxSet<f64>, shape: Shape, alpha: f64, grid: &GridSpec, cand: &CandidateSpec) -> Result<SampledSet> {
    let n = set.dim();
    let bounds = set_bounds(set)?;
    let eval = EvalGrid::covering(&pad(&bounds, cand.r_max), grid.step);
    let radii = cand.radii();
    let total = eval.total();
    let marked: u64 = (0..total)
        .into_par_iter()
        .with_min_len(256)
        .map(|flat| {
            let mut rest = flat;
            let mut center = vec![0.0; n];
            for a in (0..n).rev() {
                center[a] = eval.center(a, rest % eval.counts[a]);
                rest /= eval.counts[a];
            }
            let hit = radii.iter().any(|&r| passes(density(set, shape, &center, &vec![r; n]), alpha));
            u64::from(hit)
        })
        .sum();
    Ok(finish(set, &eval, marked, (total * radii.len()) as u64))
}

/// `out[c] = max over node intervals [s, t) containing cell c of the
/// average (prefix[t] - prefix[s]) / ((t - s) h)`.
pub(crate) fn max_window_average(prefix: &[f64], h: f64, out: &mut [f64]) {
    let n = out.len();
    debug_assert_eq!(prefix.len(), n + 1);
    out.iter_mut().for_each(|v| *v = 0.0);
    for s in 0..n {
        let mut best = f64::NEG_INFINITY;
        for t in (s + 1..=n).rev() {
            let avg = (prefix[t] - prefix[s]) / ((t - s) as f64 * h);
            if avg > best {
                best = avg;
            }
            if best > out[t - 1] {
                out[t - 1] = best;
            }
        }
    }
}

fn intervals_1d(set: &BoxSet<f64>, alpha: f64, grid: &GridSpec) -> Result<SampledSet> {
    let bounds = set_bounds(set)?;
    let fiber = &set.fiber_decompose(0)?[0].1;
    let reach = if alpha < 1.0 { set.measure() * (1.0 / alpha - 1.0) } else { 0.0 };
    let eval = EvalGrid::covering(&pad(&bounds, reach + grid.step), grid.step);
    let n = eval.counts[0];
    let h = eval.step;
    let prefix: Vec<f64> = (0..=n)
        .map(|k| fiber.measure_below(&((eval.first[0] + k as i64) as f64 * h)))
        .collect();
    let mut best = vec![0.0; n];
    max_window_average(&prefix, h, &mut best);
    let marked = best.iter().filter(|&&d| passes(d, alpha)).count() as u64;
    Ok(finish(set, &eval, marked, (n * (n + 1) / 2) as u64))
}

/// Lower bound of `M_{outer} M_{inner} χ_E` on the cells of a planar grid.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedGrid {
    pub lo: [f64; 2],
    pub step: [f64; 2],
    pub counts: [usize; 2],
    /// Row-major in absolute axes: `values[i0 * counts[1] + i1]`.
    pub values: Vec<f64>,
}

impl IteratedGrid {
    pub fn center(&self, i0: usize, i1: usize) -> [f64; 2] {
        [
            self.lo[0] + (i0 as f64 + 0.5) * self.step[0],
            self.lo[1] + (i1 as f64 + 0.5) * self.step[1],
        ]
    }

    pub fn value(&self, i0: usize, i1: usize) -> f64 {
        self.values[i0 * self.counts[1] + i1]
    }
}

/// Fiber of `E` along the inner axis common to every line of the band
/// `(y0, y1)` of the outer axis.
fn band_fiber(
    pieces: &[(crate::boxset::AxisBox<f64>, crate::interval::IntervalSet<f64>)],
    y0: f64,
    y1: f64,
) -> crate::interval::IntervalSet<f64> {
    use crate::interval::IntervalSet;
    let hits: Vec<_> = pieces
        .iter()
        .filter(|(cell, _)| *cell.axis(0).lo() < y1 && *cell.axis(0).hi() > y0)
        .collect();
    let Some(first) = hits.first() else {
        return IntervalSet::empty();
    };
    if *first.0.axis(0).lo() > y0 || *hits[hits.len() - 1].0.axis(0).hi() < y1 {
        return IntervalSet::empty();
    }
    if hits.windows(2).any(|w| w[0].0.axis(0).hi() != w[1].0.axis(0).lo()) {
        return IntervalSet::empty();
    }
    hits[1..]
        .iter()
        .fold(first.1.clone(), |acc, (_, f)| acc.intersection(f))
}

/// Two-pass grid lower bound for the iterated operator in the plane, with
/// `axes[0]` applied first. Each value bounds the true function from below
/// at every point of its cell.
pub fn iterated_lower_bound(set: &BoxSet<f64>, axes: [usize; 2], window: [(f64, f64); 2], counts: [usize; 2]) -> Result<IteratedGrid> {
    if set.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: set.dim(),
        });
    }
    if axes[0] == axes[1] || axes.iter().any(|&a| a > 1) {
        return Err(Error::InvalidParameter {
            name: "axes",
            reason: format!("{axes:?} is not an ordering of the two axes"),
        });
    }
    if counts.contains(&0) || window.iter().any(|(lo, hi)| !(lo < hi)) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: "empty evaluation window".into(),
        });
    }
    let [inner, outer] = axes;
    let lo = [window[0].0, window[1].0];
    let step = [
        (window[0].1 - window[0].0) / counts[0] as f64,
        (window[1].1 - window[1].0) / counts[1] as f64,
    ];
    let pieces = set.fiber_decompose(inner)?;
    let (ni, no) = (counts[inner], counts[outer]);
    let (hi_, ho) = (step[inner], step[outer]);

    // first pass: one band of the outer axis at a time
    let first: Vec<Vec<f64>> = (0..no)
        .into_par_iter()
        .map(|j| {
            let y0 = lo[outer] + j as f64 * ho;
            let fiber = band_fiber(&pieces, y0, y0 + ho);
            let mut out = vec![0.0; ni];
            if !fiber.is_empty() {
                let prefix: Vec<f64> = (0..=ni)
                    .map(|k| fiber.measure_below(&(lo[inner] + k as f64 * hi_)))
                    .collect();
                max_window_average(&prefix, hi_, &mut out);
            }
            out
        })
        .collect();

    // second pass: step function along the outer axis
    let second: Vec<Vec<f64>> = (0..ni)
        .into_par_iter()
        .map(|i| {
            let mut prefix = vec![0.0; no + 1];
            for j in 0..no {
                prefix[j + 1] = prefix[j] + first[j][i] * ho;
            }
            let mut out = vec![0.0; no];
            if prefix[no] > 0.0 {
                max_window_average(&prefix, ho, &mut out);
            }
            out
        })
        .collect();

    let mut values = vec![0.0; counts[0] * counts[1]];
    for (i, row) in second.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let (i0, i1) = if inner == 0 { (i, j) } else { (j, i) };
            values[i0 * counts[1] + i1] = v;
        }
    }
    Ok(IteratedGrid {
        lo,
        step,
        counts,
        values,
    })
}

fn iterated(set: &BoxSet<f64>, alpha: f64, grid: &GridSpec) -> Result<SampledSet> {
    let bounds = set_bounds(set)?;
    let spread = if alpha < 1.0 { (1.0 / alpha - 1.0).min(20.0) } else { 0.0 };
    let eval = EvalGrid::covering(
        &bounds
            .iter()
            .map(|(lo, hi)| {
                let m = (hi - lo) * spread + grid.step;
                (lo - m, hi + m)
            })
            .collect::<Vec<_>>(),
        grid.step,
    );
    let window = [0, 1].map(|a| {
        let lo = eval.first[a] as f64 * eval.step;
        (lo, lo + eval.counts[a] as f64 * eval.step)
    });
    let it = iterated_lower_bound(set, [0, 1], window, [eval.counts[0], eval.counts[1]])?;
    let marked = it.values.iter().filter(|&&v| passes(v, alpha)).count() as u64;
    let n0 = eval.counts[0] as u64;
    let n1 = eval.counts[1] as u64;
    Ok(finish(set, &eval, marked, n0 * n0 / 2 + n1 * n1 / 2))
}

/// Sampled lower bound of `|{M χ_E > α}|` for the given family.
pub fn sample_superlevel(
    family: &OperatorFamily,
    set: &BoxSet<f64>,
    alpha: f64,
    grid: &GridSpec,
    candidates: &CandidateSpec,
) -> Result<SampledSet> {
    if set.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: set.dim(),
        });
    }
    if !(grid.step > 0.0 && grid.step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("step {} is not positive", grid.step),
        });
    }
    if !(alpha > 0.0) {
        return Err(Error::LevelOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    match family.kind() {
        FamilyKind::UncenteredIntervals1d => intervals_1d(set, alpha, grid),
        FamilyKind::IteratedDirectional => iterated(set, alpha, grid),
        kind => {
            candidates.validate()?;
            match kind {
                FamilyKind::UncenteredBalls => uncentered(set, Shape::Ball, alpha, grid, candidates),
                FamilyKind::UncenteredCubes => uncentered(set, Shape::Cube, alpha, grid, candidates),
                FamilyKind::AxisRectangles => uncentered(set, Shape::Rect, alpha, grid, candidates),
                FamilyKind::CenteredBalls => centered(set, Shape::Ball, alpha, grid, candidates),
                FamilyKind::CenteredCubes => centered(set, Shape::Cube, alpha, grid, candidates),
                _ => unreachable!(),
            }
        }
    }
}
