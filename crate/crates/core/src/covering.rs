//! Greedy selection of balls by overlap with the already selected ones,
//! together with the certificates that turn a selection into an upper bound
//! for the uncentered ball maximal operator.

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::{ball_boxset_volume, Ball};
use crate::boxset::BoxSet;
use crate::error::{Error, Result};
use crate::volume::{binomial_band, stream_seed, BallSampler, VolumeEstimate};

/// Monte Carlo budget for overlap queries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100_000,
        }
    }
}

/// Relative band attached to the quadrature densities in dimension 3.
const QUADRATURE_BAND: f64 = 1e-5;

/// Balls of density above `alpha` in a float box set, sorted by
/// nonincreasing volume (ties by input index).
#[derive(Clone, Debug)]
pub struct DensityBallFamily {
    dim: usize,
    set: BoxSet<f64>,
    set_measure: f64,
    alpha: f64,
    balls: Vec<Ball>,
    input_index: Vec<usize>,
    densities: Vec<VolumeEstimate>,
}

impl DensityBallFamily {
    pub fn new(set: BoxSet<f64>, balls: Vec<Ball>, alpha: f64) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::LevelOutOfRange {
                alpha: alpha.to_string(),
            });
        }
        let dim = set.dim();
        if let Some(b) = balls.iter().find(|b| b.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.dim(),
            });
        }
        let mut order: Vec<usize> = (0..balls.len()).collect();
        order.sort_by(|&i, &j| {
            balls[j]
                .radius()
                .total_cmp(&balls[i].radius())
                .then(i.cmp(&j))
        });
        let balls: Vec<Ball> = order.iter().map(|&i| balls[i].clone()).collect();
        let band = if dim == 3 { QUADRATURE_BAND } else { 0.0 };
        let densities: Vec<VolumeEstimate> = balls
            .par_iter()
            .map(|b| VolumeEstimate {
                value: ball_boxset_volume(b, &set) / b.volume(),
                band,
            })
            .collect();
        let low: Vec<usize> = densities
            .iter()
            .zip(&order)
            .filter(|(d, _)| d.upper() <= alpha)
            .map(|(_, &i)| i)
            .collect();
        if !low.is_empty() {
            return Err(Error::DensityBelowLevel { indices: low, alpha });
        }
        Ok(Self {
            dim,
            set_measure: set.measure(),
            set,
            alpha,
            balls,
            input_index: order,
            densities,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&self) -> &BoxSet<f64> {
        &self.set
    }

    pub fn set_measure(&self) -> f64 {
        self.set_measure
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Balls in selection order.
    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    /// Input position of the ball at each sorted position.
    pub fn input_index(&self) -> &[usize] {
        &self.input_index
    }

    pub fn densities(&self) -> &[VolumeEstimate] {
        &self.densities
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Family obtained by dilating the set and every ball about the origin.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        let set = self.set.map(|x| x * lambda);
        let mut balls = vec![self.balls[0].clone(); self.balls.len()];
        for (pos, &i) in self.input_index.iter().enumerate() {
            balls[i] = self.balls[pos].scale(lambda);
        }
        Self::new(set, balls, self.alpha)
    }
}

/// Outcome of the overlap test for one ball of the sorted family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    pub position: usize,
    pub input_index: usize,
    pub overlap: VolumeEstimate,
    pub threshold: f64,
    pub selected: bool,
    pub flagged: bool,
}

/// Volume of a disjointified piece and of its intersection with the set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceCertificate {
    pub position: usize,
    pub ball_volume: f64,
    pub piece: VolumeEstimate,
    pub piece_in_set: VolumeEstimate,
}

impl PieceCertificate {
    /// `|piece| > delta |ball|` within the band.
    pub fn large_enough(&self, delta: f64) -> bool {
        self.piece.upper() > delta * self.ball_volume
    }

    /// `|E ∩ piece| / |piece| >= (delta - (1 - alpha)) / delta` within the bands.
    pub fn dense_enough(&self, alpha: f64, delta: f64) -> bool {
        let c = (delta - (1.0 - alpha)) / delta;
        self.piece_in_set.upper() + c * self.piece.band >= c * self.piece.value
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionResult {
    pub delta: f64,
    pub dilation: f64,
    pub mc: McConfig,
    /// Sorted positions of the selected balls, increasing.
    pub selected: Vec<usize>,
    pub decisions: Vec<Decision>,
    pub pieces: Vec<PieceCertificate>,
    /// Positions whose overlap estimate straddled the threshold.
    pub flagged: Vec<usize>,
}

impl SelectionResult {
    pub fn is_selected(&self, position: usize) -> bool {
        self.decisions[position].selected
    }

    /// Every decision agrees with the overlap rule (flagged ones resolved
    /// toward selection).
    pub fn overlap_rule_holds(&self) -> bool {
        self.decisions.iter().all(|d| {
            if d.selected {
                d.flagged || d.overlap.value <= d.threshold
            } else {
                d.overlap.lower() > d.threshold
            }
        })
    }
}

/// `1 + 2 δ^{1/n}`.
pub fn dilation_factor(delta: f64, n: usize) -> f64 {
    1.0 + 2.0 * delta.powf(1.0 / n as f64)
}

/// Scans the sorted family and keeps a ball iff its overlap with the
/// already selected balls is at most `(1 - δ)|B|`.
pub fn cf_select(family: &DensityBallFamily, delta: f64, mc: McConfig) -> Result<SelectionResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("{delta} is not in (0, 1)"),
        });
    }
    if mc.samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "must be positive".into(),
        });
    }
    let mut selected: Vec<usize> = Vec::new();
    let mut decisions = Vec::with_capacity(family.len());
    let mut pieces = Vec::new();
    let mut flagged = Vec::new();
    for (j, ball) in family.balls.iter().enumerate() {
        let vol = ball.volume();
        let threshold = (1.0 - delta) * vol;
        let active: Vec<&Ball> = selected
            .iter()
            .map(|&k| &family.balls[k])
            .filter(|b| b.intersects(ball))
            .collect();
        let (overlap, in_set_outside) = if active.is_empty() {
            (VolumeEstimate::exact(0.0), None)
        } else {
            let mut sampler = BallSampler::new(ball, stream_seed(mc.seed, j as u64));
            let (mut hits, mut fresh_in_set) = (0usize, 0usize);
            for _ in 0..mc.samples {
                let p = sampler.next_point();
                if active.iter().any(|b| b.contains(p)) {
                    hits += 1;
                } else if family.set.contains(p) {
                    fresh_in_set += 1;
                }
            }
            let n = mc.samples;
            (
                VolumeEstimate {
                    value: vol * hits as f64 / n as f64,
                    band: binomial_band(hits, n, vol),
                },
                Some(VolumeEstimate {
                    value: vol * fresh_in_set as f64 / n as f64,
                    band: binomial_band(fresh_in_set, n, vol),
                }),
            )
        };
        let flag = overlap.band > 0.0 && (overlap.value - threshold).abs() <= overlap.band;
        let take = overlap.value <= threshold || flag;
        if flag {
            flagged.push(j);
        }
        if take {
            let piece_in_set = in_set_outside.unwrap_or_else(|| {
                let d = family.densities[j];
                VolumeEstimate {
                    value: d.value * vol,
                    band: d.band * vol,
                }
            });
            pieces.push(PieceCertificate {
                position: j,
                ball_volume: vol,
                piece: VolumeEstimate {
                    value: vol - overlap.value,
                    band: overlap.band,
                },
                piece_in_set,
            });
            selected.push(j);
        }
        decisions.push(Decision {
            position: j,
            input_index: family.input_index[j],
            overlap,
            threshold,
            selected: take,
            flagged: flag,
        });
    }
    Ok(SelectionResult {
        delta,
        dilation: dilation_factor(delta, family.dim),
        mc,
        selected,
        decisions,
        pieces,
        flagged,
    })
}

/// Rejected ball together with the selected balls whose dilates covered its
/// sample points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverWitness {
    pub position: usize,
    pub covered_by: Vec<usize>,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub position: usize,
    pub point: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub points_checked: usize,
    pub witnesses: Vec<CoverWitness>,
    pub counterexample: Option<Counterexample>,
}

impl CoverReport {
    pub fn is_covered(&self) -> bool {
        self.counterexample.is_none()
    }
}

const BOUNDARY_SAMPLES: usize = 64;

fn boundary_points(ball: &Ball) -> Vec<Vec<f64>> {
    let n = ball.dim();
    let r = ball.radius() * (1.0 - 1e-12);
    let c = ball.center();
    let dirs: Vec<Vec<f64>> = match n {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..BOUNDARY_SAMPLES)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / BOUNDARY_SAMPLES as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci lattice on the sphere
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..BOUNDARY_SAMPLES)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / BOUNDARY_SAMPLES as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![rho * t.cos(), rho * t.sin(), z]
                })
                .collect()
        }
    };
    dirs.into_iter()
        .map(|d| d.iter().zip(c).map(|(u, x)| x + r * u).collect())
        .collect()
}

/// Checks that every sampled point of a rejected ball lies in the
/// `(1 + 2δ^{1/n})`-dilate of some selected ball at least as large.
///
/// Points are a grid of about `grid_points` cell centers over the bounding
/// box of the family plus a fixed set of boundary points of each rejected
/// ball.
pub fn dilation_cover_check(family: &DensityBallFamily, result: &SelectionResult, grid_points: usize) -> CoverReport {
    let n = family.dim;
    let rejected: Vec<usize> = (0..family.len()).filter(|&j| !result.is_selected(j)).collect();
    if rejected.is_empty() {
        return CoverReport {
            points_checked: 0,
            witnesses: Vec::new(),
            counterexample: None,
        };
    }
    let dilates: Vec<(usize, Ball)> = result
        .selected
        .iter()
        .map(|&k| (k, family.balls[k].dilate(result.dilation)))
        .collect();

    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for b in &family.balls {
        for (a, (l, h)) in b.bounds().into_iter().enumerate() {
            lo[a] = lo[a].min(l);
            hi[a] = hi[a].max(h);
        }
    }
    let side = (grid_points.max(1) as f64).powf(1.0 / n as f64).ceil() as usize;
    let total = side.pow(n as u32);

    let check = |j: usize, p: &[f64]| -> Option<usize> {
        dilates
            .iter()
            .take_while(|(k, _)| *k < j)
            .find(|(_, d)| d.contains_closed(p, 1e-12))
            .map(|(k, _)| *k)
    };

    let results: Vec<(Vec<usize>, usize, Option<Counterexample>)> = rejected
        .par_iter()
        .map(|&j| {
            let ball = &family.balls[j];
            let mut used: Vec<usize> = Vec::new();
            let mut count = 0usize;
            let mut idx = vec![0usize; n];
            let mut p = vec![0.0; n];
            for _ in 0..total {
                for a in 0..n {
                    p[a] = lo[a] + (idx[a] as f64 + 0.5) * (hi[a] - lo[a]) / side as f64;
                }
                for d in idx.iter_mut() {
                    *d += 1;
                    if *d < side {
                        break;
                    }
                    *d = 0;
                }
                if !ball.contains(&p) {
                    continue;
                }
                count += 1;
                match check(j, &p) {
                    Some(k) => used.push(k),
                    None => {
                        return (
                            vec![],
                            count,
                            Some(Counterexample {
                                position: j,
                                point: p.clone(),
                            }),
                        )
                    }
                }
            }
            for q in boundary_points(ball) {
                count += 1;
                match check(j, &q) {
                    Some(k) => used.push(k),
                    None => {
                        return (
                            vec![],
                            count,
                            Some(Counterexample {
                                position: j,
                                point: q,
                            }),
                        )
                    }
                }
            }
            used.sort_unstable();
            used.dedup();
            (used, count, None)
        })
        .collect();

    let mut witnesses = Vec::new();
    let mut points_checked = 0;
    for (&j, (used, count, cex)) in rejected.iter().zip(results) {
        points_checked += count;
        if let Some(c) = cex {
            return CoverReport {
                points_checked,
                witnesses,
                counterexample: Some(c),
            };
        }
        witnesses.push(CoverWitness {
            position: j,
            covered_by: used,
            points: count,
        });
    }
    CoverReport {
        points_checked,
        witnesses,
        counterexample: None,
    }
}

/// `(1 + 2δ^{1/n})^n δ / (δ - (1 - α))`, defined for `1 - α < δ < 1`.
pub fn theorem3_bound(alpha: f64, delta: f64, n: usize) -> Result<f64> {
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
    let lo = 1.0 - alpha;
    if !(delta > lo && delta < 1.0) {
        return Err(Error::DeltaOutOfWindow { delta, lo });
    }
    Ok(dilation_factor(delta, n).powi(n as i32) * delta / (delta - lo))
}

/// `δ = (1 - α)^{n/(n+1)}`.
pub fn optimal_delta(alpha: f64, n: usize) -> f64 {
    (1.0 - alpha).powf(n as f64 / (n as f64 + 1.0))
}

/// Bound chain built from an actual selection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauberianCertificate {
    pub dilation_power: f64,
    /// `Σ |Ẽ_j|`.
    pub pieces_total: VolumeEstimate,
    /// `Σ |E ∩ Ẽ_j|`.
    pub pieces_in_set: VolumeEstimate,
    /// `(1 + 2δ^{1/n})^n Σ |Ẽ_j|`.
    pub upper: VolumeEstimate,
    /// `(1 + 2δ^{1/n})^n δ/(δ - (1-α)) Σ |E ∩ Ẽ_j|`.
    pub density_chain: VolumeEstimate,
    /// `theorem3_bound(α, δ, n) |E|`.
    pub theorem_total: f64,
    pub set_measure: f64,
    pub holds: bool,
}

/// Certified upper bound from a selection, and its comparison with the
/// closed-form bound within the Monte Carlo bands.
pub fn tauberian_upper_from_selection(family: &DensityBallFamily, result: &SelectionResult) -> Result<TauberianCertificate> {
    let n = family.dim;
    let (alpha, delta) = (family.alpha, result.delta);
    let theorem = theorem3_bound(alpha, delta, n)?;
    let power = result.dilation.powi(n as i32);
    let sum = |f: fn(&PieceCertificate) -> VolumeEstimate| {
        result.pieces.iter().fold(VolumeEstimate::exact(0.0), |acc, p| {
            let v = f(p);
            VolumeEstimate {
                value: acc.value + v.value,
                band: acc.band + v.band,
            }
        })
    };
    let pieces_total = sum(|p| p.piece);
    let pieces_in_set = sum(|p| p.piece_in_set);
    let upper = VolumeEstimate {
        value: power * pieces_total.value,
        band: power * pieces_total.band,
    };
    let ratio = delta / (delta - (1.0 - alpha));
    let density_chain = VolumeEstimate {
        value: power * ratio * pieces_in_set.value,
        band: power * ratio * pieces_in_set.band,
    };
    let theorem_total = theorem * family.set_measure;
    let holds = upper.lower() <= density_chain.upper()
        && pieces_in_set.lower() <= family.set_measure
        && upper.lower() <= theorem_total;
    Ok(TauberianCertificate {
        dilation_power: power,
        pieces_total,
        pieces_in_set,
        upper,
        density_chain,
        theorem_total,
        set_measure: family.set_measure,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxset::AxisBox;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square(lo: f64, hi: f64) -> BoxSet<f64> {
        BoxSet::from_box(AxisBox::from_bounds(vec![(lo, hi), (lo, hi)]).unwrap())
    }

    fn disk(x: f64, y: f64, r: f64) -> Ball {
        Ball::new(vec![x, y], r).unwrap()
    }

    fn random_family(seed: u64, count: usize) -> DensityBallFamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let balls = (0..count)
            .map(|_| {
                let r = rng.gen_range(0.2..0.5);
                disk(rng.gen_range(0.5..3.5), rng.gen_range(0.5..3.5), r)
            })
            .collect();
        DensityBallFamily::new(square(0.0, 4.0), balls, 0.5).unwrap()
    }

    #[test]
    fn disjoint_balls_all_selected() {
        let balls = vec![disk(0.5, 0.5, 0.3), disk(2.0, 2.0, 0.4), disk(3.5, 0.5, 0.2)];
        let fam = DensityBallFamily::new(square(0.0, 4.0), balls, 0.9).unwrap();
        let res = cf_select(&fam, 0.3, McConfig::default()).unwrap();
        assert_eq!(res.selected, vec![0, 1, 2]);
        assert!(res.flagged.is_empty());
        let cover = dilation_cover_check(&fam, &res, 10_000);
        assert!(cover.is_covered() && cover.witnesses.is_empty());
    }

    #[test]
    fn identical_balls_select_one() {
        let balls = vec![disk(1.0, 1.0, 0.5); 5];
        let fam = DensityBallFamily::new(square(0.0, 2.0), balls, 0.5).unwrap();
        let res = cf_select(&fam, 0.3, McConfig::default()).unwrap();
        assert_eq!(res.selected, vec![0]);
        let cover = dilation_cover_check(&fam, &res, 2_000);
        assert!(cover.is_covered());
        assert!(cover.witnesses.iter().all(|w| w.covered_by == vec![0]));
    }

    #[test]
    fn low_density_rejected_at_construction() {
        let balls = vec![disk(1.0, 1.0, 0.5), disk(5.0, 5.0, 0.5)];
        let err = DensityBallFamily::new(square(0.0, 2.0), balls, 0.5).unwrap_err();
        assert_eq!(
            err,
            Error::DensityBelowLevel {
                indices: vec![1],
                alpha: 0.5
            }
        );
    }

    #[test]
    fn sorted_by_volume_with_index_ties() {
        let balls = vec![disk(1.0, 1.0, 0.2), disk(2.0, 2.0, 0.4), disk(3.0, 3.0, 0.2)];
        let fam = DensityBallFamily::new(square(0.0, 4.0), balls, 0.5).unwrap();
        assert_eq!(fam.input_index(), &[1, 0, 2]);
    }

    // Plain re-implementation of the greedy rule: for each ball, draw the
    // same stream and test against every selected ball.
    fn naive_selection(fam: &DensityBallFamily, delta: f64, mc: McConfig) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for (j, b) in fam.balls().iter().enumerate() {
            if chosen.iter().all(|&k| !fam.balls()[k].intersects(b)) {
                chosen.push(j);
                continue;
            }
            let mut s = BallSampler::new(b, stream_seed(mc.seed, j as u64));
            let mut hits = 0usize;
            for _ in 0..mc.samples {
                let p = s.next_point().to_vec();
                if chosen.iter().any(|&k| fam.balls()[k].contains(&p)) {
                    hits += 1;
                }
            }
            let v = b.volume();
            let est = v * hits as f64 / mc.samples as f64;
            let band = binomial_band(hits, mc.samples, v);
            if est <= (1.0 - delta) * v || (est - (1.0 - delta) * v).abs() <= band {
                chosen.push(j);
            }
        }
        chosen
    }

    #[test]
    fn selection_matches_independent_rerun() {
        let fam = random_family(3, 20);
        let mc = McConfig {
            seed: 17,
            samples: 20_000,
        };
        let res = cf_select(&fam, 0.3, mc).unwrap();
        assert_eq!(res.selected, naive_selection(&fam, 0.3, mc));
        assert_eq!(res.selected[0], 0);
        assert!(res.overlap_rule_holds());
    }

    #[test]
    fn random_family_is_covered() {
        let fam = random_family(5, 30);
        let res = cf_select(&fam, 0.2, McConfig::default()).unwrap();
        let cover = dilation_cover_check(&fam, &res, 10_000);
        assert!(cover.is_covered(), "{:?}", cover.counterexample);
        for p in &res.pieces {
            assert!(p.large_enough(0.2));
        }
    }

    #[test]
    fn finer_estimator_differs_only_at_flags() {
        let fam = random_family(8, 25);
        let a = cf_select(&fam, 0.3, McConfig { seed: 1, samples: 10_000 }).unwrap();
        let b = cf_select(&fam, 0.3, McConfig { seed: 1, samples: 40_000 }).unwrap();
        let first = (0..fam.len()).find(|&j| a.decisions[j].selected != b.decisions[j].selected);
        if let Some(j) = first {
            assert!(a.decisions[j].flagged || b.decisions[j].flagged);
        }
    }

    #[test]
    fn scaling_preserves_decisions() {
        let fam = random_family(11, 20);
        let big = fam.scale(2.0).unwrap();
        let mc = McConfig {
            seed: 4,
            samples: 5_000,
        };
        let a = cf_select(&fam, 0.3, mc).unwrap();
        let b = cf_select(&big, 0.3, mc).unwrap();
        assert_eq!(a.selected, b.selected);
        for (x, y) in a.decisions.iter().zip(&b.decisions) {
            assert_eq!(x.overlap.value * 4.0, y.overlap.value);
        }
        for (x, y) in fam.densities().iter().zip(big.densities()) {
            assert!((x.value - y.value).abs() < 1e-12);
        }
    }

    #[test]
    fn theorem3_examples() {
        let v = theorem3_bound(0.99, 0.1, 1).unwrap();
        assert!((v - 1.2 * 0.1 / 0.09).abs() < 1e-12);
        assert!(matches!(theorem3_bound(0.9, 0.05, 2), Err(Error::DeltaOutOfWindow { .. })));
        assert!(theorem3_bound(0.9, 1.0, 2).is_err());
        let near = theorem3_bound(0.9, 0.1 + 1e-9, 2).unwrap();
        assert!(near > 1e7);
    }

    #[test]
    fn single_ball_inside_set() {
        let fam = DensityBallFamily::new(square(0.0, 4.0), vec![disk(2.0, 2.0, 1.0)], 0.8).unwrap();
        let res = cf_select(&fam, 0.5, McConfig::default()).unwrap();
        let cert = tauberian_upper_from_selection(&fam, &res).unwrap();
        assert!(cert.upper.value >= std::f64::consts::PI);
        assert!(cert.holds);
    }

    #[test]
    fn disjoint_dense_balls_sum() {
        let balls = vec![disk(0.5, 0.5, 0.4), disk(2.0, 2.0, 0.4), disk(3.5, 3.5, 0.4)];
        let fam = DensityBallFamily::new(square(0.0, 4.0), balls, 0.9).unwrap();
        let delta = optimal_delta(0.9, 2);
        let res = cf_select(&fam, delta, McConfig::default()).unwrap();
        let cert = tauberian_upper_from_selection(&fam, &res).unwrap();
        let direct: f64 = fam.balls().iter().map(|b| b.volume()).sum();
        assert!((cert.pieces_total.value - direct).abs() < 1e-12);
        assert!(direct <= fam.set_measure() * delta / (delta - 0.1));
        assert!(cert.holds);
    }
}
