//! Volume of a ball intersected with a region that has no closed form
//! (box sets in 3D, unions of balls), with an explicit error band.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ball::Ball;
use crate::boxset::BoxSet;
use crate::error::{Error, Result};

/// Region a ball is intersected with.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Boxes(&'a BoxSet<f64>),
    Balls(&'a [Ball]),
}

impl Region<'_> {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Region::Boxes(set) => set.contains(p),
            Region::Balls(balls) => balls.iter().any(|b| b.contains(p)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    MonteCarlo { seed: u64, samples: usize },
    Raster { step: f64 },
}

/// Point estimate with a symmetric uncertainty half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub band: f64,
}

impl VolumeEstimate {
    pub fn exact(value: f64) -> Self {
        Self { value, band: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.band
    }

    pub fn upper(&self) -> f64 {
        self.value + self.band
    }
}

/// Three-sigma binomial half-width for `hits` out of `n` draws, scaled to
/// `total`. The proportion is clamped away from 0 and 1 so a run with no
/// hits still reports a nonzero band.
pub fn binomial_band(hits: usize, n: usize, total: f64) -> f64 {
    let nf = n as f64;
    let p = (hits as f64 / nf).clamp(1.0 / nf, 1.0 - 1.0 / nf);
    3.0 * (p * (1.0 - p) / nf).sqrt() * total
}

/// Seed for the `index`-th independent stream derived from a run seed
/// (splitmix64 finalizer).
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform sampler of points in a ball, driven by a seeded stream.
pub struct BallSampler<'a> {
    ball: &'a Ball,
    rng: ChaCha8Rng,
    buf: Vec<f64>,
}

impl<'a> BallSampler<'a> {
    pub fn new(ball: &'a Ball, seed: u64) -> Self {
        Self {
            ball,
            rng: ChaCha8Rng::seed_from_u64(seed),
            buf: vec![0.0; ball.dim()],
        }
    }

    /// Next sample; rejection from the enclosing cube in unit coordinates.
    pub fn next_point(&mut self) -> &[f64] {
        let n = self.ball.dim();
        loop {
            let mut norm2 = 0.0;
            for i in 0..n {
                let u: f64 = self.rng.gen_range(-1.0..1.0);
                self.buf[i] = u;
                norm2 += u * u;
            }
            if norm2 < 1.0 {
                let r = self.ball.radius();
                for (i, x) in self.buf.iter_mut().enumerate() {
                    *x = self.ball.center()[i] + r * *x;
                }
                return &self.buf;
            }
        }
    }
}

/// `|ball ∩ region|` by Monte Carlo (3σ band) or by a cell raster (band of
/// one layer of boundary cells). Deterministic given the estimator.
pub fn region_ball_volume(ball: &Ball, region: Region<'_>, estimator: Estimator) -> Result<VolumeEstimate> {
    match estimator {
        Estimator::MonteCarlo { seed, samples } => {
            if samples == 0 {
                return Err(Error::InvalidParameter {
                    name: "samples",
                    reason: "must be positive".into(),
                });
            }
            let mut sampler = BallSampler::new(ball, seed);
            let mut hits = 0usize;
            for _ in 0..samples {
                if region.contains(sampler.next_point()) {
                    hits += 1;
                }
            }
            let total = ball.volume();
            Ok(VolumeEstimate {
                value: total * hits as f64 / samples as f64,
                band: binomial_band(hits, samples, total),
            })
        }
        Estimator::Raster { step } => {
            if !(step > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "step",
                    reason: "must be positive".into(),
                });
            }
            Ok(raster_volume(ball, region, step))
        }
    }
}

fn raster_volume(ball: &Ball, region: Region<'_>, step: f64) -> VolumeEstimate {
    let n = ball.dim();
    let bounds = ball.bounds();
    let counts: Vec<usize> = bounds
        .iter()
        .map(|(lo, hi)| ((hi - lo) / step).ceil().max(1.0) as usize)
        .collect();
    let cell = step.powi(n as i32);
    let inside = |p: &[f64]| ball.contains(p) && region.contains(p);
    let mut idx = vec![0usize; n];
    let mut center = vec![0.0; n];
    let mut corner = vec![0.0; n];
    let (mut full, mut boundary) = (0usize, 0usize);
    'cells: loop {
        for a in 0..n {
            center[a] = bounds[a].0 + (idx[a] as f64 + 0.5) * step;
        }
        let c_in = inside(&center);
        let mut mixed = false;
        for mask in 0..(1usize << n) {
            for a in 0..n {
                let off = if mask >> a & 1 == 1 { 1.0 } else { 0.0 };
                corner[a] = bounds[a].0 + (idx[a] as f64 + off) * step;
            }
            if inside(&corner) != c_in {
                mixed = true;
                break;
            }
        }
        if c_in {
            full += 1;
        }
        if mixed {
            boundary += 1;
        }
        for a in 0..n {
            idx[a] += 1;
            if idx[a] < counts[a] {
                continue 'cells;
            }
            idx[a] = 0;
        }
        break;
    }
    VolumeEstimate {
        value: full as f64 * cell,
        band: boundary.max(1) as f64 * cell,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxset::AxisBox;
    use std::f64::consts::PI;

    fn unit_square() -> BoxSet<f64> {
        BoxSet::from_box(AxisBox::from_bounds(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap())
    }

    #[test]
    fn disjoint_region_is_zero() {
        let b = Ball::new(vec![5.0, 5.0], 1.0).unwrap();
        let sq = unit_square();
        let est = region_ball_volume(
            &b,
            Region::Boxes(&sq),
            Estimator::MonteCarlo { seed: 1, samples: 10_000 },
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.band > 0.0);
    }

    #[test]
    fn covering_region_is_full_ball() {
        let b = Ball::new(vec![0.5, 0.5], 0.3).unwrap();
        let sq = unit_square();
        let est = region_ball_volume(&b, Region::Boxes(&sq), Estimator::Raster { step: 0.01 }).unwrap();
        assert!((est.value - b.volume()).abs() <= est.band);
    }

    #[test]
    fn quarter_disk_within_three_sigma() {
        let b = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let sq = unit_square();
        let est = region_ball_volume(
            &b,
            Region::Boxes(&sq),
            Estimator::MonteCarlo { seed: 42, samples: 1_000_000 },
        )
        .unwrap();
        assert!((est.value - PI / 4.0).abs() <= est.band, "{est:?}");
        let ras = region_ball_volume(&b, Region::Boxes(&sq), Estimator::Raster { step: 1e-3 }).unwrap();
        assert!((ras.value - PI / 4.0).abs() <= ras.band, "{ras:?}");
    }

    #[test]
    fn deterministic_given_seed() {
        let b = Ball::new(vec![0.2, 0.1], 0.7).unwrap();
        let others = vec![Ball::new(vec![0.6, 0.0], 0.5).unwrap()];
        let e = Estimator::MonteCarlo { seed: 9, samples: 5000 };
        let a = region_ball_volume(&b, Region::Balls(&others), e).unwrap();
        let c = region_ball_volume(&b, Region::Balls(&others), e).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn rejects_bad_parameters() {
        let b = Ball::new(vec![0.0], 1.0).unwrap();
        let sq = BoxSet::from_box(AxisBox::from_bounds(vec![(0.0, 1.0)]).unwrap());
        assert!(region_ball_volume(&b, Region::Boxes(&sq), Estimator::Raster { step: 0.0 }).is_err());
        assert!(region_ball_volume(
            &b,
            Region::Boxes(&sq),
            Estimator::MonteCarlo { seed: 0, samples: 0 }
        )
        .is_err());
    }
}
