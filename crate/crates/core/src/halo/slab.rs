//! Protrusion of dense balls and tilted cubes beyond the face of the slab
//! `{|x_n| < 1}`.
//!
//! A body of volume `|K|` has density above `α` in the slab as long as at
//! most `(1 - α)|K|` of it lies outside. The halo height is the largest
//! distance such a body can reach past the face.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ball::{ball_slab_volume, Ball};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlabShape {
    Ball,
    /// Cube with a body diagonal along the slab normal (angle π/4 in the plane).
    Cube,
}

impl fmt::Display for SlabShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlabShape::Ball => "ball",
            SlabShape::Cube => "cube",
        })
    }
}

impl FromStr for SlabShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(SlabShape::Ball),
            "cube" | "cube-pi4" => Ok(SlabShape::Cube),
            _ => Err(Error::InvalidParameter {
                name: "shape",
                reason: format!("unknown shape {s:?}"),
            }),
        }
    }
}

/// Optimal configuration found for one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlabHeight {
    pub shape: SlabShape,
    pub n: usize,
    pub alpha: f64,
    pub height: f64,
    /// Radius of the ball or side of the cube.
    pub size: f64,
    /// Height of the ball center, or protrusion of the cube apex.
    pub offset: f64,
    pub evaluations: usize,
    /// Largest improvement over `height` among off-axis perturbations of
    /// the optimal ball (balls only).
    pub off_axis_gain: Option<f64>,
}

const PARAM_TOL: f64 = 1e-8;
const MAX_GOLDEN: usize = 200;
const LOG_GRID: usize = 97;
const LOG_SPAN: f64 = 3.0 * std::f64::consts::LN_2;

fn ball_outside(n: usize, r: f64, c: f64) -> f64 {
    let mut center = vec![0.0; n];
    center[n - 1] = c;
    let b = Ball::new(center, r).expect("positive radius");
    let vol = b.volume();
    let inside = ball_slab_volume(&b, -1.0, 1.0, n - 1).expect("valid slab");
    (vol - inside) / vol
}

/// Largest `x` in `[lo, hi]` with `outside(x) <= eps`, assuming
/// `outside` is nondecreasing and `outside(hi) > eps`.
fn bisect_feasible(lo: f64, hi: f64, eps: f64, outside: impl Fn(f64) -> f64) -> Option<f64> {
    if outside(lo) > eps {
        return None;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if outside(m) <= eps {
            a = m;
        } else {
            b = m;
        }
    }
    Some(a)
}

/// Ball of radius `r`: best center height and protrusion.
fn ball_profile(n: usize, eps: f64, r: f64) -> Option<(f64, f64)> {
    let c = bisect_feasible(0.0, r + 1.0, eps, |c| ball_outside(n, r, c))?;
    Some((c, c + r - 1.0))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Volume of `{x in [0,s]^n : x_1 + ... + x_n < l}`.
fn corner_volume(n: usize, s: f64, l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    let mut v = 0.0;
    for k in 0..=n {
        let t = l - k as f64 * s;
        if t <= 0.0 {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        v += sign * binomial(n, k) * t.powi(n as i32);
    }
    (v / factorial(n)).clamp(0.0, s.powi(n as i32))
}

/// Cube of side `s` with its diagonal along the normal and the top vertex
/// at height `1 + a`: outside fraction.
fn cube_outside(n: usize, s: f64, a: f64) -> f64 {
    let root = (n as f64).sqrt();
    let b = s * root - 2.0 - a;
    (corner_volume(n, s, a * root) + corner_volume(n, s, b * root)) / s.powi(n as i32)
}

fn cube_profile(n: usize, eps: f64, s: f64) -> Option<(f64, f64)> {
    let diag = s * (n as f64).sqrt();
    let lo = ((diag - 2.0) / 2.0).max(0.0);
    let a = bisect_feasible(lo, diag, eps, |a| cube_outside(n, s, a))?;
    Some((a, a))
}

fn profile(shape: SlabShape, n: usize, eps: f64, size: f64) -> Option<(f64, f64)> {
    match shape {
        SlabShape::Ball => ball_profile(n, eps, size),
        SlabShape::Cube => cube_profile(n, eps, size),
    }
}

/// Maximal protrusion for the given shape at level `alpha`.
///
/// The size is scanned on a log-spaced grid and the best bracket refined by
/// golden-section search to a tolerance of `1e-8` in `log(size)`.
pub fn slab_halo_height(shape: SlabShape, n: usize, alpha: f64) -> Result<SlabHeight> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::LevelOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let eps = 1.0 - alpha;
    let mut evaluations = 0usize;
    let mut height_at = |log_size: f64| {
        evaluations += 1;
        profile(shape, n, eps, log_size.exp()).map_or(f64::NEG_INFINITY, |p| p.1)
    };

    let grid: Vec<f64> = (0..LOG_GRID)
        .map(|k| -LOG_SPAN + 2.0 * LOG_SPAN * k as f64 / (LOG_GRID - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| height_at(x)).collect();
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let trace = |msg: &str| Error::NoConvergence {
        trace: format!("{shape} n={n} alpha={alpha}: {msg}"),
    };
    if !values[best].is_finite() {
        return Err(trace("no feasible size on the search grid"));
    }
    if best == 0 || best == LOG_GRID - 1 {
        return Err(trace(&format!("optimum at the edge of the search grid (log size {})", grid[best])));
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = height_at(x1);
    let mut f2 = height_at(x2);
    let mut steps = 0;
    while b - a > PARAM_TOL {
        steps += 1;
        if steps > MAX_GOLDEN {
            return Err(trace(&format!("bracket [{a}, {b}] after {MAX_GOLDEN} golden steps")));
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = height_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = height_at(x2);
        }
    }
    let log_size = 0.5 * (a + b);
    let size = log_size.exp();
    let (offset, height) = profile(shape, n, eps, size).ok_or_else(|| trace("refined size infeasible"))?;
    let (offset, height, size) = if height >= values[best] {
        (offset, height, size)
    } else {
        let s = grid[best].exp();
        let p = profile(shape, n, eps, s).expect("finite grid value");
        (p.0, p.1, s)
    };
    let off_axis_gain = match shape {
        SlabShape::Ball => Some(off_axis_gain(n, eps, size, offset, height)),
        SlabShape::Cube => None,
    };
    Ok(SlabHeight {
        shape,
        n,
        alpha,
        height,
        size,
        offset,
        evaluations: evaluations + 1,
        off_axis_gain,
    })
}

const OFF_AXIS_DIRECTIONS: usize = 10;

/// Moves the optimal ball center along 10 seeded random directions and
/// returns the best height reached above the original test point among the
/// perturbations that keep the density constraint.
fn off_axis_gain(n: usize, eps: f64, r: f64, c: f64, height: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let step = 1e-3 * r;
    let mut gain = f64::NEG_INFINITY;
    for _ in 0..OFF_AXIS_DIRECTIONS {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let lateral2: f64 = v[..n - 1].iter().map(|x| (x * step).powi(2)).sum();
        let c2 = c + v[n - 1] * step;
        if ball_outside(n, r, c2) > eps || lateral2 >= r * r {
            continue;
        }
        let reach = c2 + (r * r - lateral2).sqrt() - 1.0;
        gain = gain.max(reach - height);
    }
    gain
}

/// Heights for a list of levels.
pub fn slab_heights(shape: SlabShape, n: usize, alphas: &[f64]) -> Result<Vec<SlabHeight>> {
    use rayon::prelude::*;
    alphas.par_iter().map(|&a| slab_halo_height(shape, n, a)).collect()
}
