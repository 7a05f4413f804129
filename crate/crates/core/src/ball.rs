//! Euclidean balls in dimension 1 to 3 and closed-form volumes of their
//! intersections with slabs and axis-parallel boxes.

use num_traits::Float;

use crate::boxset::{AxisBox, BoxSet};
use crate::error::{Error, Result};

/// Open ball with a floating-point center and positive radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball<F = f64> {
    center: Vec<F>,
    radius: F,
}

fn c<F: Float>(x: f64) -> F {
    F::from(x).expect("float constant")
}

impl<F: Float> Ball<F> {
    pub fn new(center: Vec<F>, radius: F) -> Result<Self> {
        if center.is_empty() || center.len() > 3 {
            return Err(Error::UnsupportedDimension(center.len()));
        }
        if !(radius > F::zero()) || !radius.is_finite() {
            return Err(Error::NonPositiveRadius(radius.to_f64().unwrap_or(f64::NAN)));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::Geometry("ball center is not finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[F] {
        &self.center
    }

    pub fn radius(&self) -> F {
        self.radius
    }

    pub fn volume(&self) -> F {
        ball_volume(self.dim(), self.radius)
    }

    pub fn contains(&self, point: &[F]) -> bool {
        self.dist2(point) < self.radius * self.radius
    }

    /// Closed containment with a relative slack, for certificate checks.
    pub fn contains_closed(&self, point: &[F], slack: F) -> bool {
        let r = self.radius * (F::one() + slack);
        self.dist2(point) <= r * r
    }

    pub fn dist2(&self, point: &[F]) -> F {
        self.center
            .iter()
            .zip(point)
            .fold(F::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b))
    }

    /// Concentric dilate by `factor`.
    pub fn dilate(&self, factor: F) -> Self {
        Self {
            center: self.center.clone(),
            radius: self.radius * factor,
        }
    }

    pub fn scale(&self, lambda: F) -> Self {
        Self {
            center: self.center.iter().map(|x| *x * lambda).collect(),
            radius: self.radius * lambda,
        }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        let r = self.radius + other.radius;
        self.dist2(&other.center) < r * r
    }

    /// Axis-parallel bounding box as `(lo, hi)` per axis.
    pub fn bounds(&self) -> Vec<(F, F)> {
        self.center
            .iter()
            .map(|x| (*x - self.radius, *x + self.radius))
            .collect()
    }
}

/// Volume of a ball of radius `r` in dimension `n`.
pub fn ball_volume<F: Float>(n: usize, r: F) -> F {
    let pi = c::<F>(std::f64::consts::PI);
    match n {
        1 => c::<F>(2.0) * r,
        2 => pi * r * r,
        3 => c::<F>(4.0 / 3.0) * pi * r * r * r,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Volume of the cap of height `a` cut from a ball of radius `r`; `a` is
/// clamped to `[0, 2r]`.
pub fn cap_volume<F: Float>(n: usize, r: F, a: F) -> F {
    let a = a.max(F::zero()).min(r + r);
    match n {
        1 => a,
        2 => {
            let d = r - a;
            let cosine = (d / r).max(-F::one()).min(F::one());
            r * r * cosine.acos() - d * (r * a + r * a - a * a).max(F::zero()).sqrt()
        }
        3 => c::<F>(std::f64::consts::PI) * a * a * (c::<F>(3.0) * r - a) / c::<F>(3.0),
        _ => panic!("unsupported dimension {n}"),
    }
}

/// `|B ∩ {slab_lo < x_axis < slab_hi}|` in closed form.
pub fn ball_slab_volume<F: Float>(ball: &Ball<F>, slab_lo: F, slab_hi: F, axis: usize) -> Result<F> {
    if !(slab_lo < slab_hi) {
        return Err(Error::InvalidParameter {
            name: "slab",
            reason: "slab_lo must be below slab_hi".into(),
        });
    }
    if axis >= ball.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: ball.dim(),
        });
    }
    let n = ball.dim();
    let r = ball.radius();
    let x = ball.center()[axis];
    if slab_hi <= x - r || slab_lo >= x + r {
        return Ok(F::zero());
    }
    let top = cap_volume(n, r, x + r - slab_hi);
    let bottom = cap_volume(n, r, slab_lo - (x - r));
    let full = ball.volume();
    Ok((full - top - bottom).max(F::zero()).min(full))
}

/// Area of the disk of radius `r` centered at the origin intersected with
/// `(x0, x1) × (y0, y1)`.
pub fn disk_rect_area<F: Float>(r: F, x0: F, x1: F, y0: F, y1: F) -> F {
    let lo = x0.max(-r);
    let hi = x1.min(r);
    if !(lo < hi) || !(y0 < y1) || y1 <= -r || y0 >= r {
        return F::zero();
    }
    let half_chord = |x: F| (r * r - x * x).max(F::zero()).sqrt();
    let primitive = |x: F| {
        let s = half_chord(x);
        let t = (x / r).max(-F::one()).min(F::one());
        (x * s + r * r * t.asin()) / c::<F>(2.0)
    };
    let mut cuts = vec![lo, hi];
    for y in [y0, y1] {
        if y.abs() < r {
            let w = (r * r - y * y).sqrt();
            for p in [-w, w] {
                if p > lo && p < hi {
                    cuts.push(p);
                }
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cut"));
    let mut area = F::zero();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a < b) {
            continue;
        }
        let mid = (a + b) / c::<F>(2.0);
        let s = half_chord(mid);
        let upper_is_chord = s < y1;
        let lower_is_chord = -s > y0;
        let upper = if upper_is_chord { s } else { y1 };
        let lower = if lower_is_chord { -s } else { y0 };
        if upper <= lower {
            continue;
        }
        let chord_integral = primitive(b) - primitive(a);
        let width = b - a;
        area = area
            + match (upper_is_chord, lower_is_chord) {
                (true, true) => chord_integral + chord_integral,
                (true, false) => chord_integral - y0 * width,
                (false, true) => y1 * width + chord_integral,
                (false, false) => (y1 - y0) * width,
            };
    }
    area.max(F::zero())
}

const SLICE_PANELS: usize = 256;

/// `|B ∩ box|` for an axis-parallel box: closed form for `n <= 2`, and
/// composite Simpson over exact disk–rectangle slices for `n = 3`.
pub fn ball_box_volume<F: Float>(ball: &Ball<F>, bounds: &[(F, F)]) -> F {
    let r = ball.radius();
    let ctr = ball.center();
    match ball.dim() {
        1 => {
            let lo = bounds[0].0.max(ctr[0] - r);
            let hi = bounds[0].1.min(ctr[0] + r);
            (hi - lo).max(F::zero())
        }
        2 => disk_rect_area(
            r,
            bounds[0].0 - ctr[0],
            bounds[0].1 - ctr[0],
            bounds[1].0 - ctr[1],
            bounds[1].1 - ctr[1],
        ),
        3 => {
            let zl = ((bounds[2].0 - ctr[2]) / r).max(-F::one());
            let zh = ((bounds[2].1 - ctr[2]) / r).min(F::one());
            if !(zl < zh) {
                return F::zero();
            }
            // z = r sin(theta) keeps the integrand smooth at the poles
            let tl = zl.asin();
            let th = zh.asin();
            let panels = SLICE_PANELS;
            let h = (th - tl) / c::<F>(panels as f64);
            let slice = |theta: F| {
                let z = r * theta.sin();
                let rho = (r * r - z * z).max(F::zero()).sqrt();
                if rho <= F::zero() {
                    return F::zero();
                }
                disk_rect_area(
                    rho,
                    bounds[0].0 - ctr[0],
                    bounds[0].1 - ctr[0],
                    bounds[1].0 - ctr[1],
                    bounds[1].1 - ctr[1],
                ) * r
                    * theta.cos()
            };
            let mut sum = slice(tl) + slice(th);
            for k in 1..panels {
                let w = if k % 2 == 1 { c::<F>(4.0) } else { c::<F>(2.0) };
                sum = sum + w * slice(tl + h * c::<F>(k as f64));
            }
            (sum * h / c::<F>(3.0)).max(F::zero()).min(ball.volume())
        }
        n => panic!("unsupported dimension {n}"),
    }
}

/// `|B ∩ E|` for a float box set.
pub fn ball_boxset_volume<F>(ball: &Ball<F>, set: &BoxSet<F>) -> F
where
    F: Float + crate::scalar::Scalar,
{
    set.boxes()
        .iter()
        .map(|b| ball_box_volume(ball, &box_bounds(b)))
        .fold(F::zero(), |a, b| a + b)
}

pub(crate) fn box_bounds<F: crate::scalar::Scalar + Copy>(b: &AxisBox<F>) -> Vec<(F, F)> {
    b.axes().iter().map(|iv| (*iv.lo(), *iv.hi())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn disk(x: f64, y: f64, r: f64) -> Ball {
        Ball::new(vec![x, y], r).unwrap()
    }

    #[test]
    fn ball_inside_slab_keeps_full_area() {
        let b = disk(0.0, 0.0, 1.5);
        let v = ball_slab_volume(&b, -10.0, 10.0, 1).unwrap();
        assert!((v - PI * 2.25).abs() < 1e-12);
    }

    #[test]
    fn center_on_face_of_thick_slab_is_half() {
        let b = disk(0.0, 5.0, 1.0);
        let v = ball_slab_volume(&b, -100.0, 5.0, 1).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
        let b3 = Ball::new(vec![0.0, 0.0, 5.0], 2.0).unwrap();
        let v3 = ball_slab_volume(&b3, -100.0, 5.0, 2).unwrap();
        assert!((v3 - b3.volume() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn segment_area_against_monte_carlo() {
        // cap of height a = 1/2 on the unit disk
        let exact = cap_volume(2, 1.0, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut hits = 0usize;
        let mut inside = 0usize;
        for _ in 0..n {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let y: f64 = rng.gen_range(-1.0..1.0);
            if x * x + y * y < 1.0 {
                inside += 1;
                if y > 0.5 {
                    hits += 1;
                }
            }
        }
        let mc = PI * hits as f64 / inside as f64;
        assert!((mc - exact).abs() / exact < 3e-3, "mc {mc} exact {exact}");
        assert!((cap_volume(2, 1.0, 1.0) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_radius_rejected() {
        assert!(Ball::new(vec![0.0, 0.0], 0.0).is_err());
        assert!(Ball::new(vec![0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn slab_volume_monotone_in_width_and_continuous() {
        let b = disk(0.3, 0.2, 1.0);
        let mut prev = 0.0;
        for k in 1..200 {
            let w = k as f64 * 0.01;
            let v = ball_slab_volume(&b, -w, w, 1).unwrap();
            assert!(v + 1e-15 >= prev);
            prev = v;
        }
        for k in 0..50 {
            let y = -1.2 + k as f64 * 0.05;
            let v0 = ball_slab_volume(&disk(0.0, y, 1.0), -0.5, 0.5, 1).unwrap();
            let v1 = ball_slab_volume(&disk(0.0, y + 1e-6, 1.0), -0.5, 0.5, 1).unwrap();
            assert!((v0 - v1).abs() < 1e-5);
        }
    }

    #[test]
    fn quarter_disk_from_rectangle_area() {
        let a = disk_rect_area(1.0, 0.0, 1.0, 0.0, 1.0);
        assert!((a - PI / 4.0).abs() < 1e-12);
        let full = disk_rect_area(1.0, -2.0, 2.0, -2.0, 2.0);
        assert!((full - PI).abs() < 1e-12);
        assert_eq!(disk_rect_area(1.0, 2.0, 3.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn disk_rect_area_matches_grid_integration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let r: f64 = rng.gen_range(0.2..2.0);
            let x0: f64 = rng.gen_range(-2.5..2.0);
            let x1 = x0 + rng.gen_range(0.01..3.0);
            let y0: f64 = rng.gen_range(-2.5..2.0);
            let y1 = y0 + rng.gen_range(0.01..3.0);
            let exact = disk_rect_area(r, x0, x1, y0, y1);
            // midpoint rule over x of the clipped chord length
            let m = 20_000;
            let (a, b) = (x0.max(-r), x1.min(r));
            let mut num = 0.0;
            if a < b {
                let h = (b - a) / m as f64;
                for i in 0..m {
                    let x = a + (i as f64 + 0.5) * h;
                    let s = (r * r - x * x).max(0.0).sqrt();
                    num += (s.min(y1) - (-s).max(y0)).max(0.0) * h;
                }
            }
            assert!((exact - num).abs() < 1e-6, "{exact} vs {num}");
        }
    }

    #[test]
    fn ball_box_volume_three_d() {
        let b = Ball::new(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let full = ball_box_volume(&b, &[(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)]);
        assert!((full - 4.0 / 3.0 * PI).abs() < 1e-6);
        let octant = ball_box_volume(&b, &[(0.0, 2.0), (0.0, 2.0), (0.0, 2.0)]);
        assert!((octant - PI / 6.0).abs() < 1e-6);
        let slab = ball_box_volume(&b, &[(-2.0, 2.0), (-2.0, 2.0), (0.5, 2.0)]);
        assert!((slab - cap_volume(3, 1.0, 0.5)).abs() < 1e-6);
    }

    #[test]
    fn generic_over_f32() {
        let b: Ball<f32> = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let v = ball_slab_volume(&b, -0.1f32, 0.1, 0).unwrap();
        assert!(v > 0.39 && v < 0.41);
    }
}
