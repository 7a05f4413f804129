//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so every line is shown.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use halo_core::ball::{ball_boxset_volume, Ball};
use halo_core::boxset::{AxisBox, BoxSet};
use halo_core::chain::{run_chain, theorem2_bound, AlphaChain};
use halo_core::covering::{
    cf_select, dilation_cover_check, optimal_delta, tauberian_upper_from_selection, theorem3_bound, DensityBallFamily,
    McConfig,
};
use halo_core::halo::{
    alpha_sweep, dyadic_ladder, fit_loglog, iterated_lower_bound, slab_heights, theorem4_probe, theorem4_probe_exact_1d,
    BoundSource, CandidateSpec, FamilyKind, GridSpec, OperatorFamily, SlabShape, SweepTarget,
};
use halo_core::interval::{Interval, IntervalSet};
use halo_core::io::{chain_trace_json, superlevel_json, sweep_csv};
use halo_core::maximal_1d::{lemma1_bound, single_interval_ratio, superlevel_indicator, superlevel_mixed, MixedIndicator};
use halo_core::plot::{emit_plot, PlotSource};
use halo_core::scalar::{exact_from_f64, q};
use halo_core::{ExactBoxSet, ExactIntervalSet, ExactScalar, Scalar};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rand_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> ExactScalar {
    let den = rng.gen_range(1..=max_den);
    q(rng.gen_range(lo * den..=hi * den), den)
}

/// Up to `max_parts` intervals in `[0, 4]` with denominators at most 64.
fn random_interval_set(rng: &mut ChaCha8Rng, max_parts: usize) -> ExactIntervalSet {
    loop {
        let parts = rng.gen_range(1..=max_parts);
        let raw = (0..parts).filter_map(|_| {
            let a = rand_rational(rng, 0, 4, 64);
            let len = rand_rational(rng, 0, 1, 64);
            Interval::try_new(a.clone(), a + len)
        });
        let set = IntervalSet::from_intervals(raw.collect::<Vec<_>>());
        if !set.is_empty() {
            return set;
        }
    }
}

// ---------------------------------------------------------------------------
// 1. Exact 1D engine against a brute-force grid oracle.

/// `M χ_E(x)` evaluated directly: outside `E` an optimal interval starts at
/// `x` or at a left endpoint of a component and ends at `x` or at a right
/// endpoint of a component.
fn oracle_maximal(parts: &[(f64, f64)], x: f64) -> f64 {
    if parts.iter().any(|&(a, b)| a < x && x < b) {
        return 1.0;
    }
    let mass = |a: f64, b: f64| -> f64 { parts.iter().map(|&(l, r)| (r.min(b) - l.max(a)).max(0.0)).sum() };
    let lefts = parts.iter().map(|p| p.0).filter(|&a| a <= x).chain([x]);
    let mut best: f64 = 0.0;
    for a in lefts {
        for b in parts.iter().map(|p| p.1).filter(|&b| b >= x).chain([x]) {
            if b > a {
                best = best.max(mass(a, b) / (b - a));
            }
        }
    }
    best
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let step = 2f64.powi(-9);
    let (mut cells, mut disagreements, mut measure_failures) = (0usize, 0usize, 0usize);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let e = random_interval_set(&mut rng, 8);
        let parts: Vec<(f64, f64)> = e.intervals().iter().map(|iv| (iv.lo().to_f64(), iv.hi().to_f64())).collect();
        for k in 1..16 {
            let alpha = q(k, 16);
            let exact = superlevel_indicator(&e, &alpha).unwrap().set;
            let ends: Vec<(f64, f64)> = exact.intervals().iter().map(|iv| (iv.lo().to_f64(), iv.hi().to_f64())).collect();
            let a = alpha.to_f64();
            let reach = e.measure().to_f64() * (1.0 / a - 1.0) + 1.0;
            let i0 = ((parts[0].0 - reach) / step).floor() as i64;
            let i1 = ((parts[parts.len() - 1].1 + reach) / step).ceil() as i64;
            let mut marked = 0usize;
            for i in i0..=i1 {
                let x = (i as f64 + 0.5) * step;
                let inside = oracle_maximal(&parts, x) > a;
                marked += inside as usize;
                cells += 1;
                if inside != ends.iter().any(|&(l, r)| l < x && x < r) {
                    disagreements += 1;
                }
            }
            let gap = (marked as f64 * step - exact.measure().to_f64()).abs() / step;
            worst = worst.max(gap / ends.len() as f64);
            if gap > ends.len() as f64 {
                measure_failures += 1;
            }
        }
    }
    let mut law_failures = 0;
    for _ in 0..20 {
        let a = rand_rational(&mut rng, -4, 4, 64);
        let len = rand_rational(&mut rng, 0, 2, 64) + q(1, 64);
        let e = IntervalSet::single(Interval::new(a.clone(), a + len.clone()).unwrap());
        let alpha = loop {
            let x = rand_rational(&mut rng, 0, 1, 97);
            if x > ExactScalar::zero() && x < ExactScalar::one() {
                break x;
            }
        };
        let m = superlevel_indicator(&e, &alpha).unwrap().set.measure();
        if m != single_interval_ratio(&alpha) * len.clone() || m != (q(2, 1) / alpha - ExactScalar::one()) * len {
            law_failures += 1;
        }
    }
    outcome(
        disagreements == 0 && measure_failures == 0 && law_failures == 0,
        format!(
            "3000 cases, {cells} oracle cells, {disagreements} pointwise disagreements; measure within one step per \
             component in all but {measure_failures} (worst {worst:.3} steps per component); single-interval law {} / 20 exact",
            20 - law_failures
        ),
    )
}

// ---------------------------------------------------------------------------
// 2. Lemma 1, exactly.

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..500 {
        let e = random_interval_set(&mut rng, 8);
        let alpha = q(rng.gen_range(1..64), 64);
        let gamma = alpha.clone() * q(rng.gen_range(0..48), 48);
        let f = MixedIndicator::new(e.clone(), gamma.clone()).unwrap();
        let m = superlevel_mixed(&f, &alpha).unwrap().set.measure();
        let bound = lemma1_bound(&alpha, &gamma).unwrap() * e.measure();
        if m > bound {
            violations += 1;
        }
        tightest = tightest.min((bound / m).to_f64());
    }
    outcome(
        violations == 0,
        format!("500 exact cases, {violations} violations, smallest bound/measure {tightest:.4}"),
    )
}

// ---------------------------------------------------------------------------
// 3. Chain bound, telescoping, and sampled containment.

fn random_boxset_2d(rng: &mut ChaCha8Rng) -> ExactBoxSet {
    let count = rng.gen_range(1..=5);
    let boxes = (0..count)
        .map(|_| {
            let bounds = (0..2)
                .map(|_| {
                    let a = q(rng.gen_range(0..32), 16);
                    let len = q(rng.gen_range(1..=16), 16);
                    (a.clone(), a + len)
                })
                .collect();
            AxisBox::from_bounds(bounds).unwrap()
        })
        .collect();
    BoxSet::canonicalize(2, boxes).unwrap()
}

/// Grid cell around `center`, pulled in by `1e-9` of a step on every side,
/// as an exact box.
fn shrunk_cell(center: [f64; 2], step: [f64; 2]) -> halo_core::ExactBox {
    let bounds = (0..2)
        .map(|i| {
            let h = 0.5 * step[i] * (1.0 - 1e-9);
            (exact_from_f64(center[i] - h).unwrap(), exact_from_f64(center[i] + h).unwrap())
        })
        .collect();
    AxisBox::from_bounds(bounds).unwrap()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alphas = [q(1, 4), q(1, 2), q(3, 4)];
    let (mut bound_fail, mut escapes, mut cells) = (0, 0usize, 0usize);
    for _ in 0..50 {
        let e = random_boxset_2d(&mut rng);
        let ef = e.to_f64();
        for a1 in &alphas {
            let trace = run_chain(&e, a1, None).unwrap();
            let factor = ExactScalar::one() + q(4, 1) * (ExactScalar::one() - a1.clone()) / a1.clone();
            let e2 = trace.final_set().unwrap();
            if e2.measure() > factor.clone() * factor * e.measure() || !trace.bound_holds() {
                bound_fail += 1;
            }
            let level = trace.final_level().to_f64();
            let bb = e2.bounding_box().unwrap().map(|x| x.to_f64());
            let window = [0, 1].map(|i| {
                let (lo, hi) = (*bb.axis(i).lo(), *bb.axis(i).hi());
                let pad = 0.25 * (hi - lo);
                (lo - pad, hi + pad)
            });
            let grid = iterated_lower_bound(&ef, [0, 1], window, [200, 200]).unwrap();
            for i0 in 0..200 {
                for i1 in 0..200 {
                    if grid.value(i0, i1) > level + 1e-12 {
                        cells += 1;
                        let cell = shrunk_cell(grid.center(i0, i1), grid.step);
                        if e2.overlap_volume(&cell) != cell.volume() {
                            escapes += 1;
                        }
                    }
                }
            }
        }
    }
    let telescoping = alphas
        .iter()
        .chain(&[q(1, 3), q(7, 8), q(1, 100)])
        .all(|a| (1..=6).all(|n| AlphaChain::new(a.clone(), n).unwrap().telescoping_holds()));
    outcome(
        bound_fail == 0 && telescoping && escapes == 0,
        format!(
            "150 chains, {bound_fail} bound failures; telescoping n<=6 {}; {cells} sampled cells above α_2, {escapes} not covered by E_2",
            if telescoping { "exact" } else { "BROKEN" }
        ),
    )
}

// ---------------------------------------------------------------------------
// 4. Exponent of the iterated bound.

fn slope_of(f: impl Fn(f64) -> f64, ks: std::ops::RangeInclusive<i32>) -> f64 {
    let pts: Vec<(f64, f64)> = dyadic_ladder(ks).into_iter().map(|a| (a, f(a))).collect();
    fit_loglog(&pts, 1.0).unwrap().slope
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=3usize {
        let s = slope_of(|a| theorem2_bound(a, n).unwrap(), 6..=16);
        let target = 1.0 / n as f64;
        let ok = (s - target).abs() <= 0.03;
        pass &= ok;
        parts.push(format!("n={n} slope {s:.4} vs {target:.4}±0.03 {}", if ok { "ok" } else { "out" }));
    }
    let tail = slope_of(|a| theorem2_bound(a, 2).unwrap(), 40..=50);
    parts.push(format!("(n=2 over k=40..50: {tail:.4})"));
    outcome(pass, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 5. Density-ball selection and its certificates.

fn random_ball_family(rng: &mut ChaCha8Rng, alpha: f64) -> Option<DensityBallFamily> {
    let boxes: Vec<AxisBox<f64>> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let b = (0..2)
                .map(|_| {
                    let a = rng.gen_range(0.0..1.0);
                    (a, a + rng.gen_range(0.2..0.8))
                })
                .collect();
            AxisBox::from_bounds(b).unwrap()
        })
        .collect();
    let set = BoxSet::canonicalize(2, boxes).unwrap();
    let target = rng.gen_range(10..=40);
    let mut balls = Vec::new();
    for _ in 0..4000 {
        if balls.len() == target {
            break;
        }
        let b = &set.boxes()[rng.gen_range(0..set.boxes().len())];
        let c: Vec<f64> = b.axes().iter().map(|iv| rng.gen_range(*iv.lo()..*iv.hi())).collect();
        let ball = Ball::new(c, rng.gen_range(0.02..0.3)).unwrap();
        if ball_boxset_volume(&ball, &set) / ball.volume() > alpha + 1e-6 {
            balls.push(ball);
        }
    }
    (balls.len() >= 2).then(|| DensityBallFamily::new(set, balls, alpha).unwrap())
}

/// Measure of the union of the balls by cell-center counting, with a
/// half-width covering every cell that meets a boundary circle.
fn union_measure(balls: &[Ball], step: f64) -> (f64, f64) {
    let lo = [0, 1].map(|i| balls.iter().map(|b| b.center()[i] - b.radius()).fold(f64::INFINITY, f64::min));
    let hi = [0, 1].map(|i| balls.iter().map(|b| b.center()[i] + b.radius()).fold(f64::NEG_INFINITY, f64::max));
    let counts = [0, 1].map(|i| ((hi[i] - lo[i]) / step).ceil() as usize + 1);
    let mut hits = 0usize;
    for i in 0..counts[0] {
        for j in 0..counts[1] {
            let p = [lo[0] + (i as f64 + 0.5) * step, lo[1] + (j as f64 + 0.5) * step];
            if balls.iter().any(|b| b.contains(&p)) {
                hits += 1;
            }
        }
    }
    let perimeter: f64 = balls.iter().map(|b| std::f64::consts::TAU * b.radius()).sum();
    (hits as f64 * step * step, perimeter * step * 2f64.sqrt() + 4.0 * step * step * balls.len() as f64)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut problems = Vec::new();
    let mut families = 0;
    let mut worst_ratio: f64 = 0.0;
    for alpha in [0.7, 0.9] {
        let mut made = 0;
        while made < 20 {
            let Some(family) = random_ball_family(&mut rng, alpha) else {
                continue;
            };
            made += 1;
            families += 1;
            let delta = optimal_delta(alpha, 2);
            let sel = cf_select(&family, delta, McConfig::default()).unwrap();
            let tag = format!("α={alpha} family {made}");
            if !sel.overlap_rule_holds() {
                problems.push(format!("{tag}: overlap rule"));
            }
            if !sel.pieces.iter().all(|p| p.large_enough(delta)) {
                problems.push(format!("{tag}: piece below δ|B|"));
            }
            if !sel.pieces.iter().all(|p| p.dense_enough(alpha, delta)) {
                problems.push(format!("{tag}: piece density"));
            }
            let report = dilation_cover_check(&family, &sel, 10_000);
            if !report.is_covered() {
                problems.push(format!("{tag}: cover counterexample {:?}", report.counterexample));
            }
            let cert = tauberian_upper_from_selection(&family, &sel).unwrap();
            if !cert.holds {
                problems.push(format!("{tag}: certificate chain"));
            }
            let (union, band) = union_measure(family.balls(), 1.0 / 512.0);
            if union - band > cert.upper.upper() || union - band > cert.theorem_total {
                problems.push(format!("{tag}: union {union:.4} exceeds the certified bound"));
            }
            worst_ratio = worst_ratio.max(cert.upper.lower() / cert.theorem_total);
        }
    }
    let bound = |a: f64| theorem3_bound(a, optimal_delta(a, 2), 2).unwrap();
    let slope = slope_of(bound, 20..=40);
    let early = slope_of(bound, 4..=14);
    let slope_ok = (slope - 1.0 / 3.0).abs() <= 0.05;
    outcome(
        problems.is_empty() && slope_ok,
        format!(
            "{families} families, {} certificate problems{}; largest certified/theorem ratio {worst_ratio:.3}; \
             bound slope {slope:.4} over k=20..40 (1/3±0.05), {early:.4} over k=4..14",
            problems.len(),
            problems.first().map(|p| format!(" (first: {p})")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------------------
// 6. Slab exponents.

fn criterion_6() -> Outcome {
    let ladder = dyadic_ladder(4..=12);
    let fit = |shape: SlabShape, n: usize| {
        let hs = slab_heights(shape, n, &ladder).unwrap();
        let pts: Vec<(f64, f64)> = hs.iter().map(|h| (h.alpha, h.height)).collect();
        fit_loglog(&pts, 0.0).unwrap().slope
    };
    let cases = [
        ("ball n=2", fit(SlabShape::Ball, 2), 2.0 / 3.0),
        ("ball n=3", fit(SlabShape::Ball, 3), 0.5),
        ("cube n=2", fit(SlabShape::Cube, 2), 0.5),
    ];
    let mut pass = true;
    let mut parts: Vec<String> = cases
        .iter()
        .map(|&(name, s, t)| {
            let ok = (s - t).abs() <= 0.1;
            pass &= ok;
            format!("{name} {s:.4} vs {t:.3}±0.1")
        })
        .collect();
    let upper = slope_of(|a| theorem3_bound(a, optimal_delta(a, 2), 2).unwrap(), 20..=40);
    let ordered = upper < cases[0].1;
    pass &= ordered;
    parts.push(format!("Theorem-3 slope {upper:.4} < ball slope: {ordered}"));
    parts.push(format!("(cube n=3: {:.4})", fit(SlabShape::Cube, 3)));
    outcome(pass, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 7. Probe of the level set at 1.

fn criterion_7() -> Outcome {
    let square = BoxSet::from_box(AxisBox::from_bounds(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap());
    let step = 2f64.powi(-8);
    let cand = CandidateSpec {
        center_step: step,
        r_min: step,
        r_max: 0.5,
        rungs: 12,
    };
    let family = OperatorFamily::new(FamilyKind::UncenteredCubes, 2).unwrap();
    let probe = theorem4_probe(&square, &family, &dyadic_ladder(2..=10), &GridSpec { step }, &cand, 0.05).unwrap();
    let unit = IntervalSet::single(Interval::new(q(0, 1), q(1, 1)).unwrap());
    let exact = theorem4_probe_exact_1d(&unit, 1..=40).unwrap();
    let law = exact
        .iter()
        .all(|(a, ex)| *ex == q(2, 1) / a.clone() - q(2, 1));
    let shrinking = exact.windows(2).all(|w| w[1].1 < w[0].1);
    let last = exact.last().unwrap().1.to_f64();
    outcome(
        probe.nonincreasing && probe.below_tolerance && law && shrinking,
        format!(
            "sampled excess {:.4} → {:.4} nonincreasing {} below 0.05 {}; exact 1D excess (2/α−2)|E| at k=1..40 {} down to {last:.2e}",
            probe.excess[0],
            probe.excess.last().unwrap(),
            probe.nonincreasing,
            probe.below_tolerance,
            if law && shrinking { "exact and decreasing" } else { "WRONG" }
        ),
    )
}

// ---------------------------------------------------------------------------
// 8. Determinism of the emitted artifacts.

fn artifacts() -> Vec<(String, String)> {
    let square = BoxSet::from_box(AxisBox::from_bounds(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap());
    let step = 1.0 / 128.0;
    let target = SweepTarget::Sampled {
        family: OperatorFamily::new(FamilyKind::UncenteredBalls, 2).unwrap(),
        set: square,
        label: "unit-square".into(),
        grid: GridSpec { step },
        candidates: CandidateSpec {
            center_step: step,
            r_min: step,
            r_max: 0.5,
            rungs: 8,
        },
    };
    let records = alpha_sweep(&target, &dyadic_ladder(2..=8), BoundSource::Auto, 11).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let family = loop {
        if let Some(f) = random_ball_family(&mut rng, 0.8) {
            break f;
        }
    };
    let sel = cf_select(&family, optimal_delta(0.8, 2), McConfig { seed: 42, samples: 20_000 }).unwrap();
    let cert = tauberian_upper_from_selection(&family, &sel).unwrap();
    let slab = slab_heights(SlabShape::Ball, 2, &dyadic_ladder(4..=12)).unwrap();
    let fit = fit_loglog(&slab.iter().map(|h| (h.alpha, h.height)).collect::<Vec<_>>(), 0.0).unwrap();
    let e = random_boxset_2d(&mut ChaCha8Rng::seed_from_u64(9));
    let unit = IntervalSet::single(Interval::new(q(0, 1), q(1, 1)).unwrap());
    vec![
        ("sweep.csv".into(), sweep_csv(&records).unwrap()),
        ("sweep.svg".into(), emit_plot(PlotSource::Records(&records)).unwrap()),
        ("cover.json".into(), serde_json::to_string(&(&sel, &cert)).unwrap()),
        ("slab.svg".into(), emit_plot(PlotSource::Fit(&fit)).unwrap()),
        ("chain.json".into(), chain_trace_json(&run_chain(&e, &q(1, 2), None).unwrap()).to_string()),
        ("superlevel.json".into(), superlevel_json(&superlevel_indicator(&unit, &q(1, 2)).unwrap()).to_string()),
    ]
}

fn criterion_8() -> Outcome {
    let first = artifacts();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let second = pool.install(artifacts);
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let bytes: usize = first.iter().map(|a| a.1.len()).sum();
    outcome(
        differing.is_empty(),
        format!(
            "{} artifacts ({bytes} bytes) compared across two runs and thread pools, differing: {differing:?}",
            first.len()
        ),
    )
}

// ---------------------------------------------------------------------------

/// Number, name, time budget in seconds, and the check itself.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "exact 1D oracle equivalence", 60, criterion_1),
        (2, "Lemma 1 inequality", 120, criterion_2),
        (3, "iterated chain", 300, criterion_3),
        (4, "Theorem 2 exponent", 1, criterion_4),
        (5, "Theorem 3 pipeline", 600, criterion_5),
        (6, "slab exponents", 120, criterion_6),
        (7, "level-one probe", 120, criterion_7),
        (8, "determinism", 600, criterion_8),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let pass = res.pass && in_time;
        println!(
            "criterion {id} ({name}): {} [{:.2} s of {budget} s] {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            res.detail
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
