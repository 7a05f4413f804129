//! Deterministic SVG plots of sweeps and exponent fits.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::halo::fit::{fit_exponent, ExponentFit};
use crate::halo::sweep::SweepRecord;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 70.0;
const TICKS: usize = 5;

pub enum PlotSource<'a> {
    Records(&'a [SweepRecord]),
    Fit(&'a ExponentFit),
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn around(points: impl Iterator<Item = (f64, f64)> + Clone) -> Self {
        let span = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if hi - lo > 1e-12 {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Self {
            x: span(&mut points.clone().map(|p| p.0)),
            y: span(&mut points.map(|p| p.1)),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn axes(svg: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r##"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="#000"/>"##,
        w = r - l,
        h = b - t
    );
    for k in 0..=TICKS {
        let s = k as f64 / TICKS as f64;
        let xv = f.x.0 + s * (f.x.1 - f.x.0);
        let yv = f.y.0 + s * (f.y.1 - f.y.0);
        let (x, y) = (f.px(xv), f.py(yv));
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{bb}" stroke="#000"/><text x="{x:.2}" y="{ty}" font-size="12" text-anchor="middle">{xv:.3}</text>"##,
            bb = b + 5.0,
            ty = b + 20.0
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{l}" y1="{y:.2}" x2="{ll}" y2="{y:.2}" stroke="#000"/><text x="{tx}" y="{y:.2}" font-size="12" text-anchor="end">{yv:.3}</text>"##,
            ll = l - 5.0,
            tx = l - 8.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{cx}" y="{y}" font-size="14" text-anchor="middle">{xlabel}</text>"##,
        cx = WIDTH / 2.0,
        y = HEIGHT - 20.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="20" y="{cy}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {cy})">{ylabel}</text>"##,
        cy = HEIGHT / 2.0
    );
}

fn dots(svg: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str) {
    for &(x, y) in pts {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"##,
            f.px(x),
            f.py(y)
        );
    }
}

fn loglog(fit: &ExponentFit) -> Vec<(f64, f64)> {
    fit.points
        .iter()
        .map(|&(a, v)| ((1.0 / a - 1.0).ln(), (v - fit.shift).ln()))
        .collect()
}

fn fit_plot(svg: &mut String, fit: &ExponentFit, extra: &[(f64, f64)]) {
    let pts = loglog(fit);
    let f = Frame::around(pts.iter().chain(extra).copied());
    let ylabel = if fit.shift == 0.0 { "log value" } else { "log(value - 1)" };
    axes(svg, &f, "log(1/alpha - 1)", ylabel);
    let (x0, x1) = f.x;
    let y = |x: f64| fit.intercept + fit.slope * x;
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c03" stroke-width="2"/>"##,
        f.px(x0),
        f.py(y(x0)),
        f.px(x1),
        f.py(y(x1))
    );
    dots(svg, &f, extra, "#999");
    dots(svg, &f, &pts, "#036");
    let _ = writeln!(
        svg,
        r##"<text x="{x}" y="{y}" font-size="16">slope = {:.4}</text>"##,
        fit.slope,
        x = MARGIN + 15.0,
        y = MARGIN + 25.0
    );
}

/// SVG document on a fixed 800 × 600 canvas.
///
/// A fit is drawn in log–log coordinates with the fitted line and its slope.
/// Records are drawn the same way when they admit a fit, and otherwise as
/// a plain scatter of the ratio against `α`.
pub fn emit_plot(source: PlotSource<'_>) -> Result<String> {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    match source {
        PlotSource::Fit(fit) => {
            if fit.points.is_empty() {
                return Err(Error::NothingToPlot);
            }
            fit_plot(&mut svg, fit, &[]);
        }
        PlotSource::Records(records) => {
            if records.is_empty() {
                return Err(Error::NothingToPlot);
            }
            let pts: Vec<(f64, f64)> = records.iter().map(|r| (r.alpha, r.lower_ratio)).collect();
            match fit_exponent(&pts) {
                Ok(fit) => {
                    let upper: Vec<(f64, f64)> = records
                        .iter()
                        .filter_map(|r| r.upper_bound.filter(|&u| u > 1.0).map(|u| (r.alpha, u)))
                        .filter(|&(a, _)| a > 0.0 && a < 1.0)
                        .map(|(a, u)| ((1.0 / a - 1.0).ln(), (u - 1.0).ln()))
                        .collect();
                    fit_plot(&mut svg, &fit, &upper);
                }
                Err(_) => {
                    let f = Frame::around(pts.iter().copied());
                    axes(&mut svg, &f, "alpha", "ratio");
                    dots(&mut svg, &f, &pts, "#036");
                }
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::theorem2_bound;
    use crate::halo::fit::dyadic_ladder;

    fn record(alpha: f64, ratio: f64) -> SweepRecord {
        SweepRecord {
            alpha,
            lower_ratio: ratio,
            upper_bound: None,
            family: "iterated2d".into(),
            set: "unit".into(),
            grid: 0.0,
            candidates: 0,
            seed: 0,
            exact_ratio: None,
        }
    }

    #[test]
    fn single_record_is_a_point() {
        let svg = emit_plot(PlotSource::Records(&[record(0.5, 3.0)])).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r#"width="800" height="600""#));
    }

    #[test]
    fn theorem2_sweep_shows_half_slope() {
        let recs: Vec<SweepRecord> = dyadic_ladder(6..=16)
            .into_iter()
            .map(|a| record(a, theorem2_bound(a, 2).unwrap()))
            .collect();
        let svg = emit_plot(PlotSource::Records(&recs)).unwrap();
        let fit = fit_exponent(&recs.iter().map(|r| (r.alpha, r.lower_ratio)).collect::<Vec<_>>()).unwrap();
        assert!(svg.contains(&format!("slope = {:.4}", fit.slope)));
        assert!((fit.slope - 0.5).abs() < 0.06);
    }

    #[test]
    fn output_is_deterministic_and_empty_is_an_error() {
        let recs = vec![record(0.5, 3.0), record(0.75, 1.7)];
        assert_eq!(
            emit_plot(PlotSource::Records(&recs)).unwrap(),
            emit_plot(PlotSource::Records(&recs)).unwrap()
        );
        assert_eq!(emit_plot(PlotSource::Records(&[])), Err(Error::NothingToPlot));
    }
}
