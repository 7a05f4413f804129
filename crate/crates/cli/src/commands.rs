use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use halo_core::chain::run_chain;
use halo_core::covering::{
    cf_select, dilation_cover_check, optimal_delta, tauberian_upper_from_selection, DensityBallFamily, McConfig,
};
use halo_core::halo::fit::{fit_loglog, ExponentFit};
use halo_core::halo::sampler::{CandidateSpec, GridSpec};
use halo_core::halo::slab::{slab_heights, SlabShape};
use halo_core::halo::sweep::{alpha_sweep, describe_set, BoundSource, SweepTarget};
use halo_core::halo::{FamilyKind, OperatorFamily};
use halo_core::io::{chain_trace_json, interval_set_json, read_sweep_column, read_sweep_records, superlevel_json, sweep_csv, Geometry};
use halo_core::maximal_1d::{lemma1_bound, reduced_level, superlevel_indicator, superlevel_mixed, MixedIndicator};
use halo_core::plot::{emit_plot, PlotSource};
use halo_core::scalar::format_exact;

use crate::context::{emit, Context};
use crate::error::{CliError, CliResult};
use crate::parse;

#[derive(Args, Serialize)]
pub struct SuperlevelArgs {
    /// One-dimensional geometry file.
    #[arg(long)]
    #[serde(skip)]
    set: PathBuf,
    /// Level as an exact scalar, e.g. `1/2`.
    #[arg(long)]
    alpha: String,
    /// Floor of the mixed indicator `χ_E + γ χ_{E^c}`.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn superlevel(args: SuperlevelArgs) -> CliResult<()> {
    let mut ctx = Context::new("superlevel", &args);
    let e = Geometry::parse(&ctx.read(&args.set)?)
        .map_err(|e| CliError::from(e).at(&args.set))?
        .interval_set()?;
    let alpha = parse::exact("alpha", &args.alpha)?;
    let mut body = match &args.gamma {
        Some(g) => {
            let gamma = parse::exact("gamma", g)?;
            let res = superlevel_mixed(&MixedIndicator::new(e, gamma.clone())?, &alpha)?;
            let mut v = superlevel_json(&res);
            v["gamma"] = json!(format_exact(&gamma));
            v
        }
        None => superlevel_json(&superlevel_indicator(&e, &alpha)?),
    };
    body["alpha"] = json!(format_exact(&alpha));
    emit(args.out.as_ref(), &ctx.json(body))
}

#[derive(Args, Serialize)]
pub struct Lemma1Args {
    #[arg(long)]
    #[serde(skip)]
    set: PathBuf,
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value = "0")]
    gamma: String,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn lemma1(args: Lemma1Args) -> CliResult<()> {
    let mut ctx = Context::new("lemma1", &args);
    let e = Geometry::parse(&ctx.read(&args.set)?)
        .map_err(|e| CliError::from(e).at(&args.set))?
        .interval_set()?;
    let alpha = parse::exact("alpha", &args.alpha)?;
    let gamma = parse::exact("gamma", &args.gamma)?;
    let factor = lemma1_bound(&alpha, &gamma)?;
    let res = superlevel_mixed(&MixedIndicator::new(e.clone(), gamma.clone())?, &alpha)?;
    let measure = res.set.measure();
    let bound = factor.clone() * e.measure();
    let body = json!({
        "alpha": format_exact(&alpha),
        "gamma": format_exact(&gamma),
        "reduced_level": format_exact(&reduced_level(&alpha, &gamma)),
        "set_measure": format_exact(&e.measure()),
        "intervals": interval_set_json(&res.set),
        "measure": format_exact(&measure),
        "bound_factor": format_exact(&factor),
        "bound": format_exact(&bound),
        "holds": measure <= bound,
    });
    emit(args.out.as_ref(), &ctx.json(body))
}

#[derive(Args, Serialize)]
pub struct ChainArgs {
    #[arg(long)]
    #[serde(skip)]
    set: PathBuf,
    /// First level of the chain, an exact scalar.
    #[arg(long)]
    alpha1: String,
    /// One-based operator order, innermost first, e.g. `1,2`.
    #[arg(long)]
    axes: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn chain(args: ChainArgs) -> CliResult<()> {
    let mut ctx = Context::new("chain", &args);
    let g = Geometry::parse(&ctx.read(&args.set)?).map_err(|e| CliError::from(e).at(&args.set))?;
    let alpha1 = parse::exact("alpha1", &args.alpha1)?;
    let axes = args.axes.as_deref().map(parse::axes).transpose()?;
    let trace = run_chain(&g.set, &alpha1, axes.as_deref())?;
    emit(args.out.as_ref(), &ctx.json(chain_trace_json(&trace)))
}

#[derive(Args, Serialize)]
pub struct CoverArgs {
    #[arg(long)]
    #[serde(skip)]
    set: PathBuf,
    /// Geometry file holding the balls; defaults to the balls of `--set`.
    #[arg(long)]
    #[serde(skip)]
    balls: Option<PathBuf>,
    #[arg(long)]
    alpha: String,
    /// Defaults to `(1-α)^{n/(n+1)}`.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per ball.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Approximate number of test points in the dilation cover check.
    #[arg(long, default_value_t = 10_000)]
    cover_points: usize,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn cover(args: CoverArgs) -> CliResult<()> {
    let mut ctx = Context::new("cover", &args);
    let g = Geometry::parse(&ctx.read(&args.set)?).map_err(|e| CliError::from(e).at(&args.set))?;
    let balls = match &args.balls {
        Some(p) => Geometry::parse(&ctx.read(p)?).map_err(|e| CliError::from(e).at(p))?.balls,
        None => g.balls.clone(),
    };
    let alpha = parse::float("alpha", &args.alpha)?;
    let family = DensityBallFamily::new(g.set.to_f64(), balls, alpha)?;
    let delta = match &args.delta {
        Some(d) => parse::float("delta", d)?,
        None => optimal_delta(alpha, family.dim()),
    };
    let mc = McConfig {
        seed: args.seed,
        samples: args.samples,
    };
    let sel = cf_select(&family, delta, mc)?;
    let report = dilation_cover_check(&family, &sel, args.cover_points);
    let cert = tauberian_upper_from_selection(&family, &sel)?;
    let input = |positions: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = positions.iter().map(|&p| family.input_index()[p]).collect();
        v.sort_unstable();
        v
    };
    let pieces: Vec<Value> = sel
        .pieces
        .iter()
        .map(|p| {
            json!({
                "position": p.position,
                "input_index": family.input_index()[p.position],
                "ball_volume": p.ball_volume,
                "piece": p.piece,
                "piece_in_set": p.piece_in_set,
                "large_enough": p.large_enough(delta),
                "dense_enough": p.dense_enough(alpha, delta),
            })
        })
        .collect();
    let body = json!({
        "alpha": alpha,
        "delta": delta,
        "dilation": sel.dilation,
        "dim": family.dim(),
        "set_measure": family.set_measure(),
        "densities": family.densities(),
        "selected": input(&sel.selected),
        "flagged": input(&sel.flagged),
        "overlap_rule_holds": sel.overlap_rule_holds(),
        "decisions": sel.decisions,
        "pieces": pieces,
        "cover": {
            "points_checked": report.points_checked,
            "covered": report.is_covered(),
            "counterexample": report.counterexample,
        },
        "certificate": cert,
        "mc": sel.mc,
    });
    emit(args.out.as_ref(), &ctx.json(body))
}

fn fit_json(fit: &ExponentFit) -> Value {
    serde_json::to_value(fit).expect("fit serializes")
}

#[derive(Args, Serialize)]
pub struct SlabArgs {
    /// `ball`, or `cube` for the cube resting on a corner.
    #[arg(long)]
    shape: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "1-2^-4..1-2^-12")]
    alphas: String,
    /// Fit the exponent of the protrusion and draw it.
    #[arg(long)]
    fit: bool,
    /// SVG output; defaults to `--out` with extension `.svg` when fitting.
    #[arg(long)]
    #[serde(skip)]
    plot: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn slab(args: SlabArgs) -> CliResult<()> {
    let ctx = Context::new("slab", &args);
    let shape: SlabShape = args.shape.parse()?;
    let alphas = parse::alphas(&args.alphas)?;
    let heights = slab_heights(shape, args.n, &alphas)?;
    let mut body = json!({"shape": shape.to_string(), "n": args.n, "heights": heights});
    if args.fit {
        let pts: Vec<(f64, f64)> = heights.iter().map(|h| (h.alpha, h.height)).collect();
        let fit = fit_loglog(&pts, 0.0)?;
        let plot = args.plot.clone().or_else(|| args.out.as_ref().map(|o| o.with_extension("svg")));
        if let Some(p) = &plot {
            emit(Some(p), &ctx.svg(&emit_plot(PlotSource::Fit(&fit))?))?;
        }
        body["fit"] = fit_json(&fit);
    }
    emit(args.out.as_ref(), &ctx.json(body))
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundArg {
    Auto,
    None,
    Theorem2,
    Theorem3,
}

impl From<BoundArg> for BoundSource {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Auto => BoundSource::Auto,
            BoundArg::None => BoundSource::None,
            BoundArg::Theorem2 => BoundSource::Theorem2,
            BoundArg::Theorem3 => BoundSource::Theorem3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Serialize)]
pub struct SweepArgs {
    /// Operator family, e.g. `balls2d`, `centered-cubes3d`, `iterated2d`, `intervals1d`.
    #[arg(long)]
    family: String,
    #[arg(long)]
    #[serde(skip)]
    set: PathBuf,
    #[arg(long, default_value = "1-2^-4..1-2^-12")]
    alphas: String,
    /// Evaluation grid step.
    #[arg(long, default_value = "1/256")]
    grid: String,
    /// Candidate center spacing; defaults to the grid step.
    #[arg(long)]
    center_step: Option<String>,
    /// Smallest candidate radius; defaults to the grid step.
    #[arg(long)]
    r_min: Option<String>,
    /// Largest candidate radius; defaults to half the longest side of the set.
    #[arg(long)]
    r_max: Option<String>,
    #[arg(long, default_value_t = 8)]
    rungs: usize,
    /// Use the exact engine (one-dimensional sets only).
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value_t = BoundArg::Auto)]
    bound: BoundArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn sweep(args: SweepArgs) -> CliResult<()> {
    let mut ctx = Context::new("sweep", &args);
    let family: OperatorFamily = args.family.parse()?;
    let g = Geometry::parse(&ctx.read(&args.set)?).map_err(|e| CliError::from(e).at(&args.set))?;
    let alphas = parse::alphas(&args.alphas)?;
    let target = if args.exact {
        if family.kind() != FamilyKind::UncenteredIntervals1d {
            return Err(CliError::parse("--exact needs --family intervals1d"));
        }
        SweepTarget::Exact1d(g.interval_set()?)
    } else {
        let set = g.set.to_f64();
        let step = parse::float("grid", &args.grid)?;
        let opt = |flag: &str, v: &Option<String>, default: f64| match v {
            Some(s) => parse::float(flag, s),
            None => Ok(default),
        };
        let longest = set
            .bounding_box()
            .map(|b| b.axes().iter().map(|iv| iv.length()).fold(0.0, f64::max))
            .unwrap_or(1.0);
        let candidates = CandidateSpec {
            center_step: opt("center-step", &args.center_step, step)?,
            r_min: opt("r-min", &args.r_min, step)?,
            r_max: opt("r-max", &args.r_max, 0.5 * longest)?,
            rungs: args.rungs,
        };
        SweepTarget::Sampled {
            label: describe_set(&set),
            family,
            set,
            grid: GridSpec { step },
            candidates,
        }
    };
    let records = alpha_sweep(&target, &alphas, args.bound.into(), args.seed)?;
    let text = match args.format {
        TableFormat::Csv => ctx.csv(&sweep_csv(&records)?),
        TableFormat::Json => ctx.json(json!({"records": records})),
    };
    emit(args.out.as_ref(), &text)
}

#[derive(Args, Serialize)]
pub struct FitArgs {
    /// Sweep CSV.
    #[arg(long = "in")]
    #[serde(skip)]
    input: PathBuf,
    #[arg(long, default_value = "lower_ratio")]
    col: String,
    /// Subtracted from every value before taking logarithms.
    #[arg(long, default_value = "1")]
    shift: String,
    /// Optional SVG of the fit.
    #[arg(long)]
    #[serde(skip)]
    plot: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn fit(args: FitArgs) -> CliResult<()> {
    let mut ctx = Context::new("fit", &args);
    let text = ctx.read(&args.input)?;
    let pts = read_sweep_column(&text, &args.col).map_err(|e| CliError::from(e).at(&args.input))?;
    let fit = fit_loglog(&pts, parse::float("shift", &args.shift)?)?;
    if let Some(p) = &args.plot {
        emit(Some(p), &ctx.svg(&emit_plot(PlotSource::Fit(&fit))?))?;
    }
    let mut body = fit_json(&fit);
    body["column"] = json!(args.col);
    emit(args.out.as_ref(), &ctx.json(body))
}

#[derive(Args, Serialize)]
pub struct PlotArgs {
    /// Sweep CSV, or fit JSON from `fit` or `slab --fit`.
    #[arg(long = "in")]
    #[serde(skip)]
    input: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

pub fn plot(args: PlotArgs) -> CliResult<()> {
    let mut ctx = Context::new("plot", &args);
    let text = ctx.read(&args.input)?;
    let svg = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::parse(e.to_string()).at(&args.input))?;
        let v = v.get("fit").cloned().unwrap_or(v);
        let fit: ExponentFit =
            serde_json::from_value(v).map_err(|e| CliError::parse(format!("not a fit: {e}")).at(&args.input))?;
        emit_plot(PlotSource::Fit(&fit))?
    } else {
        let records = read_sweep_records(&text).map_err(|e| CliError::from(e).at(&args.input))?;
        emit_plot(PlotSource::Records(&records))?
    };
    emit(args.out.as_ref(), &ctx.svg(&svg))
}
