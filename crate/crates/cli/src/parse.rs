//! Flag values that clap cannot parse on its own.

use halo_core::halo::fit::dyadic_ladder;
use halo_core::scalar::{parse_exact, ExactScalar};
use halo_core::Scalar;

use crate::error::{CliError, CliResult};

pub fn exact(flag: &str, s: &str) -> CliResult<ExactScalar> {
    parse_exact(s).map_err(|e| CliError::parse(format!("--{flag}: {e}")))
}

pub fn float(flag: &str, s: &str) -> CliResult<f64> {
    exact(flag, s).map(|x| x.to_f64())
}

/// Exponent `k` of a dyadic level written `1-2^-k`.
fn dyadic_exponent(s: &str) -> Option<i32> {
    s.trim().strip_prefix("1-2^-")?.parse().ok()
}

/// Level lists: `1-2^-a..1-2^-b` for a dyadic ladder, or a comma-separated
/// list whose terms are `1-2^-k`, `p/q` or decimals.
pub fn alphas(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::parse(format!("--alphas: cannot read {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (dyadic_exponent(a).ok_or_else(bad)?, dyadic_exponent(b).ok_or_else(bad)?);
        return Ok(dyadic_ladder(a.min(b)..=a.max(b)));
    }
    s.split(',')
        .map(|t| match dyadic_exponent(t) {
            Some(k) => Ok(1.0 - 2f64.powi(-k)),
            None => float("alphas", t.trim()),
        })
        .collect()
}

/// One-based axis list such as `1,2`, returned zero-based.
pub fn axes(s: &str) -> CliResult<Vec<usize>> {
    s.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(CliError::parse(format!("--axes: {t:?} is not a positive axis number"))),
        })
        .collect()
}
