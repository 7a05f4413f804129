use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// All intervals containing the point (n = 1).
    UncenteredIntervals1d,
    UncenteredBalls,
    UncenteredCubes,
    CenteredBalls,
    CenteredCubes,
    /// Axis-parallel rectangles: the strong maximal operator.
    AxisRectangles,
    /// Composition of the one-dimensional operators along the axes.
    IteratedDirectional,
}

impl FamilyKind {
    fn slug(self) -> &'static str {
        match self {
            FamilyKind::UncenteredIntervals1d => "intervals",
            FamilyKind::UncenteredBalls => "balls",
            FamilyKind::UncenteredCubes => "cubes",
            FamilyKind::CenteredBalls => "centered-balls",
            FamilyKind::CenteredCubes => "centered-cubes",
            FamilyKind::AxisRectangles => "rectangles",
            FamilyKind::IteratedDirectional => "iterated",
        }
    }

    pub fn is_centered(self) -> bool {
        matches!(self, FamilyKind::CenteredBalls | FamilyKind::CenteredCubes)
    }

    const ALL: [FamilyKind; 7] = [
        FamilyKind::UncenteredIntervals1d,
        FamilyKind::UncenteredBalls,
        FamilyKind::UncenteredCubes,
        FamilyKind::CenteredBalls,
        FamilyKind::CenteredCubes,
        FamilyKind::AxisRectangles,
        FamilyKind::IteratedDirectional,
    ];
}

/// A collection of averaging sets together with the ambient dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorFamily {
    kind: FamilyKind,
    dim: usize,
}

impl OperatorFamily {
    pub fn new(kind: FamilyKind, dim: usize) -> Result<Self> {
        let ok = match kind {
            FamilyKind::UncenteredIntervals1d => dim == 1,
            FamilyKind::IteratedDirectional => dim == 2,
            _ => (2..=3).contains(&dim),
        };
        if !ok {
            return Err(Error::IncompatibleFamily {
                family: kind.slug().to_string(),
                reason: format!("dimension {dim}"),
            });
        }
        Ok(Self { kind, dim })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Short names such as `balls2d`, `centered-cubes3d`, `intervals1d`.
impl fmt::Display for OperatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}d", self.kind.slug(), self.dim)
    }
}

impl FromStr for OperatorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::IncompatibleFamily {
            family: s.to_string(),
            reason: "unknown family name".into(),
        };
        let body = s.strip_suffix('d').ok_or_else(bad)?;
        let digit = body.chars().last().ok_or_else(bad)?;
        let dim = digit.to_digit(10).ok_or_else(bad)? as usize;
        let slug = &body[..body.len() - 1];
        let kind = FamilyKind::ALL
            .into_iter()
            .find(|k| k.slug() == slug)
            .ok_or_else(bad)?;
        Self::new(kind, dim)
    }
}
