use std::time::Duration;

use rug::float::Round;
use rug::Float;
use serde::Serialize;

use crate::error::Error;
use crate::interval::IntervalVector;
use crate::projection::{CrossingReport, ProjectionMap};
use crate::tracker::TubularNeighborhood;

/// Significant decimal digits of every bound in a report.
pub const DIGITS: usize = 20;

/// JSON output of the `track` and `project` commands.
#[derive(Debug, Clone, Serialize)]
pub struct TubeReport {
    pub schema: u32,
    pub command: String,
    pub variables: Vec<String>,
    /// Significant digits of the decimal bounds.
    pub digits: usize,
    pub closure: String,
    pub tubes: Vec<TubeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossings: Option<Vec<CrossingEntry>>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Serialize)]
pub struct TubeEntry {
    pub index: usize,
    #[serde(rename = "box")]
    pub bounds: Vec<[String; 2]>,
    /// Neighbours along the chain.
    pub adjacency: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingEntry {
    #[serde(rename = "box")]
    pub bounds: Vec<[String; 2]>,
    /// Corners of both rectangles, counterclockwise.
    pub rectangles: [Vec<[String; 2]>; 2],
    pub tubes: [Vec<usize>; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub iterations: usize,
    pub restarts: usize,
    pub rho: String,
    pub precision: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinements: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_pairs: Option<usize>,
    pub wall_time_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub schema: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

impl ErrorReport {
    pub fn new(e: &Error) -> Self {
        let kind = format!("{e:?}");
        let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        ErrorReport {
            schema: 1,
            error: ErrorBody {
                kind,
                message: e.to_string(),
            },
        }
    }
}

/// Decimal rendering of `x` rounded in direction `round`.
pub fn decimal(x: &Float, round: Round) -> String {
    x.to_string_radix_round(10, Some(DIGITS), round)
}

/// Outward decimal bounds of a box.
pub fn bounds(b: &IntervalVector) -> Vec<[String; 2]> {
    b.iter()
        .map(|x| [decimal(x.lo(), Round::Down), decimal(x.hi(), Round::Up)])
        .collect()
}

fn neighbours(nbhd: &TubularNeighborhood, i: usize) -> Vec<usize> {
    let n = nbhd.len();
    let mut out = Vec::new();
    if nbhd.is_closed() && n > 2 {
        out.push((i + n - 1) % n);
        out.push((i + 1) % n);
        out.sort_unstable();
    } else {
        if i > 0 {
            out.push(i - 1);
        }
        if i + 1 < n {
            out.push(i + 1);
        }
    }
    out
}

impl TubeReport {
    pub fn new(
        command: &str,
        variables: Vec<String>,
        nbhd: &TubularNeighborhood,
        projection: Option<(&ProjectionMap, &CrossingReport)>,
        wall: Duration,
    ) -> Self {
        let tubes = nbhd
            .tubes()
            .iter()
            .enumerate()
            .map(|(i, t)| TubeEntry {
                index: i,
                bounds: bounds(&t.region),
                adjacency: neighbours(nbhd, i),
            })
            .collect();
        let crossings = projection.map(|(_, report)| {
            report
                .crossings
                .iter()
                .map(|c| CrossingEntry {
                    bounds: bounds(&c.enclosure),
                    rectangles: c.rectangles.rectangles.clone().map(|r| {
                        r.corners()
                            .iter()
                            .map(|p| [decimal(&p[0].mid(), Round::Nearest), decimal(&p[1].mid(), Round::Nearest)])
                            .collect()
                    }),
                    tubes: c.tubes.clone(),
                })
                .collect()
        });
        let stats = nbhd.stats();
        TubeReport {
            schema: 1,
            command: command.into(),
            variables,
            digits: DIGITS,
            closure: nbhd.closure().to_string(),
            tubes,
            crossings,
            metadata: Metadata {
                iterations: stats.iterations,
                restarts: stats.restarts,
                rho: nbhd.rho().to_string(),
                precision: nbhd.precision().bits(),
                refinements: projection.map(|(_, r)| r.refinements),
                excluded_pairs: projection.map(|(_, r)| r.excluded.len()),
                wall_time_ms: wall.as_millis(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}
