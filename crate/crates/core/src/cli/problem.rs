use std::path::Path;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polysys::{parametric_to_implicit, parse_polynomial, parse_rational, PolySystem, Polynomial};
use crate::projection::ProjectionMap;
use crate::tracker::{Domain, TrackParams};
use crate::interval::Precision;

/// The curve of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSpec {
    /// `n - 1` equations in the named variables.
    System(Vec<Polynomial>),
    /// Coordinates `gamma_i(T)`, one per named variable.
    Parametric(Vec<Polynomial>),
}

/// Overrides of [`TrackParams`] fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamOverrides {
    pub rho: Option<Rational>,
    pub tau: Option<Rational>,
    pub step: Option<Rational>,
    pub radius: Option<Rational>,
    pub max_precision: Option<u32>,
    pub max_restarts: Option<usize>,
    pub max_tubes: Option<usize>,
}

impl ParamOverrides {
    /// Defaults with the overrides applied.
    pub fn apply(&self, mut p: TrackParams) -> Result<TrackParams> {
        let set = |slot: &mut Rational, v: &Option<Rational>| {
            if let Some(v) = v {
                *slot = v.clone();
            }
        };
        set(&mut p.rho, &self.rho);
        set(&mut p.tau, &self.tau);
        set(&mut p.step, &self.step);
        set(&mut p.radius, &self.radius);
        if let Some(bits) = self.max_precision {
            p.max_precision = Precision::new(bits)?;
        }
        if let Some(k) = self.max_restarts {
            p.max_restarts = k;
        }
        if let Some(k) = self.max_tubes {
            p.max_tubes = k;
        }
        p.validate()?;
        Ok(p)
    }
}

/// A parsed problem. Parametric curves are stored lifted: the start point,
/// region and projection cover the variables followed by `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub curve: CurveSpec,
    pub start_point: Vec<Rational>,
    pub region: Domain,
    pub projection: Option<ProjectionMap>,
    pub params: ParamOverrides,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Number(serde_json::Number),
}

impl Num {
    fn value(&self) -> Result<Rational> {
        match self {
            Num::Text(s) => parse_rational(s),
            Num::Number(n) => parse_rational(&n.to_string()),
        }
    }

    fn of(q: &Rational) -> Num {
        Num::Text(q.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    lo: Vec<Num>,
    hi: Vec<Num>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_tubes: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    system: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parametric: Option<Vec<String>>,
    start_point: Vec<Num>,
    region_d: RawRegion,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    projection: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<RawParams>,
}

fn numbers(v: &[Num]) -> Result<Vec<Rational>> {
    v.iter().map(Num::value).collect()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Reads and validates a problem file.
pub fn parse_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ProblemFile::from_json(&text)
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let n = raw.variables.len();
        if n < 2 {
            return Err(invalid("at least two variables are required"));
        }
        let curve = match (&raw.system, &raw.parametric) {
            (Some(eqs), None) => CurveSpec::System(
                eqs.iter()
                    .map(|e| parse_polynomial(e, &raw.variables))
                    .collect::<Result<_>>()?,
            ),
            (None, Some(gamma)) => {
                if gamma.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: gamma.len() });
                }
                CurveSpec::Parametric(gamma.iter().map(|g| parse_in_t(g)).collect::<Result<_>>()?)
            }
            _ => return Err(invalid("exactly one of `system` and `parametric` must be given")),
        };
        let dim = match curve {
            CurveSpec::System(_) => n,
            CurveSpec::Parametric(_) => n + 1,
        };
        let mut start = numbers(&raw.start_point)?;
        if let CurveSpec::Parametric(gamma) = &curve {
            if start.len() == 1 {
                let t = start.pop().expect("one value");
                for g in gamma {
                    start.push(g.eval_rational(std::slice::from_ref(&t))?);
                }
                start.push(t);
            }
        }
        if start.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: start.len() });
        }
        let lo = numbers(&raw.region_d.lo)?;
        let hi = numbers(&raw.region_d.hi)?;
        if lo.len() != dim || hi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if lo.len() != dim { lo.len() } else { hi.len() },
            });
        }
        let region = Domain::new(lo, hi)?;
        let projection = match &raw.projection {
            None => None,
            Some(rows) => {
                let mut rows = rows.iter().map(|r| numbers(r)).collect::<Result<Vec<_>>>()?;
                if dim == n + 1 {
                    for r in &mut rows {
                        match r.len() {
                            k if k == n => r.push(Rational::new()),
                            k if k == n + 1 && r[n] == 0 => {}
                            k if k == n + 1 => return Err(invalid("the projection must vanish on the T direction")),
                            k => return Err(Error::DimensionMismatch { expected: n, found: k }),
                        }
                    }
                }
                let m = ProjectionMap::new(rows)?;
                if m.nvars() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: m.nvars() });
                }
                Some(m)
            }
        };
        let params = match &raw.params {
            None => ParamOverrides::default(),
            Some(p) => ParamOverrides {
                rho: p.rho.as_ref().map(Num::value).transpose()?,
                tau: p.tau.as_ref().map(Num::value).transpose()?,
                step: p.step.as_ref().map(Num::value).transpose()?,
                radius: p.radius.as_ref().map(Num::value).transpose()?,
                max_precision: p.max_precision,
                max_restarts: p.max_restarts,
                max_tubes: p.max_tubes,
            },
        };
        let problem = ProblemFile {
            variables: raw.variables,
            curve,
            start_point: start,
            region,
            projection,
            params,
        };
        problem.params.apply(TrackParams::default())?;
        problem.system()?;
        Ok(problem)
    }

    /// Canonical JSON form; reading it back gives an equal problem.
    pub fn to_json(&self) -> String {
        let (system, parametric) = match &self.curve {
            CurveSpec::System(eqs) => (Some(eqs.iter().map(|p| p.display_with(&self.variables).to_string()).collect()), None),
            CurveSpec::Parametric(g) => {
                let t = ["T".to_string()];
                (None, Some(g.iter().map(|p| p.display_with(&t).to_string()).collect()))
            }
        };
        let nums = |v: &[Rational]| v.iter().map(Num::of).collect::<Vec<_>>();
        let p = &self.params;
        let params = RawParams {
            rho: p.rho.as_ref().map(Num::of),
            tau: p.tau.as_ref().map(Num::of),
            step: p.step.as_ref().map(Num::of),
            radius: p.radius.as_ref().map(Num::of),
            max_precision: p.max_precision,
            max_restarts: p.max_restarts,
            max_tubes: p.max_tubes,
        };
        let raw = RawProblem {
            variables: self.variables.clone(),
            system,
            parametric,
            start_point: nums(&self.start_point),
            region_d: RawRegion {
                lo: nums(self.region.lo()),
                hi: nums(self.region.hi()),
            },
            projection: self.projection.as_ref().map(|m| m.rows().iter().map(|r| nums(r)).collect()),
            params: (p != &ParamOverrides::default()).then_some(params),
        };
        serde_json::to_string_pretty(&raw).expect("plain data serializes")
    }

    /// Names of the tracked coordinates, with `T` last for parametric input.
    pub fn lifted_variables(&self) -> Vec<String> {
        let mut names = self.variables.clone();
        if matches!(self.curve, CurveSpec::Parametric(_)) {
            names.push("T".into());
        }
        names
    }

    /// The implicit system that is tracked.
    pub fn system(&self) -> Result<PolySystem> {
        match &self.curve {
            CurveSpec::System(eqs) => PolySystem::new(eqs.clone()),
            CurveSpec::Parametric(gamma) => parametric_to_implicit(gamma),
        }
    }

    pub fn track_params(&self) -> Result<TrackParams> {
        self.params.apply(TrackParams::default())
    }
}

fn parse_in_t(text: &str) -> Result<Polynomial> {
    parse_polynomial(text, &["T".to_string()]).or_else(|e| parse_polynomial(text, &["t".to_string()]).map_err(|_| e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBIC: &str = r#"{
        "variables": ["x", "y"],
        "system": ["x^3 - 2.7*x - y^2 + 2"],
        "start_point": ["1", "0.5477"],
        "region_d": {"lo": [-3, -3], "hi": [3, 3]},
        "params": {"rho": "1/8"}
    }"#;

    #[test]
    fn decimals_are_exact() {
        let p = ProblemFile::from_json(CUBIC).unwrap();
        let CurveSpec::System(eqs) = &p.curve else { panic!() };
        let c = eqs[0].terms().find(|(e, _)| e == &[1, 0]).unwrap().1.clone();
        assert_eq!(c, Rational::from((-27, 10)));
        assert_eq!(p.start_point[1], Rational::from((5477, 10000)));
        assert_eq!(p.params.rho, Some(Rational::from((1, 8))));
    }

    #[test]
    fn round_trip() {
        let p = ProblemFile::from_json(CUBIC).unwrap();
        let again = ProblemFile::from_json(&p.to_json()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn parametric_input_is_lifted() {
        let p = ProblemFile::from_json(
            r#"{"variables": ["x", "y"], "parametric": ["T^2", "T^3"], "start_point": ["1/2"],
                "region_d": {"lo": [-2, -2, -2], "hi": [2, 2, 2]}, "projection": [[1, 0], [0, 1]]}"#,
        )
        .unwrap();
        let s = p.system().unwrap();
        assert_eq!((s.len(), s.nvars()), (2, 3));
        assert_eq!(p.start_point, vec![Rational::from((1, 4)), Rational::from((1, 8)), Rational::from((1, 2))]);
        assert_eq!(p.projection.as_ref().unwrap().rows()[0].len(), 3);
        assert_eq!(ProblemFile::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn malformed_input() {
        let bad_exp = CUBIC.replace("y^2", "y^-1");
        assert!(matches!(ProblemFile::from_json(&bad_exp), Err(Error::Parse { .. })));
        let both = CUBIC.replace("\"system\"", "\"parametric\": [\"T\", \"T\"], \"system\"");
        assert!(ProblemFile::from_json(&both).is_err());
        let syntax = ProblemFile::from_json("{\n  \"variables\": [\"x\",\n}").unwrap_err();
        assert!(matches!(syntax, Error::Parse { line: 3, .. }), "{syntax:?}");
        let short = CUBIC.replace("[\"1\", \"0.5477\"]", "[\"1\"]");
        assert!(matches!(ProblemFile::from_json(&short), Err(Error::DimensionMismatch { .. })));
    }
}
