//! JSON interchange. All indices in these types are 1-based.
//!
//! ```json
//! {"n": 3, "rows": ["010", "101", "001"]}
//! {"n": 3, "rows": [...], "kind": "arbitrary", "alpha": 0.5, "seed": 7, "target": {"n": 3, "rows": [...]}}
//! {"model": "simple", "ops": [{"dir": "L", "rows": [1, 2], "cols": [2, 3]}]}
//! {"model": "general", "ops": [{"rows0": [1], "cols0": [5], "moves": [{"row_dest": [1], "col_dest": [1]}]}]}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::{GeneralOp, Move, PlanMetrics};
use crate::decompose::StrategyReport;
use crate::gale_ryser::DegreeSpec;
use crate::geometry::{Geometry, GeometryError};
use crate::instance::{Goal, InstanceError, ProblemInstance, ProblemKind};
use crate::ops::{Direction, OpError, Plan, ShiftOp};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("declared side {declared} but found {found} rows")]
    SideMismatch { declared: usize, found: usize },
    #[error("unknown direction {0:?}")]
    Direction(String),
    #[error("indices are 1-based; found 0")]
    ZeroIndex,
    #[error("{kind} instance {detail}")]
    Target { kind: &'static str, detail: &'static str },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub n: usize,
    pub rows: Vec<String>,
}

impl GeometryFile {
    pub fn from_geometry(g: &Geometry) -> Self {
        Self {
            n: g.n(),
            rows: g.to_row_strings(),
        }
    }

    pub fn to_geometry(&self) -> Result<Geometry, FormatError> {
        if self.rows.len() != self.n {
            return Err(FormatError::SideMismatch {
                declared: self.n,
                found: self.rows.len(),
            });
        }
        Ok(Geometry::parse_rows(&self.rows)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub rows: Vec<String>,
    pub kind: String,
    pub alpha: f64,
    pub seed: u64,
    pub target: Option<GeometryFile>,
}

impl InstanceFile {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let g = GeometryFile::from_geometry(inst.initial());
        Self {
            n: g.n,
            rows: g.rows,
            kind: inst.kind().as_str().to_string(),
            alpha: inst.alpha(),
            seed: inst.seed(),
            target: inst.target().map(GeometryFile::from_geometry),
        }
    }

    pub fn to_instance(&self) -> Result<ProblemInstance, FormatError> {
        let initial = GeometryFile {
            n: self.n,
            rows: self.rows.clone(),
        }
        .to_geometry()?;
        let goal = match (self.kind.parse::<ProblemKind>()?, &self.target) {
            (ProblemKind::Grid, None) => Goal::Grid,
            (ProblemKind::Arbitrary, Some(t)) => Goal::Arbitrary(t.to_geometry()?),
            (ProblemKind::Grid, Some(_)) => {
                return Err(FormatError::Target { kind: "grid", detail: "must not carry a target" })
            }
            (ProblemKind::Arbitrary, None) => {
                return Err(FormatError::Target { kind: "arbitrary", detail: "needs a target" })
            }
        };
        Ok(ProblemInstance::new(initial, goal, self.alpha, self.seed)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleOpJson {
    pub dir: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveJson {
    pub row_dest: Vec<usize>,
    pub col_dest: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralOpJson {
    pub rows0: Vec<usize>,
    pub cols0: Vec<usize>,
    pub moves: Vec<MoveJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum PlanFile {
    Simple { ops: Vec<SimpleOpJson> },
    General { ops: Vec<GeneralOpJson> },
}

/// A parsed plan in either model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedPlan {
    Simple(Plan),
    General(Vec<GeneralOp>),
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

fn zero_based(v: &[usize]) -> Result<Vec<usize>, FormatError> {
    v.iter().map(|&x| x.checked_sub(1).ok_or(FormatError::ZeroIndex)).collect()
}

impl PlanFile {
    pub fn from_plan(plan: &Plan) -> Self {
        PlanFile::Simple {
            ops: plan
                .ops()
                .iter()
                .map(|op| SimpleOpJson {
                    dir: op.direction().letter().to_string(),
                    rows: one_based(op.rows()),
                    cols: one_based(op.cols()),
                })
                .collect(),
        }
    }

    pub fn from_general(gops: &[GeneralOp]) -> Self {
        PlanFile::General {
            ops: gops
                .iter()
                .map(|g| GeneralOpJson {
                    rows0: one_based(&g.rows0),
                    cols0: one_based(&g.cols0),
                    moves: g
                        .moves
                        .iter()
                        .map(|m| MoveJson {
                            row_dest: one_based(&m.row_dest),
                            col_dest: one_based(&m.col_dest),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn load(&self) -> Result<LoadedPlan, FormatError> {
        match self {
            PlanFile::Simple { ops } => ops
                .iter()
                .map(|op| {
                    let mut chars = op.dir.chars();
                    let dir = match (chars.next().and_then(Direction::from_letter), chars.next()) {
                        (Some(d), None) => d,
                        _ => return Err(FormatError::Direction(op.dir.clone())),
                    };
                    Ok(ShiftOp::new(dir, zero_based(&op.rows)?, zero_based(&op.cols)?)?)
                })
                .collect::<Result<Plan, _>>()
                .map(LoadedPlan::Simple),
            PlanFile::General { ops } => ops
                .iter()
                .map(|g| {
                    Ok(GeneralOp {
                        rows0: zero_based(&g.rows0)?,
                        cols0: zero_based(&g.cols0)?,
                        moves: g
                            .moves
                            .iter()
                            .map(|m| {
                                Ok(Move {
                                    row_dest: zero_based(&m.row_dest)?,
                                    col_dest: zero_based(&m.col_dest)?,
                                })
                            })
                            .collect::<Result<_, FormatError>>()?,
                    })
                })
                .collect::<Result<_, _>>()
                .map(LoadedPlan::General),
        }
    }
}

/// Planner output record: strategy, fallbacks and the plan's metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportFile {
    pub strategy: String,
    pub fallbacks: Vec<String>,
    pub ops: usize,
    pub metrics: PlanMetrics,
}

impl ReportFile {
    pub fn new(report: &StrategyReport, metrics: PlanMetrics) -> Self {
        Self {
            strategy: report.strategy_used.as_str().to_string(),
            fallbacks: report.fallbacks_tried.iter().map(|s| s.as_str().to_string()).collect(),
            ops: metrics.op_count,
            metrics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSpecFile {
    #[serde(rename = "R")]
    pub rows: Vec<usize>,
    #[serde(rename = "C")]
    pub cols: Vec<usize>,
}

impl DegreeSpecFile {
    pub fn from_spec(spec: &DegreeSpec) -> Self {
        Self {
            rows: spec.rows().to_vec(),
            cols: spec.cols().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_instance;

    #[test]
    fn instance_round_trip() {
        for kind in [ProblemKind::Grid, ProblemKind::Arbitrary] {
            let inst = generate_instance(7, 0.4, 11, kind).unwrap();
            let text = serde_json::to_string(&InstanceFile::from_instance(&inst)).unwrap();
            let back: InstanceFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_instance().unwrap(), inst);
        }
    }

    #[test]
    fn plan_round_trip_is_one_based() {
        let op = ShiftOp::new(Direction::Right, vec![0, 2], vec![1]).unwrap();
        let plan = Plan::from(vec![op]);
        let text = serde_json::to_string(&PlanFile::from_plan(&plan)).unwrap();
        assert_eq!(text, r#"{"model":"simple","ops":[{"dir":"R","rows":[1,3],"cols":[2]}]}"#);
        let back: PlanFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.load().unwrap(), LoadedPlan::Simple(plan));
    }

    #[test]
    fn general_plan_parses() {
        let text = r#"{"model":"general","ops":[{"rows0":[1],"cols0":[5],"moves":[{"row_dest":[1],"col_dest":[1]}]}]}"#;
        let file: PlanFile = serde_json::from_str(text).unwrap();
        let LoadedPlan::General(gops) = file.load().unwrap() else { panic!("wrong model") };
        assert_eq!(gops[0].moves[0].col_dest, [0]);
        assert_eq!(PlanFile::from_general(&gops), file);
    }

    #[test]
    fn rejects_bad_plans_and_instances() {
        let bad: PlanFile = serde_json::from_str(r#"{"model":"simple","ops":[{"dir":"X","rows":[1],"cols":[1]}]}"#).unwrap();
        assert!(matches!(bad.load(), Err(FormatError::Direction(_))));
        let zero: PlanFile = serde_json::from_str(r#"{"model":"simple","ops":[{"dir":"L","rows":[0],"cols":[1]}]}"#).unwrap();
        assert!(matches!(zero.load(), Err(FormatError::ZeroIndex)));
        let short = GeometryFile { n: 3, rows: vec!["101".into()] };
        assert!(matches!(short.to_geometry(), Err(FormatError::SideMismatch { .. })));
        let f = InstanceFile { n: 2, rows: vec!["10".into(), "00".into()], kind: "arbitrary".into(), alpha: 0.5, seed: 0, target: None };
        assert!(matches!(f.to_instance(), Err(FormatError::Target { .. })));
    }
}
