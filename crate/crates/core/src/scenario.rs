//! JSON scenario files.

use serde::{Deserialize, Serialize};

use crate::engine::{EngineMode, EngineParams, PortfolioSpec, Scenario, DEFAULT_SELECTION_CAP};
use crate::error::{Error, Result};
use crate::geom::{LowerSet, Primitive, RandomLowerSet, Window};
use crate::prob::{ProbSpace, RandomVariable, RandomVector};
use crate::risk::{DensityScenario, DistortionFunction, RiskSpec, VectorRiskSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub space: Vec<f64>,
    pub dimension: usize,
    pub risk: Vec<RiskFile>,
    pub portfolio: PortfolioFile,
    pub engine: EngineFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RiskFile {
    Essinf,
    NegExpectation,
    Avar { alpha: f64 },
    Distortion { knots: Vec<(f64, f64)> },
    ScenarioMax { scenarios: Vec<DensityFile> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    pub density: Vec<f64>,
    #[serde(default)]
    pub penalty: f64,
}

/// `c` may be omitted for the zero capital position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PortfolioFile {
    FixedCost {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Vec<Vec<f64>>>,
        kappa: f64,
    },
    Halfspace {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Vec<Vec<f64>>>,
        t: f64,
    },
    FiniteTransfers {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<Vec<Vec<f64>>>,
        m: Vec<Vec<f64>>,
    },
    Custom { atoms: Vec<Vec<PrimitiveFile>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PrimitiveFile {
    Orthant(Vec<f64>),
    Halfspace { normal: Vec<f64>, offset: f64 },
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineFile {
    pub grid_step: f64,
    pub window: [[f64; 2]; 2],
    #[serde(default = "default_cap")]
    pub selection_cap: u64,
    #[serde(default)]
    pub mode: ModeFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

fn default_cap() -> u64 {
    DEFAULT_SELECTION_CAP
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFile {
    #[default]
    General,
    Partition,
}

fn at<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema(m) => Error::Schema(format!("{key}.{m}")),
        other => Error::Schema(format!("{key}: {other}")),
    })
}

impl RiskFile {
    fn to_spec(&self) -> Result<RiskSpec> {
        Ok(match self {
            RiskFile::Essinf => RiskSpec::EssInf,
            RiskFile::NegExpectation => RiskSpec::NegExpectation,
            RiskFile::Avar { alpha } => RiskSpec::avar(*alpha)?,
            RiskFile::Distortion { knots } => RiskSpec::Distortion(DistortionFunction::new(knots.clone())?),
            RiskFile::ScenarioMax { scenarios } => RiskSpec::ScenarioMax(
                scenarios
                    .iter()
                    .map(|s| DensityScenario {
                        density: RandomVariable::new(s.density.clone()),
                        penalty: s.penalty,
                    })
                    .collect(),
            ),
        })
    }

    fn from_spec(r: &RiskSpec) -> Self {
        match r {
            RiskSpec::EssInf => RiskFile::Essinf,
            RiskSpec::NegExpectation => RiskFile::NegExpectation,
            RiskSpec::AVaR { alpha } => RiskFile::Avar { alpha: *alpha },
            RiskSpec::Distortion(g) => RiskFile::Distortion {
                knots: g.knots().to_vec(),
            },
            RiskSpec::ScenarioMax(s) => RiskFile::ScenarioMax {
                scenarios: s
                    .iter()
                    .map(|s| DensityFile {
                        density: s.density.values().to_vec(),
                        penalty: s.penalty,
                    })
                    .collect(),
            },
        }
    }
}

fn capital(c: &Option<Vec<Vec<f64>>>, atoms: usize, d: usize) -> Result<RandomVector> {
    let c = match c {
        Some(rows) => RandomVector::new(rows.clone())?,
        None => return Ok(RandomVector::deterministic(&vec![0.0; d], atoms)),
    };
    if c.atoms() != atoms {
        return Err(Error::DimensionMismatch {
            expected: atoms,
            got: c.atoms(),
        });
    }
    if c.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: c.dim(),
        });
    }
    Ok(c)
}

fn rows_of(c: &RandomVector) -> Option<Vec<Vec<f64>>> {
    if c.rows().iter().flatten().all(|v| *v == 0.0) {
        None
    } else {
        Some(c.rows().to_vec())
    }
}

impl PortfolioFile {
    fn to_spec(&self, atoms: usize, d: usize) -> Result<PortfolioSpec> {
        Ok(match self {
            PortfolioFile::FixedCost { c, kappa } => {
                if !(*kappa > 0.0) {
                    return Err(Error::Schema("kappa: must be positive".into()));
                }
                PortfolioSpec::FixedCost {
                    c: at("c", capital(c, atoms, d))?,
                    kappa: *kappa,
                }
            }
            PortfolioFile::Halfspace { c, t } => PortfolioSpec::HalfSpaceTransfer {
                c: at("c", capital(c, atoms, d))?,
                t: *t,
            },
            PortfolioFile::FiniteTransfers { c, m } => {
                if m.is_empty() {
                    return Err(Error::Schema("m: must be nonempty".into()));
                }
                PortfolioSpec::FiniteTransfers {
                    c: at("c", capital(c, atoms, d))?,
                    m: m.clone(),
                }
            }
            PortfolioFile::Custom { atoms: sets } => {
                if sets.len() != atoms {
                    return Err(Error::Schema(format!(
                        "atoms: expected {atoms} realisations, got {}",
                        sets.len()
                    )));
                }
                let sets = sets
                    .iter()
                    .map(|prims| {
                        let prims = prims
                            .iter()
                            .map(|p| match p {
                                PrimitiveFile::Orthant(a) => Ok(Primitive::Orthant(a.clone())),
                                PrimitiveFile::Halfspace { normal, offset } => {
                                    Primitive::half_space(normal.clone(), *offset)
                                }
                                PrimitiveFile::Full => Ok(Primitive::Full),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        LowerSet::new(d, prims)
                    })
                    .collect::<Result<Vec<_>>>();
                PortfolioSpec::Custom(RandomLowerSet::new(at("atoms", sets)?)?)
            }
        })
    }

    fn from_spec(p: &PortfolioSpec) -> Self {
        match p {
            PortfolioSpec::FixedCost { c, kappa } => PortfolioFile::FixedCost {
                c: rows_of(c),
                kappa: *kappa,
            },
            PortfolioSpec::HalfSpaceTransfer { c, t } => PortfolioFile::Halfspace { c: rows_of(c), t: *t },
            PortfolioSpec::FiniteTransfers { c, m } => PortfolioFile::FiniteTransfers {
                c: rows_of(c),
                m: m.clone(),
            },
            PortfolioSpec::Custom(x) => PortfolioFile::Custom {
                atoms: x
                    .sets()
                    .iter()
                    .map(|s| {
                        s.primitives()
                            .iter()
                            .map(|p| match p {
                                Primitive::Orthant(a) => PrimitiveFile::Orthant(a.clone()),
                                Primitive::HalfSpace { normal, offset } => PrimitiveFile::Halfspace {
                                    normal: normal.clone(),
                                    offset: *offset,
                                },
                                Primitive::Full => PrimitiveFile::Full,
                            })
                            .collect()
                    })
                    .collect(),
            },
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Validates the file and builds the in-memory scenario. Error messages
    /// name the offending key.
    pub fn to_scenario(&self) -> Result<Scenario> {
        let space = at("space", ProbSpace::new(self.space.clone()))?;
        let d = self.dimension;
        if d == 0 {
            return Err(Error::Schema("dimension: must be at least 1".into()));
        }
        if self.risk.len() != d {
            return Err(Error::Schema(format!(
                "risk: expected {d} components, got {}",
                self.risk.len()
            )));
        }
        let comps = self
            .risk
            .iter()
            .enumerate()
            .map(|(i, r)| at(&format!("risk[{i}]"), r.to_spec()))
            .collect::<Result<Vec<_>>>()?;
        let risk = VectorRiskSpec::new(comps)?;
        at("risk", risk.validate(&space))?;
        let portfolio = at("portfolio", self.portfolio.to_spec(space.atoms(), d))?;
        let e = &self.engine;
        let window = at(
            "engine.window",
            Window::new((e.window[0][0], e.window[0][1]), (e.window[1][0], e.window[1][1])),
        )?;
        let engine = EngineParams {
            grid_step: e.grid_step,
            window,
            selection_cap: e.selection_cap,
            mode: match e.mode {
                ModeFile::General => EngineMode::General,
                ModeFile::Partition => EngineMode::Partition,
            },
            margin: e.margin,
        };
        at("engine", engine.validate())?;
        at("scenario", Scenario::new(space, risk, portfolio, engine))
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        let w = sc.engine.window;
        Self {
            space: sc.space.probs().to_vec(),
            dimension: sc.dim,
            risk: sc.risk.components().iter().map(RiskFile::from_spec).collect(),
            portfolio: PortfolioFile::from_spec(&sc.portfolio),
            engine: EngineFile {
                grid_step: sc.engine.grid_step,
                window: [[w.x.0, w.x.1], [w.y.0, w.y.1]],
                selection_cap: sc.engine.selection_cap,
                mode: match sc.engine.mode {
                    EngineMode::General => ModeFile::General,
                    EngineMode::Partition => ModeFile::Partition,
                },
                margin: sc.engine.margin,
            },
        }
    }
}

pub fn load_scenario(text: &str) -> Result<Scenario> {
    ScenarioFile::parse(text)?.to_scenario()
}

pub fn scenario_to_json(sc: &Scenario) -> String {
    ScenarioFile::from_scenario(sc).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXED_COST: &str = r#"{
        "space": [0.5, 0.5],
        "dimension": 2,
        "risk": [{"kind": "avar", "alpha": 0.75}, {"kind": "avar", "alpha": 0.75}],
        "portfolio": {"kind": "fixed_cost", "kappa": 1.0},
        "engine": {"grid_step": 0.5, "window": [[-2, 2], [-2, 2]]}
    }"#;

    #[test]
    fn parses_fixed_cost() {
        let sc = load_scenario(FIXED_COST).unwrap();
        assert_eq!(sc.dim, 2);
        assert_eq!(sc.engine.selection_cap, DEFAULT_SELECTION_CAP);
        assert_eq!(sc.engine.mode, EngineMode::General);
        match &sc.portfolio {
            PortfolioSpec::FixedCost { c, kappa } => {
                assert_eq!(*kappa, 1.0);
                assert_eq!(c.rows(), &[vec![0.0, 0.0], vec![0.0, 0.0]]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trips() {
        let sc = load_scenario(FIXED_COST).unwrap();
        let again = load_scenario(&scenario_to_json(&sc)).unwrap();
        assert_eq!(sc, again);
        let custom = r#"{
            "space": [0.25, 0.75], "dimension": 2,
            "risk": [{"kind": "essinf"}, {"kind": "scenario_max", "scenarios": [{"density": [2, 0.6666666666666666], "penalty": 0.5}]}],
            "portfolio": {"kind": "custom", "atoms": [[{"orthant": [0, 1]}, {"halfspace": {"normal": [1, 1], "offset": -1}}], ["full"]]},
            "engine": {"grid_step": 0.25, "window": [[-1, 1], [-1, 1]], "mode": "partition", "selection_cap": 10}
        }"#;
        let sc = load_scenario(custom).unwrap();
        assert_eq!(load_scenario(&scenario_to_json(&sc)).unwrap(), sc);
    }

    #[test]
    fn errors_name_the_key() {
        let bad = FIXED_COST.replace("[0.5, 0.5]", "[0.5, 0.6]");
        let e = load_scenario(&bad).unwrap_err().to_string();
        assert!(e.contains("space"), "{e}");
        let bad = FIXED_COST.replace("\"kappa\"", "\"kapa\"");
        let e = load_scenario(&bad).unwrap_err().to_string();
        assert!(e.contains("kapa"), "{e}");
        let bad = FIXED_COST.replace("\"grid_step\"", "\"extra\": 1, \"grid_step\"");
        let e = load_scenario(&bad).unwrap_err().to_string();
        assert!(e.contains("extra"), "{e}");
        let bad = FIXED_COST.replace("0.75}, {", "1.5}, {");
        let e = load_scenario(&bad).unwrap_err().to_string();
        assert!(e.contains("risk[0]"), "{e}");
        let bad = FIXED_COST.replace("\"grid_step\": 0.5", "\"grid_step\": 0");
        let e = load_scenario(&bad).unwrap_err().to_string();
        assert!(e.contains("engine"), "{e}");
    }
}
