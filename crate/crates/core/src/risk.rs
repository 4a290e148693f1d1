//! Scalar monetary risk measures on finite spaces and their coordinatewise
//! assembly into a vector risk measure.
//!
//! Sign convention: `risk(xi)` is the capital that must be added to `xi` to
//! make it acceptable, so `risk(c) = -c` for constants. Distortion risk is
//! `-int_0^1 F^{-1}(t) d g~(t)` with dual `g~(t) = 1 - g(1 - t)`; AVaR at level
//! `alpha` is the distortion `g(t) = max(0, (t - 1 + alpha) / alpha)`.

use crate::error::{Error, Result};
use crate::prob::{ProbSpace, QuantileFunction, RandomVariable, RandomVector};

const DENSITY_MEAN_TOL: f64 = 1e-9;

/// Piecewise-linear distortion `g` on [0, 1] given by its knots.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionFunction {
    knots: Vec<(f64, f64)>,
}

impl DistortionFunction {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidDistortion(m.to_string()));
        if knots.len() < 2 {
            return bad("need at least the knots (0,0) and (1,1)");
        }
        if knots[0] != (0.0, 0.0) {
            return bad("g(0) must be 0");
        }
        if *knots.last().unwrap() != (1.0, 1.0) {
            return bad("g(1) must be 1");
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("knot abscissae must be strictly increasing");
            }
            if w[1].1 < w[0].1 {
                return bad("g must be nondecreasing");
            }
        }
        Ok(Self { knots })
    }

    pub fn identity() -> Self {
        Self {
            knots: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// g(t), clamped to [0, 1] outside the unit interval.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let k = self.knots.partition_point(|&(s, _)| s <= t);
        let (t0, g0) = self.knots[k - 1];
        let (t1, g1) = self.knots[k];
        g0 + (g1 - g0) * (t - t0) / (t1 - t0)
    }

    /// Dual distortion g~(t) = 1 - g(1 - t).
    pub fn dual(&self, t: f64) -> f64 {
        1.0 - self.eval(1.0 - t)
    }

    /// True when g~ is concave (equivalently g convex), which makes the
    /// distortion risk measure coherent.
    pub fn dual_is_concave(&self) -> bool {
        let slopes: Vec<f64> = self
            .knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        slopes.windows(2).all(|s| s[1] >= s[0] - 1e-12)
    }
}

/// The distortion whose risk equals AVaR at level `alpha`.
pub fn avar_distortion(alpha: f64) -> Result<DistortionFunction> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(DistortionFunction::identity());
    }
    DistortionFunction::new(vec![(0.0, 0.0), (1.0 - alpha, 0.0), (1.0, 1.0)])
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

/// One density of a finite dual family together with its penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityScenario {
    pub density: RandomVariable,
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RiskSpec {
    EssInf,
    NegExpectation,
    AVaR { alpha: f64 },
    Distortion(DistortionFunction),
    ScenarioMax(Vec<DensityScenario>),
}

impl RiskSpec {
    pub fn avar(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(RiskSpec::AVaR { alpha })
    }

    /// Checks the invariants that depend on the probability space.
    pub fn validate(&self, sp: &ProbSpace) -> Result<()> {
        match self {
            RiskSpec::AVaR { alpha } => check_alpha(*alpha),
            RiskSpec::ScenarioMax(scenarios) => {
                if scenarios.is_empty() {
                    return Err(Error::EmptyScenarioSet);
                }
                for s in scenarios {
                    s.density.check_len(sp)?;
                    if let Some(index) = s.density.values().iter().position(|&z| z < 0.0) {
                        return Err(Error::NegativeDensity { index });
                    }
                    let mean: f64 = s
                        .density
                        .values()
                        .iter()
                        .zip(sp.probs())
                        .map(|(z, p)| z * p)
                        .sum();
                    if (mean - 1.0).abs() > DENSITY_MEAN_TOL {
                        return Err(Error::InvalidDensity(format!(
                            "density has mean {mean}, expected 1"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_law_invariant(&self) -> bool {
        !matches!(self, RiskSpec::ScenarioMax(_))
    }

    pub fn is_convex(&self) -> bool {
        match self {
            RiskSpec::Distortion(g) => g.dual_is_concave(),
            _ => true,
        }
    }

    /// Convex and positively homogeneous.
    pub fn is_coherent(&self) -> bool {
        match self {
            RiskSpec::ScenarioMax(s) => s.iter().all(|s| s.penalty == 0.0),
            other => other.is_convex(),
        }
    }

    /// Risk of the random variable with `values[i]` on an atom of mass
    /// `probs[i]`. For `ScenarioMax` the slices must be indexed by the atoms of
    /// the space the densities live on.
    pub fn eval(&self, values: &[f64], probs: &[f64]) -> f64 {
        match self {
            RiskSpec::EssInf => -values.iter().copied().fold(f64::INFINITY, f64::min),
            RiskSpec::NegExpectation => -QuantileFunction::from_law(values, probs).mean(),
            RiskSpec::AVaR { alpha } => avar_of(&QuantileFunction::from_law(values, probs), *alpha),
            RiskSpec::Distortion(g) => distortion_of(&QuantileFunction::from_law(values, probs), g),
            RiskSpec::ScenarioMax(scenarios) => scenarios
                .iter()
                .map(|s| {
                    let weighted: f64 = values
                        .iter()
                        .zip(probs)
                        .zip(s.density.values())
                        .map(|((v, p), z)| -p * z * v)
                        .sum();
                    weighted - s.penalty
                })
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn risk(&self, xi: &RandomVariable, sp: &ProbSpace) -> Result<f64> {
        xi.check_len(sp)?;
        Ok(self.eval(xi.values(), sp.probs()))
    }
}

fn avar_of(q: &QuantileFunction, alpha: f64) -> f64 {
    let mut acc = 0.0;
    for (v, lo, hi) in q.steps() {
        if lo >= alpha {
            break;
        }
        let w = (hi.min(alpha) - lo) / alpha;
        acc += v * w;
    }
    -acc
}

fn distortion_of(q: &QuantileFunction, g: &DistortionFunction) -> f64 {
    -q.steps()
        .map(|(v, lo, hi)| v * (g.dual(hi) - g.dual(lo)))
        .sum::<f64>()
}

pub fn ess_inf_risk(xi: &RandomVariable, sp: &ProbSpace) -> Result<f64> {
    RiskSpec::EssInf.risk(xi, sp)
}

pub fn neg_expectation_risk(xi: &RandomVariable, sp: &ProbSpace) -> Result<f64> {
    RiskSpec::NegExpectation.risk(xi, sp)
}

pub fn avar_risk(xi: &RandomVariable, sp: &ProbSpace, alpha: f64) -> Result<f64> {
    RiskSpec::avar(alpha)?.risk(xi, sp)
}

pub fn distortion_risk(xi: &RandomVariable, sp: &ProbSpace, g: &DistortionFunction) -> Result<f64> {
    xi.check_len(sp)?;
    Ok(distortion_of(&QuantileFunction::from_law(xi.values(), sp.probs()), g))
}

pub fn scenario_max_risk(
    xi: &RandomVariable,
    sp: &ProbSpace,
    scenarios: &[DensityScenario],
) -> Result<f64> {
    let spec = RiskSpec::ScenarioMax(scenarios.to_vec());
    spec.validate(sp)?;
    spec.risk(xi, sp)
}

/// One scalar risk measure per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorRiskSpec {
    components: Vec<RiskSpec>,
}

impl VectorRiskSpec {
    pub fn new(components: Vec<RiskSpec>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParams("vector risk needs at least one component".into()));
        }
        Ok(Self { components })
    }

    pub fn uniform(spec: RiskSpec, d: usize) -> Self {
        Self {
            components: vec![spec; d.max(1)],
        }
    }

    pub fn components(&self) -> &[RiskSpec] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn validate(&self, sp: &ProbSpace) -> Result<()> {
        self.components.iter().try_for_each(|c| c.validate(sp))
    }

    pub fn is_law_invariant(&self) -> bool {
        self.components.iter().all(RiskSpec::is_law_invariant)
    }

    pub fn is_convex(&self) -> bool {
        self.components.iter().all(RiskSpec::is_convex)
    }

    pub fn is_coherent(&self) -> bool {
        self.components.iter().all(RiskSpec::is_coherent)
    }

    /// Risk vector of the law `(points[k], probs[k])`; `points` is row-major,
    /// `dim` coordinates per entry.
    pub fn eval_rows(&self, points: &[f64], probs: &[f64], scratch: &mut Vec<f64>) -> Vec<f64> {
        let d = self.components.len();
        let n = probs.len();
        self.components
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                scratch.clear();
                scratch.extend((0..n).map(|k| points[k * d + i]));
                spec.eval(scratch, probs)
            })
            .collect()
    }
}

pub fn vector_risk(xi: &RandomVector, sp: &ProbSpace, spec: &VectorRiskSpec) -> Result<Vec<f64>> {
    xi.check_len(sp)?;
    if xi.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: xi.dim(),
        });
    }
    Ok((0..spec.dim())
        .map(|i| spec.components[i].eval(xi.column(i).values(), sp.probs()))
        .collect())
}
