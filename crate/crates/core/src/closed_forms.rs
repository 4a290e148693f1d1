//! Exact risk sets for the portfolio families that admit them.

use std::str::FromStr;

use crate::engine::{selection_risk, EngineMode, PortfolioSpec, Scenario};
use crate::error::{Error, Result};
use crate::geom::{fixed_points, grid_points, negate, CurvedPart, LowerSet, RandomLowerSet, RiskSet, UpperHalfSpace};
use crate::prob::{ProbSpace, RandomVariable, RandomVector};
use crate::risk::{avar_distortion, vector_risk, DistortionFunction, RiskSpec, VectorRiskSpec};

pub const DEFAULT_BETA_STEP: f64 = 0.01;

/// `-H_s = {y : y_1 + ... + y_d >= -s}`.
pub fn neg_sum_half_space(d: usize, s: f64) -> RiskSet {
    RiskSet::from_parts(
        d,
        Vec::new(),
        vec![UpperHalfSpace {
            normal: vec![1.0 / d as f64; d],
            level: -s / d as f64,
        }],
    )
}

fn total_payoff(c: &RandomVector) -> RandomVariable {
    c.total()
}

fn require_convex(r: &RiskSpec) -> Result<()> {
    if !r.is_convex() {
        return Err(Error::NonConvexRisk(format!("{r:?}")));
    }
    Ok(())
}

/// `rho_s(C + H_t)` when every component is the same convex `r`:
/// `-H_{t - d r(D/d)}`.
pub fn ht_identical(c: &RandomVector, t: f64, r: &RiskSpec, sp: &ProbSpace) -> Result<RiskSet> {
    require_convex(r)?;
    r.validate(sp)?;
    c.check_len(sp)?;
    let d = c.dim();
    let dd = total_payoff(c).map(|v| v / d as f64);
    Ok(neg_sum_half_space(d, t - d as f64 * r.risk(&dd, sp)?))
}

/// One component is the essential infimum, the remaining `d - 1` are the
/// same convex `r`: `-H_{t - (d-1) r(D/(d-1))}`.
pub fn ht_essinf_mixed(c: &RandomVector, t: f64, r: &RiskSpec, sp: &ProbSpace) -> Result<RiskSet> {
    require_convex(r)?;
    r.validate(sp)?;
    c.check_len(sp)?;
    let d = c.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let k = (d - 1) as f64;
    let dk = total_payoff(c).map(|v| v / k);
    Ok(neg_sum_half_space(d, t - k * r.risk(&dk, sp)?))
}

/// One component is the negative expectation and the others dominate it:
/// `-H_{t + E D}`. The domination `r >= -E` is checked on the columns of
/// `C`, on `D` and on their negatives.
pub fn ht_expectation_mixed(c: &RandomVector, t: f64, others: &[RiskSpec], sp: &ProbSpace) -> Result<RiskSet> {
    c.check_len(sp)?;
    let d = c.dim();
    let mut probes: Vec<RandomVariable> = (0..d).map(|i| c.column(i)).collect();
    probes.push(c.total());
    let neg: Vec<RandomVariable> = probes.iter().map(|v| v.map(|x| -x)).collect();
    probes.extend(neg);
    for r in others {
        r.validate(sp)?;
        for v in &probes {
            let mean = crate::prob::expectation(v, sp)?;
            if r.risk(v, sp)? < -mean - 1e-12 {
                return Err(Error::PreconditionViolated(format!(
                    "{r:?} does not dominate the negative expectation"
                )));
            }
        }
    }
    let ed = crate::prob::expectation(&c.total(), sp)?;
    Ok(neg_sum_half_space(d, t + ed))
}

/// Picks whichever half-space formula the vector risk measure qualifies for.
pub fn ht_closed_form(c: &RandomVector, t: f64, spec: &VectorRiskSpec, sp: &ProbSpace) -> Result<RiskSet> {
    if spec.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: c.dim(),
        });
    }
    let comps = spec.components();
    if comps.iter().all(|r| r == &comps[0]) && comps[0].is_convex() {
        return ht_identical(c, t, &comps[0], sp);
    }
    if let Some(i) = comps.iter().position(|r| r == &RiskSpec::EssInf) {
        let rest: Vec<&RiskSpec> = comps.iter().enumerate().filter(|(j, _)| *j != i).map(|p| p.1).collect();
        if rest.iter().all(|r| *r == rest[0]) && rest[0].is_convex() {
            return ht_essinf_mixed(c, t, rest[0], sp);
        }
    }
    if let Some(i) = comps.iter().position(|r| r == &RiskSpec::NegExpectation) {
        let rest: Vec<RiskSpec> = comps.iter().enumerate().filter(|(j, _)| *j != i).map(|p| p.1.clone()).collect();
        return ht_expectation_mixed(c, t, &rest, sp);
    }
    Err(Error::PreconditionViolated(
        "no closed form for this combination of risk measures".into(),
    ))
}

/// `rho_s(C + H_t)`, by closed form when available and by enumeration
/// otherwise.
fn ht_risk(sc: &Scenario, c: &RandomVector, t: f64) -> Result<RiskSet> {
    match ht_closed_form(c, t, &sc.risk, &sc.space) {
        Ok(r) => Ok(r),
        Err(Error::PreconditionViolated(_)) | Err(Error::NonConvexRisk(_)) => {
            let sub = Scenario::new(
                sc.space.clone(),
                sc.risk.clone(),
                PortfolioSpec::HalfSpaceTransfer { c: c.clone(), t },
                sc.engine.clone().with_mode(EngineMode::General),
            )?;
            selection_risk(&sub)
        }
        Err(e) => Err(e),
    }
}

/// Bounds `(rho(C) - I_kappa) U rho_s(C + H_-kappa)` and `rho_s(C + H_0)`
/// for the fixed-cost portfolio `C + I_kappa`.
pub fn ikappa_bounds(sc: &Scenario) -> Result<(RiskSet, RiskSet)> {
    let (c, kappa) = match &sc.portfolio {
        PortfolioSpec::FixedCost { c, kappa } => (c, *kappa),
        _ => {
            return Err(Error::PreconditionViolated(
                "bounds need a fixed-cost portfolio".into(),
            ))
        }
    };
    let rc = vector_risk(c, &sc.space, &sc.risk)?;
    let shifted = negate(&LowerSet::fixed_cost(sc.dim, kappa)).translate(&rc)?;
    let inner = shifted.union(&ht_risk(sc, c, -kappa)?)?;
    let outer = ht_risk(sc, c, 0.0)?;
    Ok((inner, outer))
}

/// `(r_1(1_A), r_2(-1_A))` for events of probability `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct BRhoSet {
    pub betas: Vec<f64>,
    pub points: Vec<[f64; 2]>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(())
}

pub fn beta_grid(step: f64) -> Vec<f64> {
    grid_points(0.0, 1.0, step).into_iter().map(|b| b.min(1.0)).collect()
}

/// Tabulated `B_rho` for AVaR in both coordinates.
pub fn b_rho_avar(alpha: f64, betas: &[f64]) -> Result<BRhoSet> {
    check_alpha(alpha)?;
    let points = betas
        .iter()
        .map(|&b| {
            if b <= alpha.min(1.0 - alpha) {
                [0.0, b / alpha]
            } else if alpha < b && b <= 1.0 - alpha {
                [0.0, 1.0]
            } else if 1.0 - alpha < b && b <= alpha {
                [-1.0 + (1.0 - b) / alpha, b / alpha]
            } else {
                [-1.0 + (1.0 - b) / alpha, 1.0]
            }
        })
        .collect();
    Ok(BRhoSet {
        betas: betas.to_vec(),
        points,
    })
}

/// `B_rho` of any planar risk measure, by evaluating the indicator laws.
pub fn b_rho(spec: &VectorRiskSpec, betas: &[f64]) -> Result<BRhoSet> {
    if spec.dim() != 2 {
        return Err(Error::UnsupportedDimension(spec.dim()));
    }
    if !spec.is_law_invariant() {
        return Err(Error::PreconditionViolated("B_rho needs law-invariant components".into()));
    }
    let [r1, r2] = [&spec.components()[0], &spec.components()[1]];
    let eval = |r: &RiskSpec, v: f64, b: f64| {
        if b <= 0.0 {
            r.eval(&[0.0], &[1.0])
        } else if b >= 1.0 {
            r.eval(&[v], &[1.0])
        } else {
            r.eval(&[v, 0.0], &[b, 1.0 - b])
        }
    };
    let points = betas.iter().map(|&b| [eval(r1, 1.0, b), eval(r2, -1.0, b)]).collect();
    Ok(BRhoSet {
        betas: betas.to_vec(),
        points,
    })
}

/// Risk set of the fixed-cost transfer set `I_kappa` (with `C = 0`) under
/// AVaR at level `alpha` in both coordinates.
pub fn ikappa_avar_riskset(kappa: f64, alpha: f64) -> Result<RiskSet> {
    check_alpha(alpha)?;
    if !(kappa > 0.0) {
        return Err(Error::InvalidParams("kappa must be positive".into()));
    }
    if alpha <= 0.5 {
        return Ok(negate(&LowerSet::fixed_cost(2, kappa)));
    }
    let mut r = RiskSet::from_points(2, vec![vec![0.0, 0.0]]);
    r.curved.push(CurvedPart::FixedCostEnvelope { kappa, alpha });
    Ok(r)
}

/// Left branch of the envelope, `min(kappa + x, (sqrt x + sqrt c)^2)` with
/// `c = kappa (1/alpha - 1)`, for `x >= 0`.
pub fn envelope_branch(kappa: f64, alpha: f64, x: f64) -> f64 {
    crate::geom::envelope_branch(kappa, alpha, x)
}

/// Abscissa where the two terms of the envelope branch meet.
pub fn envelope_crossover(kappa: f64, alpha: f64) -> f64 {
    let c = kappa * (1.0 - alpha) / alpha;
    (kappa - c).powi(2) / (4.0 * c)
}

/// Union over `t` and `B_rho` of the two point families of a selection
/// `(x, y) 1_A` with `x + y = -kappa`, closed upwards.
pub fn ikappa_law_invariant_riskset(b: &BRhoSet, kappa: f64, ts: &[f64]) -> Result<RiskSet> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParams("kappa must be positive".into()));
    }
    if ts.iter().any(|&t| t < 0.0) {
        return Err(Error::InvalidParams("t must be nonnegative".into()));
    }
    let mut pts = Vec::with_capacity(2 * b.points.len() * ts.len());
    for &t in ts {
        for p in &b.points {
            pts.push(vec![t * p[0], (kappa + t) * p[1]]);
            pts.push(vec![t * p[1], (t - kappa) * p[0]]);
        }
    }
    Ok(RiskSet::from_points(2, pts))
}

/// Risk of `c 1_A` with `P(A) = beta` under the distortion `g`.
fn scaled_indicator_risk(c: f64, g: &DistortionFunction, beta: f64) -> f64 {
    if c >= 0.0 {
        -c * g.eval(beta)
    } else {
        -c * g.dual(beta)
    }
}

/// `rho_s({0, (x, y)} + R_-^2)` sampled over `beta`.
pub fn two_point_riskset(x: f64, y: f64, g: &DistortionFunction, betas: &[f64]) -> Result<RiskSet> {
    if !(x * y < 0.0) {
        return Err(Error::SameSignTransfer);
    }
    Ok(RiskSet::from_points(2, two_point_points(x, y, g, betas)))
}

pub fn two_point_points(x: f64, y: f64, g: &DistortionFunction, betas: &[f64]) -> Vec<Vec<f64>> {
    betas
        .iter()
        .map(|&b| vec![scaled_indicator_risk(x, g, b), scaled_indicator_risk(y, g, b)])
        .collect()
}

/// Risk of the selection taking `p1` with probability `a1`, `p3` with
/// probability `a3` and the origin otherwise.
pub fn three_point_value(p1: [f64; 2], p3: [f64; 2], g: &DistortionFunction, a1: f64, a3: f64) -> [f64; 2] {
    [
        -p1[0] * g.dual(a1) - p3[0] * g.eval(a3),
        -p1[1] * g.eval(a1) - p3[1] * g.dual(a3),
    ]
}

/// `rho_s({p1, 0, p3} + R_-^2)` sampled over the simplex grid.
pub fn three_point_riskset(p1: [f64; 2], p3: [f64; 2], g: &DistortionFunction, step: f64) -> Result<RiskSet> {
    if !(p1[0] < 0.0 && 0.0 < p3[0] && p1[1] > 0.0 && 0.0 > p3[1]) {
        return Err(Error::OrientationViolated);
    }
    let grid = beta_grid(step);
    let mut pts = Vec::new();
    for &a1 in &grid {
        for &a3 in &grid {
            if a1 + a3 <= 1.0 + 1e-12 {
                pts.push(three_point_value(p1, p3, g, a1, a3.min(1.0 - a1)).to_vec());
            }
        }
    }
    Ok(RiskSet::from_points(2, pts))
}

/// `-F_X`, the risk set under the essential infimum.
pub fn fixed_point_riskset(x: &RandomLowerSet) -> Result<RiskSet> {
    Ok(negate(&fixed_points(x)?))
}

/// Closed forms selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    IkappaAvar,
    HtIdentical,
    HtEssinfMixed,
    HtExpectationMixed,
    FixedPoint,
    TwoPoint,
    ThreePoint,
    IkappaLawInvariant,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 8] = [
        ClosedForm::IkappaAvar,
        ClosedForm::HtIdentical,
        ClosedForm::HtEssinfMixed,
        ClosedForm::HtExpectationMixed,
        ClosedForm::FixedPoint,
        ClosedForm::TwoPoint,
        ClosedForm::ThreePoint,
        ClosedForm::IkappaLawInvariant,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::IkappaAvar => "ikappa_avar",
            ClosedForm::HtIdentical => "ht_identical",
            ClosedForm::HtEssinfMixed => "ht_essinf_mixed",
            ClosedForm::HtExpectationMixed => "ht_expectation_mixed",
            ClosedForm::FixedPoint => "fixed_point",
            ClosedForm::TwoPoint => "two_point",
            ClosedForm::ThreePoint => "three_point",
            ClosedForm::IkappaLawInvariant => "ikappa_law_invariant",
        }
    }

    /// Evaluates the closed form for the portfolio and risk measure of `sc`,
    /// or reports why the scenario does not qualify.
    pub fn evaluate(&self, sc: &Scenario) -> Result<RiskSet> {
        let pre = |m: &str| Err(Error::PreconditionViolated(format!("{}: {m}", self.name())));
        let comps = sc.risk.components();
        let identical = comps.iter().all(|r| r == &comps[0]);
        match self {
            ClosedForm::IkappaAvar | ClosedForm::IkappaLawInvariant => {
                let PortfolioSpec::FixedCost { c, kappa } = &sc.portfolio else {
                    return pre("needs a fixed-cost portfolio");
                };
                if sc.dim != 2 || !is_zero(c) {
                    return pre("needs d = 2 and C = 0");
                }
                if *self == ClosedForm::IkappaLawInvariant {
                    if !sc.risk.is_coherent() || !sc.risk.is_law_invariant() {
                        return pre("needs coherent law-invariant components");
                    }
                    let b = b_rho(&sc.risk, &beta_grid(DEFAULT_BETA_STEP))?;
                    let tmax = sc.engine.window.diameter();
                    return ikappa_law_invariant_riskset(&b, *kappa, &grid_points(0.0, tmax, sc.engine.grid_step));
                }
                match comps {
                    [RiskSpec::AVaR { alpha: a }, RiskSpec::AVaR { alpha: b }] if a == b => ikappa_avar_riskset(*kappa, *a),
                    _ => pre("needs AVaR at one level in both coordinates"),
                }
            }
            ClosedForm::HtIdentical | ClosedForm::HtEssinfMixed | ClosedForm::HtExpectationMixed => {
                let PortfolioSpec::HalfSpaceTransfer { c, t } = &sc.portfolio else {
                    return pre("needs a half-space portfolio");
                };
                match self {
                    ClosedForm::HtIdentical => {
                        if !identical {
                            return pre("components differ");
                        }
                        ht_identical(c, *t, &comps[0], &sc.space)
                    }
                    ClosedForm::HtEssinfMixed => {
                        let Some(i) = comps.iter().position(|r| r == &RiskSpec::EssInf) else {
                            return pre("no essential-infimum component");
                        };
                        let rest: Vec<&RiskSpec> = comps.iter().enumerate().filter(|(j, _)| *j != i).map(|p| p.1).collect();
                        if rest.is_empty() || !rest.iter().all(|r| *r == rest[0]) {
                            return pre("remaining components differ");
                        }
                        ht_essinf_mixed(c, *t, rest[0], &sc.space)
                    }
                    _ => {
                        let Some(i) = comps.iter().position(|r| r == &RiskSpec::NegExpectation) else {
                            return pre("no negative-expectation component");
                        };
                        let rest: Vec<RiskSpec> =
                            comps.iter().enumerate().filter(|(j, _)| *j != i).map(|p| p.1.clone()).collect();
                        ht_expectation_mixed(c, *t, &rest, &sc.space)
                    }
                }
            }
            ClosedForm::FixedPoint => {
                let qualifies = comps.iter().all(|r| match r {
                    RiskSpec::EssInf => true,
                    RiskSpec::AVaR { alpha } => sc.space.probs().iter().all(|p| *p >= *alpha),
                    _ => false,
                });
                if !qualifies {
                    return pre("needs essential infimum, or AVaR with every atom of mass >= alpha");
                }
                fixed_point_riskset(&sc.portfolio.realize()?)
            }
            ClosedForm::TwoPoint | ClosedForm::ThreePoint => {
                let PortfolioSpec::FiniteTransfers { c, m } = &sc.portfolio else {
                    return pre("needs a finite transfer portfolio");
                };
                if sc.dim != 2 || !is_zero(c) {
                    return pre("needs d = 2 and C = 0");
                }
                if !identical {
                    return pre("components differ");
                }
                let g = distortion_of(&comps[0]).ok_or_else(|| {
                    Error::PreconditionViolated(format!("{}: needs a distortion risk measure", self.name()))
                })?;
                let others: Vec<&Vec<f64>> = m.iter().filter(|p| p.iter().any(|v| *v != 0.0)).collect();
                let has_origin = m.iter().any(|p| p.iter().all(|v| *v == 0.0));
                if !has_origin {
                    return pre("M must contain the origin");
                }
                if *self == ClosedForm::TwoPoint {
                    let [p] = others[..] else {
                        return pre("M must have exactly two points");
                    };
                    two_point_riskset(p[0], p[1], &g, &beta_grid(DEFAULT_BETA_STEP))
                } else {
                    let [a, b] = others[..] else {
                        return pre("M must have exactly three points");
                    };
                    let (p1, p3) = if a[0] < b[0] { (a, b) } else { (b, a) };
                    three_point_riskset([p1[0], p1[1]], [p3[0], p3[1]], &g, DEFAULT_BETA_STEP)
                }
            }
        }
    }
}

impl FromStr for ClosedForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClosedForm::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown closed form `{s}`")))
    }
}

fn is_zero(c: &RandomVector) -> bool {
    c.rows().iter().flatten().all(|v| *v == 0.0)
}

fn distortion_of(r: &RiskSpec) -> Option<DistortionFunction> {
    match r {
        RiskSpec::AVaR { alpha } => avar_distortion(*alpha).ok(),
        RiskSpec::Distortion(g) => Some(g.clone()),
        RiskSpec::NegExpectation => Some(DistortionFunction::identity()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{lower_from_generators, Window};

    #[test]
    fn ht_examples() {
        let sp = ProbSpace::uniform(2).unwrap();
        let c = RandomVector::new(vec![vec![1.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let r = ht_identical(&c, 0.0, &RiskSpec::avar(1.0).unwrap(), &sp).unwrap();
        assert_eq!(r, neg_sum_half_space(2, 1.5));
        assert_eq!(r.lower_boundary(0.0), Some(-1.5));
        let r = ht_identical(&c, 0.0, &RiskSpec::NegExpectation, &sp).unwrap();
        assert_eq!(r, ht_expectation_mixed(&c, 0.0, &[RiskSpec::NegExpectation], &sp).unwrap());
        let zero = RandomVector::deterministic(&[0.0, 0.0], 2);
        assert_eq!(
            ht_identical(&zero, 0.0, &RiskSpec::avar(0.3).unwrap(), &sp).unwrap(),
            neg_sum_half_space(2, 0.0)
        );
        assert_eq!(
            ht_essinf_mixed(&zero, 0.7, &RiskSpec::avar(0.3).unwrap(), &sp).unwrap(),
            neg_sum_half_space(2, 0.7)
        );
        // d = 2: intercept t - r(D)
        let r = ht_essinf_mixed(&c, 0.5, &RiskSpec::avar(0.5).unwrap(), &sp).unwrap();
        assert_eq!(r, neg_sum_half_space(2, 0.5 - (-1.0)));
        let g = DistortionFunction::new(vec![(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)]).unwrap();
        assert!(matches!(
            ht_identical(&c, 0.0, &RiskSpec::Distortion(g), &sp),
            Err(Error::NonConvexRisk(_))
        ));
    }

    #[test]
    fn expectation_mixed_checks_domination() {
        let sp = ProbSpace::uniform(2).unwrap();
        let c = RandomVector::new(vec![vec![1.0, 1.0], vec![2.0, -1.0]]).unwrap();
        assert!(ht_expectation_mixed(&c, 0.0, &[RiskSpec::avar(0.4).unwrap()], &sp).is_ok());
        let lenient = RiskSpec::ScenarioMax(vec![crate::risk::DensityScenario {
            density: RandomVariable::constant(1.0, 2),
            penalty: 1.0,
        }]);
        assert!(matches!(
            ht_expectation_mixed(&c, 0.0, &[lenient], &sp),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn b_rho_table() {
        let b = b_rho_avar(0.5, &[0.1, 0.3, 0.5]).unwrap();
        assert_eq!(b.points, vec![[0.0, 0.2], [0.0, 0.6], [0.0, 1.0]]);
        let b = b_rho_avar(0.75, &[0.5]).unwrap();
        assert!((b.points[0][0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((b.points[0][1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(b_rho_avar(0.3, &[1.0]).unwrap().points, vec![[-1.0, 1.0]]);
        assert_eq!(b_rho_avar(1.5, &[0.5]), Err(Error::InvalidAlpha(1.5)));
    }

    #[test]
    fn b_rho_matches_table() {
        let betas = beta_grid(0.01);
        for alpha in [0.2, 0.5, 0.55, 0.75, 1.0] {
            let spec = VectorRiskSpec::uniform(RiskSpec::avar(alpha).unwrap(), 2);
            let a = b_rho(&spec, &betas).unwrap();
            let t = b_rho_avar(alpha, &betas).unwrap();
            for (p, q) in a.points.iter().zip(&t.points) {
                assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12, "{alpha} {p:?} {q:?}");
            }
        }
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(envelope_branch(1.0, 0.75, 0.0), 1.0 / 3.0);
        assert!((envelope_crossover(1.0, 0.75) - 1.0 / 3.0).abs() < 1e-15);
        let x = envelope_crossover(1.0, 0.75);
        assert!((envelope_branch(1.0, 0.75, x) - (1.0 + x)).abs() < 1e-12);
        let r = ikappa_avar_riskset(1.0, 0.5).unwrap();
        assert_eq!(r, negate(&LowerSet::fixed_cost(2, 1.0)));
        let r = ikappa_avar_riskset(1.0, 0.75).unwrap();
        assert_eq!(r.lower_boundary(-0.5), Some(envelope_branch(1.0, 0.75, 0.5)));
    }

    #[test]
    fn ikappa_law_invariant_agrees_with_envelope() {
        let w = Window::new((-3.0, 1.0), (-3.0, 3.0)).unwrap();
        let step = 0.05;
        for alpha in [0.4, 0.75] {
            let b = b_rho_avar(alpha, &beta_grid(0.005)).unwrap();
            let e = ikappa_law_invariant_riskset(&b, 1.0, &grid_points(0.0, 8.0, 0.005)).unwrap();
            let env = ikappa_avar_riskset(1.0, alpha).unwrap();
            let gap = crate::geom::curve_sup_distance(&e.boundary_curve(w, step).unwrap(), &env.boundary_curve(w, step).unwrap()).unwrap();
            assert!(gap <= 2.0 * step, "alpha {alpha}: gap {gap}");
        }
    }

    #[test]
    fn two_and_three_point_examples() {
        let g = avar_distortion(0.75).unwrap();
        let p = two_point_points(2.0, -1.0, &g, &[0.0, 0.5, 1.0]);
        assert_eq!(p[0], vec![0.0, 0.0]);
        assert!((p[1][0] + 2.0 / 3.0).abs() < 1e-15 && (p[1][1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(p[2], vec![-2.0, 1.0]);
        assert_eq!(two_point_riskset(1.0, 1.0, &g, &[0.5]), Err(Error::SameSignTransfer));
        let v = three_point_value([-1.0, 1.0], [1.0, -1.0], &g, 0.3, 0.3);
        let expected = 0.4 - 1.0 / 15.0;
        assert!((v[0] - expected).abs() < 1e-12 && (v[1] - expected).abs() < 1e-12);
        assert_eq!(three_point_value([-1.0, 1.0], [1.0, -1.0], &g, 0.0, 0.0), [0.0, 0.0]);
        assert!(matches!(
            three_point_riskset([1.0, 1.0], [1.0, -1.0], &g, 0.1),
            Err(Error::OrientationViolated)
        ));
    }

    #[test]
    fn fixed_point_example() {
        let x1 = lower_from_generators(vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let x2 = lower_from_generators(vec![vec![-2.0, 2.0], vec![2.0, -2.0]]).unwrap();
        let r = fixed_point_riskset(&RandomLowerSet::new(vec![x1, x2]).unwrap()).unwrap();
        assert_eq!(r.minimal_points, vec![vec![-1.0, 2.0], vec![2.0, -1.0]]);
    }

    #[test]
    fn names_round_trip() {
        for c in ClosedForm::ALL {
            assert_eq!(c.name().parse::<ClosedForm>().unwrap(), c);
        }
        assert!("nope".parse::<ClosedForm>().is_err());
    }
}
