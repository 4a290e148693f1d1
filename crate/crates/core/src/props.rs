//! Randomised checks of the structural properties of the selection risk
//! measure. Cases are drawn from a seeded generator and grow with the case
//! index, so the first failure of a suite is also its smallest.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    convexity_defect, rho_z, rho_z_convex, selection_risk, EngineParams, PortfolioSpec, Scenario,
};
use crate::error::{Error, Result};
use crate::geom::{
    convex_hull, curve_sup_distance, lower_from_generators, minkowski, translate,
    LowerSet, RandomLowerSet, RiskSet, Window,
};
use crate::prob::{ProbSpace, RandomVariable, RandomVector};
use crate::risk::{vector_risk, DensityScenario, DistortionFunction, RiskSpec, VectorRiskSpec};
use crate::scenario::scenario_to_json;

pub const SUITES: [&str; 9] = [
    "monotonicity",
    "cash_invariance",
    "homogeneity",
    "convexity",
    "capital_shift",
    "law_invariance",
    "grid_monotonicity",
    "rho_z_hull",
    "convexification",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub case: usize,
    pub message: String,
    /// Scenario files (and parameters) reproducing the violation.
    pub reproduction: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type CaseResult = std::result::Result<(), (String, String)>;

pub fn run_suite(name: &str, seed: u64, cases: usize) -> Result<SuiteReport> {
    let idx = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::InvalidParams(format!("unknown suite `{name}`")))?;
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((idx as u64) << 32) | case as u64);
        let size = 1 + case * 3 / cases.max(1);
        let outcome = match name {
            "monotonicity" => monotonicity(&mut rng, size),
            "cash_invariance" => cash_invariance(&mut rng, size),
            "homogeneity" => homogeneity(&mut rng, size),
            "convexity" => convexity(&mut rng, size),
            "capital_shift" => capital_shift(&mut rng, size),
            "law_invariance" => law_invariance(&mut rng, size),
            "grid_monotonicity" => grid_monotonicity(&mut rng, size),
            "rho_z_hull" => rho_z_hull(&mut rng, size),
            _ => convexification(&mut rng, size),
        };
        match outcome {
            Ok(Ok(())) => {}
            Ok(Err((message, reproduction))) => failures.push(Failure {
                case,
                message,
                reproduction,
            }),
            Err(e) => failures.push(Failure {
                case,
                message: format!("error: {e}"),
                reproduction: String::new(),
            }),
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        cases,
        failures,
    })
}

pub fn run_all(seed: u64, cases: usize) -> Vec<SuiteReport> {
    SUITES
        .iter()
        .map(|s| run_suite(s, seed, cases).expect("known suite"))
        .collect()
}

const COORD_STEP: f64 = 0.25;

fn dyadic(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo..=hi) as f64 * COORD_STEP
}

fn space(rng: &mut ChaCha8Rng, size: usize) -> ProbSpace {
    const FIXED: [&[f64]; 3] = [&[0.5, 0.25, 0.25], &[0.25, 0.75], &[0.125, 0.375, 0.5]];
    if rng.gen_bool(0.3) {
        ProbSpace::new(FIXED[rng.gen_range(0..FIXED.len())].to_vec()).unwrap()
    } else {
        ProbSpace::uniform(rng.gen_range(1..=size.clamp(2, 3))).unwrap()
    }
}

fn density(rng: &mut ChaCha8Rng, sp: &ProbSpace) -> RandomVariable {
    loop {
        let w: Vec<f64> = (0..sp.atoms()).map(|_| rng.gen_range(0..=3) as f64).collect();
        let mean: f64 = w.iter().zip(sp.probs()).map(|(w, p)| w * p).sum();
        if mean > 0.0 {
            return RandomVariable::new(w.into_iter().map(|w| w / mean).collect());
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Need {
    Monetary,
    Convex,
    Coherent,
    LawInvariantCoherent,
}

fn component(rng: &mut ChaCha8Rng, sp: &ProbSpace, need: Need) -> RiskSpec {
    loop {
        let r = match rng.gen_range(0..6) {
            0 => RiskSpec::EssInf,
            1 => RiskSpec::NegExpectation,
            2 | 3 => RiskSpec::AVaR {
                alpha: [0.25, 0.5, 0.75, 1.0][rng.gen_range(0..4)],
            },
            4 => {
                let knots = if rng.gen_bool(0.5) {
                    vec![(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]
                } else {
                    vec![(0.0, 0.0), (0.5, 0.75), (1.0, 1.0)]
                };
                RiskSpec::Distortion(DistortionFunction::new(knots).unwrap())
            }
            _ => {
                let k = rng.gen_range(1..=2);
                RiskSpec::ScenarioMax(
                    (0..k)
                        .map(|_| DensityScenario {
                            density: density(rng, sp),
                            penalty: if rng.gen_bool(0.5) { 0.0 } else { dyadic(rng, 0, 2) },
                        })
                        .collect(),
                )
            }
        };
        let ok = match need {
            Need::Monetary => true,
            Need::Convex => r.is_convex(),
            Need::Coherent => r.is_coherent(),
            Need::LawInvariantCoherent => r.is_coherent() && r.is_law_invariant(),
        };
        if ok {
            return r;
        }
    }
}

fn spec(rng: &mut ChaCha8Rng, sp: &ProbSpace, need: Need) -> VectorRiskSpec {
    VectorRiskSpec::new(vec![component(rng, sp, need), component(rng, sp, need)]).unwrap()
}

fn staircase(rng: &mut ChaCha8Rng, size: usize) -> LowerSet {
    let k = rng.gen_range(1..=size.min(3));
    lower_from_generators((0..k).map(|_| vec![dyadic(rng, -8, 8), dyadic(rng, -8, 8)]).collect()).unwrap()
}

fn random_staircases(rng: &mut ChaCha8Rng, sp: &ProbSpace, size: usize) -> RandomLowerSet {
    RandomLowerSet::new((0..sp.atoms()).map(|_| staircase(rng, size)).collect()).unwrap()
}

fn capital(rng: &mut ChaCha8Rng, atoms: usize) -> RandomVector {
    RandomVector::new((0..atoms).map(|_| vec![dyadic(rng, -4, 4), dyadic(rng, -4, 4)]).collect()).unwrap()
}

fn params() -> EngineParams {
    EngineParams::new(0.5, Window::square(-2.0, 2.0)).with_margin(3.0)
}

fn scenario(sp: &ProbSpace, risk: &VectorRiskSpec, portfolio: PortfolioSpec, p: EngineParams) -> Result<Scenario> {
    Scenario::new(sp.clone(), risk.clone(), portfolio, p)
}

fn custom(sp: &ProbSpace, risk: &VectorRiskSpec, x: RandomLowerSet) -> Result<Scenario> {
    scenario(sp, risk, PortfolioSpec::Custom(x), params())
}

/// First minimal point of `a` missing from `b`.
fn first_missing(a: &RiskSet, b: &RiskSet) -> Option<Vec<f64>> {
    a.minimal_points.iter().find(|p| !b.contains(p)).cloned()
}

fn repro(scenarios: &[&Scenario], extra: &str) -> String {
    let mut s = String::new();
    for sc in scenarios {
        s.push_str(&scenario_to_json(sc));
        s.push('\n');
    }
    s.push_str(extra);
    s
}

fn monotonicity(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = space(rng, size);
    let risk = spec(rng, &sp, Need::Monetary);
    let (sx, sy) = if rng.gen_bool(0.5) {
        let x = random_staircases(rng, &sp, size);
        let y = RandomLowerSet::new(
            x.sets()
                .iter()
                .map(|s| crate::geom::union(s, &staircase(rng, 2)))
                .collect::<Result<_>>()?,
        )?;
        (custom(&sp, &risk, x)?, custom(&sp, &risk, y)?)
    } else {
        let c = capital(rng, sp.atoms());
        let k2 = dyadic(rng, 1, 4);
        let k1 = k2 + dyadic(rng, 0, 4);
        let fc = |kappa| PortfolioSpec::FixedCost { c: c.clone(), kappa };
        (scenario(&sp, &risk, fc(k1), params())?, scenario(&sp, &risk, fc(k2), params())?)
    };
    let (rx, ry) = (selection_risk(&sx)?, selection_risk(&sy)?);
    Ok(match first_missing(&rx, &ry) {
        None => Ok(()),
        Some(p) => Err((
            format!("risk point {p:?} of the smaller portfolio is not in the risk set of the larger one"),
            repro(&[&sx, &sy], ""),
        )),
    })
}

fn same_sets(a: &RiskSet, b: &RiskSet) -> Option<String> {
    if let Some(p) = first_missing(a, b) {
        return Some(format!("{p:?} in the first set only"));
    }
    first_missing(b, a).map(|p| format!("{p:?} in the second set only"))
}

fn cash_invariance(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = space(rng, size);
    let risk = spec(rng, &sp, Need::Monetary);
    let x = random_staircases(rng, &sp, size);
    let a = vec![dyadic(rng, -4, 4), dyadic(rng, -4, 4)];
    let xa = x.map(|s| translate(s, &a))?;
    let (s1, s2) = (custom(&sp, &risk, x)?, custom(&sp, &risk, xa)?);
    let lhs = selection_risk(&s2)?;
    let neg: Vec<f64> = a.iter().map(|v| -v).collect();
    let rhs = selection_risk(&s1)?.translate(&neg)?;
    Ok(match same_sets(&lhs, &rhs) {
        None => Ok(()),
        Some(m) => Err((format!("rho_s(X + a) != rho_s(X) - a: {m}"), repro(&[&s1, &s2], &format!("a = {a:?}")))),
    })
}

fn scale_set(r: &RiskSet, c: f64) -> RiskSet {
    RiskSet::from_points(r.dim, r.minimal_points.iter().map(|p| p.iter().map(|v| v * c).collect()).collect())
}

fn homogeneity(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = space(rng, size);
    let risk = spec(rng, &sp, Need::Coherent);
    let x = random_staircases(rng, &sp, size);
    let c = [0.5, 2.0, 3.0][rng.gen_range(0..3)];
    let cx = x.map(|s| s.scale(c))?;
    let (s1, s2) = (custom(&sp, &risk, x)?, custom(&sp, &risk, cx)?);
    let lhs = selection_risk(&s2)?;
    let rhs = scale_set(&selection_risk(&s1)?, c);
    Ok(match same_sets(&lhs, &rhs) {
        None => Ok(()),
        Some(m) => Err((format!("rho_s(cX) != c rho_s(X): {m}"), repro(&[&s1, &s2], &format!("c = {c}")))),
    })
}

fn convexity(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = space(rng, size);
    let risk = spec(rng, &sp, Need::Convex);
    let x = random_staircases(rng, &sp, size);
    let y = random_staircases(rng, &sp, size);
    let lambda = [0.25, 0.5, 0.75][rng.gen_range(0..3)];
    let z = RandomLowerSet::new(
        x.sets()
            .iter()
            .zip(y.sets())
            .map(|(a, b)| minkowski(&a.scale(lambda)?, &b.scale(1.0 - lambda)?))
            .collect::<Result<_>>()?,
    )?;
    let (sx, sy, sz) = (custom(&sp, &risk, x)?, custom(&sp, &risk, y)?, custom(&sp, &risk, z)?);
    let (rx, ry, rz) = (selection_risk(&sx)?, selection_risk(&sy)?, selection_risk(&sz)?);
    for p in &rx.minimal_points {
        for q in &ry.minimal_points {
            let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
            if !rz.contains(&m) {
                return Ok(Err((
                    format!("{m:?} = lambda {p:?} + (1 - lambda) {q:?} is not in rho_s(lambda X + (1 - lambda) Y)"),
                    repro(&[&sx, &sy, &sz], &format!("lambda = {lambda}")),
                )));
            }
        }
    }
    Ok(Ok(()))
}

fn capital_shift(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = space(rng, size);
    let risk = spec(rng, &sp, Need::Coherent);
    let x = random_staircases(rng, &sp, size);
    let c = capital(rng, sp.atoms());
    let cx = RandomLowerSet::new(
        x.sets()
            .iter()
            .zip(c.rows())
            .map(|(s, r)| translate(s, r))
            .collect::<Result<_>>()?,
    )?;
    let (s1, s2) = (custom(&sp, &risk, x)?, custom(&sp, &risk, cx)?);
    let rc = vector_risk(&c, &sp, &risk)?;
    let lhs = selection_risk(&s1)?.translate(&rc)?;
    let rhs = selection_risk(&s2)?;
    Ok(match first_missing(&lhs, &rhs) {
        None => Ok(()),
        Some(p) => Err((
            format!("{p:?} in rho(C) + rho_s(X) but not in rho_s(C + X)"),
            repro(&[&s1, &s2], &format!("C = {:?}", c.rows())),
        )),
    })
}

fn law_invariance(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let n = rng.gen_range(2..=(size + 1).min(4));
    let sp = ProbSpace::uniform(n)?;
    let risk = spec(rng, &sp, Need::LawInvariantCoherent);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let (a, b) = if rng.gen_bool(0.5) || n > 3 {
        let x = random_staircases(rng, &sp, size);
        let px = x.permuted(&perm);
        (custom(&sp, &risk, x)?, custom(&sp, &risk, px)?)
    } else {
        let c = capital(rng, n);
        let pc = RandomVector::new(perm.iter().map(|&i| c.row(i).to_vec()).collect())?;
        let kappa = dyadic(rng, 1, 4);
        (
            scenario(&sp, &risk, PortfolioSpec::FixedCost { c, kappa }, params())?,
            scenario(&sp, &risk, PortfolioSpec::FixedCost { c: pc, kappa }, params())?,
        )
    };
    let (ra, rb) = (selection_risk(&a)?, selection_risk(&b)?);
    Ok(if ra == rb {
        Ok(())
    } else {
        Err((
            "permuting the atoms changed the risk set".into(),
            repro(&[&a, &b], &format!("permutation = {perm:?}")),
        ))
    })
}

fn grid_monotonicity(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = if rng.gen_bool(0.5) {
        ProbSpace::uniform(rng.gen_range(1..=2))?
    } else {
        space(rng, size.min(2))
    };
    let need = if sp.atoms() <= 2 { Need::Monetary } else { Need::LawInvariantCoherent };
    let risk = spec(rng, &sp, need);
    let c = capital(rng, sp.atoms());
    let kappa = dyadic(rng, 1, 4);
    let coarse = EngineParams::new(0.5, Window::square(-1.5, 1.5)).with_margin(2.0);
    let fine = EngineParams {
        grid_step: 0.25,
        ..coarse.clone()
    };
    let port = PortfolioSpec::FixedCost { c, kappa };
    let (s1, s2) = (scenario(&sp, &risk, port.clone(), coarse)?, scenario(&sp, &risk, port, fine)?);
    let (r1, r2) = (selection_risk(&s1)?, selection_risk(&s2)?);
    Ok(match first_missing(&r1, &r2) {
        None => Ok(()),
        Some(p) => Err((format!("{p:?} lost when refining the grid"), repro(&[&s1, &s2], ""))),
    })
}

fn rho_z_hull(rng: &mut ChaCha8Rng, size: usize) -> Result<CaseResult> {
    let sp = space(rng, size);
    let x = RandomLowerSet::new(
        (0..sp.atoms())
            .map(|_| {
                if rng.gen_bool(0.25) {
                    let v = [dyadic(rng, -4, 4), dyadic(rng, -4, 4)];
                    translate(&LowerSet::fixed_cost(2, dyadic(rng, 1, 4)), &v)
                } else {
                    Ok(staircase(rng, size))
                }
            })
            .collect::<Result<_>>()?,
    )?;
    let k = rng.gen_range(1..=2);
    let z: Vec<RandomVector> = (0..k)
        .map(|_| {
            let a = density(rng, &sp);
            let b = density(rng, &sp);
            RandomVector::new(a.values().iter().zip(b.values()).map(|(a, b)| vec![*a, *b]).collect())
        })
        .collect::<Result<_>>()?;
    let hulls = x.sets().iter().map(convex_hull).collect::<Result<Vec<_>>>()?;
    let w = Window::square(-4.0, 4.0);
    let a = rho_z(&x, &sp, &z)?.boundary_curve(w, 0.125)?;
    let b = rho_z_convex(&hulls, &sp, &z)?.boundary_curve(w, 0.125)?;
    let gap = curve_sup_distance(&a, &b)?;
    Ok(if gap <= 1e-9 {
        Ok(())
    } else {
        let sc = custom(&sp, &VectorRiskSpec::uniform(RiskSpec::EssInf, 2), x)?;
        let zs: Vec<&[Vec<f64>]> = z.iter().map(|v| v.rows()).collect();
        Err((format!("rho_Z(X) and rho_Z(conv X) differ by {gap}"), repro(&[&sc], &format!("Z = {zs:?}"))))
    })
}

fn convexification(rng: &mut ChaCha8Rng, _size: usize) -> Result<CaseResult> {
    let f = loop {
        let s = lower_from_generators(vec![
            vec![dyadic(rng, -8, 0), dyadic(rng, 0, 8)],
            vec![dyadic(rng, 0, 8), dyadic(rng, -8, 0)],
        ])?;
        if s.apexes().len() == 2 {
            break s;
        }
    };
    let sp1 = ProbSpace::uniform(1)?;
    let risk = spec(rng, &sp1, Need::LawInvariantCoherent);
    let w = Window::square(-3.0, 3.0);
    let mut defects = Vec::new();
    let mut scenarios = Vec::new();
    for n in [2, 4, 8] {
        let sp = ProbSpace::uniform(n)?;
        let sc = scenario(
            &sp,
            &risk,
            PortfolioSpec::Custom(RandomLowerSet::deterministic(f.clone(), n)),
            EngineParams::new(0.125, w),
        )?;
        defects.push(convexity_defect(&selection_risk(&sc)?, w, 0.125)?);
        scenarios.push(sc);
    }
    Ok(if defects.windows(2).all(|d| d[1] <= d[0] + 1e-12) {
        Ok(())
    } else {
        Err((
            format!("convexity defect is not nonincreasing over n = 2, 4, 8: {defects:?}"),
            repro(&[&scenarios[0]], ""),
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_deterministic_and_pass() {
        for s in SUITES {
            let a = run_suite(s, 7, 12).unwrap();
            let b = run_suite(s, 7, 12).unwrap();
            assert_eq!(a, b);
            assert!(a.passed(), "{s}: {:?}", a.failures.first());
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 1, 1).is_err());
    }
}
