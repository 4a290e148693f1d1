//! Brute-force evaluation of the selection risk measure and the other
//! set-valued functionals on finite spaces.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{
    convex_hull, curve_sup_distance, lower_convex_envelope, lower_from_generators, minkowski, pareto_minimal,
    pareto_sample, scale_coordinatewise, translate, ConvexLower2, CurvedPart, LowerSet, Primitive,
    RandomLowerSet, RiskSet, Window, BOUNDARY_TOL,
};
use crate::prob::{ProbSpace, RandomVector};
use crate::risk::VectorRiskSpec;

pub const DEFAULT_SELECTION_CAP: u64 = 2_000_000;

/// Portfolio families with a known per-atom realisation.
#[derive(Debug, Clone, PartialEq)]
pub enum PortfolioSpec {
    /// `C + I_kappa`
    FixedCost { c: RandomVector, kappa: f64 },
    /// `C + H_t`
    HalfSpaceTransfer { c: RandomVector, t: f64 },
    /// `C + M + R_-^d`
    FiniteTransfers { c: RandomVector, m: Vec<Vec<f64>> },
    Custom(RandomLowerSet),
}

impl PortfolioSpec {
    pub fn atoms(&self) -> usize {
        match self {
            PortfolioSpec::FixedCost { c, .. }
            | PortfolioSpec::HalfSpaceTransfer { c, .. }
            | PortfolioSpec::FiniteTransfers { c, .. } => c.atoms(),
            PortfolioSpec::Custom(x) => x.atoms(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PortfolioSpec::FixedCost { c, .. }
            | PortfolioSpec::HalfSpaceTransfer { c, .. }
            | PortfolioSpec::FiniteTransfers { c, .. } => c.dim(),
            PortfolioSpec::Custom(x) => x.dim(),
        }
    }

    /// The random set `X`, one lower set per atom.
    pub fn realize(&self) -> Result<RandomLowerSet> {
        match self {
            PortfolioSpec::FixedCost { c, kappa } => {
                if !(*kappa > 0.0) {
                    return Err(Error::InvalidParams("kappa must be positive".into()));
                }
                let base = LowerSet::fixed_cost(c.dim(), *kappa);
                RandomLowerSet::new(c.rows().iter().map(|r| translate(&base, r)).collect::<Result<_>>()?)
            }
            PortfolioSpec::HalfSpaceTransfer { c, t } => {
                let base = LowerSet::sum_half_space(c.dim(), *t);
                RandomLowerSet::new(c.rows().iter().map(|r| translate(&base, r)).collect::<Result<_>>()?)
            }
            PortfolioSpec::FiniteTransfers { c, m } => {
                if m.is_empty() {
                    return Err(Error::EmptyGeneratorSet);
                }
                if let Some(p) = m.iter().find(|p| p.len() != c.dim()) {
                    return Err(Error::DimensionMismatch {
                        expected: c.dim(),
                        got: p.len(),
                    });
                }
                let sets = c
                    .rows()
                    .iter()
                    .map(|r| lower_from_generators(m.iter().map(|p| p.iter().zip(r).map(|(a, b)| a + b).collect()).collect()))
                    .collect::<Result<_>>()?;
                RandomLowerSet::new(sets)
            }
            PortfolioSpec::Custom(x) => Ok(x.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineMode {
    General,
    /// Selections constant on the cells of a partition of the atoms, one cell
    /// per primitive of a deterministic portfolio.
    Partition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineParams {
    pub grid_step: f64,
    pub window: Window,
    pub selection_cap: u64,
    pub mode: EngineMode,
    /// Candidate abscissae extend this far beyond the mirrored window;
    /// defaults to the largest anchor coordinate of the portfolio.
    pub margin: Option<f64>,
}

impl EngineParams {
    pub fn new(grid_step: f64, window: Window) -> Self {
        Self {
            grid_step,
            window,
            selection_cap: DEFAULT_SELECTION_CAP,
            mode: EngineMode::General,
            margin: None,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn with_mode(mut self, mode: EngineMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.selection_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step > 0.0) {
            return Err(Error::InvalidParams("grid_step must be positive".into()));
        }
        if self.margin.is_some_and(|m| !(m >= 0.0)) {
            return Err(Error::InvalidParams("margin must be nonnegative".into()));
        }
        if self.selection_cap < 1 {
            return Err(Error::InvalidParams("selection_cap must be at least 1".into()));
        }
        Ok(())
    }

    /// Abscissae of candidate selections: every risk abscissa in the window
    /// is reachable, with room for the largest anchor of the portfolio.
    fn sampling_range(&self, margin: f64) -> (f64, f64) {
        let margin = self.margin.unwrap_or(margin);
        let (lo, hi) = self.window.x;
        (lo.min(-hi) - margin, hi.max(-lo) + margin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub space: ProbSpace,
    pub dim: usize,
    pub risk: VectorRiskSpec,
    pub portfolio: PortfolioSpec,
    pub engine: EngineParams,
}

impl Scenario {
    pub fn new(
        space: ProbSpace,
        risk: VectorRiskSpec,
        portfolio: PortfolioSpec,
        engine: EngineParams,
    ) -> Result<Self> {
        let dim = risk.dim();
        if portfolio.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: portfolio.dim(),
            });
        }
        if portfolio.atoms() != space.atoms() {
            return Err(Error::DimensionMismatch {
                expected: space.atoms(),
                got: portfolio.atoms(),
            });
        }
        risk.validate(&space)?;
        engine.validate()?;
        Ok(Self {
            space,
            dim,
            risk,
            portfolio,
            engine,
        })
    }
}

fn candidates_in(set: &LowerSet, range: (f64, f64), step: f64) -> Result<Vec<Vec<f64>>> {
    if set.is_staircase() {
        return Ok(set.apexes());
    }
    pareto_sample(set, range, step)
}

/// Points of `X(w)` a selection may take: the apexes of a staircase, or the
/// sampled Pareto frontier in the plane.
pub fn candidate_points(set: &LowerSet, params: &EngineParams) -> Result<Vec<Vec<f64>>> {
    candidates_in(set, params.sampling_range(set.anchor_extent()), params.grid_step)
}

fn binom(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of ways to spread `n` atoms over `k` labelled parts.
fn compositions_count(n: usize, k: usize) -> u128 {
    binom((n + k - 1) as u128, (k - 1) as u128)
}

/// All count vectors of length `k` summing to `n`, sparse as `(part, count)`.
fn compositions(n: u32, k: usize) -> Vec<Vec<(u32, u32)>> {
    fn rec(part: usize, left: u32, k: usize, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Vec<(u32, u32)>>) {
        if part + 1 == k {
            if left > 0 {
                cur.push((part as u32, left));
            }
            out.push(cur.clone());
            if left > 0 {
                cur.pop();
            }
            return;
        }
        for m in (0..=left).rev() {
            if m > 0 {
                cur.push((part as u32, m));
            }
            rec(part + 1, left - m, k, cur, out);
            if m > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// One independent choice of a selection: a candidate list and the ways
/// to distribute this factor's atoms over it.
struct Factor {
    cands: Vec<Vec<f64>>,
    prob: f64,
    options: Vec<Vec<(u32, u32)>>,
}

struct Pool {
    dim: usize,
    points: Vec<Vec<f64>>,
}

const PRUNE_EVERY: usize = 4096;

impl Pool {
    fn new(dim: usize) -> Self {
        Self { dim, points: Vec::new() }
    }

    fn push(&mut self, p: Vec<f64>) {
        self.points.push(p);
        if self.points.len() >= PRUNE_EVERY {
            self.prune();
        }
    }

    fn prune(&mut self) {
        let pts = std::mem::take(&mut self.points);
        self.points = pareto_minimal(pts);
    }

    fn merge(mut self, other: Pool) -> Pool {
        self.points.extend(other.points);
        self.prune();
        self
    }

    fn finish(self) -> RiskSet {
        RiskSet::from_points(self.dim, self.points)
    }
}

fn check_cap(required: u128, cap: u64) -> Result<()> {
    if required > cap as u128 {
        return Err(Error::SelectionBudgetExceeded { required, cap });
    }
    Ok(())
}

fn margin(x: &RandomLowerSet) -> f64 {
    x.sets().iter().map(LowerSet::anchor_extent).fold(0.0, f64::max)
}

/// Atom classes sharing probability and realisation, in canonical order.
fn classes(x: &RandomLowerSet, sp: &ProbSpace) -> Vec<(f64, usize, Vec<usize>)> {
    let mut keyed: Vec<(u64, Vec<u64>, usize)> = (0..sp.atoms())
        .map(|i| (sp.prob(i).to_bits(), x.atom(i).key(), i))
        .collect();
    keyed.sort();
    let mut out: Vec<(f64, usize, Vec<usize>)> = Vec::new();
    let mut last: Option<(u64, Vec<u64>)> = None;
    for (p, k, i) in keyed {
        let same = last.as_ref().is_some_and(|(lp, lk)| *lp == p && *lk == k);
        if same {
            out.last_mut().unwrap().2.push(i);
        } else {
            out.push((f64::from_bits(p), i, vec![i]));
            last = Some((p, k));
        }
    }
    out
}

/// Discretised `rho_s(X)`: risk vectors of every selection through the
/// candidate points, Pareto-pruned.
pub fn selection_risk(sc: &Scenario) -> Result<RiskSet> {
    match sc.engine.mode {
        EngineMode::General => selection_risk_general(sc),
        EngineMode::Partition => selection_risk_partition(sc),
    }
}

fn selection_risk_general(sc: &Scenario) -> Result<RiskSet> {
    let x = sc.portfolio.realize()?;
    let range = sc.engine.sampling_range(margin(&x));
    let step = sc.engine.grid_step;
    let mut factors = Vec::new();
    if sc.risk.is_law_invariant() {
        // only the law of a selection matters: count atoms per candidate
        for (p, rep, members) in classes(&x, &sc.space) {
            let cands = candidates_in(x.atom(rep), range, step)?;
            let n = members.len();
            check_cap(compositions_count(n, cands.len()), sc.engine.selection_cap)?;
            factors.push((cands, p, n));
        }
        let required = factors
            .iter()
            .map(|(c, _, n)| compositions_count(*n, c.len()))
            .fold(1u128, |a, b| a.saturating_mul(b));
        check_cap(required, sc.engine.selection_cap)?;
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(cands, prob, n)| {
                let options = compositions(n as u32, cands.len());
                Factor { cands, prob, options }
            })
            .collect();
        Ok(enumerate_product(sc, &factors))
    } else {
        let mut required: u128 = 1;
        let mut fs = Vec::new();
        for i in 0..sc.space.atoms() {
            let cands = candidates_in(x.atom(i), range, step)?;
            required = required.saturating_mul(cands.len() as u128);
            check_cap(required, sc.engine.selection_cap)?;
            let options = (0..cands.len() as u32).map(|k| vec![(k, 1)]).collect();
            fs.push(Factor {
                cands,
                prob: sc.space.prob(i),
                options,
            });
        }
        Ok(enumerate_product(sc, &fs))
    }
}

fn enumerate_product(sc: &Scenario, factors: &[Factor]) -> RiskSet {
    let d = sc.dim;
    let total: u64 = factors.iter().map(|f| f.options.len() as u64).product();
    let pool = (0..total)
        .into_par_iter()
        .fold(
            || (Pool::new(d), Vec::new(), Vec::new(), Vec::new()),
            |(mut pool, mut pts, mut probs, mut scratch), mut idx| {
                pts.clear();
                probs.clear();
                for f in factors {
                    let n = f.options.len() as u64;
                    let opt = &f.options[(idx % n) as usize];
                    idx /= n;
                    for &(k, m) in opt {
                        pts.extend_from_slice(&f.cands[k as usize]);
                        probs.push(m as f64 * f.prob);
                    }
                }
                pool.push(sc.risk.eval_rows(&pts, &probs, &mut scratch));
                (pool, pts, probs, scratch)
            },
        )
        .map(|(pool, ..)| pool)
        .reduce(|| Pool::new(d), Pool::merge);
    pool.finish()
}

/// Partition-mode enumeration for a deterministic portfolio whose
/// realisation is a union of primitives: every atom picks a primitive, and
/// all atoms on the same primitive share one candidate point.
pub fn selection_risk_partition(sc: &Scenario) -> Result<RiskSet> {
    let x = sc.portfolio.realize()?;
    if !x.is_deterministic() {
        return Err(Error::PreconditionViolated(
            "partition mode needs the same realisation on every atom".into(),
        ));
    }
    let set = x.atom(0);
    let range = sc.engine.sampling_range(margin(&x));
    let branches: Vec<Vec<Vec<f64>>> = set
        .primitives()
        .iter()
        .map(|p| match p {
            Primitive::Orthant(a) => Ok(vec![a.clone()]),
            Primitive::Full => Err(Error::Unbounded),
            half => pareto_sample(&LowerSet::new(set.dim(), vec![half.clone()])?, range, sc.engine.grid_step),
        })
        .collect::<Result<_>>()?;
    let b = branches.len();
    let cap = sc.engine.selection_cap;

    // each assignment lists (branch, probability) slots in a fixed order
    let assignments: Vec<Vec<(usize, f64)>> = if sc.risk.is_law_invariant() {
        let mut by_prob: Vec<(u64, usize)> = sc.space.probs().iter().map(|p| (p.to_bits(), 0)).collect();
        by_prob.sort();
        by_prob.dedup();
        for (bits, n) in by_prob.iter_mut() {
            *n = sc.space.probs().iter().filter(|p| p.to_bits() == *bits).count();
        }
        let count = by_prob
            .iter()
            .map(|(_, n)| compositions_count(*n, b))
            .fold(1u128, |a, c| a.saturating_mul(c));
        check_cap(count, cap)?;
        let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new()];
        for (bits, n) in by_prob {
            let p = f64::from_bits(bits);
            let comps = compositions(n as u32, b);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    comps.iter().map(move |c| {
                        let mut v = prefix.clone();
                        v.extend(c.iter().map(|&(br, m)| (br as usize, m as f64 * p)));
                        v
                    })
                })
                .collect();
        }
        out
    } else {
        let n = sc.space.atoms();
        check_cap((b as u128).saturating_pow(n as u32), cap)?;
        let total = (b as u64).pow(n as u32);
        (0..total)
            .map(|mut idx| {
                (0..n)
                    .map(|i| {
                        let br = (idx % b as u64) as usize;
                        idx /= b as u64;
                        (br, sc.space.prob(i))
                    })
                    .collect()
            })
            .collect()
    };

    let used = |a: &Vec<(usize, f64)>| {
        let mut u: Vec<usize> = a.iter().map(|s| s.0).collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    let required = assignments
        .iter()
        .map(|a| used(a).iter().map(|&br| branches[br].len() as u128).product::<u128>())
        .fold(0u128, |s, c| s.saturating_add(c));
    check_cap(required, cap)?;

    let d = sc.dim;
    let pool = assignments
        .par_iter()
        .fold(
            || Pool::new(d),
            |mut pool, a| {
                let u = used(a);
                let inner: u64 = u.iter().map(|&br| branches[br].len() as u64).product();
                let mut choice = vec![0usize; b];
                let mut pts = Vec::with_capacity(a.len() * d);
                let mut probs = Vec::with_capacity(a.len());
                let mut scratch = Vec::new();
                for mut idx in 0..inner {
                    for &br in &u {
                        let k = branches[br].len() as u64;
                        choice[br] = (idx % k) as usize;
                        idx /= k;
                    }
                    pts.clear();
                    probs.clear();
                    for &(br, p) in a {
                        pts.extend_from_slice(&branches[br][choice[br]]);
                        probs.push(p);
                    }
                    pool.push(sc.risk.eval_rows(&pts, &probs, &mut scratch));
                }
                pool
            },
        )
        .reduce(|| Pool::new(d), Pool::merge);
    Ok(pool.finish())
}

/// `0 in rho_s(X)`.
pub fn is_acceptable(sc: &Scenario) -> Result<bool> {
    Ok(selection_risk(sc)?.contains(&vec![0.0; sc.dim]))
}

/// Probability-weighted Minkowski sum `sum_i p_i X(w_i)`.
pub fn selection_expectation(x: &RandomLowerSet, sp: &ProbSpace) -> Result<LowerSet> {
    if x.atoms() != sp.atoms() {
        return Err(Error::DimensionMismatch {
            expected: sp.atoms(),
            got: x.atoms(),
        });
    }
    let d = x.dim();
    let mut acc: Option<LowerSet> = None;
    for (s, &p) in x.sets().iter().zip(sp.probs()) {
        let scaled = scale_coordinatewise(s, &vec![p; d])?;
        acc = Some(match acc {
            None => scaled,
            Some(a) => minkowski(&a, &scaled)?,
        });
    }
    Ok(acc.expect("nonempty random set"))
}

/// Planar `{z x : x in A}` for `z >= 0`; a zero factor keeps the lower
/// closure of the projection on the other coordinate.
fn scale_nonneg(a: &LowerSet, z: [f64; 2]) -> Result<LowerSet> {
    if z[0] > 0.0 && z[1] > 0.0 {
        return scale_coordinatewise(a, &z);
    }
    let sup = |i: usize| {
        a.primitives()
            .iter()
            .map(|p| match p {
                Primitive::Orthant(v) => v[i],
                _ => f64::INFINITY,
            })
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let collapsed = |zero: usize| -> Result<LowerSet> {
        let free = 1 - zero;
        let s = sup(free);
        if s.is_infinite() {
            let mut n = vec![0.0; 2];
            n[zero] = 1.0;
            return LowerSet::new(2, vec![Primitive::half_space(n, 0.0)?]);
        }
        let mut apex = vec![0.0; 2];
        apex[free] = z[free] * s;
        Ok(LowerSet::orthant(apex))
    };
    match (z[0] > 0.0, z[1] > 0.0) {
        (false, true) => collapsed(0),
        (true, false) => collapsed(1),
        _ => Ok(LowerSet::orthant(vec![0.0, 0.0])),
    }
}

fn check_densities(z: &[RandomVector], sp: &ProbSpace) -> Result<()> {
    if z.is_empty() {
        return Err(Error::EmptyScenarioSet);
    }
    for zeta in z {
        zeta.check_len(sp)?;
        if zeta.dim() != 2 {
            return Err(Error::UnsupportedDimension(zeta.dim()));
        }
        if zeta.rows().iter().flatten().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidDensity("densities must be nonnegative".into()));
        }
        for j in 0..2 {
            let mean: f64 = (0..sp.atoms()).map(|i| sp.prob(i) * zeta.row(i)[j]).sum();
            if (mean - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDensity(format!("coordinate {j} has mean {mean}")));
            }
        }
    }
    Ok(())
}

/// `rho_Z(X) = n_{zeta in Z} E(-zeta X)` in the plane. The expectation is
/// the closed convex one of the nonatomic setting, so the result does not
/// see the difference between `X` and its convex hull.
pub fn rho_z(x: &RandomLowerSet, sp: &ProbSpace, z: &[RandomVector]) -> Result<RiskSet> {
    if x.dim() != 2 {
        return Err(Error::UnsupportedDimension(x.dim()));
    }
    check_densities(z, sp)?;
    let mut parts = Vec::new();
    for zeta in z {
        let mut acc: Option<LowerSet> = None;
        for i in 0..sp.atoms() {
            let w = [sp.prob(i) * zeta.row(i)[0], sp.prob(i) * zeta.row(i)[1]];
            let s = scale_nonneg(x.atom(i), w)?;
            acc = Some(match acc {
                None => s,
                Some(a) => minkowski(&a, &s)?,
            });
        }
        let hull = convex_hull(&acc.expect("nonempty space"))?;
        parts.push(RiskSet::curved(2, CurvedPart::Convex(hull)));
    }
    RiskSet::intersection(parts)
}

/// `rho_Z` of a random convex set given atomwise.
pub fn rho_z_convex(x: &[ConvexLower2], sp: &ProbSpace, z: &[RandomVector]) -> Result<RiskSet> {
    if x.len() != sp.atoms() {
        return Err(Error::DimensionMismatch {
            expected: sp.atoms(),
            got: x.len(),
        });
    }
    check_densities(z, sp)?;
    let mut parts = Vec::new();
    for zeta in z {
        let mut acc: Option<ConvexLower2> = None;
        for (i, k) in x.iter().enumerate() {
            let s = k.scale([sp.prob(i) * zeta.row(i)[0], sp.prob(i) * zeta.row(i)[1]])?;
            acc = Some(match acc {
                None => s,
                Some(a) => a.minkowski(&s),
            });
        }
        parts.push(RiskSet::curved(2, CurvedPart::Convex(acc.expect("nonempty space"))));
    }
    RiskSet::intersection(parts)
}

/// A violation of risk convexity: `-rho(1_A x1 + 1_{A^c} x2)` lies outside `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityWitness {
    pub event: Vec<usize>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub risk: Vec<f64>,
}

/// Checks the defining condition of risk convexity over all events and all
/// pairs of candidate points of `F`.
pub fn risk_convexity_witness(
    f: &LowerSet,
    spec: &VectorRiskSpec,
    sp: &ProbSpace,
    params: &EngineParams,
) -> Result<Option<ConvexityWitness>> {
    if f.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: f.dim(),
        });
    }
    if !f.is_staircase() && f.dim() != 2 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    spec.validate(sp)?;
    let n = sp.atoms();
    if n >= 24 {
        return Err(Error::InvalidParams("too many atoms to list all events".into()));
    }
    let cands = candidate_points(f, params)?;
    let d = f.dim();
    let mut scratch = Vec::new();
    for mask in 0u32..(1 << n) {
        for x1 in &cands {
            for x2 in &cands {
                let mut pts = Vec::with_capacity(n * d);
                for i in 0..n {
                    pts.extend_from_slice(if mask >> i & 1 == 1 { x1 } else { x2 });
                }
                let r = spec.eval_rows(&pts, sp.probs(), &mut scratch);
                let neg: Vec<f64> = r.iter().map(|v| -v).collect();
                if !f.contains(&neg)? {
                    return Ok(Some(ConvexityWitness {
                        event: (0..n).filter(|i| mask >> i & 1 == 1).collect(),
                        x1: x1.clone(),
                        x2: x2.clone(),
                        risk: r,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_risk_convex(f: &LowerSet, spec: &VectorRiskSpec, sp: &ProbSpace, params: &EngineParams) -> Result<bool> {
    Ok(risk_convexity_witness(f, spec, sp, params)?.is_none())
}

/// Sup distance between the boundary of `r` and the boundary of its convex
/// hull over the window.
pub fn convexity_defect(r: &RiskSet, window: Window, step: f64) -> Result<f64> {
    if r.dim != 2 {
        return Err(Error::UnsupportedDimension(r.dim));
    }
    let curve = r.boundary_curve(window, step)?;
    let hull = if r.is_polyhedral() {
        r.convex_hull()?.boundary_curve(window, step)?
    } else {
        lower_convex_envelope(&curve)
    };
    let gap = curve_sup_distance(&curve, &hull)?;
    Ok(if gap < BOUNDARY_TOL { 0.0 } else { gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{fixed_points, negate};
    use crate::risk::RiskSpec;

    fn params(step: f64, lo: f64, hi: f64) -> EngineParams {
        EngineParams::new(step, Window::square(lo, hi))
    }

    fn custom(sets: Vec<LowerSet>) -> PortfolioSpec {
        PortfolioSpec::Custom(RandomLowerSet::new(sets).unwrap())
    }

    #[test]
    fn compositions_are_complete() {
        for (n, k) in [(0, 1), (3, 1), (3, 2), (4, 3), (5, 4)] {
            let c = compositions(n, k);
            assert_eq!(c.len() as u128, compositions_count(n as usize, k));
            for v in &c {
                assert_eq!(v.iter().map(|e| e.1).sum::<u32>(), n);
            }
        }
        assert_eq!(compositions_count(20, 161), binom(180, 160));
        assert_eq!(binom(10, 3), 120);
    }

    #[test]
    fn candidate_examples() {
        let c = candidate_points(&LowerSet::fixed_cost(2, 1.0), &params(0.5, -2.0, 2.0)).unwrap();
        assert!(c.contains(&vec![0.0, 0.0]));
        for p in &c {
            assert!(p == &vec![0.0, 0.0] || (p[0] + p[1] + 1.0).abs() < 1e-12);
        }
        assert!(c.contains(&vec![2.0, -3.0]));
        let a = LowerSet::orthant(vec![1.0, -1.0]);
        assert_eq!(candidate_points(&a, &params(0.5, -2.0, 2.0)).unwrap(), vec![vec![1.0, -1.0]]);
        let m = lower_from_generators(vec![vec![0.0, 0.0], vec![2.0, -1.0], vec![1.0, -2.0]]).unwrap();
        assert_eq!(
            candidate_points(&m, &params(0.5, -2.0, 2.0)).unwrap(),
            vec![vec![0.0, 0.0], vec![2.0, -1.0]]
        );
    }

    #[test]
    fn essinf_gives_fixed_points() {
        let x1 = lower_from_generators(vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let x2 = lower_from_generators(vec![vec![-2.0, 2.0], vec![2.0, -2.0]]).unwrap();
        let x = RandomLowerSet::new(vec![x1, x2]).unwrap();
        let sc = Scenario::new(
            ProbSpace::uniform(2).unwrap(),
            VectorRiskSpec::uniform(RiskSpec::EssInf, 2),
            PortfolioSpec::Custom(x.clone()),
            params(0.5, -3.0, 3.0),
        )
        .unwrap();
        let r = selection_risk(&sc).unwrap();
        assert_eq!(r, negate(&fixed_points(&x).unwrap()));
        assert_eq!(r.minimal_points, vec![vec![-1.0, 2.0], vec![2.0, -1.0]]);
    }

    #[test]
    fn deterministic_orthant() {
        let sc = Scenario::new(
            ProbSpace::new(vec![0.25, 0.75]).unwrap(),
            VectorRiskSpec::uniform(RiskSpec::avar(0.5).unwrap(), 2),
            custom(vec![LowerSet::orthant(vec![1.0, -2.0]); 2]),
            params(0.5, -3.0, 3.0),
        )
        .unwrap();
        assert_eq!(selection_risk(&sc).unwrap().minimal_points, vec![vec![-1.0, 2.0]]);
        assert!(!is_acceptable(&sc).unwrap());
        let sc = Scenario {
            portfolio: custom(vec![LowerSet::negative_orthant(2); 2]),
            ..sc
        };
        assert!(is_acceptable(&sc).unwrap());
    }

    #[test]
    fn budget_is_reported() {
        let sc = Scenario::new(
            ProbSpace::uniform(20).unwrap(),
            VectorRiskSpec::uniform(RiskSpec::avar(0.75).unwrap(), 2),
            PortfolioSpec::FixedCost {
                c: RandomVector::deterministic(&[0.0, 0.0], 20),
                kappa: 1.0,
            },
            params(0.05, -3.0, 1.0),
        )
        .unwrap();
        match selection_risk(&sc) {
            Err(Error::SelectionBudgetExceeded { required, cap }) => {
                assert!(required > cap as u128);
                assert_eq!(cap, DEFAULT_SELECTION_CAP);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partition_is_inside_general() {
        let sp = ProbSpace::uniform(3).unwrap();
        let spec = VectorRiskSpec::uniform(RiskSpec::avar(0.75).unwrap(), 2);
        let port = PortfolioSpec::FixedCost {
            c: RandomVector::deterministic(&[0.0, 0.0], 3),
            kappa: 1.0,
        };
        let p = params(0.25, -2.0, 2.0);
        let general = selection_risk(&Scenario::new(sp.clone(), spec.clone(), port.clone(), p.clone()).unwrap()).unwrap();
        let part = selection_risk(&Scenario::new(sp, spec, port, p.with_mode(EngineMode::Partition)).unwrap()).unwrap();
        for q in &part.minimal_points {
            assert!(general.contains(q));
        }
    }

    #[test]
    fn non_law_invariant_matches_reduced_on_law_invariant_spec() {
        // ScenarioMax with the single density 1 is the negative expectation,
        // evaluated through the unreduced path
        let sp = ProbSpace::uniform(3).unwrap();
        let ones = crate::prob::RandomVariable::constant(1.0, 3);
        let mean = RiskSpec::ScenarioMax(vec![crate::risk::DensityScenario {
            density: ones,
            penalty: 0.0,
        }]);
        let c = RandomVector::new(vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![-1.0, 2.0]]).unwrap();
        let port = PortfolioSpec::FiniteTransfers {
            c,
            m: vec![vec![0.0, 0.0], vec![1.0, -1.0]],
        };
        let p = params(0.5, -3.0, 3.0);
        let a = selection_risk(
            &Scenario::new(sp.clone(), VectorRiskSpec::uniform(mean, 2), port.clone(), p.clone()).unwrap(),
        )
        .unwrap();
        let b = selection_risk(
            &Scenario::new(sp, VectorRiskSpec::uniform(RiskSpec::NegExpectation, 2), port, p).unwrap(),
        )
        .unwrap();
        let w = Window::square(-3.0, 3.0);
        assert!(curve_sup_distance(&a.boundary_curve(w, 0.25).unwrap(), &b.boundary_curve(w, 0.25).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn selection_expectation_examples() {
        let f = lower_from_generators(vec![vec![0.0, 0.0], vec![2.0, -2.0]]).unwrap();
        let one = ProbSpace::uniform(1).unwrap();
        let x1 = RandomLowerSet::deterministic(f.clone(), 1);
        assert_eq!(selection_expectation(&x1, &one).unwrap(), f);
        let x2 = RandomLowerSet::deterministic(f, 2);
        let e = selection_expectation(&x2, &ProbSpace::uniform(2).unwrap()).unwrap();
        assert_eq!(e.apexes(), vec![vec![0.0, 0.0], vec![1.0, -1.0], vec![2.0, -2.0]]);
        let o = RandomLowerSet::deterministic(LowerSet::orthant(vec![1.0, 3.0]), 4);
        assert_eq!(
            selection_expectation(&o, &ProbSpace::new(vec![0.125, 0.125, 0.25, 0.5]).unwrap()).unwrap(),
            LowerSet::orthant(vec![1.0, 3.0])
        );
    }

    #[test]
    fn rho_z_examples() {
        let sp = ProbSpace::uniform(2).unwrap();
        let ones = vec![RandomVector::deterministic(&[1.0, 1.0], 2)];
        let f = lower_from_generators(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let x = RandomLowerSet::deterministic(f.clone(), 2);
        let r = rho_z(&x, &sp, &ones).unwrap();
        let hull = convex_hull(&f).unwrap();
        let r2 = rho_z_convex(&[hull.clone(), hull], &sp, &ones).unwrap();
        let w = Window::square(-2.0, 2.0);
        let (a, b) = (r.boundary_curve(w, 0.125).unwrap(), r2.boundary_curve(w, 0.125).unwrap());
        assert!(curve_sup_distance(&a, &b).unwrap() < 1e-9);
        assert_eq!(a.value_at(-0.5), Some(-0.5));
        assert_eq!(a.value_at(-1.5), None);
        // convex X: E(-X)
        let g = LowerSet::orthant(vec![1.0, -1.0]);
        let r = rho_z(&RandomLowerSet::deterministic(g.clone(), 2), &sp, &ones).unwrap();
        let expected = negate(&g).boundary_curve(w, 0.125).unwrap();
        assert!(curve_sup_distance(&r.boundary_curve(w, 0.125).unwrap(), &expected).unwrap() < 1e-12);
        let bad = vec![RandomVector::deterministic(&[2.0, 1.0], 2)];
        assert!(matches!(rho_z(&x, &sp, &bad), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn risk_convexity_examples() {
        let sp = ProbSpace::uniform(2).unwrap();
        let p = params(0.25, -2.0, 2.0);
        let i1 = LowerSet::fixed_cost(2, 1.0);
        let ess = VectorRiskSpec::uniform(RiskSpec::EssInf, 2);
        assert!(is_risk_convex(&i1, &ess, &sp, &p).unwrap());
        let f = lower_from_generators(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(is_risk_convex(&f, &ess, &sp, &p).unwrap());
        let mean = VectorRiskSpec::uniform(RiskSpec::NegExpectation, 2);
        assert!(is_risk_convex(&LowerSet::sum_half_space(2, 0.5), &mean, &sp, &p).unwrap());
        assert!(is_risk_convex(&LowerSet::orthant(vec![1.0, -1.0]), &mean, &sp, &p).unwrap());
        assert!(!is_risk_convex(&f, &mean, &sp, &p).unwrap());
        let avar = VectorRiskSpec::uniform(RiskSpec::avar(0.75).unwrap(), 2);
        let w = risk_convexity_witness(&i1, &avar, &sp, &p).unwrap().expect("violation");
        let neg: Vec<f64> = w.risk.iter().map(|v| -v).collect();
        assert!(!i1.contains(&neg).unwrap());
    }

    #[test]
    fn defect_examples() {
        let w = Window::square(-2.0, 2.0);
        let r = RiskSet::from_points(2, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((convexity_defect(&r, w, 0.5).unwrap() - 0.5).abs() < 1e-12);
        let one = RiskSet::from_points(2, vec![vec![0.3, 0.2]]);
        assert_eq!(convexity_defect(&one, w, 0.5).unwrap(), 0.0);
        let line = negate(&LowerSet::sum_half_space(2, 0.0));
        assert_eq!(convexity_defect(&line, w, 0.5).unwrap(), 0.0);
    }
}
