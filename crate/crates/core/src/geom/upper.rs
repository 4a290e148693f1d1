use super::curve::{BoundaryCurve, Window};
use super::hull::ConvexLower2;
use super::lower::{LowerSet, Primitive};
use super::{dot, leq, pareto_minimal, BOUNDARY_TOL};
use crate::error::{Error, Result};

/// `{y : normal . y >= level}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperHalfSpace {
    pub normal: Vec<f64>,
    pub level: f64,
}

impl UpperHalfSpace {
    pub fn contains(&self, y: &[f64]) -> bool {
        dot(&self.normal, y) >= self.level - BOUNDARY_TOL
    }

    fn boundary(&self, x: f64) -> Option<f64> {
        let n = &self.normal;
        if n[1] > 0.0 {
            Some((self.level - n[0] * x) / n[1])
        } else if n[0] * x >= self.level - BOUNDARY_TOL {
            Some(f64::NEG_INFINITY)
        } else {
            None
        }
    }
}

/// Planar components whose boundary is not piecewise axis-parallel.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvedPart {
    /// Risk set of the fixed-cost transfer set under AVaR with `alpha > 1/2`:
    /// `{(-x, y) : x >= 0, y >= min(kappa + x, (sqrt(x) + sqrt(c))^2)}` and its
    /// mirror image, with `c = kappa (1/alpha - 1)`, closed upwards.
    FixedCostEnvelope { kappa: f64, alpha: f64 },
    /// Reflection `-K` of a convex lower set.
    Convex(ConvexLower2),
    /// Intersection of the listed sets.
    Intersection(Vec<RiskSet>),
    /// The set shifted by the vector.
    Shifted(Box<RiskSet>, [f64; 2]),
}

impl CurvedPart {
    fn boundary(&self, x: f64) -> Option<f64> {
        match self {
            CurvedPart::FixedCostEnvelope { kappa, alpha } => envelope_boundary(*kappa, *alpha, x),
            CurvedPart::Convex(k) => k.upper_section(-x).map(|s| -s),
            CurvedPart::Intersection(sets) => {
                let mut b = f64::NEG_INFINITY;
                for s in sets {
                    b = b.max(s.lower_boundary(x)?);
                }
                Some(b)
            }
            CurvedPart::Shifted(s, v) => s.lower_boundary(x - v[0]).map(|y| y + v[1]),
        }
    }
}

/// Left branch `min(kappa + x, (sqrt x + sqrt c)^2)` of the envelope.
pub(crate) fn envelope_branch(kappa: f64, alpha: f64, x: f64) -> f64 {
    let c = kappa * (1.0 - alpha) / alpha;
    (kappa + x).min(x + c + 2.0 * (x * c).sqrt())
}

fn envelope_boundary(kappa: f64, alpha: f64, u: f64) -> Option<f64> {
    let c = kappa * (1.0 - alpha) / alpha;
    let left = envelope_branch(kappa, alpha, (-u).max(0.0));
    // mirror branch: lowest -x with envelope_branch(x) <= u
    let mut reach = u - kappa;
    if u >= c {
        reach = reach.max(u + c - 2.0 * (u * c).sqrt());
    }
    if reach >= 0.0 {
        Some(left.min(-reach))
    } else {
        Some(left)
    }
}

/// Upper closed set in `R^d`: union of `p + R_+^d` over the minimal points,
/// upper half-spaces and planar curved parts.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSet {
    pub dim: usize,
    pub minimal_points: Vec<Vec<f64>>,
    pub half_spaces: Vec<UpperHalfSpace>,
    pub curved: Vec<CurvedPart>,
    pub whole_space: bool,
}

impl RiskSet {
    pub fn from_parts(dim: usize, points: Vec<Vec<f64>>, half_spaces: Vec<UpperHalfSpace>) -> Self {
        let mut r = Self {
            dim,
            minimal_points: Vec::new(),
            half_spaces,
            curved: Vec::new(),
            whole_space: false,
        };
        r.minimal_points = if points.is_empty() { points } else { pareto_minimal(points) };
        r.canonicalize();
        r
    }

    pub fn from_points(dim: usize, points: Vec<Vec<f64>>) -> Self {
        Self::from_parts(dim, points, Vec::new())
    }

    pub fn empty(dim: usize) -> Self {
        Self::from_parts(dim, Vec::new(), Vec::new())
    }

    pub fn curved(dim: usize, part: CurvedPart) -> Self {
        let mut r = Self::empty(dim);
        r.curved.push(part);
        r
    }

    fn canonicalize(&mut self) {
        self.half_spaces.sort_by(|a, b| {
            super::lex_cmp(&a.normal, &b.normal).then(a.level.total_cmp(&b.level))
        });
        let mut hs: Vec<UpperHalfSpace> = Vec::new();
        for h in self.half_spaces.drain(..) {
            match hs.last() {
                Some(last) if last.normal.iter().zip(&h.normal).all(|(a, b)| (a - b).abs() <= 1e-12) => {}
                _ => hs.push(h),
            }
        }
        self.half_spaces = hs;
        let hs = &self.half_spaces;
        self.minimal_points
            .retain(|p| !hs.iter().any(|h| dot(&h.normal, p) >= h.level));
    }

    pub fn is_polyhedral(&self) -> bool {
        self.curved.is_empty()
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        if self.whole_space {
            return true;
        }
        if self.minimal_points.iter().any(|p| leq_tol(p, y)) || self.half_spaces.iter().any(|h| h.contains(y)) {
            return true;
        }
        if y.len() == 2 {
            return self
                .curved
                .iter()
                .any(|c| c.boundary(y[0]).is_some_and(|b| y[1] >= b - BOUNDARY_TOL));
        }
        false
    }

    /// `min { y : (x, y) in self }` for planar sets; `None` where the vertical
    /// line misses the set, `-inf` where it is contained in it.
    pub fn lower_boundary(&self, x: f64) -> Option<f64> {
        if self.whole_space {
            return Some(f64::NEG_INFINITY);
        }
        let mut best: Option<f64> = None;
        let mut take = |y: Option<f64>| {
            if let Some(y) = y {
                best = Some(best.map_or(y, |b: f64| b.min(y)));
            }
        };
        for p in &self.minimal_points {
            take((p[0] <= x + BOUNDARY_TOL).then_some(p[1]));
        }
        for h in &self.half_spaces {
            take(h.boundary(x));
        }
        for c in &self.curved {
            take(c.boundary(x));
        }
        best
    }

    pub fn boundary_curve(&self, window: Window, step: f64) -> Result<BoundaryCurve> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        BoundaryCurve::sample(window, step, |x| self.lower_boundary(x))
    }

    pub fn translate(&self, v: &[f64]) -> Result<RiskSet> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let points = self
            .minimal_points
            .iter()
            .map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect())
            .collect();
        let hs = self
            .half_spaces
            .iter()
            .map(|h| UpperHalfSpace {
                normal: h.normal.clone(),
                level: h.level + dot(&h.normal, v),
            })
            .collect();
        let mut r = RiskSet::from_parts(self.dim, points, hs);
        r.whole_space = self.whole_space;
        if !self.curved.is_empty() {
            let mut inner = RiskSet::empty(self.dim);
            inner.curved = self.curved.clone();
            r.curved.push(CurvedPart::Shifted(Box::new(inner), [v[0], v[1]]));
        }
        Ok(r)
    }

    pub fn union(&self, other: &RiskSet) -> Result<RiskSet> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let points = self.minimal_points.iter().chain(&other.minimal_points).cloned().collect();
        let hs = self.half_spaces.iter().chain(&other.half_spaces).cloned().collect();
        let mut r = RiskSet::from_parts(self.dim, points, hs);
        r.whole_space = self.whole_space || other.whole_space;
        r.curved = self.curved.iter().chain(&other.curved).cloned().collect();
        Ok(r)
    }

    pub fn intersection(sets: Vec<RiskSet>) -> Result<RiskSet> {
        let first = sets.first().ok_or(Error::EmptyGeneratorSet)?;
        if first.dim != 2 {
            return Err(Error::UnsupportedDimension(first.dim));
        }
        if sets.len() == 1 {
            return Ok(sets.into_iter().next().unwrap());
        }
        Ok(RiskSet::curved(2, CurvedPart::Intersection(sets)))
    }

    /// Reflection back to a lower set; fails on curved parts.
    pub fn negate(&self) -> Result<LowerSet> {
        if !self.is_polyhedral() {
            return Err(Error::NotRepresentable("curved risk set".into()));
        }
        let mut prims: Vec<Primitive> = self
            .minimal_points
            .iter()
            .map(|p| Primitive::Orthant(p.iter().map(|x| -x).collect()))
            .collect();
        for h in &self.half_spaces {
            prims.push(Primitive::half_space(h.normal.clone(), -h.level)?);
        }
        if self.whole_space {
            prims.push(Primitive::Full);
        }
        LowerSet::new(self.dim, prims)
    }

    /// Closed convex hull of a planar polyhedral set.
    pub fn convex_hull(&self) -> Result<RiskSet> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let h = super::hull::convex_hull(&self.negate()?)?;
        Ok(RiskSet::curved(2, CurvedPart::Convex(h)))
    }
}

fn leq_tol(p: &[f64], y: &[f64]) -> bool {
    p.iter().zip(y).all(|(a, b)| *a <= b + BOUNDARY_TOL) || leq(p, y)
}
