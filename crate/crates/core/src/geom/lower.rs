use std::cmp::Ordering;

use super::upper::{RiskSet, UpperHalfSpace};
use super::{dot, grid_points, leq, lex_cmp, pareto_maximal, BOUNDARY_TOL};
use crate::error::{Error, Result};

const NORMAL_TOL: f64 = 1e-12;

/// Building block of a lower set.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    /// `apex + R_-^d`
    Orthant(Vec<f64>),
    /// `{x : normal . x <= offset}` with a nonnegative normal summing to one.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    Full,
}

impl Primitive {
    /// Half-space with the normal brought to canonical form.
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.iter().any(|&n| !(n >= 0.0)) {
            return Err(Error::InvalidParams("half-space normal must be nonnegative".into()));
        }
        let s: f64 = normal.iter().sum();
        if !(s > 0.0) {
            return Err(Error::InvalidParams("half-space normal must be nonzero".into()));
        }
        Ok(Self::half_space_unchecked(normal, offset, s))
    }

    fn half_space_unchecked(normal: Vec<f64>, offset: f64, s: f64) -> Self {
        let normal: Vec<f64> = normal.into_iter().map(|n| n / s).collect();
        let offset = offset / s;
        if normal.len() == 1 {
            return Primitive::Orthant(vec![offset]);
        }
        Primitive::HalfSpace { normal, offset }
    }

    /// `H_t = {x : x_1 + ... + x_d <= t}`.
    pub fn sum_half_space(d: usize, t: f64) -> Self {
        Self::half_space_unchecked(vec![1.0; d], t, d as f64)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Primitive::Orthant(a) => Some(a.len()),
            Primitive::HalfSpace { normal, .. } => Some(normal.len()),
            Primitive::Full => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Primitive::Orthant(a) => a.iter().zip(x).all(|(a, x)| *x <= a + BOUNDARY_TOL),
            Primitive::HalfSpace { normal, offset } => dot(normal, x) <= offset + BOUNDARY_TOL,
            Primitive::Full => true,
        }
    }

    /// Exact inclusion test between primitives.
    pub fn is_subset_of(&self, other: &Primitive) -> bool {
        use Primitive::*;
        match (self, other) {
            (_, Full) => true,
            (Full, _) => false,
            (Orthant(a), Orthant(b)) => leq(a, b),
            (Orthant(a), HalfSpace { normal, offset }) => dot(normal, a) <= *offset,
            (HalfSpace { normal: n, offset: s }, HalfSpace { normal: m, offset: t }) => {
                same_normal(n, m) && s <= t
            }
            (HalfSpace { .. }, Orthant(_)) => false,
        }
    }

    fn translate(&self, v: &[f64]) -> Self {
        match self {
            Primitive::Orthant(a) => Primitive::Orthant(a.iter().zip(v).map(|(a, v)| a + v).collect()),
            Primitive::HalfSpace { normal, offset } => Primitive::HalfSpace {
                normal: normal.clone(),
                offset: offset + dot(normal, v),
            },
            Primitive::Full => Primitive::Full,
        }
    }

    fn scale(&self, z: &[f64]) -> Self {
        match self {
            Primitive::Orthant(a) => Primitive::Orthant(a.iter().zip(z).map(|(a, z)| a * z).collect()),
            Primitive::HalfSpace { normal, offset } => {
                let n: Vec<f64> = normal.iter().zip(z).map(|(n, z)| n / z).collect();
                let s: f64 = n.iter().sum();
                Self::half_space_unchecked(n, *offset, s)
            }
            Primitive::Full => Primitive::Full,
        }
    }

    fn sum(&self, other: &Primitive) -> Primitive {
        use Primitive::*;
        match (self, other) {
            (Full, _) | (_, Full) => Full,
            (Orthant(a), Orthant(b)) => Orthant(a.iter().zip(b).map(|(a, b)| a + b).collect()),
            (Orthant(a), HalfSpace { normal, offset }) | (HalfSpace { normal, offset }, Orthant(a)) => {
                HalfSpace {
                    normal: normal.clone(),
                    offset: offset + dot(normal, a),
                }
            }
            (HalfSpace { normal: n, offset: s }, HalfSpace { normal: m, offset: t }) => {
                if same_normal(n, m) {
                    HalfSpace {
                        normal: n.clone(),
                        offset: s + t,
                    }
                } else {
                    Full
                }
            }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Primitive::Orthant(_) => 0,
            Primitive::HalfSpace { .. } => 1,
            Primitive::Full => 2,
        }
    }

    fn canonical_cmp(&self, other: &Primitive) -> Ordering {
        use Primitive::*;
        match (self, other) {
            (Orthant(a), Orthant(b)) => lex_cmp(a, b),
            (HalfSpace { normal: n, offset: s }, HalfSpace { normal: m, offset: t }) => {
                lex_cmp(n, m).then(s.total_cmp(t))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

fn same_normal(n: &[f64], m: &[f64]) -> bool {
    n.iter().zip(m).all(|(a, b)| (a - b).abs() <= NORMAL_TOL)
}

/// Finite union of primitives in canonical pruned form.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerSet {
    dim: usize,
    prims: Vec<Primitive>,
}

impl LowerSet {
    pub fn new(dim: usize, prims: Vec<Primitive>) -> Result<Self> {
        if prims.is_empty() {
            return Err(Error::EmptyGeneratorSet);
        }
        for p in &prims {
            if let Some(d) = p.dim() {
                if d != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: d });
                }
            }
        }
        Ok(Self::canonical(dim, prims))
    }

    fn canonical(dim: usize, mut prims: Vec<Primitive>) -> Self {
        prims.sort_by(|a, b| a.canonical_cmp(b));
        prims.dedup();
        let keep: Vec<bool> = (0..prims.len())
            .map(|i| {
                !prims
                    .iter()
                    .enumerate()
                    .any(|(j, q)| j != i && prims[i].is_subset_of(q))
            })
            .collect();
        let prims = prims
            .into_iter()
            .zip(keep)
            .filter_map(|(p, k)| k.then_some(p))
            .collect();
        Self { dim, prims }
    }

    /// `R_-^d`.
    pub fn negative_orthant(d: usize) -> Self {
        Self {
            dim: d,
            prims: vec![Primitive::Orthant(vec![0.0; d])],
        }
    }

    pub fn orthant(apex: Vec<f64>) -> Self {
        Self {
            dim: apex.len(),
            prims: vec![Primitive::Orthant(apex)],
        }
    }

    /// `H_t`.
    pub fn sum_half_space(d: usize, t: f64) -> Self {
        Self::canonical(d, vec![Primitive::sum_half_space(d, t)])
    }

    /// Fixed-cost transfer set `I_kappa = R_-^d U H_{-kappa}`.
    pub fn fixed_cost(d: usize, kappa: f64) -> Self {
        Self::canonical(
            d,
            vec![
                Primitive::Orthant(vec![0.0; d]),
                Primitive::sum_half_space(d, -kappa),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.prims
    }

    /// Orthant apexes, in canonical order.
    pub fn apexes(&self) -> Vec<Vec<f64>> {
        self.prims
            .iter()
            .filter_map(|p| match p {
                Primitive::Orthant(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_staircase(&self) -> bool {
        self.prims.iter().all(|p| matches!(p, Primitive::Orthant(_)))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self.prims.iter().any(|p| p.contains(x)))
    }

    /// Scales every coordinate by the scalar `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        scale_coordinatewise(self, &vec![c; self.dim])
    }

    /// Largest absolute coordinate among apexes and half-space diagonal
    /// anchors; used to size sampling windows.
    pub fn anchor_extent(&self) -> f64 {
        self.prims
            .iter()
            .map(|p| match p {
                Primitive::Orthant(a) => a.iter().fold(0.0f64, |m, x| m.max(x.abs())),
                Primitive::HalfSpace { offset, .. } => offset.abs(),
                Primitive::Full => 0.0,
            })
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: d,
            });
        }
        Ok(())
    }

    /// Bit-level key identifying the canonical form.
    pub(crate) fn key(&self) -> Vec<u64> {
        let mut key = vec![self.dim as u64];
        for p in &self.prims {
            key.push(p.rank() as u64);
            match p {
                Primitive::Orthant(a) => key.extend(a.iter().map(|x| x.to_bits())),
                Primitive::HalfSpace { normal, offset } => {
                    key.extend(normal.iter().map(|x| x.to_bits()));
                    key.push(offset.to_bits());
                }
                Primitive::Full => {}
            }
        }
        key
    }

    /// `max { y : (x, y) in self }` in the plane; `None` when the section is
    /// empty.
    pub(crate) fn upper_section(&self, x: f64) -> Result<Option<f64>> {
        let mut best: Option<f64> = None;
        for p in &self.prims {
            let y = match p {
                Primitive::Orthant(a) => (x <= a[0]).then_some(a[1]),
                Primitive::HalfSpace { normal, offset } => {
                    if normal[1] > 0.0 {
                        Some((offset - normal[0] * x) / normal[1])
                    } else if normal[0] * x <= *offset {
                        return Err(Error::Unbounded);
                    } else {
                        None
                    }
                }
                Primitive::Full => return Err(Error::Unbounded),
            };
            if let Some(y) = y {
                best = Some(best.map_or(y, |b: f64| b.max(y)));
            }
        }
        Ok(best)
    }
}

pub fn lower_from_generators(points: Vec<Vec<f64>>) -> Result<LowerSet> {
    let dim = points.first().ok_or(Error::EmptyGeneratorSet)?.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }
    let prims = pareto_maximal(points).into_iter().map(Primitive::Orthant).collect();
    Ok(LowerSet { dim, prims })
}

fn same_dim(a: &LowerSet, b: &LowerSet) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            got: b.dim,
        });
    }
    Ok(())
}

pub fn union(a: &LowerSet, b: &LowerSet) -> Result<LowerSet> {
    same_dim(a, b)?;
    let prims = a.prims.iter().chain(&b.prims).cloned().collect();
    Ok(LowerSet::canonical(a.dim, prims))
}

/// Closed Minkowski sum.
pub fn minkowski(a: &LowerSet, b: &LowerSet) -> Result<LowerSet> {
    same_dim(a, b)?;
    let prims = a
        .prims
        .iter()
        .flat_map(|p| b.prims.iter().map(move |q| p.sum(q)))
        .collect();
    Ok(LowerSet::canonical(a.dim, prims))
}

pub fn translate(a: &LowerSet, v: &[f64]) -> Result<LowerSet> {
    a.check_dim(v.len())?;
    let prims = a.prims.iter().map(|p| p.translate(v)).collect();
    Ok(LowerSet::canonical(a.dim, prims))
}

/// `{ z x : x in A }` with coordinatewise product.
pub fn scale_coordinatewise(a: &LowerSet, z: &[f64]) -> Result<LowerSet> {
    a.check_dim(z.len())?;
    if z.iter().any(|&z| !(z > 0.0)) {
        return Err(Error::NonPositiveScale);
    }
    let prims = a.prims.iter().map(|p| p.scale(z)).collect();
    Ok(LowerSet::canonical(a.dim, prims))
}

/// Reflection `-A`, an upper set.
pub fn negate(a: &LowerSet) -> RiskSet {
    let mut points = Vec::new();
    let mut half_spaces = Vec::new();
    let mut whole = false;
    for p in &a.prims {
        match p {
            Primitive::Orthant(apex) => points.push(apex.iter().map(|x| -x).collect()),
            Primitive::HalfSpace { normal, offset } => half_spaces.push(UpperHalfSpace {
                normal: normal.clone(),
                level: -offset,
            }),
            Primitive::Full => whole = true,
        }
    }
    let mut r = RiskSet::from_parts(a.dim, points, half_spaces);
    r.whole_space = whole;
    r
}

/// Frontier samples of a planar lower set: `(x, max{y : (x, y) in A})` for
/// every grid abscissa in `[xmin, xmax]`, together with all apexes, pruned to
/// the maximal points.
pub fn pareto_sample(a: &LowerSet, window: (f64, f64), step: f64) -> Result<Vec<Vec<f64>>> {
    if a.dim != 2 {
        return Err(Error::UnsupportedDimension(a.dim));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParams("grid step must be positive".into()));
    }
    let mut pts = a.apexes();
    for x in grid_points(window.0, window.1, step) {
        if let Some(y) = a.upper_section(x)? {
            pts.push(vec![x, y]);
        }
    }
    if pts.is_empty() {
        return Ok(pts);
    }
    Ok(pareto_maximal(pts))
}

/// Realisation of a random lower set on a finite space, one set per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomLowerSet {
    per_atom: Vec<LowerSet>,
}

impl RandomLowerSet {
    pub fn new(per_atom: Vec<LowerSet>) -> Result<Self> {
        let first = per_atom.first().ok_or(Error::EmptySpace)?;
        for s in &per_atom {
            same_dim(first, s)?;
        }
        Ok(Self { per_atom })
    }

    pub fn deterministic(set: LowerSet, atoms: usize) -> Self {
        Self {
            per_atom: vec![set; atoms],
        }
    }

    pub fn atoms(&self) -> usize {
        self.per_atom.len()
    }

    pub fn dim(&self) -> usize {
        self.per_atom[0].dim
    }

    pub fn atom(&self, i: usize) -> &LowerSet {
        &self.per_atom[i]
    }

    pub fn sets(&self) -> &[LowerSet] {
        &self.per_atom
    }

    pub fn is_deterministic(&self) -> bool {
        self.per_atom.windows(2).all(|w| w[0] == w[1])
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            per_atom: perm.iter().map(|&i| self.per_atom[i].clone()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&LowerSet) -> Result<LowerSet>) -> Result<Self> {
        Ok(Self {
            per_atom: self.per_atom.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

enum Piece {
    Exact(Primitive),
    /// Intersection of two primitives that is not a primitive itself.
    Residual(Primitive, Primitive),
}

fn intersect_prims(p: &Primitive, q: &Primitive) -> Piece {
    use Primitive::*;
    if p.is_subset_of(q) {
        return Piece::Exact(p.clone());
    }
    if q.is_subset_of(p) {
        return Piece::Exact(q.clone());
    }
    match (p, q) {
        (Orthant(a), Orthant(b)) => Piece::Exact(Orthant(a.iter().zip(b).map(|(a, b)| a.min(*b)).collect())),
        (Orthant(a), HalfSpace { normal, offset }) | (HalfSpace { normal, offset }, Orthant(a)) => {
            let support: Vec<usize> = (0..normal.len()).filter(|&i| normal[i] > 0.0).collect();
            if let [i] = support[..] {
                let mut apex = a.clone();
                apex[i] = apex[i].min(offset / normal[i]);
                Piece::Exact(Orthant(apex))
            } else {
                Piece::Residual(p.clone(), q.clone())
            }
        }
        _ => Piece::Residual(p.clone(), q.clone()),
    }
}

fn intersect(a: &LowerSet, b: &LowerSet) -> Result<LowerSet> {
    same_dim(a, b)?;
    let mut exact = Vec::new();
    let mut residual = Vec::new();
    for p in &a.prims {
        for q in &b.prims {
            match intersect_prims(p, q) {
                Piece::Exact(e) => exact.push(e),
                Piece::Residual(x, y) => residual.push((x, y)),
            }
        }
    }
    // a residual piece is harmless when an exact piece already covers it
    for (x, y) in residual {
        let covered = exact.iter().any(|e| x.is_subset_of(e) || y.is_subset_of(e));
        if !covered {
            return Err(Error::NotRepresentable(
                "intersection of an orthant and a half-space (or two half-spaces with different normals)".into(),
            ));
        }
    }
    Ok(LowerSet::canonical(a.dim, exact))
}

/// Points lying in every realisation, `F_X = X(w_1) n ... n X(w_n)`.
pub fn fixed_points(x: &RandomLowerSet) -> Result<LowerSet> {
    let mut acc = x.per_atom[0].clone();
    for s in &x.per_atom[1..] {
        acc = intersect(&acc, s)?;
    }
    Ok(acc)
}
