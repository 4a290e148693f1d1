//! Exact algebra of lower closed sets built from translated negative orthants
//! and nonnegative-normal half-spaces, plus upper-set results and sampled
//! boundary curves for the planar case.

mod curve;
mod hull;
mod lower;
mod upper;

pub use curve::{curve_sup_distance, lower_convex_envelope, BoundaryCurve, Window};
pub use hull::{convex_hull, ConvexLower2};
pub use lower::{
    fixed_points, lower_from_generators, minkowski, negate, pareto_sample, scale_coordinatewise,
    translate, union, LowerSet, Primitive, RandomLowerSet,
};
pub use upper::{CurvedPart, RiskSet, UpperHalfSpace};
pub(crate) use upper::envelope_branch;

/// Name used in the interface descriptions for a computed risk set.
pub type RiskSetResult = RiskSet;

/// Membership tolerance on set boundaries.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Multiples of `step` lying in `[lo, hi]`, anchored at zero so that halving
/// the step refines the grid.
pub fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || lo > hi {
        return Vec::new();
    }
    let k0 = (lo / step - 1e-9).ceil() as i64;
    let k1 = (hi / step + 1e-9).floor() as i64;
    // k / m is correctly rounded, so grids with steps 1/m and 1/(2m) agree
    // bit for bit on shared points
    let m = (1.0 / step).round();
    if m >= 1.0 && (m * step - 1.0).abs() <= 1e-12 {
        return (k0..=k1).map(|k| k as f64 / m).collect();
    }
    (k0..=k1).map(|k| k as f64 * step).collect()
}

/// `a <= b` coordinatewise.
pub(crate) fn leq(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Minimal elements of `points` under the coordinatewise order (the generators
/// of the upper set `points + R_+^d`), sorted lexicographically.
pub fn pareto_minimal(mut points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    points.sort_by(|a, b| lex_cmp(a, b));
    points.dedup();
    if points.first().is_some_and(|p| p.len() == 2) {
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut best = f64::INFINITY;
        for p in points {
            if p[1] < best {
                best = p[1];
                out.push(p);
            }
        }
        return out;
    }
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for p in points {
        // lexicographic order guarantees nothing later dominates anything earlier
        if !kept.iter().any(|q| leq(q, &p)) {
            kept.push(p);
        }
    }
    kept
}

/// Maximal elements (generators of `points + R_-^d`), sorted lexicographically.
pub fn pareto_maximal(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let neg: Vec<Vec<f64>> = points
        .into_iter()
        .map(|p| p.into_iter().map(|x| -x).collect())
        .collect();
    let mut out: Vec<Vec<f64>> = pareto_minimal(neg)
        .into_iter()
        .map(|p| p.into_iter().map(|x| -x).collect())
        .collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}
