use super::lower::{LowerSet, Primitive};
use super::{pareto_maximal, BOUNDARY_TOL};
use crate::error::{Error, Result};

/// Closed convex lower set in the plane.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexLower2 {
    /// Region below the concave chain through the vertices (ascending x,
    /// descending y), extended by `R_-^2`.
    Chain(Vec<[f64; 2]>),
    HalfSpace { normal: [f64; 2], offset: f64 },
    Full,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Upper concave chain of the maximal points.
fn chain_from(points: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let pts = pareto_maximal(points.iter().map(|p| p.to_vec()).collect());
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        let p = [p[0], p[1]];
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) >= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

impl ConvexLower2 {
    pub fn from_points(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGeneratorSet);
        }
        Ok(ConvexLower2::Chain(chain_from(points)))
    }

    /// `max { y : (x, y) in self }`; `+inf` on half-spaces with a vertical
    /// boundary, `None` where the section is empty.
    pub fn upper_section(&self, x: f64) -> Option<f64> {
        match self {
            ConvexLower2::Chain(v) => {
                let last = v[v.len() - 1];
                if x > last[0] + BOUNDARY_TOL {
                    return None;
                }
                if x <= v[0][0] {
                    return Some(v[0][1]);
                }
                if x >= last[0] {
                    return Some(last[1]);
                }
                let k = v.partition_point(|p| p[0] < x);
                let (a, b) = (v[k - 1], v[k]);
                let w = (x - a[0]) / (b[0] - a[0]);
                Some(a[1] + w * (b[1] - a[1]))
            }
            ConvexLower2::HalfSpace { normal, offset } => {
                if normal[1] > 0.0 {
                    Some((offset - normal[0] * x) / normal[1])
                } else if normal[0] * x <= offset + BOUNDARY_TOL {
                    Some(f64::INFINITY)
                } else {
                    None
                }
            }
            ConvexLower2::Full => Some(f64::INFINITY),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.upper_section(p[0]).is_some_and(|y| p[1] <= y + BOUNDARY_TOL)
    }

    /// `sup { y : (x, y) in self }`, infinite unless the set is a chain.
    fn sup_y(&self) -> f64 {
        match self {
            ConvexLower2::Chain(v) => v[0][1],
            _ => f64::INFINITY,
        }
    }

    fn sup_x(&self) -> f64 {
        match self {
            ConvexLower2::Chain(v) => v[v.len() - 1][0],
            _ => f64::INFINITY,
        }
    }

    /// `{ z x : x in self }` for `z >= 0`, lower closed. A zero factor
    /// collapses its coordinate and keeps the lower closure of the projection
    /// onto the other one.
    pub fn scale(&self, z: [f64; 2]) -> Result<Self> {
        if z.iter().any(|&z| !(z >= 0.0)) {
            return Err(Error::NonPositiveScale);
        }
        match (z[0] > 0.0, z[1] > 0.0) {
            (true, true) => Ok(match self {
                ConvexLower2::Chain(v) => ConvexLower2::Chain(v.iter().map(|p| [p[0] * z[0], p[1] * z[1]]).collect()),
                ConvexLower2::HalfSpace { normal, offset } => {
                    let n = [normal[0] / z[0], normal[1] / z[1]];
                    let s = n[0] + n[1];
                    ConvexLower2::HalfSpace {
                        normal: [n[0] / s, n[1] / s],
                        offset: offset / s,
                    }
                }
                ConvexLower2::Full => ConvexLower2::Full,
            }),
            (false, true) => Ok(collapse(self.sup_y(), z[1], 0)),
            (true, false) => Ok(collapse(self.sup_x(), z[0], 1)),
            (false, false) => Ok(ConvexLower2::Chain(vec![[0.0, 0.0]])),
        }
    }

    /// Minkowski sum; exact since both operands are convex.
    pub fn minkowski(&self, other: &ConvexLower2) -> ConvexLower2 {
        use ConvexLower2::*;
        match (self, other) {
            (Full, _) | (_, Full) => Full,
            (Chain(a), Chain(b)) => {
                let sums = a
                    .iter()
                    .flat_map(|p| b.iter().map(move |q| [p[0] + q[0], p[1] + q[1]]))
                    .collect();
                Chain(chain_from(sums))
            }
            (Chain(v), HalfSpace { normal, offset }) | (HalfSpace { normal, offset }, Chain(v)) => HalfSpace {
                normal: *normal,
                offset: offset + v.iter().map(|p| normal[0] * p[0] + normal[1] * p[1]).fold(f64::NEG_INFINITY, f64::max),
            },
            (HalfSpace { normal: n, offset: s }, HalfSpace { normal: m, offset: t }) => {
                if (n[0] - m[0]).abs() <= 1e-12 && (n[1] - m[1]).abs() <= 1e-12 {
                    HalfSpace {
                        normal: *n,
                        offset: s + t,
                    }
                } else {
                    Full
                }
            }
        }
    }
}

/// Image under a scaling whose factor vanishes on `zero_coord`.
fn collapse(sup: f64, factor: f64, zero_coord: usize) -> ConvexLower2 {
    let free = 1 - zero_coord;
    if sup.is_infinite() {
        let mut normal = [0.0; 2];
        normal[zero_coord] = 1.0;
        return ConvexLower2::HalfSpace { normal, offset: 0.0 };
    }
    let mut apex = [0.0; 2];
    apex[free] = factor * sup;
    ConvexLower2::Chain(vec![apex])
}

/// Closed convex hull of a planar lower set.
pub fn convex_hull(a: &LowerSet) -> Result<ConvexLower2> {
    if a.dim() != 2 {
        return Err(Error::UnsupportedDimension(a.dim()));
    }
    let mut normal: Option<[f64; 2]> = None;
    let mut offset = f64::NEG_INFINITY;
    for p in a.primitives() {
        match p {
            Primitive::Full => return Ok(ConvexLower2::Full),
            Primitive::HalfSpace { normal: n, offset: t } => {
                let n = [n[0], n[1]];
                match normal {
                    Some(m) if (m[0] - n[0]).abs() > 1e-12 || (m[1] - n[1]).abs() > 1e-12 => {
                        return Ok(ConvexLower2::Full)
                    }
                    _ => normal = Some(n),
                }
                offset = offset.max(*t);
            }
            Primitive::Orthant(_) => {}
        }
    }
    let apexes: Vec<[f64; 2]> = a.apexes().into_iter().map(|p| [p[0], p[1]]).collect();
    match normal {
        Some(n) => {
            let top = apexes.iter().map(|p| n[0] * p[0] + n[1] * p[1]).fold(offset, f64::max);
            Ok(ConvexLower2::HalfSpace { normal: n, offset: top })
        }
        None => ConvexLower2::from_points(apexes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::lower_from_generators;

    #[test]
    fn hull_of_two_apexes_is_segment_region() {
        let a = lower_from_generators(vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let h = convex_hull(&a).unwrap();
        assert_eq!(h, ConvexLower2::Chain(vec![[-1.0, 1.0], [1.0, -1.0]]));
        assert!(h.contains([0.0, 0.0]));
        assert!(!h.contains([0.0, 0.1]));
        assert_eq!(h.upper_section(-5.0), Some(1.0));
        assert_eq!(h.upper_section(1.5), None);
    }

    #[test]
    fn hull_drops_interior_vertices() {
        let a = lower_from_generators(vec![vec![0.0, 2.0], vec![1.0, 0.5], vec![2.0, 0.0]]).unwrap();
        let h = convex_hull(&a).unwrap();
        assert_eq!(h, ConvexLower2::Chain(vec![[0.0, 2.0], [2.0, 0.0]]));
        let a = lower_from_generators(vec![vec![0.0, 2.0], vec![1.0, 1.5], vec![2.0, 0.0]]).unwrap();
        assert_eq!(convex_hull(&a).unwrap(), ConvexLower2::Chain(vec![[0.0, 2.0], [1.0, 1.5], [2.0, 0.0]]));
    }

    #[test]
    fn hull_of_fixed_cost_set_is_h0() {
        let h = convex_hull(&LowerSet::fixed_cost(2, 1.0)).unwrap();
        assert_eq!(
            h,
            ConvexLower2::HalfSpace {
                normal: [0.5, 0.5],
                offset: 0.0
            }
        );
        let h = convex_hull(&LowerSet::orthant(vec![1.0, 2.0])).unwrap();
        assert_eq!(h, ConvexLower2::Chain(vec![[1.0, 2.0]]));
    }

    #[test]
    fn minkowski_of_chains() {
        let a = ConvexLower2::from_points(vec![[0.0, 0.0], [2.0, -2.0]]).unwrap();
        let half = a.scale([0.5, 0.5]).unwrap();
        let s = half.minkowski(&half);
        assert_eq!(s, ConvexLower2::Chain(vec![[0.0, 0.0], [2.0, -2.0]]));
        let h = ConvexLower2::HalfSpace {
            normal: [0.5, 0.5],
            offset: -1.0,
        };
        assert_eq!(
            a.minkowski(&h),
            ConvexLower2::HalfSpace {
                normal: [0.5, 0.5],
                offset: -1.0
            }
        );
    }

    #[test]
    fn zero_factor_collapses() {
        let a = ConvexLower2::from_points(vec![[-1.0, 3.0], [2.0, 0.0]]).unwrap();
        assert_eq!(a.scale([0.0, 2.0]).unwrap(), ConvexLower2::Chain(vec![[0.0, 6.0]]));
        assert_eq!(a.scale([2.0, 0.0]).unwrap(), ConvexLower2::Chain(vec![[4.0, 0.0]]));
        let h = ConvexLower2::HalfSpace {
            normal: [0.5, 0.5],
            offset: 0.0,
        };
        assert_eq!(
            h.scale([0.0, 1.0]).unwrap(),
            ConvexLower2::HalfSpace {
                normal: [1.0, 0.0],
                offset: 0.0
            }
        );
    }
}
