use super::grid_points;
use crate::error::{Error, Result};

/// Plotting box `[x.0, x.1] x [y.0, y.1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Window {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        if !(x.0 <= x.1) || !(y.0 <= y.1) {
            return Err(Error::InvalidParams("window bounds must be ordered".into()));
        }
        Ok(Self { x, y })
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self { x: (lo, hi), y: (lo, hi) }
    }

    pub fn diameter(&self) -> f64 {
        (self.x.1 - self.x.0).hypot(self.y.1 - self.y.0)
    }
}

/// Lower-left boundary of a planar upper set restricted to a window.
///
/// `ys[i]` is `None` when the set has no point above `xs[i]`; finite values
/// are clipped to the vertical extent of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub window: Window,
    pub step: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<Option<f64>>,
}

impl BoundaryCurve {
    pub fn sample(window: Window, step: f64, f: impl Fn(f64) -> Option<f64>) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParams("grid step must be positive".into()));
        }
        let xs = grid_points(window.x.0, window.x.1, step);
        let ys = xs.iter().map(|&x| f(x).map(|y| y.clamp(window.y.0, window.y.1))).collect();
        Ok(Self { window, step, xs, ys })
    }

    pub fn defined(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().zip(&self.ys).filter_map(|(&x, y)| y.map(|y| (x, y)))
    }

    pub fn value_at(&self, x: f64) -> Option<f64> {
        let i = self.xs.iter().position(|&g| (g - x).abs() <= 1e-9 * self.step)?;
        self.ys[i]
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        let v: Vec<(f64, f64)> = self.defined().collect();
        v.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
    }

    fn same_grid(&self, other: &BoundaryCurve) -> bool {
        self.xs.len() == other.xs.len() && self.xs.iter().zip(&other.xs).all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// `max_i |a_i - b_i|`; an abscissa defined in one curve only counts as an
/// infinite gap.
pub fn curve_sup_distance(a: &BoundaryCurve, b: &BoundaryCurve) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    let mut gap = 0.0f64;
    for (ya, yb) in a.ys.iter().zip(&b.ys) {
        let g = match (ya, yb) {
            (None, None) => 0.0,
            (Some(p), Some(q)) => (p - q).abs(),
            _ => f64::INFINITY,
        };
        gap = gap.max(g);
    }
    Ok(gap)
}

/// Greatest convex function below the curve, on the same grid.
pub fn lower_convex_envelope(c: &BoundaryCurve) -> BoundaryCurve {
    let pts: Vec<(f64, f64)> = c.defined().collect();
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cr = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cr <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let ys = c
        .xs
        .iter()
        .zip(&c.ys)
        .map(|(&x, y)| {
            y.map(|_| {
                let k = hull.partition_point(|h| h.0 < x);
                if k == 0 || hull[k].0 == x {
                    return hull[k.min(hull.len() - 1)].1;
                }
                let (a, b) = (hull[k - 1], hull[k]);
                a.1 + (x - a.0) / (b.0 - a.0) * (b.1 - a.1)
            })
        })
        .collect();
    BoundaryCurve {
        window: c.window,
        step: c.step,
        xs: c.xs.clone(),
        ys,
    }
}
