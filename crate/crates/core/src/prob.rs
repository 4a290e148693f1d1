//! Finite probability spaces and random variables stored as per-atom tables.

use crate::error::{Error, Result};

const RENORMALIZE_TOL: f64 = 1e-9;
const SUM_TOL: f64 = 1e-12;

/// Atom probabilities of a finite space. Atoms are indexed `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSpace {
    probs: Vec<f64>,
}

impl ProbSpace {
    /// Validates `probs`. Sums within 1e-12 of one are kept as given, sums
    /// within 1e-9 are renormalized, anything further off is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::ProbabilitiesDoNotSumToOne { sum });
        }
        let probs = if (sum - 1.0).abs() <= SUM_TOL {
            probs
        } else {
            probs.into_iter().map(|p| p / sum).collect()
        };
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn atoms(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, atom: usize) -> f64 {
        self.probs[atom]
    }

    /// Reorders atoms: atom `i` of the result is atom `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            probs: perm.iter().map(|&i| self.probs[i]).collect(),
        }
    }
}

/// Convenience mirror of [`ProbSpace::new`].
pub fn make_space(probs: &[f64]) -> Result<ProbSpace> {
    ProbSpace::new(probs.to_vec())
}

/// Scalar payoff, one value per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn constant(c: f64, atoms: usize) -> Self {
        Self::new(vec![c; atoms])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn check_len(&self, sp: &ProbSpace) -> Result<()> {
        if self.values.len() != sp.atoms() {
            return Err(Error::DimensionMismatch {
                expected: sp.atoms(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Random vector in R^d, stored atoms x d.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVector {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl RandomVector {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Ok(Self { rows, dim })
    }

    pub fn deterministic(point: &[f64], atoms: usize) -> Self {
        Self {
            rows: vec![point.to_vec(); atoms],
            dim: point.len(),
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, atom: usize) -> &[f64] {
        &self.rows[atom]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, i: usize) -> RandomVariable {
        RandomVariable::new(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Per-atom coordinate sum, the total payoff of a capital position.
    pub fn total(&self) -> RandomVariable {
        RandomVariable::new(self.rows.iter().map(|r| r.iter().sum()).collect())
    }

    pub fn check_len(&self, sp: &ProbSpace) -> Result<()> {
        if self.rows.len() != sp.atoms() {
            return Err(Error::DimensionMismatch {
                expected: sp.atoms(),
                got: self.rows.len(),
            });
        }
        Ok(())
    }
}

pub fn expectation(xi: &RandomVariable, sp: &ProbSpace) -> Result<f64> {
    xi.check_len(sp)?;
    Ok(xi
        .values()
        .iter()
        .zip(sp.probs())
        .map(|(v, p)| v * p)
        .sum())
}

/// Distribution of a finite random variable as sorted distinct values with
/// cumulative probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileFunction {
    breakpoints: Vec<(f64, f64)>,
}

impl QuantileFunction {
    /// Builds the canonical form from (value, probability) pairs in any order.
    /// Equal values are merged; the last cumulative probability is pinned to 1.
    pub fn from_law(values: &[f64], probs: &[f64]) -> Self {
        let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(probs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (v, p) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let mut cum = 0.0;
        let mut breakpoints: Vec<(f64, f64)> = merged
            .into_iter()
            .map(|(v, p)| {
                cum += p;
                (v, cum)
            })
            .collect();
        if let Some(last) = breakpoints.last_mut() {
            last.1 = 1.0;
        }
        Self { breakpoints }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// F^{-1}(t): first value whose cumulative probability reaches `t`.
    pub fn quantile(&self, t: f64) -> f64 {
        self.breakpoints
            .iter()
            .find(|&&(_, c)| c >= t)
            .or(self.breakpoints.last())
            .map(|&(v, _)| v)
            .unwrap_or(f64::NAN)
    }

    /// Iterates `(value, cum_prev, cum)` triples.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let mut prev = 0.0;
        self.breakpoints.iter().map(move |&(v, c)| {
            let out = (v, prev, c);
            prev = c;
            out
        })
    }

    pub fn min(&self) -> f64 {
        self.breakpoints[0].0
    }

    /// Sum of value x probability increment; distribution-determined mean.
    pub fn mean(&self) -> f64 {
        self.steps().map(|(v, a, b)| v * (b - a)).sum()
    }
}

pub fn quantile_function(xi: &RandomVariable, sp: &ProbSpace) -> Result<QuantileFunction> {
    xi.check_len(sp)?;
    Ok(QuantileFunction::from_law(xi.values(), sp.probs()))
}

pub fn indicator(atoms: &[usize], sp: &ProbSpace) -> Result<RandomVariable> {
    let mut values = vec![0.0; sp.atoms()];
    for &index in atoms {
        if index >= sp.atoms() {
            return Err(Error::IndexOutOfRange {
                index,
                atoms: sp.atoms(),
            });
        }
        values[index] = 1.0;
    }
    Ok(RandomVariable::new(values))
}
