use proptest::prelude::*;
use selrisk_core::risk::{DistortionFunction, RiskSpec};

/// AVaR through its minimisation formula, attained at an atom value.
fn avar_dual(values: &[f64], probs: &[f64], alpha: f64) -> f64 {
    values
        .iter()
        .map(|s| {
            let tail: f64 = values.iter().zip(probs).map(|(v, p)| p * (s - v).max(0.0)).sum();
            tail / alpha - s
        })
        .fold(f64::INFINITY, f64::min)
}

/// `-integral q dg~` with `g~(t) = 1 - g(1 - t)`, splitting [0, 1] at every
/// law breakpoint and knot so both pieces are exact.
fn distortion_direct(values: &[f64], probs: &[f64], knots: &[(f64, f64)]) -> f64 {
    let g = |t: f64| {
        let i = knots.iter().position(|k| k.0 >= t).unwrap_or(knots.len() - 1).max(1);
        let (a, b) = (knots[i - 1], knots[i]);
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    };
    let dual = |t: f64| 1.0 - g(1.0 - t);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut cuts: Vec<f64> = knots.iter().map(|k| 1.0 - k.0).collect();
    let mut acc = 0.0;
    for &i in &order {
        acc += probs[i];
        cuts.push(acc.min(1.0));
    }
    cuts.push(0.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let quantile = |u: f64| {
        let mut acc = 0.0;
        for &i in &order {
            acc += probs[i];
            if u < acc {
                return values[i];
            }
        }
        values[*order.last().unwrap()]
    };
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| -quantile(0.5 * (w[0] + w[1])) * (dual(w[1]) - dual(w[0])))
        .sum()
}

fn law() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-5.0..5.0f64, 0.05..1.0f64), 1..8).prop_map(|pairs| {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        pairs.iter().map(|p| (p.0, p.1 / total)).unzip()
    })
}

proptest! {
    #[test]
    fn avar_matches_dual_formula((values, probs) in law(), alpha in 0.01..1.0f64) {
        let got = RiskSpec::AVaR { alpha }.eval(&values, &probs);
        let want = avar_dual(&values, &probs, alpha);
        prop_assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
    }

    #[test]
    fn distortion_matches_direct_integral((values, probs) in law(), mid in 0.05..0.95f64, level in 0.0..1.0f64) {
        let knots = vec![(0.0, 0.0), (mid, level * mid), (1.0, 1.0)];
        let g = DistortionFunction::new(knots.clone()).unwrap();
        let got = RiskSpec::Distortion(g).eval(&values, &probs);
        let want = distortion_direct(&values, &probs, &knots);
        prop_assert!((got - want).abs() < 1e-9, "{} vs {}", got, want);
    }

    #[test]
    fn essinf_and_expectation_bracket_avar((values, probs) in law(), alpha in 0.01..1.0f64) {
        let a = RiskSpec::AVaR { alpha }.eval(&values, &probs);
        let lo = RiskSpec::NegExpectation.eval(&values, &probs);
        let hi = RiskSpec::EssInf.eval(&values, &probs);
        prop_assert!(lo <= a + 1e-9 && a <= hi + 1e-9);
    }
}
