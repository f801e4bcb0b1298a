//! How a partition of the query splits the cliques of a concurrent flow
//! under the α weighting.

use serde::Serialize;

use crate::flows::{ConcurrentFlow, VertexWeights};
use crate::rational::{self, int, Rational};
use crate::rect::Partition;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueSplit {
    pub clique: usize,
    pub alpha: String,
    pub alpha_left: String,
    pub alpha_right: String,
    /// `min(α(K∩X), α(K∩Y)) ≥ α(K)/10`.
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaBalanceReport {
    pub cliques: Vec<CliqueSplit>,
    pub balanced_count: usize,
    pub delta: String,
    /// Cliques `i` with `α(K_i ∩ X) < δ/10`.
    pub k_x: Vec<usize>,
    /// Cliques `i` with `α(K_i ∩ Y) < δ/10`.
    pub k_y: Vec<usize>,
    pub k_x_times_k_y: usize,
    /// Total flow value on pairs `(i, j)` with `i ∈ K_X`, `j ∈ K_Y` or the
    /// reverse, when a flow is supplied.
    pub crossing_flow: Option<String>,
}

fn of(alpha: &VertexWeights, vs: impl Iterator<Item = usize>) -> Rational {
    vs.map(|v| alpha.weights[v].clone()).sum()
}

/// Classifies each clique by its α split across `part`; `delta` is the
/// common clique weight used for the `K_X`, `K_Y` thresholds.
pub fn alpha_balance_report(
    part: &Partition,
    cliques: &[Vec<usize>],
    alpha: &VertexWeights,
    delta: &Rational,
    flow: Option<&ConcurrentFlow>,
) -> AlphaBalanceReport {
    let mut splits = Vec::with_capacity(cliques.len());
    let mut k_x = Vec::new();
    let mut k_y = Vec::new();
    let cut = delta / int(10);
    for (i, k) in cliques.iter().enumerate() {
        let total = of(alpha, k.iter().copied());
        let left = of(alpha, k.iter().copied().filter(|&v| part.side_of(v) == Some(true)));
        let right = of(alpha, k.iter().copied().filter(|&v| part.side_of(v) == Some(false)));
        if left < cut {
            k_x.push(i);
        }
        if right < cut {
            k_y.push(i);
        }
        splits.push(CliqueSplit {
            clique: i,
            balanced: left.clone().min(right.clone()) >= &total / int(10),
            alpha: rational::fmt(&total),
            alpha_left: rational::fmt(&left),
            alpha_right: rational::fmt(&right),
        });
    }
    let crossing_flow = flow.map(|cf| {
        let v: Rational = cf
            .flows
            .iter()
            .filter(|((i, j), _)| {
                (k_x.contains(i) && k_y.contains(j)) || (k_y.contains(i) && k_x.contains(j))
            })
            .map(|(_, f)| f.value())
            .sum();
        rational::fmt(&v)
    });
    AlphaBalanceReport {
        balanced_count: splits.iter().filter(|s| s.balanced).count(),
        cliques: splits,
        delta: rational::fmt(delta),
        k_x_times_k_y: k_x.len() * k_y.len(),
        k_x,
        k_y,
        crossing_flow,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::WeightKind;
    use crate::rational::frac;

    fn setup() -> (Vec<Vec<usize>>, VertexWeights) {
        let cliques = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
        (cliques, VertexWeights { kind: WeightKind::Alpha, weights: vec![frac(1, 2); 6] })
    }

    #[test]
    fn whole_cliques_on_each_side() {
        let (cl, alpha) = setup();
        let part = Partition::new(vec![0, 1, 2, 3], vec![4, 5], 6).unwrap();
        let r = alpha_balance_report(&part, &cl, &alpha, &int(1), None);
        assert_eq!(r.balanced_count, 0);
        // K_X: cliques nearly absent from X; K_Y likewise.
        assert_eq!(r.k_x, vec![2]);
        assert_eq!(r.k_y, vec![0, 1]);
        assert_eq!(r.k_x_times_k_y, 2);
    }

    #[test]
    fn even_splits_are_balanced() {
        let (cl, alpha) = setup();
        let part = Partition::new(vec![0, 2, 4], vec![1, 3, 5], 6).unwrap();
        let r = alpha_balance_report(&part, &cl, &alpha, &int(1), None);
        assert_eq!(r.balanced_count, 3);
        assert!(r.k_x.is_empty() && r.k_y.is_empty());
    }
}
