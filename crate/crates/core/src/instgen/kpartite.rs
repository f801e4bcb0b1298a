//! The clique `K_k` against the complete `k`-partite graph: a family with
//! unbounded treewidth whose homomorphism sets still have circuits of size
//! linear in the part size.

use crate::circuit::{Circuit, CircuitBuilder};
use crate::relcore::{graph_structure, Hypergraph, Structure};
use crate::{Error, Result};

pub const MAX_KPARTITE_K: usize = 5;

#[derive(Clone, Debug)]
pub struct KPartite {
    pub g: Structure,
    pub h: Structure,
    pub circuit: Circuit,
}

/// Gate count of the fan-in-2 circuit built by [`kpartite_pair`]:
/// `2k²n − k² + k!·k − 1`.
pub fn kpartite_size(k: usize, n: usize) -> usize {
    let fact: usize = (1..=k).product();
    2 * k * k * n - k * k + fact * k - 1
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// `K_k` on `x1..xk`, the complete `k`-partite graph with parts
/// `V_i = {v{i}_{j}}` of size `n`, and the circuit
/// `⋃_{σ∈S_k} ⨉_i ⋃_{v∈V_i} (x_{σ(i)} ↦ v)`.
pub fn kpartite_pair(k: usize, n: usize) -> Result<KPartite> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument("k and n must be positive".into()));
    }
    if k > MAX_KPARTITE_K {
        return Err(Error::TooLarge(format!("k = {k} above {MAX_KPARTITE_K}")));
    }
    let xs: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let g = graph_structure(&Hypergraph::new(
        xs.clone(),
        (0..k).flat_map(|u| (u + 1..k).map(move |v| vec![u, v])),
    ));
    let names: Vec<String> = (1..=k).flat_map(|i| (1..=n).map(move |j| format!("v{i}_{j}"))).collect();
    let part = |v: usize| v / n;
    let h_edges = (0..k * n).flat_map(|u| (u + 1..k * n).filter(move |&v| part(u) != part(v)).map(move |v| vec![u, v]));
    let h = graph_structure(&Hypergraph::new(names.clone(), h_edges));

    let mut b = CircuitBuilder::with_values(xs, names);
    // picks[x][i]: x mapped anywhere into V_i.
    let mut picks = vec![Vec::with_capacity(k); k];
    for (x, row) in picks.iter_mut().enumerate() {
        for i in 0..k {
            let inputs: Vec<usize> = (0..n).map(|j| b.input(x, i * n + j)).collect();
            row.push(b.union_chain(&inputs));
        }
    }
    let products: Vec<usize> = permutations(k)
        .into_iter()
        .map(|sigma| {
            let factors: Vec<usize> = (0..k).map(|i| picks[sigma[i]][i]).collect();
            b.times_chain(&factors)
        })
        .collect();
    let sink = b.union_chain(&products);
    Ok(KPartite { g, h, circuit: b.finish(sink) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{count_deterministic, eval_circuit, validate_circuit};
    use crate::relcore::{count_homs, enumerate_homs};
    use num_bigint::BigUint;
    use std::collections::BTreeSet;

    #[test]
    fn counts_and_sizes() {
        for k in 1..=3 {
            for n in 1..=4 {
                let kp = kpartite_pair(k, n).unwrap();
                let fact: u64 = (1..=k as u64).product();
                let expect = fact * (n as u64).pow(k as u32);
                assert_eq!(count_homs(&kp.g, &kp.h).unwrap(), expect);
                assert!(validate_circuit(&kp.circuit).is_ok());
                assert_eq!(count_deterministic(&kp.circuit), BigUint::from(expect));
                assert_eq!(kp.circuit.size(), kpartite_size(k, n));
            }
        }
    }

    #[test]
    fn circuit_equals_hom_set() {
        let kp = kpartite_pair(3, 2).unwrap();
        let f = eval_circuit(&kp.circuit).unwrap();
        let homs: BTreeSet<Vec<usize>> = enumerate_homs(&kp.g, &kp.h).unwrap().iter().map(|h| h.values()).collect();
        let got: BTreeSet<Vec<usize>> = f.rows.iter().cloned().collect();
        assert_eq!(got, homs);
    }

    #[test]
    fn k_cap() {
        assert!(matches!(kpartite_pair(6, 2), Err(Error::TooLarge(_))));
        assert_eq!(kpartite_pair(2, 3).unwrap().circuit.size(), kpartite_size(2, 3));
    }
}
