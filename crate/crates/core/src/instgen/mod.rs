//! Instance generators: random hard graphs, flow-induced random structures,
//! the reduction chain between query forms, and the complete k-partite
//! family.

pub mod balance;
pub mod flowgen;
pub mod hard;
pub mod kpartite;
pub mod reduce;

use fixedbitset::FixedBitSet;

pub use balance::{alpha_balance_report, AlphaBalanceReport};
pub use flowgen::{
    domain_size, gen_flow_structure, hom_domains, is_coordinate_respecting, is_n_scattered, is_order_respecting,
    is_order_respecting_query, scatter_threshold, FlowStructure, DEFAULT_SCATTER_BUDGET,
};
pub use hard::{
    count_t_cliques, gen_hard_graph, verify_biclique_free, biclique_side, BicliqueCert, BicliqueStatus, HardGraphCert,
    DEFAULT_BICLIQUE_BUDGET,
};
pub use kpartite::{kpartite_pair, kpartite_size, KPartite};
pub use reduce::{individualize, order_pair, order_query, sparsify_pair, sparsify_query};

/// Outcome of a bounded search for a complete bipartite subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum BicliqueSearch {
    Found(Vec<usize>, Vec<usize>),
    Absent,
    OutOfBudget,
}

/// Looks for `S ⊆ 0..adj.len()` with `|S| = m_left` whose common
/// neighbourhood has at least `m_right` elements. Branches on left
/// vertices in increasing order and prunes on common-neighbourhood size.
pub(crate) fn find_biclique(adj: &[FixedBitSet], m_left: usize, m_right: usize, budget: u64) -> BicliqueSearch {
    let nr = adj.first().map_or(0, FixedBitSet::len);
    let mut all = FixedBitSet::with_capacity(nr);
    all.insert_range(..);
    if m_left == 0 {
        return if nr >= m_right {
            BicliqueSearch::Found(Vec::new(), all.ones().take(m_right).collect())
        } else {
            BicliqueSearch::Absent
        };
    }
    let mut nodes = 0u64;
    let mut s = Vec::new();
    match dfs(adj, m_left, m_right, 0, &all, &mut s, &mut nodes, budget) {
        Some(Ok(t)) => BicliqueSearch::Found(s, t),
        Some(Err(())) => BicliqueSearch::OutOfBudget,
        None => BicliqueSearch::Absent,
    }
}

/// `Some(Ok(T))` when found (with `s` holding `S`), `Some(Err)` when the
/// budget ran out, `None` when the subtree has no solution.
#[allow(clippy::too_many_arguments)]
fn dfs(
    adj: &[FixedBitSet],
    m_left: usize,
    m_right: usize,
    start: usize,
    common: &FixedBitSet,
    s: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Option<std::result::Result<Vec<usize>, ()>> {
    *nodes += 1;
    if *nodes > budget {
        return Some(Err(()));
    }
    if s.len() == m_left {
        return Some(Ok(common.ones().take(m_right).collect()));
    }
    let viable: Vec<(usize, FixedBitSet)> = (start..adj.len())
        .filter_map(|v| {
            let mut c = common.clone();
            c.intersect_with(&adj[v]);
            (c.count_ones(..) >= m_right).then_some((v, c))
        })
        .collect();
    let need = m_left - s.len();
    for (i, (v, c)) in viable.iter().enumerate() {
        if viable.len() - i < need {
            break;
        }
        s.push(*v);
        match dfs(adj, m_left, m_right, v + 1, c, s, nodes, budget) {
            None => {
                s.pop();
            }
            found => return found,
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, ones: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &i in ones {
            b.insert(i);
        }
        b
    }

    #[test]
    fn finds_planted_grid() {
        // Left 0..4, right 0..4; rows 1 and 3 both see columns 0, 2, 3.
        let adj = vec![bits(4, &[0]), bits(4, &[0, 2, 3]), bits(4, &[1]), bits(4, &[0, 2, 3])];
        assert_eq!(find_biclique(&adj, 2, 3, 1000), BicliqueSearch::Found(vec![1, 3], vec![0, 2, 3]));
        assert_eq!(find_biclique(&adj, 3, 2, 1000), BicliqueSearch::Absent);
        assert_eq!(find_biclique(&adj, 2, 3, 1), BicliqueSearch::OutOfBudget);
    }
}
