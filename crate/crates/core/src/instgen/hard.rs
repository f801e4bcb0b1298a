//! Random graphs `H(t, n)` with certified density, clique count and
//! absence of large complete bipartite subgraphs.

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_integer::binomial;
use serde::Serialize;

use super::{find_biclique, BicliqueSearch};
use crate::relcore::Hypergraph;
use crate::rng::{coin, seeded, Rng};
use crate::{Error, Result};

pub const DEFAULT_BICLIQUE_BUDGET: u64 = 2_000_000;
pub const MAX_CLIQUE_T: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BicliqueStatus {
    Verified,
    Violation { s: Vec<usize>, t: Vec<usize> },
    Inconclusive,
}

/// How the `K_{a,a}`-freeness of an accepted graph is certified.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BicliqueCert {
    Verified { a: usize },
    /// Search budget ran out; the union-bound failure probability per
    /// side pair is `2^{−3 log₂² n}`.
    Probabilistic { a: usize, failure_bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardGraphCert {
    #[serde(skip)]
    pub graph: Hypergraph,
    pub n: usize,
    pub t: usize,
    pub seed: u64,
    pub attempts: usize,
    pub edges: usize,
    pub edge_check: bool,
    #[serde(serialize_with = "crate::report::as_display")]
    pub t_clique_count: BigUint,
    /// `⌈½ · C(n,t) · 2^{−C(t,2)}⌉`.
    #[serde(serialize_with = "crate::report::as_display")]
    pub clique_threshold: BigUint,
    pub clique_check: bool,
    pub biclique: BicliqueCert,
}

/// Smallest `a` with `2^a ≥ n³`, i.e. `⌈3 log₂ n⌉`.
pub fn biclique_side(n: usize) -> usize {
    let cube = BigUint::from(n).pow(3);
    let mut a = 0;
    while BigUint::from(1u32) << a < cube {
        a += 1;
    }
    a
}

fn graph_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("h{i}")).collect()
}

/// Samples every pair `u < v` with a fair coin, in lexicographic order.
pub fn sample_gnp_half(n: usize, seed: u64) -> Hypergraph {
    sample_from(&mut seeded(seed), n)
}

fn sample_from(rng: &mut Rng, n: usize) -> Hypergraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if coin(rng) {
                edges.push(vec![u, v]);
            }
        }
    }
    Hypergraph::new(graph_names(n), edges)
}

fn neighbourhoods(g: &Hypergraph) -> Vec<FixedBitSet> {
    let n = g.num_vertices();
    let mut adj = vec![FixedBitSet::with_capacity(n); n];
    for e in g.edges() {
        if let [u, v] = e[..] {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    adj
}

/// Searches for a `K_{a,a}` subgraph. `Verified` and `Violation` are both
/// certain; `Inconclusive` means the budget ran out.
pub fn verify_biclique_free(g: &Hypergraph, a: usize, budget: u64) -> BicliqueStatus {
    let adj = neighbourhoods(g);
    // No loops, so the common neighbourhood of S is disjoint from S.
    match find_biclique(&adj, a, a, budget) {
        BicliqueSearch::Found(s, t) => BicliqueStatus::Violation { s, t },
        BicliqueSearch::Absent => BicliqueStatus::Verified,
        BicliqueSearch::OutOfBudget => BicliqueStatus::Inconclusive,
    }
}

/// Number of `t`-cliques, counted once each via increasing vertex order.
pub fn count_t_cliques(g: &Hypergraph, t: usize) -> Result<BigUint> {
    if t > MAX_CLIQUE_T {
        return Err(Error::TooLarge(format!("clique size {t} above the cap {MAX_CLIQUE_T}")));
    }
    let n = g.num_vertices();
    if t == 0 {
        return Ok(BigUint::from(1u32));
    }
    let adj = neighbourhoods(g);
    let mut forward = adj.clone();
    for (v, f) in forward.iter_mut().enumerate() {
        f.set_range(..v + 1, false);
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    fn rec(forward: &[FixedBitSet], cand: &FixedBitSet, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        if left == 1 {
            return cand.count_ones(..) as u64;
        }
        cand.ones()
            .map(|v| {
                let mut next = cand.clone();
                next.intersect_with(&forward[v]);
                rec(forward, &next, left - 1)
            })
            .sum()
    }
    Ok(BigUint::from(rec(&forward, &all, t)))
}

/// Rejection-samples `G(n, ½)` until the edge, clique and biclique checks
/// pass; each attempt draws a fresh graph from the same stream.
pub fn gen_hard_graph(t: usize, n: usize, seed: u64, max_retries: usize) -> Result<HardGraphCert> {
    gen_hard_graph_budget(t, n, seed, max_retries, DEFAULT_BICLIQUE_BUDGET)
}

pub fn gen_hard_graph_budget(
    t: usize,
    n: usize,
    seed: u64,
    max_retries: usize,
    biclique_budget: u64,
) -> Result<HardGraphCert> {
    if t < 2 {
        return Err(Error::InvalidArgument("clique size must be at least 2".into()));
    }
    if n < t {
        return Err(Error::InvalidArgument(format!("n = {n} is below t = {t}")));
    }
    if t > MAX_CLIQUE_T {
        return Err(Error::TooLarge(format!("clique size {t} above the cap {MAX_CLIQUE_T}")));
    }
    let a = biclique_side(n);
    // ½ C(n,t) 2^{−C(t,2)} ≤ count  ⟺  C(n,t) ≤ 2^{C(t,2)+1} count.
    let choose = binomial(BigUint::from(n), BigUint::from(t));
    let shift = t * (t - 1) / 2 + 1;
    let denom = BigUint::from(1u32) << shift;
    let clique_threshold = (&choose + &denom - 1u32) / &denom;
    let mut rng = seeded(seed);
    for attempt in 1..=max_retries.max(1) {
        let g = sample_from(&mut rng, n);
        let m = g.edges().len();
        let edge_check = 8 * m >= n * n;
        if !edge_check {
            continue;
        }
        let count = count_t_cliques(&g, t)?;
        let clique_check = (&count << shift) >= choose;
        if !clique_check {
            continue;
        }
        let biclique = match verify_biclique_free(&g, a, biclique_budget) {
            BicliqueStatus::Violation { .. } => continue,
            BicliqueStatus::Verified => BicliqueCert::Verified { a },
            BicliqueStatus::Inconclusive => {
                let l = (n as f64).log2();
                BicliqueCert::Probabilistic { a, failure_bound: (-3.0 * l * l).exp2() }
            }
        };
        return Ok(HardGraphCert {
            graph: g,
            n,
            t,
            seed,
            attempts: attempt,
            edges: m,
            edge_check,
            t_clique_count: count,
            clique_threshold,
            clique_check,
            biclique,
        });
    }
    Err(Error::RetriesExhausted(max_retries))
}
