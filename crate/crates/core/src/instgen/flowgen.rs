//! Random structures induced by a flow: each vertex `v` of the query gets a
//! private domain of `⌈N^{μ(v)}⌉` elements and every relation keeps each
//! tuple of the product of its scope's domains with probability one half.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{find_biclique, BicliqueSearch};
use crate::flows::VertexWeights;
use crate::rational::{self, Rational};
use crate::relcore::{count_homs, enumerate_homs, reduce_structure, Structure, StructureBuilder, Tuple};
use crate::rng::{coin, seeded, Rng};
use crate::{Error, Result};

pub const DEFAULT_SCATTER_BUDGET: u64 = 5_000_000;
/// Largest relation (product of scope domains) the generator will sample.
pub const MAX_RELATION_PRODUCT: u64 = 4_000_000;
pub const MAX_SCATTER_ARITY: usize = 8;

/// `⌈N^μ⌉`, at least 1.
pub fn domain_size(n: u64, mu: &Rational) -> Result<u64> {
    if mu.is_negative() {
        return Err(Error::WeightViolation(format!("negative exponent {}", rational::fmt(mu))));
    }
    if mu.is_zero() || n <= 1 {
        return Ok(1);
    }
    let p = mu.numer().to_u32().ok_or_else(|| Error::TooLarge("exponent numerator".into()))?;
    let q = mu.denom().to_u32().ok_or_else(|| Error::TooLarge("exponent denominator".into()))?;
    let target = BigUint::from(n).pow(p);
    let est = (n as f64).powf(p as f64 / q as f64).ceil();
    if !est.is_finite() || est > 1e15 {
        return Err(Error::TooLarge(format!("domain size {n}^{}", rational::fmt(mu))));
    }
    let mut d = (est as u64).max(1);
    while d > 1 && BigUint::from(d - 1).pow(q) >= target {
        d -= 1;
    }
    while BigUint::from(d).pow(q) < target {
        d += 1;
    }
    Ok(d)
}

/// Smallest side length exceeding `3 log₂ N`: least `m` with `2^m > N³`.
pub fn scatter_threshold(n: u64) -> usize {
    let cube = BigUint::from(n).pow(3);
    let mut m = 0;
    while BigUint::from(1u32) << m <= cube {
        m += 1;
    }
    m
}

/// Whether no grid `S × T` inside the relation, for any split of its
/// coordinates, has both sides above `3 log₂ N`. Coordinates are assumed
/// to range over pairwise disjoint domains.
pub fn is_n_scattered(tuples: &[Tuple], arity: usize, n: u64, budget: u64) -> Result<bool> {
    if arity > MAX_SCATTER_ARITY {
        return Err(Error::TooLarge(format!("arity {arity} above {MAX_SCATTER_ARITY}")));
    }
    let m = scatter_threshold(n);
    if tuples.len() < m * m || arity < 2 {
        return Ok(true);
    }
    // Unordered splits: position 0 always on the left.
    for mask in 1u32..(1 << (arity - 1)) {
        let left: Vec<usize> = std::iter::once(0).chain((1..arity).filter(|&i| mask >> (i - 1) & 1 == 0)).collect();
        let right: Vec<usize> = (1..arity).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        let mut lkeys: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut rkeys: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut pairs = Vec::with_capacity(tuples.len());
        for t in tuples {
            let lk: Vec<usize> = left.iter().map(|&i| t[i]).collect();
            let rk: Vec<usize> = right.iter().map(|&i| t[i]).collect();
            let nl = lkeys.len();
            let li = *lkeys.entry(lk).or_insert(nl);
            let nr = rkeys.len();
            let ri = *rkeys.entry(rk).or_insert(nr);
            pairs.push((li, ri));
        }
        if lkeys.len() < m || rkeys.len() < m {
            continue;
        }
        let mut adj = vec![FixedBitSet::with_capacity(rkeys.len()); lkeys.len()];
        for (l, r) in pairs {
            adj[l].insert(r);
        }
        match find_biclique(&adj, m, m, budget) {
            BicliqueSearch::Found(..) => return Ok(false),
            BicliqueSearch::Absent => {}
            BicliqueSearch::OutOfBudget => {
                return Err(Error::BudgetExceeded(format!("scatter check exceeded {budget} nodes")))
            }
        }
    }
    Ok(true)
}

/// `dom_Y(x)`: the images of `x` over all homomorphisms.
pub fn hom_domains(x: &Structure, y: &Structure) -> Result<Vec<BTreeSet<usize>>> {
    let mut doms = vec![BTreeSet::new(); x.len()];
    for h in enumerate_homs(x, y)? {
        for (v, d) in h.values().into_iter().enumerate() {
            doms[v].insert(d);
        }
    }
    Ok(doms)
}

fn disjoint(doms: &[BTreeSet<usize>]) -> bool {
    let mut seen = BTreeSet::new();
    doms.iter().flatten().all(|d| seen.insert(*d))
}

/// No element of `y` is the image of two distinct elements of `x`.
pub fn is_coordinate_respecting(x: &Structure, y: &Structure) -> Result<bool> {
    Ok(disjoint(&hom_domains(x, y)?))
}

/// A rank per element witnessing that every relation of `a` holds one
/// tuple with distinct coordinates listed in increasing rank; `None` if
/// no such order exists.
pub fn is_order_respecting_query(a: &Structure) -> Option<Vec<usize>> {
    let n = a.len();
    let mut succ = vec![BTreeSet::new(); n];
    for (_, ts) in a.relations() {
        if ts.len() != 1 {
            return None;
        }
        let t = &ts[0];
        let distinct: BTreeSet<usize> = t.iter().copied().collect();
        if distinct.len() != t.len() {
            return None;
        }
        for w in t.windows(2) {
            succ[w[0]].insert(w[1]);
        }
    }
    let mut indeg = vec![0usize; n];
    for s in &succ {
        for &v in s {
            indeg[v] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut rank = vec![usize::MAX; n];
    let mut next = 0;
    while let Some(v) = ready.pop_first() {
        rank[v] = next;
        next += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    (next == n).then_some(rank)
}

/// `y` is coordinate respecting relative to `x` and every tuple of `y`
/// lists images of strictly increasing rank.
pub fn is_order_respecting(x: &Structure, y: &Structure, rank: &[usize]) -> Result<bool> {
    let doms = hom_domains(x, y)?;
    if !disjoint(&doms) {
        return Ok(false);
    }
    let mut owner = vec![None; y.len()];
    for (v, d) in doms.iter().enumerate() {
        for &e in d {
            owner[e] = Some(v);
        }
    }
    for (_, ts) in y.relations() {
        for t in ts {
            for w in t.windows(2) {
                match (owner[w[0]], owner[w[1]]) {
                    (Some(a), Some(b)) if a != b && rank[a] < rank[b] => {}
                    _ => return Ok(false),
                }
            }
        }
    }
    Ok(true)
}

/// Samples a structure over `a`'s signature whose universe is the disjoint
/// union of `dom(v)` (`dom_sizes[v]` elements named `v.i`); each relation
/// keeps every tuple of `⨉ dom(v_i)` with probability ½, visiting the
/// product in lexicographic order.
pub fn random_induced_structure(a: &Structure, dom_sizes: &[u64], rng: &mut Rng) -> Result<(Structure, Vec<Vec<usize>>)> {
    let mut b = StructureBuilder::new();
    for sym in a.signature() {
        b.declare(&sym.name, sym.arity);
    }
    let mut doms = Vec::with_capacity(a.len());
    for (v, name) in a.universe().iter().enumerate() {
        doms.push((0..dom_sizes[v]).map(|i| b.element(&format!("{name}.{i}"))).collect::<Vec<_>>());
    }
    for (r, (_, ts)) in a.relations().enumerate() {
        for t in ts {
            let sizes: Vec<u64> = t.iter().map(|&v| dom_sizes[v]).collect();
            let product = sizes.iter().try_fold(1u64, |acc, &s| acc.checked_mul(s));
            match product {
                Some(p) if p <= MAX_RELATION_PRODUCT => {}
                _ => return Err(Error::BudgetExceeded(format!("relation product {sizes:?} too large"))),
            }
            let mut idx = vec![0usize; t.len()];
            'product: loop {
                if coin(rng) {
                    b.add_indices(r, t.iter().zip(&idx).map(|(&v, &i)| doms[v][i]).collect());
                }
                for p in (0..idx.len()).rev() {
                    idx[p] += 1;
                    if (idx[p] as u64) < sizes[p] {
                        continue 'product;
                    }
                    idx[p] = 0;
                }
                break;
            }
        }
    }
    Ok((b.build(), doms))
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowStructure {
    #[serde(skip)]
    pub structure: Structure,
    #[serde(skip)]
    pub doms: Vec<Vec<usize>>,
    pub dom_sizes: Vec<u64>,
    pub n: u64,
    pub seed: u64,
    pub attempts: usize,
    pub mu: Vec<String>,
    /// `Σ μ(v)`.
    pub t: String,
    pub size: usize,
    pub size_bound: usize,
    pub hom_count: u64,
    /// `∏ |dom(v)|`.
    #[serde(serialize_with = "crate::report::as_display")]
    pub product: BigUint,
    /// `⌈2^{−‖A‖} · product / 8⌉`.
    #[serde(serialize_with = "crate::report::as_display")]
    pub hom_threshold: BigUint,
    pub scattered: bool,
}

/// Rejection-samples the flow-induced structure until the homomorphism
/// count reaches `2^{−‖A‖}/8 · ∏|dom(v)|`, every relation is N-scattered
/// and `‖B‖ ≤ ‖A‖·N`.
pub fn gen_flow_structure(a: &Structure, mu: &VertexWeights, n: u64, seed: u64, max_retries: usize) -> Result<FlowStructure> {
    if is_order_respecting_query(a).is_none() {
        return Err(Error::NotOrderRespecting("query has no order respecting form".into()));
    }
    if mu.weights.len() != a.len() {
        return Err(Error::InvalidArgument(format!("{} weights for {} vertices", mu.weights.len(), a.len())));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("N must be at least 2".into()));
    }
    let dom_sizes: Vec<u64> = mu.weights.iter().map(|m| domain_size(n, m)).collect::<Result<_>>()?;
    let product: BigUint = dom_sizes.iter().map(|&d| BigUint::from(d)).product();
    let denom = BigUint::from(8u32) << a.size();
    let hom_threshold = (&product + &denom - 1u32) / &denom;
    let size_bound = a.size() * n as usize;
    let mut rng = seeded(seed);
    for attempt in 1..=max_retries.max(1) {
        let (b, doms) = random_induced_structure(a, &dom_sizes, &mut rng)?;
        if b.size() > size_bound {
            continue;
        }
        let hom_count = count_homs(a, &b)?;
        if BigUint::from(hom_count) * &denom < product {
            continue;
        }
        let mut scattered = true;
        for (sym, ts) in b.relations() {
            if !is_n_scattered(ts, sym.arity, n, DEFAULT_SCATTER_BUDGET)? {
                scattered = false;
                break;
            }
        }
        if !scattered {
            continue;
        }
        return Ok(FlowStructure {
            size: b.size(),
            structure: b,
            doms,
            dom_sizes,
            n,
            seed,
            attempts: attempt,
            mu: mu.weights.iter().map(rational::fmt).collect(),
            t: rational::fmt(&mu.total()),
            size_bound,
            hom_count,
            product,
            hom_threshold,
            scattered,
        });
    }
    Err(Error::RetriesExhausted(max_retries))
}

/// `reduce_structure` followed by the coordinate and order checks.
pub fn check_flow_structure(a: &Structure, fs: &FlowStructure) -> Result<(bool, bool)> {
    let reduced = reduce_structure(a, &fs.structure)?;
    let rank = is_order_respecting_query(a).ok_or_else(|| Error::NotOrderRespecting("query has no order respecting form".into()))?;
    Ok((is_coordinate_respecting(a, &reduced)?, is_order_respecting(a, &reduced, &rank)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::WeightKind;
    use crate::rational::{frac, int};

    fn triangle() -> Structure {
        StructureBuilder::new()
            .relation("R", 2)
            .relation("S", 2)
            .relation("T", 2)
            .tuple("R", &["x", "y"])
            .tuple("S", &["y", "z"])
            .tuple("T", &["x", "z"])
            .build()
    }

    #[test]
    fn domain_sizes_are_ceilings() {
        assert_eq!(domain_size(16, &frac(1, 2)).unwrap(), 4);
        assert_eq!(domain_size(64, &frac(1, 3)).unwrap(), 4);
        assert_eq!(domain_size(10, &frac(1, 2)).unwrap(), 4);
        assert_eq!(domain_size(9, &frac(1, 2)).unwrap(), 3);
        assert_eq!(domain_size(100, &int(0)).unwrap(), 1);
        assert_eq!(domain_size(7, &int(1)).unwrap(), 7);
        assert!(domain_size(7, &int(-1)).is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(scatter_threshold(4), 7);
        assert_eq!(scatter_threshold(64), 19);
    }

    #[test]
    fn scattered_examples() {
        assert!(is_n_scattered(&[vec![0, 1]], 2, 2, 1000).unwrap());
        // Full 8×8 product with N = 4: both sides exceed 6.
        let full: Vec<Tuple> = (0..8).flat_map(|i| (8..16).map(move |j| vec![i, j])).collect();
        assert!(!is_n_scattered(&full, 2, 4, 100_000).unwrap());
        assert!(is_n_scattered(&full, 2, 64, 100_000).unwrap());
    }

    #[test]
    fn order_respecting_queries() {
        assert_eq!(is_order_respecting_query(&triangle()), Some(vec![0, 1, 2]));
        let cyc = StructureBuilder::new()
            .relation("R", 2)
            .relation("S", 2)
            .tuple("R", &["x", "y"])
            .tuple("S", &["y", "x"])
            .build();
        assert_eq!(is_order_respecting_query(&cyc), None);
    }

    #[test]
    fn single_edge_instance() {
        let a = StructureBuilder::new().relation("E", 2).tuple("E", &["u", "v"]).build();
        let mu = VertexWeights { kind: WeightKind::Mu, weights: vec![frac(1, 2), frac(1, 2)] };
        let fs = gen_flow_structure(&a, &mu, 16, 3, 20).unwrap();
        assert_eq!(fs.dom_sizes, vec![4, 4]);
        assert!(fs.structure.size() <= 16);
        assert!(BigUint::from(fs.hom_count) >= fs.hom_threshold);
        assert_eq!(check_flow_structure(&a, &fs).unwrap(), (true, true));
    }

    #[test]
    fn triangle_instance_is_deterministic() {
        let a = triangle();
        let mu = VertexWeights { kind: WeightKind::Mu, weights: vec![frac(1, 3); 3] };
        let x = gen_flow_structure(&a, &mu, 64, 9, 50).unwrap();
        let y = gen_flow_structure(&a, &mu, 64, 9, 50).unwrap();
        assert_eq!(x.structure, y.structure);
        assert_eq!(x.dom_sizes, vec![4, 4, 4]);
        assert!(x.size <= 3 * 64);
    }
}
