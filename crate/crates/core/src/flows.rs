//! Path flows on hypergraphs.
//!
//! A flow puts nonnegative weight on paths of the Gaifman graph such that
//! every hyperedge is met by paths of total weight at most one. Flows here
//! live on enumerated induced (chordless) paths with a length cap, so every
//! LP is finite and exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lp::{Lp, LpOutcome, Sense};
use crate::rational::{self, frac, int, one, zero, Rational};
use crate::relcore::Hypergraph;
use crate::report::ValidationReport;
use crate::{Error, Result};

pub const DEFAULT_MAX_LEN: usize = 6;
pub const DEFAULT_PATH_BUDGET: usize = 200_000;
/// Largest vertex count for which clique partitions are searched.
pub const PARTITION_SEARCH_MAX_VERTICES: usize = 10;

/// A path as a vertex sequence; length is the number of edges.
pub type HPath = Vec<usize>;

/// Sparse path weights. Paths are kept in insertion order, each at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flow {
    pub paths: Vec<(HPath, Rational)>,
}

impl Flow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, path: HPath, w: Rational) {
        if let Some(slot) = self.paths.iter_mut().find(|(p, _)| *p == path) {
            slot.1 += w;
        } else {
            self.paths.push((path, w));
        }
    }

    pub fn value(&self) -> Rational {
        self.paths.iter().map(|(_, w)| w.clone()).sum()
    }

    /// Pointwise sum of several flows.
    pub fn sum<'a>(flows: impl IntoIterator<Item = &'a Flow>) -> Flow {
        let mut out = Flow::new();
        for f in flows {
            for (p, w) in &f.paths {
                out.add(p.clone(), w.clone());
            }
        }
        out
    }
}

/// Compatible pairwise flows of equal value on a clique partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcurrentFlow {
    pub cliques: Vec<Vec<usize>>,
    /// One flow per pair `(i, j)`, `i < j`, in lexicographic pair order.
    pub flows: Vec<((usize, usize), Flow)>,
    pub epsilon: Rational,
}

impl ConcurrentFlow {
    pub fn k(&self) -> usize {
        self.cliques.len()
    }

    pub fn total(&self) -> Flow {
        Flow::sum(self.flows.iter().map(|(_, f)| f))
    }

    /// `δ = ε/2·(k−1)`, the α-weight of every clique.
    pub fn delta(&self) -> Rational {
        &self.epsilon / int(2) * int(self.k() as i64 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    Mu,
    Alpha,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWeights {
    pub kind: WeightKind,
    pub weights: Vec<Rational>,
}

impl VertexWeights {
    pub fn total(&self) -> Rational {
        self.weights.iter().cloned().sum()
    }

    pub fn of_set(&self, vs: &[usize]) -> Rational {
        vs.iter().map(|&v| self.weights[v].clone()).sum()
    }
}

fn adjacency_sets(h: &Hypergraph) -> Vec<BTreeSet<usize>> {
    h.adjacency().into_iter().map(|a| a.into_iter().collect()).collect()
}

/// All chordless paths starting in `a` and ending in `b` with at most
/// `max_len` edges, in DFS order from each start vertex.
pub fn enumerate_paths(h: &Hypergraph, a: &[usize], b: &[usize], max_len: usize) -> Result<Vec<HPath>> {
    enumerate_paths_filtered(h, a, b, max_len, DEFAULT_PATH_BUDGET, |_, _| true)
}

/// Like [`enumerate_paths`] with an extra admissibility test
/// `ok(path_so_far, next_vertex)` applied to every extension.
fn enumerate_paths_filtered(
    h: &Hypergraph,
    a: &[usize],
    b: &[usize],
    max_len: usize,
    budget: usize,
    ok: impl Fn(&[usize], usize) -> bool,
) -> Result<Vec<HPath>> {
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be at least 1".into()));
    }
    let adj = adjacency_sets(h);
    let starts: BTreeSet<usize> = a.iter().copied().collect();
    let ends: BTreeSet<usize> = b.iter().copied().collect();
    let mut out = Vec::new();
    let mut path = Vec::new();
    fn dfs(
        adj: &[BTreeSet<usize>],
        ends: &BTreeSet<usize>,
        max_len: usize,
        budget: usize,
        ok: &dyn Fn(&[usize], usize) -> bool,
        path: &mut Vec<usize>,
        out: &mut Vec<HPath>,
    ) -> Result<()> {
        let last = *path.last().unwrap();
        if ends.contains(&last) {
            out.push(path.clone());
            if out.len() > budget {
                return Err(Error::BudgetExceeded(format!("more than {budget} paths")));
            }
        }
        if path.len() > max_len {
            return Ok(());
        }
        for &w in &adj[last] {
            let prefix = &path[..path.len() - 1];
            if path.contains(&w) || prefix.iter().any(|p| adj[*p].contains(&w)) || !ok(path, w) {
                continue;
            }
            path.push(w);
            dfs(adj, ends, max_len, budget, ok, path, out)?;
            path.pop();
        }
        Ok(())
    }
    for &s in &starts {
        if s >= h.num_vertices() {
            return Err(Error::InvalidArgument(format!("vertex index {s} out of range")));
        }
        path.clear();
        path.push(s);
        dfs(&adj, &ends, max_len, budget, &ok, &mut path, &mut out)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowViolation {
    NegativeWeight(HPath),
    NotAPath(HPath),
    Overloaded { edge: Vec<usize>, load: Rational },
    WrongEndpoints { pair: (usize, usize), path: HPath },
    WrongValue { pair: (usize, usize), value: Rational },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeWeight(p) => write!(f, "path {p:?} has negative weight"),
            Self::NotAPath(p) => write!(f, "{p:?} is not a simple path"),
            Self::Overloaded { edge, load } => {
                write!(f, "edge {edge:?} carries load {}", rational::fmt(load))
            }
            Self::WrongEndpoints { pair, path } => write!(f, "path {path:?} does not join clique pair {pair:?}"),
            Self::WrongValue { pair, value } => {
                write!(f, "pair {pair:?} has value {}", rational::fmt(value))
            }
        }
    }
}

/// Edge loads `Σ_{P∩e≠∅} F(P)`, indexed like `h.edges()`.
pub fn edge_loads(h: &Hypergraph, f: &Flow) -> Vec<Rational> {
    h.edges()
        .iter()
        .map(|e| f.paths.iter().filter(|(p, _)| p.iter().any(|v| e.contains(v))).map(|(_, w)| w.clone()).sum())
        .collect()
}

fn is_simple_path(adj: &[BTreeSet<usize>], p: &[usize]) -> bool {
    let distinct: BTreeSet<_> = p.iter().collect();
    !p.is_empty()
        && distinct.len() == p.len()
        && p.iter().all(|&v| v < adj.len())
        && p.windows(2).all(|w| adj[w[0]].contains(&w[1]))
}

/// Checks path shape, weight signs and edge loads. Overloaded edges are
/// listed worst first.
pub fn validate_flow(h: &Hypergraph, f: &Flow) -> ValidationReport<FlowViolation> {
    let mut rep = ValidationReport::new();
    let adj = adjacency_sets(h);
    for (p, w) in &f.paths {
        if w.is_negative() {
            rep.push(FlowViolation::NegativeWeight(p.clone()));
        }
        if !is_simple_path(&adj, p) {
            rep.push(FlowViolation::NotAPath(p.clone()));
        }
    }
    let mut over: Vec<(Vec<usize>, Rational)> = h
        .edges()
        .iter()
        .cloned()
        .zip(edge_loads(h, f))
        .filter(|(_, l)| *l > one())
        .collect();
    over.sort_by(|a, b| b.1.cmp(&a.1));
    for (edge, load) in over {
        rep.push(FlowViolation::Overloaded { edge, load });
    }
    rep
}

/// Validates the summed flow plus pair endpoints and equal pair values.
pub fn validate_concurrent(h: &Hypergraph, cf: &ConcurrentFlow) -> ValidationReport<FlowViolation> {
    let mut rep = validate_flow(h, &cf.total());
    for ((i, j), f) in &cf.flows {
        for (p, _) in &f.paths {
            let first = p.first().copied().unwrap_or(usize::MAX);
            let last = p.last().copied().unwrap_or(usize::MAX);
            if !cf.cliques[*i].contains(&first) || !cf.cliques[*j].contains(&last) {
                rep.push(FlowViolation::WrongEndpoints { pair: (*i, *j), path: p.clone() });
            }
        }
        if f.value() != cf.epsilon {
            rep.push(FlowViolation::WrongValue { pair: (*i, *j), value: f.value() });
        }
    }
    rep
}

fn flow_from_solution(paths: &[HPath], x: &[Rational]) -> Flow {
    let mut f = Flow::new();
    for (p, w) in paths.iter().zip(x) {
        if !w.is_zero() {
            f.add(p.clone(), w.clone());
        }
    }
    f
}

/// Maximum-value `(A,B)`-flow over the enumerated chordless paths.
pub fn max_ab_flow(h: &Hypergraph, a: &[usize], b: &[usize], max_len: usize) -> Result<(Rational, Flow)> {
    let paths = enumerate_paths(h, a, b, max_len)?;
    if paths.is_empty() {
        return Ok((zero(), Flow::new()));
    }
    let mut lp = Lp::maximize(vec![one(); paths.len()]);
    for e in h.edges() {
        let row: Vec<_> = paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.iter().any(|v| e.contains(v)))
            .map(|(i, _)| (i, one()))
            .collect();
        if !row.is_empty() {
            lp.constrain(row, Sense::Le, one());
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } => Ok((value, flow_from_solution(&paths, &x))),
        LpOutcome::Unbounded => Err(Error::InvalidFlow("a path meets no edge; flow is unbounded".into())),
        LpOutcome::Infeasible => unreachable!("zero flow is feasible"),
    }
}

fn check_partition(h: &Hypergraph, cliques: &[Vec<usize>]) -> Result<()> {
    if cliques.len() < 2 {
        return Err(Error::BadPartition(format!("need at least two cliques, got {}", cliques.len())));
    }
    let mut seen = BTreeSet::new();
    for (i, k) in cliques.iter().enumerate() {
        if k.is_empty() {
            return Err(Error::BadPartition(format!("clique {i} is empty")));
        }
        if !h.edges().iter().any(|e| k.iter().all(|v| e.contains(v))) {
            return Err(Error::BadPartition(format!("clique {i} lies in no edge")));
        }
        for &v in k {
            if !seen.insert(v) {
                return Err(Error::BadPartition(format!("vertex {v} in two cliques")));
            }
        }
    }
    Ok(())
}

/// LP maximizing `ε` over compatible `(K_i, K_j)`-flows of value `ε`.
///
/// Pair paths meet `K_i` only in their first vertex and `K_j` only in their
/// last, so each path contributes to α at exactly one vertex per clique.
pub fn max_uniform_concurrent_flow(h: &Hypergraph, cliques: &[Vec<usize>], max_len: usize) -> Result<ConcurrentFlow> {
    check_partition(h, cliques)?;
    let k = cliques.len();
    let mut pairs = Vec::new();
    let mut columns: Vec<(usize, HPath)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let (ki, kj) = (&cliques[i], &cliques[j]);
            let paths = enumerate_paths_filtered(h, ki, kj, max_len, DEFAULT_PATH_BUDGET, |path, w| {
                !ki.contains(&w) && !path[1..].iter().any(|v| kj.contains(v))
            })?;
            let pi = pairs.len();
            pairs.push((i, j));
            columns.extend(paths.into_iter().map(|p| (pi, p)));
        }
    }
    // Variable 0 is ε; path variables follow.
    let nvar = 1 + columns.len();
    let mut obj = vec![zero(); nvar];
    obj[0] = one();
    let mut lp = Lp::maximize(obj);
    for pi in 0..pairs.len() {
        let mut row: Vec<_> =
            columns.iter().enumerate().filter(|(_, (q, _))| *q == pi).map(|(c, _)| (c + 1, one())).collect();
        row.push((0, -one()));
        lp.constrain(row, Sense::Eq, zero());
    }
    for e in h.edges() {
        let row: Vec<_> = columns
            .iter()
            .enumerate()
            .filter(|(_, (_, p))| p.iter().any(|v| e.contains(v)))
            .map(|(c, _)| (c + 1, one()))
            .collect();
        if !row.is_empty() {
            lp.constrain(row, Sense::Le, one());
        }
    }
    let LpOutcome::Optimal { value, x } = lp.solve() else {
        return Err(Error::InvalidFlow("concurrent flow LP has no optimum".into()));
    };
    let mut flows: Vec<((usize, usize), Flow)> = pairs.iter().map(|&p| (p, Flow::new())).collect();
    for (c, (pi, p)) in columns.iter().enumerate() {
        if !x[c + 1].is_zero() {
            flows[*pi].1.add(p.clone(), x[c + 1].clone());
        }
    }
    let cf = ConcurrentFlow { cliques: cliques.to_vec(), flows, epsilon: value };
    debug_assert!(validate_concurrent(h, &cf).is_ok());
    Ok(cf)
}

/// `μ(v) = ½ Σ_{P∋v} F(P)`.
pub fn mu_of_flow(h: &Hypergraph, f: &Flow) -> VertexWeights {
    let mut w = vec![zero(); h.num_vertices()];
    let half = frac(1, 2);
    for (p, x) in &f.paths {
        for &v in p {
            w[v] += &half * x;
        }
    }
    VertexWeights { kind: WeightKind::Mu, weights: w }
}

/// α: zero off `W = ⋃K_i`; for `v ∈ K_i`, half the weight of paths of
/// pairs involving `i` that pass through `v`.
pub fn alpha_of_flow(h: &Hypergraph, cf: &ConcurrentFlow) -> VertexWeights {
    let mut w = vec![zero(); h.num_vertices()];
    let half = frac(1, 2);
    let owner: BTreeMap<usize, usize> =
        cf.cliques.iter().enumerate().flat_map(|(i, k)| k.iter().map(move |&v| (v, i))).collect();
    for ((i, j), f) in &cf.flows {
        for (p, x) in &f.paths {
            for &v in p {
                if let Some(&o) = owner.get(&v) {
                    if o == *i || o == *j {
                        w[v] += &half * x;
                    }
                }
            }
        }
    }
    VertexWeights { kind: WeightKind::Alpha, weights: w }
}

/// Best concurrent flow over clique partitions of a small hypergraph,
/// scored by `α(W) = k(k−1)ε/2`. Candidate cliques are nonempty subsets of
/// edges; at most `budget` partitions are tried.
pub fn search_clique_partition(h: &Hypergraph, max_len: usize, budget: usize) -> Result<Option<ConcurrentFlow>> {
    let n = h.num_vertices();
    if n > PARTITION_SEARCH_MAX_VERTICES {
        return Err(Error::TooLarge(format!(
            "clique partition search on {n} vertices; supply the cliques explicitly"
        )));
    }
    let mut cands: BTreeSet<Vec<usize>> = BTreeSet::new();
    for e in h.edges() {
        for m in 1u32..(1 << e.len()) {
            cands.insert(e.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect());
        }
    }
    let cands: Vec<Vec<usize>> = cands.into_iter().collect();
    let mut best: Option<(Rational, ConcurrentFlow)> = None;
    let mut tried = 0usize;
    let mut chosen: Vec<usize> = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        h: &Hypergraph,
        cands: &[Vec<usize>],
        start: usize,
        used: u64,
        chosen: &mut Vec<usize>,
        tried: &mut usize,
        budget: usize,
        max_len: usize,
        best: &mut Option<(Rational, ConcurrentFlow)>,
    ) -> Result<()> {
        if chosen.len() >= 2 {
            if *tried >= budget {
                return Ok(());
            }
            *tried += 1;
            let cl: Vec<Vec<usize>> = chosen.iter().map(|&c| cands[c].clone()).collect();
            let cf = max_uniform_concurrent_flow(h, &cl, max_len)?;
            let k = cl.len() as i64;
            let score = &cf.epsilon * int(k * (k - 1)) / int(2);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                *best = Some((score, cf));
            }
        }
        for c in start..cands.len() {
            let m = cands[c].iter().fold(0u64, |m, &v| m | 1 << v);
            if m & used == 0 {
                chosen.push(c);
                rec(h, cands, c + 1, used | m, chosen, tried, budget, max_len, best)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    rec(h, &cands, 0, 0, &mut chosen, &mut tried, budget, max_len, &mut best)?;
    Ok(best.map(|(_, cf)| cf))
}

#[derive(Serialize, Deserialize)]
struct PathEntry {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pair: Option<[usize; 2]>,
    path: Vec<String>,
    weight: String,
}

#[derive(Serialize, Deserialize)]
struct ConcurrentFile {
    cliques: Vec<Vec<String>>,
    epsilon: String,
    paths: Vec<PathEntry>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyFlowFile {
    Plain(Vec<PathEntry>),
    Concurrent(ConcurrentFile),
}

/// A flow witness as read from disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowWitness {
    Plain(Flow),
    Concurrent(ConcurrentFlow),
}

impl FlowWitness {
    pub fn total(&self) -> Flow {
        match self {
            Self::Plain(f) => f.clone(),
            Self::Concurrent(cf) => cf.total(),
        }
    }
}

fn resolve(h: &Hypergraph, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| h.vertex(n).ok_or_else(|| Error::InvalidFlow(format!("unknown vertex `{n}`"))))
        .collect()
}

fn entry(h: &Hypergraph, pair: Option<[usize; 2]>, p: &[usize], w: &Rational) -> PathEntry {
    PathEntry { pair, path: p.iter().map(|&v| h.name(v).to_string()).collect(), weight: rational::fmt(w) }
}

pub fn flow_to_json(h: &Hypergraph, f: &Flow) -> String {
    let entries: Vec<PathEntry> = f.paths.iter().map(|(p, w)| entry(h, None, p, w)).collect();
    serde_json::to_string_pretty(&entries).expect("flow serializes")
}

pub fn concurrent_to_json(h: &Hypergraph, cf: &ConcurrentFlow) -> String {
    let file = ConcurrentFile {
        cliques: cf.cliques.iter().map(|k| k.iter().map(|&v| h.name(v).to_string()).collect()).collect(),
        epsilon: rational::fmt(&cf.epsilon),
        paths: cf
            .flows
            .iter()
            .flat_map(|((i, j), f)| f.paths.iter().map(move |(p, w)| (*i, *j, p, w)))
            .map(|(i, j, p, w)| entry(h, Some([i, j]), p, w))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("flow serializes")
}

pub fn flow_from_json(h: &Hypergraph, text: &str) -> Result<FlowWitness> {
    match serde_json::from_str::<AnyFlowFile>(text)? {
        AnyFlowFile::Plain(entries) => {
            let mut f = Flow::new();
            for e in entries {
                f.add(resolve(h, &e.path)?, rational::parse(&e.weight)?);
            }
            Ok(FlowWitness::Plain(f))
        }
        AnyFlowFile::Concurrent(file) => {
            let cliques = file.cliques.iter().map(|k| resolve(h, k)).collect::<Result<Vec<_>>>()?;
            let k = cliques.len();
            let mut flows: Vec<((usize, usize), Flow)> =
                (0..k).flat_map(|i| (i + 1..k).map(move |j| ((i, j), Flow::new()))).collect();
            for e in file.paths {
                let [i, j] = e.pair.ok_or_else(|| Error::InvalidFlow("concurrent entry without pair".into()))?;
                let slot = flows
                    .iter_mut()
                    .find(|(p, _)| *p == (i, j))
                    .ok_or_else(|| Error::InvalidFlow(format!("bad pair [{i},{j}]")))?;
                slot.1.add(resolve(h, &e.path)?, rational::parse(&e.weight)?);
            }
            Ok(FlowWitness::Concurrent(ConcurrentFlow {
                cliques,
                flows,
                epsilon: rational::parse(&file.epsilon)?,
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Hypergraph {
        Hypergraph::with_size(3, [vec![0, 1], vec![1, 2], vec![0, 2]])
    }

    fn single_edge() -> Hypergraph {
        Hypergraph::with_size(2, [vec![0, 1]])
    }

    #[test]
    fn path_enumeration() {
        assert_eq!(enumerate_paths(&single_edge(), &[0], &[1], 6).unwrap(), vec![vec![0, 1]]);
        assert_eq!(enumerate_paths(&triangle(), &[0], &[2], 6).unwrap(), vec![vec![0, 2]]);
        assert_eq!(enumerate_paths(&single_edge(), &[0], &[0], 6).unwrap(), vec![vec![0]]);
        let p4 = Hypergraph::with_size(4, [vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert!(enumerate_paths(&p4, &[0], &[3], 2).unwrap().is_empty());
        assert_eq!(enumerate_paths(&p4, &[0], &[3], 3).unwrap(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn flow_validation() {
        let h = single_edge();
        let mut f = Flow::new();
        f.add(vec![0, 1], one());
        assert!(validate_flow(&h, &f).is_ok());
        let mut g = Flow::new();
        g.add(vec![0, 1], frac(3, 2));
        let rep = validate_flow(&h, &g);
        assert_eq!(rep.violations, vec![FlowViolation::Overloaded { edge: vec![0, 1], load: frac(3, 2) }]);
        let t = triangle();
        let mut f3 = Flow::new();
        for p in [vec![0, 1], vec![1, 2], vec![0, 2]] {
            f3.add(p, frac(1, 3));
        }
        assert!(validate_flow(&t, &f3).is_ok());
        assert_eq!(edge_loads(&t, &f3), vec![one(); 3]);
    }

    #[test]
    fn max_flow_examples() {
        assert_eq!(max_ab_flow(&single_edge(), &[0], &[1], 6).unwrap().0, one());
        // u=0, v=1, x=2, y=3
        let diamond = Hypergraph::with_size(4, [vec![0, 2], vec![2, 1], vec![0, 3], vec![3, 1]]);
        let (v, f) = max_ab_flow(&diamond, &[0], &[1], 6).unwrap();
        assert_eq!(v, one());
        assert!(validate_flow(&diamond, &f).is_ok());
        let split = Hypergraph::with_size(4, [vec![0, 1], vec![2, 3]]);
        assert_eq!(max_ab_flow(&split, &[0], &[3], 6).unwrap().0, zero());
    }

    #[test]
    fn concurrent_examples() {
        let cf = max_uniform_concurrent_flow(&single_edge(), &[vec![0], vec![1]], 6).unwrap();
        assert_eq!(cf.epsilon, one());
        let a = alpha_of_flow(&single_edge(), &cf);
        assert_eq!(a.weights, vec![frac(1, 2), frac(1, 2)]);
        assert_eq!(cf.delta(), frac(1, 2));

        let t = triangle();
        let cf = max_uniform_concurrent_flow(&t, &[vec![0], vec![1], vec![2]], 6).unwrap();
        assert_eq!(cf.epsilon, frac(1, 3));
        assert!(validate_concurrent(&t, &cf).is_ok());
        let a = alpha_of_flow(&t, &cf);
        assert_eq!(cf.delta(), frac(1, 3));
        assert_eq!(a.total(), one());
        let mu = mu_of_flow(&t, &cf.total());
        for v in 0..3 {
            assert!(a.weights[v] <= mu.weights[v]);
        }
    }

    #[test]
    fn partition_errors() {
        let t = triangle();
        assert!(matches!(max_uniform_concurrent_flow(&t, &[vec![0, 1, 2]], 6), Err(Error::BadPartition(_))));
        assert!(matches!(
            max_uniform_concurrent_flow(&t, &[vec![0], vec![0]], 6),
            Err(Error::BadPartition(_))
        ));
        let p3 = Hypergraph::with_size(3, [vec![0, 1], vec![1, 2]]);
        assert!(matches!(
            max_uniform_concurrent_flow(&p3, &[vec![0, 2], vec![1]], 6),
            Err(Error::BadPartition(_))
        ));
    }

    #[test]
    fn mu_examples() {
        let h = Hypergraph::with_size(3, [vec![0, 1], vec![1, 2]]);
        let mut f = Flow::new();
        f.add(vec![0, 1], one());
        let mu = mu_of_flow(&h, &f);
        assert_eq!(mu.total(), one());
        let mut g = Flow::new();
        g.add(vec![0, 1, 2], one());
        assert_eq!(mu_of_flow(&h, &g).total(), frac(3, 2));
        assert_eq!(mu_of_flow(&h, &Flow::new()).total(), zero());
    }

    #[test]
    fn json_round_trip() {
        let t = triangle();
        let cf = max_uniform_concurrent_flow(&t, &[vec![0], vec![1], vec![2]], 6).unwrap();
        let text = concurrent_to_json(&t, &cf);
        assert_eq!(flow_from_json(&t, &text).unwrap(), FlowWitness::Concurrent(cf.clone()));
        let plain = flow_to_json(&t, &cf.total());
        assert_eq!(flow_from_json(&t, &plain).unwrap(), FlowWitness::Plain(cf.total()));
    }

    #[test]
    fn partition_search_on_triangle() {
        let cf = search_clique_partition(&triangle(), 6, 1000).unwrap().unwrap();
        assert!(cf.epsilon.is_positive());
        assert!(validate_concurrent(&triangle(), &cf).is_ok());
    }
}
