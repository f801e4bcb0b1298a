//! Tree decompositions and width measures: exact treewidth by subset DP,
//! fractional edge covers by exact LP, and balanced separators.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::lp::{Lp, LpOutcome, Sense};
use crate::rational::{int, one, zero, Rational};
use crate::relcore::Hypergraph;
use crate::report::ValidationReport;
use crate::{Error, Result};

pub const DEFAULT_TW_CAP: usize = 18;
pub const DEFAULT_HCS_CAP: usize = 14;
pub const DEFAULT_SEPARATOR_BUDGET: u64 = 10_000_000;

/// A tree over nodes `0..bags.len()`, each node carrying a bag of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub node_names: Vec<String>,
    pub tree_edges: Vec<(usize, usize)>,
    pub bags: Vec<BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
struct TdFile {
    nodes: Vec<String>,
    edges: Vec<[String; 2]>,
    bags: BTreeMap<String, Vec<String>>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<BTreeSet<usize>>, tree_edges: Vec<(usize, usize)>) -> Self {
        let node_names = (0..bags.len()).map(|i| format!("t{i}")).collect();
        Self { node_names, tree_edges, bags }
    }

    /// The decomposition with one bag holding every vertex.
    pub fn single_bag(h: &Hypergraph) -> Self {
        Self::new(vec![(0..h.num_vertices()).collect()], Vec::new())
    }

    /// Bags given by vertex names, tree edges by node position.
    pub fn from_named(h: &Hypergraph, bags: &[&[&str]], edges: &[(usize, usize)]) -> Result<Self> {
        let bags = bags
            .iter()
            .map(|b| {
                b.iter()
                    .map(|n| h.vertex(n).ok_or_else(|| unknown_vertex(n)))
                    .collect::<Result<BTreeSet<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(bags, edges.to_vec()))
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    /// Width: largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(u, v) in &self.tree_edges {
            if u < adj.len() && v < adj.len() {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn from_json(text: &str, h: &Hypergraph) -> Result<Self> {
        let f: TdFile = serde_json::from_str(text)?;
        let pos = |n: &str| {
            f.nodes
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::InvalidTreeDecomposition(format!("unknown node `{n}`")))
        };
        let mut bags = vec![BTreeSet::new(); f.nodes.len()];
        for (node, vs) in &f.bags {
            let i = pos(node)?;
            for v in vs {
                bags[i].insert(h.vertex(v).ok_or_else(|| unknown_vertex(v))?);
            }
        }
        let tree_edges = f.edges.iter().map(|[u, v]| Ok((pos(u)?, pos(v)?))).collect::<Result<_>>()?;
        Ok(Self { node_names: f.nodes, tree_edges, bags })
    }

    pub fn load(path: &Path, h: &Hypergraph) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?, h)
    }

    pub fn to_json(&self, h: &Hypergraph) -> String {
        let f = TdFile {
            nodes: self.node_names.clone(),
            edges: self
                .tree_edges
                .iter()
                .map(|&(u, v)| [self.node_names[u].clone(), self.node_names[v].clone()])
                .collect(),
            bags: self
                .node_names
                .iter()
                .zip(&self.bags)
                .map(|(n, b)| (n.clone(), b.iter().map(|&v| h.name(v).to_string()).collect()))
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("td serializes")
    }
}

fn unknown_vertex(n: &str) -> Error {
    Error::InvalidTreeDecomposition(format!("unknown vertex `{n}`"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdViolation {
    NoNodes,
    NotATree,
    VertexOutOfRange(usize),
    VertexMissing(String),
    VertexDisconnected(String),
    EdgeUncovered(Vec<String>),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoNodes => write!(f, "decomposition has no nodes"),
            Self::NotATree => write!(f, "tree edges do not form a tree"),
            Self::VertexOutOfRange(v) => write!(f, "bag mentions vertex index {v} outside the hypergraph"),
            Self::VertexMissing(v) => write!(f, "vertex `{v}` is in no bag"),
            Self::VertexDisconnected(v) => write!(f, "bags containing `{v}` are not connected"),
            Self::EdgeUncovered(e) => write!(f, "edge {{{}}} is in no bag", e.join(",")),
        }
    }
}

fn is_tree(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 || edges.len() != n - 1 || edges.iter().any(|&(u, v)| u >= n || v >= n) {
        return false;
    }
    connected_within(n, edges, &vec![true; n])
}

/// Whether the nodes marked in `keep` induce a connected subgraph.
fn connected_within(n: usize, edges: &[(usize, usize)], keep: &[bool]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let Some(start) = keep.iter().position(|&k| k) else {
        return true;
    };
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut q = VecDeque::from([start]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if keep[v] && !seen[v] {
                seen[v] = true;
                q.push_back(v);
            }
        }
    }
    (0..n).all(|i| !keep[i] || seen[i])
}

pub fn validate_td(h: &Hypergraph, td: &TreeDecomposition) -> ValidationReport<TdViolation> {
    let mut rep = ValidationReport::new();
    let n = td.num_nodes();
    if n == 0 {
        rep.push(TdViolation::NoNodes);
        return rep;
    }
    if !is_tree(n, &td.tree_edges) {
        rep.push(TdViolation::NotATree);
    }
    let nv = h.num_vertices();
    for b in &td.bags {
        for &v in b {
            if v >= nv {
                rep.push(TdViolation::VertexOutOfRange(v));
            }
        }
    }
    let edges_ok = td.tree_edges.iter().all(|&(u, v)| u < n && v < n);
    for v in 0..nv {
        let keep: Vec<bool> = td.bags.iter().map(|b| b.contains(&v)).collect();
        if !keep.iter().any(|&k| k) {
            rep.push(TdViolation::VertexMissing(h.name(v).to_string()));
        } else if edges_ok && !connected_within(n, &td.tree_edges, &keep) {
            rep.push(TdViolation::VertexDisconnected(h.name(v).to_string()));
        }
    }
    for e in h.edges() {
        if !td.bags.iter().any(|b| e.iter().all(|v| b.contains(v))) {
            rep.push(TdViolation::EdgeUncovered(e.iter().map(|&v| h.name(v).to_string()).collect()));
        }
    }
    rep
}

/// Vertices outside `s ∪ {v}` reachable from `v` through `s`.
fn q_set(adj: &[u32], s: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut frontier = 1u32 << v;
    let mut out = 0u32;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let nb = adj[u] & !seen;
        seen |= nb;
        out |= nb & !s;
        frontier |= nb & s;
    }
    out
}

pub fn treewidth_exact(h: &Hypergraph) -> Result<(usize, TreeDecomposition)> {
    treewidth_exact_capped(h, DEFAULT_TW_CAP)
}

/// Exact treewidth via `TW(S) = min_{v∈S} max(TW(S∖v), |Q(S∖v, v)|)` over
/// all vertex subsets, with a witnessing decomposition built from the
/// optimal elimination order.
pub fn treewidth_exact_capped(h: &Hypergraph, cap: usize) -> Result<(usize, TreeDecomposition)> {
    let n = h.num_vertices();
    if n > cap || n > 30 {
        return Err(Error::TooLarge(format!("treewidth on {n} vertices exceeds cap {cap}")));
    }
    if n == 0 {
        return Ok((0, TreeDecomposition::new(vec![BTreeSet::new()], Vec::new())));
    }
    let adj: Vec<u32> = h.adjacency_masks().iter().map(|&m| m as u32).collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut tw = vec![u8::MAX; 1usize << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let q = q_set(&adj, prev, v).count_ones() as u8;
            best = best.min(tw[prev as usize].max(q));
        }
        tw[s as usize] = best;
    }
    // Walk back: the last vertex of S in the elimination order.
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let target = tw[s as usize];
        let mut rest = s;
        loop {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            if tw[prev as usize].max(q_set(&adj, prev, v).count_ones() as u8) == target {
                order.push(v);
                s = prev;
                break;
            }
        }
    }
    order.reverse();
    let width = tw[full as usize] as usize;
    let td = decomposition_from_order(&adj, &order);
    debug_assert_eq!(td.width(), width);
    Ok((width, td))
}

/// Bag of each vertex is itself plus its later neighbors in the filled
/// graph; parent is the earliest-eliminated of those neighbors.
fn decomposition_from_order(adj: &[u32], order: &[usize]) -> TreeDecomposition {
    let n = order.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut eliminated = 0u32;
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let q = q_set(adj, eliminated, v);
        let mut bag: BTreeSet<usize> = BTreeSet::from([v]);
        let mut parent = None;
        let mut rest = q;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            bag.insert(u);
            parent = Some(parent.map_or(pos[u], |p: usize| p.min(pos[u])));
        }
        bags.push(bag);
        match parent {
            Some(p) => edges.push((i, p)),
            None if i + 1 < n => edges.push((i, i + 1)),
            None => {}
        }
        eliminated |= 1 << v;
    }
    contract_subsumed(TreeDecomposition::new(bags, edges))
}

/// Merges every bag contained in a neighboring bag into that neighbor.
pub fn contract_subsumed(mut td: TreeDecomposition) -> TreeDecomposition {
    loop {
        let adj = td.neighbors();
        let hit = (0..td.num_nodes()).find_map(|u| {
            adj[u].iter().find(|&&v| td.bags[u].is_subset(&td.bags[v])).map(|&v| (u, v))
        });
        let Some((u, v)) = hit else { break };
        let mut edges: Vec<(usize, usize)> = td
            .tree_edges
            .iter()
            .filter(|&&(a, b)| !((a == u && b == v) || (a == v && b == u)))
            .map(|&(a, b)| (if a == u { v } else { a }, if b == u { v } else { b }))
            .collect();
        // Drop node u and shift indices.
        let shift = |x: usize| if x > u { x - 1 } else { x };
        for e in &mut edges {
            *e = (shift(e.0), shift(e.1));
        }
        td.bags.remove(u);
        td.tree_edges = edges;
    }
    TreeDecomposition::new(td.bags, td.tree_edges)
}

/// Optimal fractional edge cover of a vertex set, with a matching
/// fractional independent set as duality witness.
#[derive(Clone, Debug, PartialEq)]
pub struct FracCover {
    pub value: Rational,
    /// Weight per hyperedge, indexed like `h.edges()`.
    pub weights: Vec<Rational>,
    /// Dual weight per vertex of the hypergraph (zero outside `X`).
    pub packing: Vec<Rational>,
}

pub fn frac_edge_cover_number(h: &Hypergraph, x: &[usize]) -> Result<FracCover> {
    let m = h.edges().len();
    let nv = h.num_vertices();
    let xs: BTreeSet<usize> = x.iter().copied().collect();
    if let Some(&v) = xs.iter().find(|&&v| v >= nv) {
        return Err(Error::InvalidArgument(format!("vertex index {v} out of range")));
    }
    if let Some(&v) = xs.iter().find(|&&v| !h.edges().iter().any(|e| e.contains(&v))) {
        return Err(Error::Infeasible(format!("vertex `{}` lies in no edge", h.name(v))));
    }
    if xs.is_empty() {
        return Ok(FracCover { value: zero(), weights: vec![zero(); m], packing: vec![zero(); nv] });
    }
    let mut primal = Lp::minimize(vec![one(); m]);
    for &v in &xs {
        let row = (0..m).filter(|&e| h.edges()[e].contains(&v)).map(|e| (e, one())).collect();
        primal.constrain(row, Sense::Ge, one());
    }
    for e in 0..m {
        primal.constrain(vec![(e, one())], Sense::Le, one());
    }
    let (value, weights) = match primal.solve() {
        LpOutcome::Optimal { value, x } => (value, x),
        other => return Err(Error::Infeasible(format!("cover LP: {other:?}"))),
    };
    let xv: Vec<usize> = xs.iter().copied().collect();
    let mut dual = Lp::maximize(vec![one(); xv.len()]);
    for e in h.edges() {
        let row: Vec<_> =
            xv.iter().enumerate().filter(|(_, v)| e.contains(v)).map(|(i, _)| (i, one())).collect();
        if !row.is_empty() {
            dual.constrain(row, Sense::Le, one());
        }
    }
    let LpOutcome::Optimal { value: dv, x: y } = dual.solve() else {
        return Err(Error::Infeasible("packing LP has no optimum".into()));
    };
    assert_eq!(dv, value, "LP duality gap in fractional edge cover");
    let mut packing = vec![zero(); nv];
    for (i, &v) in xv.iter().enumerate() {
        packing[v] = y[i].clone();
    }
    Ok(FracCover { value, weights, packing })
}

/// `max_t ρ*(bag_t)` for a valid decomposition.
pub fn fhtw_of_td(h: &Hypergraph, td: &TreeDecomposition) -> Result<Rational> {
    let rep = validate_td(h, td);
    if !rep.is_ok() {
        return Err(Error::InvalidTreeDecomposition(rep.to_string()));
    }
    let mut best = zero();
    for b in &td.bags {
        let bag: Vec<usize> = b.iter().copied().collect();
        let v = frac_edge_cover_number(h, &bag)?.value;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeparatorCertificate {
    Separator(Vec<usize>),
    /// Every vertex set of size at most `k` was checked and none separates.
    Exhausted { subsets_checked: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatorWitness {
    pub w: Vec<usize>,
    pub k: usize,
    pub certificate: SeparatorCertificate,
}

impl SeparatorWitness {
    pub fn separator(&self) -> Option<&[usize]> {
        match &self.certificate {
            SeparatorCertificate::Separator(s) => Some(s),
            SeparatorCertificate::Exhausted { .. } => None,
        }
    }
}

/// Connected components of the graph restricted to `alive`, as masks.
pub(crate) fn components(adj: &[u64], alive: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = alive;
    while rest != 0 {
        let start = rest & rest.wrapping_neg();
        let mut comp = start;
        let mut frontier = start;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let nb = adj[u] & alive & !comp;
            comp |= nb;
            frontier |= nb;
        }
        out.push(comp);
        rest &= !comp;
    }
    out
}

/// Whether removing `s` leaves every component with at most half of `w`.
pub fn is_balanced_separator(adj: &[u64], n: usize, w: u64, s: u64) -> bool {
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let wsize = w.count_ones();
    components(adj, all & !s).iter().all(|&c| 2 * (c & w).count_ones() <= wsize)
}

fn mask_of(vs: &[usize]) -> u64 {
    vs.iter().fold(0, |m, &v| m | (1u64 << v))
}

fn members(m: u64) -> Vec<usize> {
    (0..64).filter(|&i| m >> i & 1 == 1).collect()
}

/// Calls `f` on every subset of `0..n` of size exactly `k` in colex order
/// until it returns true.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(u64) -> bool) -> bool {
    if k > n {
        return false;
    }
    if k == 0 {
        return f(0);
    }
    let mut s: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while s < limit {
        if f(s) {
            return true;
        }
        // Gosper's hack.
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    false
}

pub fn has_balanced_separator(g: &Hypergraph, w: &[usize], k: usize) -> Result<SeparatorWitness> {
    has_balanced_separator_budget(g, w, k, DEFAULT_SEPARATOR_BUDGET)
}

/// Exhaustive search for `S` with `|S| ≤ k` such that each component of
/// `g − S` contains at most `|W|/2` vertices of `W`.
pub fn has_balanced_separator_budget(
    g: &Hypergraph,
    w: &[usize],
    k: usize,
    budget: u64,
) -> Result<SeparatorWitness> {
    let n = g.num_vertices();
    if n > 64 {
        return Err(Error::TooLarge(format!("separator search on {n} vertices")));
    }
    if w.is_empty() {
        return Err(Error::InvalidArgument("W must be nonempty".into()));
    }
    let total: u64 = (0..=k.min(n)).map(|i| binomial(n as u64, i as u64)).sum();
    if total > budget {
        return Err(Error::TooLarge(format!("{total} candidate separators exceed budget {budget}")));
    }
    let adj = g.adjacency_masks();
    let wm = mask_of(w);
    let mut checked = 0u64;
    let mut found = None;
    for size in 0..=k.min(n) {
        let hit = for_each_subset(n, size, |s| {
            checked += 1;
            if is_balanced_separator(&adj, n, wm, s) {
                found = Some(s);
                true
            } else {
                false
            }
        });
        if hit {
            break;
        }
    }
    let certificate = match found {
        Some(s) => SeparatorCertificate::Separator(members(s)),
        None => SeparatorCertificate::Exhausted { subsets_checked: checked },
    };
    Ok(SeparatorWitness { w: members(wm), k, certificate })
}

pub fn find_hcs(g: &Hypergraph, k: usize) -> Result<Option<Vec<usize>>> {
    find_hcs_capped(g, k, DEFAULT_HCS_CAP)
}

/// Some `W` with `|W| = 2k+1` and no balanced `k`-separator, if any.
pub fn find_hcs_capped(g: &Hypergraph, k: usize, cap: usize) -> Result<Option<Vec<usize>>> {
    let n = g.num_vertices();
    if n > cap {
        return Err(Error::TooLarge(format!("highly connected set search on {n} vertices exceeds cap {cap}")));
    }
    let adj = g.adjacency_masks();
    // Separators depend only on S; precompute the component lists once.
    let mut seps = Vec::new();
    for size in 0..=k.min(n) {
        for_each_subset(n, size, |s| {
            let all = (1u64 << n) - 1;
            seps.push(components(&adj, all & !s));
            false
        });
    }
    let mut found = None;
    for_each_subset(n, 2 * k + 1, |w| {
        let half = w.count_ones();
        let separated = seps.iter().any(|comps| comps.iter().all(|&c| 2 * (c & w).count_ones() <= half));
        if !separated {
            found = Some(members(w));
        }
        !separated
    });
    Ok(found)
}

/// Largest `k` for which [`find_hcs`] succeeds, with its witness.
pub fn largest_hcs(g: &Hypergraph) -> Result<(usize, Option<Vec<usize>>)> {
    let n = g.num_vertices();
    let mut best = (0, None);
    for k in 0..=n / 2 {
        match find_hcs(g, k)? {
            Some(w) => best = (k, Some(w)),
            None => break,
        }
    }
    Ok(best)
}

/// Ratio helper used by reports: `tw + 1` as a rational.
pub fn tw_plus_one(tw: usize) -> Rational {
    int(tw as i64 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn clique(k: usize) -> Hypergraph {
        let mut e = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                e.push(vec![i, j]);
            }
        }
        Hypergraph::with_size(k, e)
    }

    fn grid(m: usize) -> Hypergraph {
        let id = |r: usize, c: usize| r * m + c;
        let mut e = Vec::new();
        for r in 0..m {
            for c in 0..m {
                if c + 1 < m {
                    e.push(vec![id(r, c), id(r, c + 1)]);
                }
                if r + 1 < m {
                    e.push(vec![id(r, c), id(r + 1, c)]);
                }
            }
        }
        Hypergraph::with_size(m * m, e)
    }

    fn path(n: usize) -> Hypergraph {
        Hypergraph::with_size(n, (0..n - 1).map(|i| vec![i, i + 1]))
    }

    /// Oracle: min over all elimination orders of the max back-degree.
    fn tw_by_permutations(h: &Hypergraph) -> usize {
        let n = h.num_vertices();
        let adj: Vec<u32> = h.adjacency_masks().iter().map(|&m| m as u32).collect();
        let mut order: Vec<usize> = (0..n).collect();
        let mut best = usize::MAX;
        fn heap(k: usize, a: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if k <= 1 {
                f(a);
                return;
            }
            for i in 0..k {
                heap(k - 1, a, f);
                let j = if k.is_multiple_of(2) { i } else { 0 };
                a.swap(j, k - 1);
            }
        }
        heap(n, &mut order, &mut |o| {
            let mut elim = 0u32;
            let mut w = 0;
            for &v in o {
                w = w.max(q_set(&adj, elim, v).count_ones() as usize);
                elim |= 1 << v;
            }
            best = best.min(w);
        });
        best
    }

    #[test]
    fn validate_examples() {
        let p3 = path(3);
        assert!(validate_td(&p3, &TreeDecomposition::single_bag(&p3)).is_ok());
        let td = TreeDecomposition::new(vec![[0, 1].into(), [1, 2].into()], vec![(0, 1)]);
        assert!(validate_td(&p3, &td).is_ok());
        let bad = TreeDecomposition::new(vec![[0, 1].into(), [2].into()], vec![(0, 1)]);
        let rep = validate_td(&p3, &bad);
        assert_eq!(rep.violations, vec![TdViolation::EdgeUncovered(vec!["1".into(), "2".into()])]);
        let gap = TreeDecomposition::new(vec![[0, 1].into(), [1, 2].into(), [0].into()], vec![(0, 1), (1, 2)]);
        assert!(validate_td(&p3, &gap).violations.contains(&TdViolation::VertexDisconnected("0".into())));
    }

    #[test]
    fn treewidth_small_families() {
        for k in 1..=8 {
            let (w, td) = treewidth_exact(&clique(k)).unwrap();
            assert_eq!(w, k - 1);
            assert!(validate_td(&clique(k), &td).is_ok());
        }
        let (w, td) = treewidth_exact(&path(7)).unwrap();
        assert_eq!((w, td.width()), (1, 1));
        let (w, td) = treewidth_exact(&grid(3)).unwrap();
        assert_eq!(w, 3);
        assert!(validate_td(&grid(3), &td).is_ok());
        assert_eq!(w, tw_by_permutations(&grid(3)));
    }

    #[test]
    fn treewidth_cap() {
        assert!(matches!(treewidth_exact_capped(&path(5), 4), Err(Error::TooLarge(_))));
    }

    #[test]
    fn fractional_covers() {
        let e = Hypergraph::with_size(2, [vec![0, 1]]);
        assert_eq!(frac_edge_cover_number(&e, &[0, 1]).unwrap().value, one());
        let tri = clique(3);
        let c = frac_edge_cover_number(&tri, &[0, 1, 2]).unwrap();
        assert_eq!(c.value, frac(3, 2));
        assert_eq!(c.packing.iter().sum::<Rational>(), frac(3, 2));
        assert_eq!(frac_edge_cover_number(&tri, &[]).unwrap().value, zero());
        let iso = Hypergraph::with_size(3, [vec![0, 1]]);
        assert!(matches!(frac_edge_cover_number(&iso, &[2]), Err(Error::Infeasible(_))));
        assert_eq!(fhtw_of_td(&tri, &TreeDecomposition::single_bag(&tri)).unwrap(), frac(3, 2));
        assert_eq!(fhtw_of_td(&e, &TreeDecomposition::single_bag(&e)).unwrap(), one());
    }

    #[test]
    fn separators() {
        let p3 = path(3);
        let w = has_balanced_separator(&p3, &[0, 1, 2], 1).unwrap();
        assert_eq!(w.separator(), Some(&[1][..]));
        let w = has_balanced_separator(&clique(5), &[0, 1, 2, 3, 4], 1).unwrap();
        assert!(matches!(w.certificate, SeparatorCertificate::Exhausted { subsets_checked: 6 }));
        let w = has_balanced_separator(&p3, &[1], 0).unwrap();
        assert!(w.separator().is_none());
    }

    #[test]
    fn hcs_examples() {
        let w = find_hcs(&clique(8), 2).unwrap().unwrap();
        assert_eq!(w.len(), 5);
        assert!(find_hcs(&path(9), 1).unwrap().is_none());
        // tw(K7) = 6 > 3·1, so a set for k = 1 must exist.
        assert!(find_hcs(&clique(7), 1).unwrap().is_some());
    }

    #[test]
    fn td_json_round_trip() {
        let g = grid(3);
        let (_, td) = treewidth_exact(&g).unwrap();
        let text = td.to_json(&g);
        assert_eq!(TreeDecomposition::from_json(&text, &g).unwrap(), td);
    }
}
