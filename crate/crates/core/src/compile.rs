//! Compiling `(A, B, TD)` into a deterministic `{∪,×}`-circuit for
//! `Hom(A, B)`.
//!
//! Each bag is materialized by the backtracking oracle restricted to the
//! relations scoped inside it, then a full semijoin reducer runs over the
//! tree. Each variable is owned by the topmost bag containing it. A bag
//! tuple becomes a ×-chain of its owned inputs followed by one ∪-gate per
//! child over the compatible child tuples.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::circuit::{Circuit, CircuitBuilder, Repr, VTree};
use crate::rational::{self, Rational};
use crate::relcore::{enumerate_homs_with_budget, hypergraph_of, is_connected, Structure, DEFAULT_NODE_BUDGET};
use crate::widths::{fhtw_of_td, validate_td, TreeDecomposition};
use crate::{Error, Result};

/// The tuples of one bag over its variables (in universe order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagRelation {
    pub node: usize,
    pub vars: Vec<usize>,
    pub tuples: Vec<Vec<usize>>,
    /// Product of `|R^B|` over a greedy integral cover of the bag by tuples
    /// of `A`; uncovered variables contribute `|B|`.
    pub cover_bound: BigUint,
    /// Set when some bag variable lies in no relation scoped inside the bag.
    pub uncovered: bool,
}

impl BagRelation {
    fn project(&self, t: &[usize], onto: &[usize]) -> Vec<usize> {
        onto.iter().map(|x| t[self.vars.binary_search(x).unwrap()]).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompileStats {
    pub bag_sizes: Vec<usize>,
    pub reduced_bag_sizes: Vec<usize>,
    pub cover_bounds: Vec<String>,
    pub max_bag_tuples: usize,
    pub circuit_size: usize,
    pub circuit_wires: usize,
    pub fhtw: String,
    pub warnings: Vec<String>,
}

fn check_inputs(a: &Structure, td: &TreeDecomposition) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptyQuery);
    }
    if !is_connected(a) {
        return Err(Error::DisconnectedQuery);
    }
    let rep = validate_td(&hypergraph_of(a), td);
    if !rep.is_ok() {
        return Err(Error::InvalidTreeDecomposition(rep.to_string()));
    }
    Ok(())
}

/// Induced substructure of `a` on `bag`, keeping tuples scoped inside it.
fn induced(a: &Structure, bag: &[usize]) -> Structure {
    let pos: HashMap<usize, usize> = bag.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let relations = a
        .relations()
        .map(|(_, ts)| {
            ts.iter()
                .filter(|t| t.iter().all(|e| pos.contains_key(e)))
                .map(|t| t.iter().map(|e| pos[e]).collect())
                .collect()
        })
        .collect();
    let universe = bag.iter().map(|&v| a.universe()[v].clone()).collect();
    Structure::new_unchecked(a.signature().to_vec(), universe, relations)
}

fn cover_bound(a: &Structure, b: &Structure, bag: &[usize]) -> (BigUint, bool) {
    let mut scoped: Vec<(BTreeSet<usize>, usize)> = Vec::new();
    for (sym, ts) in a.relations() {
        let size = b.relation_by_name(&sym.name).map_or(0, <[_]>::len);
        for t in ts {
            if t.iter().all(|e| bag.contains(e)) {
                scoped.push((t.iter().copied().collect(), size));
            }
        }
    }
    let mut left: BTreeSet<usize> = bag.iter().copied().collect();
    let mut bound = BigUint::one();
    let mut uncovered = false;
    while !left.is_empty() {
        let best = scoped.iter().max_by_key(|(s, _)| s.intersection(&left).count());
        match best {
            Some((s, size)) if s.intersection(&left).count() > 0 => {
                bound *= BigUint::from(*size);
                for v in s {
                    left.remove(v);
                }
            }
            _ => {
                uncovered = true;
                bound *= BigUint::from(b.len()).pow(left.len() as u32);
                left.clear();
            }
        }
    }
    (bound, uncovered)
}

pub fn materialize_bags(a: &Structure, b: &Structure, td: &TreeDecomposition) -> Result<Vec<BagRelation>> {
    materialize_bags_budget(a, b, td, DEFAULT_NODE_BUDGET)
}

/// One relation per bag: all assignments of the bag's variables consistent
/// with every tuple of `a` scoped inside the bag.
pub fn materialize_bags_budget(
    a: &Structure,
    b: &Structure,
    td: &TreeDecomposition,
    budget: u64,
) -> Result<Vec<BagRelation>> {
    check_inputs(a, td)?;
    td.bags
        .iter()
        .enumerate()
        .map(|(node, bag)| {
            let vars: Vec<usize> = bag.iter().copied().collect();
            let sub = induced(a, &vars);
            let tuples =
                enumerate_homs_with_budget(&sub, b, budget)?.into_iter().map(|h| h.values()).collect();
            let (cover_bound, uncovered) = cover_bound(a, b, &vars);
            Ok(BagRelation { node, vars, tuples, cover_bound, uncovered })
        })
        .collect()
}

/// `(parent, children)` of the tree rooted at node 0, plus a preorder.
fn root_tree(td: &TreeDecomposition) -> (Vec<Option<usize>>, Vec<Vec<usize>>, Vec<usize>) {
    let adj = td.neighbors();
    let n = td.num_nodes();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    if n > 0 {
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in adj[u].iter().rev() {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    stack.push(v);
                }
            }
        }
        for &u in &order {
            if let Some(p) = parent[u] {
                children[p].push(u);
            }
        }
        for c in &mut children {
            c.sort_unstable();
        }
    }
    (parent, children, order)
}

fn shared(x: &[usize], y: &[usize]) -> Vec<usize> {
    x.iter().filter(|v| y.binary_search(v).is_ok()).copied().collect()
}

/// Keeps tuples of `keep` whose projection onto the shared variables
/// appears among those of `by`.
fn semijoin(keep: &mut BagRelation, by: &BagRelation) {
    let sh = shared(&keep.vars, &by.vars);
    let proj: HashSet<Vec<usize>> = by.tuples.iter().map(|t| by.project(t, &sh)).collect();
    let k = keep.clone();
    keep.tuples.retain(|t| proj.contains(&k.project(t, &sh)));
}

/// Upward then downward semijoin passes rooted at node 0.
pub fn yannakakis_reduce(mut bags: Vec<BagRelation>, td: &TreeDecomposition) -> Vec<BagRelation> {
    let (parent, _, order) = root_tree(td);
    for &u in order.iter().rev() {
        if let Some(p) = parent[u] {
            let child = bags[u].clone();
            semijoin(&mut bags[p], &child);
        }
    }
    for &u in &order {
        if let Some(p) = parent[u] {
            let par = bags[p].clone();
            semijoin(&mut bags[u], &par);
        }
    }
    bags
}

pub fn compile_td(a: &Structure, b: &Structure, td: &TreeDecomposition) -> Result<Repr> {
    Ok(compile_td_with_stats(a, b, td)?.0)
}

pub fn compile_td_with_stats(a: &Structure, b: &Structure, td: &TreeDecomposition) -> Result<(Repr, CompileStats)> {
    let raw = materialize_bags(a, b, td)?;
    let mut warnings = Vec::new();
    for bag in &raw {
        if bag.uncovered {
            warnings.push(format!(
                "bag {} has variables outside every scoped relation; using the full domain",
                td.node_names[bag.node]
            ));
        }
    }
    let bags = yannakakis_reduce(raw.clone(), td);
    let repr = build_circuit(a, b, td, &bags);
    let fhtw = fhtw_of_td(&hypergraph_of(a), td).map(|r| rational::fmt(&r)).unwrap_or_else(|e| {
        warnings.push(format!("fhtw unavailable: {e}"));
        "n/a".into()
    });
    let stats = CompileStats {
        bag_sizes: raw.iter().map(|r| r.tuples.len()).collect(),
        reduced_bag_sizes: bags.iter().map(|r| r.tuples.len()).collect(),
        cover_bounds: raw.iter().map(|r| r.cover_bound.to_string()).collect(),
        max_bag_tuples: raw.iter().map(|r| r.tuples.len()).max().unwrap_or(0),
        circuit_size: repr.size(),
        circuit_wires: repr.circuit().map_or(0, Circuit::wires),
        fhtw,
        warnings,
    };
    Ok((repr, stats))
}

/// `fhtw` of the decomposition; re-exported for report code.
pub fn td_fhtw(a: &Structure, td: &TreeDecomposition) -> Result<Rational> {
    fhtw_of_td(&hypergraph_of(a), td)
}

fn build_circuit(a: &Structure, b: &Structure, td: &TreeDecomposition, bags: &[BagRelation]) -> Repr {
    let (parent, children, order) = root_tree(td);
    let n = td.num_nodes();
    // Owner: first node in preorder whose bag has the variable.
    let mut owner = vec![usize::MAX; a.len()];
    for &u in &order {
        for &v in &td.bags[u] {
            if owner[v] == usize::MAX {
                owner[v] = u;
            }
        }
    }
    let mut owned = vec![Vec::new(); n];
    for (v, &u) in owner.iter().enumerate() {
        owned[u].push(v);
    }
    // Nodes whose subtree owns at least one variable.
    let mut live = vec![false; n];
    for &u in order.iter().rev() {
        live[u] = !owned[u].is_empty() || children[u].iter().any(|&c| live[c]);
    }
    let mut builder = CircuitBuilder::with_values(a.universe().to_vec(), b.universe().to_vec());
    let mut vtrees: Vec<Option<VTree>> = vec![None; n];
    // Per live child: projection key onto the parent's bag → gate.
    let mut grouped: Vec<HashMap<Vec<usize>, usize>> = vec![HashMap::new(); n];
    for &u in order.iter().rev() {
        if !live[u] {
            continue;
        }
        let bag = &bags[u];
        let kids: Vec<usize> = children[u].iter().copied().filter(|&c| live[c]).collect();
        let kid_shared: Vec<Vec<usize>> = kids.iter().map(|&c| shared(&bags[c].vars, &bag.vars)).collect();
        let mut parts: Vec<VTree> = owned[u].iter().map(|&v| VTree::Leaf(v)).collect();
        parts.extend(kids.iter().map(|&c| vtrees[c].take().unwrap()));
        vtrees[u] = VTree::chain(parts);
        let mut per_key: Vec<(Vec<usize>, usize)> = Vec::new();
        'tuples: for t in &bag.tuples {
            let mut factors: Vec<usize> = owned[u]
                .iter()
                .map(|&v| builder.input(v, t[bag.vars.binary_search(&v).unwrap()]))
                .collect();
            for (ci, &c) in kids.iter().enumerate() {
                match grouped[c].get(&bag.project(t, &kid_shared[ci])) {
                    Some(&g) => factors.push(g),
                    None => continue 'tuples,
                }
            }
            let g = builder.times_chain(&factors);
            if let Some(p) = parent[u] {
                per_key.push((bag.project(t, &shared(&bag.vars, &bags[p].vars)), g));
            } else {
                per_key.push((Vec::new(), g));
            }
        }
        // Group by key in first-appearance order for stable gate numbering.
        let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        for (k, g) in per_key {
            let i = *index.entry(k.clone()).or_insert_with(|| {
                groups.push((k, Vec::new()));
                groups.len() - 1
            });
            groups[i].1.push(g);
        }
        for (k, gs) in groups {
            let g = builder.balanced_union(&gs);
            grouped[u].insert(k, g);
        }
    }
    if n == 0 {
        return Repr::Empty;
    }
    match grouped[0].get(&Vec::new()) {
        Some(&sink) => Repr::Circuit(builder.finish(sink).with_vtree(vtrees[0].take())),
        None => Repr::Empty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{check_deterministic, count_deterministic, eval_circuit, validate_circuit};
    use crate::relcore::{count_homs, enumerate_homs, StructureBuilder};

    fn path_query() -> Structure {
        StructureBuilder::new()
            .relation("E", 2)
            .tuple("E", &["x", "y"])
            .tuple("E", &["y", "z"])
            .build()
    }

    fn small_graph() -> Structure {
        let mut b = StructureBuilder::new().relation("E", 2);
        for (u, v) in [("1", "2"), ("2", "3"), ("3", "1"), ("3", "4"), ("5", "1")] {
            b.add("E", &[u, v]).unwrap();
        }
        b.build()
    }

    fn homs_as_rows(a: &Structure, b: &Structure) -> BTreeSet<Vec<usize>> {
        enumerate_homs(a, b).unwrap().into_iter().map(|h| h.values()).collect()
    }

    fn circuit_rows(r: &Repr, nvars: usize, b: &Structure) -> BTreeSet<Vec<usize>> {
        let Some(c) = r.circuit() else { return BTreeSet::new() };
        let f = eval_circuit(c).unwrap();
        assert_eq!(f.vars, (0..nvars).collect::<Vec<_>>());
        f.rows
            .iter()
            .map(|row| row.iter().map(|&d| b.element(&c.values()[d]).unwrap()).collect())
            .collect()
    }

    #[test]
    fn path_with_two_bags() {
        let a = path_query();
        let b = small_graph();
        let h = hypergraph_of(&a);
        let td = TreeDecomposition::from_named(&h, &[&["x", "y"], &["y", "z"]], &[(0, 1)]).unwrap();
        let r = compile_td(&a, &b, &td).unwrap();
        let c = r.circuit().unwrap();
        assert!(validate_circuit(c).is_ok(), "{}", validate_circuit(c));
        assert!(check_deterministic(c).unwrap());
        assert_eq!(count_deterministic(c), BigUint::from(count_homs(&a, &b).unwrap()));
        assert_eq!(circuit_rows(&r, 3, &b), homs_as_rows(&a, &b));
    }

    #[test]
    fn rooting_at_a_leaf_bag_works_too() {
        let a = path_query();
        let b = small_graph();
        let h = hypergraph_of(&a);
        let td = TreeDecomposition::from_named(&h, &[&["y", "z"], &["x", "y"]], &[(0, 1)]).unwrap();
        let r = compile_td(&a, &b, &td).unwrap();
        assert!(validate_circuit(r.circuit().unwrap()).is_ok());
        assert_eq!(circuit_rows(&r, 3, &b), homs_as_rows(&a, &b));
    }

    #[test]
    fn semijoin_removes_dangling_tuples() {
        let a = path_query();
        let b = small_graph();
        let h = hypergraph_of(&a);
        let td = TreeDecomposition::from_named(&h, &[&["x", "y"], &["y", "z"]], &[(0, 1)]).unwrap();
        let raw = materialize_bags(&a, &b, &td).unwrap();
        assert_eq!(raw[0].tuples.len(), 5);
        let red = yannakakis_reduce(raw.clone(), &td);
        // (3,4) has no continuation: 4 has no out-edge.
        assert_eq!(red[0].tuples.len(), 4);
        assert_eq!(yannakakis_reduce(red.clone(), &td), red);
    }

    #[test]
    fn redundant_bag_without_owned_variables() {
        let a = path_query();
        let b = small_graph();
        let h = hypergraph_of(&a);
        let td =
            TreeDecomposition::from_named(&h, &[&["x", "y"], &["y", "z"], &["y"]], &[(0, 1), (1, 2)]).unwrap();
        let r = compile_td(&a, &b, &td).unwrap();
        assert!(validate_circuit(r.circuit().unwrap()).is_ok());
        assert_eq!(circuit_rows(&r, 3, &b), homs_as_rows(&a, &b));
    }

    #[test]
    fn empty_relation_gives_empty_result() {
        let a = path_query();
        let b = StructureBuilder::new().relation("E", 2).elements(["1", "2"]).build();
        let td = TreeDecomposition::single_bag(&hypergraph_of(&a));
        assert_eq!(compile_td(&a, &b, &td).unwrap(), Repr::Empty);
    }

    #[test]
    fn rejects_disconnected_and_bad_td() {
        let a = StructureBuilder::new().relation("E", 2).tuple("E", &["x", "y"]).tuple("E", &["u", "v"]).build();
        let b = small_graph();
        let td = TreeDecomposition::single_bag(&hypergraph_of(&a));
        assert!(matches!(compile_td(&a, &b, &td), Err(Error::DisconnectedQuery)));
        let p = path_query();
        let h = hypergraph_of(&p);
        let bad = TreeDecomposition::from_named(&h, &[&["x", "y"], &["z"]], &[(0, 1)]).unwrap();
        assert!(matches!(compile_td(&p, &b, &bad), Err(Error::InvalidTreeDecomposition(_))));
    }

    #[test]
    fn uncovered_bag_uses_full_domain() {
        let a = path_query();
        let b = small_graph();
        let h = hypergraph_of(&a);
        // The bag {x,z} sees no relation.
        let td = TreeDecomposition::from_named(&h, &[&["x", "y", "z"], &["x", "z"]], &[(0, 1)]).unwrap();
        let raw = materialize_bags(&a, &b, &td).unwrap();
        assert!(raw[1].uncovered);
        assert_eq!(raw[1].tuples.len(), 25);
        let (r, stats) = compile_td_with_stats(&a, &b, &td).unwrap();
        assert_eq!(stats.warnings.len(), 1);
        assert_eq!(circuit_rows(&r, 3, &b), homs_as_rows(&a, &b));
    }

    #[test]
    fn vtree_is_respected() {
        let a = path_query();
        let b = small_graph();
        let h = hypergraph_of(&a);
        let td = TreeDecomposition::from_named(&h, &[&["x", "y"], &["y", "z"]], &[(0, 1)]).unwrap();
        let r = compile_td(&a, &b, &td).unwrap();
        let c = r.circuit().unwrap();
        assert_eq!(c.vtree().unwrap().vars(), BTreeSet::from([0, 1, 2]));
        assert!(validate_circuit(c).is_ok());
    }
}
