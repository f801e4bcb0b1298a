//! Shared oracles and instance generators for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use homcirc::circuit::{Circuit, Repr};
use homcirc::relcore::{Hypergraph, RelSymbol, Structure, StructureBuilder};
use homcirc::rng::{below, Rng};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Every total map from `a` to `b` checked tuple by tuple.
pub fn brute_homs(a: &Structure, b: &Structure) -> BTreeSet<Vec<usize>> {
    let n = a.len();
    let m = b.len();
    let mut out = BTreeSet::new();
    if m == 0 {
        if n == 0 {
            out.insert(Vec::new());
        }
        return out;
    }
    type Constraint = (Vec<Vec<usize>>, BTreeSet<Vec<usize>>);
    let rels: Vec<Constraint> = a
        .relations()
        .map(|(sym, ts)| {
            let target = b.relation_by_name(&sym.name).unwrap_or(&[]).iter().cloned().collect();
            (ts.to_vec(), target)
        })
        .collect();
    let mut h = vec![0usize; n];
    loop {
        let ok = rels
            .iter()
            .all(|(ts, target)| ts.iter().all(|t| target.contains(&t.iter().map(|&v| h[v]).collect::<Vec<_>>())));
        if ok {
            out.insert(h.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            h[i] += 1;
            if h[i] < m {
                break;
            }
            h[i] = 0;
        }
    }
}

/// Rows of a representation over all `nvars` variables.
pub fn repr_rows(r: &Repr, nvars: usize) -> BTreeSet<Vec<usize>> {
    match r {
        Repr::Empty => BTreeSet::new(),
        Repr::Circuit(c) => circuit_rows(c, nvars),
    }
}

pub fn circuit_rows(c: &Circuit, nvars: usize) -> BTreeSet<Vec<usize>> {
    let f = homcirc::circuit::eval_circuit(c).unwrap();
    assert_eq!(f.vars, (0..nvars).collect::<Vec<_>>());
    f.rows.into_iter().collect()
}

/// Connected components of a hypergraph restricted to `alive`, by BFS.
pub fn components(g: &Hypergraph, alive: &[bool]) -> Vec<Vec<usize>> {
    let adj = g.adjacency();
    let mut seen = vec![false; g.num_vertices()];
    let mut out = Vec::new();
    for s in 0..g.num_vertices() {
        if !alive[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if alive[v] && !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    q.push_back(v);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// All subsets of `0..n` with at most `k` elements.
pub fn small_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for v in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Whether some `S` with `|S| ≤ k` leaves every component with at most
/// half of `W`.
pub fn brute_has_balanced_separator(g: &Hypergraph, w: &[usize], k: usize) -> bool {
    let n = g.num_vertices();
    small_subsets(n, k).into_iter().any(|s| {
        let mut alive = vec![true; n];
        for &v in &s {
            alive[v] = false;
        }
        components(g, &alive).iter().all(|c| 2 * c.iter().filter(|v| w.contains(v)).count() <= w.len())
    })
}

fn rand(rng: &mut Rng, n: usize) -> usize {
    below(rng, n as u32) as usize
}

/// A random connected query: `nvars` elements, a few relations of arity
/// 1..=`max_arity`, tuples possibly repeating elements.
pub fn random_query(rng: &mut Rng, nvars: usize, max_arity: usize, max_tuples: usize) -> Structure {
    loop {
        let nrel = 1 + rand(rng, 3);
        let mut b = StructureBuilder::new();
        let names: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
        for n in &names {
            b.element(n);
        }
        let mut arities = Vec::new();
        for r in 0..nrel {
            let ar = 1 + rand(rng, max_arity);
            arities.push(ar);
            b.declare(&format!("R{r}"), ar);
        }
        let ntup = 1 + rand(rng, max_tuples);
        for _ in 0..ntup {
            let r = rand(rng, nrel);
            let t: Vec<usize> = (0..arities[r]).map(|_| rand(rng, nvars)).collect();
            b.add_indices(r, t);
        }
        let a = b.build();
        if homcirc::relcore::is_connected(&a) {
            return a;
        }
    }
}

/// Random data over `sig` on `size` elements with at most `per_rel` tuples
/// per relation.
pub fn random_data(rng: &mut Rng, sig: &[RelSymbol], size: usize, per_rel: usize) -> Structure {
    let mut b = StructureBuilder::new();
    for i in 0..size {
        b.element(&format!("d{i}"));
    }
    for (r, s) in sig.iter().enumerate() {
        b.declare(&s.name, s.arity);
        let n = rand(rng, per_rel + 1);
        for _ in 0..n {
            b.add_indices(r, (0..s.arity).map(|_| rand(rng, size)).collect());
        }
    }
    b.build()
}

pub fn complete_graph(k: usize) -> Hypergraph {
    Hypergraph::with_size(k, (0..k).flat_map(|u| (u + 1..k).map(move |v| vec![u, v])))
}

pub fn grid(rows: usize, cols: usize) -> Hypergraph {
    let mut e = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                e.push(vec![v, v + 1]);
            }
            if i + 1 < rows {
                e.push(vec![v, v + cols]);
            }
        }
    }
    Hypergraph::with_size(rows * cols, e)
}

pub fn random_tree(rng: &mut Rng, n: usize) -> Hypergraph {
    Hypergraph::with_size(n, (1..n).map(|v| vec![rand(rng, v), v]))
}

pub fn gnp_half(rng: &mut Rng, n: usize) -> Hypergraph {
    let mut e = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if homcirc::rng::coin(rng) {
                e.push(vec![u, v]);
            }
        }
    }
    Hypergraph::with_size(n, e)
}
