//! `{∪,×}`-circuits over `(X, D)`.
//!
//! Gates are stored in topological order: every child index is smaller than
//! its parent's. Internal gates may carry more than two children while a
//! circuit is being built; [`validate_circuit`] insists on fan-in two and
//! [`to_fanin2`] normalizes.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::report::ValidationReport;
use crate::{Error, Result};

pub const DEFAULT_EVAL_BUDGET: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input { var: usize, value: usize },
    Union(Vec<usize>),
    Times(Vec<usize>),
}

impl Gate {
    pub fn children(&self) -> &[usize] {
        match self {
            Gate::Input { .. } => &[],
            Gate::Union(c) | Gate::Times(c) => c,
        }
    }
}

/// A binary tree over variables. A ×-gate respects it when some node has
/// the left child's variables inside its left subtree and the right child's
/// inside its right subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VTree {
    Leaf(usize),
    Node(Box<VTree>, Box<VTree>),
}

impl VTree {
    pub fn vars(&self) -> BTreeSet<usize> {
        match self {
            VTree::Leaf(v) => BTreeSet::from([*v]),
            VTree::Node(l, r) => {
                let mut s = l.vars();
                s.extend(r.vars());
                s
            }
        }
    }

    /// Left-deep tree over the given parts; `None` for no parts.
    pub fn chain(parts: Vec<VTree>) -> Option<VTree> {
        parts.into_iter().reduce(|acc, p| VTree::Node(Box::new(acc), Box::new(p)))
    }

    /// `(left vars, right vars)` for every internal node.
    fn splits(&self, out: &mut Vec<(BTreeSet<usize>, BTreeSet<usize>)>) -> BTreeSet<usize> {
        match self {
            VTree::Leaf(v) => BTreeSet::from([*v]),
            VTree::Node(l, r) => {
                let lv = l.splits(out);
                let rv = r.splits(out);
                out.push((lv.clone(), rv.clone()));
                lv.union(&rv).copied().collect()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Circuit {
    vars: Vec<String>,
    values: Vec<String>,
    gates: Vec<Gate>,
    sink: usize,
    vtree: Option<VTree>,
}

/// A circuit, or the marker for an empty set of functions.
#[derive(Clone, Debug, PartialEq)]
pub enum Repr {
    Circuit(Circuit),
    Empty,
}

impl Repr {
    pub fn circuit(&self) -> Option<&Circuit> {
        match self {
            Repr::Circuit(c) => Some(c),
            Repr::Empty => None,
        }
    }

    pub fn size(&self) -> usize {
        self.circuit().map_or(0, Circuit::size)
    }

    pub fn count(&self) -> BigUint {
        match self {
            Repr::Circuit(c) => count_deterministic(c),
            Repr::Empty => BigUint::zero(),
        }
    }
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        if self.vars != other.vars || self.sink != other.sink || self.gates.len() != other.gates.len() {
            return false;
        }
        self.gates.iter().zip(&other.gates).all(|(a, b)| match (a, b) {
            (Gate::Input { var: v1, value: d1 }, Gate::Input { var: v2, value: d2 }) => {
                v1 == v2 && self.values[*d1] == other.values[*d2]
            }
            _ => a == b,
        })
    }
}

impl Circuit {
    /// Checks that children precede parents and indices are in range.
    pub fn new(vars: Vec<String>, values: Vec<String>, gates: Vec<Gate>, sink: usize) -> Result<Self> {
        if sink >= gates.len() {
            return Err(Error::InvalidCircuit(format!("sink g{sink} out of range")));
        }
        for (i, g) in gates.iter().enumerate() {
            match g {
                Gate::Input { var, value } => {
                    if *var >= vars.len() || *value >= values.len() {
                        return Err(Error::InvalidCircuit(format!("g{i} has an out-of-range label")));
                    }
                }
                Gate::Union(ch) | Gate::Times(ch) => {
                    if ch.is_empty() {
                        return Err(Error::InvalidCircuit(format!("g{i} has no children")));
                    }
                    if let Some(c) = ch.iter().find(|&&c| c >= i) {
                        return Err(Error::InvalidCircuit(format!("g{i} refers to later gate g{c}")));
                    }
                }
            }
        }
        Ok(Self { vars, values, gates, sink, vtree: None })
    }

    pub fn with_vtree(mut self, vtree: Option<VTree>) -> Self {
        self.vtree = vtree;
        self
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, i: usize) -> &Gate {
        &self.gates[i]
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn vtree(&self) -> Option<&VTree> {
        self.vtree.as_ref()
    }

    /// Number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Number of wires (child references).
    pub fn wires(&self) -> usize {
        self.gates.iter().map(|g| g.children().len()).sum()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn value_index(&self, name: &str) -> Option<usize> {
        self.values.iter().position(|v| v == name)
    }

    /// `var(g)` for every gate.
    pub fn var_sets(&self) -> Vec<FixedBitSet> {
        let n = self.vars.len();
        let mut out: Vec<FixedBitSet> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let mut s = FixedBitSet::with_capacity(n);
            match g {
                Gate::Input { var, .. } => s.insert(*var),
                Gate::Union(ch) | Gate::Times(ch) => {
                    for &c in ch {
                        s.union_with(&out[c]);
                    }
                }
            }
            out.push(s);
        }
        out
    }

    /// Parent lists, in increasing parent order.
    pub fn parents(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            for &c in g.children() {
                p[c].push(i);
            }
        }
        p
    }

    /// Gates from which the sink is reachable.
    pub fn reachable(&self) -> Vec<bool> {
        let mut r = vec![false; self.gates.len()];
        r[self.sink] = true;
        for i in (0..self.gates.len()).rev() {
            if r[i] {
                for &c in self.gates[i].children() {
                    r[c] = true;
                }
            }
        }
        r
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serialize(&Repr::Circuit(self.clone())))?;
        Ok(())
    }
}

/// Sets of total functions over a recorded, sorted variable list.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FunctionSet {
    pub vars: Vec<usize>,
    pub rows: BTreeSet<Vec<usize>>,
}

impl FunctionSet {
    pub fn new(mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Self { vars, rows: BTreeSet::new() }
    }

    /// The set holding only the empty function.
    pub fn unit() -> Self {
        Self { vars: Vec::new(), rows: BTreeSet::from([Vec::new()]) }
    }

    pub fn from_rows(vars: Vec<usize>, rows: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&i| vars[i]);
        let sorted: Vec<usize> = order.iter().map(|&i| vars[i]).collect();
        let rows = rows.into_iter().map(|r| order.iter().map(|&i| r[i]).collect()).collect();
        Self { vars: sorted, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn insert(&mut self, row: Vec<usize>) {
        debug_assert_eq!(row.len(), self.vars.len());
        self.rows.insert(row);
    }

    pub fn contains(&self, row: &[usize]) -> bool {
        self.rows.contains(row)
    }

    /// Value of variable `x` in `row`.
    pub fn get(&self, row: &[usize], x: usize) -> Option<usize> {
        self.vars.binary_search(&x).ok().map(|i| row[i])
    }

    /// `{f|_S : f ∈ F}`.
    pub fn restrict(&self, s: &[usize]) -> Result<FunctionSet> {
        let mut keep: Vec<usize> = s.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let pos: Vec<usize> = keep
            .iter()
            .map(|x| {
                self.vars
                    .binary_search(x)
                    .map_err(|_| Error::BadScope(format!("variable {x} not in the function domain")))
            })
            .collect::<Result<_>>()?;
        let rows = self.rows.iter().map(|r| pos.iter().map(|&p| r[p]).collect()).collect();
        Ok(FunctionSet { vars: keep, rows })
    }

    /// `F × G` for disjoint variable sets.
    pub fn product(&self, other: &FunctionSet) -> Result<FunctionSet> {
        let mut vars = self.vars.clone();
        vars.extend(&other.vars);
        vars.sort_unstable();
        if vars.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCircuit("product of functions with overlapping domains".into()));
        }
        // Position of each output coordinate: (from left?, index).
        let src: Vec<(bool, usize)> = vars
            .iter()
            .map(|x| match self.vars.binary_search(x) {
                Ok(i) => (true, i),
                Err(_) => (false, other.vars.binary_search(x).unwrap()),
            })
            .collect();
        let mut rows = BTreeSet::new();
        for f in &self.rows {
            for g in &other.rows {
                rows.insert(src.iter().map(|&(l, i)| if l { f[i] } else { g[i] }).collect());
            }
        }
        Ok(FunctionSet { vars, rows })
    }

    pub fn union_with(&mut self, other: &FunctionSet) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::InvalidCircuit("union of functions with different domains".into()));
        }
        self.rows.extend(other.rows.iter().cloned());
        Ok(())
    }

    /// Rows as full-width vectors over `0..nvars`, `None` outside the domain.
    pub fn expand(&self, nvars: usize) -> Vec<Vec<Option<usize>>> {
        self.rows
            .iter()
            .map(|r| {
                let mut out = vec![None; nvars];
                for (i, &x) in self.vars.iter().enumerate() {
                    out[x] = Some(r[i]);
                }
                out
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircuitViolation {
    NotReachingSink(usize),
    FanIn { gate: usize, fan_in: usize },
    NotDecomposable(usize),
    NotSmooth(usize),
    MissingVars(Vec<String>),
    VTreeMismatch(usize),
}

impl fmt::Display for CircuitViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotReachingSink(g) => write!(f, "g{g} does not reach the sink"),
            Self::FanIn { gate, fan_in } => write!(f, "g{gate} has fan-in {fan_in}"),
            Self::NotDecomposable(g) => write!(f, "×-gate g{g} has children sharing variables"),
            Self::NotSmooth(g) => write!(f, "∪-gate g{g} has children with different variables"),
            Self::MissingVars(v) => write!(f, "variables never used: {}", v.join(",")),
            Self::VTreeMismatch(g) => write!(f, "×-gate g{g} does not respect the v-tree"),
        }
    }
}

/// Checks unique sink, fan-in two, decomposability, smoothness, `var(C) = X`
/// and, when present, v-tree respect of every ×-gate.
pub fn validate_circuit(c: &Circuit) -> ValidationReport<CircuitViolation> {
    let mut rep = validate_shape(c, true);
    if let Some(vt) = &c.vtree {
        let mut splits = Vec::new();
        vt.splits(&mut splits);
        let vs = c.var_sets();
        let as_set = |b: &FixedBitSet| b.ones().collect::<BTreeSet<usize>>();
        for (i, g) in c.gates.iter().enumerate() {
            if let Gate::Times(ch) = g {
                if ch.len() != 2 {
                    continue;
                }
                let (l, r) = (as_set(&vs[ch[0]]), as_set(&vs[ch[1]]));
                let ok = splits.iter().any(|(a, b)| {
                    (l.is_subset(a) && r.is_subset(b)) || (l.is_subset(b) && r.is_subset(a))
                });
                if !ok {
                    rep.push(CircuitViolation::VTreeMismatch(i));
                }
            }
        }
    }
    rep
}

fn validate_shape(c: &Circuit, fan_in_two: bool) -> ValidationReport<CircuitViolation> {
    let mut rep = ValidationReport::new();
    let reach = c.reachable();
    for (i, &r) in reach.iter().enumerate() {
        if !r {
            rep.push(CircuitViolation::NotReachingSink(i));
        }
    }
    let vs = c.var_sets();
    for (i, g) in c.gates.iter().enumerate() {
        let ch = g.children();
        if fan_in_two && !ch.is_empty() && ch.len() != 2 {
            rep.push(CircuitViolation::FanIn { gate: i, fan_in: ch.len() });
        }
        match g {
            Gate::Times(ch) => {
                let total: usize = ch.iter().map(|&x| vs[x].count_ones(..)).sum();
                if total != vs[i].count_ones(..) {
                    rep.push(CircuitViolation::NotDecomposable(i));
                }
            }
            Gate::Union(ch) => {
                if ch.iter().any(|&x| vs[x] != vs[ch[0]]) {
                    rep.push(CircuitViolation::NotSmooth(i));
                }
            }
            Gate::Input { .. } => {}
        }
    }
    let missing: Vec<String> =
        (0..c.vars.len()).filter(|&x| !vs[c.sink].contains(x)).map(|x| c.vars[x].clone()).collect();
    if !missing.is_empty() {
        rep.push(CircuitViolation::MissingVars(missing));
    }
    rep
}

/// Per-gate `S(g)` computed bottom-up; sets are dropped once every parent
/// has consumed them, except for gates listed in `keep`.
pub(crate) fn eval_gates(
    c: &Circuit,
    budget: usize,
    mut on_gate: impl FnMut(usize, &FunctionSet) -> Result<()>,
) -> Result<FunctionSet> {
    let reach = c.reachable();
    let mut remaining: Vec<usize> = vec![0; c.gates.len()];
    for (i, g) in c.gates.iter().enumerate() {
        if reach[i] {
            for &ch in g.children() {
                remaining[ch] += 1;
            }
        }
    }
    let mut memo: Vec<Option<FunctionSet>> = vec![None; c.gates.len()];
    for i in 0..=c.sink {
        if !reach[i] {
            continue;
        }
        let set = match &c.gates[i] {
            Gate::Input { var, value } => FunctionSet { vars: vec![*var], rows: BTreeSet::from([vec![*value]]) },
            Gate::Union(ch) => {
                let mut acc = memo[ch[0]].clone().unwrap();
                for &x in &ch[1..] {
                    acc.union_with(memo[x].as_ref().unwrap())?;
                }
                acc
            }
            Gate::Times(ch) => {
                let mut acc = memo[ch[0]].clone().unwrap();
                for &x in &ch[1..] {
                    acc = acc.product(memo[x].as_ref().unwrap())?;
                    if acc.len() > budget {
                        break;
                    }
                }
                acc
            }
        };
        if set.len() > budget {
            return Err(Error::BudgetExceeded(format!("g{i} computes more than {budget} functions")));
        }
        on_gate(i, &set)?;
        for &ch in c.gates[i].children() {
            remaining[ch] -= 1;
            if remaining[ch] == 0 {
                memo[ch] = None;
            }
        }
        memo[i] = Some(set);
    }
    Ok(memo[c.sink].take().unwrap())
}

pub fn eval_circuit(c: &Circuit) -> Result<FunctionSet> {
    eval_circuit_budget(c, DEFAULT_EVAL_BUDGET)
}

/// `S(sink)` with a cap on the size of any intermediate set.
pub fn eval_circuit_budget(c: &Circuit, budget: usize) -> Result<FunctionSet> {
    eval_gates(c, budget, |_, _| Ok(()))
}

/// `|S(C)|` assuming determinism: inputs count 1, ∪ sums, × multiplies.
pub fn count_deterministic(c: &Circuit) -> BigUint {
    let mut cnt: Vec<BigUint> = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let v = match g {
            Gate::Input { .. } => BigUint::one(),
            Gate::Union(ch) => ch.iter().map(|&x| &cnt[x]).sum(),
            Gate::Times(ch) => ch.iter().fold(BigUint::one(), |acc, &x| acc * &cnt[x]),
        };
        cnt.push(v);
    }
    cnt.swap_remove(c.sink)
}

/// Like [`count_deterministic`] but first checks determinism exactly.
pub fn count_checked(c: &Circuit) -> Result<BigUint> {
    if !check_deterministic(c)? {
        return Err(Error::NotDeterministic);
    }
    Ok(count_deterministic(c))
}

/// Whether every ∪-gate's children compute pairwise disjoint sets.
pub fn check_deterministic(c: &Circuit) -> Result<bool> {
    check_deterministic_budget(c, DEFAULT_EVAL_BUDGET)
}

pub fn check_deterministic_budget(c: &Circuit, budget: usize) -> Result<bool> {
    // A ∪-gate is deterministic iff its set size equals the sum of its
    // children's sizes.
    let mut sizes = vec![0usize; c.gates.len()];
    let mut ok = true;
    eval_gates(c, budget, |i, s| {
        sizes[i] = s.len();
        if let Gate::Union(ch) = &c.gates[i] {
            if ch.iter().map(|&x| sizes[x]).sum::<usize>() != s.len() {
                ok = false;
            }
        }
        Ok(())
    })?;
    Ok(ok)
}

/// Builds circuits gate by gate with structural sharing of identical gates.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    vars: Vec<String>,
    values: Vec<String>,
    value_index: HashMap<String, usize>,
    gates: Vec<Gate>,
    cons: HashMap<Gate, usize>,
}

impl CircuitBuilder {
    pub fn new(vars: Vec<String>) -> Self {
        Self { vars, ..Default::default() }
    }

    pub fn with_values(vars: Vec<String>, values: Vec<String>) -> Self {
        let value_index = values.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Self { vars, values, value_index, ..Default::default() }
    }

    pub fn value(&mut self, name: &str) -> usize {
        if let Some(&i) = self.value_index.get(name) {
            return i;
        }
        self.values.push(name.to_string());
        self.value_index.insert(name.to_string(), self.values.len() - 1);
        self.values.len() - 1
    }

    pub fn var(&self, name: &str) -> usize {
        self.vars.iter().position(|v| v == name).unwrap_or_else(|| panic!("unknown variable `{name}`"))
    }

    fn push(&mut self, g: Gate) -> usize {
        if let Some(&i) = self.cons.get(&g) {
            return i;
        }
        self.gates.push(g.clone());
        self.cons.insert(g, self.gates.len() - 1);
        self.gates.len() - 1
    }

    /// Appends without sharing; used by parsers that must keep gate ids.
    fn push_raw(&mut self, g: Gate) -> usize {
        self.gates.push(g.clone());
        self.cons.entry(g).or_insert(self.gates.len() - 1);
        self.gates.len() - 1
    }

    pub fn input(&mut self, var: usize, value: usize) -> usize {
        self.push(Gate::Input { var, value })
    }

    /// Input gate by names.
    pub fn input_named(&mut self, var: &str, value: &str) -> usize {
        let v = self.var(var);
        let d = self.value(value);
        self.input(v, d)
    }

    /// A union gate over all children; a single child is returned as is.
    pub fn union(&mut self, children: Vec<usize>) -> usize {
        assert!(!children.is_empty());
        if children.len() == 1 {
            return children[0];
        }
        self.push(Gate::Union(children))
    }

    pub fn times(&mut self, children: Vec<usize>) -> usize {
        assert!(!children.is_empty());
        if children.len() == 1 {
            return children[0];
        }
        self.push(Gate::Times(children))
    }

    pub fn union2(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Union(vec![a, b]))
    }

    pub fn times2(&mut self, a: usize, b: usize) -> usize {
        self.push(Gate::Times(vec![a, b]))
    }

    /// Left-deep binary ∪-chain.
    pub fn union_chain(&mut self, children: &[usize]) -> usize {
        let mut acc = children[0];
        for &c in &children[1..] {
            acc = self.union2(acc, c);
        }
        acc
    }

    /// Left-deep binary ×-chain.
    pub fn times_chain(&mut self, children: &[usize]) -> usize {
        let mut acc = children[0];
        for &c in &children[1..] {
            acc = self.times2(acc, c);
        }
        acc
    }

    /// Balanced binary ∪-tree, keeping children in order.
    pub fn balanced_union(&mut self, children: &[usize]) -> usize {
        match children.len() {
            0 => panic!("empty union"),
            1 => children[0],
            n => {
                let (l, r) = children.split_at(n / 2);
                let a = self.balanced_union(l);
                let b = self.balanced_union(r);
                self.union2(a, b)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Keeps only gates reaching `sink`, renumbered in creation order.
    pub fn finish(self, sink: usize) -> Circuit {
        let tmp = Circuit { vars: self.vars, values: self.values, gates: self.gates, sink, vtree: None };
        prune(tmp)
    }
}

/// Drops gates that do not reach the sink.
pub fn prune(c: Circuit) -> Circuit {
    let reach = c.reachable();
    if reach.iter().all(|&r| r) {
        return c;
    }
    let mut map = vec![usize::MAX; c.gates.len()];
    let mut gates = Vec::new();
    for (i, g) in c.gates.into_iter().enumerate() {
        if !reach[i] {
            continue;
        }
        map[i] = gates.len();
        gates.push(match g {
            Gate::Input { .. } => g,
            Gate::Union(ch) => Gate::Union(ch.iter().map(|&x| map[x]).collect()),
            Gate::Times(ch) => Gate::Times(ch.iter().map(|&x| map[x]).collect()),
        });
    }
    Circuit { vars: c.vars, values: c.values, gates, sink: map[c.sink], vtree: c.vtree }
}

/// Rewrites every wide gate into a left-deep binary chain and bypasses
/// gates with a single child.
pub fn to_fanin2(c: &Circuit) -> Circuit {
    let mut gates: Vec<Gate> = Vec::new();
    let mut map = vec![0usize; c.gates.len()];
    for (i, g) in c.gates.iter().enumerate() {
        map[i] = match g {
            Gate::Input { .. } => {
                gates.push(g.clone());
                gates.len() - 1
            }
            Gate::Union(ch) | Gate::Times(ch) => {
                let is_union = matches!(g, Gate::Union(_));
                let mut acc = map[ch[0]];
                for &x in &ch[1..] {
                    let pair = vec![acc, map[x]];
                    gates.push(if is_union { Gate::Union(pair) } else { Gate::Times(pair) });
                    acc = gates.len() - 1;
                }
                acc
            }
        };
    }
    prune(Circuit {
        vars: c.vars.clone(),
        values: c.values.clone(),
        gates,
        sink: map[c.sink],
        vtree: c.vtree.clone(),
    })
}

/// Pads ∪-children (and the sink) with unions over the given domains so
/// that every ∪-gate becomes smooth and `var(C) = X`.
pub fn smooth(c: &Circuit, domains: &BTreeMap<String, Vec<String>>) -> Result<Circuit> {
    let vs = c.var_sets();
    let nv = c.vars.len();
    let mut b = CircuitBuilder::with_values(c.vars.clone(), c.values.clone());
    b.gates = Vec::new();
    let mut pads: HashMap<usize, usize> = HashMap::new();
    let mut pad = |b: &mut CircuitBuilder, x: usize| -> Result<usize> {
        if let Some(&g) = pads.get(&x) {
            return Ok(g);
        }
        let name = &c.vars[x];
        let dom = domains.get(name).filter(|d| !d.is_empty()).ok_or_else(|| Error::MissingDomain(name.clone()))?;
        let inputs: Vec<usize> = dom
            .iter()
            .map(|d| {
                let v = b.value(d);
                b.input(x, v)
            })
            .collect();
        let g = b.union_chain(&inputs);
        pads.insert(x, g);
        Ok(g)
    };
    let mut map = vec![0usize; c.gates.len()];
    let pad_to = |b: &mut CircuitBuilder,
                  pad: &mut dyn FnMut(&mut CircuitBuilder, usize) -> Result<usize>,
                  g: usize,
                  have: &FixedBitSet,
                  want: &FixedBitSet|
     -> Result<usize> {
        let mut acc = g;
        for x in want.difference(have) {
            let p = pad(b, x)?;
            acc = b.times2(acc, p);
        }
        Ok(acc)
    };
    for (i, g) in c.gates.iter().enumerate() {
        map[i] = match g {
            Gate::Input { var, value } => b.input(*var, *value),
            Gate::Times(ch) => b.push(Gate::Times(ch.iter().map(|&x| map[x]).collect())),
            Gate::Union(ch) => {
                let mut kids = Vec::with_capacity(ch.len());
                for &x in ch {
                    kids.push(pad_to(&mut b, &mut pad, map[x], &vs[x], &vs[i])?);
                }
                b.push(Gate::Union(kids))
            }
        };
    }
    let mut all = FixedBitSet::with_capacity(nv);
    all.insert_range(..);
    let sink = pad_to(&mut b, &mut pad, map[c.sink], &vs[c.sink], &all)?;
    Ok(b.finish(sink).with_vtree(None))
}

/// Lists every function: a left-deep ×-chain of fresh inputs per function
/// under a left-deep ∪-chain.
pub fn trivial_circuit(f: &FunctionSet, var_names: &[String], value_names: &[String]) -> Result<Repr> {
    if f.is_empty() {
        return Ok(Repr::Empty);
    }
    if f.vars.is_empty() {
        return Err(Error::InvalidArgument("no circuit computes the empty function alone".into()));
    }
    let mut b = CircuitBuilder::with_values(var_names.to_vec(), value_names.to_vec());
    let mut rows = Vec::with_capacity(f.len());
    for r in &f.rows {
        let inputs: Vec<usize> =
            f.vars.iter().zip(r).map(|(&x, &d)| b.push_raw(Gate::Input { var: x, value: d })).collect();
        rows.push(b.times_chain(&inputs));
    }
    let sink = b.union_chain(&rows);
    Ok(Repr::Circuit(b.finish(sink)))
}

/// Text form; `EMPTY` for the empty representation.
pub fn serialize(r: &Repr) -> String {
    let c = match r {
        Repr::Empty => return "EMPTY\n".to_string(),
        Repr::Circuit(c) => c,
    };
    let mut s = format!("vars {}\n", c.vars.len());
    for v in &c.vars {
        s += &format!("var {v}\n");
    }
    for (i, g) in c.gates.iter().enumerate() {
        match g {
            Gate::Input { var, value } => s += &format!("g{i} input {} {}\n", c.vars[*var], c.values[*value]),
            Gate::Union(ch) | Gate::Times(ch) => {
                let op = if matches!(g, Gate::Union(_)) { "union" } else { "times" };
                s += &format!("g{i} {op}");
                for x in ch {
                    s += &format!(" g{x}");
                }
                s += "\n";
            }
        }
    }
    s += &format!("output g{}\n", c.sink);
    s
}

fn parse_gate_ref(tok: &str, line: usize) -> Result<usize> {
    tok.strip_prefix('g')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| Error::Parse { line, msg: format!("expected gate id, got `{tok}`") })
}

pub fn parse(text: &str) -> Result<Repr> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
    if lines.len() == 1 && lines[0].1 == "EMPTY" {
        return Ok(Repr::Empty);
    }
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut it = lines.into_iter();
    let (l0, head) = it.next().ok_or_else(|| err(1, "empty input".into()))?;
    let nvars: usize = head
        .strip_prefix("vars ")
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| err(l0, "expected `vars <n>`".into()))?;
    let mut vars = Vec::new();
    let mut b = CircuitBuilder::new(Vec::new());
    let mut sink = None;
    for (ln, line) in it {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "var" => {
                if !b.gates.is_empty() {
                    return Err(err(ln, "variable declared after gates".into()));
                }
                vars.extend(toks[1..].iter().map(|s| s.to_string()));
            }
            "output" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected `output g<i>`".into()));
                }
                sink = Some(parse_gate_ref(toks[1], ln)?);
            }
            id => {
                if sink.is_some() {
                    return Err(err(ln, "gate after output".into()));
                }
                if b.vars.is_empty() {
                    b.vars = vars.clone();
                }
                let gi = parse_gate_ref(id, ln)?;
                if gi != b.gates.len() {
                    return Err(err(ln, format!("expected g{}, got {id}", b.gates.len())));
                }
                let kind = toks.get(1).copied().unwrap_or("");
                let gate = match kind {
                    "input" => {
                        if toks.len() != 4 {
                            return Err(err(ln, "expected `g<i> input <var> <value>`".into()));
                        }
                        let var = vars
                            .iter()
                            .position(|v| v == toks[2])
                            .ok_or_else(|| err(ln, format!("undeclared variable `{}`", toks[2])))?;
                        Gate::Input { var, value: b.value(toks[3]) }
                    }
                    "union" | "times" => {
                        let ch = toks[2..].iter().map(|t| parse_gate_ref(t, ln)).collect::<Result<Vec<_>>>()?;
                        if ch.is_empty() {
                            return Err(err(ln, format!("{kind} gate without children")));
                        }
                        if let Some(c) = ch.iter().find(|&&c| c >= gi) {
                            return Err(err(ln, format!("g{gi} refers to g{c}, which is not defined before it")));
                        }
                        if kind == "union" {
                            Gate::Union(ch)
                        } else {
                            Gate::Times(ch)
                        }
                    }
                    other => return Err(err(ln, format!("unknown gate kind `{other}`"))),
                };
                b.push_raw(gate);
            }
        }
    }
    if vars.len() != nvars {
        return Err(err(l0, format!("header says {nvars} variables, found {}", vars.len())));
    }
    let sink = sink.ok_or_else(|| err(0, "missing `output` line".into()))?;
    let values = b.values;
    Ok(Repr::Circuit(Circuit::new(vars, values, b.gates, sink)?))
}

pub fn load(path: &Path) -> Result<Repr> {
    parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The circuit of the three-vertex example, written gate by gate.
    pub(crate) fn triangle_circuit() -> Circuit {
        let mut b = CircuitBuilder::new(vec!["x".into(), "y".into(), "z".into()]);
        let yb1 = b.input_named("y", "b1");
        let yb2 = b.input_named("y", "b2");
        let xa1 = b.input_named("x", "a1");
        let xa2 = b.input_named("x", "a2");
        let zd1 = b.input_named("z", "d1");
        let zd2 = b.input_named("z", "d2");
        let zc = b.input_named("z", "c");
        let yc = b.input_named("y", "c");
        let g1 = b.union2(yb1, yb2);
        let g2 = b.union2(xa1, xa2);
        let g3 = b.union2(zd1, zd2);
        let e1 = b.times2(g1, g2);
        let e2 = b.times2(g3, g2);
        let g4 = b.times2(zc, e1);
        let g5 = b.times2(yc, e2);
        let g6 = b.union2(g4, g5);
        b.finish(g6)
    }

    #[test]
    fn triangle_is_valid_and_counts_eight() {
        let c = triangle_circuit();
        assert_eq!(c.size(), 16);
        assert!(validate_circuit(&c).is_ok(), "{}", validate_circuit(&c));
        assert!(check_deterministic(&c).unwrap());
        assert_eq!(count_deterministic(&c), BigUint::from(8u32));
        assert_eq!(eval_circuit(&c).unwrap().len(), 8);
    }

    #[test]
    fn validation_catches_violations() {
        let mut b = CircuitBuilder::new(vec!["x".into(), "y".into()]);
        let xa = b.input_named("x", "a");
        let xb = b.input_named("x", "b");
        let yb = b.input_named("y", "b");
        let t = b.times2(xa, xb);
        let bad = b.clone().finish(t);
        assert!(validate_circuit(&bad).violations.contains(&CircuitViolation::NotDecomposable(2)));
        let xy = b.times2(xa, yb);
        let u = b.union2(xa, xy);
        let bad = b.finish(u);
        assert!(validate_circuit(&bad).violations.iter().any(|v| matches!(v, CircuitViolation::NotSmooth(_))));
    }

    #[test]
    fn small_semantics() {
        let mut b = CircuitBuilder::new(vec!["x".into()]);
        let xa = b.input_named("x", "a");
        let single = b.clone().finish(xa);
        assert_eq!(eval_circuit(&single).unwrap().len(), 1);
        assert_eq!(count_deterministic(&single), BigUint::one());
        let xb = b.input_named("x", "b");
        let u = b.union2(xa, xb);
        assert_eq!(eval_circuit(&b.clone().finish(u)).unwrap().len(), 2);
        let dup = b.push_raw(Gate::Union(vec![xa, xa]));
        let c = b.finish(dup);
        assert!(!check_deterministic(&c).unwrap());
        assert!(matches!(count_checked(&c), Err(Error::NotDeterministic)));
        assert_eq!(count_deterministic(&c), BigUint::from(2u32));
    }

    #[test]
    fn product_of_unions_counts_power_of_two() {
        let k = 6;
        let vars: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let mut b = CircuitBuilder::new(vars.clone());
        let mut parts = Vec::new();
        for v in &vars {
            let a = b.input_named(v, "0");
            let c = b.input_named(v, "1");
            parts.push(b.union2(a, c));
        }
        let sink = b.times_chain(&parts);
        let c = b.finish(sink);
        assert_eq!(count_deterministic(&c), BigUint::from(64u32));
        assert_eq!(eval_circuit(&c).unwrap().len(), 64);
    }

    #[test]
    fn text_round_trip() {
        let c = triangle_circuit();
        let text = serialize(&Repr::Circuit(c.clone()));
        let back = parse(&text).unwrap();
        assert_eq!(back, Repr::Circuit(c));
        assert_eq!(serialize(&back), text);
        assert_eq!(parse("EMPTY\n").unwrap(), Repr::Empty);
        assert!(matches!(parse("vars 1\nvar x\ng0 union g1\noutput g0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn fanin2_of_ternary_union() {
        let mut b = CircuitBuilder::new(vec!["x".into()]);
        let ins: Vec<usize> = ["a", "b", "c"].iter().map(|d| b.input_named("x", d)).collect();
        let u = b.union(ins);
        let c = b.finish(u);
        assert_eq!(validate_circuit(&c).violations, vec![CircuitViolation::FanIn { gate: 3, fan_in: 3 }]);
        let f = to_fanin2(&c);
        assert_eq!(f.size(), c.size() + 1);
        assert!(validate_circuit(&f).is_ok());
        assert_eq!(eval_circuit(&f).unwrap(), eval_circuit(&c).unwrap());
        assert_eq!(to_fanin2(&f), f);
    }

    #[test]
    fn smoothing_pads_missing_variables() {
        let mut b = CircuitBuilder::new(vec!["x".into(), "y".into()]);
        let xa = b.input_named("x", "a");
        let yb = b.input_named("y", "b");
        let xy = b.times2(xa, yb);
        let u = b.union2(xa, xy);
        let c = b.finish(u);
        let mut doms = BTreeMap::new();
        doms.insert("y".to_string(), vec!["b".to_string(), "c".to_string()]);
        let s = smooth(&c, &doms).unwrap();
        assert!(validate_circuit(&s).is_ok(), "{}", validate_circuit(&s));
        let f = eval_circuit(&s).unwrap();
        let names: BTreeSet<Vec<&str>> =
            f.rows.iter().map(|r| r.iter().map(|&d| s.values()[d].as_str()).collect()).collect();
        assert_eq!(names, BTreeSet::from([vec!["a", "b"], vec!["a", "c"]]));
        assert!(matches!(smooth(&c, &BTreeMap::new()), Err(Error::MissingDomain(_))));
        let already = triangle_circuit();
        assert_eq!(smooth(&already, &BTreeMap::new()).unwrap(), already);
    }

    #[test]
    fn trivial_circuits() {
        let c = triangle_circuit();
        let f = eval_circuit(&c).unwrap();
        let t = trivial_circuit(&f, c.vars(), c.values()).unwrap();
        let tc = t.circuit().unwrap();
        assert!(validate_circuit(tc).is_ok());
        assert_eq!(eval_circuit(tc).unwrap(), f);
        assert_eq!(t.count(), BigUint::from(8u32));
        assert!(tc.size() <= f.len() * 2 * 3 + f.len());
        assert_eq!(trivial_circuit(&FunctionSet::new(vec![0]), c.vars(), c.values()).unwrap(), Repr::Empty);
    }

    #[test]
    fn restriction_and_product() {
        let f = FunctionSet::from_rows(vec![0, 1], [vec![0, 0], vec![1, 1]]);
        let y = f.restrict(&[0]).unwrap();
        assert_eq!(y.len(), 2);
        assert_eq!(f.restrict(&[0, 1]).unwrap(), f);
        assert_eq!(f.restrict(&[]).unwrap(), FunctionSet::unit());
        assert!(matches!(f.restrict(&[5]), Err(Error::BadScope(_))));
        let p = y.product(&f.restrict(&[1]).unwrap()).unwrap();
        assert_eq!(p.len(), 4);
    }
}
