//! Combinatorial rectangles and balanced rectangle covers extracted from
//! circuits, plus the counting bounds used to certify cover sizes.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::circuit::{eval_gates, Circuit, FunctionSet, Gate, Repr, DEFAULT_EVAL_BUDGET};
use crate::flows::VertexWeights;
use crate::rational::{self, int, zero, Rational};
use crate::relcore::Hypergraph;
use crate::report::ValidationReport;
use crate::{Error, Result};

/// A split `(left, right)` of `0..n`, both sides sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl Partition {
    pub fn new(mut left: Vec<usize>, mut right: Vec<usize>, n: usize) -> Result<Self> {
        left.sort_unstable();
        right.sort_unstable();
        let mut all: Vec<usize> = left.iter().chain(&right).copied().collect();
        all.sort_unstable();
        if all != (0..n).collect::<Vec<_>>() {
            return Err(Error::BadPartition(format!("{left:?} | {right:?} does not partition 0..{n}")));
        }
        Ok(Self { left, right })
    }

    /// `(s, complement of s)` within `0..n`.
    pub fn from_side(s: &[usize], n: usize) -> Result<Self> {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        Self::new(set.iter().copied().collect(), (0..n).filter(|v| !set.contains(v)).collect(), n)
    }

    /// Partition from a bitmask of left-side vertices.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        let (left, right) = (0..n).partition(|&v| mask >> v & 1 == 1);
        Self { left, right }
    }

    pub fn side_of(&self, v: usize) -> Option<bool> {
        if self.left.binary_search(&v).is_ok() {
            Some(true)
        } else if self.right.binary_search(&v).is_ok() {
            Some(false)
        } else {
            None
        }
    }
}

/// A vertex-additive weighting `f(S) = Σ_{v∈S} f(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    pub weights: Vec<Rational>,
}

impl WeightFunction {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| *w < zero()) {
            return Err(Error::WeightViolation(format!("vertex {i} has negative weight")));
        }
        Ok(Self { weights })
    }

    /// `f ≡ 1`.
    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![int(1); n] }
    }

    /// `f(S) = |S ∩ W|`.
    pub fn indicator(n: usize, w: &[usize]) -> Self {
        let mut weights = vec![zero(); n];
        for &v in w {
            weights[v] = int(1);
        }
        Self { weights }
    }

    pub fn from_vertex_weights(vw: &VertexWeights) -> Self {
        Self { weights: vw.weights.clone() }
    }

    /// Parses `{"vertex": "p/q", ...}`; absent vertices weigh zero.
    pub fn from_json(text: &str, names: &[String]) -> Result<Self> {
        let map: std::collections::BTreeMap<String, serde_json::Value> = serde_json::from_str(text)?;
        let mut weights = vec![zero(); names.len()];
        for (k, v) in map {
            let i = names
                .iter()
                .position(|n| *n == k)
                .ok_or_else(|| Error::WeightViolation(format!("unknown vertex `{k}`")))?;
            let s = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(Error::WeightViolation(format!("bad weight {other} for `{k}`"))),
            };
            weights[i] = rational::parse(&s)?;
        }
        Self::new(weights)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn of(&self, s: &[usize]) -> Rational {
        s.iter().map(|&v| &self.weights[v]).sum()
    }

    pub fn of_bits(&self, s: &FixedBitSet) -> Rational {
        s.ones().map(|v| &self.weights[v]).sum()
    }

    /// `f({a}) ≤ 2f(A)/3` for every `a`.
    pub fn check_singletons(&self) -> Result<()> {
        let bound = self.total() * int(2) / int(3);
        match self.weights.iter().position(|w| *w > bound) {
            Some(i) => Err(Error::WeightViolation(format!(
                "vertex {i} has weight {} above 2/3 of the total {}",
                rational::fmt(&self.weights[i]),
                rational::fmt(&self.total())
            ))),
            None => Ok(()),
        }
    }

    /// `min(f(X), f(Y)) ≥ f(A)/3`.
    pub fn is_balanced(&self, p: &Partition) -> bool {
        self.margin(p) >= zero()
    }

    /// `min(f(X), f(Y)) − f(A)/3`.
    pub fn margin(&self, p: &Partition) -> Rational {
        let third = self.total() / int(3);
        self.of(&p.left).min(self.of(&p.right)) - third
    }
}

pub fn restrict_set(f: &FunctionSet, s: &[usize]) -> Result<FunctionSet> {
    f.restrict(s)
}

/// Whether `F = F|_Y × F|_Z` for the partition `(Y, Z)` of `F`'s domain.
pub fn is_rectangle(f: &FunctionSet, part: &Partition) -> Result<bool> {
    let mut dom: Vec<usize> = part.left.iter().chain(&part.right).copied().collect();
    dom.sort_unstable();
    if dom != f.vars {
        return Err(Error::BadScope("partition does not split the function domain".into()));
    }
    let l = f.restrict(&part.left)?;
    let r = f.restrict(&part.right)?;
    if l.len() * r.len() != f.len() {
        return Ok(false);
    }
    Ok(l.product(&r)?.rows.iter().all(|row| f.contains(row)))
}

/// `∏_x |F|_{x}|`, an upper bound on `|F|`.
pub fn projection_bound(f: &FunctionSet) -> BigUint {
    let mut b = BigUint::one();
    for (i, _) in f.vars.iter().enumerate() {
        let distinct: BTreeSet<usize> = f.rows.iter().map(|r| r[i]).collect();
        b *= BigUint::from(distinct.len());
    }
    b
}

/// `S(g)` for every gate reaching the sink; `None` elsewhere.
pub fn gate_sets(c: &Circuit, budget: usize) -> Result<Vec<Option<FunctionSet>>> {
    let mut out = vec![None; c.size()];
    eval_gates(c, budget, |i, s| {
        out[i] = Some(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Completion sets over `X ∖ var(g)`: `S(g) × comp(g) ⊆ S(C)`.
pub fn completion_sets(c: &Circuit, sets: &[Option<FunctionSet>], budget: usize) -> Result<Vec<FunctionSet>> {
    let vs = c.var_sets();
    let n = c.vars().len();
    let outside = |g: usize| -> Vec<usize> { (0..n).filter(|&x| !vs[g].contains(x)).collect() };
    let mut comp: Vec<FunctionSet> = (0..c.size()).map(|g| FunctionSet::new(outside(g))).collect();
    let mut sink = FunctionSet::unit();
    sink.vars = outside(c.sink());
    if !sink.vars.is_empty() {
        // The sink misses variables; no total function completes it.
        sink.rows.clear();
    }
    comp[c.sink()] = sink;
    for p in (0..c.size()).rev() {
        if comp[p].is_empty() {
            continue;
        }
        match c.gate(p) {
            Gate::Input { .. } => {}
            Gate::Union(ch) => {
                for &g in ch {
                    let add = comp[p].clone();
                    merge(&mut comp[g], add)?;
                }
            }
            Gate::Times(ch) => {
                for (k, &g) in ch.iter().enumerate() {
                    let mut acc = comp[p].clone();
                    for (j, &s) in ch.iter().enumerate() {
                        if j != k {
                            let ss = sets[s].as_ref().ok_or_else(|| Error::InvalidCircuit(format!("g{s} unevaluated")))?;
                            acc = acc.product(ss)?;
                        }
                    }
                    if acc.len() > budget {
                        return Err(Error::BudgetExceeded(format!("completion set of g{g} exceeds {budget}")));
                    }
                    merge(&mut comp[g], acc)?;
                }
            }
        }
    }
    Ok(comp)
}

fn merge(into: &mut FunctionSet, from: FunctionSet) -> Result<()> {
    if into.vars != from.vars {
        return Err(Error::InvalidCircuit("completion domains disagree; circuit not smooth".into()));
    }
    into.rows.extend(from.rows);
    Ok(())
}

pub fn completion_set(c: &Circuit, g: usize) -> Result<FunctionSet> {
    let sets = gate_sets(c, DEFAULT_EVAL_BUDGET)?;
    Ok(completion_sets(c, &sets, DEFAULT_EVAL_BUDGET)?.swap_remove(g))
}

/// Top-down descent from the sink to a gate with
/// `f(A)/3 ≤ f(var(g)) ≤ 2f(A)/3`.
pub fn find_f_balanced_gate(c: &Circuit, f: &WeightFunction) -> Result<usize> {
    check_width(c, f)?;
    f.check_singletons()?;
    let vs = c.var_sets();
    let total = f.total();
    let upper = &total * int(2) / int(3);
    let mut g = c.sink();
    loop {
        if f.of_bits(&vs[g]) <= upper {
            return Ok(g);
        }
        g = match c.gate(g) {
            Gate::Input { .. } => {
                return Err(Error::WeightViolation(format!("descent reached input g{g} above 2/3 of the weight")))
            }
            Gate::Union(ch) => ch[0],
            Gate::Times(ch) => {
                let mut best = ch[0];
                let mut best_w = f.of_bits(&vs[best]);
                for &x in &ch[1..] {
                    let w = f.of_bits(&vs[x]);
                    if w > best_w {
                        best = x;
                        best_w = w;
                    }
                }
                best
            }
        };
    }
}

fn check_width(c: &Circuit, f: &WeightFunction) -> Result<()> {
    if f.len() != c.vars().len() {
        return Err(Error::WeightViolation(format!(
            "{} weights for {} variables",
            f.len(),
            c.vars().len()
        )));
    }
    Ok(())
}

/// A `(Y, Z)`-rectangle `left × right` originating at a gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub gate: usize,
    pub partition: Partition,
    pub left: FunctionSet,
    pub right: FunctionSet,
}

impl Rectangle {
    pub fn size(&self) -> usize {
        self.left.len() * self.right.len()
    }

    pub fn realize(&self) -> Result<FunctionSet> {
        self.left.product(&self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectangleCover {
    pub rectangles: Vec<Rectangle>,
    pub target: FunctionSet,
}

impl RectangleCover {
    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }

    pub fn union(&self) -> Result<FunctionSet> {
        let mut u = FunctionSet::new(self.target.vars.clone());
        for r in &self.rectangles {
            u.union_with(&r.realize()?)?;
        }
        Ok(u)
    }

    pub fn max_rectangle(&self) -> usize {
        self.rectangles.iter().map(Rectangle::size).max().unwrap_or(0)
    }
}

pub fn extract_cover(c: &Circuit, f: &WeightFunction) -> Result<RectangleCover> {
    extract_cover_budget(c, f, DEFAULT_EVAL_BUDGET)
}

/// One rectangle `(S(g), comp(g))` per f-balanced gate with a nonempty
/// completion set.
pub fn extract_cover_budget(c: &Circuit, f: &WeightFunction, budget: usize) -> Result<RectangleCover> {
    check_width(c, f)?;
    f.check_singletons()?;
    let sets = gate_sets(c, budget)?;
    let comps = completion_sets(c, &sets, budget)?;
    let vs = c.var_sets();
    let n = c.vars().len();
    let mut rectangles = Vec::new();
    for (g, comp) in comps.into_iter().enumerate() {
        let Some(s) = &sets[g] else { continue };
        if comp.is_empty() {
            continue;
        }
        let part = Partition::from_side(&vs[g].ones().collect::<Vec<_>>(), n)?;
        if f.is_balanced(&part) {
            rectangles.push(Rectangle { gate: g, partition: part, left: s.clone(), right: comp });
        }
    }
    let target = sets[c.sink()].clone().unwrap();
    Ok(RectangleCover { rectangles, target })
}

/// Empty representations have the empty cover.
pub fn extract_cover_repr(r: &Repr, f: &WeightFunction) -> Result<RectangleCover> {
    match r {
        Repr::Circuit(c) => extract_cover(c, f),
        Repr::Empty => Ok(RectangleCover {
            rectangles: Vec::new(),
            target: FunctionSet::new((0..f.len()).collect()),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverViolation {
    NotARectangle(usize),
    Unbalanced(usize),
    OutsideTarget(usize),
    Uncovered(usize),
    TooManyRectangles { cover: usize, circuit: usize },
}

impl std::fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotARectangle(i) => write!(f, "rectangle {i} is not a product"),
            Self::Unbalanced(i) => write!(f, "rectangle {i} is not f-balanced"),
            Self::OutsideTarget(i) => write!(f, "rectangle {i} leaves the target set"),
            Self::Uncovered(n) => write!(f, "{n} target functions are not covered"),
            Self::TooManyRectangles { cover, circuit } => {
                write!(f, "{cover} rectangles for a circuit of size {circuit}")
            }
        }
    }
}

/// Exact check of a cover: products, balance, containment, coverage and
/// the size bound `|cover| ≤ circuit_size`.
pub fn verify_cover(
    cover: &RectangleCover,
    f: &WeightFunction,
    circuit_size: usize,
) -> Result<ValidationReport<CoverViolation>> {
    let mut rep = ValidationReport::new();
    let mut covered = FunctionSet::new(cover.target.vars.clone());
    for (i, r) in cover.rectangles.iter().enumerate() {
        let real = r.realize()?;
        if !is_rectangle(&real, &r.partition)? {
            rep.push(CoverViolation::NotARectangle(i));
        }
        if !f.is_balanced(&r.partition) {
            rep.push(CoverViolation::Unbalanced(i));
        }
        if !real.rows.is_subset(&cover.target.rows) {
            rep.push(CoverViolation::OutsideTarget(i));
        }
        covered.union_with(&real)?;
    }
    let missing = cover.target.rows.difference(&covered.rows).count();
    if missing > 0 {
        rep.push(CoverViolation::Uncovered(missing));
    }
    if cover.len() > circuit_size {
        rep.push(CoverViolation::TooManyRectangles { cover: cover.len(), circuit: circuit_size });
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct RectangleSummary {
    pub gate: usize,
    pub left_vars: usize,
    pub right_vars: usize,
    pub left_size: usize,
    pub right_size: usize,
    pub size: usize,
    pub margin: String,
}

pub fn cover_summary(cover: &RectangleCover, f: &WeightFunction) -> Vec<RectangleSummary> {
    cover
        .rectangles
        .iter()
        .map(|r| RectangleSummary {
            gate: r.gate,
            left_vars: r.partition.left.len(),
            right_vars: r.partition.right.len(),
            left_size: r.left.len(),
            right_size: r.right.len(),
            size: r.size(),
            margin: rational::fmt(&f.margin(&r.partition)),
        })
        .collect()
}

/// Greedy `(X,Y)`-matching: scan edges in stored order, keep each crossing
/// edge whose endpoints are both unused.
pub fn greedy_matching(g: &Hypergraph, part: &Partition) -> Vec<(usize, usize)> {
    let mut used = vec![false; g.num_vertices()];
    let mut m = Vec::new();
    for e in g.edges() {
        if e.len() != 2 {
            continue;
        }
        let (u, v) = (e[0], e[1]);
        let crossing = matches!((part.side_of(u), part.side_of(v)), (Some(a), Some(b)) if a != b);
        if crossing && !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            m.push((u, v));
        }
    }
    m
}

/// `n^{t−⌊k/3⌋} · (3 log₂ n)^{⌊k/3⌋}`.
pub fn rectangle_bound(n: usize, t: usize, k: usize) -> f64 {
    let j = (k / 3).min(t);
    let nf = n as f64;
    nf.powi((t - j) as i32) * (3.0 * nf.log2()).powi(j as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct RectBoundReport {
    pub bound: f64,
    pub balanced_rectangles: usize,
    pub max_rectangle: usize,
    /// Indices of W-balanced rectangles above the bound.
    pub violations: Vec<usize>,
    pub hom_count: String,
    /// `|Hom| / max W-balanced rectangle`, a lower bound on the cover size.
    pub certificate: String,
    /// `|Hom| / bound`.
    pub analytic_certificate: f64,
}

impl RectBoundReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every W-balanced rectangle of the cover against
/// [`rectangle_bound`] for a pattern graph with `t` vertices and a
/// target with `n` vertices.
pub fn rectangle_bound_check(
    cover: &RectangleCover,
    g: &Hypergraph,
    w: &[usize],
    k: usize,
    n: usize,
    hom_count: &BigUint,
) -> RectBoundReport {
    let t = g.num_vertices();
    let f = WeightFunction::indicator(t, w);
    let bound = rectangle_bound(n, t, k);
    let mut balanced = 0;
    let mut max = 0usize;
    let mut violations = Vec::new();
    for (i, r) in cover.rectangles.iter().enumerate() {
        if !f.is_balanced(&r.partition) {
            continue;
        }
        balanced += 1;
        max = max.max(r.size());
        if r.size() as f64 > bound {
            violations.push(i);
        }
    }
    let certificate = if max == 0 {
        "n/a".to_string()
    } else {
        rational::fmt(&Rational::new(hom_count.clone().into(), BigUint::from(max).into()))
    };
    let hom_f = hom_count.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    RectBoundReport {
        bound,
        balanced_rectangles: balanced,
        max_rectangle: max,
        violations,
        hom_count: hom_count.to_string(),
        certificate,
        analytic_certificate: hom_f / bound,
    }
}

/// `|Hom| / max rectangle` as an exact rational; zero for an empty cover.
pub fn cover_certificate(hom_count: &BigUint, cover: &RectangleCover) -> Rational {
    let m = cover.max_rectangle();
    if m == 0 || hom_count.is_zero() {
        return zero();
    }
    Rational::new(hom_count.clone().into(), BigUint::from(m).into())
}
