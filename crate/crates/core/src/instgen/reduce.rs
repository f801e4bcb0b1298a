//! Query transforms used to reduce lower bounds for arbitrary queries to
//! single-tuple, order-respecting ones, with the matching data transforms.

use std::collections::BTreeSet;

use super::flowgen::{hom_domains, is_order_respecting};
use crate::relcore::{reduce_structure, RelSymbol, Structure, StructureBuilder, Tuple};
use crate::{Error, Result};

fn color_name(element: &str) -> String {
    format!("P_{element}")
}

/// Whether relation `sym` with tuples `ts` is the colour `P_a` of some element.
fn is_color(a: &Structure, sym: &RelSymbol, ts: &[Tuple]) -> bool {
    sym.arity == 1 && ts.len() == 1 && color_name(&a.universe()[ts[0][0]]) == sym.name
}

fn copy_universe(b: &mut StructureBuilder, s: &Structure) {
    for e in s.universe() {
        b.element(e);
    }
}

/// Adds a unary relation `P_a = {a}` for every element `a` lacking one.
pub fn individualize(a: &Structure) -> Result<Structure> {
    let mut b = StructureBuilder::new();
    copy_universe(&mut b, a);
    for (r, (sym, ts)) in a.relations().enumerate() {
        b.declare(&sym.name, sym.arity);
        for t in ts {
            b.add_indices(r, t.clone());
        }
    }
    for (i, e) in a.universe().iter().enumerate() {
        let name = color_name(e);
        match a.relation_index(&name) {
            Some(r) if is_color(a, &a.signature()[r], a.relation(r)) => {}
            Some(_) => return Err(Error::InvalidStructure(format!("relation `{name}` is not the colour of `{e}`"))),
            None => {
                let r = b.declare(&name, 1);
                b.add_indices(r, vec![i]);
            }
        }
    }
    Ok(b.build())
}

fn is_individualized(a: &Structure) -> bool {
    a.universe().iter().all(|e| {
        a.relation_index(&color_name(e)).is_some_and(|r| is_color(a, &a.signature()[r], a.relation(r)))
    })
}

fn sparse_name(a: &Structure, rel: &str, t: &[usize]) -> String {
    format!("{rel}({})", a.names_of(t).join(","))
}

/// One relation `R(t)` holding exactly `t` for every tuple `t` of every
/// non-colour relation `R`.
pub fn sparsify_query(a: &Structure) -> Structure {
    let mut b = StructureBuilder::new();
    copy_universe(&mut b, a);
    for (sym, ts) in a.relations() {
        if is_color(a, sym, ts) {
            continue;
        }
        for t in ts {
            let r = b.declare(&sparse_name(a, &sym.name, t), sym.arity);
            b.add_indices(r, t.clone());
        }
    }
    b.build()
}

fn check_reduced(x: &Structure, y: &Structure) -> Result<()> {
    if reduce_structure(x, y)?.size() != y.size() {
        return Err(Error::NotReduced("some tuple is hit by no homomorphism".into()));
    }
    Ok(())
}

fn disjoint_domains(x: &Structure, y: &Structure) -> Result<Vec<BTreeSet<usize>>> {
    let doms = hom_domains(x, y)?;
    let mut seen = BTreeSet::new();
    for (v, d) in doms.iter().enumerate() {
        if let Some(e) = d.iter().find(|e| !seen.insert(**e)) {
            return Err(Error::NotCoordinateRespecting(format!(
                "`{}` is an image of `{}` and another element",
                y.universe()[*e],
                x.universe()[v]
            )));
        }
    }
    Ok(doms)
}

/// Given an individualised `a` and `d` over the signature of
/// `sparsify_query(a)`, returns `(a^sp, b)` with `R^b = ⋃_t R(t)^d` and
/// `P_x^b = dom_d(x)`, so that `Hom(a, b) = Hom(a^sp, d)`.
pub fn sparsify_pair(a: &Structure, d: &Structure) -> Result<(Structure, Structure)> {
    if !is_individualized(a) {
        return Err(Error::InvalidArgument("query is not individualised".into()));
    }
    let asp = sparsify_query(a);
    check_reduced(&asp, d)?;
    let doms = disjoint_domains(&asp, d)?;
    let mut b = StructureBuilder::new();
    copy_universe(&mut b, d);
    for (sym, ts) in a.relations() {
        let r = b.declare(&sym.name, sym.arity);
        if is_color(a, sym, ts) {
            for &e in &doms[ts[0][0]] {
                b.add_indices(r, vec![e]);
            }
            continue;
        }
        for t in ts {
            let name = sparse_name(a, &sym.name, t);
            let rows = d
                .relation_by_name(&name)
                .ok_or_else(|| Error::SignatureMismatch(format!("data lacks relation `{name}`")))?;
            for row in rows {
                b.add_indices(r, row.clone());
            }
        }
    }
    Ok((asp, b.build()))
}

fn ordered_name(rel: &str) -> String {
    format!("{rel}_le")
}

fn ranks_valid(a: &Structure, rank: &[usize]) -> Result<()> {
    let distinct: BTreeSet<usize> = rank.iter().copied().collect();
    if rank.len() != a.len() || distinct.len() != rank.len() {
        return Err(Error::InvalidArgument("order must rank every element distinctly".into()));
    }
    Ok(())
}

/// Coordinates of `t` deduplicated and sorted by rank.
fn sorted_coords(t: &[usize], rank: &[usize]) -> Vec<usize> {
    let mut s: Vec<usize> = t.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    s.sort_by_key(|&v| rank[v]);
    s
}

/// `a^≤`: each relation `R = {t}` becomes `R_le = {t_≤}`, where `t_≤`
/// lists the distinct coordinates of `t` in increasing rank.
pub fn order_query(a: &Structure, rank: &[usize]) -> Result<Structure> {
    ranks_valid(a, rank)?;
    let mut b = StructureBuilder::new();
    copy_universe(&mut b, a);
    for (sym, ts) in a.relations() {
        let [t] = ts else {
            return Err(Error::InvalidArgument(format!("relation `{}` must hold exactly one tuple", sym.name)));
        };
        let s = sorted_coords(t, rank);
        let r = b.declare(&ordered_name(&sym.name), s.len());
        b.add_indices(r, s);
    }
    Ok(b.build())
}

/// Given single-tuple `a`, a rank per element and `d` over the signature of
/// `order_query(a, rank)`, returns `(a^≤, b)` where each row `s` of
/// `R_le^d` yields the row `(s_{f(1)}, …, s_{f(r)})` of `R^b`, `f` mapping a
/// coordinate of `t` to its position in `t_≤`. Then `Hom(a, b) = Hom(a^≤, d)`.
pub fn order_pair(a: &Structure, rank: &[usize], d: &Structure) -> Result<(Structure, Structure)> {
    let ale = order_query(a, rank)?;
    check_reduced(&ale, d)?;
    if !is_order_respecting(&ale, d, rank)? {
        return Err(Error::NotOrderRespecting("some row is not increasing in the element order".into()));
    }
    let mut b = StructureBuilder::new();
    copy_universe(&mut b, d);
    for (sym, ts) in a.relations() {
        let r = b.declare(&sym.name, sym.arity);
        let t = &ts[0];
        let s = sorted_coords(t, rank);
        let f: Vec<usize> = t.iter().map(|v| s.iter().position(|w| w == v).unwrap()).collect();
        let name = ordered_name(&sym.name);
        let rows = d
            .relation_by_name(&name)
            .ok_or_else(|| Error::SignatureMismatch(format!("data lacks relation `{name}`")))?;
        for row in rows {
            b.add_indices(r, f.iter().map(|&j| row[j]).collect());
        }
    }
    Ok((ale, b.build()))
}
