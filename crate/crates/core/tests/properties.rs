mod common;

use std::collections::BTreeSet;

use homcirc::circuit::{self, check_deterministic, count_deterministic, validate_circuit, FunctionSet};
use homcirc::compile::compile_td;
use homcirc::instgen::flowgen::{domain_size, scatter_threshold};
use homcirc::rational::{self, frac};
use homcirc::rect::{extract_cover_repr, verify_cover, WeightFunction};
use homcirc::relcore::{enumerate_homs, hypergraph_of, reduce_structure};
use homcirc::rng::{below, seeded};
use homcirc::widths::{treewidth_exact, validate_td, TreeDecomposition};
use num_bigint::BigUint;
use proptest::prelude::*;

use common::*;

fn instance(seed: u64) -> (homcirc::relcore::Structure, homcirc::relcore::Structure) {
    let mut rng = seeded(seed);
    let nvars = 1 + below(&mut rng, 5) as usize;
    let a = random_query(&mut rng, nvars, 3, 5);
    let size = 2 + below(&mut rng, 4) as usize;
    let b = random_data(&mut rng, a.signature(), size, 30);
    (a, b)
}

fn named_rows(r: &circuit::Repr) -> BTreeSet<Vec<(String, String)>> {
    let Some(c) = r.circuit() else { return BTreeSet::new() };
    let f = circuit::eval_circuit(c).unwrap();
    f.rows
        .iter()
        .map(|row| f.vars.iter().zip(row).map(|(&x, &d)| (c.vars()[x].clone(), c.values()[d].clone())).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumerate_homs_matches_brute_force(seed in any::<u64>()) {
        let (a, b) = instance(seed);
        let got: BTreeSet<Vec<usize>> = enumerate_homs(&a, &b).unwrap().iter().map(|h| h.values()).collect();
        prop_assert_eq!(got, brute_homs(&a, &b));
    }

    #[test]
    fn compiled_circuit_matches_oracle(seed in any::<u64>(), single in any::<bool>()) {
        let (a, b) = instance(seed);
        let h = hypergraph_of(&a);
        let td = if single { TreeDecomposition::single_bag(&h) } else { treewidth_exact(&h).unwrap().1 };
        prop_assert!(validate_td(&h, &td).is_ok());
        let r = compile_td(&a, &b, &td).unwrap();
        let oracle = brute_homs(&a, &b);
        prop_assert_eq!(&repr_rows(&r, a.len()), &oracle);
        if let Some(c) = r.circuit() {
            prop_assert!(validate_circuit(c).is_ok());
            prop_assert!(check_deterministic(c).unwrap());
            prop_assert_eq!(count_deterministic(c), BigUint::from(oracle.len()));
        }
    }

    #[test]
    fn reduced_structure_keeps_homs(seed in any::<u64>()) {
        let (a, b) = instance(seed);
        let r = reduce_structure(&a, &b).unwrap();
        prop_assert!(r.size() <= b.size());
        prop_assert_eq!(brute_homs(&a, &r), brute_homs(&a, &b));
    }

    #[test]
    fn cover_is_a_balanced_partition_of_hom(seed in any::<u64>()) {
        let (a, b) = instance(seed);
        prop_assume!(a.len() >= 2);
        let r = compile_td(&a, &b, &treewidth_exact(&hypergraph_of(&a)).unwrap().1).unwrap();
        let f = WeightFunction::uniform(a.len());
        let cover = extract_cover_repr(&r, &f).unwrap();
        prop_assert!(verify_cover(&cover, &f, r.size()).unwrap().is_ok());
        prop_assert!(cover.len() <= r.size());
        let homs = brute_homs(&a, &b);
        let mut seen = BTreeSet::new();
        for rect in &cover.rectangles {
            let rows = rect.realize().unwrap().rows;
            prop_assert!(rows.is_subset(&homs));
            seen.extend(rows);
        }
        prop_assert_eq!(seen, homs);
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>()) {
        let (a, b) = instance(seed);
        let r = compile_td(&a, &b, &TreeDecomposition::single_bag(&hypergraph_of(&a))).unwrap();
        let text = circuit::serialize(&r);
        let back = circuit::parse(&text).unwrap();
        prop_assert_eq!(circuit::serialize(&back), text);
        prop_assert_eq!(named_rows(&back), named_rows(&r));
    }

    #[test]
    fn rational_text_round_trips(n in -10_000i64..10_000, d in 1i64..10_000) {
        let q = frac(n, d);
        prop_assert_eq!(rational::parse(&rational::fmt(&q)).unwrap(), q);
    }

    #[test]
    fn product_then_restrict_recovers_factor(rows_a in prop::collection::btree_set(prop::collection::vec(0usize..3, 2), 1..6),
                                             rows_b in prop::collection::btree_set(prop::collection::vec(0usize..3, 1), 1..4)) {
        let fa = FunctionSet::from_rows(vec![0, 2], rows_a.clone());
        let fb = FunctionSet::from_rows(vec![1], rows_b.clone());
        let p = fa.product(&fb).unwrap();
        prop_assert_eq!(p.len(), rows_a.len() * rows_b.len());
        prop_assert_eq!(p.restrict(&[0, 2]).unwrap(), fa.clone());
        prop_assert_eq!(p.restrict(&[1]).unwrap(), fb);
        let mut u = fa.clone();
        u.union_with(&fa).unwrap();
        prop_assert_eq!(u, fa);
    }

    #[test]
    fn domain_size_is_the_exact_ceiling(n in 1u64..5000, p in 0i64..4, q in 1i64..5) {
        let mu = frac(p, q);
        let d = domain_size(n, &mu).unwrap() as u128;
        let (p, q) = (u32::try_from(mu.numer()).unwrap(), u32::try_from(mu.denom()).unwrap());
        let target = (n as u128).pow(p);
        prop_assert!(d.pow(q) >= target);
        prop_assert!(d == 1 || (d - 1).pow(q) < target);
    }

    #[test]
    fn scatter_threshold_is_least(n in 1u64..100_000) {
        let m = scatter_threshold(n) as u32;
        let cube = (n as u128).pow(3);
        prop_assert!(1u128 << m > cube);
        prop_assert!(m == 0 || 1u128 << (m - 1) <= cube);
    }

    #[test]
    fn tree_decompositions_are_valid_and_trees_have_width_one(seed in any::<u64>(), n in 2usize..10) {
        let t = random_tree(&mut seeded(seed), n);
        let (tw, td) = treewidth_exact(&t).unwrap();
        prop_assert_eq!(tw, 1);
        prop_assert!(validate_td(&t, &td).is_ok());
        prop_assert_eq!(td.width(), 1);
    }
}
