//! Degree-wise catalogs checked against direct matching enumeration, the
//! closed-form loopless matching count, and the orbit-counting mass
//! formula.

mod common;

use clover::diagram::JacobiDiagram;
use clover::enumerate::{
    enumerate_degree, enumerate_degree_limited, representatives_up_to, DEFAULT_MAX_DEGREE,
};
use common::{
    classes_of, k4, loopless_matching_count, loopless_matching_formula, loopless_matchings,
    theta, theta_theta,
};

fn matching_diagrams(v: usize) -> Vec<JacobiDiagram> {
    loopless_matchings(v)
        .into_iter()
        .map(|m| {
            let triples = (0..v).map(|i| [3 * i, 3 * i + 1, 3 * i + 2]).collect();
            JacobiDiagram::validate(triples, m).unwrap()
        })
        .collect()
}

#[test]
fn catalog_sizes_up_to_degree_two() {
    assert_eq!(enumerate_degree(0).unwrap().classes.len(), 1);
    assert_eq!(enumerate_degree(1).unwrap().classes.len(), 1);
    assert_eq!(enumerate_degree(2).unwrap().classes.len(), 3);
}

#[test]
fn degree_zero_is_the_empty_diagram() {
    let catalog = enumerate_degree(0).unwrap();
    assert_eq!(catalog.classes, vec![JacobiDiagram::empty()]);
}

#[test]
fn degree_one_is_the_two_vertex_class() {
    let catalog = enumerate_degree(1).unwrap();
    assert_eq!(catalog.classes, vec![theta().canonical_form().0]);
}

#[test]
fn degree_two_contains_the_known_classes() {
    let catalog = enumerate_degree(2).unwrap();
    assert!(catalog.classes.contains(&theta_theta().canonical_form().0));
    assert!(catalog.classes.contains(&k4().canonical_form().0));
}

#[test]
fn classes_are_pairwise_non_isomorphic() {
    for k in 0..=2 {
        let classes = enumerate_degree(k).unwrap().classes;
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                assert!(!classes[i].isomorphic(&classes[j]));
            }
        }
    }
}

#[test]
fn classes_are_canonical_representatives() {
    for k in 0..=3 {
        let catalog = enumerate_degree(k).unwrap();
        assert_eq!(catalog.degree, k);
        for d in &catalog.classes {
            let (c, s) = d.canonical_form();
            assert_eq!(&c, d);
            assert_eq!(s, 1);
        }
        let mut sorted = catalog.classes.clone();
        sorted.sort();
        assert_eq!(sorted, catalog.classes, "catalog is sorted");
    }
}

#[test]
fn catalog_agrees_with_matching_dedup() {
    let one = matching_diagrams(2);
    assert_eq!(one.len(), 6);
    assert_eq!(classes_of(one), enumerate_degree(1).unwrap().classes);

    let two = matching_diagrams(4);
    assert_eq!(two.len(), 3348);
    assert_eq!(classes_of(two), enumerate_degree(2).unwrap().classes);
}

#[test]
fn matching_count_matches_closed_form() {
    assert_eq!(loopless_matching_formula(2), 6);
    assert_eq!(loopless_matching_formula(4), 3348);
    for v in [0usize, 2, 4, 6] {
        assert_eq!(loopless_matching_count(v), loopless_matching_formula(v));
    }
}

#[test]
fn mass_formula_accounts_for_every_matching() {
    // Orbit counting: each isomorphism class of labeled-triple matchings
    // has orbit size 6^V V! / |Aut| under reading changes and vertex
    // permutations, so the orbit sizes over the catalog must add up to
    // the loopless matching count.
    for k in 0..=3usize {
        let v = 2 * k;
        let total: u128 = enumerate_degree(k)
            .unwrap()
            .classes
            .iter()
            .map(|d| {
                let (aut, _, _) = d.automorphism_counts();
                6u128.pow(v as u32) * factorial(v) / aut as u128
            })
            .sum();
        assert_eq!(total, loopless_matching_formula(v), "degree {k}");
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[test]
fn connected_filter_drops_split_classes() {
    let all = enumerate_degree_limited(2, DEFAULT_MAX_DEGREE, false).unwrap();
    let connected = enumerate_degree_limited(2, DEFAULT_MAX_DEGREE, true).unwrap();
    assert_eq!(all.classes.len(), 3);
    assert_eq!(connected.classes.len(), 2);
    assert!(connected.classes.iter().all(|d| d.is_connected()));
    assert!(!connected.classes.contains(&theta_theta().canonical_form().0));

    let empty = enumerate_degree_limited(0, DEFAULT_MAX_DEGREE, true).unwrap();
    assert_eq!(empty.classes.len(), 1);
}

#[test]
fn representatives_concatenate_degreewise_catalogs() {
    let reps = representatives_up_to(4).unwrap();
    assert_eq!(reps.len(), 3);
    for (k, catalog) in reps.iter().enumerate() {
        assert_eq!(catalog.degree, k);
        assert_eq!(catalog.classes, enumerate_degree(k).unwrap().classes);
    }
    // Odd half-edge budgets round down.
    assert_eq!(representatives_up_to(5).unwrap().len(), 3);
}

#[test]
fn degree_bound_is_enforced() {
    let err = enumerate_degree_limited(3, 2, false).unwrap_err();
    assert_eq!(err.code(), "LIMIT");
    assert_eq!(err.exit_code(), 2);
    assert!(enumerate_degree_limited(2, 2, false).is_ok());
}
