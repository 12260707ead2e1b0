//! Exhaustive enumeration of Jacobi diagram isomorphism classes by degree.
//!
//! Degree-`k` diagrams are generated as symmetric adjacency matrices on
//! `2k` vertices (zero diagonal, entries up to 3, all row sums exactly 3),
//! then deduplicated up to unoriented isomorphism. Two symmetry cuts keep
//! the generation sound: both are necessary conditions of the
//! lexicographically greatest labeling of a class, so each class still
//! produces at least one matrix.

use std::collections::HashMap;

use crate::diagram::JacobiDiagram;
use crate::error::Error;
use crate::Result;

/// Enumeration bound used when no explicit limit is configured.
pub const DEFAULT_MAX_DEGREE: usize = 5;

/// All isomorphism classes of one degree: canonical representatives in
/// ascending encoding order, pairwise non-isomorphic and exhaustive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramCatalog {
    pub degree: usize,
    pub classes: Vec<JacobiDiagram>,
}

/// Catalog of degree `k` under the default bound.
pub fn enumerate_degree(k: usize) -> Result<DiagramCatalog> {
    enumerate_degree_limited(k, DEFAULT_MAX_DEGREE, false)
}

/// Catalog of degree `k`; errors with `LIMIT` when `k > bound`. With
/// `connected_only`, disconnected classes are dropped (the empty diagram
/// counts as connected).
pub fn enumerate_degree_limited(
    k: usize,
    bound: usize,
    connected_only: bool,
) -> Result<DiagramCatalog> {
    if k > bound {
        return Err(Error::Limit {
            requested: k,
            bound,
        });
    }
    if k == 0 {
        return Ok(DiagramCatalog {
            degree: 0,
            classes: vec![JacobiDiagram::empty()],
        });
    }

    let v = 2 * k;
    let mut buckets: HashMap<Vec<Vec<u8>>, Vec<JacobiDiagram>> = HashMap::new();
    generate_matrices(v, &mut |mat| {
        let d = diagram_from_matrix(mat);
        if connected_only && !d.is_connected() {
            return;
        }
        let key = invariant_key(&d);
        let bucket = buckets.entry(key).or_default();
        if !bucket.iter().any(|rep| rep.isomorphic(&d)) {
            bucket.push(d);
        }
    });

    let mut classes: Vec<JacobiDiagram> = buckets
        .into_values()
        .flatten()
        .map(|rep| rep.canonical_form().0)
        .collect();
    classes.sort();
    let before = classes.len();
    classes.dedup();
    assert_eq!(
        before,
        classes.len(),
        "bucket representatives must stay pairwise non-isomorphic"
    );
    Ok(DiagramCatalog { degree: k, classes })
}

/// Catalogs for every degree `k` with `2k <= n`, in increasing degree.
pub fn representatives_up_to(n: usize) -> Result<Vec<DiagramCatalog>> {
    representatives_up_to_limited(n, DEFAULT_MAX_DEGREE)
}

/// As [`representatives_up_to`] with an explicit degree bound.
pub fn representatives_up_to_limited(n: usize, bound: usize) -> Result<Vec<DiagramCatalog>> {
    (0..=n / 2)
        .map(|k| enumerate_degree_limited(k, bound, false))
        .collect()
}

/// Cheap isomorphism invariant for bucketing: the sorted multiset of
/// per-vertex sorted multiplicity profiles.
fn invariant_key(d: &JacobiDiagram) -> Vec<Vec<u8>> {
    let adj = d.adjacency();
    let mut key: Vec<Vec<u8>> = adj
        .iter()
        .map(|row| {
            let mut p: Vec<u8> = row.iter().copied().filter(|&m| m > 0).collect();
            p.sort_unstable();
            p
        })
        .collect();
    key.sort();
    key
}

/// Standard-orientation diagram of an adjacency matrix: vertex `i` owns
/// half-edges `3i, 3i+1, 3i+2`, and parallel edges consume slots in
/// ascending vertex-pair order.
fn diagram_from_matrix(mat: &[Vec<u8>]) -> JacobiDiagram {
    let v = mat.len();
    let triples = (0..v).map(|i| [3 * i, 3 * i + 1, 3 * i + 2]).collect();
    let mut next: Vec<usize> = (0..v).map(|i| 3 * i).collect();
    let mut edges = Vec::with_capacity(3 * v / 2);
    for r in 0..v {
        for c in r + 1..v {
            for _ in 0..mat[r][c] {
                edges.push((next[r], next[c]));
                next[r] += 1;
                next[c] += 1;
            }
        }
    }
    JacobiDiagram::validate(triples, edges).expect("matrix rows sum to 3 with zero diagonal")
}

/// Emits every symmetric matrix with zero diagonal, entries `0..=3`, and
/// all row sums 3, subject to two sound symmetry cuts: row 0 is
/// non-increasing, and entry `(0,1)` equals the maximum entry.
fn generate_matrices(v: usize, emit: &mut dyn FnMut(&[Vec<u8>])) {
    let mut mat = vec![vec![0u8; v]; v];
    let mut rem = vec![3u8; v];
    fill(v, 0, 1, &mut mat, &mut rem, emit);
}

fn fill(
    v: usize,
    r: usize,
    c: usize,
    mat: &mut Vec<Vec<u8>>,
    rem: &mut Vec<u8>,
    emit: &mut dyn FnMut(&[Vec<u8>]),
) {
    if r == v {
        let max = (0..v)
            .flat_map(|i| (i + 1..v).map(move |j| (i, j)))
            .map(|(i, j)| mat[i][j])
            .max()
            .unwrap_or(0);
        if mat[0][1] == max {
            emit(mat);
        }
        return;
    }
    if c >= v {
        // Row r is final: lower rows can no longer feed it.
        if rem[r] == 0 {
            fill(v, r + 1, r + 2, mat, rem, emit);
        }
        return;
    }
    // Capacity of the untouched columns of this row.
    let capacity: u8 = (c..v).map(|j| rem[j].min(3)).sum();
    if rem[r] > capacity {
        return;
    }
    let mut cap = rem[r].min(rem[c]).min(3);
    if r == 0 && c >= 2 {
        cap = cap.min(mat[0][c - 1]);
    }
    for val in 0..=cap {
        mat[r][c] = val;
        mat[c][r] = val;
        rem[r] -= val;
        rem[c] -= val;
        fill(v, r, c + 1, mat, rem, emit);
        rem[r] += val;
        rem[c] += val;
    }
    mat[r][c] = 0;
    mat[c][r] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_catalog_sizes() {
        assert_eq!(enumerate_degree(0).unwrap().classes.len(), 1);
        assert_eq!(enumerate_degree(1).unwrap().classes.len(), 1);
        assert_eq!(enumerate_degree(2).unwrap().classes.len(), 3);
    }

    #[test]
    fn limit_is_enforced() {
        let err = enumerate_degree_limited(6, 5, false).unwrap_err();
        assert_eq!(err.code(), "LIMIT");
        assert_eq!(err.exit_code(), 2);
    }
}
