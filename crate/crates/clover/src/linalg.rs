//! Exact integer linear algebra: Smith normal form over arbitrary-precision
//! integers, and an independent fraction-free rational rank used as a
//! cross-check oracle. The two routes share no elimination code.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Smith normal form of an integer matrix, tracking only the column
/// transform (row operations never matter to the quotient's coordinates).
///
/// With input `R` (rows are relations) there are unimodular `U`, `V` with
/// `U R V = diag(d)`. For a row vector `x` of generator coordinates,
/// `y = x · V` rewrites `x` in the basis where the relation lattice is
/// spanned by `d_i e_i`; `v_inv` maps back (`y · V⁻¹ = x`).
pub struct Snf {
    /// `d_1, ..., d_min(m,n)`: nonnegative, nonzero entries first, each
    /// dividing the next.
    pub diag: Vec<BigInt>,
    /// Count of nonzero diagonal entries.
    pub rank: usize,
    /// `n × n` unimodular column transform.
    pub v: Vec<Vec<BigInt>>,
    /// Inverse of `v`.
    pub v_inv: Vec<Vec<BigInt>>,
}

/// Mutable row `i` alongside immutable row `j` of the same matrix.
fn row_pair(a: &mut [Vec<BigInt>], i: usize, j: usize) -> (&mut [BigInt], &[BigInt]) {
    debug_assert_ne!(i, j);
    if i < j {
        let (lo, hi) = a.split_at_mut(j);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&mut hi[0], &lo[j])
    }
}

/// Computes the Smith normal form of an `m × cols` matrix (given as rows;
/// `m` may be 0, which is why the column count is explicit).
pub fn smith_normal_form(rows: &[Vec<BigInt>], cols: usize) -> Snf {
    let m = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    for row in &a {
        assert_eq!(row.len(), cols, "ragged relation matrix");
    }
    let mut v = identity(cols);
    let mut v_inv = identity(cols);
    let bound = m.min(cols);
    let mut t = 0;

    while t < bound {
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            break;
        };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, &mut v_inv, t, pj);

        loop {
            // Clear column t with row operations, keeping the smallest
            // remainder as the new pivot.
            let mut dirty = false;
            for i in 0..m {
                if i == t || a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    let (row_i, row_t) = row_pair(&mut a, i, t);
                    for (x, y) in row_i[t..].iter_mut().zip(&row_t[t..]) {
                        *x -= &q * y;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Clear row t with column operations.
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    col_sub(&mut a, &mut v, &mut v_inv, j, t, &q);
                }
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, &mut v, &mut v_inv, t, j);
                    dirty = true;
                    break;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility sweep: fold any non-multiple into the pivot's
            // row so the invariant-factor chain holds.
            let pivot = a[t][t].clone();
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&a[i][j] % &pivot).is_zero());
            match offender {
                Some((i, _)) => {
                    let (row_t, row_i) = row_pair(&mut a, t, i);
                    for (x, y) in row_t[t..].iter_mut().zip(&row_i[t..]) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t][t..].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        t += 1;
    }

    let mut diag: Vec<BigInt> = (0..bound).map(|i| a[i][i].clone()).collect();
    let rank = diag.iter().take_while(|d| !d.is_zero()).count();
    debug_assert!(diag.iter().skip(rank).all(|d| d.is_zero()));
    for i in 1..rank {
        let (lo, hi) = (diag[i - 1].clone(), diag[i].clone());
        debug_assert!((hi % lo).is_zero(), "invariant factors must chain");
    }
    diag.truncate(bound);
    Snf {
        diag,
        rank,
        v,
        v_inv,
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination with row
/// pivoting and column skipping. Divisions are exact; this shares nothing
/// with the Smith normal form route.
pub fn rational_rank(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let m = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        for i in (row + 1)..m {
            for j in (col + 1)..cols {
                let num = &a[row][col] * &a[i][j] - &a[i][col] * &a[row][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division is exact");
                a[i][j] = num / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        row += 1;
    }
    row
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn min_abs_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => x.abs() < a[bi][bj].abs(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Swap columns `j1`, `j2` of the working matrix and `v`; the inverse swaps
/// the corresponding rows of `v_inv`.
fn swap_cols(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    j1: usize,
    j2: usize,
) {
    if j1 == j2 {
        return;
    }
    for row in a.iter_mut() {
        row.swap(j1, j2);
    }
    for row in v.iter_mut() {
        row.swap(j1, j2);
    }
    v_inv.swap(j1, j2);
}

/// Column operation `col_j -= q · col_t`; the inverse adds `q · row_j` to
/// row `t` of `v_inv`.
fn col_sub(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    j: usize,
    t: usize,
    q: &BigInt,
) {
    for row in a.iter_mut() {
        let sub = q * &row[t];
        row[j] -= sub;
    }
    for row in v.iter_mut() {
        let sub = q * &row[t];
        row[j] -= sub;
    }
    let add: Vec<BigInt> = v_inv[j].iter().map(|x| q * x).collect();
    for (x, y) in v_inv[t].iter_mut().zip(add) {
        *x += y;
    }
}
