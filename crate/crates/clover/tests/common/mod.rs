//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is deliberately written from the definitions, not by
//! calling into the engine's algorithms: brute-force isomorphism search,
//! direct matching enumeration, minor-gcd invariant factors, and the
//! literal double-sum form of the contraction value.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use clover::contract::{Coefficient, Coloration};
use clover::diagram::JacobiDiagram;
use clover::lp::{validate_lp, LPComponent, LPSurgeryData};

pub fn theta() -> JacobiDiagram {
    JacobiDiagram::validate(vec![[0, 1, 2], [3, 4, 5]], vec![(0, 3), (1, 4), (2, 5)]).unwrap()
}

/// Genus-3 component whose only form entry is the full triple (1,2,3).
pub fn epsilon(sign: i64) -> LPComponent {
    LPComponent {
        genus: 3,
        triple_form: BTreeMap::from([((1, 2, 3), sign)]),
        rohlin_delta: 0,
    }
}

/// Two epsilon components linked slot-to-slot: the hand-checkable datum
/// whose pairing with the two-vertex diagram is exactly +-6.
pub fn theta_datum() -> LPSurgeryData {
    let linking = BTreeMap::from([
        (((0, 1), (1, 1)), 1),
        (((0, 2), (1, 2)), 1),
        (((0, 3), (1, 3)), 1),
    ]);
    validate_lp(vec![epsilon(1), epsilon(1)], linking).unwrap()
}

pub fn theta_theta() -> JacobiDiagram {
    JacobiDiagram::validate(
        vec![[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]],
        vec![(0, 3), (1, 4), (2, 5), (6, 9), (7, 10), (8, 11)],
    )
    .unwrap()
}

pub fn k4() -> JacobiDiagram {
    JacobiDiagram::validate(
        vec![[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]],
        vec![(0, 3), (1, 6), (2, 9), (4, 7), (5, 10), (8, 11)],
    )
    .unwrap()
}

fn is_cyclic_rotation(a: [usize; 3], b: [usize; 3]) -> bool {
    b == a || b == [a[1], a[2], a[0]] || b == [a[2], a[0], a[1]]
}

/// Sign of a half-edge bijection, straight from the definition: +1 iff the
/// pushed-forward triples disagree with the target's vertex-orientations at
/// an even number of vertices.
fn definitional_sign(a: &JacobiDiagram, b: &JacobiDiagram, map: &[usize]) -> i8 {
    let target_vertex = b.vertex_of_table();
    let mut flips = 0usize;
    for t in a.triples() {
        let pushed = [map[t[0]], map[t[1]], map[t[2]]];
        let w = target_vertex[pushed[0]];
        if !is_cyclic_rotation(b.triples()[w], pushed) {
            flips += 1;
        }
    }
    if flips.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn preserves_edges(a: &JacobiDiagram, b: &JacobiDiagram, map: &[usize]) -> bool {
    let partner_b = b.partner_table();
    a.edges()
        .iter()
        .all(|&(x, y)| partner_b[map[x]] == map[y])
}

/// All isomorphisms by brute force over (vertex permutation, one of the six
/// readings per source triple); feasible for a handful of vertices.
pub fn brute_isomorphisms(a: &JacobiDiagram, b: &JacobiDiagram) -> Vec<(Vec<usize>, i8)> {
    let v = a.vertex_count();
    if v != b.vertex_count() {
        return Vec::new();
    }
    if v == 0 {
        return vec![(Vec::new(), 1)];
    }
    const PERM3: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = Vec::new();
    for vperm in (0..v).permutations(v) {
        for readings in std::iter::repeat_n(0..6usize, v).multi_cartesian_product() {
            let mut map = vec![0usize; 3 * v];
            for (src, &dst) in vperm.iter().enumerate() {
                let st = a.triples()[src];
                let dt = b.triples()[dst];
                let p = PERM3[readings[src]];
                for m in 0..3 {
                    map[st[m]] = dt[p[m]];
                }
            }
            if preserves_edges(a, b, &map) {
                let sign = definitional_sign(a, b, &map);
                out.push((map, sign));
            }
        }
    }
    out
}

/// The deepest oracle: filter all (3V)! half-edge permutations. Only for
/// two-vertex diagrams.
pub fn brute_isomorphisms_full(a: &JacobiDiagram, b: &JacobiDiagram) -> Vec<(Vec<usize>, i8)> {
    let h = a.half_edge_count();
    assert!(h <= 6, "factorial search is only for two vertices");
    if h != b.half_edge_count() {
        return Vec::new();
    }
    let vertex_a = a.vertex_of_table();
    let vertex_b = b.vertex_of_table();
    let mut out = Vec::new();
    for map in (0..h).permutations(h) {
        // Fibers must land in fibers.
        let fiber_ok = (0..h).all(|x| {
            (0..h).all(|y| (vertex_a[x] == vertex_a[y]) == (vertex_b[map[x]] == vertex_b[map[y]]))
        });
        if fiber_ok && preserves_edges(a, b, &map) {
            let sign = definitional_sign(a, b, &map);
            out.push((map, sign));
        }
    }
    out
}

/// All perfect matchings on the half-edges of `v` fixed triples
/// (3i, 3i+1, 3i+2) that never pair two half-edges of one vertex.
pub fn loopless_matchings(v: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut used = vec![false; 3 * v];
    let mut acc = Vec::with_capacity(3 * v / 2);
    fn rec(
        used: &mut Vec<bool>,
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some(first) = used.iter().position(|&u| !u) else {
            out.push(acc.clone());
            return;
        };
        used[first] = true;
        for second in first + 1..used.len() {
            if used[second] || second / 3 == first / 3 {
                continue;
            }
            used[second] = true;
            acc.push((first, second));
            rec(used, acc, out);
            acc.pop();
            used[second] = false;
        }
        used[first] = false;
    }
    rec(&mut used, &mut acc, &mut out);
    out
}

/// Count-only variant of [`loopless_matchings`].
pub fn loopless_matching_count(v: usize) -> u128 {
    fn rec(used: &mut Vec<bool>) -> u128 {
        let Some(first) = used.iter().position(|&u| !u) else {
            return 1;
        };
        used[first] = true;
        let mut total = 0;
        for second in first + 1..used.len() {
            if used[second] || second / 3 == first / 3 {
                continue;
            }
            used[second] = true;
            total += rec(used);
            used[second] = false;
        }
        used[first] = false;
        total
    }
    rec(&mut vec![false; 3 * v])
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn double_factorial_odd(n: i128) -> u128 {
    // (-1)!! = 1 by convention.
    let mut out = 1u128;
    let mut m = n;
    while m > 1 {
        out *= m as u128;
        m -= 2;
    }
    out
}

/// Closed form for the loopless matching count: inclusion-exclusion over
/// the set of vertices containing an internal pair.
pub fn loopless_matching_formula(v: usize) -> u128 {
    let mut total = 0i128;
    for j in 0..=v {
        let term = binomial(v as u128, j as u128)
            * 3u128.pow(j as u32)
            * double_factorial_odd(3 * v as i128 - 2 * j as i128 - 1);
        if j % 2 == 0 {
            total += term as i128;
        } else {
            total -= term as i128;
        }
    }
    u128::try_from(total).expect("alternating sum is nonnegative")
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = BigInt::zero();
    for (j, top) in m[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = top * det(&minor);
        if j % 2 == 0 {
            out += term;
        } else {
            out -= term;
        }
    }
    out
}

/// Invariant factors by the determinantal-divisor definition:
/// d_i = gcd(all i-by-i minors) / gcd(all (i-1)-by-(i-1) minors).
pub fn minor_gcd_invariants(rows: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let r = rows.len();
    let max_rank = r.min(cols);
    let mut divisors = vec![BigInt::one()];
    for size in 1..=max_rank {
        let mut g = BigInt::zero();
        for row_set in (0..r).combinations(size) {
            for col_set in (0..cols).combinations(size) {
                let sub: Vec<Vec<BigInt>> = row_set
                    .iter()
                    .map(|&i| col_set.iter().map(|&j| rows[i][j].clone()).collect())
                    .collect();
                g = g.gcd(&det(&sub).abs());
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    (1..divisors.len())
        .map(|i| &divisors[i] / &divisors[i - 1])
        .collect()
}

/// The contraction value written exactly as displayed: a sum over
/// per-vertex half-edge labelings h' (sign +1 iff the labeling order
/// induces the vertex-orientation) and strictly increasing basis triples
/// per component, of the form-coefficient product times the linking
/// product over edges.
pub fn reference_ell_sigma(d: &LPSurgeryData, g: &JacobiDiagram, sigma: &Coloration) -> i64 {
    let vcount = g.vertex_count();
    assert_eq!(d.len(), vcount);
    assert_eq!(sigma.len(), vcount);
    if vcount == 0 {
        return 1;
    }
    const PERM3: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let vertex_of = g.vertex_of_table();

    // Strictly increasing triples per component, in component order.
    let triples_by_component: Vec<Vec<[usize; 3]>> = d
        .components()
        .iter()
        .map(|c| {
            (1..=c.genus)
                .combinations(3)
                .map(|t| [t[0], t[1], t[2]])
                .collect()
        })
        .collect();

    let mut total: i128 = 0;
    // h' per vertex: reading index into PERM3; h'(t_m) = perm[m] + 1.
    for labeling in std::iter::repeat_n(0..6usize, vcount).multi_cartesian_product() {
        let mut sign = 1i64;
        for (w, &r) in labeling.iter().enumerate() {
            let t = g.triples()[w];
            let perm = PERM3[r];
            // The fiber listed in the order h' = 1, 2, 3.
            let mut ordered = [0usize; 3];
            for m in 0..3 {
                ordered[perm[m]] = t[m];
            }
            if !is_cyclic_rotation(t, ordered) {
                sign = -sign;
            }
        }
        // j: one increasing triple per component.
        for j in triples_by_component.iter().multi_cartesian_product() {
            let mut term: i128 = i128::from(sign);
            for (i, comp) in d.components().iter().enumerate() {
                let key = (j[i][0], j[i][1], j[i][2]);
                term *= i128::from(comp.triple_form.get(&key).copied().unwrap_or(0));
            }
            if term == 0 {
                continue;
            }
            let leaf = |c: usize| -> usize {
                let w = vertex_of[c];
                let i = sigma.component_of(w);
                let t = g.triples()[w];
                let m = t.iter().position(|&x| x == c).unwrap();
                let label = PERM3[labeling[w]][m]; // h'(c) - 1
                j[i][label]
            };
            for &(c1, c2) in g.edges() {
                let i1 = sigma.component_of(vertex_of[c1]);
                let i2 = sigma.component_of(vertex_of[c2]);
                term *= i128::from(d.linking_value((i1, leaf(c1)), (i2, leaf(c2))));
            }
            total += term;
        }
    }
    i64::try_from(total).expect("reference value fits i64")
}

/// Independent evaluation of the full contraction coefficient, written
/// from the definitions: brute-force automorphisms, the literal
/// double-sum per coloration, the definitional coloration sum divided by
/// the automorphism count (non-reversible case), the mod-2 orbit-
/// representative sum (reversible case), and the subset expansion when
/// components outnumber vertices.
pub fn reference_ell(d: &LPSurgeryData, g: &JacobiDiagram) -> Coefficient {
    let vcount = g.vertex_count();
    let n = d.len();
    assert!(n >= vcount, "arity handled by the engine, not the oracle");
    if n > vcount {
        let mut acc = 0i64;
        for j in (0..n).combinations(vcount) {
            let complement: Vec<usize> = (0..n).filter(|i| !j.contains(i)).collect();
            let deltas: i64 = complement
                .iter()
                .map(|&i| i64::from(d.components()[i].rohlin_delta))
                .product();
            if deltas == 0 {
                continue;
            }
            let sub = clover::lp::restrict(d, &j).unwrap();
            acc ^= reference_ell(&sub, g).value.rem_euclid(2);
        }
        return Coefficient::mod2(acc);
    }

    let autos = brute_isomorphisms(g, g);
    let vertex_of = g.vertex_of_table();
    let mut actions: BTreeMap<Vec<usize>, i8> = BTreeMap::new();
    let mut aut_v = 0i64;
    for (map, sign) in &autos {
        let vm: Vec<usize> = g.triples().iter().map(|t| vertex_of[map[t[0]]]).collect();
        if vm.iter().enumerate().all(|(v, &w)| v == w) {
            aut_v += 1;
        }
        actions.insert(vm, *sign);
    }
    let reversible = autos.iter().any(|&(_, s)| s == -1);

    if !reversible {
        // Definitional: the plain sum over every coloration, divided by
        // the automorphism count.
        let mut total = 0i128;
        for perm in (0..vcount).permutations(vcount) {
            let sigma = Coloration::new(perm).unwrap();
            total += i128::from(reference_ell_sigma(d, g, &sigma));
        }
        let aut = autos.len() as i128;
        assert_eq!(total % aut, 0, "coloration sum divisible by |Aut|");
        return Coefficient::integer(i64::try_from(total / aut).unwrap());
    }

    // Reversible: one representative per coloration orbit, each divided
    // by the vertex-fixing count, summed mod 2.
    let mut acc = 0i64;
    for perm in (0..vcount).permutations(vcount) {
        let orbit_min = actions
            .keys()
            .map(|phi_v| {
                let mut moved = vec![0usize; vcount];
                for v in 0..vcount {
                    moved[phi_v[v]] = perm[v];
                }
                moved
            })
            .min()
            .unwrap();
        if orbit_min != perm {
            continue;
        }
        let sigma = Coloration::new(perm).unwrap();
        let value = reference_ell_sigma(d, g, &sigma);
        assert_eq!(value % aut_v, 0, "vertex-fixing count divides the value");
        acc ^= (value / aut_v).rem_euclid(2);
    }
    Coefficient::mod2(acc)
}

/// Seeded random surgery datum: genus per component drawn from
/// `genus_range`, form entries in [-3, 3], linkings in [-2, 2], deltas
/// fair coin.
pub fn random_lp<R: Rng>(
    rng: &mut R,
    n: usize,
    genus_range: std::ops::RangeInclusive<usize>,
) -> LPSurgeryData {
    let mut components = Vec::with_capacity(n);
    for _ in 0..n {
        let genus = rng.gen_range(genus_range.clone());
        let mut triple_form = BTreeMap::new();
        for t in (1..=genus).combinations(3) {
            let value = rng.gen_range(-3i64..=3);
            if value != 0 {
                triple_form.insert((t[0], t[1], t[2]), value);
            }
        }
        components.push(LPComponent {
            genus,
            triple_form,
            rohlin_delta: rng.gen_range(0..=1),
        });
    }
    let mut linking = BTreeMap::new();
    for ci in 0..n {
        for cj in ci + 1..n {
            for pi in 1..=components[ci].genus {
                for qj in 1..=components[cj].genus {
                    let value = rng.gen_range(-2i64..=2);
                    if value != 0 {
                        linking.insert(((ci, pi), (cj, qj)), value);
                    }
                }
            }
        }
    }
    validate_lp(components, linking).expect("generated data is valid")
}

/// Random diagram of degree `k`: a uniformly chosen loopless matching on
/// 2k fixed triples (orientation as stored).
pub fn random_diagram<R: Rng>(rng: &mut R, k: usize) -> JacobiDiagram {
    let v = 2 * k;
    let all = loopless_matchings(v);
    let pick = all[rng.gen_range(0..all.len())].clone();
    let triples = (0..v).map(|i| [3 * i, 3 * i + 1, 3 * i + 2]).collect();
    JacobiDiagram::validate(triples, pick).unwrap()
}

pub fn random_coloration<R: Rng>(rng: &mut R, n: usize) -> Coloration {
    let mut assignment: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        assignment.swap(i, j);
    }
    Coloration::new(assignment).unwrap()
}

/// Sorted-deduplicated canonical classes of a list of diagrams.
pub fn classes_of(diagrams: impl IntoIterator<Item = JacobiDiagram>) -> Vec<JacobiDiagram> {
    let set: BTreeSet<JacobiDiagram> = diagrams
        .into_iter()
        .map(|d| d.canonical_form().0)
        .collect();
    set.into_iter().collect()
}
