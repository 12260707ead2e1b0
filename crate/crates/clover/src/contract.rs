//! The contraction pairing between LP-surgery data and Jacobi diagrams:
//! per-coloration values, their automorphism-normalized quotients, the
//! three-case coefficient ell(D;Gamma), and the bracket over the catalog.
//!
//! For a coloration sigma, the value is a sum over all systems of
//! per-vertex injective leaf assignments: each vertex contributes its
//! component's alternating form read in the vertex's stored half-edge
//! order, and each diagram edge contributes the linking number between
//! the two assigned leaves. Exactness is preserved end to end (checked
//! 128-bit intermediates, exact division, mod 2 only at ring boundaries).

use std::collections::BTreeMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::diagram::JacobiDiagram;
use crate::enumerate::{representatives_up_to_limited, DEFAULT_MAX_DEGREE};
use crate::error::Error;
use crate::lp::{restrict, triple_eval, LPSurgeryData};
use crate::Result;

/// Value ring of a contraction coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    Z,
    #[serde(rename = "Z2")]
    Z2,
}

/// A coefficient with its ring; `Z2` values are reduced to {0, 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub ring: Ring,
    pub value: i64,
}

impl Coefficient {
    pub fn integer(value: i64) -> Self {
        Coefficient {
            ring: Ring::Z,
            value,
        }
    }

    pub fn mod2(value: i64) -> Self {
        Coefficient {
            ring: Ring::Z2,
            value: value.rem_euclid(2),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

/// A bijection from the vertices of a diagram onto the components
/// {0..n-1} of a surgery datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloration {
    assignment: Vec<usize>,
}

impl Coloration {
    /// Validates bijectivity onto 0..len.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let n = assignment.len();
        let mut seen = vec![false; n];
        for &c in &assignment {
            if c >= n || seen[c] {
                return Err(Error::IndexRange(format!(
                    "coloration is not a bijection onto 0..{n}"
                )));
            }
            seen[c] = true;
        }
        Ok(Coloration { assignment })
    }

    pub fn identity(n: usize) -> Self {
        Coloration {
            assignment: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn component_of(&self, vertex: usize) -> usize {
        self.assignment[vertex]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }
}

/// The coloration sigma composed with the inverse vertex action of an
/// automorphism: result(v) = sigma(phi_v^{-1}(v)).
pub fn permute_coloration(sigma: &Coloration, phi_v: &[usize]) -> Coloration {
    let n = sigma.len();
    debug_assert_eq!(phi_v.len(), n);
    let mut out = vec![0; n];
    for v in 0..n {
        out[phi_v[v]] = sigma.assignment[v];
    }
    Coloration { assignment: out }
}

/// One pending linking factor during the leaf-assignment search: the edge
/// closes when `later` (a DFS position) is assigned.
struct Closure {
    later_slot: usize,
    earlier_vertex: usize,
    earlier_slot: usize,
    width: usize,
    /// Row-major over (later leaf - 1, earlier leaf - 1).
    table: Vec<i64>,
}

struct EvalCtx {
    order: Vec<usize>,
    /// Per vertex: the injective leaf triples (in stored half-edge order)
    /// on which the component's form is nonzero, with the form value.
    assignments: Vec<Vec<([usize; 3], i64)>>,
    closures: Vec<Vec<Closure>>,
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("contraction {what} exceeds the checked integer range"))
}

fn dfs(
    ctx: &EvalCtx,
    beta: &mut [[usize; 3]],
    total: &mut i128,
    pos: usize,
    acc: i128,
) -> Result<()> {
    if pos == ctx.order.len() {
        *total = total.checked_add(acc).ok_or_else(|| overflow("sum"))?;
        return Ok(());
    }
    let v = ctx.order[pos];
    'assign: for &(js, t) in &ctx.assignments[v] {
        let mut val = acc
            .checked_mul(i128::from(t))
            .ok_or_else(|| overflow("product"))?;
        for c in &ctx.closures[pos] {
            let jl = js[c.later_slot];
            let je = beta[c.earlier_vertex][c.earlier_slot];
            let lk = c.table[(jl - 1) * c.width + (je - 1)];
            if lk == 0 {
                continue 'assign;
            }
            val = val
                .checked_mul(i128::from(lk))
                .ok_or_else(|| overflow("product"))?;
        }
        beta[v] = js;
        dfs(ctx, beta, total, pos + 1, val)?;
    }
    Ok(())
}

/// The coloration-level contraction value: exact integer, independent of
/// any internal labeling choice.
pub fn ell_sigma(d: &LPSurgeryData, gamma: &JacobiDiagram, sigma: &Coloration) -> Result<i64> {
    let vcount = gamma.vertex_count();
    if d.len() != vcount {
        return Err(Error::Arity {
            expected: vcount,
            got: d.len(),
        });
    }
    if sigma.len() != vcount {
        return Err(Error::IndexRange(format!(
            "coloration covers {} vertices, diagram has {vcount}",
            sigma.len()
        )));
    }
    if vcount == 0 {
        return Ok(1);
    }

    let mut assignments = Vec::with_capacity(vcount);
    for w in 0..vcount {
        let comp = &d.components()[sigma.component_of(w)];
        let g = comp.genus;
        let mut list = Vec::new();
        for j0 in 1..=g {
            for j1 in 1..=g {
                for j2 in 1..=g {
                    if j0 == j1 || j1 == j2 || j0 == j2 {
                        continue;
                    }
                    let t = triple_eval(comp, j0, j1, j2)?;
                    if t != 0 {
                        list.push(([j0, j1, j2], t));
                    }
                }
            }
        }
        if list.is_empty() {
            return Ok(0);
        }
        assignments.push(list);
    }

    // Greedy search order: each step picks the vertex closing the most
    // edges against already placed ones (ties to the lowest id), so zero
    // linking factors prune as early as possible.
    let vertex_of = gamma.vertex_of_table();
    let mut placed = vec![false; vcount];
    let mut order = Vec::with_capacity(vcount);
    for _ in 0..vcount {
        let next = (0..vcount)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let closed = gamma
                    .edges()
                    .iter()
                    .filter(|&&(a, b)| {
                        (vertex_of[a] == v && placed[vertex_of[b]])
                            || (vertex_of[b] == v && placed[vertex_of[a]])
                    })
                    .count();
                (closed, std::cmp::Reverse(v))
            })
            .expect("unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    let mut pos_of = vec![0; vcount];
    for (pos, &v) in order.iter().enumerate() {
        pos_of[v] = pos;
    }

    let slot_of = |h: usize| -> usize {
        gamma.triples()[vertex_of[h]]
            .iter()
            .position(|&x| x == h)
            .expect("half-edge sits in its vertex triple")
    };
    let mut closures: Vec<Vec<Closure>> = (0..vcount).map(|_| Vec::new()).collect();
    for &(a, b) in gamma.edges() {
        let (u, w) = (vertex_of[a], vertex_of[b]);
        let (later_h, earlier_h) = if pos_of[u] > pos_of[w] { (a, b) } else { (b, a) };
        let (lv, ev) = (vertex_of[later_h], vertex_of[earlier_h]);
        let (cl, ce) = (sigma.component_of(lv), sigma.component_of(ev));
        let (gl, ge) = (d.components()[cl].genus, d.components()[ce].genus);
        let mut table = Vec::with_capacity(gl * ge);
        for p in 1..=gl {
            for q in 1..=ge {
                table.push(d.linking_value((cl, p), (ce, q)));
            }
        }
        closures[pos_of[lv]].push(Closure {
            later_slot: slot_of(later_h),
            earlier_vertex: ev,
            earlier_slot: slot_of(earlier_h),
            width: ge,
            table,
        });
    }

    let ctx = EvalCtx {
        order,
        assignments,
        closures,
    };
    let mut beta = vec![[0usize; 3]; vcount];
    let mut total = 0i128;
    dfs(&ctx, &mut beta, &mut total, 0, 1)?;
    i64::try_from(total).map_err(|_| overflow("total"))
}

/// The per-coloration value divided by the vertex-fixing automorphism
/// count, which always divides it exactly; a failed division is an
/// internal-consistency error, not a data error.
pub fn ell_zero(d: &LPSurgeryData, gamma: &JacobiDiagram, sigma: &Coloration) -> Result<i64> {
    let (_, aut_v, _) = gamma.automorphism_counts();
    let v = ell_sigma(d, gamma, sigma)?;
    let m = i64::try_from(aut_v).expect("automorphism count fits i64");
    if v % m != 0 {
        return Err(Error::Divisibility(format!(
            "vertex-automorphism count {m} does not divide coloration value {v}"
        )));
    }
    Ok(v / m)
}

/// Product of Rohlin deltas over a component subset, in Z/2; the empty
/// product is 1.
pub fn rohlin_product(d: &LPSurgeryData, subset: &[usize]) -> Result<u8> {
    let mut out = 1u8;
    for &i in subset {
        if i >= d.len() {
            return Err(Error::IndexRange(format!(
                "delta product names component {i} of {}",
                d.len()
            )));
        }
        out &= d.components()[i].rohlin_delta;
    }
    Ok(out)
}

/// Factorial-base rank of a permutation of 0..n, for orbit bookkeeping.
fn perm_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// ell(D;Gamma) when the component count equals the vertex count: sums
/// ell_sigma over coloration orbits under the diagram's automorphisms
/// (values across one orbit agree up to automorphism sign).
fn ell_equal(d: &LPSurgeryData, gamma: &JacobiDiagram) -> Result<Coefficient> {
    let vcount = gamma.vertex_count();
    debug_assert_eq!(d.len(), vcount);

    let autos = gamma.isomorphisms(gamma);
    let identity: Vec<usize> = (0..vcount).collect();
    let mut vertex_actions: BTreeMap<Vec<usize>, i8> = BTreeMap::new();
    let mut aut_v = 0usize;
    let mut reversible = false;
    for iso in &autos {
        let vm = iso.vertex_map(gamma, gamma);
        if vm == identity {
            aut_v += 1;
        }
        if iso.sign < 0 {
            reversible = true;
        }
        let prev = vertex_actions.insert(vm, iso.sign);
        debug_assert!(prev.is_none_or(|s| s == iso.sign));
    }
    let aut = autos.len();
    debug_assert_eq!(aut, vertex_actions.len() * aut_v);

    let n_fact: usize = (1..=vcount).product();
    let mut visited = vec![false; n_fact];
    let mut sum_reps = 0i128;
    let mut mod2 = 0u8;
    let aut_v_i = i64::try_from(aut_v).expect("automorphism count fits i64");

    for perm in (0..vcount).permutations(vcount) {
        if visited[perm_rank(&perm)] {
            continue;
        }
        let sigma = Coloration {
            assignment: perm.clone(),
        };
        for action in vertex_actions.keys() {
            visited[perm_rank(permute_coloration(&sigma, action).as_slice())] = true;
        }
        let v = ell_sigma(d, gamma, &sigma)?;
        if reversible {
            if v % aut_v_i != 0 {
                return Err(Error::Divisibility(format!(
                    "vertex-automorphism count {aut_v_i} does not divide coloration value {v}"
                )));
            }
            mod2 ^= (v / aut_v_i).rem_euclid(2) as u8;
        } else {
            sum_reps = sum_reps
                .checked_add(i128::from(v))
                .ok_or_else(|| overflow("sum"))?;
        }
    }

    if reversible {
        return Ok(Coefficient::mod2(i64::from(mod2)));
    }
    // Each orbit has one element per distinct vertex action, all of equal
    // value here (no sign -1 automorphism exists), so the full coloration
    // sum is the representative sum scaled by the orbit size.
    let total = sum_reps
        .checked_mul(vertex_actions.len() as i128)
        .ok_or_else(|| overflow("sum"))?;
    let aut_i = aut as i128;
    if total % aut_i != 0 {
        return Err(Error::Divisibility(format!(
            "automorphism count {aut} does not divide coloration sum {total}"
        )));
    }
    let value = i64::try_from(total / aut_i).map_err(|_| overflow("total"))?;
    Ok(Coefficient::integer(value))
}

/// The contraction coefficient ell(D;Gamma).
///
/// With n components and a degree-k diagram: equal counts (n = 2k) give an
/// integer for non-reversible diagrams and a mod-2 value for reversible
/// ones; for n > 2k the value is the mod-2 sum, over all 2k-subsets J, of
/// ell on the restriction to J times the Rohlin-delta product of the
/// complement. n < 2k is an arity error.
pub fn ell(d: &LPSurgeryData, gamma: &JacobiDiagram) -> Result<Coefficient> {
    let vcount = gamma.vertex_count();
    let n = d.len();
    if n < vcount {
        return Err(Error::Arity {
            expected: vcount,
            got: n,
        });
    }
    if n == vcount {
        return ell_equal(d, gamma);
    }
    let mut acc = 0u8;
    for j in (0..n).combinations(vcount) {
        let complement: Vec<usize> = (0..n).filter(|i| !j.contains(i)).collect();
        if rohlin_product(d, &complement)? == 0 {
            continue;
        }
        let sub = restrict(d, &j)?;
        let c = ell_equal(&sub, gamma)?;
        acc ^= c.value.rem_euclid(2) as u8;
    }
    Ok(Coefficient::mod2(i64::from(acc)))
}

/// One term of a bracket: a catalog class with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub diagram: JacobiDiagram,
    pub ring: Ring,
    pub value: i64,
}

/// The full bracket of a surgery datum: ell(D;Gamma) over every catalog
/// class of degree <= n/2, zeros omitted, in catalog order.
pub fn bracket(d: &LPSurgeryData) -> Result<Vec<BracketEntry>> {
    bracket_limited(d, DEFAULT_MAX_DEGREE)
}

/// As [`bracket`] with an explicit enumeration bound.
pub fn bracket_limited(d: &LPSurgeryData, bound: usize) -> Result<Vec<BracketEntry>> {
    let mut out = Vec::new();
    for catalog in representatives_up_to_limited(d.len(), bound)? {
        for gamma in &catalog.classes {
            let c = ell(d, gamma)?;
            if !c.is_zero() {
                out.push(BracketEntry {
                    diagram: gamma.clone(),
                    ring: c.ring,
                    value: c.value,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{validate_lp, LPComponent};

    fn epsilon(sign: i64) -> LPComponent {
        LPComponent {
            genus: 3,
            triple_form: BTreeMap::from([((1, 2, 3), sign)]),
            rohlin_delta: 0,
        }
    }

    fn theta() -> JacobiDiagram {
        JacobiDiagram::validate(vec![[0, 1, 2], [3, 4, 5]], vec![(0, 3), (1, 4), (2, 5)]).unwrap()
    }

    /// Two epsilon components linked slot-to-slot, the hand-checkable
    /// mate of the theta diagram.
    fn theta_datum() -> LPSurgeryData {
        let linking = BTreeMap::from([
            (((0, 1), (1, 1)), 1),
            (((0, 2), (1, 2)), 1),
            (((0, 3), (1, 3)), 1),
        ]);
        validate_lp(vec![epsilon(1), epsilon(1)], linking).unwrap()
    }

    #[test]
    fn theta_contraction_is_six() {
        let d = theta_datum();
        let g = theta();
        let v = ell_sigma(&d, &g, &Coloration::identity(2)).unwrap();
        assert_eq!(v, 6);
        assert_eq!(ell_zero(&d, &g, &Coloration::identity(2)).unwrap(), 1);
        assert_eq!(ell(&d, &g).unwrap(), Coefficient::integer(1));
    }

    #[test]
    fn orientation_flip_negates_the_pairing() {
        let d = theta_datum();
        let flipped = theta().reverse_orientation();
        let v = ell_sigma(&d, &flipped, &Coloration::identity(2)).unwrap();
        assert_eq!(v, -6);
    }

    #[test]
    fn zero_form_component_kills_the_value() {
        let mut zero = epsilon(1);
        zero.triple_form.clear();
        let d = validate_lp(vec![zero, epsilon(1)], BTreeMap::new()).unwrap();
        assert_eq!(ell_sigma(&d, &theta(), &Coloration::identity(2)).unwrap(), 0);
    }

    #[test]
    fn empty_diagram_pairs_to_one() {
        let empty_d = validate_lp(vec![], BTreeMap::new()).unwrap();
        let empty_g = JacobiDiagram::empty();
        assert_eq!(
            ell_sigma(&empty_d, &empty_g, &Coloration::identity(0)).unwrap(),
            1
        );
        assert_eq!(ell(&empty_d, &empty_g).unwrap(), Coefficient::integer(1));
    }

    #[test]
    fn arity_requires_enough_components() {
        let d = validate_lp(vec![epsilon(1)], BTreeMap::new()).unwrap();
        let err = ell(&d, &theta()).unwrap_err();
        assert!(matches!(err, Error::Arity { expected: 2, got: 1 }));
    }
}
