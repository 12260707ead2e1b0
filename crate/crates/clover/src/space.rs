//! The graded groups A_k: free abelian groups on degree-k oriented Jacobi
//! diagram classes, quotiented by AS and IHX, realized through exact
//! integer linear algebra.
//!
//! AS is absorbed in two stages: [`as_normalize`] rewrites signed diagrams
//! onto canonical orientation representatives (the sign moves into the
//! coefficient), and reversible classes contribute a `2Γ = 0` relation row
//! to the Smith normal form. IHX contributes one three-term relation per
//! catalog diagram and edge; a replacement that closes a simple loop is
//! treated as 0, since looped diagrams are excluded from the generating
//! set (convention, validated by the rank cross-checks at low degree).

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::diagram::JacobiDiagram;
use crate::enumerate::{enumerate_degree_limited, DiagramCatalog, DEFAULT_MAX_DEGREE};
use crate::error::Error;
use crate::linalg::{smith_normal_form, Snf};
use crate::Result;

pub use crate::words::free_group_identity_check;

/// Integer combination of canonical diagram classes. Keys are canonical
/// encodings; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeMap<JacobiDiagram, i64>,
}

impl FormalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<JacobiDiagram, i64> {
        &self.terms
    }

    /// Sum of two formal sums (coefficients add; zeros vanish).
    pub fn add(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        for (d, &c) in &other.terms {
            out.accumulate(d.clone(), c);
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, m: i64) -> FormalSum {
        let mut out = FormalSum::zero();
        if m == 0 {
            return out;
        }
        for (d, &c) in &self.terms {
            out.accumulate(d.clone(), c.checked_mul(m).expect("coefficient overflow"));
        }
        out
    }

    /// `key` must already be canonical; coefficients merge additively.
    fn accumulate(&mut self, key: JacobiDiagram, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(key) {
            Entry::Occupied(mut e) => {
                let v = e.get().checked_add(c).expect("coefficient overflow");
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }
}

/// Rewrites a list of signed diagrams onto canonical orientation
/// representatives, absorbing each canonical sign into the coefficient and
/// merging isomorphic terms.
pub fn as_normalize(items: &[(JacobiDiagram, i64)]) -> FormalSum {
    let mut sum = FormalSum::zero();
    for (d, c) in items {
        let (canonical, sign) = d.canonical_form();
        sum.accumulate(canonical, c * i64::from(sign));
    }
    sum
}

/// All IHX relation sums of degree `k` under the default bound: one per
/// (catalog diagram, edge), each the normalized sum of the diagram itself
/// and its two local replacements.
pub fn ihx_relations(k: usize) -> Result<Vec<FormalSum>> {
    let catalog = enumerate_degree_limited(k, DEFAULT_MAX_DEGREE, false)?;
    Ok(ihx_relations_for(&catalog))
}

/// IHX relation sums for an already enumerated catalog.
pub fn ihx_relations_for(catalog: &DiagramCatalog) -> Vec<FormalSum> {
    let mut rels = Vec::new();
    for g in &catalog.classes {
        for &edge in g.edges() {
            let mut terms = vec![(g.clone(), 1)];
            for companion in ihx_companions(g, edge).into_iter().flatten() {
                terms.push((companion, 1));
            }
            rels.push(as_normalize(&terms));
        }
    }
    rels
}

/// The two companion diagrams of the IHX move at `edge = (iu, iw)`, each
/// `None` when the replacement closes a simple loop.
///
/// Reading cyclically from the edge's half-edges, the incident triples are
/// `u: (iu, a, b)` and `w: (iw, c, d)`. The companions keep the pairing and
/// re-seat the four neighbor half-edges:
/// `H: u = (iu, a, c), w = (iw, d, b)` and `X: u = (iu, a, d), w = (iw, b, c)`.
/// With this orientation convention the three terms sum to zero in A_k.
fn ihx_companions(g: &JacobiDiagram, edge: (usize, usize)) -> [Option<JacobiDiagram>; 2] {
    let (iu, iw) = edge;
    let vertex_of = g.vertex_of_table();
    let (u, w) = (vertex_of[iu], vertex_of[iw]);
    let from = |v: usize, h: usize| -> [usize; 3] {
        let t = g.triples()[v];
        let p = t.iter().position(|&x| x == h).expect("half-edge in fiber");
        [t[p], t[(p + 1) % 3], t[(p + 2) % 3]]
    };
    let [_, a, b] = from(u, iu);
    let [_, c, d] = from(w, iw);

    let build = |tu: [usize; 3], tw: [usize; 3]| -> Option<JacobiDiagram> {
        let mut triples = g.triples().to_vec();
        triples[u] = tu;
        triples[w] = tw;
        match JacobiDiagram::validate(triples, g.edges().to_vec()) {
            Ok(d) => Some(d),
            Err(Error::Loop(..)) => None,
            Err(e) => unreachable!("IHX companion can only fail as a loop: {e}"),
        }
    };
    [
        build([iu, a, c], [iw, d, b]),
        build([iu, a, d], [iw, b, c]),
    ]
}

/// Exact coordinates of an element in the computed quotient basis: torsion
/// coordinates carry their modulus; free coordinates are plain integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinates {
    /// `(value mod d, d)` pairs, `0 <= value < d`, in invariant-factor order.
    pub torsion: Vec<(BigInt, BigInt)>,
    pub free: Vec<BigInt>,
}

impl Coordinates {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().all(|(v, _)| v.is_zero()) && self.free.iter().all(Zero::is_zero)
    }
}

/// A_k as a computed abelian group: free rank, invariant factors, a basis
/// of formal sums, and the change of basis needed to reduce elements.
pub struct SpaceStructure {
    degree: usize,
    catalog: DiagramCatalog,
    rank: usize,
    torsion: Vec<BigInt>,
    basis: Vec<FormalSum>,
    v: Vec<Vec<BigInt>>,
    relation_rank: usize,
    /// Positions (in SNF coordinates) of torsion then free basis entries.
    torsion_pos: Vec<usize>,
    free_pos: Vec<usize>,
    moduli: Vec<BigInt>,
}

impl SpaceStructure {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Free rank of A_k.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Invariant factors greater than 1, in divisibility order.
    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Basis classes: torsion generators first, then free generators.
    /// Reducing `basis[i]` yields the i-th unit coordinate vector.
    pub fn basis(&self) -> &[FormalSum] {
        &self.basis
    }

    pub fn catalog(&self) -> &DiagramCatalog {
        &self.catalog
    }

    /// Rank of the relation matrix (for cross-checking against an
    /// independent elimination).
    pub fn relation_rank(&self) -> usize {
        self.relation_rank
    }

    /// Coordinates of `s` in the computed basis; `s - Σ coords·basis` lies
    /// in the relation lattice. Linear in `s` (torsion coordinates add
    /// modulo their factor).
    pub fn reduce(&self, s: &FormalSum) -> Result<Coordinates> {
        let c = self.catalog.classes.len();
        let mut x = vec![BigInt::zero(); c];
        for (d, &coeff) in s.terms() {
            if d.degree() != self.degree {
                return Err(Error::DegreeMismatch(format!(
                    "term of degree {} in a degree-{} reduction",
                    d.degree(),
                    self.degree
                )));
            }
            let idx = self
                .catalog
                .classes
                .binary_search(d)
                .map_err(|_| Error::DegreeMismatch("term is not a catalog class".into()))?;
            x[idx] += coeff;
        }
        let y: Vec<BigInt> = (0..c)
            .map(|j| (0..c).map(|i| &x[i] * &self.v[i][j]).sum())
            .collect();
        let torsion = self
            .torsion_pos
            .iter()
            .zip(&self.moduli)
            .map(|(&p, d)| (y[p].mod_floor(d), d.clone()))
            .collect();
        let free = self.free_pos.iter().map(|&p| y[p].clone()).collect();
        Ok(Coordinates { torsion, free })
    }
}

/// Computes A_k under the default enumeration bound.
pub fn space_structure(k: usize) -> Result<SpaceStructure> {
    space_structure_limited(k, DEFAULT_MAX_DEGREE)
}

/// Computes A_k: Smith normal form of the full relation matrix (one `2Γ`
/// row per reversible catalog class, plus every IHX row).
pub fn space_structure_limited(k: usize, bound: usize) -> Result<SpaceStructure> {
    let catalog = enumerate_degree_limited(k, bound, false)?;
    let c = catalog.classes.len();

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, g) in catalog.classes.iter().enumerate() {
        let (_, _, reversible) = g.automorphism_counts();
        if reversible {
            let mut row = vec![BigInt::zero(); c];
            row[i] = BigInt::from(2);
            rows.push(row);
        }
    }
    for rel in ihx_relations_for(&catalog) {
        rows.push(sum_to_row(&catalog, &rel));
    }

    let Snf {
        diag,
        rank: relation_rank,
        v,
        v_inv,
    } = smith_normal_form(&rows, c);

    // Quotient coordinates y = x·V: position i is Z/d_i for i < r (dropped
    // when d_i = 1) and Z for i >= r.
    let torsion_pos: Vec<usize> = (0..relation_rank)
        .filter(|&i| !diag[i].is_one())
        .collect();
    let free_pos: Vec<usize> = (relation_rank..c).collect();
    let moduli: Vec<BigInt> = torsion_pos.iter().map(|&i| diag[i].clone()).collect();

    let basis = torsion_pos
        .iter()
        .chain(&free_pos)
        .map(|&i| {
            let terms: Vec<(JacobiDiagram, i64)> = catalog
                .classes
                .iter()
                .zip(&v_inv[i])
                .filter(|(_, coeff)| !coeff.is_zero())
                .map(|(d, coeff)| {
                    let c = coeff.to_i64().expect("basis coefficient fits i64");
                    (d.clone(), c)
                })
                .collect();
            as_normalize(&terms)
        })
        .collect();

    let structure = SpaceStructure {
        degree: k,
        rank: c - relation_rank,
        torsion: moduli.clone(),
        basis,
        v,
        relation_rank,
        torsion_pos,
        free_pos,
        moduli,
        catalog,
    };

    // Every relation row must reduce to zero coordinates.
    for row in &rows {
        debug_assert!(row_reduces_to_zero(&structure, row));
    }
    Ok(structure)
}

/// Coefficient row of a formal sum over the catalog's classes.
pub fn sum_to_row(catalog: &DiagramCatalog, s: &FormalSum) -> Vec<BigInt> {
    let mut row = vec![BigInt::zero(); catalog.classes.len()];
    for (d, &coeff) in s.terms() {
        let idx = catalog
            .classes
            .binary_search(d)
            .expect("normalized term is a catalog class");
        row[idx] += coeff;
    }
    row
}

fn row_reduces_to_zero(s: &SpaceStructure, row: &[BigInt]) -> bool {
    let c = s.catalog.classes.len();
    let y: Vec<BigInt> = (0..c)
        .map(|j| (0..c).map(|i| &row[i] * &s.v[i][j]).sum())
        .collect();
    s.torsion_pos
        .iter()
        .zip(&s.moduli)
        .all(|(&p, d)| y[p].mod_floor(d).is_zero())
        && s.free_pos.iter().all(|&p| y[p].is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_space_is_z_on_the_empty_diagram() {
        let s = space_structure(0).unwrap();
        assert_eq!(s.rank(), 1);
        assert!(s.torsion().is_empty());
        assert_eq!(s.basis().len(), 1);
        let empty = JacobiDiagram::empty();
        assert_eq!(s.basis()[0].terms().get(&empty), Some(&1));
    }

    #[test]
    fn as_flip_negates() {
        let theta =
            JacobiDiagram::validate(vec![[0, 1, 2], [3, 4, 5]], vec![(0, 3), (1, 4), (2, 5)])
                .unwrap();
        let flipped = theta.reverse_orientation();
        let sum = as_normalize(&[(theta.clone(), 1), (flipped, 1)]);
        assert!(sum.is_zero());
    }
}
