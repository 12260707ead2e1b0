//! Building LP-surgery data from combinatorial Y-link descriptions, and
//! the machine check that the resulting pairing is the signed identity
//! matrix on catalog classes.
//!
//! A Y-link component carries three leaves. Only its orientation sign,
//! its per-leaf framings mod 2, and the cross-component leaf linking
//! numbers survive into surgery data: the form is the alternating unit
//! form scaled by the sign, and the Rohlin delta is the framing product.
//! The sign convention is calibrated globally by [`verify_fondjac`]
//! producing +1 (not -1) on orientation-matched diagonals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::contract::{ell, Coefficient, Ring};
use crate::diagram::JacobiDiagram;
use crate::enumerate::{representatives_up_to_limited, DEFAULT_MAX_DEGREE};
use crate::error::Error;
use crate::lp::{validate_lp, ComponentLeaf, LPComponent, LPSurgeryData};
use crate::Result;

/// One Y-link component: a global orientation sign and three leaf
/// framings mod 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YComponent {
    pub orientation_sign: i8,
    pub framings: [u8; 3],
}

/// Validated Y-link data; leaf linking is keyed like LP linking,
/// `((ci, li), (cj, lj))` with `ci < cj` and leaf slots in 1..=3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "YLinkFile", into = "YLinkFile")]
pub struct YLinkData {
    components: Vec<YComponent>,
    leaf_linking: BTreeMap<(ComponentLeaf, ComponentLeaf), i64>,
}

impl YLinkData {
    pub fn components(&self) -> &[YComponent] {
        &self.components
    }

    pub fn leaf_linking(&self) -> &BTreeMap<(ComponentLeaf, ComponentLeaf), i64> {
        &self.leaf_linking
    }
}

/// Checks Y-link invariants: signs in {-1, +1}, framings in {0, 1}, leaf
/// slots in 1..=3, linking across distinct ordered components only.
pub fn validate_ylink(
    components: Vec<YComponent>,
    leaf_linking: BTreeMap<(ComponentLeaf, ComponentLeaf), i64>,
) -> Result<YLinkData> {
    for (i, c) in components.iter().enumerate() {
        if c.orientation_sign != 1 && c.orientation_sign != -1 {
            return Err(Error::IndexRange(format!(
                "component {i}: orientation_sign must be +1 or -1, got {}",
                c.orientation_sign
            )));
        }
        if c.framings.iter().any(|&f| f > 1) {
            return Err(Error::IndexRange(format!(
                "component {i}: framings are mod 2 (0 or 1)"
            )));
        }
    }
    let n = components.len();
    let mut kept = BTreeMap::new();
    for (((ci, li), (cj, lj)), value) in leaf_linking {
        if ci >= n || cj >= n {
            return Err(Error::IndexRange(format!(
                "leaf linking names component {} of {n}",
                ci.max(cj)
            )));
        }
        if ci == cj {
            return Err(Error::SelfLink(ci));
        }
        if ci > cj {
            return Err(Error::IndexRange(format!(
                "leaf linking key components must be ordered, got ({ci},{cj})"
            )));
        }
        if !(1..=3).contains(&li) || !(1..=3).contains(&lj) {
            return Err(Error::IndexRange(format!(
                "leaf slot outside 1..=3 in (({ci},{li}),({cj},{lj}))"
            )));
        }
        if value != 0 {
            kept.insert(((ci, li), (cj, lj)), value);
        }
    }
    Ok(YLinkData {
        components,
        leaf_linking: kept,
    })
}

/// Surgery data of a Y-link: per component the genus-3 alternating unit
/// form scaled by the orientation sign, Rohlin delta the framing product
/// mod 2; linking copied across.
pub fn lp_from_ylink(y: &YLinkData) -> LPSurgeryData {
    let components = y
        .components
        .iter()
        .map(|c| LPComponent {
            genus: 3,
            triple_form: BTreeMap::from([((1, 2, 3), i64::from(c.orientation_sign))]),
            rohlin_delta: c.framings[0] & c.framings[1] & c.framings[2],
        })
        .collect();
    validate_lp(components, y.leaf_linking.clone()).expect("validated Y-link maps to valid data")
}

/// The n-component surgery datum attached to a degree-k diagram with
/// 2k <= n: one component per vertex (alternating unit form scaled by the
/// vertex-orientation sign, delta 0), leaf slots numbered by ascending
/// half-edge id, unit linking exactly across each diagram edge, plus
/// n - 2k spectator components (positive unit form, delta 1, no linking).
pub fn lp_from_jacobi(gamma_y: &JacobiDiagram, n: usize) -> Result<LPSurgeryData> {
    let vcount = gamma_y.vertex_count();
    if n < vcount {
        return Err(Error::Arity {
            expected: vcount,
            got: n,
        });
    }
    let mut components: Vec<LPComponent> = gamma_y
        .triples()
        .iter()
        .enumerate()
        .map(|(v, _)| LPComponent {
            genus: 3,
            triple_form: BTreeMap::from([(
                (1, 2, 3),
                i64::from(gamma_y.vertex_orientation_sign(v)),
            )]),
            rohlin_delta: 0,
        })
        .collect();
    for _ in vcount..n {
        components.push(LPComponent {
            genus: 3,
            triple_form: BTreeMap::from([((1, 2, 3), 1)]),
            rohlin_delta: 1,
        });
    }

    let vertex_of = gamma_y.vertex_of_table();
    let slot_of = |h: usize| -> usize {
        let mut fiber = gamma_y.triples()[vertex_of[h]];
        fiber.sort_unstable();
        1 + fiber.iter().position(|&x| x == h).expect("half-edge in fiber")
    };
    let mut linking = BTreeMap::new();
    for &(a, b) in gamma_y.edges() {
        let sa = (vertex_of[a], slot_of(a));
        let sb = (vertex_of[b], slot_of(b));
        let key = if sa.0 < sb.0 { (sa, sb) } else { (sb, sa) };
        let prev = linking.insert(key, 1);
        debug_assert!(prev.is_none(), "edges use distinct leaf pairs");
    }
    validate_lp(components, linking)
}

/// One checked pairing entry: computed coefficient against the predicted
/// one.
#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub ring: Ring,
    pub value: i64,
    pub expected_ring: Ring,
    pub expected_value: i64,
    pub ok: bool,
}

/// The full pairing matrix over catalog classes of degree <= max_degree:
/// rows index the built surgery datum's diagram, columns the contracted
/// diagram.
#[derive(Clone, Debug, Serialize)]
pub struct FondjacReport {
    pub classes: Vec<JacobiDiagram>,
    pub entries: Vec<Vec<EntryReport>>,
    pub pass: bool,
}

/// Checks that the pairing of built data against catalog classes is the
/// identity matrix: ell(lp_from_jacobi(G, n), H) is 1 when G = H and 0
/// otherwise, with n = max(2 deg G, 2 deg H) + n_extra, in the ring that
/// the component count and reversibility dictate.
pub fn verify_fondjac(max_degree: usize, n_extra: usize) -> Result<FondjacReport> {
    verify_fondjac_limited(max_degree, n_extra, DEFAULT_MAX_DEGREE)
}

/// As [`verify_fondjac`] with an explicit enumeration bound.
pub fn verify_fondjac_limited(
    max_degree: usize,
    n_extra: usize,
    bound: usize,
) -> Result<FondjacReport> {
    let classes: Vec<JacobiDiagram> = representatives_up_to_limited(2 * max_degree, bound)?
        .into_iter()
        .flat_map(|c| c.classes)
        .collect();

    let mut pass = true;
    let mut entries = Vec::with_capacity(classes.len());
    for gy in &classes {
        let mut row = Vec::with_capacity(classes.len());
        for g in &classes {
            let n = gy.vertex_count().max(g.vertex_count()) + n_extra;
            let d = lp_from_jacobi(gy, n)?;
            let got = ell(&d, g)?;
            let expected = expected_entry(g, gy == g, n);
            let ok = got == expected;
            pass &= ok;
            row.push(EntryReport {
                ring: got.ring,
                value: got.value,
                expected_ring: expected.ring,
                expected_value: expected.value,
                ok,
            });
        }
        entries.push(row);
    }
    Ok(FondjacReport {
        classes,
        entries,
        pass,
    })
}

fn expected_entry(g: &JacobiDiagram, diagonal: bool, n: usize) -> Coefficient {
    let value = i64::from(diagonal);
    if g.vertex_count() == n {
        let (_, _, reversible) = g.automorphism_counts();
        if reversible {
            Coefficient::mod2(value)
        } else {
            Coefficient::integer(value)
        }
    } else {
        Coefficient::mod2(value)
    }
}

#[derive(Serialize, Deserialize)]
struct YComponentFile {
    orientation_sign: i8,
    framings: [u8; 3],
}

#[derive(Serialize, Deserialize)]
struct YLinkEntry {
    ci: usize,
    li: usize,
    cj: usize,
    lj: usize,
    value: i64,
}

/// On-disk JSON shape: 1-based component indices, `ci < cj`.
#[derive(Serialize, Deserialize)]
struct YLinkFile {
    components: Vec<YComponentFile>,
    leaf_linking: Vec<YLinkEntry>,
}

impl TryFrom<YLinkFile> for YLinkData {
    type Error = Error;

    fn try_from(file: YLinkFile) -> Result<Self> {
        let components = file
            .components
            .into_iter()
            .map(|c| YComponent {
                orientation_sign: c.orientation_sign,
                framings: c.framings,
            })
            .collect();
        let mut leaf_linking = BTreeMap::new();
        for e in file.leaf_linking {
            if e.ci < 1 || e.cj < 1 {
                return Err(Error::IndexRange(
                    "leaf linking component indices are 1-based".into(),
                ));
            }
            let key = ((e.ci - 1, e.li), (e.cj - 1, e.lj));
            if leaf_linking.insert(key, e.value).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate leaf linking entry (({},{}),({},{}))",
                    e.ci, e.li, e.cj, e.lj
                )));
            }
        }
        validate_ylink(components, leaf_linking)
    }
}

impl From<YLinkData> for YLinkFile {
    fn from(y: YLinkData) -> Self {
        YLinkFile {
            components: y
                .components
                .iter()
                .map(|c| YComponentFile {
                    orientation_sign: c.orientation_sign,
                    framings: c.framings,
                })
                .collect(),
            leaf_linking: y
                .leaf_linking
                .iter()
                .map(|(&((ci, li), (cj, lj)), &value)| YLinkEntry {
                    ci: ci + 1,
                    li,
                    cj: cj + 1,
                    lj,
                    value,
                })
                .collect(),
        }
    }
}
