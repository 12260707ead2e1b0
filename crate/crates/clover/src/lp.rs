//! Pure-data model of an n-component LP-surgery: per-component genus,
//! antisymmetric trilinear intersection form, Rohlin delta, and the
//! cross-component linking blocks.
//!
//! Everything is expressed in a chosen basis of each component's Lagrangian
//! with the dual basis on the other side; realizability by actual manifolds
//! is out of scope. Component indices are 0-based in the API; leaf/basis
//! indices are 1-based (matching the JSON format, which is 1-based on both).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// A basis slot of one component: `(component, leaf)` with `leaf >= 1`.
pub type ComponentLeaf = (usize, usize);

/// One surgery component: genus, trilinear form on strictly increasing
/// basis triples, and the Rohlin invariant difference mod 2.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LPComponent {
    pub genus: usize,
    /// Keys `(p, q, r)` with `1 <= p < q < r <= genus`; no zero values.
    pub triple_form: BTreeMap<(usize, usize, usize), i64>,
    pub rohlin_delta: u8,
}

/// Validated LP-surgery data. Linking is stored once per unordered pair
/// of slots, keyed `((ci, pi), (cj, qj))` with `ci < cj`, and read
/// symmetrically through [`LPSurgeryData::linking_value`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LPFile", into = "LPFile")]
pub struct LPSurgeryData {
    components: Vec<LPComponent>,
    linking: BTreeMap<(ComponentLeaf, ComponentLeaf), i64>,
}

impl LPSurgeryData {
    pub fn components(&self) -> &[LPComponent] {
        &self.components
    }

    /// Component count n.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn linking(&self) -> &BTreeMap<(ComponentLeaf, ComponentLeaf), i64> {
        &self.linking
    }

    /// Symmetric linking lookup; absent pairs are 0. Same-component slots
    /// never carry linking data.
    pub fn linking_value(&self, a: ComponentLeaf, b: ComponentLeaf) -> i64 {
        debug_assert_ne!(a.0, b.0, "linking is only defined across components");
        let key = if a.0 < b.0 { (a, b) } else { (b, a) };
        self.linking.get(&key).copied().unwrap_or(0)
    }
}

/// Checks every structural invariant and normalizes (drops zero values):
/// triples strictly increasing and within genus, deltas in {0,1}, linking
/// keys ordered across distinct in-range components.
pub fn validate_lp(
    components: Vec<LPComponent>,
    linking: BTreeMap<(ComponentLeaf, ComponentLeaf), i64>,
) -> Result<LPSurgeryData> {
    let mut checked = Vec::with_capacity(components.len());
    for (i, mut c) in components.into_iter().enumerate() {
        if c.rohlin_delta > 1 {
            return Err(Error::IndexRange(format!(
                "component {i}: rohlin_delta must be 0 or 1, got {}",
                c.rohlin_delta
            )));
        }
        for &(p, q, r) in c.triple_form.keys() {
            if !(p < q && q < r) {
                return Err(Error::BadTriple(format!(
                    "component {i}: triple ({p},{q},{r}) is not strictly increasing"
                )));
            }
            if p < 1 || r > c.genus {
                return Err(Error::IndexRange(format!(
                    "component {i}: triple ({p},{q},{r}) outside 1..={}",
                    c.genus
                )));
            }
        }
        c.triple_form.retain(|_, v| *v != 0);
        checked.push(c);
    }

    let n = checked.len();
    let mut kept = BTreeMap::new();
    for (((ci, pi), (cj, qj)), value) in linking {
        if ci >= n || cj >= n {
            return Err(Error::IndexRange(format!(
                "linking entry names component {} of {n}",
                ci.max(cj)
            )));
        }
        if ci == cj {
            return Err(Error::SelfLink(ci));
        }
        if ci > cj {
            return Err(Error::IndexRange(format!(
                "linking key components must be ordered, got ({ci},{cj})"
            )));
        }
        if pi < 1 || pi > checked[ci].genus || qj < 1 || qj > checked[cj].genus {
            return Err(Error::IndexRange(format!(
                "linking entry (({ci},{pi}),({cj},{qj})) has a leaf outside its genus"
            )));
        }
        if value != 0 {
            kept.insert(((ci, pi), (cj, qj)), value);
        }
    }

    Ok(LPSurgeryData {
        components: checked,
        linking: kept,
    })
}

/// Alternating evaluation of the trilinear form at arbitrary-order indices:
/// the sign of the sorting permutation times the stored coefficient, 0 on
/// any repeated index.
pub fn triple_eval(c: &LPComponent, p: usize, q: usize, r: usize) -> Result<i64> {
    for &i in &[p, q, r] {
        if i < 1 || i > c.genus {
            return Err(Error::IndexRange(format!(
                "form index {i} outside 1..={}",
                c.genus
            )));
        }
    }
    if p == q || q == r || p == r {
        return Ok(0);
    }
    let mut s = [p, q, r];
    let mut sign = 1i64;
    // Three elements: bubble sort, one transposition per swap.
    for i in 0..2 {
        for j in 0..2 - i {
            if s[j] > s[j + 1] {
                s.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    Ok(sign * c.triple_form.get(&(s[0], s[1], s[2])).copied().unwrap_or(0))
}

/// The sub-surgery on the component subset `J` (0-based, strictly
/// increasing after sorting): components re-indexed in increasing original
/// order, linking restricted accordingly.
pub fn restrict(d: &LPSurgeryData, j: &[usize]) -> Result<LPSurgeryData> {
    let mut subset = j.to_vec();
    subset.sort_unstable();
    if subset.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::IndexRange("repeated index in subset".into()));
    }
    if subset.last().is_some_and(|&m| m >= d.len()) {
        return Err(Error::IndexRange(format!(
            "subset names component {} of {}",
            subset.last().unwrap(),
            d.len()
        )));
    }
    let mut new_index = vec![usize::MAX; d.len()];
    for (new, &old) in subset.iter().enumerate() {
        new_index[old] = new;
    }
    let components = subset.iter().map(|&i| d.components[i].clone()).collect();
    let linking = d
        .linking
        .iter()
        .filter(|((a, b), _)| new_index[a.0] != usize::MAX && new_index[b.0] != usize::MAX)
        .map(|(&((ci, pi), (cj, qj)), &v)| (((new_index[ci], pi), (new_index[cj], qj)), v))
        .collect();
    Ok(LPSurgeryData {
        components,
        linking,
    })
}

/// Splits component `i` of `d` along a sub-form: the first result carries
/// `(form', delta')` there, the second the entrywise difference
/// `(form - form', delta - delta' mod 2)`; linking is unchanged in both.
pub fn split_component(
    d: &LPSurgeryData,
    i: usize,
    form_prime: &BTreeMap<(usize, usize, usize), i64>,
    delta_prime: u8,
) -> Result<(LPSurgeryData, LPSurgeryData)> {
    if i >= d.len() {
        return Err(Error::IndexRange(format!(
            "split names component {i} of {}",
            d.len()
        )));
    }
    let original = &d.components[i];
    let mut difference = original.triple_form.clone();
    for (&key, &v) in form_prime {
        let entry = difference.entry(key).or_insert(0);
        *entry = entry.checked_sub(v).expect("form coefficient overflow");
        if *entry == 0 {
            difference.remove(&key);
        }
    }

    let with_component = |form: BTreeMap<(usize, usize, usize), i64>, delta: u8| {
        let mut components = d.components.clone();
        components[i] = LPComponent {
            genus: original.genus,
            triple_form: form,
            rohlin_delta: delta,
        };
        validate_lp(components, d.linking.clone())
    };
    let d1 = with_component(form_prime.clone(), delta_prime)?;
    let d2 = with_component(difference, (original.rohlin_delta + delta_prime) % 2)?;
    Ok((d1, d2))
}

/// Parses a surgery document, keeping validation error codes distinct
/// from JSON syntax errors (which map to `PARSE`).
pub fn parse_lp(text: &str) -> Result<LPSurgeryData> {
    let file: LPFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    LPSurgeryData::try_from(file)
}

#[derive(Serialize, Deserialize)]
struct TripleEntry {
    p: usize,
    q: usize,
    r: usize,
    value: i64,
}

#[derive(Serialize, Deserialize)]
struct ComponentFile {
    genus: usize,
    triple_form: Vec<TripleEntry>,
    rohlin_delta: u8,
}

#[derive(Serialize, Deserialize)]
struct LinkEntry {
    ci: usize,
    pi: usize,
    cj: usize,
    qj: usize,
    value: i64,
}

/// On-disk JSON shape: 1-based component and leaf indices, `ci < cj`.
#[derive(Serialize, Deserialize)]
struct LPFile {
    components: Vec<ComponentFile>,
    linking: Vec<LinkEntry>,
}

impl TryFrom<LPFile> for LPSurgeryData {
    type Error = Error;

    fn try_from(file: LPFile) -> Result<Self> {
        let mut components = Vec::with_capacity(file.components.len());
        for (i, c) in file.components.into_iter().enumerate() {
            let mut triple_form = BTreeMap::new();
            for e in c.triple_form {
                if triple_form.insert((e.p, e.q, e.r), e.value).is_some() {
                    return Err(Error::Parse(format!(
                        "component {i}: duplicate triple ({},{},{})",
                        e.p, e.q, e.r
                    )));
                }
            }
            components.push(LPComponent {
                genus: c.genus,
                triple_form,
                rohlin_delta: c.rohlin_delta,
            });
        }
        let mut linking = BTreeMap::new();
        for e in file.linking {
            if e.ci < 1 || e.cj < 1 {
                return Err(Error::IndexRange(
                    "linking component indices are 1-based".into(),
                ));
            }
            let key = ((e.ci - 1, e.pi), (e.cj - 1, e.qj));
            if linking.insert(key, e.value).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate linking entry (({},{}),({},{}))",
                    e.ci, e.pi, e.cj, e.qj
                )));
            }
        }
        validate_lp(components, linking)
    }
}

impl From<LPSurgeryData> for LPFile {
    fn from(d: LPSurgeryData) -> Self {
        LPFile {
            components: d
                .components
                .iter()
                .map(|c| ComponentFile {
                    genus: c.genus,
                    triple_form: c
                        .triple_form
                        .iter()
                        .map(|(&(p, q, r), &value)| TripleEntry { p, q, r, value })
                        .collect(),
                    rohlin_delta: c.rohlin_delta,
                })
                .collect(),
            linking: d
                .linking
                .iter()
                .map(|(&((ci, pi), (cj, qj)), &value)| LinkEntry {
                    ci: ci + 1,
                    pi,
                    cj: cj + 1,
                    qj,
                    value,
                })
                .collect(),
        }
    }
}
