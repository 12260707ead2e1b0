//! Words in the free group on three generators, with free cancellation.
//!
//! Letters are nonzero `i8` values: `1, 2, 3` stand for the generators
//! (α, β, γ) and a negative value for the inverse of its absolute value.
//! The commutator convention is `[x, y] = x y x⁻¹ y⁻¹`; with the other
//! convention the identity checked below does not cancel, so the choice is
//! pinned here and exercised by tests.

/// A generator or its inverse; never zero.
pub type Letter = i8;

pub const ALPHA: Letter = 1;
pub const BETA: Letter = 2;
pub const GAMMA: Letter = 3;

/// Freely reduced form: iterated cancellation of adjacent `x x⁻¹` pairs.
/// One stack pass reaches the (unique) reduced word.
pub fn reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        debug_assert!(l != 0, "letters are nonzero");
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|&l| -l).collect()
}

pub fn concat(words: &[&[Letter]]) -> Vec<Letter> {
    words.iter().flat_map(|w| w.iter().copied()).collect()
}

/// `[x, y] = x y x⁻¹ y⁻¹`.
pub fn commutator(x: &[Letter], y: &[Letter]) -> Vec<Letter> {
    concat(&[x, y, &inverse(x), &inverse(y)])
}

/// `x y x⁻¹`.
pub fn conjugate(by: &[Letter], w: &[Letter]) -> Vec<Letter> {
    concat(&[by, w, &inverse(by)])
}

/// The word `[βαβ⁻¹, [γ,β]] · [γβγ⁻¹, [α,γ]] · [αγα⁻¹, [β,α]]`, unreduced.
pub fn identity_word() -> Vec<Letter> {
    let a = [ALPHA];
    let b = [BETA];
    let g = [GAMMA];
    let t1 = commutator(&conjugate(&b, &a), &commutator(&g, &b));
    let t2 = commutator(&conjugate(&g, &b), &commutator(&a, &g));
    let t3 = commutator(&conjugate(&a, &g), &commutator(&b, &a));
    concat(&[&t1, &t2, &t3])
}

/// Length of the freely reduced identity word (0 exactly when it holds).
pub fn identity_reduced_length() -> usize {
    reduce(&identity_word()).len()
}

/// `true` iff the identity word freely reduces to the empty word.
pub fn free_group_identity_check() -> bool {
    identity_reduced_length() == 0
}
