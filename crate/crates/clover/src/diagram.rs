//! Oriented Jacobi diagrams: trivalent multigraphs without simple loops,
//! stored as one ordered half-edge triple per vertex (the vertex-orientation)
//! plus a perfect matching on half-edges (the edges).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// The six permutations of three positions.
const PERM3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// An oriented Jacobi diagram of degree `vertex_count / 2`.
///
/// Half-edge identifiers are dense in `0..3V`. Each vertex stores its three
/// half-edges as an ordered triple read cyclically; the triple is kept
/// rotated with its smallest identifier first, which preserves the cyclic
/// order. Swapping two entries of one triple reverses that vertex's
/// orientation (the AS move). Edges are stored as `(lo, hi)` pairs in
/// ascending order. Construction goes through [`JacobiDiagram::validate`],
/// so every value of this type satisfies the diagram invariants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "DiagramFile", into = "DiagramFile")]
pub struct JacobiDiagram {
    triples: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
}

/// On-disk diagram document:
/// `{"vertices": V, "half_edges": [[h,h,h],...], "edges": [[h,h],...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagramFile {
    pub vertices: usize,
    pub half_edges: Vec<[usize; 3]>,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<DiagramFile> for JacobiDiagram {
    type Error = Error;

    fn try_from(f: DiagramFile) -> Result<Self> {
        if f.vertices != f.half_edges.len() {
            return Err(Error::Parse(format!(
                "vertices field is {} but {} half-edge triples are given",
                f.vertices,
                f.half_edges.len()
            )));
        }
        JacobiDiagram::validate(f.half_edges, f.edges.iter().map(|&[a, b]| (a, b)).collect())
    }
}

impl From<JacobiDiagram> for DiagramFile {
    fn from(d: JacobiDiagram) -> Self {
        DiagramFile {
            vertices: d.vertex_count(),
            half_edges: d.triples.clone(),
            edges: d.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// Parses a diagram document, keeping validation error codes distinct
/// from JSON syntax errors (which map to `PARSE`).
pub fn parse_diagram(text: &str) -> Result<JacobiDiagram> {
    let file: DiagramFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    JacobiDiagram::try_from(file)
}

/// A half-edge bijection between two diagrams, together with its sign.
///
/// `map[h]` is the image of half-edge `h`. The map sends vertex fibers to
/// vertex fibers and edge pairs to edge pairs. The sign is `+1` exactly when
/// the pushed-forward vertex-orientation differs from the target's at an
/// even number of vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedIso {
    pub map: Vec<usize>,
    pub sign: i8,
}

impl SignedIso {
    /// The induced map on vertices: `vertex_map[v]` is the target vertex
    /// receiving the fiber of `v`.
    pub fn vertex_map(&self, source: &JacobiDiagram, target: &JacobiDiagram) -> Vec<usize> {
        let target_vertex = target.vertex_of_table();
        source
            .triples()
            .iter()
            .map(|t| target_vertex[self.map[t[0]]])
            .collect()
    }

    /// Composition `then ∘ self`; signs multiply.
    pub fn compose(&self, then: &SignedIso) -> SignedIso {
        SignedIso {
            map: self.map.iter().map(|&h| then.map[h]).collect(),
            sign: self.sign * then.sign,
        }
    }
}

/// `true` when `b` is a cyclic rotation of `a`.
fn is_rotation(a: [usize; 3], b: [usize; 3]) -> bool {
    b == a || b == [a[1], a[2], a[0]] || b == [a[2], a[0], a[1]]
}

/// Rotate a triple so its smallest entry comes first (cyclic order intact).
fn rotate_min_first(t: [usize; 3]) -> [usize; 3] {
    let m = (0..3).min_by_key(|&i| t[i]).expect("nonempty");
    [t[m], t[(m + 1) % 3], t[(m + 2) % 3]]
}

impl JacobiDiagram {
    /// The empty diagram (degree 0).
    pub fn empty() -> Self {
        JacobiDiagram {
            triples: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Checks the diagram invariants and normalizes the representation
    /// (triples rotated smallest-first, edges as ascending sorted pairs).
    ///
    /// Errors: `ODD_VERTEX_COUNT`, `DANGLING` (an identifier missing,
    /// repeated, or out of range), `LOOP` (a pairing pair inside one
    /// vertex).
    pub fn validate(triples: Vec<[usize; 3]>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let v = triples.len();
        if !v.is_multiple_of(2) {
            return Err(Error::OddVertexCount(v));
        }
        let h = 3 * v;
        let mut vertex_of = vec![usize::MAX; h];
        for (vi, t) in triples.iter().enumerate() {
            for &id in t {
                if id >= h {
                    return Err(Error::Dangling(format!(
                        "half-edge {id} out of range 0..{h}"
                    )));
                }
                if vertex_of[id] != usize::MAX {
                    return Err(Error::Dangling(format!(
                        "half-edge {id} appears in two vertex triples"
                    )));
                }
                vertex_of[id] = vi;
            }
        }
        if edges.len() != h / 2 {
            return Err(Error::Dangling(format!(
                "{} pairing pairs given, {} required",
                edges.len(),
                h / 2
            )));
        }
        let mut paired = vec![false; h];
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a >= h || b >= h {
                return Err(Error::Dangling(format!(
                    "pairing ({a}, {b}) mentions a half-edge out of range 0..{h}"
                )));
            }
            if a == b || vertex_of[a] == vertex_of[b] {
                return Err(Error::Loop(a, b));
            }
            if paired[a] || paired[b] {
                return Err(Error::Dangling(format!(
                    "pairing ({a}, {b}) reuses an already matched half-edge"
                )));
            }
            paired[a] = true;
            paired[b] = true;
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        Ok(JacobiDiagram {
            triples: triples.into_iter().map(rotate_min_first).collect(),
            edges: norm,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.triples.len()
    }

    /// Degree = half the vertex count.
    pub fn degree(&self) -> usize {
        self.triples.len() / 2
    }

    pub fn half_edge_count(&self) -> usize {
        3 * self.triples.len()
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `vertex_of[h]` = vertex whose triple contains `h`.
    pub fn vertex_of_table(&self) -> Vec<usize> {
        let mut t = vec![usize::MAX; self.half_edge_count()];
        for (vi, tr) in self.triples.iter().enumerate() {
            for &id in tr {
                t[id] = vi;
            }
        }
        t
    }

    /// `partner[h]` = the half-edge paired with `h`.
    pub fn partner_table(&self) -> Vec<usize> {
        let mut t = vec![usize::MAX; self.half_edge_count()];
        for &(a, b) in &self.edges {
            t[a] = b;
            t[b] = a;
        }
        t
    }

    /// Vertex adjacency with edge multiplicities.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let v = self.vertex_count();
        let vertex_of = self.vertex_of_table();
        let mut adj = vec![vec![0u8; v]; v];
        for &(a, b) in &self.edges {
            let (x, y) = (vertex_of[a], vertex_of[b]);
            adj[x][y] += 1;
            adj[y][x] += 1;
        }
        adj
    }

    /// Connectivity of the underlying multigraph (the empty diagram counts
    /// as connected).
    pub fn is_connected(&self) -> bool {
        let v = self.vertex_count();
        if v == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; v];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for y in 0..v {
                if adj[x][y] > 0 && !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        reached == v
    }

    /// The same diagram with the orientation reversed at exactly one vertex
    /// (the AS move). The empty diagram is returned unchanged.
    pub fn reverse_orientation(&self) -> Self {
        let mut d = self.clone();
        if let Some(t) = d.triples.first_mut() {
            t.swap(1, 2);
        }
        d
    }

    /// Per-vertex sign of the stored triple against ascending order:
    /// `+1` when the stored triple is an even permutation of its sorted
    /// ids, `-1` otherwise.
    pub fn vertex_orientation_sign(&self, v: usize) -> i8 {
        let t = self.triples[v];
        let mut s = t;
        s.sort_unstable();
        if is_rotation(s, t) {
            1
        } else {
            -1
        }
    }

    /// All vertex-fiber- and edge-fiber-respecting bijections onto `other`,
    /// each with its orientation sign. Empty exactly when the diagrams are
    /// not isomorphic as unoriented diagrams.
    pub fn isomorphisms(&self, other: &JacobiDiagram) -> Vec<SignedIso> {
        let mut out = Vec::new();
        self.search_isos(other, &mut |iso| {
            out.push(iso);
            true
        });
        out
    }

    /// Unoriented isomorphism test (stops at the first bijection found).
    pub fn isomorphic(&self, other: &JacobiDiagram) -> bool {
        let mut found = false;
        self.search_isos(other, &mut |_| {
            found = true;
            false
        });
        found
    }

    /// `(|Aut|, |Aut_V|, reversible)`: automorphism count, count of
    /// automorphisms fixing every vertex, and whether some automorphism has
    /// sign -1 (which forces the diagram to equal its own reversal).
    ///
    /// Every vertex-fixing automorphism has sign +1; this is asserted.
    pub fn automorphism_counts(&self) -> (usize, usize, bool) {
        let isos = self.isomorphisms(self);
        let vertex_of = self.vertex_of_table();
        let mut aut_v = 0;
        let mut reversible = false;
        for iso in &isos {
            let fixes_vertices = self
                .triples
                .iter()
                .enumerate()
                .all(|(v, t)| vertex_of[iso.map[t[0]]] == v);
            if fixes_vertices {
                assert!(iso.sign == 1, "vertex-fixing automorphism with sign -1");
                aut_v += 1;
            }
            if iso.sign == -1 {
                reversible = true;
            }
        }
        (isos.len(), aut_v, reversible)
    }

    /// Backtracking search over vertex bijections, then over per-fiber
    /// half-edge bijections. `emit` returns `false` to stop the search.
    fn search_isos(&self, other: &JacobiDiagram, emit: &mut dyn FnMut(SignedIso) -> bool) {
        let v = self.vertex_count();
        if v != other.vertex_count() {
            return;
        }
        if v == 0 {
            emit(SignedIso {
                map: Vec::new(),
                sign: 1,
            });
            return;
        }
        let adj1 = self.adjacency();
        let adj2 = other.adjacency();
        let (color1, color2) = match joint_refinement(&adj1, &adj2) {
            Some(c) => c,
            None => return,
        };

        // Order the source vertices so each one (after the first of its
        // component) touches an already placed vertex: edge constraints then
        // bind as early as possible.
        let order = connected_order(&adj1);

        let mut psi = vec![usize::MAX; v];
        let mut used = vec![false; v];
        self.vertex_backtrack(
            other, &adj1, &adj2, &color1, &color2, &order, 0, &mut psi, &mut used, emit,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn vertex_backtrack(
        &self,
        other: &JacobiDiagram,
        adj1: &[Vec<u8>],
        adj2: &[Vec<u8>],
        color1: &[usize],
        color2: &[usize],
        order: &[usize],
        depth: usize,
        psi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        emit: &mut dyn FnMut(SignedIso) -> bool,
    ) -> bool {
        if depth == order.len() {
            return self.extend_half_edges(other, order, psi, emit);
        }
        let s = order[depth];
        for t in 0..other.vertex_count() {
            if used[t] || color2[t] != color1[s] {
                continue;
            }
            if order[..depth]
                .iter()
                .any(|&p| adj1[s][p] != adj2[t][psi[p]])
            {
                continue;
            }
            psi[s] = t;
            used[t] = true;
            let keep_going = self.vertex_backtrack(
                other,
                adj1,
                adj2,
                color1,
                color2,
                order,
                depth + 1,
                psi,
                used,
                emit,
            );
            psi[s] = usize::MAX;
            used[t] = false;
            if !keep_going {
                return false;
            }
        }
        true
    }

    /// Extends a complete vertex bijection to all compatible half-edge
    /// bijections (six candidates per vertex, pruned by the pairing
    /// constraint) and emits each with its sign.
    fn extend_half_edges(
        &self,
        other: &JacobiDiagram,
        order: &[usize],
        psi: &[usize],
        emit: &mut dyn FnMut(SignedIso) -> bool,
    ) -> bool {
        let partner1 = self.partner_table();
        let partner2 = other.partner_table();
        let mut map = vec![usize::MAX; self.half_edge_count()];

        #[allow(clippy::too_many_arguments)]
        fn rec(
            d: &JacobiDiagram,
            other: &JacobiDiagram,
            order: &[usize],
            psi: &[usize],
            partner1: &[usize],
            partner2: &[usize],
            map: &mut Vec<usize>,
            depth: usize,
            emit: &mut dyn FnMut(SignedIso) -> bool,
        ) -> bool {
            if depth == order.len() {
                // Sign: count vertices where the pushed triple fails to be a
                // cyclic rotation of the target's stored triple.
                let flips = order
                    .iter()
                    .filter(|&&v| {
                        let t = d.triples()[v];
                        let pushed = [map[t[0]], map[t[1]], map[t[2]]];
                        !is_rotation(pushed, other.triples()[psi[v]])
                    })
                    .count();
                return emit(SignedIso {
                    map: map.clone(),
                    sign: if flips % 2 == 0 { 1 } else { -1 },
                });
            }
            let s = order[depth];
            let src = d.triples()[s];
            let dst = other.triples()[psi[s]];
            'perm: for perm in PERM3 {
                for i in 0..3 {
                    let img = dst[perm[i]];
                    let p = partner1[src[i]];
                    // The pairing constraint binds once both endpoints of an
                    // edge have images.
                    if map[p] != usize::MAX && partner2[img] != map[p] {
                        continue 'perm;
                    }
                }
                for i in 0..3 {
                    map[src[i]] = dst[perm[i]];
                }
                let keep_going = rec(
                    d, other, order, psi, partner1, partner2, map, depth + 1, emit,
                );
                for i in 0..3 {
                    map[src[i]] = usize::MAX;
                }
                if !keep_going {
                    return false;
                }
            }
            true
        }

        rec(
            self, other, order, psi, &partner1, &partner2, &mut map, 0, emit,
        )
    }

    /// Canonical representative of the unoriented isomorphism class,
    /// together with the sign relating this diagram's orientation to the
    /// canonical one.
    ///
    /// The canonical diagram relabels half-edges so vertex `i` owns
    /// `3i, 3i+1, 3i+2` (triples stored exactly in that order); among all
    /// relabelings of both orientation classes, the lexicographically least
    /// partner array wins. The sign is `+1` when this diagram's own
    /// orientation class attains the minimum (always true for reversible
    /// diagrams), `-1` otherwise. Idempotent: the canonical diagram maps to
    /// itself with sign `+1`.
    ///
    /// Connected pieces are canonicalized independently and concatenated in
    /// ascending partner-array order: any labeling interleaving two pieces
    /// defers some partner to a later block and is lexicographically
    /// larger, so the blockwise minimum is the global one.
    pub fn canonical_form(&self) -> (JacobiDiagram, i8) {
        if self.vertex_count() == 0 {
            return (self.clone(), 1);
        }
        let mut pieces: Vec<(Vec<usize>, [bool; 2])> = self
            .connected_pieces()
            .iter()
            .map(|p| p.canonical_connected())
            .collect();
        pieces.sort();

        let mut parities = [true, false];
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut offset = 0usize;
        for (partner, attained) in &pieces {
            for (h, &p) in partner.iter().enumerate() {
                if h < p {
                    edges.push((offset + h, offset + p));
                }
            }
            offset += partner.len();
            parities = [
                (parities[0] && attained[0]) || (parities[1] && attained[1]),
                (parities[0] && attained[1]) || (parities[1] && attained[0]),
            ];
        }
        let v = self.vertex_count();
        let triples = (0..v).map(|i| [3 * i, 3 * i + 1, 3 * i + 2]).collect();
        let canonical = JacobiDiagram { triples, edges };
        let sign = if parities[0] { 1 } else { -1 };
        (canonical, sign)
    }

    /// The connected components as standalone diagrams. Half-edge ids are
    /// compressed monotonically, which keeps every stored triple a rotation
    /// of the original: orientations carry over unchanged.
    fn connected_pieces(&self) -> Vec<JacobiDiagram> {
        let v = self.vertex_count();
        let adj = self.adjacency();
        let mut component = vec![usize::MAX; v];
        let mut count = 0;
        for start in 0..v {
            if component[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component[start] = count;
            while let Some(x) = stack.pop() {
                for y in 0..v {
                    if adj[x][y] > 0 && component[y] == usize::MAX {
                        component[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }

        let mut pieces = Vec::with_capacity(count);
        for c in 0..count {
            let vertices: Vec<usize> = (0..v).filter(|&x| component[x] == c).collect();
            let mut old_ids: Vec<usize> = vertices
                .iter()
                .flat_map(|&x| self.triples[x])
                .collect();
            old_ids.sort_unstable();
            let mut new_of_old = vec![usize::MAX; 3 * v];
            for (new, &old) in old_ids.iter().enumerate() {
                new_of_old[old] = new;
            }
            let triples = vertices
                .iter()
                .map(|&x| self.triples[x].map(|h| new_of_old[h]))
                .collect();
            let edges = self
                .edges
                .iter()
                .filter(|&&(a, _)| new_of_old[a] != usize::MAX)
                .map(|&(a, b)| (new_of_old[a], new_of_old[b]))
                .collect();
            pieces.push(JacobiDiagram { triples, edges });
        }
        pieces
    }

    /// Lexicographically least partner array over all relabelings of a
    /// connected diagram, with the set of orientation parities attaining
    /// it.
    fn canonical_connected(&self) -> (Vec<usize>, [bool; 2]) {
        let v = self.vertex_count();
        let partner = self.partner_table();
        let vertex_of = self.vertex_of_table();

        // Six ways to read each vertex triple: three rotations keep the
        // orientation (parity 0), three rotations of the reversal flip it
        // (parity 1).
        let variants: Vec<[([usize; 3], u8); 6]> = self
            .triples
            .iter()
            .map(|&[a, b, c]| {
                [
                    ([a, b, c], 0),
                    ([b, c, a], 0),
                    ([c, a, b], 0),
                    ([a, c, b], 1),
                    ([c, b, a], 1),
                    ([b, a, c], 1),
                ]
            })
            .collect();

        let mut state = CanonState {
            partner: &partner,
            vertex_of: &vertex_of,
            variants: &variants,
            new_of_old: vec![usize::MAX; 3 * v],
            old_of_new: vec![usize::MAX; 3 * v],
            cand: vec![usize::MAX; 3 * v],
            used: vec![false; v],
            best: None,
            best_parities: [false; 2],
        };
        state.rec(0, 0, 0, Cmp::Equal);

        let best = state.best.expect("complete labeling always exists");
        (best, state.best_parities)
    }
}

/// Comparison status of the partial relabeling against the best complete one.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Cmp {
    /// Equal on every position before the frontier: pruning applies.
    Equal,
    /// Already strictly smaller somewhere: explore without pruning.
    Less,
}

/// Backtracking state for [`JacobiDiagram::canonical_form`]: old vertices
/// are placed into slots `0, 1, ...`, each with one of its six triple
/// readings, building the partner array over new identifiers. The
/// lexicographically least complete array wins; the set of flip parities
/// attaining it decides the sign.
struct CanonState<'a> {
    partner: &'a [usize],
    /// Owner vertex of each old half-edge id.
    vertex_of: &'a [usize],
    variants: &'a [[([usize; 3], u8); 6]],
    new_of_old: Vec<usize>,
    old_of_new: Vec<usize>,
    /// Partner array over new ids; `usize::MAX` marks undetermined entries.
    cand: Vec<usize>,
    used: Vec<bool>,
    best: Option<Vec<usize>>,
    best_parities: [bool; 2],
}

impl CanonState<'_> {
    /// `frontier` = first position not yet decided against `best`; all
    /// earlier positions are equal to `best` whenever `cmp == Equal`.
    fn rec(&mut self, slot: usize, parity: u8, frontier: usize, cmp: Cmp) {
        let nv = self.variants.len();
        if slot == nv {
            match &self.best {
                Some(best) => match self.cand.cmp(best) {
                    std::cmp::Ordering::Less => {
                        self.best = Some(self.cand.clone());
                        self.best_parities = [false, false];
                        self.best_parities[parity as usize] = true;
                    }
                    std::cmp::Ordering::Equal => {
                        self.best_parities[parity as usize] = true;
                    }
                    std::cmp::Ordering::Greater => {}
                },
                None => {
                    self.best = Some(self.cand.clone());
                    self.best_parities[parity as usize] = true;
                }
            }
            return;
        }

        // Past slot 0 the vertex choice is forced: the first undetermined
        // partner position must receive the smallest value any completion
        // can give it, so the vertex owning its partner goes next. Placing
        // any other vertex leaves that position for a later slot and a
        // strictly larger entry, which can never reach the minimum.
        let candidates: Vec<usize> = if slot == 0 {
            (0..nv).collect()
        } else {
            let f = self.cand[..3 * slot]
                .iter()
                .position(|&c| c == usize::MAX)
                .expect("connected diagrams keep an open position per slot");
            vec![self.vertex_of[self.partner[self.old_of_new[f]]]]
        };

        // Candidates ordered by the partner entries they determine, so the
        // lexicographic minimum is reached early and pruning bites.
        type Choice = (Vec<(usize, usize)>, usize, usize);
        let mut options: Vec<Choice> = Vec::new();
        for u in candidates {
            debug_assert!(!self.used[u]);
            for vi in 0..6 {
                options.push((self.determined_segment(slot, u, vi), u, vi));
            }
        }
        options.sort();

        for (_, u, vi) in options {
            let undo = self.apply(slot, u, vi);
            let bound = 3 * (slot + 1);
            let mut f = frontier;
            let mut next_cmp = cmp;
            let mut prune = false;
            if cmp == Cmp::Equal {
                if let Some(best) = &self.best {
                    // Resolve positions in order while possible. An
                    // undetermined position below `bound` has its partner in
                    // a later slot, so its eventual value is >= bound.
                    while f < bound {
                        let cv = self.cand[f];
                        if cv == usize::MAX {
                            if best[f] < bound {
                                prune = true;
                            }
                            break;
                        }
                        match cv.cmp(&best[f]) {
                            std::cmp::Ordering::Less => {
                                next_cmp = Cmp::Less;
                                break;
                            }
                            std::cmp::Ordering::Greater => {
                                prune = true;
                                break;
                            }
                            std::cmp::Ordering::Equal => f += 1,
                        }
                    }
                } else {
                    next_cmp = Cmp::Less;
                }
            }
            if !prune {
                let tparity = self.variants[u][vi].1;
                self.rec(slot + 1, parity ^ tparity, f, next_cmp);
            }
            self.unapply(undo);
        }
    }

    /// The `(position, value)` partner entries this assignment would
    /// determine, sorted by position. Used only to order candidates.
    fn determined_segment(&self, slot: usize, u: usize, vi: usize) -> Vec<(usize, usize)> {
        let (triple, _) = self.variants[u][vi];
        let base = 3 * slot;
        let mut seg = Vec::with_capacity(6);
        for (i, &old) in triple.iter().enumerate() {
            // The partner is never inside the same triple (no simple loops),
            // so its new id is known exactly when its vertex was placed.
            let p_new = self.new_of_old[self.partner[old]];
            if p_new != usize::MAX {
                seg.push((base + i, p_new));
                seg.push((p_new, base + i));
            }
        }
        seg.sort_unstable();
        seg
    }

    fn apply(&mut self, slot: usize, u: usize, vi: usize) -> Undo {
        let (triple, _) = self.variants[u][vi];
        let base = 3 * slot;
        for (i, &old) in triple.iter().enumerate() {
            self.new_of_old[old] = base + i;
            self.old_of_new[base + i] = old;
        }
        let mut determined = Vec::with_capacity(6);
        for (i, &old) in triple.iter().enumerate() {
            let p_new = self.new_of_old[self.partner[old]];
            // p_new < base: the partner sits in an earlier slot (loops are
            // excluded, so it is never in the current triple).
            if p_new != usize::MAX {
                self.cand[base + i] = p_new;
                self.cand[p_new] = base + i;
                determined.push(base + i);
                determined.push(p_new);
            }
        }
        self.used[u] = true;
        Undo {
            u,
            slot,
            triple,
            determined,
        }
    }

    fn unapply(&mut self, undo: Undo) {
        for &old in &undo.triple {
            self.new_of_old[old] = usize::MAX;
        }
        for i in 0..3 {
            self.old_of_new[3 * undo.slot + i] = usize::MAX;
        }
        for &pos in &undo.determined {
            self.cand[pos] = usize::MAX;
        }
        self.used[undo.u] = false;
    }
}

struct Undo {
    u: usize,
    slot: usize,
    triple: [usize; 3],
    determined: Vec<usize>,
}

/// Joint Weisfeiler–Lehman-style color refinement on both adjacency
/// matrices. Returns `None` when the color histograms ever disagree (the
/// diagrams cannot be isomorphic).
fn joint_refinement(adj1: &[Vec<u8>], adj2: &[Vec<u8>]) -> Option<(Vec<usize>, Vec<usize>)> {
    use std::collections::BTreeMap;
    let n = adj1.len();
    let mut c1 = vec![0usize; n];
    let mut c2 = vec![0usize; n];
    for _ in 0..=n {
        let key = |adj: &[Vec<u8>], c: &[usize], v: usize| -> Vec<(u8, usize)> {
            let mut k: Vec<(u8, usize)> = (0..n)
                .filter(|&w| adj[v][w] > 0)
                .map(|w| (adj[v][w], c[w]))
                .collect();
            k.sort_unstable();
            k
        };
        type ColorKey = (usize, Vec<(u8, usize)>);
        let mut palette: BTreeMap<ColorKey, usize> = BTreeMap::new();
        let assign = |palette: &mut BTreeMap<ColorKey, usize>, k: ColorKey| {
            let fresh = palette.len();
            *palette.entry(k).or_insert(fresh)
        };
        let n1: Vec<usize> = (0..n)
            .map(|v| assign(&mut palette, (c1[v], key(adj1, &c1, v))))
            .collect();
        let n2: Vec<usize> = (0..n)
            .map(|v| assign(&mut palette, (c2[v], key(adj2, &c2, v))))
            .collect();
        let mut h1 = vec![0usize; palette.len()];
        let mut h2 = vec![0usize; palette.len()];
        for &c in &n1 {
            h1[c] += 1;
        }
        for &c in &n2 {
            h2[c] += 1;
        }
        if h1 != h2 {
            return None;
        }
        let stable = n1 == c1 && n2 == c2;
        c1 = n1;
        c2 = n2;
        if stable {
            break;
        }
    }
    Some((c1, c2))
}

/// Vertex order where every vertex after the first of its component is
/// adjacent to an earlier one.
fn connected_order(adj: &[Vec<u8>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let root = (0..n).find(|&v| !placed[v]).expect("unplaced vertex");
        placed[root] = true;
        order.push(root);
        while let Some(v) =
            (0..n).find(|&v| !placed[v] && order.iter().any(|&u| adj[v][u] > 0))
        {
            placed[v] = true;
            order.push(v);
        }
    }
    order
}
