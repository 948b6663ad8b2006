//! Triangulations of 3-manifolds as tetrahedra with face gluings.
//!
//! A triangulation is a list of abstract tetrahedra, each with four faces.
//! Face `f` of a tetrahedron is the face opposite vertex `f`; its three
//! vertices, sorted increasingly as tetrahedron labels, carry the
//! *face-vertex labels* `0,1,2`. A gluing identifies two faces through a
//! permutation of these three labels. Vertex identifications may be singular
//! (several tetrahedron vertices can collapse to one point), but an edge
//! glued to itself with reversed orientation is rejected, since arc slots
//! along such an edge would be ill-defined.
//!
//! The module derives the full skeleton: global faces, global edges with
//! their cyclic rings of incident face-corners, and global vertices.
//!
//! File format (`.tri`, line-based, `#` starts a comment):
//!
//! ```text
//! tetrahedra <N>
//! glue <t> <f> -> <t'> <f'> <perm>   # perm in {012,021,102,120,201,210}
//! boundary <t> <f>
//! ```
//!
//! Every face slot `(t, f)` must appear exactly once on the left-hand side,
//! and glue lines must come in mutually inverse pairs.

use std::fmt::Write as _;

use thiserror::Error;

/// A permutation of the three face-vertex labels, stored as its image word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm3([u8; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);

    pub fn new(images: [u8; 3]) -> Option<Perm3> {
        let mut seen = [false; 3];
        for &i in &images {
            if i > 2 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm3(images))
    }

    pub fn apply(&self, label: u8) -> u8 {
        self.0[label as usize]
    }

    pub fn inverse(&self) -> Perm3 {
        let mut inv = [0u8; 3];
        for (pre, &post) in self.0.iter().enumerate() {
            inv[post as usize] = pre as u8;
        }
        Perm3(inv)
    }

    pub fn parse(token: &str) -> Option<Perm3> {
        let bytes = token.as_bytes();
        if bytes.len() != 3 {
            return None;
        }
        let digit = |b: u8| -> Option<u8> {
            if b.is_ascii_digit() {
                Some(b - b'0')
            } else {
                None
            }
        };
        Perm3::new([digit(bytes[0])?, digit(bytes[1])?, digit(bytes[2])?])
    }

    pub fn word(&self) -> String {
        format!("{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

/// One side of a face slot: tetrahedron index plus face index `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TetFace {
    pub tet: usize,
    pub face: u8,
}

/// Gluing entry of a face slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceGluing {
    Boundary,
    Glued { to: TetFace, perm: Perm3 },
}

/// Identifier of a global (identified) face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalFaceId(pub usize);

/// Identifier of a global (identified) edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalEdgeId(pub usize);

/// One crossing of a global edge by a face: the face traverses the edge as
/// its `face_edge`-th boundary edge, `forward` telling whether the traversal
/// agrees with the edge's canonical direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeIncidence {
    pub side: TetFace,
    pub face_edge: u8,
    pub forward: bool,
}

/// A global edge with its ring of face incidences.
///
/// For an interior edge the ring is cyclic; for a boundary edge it is the
/// full (linear) list of incidences in no particular cyclic order.
#[derive(Debug, Clone)]
pub struct GlobalEdge {
    pub incidences: Vec<EdgeIncidence>,
    pub interior: bool,
}

/// A global face: its canonical side, and the other side when glued.
#[derive(Debug, Clone, Copy)]
pub struct GlobalFace {
    pub canonical: TetFace,
    pub other: Option<(TetFace, Perm3)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face ({0}, {1}) is glued to itself")]
    SelfGluedFace(usize, u8),
    #[error("gluing of ({0}, {1}) is not involutive")]
    GlueNotInvolutive(usize, u8),
    #[error("gluing of ({0}, {1}) references tetrahedron {2} out of range")]
    DanglingReference(usize, u8, usize),
    #[error("edge ({{{0}, {1}}} in tetrahedron {2}) is identified with itself reversing orientation")]
    EdgeSelfReversal(usize, usize, usize),
}

/// A validated triangulation with derived skeleton indices.
#[derive(Debug, Clone)]
pub struct Triangulation {
    gluings: Vec<[FaceGluing; 4]>,
    faces: Vec<GlobalFace>,
    face_of: Vec<[GlobalFaceId; 4]>,
    edges: Vec<GlobalEdge>,
    edge_of: Vec<[GlobalEdgeId; 6]>,
    /// Whether the canonical `a -> b` direction of tet-edge `(t, e)` agrees
    /// with the canonical direction of its global edge class.
    edge_sign: Vec<[bool; 6]>,
    vertex_of: Vec<[usize; 4]>,
    vertex_count: usize,
}

/// Pairs `(a, b)` of tetrahedron vertex labels indexing the six edges.
pub const TET_EDGE_VERTICES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index of the tet edge with vertex set `{a, b}`.
pub fn tet_edge_index(a: u8, b: u8) -> u8 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    TET_EDGE_VERTICES
        .iter()
        .position(|&(x, y)| (x, y) == (a, b))
        .expect("distinct labels in 0..4") as u8
}

/// Sorted vertex labels of face `f` (the face opposite vertex `f`).
pub fn face_vertices(face: u8) -> [u8; 3] {
    let mut out = [0u8; 3];
    let mut k = 0;
    for v in 0..4u8 {
        if v != face {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// Tetrahedron vertex labels of boundary edge `k` of face `f`, directed from
/// face-vertex `k` to face-vertex `k+1`.
pub fn face_edge_endpoints(face: u8, face_edge: u8) -> (u8, u8) {
    let fv = face_vertices(face);
    (
        fv[face_edge as usize],
        fv[(face_edge as usize + 1) % 3],
    )
}

/// Face-edge index of face `f'` spanned by the images of `k`'s endpoints
/// under the gluing permutation.
pub fn mapped_face_edge(face_edge: u8, perm: Perm3) -> (u8, bool) {
    let a = perm.apply(face_edge);
    let b = perm.apply((face_edge + 1) % 3);
    for k in 0..3u8 {
        let (x, y) = (k, (k + 1) % 3);
        if (x, y) == (a, b) {
            return (k, true);
        }
        if (x, y) == (b, a) {
            return (k, false);
        }
    }
    unreachable!("two distinct labels always span a face edge")
}

struct UnionFind {
    parent: Vec<usize>,
    /// Sign relative to parent: true = same direction.
    sign: Vec<bool>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            sign: vec![true; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, true);
        }
        let (root, parent_sign) = self.find(self.parent[x]);
        let sign = self.sign[x] == parent_sign;
        self.parent[x] = root;
        self.sign[x] = sign;
        (root, sign)
    }

    /// Unites `x` and `y` with relative sign `same`; returns false on a
    /// sign contradiction.
    fn union(&mut self, x: usize, y: usize, same: bool) -> bool {
        let (rx, sx) = self.find(x);
        let (ry, sy) = self.find(y);
        if rx == ry {
            return (sx == sy) == same;
        }
        self.parent[ry] = rx;
        self.sign[ry] = (sx == sy) == same;
        true
    }
}

impl Triangulation {
    /// Builds and validates a triangulation from its gluing table.
    pub fn new(gluings: Vec<[FaceGluing; 4]>) -> Result<Triangulation, TriError> {
        let n = gluings.len();
        // Structural checks: range, self-gluing, involution.
        for (t, faces) in gluings.iter().enumerate() {
            for (f, gluing) in faces.iter().enumerate() {
                let f = f as u8;
                if let FaceGluing::Glued { to, perm } = gluing {
                    if to.tet >= n {
                        return Err(TriError::DanglingReference(t, f, to.tet));
                    }
                    if (to.tet, to.face) == (t, f) {
                        return Err(TriError::SelfGluedFace(t, f));
                    }
                    match gluings[to.tet][to.face as usize] {
                        FaceGluing::Glued { to: back, perm: back_perm }
                            if back == (TetFace { tet: t, face: f })
                                && back_perm == perm.inverse() => {}
                        _ => return Err(TriError::GlueNotInvolutive(t, f)),
                    }
                }
            }
        }

        // Global faces: canonical side is the lexicographically smaller slot.
        let mut faces = Vec::new();
        let mut face_of = vec![[GlobalFaceId(usize::MAX); 4]; n];
        for t in 0..n {
            for f in 0..4u8 {
                let here = TetFace { tet: t, face: f };
                match gluings[t][f as usize] {
                    FaceGluing::Boundary => {
                        face_of[t][f as usize] = GlobalFaceId(faces.len());
                        faces.push(GlobalFace { canonical: here, other: None });
                    }
                    FaceGluing::Glued { to, perm } => {
                        if (to.tet, to.face) > (t, f) {
                            let id = GlobalFaceId(faces.len());
                            face_of[t][f as usize] = id;
                            face_of[to.tet][to.face as usize] = id;
                            faces.push(GlobalFace { canonical: here, other: Some((to, perm)) });
                        }
                    }
                }
            }
        }

        // Global edges via signed union-find over (tet, tet-edge).
        let mut uf = UnionFind::new(n * 6);
        for t in 0..n {
            for f in 0..4u8 {
                if let FaceGluing::Glued { to, perm } = gluings[t][f as usize] {
                    for k in 0..3u8 {
                        let (a, b) = face_edge_endpoints(f, k);
                        let (k2, _) = mapped_face_edge(k, perm);
                        let (a2, b2) = face_edge_endpoints(to.face, k2);
                        // The identification sends the traversal fv_k -> fv_{k+1}
                        // to sigma(k) -> sigma(k+1); compare against the
                        // canonical min -> max directions on both sides.
                        let fv2 = face_vertices(to.face);
                        let img_a = fv2[perm.apply(k) as usize];
                        let img_b = fv2[perm.apply((k + 1) % 3) as usize];
                        let same = (a < b) == (img_a < img_b);
                        let e1 = t * 6 + tet_edge_index(a, b) as usize;
                        let e2 = to.tet * 6 + tet_edge_index(a2, b2) as usize;
                        if !uf.union(e1, e2, same) {
                            return Err(TriError::EdgeSelfReversal(a as usize, b as usize, t));
                        }
                    }
                }
            }
        }

        // Canonical edge numbering: sorted by smallest (tet, tet-edge) member.
        let mut edge_rep: Vec<(usize, usize)> = Vec::new();
        let mut edge_of = vec![[GlobalEdgeId(usize::MAX); 6]; n];
        let mut edge_sign = vec![[true; 6]; n];
        let mut rep_to_id: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        for t in 0..n {
            for e in 0..6 {
                let (root, _) = uf.find(t * 6 + e);
                rep_to_id.entry(root).or_insert_with(|| {
                    edge_rep.push((root, edge_rep.len()));
                    edge_rep.len() - 1
                });
            }
        }
        // Re-sort classes by first appearance (t, e) order, which is the
        // order we inserted them above.
        for t in 0..n {
            for e in 0..6 {
                let (root, sign) = uf.find(t * 6 + e);
                let id = rep_to_id[&root];
                edge_of[t][e] = GlobalEdgeId(id);
                edge_sign[t][e] = sign;
            }
        }
        let edge_count = rep_to_id.len();

        // Edge rings: walk around each global edge through face gluings.
        let mut edges: Vec<GlobalEdge> = vec![
            GlobalEdge { incidences: Vec::new(), interior: false };
            edge_count
        ];
        let mut ring_done = vec![false; edge_count];
        for t0 in 0..n {
            for e0 in 0..6 {
                let eid = edge_of[t0][e0].0;
                if ring_done[eid] {
                    continue;
                }
                ring_done[eid] = true;
                edges[eid] = Self::walk_ring(&gluings, &edge_of, t0, e0);
            }
        }
        // Rebase incidence directions from tet-local to class-canonical.
        for edge in &mut edges {
            for inc in &mut edge.incidences {
                let (a, b) = face_edge_endpoints(inc.side.face, inc.face_edge);
                let sign = edge_sign[inc.side.tet][tet_edge_index(a, b) as usize];
                inc.forward = (a < b) == sign;
            }
        }

        // Global vertices: plain union-find over (tet, vertex).
        let mut vparent: Vec<usize> = (0..n * 4).collect();
        fn vfind(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = vfind(p, p[x]);
                p[x] = r;
                return r;
            }
            x
        }
        for t in 0..n {
            for f in 0..4u8 {
                if let FaceGluing::Glued { to, perm } = gluings[t][f as usize] {
                    let fv = face_vertices(f);
                    let fv2 = face_vertices(to.face);
                    for l in 0..3u8 {
                        let a = t * 4 + fv[l as usize] as usize;
                        let b = to.tet * 4 + fv2[perm.apply(l) as usize] as usize;
                        let (ra, rb) = (vfind(&mut vparent, a), vfind(&mut vparent, b));
                        if ra != rb {
                            vparent[rb] = ra;
                        }
                    }
                }
            }
        }
        let mut vmap: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
        let mut vertex_of = vec![[0usize; 4]; n];
        for t in 0..n {
            for v in 0..4 {
                let r = vfind(&mut vparent, t * 4 + v);
                let next = vmap.len();
                let id = *vmap.entry(r).or_insert(next);
                vertex_of[t][v] = id;
            }
        }

        Ok(Triangulation {
            gluings,
            faces,
            face_of,
            edges,
            edge_of,
            edge_sign,
            vertex_of,
            vertex_count: vmap.len(),
        })
    }

    fn walk_ring(
        gluings: &[[FaceGluing; 4]],
        edge_of: &[[GlobalEdgeId; 6]],
        t0: usize,
        e0: usize,
    ) -> GlobalEdge {
        // The two faces of a tet containing edge {a,b} are the faces c with
        // c not in {a,b}. Walking: cross one containing face, land in the
        // neighbor tet on the identified edge, continue through the other
        // containing face there.
        let (a0, b0) = TET_EDGE_VERTICES[e0];
        let _ = edge_of;
        let containing = |a: u8, b: u8| -> [u8; 2] {
            let mut out = [0u8; 2];
            let mut k = 0;
            for f in 0..4u8 {
                if f != a && f != b {
                    out[k] = f;
                    k += 1;
                }
            }
            out
        };

        let face_edge_in = |face: u8, a: u8, b: u8| -> u8 {
            for k in 0..3u8 {
                let (x, y) = face_edge_endpoints(face, k);
                if (x.min(y), x.max(y)) == (a.min(b), a.max(b)) {
                    return k;
                }
            }
            unreachable!("edge lies in face")
        };

        // Walk in one direction; restart from the far end if we hit boundary.
        let step = |t: usize, a: u8, b: u8, through: u8| -> Option<(usize, u8, u8, u8)> {
            match gluings[t][through as usize] {
                FaceGluing::Boundary => None,
                FaceGluing::Glued { to, perm } => {
                    let k = face_edge_in(through, a, b);
                    let (k2, _) = mapped_face_edge(k, perm);
                    let (a2, b2) = face_edge_endpoints(to.face, k2);
                    // Continue through the *other* face of to.tet containing it.
                    let cf = containing(a2.min(b2), a2.max(b2));
                    let next = if cf[0] == to.face { cf[1] } else { cf[0] };
                    Some((to.tet, a2.min(b2), a2.max(b2), next))
                }
            }
        };

        // Find a starting side: walk backwards until boundary or full cycle.
        let cf0 = containing(a0, b0);
        let mut start = (t0, a0, b0, cf0[0]);
        let mut interior = true;
        {
            // Walk "backwards" through cf0[1] until boundary.
            let mut cur = (t0, a0, b0, cf0[1]);
            let mut guard = 0usize;
            loop {
                guard += 1;
                assert!(guard <= gluings.len() * 6 + 2, "edge ring walk diverged");
                match step(cur.0, cur.1, cur.2, cur.3) {
                    None => {
                        // cur.3 is a boundary face; start the forward walk there.
                        interior = false;
                        // The forward walk starts at this tet going through the
                        // other containing face.
                        let cf = containing(cur.1, cur.2);
                        let fwd = if cf[0] == cur.3 { cf[1] } else { cf[0] };
                        start = (cur.0, cur.1, cur.2, fwd);
                        break;
                    }
                    Some(next) => {
                        if (next.0, next.1, next.2) == (t0, a0, b0) {
                            // Completed a full cycle.
                            break;
                        }
                        cur = next;
                    }
                }
            }
        }

        // Forward walk collecting face incidences. Each tet in the ring
        // contributes its two containing faces; each crossing of a glued face
        // is one shared incidence. We record one incidence per (face slot,
        // face_edge) crossing, using the canonical slot of the global face.
        let mut incidences: Vec<EdgeIncidence> = Vec::new();
        let mut push_incidence = |t: usize, face: u8, a: u8, b: u8| {
            let k = face_edge_in(face, a, b);
            let (x, y) = face_edge_endpoints(face, k);
            debug_assert_eq!((x.min(y), x.max(y)), (a, b));
            // Direction is rebased to the class-canonical one by the caller.
            incidences.push(EdgeIncidence {
                side: TetFace { tet: t, face },
                face_edge: k,
                forward: x < y,
            });
        };

        if !interior {
            // Linear walk from the boundary start; record the boundary face
            // itself, then every crossed face once.
            let cf = containing(start.1, start.2);
            let back = if cf[0] == start.3 { cf[1] } else { cf[0] };
            push_incidence(start.0, back, start.1, start.2);
            let mut cur = start;
            loop {
                push_incidence(cur.0, cur.3, cur.1, cur.2);
                match step(cur.0, cur.1, cur.2, cur.3) {
                    None => break,
                    Some(next) => cur = next,
                }
            }
        } else {
            // Cyclic walk from (t0, a0, b0) through cf0[0].
            let mut cur = start;
            loop {
                push_incidence(cur.0, cur.3, cur.1, cur.2);
                let next = step(cur.0, cur.1, cur.2, cur.3).expect("interior ring");
                if (next.0, next.1, next.2, next.3) == start {
                    break;
                }
                cur = next;
            }
        }

        // Deduplicate: a glued face is crossed once but seen from both tets;
        // keep one incidence per (tet, face) slot, preferring first sighting.
        let mut seen = std::collections::HashSet::new();
        incidences.retain(|inc| seen.insert((inc.side, inc.face_edge)));

        GlobalEdge { incidences, interior }
    }

    pub fn tet_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn gluing(&self, t: usize, f: u8) -> FaceGluing {
        self.gluings[t][f as usize]
    }

    pub fn global_faces(&self) -> &[GlobalFace] {
        &self.faces
    }

    pub fn face_id(&self, t: usize, f: u8) -> GlobalFaceId {
        self.face_of[t][f as usize]
    }

    pub fn face(&self, id: GlobalFaceId) -> &GlobalFace {
        &self.faces[id.0]
    }

    pub fn global_edges(&self) -> &[GlobalEdge] {
        &self.edges
    }

    pub fn edge(&self, id: GlobalEdgeId) -> &GlobalEdge {
        &self.edges[id.0]
    }

    /// Global edge met by face slot `(t, f)` along its boundary edge `k`.
    pub fn edge_id_of_face_edge(&self, t: usize, f: u8, k: u8) -> GlobalEdgeId {
        let (a, b) = face_edge_endpoints(f, k);
        self.edge_of[t][tet_edge_index(a, b) as usize]
    }

    pub fn edge_id_of_tet_edge(&self, t: usize, e: u8) -> GlobalEdgeId {
        self.edge_of[t][e as usize]
    }

    /// Whether the `k`-th boundary edge of face `(t, f)`, traversed in the
    /// face's boundary direction, runs along the canonical direction of its
    /// global edge.
    pub fn face_edge_forward(&self, t: usize, f: u8, k: u8) -> bool {
        let (a, b) = face_edge_endpoints(f, k);
        let increasing = a < b;
        let sign = self.edge_sign[t][tet_edge_index(a, b) as usize];
        increasing == sign
    }

    pub fn vertex_id(&self, t: usize, v: u8) -> usize {
        self.vertex_of[t][v as usize]
    }

    /// Counts of global cells `(vertices, edges, faces, tetrahedra)`.
    pub fn skeleton_counts(&self) -> (usize, usize, usize, usize) {
        (
            self.vertex_count,
            self.edges.len(),
            self.faces.len(),
            self.gluings.len(),
        )
    }

    /// `true` when no face slot is a boundary face.
    pub fn is_closed(&self) -> bool {
        self.gluings
            .iter()
            .flatten()
            .all(|g| !matches!(g, FaceGluing::Boundary))
    }

    /// Parses the `.tri` format.
    pub fn parse(text: &str) -> Result<Triangulation, TriError> {
        let mut tet_count: Option<usize> = None;
        let mut table: Vec<[Option<FaceGluing>; 4]> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| TriError::Parse { line: lineno + 1, msg: msg.to_string() };
            let mut words = line.split_whitespace();
            match words.next() {
                Some("tetrahedra") => {
                    if tet_count.is_some() {
                        return Err(err("duplicate tetrahedra header"));
                    }
                    let n: usize = words
                        .next()
                        .ok_or_else(|| err("missing count"))?
                        .parse()
                        .map_err(|_| err("bad count"))?;
                    tet_count = Some(n);
                    table = vec![[None; 4]; n];
                }
                Some(kind @ ("glue" | "boundary")) => {
                    let n = tet_count.ok_or_else(|| err("tetrahedra header must come first"))?;
                    let t: usize = words
                        .next()
                        .ok_or_else(|| err("missing tet"))?
                        .parse()
                        .map_err(|_| err("bad tet index"))?;
                    let f: u8 = words
                        .next()
                        .ok_or_else(|| err("missing face"))?
                        .parse()
                        .map_err(|_| err("bad face index"))?;
                    if t >= n || f > 3 {
                        return Err(err("face slot out of range"));
                    }
                    let entry = if kind == "boundary" {
                        if words.next().is_some() {
                            return Err(err("trailing tokens"));
                        }
                        FaceGluing::Boundary
                    } else {
                        if words.next() != Some("->") {
                            return Err(err("expected ->"));
                        }
                        let t2: usize = words
                            .next()
                            .ok_or_else(|| err("missing target tet"))?
                            .parse()
                            .map_err(|_| err("bad target tet"))?;
                        let f2: u8 = words
                            .next()
                            .ok_or_else(|| err("missing target face"))?
                            .parse()
                            .map_err(|_| err("bad target face"))?;
                        let perm = Perm3::parse(words.next().ok_or_else(|| err("missing perm"))?)
                            .ok_or_else(|| err("bad perm"))?;
                        if words.next().is_some() {
                            return Err(err("trailing tokens"));
                        }
                        if f2 > 3 {
                            return Err(err("target face out of range"));
                        }
                        FaceGluing::Glued { to: TetFace { tet: t2, face: f2 }, perm }
                    };
                    if table[t][f as usize].is_some() {
                        return Err(err("face slot listed twice"));
                    }
                    table[t][f as usize] = Some(entry);
                }
                _ => return Err(err("unknown directive")),
            }
        }
        let n = tet_count.ok_or(TriError::Parse { line: 0, msg: "missing tetrahedra header".into() })?;
        let mut gluings = Vec::with_capacity(n);
        for (t, faces) in table.into_iter().enumerate() {
            let mut row = [FaceGluing::Boundary; 4];
            for (f, entry) in faces.into_iter().enumerate() {
                row[f] = entry.ok_or(TriError::Parse {
                    line: 0,
                    msg: format!("face slot ({t}, {f}) never listed"),
                })?;
            }
            gluings.push(row);
        }
        Triangulation::new(gluings)
    }

    /// Canonical `.tri` serialization.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tetrahedra {}", self.gluings.len());
        for (t, faces) in self.gluings.iter().enumerate() {
            for (f, gluing) in faces.iter().enumerate() {
                match gluing {
                    FaceGluing::Boundary => {
                        let _ = writeln!(out, "boundary {t} {f}");
                    }
                    FaceGluing::Glued { to, perm } => {
                        let _ = writeln!(out, "glue {t} {f} -> {} {} {}", to.tet, to.face, perm.word());
                    }
                }
            }
        }
        out
    }
}

/// Loads and validates a `.tri` file.
pub fn load_triangulation(text: &str) -> Result<Triangulation, TriError> {
    Triangulation::parse(text)
}
