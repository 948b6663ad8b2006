//! Dividing sets as non-crossing chord diagrams on triangle faces.
//!
//! Each global face of a triangulation carries a diagram: arc endpoints sit
//! in discrete *slots* along the three boundary edges, and a perfect
//! non-crossing matching pairs the slots into arcs. Boundary edge `k` of a
//! face runs from face-vertex `k` to face-vertex `k+1`; slots on it are
//! indexed along that direction. Along an interior edge of the triangulation
//! the slots are shared between all incident faces, so a slot is a point
//! where the multicurve crosses the 1-skeleton; this is what the edge
//! consistency checks enforce. Boundary edges of the triangulation impose no
//! sharing.
//!
//! Arcs with endpoints on two different edges are *normal* (they cut off the
//! corner those edges share); arcs with both endpoints on a single edge are
//! *boundary-parallel* and are keyed by the edge together with the nearer
//! endpoint vertex. Closed components are recorded only as a per-face count:
//! they obstruct tightness and every downstream operation refuses them.
//!
//! File format (`.div`, `#` starts a comment). Two stanza kinds, always
//! keyed by the canonical side of a global face:
//!
//! ```text
//! face <t> <f> counts n01=<a> n02=<b> n12=<c> bp=<e>:<v>:<k> ... closed=<z>
//! face <t> <f> explicit slots e0=<k0> e1=<k1> e2=<k2> match (<s>,<s>) ... [closed=<z>]
//! ```
//!
//! Slots are named `<edge><index>` (`05` = edge 0, slot 5). Faces left out
//! of the file are empty. Counts lines lay out boundary-parallel arcs of a
//! common key nested, innermost nearest the vertex; diagrams that differ
//! from this canonical layout serialize in explicit form.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::tri::{GlobalEdgeId, GlobalFaceId, TetFace, Triangulation};

/// Normal arc types in file order: `n01`, `n02`, `n12`.
pub const NORMAL_TYPES: [(u8, u8); 3] = [(0, 1), (0, 2), (1, 2)];

/// Index into [`NORMAL_TYPES`] of the arc type cutting off face-vertex `v`.
pub fn corner_type(v: u8) -> usize {
    // Corner v is shared by edges (v+2)%3 and v.
    match v {
        0 => 1, // edges {2,0} -> n02
        1 => 0, // edges {0,1} -> n01
        2 => 2, // edges {1,2} -> n12
        _ => unreachable!(),
    }
}

/// Classification of a single arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcClass {
    /// Endpoints on two different edges; payload indexes [`NORMAL_TYPES`].
    Normal(usize),
    /// Both endpoints on `edge`; `vertex` is the nearer endpoint vertex.
    BoundaryParallel { edge: u8, vertex: u8 },
}

/// Aggregated per-face arc counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ArcCensus {
    /// Counts for `n01`, `n02`, `n12`.
    pub normal: [usize; 3],
    /// `bp[e][0]` counts arcs keyed to the start vertex of edge `e`,
    /// `bp[e][1]` to its end vertex.
    pub bp: [[usize; 2]; 3],
    pub closed: usize,
}

impl ArcCensus {
    pub fn bp_total(&self) -> usize {
        self.bp.iter().flatten().sum()
    }

    pub fn arc_total(&self) -> usize {
        self.normal.iter().sum::<usize>() + self.bp_total()
    }

    /// Count keyed by `(edge, vertex)`; the vertex must be an endpoint of
    /// the edge.
    pub fn bp_at(&self, edge: u8, vertex: u8) -> usize {
        let end = usize::from(vertex != edge);
        self.bp[edge as usize][end]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DividingError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("crossing arcs in the diagram of face {0:?}")]
    CrossingArcs(GlobalFaceId),
    #[error("slots of face {0:?} are not perfectly matched")]
    BadMatching(GlobalFaceId),
    #[error("faces adjacent along edge {0:?} disagree on endpoint slots")]
    EdgeMismatch(GlobalEdgeId),
    #[error("edge {0:?} carries fewer than 2 endpoints; tb would be nonnegative")]
    NonnegativeTb(GlobalEdgeId),
    #[error("face {0:?} carries closed components")]
    ClosedComponent(GlobalFaceId),
}

/// The chord diagram of one face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDiagram {
    /// Slot counts per boundary edge.
    edge_slots: [usize; 3],
    /// Partner of each linearized slot position; an involution without
    /// fixed points. Linearization: edge 0 slots, then edge 1, then edge 2.
    partner: Vec<usize>,
    closed: usize,
}

impl FaceDiagram {
    pub fn empty() -> FaceDiagram {
        FaceDiagram { edge_slots: [0; 3], partner: Vec::new(), closed: 0 }
    }

    /// Builds a diagram from an explicit matching given in linear positions.
    pub fn from_matching(
        edge_slots: [usize; 3],
        pairs: &[(usize, usize)],
        closed: usize,
    ) -> Option<FaceDiagram> {
        let n = edge_slots.iter().sum();
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a >= n || b >= n || a == b || partner[a] != usize::MAX || partner[b] != usize::MAX {
                return None;
            }
            partner[a] = b;
            partner[b] = a;
        }
        if partner.iter().any(|&p| p == usize::MAX) {
            return None;
        }
        Some(FaceDiagram { edge_slots, partner, closed })
    }

    /// Canonical layout from arc counts: normal arcs nest around their
    /// corners, boundary-parallel arcs nest at their keyed vertex ends,
    /// innermost nearest the vertex.
    pub fn from_census(census: &ArcCensus) -> FaceDiagram {
        let bp_start = |e: usize| census.bp[e][0];
        let bp_end = |e: usize| census.bp[e][1];
        let corner = |v: usize| census.normal[corner_type(v as u8)];
        let mut edge_slots = [0usize; 3];
        for (e, slot) in edge_slots.iter_mut().enumerate() {
            *slot = 2 * bp_start(e) + corner(e) + corner((e + 1) % 3) + 2 * bp_end(e);
        }
        let offset = |e: usize| -> usize { edge_slots[..e].iter().sum() };
        let n: usize = edge_slots.iter().sum();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for e in 0..3 {
            let base = offset(e);
            let m = edge_slots[e];
            let bs = bp_start(e);
            for j in 0..bs {
                pairs.push((base + j, base + 2 * bs - 1 - j));
            }
            let be = bp_end(e);
            for j in 0..be {
                pairs.push((base + m - 2 * be + j, base + m - 1 - j));
            }
        }
        for v in 0..3usize {
            // Corner v joins the end of edge (v+2)%3 to the start of edge v.
            let e_in = (v + 2) % 3;
            let e_out = v;
            let c = corner(v);
            for r in 0..c {
                let p_in = offset(e_in) + edge_slots[e_in] - 2 * bp_end(e_in) - 1 - r;
                let p_out = offset(e_out) + 2 * bp_start(e_out) + r;
                pairs.push((p_in, p_out));
            }
        }
        let mut partner = vec![usize::MAX; n];
        for (a, b) in pairs {
            partner[a] = b;
            partner[b] = a;
        }
        debug_assert!(partner.iter().all(|&p| p != usize::MAX));
        FaceDiagram { edge_slots, partner, closed: census.closed }
    }

    pub fn edge_slots(&self) -> [usize; 3] {
        self.edge_slots
    }

    pub fn slot_total(&self) -> usize {
        self.partner.len()
    }

    pub fn arc_count(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn closed_components(&self) -> usize {
        self.closed
    }

    pub fn with_closed(mut self, closed: usize) -> FaceDiagram {
        self.closed = closed;
        self
    }

    pub fn partner(&self, pos: usize) -> usize {
        self.partner[pos]
    }

    /// `(edge, local index)` of a linear position.
    pub fn slot_of(&self, pos: usize) -> (u8, usize) {
        let mut p = pos;
        for e in 0..3 {
            if p < self.edge_slots[e] {
                return (e as u8, p);
            }
            p -= self.edge_slots[e];
        }
        panic!("position out of range");
    }

    pub fn position_of(&self, edge: u8, index: usize) -> usize {
        let base: usize = self.edge_slots[..edge as usize].iter().sum();
        base + index
    }

    /// Arcs as sorted position pairs `(lo, hi)`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.partner.len() / 2);
        for (p, &q) in self.partner.iter().enumerate() {
            if p < q {
                out.push((p, q));
            }
        }
        out
    }

    pub fn classify_arc(&self, lo: usize, hi: usize) -> ArcClass {
        let (e1, i1) = self.slot_of(lo);
        let (e2, i2) = self.slot_of(hi);
        if e1 != e2 {
            let pair = (e1.min(e2), e1.max(e2));
            let ty = NORMAL_TYPES.iter().position(|&t| t == pair).unwrap();
            ArcClass::Normal(ty)
        } else {
            let m = self.edge_slots[e1 as usize];
            let d_start = i1;
            let d_end = m - 1 - i2;
            let vertex = if d_start <= d_end { e1 } else { (e1 + 1) % 3 };
            ArcClass::BoundaryParallel { edge: e1, vertex }
        }
    }

    pub fn census(&self) -> ArcCensus {
        let mut census = ArcCensus { closed: self.closed, ..Default::default() };
        for (lo, hi) in self.arcs() {
            match self.classify_arc(lo, hi) {
                ArcClass::Normal(ty) => census.normal[ty] += 1,
                ArcClass::BoundaryParallel { edge, vertex } => {
                    let end = usize::from(vertex != edge);
                    census.bp[edge as usize][end] += 1;
                }
            }
        }
        census
    }

    /// Whether the matching is a non-crossing involution.
    pub fn check_planar(&self) -> Result<(), PlanarityFault> {
        let n = self.partner.len();
        for p in 0..n {
            let q = self.partner[p];
            if q >= n || q == p || self.partner[q] != p {
                return Err(PlanarityFault::BadMatching);
            }
        }
        let mut stack = Vec::new();
        for p in 0..n {
            if self.partner[p] > p {
                stack.push(p);
            } else {
                match stack.pop() {
                    Some(open) if open == self.partner[p] => {}
                    _ => return Err(PlanarityFault::Crossing),
                }
            }
        }
        debug_assert!(stack.is_empty());
        Ok(())
    }

    /// Deletes the pairs of adjacent positions in `sites`, rewiring arcs.
    ///
    /// A `Delete` site removes the arc spanning the two positions (they must
    /// be partners). A `Merge` site joins the two arcs ending there into
    /// one; if the two positions are partners, the join would produce a
    /// closed component and the rewrite fails.
    pub fn apply_sites(&self, sites: &[MoveSite]) -> Result<FaceDiagram, RewriteFault> {
        let mut sites = sites.to_vec();
        sites.sort_by(|a, b| b.lo.cmp(&a.lo));
        for w in sites.windows(2) {
            if w[1].lo + 1 >= w[0].lo {
                return Err(RewriteFault::OverlappingSites);
            }
        }
        let mut diagram = self.clone();
        for site in sites {
            diagram = diagram.apply_one(site)?;
        }
        Ok(diagram)
    }

    fn apply_one(&self, site: MoveSite) -> Result<FaceDiagram, RewriteFault> {
        let p = site.lo;
        if p + 1 >= self.partner.len() {
            return Err(RewriteFault::OutOfRange);
        }
        let (e1, _) = self.slot_of(p);
        let (e2, _) = self.slot_of(p + 1);
        if e1 != e2 {
            return Err(RewriteFault::OutOfRange);
        }
        let a = self.partner[p];
        let b = self.partner[p + 1];
        let mut partner = self.partner.clone();
        match site.kind {
            SiteKind::Delete => {
                if a != p + 1 {
                    return Err(RewriteFault::NotAnArc);
                }
            }
            SiteKind::Merge => {
                if a == p + 1 {
                    return Err(RewriteFault::CreatesClosed);
                }
                partner[a] = b;
                partner[b] = a;
            }
        }
        let remap = |q: usize| -> usize {
            if q > p + 1 {
                q - 2
            } else {
                q
            }
        };
        let mut next = Vec::with_capacity(partner.len() - 2);
        for (q, &r) in partner.iter().enumerate() {
            if q == p || q == p + 1 {
                continue;
            }
            next.push(remap(r));
        }
        let mut edge_slots = self.edge_slots;
        edge_slots[e1 as usize] -= 2;
        Ok(FaceDiagram { edge_slots, partner: next, closed: self.closed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteKind {
    Delete,
    Merge,
}

/// A rewrite site: the two adjacent positions `lo`, `lo + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveSite {
    pub lo: usize,
    pub kind: SiteKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarityFault {
    BadMatching,
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteFault {
    OutOfRange,
    NotAnArc,
    CreatesClosed,
    OverlappingSites,
}

/// Relative Thurston–Bennequin number of one face boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceTb {
    pub value: i64,
    /// Set when the face diagram is empty, so the boundary meets no dividing
    /// curves at all.
    pub nonconvex_warning: bool,
}

/// A dividing set over a triangulation: one diagram per global face.
#[derive(Debug, Clone)]
pub struct DividingSet {
    tri: Arc<Triangulation>,
    faces: Vec<FaceDiagram>,
}

impl DividingSet {
    /// Wraps diagrams (indexed by global face id) without validating; call
    /// [`DividingSet::validate`] afterwards.
    pub fn from_parts(tri: Arc<Triangulation>, faces: Vec<FaceDiagram>) -> DividingSet {
        assert_eq!(faces.len(), tri.global_faces().len());
        DividingSet { tri, faces }
    }

    pub fn empty(tri: Arc<Triangulation>) -> DividingSet {
        let n = tri.global_faces().len();
        DividingSet { tri, faces: vec![FaceDiagram::empty(); n] }
    }

    pub fn triangulation(&self) -> &Arc<Triangulation> {
        &self.tri
    }

    pub fn face(&self, id: GlobalFaceId) -> &FaceDiagram {
        &self.faces[id.0]
    }

    pub fn faces(&self) -> &[FaceDiagram] {
        &self.faces
    }

    pub fn replace_face(&self, id: GlobalFaceId, diagram: FaceDiagram) -> DividingSet {
        let mut faces = self.faces.clone();
        faces[id.0] = diagram;
        DividingSet { tri: self.tri.clone(), faces }
    }

    /// Total number of arc endpoints over all faces.
    pub fn endpoint_total(&self) -> usize {
        self.faces.iter().map(|f| f.slot_total()).sum()
    }

    /// Slot count of every incidence of a global edge, as
    /// `(face, face_edge, count)` with face-edge data in the canonical frame.
    pub fn edge_incidence_counts(&self, edge: GlobalEdgeId) -> Vec<(GlobalFaceId, u8, usize)> {
        let mut out = Vec::new();
        for inc in &self.tri.edge(edge).incidences {
            let (face, k) = self.canonical_incidence(inc.side, inc.face_edge);
            let count = self.faces[face.0].edge_slots()[k as usize];
            out.push((face, k, count));
        }
        out
    }

    /// Maps a face-side incidence to the canonical side of its global face.
    pub fn canonical_incidence(&self, side: TetFace, face_edge: u8) -> (GlobalFaceId, u8) {
        let id = self.tri.face_id(side.tet, side.face);
        let canonical = self.tri.face(id).canonical;
        if canonical == side {
            (id, face_edge)
        } else {
            match self.tri.gluing(side.tet, side.face) {
                crate::tri::FaceGluing::Glued { perm, .. } => {
                    let (k, _) = crate::tri::mapped_face_edge(face_edge, perm);
                    (id, k)
                }
                crate::tri::FaceGluing::Boundary => unreachable!("boundary face is canonical"),
            }
        }
    }

    /// Full validity audit.
    pub fn validate(&self) -> Result<(), DividingError> {
        for (i, diagram) in self.faces.iter().enumerate() {
            match diagram.check_planar() {
                Ok(()) => {}
                Err(PlanarityFault::BadMatching) => {
                    return Err(DividingError::BadMatching(GlobalFaceId(i)))
                }
                Err(PlanarityFault::Crossing) => {
                    return Err(DividingError::CrossingArcs(GlobalFaceId(i)))
                }
            }
        }
        for (e, edge) in self.tri.global_edges().iter().enumerate() {
            if !edge.interior {
                continue;
            }
            let counts = self.edge_incidence_counts(GlobalEdgeId(e));
            let m = counts.first().map(|&(_, _, c)| c).unwrap_or(0);
            if counts.iter().any(|&(_, _, c)| c != m) {
                return Err(DividingError::EdgeMismatch(GlobalEdgeId(e)));
            }
            if m == 1 {
                return Err(DividingError::NonnegativeTb(GlobalEdgeId(e)));
            }
        }
        Ok(())
    }

    /// Lists faces recording closed components.
    pub fn detect_closed(&self) -> Vec<(GlobalFaceId, usize)> {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, d)| d.closed_components() > 0)
            .map(|(i, d)| (GlobalFaceId(i), d.closed_components()))
            .collect()
    }

    /// `tb(∂F)` of one face: minus the number of arcs.
    pub fn tb_face(&self, face: GlobalFaceId) -> Result<FaceTb, DividingError> {
        let diagram = &self.faces[face.0];
        if diagram.closed_components() > 0 {
            return Err(DividingError::ClosedComponent(face));
        }
        Ok(FaceTb {
            value: -(diagram.arc_count() as i64),
            nonconvex_warning: diagram.slot_total() == 0,
        })
    }

    /// `TB`: the sum of `tb(∂F)` over all global faces.
    pub fn tb_total(&self) -> Result<i64, DividingError> {
        let mut total = 0;
        for i in 0..self.faces.len() {
            total += self.tb_face(GlobalFaceId(i))?.value;
        }
        Ok(total)
    }

    pub fn classify_arcs(&self, face: GlobalFaceId) -> ArcCensus {
        self.faces[face.0].census()
    }

    /// Canonical `.div` serialization: empty faces are omitted; diagrams
    /// reproducing their counts layout serialize in counts form.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, diagram) in self.faces.iter().enumerate() {
            if diagram.slot_total() == 0 && diagram.closed_components() == 0 {
                continue;
            }
            let TetFace { tet, face } = self.tri.face(GlobalFaceId(i)).canonical;
            let census = diagram.census();
            if &FaceDiagram::from_census(&census) == diagram {
                let _ = write!(
                    out,
                    "face {tet} {face} counts n01={} n02={} n12={}",
                    census.normal[0], census.normal[1], census.normal[2]
                );
                for e in 0..3u8 {
                    let mut keys = [e, (e + 1) % 3];
                    keys.sort_unstable();
                    for v in keys {
                        let k = census.bp_at(e, v);
                        if k > 0 {
                            let _ = write!(out, " bp={e}:{v}:{k}");
                        }
                    }
                }
                let _ = writeln!(out, " closed={}", census.closed);
            } else {
                let slots = diagram.edge_slots();
                let _ = write!(
                    out,
                    "face {tet} {face} explicit slots e0={} e1={} e2={} match",
                    slots[0], slots[1], slots[2]
                );
                for (lo, hi) in diagram.arcs() {
                    let (e1, i1) = diagram.slot_of(lo);
                    let (e2, i2) = diagram.slot_of(hi);
                    let _ = write!(out, " ({e1}{i1},{e2}{i2})");
                }
                if diagram.closed_components() > 0 {
                    let _ = write!(out, " closed={}", diagram.closed_components());
                }
                let _ = writeln!(out);
            }
        }
        out
    }
}

/// Parses and validates a `.div` file against a triangulation.
pub fn load_dividing(tri: Arc<Triangulation>, text: &str) -> Result<DividingSet, DividingError> {
    let set = parse_dividing(tri, text)?;
    set.validate()?;
    Ok(set)
}

/// Parses a `.div` file without the global validity audit; closed-component
/// detection works on the result even when validation would fail.
pub fn parse_dividing(tri: Arc<Triangulation>, text: &str) -> Result<DividingSet, DividingError> {
    let mut faces = vec![FaceDiagram::empty(); tri.global_faces().len()];
    let mut listed: HashMap<usize, usize> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| DividingError::Parse { line: lineno + 1, msg };
        let mut words = line.split_whitespace().peekable();
        if words.next() != Some("face") {
            return Err(err("expected face line".into()));
        }
        let t: usize = words
            .next()
            .ok_or_else(|| err("missing tet".into()))?
            .parse()
            .map_err(|_| err("bad tet index".into()))?;
        let f: u8 = words
            .next()
            .ok_or_else(|| err("missing face".into()))?
            .parse()
            .map_err(|_| err("bad face index".into()))?;
        if t >= tri.tet_count() || f > 3 {
            return Err(err("face slot out of range".into()));
        }
        let id = tri.face_id(t, f);
        let canonical = tri.face(id).canonical;
        if canonical != (TetFace { tet: t, face: f }) {
            return Err(err(format!(
                "face ({t}, {f}) is not the canonical side; use ({}, {})",
                canonical.tet, canonical.face
            )));
        }
        if listed.insert(id.0, lineno).is_some() {
            return Err(err(format!("face ({t}, {f}) listed twice")));
        }
        let diagram = match words.next() {
            Some("counts") => parse_counts(&mut words).map_err(err)?,
            Some("explicit") => parse_explicit(&mut words).map_err(err)?,
            _ => return Err(err("expected counts or explicit".into())),
        };
        faces[id.0] = diagram;
    }
    Ok(DividingSet::from_parts(tri, faces))
}

fn parse_counts<'a, I: Iterator<Item = &'a str>>(
    words: &mut std::iter::Peekable<I>,
) -> Result<FaceDiagram, String> {
    let mut census = ArcCensus::default();
    for (i, key) in ["n01", "n02", "n12"].iter().enumerate() {
        let token = words.next().ok_or_else(|| format!("missing {key}"))?;
        let value = token
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| format!("expected {key}=<count>"))?;
        census.normal[i] = value.parse().map_err(|_| format!("bad {key} count"))?;
    }
    let mut closed: Option<usize> = None;
    for token in words {
        if let Some(rest) = token.strip_prefix("bp=") {
            let mut parts = rest.split(':');
            let e: u8 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or("bad bp edge")?;
            let v: u8 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or("bad bp vertex")?;
            let k: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or("bad bp count")?;
            if parts.next().is_some() || e > 2 {
                return Err("bad bp entry".into());
            }
            if v != e && v != (e + 1) % 3 {
                return Err(format!("vertex {v} is not an endpoint of edge {e}"));
            }
            let end = usize::from(v != e);
            census.bp[e as usize][end] += k;
        } else if let Some(rest) = token.strip_prefix("closed=") {
            if closed.is_some() {
                return Err("duplicate closed".into());
            }
            closed = Some(rest.parse().map_err(|_| "bad closed count")?);
        } else {
            return Err(format!("unexpected token {token}"));
        }
    }
    census.closed = closed.ok_or("missing closed=<z>")?;
    Ok(FaceDiagram::from_census(&census))
}

fn parse_explicit<'a, I: Iterator<Item = &'a str>>(
    words: &mut std::iter::Peekable<I>,
) -> Result<FaceDiagram, String> {
    if words.next() != Some("slots") {
        return Err("expected slots".into());
    }
    let mut edge_slots = [0usize; 3];
    for (e, slot) in edge_slots.iter_mut().enumerate() {
        let key = format!("e{e}");
        let token = words.next().ok_or_else(|| format!("missing {key}"))?;
        let value = token
            .strip_prefix(key.as_str())
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| format!("expected {key}=<count>"))?;
        *slot = value.parse().map_err(|_| format!("bad {key} count"))?;
    }
    if words.next() != Some("match") {
        return Err("expected match".into());
    }
    let parse_slot = |token: &str, slots: &[usize; 3]| -> Result<usize, String> {
        let bytes = token.as_bytes();
        if bytes.len() < 2 || !bytes[0].is_ascii_digit() {
            return Err(format!("bad slot {token}"));
        }
        let e = (bytes[0] - b'0') as usize;
        if e > 2 {
            return Err(format!("bad slot edge in {token}"));
        }
        let idx: usize = token[1..]
            .parse()
            .map_err(|_| format!("bad slot index in {token}"))?;
        if idx >= slots[e] {
            return Err(format!("slot {token} out of range"));
        }
        Ok(slots[..e].iter().sum::<usize>() + idx)
    };
    let mut pairs = Vec::new();
    let mut closed = 0usize;
    for token in words {
        if let Some(rest) = token.strip_prefix("closed=") {
            closed = rest.parse().map_err(|_| "bad closed count")?;
            continue;
        }
        let inner = token
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| format!("expected (a,b), got {token}"))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| format!("expected (a,b), got {token}"))?;
        pairs.push((parse_slot(a, &edge_slots)?, parse_slot(b, &edge_slots)?));
    }
    FaceDiagram::from_matching(edge_slots, &pairs, closed)
        .ok_or_else(|| "slots are not perfectly matched".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tri::{FaceGluing, Perm3};

    fn one_tet() -> Arc<Triangulation> {
        Arc::new(Triangulation::new(vec![[FaceGluing::Boundary; 4]]).unwrap())
    }

    fn two_tet_closed() -> Arc<Triangulation> {
        let mut rows = Vec::new();
        for t in 0..2usize {
            let mut row = [FaceGluing::Boundary; 4];
            for f in 0..4u8 {
                row[f as usize] = FaceGluing::Glued {
                    to: TetFace { tet: 1 - t, face: f },
                    perm: Perm3::IDENTITY,
                };
            }
            rows.push(row);
        }
        Arc::new(Triangulation::new(rows).unwrap())
    }

    #[test]
    fn counts_layout_one_arc_each_face() {
        let tri = one_tet();
        let text = (0..4)
            .map(|f| format!("face 0 {f} counts n01=1 n02=0 n12=0 closed=0\n"))
            .collect::<String>();
        let set = load_dividing(tri, &text).unwrap();
        for i in 0..4 {
            let tb = set.tb_face(GlobalFaceId(i)).unwrap();
            assert_eq!(tb.value, -1);
            assert!(!tb.nonconvex_warning);
        }
        assert_eq!(set.tb_total().unwrap(), -4);
    }

    #[test]
    fn edge_mismatch_detected() {
        let tri = two_tet_closed();
        let text = "face 0 0 counts n01=1 n02=1 n12=1 closed=0\n";
        let err = load_dividing(tri, text).unwrap_err();
        assert!(matches!(err, DividingError::EdgeMismatch(_)));
    }

    #[test]
    fn uniform_counts_on_closed_complex_validate() {
        let tri = two_tet_closed();
        let text = (0..4)
            .map(|f| format!("face 0 {f} counts n01=1 n02=1 n12=1 closed=0\n"))
            .collect::<String>();
        let set = load_dividing(tri, &text).unwrap();
        assert_eq!(set.tb_total().unwrap(), -12);
        for e in 0..set.triangulation().global_edges().len() {
            let counts = set.edge_incidence_counts(GlobalEdgeId(e));
            assert!(counts.iter().all(|&(_, _, c)| c == 2));
        }
    }

    #[test]
    fn crossing_arcs_rejected() {
        let tri = one_tet();
        // Slots a<b<c<d on one boundary circle matched (a,c),(b,d).
        let text = "face 0 0 explicit slots e0=4 e1=0 e2=0 match (00,02) (01,03)\n";
        let err = load_dividing(tri, text).unwrap_err();
        assert!(matches!(err, DividingError::CrossingArcs(_)));
    }

    #[test]
    fn classification_buckets_partition() {
        let tri = one_tet();
        let text = "face 0 0 counts n01=3 n02=1 n12=2 bp=1:1:1 bp=2:0:2 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        let census = set.classify_arcs(GlobalFaceId(0));
        assert_eq!(census.normal, [3, 1, 2]);
        assert_eq!(census.bp_at(1, 1), 1);
        assert_eq!(census.bp_at(2, 0), 2);
        assert_eq!(census.arc_total(), set.face(GlobalFaceId(0)).arc_count());
    }

    #[test]
    fn single_mid_edge_arc_classified_bp() {
        let tri = one_tet();
        let text = "face 0 0 explicit slots e0=0 e1=0 e2=2 match (20,21)\n";
        let set = load_dividing(tri, text).unwrap();
        let census = set.classify_arcs(GlobalFaceId(0));
        assert_eq!(census.normal, [0, 0, 0]);
        assert_eq!(census.bp[2][0] + census.bp[2][1], 1);
    }

    #[test]
    fn empty_face_tb_warns() {
        let tri = one_tet();
        let set = DividingSet::empty(tri);
        let tb = set.tb_face(GlobalFaceId(0)).unwrap();
        assert_eq!(tb.value, 0);
        assert!(tb.nonconvex_warning);
        assert_eq!(set.tb_total().unwrap(), 0);
    }

    #[test]
    fn closed_components_detected_and_block_tb() {
        let tri = one_tet();
        let text = "face 0 1 counts n01=0 n02=0 n12=0 closed=2\n";
        let set = load_dividing(tri, text).unwrap();
        assert_eq!(set.detect_closed(), vec![(GlobalFaceId(1), 2)]);
        assert!(matches!(
            set.tb_face(GlobalFaceId(1)),
            Err(DividingError::ClosedComponent(_))
        ));
        assert!(set.tb_total().is_err());
    }

    #[test]
    fn serialize_roundtrip_counts_and_explicit() {
        let tri = one_tet();
        let text = "face 0 0 counts n01=2 n02=0 n12=1 bp=0:0:1 closed=0\nface 0 2 explicit slots e0=2 e1=2 e2=0 match (00,11) (01,10)\n";
        let set = load_dividing(tri.clone(), text).unwrap();
        let canon = set.serialize();
        let reload = load_dividing(tri, &canon).unwrap();
        assert_eq!(reload.serialize(), canon);
    }

    #[test]
    fn explicit_emitted_when_layout_noncanonical() {
        // Side-by-side bp arcs at one vertex end differ from the canonical
        // nested layout, so they serialize explicitly.
        let tri = one_tet();
        let text = "face 0 0 explicit slots e0=6 e1=0 e2=0 match (00,01) (02,03) (04,05)\n";
        let set = load_dividing(tri.clone(), text).unwrap();
        let canon = set.serialize();
        assert!(canon.contains("explicit"));
        let reload = load_dividing(tri, &canon).unwrap();
        assert_eq!(reload.serialize(), canon);
    }

    #[test]
    fn nested_bp_reproduces_counts_layout() {
        let tri = one_tet();
        let text = "face 0 0 counts n01=0 n02=0 n12=0 bp=0:0:2 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        assert_eq!(set.serialize(), text);
        let census = set.classify_arcs(GlobalFaceId(0));
        assert_eq!(census.bp_at(0, 0), 2);
    }

    #[test]
    fn catalan_counts_of_accepted_matchings() {
        // The planarity check accepts exactly the Catalan(m) non-crossing
        // perfect matchings of 2m cyclic slots.
        fn catalan(m: usize) -> usize {
            let mut c = vec![0usize; m + 1];
            c[0] = 1;
            for i in 1..=m {
                for j in 0..i {
                    c[i] += c[j] * c[i - 1 - j];
                }
            }
            c[m]
        }
        fn all_matchings(points: Vec<usize>) -> Vec<Vec<(usize, usize)>> {
            if points.is_empty() {
                return vec![Vec::new()];
            }
            let first = points[0];
            let mut out = Vec::new();
            for i in 1..points.len() {
                let mate = points[i];
                let rest: Vec<usize> = points[1..]
                    .iter()
                    .copied()
                    .filter(|&p| p != mate)
                    .collect();
                for mut matching in all_matchings(rest) {
                    matching.push((first, mate));
                    out.push(matching);
                }
            }
            out
        }
        for m in 1..=6usize {
            let all = all_matchings((0..2 * m).collect());
            let accepted = all
                .iter()
                .filter(|pairs| {
                    FaceDiagram::from_matching([2 * m, 0, 0], pairs, 0)
                        .unwrap()
                        .check_planar()
                        .is_ok()
                })
                .count();
            assert_eq!(accepted, catalan(m), "m = {m}");
        }
    }

    #[test]
    fn merge_site_rewires_and_detects_closed() {
        let diagram =
            FaceDiagram::from_matching([6, 0, 0], &[(0, 5), (1, 2), (3, 4)], 0).unwrap();
        // Merging at (2,3) joins the arcs (1,2) and (3,4) into (1,4)... the
        // partners of 2 and 3 are 1 and 4.
        let merged = diagram.apply_sites(&[MoveSite { lo: 2, kind: SiteKind::Merge }]).unwrap();
        assert_eq!(merged.arcs(), vec![(0, 3), (1, 2)]);
        assert!(merged.check_planar().is_ok());
        // Merging at (1,2) would close the arc (1,2).
        let err = diagram
            .apply_sites(&[MoveSite { lo: 1, kind: SiteKind::Merge }])
            .unwrap_err();
        assert_eq!(err, RewriteFault::CreatesClosed);
    }
}
