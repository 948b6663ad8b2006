//! TB-increasing edge-isotopy moves and fibered-prism extraction.
//!
//! A *bypass candidate* is a boundary-parallel arc whose cut-off half disk
//! is empty: both endpoints on one edge, in adjacent slots, away from the
//! two slots nearest either vertex. Removing it isotopes the edge across
//! the half disk. On the acted face the arc disappears; on every other face
//! sharing the (interior) edge, the two arcs ending at the vanished slots
//! join into one. Each affected face loses one arc, so the move strictly
//! increases the total Thurston–Bennequin sum and normalization terminates
//! within the initial endpoint budget.
//!
//! The adjacent-face rewrite is pluggable through [`AttachmentRule`]; the
//! default [`RotationRule`] joins the two vanished strands around the move
//! site, which is the unique non-crossing completion once the slots vanish.
//! A rewrite that would close a curve aborts the move: the input could not
//! have come from a tight structure.
//!
//! After normalization, parallel normal arc families pack into fibered
//! prisms: per tetrahedron up to four triangle-prism families (one per
//! vertex) and at most one rectangle-prism family (one of three opposite
//! edge-pair axes), seven positions in all. A triangle prism at vertex `v`
//! consumes one corner arc on each of the three faces at `v`; a rectangle
//! prism on a given axis consumes one arc of the axis-compatible corner
//! type on each of the four faces. Extraction maximizes packed arcs per
//! tetrahedron, and the per-face leftovers must stay within the configured
//! bound `C`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dividing::{
    corner_type, ArcClass, DividingError, DividingSet, FaceDiagram, MoveSite, RewriteFault,
    SiteKind,
};
use crate::tri::{face_vertices, FaceGluing, GlobalEdgeId, GlobalFaceId, TetFace, Triangulation};

/// Default bound on dividing-set components per face left outside all
/// prisms: six near-vertex arcs plus a margin of six for unpacked
/// minority-family arcs.
pub const DEFAULT_C_BOUND: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("closed dividing components present; input cannot be tight: {0:?}")]
    OvertwistedHint(Vec<(GlobalFaceId, usize)>),
    #[error("arc is not a bypass candidate")]
    NotACandidate,
    #[error("attachment rewrite on face {0:?} would create a closed component")]
    AttachmentCreatesClosed(GlobalFaceId),
    #[error("face {face:?} keeps {leftover} unpacked components, exceeding C = {bound}")]
    LeftoverExceedsC { face: GlobalFaceId, leftover: usize, bound: usize },
    #[error(transparent)]
    Dividing(#[from] DividingError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A bypass candidate: the arc at local slots `(lo_index, lo_index + 1)` of
/// boundary edge `face_edge` on the canonical frame of `face`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidateArc {
    pub face: GlobalFaceId,
    pub face_edge: u8,
    pub lo_index: usize,
}

/// Record of one applied edge-isotopy move.
#[derive(Debug, Clone)]
pub struct MoveRecord {
    pub face: GlobalFaceId,
    pub side: TetFace,
    pub face_edge: u8,
    pub lo_index: usize,
    pub edge: GlobalEdgeId,
    /// Adjacent faces rewritten, with the linear position merged.
    pub rewrites: Vec<(GlobalFaceId, usize)>,
    pub tb_before: i64,
    pub tb_after: i64,
}

/// Rewrite applied to each other face sharing the moved edge.
pub trait AttachmentRule {
    /// Rewrites `diagram` at the move site starting at linear position `lo`
    /// (the two positions `lo`, `lo + 1` vanish).
    fn rewrite(&self, diagram: &FaceDiagram, lo: usize) -> Result<FaceDiagram, RewriteFault>;
}

/// Default attachment: of the three endpoints nearest the move site, the
/// two vanished strands join around the move side, leaving the flanking
/// endpoint in place.
#[derive(Debug, Clone, Copy, Default)]
pub struct RotationRule;

impl AttachmentRule for RotationRule {
    fn rewrite(&self, diagram: &FaceDiagram, lo: usize) -> Result<FaceDiagram, RewriteFault> {
        diagram.apply_sites(&[MoveSite { lo, kind: SiteKind::Merge }])
    }
}

fn ensure_no_closed(set: &DividingSet) -> Result<(), NormalizeError> {
    let closed = set.detect_closed();
    if closed.is_empty() {
        Ok(())
    } else {
        Err(NormalizeError::OvertwistedHint(closed))
    }
}

/// All boundary-parallel arcs whose cut-off half disk contains no vertex
/// and no other endpoints, sorted by `(face, edge, slot)`.
///
/// Near-vertex arcs (occupying the two slots adjacent to a vertex) are
/// excluded, as are arcs on faces whose dividing set is connected.
pub fn find_bypass_candidates(set: &DividingSet) -> Result<Vec<CandidateArc>, NormalizeError> {
    ensure_no_closed(set)?;
    let mut out = Vec::new();
    for (i, diagram) in set.faces().iter().enumerate() {
        if diagram.arc_count() <= 1 {
            // A disk face with connected dividing set admits no bypass.
            continue;
        }
        for (lo, hi) in diagram.arcs() {
            if hi != lo + 1 {
                continue;
            }
            let (e1, i1) = diagram.slot_of(lo);
            let (e2, _) = diagram.slot_of(hi);
            if e1 != e2 {
                continue;
            }
            let m = diagram.edge_slots()[e1 as usize];
            if i1 == 0 || i1 + 2 == m {
                // Near-vertex: endpoints within distance-1 slots of a vertex.
                continue;
            }
            out.push(CandidateArc { face: GlobalFaceId(i), face_edge: e1, lo_index: i1 });
        }
    }
    out.sort();
    Ok(out)
}

/// Applies one edge-isotopy move with the default attachment rule.
pub fn apply_edge_isotopy(
    set: &DividingSet,
    candidate: CandidateArc,
) -> Result<(DividingSet, MoveRecord), NormalizeError> {
    apply_edge_isotopy_with(set, candidate, &RotationRule)
}

/// Applies one edge-isotopy move with a custom attachment rule.
pub fn apply_edge_isotopy_with(
    set: &DividingSet,
    candidate: CandidateArc,
    rule: &dyn AttachmentRule,
) -> Result<(DividingSet, MoveRecord), NormalizeError> {
    if !find_bypass_candidates(set)?.contains(&candidate) {
        return Err(NormalizeError::NotACandidate);
    }
    let tri = set.triangulation().clone();
    let tb_before = set.tb_total()?;
    let side = tri.face(candidate.face).canonical;
    let edge = tri.edge_id_of_face_edge(side.tet, side.face, candidate.face_edge);

    // Per-face rewrite sites, in the linear coordinates of each diagram.
    let mut sites: BTreeMap<usize, Vec<MoveSite>> = BTreeMap::new();
    let acted_diagram = set.face(candidate.face);
    let acted_lo = acted_diagram.position_of(candidate.face_edge, candidate.lo_index);
    sites
        .entry(candidate.face.0)
        .or_default()
        .push(MoveSite { lo: acted_lo, kind: SiteKind::Delete });

    if tri.edge(edge).interior {
        // Shared slots: translate the two vanished global slots into every
        // incidence's local frame.
        let m = set
            .edge_incidence_counts(edge)
            .first()
            .map(|&(_, _, c)| c)
            .unwrap_or(0);
        let forward = tri.face_edge_forward(side.tet, side.face, candidate.face_edge);
        let g = if forward { candidate.lo_index } else { m - 2 - candidate.lo_index };
        for inc in &tri.edge(edge).incidences {
            let (face, k) = set.canonical_incidence(inc.side, inc.face_edge);
            if (face, k) == (candidate.face, candidate.face_edge) {
                continue;
            }
            let canon = tri.face(face).canonical;
            let fwd = tri.face_edge_forward(canon.tet, canon.face, k);
            let lo_local = if fwd { g } else { m - 2 - g };
            let lo = set.face(face).position_of(k, lo_local);
            sites.entry(face.0).or_default().push(MoveSite { lo, kind: SiteKind::Merge });
        }
    }

    let mut rewrites = Vec::new();
    let mut faces = set.faces().to_vec();
    for (face_idx, face_sites) in &sites {
        let mut ordered = face_sites.clone();
        ordered.sort_by(|a, b| b.lo.cmp(&a.lo));
        let mut diagram = faces[*face_idx].clone();
        for site in ordered {
            let result = match site.kind {
                SiteKind::Delete => diagram.apply_sites(&[site]),
                SiteKind::Merge => rule.rewrite(&diagram, site.lo),
            };
            diagram = result.map_err(|fault| match fault {
                RewriteFault::CreatesClosed => {
                    NormalizeError::AttachmentCreatesClosed(GlobalFaceId(*face_idx))
                }
                other => NormalizeError::Internal(format!(
                    "rewrite fault {other:?} on face {face_idx}"
                )),
            })?;
            if site.kind == SiteKind::Merge {
                rewrites.push((GlobalFaceId(*face_idx), site.lo));
            }
        }
        faces[*face_idx] = diagram;
    }

    let next = DividingSet::from_parts(tri, faces);
    next.validate()?;
    let tb_after = next.tb_total()?;
    if tb_after < tb_before + 1 {
        return Err(NormalizeError::Internal(format!(
            "move failed to increase TB: {tb_before} -> {tb_after}"
        )));
    }
    let record = MoveRecord {
        face: candidate.face,
        side,
        face_edge: candidate.face_edge,
        lo_index: candidate.lo_index,
        edge,
        rewrites,
        tb_before,
        tb_after,
    };
    Ok((next, record))
}

/// Drives the dividing set to the fixpoint of candidate removal.
///
/// Candidates are processed in `(face, edge, slot)` order, so the result and
/// the move trace are pure functions of the input.
pub fn normalize(set: &DividingSet) -> Result<(DividingSet, Vec<MoveRecord>), NormalizeError> {
    let budget = set.endpoint_total();
    let mut current = set.clone();
    let mut records = Vec::new();
    loop {
        let candidates = find_bypass_candidates(&current)?;
        let Some(&first) = candidates.first() else {
            break;
        };
        let (next, record) = apply_edge_isotopy(&current, first)?;
        current = next;
        records.push(record);
        if records.len() > budget {
            return Err(NormalizeError::Internal(
                "normalization exceeded the endpoint budget".into(),
            ));
        }
    }
    Ok((current, records))
}

/// One-line-per-move trace in the `.moves` format.
pub fn serialize_moves(records: &[MoveRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "move face {} {} edge {} arc {} {} rewrites {} tb {} {}",
            r.side.tet,
            r.side.face,
            r.edge.0,
            r.face_edge,
            r.lo_index,
            r.rewrites.len(),
            r.tb_before,
            r.tb_after
        );
    }
    out
}

/// Rectangle-prism axes: opposite edge pairs of a tetrahedron, given as the
/// pairing each axis induces on the vertex labels.
pub const AXES: [[u8; 4]; 3] = [
    // axis 0: {0,1} | {2,3}
    [1, 0, 3, 2],
    // axis 1: {0,2} | {1,3}
    [2, 3, 0, 1],
    // axis 2: {0,3} | {1,2}
    [3, 2, 1, 0],
];

/// The vertex paired with `v` by the given axis.
pub fn axis_partner(axis: u8, v: u8) -> u8 {
    AXES[axis as usize][v as usize]
}

/// Prism counts of one tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TetPrisms {
    /// Triangle-prism families per vertex.
    pub tri: [u64; 4],
    /// The single allowed rectangle family.
    pub quad_axis: Option<u8>,
    pub quad: u64,
}

impl TetPrisms {
    /// Arcs this tetrahedron's prisms consume at corner `w` of its face `f`.
    pub fn consumed(&self, face: u8, w: u8) -> u64 {
        let mut c = self.tri[w as usize];
        if let Some(axis) = self.quad_axis {
            if axis_partner(axis, face) == w {
                c += self.quad;
            }
        }
        c
    }

    pub fn positions_used(&self) -> usize {
        self.tri.iter().filter(|&&t| t > 0).count() + usize::from(self.quad > 0)
    }
}

/// Prism coordinates with per-face leftovers.
#[derive(Debug, Clone)]
pub struct PrismCoordinates {
    pub c_bound: usize,
    pub tets: Vec<TetPrisms>,
    /// Unpacked normal arcs per global face, indexed like
    /// [`crate::dividing::NORMAL_TYPES`].
    pub leftover_normal: Vec<[u64; 3]>,
    /// Boundary-parallel arcs per global face (never packed).
    pub leftover_bp: Vec<usize>,
}

impl PrismCoordinates {
    pub fn leftover_total(&self, face: GlobalFaceId) -> usize {
        self.leftover_normal[face.0].iter().sum::<u64>() as usize + self.leftover_bp[face.0]
    }
}

/// Normal-arc counts of face `(t, f)` by corner vertex, in the tetrahedron's
/// own frame.
fn availability(set: &DividingSet, t: usize, f: u8) -> [u64; 4] {
    let tri = set.triangulation();
    let id = tri.face_id(t, f);
    let census = set.classify_arcs(id);
    let canonical = tri.face(id).canonical;
    let mut avail = [0u64; 4];
    for (label, &w) in face_vertices(f).iter().enumerate() {
        let canon_label = if canonical == (TetFace { tet: t, face: f }) {
            label as u8
        } else {
            match tri.gluing(t, f) {
                FaceGluing::Glued { perm, .. } => perm.apply(label as u8),
                FaceGluing::Boundary => unreachable!(),
            }
        };
        avail[w as usize] = census.normal[corner_type(canon_label)] as u64;
    }
    avail
}

/// Packs normal arc families into prisms, maximizing packed arcs per
/// tetrahedron.
pub fn extract_prisms(
    set: &DividingSet,
    c_bound: usize,
) -> Result<PrismCoordinates, NormalizeError> {
    ensure_no_closed(set)?;
    let tri = set.triangulation().clone();
    let mut tets = Vec::with_capacity(tri.tet_count());
    for t in 0..tri.tet_count() {
        // avail[f][w]: arcs available at corner w of face f.
        let mut avail = [[0u64; 4]; 4];
        for f in 0..4u8 {
            avail[f as usize] = availability(set, t, f);
        }
        let tri_fill = |quad_axis: Option<u8>, q: u64| -> TetPrisms {
            let mut prisms = TetPrisms { tri: [0; 4], quad_axis, quad: q };
            for w in 0..4u8 {
                let mut cap = u64::MAX;
                for f in 0..4u8 {
                    if f == w {
                        continue;
                    }
                    let mut a = avail[f as usize][w as usize];
                    if let Some(axis) = quad_axis {
                        if axis_partner(axis, f) == w {
                            a = a.saturating_sub(q);
                        }
                    }
                    cap = cap.min(a);
                }
                prisms.tri[w as usize] = cap;
            }
            prisms
        };
        let packed_total =
            |p: &TetPrisms| -> u64 { 3 * p.tri.iter().sum::<u64>() + 4 * p.quad };

        let mut best = tri_fill(None, 0);
        let mut best_packed = packed_total(&best);
        for axis in 0..3u8 {
            let q_max = (0..4u8)
                .map(|f| avail[f as usize][axis_partner(axis, f) as usize])
                .min()
                .unwrap();
            for q in (1..=q_max).rev() {
                let candidate = tri_fill(Some(axis), q);
                let packed = packed_total(&candidate);
                if packed > best_packed {
                    best = candidate;
                    best_packed = packed;
                }
            }
        }
        if best.quad == 0 {
            best.quad_axis = None;
        }
        tets.push(best);
    }

    // Leftovers per global face: availability minus the best coverage of
    // either side.
    let face_count = tri.global_faces().len();
    let mut leftover_normal = vec![[0u64; 3]; face_count];
    let mut leftover_bp = vec![0usize; face_count];
    for (i, gf) in tri.global_faces().iter().enumerate() {
        let census = set.classify_arcs(GlobalFaceId(i));
        leftover_bp[i] = census.bp_total();
        let covered = covered_by_type(set, &tets, i);
        for ty in 0..3 {
            let total = census.normal[ty] as u64;
            debug_assert!(covered[ty] <= total, "packing exceeded availability");
            leftover_normal[i][ty] = total - covered[ty].min(total);
        }
    }

    let coords = PrismCoordinates { c_bound, tets, leftover_normal, leftover_bp };
    for i in 0..face_count {
        let leftover = coords.leftover_total(GlobalFaceId(i));
        if leftover > c_bound {
            return Err(NormalizeError::LeftoverExceedsC {
                face: GlobalFaceId(i),
                leftover,
                bound: c_bound,
            });
        }
    }
    Ok(coords)
}

/// Arcs of each normal type on global face `i` covered by a prism of either
/// adjacent tetrahedron.
pub fn covered_by_type(set: &DividingSet, tets: &[TetPrisms], i: usize) -> [u64; 3] {
    let tri = set.triangulation();
    let gf = tri.face(GlobalFaceId(i));
    let mut covered = [0u64; 3];
    let mut sides = vec![gf.canonical];
    if let Some((other, _)) = gf.other {
        sides.push(other);
    }
    for side in sides {
        for (label, &w) in face_vertices(side.face).iter().enumerate() {
            let canon_label = if side == gf.canonical {
                label as u8
            } else {
                match tri.gluing(side.tet, side.face) {
                    FaceGluing::Glued { perm, .. } => perm.apply(label as u8),
                    FaceGluing::Boundary => unreachable!(),
                }
            };
            let ty = corner_type(canon_label);
            covered[ty] = covered[ty].max(tets[side.tet].consumed(side.face, w));
        }
    }
    covered
}

/// One-line-per-tetrahedron prism report.
pub fn serialize_prisms(coords: &PrismCoordinates, tri: &Triangulation) -> String {
    let mut out = String::new();
    for (t, prisms) in coords.tets.iter().enumerate() {
        let _ = write!(
            out,
            "tet {t} tri {} {} {} {} quad ",
            prisms.tri[0], prisms.tri[1], prisms.tri[2], prisms.tri[3]
        );
        match prisms.quad_axis {
            Some(axis) => {
                let _ = write!(out, "{axis} {}", prisms.quad);
            }
            None => {
                let _ = write!(out, "- 0");
            }
        }
        let leftovers: Vec<String> = (0..4u8)
            .map(|f| {
                let id = tri.face_id(t, f);
                format!("{f}:{}", coords.leftover_total(id))
            })
            .collect();
        let _ = writeln!(out, " leftover {}", leftovers.join(","));
    }
    out
}

/// Audits the normal form: at most six boundary-parallel arcs per face, all
/// of them near-vertex. Faces whose dividing set is connected are exempt
/// from the position check, since no bypass exists there.
pub fn audit_normal_form(set: &DividingSet) -> Result<(), String> {
    for (i, diagram) in set.faces().iter().enumerate() {
        let census = diagram.census();
        if census.bp_total() > 6 {
            return Err(format!(
                "face {i} keeps {} boundary-parallel arcs",
                census.bp_total()
            ));
        }
        if diagram.arc_count() <= 1 {
            continue;
        }
        for (lo, hi) in diagram.arcs() {
            if let ArcClass::BoundaryParallel { edge, .. } = diagram.classify_arc(lo, hi) {
                let (_, i1) = diagram.slot_of(lo);
                let (_, i2) = diagram.slot_of(hi);
                let m = diagram.edge_slots()[edge as usize];
                let near_vertex = i2 == i1 + 1 && (i1 == 0 || i1 + 2 == m);
                if !near_vertex {
                    return Err(format!(
                        "face {i} keeps a far-from-vertex boundary-parallel arc"
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dividing::load_dividing;
    use crate::tri::{FaceGluing, Perm3, Triangulation};
    use std::sync::Arc;

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
    fn mid_edge_bp_arc_is_candidate() {
        let tri = one_tet();
        let text = "face 0 0 explicit slots e0=6 e1=0 e2=0 match (00,05) (01,04) (02,03)\n";
        let set = load_dividing(tri, text).unwrap();
        let candidates = find_bypass_candidates(&set).unwrap();
        assert_eq!(
            candidates,
            vec![CandidateArc { face: GlobalFaceId(0), face_edge: 0, lo_index: 2 }]
        );
    }

    #[test]
    fn near_vertex_excluded() {
        let tri = one_tet();
        // One bp arc hugging each end of edge 0 plus a normal backdrop.
        let text = "face 0 0 counts n01=2 n02=1 n12=1 bp=0:0:1 bp=0:1:1 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        assert!(find_bypass_candidates(&set).unwrap().is_empty());
    }

    #[test]
    fn nested_candidates_found_inside_spanning_arcs() {
        let tri = one_tet();
        // Two nested arcs: the inner one is a candidate.
        let text = "face 0 0 explicit slots e0=4 e1=0 e2=0 match (01,02) (00,03)\n";
        let set = load_dividing(tri.clone(), text).unwrap();
        assert_eq!(find_bypass_candidates(&set).unwrap().len(), 1);

        let text = "face 0 0 explicit slots e0=0 e1=4 e2=0 match (11,12) (10,13)\n";
        let set = load_dividing(tri.clone(), text).unwrap();
        assert_eq!(find_bypass_candidates(&set).unwrap().len(), 1);

        // A mid-edge candidate under an arc spanning into another edge.
        let text = "face 0 0 explicit slots e0=4 e1=2 e2=0 match (00,11) (01,02) (03,10)\n";
        let set = load_dividing(tri, text).unwrap();
        assert_eq!(find_bypass_candidates(&set).unwrap().len(), 1);
    }

    #[test]
    fn connected_dividing_set_excluded() {
        let tri = one_tet();
        let text = "face 0 0 explicit slots e0=2 e1=0 e2=0 match (00,01)\n";
        let set = load_dividing(tri, text).unwrap();
        assert!(find_bypass_candidates(&set).unwrap().is_empty());
    }

    #[test]
    fn overtwisted_hint_on_closed() {
        let tri = one_tet();
        let text = "face 0 0 counts n01=0 n02=0 n12=0 closed=1\n";
        let set = load_dividing(tri, text).unwrap();
        assert!(matches!(
            find_bypass_candidates(&set),
            Err(NormalizeError::OvertwistedHint(_))
        ));
    }

    #[test]
    fn boundary_move_increases_tb_by_one() {
        let tri = one_tet();
        let text = "face 0 0 explicit slots e0=6 e1=0 e2=0 match (00,05) (01,04) (02,03)\n";
        let set = load_dividing(tri, text).unwrap();
        let candidate = find_bypass_candidates(&set).unwrap()[0];
        let (next, record) = apply_edge_isotopy(&set, candidate).unwrap();
        assert_eq!(record.tb_after, record.tb_before + 1);
        assert_eq!(next.tb_total().unwrap(), record.tb_after);
        assert!(record.rewrites.is_empty());
    }

    #[test]
    fn interior_move_rewrites_ring_and_recounts() {
        let tri = two_tet_closed();
        // Background: corner counts 1 per face gives 2 slots per edge. On
        // the two faces sharing tet edge {1,2} (faces 0 and 3), insert two
        // extra slots: a mid-edge bp arc on face 0, a split pair on face 3.
        //
        // Face 0 (vertices 1,2,3), canonical counts-1 layout:
        //   e0: [n02@0, n01@1], e1: [n01@0, n12@1], e2: [n12@0, n02@1]
        //   arcs: (e0 1, e1 0), (e1 1, e2 0), (e2 1, e0 0).
        // Insert bp at e0 slots (1,2): arcs (01,02), (00,21), (03,10),
        // (11,20).
        let face0 =
            "face 0 0 explicit slots e0=4 e1=2 e2=2 match (00,21) (01,02) (03,10) (11,20)\n";
        // Face 3 (vertices 0,1,2): its e1 is tet edge {1,2}; the canonical
        // direction of {1,2} makes face 0's e0 forward and face 3's e1
        // forward too (both traverse 1 -> 2). Split the arc through e1 by
        // inserting endpoints at e1 slots (1,2): original counts-1 arcs:
        // (e0 1, e1 0), (e1 1, e2 0), (e2 1, e0 0); after insertion the
        // n12-arc (e1 ?, e2 0) moves outward: new arcs (11,12) would be a
        // facing bp. Instead connect the new slots into the two crossing
        // arcs: (01,10), (11,20) become (01,10), (13,20), plus (11,12)?
        // That is the facing pair again. Route the split through different
        // arcs: (00,21) (01,10) (11,12) (13,20): slots e0=2 e1=4 e2=2.
        // (11,12) is again bp. There is no way to add 2 endpoints on e1
        // without either a bp arc or rerouting an arc through them; use
        // the rerouting form: cut arc (01,10) and reconnect through the
        // new slots: (01,11) and (10,12)? Keep planarity: positions on the
        // boundary cycle: e0:0,1 e1:2,3,4,5 e2:6,7 (linear). Arcs:
        // (0,7) n02, (1,2) n01, and n12 from e1 to e2: (5,6). New slots at
        // e1 indices 1,2 = linear 3,4: pair them with... make two parallel
        // n12 arcs: (4,6),(5,7)? Then (0,?) recount. Simplest consistent
        // choice: counts form with n12=2: face 3 counts n01=1 n02=1 n12=2
        // puts 2 extra endpoints on e1 *and* e2, which breaks edge {0,2}
        // against face 1. Accept the wider change: bump n12 on face 3 and
        // n02 on face 1 so every edge stays consistent... that cascades.
        //
        // The clean construction: give BOTH faces 0 and 3 a bp arc at the
        // same global slots but at DIFFERENT slot positions, so the merge
        // on face 3 joins two distinct arcs. Face 3 with bp at e1 slots
        // (0,1) (near-vertex on its side, global slots same as face 0's
        // mid-edge pair only if directions disagree)... The doubled complex
        // makes both faces traverse {1,2} the same way, so slots align and
        // positions (1,2) on one side are (1,2) on the other.
        //
        // Use the nested variant on face 3: bp at e1 (1,2) nested inside a
        // rerouted arc is impossible without crossings; instead give face 3
        // an outer arc spanning (10,13) and inner (11,12):
        let face3 =
            "face 0 3 explicit slots e0=2 e1=4 e2=2 match (00,13) (01,02) (03,10) (11,12)\n";
        let _ = face3;
        // (11,12) on face 3 sits at the same global slots as (01,02) on
        // face 0: the facing configuration. The move then aborts, which is
        // the attachment_creates_closed test below. For the success path,
        // reroute face 3's crossing arcs through the new slots:
        // arcs: (e0 0, e1 1) and (e1 2, e2 ...): full matching:
        // slots e0=2 e1=4 e2=2: pairs (00,11) (01,10) (12,21) (13,20):
        // check planarity: linear 0..8: (0,3),(1,2),(4,7),(5,6): nested OK.
        let face3_ok = "face 0 3 explicit slots e0=2 e1=4 e2=2 match (00,11) (01,10) (12,21) (13,20)\n";
        let rest = "face 0 1 counts n01=1 n02=1 n12=1 closed=0\nface 0 2 counts n01=1 n02=1 n12=1 closed=0\n";
        let text = format!("{face0}{face3_ok}{rest}");
        let set = load_dividing(tri.clone(), &text).unwrap();
        let candidates = find_bypass_candidates(&set).unwrap();
        let cand = candidates
            .iter()
            .copied()
            .find(|c| c.face == GlobalFaceId(0))
            .expect("face 0 bp arc is a candidate");
        let (next, record) = apply_edge_isotopy(&set, cand).unwrap();
        assert!(record.tb_after >= record.tb_before + 1);
        assert_eq!(next.tb_total().unwrap(), record.tb_after);
        assert_eq!(record.rewrites.len(), 1);
        next.validate().unwrap();
    }

    #[test]
    fn facing_bp_pairs_abort() {
        let tri = two_tet_closed();
        let face0 =
            "face 0 0 explicit slots e0=4 e1=2 e2=2 match (00,21) (01,02) (03,10) (11,20)\n";
        let face3 =
            "face 0 3 explicit slots e0=2 e1=4 e2=2 match (00,13) (01,02) (03,10) (11,12)\n";
        let rest = "face 0 1 counts n01=1 n02=1 n12=1 closed=0\nface 0 2 counts n01=1 n02=1 n12=1 closed=0\n";
        let text = format!("{face0}{face3}{rest}");
        let set = load_dividing(tri, &text).unwrap();
        let candidates = find_bypass_candidates(&set).unwrap();
        assert!(!candidates.is_empty());
        let err = apply_edge_isotopy(&set, candidates[0]).unwrap_err();
        assert!(matches!(err, NormalizeError::AttachmentCreatesClosed(_)));
    }

    #[test]
    fn normalize_reaches_fixpoint_within_budget() {
        let tri = one_tet();
        let text =
            "face 0 0 explicit slots e0=8 e1=0 e2=0 match (00,07) (01,06) (02,05) (03,04)\n";
        let set = load_dividing(tri, text).unwrap();
        let budget = set.endpoint_total();
        let (normal, records) = normalize(&set).unwrap();
        assert!(records.len() <= budget);
        assert!(find_bypass_candidates(&normal).unwrap().is_empty());
        for r in &records {
            assert!(r.tb_after >= r.tb_before + 1);
        }
        let (again, moves) = normalize(&normal).unwrap();
        assert!(moves.is_empty());
        assert_eq!(again.serialize(), normal.serialize());
    }

    #[test]
    fn triangle_prism_consumes_corner_arcs() {
        let tri = one_tet();
        // One corner arc at tet vertex 0 on each of its three faces 1,2,3;
        // vertex 0 is face-vertex label 0 there, cut by type n02.
        let text = "face 0 1 counts n01=0 n02=1 n12=0 closed=0\nface 0 2 counts n01=0 n02=1 n12=0 closed=0\nface 0 3 counts n01=0 n02=1 n12=0 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        let coords = extract_prisms(&set, DEFAULT_C_BOUND).unwrap();
        assert_eq!(coords.tets[0].tri, [1, 0, 0, 0]);
        assert_eq!(coords.tets[0].quad, 0);
        for i in 0..4 {
            assert_eq!(coords.leftover_total(GlobalFaceId(i)), 0);
        }
    }

    #[test]
    fn rectangle_prism_consumes_quad_family() {
        let tri = one_tet();
        // Axis 0 pairs {0,1}|{2,3}: corner cut on face f is partner(f):
        // faces 0,1 cut at vertex label 0 (n02), faces 2,3 at label 2 (n12).
        let text = "face 0 0 counts n01=0 n02=1 n12=0 closed=0\nface 0 1 counts n01=0 n02=1 n12=0 closed=0\nface 0 2 counts n01=0 n02=0 n12=1 closed=0\nface 0 3 counts n01=0 n02=0 n12=1 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        let coords = extract_prisms(&set, DEFAULT_C_BOUND).unwrap();
        assert_eq!(coords.tets[0].tri, [0, 0, 0, 0]);
        assert_eq!(coords.tets[0].quad_axis, Some(0));
        assert_eq!(coords.tets[0].quad, 1);
        for i in 0..4 {
            assert_eq!(coords.leftover_total(GlobalFaceId(i)), 0);
        }
    }

    #[test]
    fn majority_quad_family_packed_minority_left() {
        let tri = one_tet();
        // Axis 0 family of size 5, axis 1 family of size 2. Axis 1 pairs
        // {0,2}|{1,3}: corners: face 0 -> vertex 2 (label 1, n01), face 1 ->
        // vertex 3 (label 2, n12), face 2 -> vertex 0 (label 0, n02),
        // face 3 -> vertex 1 (label 1, n01).
        let text = "face 0 0 counts n01=2 n02=5 n12=0 closed=0\n\
                    face 0 1 counts n01=0 n02=5 n12=2 closed=0\n\
                    face 0 2 counts n01=0 n02=2 n12=5 closed=0\n\
                    face 0 3 counts n01=2 n02=0 n12=5 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        let coords = extract_prisms(&set, DEFAULT_C_BOUND).unwrap();
        assert_eq!(coords.tets[0].quad_axis, Some(0));
        assert_eq!(coords.tets[0].quad, 5);
        assert_eq!(coords.tets[0].tri, [0, 0, 0, 0]);
        for i in 0..4 {
            assert_eq!(coords.leftover_total(GlobalFaceId(i)), 2);
        }
        assert!(coords.tets[0].positions_used() <= 5);
    }

    #[test]
    fn leftover_bound_enforced() {
        let tri = one_tet();
        let text = "face 0 0 counts n01=20 n02=0 n12=0 closed=0\n";
        let set = load_dividing(tri, text).unwrap();
        let err = extract_prisms(&set, 12).unwrap_err();
        assert!(matches!(err, NormalizeError::LeftoverExceedsC { .. }));
    }

    #[test]
    fn packing_conserves_arcs_per_type() {
        let tri = two_tet_closed();
        let text: String = (0..4)
            .map(|f| format!("face 0 {f} counts n01=2 n02=3 n12=1 closed=0\n"))
            .collect();
        let set = load_dividing(tri.clone(), &text).unwrap();
        let coords = extract_prisms(&set, DEFAULT_C_BOUND).unwrap();
        for i in 0..tri.global_faces().len() {
            let census = set.classify_arcs(GlobalFaceId(i));
            let covered = covered_by_type(&set, &coords.tets, i);
            for ty in 0..3 {
                assert_eq!(
                    covered[ty] + coords.leftover_normal[i][ty],
                    census.normal[ty] as u64,
                    "face {i} type {ty}"
                );
            }
        }
    }
}
