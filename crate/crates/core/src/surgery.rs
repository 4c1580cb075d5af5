//! Contour surgery on the primal grid: boundary-preserving completion of
//! a 3x3 dual box, the inductive box merge that joins all boundary-crossing
//! contours into one, and face-flip reachability between configurations
//! with equal boundary.
//!
//! Everything here works in the primal-only world: configurations whose
//! dual edges are all absent. Index conventions (integer, exact):
//!
//! - dual-grid vertex `(a, b)` sits at `(2a + 1/2, 2b + 3/2)`;
//! - primal-grid vertex `(c, d)` sits at `(2c - 1/2, 2d + 1/2)`;
//! - the horizontal primal edge `(c,d)-(c+1,d)` crosses the vertical dual
//!   edge `(a=c, b=d-1)-(a=c, b=d)` and runs through the black face with
//!   lower-left `(2c, 2d)`;
//! - the vertical primal edge `(c,d)-(c,d+1)` crosses the horizontal dual
//!   edge `(c-1, d)-(c, d)` and runs through the black face `(2c-1, 2d+1)`.

use crate::constrained::ContourConfig;
use crate::lattice::{ContourEdgeId, Domain, DomainKind, FaceId, Grid, QPoint};
use crate::topology::extract_contours;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("surgery box must be at least 3x3 faces, got {rows}x{cols}")]
    BoxTooSmall { rows: i32, cols: i32 },
    #[error("boundary is crossed an odd number of times ({count})")]
    OddBoundaryParity { count: usize },
    #[error("surgery box does not fit inside the domain")]
    BoxOutsideDomain,
    #[error("surgery operates on primal-only configurations")]
    NotPrimal,
    #[error("surgery is defined on planar box domains")]
    TorusUnsupported,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("configurations are not connected by inner face flips")]
    Unreachable,
}

/// Vertex of the dual grid, in box index coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualSite {
    pub a: i32,
    pub b: i32,
}

impl DualSite {
    pub fn new(a: i32, b: i32) -> Self {
        DualSite { a, b }
    }
}

/// Edge of the primal grid in box index coordinates; see the module docs
/// for the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimalEdge {
    pub c: i32,
    pub d: i32,
    pub horizontal: bool,
}

impl PrimalEdge {
    pub fn horizontal(c: i32, d: i32) -> Self {
        PrimalEdge { c, d, horizontal: true }
    }

    pub fn vertical(c: i32, d: i32) -> Self {
        PrimalEdge { c, d, horizontal: false }
    }

    /// The contour edge this primal edge is, in lattice terms.
    pub fn contour_edge(&self) -> ContourEdgeId {
        let face = if self.horizontal {
            FaceId::new(2 * self.c, 2 * self.d)
        } else {
            FaceId::new(2 * self.c - 1, 2 * self.d + 1)
        };
        ContourEdgeId::new(face, Grid::Primal)
    }

    /// The two dual sites separated by this edge.
    pub fn separates(&self) -> [DualSite; 2] {
        if self.horizontal {
            [DualSite::new(self.c, self.d - 1), DualSite::new(self.c, self.d)]
        } else {
            [DualSite::new(self.c - 1, self.d), DualSite::new(self.c, self.d)]
        }
    }
}

/// An M x N box of dual-grid faces, anchored by the growth rule: the 1x1
/// box is the dual face containing the origin; columns are appended
/// alternately right and left, rows alternately bottom and top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryBox {
    /// Face rows (M).
    pub rows: i32,
    /// Face columns (N).
    pub cols: i32,
    pub(crate) a_min: i32,
    pub(crate) b_min: i32,
}

impl SurgeryBox {
    /// The anchored box with `rows` x `cols` faces; both must be >= 3.
    pub fn anchored(rows: i32, cols: i32) -> Result<Self, SurgeryError> {
        if rows < 3 || cols < 3 {
            return Err(SurgeryError::BoxTooSmall { rows, cols });
        }
        Ok(Self::anchored_any(rows, cols))
    }

    pub(crate) fn anchored_any(rows: i32, cols: i32) -> Self {
        SurgeryBox {
            rows,
            cols,
            a_min: -1 - (cols - 1) / 2,
            b_min: -1 - rows / 2,
        }
    }

    pub fn a_range(&self) -> std::ops::RangeInclusive<i32> {
        self.a_min..=self.a_min + self.cols
    }

    pub fn b_range(&self) -> std::ops::RangeInclusive<i32> {
        self.b_min..=self.b_min + self.rows
    }

    fn a_max(&self) -> i32 {
        self.a_min + self.cols
    }

    fn b_max(&self) -> i32 {
        self.b_min + self.rows
    }

    /// All dual sites of the closed box (the set U).
    pub fn dual_sites(&self) -> Vec<DualSite> {
        let mut out = Vec::new();
        for b in self.b_range() {
            for a in self.a_range() {
                out.push(DualSite::new(a, b));
            }
        }
        out
    }

    /// Strictly inner dual sites (the set V), row-major.
    pub fn inner_sites(&self) -> Vec<DualSite> {
        let mut out = Vec::new();
        for b in self.b_min + 1..self.b_max() {
            for a in self.a_min + 1..self.a_max() {
                out.push(DualSite::new(a, b));
            }
        }
        out
    }

    pub fn is_inner(&self, s: DualSite) -> bool {
        s.a > self.a_min && s.a < self.a_max() && s.b > self.b_min && s.b < self.b_max()
    }

    /// Ring sites (U minus V) in boundary-cycle order, starting at the
    /// lower-left corner and walking east, north, west, south.
    pub fn ring_sites(&self) -> Vec<DualSite> {
        let (a0, a1, b0, b1) = (self.a_min, self.a_max(), self.b_min, self.b_max());
        let mut out = Vec::new();
        for a in a0..a1 {
            out.push(DualSite::new(a, b0));
        }
        for b in b0..b1 {
            out.push(DualSite::new(a1, b));
        }
        for a in ((a0 + 1)..=a1).rev() {
            out.push(DualSite::new(a, b1));
        }
        for b in ((b0 + 1)..=b1).rev() {
            out.push(DualSite::new(a0, b));
        }
        out
    }

    /// Primal edges crossing the box boundary (the set E).
    pub fn crossing_edges(&self) -> Vec<PrimalEdge> {
        let (a0, a1, b0, b1) = (self.a_min, self.a_max(), self.b_min, self.b_max());
        let mut out = Vec::new();
        for d in b0 + 1..=b1 {
            out.push(PrimalEdge::horizontal(a0, d));
            out.push(PrimalEdge::horizontal(a1, d));
        }
        for c in a0 + 1..=a1 {
            out.push(PrimalEdge::vertical(c, b0));
            out.push(PrimalEdge::vertical(c, b1));
        }
        out
    }

    /// Primal edges strictly inside the box (the set F).
    pub fn inner_edges(&self) -> Vec<PrimalEdge> {
        let (a0, a1, b0, b1) = (self.a_min, self.a_max(), self.b_min, self.b_max());
        let mut out = Vec::new();
        for d in b0 + 1..=b1 {
            for c in a0 + 1..a1 {
                out.push(PrimalEdge::horizontal(c, d));
            }
        }
        for d in b0 + 1..b1 {
            for c in a0 + 1..=a1 {
                out.push(PrimalEdge::vertical(c, d));
            }
        }
        out
    }

    /// Interior primal vertices, row-major.
    pub fn interior_vertices(&self) -> Vec<(i32, i32)> {
        let mut out = Vec::new();
        for d in self.b_min + 1..=self.b_max() {
            for c in self.a_min + 1..=self.a_max() {
                out.push((c, d));
            }
        }
        out
    }

    /// True when every crossing and inner edge of the box exists in `d`.
    pub fn fits(&self, d: &Domain) -> bool {
        self.crossing_edges()
            .iter()
            .chain(self.inner_edges().iter())
            .all(|e| d.contains_face(e.contour_edge().face))
    }
}

fn present(cfg: &ContourConfig, e: PrimalEdge) -> bool {
    cfg.is_present(e.contour_edge())
}

fn set_edge(cfg: &mut ContourConfig, e: PrimalEdge, v: bool) {
    cfg.set(e.contour_edge(), v)
        .expect("primal-only configuration cannot cross");
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub count: usize,
    pub even: bool,
}

/// Count the present primal edges crossing the box boundary. Edges whose
/// black face falls outside the domain are absent by definition.
pub fn boundary_crossing_parity(cfg: &ContourConfig, bx: &SurgeryBox) -> Crossing {
    let count = bx
        .crossing_edges()
        .iter()
        .filter(|e| cfg.domain().contains_face(e.contour_edge().face) && present(cfg, **e))
        .count();
    Crossing { count, even: count % 2 == 0 }
}

// ---------------------------------------------------------------------------
// Completion of the 3x3 box
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CornerKind {
    Double,
    Single,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerInfo {
    pub kind: CornerKind,
    /// Inner dual site diagonal to the corner.
    pub w: DualSite,
    /// Outer dual corner site opposite `w`.
    pub u: DualSite,
    /// For a double corner: the parity (-1)^(i + state(u_i)), encoded as
    /// (i + state) mod 2 with 1-based counterclockwise corner index i.
    pub parity: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerAnalysis {
    /// Counterclockwise from the lower-left corner.
    pub corners: [CornerInfo; 4],
    pub double_count: usize,
}

/// Classify the four corners of a 3x3 box from the ring states.
pub fn analyze_corners(bx: &SurgeryBox, ring: &HashMap<DualSite, bool>) -> CornerAnalysis {
    assert_eq!((bx.rows, bx.cols), (3, 3), "corner analysis is for 3x3 boxes");
    let (a0, a1, b0, b1) = (bx.a_min, bx.a_max(), bx.b_min, bx.b_max());
    let g = |s: DualSite| -> bool { *ring.get(&s).expect("ring site state") };
    let corner_defs = [
        (DualSite::new(a0, b0), DualSite::new(a0 + 1, b0 + 1)),
        (DualSite::new(a1, b0), DualSite::new(a1 - 1, b0 + 1)),
        (DualSite::new(a1, b1), DualSite::new(a1 - 1, b1 - 1)),
        (DualSite::new(a0, b1), DualSite::new(a0 + 1, b1 - 1)),
    ];
    let mut corners = Vec::with_capacity(4);
    let mut doubles = 0;
    for (i, (u, w)) in corner_defs.iter().enumerate() {
        // The corner's two boundary edges cross the two ring dual edges
        // incident to u; they are present where the ring states disagree.
        let vert_nb = DualSite::new(u.a, if u.b == b0 { b0 + 1 } else { b1 - 1 });
        let horiz_nb = DualSite::new(if u.a == a0 { a0 + 1 } else { a1 - 1 }, u.b);
        let e1 = g(*u) != g(vert_nb);
        let e2 = g(*u) != g(horiz_nb);
        let kind = match (e1, e2) {
            (true, true) => CornerKind::Double,
            (false, false) => CornerKind::Neither,
            _ => CornerKind::Single,
        };
        let parity = if kind == CornerKind::Double {
            doubles += 1;
            Some(((i + 1) + usize::from(g(*u))) % 2 == 1)
        } else {
            None
        };
        corners.push(CornerInfo { kind, w: *w, u: *u, parity });
    }
    CornerAnalysis {
        corners: [corners[0], corners[1], corners[2], corners[3]],
        double_count: doubles,
    }
}

/// Core of the 3x3 completion: choose inner dual states so that the
/// induced primal configuration has even interior degrees, all present
/// edges in one contour containing the four side midpoints, and the
/// diagonal rule at every double corner.
///
/// `honor_opp` exists for fault injection in the surgery suite's negative
/// control; production callers pass `true`.
pub(crate) fn extend_b33_impl(
    bx: &SurgeryBox,
    ring: &HashMap<DualSite, bool>,
    honor_opp: bool,
) -> Vec<(DualSite, bool)> {
    let analysis = analyze_corners(bx, ring);
    let g = |s: DualSite| -> bool { *ring.get(&s).expect("ring site state") };
    // Deterministic preference order for free choices: the site nearest
    // the origin of the anchored box (w2), then w1, w3, w4.
    let prefer = [
        analysis.corners[1].w,
        analysis.corners[0].w,
        analysis.corners[2].w,
        analysis.corners[3].w,
    ];
    let doubles: Vec<usize> = (0..4)
        .filter(|&i| honor_opp && analysis.corners[i].kind == CornerKind::Double)
        .collect();
    let k = doubles.len();
    let same_parity = doubles
        .windows(2)
        .all(|w| analysis.corners[w[0]].parity == analysis.corners[w[1]].parity);
    let mut assign: HashMap<DualSite, bool> = HashMap::new();
    if k >= 3 {
        // The corner stars alone connect everything; free sites default 0.
        for &i in &doubles {
            assign.insert(analysis.corners[i].w, g(analysis.corners[i].u));
        }
        for site in prefer {
            assign.entry(site).or_insert(false);
        }
    } else if same_parity {
        // One checkerboard satisfies the diagonal rule at every double
        // corner. Classes: {w1, w3} against {w2, w4}.
        let class = |i: usize| i % 2 == 0;
        let mut class0_value: Option<bool> = None;
        for &i in &doubles {
            let v = g(analysis.corners[i].u);
            let c0 = if class(i) { v } else { !v };
            debug_assert!(class0_value.is_none_or(|x| x == c0));
            class0_value = Some(c0);
        }
        // Free choice (K = 0): make the preferred site w2 read 0.
        let c0 = class0_value.unwrap_or(true);
        for (i, corner) in analysis.corners.iter().enumerate() {
            assign.insert(corner.w, if class(i) { c0 } else { !c0 });
        }
    } else {
        // K = 2 with different parities: diagonal rule at both double
        // corners; the two remaining sites must differ from each other.
        for &i in &doubles {
            assign.insert(analysis.corners[i].w, g(analysis.corners[i].u));
        }
        let free: Vec<DualSite> =
            prefer.iter().copied().filter(|s| !assign.contains_key(s)).collect();
        debug_assert_eq!(free.len(), 2);
        assign.insert(free[0], false);
        assign.insert(free[1], true);
    }
    bx.inner_sites().into_iter().map(|s| (s, assign[&s])).collect()
}

/// Ring-site states of the anchored 3x3 box from 12 bits in row-major
/// order over the 4x4 dual grid with the inner 2x2 skipped.
pub fn b33_ring_from_bits(bits: &[bool; 12]) -> HashMap<DualSite, bool> {
    let bx = SurgeryBox::anchored_any(3, 3);
    let mut out = HashMap::new();
    let mut k = 0;
    for b in bx.b_range() {
        for a in bx.a_range() {
            let s = DualSite::new(a, b);
            if bx.is_inner(s) {
                continue;
            }
            out.insert(s, bits[k]);
            k += 1;
        }
    }
    debug_assert_eq!(k, 12);
    out
}

/// Boundary completion of the anchored 3x3 box. Input: states of the 12
/// ring sites, row-major; output: states of the 4 inner sites, row-major.
pub fn extend_b33(boundary: &[bool; 12]) -> [bool; 4] {
    let bx = SurgeryBox::anchored_any(3, 3);
    let ring = b33_ring_from_bits(boundary);
    let inner = extend_b33_impl(&bx, &ring, true);
    [inner[0].1, inner[1].1, inner[2].1, inner[3].1]
}

// ---------------------------------------------------------------------------
// Inductive merge
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    West,
    East,
    South,
    North,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Rect {
    a0: i32,
    a1: i32,
    b0: i32,
    b1: i32,
}

impl Rect {
    fn of(bx: &SurgeryBox) -> Rect {
        Rect {
            a0: bx.a_min,
            a1: bx.a_min + bx.cols,
            b0: bx.b_min,
            b1: bx.b_min + bx.rows,
        }
    }

    fn cols(&self) -> i32 {
        self.a1 - self.a0
    }

    fn rows(&self) -> i32 {
        self.b1 - self.b0
    }

    fn shrink(&self, side: Side) -> Rect {
        let mut r = *self;
        match side {
            Side::West => r.a0 += 1,
            Side::East => r.a1 -= 1,
            Side::South => r.b0 += 1,
            Side::North => r.b1 -= 1,
        }
        r
    }

    fn to_box(self) -> SurgeryBox {
        SurgeryBox {
            rows: self.rows(),
            cols: self.cols(),
            a_min: self.a0,
            b_min: self.b0,
        }
    }
}

/// The strip of interior primal vertices shed with one line of faces,
/// with all the edges the edit manipulates.
struct Strip {
    len: usize,
    /// Old-boundary crossing edge at each strip vertex.
    outward: Vec<PrimalEdge>,
    /// New-boundary crossing edge at each strip vertex.
    inward: Vec<PrimalEdge>,
    /// Segment edges between consecutive strip vertices (len - 1).
    seg: Vec<PrimalEdge>,
    /// Crossing edges just beyond the first / last strip vertex.
    end_lo: PrimalEdge,
    end_hi: PrimalEdge,
}

fn strip_for(r: &Rect, side: Side) -> Strip {
    let (a0, a1, b0, b1) = (r.a0, r.a1, r.b0, r.b1);
    match side {
        Side::West | Side::East => {
            let c = if side == Side::West { a0 + 1 } else { a1 };
            let (out_c, in_c) = if side == Side::West { (a0, a0 + 1) } else { (a1, a1 - 1) };
            let ds: Vec<i32> = (b0 + 1..=b1).collect();
            Strip {
                len: ds.len(),
                outward: ds.iter().map(|&d| PrimalEdge::horizontal(out_c, d)).collect(),
                inward: ds.iter().map(|&d| PrimalEdge::horizontal(in_c, d)).collect(),
                seg: ds[..ds.len() - 1].iter().map(|&d| PrimalEdge::vertical(c, d)).collect(),
                end_lo: PrimalEdge::vertical(c, b0),
                end_hi: PrimalEdge::vertical(c, b1),
            }
        }
        Side::South | Side::North => {
            let d = if side == Side::South { b0 + 1 } else { b1 };
            let (out_d, in_d) = if side == Side::South { (b0, b0 + 1) } else { (b1, b1 - 1) };
            let cs: Vec<i32> = (a0 + 1..=a1).collect();
            Strip {
                len: cs.len(),
                outward: cs.iter().map(|&c| PrimalEdge::vertical(c, out_d)).collect(),
                inward: cs.iter().map(|&c| PrimalEdge::vertical(c, in_d)).collect(),
                seg: cs[..cs.len() - 1].iter().map(|&c| PrimalEdge::horizontal(c, d)).collect(),
                end_lo: PrimalEdge::horizontal(a0, d),
                end_hi: PrimalEdge::horizontal(a1, d),
            }
        }
    }
}

/// One reduction step: clear the box interior, extend the shed side's
/// crossings to the shrunk boundary, and fix parity at the strip corners.
/// The segment move (both end crossings present) additionally routes the
/// segment into the shrunk box when no side crossing attaches it, so that
/// the recursion can pull it into the single contour.
fn strip_edit(cfg: &mut ContourConfig, r: &Rect, side: Side) {
    let strip = strip_for(r, side);
    // Step I: make every interior edge absent.
    for e in r.to_box().inner_edges() {
        set_edge(cfg, e, false);
    }
    // Step II: extend each present crossing of the shed side inward.
    let outward_present: Vec<bool> = strip.outward.iter().map(|&e| present(cfg, e)).collect();
    for (t, &p) in outward_present.iter().enumerate() {
        if p {
            set_edge(cfg, strip.inward[t], true);
        }
    }
    let lo = present(cfg, strip.end_lo);
    let hi = present(cfg, strip.end_hi);
    let any_outward = outward_present.iter().any(|&p| p);
    match (lo, hi) {
        (false, false) => {}
        (true, true) => {
            // Step III: join the two end crossings along the strip.
            for &e in &strip.seg {
                set_edge(cfg, e, true);
            }
            if !any_outward {
                // No side chain attaches the segment to the new boundary:
                // open its last edge and route both loose ends inward.
                set_edge(cfg, strip.seg[strip.len - 2], false);
                set_edge(cfg, strip.inward[strip.len - 1], true);
                set_edge(cfg, strip.inward[strip.len - 2], true);
            }
        }
        (one_lo, _) => {
            // Step IV: exactly one end crossing present.
            let k = if one_lo { 0 } else { strip.len - 1 };
            let f1 = strip.outward[k];
            let f2 = strip.inward[k];
            if !present(cfg, f1) {
                set_edge(cfg, f2, true);
            } else {
                let (f3, un) = if one_lo {
                    (strip.seg[0], 1)
                } else {
                    (strip.seg[strip.len - 2], strip.len - 2)
                };
                set_edge(cfg, f3, true);
                let f4 = strip.outward[un];
                let f5 = strip.inward[un];
                if !present(cfg, f4) {
                    set_edge(cfg, f5, true);
                } else {
                    set_edge(cfg, f5, false);
                }
            }
        }
    }
}

/// Which side the anchored box sheds when one dimension shrinks by one;
/// the reverse of the growth rule.
fn shed_side(rows: i32, cols: i32, shrink_cols: bool) -> Side {
    if shrink_cols {
        if cols % 2 == 0 { Side::East } else { Side::West }
    } else if rows % 2 == 0 {
        Side::South
    } else {
        Side::North
    }
}

fn check_primal_only(cfg: &ContourConfig) -> Result<(), SurgeryError> {
    if cfg.present_edges().any(|e| e.grid == Grid::Dual) {
        return Err(SurgeryError::NotPrimal);
    }
    Ok(())
}

/// Rewrite the interior of the box so that all present primal edges
/// crossing its boundary lie in one contour and every interior primal
/// vertex has even degree. Edges outside the box are never touched.
pub fn merge_box(cfg: &ContourConfig, bx: &SurgeryBox) -> Result<ContourConfig, SurgeryError> {
    if bx.rows < 3 || bx.cols < 3 {
        return Err(SurgeryError::BoxTooSmall { rows: bx.rows, cols: bx.cols });
    }
    if cfg.domain().kind != DomainKind::PlanarBox {
        return Err(SurgeryError::TorusUnsupported);
    }
    check_primal_only(cfg)?;
    if !bx.fits(cfg.domain()) {
        return Err(SurgeryError::BoxOutsideDomain);
    }
    let crossing = boundary_crossing_parity(cfg, bx);
    if !crossing.even {
        return Err(SurgeryError::OddBoundaryParity { count: crossing.count });
    }
    let mut out = cfg.clone();
    let mut r = Rect::of(bx);
    while r.cols() > 3 || r.rows() > 3 {
        let shrink_cols = r.cols() > 3 && (r.cols() >= r.rows() || r.rows() == 3);
        let side = shed_side(r.rows(), r.cols(), shrink_cols);
        strip_edit(&mut out, &r, side);
        r = r.shrink(side);
    }
    complete_b33(&mut out, &r.to_box());
    Ok(out)
}

/// Base case: lift the boundary crossings to ring states, complete, and
/// write the inner edges from the full dual assignment.
fn complete_b33(cfg: &mut ContourConfig, bx: &SurgeryBox) {
    let ring_sites = bx.ring_sites();
    let mut ring: HashMap<DualSite, bool> = HashMap::new();
    let mut cur = false;
    ring.insert(ring_sites[0], cur);
    for w in ring_sites.windows(2) {
        let crossed = present(cfg, edge_separating(w[0], w[1]));
        cur ^= crossed;
        ring.insert(w[1], cur);
    }
    let first = *ring_sites.first().unwrap();
    let last = *ring_sites.last().unwrap();
    let closing = present(cfg, edge_separating(last, first));
    assert_eq!(
        ring[&first],
        ring[&last] ^ closing,
        "boundary crossing parity must be even at the base case"
    );
    let inner = extend_b33_impl(bx, &ring, true);
    let mut all: HashMap<DualSite, bool> = ring;
    all.extend(inner.iter().copied());
    for e in bx.inner_edges() {
        let [p, q] = e.separates();
        set_edge(cfg, e, all[&p] != all[&q]);
    }
}

/// The primal edge separating two adjacent dual sites.
fn edge_separating(p: DualSite, q: DualSite) -> PrimalEdge {
    let (lo, hi) = if (p.a, p.b) <= (q.a, q.b) { (p, q) } else { (q, p) };
    if lo.a == hi.a {
        debug_assert_eq!(lo.b + 1, hi.b);
        PrimalEdge::horizontal(lo.a, hi.b)
    } else {
        debug_assert_eq!(lo.a + 1, hi.a);
        PrimalEdge::vertical(hi.a, lo.b)
    }
}

// ---------------------------------------------------------------------------
// Face-flip reachability
// ---------------------------------------------------------------------------

/// Toggle the four sides of the primal plaquette centered at dual site `s`.
pub fn apply_face_flip(cfg: &mut ContourConfig, s: DualSite) {
    for e in [
        PrimalEdge::horizontal(s.a, s.b),
        PrimalEdge::horizontal(s.a, s.b + 1),
        PrimalEdge::vertical(s.a, s.b),
        PrimalEdge::vertical(s.a + 1, s.b),
    ] {
        let v = present(cfg, e);
        set_edge(cfg, e, !v);
    }
}

/// Dual-site lift of a primal configuration over the box, seeded false at
/// the lower-left dual corner.
fn lift_dual_sites(
    cfg: &ContourConfig,
    bx: &SurgeryBox,
) -> Result<HashMap<DualSite, bool>, SurgeryError> {
    let mut states: HashMap<DualSite, bool> = HashMap::new();
    let start = DualSite::new(bx.a_min, bx.b_min);
    states.insert(start, false);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    let in_box = |s: DualSite| {
        s.a >= bx.a_min && s.a <= bx.a_min + bx.cols && s.b >= bx.b_min && s.b <= bx.b_min + bx.rows
    };
    while let Some(s) = queue.pop_front() {
        let sv = states[&s];
        for nb in [
            DualSite::new(s.a, s.b - 1),
            DualSite::new(s.a - 1, s.b),
            DualSite::new(s.a + 1, s.b),
            DualSite::new(s.a, s.b + 1),
        ] {
            if !in_box(nb) {
                continue;
            }
            let crossed = present(cfg, edge_separating(s, nb));
            let want = sv ^ crossed;
            match states.get(&nb) {
                Some(&v) => {
                    if v != want {
                        return Err(SurgeryError::PreconditionViolated(
                            "odd primal degree inside the box".into(),
                        ));
                    }
                }
                None => {
                    states.insert(nb, want);
                    queue.push_back(nb);
                }
            }
        }
    }
    Ok(states)
}

/// The inner face flips taking `a` to `b`. The configurations must agree
/// on every primal edge outside the inner edge set of the box. Flips are
/// reported as the dual sites of the flipped plaquettes, row-major; the
/// count equals the Hamming distance of the dual-site lifts.
pub fn face_flip_reachability(
    a: &ContourConfig,
    b: &ContourConfig,
    bx: &SurgeryBox,
) -> Result<Vec<DualSite>, SurgeryError> {
    if bx.rows < 3 || bx.cols < 3 {
        return Err(SurgeryError::BoxTooSmall { rows: bx.rows, cols: bx.cols });
    }
    if a.domain().kind != DomainKind::PlanarBox {
        return Err(SurgeryError::TorusUnsupported);
    }
    if a.domain() != b.domain() {
        return Err(SurgeryError::PreconditionViolated("domain mismatch".into()));
    }
    check_primal_only(a)?;
    check_primal_only(b)?;
    if !bx.fits(a.domain()) {
        return Err(SurgeryError::BoxOutsideDomain);
    }
    let inner: std::collections::HashSet<PrimalEdge> = bx.inner_edges().into_iter().collect();
    for f in a.domain().black_faces() {
        let e = ContourEdgeId::new(f, Grid::Primal);
        if a.is_present(e) != b.is_present(e) && !inner.contains(&primal_edge_of(&e)) {
            return Err(SurgeryError::PreconditionViolated(format!(
                "configurations differ outside the box at {f:?}"
            )));
        }
    }
    let lift_a = lift_dual_sites(a, bx)?;
    let lift_b = lift_dual_sites(b, bx)?;
    // Equal boundary crossings force equal ring states under the common
    // seed, so only inner sites can differ; flipping exactly those
    // plaquettes maps a to b.
    let mut flips = Vec::new();
    for s in bx.dual_sites() {
        if lift_a[&s] != lift_b[&s] {
            if !bx.is_inner(s) {
                return Err(SurgeryError::Unreachable);
            }
            flips.push(s);
        }
    }
    Ok(flips)
}

/// Inverse of `PrimalEdge::contour_edge`.
pub(crate) fn primal_edge_of(e: &ContourEdgeId) -> PrimalEdge {
    debug_assert_eq!(e.grid, Grid::Primal);
    let ll = e.face.lower_left;
    if e.face.even_class() {
        PrimalEdge::horizontal(ll.x.div_euclid(2), ll.y.div_euclid(2))
    } else {
        PrimalEdge::vertical((ll.x + 1).div_euclid(2), (ll.y - 1).div_euclid(2))
    }
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A planar domain large enough to hold the anchored 3x3 box and all its
/// crossing edges.
pub fn b33_domain() -> Domain {
    Domain::planar_box_at(10, 10, crate::lattice::SiteCoord::new(-5, -4)).unwrap()
}

/// Write the boundary crossings induced by ring states onto a config.
fn write_ring_crossings(cfg: &mut ContourConfig, bx: &SurgeryBox, ring: &HashMap<DualSite, bool>) {
    let sites = bx.ring_sites();
    let n = sites.len();
    for i in 0..n {
        let (p, q) = (sites[i], sites[(i + 1) % n]);
        set_edge(cfg, edge_separating(p, q), ring[&p] != ring[&q]);
    }
}

/// Exhaustive verification of the 3x3 completion over all 4096 boundary
/// assignments. With `honor_opp` false the diagonal rule is skipped; the
/// resulting failures are the suite's negative control.
pub fn exhaustive_b33_report(honor_opp: bool) -> SuiteReport {
    let bx = SurgeryBox::anchored_any(3, 3);
    let domain = b33_domain();
    let mut failures = Vec::new();
    for mask in 0u32..4096 {
        let mut bits = [false; 12];
        for (k, bit) in bits.iter_mut().enumerate() {
            *bit = (mask >> k) & 1 == 1;
        }
        let ring = b33_ring_from_bits(&bits);
        let inner = extend_b33_impl(&bx, &ring, honor_opp);
        let mut cfg = ContourConfig::empty(domain);
        write_ring_crossings(&mut cfg, &bx, &ring);
        let mut all = ring.clone();
        all.extend(inner.iter().copied());
        for e in bx.inner_edges() {
            let [p, q] = e.separates();
            set_edge(&mut cfg, e, all[&p] != all[&q]);
        }
        if let Err(msg) = check_b33_postcondition(&cfg, &bx, &ring, &inner) {
            failures.push(format!("case {mask:#05x}: {msg}"));
        }
    }
    SuiteReport { cases: 4096, failures }
}

fn check_b33_postcondition(
    cfg: &ContourConfig,
    bx: &SurgeryBox,
    ring: &HashMap<DualSite, bool>,
    inner: &[(DualSite, bool)],
) -> Result<(), String> {
    check_merge_postcondition(cfg, bx)?;
    // Property (S): one contour contains all four side midpoint vertices.
    let (a0, a1, b0, b1) = (bx.a_min, bx.a_min + bx.cols, bx.b_min, bx.b_min + bx.rows);
    let mids = [
        (a0 + 2, b0 + 1),
        (a1, b0 + 2),
        (a0 + 2, b1),
        (a0 + 1, b0 + 2),
    ];
    let set = extract_contours(cfg);
    let vertex_in = |contour: &crate::topology::Contour, (c, d): (i32, i32)| -> bool {
        let v = QPoint::new(8 * c - 2, 8 * d + 2);
        contour.edges.iter().any(|e| e.endpoints().contains(&v))
    };
    if !set
        .contours
        .iter()
        .any(|k| mids.iter().all(|&m| vertex_in(k, m)))
    {
        return Err("property (S): no contour contains all side midpoints".into());
    }
    if set.contours.len() > 1 {
        return Err(format!("{} contours instead of one", set.contours.len()));
    }
    // Diagonal rule at double corners.
    let analysis = analyze_corners(bx, ring);
    let inner_map: HashMap<DualSite, bool> = inner.iter().copied().collect();
    for corner in &analysis.corners {
        if corner.kind == CornerKind::Double && inner_map[&corner.w] != ring[&corner.u] {
            return Err(format!("diagonal rule violated at corner {:?}", corner.u));
        }
    }
    Ok(())
}

/// Post-condition shared by the merge and the base completion: every
/// interior primal vertex even, all present crossing edges in one contour.
pub fn check_merge_postcondition(cfg: &ContourConfig, bx: &SurgeryBox) -> Result<(), String> {
    for (c, d) in bx.interior_vertices() {
        let deg = [
            PrimalEdge::horizontal(c - 1, d),
            PrimalEdge::horizontal(c, d),
            PrimalEdge::vertical(c, d - 1),
            PrimalEdge::vertical(c, d),
        ]
        .iter()
        .filter(|&&e| present(cfg, e))
        .count();
        if deg % 2 != 0 {
            return Err(format!("odd degree {deg} at interior vertex ({c},{d})"));
        }
    }
    let crossing_present: Vec<PrimalEdge> = bx
        .crossing_edges()
        .into_iter()
        .filter(|&e| present(cfg, e))
        .collect();
    if crossing_present.len() > 1 {
        let set = extract_contours(cfg);
        let find_contour = |e: PrimalEdge| -> Option<usize> {
            let ce = e.contour_edge();
            set.contours.iter().position(|k| k.edges.contains(&ce))
        };
        let first = find_contour(crossing_present[0]);
        for &e in &crossing_present[1..] {
            if find_contour(e) != first {
                return Err("crossing edges split across contours".into());
            }
        }
    }
    Ok(())
}

/// Monte Carlo verification of `merge_box`: random valid configurations
/// on a 20x20 box, the anchored 9x9 surgery box, full post-condition and
/// bit-exact locality outside the box.
pub fn merge_monte_carlo_report(trials: usize, seed: u64) -> SuiteReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // The anchored 9x9 box needs sites x in [-10, 9], y in [-9, 10].
    let domain = Domain::planar_box_at(20, 20, crate::lattice::SiteCoord::new(-10, -9)).unwrap();
    let bx = SurgeryBox::anchored(9, 9).unwrap();
    let inner: std::collections::HashSet<FaceId> = bx
        .inner_edges()
        .iter()
        .map(|e| e.contour_edge().face)
        .collect();
    let mut failures = Vec::new();
    for trial in 0..trials {
        let cfg = crate::sampling::random_valid_config(domain, &mut rng, 200);
        let contours = crate::constrained::phi(&cfg).expect("sampled config valid");
        let primal = contours.restrict(Grid::Primal);
        let crossing = boundary_crossing_parity(&primal, &bx);
        if !crossing.even {
            failures.push(format!("trial {trial}: odd boundary parity {}", crossing.count));
            continue;
        }
        let merged = match merge_box(&primal, &bx) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("trial {trial}: merge failed: {e}"));
                continue;
            }
        };
        if let Err(msg) = check_merge_postcondition(&merged, &bx) {
            failures.push(format!("trial {trial}: {msg}"));
        }
        for f in domain.black_faces() {
            if inner.contains(&f) {
                continue;
            }
            let e = ContourEdgeId::new(f, Grid::Primal);
            if merged.is_present(e) != primal.is_present(e) {
                failures.push(format!("trial {trial}: locality violated at {f:?}"));
                break;
            }
        }
    }
    SuiteReport { cases: trials, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SiteCoord;

    #[test]
    fn anchored_boxes_match_growth_rule() {
        // The 1x1 box is the dual face containing the origin.
        let b11 = SurgeryBox::anchored_any(1, 1);
        assert_eq!((b11.a_min, b11.b_min), (-1, -1));
        // 3x3: dual sites x in {-7/2,...,5/2}, y in {-5/2,...,7/2}.
        let b33 = SurgeryBox::anchored_any(3, 3);
        assert_eq!((b33.a_min, b33.b_min), (-2, -2));
        assert_eq!(b33.dual_sites().len(), 16);
        assert_eq!(b33.inner_sites().len(), 4);
        assert_eq!(b33.ring_sites().len(), 12);
        assert_eq!(b33.crossing_edges().len(), 12);
        assert_eq!(b33.inner_edges().len(), 12);
        // Growth alternates: the column added to reach width 4 goes right
        // (3 is odd), the one reaching width 5 goes left.
        let b34 = SurgeryBox::anchored_any(3, 4);
        assert_eq!(b34.a_min, -2);
        let b35 = SurgeryBox::anchored_any(3, 5);
        assert_eq!(b35.a_min, -3);
        // Rows: reaching height 4 adds at the bottom, height 5 at the top.
        let b43 = SurgeryBox::anchored_any(4, 3);
        assert_eq!(b43.b_min, -3);
        let b53 = SurgeryBox::anchored_any(5, 3);
        assert_eq!(b53.b_min, -3);
        assert!(SurgeryBox::anchored(2, 5).is_err());
    }

    #[test]
    fn edge_embeddings_round_trip() {
        let bx = SurgeryBox::anchored_any(4, 5);
        for e in bx.crossing_edges().iter().chain(bx.inner_edges().iter()) {
            let ce = e.contour_edge();
            assert_eq!(ce.grid, Grid::Primal);
            assert_eq!(primal_edge_of(&ce), *e);
        }
    }

    #[test]
    fn crossing_parity_counts() {
        let d = b33_domain();
        let bx = SurgeryBox::anchored_any(3, 3);
        let empty = ContourConfig::empty(d);
        assert_eq!(boundary_crossing_parity(&empty, &bx), Crossing { count: 0, even: true });
        // A plaquette straddling the west boundary crosses it twice.
        let mut cfg = ContourConfig::empty(d);
        apply_face_flip(&mut cfg, DualSite::new(bx.a_min, bx.b_min + 1));
        let cr = boundary_crossing_parity(&cfg, &bx);
        assert_eq!(cr.count, 2);
        assert!(cr.even);
    }

    #[test]
    fn phi_configs_have_even_crossing_parity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let domain = Domain::planar_box_at(14, 14, SiteCoord::new(-7, -7)).unwrap();
        let bx = SurgeryBox::anchored(5, 5).unwrap();
        for _ in 0..100 {
            let cfg = crate::sampling::random_valid_config(domain, &mut rng, 60);
            let primal = crate::constrained::phi(&cfg).unwrap().restrict(Grid::Primal);
            assert!(boundary_crossing_parity(&primal, &bx).even);
        }
    }

    #[test]
    fn extend_b33_checkerboard_on_uniform_boundary() {
        // All-equal ring: no boundary crossings, K = 0; the completion is a
        // checkerboard and the center vertex gets four present edges.
        let inner = extend_b33(&[false; 12]);
        // Row-major inner sites: (-1,-1), (0,-1), (-1,0), (0,0).
        assert_eq!(inner[0], inner[3]);
        assert_eq!(inner[1], inner[2]);
        assert_ne!(inner[0], inner[1]);
        // Preferred site w2 = (0,-1) reads 0.
        assert!(!inner[1]);
        let bx = SurgeryBox::anchored_any(3, 3);
        let d = b33_domain();
        let mut cfg = ContourConfig::empty(d);
        let mut all = b33_ring_from_bits(&[false; 12]);
        all.insert(DualSite::new(-1, -1), inner[0]);
        all.insert(DualSite::new(0, -1), inner[1]);
        all.insert(DualSite::new(-1, 0), inner[2]);
        all.insert(DualSite::new(0, 0), inner[3]);
        for e in bx.inner_edges() {
            let [p, q] = e.separates();
            set_edge(&mut cfg, e, all[&p] != all[&q]);
        }
        // Center primal vertex (0,0) has all four edges present.
        let deg = [
            PrimalEdge::horizontal(-1, 0),
            PrimalEdge::horizontal(0, 0),
            PrimalEdge::vertical(0, -1),
            PrimalEdge::vertical(0, 0),
        ]
        .iter()
        .filter(|&&e| present(&cfg, e))
        .count();
        assert_eq!(deg, 4);
    }

    #[test]
    fn exhaustive_b33_all_pass() {
        let report = exhaustive_b33_report(true);
        assert_eq!(report.cases, 4096);
        assert!(
            report.passed(),
            "failures: {:?}",
            &report.failures[..report.failures.len().min(5)]
        );
    }

    #[test]
    fn skipping_diagonal_rule_fails() {
        let report = exhaustive_b33_report(false);
        assert!(!report.passed());
    }

    #[test]
    fn merge_base_case_is_extension() {
        // With a 3x3 box the merge reduces to the boundary completion.
        let d = b33_domain();
        let bx = SurgeryBox::anchored(3, 3).unwrap();
        let mut cfg = ContourConfig::empty(d);
        // Two crossings on the east boundary via a straddling plaquette.
        apply_face_flip(&mut cfg, DualSite::new(bx.a_min + bx.cols, bx.b_min + 1));
        let merged = merge_box(&cfg, &bx).unwrap();
        check_merge_postcondition(&merged, &bx).unwrap();
    }

    #[test]
    fn merge_joins_two_disjoint_crossing_cycles() {
        let domain = Domain::planar_box_at(20, 20, SiteCoord::new(-10, -10)).unwrap();
        let bx = SurgeryBox::anchored(5, 5).unwrap();
        let mut cfg = ContourConfig::empty(domain);
        // Two plaquette cycles straddling opposite boundaries, initially
        // in different contours, each crossing the boundary twice.
        apply_face_flip(&mut cfg, DualSite::new(bx.a_min, bx.b_min + 1));
        apply_face_flip(&mut cfg, DualSite::new(bx.a_min + bx.cols, bx.b_min + 3));
        let before = extract_contours(&cfg);
        assert_eq!(before.contours.len(), 2);
        let merged = merge_box(&cfg, &bx).unwrap();
        check_merge_postcondition(&merged, &bx).unwrap();
        let crossing = boundary_crossing_parity(&merged, &bx);
        assert_eq!(crossing.count, 4);
    }

    #[test]
    fn merge_detects_odd_parity() {
        let d = b33_domain();
        let bx = SurgeryBox::anchored(3, 3).unwrap();
        let mut cfg = ContourConfig::empty(d);
        set_edge(&mut cfg, PrimalEdge::horizontal(bx.a_min, bx.b_min + 1), true);
        assert!(matches!(
            merge_box(&cfg, &bx),
            Err(SurgeryError::OddBoundaryParity { count: 1 })
        ));
    }

    #[test]
    fn merge_monte_carlo_small() {
        let report = merge_monte_carlo_report(25, 99);
        assert!(report.passed(), "failures: {:?}", report.failures);
    }

    #[test]
    fn merge_idempotent_on_merged_input() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let domain = Domain::planar_box_at(20, 20, SiteCoord::new(-10, -9)).unwrap();
        let bx = SurgeryBox::anchored(9, 9).unwrap();
        for _ in 0..5 {
            let cfg = crate::sampling::random_valid_config(domain, &mut rng, 100);
            let primal = crate::constrained::phi(&cfg).unwrap().restrict(Grid::Primal);
            let once = merge_box(&primal, &bx).unwrap();
            let twice = merge_box(&once, &bx).unwrap();
            check_merge_postcondition(&twice, &bx).unwrap();
        }
    }

    #[test]
    fn flip_reachability_identity_and_single_flip() {
        let d = b33_domain();
        let bx = SurgeryBox::anchored(3, 3).unwrap();
        let cfg = ContourConfig::empty(d);
        assert_eq!(face_flip_reachability(&cfg, &cfg, &bx).unwrap(), vec![]);
        let mut other = cfg.clone();
        let site = DualSite::new(0, -1);
        apply_face_flip(&mut other, site);
        let flips = face_flip_reachability(&cfg, &other, &bx).unwrap();
        assert_eq!(flips, vec![site]);
        // Soundness: applying the flips transforms a into b.
        let mut replay = cfg.clone();
        for s in flips {
            apply_face_flip(&mut replay, s);
        }
        assert_eq!(replay, other);
    }

    #[test]
    fn flip_reachability_rejects_outside_difference() {
        let d = b33_domain();
        let bx = SurgeryBox::anchored(3, 3).unwrap();
        let a = ContourConfig::empty(d);
        let mut b = a.clone();
        // Flipping the plaquette at the ring corner toggles crossing edges.
        apply_face_flip(&mut b, DualSite::new(bx.a_min, bx.b_min));
        assert!(matches!(
            face_flip_reachability(&a, &b, &bx),
            Err(SurgeryError::PreconditionViolated(_))
        ));
    }
}
