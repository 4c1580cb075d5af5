//! Geometry of the square lattice, its 2-colored faces, the auxiliary
//! contour grids carried by black faces, and the quarter-step dual grid
//! used for interfaces.
//!
//! Conventions used throughout the crate:
//! - A face is named by its lower-left site; it is black iff `x + y` is even.
//! - Every black face carries one primal and one dual contour edge,
//!   perpendicular to each other. On a face whose lower-left corner has
//!   both coordinates even the primal edge is horizontal; on a face with
//!   both coordinates odd it is vertical.
//! - Quarter-scaled integer coordinates (`QPoint`) make all distance and
//!   incidence tests exact: sites sit at multiples of 4, contour-grid
//!   vertices at odd multiples of 2, interface vertices at odd integers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("domain sides must be at least 2 sites, got {0}x{1}")]
    TooSmall(i32, i32),
    #[error("torus sides must be even, got {0}x{1}")]
    OddTorus(i32, i32),
}

/// Site of the square lattice, in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteCoord {
    pub x: i32,
    pub y: i32,
}

impl SiteCoord {
    pub fn new(x: i32, y: i32) -> Self {
        SiteCoord { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceColor {
    Black,
    White,
}

/// Unit face of the lattice, named by its lower-left site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceId {
    pub lower_left: SiteCoord,
}

impl FaceId {
    pub fn new(x: i32, y: i32) -> Self {
        FaceId {
            lower_left: SiteCoord::new(x, y),
        }
    }

    pub fn color(&self) -> FaceColor {
        if (self.lower_left.x + self.lower_left.y).rem_euclid(2) == 0 {
            FaceColor::Black
        } else {
            FaceColor::White
        }
    }

    /// For a black face: true when both corner coordinates are even.
    /// This sub-parity decides which contour grid runs horizontally here.
    pub fn even_class(&self) -> bool {
        self.lower_left.x.rem_euclid(2) == 0
    }
}

/// The two auxiliary contour grids. Primal vertices sit at centers of
/// white faces with odd `x`/even `y` lower-left corner, dual vertices at
/// the remaining white-face centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Grid {
    Primal,
    Dual,
}

impl Grid {
    pub fn other(self) -> Grid {
        match self {
            Grid::Primal => Grid::Dual,
            Grid::Dual => Grid::Primal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// One of the two potential contour edges carried by a black face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContourEdgeId {
    pub face: FaceId,
    pub grid: Grid,
}

impl ContourEdgeId {
    /// Panics if the face is white; white faces carry no contour edges.
    pub fn new(face: FaceId, grid: Grid) -> Self {
        assert_eq!(face.color(), FaceColor::Black, "contour edges live on black faces");
        ContourEdgeId { face, grid }
    }

    pub fn orientation(&self) -> Orientation {
        match (self.grid, self.face.even_class()) {
            (Grid::Primal, true) | (Grid::Dual, false) => Orientation::Horizontal,
            (Grid::Primal, false) | (Grid::Dual, true) => Orientation::Vertical,
        }
    }

    /// Midpoint of the edge (the black face center), quarter-scaled.
    pub fn center(&self) -> QPoint {
        QPoint {
            x: 4 * self.face.lower_left.x + 2,
            y: 4 * self.face.lower_left.y + 2,
        }
    }

    /// Endpoints on the contour grid, quarter-scaled, not wrapped.
    pub fn endpoints(&self) -> [QPoint; 2] {
        let c = self.center();
        match self.orientation() {
            Orientation::Horizontal => [QPoint::new(c.x - 4, c.y), QPoint::new(c.x + 4, c.y)],
            Orientation::Vertical => [QPoint::new(c.x, c.y - 4), QPoint::new(c.x, c.y + 4)],
        }
    }
}

/// Point in quarter lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QPoint {
    pub x: i32,
    pub y: i32,
}

impl QPoint {
    pub fn new(x: i32, y: i32) -> Self {
        QPoint { x, y }
    }
}

/// Edge of the quarter-step dual grid: endpoints have odd quarter
/// coordinates and differ by 2 (half a lattice unit) in one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuarterEdgeId {
    pub a: QPoint,
    pub b: QPoint,
}

impl QuarterEdgeId {
    pub fn new(a: QPoint, b: QPoint) -> Self {
        debug_assert!(
            (a.x - b.x).abs() + (a.y - b.y).abs() == 2
                && ((a.x - b.x).abs() == 2 || (a.y - b.y).abs() == 2),
            "quarter edge endpoints must differ by 2 in exactly one coordinate"
        );
        if a <= b {
            QuarterEdgeId { a, b }
        } else {
            QuarterEdgeId { a: b, b: a }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    Right,
    Up,
}

/// Lattice edge, named by its lower/left endpoint and direction.
/// This form stays canonical under torus wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GEdge {
    pub origin: SiteCoord,
    pub axis: Axis,
}

impl GEdge {
    pub fn other_end(&self) -> SiteCoord {
        match self.axis {
            Axis::Right => SiteCoord::new(self.origin.x + 1, self.origin.y),
            Axis::Up => SiteCoord::new(self.origin.x, self.origin.y + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    PlanarBox,
    Torus,
}

/// Finite box or torus of sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    pub kind: DomainKind,
    pub width: i32,
    pub height: i32,
    pub anchor: SiteCoord,
}

impl Domain {
    pub fn planar_box(width: i32, height: i32) -> Result<Self, LatticeError> {
        Self::planar_box_at(width, height, SiteCoord::new(0, 0))
    }

    /// Degenerate strips (one site wide) are allowed; they carry no black
    /// faces and so no constraints.
    pub fn planar_box_at(width: i32, height: i32, anchor: SiteCoord) -> Result<Self, LatticeError> {
        if width < 1 || height < 1 || width * height < 2 {
            return Err(LatticeError::TooSmall(width, height));
        }
        Ok(Domain {
            kind: DomainKind::PlanarBox,
            width,
            height,
            anchor,
        })
    }

    pub fn torus(width: i32, height: i32) -> Result<Self, LatticeError> {
        Self::torus_at(width, height, SiteCoord::new(0, 0))
    }

    pub fn torus_at(width: i32, height: i32, anchor: SiteCoord) -> Result<Self, LatticeError> {
        if width < 2 || height < 2 {
            return Err(LatticeError::TooSmall(width, height));
        }
        if width % 2 != 0 || height % 2 != 0 {
            return Err(LatticeError::OddTorus(width, height));
        }
        Ok(Domain {
            kind: DomainKind::Torus,
            width,
            height,
            anchor,
        })
    }

    pub fn site_count(&self) -> usize {
        (self.width as usize) * (self.height as usize)
    }

    /// Wrap a coordinate into the fundamental domain (torus) or return it
    /// unchanged (box).
    pub fn normalize_site(&self, s: SiteCoord) -> SiteCoord {
        match self.kind {
            DomainKind::PlanarBox => s,
            DomainKind::Torus => SiteCoord::new(
                (s.x - self.anchor.x).rem_euclid(self.width) + self.anchor.x,
                (s.y - self.anchor.y).rem_euclid(self.height) + self.anchor.y,
            ),
        }
    }

    pub fn contains_site(&self, s: SiteCoord) -> bool {
        match self.kind {
            DomainKind::Torus => true,
            DomainKind::PlanarBox => {
                s.x >= self.anchor.x
                    && s.x < self.anchor.x + self.width
                    && s.y >= self.anchor.y
                    && s.y < self.anchor.y + self.height
            }
        }
    }

    pub fn site_index(&self, s: SiteCoord) -> Option<usize> {
        let s = self.normalize_site(s);
        if !self.contains_site(s) {
            return None;
        }
        let dx = (s.x - self.anchor.x) as usize;
        let dy = (s.y - self.anchor.y) as usize;
        Some(dy * self.width as usize + dx)
    }

    pub fn site_at(&self, idx: usize) -> SiteCoord {
        debug_assert!(idx < self.site_count());
        SiteCoord::new(
            self.anchor.x + (idx % self.width as usize) as i32,
            self.anchor.y + (idx / self.width as usize) as i32,
        )
    }

    /// Lattice neighbors that exist in the domain, in row-major order
    /// (below, left, right, above).
    pub fn neighbors(&self, s: SiteCoord) -> Vec<SiteCoord> {
        let cand = [
            SiteCoord::new(s.x, s.y - 1),
            SiteCoord::new(s.x - 1, s.y),
            SiteCoord::new(s.x + 1, s.y),
            SiteCoord::new(s.x, s.y + 1),
        ];
        cand.iter()
            .map(|&c| self.normalize_site(c))
            .filter(|&c| self.contains_site(c))
            .collect()
    }

    pub fn on_boundary(&self, s: SiteCoord) -> bool {
        match self.kind {
            DomainKind::Torus => false,
            DomainKind::PlanarBox => {
                s.x == self.anchor.x
                    || s.x == self.anchor.x + self.width - 1
                    || s.y == self.anchor.y
                    || s.y == self.anchor.y + self.height - 1
            }
        }
    }

    pub fn normalize_face(&self, f: FaceId) -> FaceId {
        FaceId {
            lower_left: self.normalize_site(f.lower_left),
        }
    }

    /// A face exists when all four of its corner sites do. On the torus
    /// every face exists; on a box only fully contained ones.
    pub fn contains_face(&self, f: FaceId) -> bool {
        match self.kind {
            DomainKind::Torus => true,
            DomainKind::PlanarBox => {
                let ll = f.lower_left;
                ll.x >= self.anchor.x
                    && ll.x + 1 <= self.anchor.x + self.width - 1
                    && ll.y >= self.anchor.y
                    && ll.y + 1 <= self.anchor.y + self.height - 1
            }
        }
    }

    /// Corner sites in clockwise order starting from the lower-left:
    /// LL, UL, UR, LR. This is the reading order of the face constraint.
    pub fn face_sites(&self, f: FaceId) -> [SiteCoord; 4] {
        let SiteCoord { x, y } = f.lower_left;
        [
            self.normalize_site(SiteCoord::new(x, y)),
            self.normalize_site(SiteCoord::new(x, y + 1)),
            self.normalize_site(SiteCoord::new(x + 1, y + 1)),
            self.normalize_site(SiteCoord::new(x + 1, y)),
        ]
    }

    fn face_rows(&self) -> i32 {
        match self.kind {
            DomainKind::Torus => self.height,
            DomainKind::PlanarBox => self.height - 1,
        }
    }

    /// First black x in face row `y`, and the count of black faces there.
    fn black_row_span(&self, y: i32) -> (i32, i32) {
        let ax = self.anchor.x;
        let x0 = if (ax + y).rem_euclid(2) == 0 { ax } else { ax + 1 };
        match self.kind {
            DomainKind::Torus => (x0, self.width / 2),
            DomainKind::PlanarBox => {
                let x_last = ax + self.width - 2;
                if x0 > x_last {
                    (x0, 0)
                } else {
                    (x0, (x_last - x0) / 2 + 1)
                }
            }
        }
    }

    pub fn black_face_count(&self) -> usize {
        let mut n = 0usize;
        for j in 0..self.face_rows() {
            n += self.black_row_span(self.anchor.y + j).1 as usize;
        }
        n
    }

    /// Every black face of the domain exactly once, row-major.
    pub fn black_faces(&self) -> Vec<FaceId> {
        let mut out = Vec::with_capacity(self.black_face_count());
        for j in 0..self.face_rows() {
            let y = self.anchor.y + j;
            let (x0, n) = self.black_row_span(y);
            for k in 0..n {
                out.push(FaceId::new(x0 + 2 * k, y));
            }
        }
        out
    }

    pub fn black_face_index(&self, f: FaceId) -> Option<usize> {
        let f = self.normalize_face(f);
        if f.color() != FaceColor::Black || !self.contains_face(f) {
            return None;
        }
        let y = f.lower_left.y;
        let j = y - self.anchor.y;
        if j < 0 || j >= self.face_rows() {
            return None;
        }
        let mut before = 0usize;
        // Rows alternate between two counts; sum the pair then the remainder.
        let (_, c0) = self.black_row_span(self.anchor.y);
        let (_, c1) = self.black_row_span(self.anchor.y + 1);
        before += (j / 2) as usize * (c0 + c1) as usize;
        if j % 2 == 1 {
            before += c0 as usize;
        }
        let (x0, n) = self.black_row_span(y);
        let dx = f.lower_left.x - x0;
        if dx < 0 || dx % 2 != 0 || dx / 2 >= n {
            return None;
        }
        Some(before + (dx / 2) as usize)
    }

    pub fn contains_edge(&self, e: ContourEdgeId) -> bool {
        self.contains_face(self.normalize_face(e.face))
    }

    /// The two lattice edges crossed by a contour edge: the two sides of
    /// its black face perpendicular to it.
    pub fn g_edges_crossed_by(&self, e: ContourEdgeId) -> [GEdge; 2] {
        let f = self.normalize_face(e.face);
        let SiteCoord { x, y } = f.lower_left;
        match e.orientation() {
            // A horizontal contour edge crosses the two vertical sides.
            Orientation::Horizontal => [
                GEdge {
                    origin: self.normalize_site(SiteCoord::new(x, y)),
                    axis: Axis::Up,
                },
                GEdge {
                    origin: self.normalize_site(SiteCoord::new(x + 1, y)),
                    axis: Axis::Up,
                },
            ],
            Orientation::Vertical => [
                GEdge {
                    origin: self.normalize_site(SiteCoord::new(x, y)),
                    axis: Axis::Right,
                },
                GEdge {
                    origin: self.normalize_site(SiteCoord::new(x, y + 1)),
                    axis: Axis::Right,
                },
            ],
        }
    }

    /// The unique potential contour edge crossing a lattice edge, when its
    /// black face exists in the domain.
    pub fn crossing_edge_of(&self, g: GEdge) -> Option<ContourEdgeId> {
        let SiteCoord { x, y } = g.origin;
        let (cand_a, cand_b, orient) = match g.axis {
            // Vertical lattice edge: crossed by the horizontal contour edge
            // of the black face to its left or right.
            Axis::Up => (FaceId::new(x - 1, y), FaceId::new(x, y), Orientation::Horizontal),
            Axis::Right => (FaceId::new(x, y - 1), FaceId::new(x, y), Orientation::Vertical),
        };
        let face = if cand_a.color() == FaceColor::Black { cand_a } else { cand_b };
        debug_assert_eq!(face.color(), FaceColor::Black);
        let face = self.normalize_face(face);
        if !self.contains_face(face) {
            return None;
        }
        let grid = match (orient, face.even_class()) {
            (Orientation::Horizontal, true) | (Orientation::Vertical, false) => Grid::Primal,
            (Orientation::Horizontal, false) | (Orientation::Vertical, true) => Grid::Dual,
        };
        Some(ContourEdgeId::new(face, grid))
    }

    /// Quarter-scaled torus periods.
    pub fn q_periods(&self) -> Option<(i32, i32)> {
        match self.kind {
            DomainKind::Torus => Some((4 * self.width, 4 * self.height)),
            DomainKind::PlanarBox => None,
        }
    }

    pub fn normalize_qpoint(&self, p: QPoint) -> QPoint {
        match self.q_periods() {
            None => p,
            Some((px, py)) => QPoint::new(
                (p.x - 4 * self.anchor.x).rem_euclid(px) + 4 * self.anchor.x,
                (p.y - 4 * self.anchor.y).rem_euclid(py) + 4 * self.anchor.y,
            ),
        }
    }

    /// White face whose center is a contour-grid vertex, given that vertex
    /// as a quarter point (coordinates ≡ 2 mod 4).
    pub fn white_face_of_vertex(&self, v: QPoint) -> FaceId {
        debug_assert!(v.x.rem_euclid(4) == 2 && v.y.rem_euclid(4) == 2);
        self.normalize_face(FaceId::new((v.x - 2).div_euclid(4), (v.y - 2).div_euclid(4)))
    }

    /// The four potential contour edges incident to the contour-grid vertex
    /// at the center of white face `w` (those that exist in the domain),
    /// together with that vertex's grid.
    pub fn vertex_incident_edges(&self, w: FaceId) -> (Grid, Vec<ContourEdgeId>) {
        debug_assert_eq!(w.color(), FaceColor::White);
        let SiteCoord { x, y } = w.lower_left;
        let grid = if x.rem_euclid(2) == 1 { Grid::Primal } else { Grid::Dual };
        let mut edges = Vec::with_capacity(4);
        for f in [
            FaceId::new(x - 1, y),
            FaceId::new(x + 1, y),
            FaceId::new(x, y - 1),
            FaceId::new(x, y + 1),
        ] {
            debug_assert_eq!(f.color(), FaceColor::Black);
            let f = self.normalize_face(f);
            if self.contains_face(f) {
                edges.push(ContourEdgeId::new(f, grid));
            }
        }
        (grid, edges)
    }

    /// White faces of the domain, row-major.
    pub fn white_faces(&self) -> Vec<FaceId> {
        let mut out = Vec::new();
        for j in 0..self.face_rows() {
            let y = self.anchor.y + j;
            let x0 = if (self.anchor.x + y).rem_euclid(2) == 1 {
                self.anchor.x
            } else {
                self.anchor.x + 1
            };
            let x_last = match self.kind {
                DomainKind::Torus => self.anchor.x + self.width - 1,
                DomainKind::PlanarBox => self.anchor.x + self.width - 2,
            };
            let mut x = x0;
            while x <= x_last {
                out.push(FaceId::new(x, y));
                x += 2;
            }
        }
        out
    }
}

/// The contour edge of the given orientation at a black face.
pub fn edge_with_orientation(face: FaceId, o: Orientation) -> ContourEdgeId {
    let grid = match (o, face.even_class()) {
        (Orientation::Horizontal, true) | (Orientation::Vertical, false) => Grid::Primal,
        (Orientation::Horizontal, false) | (Orientation::Vertical, true) => Grid::Dual,
    };
    ContourEdgeId::new(face, grid)
}

/// True iff the site is one of the four corners of the edge's black face,
/// i.e. at squared Euclidean distance 1/2 from the edge center.
pub fn incidence(domain: &Domain, e: ContourEdgeId, s: SiteCoord) -> bool {
    let f = domain.normalize_face(e.face);
    let s = domain.normalize_site(s);
    domain.face_sites(f).contains(&s)
}
