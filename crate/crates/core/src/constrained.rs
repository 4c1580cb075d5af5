//! The constrained state space: site configurations whose black faces all
//! read one of the six allowed patterns, the 0/1 exchange, white-face
//! flips, the contour map and its inverse, and exhaustive enumeration.

use crate::bits::BitVec;
use crate::lattice::{
    edge_with_orientation, ContourEdgeId, Domain, DomainKind, FaceColor, FaceId, Grid,
    Orientation, SiteCoord,
};
use std::collections::VecDeque;
use std::io::{BufRead, Write};
use thiserror::Error;

/// Allowed black-face readings, clockwise from the lower-left corner.
/// Bit 3 is the lower-left site, bit 2 upper-left, bit 1 upper-right,
/// bit 0 lower-right.
pub const ALLOWED_PATTERNS: [u8; 6] = [0b0000, 0b1111, 0b0011, 0b1100, 0b0110, 0b1001];

const fn allowed_table() -> [bool; 16] {
    let mut t = [false; 16];
    let mut i = 0;
    while i < ALLOWED_PATTERNS.len() {
        t[ALLOWED_PATTERNS[i] as usize] = true;
        i += 1;
    }
    t
}

const ALLOWED: [bool; 16] = allowed_table();

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstrainedError {
    #[error("configuration violates the face constraint on {0:?}")]
    InvalidInput(Vec<FaceId>),
    #[error("face {0:?} is not white")]
    FaceNotWhite(FaceId),
    #[error("face {0:?} is white but not monochromatic")]
    FaceNotMonochromatic(FaceId),
    #[error("face {0:?} is not contained in the domain")]
    FaceNotContained(FaceId),
    #[error("present edges of the two grids would cross on face {0:?}")]
    CrossingEdges(FaceId),
    #[error("contour configuration admits no consistent site assignment")]
    InconsistentContours,
    #[error("domain has {sites} sites, enumeration cap is {cap}")]
    DomainTooLarge { sites: usize, cap: usize },
    #[error("site {0:?} is outside the domain")]
    SiteOutOfDomain(SiteCoord),
}

/// 0/1 states on the sites of a domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SiteConfig {
    domain: Domain,
    bits: BitVec,
}

impl std::fmt::Debug for SiteConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SiteConfig({:?} {}x{} ", self.domain.kind, self.domain.width, self.domain.height)?;
        write!(f, "{:?})", self.bits)
    }
}

impl SiteConfig {
    pub fn zeros(domain: Domain) -> Self {
        SiteConfig {
            domain,
            bits: BitVec::zeros(domain.site_count()),
        }
    }

    pub fn from_fn(domain: Domain, mut f: impl FnMut(SiteCoord) -> bool) -> Self {
        let mut cfg = Self::zeros(domain);
        for i in 0..domain.site_count() {
            cfg.bits.set(i, f(domain.site_at(i)));
        }
        cfg
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn get(&self, s: SiteCoord) -> bool {
        let i = self.domain.site_index(s).expect("site outside domain");
        self.bits.get(i)
    }

    pub fn set(&mut self, s: SiteCoord, v: bool) {
        let i = self.domain.site_index(s).expect("site outside domain");
        self.bits.set(i, v);
    }

    pub fn get_index(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn ones(&self) -> usize {
        self.bits.count_ones()
    }

    /// The 4-bit reading of a face, clockwise from lower-left.
    pub fn face_pattern(&self, f: FaceId) -> u8 {
        let [ll, ul, ur, lr] = self.domain.face_sites(f);
        (u8::from(self.get(ll)) << 3)
            | (u8::from(self.get(ul)) << 2)
            | (u8::from(self.get(ur)) << 1)
            | u8::from(self.get(lr))
    }

    /// Reinterpret the same grid of states over another domain of equal
    /// dimensions (e.g. crop a torus sample to a free-boundary box).
    pub fn reinterpret(&self, domain: Domain) -> SiteConfig {
        assert_eq!(
            (self.domain.width, self.domain.height),
            (domain.width, domain.height),
            "reinterpret requires equal dimensions"
        );
        SiteConfig {
            domain,
            bits: self.bits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(Vec<FaceId>),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Check every black face against the allowed list.
pub fn validate(cfg: &SiteConfig) -> Validity {
    let mut bad = Vec::new();
    for f in cfg.domain().black_faces() {
        if !ALLOWED[cfg.face_pattern(f) as usize] {
            bad.push(f);
        }
    }
    if bad.is_empty() {
        Validity::Valid
    } else {
        Validity::Invalid(bad)
    }
}

/// The 0/1 exchange. An involution that preserves validity.
pub fn theta(cfg: &SiteConfig) -> SiteConfig {
    let mut out = cfg.clone();
    out.bits.flip_all();
    out
}

/// Flip the four sites of a monochromatic white face.
pub fn white_face_flip(cfg: &SiteConfig, face: FaceId) -> Result<SiteConfig, ConstrainedError> {
    let d = *cfg.domain();
    let face = d.normalize_face(face);
    if !d.contains_face(face) {
        return Err(ConstrainedError::FaceNotContained(face));
    }
    if face.color() != FaceColor::White {
        return Err(ConstrainedError::FaceNotWhite(face));
    }
    let sites = d.face_sites(face);
    let v0 = cfg.get(sites[0]);
    if sites.iter().any(|&s| cfg.get(s) != v0) {
        return Err(ConstrainedError::FaceNotMonochromatic(face));
    }
    let mut out = cfg.clone();
    for s in sites {
        out.set(s, !v0);
    }
    Ok(out)
}

/// Per black face, which of its two potential contour edges is present.
/// Keeping a single slot per face makes the no-crossing condition
/// structural: the primal and dual edge of one face can never coexist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FaceEdge {
    #[default]
    Empty,
    Primal,
    Dual,
}

/// Present/absent states on the edges of the two contour grids.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ContourConfig {
    domain: Domain,
    faces: Vec<FaceEdge>,
}

impl std::fmt::Debug for ContourConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ContourConfig({:?} {}x{}, {} present)",
            self.domain.kind,
            self.domain.width,
            self.domain.height,
            self.present_edges().count()
        )
    }
}

impl ContourConfig {
    pub fn empty(domain: Domain) -> Self {
        ContourConfig {
            faces: vec![FaceEdge::Empty; domain.black_face_count()],
            domain,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    fn slot(&self, face: FaceId) -> Option<usize> {
        self.domain.black_face_index(face)
    }

    pub fn is_present(&self, e: ContourEdgeId) -> bool {
        match self.slot(e.face) {
            None => false,
            Some(i) => match (self.faces[i], e.grid) {
                (FaceEdge::Primal, Grid::Primal) | (FaceEdge::Dual, Grid::Dual) => true,
                _ => false,
            },
        }
    }

    /// Set or clear one edge. Refuses to create a primal/dual crossing.
    pub fn set(&mut self, e: ContourEdgeId, present: bool) -> Result<(), ConstrainedError> {
        let face = self.domain.normalize_face(e.face);
        let i = self
            .slot(face)
            .ok_or(ConstrainedError::FaceNotContained(face))?;
        let this = match e.grid {
            Grid::Primal => FaceEdge::Primal,
            Grid::Dual => FaceEdge::Dual,
        };
        let other = match e.grid {
            Grid::Primal => FaceEdge::Dual,
            Grid::Dual => FaceEdge::Primal,
        };
        if present {
            if self.faces[i] == other {
                return Err(ConstrainedError::CrossingEdges(face));
            }
            self.faces[i] = this;
        } else if self.faces[i] == this {
            self.faces[i] = FaceEdge::Empty;
        }
        Ok(())
    }

    pub fn present_edges(&self) -> impl Iterator<Item = ContourEdgeId> + '_ {
        self.domain
            .black_faces()
            .into_iter()
            .zip(self.faces.iter())
            .filter_map(|(f, &s)| match s {
                FaceEdge::Empty => None,
                FaceEdge::Primal => Some(ContourEdgeId::new(f, Grid::Primal)),
                FaceEdge::Dual => Some(ContourEdgeId::new(f, Grid::Dual)),
            })
    }

    pub fn present_count(&self) -> usize {
        self.faces.iter().filter(|&&s| s != FaceEdge::Empty).count()
    }

    /// Number of present edges incident to the contour-grid vertex at the
    /// center of white face `w`.
    pub fn vertex_degree(&self, w: FaceId) -> usize {
        let (_, edges) = self.domain.vertex_incident_edges(w);
        edges.iter().filter(|&&e| self.is_present(e)).count()
    }

    /// Even-degree invariant: every interior contour-grid vertex (one whose
    /// four incident edges all exist in the domain) has an even number of
    /// present incident edges. On a box, vertices near the rim have missing
    /// incident edges and are exempt. Returns the offending white faces.
    pub fn validate_even_degree(&self) -> Result<(), Vec<FaceId>> {
        let mut bad = Vec::new();
        for w in self.domain.white_faces() {
            let (_, edges) = self.domain.vertex_incident_edges(w);
            if edges.len() < 4 {
                continue;
            }
            if edges.iter().filter(|&&e| self.is_present(e)).count() % 2 != 0 {
                bad.push(w);
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }

    /// Pointwise symmetric difference of present-edge sets. Fails if the
    /// result would put a primal and a dual edge on the same face.
    pub fn symmetric_difference(&self, other: &ContourConfig) -> Result<ContourConfig, ConstrainedError> {
        assert_eq!(self.domain, other.domain, "domain mismatch");
        let mut out = ContourConfig::empty(self.domain);
        for (i, f) in self.domain.black_faces().into_iter().enumerate() {
            let s = match (self.faces[i], other.faces[i]) {
                (a, FaceEdge::Empty) => a,
                (FaceEdge::Empty, b) => b,
                (a, b) if a == b => FaceEdge::Empty,
                _ => return Err(ConstrainedError::CrossingEdges(f)),
            };
            out.faces[i] = s;
        }
        Ok(out)
    }

    /// Keep only the edges of one grid.
    pub fn restrict(&self, grid: Grid) -> ContourConfig {
        let keep = match grid {
            Grid::Primal => FaceEdge::Primal,
            Grid::Dual => FaceEdge::Dual,
        };
        ContourConfig {
            domain: self.domain,
            faces: self
                .faces
                .iter()
                .map(|&s| if s == keep { s } else { FaceEdge::Empty })
                .collect(),
        }
    }
}

/// The contour map: one pass over black faces.
pub fn phi(cfg: &SiteConfig) -> Result<ContourConfig, ConstrainedError> {
    let d = *cfg.domain();
    let mut out = ContourConfig::empty(d);
    let mut bad = Vec::new();
    for (i, f) in d.black_faces().into_iter().enumerate() {
        let p = cfg.face_pattern(f);
        let state = match p {
            0b0000 | 0b1111 => FaceEdge::Empty,
            // Upper pair differs from lower pair: horizontal edge.
            0b0110 | 0b1001 => match edge_with_orientation(f, Orientation::Horizontal).grid {
                Grid::Primal => FaceEdge::Primal,
                Grid::Dual => FaceEdge::Dual,
            },
            // Left pair differs from right pair: vertical edge.
            0b0011 | 0b1100 => match edge_with_orientation(f, Orientation::Vertical).grid {
                Grid::Primal => FaceEdge::Primal,
                Grid::Dual => FaceEdge::Dual,
            },
            _ => {
                bad.push(f);
                FaceEdge::Empty
            }
        };
        out.faces[i] = state;
    }
    if !bad.is_empty() {
        return Err(ConstrainedError::InvalidInput(bad));
    }
    debug_assert!(out.validate_even_degree().is_ok());
    Ok(out)
}

/// Reconstruct a site configuration from contours: breadth-first from the
/// seed in row-major neighbor order, with adjacent states differing iff
/// their shared lattice edge is crossed by a present contour edge.
///
/// Lattice edges with no potential contour edge (possible near a box rim)
/// carry no information and are left unconstrained; any site component
/// they isolate is seeded with `seed_state` too, in site-index order.
///
/// The two seed states yield the theta-pair. On a torus a winding parity
/// obstruction is reported as `InconsistentContours`; on a box this cannot
/// happen for inputs satisfying the even-degree invariant.
pub fn phi_inverse(
    contours: &ContourConfig,
    seed: SiteCoord,
    seed_state: bool,
) -> Result<SiteConfig, ConstrainedError> {
    let d = *contours.domain();
    let seed = d.normalize_site(seed);
    if !d.contains_site(seed) {
        return Err(ConstrainedError::SiteOutOfDomain(seed));
    }
    let n = d.site_count();
    let mut assigned = vec![false; n];
    let mut out = SiteConfig::zeros(d);
    let mut queue = VecDeque::new();
    let si = d.site_index(seed).unwrap();
    let mut start = Some(si);
    while let Some(root) = start {
        assigned[root] = true;
        out.bits.set(root, seed_state);
        queue.push_back(d.site_at(root));
        while let Some(s) = queue.pop_front() {
            let sv = out.get(s);
            for nb in d.neighbors(s) {
                let ni = d.site_index(nb).unwrap();
                if assigned[ni] {
                    continue;
                }
                let g = g_edge_between(&d, s, nb);
                let crossed = match d.crossing_edge_of(g) {
                    Some(e) => contours.is_present(e),
                    None => continue, // uninformative rim edge
                };
                assigned[ni] = true;
                out.bits.set(ni, sv ^ crossed);
                queue.push_back(nb);
            }
        }
        start = assigned.iter().position(|&a| !a);
    }
    // Verify every informative lattice edge; BFS only fixed a spanning
    // forest. On a width/height 2 torus two distinct edges join the same
    // site pair, so iterate edges, not neighbor pairs.
    for i in 0..n {
        let s = d.site_at(i);
        for axis in [crate::lattice::Axis::Right, crate::lattice::Axis::Up] {
            let g = crate::lattice::GEdge { origin: s, axis };
            let t = d.normalize_site(g.other_end());
            if !d.contains_site(t) {
                continue;
            }
            let crossed = match d.crossing_edge_of(g) {
                Some(e) => contours.is_present(e),
                None => continue,
            };
            if (out.get(s) != out.get(t)) != crossed {
                debug_assert!(
                    d.kind == DomainKind::Torus || contours.validate_even_degree().is_err(),
                    "inconsistency on a box requires an even-degree violation"
                );
                return Err(ConstrainedError::InconsistentContours);
            }
        }
    }
    Ok(out)
}

pub(crate) fn g_edge_between(d: &Domain, a: SiteCoord, b: SiteCoord) -> crate::lattice::GEdge {
    use crate::lattice::{Axis, GEdge};
    let a = d.normalize_site(a);
    let b = d.normalize_site(b);
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    // On a torus the step may appear as a long wrap jump.
    let (origin, axis) = match (dx, dy) {
        (1, 0) => (a, Axis::Right),
        (-1, 0) => (b, Axis::Right),
        (0, 1) => (a, Axis::Up),
        (0, -1) => (b, Axis::Up),
        _ => {
            if dy == 0 {
                if dx > 1 {
                    (b, Axis::Right)
                } else {
                    (a, Axis::Right)
                }
            } else {
                if dy > 1 {
                    (b, Axis::Up)
                } else {
                    (a, Axis::Up)
                }
            }
        }
    };
    GEdge {
        origin: d.normalize_site(origin),
        axis,
    }
}

/// Default cap on exhaustive enumeration: 2^25 raw states.
pub const ENUMERATION_CAP: usize = 25;

/// All valid configurations of a small domain, in lexicographic order of
/// the site bit string (row-major, 0 before 1). Backtracks over sites and
/// prunes as soon as a completed black face violates the constraint.
pub fn enumerate_omega(domain: Domain, cap: usize) -> Result<Vec<SiteConfig>, ConstrainedError> {
    let n = domain.site_count();
    if n > cap {
        return Err(ConstrainedError::DomainTooLarge { sites: n, cap });
    }
    // For each site index, the black faces whose reading completes there.
    let mut complete_at: Vec<Vec<[usize; 4]>> = vec![Vec::new(); n];
    for f in domain.black_faces() {
        let idx = domain
            .face_sites(f)
            .map(|s| domain.site_index(s).expect("face site in domain"));
        let last = idx.iter().copied().max().unwrap();
        complete_at[last].push(idx);
    }
    let mut out = Vec::new();
    let mut bits = BitVec::zeros(n);
    fn rec(
        domain: &Domain,
        complete_at: &[Vec<[usize; 4]>],
        bits: &mut BitVec,
        depth: usize,
        out: &mut Vec<SiteConfig>,
    ) {
        if depth == complete_at.len() {
            out.push(SiteConfig {
                domain: *domain,
                bits: bits.clone(),
            });
            return;
        }
        for v in [false, true] {
            bits.set(depth, v);
            let ok = complete_at[depth].iter().all(|idx| {
                let p = (u8::from(bits.get(idx[0])) << 3)
                    | (u8::from(bits.get(idx[1])) << 2)
                    | (u8::from(bits.get(idx[2])) << 1)
                    | u8::from(bits.get(idx[3]));
                ALLOWED[p as usize]
            });
            if ok {
                rec(domain, complete_at, bits, depth + 1, out);
            }
        }
        bits.set(depth, false);
    }
    rec(&domain, &complete_at, &mut bits, 0, &mut out);
    Ok(out)
}

#[derive(Debug, Error)]
pub enum TextFormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("bad grid line {0}: {1}")]
    Line(usize, String),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// Write the plain-text site-configuration format:
/// `percolation <kind> <width> <height>` then `height` lines of `width`
/// characters from {0,1}, top row (y = height-1) first.
pub fn write_site_config(cfg: &SiteConfig, mut w: impl Write) -> Result<(), TextFormatError> {
    let d = cfg.domain();
    let kind = match d.kind {
        DomainKind::PlanarBox => "box",
        DomainKind::Torus => "torus",
    };
    writeln!(w, "percolation {} {} {}", kind, d.width, d.height)?;
    for row in (0..d.height).rev() {
        let mut line = String::with_capacity(d.width as usize);
        for col in 0..d.width {
            let s = SiteCoord::new(d.anchor.x + col, d.anchor.y + row);
            line.push(if cfg.get(s) { '1' } else { '0' });
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Read the plain-text site-configuration format. The anchor is always
/// (0,0); the format stores shape and states only.
pub fn read_site_config(r: impl BufRead) -> Result<SiteConfig, TextFormatError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| TextFormatError::Header("empty input".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "percolation" {
        return Err(TextFormatError::Header(header.clone()));
    }
    let width: i32 = parts[2]
        .parse()
        .map_err(|_| TextFormatError::Header(header.clone()))?;
    let height: i32 = parts[3]
        .parse()
        .map_err(|_| TextFormatError::Header(header.clone()))?;
    let domain = match parts[1] {
        "box" => Domain::planar_box(width, height)?,
        "torus" => Domain::torus(width, height)?,
        other => return Err(TextFormatError::Header(format!("unknown kind {other}"))),
    };
    let mut cfg = SiteConfig::zeros(domain);
    for row in (0..height).rev() {
        let lineno = (height - row) as usize;
        let line = lines
            .next()
            .ok_or_else(|| TextFormatError::Line(lineno, "missing row".into()))??;
        let line = line.trim_end();
        if line.len() != width as usize {
            return Err(TextFormatError::Line(lineno, format!("expected {width} chars")));
        }
        for (col, ch) in line.chars().enumerate() {
            let v = match ch {
                '0' => false,
                '1' => true,
                other => return Err(TextFormatError::Line(lineno, format!("bad char {other:?}"))),
            };
            cfg.set(SiteCoord::new(col as i32, row), v);
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box2() -> Domain {
        Domain::planar_box(2, 2).unwrap()
    }

    #[test]
    fn allowed_list_closed_under_complement_and_rotation() {
        for &p in &ALLOWED_PATTERNS {
            assert!(ALLOWED[(!p & 0xf) as usize], "complement of {p:04b}");
            // Clockwise reading rotated by one corner: (d1 d2 d3 d4) -> (d4 d1 d2 d3).
            let rot = ((p & 1) << 3) | (p >> 1);
            assert!(ALLOWED[rot as usize], "rotation of {p:04b}");
        }
    }

    #[test]
    fn all_zero_valid_and_0101_invalid() {
        let d = box2();
        assert!(validate(&SiteConfig::zeros(d)).is_valid());
        // Pattern 0101: LL=0, UL=1, UR=0, LR=1.
        let cfg = SiteConfig::from_fn(d, |s| (s.x, s.y) == (0, 1) || (s.x, s.y) == (1, 0));
        match validate(&cfg) {
            Validity::Invalid(faces) => assert_eq!(faces, vec![FaceId::new(0, 0)]),
            Validity::Valid => panic!("0101 must be invalid"),
        }
    }

    #[test]
    fn six_of_sixteen_on_single_face() {
        let d = box2();
        let mut valid = 0;
        for m in 0u32..16 {
            let cfg = SiteConfig::from_fn(d, |s| {
                let i = d.site_index(s).unwrap();
                (m >> i) & 1 == 1
            });
            if validate(&cfg).is_valid() {
                valid += 1;
            }
        }
        assert_eq!(valid, 6);
    }

    #[test]
    fn theta_involution_and_validity() {
        let d = Domain::torus(4, 4).unwrap();
        for cfg in enumerate_omega(d, 16).unwrap() {
            let t = theta(&cfg);
            assert!(validate(&t).is_valid());
            assert_eq!(theta(&t), cfg);
            assert_ne!(t, cfg, "theta is fixed-point-free");
        }
    }

    #[test]
    fn white_flip_behaviour() {
        let d = Domain::planar_box(4, 4).unwrap();
        let zero = SiteConfig::zeros(d);
        let w = FaceId::new(1, 0);
        let flipped = white_face_flip(&zero, w).unwrap();
        assert!(validate(&flipped).is_valid());
        assert_eq!(flipped.ones(), 4);
        assert_eq!(white_face_flip(&flipped, w).unwrap(), zero);
        assert_eq!(
            white_face_flip(&zero, FaceId::new(0, 0)),
            Err(ConstrainedError::FaceNotWhite(FaceId::new(0, 0)))
        );
        let mut non_mono = zero.clone();
        non_mono.set(SiteCoord::new(1, 0), true);
        assert_eq!(
            white_face_flip(&non_mono, w),
            Err(ConstrainedError::FaceNotMonochromatic(w))
        );
    }

    #[test]
    fn phi_rules() {
        let d = box2();
        // 1100: left pair 1, right pair 0 -> vertical edge present.
        let cfg = SiteConfig::from_fn(d, |s| s.x == 0);
        let c = phi(&cfg).unwrap();
        let f = FaceId::new(0, 0);
        let vert = edge_with_orientation(f, Orientation::Vertical);
        let horiz = edge_with_orientation(f, Orientation::Horizontal);
        assert!(c.is_present(vert));
        assert!(!c.is_present(horiz));
        // All-zero maps to all-absent.
        assert_eq!(phi(&SiteConfig::zeros(d)).unwrap().present_count(), 0);
        // Invalid input is reported.
        let bad = SiteConfig::from_fn(d, |s| (s.x + s.y) % 2 == 1);
        assert!(matches!(phi(&bad), Err(ConstrainedError::InvalidInput(_))));
    }

    #[test]
    fn phi_two_to_one_under_theta() {
        let d = Domain::torus(4, 4).unwrap();
        for cfg in enumerate_omega(d, 16).unwrap() {
            assert_eq!(phi(&cfg).unwrap(), phi(&theta(&cfg)).unwrap());
        }
    }

    #[test]
    fn phi_inverse_round_trip() {
        // On a torus every lattice edge is crossable, so phi determines the
        // configuration up to theta and the round trip is exact.
        for d in [Domain::torus(4, 4).unwrap(), Domain::torus(2, 4).unwrap()] {
            for cfg in enumerate_omega(d, 16).unwrap() {
                let c = phi(&cfg).unwrap();
                let seed = SiteCoord::new(d.anchor.x, d.anchor.y);
                let back = phi_inverse(&c, seed, cfg.get(seed)).unwrap();
                assert_eq!(back, cfg);
                // The other seed state gives the theta partner.
                let other = phi_inverse(&c, seed, !cfg.get(seed)).unwrap();
                assert_eq!(other, theta(&cfg));
            }
        }
        // On a free-boundary box larger than 2x2 some rim edges carry no
        // contour edge, so phi forgets state changes across them; the
        // output is still valid and maps back onto the same contours.
        let d = Domain::planar_box(4, 3).unwrap();
        for cfg in enumerate_omega(d, 16).unwrap() {
            let c = phi(&cfg).unwrap();
            let seed = SiteCoord::new(0, 0);
            let back = phi_inverse(&c, seed, cfg.get(seed)).unwrap();
            assert!(validate(&back).is_valid());
            assert_eq!(phi(&back).unwrap(), c);
        }
    }

    #[test]
    fn winding_contour_is_inconsistent() {
        // A single wrapping line of present primal edges on a 4x4 torus
        // crosses a vertical meridian an odd number of times.
        let d = Domain::torus(4, 4).unwrap();
        let mut c = ContourConfig::empty(d);
        for f in [FaceId::new(0, 0), FaceId::new(2, 0)] {
            c.set(edge_with_orientation(f, Orientation::Horizontal), true).unwrap();
        }
        assert!(c.validate_even_degree().is_ok());
        assert_eq!(
            phi_inverse(&c, SiteCoord::new(0, 0), false),
            Err(ConstrainedError::InconsistentContours)
        );
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_omega(box2(), 25).unwrap().len(), 6);
        let strip = Domain::planar_box(1, 2).unwrap();
        assert_eq!(enumerate_omega(strip, 25).unwrap().len(), 4);
        assert_eq!(enumerate_omega(Domain::torus(2, 2).unwrap(), 25).unwrap().len(), 6);
        let too_big = Domain::planar_box(6, 6).unwrap();
        assert!(matches!(
            enumerate_omega(too_big, 25),
            Err(ConstrainedError::DomainTooLarge { sites: 36, cap: 25 })
        ));
    }

    #[test]
    fn enumeration_even_and_theta_paired() {
        for d in [
            Domain::planar_box(3, 3).unwrap(),
            Domain::planar_box(4, 4).unwrap(),
            Domain::torus(4, 4).unwrap(),
        ] {
            let omega = enumerate_omega(d, 16).unwrap();
            assert_eq!(omega.len() % 2, 0);
            let set: std::collections::HashSet<_> = omega.iter().cloned().collect();
            for cfg in &omega {
                assert!(set.contains(&theta(cfg)));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let d = Domain::planar_box(3, 2).unwrap();
        let cfg = SiteConfig::from_fn(d, |s| s.x == s.y);
        let mut buf = Vec::new();
        write_site_config(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("percolation box 3 2\n"));
        let back = read_site_config(&buf[..]).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn contour_config_crossing_guard() {
        let d = Domain::torus(4, 4).unwrap();
        let mut c = ContourConfig::empty(d);
        let f = FaceId::new(0, 0);
        c.set(ContourEdgeId::new(f, Grid::Primal), true).unwrap();
        assert_eq!(
            c.set(ContourEdgeId::new(f, Grid::Dual), true),
            Err(ConstrainedError::CrossingEdges(f))
        );
        c.set(ContourEdgeId::new(f, Grid::Primal), false).unwrap();
        c.set(ContourEdgeId::new(f, Grid::Dual), true).unwrap();
        assert!(c.is_present(ContourEdgeId::new(f, Grid::Dual)));
    }
}
