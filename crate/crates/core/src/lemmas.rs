//! Finite-box checks of the combinatorial facts behind the contour
//! machinery: contours never meet interfaces (checked with exact integer
//! geometry), interface fringes are monochromatic single-cluster cycles,
//! path crossing counts have the parity of the endpoint states, and the
//! components of the lattice minus a contour's crossed edges coincide
//! with the geometric regions cut out by the contour.

use crate::constrained::{phi, validate, SiteConfig};
use crate::lattice::{
    ContourEdgeId, Domain, DomainKind, Orientation, QPoint, QuarterEdgeId, SiteCoord,
};
use crate::topology::{
    crossing_parity, extract_contours, extract_interface, interface_fringe, label_clusters,
    ClusterLabeling, Contour,
};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LemmaReport {
    pub configs: usize,
    pub contours_checked: usize,
    pub interfaces_checked: usize,
    pub paths_checked: usize,
    pub regions_checked: usize,
    pub violations: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn absorb(&mut self, other: LemmaReport) {
        self.configs += other.configs;
        self.contours_checked += other.contours_checked;
        self.interfaces_checked += other.interfaces_checked;
        self.paths_checked += other.paths_checked;
        self.regions_checked += other.regions_checked;
        self.violations.extend(other.violations);
    }
}

/// Key for "this half-grid point and the next one along the axis are
/// covered by a single contour edge". A transversal crossing of a contour
/// segment happens exactly between two consecutive covered points.
fn covered_pairs(d: &Domain, edges: &[ContourEdgeId]) -> HashSet<(QPoint, bool)> {
    let mut pairs = HashSet::new();
    for e in edges {
        let c = e.center();
        let horizontal = e.orientation() == Orientation::Horizontal;
        let (sx, sy) = if horizontal { (2, 0) } else { (0, 2) };
        for k in -2i32..2 {
            let p = QPoint::new(c.x + k * sx, c.y + k * sy);
            pairs.insert((d.normalize_qpoint(p), horizontal));
        }
    }
    pairs
}

/// Contours never intersect interfaces (exact integer geometry). The only
/// candidate crossing of a vertical interface edge is a horizontal contour
/// segment through the cell row it separates, and vice versa.
fn check_contour_interface_disjoint(
    d: &Domain,
    pairs: &HashSet<(QPoint, bool)>,
    interface_edges: &[QuarterEdgeId],
) -> Result<(), String> {
    for e in interface_edges {
        let vertical = e.a.x == e.b.x;
        let (line, span_lo) = if vertical {
            (e.a.x, if e.b.y - e.a.y == 2 { e.a.y } else { e.b.y })
        } else {
            (e.a.y, if e.b.x - e.a.x == 2 { e.a.x } else { e.b.x })
        };
        // The only covered-point row/column inside the edge's span.
        let cross_at = span_lo + 1;
        let key = if vertical {
            (QPoint::new(line - 1, cross_at), true)
        } else {
            (QPoint::new(cross_at, line - 1), false)
        };
        if pairs.contains(&(d.normalize_qpoint(key.0), key.1)) {
            return Err(format!("interface edge {e:?} crossed by a contour"));
        }
    }
    Ok(())
}

/// Fringe of one interface component read off in traced order: walking
/// along the component, the nearest sites form a closed self-avoiding
/// walk. Returns the cyclic site sequence (consecutive duplicates
/// removed), or None when a site falls outside the domain.
fn fringe_walk(
    d: &Domain,
    component: &crate::topology::InterfaceComponent,
) -> Option<Vec<SiteCoord>> {
    let edges = &component.edges;
    if edges.is_empty() {
        return Some(Vec::new());
    }
    // Recover the traversal direction: consecutive edges share a vertex.
    let mut entry = {
        let first = edges[0];
        let second = edges[1 % edges.len()];
        if first.b == second.a || first.b == second.b {
            first.a
        } else {
            first.b
        }
    };
    let mut seq: Vec<SiteCoord> = Vec::new();
    for e in edges {
        let exit = if e.a == entry { e.b } else { e.a };
        // Sites at sup-distance 1 from this edge, ordered entry -> exit.
        let vertical = e.a.x == e.b.x;
        let (line, lo) = if vertical {
            (e.a.x, if e.b.y - e.a.y == 2 { e.a.y } else { e.b.y })
        } else {
            (e.a.y, if e.b.x - e.a.x == 2 { e.a.x } else { e.b.x })
        };
        let adj = if line.rem_euclid(4) == 1 { line - 1 } else { line + 1 };
        let mut along: Vec<i32> = Vec::new();
        for t in (lo - 1)..=(lo + 3) {
            if t.rem_euclid(4) == 0 {
                along.push(t);
            }
        }
        // Order along the walk direction; the stored span runs upward
        // from lo, so entering at the high end reverses it.
        let entry_low = if vertical { entry.y == lo } else { entry.x == lo };
        if !entry_low {
            along.reverse();
        }
        for t in along {
            let s = if vertical {
                SiteCoord::new(adj.div_euclid(4), t.div_euclid(4))
            } else {
                SiteCoord::new(t.div_euclid(4), adj.div_euclid(4))
            };
            let s = d.normalize_site(s);
            if !d.contains_site(s) {
                return None;
            }
            if seq.last() != Some(&s) {
                seq.push(s);
            }
        }
        entry = exit;
    }
    if seq.len() > 1 && seq.first() == seq.last() {
        seq.pop();
    }
    Some(seq)
}

/// Fringe structure: monochromatic, single cluster, and the vertex set of
/// a self-avoiding cycle read along the interface (full structure checked
/// only when nothing is clipped by a box rim).
fn check_fringe(
    d: &Domain,
    cfg: &SiteConfig,
    labels: &ClusterLabeling,
    component: &crate::topology::InterfaceComponent,
) -> Result<(), String> {
    let fringe = interface_fringe(d, component);
    if fringe.sites.is_empty() {
        return Ok(());
    }
    let state0 = cfg.get(fringe.sites[0]);
    if fringe.sites.iter().any(|&s| cfg.get(s) != state0) {
        return Err("fringe not monochromatic".into());
    }
    let label0 = labels.label_of(fringe.sites[0]);
    if fringe.sites.iter().any(|&s| labels.label_of(s) != label0) {
        return Err("fringe split across clusters".into());
    }
    if fringe.clipped {
        return Ok(());
    }
    let walk = match fringe_walk(d, component) {
        Some(w) => w,
        None => return Ok(()),
    };
    let walk_set: HashSet<SiteCoord> = walk.iter().copied().collect();
    if walk_set.len() != walk.len() {
        return Err("fringe walk revisits a site".into());
    }
    let fringe_set: HashSet<SiteCoord> = fringe.sites.iter().copied().collect();
    if walk_set != fringe_set {
        return Err("fringe walk misses sites".into());
    }
    if walk.len() > 1 {
        let adjacent = |a: SiteCoord, b: SiteCoord| d.neighbors(a).contains(&b);
        for w in walk.windows(2) {
            if !adjacent(w[0], w[1]) {
                return Err("fringe walk steps between non-adjacent sites".into());
            }
        }
        if !adjacent(walk[0], *walk.last().unwrap()) {
            return Err("fringe walk does not close".into());
        }
    }
    Ok(())
}

/// Monotone staircase between two sites, one leg first then the other.
pub fn staircase_path(a: SiteCoord, b: SiteCoord, x_first: bool) -> Vec<SiteCoord> {
    let mut path = vec![a];
    let mut cur = a;
    if x_first {
        while cur.x != b.x {
            cur.x += (b.x - cur.x).signum();
            path.push(cur);
        }
        while cur.y != b.y {
            cur.y += (b.y - cur.y).signum();
            path.push(cur);
        }
    } else {
        while cur.y != b.y {
            cur.y += (b.y - cur.y).signum();
            path.push(cur);
        }
        while cur.x != b.x {
            cur.x += (b.x - cur.x).signum();
            path.push(cur);
        }
    }
    path
}

/// True when every edge along the path carries a potential contour edge.
/// Near a box rim some lattice edges have no contour edge at all; states
/// may change freely across those, so the parity relation is only claimed
/// for fully crossable paths.
pub fn path_fully_crossable(d: &Domain, path: &[SiteCoord]) -> bool {
    path.windows(2).all(|w| {
        d.crossing_edge_of(crate::constrained::g_edge_between(d, w[0], w[1]))
            .is_some()
    })
}

/// Crossing count parity equals the endpoint state difference, and is the
/// same along the two staircase paths. Returns Ok(false) when either
/// staircase leaves the crossable subgraph (nothing checked).
fn check_crossing_parity(cfg: &SiteConfig, a: SiteCoord, b: SiteCoord) -> Result<bool, String> {
    let d = cfg.domain();
    let p1 = staircase_path(a, b, true);
    let p2 = staircase_path(a, b, false);
    if !path_fully_crossable(d, &p1) || !path_fully_crossable(d, &p2) {
        return Ok(false);
    }
    let c1 = crossing_parity(cfg, &p1).map_err(|e| e.to_string())?;
    let c2 = crossing_parity(cfg, &p2).map_err(|e| e.to_string())?;
    if (c1.count % 2 == 1) != c1.parity {
        return Err(format!("crossing parity mismatch on {a:?}->{b:?}"));
    }
    if c1.count % 2 != c2.count % 2 {
        return Err(format!("path replacement changes parity on {a:?}->{b:?}"));
    }
    Ok(true)
}

/// Graph components of the box minus a contour's crossed edges versus the
/// geometric regions of the site hull minus the contour, computed by an
/// independent flood fill over half-step cells.
fn check_regions(d: &Domain, contour: &Contour) -> Result<(), String> {
    assert_eq!(d.kind, DomainKind::PlanarBox);
    let mut blocked_pairs: HashSet<(SiteCoord, SiteCoord)> = HashSet::new();
    for e in &contour.edges {
        for g in d.g_edges_crossed_by(*e) {
            let a = g.origin;
            let b = d.normalize_site(g.other_end());
            if d.contains_site(a) && d.contains_site(b) {
                blocked_pairs.insert((a, b));
                blocked_pairs.insert((b, a));
            }
        }
    }
    // Graph flood over sites.
    let n = d.site_count();
    let mut graph_label = vec![u32::MAX; n];
    let mut next = 0u32;
    for i in 0..n {
        if graph_label[i] != u32::MAX {
            continue;
        }
        let mut stack = vec![i];
        graph_label[i] = next;
        while let Some(j) = stack.pop() {
            let s = d.site_at(j);
            for t in d.neighbors(s) {
                let k = d.site_index(t).unwrap();
                if graph_label[k] == u32::MAX && !blocked_pairs.contains(&(s, t)) {
                    graph_label[k] = next;
                    stack.push(k);
                }
            }
        }
        next += 1;
    }
    // Geometric flood over half-step cells of the site hull. Cell (ix,iy)
    // covers quarter square [2ix, 2ix+2] x [2iy, 2iy+2] relative to the
    // anchor; contour segments lie exactly on cell sides.
    let cw = (2 * (d.width - 1)).max(1) as usize;
    let ch = (2 * (d.height - 1)).max(1) as usize;
    let mut blocked_sides: HashSet<QPoint> = HashSet::new();
    for e in &contour.edges {
        let c = e.center();
        let (sx, sy) = match e.orientation() {
            Orientation::Horizontal => (1, 0),
            Orientation::Vertical => (0, 1),
        };
        // Midpoints of the four cell sides along the segment: offsets
        // -3, -1, 1, 3 from the center.
        for k in [-3, -1, 1, 3] {
            blocked_sides.insert(QPoint::new(c.x + k * sx, c.y + k * sy));
        }
    }
    let mut geo_label = vec![u32::MAX; cw * ch];
    let mut geo_next = 0u32;
    let side_mid = |ix: usize, iy: usize, dir: usize| -> QPoint {
        let base_x = 4 * d.anchor.x + 2 * ix as i32;
        let base_y = 4 * d.anchor.y + 2 * iy as i32;
        match dir {
            0 => QPoint::new(base_x + 2, base_y + 1), // east side
            1 => QPoint::new(base_x, base_y + 1),     // west side
            2 => QPoint::new(base_x + 1, base_y + 2), // north side
            _ => QPoint::new(base_x + 1, base_y),     // south side
        }
    };
    for start in 0..cw * ch {
        if geo_label[start] != u32::MAX {
            continue;
        }
        geo_label[start] = geo_next;
        let mut stack = vec![start];
        while let Some(cell) = stack.pop() {
            let (ix, iy) = (cell % cw, cell / cw);
            let moves = [(0usize, 1i32, 0i32), (1, -1, 0), (2, 0, 1), (3, 0, -1)];
            for (dir, dx, dy) in moves {
                let (jx, jy) = (ix as i32 + dx, iy as i32 + dy);
                if jx < 0 || jy < 0 || jx as usize >= cw || jy as usize >= ch {
                    continue;
                }
                let j = jy as usize * cw + jx as usize;
                if geo_label[j] != u32::MAX {
                    continue;
                }
                if blocked_sides.contains(&side_mid(ix, iy, dir)) {
                    continue;
                }
                geo_label[j] = geo_next;
                stack.push(j);
            }
        }
        geo_next += 1;
    }
    // A site is a corner of up to four cells, all in one region because
    // contour segments never lie on integer lines; take the lower-left
    // touching cell, clamped into the grid.
    let geo_of_site = |s: SiteCoord| -> u32 {
        let ix = (2 * (s.x - d.anchor.x)).min(cw as i32 - 1).max(0) as usize;
        let iy = (2 * (s.y - d.anchor.y)).min(ch as i32 - 1).max(0) as usize;
        geo_label[iy * cw + ix]
    };
    let mut graph_to_geo: HashMap<u32, u32> = HashMap::new();
    let mut geo_to_graph: HashMap<u32, u32> = HashMap::new();
    for i in 0..n {
        let s = d.site_at(i);
        let (gl, ge) = (graph_label[i], geo_of_site(s));
        if *graph_to_geo.entry(gl).or_insert(ge) != ge {
            return Err(format!("graph component {gl} spans two regions"));
        }
        if *geo_to_graph.entry(ge).or_insert(gl) != gl {
            return Err(format!("region {ge} spans two graph components"));
        }
    }
    Ok(())
}

/// Options for one full lemma pass over a configuration.
pub struct LemmaOptions {
    /// Number of random site pairs for the crossing-parity check (boxes).
    pub parity_pairs: usize,
    /// Number of contours beyond the largest to region-check (boxes).
    pub extra_region_contours: usize,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions { parity_pairs: 4, extra_region_contours: 2 }
    }
}

/// Run all applicable lemma checks on one valid configuration.
pub fn check_config(cfg: &SiteConfig, opts: &LemmaOptions, rng: &mut impl Rng) -> LemmaReport {
    let mut report = LemmaReport { configs: 1, ..Default::default() };
    let d = *cfg.domain();
    debug_assert!(validate(cfg).is_valid());
    let contours_cfg = match phi(cfg) {
        Ok(c) => c,
        Err(e) => {
            report.violations.push(format!("phi failed: {e}"));
            return report;
        }
    };
    let labels = label_clusters(cfg);
    let set = extract_contours(&contours_cfg);
    let all_edges: Vec<ContourEdgeId> = contours_cfg.present_edges().collect();
    let pairs = covered_pairs(&d, &all_edges);
    for contour in &set.contours {
        report.contours_checked += 1;
        let iface = extract_interface(&d, &contour.edges);
        for comp in &iface.components {
            report.interfaces_checked += 1;
            if let Err(msg) = check_contour_interface_disjoint(&d, &pairs, &comp.edges) {
                report.violations.push(msg);
            }
            // The fringe statement needs even contour degrees, which a box
            // rim does not guarantee: contours dangling at non-interior
            // vertices are excluded.
            if !contour.touches_boundary {
                if let Err(msg) = check_fringe(&d, cfg, &labels, comp) {
                    report.violations.push(msg);
                }
            }
        }
    }
    if d.kind == DomainKind::PlanarBox {
        let mut attempts = 0;
        let mut checked = 0;
        while checked < opts.parity_pairs && attempts < 8 * opts.parity_pairs {
            attempts += 1;
            let a = d.site_at(rng.gen_range(0..d.site_count()));
            let b = d.site_at(rng.gen_range(0..d.site_count()));
            match check_crossing_parity(cfg, a, b) {
                Ok(true) => {
                    checked += 1;
                    report.paths_checked += 1;
                }
                Ok(false) => {}
                Err(msg) => {
                    checked += 1;
                    report.paths_checked += 1;
                    report.violations.push(msg);
                }
            }
        }
        if !set.contours.is_empty() {
            let mut picks: Vec<usize> = Vec::new();
            let largest = (0..set.contours.len())
                .max_by_key(|&i| set.contours[i].len())
                .unwrap();
            picks.push(largest);
            for _ in 0..opts.extra_region_contours.min(set.contours.len()) {
                picks.push(rng.gen_range(0..set.contours.len()));
            }
            picks.sort_unstable();
            picks.dedup();
            for i in picks {
                report.regions_checked += 1;
                if let Err(msg) = check_regions(&d, &set.contours[i]) {
                    report.violations.push(msg);
                }
            }
        }
    }
    report
}

/// Exhaustive lemma pass over every valid configuration of small domains.
pub fn exhaustive_suite(domains: &[Domain], cap: usize, seed: u64) -> LemmaReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::default();
    let opts = LemmaOptions { parity_pairs: 2, extra_region_contours: 64 };
    for d in domains {
        let omega = crate::constrained::enumerate_omega(*d, cap).expect("domain under cap");
        for cfg in &omega {
            report.absorb(check_config(cfg, &opts, &mut rng));
        }
    }
    report
}

/// Sampled lemma pass: valid configurations drawn on a torus, with every
/// other sample reinterpreted on a free-boundary box of the same size
/// (constraints are local, so the crop stays valid).
pub fn sampled_suite(side: i32, samples: usize, seed: u64) -> LemmaReport {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let torus = Domain::torus(side, side).unwrap();
    let boxd = Domain::planar_box(side, side).unwrap();
    let opts = LemmaOptions::default();
    let mut report = LemmaReport::default();
    for k in 0..samples {
        let cfg = crate::sampling::random_valid_config(torus, &mut rng, (side * side / 2) as usize);
        if k % 2 == 0 {
            report.absorb(check_config(&cfg, &opts, &mut rng));
        } else {
            let cropped = cfg.reinterpret(boxd);
            debug_assert!(validate(&cropped).is_valid());
            report.absorb(check_config(&cropped, &opts, &mut rng));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn lemma_suite_on_small_boxes() {
        let domains = [
            Domain::planar_box(2, 2).unwrap(),
            Domain::planar_box(3, 3).unwrap(),
            Domain::planar_box(4, 4).unwrap(),
        ];
        let report = exhaustive_suite(&domains, 16, 1);
        assert!(
            report.passed(),
            "violations: {:?}",
            &report.violations[..report.violations.len().min(5)]
        );
        assert!(report.configs > 0 && report.contours_checked > 0);
    }

    #[test]
    fn lemma_suite_sampled_smoke() {
        let report = sampled_suite(16, 60, 2);
        assert!(
            report.passed(),
            "violations: {:?}",
            &report.violations[..report.violations.len().min(5)]
        );
        assert!(report.interfaces_checked > 0);
        assert!(report.paths_checked > 0);
        assert!(report.regions_checked > 0);
    }

    #[test]
    fn parity_invariant_all_simple_paths_4x4() {
        // Exhaustive path-replacement check: for every endpoint pair, all
        // simple paths in the crossable subgraph have the same crossing
        // parity, matching the endpoint state difference.
        let d = Domain::planar_box(4, 4).unwrap();
        let mut all_pairs_paths: Vec<Vec<Vec<SiteCoord>>> = Vec::new();
        let mut total = 0;
        for i in 0..d.site_count() {
            for j in i + 1..d.site_count() {
                let paths = all_simple_paths(&d, d.site_at(i), d.site_at(j));
                total += paths.len();
                if !paths.is_empty() {
                    all_pairs_paths.push(paths);
                }
            }
        }
        assert!(total > 100, "got {total} paths");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let omega = crate::constrained::enumerate_omega(d, 16).unwrap();
        for cfg in omega.iter().filter(|_| rng.gen::<f64>() < 0.03) {
            for paths in &all_pairs_paths {
                let mut parities = std::collections::HashSet::new();
                for p in paths {
                    let cp = crossing_parity(cfg, p).unwrap();
                    parities.insert(cp.count % 2);
                    assert_eq!(cp.count % 2 == 1, cp.parity);
                }
                assert_eq!(parities.len(), 1);
            }
        }
    }

    // Simple paths staying inside the crossable subgraph (edges that carry
    // a potential contour edge).
    fn all_simple_paths(d: &Domain, a: SiteCoord, b: SiteCoord) -> Vec<Vec<SiteCoord>> {
        fn rec(
            d: &Domain,
            b: SiteCoord,
            path: &mut Vec<SiteCoord>,
            visited: &mut std::collections::HashSet<SiteCoord>,
            out: &mut Vec<Vec<SiteCoord>>,
        ) {
            let cur = *path.last().unwrap();
            if cur == b {
                out.push(path.clone());
                return;
            }
            for n in d.neighbors(cur) {
                let crossable = d
                    .crossing_edge_of(crate::constrained::g_edge_between(d, cur, n))
                    .is_some();
                if crossable && visited.insert(n) {
                    path.push(n);
                    rec(d, b, path, visited, out);
                    path.pop();
                    visited.remove(&n);
                }
            }
        }
        let mut out = Vec::new();
        let mut path = vec![a];
        let mut visited = std::collections::HashSet::new();
        visited.insert(a);
        rec(d, b, &mut path, &mut visited, &mut out);
        out
    }
}
