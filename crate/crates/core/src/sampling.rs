//! Seeded generation of valid configurations, used by the lemma fuzzing
//! suites and the surgery Monte Carlo checks.

use crate::constrained::{phi_inverse, validate, white_face_flip, SiteConfig};
use crate::lattice::{ContourEdgeId, Domain, FaceColor, Grid};
use crate::ContourConfig;
use rand::Rng;
use std::collections::HashMap;

/// Primal contour configuration induced by an i.i.d. 0/1 assignment on the
/// dual-grid vertices: a primal edge is present iff the two dual vertices
/// it separates disagree. Dual-grid vertices are identified lazily by
/// their white-face coordinates, so the same code serves boxes and tori.
pub fn random_primal_contours(domain: Domain, rng: &mut impl Rng) -> ContourConfig {
    let mut dual_state: HashMap<crate::lattice::FaceId, bool> = HashMap::new();
    let mut state_of = |f: crate::lattice::FaceId, rng: &mut dyn rand::RngCore| -> bool {
        *dual_state
            .entry(domain.normalize_face(f))
            .or_insert_with(|| rng.gen::<bool>())
    };
    let mut out = ContourConfig::empty(domain);
    for f in domain.black_faces() {
        let e = ContourEdgeId::new(f, Grid::Primal);
        // The primal edge of a black face crosses the dual edge through the
        // same face; that dual edge joins the centers of the two white
        // faces adjacent to the black face along the primal direction.
        let [p, q] = dual_neighbors_of(&e);
        let differ = state_of(p, rng) != state_of(q, rng);
        out.set(e, differ).expect("empty config cannot cross");
    }
    out
}

/// The two white faces whose centers are joined by the dual edge crossed
/// by `e` (i.e. the dual-grid endpoints of the perpendicular edge).
pub(crate) fn dual_neighbors_of(e: &ContourEdgeId) -> [crate::lattice::FaceId; 2] {
    use crate::lattice::{FaceId, Orientation};
    let ll = e.face.lower_left;
    let out = match e.orientation() {
        // Horizontal primal edge: the crossed dual edge is vertical, so the
        // white neighbors sit below and above the black face.
        Orientation::Horizontal => [FaceId::new(ll.x, ll.y - 1), FaceId::new(ll.x, ll.y + 1)],
        Orientation::Vertical => [FaceId::new(ll.x - 1, ll.y), FaceId::new(ll.x + 1, ll.y)],
    };
    debug_assert!(out.iter().all(|f| f.color() == FaceColor::White));
    out
}

/// A random valid configuration: reconstruct a site configuration from
/// random primal contours, then mix in white-face flips, which toggle
/// plaquettes of both contour grids. Always returns a valid configuration.
pub fn random_valid_config(domain: Domain, rng: &mut impl Rng, flip_attempts: usize) -> SiteConfig {
    let contours = random_primal_contours(domain, rng);
    let seed = crate::lattice::SiteCoord::new(domain.anchor.x, domain.anchor.y);
    let mut cfg =
        phi_inverse(&contours, seed, rng.gen::<bool>()).expect("spin-derived contours consistent");
    let whites = domain.white_faces();
    if !whites.is_empty() {
        for _ in 0..flip_attempts {
            let w = whites[rng.gen_range(0..whites.len())];
            if let Ok(next) = white_face_flip(&cfg, w) {
                if rng.gen::<bool>() {
                    cfg = next;
                }
            }
        }
    }
    debug_assert!(validate(&cfg).is_valid());
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sampler_outputs_are_valid_and_diverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut distinct = std::collections::HashSet::new();
        for d in [Domain::torus(8, 8).unwrap(), Domain::planar_box(8, 8).unwrap()] {
            for _ in 0..40 {
                let cfg = random_valid_config(d, &mut rng, 32);
                assert!(validate(&cfg).is_valid());
                distinct.insert(format!("{cfg:?}"));
            }
        }
        assert!(distinct.len() > 60, "sampler should not collapse to few states");
    }

    #[test]
    fn random_contours_have_even_interior_degree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in [Domain::torus(6, 6).unwrap(), Domain::planar_box(7, 5).unwrap()] {
            for _ in 0..20 {
                let c = random_primal_contours(d, &mut rng);
                assert!(c.validate_even_degree().is_ok());
            }
        }
    }
}
