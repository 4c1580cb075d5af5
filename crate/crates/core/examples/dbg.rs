use cperc::constrained::*;
use cperc::lattice::*;
use cperc::topology::*;
use rand::SeedableRng;

fn main() {
    // Case 2: unclipped fringe not 2-regular on sampled torus configs.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let torus = Domain::torus(16, 16).unwrap();
    'outer: for _ in 0..200 {
        let cfg = cperc::sampling::random_valid_config(torus, &mut rng, 128);
        let c = phi(&cfg).unwrap();
        let set = extract_contours(&c);
        for contour in &set.contours {
            let iface = extract_interface(&torus, &contour.edges);
            for comp in &iface.components {
                let fr = interface_fringe(&torus, comp);
                if fr.sites.is_empty() || fr.clipped { continue; }
                let sset: std::collections::HashSet<_> = fr.sites.iter().copied().collect();
                for &s in &fr.sites {
                    let deg = torus.neighbors(s).iter().filter(|n| sset.contains(*n)).count();
                    if deg != 2 {
                        println!("site {s:?} has fringe degree {deg}");
                        println!("contour len {} touchesス {}", contour.edges.len(), contour.wraps);
                        println!("contour: {:?}", contour.edges.iter().map(|e| (e.face.lower_left.x, e.face.lower_left.y, e.grid)).collect::<Vec<_>>());
                        println!("comp edges {}", comp.edges.len());
                        println!("fringe: {:?}", fr.sites.iter().map(|s| (s.x, s.y)).collect::<Vec<_>>());
                        break 'outer;
                    }
                }
            }
        }
    }
    // Case 3: parity test failure.
    let d = Domain::planar_box(4, 4).unwrap();
    let omega = enumerate_omega(d, 16).unwrap();
    println!("omega 4x4: {}", omega.len());
}
