//! Retraction onto the subcomplex of marked graphs carrying a one-edge
//! free splitting.

use outspine::format::{parse_splitting, print_marked, print_splitting};
use outspine::graph::enumerate_natural_subforests;
use outspine::retract_split::{in_cvkt, retract_big_r, retraction_audit};
use outspine::sample::random_spine_vertex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SPLITTING: &str = "splitting { type: loop; vertex A = a1 a2; stable: a3; }";

fn main() -> outspine::Result<()> {
    let data = parse_splitting(SPLITTING)?;
    print!("{}", print_splitting(&data));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut g = random_spine_vertex(&mut rng, 3, 5)?;
    while g.graph().nv() < 2 {
        g = random_spine_vertex(&mut rng, 3, 5)?;
    }
    println!("G:\n{}", print_marked(&g));
    println!("G in the subcomplex: {}", in_cvkt(&g, &data.blueprint)?.is_some());
    let r = retract_big_r(&g, &data)?;
    println!("R(G):\n{}", print_marked(&r));
    println!("R(G) in the subcomplex: {}", in_cvkt(&r, &data.blueprint)?.is_some());
    println!("R(R(G)) = R(G): {}", retract_big_r(&r, &data)?.equivalent(&r).is_some());
    for f in enumerate_natural_subforests(g.graph()).into_iter().filter(|f| !f.is_empty()).take(5) {
        println!("collapse {f:?}: retractions at distance {:?}", retraction_audit(&g, &f, &data));
    }
    Ok(())
}
