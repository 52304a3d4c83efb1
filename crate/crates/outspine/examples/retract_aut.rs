//! The retraction of pointed marked graphs of rank n onto rank n-1 and the
//! loop embedding it undoes.

use outspine::format::print_marked;
use outspine::graph::enumerate_subforests_kept;
use outspine::retract_aut::{embed_j, lipschitz_audit, retract_r, PointedMarkedGraph};
use outspine::sample::random_pointed_graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> outspine::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = PointedMarkedGraph::new(random_pointed_graph(&mut rng, 3, 5)?)?;
    println!("x:\n{}", print_marked(x.inner()));
    let r = retract_r(&x)?;
    println!("r(x):\n{}", print_marked(r.inner()));
    println!("r(j(r(x))) = r(x): {}", retract_r(&embed_j(&r)?)?.same_point(&r));

    let mut kept = x.inner().graph().natural_kept();
    kept[x.inner().base()] = true;
    for f in enumerate_subforests_kept(x.inner().graph(), &kept).into_iter().filter(|f| !f.is_empty()) {
        let a = lipschitz_audit(&x, &f)?;
        println!("collapse {f:?}: retractions at distance {} (hull {:?})", a.distance, a.hull);
    }
    Ok(())
}
