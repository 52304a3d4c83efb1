//! Spine distances by breadth-first search and certified fold paths,
//! optionally kept inside the subcomplex realizing a free factor system.

use outspine::format::{parse_system, print_path};
use outspine::marked::MarkedGraph;
use outspine::nielsen::{product, random_word};
use outspine::spine::{bfs_distance, fold_path};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> outspine::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let r2 = MarkedGraph::rose(2);
    for len in 1..=4 {
        let y = r2.act(&product(2, &random_word(&mut rng, 2, len))?)?;
        let p = fold_path(&r2, &y, None)?;
        println!("rank 2, {len} Nielsen letters: bfs {:?}, fold path {}", bfs_distance(&r2, &y, 6)?, p.path.len());
    }

    let f = parse_system(3, "a1, a2")?;
    let r3 = MarkedGraph::rose(3);
    let y = r3.act(&outspine::format::parse_automorphism("a1 a2 a1; a2 a1; a3 a2 a1")?)?;
    let p = fold_path(&r3, &y, Some(&f))?;
    println!(
        "guarded by {{<a1, a2>}}: {} steps, certified {}, stays inside {:?}",
        p.path.len(),
        p.path.verify(),
        p.guarded
    );
    print!("{}", print_path(&p.path));
    Ok(())
}
