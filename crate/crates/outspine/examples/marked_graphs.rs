//! Marked graphs: the right action, collapses, blow-ups and equivalence.

use outspine::format::{parse_automorphism, parse_marked, print_marked};
use outspine::graph::enumerate_blowups;
use outspine::word::CyclicWord;

const THETA: &str = "graph { v: v0 v1; e: e1 v0 v1; e2 v0 v1; e3 v0 v1; }
marking { a1 = e1 e2^-1; a2 = e2 e3^-1; }
basepoint: v0";

fn main() -> outspine::Result<()> {
    let g = parse_marked(THETA)?;
    println!("{}", print_marked(&g));

    let (rose, _) = g.collapse_marked(&[0])?;
    println!("collapsing e1:\n{}", print_marked(&rose.normalize()?));

    let phi = parse_automorphism("a1 a2; a2")?;
    let moved = g.act(&phi)?;
    println!("acted on by {}:\n{}", phi.map(), print_marked(&moved));
    println!("equivalent to the original: {}", moved.equivalent(&g).is_some());
    println!(
        "equivalent to itself acted on by the identity: {}",
        g.act(&phi.then_after(&phi.inverse())?)?.equivalent(&g).is_some()
    );

    let c = CyclicWord::of(&outspine::word::Word::parse("a1 a2")?)?;
    println!("circuit of [{c}]: {:?}", g.circuit_of(&c)?);
    println!("blow-ups of the rank-3 rose: {}", enumerate_blowups(&outspine::graph::CoreGraph::rose(3)).len());
    Ok(())
}
