//! Stallings cores, core subgraphs realizing free factor systems, coindex.

use outspine::covers::stallings_core;
use outspine::format::{parse_system, print_system};
use outspine::marked::MarkedGraph;
use outspine::word::Word;

fn main() -> outspine::Result<()> {
    let rose = MarkedGraph::rose(3);
    let gens = vec![Word::parse("a1 a2 a1^-1")?, Word::parse("a1 a3 a3")?];
    let core = stallings_core(&gens, &rose, false)?;
    println!(
        "core of <a1 a2 a1^-1, a1 a3^2>: {} vertices, {} edges, rank {}",
        core.graph().nv(),
        core.graph().ne(),
        core.rank()
    );
    println!("embeds in the rose: {}", core.is_embedding());

    for s in ["a1 | a2", "a1, a2", "a1 a2 | a3", "a1"] {
        let f = parse_system(3, s)?;
        let realized = outspine::covers::realizes(&rose, &f)?.is_some();
        println!("{:<12} coindex {}  realized by the rose: {realized}", print_system(&f), f.coindex()?);
    }
    Ok(())
}
