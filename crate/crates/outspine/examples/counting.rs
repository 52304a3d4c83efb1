//! Crossing counts of conjugacy classes relative to a pair of subgroups,
//! and their behaviour under a collapse.

use outspine::counting::{build_context, count_i, lipschitz_audit};
use outspine::covers::realizes;
use outspine::graph::enumerate_natural_subforests;
use outspine::spine::expansions;
use outspine::witness::{Witness, WitnessCase, WitnessParams};
use outspine::word::{CyclicWord, Word};

fn main() -> outspine::Result<()> {
    let w = Witness::new(WitnessParams { n: 3, case: WitnessCase::Connected { r: 1 } })?;
    let ctx = w.context()?;
    for k in 0..8 {
        println!("c_{k} = {:<40} i = {}", w.c_k(k)?.to_string(), w.i_k(&ctx, k)?);
    }

    let rose = w.g0.act(&w.phi_k(2)?)?.normalize()?;
    let mut g = rose.clone();
    for (h, _) in expansions(&rose)? {
        if realizes(&h, &w.system)?.is_some() {
            g = h;
            break;
        }
    }
    let ctx = build_context(&w.a, &w.b, &g)?;
    let c = CyclicWord::of(&Word::parse("a3 a1 a2 a3^-1 a2")?)?;
    println!("count on a blow-up of phi_2 · G0: {:?}", count_i(&ctx, &c).map(|v| v.value));
    for f in enumerate_natural_subforests(g.graph()).into_iter().filter(|f| !f.is_empty()).take(4) {
        match lipschitz_audit(&w.a, &w.b, &g, &f, &c) {
            Ok((before, after)) => println!("collapse {f:?}: {before} -> {after}"),
            Err(e) => println!("collapse {f:?}: {e}"),
        }
    }
    Ok(())
}
