//! Distortion table for the three witness families.

use outspine::witness::{Witness, WitnessCase, WitnessParams};

fn main() -> outspine::Result<()> {
    let cases = [
        WitnessParams { n: 3, case: WitnessCase::Connected { r: 1 } },
        WitnessParams { n: 4, case: WitnessCase::TwoComponent { r0: 1, r1: 1 } },
        WitnessParams { n: 5, case: WitnessCase::MultiComponent { r0: 1, r1: 1, extra: vec![1] } },
    ];
    for p in cases {
        let w = Witness::new(p.clone())?;
        println!("{p:?}");
        println!("{:>3} {:>14} {:>6} {:>9}", "k", "upper_nielsen", "i_k", "spine_lb");
        for row in w.report(10)? {
            println!("{:>3} {:>14} {:>6} {:>9}", row.k, row.upper_nielsen, row.i_k, row.spine_lb);
        }
        println!();
    }
    Ok(())
}
