//! One PASS/FAIL line per acceptance criterion. Sample sizes, tolerances
//! and the seed are pinned in `outspine::selftest`.

use outspine::selftest::run_all;

const SEED: u64 = 1;

fn main() {
    let results = run_all(SEED);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
