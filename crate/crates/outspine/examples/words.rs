//! Reduction, cyclic reduction, substitution and inversion of maps.

use outspine::format::parse_automorphism;
use outspine::word::{cyclic_reduce, simultaneous_conjugator, Word};

fn main() -> outspine::Result<()> {
    let w = Word::parse("a2 a1 a1^-1 a3 a1 a2^-1")?;
    println!("reduced:        {w}");
    let (c, g) = cyclic_reduce(&w)?;
    println!("cyclic core:    {c}  (conjugator {g})");

    let phi = parse_automorphism("a1 -> a1 a2, a2 -> a2, a3 -> a3 a1")?;
    println!("phi:            {}", phi.map());
    println!("phi^-1:         {}", phi.inverse().map());
    println!("phi(w):         {}", phi.apply(&w)?);
    println!("phi^-1(phi(w)): {}", phi.inverse().apply(&phi.apply(&w)?)?);

    let u = vec![Word::parse("a1")?, Word::parse("a2 a3")?];
    let h = Word::parse("a3 a1^-1")?;
    let v: Vec<Word> = u.iter().map(|x| x.conj(&h)).collect();
    println!(
        "conjugator of {:?} onto {:?}: {:?}",
        fmt(&u),
        fmt(&v),
        simultaneous_conjugator(&u, &v)?.map(|g| g.to_string())
    );
    Ok(())
}

fn fmt(ws: &[Word]) -> Vec<String> {
    ws.iter().map(Word::to_string).collect()
}
