mod common;

use common::*;
use outspine::counting::{build_context, count_i, lipschitz_audit};
use outspine::covers::realizes;
use outspine::error::Error;
use outspine::graph::enumerate_natural_subforests;
use outspine::marked::MarkedGraph;
use outspine::witness::{Witness, WitnessCase, WitnessParams};
use outspine::word::{CyclicWord, Word};
use proptest::prelude::*;

fn case1() -> Witness {
    Witness::new(WitnessParams { n: 3, case: WitnessCase::Connected { r: 1 } }).unwrap()
}

/// A vertex realizing the A-system: the witness base graph pushed by `φ_k`
/// and then by a random walk, rejecting steps that leave the subcomplex.
fn sample_in_subcomplex(w: &Witness, seed: u64, k: usize) -> MarkedGraph {
    let mut g = w.g0.act(&w.phi_k(k).unwrap()).unwrap().normalize().unwrap();
    let mut r = rng(seed);
    for _ in 0..4 {
        let kept = g.graph().natural_kept();
        let next = if seed % 2 == 0 {
            outspine::sample::random_blowup(&mut r, &g).unwrap()
        } else {
            outspine::sample::random_collapse(&mut r, &g, &kept).unwrap()
        }
        .normalize()
        .unwrap();
        if realizes(&next, &w.system).unwrap().is_some() {
            g = next;
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn depends_only_on_the_class(c in nonempty_word(3, 10), h in word(3, 5), seed in any::<u64>(), k in 0usize..4) {
        let w = case1();
        let g = sample_in_subcomplex(&w, seed, k);
        let ctx = build_context(&w.a, &w.b, &g).unwrap();
        let x = count_i(&ctx, &CyclicWord::of(&c).unwrap());
        let y = count_i(&ctx, &CyclicWord::of(&c.conj(&h)).unwrap());
        prop_assert_eq!(x.map(|v| v.value), y.map(|v| v.value));
    }

    #[test]
    fn translation_by_b(c in nonempty_word(3, 10), b in word(2, 4)) {
        let w = case1();
        let ctx = w.context().unwrap();
        let x = count_i(&ctx, &CyclicWord::of(&c).unwrap()).map(|v| v.value);
        let y = count_i(&ctx, &CyclicWord::of(&b.mul(&c).mul(&b.inverse())).unwrap()).map(|v| v.value);
        prop_assert_eq!(x, y);
    }

    #[test]
    fn equivariance(c in nonempty_word(3, 10), seed in any::<u64>(), len in 0usize..=3) {
        let w = case1();
        let g = sample_in_subcomplex(&w, seed, 1);
        let psi = automorphism(seed ^ 11, 3, len);
        let x = g.act(&psi.inverse()).unwrap();
        let img = |ws: &[Word]| ws.iter().map(|v| psi.apply(v).unwrap()).collect::<Vec<_>>();
        let a2: Vec<Vec<Word>> = w.a.iter().map(|c| img(c)).collect();
        let lhs = count_i(&build_context(&w.a, &w.b, &x.act(&psi).unwrap()).unwrap(), &CyclicWord::of(&c).unwrap());
        let rhs = count_i(&build_context(&a2, &img(&w.b), &x).unwrap(), &CyclicWord::of(&psi.apply(&c).unwrap()).unwrap());
        prop_assert_eq!(lhs.map(|v| v.value), rhs.map(|v| v.value));
    }

    #[test]
    fn bracket_under_collapse(c in nonempty_word(3, 12), seed in any::<u64>(), k in 0usize..4, pick in any::<prop::sample::Index>()) {
        let w = case1();
        let g = sample_in_subcomplex(&w, seed, k);
        let forests: Vec<Vec<usize>> = enumerate_natural_subforests(g.graph()).into_iter().filter(|f| !f.is_empty()).collect();
        prop_assume!(!forests.is_empty());
        match lipschitz_audit(&w.a, &w.b, &g, pick.get(&forests), &CyclicWord::of(&c).unwrap()) {
            Ok((before, after)) => prop_assert!(before <= after && after <= before + 2, "{} -> {}", before, after),
            Err(Error::ConjugateIntoB) | Err(Error::Precondition(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

#[test]
fn rose_examples() {
    let ctx = build_context(&[vec![w("a1")]], &[w("a1"), w("a2")], &MarkedGraph::rose(3)).unwrap();
    let cw = |s: &str| CyclicWord::of(&w(s)).unwrap();
    assert_eq!(count_i(&ctx, &cw("a3")).unwrap().value, 0);
    assert_eq!(count_i(&ctx, &cw("a3 a1 a2 a1")).unwrap().value, 1);
    assert_eq!(count_i(&ctx, &cw("a3 a2 a2 a3 a2")).unwrap().value, 2);
    assert_eq!(count_i(&ctx, &cw("a2 a1")).unwrap_err(), Error::ConjugateIntoB);
}

#[test]
fn counts_follow_matrix_powers() {
    let w = case1();
    let ctx = w.context().unwrap();
    let fib: Vec<usize> = (0..=12).map(|k| w.i_k(&ctx, k).unwrap()).collect();
    assert_eq!(fib, vec![0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
    for k in 0..=12 {
        assert_eq!(w.i_k_oracle(k), fib[k].into());
    }
}
