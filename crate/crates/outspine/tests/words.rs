mod common;

use common::*;
use outspine::witness::cancellation_events;
use outspine::word::{cyclic_reduce, free_reduce, invert_seq, simultaneous_conjugator, Automorphism, Endo, Word};
use proptest::prelude::*;

proptest! {
    #[test]
    fn reduce_is_idempotent(raw in raw_letters(3, 20)) {
        let once = free_reduce(&raw);
        prop_assert_eq!(free_reduce(&once), once);
    }

    #[test]
    fn word_times_inverse_is_trivial(x in word(3, 15)) {
        prop_assert!(x.mul(&x.inverse()).is_empty());
        let mut raw = x.letters().to_vec();
        raw.extend(invert_seq(x.letters()));
        prop_assert!(free_reduce(&raw).is_empty());
    }

    #[test]
    fn apply_respects_composition(
        f in prop::collection::vec(word(3, 4), 3),
        g in prop::collection::vec(word(3, 4), 3),
        x in word(3, 8),
    ) {
        let f = Endo::new(f).unwrap();
        let g = Endo::new(g).unwrap();
        let fg = Endo::compose(&f, &g).unwrap();
        prop_assert_eq!(fg.apply(&x).unwrap(), f.apply(&g.apply(&x).unwrap()).unwrap());
    }

    #[test]
    fn automorphism_inverse_fixes_basis(seed in any::<u64>(), len in 0usize..6) {
        let phi = automorphism(seed, 3, len);
        prop_assert!(phi.map().is_automorphism());
        let inv = phi.map().inverse().unwrap();
        let id = Endo::compose(phi.map(), &inv).unwrap();
        prop_assert!(id.is_identity());
    }

    #[test]
    fn cyclic_reduction_conjugates_back(x in nonempty_word(3, 12)) {
        let (c, g) = cyclic_reduce(&x).unwrap();
        prop_assert_eq!(g.mul(&c.to_word()).mul(&g.inverse()), x);
    }
}

/// Brute-force search over conjugators of bounded length.
fn brute_conjugator(u: &[Word], v: &[Word], n: usize, len: usize) -> Option<Word> {
    all_words(n, len).into_iter().find(|g| u.iter().zip(v).all(|(a, b)| g.inverse().mul(a).mul(g) == *b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conjugator_agrees_with_brute_force(
        u in prop::collection::vec(nonempty_word(2, 4), 1..=2),
        h in word(2, 3),
        scramble in any::<bool>(),
        other in nonempty_word(2, 4),
    ) {
        let mut v: Vec<Word> = u.iter().map(|a| h.inverse().mul(a).mul(&h)).collect();
        if scramble {
            v[0] = other;
        }
        let found = simultaneous_conjugator(&u, &v).unwrap();
        let brute = brute_conjugator(&u, &v, 2, 6);
        if let Some(g) = &found {
            for (a, b) in u.iter().zip(&v) {
                prop_assert_eq!(&g.inverse().mul(a).mul(g), b);
            }
        }
        prop_assert_eq!(found.is_some(), brute.is_some());
    }
}

#[test]
fn substitution_is_cancellation_free() {
    for n in 3..=5 {
        for m in 2..n {
            for k in 0..=12 {
                assert_eq!(cancellation_events(n, m, k).unwrap(), 0, "n={n} m={m} k={k}");
            }
        }
    }
}

#[test]
fn inverse_map_is_checked() {
    let f = Endo::new(vec![w("a1 a2"), w("a2")]).unwrap();
    let phi = Automorphism::new(f).unwrap();
    assert_eq!(phi.inverse().map().image(1), &w("a1 a2^-1"));
    assert!(Automorphism::new(Endo::new(vec![w("a1 a1"), w("a2")]).unwrap()).is_err());
}
