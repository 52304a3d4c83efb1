#![allow(dead_code)]

use outspine::marked::MarkedGraph;
use outspine::nielsen::{product, random_word};
use outspine::sample::random_spine_vertex;
use outspine::word::{Automorphism, Letter, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

/// Unreduced letter sequences in rank `n`.
pub fn raw_letters(n: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=n as Letter, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i }), 0..=max_len)
}

pub fn word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    raw_letters(n, max_len).prop_map(|r| Word::reduce(&r))
}

pub fn nonempty_word(n: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(n, max_len).prop_filter("nontrivial", |w| !w.is_empty())
}

pub fn automorphism(seed: u64, n: usize, len: usize) -> Automorphism {
    product(n, &random_word(&mut rng(seed), n, len)).unwrap()
}

pub fn spine_vertex(seed: u64, n: usize, steps: usize) -> MarkedGraph {
    random_spine_vertex(&mut rng(seed), n, steps).unwrap()
}

/// Every reduced word of length at most `len` in rank `n`.
pub fn all_words(n: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::new();
        for x in &layer {
            for i in 1..=n as Letter {
                for l in [i, -i] {
                    if x.letters().last() != Some(&-l) {
                        next.push(x.mul(&Word::letter(l)));
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
