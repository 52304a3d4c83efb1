//! Elementary Nielsen automorphisms and words in them.
//!
//! The generating set is the classical one: left and right transvections,
//! inversions of a single letter, and transpositions of two letters.

use rand::Rng;

use crate::error::{Error, Result};
use crate::word::{Automorphism, Endo, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Nielsen {
    /// `a_i ↦ a_j a_i`
    Left(usize, usize),
    /// `a_i ↦ a_i a_j`
    Right(usize, usize),
    /// `a_i ↦ a_i^-1`
    Invert(usize),
    /// `a_i ↔ a_j`
    Swap(usize, usize),
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NielsenLetter {
    pub gen: Nielsen,
    pub inverse: bool,
}

impl Nielsen {
    pub fn letter(self) -> NielsenLetter {
        NielsenLetter { gen: self, inverse: false }
    }

    pub fn inv(self) -> NielsenLetter {
        NielsenLetter { gen: self, inverse: true }
    }

    fn indices(self) -> (usize, usize) {
        match self {
            Nielsen::Left(i, j) | Nielsen::Right(i, j) | Nielsen::Swap(i, j) => (i, j),
            Nielsen::Invert(i) => (i, i),
        }
    }
}

impl NielsenLetter {
    pub fn to_automorphism(self, n: usize) -> Result<Automorphism> {
        let (i, j) = self.gen.indices();
        let two = !matches!(self.gen, Nielsen::Invert(_));
        if i == 0 || j == 0 || i > n || j > n || (two && i == j) {
            return Err(Error::Precondition(format!("bad Nielsen generator {:?} for rank {n}", self.gen)));
        }
        let mut images: Vec<Word> = (1..=n as u32).map(Word::gen).collect();
        let (ai, aj) = (Word::gen(i as u32), Word::gen(j as u32));
        let aj = if self.inverse { aj.inverse() } else { aj };
        match self.gen {
            Nielsen::Left(..) => images[i - 1] = aj.mul(&ai),
            Nielsen::Right(..) => images[i - 1] = ai.mul(&aj),
            Nielsen::Invert(_) => images[i - 1] = ai.inverse(),
            Nielsen::Swap(..) => images.swap(i - 1, j - 1),
        }
        Automorphism::new(Endo::new(images)?)
    }
}

/// The product `g_1 ∘ g_2 ∘ … ∘ g_l`.
pub fn product(n: usize, word: &[NielsenLetter]) -> Result<Automorphism> {
    let mut acc = Automorphism::identity(n);
    for l in word {
        acc = acc.then_after(&l.to_automorphism(n)?)?;
    }
    Ok(acc)
}

/// Every generator and inverse for rank `n`, in a fixed order.
pub fn all_letters(n: usize) -> Vec<NielsenLetter> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                for g in [Nielsen::Left(i, j), Nielsen::Right(i, j)] {
                    out.push(g.letter());
                    out.push(g.inv());
                }
                if i < j {
                    out.push(Nielsen::Swap(i, j).letter());
                }
            }
        }
        out.push(Nielsen::Invert(i).letter());
    }
    out
}

/// A uniformly random word of the given length.
pub fn random_word<R: Rng>(rng: &mut R, n: usize, len: usize) -> Vec<NielsenLetter> {
    let letters = all_letters(n);
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters_are_automorphisms() {
        for l in all_letters(3) {
            let a = l.to_automorphism(3).unwrap();
            let b = NielsenLetter { gen: l.gen, inverse: !l.inverse }.to_automorphism(3).unwrap();
            if !matches!(l.gen, Nielsen::Swap(..) | Nielsen::Invert(_)) {
                assert_eq!(a.inverse(), b);
            }
        }
    }

    #[test]
    fn product_order() {
        let w = [Nielsen::Swap(1, 2).letter(), Nielsen::Left(1, 2).letter()];
        let p = product(2, &w).unwrap();
        assert_eq!(p.map().image(1), &Word::parse("a1 a2").unwrap());
        assert_eq!(p.map().image(2), &Word::parse("a1").unwrap());
    }
}
