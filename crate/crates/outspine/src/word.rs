//! Reduced words, cyclic words and endomorphisms of the free group F_n.
//!
//! A letter is a nonzero `i32`: `+i` stands for the basis element `a_i` and
//! `-i` for its inverse. The same signed encoding is reused for directed
//! edges of graphs, so free reduction of words and of edge paths is one
//! function.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::fold::Folder;

pub type Letter = i32;

/// Total order on letters: `a1 < a1^-1 < a2 < a2^-1 < ...`.
pub fn letter_key(l: Letter) -> u32 {
    l.unsigned_abs() * 2 + u32::from(l < 0)
}

fn cmp_letters(a: &[Letter], b: &[Letter]) -> Ordering {
    a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l)))
}

/// Free reduction with a stack; returns the reduced sequence and the number
/// of cancelling pairs removed.
pub fn free_reduce_count(raw: &[Letter]) -> (Vec<Letter>, usize) {
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    let mut cancelled = 0;
    for &l in raw {
        if out.last() == Some(&-l) {
            out.pop();
            cancelled += 1;
        } else {
            out.push(l);
        }
    }
    (out, cancelled)
}

pub fn free_reduce(raw: &[Letter]) -> Vec<Letter> {
    free_reduce_count(raw).0
}

pub fn invert_seq(s: &[Letter]) -> Vec<Letter> {
    s.iter().rev().map(|&l| -l).collect()
}

/// Splits a reduced sequence as `p · c · p^-1` with `c` cyclically reduced.
pub fn cyclic_core(s: &[Letter]) -> (usize, &[Letter]) {
    let mut i = 0;
    let mut j = s.len();
    while j > i + 1 && s[i] == -s[j - 1] {
        i += 1;
        j -= 1;
    }
    (i, &s[i..j])
}

/// Index of the lexicographically least rotation.
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let mut best = 0;
    for r in 1..n {
        let ord = (0..n).map(|k| letter_key(s[(r + k) % n])).cmp((0..n).map(|k| letter_key(s[(best + k) % n])));
        if ord == Ordering::Less {
            best = r;
        }
    }
    best
}

/// A freely reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<Letter>);

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| cmp_letters(&self.0, &other.0))
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn gen(i: u32) -> Word {
        Word(vec![i as Letter])
    }

    pub fn letter(l: Letter) -> Word {
        assert!(l != 0, "zero is not a letter");
        Word(vec![l])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(raw: &[Letter]) -> Word {
        assert!(raw.iter().all(|&l| l != 0), "zero is not a letter");
        Word(free_reduce(raw))
    }

    /// Freely reduces after checking that every letter lies in rank `rank`.
    pub fn reduce_in_rank(raw: &[Letter], rank: usize) -> Result<Word> {
        for &l in raw {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(Error::LetterOutOfRange { index: l.unsigned_abs(), rank });
            }
        }
        Ok(Word(free_reduce(raw)))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn fits_rank(&self, rank: usize) -> bool {
        self.max_index() <= rank
    }

    pub fn inverse(&self) -> Word {
        Word(invert_seq(&self.0))
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut raw = self.0.clone();
        raw.extend_from_slice(&other.0);
        Word(free_reduce(&raw))
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut raw = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            raw.extend_from_slice(&base.0);
        }
        Word(free_reduce(&raw))
    }

    /// `g^-1 · self · g`
    pub fn conj(&self, g: &Word) -> Word {
        g.inverse().mul(self).mul(g)
    }

    pub fn count_letter(&self, index: u32) -> usize {
        self.0.iter().filter(|l| l.unsigned_abs() == index).count()
    }

    /// Parses `a1 a2^-1 a3`; the empty string and `1` denote the identity.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" || s == "ε" {
            return Ok(Word::empty());
        }
        let mut raw = Vec::new();
        for tok in s.split_whitespace() {
            raw.push(parse_symbol(tok, 'a')?);
        }
        Ok(Word::reduce(&raw))
    }
}

/// Parses `<prefix><index>` optionally followed by `^-1` (or `^1`).
pub fn parse_symbol(tok: &str, prefix: char) -> Result<Letter> {
    let body =
        tok.strip_prefix(prefix).ok_or_else(|| Error::Parse(format!("expected '{prefix}<index>', found '{tok}'")))?;
    let (idx, sign) = match body.split_once('^') {
        Some((i, "-1")) => (i, -1),
        Some((i, "1")) => (i, 1),
        Some(_) => return Err(Error::Parse(format!("bad exponent in '{tok}'"))),
        None => (body, 1),
    };
    let i: i32 = idx.parse().map_err(|_| Error::Parse(format!("bad index in '{tok}'")))?;
    if i <= 0 {
        return Err(Error::Parse(format!("index must be positive in '{tok}'")));
    }
    Ok(sign * i)
}

pub fn format_symbols(s: &[Letter], prefix: char) -> String {
    if s.is_empty() {
        return "1".to_string();
    }
    s.iter()
        .map(|&l| if l > 0 { format!("{prefix}{l}") } else { format!("{prefix}{}^-1", -l) })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_symbols(&self.0, 'a'))
    }
}

/// A cyclically reduced word stored in its least rotation; equality is
/// conjugacy of the represented elements.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn of(w: &Word) -> Result<CyclicWord> {
        Ok(cyclic_reduce(w)?.0)
    }

    pub fn inverse(&self) -> CyclicWord {
        cyclic_reduce(&self.to_word().inverse()).expect("nontrivial").0
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", format_symbols(&self.0, 'a'))
    }
}

/// Returns `(c, g)` with `w = g · c · g^-1` and `c` canonical.
pub fn cyclic_reduce(w: &Word) -> Result<(CyclicWord, Word)> {
    if w.is_empty() {
        return Err(Error::Trivial);
    }
    let (k, core) = cyclic_core(&w.0);
    let r = least_rotation(core);
    let mut rotated = core[r..].to_vec();
    rotated.extend_from_slice(&core[..r]);
    let mut conj = w.0[..k].to_vec();
    conj.extend_from_slice(&core[..r]);
    Ok((CyclicWord(rotated), Word::reduce(&conj)))
}

/// Shortest `r` with `s = r^k`.
pub fn primitive_root(s: &[Letter]) -> &[Letter] {
    let n = s.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| s[i] == s[i - d]) {
            return &s[..d];
        }
    }
    s
}

/// An endomorphism of F_n given by the images of the basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Endo {
    images: Vec<Word>,
}

impl Endo {
    pub fn new(images: Vec<Word>) -> Result<Endo> {
        let n = images.len();
        for w in &images {
            if !w.fits_rank(n) {
                return Err(Error::LetterOutOfRange { index: w.max_index() as u32, rank: n });
            }
        }
        Ok(Endo { images })
    }

    pub fn identity(n: usize) -> Endo {
        Endo { images: (1..=n as u32).map(Word::gen).collect() }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Word {
        &self.images[i - 1]
    }

    /// Substitutes without the final reduction (letters must be in range).
    pub fn substitute_raw(&self, w: &[Letter]) -> Vec<Letter> {
        let mut raw = Vec::new();
        for &l in w {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                raw.extend_from_slice(img.letters());
            } else {
                raw.extend(invert_seq(img.letters()));
            }
        }
        raw
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if !w.fits_rank(self.rank()) {
            return Err(Error::RankMismatch { expected: self.rank(), found: w.max_index() });
        }
        Ok(Word::reduce(&self.substitute_raw(&w.0)))
    }

    /// `compose(f, g) = f ∘ g`, so `apply(compose(f,g), w) = apply(f, apply(g, w))`.
    pub fn compose(f: &Endo, g: &Endo) -> Result<Endo> {
        if f.rank() != g.rank() {
            return Err(Error::RankMismatch { expected: f.rank(), found: g.rank() });
        }
        let images = g.images.iter().map(|w| f.apply(w)).collect::<Result<Vec<_>>>()?;
        Ok(Endo { images })
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| w.letters() == [(i + 1) as Letter])
    }

    /// Abelianization matrix, column `j` = exponent sums of the image of `a_{j+1}`.
    pub fn abelianization(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut m = vec![vec![0i64; n]; n];
        for (j, w) in self.images.iter().enumerate() {
            for &l in w.letters() {
                m[l.unsigned_abs() as usize - 1][j] += l.signum() as i64;
            }
        }
        m
    }

    /// Decides invertibility by folding the wedge of image loops. Returns the
    /// inverse when the images form a free basis.
    pub fn inverse(&self) -> Option<Endo> {
        let n = self.rank();
        if n == 0 {
            return Some(Endo::identity(0));
        }
        if det_abs(&self.abelianization()) != 1 {
            return None;
        }
        let paths: Vec<Vec<Letter>> = self.images.iter().map(|w| w.0.clone()).collect();
        let mut folder = Folder::wedge(&paths, true);
        folder.fold_all();
        let g = folder.finish();
        if g.nv != 1 || g.edges.len() != n || g.rank_loss != 0 {
            return None;
        }
        let values = g.values.expect("tracking enabled");
        let mut inv = vec![Word::empty(); n];
        for (k, &(_, _, label)) in g.edges.iter().enumerate() {
            let i = label.unsigned_abs() as usize - 1;
            inv[i] = if label > 0 { values[k].clone() } else { values[k].inverse() };
        }
        let inv = Endo { images: inv };
        let check = Endo::compose(self, &inv).ok()?;
        if check.is_identity() {
            Some(inv)
        } else {
            None
        }
    }

    pub fn is_automorphism(&self) -> bool {
        self.inverse().is_some()
    }
}

fn det_abs(m: &[Vec<i64>]) -> i64 {
    // Bareiss fraction-free elimination over i128.
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]).unsigned_abs() as i64
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().enumerate().map(|(i, w)| format!("a{} -> {}", i + 1, w)).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// An endomorphism together with a verified inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Automorphism {
    map: Endo,
    inv: Endo,
}

impl Automorphism {
    pub fn new(map: Endo) -> Result<Automorphism> {
        let inv = map.inverse().ok_or_else(|| Error::Precondition(format!("not an automorphism: {map}")))?;
        Ok(Automorphism { map, inv })
    }

    pub fn identity(n: usize) -> Automorphism {
        Automorphism { map: Endo::identity(n), inv: Endo::identity(n) }
    }

    pub fn map(&self) -> &Endo {
        &self.map
    }

    pub fn inverse_map(&self) -> &Endo {
        &self.inv
    }

    pub fn rank(&self) -> usize {
        self.map.rank()
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism { map: self.inv.clone(), inv: self.map.clone() }
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.map.apply(w)
    }

    /// `self ∘ other`
    pub fn then_after(&self, other: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism { map: Endo::compose(&self.map, &other.map)?, inv: Endo::compose(&other.inv, &self.inv)? })
    }
}

/// Finds `g` with `g^-1 u_i g = v_i` for every `i`, or reports that none exists.
///
/// All solutions of the first nontrivial equation have the form
/// `p · r^t · q^-1` where `u_1 = p c p^-1`, `v_1 = q c q^-1` and `r` is the
/// primitive root of `c`. Any further equation either holds for every `t`
/// (its entry commutes with `r`) or pins `t` into a window whose width is
/// bounded by the lengths of that entry, so the search is exhaustive.
pub fn simultaneous_conjugator(u: &[Word], v: &[Word]) -> Result<Option<Word>> {
    if u.len() != v.len() {
        return Err(Error::RankMismatch { expected: u.len(), found: v.len() });
    }
    let Some(i0) = u.iter().position(|w| !w.is_empty()) else {
        if v.iter().all(|w| w.is_empty()) {
            return Err(Error::Trivial);
        }
        return Ok(None);
    };
    if u.iter().zip(v).any(|(a, b)| a.is_empty() != b.is_empty()) {
        return Ok(None);
    }
    let (cu, p) = cyclic_reduce(&u[i0])?;
    let (cv, q) = cyclic_reduce(&v[i0])?;
    if cu != cv {
        return Ok(None);
    }
    let root = Word(primitive_root(cu.letters()).to_vec());
    let qi = q.inverse();
    let candidate = |t: i64| p.mul(&root.pow(t)).mul(&qi);
    let holds = |g: &Word| u.iter().zip(v).all(|(a, b)| &a.conj(g) == b);

    // If every entry commutes with the root, all candidates work and the
    // shortest lies within |p| + |q| + 1 steps; otherwise solutions lie in
    // the window around the first non-commuting entry.
    let mut window = (p.len() + q.len()) as i64 + 1;
    for (a, b) in u.iter().zip(v) {
        let x = a.conj(&p.inverse());
        if x.mul(&root) != root.mul(&x) {
            let y = b.conj(&qi);
            window = (x.len() + y.len()) as i64 + 2;
            break;
        }
    }
    let best = (-window..=window).map(candidate).filter(|g| holds(g)).min();
    if best.is_some() {
        return Ok(best);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Word::reduce(&[1, -1]), Word::empty());
        assert_eq!(Word::reduce(&[1, 2, -2, 3]), w("a1 a3"));
        assert_eq!(Word::reduce(&[1, 2, 1]).len(), 3);
        assert!(Word::reduce_in_rank(&[4], 3).is_err());
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (c, g) = cyclic_reduce(&w("a1 a2 a1^-1")).unwrap();
        assert_eq!(c.to_word(), w("a2"));
        assert_eq!(g, w("a1"));
        let (c, g) = cyclic_reduce(&w("a3 a1 a2")).unwrap();
        assert_eq!(c.to_word(), w("a1 a2 a3"));
        assert_eq!(g, w("a3"));
        let (c, g) = cyclic_reduce(&w("a2^-1 a1 a2 a2")).unwrap();
        assert_eq!(c.to_word(), w("a1 a2"));
        assert_eq!(g, w("a2^-1"));
        assert!(cyclic_reduce(&Word::empty()).is_err());
    }

    #[test]
    fn conjugator_examples() {
        assert_eq!(simultaneous_conjugator(&[w("a1 a2")], &[w("a2 a1")]).unwrap(), Some(w("a1")));
        assert_eq!(simultaneous_conjugator(&[w("a1"), w("a2")], &[w("a1"), w("a2")]).unwrap(), Some(Word::empty()));
        assert_eq!(simultaneous_conjugator(&[w("a1"), w("a2")], &[w("a2"), w("a1")]).unwrap(), None);
        assert!(simultaneous_conjugator(&[Word::empty()], &[Word::empty()]).is_err());
    }

    #[test]
    fn non_invertible_rejected() {
        let f = Endo::new(vec![w("a1 a2"), w("a1 a2"), w("a3")]).unwrap();
        assert!(!f.is_automorphism());
        let g = Endo::new(vec![w("a1 a1"), w("a2")]).unwrap();
        assert!(!g.is_automorphism());
    }

    #[test]
    fn inverse_of_transvection() {
        let f = Endo::new(vec![w("a1"), w("a2"), w("a3 a1 a2")]).unwrap();
        let inv = f.inverse().unwrap();
        assert_eq!(inv.image(3), &w("a3 a2^-1 a1^-1"));
    }
}
