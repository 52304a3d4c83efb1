//! Marked graphs: a core graph, a basepoint and one closed reduced edge path
//! at the basepoint for every basis letter of F_n.

use crate::error::{Error, Result};
use crate::graph::{collapse, edge_of, isomorphisms, natural_structure_rel, CollapseMap, CoreGraph, DirEdge, GraphIso};
use crate::word::{
    cyclic_core, free_reduce, invert_seq, least_rotation, simultaneous_conjugator, Automorphism, CyclicWord, Endo, Word,
};

pub type EdgePath = Vec<DirEdge>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedGraph {
    graph: CoreGraph,
    base: usize,
    marking: Vec<EdgePath>,
}

/// Witness of equivalence: a graph isomorphism carrying the first marking to
/// the second up to simultaneous conjugacy by `conjugator`, written in the
/// fundamental group of the target read off its non-tree edges.
#[derive(Clone, Debug)]
pub struct Equivalence {
    pub iso: GraphIso,
    pub conjugator: Word,
}

impl MarkedGraph {
    /// Checks that every path is a closed reduced path at `base` and that
    /// the paths form a basis of the fundamental group.
    pub fn new(graph: CoreGraph, base: usize, marking: Vec<EdgePath>) -> Result<MarkedGraph> {
        if !graph.is_core() {
            return Err(Error::Precondition("graph is not a connected core graph".into()));
        }
        if base >= graph.nv() {
            return Err(Error::Precondition("basepoint out of range".into()));
        }
        if graph.betti() != marking.len() {
            return Err(Error::RankMismatch { expected: graph.betti(), found: marking.len() });
        }
        for p in &marking {
            let closed = p.is_empty() || (graph.origin(p[0]) == base && graph.terminus(*p.last().unwrap()) == base);
            if p.is_empty() || !closed || !graph.path_is_valid(p) || free_reduce(p).len() != p.len() {
                return Err(Error::BadPath(format!("marking path {p:?} is not a reduced loop at the basepoint")));
            }
        }
        let g = MarkedGraph { graph, base, marking };
        let words = g.pi1_words(&g.marking);
        if !Endo::new(words)?.is_automorphism() {
            return Err(Error::Precondition("marking paths do not form a basis of the fundamental group".into()));
        }
        Ok(g)
    }

    /// Rose with petal `e_i` marking `a_i`.
    pub fn rose(n: usize) -> MarkedGraph {
        MarkedGraph { graph: CoreGraph::rose(n), base: 0, marking: (1..=n as i32).map(|d| vec![d]).collect() }
    }

    pub fn graph(&self) -> &CoreGraph {
        &self.graph
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn marking(&self) -> &[EdgePath] {
        &self.marking
    }

    pub fn rank(&self) -> usize {
        self.marking.len()
    }

    /// Reduced closed path at the basepoint representing `w`.
    pub fn expand(&self, w: &Word) -> Result<EdgePath> {
        if !w.fits_rank(self.rank()) {
            return Err(Error::LetterOutOfRange { index: w.max_index() as u32, rank: self.rank() });
        }
        let mut raw = Vec::new();
        for &l in w.letters() {
            let p = &self.marking[l.unsigned_abs() as usize - 1];
            if l > 0 {
                raw.extend_from_slice(p);
            } else {
                raw.extend(invert_seq(p));
            }
        }
        Ok(free_reduce(&raw))
    }

    /// Right action: the marking is precomposed with `phi`.
    pub fn act(&self, phi: &Automorphism) -> Result<MarkedGraph> {
        if phi.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), found: phi.rank() });
        }
        let marking = phi.map().images().iter().map(|w| self.expand(w)).collect::<Result<Vec<_>>>()?;
        Ok(MarkedGraph { graph: self.graph.clone(), base: self.base, marking })
    }

    /// Cyclically reduced circuit representing `c`, in canonical rotation.
    pub fn circuit_of(&self, c: &CyclicWord) -> Result<EdgePath> {
        if c.is_empty() {
            return Err(Error::Trivial);
        }
        let p = self.expand(&c.to_word())?;
        let (_, core) = cyclic_core(&p);
        let r = least_rotation(core);
        let mut out = core[r..].to_vec();
        out.extend_from_slice(&core[..r]);
        Ok(out)
    }

    /// Words in the free group on the non-tree edges of a breadth-first
    /// spanning tree (numbered in edge order) read off closed paths.
    pub fn pi1_words(&self, paths: &[EdgePath]) -> Vec<Word> {
        pi1_words(&self.graph, self.base, paths)
    }

    pub fn collapse_marked(&self, forest: &[usize]) -> Result<(MarkedGraph, CollapseMap)> {
        let m = collapse(&self.graph, forest)?;
        let marking = self.marking.iter().map(|p| m.push_path(p).map(|(q, _)| q)).collect::<Result<Vec<_>>>()?;
        let g = MarkedGraph { graph: m.target.clone(), base: m.vertex_map[self.base], marking };
        Ok((g, m))
    }

    /// Natural structure with the basepoint moved to a natural vertex.
    pub fn normalize(&self) -> Result<MarkedGraph> {
        self.moved_off_valence_two()?.suppress(&[])
    }

    /// Natural structure relative to the basepoint (the basepoint is kept
    /// even if it has valence 2).
    pub fn normalize_pointed(&self) -> Result<MarkedGraph> {
        self.suppress(&[self.base])
    }

    fn suppress(&self, keep: &[usize]) -> Result<MarkedGraph> {
        let r = natural_structure_rel(&self.graph, keep)?;
        let marking = self.marking.iter().map(|p| r.push_path(p)).collect::<Result<Vec<_>>>()?;
        let base = r.vertex_map[self.base].ok_or_else(|| Error::Invariant("basepoint suppressed".into()))?;
        Ok(MarkedGraph { graph: r.graph, base, marking })
    }

    /// Conjugates the marking along a chain so the basepoint leaves a
    /// valence-2 vertex.
    fn moved_off_valence_two(&self) -> Result<MarkedGraph> {
        if self.graph.valence(self.base) != 2 {
            return Ok(self.clone());
        }
        let mut d = self.graph.directions_at(self.base)[0];
        let mut walk = vec![d];
        let mut steps = 0;
        while self.graph.valence(self.graph.terminus(d)) == 2 {
            let w = self.graph.terminus(d);
            if w == self.base || steps > self.graph.ne() {
                return Err(Error::Circle);
            }
            d = self.graph.directions_at(w).into_iter().find(|&x| x != -d).unwrap();
            walk.push(d);
            steps += 1;
        }
        let target = self.graph.terminus(d);
        Ok(self.rebased(target, &walk))
    }

    /// Moves the basepoint along `path` (from the current basepoint to `to`).
    pub fn rebased(&self, to: usize, path: &[DirEdge]) -> MarkedGraph {
        let back = invert_seq(path);
        let marking = self
            .marking
            .iter()
            .map(|p| {
                let mut raw = back.clone();
                raw.extend_from_slice(p);
                raw.extend_from_slice(path);
                free_reduce(&raw)
            })
            .collect();
        MarkedGraph { graph: self.graph.clone(), base: to, marking }
    }

    /// Decides whether the two marked graphs define the same spine vertex.
    pub fn equivalent(&self, other: &MarkedGraph) -> Option<Equivalence> {
        if self.rank() != other.rank() {
            return None;
        }
        let target = pi1_words(&other.graph, other.base, &other.marking);
        for iso in isomorphisms(&self.graph, &other.graph) {
            let moved: Vec<EdgePath> = self.marking.iter().map(|p| iso.map_path(p)).collect();
            let src = pi1_words(&other.graph, iso.vmap[self.base], &moved);
            if let Ok(Some(g)) = simultaneous_conjugator(&src, &target) {
                return Some(Equivalence { iso, conjugator: g });
            }
        }
        None
    }

    /// Equality of pointed marked graphs: an isomorphism respecting
    /// basepoints and carrying marking paths exactly onto marking paths.
    pub fn pointed_equal(&self, other: &MarkedGraph) -> Option<GraphIso> {
        if self.rank() != other.rank() {
            return None;
        }
        isomorphisms(&self.graph, &other.graph).into_iter().find(|iso| {
            iso.vmap[self.base] == other.base
                && self.marking.iter().zip(&other.marking).all(|(p, q)| &iso.map_path(p) == q)
        })
    }

    /// Circuit lengths of all cyclic words of length at most 2 in the basis,
    /// in a fixed order, together with the valence profile; an invariant of
    /// the spine vertex.
    pub fn invariant(&self) -> Vec<usize> {
        let n = self.rank() as i32;
        let letters: Vec<i32> = (1..=n).flat_map(|i| [i, -i]).collect();
        let mut lens = Vec::new();
        for &a in &letters {
            if a > 0 {
                lens.push(self.circuit_len(&[a]));
            }
            for &b in &letters {
                if b != -a && letter_pair_canonical(a, b) {
                    lens.push(self.circuit_len(&[a, b]));
                }
            }
        }
        let mut val = self.graph.valences();
        val.sort_unstable();
        let mut out = vec![self.graph.nv(), self.graph.ne()];
        out.extend(val);
        out.extend(lens);
        out
    }

    fn circuit_len(&self, w: &[i32]) -> usize {
        let p = self.expand(&Word::reduce(w)).expect("in range");
        cyclic_core(&p).1.len()
    }
}

fn letter_pair_canonical(a: i32, b: i32) -> bool {
    // Each unordered pair of letters up to inversion of the whole word.
    let key = |x: i32| crate::word::letter_key(x);
    (key(a), key(b)) <= (key(-b), key(-a))
}

/// Reads closed paths at `base` as words in the non-tree edges of a
/// breadth-first spanning tree rooted at vertex 0.
pub fn pi1_words(graph: &CoreGraph, _base: usize, paths: &[EdgePath]) -> Vec<Word> {
    let tree = graph.spanning_tree(0);
    let mut letter = vec![0i32; graph.ne()];
    let mut next = 1;
    for (e, slot) in letter.iter_mut().enumerate() {
        if !tree.contains(&e) {
            *slot = next;
            next += 1;
        }
    }
    paths
        .iter()
        .map(|p| {
            let raw: Vec<i32> = p
                .iter()
                .filter_map(|&d| {
                    let l = letter[edge_of(d)];
                    (l != 0).then_some(if d > 0 { l } else { -l })
                })
                .collect();
            Word::reduce(&raw)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn auto(imgs: &[&str]) -> Automorphism {
        Automorphism::new(Endo::new(imgs.iter().map(|s| w(s)).collect()).unwrap()).unwrap()
    }

    fn theta_marked() -> MarkedGraph {
        MarkedGraph::new(CoreGraph::theta(), 0, vec![vec![1, -2], vec![2, -3]]).unwrap()
    }

    #[test]
    fn act_on_rose() {
        let g = MarkedGraph::rose(3).act(&auto(&["a1", "a2", "a3 a1 a2"])).unwrap();
        assert_eq!(g.marking()[2], vec![3, 1, 2]);
        let c = CyclicWord::of(&w("a3 a1 a2")).unwrap();
        assert_eq!(MarkedGraph::rose(3).circuit_of(&c).unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn equivalence_examples() {
        let r = MarkedGraph::rose(2);
        assert!(r.equivalent(&r).is_some());
        let swap = MarkedGraph::new(CoreGraph::rose(2), 0, vec![vec![2], vec![1]]).unwrap();
        assert!(r.equivalent(&swap).is_some());
        let tv = r.act(&auto(&["a1 a2", "a2"])).unwrap();
        assert!(r.equivalent(&tv).is_none());
        let inner = r.act(&auto(&["a2^-1 a1 a2", "a2"])).unwrap();
        assert!(r.equivalent(&inner).is_some());
    }

    #[test]
    fn rejects_non_basis_marking() {
        assert!(MarkedGraph::new(CoreGraph::rose(2), 0, vec![vec![1, 1], vec![2]]).is_err());
        assert!(MarkedGraph::new(CoreGraph::rose(2), 0, vec![vec![1, -1], vec![2]]).is_err());
    }

    #[test]
    fn collapse_theta_to_rose() {
        let t = theta_marked();
        let (r, _) = t.collapse_marked(&[0]).unwrap();
        assert_eq!(r.graph().betti(), 2);
        assert!(MarkedGraph::new(r.graph().clone(), r.base(), r.marking().to_vec()).is_ok());
        let (r2, _) = t.collapse_marked(&[1]).unwrap();
        assert!(r.equivalent(&r2).is_none());
        let back = t.normalize().unwrap();
        assert!(back.equivalent(&t).is_some());
    }

    #[test]
    fn normalize_moves_base() {
        let g = CoreGraph::new(2, vec![(0, 1), (1, 0), (0, 0)]).unwrap();
        let m = MarkedGraph::new(g, 1, vec![vec![2, 1], vec![2, 3, -2]]).unwrap();
        let n = m.normalize().unwrap();
        assert_eq!(n.graph().nv(), 1);
        assert!(n.equivalent(&MarkedGraph::rose(2)).is_some());
    }
}
