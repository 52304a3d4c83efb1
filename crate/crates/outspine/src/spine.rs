//! Local exploration of the spine: neighbours, breadth-first distances and
//! constructive paths between marked graphs through marked roses.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};

use itertools::Itertools;

use crate::covers::{realizes, FreeFactorSystem};
use crate::error::{Error, Result};
use crate::graph::{enumerate_blowups, enumerate_natural_subforests};
use crate::marked::MarkedGraph;
use crate::nielsen::{Nielsen, NielsenLetter};
use crate::word::{Automorphism, Endo, Word};

/// Spine vertices seen so far, bucketed by invariant and compared exactly.
#[derive(Default)]
pub struct VertexSet {
    buckets: HashMap<Vec<usize>, Vec<(MarkedGraph, usize)>>,
    len: usize,
}

impl VertexSet {
    pub fn new() -> VertexSet {
        VertexSet::default()
    }

    /// Index of an equivalent vertex already present.
    pub fn find(&self, g: &MarkedGraph) -> Option<usize> {
        self.buckets.get(&g.invariant())?.iter().find(|(h, _)| h.equivalent(g).is_some()).map(|&(_, i)| i)
    }

    /// Inserts `g` unless an equivalent vertex is present; returns its index
    /// and whether it was new.
    pub fn insert(&mut self, g: MarkedGraph) -> (usize, bool) {
        if let Some(i) = self.find(&g) {
            return (i, false);
        }
        let i = self.len;
        self.buckets.entry(g.invariant()).or_default().push((g, i));
        self.len += 1;
        (i, true)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Every marked graph that collapses onto `v` along a nonempty forest,
/// with that forest.
pub fn expansions(v: &MarkedGraph) -> Result<Vec<(MarkedGraph, Vec<usize>)>> {
    let mut out = Vec::new();
    let mut frontier = vec![(v.clone(), Vec::<usize>::new())];
    while let Some((g, forest)) = frontier.pop() {
        for b in enumerate_blowups(g.graph()) {
            let marking = g.marking().iter().map(|p| b.lift_path(p)).collect();
            let h = MarkedGraph::new(b.graph.clone(), g.base(), marking)?;
            let mut f = forest.clone();
            f.push(b.new_edge);
            out.push((h.clone(), f.clone()));
            frontier.push((h, f));
        }
    }
    Ok(out)
}

/// Collapses along nonempty natural forests and all expansions, in natural
/// form and without repetition.
pub fn neighbors(v: &MarkedGraph) -> Result<Vec<MarkedGraph>> {
    let mut seen = VertexSet::new();
    seen.insert(v.clone());
    let mut out = Vec::new();
    for f in enumerate_natural_subforests(v.graph()).into_iter().filter(|f| !f.is_empty()) {
        let c = v.collapse_marked(&f)?.0.normalize()?;
        if seen.insert(c.clone()).1 {
            out.push(c);
        }
    }
    for (h, _) in expansions(v)? {
        if seen.insert(h.clone()).1 {
            out.push(h);
        }
    }
    Ok(out)
}

/// Distance in the 1-skeleton if at most `cap`.
pub fn bfs_distance(u: &MarkedGraph, v: &MarkedGraph, cap: usize) -> Result<Option<usize>> {
    let u = u.normalize()?;
    let v = v.normalize()?;
    if u.equivalent(&v).is_some() {
        return Ok(Some(0));
    }
    let mut seen = VertexSet::new();
    seen.insert(u.clone());
    let mut queue = VecDeque::from([(u, 0usize)]);
    while let Some((x, d)) = queue.pop_front() {
        if d == cap {
            continue;
        }
        for y in neighbors(&x)? {
            if y.invariant() == v.invariant() && y.equivalent(&v).is_some() {
                return Ok(Some(d + 1));
            }
            if seen.insert(y.clone()).1 {
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok(None)
}

/// How consecutive path vertices are related.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The earlier vertex collapses onto the later one along these edges.
    Collapse(Vec<usize>),
    /// The later vertex collapses onto the earlier one along these edges.
    Expand(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct SpinePath {
    pub vertices: Vec<MarkedGraph>,
    pub certificates: Vec<Certificate>,
}

impl SpinePath {
    pub fn len(&self) -> usize {
        self.certificates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certificates.is_empty()
    }

    /// Re-checks every certificate by collapsing and testing equivalence.
    pub fn verify(&self) -> bool {
        if self.vertices.len() != self.certificates.len() + 1 {
            return false;
        }
        self.certificates.iter().enumerate().all(|(i, c)| {
            let (big, small, f) = match c {
                Certificate::Collapse(f) => (&self.vertices[i], &self.vertices[i + 1], f),
                Certificate::Expand(f) => (&self.vertices[i + 1], &self.vertices[i], f),
            };
            !f.is_empty()
                && big.graph().is_acyclic(f)
                && big.collapse_marked(f).and_then(|(c, _)| c.normalize()).is_ok_and(|c| c.equivalent(small).is_some())
        })
    }

    fn reversed(mut self) -> SpinePath {
        self.vertices.reverse();
        self.certificates.reverse();
        for c in &mut self.certificates {
            *c = match std::mem::replace(c, Certificate::Collapse(Vec::new())) {
                Certificate::Collapse(f) => Certificate::Expand(f),
                Certificate::Expand(f) => Certificate::Collapse(f),
            };
        }
        self
    }

    fn append(&mut self, other: SpinePath) {
        self.vertices.extend(other.vertices.into_iter().skip(1));
        self.certificates.extend(other.certificates);
    }
}

#[derive(Clone, Debug)]
pub struct FoldPath {
    pub path: SpinePath,
    /// `Some(true)` if a system was supplied and every vertex realizes it.
    pub guarded: Option<bool>,
}

/// Maximal tree used to collapse a marked graph to a rose; when a core
/// subgraph is given its maximal forests are taken first.
fn rose_tree(g: &MarkedGraph, prefer: &[usize]) -> Vec<usize> {
    let gr = g.graph();
    let mut uf = crate::graph::UnionFind::new(gr.nv());
    let mut tree = Vec::new();
    let order = prefer.iter().copied().chain(0..gr.ne());
    for e in order {
        let (o, t) = gr.endpoints(e);
        if !tree.contains(&e) && uf.union(o, t) {
            tree.push(e);
        }
    }
    tree.sort_unstable();
    tree
}

fn to_rose(g: &MarkedGraph, prefer: &[usize]) -> Result<(MarkedGraph, SpinePath)> {
    let tree = rose_tree(g, prefer);
    if tree.is_empty() {
        return Ok((g.clone(), SpinePath { vertices: vec![g.clone()], certificates: Vec::new() }));
    }
    let r = g.collapse_marked(&tree)?.0;
    Ok((r.clone(), SpinePath { vertices: vec![g.clone(), r], certificates: vec![Certificate::Collapse(tree)] }))
}

/// The automorphism `ψ` with the marked rose equal to `R·ψ`.
fn rose_automorphism(r: &MarkedGraph) -> Result<Automorphism> {
    let images = r.marking().iter().map(|p| Word::reduce(p)).collect();
    Automorphism::new(Endo::new(images)?)
}

fn total_len(a: &Automorphism) -> usize {
    a.map().images().iter().map(|w| w.len()).sum()
}

fn transvections(n: usize) -> Vec<NielsenLetter> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                for g in [Nielsen::Left(i, j), Nielsen::Right(i, j)] {
                    out.push(g.letter());
                    out.push(g.inv());
                }
            }
        }
    }
    out
}

/// Transvections `g_1, ..., g_m` with `φ g_1 ⋯ g_m` a signed permutation,
/// each step shortening the images (with a short lookahead when no single
/// step does).
pub fn nielsen_reduce(phi: &Automorphism) -> Result<Vec<NielsenLetter>> {
    let n = phi.rank();
    let moves: Vec<(NielsenLetter, Automorphism)> =
        transvections(n).into_iter().map(|g| Ok((g, g.to_automorphism(n)?))).collect::<Result<_>>()?;
    let mut cur = phi.clone();
    let mut word = Vec::new();
    while total_len(&cur) > n {
        let here = total_len(&cur);
        let mut found = None;
        'depth: for depth in 1..=3 {
            let mut stack: Vec<(Vec<usize>, Automorphism)> = vec![(Vec::new(), cur.clone())];
            while let Some((seq, a)) = stack.pop() {
                if seq.len() == depth {
                    if total_len(&a) < here {
                        found = Some((seq, a));
                        break 'depth;
                    }
                    continue;
                }
                for (k, (_, m)) in moves.iter().enumerate() {
                    let mut s = seq.clone();
                    s.push(k);
                    stack.push((s, a.then_after(m)?));
                }
            }
        }
        let (seq, next) = found.ok_or_else(|| Error::Invariant("Nielsen reduction stalled".into()))?;
        word.extend(seq.into_iter().map(|k| moves[k].0));
        cur = next;
    }
    Ok(word)
}

/// Whitehead automorphisms of the second kind: a multiplier letter `a` and,
/// for every other generator `x`, one of `x`, `x a`, `a^-1 x`, `a^-1 x a`.
pub fn whitehead_moves(n: usize) -> Result<Vec<Automorphism>> {
    let mut out = Vec::new();
    for a in (1..=n as i32).flat_map(|i| [i, -i]) {
        let others: Vec<usize> = (1..=n).filter(|&i| i as i32 != a.abs()).collect();
        for code in 1..4usize.pow(others.len() as u32) {
            let mut images: Vec<Word> = (1..=n).map(|i| Word::gen(i as u32)).collect();
            let mut c = code;
            for &x in &others {
                let mut raw = Vec::new();
                if c & 2 != 0 {
                    raw.push(-a);
                }
                raw.push(x as i32);
                if c & 1 != 0 {
                    raw.push(a);
                }
                c /= 4;
                images[x - 1] = Word::reduce(&raw);
            }
            out.push(Automorphism::new(Endo::new(images)?)?);
        }
    }
    Ok(out)
}

/// Roses visited by the guarded search before it gives up.
const WALK_BUDGET: usize = 4000;

/// Conjugates the tuple by single letters while that shortens it.
fn conjugated_down(mut ws: Vec<Word>) -> Vec<Word> {
    let n = ws.iter().map(Word::max_index).max().unwrap_or(0) as i32;
    loop {
        let here: usize = ws.iter().map(Word::len).sum();
        let best = (1..=n)
            .flat_map(|i| [i, -i])
            .map(|x| ws.iter().map(|w| w.conj(&Word::letter(x))).collect::<Vec<_>>())
            .min_by_key(|c| c.iter().map(Word::len).sum::<usize>())
            .filter(|c| c.iter().map(Word::len).sum::<usize>() < here);
        match best {
            Some(c) => ws = c,
            None => return ws,
        }
    }
}

/// Key of the marked rose `R·γ`: equal keys mean equivalent roses (the
/// converse can fail, which only costs revisits).
fn rose_key(gamma: &Automorphism) -> Vec<Vec<i32>> {
    let ws = conjugated_down(gamma.map().images().to_vec());
    let n = ws.len();
    let mut best: Option<Vec<Vec<i32>>> = None;
    for perm in (0..n).permutations(n) {
        for signs in 0..1u32 << n {
            let relabel = |l: i32| {
                let i = l.unsigned_abs() as usize - 1;
                let m = perm[i] as i32 + 1;
                if (signs >> i) & 1 == 1 {
                    -l.signum() * m
                } else {
                    l.signum() * m
                }
            };
            let cand: Vec<Vec<i32>> = ws.iter().map(|w| w.letters().iter().map(|&l| relabel(l)).collect()).collect();
            if best.as_ref().is_none_or(|b| &cand < b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// Left moves from `R·β` to `R·α` (up to relabelling) by Whitehead
/// automorphisms, each a blow-up followed by a collapse inside the
/// subcomplex realizing `f`. Best-first on the length of `γ α^-1`, so
/// detours through longer roses are allowed. `None` if the budget runs out.
fn whitehead_walk(
    rh: &MarkedGraph,
    alpha: &Automorphism,
    beta: &Automorphism,
    f: &FreeFactorSystem,
) -> Result<Option<SpinePath>> {
    let n = rh.rank();
    let moves = whitehead_moves(n)?;
    let alpha_inv = alpha.inverse();
    let score = |g: &Automorphism| -> Result<usize> {
        Ok(conjugated_down(g.then_after(&alpha_inv)?.map().images().to_vec()).iter().map(Word::len).sum())
    };
    // Each node: its automorphism, the rose it stands for, and its parent
    // with the move leading here. Steps are built when a node is popped.
    let mut nodes: Vec<(Automorphism, MarkedGraph, Option<(usize, usize)>)> = vec![(beta.clone(), rh.clone(), None)];
    let mut steps: Vec<Option<SpinePath>> = vec![None];
    let mut seen = HashSet::from([rose_key(beta)]);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((score(beta)?, 0usize)));
    while let Some(Reverse((len, i))) = heap.pop() {
        if let Some((parent, m)) = nodes[i].2 {
            let step = rose_step(&nodes[parent].1, &moves[m], Some(f))?;
            let mut inside = true;
            for v in &step.vertices[1..] {
                inside &= realizes(v, f)?.is_some();
            }
            if !inside {
                continue;
            }
            nodes[i].1 = step.vertices.last().unwrap().clone();
            steps[i] = Some(step);
        }
        if len == n {
            let mut chain = Vec::new();
            let mut at = i;
            while let Some((parent, _)) = nodes[at].2 {
                chain.push(steps[at].take().expect("popped nodes carry their step"));
                at = parent;
            }
            let mut path = SpinePath { vertices: vec![rh.clone()], certificates: Vec::new() };
            for step in chain.into_iter().rev() {
                path.append(step);
            }
            return Ok(Some(path));
        }
        if nodes.len() > WALK_BUDGET {
            break;
        }
        let gamma = nodes[i].0.clone();
        for (m, w) in moves.iter().enumerate() {
            let next = w.then_after(&gamma)?;
            let y = MarkedGraph::rose(n).act(&next)?;
            if !seen.insert(rose_key(&next)) || realizes(&y, f)?.is_none() {
                continue;
            }
            heap.push(Reverse((score(&next)?, nodes.len())));
            nodes.push((next, y, Some((i, m))));
            steps.push(None);
        }
    }
    Ok(None)
}

/// Two spine edges from the marked rose `R·γ` to `R·(w∘γ)` through a
/// common expansion, preferring expansions realizing `f`.
fn rose_step(x: &MarkedGraph, w: &Automorphism, f: Option<&FreeFactorSystem>) -> Result<SpinePath> {
    let gamma = rose_automorphism(x)?;
    let target = MarkedGraph::rose(x.rank()).act(&w.then_after(&gamma)?)?;
    let mut fallback = None;
    for (h, forest) in expansions(x)? {
        if forest.len() != 1 {
            continue;
        }
        let good = match f {
            Some(f) => realizes(&h, f)?.is_some(),
            None => true,
        };
        if !good && fallback.is_some() {
            continue;
        }
        for e in 0..h.graph().ne() {
            let (o, t) = h.graph().endpoints(e);
            if e == forest[0] || o == t {
                continue;
            }
            let y = h.collapse_marked(&[e])?.0;
            if y.equivalent(&target).is_some() {
                let p = SpinePath {
                    vertices: vec![x.clone(), h.clone(), target.clone()],
                    certificates: vec![Certificate::Expand(forest.clone()), Certificate::Collapse(vec![e])],
                };
                if good {
                    return Ok(p);
                }
                fallback = Some(p);
                break;
            }
        }
    }
    fallback.ok_or_else(|| Error::Invariant("no expansion realizes the transvection".into()))
}

/// A spine path from `[g]` to `[h]`: collapse each to a marked rose, then
/// walk between the roses by transvections, two spine edges each. With a
/// connected system realized at both ends the maximal trees are chosen
/// inside the core subgraph first, so the roses realize it too.
pub fn fold_path(g: &MarkedGraph, h: &MarkedGraph, f: Option<&FreeFactorSystem>) -> Result<FoldPath> {
    if g.rank() != h.rank() {
        return Err(Error::RankMismatch { expected: g.rank(), found: h.rank() });
    }
    let g = g.normalize()?;
    let h = h.normalize()?;
    if g.equivalent(&h).is_some() {
        let guarded = f.map(|f| realizes(&g, f).map(|w| w.is_some())).transpose()?;
        return Ok(FoldPath { path: SpinePath { vertices: vec![g], certificates: Vec::new() }, guarded });
    }
    let prefer = |x: &MarkedGraph| -> Result<Vec<usize>> {
        Ok(match f {
            Some(f) if f.components().len() == 1 => realizes(x, f)?.map(|w| w.edges()).unwrap_or_default(),
            _ => Vec::new(),
        })
    };
    let (rg, mut path) = to_rose(&g, &prefer(&g)?)?;
    let (rh, tail) = to_rose(&h, &prefer(&h)?)?;
    let alpha = rose_automorphism(&rg)?;
    let beta = rose_automorphism(&rh)?;
    // Moves act on the left of the marking: R·γ is joined to R·(w∘γ). With
    // α β^-1 g_1 ⋯ g_m a signed permutation σ^-1, the left moves
    // w_k = g_k^-1 carry R·β to R·(σ α), which is R·α up to relabelling.
    let n = g.rank();
    let guarded_walk = match f {
        Some(f) if realizes(&rg, f)?.is_some() && realizes(&rh, f)?.is_some() => whitehead_walk(&rh, &alpha, &beta, f)?,
        _ => None,
    };
    let mut middle = match guarded_walk {
        Some(p) => p,
        None => {
            let phi = alpha.then_after(&beta.inverse())?;
            let mut middle = SpinePath { vertices: vec![rh.clone()], certificates: Vec::new() };
            for l in &nielsen_reduce(&phi)? {
                let w = NielsenLetter { gen: l.gen, inverse: !l.inverse }.to_automorphism(n)?;
                let step = rose_step(middle.vertices.last().unwrap(), &w, f)?;
                middle.append(step);
            }
            middle
        }
    };
    let cur = middle.vertices.last().unwrap().clone();
    if cur.equivalent(&rg).is_none() {
        return Err(Error::Invariant("reduced rose is not the starting rose".into()));
    }
    *middle.vertices.last_mut().unwrap() = rg;
    path.append(middle.reversed());
    path.append(tail.reversed());
    let guarded = match f {
        Some(f) => {
            let mut all = true;
            for v in &path.vertices {
                all &= realizes(v, f)?.is_some();
            }
            Some(all)
        }
        None => None,
    };
    Ok(FoldPath { path, guarded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CoreGraph;

    fn auto(imgs: &[&str]) -> Automorphism {
        Automorphism::new(Endo::new(imgs.iter().map(|s| Word::parse(s).unwrap()).collect()).unwrap()).unwrap()
    }

    fn theta() -> MarkedGraph {
        MarkedGraph::new(CoreGraph::theta(), 0, vec![vec![1, -2], vec![2, -3]]).unwrap()
    }

    #[test]
    fn neighbor_counts() {
        assert_eq!(neighbors(&MarkedGraph::rose(2)).unwrap().len(), 3);
        let th = neighbors(&theta()).unwrap();
        let collapses = th.iter().filter(|x| x.graph().nv() == 1).count();
        assert_eq!(collapses, 3);
    }

    #[test]
    fn symmetric_neighbors() {
        let r = MarkedGraph::rose(2);
        for u in neighbors(&r).unwrap() {
            assert!(neighbors(&u).unwrap().iter().any(|x| x.equivalent(&r).is_some()));
        }
    }

    #[test]
    fn distances() {
        let r = MarkedGraph::rose(2);
        assert_eq!(bfs_distance(&r, &r, 3).unwrap(), Some(0));
        assert_eq!(bfs_distance(&r, &theta(), 3).unwrap(), Some(1));
        let t = r.act(&auto(&["a1 a2", "a2"])).unwrap();
        assert_eq!(bfs_distance(&r, &t, 4).unwrap(), Some(2));
    }

    #[test]
    fn fold_paths_are_certified() {
        let r = MarkedGraph::rose(2);
        let same = fold_path(&r, &r, None).unwrap();
        assert_eq!(same.path.len(), 0);
        let t = r.act(&auto(&["a1 a2", "a2"])).unwrap();
        let p = fold_path(&r, &t, None).unwrap();
        assert!(p.path.verify());
        assert!(p.path.len() <= 4);
        let p = fold_path(&theta(), &t, None).unwrap();
        assert!(p.path.verify());
    }

    #[test]
    fn guarded_paths_stay_in_subcomplex() {
        let r = MarkedGraph::rose(3);
        let f = FreeFactorSystem::new(3, vec![vec![Word::gen(1)]]).unwrap();
        let t = r.act(&auto(&["a1", "a2 a1", "a3 a2^-1"])).unwrap();
        let p = fold_path(&r, &t, Some(&f)).unwrap();
        assert!(p.path.verify());
        assert_eq!(p.guarded, Some(true));
    }
}
