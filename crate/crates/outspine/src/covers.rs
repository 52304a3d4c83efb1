//! Stallings subgroup graphs over a marked graph, free factor systems,
//! coindex, conjugacy of subgroups and the core-subgraph membership test.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fold::Folder;
use crate::graph::{collapse, dir, edge_of, is_forward, isomorphisms_with, CoreGraph, DirEdge};
use crate::marked::MarkedGraph;
use crate::word::Word;

/// A folded graph immersed in an ambient marked graph. Each edge is labelled
/// by the directed ambient edge it covers.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    graph: CoreGraph,
    labels: Vec<DirEdge>,
    /// Ambient vertex under each vertex.
    over: Vec<usize>,
    base: Option<usize>,
    /// Path from the basepoint to the nearest core vertex (based form only).
    tail: Vec<DirEdge>,
    steps: HashMap<(usize, DirEdge), DirEdge>,
}

impl SubgroupGraph {
    fn assemble(
        graph: CoreGraph,
        labels: Vec<DirEdge>,
        over: Vec<usize>,
        base: Option<usize>,
        tail: Vec<DirEdge>,
    ) -> SubgroupGraph {
        let mut steps = HashMap::new();
        for (e, &l) in labels.iter().enumerate() {
            let (o, t) = graph.endpoints(e);
            steps.insert((o, l), dir(e, true));
            steps.insert((t, -l), dir(e, false));
        }
        SubgroupGraph { graph, labels, over, base, tail, steps }
    }

    pub fn graph(&self) -> &CoreGraph {
        &self.graph
    }

    pub fn labels(&self) -> &[DirEdge] {
        &self.labels
    }

    pub fn label(&self, d: DirEdge) -> DirEdge {
        let l = self.labels[edge_of(d)];
        if is_forward(d) {
            l
        } else {
            -l
        }
    }

    pub fn label_path(&self, p: &[DirEdge]) -> Vec<DirEdge> {
        p.iter().map(|&d| self.label(d)).collect()
    }

    pub fn over(&self, v: usize) -> usize {
        self.over[v]
    }

    pub fn base(&self) -> Option<usize> {
        self.base
    }

    pub fn tail(&self) -> &[DirEdge] {
        &self.tail
    }

    /// Core vertex nearest the basepoint (the end of the tail).
    pub fn core_vertex(&self) -> Option<usize> {
        self.base.map(|b| self.tail.last().map_or(b, |&d| self.graph.terminus(d)))
    }

    pub fn rank(&self) -> usize {
        self.graph.betti()
    }

    /// Edge at `v` labelled `label`, if any.
    pub fn step(&self, v: usize, label: DirEdge) -> Option<DirEdge> {
        self.steps.get(&(v, label)).copied()
    }

    /// Lifts an ambient path starting at `v`; `None` if it leaves the graph.
    pub fn lift(&self, v: usize, path: &[DirEdge]) -> Option<Vec<DirEdge>> {
        let mut cur = v;
        let mut out = Vec::with_capacity(path.len());
        for &l in path {
            let d = self.step(cur, l)?;
            out.push(d);
            cur = self.graph.terminus(d);
        }
        Some(out)
    }

    /// Edge indices that lie on the tail.
    pub fn tail_edges(&self) -> Vec<usize> {
        self.tail.iter().map(|&d| edge_of(d)).collect()
    }

    /// Unbased core form: the tail removed.
    pub fn unbased(&self) -> SubgroupGraph {
        self.unbased_maps().0
    }

    /// Unbased core form together with the maps from old vertices and
    /// edges to new ones (`None` on the tail).
    pub fn unbased_maps(&self) -> (SubgroupGraph, Vec<Option<usize>>, Vec<Option<usize>>) {
        let (nv, edges, vmap) = prune(self.graph.nv(), self.graph.edges(), None);
        let mut emap = vec![None; self.graph.ne()];
        for (i, &(_, _, e)) in edges.iter().enumerate() {
            emap[e] = Some(i);
        }
        let labels = edges.iter().map(|&(_, _, e)| self.labels[e]).collect();
        let mut over = vec![0; nv];
        for (v, m) in vmap.iter().enumerate() {
            if let Some(i) = m {
                over[*i] = self.over[v];
            }
        }
        let edges = edges.into_iter().map(|(o, t, _)| (o, t)).collect();
        let g = SubgroupGraph::assemble(CoreGraph::new(nv, edges).expect("pruned"), labels, over, None, Vec::new());
        (g, vmap, emap)
    }

    /// Ambient edges used by the graph, with multiplicity.
    pub fn ambient_edges(&self) -> Vec<usize> {
        self.labels.iter().map(|&l| edge_of(l)).collect()
    }

    /// Whether the immersion is injective on vertices and edges.
    pub fn is_embedding(&self) -> bool {
        let mut es = self.ambient_edges();
        es.sort_unstable();
        let mut vs = self.over.clone();
        vs.sort_unstable();
        es.windows(2).all(|w| w[0] != w[1]) && vs.windows(2).all(|w| w[0] != w[1])
    }
}

/// Removes valence-1 vertices (other than `keep`) until none remain.
/// Returns the surviving graph with original edge indices and the vertex map.
fn prune(
    nv: usize,
    edges: &[(usize, usize)],
    keep: Option<usize>,
) -> (usize, Vec<(usize, usize, usize)>, Vec<Option<usize>>) {
    let mut alive_e = vec![true; edges.len()];
    let mut val = vec![0usize; nv];
    for &(o, t) in edges {
        val[o] += 1;
        val[t] += 1;
    }
    let mut alive_v: Vec<bool> = val.iter().map(|&x| x > 0).collect();
    if let Some(b) = keep {
        alive_v[b] = true;
    }
    loop {
        let Some(v) = (0..nv).find(|&v| alive_v[v] && val[v] == 1 && Some(v) != keep) else {
            break;
        };
        let e = (0..edges.len()).find(|&e| alive_e[e] && (edges[e].0 == v || edges[e].1 == v)).unwrap();
        alive_e[e] = false;
        let (o, t) = edges[e];
        val[o] -= 1;
        val[t] -= 1;
        alive_v[v] = false;
        let w = if o == v { t } else { o };
        if val[w] == 0 && Some(w) != keep {
            alive_v[w] = false;
        }
    }
    let mut vmap = vec![None; nv];
    let mut k = 0;
    for v in 0..nv {
        if alive_v[v] {
            vmap[v] = Some(k);
            k += 1;
        }
    }
    let out = (0..edges.len())
        .filter(|&e| alive_e[e])
        .map(|e| (vmap[edges[e].0].unwrap(), vmap[edges[e].1].unwrap(), e))
        .collect();
    (k, out, vmap)
}

/// Folds the wedge of the marking images of `gens` over `g` and trims it.
/// In based form the basepoint and the hanging arc to the core are kept.
pub fn stallings_core(gens: &[Word], g: &MarkedGraph, based: bool) -> Result<SubgroupGraph> {
    let paths = gens.iter().map(|w| g.expand(w)).collect::<Result<Vec<_>>>()?;
    if paths.iter().all(|p| p.is_empty()) {
        return Err(Error::Trivial);
    }
    let mut folder = Folder::wedge(&paths, false);
    folder.fold_all();
    let f = folder.finish();
    let amb = g.graph();
    let mut over = vec![usize::MAX; f.nv];
    over[f.base] = g.base();
    for &(o, t, l) in &f.edges {
        over[o] = amb.origin(l);
        over[t] = amb.terminus(l);
    }
    let plain: Vec<(usize, usize)> = f.edges.iter().map(|&(o, t, _)| (o, t)).collect();
    let keep = if based { Some(f.base) } else { None };
    let (nv, kept, vmap) = prune(f.nv, &plain, keep);
    let edges: Vec<(usize, usize)> = kept.iter().map(|&(o, t, _)| (o, t)).collect();
    let labels: Vec<DirEdge> = kept.iter().map(|&(_, _, e)| f.edges[e].2).collect();
    let mut new_over = vec![0; nv];
    for (v, m) in vmap.iter().enumerate() {
        if let Some(i) = m {
            new_over[*i] = over[v];
        }
    }
    let graph = CoreGraph::new(nv, edges).expect("pruned graph is well formed");
    if graph.betti() == 0 {
        return Err(Error::Trivial);
    }
    let (base, tail) = if based {
        let b = vmap[f.base].expect("basepoint kept");
        let mut tail = Vec::new();
        let mut cur = b;
        let mut prev: Option<DirEdge> = None;
        // The basepoint hangs off the core iff it has valence 1.
        if graph.valence(b) == 1 {
            loop {
                let d = graph.directions_at(cur).into_iter().find(|&x| Some(-x) != prev).unwrap();
                tail.push(d);
                cur = graph.terminus(d);
                prev = Some(d);
                if graph.valence(cur) != 2 {
                    break;
                }
            }
        }
        (Some(b), tail)
    } else {
        (None, Vec::new())
    };
    Ok(SubgroupGraph::assemble(graph, labels, new_over, base, tail))
}

/// Labelled isomorphism of unbased cores: the subgroups are conjugate.
pub fn subgroups_conjugate(a: &SubgroupGraph, b: &SubgroupGraph) -> bool {
    let (a, b) = (a.unbased(), b.unbased());
    !isomorphisms_with(a.graph(), b.graph(), |e, d| b.label(d) == a.labels[e], 1).is_empty()
}

/// Whether a label-preserving graph map from the core of `a` into `b`
/// exists, i.e. some conjugate of the first subgroup lies in the second.
pub fn conjugate_into(a: &SubgroupGraph, b: &SubgroupGraph) -> bool {
    let a = a.unbased();
    let b = b.unbased();
    let g = a.graph();
    let tree = g.spanning_tree(0);
    for start in 0..b.graph().nv() {
        if b.over(start) != a.over(0) {
            continue;
        }
        let mut vmap = vec![usize::MAX; g.nv()];
        vmap[0] = start;
        let mut ok = true;
        for v in 0..g.nv() {
            if v == 0 {
                continue;
            }
            let p = g.tree_path(&tree, 0, v);
            match b.lift(start, &a.label_path(&p)) {
                Some(q) => vmap[v] = q.last().map_or(start, |&d| b.graph().terminus(d)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok
            && (0..g.ne()).all(|e| {
                let (o, t) = g.endpoints(e);
                b.step(vmap[o], a.labels[e]).is_some_and(|d| b.graph().terminus(d) == vmap[t])
            })
        {
            return true;
        }
    }
    false
}

/// A finite set of conjugacy classes of subgroups, given by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeFactorSystem {
    rank: usize,
    components: Vec<Vec<Word>>,
}

impl FreeFactorSystem {
    pub fn new(rank: usize, components: Vec<Vec<Word>>) -> Result<FreeFactorSystem> {
        for c in &components {
            if c.iter().all(|w| w.is_empty()) {
                return Err(Error::Trivial);
            }
            for w in c {
                if !w.fits_rank(rank) {
                    return Err(Error::LetterOutOfRange { index: w.max_index() as u32, rank });
                }
            }
        }
        Ok(FreeFactorSystem { rank, components })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[Vec<Word>] {
        &self.components
    }

    pub fn cores(&self, g: &MarkedGraph) -> Result<Vec<SubgroupGraph>> {
        self.components.iter().map(|c| stallings_core(c, g, false)).collect()
    }

    /// `(n-1) - Σ (rank A_k - 1)`. Rejects systems with a component
    /// conjugate into another.
    pub fn coindex(&self) -> Result<usize> {
        let rose = MarkedGraph::rose(self.rank);
        let cores = self.cores(&rose)?;
        for (i, a) in cores.iter().enumerate() {
            if cores.iter().enumerate().any(|(j, b)| i != j && conjugate_into(a, b)) {
                return Err(Error::Precondition(format!("component {} is conjugate into another component", i + 1)));
            }
        }
        let total: i64 = cores.iter().map(|c| c.rank() as i64 - 1).sum();
        let v = self.rank as i64 - 1 - total;
        if v < 0 {
            return Err(Error::Precondition("component ranks exceed the ambient rank".into()));
        }
        Ok(v as usize)
    }

    /// `self ⊏ other`: every component is conjugate into a component of `other`.
    pub fn below(&self, other: &FreeFactorSystem) -> Result<bool> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: other.rank });
        }
        let rose = MarkedGraph::rose(self.rank);
        let mine = self.cores(&rose)?;
        let theirs = other.cores(&rose)?;
        Ok(mine.iter().all(|a| theirs.iter().any(|b| conjugate_into(a, b))))
    }
}

/// The core subgraph of a marked graph that carries a free factor system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreSubgraphWitness {
    /// Ambient edges of each component, sorted.
    pub components: Vec<Vec<usize>>,
    /// Ambient vertices of each component, sorted.
    pub vertices: Vec<Vec<usize>>,
}

impl CoreSubgraphWitness {
    pub fn edges(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.components.concat();
        all.sort_unstable();
        all
    }

    pub fn all_vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.vertices.concat();
        all.sort_unstable();
        all
    }
}

/// Finds the core subgraph `H` with `[H] = F`, if it exists. A core
/// subgraph carries the conjugacy class of a subgroup exactly when the
/// subgroup's core maps isomorphically onto it, so it suffices to check
/// that each component core embeds and that the images are disjoint.
pub fn realizes(g: &MarkedGraph, f: &FreeFactorSystem) -> Result<Option<CoreSubgraphWitness>> {
    if g.rank() != f.rank() {
        return Err(Error::RankMismatch { expected: g.rank(), found: f.rank() });
    }
    let mut comps = Vec::new();
    let mut verts = Vec::new();
    let mut used = vec![false; g.graph().nv()];
    for core in f.cores(g)? {
        if !core.is_embedding() {
            return Ok(None);
        }
        let mut vs: Vec<usize> = (0..core.graph().nv()).map(|v| core.over(v)).collect();
        vs.sort_unstable();
        if vs.iter().any(|&v| used[v]) {
            return Ok(None);
        }
        for &v in &vs {
            used[v] = true;
        }
        let mut es = core.ambient_edges();
        es.sort_unstable();
        comps.push(es);
        verts.push(vs);
    }
    Ok(Some(CoreSubgraphWitness { components: comps, vertices: verts }))
}

/// Core of the collapse against collapse of the core, compared as labelled
/// graphs over the collapsed ambient graph.
pub fn minimal_subtree_collapse_check(g: &MarkedGraph, forest: &[usize], gens: &[Word]) -> Result<bool> {
    let k = stallings_core(gens, g, false)?;
    let (g2, m) = g.collapse_marked(forest)?;
    let direct = stallings_core(gens, &g2, false)?;
    let inner: Vec<usize> = (0..k.graph().ne()).filter(|&e| m.edge_map[edge_of(k.labels[e])].is_none()).collect();
    let km = collapse(k.graph(), &inner)?;
    let mut labels = vec![0; km.target.ne()];
    for e in 0..k.graph().ne() {
        if let Some(ne) = km.edge_map[e] {
            labels[ne] = m.push_dir(k.labels[e]).expect("edge survives");
        }
    }
    let ok = !isomorphisms_with(&km.target, direct.graph(), |e, d| direct.label(d) == labels[e], 1).is_empty();
    Ok(ok)
}
