//! Finite graphs, natural structure, forest collapses, blow-ups and
//! isomorphism search.
//!
//! Edges are numbered `0..ne`; a directed edge is `+(e+1)` (forward) or
//! `-(e+1)` (reversed), the same signed encoding as free-group letters.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::word::{free_reduce, free_reduce_count, invert_seq};

pub type DirEdge = i32;

pub fn dir(e: usize, forward: bool) -> DirEdge {
    let d = e as i32 + 1;
    if forward {
        d
    } else {
        -d
    }
}

pub fn edge_of(d: DirEdge) -> usize {
    d.unsigned_abs() as usize - 1
}

pub fn is_forward(d: DirEdge) -> bool {
    d > 0
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreGraph {
    nv: usize,
    edges: Vec<(usize, usize)>,
}

impl CoreGraph {
    pub fn new(nv: usize, edges: Vec<(usize, usize)>) -> Result<CoreGraph> {
        if let Some(&(o, t)) = edges.iter().find(|&&(o, t)| o >= nv || t >= nv) {
            return Err(Error::Precondition(format!("edge ({o},{t}) uses a vertex outside 0..{nv}")));
        }
        Ok(CoreGraph { nv, edges })
    }

    /// Rose with `n` petals at vertex 0; petal `i` is edge `i-1`.
    pub fn rose(n: usize) -> CoreGraph {
        CoreGraph { nv: 1, edges: vec![(0, 0); n] }
    }

    /// Two vertices joined by three edges, all oriented 0 → 1.
    pub fn theta() -> CoreGraph {
        CoreGraph { nv: 2, edges: vec![(0, 1); 3] }
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn ne(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn origin(&self, d: DirEdge) -> usize {
        let (o, t) = self.edges[edge_of(d)];
        if is_forward(d) {
            o
        } else {
            t
        }
    }

    pub fn terminus(&self, d: DirEdge) -> usize {
        self.origin(-d)
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.nv];
        for &(o, t) in &self.edges {
            val[o] += 1;
            val[t] += 1;
        }
        val
    }

    pub fn valence(&self, v: usize) -> usize {
        self.edges.iter().map(|&(o, t)| usize::from(o == v) + usize::from(t == v)).sum()
    }

    /// Directed edges with origin `v`; a loop contributes both orientations.
    pub fn directions_at(&self, v: usize) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for (e, &(o, t)) in self.edges.iter().enumerate() {
            if o == v {
                out.push(dir(e, true));
            }
            if t == v {
                out.push(dir(e, false));
            }
        }
        out
    }

    pub fn all_directions(&self) -> Vec<DirEdge> {
        (0..self.ne()).flat_map(|e| [dir(e, true), dir(e, false)]).collect()
    }

    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.nv);
        for &(o, t) in &self.edges {
            uf.union(o, t);
        }
        (0..self.nv).filter(|&v| uf.find(v) == v).count()
    }

    pub fn is_connected(&self) -> bool {
        self.nv > 0 && self.components() == 1
    }

    /// First Betti number.
    pub fn betti(&self) -> usize {
        self.edges.len() + self.components() - self.nv
    }

    pub fn is_core(&self) -> bool {
        self.is_connected() && self.valences().iter().all(|&v| v >= 2)
    }

    pub fn is_natural(&self) -> bool {
        self.is_connected() && self.valences().iter().all(|&v| v >= 3)
    }

    pub fn path_is_valid(&self, path: &[DirEdge]) -> bool {
        path.iter().all(|&d| d != 0 && edge_of(d) < self.ne())
            && path.windows(2).all(|w| self.terminus(w[0]) == self.origin(w[1]))
    }

    pub fn is_acyclic(&self, edges: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.nv);
        edges.iter().all(|&e| {
            let (o, t) = self.edges[e];
            uf.union(o, t)
        })
    }

    /// Spanning tree edges chosen by breadth-first search from `root`.
    pub fn spanning_tree(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nv];
        seen[root] = true;
        let mut tree = Vec::new();
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for d in self.directions_at(v) {
                let w = self.terminus(d);
                if !seen[w] {
                    seen[w] = true;
                    tree.push(edge_of(d));
                    queue.push_back(w);
                }
            }
        }
        tree
    }

    /// Reduced path inside the tree `tree` from `a` to `b`.
    pub fn tree_path(&self, tree: &[usize], a: usize, b: usize) -> Vec<DirEdge> {
        let mut prev: Vec<Option<DirEdge>> = vec![None; self.nv];
        let mut seen = vec![false; self.nv];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for &e in tree {
                let (o, t) = self.edges[e];
                for (from, to, d) in [(o, t, dir(e, true)), (t, o, dir(e, false))] {
                    if from == v && !seen[to] {
                        seen[to] = true;
                        prev[to] = Some(d);
                        queue.push_back(to);
                    }
                }
            }
        }
        let mut path = Vec::new();
        let mut v = b;
        while v != a {
            let d = prev[v].expect("tree spans both vertices");
            path.push(d);
            v = self.origin(d);
        }
        path.reverse();
        path
    }

    /// Maximal chains through vertices outside `kept`. Each chain is listed
    /// once, starting at a kept vertex.
    pub fn chains(&self, kept: &[bool]) -> Result<Vec<Vec<DirEdge>>> {
        let mut used = vec![false; self.ne()];
        let mut chains = Vec::new();
        for v in 0..self.nv {
            if !kept[v] {
                continue;
            }
            for d in self.directions_at(v) {
                if used[edge_of(d)] {
                    continue;
                }
                let mut chain = vec![d];
                used[edge_of(d)] = true;
                let mut cur = d;
                while !kept[self.terminus(cur)] {
                    let w = self.terminus(cur);
                    let next = self
                        .directions_at(w)
                        .into_iter()
                        .find(|&x| x != -cur)
                        .ok_or_else(|| Error::Precondition("vertex of valence 1".into()))?;
                    used[edge_of(next)] = true;
                    chain.push(next);
                    cur = next;
                }
                chains.push(chain);
            }
        }
        if used.iter().any(|&u| !u) {
            return Err(Error::Circle);
        }
        Ok(chains)
    }

    pub fn natural_kept(&self) -> Vec<bool> {
        self.valences().iter().map(|&v| v != 2).collect()
    }

    pub fn relabel_vertices(&self, perm: &[usize], nv: usize) -> CoreGraph {
        CoreGraph { nv, edges: self.edges.iter().map(|&(o, t)| (perm[o], perm[t])).collect() }
    }

    /// Graph with one edge appended; returns the new edge index.
    pub fn with_edge(&self, o: usize, t: usize) -> (CoreGraph, usize) {
        let mut g = self.clone();
        g.edges.push((o, t));
        (g, self.ne())
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        self.parent[v] = r;
        r
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[rb] = ra;
        true
    }
}

/// A graph with valence-2 vertices suppressed (except the kept ones), and the
/// dictionary between old and new edges.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub graph: CoreGraph,
    /// New edge `i` replaces the old directed chain `chains[i]`.
    pub chains: Vec<Vec<DirEdge>>,
    /// New index of each kept old vertex.
    pub vertex_map: Vec<Option<usize>>,
}

impl Refinement {
    /// Rewrites a path of the old graph whose endpoints are kept vertices.
    pub fn push_path(&self, path: &[DirEdge]) -> Result<Vec<DirEdge>> {
        let mut locate = std::collections::HashMap::new();
        for (i, c) in self.chains.iter().enumerate() {
            locate.insert(c[0], dir(i, true));
            locate.insert(-*c.last().unwrap(), dir(i, false));
        }
        let mut out = Vec::new();
        let mut k = 0;
        while k < path.len() {
            let nd = *locate
                .get(&path[k])
                .ok_or_else(|| Error::BadPath("path does not enter a chain at a kept vertex".into()))?;
            let chain = &self.chains[edge_of(nd)];
            let seq = if is_forward(nd) { chain.clone() } else { invert_seq(chain) };
            if path.len() < k + seq.len() || path[k..k + seq.len()] != seq[..] {
                return Err(Error::BadPath("path turns inside a chain".into()));
            }
            out.push(nd);
            k += seq.len();
        }
        Ok(out)
    }

    /// Expands a path of the new graph into the old graph.
    pub fn expand_path(&self, path: &[DirEdge]) -> Vec<DirEdge> {
        let mut out = Vec::new();
        for &d in path {
            let c = &self.chains[edge_of(d)];
            if is_forward(d) {
                out.extend_from_slice(c);
            } else {
                out.extend(invert_seq(c));
            }
        }
        out
    }
}

/// Suppresses every valence-2 vertex.
pub fn natural_structure(g: &CoreGraph) -> Result<Refinement> {
    natural_structure_rel(g, &[])
}

/// Suppresses valence-2 vertices other than those listed in `keep`.
pub fn natural_structure_rel(g: &CoreGraph, keep: &[usize]) -> Result<Refinement> {
    let mut kept = g.natural_kept();
    for &v in keep {
        kept[v] = true;
    }
    let chains = g.chains(&kept)?;
    let mut vertex_map = vec![None; g.nv()];
    let mut nv = 0;
    for v in 0..g.nv() {
        if kept[v] {
            vertex_map[v] = Some(nv);
            nv += 1;
        }
    }
    let edges = chains
        .iter()
        .map(|c| (vertex_map[g.origin(c[0])].unwrap(), vertex_map[g.terminus(*c.last().unwrap())].unwrap()))
        .collect();
    Ok(Refinement { graph: CoreGraph { nv, edges }, chains, vertex_map })
}

/// All acyclic unions of natural edges (chains), including the empty set.
pub fn enumerate_natural_subforests(g: &CoreGraph) -> Vec<Vec<usize>> {
    enumerate_subforests_kept(g, &g.natural_kept())
}

/// Subforests that are unions of chains relative to the kept vertices.
pub fn enumerate_subforests_kept(g: &CoreGraph, kept: &[bool]) -> Vec<Vec<usize>> {
    let chains = match g.chains(kept) {
        Ok(c) => c,
        Err(_) => return vec![Vec::new()],
    };
    let chain_edges: Vec<Vec<usize>> = chains.iter().map(|c| c.iter().map(|&d| edge_of(d)).collect()).collect();
    let mut out = Vec::new();
    let k = chains.len();
    let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    while let Some((i, chosen)) = stack.pop() {
        if i == k {
            let mut edges: Vec<usize> = chosen.iter().flat_map(|&c| chain_edges[c].clone()).collect();
            edges.sort_unstable();
            out.push(edges);
            continue;
        }
        stack.push((i + 1, chosen.clone()));
        let mut with = chosen;
        with.push(i);
        let edges: Vec<usize> = with.iter().flat_map(|&c| chain_edges[c].clone()).collect();
        if g.is_acyclic(&edges) {
            stack.push((i + 1, with));
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Quotient of a graph by a forest.
#[derive(Clone, Debug)]
pub struct CollapseMap {
    pub source: CoreGraph,
    pub target: CoreGraph,
    pub forest: Vec<usize>,
    /// Target edge of each source edge, `None` for collapsed edges.
    pub edge_map: Vec<Option<usize>>,
    pub vertex_map: Vec<usize>,
}

pub fn collapse(g: &CoreGraph, forest: &[usize]) -> Result<CollapseMap> {
    if forest.iter().any(|&e| e >= g.ne()) {
        return Err(Error::Precondition("forest edge out of range".into()));
    }
    if !g.is_acyclic(forest) {
        return Err(Error::CyclicForest);
    }
    let mut uf = UnionFind::new(g.nv());
    for &e in forest {
        let (o, t) = g.endpoints(e);
        uf.union(o, t);
    }
    let mut index = vec![usize::MAX; g.nv()];
    let mut nv = 0;
    let mut vertex_map = vec![0; g.nv()];
    for v in 0..g.nv() {
        let r = uf.find(v);
        if index[r] == usize::MAX {
            index[r] = nv;
            nv += 1;
        }
        vertex_map[v] = index[r];
    }
    let mut in_forest = vec![false; g.ne()];
    for &e in forest {
        in_forest[e] = true;
    }
    let mut edges = Vec::new();
    let mut edge_map = vec![None; g.ne()];
    for (e, &(o, t)) in g.edges().iter().enumerate() {
        if !in_forest[e] {
            edge_map[e] = Some(edges.len());
            edges.push((vertex_map[o], vertex_map[t]));
        }
    }
    let mut forest = forest.to_vec();
    forest.sort_unstable();
    forest.dedup();
    Ok(CollapseMap { source: g.clone(), target: CoreGraph { nv, edges }, forest, edge_map, vertex_map })
}

impl CollapseMap {
    /// Erases collapsed edges and renames the rest, then reduces. The flag
    /// reports whether erasure alone already gave a reduced path.
    pub fn push_path(&self, path: &[DirEdge]) -> Result<(Vec<DirEdge>, bool)> {
        if !self.source.path_is_valid(path) {
            return Err(Error::BadPath("not a path of the source graph".into()));
        }
        let erased: Vec<DirEdge> =
            path.iter().filter_map(|&d| self.edge_map[edge_of(d)].map(|e| dir(e, is_forward(d)))).collect();
        let (reduced, cancelled) = free_reduce_count(&erased);
        Ok((reduced, cancelled == 0))
    }

    pub fn push_dir(&self, d: DirEdge) -> Option<DirEdge> {
        self.edge_map[edge_of(d)].map(|e| dir(e, is_forward(d)))
    }
}

/// A single-edge expansion of a vertex.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub graph: CoreGraph,
    pub vertex: usize,
    pub new_vertex: usize,
    /// New edge from `vertex` to `new_vertex`; collapsing it recovers the input.
    pub new_edge: usize,
    /// Directions of the input at `vertex` that now emanate from `new_vertex`.
    pub moved: Vec<DirEdge>,
}

impl Blowup {
    pub fn forest(&self) -> Vec<usize> {
        vec![self.new_edge]
    }

    fn is_moved(&self, d: DirEdge) -> bool {
        self.moved.contains(&d)
    }

    /// Lifts a path of the original graph; its endpoints at the blown-up
    /// vertex are taken on the `vertex` side.
    pub fn lift_path(&self, path: &[DirEdge]) -> Vec<DirEdge> {
        let bridge = dir(self.new_edge, true);
        let mut out = Vec::new();
        let start_moved = path.first().is_some_and(|&d| self.is_moved(d));
        if start_moved {
            out.push(bridge);
        }
        for (k, &d) in path.iter().enumerate() {
            out.push(d);
            let arriving = -d;
            if let Some(&next) = path.get(k + 1) {
                let (a, b) = (self.is_moved(arriving), self.is_moved(next));
                if self.at_split_vertex(arriving) && a != b {
                    out.push(if a { -bridge } else { bridge });
                }
            } else if self.is_moved(arriving) {
                out.push(-bridge);
            }
        }
        free_reduce(&out)
    }

    fn at_split_vertex(&self, d: DirEdge) -> bool {
        self.is_moved(d) || self.graph.origin(d) == self.vertex
    }
}

/// All single-edge blow-ups: at each vertex of valence at least 4, each
/// unordered bipartition of its directions into two parts of size at least 2.
pub fn enumerate_blowups(g: &CoreGraph) -> Vec<Blowup> {
    let mut out = Vec::new();
    for v in 0..g.nv() {
        let dirs = g.directions_at(v);
        let k = dirs.len();
        if k < 4 {
            continue;
        }
        // Fix dirs[0] on the staying side to enumerate unordered bipartitions once.
        for mask in 0u64..(1u64 << (k - 1)) {
            let moved_mask = mask << 1;
            let size = moved_mask.count_ones() as usize;
            if size < 2 || k - size < 2 {
                continue;
            }
            let moved: Vec<DirEdge> = (0..k).filter(|&i| moved_mask >> i & 1 == 1).map(|i| dirs[i]).collect();
            let nvtx = g.nv();
            let mut edges = g.edges().to_vec();
            for &d in &moved {
                let e = edge_of(d);
                if is_forward(d) {
                    edges[e].0 = nvtx;
                } else {
                    edges[e].1 = nvtx;
                }
            }
            edges.push((v, nvtx));
            let graph = CoreGraph { nv: nvtx + 1, edges };
            out.push(Blowup { graph, vertex: v, new_vertex: nvtx, new_edge: g.ne(), moved });
        }
    }
    out
}

/// A graph isomorphism: vertex bijection and directed image of every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIso {
    pub vmap: Vec<usize>,
    pub emap: Vec<DirEdge>,
}

impl GraphIso {
    pub fn map_dir(&self, d: DirEdge) -> DirEdge {
        let img = self.emap[edge_of(d)];
        if is_forward(d) {
            img
        } else {
            -img
        }
    }

    pub fn map_path(&self, p: &[DirEdge]) -> Vec<DirEdge> {
        p.iter().map(|&d| self.map_dir(d)).collect()
    }
}

/// Enumerates isomorphisms `g → h` (connected graphs), optionally restricted
/// by a compatibility predicate on `(edge of g, directed image in h)`.
pub fn isomorphisms_with<F>(g: &CoreGraph, h: &CoreGraph, compat: F, limit: usize) -> Vec<GraphIso>
where
    F: Fn(usize, DirEdge) -> bool,
{
    let mut out = Vec::new();
    if g.nv() != h.nv() || g.ne() != h.ne() || g.ne() == 0 {
        return out;
    }
    let vg = g.valences();
    let vh = h.valences();
    {
        let mut a = vg.clone();
        let mut b = vh.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return out;
        }
    }
    // Edge order in which every edge after the first touches an earlier vertex.
    let mut order = Vec::new();
    let mut seen_v = vec![false; g.nv()];
    let mut seen_e = vec![false; g.ne()];
    let root = 0;
    seen_v[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for d in g.directions_at(v) {
            let e = edge_of(d);
            if !seen_e[e] {
                seen_e[e] = true;
                order.push(e);
            }
            let w = g.terminus(d);
            if !seen_v[w] {
                seen_v[w] = true;
                queue.push_back(w);
            }
        }
    }
    if order.len() != g.ne() || seen_v.iter().any(|&s| !s) {
        return out;
    }
    for r in 0..h.nv() {
        if vh[r] != vg[root] {
            continue;
        }
        let mut vmap = vec![usize::MAX; g.nv()];
        let mut vused = vec![false; h.nv()];
        vmap[root] = r;
        vused[r] = true;
        let mut emap = vec![0; g.ne()];
        let mut eused = vec![false; h.ne()];
        let mut st = IsoSearch { g, h, vg: &vg, vh: &vh, order: &order, compat: &compat, limit, out: &mut out };
        st.go(0, &mut vmap, &mut vused, &mut emap, &mut eused);
        if out.len() >= limit {
            break;
        }
    }
    out
}

struct IsoSearch<'a, F> {
    g: &'a CoreGraph,
    h: &'a CoreGraph,
    vg: &'a [usize],
    vh: &'a [usize],
    order: &'a [usize],
    compat: &'a F,
    limit: usize,
    out: &'a mut Vec<GraphIso>,
}

impl<F: Fn(usize, DirEdge) -> bool> IsoSearch<'_, F> {
    fn go(
        &mut self,
        k: usize,
        vmap: &mut Vec<usize>,
        vused: &mut Vec<bool>,
        emap: &mut Vec<DirEdge>,
        eused: &mut Vec<bool>,
    ) {
        if self.out.len() >= self.limit {
            return;
        }
        if k == self.order.len() {
            self.out.push(GraphIso { vmap: vmap.clone(), emap: emap.clone() });
            return;
        }
        let e = self.order[k];
        let (o, t) = self.g.endpoints(e);
        for f in 0..self.h.ne() {
            if eused[f] {
                continue;
            }
            for fwd in [true, false] {
                let d = dir(f, fwd);
                let (ho, ht) = (self.h.origin(d), self.h.terminus(d));
                if (o == t) != (ho == ht) {
                    continue;
                }
                if !(self.compat)(e, d) {
                    continue;
                }
                let mut assigned = Vec::new();
                let mut ok = true;
                for (gv, hv) in [(o, ho), (t, ht)] {
                    if vmap[gv] == usize::MAX {
                        if vused[hv] || self.vg[gv] != self.vh[hv] {
                            ok = false;
                            break;
                        }
                        vmap[gv] = hv;
                        vused[hv] = true;
                        assigned.push(gv);
                    } else if vmap[gv] != hv {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    eused[f] = true;
                    emap[e] = d;
                    self.go(k + 1, vmap, vused, emap, eused);
                    eused[f] = false;
                }
                for gv in assigned {
                    vused[vmap[gv]] = false;
                    vmap[gv] = usize::MAX;
                }
                if self.out.len() >= self.limit {
                    return;
                }
            }
        }
    }
}

pub fn isomorphisms(g: &CoreGraph, h: &CoreGraph) -> Vec<GraphIso> {
    isomorphisms_with(g, h, |_, _| true, usize::MAX)
}

pub fn is_isomorphic(g: &CoreGraph, h: &CoreGraph) -> bool {
    !isomorphisms_with(g, h, |_, _| true, 1).is_empty()
}
