//! One-edge free splittings: blueprints, membership in the subcomplex of
//! marked graphs that map tightly onto the splitting, and the retraction
//! onto that subcomplex built from minimal subtrees and boundary rays.

use std::collections::HashSet;

use crate::covers::{realizes, stallings_core, FreeFactorSystem, SubgroupGraph};
use crate::error::{Error, Result};
use crate::graph::{dir, edge_of, enumerate_natural_subforests, is_forward, CoreGraph, DirEdge};
use crate::marked::{EdgePath, MarkedGraph};
use crate::word::{cyclic_core, free_reduce, invert_seq, Automorphism, Endo, Word};

/// The quotient graph of groups of a one-edge free splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplittingBlueprint {
    /// One vertex with group `vertex` (rank `n - 1`) and a loop edge whose
    /// stable letter is `stable`.
    Loop { vertex: Vec<Word>, stable: Word },
    /// Two vertices with groups `a0`, `a1` joined by an edge.
    Segment { a0: Vec<Word>, a1: Vec<Word> },
}

impl SplittingBlueprint {
    /// Validates that the vertex generators (and stable letter) form a basis.
    pub fn new_loop(vertex: Vec<Word>, stable: Word) -> Result<SplittingBlueprint> {
        let bp = SplittingBlueprint::Loop { vertex, stable };
        bp.basis_change()?;
        Ok(bp)
    }

    pub fn new_segment(a0: Vec<Word>, a1: Vec<Word>) -> Result<SplittingBlueprint> {
        if a0.is_empty() || a1.is_empty() {
            return Err(Error::Trivial);
        }
        let bp = SplittingBlueprint::Segment { a0, a1 };
        bp.basis_change()?;
        Ok(bp)
    }

    pub fn rank(&self) -> usize {
        self.basis().len()
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, SplittingBlueprint::Loop { .. })
    }

    /// Vertex generators followed by the stable letter, if any.
    pub fn basis(&self) -> Vec<Word> {
        match self {
            SplittingBlueprint::Loop { vertex, stable } => {
                let mut b = vertex.clone();
                b.push(stable.clone());
                b
            }
            SplittingBlueprint::Segment { a0, a1 } => a0.iter().chain(a1).cloned().collect(),
        }
    }

    /// The automorphism sending `a_i` to the `i`-th blueprint basis element.
    pub fn basis_change(&self) -> Result<Automorphism> {
        let b = self.basis();
        let n = b.len();
        for w in &b {
            if !w.fits_rank(n) {
                return Err(Error::LetterOutOfRange { index: w.max_index() as u32, rank: n });
            }
        }
        Automorphism::new(Endo::new(b)?)
            .map_err(|_| Error::Precondition("blueprint generators do not form a basis".into()))
    }

    pub fn vertex_groups(&self) -> Vec<Vec<Word>> {
        match self {
            SplittingBlueprint::Loop { vertex, .. } => vec![vertex.clone()],
            SplittingBlueprint::Segment { a0, a1 } => vec![a0.clone(), a1.clone()],
        }
    }

    pub fn vertex_system(&self) -> Result<FreeFactorSystem> {
        FreeFactorSystem::new(self.rank(), self.vertex_groups())
    }
}

fn short_words(n: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<i32> = (1..=n as i32).flat_map(|i| [i, -i]).collect();
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.letters().last() == Some(&-l) {
                    continue;
                }
                next.push(w.mul(&Word::letter(l)));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The one-edge splitting whose vertex groups form the given coindex-1 free
/// factor system. A stable letter or a conjugate of the second vertex group
/// completing the generators to a basis is searched among short words.
pub fn coindex1_to_splitting(f: &FreeFactorSystem) -> Result<SplittingBlueprint> {
    let n = f.rank();
    if f.coindex()? != 1 {
        return Err(Error::Precondition("free factor system does not have coindex 1".into()));
    }
    let rose = MarkedGraph::rose(n);
    for c in f.components() {
        if stallings_core(c, &rose, false)?.rank() != c.len() {
            return Err(Error::Precondition("component generators are not a free basis".into()));
        }
    }
    let comps = f.components();
    let candidates = short_words(n, 3);
    match comps.len() {
        1 => {
            for t in candidates.iter().filter(|t| !t.is_empty()) {
                if let Ok(bp) = SplittingBlueprint::new_loop(comps[0].clone(), t.clone()) {
                    return Ok(bp);
                }
            }
        }
        2 => {
            for g in &candidates {
                let a1 = comps[1].iter().map(|w| w.conj(g)).collect();
                if let Ok(bp) = SplittingBlueprint::new_segment(comps[0].clone(), a1) {
                    return Ok(bp);
                }
            }
        }
        _ => {}
    }
    Err(Error::Precondition("no short completion of the system to a basis found".into()))
}

/// The boundary point `prefix · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayDatum {
    pub prefix: Word,
    pub period: Word,
}

impl RayDatum {
    pub fn new(prefix: Word, period: Word) -> Result<RayDatum> {
        if period.is_empty() {
            return Err(Error::Trivial);
        }
        Ok(RayDatum { prefix, period })
    }

    pub fn periodic(period: Word) -> Result<RayDatum> {
        RayDatum::new(Word::empty(), period)
    }
}

/// A blueprint with one ray per end of the splitting edge: for a loop the
/// rays leave along the stable letter forwards and backwards, for a segment
/// the first ray leaves the first vertex group and the second the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractionData {
    pub blueprint: SplittingBlueprint,
    pub rays: [RayDatum; 2],
}

impl RetractionData {
    pub fn new(blueprint: SplittingBlueprint, rays: [RayDatum; 2]) -> Result<RetractionData> {
        for r in &rays {
            if !r.prefix.fits_rank(blueprint.rank()) || !r.period.fits_rank(blueprint.rank()) {
                return Err(Error::RankMismatch { expected: blueprint.rank(), found: r.period.max_index() });
            }
        }
        Ok(RetractionData { blueprint, rays })
    }

    /// Loop: `t^∞` and `t^-∞`. Segment: `(b a)^∞` and `(a b)^∞` with `a`,
    /// `b` the first generators of the two vertex groups.
    pub fn with_default_rays(blueprint: SplittingBlueprint) -> Result<RetractionData> {
        let rays = match &blueprint {
            SplittingBlueprint::Loop { stable, .. } => {
                [RayDatum::periodic(stable.clone())?, RayDatum::periodic(stable.inverse())?]
            }
            SplittingBlueprint::Segment { a0, a1 } => {
                let (a, b) = (&a0[0], &a1[0]);
                [RayDatum::periodic(b.mul(a))?, RayDatum::periodic(a.mul(b))?]
            }
        };
        RetractionData::new(blueprint, rays)
    }
}

/// Where a boundary ray last touches the minimal subtree of a vertex group,
/// read in the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachPoint {
    /// Vertex of the unbased core.
    pub vertex: usize,
    /// Path in the unbased core from the end of the basepoint tail to
    /// `vertex`.
    pub approach: EdgePath,
}

/// A vertex group's core together with the data to read paths into it.
struct VertexCore {
    based: SubgroupGraph,
    unbased: SubgroupGraph,
    vmap: Vec<Option<usize>>,
    emap: Vec<Option<usize>>,
}

impl VertexCore {
    fn new(gens: &[Word], g: &MarkedGraph) -> Result<VertexCore> {
        let based = stallings_core(gens, g, true)?;
        let (unbased, vmap, emap) = based.unbased_maps();
        Ok(VertexCore { based, unbased, vmap, emap })
    }

    fn q(&self) -> usize {
        self.vmap[self.based.core_vertex().expect("based")].expect("core vertex")
    }

    /// Rewrites a path of the based graph that avoids the tail.
    fn to_unbased(&self, p: &[DirEdge]) -> Result<EdgePath> {
        p.iter()
            .map(|&d| self.emap[edge_of(d)].map(|e| dir(e, is_forward(d))))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Invariant("path runs along the basepoint tail".into()))
    }

    /// Closed path at `q` representing an element of the vertex group.
    fn loop_at_q(&self, g: &MarkedGraph, w: &Word) -> Result<EdgePath> {
        let base = self.based.base().expect("based");
        let lifted = self
            .based
            .lift(base, &g.expand(w)?)
            .ok_or_else(|| Error::Precondition(format!("{w} is not in the vertex group")))?;
        let tail = self.based.tail();
        let mut raw = invert_seq(tail);
        raw.extend(lifted);
        raw.extend_from_slice(tail);
        self.to_unbased(&free_reduce(&raw))
    }

    fn attach(&self, g: &MarkedGraph, ray: &RayDatum) -> Result<AttachPoint> {
        let prefix = g.expand(&ray.prefix)?;
        let z = g.expand(&ray.period)?;
        let (k, c) = cyclic_core(&z);
        let c = c.to_vec();
        if c.is_empty() {
            return Err(Error::Trivial);
        }
        let mut head = prefix;
        head.extend_from_slice(&z[..k]);
        let copies = head.len() / c.len() + 2;
        for _ in 0..copies {
            head.extend_from_slice(&c);
        }
        let head = free_reduce(&head);

        let kb = &self.based;
        let base = kb.base().expect("based");
        let in_core = |v: usize| self.vmap[v].is_some();
        let core_edge = |d: DirEdge| self.emap[edge_of(d)].is_some();
        let mut cur = base;
        let mut walked: Vec<DirEdge> = Vec::new();
        let mut last: Option<(usize, usize)> = in_core(base).then_some((base, 0));
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut idx = 0usize;
        loop {
            let (label, phase) = if idx < head.len() {
                (head[idx], None)
            } else {
                let ph = (idx - head.len()) % c.len();
                (c[ph], Some(ph))
            };
            if let Some(ph) = phase {
                if last.is_some() && in_core(cur) && !seen.insert((cur, ph)) {
                    return Err(Error::RayInVertexGroup);
                }
            }
            let Some(d) = kb.step(cur, label) else { break };
            if last.is_some() && !core_edge(d) {
                break;
            }
            walked.push(d);
            cur = kb.graph().terminus(d);
            if in_core(cur) {
                last = Some((cur, walked.len()));
            }
            idx += 1;
        }
        let (vertex, approach) = match last {
            Some((v, len)) => {
                let mut raw = invert_seq(kb.tail());
                raw.extend_from_slice(&walked[..len]);
                (v, self.to_unbased(&free_reduce(&raw))?)
            }
            None => (kb.core_vertex().expect("based"), Vec::new()),
        };
        Ok(AttachPoint { vertex: self.vmap[vertex].expect("core vertex"), approach })
    }
}

/// Nearest point of the minimal subtree of `<gens>` to the ray's endpoint.
pub fn attach_point(g: &MarkedGraph, gens: &[Word], ray: &RayDatum) -> Result<AttachPoint> {
    VertexCore::new(gens, g)?.attach(g, ray)
}

/// Edges of the core subgraph and the splitting edge of a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitWitness {
    pub cores: Vec<Vec<usize>>,
    pub edge: Vec<DirEdge>,
}

/// Membership in the subcomplex: the vertex groups are carried by disjoint
/// core subgraphs whose complement is one natural edge with the blueprint's
/// incidence.
pub fn in_cvkt(g: &MarkedGraph, bp: &SplittingBlueprint) -> Result<Option<SplitWitness>> {
    if g.rank() != bp.rank() {
        return Err(Error::RankMismatch { expected: bp.rank(), found: g.rank() });
    }
    let Some(h) = realizes(g, &bp.vertex_system()?)? else {
        return Ok(None);
    };
    let gr = g.graph();
    let in_h = h.edges();
    let chains = gr.chains(&gr.natural_kept())?;
    let outside: Vec<&Vec<DirEdge>> =
        chains.iter().filter(|c| c.iter().any(|d| in_h.binary_search(&edge_of(*d)).is_err())).collect();
    if outside.len() != 1 || outside[0].iter().any(|d| in_h.binary_search(&edge_of(*d)).is_ok()) {
        return Ok(None);
    }
    let chain = outside[0].clone();
    let (o, t) = (gr.origin(chain[0]), gr.terminus(*chain.last().unwrap()));
    let side = |v: usize| h.vertices.iter().position(|vs| vs.binary_search(&v).is_ok());
    let ok = match (side(o), side(t)) {
        (Some(a), Some(b)) => bp.is_loop() || a != b,
        _ => false,
    };
    Ok(ok.then_some(SplitWitness { cores: h.components, edge: chain }))
}

/// Assembles the member of the subcomplex determined by the minimal
/// subtrees of the vertex groups and the attach points of the rays.
pub fn retract_big_r(g: &MarkedGraph, data: &RetractionData) -> Result<MarkedGraph> {
    let bp = &data.blueprint;
    if g.rank() != bp.rank() {
        return Err(Error::RankMismatch { expected: bp.rank(), found: g.rank() });
    }
    let (graph, base, basis_paths) = match bp {
        SplittingBlueprint::Loop { vertex, .. } => {
            let vc = VertexCore::new(vertex, g)?;
            let q1 = vc.attach(g, &data.rays[0])?;
            let q2 = vc.attach(g, &data.rays[1])?;
            let (graph, e) = vc.unbased.graph().with_edge(q1.vertex, q2.vertex);
            let mut paths = vertex.iter().map(|w| vc.loop_at_q(g, w)).collect::<Result<Vec<_>>>()?;
            let mut t = q1.approach.clone();
            t.push(dir(e, true));
            t.extend(invert_seq(&q2.approach));
            paths.push(free_reduce(&t));
            (graph, vc.q(), paths)
        }
        SplittingBlueprint::Segment { a0, a1 } => {
            let c0 = VertexCore::new(a0, g)?;
            let c1 = VertexCore::new(a1, g)?;
            let p0 = c0.attach(g, &data.rays[0])?;
            let p1 = c1.attach(g, &data.rays[1])?;
            let g0 = c0.unbased.graph();
            let (nv0, ne0) = (g0.nv(), g0.ne() as DirEdge);
            let shift =
                |p: &[DirEdge]| -> EdgePath { p.iter().map(|&d| if d > 0 { d + ne0 } else { d - ne0 }).collect() };
            let mut edges = g0.edges().to_vec();
            edges.extend(c1.unbased.graph().edges().iter().map(|&(o, t)| (o + nv0, t + nv0)));
            edges.push((p0.vertex, p1.vertex + nv0));
            let e = dir(edges.len() - 1, true);
            let graph = CoreGraph::new(nv0 + c1.unbased.graph().nv(), edges)?;
            let mut paths = a0.iter().map(|w| c0.loop_at_q(g, w)).collect::<Result<Vec<_>>>()?;
            let mut bridge = p0.approach.clone();
            bridge.push(e);
            bridge.extend(shift(&invert_seq(&p1.approach)));
            for w in a1 {
                let mut raw = bridge.clone();
                raw.extend(shift(&c1.loop_at_q(g, w)?));
                raw.extend(invert_seq(&bridge));
                paths.push(free_reduce(&raw));
            }
            (graph, c0.q(), paths)
        }
    };
    let beta = bp.basis_change()?;
    let marking = (1..=bp.rank())
        .map(|j| {
            let mut raw = Vec::new();
            for &l in beta.inverse_map().image(j).letters() {
                let p = &basis_paths[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    raw.extend_from_slice(p);
                } else {
                    raw.extend(invert_seq(p));
                }
            }
            free_reduce(&raw)
        })
        .collect();
    MarkedGraph::new(graph, base, marking)?.normalize()
}

/// Checks that the retractions of the two ends of a natural collapse are
/// equal or joined by one collapse, returning the distance.
pub fn retraction_audit(g: &MarkedGraph, forest: &[usize], data: &RetractionData) -> Result<usize> {
    let natural = enumerate_natural_subforests(g.graph());
    let mut f = forest.to_vec();
    f.sort_unstable();
    f.dedup();
    if f.is_empty() || !natural.contains(&f) {
        return Err(Error::Precondition("forest is not a nonempty natural subforest".into()));
    }
    let g2 = g.collapse_marked(&f)?.0.normalize()?;
    let x = retract_big_r(g, data)?;
    let y = retract_big_r(&g2, data)?;
    for r in [&x, &y] {
        if in_cvkt(r, &data.blueprint)?.is_none() {
            return Err(Error::Invariant("retraction left the subcomplex".into()));
        }
    }
    adjacency(&x, &y).ok_or_else(|| Error::Invariant("retractions of adjacent vertices are not adjacent".into()))
}

/// `Some(0)` if equivalent, `Some(1)` if one collapses to the other.
pub fn adjacency(x: &MarkedGraph, y: &MarkedGraph) -> Option<usize> {
    if x.equivalent(y).is_some() {
        return Some(0);
    }
    for (a, b) in [(x, y), (y, x)] {
        if a.graph().ne() <= b.graph().ne() {
            continue;
        }
        for f in enumerate_natural_subforests(a.graph()).into_iter().filter(|f| !f.is_empty()) {
            let c = a.collapse_marked(&f).ok()?.0.normalize().ok()?;
            if c.graph().ne() == b.graph().ne() && c.equivalent(b).is_some() {
                return Some(1);
            }
        }
    }
    None
}
