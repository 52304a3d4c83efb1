//! The crossing count `i_{A,B}(c, G)`: how many times the projection to the
//! B-core of the axis of `c` entirely crosses the distinguished edge `E`.

use crate::covers::{realizes, stallings_core, FreeFactorSystem, SubgroupGraph};
use crate::error::{Error, Result};
use crate::graph::{edge_of, CoreGraph, DirEdge};
use crate::marked::MarkedGraph;
use crate::word::{invert_seq, CyclicWord, Word};

#[derive(Clone, Debug)]
pub struct CountingContext {
    g: MarkedGraph,
    k: SubgroupGraph,
    /// K-edges of each embedded A-core.
    ka: Vec<Vec<usize>>,
    /// The distinguished edge as a chain of K-edges.
    e: Vec<DirEdge>,
    loop_case: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingCount {
    pub value: usize,
    /// Start of a maximizing stay: K-vertex and circuit phase.
    pub start: Option<(usize, usize)>,
}

impl CountingContext {
    pub fn graph(&self) -> &MarkedGraph {
        &self.g
    }

    pub fn core(&self) -> &SubgroupGraph {
        &self.k
    }

    pub fn a_edges(&self) -> &[Vec<usize>] {
        &self.ka
    }

    pub fn crossing_edge(&self) -> &[DirEdge] {
        &self.e
    }

    /// Whether `E` is a loop joined to the A-core by a connecting edge (or
    /// touching it at a point).
    pub fn is_loop_case(&self) -> bool {
        self.loop_case
    }
}

/// Builds the context for the A-components `a` (one for Case 1, two for
/// Case 2) inside `B = <b>` over `g`.
pub fn build_context(a: &[Vec<Word>], b: &[Word], g: &MarkedGraph) -> Result<CountingContext> {
    let system = FreeFactorSystem::new(g.rank(), a.to_vec())?;
    if realizes(g, &system)?.is_none() {
        return Err(Error::Precondition("the A-system is not carried by a core subgraph".into()));
    }
    let bb = stallings_core(b, g, true)?;
    let (k, kv, ke) = bb.unbased_maps();
    let mut ka = Vec::new();
    let mut used_v = vec![false; k.graph().nv()];
    let mut used_e = vec![false; k.graph().ne()];
    let mut a_rank = 0;
    for comp in a {
        let ab = stallings_core(comp, g, true)?;
        let (ac, _, ae) = ab.unbased_maps();
        a_rank += ac.rank();
        let (vm, em) = map_based(&ab, &bb)?;
        let mut edges = Vec::new();
        for (e, img) in em.iter().enumerate() {
            if ae[e].is_none() {
                continue;
            }
            let ke_idx = ke[*img].ok_or_else(|| Error::Invariant("A-core leaves the B-core".into()))?;
            if used_e[ke_idx] {
                return Err(Error::Precondition("A-cores do not embed disjointly in the B-core".into()));
            }
            used_e[ke_idx] = true;
            edges.push(ke_idx);
        }
        let core_vertices: Vec<usize> = (0..ab.graph().nv())
            .filter(|&v| ab.graph().directions_at(v).iter().any(|&d| ae[edge_of(d)].is_some()))
            .collect();
        for v in core_vertices {
            let kvx = kv[vm[v]].ok_or_else(|| Error::Invariant("A-core vertex off the B-core".into()))?;
            if used_v[kvx] {
                return Err(Error::Precondition("A-cores do not embed disjointly in the B-core".into()));
            }
            used_v[kvx] = true;
        }
        edges.sort_unstable();
        ka.push(edges);
    }
    let expected = a_rank + 2 - a.len().min(2);
    if a.is_empty() || a.len() > 2 || k.rank() != expected {
        return Err(Error::RankMismatch { expected, found: k.rank() });
    }
    let (e, loop_case) = classify(k.graph(), &used_v, &used_e)?;
    Ok(CountingContext { g: g.clone(), k, ka, e, loop_case })
}

/// Maps a based subgroup graph into another from basepoint to basepoint.
fn map_based(a: &SubgroupGraph, b: &SubgroupGraph) -> Result<(Vec<usize>, Vec<usize>)> {
    let ga = a.graph();
    let mut vm = vec![usize::MAX; ga.nv()];
    let mut em = vec![usize::MAX; ga.ne()];
    let root = a.base().expect("based");
    vm[root] = b.base().expect("based");
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for d in ga.directions_at(v) {
            let img =
                b.step(vm[v], a.label(d)).ok_or_else(|| Error::Precondition("A is not a subgroup of B".into()))?;
            let w = ga.terminus(d);
            let wi = b.graph().terminus(img);
            if vm[w] == usize::MAX {
                vm[w] = wi;
                stack.push(w);
            } else if vm[w] != wi {
                return Err(Error::Invariant("inconsistent lift".into()));
            }
            em[edge_of(d)] = edge_of(img);
        }
    }
    Ok((vm, em))
}

/// Identifies `E` from the complement of the A-cores.
fn classify(k: &CoreGraph, in_a_v: &[bool], in_a_e: &[bool]) -> Result<(Vec<DirEdge>, bool)> {
    let kept: Vec<bool> = (0..k.nv()).map(|v| k.valence(v) != 2).collect();
    let chains = k.chains(&kept)?;
    let outside: Vec<Vec<DirEdge>> = chains.into_iter().filter(|c| c.iter().all(|&d| !in_a_e[edge_of(d)])).collect();
    let mixed = (0..k.ne()).filter(|&e| !in_a_e[e]).count() != outside.iter().map(Vec::len).sum::<usize>();
    let shape = || Error::Precondition("complement of the A-cores is not a single edge or a hanging loop".into());
    if mixed {
        return Err(shape());
    }
    let ends = |c: &[DirEdge]| (k.origin(c[0]), k.terminus(*c.last().unwrap()));
    match outside.len() {
        1 => {
            let (o, t) = ends(&outside[0]);
            if in_a_v[o] && in_a_v[t] {
                Ok((outside[0].clone(), o == t))
            } else {
                Err(shape())
            }
        }
        2 => {
            let lp = outside.iter().position(|c| {
                let (o, t) = ends(c);
                o == t && !in_a_v[o]
            });
            let Some(lp) = lp else { return Err(shape()) };
            let conn = &outside[1 - lp];
            let w = ends(&outside[lp]).0;
            let (o, t) = ends(conn);
            if (in_a_v[o] && t == w) || (in_a_v[t] && o == w) {
                Ok((outside[lp].clone(), true))
            } else {
                Err(shape())
            }
        }
        _ => Err(shape()),
    }
}

/// The crossing count of the conjugacy class `c`.
pub fn count_i(ctx: &CountingContext, c: &CyclicWord) -> Result<CrossingCount> {
    let gamma = ctx.g.circuit_of(c)?;
    let l = gamma.len();
    let k = &ctx.k;
    let kg = k.graph();
    let amb = ctx.g.graph();
    let nstates = kg.nv() * l;
    let idx = |v: usize, j: usize| v * l + j;
    let mut visited = vec![false; nstates];
    let mut best = CrossingCount { value: 0, start: None };
    for v in 0..kg.nv() {
        for j in 0..l {
            if k.over(v) != amb.origin(gamma[j]) {
                visited[idx(v, j)] = true;
                continue;
            }
            let prev = gamma[(j + l - 1) % l];
            if k.step(v, -prev).is_some() {
                continue;
            }
            let mut mu = Vec::new();
            let (mut cv, mut cj) = (v, j);
            loop {
                if visited[idx(cv, cj)] {
                    return Err(Error::Invariant("trace revisited a state".into()));
                }
                visited[idx(cv, cj)] = true;
                match k.step(cv, gamma[cj]) {
                    Some(d) => {
                        mu.push(d);
                        cv = kg.terminus(d);
                        cj = (cj + 1) % l;
                    }
                    None => break,
                }
            }
            let n = crossings(&mu, &ctx.e);
            if best.start.is_none() || n > best.value {
                best = CrossingCount { value: n, start: Some((v, j)) };
            }
        }
    }
    if visited.iter().any(|&s| !s) {
        return Err(Error::ConjugateIntoB);
    }
    Ok(best)
}

/// Complete traversals of the chain `e` (either direction) inside `mu`.
fn crossings(mu: &[DirEdge], e: &[DirEdge]) -> usize {
    let rev = invert_seq(e);
    let n = e.len();
    let mut count = 0;
    let mut i = 0;
    while i + n <= mu.len() {
        if mu[i..i + n] == e[..] || mu[i..i + n] == rev[..] {
            count += 1;
            i += n;
        } else {
            i += 1;
        }
    }
    count
}

/// Counts before and after collapsing `forest` in `g`.
pub fn lipschitz_audit(
    a: &[Vec<Word>],
    b: &[Word],
    g: &MarkedGraph,
    forest: &[usize],
    c: &CyclicWord,
) -> Result<(usize, usize)> {
    let before = count_i(&build_context(a, b, g)?, c)?.value;
    let (g2, _) = g.collapse_marked(forest)?;
    let system = FreeFactorSystem::new(g.rank(), a.to_vec())?;
    if realizes(&g2, &system)?.is_none() {
        return Err(Error::Precondition("collapse leaves the A-subcomplex".into()));
    }
    let after = count_i(&build_context(a, b, &g2)?, c)?.value;
    Ok((before, after))
}
