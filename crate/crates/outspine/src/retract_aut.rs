//! Retraction of the spine of autre espace in rank `n` onto the image of
//! rank `n - 1`: attach a loop at the basepoint one way, take the pointed
//! core of `<a_1, ..., a_{n-1}>` the other way.

use crate::covers::stallings_core;
use crate::error::{Error, Result};
use crate::graph::{dir, edge_of, is_forward, DirEdge};
use crate::marked::MarkedGraph;
use crate::word::{free_reduce, invert_seq, Automorphism, Word};

/// A marked graph whose marking is pointed: closed paths at the basepoint,
/// compared exactly rather than up to conjugacy. Always stored in the cell
/// structure that is natural relative to the basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMarkedGraph(MarkedGraph);

impl PointedMarkedGraph {
    pub fn new(g: MarkedGraph) -> Result<PointedMarkedGraph> {
        Ok(PointedMarkedGraph(g.normalize_pointed()?))
    }

    pub fn rose(n: usize) -> PointedMarkedGraph {
        PointedMarkedGraph(MarkedGraph::rose(n))
    }

    pub fn inner(&self) -> &MarkedGraph {
        &self.0
    }

    pub fn into_inner(self) -> MarkedGraph {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.rank()
    }

    pub fn act(&self, phi: &Automorphism) -> Result<PointedMarkedGraph> {
        Ok(PointedMarkedGraph(self.0.act(phi)?))
    }

    /// Same vertex of autre espace.
    pub fn same_point(&self, other: &PointedMarkedGraph) -> bool {
        self.0.pointed_equal(&other.0).is_some()
    }
}

/// Attaches a loop at the basepoint carrying the new last letter.
pub fn embed_j(w: &PointedMarkedGraph) -> Result<PointedMarkedGraph> {
    let g = w.inner();
    let (graph, e) = g.graph().with_edge(g.base(), g.base());
    let mut marking = g.marking().to_vec();
    marking.push(vec![dir(e, true)]);
    PointedMarkedGraph::new(MarkedGraph::new(graph, g.base(), marking)?)
}

/// The pointed core before normalization, with the ambient edge under each
/// of its edges.
#[derive(Clone, Debug)]
pub struct RawRetraction {
    pub graph: MarkedGraph,
    pub labels: Vec<DirEdge>,
}

pub fn raw_retract(x: &MarkedGraph) -> Result<RawRetraction> {
    let n = x.rank();
    if n < 2 {
        return Err(Error::Precondition("retraction needs rank at least 2".into()));
    }
    let gens: Vec<Word> = (1..n as u32).map(Word::gen).collect();
    let k = stallings_core(&gens, x, true)?;
    let base = k.base().expect("based core");
    let q = k.core_vertex().expect("based core");
    let tail = k.tail().to_vec();
    let back = invert_seq(&tail);
    let (u, vmap, emap) = k.unbased_maps();
    let mut marking = Vec::with_capacity(gens.len());
    for w in &gens {
        let lifted = k
            .lift(base, &x.expand(w)?)
            .ok_or_else(|| Error::Invariant("generator does not lift to its own core".into()))?;
        let mut raw = back.clone();
        raw.extend(lifted);
        raw.extend_from_slice(&tail);
        let path = free_reduce(&raw)
            .into_iter()
            .map(|d| emap[edge_of(d)].map(|e| dir(e, is_forward(d))))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Invariant("conjugated loop runs along the tail".into()))?;
        marking.push(path);
    }
    let base = vmap[q].expect("core vertex survives trimming");
    Ok(RawRetraction { graph: MarkedGraph::new(u.graph().clone(), base, marking)?, labels: u.labels().to_vec() })
}

pub fn retract_r(x: &PointedMarkedGraph) -> Result<PointedMarkedGraph> {
    PointedMarkedGraph::new(raw_retract(x.inner())?.graph)
}

/// Outcome of comparing the retractions of the two ends of a collapse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutAudit {
    pub distance: usize,
    /// Edges of the unnormalized retraction of `x` collapsed to reach the
    /// retraction of the collapse.
    pub hull: Vec<usize>,
}

fn relative_kept(g: &MarkedGraph) -> Vec<bool> {
    let mut kept = g.graph().natural_kept();
    kept[g.base()] = true;
    kept
}

/// Checks that `forest` is a nonempty union of chains in the structure
/// natural relative to the basepoint, containing no cycle.
pub fn check_relative_forest(x: &MarkedGraph, forest: &[usize]) -> Result<()> {
    let chains = x.graph().chains(&relative_kept(x))?;
    let mut sorted = forest.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let covered: Vec<usize> = chains
        .iter()
        .filter(|c| c.iter().any(|d| sorted.binary_search(&edge_of(*d)).is_ok()))
        .flat_map(|c| c.iter().map(|&d| edge_of(d)))
        .collect();
    if sorted.is_empty() || covered.len() != sorted.len() || !x.graph().is_acyclic(&sorted) {
        return Err(Error::Precondition("forest is not a nonempty union of natural edges without cycles".into()));
    }
    Ok(())
}

/// Retracts both ends of the collapse of `x` along `forest` and checks that
/// the second retraction is the first collapsed along the natural hull of
/// the collapsed part of the core.
pub fn lipschitz_audit(x: &PointedMarkedGraph, forest: &[usize]) -> Result<AutAudit> {
    let g = x.inner();
    check_relative_forest(g, forest)?;
    let x2 = PointedMarkedGraph::new(g.collapse_marked(forest)?.0)?;
    let raw = raw_retract(g)?;
    let inside: Vec<bool> = raw.labels.iter().map(|&l| forest.contains(&edge_of(l))).collect();
    let chains = raw.graph.graph().chains(&relative_kept(&raw.graph))?;
    let mut hull: Vec<usize> = chains
        .iter()
        .filter(|c| c.iter().all(|&d| inside[edge_of(d)]))
        .flat_map(|c| c.iter().map(|&d| edge_of(d)))
        .collect();
    hull.sort_unstable();
    let predicted = if hull.is_empty() {
        PointedMarkedGraph::new(raw.graph)?
    } else {
        PointedMarkedGraph::new(raw.graph.collapse_marked(&hull)?.0)?
    };
    let actual = retract_r(&x2)?;
    if !predicted.same_point(&actual) {
        return Err(Error::Invariant("retraction of the collapse is not the collapse of the retraction".into()));
    }
    Ok(AutAudit { distance: usize::from(!hull.is_empty()), hull })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CoreGraph;
    use crate::word::Endo;

    fn auto(imgs: &[&str]) -> Automorphism {
        Automorphism::new(Endo::new(imgs.iter().map(|s| Word::parse(s).unwrap()).collect()).unwrap()).unwrap()
    }

    #[test]
    fn rose_round_trip() {
        for n in 1..4 {
            let w = PointedMarkedGraph::rose(n);
            let j = embed_j(&w).unwrap();
            assert!(j.same_point(&PointedMarkedGraph::rose(n + 1)));
            assert!(retract_r(&j).unwrap().same_point(&w));
        }
    }

    #[test]
    fn theta_round_trip() {
        let th = MarkedGraph::new(CoreGraph::theta(), 0, vec![vec![1, -2], vec![2, -3]]).unwrap();
        let w = PointedMarkedGraph::new(th).unwrap();
        let j = embed_j(&w).unwrap();
        assert_eq!(j.rank(), 3);
        assert!(retract_r(&j).unwrap().same_point(&w));
    }

    #[test]
    fn image_of_last_letter_is_ignored() {
        let x = PointedMarkedGraph::rose(3).act(&auto(&["a1", "a2", "a3 a1"])).unwrap();
        assert!(retract_r(&x).unwrap().same_point(&PointedMarkedGraph::rose(2)));
    }

    #[test]
    fn basepoint_on_core_of_valence_two() {
        let x = PointedMarkedGraph::rose(3).act(&auto(&["a2 a1 a2^-1", "a2 a3", "a3"])).unwrap();
        let r = retract_r(&x).unwrap();
        assert_eq!(r.rank(), 2);
        assert_eq!(r.inner().graph().nv(), 2);
        assert_eq!(r.inner().graph().valence(r.inner().base()), 2);
        assert_eq!(r.inner().marking()[0].len(), 3);
    }

    #[test]
    fn tail_conjugates_marking() {
        let x = PointedMarkedGraph::rose(3).act(&auto(&["a3 a1 a3^-1", "a3 a2 a3^-1", "a3"])).unwrap();
        let gens = [Word::gen(1), Word::gen(2)];
        let k = stallings_core(&gens, x.inner(), true).unwrap();
        assert_eq!(k.tail().len(), 1);
        assert!(retract_r(&x).unwrap().same_point(&PointedMarkedGraph::rose(2)));
    }

    #[test]
    fn equivariance_under_transvections() {
        let x = PointedMarkedGraph::rose(3).act(&auto(&["a1 a3", "a3^-1 a2", "a3"])).unwrap();
        let phi = auto(&["a1 a2", "a2", "a3"]);
        let phi_r = auto(&["a1 a2", "a2"]);
        let lhs = retract_r(&x.act(&phi).unwrap()).unwrap();
        let rhs = retract_r(&x).unwrap().act(&phi_r).unwrap();
        assert!(lhs.same_point(&rhs));
    }

    #[test]
    fn audit_on_embedded_collapse() {
        let th = MarkedGraph::new(CoreGraph::theta(), 0, vec![vec![1, -2], vec![2, -3]]).unwrap();
        let j = embed_j(&PointedMarkedGraph::new(th).unwrap()).unwrap();
        let e = (0..j.inner().graph().ne()).find(|&e| {
            let (o, t) = j.inner().graph().endpoints(e);
            o != t
        });
        let out = lipschitz_audit(&j, &[e.unwrap()]).unwrap();
        assert_eq!(out.distance, 1);
    }

    #[test]
    fn random_audits() {
        use crate::graph::enumerate_subforests_kept;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut audited = 0;
        while audited < 60 {
            let n = rng.gen_range(2..=3);
            let steps = rng.gen_range(1..=6);
            let x = PointedMarkedGraph::new(crate::sample::random_pointed_graph(&mut rng, n, steps).unwrap()).unwrap();
            let w =
                PointedMarkedGraph::new(crate::sample::random_pointed_graph(&mut rng, n - 1, steps).unwrap()).unwrap();
            assert!(retract_r(&embed_j(&w).unwrap()).unwrap().same_point(&w));
            let forests = enumerate_subforests_kept(x.inner().graph(), &relative_kept(x.inner()));
            for f in forests.iter().filter(|f| !f.is_empty()) {
                let out = lipschitz_audit(&x, f).unwrap();
                assert!(out.distance <= 1);
                audited += 1;
            }
        }
    }
}
