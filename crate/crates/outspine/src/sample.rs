//! Random walks in the spine used by the audits.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::graph::{enumerate_blowups, enumerate_subforests_kept, CoreGraph, DirEdge};
use crate::marked::MarkedGraph;
use crate::nielsen::product;
use crate::nielsen::random_word;

/// Blow-up of the vertex structure chosen at random, with the marking
/// lifted. Returns the input if no blow-up exists.
pub fn random_blowup<R: Rng>(rng: &mut R, g: &MarkedGraph) -> Result<MarkedGraph> {
    let ups = enumerate_blowups(g.graph());
    let Some(b) = ups.choose(rng) else {
        return Ok(g.clone());
    };
    let marking = g.marking().iter().map(|p| b.lift_path(p)).collect();
    MarkedGraph::new(b.graph.clone(), g.base(), marking)
}

/// Collapse of a random nonempty forest made of whole chains relative to
/// `kept`, or the input if there is none.
pub fn random_collapse<R: Rng>(rng: &mut R, g: &MarkedGraph, kept: &[bool]) -> Result<MarkedGraph> {
    let forests: Vec<Vec<usize>> =
        enumerate_subforests_kept(g.graph(), kept).into_iter().filter(|f| !f.is_empty()).collect();
    let Some(f) = forests.choose(rng) else {
        return Ok(g.clone());
    };
    Ok(g.collapse_marked(f)?.0)
}

/// Subdivides edge `e` and moves the basepoint to the new midpoint.
pub fn subdivide_to_base(g: &MarkedGraph, e: usize) -> Result<MarkedGraph> {
    let gr = g.graph();
    let (o, t) = gr.endpoints(e);
    let m = gr.nv();
    let mut edges = gr.edges().to_vec();
    edges[e] = (o, m);
    edges.push((m, t));
    let f = gr.ne() as DirEdge + 1;
    let fwd = e as DirEdge + 1;
    let split = |p: &[DirEdge]| -> Vec<DirEdge> {
        p.iter()
            .flat_map(|&d| {
                if d == fwd {
                    vec![d, f]
                } else if d == -fwd {
                    vec![-f, d]
                } else {
                    vec![d]
                }
            })
            .collect()
    };
    let graph = CoreGraph::new(m + 1, edges)?;
    let marking = g.marking().iter().map(|p| split(p)).collect();
    let sub = MarkedGraph::new(graph.clone(), g.base(), marking)?;
    let tree = graph.spanning_tree(g.base());
    let mut path = graph.tree_path(&tree, g.base(), o);
    path.push(fwd);
    Ok(sub.rebased(m, &crate::word::free_reduce(&path)))
}

/// Random walk of `steps` moves from the rose: Nielsen moves, blow-ups and
/// natural collapses. The result is in natural form.
pub fn random_spine_vertex<R: Rng>(rng: &mut R, n: usize, steps: usize) -> Result<MarkedGraph> {
    let mut g = MarkedGraph::rose(n);
    for _ in 0..steps {
        g = match rng.gen_range(0..3) {
            0 => g.act(&product(n, &random_word(rng, n, 1))?)?,
            1 => random_blowup(rng, &g)?,
            _ => {
                let kept = g.graph().natural_kept();
                random_collapse(rng, &g, &kept)?
            }
        };
        g = g.normalize()?;
    }
    Ok(g)
}

/// Random walk among pointed marked graphs, in structure natural relative
/// to the basepoint.
pub fn random_pointed_graph<R: Rng>(rng: &mut R, n: usize, steps: usize) -> Result<MarkedGraph> {
    let mut g = MarkedGraph::rose(n);
    for _ in 0..steps {
        g = match rng.gen_range(0..4) {
            0 => g.act(&product(n, &random_word(rng, n, 1))?)?,
            1 => random_blowup(rng, &g)?,
            2 => {
                let mut kept = g.graph().natural_kept();
                kept[g.base()] = true;
                random_collapse(rng, &g, &kept)?
            }
            _ => {
                let e = rng.gen_range(0..g.graph().ne());
                subdivide_to_base(&g, e)?
            }
        };
        g = g.normalize_pointed()?;
    }
    Ok(g)
}
