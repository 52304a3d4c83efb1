mod common;

use std::collections::VecDeque;

use common::*;
use outspine::covers::{
    minimal_subtree_collapse_check, realizes, stallings_core, subgroups_conjugate, FreeFactorSystem,
};
use outspine::graph::{edge_of, enumerate_natural_subforests, is_isomorphic, DirEdge};
use outspine::marked::{pi1_words, MarkedGraph};
use outspine::word::{Automorphism, Endo, Word};
use proptest::prelude::*;

/// Loops generating the fundamental group of the component of `edges`
/// containing `start`, read as words in the marking.
fn component_words(g: &MarkedGraph, edges: &[usize], start: usize, seen: &mut [bool]) -> Vec<Word> {
    let gr = g.graph();
    let mut path_to: Vec<Option<Vec<DirEdge>>> = vec![None; gr.nv()];
    path_to[start] = Some(Vec::new());
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut tree = Vec::new();
    while let Some(v) = queue.pop_front() {
        for d in gr.directions_at(v) {
            if !edges.contains(&edge_of(d)) {
                continue;
            }
            let t = gr.terminus(d);
            if path_to[t].is_none() {
                let mut p = path_to[v].clone().unwrap();
                p.push(d);
                path_to[t] = Some(p);
                seen[t] = true;
                tree.push(edge_of(d));
                queue.push_back(t);
            }
        }
    }
    let marking: Vec<Word> = pi1_words(gr, g.base(), g.marking());
    let to_fn = Automorphism::new(Endo::new(marking).unwrap()).unwrap().inverse();
    let mut out = Vec::new();
    for &e in edges {
        let (o, t) = gr.endpoints(e);
        if tree.contains(&e) || path_to[o].is_none() {
            continue;
        }
        let mut lp = path_to[o].clone().unwrap();
        lp.push(e as DirEdge + 1);
        lp.extend(path_to[t].clone().unwrap().iter().rev().map(|d| -d));
        let x = pi1_words(gr, g.base(), &[lp]).remove(0);
        out.push(to_fn.apply(&x).unwrap());
    }
    out
}

/// Scans every edge subset for one whose nontrivial components carry the
/// components of `f` bijectively.
fn brute_realizes(g: &MarkedGraph, f: &FreeFactorSystem) -> bool {
    let rose = MarkedGraph::rose(g.rank());
    let targets: Vec<_> = f.components().iter().map(|c| stallings_core(c, &rose, false).unwrap()).collect();
    let ne = g.graph().ne();
    (1u32..(1 << ne)).any(|mask| {
        let edges: Vec<usize> = (0..ne).filter(|e| mask >> e & 1 == 1).collect();
        let mut seen = vec![false; g.graph().nv()];
        let mut comps = Vec::new();
        for &e in &edges {
            let v = g.graph().endpoints(e).0;
            if !seen[v] {
                let words = component_words(g, &edges, v, &mut seen);
                if words.is_empty() {
                    continue;
                }
                comps.push(stallings_core(&words, &rose, false).unwrap());
            }
        }
        if comps.len() != targets.len() {
            return false;
        }
        let mut used = vec![false; comps.len()];
        targets.iter().all(|t| match (0..comps.len()).find(|&i| !used[i] && subgroups_conjugate(&comps[i], t)) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        })
    })
}

fn systems3() -> Vec<FreeFactorSystem> {
    let sys = |cs: &[&[&str]]| {
        FreeFactorSystem::new(3, cs.iter().map(|c| c.iter().map(|s| w(s)).collect()).collect()).unwrap()
    };
    vec![
        sys(&[&["a1"]]),
        sys(&[&["a1 a2"]]),
        sys(&[&["a1", "a2"]]),
        sys(&[&["a1"], &["a2"]]),
        sys(&[&["a2 a3"], &["a1"]]),
        sys(&[&["a1", "a2 a3 a2^-1"]]),
        sys(&[&["a3"]]),
        sys(&[&["a1"], &["a2"], &["a3"]]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn realizes_agrees_with_subset_scan(seed in any::<u64>(), steps in 0usize..6) {
        let g = spine_vertex(seed, 3, steps);
        for f in systems3() {
            let found = realizes(&g, &f).unwrap();
            prop_assert_eq!(found.is_some(), brute_realizes(&g, &f), "{:?}", f.components());
        }
    }

    #[test]
    fn full_basis_core_is_the_graph(seed in any::<u64>(), steps in 0usize..6) {
        let g = spine_vertex(seed, 3, steps);
        let gens: Vec<Word> = (1..=3).map(Word::gen).collect();
        let k = stallings_core(&gens, &g, false).unwrap();
        prop_assert!(is_isomorphic(k.graph(), g.graph()));
        let mut labels: Vec<usize> = k.labels().iter().map(|&l| edge_of(l)).collect();
        labels.sort_unstable();
        prop_assert_eq!(labels, (0..g.graph().ne()).collect::<Vec<_>>());
    }

    #[test]
    fn core_rank_matches_free_factor_rank(seed in any::<u64>(), len in 0usize..5, size in 1usize..=3, extra in any::<bool>()) {
        let phi = automorphism(seed, 3, len);
        let mut gens: Vec<Word> = (1..=size).map(|i| phi.apply(&Word::gen(i as u32)).unwrap()).collect();
        if extra && size >= 2 {
            gens.push(gens[0].mul(&gens[1]));
        }
        let g = spine_vertex(seed ^ 3, 3, 3);
        let k = stallings_core(&gens, &g, false).unwrap();
        prop_assert_eq!(k.rank(), size);
        prop_assert_eq!(k.graph().ne() + 1, k.graph().nv() + size);
    }

    #[test]
    fn core_of_collapse_is_collapse_of_core(seed in any::<u64>(), n in 2usize..=3, pick in any::<prop::sample::Index>(), gens in prop::collection::vec(nonempty_word(2, 4), 1..=2)) {
        let g = spine_vertex(seed, n, 4);
        let forests = enumerate_natural_subforests(g.graph());
        prop_assert!(minimal_subtree_collapse_check(&g, pick.get(&forests), &gens).unwrap());
    }
}

/// Whether every component of `g` not equal to a component of `f` is cyclic.
fn adds_only_cyclic(f: &FreeFactorSystem, g: &FreeFactorSystem) -> bool {
    let rose = MarkedGraph::rose(f.rank());
    let fc: Vec<_> = f.components().iter().map(|c| stallings_core(c, &rose, false).unwrap()).collect();
    g.components().iter().all(|c| {
        let k = stallings_core(c, &rose, false).unwrap();
        k.rank() == 1 || fc.iter().any(|x| subgroups_conjugate(x, &k))
    })
}

#[test]
fn coindex_is_monotone() {
    let systems = systems3();
    let mut strict = 0;
    for f in &systems {
        for g in &systems {
            if f.below(g).unwrap() {
                let (cf, cg) = (f.coindex().unwrap(), g.coindex().unwrap());
                assert!(cg <= cf, "{:?} below {:?}", f.components(), g.components());
                // Cyclic components have Euler characteristic zero, so adding
                // them leaves the coindex unchanged.
                assert_eq!(cg == cf, adds_only_cyclic(f, g), "{:?} vs {:?}", f.components(), g.components());
                if g.below(f).unwrap() {
                    assert_eq!(cg, cf);
                } else if cg < cf {
                    strict += 1;
                }
            }
        }
    }
    assert!(strict > 0);
}

#[test]
fn coindex_values() {
    let c: Vec<usize> = systems3().iter().map(|f| f.coindex().unwrap()).collect();
    assert_eq!(c, vec![2, 2, 1, 2, 2, 1, 2, 2]);
}
