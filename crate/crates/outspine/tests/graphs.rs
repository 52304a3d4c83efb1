mod common;

use common::*;
use outspine::graph::{collapse, enumerate_blowups, enumerate_natural_subforests, is_isomorphic};
use outspine::marked::MarkedGraph;
use outspine::nielsen::{all_letters, product};
use outspine::word::{Automorphism, CyclicWord, Endo, Word};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collapse_preserves_betti(seed in any::<u64>(), n in 2usize..=3, steps in 1usize..6, pick in any::<prop::sample::Index>()) {
        let g = spine_vertex(seed, n, steps);
        let forests = enumerate_natural_subforests(g.graph());
        let f = pick.get(&forests);
        let c = collapse(g.graph(), f).unwrap();
        prop_assert_eq!(c.target.betti(), g.graph().betti());
        for e in 0..g.graph().ne() {
            prop_assert_eq!(c.edge_map[e].is_none(), f.contains(&e));
        }
        for (e, &(o, t)) in g.graph().edges().iter().enumerate() {
            match c.edge_map[e] {
                Some(ne) => prop_assert_eq!(c.target.endpoints(ne), (c.vertex_map[o], c.vertex_map[t])),
                None => prop_assert_eq!(c.vertex_map[o], c.vertex_map[t]),
            }
        }
    }

    #[test]
    fn blowups_collapse_back(seed in any::<u64>(), n in 2usize..=3, steps in 0usize..4) {
        let g = spine_vertex(seed, n, steps);
        for b in enumerate_blowups(g.graph()) {
            let c = collapse(&b.graph, &b.forest()).unwrap();
            prop_assert!(is_isomorphic(&c.target, g.graph()));
            for p in g.marking() {
                let lifted = b.lift_path(p);
                prop_assert!(b.graph.path_is_valid(&lifted));
                let (back, _) = c.push_path(&lifted).unwrap();
                prop_assert_eq!(back.len(), p.len());
            }
        }
    }

    #[test]
    fn action_is_a_right_action(seed in any::<u64>(), a in 0usize..4, b in 0usize..4) {
        let g = spine_vertex(seed, 3, 3);
        let phi = automorphism(seed ^ 1, 3, a);
        let psi = automorphism(seed ^ 2, 3, b);
        let lhs = g.act(&phi.then_after(&psi).unwrap()).unwrap();
        let rhs = g.act(&phi).unwrap().act(&psi).unwrap();
        prop_assert!(lhs.equivalent(&rhs).is_some());
    }

    #[test]
    fn equivalence_is_an_equivalence(seed in any::<u64>(), steps in 0usize..5, v in any::<prop::sample::Index>()) {
        let g = spine_vertex(seed, 3, steps);
        let gr = g.graph();
        let to = v.index(gr.nv());
        let tree = gr.spanning_tree(g.base());
        let h = g.rebased(to, &gr.tree_path(&tree, g.base(), to));
        let k = h.normalize().unwrap();
        prop_assert!(g.equivalent(&g).is_some());
        prop_assert!(g.equivalent(&h).is_some() && h.equivalent(&g).is_some());
        prop_assert!(h.equivalent(&k).is_some() && g.equivalent(&k).is_some());
        let other = g.act(&automorphism(seed ^ 7, 3, 2)).unwrap();
        prop_assert_eq!(g.equivalent(&other).is_some(), other.equivalent(&g).is_some());
        prop_assert_eq!(k.equivalent(&other).is_some(), g.equivalent(&other).is_some());
    }

    #[test]
    fn circuit_ignores_representative(seed in any::<u64>(), c in nonempty_word(3, 8), h in word(3, 4)) {
        let g = spine_vertex(seed, 3, 3);
        let x = CyclicWord::of(&c).unwrap();
        let y = CyclicWord::of(&c.conj(&h)).unwrap();
        prop_assert_eq!(g.circuit_of(&x).unwrap(), g.circuit_of(&y).unwrap());
    }
}

fn signed_permutations(n: usize) -> Vec<Automorphism> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (1..=n).collect();
    permute(&mut perm, 0, &mut |p| {
        for signs in 0..(1u32 << n) {
            let images = p
                .iter()
                .enumerate()
                .map(|(i, &j)| if signs >> i & 1 == 1 { Word::gen(j as u32).inverse() } else { Word::gen(j as u32) })
                .collect();
            out.push(Automorphism::new(Endo::new(images).unwrap()).unwrap());
        }
    });
    out
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

#[test]
fn rose_symmetries_are_signed_permutations() {
    let r = MarkedGraph::rose(3);
    for s in signed_permutations(3) {
        assert!(r.act(&s).unwrap().equivalent(&r).is_some());
    }
    for l in all_letters(3) {
        let phi = product(3, &[l]).unwrap();
        let is_perm = phi.map().images().iter().all(|w| w.len() == 1);
        assert_eq!(r.act(&phi).unwrap().equivalent(&r).is_some(), is_perm, "{}", phi.map());
    }
}

#[test]
fn rose_blowup_count() {
    let g = MarkedGraph::rose(3);
    assert_eq!(enumerate_blowups(g.graph()).len(), 25);
    assert_eq!(enumerate_blowups(MarkedGraph::rose(2).graph()).len(), 3);
}
