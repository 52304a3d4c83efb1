mod common;

use common::*;
use outspine::covers::{realizes, FreeFactorSystem};
use outspine::error::Error;
use outspine::graph::{enumerate_natural_subforests, enumerate_subforests_kept};
use outspine::marked::MarkedGraph;
use outspine::retract_aut::{embed_j, lipschitz_audit, retract_r, PointedMarkedGraph};
use outspine::retract_split::{
    coindex1_to_splitting, in_cvkt, retract_big_r, retraction_audit, RetractionData, SplittingBlueprint,
};
use outspine::sample::{random_blowup, random_collapse, random_pointed_graph};
use outspine::word::{Automorphism, Endo, Word};
use proptest::prelude::*;

fn pointed(seed: u64, n: usize, steps: usize) -> PointedMarkedGraph {
    PointedMarkedGraph::new(random_pointed_graph(&mut rng(seed), n, steps).unwrap()).unwrap()
}

/// `φ` on the first `n - 1` letters, fixing the last.
fn extend(phi: &Automorphism) -> Automorphism {
    let mut imgs = phi.map().images().to_vec();
    imgs.push(Word::gen(phi.rank() as u32 + 1));
    Automorphism::new(Endo::new(imgs).unwrap()).unwrap()
}

fn loop_blueprint() -> SplittingBlueprint {
    SplittingBlueprint::new_loop(vec![w("a1"), w("a2")], w("a3")).unwrap()
}

fn walk_in_subcomplex(seed: u64, bp: &SplittingBlueprint, steps: usize) -> MarkedGraph {
    let mut r = rng(seed);
    let data = RetractionData::with_default_rays(bp.clone()).unwrap();
    let mut v = retract_big_r(&MarkedGraph::rose(bp.rank()), &data).unwrap();
    assert!(in_cvkt(&v, bp).unwrap().is_some());
    for i in 0..steps {
        let u =
            if i % 2 == 0 { random_blowup(&mut r, &v) } else { random_collapse(&mut r, &v, &v.graph().natural_kept()) }
                .unwrap()
                .normalize()
                .unwrap();
        if in_cvkt(&u, bp).unwrap().is_some() {
            v = u;
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn r_after_j_is_identity(seed in any::<u64>(), n in 1usize..=3, steps in 0usize..=6) {
        let x = pointed(seed, n, steps);
        prop_assert!(retract_r(&embed_j(&x).unwrap()).unwrap().same_point(&x));
    }

    #[test]
    fn r_is_equivariant(seed in any::<u64>(), n in 2usize..=3, steps in 0usize..=6, len in 0usize..=4) {
        let x = pointed(seed, n, steps);
        let phi = automorphism(seed.rotate_left(7), n - 1, len);
        let lhs = retract_r(&x.act(&extend(&phi)).unwrap()).unwrap();
        let rhs = retract_r(&x).unwrap().act(&phi).unwrap();
        prop_assert!(lhs.same_point(&rhs));
    }

    #[test]
    fn r_moves_collapses_at_most_one(seed in any::<u64>(), n in 2usize..=3, steps in 1usize..=6, pick in any::<prop::sample::Index>()) {
        let x = pointed(seed, n, steps);
        let mut kept = x.inner().graph().natural_kept();
        kept[x.inner().base()] = true;
        let forests: Vec<Vec<usize>> =
            enumerate_subforests_kept(x.inner().graph(), &kept).into_iter().filter(|f| !f.is_empty()).collect();
        prop_assume!(!forests.is_empty());
        prop_assert!(lipschitz_audit(&x, pick.get(&forests)).unwrap().distance <= 1);
    }

    #[test]
    fn subcomplex_members_realize_the_vertex_system(seed in any::<u64>(), steps in 0usize..=6) {
        let bp = loop_blueprint();
        let v = walk_in_subcomplex(seed, &bp, steps);
        prop_assert!(realizes(&v, &bp.vertex_system().unwrap()).unwrap().is_some());
        prop_assert!(retract_big_r(&v, &RetractionData::with_default_rays(bp).unwrap()).unwrap().equivalent(&v).is_some());
    }

    #[test]
    fn big_r_lands_in_the_subcomplex(seed in any::<u64>(), steps in 0usize..=6) {
        let bp = loop_blueprint();
        let data = RetractionData::with_default_rays(bp.clone()).unwrap();
        let g = spine_vertex(seed, 3, steps);
        match retract_big_r(&g, &data) {
            Ok(r) => prop_assert!(in_cvkt(&r, &bp).unwrap().is_some()),
            Err(Error::RayInVertexGroup) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn big_r_moves_collapses_at_most_one(seed in any::<u64>(), steps in 1usize..=6, pick in any::<prop::sample::Index>()) {
        let data = RetractionData::with_default_rays(loop_blueprint()).unwrap();
        let g = spine_vertex(seed, 3, steps);
        let forests: Vec<Vec<usize>> =
            enumerate_natural_subforests(g.graph()).into_iter().filter(|f| !f.is_empty()).collect();
        prop_assume!(!forests.is_empty());
        match retraction_audit(&g, pick.get(&forests), &data) {
            Ok(d) => prop_assert!(d <= 1),
            Err(Error::RayInVertexGroup) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

#[test]
fn segment_splitting_fixes_its_subcomplex() {
    let bp = SplittingBlueprint::new_segment(vec![w("a1")], vec![w("a2"), w("a3")]).unwrap();
    let data = RetractionData::with_default_rays(bp.clone()).unwrap();
    for seed in 0..40 {
        let v = walk_in_subcomplex(seed, &bp, 5);
        assert!(in_cvkt(&v, &bp).unwrap().is_some());
        assert!(retract_big_r(&v, &data).unwrap().equivalent(&v).is_some());
    }
}

#[test]
fn coindex_one_systems_become_splittings() {
    let f = FreeFactorSystem::new(3, vec![vec![w("a1"), w("a2")]]).unwrap();
    let bp = coindex1_to_splitting(&f).unwrap();
    assert!(bp.is_loop());
    let f = FreeFactorSystem::new(3, vec![vec![w("a1")], vec![w("a1 a2 a1^-1"), w("a1 a3 a1^-1")]]).unwrap();
    let bp = coindex1_to_splitting(&f).unwrap();
    assert!(!bp.is_loop());
    assert_eq!(bp.rank(), 3);
    let f = FreeFactorSystem::new(3, vec![vec![w("a1")]]).unwrap();
    assert!(coindex1_to_splitting(&f).is_err());
}

#[test]
fn rank_mismatch_is_rejected() {
    assert!(matches!(in_cvkt(&MarkedGraph::rose(2), &loop_blueprint()), Err(Error::RankMismatch { .. })));
}
