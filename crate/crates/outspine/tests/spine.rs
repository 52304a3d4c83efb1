mod common;

use common::*;
use outspine::covers::{realizes, FreeFactorSystem};
use outspine::marked::MarkedGraph;
use outspine::sample::{random_blowup, random_collapse};
use outspine::spine::{bfs_distance, fold_path, neighbors, VertexSet};
use proptest::prelude::*;

const CAP: usize = 6;

fn walk_realizing(seed: u64, f: &FreeFactorSystem, steps: usize) -> MarkedGraph {
    let mut r = rng(seed);
    let mut v = MarkedGraph::rose(f.rank());
    for i in 0..steps {
        let u =
            if i % 2 == 0 { random_blowup(&mut r, &v) } else { random_collapse(&mut r, &v, &v.graph().natural_kept()) }
                .unwrap()
                .normalize()
                .unwrap();
        let u = u.act(&automorphism(seed ^ i as u64, f.rank(), 0)).unwrap();
        if realizes(&u, f).unwrap().is_some() {
            v = u;
        }
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bfs_is_a_metric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (x, y, z) = (spine_vertex(s1, 2, 3), spine_vertex(s2, 2, 3), spine_vertex(s3, 2, 3));
        let dxy = bfs_distance(&x, &y, CAP).unwrap();
        prop_assert_eq!(dxy, bfs_distance(&y, &x, CAP).unwrap());
        prop_assert_eq!(bfs_distance(&x, &x, CAP).unwrap(), Some(0));
        if let (Some(a), Some(b), Some(c)) = (dxy, bfs_distance(&y, &z, CAP).unwrap(), bfs_distance(&x, &z, CAP).unwrap()) {
            prop_assert!(c <= a + b);
        }
    }

    #[test]
    fn action_is_an_isometry(s1 in any::<u64>(), s2 in any::<u64>(), len in 0usize..=4) {
        let (x, y) = (spine_vertex(s1, 2, 3), spine_vertex(s2, 2, 3));
        let psi = automorphism(s1 ^ s2, 2, len);
        prop_assert_eq!(
            bfs_distance(&x, &y, CAP).unwrap(),
            bfs_distance(&x.act(&psi).unwrap(), &y.act(&psi).unwrap(), CAP).unwrap()
        );
    }

    #[test]
    fn fold_paths_are_valid(s1 in any::<u64>(), s2 in any::<u64>(), n in 2usize..=3) {
        let (x, y) = (spine_vertex(s1, n, 4), spine_vertex(s2, n, 4));
        let p = fold_path(&x, &y, None).unwrap().path;
        prop_assert!(p.verify());
        prop_assert!(p.vertices[0].equivalent(&x.normalize().unwrap()).is_some());
        prop_assert!(p.vertices.last().unwrap().equivalent(&y.normalize().unwrap()).is_some());
        if n == 2 {
            if let Some(d) = bfs_distance(&x, &y, CAP).unwrap() {
                prop_assert!(p.len() >= d);
            }
        }
    }

    #[test]
    fn guarded_fold_paths_stay_in_the_subcomplex(s1 in any::<u64>(), s2 in any::<u64>(), two in any::<bool>()) {
        let gens = if two { vec![w("a1"), w("a2")] } else { vec![w("a1")] };
        let f = FreeFactorSystem::new(3, vec![gens]).unwrap();
        let (x, y) = (walk_realizing(s1, &f, 6), walk_realizing(s2, &f, 6));
        let fp = fold_path(&x, &y, Some(&f)).unwrap();
        prop_assert!(fp.path.verify());
        prop_assert_eq!(fp.guarded, Some(true));
    }
}

#[test]
fn rank_two_ball_sizes() {
    let mut seen = VertexSet::new();
    let (start, _) = seen.insert(MarkedGraph::rose(2).normalize().unwrap());
    assert_eq!(start, 0);
    let mut frontier = vec![MarkedGraph::rose(2)];
    let mut sizes = vec![1];
    for _ in 0..2 {
        let mut next = Vec::new();
        for v in &frontier {
            for u in neighbors(v).unwrap() {
                if seen.insert(u.clone()).1 {
                    next.push(u);
                }
            }
        }
        sizes.push(seen.len());
        frontier = next;
    }
    assert_eq!(sizes[1], 4);
    assert!(sizes[2] > sizes[1]);
}

#[test]
fn fold_path_between_equal_points_is_empty() {
    let x = spine_vertex(5, 3, 4);
    let psi = automorphism(9, 3, 0);
    assert!(fold_path(&x, &x.act(&psi).unwrap(), None).unwrap().path.is_empty());
}
