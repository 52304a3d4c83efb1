//! The acceptance suite: ten checks, each reported as one PASS/FAIL line.
//! Shared by the `selftest` subcommand and the acceptance test target.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counting::{count_i, lipschitz_audit as count_audit};
use crate::covers::{minimal_subtree_collapse_check, realizes, FreeFactorSystem};
use crate::error::{Error, Result};
use crate::graph::enumerate_subforests_kept;
use crate::marked::MarkedGraph;
use crate::nielsen::{product, random_word};
use crate::retract_aut::{embed_j, lipschitz_audit as aut_audit, retract_r, PointedMarkedGraph};
use crate::retract_split::{in_cvkt, retract_big_r, retraction_audit, RetractionData, SplittingBlueprint};
use crate::sample::{random_blowup, random_collapse, random_pointed_graph, random_spine_vertex};
use crate::spine::{bfs_distance, fold_path, Certificate};
use crate::witness::{cancellation_events, near_golden, occurrence_count, Witness, WitnessCase, WitnessParams};
use crate::word::{CyclicWord, Letter, Word};

/// Sample sizes and tolerances, pinned.
pub const COUNT_BRACKET_SAMPLES: usize = 500;
pub const CORE_COLLAPSE_SAMPLES: usize = 200;
pub const RJ_SAMPLES: usize = 200;
pub const AUT_AUDIT_SAMPLES: usize = 300;
pub const SPLIT_FIXED_SAMPLES: usize = 100;
pub const SPLIT_AUDIT_SAMPLES: usize = 300;
pub const FOLD_SAMPLES: usize = 100;
pub const GOLDEN_K: usize = 20;
pub const GAP_COUNT_K: usize = 16;
pub const GOLDEN_EPS_DENOM: u32 = 1000;
pub const GAP_K_STAR_MAX: usize = 12;
pub const BFS_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

type Outcome = std::result::Result<String, String>;

fn lift(r: Result<String>) -> Outcome {
    r.map_err(|e| format!("error: {e}"))
}

pub const NAMES: [&str; 10] = [
    "counting identity",
    "baseline counts",
    "count bracket under collapse",
    "core of collapse",
    "automorphism retraction",
    "splitting retraction",
    "distortion gap",
    "witness stabilization",
    "fold paths",
    "train track positivity",
];

/// Runs criterion `id` (1-based) with the given seed.
pub fn run(id: usize, seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let outcome = match id {
        1 => lift(counting_identity()),
        2 => lift(baseline_counts()),
        3 => lift(count_bracket(&mut rng)),
        4 => lift(core_of_collapse(&mut rng)),
        5 => lift(aut_retraction(&mut rng)),
        6 => lift(split_retraction(&mut rng)),
        7 => lift(distortion_gap()),
        8 => lift(stabilization()),
        9 => lift(fold_paths(&mut rng)),
        10 => lift(positivity()),
        _ => Err(format!("no criterion {id}")),
    };
    let name = NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown");
    match outcome {
        Ok(detail) => CriterionResult { id, name, pass: true, detail },
        Err(detail) => CriterionResult { id, name, pass: false, detail },
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=NAMES.len()).map(|id| run(id, seed)).collect()
}

fn fail(msg: String) -> Error {
    Error::Invariant(msg)
}

fn case1() -> Result<Witness> {
    Witness::new(WitnessParams { n: 3, case: WitnessCase::Connected { r: 1 } })
}

fn case2() -> Result<Witness> {
    Witness::new(WitnessParams { n: 4, case: WitnessCase::TwoComponent { r0: 1, r1: 1 } })
}

fn case3() -> Result<Witness> {
    Witness::new(WitnessParams { n: 5, case: WitnessCase::MultiComponent { r0: 1, r1: 1, extra: vec![1] } })
}

fn counting_identity() -> Result<String> {
    const EXPECTED: [usize; 11] = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55];
    let w = case1()?;
    let ctx = w.context()?;
    for (k, &e) in EXPECTED.iter().enumerate() {
        let got = w.i_k(&ctx, k)?;
        let oracle = occurrence_count(2, 2, k);
        if got != e || BigUint::from(got) != oracle {
            return Err(fail(format!("k={k}: count {got}, matrix {oracle}, expected {e}")));
        }
    }
    Ok(format!("i_k for k=0..10 = {EXPECTED:?}, matching matrix powers"))
}

fn baseline_counts() -> Result<String> {
    let w1 = case1()?;
    let v1 = count_i(&w1.context()?, &w1.c0)?.value;
    let w2 = case2()?;
    let v2 = count_i(&w2.context()?, &w2.c0)?.value;
    if v1 != 0 || v2 != 2 {
        return Err(fail(format!("case 1 gives {v1} (want 0), case 2 gives {v2} (want 2)")));
    }
    Ok("case 1: 0, case 2: 2".into())
}

fn random_class<R: Rng>(rng: &mut R, n: usize) -> Option<CyclicWord> {
    let len = rng.gen_range(2..=12);
    let raw: Vec<Letter> = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..=n as Letter);
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        })
        .collect();
    CyclicWord::of(&Word::reduce(&raw)).ok()
}

/// One step of a random walk that stays inside the subcomplex realizing `f`.
fn walk_step<R: Rng>(rng: &mut R, g: &MarkedGraph, f: &FreeFactorSystem) -> Result<MarkedGraph> {
    let n = g.rank();
    let next = match rng.gen_range(0..3) {
        0 => g.act(&product(n, &random_word(rng, n, 1))?)?,
        1 => random_blowup(rng, g)?,
        _ => random_collapse(rng, g, &g.graph().natural_kept())?,
    }
    .normalize()?;
    Ok(if realizes(&next, f)?.is_some() { next } else { g.clone() })
}

fn count_bracket(rng: &mut ChaCha8Rng) -> Result<String> {
    let witnesses = [
        case1()?,
        Witness::new(WitnessParams { n: 4, case: WitnessCase::Connected { r: 1 } })?,
        Witness::new(WitnessParams { n: 4, case: WitnessCase::Connected { r: 2 } })?,
        case2()?,
    ];
    let mut done = 0;
    let mut lipschitz_only = 0;
    let mut attempts = 0;
    while done < COUNT_BRACKET_SAMPLES {
        attempts += 1;
        if attempts > 50 * COUNT_BRACKET_SAMPLES {
            return Err(fail(format!("only {done} usable instances")));
        }
        let w = witnesses.choose(rng).unwrap();
        let mut g = w.g0.clone();
        for _ in 0..rng.gen_range(0..8) {
            g = walk_step(rng, &g, &w.system)?;
        }
        let forests: Vec<Vec<usize>> = enumerate_subforests_kept(g.graph(), &g.graph().natural_kept())
            .into_iter()
            .filter(|f| !f.is_empty())
            .collect();
        let Some(forest) = forests.choose(rng) else {
            continue;
        };
        let Some(c) = random_class(rng, g.rank()) else {
            continue;
        };
        match count_audit(&w.a, &w.b, &g, forest, &c) {
            Ok((before, after)) => {
                if before.abs_diff(after) > 2 {
                    return Err(fail(format!("{c}: {before} -> {after} on\n{}", crate::format::print_marked(&g))));
                }
                if after < before {
                    lipschitz_only += 1;
                }
                done += 1;
            }
            Err(Error::ConjugateIntoB) | Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if lipschitz_only > 0 {
        return Err(fail(format!(
            "{done} instances within 2 of each other, but {lipschitz_only} collapses decreased the count"
        )));
    }
    Ok(format!("{done} instances, i(G) <= i(G') <= i(G)+2 throughout"))
}

fn random_subgroup<R: Rng>(rng: &mut R, n: usize) -> Vec<Word> {
    loop {
        let k = rng.gen_range(1..=2);
        let gens: Vec<Word> = (0..k)
            .map(|_| {
                let len = rng.gen_range(1..=4);
                let raw: Vec<Letter> = (0..len)
                    .map(|_| {
                        let i = rng.gen_range(1..=n as Letter);
                        if rng.gen_bool(0.5) {
                            i
                        } else {
                            -i
                        }
                    })
                    .collect();
                Word::reduce(&raw)
            })
            .filter(|w| !w.is_empty())
            .collect();
        if !gens.is_empty() {
            return gens;
        }
    }
}

fn core_of_collapse(rng: &mut ChaCha8Rng) -> Result<String> {
    let mut done = 0;
    while done < CORE_COLLAPSE_SAMPLES {
        let n = rng.gen_range(2..=4);
        let g = {
            let s = rng.gen_range(1..=6);
            random_spine_vertex(rng, n, s)
        }?;
        let forests: Vec<Vec<usize>> = enumerate_subforests_kept(g.graph(), &g.graph().natural_kept())
            .into_iter()
            .filter(|f| !f.is_empty())
            .collect();
        let Some(forest) = forests.choose(rng) else {
            continue;
        };
        let gens = random_subgroup(rng, n);
        if !minimal_subtree_collapse_check(&g, forest, &gens)? {
            return Err(fail(format!("mismatch for {gens:?} on\n{}", crate::format::print_marked(&g))));
        }
        done += 1;
    }
    Ok(format!("{done} labelled isomorphisms"))
}

fn aut_retraction(rng: &mut ChaCha8Rng) -> Result<String> {
    for i in 0..RJ_SAMPLES {
        let n = rng.gen_range(1..=2);
        let w = PointedMarkedGraph::new({
            let s = rng.gen_range(0..=6);
            random_pointed_graph(rng, n, s)
        }?)?;
        if !retract_r(&embed_j(&w)?)?.same_point(&w) {
            return Err(fail(format!("r(j(w)) != w at sample {i}:\n{}", crate::format::print_marked(w.inner()))));
        }
    }
    let mut audited = 0;
    let mut moved = 0;
    while audited < AUT_AUDIT_SAMPLES {
        let n = rng.gen_range(2..=3);
        let x = PointedMarkedGraph::new({
            let s = rng.gen_range(1..=6);
            random_pointed_graph(rng, n, s)
        }?)?;
        let mut kept = x.inner().graph().natural_kept();
        kept[x.inner().base()] = true;
        let forests: Vec<Vec<usize>> =
            enumerate_subforests_kept(x.inner().graph(), &kept).into_iter().filter(|f| !f.is_empty()).collect();
        let Some(f) = forests.choose(rng) else {
            continue;
        };
        let out = aut_audit(&x, f)?;
        if out.distance > 1 {
            return Err(fail(format!("distance {}", out.distance)));
        }
        moved += out.distance;
        audited += 1;
    }
    Ok(format!("{RJ_SAMPLES} r∘j checks; {audited} audits, {moved} at distance 1"))
}

fn split_retraction(rng: &mut ChaCha8Rng) -> Result<String> {
    let bp = SplittingBlueprint::new_loop(vec![Word::gen(1), Word::gen(2)], Word::gen(3))?;
    let data = RetractionData::with_default_rays(bp.clone())?;
    let rose = MarkedGraph::rose(3);
    let mut fixed = 0;
    let mut attempts = 0;
    while fixed < SPLIT_FIXED_SAMPLES {
        attempts += 1;
        if attempts > 100 * SPLIT_FIXED_SAMPLES {
            return Err(fail(format!("only {fixed} subcomplex vertices sampled")));
        }
        let mut v = rose.clone();
        for _ in 0..rng.gen_range(0..=4) {
            let u = if rng.gen_bool(0.5) {
                random_blowup(rng, &v)?
            } else {
                random_collapse(rng, &v, &v.graph().natural_kept())?
            }
            .normalize()?;
            if in_cvkt(&u, &bp)?.is_some() {
                v = u;
            }
        }
        let r = retract_big_r(&v, &data)?;
        if r.equivalent(&v).is_none() {
            return Err(fail(format!("vertex not fixed:\n{}", crate::format::print_marked(&v))));
        }
        fixed += 1;
    }
    let mut audited = 0;
    let mut moved = 0;
    while audited < SPLIT_AUDIT_SAMPLES {
        let g = {
            let s = rng.gen_range(1..=6);
            random_spine_vertex(rng, 3, s)
        }?;
        let forests: Vec<Vec<usize>> = enumerate_subforests_kept(g.graph(), &g.graph().natural_kept())
            .into_iter()
            .filter(|f| !f.is_empty())
            .collect();
        let Some(f) = forests.choose(rng) else {
            continue;
        };
        match retraction_audit(&g, f, &data) {
            Ok(d) => {
                moved += d;
                audited += 1;
            }
            Err(Error::RayInVertexGroup) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(format!("{fixed} subcomplex vertices fixed; {audited} audits in the subcomplex, {moved} at distance 1"))
}

fn distortion_gap() -> Result<String> {
    let w = case1()?;
    let rows = w.report(GAP_COUNT_K)?;
    // Beyond the counted rows the lower bound comes from the matrix powers.
    let lower = |k: usize| -> Result<usize> {
        Ok(match rows.get(k) {
            Some(r) => r.spine_lb,
            None => usize::try_from(w.i_k_oracle(k)).map_err(|_| fail("count overflow".into()))?.div_ceil(2),
        })
    };
    let mut holds = Vec::new();
    for k in 0..=GOLDEN_K {
        holds.push(lower(k)? >= w.upper_bound(k));
    }
    let k_star = (0..=GOLDEN_K)
        .rev()
        .take_while(|&k| holds[k])
        .last()
        .ok_or_else(|| fail(format!("lower bound below upper bound at k={GOLDEN_K}")))?;
    if k_star > GAP_K_STAR_MAX {
        return Err(fail(format!("k* = {k_star} > {GAP_K_STAR_MAX}")));
    }
    let ratio = BigRational::new(w.i_k_oracle(GOLDEN_K + 1).into(), w.i_k_oracle(GOLDEN_K).into());
    let eps = BigRational::new(1.into(), GOLDEN_EPS_DENOM.into());
    if !near_golden(&ratio, &eps) {
        return Err(fail(format!("i_21/i_20 = {ratio} not within 1/{GOLDEN_EPS_DENOM} of the golden ratio")));
    }
    Ok(format!("k* = {k_star}; i_21/i_20 = {ratio} within 1/{GOLDEN_EPS_DENOM} of the golden ratio"))
}

fn stabilization() -> Result<String> {
    let mut checks = 0;
    for w in [case1()?, case2()?, case3()?] {
        let mut systems = vec![w.system.clone()];
        if w.system.components().len() > 1 {
            for c in w.system.components() {
                systems.push(FreeFactorSystem::new(w.n(), vec![c.clone()])?);
            }
        }
        for k in 0..=10 {
            let g = w.g0.act(&w.phi_k(k)?)?;
            for f in &systems {
                if realizes(&g, f)?.is_none() {
                    return Err(fail(format!("{:?}, k={k}: system not realized", w.params.case)));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} realizations over three cases, k <= 10"))
}

fn fold_paths(rng: &mut ChaCha8Rng) -> Result<String> {
    let rose = MarkedGraph::rose(3);
    for i in 0..FOLD_SAMPLES {
        let len = rng.gen_range(0..=4);
        let phi = product(3, &random_word(rng, 3, len))?;
        let start = if i % 2 == 0 {
            rose.clone()
        } else {
            {
                let s = rng.gen_range(1..=4);
                random_spine_vertex(rng, 3, s)
            }?
        };
        let end = start.act(&phi)?;
        let p = fold_path(&start, &end, None)?;
        if !p.path.verify() {
            return Err(fail(format!("invalid path for sample {i}")));
        }
    }
    let systems = [
        FreeFactorSystem::new(3, vec![vec![Word::gen(1)]])?,
        FreeFactorSystem::new(3, vec![vec![Word::gen(1), Word::gen(2)]])?,
    ];
    let mut guarded = 0;
    let mut attempts = 0;
    while guarded < FOLD_SAMPLES / 2 && attempts < 100 * FOLD_SAMPLES {
        attempts += 1;
        let f = systems.choose(rng).unwrap();
        let phi = product(3, &{
            let l = rng.gen_range(1..=4);
            random_word(rng, 3, l)
        })?;
        let end = rose.act(&phi)?;
        if realizes(&end, f)?.is_none() {
            continue;
        }
        let p = fold_path(&rose, &end, Some(f))?;
        if !p.path.verify() || p.guarded != Some(true) {
            return Err(fail(format!("guarded path left the subcomplex for {}", phi.map())));
        }
        guarded += 1;
    }
    let mut bfs_checked = 0;
    let r2 = MarkedGraph::rose(2);
    for _ in 0..20 {
        let phi = product(2, &{
            let l = rng.gen_range(0..=4);
            random_word(rng, 2, l)
        })?;
        let end = r2.act(&phi)?;
        let p = fold_path(&r2, &end, None)?;
        if !p.path.verify() {
            return Err(fail("invalid path in rank 2".into()));
        }
        if let Some(d) = bfs_distance(&r2, &end, BFS_CAP)? {
            if d > p.path.len() {
                return Err(fail(format!("bfs distance {d} exceeds path length {}", p.path.len())));
            }
        }
        for (k, c) in p.path.certificates.iter().enumerate() {
            let (a, b) = (&p.path.vertices[k], &p.path.vertices[k + 1]);
            let d = bfs_distance(a, b, 1)?;
            if d != Some(1) {
                return Err(fail(format!("certificate {c:?} joins vertices at distance {d:?}")));
            }
            debug_assert!(matches!(c, Certificate::Collapse(_) | Certificate::Expand(_)));
        }
        bfs_checked += 1;
    }
    Ok(format!(
        "{FOLD_SAMPLES} certified paths in rank 3; {guarded} guarded paths stay in the subcomplex; {bfs_checked} rank-2 paths agree with BFS (cap {BFS_CAP})"
    ))
}

fn positivity() -> Result<String> {
    let mut checks = 0;
    for n in 3..=5 {
        for m in 2..n {
            for k in 0..=12 {
                let c = cancellation_events(n, m, k)?;
                if c != 0 {
                    return Err(fail(format!("n={n}, m={m}, k={k}: {c} cancellations")));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} substitution powers, no cancellation"))
}
