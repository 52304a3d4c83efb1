//! Distortion witnesses: the train track map `Θ`, the words `u_k = Θ^k(a_1)`,
//! the automorphisms `φ_k = θ^k φ_0 θ^-k`, their marked graphs and the
//! distortion report.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::counting::{build_context, count_i, CountingContext};
use crate::covers::FreeFactorSystem;
use crate::error::{Error, Result};
use crate::graph::{CoreGraph, DirEdge};
use crate::marked::{EdgePath, MarkedGraph};
use crate::nielsen::{product, Nielsen, NielsenLetter};
use crate::word::{free_reduce_count, invert_seq, Automorphism, CyclicWord, Endo, Word};

/// `Θ(a_1) = a_1 a_m`, `Θ(a_i) = a_{i-1}` for `2 ≤ i ≤ m`, identity above `m`.
pub fn theta(n: usize, m: usize) -> Result<Automorphism> {
    check_m(n, m)?;
    let mut images: Vec<Word> = (1..=n as u32).map(Word::gen).collect();
    images[0] = Word::gen(1).mul(&Word::gen(m as u32));
    for i in 2..=m {
        images[i - 1] = Word::gen(i as u32 - 1);
    }
    Automorphism::new(Endo::new(images)?)
}

/// `Θ̄(a_j) = a_{j+1}` for `j < m`, `Θ̄(a_m) = a_2^-1 a_1`, identity above `m`.
pub fn theta_inverse(n: usize, m: usize) -> Result<Automorphism> {
    check_m(n, m)?;
    let mut images: Vec<Word> = (1..=n as u32).map(Word::gen).collect();
    for j in 1..m {
        images[j - 1] = Word::gen(j as u32 + 1);
    }
    images[m - 1] = Word::gen(2).inverse().mul(&Word::gen(1));
    Automorphism::new(Endo::new(images)?)
}

fn check_m(n: usize, m: usize) -> Result<()> {
    if m < 2 || m + 1 > n {
        return Err(Error::Precondition(format!("need 2 <= m <= n-1, got m={m}, n={n}")));
    }
    Ok(())
}

/// `θ` as a Nielsen word: a left transvection followed by a cyclic
/// permutation written as `m - 1` transpositions. Length `m`.
pub fn theta_nielsen(m: usize) -> Vec<NielsenLetter> {
    let mut w: Vec<NielsenLetter> = (1..m).rev().map(|i| Nielsen::Swap(i, i + 1).letter()).collect();
    w.push(Nielsen::Left(1, 2).letter());
    w
}

/// `u_k = Θ^k(a_1)`, computed by substitution.
pub fn u_k(m: usize, k: usize) -> Word {
    let th = theta(m + 1, m).expect("valid");
    let mut u = Word::gen(1);
    for _ in 0..k {
        u = th.apply(&u).expect("in range");
    }
    u
}

/// Total number of cancellations met while computing `Θ^k(a_i)` for every
/// `i ≤ n` and every power up to `k` by raw substitution.
pub fn cancellation_events(n: usize, m: usize, k: usize) -> Result<usize> {
    let th = theta(n, m)?;
    let mut total = 0;
    for i in 1..=n {
        let mut cur = vec![i as i32];
        for _ in 0..k {
            let raw = th.map().substitute_raw(&cur);
            let (red, c) = free_reduce_count(&raw);
            total += c;
            cur = red;
        }
    }
    Ok(total)
}

/// Substitution matrix of `Θ` on `a_1..a_m`: entry `(i, j)` counts `a_{i+1}`
/// in `Θ(a_{j+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    pub entries: Vec<Vec<BigUint>>,
}

impl TransitionMatrix {
    pub fn of_theta(m: usize) -> TransitionMatrix {
        let mut e = vec![vec![BigUint::zero(); m]; m];
        e[0][0] += 1u32;
        e[m - 1][0] += 1u32;
        for i in 2..=m {
            e[i - 2][i - 1] += 1u32;
        }
        TransitionMatrix { entries: e }
    }

    pub fn identity(m: usize) -> TransitionMatrix {
        let mut e = vec![vec![BigUint::zero(); m]; m];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = BigUint::one();
        }
        TransitionMatrix { entries: e }
    }

    pub fn mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let m = self.entries.len();
        let mut e = vec![vec![BigUint::zero(); m]; m];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for l in 0..m {
                    *cell += &self.entries[i][l] * &other.entries[l][j];
                }
            }
        }
        TransitionMatrix { entries: e }
    }

    pub fn pow(&self, mut k: usize) -> TransitionMatrix {
        let mut acc = TransitionMatrix::identity(self.entries.len());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }
}

/// Number of occurrences of `a_j` in `Θ^k(a_1)`, from matrix powers.
pub fn occurrence_count(m: usize, j: usize, k: usize) -> BigUint {
    TransitionMatrix::of_theta(m).pow(k).entries[j - 1][0].clone()
}

/// Whether `x` is within `eps` of the golden ratio, decided exactly.
pub fn near_golden(x: &BigRational, eps: &BigRational) -> bool {
    // |x - φ| < eps  ⟺  2(x-eps)-1 < √5 < 2(x+eps)-1
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let five = BigRational::from_integer(5.into());
    let lo = &two * (x - eps) - &one;
    let hi = &two * (x + eps) - &one;
    let below = lo < BigRational::zero() || &lo * &lo < five;
    let above = hi > BigRational::zero() && &hi * &hi > five;
    below && above
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessCase {
    /// One component `A = <a_1..a_r>`, `1 ≤ r ≤ n-2`.
    Connected { r: usize },
    /// Two components of ranks `r0`, `r1`; coindex `n - r0 - r1 + 1 ≥ 2`.
    TwoComponent { r0: usize, r1: usize },
    /// Two components as above plus further components carried by disjoint
    /// subroses of the third rose, with the given ranks.
    MultiComponent { r0: usize, r1: usize, extra: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessParams {
    pub n: usize,
    pub case: WitnessCase,
}

/// Everything needed to evaluate the witnesses for given parameters.
#[derive(Clone, Debug)]
pub struct Witness {
    pub params: WitnessParams,
    /// `m = rank B`.
    pub m: usize,
    /// Base marked graph: the rose in Case 1, the three-rose graph `G′`
    /// otherwise.
    pub g0: MarkedGraph,
    /// The free factor system stabilized.
    pub system: FreeFactorSystem,
    /// Components used to build the counting context.
    pub a: Vec<Vec<Word>>,
    pub b: Vec<Word>,
    pub c0: CyclicWord,
    pub theta_word: Vec<NielsenLetter>,
    pub phi0_word: Vec<NielsenLetter>,
}

fn gens(range: std::ops::RangeInclusive<usize>) -> Vec<Word> {
    range.map(|i| Word::gen(i as u32)).collect()
}

impl Witness {
    pub fn new(params: WitnessParams) -> Result<Witness> {
        let n = params.n;
        match &params.case {
            WitnessCase::Connected { r } => {
                let r = *r;
                if r == 0 || r + 2 > n {
                    return Err(Error::Precondition(format!("need 1 <= r <= n-2, got r={r}, n={n}")));
                }
                let m = r + 1;
                let a = vec![gens(1..=r)];
                Ok(Witness {
                    m,
                    g0: MarkedGraph::rose(n),
                    system: FreeFactorSystem::new(n, a.clone())?,
                    a,
                    b: gens(1..=m),
                    c0: CyclicWord::of(&Word::gen(n as u32))?,
                    theta_word: theta_nielsen(m),
                    phi0_word: vec![Nielsen::Right(n, 1).letter()],
                    params,
                })
            }
            WitnessCase::TwoComponent { r0, r1 } | WitnessCase::MultiComponent { r0, r1, .. } => {
                let (r0, r1) = (*r0, *r1);
                let extra = match &params.case {
                    WitnessCase::MultiComponent { extra, .. } => extra.clone(),
                    _ => Vec::new(),
                };
                let m = r0 + r1;
                if r0 == 0 || r1 == 0 || m + 1 > n {
                    return Err(Error::Precondition(format!(
                        "need ranks >= 1 and coindex >= 2, got r0={r0}, r1={r1}, n={n}"
                    )));
                }
                if matches!(params.case, WitnessCase::MultiComponent { .. })
                    && (extra.is_empty() || extra.contains(&0) || extra.iter().sum::<usize>() > n - m)
                {
                    return Err(Error::Precondition("extra components must fit in the third rose".into()));
                }
                let g0 = case2_graph(n, r0, m)?;
                let a = vec![gens(1..=r0), gens(r0 + 1..=m)];
                let mut comps = a.clone();
                let mut next = m + 1;
                for &s in &extra {
                    comps.push(gens(next..=next + s - 1));
                    next += s;
                }
                let l1 = (r0 + 1) as u32;
                let c0 = Word::gen(m as u32 + 1).mul(&Word::gen(l1)).mul(&Word::gen(1)).mul(&Word::gen(l1).inverse());
                let mut phi0_word = Vec::new();
                for i in m + 1..=n {
                    phi0_word.push(Nielsen::Left(i, 1).inv());
                    phi0_word.push(Nielsen::Right(i, 1).letter());
                }
                Ok(Witness {
                    m,
                    g0,
                    system: FreeFactorSystem::new(n, comps)?,
                    a,
                    b: gens(1..=m),
                    c0: CyclicWord::of(&c0)?,
                    theta_word: theta_nielsen(m),
                    phi0_word,
                    params,
                })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    fn is_connected(&self) -> bool {
        matches!(self.params.case, WitnessCase::Connected { .. })
    }

    pub fn theta(&self) -> Automorphism {
        theta(self.n(), self.m).expect("validated")
    }

    pub fn u_k(&self, k: usize) -> Word {
        u_k(self.m, k)
    }

    /// `φ_k` written directly from `u_k`.
    pub fn phi_k(&self, k: usize) -> Result<Automorphism> {
        let n = self.n();
        let u = if k == 0 { Word::gen(1) } else { self.u_k(k) };
        let mut images: Vec<Word> = (1..=n as u32).map(Word::gen).collect();
        if self.is_connected() {
            images[n - 1] = Word::gen(n as u32).mul(&u);
        } else {
            for (i, img) in images.iter_mut().enumerate().skip(self.m) {
                *img = Word::gen(i as u32 + 1).conj(&u);
            }
        }
        Automorphism::new(Endo::new(images)?)
    }

    pub fn phi0(&self) -> Result<Automorphism> {
        product(self.n(), &self.phi0_word)
    }

    /// `θ^k ∘ φ_0 ∘ θ^-k`.
    pub fn phi_k_factored(&self, k: usize) -> Result<Automorphism> {
        let th = product(self.n(), &self.theta_word)?;
        let mut acc = self.phi0()?;
        for _ in 0..k {
            acc = th.then_after(&acc)?.then_after(&th.inverse())?;
        }
        Ok(acc)
    }

    /// Nielsen length of the factorization: `2k·ℓ(θ) + ℓ(φ_0)`.
    pub fn upper_bound(&self, k: usize) -> usize {
        2 * k * self.theta_word.len() + self.phi0_word.len()
    }

    pub fn context(&self) -> Result<CountingContext> {
        build_context(&self.a, &self.b, &self.g0)
    }

    pub fn c_k(&self, k: usize) -> Result<CyclicWord> {
        CyclicWord::of(&self.phi_k(k)?.apply(&self.c0.to_word())?)
    }

    /// The crossing count of `c_k` by the trace.
    pub fn i_k(&self, ctx: &CountingContext, k: usize) -> Result<usize> {
        Ok(count_i(ctx, &self.c_k(k)?)?.value)
    }

    /// Independent prediction of `i_k`: the `a_m`-count of `u_k` in Case 1,
    /// and `2·#η(u′_k) + 2` otherwise, with `#η(u′_k)` read off `u_k`.
    pub fn i_k_oracle(&self, k: usize) -> BigUint {
        if self.is_connected() {
            return if k == 0 { BigUint::zero() } else { occurrence_count(self.m, self.m, k) };
        }
        let u = if k == 0 { Word::gen(1) } else { self.u_k(k) };
        BigUint::from(2 * self.eta_count(&u) + 2)
    }

    fn in_h0(&self, l: i32) -> bool {
        let (r0, _) = self.ranks();
        (l.unsigned_abs() as usize) <= r0
    }

    fn ranks(&self) -> (usize, usize) {
        match self.params.case {
            WitnessCase::TwoComponent { r0, r1 } | WitnessCase::MultiComponent { r0, r1, .. } => (r0, r1),
            WitnessCase::Connected { r } => (r, 1),
        }
    }

    /// Copies of `η′_0` inserted into `u_k`.
    pub fn eta_count(&self, u: &Word) -> usize {
        let l = u.letters();
        let transitions = l.windows(2).filter(|w| self.in_h0(w[0]) != self.in_h0(w[1])).count();
        transitions
            + usize::from(l.first().is_some_and(|&x| self.in_h0(x)))
            + usize::from(l.last().is_some_and(|&x| self.in_h0(x)))
    }

    /// `u′_k` as a path in `G′` at `v′_1` (two-component cases).
    pub fn u_prime(&self, k: usize) -> EdgePath {
        let n = self.n() as i32;
        let eta0 = n + 1;
        let u = if k == 0 { Word::gen(1) } else { self.u_k(k) };
        let l = u.letters();
        let mut out = Vec::new();
        for (idx, &x) in l.iter().enumerate() {
            let h0 = self.in_h0(x);
            let prev_h0 = if idx == 0 { false } else { self.in_h0(l[idx - 1]) };
            if h0 != prev_h0 {
                out.push(if h0 { -eta0 } else { eta0 });
            }
            out.push(x);
        }
        if l.last().is_some_and(|&x| self.in_h0(x)) {
            out.push(eta0);
        }
        out
    }

    /// `σ′ = e′_{l1} η̄′_0 e′_{l0} η′_0 ē′_{l1}` with `l0 = 1`, `l1 = r0 + 1`.
    pub fn sigma_prime(&self) -> EdgePath {
        let eta0 = self.n() as i32 + 1;
        let l1 = self.ranks().0 as i32 + 1;
        vec![l1, -eta0, 1, eta0, -l1]
    }

    /// `Φ′_k(γ′) = ρ′ η′_1 u′_k σ′ ū′_k η̄′_1` with `ρ′` the first petal of
    /// the third rose, as a closed path at `v′_2`.
    pub fn gamma_prime_image(&self, k: usize) -> EdgePath {
        let n = self.n() as i32;
        let eta1 = n + 2;
        let rho = self.m as i32 + 1;
        let u = self.u_prime(k);
        let mut p = vec![rho, eta1];
        p.extend_from_slice(&u);
        p.extend(self.sigma_prime());
        p.extend(invert_seq(&u));
        p.push(-eta1);
        p
    }

    /// Rows `(k, upper, i_k, spine_lb)` for `k = 0..=kmax`.
    pub fn report(&self, kmax: usize) -> Result<Vec<ReportRow>> {
        let ctx = self.context()?;
        let i0 = self.i_k(&ctx, 0)?;
        (0..=kmax)
            .map(|k| {
                let ik = self.i_k(&ctx, k)?;
                Ok(ReportRow {
                    k,
                    upper_nielsen: self.upper_bound(k),
                    i_k: ik,
                    spine_lb: ik.saturating_sub(i0).div_ceil(2),
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub k: usize,
    pub upper_nielsen: usize,
    pub i_k: usize,
    pub spine_lb: usize,
}

/// The graph `G′`: roses at `v′_0` (edges `1..=r0`), `v′_1` (edges
/// `r0+1..=m`) and `v′_2` (edges `m+1..=n`), with `η′_0: v′_0 → v′_1` as edge
/// `n+1` and `η′_1: v′_2 → v′_1` as edge `n+2`, based at `v′_1`.
pub fn case2_graph(n: usize, r0: usize, m: usize) -> Result<MarkedGraph> {
    let mut edges = Vec::new();
    for i in 1..=n {
        let v = if i <= r0 {
            0
        } else if i <= m {
            1
        } else {
            2
        };
        edges.push((v, v));
    }
    edges.push((0, 1));
    edges.push((2, 1));
    let graph = CoreGraph::new(3, edges)?;
    let (eta0, eta1) = (n as DirEdge + 1, n as DirEdge + 2);
    let marking = (1..=n as DirEdge)
        .map(|i| {
            if i as usize <= r0 {
                vec![-eta0, i, eta0]
            } else if i as usize <= m {
                vec![i]
            } else {
                vec![-eta1, i, eta1]
            }
        })
        .collect();
    MarkedGraph::new(graph, 1, marking)
}
