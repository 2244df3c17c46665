//! Second-order pseudorandomness on `logsof(p)`.
//!
//! A first-order PRF `F: {0,1}^n × {0,1}^≤n -> {0,1}^w(n)` is lifted to a
//! functional that queries its argument `{0,1}^⌈lg n⌉ -> B` bit by bit: the
//! `i`-th coordinate is chosen from `F(key, z_1..z_{i-1})` and the result is
//! read off `F(key, z_1..z_n)`. [`advantage`] compares such a candidate with
//! the ideal random functional [`randsof`] against a distinguisher.

mod adversary;
mod lift;
mod random;

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::games::{sof, Game, Move, Step};
use crate::mix::mix64;
use crate::poly::{ceil_lg, Poly};
use crate::strategies::{
    apply_randomized, enumerate_choices, observe, observe_prob_mc, prob_to_f64, Prob, ProbStrategy,
    RandomSource, Randomized, RandomizedRef, RandomizedSession, StepMeter, StrategyError,
};

pub use adversary::{adversary, AdversaryKind};
pub use lift::{candidate, first2second, lift_prf};
pub use random::{random_first_order, randsof, randsof_banged};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrfError {
    #[error("cannot take {want} bits of a {have}-bit string")]
    LengthMismatch { have: usize, want: usize },
    #[error("enumeration needs more than {limit} branches")]
    EnumerationTooLarge { limit: u64 },
    #[error("adversary game {0} is not !s(logsof(p)) -o B")]
    AdversaryGame(alloc::string::String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// A keyed function `{0,1}^n × {0,1}^≤n -> {0,1}^w(n)`, `n` the key length.
pub trait FirstOrderPrf: Send + Sync + fmt::Debug {
    fn width(&self) -> Poly;

    fn eval(&self, key: &Bits, input: &Bits) -> Bits;
}

/// A keyed iterated 64-bit mixer. Not cryptographic: it exists to drive
/// the harness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyPrf {
    width: Poly,
}

impl ToyPrf {
    pub fn new(width: Poly) -> Self {
        ToyPrf { width }
    }
}

const TOY_ROUNDS: u32 = 4;

fn absorb(mut h: u64, k: u64, bits: &Bits) -> u64 {
    h = mix64(h ^ bits.len() as u64);
    for &w in bits.words() {
        h = mix64(h ^ w).wrapping_add(k);
    }
    h
}

impl FirstOrderPrf for ToyPrf {
    fn width(&self) -> Poly {
        self.width.clone()
    }

    fn eval(&self, key: &Bits, input: &Bits) -> Bits {
        let k = absorb(0x243f_6a88_85a3_08d3, 0, key);
        let mut h = k;
        for r in 0..TOY_ROUNDS {
            h = absorb(h ^ u64::from(r), k.rotate_left(7 * r + 1), input);
        }
        let len = self.width.eval_usize(key.len() as u64);
        let mut out = Bits::zeros(len);
        let mut block = 0;
        for i in 0..len {
            if i % 64 == 0 {
                block = mix64(mix64(h ^ k).wrapping_add(i as u64 / 64 + 1));
            }
            out.set(i, (block >> (i % 64)) & 1 == 1);
        }
        out
    }
}

/// `!_ι(Str_⌈lg⌉ -o B) -o Str_p`.
pub fn logsof(p: Poly) -> Game {
    sof(Poly::id(), Poly::lg(), p)
}

/// Number of coordinates of the argument at `n`: `2^⌈lg n⌉`.
pub fn domain_size(n: u64) -> u64 {
    1 << ceil_lg(n)
}

/// `j mod k`, reading `j` most significant bit first.
pub fn residue(j: &Bits, k: u64) -> u64 {
    j.iter().fold(0u128, |r, b| (2 * r + b as u128) % k as u128) as u64
}

/// `α(j, used)`: the unused coordinate at position `j mod (D - |used|)` in
/// ascending order, `D = domain_size`.
pub fn alpha(j: &Bits, used: &[u64], domain_size: u64) -> u64 {
    let free = domain_size - used.len() as u64;
    assert!(free > 0, "no unused coordinate left");
    let mut r = residue(j, free);
    for c in 0..domain_size {
        if used.contains(&c) {
            continue;
        }
        if r == 0 {
            return c;
        }
        r -= 1;
    }
    unreachable!("residue below the number of unused coordinates")
}

/// `β(v)`: the first `p` bits of `v`.
pub fn beta(v: &Bits, p: usize) -> Result<Bits, PrfError> {
    if p > v.len() {
        return Err(PrfError::LengthMismatch {
            have: v.len(),
            want: p,
        });
    }
    Ok(v.prefix(p))
}

/// Exact distribution of `α(j, used)` for `j` uniform over `{0,1}^w`.
pub fn alpha_distribution(w: usize, used: &[u64], domain_size: u64) -> BTreeMap<u64, Prob> {
    let free = domain_size - used.len() as u64;
    let total = 1u128 << w;
    let (q, extra) = (total / free as u128, total % free as u128);
    (0..domain_size)
        .filter(|c| !used.contains(c))
        .enumerate()
        .map(|(rank, c)| (c, Prob::new(q + ((rank as u128) < extra) as u128, total)))
        .collect()
}

/// Total-variation distance between two distributions.
pub fn tv_distance<K: Ord + Clone>(a: &BTreeMap<K, Prob>, b: &BTreeMap<K, Prob>) -> Prob {
    let mut sum = Prob::zero();
    for (k, pa) in a {
        let pb = b.get(k).copied().unwrap_or_else(Prob::zero);
        sum += if *pa > pb { pa - pb } else { pb - pa };
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum += pb;
        }
    }
    sum / Prob::from_integer(2)
}

/// Most coordinate orders [`tv_random_baseline`] will visit.
pub const BASELINE_LIMIT: u64 = 1 << 20;

/// Exact total-variation distance between the transcripts of
/// `first2second` fed a uniformly random first-order function with output
/// width `w`, and those of `randsof`, at `n`.
///
/// Oracle inputs are distinct prefixes, so each round's `j_i` is fresh and
/// uniform and `β(v)` is uniform: the transcripts differ only through the
/// modular bias of `α`, which depends on the rank of the chosen coordinate
/// among the unused ones and not on which coordinates are used.
pub fn tv_random_baseline(n: u64, w: usize) -> Result<Prob, PrfError> {
    let d = domain_size(n);
    let mut orders = 1u64;
    for i in 0..n {
        orders = orders.saturating_mul(d - i);
    }
    if orders > BASELINE_LIMIT {
        return Err(PrfError::EnumerationTooLarge {
            limit: BASELINE_LIMIT,
        });
    }
    let rank_probs: Vec<Vec<Prob>> = (0..n)
        .map(|i| {
            alpha_distribution(w, &(0..i).collect::<Vec<_>>(), d)
                .into_values()
                .collect()
        })
        .collect();
    let mut sum = Prob::zero();
    let mut ranks = alloc::vec![0usize; n as usize];
    loop {
        let mut pa = Prob::one();
        let mut pb = Prob::one();
        for (i, &r) in ranks.iter().enumerate() {
            pa *= rank_probs[i][r];
            pb *= Prob::new(1, (d - i as u64) as u128);
        }
        sum += if pa > pb { pa - pb } else { pb - pa };
        let mut i = n as usize;
        loop {
            if i == 0 {
                return Ok(sum / Prob::from_integer(2));
            }
            i -= 1;
            ranks[i] += 1;
            if (ranks[i] as u64) < d - i as u64 {
                break;
            }
            ranks[i] = 0;
        }
    }
}

/// One complete interaction with a functional on `logsof(p)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transcript {
    pub coordinates: Vec<Bits>,
    pub answer: Bits,
}

/// Asks `f` (a session on `logsof(p)`) for its answer, answering its
/// argument queries with `arg`.
pub fn drive_logsof(
    session: &mut dyn RandomizedSession,
    n: u64,
    arg: &mut dyn FnMut(&Bits) -> bool,
    rand: &mut dyn RandomSource,
) -> Result<Transcript, StrategyError> {
    let mut meter = StepMeter::unlimited(n);
    let mut coordinates = Vec::new();
    let mut msg = Move::question().right();
    loop {
        let r = session.respond(&msg, rand, &mut meter)?;
        msg = match (r.path.as_slice(), r.word()) {
            ([Step::Right], Some(w)) => {
                let answer = w
                    .to_bits()
                    .ok_or_else(|| StrategyError::IllegalMove(r.to_string()))?;
                return Ok(Transcript {
                    coordinates,
                    answer,
                });
            }
            ([Step::Left, Step::Copy(i), Step::Right], None) if r.is_question() => {
                Move::question().left().copy(*i).left()
            }
            ([Step::Left, Step::Copy(i), Step::Left], Some(w)) => {
                let c = w
                    .to_bits()
                    .ok_or_else(|| StrategyError::IllegalMove(r.to_string()))?;
                let b = arg(&c);
                coordinates.push(c);
                Move::bit(b).right().copy(*i).left()
            }
            _ => return Err(StrategyError::IllegalMove(r.to_string())),
        };
    }
}

/// Exact transcript distribution of `f` on `logsof(p)` against `arg`.
pub fn transcript_distribution(
    f: &dyn Randomized,
    n: u64,
    arg: &dyn Fn(&Bits) -> bool,
    limit: u64,
) -> Result<BTreeMap<Transcript, Prob>, PrfError> {
    let runs = enumerate_choices(limit, |rand| {
        let mut s = f.start(n);
        drive_logsof(&mut *s, n, &mut |c| arg(c), rand)
    })
    .map_err(|e| match e {
        StrategyError::EnumerationTooLarge { limit } => PrfError::EnumerationTooLarge { limit },
        e => PrfError::Strategy(e),
    })?;
    let mut out: BTreeMap<Transcript, Prob> = BTreeMap::new();
    for (p, t) in runs {
        *out.entry(t).or_insert_with(Prob::zero) += p;
    }
    Ok(out)
}

/// The canonical probing argument: parity of the coordinate's bits.
pub fn canonical_argument(c: &Bits) -> bool {
    c.count_ones() % 2 == 1
}

/// A second-order functional under test.
#[derive(Debug, Clone)]
pub enum Candidate {
    /// `mult;f` for a keyed strategy `f` on `Str_ι -o logsof(p)`.
    Keyed(ProbStrategy),
    /// The ideal random functional.
    Random { p: Poly },
}

impl Candidate {
    pub fn keyed(prf: Arc<dyn FirstOrderPrf>, p: Poly) -> Result<Self, StrategyError> {
        Ok(Candidate::Keyed(candidate(prf, p)?))
    }

    pub fn random(p: Poly) -> Self {
        Candidate::Random { p }
    }

    /// One session on `logsof(p)`.
    pub fn single(&self) -> RandomizedRef {
        match self {
            Candidate::Keyed(f) => Arc::new(f.clone()),
            Candidate::Random { p } => randsof(p.clone()),
        }
    }

    /// `!_s` of the candidate with randomness resolved once.
    pub fn banged(&self, s: Poly) -> RandomizedRef {
        match self {
            Candidate::Keyed(f) => Arc::new(crate::strategies::bang_strategy(s, f)),
            Candidate::Random { p } => randsof_banged(s, p.clone()),
        }
    }

    pub fn output_len(&self) -> Poly {
        match self {
            Candidate::Keyed(f) => match f.outcome_game() {
                Game::Lolli(_, out) => match &**out {
                    Game::Str(p) => p.clone(),
                    _ => unreachable!("candidates play logsof"),
                },
                _ => unreachable!("candidates play logsof"),
            },
            Candidate::Random { p } => p.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvantageMode {
    /// Every coin branch of both experiments.
    Exact {
        limit: u64,
    },
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Advantage {
    /// `Pr[A outputs 1]` against `!_s` of the candidate.
    pub p_candidate: f64,
    /// `Pr[A outputs 1]` against `!_s randsof`.
    pub p_random: f64,
    pub advantage: f64,
    /// Exact value, in exact mode.
    pub exact: Option<Prob>,
    /// Standard error of `advantage`, in Monte-Carlo mode.
    pub stderr: Option<f64>,
    pub trials: u64,
}

fn adversary_shape(adv: &ProbStrategy) -> Result<(Poly, Poly), PrfError> {
    let g = adv.outcome_game();
    let bad = || PrfError::AdversaryGame(alloc::string::ToString::to_string(g));
    let Game::Lolli(left, right) = g else {
        return Err(bad());
    };
    if **right != Game::Bool {
        return Err(bad());
    }
    let Game::Bang(s, inner) = &**left else {
        return Err(bad());
    };
    let Game::Lolli(_, out) = &**inner else {
        return Err(bad());
    };
    let Game::Str(p) = &**out else {
        return Err(bad());
    };
    if **inner != logsof(p.clone()) {
        return Err(bad());
    }
    Ok((s.clone(), p.clone()))
}

/// The experiment `!_s cand ; A` as a randomized strategy on `B`.
pub fn experiment(cand: &Candidate, adv: &ProbStrategy) -> Result<RandomizedRef, PrfError> {
    let (s, _) = adversary_shape(adv)?;
    Ok(apply_randomized(cand.banged(s), Arc::new(adv.clone()))?)
}

fn prob_one(f: &dyn Randomized, n: u64, limit: u64) -> Result<Prob, PrfError> {
    let runs = enumerate_choices(limit, |rand| observe(f, n, rand)).map_err(|e| match e {
        StrategyError::EnumerationTooLarge { limit } => PrfError::EnumerationTooLarge { limit },
        e => PrfError::Strategy(e),
    })?;
    let one = Move::bit(true);
    Ok(runs
        .into_iter()
        .filter(|(_, m)| *m == one)
        .map(|(p, _)| p)
        .fold(Prob::zero(), |a, b| a + b))
}

/// `|Pr[!_s cand ; A ⇓ 1] - Pr[!_s randsof ; A ⇓ 1]|` at `n`.
pub fn advantage(
    cand: &Candidate,
    adv: &ProbStrategy,
    n: u64,
    mode: AdvantageMode,
) -> Result<Advantage, PrfError> {
    let (_, p) = adversary_shape(adv)?;
    let real = experiment(cand, adv)?;
    let ideal = experiment(&Candidate::random(p), adv)?;
    match mode {
        AdvantageMode::Exact { limit } => {
            let a = prob_one(&*real, n, limit)?;
            let b = prob_one(&*ideal, n, limit)?;
            let d = if a > b { a - b } else { b - a };
            Ok(Advantage {
                p_candidate: prob_to_f64(&a),
                p_random: prob_to_f64(&b),
                advantage: prob_to_f64(&d),
                exact: Some(d),
                stderr: None,
                trials: 0,
            })
        }
        AdvantageMode::MonteCarlo { trials, seed } => {
            let one = Move::bit(true);
            let a = observe_prob_mc(&*real, n, &one, trials, seed)?;
            let b = observe_prob_mc(&*ideal, n, &one, trials, mix64(seed))?;
            Ok(advantage_from_rates(a, b, trials))
        }
    }
}

/// Builds a Monte-Carlo report from the two empirical rates.
pub fn advantage_from_rates(a: f64, b: f64, trials: u64) -> Advantage {
    let t = trials.max(1) as f64;
    Advantage {
        p_candidate: a,
        p_random: b,
        advantage: libm::fabs(a - b),
        exact: None,
        stderr: Some(libm::sqrt(a * (1.0 - a) / t + b * (1.0 - b) / t)),
        trials,
    }
}

#[cfg(test)]
mod tests;
