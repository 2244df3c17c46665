//! Collisions for query-limited second-order functions on `linsof(q, p)`.
//!
//! An `N`-bit string `x` is embedded as the block function
//! `f_x: {0,1}^n -> B`, constant on `N` contiguous blocks of `2^n/N`
//! inputs. A functional `F` on `linsof` then induces
//! `F~(x) = F(f_x): {0,1}^N -> {0,1}^p`, with each output bit still
//! computed by a depth-`q` decision tree. Fixing the few influential
//! coordinates of `F~` makes it nearly constant on the remaining free ones,
//! so two random completions are far apart yet share a tag.

mod fixture;
mod infvar;

use alloc::vec::Vec;

use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::games::{sof, Base, Game, Move, Step};
use crate::influence::{
    AlgorithmA, AlgorithmError, AlgorithmParams, InfluenceSchedule, PartialAssignment, Status,
};
use crate::poly::Poly;
use crate::strategies::{Prob, StepMeter, StrategyError, StrategyRef};

pub use fixture::{mac_fixture, FixtureOutput, ProbeFunctional, ProbeOracle};
pub use infvar::{infvar_strategy, InfvarConfig, INFVAR_SEED_BITS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AttackError {
    #[error("N = {big_n} is not a power of two dividing 2^{n}")]
    InvalidN { n: u64, big_n: u64 },
    #[error("no power of two N with n < N < 2^n satisfies the size condition at n = {n}")]
    Infeasible { n: u64 },
    #[error("exact enumeration over 2^{n} points is too large")]
    EnumerationTooLarge { n: u64 },
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}

/// `!_q(Str_ι -o B) -o Str_p`.
pub fn linsof(q: Poly, p: Poly) -> Game {
    sof(q, Poly::id(), p)
}

/// The block function `f_x` on `{0,1}^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    x: Bits,
    n: u32,
    shift: u32,
}

fn block_shift(n: u64, big_n: u64) -> Result<u32, AttackError> {
    let invalid = AttackError::InvalidN { n, big_n };
    if !big_n.is_power_of_two() || n > 63 || big_n > 1 << n {
        return Err(invalid);
    }
    Ok(n as u32 - big_n.trailing_zeros())
}

impl Extension {
    /// `f_x(i) = x[i / B]`, `B = 2^n / |x|`, inputs read as integers most
    /// significant bit first.
    pub fn new(x: Bits, n: u64) -> Result<Self, AttackError> {
        let shift = block_shift(n, x.len() as u64)?;
        Ok(Extension {
            x,
            n: n as u32,
            shift,
        })
    }

    pub fn x(&self) -> &Bits {
        &self.x
    }

    pub fn n(&self) -> u64 {
        u64::from(self.n)
    }

    /// `2^n / N`.
    pub fn block_size(&self) -> u64 {
        1 << self.shift
    }

    pub fn eval_index(&self, i: u64) -> bool {
        self.x.get((i >> self.shift) as usize)
    }

    pub fn eval(&self, input: &Bits) -> bool {
        debug_assert_eq!(input.len(), self.n as usize);
        self.eval_index(input.to_u64_msb())
    }
}

/// `extend(x, n)`.
pub fn extend(x: Bits, n: u64) -> Result<Extension, AttackError> {
    Extension::new(x, n)
}

/// Normalized Hamming distance of equal-length strings.
pub fn hamming(x: &Bits, y: &Bits) -> Prob {
    assert_eq!(x.len(), y.len(), "hamming of unequal lengths");
    if x.is_empty() {
        return Prob::zero();
    }
    Prob::new(x.hamming(y) as u128, x.len() as u128)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HammingMode {
    /// Every input, for `n ≤ 20`.
    Exact,
    Sampled {
        samples: u64,
        seed: u64,
    },
}

/// Largest `n` for which [`HammingMode::Exact`] enumerates `{0,1}^n`.
pub const EXACT_HAMMING_MAX_N: u64 = 20;

/// Normalized Hamming distance of two functions on `{0,1}^n`.
pub fn hamming_fun(
    f: &dyn Fn(&Bits) -> bool,
    g: &dyn Fn(&Bits) -> bool,
    n: u64,
    mode: HammingMode,
) -> Result<f64, AttackError> {
    assert!(n <= 64);
    match mode {
        HammingMode::Exact => {
            if n > EXACT_HAMMING_MAX_N {
                return Err(AttackError::EnumerationTooLarge { n });
            }
            let total = 1u64 << n;
            let diff = (0..total)
                .filter(|&i| {
                    let x = Bits::from_u64_msb(i, n as usize);
                    f(&x) != g(&x)
                })
                .count();
            Ok(diff as f64 / total as f64)
        }
        HammingMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let diff = (0..samples)
                .filter(|_| {
                    let x = Bits::random(n as usize, &mut rng);
                    f(&x) != g(&x)
                })
                .count();
            Ok(diff as f64 / samples.max(1) as f64)
        }
    }
}

/// Smallest power of two `N` with `n < N < 2^n` and
/// `10 L q² / (δ² ε) ≤ δ N / 100`.
pub fn choose_n(l: u64, q: u64, eps: f64, delta: f64, n: u64) -> Result<u64, AttackError> {
    let need = 10.0 * l as f64 * (q * q) as f64 / (delta * delta * eps);
    (0..n.min(64))
        .map(|k| 1u64 << k)
        .find(|&big_n| big_n > n && need <= delta * big_n as f64 / 100.0)
        .ok_or(AttackError::Infeasible { n })
}

/// Query access to a functional `F: ({0,1}^r(n) -> B) -> {0,1}^p(n)` that
/// calls its argument at most `q(n)` times per query.
pub trait FunctionalOracle {
    /// The security parameter.
    fn n(&self) -> u64;

    /// `r(n)`.
    fn arg_len(&self) -> usize;

    /// `q(n)`.
    fn query_bound(&self) -> usize;

    /// `p(n)`.
    fn tag_len(&self) -> usize;

    fn query(&mut self, f: &mut dyn FnMut(&Bits) -> bool) -> Result<Bits, StrategyError>;

    fn query_count(&self) -> u64;

    /// Argument points probed by the last query.
    fn last_probes(&self) -> &[Bits];
}

/// A deterministic strategy on `sof(q, r, p)` queried by playing it.
#[derive(Clone)]
pub struct GameFunctional {
    strategy: StrategyRef,
    n: u64,
    q: usize,
    r: usize,
    p: usize,
    count: u64,
    probes: Vec<Bits>,
}

impl core::fmt::Debug for GameFunctional {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "GameFunctional({} at n = {})",
            self.strategy.game(),
            self.n
        )
    }
}

impl GameFunctional {
    pub fn new(strategy: StrategyRef, n: u64) -> Result<Self, StrategyError> {
        let game = strategy.game();
        let mismatch = || {
            StrategyError::Mismatch(
                alloc::string::ToString::to_string(&game),
                "sof(q, r, p)".into(),
            )
        };
        let Game::Lolli(left, right) = &game else {
            return Err(mismatch());
        };
        let (Game::Bang(q, arg), Game::Str(p)) = (&**left, &**right) else {
            return Err(mismatch());
        };
        let Game::Lolli(dom, cod) = &**arg else {
            return Err(mismatch());
        };
        let (Game::Str(r), Game::Bool) = (&**dom, &**cod) else {
            return Err(mismatch());
        };
        Ok(GameFunctional {
            n,
            q: q.eval_usize(n),
            r: r.eval_usize(n),
            p: p.eval_usize(n),
            strategy,
            count: 0,
            probes: Vec::new(),
        })
    }
}

impl FunctionalOracle for GameFunctional {
    fn n(&self) -> u64 {
        self.n
    }

    fn arg_len(&self) -> usize {
        self.r
    }

    fn query_bound(&self) -> usize {
        self.q
    }

    fn tag_len(&self) -> usize {
        self.p
    }

    fn query(&mut self, f: &mut dyn FnMut(&Bits) -> bool) -> Result<Bits, StrategyError> {
        self.count += 1;
        self.probes.clear();
        let budget = self.strategy.budget();
        let mut session = self.strategy.start(self.n);
        let mut msg = Move::question().right();
        let mut opened = 0u32;
        loop {
            let mut meter = StepMeter::for_budget(&budget, self.n);
            let r = session.respond(&msg, &mut meter)?;
            let illegal = || StrategyError::IllegalMove(alloc::string::ToString::to_string(&r));
            msg = match (r.path.as_slice(), &r.base) {
                ([Step::Right], Base::Answer(w)) => {
                    let tag = w
                        .to_bits()
                        .filter(|t| t.len() == self.p)
                        .ok_or_else(illegal)?;
                    return Ok(tag);
                }
                ([Step::Left, Step::Copy(i), Step::Right], Base::Question) => {
                    if *i == opened + 1 && (*i as usize) <= self.q {
                        opened = *i;
                    } else {
                        return Err(illegal());
                    }
                    Move::question().left().copy(*i).left()
                }
                ([Step::Left, Step::Copy(i), Step::Left], Base::Answer(w)) if *i == opened => {
                    let x = w
                        .to_bits()
                        .filter(|x| x.len() == self.r)
                        .ok_or_else(illegal)?;
                    let b = f(&x);
                    self.probes.push(x);
                    Move::bit(b).right().copy(*i).left()
                }
                _ => return Err(illegal()),
            };
        }
    }

    fn query_count(&self) -> u64 {
        self.count
    }

    fn last_probes(&self) -> &[Bits] {
        &self.probes
    }
}

/// `F~(x) = F(f_x)`.
pub fn extended_query(target: &mut dyn FunctionalOracle, x: &Bits) -> Result<Bits, AttackError> {
    let n = target.n();
    let shift = block_shift(n, x.len() as u64)?;
    Ok(target.query(&mut |pt: &Bits| x.get((pt.to_u64_msb() >> shift) as usize))?)
}

/// Points of `{0,1}^N` queried through `F~`, stored packed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryLog {
    len: usize,
    words: Vec<u64>,
}

impl QueryLog {
    pub fn new(len: usize) -> Self {
        QueryLog {
            len,
            words: Vec::new(),
        }
    }

    pub fn push(&mut self, x: &Bits) {
        assert_eq!(x.len(), self.len);
        self.words.extend_from_slice(x.words());
    }

    fn stride(&self) -> usize {
        self.len.div_ceil(64).max(1)
    }

    pub fn count(&self) -> usize {
        if self.len == 0 {
            0
        } else {
            self.words.len() / self.stride()
        }
    }

    pub fn get(&self, k: usize) -> Bits {
        let s = self.stride();
        let mut x = Bits::zeros(self.len);
        for (i, w) in self.words[k * s..(k + 1) * s].iter().enumerate() {
            for b in 0..64 {
                let j = 64 * i + b;
                if j < self.len && (w >> b) & 1 == 1 {
                    x.set(j, true);
                }
            }
        }
        x
    }

    /// The logged point closest to `x` and its distance in bits.
    pub fn nearest(&self, x: &Bits) -> Option<(usize, usize)> {
        let s = self.stride();
        let xw = x.words();
        self.words
            .chunks(s)
            .map(|c| {
                c.iter()
                    .zip(xw)
                    .map(|(a, b)| (a ^ b).count_ones() as usize)
                    .sum()
            })
            .enumerate()
            .min_by_key(|&(_, d)| d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionParams {
    /// `N`.
    pub big_n: usize,
    pub delta: f64,
    /// Defaults to `delta / p(n)`.
    pub eps: Option<f64>,
    pub schedule: InfluenceSchedule,
}

impl CollisionParams {
    pub fn algorithm(&self, target: &dyn FunctionalOracle) -> AlgorithmParams {
        let l = target.tag_len().max(1);
        AlgorithmParams {
            input_len: self.big_n,
            output_len: target.tag_len(),
            depth: target.query_bound(),
            eps: self.eps.unwrap_or(self.delta / l as f64),
            delta: self.delta,
            schedule: self.schedule,
        }
    }
}

/// Two argument functions `f_{x1}`, `f_{x2}` found by [`collision_finder`].
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub params: AlgorithmParams,
    pub g: PartialAssignment,
    pub x1: Bits,
    pub x2: Bits,
    pub iterations: u64,
    pub queries: u64,
    pub log: QueryLog,
}

/// Fixes the influential coordinates of `F~` and samples two independent
/// completions from `U_g`.
pub fn collision_finder(
    target: &mut dyn FunctionalOracle,
    params: &CollisionParams,
    rng: &mut ChaCha8Rng,
) -> Result<Collision, AttackError> {
    let ap = params.algorithm(target);
    block_shift(target.n(), ap.input_len as u64)?;
    let mut log = QueryLog::new(ap.input_len);
    let mut a = AlgorithmA::new(ap, ChaCha8Rng::seed_from_u64(rng.next_u64()));
    let mut status = a.resume(None);
    while status == Status::Query {
        let tag = {
            let x = a.pending_query().expect("pending query");
            log.push(x);
            extended_query(target, x)?
        };
        status = a.resume(Some(&tag));
    }
    let out = a.into_result().expect("finished")?;
    let x1 = out.assignment.sample(rng);
    let x2 = out.assignment.sample(rng);
    Ok(Collision {
        params: ap,
        g: out.assignment,
        x1,
        x2,
        iterations: out.iterations,
        queries: out.queries,
        log,
    })
}

/// Distances and tags of a collision, each checked two ways.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    /// `H(f_{x1}, f_{x2}) = H(x1, x2)`.
    pub hamming_gh: f64,
    pub hamming_gh_sampled: f64,
    pub tag_g: Bits,
    pub tag_h: Bits,
    pub tags_equal: bool,
    /// Smallest distance from `f_{x1}` or `f_{x2}` to a queried function.
    pub min_query_distance: f64,
    /// The same distance, sampled against the nearest queried function.
    pub min_query_distance_sampled: f64,
    /// Whether both sampled distances are within the sampling tolerance of
    /// the exact ones.
    pub sampled_agree: bool,
    pub dom_size: usize,
    pub success: bool,
}

/// Threshold on both distances for a successful collision.
pub const FAR: f64 = 0.1;

/// Slack allowed between sampled and exact distances.
pub const SAMPLE_TOLERANCE: f64 = 0.02;

fn prob_f64(p: &Prob) -> f64 {
    crate::strategies::prob_to_f64(p)
}

/// Recomputes the success conditions of `c` against `target`, with
/// `samples` random inputs for the sampled distances.
pub fn check_collision(
    target: &mut dyn FunctionalOracle,
    c: &Collision,
    samples: u64,
    rng: &mut ChaCha8Rng,
) -> Result<CollisionReport, AttackError> {
    let n = target.n();
    let tag_g = extended_query(target, &c.x1)?;
    let tag_h = extended_query(target, &c.x2)?;
    let e1 = Extension::new(c.x1.clone(), n)?;
    let e2 = Extension::new(c.x2.clone(), n)?;
    let hamming_gh = prob_f64(&hamming(&c.x1, &c.x2));
    let sampled = |a: &Extension, b: &Extension, seed: u64| {
        hamming_fun(
            &|x| a.eval(x),
            &|x| b.eval(x),
            n,
            HammingMode::Sampled { samples, seed },
        )
    };
    let hamming_gh_sampled = sampled(&e1, &e2, rng.gen())?;
    let mut nearest: Option<(usize, usize, &Extension)> = None;
    for e in [&e1, &e2] {
        if let Some((k, d)) = c.log.nearest(e.x()) {
            if nearest.is_none_or(|(_, best, _)| d < best) {
                nearest = Some((k, d, e));
            }
        }
    }
    let (min_query_distance, min_query_distance_sampled) = match nearest {
        Some((k, d, e)) => {
            let z = Extension::new(c.log.get(k), n)?;
            (d as f64 / c.x1.len() as f64, sampled(e, &z, rng.gen())?)
        }
        None => (1.0, 1.0),
    };
    let sampled_agree = libm::fabs(hamming_gh - hamming_gh_sampled) <= SAMPLE_TOLERANCE
        && libm::fabs(min_query_distance - min_query_distance_sampled) <= SAMPLE_TOLERANCE;
    let tags_equal = tag_g == tag_h;
    Ok(CollisionReport {
        success: hamming_gh >= FAR && tags_equal && min_query_distance >= FAR,
        hamming_gh,
        hamming_gh_sampled,
        tag_g,
        tag_h,
        tags_equal,
        min_query_distance,
        min_query_distance_sampled,
        sampled_agree,
        dom_size: c.g.dom_size(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forgery {
    /// `F(f_{x1})`, the tag the adversary saw.
    pub predicted: Bits,
    /// `F(f_{x2})`, computed out of band.
    pub actual: Bits,
}

impl Forgery {
    pub fn holds(&self) -> bool {
        self.predicted == self.actual
    }
}

/// Predicts the tag of `f_{x2}` as the tag of `f_{x1}`.
pub fn forge(
    target: &mut dyn FunctionalOracle,
    x1: &Bits,
    x2: &Bits,
) -> Result<Forgery, AttackError> {
    let predicted = extended_query(target, x1)?;
    let actual = extended_query(target, x2)?;
    Ok(Forgery { predicted, actual })
}
