use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rehead, unwrap_head, Session, StepMeter, Strategy, StrategyError, StrategyRef};
use crate::games::{bang, lolli, Game, Move, Step};
use crate::poly::Poly;

/// Exact probabilities.
pub type Prob = Ratio<u128>;

/// Where randomized sessions get their coins.
pub trait RandomSource {
    /// Uniform in `0..k`, `k ≥ 1`.
    fn below(&mut self, k: u64) -> u64;

    fn bit(&mut self) -> bool {
        self.below(2) == 1
    }
}

/// Coins from a pseudorandom generator.
#[derive(Debug, Clone)]
pub struct RngSource<R>(pub R);

impl RngSource<ChaCha8Rng> {
    pub fn seeded(seed: u64) -> Self {
        RngSource(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl<R: RngCore> RandomSource for RngSource<R> {
    fn below(&mut self, k: u64) -> u64 {
        self.0.gen_range(0..k)
    }

    fn bit(&mut self) -> bool {
        self.0.next_u32() & 1 == 1
    }
}

/// A replayable sequence of choices, for exhaustive enumeration of the
/// coin outcomes of a deterministic-given-coins computation.
///
/// The first run takes choice 0 everywhere; [`ChoiceTape::advance`] moves to
/// the next branch in depth-first order.
#[derive(Debug, Clone, Default)]
pub struct ChoiceTape {
    choices: Vec<(u64, u64)>,
    pos: usize,
}

impl ChoiceTape {
    pub fn new() -> Self {
        ChoiceTape::default()
    }

    /// Probability of the branch just run, `None` on overflow.
    pub fn weight(&self) -> Option<Prob> {
        let mut den: u128 = 1;
        for &(_, k) in &self.choices[..self.pos] {
            den = den.checked_mul(u128::from(k))?;
        }
        Some(Prob::new(1, den))
    }

    pub fn choices(&self) -> impl Iterator<Item = u64> + '_ {
        self.choices[..self.pos].iter().map(|&(c, _)| c)
    }

    /// Moves to the next unexplored branch; `false` when all are done.
    pub fn advance(&mut self) -> bool {
        self.choices.truncate(self.pos);
        self.pos = 0;
        while let Some((c, k)) = self.choices.pop() {
            if c + 1 < k {
                self.choices.push((c + 1, k));
                return true;
            }
        }
        false
    }
}

impl RandomSource for ChoiceTape {
    fn below(&mut self, k: u64) -> u64 {
        let c = if self.pos < self.choices.len() {
            debug_assert_eq!(self.choices[self.pos].1, k, "replay diverged");
            self.choices[self.pos].0
        } else {
            self.choices.push((0, k));
            0
        };
        self.pos += 1;
        c
    }
}

/// Runs `run` once per coin branch and returns each result with its exact
/// probability. At most `limit` branches are explored.
pub fn enumerate_choices<T>(
    limit: u64,
    mut run: impl FnMut(&mut dyn RandomSource) -> Result<T, StrategyError>,
) -> Result<Vec<(Prob, T)>, StrategyError> {
    let too_large = StrategyError::EnumerationTooLarge { limit };
    let mut tape = ChoiceTape::new();
    let mut out = Vec::new();
    loop {
        let value = run(&mut tape)?;
        let w = tape.weight().ok_or_else(|| too_large.clone())?;
        out.push((w, value));
        if out.len() as u64 > limit {
            return Err(too_large);
        }
        if !tape.advance() {
            return Ok(out);
        }
    }
}

pub trait RandomizedSession: Send {
    fn respond(
        &mut self,
        m: &Move,
        rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError>;

    fn fork(&self) -> Box<dyn RandomizedSession>;
}

/// A strategy on a game `G` that may flip coins.
pub trait Randomized: Send + Sync {
    fn game(&self) -> Game;

    fn budget(&self) -> Poly;

    fn start(&self, n: u64) -> Box<dyn RandomizedSession>;
}

pub type RandomizedRef = Arc<dyn Randomized>;

/// A deterministic strategy viewed as a randomized one that never flips.
pub struct Deterministic(pub StrategyRef);

impl core::fmt::Debug for Deterministic {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Deterministic({})", self.0.game())
    }
}

impl Randomized for Deterministic {
    fn game(&self) -> Game {
        self.0.game()
    }

    fn budget(&self) -> Poly {
        self.0.budget()
    }

    fn start(&self, n: u64) -> Box<dyn RandomizedSession> {
        Box::new(DeterministicSession(self.0.start(n)))
    }
}

struct DeterministicSession(Box<dyn Session>);

impl RandomizedSession for DeterministicSession {
    fn respond(
        &mut self,
        m: &Move,
        _rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        self.0.respond(m, meter)
    }

    fn fork(&self) -> Box<dyn RandomizedSession> {
        Box::new(DeterministicSession(self.0.fork()))
    }
}

/// A deterministic strategy on `O^p -o G`, read as a randomized strategy
/// on `G` whose coins are the oracle answers.
#[derive(Clone)]
pub struct ProbStrategy {
    inner: StrategyRef,
    oracle: Poly,
    outcome: Game,
}

impl core::fmt::Debug for ProbStrategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "ProbStrategy({})", self.inner.game())
    }
}

impl ProbStrategy {
    /// Fails unless the strategy's game has the form `oracle(p) -o G`.
    pub fn new(inner: StrategyRef) -> Result<Self, StrategyError> {
        match inner.game() {
            Game::Lolli(o, g) => match *o {
                Game::Oracle(p) => Ok(ProbStrategy {
                    inner,
                    oracle: p,
                    outcome: *g,
                }),
                other => Err(StrategyError::Mismatch(
                    other.to_string(),
                    "oracle(p)".to_string(),
                )),
            },
            other => Err(StrategyError::Mismatch(
                other.to_string(),
                "oracle(p) -o G".to_string(),
            )),
        }
    }

    pub fn inner(&self) -> &StrategyRef {
        &self.inner
    }

    pub fn oracle_budget(&self) -> &Poly {
        &self.oracle
    }

    pub fn outcome_game(&self) -> &Game {
        &self.outcome
    }
}

impl Randomized for ProbStrategy {
    fn game(&self) -> Game {
        self.outcome.clone()
    }

    fn budget(&self) -> Poly {
        (self.inner.budget() + Poly::constant(1)) * (self.oracle.clone() + Poly::constant(1))
    }

    fn start(&self, n: u64) -> Box<dyn RandomizedSession> {
        Box::new(ProbSession {
            inner: self.inner.start(n),
            budget: self.inner.budget(),
        })
    }
}

struct ProbSession {
    inner: Box<dyn Session>,
    budget: Poly,
}

impl RandomizedSession for ProbSession {
    fn respond(
        &mut self,
        m: &Move,
        rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        let mut msg = m.clone().right();
        loop {
            let r = super::respond_metered(&mut *self.inner, &msg, &self.budget, meter)?;
            match r.head() {
                Some(Step::Right) => return Ok(unwrap_head(&r)),
                Some(Step::Left) if r.path.len() == 1 && r.is_question() => {
                    msg = Move::bit(rand.bit()).left();
                }
                _ => return Err(StrategyError::illegal(&r)),
            }
        }
    }

    fn fork(&self) -> Box<dyn RandomizedSession> {
        Box::new(ProbSession {
            inner: self.inner.fork(),
            budget: self.budget.clone(),
        })
    }
}

/// `!_p f` with randomness resolved once: every copy of `f` reads the same
/// oracle answers, which are asked for only the first time any copy needs
/// them.
pub fn bang_strategy(p: Poly, f: &ProbStrategy) -> ProbStrategy {
    let inner: StrategyRef = Arc::new(SharedBang {
        p,
        f: f.inner.clone(),
        oracle: f.oracle.clone(),
        outcome: f.outcome.clone(),
    });
    ProbStrategy::new(inner).expect("banged strategy keeps its oracle")
}

struct SharedBang {
    p: Poly,
    f: StrategyRef,
    oracle: Poly,
    outcome: Game,
}

impl Strategy for SharedBang {
    fn game(&self) -> Game {
        lolli(
            Game::Oracle(self.oracle.clone()),
            bang(self.p.clone(), self.outcome.clone()),
        )
    }

    fn budget(&self) -> Poly {
        (self.f.budget() + Poly::constant(1)) * (self.oracle.clone() + Poly::constant(1))
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(SharedBangSession {
            f: self.f.clone(),
            budget: self.f.budget(),
            n,
            cache: Vec::new(),
            copies: Vec::new(),
            waiting: None,
        })
    }
}

struct CopyState {
    session: Box<dyn Session>,
    read: usize,
}

struct SharedBangSession {
    f: StrategyRef,
    budget: Poly,
    n: u64,
    cache: Vec<bool>,
    copies: Vec<CopyState>,
    waiting: Option<usize>,
}

impl SharedBangSession {
    fn drive(
        &mut self,
        c: usize,
        mut msg: Move,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        loop {
            meter.tick(1)?;
            let copy = &mut self.copies[c];
            let r = super::respond_metered(&mut *copy.session, &msg, &self.budget, meter)?;
            match r.head() {
                Some(Step::Right) => return Ok(rehead(&r, Step::Copy(c as u32 + 1)).right()),
                Some(Step::Left) if r.is_question() => {
                    if let Some(&b) = self.cache.get(copy.read) {
                        copy.read += 1;
                        msg = Move::bit(b).left();
                    } else {
                        self.waiting = Some(c);
                        return Ok(Move::question().left());
                    }
                }
                _ => return Err(StrategyError::illegal(&r)),
            }
        }
    }
}

impl Session for SharedBangSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        match m.head() {
            Some(Step::Left) => {
                let c = self
                    .waiting
                    .take()
                    .ok_or_else(|| StrategyError::undefined(m))?;
                let b = m
                    .word()
                    .and_then(|w| w.as_bit())
                    .ok_or_else(|| StrategyError::undefined(m))?;
                self.cache.push(b);
                self.copies[c].read += 1;
                self.drive(c, Move::bit(b).left(), meter)
            }
            Some(Step::Right) => {
                let inner = unwrap_head(m);
                let Some(Step::Copy(i)) = inner.head() else {
                    return Err(StrategyError::undefined(m));
                };
                let c = i as usize - 1;
                if c == self.copies.len() {
                    self.copies.push(CopyState {
                        session: self.f.start(self.n),
                        read: 0,
                    });
                }
                if c >= self.copies.len() {
                    return Err(StrategyError::undefined(m));
                }
                self.drive(c, unwrap_head(&inner).right(), meter)
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(SharedBangSession {
            f: self.f.clone(),
            budget: self.budget.clone(),
            n: self.n,
            cache: self.cache.clone(),
            copies: self
                .copies
                .iter()
                .map(|c| CopyState {
                    session: c.session.fork(),
                    read: c.read,
                })
                .collect(),
            waiting: self.waiting,
        })
    }
}

/// Asks the single question of an observable game and returns the answer.
pub fn observe(
    f: &dyn Randomized,
    n: u64,
    rand: &mut dyn RandomSource,
) -> Result<Move, StrategyError> {
    let mut session = f.start(n);
    let mut meter = StepMeter::for_budget(&f.budget(), n);
    session.respond(&Move::question(), rand, &mut meter)
}

/// Exact distribution of the answer of an observable game, over every
/// coin branch (at most `limit` of them).
pub fn observe_distribution(
    f: &dyn Randomized,
    n: u64,
    limit: u64,
) -> Result<BTreeMap<Move, Prob>, StrategyError> {
    let runs = enumerate_choices(limit, |rand| observe(f, n, rand))?;
    let mut out: BTreeMap<Move, Prob> = BTreeMap::new();
    for (w, m) in runs {
        let e = out.entry(m).or_insert_with(Prob::zero);
        *e += w;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObserveMode {
    /// Enumerates every coin branch, up to 2^24 of them.
    Exact,
    MonteCarlo {
        trials: u64,
        seed: u64,
    },
}

pub const EXACT_BRANCH_LIMIT: u64 = 1 << 24;

/// Probability that `f` answers `outcome`.
pub fn observe_prob(
    f: &dyn Randomized,
    n: u64,
    outcome: &Move,
    mode: ObserveMode,
) -> Result<f64, StrategyError> {
    match mode {
        ObserveMode::Exact => {
            let p = observe_distribution(f, n, EXACT_BRANCH_LIMIT)?
                .remove(outcome)
                .unwrap_or_else(Prob::zero);
            Ok(prob_to_f64(&p))
        }
        ObserveMode::MonteCarlo { trials, seed } => observe_prob_mc(f, n, outcome, trials, seed),
    }
}

/// Empirical frequency of `outcome` over `trials` seeded runs.
pub fn observe_prob_mc(
    f: &dyn Randomized,
    n: u64,
    outcome: &Move,
    trials: u64,
    seed: u64,
) -> Result<f64, StrategyError> {
    let mut hits = 0u64;
    for t in 0..trials {
        let mut rand = RngSource(crate::mix::trial_rng(seed, t));
        if observe(f, n, &mut rand)? == *outcome {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials.max(1) as f64)
}

pub fn prob_to_f64(p: &Prob) -> f64 {
    if p.is_zero() {
        return 0.0;
    }
    if p.is_one() {
        return 1.0;
    }
    p.numer().to_f64().unwrap_or(0.0) / p.denom().to_f64().unwrap_or(1.0)
}
