//! Strategies as executable sessions.
//!
//! A [`Strategy`] is a factory of [`Session`]s, one per security parameter
//! and per run. A session is fed opponent moves in order and answers each
//! with a player move, so its state is the play so far. The partial
//! function `f_n` on plays is recovered by replaying a play through a fresh
//! session ([`run_with_budget`]); its characterizing play set by exploring
//! every opponent move with forked sessions ([`carac_plays`]).
//!
//! Every response runs under a [`StepMeter`] whose limit is the strategy's
//! budget polynomial at `n`. Exceeding it is how a strategy fails to be
//! polytime at that `n`.

mod compose;
pub mod examples;
mod prob;
#[cfg(test)]
mod tests;

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::games::{Game, GameError, Move, Play, Side, Step};
use crate::poly::Poly;

pub use compose::{apply, apply_randomized, bang_det, compose, copycat};
pub use prob::{
    bang_strategy, enumerate_choices, observe, observe_distribution, observe_prob, observe_prob_mc,
    prob_to_f64, ChoiceTape, Deterministic, ObserveMode, Prob, ProbStrategy, RandomSource,
    Randomized, RandomizedRef, RandomizedSession, RngSource, EXACT_BRANCH_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("step budget {budget} exceeded at n = {n}")]
    BudgetExceeded { n: u64, budget: u64 },
    #[error("no response to {0}")]
    Undefined(String),
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("composition deadlocked after {0}")]
    Deadlock(String),
    #[error("games do not compose: {0} against {1}")]
    Mismatch(String, String),
    #[error("move {0} of the play differs from the strategy's response")]
    OffPlay(usize),
    #[error("enumeration needs more than {limit} branches")]
    EnumerationTooLarge { limit: u64 },
    #[error(transparent)]
    Game(#[from] GameError),
}

impl StrategyError {
    pub(crate) fn undefined(m: &Move) -> Self {
        StrategyError::Undefined(m.to_string())
    }

    pub(crate) fn illegal(m: &Move) -> Self {
        StrategyError::IllegalMove(m.to_string())
    }
}

/// Counts abstract steps against a per-move limit.
#[derive(Debug, Clone)]
pub struct StepMeter {
    n: u64,
    used: u64,
    limit: u64,
}

impl StepMeter {
    pub fn new(n: u64, limit: u64) -> Self {
        StepMeter { n, used: 0, limit }
    }

    pub fn for_budget(budget: &Poly, n: u64) -> Self {
        StepMeter::new(n, budget.eval(n))
    }

    pub fn unlimited(n: u64) -> Self {
        StepMeter::new(n, u64::MAX)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn tick(&mut self, steps: u64) -> Result<(), StrategyError> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.limit {
            Err(StrategyError::BudgetExceeded {
                n: self.n,
                budget: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

/// One run of a strategy at a fixed `n`.
pub trait Session: Send {
    /// Answers the next opponent move.
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError>;

    /// An independent copy of the current state.
    fn fork(&self) -> Box<dyn Session>;
}

pub trait Strategy: Send + Sync {
    fn game(&self) -> Game;

    /// Per-move step limit.
    fn budget(&self) -> Poly;

    fn start(&self, n: u64) -> Box<dyn Session>;
}

pub type StrategyRef = Arc<dyn Strategy>;

/// Feeds `m` to `session` under a fresh meter for `budget` and adds the
/// steps spent to `outer`.
pub(crate) fn respond_metered(
    session: &mut dyn Session,
    m: &Move,
    budget: &Poly,
    outer: &mut StepMeter,
) -> Result<Move, StrategyError> {
    let mut inner = StepMeter::for_budget(budget, outer.n());
    let r = session.respond(m, &mut inner)?;
    outer.tick(inner.used())?;
    Ok(r)
}

/// `f_n(play)`: replays the opponent moves of the odd-length `play` and
/// returns the response to its last move.
///
/// Fails with [`StrategyError::OffPlay`] when an even position of `play`
/// is not what the strategy would have played, and with
/// [`StrategyError::BudgetExceeded`] when any response overruns the budget.
pub fn run_with_budget(f: &dyn Strategy, n: u64, play: &[Move]) -> Result<Move, StrategyError> {
    assert!(
        play.len() % 2 == 1,
        "the opponent moves last in the input play"
    );
    let budget = f.budget();
    let mut session = f.start(n);
    let mut last = None;
    for (k, pair) in play.chunks(2).enumerate() {
        let mut meter = StepMeter::for_budget(&budget, n);
        let r = session.respond(&pair[0], &mut meter)?;
        match pair.get(1) {
            Some(expected) if *expected != r => return Err(StrategyError::OffPlay(2 * k + 1)),
            Some(_) => {}
            None => last = Some(r),
        }
    }
    Ok(last.expect("odd-length play"))
}

/// The characterizing plays of `f` at `n`: every play reached when the
/// opponent ranges over all legal moves and `f` answers.
///
/// Also checks totality and legality of every response on the way.
pub fn carac_plays(
    f: &dyn Strategy,
    n: u64,
    limit: usize,
) -> Result<BTreeSet<Play>, StrategyError> {
    let game = f.game();
    let budget = f.budget();
    let opponent: Vec<Move> = game
        .alphabet(n, limit)?
        .into_iter()
        .filter(|m| game.side_of(m) == Some(Side::Opponent))
        .collect();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Play, Box<dyn Session>)> = alloc::vec![(Vec::new(), f.start(n))];
    while let Some((play, session)) = stack.pop() {
        for m in &opponent {
            let mut next = play.clone();
            next.push(m.clone());
            if !game.legal(n, &next) {
                continue;
            }
            let mut s = session.fork();
            let mut meter = StepMeter::for_budget(&budget, n);
            let r = s.respond(m, &mut meter)?;
            out.insert(next.clone());
            next.push(r.clone());
            if !game.legal(n, &next) {
                return Err(StrategyError::illegal(&r));
            }
            out.insert(next.clone());
            if out.len() > limit {
                return Err(StrategyError::EnumerationTooLarge {
                    limit: limit as u64,
                });
            }
            stack.push((next, s));
        }
        out.insert(play);
    }
    Ok(out)
}

/// Drives a session with a scripted opponent: each entry of `opponent`
/// is fed in order and the full play is returned.
pub fn play_against(f: &dyn Strategy, n: u64, opponent: &[Move]) -> Result<Play, StrategyError> {
    let budget = f.budget();
    let mut session = f.start(n);
    let mut play = Vec::with_capacity(2 * opponent.len());
    for m in opponent {
        let mut meter = StepMeter::for_budget(&budget, n);
        let r = session.respond(m, &mut meter)?;
        play.push(m.clone());
        play.push(r);
    }
    Ok(play)
}

/// Replaces the outermost step of `m`.
pub(crate) fn rehead(m: &Move, step: Step) -> Move {
    let mut out = m.clone();
    out.path[0] = step;
    out
}

/// Removes the outermost step of `m`.
pub(crate) fn unwrap_head(m: &Move) -> Move {
    let mut out = m.clone();
    out.path.remove(0);
    out
}
