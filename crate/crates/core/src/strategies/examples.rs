//! Small strategies used as examples and as test material.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{ProbStrategy, Session, StepMeter, Strategy, StrategyError, StrategyRef};
use crate::bits::Bits;
use crate::games::{bool_game, lolli, oracle_game, str_game, Base, Game, Letter, Move, Step, Word};
use crate::mix::mix64;
use crate::poly::Poly;

fn oracle_bit(m: &Move) -> Option<bool> {
    match (m.path.as_slice(), &m.base) {
        ([Step::Left], Base::Answer(w)) => w.as_bit(),
        _ => None,
    }
}

fn is_right_question(m: &Move) -> bool {
    m.path.as_slice() == [Step::Right] && m.is_question()
}

/// `once` on `O^p -o Str_p`: one coin `b`, answer `b^p(n)`.
pub fn once(p: Poly) -> ProbStrategy {
    ProbStrategy::new(Arc::new(Once { p })).expect("oracle game on the left")
}

#[derive(Debug, Clone)]
struct Once {
    p: Poly,
}

impl Strategy for Once {
    fn game(&self) -> Game {
        lolli(oracle_game(self.p.clone()), str_game(self.p.clone()))
    }

    fn budget(&self) -> Poly {
        self.p.clone() + Poly::constant(2)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(OnceSession {
            len: self.p.eval_usize(n),
        })
    }
}

#[derive(Debug, Clone)]
struct OnceSession {
    len: usize,
}

impl Session for OnceSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if is_right_question(m) {
            return Ok(Move::question().left());
        }
        let b = oracle_bit(m).ok_or_else(|| StrategyError::undefined(m))?;
        meter.tick(self.len as u64)?;
        let s = if b {
            Bits::ones(self.len)
        } else {
            Bits::zeros(self.len)
        };
        Ok(Move::bits(&s).right())
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// `mult` on `O^p -o Str_p`: `p(n)` coins, answered as the string of them.
pub fn mult(p: Poly) -> ProbStrategy {
    ProbStrategy::new(mult_strategy(p)).expect("oracle game on the left")
}

/// The deterministic strategy underlying [`mult`].
pub fn mult_strategy(p: Poly) -> StrategyRef {
    Arc::new(Mult { p })
}

#[derive(Debug, Clone)]
struct Mult {
    p: Poly,
}

impl Strategy for Mult {
    fn game(&self) -> Game {
        lolli(oracle_game(self.p.clone()), str_game(self.p.clone()))
    }

    fn budget(&self) -> Poly {
        self.p.clone() + Poly::constant(2)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(MultSession {
            len: self.p.eval_usize(n),
            got: Vec::new(),
        })
    }
}

#[derive(Debug, Clone)]
struct MultSession {
    len: usize,
    got: Vec<bool>,
}

impl Session for MultSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if !is_right_question(m) {
            let b = oracle_bit(m).ok_or_else(|| StrategyError::undefined(m))?;
            self.got.push(b);
        }
        if self.got.len() < self.len {
            Ok(Move::question().left())
        } else {
            meter.tick(self.len as u64)?;
            Ok(Move::bits(&Bits::from_bools(&self.got)).right())
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// Bitwise negation on `Str_p -o Str_p`.
pub fn negate(p: Poly) -> StrategyRef {
    Arc::new(Negate { p })
}

#[derive(Debug, Clone)]
struct Negate {
    p: Poly,
}

impl Strategy for Negate {
    fn game(&self) -> Game {
        lolli(str_game(self.p.clone()), str_game(self.p.clone()))
    }

    fn budget(&self) -> Poly {
        self.p.clone() + Poly::constant(2)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(NegateSession)
    }
}

#[derive(Debug, Clone)]
struct NegateSession;

impl Session for NegateSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if is_right_question(m) {
            return Ok(Move::question().left());
        }
        match (m.path.as_slice(), &m.base) {
            ([Step::Left], Base::Answer(w)) => {
                meter.tick(w.len() as u64)?;
                let flipped =
                    w.0.iter()
                        .map(|l| match l {
                            Letter::Zero => Letter::One,
                            Letter::One => Letter::Zero,
                            Letter::Bottom => Letter::Bottom,
                        })
                        .collect();
                Ok(Move::answer(Word(flipped)).right())
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// Always answers `b` on the boolean game.
pub fn constant_bool(b: bool) -> StrategyRef {
    Arc::new(ConstantBool(b))
}

#[derive(Debug, Clone, Copy)]
struct ConstantBool(bool);

impl Strategy for ConstantBool {
    fn game(&self) -> Game {
        bool_game()
    }

    fn budget(&self) -> Poly {
        Poly::constant(1)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(*self)
    }
}

impl Session for ConstantBool {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if m.path.is_empty() && m.is_question() {
            Ok(Move::bit(self.0))
        } else {
            Err(StrategyError::undefined(m))
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(*self)
    }
}

/// Answers `b` on `O^0 -o B` without touching the oracle.
pub fn ignoring(b: bool) -> ProbStrategy {
    ProbStrategy::new(Arc::new(Ignoring(b))).expect("oracle game on the left")
}

#[derive(Debug, Clone, Copy)]
struct Ignoring(bool);

impl Strategy for Ignoring {
    fn game(&self) -> Game {
        lolli(oracle_game(Poly::constant(0)), bool_game())
    }

    fn budget(&self) -> Poly {
        Poly::constant(1)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(*self)
    }
}

impl Session for Ignoring {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if is_right_question(m) {
            Ok(Move::bit(self.0).right())
        } else {
            Err(StrategyError::undefined(m))
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(*self)
    }
}

/// One coin, returned as the boolean answer, on `O^1 -o B`.
pub fn fair_coin() -> ProbStrategy {
    ProbStrategy::new(Arc::new(FairCoin)).expect("oracle game on the left")
}

#[derive(Debug, Clone, Copy)]
struct FairCoin;

impl Strategy for FairCoin {
    fn game(&self) -> Game {
        lolli(oracle_game(Poly::constant(1)), bool_game())
    }

    fn budget(&self) -> Poly {
        Poly::constant(1)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(*self)
    }
}

impl Session for FairCoin {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if is_right_question(m) {
            return Ok(Move::question().left());
        }
        let b = oracle_bit(m).ok_or_else(|| StrategyError::undefined(m))?;
        Ok(Move::bit(b).right())
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(*self)
    }
}

/// Spins for `2^n` steps before answering `0` on the boolean game, with a
/// linear budget: rejected as soon as `2^n` outgrows it.
pub fn looper() -> StrategyRef {
    Arc::new(Looper)
}

#[derive(Debug, Clone, Copy)]
struct Looper;

impl Strategy for Looper {
    fn game(&self) -> Game {
        bool_game()
    }

    fn budget(&self) -> Poly {
        Poly::constant(4) * Poly::id() + Poly::constant(4)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(*self)
    }
}

impl Session for Looper {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        if !(m.path.is_empty() && m.is_question()) {
            return Err(StrategyError::undefined(m));
        }
        for _ in 0..1u64 << meter.n().min(40) {
            meter.tick(1)?;
        }
        Ok(Move::bit(false))
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(*self)
    }
}

/// A pseudorandom answer of a ground game, derived from `h`.
pub fn ground_answer(game: &Game, n: u64, h: u64) -> Move {
    let letters = |len: u64, radix: u64| -> Word {
        let mut state = h;
        Word(
            (0..len)
                .map(|k| {
                    if k % 16 == 0 {
                        state = mix64(state ^ k);
                    }
                    let digit = (state >> (4 * (k % 16))) % radix;
                    [Letter::Zero, Letter::One, Letter::Bottom][digit as usize]
                })
                .collect(),
        )
    };
    match game {
        Game::Unit => Move::star(),
        Game::Bool => Move::bit(h & 1 == 1),
        Game::Str(p) => Move::answer(letters(p.eval(n), 2)),
        Game::StrLe(p) => Move::answer(letters(mix64(h) % (p.eval(n) + 1), 2)),
        Game::TStr(p) => Move::answer(letters(p.eval(n), 3)),
        _ => panic!("ground_answer needs a ground game"),
    }
}

/// A seeded strategy on `A -o B` for ground games `A`, `B`: either answers
/// a constant, or asks `A` once and answers a seeded function of the reply.
pub fn table(left: Game, right: Game, seed: u64) -> StrategyRef {
    assert!(left.is_ground() && right.is_ground());
    Arc::new(Table { left, right, seed })
}

#[derive(Debug, Clone)]
struct Table {
    left: Game,
    right: Game,
    seed: u64,
}

impl Strategy for Table {
    fn game(&self) -> Game {
        lolli(self.left.clone(), self.right.clone())
    }

    fn budget(&self) -> Poly {
        self.left.length_bound() + self.right.length_bound() + Poly::constant(2)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(TableSession {
            right: self.right.clone(),
            seed: self.seed,
            n,
        })
    }
}

#[derive(Debug, Clone)]
struct TableSession {
    right: Game,
    seed: u64,
    n: u64,
}

impl Session for TableSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if is_right_question(m) {
            if mix64(self.seed).is_multiple_of(4) {
                let a = ground_answer(&self.right, self.n, mix64(self.seed ^ 0x5bd1));
                meter.tick(a.encoded_len())?;
                return Ok(a.right());
            }
            return Ok(Move::question().left());
        }
        match (m.path.as_slice(), &m.base) {
            ([Step::Left], base) if !matches!(base, Base::Question) => {
                let mut h = mix64(self.seed);
                match base {
                    Base::Answer(w) => {
                        for l in &w.0 {
                            h = mix64(h ^ (*l as u64 + 1));
                        }
                    }
                    _ => h = mix64(h ^ 7),
                }
                let a = ground_answer(&self.right, self.n, h);
                meter.tick(a.encoded_len())?;
                Ok(a.right())
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}
