use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{alpha, beta, domain_size, logsof, FirstOrderPrf};
use crate::bits::Bits;
use crate::games::{bang, lolli, str_game, str_le_game, Base, Game, Move, Step};
use crate::poly::{ceil_lg, Poly};
use crate::strategies::{
    compose, examples::mult_strategy, ProbStrategy, Session, StepMeter, Strategy, StrategyError,
    StrategyRef,
};

fn oracle_copies() -> Poly {
    Poly::id() + Poly::constant(1)
}

fn first_order_game(w: Poly) -> Game {
    bang(oracle_copies(), lolli(str_le_game(Poly::id()), str_game(w)))
}

fn word_bits(m: &Move) -> Result<Bits, StrategyError> {
    m.word()
        .and_then(|w| w.to_bits())
        .ok_or_else(|| StrategyError::undefined(m))
}

/// `first2second` on `!_{ι+1}(StrLe_ι -o Str_w) -o logsof(p)`.
///
/// Round `i` asks oracle copy `i` at `z_1..z_{i-1}`, turns the reply `j_i`
/// into a fresh coordinate with [`alpha`] and queries the argument there
/// for `z_i`. Copy `n+1` is asked at `z_1..z_n` and its reply `v` is
/// answered as `β(v)`.
pub fn first2second(w: Poly, p: Poly) -> StrategyRef {
    Arc::new(First2Second { w, p })
}

#[derive(Debug, Clone)]
struct First2Second {
    w: Poly,
    p: Poly,
}

impl Strategy for First2Second {
    fn game(&self) -> Game {
        lolli(first_order_game(self.w.clone()), logsof(self.p.clone()))
    }

    fn budget(&self) -> Poly {
        Poly::id() * Poly::constant(2) + self.w.clone() + self.p.clone() + Poly::constant(4)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(F2sSession {
            n,
            lg: ceil_lg(n) as usize,
            d: domain_size(n),
            p: self.p.eval_usize(n),
            z: Bits::zeros(0),
            used: Vec::new(),
            round: 0,
        })
    }
}

#[derive(Debug, Clone)]
struct F2sSession {
    n: u64,
    lg: usize,
    d: u64,
    p: usize,
    z: Bits,
    used: Vec<u64>,
    round: u32,
}

impl F2sSession {
    fn ask_oracle(&mut self) -> Move {
        self.round += 1;
        Move::question().right().copy(self.round).left()
    }
}

impl Session for F2sSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        let last = self.n as u32 + 1;
        match (m.path.as_slice(), &m.base) {
            ([Step::Right, Step::Right], Base::Question) if self.round == 0 => {
                Ok(self.ask_oracle())
            }
            ([Step::Left, Step::Copy(i), Step::Left], Base::Question) if *i == self.round => {
                meter.tick(self.z.len() as u64)?;
                Ok(Move::bits(&self.z).left().copy(*i).left())
            }
            ([Step::Left, Step::Copy(i), Step::Right], Base::Answer(_))
                if *i == self.round && *i < last =>
            {
                let j = word_bits(m)?;
                meter.tick(j.len() as u64 + self.d)?;
                let c = alpha(&j, &self.used, self.d);
                self.used.push(c);
                Ok(Move::question().right().copy(*i).left().right())
            }
            ([Step::Left, Step::Copy(i), Step::Right], Base::Answer(_)) if *i == last => {
                let v = word_bits(m)?;
                let out = beta(&v, self.p).map_err(|_| StrategyError::undefined(m))?;
                meter.tick(out.len() as u64)?;
                Ok(Move::bits(&out).right().right())
            }
            ([Step::Right, Step::Left, Step::Copy(i), Step::Left], Base::Question)
                if *i == self.round =>
            {
                let c = self.used[*i as usize - 1];
                meter.tick(self.lg as u64)?;
                Ok(Move::bits(&Bits::from_u64_msb(c, self.lg))
                    .left()
                    .copy(*i)
                    .left()
                    .right())
            }
            ([Step::Right, Step::Left, Step::Copy(i), Step::Right], Base::Answer(w))
                if *i == self.round =>
            {
                let b = w.as_bit().ok_or_else(|| StrategyError::undefined(m))?;
                self.z.push(b);
                Ok(self.ask_oracle())
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// `f_F` on `Str_ι -o !_{ι+1}(StrLe_ι -o Str_w)`: asks for the key once,
/// then answers each copy's input `x` with `F(key, x)`.
pub fn lift_prf(prf: Arc<dyn FirstOrderPrf>) -> StrategyRef {
    Arc::new(LiftPrf { prf })
}

#[derive(Debug, Clone)]
struct LiftPrf {
    prf: Arc<dyn FirstOrderPrf>,
}

impl Strategy for LiftPrf {
    fn game(&self) -> Game {
        lolli(str_game(Poly::id()), first_order_game(self.prf.width()))
    }

    fn budget(&self) -> Poly {
        Poly::id() + self.prf.width() + Poly::constant(4)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(LiftSession {
            prf: self.prf.clone(),
            key: None,
            waiting: None,
        })
    }
}

#[derive(Debug, Clone)]
struct LiftSession {
    prf: Arc<dyn FirstOrderPrf>,
    key: Option<Bits>,
    waiting: Option<u32>,
}

fn ask_input(i: u32) -> Move {
    Move::question().left().copy(i).right()
}

impl Session for LiftSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        match (m.path.as_slice(), &m.base) {
            ([Step::Right, Step::Copy(i), Step::Right], Base::Question) => match self.key {
                Some(_) => Ok(ask_input(*i)),
                None => {
                    self.waiting = Some(*i);
                    Ok(Move::question().left())
                }
            },
            ([Step::Left], Base::Answer(_)) => {
                let i = self
                    .waiting
                    .take()
                    .ok_or_else(|| StrategyError::undefined(m))?;
                self.key = Some(word_bits(m)?);
                Ok(ask_input(i))
            }
            ([Step::Right, Step::Copy(i), Step::Left], Base::Answer(_)) => {
                let key = self
                    .key
                    .as_ref()
                    .ok_or_else(|| StrategyError::undefined(m))?;
                let x = word_bits(m)?;
                let y = self.prf.eval(key, &x);
                meter.tick(y.len() as u64)?;
                Ok(Move::bits(&y).right().copy(*i).right())
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// `mult ; f_F ; first2second` on `O^ι -o logsof(p)`: a uniformly random
/// key read from the oracle, then the lifted PRF.
pub fn candidate(prf: Arc<dyn FirstOrderPrf>, p: Poly) -> Result<ProbStrategy, StrategyError> {
    let w = prf.width();
    let keyed = compose(mult_strategy(Poly::id()), lift_prf(prf))?;
    ProbStrategy::new(compose(keyed, first2second(w, p))?)
}
