use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{block_shift, linsof};
use crate::bits::Bits;
use crate::games::{bang, lolli, oracle_game, tstr_game, Base, Game, Move, Step};
use crate::influence::{AlgorithmA, AlgorithmParams, InfluenceSchedule, Status};
use crate::poly::Poly;
use crate::strategies::{ProbStrategy, Session, StepMeter, Strategy, StrategyError};

/// Coins read from the oracle to seed the adversary's sampling.
pub const INFVAR_SEED_BITS: u64 = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct InfvarConfig {
    pub q: Poly,
    pub p: Poly,
    /// `N`.
    pub big_n: Poly,
    pub eps: f64,
    pub delta: f64,
    pub schedule: InfluenceSchedule,
    /// Copies `s` of the target available to the adversary.
    pub sessions: Poly,
}

impl InfvarConfig {
    pub fn algorithm(&self, n: u64) -> AlgorithmParams {
        AlgorithmParams {
            input_len: self.big_n.eval_usize(n),
            output_len: self.p.eval_usize(n),
            depth: self.q.eval_usize(n),
            eps: self.eps,
            delta: self.delta,
            schedule: self.schedule,
        }
    }

    /// A constant `s` large enough for any run at `n`.
    pub fn sessions_for(&self, n: u64) -> Poly {
        Poly::constant(self.algorithm(n).max_queries())
    }
}

/// The adversary on `!_s linsof(q, p) -o TStr_N`, reading
/// [`INFVAR_SEED_BITS`] coins: runs the influential-variable loop against
/// `x ↦ F(f_x)`, opening a fresh copy of the target per query, and answers
/// with the ternary encoding of the resulting partial assignment.
pub fn infvar_strategy(config: InfvarConfig) -> ProbStrategy {
    ProbStrategy::new(Arc::new(Infvar { config })).expect("oracle game on the left")
}

#[derive(Debug, Clone)]
struct Infvar {
    config: InfvarConfig,
}

impl Strategy for Infvar {
    fn game(&self) -> Game {
        let c = &self.config;
        lolli(
            oracle_game(Poly::constant(INFVAR_SEED_BITS)),
            lolli(
                bang(c.sessions.clone(), linsof(c.q.clone(), c.p.clone())),
                tstr_game(c.big_n.clone()),
            ),
        )
    }

    fn budget(&self) -> Poly {
        self.config.big_n.clone() + Poly::id() + Poly::constant(8)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(InfvarSession {
            params: self.config.algorithm(n),
            n,
            seed: Vec::new(),
            machine: None,
            copy: 0,
        })
    }
}

#[derive(Debug, Clone)]
struct InfvarSession {
    params: AlgorithmParams,
    n: u64,
    seed: Vec<bool>,
    machine: Option<AlgorithmA>,
    copy: u32,
}

fn in_copy(m: Move, c: u32) -> Move {
    m.copy(c).left().right()
}

impl InfvarSession {
    fn proceed(&mut self, status: Status, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        let a = self.machine.as_ref().expect("running");
        match status {
            Status::Query => {
                self.copy += 1;
                Ok(in_copy(Move::question().right(), self.copy))
            }
            Status::Done => match a.result().expect("finished") {
                Ok(out) => {
                    meter.tick(out.assignment.len() as u64)?;
                    Ok(Move::answer(out.assignment.to_word()).right().right())
                }
                Err(e) => Err(StrategyError::Undefined(format!("{e}"))),
            },
        }
    }

    fn machine(&mut self, m: &Move) -> Result<&mut AlgorithmA, StrategyError> {
        self.machine
            .as_mut()
            .ok_or_else(|| StrategyError::undefined(m))
    }
}

impl Session for InfvarSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        let path = m.path.as_slice();
        match (path, &m.base) {
            ([Step::Right, Step::Right], Base::Question) if self.seed.is_empty() => {
                Ok(Move::question().left())
            }
            ([Step::Left], Base::Answer(w)) if self.machine.is_none() => {
                self.seed
                    .push(w.as_bit().ok_or_else(|| StrategyError::undefined(m))?);
                if (self.seed.len() as u64) < INFVAR_SEED_BITS {
                    return Ok(Move::question().left());
                }
                let mut bytes = [0u8; 32];
                for (i, &b) in self.seed.iter().enumerate() {
                    bytes[i / 8] |= (b as u8) << (i % 8);
                }
                block_shift(self.n, self.params.input_len as u64)
                    .map_err(|e| StrategyError::Undefined(format!("{e}")))?;
                let mut a = AlgorithmA::new(self.params, ChaCha8Rng::from_seed(bytes));
                let status = a.resume(None);
                self.machine = Some(a);
                self.proceed(status, meter)
            }
            ([Step::Right, Step::Left, Step::Copy(c), rest @ ..], base) if *c == self.copy => {
                match (rest, base) {
                    ([Step::Left, Step::Copy(i), Step::Right], Base::Question) => {
                        Ok(in_copy(Move::question().left().copy(*i).left(), *c))
                    }
                    ([Step::Left, Step::Copy(i), Step::Left], Base::Answer(w)) => {
                        let pt = w.to_bits().ok_or_else(|| StrategyError::undefined(m))?;
                        let shift = self.n - (self.params.input_len as u64).trailing_zeros() as u64;
                        let a = self.machine(m)?;
                        let x = a
                            .pending_query()
                            .ok_or_else(|| StrategyError::undefined(m))?;
                        let b = x.get((pt.to_u64_msb() >> shift) as usize);
                        Ok(in_copy(Move::bit(b).right().copy(*i).left(), *c))
                    }
                    ([Step::Right], Base::Answer(w)) => {
                        let tag: Bits = w.to_bits().ok_or_else(|| StrategyError::undefined(m))?;
                        if tag.len() != self.params.output_len {
                            return Err(StrategyError::undefined(m));
                        }
                        let status = self.machine(m)?.resume(Some(&tag));
                        self.proceed(status, meter)
                    }
                    _ => Err(StrategyError::undefined(m)),
                }
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}
