use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{canonical_argument, logsof};
use crate::bits::Bits;
use crate::games::{bang, bool_game, lolli, oracle_game, Base, Game, Move, Step};
use crate::poly::Poly;
use crate::strategies::{ProbStrategy, Session, StepMeter, Strategy, StrategyError};

/// The built-in distinguishers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdversaryKind {
    /// Outputs 0 without touching the functional.
    Ignore,
    /// Argument constantly 0; outputs the first bit of the answer.
    FirstBit,
    /// Two sessions with the parity argument; outputs whether the answers
    /// agree.
    Consistency,
    /// Argument constantly 0; outputs the last bit of the first coordinate
    /// queried.
    FirstQuery,
    /// A random argument drawn from the oracle; outputs the parity of the
    /// answer.
    RandomParity,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 5] = [
        AdversaryKind::Ignore,
        AdversaryKind::FirstBit,
        AdversaryKind::Consistency,
        AdversaryKind::FirstQuery,
        AdversaryKind::RandomParity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::Ignore => "ignore",
            AdversaryKind::FirstBit => "first-bit",
            AdversaryKind::Consistency => "consistency",
            AdversaryKind::FirstQuery => "first-query",
            AdversaryKind::RandomParity => "random-parity",
        }
    }

    fn coins(self) -> Poly {
        match self {
            AdversaryKind::RandomParity => Poly::constant(2) * Poly::id() + Poly::constant(1),
            _ => Poly::constant(0),
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdversaryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| alloc::format!("unknown adversary `{s}`"))
    }
}

/// The distinguisher `kind` on `O^k -o (!_s logsof(p) -o B)`.
pub fn adversary(kind: AdversaryKind, s: Poly, p: Poly) -> ProbStrategy {
    ProbStrategy::new(Arc::new(Adversary { kind, s, p })).expect("oracle game on the left")
}

#[derive(Debug, Clone)]
struct Adversary {
    kind: AdversaryKind,
    s: Poly,
    p: Poly,
}

impl Strategy for Adversary {
    fn game(&self) -> Game {
        lolli(
            oracle_game(self.kind.coins()),
            lolli(bang(self.s.clone(), logsof(self.p.clone())), bool_game()),
        )
    }

    fn budget(&self) -> Poly {
        self.p.clone() + Poly::id() + Poly::constant(4)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(AdversarySession {
            kind: self.kind,
            sessions: self.s.eval(n),
            tags: Vec::new(),
            first: None,
            coins: BTreeMap::new(),
            pending: None,
        })
    }
}

#[derive(Debug, Clone)]
struct AdversarySession {
    kind: AdversaryKind,
    sessions: u64,
    tags: Vec<Bits>,
    first: Option<Bits>,
    coins: BTreeMap<Bits, bool>,
    pending: Option<(u32, u32, Bits)>,
}

fn open(c: u32) -> Move {
    Move::question().right().copy(c).left().right()
}

fn argument_answer(c: u32, i: u32, b: bool) -> Move {
    Move::bit(b).right().copy(i).left().copy(c).left().right()
}

fn output(b: bool) -> Move {
    Move::bit(b).right().right()
}

impl AdversarySession {
    fn decide(&self) -> bool {
        match self.kind {
            AdversaryKind::Ignore => false,
            AdversaryKind::FirstBit => !self.tags[0].is_empty() && self.tags[0].get(0),
            AdversaryKind::Consistency => self.tags.windows(2).all(|w| w[0] == w[1]),
            AdversaryKind::FirstQuery => self
                .first
                .as_ref()
                .is_some_and(|c| !c.is_empty() && c.get(c.len() - 1)),
            AdversaryKind::RandomParity => self.tags[0].count_ones() % 2 == 1,
        }
    }
}

impl Session for AdversarySession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        match (m.path.as_slice(), &m.base) {
            ([Step::Right, Step::Right], Base::Question) => match self.kind {
                AdversaryKind::Ignore => Ok(output(false)),
                _ if self.sessions == 0 => Ok(output(false)),
                _ => Ok(open(1)),
            },
            (
                [Step::Right, Step::Left, Step::Copy(c), Step::Left, Step::Copy(i), Step::Right],
                Base::Question,
            ) => Ok(Move::question()
                .left()
                .copy(*i)
                .left()
                .copy(*c)
                .left()
                .right()),
            (
                [Step::Right, Step::Left, Step::Copy(c), Step::Left, Step::Copy(i), Step::Left],
                Base::Answer(w),
            ) => {
                let coord = w.to_bits().ok_or_else(|| StrategyError::undefined(m))?;
                meter.tick(coord.len() as u64)?;
                if self.first.is_none() {
                    self.first = Some(coord.clone());
                }
                let b = match self.kind {
                    AdversaryKind::Consistency => canonical_argument(&coord),
                    AdversaryKind::RandomParity => match self.coins.get(&coord) {
                        Some(&b) => b,
                        None => {
                            self.pending = Some((*c, *i, coord));
                            return Ok(Move::question().left());
                        }
                    },
                    _ => false,
                };
                Ok(argument_answer(*c, *i, b))
            }
            ([Step::Left], Base::Answer(w)) => {
                let b = w.as_bit().ok_or_else(|| StrategyError::undefined(m))?;
                let (c, i, coord) = self
                    .pending
                    .take()
                    .ok_or_else(|| StrategyError::undefined(m))?;
                self.coins.insert(coord, b);
                Ok(argument_answer(c, i, b))
            }
            ([Step::Right, Step::Left, Step::Copy(c), Step::Right], Base::Answer(w)) => {
                let tag = w.to_bits().ok_or_else(|| StrategyError::undefined(m))?;
                meter.tick(tag.len() as u64)?;
                self.tags.push(tag);
                let next = *c as u64 + 1;
                if self.kind == AdversaryKind::Consistency && next <= 2 && next <= self.sessions {
                    return Ok(open(next as u32));
                }
                Ok(output(self.decide()))
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}
