use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{domain_size, logsof};
use crate::bits::Bits;
use crate::games::{bang, lolli, str_game, str_le_game, Base, Game, Move, Step};
use crate::poly::{ceil_lg, Poly};
use crate::strategies::{
    RandomSource, Randomized, RandomizedRef, RandomizedSession, StepMeter, StrategyError,
};

/// The random functional on `logsof(p)`: each query goes to a coordinate
/// uniform over the ones not yet queried, and the answer is uniform over
/// `{0,1}^p(n)`. Sampled lazily, one choice per tree node reached.
pub fn randsof(p: Poly) -> RandomizedRef {
    Arc::new(RandSof { p, copies: None })
}

/// `!_s randsof` with one functional shared by all copies: copies that see
/// the same argument answers make the same queries and give the same
/// answer.
pub fn randsof_banged(s: Poly, p: Poly) -> RandomizedRef {
    Arc::new(RandSof { p, copies: Some(s) })
}

#[derive(Debug, Clone)]
struct RandSof {
    p: Poly,
    copies: Option<Poly>,
}

impl Randomized for RandSof {
    fn game(&self) -> Game {
        match &self.copies {
            None => logsof(self.p.clone()),
            Some(s) => bang(s.clone(), logsof(self.p.clone())),
        }
    }

    fn budget(&self) -> Poly {
        Poly::id() * Poly::constant(2) + self.p.clone() + Poly::constant(4)
    }

    fn start(&self, n: u64) -> Box<dyn RandomizedSession> {
        Box::new(RandSofSession {
            banged: self.copies.is_some(),
            n,
            p: self.p.eval_usize(n),
            nodes: BTreeMap::new(),
            leaves: BTreeMap::new(),
            copies: Vec::new(),
        })
    }
}

/// The path of one copy through the shared tree: answers seen so far.
#[derive(Debug, Clone, Default)]
struct CopyPath {
    answers: Vec<bool>,
    round: u32,
}

#[derive(Debug, Clone)]
struct RandSofSession {
    banged: bool,
    n: u64,
    p: usize,
    nodes: BTreeMap<Vec<bool>, u64>,
    leaves: BTreeMap<Vec<bool>, Bits>,
    copies: Vec<CopyPath>,
}

impl RandSofSession {
    fn coordinate(&mut self, answers: &[bool], rand: &mut dyn RandomSource) -> u64 {
        if let Some(&c) = self.nodes.get(answers) {
            return c;
        }
        let used: Vec<u64> = (0..answers.len())
            .map(|k| self.nodes[&answers[..k]])
            .collect();
        let free: Vec<u64> = (0..domain_size(self.n))
            .filter(|c| !used.contains(c))
            .collect();
        let c = free[rand.below(free.len() as u64) as usize];
        self.nodes.insert(answers.to_vec(), c);
        c
    }

    fn answer(&mut self, answers: &[bool], rand: &mut dyn RandomSource) -> Bits {
        let p = self.p;
        self.leaves
            .entry(answers.to_vec())
            .or_insert_with(|| Bits::from_bools(&(0..p).map(|_| rand.bit()).collect::<Vec<_>>()))
            .clone()
    }

    fn next(&mut self, c: usize, rand: &mut dyn RandomSource) -> Move {
        let copy = &mut self.copies[c];
        copy.round += 1;
        if u64::from(copy.round) <= self.n {
            return Move::question().right().copy(copy.round).left();
        }
        let answers = copy.answers.clone();
        Move::bits(&self.answer(&answers, rand)).right()
    }

    fn inner(
        &mut self,
        c: usize,
        m: &Move,
        rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        let round = self.copies[c].round;
        match (m.path.as_slice(), &m.base) {
            ([Step::Right], Base::Question) if round == 0 => {
                meter.tick(self.p as u64)?;
                Ok(self.next(c, rand))
            }
            ([Step::Left, Step::Copy(i), Step::Left], Base::Question) if *i == round => {
                let answers = self.copies[c].answers.clone();
                meter.tick(2 * self.n)?;
                let k = self.coordinate(&answers, rand);
                let lg = ceil_lg(self.n) as usize;
                Ok(Move::bits(&Bits::from_u64_msb(k, lg))
                    .left()
                    .copy(*i)
                    .left())
            }
            ([Step::Left, Step::Copy(i), Step::Right], Base::Answer(w)) if *i == round => {
                let b = w.as_bit().ok_or_else(|| StrategyError::undefined(m))?;
                self.copies[c].answers.push(b);
                meter.tick(self.p as u64)?;
                Ok(self.next(c, rand))
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }
}

impl RandomizedSession for RandSofSession {
    fn respond(
        &mut self,
        m: &Move,
        rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        if !self.banged {
            if self.copies.is_empty() {
                self.copies.push(CopyPath::default());
            }
            return self.inner(0, m, rand, meter);
        }
        let Some((Step::Copy(i), rest)) = m.strip() else {
            return Err(StrategyError::undefined(m));
        };
        let c = i as usize - 1;
        if c == self.copies.len() {
            self.copies.push(CopyPath::default());
        }
        if c >= self.copies.len() {
            return Err(StrategyError::undefined(m));
        }
        Ok(self.inner(c, &rest, rand, meter)?.copy(i))
    }

    fn fork(&self) -> Box<dyn RandomizedSession> {
        Box::new(self.clone())
    }
}

/// A uniformly random function `{0,1}^≤n -> {0,1}^w(n)` on
/// `!_{ι+1}(StrLe_ι -o Str_w)`, sampled lazily per input.
pub fn random_first_order(w: Poly) -> RandomizedRef {
    Arc::new(RandomFirstOrder { w })
}

#[derive(Debug, Clone)]
struct RandomFirstOrder {
    w: Poly,
}

impl Randomized for RandomFirstOrder {
    fn game(&self) -> Game {
        bang(
            Poly::id() + Poly::constant(1),
            lolli(str_le_game(Poly::id()), str_game(self.w.clone())),
        )
    }

    fn budget(&self) -> Poly {
        self.w.clone() + Poly::constant(2)
    }

    fn start(&self, n: u64) -> Box<dyn RandomizedSession> {
        Box::new(RandomFirstOrderSession {
            w: self.w.eval_usize(n),
            table: BTreeMap::new(),
        })
    }
}

#[derive(Debug, Clone)]
struct RandomFirstOrderSession {
    w: usize,
    table: BTreeMap<Bits, Bits>,
}

impl RandomizedSession for RandomFirstOrderSession {
    fn respond(
        &mut self,
        m: &Move,
        rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        match (m.path.as_slice(), &m.base) {
            ([Step::Copy(i), Step::Right], Base::Question) => Ok(Move::question().left().copy(*i)),
            ([Step::Copy(i), Step::Left], Base::Answer(x)) => {
                let x = x.to_bits().ok_or_else(|| StrategyError::undefined(m))?;
                let w = self.w;
                meter.tick(w as u64)?;
                let y = self.table.entry(x).or_insert_with(|| {
                    Bits::from_bools(&(0..w).map(|_| rand.bit()).collect::<Vec<_>>())
                });
                Ok(Move::bits(y).right().copy(*i))
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn RandomizedSession> {
        Box::new(self.clone())
    }
}
