use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::prob::{Deterministic, RandomSource, Randomized, RandomizedRef, RandomizedSession};
use super::{
    rehead, respond_metered, unwrap_head, Session, StepMeter, Strategy, StrategyError, StrategyRef,
};
use crate::games::{bang, lolli, Game, Move, Step};
use crate::poly::Poly;

fn split_lolli(g: &Game) -> Option<(&Game, &Game)> {
    match g {
        Game::Lolli(a, b) => Some((a, b)),
        _ => None,
    }
}

/// Copycat on `G -o G`.
#[derive(Debug, Clone)]
pub struct Copycat {
    game: Game,
}

pub fn copycat(game: Game) -> StrategyRef {
    Arc::new(Copycat { game })
}

impl Strategy for Copycat {
    fn game(&self) -> Game {
        lolli(self.game.clone(), self.game.clone())
    }

    fn budget(&self) -> Poly {
        self.game.length_bound() + Poly::constant(1)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(CopycatSession)
    }
}

#[derive(Debug, Clone)]
struct CopycatSession;

impl Session for CopycatSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(m.encoded_len())?;
        match m.head() {
            Some(Step::Left) => Ok(rehead(m, Step::Right)),
            Some(Step::Right) => Ok(rehead(m, Step::Left)),
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// `f;g` for `f` on `G -o H` and `g` on `H -o K`, by live interaction in
/// `H` hidden from the outside.
pub fn compose(f: StrategyRef, g: StrategyRef) -> Result<StrategyRef, StrategyError> {
    let fg = f.game();
    let gg = g.game();
    let mismatch = || StrategyError::Mismatch(fg.to_string(), gg.to_string());
    let (a, h1) = split_lolli(&fg).ok_or_else(mismatch)?;
    let (h2, c) = split_lolli(&gg).ok_or_else(mismatch)?;
    if h1 != h2 {
        return Err(mismatch());
    }
    let game = lolli(a.clone(), c.clone());
    let middle = h1.length_bound();
    Ok(Arc::new(Composed { f, g, game, middle }))
}

struct Composed {
    f: StrategyRef,
    g: StrategyRef,
    game: Game,
    middle: Poly,
}

impl Strategy for Composed {
    fn game(&self) -> Game {
        self.game.clone()
    }

    fn budget(&self) -> Poly {
        (self.f.budget() + self.g.budget() + Poly::constant(1))
            * (self.middle.clone() + Poly::constant(2))
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(ComposedSession {
            f: self.f.start(n),
            g: self.g.start(n),
            fb: self.f.budget(),
            gb: self.g.budget(),
        })
    }
}

struct ComposedSession {
    f: Box<dyn Session>,
    g: Box<dyn Session>,
    fb: Poly,
    gb: Poly,
}

impl Session for ComposedSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        let (mut to_g, mut msg) = match m.head() {
            Some(Step::Right) => (true, m.clone()),
            Some(Step::Left) => (false, m.clone()),
            _ => return Err(StrategyError::undefined(m)),
        };
        loop {
            meter.tick(1)?;
            if to_g {
                let r = respond_metered(&mut *self.g, &msg, &self.gb, meter)?;
                match r.head() {
                    Some(Step::Right) => return Ok(r),
                    Some(Step::Left) => {
                        msg = rehead(&r, Step::Right);
                        to_g = false;
                    }
                    _ => return Err(StrategyError::Deadlock(r.to_string())),
                }
            } else {
                let r = respond_metered(&mut *self.f, &msg, &self.fb, meter)?;
                match r.head() {
                    Some(Step::Left) => return Ok(r),
                    Some(Step::Right) => {
                        msg = rehead(&r, Step::Left);
                        to_g = true;
                    }
                    _ => return Err(StrategyError::Deadlock(r.to_string())),
                }
            }
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(ComposedSession {
            f: self.f.fork(),
            g: self.g.fork(),
            fb: self.fb.clone(),
            gb: self.gb.clone(),
        })
    }
}

/// `!_p f` for a deterministic `f`: independent replicas, one per copy.
pub fn bang_det(p: Poly, f: StrategyRef) -> StrategyRef {
    Arc::new(BangDet { p, f })
}

struct BangDet {
    p: Poly,
    f: StrategyRef,
}

impl Strategy for BangDet {
    fn game(&self) -> Game {
        bang(self.p.clone(), self.f.game())
    }

    fn budget(&self) -> Poly {
        self.f.budget() + Poly::constant(1)
    }

    fn start(&self, n: u64) -> Box<dyn Session> {
        Box::new(BangDetSession {
            f: self.f.clone(),
            budget: self.f.budget(),
            n,
            copies: Vec::new(),
        })
    }
}

struct BangDetSession {
    f: StrategyRef,
    budget: Poly,
    n: u64,
    copies: Vec<Box<dyn Session>>,
}

impl Session for BangDetSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        let Some(Step::Copy(i)) = m.head() else {
            return Err(StrategyError::undefined(m));
        };
        let idx = i as usize;
        if idx == self.copies.len() + 1 {
            self.copies.push(self.f.start(self.n));
        }
        let session = self
            .copies
            .get_mut(idx.wrapping_sub(1))
            .ok_or_else(|| StrategyError::undefined(m))?;
        let r = respond_metered(&mut **session, &unwrap_head(m), &self.budget, meter)?;
        Ok(r.copy(i))
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(BangDetSession {
            f: self.f.clone(),
            budget: self.budget.clone(),
            n: self.n,
            copies: self.copies.iter().map(|s| s.fork()).collect(),
        })
    }
}

/// Plays the closed deterministic strategy `arg` on `H` against the
/// randomized `fun` on `H -o K`, hiding `H`: the result is a randomized
/// strategy on `K`.
pub fn apply(arg: StrategyRef, fun: RandomizedRef) -> Result<RandomizedRef, StrategyError> {
    apply_randomized(Arc::new(Deterministic(arg)), fun)
}

/// [`apply`] for a randomized `arg`. Both sides draw from the same
/// random source, in the order their moves happen.
pub fn apply_randomized(
    arg: RandomizedRef,
    fun: RandomizedRef,
) -> Result<RandomizedRef, StrategyError> {
    let ag = arg.game();
    let fg = fun.game();
    let mismatch = || StrategyError::Mismatch(ag.to_string(), fg.to_string());
    let (h, k) = split_lolli(&fg).ok_or_else(mismatch)?;
    if *h != ag {
        return Err(mismatch());
    }
    let game = k.clone();
    let middle = h.length_bound();
    Ok(Arc::new(Applied {
        arg,
        fun,
        game,
        middle,
    }))
}

struct Applied {
    arg: RandomizedRef,
    fun: RandomizedRef,
    game: Game,
    middle: Poly,
}

impl Randomized for Applied {
    fn game(&self) -> Game {
        self.game.clone()
    }

    fn budget(&self) -> Poly {
        (self.arg.budget() + self.fun.budget() + Poly::constant(1))
            * (self.middle.clone() + Poly::constant(2))
    }

    fn start(&self, n: u64) -> Box<dyn RandomizedSession> {
        Box::new(AppliedSession {
            arg: self.arg.start(n),
            fun: self.fun.start(n),
            ab: self.arg.budget(),
            fb: self.fun.budget(),
        })
    }
}

struct AppliedSession {
    arg: Box<dyn RandomizedSession>,
    fun: Box<dyn RandomizedSession>,
    ab: Poly,
    fb: Poly,
}

impl RandomizedSession for AppliedSession {
    fn respond(
        &mut self,
        m: &Move,
        rand: &mut dyn RandomSource,
        meter: &mut StepMeter,
    ) -> Result<Move, StrategyError> {
        let mut msg = m.clone().right();
        loop {
            meter.tick(1)?;
            let mut inner = StepMeter::for_budget(&self.fb, meter.n());
            let r = self.fun.respond(&msg, rand, &mut inner)?;
            meter.tick(inner.used())?;
            match r.head() {
                Some(Step::Right) => return Ok(unwrap_head(&r)),
                Some(Step::Left) => {
                    let mut inner = StepMeter::for_budget(&self.ab, meter.n());
                    let a = self.arg.respond(&unwrap_head(&r), rand, &mut inner)?;
                    meter.tick(inner.used())?;
                    msg = a.left();
                }
                _ => return Err(StrategyError::Deadlock(r.to_string())),
            }
        }
    }

    fn fork(&self) -> Box<dyn RandomizedSession> {
        Box::new(AppliedSession {
            arg: self.arg.fork(),
            fun: self.fun.fork(),
            ab: self.ab.clone(),
            fb: self.fb.clone(),
        })
    }
}
