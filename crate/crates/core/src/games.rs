//! Parametrized games.
//!
//! A game is an intensional descriptor: move alphabets plus a legality
//! predicate on plays for each value of the security parameter `n`. Play
//! sets are never materialized except through the bounded enumerators
//! [`Game::alphabet`] and [`Game::legal_plays`], which exist for tests and
//! small-`n` invariant checks.
//!
//! Moves of compound games carry a path locating them: `Left`/`Right` pick
//! a component of `G -o H` or `G * H`, `Copy(i)` (1-based) picks a copy of a
//! bounded exponential. The encoded length of a move is its payload length
//! plus one; the path does not count.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bits::Bits;
use crate::poly::{Poly, PolyParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Opponent,
    Player,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Opponent => Side::Player,
            Side::Player => Side::Opponent,
        }
    }

    /// Expected side of the move at 0-based position `k` of a play.
    pub fn at(k: usize) -> Side {
        if k.is_multiple_of(2) {
            Side::Opponent
        } else {
            Side::Player
        }
    }
}

/// One symbol of an answer payload. `Bottom` only occurs in ternary
/// strings, where it marks an undefined coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Zero,
    One,
    Bottom,
}

impl Letter {
    pub fn from_bit(b: bool) -> Letter {
        if b {
            Letter::One
        } else {
            Letter::Zero
        }
    }

    pub fn as_bit(self) -> Option<bool> {
        match self {
            Letter::Zero => Some(false),
            Letter::One => Some(true),
            Letter::Bottom => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::Zero => '0',
            Letter::One => '1',
            Letter::Bottom => '_',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            '0' => Some(Letter::Zero),
            '1' => Some(Letter::One),
            '_' => Some(Letter::Bottom),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn from_bits(bits: &Bits) -> Word {
        Word(bits.iter().map(Letter::from_bit).collect())
    }

    pub fn bit(b: bool) -> Word {
        Word(vec![Letter::from_bit(b)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|l| *l != Letter::Bottom)
    }

    pub fn to_bits(&self) -> Option<Bits> {
        let mut b = Bits::zeros(self.0.len());
        for (i, l) in self.0.iter().enumerate() {
            b.set(i, l.as_bit()?);
        }
        Some(b)
    }

    /// The single bit of a one-letter binary word.
    pub fn as_bit(&self) -> Option<bool> {
        match self.0.as_slice() {
            [l] => l.as_bit(),
            _ => None,
        }
    }

    /// Interprets a binary word as an integer, first letter most significant.
    pub fn to_u64_msb(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        self.0
            .iter()
            .try_fold(0u64, |acc, l| Some((acc << 1) | l.as_bit()? as u64))
    }

    pub fn parse(s: &str) -> Option<Word> {
        s.chars()
            .map(Letter::from_char)
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Left,
    Right,
    Copy(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    /// `?`
    Question,
    /// `*`, the answer of the unit game.
    Star,
    Answer(Word),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    /// Outermost component first.
    pub path: Vec<Step>,
    pub base: Base,
}

pub type Play = Vec<Move>;

impl Move {
    pub fn question() -> Move {
        Move {
            path: Vec::new(),
            base: Base::Question,
        }
    }

    pub fn star() -> Move {
        Move {
            path: Vec::new(),
            base: Base::Star,
        }
    }

    pub fn answer(w: Word) -> Move {
        Move {
            path: Vec::new(),
            base: Base::Answer(w),
        }
    }

    pub fn bits(b: &Bits) -> Move {
        Move::answer(Word::from_bits(b))
    }

    pub fn bit(b: bool) -> Move {
        Move::answer(Word::bit(b))
    }

    /// Wraps the move one level out: `m.within(Step::Left)` is `m` seen
    /// from `G -o H` when `m` is a move of `G`.
    pub fn within(mut self, step: Step) -> Move {
        self.path.insert(0, step);
        self
    }

    pub fn left(self) -> Move {
        self.within(Step::Left)
    }

    pub fn right(self) -> Move {
        self.within(Step::Right)
    }

    pub fn copy(self, i: u32) -> Move {
        self.within(Step::Copy(i))
    }

    /// Splits off the outermost step.
    pub fn strip(&self) -> Option<(Step, Move)> {
        let (first, rest) = self.path.split_first()?;
        Some((
            *first,
            Move {
                path: rest.to_vec(),
                base: self.base.clone(),
            },
        ))
    }

    pub fn head(&self) -> Option<Step> {
        self.path.first().copied()
    }

    pub fn is_question(&self) -> bool {
        matches!(self.base, Base::Question)
    }

    pub fn word(&self) -> Option<&Word> {
        match &self.base {
            Base::Answer(w) => Some(w),
            _ => None,
        }
    }

    /// Encoded length: payload letters plus one.
    pub fn encoded_len(&self) -> u64 {
        match &self.base {
            Base::Answer(w) => w.len() as u64 + 1,
            _ => 1,
        }
    }

    /// Innermost copy index on the path, if any.
    pub fn copy_index(&self) -> Option<u32> {
        self.path.iter().rev().find_map(|s| match s {
            Step::Copy(i) => Some(*i),
            _ => None,
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.path {
            match s {
                Step::Left => f.write_str("L.")?,
                Step::Right => f.write_str("R.")?,
                Step::Copy(i) => write!(f, "#{i}.")?,
            }
        }
        match &self.base {
            Base::Question => f.write_str("?"),
            Base::Star => f.write_str("*"),
            Base::Answer(w) if w.is_empty() => f.write_str("-"),
            Base::Answer(w) => write!(f, "{w}"),
        }
    }
}

/// Total encoded length of a play.
pub fn play_len(play: &[Move]) -> u64 {
    play.iter().map(Move::encoded_len).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("move alphabet at this n exceeds {limit} moves")]
    AlphabetTooLarge { limit: usize },
    #[error("more than {limit} legal plays")]
    TooManyPlays { limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Game {
    /// One question `?`, one answer `*`.
    Unit,
    /// One question, answers `0`/`1`.
    Bool,
    /// Answers are bit strings of length exactly `p(n)`.
    Str(Poly),
    /// Answers are bit strings of length at most `p(n)`.
    StrLe(Poly),
    /// Answers are strings over `{0,1,⊥}` of length exactly `p(n)`.
    TStr(Poly),
    /// Up to `p(n)` answered queries for a random bit.
    Oracle(Poly),
    /// Up to `p(n)` copies, opened in order.
    Bang(Poly, Box<Game>),
    Lolli(Box<Game>, Box<Game>),
    Tensor(Box<Game>, Box<Game>),
}

pub fn unit_game() -> Game {
    Game::Unit
}

pub fn bool_game() -> Game {
    Game::Bool
}

pub fn str_game(p: Poly) -> Game {
    Game::Str(p)
}

pub fn str_le_game(p: Poly) -> Game {
    Game::StrLe(p)
}

pub fn tstr_game(p: Poly) -> Game {
    Game::TStr(p)
}

pub fn oracle_game(p: Poly) -> Game {
    Game::Oracle(p)
}

pub fn bang(p: Poly, g: Game) -> Game {
    Game::Bang(p, Box::new(g))
}

pub fn lolli(g: Game, h: Game) -> Game {
    Game::Lolli(Box::new(g), Box::new(h))
}

pub fn tensor(g: Game, h: Game) -> Game {
    Game::Tensor(Box::new(g), Box::new(h))
}

/// `!_q(Str_r -o B) -o Str_p`: second-order functions making at most
/// `q(n)` queries to an argument `{0,1}^r(n) -> B` and returning `p(n)` bits.
pub fn sof(q: Poly, r: Poly, p: Poly) -> Game {
    lolli(bang(q, lolli(str_game(r), bool_game())), str_game(p))
}

type View<'a> = (&'a [Step], &'a Base);

fn views(play: &[Move]) -> Vec<View<'_>> {
    play.iter().map(|m| (m.path.as_slice(), &m.base)).collect()
}

fn project<'a>(play: &[View<'a>], step: Step) -> Vec<View<'a>> {
    play.iter()
        .filter(|(p, _)| p.first() == Some(&step))
        .map(|(p, b)| (&p[1..], *b))
        .collect()
}

impl Game {
    pub fn is_ground(&self) -> bool {
        matches!(
            self,
            Game::Unit | Game::Bool | Game::Str(_) | Game::StrLe(_) | Game::TStr(_)
        )
    }

    /// Single question, single answer.
    pub fn is_observable(&self) -> bool {
        self.is_ground()
    }

    /// Bound on the encoded length of any legal play.
    pub fn length_bound(&self) -> Poly {
        match self {
            Game::Unit => Poly::constant(2),
            Game::Bool => Poly::constant(3),
            Game::Str(p) | Game::StrLe(p) | Game::TStr(p) => p.clone() + Poly::constant(2),
            Game::Oracle(p) => Poly::constant(3) * p.clone() + Poly::constant(1),
            Game::Bang(p, g) => p.clone() * g.length_bound(),
            Game::Lolli(g, h) | Game::Tensor(g, h) => g.length_bound() + h.length_bound(),
        }
    }

    /// Which player owns `m`, or `None` if `m` is not a move of this game.
    pub fn side_of(&self, m: &Move) -> Option<Side> {
        self.side_at(&m.path, &m.base)
    }

    fn side_at(&self, path: &[Step], base: &Base) -> Option<Side> {
        match self {
            Game::Bang(_, g) => match path.split_first() {
                Some((Step::Copy(i), rest)) if *i >= 1 => g.side_at(rest, base),
                _ => None,
            },
            Game::Lolli(g, h) => match path.split_first() {
                Some((Step::Left, rest)) => g.side_at(rest, base).map(Side::flip),
                Some((Step::Right, rest)) => h.side_at(rest, base),
                _ => None,
            },
            Game::Tensor(g, h) => match path.split_first() {
                Some((Step::Left, rest)) => g.side_at(rest, base),
                Some((Step::Right, rest)) => h.side_at(rest, base),
                _ => None,
            },
            _ if !path.is_empty() => None,
            Game::Unit => match base {
                Base::Question => Some(Side::Opponent),
                Base::Star => Some(Side::Player),
                Base::Answer(_) => None,
            },
            Game::Bool | Game::Oracle(_) => match base {
                Base::Question => Some(Side::Opponent),
                Base::Answer(w) if w.as_bit().is_some() => Some(Side::Player),
                _ => None,
            },
            Game::Str(_) | Game::StrLe(_) => match base {
                Base::Question => Some(Side::Opponent),
                Base::Answer(w) if w.is_binary() => Some(Side::Player),
                _ => None,
            },
            Game::TStr(_) => match base {
                Base::Question => Some(Side::Opponent),
                Base::Answer(_) => Some(Side::Player),
                Base::Star => None,
            },
        }
    }

    /// Whether `play` is a legal play at security parameter `n`.
    pub fn legal(&self, n: u64, play: &[Move]) -> bool {
        self.legal_views(n, &views(play))
    }

    fn legal_views(&self, n: u64, play: &[View<'_>]) -> bool {
        let alternating = play
            .iter()
            .enumerate()
            .all(|(k, (p, b))| self.side_at(p, b) == Some(Side::at(k)));
        if !alternating {
            return false;
        }
        match self {
            Game::Unit | Game::Bool => play.len() <= 2,
            Game::Str(p) | Game::TStr(p) => match play {
                [_, (_, Base::Answer(w))] => w.len() as u64 == p.eval(n),
                _ => play.len() <= 2,
            },
            Game::StrLe(p) => match play {
                [_, (_, Base::Answer(w))] => w.len() as u64 <= p.eval(n),
                _ => play.len() <= 2,
            },
            Game::Oracle(p) => {
                if play.is_empty() {
                    return true;
                }
                let pn = p.eval(n);
                let answered = (play.len() / 2) as u64;
                let trailing = play.len() % 2 == 1;
                answered <= pn && (!trailing || answered < pn)
            }
            Game::Bang(p, g) => {
                let pn = p.eval(n);
                let mut opened = 0u32;
                let mut copies: BTreeMap<u32, Vec<View<'_>>> = BTreeMap::new();
                for (path, base) in play {
                    let Some((Step::Copy(i), rest)) = path.split_first() else {
                        return false;
                    };
                    if u64::from(*i) > pn {
                        return false;
                    }
                    if *i > opened {
                        if *i != opened + 1 {
                            return false;
                        }
                        opened = *i;
                    }
                    copies.entry(*i).or_default().push((rest, *base));
                }
                copies.values().all(|s| g.legal_views(n, s))
            }
            Game::Lolli(g, h) => {
                g.legal_views(n, &project(play, Step::Left))
                    && h.legal_views(n, &project(play, Step::Right))
            }
            Game::Tensor(g, h) => {
                let switches_ok = play.windows(2).enumerate().all(|(k, w)| {
                    w[0].0.first() == w[1].0.first() || Side::at(k + 1) == Side::Opponent
                });
                switches_ok
                    && g.legal_views(n, &project(play, Step::Left))
                    && h.legal_views(n, &project(play, Step::Right))
            }
        }
    }

    /// Every move of the game at `n`, both sides.
    pub fn alphabet(&self, n: u64, limit: usize) -> Result<Vec<Move>, GameError> {
        let too_large = GameError::AlphabetTooLarge { limit };
        let words = |len: u64, letters: &[Letter]| -> Result<Vec<Move>, GameError> {
            let count = (letters.len() as u64)
                .checked_pow(u32::try_from(len).map_err(|_| too_large.clone())?)
                .ok_or_else(|| too_large.clone())?;
            if count > limit as u64 {
                return Err(too_large.clone());
            }
            let mut out = Vec::with_capacity(count as usize);
            for mut k in 0..count {
                let mut w = vec![Letter::Zero; len as usize];
                for slot in w.iter_mut().rev() {
                    *slot = letters[(k % letters.len() as u64) as usize];
                    k /= letters.len() as u64;
                }
                out.push(Move::answer(Word(w)));
            }
            Ok(out)
        };
        let binary = [Letter::Zero, Letter::One];
        let mut out = vec![Move::question()];
        match self {
            Game::Unit => out.push(Move::star()),
            Game::Bool | Game::Oracle(_) => {
                out.push(Move::bit(false));
                out.push(Move::bit(true));
            }
            Game::Str(p) => out.extend(words(p.eval(n), &binary)?),
            Game::StrLe(p) => {
                for len in 0..=p.eval(n) {
                    out.extend(words(len, &binary)?);
                    if out.len() > limit {
                        return Err(too_large);
                    }
                }
            }
            Game::TStr(p) => out.extend(words(
                p.eval(n),
                &[Letter::Zero, Letter::One, Letter::Bottom],
            )?),
            Game::Bang(p, g) => {
                out.clear();
                let inner = g.alphabet(n, limit)?;
                let copies = p.eval(n);
                if copies.saturating_mul(inner.len() as u64) > limit as u64 {
                    return Err(too_large);
                }
                for i in 1..=copies as u32 {
                    out.extend(inner.iter().cloned().map(|m| m.copy(i)));
                }
            }
            Game::Lolli(g, h) | Game::Tensor(g, h) => {
                out.clear();
                out.extend(g.alphabet(n, limit)?.into_iter().map(Move::left));
                out.extend(h.alphabet(n, limit)?.into_iter().map(Move::right));
            }
        }
        if out.len() > limit {
            return Err(too_large);
        }
        Ok(out)
    }

    /// All legal plays at `n`, in depth-first order starting with `ε`.
    pub fn legal_plays(&self, n: u64, limit: usize) -> Result<Vec<Play>, GameError> {
        let alphabet = self.alphabet(n, limit)?;
        let mut out = Vec::new();
        let mut stack: Vec<Play> = vec![Vec::new()];
        while let Some(play) = stack.pop() {
            for m in &alphabet {
                if self.side_of(m) != Some(Side::at(play.len())) {
                    continue;
                }
                let mut next = play.clone();
                next.push(m.clone());
                if self.legal(n, &next) {
                    stack.push(next);
                }
            }
            out.push(play);
            if out.len() > limit {
                return Err(GameError::TooManyPlays { limit });
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Game::Unit => f.write_str("unit"),
            Game::Bool => f.write_str("bool"),
            Game::Str(p) => write!(f, "str({p})"),
            Game::StrLe(p) => write!(f, "strle({p})"),
            Game::TStr(p) => write!(f, "tstr({p})"),
            Game::Oracle(p) => write!(f, "oracle({p})"),
            Game::Bang(p, g) => write!(f, "bang({p}, {g})"),
            Game::Lolli(g, h) => {
                if matches!(**g, Game::Lolli(..)) {
                    write!(f, "({g}) -o {h}")
                } else {
                    write!(f, "{g} -o {h}")
                }
            }
            Game::Tensor(g, h) => {
                let wrap = |x: &Game| matches!(x, Game::Lolli(..));
                match (wrap(g), wrap(h) || matches!(**h, Game::Tensor(..))) {
                    (false, false) => write!(f, "{g} * {h}"),
                    (true, false) => write!(f, "({g}) * {h}"),
                    (false, true) => write!(f, "{g} * ({h})"),
                    (true, true) => write!(f, "({g}) * ({h})"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameParseError {
    #[error("invalid game expression at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error(transparent)]
    Poly(#[from] PolyParseError),
}

struct GameParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> GameParser<'a> {
    fn err<T>(&self, message: &str) -> Result<T, GameParseError> {
        Err(GameParseError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn game(&mut self) -> Result<Game, GameParseError> {
        let lhs = self.product()?;
        if self.eat("-o") {
            Ok(lolli(lhs, self.game()?))
        } else {
            Ok(lhs)
        }
    }

    fn product(&mut self) -> Result<Game, GameParseError> {
        let mut acc = self.atom()?;
        while self.eat("*") {
            acc = tensor(acc, self.atom()?);
        }
        Ok(acc)
    }

    /// Polynomial text up to the first `stop` byte at bracket depth zero.
    fn poly_until(&mut self, stop: u8) -> Result<Poly, GameParseError> {
        let start = self.pos;
        let mut depth = 0usize;
        for (k, c) in self.rest().bytes().enumerate() {
            match c {
                b'(' => depth += 1,
                b')' if depth == 0 && stop == b')' => {
                    self.pos = start + k;
                    return Ok(self.src[start..start + k].parse()?);
                }
                b')' => depth = depth.saturating_sub(1),
                c if c == stop && depth == 0 => {
                    self.pos = start + k;
                    return Ok(self.src[start..start + k].parse()?);
                }
                _ => {}
            }
        }
        self.err("unterminated argument list")
    }

    fn unary(&mut self, make: fn(Poly) -> Game) -> Result<Game, GameParseError> {
        if !self.eat("(") {
            return self.err("expected `(`");
        }
        let p = self.poly_until(b')')?;
        if !self.eat(")") {
            return self.err("expected `)`");
        }
        Ok(make(p))
    }

    fn atom(&mut self) -> Result<Game, GameParseError> {
        self.skip_ws();
        if self.eat("unit") {
            Ok(Game::Unit)
        } else if self.eat("bool") {
            Ok(Game::Bool)
        } else if self.eat("strle") {
            self.unary(Game::StrLe)
        } else if self.eat("str") {
            self.unary(Game::Str)
        } else if self.eat("tstr") {
            self.unary(Game::TStr)
        } else if self.eat("oracle") {
            self.unary(Game::Oracle)
        } else if self.eat("bang") {
            if !self.eat("(") {
                return self.err("expected `(`");
            }
            let p = self.poly_until(b',')?;
            self.eat(",");
            let g = self.game()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            Ok(bang(p, g))
        } else if self.eat("(") {
            let g = self.game()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            Ok(g)
        } else {
            self.err("expected a game")
        }
    }
}

impl FromStr for Game {
    type Err = GameParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = GameParser { src: s, pos: 0 };
        let g = p.game()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.err("trailing input");
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn q() -> Move {
        Move::question()
    }

    fn w(s: &str) -> Move {
        Move::answer(Word::parse(s).unwrap())
    }

    #[test]
    fn unit_game_plays() {
        let g = unit_game();
        assert!(g.legal(5, &[]));
        assert!(g.legal(5, &[q()]));
        assert!(g.legal(5, &[q(), Move::star()]));
        assert!(!g.legal(5, &[q(), Move::star(), Move::star()]));
        assert_eq!(g.legal_plays(5, 100).unwrap().len(), 3);
    }

    #[test]
    fn bool_game_plays() {
        let g = bool_game();
        assert!(g.legal(3, &[q(), w("1")]));
        assert!(g.legal(3, &[q(), w("0")]));
        assert!(!g.legal(3, &[w("1")]));
    }

    #[test]
    fn string_games() {
        let s = str_game(Poly::id());
        assert!(s.legal(4, &[q(), w("0101")]));
        assert!(!s.legal(4, &[q(), w("010")]));
        assert!(str_le_game(Poly::id()).legal(4, &[q(), w("010")]));
        let t = tstr_game(Poly::id());
        assert!(t.legal(3, &[q(), w("0_1")]));
        assert!(!s.legal(3, &[q(), w("0_1")]));
    }

    #[test]
    fn oracle_game_plays() {
        let o = oracle_game(Poly::id());
        assert!(o.legal(2, &[q(), w("1"), q(), w("0")]));
        assert!(!o.legal(2, &[q(), w("1"), q(), w("0"), q()]));
        assert!(!oracle_game(Poly::constant(0)).legal(7, &[q()]));
        assert!(o.legal(2, &[]));
        assert!(oracle_game(Poly::constant(1)).legal(7, &[q()]));
    }

    #[test]
    fn bang_opens_copies_in_order() {
        let g = bang(Poly::id(), bool_game());
        let play = [q().copy(1), w("1").copy(1), q().copy(2), w("0").copy(2)];
        assert!(g.legal(2, &play));
        assert!(!g.legal(2, &[q().copy(2)]));
        assert!(!g.legal(1, &play[..3]));
    }

    #[test]
    fn lolli_plays() {
        let bb = lolli(bool_game(), bool_game());
        let play = [q().right(), q().left(), w("1").left(), w("0").right()];
        assert!(bb.legal(3, &play));
        assert!(!bb.legal(3, &[q().left()]));

        let os = lolli(oracle_game(Poly::id()), str_game(Poly::id()));
        assert!(os.legal(1, &[q().right(), q().left(), w("1").left(), w("1").right()]));
        assert!(!os.legal(
            1,
            &[q().right(), q().left(), w("1").left(), w("11").right()]
        ));
    }

    #[test]
    fn tensor_plays() {
        let bb = tensor(bool_game(), bool_game());
        assert!(bb.legal(1, &[q().left(), w("1").left(), q().right(), w("0").right()]));
        assert!(!bb.legal(1, &[q().left(), q().right()]));
        assert!(tensor(unit_game(), unit_game()).legal(1, &[]));
    }

    #[test]
    fn tensor_forbids_player_switch() {
        let g = tensor(lolli(bool_game(), bool_game()), bool_game());
        // O opens the right component, P answers in the left one: P switched.
        let bad = [q().right(), q().left().left()];
        assert!(!g.legal(1, &bad));
    }

    #[test]
    fn length_bounds() {
        let games = [
            unit_game(),
            bool_game(),
            str_game(Poly::id()),
            oracle_game(Poly::id()),
            bang(Poly::id(), bool_game()),
            lolli(oracle_game(Poly::id()), str_game(Poly::id())),
        ];
        for g in &games {
            for n in 1..=4 {
                let bound = g.length_bound().eval(n);
                for p in g.legal_plays(n, 100_000).unwrap() {
                    assert!(play_len(&p) <= bound, "{g} at {n}");
                }
            }
        }
    }

    #[test]
    fn parse_and_print_games() {
        let g: Game =
            "bang(id + 1, strle(id) -o str(id * 2)) -o bang(id, str(lg) -o bool) -o str(3)"
                .parse()
                .unwrap();
        let expected = lolli(
            bang(
                Poly::id() + Poly::constant(1),
                lolli(
                    str_le_game(Poly::id()),
                    str_game(Poly::id() * Poly::constant(2)),
                ),
            ),
            lolli(
                bang(Poly::id(), lolli(str_game(Poly::lg()), bool_game())),
                str_game(Poly::constant(3)),
            ),
        );
        assert_eq!(g, expected);
        let again: Game = g.to_string().parse().unwrap();
        assert_eq!(again, g);
        let t: Game = "(bool -o bool) * unit * tstr(id)".parse().unwrap();
        assert_eq!(t.to_string().parse::<Game>().unwrap(), t);
        assert!("str(id".parse::<Game>().is_err());
        assert!("bool -o".parse::<Game>().is_err());
        assert!("str(id +)".parse::<Game>().is_err());
    }

    #[test]
    fn move_display() {
        let m = w("01").right().copy(3).left();
        assert_eq!(m.to_string(), "L.#3.R.01");
        assert_eq!(m.copy_index(), Some(3));
    }
}
