use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{linsof, FunctionalOracle};
use crate::bits::Bits;
use crate::games::{Base, Game, Move, Step};
use crate::poly::Poly;
use crate::prf::{FirstOrderPrf, ToyPrf};
use crate::strategies::{Session, StepMeter, Strategy, StrategyError, StrategyRef};

/// How a [`ProbeFunctional`] turns its probe answers into a tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureOutput {
    /// The answers themselves.
    Answers,
    /// Their parity, one bit.
    Xor,
    /// The toy PRF under `key` applied to the answers.
    Digest { key: Bits },
    /// A fixed tag; no probes are made.
    Constant(Bits),
}

/// A functional on `linsof(q, p)` at one security parameter `n` that
/// queries its argument at fixed points and combines the answers.
///
/// Each tag bit depends on at most `q` argument values, so under the
/// extension every bit of `F~` has decision-tree depth at most `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeFunctional {
    n: u64,
    probes: Vec<Bits>,
    output: FixtureOutput,
    q: usize,
    p: usize,
}

impl ProbeFunctional {
    /// `q` is the declared query bound, at least the number of probes.
    pub fn new(n: u64, probes: Vec<Bits>, q: usize, output: FixtureOutput) -> Self {
        assert!(probes.len() <= q);
        assert!(probes.iter().all(|x| x.len() == n as usize));
        let probes = match output {
            FixtureOutput::Constant(_) => Vec::new(),
            _ => probes,
        };
        let p = match &output {
            FixtureOutput::Answers => probes.len(),
            FixtureOutput::Xor => 1,
            FixtureOutput::Digest { .. } => q,
            FixtureOutput::Constant(t) => t.len(),
        };
        ProbeFunctional {
            n,
            probes,
            output,
            q,
            p,
        }
    }

    /// Overrides the tag length of a digest.
    pub fn with_tag_len(mut self, p: usize) -> Self {
        if matches!(self.output, FixtureOutput::Digest { .. }) {
            self.p = p;
        }
        self
    }

    pub fn probes(&self) -> &[Bits] {
        &self.probes
    }

    pub fn output(&self) -> &FixtureOutput {
        &self.output
    }

    pub fn tag_of(&self, answers: &Bits) -> Bits {
        match &self.output {
            FixtureOutput::Answers => answers.clone(),
            FixtureOutput::Xor => Bits::from_bools(&[answers.count_ones() % 2 == 1]),
            FixtureOutput::Digest { key } => {
                ToyPrf::new(Poly::constant(self.p as u64)).eval(key, answers)
            }
            FixtureOutput::Constant(t) => t.clone(),
        }
    }

    /// `F(f)`.
    pub fn tag(&self, f: &mut dyn FnMut(&Bits) -> bool) -> Bits {
        let answers = Bits::from_bools(&self.probes.iter().map(f).collect::<Vec<_>>());
        self.tag_of(&answers)
    }

    pub fn game(&self) -> Game {
        linsof(Poly::constant(self.q as u64), Poly::constant(self.p as u64))
    }

    /// The fixture as a strategy on `linsof(q, p)`, played at its own `n`.
    pub fn strategy(&self) -> StrategyRef {
        Arc::new(self.clone())
    }

    /// Direct query access, without playing moves.
    pub fn oracle(&self) -> ProbeOracle {
        ProbeOracle {
            f: self.clone(),
            count: 0,
        }
    }
}

/// `mac_fixture(key, q, p)` at `n = |key|`: `q(n)` probe points derived from
/// the key with the toy PRF, and a `p(n)`-bit digest of the answers under
/// the key.
pub fn mac_fixture(key: Bits, q: &Poly, p: &Poly) -> ProbeFunctional {
    let n = key.len() as u64;
    let qn = q.eval_usize(n);
    let prf = ToyPrf::new(Poly::id());
    let index_len = (n as usize).min(64);
    let probes = (0..qn as u64)
        .map(|k| prf.eval(&key, &Bits::from_u64_msb(k, index_len)))
        .collect();
    ProbeFunctional::new(n, probes, qn, FixtureOutput::Digest { key }).with_tag_len(p.eval_usize(n))
}

impl Strategy for ProbeFunctional {
    fn game(&self) -> Game {
        ProbeFunctional::game(self)
    }

    fn budget(&self) -> Poly {
        Poly::constant(self.n + (self.p + self.q) as u64 + 4)
    }

    fn start(&self, _n: u64) -> Box<dyn Session> {
        Box::new(ProbeSession {
            f: self.clone(),
            answers: Bits::zeros(0),
        })
    }
}

#[derive(Debug, Clone)]
struct ProbeSession {
    f: ProbeFunctional,
    answers: Bits,
}

impl ProbeSession {
    fn next(&self, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        let k = self.answers.len();
        if k < self.f.probes.len() {
            return Ok(Move::question().right().copy(k as u32 + 1).left());
        }
        let tag = self.f.tag_of(&self.answers);
        meter.tick(tag.len() as u64)?;
        Ok(Move::bits(&tag).right())
    }
}

impl Session for ProbeSession {
    fn respond(&mut self, m: &Move, meter: &mut StepMeter) -> Result<Move, StrategyError> {
        meter.tick(1)?;
        let k = self.answers.len() as u32;
        match (m.path.as_slice(), &m.base) {
            ([Step::Right], Base::Question) if k == 0 => self.next(meter),
            ([Step::Left, Step::Copy(i), Step::Left], Base::Question) if *i == k + 1 => {
                let x = &self.f.probes[k as usize];
                meter.tick(x.len() as u64)?;
                Ok(Move::bits(x).left().copy(*i).left())
            }
            ([Step::Left, Step::Copy(i), Step::Right], Base::Answer(w)) if *i == k + 1 => {
                let b = w.as_bit().ok_or_else(|| StrategyError::undefined(m))?;
                self.answers.push(b);
                self.next(meter)
            }
            _ => Err(StrategyError::undefined(m)),
        }
    }

    fn fork(&self) -> Box<dyn Session> {
        Box::new(self.clone())
    }
}

/// Direct [`FunctionalOracle`] access to a [`ProbeFunctional`].
#[derive(Debug, Clone)]
pub struct ProbeOracle {
    f: ProbeFunctional,
    count: u64,
}

impl FunctionalOracle for ProbeOracle {
    fn n(&self) -> u64 {
        self.f.n
    }

    fn arg_len(&self) -> usize {
        self.f.n as usize
    }

    fn query_bound(&self) -> usize {
        self.f.q
    }

    fn tag_len(&self) -> usize {
        self.f.p
    }

    fn query(&mut self, f: &mut dyn FnMut(&Bits) -> bool) -> Result<Bits, StrategyError> {
        self.count += 1;
        Ok(self.f.tag(f))
    }

    fn query_count(&self) -> u64 {
        self.count
    }

    fn last_probes(&self) -> &[Bits] {
        &self.f.probes
    }
}
