//! The influential-variable fixing loop, as a resumable machine.
//!
//! The machine never calls `F` itself. [`AlgorithmA::resume`] either asks
//! for `F` at [`AlgorithmA::pending_query`] or finishes; the caller answers
//! by resuming with `F` of that point. This lets the same loop run against
//! a plain function, a query-counting oracle, or a strategy reached through
//! game moves.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{hoeffding_radius, hoeffding_samples, BoolFunOracle, PartialAssignment};
use crate::bits::Bits;

/// How influence estimates pick their sample count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfluenceSchedule {
    /// The Hoeffding count for accuracy `eps/(10q)` at failure `gamma`,
    /// then the first free `j` with estimate `≥ 0.2 eps/q`.
    Hoeffding,
    /// Doubling rounds from 64 samples up to the Hoeffding count; stops at
    /// the first free `j` whose lower confidence bound is `≥ 0.1 eps/q`,
    /// else decides as [`InfluenceSchedule::Hoeffding`] at the full count.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmParams {
    /// `N`.
    pub input_len: usize,
    /// `L`.
    pub output_len: usize,
    /// `q`, a bound on the decision-tree depth of each output bit.
    pub depth: usize,
    pub eps: f64,
    pub delta: f64,
    pub schedule: InfluenceSchedule,
}

const FIRST_ROUND: u64 = 64;

impl AlgorithmParams {
    /// Per-estimate failure probability `δ / (N L q² / (δ ε))`.
    pub fn gamma(&self) -> f64 {
        let q = self.depth.max(1) as f64;
        self.delta * self.delta * self.eps
            / (self.input_len as f64 * self.output_len as f64 * q * q)
    }

    /// Pairs per variance estimate, accuracy `eps/3`.
    pub fn var_samples(&self) -> u64 {
        hoeffding_samples(self.eps / 3.0, self.gamma())
    }

    /// Points per influence estimate, accuracy `eps/(10q)`.
    pub fn inf_samples(&self) -> u64 {
        hoeffding_samples(self.eps / (10.0 * self.depth.max(1) as f64), self.gamma())
    }

    /// `⌈10 L q² / (eps delta)⌉`.
    pub fn iteration_cap(&self) -> u64 {
        let q = self.depth.max(1) as f64;
        libm::ceil(10.0 * self.output_len as f64 * q * q / (self.eps * self.delta)) as u64
    }

    /// Most queries a run can make: every iteration up to the cap plus a
    /// retried influence round over all coordinates.
    pub fn max_queries(&self) -> u64 {
        let cap = self.iteration_cap();
        let var = 2 * self.var_samples();
        let inf = 2 * (self.input_len as u64 + 1) * self.inf_samples();
        (cap + 1)
            .saturating_mul(var)
            .saturating_add(cap.saturating_mul(inf))
    }

    pub fn var_threshold(&self) -> f64 {
        2.0 * self.eps / 3.0
    }

    pub fn inf_threshold(&self) -> f64 {
        0.2 * self.eps / self.depth.max(1) as f64
    }

    fn rounds(&self) -> u32 {
        let full = self.inf_samples();
        let mut r = 1;
        let mut m = FIRST_ROUND;
        while m < full {
            m *= 2;
            r += 1;
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgorithmError {
    #[error("iteration cap reached after fixing {iterations} coordinates")]
    IterationCap { iterations: u64 },
    #[error("no influential coordinate found at iteration {iteration}")]
    NoInfluential { iteration: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmOutcome {
    pub assignment: PartialAssignment,
    /// Coordinates fixed, one per loop iteration.
    pub iterations: u64,
    pub queries: u64,
    /// The last variance estimate of every output bit.
    pub variance_estimates: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// `F` at [`AlgorithmA::pending_query`] is needed.
    Query,
    Done,
}

#[derive(Debug, Clone)]
struct InfState {
    t: usize,
    free: Vec<usize>,
    target: u64,
    done: u64,
    x: Bits,
    fx: bool,
    /// 0 while waiting for `F(x)`, `k` while waiting for `F(x xor e_free[k-1])`.
    cursor: usize,
    counts: Vec<u64>,
    retried: bool,
}

#[derive(Debug, Clone)]
enum Phase {
    Var {
        left: u64,
        first: Option<Bits>,
        disagree: Vec<u64>,
    },
    Inf(InfState),
    Finished,
}

#[derive(Debug, Clone)]
pub struct AlgorithmA {
    params: AlgorithmParams,
    rng: ChaCha8Rng,
    g: PartialAssignment,
    phase: Phase,
    pending: Option<Bits>,
    queries: u64,
    iterations: u64,
    estimates: Vec<f64>,
    result: Option<Result<AlgorithmOutcome, AlgorithmError>>,
}

impl AlgorithmA {
    pub fn new(params: AlgorithmParams, rng: ChaCha8Rng) -> Self {
        AlgorithmA {
            phase: Self::var_phase(&params),
            g: PartialAssignment::empty(params.input_len),
            estimates: vec![0.0; params.output_len],
            params,
            rng,
            pending: None,
            queries: 0,
            iterations: 0,
            result: None,
        }
    }

    pub fn seeded(params: AlgorithmParams, seed: u64) -> Self {
        Self::new(params, ChaCha8Rng::seed_from_u64(seed))
    }

    fn var_phase(params: &AlgorithmParams) -> Phase {
        Phase::Var {
            left: params.var_samples(),
            first: None,
            disagree: vec![0; params.output_len],
        }
    }

    pub fn params(&self) -> &AlgorithmParams {
        &self.params
    }

    pub fn pending_query(&self) -> Option<&Bits> {
        self.pending.as_ref()
    }

    /// The assignment built so far.
    pub fn assignment(&self) -> &PartialAssignment {
        &self.g
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn result(&self) -> Option<&Result<AlgorithmOutcome, AlgorithmError>> {
        self.result.as_ref()
    }

    pub fn into_result(self) -> Option<Result<AlgorithmOutcome, AlgorithmError>> {
        self.result
    }

    /// Continues after answering the pending query with `answer`, or
    /// starts when nothing is pending.
    pub fn resume(&mut self, answer: Option<&Bits>) -> Status {
        if let Some(a) = answer {
            assert!(
                self.pending.take().is_some(),
                "answer without a pending query"
            );
            assert_eq!(a.len(), self.params.output_len, "answer length");
            self.absorb(a);
        }
        self.advance()
    }

    fn absorb(&mut self, a: &Bits) {
        match &mut self.phase {
            Phase::Var {
                left,
                first,
                disagree,
            } => match first.take() {
                None => *first = Some(a.clone()),
                Some(fx) => {
                    for (t, d) in disagree.iter_mut().enumerate() {
                        *d += (fx.get(t) != a.get(t)) as u64;
                    }
                    *left -= 1;
                }
            },
            Phase::Inf(s) => {
                let bit = a.get(s.t);
                if s.cursor == 0 {
                    s.fx = bit;
                } else {
                    s.counts[s.cursor - 1] += (bit != s.fx) as u64;
                }
                s.cursor += 1;
                if s.cursor > s.free.len() {
                    s.cursor = 0;
                    s.done += 1;
                }
            }
            Phase::Finished => {}
        }
    }

    fn finish(&mut self, r: Result<(), AlgorithmError>) -> Status {
        self.phase = Phase::Finished;
        self.result = Some(r.map(|()| AlgorithmOutcome {
            assignment: self.g.clone(),
            iterations: self.iterations,
            queries: self.queries,
            variance_estimates: self.estimates.clone(),
        }));
        Status::Done
    }

    fn ask(&mut self, x: Bits) -> Status {
        self.queries += 1;
        self.pending = Some(x);
        Status::Query
    }

    fn advance(&mut self) -> Status {
        let p = self.params;
        loop {
            match &mut self.phase {
                Phase::Finished => return Status::Done,
                Phase::Var { left, disagree, .. } => {
                    if *left > 0 {
                        let x = self.g.sample(&mut self.rng);
                        return self.ask(x);
                    }
                    let m = p.var_samples() as f64;
                    self.estimates = disagree.iter().map(|&d| d as f64 / m).collect();
                    let Some(t) = self.estimates.iter().position(|&v| v >= p.var_threshold())
                    else {
                        return self.finish(Ok(()));
                    };
                    if self.iterations >= p.iteration_cap() {
                        let iterations = self.iterations;
                        return self.finish(Err(AlgorithmError::IterationCap { iterations }));
                    }
                    let free = self.g.free();
                    if free.is_empty() {
                        let iteration = self.iterations;
                        return self.finish(Err(AlgorithmError::NoInfluential { iteration }));
                    }
                    let target = match p.schedule {
                        InfluenceSchedule::Hoeffding => p.inf_samples(),
                        InfluenceSchedule::Adaptive => FIRST_ROUND.min(p.inf_samples()),
                    };
                    self.phase = Phase::Inf(InfState {
                        t,
                        counts: vec![0; free.len()],
                        free,
                        target,
                        done: 0,
                        x: Bits::zeros(0),
                        fx: false,
                        cursor: 0,
                        retried: false,
                    });
                }
                Phase::Inf(s) => {
                    if s.done < s.target {
                        if s.cursor == 0 {
                            s.x = self.g.sample(&mut self.rng);
                            let x = s.x.clone();
                            return self.ask(x);
                        }
                        let mut y = s.x.clone();
                        y.flip(s.free[s.cursor - 1]);
                        return self.ask(y);
                    }
                    let full = p.inf_samples();
                    let done = s.done as f64;
                    let chosen = if s.done >= full {
                        s.counts
                            .iter()
                            .position(|&c| c as f64 / done >= p.inf_threshold())
                    } else {
                        let gamma = p.gamma() / (s.free.len() as f64 * f64::from(p.rounds()));
                        let radius = hoeffding_radius(s.done, gamma);
                        s.counts
                            .iter()
                            .position(|&c| c as f64 / done - radius >= p.inf_threshold() / 2.0)
                    };
                    match chosen {
                        Some(k) => {
                            let j = s.free[k];
                            let b: bool = self.rng.gen();
                            self.g.fix(j, b);
                            self.iterations += 1;
                            self.phase = Self::var_phase(&p);
                        }
                        None if s.target < full => s.target = (2 * s.target).min(full),
                        None if !s.retried => {
                            s.retried = true;
                            s.done = 0;
                            s.counts.iter_mut().for_each(|c| *c = 0);
                        }
                        None => {
                            let iteration = self.iterations;
                            return self.finish(Err(AlgorithmError::NoInfluential { iteration }));
                        }
                    }
                }
            }
        }
    }
}

/// Runs the machine to completion against `oracle`.
pub fn algorithm_a(
    oracle: &mut dyn BoolFunOracle,
    params: AlgorithmParams,
    seed: u64,
) -> Result<AlgorithmOutcome, AlgorithmError> {
    assert_eq!(oracle.input_len(), params.input_len);
    assert_eq!(oracle.output_len(), params.output_len);
    let mut a = AlgorithmA::seeded(params, seed);
    let mut status = a.resume(None);
    while status == Status::Query {
        let answer = oracle.query(a.pending_query().expect("pending query"));
        status = a.resume(Some(&answer));
    }
    a.into_result().expect("finished")
}
