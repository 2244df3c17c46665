//! The experiments behind each subcommand. Every report embeds its
//! configuration and seed and is a pure function of them, apart from the
//! optional wall-clock fields.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use pargames_core::attacks::{
    check_collision, choose_n, collision_finder, forge, mac_fixture, CollisionParams,
    FunctionalOracle, GameFunctional,
};
use pargames_core::influence::{algorithm_a, AlgorithmParams, InfluenceSchedule};
use pargames_core::prf::{
    advantage_from_rates, adversary, canonical_argument, experiment, logsof, AdversaryKind,
    Candidate, FirstOrderPrf, ToyPrf,
};
use pargames_core::strategies::{observe, prob_to_f64, RngSource};
use pargames_core::{Bits, Move, Play, Poly, RandomSource, StepMeter, StrategyError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checks::{self, SuiteResult};
use crate::corpus::Corpus;
use crate::runner::run_trials;
use crate::sha::Sha256Prf;
use crate::Error;

/// Milliseconds since `start`, when timing is on.
pub fn elapsed(start: Instant, timing: bool) -> Option<f64> {
    timing.then(|| (start.elapsed().as_secs_f64() * 1000.0).round())
}

pub fn parse_poly(flag: &str, text: &str) -> Result<Poly, Error> {
    text.parse()
        .map_err(|e| Error::config(format!("--{flag} `{text}`: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule(pub InfluenceSchedule);

impl FromStr for Schedule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hoeffding" => Ok(Schedule(InfluenceSchedule::Hoeffding)),
            "adaptive" => Ok(Schedule(InfluenceSchedule::Adaptive)),
            _ => Err(format!("unknown schedule `{s}` (hoeffding, adaptive)")),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            InfluenceSchedule::Hoeffding => "hoeffding",
            InfluenceSchedule::Adaptive => "adaptive",
        })
    }
}

impl Serialize for Schedule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// games-check

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GamesCheckConfig {
    pub max_n: u64,
    pub triples: u64,
    pub max_bits: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GamesCheckReport {
    pub command: &'static str,
    pub config: GamesCheckConfig,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
    pub wall_ms: Option<f64>,
}

pub fn games_check(config: GamesCheckConfig, timing: bool) -> Result<GamesCheckReport, Error> {
    let start = Instant::now();
    let suites = vec![
        checks::category_laws(config.seed, config.triples, config.max_n.min(3))?,
        checks::oracle_bang(config.max_n)?,
        checks::normalization(config.max_n, config.max_bits)?,
    ];
    Ok(GamesCheckReport {
        command: "games-check",
        passed: suites.iter().all(SuiteResult::passed),
        config,
        suites,
        wall_ms: elapsed(start, timing),
    })
}

// influence

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceConfig {
    /// Corpus file read, or `None` for a generated corpus.
    pub corpus: Option<String>,
    pub instances: u64,
    #[serde(rename = "N")]
    pub input_len: usize,
    pub max_outputs: usize,
    pub max_depth: usize,
    pub eps: f64,
    pub delta: f64,
    pub schedule: Schedule,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceRun {
    pub instance: u64,
    pub outputs: usize,
    pub depth: usize,
    pub success: bool,
    pub dom_size: usize,
    pub iteration_cap: u64,
    pub iterations: u64,
    pub queries: u64,
    /// Largest exact variance of an output bit under `U_g`.
    pub max_variance: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceReport {
    pub command: &'static str,
    pub config: InfluenceConfig,
    pub runs: Vec<InfluenceRun>,
    pub success_rate: f64,
    /// `1 - delta - 0.05`.
    pub threshold: f64,
    pub cap_respected: bool,
    pub passed: bool,
    pub wall_ms: Option<f64>,
}

pub fn influence(
    config: InfluenceConfig,
    corpus: &Corpus,
    timing: bool,
) -> Result<InfluenceReport, Error> {
    if !(config.eps > 0.0 && config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::config("need eps > 0 and 0 < delta < 1"));
    }
    let start = Instant::now();
    let runs = run_trials(config.seed, corpus.instances.len() as u64, |i, rng| {
        let inst = &corpus.instances[i as usize];
        let params = AlgorithmParams {
            input_len: inst.input_len,
            output_len: inst.trees.len(),
            depth: inst.depth().max(1),
            eps: config.eps,
            delta: config.delta,
            schedule: config.schedule.0,
        };
        let mut f = inst.function();
        let mut run = InfluenceRun {
            instance: i,
            outputs: inst.trees.len(),
            depth: inst.depth(),
            success: false,
            dom_size: 0,
            iteration_cap: params.iteration_cap(),
            iterations: 0,
            queries: 0,
            max_variance: None,
            error: None,
        };
        match algorithm_a(&mut f, params, rng.gen()) {
            Ok(out) => {
                let var = inst
                    .trees
                    .iter()
                    .map(|t| prob_to_f64(&t.variance(&out.assignment)))
                    .fold(0.0, f64::max);
                run.success = var <= config.eps;
                run.dom_size = out.assignment.dom_size();
                run.iterations = out.iterations;
                run.queries = out.queries;
                run.max_variance = Some(var);
            }
            Err(e) => run.error = Some(e.to_string()),
        }
        run
    });
    let wins = runs.iter().filter(|r| r.success).count();
    let success_rate = wins as f64 / runs.len().max(1) as f64;
    let threshold = 1.0 - config.delta - 0.05;
    let cap_respected = runs.iter().all(|r| r.dom_size as u64 <= r.iteration_cap);
    Ok(InfluenceReport {
        command: "influence",
        passed: success_rate >= threshold && cap_respected,
        config,
        runs,
        success_rate,
        threshold,
        cap_respected,
        wall_ms: elapsed(start, timing),
    })
}

// collide and forge

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollideConfig {
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub q: String,
    pub p: String,
    pub delta: f64,
    pub eps: Option<f64>,
    pub trials: u64,
    pub samples: u64,
    pub schedule: Schedule,
    /// Play the fixture's strategy move by move instead of calling it.
    pub via_game: bool,
    pub threshold: f64,
    pub seed: u64,
}

impl CollideConfig {
    fn polys(&self) -> Result<(Poly, Poly), Error> {
        Ok((parse_poly("q", &self.q)?, parse_poly("p", &self.p)?))
    }

    fn params(&self) -> CollisionParams {
        CollisionParams {
            big_n: self.big_n,
            delta: self.delta,
            eps: self.eps,
            schedule: self.schedule.0,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        let (q, p) = self.polys()?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config("need 0 < delta < 1"));
        }
        if !self.big_n.is_power_of_two() || self.n >= 64 || self.big_n as u64 > 1 << self.n {
            return Err(Error::config(format!(
                "N = {} must be a power of two with N <= 2^n",
                self.big_n
            )));
        }
        if q.eval(self.n) == 0 || p.eval(self.n) == 0 {
            return Err(Error::config("q(n) and p(n) must be positive"));
        }
        Ok(())
    }

    /// Whether `N` satisfies the size condition of the attack's analysis.
    pub fn size_condition(&self) -> Result<bool, Error> {
        let (q, p) = self.polys()?;
        let l = p.eval(self.n);
        let eps = self.eps.unwrap_or(self.delta / l as f64);
        Ok(choose_n(l, q.eval(self.n), eps, self.delta, 64)
            .is_ok_and(|smallest| smallest <= self.big_n as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollideTrial {
    pub trial: u64,
    pub seed: u64,
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub q: u64,
    pub p: u64,
    pub delta: f64,
    pub hamming_gh: f64,
    pub tags_equal: bool,
    pub min_query_distance: f64,
    pub success: bool,
    pub wall_ms: Option<f64>,
    pub hamming_gh_sampled: f64,
    pub min_query_distance_sampled: f64,
    pub sampled_agree: bool,
    pub dom_size: usize,
    pub iterations: u64,
    pub queries: u64,
    pub tag_g: String,
    pub tag_h: String,
    pub forgery_holds: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollideReport {
    pub command: &'static str,
    pub config: CollideConfig,
    pub seed: u64,
    pub size_condition: bool,
    pub trials: Vec<CollideTrial>,
    pub success_rate: f64,
    pub passed: bool,
    pub wall_ms: Option<f64>,
}

fn collide_trial(
    config: &CollideConfig,
    q: &Poly,
    p: &Poly,
    i: u64,
    rng: &mut ChaCha8Rng,
    timing: bool,
) -> CollideTrial {
    let start = Instant::now();
    let key = Bits::random(config.n as usize, rng);
    let fixture = mac_fixture(key, q, p);
    let mut row = CollideTrial {
        trial: i,
        seed: config.seed,
        n: config.n,
        big_n: config.big_n,
        q: q.eval(config.n),
        p: p.eval(config.n),
        delta: config.delta,
        hamming_gh: 0.0,
        tags_equal: false,
        min_query_distance: 0.0,
        success: false,
        wall_ms: None,
        hamming_gh_sampled: 0.0,
        min_query_distance_sampled: 0.0,
        sampled_agree: false,
        dom_size: 0,
        iterations: 0,
        queries: 0,
        tag_g: String::new(),
        tag_h: String::new(),
        forgery_holds: false,
        error: None,
    };
    let mut target: Box<dyn FunctionalOracle> = if config.via_game {
        match GameFunctional::new(fixture.strategy(), config.n) {
            Ok(g) => Box::new(g),
            Err(e) => {
                row.error = Some(e.to_string());
                return row;
            }
        }
    } else {
        Box::new(fixture.oracle())
    };
    let outcome = (|| -> Result<(), Error> {
        let c = collision_finder(&mut *target, &config.params(), rng)?;
        let r = check_collision(&mut *target, &c, config.samples, rng)?;
        let f = forge(&mut *target, &c.x1, &c.x2)?;
        row.hamming_gh = r.hamming_gh;
        row.tags_equal = r.tags_equal;
        row.min_query_distance = r.min_query_distance;
        row.success = r.success;
        row.hamming_gh_sampled = r.hamming_gh_sampled;
        row.min_query_distance_sampled = r.min_query_distance_sampled;
        row.sampled_agree = r.sampled_agree;
        row.dom_size = r.dom_size;
        row.iterations = c.iterations;
        row.queries = c.queries;
        row.tag_g = r.tag_g.to_string();
        row.tag_h = r.tag_h.to_string();
        row.forgery_holds = f.holds();
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.wall_ms = elapsed(start, timing);
    row
}

pub fn collide(config: CollideConfig, timing: bool) -> Result<CollideReport, Error> {
    config.validate()?;
    let start = Instant::now();
    let (q, p) = config.polys()?;
    let trials = run_trials(config.seed, config.trials, |i, rng| {
        collide_trial(&config, &q, &p, i, rng, timing)
    });
    let wins = trials.iter().filter(|t| t.success).count();
    let success_rate = wins as f64 / trials.len().max(1) as f64;
    Ok(CollideReport {
        command: "collide",
        seed: config.seed,
        size_condition: config.size_condition()?,
        passed: success_rate >= config.threshold,
        config,
        trials,
        success_rate,
        wall_ms: elapsed(start, timing),
    })
}

/// The per-trial columns of the collision report, for CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollideRow {
    pub trial: u64,
    pub seed: u64,
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub q: u64,
    pub p: u64,
    pub delta: f64,
    pub hamming_gh: f64,
    pub tags_equal: bool,
    pub min_query_distance: f64,
    pub success: bool,
    pub wall_ms: Option<f64>,
}

impl From<&CollideTrial> for CollideRow {
    fn from(t: &CollideTrial) -> Self {
        CollideRow {
            trial: t.trial,
            seed: t.seed,
            n: t.n,
            big_n: t.big_n,
            q: t.q,
            p: t.p,
            delta: t.delta,
            hamming_gh: t.hamming_gh,
            tags_equal: t.tags_equal,
            min_query_distance: t.min_query_distance,
            success: t.success,
            wall_ms: t.wall_ms,
        }
    }
}

pub fn write_csv(report: &CollideReport, out: impl std::io::Write) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    for t in &report.trials {
        w.serialize(CollideRow::from(t))
            .map_err(|e| Error::config(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::io("csv", e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForgeTrial {
    pub trial: u64,
    pub collision: bool,
    pub predicted: String,
    pub actual: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForgeReport {
    pub command: &'static str,
    pub config: CollideConfig,
    pub seed: u64,
    pub trials: Vec<ForgeTrial>,
    pub collisions: u64,
    pub forgeries: u64,
    /// Forgeries among trials with a successful collision.
    pub forgery_rate: Option<f64>,
    pub passed: bool,
    pub wall_ms: Option<f64>,
}

/// Runs the collision trials and, on each success, predicts the tag of the
/// second argument function by the tag of the first.
pub fn forge_run(config: CollideConfig, timing: bool) -> Result<ForgeReport, Error> {
    let start = Instant::now();
    let collisions = collide(config.clone(), false)?;
    let trials: Vec<ForgeTrial> = collisions
        .trials
        .iter()
        .map(|t| ForgeTrial {
            trial: t.trial,
            collision: t.success,
            predicted: t.tag_g.clone(),
            actual: t.tag_h.clone(),
            holds: t.forgery_holds,
        })
        .collect();
    let ok: Vec<&ForgeTrial> = trials.iter().filter(|t| t.collision).collect();
    let forgeries = ok.iter().filter(|t| t.holds).count() as u64;
    let n_ok = ok.len() as u64;
    Ok(ForgeReport {
        command: "forge",
        seed: config.seed,
        config,
        trials,
        collisions: n_ok,
        forgeries,
        forgery_rate: (n_ok > 0).then(|| forgeries as f64 / n_ok as f64),
        passed: n_ok > 0 && forgeries == n_ok,
        wall_ms: elapsed(start, timing),
    })
}

// prf-distinguish

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrfChoice {
    Builtin,
    Sha256,
}

impl FromStr for PrfChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "builtin" => Ok(PrfChoice::Builtin),
            "sha256" => Ok(PrfChoice::Sha256),
            _ => Err(format!("unknown PRF `{s}` (builtin, sha256)")),
        }
    }
}

impl fmt::Display for PrfChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrfChoice::Builtin => "builtin",
            PrfChoice::Sha256 => "sha256",
        })
    }
}

impl Serialize for PrfChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl PrfChoice {
    pub fn build(self, width: Poly) -> Arc<dyn FirstOrderPrf> {
        match self {
            PrfChoice::Builtin => Arc::new(ToyPrf::new(width)),
            PrfChoice::Sha256 => Arc::new(Sha256Prf::new(width)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrfConfig {
    pub n: u64,
    pub trials: u64,
    /// An adversary name, or `all`.
    pub adversary: String,
    pub prf: PrfChoice,
    /// Output width of the first-order PRF.
    pub w: String,
    /// Output length of the second-order functional.
    pub p: String,
    /// Sessions open to the adversary.
    pub sessions: String,
    pub max_advantage: f64,
    pub seed: u64,
}

impl PrfConfig {
    fn adversaries(&self) -> Result<Vec<AdversaryKind>, Error> {
        if self.adversary == "all" {
            return Ok(AdversaryKind::ALL.to_vec());
        }
        Ok(vec![self.adversary.parse().map_err(Error::config)?])
    }

    pub fn candidate(&self) -> Result<Candidate, Error> {
        let w = parse_poly("w", &self.w)?;
        let p = parse_poly("p", &self.p)?;
        if p.eval(self.n) > w.eval(self.n) {
            return Err(Error::config("need p(n) <= w(n)"));
        }
        Ok(Candidate::keyed(self.prf.build(w), p)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrfResult {
    pub n: u64,
    pub adversary: String,
    pub advantage_estimate: f64,
    pub stderr_estimate: f64,
    pub trials: u64,
    pub p_candidate: f64,
    pub p_random: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrfReport {
    pub command: &'static str,
    pub config: PrfConfig,
    pub seed: u64,
    pub results: Vec<PrfResult>,
    pub passed: bool,
    pub wall_ms: Option<f64>,
}

fn is_one(m: &Result<Move, StrategyError>) -> Result<bool, Error> {
    match m {
        Ok(m) => Ok(*m == Move::bit(true)),
        Err(e) => Err(e.clone().into()),
    }
}

pub fn prf_distinguish(config: PrfConfig, timing: bool) -> Result<PrfReport, Error> {
    let start = Instant::now();
    let kinds = config.adversaries()?;
    let cand = config.candidate()?;
    let p = parse_poly("p", &config.p)?;
    let s = parse_poly("sessions", &config.sessions)?;
    let mut results = Vec::new();
    for (k, kind) in kinds.into_iter().enumerate() {
        let adv = adversary(kind, s.clone(), p.clone());
        let real = experiment(&cand, &adv)?;
        let ideal = experiment(&Candidate::random(p.clone()), &adv)?;
        let seed = pargames_core::mix::hash_words(config.seed, &[k as u64]);
        let outcomes = run_trials(seed, config.trials, |_, rng| {
            let mut coins = RngSource(rng.clone());
            let a = is_one(&observe(&*real, config.n, &mut coins))?;
            let b = is_one(&observe(&*ideal, config.n, &mut coins))?;
            Ok::<_, Error>((a, b))
        });
        let (mut a, mut b) = (0u64, 0u64);
        for o in outcomes {
            let (x, y) = o?;
            a += x as u64;
            b += y as u64;
        }
        let t = config.trials.max(1) as f64;
        let adv = advantage_from_rates(a as f64 / t, b as f64 / t, config.trials);
        results.push(PrfResult {
            n: config.n,
            adversary: kind.name().to_string(),
            advantage_estimate: adv.advantage,
            stderr_estimate: adv.stderr.unwrap_or(0.0),
            trials: config.trials,
            p_candidate: adv.p_candidate,
            p_random: adv.p_random,
        });
    }
    Ok(PrfReport {
        command: "prf-distinguish",
        seed: config.seed,
        passed: results
            .iter()
            .all(|r| r.advantage_estimate <= config.max_advantage),
        config,
        results,
        wall_ms: elapsed(start, timing),
    })
}

/// One play of the candidate on `logsof(p)` with coins from `seed`,
/// answering argument queries with the parity of the coordinate.
pub fn candidate_play(config: &PrfConfig) -> Result<Play, Error> {
    let cand = config.candidate()?.single();
    let mut session = cand.start(config.n);
    let mut coins = RngSource::seeded(config.seed);
    let mut meter = StepMeter::unlimited(config.n);
    let mut play = Vec::new();
    let mut msg = Move::question().right();
    loop {
        let r = session.respond(&msg, &mut coins as &mut dyn RandomSource, &mut meter)?;
        play.push(msg);
        play.push(r.clone());
        if r.path.len() == 1 && !r.is_question() {
            return Ok(play);
        }
        msg = match r.path.as_slice() {
            [_, pargames_core::Step::Copy(i), pargames_core::Step::Right] => {
                Move::question().left().copy(*i).left()
            }
            [_, pargames_core::Step::Copy(i), pargames_core::Step::Left] => {
                let c = r
                    .word()
                    .and_then(|w| w.to_bits())
                    .ok_or_else(|| StrategyError::IllegalMove(r.to_string()))?;
                Move::bit(canonical_argument(&c)).right().copy(*i).left()
            }
            _ => return Err(StrategyError::IllegalMove(r.to_string()).into()),
        };
    }
}

/// The game [`candidate_play`] is a play of.
pub fn candidate_game(config: &PrfConfig) -> Result<pargames_core::Game, Error> {
    Ok(logsof(parse_poly("p", &config.p)?))
}
