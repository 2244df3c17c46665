//! Invariant suites of the game model, run at small `n`.

use num_traits::{One, Zero};
use pargames_core::games::{
    bang, bool_game, oracle_game, str_game, str_le_game, tstr_game, unit_game,
};
use pargames_core::strategies::examples::{fair_coin, ignoring, mult, once, table};
use pargames_core::strategies::{carac_plays, compose, copycat, observe_distribution};
use pargames_core::{Game, Poly, Prob, ProbStrategy, StrategyRef};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::runner::run_trials;
use crate::Error;

/// Plays enumerated per strategy before giving up.
pub const PLAY_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_ground(rng: &mut ChaCha8Rng) -> Game {
    let p = match rng.gen_range(0..3) {
        0 => Poly::id(),
        1 => Poly::constant(1),
        _ => Poly::constant(2),
    };
    match rng.gen_range(0..5) {
        0 => unit_game(),
        1 => bool_game(),
        2 => str_game(p),
        3 => str_le_game(p),
        _ => tstr_game(p),
    }
}

/// Three composable seeded strategies `A -o B`, `B -o C`, `C -o D` on
/// random ground games.
pub fn random_triple(rng: &mut ChaCha8Rng) -> [StrategyRef; 3] {
    let games: Vec<Game> = (0..4).map(|_| random_ground(rng)).collect();
    [0, 1, 2].map(|k| table(games[k].clone(), games[k + 1].clone(), rng.gen()))
}

fn same_plays(a: &StrategyRef, b: &StrategyRef, n: u64) -> Result<bool, Error> {
    Ok(carac_plays(&**a, n, PLAY_LIMIT)? == carac_plays(&**b, n, PLAY_LIMIT)?)
}

/// Associativity of composition and the two copycat identity laws on
/// `triples` random triples, at every `n ≤ max_n`.
pub fn category_laws(seed: u64, triples: u64, max_n: u64) -> Result<SuiteResult, Error> {
    let outcomes = run_trials(seed, triples, |i, rng| -> Result<Vec<String>, Error> {
        let [f, g, h] = random_triple(rng);
        let fg_h = compose(compose(f.clone(), g.clone())?, h.clone())?;
        let f_gh = compose(f.clone(), compose(g, h)?)?;
        let (a, b) = match f.game() {
            Game::Lolli(a, b) => (*a, *b),
            _ => unreachable!("tables play A -o B"),
        };
        let left = compose(copycat(a), f.clone())?;
        let right = compose(f.clone(), copycat(b))?;
        let mut failures = Vec::new();
        for n in 0..=max_n {
            if !same_plays(&fg_h, &f_gh, n)? {
                failures.push(format!("triple {i}: associativity at n = {n}"));
            }
            if !same_plays(&left, &f, n)? || !same_plays(&right, &f, n)? {
                failures.push(format!("triple {i}: copycat identity at n = {n}"));
            }
        }
        Ok(failures)
    });
    let mut failures = Vec::new();
    for o in outcomes {
        failures.extend(o?);
    }
    Ok(SuiteResult {
        name: "category-laws".into(),
        cases: triples * (max_n + 1),
        failures,
    })
}

/// Legal plays of `O^ι` and of `!_ι B` at `n`.
pub fn oracle_bang_counts(n: u64) -> Result<(usize, usize), Error> {
    let o = oracle_game(Poly::id()).legal_plays(n, PLAY_LIMIT)?.len();
    let b = bang(Poly::id(), bool_game())
        .legal_plays(n, PLAY_LIMIT)?
        .len();
    Ok((o, b))
}

pub fn oracle_bang(max_n: u64) -> Result<SuiteResult, Error> {
    let mut failures = Vec::new();
    for n in 0..=max_n {
        let (o, b) = oracle_bang_counts(n)?;
        if o != b {
            failures.push(format!("n = {n}: {o} oracle plays, {b} bang plays"));
        }
    }
    Ok(SuiteResult {
        name: "oracle-bang".into(),
        cases: max_n + 1,
        failures,
    })
}

/// The shipped probabilistic strategies with at most `max_bits` coins at
/// `n`, by name.
pub fn shipped(n: u64, max_bits: u64) -> Vec<(String, ProbStrategy)> {
    let mut out = vec![
        ("once(id)".to_string(), once(Poly::id())),
        ("fair-coin".to_string(), fair_coin()),
        ("ignoring(0)".to_string(), ignoring(false)),
        ("ignoring(1)".to_string(), ignoring(true)),
    ];
    for p in [
        Poly::id(),
        Poly::constant(8),
        Poly::id() + Poly::constant(2),
    ] {
        out.push((format!("mult({p})"), mult(p)));
    }
    out.retain(|(_, f)| f.oracle_budget().eval(n) <= max_bits);
    out
}

/// Probabilities sum to one for every shipped strategy, `once` is ½/½ and
/// `mult` is uniform.
pub fn normalization(max_n: u64, max_bits: u64) -> Result<SuiteResult, Error> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 1..=max_n {
        for (name, f) in shipped(n, max_bits) {
            cases += 1;
            let dist = observe_distribution(&f, n, 1 << max_bits)?;
            let total = dist.values().fold(Prob::zero(), |a, b| a + b);
            if total != Prob::one() {
                failures.push(format!("{name} at n = {n}: total {total}"));
            }
            let expected: Option<(usize, Prob)> = if name.starts_with("once") {
                Some((2, Prob::new(1, 2)))
            } else if name.starts_with("mult") {
                let bits = f.oracle_budget().eval(n);
                Some((1 << bits, Prob::new(1, 1 << bits)))
            } else {
                None
            };
            if let Some((count, p)) = expected {
                if dist.len() != count || dist.values().any(|q| *q != p) {
                    failures.push(format!("{name} at n = {n}: not uniform over {count}"));
                }
            }
        }
    }
    Ok(SuiteResult {
        name: "normalization".into(),
        cases,
        failures,
    })
}
