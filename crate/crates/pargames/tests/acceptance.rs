//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pargames::checks;
use pargames::corpus::Corpus;
use pargames::experiments::{self, PrfChoice, PrfConfig};
use pargames_core::attacks::{
    check_collision, collision_finder, extend, forge, hamming, hamming_fun, mac_fixture,
    CollisionParams, HammingMode,
};
use pargames_core::influence::{
    algorithm_a, AlgorithmParams, DecisionTree, InfluenceSchedule, Node, PartialAssignment,
};
use pargames_core::prf::{alpha, alpha_distribution, tv_random_baseline};
use pargames_core::{Bits, Poly, Prob};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn within(start: Instant, secs: u64) -> bool {
    start.elapsed() < Duration::from_secs(secs)
}

fn category_laws() -> Outcome {
    let start = Instant::now();
    let r = checks::category_laws(1, 100, 3).unwrap();
    let ok = r.passed() && within(start, 60);
    outcome(
        ok,
        format!(
            "{} cases, {} failures, {:.1?}",
            r.cases,
            r.failures.len(),
            start.elapsed()
        ),
    )
}

fn oracle_bang() -> Outcome {
    let mut ok = true;
    let mut seen = Vec::new();
    for n in 0..=4u64 {
        let (o, b) = checks::oracle_bang_counts(n).unwrap();
        let expected = 3 * (1usize << n) - 2;
        ok &= o == b && o == expected;
        seen.push(format!("{o}/{b}"));
    }
    outcome(ok, format!("counts at n = 0..4: {}", seen.join(" ")))
}

fn normalization() -> Outcome {
    let r = checks::normalization(8, 12).unwrap();
    outcome(
        r.passed(),
        format!(
            "{} strategies checked, {} failures",
            r.cases,
            r.failures.len()
        ),
    )
}

/// Walks `t` on `x`, returning the output and the coordinates read.
fn walk(t: &DecisionTree, x: u64) -> (bool, Vec<usize>) {
    let mut at = 0;
    let mut read = Vec::new();
    loop {
        match t.nodes()[at] {
            Node::Leaf(b) => return (b, read),
            Node::Query { index, zero, one } => {
                read.push(index);
                at = if (x >> index) & 1 == 1 { one } else { zero };
            }
        }
    }
}

struct Instance {
    tree: DecisionTree,
    big_n: usize,
    fixed: Vec<Option<bool>>,
}

impl Instance {
    fn consistent(&self) -> Vec<u64> {
        (0..1u64 << self.big_n)
            .filter(|x| {
                self.fixed
                    .iter()
                    .enumerate()
                    .all(|(j, f)| f.is_none_or(|b| ((x >> j) & 1 == 1) == b))
            })
            .collect()
    }

    fn free(&self) -> Vec<usize> {
        (0..self.big_n)
            .filter(|&j| self.fixed[j].is_none())
            .collect()
    }

    fn assignment(&self) -> PartialAssignment {
        let mut g = PartialAssignment::empty(self.big_n);
        for (j, f) in self.fixed.iter().enumerate() {
            if let Some(b) = f {
                g.fix(j, *b);
            }
        }
        g
    }
}

fn tree_corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|_| {
            let big_n = rng.gen_range(1..=10);
            let depth = rng.gen_range(1..=4);
            let tree = DecisionTree::random(&mut rng, big_n, depth);
            let fixed = (0..big_n)
                .map(|_| rng.gen_bool(0.3).then(|| rng.gen()))
                .collect();
            Instance { tree, big_n, fixed }
        })
        .collect()
}

/// Exact variance and per-coordinate influence counts, over `xs`.
fn var_and_influence(inst: &Instance, xs: &[u64]) -> (Prob, BTreeMap<usize, u128>) {
    let m = xs.len() as u128;
    let ones = xs.iter().filter(|&&x| walk(&inst.tree, x).0).count() as u128;
    let var = Prob::new(2 * ones * (m - ones), m * m);
    let inf = inst
        .free()
        .into_iter()
        .map(|j| {
            let c = xs
                .iter()
                .filter(|&&x| walk(&inst.tree, x).0 != walk(&inst.tree, x ^ (1 << j)).0)
                .count() as u128;
            (j, c)
        })
        .collect();
    (var, inf)
}

fn infvariable(corpus: &[Instance]) -> Outcome {
    let start = Instant::now();
    let mut fails = 0;
    let mut mismatches = 0;
    for inst in corpus {
        let xs = inst.consistent();
        let m = xs.len() as u128;
        let (var, inf) = var_and_influence(inst, &xs);
        let depth = inst.tree.depth().max(1) as u128;
        let g = inst.assignment();
        if inst.tree.variance(&g) != var {
            mismatches += 1;
        }
        for (&j, &c) in &inf {
            if inst.tree.influence(&g, j) != Prob::new(c, m) {
                mismatches += 1;
            }
        }
        let holds = var == Prob::from_integer(0)
            || inf
                .values()
                .any(|&c| Prob::new(c, m) >= var / Prob::from_integer(depth));
        fails += !holds as usize;
    }
    let ok = fails == 0 && mismatches == 0 && within(start, 120);
    outcome(
        ok,
        format!(
            "{} trees, {fails} violations, {mismatches} library mismatches, {:.1?}",
            corpus.len(),
            start.elapsed()
        ),
    )
}

fn reducedelta(corpus: &[Instance]) -> Outcome {
    let mut checked = 0;
    let mut fails = 0;
    let mut mismatches = 0;
    for inst in corpus {
        let xs = inst.consistent();
        let (_, inf) = var_and_influence(inst, &xs);
        let outside = |x: u64, j: Option<usize>| {
            walk(&inst.tree, x)
                .1
                .iter()
                .filter(|&&i| inst.fixed[i].is_none() && Some(i) != j)
                .count() as u128
        };
        let before: u128 = xs.iter().map(|&x| outside(x, None)).sum();
        let g = inst.assignment();
        let s: Vec<usize> = (0..inst.big_n)
            .filter(|&j| inst.fixed[j].is_some())
            .collect();
        if inst.tree.avg_queries(&g, &s) != Prob::new(before, xs.len() as u128) {
            mismatches += 1;
        }
        for (&j, &c) in &inf {
            checked += 1;
            let after: u128 = xs.iter().map(|&x| outside(x, Some(j))).sum();
            if after + c > before {
                fails += 1;
            }
        }
    }
    outcome(
        fails == 0 && mismatches == 0,
        format!("{checked} (tree, j) pairs, {fails} violations, {mismatches} library mismatches"),
    )
}

fn algorithm_a_runs() -> Outcome {
    let start = Instant::now();
    let (eps, delta) = (0.1, 0.1);
    let corpus = Corpus::generate(50, 32, 4, 3, 7);
    let mut wins = 0;
    let mut over_cap = 0;
    for (i, inst) in corpus.instances.iter().enumerate() {
        let depth = inst.depth().max(1);
        let l = inst.trees.len();
        let params = AlgorithmParams {
            input_len: 32,
            output_len: l,
            depth,
            eps,
            delta,
            schedule: InfluenceSchedule::Adaptive,
        };
        let cap = (10.0 * (l * depth * depth) as f64 / (eps * delta)).ceil() as usize;
        let Ok(out) = algorithm_a(&mut inst.function(), params, i as u64) else {
            continue;
        };
        let g = out.assignment;
        over_cap += (g.dom_size() > cap) as usize;
        let worst = inst
            .trees
            .iter()
            .map(|t| {
                let mut coords: Vec<usize> = t
                    .nodes()
                    .iter()
                    .filter_map(|n| match n {
                        Node::Query { index, .. } => Some(*index),
                        Node::Leaf(_) => None,
                    })
                    .filter(|&j| !g.is_fixed(j))
                    .collect();
                coords.sort_unstable();
                coords.dedup();
                let m = 1u64 << coords.len();
                let ones = (0..m)
                    .filter(|&bits| {
                        let mut x = 0u64;
                        for j in 0..32 {
                            if g.get(j) == Some(true) {
                                x |= 1 << j;
                            }
                        }
                        for (k, &j) in coords.iter().enumerate() {
                            x |= ((bits >> k) & 1) << j;
                        }
                        walk(t, x).0
                    })
                    .count() as f64;
                let p = ones / m as f64;
                2.0 * p * (1.0 - p)
            })
            .fold(0.0, f64::max);
        wins += (worst <= eps) as usize;
    }
    let rate = wins as f64 / 50.0;
    let ok = rate >= 0.85 && over_cap == 0 && within(start, 600);
    outcome(
        ok,
        format!(
            "success {:.0}% of 50, {over_cap} over the domain cap, {:.1?}",
            100.0 * rate,
            start.elapsed()
        ),
    )
}

fn extension_distance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (big_n, n) = (8usize, 6u64);
    let shift = n - big_n.trailing_zeros() as u64;
    let mut fails = 0;
    for _ in 0..100 {
        let x = Bits::random(big_n, &mut rng);
        let y = Bits::random(big_n, &mut rng);
        let f = |v: &Bits, z: u64| v.get((z >> shift) as usize);
        let differ = (0..1u64 << n).filter(|&z| f(&x, z) != f(&y, z)).count() as u128;
        let direct = (0..big_n).filter(|&i| x.get(i) != y.get(i)).count() as u128;
        let (ex, ey) = (extend(x.clone(), n).unwrap(), extend(y.clone(), n).unwrap());
        let library = hamming_fun(&|z| ex.eval(z), &|z| ey.eval(z), n, HammingMode::Exact).unwrap();
        let agree = (0..1u64 << n).all(|z| ex.eval(&Bits::from_u64_msb(z, n as usize)) == f(&x, z));
        let ok = Prob::new(differ, 1 << n) == Prob::new(direct, big_n as u128)
            && hamming(&x, &y) == Prob::new(direct, big_n as u128)
            && library == direct as f64 / big_n as f64
            && agree;
        fails += !ok as usize;
    }
    outcome(fails == 0, format!("100 pairs, {fails} failures"))
}

struct AttackTally {
    trials: usize,
    successes: usize,
    forgeries_held: usize,
    sampling_off: usize,
    elapsed: Duration,
}

fn collision_trials() -> AttackTally {
    let start = Instant::now();
    let (n, big_n) = (16u64, 256usize);
    let (q, p) = (Poly::constant(8), Poly::constant(8));
    let params = CollisionParams {
        big_n,
        delta: 0.2,
        eps: None,
        schedule: InfluenceSchedule::Adaptive,
    };
    let shift = n - big_n.trailing_zeros() as u64;
    let mut tally = AttackTally {
        trials: 50,
        successes: 0,
        forgeries_held: 0,
        sampling_off: 0,
        elapsed: Duration::ZERO,
    };
    for trial in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let fixture = mac_fixture(Bits::random(n as usize, &mut rng), &q, &p);
        let mut oracle = fixture.oracle();
        let Ok(c) = collision_finder(&mut oracle, &params, &mut rng) else {
            continue;
        };
        let report = check_collision(&mut oracle, &c, 10_000, &mut rng).unwrap();
        let tag = |x: &Bits| fixture.tag(&mut |z: &Bits| x.get((z.to_u64_msb() >> shift) as usize));
        let (tag_g, tag_h) = (tag(&c.x1), tag(&c.x2));
        let dist = |a: &Bits, b: &Bits| a.hamming(b) as f64 / big_n as f64;
        let min_query = (0..c.log.count())
            .map(|k| c.log.get(k))
            .flat_map(|z| [dist(&c.x1, &z), dist(&c.x2, &z)])
            .fold(1.0, f64::min);
        let success = dist(&c.x1, &c.x2) >= 0.1 && tag_g == tag_h && min_query >= 0.1;
        tally.sampling_off += (success != report.success || !report.sampled_agree) as usize;
        if success {
            tally.successes += 1;
            let forgery = forge(&mut oracle, &c.x1, &c.x2).unwrap();
            tally.forgeries_held += (forgery.holds() && forgery.actual == tag_h) as usize;
        }
    }
    tally.elapsed = start.elapsed();
    tally
}

fn collisions(t: &AttackTally) -> Outcome {
    let rate = t.successes as f64 / t.trials as f64;
    outcome(
        rate >= 0.8 && t.sampling_off == 0 && t.elapsed < Duration::from_secs(900),
        format!(
            "success {:.0}% of {}, {} sampled/exact disagreements, {:.1?}",
            100.0 * rate,
            t.trials,
            t.sampling_off,
            t.elapsed
        ),
    )
}

fn forgeries(t: &AttackTally) -> Outcome {
    outcome(
        t.successes > 0 && t.forgeries_held == t.successes,
        format!("{}/{} forgeries hold", t.forgeries_held, t.successes),
    )
}

fn alpha_bias() -> Outcome {
    let mut sets = 0;
    let mut fails = 0;
    for d in 1..=8u64 {
        for mask in 0..(1u64 << d) - 1 {
            let used: Vec<u64> = (0..d).filter(|c| (mask >> c) & 1 == 1).collect();
            let unused: Vec<u64> = (0..d).filter(|c| (mask >> c) & 1 == 0).collect();
            let free = unused.len() as u64;
            for w in 1..=12usize {
                sets += 1;
                let total = 1u64 << w;
                let mut counts = vec![0u128; free as usize];
                for j in 0..total {
                    counts[(j % free) as usize] += 1;
                }
                let tv = counts
                    .iter()
                    .map(|&c| {
                        let p = Prob::new(c, total as u128);
                        let u = Prob::new(1, free as u128);
                        if p > u {
                            p - u
                        } else {
                            u - p
                        }
                    })
                    .fold(Prob::from_integer(0), |a, b| a + b)
                    / Prob::from_integer(2);
                let expected: BTreeMap<u64, Prob> = unused
                    .iter()
                    .zip(&counts)
                    .map(|(&c, &k)| (c, Prob::new(k, total as u128)))
                    .collect();
                let probe = Bits::from_u64_msb(mask.wrapping_mul(2654435761) % total, w);
                let library_ok = alpha_distribution(w, &used, d) == expected
                    && alpha(&probe, &used, d) == unused[(probe.to_u64_msb() % free) as usize];
                if tv > Prob::new(d as u128, total as u128) || !library_ok {
                    fails += 1;
                }
            }
        }
    }
    outcome(
        fails == 0,
        format!("{sets} (D, used, w) cases, {fails} failures"),
    )
}

/// Transcript distance by enumerating coordinate orders with a from-scratch
/// modular selection rule.
fn baseline_oracle(n: u64) -> Prob {
    let lg = 64 - (n.max(1) - 1).leading_zeros() as u64;
    let lg = if n <= 1 { 0 } else { lg };
    let d = 1u64 << lg;
    let w = lg as usize + 8;
    let total = 1u128 << w;
    fn go(d: u64, n: u64, total: u128, used: &mut Vec<u64>, pa: Prob, pb: Prob) -> Prob {
        if used.len() as u64 == n {
            return if pa > pb { pa - pb } else { pb - pa };
        }
        let unused: Vec<u64> = (0..d).filter(|c| !used.contains(c)).collect();
        let free = unused.len() as u128;
        let mut sum = Prob::from_integer(0);
        for (rank, &c) in unused.iter().enumerate() {
            let hits = (0..total).filter(|j| j % free == rank as u128).count() as u128;
            used.push(c);
            sum += go(
                d,
                n,
                total,
                used,
                pa * Prob::new(hits, total),
                pb * Prob::new(1, free),
            );
            used.pop();
        }
        sum
    }
    go(
        d,
        n,
        total,
        &mut Vec::new(),
        Prob::from_integer(1),
        Prob::from_integer(1),
    ) / Prob::from_integer(2)
}

fn random_baseline() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1u64, 2, 4] {
        let lg = if n <= 1 {
            0
        } else {
            64 - (n - 1).leading_zeros() as usize
        };
        let w = lg + 8;
        let tv = tv_random_baseline(n, w).unwrap();
        let bound = Prob::new((n * n) as u128 * (1 << lg), 1 << w);
        ok &= tv == baseline_oracle(n) && tv <= bound;
        parts.push(format!("n={n}: {tv} <= {bound}"));
    }
    let config = PrfConfig {
        n: 16,
        trials: 10_000,
        adversary: "all".into(),
        prf: PrfChoice::Builtin,
        w: "lg + 8".into(),
        p: "8".into(),
        sessions: "2".into(),
        max_advantage: 0.1,
        seed: 11,
    };
    let report = experiments::prf_distinguish(config, false).unwrap();
    let worst = report
        .results
        .iter()
        .map(|r| r.advantage_estimate)
        .fold(0.0, f64::max);
    ok &= report.results.len() == 5 && worst <= 0.1;
    parts.push(format!(
        "largest advantage {worst:.4} over {} adversaries",
        report.results.len()
    ));
    outcome(ok, parts.join(", "))
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 5] = [
        &["games-check", "--max-n", "3", "--triples", "20"],
        &["influence", "--instances", "10"],
        &["collide", "--trials", "3", "--samples", "1000"],
        &[
            "forge", "--n", "8", "--N", "16", "--q", "2", "--p", "2", "--trials", "4",
        ],
        &["prf-distinguish", "--trials", "500"],
    ];
    let mut same = 0;
    for args in runs {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_pargames"))
                .args(args)
                .args(["--seed", "42"])
                .output()
                .unwrap()
                .stdout
        };
        let (a, b) = (once(), once());
        same += (!a.is_empty() && a == b) as usize;
    }
    outcome(
        same == runs.len(),
        format!("{same}/{} subcommands byte-identical", runs.len()),
    )
}

fn main() -> ExitCode {
    let corpus = tree_corpus();
    let attack = collision_trials();
    let criteria: Vec<Criterion> = vec![
        ("composition laws", Box::new(category_laws)),
        ("oracle and bang play counts", Box::new(oracle_bang)),
        ("probability normalization", Box::new(normalization)),
        (
            "influential variable exists",
            Box::new(|| infvariable(&corpus)),
        ),
        (
            "query complexity drops by the influence",
            Box::new(|| reducedelta(&corpus)),
        ),
        ("algorithm A", Box::new(algorithm_a_runs)),
        ("extension preserves distance", Box::new(extension_distance)),
        ("collision attack", Box::new(|| collisions(&attack))),
        ("forgery", Box::new(|| forgeries(&attack))),
        ("alpha bias bound", Box::new(alpha_bias)),
        (
            "random baseline and adversary suite",
            Box::new(random_baseline),
        ),
        ("deterministic reports", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += !o.ok as usize;
        println!(
            "{} {:>2} {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
