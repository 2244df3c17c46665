use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::*;
use crate::bits::Bits;
use crate::poly::Poly;
use crate::strategies::{apply_randomized, Deterministic, Prob};

fn b(s: &str) -> Bits {
    Bits::parse(s).unwrap()
}

fn uniform_over(keys: impl Iterator<Item = u64>, count: u128) -> BTreeMap<u64, Prob> {
    keys.map(|k| (k, Prob::new(1, count))).collect()
}

#[test]
fn alpha_examples() {
    assert_eq!(alpha(&b("101"), &[], 4), 1);
    assert_eq!(alpha(&b("0"), &[], 4), 0);
    assert_eq!(alpha(&b("111"), &[2], 4), 1);
    assert_eq!(alpha(&b("110"), &[2], 4), 0);
    assert_eq!(alpha(&b("11"), &[0, 1, 3], 4), 2);
    assert_eq!(alpha(&Bits::zeros(0), &[1], 2), 0);
    assert_eq!(Bits::from_u64_msb(alpha(&b("101"), &[], 4), 2), b("01"));
}

#[test]
fn beta_is_prefix() {
    assert_eq!(beta(&b("1101"), 2).unwrap(), b("11"));
    assert_eq!(beta(&b("1101"), 0).unwrap(), Bits::zeros(0));
    assert!(beta(&b("1"), 2).is_err());
}

#[test]
fn alpha_distribution_matches_brute_force() {
    for d in [1u64, 2, 4, 8] {
        for used_len in 0..d {
            let used: Vec<u64> = (0..used_len).map(|k| (k * 3 + 1) % d).collect();
            let mut used_sorted = used.clone();
            used_sorted.sort();
            used_sorted.dedup();
            if used_sorted.len() != used.len() {
                continue;
            }
            for w in 0..=8usize {
                let mut counts: BTreeMap<u64, u128> = BTreeMap::new();
                for j in 0..1u64 << w {
                    *counts
                        .entry(alpha(&Bits::from_u64_msb(j, w), &used, d))
                        .or_default() += 1;
                }
                let direct: BTreeMap<u64, Prob> = counts
                    .into_iter()
                    .map(|(k, c)| (k, Prob::new(c, 1u128 << w)))
                    .collect();
                let dist = alpha_distribution(w, &used, d);
                let dist: BTreeMap<u64, Prob> =
                    dist.into_iter().filter(|(_, p)| !p.is_zero()).collect();
                assert_eq!(dist, direct);
            }
        }
    }
}

#[test]
fn alpha_bias_bound() {
    for d in [1u64, 2, 4, 8] {
        for used_len in 0..d {
            let used: Vec<u64> = (0..used_len).collect();
            let free = d - used_len;
            for w in 0..=12usize {
                let dist = alpha_distribution(w, &used, d);
                let uniform = uniform_over(used_len..d, free as u128);
                let tv = tv_distance(&dist, &uniform);
                assert!(tv <= Prob::new(d as u128, 1u128 << w), "d {d} w {w}");
                if w as u32 >= 64 - free.leading_zeros() && (1u64 << w).is_multiple_of(free) {
                    assert!(tv.is_zero());
                }
            }
        }
    }
}

#[test]
fn tv_distance_basics() {
    let a: BTreeMap<u8, Prob> = [(0, Prob::one())].into();
    let c: BTreeMap<u8, Prob> = [(1, Prob::one())].into();
    assert_eq!(tv_distance(&a, &a), Prob::zero());
    assert_eq!(tv_distance(&a, &c), Prob::one());
}

#[test]
fn baseline_bounds() {
    for n in [1u64, 2, 3, 4] {
        for w in [1usize, 2, 3, 6, 10] {
            let tv = tv_random_baseline(n, w).unwrap();
            let d = domain_size(n) as u128;
            assert!(tv <= Prob::new(n as u128 * d, 1u128 << w));
        }
    }
    assert_eq!(tv_random_baseline(2, 1).unwrap(), Prob::zero());
    assert!(tv_random_baseline(64, 8).is_err());
}

fn f2s_with_random_function(w: usize, p: usize) -> RandomizedRef {
    let f2s = first2second(Poly::constant(w as u64), Poly::constant(p as u64));
    apply_randomized(
        random_first_order(Poly::constant(w as u64)),
        Arc::new(Deterministic(f2s)),
    )
    .unwrap()
}

#[test]
fn baseline_agrees_with_strategy_enumeration() {
    for n in [2u64, 3] {
        let real = f2s_with_random_function(3, 1);
        let ideal = randsof(Poly::constant(1));
        let a = transcript_distribution(&*real, n, &canonical_argument, 1 << 16).unwrap();
        let r = transcript_distribution(&*ideal, n, &canonical_argument, 1 << 16).unwrap();
        assert_eq!(
            tv_distance(&a, &r),
            tv_random_baseline(n, 3).unwrap(),
            "n {n}"
        );
    }
}

#[test]
fn zero_length_answers_are_indistinguishable() {
    let real = f2s_with_random_function(2, 0);
    let ideal = randsof(Poly::constant(0));
    let a = transcript_distribution(&*real, 2, &|_| true, 1 << 16).unwrap();
    let r = transcript_distribution(&*ideal, 2, &|_| true, 1 << 16).unwrap();
    assert!(a.keys().all(|t| t.answer.is_empty()));
    assert_eq!(tv_distance(&a, &r), tv_random_baseline(2, 2).unwrap());
}

#[test]
fn randsof_shape_at_two() {
    let dist =
        transcript_distribution(&*randsof(Poly::constant(1)), 2, &|_| false, 1 << 10).unwrap();
    assert_eq!(dist.len(), 4);
    for (t, p) in &dist {
        assert_eq!(*p, Prob::new(1, 4));
        assert_eq!(t.coordinates.len(), 2);
        assert_ne!(t.coordinates[0], t.coordinates[1]);
        assert_eq!(t.answer.len(), 1);
    }
}

fn simulate(
    prf: &dyn FirstOrderPrf,
    key: &Bits,
    n: u64,
    p: usize,
    arg: &dyn Fn(&Bits) -> bool,
) -> Transcript {
    let d = domain_size(n);
    let lg = crate::poly::ceil_lg(n) as usize;
    let mut z = Bits::zeros(0);
    let mut used = Vec::new();
    let mut coordinates = Vec::new();
    for _ in 0..n {
        let c = alpha(&prf.eval(key, &z), &used, d);
        used.push(c);
        let c = Bits::from_u64_msb(c, lg);
        z.push(arg(&c));
        coordinates.push(c);
    }
    let answer = beta(&prf.eval(key, &z), p).unwrap();
    Transcript {
        coordinates,
        answer,
    }
}

#[test]
fn candidate_matches_direct_simulation() {
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::id() + Poly::constant(2)));
    for n in [2u64, 3, 4] {
        let cand = candidate(prf.clone(), Poly::constant(2)).unwrap();
        let got = transcript_distribution(&cand, n, &canonical_argument, 1 << 10).unwrap();
        let mut want: BTreeMap<Transcript, Prob> = BTreeMap::new();
        for k in 0..1u64 << n {
            let t = simulate(
                &*prf,
                &Bits::from_u64_msb(k, n as usize),
                n,
                2,
                &canonical_argument,
            );
            *want.entry(t).or_insert_with(Prob::zero) += Prob::new(1, 1u128 << n);
        }
        assert_eq!(got, want, "n {n}");
        for t in got.keys() {
            let mut c = t.coordinates.clone();
            c.sort();
            c.dedup();
            assert_eq!(c.len(), n as usize);
        }
    }
}

#[test]
fn toy_prf_depends_on_key_and_input() {
    let prf = ToyPrf::new(Poly::constant(32));
    let k1 = b("0110");
    let k2 = b("0111");
    assert_eq!(prf.eval(&k1, &b("1")), prf.eval(&k1, &b("1")));
    assert_ne!(prf.eval(&k1, &b("1")), prf.eval(&k2, &b("1")));
    assert_ne!(prf.eval(&k1, &b("1")), prf.eval(&k1, &b("10")));
    assert_ne!(prf.eval(&k1, &Bits::zeros(0)), prf.eval(&k1, &b("0")));
    assert_eq!(prf.eval(&k1, &b("1")).len(), 32);
}

#[test]
fn adversary_names_round_trip() {
    for k in AdversaryKind::ALL {
        assert_eq!(k.name().parse::<AdversaryKind>().unwrap(), k);
    }
    assert!("nope".parse::<AdversaryKind>().is_err());
}

fn exact(limit: u64) -> AdvantageMode {
    AdvantageMode::Exact { limit }
}

#[test]
fn ignore_and_ideal_have_no_advantage() {
    let p = Poly::constant(2);
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::id() + Poly::constant(2)));
    let keyed = Candidate::keyed(prf, p.clone()).unwrap();
    let random = Candidate::random(p.clone());
    let ignore = adversary(AdversaryKind::Ignore, Poly::constant(1), p.clone());
    for cand in [&keyed, &random] {
        let adv = advantage(cand, &ignore, 2, exact(1 << 12)).unwrap();
        assert_eq!(adv.exact, Some(Prob::zero()));
        assert_eq!(adv.p_candidate, 0.0);
    }
    for kind in AdversaryKind::ALL {
        let a = adversary(kind, Poly::constant(2), p.clone());
        let adv = advantage(&random, &a, 2, exact(1 << 14)).unwrap();
        assert_eq!(adv.exact, Some(Prob::zero()), "{kind}");
    }
}

#[test]
fn copies_share_the_key() {
    let p = Poly::constant(2);
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::id() + Poly::constant(2)));
    let keyed = Candidate::keyed(prf, p.clone()).unwrap();
    let a = adversary(AdversaryKind::Consistency, Poly::constant(2), p);
    let adv = advantage(&keyed, &a, 3, exact(1 << 12)).unwrap();
    assert_eq!(adv.p_candidate, 1.0);
    assert_eq!(adv.p_random, 1.0);
    assert_eq!(adv.exact, Some(Prob::zero()));
}

#[test]
fn exact_and_sampled_advantage_agree() {
    let p = Poly::constant(1);
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::id() + Poly::constant(1)));
    let keyed = Candidate::keyed(prf, p.clone()).unwrap();
    for kind in [
        AdversaryKind::FirstBit,
        AdversaryKind::FirstQuery,
        AdversaryKind::RandomParity,
    ] {
        let a = adversary(kind, Poly::constant(1), p.clone());
        let ex = advantage(&keyed, &a, 3, exact(1 << 14)).unwrap();
        let mc = advantage(
            &keyed,
            &a,
            3,
            AdvantageMode::MonteCarlo {
                trials: 4000,
                seed: 5,
            },
        )
        .unwrap();
        assert!((ex.p_candidate - mc.p_candidate).abs() < 0.05, "{kind}");
        assert!((ex.p_random - mc.p_random).abs() < 0.05, "{kind}");
        assert!(mc.stderr.unwrap() > 0.0);
        assert_eq!(mc.trials, 4000);
    }
}

#[test]
fn adversary_game_is_checked() {
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::id()));
    let keyed = Candidate::keyed(prf, Poly::constant(1)).unwrap();
    let wrong = crate::strategies::examples::once(Poly::constant(1));
    assert!(matches!(
        advantage(&keyed, &wrong, 2, exact(16)),
        Err(PrfError::AdversaryGame(_))
    ));
}

#[test]
fn output_len_of_candidates() {
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::id()));
    let keyed = Candidate::keyed(prf, Poly::constant(3)).unwrap();
    assert_eq!(keyed.output_len().eval(5), 3);
    assert_eq!(Candidate::random(Poly::id()).output_len().eval(5), 5);
    assert_eq!(vec![keyed.single().game()], vec![logsof(Poly::constant(3))]);
}
