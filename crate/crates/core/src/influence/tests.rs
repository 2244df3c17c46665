use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::strategies::{prob_to_f64, Prob};

fn and_tree(len: usize) -> DecisionTree {
    fn build(i: usize, len: usize) -> DecisionTree {
        if i == len {
            DecisionTree::leaf(true)
        } else {
            DecisionTree::query(i, DecisionTree::leaf(false), build(i + 1, len))
        }
    }
    build(0, len)
}

fn dictator(j: usize) -> DecisionTree {
    DecisionTree::query(j, DecisionTree::leaf(false), DecisionTree::leaf(true))
}

#[test]
fn constant_has_no_variance() {
    let g = PartialAssignment::empty(4);
    assert_eq!(variance_exact(&g, |_| true).unwrap(), Prob::new(0, 1));
    assert_eq!(DecisionTree::leaf(false).variance(&g), Prob::new(0, 1));
}

#[test]
fn parity_variance_and_influence() {
    let g = PartialAssignment::empty(5);
    let parity = |x: &Bits| x.count_ones() % 2 == 1;
    assert_eq!(variance_exact(&g, parity).unwrap(), Prob::new(1, 2));
    for j in 0..5 {
        assert_eq!(influence_exact(&g, j, parity).unwrap(), Prob::new(1, 1));
    }
    let t = DecisionTree::parity(5);
    assert_eq!(t.variance(&g), Prob::new(1, 2));
    assert_eq!(t.influence(&g, 3), Prob::new(1, 1));
}

#[test]
fn dictator_fixed_has_no_variance() {
    let g = PartialAssignment::empty(3).with(0, true);
    let d = dictator(0);
    assert_eq!(variance_exact(&g, |x| d.eval(x)).unwrap(), Prob::new(0, 1));
    assert_eq!(d.variance(&g), Prob::new(0, 1));
    let free = PartialAssignment::empty(3);
    assert_eq!(d.influence(&free, 0), Prob::new(1, 1));
    assert_eq!(d.influence(&free, 1), Prob::new(0, 1));
}

#[test]
fn parity_tree_query_counts() {
    let t = DecisionTree::parity(3);
    let g = PartialAssignment::empty(3);
    assert_eq!(t.avg_queries(&g, &[]), Prob::new(3, 1));
    assert_eq!(t.avg_queries(&g, &[0, 1, 2]), Prob::new(0, 1));
    assert_eq!(t.avg_queries(&g, &[1]), Prob::new(2, 1));
    assert_eq!(avg_query_complexity(&t, &g, &[1]).unwrap(), Prob::new(2, 1));
}

#[test]
fn tree_walk_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let n = rng.gen_range(1..=10);
        let t = DecisionTree::random(&mut rng, n, 5);
        let mut g = PartialAssignment::empty(n);
        for j in 0..n {
            if rng.gen_ratio(1, 3) {
                g.fix(j, rng.gen());
            }
        }
        let f = |x: &Bits| t.eval(x);
        assert_eq!(t.variance(&g), variance_exact(&g, f).unwrap());
        for j in g.free() {
            assert_eq!(t.influence(&g, j), influence_exact(&g, j, f).unwrap());
        }
        let inside: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
        assert_eq!(
            t.avg_queries(&g, &inside),
            avg_query_complexity(&t, &g, &inside).unwrap()
        );
    }
}

#[test]
fn variance_is_mixture_of_restrictions() {
    // Var = 2p(1-p) with p the average of the two halves' p.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let t = DecisionTree::random(&mut rng, 6, 4);
        let g = PartialAssignment::empty(6);
        let p0 = t.prob_one(&g.with(2, false));
        let p1 = t.prob_one(&g.with(2, true));
        let p = (p0 + p1) / Prob::from_integer(2);
        let one = Prob::from_integer(1);
        assert_eq!(t.variance(&g), Prob::from_integer(2) * p * (one - p));
    }
}

#[test]
fn estimators_concentrate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = and_tree(2);
    let g = PartialAssignment::empty(4);
    let v = estimate_var(&g, |x| t.eval(x), 0.02, 1e-6, &mut rng);
    assert!((v - 0.375).abs() < 0.02);
    let i = estimate_inf(&g, 1, |x| t.eval(x), 0.02, 1e-6, &mut rng);
    assert!((i - 0.5).abs() < 0.02);
    assert_eq!(hoeffding_samples(0.1, 0.05), 185);
}

#[test]
fn text_round_trip() {
    let t = and_tree(3);
    let s = t.to_string();
    let back: DecisionTree = s.parse().unwrap();
    assert_eq!(back, t);
    assert!("node 0 (leaf 1)".parse::<DecisionTree>().is_err());
}

#[test]
fn assignment_encoding() {
    let g = PartialAssignment::empty(4).with(1, true).with(3, false);
    assert_eq!(g.to_string(), "_1_0");
    assert_eq!(PartialAssignment::from_word(&g.to_word()), g);
    assert_eq!(g.points().unwrap().count(), 4);
    assert!(g.points().unwrap().all(|x| g.consistent(&x)));
    assert_eq!(g.mass(&Bits::parse("0100").unwrap()), Prob::new(1, 4));
    assert_eq!(g.mass(&Bits::parse("0101").unwrap()), Prob::new(0, 1));
}

fn params(n: usize, l: usize, q: usize, schedule: InfluenceSchedule) -> AlgorithmParams {
    AlgorithmParams {
        input_len: n,
        output_len: l,
        depth: q,
        eps: 0.1,
        delta: 0.1,
        schedule,
    }
}

#[test]
fn algorithm_fixes_the_dictator() {
    for schedule in [InfluenceSchedule::Hoeffding, InfluenceSchedule::Adaptive] {
        let mut f = TreeFunction::new(8, vec![dictator(5)]);
        let out = algorithm_a(&mut f, params(8, 1, 1, schedule), 1).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.assignment.is_fixed(5));
        assert_eq!(out.assignment.dom_size(), 1);
        assert_eq!(out.queries, f.query_count());
    }
}

#[test]
fn algorithm_leaves_constants_alone() {
    let mut f = TreeFunction::new(8, vec![DecisionTree::leaf(true)]);
    let out = algorithm_a(&mut f, params(8, 1, 1, InfluenceSchedule::Hoeffding), 2).unwrap();
    assert_eq!(out.iterations, 0);
    assert_eq!(out.assignment.dom_size(), 0);
    assert_eq!(out.variance_estimates, vec![0.0]);
}

#[test]
fn algorithm_reduces_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let trees = vec![
        DecisionTree::parity(3),
        and_tree(2),
        DecisionTree::random(&mut rng, 8, 3),
    ];
    for seed in 0..3 {
        let mut f = TreeFunction::new(8, trees.clone());
        let out = algorithm_a(&mut f, params(8, 3, 3, InfluenceSchedule::Adaptive), seed).unwrap();
        for t in &trees {
            assert!(prob_to_f64(&t.variance(&out.assignment)) <= 0.1);
        }
        assert!(out.iterations <= params(8, 3, 3, InfluenceSchedule::Adaptive).iteration_cap());
    }
}

#[test]
fn machine_can_be_driven_by_hand() {
    let p = params(4, 1, 1, InfluenceSchedule::Adaptive);
    let t = dictator(2);
    let mut a = AlgorithmA::seeded(p, 3);
    let mut status = a.resume(None);
    let mut asked = 0;
    while status == Status::Query {
        let x = a.pending_query().unwrap().clone();
        asked += 1;
        status = a.resume(Some(&Bits::from_bools(&[t.eval(&x)])));
    }
    let out = a.into_result().unwrap().unwrap();
    assert_eq!(out.queries, asked);
    assert!(out.assignment.is_fixed(2));
}
