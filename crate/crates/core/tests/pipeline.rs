use std::sync::Arc;

use pargames_core::attacks::{
    check_collision, collision_finder, mac_fixture, CollisionParams, GameFunctional,
};
use pargames_core::influence::{
    algorithm_a, AlgorithmParams, DecisionTree, InfluenceSchedule, TreeFunction,
};
use pargames_core::prf::{
    advantage, adversary, AdvantageMode, AdversaryKind, Candidate, FirstOrderPrf, ToyPrf,
};
use pargames_core::strategies::prob_to_f64;
use pargames_core::{Bits, Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn algorithm_a_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut wins = 0;
    for k in 0..20 {
        let trees: Vec<DecisionTree> = (0..2)
            .map(|_| DecisionTree::random(&mut rng, 16, 3))
            .collect();
        let params = AlgorithmParams {
            input_len: 16,
            output_len: 2,
            depth: 3,
            eps: 0.1,
            delta: 0.1,
            schedule: InfluenceSchedule::Adaptive,
        };
        let mut f = TreeFunction::new(16, trees.clone());
        let out = algorithm_a(&mut f, params, k).unwrap();
        assert!(out.assignment.dom_size() as u64 <= params.iteration_cap());
        let var = trees
            .iter()
            .map(|t| prob_to_f64(&t.variance(&out.assignment)))
            .fold(0.0, f64::max);
        wins += (var <= 0.1) as u32;
    }
    assert!(wins >= 17, "{wins}");
}

#[test]
fn played_and_called_fixtures_find_the_same_collision() {
    let params = CollisionParams {
        big_n: 16,
        delta: 0.2,
        eps: None,
        schedule: InfluenceSchedule::Adaptive,
    };
    let f = mac_fixture(
        Bits::parse("01101100").unwrap(),
        &Poly::constant(2),
        &Poly::constant(2),
    );
    let mut played = GameFunctional::new(f.strategy(), 8).unwrap();
    let mut called = f.oracle();
    let a = collision_finder(&mut played, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = collision_finder(&mut called, &params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(a, b);
    let ra = check_collision(&mut played, &a, 2000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let rb = check_collision(&mut called, &b, 2000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn exact_advantages_are_probabilities() {
    let prf: Arc<dyn FirstOrderPrf> = Arc::new(ToyPrf::new(Poly::lg() + Poly::constant(2)));
    let cand = Candidate::keyed(prf, Poly::constant(2)).unwrap();
    for kind in AdversaryKind::ALL {
        let a = adversary(kind, Poly::constant(2), Poly::constant(2));
        let r = advantage(&cand, &a, 2, AdvantageMode::Exact { limit: 1 << 16 }).unwrap();
        assert!((0.0..=1.0).contains(&r.p_candidate) && (0.0..=1.0).contains(&r.p_random));
        assert!((r.advantage - (r.p_candidate - r.p_random).abs()).abs() < 1e-12);
    }
}
