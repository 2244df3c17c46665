use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::examples::*;
use super::*;
use crate::bits::Bits;
use crate::games::{bool_game, str_game, unit_game, Word};

fn q() -> Move {
    Move::question()
}

fn w(s: &str) -> Move {
    Move::answer(Word::parse(s).unwrap())
}

#[test]
fn constant_strategy_plays() {
    let plays = carac_plays(&*constant_bool(true), 1, 100).unwrap();
    let expected: BTreeSet<Play> = [vec![], vec![q()], vec![q(), w("1")]].into_iter().collect();
    assert_eq!(plays, expected);
}

#[test]
fn once_plays_have_figure_shape() {
    let f = once(Poly::id());
    let plays = carac_plays(&**f.inner(), 2, 1000).unwrap();
    for b in ["0", "1"] {
        let full = vec![
            q().right(),
            q().left(),
            w(b).left(),
            w(&b.repeat(2)).right(),
        ];
        assert!(plays.contains(&full));
    }
}

#[test]
fn mult_plays_echo_coins() {
    let f = mult(Poly::id());
    let plays = carac_plays(&**f.inner(), 1, 1000).unwrap();
    for b in ["0", "1"] {
        assert!(plays.contains(&vec![q().right(), q().left(), w(b).left(), w(b).right()]));
    }
}

#[test]
fn copycat_echoes() {
    let cc = copycat(bool_game());
    let plays = carac_plays(&*cc, 1, 100).unwrap();
    assert!(plays.contains(&vec![
        q().right(),
        q().left(),
        w("1").left(),
        w("1").right()
    ]));
    let cu = copycat(unit_game());
    let plays = carac_plays(&*cu, 1, 100).unwrap();
    assert!(plays.contains(&vec![
        q().right(),
        q().left(),
        Move::star().left(),
        Move::star().right()
    ]));
    let cs = copycat(str_game(Poly::id()));
    let r = run_with_budget(&*cs, 2, &[q().right(), q().left(), w("10").left()]).unwrap();
    assert_eq!(r, w("10").right());
}

#[test]
fn identity_law_on_once() {
    let f = once(Poly::id()).inner().clone();
    let left = compose(copycat(crate::games::oracle_game(Poly::id())), f.clone()).unwrap();
    let right = compose(f.clone(), copycat(str_game(Poly::id()))).unwrap();
    for n in 1..=3 {
        let base = carac_plays(&*f, n, 10_000).unwrap();
        assert_eq!(carac_plays(&*left, n, 10_000).unwrap(), base);
        assert_eq!(carac_plays(&*right, n, 10_000).unwrap(), base);
    }
}

#[test]
fn mult_then_negate() {
    let g = compose(mult_strategy(Poly::id()), negate(Poly::id())).unwrap();
    let play = play_against(&*g, 2, &[q().right(), w("1").left(), w("0").left()]).unwrap();
    assert_eq!(play.last().unwrap(), &w("01").right());
}

#[test]
fn composition_rejects_mismatched_games() {
    assert!(matches!(
        compose(negate(Poly::id()), copycat(bool_game())),
        Err(StrategyError::Mismatch(..))
    ));
}

#[test]
fn budgets() {
    let f = once(Poly::id());
    let play = [q().right(), q().left(), w("1").left()];
    let r = run_with_budget(&**f.inner(), 8, &play).unwrap();
    assert_eq!(r, Move::bits(&Bits::ones(8)).right());
    let m = mult(Poly::id());
    let mut opp = vec![q().right()];
    opp.extend((0..8).map(|_| w("0").left()));
    assert!(play_against(&**m.inner(), 8, &opp).is_ok());
    assert!(matches!(
        run_with_budget(&*looper(), 16, &[q()]),
        Err(StrategyError::BudgetExceeded { n: 16, .. })
    ));
    assert!(run_with_budget(&*looper(), 2, &[q()]).is_ok());
}

#[test]
fn off_play_is_reported() {
    let f = once(Poly::id());
    let play = [q().right(), q().right(), w("1").left()];
    assert!(matches!(
        run_with_budget(&**f.inner(), 2, &play),
        Err(StrategyError::OffPlay(1))
    ));
}

#[test]
fn observation_probabilities() {
    let half = Prob::new(1, 2);
    let d = observe_distribution(&once(Poly::id()), 4, 1 << 10).unwrap();
    assert_eq!(d[&Move::bits(&Bits::zeros(4))], half);
    assert_eq!(d[&Move::bits(&Bits::ones(4))], half);

    let d = observe_distribution(&mult(Poly::id()), 3, 1 << 10).unwrap();
    assert_eq!(d[&w("101")], Prob::new(1, 8));
    assert_eq!(d.len(), 8);

    let p = observe_prob(&ignoring(true), 5, &w("1"), ObserveMode::Exact).unwrap();
    assert_eq!(p, 1.0);
    let mc = observe_prob(
        &fair_coin(),
        1,
        &w("1"),
        ObserveMode::MonteCarlo {
            trials: 4000,
            seed: 3,
        },
    )
    .unwrap();
    assert!((mc - 0.5).abs() < 0.05);
}

fn two_copies(f: &ProbStrategy, n: u64) -> Vec<(Prob, (Move, Move))> {
    let banged = bang_strategy(Poly::id(), f);
    enumerate_choices(1 << 12, |rand| {
        let mut s = banged.start(n);
        let mut meter = StepMeter::unlimited(n);
        let a = s.respond(&q().copy(1), rand, &mut meter)?;
        let b = s.respond(&q().copy(2), rand, &mut meter)?;
        Ok((a, b))
    })
    .unwrap()
}

#[test]
fn banged_copies_share_randomness() {
    let runs = two_copies(&once(Poly::id()), 2);
    assert_eq!(runs.len(), 2);
    let mut equal = Prob::new(0, 1);
    for (p, (a, b)) in &runs {
        assert_eq!(unwrap_head(a), unwrap_head(b));
        equal += *p;
    }
    assert_eq!(equal, Prob::new(1, 1));

    let runs = two_copies(&mult(Poly::id()), 3);
    assert_eq!(runs.len(), 8);
    assert!(runs
        .iter()
        .all(|(_, (a, b))| unwrap_head(a) == unwrap_head(b)));
}

#[test]
fn independent_copies_differ_half_the_time() {
    // Two separate sessions of `once` with fresh coins agree with
    // probability 1/2, unlike the banged version.
    let f = once(Poly::id());
    let runs = enumerate_choices(1 << 8, |rand| {
        let a = observe(&f, 2, rand)?;
        let b = observe(&f, 2, rand)?;
        Ok(a == b)
    })
    .unwrap();
    let agree: Prob = runs.iter().filter(|(_, e)| *e).map(|(p, _)| *p).sum();
    assert_eq!(agree, Prob::new(1, 2));
}

#[test]
fn banged_play_is_legal() {
    let banged = bang_strategy(Poly::id(), &once(Poly::id()));
    let plays = carac_plays(&**banged.inner(), 2, 100_000).unwrap();
    let game = banged.inner().game();
    assert!(plays.iter().all(|p| game.legal(2, p)));
    assert!(plays.len() > 10);
}

#[test]
fn deterministic_bang_replicates() {
    let f = bang_det(Poly::id(), negate(Poly::id()));
    let play = play_against(
        &*f,
        2,
        &[
            q().right().copy(1),
            w("10").left().copy(1),
            q().right().copy(2),
            w("11").left().copy(2),
        ],
    )
    .unwrap();
    assert_eq!(play[1], q().left().copy(1));
    assert_eq!(play[3], w("01").right().copy(1));
    assert_eq!(play[7], w("00").right().copy(2));
}

#[test]
fn apply_feeds_argument() {
    let arg = constant_bool(true);
    let fun: RandomizedRef = Arc::new(Deterministic(copycat(bool_game())));
    let applied = apply(arg, fun).unwrap();
    let mut rand = RngSource::seeded(1);
    assert_eq!(observe(&*applied, 1, &mut rand).unwrap(), w("1"));
}

#[test]
fn table_strategies_are_total() {
    let games = [bool_game(), str_game(Poly::constant(2)), unit_game()];
    for (k, a) in games.iter().enumerate() {
        for b in &games {
            let t = table(a.clone(), b.clone(), k as u64 * 31 + 5);
            for n in 1..=3 {
                carac_plays(&*t, n, 10_000).unwrap();
            }
        }
    }
}
