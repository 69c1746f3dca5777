mod common;

use common::*;
use ordcheck::terms::{parse_term, to_meet_of_joins, LatticeTerm};
use ordcheck::words::ReducedWord;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_term<R: Rng>(rng: &mut R, vars: u16, depth: usize) -> LatticeTerm {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => LatticeTerm::Identity,
            _ => LatticeTerm::var(rng.gen_range(0..vars)),
        };
    }
    let a = random_term(rng, vars, depth - 1);
    match rng.gen_range(0..4) {
        0 => LatticeTerm::inverse(a),
        1 => LatticeTerm::product(a, random_term(rng, vars, depth - 1)),
        2 => LatticeTerm::meet(a, random_term(rng, vars, depth - 1)),
        _ => LatticeTerm::join(a, random_term(rng, vars, depth - 1)),
    }
}

type Z2 = [i64; 2];

/// Value of a term in the lattice-ordered group ℤ² with coordinatewise order.
fn eval(t: &LatticeTerm, env: &[Z2]) -> Z2 {
    let zip = |a: Z2, b: Z2, f: fn(i64, i64) -> i64| [f(a[0], b[0]), f(a[1], b[1])];
    match t {
        LatticeTerm::Identity => [0, 0],
        LatticeTerm::Var(i) => env[*i as usize],
        LatticeTerm::Inverse(a) => {
            let v = eval(a, env);
            [-v[0], -v[1]]
        }
        LatticeTerm::Product(a, b) => zip(eval(a, env), eval(b, env), |x, y| x + y),
        LatticeTerm::Meet(a, b) => zip(eval(a, env), eval(b, env), i64::min),
        LatticeTerm::Join(a, b) => zip(eval(a, env), eval(b, env), i64::max),
    }
}

fn eval_word(w: &ReducedWord, env: &[Z2]) -> Z2 {
    w.letters().iter().fold([0, 0], |acc, l| {
        let v = env[l.gen() as usize];
        let s = if l.is_inverse() { -1 } else { 1 };
        [acc[0] + s * v[0], acc[1] + s * v[1]]
    })
}

#[test]
fn display_reparses_to_the_same_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let t = random_term(&mut rng, 3, 5);
        let text = t.to_string();
        assert_eq!(parse_term(&text, None).unwrap(), t, "{text}");
    }
}

#[test]
fn normal_form_has_the_same_value_in_z2() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let t = random_term(&mut rng, 3, 4);
        let nf = to_meet_of_joins(&t);
        for _ in 0..20 {
            let env: Vec<Z2> = (0..3).map(|_| [rng.gen_range(-9..=9), rng.gen_range(-9..=9)]).collect();
            let mut value = [i64::MAX, i64::MAX];
            for j in nf.joins() {
                let mut m = [i64::MIN, i64::MIN];
                for w in j.words() {
                    let v = eval_word(w, &env);
                    m = [m[0].max(v[0]), m[1].max(v[1])];
                }
                value = [value[0].min(m[0]), value[1].min(m[1])];
            }
            assert_eq!(value, eval(&t, &env), "{t} vs {nf}");
        }
    }
}

#[test]
fn precedence_examples() {
    let p = |s: &str| parse_term(s, None).unwrap();
    assert_eq!(p("x*y^-1"), LatticeTerm::product(LatticeTerm::var(0), LatticeTerm::inverse(LatticeTerm::var(1))));
    assert_eq!(p("(x*y)^-1"), LatticeTerm::inverse(LatticeTerm::product(LatticeTerm::var(0), LatticeTerm::var(1))));
    assert!(parse_term("x**y", None).is_err());
    assert!(parse_term("(x", None).is_err());
}

proptest! {
    #[test]
    fn words_round_trip_through_terms(a in word_strategy(3, 8)) {
        let t = LatticeTerm::from_word(&a);
        let nf = to_meet_of_joins(&t);
        prop_assert_eq!(nf.joins().len(), 1);
        prop_assert_eq!(nf.joins()[0].words().iter().cloned().collect::<Vec<_>>(), vec![a]);
    }
}
