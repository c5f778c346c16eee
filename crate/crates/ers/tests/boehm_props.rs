mod common;

use common::*;
use ers::boehm::*;
use ers::signed_digit::{self as sd, Stream};
use ers::Dyadic;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn contains_at(x: &TBEncoding, n: i64, v: &BigRational) -> bool {
    code_contains(&x.code(n), v)
}

#[test]
fn structural_examples() {
    assert_eq!((down_left(&b(3)), down_right(&b(3))), (b(6), b(8)));
    assert_eq!(up_right(&b(5)), b(2));
    assert_eq!(up_right(&b(-3)), b(-2));
    assert!(below(&b(6), &b(3)) && below(&b(8), &b(3)));
    assert!(!below(&b(9), &b(3)));
}

#[test]
fn constructor_examples() {
    let two = tb_from_int(2);
    assert_eq!(
        (two.at(0), two.at(1), two.at(2), two.at(-1)),
        (b(2), b(4), b(8), b(1))
    );
    assert!((0..12).all(|n| tb_from_int(0).at(n) == b(0)));

    let c = tb_from_ternary_code(&TernaryCode::new(42, 1));
    assert_eq!(
        (c.enc.at(1), c.enc.at(2), c.enc.at(0)),
        (b(42), b(84), b(21))
    );
    assert!(ternary_ok(&c.enc, -8, 24));
    assert_eq!(
        TernaryCode::new(42, 1).to_dyadic_interval(),
        (Dyadic::from_int(21), Dyadic::from_int(22))
    );
    assert_eq!(
        TernaryCode::new(-1, 0).to_dyadic_interval(),
        (Dyadic::from_int(-1), Dyadic::from_int(1))
    );

    let half = tb_from_dyadic(&Dyadic::from_parts(1, 1));
    assert!(half.at(1) == b(0) || half.at(1) == b(1));
    assert!(contains_at(&half, 1, &q(1, 2)));
    assert!(contains_at(
        &tb_from_dyadic(&Dyadic::from_parts(-3, 2)),
        5,
        &q(-3, 4)
    ));
}

#[test]
fn approximator_examples() {
    assert_eq!(
        NegApprox.apply(&[DyadicCode::new(3, 5, 2)]),
        DyadicCode::new(-5, -3, 2)
    );
    assert_eq!(
        AddApprox.apply(&[DyadicCode::new(1, 3, 2), DyadicCode::new(2, 4, 2)]),
        DyadicCode::new(3, 7, 2)
    );
    let m = MulApprox.apply(&[DyadicCode::new(2, 4, 1), DyadicCode::new(2, 4, 1)]);
    assert_eq!(
        (m.lower(), m.upper()),
        (Dyadic::from_int(1), Dyadic::from_int(4))
    );
}

#[test]
fn join_prime_examples() {
    assert_eq!(
        join_prime(&DyadicCode::new(3, 5, 4)),
        TernaryCode::new(3, 4)
    );
    assert_eq!(
        join_prime(&DyadicCode::new(1, 6, 3)),
        TernaryCode::new(0, 1)
    );
    assert_eq!(
        join_prime(&DyadicCode::new(7, 7, 3)),
        TernaryCode::new(14, 4)
    );
}

#[test]
fn completion_examples() {
    let neg = approximator_neg().apply(&[tb_from_int(2)]).unwrap();
    assert!((0..=10).all(|n| contains_at(&neg, n, &q(-2, 1))));
    let sum = approximator_add()
        .apply(&[tb_from_int(1), tb_from_int(2)])
        .unwrap();
    assert!(contains_at(&sum, 10, &q(3, 1)));
    let h = tb_from_dyadic(&Dyadic::from_parts(1, 1));
    let sq = approximator_mul().apply(&[h.clone(), h]).unwrap();
    assert!(contains_at(&sq, 12, &q(1, 4)));
}

#[test]
fn comparison_examples() {
    let x = tb_from_dyadic(&Dyadic::from_parts(5, 3));
    assert!(tb_closeness(&x, &x, 7) && tb_approx_leq(&x, &x, 7));
    assert!(tb_closeness(&tb_from_int(0), &tb_from_int(1), 0));
    assert!(!tb_closeness(&tb_from_int(0), &tb_from_int(1), 3));
    assert!(tb_approx_leq(&tb_from_int(1), &tb_from_int(2), 4));
}

#[test]
fn sd_bridge_examples() {
    let z = sd_to_tb(&sd::repeat(digit(0)));
    let mut k = b(-1);
    for n in 1..20 {
        k = down_mid(&k);
        assert_eq!(z.enc.at(n), k);
    }
}

#[test]
fn net_examples() {
    let a = TernaryCode::new(-1, 0);
    let codes = |d| net(&a, d).unwrap().iter().collect::<Vec<_>>();
    assert_eq!(codes(0), [TernaryCode::new(-1, 0)]);
    assert_eq!(codes(1), [TernaryCode::new(-2, 1), TernaryCode::new(0, 1)]);
    assert_eq!(codes(2), [-4, -2, 0, 2].map(|k| TernaryCode::new(k, 2)));
    assert!(net(&TernaryCode::new(3, 4), 3).is_err());
}

fn dyadic_strategy() -> impl Strategy<Value = Dyadic> {
    (-1024i64..=1024, 0i64..=8).prop_map(|(n, e)| Dyadic::from_parts(n, e))
}

fn code_strategy() -> impl Strategy<Value = TernaryCode> {
    (-4096i64..4096, -4i64..12).prop_map(|(k, p)| TernaryCode::new(k, p))
}

fn exact(name: &str, a: &BigRational, b: &BigRational) -> BigRational {
    match name {
        "neg" => -a,
        "add" => a + b,
        "mid" => (a + b) / q(2, 1),
        "mul" => a * b,
        "pow3" => a * a * a,
        _ => {
            if a < &q(0, 1) {
                -a
            } else {
                a.clone()
            }
        }
    }
}

fn function(name: &str) -> CFunction {
    match name {
        "neg" => approximator_neg(),
        "add" => approximator_add(),
        "mid" => approximator_mid(),
        "mul" => approximator_mul(),
        "pow3" => approximator_pow(3),
        _ => approximator_abs(),
    }
}

const NAMES: [&str; 6] = ["neg", "add", "mid", "mul", "pow3", "abs"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn structural_algebra(k in -1_000_000i64..=1_000_000) {
        let k = b(k);
        prop_assert_eq!(up_right(&down_left(&k)), k.clone());
        prop_assert_eq!(up_right(&down_right(&k)), &k + 1);
        prop_assert_eq!(up_left(&down_right(&k)), k.clone());
        for c in [down_left(&k), down_mid(&k), down_right(&k)] {
            prop_assert!(below(&c, &k));
        }
    }

    #[test]
    fn lifting_covers(c in code_strategy(), up in 0i64..12) {
        let l = c.lift_to(c.p - up);
        prop_assert!(l.covers(&c.lower(), &c.upper()));
    }

    #[test]
    fn oracle_soundness(x in dyadic_strategy(), y in dyadic_strategy(), which in 0usize..NAMES.len()) {
        let name = NAMES[which];
        let f = function(name);
        let args = [tb_from_dyadic(&x), tb_from_dyadic(&y)];
        let out = f.apply(&args[..f.arity()]).unwrap();
        let v = exact(name, &ratio(&x), &ratio(&y));
        for n in -4..=24 {
            prop_assert!(contains_at(&out, n, &v), "{name} at level {n}");
        }
        prop_assert!(ternary_ok(&out, -8, 24));
    }

    #[test]
    fn approximators_refine(a in code_strategy(), b in code_strategy(), steps in prop::collection::vec(0i64..=2, 2), which in 0usize..NAMES.len()) {
        let f = function(NAMES[which]);
        let child = |c: &TernaryCode, s: i64| TernaryCode::new((&c.k << 1u32) + s, c.p + 1);
        let (a2, b2) = (child(&a, steps[0]), child(&b, steps[1]));
        let outer = f.bound(&[a, b][..f.arity()]);
        let inner = f.bound(&[a2, b2][..f.arity()]);
        prop_assert!(outer.contains_code(&inner));
    }

    #[test]
    fn approx_leq_is_linear(x in dyadic_strategy(), y in dyadic_strategy(), e in -4i64..24) {
        let (x, y) = (tb_from_dyadic(&x), tb_from_dyadic(&y));
        prop_assert!(tb_approx_leq(&x, &y, e) || tb_approx_leq(&y, &x, e));
        prop_assert_eq!(tb_closeness(&x, &y, e), tb_closeness(&y, &x, e));
    }

    #[test]
    fn net_is_an_exact_ascending_cover(a in code_strategy(), d in 0i64..8) {
        let codes: Vec<_> = net(&a, a.p + d).unwrap().iter().collect();
        prop_assert_eq!(codes.len(), 1usize << d);
        prop_assert_eq!(codes[0].lower(), a.lower());
        prop_assert_eq!(codes.last().unwrap().upper(), a.upper());
        for w in codes.windows(2) {
            prop_assert_eq!(w[0].upper(), w[1].lower());
        }
    }

    #[test]
    fn sd_round_trip(p in prop::collection::vec(-1i8..=1, 0..30), t in -1i8..=1) {
        let a = Stream::with_tail(p.iter().map(|&d| digit(d)).collect(), digit(t));
        let x = sd_to_tb(&a);
        prop_assert!(ternary_ok(&x.enc, 0, 40));
        for n in 0..30 {
            prop_assert_eq!(x.enc.at(n as i64), sd::integer_approx(&a, n));
        }
        prop_assert_eq!(tb_to_sd(&x).unwrap().prefix(40), a.prefix(40));
    }
}
