//! Seeded checks behind acceptance criteria 6 to 10.
//!
//! Each returns `Ok(summary)` or `Err(first failure)`.

use ers::boehm::{
    approximator_abs, approximator_add, approximator_mid, approximator_mul, approximator_neg,
    approximator_pow, below, complete, down_left, down_mid, down_right, net, sd_to_tb,
    tb_from_dyadic, tb_from_int, tb_from_ternary_code, tb_to_sd, third, up_left, up_right,
    CFunction, TBEncoding, TernaryCode,
};
use ers::expr::{compile_boehm, compile_sd, parse_expr, CmpOp, Comparison, Expr};
use ers::search::{
    boehm_comparison, search_branching, search_sd_decreasing, search_sd_exhaustive,
    search_tb_exhaustive, UCPredicate,
};
use ers::signed_digit::{self as sd, modulus, Digit5, Digit9, SDStream, Stream};
use ers::Dyadic;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::*;

type Check = Result<String, String>;

fn interval_contains(s: &SDStream, n: usize, v: &BigRational) -> bool {
    let (lo, hi) = sd::to_rational_interval(s, n);
    &ratio(&lo) <= v && v <= &ratio(&hi)
}

/// Oracle containment of neg, mid, mul and bigMid on random dyadic inputs.
pub fn sd_oracle(trials: usize) -> Check {
    let mut r = rng(6);
    let half = BigRational::new(1.into(), 2.into());
    for t in 0..trials {
        let (da, db) = (rand_unit_dyadic(&mut r, 12), rand_unit_dyadic(&mut r, 12));
        let (a, b) = (sd::from_dyadic(&da).unwrap(), sd::from_dyadic(&db).unwrap());
        let (qa, qb) = (ratio(&da), ratio(&db));
        let zs: Vec<Dyadic> = (0..6).map(|_| rand_unit_dyadic(&mut r, 8)).collect();
        let mut exact_big = BigRational::from_integer(0.into());
        let mut w = half.clone();
        for z in &zs {
            exact_big += &w * ratio(z);
            w = &w * &half;
        }
        let zeta = Stream::with_tail(
            zs.iter().map(|z| sd::from_dyadic(z).unwrap()).collect(),
            sd::repeat(digit(0)),
        );
        let cases = [
            ("neg", sd::neg(&a), -qa.clone()),
            ("mid", sd::mid(&a, &b), (&qa + &qb) * &half),
            ("mul", sd::mul(&a, &b), &qa * &qb),
            ("bigMid", sd::big_mid(&zeta), exact_big),
        ];
        for (name, out, exact) in &cases {
            for n in 0..=16 {
                if !interval_contains(out, n, exact) {
                    return Err(format!(
                        "trial {t}: {name}({da}, {db}) depth {n} misses {exact}"
                    ));
                }
            }
        }
    }
    Ok(format!("{trials} inputs x 4 ops, depths 0..=16"))
}

fn agreeing_pair(r: &mut impl Rng, m: usize) -> (SDStream, SDStream) {
    let shared = rand_digits(r, m);
    let mut a = shared.clone();
    let mut b = shared;
    a.extend(rand_digits(r, 12));
    b.extend(rand_digits(r, 12));
    (
        Stream::with_tail(a, rand_digit(r)),
        Stream::with_tail(b, rand_digit(r)),
    )
}

fn q5(r: &mut impl Rng, v: &[i8], extra: usize) -> Stream<Digit5> {
    let mut ds: Vec<Digit5> = v.iter().map(|&x| Digit5::new(x).unwrap()).collect();
    ds.extend((0..extra).map(|_| Digit5::new(r.gen_range(-2..=2)).unwrap()));
    Stream::with_tail(ds, Digit5::new(0).unwrap())
}

fn q9(r: &mut impl Rng, v: &[i8], extra: usize) -> Stream<Digit9> {
    let mut ds: Vec<Digit9> = v.iter().map(|&x| Digit9::new(x).unwrap()).collect();
    ds.extend((0..extra).map(|_| Digit9::new(r.gen_range(-4..=4)).unwrap()));
    Stream::with_tail(ds, Digit9::new(0).unwrap())
}

fn boehm_pair_through(
    r: &mut impl Rng,
    anchor: &TernaryCode,
    delta: i64,
) -> (TBEncoding, TBEncoding) {
    let shared = rand_path(r, anchor, (delta - anchor.p).max(0) as usize);
    (
        rand_tb_through(r, anchor, &shared, 10),
        rand_tb_through(r, anchor, &shared, 10),
    )
}

/// Modulus soundness of every operation with a declared modulus.
pub fn moduli(trials: usize) -> Check {
    let mut r = rng(7);
    let mut checked = 0usize;
    for t in 0..trials {
        let eps = t % 13;
        let bad = |name: &str| Err(format!("trial {t}: {name} at eps {eps}"));
        let (a1, a2) = agreeing_pair(&mut r, modulus::neg(eps));
        if !sd::prefix_eq(&sd::neg(&a1), &sd::neg(&a2), eps) {
            return bad("neg");
        }
        let (dm, dn) = modulus::mid(eps);
        let ((a1, a2), (b1, b2)) = (agreeing_pair(&mut r, dm), agreeing_pair(&mut r, dn));
        if !sd::prefix_eq(&sd::mid(&a1, &b1), &sd::mid(&a2, &b2), eps) {
            return bad("mid");
        }
        let (dm, dn) = modulus::mul(eps);
        let ((a1, a2), (b1, b2)) = (agreeing_pair(&mut r, dm), agreeing_pair(&mut r, dn));
        if !sd::prefix_eq(&sd::mul(&a1, &b1), &sd::mul(&a2, &b2), eps) {
            return bad("mul");
        }
        let (d, delta) = modulus::big_mid(eps);
        let (mut z1, mut z2) = (Vec::new(), Vec::new());
        for _ in 0..d {
            let (x, y) = agreeing_pair(&mut r, delta);
            z1.push(x);
            z2.push(y);
        }
        z1.push(rand_stream(&mut r, 8));
        z2.push(rand_stream(&mut r, 8));
        let (t1, t2) = (rand_stream(&mut r, 4), rand_stream(&mut r, 4));
        if !sd::prefix_eq(
            &sd::big_mid(&Stream::with_tail(z1, t1)),
            &sd::big_mid(&Stream::with_tail(z2, t2)),
            eps,
        ) {
            return bad("bigMid");
        }
        let m = modulus::div2(eps);
        let shared: Vec<i8> = (0..m).map(|_| r.gen_range(-2..=2)).collect();
        if !sd::prefix_eq(
            &sd::div2(&q5(&mut r, &shared, 6)),
            &sd::div2(&q5(&mut r, &shared, 6)),
            eps,
        ) {
            return bad("div2");
        }
        let m = modulus::div4(eps);
        let shared: Vec<i8> = (0..m).map(|_| r.gen_range(-4..=4)).collect();
        if !sd::prefix_eq(
            &sd::div4(&q9(&mut r, &shared, 6)),
            &sd::div4(&q9(&mut r, &shared, 6)),
            eps,
        ) {
            return bad("div4");
        }
        let poly = compile_sd(&parse_expr("mid(x*x, neg(x))").unwrap(), &["x"]).unwrap();
        let (a1, a2) = agreeing_pair(&mut r, poly.modulus(eps));
        if !sd::prefix_eq(&poly.apply(&[a1]), &poly.apply(&[a2]), eps) {
            return bad("compiled mid(x*x, neg(x))");
        }
        for (name, f) in boehm_functions() {
            let eps = eps as i64;
            let anchors = vec![TernaryCode::new(-1, 0); f.arity()];
            let deltas = f.modulus(eps, &anchors);
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for &dl in &deltas {
                let (x, y) = boehm_pair_through(&mut r, &anchors[0], dl);
                xs.push(x);
                ys.push(y);
            }
            let (fx, fy) = (f.apply(&xs).unwrap(), f.apply(&ys).unwrap());
            if (fx.at(eps) - fy.at(eps)).magnitude() > &1u32.into() {
                return bad(&format!("boehm {name}"));
            }
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} trials over 7 stream ops and {} Boehm functions, eps 0..=12",
        boehm_functions().len()
    ))
}

pub fn boehm_functions() -> Vec<(&'static str, CFunction)> {
    vec![
        ("neg", approximator_neg()),
        ("add", approximator_add()),
        ("mid", approximator_mid()),
        ("mul", approximator_mul()),
        ("pow3", approximator_pow(3)),
        ("abs", approximator_abs()),
        (
            "x*x - x",
            compile_boehm(&parse_expr("x*x - x").unwrap(), &["x"]).unwrap(),
        ),
    ]
}

fn rand_poly(r: &mut impl Rng) -> Expr {
    let x = Expr::var("x");
    let mut e = Expr::lit(rand_unit_dyadic(r, 3));
    for deg in 1..=r.gen_range(1..=3u32) {
        let term = if deg == 1 {
            x.clone()
        } else {
            Expr::pow(x.clone(), deg)
        };
        e = Expr::add(e, Expr::mul(Expr::lit(rand_unit_dyadic(r, 3)), term));
    }
    e
}

/// Exhaustive, decreasing-modulus and branching searchers against full enumeration.
pub fn searchers(predicates: usize) -> Check {
    let mut r = rng(8);
    let anchor = TernaryCode::new(-1, 0);
    let mut found = 0;
    let mut made = 0;
    while made < predicates {
        // Boehm threshold predicate with delta <= 8.
        let op = if r.gen_bool(0.5) {
            CmpOp::Le
        } else {
            CmpOp::Ge
        };
        let cmp = Comparison {
            lhs: rand_poly(&mut r),
            op,
            rhs: Expr::lit(rand_dyadic(&mut r, 1, 4)),
        };
        let pred = boehm_comparison(&cmp, "x", &anchor, r.gen_range(0..=3)).unwrap();
        if pred.modulus() > 8 {
            continue;
        }
        made += 1;
        let n = net(&anchor, pred.modulus()).unwrap();
        let brute = n
            .iter()
            .position(|c| pred.decide(&tb_from_ternary_code(&c).enc));
        let ex = search_tb_exhaustive(&anchor, &pred).unwrap();
        if ex.found != brute.is_some() || ex.code != brute.map(|j| n.get(j as u128)) {
            return Err(format!("exhaustive disagrees on {}", cmp));
        }
        let br = search_branching(&anchor, &pred).unwrap();
        if br.found != brute.is_some() {
            return Err(format!("branching found={} on {}", br.found, cmp));
        }
        if let Some(w) = &br.witness {
            if !pred.decide(w) {
                return Err(format!("branching witness fails {}", cmp));
            }
        }
        found += usize::from(ex.found);

        // Signed-digit threshold predicate on the level-delta code.
        let delta = r.gen_range(1..=8usize);
        let span = 1i64 << (delta + 1);
        let t = BigInt::from(r.gen_range(-span..=span));
        let exact = r.gen_bool(0.3);
        let pred = UCPredicate::new(delta as i64, move |x: &SDStream| {
            let k = sd::integer_approx(x, delta);
            if exact {
                k == t
            } else {
                k >= t
            }
        });
        let brute = (0..1u64 << delta).any(|i| {
            let bits: Vec<bool> = (0..delta).map(|j| (i >> j) & 1 == 1).collect();
            pred.decide(&sd::from_binary_prefix(&bits))
        });
        let ex = search_sd_exhaustive(&pred).unwrap();
        let dm = search_sd_decreasing(&pred);
        if ex.found != brute || dm.found != brute {
            return Err(format!(
                "sd searchers disagree at delta {delta}: brute {brute}, {} {}",
                ex.found, dm.found
            ));
        }
        if (ex.found && !pred.decide(&ex.witness)) || (dm.found && !pred.decide(&dm.witness)) {
            return Err("sd witness fails its predicate".into());
        }
    }
    Ok(format!(
        "{made} Boehm + {made} signed-digit predicates, {found} Boehm satisfiable"
    ))
}

/// Structural identities, lifting coverage, net shape, refinement and ternary chains.
pub fn structure(cases: usize) -> Check {
    let mut r = rng(9);
    let fns = boehm_functions();
    for c in 0..cases {
        let k = BigInt::from(r.gen_range(-1_000_000i64..=1_000_000));
        if up_right(&down_left(&k)) != k
            || up_right(&down_right(&k)) != &k + 1
            || up_left(&down_right(&k)) != k
            || !below(&down_left(&k), &k)
            || !below(&down_mid(&k), &k)
            || !below(&down_right(&k), &k)
        {
            return Err(format!("structural identity fails at k = {k}"));
        }
        let p = r.gen_range(-5..40);
        let code = TernaryCode::new(k.clone(), p);
        let m = p - r.gen_range(0..12);
        let lifted = code.lift_to(m);
        if !lifted.covers(&code.lower(), &code.upper()) {
            return Err(format!("lift of {code} to {m} does not cover"));
        }
        match c % 100 {
            0 => {
                let anchor = TernaryCode::new(r.gen_range(-50..50), r.gen_range(-3..3));
                let delta = anchor.p + r.gen_range(0..6);
                let n = net(&anchor, delta).unwrap();
                let codes: Vec<TernaryCode> = n.iter().collect();
                let ok = codes.first().unwrap().lower() == anchor.lower()
                    && codes.last().unwrap().upper() == anchor.upper()
                    && codes.windows(2).all(|w| w[0].upper() == w[1].lower());
                if !ok {
                    return Err(format!(
                        "net of {anchor} at {delta} is not an ascending exact cover"
                    ));
                }
            }
            1 => {
                let (name, f) = &fns[r.gen_range(0..fns.len())];
                let outer: Vec<TernaryCode> = (0..f.arity())
                    .map(|_| TernaryCode::new(r.gen_range(-8..8), r.gen_range(0..4)))
                    .collect();
                let inner: Vec<TernaryCode> = outer
                    .iter()
                    .map(|o| {
                        let mut x = o.clone();
                        for _ in 0..r.gen_range(1..6) {
                            x = TernaryCode::new((&x.k << 1u32) + r.gen_range(0..=2), x.p + 1);
                        }
                        x
                    })
                    .collect();
                if !f.bound(&outer).contains_code(&f.bound(&inner)) {
                    return Err(format!("{name} bound not refined under nested inputs"));
                }
            }
            2 => {
                let d = rand_dyadic(&mut r, 3, 10);
                let consts = [
                    tb_from_int(r.gen_range(-100..100)),
                    tb_from_dyadic(&d),
                    tb_from_ternary_code(&TernaryCode::new(
                        r.gen_range(-100..100),
                        r.gen_range(-4..8),
                    ))
                    .enc,
                    third(),
                    sd_to_tb(&rand_stream(&mut r, 30)).enc,
                ];
                for (i, x) in consts.iter().enumerate() {
                    if !ternary_ok(x, -8, 24) {
                        return Err(format!("constructor {i} breaks the ternary chain"));
                    }
                }
                let (name, f) = &fns[r.gen_range(0..fns.len())];
                let args: Vec<TBEncoding> = (0..f.arity())
                    .map(|_| rand_tb(&mut r, &TernaryCode::new(-1, 0), 30))
                    .collect();
                let out = complete(f.approximator().clone(), &args).unwrap();
                if !ternary_ok(&out, -8, 24) {
                    return Err(format!("completion of {name} breaks the ternary chain"));
                }
            }
            _ => {}
        }
    }
    Ok(format!("{cases} cases"))
}

/// `sd_to_tb` against `integer_approx`, and `tb_to_sd` as its inverse.
pub fn conversions(trials: usize) -> Check {
    let mut r = rng(10);
    for t in 0..trials {
        let a = rand_stream(&mut r, 24);
        let x = sd_to_tb(&a);
        for n in 0..=20 {
            if x.enc.at(n as i64) != sd::integer_approx(&a, n) {
                return Err(format!(
                    "trial {t}: sd_to_tb disagrees with integer_approx at {n}"
                ));
            }
        }
        let back = tb_to_sd(&x).map_err(|e| e.to_string())?;
        if back.prefix(20) != a.prefix(20) {
            return Err(format!("trial {t}: round trip changes the 20-prefix"));
        }
    }
    Ok(format!("{trials} streams, levels 0..=20"))
}
