#![allow(dead_code)]

use ers::boehm::{below, TBEncoding, TernaryCode};
use ers::dyadic::floor_shr;
use ers::signed_digit::{Digit3, SDStream, Stream};
use ers::Dyadic;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod checks;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact rational value of a dyadic, computed independently of `Dyadic`'s arithmetic.
pub fn ratio(d: &Dyadic) -> BigRational {
    let e = d.exp();
    let n = d.num().clone();
    if e >= 0 {
        BigRational::new(n, BigInt::one() << (e as usize))
    } else {
        BigRational::from_integer(n << ((-e) as usize))
    }
}

pub fn digit(v: i8) -> Digit3 {
    Digit3::new(v).unwrap()
}

pub fn rand_digit(r: &mut impl Rng) -> Digit3 {
    digit(r.gen_range(-1..=1))
}

pub fn rand_digits(r: &mut impl Rng, n: usize) -> Vec<Digit3> {
    (0..n).map(|_| rand_digit(r)).collect()
}

/// Random prefix of length `n` followed by a constant digit.
pub fn rand_stream(r: &mut impl Rng, n: usize) -> SDStream {
    let tail = rand_digit(r);
    Stream::with_tail(rand_digits(r, n), tail)
}

/// Exact value of `prefix` followed by `repeat(tail)`.
pub fn stream_value(prefix: &[Digit3], tail: Digit3) -> BigRational {
    let mut s = BigRational::from_integer(0.into());
    let mut w = BigRational::new(1.into(), 2.into());
    for d in prefix {
        s += &w * BigRational::from_integer(d.value().into());
        w /= BigRational::from_integer(2.into());
    }
    // The tail sums to tail * 2^-len.
    s + (&w * BigRational::from_integer(2.into())) * BigRational::from_integer(tail.value().into())
}

/// Random dyadic in `[-1, 1]` with denominator at most `2^max_exp`.
pub fn rand_unit_dyadic(r: &mut impl Rng, max_exp: i64) -> Dyadic {
    let e = r.gen_range(0..=max_exp);
    let m: i64 = 1 << e;
    Dyadic::from_parts(r.gen_range(-m..=m), e)
}

/// Random dyadic with magnitude below `2^mag` and denominator at most `2^max_exp`.
pub fn rand_dyadic(r: &mut impl Rng, mag: i64, max_exp: i64) -> Dyadic {
    let e = r.gen_range(0..=max_exp);
    let m: i64 = 1 << (e + mag);
    Dyadic::from_parts(r.gen_range(-m..m), e)
}

/// A random chain from `anchor` for `depth` levels, then left-endpoint.
pub fn rand_tb(r: &mut impl Rng, anchor: &TernaryCode, depth: usize) -> TBEncoding {
    let mut path = vec![anchor.k.clone()];
    for _ in 0..depth {
        let last = path.last().unwrap();
        path.push((last << 1u32) + r.gen_range(0..=2));
    }
    chain_encoding(anchor.p, path)
}

/// Like [`rand_tb`] but starting with the given path from `anchor`.
pub fn rand_tb_through(
    r: &mut impl Rng,
    anchor: &TernaryCode,
    prefix: &[BigInt],
    depth: usize,
) -> TBEncoding {
    let mut path = prefix.to_vec();
    for _ in 0..depth {
        let last = path.last().unwrap();
        path.push((last << 1u32) + r.gen_range(0..=2));
    }
    chain_encoding(anchor.p, path)
}

/// Random path of `len` codes starting at `anchor`.
pub fn rand_path(r: &mut impl Rng, anchor: &TernaryCode, len: usize) -> Vec<BigInt> {
    let mut path = vec![anchor.k.clone()];
    for _ in 0..len {
        let last = path.last().unwrap();
        path.push((last << 1u32) + r.gen_range(0..=2));
    }
    path
}

/// Encoding with `path[i]` at level `p0 + i`, floor lifting above and `down_left` below.
pub fn chain_encoding(p0: i64, path: Vec<BigInt>) -> TBEncoding {
    TBEncoding::from_fn(move |n| {
        let i = n - p0;
        if i < 0 {
            floor_shr(&path[0], (-i) as u64)
        } else if (i as usize) < path.len() {
            path[i as usize].clone()
        } else {
            path.last().unwrap() << ((i as usize) - path.len() + 1)
        }
    })
}

/// Whether consecutive codes of `x` on `lo..=hi` are nested.
pub fn ternary_ok(x: &TBEncoding, lo: i64, hi: i64) -> bool {
    (lo..hi).all(|n| below(&x.at(n + 1), &x.at(n)))
}

/// Whether `v` lies in the interval of code `(k, p)`.
pub fn code_contains(code: &TernaryCode, v: &BigRational) -> bool {
    let lo = ratio(&code.lower());
    let hi = ratio(&code.upper());
    &lo <= v && v <= &hi
}
