//! Ternary signed-digit streams encoding reals in `[-1, 1]`.
//!
//! A stream `α` denotes `Σ α_n / 2^(n+1)`. Arithmetic is exact and lazy;
//! each operation comes with a modulus of uniform continuity mapping an
//! output prefix length to the input prefix lengths it reads.

mod digits;
mod stream;

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

pub use digits::{add3, add5, flip, Digit3, Digit5, Digit9};
pub use stream::Stream;

use crate::dyadic::Dyadic;
use crate::error::{ErsError, Result};

pub type SDStream = Stream<Digit3>;
pub type QStream5 = Stream<Digit5>;
pub type QStream9 = Stream<Digit9>;

/// Digit-wise negation.
pub fn neg(a: &SDStream) -> SDStream {
    a.map(flip)
}

/// Halves a quinary stream with a one-digit lookahead carry.
///
/// Output digit `n` reads `β_0..=β_(n+1)`.
pub fn div2(b: &QStream5) -> SDStream {
    let s = b.clone();
    let mut carry: Option<i8> = None;
    let mut pos = 0usize;
    Stream::unfold(move || {
        let a = *carry.get_or_insert_with(|| {
            pos = 1;
            s.at(0).value()
        });
        let next = s.at(pos).value();
        pos += 1;
        let d = match a {
            2 => 1,
            -2 => -1,
            1 if next > 0 => 1,
            -1 if next < 0 => -1,
            _ => 0,
        };
        carry = Some(2 * a + next - 4 * d);
        Digit3::raw(d)
    })
}

/// Quarters a nonary stream with a one-digit lookahead carry.
///
/// Output digit `n` reads `γ_0..=γ_(n+1)`.
pub fn div4(g: &QStream9) -> SDStream {
    let s = g.clone();
    let mut carry: Option<i8> = None;
    let mut pos = 0usize;
    Stream::unfold(move || {
        let a = *carry.get_or_insert_with(|| {
            pos = 1;
            s.at(0).value()
        });
        let next = s.at(pos).value();
        pos += 1;
        let t = 2 * a + next;
        let d = if t > 4 {
            1
        } else if t < -4 {
            -1
        } else {
            0
        };
        carry = Some(t - 8 * d);
        Digit3::raw(d)
    })
}

/// `(α + β) / 2`.
pub fn mid(a: &SDStream, b: &SDStream) -> SDStream {
    div2(&a.zip_with(b, add3))
}

/// `4 · Σ ζ_n / 2^(n+1)` as a nonary stream.
pub fn big_mid_prime(z: &Stream<SDStream>) -> QStream9 {
    let zs = z.clone();
    let mut state: Option<(SDStream, usize)> = None;
    Stream::unfold(move || {
        let (h, idx) = state.get_or_insert_with(|| (zs.at(0), 1)).clone();
        let nxt = zs.at(idx);
        let d = add5(add3(h.at(0), h.at(0)), add3(h.at(1), nxt.at(0)));
        state = Some((mid(&h.skip(2), &nxt.skip(1)), idx + 1));
        d
    })
}

/// `Σ ζ_n / 2^(n+1)`.
pub fn big_mid(z: &Stream<SDStream>) -> SDStream {
    div4(&big_mid_prime(z))
}

pub fn digit_mul(d: Digit3, b: &SDStream) -> SDStream {
    match d.value() {
        -1 => neg(b),
        0 => repeat(Digit3::ZERO),
        _ => b.clone(),
    }
}

/// `α · β` as `bigMid` of the digit-scaled copies of `β`.
pub fn mul(a: &SDStream, b: &SDStream) -> SDStream {
    let a = a.clone();
    let b = b.clone();
    big_mid(&Stream::from_fn(move |i| digit_mul(a.at(i), &b)))
}

pub fn repeat(d: Digit3) -> SDStream {
    Stream::repeat(d)
}

/// Closeness at level `n`: equal `n`-prefixes.
pub fn prefix_eq(a: &SDStream, b: &SDStream, n: usize) -> bool {
    (0..n).all(|i| a.at(i) == b.at(i))
}

/// Level-`n` ternary code reached from `-1` by reading digits as left/mid/right steps.
pub fn integer_approx(a: &SDStream, n: usize) -> BigInt {
    let mut k = -BigInt::one();
    for i in 0..n {
        k = (k << 1u32) + BigInt::from(a.at(i).value() + 1);
    }
    k
}

/// Approximate order at level `ε`.
pub fn approx_leq(a: &SDStream, b: &SDStream, eps: usize) -> bool {
    integer_approx(a, eps) <= integer_approx(b, eps)
}

/// Maps bit `1` to digit `1` and bit `0` to digit `-1`.
pub fn from_binary(bits: &Stream<bool>) -> SDStream {
    bits.map(|b| if b { Digit3::POS } else { Digit3::NEG })
}

/// Binary prefix completed with digit `-1`.
pub fn from_binary_prefix(bits: &[bool]) -> SDStream {
    Stream::with_tail(
        bits.iter()
            .map(|&b| if b { Digit3::POS } else { Digit3::NEG })
            .collect(),
        Digit3::NEG,
    )
}

/// Greedy expansion of a dyadic in `[-1, 1]`.
///
/// Each step picks the digit nearest to twice the residual, preferring `0`
/// on ties, so `1/2` becomes `1,0,0,…` and `-1` becomes `-1,-1,…`.
pub fn from_dyadic(d: &Dyadic) -> Result<SDStream> {
    if d > &Dyadic::one() || d < &-Dyadic::one() {
        return Err(ErsError::OutOfRange(d.to_string()));
    }
    let mut r = d.clone();
    let half = Dyadic::from_parts(1, 1);
    Ok(Stream::unfold(move || {
        let t = r.mul_pow2(1);
        let digit = if t > half {
            1
        } else if t < -&half {
            -1
        } else {
            0
        };
        r = &t - &Dyadic::from_int(digit);
        Digit3::raw(digit as i8)
    }))
}

/// `Σ_{i<n} α_i/2^(i+1) ± 2^-n`.
pub fn to_rational_interval(a: &SDStream, n: usize) -> (Dyadic, Dyadic) {
    let mut s = BigInt::from(0);
    for i in 0..n {
        s = (s << 1u32) + BigInt::from(a.at(i).value());
    }
    let s = Dyadic::new(s, n as i64);
    let r = Dyadic::from_parts(1, n as i64);
    (&s - &r, &s + &r)
}

/// `1/3 = 0,1,0,1,…`.
pub fn third() -> SDStream {
    Stream::from_fn(|i| {
        if i % 2 == 1 {
            Digit3::POS
        } else {
            Digit3::ZERO
        }
    })
}

/// Renders an `n`-prefix as `d0,d1,…`.
pub fn format_prefix(a: &SDStream, n: usize) -> String {
    a.prefix(n)
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses fixtures like `0,1,-1,...`; a trailing `...` repeats the last digit,
/// otherwise the stream continues with zeros.
pub fn parse_digits(s: &str) -> Result<SDStream> {
    let mut parts: Vec<&str> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .collect();
    let repeat_last = parts.last() == Some(&"...");
    if repeat_last {
        parts.pop();
    }
    let mut ds = Vec::with_capacity(parts.len());
    for p in parts {
        let v: i8 = p
            .parse()
            .map_err(|_| ErsError::Invalid(format!("bad digit {p:?}")))?;
        ds.push(Digit3::new(v)?);
    }
    let tail = if repeat_last {
        *ds.last().unwrap_or(&Digit3::ZERO)
    } else {
        Digit3::ZERO
    };
    Ok(Stream::with_tail(ds, tail))
}

impl FromStr for Stream<Digit3> {
    type Err = ErsError;
    fn from_str(s: &str) -> Result<Self> {
        parse_digits(s)
    }
}

/// Moduli of uniform continuity for the stream operations.
///
/// Each maps an output prefix length `ε` to the input prefix lengths that
/// determine it.
pub mod modulus {
    use std::collections::HashMap;
    use std::sync::OnceLock;

    use parking_lot::Mutex;

    pub fn neg(eps: usize) -> usize {
        eps
    }

    pub fn div2(eps: usize) -> usize {
        if eps == 0 {
            0
        } else {
            eps + 1
        }
    }

    pub fn div4(eps: usize) -> usize {
        div2(eps)
    }

    pub fn mid(eps: usize) -> (usize, usize) {
        let d = div2(eps);
        (d, d)
    }

    /// `(d, δ)`: the first `d` streams, each to `δ` digits, fix `L` digits.
    pub fn big_mid_prime(len: usize) -> (usize, usize) {
        static MEMO: OnceLock<Mutex<HashMap<usize, (usize, usize)>>> = OnceLock::new();
        let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = memo.lock().get(&len) {
            return *v;
        }
        let v = match len {
            0 => (0, 0),
            1 => (2, 2),
            _ => {
                // The tail call sees `mid(ζ0.skip2, ζ1.skip1) :: ζ2 :: …`.
                let (d, delta) = big_mid_prime(len - 1);
                (d + 1, delta + 3)
            }
        };
        memo.lock().insert(len, v);
        v
    }

    pub fn big_mid(eps: usize) -> (usize, usize) {
        big_mid_prime(div4(eps))
    }

    /// Prefix lengths of `(α, β)` that fix `ε` digits of `α · β`.
    pub fn mul(eps: usize) -> (usize, usize) {
        big_mid(eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3(v: &[i8]) -> Vec<Digit3> {
        v.iter().map(|&x| Digit3::new(x).unwrap()).collect()
    }

    #[test]
    fn neg_examples() {
        assert_eq!(neg(&repeat(Digit3::POS)).prefix(4), d3(&[-1, -1, -1, -1]));
        let a = parse_digits("0,1,-1").unwrap();
        assert_eq!(neg(&a).prefix(3), d3(&[0, -1, 1]));
    }

    #[test]
    fn div2_examples() {
        let s = Stream::with_tail(
            vec![Digit5::new(-1).unwrap(), Digit5::new(-2).unwrap()],
            Digit5::new(0).unwrap(),
        );
        let out = div2(&s);
        assert_eq!(out.at(0), Digit3::NEG);
        assert_eq!(
            div2(&Stream::repeat(Digit5::new(2).unwrap())).prefix(6),
            d3(&[1; 6])
        );
        assert_eq!(
            div2(&Stream::repeat(Digit5::new(0).unwrap())).prefix(6),
            d3(&[0; 6])
        );
    }

    #[test]
    fn div4_examples() {
        assert_eq!(
            div4(&Stream::repeat(Digit9::new(4).unwrap())).prefix(6),
            d3(&[1; 6])
        );
        assert_eq!(
            div4(&Stream::repeat(Digit9::new(-4).unwrap())).prefix(6),
            d3(&[-1; 6])
        );
        assert_eq!(
            div4(&Stream::repeat(Digit9::new(0).unwrap())).prefix(6),
            d3(&[0; 6])
        );
    }

    #[test]
    fn mid_examples() {
        let p = repeat(Digit3::POS);
        let n = repeat(Digit3::NEG);
        assert_eq!(mid(&p, &n).prefix(8), d3(&[0; 8]));
        assert_eq!(mid(&p, &p).prefix(8), d3(&[1; 8]));
    }

    #[test]
    fn integer_approx_examples() {
        let a = parse_digits("0,1,-1,...").unwrap();
        let got: Vec<i64> = (0..4)
            .map(|n| i64::try_from(integer_approx(&a, n)).unwrap())
            .collect();
        assert_eq!(got, vec![-1, -1, 0, 0]);
        let b = parse_digits("1,-1,...").unwrap();
        let got: Vec<i64> = (0..4)
            .map(|n| i64::try_from(integer_approx(&b, n)).unwrap())
            .collect();
        assert_eq!(got, vec![-1, 0, 0, 0]);
    }

    #[test]
    fn from_dyadic_policy() {
        let h = from_dyadic(&Dyadic::from_parts(1, 1)).unwrap();
        assert_eq!(h.prefix(4), d3(&[1, 0, 0, 0]));
        let m = from_dyadic(&Dyadic::from_int(-1)).unwrap();
        assert_eq!(m.prefix(4), d3(&[-1; 4]));
        assert!(from_dyadic(&Dyadic::from_parts(3, 1)).is_err());
    }

    #[test]
    fn rational_interval_examples() {
        let (lo, hi) = to_rational_interval(&repeat(Digit3::POS), 2);
        assert_eq!((lo, hi), (Dyadic::from_parts(1, 1), Dyadic::one()));
        let (lo, hi) = to_rational_interval(&repeat(Digit3::ZERO), 5);
        assert_eq!(
            (lo, hi),
            (Dyadic::from_parts(-1, 5), Dyadic::from_parts(1, 5))
        );
    }

    #[test]
    fn approx_leq_examples() {
        let a = from_dyadic(&Dyadic::from_parts(-1, 1)).unwrap();
        let b = from_dyadic(&Dyadic::from_parts(1, 1)).unwrap();
        assert!(approx_leq(&a, &b, 4));
        assert!(!approx_leq(&b, &a, 4));
    }

    #[test]
    fn modulus_values() {
        assert_eq!(modulus::big_mid_prime(1), (2, 2));
        assert_eq!(modulus::big_mid_prime(4), (5, 11));
        assert_eq!(modulus::mul(3), (5, 11));
        assert_eq!(modulus::mul(0), (0, 0));
    }
}
