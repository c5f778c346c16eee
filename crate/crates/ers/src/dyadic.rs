//! Exact dyadic rationals `num / 2^exp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ErsError, Result};

/// A dyadic rational kept in canonical form: `num` odd, or `num == 0` with `exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: i64,
}

/// `floor(x / 2^s)` for `s >= 0`.
pub fn floor_shr(x: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return x.clone();
    }
    let (q, _) = x.div_mod_floor(&(BigInt::one() << s));
    q
}

/// `ceil(x / 2^s)` for `s >= 0`.
pub fn ceil_shr(x: &BigInt, s: u64) -> BigInt {
    -floor_shr(&-x, s)
}

/// `x * 2^s` for any sign of `s`, rounding down when `s < 0`.
pub fn shift_floor(x: &BigInt, s: i64) -> BigInt {
    if s >= 0 {
        x << (s as u64)
    } else {
        floor_shr(x, s.unsigned_abs())
    }
}

impl Dyadic {
    pub fn new(num: BigInt, exp: i64) -> Self {
        if num.is_zero() {
            return Dyadic { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0);
        Dyadic {
            num: num >> tz,
            exp: exp - tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int<T: Into<BigInt>>(z: T) -> Self {
        Self::new(z.into(), 0)
    }

    /// `num / 2^exp` from machine integers.
    pub fn from_parts(num: i64, exp: i64) -> Self {
        Self::new(BigInt::from(num), exp)
    }

    pub fn num(&self) -> &BigInt {
        &self.num
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    /// `self * 2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            num: self.num.clone(),
            exp: self.exp - k,
        }
    }

    /// `floor(self * 2^n)`.
    pub fn floor_at(&self, n: i64) -> BigInt {
        shift_floor(&self.num, n - self.exp)
    }

    /// `ceil(self * 2^n)`.
    pub fn ceil_at(&self, n: i64) -> BigInt {
        -shift_floor(&-&self.num, n - self.exp)
    }

    /// Smallest integer `t` with `|self| <= 2^t`; `None` for zero.
    pub fn ceil_log2_abs(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let a = self.num.abs();
        let bits = if a.is_one() { 0 } else { a.bits() as i64 };
        Some(bits - self.exp)
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.num.to_f64().unwrap_or(f64::NAN);
        if self.exp.abs() < 1000 {
            n * 2f64.powi(-(self.exp as i32))
        } else {
            // Split to avoid overflow in the exponent.
            let bits = self.num.bits() as i64;
            let shifted = floor_shr(&self.num, bits.saturating_sub(60).max(0) as u64);
            let k = bits.saturating_sub(60).max(0) - self.exp;
            shifted.to_f64().unwrap_or(f64::NAN) * 2f64.powf(k as f64)
        }
    }

    /// Parses a decimal string such as `-0.375` whose value is dyadic.
    pub fn from_decimal_str(s: &str) -> Result<Self> {
        let bad = || ErsError::Invalid(format!("not a decimal literal: {s}"));
        let (neg, body) = match s.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        // Value n / 10^f = n / (5^f 2^f): dyadic iff 5^f divides n.
        let five_f = BigInt::from(5u32).pow(frac_part.len() as u32);
        let (q, r) = n.div_rem(&five_f);
        if !r.is_zero() {
            return Err(ErsError::Invalid(format!("{s} is not a dyadic rational")));
        }
        debug_assert_eq!(&five_f << frac_part.len(), den);
        let v = Dyadic::new(q, frac_part.len() as i64);
        Ok(if neg { -v } else { v })
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        let a = &self.num << ((e - self.exp) as u64);
        let b = &other.num << ((e - other.exp) as u64);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << ((e - self.exp) as u64);
        let b = &rhs.num << ((e - rhs.exp) as u64);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -&self.num,
            exp: self.exp,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp < 0 {
            write!(f, "{}/2^0", &self.num << (-self.exp) as u64)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = ErsError;

    /// Accepts `num/2^exp`, a plain integer, or a dyadic decimal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, e)) = s.split_once("/2^") {
            let num: BigInt = n
                .trim()
                .parse()
                .map_err(|_| ErsError::Invalid(format!("bad numerator in {s}")))?;
            let exp: i64 = e
                .trim()
                .parse()
                .map_err(|_| ErsError::Invalid(format!("bad exponent in {s}")))?;
            return Ok(Dyadic::new(num, exp));
        }
        if let Ok(z) = s.parse::<BigInt>() {
            return Ok(Dyadic::from_int(z));
        }
        Dyadic::from_decimal_str(s)
    }
}
