use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{floor_shr, shift_floor, Dyadic};
use crate::error::{ErsError, Result};

pub fn down_left(k: &BigInt) -> BigInt {
    k << 1u32
}

pub fn down_mid(k: &BigInt) -> BigInt {
    (k << 1u32) + 1
}

pub fn down_right(k: &BigInt) -> BigInt {
    (k << 1u32) + 2
}

/// Floor division by two.
pub fn up_right(k: &BigInt) -> BigInt {
    floor_shr(k, 1)
}

pub fn up_left(k: &BigInt) -> BigInt {
    up_right(&(k - 1))
}

/// `n` is one of the three children of `m`.
pub fn below(n: &BigInt, m: &BigInt) -> bool {
    let l = down_left(m);
    &l <= n && n <= &(l + 2)
}

/// The interval `[k/2^p, (k+2)/2^p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryCode {
    pub k: BigInt,
    pub p: i64,
}

impl TernaryCode {
    pub fn new<K: Into<BigInt>>(k: K, p: i64) -> Self {
        TernaryCode { k: k.into(), p }
    }

    pub fn lower(&self) -> Dyadic {
        Dyadic::new(self.k.clone(), self.p)
    }

    pub fn upper(&self) -> Dyadic {
        Dyadic::new(&self.k + 2, self.p)
    }

    pub fn to_dyadic_interval(&self) -> (Dyadic, Dyadic) {
        (self.lower(), self.upper())
    }

    /// Centre `(k+1)/2^p`.
    pub fn midpoint(&self) -> Dyadic {
        Dyadic::new(&self.k + 1, self.p)
    }

    pub fn to_dyadic_code(&self) -> DyadicCode {
        DyadicCode {
            k: self.k.clone(),
            c: &self.k + 2,
            p: self.p,
        }
    }

    pub fn down_left(&self) -> Self {
        TernaryCode {
            k: down_left(&self.k),
            p: self.p + 1,
        }
    }

    pub fn down_right(&self) -> Self {
        TernaryCode {
            k: down_right(&self.k),
            p: self.p + 1,
        }
    }

    /// Lifts by repeated `up_right` to level `m <= p`.
    pub fn lift_to(&self, m: i64) -> Self {
        debug_assert!(m <= self.p);
        TernaryCode {
            k: floor_shr(&self.k, (self.p - m) as u64),
            p: m,
        }
    }

    /// Interval containment.
    pub fn covers(&self, lo: &Dyadic, hi: &Dyadic) -> bool {
        &self.lower() <= lo && hi <= &self.upper()
    }
}

impl fmt::Display for TernaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.k, self.p)
    }
}

impl FromStr for TernaryCode {
    type Err = ErsError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || ErsError::Invalid(format!("expected k@p, got {s:?}"));
        let (k, p) = s.trim().split_once('@').ok_or_else(bad)?;
        Ok(TernaryCode {
            k: k.trim().parse().map_err(|_| bad())?,
            p: p.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// The interval `[k/2^p, c/2^p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicCode {
    pub k: BigInt,
    pub c: BigInt,
    pub p: i64,
}

impl DyadicCode {
    pub fn new<A: Into<BigInt>, B: Into<BigInt>>(k: A, c: B, p: i64) -> Self {
        let (k, c) = (k.into(), c.into());
        assert!(k <= c, "dyadic code needs k <= c");
        DyadicCode { k, c, p }
    }

    /// The degenerate code of an exact dyadic.
    pub fn point(d: &Dyadic) -> Self {
        DyadicCode {
            k: d.num().clone(),
            c: d.num().clone(),
            p: d.exp(),
        }
    }

    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic) -> Self {
        let p = lo.exp().max(hi.exp());
        DyadicCode {
            k: lo.floor_at(p),
            c: hi.floor_at(p),
            p,
        }
    }

    pub fn lower(&self) -> Dyadic {
        Dyadic::new(self.k.clone(), self.p)
    }

    pub fn upper(&self) -> Dyadic {
        Dyadic::new(self.c.clone(), self.p)
    }

    pub fn width(&self) -> Dyadic {
        Dyadic::new(&self.c - &self.k, self.p)
    }

    /// Largest endpoint magnitude.
    pub fn magnitude(&self) -> Dyadic {
        let m = if self.k.abs() > self.c.abs() {
            self.k.abs()
        } else {
            self.c.abs()
        };
        Dyadic::new(m, self.p)
    }

    /// Same interval at a finer level `q >= p`.
    pub fn at_level(&self, q: i64) -> Self {
        debug_assert!(q >= self.p);
        let s = (q - self.p) as u64;
        DyadicCode {
            k: &self.k << s,
            c: &self.c << s,
            p: q,
        }
    }

    pub fn contains(&self, d: &Dyadic) -> bool {
        &self.lower() <= d && d <= &self.upper()
    }

    pub fn contains_code(&self, o: &DyadicCode) -> bool {
        self.lower() <= o.lower() && o.upper() <= self.upper()
    }
}

/// Brings two codes to a common level.
pub(crate) fn align(a: &DyadicCode, b: &DyadicCode) -> (DyadicCode, DyadicCode) {
    let q = a.p.max(b.p);
    (a.at_level(q), b.at_level(q))
}

/// Narrowest ternary code covering `d`, at level at most `p + 1`.
pub fn join_prime(d: &DyadicCode) -> TernaryCode {
    let w = &d.c - &d.k;
    if w.is_zero() {
        return TernaryCode {
            k: &d.k << 1u32,
            p: d.p + 1,
        };
    }
    // A ternary code at level q has width 2^(1-q); width w/2^p needs q <= p+1-log2(w).
    let ceil_log2 = if w.is_one() {
        0
    } else {
        (&w - 1u32).bits() as i64
    };
    let mut q = d.p + 1 - ceil_log2;
    loop {
        let k = shift_floor(&d.k, q - d.p);
        if Dyadic::new(&k + 2, q) >= d.upper() {
            return TernaryCode { k, p: q };
        }
        q -= 1;
    }
}

/// Lazily enumerated `δ`-net of an anchor, in ascending code order.
#[derive(Clone, Debug)]
pub struct Net {
    base: BigInt,
    level: i64,
    count: u128,
}

impl Net {
    pub fn len(&self) -> u128 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// The `j`-th code.
    pub fn get(&self, j: u128) -> TernaryCode {
        debug_assert!(j < self.count);
        TernaryCode {
            k: &self.base + BigInt::from(j) * 2,
            p: self.level,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = TernaryCode> + '_ {
        (0..self.count).map(move |j| self.get(j))
    }
}

/// All level-`δ` descendants of `anchor` reachable by left/right steps.
pub fn net(anchor: &TernaryCode, delta: i64) -> Result<Net> {
    if delta < anchor.p {
        return Err(ErsError::BelowAnchor {
            level: delta,
            anchor: anchor.p,
        });
    }
    let s = (delta - anchor.p) as u32;
    if s > 120 {
        return Err(ErsError::Invalid(format!(
            "net of 2^{s} codes is too large"
        )));
    }
    Ok(Net {
        base: &anchor.k << s,
        level: delta,
        count: 1u128 << s,
    })
}
