use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use parking_lot::Mutex;

use super::approx::Approximator;
use super::codes::{below, join_prime, DyadicCode, TernaryCode};
use crate::dyadic::{floor_shr, Dyadic};
use crate::error::{ErsError, Result};
use crate::signed_digit::{Digit3, SDStream, Stream};

/// Producer of the integer codes of a ternary Boehm encoding.
pub trait TbSource: Send + Sync {
    fn try_at(&self, n: i64) -> Result<BigInt>;

    /// A code whose interval contains every code at finer levels.
    fn enclosure(&self) -> Option<TernaryCode> {
        None
    }
}

/// A ternary Boehm encoding: level `n` holds the code of `[x_n/2^n, (x_n+2)/2^n]`.
#[derive(Clone)]
pub struct TBEncoding {
    src: Arc<dyn TbSource>,
}

impl TBEncoding {
    pub fn from_source(src: impl TbSource + 'static) -> Self {
        TBEncoding { src: Arc::new(src) }
    }

    /// Memoised encoding from a code function. The caller guarantees the
    /// ternary property.
    pub fn from_fn(f: impl Fn(i64) -> BigInt + Send + Sync + 'static) -> Self {
        Self::from_source(FnSource {
            f: Box::new(f),
            memo: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn try_at(&self, n: i64) -> Result<BigInt> {
        self.src.try_at(n)
    }

    /// Code at level `n`; panics on a contract violation inside a completion.
    pub fn at(&self, n: i64) -> BigInt {
        match self.try_at(n) {
            Ok(k) => k,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn code(&self, n: i64) -> TernaryCode {
        TernaryCode {
            k: self.at(n),
            p: n,
        }
    }

    pub fn try_code(&self, n: i64) -> Result<TernaryCode> {
        Ok(TernaryCode {
            k: self.try_at(n)?,
            p: n,
        })
    }

    /// Enclosure hint, defaulting to the level-0 code.
    pub fn enclosure(&self) -> Result<TernaryCode> {
        match self.src.enclosure() {
            Some(c) => Ok(c),
            None => self.try_code(0),
        }
    }
}

impl fmt::Debug for TBEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<String> = (0..4)
            .map(|n| {
                self.try_at(n)
                    .map(|k| k.to_string())
                    .unwrap_or_else(|_| "!".into())
            })
            .collect();
        write!(f, "TB[{}..]", codes.join(", "))
    }
}

struct FnSource {
    f: Box<dyn Fn(i64) -> BigInt + Send + Sync>,
    memo: Mutex<BTreeMap<i64, BigInt>>,
}

impl TbSource for FnSource {
    fn try_at(&self, n: i64) -> Result<BigInt> {
        if let Some(k) = self.memo.lock().get(&n) {
            return Ok(k.clone());
        }
        let k = (self.f)(n);
        self.memo.lock().insert(n, k.clone());
        Ok(k)
    }
}

/// `floor(d · 2^n)` at every level.
struct DyadicSource {
    d: Dyadic,
    enclosure: TernaryCode,
}

impl TbSource for DyadicSource {
    fn try_at(&self, n: i64) -> Result<BigInt> {
        Ok(self.d.floor_at(n))
    }
    fn enclosure(&self) -> Option<TernaryCode> {
        Some(self.enclosure.clone())
    }
}

struct ThirdSource;

impl TbSource for ThirdSource {
    fn try_at(&self, n: i64) -> Result<BigInt> {
        if n < 0 {
            return Ok(BigInt::from(0));
        }
        Ok((BigInt::one() << n as u64) / 3)
    }
    fn enclosure(&self) -> Option<TernaryCode> {
        Some(TernaryCode::new(1, 2))
    }
}

struct SdSource {
    a: SDStream,
    codes: Mutex<Vec<BigInt>>,
}

impl TbSource for SdSource {
    fn try_at(&self, n: i64) -> Result<BigInt> {
        if n < 0 {
            return Ok(-BigInt::one());
        }
        let mut codes = self.codes.lock();
        while codes.len() <= n as usize {
            let i = codes.len() - 1;
            let next = (&codes[i] << 1u32) + BigInt::from(self.a.at(i).value() + 1);
            codes.push(next);
        }
        Ok(codes[n as usize].clone())
    }
    fn enclosure(&self) -> Option<TernaryCode> {
        Some(TernaryCode::new(-1, 0))
    }
}

pub fn tb_from_int<Z: Into<BigInt>>(z: Z) -> TBEncoding {
    tb_from_dyadic(&Dyadic::from_int(z))
}

/// Left-endpoint encoding `floor(d · 2^n)` of an exact dyadic.
pub fn tb_from_dyadic(d: &Dyadic) -> TBEncoding {
    let lvl = d.exp().max(0);
    let enclosure = TernaryCode {
        k: d.floor_at(lvl),
        p: lvl,
    };
    TBEncoding::from_source(DyadicSource {
        d: d.clone(),
        enclosure,
    })
}

/// The constant `1/3`.
pub fn third() -> TBEncoding {
    TBEncoding::from_source(ThirdSource)
}

/// An encoding pinned to an anchor code.
#[derive(Clone, Debug)]
pub struct CompactTB {
    pub enc: TBEncoding,
    pub anchor: TernaryCode,
}

impl CompactTB {
    pub fn new(enc: TBEncoding, anchor: TernaryCode) -> Result<Self> {
        let k = enc.try_at(anchor.p)?;
        if k != anchor.k {
            return Err(ErsError::Invalid(format!(
                "encoding has {k} at level {}, not anchor {anchor}",
                anchor.p
            )));
        }
        Ok(CompactTB { enc, anchor })
    }
}

/// Left-endpoint completion of a code: `down_left` below, `up_right` above.
pub fn tb_from_ternary_code(code: &TernaryCode) -> CompactTB {
    let enc = TBEncoding::from_source(DyadicSource {
        d: code.lower(),
        enclosure: code.clone(),
    });
    CompactTB {
        enc,
        anchor: code.clone(),
    }
}

pub fn tb_closeness(x: &TBEncoding, y: &TBEncoding, eps: i64) -> bool {
    (x.at(eps) - y.at(eps)).abs() <= BigInt::one()
}

pub fn tb_approx_leq(x: &TBEncoding, y: &TBEncoding, eps: i64) -> bool {
    x.at(eps) <= y.at(eps)
}

/// Reads a signed-digit stream as digit-by-digit left/mid/right steps from `(-1, 0)`.
pub fn sd_to_tb(a: &SDStream) -> CompactTB {
    let enc = TBEncoding::from_source(SdSource {
        a: a.clone(),
        codes: Mutex::new(vec![-BigInt::one()]),
    });
    CompactTB {
        enc,
        anchor: TernaryCode::new(-1, 0),
    }
}

/// Levels of a compact encoding checked eagerly by [`tb_to_sd`].
pub const TB_TO_SD_CHECKED: usize = 64;

/// Inverse of [`sd_to_tb`] relative to the anchor.
///
/// The first [`TB_TO_SD_CHECKED`] steps are validated up front; a later
/// step that is not below its parent panics when read.
pub fn tb_to_sd(x: &CompactTB) -> Result<SDStream> {
    let p0 = x.anchor.p;
    let step = {
        let enc = x.enc.clone();
        move |i: usize| -> Result<Digit3> {
            let lvl = p0 + i as i64;
            let parent = enc.try_at(lvl)?;
            let child = enc.try_at(lvl + 1)?;
            if !below(&child, &parent) {
                return Err(ErsError::NotBelow {
                    code: child.to_string(),
                    level: lvl + 1,
                    parent: parent.to_string(),
                });
            }
            let d = (child - (parent << 1u32)).to_i8().unwrap_or(0) - 1;
            Digit3::new(d)
        }
    };
    if x.enc.try_at(p0)? != x.anchor.k {
        return Err(ErsError::Invalid(format!(
            "encoding does not pass through anchor {}",
            x.anchor
        )));
    }
    for i in 0..TB_TO_SD_CHECKED {
        step(i)?;
    }
    Ok(Stream::from_fn(move |i| match step(i) {
        Ok(d) => d,
        Err(e) => panic!("{e}"),
    }))
}

struct Chain {
    codes: Vec<BigInt>,
    lo: Dyadic,
    hi: Dyadic,
}

struct Completed {
    f: Arc<dyn Approximator>,
    args: Vec<TBEncoding>,
    offsets: Vec<i64>,
    base: i64,
    chain: Mutex<Chain>,
}

impl Completed {
    fn step(&self, n: i64, chain: &mut Chain) -> Result<()> {
        let mut codes = Vec::with_capacity(self.args.len());
        for (a, o) in self.args.iter().zip(&self.offsets) {
            let lvl = n + o;
            codes.push(
                TernaryCode {
                    k: a.try_at(lvl)?,
                    p: lvl,
                }
                .to_dyadic_code(),
            );
        }
        let mut out = self.f.apply(&codes);
        if out.p <= n {
            // Exact outputs at a coarse level would cap the join below level n.
            out = out.at_level(n + 1);
        }
        let j = join_prime(&out);
        let (jlo, jhi) = j.to_dyadic_interval();
        let first = chain.codes.is_empty();
        if first {
            chain.lo = jlo;
            chain.hi = jhi;
        } else {
            if jlo > chain.lo {
                chain.lo = jlo;
            }
            if jhi < chain.hi {
                chain.hi = jhi;
            }
        }
        if chain.lo > chain.hi {
            return Err(ErsError::Contract(format!(
                "empty enclosure at level {n}: approximator is unsound"
            )));
        }
        let fl = chain.lo.floor_at(n);
        let y = match chain.codes.last() {
            None => fl,
            Some(m) => {
                let right = (m << 1u32) + 2;
                let y = if fl < right { fl } else { right };
                if y < (m << 1u32) {
                    return Err(ErsError::Contract(format!(
                        "level {n} enclosure left of parent code {m}"
                    )));
                }
                y
            }
        };
        if Dyadic::new(&y + 2, n) < chain.hi {
            return Err(ErsError::Contract(format!(
                "output at level {n} too wide for one child code (width {}): modulus too small",
                (&chain.hi - &chain.lo)
            )));
        }
        chain.codes.push(y);
        Ok(())
    }
}

impl TbSource for Completed {
    fn try_at(&self, n: i64) -> Result<BigInt> {
        let mut chain = self.chain.lock();
        if n < self.base {
            if chain.codes.is_empty() {
                self.step(self.base, &mut chain)?;
            }
            return Ok(floor_shr(&chain.codes[0], (self.base - n) as u64));
        }
        let idx = (n - self.base) as usize;
        while chain.codes.len() <= idx {
            let lvl = self.base + chain.codes.len() as i64;
            self.step(lvl, &mut chain)?;
        }
        Ok(chain.codes[idx].clone())
    }

    fn enclosure(&self) -> Option<TernaryCode> {
        self.try_at(self.base)
            .ok()
            .map(|k| TernaryCode { k, p: self.base })
    }
}

/// Completes an approximator to a function on encodings.
///
/// Level `n` reads argument `i` at `n + offset_i`, applies the approximator,
/// joins to a ternary code and intersects with all coarser joined outputs.
/// The output code is the rightmost child of the previous code that covers
/// this intersection. Levels below the first computed level are lifted.
pub fn complete(f: Arc<dyn Approximator>, args: &[TBEncoding]) -> Result<TBEncoding> {
    if args.len() != f.arity() {
        return Err(ErsError::Invalid(format!(
            "expected {} arguments, got {}",
            f.arity(),
            args.len()
        )));
    }
    let encl: Vec<TernaryCode> = args
        .iter()
        .map(TBEncoding::enclosure)
        .collect::<Result<_>>()?;
    let bounds: Vec<DyadicCode> = encl.iter().map(TernaryCode::to_dyadic_code).collect();
    let offsets = f.offsets(&bounds);
    let base = encl
        .iter()
        .zip(&offsets)
        .map(|(e, o)| e.p - o)
        .max()
        .unwrap_or(0);
    Ok(TBEncoding::from_source(Completed {
        f,
        args: args.to_vec(),
        offsets,
        base,
        chain: Mutex::new(Chain {
            codes: Vec::new(),
            lo: Dyadic::zero(),
            hi: Dyadic::zero(),
        }),
    }))
}
