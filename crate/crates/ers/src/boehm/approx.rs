use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::codes::{align, DyadicCode, TernaryCode};
use super::encoding::{complete, TBEncoding};
use crate::dyadic::Dyadic;
use crate::error::Result;

/// A dyadic interval approximator of a real function.
///
/// `apply` must enclose the exact image and refine monotonically. With every
/// argument read as a ternary code at level `n + offsets[i]`, the output
/// width must be at most `2^-n`.
pub trait Approximator: Send + Sync {
    fn arity(&self) -> usize;

    fn apply(&self, args: &[DyadicCode]) -> DyadicCode;

    /// Per-argument level offsets, valid for arguments inside `bounds`.
    fn offsets(&self, bounds: &[DyadicCode]) -> Vec<i64>;

    /// Input levels for output level `n`.
    fn modulus(&self, n: i64, bounds: &[DyadicCode]) -> Vec<i64> {
        self.offsets(bounds).into_iter().map(|o| n + o).collect()
    }
}

/// `1 + ceil(log2(c))`, the offset for a width multiplier `c`.
pub(crate) fn offset_for(c: &Dyadic) -> i64 {
    match c.ceil_log2_abs() {
        Some(t) if !c.is_negative() => 1 + t,
        _ => 0,
    }
}

pub struct NegApprox;

impl Approximator for NegApprox {
    fn arity(&self) -> usize {
        1
    }
    fn apply(&self, a: &[DyadicCode]) -> DyadicCode {
        DyadicCode {
            k: -&a[0].c,
            c: -&a[0].k,
            p: a[0].p,
        }
    }
    fn offsets(&self, _: &[DyadicCode]) -> Vec<i64> {
        vec![1]
    }
}

pub struct AddApprox;

impl Approximator for AddApprox {
    fn arity(&self) -> usize {
        2
    }
    fn apply(&self, a: &[DyadicCode]) -> DyadicCode {
        add_codes(&a[0], &a[1])
    }
    fn offsets(&self, _: &[DyadicCode]) -> Vec<i64> {
        vec![2, 2]
    }
}

/// `(x + y) / 2`.
pub struct MidApprox;

impl Approximator for MidApprox {
    fn arity(&self) -> usize {
        2
    }
    fn apply(&self, a: &[DyadicCode]) -> DyadicCode {
        let s = add_codes(&a[0], &a[1]);
        DyadicCode {
            k: s.k,
            c: s.c,
            p: s.p + 1,
        }
    }
    fn offsets(&self, _: &[DyadicCode]) -> Vec<i64> {
        vec![1, 1]
    }
}

pub struct MulApprox;

impl Approximator for MulApprox {
    fn arity(&self) -> usize {
        2
    }
    fn apply(&self, a: &[DyadicCode]) -> DyadicCode {
        mul_codes(&a[0], &a[1])
    }
    fn offsets(&self, b: &[DyadicCode]) -> Vec<i64> {
        // width(xy) <= |x| w_y + |y| w_x
        let o = offset_for(&(&b[0].magnitude() + &b[1].magnitude()));
        vec![o, o]
    }
}

pub struct PowApprox(pub u32);

impl Approximator for PowApprox {
    fn arity(&self) -> usize {
        1
    }
    fn apply(&self, a: &[DyadicCode]) -> DyadicCode {
        pow_code(&a[0], self.0)
    }
    fn offsets(&self, b: &[DyadicCode]) -> Vec<i64> {
        let m = b[0].magnitude();
        vec![offset_for(&pow_width_factor(&m, self.0))]
    }
}

pub struct AbsApprox;

impl Approximator for AbsApprox {
    fn arity(&self) -> usize {
        1
    }
    fn apply(&self, a: &[DyadicCode]) -> DyadicCode {
        abs_code(&a[0])
    }
    fn offsets(&self, _: &[DyadicCode]) -> Vec<i64> {
        vec![1]
    }
}

pub fn add_codes(a: &DyadicCode, b: &DyadicCode) -> DyadicCode {
    let (a, b) = align(a, b);
    DyadicCode {
        k: a.k + b.k,
        c: a.c + b.c,
        p: a.p,
    }
}

pub fn neg_code(a: &DyadicCode) -> DyadicCode {
    DyadicCode {
        k: -&a.c,
        c: -&a.k,
        p: a.p,
    }
}

pub fn mul_codes(a: &DyadicCode, b: &DyadicCode) -> DyadicCode {
    let ps = [&a.k * &b.k, &a.k * &b.c, &a.c * &b.k, &a.c * &b.c];
    let lo = ps.iter().min().cloned().unwrap_or_default();
    let hi = ps.iter().max().cloned().unwrap_or_default();
    DyadicCode {
        k: lo,
        c: hi,
        p: a.p + b.p,
    }
}

pub fn pow_code(a: &DyadicCode, n: u32) -> DyadicCode {
    assert!(n >= 1, "pow needs a positive exponent");
    let mut r = a.clone();
    for _ in 1..n {
        r = mul_codes(&r, a);
    }
    r
}

pub fn abs_code(a: &DyadicCode) -> DyadicCode {
    let (ak, ac) = (a.k.abs(), a.c.abs());
    let hi = if ak > ac { ak.clone() } else { ac.clone() };
    let lo = if a.k <= BigInt::zero() && a.c >= BigInt::zero() {
        BigInt::zero()
    } else if ak < ac {
        ak
    } else {
        ac
    };
    DyadicCode {
        k: lo,
        c: hi,
        p: a.p,
    }
}

/// `n · m^(n-1)`, the width multiplier of `x^n` on `|x| <= m`.
pub(crate) fn pow_width_factor(m: &Dyadic, n: u32) -> Dyadic {
    let mut r = Dyadic::from_int(n);
    for _ in 1..n {
        r = &r * m;
    }
    r
}

/// A completed function on ternary Boehm encodings.
#[derive(Clone)]
pub struct CFunction {
    approx: Arc<dyn Approximator>,
}

impl CFunction {
    pub fn new(approx: impl Approximator + 'static) -> Self {
        CFunction {
            approx: Arc::new(approx),
        }
    }

    pub fn from_arc(approx: Arc<dyn Approximator>) -> Self {
        CFunction { approx }
    }

    pub fn approximator(&self) -> &Arc<dyn Approximator> {
        &self.approx
    }

    pub fn arity(&self) -> usize {
        self.approx.arity()
    }

    pub fn apply(&self, args: &[TBEncoding]) -> Result<TBEncoding> {
        complete(Arc::clone(&self.approx), args)
    }

    /// Interval bound of the image of the given codes.
    pub fn bound(&self, codes: &[TernaryCode]) -> DyadicCode {
        let cs: Vec<DyadicCode> = codes.iter().map(TernaryCode::to_dyadic_code).collect();
        self.approx.apply(&cs)
    }

    /// Input levels for output level `n`, for arguments inside `anchors`.
    pub fn modulus(&self, n: i64, anchors: &[TernaryCode]) -> Vec<i64> {
        let cs: Vec<DyadicCode> = anchors.iter().map(TernaryCode::to_dyadic_code).collect();
        self.approx.modulus(n, &cs)
    }
}

pub fn approximator_neg() -> CFunction {
    CFunction::new(NegApprox)
}

pub fn approximator_add() -> CFunction {
    CFunction::new(AddApprox)
}

pub fn approximator_mid() -> CFunction {
    CFunction::new(MidApprox)
}

pub fn approximator_mul() -> CFunction {
    CFunction::new(MulApprox)
}

pub fn approximator_pow(n: u32) -> CFunction {
    CFunction::new(PowApprox(n))
}

pub fn approximator_abs() -> CFunction {
    CFunction::new(AbsApprox)
}
