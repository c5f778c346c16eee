//! Ternary Boehm encodings of reals.
//!
//! An encoding is an integer sequence `x` where level `n` denotes the
//! interval `[x_n/2^n, (x_n+2)/2^n]` and consecutive codes are nested
//! (`x_(n+1)` below `x_n`). Arithmetic goes through dyadic interval
//! approximators completed into encoding transformers.

pub mod approx;
pub mod codes;
pub mod encoding;

pub use approx::{
    abs_code, add_codes, approximator_abs, approximator_add, approximator_mid, approximator_mul,
    approximator_neg, approximator_pow, mul_codes, neg_code, pow_code, AbsApprox, AddApprox,
    Approximator, CFunction, MidApprox, MulApprox, NegApprox, PowApprox,
};
pub use codes::{
    below, down_left, down_mid, down_right, join_prime, net, up_left, up_right, DyadicCode, Net,
    TernaryCode,
};
pub use encoding::{
    complete, sd_to_tb, tb_approx_leq, tb_closeness, tb_from_dyadic, tb_from_int,
    tb_from_ternary_code, tb_to_sd, third, CompactTB, TBEncoding, TbSource, TB_TO_SD_CHECKED,
};
