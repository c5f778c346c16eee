use std::fmt;

use crate::error::{ErsError, Result};

macro_rules! digit_type {
    ($(#[$m:meta])* $name:ident, $bound:expr) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(i8);

        impl $name {
            pub const MAX: i8 = $bound;

            pub fn new(v: i8) -> Result<Self> {
                if (-$bound..=$bound).contains(&v) {
                    Ok($name(v))
                } else {
                    Err(ErsError::OutOfRange(format!("digit {v} for {}", stringify!($name))))
                }
            }

            pub fn value(self) -> i8 {
                self.0
            }

            /// Caller guarantees the range.
            #[allow(dead_code)]
            pub(crate) fn raw(v: i8) -> Self {
                debug_assert!((-$bound..=$bound).contains(&v));
                $name(v)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

digit_type!(
    /// Ternary signed digit in `{-1, 0, 1}`.
    Digit3, 1
);
digit_type!(
    /// Quinary digit in `{-2..2}`.
    Digit5, 2
);
digit_type!(
    /// Nonary digit in `{-4..4}`.
    Digit9, 4
);

impl Digit3 {
    pub const NEG: Digit3 = Digit3(-1);
    pub const ZERO: Digit3 = Digit3(0);
    pub const POS: Digit3 = Digit3(1);
}

pub fn flip(d: Digit3) -> Digit3 {
    Digit3(-d.0)
}

pub fn add3(a: Digit3, b: Digit3) -> Digit5 {
    Digit5(a.0 + b.0)
}

pub fn add5(a: Digit5, b: Digit5) -> Digit9 {
    Digit9(a.0 + b.0)
}
