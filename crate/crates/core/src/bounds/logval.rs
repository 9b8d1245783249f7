//! Log-domain arithmetic for the a-priori constants.
//!
//! Several closed-form constants are exponentials of very large arguments
//! and overflow f64 by astronomical margins for ordinary parameter values.
//! `PosVal` carries a nonnegative real as its natural log, so products, sums
//! and powers stay exact-in-structure; callers read back `value()` when it is
//! representable and `log10()` always.

use std::ops::{Add, Div, Mul};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosVal {
    ln: f64,
}

/// Shorthand constructor.
pub fn pv(v: f64) -> PosVal {
    PosVal::from_value(v)
}

impl PosVal {
    pub const ZERO: PosVal = PosVal { ln: f64::NEG_INFINITY };
    pub const ONE: PosVal = PosVal { ln: 0.0 };

    pub fn from_value(v: f64) -> PosVal {
        debug_assert!(v >= 0.0, "PosVal requires nonnegative input, got {v}");
        PosVal { ln: v.ln() }
    }

    pub fn from_ln(ln: f64) -> PosVal {
        PosVal { ln }
    }

    /// exp(arg) without forming the argument's exponential in f64.
    pub fn exp_of(arg: f64) -> PosVal {
        PosVal { ln: arg }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// May be `inf` when the value exceeds the f64 range.
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    pub fn overflows(&self) -> bool {
        !self.value().is_finite() && !self.ln.is_infinite() || self.ln == f64::INFINITY
    }

    pub fn powf(&self, e: f64) -> PosVal {
        if self.is_zero() {
            if e > 0.0 {
                return PosVal::ZERO;
            }
            if e == 0.0 {
                return PosVal::ONE;
            }
        }
        PosVal { ln: self.ln * e }
    }

    pub fn powi(&self, e: i32) -> PosVal {
        self.powf(e as f64)
    }

    pub fn recip(&self) -> PosVal {
        PosVal { ln: -self.ln }
    }

    pub fn max(&self, other: PosVal) -> PosVal {
        if self.ln >= other.ln {
            *self
        } else {
            other
        }
    }

    /// Ratio `self / other` as an f64, resolving overflow pairs in log space.
    pub fn ratio(&self, other: PosVal) -> f64 {
        (self.ln - other.ln).exp()
    }

    pub fn gt(&self, other: PosVal) -> bool {
        self.ln > other.ln
    }
}

impl Mul for PosVal {
    type Output = PosVal;
    fn mul(self, rhs: PosVal) -> PosVal {
        if self.is_zero() || rhs.is_zero() {
            return PosVal::ZERO;
        }
        PosVal { ln: self.ln + rhs.ln }
    }
}

impl Div for PosVal {
    type Output = PosVal;
    #[allow(clippy::suspicious_arithmetic_impl)] // log-domain: division subtracts logs
    fn div(self, rhs: PosVal) -> PosVal {
        if self.is_zero() {
            return PosVal::ZERO;
        }
        PosVal { ln: self.ln - rhs.ln }
    }
}

impl Add for PosVal {
    type Output = PosVal;
    fn add(self, rhs: PosVal) -> PosVal {
        // log-sum-exp with the larger exponent factored out
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return PosVal { ln: hi };
        }
        PosVal { ln: hi + (lo - hi).exp().ln_1p() }
    }
}

impl Mul<PosVal> for f64 {
    type Output = PosVal;
    fn mul(self, rhs: PosVal) -> PosVal {
        pv(self) * rhs
    }
}

impl Mul<f64> for PosVal {
    type Output = PosVal;
    fn mul(self, rhs: f64) -> PosVal {
        self * pv(rhs)
    }
}

impl Div<f64> for PosVal {
    type Output = PosVal;
    fn div(self, rhs: f64) -> PosVal {
        self / pv(rhs)
    }
}

impl Div<PosVal> for f64 {
    type Output = PosVal;
    fn div(self, rhs: PosVal) -> PosVal {
        pv(self) / rhs
    }
}

impl Add<f64> for PosVal {
    type Output = PosVal;
    fn add(self, rhs: f64) -> PosVal {
        self + pv(rhs)
    }
}

impl Add<PosVal> for f64 {
    type Output = PosVal;
    fn add(self, rhs: PosVal) -> PosVal {
        pv(self) + rhs
    }
}
