//! The coefficient interface shared by scalars, cyclotomic and unramified
//! elements, so that truncated series can be built over any of them.

use crate::padic::{PadicCtx, PadicScalar};

pub trait Coefficient: Clone + std::fmt::Debug + Send + Sync + 'static {
    fn padic_ctx(&self) -> &'static PadicCtx;
    /// Exact zero of the same shape.
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_scalar_like(&self, s: &PadicScalar) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, s: &PadicScalar) -> Self;
    fn is_exact_zero(&self) -> bool;
    /// Indistinguishable from zero at the tracked precision.
    fn is_zero(&self) -> bool;
    /// Lower bound for the valuation of every coordinate.
    fn val_bound(&self) -> i64;
    fn cap_abs(&self, abs: i64) -> Self;
    /// Minimal absolute precision over the coordinates.
    fn abs_prec(&self) -> i64;
    fn inv(&self) -> crate::error::Result<Self>;
    /// Digits of agreement with `o`.
    fn agree(&self, o: &Self) -> i64;
}

impl Coefficient for PadicScalar {
    fn padic_ctx(&self) -> &'static PadicCtx {
        self.ctx()
    }
    fn zero_like(&self) -> Self {
        PadicScalar::zero(self.ctx())
    }
    fn one_like(&self) -> Self {
        PadicScalar::one(self.ctx())
    }
    fn from_scalar_like(&self, s: &PadicScalar) -> Self {
        s.clone()
    }
    fn add(&self, o: &Self) -> Self {
        PadicScalar::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicScalar::sub(self, o)
    }
    fn neg(&self) -> Self {
        PadicScalar::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicScalar::mul(self, o)
    }
    fn scale(&self, s: &PadicScalar) -> Self {
        PadicScalar::mul(self, s)
    }
    fn is_exact_zero(&self) -> bool {
        PadicScalar::is_exact_zero(self)
    }
    fn is_zero(&self) -> bool {
        PadicScalar::is_zero(self)
    }
    fn val_bound(&self) -> i64 {
        PadicScalar::val_bound(self)
    }
    fn cap_abs(&self, abs: i64) -> Self {
        PadicScalar::cap_abs(self, abs)
    }
    fn abs_prec(&self) -> i64 {
        PadicScalar::abs_prec(self)
    }
    fn inv(&self) -> crate::error::Result<Self> {
        PadicScalar::inv(self)
    }
    fn agree(&self, o: &Self) -> i64 {
        PadicScalar::agree(self, o)
    }
}
