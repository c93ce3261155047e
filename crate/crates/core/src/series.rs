//! Truncated power series `c_0 + c_1 π + … + c_D π^D + (tail)`.
//!
//! Every known coefficient carries its own precision. The unknown part
//! beyond degree `D` is described by a [`Tail`]: either exactly zero (the
//! series is a polynomial) or a valuation bound `base - order * ⌊log_p n⌋`
//! for every `n > D`. Operations that pull high-degree information down
//! (substitutions with a nonzero constant, `ψ`, evaluation) use the bound to
//! cap the precision of the affected coefficients, so a coefficient that
//! reports `k` digits really is known to `k` digits.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{binomial, binomial_int, PadicCtx, PadicScalar, EXACT};
use crate::ring::Coefficient;

/// Knowledge about the coefficients beyond the truncation degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tail {
    /// All coefficients beyond `D` vanish.
    Exact,
    /// `v(c_n) ≥ base - order * ⌊log_p n⌋` for `n > D`.
    Bounded { base: i64, order: i64 },
}

impl Tail {
    pub fn integral() -> Self {
        Tail::Bounded { base: 0, order: 0 }
    }

    /// Lower bound for the valuation of coefficient `n` (assumed `> D`).
    pub fn at(&self, ctx: &PadicCtx, n: u64) -> i64 {
        match *self {
            Tail::Exact => EXACT,
            Tail::Bounded { base, order } => base - order * ctx.flog(n.max(1)) as i64,
        }
    }

    pub fn join(self, o: Tail) -> Tail {
        match (self, o) {
            (Tail::Exact, t) | (t, Tail::Exact) => t,
            (Tail::Bounded { base: b1, order: o1 }, Tail::Bounded { base: b2, order: o2 }) => {
                Tail::Bounded { base: b1.min(b2), order: o1.max(o2) }
            }
        }
    }

    pub fn shift(self, dv: i64) -> Tail {
        match self {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, order } => Tail::Bounded { base: base + dv, order },
        }
    }

    fn base_or(&self, v: i64) -> i64 {
        match *self {
            Tail::Exact => v,
            Tail::Bounded { base, .. } => base.min(v),
        }
    }

    fn order(&self) -> i64 {
        match *self {
            Tail::Exact => 0,
            Tail::Bounded { order, .. } => order,
        }
    }

    /// `min_{n > d} (tail(n) + weight(n))`, for a nondecreasing `weight`.
    pub fn cap(&self, ctx: &PadicCtx, d: usize, weight: impl Fn(u64) -> i64) -> i64 {
        if let Tail::Exact = self {
            return EXACT;
        }
        let start = d as u64 + 1;
        let stop = start * 8 + 512;
        let mut best = i64::MAX;
        let mut n = start;
        while n <= stop {
            let v = self.at(ctx, n).saturating_add(weight(n));
            best = best.min(v);
            n += 1;
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries<C: Coefficient> {
    coeffs: Vec<C>,
    tail: Tail,
}

impl<C: Coefficient + Serialize> Serialize for TruncSeries<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("TruncSeries", 3)?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.serialize_field("tail", &self.tail)?;
        st.end()
    }
}

/// Series with `p`-adic scalar coefficients.
pub type Series = TruncSeries<PadicScalar>;

type MatrixCache = Mutex<HashMap<(u32, u32, usize, String), Arc<SubstMatrix>>>;

fn matrix_cache() -> &'static MatrixCache {
    static CACHE: OnceLock<MatrixCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Columns `m ↦ s(π)^m mod π^{D+1}` of a substitution with `s(0) = 0`.
#[derive(Debug)]
pub struct SubstMatrix {
    cols: Vec<Vec<PadicScalar>>,
    poly_degree: Option<usize>,
}

impl SubstMatrix {
    fn build(s: &Series, poly_degree: Option<usize>) -> Self {
        let d = s.degree();
        let ctx = s.ctx();
        let mut cols = Vec::with_capacity(d + 1);
        let mut power = Series::one(ctx, d);
        for _ in 0..=d {
            cols.push(power.coeffs.clone());
            power = power.mul_known(s);
        }
        SubstMatrix { cols, poly_degree }
    }

    fn cached(ctx: &'static PadicCtx, d: usize, key: String, make: impl FnOnce() -> SubstMatrix) -> Arc<SubstMatrix> {
        let k = (ctx.p(), ctx.prec(), d, key);
        if let Some(m) = matrix_cache().lock().expect("cache poisoned").get(&k) {
            return m.clone();
        }
        let m = Arc::new(make());
        matrix_cache().lock().expect("cache poisoned").insert(k, m.clone());
        m
    }

    /// Entry `[π^k] s^m`.
    pub fn entry(&self, k: usize, m: usize) -> &PadicScalar {
        &self.cols[m][k]
    }

    /// `φ`: `π ↦ (1+π)^p - 1`.
    pub fn phi(ctx: &'static PadicCtx, d: usize) -> Arc<SubstMatrix> {
        Self::cached(ctx, d, "phi".into(), || {
            let s = Series::one_plus_pi_pow_int(ctx, d, ctx.p() as i64).sub(&Series::one(ctx, d));
            SubstMatrix::build(&s, Some(ctx.p() as usize))
        })
    }

    /// `π ↦ (1+π)^c - 1` for a unit `c`.
    pub fn gamma(c: &PadicScalar, d: usize) -> Arc<SubstMatrix> {
        let ctx = c.ctx();
        let key = format!("gamma:{:?}:{:?}", c.valuation(), c.digits());
        Self::cached(ctx, d, key, || {
            let s = Series::one_plus_pi_pow(c, d).sub(&Series::one(ctx, d));
            let deg = small_integer(c).filter(|&k| k > 0).map(|k| k as usize);
            SubstMatrix::build(&s, deg)
        })
    }

    /// `π ↦ (1+π)^{-1} - 1`.
    pub fn inversion(ctx: &'static PadicCtx, d: usize) -> Arc<SubstMatrix> {
        Self::cached(ctx, d, "inv".into(), || {
            let s = Series::one_plus_pi_pow_int(ctx, d, -1).sub(&Series::one(ctx, d));
            SubstMatrix::build(&s, None)
        })
    }

    /// Apply to a series: `f(s(π))`.
    pub fn apply<C: Coefficient>(&self, f: &TruncSeries<C>) -> TruncSeries<C> {
        let d = f.degree();
        assert!(self.cols.len() == d + 1, "substitution matrix has the wrong size");
        let proto = f.coeffs[0].zero_like();
        let mut out = vec![proto; d + 1];
        for (m, c) in f.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate().skip(m) {
                let e = &self.cols[m][k];
                if e.is_exact_zero() {
                    continue;
                }
                *slot = slot.add(&c.scale(e));
            }
        }
        let tail = match (f.tail, self.poly_degree, f.poly_degree()) {
            (Tail::Exact, Some(sd), Some(fd)) if sd * fd <= d => Tail::Exact,
            (t, _, _) => Tail::Bounded { base: t.base_or(f.known_vmin()), order: t.order() },
        };
        TruncSeries { coeffs: out, tail }
    }
}

impl Series {
    pub fn zero(ctx: &'static PadicCtx, d: usize) -> Self {
        TruncSeries { coeffs: vec![PadicScalar::zero(ctx); d + 1], tail: Tail::Exact }
    }

    pub fn one(ctx: &'static PadicCtx, d: usize) -> Self {
        Self::constant(&PadicScalar::one(ctx), d)
    }

    /// `π`.
    pub fn pi(ctx: &'static PadicCtx, d: usize) -> Self {
        TruncSeries::pi_like(&PadicScalar::zero(ctx), d)
    }

    /// Exact polynomial from integer coefficients.
    pub fn from_i64s(ctx: &'static PadicCtx, d: usize, coeffs: &[i64]) -> Self {
        let v: Vec<PadicScalar> = coeffs.iter().map(|&c| PadicScalar::from_i64(ctx, c)).collect();
        TruncSeries::from_poly(&PadicScalar::zero(ctx), v, d)
    }

    /// `(1+π)^a` for an integer `a` (exact when `0 ≤ a ≤ D`).
    pub fn one_plus_pi_pow_int(ctx: &'static PadicCtx, d: usize, a: i64) -> Self {
        let coeffs = (0..=d).map(|k| PadicScalar::from_bigint(ctx, &binomial_int(a, k))).collect();
        let tail = if a >= 0 && a as usize <= d { Tail::Exact } else { Tail::integral() };
        TruncSeries { coeffs, tail }
    }

    /// `(1+π)^a` for `a ∈ Z_p`.
    pub fn one_plus_pi_pow(a: &PadicScalar, d: usize) -> Self {
        let ctx = a.ctx();
        if let Some(k) = small_integer(a) {
            return Self::one_plus_pi_pow_int(ctx, d, k);
        }
        let coeffs = (0..=d).map(|k| binomial(a, k)).collect();
        TruncSeries { coeffs, tail: Tail::integral() }
    }

    /// `t = log(1+π)`.
    pub fn log1p(ctx: &'static PadicCtx, d: usize) -> Self {
        let mut coeffs = vec![PadicScalar::zero(ctx); d + 1];
        for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
            let v = PadicScalar::from_i64(ctx, 1).div_i64(k as i64);
            *slot = if k % 2 == 1 { v } else { v.neg() };
        }
        TruncSeries { coeffs, tail: Tail::Bounded { base: 0, order: 1 } }
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.coeffs[0].ctx()
    }
}

impl<C: Coefficient> TruncSeries<C> {
    /// Raw constructor.
    pub fn new(coeffs: Vec<C>, tail: Tail) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        TruncSeries { coeffs, tail }
    }

    /// Polynomial with the given coefficients, truncated to degree `d`; any
    /// coefficients past `d` feed the tail bound.
    pub fn from_poly(proto: &C, mut coeffs: Vec<C>, d: usize) -> Self {
        let tail = if coeffs.len() > d + 1 {
            let extra = coeffs.split_off(d + 1);
            let v = extra.iter().map(|c| c.val_bound()).min().unwrap_or(EXACT);
            if v >= EXACT {
                Tail::Exact
            } else {
                Tail::Bounded { base: v, order: 0 }
            }
        } else {
            Tail::Exact
        };
        coeffs.resize(d + 1, proto.zero_like());
        TruncSeries { coeffs, tail }
    }

    pub fn constant(c: &C, d: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); d + 1];
        coeffs[0] = c.clone();
        TruncSeries { coeffs, tail: Tail::Exact }
    }

    pub fn pi_like(proto: &C, d: usize) -> Self {
        let mut coeffs = vec![proto.zero_like(); d + 1];
        if d >= 1 {
            coeffs[1] = proto.one_like();
        }
        let tail = if d >= 1 { Tail::Exact } else { Tail::integral() };
        TruncSeries { coeffs, tail }
    }

    /// Lifts a scalar series into another coefficient ring.
    pub fn from_scalars(proto: &C, s: &Series) -> Self {
        TruncSeries { coeffs: s.coeffs.iter().map(|c| proto.from_scalar_like(c)).collect(), tail: s.tail }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &C {
        &self.coeffs[i]
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn padic_ctx(&self) -> &'static PadicCtx {
        self.coeffs[0].padic_ctx()
    }

    /// Degree of the polynomial when the tail is exact.
    pub fn poly_degree(&self) -> Option<usize> {
        match self.tail {
            Tail::Exact => Some(self.coeffs.iter().rposition(|c| !c.is_exact_zero()).unwrap_or(0)),
            Tail::Bounded { .. } => None,
        }
    }

    fn known_vmin(&self) -> i64 {
        self.coeffs.iter().map(|c| c.val_bound()).min().unwrap_or(EXACT)
    }

    /// Lower bound for the valuation of every coefficient up to index `n`.
    fn floor_upto(&self, n: u64) -> i64 {
        let v = self.known_vmin();
        match self.tail {
            Tail::Exact => v,
            Tail::Bounded { .. } => v.min(self.tail.at(self.padic_ctx(), n.max(self.coeffs.len() as u64))),
        }
    }

    /// All known coefficients vanish at their precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_zero_upto(&self, deg: usize) -> bool {
        self.coeffs.iter().take(deg + 1).all(|c| c.is_zero())
    }

    /// Digits of agreement over the coefficients `0..=deg`.
    pub fn agree_upto(&self, o: &Self, deg: usize) -> i64 {
        self.coeffs.iter().zip(&o.coeffs).take(deg + 1).map(|(a, b)| a.agree(b)).min().unwrap_or(EXACT)
    }

    pub fn agree(&self, o: &Self) -> i64 {
        self.agree_upto(o, self.degree().min(o.degree()))
    }

    /// Minimal absolute precision over the coefficients `0..=deg`.
    pub fn precision_upto(&self, deg: usize) -> i64 {
        self.coeffs.iter().take(deg + 1).map(|c| c.abs_prec()).min().unwrap_or(EXACT)
    }

    /// Changes the truncation degree.
    pub fn with_degree(&self, d: usize) -> Self {
        let proto = self.coeffs[0].zero_like();
        if d < self.coeffs.len() {
            let extra = &self.coeffs[d + 1..];
            let ev = extra.iter().map(|c| c.val_bound()).min().unwrap_or(EXACT);
            let tail = if ev >= EXACT && self.tail == Tail::Exact {
                Tail::Exact
            } else {
                Tail::Bounded { base: self.tail.base_or(ev), order: self.tail.order() }
            };
            TruncSeries { coeffs: self.coeffs[..=d].to_vec(), tail }
        } else {
            let mut coeffs = self.coeffs.clone();
            let old = self.degree();
            for n in old + 1..=d {
                let c = match self.tail {
                    Tail::Exact => proto.clone(),
                    t => proto.cap_abs(t.at(self.padic_ctx(), n as u64)),
                };
                coeffs.push(c);
            }
            TruncSeries { coeffs, tail: self.tail }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "truncation degrees differ");
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect();
        TruncSeries { coeffs, tail: self.tail.join(o.tail) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), tail: self.tail }
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        let tail = self.tail.shift(s.val_bound());
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(), tail }
    }

    pub fn scale_coeff(&self, s: &C) -> Self {
        let tail = self.tail.shift(s.val_bound());
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect(), tail }
    }

    fn mul_known(&self, o: &Self) -> Self {
        let d = self.degree();
        let mut out = vec![self.coeffs[0].zero_like(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(d + 1 - i).enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TruncSeries { coeffs: out, tail: self.tail }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "truncation degrees differ");
        let d = self.degree();
        let mut r = self.mul_known(o);
        r.tail = match (self.poly_degree(), o.poly_degree()) {
            (Some(a), Some(b)) if a + b <= d => Tail::Exact,
            _ => {
                let base = self.tail.base_or(self.known_vmin()) + o.tail.base_or(o.known_vmin());
                Tail::Bounded { base, order: self.tail.order() + o.tail.order() }
            }
        };
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TruncSeries::constant(&self.coeffs[0].one_like(), self.degree());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse of a series with unit constant term and
    /// integral coefficients.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.val_bound() != 0 || c0.is_zero() {
            return Err(Error::NonUnitConstant);
        }
        if self.floor_upto(self.coeffs.len() as u64) < 0 || self.tail.order() > 0 {
            return Err(Error::InsufficientTruncation("inverse needs an integral series".into()));
        }
        let d = self.degree();
        let inv0 = c0.inv()?;
        let mut out = vec![c0.zero_like(); d + 1];
        out[0] = inv0.clone();
        for n in 1..=d {
            let mut acc = c0.zero_like();
            for k in 1..=n {
                if !self.coeffs[k].is_exact_zero() {
                    acc = acc.add(&self.coeffs[k].mul(&out[n - k]));
                }
            }
            out[n] = acc.neg().mul(&inv0);
        }
        let tail = if self.poly_degree() == Some(0) { Tail::Exact } else { Tail::integral() };
        Ok(TruncSeries { coeffs: out, tail })
    }

    /// Plain derivative `d/dπ`.
    pub fn d_dpi(&self) -> Self {
        let d = self.degree();
        let ctx = self.padic_ctx();
        let mut out = Vec::with_capacity(d + 1);
        for n in 0..d {
            out.push(self.coeffs[n + 1].scale(&PadicScalar::from_i64(ctx, n as i64 + 1)));
        }
        let top = self.tail.at(ctx, d as u64 + 1).saturating_add(ctx.val_i64(d as i64 + 1) as i64);
        out.push(self.coeffs[0].zero_like().cap_abs(top));
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, order } => Tail::Bounded { base: base - order, order },
        };
        TruncSeries { coeffs: out, tail }
    }

    /// `∂ = (1+π) d/dπ`; the top coefficient is capped by the tail.
    pub fn deriv(&self) -> Self {
        let d = self.degree();
        let ctx = self.padic_ctx();
        let mut out = Vec::with_capacity(d + 1);
        for n in 0..=d {
            let mut c = self.coeffs[n].scale(&PadicScalar::from_i64(ctx, n as i64));
            if n < d {
                c = c.add(&self.coeffs[n + 1].scale(&PadicScalar::from_i64(ctx, n as i64 + 1)));
            } else if self.tail != Tail::Exact {
                let top = self.tail.at(ctx, d as u64 + 1) + ctx.val_i64(d as i64 + 1) as i64;
                c = c.cap_abs(top);
            }
            out.push(c);
        }
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, order } => Tail::Bounded { base: base - order, order },
        };
        TruncSeries { coeffs: out, tail }
    }

    /// `f(s(π))` for an integral `s` with zero constant term.
    pub fn compose(&self, s: &Series) -> Result<Self> {
        if !s.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("substituted series must have zero constant term".into()));
        }
        if s.floor_upto(s.coeffs.len() as u64) < 0 || s.tail.order() > 0 {
            return Err(Error::InvalidArgument("substituted series must be integral".into()));
        }
        let m = SubstMatrix::build(s, s.poly_degree());
        Ok(m.apply(self))
    }

    /// `f(a + b π)` for `v(a) > 0` and a unit `b`. Coefficient `m` is
    /// capped by the contribution of the unknown tail.
    pub fn compose_affine(&self, a: &PadicScalar, b: &PadicScalar) -> Self {
        let d = self.degree();
        let ctx = self.padic_ctx();
        let va = a.val_bound();
        assert!(va > 0, "affine substitution needs v(a) > 0");
        assert!(b.val_bound() == 0, "affine substitution needs a unit slope");
        let mat = affine_matrix(a, b, d);
        let mut out = Vec::with_capacity(d + 1);
        for m in 0..=d {
            let mut c = self.coeffs[0].zero_like();
            for n in m..=d {
                if !self.coeffs[n].is_exact_zero() {
                    c = c.add(&self.coeffs[n].scale(&mat[m][n - m]));
                }
            }
            let cap = self.tail.cap(ctx, d, |n| (n as i64 - m as i64) * va);
            out.push(c.cap_abs(cap));
        }
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            Tail::Bounded { base, order } => Tail::Bounded { base: base - order, order },
        };
        TruncSeries { coeffs: out, tail }
    }

    /// `f(x)` for `x` whose powers satisfy `val(x^n) ≥ growth(n)`.
    pub fn eval(&self, x: &C, growth: impl Fn(u64) -> i64) -> C {
        let d = self.degree();
        let mut acc = self.coeffs[d].clone();
        for n in (0..d).rev() {
            acc = acc.mul(x).add(&self.coeffs[n]);
        }
        let cap = self.tail.cap(self.padic_ctx(), d, growth);
        acc.cap_abs(cap)
    }

    /// `k`-th Taylor coefficient at `x`: `Σ_n c_n C(n,k) x^{n-k}`.
    pub fn taylor_at(&self, x: &C, k: usize, growth: impl Fn(u64) -> i64) -> C {
        let d = self.degree();
        let ctx = self.padic_ctx();
        if k > d {
            let cap = self.tail.cap(ctx, d, |n| growth(n.saturating_sub(k as u64)));
            return self.coeffs[0].zero_like().cap_abs(cap);
        }
        let mut acc = self.coeffs[0].zero_like();
        for n in (k..=d).rev() {
            let b = PadicScalar::from_bigint(ctx, &binomial_int(n as i64, k));
            acc = acc.mul(x).add(&self.coeffs[n].scale(&b));
        }
        let cap = self.tail.cap(ctx, d, |n| growth(n - k as u64));
        acc.cap_abs(cap)
    }

    /// `φ(f) = f((1+π)^p - 1)`.
    pub fn phi(&self) -> Self {
        SubstMatrix::phi(self.padic_ctx(), self.degree()).apply(self)
    }

    /// `f((1+π)^c - 1)`.
    pub fn gamma_action(&self, c: &PadicScalar) -> Result<Self> {
        if c.valuation() != Some(0) {
            return Err(Error::InvalidArgument("gamma action needs a unit".into()));
        }
        Ok(SubstMatrix::gamma(c, self.degree()).apply(self))
    }

    /// `ψ`, via the binomial basis `(1+π)^i`; coefficients that depend on
    /// the unknown tail are capped using `ψ(π^m) ∈ (π, p)^{⌊m/p⌋}`.
    pub fn psi(&self) -> Self {
        let d = self.degree();
        let ctx = self.padic_ctx();
        let p = ctx.p() as usize;
        let zero = self.coeffs[0].zero_like();
        let mut kept = Vec::new();
        let mut i = 0;
        while i <= d {
            let mut b = zero.clone();
            for k in i..=d {
                if self.coeffs[k].is_exact_zero() {
                    continue;
                }
                let mut c = binomial_int(k as i64, i);
                if (k - i) % 2 == 1 {
                    c = -c;
                }
                b = b.add(&self.coeffs[k].scale(&PadicScalar::from_bigint(ctx, &c)));
            }
            kept.push(b);
            i += p;
        }
        let mut out = vec![zero.clone(); d + 1];
        for (j, b) in kept.iter().enumerate() {
            if b.is_exact_zero() {
                continue;
            }
            for (l, slot) in out.iter_mut().enumerate().take(j + 1) {
                let c = PadicScalar::from_bigint(ctx, &binomial_int(j as i64, l));
                *slot = slot.add(&b.scale(&c));
            }
        }
        if self.tail != Tail::Exact {
            for (l, slot) in out.iter_mut().enumerate() {
                let cap = self.tail.cap(ctx, d, |m| ((m as i64) / p as i64 - l as i64).max(0));
                *slot = slot.cap_abs(cap);
            }
        }
        let tail = match self.tail {
            Tail::Exact => Tail::Exact,
            t => Tail::Bounded { base: t.base_or(self.known_vmin()), order: t.order() },
        };
        TruncSeries { coeffs: out, tail }
    }

    /// `(t∂ - j) f`.
    pub fn ell_apply(&self, j: i64) -> Self {
        let ctx = self.padic_ctx();
        let t = TruncSeries::from_scalars(&self.coeffs[0], &Series::log1p(ctx, self.degree()));
        t.mul(&self.deriv()).sub(&self.scale(&PadicScalar::from_i64(ctx, j)))
    }

    /// `Σ_{n≥0} φ^n(x)` for `x` with zero constant term, iterated until a
    /// full pass adds nothing at the attained precision (at most `4N`
    /// passes).
    pub fn solve_one_minus_phi(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if !c0.is_zero() {
            return Err(Error::Nonconvergent(format!("{c0:?}")));
        }
        let ctx = self.padic_ctx();
        let cap = 4 * ctx.prec() as usize;
        let mut sum = self.clone();
        let mut term = self.clone();
        for _ in 0..cap {
            term = term.phi();
            let negligible = term.coeffs.iter().zip(&sum.coeffs).all(|(t, s)| t.val_bound() >= s.abs_prec());
            sum = sum.add(&term);
            if negligible {
                return Ok(sum);
            }
        }
        Err(Error::Nonconvergent("pass cap reached".into()))
    }

    /// Solves `(1 - λφ) Y = F` by back-substitution on coefficients.
    ///
    /// At an index `k` with `λ p^k = 1` the equation degenerates; the
    /// residual there must vanish and `Y_k` is set to zero. The offending
    /// indices are returned as an error when a residual does not vanish.
    pub fn solve_one_minus_lambda_phi(&self, lambda: &PadicScalar) -> Result<Self> {
        let d = self.degree();
        let ctx = self.padic_ctx();
        let phi = SubstMatrix::phi(ctx, d);
        let zero = self.coeffs[0].zero_like();
        let mut y: Vec<C> = Vec::with_capacity(d + 1);
        let mut bad = Vec::new();
        for k in 0..=d {
            let mut rhs = self.coeffs[k].clone();
            let mut acc = zero.clone();
            for (m, ym) in y.iter().enumerate() {
                let e = phi.entry(k, m);
                if !e.is_exact_zero() && !ym.is_exact_zero() {
                    acc = acc.add(&ym.scale(e));
                }
            }
            rhs = rhs.add(&acc.scale(lambda));
            let factor = PadicScalar::one(ctx).sub(&lambda.mul(&PadicScalar::p_power(ctx, k as i64)));
            if factor.is_zero() {
                if !rhs.is_zero() {
                    bad.push(k);
                }
                y.push(zero.clone());
            } else {
                y.push(rhs.scale(&factor.inv()?));
            }
        }
        if !bad.is_empty() {
            return Err(Error::DeltaObstruction(bad));
        }
        let tail = match self.tail {
            Tail::Exact => Tail::Bounded { base: 0.min(TruncSeries { coeffs: y.clone(), tail: Tail::Exact }.known_vmin()), order: 0 },
            t => Tail::Bounded { base: t.base_or(0), order: t.order() },
        };
        Ok(TruncSeries { coeffs: y, tail })
    }

    /// Caps every coefficient's absolute precision.
    pub fn cap_abs(&self, abs: i64) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c.cap_abs(abs)).collect(), tail: self.tail }
    }

    /// Replaces the tail description.
    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Maps the coefficients through a ring map.
    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        TruncSeries { coeffs: self.coeffs.iter().map(f).collect(), tail: self.tail }
    }
}

/// The integer `k` with `|k| ≤ 10^6` represented by `a`, if any.
fn small_integer(a: &PadicScalar) -> Option<i64> {
    if a.val_bound() < 0 {
        return None;
    }
    let prec = a.abs_prec().clamp(1, a.ctx().prec() as i64) as u32;
    let k = i64::try_from(a.to_bigint_sym(prec)).ok()?;
    (k.abs() <= 1_000_000).then_some(k)
}

type AffineCache = Mutex<HashMap<(u32, u32, usize, String), Arc<Vec<Vec<PadicScalar>>>>>;

/// Rows `m ↦ (C(n, m) a^{n-m} b^m)_{n ≥ m}`.
fn affine_matrix(a: &PadicScalar, b: &PadicScalar, d: usize) -> Arc<Vec<Vec<PadicScalar>>> {
    static CACHE: OnceLock<AffineCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let ctx = a.ctx();
    let key = (ctx.p(), ctx.prec(), d, format!("{a:?}|{b:?}"));
    if let Some(m) = cache.lock().expect("cache poisoned").get(&key) {
        return m.clone();
    }
    let mut apow = Vec::with_capacity(d + 1);
    let mut bpow = Vec::with_capacity(d + 1);
    let (mut x, mut y) = (PadicScalar::one(ctx), PadicScalar::one(ctx));
    for _ in 0..=d {
        apow.push(x.clone());
        bpow.push(y.clone());
        x = x.mul(a);
        y = y.mul(b);
    }
    let rows: Vec<Vec<PadicScalar>> = (0..=d)
        .map(|m| {
            (m..=d)
                .map(|n| PadicScalar::from_bigint(ctx, &binomial_int(n as i64, m)).mul(&apow[n - m]).mul(&bpow[m]))
                .collect()
        })
        .collect();
    let rows = Arc::new(rows);
    cache.lock().expect("cache poisoned").insert(key, rows.clone());
    rows
}
