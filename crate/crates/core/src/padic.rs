//! Fixed-precision p-adic numbers.
//!
//! A [`PadicScalar`] is `p^val * unit` with `unit` known modulo `p^rel`.
//! Every operation propagates the number of digits it can vouch for, so the
//! relative precision field doubles as the loss ledger: dividing by `p^k`
//! keeps the relative precision but lowers the absolute precision by `k`,
//! cancellation in a sum lowers the relative precision, and so on.
//!
//! A value whose unit part cannot be distinguished from zero is stored with
//! `rel == 0` and `val` equal to its absolute precision. Integers and other
//! exact inputs that are genuinely zero use the [`EXACT`] sentinel.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute precision of an exactly known zero.
pub const EXACT: i64 = i64::MAX / 4;

/// Shared, immutable per-`(p, N)` data.
#[derive(Debug)]
pub struct PadicCtx {
    p: u32,
    prec: u32,
    powers: Vec<BigUint>,
}

type Registry = Mutex<HashMap<(u32, u32), &'static PadicCtx>>;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PadicCtx {
    /// Interned context for the odd prime `p` and default precision `prec`.
    pub fn get(p: u32, prec: u32) -> Result<&'static PadicCtx> {
        if p < 3 || !is_prime(p as u64) {
            return Err(Error::InvalidPrime(p));
        }
        if prec == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        let mut reg = registry().lock().expect("context registry poisoned");
        if let Some(ctx) = reg.get(&(p, prec)) {
            return Ok(ctx);
        }
        let top = 4 * prec as usize + 96;
        let mut powers = Vec::with_capacity(top + 1);
        let mut acc = BigUint::one();
        for _ in 0..=top {
            powers.push(acc.clone());
            acc *= p;
        }
        let ctx: &'static PadicCtx = Box::leak(Box::new(PadicCtx { p, prec, powers }));
        reg.insert((p, prec), ctx);
        Ok(ctx)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Default relative precision `N` for newly created values.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `p^k`.
    pub fn pow(&self, k: u32) -> BigUint {
        match self.powers.get(k as usize) {
            Some(v) => v.clone(),
            None => BigUint::from(self.p).pow(k),
        }
    }

    fn pow_ref(&self, k: u32) -> std::borrow::Cow<'_, BigUint> {
        match self.powers.get(k as usize) {
            Some(v) => std::borrow::Cow::Borrowed(v),
            None => std::borrow::Cow::Owned(BigUint::from(self.p).pow(k)),
        }
    }

    /// p-adic valuation of a nonzero machine integer.
    pub fn val_i64(&self, n: i64) -> u32 {
        assert!(n != 0, "valuation of zero");
        let mut n = n.unsigned_abs();
        let p = self.p as u64;
        let mut v = 0;
        while n.is_multiple_of(p) {
            n /= p;
            v += 1;
        }
        v
    }

    /// `floor(log_p(n))` for `n >= 1`.
    pub fn flog(&self, n: u64) -> u32 {
        let p = self.p as u64;
        let mut k = 0;
        let mut q = p;
        while q <= n {
            k += 1;
            match q.checked_mul(p) {
                Some(x) => q = x,
                None => break,
            }
        }
        k
    }
}

/// An element of `Q_p` known to a finite number of digits.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicScalar {
    ctx: &'static PadicCtx,
    val: i64,
    rel: u32,
    unit: BigUint,
}

impl PartialEq for PadicCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.prec == other.prec
    }
}
impl Eq for PadicCtx {}

fn strip(ctx: &'static PadicCtx, mut val: i64, mut rel: u32, mut unit: BigUint) -> PadicScalar {
    if rel == 0 {
        return PadicScalar::zero_abs(ctx, val);
    }
    let modulus = ctx.pow_ref(rel);
    if unit >= *modulus {
        unit %= modulus.as_ref();
    }
    if unit.is_zero() {
        return PadicScalar::zero_abs(ctx, val + rel as i64);
    }
    let p = BigUint::from(ctx.p);
    loop {
        let (q, r) = unit.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        unit = q;
        val += 1;
        rel -= 1;
    }
    PadicScalar { ctx, val, rel, unit }
}

fn reduce_signed(ctx: &'static PadicCtx, n: &BigInt, rel: u32) -> BigUint {
    let m = BigInt::from(ctx.pow(rel));
    let r = n.mod_floor(&m);
    r.to_biguint().expect("nonnegative residue")
}

impl PadicScalar {
    /// Exact zero.
    pub fn zero(ctx: &'static PadicCtx) -> Self {
        PadicScalar { ctx, val: EXACT, rel: 0, unit: BigUint::zero() }
    }

    /// `O(p^abs)`.
    pub fn zero_abs(ctx: &'static PadicCtx, abs: i64) -> Self {
        PadicScalar { ctx, val: abs.min(EXACT), rel: 0, unit: BigUint::zero() }
    }

    pub fn one(ctx: &'static PadicCtx) -> Self {
        Self::from_i64(ctx, 1)
    }

    pub fn from_i64(ctx: &'static PadicCtx, n: i64) -> Self {
        Self::from_i64_prec(ctx, n, ctx.prec)
    }

    pub fn from_i64_prec(ctx: &'static PadicCtx, n: i64, rel: u32) -> Self {
        if n == 0 {
            return Self::zero(ctx);
        }
        let v = ctx.val_i64(n);
        let mut m = n / (ctx.p as i64).pow(v);
        let modulus = ctx.pow(rel);
        let unit = if m >= 0 {
            BigUint::from(m as u64) % &modulus
        } else {
            m = -m;
            let u = BigUint::from(m as u64) % &modulus;
            if u.is_zero() {
                u
            } else {
                &modulus - u
            }
        };
        strip(ctx, v as i64, rel, unit)
    }

    pub fn from_bigint(ctx: &'static PadicCtx, n: &BigInt) -> Self {
        Self::from_bigint_prec(ctx, n, ctx.prec)
    }

    pub fn from_bigint_prec(ctx: &'static PadicCtx, n: &BigInt, rel: u32) -> Self {
        if n.is_zero() {
            return Self::zero(ctx);
        }
        let p = BigInt::from(ctx.p);
        let mut m = n.clone();
        let mut v = 0i64;
        loop {
            let (q, r) = m.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            m = q;
            v += 1;
        }
        let unit = reduce_signed(ctx, &m, rel);
        strip(ctx, v, rel, unit)
    }

    pub fn from_rational(ctx: &'static PadicCtx, q: &BigRational) -> Self {
        let num = Self::from_bigint(ctx, q.numer());
        let den = Self::from_bigint(ctx, q.denom());
        num.div(&den).expect("rational with zero denominator")
    }

    /// `p^k` exactly (relative precision `N`).
    pub fn p_power(ctx: &'static PadicCtx, k: i64) -> Self {
        PadicScalar { ctx, val: k, rel: ctx.prec, unit: BigUint::one() }
    }

    /// Builds `p^val * unit` from raw parts, reducing and normalising.
    pub fn from_parts(ctx: &'static PadicCtx, val: i64, rel: u32, unit: BigUint) -> Self {
        strip(ctx, val, rel, unit)
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.ctx
    }

    pub fn p(&self) -> u32 {
        self.ctx.p
    }

    /// Valuation, or `None` when the value is indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        if self.rel == 0 {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lower bound for the valuation (the absolute precision for zeros).
    pub fn val_bound(&self) -> i64 {
        self.val
    }

    pub fn rel_prec(&self) -> u32 {
        self.rel
    }

    /// Number of digits after which the value is unknown.
    pub fn abs_prec(&self) -> i64 {
        if self.rel == 0 {
            self.val
        } else {
            self.val + self.rel as i64
        }
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.rel == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rel == 0 && self.val >= EXACT
    }

    /// Flag for values whose unit part has been lost entirely.
    pub fn precision_exhausted(&self) -> bool {
        self.rel == 0 && self.val < EXACT
    }

    /// Lowers the absolute precision to at most `abs`.
    pub fn cap_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        if self.rel == 0 || abs <= self.val {
            return Self::zero_abs(self.ctx, abs.min(self.val));
        }
        let rel = (abs - self.val) as u32;
        strip(self.ctx, self.val, rel, self.unit.clone())
    }

    /// Lowers the relative precision to at most `rel`.
    pub fn cap_rel(&self, rel: u32) -> Self {
        if self.rel <= rel {
            return self.clone();
        }
        strip(self.ctx, self.val, rel, self.unit.clone())
    }

    pub fn neg(&self) -> Self {
        if self.rel == 0 {
            return self.clone();
        }
        let m = self.ctx.pow(self.rel);
        PadicScalar { ctx: self.ctx, val: self.val, rel: self.rel, unit: m - &self.unit }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_exact_zero() {
            return o.clone();
        }
        if o.is_exact_zero() {
            return self.clone();
        }
        let abs = self.abs_prec().min(o.abs_prec());
        if self.rel == 0 {
            return o.cap_abs(abs);
        }
        if o.rel == 0 {
            return self.cap_abs(abs);
        }
        let v = self.val.min(o.val);
        if abs <= v {
            return Self::zero_abs(self.ctx, abs);
        }
        let r = (abs - v) as u32;
        let a = if self.val > v {
            &self.unit * self.ctx.pow_ref((self.val - v) as u32).as_ref()
        } else {
            self.unit.clone()
        };
        let b = if o.val > v {
            &o.unit * o.ctx.pow_ref((o.val - v) as u32).as_ref()
        } else {
            o.unit.clone()
        };
        strip(self.ctx, v, r, a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero(self.ctx);
        }
        if self.rel == 0 || o.rel == 0 {
            return Self::zero_abs(self.ctx, self.val + o.val);
        }
        let rel = self.rel.min(o.rel);
        let m = self.ctx.pow_ref(rel);
        let unit = (&self.unit * &o.unit) % m.as_ref();
        PadicScalar { ctx: self.ctx, val: self.val + o.val, rel, unit }
    }

    /// Multiplication by an exact machine integer.
    pub fn mul_i64(&self, k: i64) -> Self {
        if k == 0 || self.is_exact_zero() {
            return Self::zero(self.ctx);
        }
        let v = self.ctx.val_i64(k) as i64;
        if self.rel == 0 {
            return Self::zero_abs(self.ctx, self.val + v);
        }
        let rest = k / (self.ctx.p as i64).pow(v as u32);
        let m = self.ctx.pow(self.rel);
        let f = reduce_signed(self.ctx, &BigInt::from(rest), self.rel);
        PadicScalar { ctx: self.ctx, val: self.val + v, rel: self.rel, unit: (&self.unit * f) % m }
    }

    /// Division by an exact nonzero machine integer.
    pub fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let kk = Self::from_i64_prec(self.ctx, k, self.rel.max(1));
        self.div(&kk).expect("nonzero divisor")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.rel == 0 {
            return Err(Error::DivisionByZero);
        }
        let m = BigInt::from(self.ctx.pow(self.rel));
        let u = BigInt::from(self.unit.clone());
        let g = u.extended_gcd(&m);
        debug_assert!(g.gcd.is_one());
        let inv = g.x.mod_floor(&m).to_biguint().expect("nonnegative");
        Ok(PadicScalar { ctx: self.ctx, val: -self.val, rel: self.rel, unit: inv })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::from_i64_prec(self.ctx, 1, self.rel.max(self.ctx.prec));
        if self.rel == 0 && e > 0 {
            return Ok(Self::zero_abs(self.ctx, self.val.saturating_mul(e).min(EXACT)));
        }
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Digits of agreement: absolute precision at which `self - o` is zero,
    /// or the valuation of the difference when it is visibly nonzero.
    pub fn agree(&self, o: &Self) -> i64 {
        let d = self.sub(o);
        if d.is_zero() {
            d.abs_prec()
        } else {
            d.val
        }
    }

    /// Residue of an integral value modulo `p`.
    pub fn residue(&self) -> u32 {
        if self.rel == 0 || self.val > 0 {
            return 0;
        }
        assert!(self.val == 0, "residue of a non-integral value");
        (&self.unit % self.ctx.p).to_u32().expect("small")
    }

    /// Integer representative in `[0, p^abs)` of an integral value.
    pub fn to_biguint_mod(&self, abs: u32) -> BigUint {
        if self.rel == 0 || self.val >= abs as i64 {
            return BigUint::zero();
        }
        assert!(self.val >= 0, "value is not integral");
        let m = self.ctx.pow(abs);
        (&self.unit * self.ctx.pow(self.val as u32)) % m
    }

    /// Signed integer representative, symmetric around zero.
    pub fn to_bigint_sym(&self, abs: u32) -> BigInt {
        let r = BigInt::from(self.to_biguint_mod(abs));
        let m = BigInt::from(self.ctx.pow(abs));
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    /// Little-endian base-`p` digits of the unit part.
    pub fn digits(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.rel as usize);
        let mut u = self.unit.clone();
        let p = BigUint::from(self.ctx.p);
        for _ in 0..self.rel {
            let (q, r) = u.div_rem(&p);
            out.push(r.to_u32().unwrap_or(0));
            u = q;
        }
        out
    }

    /// Teichmüller representative of this integral value's residue.
    pub fn teichmuller_of_residue(&self) -> Self {
        teichmuller(self.ctx, self.residue() as i64, self.ctx.prec)
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.rel == 0 {
            return write!(f, "O({}^{})", self.ctx.p, self.val);
        }
        let m = BigInt::from(self.ctx.pow(self.rel));
        let mut u = BigInt::from(self.unit.clone());
        if &u * 2 > m {
            u -= &m;
        }
        if self.val == 0 {
            write!(f, "{} + O({}^{})", u, self.ctx.p, self.abs_prec())
        } else {
            write!(f, "{}^{}*{} + O({}^{})", self.ctx.p, self.val, u, self.ctx.p, self.abs_prec())
        }
    }
}

impl Serialize for PadicScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PadicScalar", 2)?;
        if self.is_exact_zero() {
            st.serialize_field("val", &Option::<i64>::None)?;
        } else {
            st.serialize_field("val", &Some(self.val))?;
        }
        st.serialize_field("digits", &self.digits())?;
        st.end()
    }
}

/// Rebuilds a scalar from its serialized `(val, digits)` form.
pub fn scalar_from_digits(ctx: &'static PadicCtx, val: Option<i64>, digits: &[u32]) -> PadicScalar {
    let Some(val) = val else {
        return PadicScalar::zero(ctx);
    };
    let mut unit = BigUint::zero();
    for d in digits.iter().rev() {
        unit = unit * ctx.p + *d;
    }
    PadicScalar::from_parts(ctx, val, digits.len() as u32, unit)
}

/// Teichmüller lift `ω(a)` at relative precision `prec`: the fixed point of
/// `x ↦ x^p` congruent to `a` modulo `p`.
pub fn teichmuller(ctx: &'static PadicCtx, a: i64, prec: u32) -> PadicScalar {
    let p = ctx.p as i64;
    let r = a.rem_euclid(p);
    if r == 0 {
        return PadicScalar::zero(ctx);
    }
    let m = ctx.pow(prec);
    let mut x = BigUint::from(r as u64);
    let e = BigUint::from(ctx.p);
    loop {
        let y = x.modpow(&e, &m);
        if y == x {
            break;
        }
        x = y;
    }
    PadicScalar::from_parts(ctx, 0, prec, x)
}

/// p-adic logarithm of a principal unit.
pub fn padic_log(u: &PadicScalar) -> Result<PadicScalar> {
    let ctx = u.ctx;
    if u.valuation() != Some(0) || u.residue() != 1 {
        return Err(Error::NotPrincipalUnit);
    }
    let x = u.sub(&PadicScalar::one(ctx));
    let target = u.abs_prec();
    if x.is_zero() {
        return Ok(PadicScalar::zero_abs(ctx, x.abs_prec()));
    }
    let v = x.val;
    let mut sum = PadicScalar::zero(ctx);
    let mut power = x.clone();
    let mut k: i64 = 1;
    loop {
        let term = power.div_i64(k);
        sum = if k % 2 == 1 { sum.add(&term) } else { sum.sub(&term) };
        let next = k + 1;
        if next * v - ctx.flog(next as u64) as i64 >= target {
            break;
        }
        power = power.mul(&x);
        k = next;
    }
    Ok(sum.cap_abs(target))
}

/// Binomial coefficient `C(s, k)` for a p-adic `s`.
pub fn binomial(s: &PadicScalar, k: usize) -> PadicScalar {
    let ctx = s.ctx;
    let mut num = PadicScalar::from_i64_prec(ctx, 1, s.rel.max(ctx.prec));
    for i in 0..k {
        num = num.mul(&s.sub(&PadicScalar::from_i64_prec(ctx, i as i64, s.rel.max(ctx.prec))));
    }
    let mut fact = BigInt::one();
    for i in 1..=k {
        fact *= i;
    }
    let f = PadicScalar::from_bigint_prec(ctx, &fact, s.rel.max(ctx.prec) + 64);
    num.div(&f).expect("factorial is nonzero")
}

/// Exact binomial `C(n, k)` for machine integers (`n` may be negative).
pub fn binomial_int(n: i64, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i as i64);
        den *= BigInt::from(i as i64 + 1);
    }
    num / den
}

/// Formats an exact rational as `n` or `n/d`.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
