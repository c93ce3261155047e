//! Unramified extensions `Z_{p^f} = Z_p[X]/(g)` with the Frobenius lift.
//!
//! The defining polynomial `g` is monic with integer coefficients in
//! `[0, p)` and irreducible modulo `p`. The Frobenius `σ` is the ring
//! automorphism sending `X` to the root of `g` congruent to `X^p`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{PadicCtx, PadicScalar};
use crate::ring::Coefficient;

/// Dense polynomial arithmetic over `F_p`, coefficients little-endian.
pub mod fp {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        pow(a, p - 2, p)
    }

    pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % p;
            }
            a = a * a % p;
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the nonzero `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let top = r.len() - 1;
            let q = r[top] * lead_inv % p;
            for i in 0..=dm {
                let idx = top - dm + i;
                r[idx] = (r[idx] + p - q * m[i] % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&l) = x.last() {
            let li = inv(l, p);
            for c in x.iter_mut() {
                *c = *c * li % p;
            }
        }
        x
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1];
        let mut b = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &b, m, p);
            }
            e >>= 1;
            if e > 0 {
                b = mulmod(&b, &b, m, p);
            }
        }
        r
    }

    /// Irreducibility of a monic `g` of degree `f` over `F_p`.
    pub fn is_irreducible(g: &[u64], p: u64) -> bool {
        let f = g.len() - 1;
        if f == 0 {
            return false;
        }
        let x = vec![0, 1];
        let mut xq = x.clone();
        for _ in 1..=f / 2 {
            xq = powmod(&xq, p as u128, g, p);
            let d = gcd(g, &sub(&xq, &x, p), p);
            if d.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// A finite unramified extension of `Q_p`.
#[derive(Debug)]
pub struct UnramField {
    ctx: &'static PadicCtx,
    degree: usize,
    poly: Vec<u64>,
    frob_x: Vec<PadicScalar>,
}

impl PartialEq for UnramField {
    fn eq(&self, o: &Self) -> bool {
        self.ctx == o.ctx && self.poly == o.poly
    }
}
impl Eq for UnramField {}

impl UnramField {
    /// Field of degree `f` with a defining polynomial found by seeded search.
    pub fn generate(ctx: &'static PadicCtx, degree: usize, seed: u64) -> Result<Arc<Self>> {
        if degree == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        let p = ctx.p() as u64;
        if degree == 1 {
            return Self::with_poly(ctx, vec![0, 1]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut g: Vec<u64> = (0..degree).map(|_| rng.random_range(0..p)).collect();
            g.push(1);
            if fp::is_irreducible(&g, p) {
                return Self::with_poly(ctx, g);
            }
        }
    }

    /// Field defined by a caller-supplied monic polynomial (little-endian
    /// coefficients, reduced into `[0, p)`).
    pub fn with_poly(ctx: &'static PadicCtx, poly: Vec<u64>) -> Result<Arc<Self>> {
        let p = ctx.p() as u64;
        let poly: Vec<u64> = poly.into_iter().map(|c| c % p).collect();
        if poly.len() < 2 || poly.last() != Some(&1) {
            return Err(Error::InvalidArgument("defining polynomial must be monic of positive degree".into()));
        }
        if !fp::is_irreducible(&poly, p) {
            return Err(Error::InvalidArgument("defining polynomial is reducible mod p".into()));
        }
        let degree = poly.len() - 1;
        let mut field = UnramField { ctx, degree, poly, frob_x: Vec::new() };
        field.frob_x = field.lift_frobenius_of_x()?;
        Ok(Arc::new(field))
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.ctx
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly(&self) -> &[u64] {
        &self.poly
    }

    fn reduce(&self, mut v: Vec<PadicScalar>) -> Vec<PadicScalar> {
        let f = self.degree;
        let mut i = v.len();
        while i > f {
            i -= 1;
            let c = std::mem::replace(&mut v[i], PadicScalar::zero(self.ctx));
            if c.is_exact_zero() {
                continue;
            }
            for (k, &gk) in self.poly[..f].iter().enumerate() {
                if gk != 0 {
                    let j = i - f + k;
                    v[j] = v[j].sub(&c.mul_i64(gk as i64));
                }
            }
        }
        v.resize(f, PadicScalar::zero(self.ctx));
        v
    }

    /// Evaluates the defining polynomial and its derivative at `x`.
    fn eval_poly(&self, x: &UnramifiedElt) -> (UnramifiedElt, UnramifiedElt) {
        let ctx = self.ctx;
        let mut val = UnramifiedElt::zero_in(x.field.clone());
        let mut der = UnramifiedElt::zero_in(x.field.clone());
        for &c in self.poly.iter().rev() {
            der = der.mul(x).add(&val);
            let c = UnramifiedElt::from_scalar_in(x.field.clone(), &PadicScalar::from_i64(ctx, c as i64));
            val = val.mul(x).add(&c);
        }
        (val, der)
    }

    fn lift_frobenius_of_x(&self) -> Result<Vec<PadicScalar>> {
        let ctx = self.ctx;
        let f = self.degree;
        if f == 1 {
            return Ok(vec![PadicScalar::from_i64(ctx, (self.poly[0] as i64).wrapping_neg().rem_euclid(ctx.p() as i64))]);
        }
        let skeleton = Arc::new(UnramField { ctx, degree: f, poly: self.poly.clone(), frob_x: Vec::new() });
        let x = UnramifiedElt::generator_in(skeleton.clone());
        let mut r = x.pow(ctx.p() as u64);
        for _ in 0..128 {
            let (g, dg) = skeleton.eval_poly(&r);
            if g.is_zero() {
                return Ok(r.coords);
            }
            let next = r.sub(&g.mul(&dg.inv()?));
            if next.agree(&r) >= ctx.prec() as i64 && g.abs_prec() >= ctx.prec() as i64 {
                return Ok(next.coords);
            }
            r = next;
        }
        Err(Error::PrecisionExhausted("Hensel lifting of the residue Frobenius".into()))
    }
}

/// An element of `Z_{p^f}` (or its fraction field) in the power basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnramifiedElt {
    field: Arc<UnramField>,
    coords: Vec<PadicScalar>,
}

impl Serialize for UnramifiedElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("UnramifiedElt", 3)?;
        st.serialize_field("f", &self.field.degree)?;
        st.serialize_field("poly", &self.field.poly)?;
        st.serialize_field("coords", &self.coords)?;
        st.end()
    }
}

impl UnramifiedElt {
    pub fn zero_in(field: Arc<UnramField>) -> Self {
        let coords = vec![PadicScalar::zero(field.ctx); field.degree];
        UnramifiedElt { field, coords }
    }

    pub fn one_in(field: Arc<UnramField>) -> Self {
        let one = PadicScalar::one(field.ctx);
        Self::from_scalar_in(field, &one)
    }

    pub fn from_scalar_in(field: Arc<UnramField>, s: &PadicScalar) -> Self {
        let mut z = Self::zero_in(field);
        z.coords[0] = s.clone();
        z
    }

    /// The class of `X`.
    pub fn generator_in(field: Arc<UnramField>) -> Self {
        if field.degree == 1 {
            let g0 = (field.poly[0] as i64).wrapping_neg();
            let s = PadicScalar::from_i64(field.ctx, g0);
            return Self::from_scalar_in(field, &s);
        }
        let mut z = Self::zero_in(field.clone());
        z.coords[1] = PadicScalar::one(field.ctx);
        z
    }

    pub fn from_coords(field: Arc<UnramField>, coords: Vec<PadicScalar>) -> Result<Self> {
        if coords.len() != field.degree {
            return Err(Error::Incompatible(format!("expected {} coordinates", field.degree)));
        }
        Ok(UnramifiedElt { field, coords })
    }

    /// Lifts a residue given by `F_p` coordinates with integer representatives.
    pub fn from_residue(field: Arc<UnramField>, residue: &[u64]) -> Self {
        let ctx = field.ctx;
        let mut z = Self::zero_in(field);
        for (i, &c) in residue.iter().enumerate().take(z.coords.len()) {
            z.coords[i] = PadicScalar::from_i64(ctx, c as i64);
        }
        z
    }

    pub fn field(&self) -> &Arc<UnramField> {
        &self.field
    }

    pub fn coords(&self) -> &[PadicScalar] {
        &self.coords
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.field.ctx
    }

    fn check(&self, o: &Self) {
        assert!(self.field == o.field, "operands live in different unramified fields");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a.add(b)).collect();
        UnramifiedElt { field: self.field.clone(), coords }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        UnramifiedElt { field: self.field.clone(), coords: self.coords.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let f = self.field.degree;
        let mut prod = vec![PadicScalar::zero(self.ctx()); 2 * f - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coords.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                prod[i + j] = prod[i + j].add(&a.mul(b));
            }
        }
        UnramifiedElt { field: self.field.clone(), coords: self.field.reduce(prod) }
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        UnramifiedElt { field: self.field.clone(), coords: self.coords.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one_in(self.field.clone());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Minimal coordinate valuation bound.
    pub fn val_bound(&self) -> i64 {
        self.coords.iter().map(|c| c.val_bound()).min().unwrap_or(i64::MAX)
    }

    pub fn abs_prec(&self) -> i64 {
        self.coords.iter().map(|c| c.abs_prec()).min().unwrap_or(i64::MAX)
    }

    /// Residue in `F_{p^f}` of an integral element.
    pub fn residue(&self) -> Vec<u64> {
        let mut r: Vec<u64> = self.coords.iter().map(|c| if c.val_bound() > 0 { 0 } else { c.residue() as u64 }).collect();
        fp::trim(&mut r);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.coords.iter().filter(|c| !c.is_zero()).map(|c| c.val_bound()).min().unwrap_or(0);
        let unit = self.scale(&PadicScalar::p_power(self.ctx(), -v));
        let p = self.ctx().p() as u64;
        let res = unit.residue();
        let q = (p as u128).pow(self.field.degree as u32);
        let rinv = fp::powmod(&res, q - 2, &self.field.poly, p);
        let mut y = Self::from_residue(self.field.clone(), &rinv);
        let two = Self::from_scalar_in(self.field.clone(), &PadicScalar::from_i64(self.ctx(), 2));
        let target = unit.abs_prec().min(self.ctx().prec() as i64);
        for _ in 0..64 {
            let next = y.mul(&two.sub(&unit.mul(&y)));
            let done = next.agree(&y) >= target;
            y = next;
            if done {
                break;
            }
        }
        Ok(y.scale(&PadicScalar::p_power(self.ctx(), -v)))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// The Frobenius lift `σ`.
    pub fn frobenius(&self) -> Self {
        let f = self.field.degree;
        if f == 1 {
            return self.clone();
        }
        let sx = UnramifiedElt { field: self.field.clone(), coords: self.field.frob_x.clone() };
        let mut acc = Self::zero_in(self.field.clone());
        let mut power = Self::one_in(self.field.clone());
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                power = power.mul(&sx);
            }
            if !c.is_exact_zero() {
                acc = acc.add(&power.scale(c));
            }
        }
        acc
    }

    /// `σ^k`.
    pub fn frobenius_pow(&self, k: usize) -> Self {
        let mut x = self.clone();
        for _ in 0..k % self.field.degree {
            x = x.frobenius();
        }
        x
    }

    pub fn trace(&self) -> PadicScalar {
        let mut acc = self.clone();
        let mut x = self.clone();
        for _ in 1..self.field.degree {
            x = x.frobenius();
            acc = acc.add(&x);
        }
        acc.coords[0].clone()
    }

    pub fn norm(&self) -> PadicScalar {
        let mut acc = self.clone();
        let mut x = self.clone();
        for _ in 1..self.field.degree {
            x = x.frobenius();
            acc = acc.mul(&x);
        }
        acc.coords[0].clone()
    }

    /// Descends to `Q_p` when every non-constant coordinate vanishes.
    pub fn to_scalar(&self) -> Result<PadicScalar> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Ok(self.coords[0].clone())
        } else {
            Err(Error::DescentFailure)
        }
    }

    pub fn agree(&self, o: &Self) -> i64 {
        let d = self.sub(o);
        d.coords.iter().map(|c| if c.is_zero() { c.abs_prec() } else { c.val_bound() }).min().unwrap_or(i64::MAX)
    }

    pub fn cap_abs(&self, abs: i64) -> Self {
        UnramifiedElt { field: self.field.clone(), coords: self.coords.iter().map(|c| c.cap_abs(abs)).collect() }
    }

    /// Teichmüller lift of the residue of an integral element.
    pub fn teichmuller(&self) -> Self {
        let q = (self.ctx().p() as u64).pow(self.field.degree as u32);
        let mut x = Self::from_residue(self.field.clone(), &self.residue());
        for _ in 0..(4 * self.ctx().prec() + 8) {
            let y = x.pow(q);
            if y.agree(&x) >= self.ctx().prec() as i64 {
                return y;
            }
            x = y;
        }
        x
    }
}

/// Residue-field helpers used by the solvers.
fn residue_elements(field: &UnramField) -> Vec<Vec<u64>> {
    let p = field.ctx.p() as u64;
    let f = field.degree;
    let total = (p as usize).pow(f as u32);
    (0..total)
        .map(|mut n| {
            let mut v = Vec::with_capacity(f);
            for _ in 0..f {
                v.push((n % p as usize) as u64);
                n /= p as usize;
            }
            v
        })
        .collect()
}

fn residue_eq(a: &[u64], b: &[u64]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fp::trim(&mut x);
    fp::trim(&mut y);
    x == y
}

/// Solves `(1 - σ) y = x` with the coordinate of `y` along `1` set to zero.
pub fn solve_frobenius_additive(x: &UnramifiedElt) -> Result<UnramifiedElt> {
    let field = x.field.clone();
    let ctx = field.ctx;
    let f = field.degree;
    if x.is_zero() {
        return Ok(UnramifiedElt::zero_in(field));
    }
    let mut rows: Vec<Vec<PadicScalar>> = vec![vec![PadicScalar::zero(ctx); f + 1]; f + 1];
    for col in 0..f {
        let mut e = UnramifiedElt::zero_in(field.clone());
        e.coords[col] = PadicScalar::one(ctx);
        let img = e.sub(&e.frobenius());
        for row in 0..f {
            rows[row][col] = img.coords[row].clone();
        }
    }
    for row in 0..f {
        rows[row][f] = x.coords[row].clone();
    }
    rows[f][0] = PadicScalar::one(ctx);
    let mut r = 0;
    for col in 0..f {
        let piv = (r..=f).find(|&i| rows[i][col].valuation() == Some(0));
        let Some(piv) = piv else {
            return Err(Error::NoSolution("singular residue system".into()));
        };
        rows.swap(r, piv);
        let inv = rows[r][col].inv()?;
        for c in col..=f {
            rows[r][c] = rows[r][c].mul(&inv);
        }
        for i in 0..=f {
            if i != r && !rows[i][col].is_exact_zero() {
                let m = rows[i][col].clone();
                for c in col..=f {
                    let t = rows[r][c].mul(&m);
                    rows[i][c] = rows[i][c].sub(&t);
                }
            }
        }
        r += 1;
    }
    let leftover = &rows[f][f];
    if !leftover.is_zero() {
        return Err(Error::NoSolution(format!("trace obstruction {leftover}")));
    }
    let coords = (0..f).map(|i| rows[i][f].clone()).collect();
    let y = UnramifiedElt { field, coords };
    let check = y.sub(&y.frobenius());
    if check.agree(x) < ctx.prec() as i64 - 1 {
        return Err(Error::NoSolution("substitution check failed".into()));
    }
    Ok(y)
}

/// Solves `σ(u) = α u` for a Teichmüller value `α` whose residue is a
/// `(p - 1)`-st power in the residue field.
///
/// Solutions form a coset of `Z_p^×`. The returned `u` is the Teichmüller
/// lift of a canonical residue; for `α ≠ α^{-1}` the choices for `α` and
/// `α^{-1}` are mutually inverse.
pub fn solve_frobenius_multiplicative(alpha: &UnramifiedElt) -> Result<UnramifiedElt> {
    let field = alpha.field.clone();
    let ctx = field.ctx;
    let p = ctx.p() as u64;
    let q = (p as u128).pow(field.degree as u32);
    if alpha.val_bound() != 0 {
        return Err(Error::InvalidArgument("alpha must be a unit".into()));
    }
    let teich = alpha.teichmuller();
    if teich.agree(alpha) < ctx.prec() as i64 {
        return Err(Error::InvalidArgument("alpha must be a Teichmüller value".into()));
    }
    let a = alpha.residue();
    let a_inv = fp::powmod(&a, q - 2, &field.poly, p);
    let norm_one = fp::powmod(&a, (q - 1) / (p as u128 - 1), &field.poly, p);
    if !residue_eq(&norm_one, &[1]) {
        return Err(Error::NoSolution("norm of alpha is not 1; the period needs a larger unramified field".into()));
    }
    let solve = |target: &[u64]| -> Vec<u64> {
        residue_elements(&field)
            .into_iter()
            .filter(|u| u.iter().any(|&c| c != 0))
            .find(|u| residue_eq(&fp::powmod(u, p as u128 - 1, &field.poly, p), target))
            .expect("norm-one residue is a (p-1)-st power")
    };
    let key = |v: &[u64]| {
        let mut w = v.to_vec();
        w.resize(field.degree, 0);
        w.reverse();
        w
    };
    let ubar = if residue_eq(&a, &a_inv) || key(&a) <= key(&a_inv) {
        solve(&a)
    } else {
        let w = solve(&a_inv);
        fp::powmod(&w, q - 2, &field.poly, p)
    };
    let u = UnramifiedElt::from_residue(field.clone(), &ubar).teichmuller();
    if u.frobenius().agree(&alpha.mul(&u)) < ctx.prec() as i64 - 1 {
        return Err(Error::NoSolution("substitution check failed".into()));
    }
    Ok(u)
}

/// Embeds `Z_{p^f}` into `Z_{p^{f f'}}` by sending `X` to a Hensel-lifted
/// root of the defining polynomial.
pub fn embed_field(small: &Arc<UnramField>, big: &Arc<UnramField>) -> Result<impl Fn(&UnramifiedElt) -> UnramifiedElt> {
    if !big.degree.is_multiple_of(small.degree) || small.ctx != big.ctx {
        return Err(Error::Incompatible("degree does not divide".into()));
    }
    let p = small.ctx.p() as u64;
    let root_res = residue_elements(big)
        .into_iter()
        .find(|r| {
            let mut acc: Vec<u64> = Vec::new();
            for &c in small.poly.iter().rev() {
                acc = fp::mulmod(&acc, r, &big.poly, p);
                let mut add = acc.clone();
                if add.is_empty() {
                    add.push(0);
                }
                add[0] = (add[0] + c) % p;
                fp::trim(&mut add);
                acc = add;
            }
            acc.is_empty()
        })
        .ok_or(Error::NoSolution("no root of the small defining polynomial".into()))?;
    let mut r = UnramifiedElt::from_residue(big.clone(), &root_res);
    for _ in 0..128 {
        let (g, dg) = small.eval_poly(&r);
        let next = r.sub(&g.mul(&dg.inv()?));
        let done = next.agree(&r) >= small.ctx.prec() as i64;
        r = next;
        if done {
            break;
        }
    }
    let big = big.clone();
    Ok(move |x: &UnramifiedElt| {
        let mut acc = UnramifiedElt::zero_in(big.clone());
        let mut power = UnramifiedElt::one_in(big.clone());
        for (i, c) in x.coords.iter().enumerate() {
            if i > 0 {
                power = power.mul(&r);
            }
            acc = acc.add(&power.scale(c));
        }
        acc
    })
}

impl Coefficient for UnramifiedElt {
    fn padic_ctx(&self) -> &'static PadicCtx {
        self.field.ctx
    }
    fn zero_like(&self) -> Self {
        UnramifiedElt::zero_in(self.field.clone())
    }
    fn one_like(&self) -> Self {
        UnramifiedElt::one_in(self.field.clone())
    }
    fn from_scalar_like(&self, s: &PadicScalar) -> Self {
        UnramifiedElt::from_scalar_in(self.field.clone(), s)
    }
    fn add(&self, o: &Self) -> Self {
        UnramifiedElt::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        UnramifiedElt::sub(self, o)
    }
    fn neg(&self) -> Self {
        UnramifiedElt::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        UnramifiedElt::mul(self, o)
    }
    fn scale(&self, s: &PadicScalar) -> Self {
        UnramifiedElt::scale(self, s)
    }
    fn is_exact_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_exact_zero())
    }
    fn is_zero(&self) -> bool {
        UnramifiedElt::is_zero(self)
    }
    fn val_bound(&self) -> i64 {
        UnramifiedElt::val_bound(self)
    }
    fn cap_abs(&self, abs: i64) -> Self {
        UnramifiedElt::cap_abs(self, abs)
    }
    fn abs_prec(&self) -> i64 {
        UnramifiedElt::abs_prec(self)
    }
    fn inv(&self) -> Result<Self> {
        UnramifiedElt::inv(self)
    }
    fn agree(&self, o: &Self) -> i64 {
        UnramifiedElt::agree(self, o)
    }
}
