//! `Z_p[ζ_{p^n}]` as polynomials in `X` modulo `Φ_{p^n}(X) = Σ_{k<p} X^{k p^{n-1}}`.
//!
//! The residue class of `X` at level `n` is the fixed root of unity `ξ_n`;
//! level `n` embeds into level `n + 1` through `X ↦ X^p`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{PadicCtx, PadicScalar};
use crate::ring::Coefficient;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloElt {
    #[serde(skip)]
    ctx: &'static PadicCtx,
    level: u32,
    coords: Vec<PadicScalar>,
}

/// `φ(p^n)`, the rank of level `n` over `Z_p`.
pub fn cyclo_dim(p: u32, level: u32) -> usize {
    if level == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(level - 1)
    }
}

/// `p^n`, the order of the level-`n` root of unity.
pub fn cyclo_order(p: u32, level: u32) -> usize {
    (p as usize).pow(level)
}

impl CycloElt {
    pub fn zero(ctx: &'static PadicCtx, level: u32) -> Self {
        let d = cyclo_dim(ctx.p(), level);
        CycloElt { ctx, level, coords: vec![PadicScalar::zero(ctx); d] }
    }

    pub fn from_scalar(level: u32, s: &PadicScalar) -> Self {
        let mut z = Self::zero(s.ctx(), level);
        z.coords[0] = s.clone();
        z
    }

    pub fn one(ctx: &'static PadicCtx, level: u32) -> Self {
        Self::from_scalar(level, &PadicScalar::one(ctx))
    }

    /// Builds an element from coordinates in the power basis `1, X, …`.
    pub fn from_coords(ctx: &'static PadicCtx, level: u32, coords: Vec<PadicScalar>) -> Result<Self> {
        if coords.len() != cyclo_dim(ctx.p(), level) {
            return Err(Error::Incompatible(format!(
                "level {level} needs {} coordinates, got {}",
                cyclo_dim(ctx.p(), level),
                coords.len()
            )));
        }
        Ok(CycloElt { ctx, level, coords })
    }

    /// `ξ_n^a`.
    pub fn zeta_pow(ctx: &'static PadicCtx, level: u32, a: i64) -> Self {
        let mut z = Self::zero(ctx, level);
        let p = ctx.p();
        let ord = cyclo_order(p, level) as i64;
        let e = a.rem_euclid(ord) as usize;
        let d = z.coords.len();
        let one = PadicScalar::one(ctx);
        if e < d {
            z.coords[e] = one;
        } else {
            let q = if level == 0 { 1 } else { (p as usize).pow(level - 1) };
            let m1 = one.neg();
            for k in 0..(p as usize - 1) {
                z.coords[e - d + k * q] = m1.clone();
            }
        }
        z
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.ctx
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> &[PadicScalar] {
        &self.coords
    }

    fn reduce(ctx: &'static PadicCtx, level: u32, mut poly: Vec<PadicScalar>) -> Vec<PadicScalar> {
        let p = ctx.p() as usize;
        let d = cyclo_dim(ctx.p(), level);
        if level == 0 {
            let mut acc = PadicScalar::zero(ctx);
            for c in &poly {
                acc = acc.add(c);
            }
            return vec![acc];
        }
        let q = p.pow(level - 1);
        let mut i = poly.len();
        while i > d {
            i -= 1;
            let c = std::mem::replace(&mut poly[i], PadicScalar::zero(ctx));
            if c.is_exact_zero() {
                continue;
            }
            for k in 0..(p - 1) {
                let j = i - d + k * q;
                poly[j] = poly[j].sub(&c);
            }
        }
        poly.truncate(d);
        poly.resize(d, PadicScalar::zero(ctx));
        poly
    }

    /// Image at a higher level under `X ↦ X^{p^{m-n}}`.
    pub fn lift(&self, level: u32) -> Self {
        if level <= self.level {
            return self.clone();
        }
        let p = self.ctx.p() as usize;
        let step = if self.level == 0 { 1 } else { p.pow(level - self.level) };
        let mut z = Self::zero(self.ctx, level);
        if self.level == 0 {
            z.coords[0] = self.coords[0].clone();
            return z;
        }
        for (i, c) in self.coords.iter().enumerate() {
            z.coords[i * step] = c.clone();
        }
        z
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let l = self.level.max(o.level);
        (self.lift(l), o.lift(l))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x.add(y)).collect();
        CycloElt { ctx: a.ctx, level: a.level, coords }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        CycloElt { ctx: self.ctx, level: self.level, coords: self.coords.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let d = a.coords.len();
        let mut prod = vec![PadicScalar::zero(a.ctx); 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if y.is_exact_zero() {
                    continue;
                }
                prod[i + j] = prod[i + j].add(&x.mul(y));
            }
        }
        CycloElt { ctx: a.ctx, level: a.level, coords: Self::reduce(a.ctx, a.level, prod) }
    }

    pub fn scale(&self, s: &PadicScalar) -> Self {
        CycloElt { ctx: self.ctx, level: self.level, coords: self.coords.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.ctx, self.level);
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

    /// The Galois action `X ↦ X^c` for `c` prime to `p`.
    pub fn galois(&self, c: i64) -> Self {
        let p = self.ctx.p() as i64;
        assert!(c.rem_euclid(p) != 0, "galois twist needs c prime to p");
        if self.level == 0 {
            return self.clone();
        }
        let ord = cyclo_order(self.ctx.p(), self.level) as i64;
        let mut out = Self::zero(self.ctx, self.level);
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            let m = Self::zeta_pow(self.ctx, self.level, (i as i64 * c).rem_euclid(ord));
            out = out.add(&m.scale(a));
        }
        out
    }

    /// Units of `Z/p^n`, the indices of the Galois group.
    pub fn galois_indices(&self) -> Vec<i64> {
        let p = self.ctx.p() as i64;
        let ord = cyclo_order(self.ctx.p(), self.level) as i64;
        (1..ord.max(2)).filter(|c| c % p != 0).collect()
    }

    /// Descends to `Q_p` when all non-constant coordinates vanish.
    pub fn to_scalar(&self) -> Result<PadicScalar> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Ok(self.coords[0].clone())
        } else {
            Err(Error::DescentFailure)
        }
    }

    pub fn norm(&self) -> Result<PadicScalar> {
        let mut acc = self.clone();
        for c in self.galois_indices().into_iter().filter(|&c| c != 1) {
            acc = acc.mul(&self.galois(c));
        }
        acc.to_scalar()
    }

    pub fn trace(&self) -> Result<PadicScalar> {
        let mut acc = Self::zero(self.ctx, self.level);
        for c in self.galois_indices() {
            acc = acc.add(&self.galois(c));
        }
        acc.to_scalar()
    }

    pub fn inv(&self) -> Result<Self> {
        let mut conj = Self::one(self.ctx, self.level);
        for c in self.galois_indices().into_iter().filter(|&c| c != 1) {
            conj = conj.mul(&self.galois(c));
        }
        let n = self.mul(&conj).to_scalar()?;
        Ok(conj.scale(&n.inv()?))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn agree(&self, o: &Self) -> i64 {
        let d = self.sub(o);
        d.coords.iter().map(|c| if c.is_zero() { c.abs_prec() } else { c.val_bound() }).min().unwrap_or(i64::MAX)
    }

    /// Minimal absolute precision across coordinates.
    pub fn abs_prec(&self) -> i64 {
        self.coords.iter().map(|c| c.abs_prec()).min().unwrap_or(i64::MAX)
    }

    pub fn cap_abs(&self, abs: i64) -> Self {
        CycloElt { ctx: self.ctx, level: self.level, coords: self.coords.iter().map(|c| c.cap_abs(abs)).collect() }
    }

    /// Coordinate digit arrays (little-endian, base `p`).
    pub fn digit_arrays(&self) -> Vec<Vec<u32>> {
        self.coords.iter().map(|c| c.digits()).collect()
    }
}

impl Coefficient for CycloElt {
    fn padic_ctx(&self) -> &'static PadicCtx {
        self.ctx
    }
    fn zero_like(&self) -> Self {
        CycloElt::zero(self.ctx, self.level)
    }
    fn one_like(&self) -> Self {
        CycloElt::one(self.ctx, self.level)
    }
    fn from_scalar_like(&self, s: &PadicScalar) -> Self {
        CycloElt::from_scalar(self.level, s)
    }
    fn add(&self, o: &Self) -> Self {
        CycloElt::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CycloElt::sub(self, o)
    }
    fn neg(&self) -> Self {
        CycloElt::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        CycloElt::mul(self, o)
    }
    fn scale(&self, s: &PadicScalar) -> Self {
        CycloElt::scale(self, s)
    }
    fn is_exact_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_exact_zero())
    }
    fn is_zero(&self) -> bool {
        CycloElt::is_zero(self)
    }
    fn val_bound(&self) -> i64 {
        self.coords.iter().map(|c| c.val_bound()).min().unwrap_or(i64::MAX)
    }
    fn cap_abs(&self, abs: i64) -> Self {
        CycloElt::cap_abs(self, abs)
    }
    fn abs_prec(&self) -> i64 {
        CycloElt::abs_prec(self)
    }
    fn inv(&self) -> Result<Self> {
        CycloElt::inv(self)
    }
    fn agree(&self, o: &Self) -> i64 {
        CycloElt::agree(self, o)
    }
}
