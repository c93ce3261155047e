//! The Iwasawa algebra of `Γ ≅ Δ × Γ_1` as `Δ`-graded truncated series.
//!
//! An element is stored through its `p - 1` images under the characters
//! `ω^i` of `Δ`; each image is a series in `T = γ_1 - 1`, where the fixed
//! generator satisfies `χ(γ_1) = 1 + p`. Series are kept to a guard degree
//! above the reported truncation `D_T`: twists substitute
//! `T ↦ u(1+T) - 1` with `v(u - 1) ≥ 1`, which pulls information down from
//! higher degrees, and the guard keeps degrees `≤ D_T` at full precision.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cyclo::{cyclo_dim, CycloElt};
use crate::error::{Error, Result};
use crate::padic::{binomial_int, padic_log, teichmuller, PadicCtx, PadicScalar, EXACT};
use crate::ring::Coefficient;
use crate::series::{Series, SubstMatrix, Tail, TruncSeries};

/// Shared read-only data for one `(p, N, D_T, D)` configuration.
#[derive(Debug)]
pub struct IwasawaCtx {
    padic: &'static PadicCtx,
    t_degree: usize,
    store_degree: usize,
    series_degree: usize,
    teich: Vec<PadicScalar>,
    gamma_value: PadicScalar,
    log_gamma: PadicScalar,
    mellin_basis: OnceLock<Vec<Vec<Series>>>,
}

impl IwasawaCtx {
    /// `t_degree` is the reported truncation in `T`, `series_degree` the
    /// truncation in `π` used by the Mellin transform.
    pub fn new(p: u32, prec: u32, t_degree: usize, series_degree: usize) -> Result<Arc<Self>> {
        let padic = PadicCtx::get(p, prec)?;
        if t_degree < 2 {
            return Err(Error::InvalidArgument("T-truncation must be at least 2".into()));
        }
        let store_degree = (t_degree + prec as usize + 8).max(series_degree);
        let teich = (0..p as i64).map(|a| teichmuller(padic, a, prec)).collect();
        let gamma_value = PadicScalar::from_i64(padic, 1 + p as i64);
        let log_gamma = padic_log(&gamma_value)?;
        Ok(Arc::new(IwasawaCtx {
            padic,
            t_degree,
            store_degree,
            series_degree,
            teich,
            gamma_value,
            log_gamma,
            mellin_basis: OnceLock::new(),
        }))
    }

    pub fn padic(&self) -> &'static PadicCtx {
        self.padic
    }

    pub fn p(&self) -> u32 {
        self.padic.p()
    }

    pub fn prec(&self) -> u32 {
        self.padic.prec()
    }

    pub fn t_degree(&self) -> usize {
        self.t_degree
    }

    pub fn store_degree(&self) -> usize {
        self.store_degree
    }

    pub fn series_degree(&self) -> usize {
        self.series_degree
    }

    /// Number of `Δ`-components, `p - 1`.
    pub fn delta_count(&self) -> usize {
        self.p() as usize - 1
    }

    /// `χ(γ_1) = 1 + p`.
    pub fn gamma_value(&self) -> &PadicScalar {
        &self.gamma_value
    }

    /// `log χ(γ_1) = log(1 + p)`.
    pub fn log_gamma(&self) -> &PadicScalar {
        &self.log_gamma
    }

    /// `ω(a)`.
    pub fn teichmuller(&self, a: i64) -> &PadicScalar {
        &self.teich[a.rem_euclid(self.p() as i64) as usize]
    }

    /// `ω(a)^i` for any integer `i`.
    pub fn teichmuller_pow(&self, a: i64, i: i64) -> PadicScalar {
        let e = i.rem_euclid(self.delta_count() as i64);
        self.teichmuller(a).pow(e).expect("nonnegative exponent")
    }

    /// `(1 + p)^k`.
    pub fn gamma_pow(&self, k: i64) -> PadicScalar {
        self.gamma_value.pow(k).expect("unit base")
    }

    fn delta_index(&self, i: i64) -> usize {
        i.rem_euclid(self.delta_count() as i64) as usize
    }

    /// Images `(γ_1 - 1)^m e_i (1+π)` of the Mellin basis, indexed `[i][m]`.
    fn mellin_basis(&self) -> &Vec<Vec<Series>> {
        self.mellin_basis.get_or_init(|| {
            let d = self.series_degree;
            let ctx = self.padic;
            let q = self.delta_count() as i64;
            let inv_q = PadicScalar::one(ctx).div_i64(q);
            let powers: Vec<Series> = (1..=q).map(|a| Series::one_plus_pi_pow(self.teichmuller(a), d)).collect();
            (0..q)
                .map(|i| {
                    let mut e = Series::zero(ctx, d);
                    for (a, f) in (1..=q).zip(&powers) {
                        e = e.add(&f.scale(&self.teichmuller_pow(a, -i)));
                    }
                    let mut b = e.scale(&inv_q);
                    let mut row = Vec::with_capacity(self.store_degree + 1);
                    for _ in 0..=self.store_degree {
                        let next = b.gamma_action(&self.gamma_value).expect("unit").sub(&b);
                        row.push(b);
                        b = next;
                    }
                    row
                })
                .collect()
        })
    }
}

/// `s ∈ Z_p` with `a = ω(a)(1+p)^s` for a `p`-adic unit `a`.
pub fn principal_index(ctx: &IwasawaCtx, a: &PadicScalar) -> Result<PadicScalar> {
    if a.valuation() != Some(0) {
        return Err(Error::InvalidArgument("expected a p-adic unit".into()));
    }
    let w = ctx.teichmuller(a.residue() as i64);
    padic_log(&a.div(w)?)?.div(ctx.log_gamma())
}

/// `s(a) mod p^m` for an integer unit `a`.
pub fn principal_index_mod(ctx: &IwasawaCtx, a: i64, m: u32) -> Result<u64> {
    if m == 0 {
        return Ok(0);
    }
    let s = principal_index(ctx, &PadicScalar::from_i64(ctx.padic(), a))?;
    let r = s.to_biguint_mod(m);
    Ok(r.iter_u64_digits().next().unwrap_or(0))
}

/// A character `η = χ^j η_0 η_1` of `G_{Q_p}`: `η_0` is the finite-order
/// part on `Γ`, given by a power of `ω` on `Δ` and `ξ_m^e` at `γ_1`;
/// `η_1` is unramified with value `α` at arithmetic Frobenius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeRhamChar {
    pub weight: i64,
    pub tame: i64,
    pub wild_level: u32,
    pub wild_exponent: i64,
    pub unram: PadicScalar,
}

impl Serialize for DeRhamChar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DeRhamChar", 5)?;
        st.serialize_field("j", &self.weight)?;
        st.serialize_field("tame_index", &self.tame)?;
        st.serialize_field("wild_level", &self.wild_level)?;
        st.serialize_field("wild_exponent", &self.wild_exponent)?;
        st.serialize_field("unram_value", &self.unram)?;
        st.end()
    }
}

impl DeRhamChar {
    /// Normalizes `tame` mod `p - 1` and `wild_exponent` mod `p^wild_level`;
    /// a nonzero wild level needs an exponent prime to `p`.
    pub fn new(ctx: &'static PadicCtx, weight: i64, tame: i64, wild_level: u32, wild_exponent: i64) -> Result<Self> {
        let p = ctx.p() as i64;
        let tame = tame.rem_euclid(p - 1);
        let wild_exponent = if wild_level == 0 {
            if wild_exponent != 0 {
                return Err(Error::CharacterShape("wild exponent without a wild level".into()));
            }
            0
        } else {
            let e = wild_exponent.rem_euclid(p.pow(wild_level));
            if e % p == 0 {
                return Err(Error::CharacterShape("wild exponent must be prime to p".into()));
            }
            e
        };
        Ok(DeRhamChar { weight, tame, wild_level, wild_exponent, unram: PadicScalar::one(ctx) })
    }

    /// `χ^j`.
    pub fn chi_power(ctx: &'static PadicCtx, j: i64) -> Self {
        Self::new(ctx, j, 0, 0, 0).expect("valid shape")
    }

    pub fn with_unram(mut self, alpha: PadicScalar) -> Result<Self> {
        if alpha.valuation() != Some(0) {
            return Err(Error::CharacterShape("unramified value must be a unit".into()));
        }
        self.unram = alpha;
        Ok(self)
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.unram.ctx()
    }

    /// Exponent `n` of the conductor `p^n` of `η_0`.
    pub fn conductor(&self) -> u32 {
        if self.wild_level > 0 {
            self.wild_level + 1
        } else if self.tame != 0 {
            1
        } else {
            0
        }
    }

    /// The `Δ`-component an evaluation reads: `(j + tame) mod (p - 1)`.
    pub fn delta_index(&self) -> usize {
        (self.weight + self.tame).rem_euclid(self.ctx().p() as i64 - 1) as usize
    }

    /// `ξ_m^e`.
    pub fn wild_value(&self) -> CycloElt {
        CycloElt::zeta_pow(self.ctx(), self.wild_level, self.wild_exponent)
    }

    /// `η(γ_1) = (1+p)^j ξ_m^e`.
    pub fn gamma1_value(&self) -> CycloElt {
        let ctx = self.ctx();
        let g = PadicScalar::from_i64(ctx, 1 + ctx.p() as i64).pow(self.weight).expect("unit");
        self.wild_value().scale(&g)
    }

    /// `p^m`, so that `γ = γ_1^{p^m}` has `η_0(γ) = 1`.
    pub fn killing_exponent(&self) -> u64 {
        (self.ctx().p() as u64).pow(self.wild_level)
    }

    /// `η(γ_{-1}) = (-1)^{j + tame}`.
    pub fn value_at_minus_one(&self) -> i64 {
        if (self.weight + self.tame).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// `η_0(a) = ω(a)^tame ξ_m^{e s(a)}` for an integer unit `a`.
    pub fn finite_value(&self, ctx: &IwasawaCtx, a: i64) -> Result<CycloElt> {
        if a.rem_euclid(ctx.p() as i64) == 0 {
            return Err(Error::InvalidArgument("finite characters are evaluated on units".into()));
        }
        let s = principal_index_mod(ctx, a, self.wild_level)? as i64;
        let z = CycloElt::zeta_pow(self.ctx(), self.wild_level, self.wild_exponent * s);
        Ok(z.scale(&ctx.teichmuller_pow(a, self.tame)))
    }

    /// `η χ^k`.
    pub fn times_chi(&self, k: i64) -> Self {
        DeRhamChar { weight: self.weight + k, ..self.clone() }
    }

    /// `η^{-1}`.
    pub fn inverse(&self) -> Self {
        let p = self.ctx().p() as i64;
        DeRhamChar {
            weight: -self.weight,
            tame: (-self.tame).rem_euclid(p - 1),
            wild_level: self.wild_level,
            wild_exponent: (-self.wild_exponent).rem_euclid(p.pow(self.wild_level)),
            unram: self.unram.inv().expect("unit"),
        }
    }

    /// `η_0`, with weight zero and trivial unramified part.
    pub fn finite_part(&self) -> Self {
        DeRhamChar { weight: 0, unram: PadicScalar::one(self.ctx()), ..self.clone() }
    }
}

/// An element of `Λ(Γ)` or (truncated) `H(Γ)`.
#[derive(Clone, Debug)]
pub struct IwasawaElt {
    ctx: Arc<IwasawaCtx>,
    comps: Vec<Series>,
}

impl Serialize for IwasawaElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.ctx.t_degree;
        let comps: Vec<&[PadicScalar]> = self.comps.iter().map(|c| &c.coeffs()[..=d]).collect();
        let mut st = s.serialize_struct("IwasawaElt", 4)?;
        st.serialize_field("p", &self.ctx.p())?;
        st.serialize_field("N", &self.ctx.prec())?;
        st.serialize_field("D_T", &d)?;
        st.serialize_field("components", &comps)?;
        st.end()
    }
}

/// Lower bound `n ↦ v(x^n)` on the coordinates of powers of a point in the
/// maximal ideal.
fn point_growth(x: &CycloElt) -> Result<impl Fn(u64) -> i64> {
    let p = x.ctx().p();
    let e = cyclo_dim(p, x.level()) as u64;
    let v0 = x.val_bound().clamp(0, EXACT);
    let r = x.pow(e).val_bound().clamp(0, EXACT);
    if r < 1 {
        return Err(Error::InvalidArgument("evaluation point is not topologically nilpotent".into()));
    }
    Ok(move |n: u64| {
        let q = (n / e) as i64;
        let rem = (n % e) as i64;
        q.saturating_mul(r).saturating_add(rem.saturating_mul(v0)).min(EXACT)
    })
}

impl IwasawaElt {
    pub fn ctx(&self) -> &Arc<IwasawaCtx> {
        &self.ctx
    }

    /// Builds an element from its `p - 1` component series (resized to the
    /// guard degree).
    pub fn from_components(ctx: &Arc<IwasawaCtx>, comps: Vec<Series>) -> Result<Self> {
        if comps.len() != ctx.delta_count() {
            return Err(Error::Incompatible(format!("expected {} components", ctx.delta_count())));
        }
        let comps = comps.into_iter().map(|c| c.with_degree(ctx.store_degree)).collect();
        Ok(IwasawaElt { ctx: ctx.clone(), comps })
    }

    /// The image of `f(γ_1 - 1) ∈ Λ(Γ_1)`: every component equals `f`.
    pub fn from_series(ctx: &Arc<IwasawaCtx>, f: &Series) -> Self {
        let f = f.with_degree(ctx.store_degree);
        IwasawaElt { ctx: ctx.clone(), comps: vec![f; ctx.delta_count()] }
    }

    pub fn scalar(ctx: &Arc<IwasawaCtx>, c: &PadicScalar) -> Self {
        Self::from_series(ctx, &Series::constant(c, ctx.store_degree))
    }

    pub fn zero(ctx: &Arc<IwasawaCtx>) -> Self {
        Self::scalar(ctx, &PadicScalar::zero(ctx.padic))
    }

    pub fn one(ctx: &Arc<IwasawaCtx>) -> Self {
        Self::scalar(ctx, &PadicScalar::one(ctx.padic))
    }

    /// `[δ γ_1^s]` where `δ ∈ Δ` has `ω(δ) = ω(delta)`.
    pub fn group_like(ctx: &Arc<IwasawaCtx>, delta: i64, s: &PadicScalar) -> Self {
        let base = Series::one_plus_pi_pow(s, ctx.store_degree);
        let comps = (0..ctx.delta_count() as i64).map(|i| base.scale(&ctx.teichmuller_pow(delta, i))).collect();
        IwasawaElt { ctx: ctx.clone(), comps }
    }

    /// `γ_1^s`.
    pub fn gamma_one_power(ctx: &Arc<IwasawaCtx>, s: i64) -> Self {
        Self::group_like(ctx, 1, &PadicScalar::from_i64(ctx.padic, s))
    }

    /// `[γ_a]`, the element with `χ(γ_a) = a`.
    pub fn group_element(ctx: &Arc<IwasawaCtx>, a: &PadicScalar) -> Result<Self> {
        let s = principal_index(ctx, a)?;
        Ok(Self::group_like(ctx, a.residue() as i64, &s))
    }

    pub fn components(&self) -> &[Series] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &Series {
        &self.comps[i]
    }

    fn zip(&self, o: &Self, f: impl Fn(&Series, &Series) -> Series) -> Self {
        let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| f(a, b)).collect();
        IwasawaElt { ctx: self.ctx.clone(), comps }
    }

    fn map(&self, f: impl Fn(&Series) -> Series) -> Self {
        IwasawaElt { ctx: self.ctx.clone(), comps: self.comps.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.mul(b))
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        self.map(|a| a.scale(c))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Every coefficient, known and unknown, lies in `Z_p`.
    pub fn is_integral(&self) -> bool {
        self.comps.iter().all(|c| {
            let known = c.coeffs().iter().all(|x| x.val_bound() >= 0);
            let tail = match c.tail() {
                Tail::Exact => true,
                Tail::Bounded { base, order } => base >= 0 && order == 0,
            };
            known && tail
        })
    }

    /// All coefficients up to `D_T` vanish at their precision.
    pub fn is_zero(&self) -> bool {
        let d = self.ctx.t_degree;
        self.comps.iter().all(|c| c.is_zero_upto(d))
    }

    /// Digits of agreement over the coefficients up to `D_T`.
    pub fn agree(&self, o: &Self) -> i64 {
        let d = self.ctx.t_degree;
        self.comps.iter().zip(&o.comps).map(|(a, b)| a.agree_upto(b, d)).min().unwrap_or(EXACT)
    }

    /// Minimal absolute precision over the coefficients up to `D_T`.
    pub fn precision(&self) -> i64 {
        let d = self.ctx.t_degree;
        self.comps.iter().map(|c| c.precision_upto(d)).min().unwrap_or(EXACT)
    }

    /// Equal at truncation `D_T`: the difference vanishes at its precision.
    pub fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// `x_i(T) ↦ x_{i+shift}(u(1+T) - 1)` with `u = (1+p)^k`.
    fn twist_raw(&self, shift: i64, k: i64) -> Self {
        let ctx = &self.ctx;
        let comps = (0..ctx.delta_count() as i64)
            .map(|i| {
                let src = &self.comps[ctx.delta_index(i + shift)];
                if k == 0 {
                    src.clone()
                } else {
                    let u = ctx.gamma_pow(k);
                    src.compose_affine(&u.sub(&PadicScalar::one(ctx.padic)), &u)
                }
            })
            .collect();
        IwasawaElt { ctx: ctx.clone(), comps }
    }

    /// `Tw_{χ^k}`: `g ↦ χ(g)^k g` on group elements.
    pub fn twist(&self, k: i64) -> Self {
        self.twist_raw(k, k)
    }

    /// `Tw_η` for `η` trivial on `Γ_1` up to a power of `χ`.
    pub fn twist_char(&self, eta: &DeRhamChar) -> Result<Self> {
        if eta.wild_level > 0 {
            return Err(Error::CharacterShape("twisting by a wild character leaves the coefficient ring".into()));
        }
        Ok(self.twist_raw(eta.weight + eta.tame, eta.weight))
    }

    /// `ι`, induced by `g ↦ g^{-1}`.
    pub fn involution(&self) -> Self {
        let ctx = &self.ctx;
        let inv = SubstMatrix::inversion(ctx.padic, ctx.store_degree);
        let comps = (0..ctx.delta_count() as i64).map(|i| inv.apply(&self.comps[ctx.delta_index(-i)])).collect();
        IwasawaElt { ctx: ctx.clone(), comps }
    }

    /// `[γ_c] · x`.
    pub fn mul_group(&self, c: &PadicScalar) -> Result<Self> {
        Ok(self.mul(&Self::group_element(&self.ctx, c)?))
    }

    fn lifted(&self, i: usize, level: u32) -> TruncSeries<CycloElt> {
        TruncSeries::from_scalars(&CycloElt::zero(self.ctx.padic, level), &self.comps[i])
    }

    /// Component `i` evaluated at `T = x`.
    pub fn evaluate_at(&self, i: usize, x: &CycloElt) -> Result<CycloElt> {
        let growth = point_growth(x)?;
        Ok(self.lifted(i, x.level()).eval(x, growth))
    }

    /// `k`-th Taylor coefficient in `T` of component `i` at `T = x`.
    pub fn taylor_at(&self, i: usize, x: &CycloElt, k: usize) -> Result<CycloElt> {
        let growth = point_growth(x)?;
        Ok(self.lifted(i, x.level()).taylor_at(x, k, growth))
    }

    /// `π_η(x)`.
    pub fn evaluate_char(&self, eta: &DeRhamChar) -> Result<CycloElt> {
        let w = eta.gamma1_value();
        let x = w.sub(&CycloElt::one(w.ctx(), w.level()));
        self.evaluate_at(eta.delta_index(), &x)
    }

    /// `k`-th Taylor coefficient in `s` of `s ↦ x(η⟨χ⟩^s)` at `s = 0`.
    pub fn s_taylor(&self, eta: &DeRhamChar, k: usize) -> Result<CycloElt> {
        let w = eta.gamma1_value();
        let x = w.sub(&CycloElt::one(w.ctx(), w.level()));
        let a = self.taylor_at(eta.delta_index(), &x, k)?;
        let speed = w.scale(self.ctx.log_gamma());
        Ok(a.mul(&speed.pow(k as u64)))
    }

    /// `x'(η) = η(γ_1) log χ(γ_1) F'(η(γ_1) - 1)`.
    pub fn derivative_at(&self, eta: &DeRhamChar) -> Result<CycloElt> {
        self.s_taylor(eta, 1)
    }

    /// Smallest `k ≤ max_order` with a nonzero `k`-th `s`-Taylor
    /// coefficient, and that coefficient.
    pub fn leading_term(&self, eta: &DeRhamChar, max_order: usize) -> Result<(usize, CycloElt)> {
        for k in 0..=max_order {
            let v = self.s_taylor(eta, k)?;
            if !v.is_zero() {
                return Ok((k, v));
            }
        }
        Err(Error::VanishingOrder(max_order))
    }

    /// `𝔐(x) = x · (1+π)`, a `ψ = 0` series of degree `D`.
    pub fn mellin(&self) -> Series {
        let ctx = &self.ctx;
        let basis = ctx.mellin_basis();
        let d = ctx.series_degree;
        let mut acc = Series::zero(ctx.padic, d);
        for (row, comp) in basis.iter().zip(&self.comps) {
            for (b, c) in row.iter().zip(comp.coeffs()) {
                if !c.is_exact_zero() {
                    acc = acc.add(&b.scale(c));
                }
            }
        }
        let inexact: Vec<Tail> = self.comps.iter().map(|c| c.tail()).filter(|t| *t != Tail::Exact).collect();
        if inexact.is_empty() {
            return acc;
        }
        let tail_cap = inexact.iter().map(|t| t.cap(ctx.padic, ctx.store_degree, |m| m as i64)).min().unwrap_or(EXACT);
        let mut fact_val = 0i64;
        let coeffs = acc
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n > 0 {
                    fact_val += ctx.padic.val_i64(n as i64) as i64;
                }
                c.cap_abs(tail_cap.saturating_sub(fact_val))
            })
            .collect();
        let base = self.comps.iter().map(|c| c.coeffs().iter().map(|x| x.val_bound()).min().unwrap_or(0)).min().unwrap_or(0);
        let order = inexact
            .iter()
            .map(|t| match t {
                Tail::Bounded { order, .. } => *order,
                Tail::Exact => 0,
            })
            .max()
            .unwrap_or(0);
        Series::new(coeffs, Tail::Bounded { base: base.min(0), order })
    }

    /// The finite-level measure `Σ_a m(a)[γ_a]` over `a ∈ (Z/p^{k+1})^×`
    /// with masses `m(a) = μ_f(a + p^{k+1} Z_p)`; `γ_a` is represented by
    /// `ω(a)^i (1+T)^{s}` with `0 ≤ s < p^k`.
    pub fn mellin_inverse(ctx: &Arc<IwasawaCtx>, f: &Series, level: u32) -> Result<Self> {
        let psi = f.psi();
        if !psi.is_zero() {
            let digits = psi.coeffs().iter().map(|c| c.val_bound()).min().unwrap_or(EXACT);
            return Err(Error::NotPsiKernel(digits));
        }
        let masses = class_moments(f, level + 1, 0);
        let d = ctx.store_degree;
        let mut comps = vec![Series::zero(ctx.padic, d); ctx.delta_count()];
        for (a, m) in masses {
            if m.is_exact_zero() {
                continue;
            }
            let s = principal_index_mod(ctx, a, level)? as i64;
            let base = Series::one_plus_pi_pow_int(ctx.padic, d, s).scale(&m);
            for (i, comp) in comps.iter_mut().enumerate() {
                *comp = comp.add(&base.scale(&ctx.teichmuller_pow(a, i as i64)));
            }
        }
        Ok(IwasawaElt { ctx: ctx.clone(), comps })
    }
}

/// Masses `∫_{a + p^n Z_p} x^j dμ_f` for the units `a` mod `p^n`, where `f`
/// is the Amice transform of `μ_f`.
///
/// `π^m` contributes `Σ_{r ≡ a} (-1)^{m-r} C(m, r) r^j`; the unknown tail
/// is bounded through `∂^j π^m ∈ π^{m-j} Z[π]` evaluated at `ξ^b - 1`.
pub fn class_moments(f: &Series, n: u32, j: u32) -> Vec<(i64, PadicScalar)> {
    let ctx = f.ctx();
    let p = ctx.p() as i64;
    let modulus = p.pow(n);
    let d = f.degree();
    let mut kernel = vec![vec![BigInt::zero(); modulus as usize]; d + 1];
    for (m, row) in kernel.iter_mut().enumerate() {
        for r in 0..=m {
            let mut c = binomial_int(m as i64, r) * BigInt::from(r as i64).pow(j);
            if (m - r) % 2 == 1 {
                c = -c;
            }
            row[r % modulus as usize] += c;
        }
    }
    let e = cyclo_dim(ctx.p(), n) as i64;
    let cap = f.tail().cap(ctx, d, |m| (m as i64 - j as i64).max(0) / e - n as i64);
    (1..modulus)
        .filter(|a| a % p != 0)
        .map(|a| {
            let mut acc = PadicScalar::zero(ctx);
            for (m, row) in kernel.iter().enumerate() {
                let k = &row[a as usize];
                let c = f.coeff(m);
                if !k.is_zero() && !c.is_exact_zero() {
                    acc = acc.add(&c.mul(&PadicScalar::from_bigint(ctx, k)));
                }
            }
            (a, acc.cap_abs(cap))
        })
        .collect()
}

/// `∫ η dμ_f` for the measure with Amice transform `f` (supported on
/// `Z_p^×`) and `η = χ^j η_0` with `j ≥ 0`.
pub fn measure_value(ctx: &IwasawaCtx, f: &Series, eta: &DeRhamChar) -> Result<CycloElt> {
    if eta.weight < 0 {
        return Err(Error::CharacterShape("measure values need j ≥ 0".into()));
    }
    let j = eta.weight as u32;
    let n = eta.conductor();
    let pctx = f.ctx();
    if n == 0 {
        // ∂^j π^m (0) = Σ_r (-1)^{m-r} C(m, r) r^j, zero for m > j
        let mut acc = PadicScalar::zero(pctx);
        for m in 0..=(j as usize).min(f.degree()) {
            let mut k = BigInt::zero();
            for r in 0..=m {
                let c = binomial_int(m as i64, r) * BigInt::from(r as i64).pow(j);
                if (m - r) % 2 == 1 {
                    k -= c;
                } else {
                    k += c;
                }
            }
            if !k.is_zero() {
                acc = acc.add(&f.coeff(m).mul(&PadicScalar::from_bigint(pctx, &k)));
            }
        }
        if j as usize > f.degree() {
            return Err(Error::InsufficientTruncation(format!("moment {j} exceeds degree {}", f.degree())));
        }
        return Ok(CycloElt::from_scalar(0, &acc));
    }
    let mut acc = CycloElt::zero(pctx, eta.wild_level);
    for (a, m) in class_moments(f, n, j) {
        acc = acc.add(&eta.finite_value(ctx, a)?.scale(&m));
    }
    Ok(acc)
}

/// `ℓ_j = log(γ_1)/log χ(γ_1) - j`, i.e. `log(1+T)/log(1+p) - j` in every
/// component.
pub fn ell_element(ctx: &Arc<IwasawaCtx>, j: i64) -> IwasawaElt {
    let d = ctx.store_degree;
    let inv_log = ctx.log_gamma.inv().expect("nonzero");
    let f = Series::log1p(ctx.padic, d).scale(&inv_log).sub(&Series::constant(&PadicScalar::from_i64(ctx.padic, j), d));
    IwasawaElt::from_series(ctx, &f)
}

/// `p_k = Π_{i<k} (1 - χ(γ_1)^{-i} γ_1)`.
pub fn p_k_element(ctx: &Arc<IwasawaCtx>, k: u32) -> IwasawaElt {
    let one = IwasawaElt::one(ctx);
    let g = IwasawaElt::gamma_one_power(ctx, 1);
    let mut acc = one.clone();
    for i in 0..k as i64 {
        acc = acc.mul(&one.sub(&g.scale(&ctx.gamma_pow(-i))));
    }
    acc
}

/// A quotient kept as lists of factors, so that leading terms at a
/// character are products of the factors' leading terms.
#[derive(Clone, Debug)]
pub struct FractionElt {
    ctx: Arc<IwasawaCtx>,
    num: Vec<IwasawaElt>,
    den: Vec<IwasawaElt>,
}

impl FractionElt {
    pub fn one(ctx: &Arc<IwasawaCtx>) -> Self {
        FractionElt { ctx: ctx.clone(), num: Vec::new(), den: Vec::new() }
    }

    pub fn from_elt(x: IwasawaElt) -> Self {
        FractionElt { ctx: x.ctx.clone(), num: vec![x], den: Vec::new() }
    }

    /// `num / den`; every denominator component must be nonzero somewhere
    /// on the probe set.
    pub fn ratio(num: Vec<IwasawaElt>, den: Vec<IwasawaElt>) -> Result<Self> {
        let ctx = num.first().or(den.first()).map(|x| x.ctx.clone()).ok_or_else(|| Error::InvalidArgument("empty fraction".into()))?;
        let f = FractionElt { ctx, num, den };
        if !f.denominator().probe_nonvanishing()? {
            return Err(Error::ZeroDenominator);
        }
        Ok(f)
    }

    pub fn ctx(&self) -> &Arc<IwasawaCtx> {
        &self.ctx
    }

    pub fn numerator_factors(&self) -> &[IwasawaElt] {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[IwasawaElt] {
        &self.den
    }

    fn product(ctx: &Arc<IwasawaCtx>, xs: &[IwasawaElt]) -> IwasawaElt {
        xs.iter().fold(IwasawaElt::one(ctx), |acc, x| acc.mul(x))
    }

    pub fn numerator(&self) -> IwasawaElt {
        Self::product(&self.ctx, &self.num)
    }

    pub fn denominator(&self) -> IwasawaElt {
        Self::product(&self.ctx, &self.den)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut num = self.num.clone();
        num.extend(o.num.iter().cloned());
        let mut den = self.den.clone();
        den.extend(o.den.iter().cloned());
        FractionElt { ctx: self.ctx.clone(), num, den }
    }

    pub fn inv(&self) -> Self {
        FractionElt { ctx: self.ctx.clone(), num: self.den.clone(), den: self.num.clone() }
    }

    pub fn neg(&self) -> Self {
        let mut num = self.num.clone();
        num.push(IwasawaElt::scalar(&self.ctx, &PadicScalar::from_i64(self.ctx.padic, -1)));
        FractionElt { ctx: self.ctx.clone(), num, den: self.den.clone() }
    }

    pub fn twist(&self, k: i64) -> Self {
        FractionElt {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|x| x.twist(k)).collect(),
            den: self.den.iter().map(|x| x.twist(k)).collect(),
        }
    }

    pub fn involution(&self) -> Self {
        FractionElt {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|x| x.involution()).collect(),
            den: self.den.iter().map(|x| x.involution()).collect(),
        }
    }

    /// `num · o.den - o.num · den`, which vanishes exactly when the two
    /// fractions agree.
    pub fn cross_difference(&self, o: &Self) -> IwasawaElt {
        self.numerator().mul(&o.denominator()).sub(&o.numerator().mul(&self.denominator()))
    }

    /// Equality by cross-multiplication at truncation `D_T`.
    pub fn equals(&self, o: &Self) -> bool {
        self.cross_difference(o).is_zero()
    }

    /// `x(η)`; fails when a denominator factor vanishes at `η`.
    pub fn evaluate_char(&self, eta: &DeRhamChar) -> Result<CycloElt> {
        let level = eta.wild_level;
        let mut num = CycloElt::one(self.ctx.padic, level);
        for x in &self.num {
            num = num.mul(&x.evaluate_char(eta)?);
        }
        let mut den = CycloElt::one(self.ctx.padic, level);
        for x in &self.den {
            let v = x.evaluate_char(eta)?;
            if v.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            den = den.mul(&v);
        }
        num.div(&den)
    }

    /// Order (negative for a pole) and leading `s`-Taylor coefficient at `η`.
    pub fn leading_term(&self, eta: &DeRhamChar, max_order: usize) -> Result<(i64, CycloElt)> {
        let level = eta.wild_level;
        let mut order = 0i64;
        let mut num = CycloElt::one(self.ctx.padic, level);
        for x in &self.num {
            let (k, v) = x.leading_term(eta, max_order)?;
            order += k as i64;
            num = num.mul(&v);
        }
        let mut den = CycloElt::one(self.ctx.padic, level);
        for x in &self.den {
            let (k, v) = x.leading_term(eta, max_order)?;
            order -= k as i64;
            den = den.mul(&v);
        }
        Ok((order, num.div(&den)?))
    }
}

impl IwasawaElt {
    /// Every component is nonzero at some `χ^k` with `|k| ≤ D_T/2`.
    pub fn probe_nonvanishing(&self) -> Result<bool> {
        let ctx = &self.ctx;
        let half = (ctx.t_degree / 2) as i64;
        for i in 0..ctx.delta_count() {
            let mut hit = false;
            for k in -half..=half {
                let x = ctx.gamma_pow(k).sub(&PadicScalar::one(ctx.padic));
                if !self.evaluate_at(i, &CycloElt::from_scalar(0, &x))?.is_zero() {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `μ_n`: `ℓ_0 ⋯ ℓ_{n-1}` for `n ≥ 1`, `1` for `n = 0`,
/// `(ℓ_{-1} ⋯ ℓ_n)^{-1}` for `n ≤ -1`.
pub fn mu_element(ctx: &Arc<IwasawaCtx>, n: i64) -> FractionElt {
    if n >= 0 {
        FractionElt { ctx: ctx.clone(), num: (0..n).map(|i| ell_element(ctx, i)).collect(), den: Vec::new() }
    } else {
        FractionElt { ctx: ctx.clone(), num: Vec::new(), den: (n..=-1).rev().map(|i| ell_element(ctx, i)).collect() }
    }
}

/// `ℓ(V) = Π μ_{n_i}` over the Hodge–Tate weights.
pub fn ell_of_rep(ctx: &Arc<IwasawaCtx>, weights: &[i64]) -> FractionElt {
    weights.iter().fold(FractionElt::one(ctx), |acc, &n| acc.mul(&mu_element(ctx, n)))
}

/// `A_{h,η}(η)` for `(ℓ_{h-1} ⋯ ℓ_0)/(γ - η(γ))` with `γ = γ_1^{p^m}`,
/// from the leading terms of numerator and denominator.
pub fn fudge_factor(ctx: &Arc<IwasawaCtx>, h: u32, eta: &DeRhamChar) -> Result<CycloElt> {
    let j = eta.weight;
    if h == 0 || j < 0 || j >= h as i64 {
        return Err(Error::CharacterShape(format!("need 0 ≤ j ≤ h - 1, got j = {j}, h = {h}")));
    }
    let num: Vec<IwasawaElt> = (0..h as i64).map(|i| ell_element(ctx, i)).collect();
    let q = eta.killing_exponent() as i64;
    let value = ctx.gamma_pow(j * q);
    let den = IwasawaElt::gamma_one_power(ctx, q).sub(&IwasawaElt::scalar(ctx, &value));
    let frac = FractionElt { ctx: ctx.clone(), num, den: vec![den] };
    let (order, v) = frac.leading_term(eta, h as usize + 1)?;
    if order != 0 {
        return Err(Error::VanishingOrder(order.unsigned_abs() as usize));
    }
    Ok(v)
}

/// Closed form `(-1)^{h-j-1}(h-j-1)! j! / (η(γ) log χ(γ))` for
/// `γ = γ_1^{p^m}`.
pub fn fudge_closed_form(ctx: &IwasawaCtx, h: u32, eta: &DeRhamChar) -> Result<PadicScalar> {
    let j = eta.weight;
    if j < 0 || j >= h as i64 {
        return Err(Error::CharacterShape("need 0 ≤ j ≤ h - 1".into()));
    }
    let fact = |n: i64| (1..=n).fold(BigInt::one(), |acc, k| acc * k);
    let k = h as i64 - j - 1;
    let mut num = fact(k) * fact(j);
    if k % 2 == 1 {
        num = -num;
    }
    let q = eta.killing_exponent() as i64;
    let den = ctx.gamma_pow(j * q).mul(&ctx.log_gamma).mul_i64(q);
    PadicScalar::from_bigint(ctx.padic, &num).div(&den)
}
