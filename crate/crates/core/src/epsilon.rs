//! Gauss sums and local ε-factors of de Rham characters and of
//! crystalline modules twisted by them, kept in separated form
//! `cyclo · p^a · unram · t^w`.

use std::sync::Arc;

use serde::Serialize;

use crate::crystalline::{valuation, CrysModule, UnramifiedTwist};
use crate::cyclo::{cyclo_order, CycloElt};
use crate::error::{Error, Result};
use crate::iwasawa::{DeRhamChar, IwasawaCtx};
use crate::padic::{PadicCtx, PadicScalar};
use crate::unramified::{UnramField, UnramifiedElt};

/// The additive character system `ξ` or `-ξ`; the latter replaces each
/// `ξ_n` by `ξ_n^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum XiSign {
    Plus,
    Minus,
}

impl XiSign {
    fn exponent(self) -> i64 {
        match self {
            XiSign::Plus => 1,
            XiSign::Minus => -1,
        }
    }
}

/// `cyclo_part · p^{p_power} · unram_part · t^{t_exponent}`.
#[derive(Clone, Debug, Serialize)]
pub struct EpsFactor {
    pub cyclo_part: CycloElt,
    pub p_power: i64,
    pub unram_part: UnramifiedElt,
    pub t_exponent: i64,
}

fn scalar_field(ctx: &'static PadicCtx) -> Arc<UnramField> {
    UnramField::generate(ctx, 1, 0).expect("degree one")
}

/// Brings two unramified parts into one field; degree-one parts descend.
fn common_unram(a: &UnramifiedElt, b: &UnramifiedElt) -> Result<(UnramifiedElt, UnramifiedElt)> {
    if a.field() == b.field() {
        return Ok((a.clone(), b.clone()));
    }
    if a.field().degree() == 1 {
        return Ok((UnramifiedElt::from_scalar_in(b.field().clone(), &a.to_scalar()?), b.clone()));
    }
    if b.field().degree() == 1 {
        return Ok((a.clone(), UnramifiedElt::from_scalar_in(a.field().clone(), &b.to_scalar()?)));
    }
    Err(Error::Incompatible("unramified parts live in different fields".into()))
}

impl EpsFactor {
    pub fn one(ctx: &'static PadicCtx) -> Self {
        EpsFactor {
            cyclo_part: CycloElt::one(ctx, 0),
            p_power: 0,
            unram_part: UnramifiedElt::one_in(scalar_field(ctx)),
            t_exponent: 0,
        }
    }

    pub fn ctx(&self) -> &'static PadicCtx {
        self.cyclo_part.ctx()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let (a, b) = common_unram(&self.unram_part, &o.unram_part)?;
        Ok(EpsFactor {
            cyclo_part: self.cyclo_part.mul(&o.cyclo_part),
            p_power: self.p_power + o.p_power,
            unram_part: a.mul(&b),
            t_exponent: self.t_exponent + o.t_exponent,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = EpsFactor::one(self.ctx());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `cyclo_part · p^{p_power}` with the `p`-power folded in.
    pub fn cyclo_value(&self) -> CycloElt {
        self.cyclo_part.scale(&PadicScalar::p_power(self.ctx(), self.p_power))
    }

    /// Digits of agreement relative to the smaller `p`-power, with the
    /// `t`-exponents required to match.
    pub fn agree(&self, o: &Self) -> Result<i64> {
        if self.t_exponent != o.t_exponent {
            return Ok(i64::MIN);
        }
        let (a, b) = common_unram(&self.unram_part, &o.unram_part)?;
        let low = self.p_power.min(o.p_power);
        let shift = |e: &EpsFactor| e.cyclo_part.scale(&PadicScalar::p_power(e.ctx(), e.p_power - low));
        let cyc = shift(self).agree(&shift(o));
        Ok(cyc.min(a.agree(&b)))
    }
}

/// `τ(η_0, ±ξ) = Σ_{a ∈ (Z/p^n)^×} η_0(a)^{-1} ξ_n^{±a}`.
pub fn gauss_sum(ctx: &IwasawaCtx, eta: &DeRhamChar, sign: XiSign) -> Result<CycloElt> {
    twisted_gauss_sum(ctx, eta, sign.exponent())
}

/// The Gauss sum with `ξ_n` replaced by `ξ_n^c`.
pub fn twisted_gauss_sum(ctx: &IwasawaCtx, eta: &DeRhamChar, c: i64) -> Result<CycloElt> {
    let n = eta.conductor();
    let padic = ctx.padic();
    if n == 0 {
        return Ok(CycloElt::one(padic, 0));
    }
    let p = ctx.p() as i64;
    let inverse = eta.finite_part().inverse();
    let ord = cyclo_order(ctx.p(), n) as i64;
    let mut acc = CycloElt::zero(padic, n);
    for a in (1..ord).filter(|a| a % p != 0) {
        let coeff = inverse.finite_value(ctx, a)?.lift(n);
        acc = acc.add(&coeff.mul(&CycloElt::zeta_pow(padic, n, a * c)));
    }
    Ok(acc)
}

/// `ε_L(η, ±ξ) = η_1(σ)^{-n} p^{-nj} τ(η_0, ±ξ)`.
pub fn eps_de_rham_char(ctx: &IwasawaCtx, eta: &DeRhamChar, sign: XiSign) -> Result<EpsFactor> {
    let n = eta.conductor() as i64;
    let padic = ctx.padic();
    let alpha = eta.unram.pow(-n)?;
    Ok(EpsFactor {
        cyclo_part: gauss_sum(ctx, eta, sign)?,
        p_power: -n * eta.weight,
        unram_part: UnramifiedElt::from_scalar_in(scalar_field(padic), &alpha),
        t_exponent: 0,
    })
}

/// `ε_L(V(η), ±ξ) = ε_L(η, ±ξ)^d · det(φ)^n`.
pub fn eps_crystalline_twist(ctx: &IwasawaCtx, module: &CrysModule, eta: &DeRhamChar, sign: XiSign) -> Result<EpsFactor> {
    let n = eta.conductor();
    let base = eps_de_rham_char(ctx, eta, sign)?.pow(module.dim() as u32)?;
    let det = module.det_phi()?;
    let v = valuation(&det).ok_or(Error::DivisionByZero)?;
    let unit = det.mul(&UnramifiedElt::from_scalar_in(module.field().clone(), &PadicScalar::p_power(ctx.padic(), -v)));
    let det_part = EpsFactor {
        cyclo_part: CycloElt::one(ctx.padic(), 0),
        p_power: v * n as i64,
        unram_part: unit.pow(n as u64),
        t_exponent: 0,
    };
    base.mul(&det_part)
}

/// `ε_{L,ξ,dR}` of a crystalline module: `t^{m(V)}` with trivial ring parts.
pub fn eps_dr_scalar(module: &CrysModule) -> EpsFactor {
    let ctx = module.field().ctx();
    EpsFactor {
        cyclo_part: CycloElt::one(ctx, 0),
        p_power: 0,
        unram_part: UnramifiedElt::one_in(module.field().clone()),
        t_exponent: module.weight_sum(),
    }
}

/// `ε_{L,ξ,dR}` of an unramified twist: the period enters once per dimension.
pub fn eps_dr_scalar_twisted(twist: &UnramifiedTwist) -> EpsFactor {
    let mut e = eps_dr_scalar(&twist.module);
    e.unram_part = twist.period.pow(twist.module.dim() as u64);
    e
}

/// Both sides of `τ(η_0, ξ^c) = η_0(c) τ(η_0, ξ)`.
#[derive(Clone, Debug, Serialize)]
pub struct XiChange {
    pub c: i64,
    pub lhs: CycloElt,
    pub rhs: CycloElt,
    pub equal: bool,
}

pub fn xi_change_check(ctx: &IwasawaCtx, eta: &DeRhamChar, c: i64) -> Result<XiChange> {
    if c.rem_euclid(ctx.p() as i64) == 0 {
        return Err(Error::InvalidArgument("c must be prime to p".into()));
    }
    let lhs = twisted_gauss_sum(ctx, eta, c)?;
    let rhs = eta.finite_part().finite_value(ctx, c)?.mul(&gauss_sum(ctx, eta, XiSign::Plus)?);
    let equal = lhs.sub(&rhs).is_zero();
    Ok(XiChange { c, lhs, rhs, equal })
}
