//! The rank-one cyclotomic regulator: Coleman series, `D log`, the norm
//! operator, `L = 𝔐^{-1} ∘ (1 - φ)`, the big exponential `Ω`, `∂^{-1}` on
//! `ψ = 0`, interpolation prefactors and the `Θ`/ε-scalar assembly.

use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;

use crate::crystalline::CrysModule;
use crate::cyclo::CycloElt;
use crate::epsilon::{eps_de_rham_char, EpsFactor, XiSign};
use crate::error::{Error, Result};
use crate::iwasawa::{ell_element, ell_of_rep, measure_value, DeRhamChar, FractionElt, IwasawaCtx, IwasawaElt};
use crate::padic::{binomial_int, PadicCtx, PadicScalar};
use crate::series::{Series, Tail, TruncSeries};
use crate::unramified::UnramifiedElt;

/// A unit power series, flagged once it has been checked to be fixed by
/// the norm operator.
#[derive(Clone, Debug)]
pub struct ColemanSeries {
    g: Series,
    norm_compatible: bool,
}

impl ColemanSeries {
    pub fn new(g: Series) -> Result<Self> {
        if g.coeff(0).valuation() != Some(0) {
            return Err(Error::NonUnitConstant);
        }
        Ok(ColemanSeries { g, norm_compatible: false })
    }

    /// `g_c = ((1+π)^c - 1)/π` for `c` prime to `p`.
    pub fn g_c(ctx: &'static PadicCtx, d: usize, c: i64) -> Result<Self> {
        if c.rem_euclid(ctx.p() as i64) == 0 {
            return Err(Error::InvalidArgument("c must be prime to p".into()));
        }
        let coeffs = (0..=d).map(|k| PadicScalar::from_bigint(ctx, &binomial_int(c, k + 1))).collect();
        let tail = if c > 0 && c as usize <= d + 1 { Tail::Exact } else { Tail::integral() };
        Self::new(Series::new(coeffs, tail))
    }

    /// `1 + π`.
    pub fn one_plus_pi(ctx: &'static PadicCtx, d: usize) -> Self {
        Self::new(Series::one_plus_pi_pow_int(ctx, d, 1)).expect("unit")
    }

    pub fn series(&self) -> &Series {
        &self.g
    }

    pub fn is_norm_compatible(&self) -> bool {
        self.norm_compatible
    }

    /// Products of norm-compatible series stay norm-compatible.
    pub fn mul(&self, o: &Self) -> Self {
        ColemanSeries { g: self.g.mul(&o.g), norm_compatible: self.norm_compatible && o.norm_compatible }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.g.inverse()? } else { self.g.clone() };
        Ok(ColemanSeries { g: base.pow(e.unsigned_abs() as u32), norm_compatible: self.norm_compatible })
    }

    /// Runs [`check_norm_compatible`] and records the verdict.
    pub fn checked(mut self) -> Result<Self> {
        self.norm_compatible = check_norm_compatible(&self.g)?;
        Ok(self)
    }
}

/// `(1+π) g'/g`.
pub fn dlog(g: &ColemanSeries) -> Result<Series> {
    Ok(g.g.deriv().mul(&g.g.inverse()?))
}

/// `N(g)`, defined by `N(g)((1+π)^p - 1) = Π_{ζ ∈ μ_p} g(ζ(1+π) - 1)`.
///
/// The factor at a primitive `ζ` is computed over `Z_p[ξ_1]` and the others
/// are its Galois conjugates; the product descends to `Z_p[[π]]` and `ψ`
/// undoes the `p`-th power substitution.
pub fn norm_operator(g: &Series) -> Result<Series> {
    let ctx = g.ctx();
    let p = ctx.p() as i64;
    let d = g.degree();
    let xi = CycloElt::zeta_pow(ctx, 1, 1);
    let one = CycloElt::one(ctx, 1);
    let sub = TruncSeries::from_poly(&one, vec![xi.sub(&one), xi.clone()], d);
    let lift = |c: &PadicScalar| CycloElt::from_scalar(1, c);
    let mut acc = TruncSeries::constant(&lift(g.coeff(d)), d);
    for m in (0..d).rev() {
        acc = acc.mul(&sub).add(&TruncSeries::constant(&lift(g.coeff(m)), d));
    }
    let mut shifted = acc;
    if g.tail() != Tail::Exact {
        let coeffs = shifted
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.cap_abs(g.tail().cap(ctx, d, |m| (m as i64 - k as i64) / (p - 1))))
            .collect();
        shifted = TruncSeries::new(coeffs, g.tail());
    }
    let mut prod = g.map(lift).mul(&shifted);
    for c in 2..p {
        prod = prod.mul(&shifted.map(|x| x.galois(c)));
    }
    let coeffs = prod.coeffs().iter().map(|c| c.to_scalar()).collect::<Result<Vec<_>>>()?;
    Ok(Series::new(coeffs, prod.tail()).psi())
}

/// `N(g) = g` on the degrees that `ψ` leaves reliable; when it holds,
/// `ψ(D log g) = D log g` is asserted as well.
pub fn check_norm_compatible(g: &Series) -> Result<bool> {
    let d = g.degree();
    let p = g.ctx().p() as usize;
    let reliable = if g.tail() == Tail::Exact { d } else { d / p };
    let n = norm_operator(g)?;
    let diff = n.sub(g);
    let fixed = (0..=reliable).all(|i| diff.coeff(i).is_zero());
    if fixed {
        let y = dlog(&ColemanSeries::new(g.clone())?)?;
        let gap = y.psi().sub(&y);
        let upto = if y.tail() == Tail::Exact { d } else { d / p };
        if let Some(i) = (0..upto).find(|&i| !gap.coeff(i).is_zero()) {
            return Err(Error::NotPsiFixed(gap.coeff(i).val_bound()));
        }
    }
    Ok(fixed)
}

/// Agreement of `ψ(y)` with `y` on the reliable degrees.
fn psi_defect(y: &Series) -> Option<i64> {
    let d = y.degree();
    let p = y.ctx().p() as usize;
    let upto = if y.tail() == Tail::Exact { d } else { d / p };
    let gap = y.psi().sub(y);
    (0..upto).find(|&i| !gap.coeff(i).is_zero()).map(|i| gap.coeff(i).val_bound())
}

/// `L(y) = 𝔐^{-1}((1 - φ) y)` for a rank-one `D_cris` basis vector.
#[derive(Clone, Debug, Serialize)]
pub struct RegulatorOutput {
    /// The `ψ = 0` series `(1 - φ) y`, the Amice transform of the measure.
    pub psi_zero: Series,
    /// The measure at finite level `level`.
    #[serde(skip)]
    pub measure: IwasawaElt,
    pub level: u32,
    /// Which basis vector `t^{-j} e_j` of `D_cris` the measure multiplies.
    pub dcris_basis_tag: i64,
    pub t_shift: i64,
}

pub fn cyclo_regulator(ctx: &Arc<IwasawaCtx>, y: &Series, level: u32) -> Result<RegulatorOutput> {
    if let Some(v) = psi_defect(y) {
        return Err(Error::NotPsiFixed(v));
    }
    let f = y.sub(&y.phi());
    let measure = IwasawaElt::mellin_inverse(ctx, &f, level)?;
    Ok(RegulatorOutput { psi_zero: f, measure, level, dcris_basis_tag: 0, t_shift: 0 })
}

impl RegulatorOutput {
    /// `∫ η dμ`, read directly off the `ψ = 0` series.
    pub fn evaluate(&self, ctx: &IwasawaCtx, eta: &DeRhamChar) -> Result<CycloElt> {
        measure_value(ctx, &self.psi_zero, eta)
    }

    /// The regulator of the `e_1`-twisted data: `ℓ_0 · Tw_{χ^{-1}}` on the
    /// measure, which is multiplication by `t` on its Amice transform.
    pub fn twist_up(&self) -> Self {
        let ctx = self.measure.ctx().clone();
        let measure = ell_element(&ctx, 0).mul(&self.measure.twist(-1));
        let t = Series::log1p(self.psi_zero.ctx(), self.psi_zero.degree());
        RegulatorOutput {
            psi_zero: t.mul(&self.psi_zero),
            measure,
            level: self.level,
            dcris_basis_tag: self.dcris_basis_tag + 1,
            t_shift: self.t_shift + 1,
        }
    }
}

/// `Ω_{V,h}(z) = ℓ_{h-1} ⋯ ℓ_0 (1 - λφ)^{-1}(z̃)` for the Amice transform
/// `z̃ = 𝔐(z)` and the `φ`-eigenvalue `λ` of the rank-one `D_cris`.
pub fn big_exponential(z_tilde: &Series, lambda: &PadicScalar, h: u32) -> Result<Series> {
    if h == 0 {
        return Err(Error::InvalidArgument("h must be at least 1".into()));
    }
    let mut y = z_tilde.solve_one_minus_lambda_phi(lambda)?;
    for j in 0..h as i64 {
        y = y.ell_apply(j);
    }
    Ok(y)
}

/// `Ω` on a measure, through its Amice transform.
pub fn big_exponential_of_measure(z: &IwasawaElt, lambda: &PadicScalar, h: u32) -> Result<Series> {
    big_exponential(&z.mellin(), lambda, h)
}

/// `ℓ_{h-1} ⋯ ℓ_0` acting on a series as `Π (t∂ - j)`.
pub fn ell_product_apply(f: &Series, h: u32) -> Series {
    (0..h as i64).fold(f.clone(), |acc, j| acc.ell_apply(j))
}

/// A `ψ = 0` series as `Σ_{i=1}^{p-1} (1+π)^i φ(h_i)`. On the parts `∂`,
/// `∂^{-1}` and multiplication by `t` act componentwise.
#[derive(Clone, Debug)]
pub struct PsiZeroParts {
    parts: Vec<Series>,
    degree: usize,
}

impl PsiZeroParts {
    /// `h_i = (1+π)^{-1} ψ((1+π)^{p-i} f)`, exact when `f` is a polynomial.
    pub fn split(f: &Series) -> Result<Self> {
        let ctx = f.ctx();
        let p = ctx.p() as i64;
        let d = f.degree();
        let psi = f.psi();
        if !psi.is_zero() {
            let digits = psi.coeffs().iter().map(|c| c.val_bound()).min().unwrap_or(0);
            return Err(Error::NotPsiKernel(digits));
        }
        let shift = Series::one_plus_pi_pow_int(ctx, d, -1);
        let parts = (1..p).map(|i| shift.mul(&Series::one_plus_pi_pow_int(ctx, d, p - i).mul(f).psi())).collect();
        Ok(PsiZeroParts { parts, degree: d })
    }

    pub fn join(&self) -> Series {
        let ctx = self.parts[0].ctx();
        self.parts.iter().enumerate().fold(Series::zero(ctx, self.degree), |acc, (k, h)| {
            acc.add(&Series::one_plus_pi_pow_int(ctx, self.degree, k as i64 + 1).mul(&h.phi()))
        })
    }

    fn map(&self, op: impl Fn(i64, &Series) -> Result<Series>) -> Result<Self> {
        let parts = self.parts.iter().enumerate().map(|(k, h)| op(k as i64 + 1, h)).collect::<Result<_>>()?;
        Ok(PsiZeroParts { parts, degree: self.degree })
    }

    /// `h_i ↦ i h_i + p ∂h_i`.
    pub fn deriv(&self) -> Self {
        self.map(|i, h| {
            let ctx = h.ctx();
            Ok(h.scale(&PadicScalar::from_i64(ctx, i)).add(&h.deriv().scale(&PadicScalar::from_i64(ctx, ctx.p() as i64))))
        })
        .expect("infallible")
    }

    /// `h_i ↦ Σ_k (-p/i)^k ∂^k h_i / i`.
    pub fn deriv_inverse(&self) -> Result<Self> {
        self.map(|i, h| {
            let ctx = h.ctx();
            let prec = ctx.prec() as i64;
            let inv_i = PadicScalar::from_i64(ctx, i).inv()?;
            let ratio = PadicScalar::from_i64(ctx, -(ctx.p() as i64)).mul(&inv_i);
            let mut term = h.scale(&inv_i);
            let mut acc = term.clone();
            for _ in 0..prec {
                term = term.deriv().scale(&ratio);
                if term.coeffs().iter().all(|c| c.is_zero() || c.val_bound() >= prec) {
                    break;
                }
                acc = acc.add(&term);
            }
            Ok(acc)
        })
    }

    /// Multiplication by `t`, using `t = φ(t)/p`.
    pub fn mul_t(&self) -> Self {
        self.map(|_, h| {
            let ctx = h.ctx();
            let t = Series::log1p(ctx, h.degree());
            Ok(t.mul(h).scale(&PadicScalar::p_power(ctx, -1)))
        })
        .expect("infallible")
    }

    /// `ℓ_j = t∂ - j`.
    pub fn ell_apply(&self, j: i64) -> Self {
        let td = self.deriv().mul_t();
        let mut out = td;
        for (o, h) in out.parts.iter_mut().zip(&self.parts) {
            *o = o.sub(&h.scale(&PadicScalar::from_i64(h.ctx(), j)));
        }
        out
    }
}

/// `∂^{-1}` on `ψ = 0`: each summand `(1+π)^i φ(f_i)` integrates to
/// `(1+π)^i φ(h_i)` with `(i + p∂) h_i = f_i`.
pub fn deriv_inverse(f: &Series) -> Result<Series> {
    Ok(PsiZeroParts::split(f)?.deriv_inverse()?.join())
}

/// `r` applications of `x ↦ ℓ_0(∂^{-1} x)`, the twist by `e_1`.
pub fn twist_ladder(f: &Series, r: u32) -> Result<Series> {
    let mut x = PsiZeroParts::split(f)?;
    for _ in 0..r {
        x = x.deriv_inverse()?.ell_apply(0);
    }
    Ok(x.join())
}

/// The route `(ℓ_0 ⋯ ℓ_{r-1}) ∂^{-r}`.
pub fn ladder_via_ell_product(f: &Series, r: u32) -> Result<Series> {
    let mut x = PsiZeroParts::split(f)?;
    for _ in 0..r {
        x = x.deriv_inverse()?;
    }
    for j in 0..r as i64 {
        x = x.ell_apply(j);
    }
    Ok(x.join())
}

/// The route `t^r ∂^r ∂^{-r}`.
pub fn ladder_via_t_power(f: &Series, r: u32) -> Result<Series> {
    let mut x = PsiZeroParts::split(f)?;
    for _ in 0..r {
        x = x.deriv_inverse()?;
    }
    for _ in 0..r {
        x = x.deriv();
    }
    for _ in 0..r {
        x = x.mul_t();
    }
    Ok(x.join())
}

/// What multiplies the regulator value at `η`: `Γ*(1+j) ε(η^{-1}, -ξ) φ^n`
/// for `n ≥ 1`, and `Γ*(1+j) (1 - p^j φ)(1 - p^{-1-j} φ^{-1})^{-1}` for
/// `n = 0` unless one of the Euler factors vanishes.
#[derive(Clone, Debug, Serialize)]
pub struct Prefactor {
    pub gamma_star: String,
    pub scalar: EpsFactor,
    pub euler_ratio: Option<UnramifiedElt>,
    pub bad_one: bool,
    pub bad_pinv: bool,
    /// Whether the value must be read from the derivative at `η`.
    pub use_derivative: bool,
}

pub fn interpolation_prefactor(ctx: &IwasawaCtx, module: &CrysModule, eta: &DeRhamChar) -> Result<Prefactor> {
    if module.dim() != 1 {
        return Err(Error::InvalidArgument("interpolation prefactors are for rank-one modules".into()));
    }
    let j = eta.weight;
    let n = eta.conductor();
    let gstar = crate::crystalline::gamma_star(1 + j);
    let gamma_part = EpsFactor {
        cyclo_part: CycloElt::from_scalar(0, &PadicScalar::from_rational(ctx.padic(), &gstar)),
        ..EpsFactor::one(ctx.padic())
    };
    let mut scalar = gamma_part.mul(&eps_de_rham_char(ctx, &eta.inverse(), XiSign::Minus)?)?;
    let lambda = module.phi_matrix()[0][0].clone();
    let (mut euler_ratio, mut bad_one, mut bad_pinv) = (None, false, false);
    if n >= 1 {
        let v = crate::crystalline::valuation(&lambda).ok_or(Error::DivisionByZero)?;
        let unit = lambda.mul(&UnramifiedElt::from_scalar_in(module.field().clone(), &PadicScalar::p_power(ctx.padic(), -v)));
        let phi_part = EpsFactor { p_power: v * n as i64, unram_part: unit.pow(n as u64), ..EpsFactor::one(ctx.padic()) };
        scalar = scalar.mul(&phi_part)?;
    } else {
        let ops = module.euler_operators(j)?;
        bad_one = ops.bad_one;
        bad_pinv = ops.bad_pinv;
        if !bad_pinv {
            euler_ratio = Some(ops.det_one_minus_phi.div(&ops.det_one_minus_dual)?);
        }
    }
    Ok(Prefactor {
        gamma_star: crate::padic::rational_string(&gstar),
        scalar,
        euler_ratio,
        bad_one,
        bad_pinv,
        use_derivative: bad_one || bad_pinv,
    })
}

/// `Γ*(r)` as a `p`-adic number.
pub fn gamma_star_scalar(ctx: &'static PadicCtx, r: i64) -> PadicScalar {
    let q: BigRational = crate::crystalline::gamma_star(r);
    PadicScalar::from_rational(ctx, &q)
}

/// `(-γ_{-1})^d (-1)^{m(V)}` in `Λ(Γ)`.
pub fn eps_sign_element(ctx: &Arc<IwasawaCtx>, d: usize, weight_sum: i64) -> Result<IwasawaElt> {
    let minus_one = PadicScalar::from_i64(ctx.padic(), -1);
    let g = IwasawaElt::group_element(ctx, &minus_one)?.neg();
    let mut x = g.pow(d as u32);
    if weight_sum.rem_euclid(2) == 1 {
        x = x.neg();
    }
    Ok(x)
}

/// `Θ = L(y) / ℓ(V)` with the ε-scalar pieces `(-γ_{-1})^d (-1)^{m(V)}`
/// and `ε_dR = t^{m(V)}`.
#[derive(Clone, Debug)]
pub struct ThetaOutput {
    pub theta: FractionElt,
    pub sign: IwasawaElt,
    pub eps_dr: EpsFactor,
}

pub fn theta_and_eps_scalar(ctx: &Arc<IwasawaCtx>, module: &CrysModule, reg: &RegulatorOutput) -> Result<ThetaOutput> {
    if module.dim() != 1 {
        return Err(Error::InvalidArgument("Θ is assembled for rank-one modules".into()));
    }
    let ell = ell_of_rep(ctx, module.weights());
    let mut num = vec![reg.measure.clone()];
    num.extend(ell.denominator_factors().iter().cloned());
    let den = ell.numerator_factors().to_vec();
    let theta = FractionElt::ratio(num, den)?;
    let sign = eps_sign_element(ctx, module.dim(), module.weight_sum())?;
    Ok(ThetaOutput { theta, sign, eps_dr: crate::epsilon::eps_dr_scalar(module) })
}

/// `evaluate(L(D log g_c), χ^j)`, the value tied to `(1 - p^j)(c^{j+1} - 1) B_{j+1}/(j+1)`.
pub fn bernoulli_pipeline(ctx: &Arc<IwasawaCtx>, c: i64, j: i64, level: u32) -> Result<PadicScalar> {
    let pc = ctx.padic();
    let g = ColemanSeries::g_c(pc, ctx.series_degree(), c)?;
    let y = dlog(&g)?;
    let reg = cyclo_regulator(ctx, &y, level)?;
    reg.evaluate(ctx, &DeRhamChar::chi_power(pc, j))?.to_scalar()
}
