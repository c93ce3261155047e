//! Identity and value checks shared by the command-line report and the
//! acceptance harness. Every group takes its sizes and tolerances from a
//! [`SuiteConfig`] and returns checks in a stable order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crystalline::{factorials_check, valuation, CrysModule};
use crate::cyclo::CycloElt;
use crate::epsilon::{gauss_sum, xi_change_check, XiSign};
use crate::error::Result;
use crate::iwasawa::{ell_element, ell_of_rep, fudge_closed_form, fudge_factor, mu_element, DeRhamChar, FractionElt, IwasawaCtx, IwasawaElt};
use crate::oracle::kubota_leopoldt_value;
use crate::padic::{rational_string, PadicScalar};
use crate::regulator::{
    big_exponential, cyclo_regulator, dlog, ell_product_apply, eps_sign_element, ladder_via_ell_product, ladder_via_t_power, twist_ladder,
    ColemanSeries,
};
use crate::series::Series;
use crate::unramified::UnramField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub paper_anchor: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    pub precision_attained: i64,
}

impl Check {
    pub fn new(id: String, anchor: &str, pass: bool, lhs: String, rhs: String, precision: i64) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Check { id, paper_anchor: anchor.to_string(), status, lhs, rhs, precision_attained: precision }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Minimal digits each group must attain.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub zeta: i64,
    pub identity: i64,
    pub factorials: i64,
    pub fudge: i64,
    pub round_trip: i64,
    pub derivative: i64,
    pub ladder: i64,
}

impl Tolerances {
    /// Defaults from the precision ledger: `t`-multiplication costs about
    /// `log_p D` digits per step, and the round trip and ladder take up to
    /// three steps.
    pub fn derived(p: u32, prec: u32, series_degree: usize) -> Self {
        let n = prec as i64;
        let mut log_d = 0i64;
        let mut pk = p as usize;
        while pk <= series_degree {
            log_d += 1;
            pk *= p as usize;
        }
        Tolerances {
            zeta: n - 5,
            identity: n - 5,
            factorials: n - 8,
            fudge: n - 6,
            round_trip: n - 3 * log_d,
            derivative: n - 5,
            ladder: n - 3 * log_d,
        }
    }
}

/// Trial counts per group.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteSize {
    pub identity_trials: usize,
    pub duality_sets: usize,
    pub factorial_cases: usize,
    pub round_trip_inputs: usize,
    pub derivative_inputs: usize,
    pub finite_difference_inputs: usize,
    pub modules: usize,
    pub ladder_inputs: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        SuiteSize {
            identity_trials: 100,
            duality_sets: 20,
            factorial_cases: 200,
            round_trip_inputs: 50,
            derivative_inputs: 50,
            finite_difference_inputs: 10,
            modules: 50,
            ladder_inputs: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub p: u32,
    pub prec: u32,
    pub series_degree: usize,
    pub t_degree: usize,
    pub level: u32,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub size: SuiteSize,
}

impl SuiteConfig {
    pub fn new(p: u32, prec: u32, series_degree: usize, t_degree: usize, level: u32, seed: u64) -> Self {
        SuiteConfig { p, prec, series_degree, t_degree, level, seed, tolerances: Tolerances::derived(p, prec, series_degree), size: SuiteSize::default() }
    }

    /// The shared context for prime `p` at this configuration's sizes.
    pub fn context(&self, p: u32) -> Result<Arc<IwasawaCtx>> {
        static CACHE: OnceLock<Mutex<HashMap<(u32, u32, usize, usize), Arc<IwasawaCtx>>>> = OnceLock::new();
        let key = (p, self.prec, self.t_degree, self.series_degree);
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = cache.lock().expect("cache lock").get(&key) {
            return Ok(c.clone());
        }
        let c = IwasawaCtx::new(p, self.prec, self.t_degree, self.series_degree)?;
        cache.lock().expect("cache lock").insert(key, c.clone());
        Ok(c)
    }

    fn rng(&self, group: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ group.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// The check groups in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Zeta,
    Identities,
    Factorials,
    Gauss,
    Fudge,
    RoundTrip,
    Derivative,
    Determinant,
    Ladder,
}

impl Group {
    pub const ALL: [Group; 9] = [
        Group::Zeta,
        Group::Identities,
        Group::Factorials,
        Group::Gauss,
        Group::Fudge,
        Group::RoundTrip,
        Group::Derivative,
        Group::Determinant,
        Group::Ladder,
    ];

    pub fn run(self, cfg: &SuiteConfig) -> Result<Vec<Check>> {
        match self {
            Group::Zeta => zeta_checks(cfg, &[3, 5, 7], 2, 1..=6),
            Group::Identities => identity_checks(cfg),
            Group::Factorials => factorial_checks(cfg),
            Group::Gauss => gauss_checks(cfg, &[3, 5]),
            Group::Fudge => fudge_checks(cfg, 5),
            Group::RoundTrip => round_trip_checks(cfg),
            Group::Derivative => derivative_checks(cfg),
            Group::Determinant => determinant_checks(cfg),
            Group::Ladder => ladder_checks(cfg),
        }
    }
}

/// Runs every group and sorts the checks by id.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for g in Group::ALL {
        out.extend(g.run(cfg)?);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

pub fn cyclo_string(x: &CycloElt) -> String {
    if x.level() == 0 {
        return x.coords()[0].to_string();
    }
    let terms: Vec<String> = x.coords().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| format!("({c})*xi^{i}")).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Exact valuation of a cyclotomic element in coordinates, or its absolute
/// precision when it vanishes.
fn cyclo_valuation(x: &CycloElt) -> i64 {
    if x.is_zero() {
        return x.abs_prec();
    }
    x.coords().iter().filter_map(|c| if c.is_zero() { None } else { c.valuation() }).min().unwrap_or(x.abs_prec())
}

fn random_coeffs<R: Rng>(rng: &mut R, max_len: usize, bound: i64) -> Vec<i64> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| rng.random_range(-bound..=bound)).collect()
}

fn random_elt<R: Rng>(ctx: &Arc<IwasawaCtx>, rng: &mut R) -> IwasawaElt {
    let comps = (0..ctx.delta_count()).map(|_| Series::from_i64s(ctx.padic(), ctx.store_degree(), &random_coeffs(rng, 12, 200))).collect();
    IwasawaElt::from_components(ctx, comps).expect("component count")
}

fn random_series<R: Rng>(ctx: &IwasawaCtx, rng: &mut R, max_len: usize) -> Series {
    Series::from_i64s(ctx.padic(), ctx.series_degree(), &random_coeffs(rng, max_len, 50))
}

fn int(ctx: &IwasawaCtx, k: i64) -> PadicScalar {
    PadicScalar::from_i64(ctx.padic(), k)
}

fn sign(even: bool) -> i64 {
    if even {
        1
    } else {
        -1
    }
}

/// Regulator values of `dlog g_c` at `χ^j` against the Bernoulli oracle.
pub fn zeta_checks(cfg: &SuiteConfig, primes: &[u32], c: i64, js: std::ops::RangeInclusive<usize>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &p in primes {
        let ctx = cfg.context(p)?;
        let pc = ctx.padic();
        let y = dlog(&ColemanSeries::g_c(pc, cfg.series_degree, c)?)?;
        let reg = cyclo_regulator(&ctx, &y, 1)?;
        for j in js.clone() {
            let got = reg.evaluate(&ctx, &DeRhamChar::chi_power(pc, j as i64))?.to_scalar()?;
            let exact = kubota_leopoldt_value(p, c, j);
            let want = PadicScalar::from_rational(pc, &exact);
            let digits = got.agree(&want);
            out.push(Check::new(
                format!("zeta.p{p}.c{c}.j{j}"),
                "Bernoulli values of the cyclotomic regulator",
                digits >= cfg.tolerances.zeta,
                got.to_string(),
                rational_string(&exact),
                digits,
            ));
        }
    }
    Ok(out)
}

fn series_check(id: String, anchor: &str, diff: &Series, deg: usize, tol: i64, lhs: &str, rhs: &str) -> Check {
    let prec = diff.precision_upto(deg);
    Check::new(id, anchor, diff.is_zero_upto(deg) && prec >= tol, lhs.into(), rhs.into(), prec)
}

/// Minimal valuation of the known nonzero coefficients up to `D_T`.
fn elt_valuation(x: &IwasawaElt) -> i64 {
    let d = x.ctx().t_degree();
    x.components()
        .iter()
        .flat_map(|c| c.coeffs().iter().take(d + 1))
        .filter(|c| !c.is_zero())
        .filter_map(|c| c.valuation())
        .min()
        .unwrap_or(0)
}

/// Cross-multiplied fraction identity, with digits counted relative to the
/// size of the cross products.
/// Cross-multiplied fraction identity, with digits counted relative to the
/// size of the cross products.
pub fn fraction_agreement(lhs: &FractionElt, rhs: &FractionElt) -> (bool, i64) {
    let diff = lhs.cross_difference(rhs);
    let scale = elt_valuation(&lhs.numerator().mul(&rhs.denominator()));
    (diff.is_zero(), diff.precision() - scale)
}

fn fraction_check(id: String, anchor: &str, lhs: &FractionElt, rhs: &FractionElt, tol: i64, lhs_text: String, rhs_text: String) -> Check {
    let (zero, prec) = fraction_agreement(lhs, rhs);
    Check::new(id, anchor, zero && prec >= tol, lhs_text, rhs_text, prec)
}

fn elt_check(id: String, anchor: &str, diff: &IwasawaElt, tol: i64, lhs: String, rhs: String) -> Check {
    let prec = diff.precision();
    Check::new(id, anchor, diff.is_zero() && prec >= tol, lhs, rhs, prec)
}

/// Involution, `μ` recursion, duality, Mellin compatibilities and `ψ`
/// laws on random inputs.
pub fn identity_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let tol = cfg.tolerances.identity;
    let trials = cfg.size.identity_trials;
    let d = ctx.series_degree();
    let mut rng = cfg.rng(2);
    let mut out = Vec::new();
    for k in 0..trials {
        let x = random_elt(&ctx, &mut rng);
        let j = rng.random_range(-4i64..=4);
        let lhs = x.mul(&ell_element(&ctx, j)).involution();
        let rhs = x.involution().mul(&ell_element(&ctx, -j)).neg();
        out.push(elt_check(
            format!("identity.involution.{k:03}"),
            "involution of ell_j",
            &lhs.sub(&rhs),
            tol,
            format!("iota(x*ell_{j})"),
            format!("-iota(x)*ell_{}", -j),
        ));
    }
    for k in 0..trials {
        let x = FractionElt::from_elt(random_elt(&ctx, &mut rng));
        let n = rng.random_range(-3i64..=3);
        let lhs = x.mul(&mu_element(&ctx, n + 1));
        let rhs = x.mul(&FractionElt::from_elt(ell_element(&ctx, 0))).mul(&mu_element(&ctx, n).twist(-1));
        out.push(fraction_check(
            format!("identity.mu_recursion.{k:03}"),
            "mu recursion under the inverse twist",
            &lhs,
            &rhs,
            tol,
            format!("x*mu_{}", n + 1),
            format!("x*ell_0*Tw(mu_{n})"),
        ));
    }
    for k in 0..cfg.size.duality_sets {
        let dim = rng.random_range(1..=5usize);
        let weights: Vec<i64> = (0..dim).map(|_| rng.random_range(-5i64..=8)).collect();
        let dual: Vec<i64> = weights.iter().map(|n| 1 - n).collect();
        let lhs = ell_of_rep(&ctx, &weights).mul(&ell_of_rep(&ctx, &dual).involution());
        let total: i64 = weights.iter().sum();
        let corrected = sign((total + dim as i64) % 2 == 0);
        let rhs = FractionElt::from_elt(ell_element(&ctx, 0).pow(dim as u32).scale(&int(&ctx, corrected)));
        out.push(fraction_check(
            format!("identity.duality.{k:03}"),
            "duality of ell(V) with sign (-1)^(sum n_i + d)",
            &lhs,
            &rhs,
            tol,
            format!("ell(V)*iota(ell(V*(1))) for weights {weights:?}"),
            format!("{corrected}*ell_0^{dim}"),
        ));
    }
    for k in 0..trials {
        let x = random_elt(&ctx, &mut rng);
        let diff = x.twist(1).mellin().sub(&x.mellin().deriv());
        out.push(series_check(format!("identity.mellin_twist.{k:03}"), "Mellin transform of the chi twist", &diff, d - 1, tol, "M(Tw(x))", "d(M(x))"));
    }
    for k in 0..trials {
        let x = random_elt(&ctx, &mut rng);
        let diff = ell_element(&ctx, 0).mul(&x).mellin().sub(&x.mellin().ell_apply(0));
        out.push(series_check(format!("identity.mellin_ell0.{k:03}"), "ell_0 acts as t times d", &diff, d - 1, tol, "M(ell_0*x)", "t*d(M(x))"));
    }
    for k in 0..trials {
        let f = random_series(&ctx, &mut rng, 12);
        let diff = f.phi().psi().sub(&f);
        out.push(series_check(format!("identity.psi_phi.{k:03}"), "psi is a left inverse of phi", &diff, d, tol, "psi(phi(f))", "f"));
    }
    for k in 0..trials {
        let f = random_series(&ctx, &mut rng, 12);
        let g = random_series(&ctx, &mut rng, 8);
        let diff = f.mul(&g.phi()).psi().sub(&f.psi().mul(&g));
        out.push(series_check(format!("identity.projection.{k:03}"), "projection formula for psi", &diff, d, tol, "psi(f*phi(g))", "psi(f)*g"));
    }
    Ok(out)
}

/// The duality identity with the sign `(-1)^{Σ n_i}` only, counted over
/// the same weight sets as [`identity_checks`].
pub fn duality_stated_sign(cfg: &SuiteConfig) -> Result<(usize, usize)> {
    let ctx = cfg.context(cfg.p)?;
    let mut rng = cfg.rng(2);
    for _ in 0..cfg.size.identity_trials {
        random_elt(&ctx, &mut rng);
        rng.random_range(-4i64..=4);
    }
    for _ in 0..cfg.size.identity_trials {
        random_elt(&ctx, &mut rng);
        rng.random_range(-3i64..=3);
    }
    let mut holds = 0;
    for _ in 0..cfg.size.duality_sets {
        let dim = rng.random_range(1..=5usize);
        let weights: Vec<i64> = (0..dim).map(|_| rng.random_range(-5i64..=8)).collect();
        let dual: Vec<i64> = weights.iter().map(|n| 1 - n).collect();
        let lhs = ell_of_rep(&ctx, &weights).mul(&ell_of_rep(&ctx, &dual).involution());
        let stated = sign(weights.iter().sum::<i64>() % 2 == 0);
        let rhs = FractionElt::from_elt(ell_element(&ctx, 0).pow(dim as u32).scale(&int(&ctx, stated)));
        if lhs.equals(&rhs) {
            holds += 1;
        }
    }
    Ok((holds, cfg.size.duality_sets))
}

/// Leading terms of `ℓ(V)` at `χ^j` against exact factorials.
pub fn factorial_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let mut rng = cfg.rng(3);
    let mut out = Vec::new();
    for k in 0..cfg.size.factorial_cases {
        let dim = rng.random_range(1..=5usize);
        let weights: Vec<i64> = (0..dim).map(|_| rng.random_range(-5i64..=8)).collect();
        let j = rng.random_range(-6i64..=9);
        let r = factorials_check(&ctx, &weights, j)?;
        out.push(Check::new(
            format!("factorials.{k:03}"),
            "leading term of ell(V) against factorials",
            r.passes(cfg.tolerances.factorials),
            format!("weights {weights:?}, j = {j}: {}", r.lhs),
            r.rhs.clone(),
            r.agreement,
        ));
    }
    Ok(out)
}

/// Primitive characters of conductor `p` and `p^2`.
pub fn primitive_characters(ctx: &IwasawaCtx) -> Vec<DeRhamChar> {
    let p = ctx.p() as i64;
    let pc = ctx.padic();
    let mut out: Vec<DeRhamChar> = (1..p - 1).map(|t| DeRhamChar::new(pc, 0, t, 0, 0).expect("tame")).collect();
    for t in 0..p - 1 {
        for e in 1..p {
            out.push(DeRhamChar::new(pc, 0, t, 1, e).expect("wild"));
        }
    }
    out
}

fn char_label(eta: &DeRhamChar) -> String {
    format!("t{}.m{}.e{}", eta.tame, eta.wild_level, eta.wild_exponent)
}

/// Norm and `ξ`-change laws of Gauss sums, exactly.
pub fn gauss_checks(cfg: &SuiteConfig, primes: &[u32]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &p in primes {
        let ctx = cfg.context(p)?;
        for eta in primitive_characters(&ctx) {
            let n = eta.conductor();
            let lhs = gauss_sum(&ctx, &eta, XiSign::Plus)?.mul(&gauss_sum(&ctx, &eta.inverse(), XiSign::Plus)?);
            let p_n = PadicScalar::from_i64(ctx.padic(), (p as i64).pow(n));
            let rhs = eta.finite_value(&ctx, -1)?.lift(n).scale(&p_n);
            let diff = lhs.sub(&rhs);
            out.push(Check::new(
                format!("gauss.p{p}.norm.{}", char_label(&eta)),
                "Gauss sum norm",
                diff.is_zero(),
                cyclo_string(&lhs),
                cyclo_string(&rhs),
                diff.abs_prec(),
            ));
            for c in [2, 1 + p as i64] {
                let x = xi_change_check(&ctx, &eta, c)?;
                out.push(Check::new(
                    format!("gauss.p{p}.xi_change.c{c}.{}", char_label(&eta)),
                    "Gauss sum under a change of xi",
                    x.equal,
                    cyclo_string(&x.lhs),
                    cyclo_string(&x.rhs),
                    x.lhs.sub(&x.rhs).abs_prec(),
                ));
            }
        }
    }
    Ok(out)
}

/// `A_{h,η}` from leading terms against its closed form.
pub fn fudge_checks(cfg: &SuiteConfig, max_h: u32) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let p = ctx.p() as i64;
    let mut out = Vec::new();
    for h in 1..=max_h {
        for j in 0..h as i64 {
            for t in 0..p - 1 {
                let eta = DeRhamChar::new(ctx.padic(), j, t, 0, 0)?;
                let got = fudge_factor(&ctx, h, &eta)?;
                let want = CycloElt::from_scalar(0, &fudge_closed_form(&ctx, h, &eta)?);
                let digits = got.agree(&want);
                out.push(Check::new(
                    format!("fudge.h{h}.j{j}.t{t}"),
                    "fudge factor closed form",
                    digits >= cfg.tolerances.fudge,
                    cyclo_string(&got),
                    cyclo_string(&want),
                    digits,
                ));
            }
        }
    }
    Ok(out)
}

/// `Π g_c^{a_c} (1+π)^b` over `c ∈ {2, 3, 4, 6, 7}` prime to `p`.
pub fn random_coleman<R: Rng>(ctx: &IwasawaCtx, rng: &mut R) -> Result<(ColemanSeries, String)> {
    let pc = ctx.padic();
    let d = ctx.series_degree();
    let b = rng.random_range(-3i64..=3);
    let mut acc = ColemanSeries::one_plus_pi(pc, d).pow(b)?;
    let mut label = format!("(1+pi)^{b}");
    for c in [2i64, 3, 4, 6, 7] {
        let a = rng.random_range(-2i64..=2);
        if a == 0 || c % ctx.p() as i64 == 0 {
            continue;
        }
        acc = acc.mul(&ColemanSeries::g_c(pc, d, c)?.pow(a)?);
        label.push_str(&format!("*g_{c}^{a}"));
    }
    Ok((acc, label))
}

/// `Ω(L(y)) = ℓ_{h-1} ⋯ ℓ_0 y` on `ψ = 1` inputs from norm-compatible units.
pub fn round_trip_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let mut rng = cfg.rng(6);
    let one = PadicScalar::one(ctx.padic());
    let mut out = Vec::new();
    for k in 0..cfg.size.round_trip_inputs {
        let (g, label) = random_coleman(&ctx, &mut rng)?;
        let y = dlog(&g)?;
        let reg = cyclo_regulator(&ctx, &y, 1)?;
        for h in 1..=3u32 {
            let diff = big_exponential(&reg.psi_zero, &one, h)?.sub(&ell_product_apply(&y, h));
            out.push(series_check(
                format!("round_trip.{k:03}.h{h}"),
                "big exponential inverts the regulator",
                &diff,
                ctx.series_degree() - h as usize,
                cfg.tolerances.round_trip,
                &format!("Omega_{h}(L(dlog {label}))"),
                &format!("ell_{}..ell_0 dlog {label}", h - 1),
            ));
        }
    }
    Ok(out)
}

fn random_character<R: Rng>(ctx: &IwasawaCtx, rng: &mut R) -> Result<DeRhamChar> {
    let p = ctx.p() as i64;
    let j = rng.random_range(-2i64..=4);
    let t = rng.random_range(0..p - 1);
    if rng.random_bool(0.5) {
        DeRhamChar::new(ctx.padic(), j, t, 0, 0)
    } else {
        DeRhamChar::new(ctx.padic(), j, t, 1, rng.random_range(1..p))
    }
}

/// The derivative law at `η` and finite differences along `⟨χ⟩^{p^k}`.
pub fn derivative_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let p = ctx.p() as i64;
    let mut rng = cfg.rng(7);
    let mut out = Vec::new();
    for k in 0..cfg.size.derivative_inputs {
        let g = random_elt(&ctx, &mut rng);
        let eta = random_character(&ctx, &mut rng)?;
        let q = eta.killing_exponent() as i64;
        let eta_gamma = ctx.gamma_pow(eta.weight * q);
        let factor = IwasawaElt::gamma_one_power(&ctx, q).sub(&IwasawaElt::scalar(&ctx, &eta_gamma));
        let lhs = factor.mul(&g).derivative_at(&eta)?;
        let rhs = g.evaluate_char(&eta)?.scale(&eta_gamma.mul(ctx.log_gamma()).mul_i64(q));
        let digits = lhs.agree(&rhs);
        out.push(Check::new(
            format!("derivative.law.{k:03}"),
            "derivative of (gamma - eta(gamma)) g at eta",
            digits >= cfg.tolerances.derivative,
            cyclo_string(&lhs),
            cyclo_string(&rhs),
            digits,
        ));
        if k >= cfg.size.finite_difference_inputs {
            continue;
        }
        let base = g.evaluate_char(&eta)?;
        let slope = g.derivative_at(&eta)?;
        for e in 3..=6u32 {
            let s = p.pow(e);
            let moved = DeRhamChar::new(ctx.padic(), eta.weight + s, (eta.tame - s).rem_euclid(p - 1), eta.wild_level, eta.wild_exponent)?;
            let step = PadicScalar::from_i64(ctx.padic(), s);
            let rest = g.evaluate_char(&moved)?.sub(&base).sub(&slope.scale(&step));
            let v = cyclo_valuation(&rest);
            let predicted = 2 * e as i64 + 2;
            out.push(Check::new(
                format!("derivative.finite_difference.{k:03}.k{e}"),
                "finite differences along the cyclotomic direction",
                v >= predicted.min(rest.abs_prec()),
                format!("v(mu(eta<chi>^p^{e}) - mu(eta) - p^{e} mu'(eta)) = {v}"),
                format!(">= {predicted}"),
                v,
            ));
        }
    }
    Ok(out)
}

/// `v_p(det φ) = -m(V)`, `m(V(η)) = m(V) + jd` and the sign element under
/// `Tw_{η^{-1}}` on random admissible modules.
pub fn determinant_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let pc = ctx.padic();
    let fields = [UnramField::generate(pc, 1, 0)?, UnramField::generate(pc, 2, 0)?];
    let mut rng = cfg.rng(8);
    let mut out = Vec::new();
    for k in 0..cfg.size.modules {
        let field = &fields[rng.random_range(0..fields.len())];
        let dim = rng.random_range(1..=4usize);
        let weights: Vec<i64> = (0..dim).map(|_| rng.random_range(-3i64..=5)).collect();
        let module = CrysModule::random_admissible(field, &weights, &mut rng)?;
        let m = module.weight_sum();
        let v = valuation(&module.det_phi()?).unwrap_or(i64::MAX);
        out.push(Check::new(
            format!("determinant.valuation.{k:03}"),
            "valuation of det phi",
            v == -m,
            format!("v(det phi) = {v}"),
            format!("-m(V) = {}", -m),
            cfg.prec as i64,
        ));
        let j = rng.random_range(-3i64..=3);
        let eta = DeRhamChar::chi_power(pc, j);
        let twisted = module.unramified_twist(&eta)?.module;
        let mt = twisted.weight_sum();
        let vt = valuation(&twisted.det_phi()?).unwrap_or(i64::MAX);
        let want = m + j * dim as i64;
        out.push(Check::new(
            format!("determinant.twist_weight.{k:03}"),
            "weight sum of a twist",
            mt == want && vt == -want,
            format!("m(V(eta)) = {mt}, v(det phi) = {vt}"),
            format!("m(V) + jd = {want}"),
            cfg.prec as i64,
        ));
        let moved = eps_sign_element(&ctx, dim, m)?.twist_char(&eta.inverse())?;
        let target = eps_sign_element(&ctx, dim, mt)?;
        let parity = eps_sign_element(&ctx, dim, m)?.scale(&int(&ctx, sign((j * dim as i64) % 2 == 0)));
        let diff = moved.sub(&target);
        out.push(Check::new(
            format!("determinant.sign.{k:03}"),
            "sign element under the inverse twist",
            diff.is_zero() && moved.equals(&parity),
            format!("Tw(eps sign of V), d = {dim}, j = {j}"),
            "(-1)^(jd) * eps sign of V = eps sign of V(eta)".to_string(),
            diff.precision(),
        ));
    }
    Ok(out)
}

/// The `r`-fold twist ladder against the `ℓ`-product and `t^r` routes.
pub fn ladder_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ctx = cfg.context(cfg.p)?;
    let mut rng = cfg.rng(9);
    let mut out = Vec::new();
    for k in 0..cfg.size.ladder_inputs {
        let f0 = random_series(&ctx, &mut rng, 12);
        let f = f0.sub(&f0.psi().phi());
        for r in 1..=3u32 {
            let deg = ctx.series_degree() - r as usize;
            let ladder = twist_ladder(&f, r)?;
            let via_ell = ladder_via_ell_product(&f, r)?;
            let via_t = ladder_via_t_power(&f, r)?;
            let a = ladder.sub(&via_ell);
            let b = ladder.sub(&via_t);
            let prec = a.precision_upto(deg).min(b.precision_upto(deg));
            out.push(Check::new(
                format!("ladder.{k:03}.r{r}"),
                "twist ladder against the ell product",
                a.is_zero_upto(deg) && b.is_zero_upto(deg) && prec >= cfg.tolerances.ladder,
                format!("(ell_0 d^-1)^{r} f"),
                format!("ell_0..ell_{} d^-{r} f = t^{r} d^{r} d^-{r} f", r - 1),
                prec,
            ));
        }
    }
    Ok(out)
}
