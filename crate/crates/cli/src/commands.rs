use std::sync::Arc;

use iwk_core::crystalline::CrysModule;
use iwk_core::epsilon::{eps_crystalline_twist, eps_de_rham_char, eps_dr_scalar, gauss_sum, xi_change_check, XiSign};
use iwk_core::iwasawa::{ell_of_rep, DeRhamChar, FractionElt, IwasawaCtx};
use iwk_core::oracle::kubota_leopoldt_value;
use iwk_core::padic::{rational_string, PadicScalar};
use iwk_core::regulator::{
    big_exponential, cyclo_regulator, dlog, ell_product_apply, eps_sign_element, interpolation_prefactor, theta_and_eps_scalar, ColemanSeries,
};
use iwk_core::suite::{cyclo_string, fraction_agreement, run_suite, Check, Group, SuiteConfig};
use iwk_core::{Error, UnramField};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub type Outcome = (Option<Value>, Vec<Check>);

pub fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    SuiteConfig::new(cfg.p, cfg.prec, cfg.deg, cfg.tdeg, cfg.level, cfg.seed)
}

fn context(cfg: &RunConfig) -> Result<Arc<IwasawaCtx>, Error> {
    suite_config(cfg).context(cfg.p)
}

pub fn suite(cfg: &RunConfig, jobs: usize) -> Result<Outcome, Error> {
    let sc = suite_config(cfg);
    let checks = if jobs <= 1 {
        run_suite(&sc)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let groups: Vec<Vec<Check>> = pool.install(|| Group::ALL.par_iter().map(|g| g.run(&sc)).collect::<Result<_, _>>())?;
        groups.into_iter().flatten().collect()
    };
    Ok((None, checks))
}

pub fn zeta(cfg: &RunConfig, c: i64, j: i64) -> Result<Outcome, Error> {
    if j < 1 {
        return Err(Error::InvalidArgument(format!("j must be at least 1, got {j}")));
    }
    if c < 2 || c % cfg.p as i64 == 0 {
        return Err(Error::InvalidArgument(format!("c must be an integer at least 2 prime to p, got {c}")));
    }
    let ctx = context(cfg)?;
    let tol = suite_config(cfg).tolerances.zeta;
    let value = iwk_core::regulator::bernoulli_pipeline(&ctx, c, j, 1)?;
    let exact = kubota_leopoldt_value(cfg.p, c, j as usize);
    let digits = value.agree(&PadicScalar::from_rational(ctx.padic(), &exact));
    let matched = digits >= tol;
    let result = json!({
        "value_valuation": value.valuation(),
        "value_digits": value.digits(),
        "oracle": rational_string(&exact),
        "match": matched,
    });
    let check = Check::new(
        format!("zeta.p{}.c{c}.j{j}", cfg.p),
        "Bernoulli values of the cyclotomic regulator",
        matched,
        value.to_string(),
        rational_string(&exact),
        digits,
    );
    Ok((Some(result), vec![check]))
}

/// The character of conductor `p^level` with the given tame index and wild
/// exponent.
fn character(cfg: &RunConfig, j: i64, tame: i64, level: u32, wild: i64) -> Result<DeRhamChar, Error> {
    let ctx = iwk_core::padic::PadicCtx::get(cfg.p, cfg.prec)?;
    match level {
        0 => DeRhamChar::new(ctx, j, 0, 0, 0),
        1 => {
            if tame.rem_euclid(cfg.p as i64 - 1) == 0 {
                return Err(Error::InvalidArgument("conductor p needs a nontrivial tame index".into()));
            }
            DeRhamChar::new(ctx, j, tame, 0, 0)
        }
        n => DeRhamChar::new(ctx, j, tame, n - 1, wild),
    }
}

pub fn gauss(cfg: &RunConfig, tame: i64, level: u32, wild: i64) -> Result<Outcome, Error> {
    let ctx = context(cfg)?;
    let eta = character(cfg, 0, tame, level, wild)?;
    let n = eta.conductor();
    let tau = gauss_sum(&ctx, &eta, XiSign::Plus)?;
    let tau_inv = gauss_sum(&ctx, &eta.inverse(), XiSign::Plus)?;
    let norm = tau.mul(&tau_inv);
    let target = eta.finite_value(&ctx, -1)?.lift(n).scale(&PadicScalar::from_i64(ctx.padic(), (cfg.p as i64).pow(n)));
    let diff = norm.sub(&target);
    let mut checks = vec![Check::new(
        "gauss.norm".into(),
        "Gauss sum norm",
        diff.is_zero(),
        "tau(eta)*tau(eta^-1)".into(),
        cyclo_string(&target),
        diff.abs_prec(),
    )];
    let minus = gauss_sum(&ctx, &eta, XiSign::Minus)?;
    let flipped = eta.finite_value(&ctx, -1)?.lift(n).mul(&tau);
    let d = minus.sub(&flipped);
    checks.push(Check::new("gauss.minus_xi".into(), "Gauss sum for the inverse additive character", d.is_zero(), cyclo_string(&minus), cyclo_string(&flipped), d.abs_prec()));
    if n > 0 {
        for c in [2, 1 + cfg.p as i64] {
            let x = xi_change_check(&ctx, &eta, c)?;
            checks.push(Check::new(
                format!("gauss.xi_change.c{c}"),
                "Gauss sum under a change of xi",
                x.equal,
                cyclo_string(&x.lhs),
                cyclo_string(&x.rhs),
                x.lhs.sub(&x.rhs).abs_prec(),
            ));
        }
    }
    let result = json!({
        "conductor_exponent": n,
        "tau": cyclo_string(&tau),
        "tau_digits": tau.digit_arrays(),
        "tau_squared": cyclo_string(&tau.mul(&tau)),
    });
    Ok((Some(result), checks))
}

fn tate_sum(field: &Arc<UnramField>, weights: &[i64]) -> Result<CrysModule, Error> {
    let mut acc = CrysModule::tate(field, weights[0]);
    for &w in &weights[1..] {
        acc = acc.direct_sum(&CrysModule::tate(field, w))?;
    }
    Ok(acc)
}

pub fn eps(cfg: &RunConfig, j: i64, tame: i64, level: u32, wild: i64, weights: &[i64]) -> Result<Outcome, Error> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument("need at least one weight".into()));
    }
    let ctx = context(cfg)?;
    let eta = character(cfg, j, tame, level, wild)?;
    let field = UnramField::generate(ctx.padic(), 1, 0)?;
    let module = tate_sum(&field, weights)?;
    let plus = eps_de_rham_char(&ctx, &eta, XiSign::Plus)?;
    let minus = eps_de_rham_char(&ctx, &eta, XiSign::Minus)?;
    let whole = eps_crystalline_twist(&ctx, &module, &eta, XiSign::Plus)?;
    let mut product = iwk_core::epsilon::EpsFactor::one(ctx.padic());
    for &w in weights {
        product = product.mul(&eps_crystalline_twist(&ctx, &CrysModule::tate(&field, w), &eta, XiSign::Plus)?)?;
    }
    let digits = whole.agree(&product)?;
    let tol = suite_config(cfg).tolerances.identity;
    let checks = vec![Check::new(
        "eps.additive".into(),
        "epsilon factor of a direct sum",
        digits >= tol,
        format!("eps(V(eta)) for weights {weights:?}"),
        "product of rank-one factors".into(),
        digits,
    )];
    let result = json!({
        "eps_plus": plus,
        "eps_minus": minus,
        "eps_twist": whole,
        "eps_dr": eps_dr_scalar(&module),
    });
    Ok((Some(result), checks))
}

pub fn regulator(cfg: &RunConfig, c: i64) -> Result<Outcome, Error> {
    if c < 2 || c % cfg.p as i64 == 0 {
        return Err(Error::InvalidArgument(format!("c must be an integer at least 2 prime to p, got {c}")));
    }
    let ctx = context(cfg)?;
    let pc = ctx.padic();
    let tol = suite_config(cfg).tolerances;
    let y = dlog(&ColemanSeries::g_c(pc, cfg.deg, c)?)?;
    let reg = cyclo_regulator(&ctx, &y, 1)?;
    let mut checks = Vec::new();
    let mut values = Vec::new();
    for j in 1..=cfg.level.max(1) as i64 {
        let v = reg.evaluate(&ctx, &DeRhamChar::chi_power(pc, j))?.to_scalar()?;
        let exact = kubota_leopoldt_value(cfg.p, c, j as usize);
        let digits = v.agree(&PadicScalar::from_rational(pc, &exact));
        checks.push(Check::new(format!("regulator.value.j{j}"), "Bernoulli values of the cyclotomic regulator", digits >= tol.zeta, v.to_string(), rational_string(&exact), digits));
        values.push(json!({"j": j, "value": v}));
        let up = reg.twist_up().evaluate(&ctx, &DeRhamChar::chi_power(pc, j))?;
        let down = reg.evaluate(&ctx, &DeRhamChar::chi_power(pc, j - 1))?.scale(&PadicScalar::from_i64(pc, j));
        let digits = up.agree(&down);
        checks.push(Check::new(
            format!("regulator.twist.j{j}"),
            "twisted regulator values",
            digits >= tol.zeta,
            cyclo_string(&up),
            cyclo_string(&down),
            digits,
        ));
    }
    let one = PadicScalar::one(pc);
    for h in 1..=3u32 {
        let deg = cfg.deg - h as usize;
        let diff = big_exponential(&reg.psi_zero, &one, h)?.sub(&ell_product_apply(&y, h));
        let prec = diff.precision_upto(deg);
        checks.push(Check::new(
            format!("regulator.round_trip.h{h}"),
            "big exponential inverts the regulator",
            diff.is_zero_upto(deg) && prec >= tol.round_trip,
            format!("Omega_{h}(L(y))"),
            format!("ell_{}..ell_0 y", h - 1),
            prec,
        ));
    }
    Ok((Some(json!({"c": c, "values": values})), checks))
}

pub fn theta(cfg: &RunConfig, c: i64, r: i64) -> Result<Outcome, Error> {
    if c < 2 || c % cfg.p as i64 == 0 {
        return Err(Error::InvalidArgument(format!("c must be an integer at least 2 prime to p, got {c}")));
    }
    let ctx = context(cfg)?;
    let pc = ctx.padic();
    let y = dlog(&ColemanSeries::g_c(pc, cfg.deg, c)?)?;
    let reg = cyclo_regulator(&ctx, &y, 1)?;
    let field = UnramField::generate(pc, 1, 0)?;
    let module = CrysModule::tate(&field, r);
    let out = theta_and_eps_scalar(&ctx, &module, &reg)?;
    let back = out.theta.mul(&ell_of_rep(&ctx, &[r]));
    let measure = FractionElt::from_elt(reg.measure.clone());
    let (zero, digits) = fraction_agreement(&back, &measure);
    let attainable = reg.measure.precision().min(suite_config(cfg).tolerances.identity);
    let sign = eps_sign_element(&ctx, 1, r)?;
    let mut checks = vec![
        Check::new(
            "theta.measure".into(),
            "Theta times ell(V) is the regulator measure",
            zero && digits >= attainable,
            "Theta*ell(V)".into(),
            "L(y)".into(),
            digits,
        ),
        Check::new(
            "theta.sign".into(),
            "sign element of the epsilon scalar",
            out.sign.equals(&sign),
            "sign of Theta".into(),
            format!("(-gamma_-1)*(-1)^{r}"),
            out.sign.sub(&sign).precision(),
        ),
        Check::new(
            "theta.t_exponent".into(),
            "t-exponent of the de Rham scalar",
            out.eps_dr.t_exponent == r,
            out.eps_dr.t_exponent.to_string(),
            r.to_string(),
            cfg.prec as i64,
        ),
    ];
    let mut prefactors = Vec::new();
    for j in 0..=cfg.level as i64 {
        let pre = interpolation_prefactor(&ctx, &module, &DeRhamChar::chi_power(pc, j))?;
        checks.push(Check::new(
            format!("theta.prefactor.j{j}"),
            "Euler factors at chi^j",
            pre.use_derivative == (pre.bad_one || pre.bad_pinv),
            format!("bad_one={} bad_pinv={}", pre.bad_one, pre.bad_pinv),
            format!("use_derivative={}", pre.use_derivative),
            cfg.prec as i64,
        ));
        prefactors.push(json!({"j": j, "prefactor": pre}));
    }
    Ok((Some(json!({"r": r, "eps_dr": out.eps_dr, "prefactors": prefactors})), checks))
}
