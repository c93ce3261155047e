use std::process::ExitCode;
use std::time::{Duration, Instant};

use iwk_core::suite::{duality_stated_sign, Check, Group, SuiteConfig, SuiteSize, Tolerances};

const P: u32 = 5;
const PREC: u32 = 30;
const SERIES_DEGREE: usize = 64;
const T_DEGREE: usize = 32;
const LEVEL: u32 = 3;
const SEED: u64 = 20_240_601;

const ZETA_DIGITS: i64 = 25;
const ZETA_SECONDS: u64 = 10;
const IDENTITY_DIGITS: i64 = 25;
const FACTORIAL_DIGITS: i64 = 22;
const FUDGE_DIGITS: i64 = 24;
const ROUND_TRIP_DIGITS: i64 = 25;
const DERIVATIVE_DIGITS: i64 = 25;
const LADDER_DIGITS: i64 = 25;

fn config() -> SuiteConfig {
    let mut cfg = SuiteConfig::new(P, PREC, SERIES_DEGREE, T_DEGREE, LEVEL, SEED);
    cfg.tolerances = Tolerances {
        zeta: ZETA_DIGITS,
        identity: IDENTITY_DIGITS,
        factorials: FACTORIAL_DIGITS,
        fudge: FUDGE_DIGITS,
        round_trip: ROUND_TRIP_DIGITS,
        derivative: DERIVATIVE_DIGITS,
        ladder: LADDER_DIGITS,
    };
    cfg.size = SuiteSize {
        identity_trials: 100,
        duality_sets: 20,
        factorial_cases: 200,
        round_trip_inputs: 50,
        derivative_inputs: 50,
        finite_difference_inputs: 10,
        modules: 50,
        ladder_inputs: 20,
    };
    cfg
}

struct Outcome {
    pass: bool,
    line: String,
}

fn summarize(checks: &[Check], prefix: &str) -> (usize, usize, i64) {
    let scoped: Vec<&Check> = checks.iter().filter(|c| c.id.starts_with(prefix)).collect();
    let passed = scoped.iter().filter(|c| c.passed()).count();
    let min = scoped.iter().map(|c| c.precision_attained).min().unwrap_or(0);
    (passed, scoped.len(), min)
}

fn failures(checks: &[Check]) -> String {
    let ids: Vec<&str> = checks.iter().filter(|c| !c.passed()).take(5).map(|c| c.id.as_str()).collect();
    if ids.is_empty() {
        String::new()
    } else {
        format!("; first failures {ids:?}")
    }
}

fn run(cfg: &SuiteConfig, group: Group) -> (Vec<Check>, Duration) {
    let start = Instant::now();
    let checks = group.run(cfg).unwrap_or_else(|e| panic!("{group:?}: {e}"));
    (checks, start.elapsed())
}

fn criterion_1(cfg: &SuiteConfig) -> Outcome {
    let (checks, time) = run(cfg, Group::Zeta);
    let (passed, total, min) = summarize(&checks, "zeta.");
    let anchor = checks.iter().find(|c| c.id == "zeta.p5.c2.j1").expect("anchor cell");
    let anchor_ok = anchor.rhs == "-1" && anchor.passed();
    let fast = time < Duration::from_secs(ZETA_SECONDS);
    Outcome {
        pass: passed == total && anchor_ok && fast,
        line: format!(
            "Kubota-Leopoldt values: {passed}/{total} cells, min {min} digits (need {ZETA_DIGITS}); p=5 c=2 j=1 gives {} vs {}; {:.2} s (limit {ZETA_SECONDS} s){}",
            anchor.lhs,
            anchor.rhs,
            time.as_secs_f64(),
            failures(&checks)
        ),
    }
}

fn criterion_2(cfg: &SuiteConfig) -> Outcome {
    let (checks, _) = run(cfg, Group::Identities);
    let parts = ["involution", "mu_recursion", "duality", "mellin_twist", "mellin_ell0", "psi_phi", "projection"];
    let mut all = true;
    let mut text = Vec::new();
    for part in parts {
        let (passed, total, min) = summarize(&checks, &format!("identity.{part}."));
        all &= passed == total;
        text.push(format!("{part} {passed}/{total} (min {min})"));
    }
    let (stated, sets) = duality_stated_sign(cfg).expect("duality");
    Outcome {
        pass: all,
        line: format!(
            "identity suite, need {IDENTITY_DIGITS} digits: {}; duality checked with sign (-1)^(sum n_i + d), the sign (-1)^(sum n_i) alone holds on {stated}/{sets} sets{}",
            text.join(", "),
            failures(&checks)
        ),
    }
}

fn simple(cfg: &SuiteConfig, group: Group, prefix: &str, what: &str, need: &str) -> Outcome {
    let (checks, _) = run(cfg, group);
    let (passed, total, min) = summarize(&checks, prefix);
    Outcome { pass: passed == total, line: format!("{what}: {passed}/{total}, min {min} digits (need {need}){}", failures(&checks)) }
}

fn criterion_7(cfg: &SuiteConfig) -> Outcome {
    let (checks, _) = run(cfg, Group::Derivative);
    let (lp, lt, lmin) = summarize(&checks, "derivative.law.");
    let (fp, ft, _) = summarize(&checks, "derivative.finite_difference.");
    Outcome {
        pass: lp == lt && fp == ft,
        line: format!(
            "derivative law {lp}/{lt}, min {lmin} digits (need {DERIVATIVE_DIGITS}); finite differences k=3..6 at valuation >= 2k+2: {fp}/{ft}{}",
            failures(&checks)
        ),
    }
}

fn criterion_8(cfg: &SuiteConfig) -> Outcome {
    let (checks, _) = run(cfg, Group::Determinant);
    let (vp, vt, _) = summarize(&checks, "determinant.valuation.");
    let (wp, wt, _) = summarize(&checks, "determinant.twist_weight.");
    let (sp, st, _) = summarize(&checks, "determinant.sign.");
    Outcome {
        pass: vp == vt && wp == wt && sp == st,
        line: format!("det phi valuation {vp}/{vt}, twisted weight sum {wp}/{wt}, sign under twist {sp}/{st}{}", failures(&checks)),
    }
}

fn main() -> ExitCode {
    let cfg = config();
    let outcomes = [
        criterion_1(&cfg),
        criterion_2(&cfg),
        simple(&cfg, Group::Factorials, "factorials.", "factorial identity", &FACTORIAL_DIGITS.to_string()),
        simple(&cfg, Group::Gauss, "gauss.", "Gauss sum laws for p in {3, 5}", "exact"),
        simple(&cfg, Group::Fudge, "fudge.", "fudge factor closed form, h <= 5", &FUDGE_DIGITS.to_string()),
        simple(&cfg, Group::RoundTrip, "round_trip.", "Omega after L, h in {1, 2, 3}, degree D - h", &ROUND_TRIP_DIGITS.to_string()),
        criterion_7(&cfg),
        criterion_8(&cfg),
        simple(&cfg, Group::Ladder, "ladder.", "twist ladder, r <= 3, degree D - r", &LADDER_DIGITS.to_string()),
    ];
    let mut ok = true;
    for (i, o) in outcomes.iter().enumerate() {
        println!("criterion {} {}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.line);
        ok &= o.pass;
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
