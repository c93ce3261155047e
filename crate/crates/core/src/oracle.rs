//! Brute-force reference computations used by the test suites.
//!
//! Nothing here calls into the rest of the crate: values are computed with
//! exact rationals or plain modular integers so that they can check the
//! production code independently.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `B_n` from `Σ_{k≤n} C(n+1, k) B_k = 0`, with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> BigRational {
    let mut b: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=n {
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom(m + 1, k)) * bk;
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b[n].clone()
}

/// `B_n` with the generating-function convention `t e^t/(e^t - 1)`,
/// so `B_1 = +1/2`.
pub fn bernoulli_plus(n: usize) -> BigRational {
    if n == 1 {
        BigRational::new(BigInt::one(), BigInt::from(2))
    } else {
        bernoulli(n)
    }
}

/// `ζ(-j) = -B_{j+1}/(j+1)` for `j ≥ 1`.
pub fn zeta_neg_int(j: usize) -> BigRational {
    assert!(j >= 1, "zeta_neg_int needs j >= 1");
    -bernoulli(j + 1) / BigRational::from_integer(BigInt::from(j + 1))
}

/// `(1 - p^j)(c^{j+1} - 1) B_{j+1}/(j+1)`.
pub fn kubota_leopoldt_value(p: u32, c: i64, j: usize) -> BigRational {
    let pj = BigInt::from(p).pow(j as u32);
    let cj = BigInt::from(c).pow(j as u32 + 1);
    let factor = (BigInt::one() - pj) * (cj - BigInt::one());
    BigRational::from_integer(factor) * bernoulli(j + 1) / BigRational::from_integer(BigInt::from(j + 1))
}

/// `Π_{(q-1) | n} q`, the predicted denominator of `B_n` for even `n ≥ 2`.
pub fn von_staudt_denominator(n: usize) -> BigInt {
    let mut prod = BigInt::one();
    for q in 2..=n + 1 {
        let prime = (2..q).all(|d| q % d != 0);
        if prime && n.is_multiple_of(q - 1) {
            prod *= q;
        }
    }
    prod
}

/// Elements of `Q(ζ_p)` as vectors of length `p - 1` in the power basis.
type Cyc = Vec<BigRational>;

fn cyc_zero(p: usize) -> Cyc {
    vec![BigRational::zero(); p - 1]
}

fn cyc_reduce(p: usize, mut v: Vec<BigRational>) -> Cyc {
    // X^{p-1} = -(1 + X + … + X^{p-2})
    while v.len() > p - 1 {
        let top = v.pop().expect("nonempty");
        let shift = v.len() - (p - 1);
        for k in 0..p - 1 {
            v[shift + k] -= &top;
        }
    }
    v.resize(p - 1, BigRational::zero());
    v
}

fn cyc_mul(p: usize, a: &Cyc, b: &Cyc) -> Cyc {
    let mut out = vec![BigRational::zero(); 2 * p - 3];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    cyc_reduce(p, out)
}

fn cyc_zeta_pow(p: usize, a: usize) -> Cyc {
    let mut v = vec![BigRational::zero(); p];
    v[a % p] = BigRational::one();
    cyc_reduce(p, v)
}

/// `ψ(f)` for a polynomial `f(π)` with rational coefficients, from the
/// literal average `p^{-1} Σ_{ζ^p = 1} f(ζ(1+π) - 1)` followed by solving
/// `g((1+π)^p - 1) = average` coefficient by coefficient.
///
/// Returns `None` when the average does not descend to `Q`.
pub fn brute_psi(p: u32, f: &[BigRational]) -> Option<Vec<BigRational>> {
    let p = p as usize;
    let deg = f.len().saturating_sub(1);
    let mut avg: Vec<Cyc> = vec![cyc_zero(p); deg + 1];
    for a in 0..p {
        let zeta = cyc_zeta_pow(p, a);
        let mut zeta_minus_one = zeta.clone();
        zeta_minus_one[0] -= BigRational::one();
        // powers of (ζ - 1) + ζ π as polynomials in π
        let mut power: Vec<Cyc> = vec![cyc_zero(p); deg + 1];
        power[0][0] = BigRational::one();
        for (k, c) in f.iter().enumerate() {
            if k > 0 {
                let mut next = vec![cyc_zero(p); deg + 1];
                for i in 0..=deg {
                    let t = cyc_mul(p, &power[i], &zeta_minus_one);
                    for (slot, x) in next[i].iter_mut().zip(t) {
                        *slot += x;
                    }
                    if i < deg {
                        let u = cyc_mul(p, &power[i], &zeta);
                        for (slot, x) in next[i + 1].iter_mut().zip(u) {
                            *slot += x;
                        }
                    }
                }
                power = next;
            }
            if c.is_zero() {
                continue;
            }
            for i in 0..=deg {
                for (slot, x) in avg[i].iter_mut().zip(&power[i]) {
                    *slot += c * x;
                }
            }
        }
    }
    let pr = BigRational::from_integer(BigInt::from(p));
    let mut h = Vec::with_capacity(deg + 1);
    for c in avg {
        if c[1..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        h.push(&c[0] / &pr);
    }
    // columns of φ(π)^m with φ(π) = (1+π)^p - 1
    let phi_pi: Vec<BigRational> = (0..=deg).map(|k| if k == 0 { BigRational::zero() } else { BigRational::from_integer(binom(p, k)) }).collect();
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(deg + 1);
    let mut cur = vec![BigRational::zero(); deg + 1];
    cur[0] = BigRational::one();
    for _ in 0..=deg {
        cols.push(cur.clone());
        let mut next = vec![BigRational::zero(); deg + 1];
        for (i, x) in cur.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in phi_pi.iter().enumerate() {
                if i + j > deg {
                    break;
                }
                next[i + j] += x * y;
            }
        }
        cur = next;
    }
    let mut g = vec![BigRational::zero(); deg + 1];
    for k in 0..=deg {
        let mut r = h[k].clone();
        for (m, gm) in g.iter().enumerate().take(k) {
            r -= gm * &cols[m][k];
        }
        g[k] = r / &cols[k][k];
    }
    Some(g)
}

fn modpow(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    b.mod_floor(m).modpow(e, m)
}

/// `ω(a)` modulo `p^prec`, as `a^{p^{prec-1}}`.
pub fn teichmuller_mod(p: u32, a: i64, prec: u32) -> BigInt {
    let m = BigInt::from(p).pow(prec);
    modpow(&BigInt::from(a), &BigInt::from(p).pow(prec - 1), &m)
}

/// `s` with `a / ω(a) ≡ (1+p)^s (mod p^n)`, reduced mod `p^{n-1}`.
pub fn principal_log_index(p: u32, a: i64, n: u32) -> u64 {
    let pn = (p as i64).pow(n);
    let w = teichmuller_mod(p, a, n);
    let m = BigInt::from(pn);
    let w_inv = w.extended_gcd(&m).x.mod_floor(&m);
    let target = (BigInt::from(a) * w_inv).mod_floor(&m);
    let mut acc = BigInt::one();
    let g = BigInt::from(1 + p as i64);
    for s in 0..(pn / p as i64).max(1) {
        if acc == target {
            return s as u64;
        }
        acc = (acc * &g).mod_floor(&m);
    }
    panic!("no discrete logarithm");
}

/// Coefficients (mod `p^prec`, power basis modulo `Φ_{p^n}`) of
/// `τ(η) τ(η^{-1}) - η(-1) p^n` for the character
/// `η(a) = ω(a)^tame · ζ_{p^{n-1}}^{wild · s(a)}` of conductor `p^n`.
/// The identity holds when every returned coefficient is zero.
pub fn gauss_norm_defect(p: u32, n: u32, tame: i64, wild: i64, prec: u32) -> Vec<BigInt> {
    let pn = (p as i64).pow(n);
    let m = BigInt::from(p).pow(prec);
    let q = p as i64 - 1;
    let sum = |t: i64, e: i64| -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); pn as usize];
        for a in 1..pn {
            if a % p as i64 == 0 {
                continue;
            }
            let w = teichmuller_mod(p, a, prec);
            let coeff = modpow(&w, &BigInt::from((-t).rem_euclid(q)), &m);
            let s = if n >= 2 { principal_log_index(p, a, n) as i64 } else { 0 };
            let exp = (a - p as i64 * e * s).rem_euclid(pn);
            v[exp as usize] = (&v[exp as usize] + coeff).mod_floor(&m);
        }
        v
    };
    let x = sum(tame, wild);
    let y = sum(-tame, -wild);
    let mut prod = vec![BigInt::zero(); pn as usize];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            let k = (i + j) % pn as usize;
            prod[k] = (&prod[k] + a * b).mod_floor(&m);
        }
    }
    // η(-1) = ω(-1)^tame = (-1)^tame; the wild part is trivial at -1.
    let sign = if tame.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
    prod[0] = (&prod[0] - sign * BigInt::from(p).pow(n)).mod_floor(&m);
    // reduce modulo Φ_{p^n}: X^{(p-1)p^{n-1} + r} = -Σ_{k<p-1} X^{k p^{n-1} + r}
    let step = (p as usize).pow(n - 1);
    let dim = (p as usize - 1) * step;
    for i in (dim..pn as usize).rev() {
        let c = std::mem::take(&mut prod[i]);
        if c.is_zero() {
            continue;
        }
        for k in 0..p as usize - 1 {
            let j = i - dim + k * step;
            prod[j] = (&prod[j] - &c).mod_floor(&m);
        }
    }
    prod.truncate(dim);
    prod.into_iter()
        .map(|c| {
            let c = c.mod_floor(&m);
            if (&c * 2) > m {
                c - &m
            } else {
                c
            }
        })
        .collect()
}
