//! Filtered `φ`-modules of crystalline representations: the Frobenius
//! matrix over an unramified field, Hodge–Tate weights, `Γ*` factors,
//! Euler operators and unramified twists.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::iwasawa::{ell_of_rep, DeRhamChar, IwasawaCtx};
use crate::padic::{rational_string, PadicScalar};
use crate::unramified::{solve_frobenius_multiplicative, UnramField, UnramifiedElt};

pub type Matrix = Vec<Vec<UnramifiedElt>>;

/// Valuation of a nonzero element, `None` when it is indistinguishable from zero.
pub fn valuation(x: &UnramifiedElt) -> Option<i64> {
    x.coords().iter().filter(|c| !c.is_zero()).map(|c| c.val_bound()).min()
}

pub fn identity(field: &Arc<UnramField>, d: usize) -> Matrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { UnramifiedElt::one_in(field.clone()) } else { UnramifiedElt::zero_in(field.clone()) })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = UnramifiedElt::zero_in(a[i][0].field().clone());
                    for (k, row) in b.iter().enumerate() {
                        acc = acc.add(&a[i][k].mul(&row[j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.sub(y)).collect()).collect()
}

pub fn mat_scale(a: &Matrix, c: &UnramifiedElt) -> Matrix {
    a.iter().map(|r| r.iter().map(|x| x.mul(c)).collect()).collect()
}

/// Row reduction with pivots of minimal valuation.
fn eliminate(a: &Matrix, rhs: Option<Matrix>) -> Result<(UnramifiedElt, Option<Matrix>)> {
    let n = a.len();
    let field = a[0][0].field().clone();
    let mut m = a.clone();
    let mut r = rhs;
    let mut det = UnramifiedElt::one_in(field.clone());
    for col in 0..n {
        let piv = (col..n).filter_map(|i| valuation(&m[i][col]).map(|v| (v, i))).min();
        let Some((_, piv)) = piv else {
            return Ok((UnramifiedElt::zero_in(field), None));
        };
        if piv != col {
            m.swap(piv, col);
            if let Some(r) = r.as_mut() {
                r.swap(piv, col);
            }
            det = det.neg();
        }
        let pivot = m[col][col].clone();
        det = det.mul(&pivot);
        let inv = pivot.inv()?;
        for c in 0..n {
            m[col][c] = m[col][c].mul(&inv);
        }
        if let Some(r) = r.as_mut() {
            for c in 0..r[col].len() {
                r[col][c] = r[col][c].mul(&inv);
            }
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for c in 0..n {
                let t = m[col][c].mul(&f);
                m[i][c] = m[i][c].sub(&t);
            }
            if let Some(r) = r.as_mut() {
                for c in 0..r[col].len() {
                    let t = r[col][c].mul(&f);
                    r[i][c] = r[i][c].sub(&t);
                }
            }
        }
    }
    Ok((det, r))
}

pub fn mat_det(a: &Matrix) -> Result<UnramifiedElt> {
    Ok(eliminate(a, None)?.0)
}

pub fn mat_inverse(a: &Matrix) -> Result<Matrix> {
    let field = a[0][0].field().clone();
    match eliminate(a, Some(identity(&field, a.len())))? {
        (_, Some(inv)) => Ok(inv),
        _ => Err(Error::DivisionByZero),
    }
}

/// `Γ*(r)`: `(r - 1)!` for `r ≥ 1`, `(-1)^r / (-r)!` for `r ≤ 0`.
pub fn gamma_star(r: i64) -> BigRational {
    let fact = |n: i64| (1..=n).fold(BigInt::one(), |acc, k| acc * k);
    if r > 0 {
        BigRational::from_integer(fact(r - 1))
    } else {
        let sign = if r % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        BigRational::new(sign, fact(-r))
    }
}

/// `Π_i Γ*(n_i)^{-1}` over a weight multiset.
pub fn gamma_factor_of(weights: &[i64]) -> BigRational {
    weights.iter().fold(BigRational::one(), |acc, &n| acc / gamma_star(n))
}

/// `(1 - p^j φ)` and `(1 - p^{-1-j} φ^{-1})` with their determinants.
#[derive(Clone, Debug)]
pub struct EulerOperators {
    pub one_minus_phi: Matrix,
    pub one_minus_dual: Matrix,
    pub det_one_minus_phi: UnramifiedElt,
    pub det_one_minus_dual: UnramifiedElt,
    pub bad_one: bool,
    pub bad_pinv: bool,
}

/// `D_cris(V)` with its Frobenius matrix and Hodge–Tate weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrysModule {
    field: Arc<UnramField>,
    phi: Matrix,
    weights: Vec<i64>,
}

impl Serialize for CrysModule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct FieldInfo {
            p: u32,
            #[serde(rename = "N")]
            prec: u32,
            f: usize,
        }
        let ctx = self.field.ctx();
        let phi: Vec<Vec<&[PadicScalar]>> = self.phi.iter().map(|r| r.iter().map(|x| x.coords()).collect()).collect();
        let mut st = s.serialize_struct("CrysModule", 4)?;
        st.serialize_field("d", &self.dim())?;
        st.serialize_field("weights", &self.weights)?;
        st.serialize_field("phi_matrix", &phi)?;
        st.serialize_field("field", &FieldInfo { p: ctx.p(), prec: ctx.prec(), f: self.field.degree() })?;
        st.end()
    }
}

impl CrysModule {
    /// Checks the shape and `v_p(det φ) = -Σ n_i`.
    pub fn new(phi: Matrix, weights: Vec<i64>) -> Result<Self> {
        let d = weights.len();
        if d == 0 || phi.len() != d || phi.iter().any(|r| r.len() != d) {
            return Err(Error::Incompatible(format!("phi must be {d} x {d} and nonempty")));
        }
        let field = phi[0][0].field().clone();
        if phi.iter().flatten().any(|x| x.field() != &field) {
            return Err(Error::Incompatible("entries live in different unramified fields".into()));
        }
        let expected = -weights.iter().sum::<i64>();
        let found = valuation(&mat_det(&phi)?).unwrap_or(i64::MAX);
        if found != expected {
            return Err(Error::DetValuation { found, expected });
        }
        Ok(CrysModule { field, phi, weights })
    }

    /// Rank one with `φ = c`.
    pub fn rank_one(c: UnramifiedElt, weight: i64) -> Result<Self> {
        Self::new(vec![vec![c]], vec![weight])
    }

    /// `Q_p(r)` over `field`: `φ = p^{-r}`.
    pub fn tate(field: &Arc<UnramField>, r: i64) -> Self {
        let c = UnramifiedElt::from_scalar_in(field.clone(), &PadicScalar::p_power(field.ctx(), -r));
        Self::rank_one(c, r).expect("valuation matches")
    }

    /// `φ = U · diag(p^{-n_i} u_i) · W` with unimodular `U, W`.
    pub fn random_admissible<R: Rng>(field: &Arc<UnramField>, weights: &[i64], rng: &mut R) -> Result<Self> {
        let d = weights.len();
        let ctx = field.ctx();
        let p = ctx.p() as i64;
        let mut rand_elt = |unit: bool| {
            let coords = (0..field.degree())
                .map(|i| {
                    let mut k = rng.random_range(-50i64..50);
                    if unit && i == 0 && k.rem_euclid(p) == 0 {
                        k += 1;
                    }
                    if unit && i > 0 {
                        k *= p;
                    }
                    PadicScalar::from_i64(ctx, k)
                })
                .collect();
            UnramifiedElt::from_coords(field.clone(), coords).expect("degree matches")
        };
        let mut lower = identity(field, d);
        let mut upper = identity(field, d);
        let mut diag = identity(field, d);
        for i in 0..d {
            for j in 0..i {
                lower[i][j] = rand_elt(false);
                upper[j][i] = rand_elt(false);
            }
            let scale = UnramifiedElt::from_scalar_in(field.clone(), &PadicScalar::p_power(ctx, -weights[i]));
            diag[i][i] = rand_elt(true).mul(&scale);
        }
        let phi = mat_mul(&mat_mul(&lower, &diag), &upper);
        Self::new(phi, weights.to_vec())
    }

    pub fn field(&self) -> &Arc<UnramField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn phi_matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// `m(V) = Σ n_i`.
    pub fn weight_sum(&self) -> i64 {
        self.weights.iter().sum()
    }

    /// Multiplicity of each jump of the Hodge filtration.
    pub fn fil_jumps(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for &n in &self.weights {
            *m.entry(n).or_insert(0) += 1;
        }
        m
    }

    pub fn det_phi(&self) -> Result<UnramifiedElt> {
        mat_det(&self.phi)
    }

    /// `Γ_L(V) = Π_r Γ*(r)^{-n(r)}`.
    pub fn gamma_factor(&self) -> BigRational {
        gamma_factor_of(&self.weights)
    }

    pub fn direct_sum(&self, o: &Self) -> Result<Self> {
        if self.field != o.field {
            return Err(Error::Incompatible("direct sum over different fields".into()));
        }
        let (a, b) = (self.dim(), o.dim());
        let zero = UnramifiedElt::zero_in(self.field.clone());
        let mut phi = vec![vec![zero; a + b]; a + b];
        for i in 0..a {
            for j in 0..a {
                phi[i][j] = self.phi[i][j].clone();
            }
        }
        for i in 0..b {
            for j in 0..b {
                phi[a + i][a + j] = o.phi[i][j].clone();
            }
        }
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&o.weights);
        Self::new(phi, weights)
    }

    /// Euler operators twisted by `χ^j`: `1 - p^j φ` and `1 - p^{-1-j} φ^{-1}`.
    pub fn euler_operators(&self, j: i64) -> Result<EulerOperators> {
        let ctx = self.field.ctx();
        let id = identity(&self.field, self.dim());
        let pj = UnramifiedElt::from_scalar_in(self.field.clone(), &PadicScalar::p_power(ctx, j));
        let pdual = UnramifiedElt::from_scalar_in(self.field.clone(), &PadicScalar::p_power(ctx, -1 - j));
        let one_minus_phi = mat_sub(&id, &mat_scale(&self.phi, &pj));
        let one_minus_dual = mat_sub(&id, &mat_scale(&mat_inverse(&self.phi)?, &pdual));
        let det_one_minus_phi = mat_det(&one_minus_phi)?;
        let det_one_minus_dual = mat_det(&one_minus_dual)?;
        Ok(EulerOperators {
            bad_one: det_one_minus_phi.is_zero(),
            bad_pinv: det_one_minus_dual.is_zero(),
            one_minus_phi,
            one_minus_dual,
            det_one_minus_phi,
            det_one_minus_dual,
        })
    }

    /// `V(η)` for `η = χ^j η_1` with `η_1(σ) = α`: `φ ↦ α^{-1} p^{-j} φ`,
    /// weights shifted by `j`, and a period `u` with `σ(u) = α u`.
    pub fn unramified_twist(&self, eta: &DeRhamChar) -> Result<UnramifiedTwist> {
        if eta.conductor() != 0 {
            return Err(Error::CharacterShape("crystalline twists need an unramified character times a power of chi".into()));
        }
        let ctx = self.field.ctx();
        let alpha = UnramifiedElt::from_scalar_in(self.field.clone(), &eta.unram);
        let period = solve_frobenius_multiplicative(&alpha)?;
        let pj = UnramifiedElt::from_scalar_in(self.field.clone(), &PadicScalar::p_power(ctx, -eta.weight));
        let c = alpha.inv()?.mul(&pj);
        let phi = mat_scale(&self.phi, &c);
        let weights = self.weights.iter().map(|n| n + eta.weight).collect();
        Ok(UnramifiedTwist { module: Self::new(phi, weights)?, period })
    }
}

/// A twisted module together with the period of its unramified part.
#[derive(Clone, Debug)]
pub struct UnramifiedTwist {
    pub module: CrysModule,
    pub period: UnramifiedElt,
}

/// Both sides of `Γ*(1+j)^d / ℓ(V)*(χ^j) = (-1)^{Σn_i + jd + r} Γ_L(W)`.
#[derive(Clone, Debug, Serialize)]
pub struct FactorialsCheck {
    pub weights: Vec<i64>,
    pub j: i64,
    pub order: i64,
    pub lhs: PadicScalar,
    pub rhs: String,
    pub agreement: i64,
}

impl FactorialsCheck {
    pub fn passes(&self, digits: i64) -> bool {
        self.agreement >= digits
    }
}

/// Evaluates the factorial identity at `χ^j`; `W` has weights `n_i - j`
/// and `r = #{n_i > j}`.
pub fn factorials_check(ctx: &Arc<IwasawaCtx>, weights: &[i64], j: i64) -> Result<FactorialsCheck> {
    let padic = ctx.padic();
    let d = weights.len() as i64;
    let eta = DeRhamChar::chi_power(padic, j);
    let (order, lead) = ell_of_rep(ctx, weights).leading_term(&eta, 2)?;
    let lead = lead.to_scalar()?;
    let mut gamma_pow = BigRational::one();
    for _ in 0..d {
        gamma_pow *= gamma_star(1 + j);
    }
    let lhs = PadicScalar::from_rational(padic, &gamma_pow).div(&lead)?;
    let r = weights.iter().filter(|&&n| n > j).count() as i64;
    let shifted: Vec<i64> = weights.iter().map(|n| n - j).collect();
    let mut rhs = gamma_factor_of(&shifted);
    if (weights.iter().sum::<i64>() + j * d + r).rem_euclid(2) == 1 {
        rhs = -rhs;
    }
    let exact = PadicScalar::from_rational(padic, &rhs);
    let agreement = lhs.agree(&exact) - exact.valuation().unwrap_or(0);
    Ok(FactorialsCheck { weights: weights.to_vec(), j, order, lhs, rhs: rational_string(&rhs), agreement })
}

