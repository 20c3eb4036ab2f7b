//! Closed-form cost analysis: beta functions, the expected relative
//! subproblem size H, the sampling penalty q, total-cost predictions, the
//! beta-binomial subproblem-size law and its local limit behavior.
//!
//! Everything that feeds a printed constant is computed in exact rational
//! arithmetic; only final user-facing predictions drop to floating point.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::engine::Alpha;

pub type ExactRational = BigRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoryError {
    /// Interval bounds out of order or outside [0, 1].
    InvalidInterval,
    /// Parameter outside its domain, e.g. a quantile not in (0, 1).
    OutOfDomain,
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryError::InvalidInterval => write!(f, "invalid integration interval"),
            TheoryError::OutOfDomain => write!(f, "parameter outside its domain"),
        }
    }
}

impl std::error::Error for TheoryError {}

/// Description of a secondary sorter's average cost
/// x(n) = a n lg n + b n +- O(n^(1-epsilon)), plus its buffer ratio and the
/// sampling parameter t it is combined with.
#[derive(Clone, Copy, Debug)]
pub struct CostModelParams {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub alpha: Alpha,
    pub t: usize,
}

pub fn rational(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn rising(base: u64, count: u64) -> BigInt {
    (0..count).map(|i| BigInt::from(base + i)).product()
}

/// nth harmonic number, exactly. H_0 = 0 by convention.
pub fn harmonic(n: u64) -> ExactRational {
    (1..=n)
        .map(|i| BigRational::new(BigInt::one(), BigInt::from(i)))
        .sum()
}

/// Beta function at positive integer arguments:
/// B(a, b) = (a-1)! (b-1)! / (a+b-1)!.
pub fn beta(a: u64, b: u64) -> ExactRational {
    assert!(a >= 1 && b >= 1, "integer beta needs positive shapes");
    BigRational::new(
        factorial(a - 1) * factorial(b - 1),
        factorial(a + b - 1),
    )
}

/// Regularized incomplete beta function I_{x,y}(a, b) for integer shapes,
/// exactly, via binomial expansion of the polynomial integrand.
pub fn reg_incomplete_beta(
    x: &ExactRational,
    y: &ExactRational,
    a: u64,
    b: u64,
) -> Result<ExactRational, TheoryError> {
    if x > y || x < &BigRational::zero() || y > &BigRational::one() {
        return Err(TheoryError::InvalidInterval);
    }
    // integral of z^(a-1) (1-z)^(b-1)
    //   = sum_j C(b-1, j) (-1)^j (y^(a+j) - x^(a+j)) / (a + j)
    let mut sum = BigRational::zero();
    let mut xp = x.clone();
    let mut yp = y.clone();
    for _ in 1..a {
        xp *= x;
        yp *= y;
    }
    // xp, yp now hold x^a resp. y^a; multiply up inside the loop.
    let mut term_x = xp;
    let mut term_y = yp;
    for j in 0..b {
        let coeff = BigRational::new(binomial_int(b - 1, j), BigInt::from(a + j));
        let diff = &term_y - &term_x;
        if j % 2 == 0 {
            sum += coeff * &diff;
        } else {
            sum -= coeff * &diff;
        }
        term_x *= x;
        term_y *= y;
    }
    Ok(sum / beta(a, b))
}

/// Expected relative subproblem size sorted by X:
/// H = I_{0, alpha/(1+alpha)}(t+2, t+1) + I_{1/2, 1/(1+alpha)}(t+2, t+1).
pub fn h_value(t: usize, alpha: Alpha) -> ExactRational {
    let t = t as u64;
    let s = alpha.num as i64 + alpha.den as i64;
    let upper1 = rational(alpha.num as i64, s);
    let lower2 = rational(1, 2);
    let upper2 = rational(alpha.den as i64, s);
    let first = reg_incomplete_beta(&BigRational::zero(), &upper1, t + 2, t + 1)
        .expect("0 <= alpha/(1+alpha) <= 1");
    let second = if lower2 < upper2 {
        reg_incomplete_beta(&lower2, &upper2, t + 2, t + 1).expect("1/2 <= 1/(1+alpha)")
    } else {
        BigRational::zero()
    };
    first + second
}

/// Expected relative size of the recursive subproblem, 1 - H.
pub fn recursive_fraction(t: usize, alpha: Alpha) -> ExactRational {
    BigRational::one() - h_value(t, alpha)
}

/// The sampling penalty q: with a = 1,
/// q = 1/H - (H_{k+1} - H_{t+1}) / (H ln 2).
pub fn penalty_q(t: usize, alpha: Alpha) -> f64 {
    let k = 2 * t as u64 + 1;
    let h = h_value(t, alpha).to_f64().expect("H is a modest rational");
    let hdiff = (harmonic(k + 1) - harmonic(t as u64 + 1))
        .to_f64()
        .expect("harmonic difference is modest");
    (1.0 - hdiff / std::f64::consts::LN_2) / h
}

/// Coefficient of the linear term of c(n):
/// 1/H - a (H_{k+1} - H_{t+1}) / (H ln 2) + b.
pub fn linear_coefficient(params: &CostModelParams) -> f64 {
    let k = 2 * params.t as u64 + 1;
    let h = h_value(params.t, params.alpha)
        .to_f64()
        .expect("H is a modest rational");
    let hdiff = (harmonic(k + 1) - harmonic(params.t as u64 + 1))
        .to_f64()
        .expect("harmonic difference is modest");
    1.0 / h - params.a * hdiff / (h * std::f64::consts::LN_2) + params.b
}

/// Predicted expected total comparisons of QuickXsort:
/// a n lg n + linear_coefficient * n.
pub fn predict_total(n: u64, params: &CostModelParams) -> f64 {
    let nf = n as f64;
    let leading = if n > 1 {
        params.a * nf * nf.log2()
    } else {
        0.0
    };
    leading + linear_coefficient(params) * nf
}

/// Built-in average-cost upper bounds for the supported X choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XModel {
    /// Top-down Mergesort: n lg n - 1.24 n + 2.
    MergeTD,
    /// Bottom-up Mergesort: n lg n - 0.26 n.
    MergeBU,
    /// External Heapsort: n lg n + 0.967444 n.
    ExtHeap,
}

impl XModel {
    pub fn coefficients(&self) -> (f64, f64, f64) {
        // (a, b, constant offset)
        match self {
            XModel::MergeTD => (1.0, -1.24, 2.0),
            XModel::MergeBU => (1.0, -0.26, 0.0),
            XModel::ExtHeap => (1.0, 0.967444, 0.0),
        }
    }
}

/// Evaluates the respective upper-bound formula.
pub fn x_model(kind: XModel, n: u64) -> f64 {
    let (a, b, c) = kind.coefficients();
    let nf = n as f64;
    let leading = if n > 1 { a * nf * nf.log2() } else { 0.0 };
    leading + b * nf + c
}

/// Exact beta-binomial probability mass:
/// P{X = i} = C(n, i) a^rising(i) b^rising(n-i) / (a+b)^rising(n).
pub fn beta_binomial_pmf(n: usize, i: usize, a: u64, b: u64) -> ExactRational {
    if i > n {
        return BigRational::zero();
    }
    let (n, i) = (n as u64, i as u64);
    BigRational::new(
        binomial_int(n, i) * rising(a, i) * rising(b, n - i),
        rising(a + b, n),
    )
}

/// Distribution of the below-pivot segment size J for input size n and
/// sampling parameter t: P{J = j} = P{I = j - t} with
/// I ~ betaBinomial(n - k, t+1, t+1). Vector indexed by j in 0..n-1.
pub fn subproblem_size_pmf(n: usize, t: usize) -> Vec<ExactRational> {
    let k = 2 * t + 1;
    assert!(n >= k, "need at least k elements to sample");
    let shape = t as u64 + 1;
    (0..n)
        .map(|j| {
            if j < t || j + t > n - 1 {
                BigRational::zero()
            } else {
                beta_binomial_pmf(n - k, j - t, shape, shape)
            }
        })
        .collect()
}

/// Beta-binomial pmf over 0..=n in f64, by the term ratio recurrence.
pub fn beta_binomial_pmf_f64(n: usize, a: f64, b: f64) -> Vec<f64> {
    let nf = n as f64;
    let mut p = vec![0.0f64; n + 1];
    // P(0) = prod_{j<n} (b+j) / (a+b+j)
    let mut p0 = 0.0f64; // log space for safety at large n
    for j in 0..n {
        p0 += ((b + j as f64) / (a + b + j as f64)).ln();
    }
    p[0] = p0.exp();
    for i in 0..n {
        let i_f = i as f64;
        let ratio = (nf - i_f) / (i_f + 1.0) * (a + i_f) / (b + nf - i_f - 1.0);
        p[i + 1] = p[i] * ratio;
    }
    p
}

/// Convergence diagnostic for the local limit law: the maximal deviation of
/// n P{I = floor(z (n+1))} from the Beta(t+1, t+1) density over a z grid,
/// with I ~ betaBinomial(n, t+1, t+1).
pub fn local_limit_error(n: usize, t: usize) -> f64 {
    let shape = (t + 1) as f64;
    let pmf = beta_binomial_pmf_f64(n, shape, shape);
    let beta_const = beta(t as u64 + 1, t as u64 + 1)
        .to_f64()
        .expect("small beta value");
    let mut worst = 0.0f64;
    for i in 0..n {
        let z = (i as f64 + 0.5) / n as f64;
        let idx = (z * (n as f64 + 1.0)).floor() as usize;
        if idx > n {
            continue;
        }
        let density = z.powi(t as i32) * (1.0 - z).powi(t as i32) / beta_const;
        let dev = (n as f64 * pmf[idx] - density).abs();
        worst = worst.max(dev);
    }
    worst
}

/// Leading coefficient of E[[xn <= J <= yn] J/n]:
/// a/(a+b) * I_{x,y}(a+1, b).
pub fn expected_fraction_in_range(
    x: &ExactRational,
    y: &ExactRational,
    a: u64,
    b: u64,
) -> Result<ExactRational, TheoryError> {
    let front = BigRational::new(BigInt::from(a), BigInt::from(a + b));
    Ok(front * reg_incomplete_beta(x, y, a + 1, b)?)
}

/// Limit of E[(J/n) ln(J/n)]: a/(a+b) (H_a - H_{a+b}).
pub fn expected_fraction_log(a: u64, b: u64) -> ExactRational {
    let front = BigRational::new(BigInt::from(a), BigInt::from(a + b));
    front * (harmonic(a) - harmonic(a + b))
}

/// Linear-term coefficient when the pivot is always the exact rho-quantile:
/// (1 + h(rho)) / (1 - rho) + b on (1/3, 1/2) and (2/3, 1), else
/// (1 + h(rho)) / rho + b, with h the binary entropy's negative.
pub fn skewed_cost_coefficient(rho: f64, b: f64) -> Result<f64, TheoryError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(TheoryError::OutOfDomain);
    }
    let h = rho * rho.log2() + (1.0 - rho) * (1.0 - rho).log2();
    let inner = (rho > 1.0 / 3.0 && rho < 0.5) || (rho > 2.0 / 3.0 && rho < 1.0);
    let denom = if inner { 1.0 - rho } else { rho };
    Ok((1.0 + h) / denom + b)
}

/// Shape function of the recursion weights:
/// w(z) = 2 [z in recursion region] z^t (1-z)^t / B(t+1, t+1),
/// region bounds generalized to alpha.
pub fn shape_w(z: f64, t: usize, alpha: Alpha) -> f64 {
    let a = alpha.as_f64();
    let lo = a / (1.0 + a);
    let hi = 1.0 / (1.0 + a);
    let in_region = (z > lo && z < 0.5) || z > hi;
    if !in_region {
        return 0.0;
    }
    let beta_const = beta(t as u64 + 1, t as u64 + 1)
        .to_f64()
        .expect("small beta value");
    2.0 * z.powi(t as i32) * (1.0 - z).powi(t as i32) / beta_const
}
