//! Scalar inequality chains for superquadratic functions.
//!
//! Every operation returns a signed margin (right side minus left side of the
//! inequality it checks) or a [`ChainResult`] carrying all terms of a chain,
//! so callers can report how close an instance came to the boundary.

pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar_funcs::{beta_eval, beta_p_closed, beta_unchecked, FunctionSpec, Interval};

pub use quadrature::{integrate, QUAD_TOL};

/// Relative tolerance for scalar verdicts: a margin passes when `≥ -SCALAR_REL_TOL·scale`.
pub const SCALAR_REL_TOL: f64 = 1e-9;

/// Points `x_j ∈ [m, M]` with convex weights `λ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "need matching nonempty points/weights, got {} and {}",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidInput("weights must lie in [0, 1]".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn mean(&self) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }
}

/// Order the terms of a chain are claimed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainDirection {
    /// `t0 ≤ t1 ≤ …`
    Ascending,
    /// `t0 ≥ t1 ≥ …`
    Descending,
    /// All terms coincide.
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub terms: Vec<f64>,
    /// Consecutive differences oriented so that a valid chain has non-negative margins.
    /// Under [`ChainDirection::Equality`] each margin is `-|t_{i+1} - t_i|`.
    pub margins: Vec<f64>,
    pub direction: ChainDirection,
    pub tolerance: f64,
    pub holds: bool,
}

impl ChainResult {
    pub fn new(terms: Vec<f64>, direction: ChainDirection) -> Self {
        Self::with_rel_tol(terms, direction, SCALAR_REL_TOL)
    }

    pub fn with_rel_tol(terms: Vec<f64>, direction: ChainDirection, rel_tol: f64) -> Self {
        let margins: Vec<f64> = terms
            .windows(2)
            .map(|w| match direction {
                ChainDirection::Ascending => w[1] - w[0],
                ChainDirection::Descending => w[0] - w[1],
                ChainDirection::Equality => -(w[1] - w[0]).abs(),
            })
            .collect();
        let tolerance = rel_tol * scale_of(&terms);
        let holds = margins.iter().all(|&g| g >= -tolerance);
        Self {
            terms,
            margins,
            direction,
            tolerance,
            holds,
        }
    }

    /// `1 + max |term|`.
    pub fn scale(&self) -> f64 {
        scale_of(&self.terms)
    }

    /// Smallest margin in the chain.
    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn scale_of(values: &[f64]) -> f64 {
    1.0 + values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Gap of the superquadratic Jensen inequality
/// `f(λx+(1−λ)y) ≤ λf(x)+(1−λ)f(y) − λf((1−λ)|x−y|) − (1−λ)f(λ|x−y|)`.
pub fn jensen_sq_gap(f: &FunctionSpec, x: f64, y: f64, lambda: f64) -> Result<f64> {
    check_unit(lambda)?;
    let (fx, fy) = (f.eval(x)?, f.eval(y)?);
    let d = (x - y).abs();
    let mu = 1.0 - lambda;
    let rhs = lambda * fx + mu * fy - lambda * f.value(mu * d) - mu * f.value(lambda * d);
    let lhs = f.value(lambda * x + mu * y);
    Ok(rhs - lhs)
}

/// Gap of the classical Mercer inequality
/// `f(M+m−Σλ_j x_j) ≤ f(M)+f(m)−Σλ_j f(x_j)` for convex `f`.
pub fn mercer_scalar_gap(f: &FunctionSpec, iv: &Interval, sample: &WeightedSample) -> Result<f64> {
    if !f.is_convex() {
        return Err(Error::NotApplicable(format!("{f} is not convex on [0, ∞)")));
    }
    for &x in sample.points() {
        iv.check(x, "sample point")?;
    }
    let (m, big_m) = (iv.lo(), iv.hi());
    let avg_f: f64 = sample
        .points
        .iter()
        .zip(&sample.weights)
        .map(|(&x, w)| w * f.value(x))
        .sum();
    let rhs = f.value(big_m) + f.value(m) - avg_f;
    let lhs = f.value((m + big_m - sample.mean()).max(0.0));
    Ok(rhs - lhs)
}

/// Gap of the weighted-mean Mercer bound
/// `f(m+M−x∇_λy) + 2β(x)∇_λβ(y) ≤ f(m)+f(M) − f(x)∇_λf(y) − f((1−λ)|x−y|)∇_λf(λ|x−y|)`.
pub fn lemma_nabla_gap(f: &FunctionSpec, iv: &Interval, x: f64, y: f64, lambda: f64) -> Result<f64> {
    iv.check(x, "x")?;
    iv.check(y, "y")?;
    check_unit(lambda)?;
    let (m, big_m) = (iv.lo(), iv.hi());
    let mu = 1.0 - lambda;
    let nabla = |a: f64, b: f64| lambda * a + mu * b;
    let d = (x - y).abs();
    let lhs =
        f.value((m + big_m - nabla(x, y)).max(0.0)) + 2.0 * nabla(beta_unchecked(f, iv, x), beta_unchecked(f, iv, y));
    let rhs = f.value(m) + f.value(big_m) - nabla(f.value(x), f.value(y)) - nabla(f.value(mu * d), f.value(lambda * d));
    Ok(rhs - lhs)
}

/// `∫₀^{1/2} f(u·d) du`.
pub fn half_kernel(f: &FunctionSpec, d: f64) -> Result<f64> {
    integrate(|u| f.value(u * d), 0.0, 0.5, QUAD_TOL)
}

/// `∫₀¹ (1−u) f(u·d) du`.
pub fn tent_kernel(f: &FunctionSpec, d: f64) -> Result<f64> {
    integrate(|u| (1.0 - u) * f.value(u * d), 0.0, 1.0, QUAD_TOL)
}

/// `1/(y−x) ∫_x^y g(u) du`, symmetric in `x, y`.
fn mean_over<G: Fn(f64) -> f64>(g: G, x: f64, y: f64) -> Result<f64> {
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    Ok(integrate(g, a, b, QUAD_TOL)? / (b - a))
}

/// `1/(y−x) ∫_x^y f(m+M−u) du`.
pub fn reflected_mean(f: &FunctionSpec, iv: &Interval, x: f64, y: f64) -> Result<f64> {
    let s = iv.lo() + iv.hi();
    mean_over(|u| f.value((s - u).max(0.0)), x, y)
}

/// `1/(y−x) ∫_x^y f(u) du`.
pub fn mean_value(f: &FunctionSpec, x: f64, y: f64) -> Result<f64> {
    mean_over(|u| f.value(u), x, y)
}

/// `1/(y−x) ∫_x^y β(u) du`.
pub fn beta_mean(f: &FunctionSpec, iv: &Interval, x: f64, y: f64) -> Result<f64> {
    mean_over(|u| beta_unchecked(f, iv, u.clamp(iv.lo(), iv.hi())), x, y)
}

fn check_pair(iv: &Interval, x: f64, y: f64) -> Result<()> {
    iv.check(x, "x")?;
    iv.check(y, "y")?;
    if x == y {
        return Err(Error::Degenerate(
            "x = y: the integral mean over [x, y] is undefined".into(),
        ));
    }
    Ok(())
}

/// The three terms of the Hermite–Hadamard type Mercer chain
///
/// ```text
/// f(m+M−(x+y)/2) + 2∫₀^{1/2} f(u|x−y|)du
///   ≤ 1/(y−x) ∫_x^y f(m+M−u) du
///   ≤ f(m)+f(M) − (f(x)+f(y))/2 − (β(x)+β(y)) − 2∫₀¹(1−u) f(u|x−y|) du
/// ```
pub fn hh_mercer_chain_1(f: &FunctionSpec, iv: &Interval, x: f64, y: f64) -> Result<ChainResult> {
    check_pair(iv, x, y)?;
    let (m, big_m) = (iv.lo(), iv.hi());
    let d = (x - y).abs();
    let left = f.value(m + big_m - 0.5 * (x + y)) + 2.0 * half_kernel(f, d)?;
    let middle = reflected_mean(f, iv, x, y)?;
    let right = f.value(m) + f.value(big_m)
        - 0.5 * (f.value(x) + f.value(y))
        - (beta_eval(f, iv, x)? + beta_eval(f, iv, y)?)
        - 2.0 * tent_kernel(f, d)?;
    Ok(ChainResult::new(vec![left, middle, right], ChainDirection::Ascending))
}

/// The three terms of the second Hermite–Hadamard type Mercer chain
///
/// ```text
/// f(m+M−(x+y)/2) + 2∫₀^{1/2} f(u|x−y|)du
///   ≤ f(m)+f(M) − 1/(y−x) ∫_x^y (f(u)+2β(u)) du
///   ≤ f(m)+f(M) − f((x+y)/2) − 2/(y−x) ∫_x^y β(u) du − 2∫₀^{1/2} f(u|x−y|)du
/// ```
pub fn hh_mercer_chain_2(f: &FunctionSpec, iv: &Interval, x: f64, y: f64) -> Result<ChainResult> {
    check_pair(iv, x, y)?;
    let (m, big_m) = (iv.lo(), iv.hi());
    let d = (x - y).abs();
    let half = half_kernel(f, d)?;
    let ends = f.value(m) + f.value(big_m);
    let mean_beta = beta_mean(f, iv, x, y)?;
    let left = f.value(m + big_m - 0.5 * (x + y)) + 2.0 * half;
    let middle = ends - mean_value(f, x, y)? - 2.0 * mean_beta;
    let right = ends - f.value(0.5 * (x + y)) - 2.0 * mean_beta - 2.0 * half;
    Ok(ChainResult::new(vec![left, middle, right], ChainDirection::Ascending))
}

/// Hermite–Hadamard chain for superquadratic `f` on `[x, y]`:
///
/// ```text
/// f((x+y)/2) + 2∫₀^{1/2} f(u|x−y|)du ≤ 1/(y−x)∫_x^y f ≤ (f(x)+f(y))/2 − 2f(0) − 2∫₀¹(1−u)f(u|x−y|)du
/// ```
pub fn hh_sq_chain(f: &FunctionSpec, x: f64, y: f64) -> Result<ChainResult> {
    if !(x >= 0.0 && x < y && y.is_finite()) {
        return Err(Error::Degenerate(format!("need 0 ≤ x < y, got x = {x}, y = {y}")));
    }
    let d = y - x;
    let left = f.value(0.5 * (x + y)) + 2.0 * half_kernel(f, d)?;
    let middle = mean_value(f, x, y)?;
    let right = 0.5 * (f.value(x) + f.value(y)) - 2.0 * f.value(0.0) - 2.0 * tent_kernel(f, d)?;
    Ok(ChainResult::new(vec![left, middle, right], ChainDirection::Ascending))
}

/// Closed forms of the Mercer–Hermite–Hadamard chain for `f = t^p`.
///
/// Ascending for `p > 2`, descending for `1 ≤ p < 2`, and an equality at `p = 2`.
pub fn power_chain(p: f64, iv: &Interval, x: f64, y: f64) -> Result<ChainResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidInput(format!("power chain needs p ≥ 1, got {p}")));
    }
    check_pair(iv, x, y)?;
    let (m, big_m) = (iv.lo(), iv.hi());
    let d = (x - y).abs();
    let f = FunctionSpec::power(p);
    let left = f.value(m + big_m - 0.5 * (x + y)) + d.powf(p) / (2f64.powf(p) * (p + 1.0));
    let middle =
        (f.value(big_m + m - x) * (big_m + m - x) - f.value(big_m + m - y) * (big_m + m - y)) / ((p + 1.0) * (y - x));
    let right = f.value(m) + f.value(big_m)
        - 0.5 * (f.value(x) + f.value(y))
        - (beta_p_closed(p, iv, x)? + beta_p_closed(p, iv, y)?)
        - 2.0 * d.powf(p) / ((p + 1.0) * (p + 2.0));
    let direction = if p == 2.0 {
        ChainDirection::Equality
    } else if p > 2.0 {
        ChainDirection::Ascending
    } else {
        ChainDirection::Descending
    };
    Ok(ChainResult::new(vec![left, middle, right], direction))
}

/// Gap of `f(x)+f(y) ≤ f(x+y) − 2(y f(x) + x f(y))/(x+y)`.
pub fn superadditive_gap(f: &FunctionSpec, x: f64, y: f64) -> Result<f64> {
    let (fx, fy) = (f.eval(x)?, f.eval(y)?);
    let s = x + y;
    if s == 0.0 {
        return Err(Error::Degenerate("x = y = 0: the weights divide by x + y".into()));
    }
    let rhs = f.value(s) - 2.0 * (y * fx + x * fy) / s;
    Ok(rhs - fx - fy)
}

/// Gap of the four-point inequality for `y1 ≤ x1 ≤ x2 ≤ y2`, `x1 + x2 = y1 + y2`:
///
/// ```text
/// f(x1)+f(x2) ≤ f(y1)+f(y2) − 2(y2−x1)/(y2−y1)·f(x1−y1) − 2(x1−y1)/(y2−y1)·f(x2−y1)
/// ```
pub fn four_point_gap(f: &FunctionSpec, y1: f64, x1: f64, x2: f64, y2: f64) -> Result<f64> {
    if !(0.0 <= y1 && y1 <= x1 && x1 <= x2 && x2 <= y2) {
        return Err(Error::InvalidInput(format!(
            "need 0 ≤ y1 ≤ x1 ≤ x2 ≤ y2, got ({y1}, {x1}, {x2}, {y2})"
        )));
    }
    if y1 == y2 {
        return Err(Error::Degenerate("y1 = y2".into()));
    }
    if (x1 + x2 - (y1 + y2)).abs() > 1e-12 * (1.0 + y2) {
        return Err(Error::InvalidInput(format!(
            "x1 + x2 = {} differs from y1 + y2 = {}",
            x1 + x2,
            y1 + y2
        )));
    }
    let w = y2 - y1;
    let rhs =
        f.value(y1) + f.value(y2) - 2.0 * (y2 - x1) / w * f.value(x1 - y1) - 2.0 * (x1 - y1) / w * f.value(x2 - y1);
    Ok(rhs - f.value(x1) - f.value(x2))
}

fn check_unit(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Domain(format!("λ = {lambda} lies outside [0, 1]")))
    }
}
