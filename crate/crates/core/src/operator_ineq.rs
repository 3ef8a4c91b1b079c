//! Operator forms of the Mercer inequality for superquadratic functions.
//!
//! Each check builds both sides as symmetric matrices through the functional
//! calculus and reports `λ_min(RHS − LHS)`; a non-negative margin certifies
//! the Loewner inequality on that instance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{apply_map, MapSpec};
use crate::matrix::{apply_beta, apply_function, loewner_leq, SymMatrix};
use crate::scalar_funcs::{FunctionSpec, Interval};

/// Tolerance for the Loewner-order hypotheses of an instance.
pub const HYPOTHESIS_TOL: f64 = 1e-9;
/// Default relative tolerance for operator verdicts: `margin ≥ −1e-8·(1 + ‖RHS‖_max)`.
pub const OPERATOR_REL_TOL: f64 = 1e-8;

/// Instance of the operator Mercer inequality:
/// `0 ⪯ A ⪯ mI ⪯ B ⪯ C ⪯ MI ⪯ D`, `A + D = B + C`, and a unital positive map.
#[derive(Debug, Clone, PartialEq)]
pub struct MercerInstance {
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub c: SymMatrix,
    pub d: SymMatrix,
    pub iv: Interval,
    pub map: MapSpec,
}

fn require(holds: bool, what: impl FnOnce() -> String) -> Result<()> {
    if holds {
        Ok(())
    } else {
        Err(Error::RejectedInstance(what()))
    }
}

fn same_order(mats: &[&SymMatrix]) -> Result<usize> {
    let n = mats[0].order();
    for m in mats {
        if m.order() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.order(),
            });
        }
    }
    Ok(n)
}

/// Checks `lower ⪯ upper` with [`HYPOTHESIS_TOL`].
fn ordered(lower: &SymMatrix, upper: &SymMatrix, what: &str) -> Result<()> {
    let cmp = loewner_leq(lower, upper, HYPOTHESIS_TOL)?;
    require(cmp.holds, || format!("{what} fails: margin {}", cmp.margin))
}

impl MercerInstance {
    pub fn new(a: SymMatrix, b: SymMatrix, c: SymMatrix, d: SymMatrix, iv: Interval, map: MapSpec) -> Result<Self> {
        let inst = Self { a, b, c, d, iv, map };
        inst.validate()?;
        Ok(inst)
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_sandwich()?;
        let gap = self.a.try_add(&self.d)?.max_abs_diff(&self.b.try_add(&self.c)?)?;
        require(gap <= HYPOTHESIS_TOL * (1.0 + self.iv.hi()), || {
            format!("A + D differs from B + C by {gap}")
        })
    }

    /// The Loewner chain alone, without the sum constraint.
    pub fn validate_sandwich(&self) -> Result<()> {
        let n = same_order(&[&self.a, &self.b, &self.c, &self.d])?;
        if let Some(k) = self.map.order() {
            if k != n {
                return Err(Error::DimensionMismatch { expected: n, found: k });
            }
        }
        let mi = SymMatrix::scalar(n, self.iv.lo());
        let big_mi = SymMatrix::scalar(n, self.iv.hi());
        ordered(&SymMatrix::zeros(n), &self.a, "0 ⪯ A")?;
        ordered(&self.a, &mi, "A ⪯ mI")?;
        ordered(&mi, &self.b, "mI ⪯ B")?;
        ordered(&self.b, &self.c, "B ⪯ C")?;
        ordered(&self.c, &big_mi, "C ⪯ MI")?;
        ordered(&big_mi, &self.d, "MI ⪯ D")
    }
}

impl Serialize for MercerInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("MercerInstance", 7)?;
        st.serialize_field("m", &self.iv.lo())?;
        st.serialize_field("M", &self.iv.hi())?;
        st.serialize_field("A", &self.a)?;
        st.serialize_field("B", &self.b)?;
        st.serialize_field("C", &self.c)?;
        st.serialize_field("D", &self.d)?;
        st.serialize_field("map", &self.map)?;
        st.end()
    }
}

/// Pair with `0 ⪯ A ⪯ mI ⪯ (A+D)/2 ⪯ MI ⪯ D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MidpointInstance {
    #[serde(rename = "A")]
    pub a: SymMatrix,
    #[serde(rename = "D")]
    pub d: SymMatrix,
    pub iv: Interval,
}

impl MidpointInstance {
    pub fn new(a: SymMatrix, d: SymMatrix, iv: Interval) -> Result<Self> {
        let n = same_order(&[&a, &d])?;
        let mi = SymMatrix::scalar(n, iv.lo());
        let big_mi = SymMatrix::scalar(n, iv.hi());
        let mid = a.try_add(&d)?.scale(0.5);
        ordered(&SymMatrix::zeros(n), &a, "0 ⪯ A")?;
        ordered(&a, &mi, "A ⪯ mI")?;
        ordered(&mi, &mid, "mI ⪯ (A+D)/2")?;
        ordered(&mid, &big_mi, "(A+D)/2 ⪯ MI")?;
        ordered(&big_mi, &d, "MI ⪯ D")?;
        Ok(Self { a, d, iv })
    }
}

/// Pair with `0 ≺ B, C ⪯ MI ⪯ B + C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityInstance {
    #[serde(rename = "B")]
    pub b: SymMatrix,
    #[serde(rename = "C")]
    pub c: SymMatrix,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl SubadditivityInstance {
    pub fn new(b: SymMatrix, c: SymMatrix, big_m: f64) -> Result<Self> {
        if !(big_m > 0.0 && big_m.is_finite()) {
            return Err(Error::InvalidInput(format!("M must be positive, got {big_m}")));
        }
        let n = same_order(&[&b, &c])?;
        let big_mi = SymMatrix::scalar(n, big_m);
        for (x, name) in [(&b, "B"), (&c, "C")] {
            let low = x.min_eigenvalue()?;
            require(low > 0.0, || format!("{name} is not positive definite: λ_min = {low}"))?;
            ordered(x, &big_mi, &format!("{name} ⪯ MI"))?;
        }
        ordered(&big_mi, &b.try_add(&c)?, "MI ⪯ B + C")?;
        Ok(Self { b, c, big_m })
    }

    /// `[0, M]`, the window of the β term.
    pub fn interval(&self) -> Interval {
        Interval::new(0.0, self.big_m).expect("M > 0")
    }
}

/// Both sides of an operator inequality `LHS ⪯ RHS` and its margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorClaimResult {
    pub lhs: SymMatrix,
    pub rhs: SymMatrix,
    /// `λ_min(RHS − LHS)`.
    pub margin: f64,
    /// `1 + ‖RHS‖_max`.
    pub scale: f64,
    pub tolerance: f64,
    pub holds: bool,
}

impl OperatorClaimResult {
    pub fn new(lhs: SymMatrix, rhs: SymMatrix) -> Result<Self> {
        let margin = rhs.try_sub(&lhs)?.min_eigenvalue()?;
        let scale = 1.0 + rhs.max_abs();
        let tolerance = OPERATOR_REL_TOL * scale;
        Ok(Self {
            lhs,
            rhs,
            margin,
            scale,
            tolerance,
            holds: margin >= -tolerance,
        })
    }

    /// Re-judges the margin at a different relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.tolerance = rel_tol * self.scale;
        self.holds = self.margin >= -self.tolerance;
        self
    }
}

/// `(Φ(A−D) + (M−m)I)/(M−m) · f(M−m)`.
fn boundary_term(f: &FunctionSpec, inst: &MercerInstance) -> Result<SymMatrix> {
    let w = inst.iv.width();
    let phi_a_minus_d = apply_map(&inst.map, &inst.a.try_sub(&inst.d)?)?;
    Ok(phi_a_minus_d.shift(w).scale(f.value(w) / w))
}

/// `f(mI − A)` and `f(D − MI)`; tiny negative eigenvalues are clamped by the calculus.
fn outer_corrections(f: &FunctionSpec, inst: &MercerInstance) -> Result<(SymMatrix, SymMatrix)> {
    let n = inst.order();
    let m_minus_a = SymMatrix::scalar(n, inst.iv.lo()).try_sub(&inst.a)?;
    let d_minus_m = inst.d.shift(-inst.iv.hi());
    Ok((apply_function(f, &m_minus_a)?, apply_function(f, &d_minus_m)?))
}

/// Operator Mercer inequality with operator bounds:
///
/// ```text
/// f(Φ(B)) + f(Φ(C)) + β(Φ(B)) + β(Φ(C))
///   ⪯ Φ(f(A)) + Φ(f(D)) − Φ(f(m−A)) − Φ(f(D−M)) + (Φ(A−D)+(M−m)I)/(M−m)·f(M−m)
/// ```
pub fn mercer_operator_check(f: &FunctionSpec, inst: &MercerInstance) -> Result<OperatorClaimResult> {
    inst.validate()?;
    mercer_operator_unchecked(f, inst)
}

pub(crate) fn mercer_operator_unchecked(f: &FunctionSpec, inst: &MercerInstance) -> Result<OperatorClaimResult> {
    let phi = |x: &SymMatrix| apply_map(&inst.map, x);
    let (iv, fb) = (&inst.iv, |x: &SymMatrix| apply_function(f, x));
    let pb = phi(&inst.b)?;
    let pc = phi(&inst.c)?;
    let lhs = &(&fb(&pb)? + &fb(&pc)?) + &(&apply_beta(f, iv, &pb)? + &apply_beta(f, iv, &pc)?);

    let (f_m_a, f_d_m) = outer_corrections(f, inst)?;
    let rhs =
        &(&(&phi(&fb(&inst.a)?)? + &phi(&fb(&inst.d)?)?) - &(&phi(&f_m_a)? + &phi(&f_d_m)?)) + &boundary_term(f, inst)?;
    OperatorClaimResult::new(lhs, rhs)
}

/// Mixed variant where `Φ` acts outside the calculus for `B` and `A` and inside for `C` and `D`:
///
/// ```text
/// Φ(f(B)) + f(Φ(C)) + Φ(β(B)) + β(Φ(C))
///   ⪯ Φ(f(A)) + f(Φ(D)) − Φ(f(m−A)) − f(Φ(D)−M) + (Φ(A−D)+(M−m)I)/(M−m)·f(M−m)
/// ```
pub fn mercer_mixed_check(f: &FunctionSpec, inst: &MercerInstance) -> Result<OperatorClaimResult> {
    inst.validate()?;
    let phi = |x: &SymMatrix| apply_map(&inst.map, x);
    let iv = &inst.iv;
    let pc = phi(&inst.c)?;
    let pd = phi(&inst.d)?;
    let lhs = &(&phi(&apply_function(f, &inst.b)?)? + &apply_function(f, &pc)?)
        + &(&phi(&apply_beta(f, iv, &inst.b)?)? + &apply_beta(f, iv, &pc)?);

    let n = inst.order();
    let f_m_a = apply_function(f, &SymMatrix::scalar(n, iv.lo()).try_sub(&inst.a)?)?;
    let f_pd_m = apply_function(f, &pd.shift(-iv.hi()))?;
    let rhs = &(&(&phi(&apply_function(f, &inst.a)?)? + &apply_function(f, &pd)?) - &(&phi(&f_m_a)? + &f_pd_m))
        + &boundary_term(f, inst)?;
    OperatorClaimResult::new(lhs, rhs)
}

/// The two readings of the operator Jensen–Mercer inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JensenMercerResult {
    /// `f((M+m)I−Φ(C)) + β(Φ(C)) + f(0)I ⪯ (f(m)+f(M)−f(0))I − Φ(β(C))`.
    pub literal: OperatorClaimResult,
    /// `Φ(f((M+m)I−C)) + f(Φ(C)) + Φ(β(C)) + β(Φ(C)) ⪯ (f(m)+f(M)−2f(0))I`,
    /// the mixed variant at `A = mI`, `B = (M+m)I − C`, `D = MI`.
    pub substituted: OperatorClaimResult,
}

pub fn jensen_mercer_check(
    f: &FunctionSpec,
    iv: &Interval,
    c: &SymMatrix,
    map: &MapSpec,
) -> Result<JensenMercerResult> {
    let n = c.order();
    let spec = c.eig()?;
    require(
        spec.min() >= iv.lo() - HYPOTHESIS_TOL && spec.max() <= iv.hi() + HYPOTHESIS_TOL,
        || {
            format!(
                "spectrum [{}, {}] of C escapes [{}, {}]",
                spec.min(),
                spec.max(),
                iv.lo(),
                iv.hi()
            )
        },
    )?;
    let (m, big_m) = (iv.lo(), iv.hi());
    let f0 = f.value(0.0);
    let phi = |x: &SymMatrix| apply_map(map, x);
    let pc = phi(c)?;
    let beta_c = apply_beta(f, iv, c)?;
    let beta_pc = apply_beta(f, iv, &pc)?;

    let reflected = |x: &SymMatrix| SymMatrix::scalar(n, m + big_m).try_sub(x);
    let literal_lhs = (&apply_function(f, &reflected(&pc)?)? + &beta_pc).shift(f0);
    let literal_rhs = (-&phi(&beta_c)?).shift(f.value(m) + f.value(big_m) - f0);
    let literal = OperatorClaimResult::new(literal_lhs, literal_rhs)?;

    let sub_lhs =
        &(&phi(&apply_function(f, &reflected(c)?)?)? + &apply_function(f, &pc)?) + &(&phi(&beta_c)? + &beta_pc);
    let sub_rhs = SymMatrix::scalar(n, f.value(m) + f.value(big_m) - 2.0 * f0);
    let substituted = OperatorClaimResult::new(sub_lhs, sub_rhs)?;
    Ok(JensenMercerResult { literal, substituted })
}

/// Midpoint Jensen inequality under a spectral sandwich:
///
/// ```text
/// f((A+D)/2) + β((A+D)/2) ⪯ (f(A)+f(D))/2 − (f(m−A)+f(D−M))/2
/// ```
pub fn midpoint_jensen_check(f: &FunctionSpec, inst: &MidpointInstance) -> Result<OperatorClaimResult> {
    let n = inst.a.order();
    let iv = &inst.iv;
    let mid = inst.a.try_add(&inst.d)?.scale(0.5);
    let lhs = &apply_function(f, &mid)? + &apply_beta(f, iv, &mid)?;
    let outer = &apply_function(f, &inst.a)? + &apply_function(f, &inst.d)?;
    let corr = &apply_function(f, &SymMatrix::scalar(n, iv.lo()).try_sub(&inst.a)?)?
        + &apply_function(f, &inst.d.shift(-iv.hi()))?;
    let rhs = (&outer - &corr).scale(0.5);
    OperatorClaimResult::new(lhs, rhs)
}

/// Bare midpoint convexity `f((A+D)/2) ⪯ (f(A)+f(D))/2` for positive semidefinite `A`, `D`.
pub fn midpoint_convexity_check(f: &FunctionSpec, a: &SymMatrix, d: &SymMatrix) -> Result<OperatorClaimResult> {
    let mid = a.try_add(d)?.scale(0.5);
    let lhs = apply_function(f, &mid)?;
    let rhs = (&apply_function(f, a)? + &apply_function(f, d)?).scale(0.5);
    OperatorClaimResult::new(lhs, rhs)
}

/// Operator sub-additivity with β taken on `[0, M]`:
///
/// ```text
/// f(B) + f(C) + β(B) + β(C) ⪯ f(B+C) − f(B+C−MI)
/// ```
pub fn subadditivity_check(f: &FunctionSpec, inst: &SubadditivityInstance) -> Result<OperatorClaimResult> {
    let iv = inst.interval();
    let sum = inst.b.try_add(&inst.c)?;
    let lhs = &(&apply_function(f, &inst.b)? + &apply_function(f, &inst.c)?)
        + &(&apply_beta(f, &iv, &inst.b)? + &apply_beta(f, &iv, &inst.c)?);
    let rhs = &apply_function(f, &sum)? - &apply_function(f, &sum.shift(-inst.big_m))?;
    OperatorClaimResult::new(lhs, rhs)
}

/// Unitarily invariant norms supported by [`norm_subadditivity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Operator,
    Trace,
    Frobenius,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Operator, NormKind::Trace, NormKind::Frobenius];

    pub fn of(&self, x: &SymMatrix) -> Result<f64> {
        Ok(match self {
            NormKind::Operator => {
                let e = x.eig()?;
                e.min().abs().max(e.max().abs())
            }
            NormKind::Trace => x.eig()?.eigenvalues.iter().map(|v| v.abs()).sum(),
            NormKind::Frobenius => x.rows().iter().flatten().map(|v| v * v).sum::<f64>().sqrt(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormClaimResult {
    pub norm: NormKind,
    /// `‖f(B) + f(C)‖`.
    pub lhs: f64,
    /// `‖f(B + C)‖`.
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// `‖f(B) + f(C)‖ ≤ ‖f(B + C)‖` for positive semidefinite `B`, `C` and an
/// increasing convex `f ≥ 0` with `f(0) = 0`.
pub fn norm_subadditivity_check(
    f: &FunctionSpec,
    b: &SymMatrix,
    c: &SymMatrix,
    norm: NormKind,
) -> Result<NormClaimResult> {
    if !f.is_convex() {
        return Err(Error::NotApplicable(format!(
            "{f} is not a non-negative increasing convex function"
        )));
    }
    let lhs = norm.of(&(&apply_function(f, b)? + &apply_function(f, c)?))?;
    let rhs = norm.of(&apply_function(f, &b.try_add(c)?)?)?;
    let margin = rhs - lhs;
    let tolerance = OPERATOR_REL_TOL * (1.0 + rhs);
    Ok(NormClaimResult {
        norm,
        lhs,
        rhs,
        margin,
        tolerance,
        holds: margin >= -tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_instance() -> MercerInstance {
        MercerInstance::new(
            SymMatrix::diag(&[0.5]),
            SymMatrix::diag(&[1.4]),
            SymMatrix::diag(&[1.6]),
            SymMatrix::diag(&[2.5]),
            Interval::new(1.0, 2.0).unwrap(),
            MapSpec::Identity,
        )
        .unwrap()
    }

    fn worked_pair() -> SubadditivityInstance {
        SubadditivityInstance::new(
            SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap(),
            SymMatrix::diag(&[3.0, 2.0]),
            3.0,
        )
        .unwrap()
    }

    #[test]
    fn mercer_scalar_square() {
        let r = mercer_operator_check(&FunctionSpec::power(2.0), &scalar_instance()).unwrap();
        assert!((r.lhs.get(0, 0) - 5.0).abs() < 1e-12);
        assert!((r.rhs.get(0, 0) - 5.0).abs() < 1e-12);
        assert!(r.margin.abs() < 1e-12 && r.holds);
    }

    #[test]
    fn mixed_equals_plain_under_identity() {
        let inst = scalar_instance();
        for f in [
            FunctionSpec::power(2.0),
            FunctionSpec::power(3.0),
            FunctionSpec::neg_power(1.5),
        ] {
            let a = mercer_operator_check(&f, &inst).unwrap();
            let b = mercer_mixed_check(&f, &inst).unwrap();
            assert_eq!(a.lhs, b.lhs);
            assert_eq!(a.rhs, b.rhs);
            assert_eq!(a.margin, b.margin);
        }
        let r = mercer_mixed_check(&FunctionSpec::power(2.0), &inst).unwrap();
        assert!(r.margin.abs() < 1e-12);
    }

    #[test]
    fn rejected_instances() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let d = |v: f64| SymMatrix::diag(&[v]);
        // sum constraint broken
        assert!(matches!(
            MercerInstance::new(d(0.5), d(1.4), d(1.6), d(2.6), iv, MapSpec::Identity),
            Err(Error::RejectedInstance(_))
        ));
        // B below mI
        assert!(matches!(
            MercerInstance::new(d(0.5), d(0.9), d(1.6), d(2.0), iv, MapSpec::Identity),
            Err(Error::RejectedInstance(_))
        ));
        // negative A
        assert!(matches!(
            MercerInstance::new(d(-0.1), d(1.0), d(1.5), d(2.6), iv, MapSpec::Identity),
            Err(Error::RejectedInstance(_))
        ));
        assert!(matches!(
            MercerInstance::new(
                d(0.5),
                d(1.4),
                d(1.6),
                SymMatrix::diag(&[2.5, 2.5]),
                iv,
                MapSpec::Identity
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jensen_mercer_scalar_square() {
        let iv = Interval::new(0.0, 2.0).unwrap();
        let r = jensen_mercer_check(
            &FunctionSpec::power(2.0),
            &iv,
            &SymMatrix::diag(&[1.0]),
            &MapSpec::Identity,
        )
        .unwrap();
        assert!((r.literal.lhs.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((r.literal.rhs.get(0, 0) - 3.0).abs() < 1e-12);
        assert!((r.literal.margin - 1.0).abs() < 1e-12);
        assert!(r.substituted.holds);
    }

    #[test]
    fn jensen_mercer_at_lower_end() {
        // C = mI with m = 0: f(M) + 2f(0) on the left, f(m) + f(M) − β(0) − f(0) on the right
        let iv = Interval::new(0.0, 2.0).unwrap();
        let f = FunctionSpec::power(2.0);
        let r = jensen_mercer_check(&f, &iv, &SymMatrix::scalar(2, 0.0), &MapSpec::Identity).unwrap();
        assert!(r.literal.margin.abs() < 1e-12);
        assert!(jensen_mercer_check(&f, &iv, &SymMatrix::scalar(2, 2.5), &MapSpec::Identity).is_err());
    }

    #[test]
    fn midpoint_scalar_square() {
        let inst = MidpointInstance::new(
            SymMatrix::diag(&[0.5]),
            SymMatrix::diag(&[2.5]),
            Interval::new(1.0, 2.0).unwrap(),
        )
        .unwrap();
        let r = midpoint_jensen_check(&FunctionSpec::power(2.0), &inst).unwrap();
        assert!((r.lhs.get(0, 0) - 2.5).abs() < 1e-12);
        assert!((r.rhs.get(0, 0) - 3.0).abs() < 1e-12);
        assert!((r.margin - 0.5).abs() < 1e-12);
    }

    #[test]
    fn midpoint_square_at_bounds_is_tight() {
        // A = mI, D = MI: f((m+M)/2) + f((M−m)/2) = (f(m)+f(M))/2 for t²
        let iv = Interval::new(0.7, 2.3).unwrap();
        let inst = MidpointInstance::new(SymMatrix::scalar(2, 0.7), SymMatrix::scalar(2, 2.3), iv).unwrap();
        let r = midpoint_jensen_check(&FunctionSpec::power(2.0), &inst).unwrap();
        assert!(r.margin.abs() < 1e-12);
    }

    #[test]
    fn subadditivity_on_worked_pair() {
        let r = subadditivity_check(&FunctionSpec::power(3.0), &worked_pair()).unwrap();
        assert!(r.holds);
        assert!((r.margin - 17.39).abs() < 0.01, "{}", r.margin);
    }

    #[test]
    fn subadditivity_square_closed_form() {
        let inst = worked_pair();
        let r = subadditivity_check(&FunctionSpec::power(2.0), &inst).unwrap();
        let s = inst.b.try_add(&inst.c).unwrap().min_eigenvalue().unwrap();
        assert!((r.margin - 3.0 * (s - 3.0)).abs() < 1e-9);
    }

    #[test]
    fn subadditivity_scalar_cube() {
        let big_m = 2.0;
        let inst = SubadditivityInstance::new(SymMatrix::scalar(2, 1.0), SymMatrix::scalar(2, 1.0), big_m).unwrap();
        let f = FunctionSpec::power(3.0);
        let r = subadditivity_check(&f, &inst).unwrap();
        let beta_half = crate::scalar_funcs::beta_eval(&f, &inst.interval(), 1.0).unwrap();
        let expected = f.value(2.0) - f.value(0.0) - 2.0 * f.value(1.0) - 2.0 * beta_half;
        assert!((r.margin - expected).abs() < 1e-12);
        assert!(expected >= 0.0);
    }

    #[test]
    fn norm_examples() {
        let i2 = SymMatrix::identity(2);
        let r = norm_subadditivity_check(&FunctionSpec::power(2.0), &i2, &i2, NormKind::Trace).unwrap();
        assert!((r.rhs - 8.0).abs() < 1e-12 && (r.lhs - 4.0).abs() < 1e-12);
        assert!((r.margin - 4.0).abs() < 1e-12);

        let inst = worked_pair();
        for norm in NormKind::ALL {
            let r = norm_subadditivity_check(&FunctionSpec::power(3.0), &inst.b, &inst.c, norm).unwrap();
            assert!(r.holds, "{norm:?}");
            let r = norm_subadditivity_check(&FunctionSpec::power(1.0), &inst.b, &inst.c, norm).unwrap();
            assert!(r.margin.abs() < 1e-12);
        }
        assert!(matches!(
            norm_subadditivity_check(&FunctionSpec::neg_power(1.5), &i2, &i2, NormKind::Trace),
            Err(Error::NotApplicable(_))
        ));
        let neg = SymMatrix::diag(&[1.0, -1.0]);
        assert!(norm_subadditivity_check(&FunctionSpec::power(2.0), &neg, &i2, NormKind::Trace).is_err());
    }

    #[test]
    fn tolerance_is_monotone() {
        let r = subadditivity_check(&FunctionSpec::power(3.0), &worked_pair()).unwrap();
        let strict = r.clone().with_rel_tol(0.0);
        let loose = r.with_rel_tol(1.0);
        assert!(!strict.holds || loose.holds);
    }
}
