//! Randomized counterexample search for claims with a hypothesis dropped.
//!
//! The search runs up to 64 random restarts, each followed by greedy
//! coordinate-wise Gaussian perturbation of the instance parameters. The
//! step halves after a full round of non-improving proposals. Candidates are
//! ranked by `margin / scale` and the first one with
//! `margin < −1e-6·scale` is returned as a witness.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::claims::ClaimId;
use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::matrix::{Matrix, SymMatrix};
use crate::operator_ineq::{
    mercer_operator_unchecked, midpoint_convexity_check, midpoint_jensen_check, subadditivity_check, MercerInstance,
    MidpointInstance, OperatorClaimResult, SubadditivityInstance,
};
use crate::scalar_funcs::{FunctionSpec, Interval};

use super::{
    sample_interval, sample_mercer_instance, sample_midpoint_instance, sample_midpoint_interval, sample_subadd_instance,
};

/// Relative threshold below which a margin counts as a violation.
pub const WITNESS_REL_TOL: f64 = 1e-6;
const RESTARTS: usize = 64;
const MIN_STEP: f64 = 1e-9;
const INIT_TRIES: usize = 10_000;

/// Hypothesis dropped during a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relaxation {
    /// Keep every hypothesis.
    None,
    /// Drop the spectral sandwich of the midpoint inequality; only `A, D ⪰ 0` remain.
    Sandwich,
    /// Drop `A + D = B + C` from the Mercer quadruple.
    Sum,
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relaxation::None => "none",
            Relaxation::Sandwich => "sandwich",
            Relaxation::Sum => "sum",
        })
    }
}

impl FromStr for Relaxation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Relaxation::None),
            "sandwich" => Ok(Relaxation::Sandwich),
            "sum" => Ok(Relaxation::Sum),
            other => Err(Error::Parse(format!(
                "unknown relaxation `{other}` (none, sandwich, sum)"
            ))),
        }
    }
}

/// Instance on which a claim was evaluated during a search.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f((A+D)/2) ⪯ (f(A)+f(D))/2` with no sandwich.
    MidpointConvexity {
        #[serde(rename = "A")]
        a: SymMatrix,
        #[serde(rename = "D")]
        d: SymMatrix,
    },
    Midpoint(MidpointInstance),
    /// A quadruple that may break `A + D = B + C` under [`Relaxation::Sum`].
    Mercer(MercerInstance),
    Subadditivity(SubadditivityInstance),
}

impl Witness {
    /// Recomputes the claim on the stored instance.
    pub fn evaluate(&self, f: &FunctionSpec) -> Result<OperatorClaimResult> {
        match self {
            Witness::MidpointConvexity { a, d } => midpoint_convexity_check(f, a, d),
            Witness::Midpoint(inst) => midpoint_jensen_check(f, inst),
            Witness::Mercer(inst) => mercer_operator_unchecked(f, inst),
            Witness::Subadditivity(inst) => subadditivity_check(f, inst),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchStatus {
    Found { witness: Witness, margin: f64, scale: f64 },
    Exhausted { best_margin: f64, best_scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub claim: ClaimId,
    pub relaxation: Relaxation,
    pub function: String,
    pub dim: usize,
    pub budget: usize,
    pub evaluations: usize,
    #[serde(flatten)]
    pub status: SearchStatus,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        matches!(self.status, SearchStatus::Found { .. })
    }
}

/// Parameterized family of instances explored by the local search.
trait Problem {
    /// Fresh random starting point: an optional window plus a parameter vector.
    fn init(&self, rng: &mut dyn rand::RngCore) -> Result<(Option<Interval>, Vec<f64>)>;
    /// `None` if the parameters violate a kept hypothesis.
    fn build(&self, iv: Option<Interval>, params: &[f64]) -> Option<Witness>;
}

fn upper_triangle(x: &SymMatrix) -> Vec<f64> {
    let n = x.order();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(x.get(i, j));
        }
    }
    out
}

fn from_upper_triangle(n: usize, v: &[f64]) -> SymMatrix {
    let mut m = Matrix::zeros(n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m.set(i, j, v[k]);
            m.set(j, i, v[k]);
            k += 1;
        }
    }
    SymMatrix::new(m).expect("symmetric by construction")
}

/// `L Lᵀ` for a full `n × n` factor stored row-major.
fn gram(n: usize, v: &[f64]) -> SymMatrix {
    let l = Matrix::from_fn(n, |i, j| v[i * n + j]);
    SymMatrix::symmetrize(&l.matmul(&l.transpose()).expect("same order"))
}

fn tri(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Sandwich dropped: `A = L Lᵀ`, `D = K Kᵀ` with free factors.
struct FreeMidpoint {
    n: usize,
}

impl Problem for FreeMidpoint {
    fn init(&self, rng: &mut dyn rand::RngCore) -> Result<(Option<Interval>, Vec<f64>)> {
        Ok((
            None,
            (0..2 * self.n * self.n)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        ))
    }

    fn build(&self, _iv: Option<Interval>, p: &[f64]) -> Option<Witness> {
        let k = self.n * self.n;
        Some(Witness::MidpointConvexity {
            a: gram(self.n, &p[..k]),
            d: gram(self.n, &p[k..]),
        })
    }
}

/// Sandwich kept: symmetric `A`, `D` that must pass the hypotheses.
struct SandwichMidpoint {
    n: usize,
}

impl Problem for SandwichMidpoint {
    fn init(&self, rng: &mut dyn rand::RngCore) -> Result<(Option<Interval>, Vec<f64>)> {
        let iv = sample_midpoint_interval(rng);
        let inst = sample_midpoint_instance(self.n, &iv, rng, INIT_TRIES)?;
        let mut p = upper_triangle(&inst.a);
        p.extend(upper_triangle(&inst.d));
        Ok((Some(iv), p))
    }

    fn build(&self, iv: Option<Interval>, p: &[f64]) -> Option<Witness> {
        let t = tri(self.n);
        let inst = MidpointInstance::new(
            from_upper_triangle(self.n, &p[..t]),
            from_upper_triangle(self.n, &p[t..]),
            iv?,
        )
        .ok()?;
        Some(Witness::Midpoint(inst))
    }
}

/// Mercer quadruple under the identity map or a given map.
struct MercerQuadruple {
    n: usize,
    map: MapSpec,
    keep_sum: bool,
}

impl Problem for MercerQuadruple {
    fn init(&self, rng: &mut dyn rand::RngCore) -> Result<(Option<Interval>, Vec<f64>)> {
        let iv = sample_interval(rng);
        let inst = sample_mercer_instance(self.n, &iv, &self.map, rng, INIT_TRIES)?;
        let mut p = upper_triangle(&inst.a);
        p.extend(upper_triangle(&inst.b));
        if !self.keep_sum {
            p.extend(upper_triangle(&inst.c));
        }
        p.extend(upper_triangle(&inst.d));
        Ok((Some(iv), p))
    }

    fn build(&self, iv: Option<Interval>, p: &[f64]) -> Option<Witness> {
        let (n, t) = (self.n, tri(self.n));
        let part = |k: usize| from_upper_triangle(n, &p[k * t..(k + 1) * t]);
        let (a, b) = (part(0), part(1));
        let (c, d) = if self.keep_sum {
            let d = part(2);
            // C is pinned by the sum constraint
            (a.try_add(&d).ok()?.try_sub(&b).ok()?, d)
        } else {
            (part(2), part(3))
        };
        let inst = MercerInstance {
            a,
            b,
            c,
            d,
            iv: iv?,
            map: self.map.clone(),
        };
        let valid = if self.keep_sum {
            inst.validate()
        } else {
            inst.validate_sandwich()
        };
        valid.ok()?;
        Some(Witness::Mercer(inst))
    }
}

struct Subadditivity {
    n: usize,
}

impl Problem for Subadditivity {
    fn init(&self, rng: &mut dyn rand::RngCore) -> Result<(Option<Interval>, Vec<f64>)> {
        let big_m = rng.gen_range(0.5..=4.0);
        let inst = sample_subadd_instance(self.n, big_m, rng, INIT_TRIES)?;
        let mut p = upper_triangle(&inst.b);
        p.extend(upper_triangle(&inst.c));
        Ok((Some(Interval::new(0.0, big_m)?), p))
    }

    fn build(&self, iv: Option<Interval>, p: &[f64]) -> Option<Witness> {
        let t = tri(self.n);
        let inst = SubadditivityInstance::new(
            from_upper_triangle(self.n, &p[..t]),
            from_upper_triangle(self.n, &p[t..]),
            iv?.hi(),
        )
        .ok()?;
        Some(Witness::Subadditivity(inst))
    }
}

fn problem_for(claim: ClaimId, relaxation: Relaxation, n: usize, map: &MapSpec) -> Result<Box<dyn Problem>> {
    let unknown = || Error::UnknownRelaxation {
        claim: claim.to_string(),
        relaxation: relaxation.to_string(),
    };
    Ok(match (claim, relaxation) {
        (ClaimId::MidpointOp, Relaxation::Sandwich) => Box::new(FreeMidpoint { n }),
        (ClaimId::MidpointOp, Relaxation::None) => Box::new(SandwichMidpoint { n }),
        (ClaimId::MercerOp, Relaxation::Sum) => Box::new(MercerQuadruple {
            n,
            map: map.clone(),
            keep_sum: false,
        }),
        (ClaimId::MercerOp, Relaxation::None) => Box::new(MercerQuadruple {
            n,
            map: map.clone(),
            keep_sum: true,
        }),
        (ClaimId::SubaddOp, Relaxation::None) => Box::new(Subadditivity { n }),
        (ClaimId::MidpointOp | ClaimId::MercerOp | ClaimId::SubaddOp, _) => return Err(unknown()),
        _ => return Err(Error::UnknownClaim(format!("{claim} (not searchable)"))),
    })
}

struct Scored {
    witness: Witness,
    margin: f64,
    scale: f64,
}

impl Scored {
    fn rank(&self) -> f64 {
        self.margin / self.scale
    }

    fn violates(&self) -> bool {
        self.margin < -WITNESS_REL_TOL * self.scale
    }
}

fn score(problem: &dyn Problem, f: &FunctionSpec, iv: Option<Interval>, p: &[f64]) -> Option<Scored> {
    let witness = problem.build(iv, p)?;
    let r = witness.evaluate(f).ok()?;
    if !r.margin.is_finite() {
        return None;
    }
    Some(Scored {
        witness,
        margin: r.margin,
        scale: r.scale,
    })
}

/// Searches for an instance violating `claim` once `relaxation` is dropped.
///
/// `budget` counts claim evaluations, including proposals rejected for
/// breaking a kept hypothesis. `map` is used only by `mercer-op`.
pub fn search_counterexample<R: Rng>(
    claim: ClaimId,
    relaxation: Relaxation,
    f: &FunctionSpec,
    n: usize,
    map: &MapSpec,
    budget: usize,
    rng: &mut R,
) -> Result<SearchOutcome> {
    if n == 0 || budget == 0 {
        return Err(Error::InvalidInput("search needs dim ≥ 1 and budget ≥ 1".into()));
    }
    let problem = problem_for(claim, relaxation, n, map)?;
    let restarts = RESTARTS.min(budget);
    let slice = budget / restarts;
    let mut evaluations = 0usize;
    let mut best: Option<(f64, f64)> = None;
    let outcome = |evaluations, status| SearchOutcome {
        claim,
        relaxation,
        function: f.to_string(),
        dim: n,
        budget,
        evaluations,
        status,
    };

    for r in 0..restarts {
        let stop = if r + 1 == restarts { budget } else { slice * (r + 1) };
        let (iv, mut params) = problem.init(rng)?;
        evaluations += 1;
        let Some(mut current) = score(problem.as_ref(), f, iv, &params) else {
            continue;
        };
        let mut step = 0.1 * (1.0 + params.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let mut misses = 0usize;
        loop {
            if best.is_none_or(|(rank, _)| current.rank() < rank) {
                best = Some((current.rank(), current.margin));
            }
            if current.violates() {
                // re-derive the reported margin from the stored witness alone
                let check = current.witness.evaluate(f)?;
                return Ok(outcome(
                    evaluations,
                    SearchStatus::Found {
                        witness: current.witness,
                        margin: check.margin,
                        scale: check.scale,
                    },
                ));
            }
            if evaluations >= stop || step < MIN_STEP {
                break;
            }
            let k = rng.gen_range(0..params.len());
            let old = params[k];
            params[k] += step * rng.sample::<f64, _>(StandardNormal);
            evaluations += 1;
            match score(problem.as_ref(), f, iv, &params) {
                Some(s) if s.rank() < current.rank() => {
                    current = s;
                    misses = 0;
                }
                _ => {
                    params[k] = old;
                    misses += 1;
                    if misses >= params.len() {
                        step *= 0.5;
                        misses = 0;
                    }
                }
            }
        }
        if evaluations >= budget {
            break;
        }
    }

    let (rank, margin) = best.unwrap_or((f64::INFINITY, f64::INFINITY));
    let scale = if rank != 0.0 && rank.is_finite() {
        margin / rank
    } else {
        1.0
    };
    Ok(outcome(
        evaluations,
        SearchStatus::Exhausted {
            best_margin: margin,
            best_scale: scale,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::rng_from;

    #[test]
    fn relaxation_grammar() {
        for s in ["none", "sandwich", "sum"] {
            assert_eq!(s.parse::<Relaxation>().unwrap().to_string(), s);
        }
        assert!("bound".parse::<Relaxation>().is_err());
    }

    #[test]
    fn unsupported_pairs() {
        let mut rng = rng_from(1, 0);
        let f = FunctionSpec::power(3.0);
        let r = search_counterexample(
            ClaimId::MidpointOp,
            Relaxation::Sum,
            &f,
            2,
            &MapSpec::Identity,
            10,
            &mut rng,
        );
        assert!(matches!(r, Err(Error::UnknownRelaxation { .. })));
        let r = search_counterexample(ClaimId::HhSq, Relaxation::None, &f, 2, &MapSpec::Identity, 10, &mut rng);
        assert!(matches!(r, Err(Error::UnknownClaim(_))));
    }

    #[test]
    fn cube_is_not_operator_convex() {
        let mut rng = rng_from(2024, 0);
        let f = FunctionSpec::power(3.0);
        let out = search_counterexample(
            ClaimId::MidpointOp,
            Relaxation::Sandwich,
            &f,
            2,
            &MapSpec::Identity,
            100_000,
            &mut rng,
        )
        .unwrap();
        match &out.status {
            SearchStatus::Found { witness, margin, scale } => {
                assert!(*margin < -WITNESS_REL_TOL * scale);
                let again = witness.evaluate(&f).unwrap();
                assert!((again.margin - margin).abs() <= 1e-12);
            }
            other => panic!("no witness: {other:?}"),
        }
    }

    #[test]
    fn dropping_the_sum_breaks_the_square_identity() {
        let mut rng = rng_from(7, 0);
        let f = FunctionSpec::power(2.0);
        let out = search_counterexample(
            ClaimId::MercerOp,
            Relaxation::Sum,
            &f,
            2,
            &MapSpec::Identity,
            1_000,
            &mut rng,
        )
        .unwrap();
        assert!(out.found(), "{out:?}");
        assert!(out.evaluations <= 1_000);
    }

    #[test]
    fn searches_are_deterministic() {
        let f = FunctionSpec::power(3.0);
        let run = || {
            let mut rng = rng_from(99, 4);
            search_counterexample(
                ClaimId::MidpointOp,
                Relaxation::None,
                &f,
                2,
                &MapSpec::Identity,
                2_000,
                &mut rng,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }
}
