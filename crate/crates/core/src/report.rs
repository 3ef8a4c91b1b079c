//! Seeded claim suites and the structured reports they produce.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::claims::ClaimId;
use crate::error::{Error, Result};
use crate::maps::{MapDescriptor, MapSpec};
use crate::matrix::{apply_beta, apply_function, Matrix, SymMatrix};
use crate::operator_ineq::{
    jensen_mercer_check, mercer_mixed_check, mercer_operator_check, midpoint_jensen_check, norm_subadditivity_check,
    subadditivity_check, NormKind, SubadditivityInstance, OPERATOR_REL_TOL,
};
use crate::sampler::{
    rng_from, sample_interval, sample_mercer_instance, sample_midpoint_instance, sample_midpoint_interval,
    sample_subadd_instance, sample_with_spectrum, SamplerRng,
};
use crate::scalar_funcs::{certify_superquadratic, CertVerdict, FnKind, FunctionSpec, Interval, DEFAULT_CERT_RANGE};
use crate::scalar_ineq::{
    four_point_gap, hh_mercer_chain_1, hh_mercer_chain_2, hh_sq_chain, jensen_sq_gap, lemma_nabla_gap,
    mercer_scalar_gap, power_chain, scale_of, superadditive_gap, ChainResult, WeightedSample, SCALAR_REL_TOL,
};

/// Rejection budget per sampled instance.
pub const MAX_TRIES: usize = 10_000;
/// Upper end of the scalar sampling domain `[0, T]`.
pub const SCALAR_DOMAIN: f64 = 10.0;

/// Parameters of one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub claim: ClaimId,
    pub function: FunctionSpec,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub stream: u64,
    /// `None` cycles through [`MapDescriptor::family`].
    pub map: Option<MapDescriptor>,
    /// Relative tolerance; defaults to 1e-9 for scalar and 1e-8 for operator claims.
    pub rel_tol: Option<f64>,
}

impl SuiteConfig {
    pub fn new(claim: ClaimId, function: FunctionSpec, dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            claim,
            function,
            dim,
            trials,
            seed,
            stream: 0,
            map: None,
            rel_tol: None,
        }
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol.unwrap_or(if self.claim.is_operator() {
            OPERATOR_REL_TOL
        } else {
            SCALAR_REL_TOL
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub function: String,
    pub map: Option<String>,
    pub dim: usize,
    pub trials: usize,
    /// Instances actually evaluated; `trials` minus sampling failures.
    pub evaluated: usize,
    pub sampling_failures: usize,
    pub violations: usize,
    /// Smallest absolute margin seen.
    pub worst_margin: f64,
    /// Range of `margin / scale` over all evaluated instances.
    pub relative_margin_range: [f64; 2],
    pub tolerance: f64,
    pub seed: u64,
    pub stream: u64,
    /// Most violated instance, if any.
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl ClaimReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Running aggregate over trials.
#[derive(Debug, Clone)]
struct Tally {
    rel_tol: f64,
    evaluated: usize,
    failures: usize,
    violations: usize,
    worst_margin: f64,
    rel_lo: f64,
    rel_hi: f64,
    worst_violation: f64,
    witness: Option<Value>,
}

impl Tally {
    fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            evaluated: 0,
            failures: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            rel_lo: f64::INFINITY,
            rel_hi: f64::NEG_INFINITY,
            worst_violation: f64::INFINITY,
            witness: None,
        }
    }

    fn record(&mut self, margin: f64, scale: f64, witness: impl FnOnce() -> Value) {
        self.evaluated += 1;
        let rel = margin / scale;
        self.worst_margin = self.worst_margin.min(margin);
        self.rel_lo = self.rel_lo.min(rel);
        self.rel_hi = self.rel_hi.max(rel);
        // NaN margins count as violations
        if !(margin >= -self.rel_tol * scale) {
            self.violations += 1;
            if self.witness.is_none() || rel < self.worst_violation {
                self.worst_violation = rel;
                self.witness = Some(witness());
            }
        }
    }

    fn record_chain(&mut self, chain: &ChainResult, witness: impl FnOnce() -> Value) {
        self.record(chain.worst_margin(), chain.scale(), witness);
    }

    fn summary(&self) -> Value {
        json!({
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "relative_margin_range": [self.rel_lo, self.rel_hi],
        })
    }
}

/// Soaks up sampling exhaustion so it is counted rather than fatal.
fn sampled<T>(tally: &mut Tally, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::SamplingFailure { .. }) => {
            tally.failures += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("instances serialize")
}

/// `0 ≤ m < M ≤ T` with `M − m ≥ 1e-3`.
fn scalar_interval(rng: &mut SamplerRng) -> Interval {
    loop {
        let (a, b) = (rng.gen_range(0.0..=SCALAR_DOMAIN), rng.gen_range(0.0..=SCALAR_DOMAIN));
        let (m, big_m) = if a <= b { (a, b) } else { (b, a) };
        if big_m - m >= 1e-3 {
            return Interval::new(m, big_m).expect("ordered");
        }
    }
}

/// Two distinct points of `[m, M]`.
fn distinct_pair(rng: &mut SamplerRng, iv: &Interval) -> (f64, f64) {
    loop {
        let x = rng.gen_range(iv.lo()..=iv.hi());
        let y = rng.gen_range(iv.lo()..=iv.hi());
        if x != y {
            return (x, y);
        }
    }
}

fn power_exponent(f: &FunctionSpec, claim: ClaimId) -> Result<f64> {
    match f.kind() {
        FnKind::Power if f.exponent() >= 1.0 => Ok(f.exponent()),
        _ => Err(Error::NotApplicable(format!(
            "{claim} needs pow:<p> with p ≥ 1, got {f}"
        ))),
    }
}

/// Runs `cfg.trials` seeded instances of the claim and aggregates their margins.
///
/// The result is a pure function of `cfg`; `wall_time_ms` is left unset.
pub fn run_suite(cfg: &SuiteConfig) -> Result<ClaimReport> {
    let f = &cfg.function;
    let claim = cfg.claim;
    if cfg.trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if claim.is_operator() && cfg.dim == 0 {
        return Err(Error::InvalidInput("dim must be at least 1".into()));
    }
    let rel_tol = cfg.rel_tol();
    if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be a finite non-negative number, got {rel_tol}"
        )));
    }
    let mut rng = rng_from(cfg.seed, cfg.stream);
    let mut tally = Tally::new(rel_tol);
    let mut extra = BTreeMap::new();
    let n = cfg.dim;

    // maps are fixed per suite: either the requested one or the seeded family, cycled per trial
    let descriptors: Vec<MapDescriptor> = match cfg.map {
        Some(d) => vec![d],
        None => MapDescriptor::family(cfg.seed).to_vec(),
    };
    let maps: Vec<(String, MapSpec)> = if claim.uses_map() {
        descriptors
            .iter()
            .map(|d| Ok((d.to_string(), d.instantiate(n)?)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let map_label = claim.uses_map().then(|| match cfg.map {
        Some(d) => d.to_string(),
        None => format!(
            "family:{}",
            descriptors.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
        ),
    });

    match claim {
        ClaimId::JensenSq => {
            for _ in 0..cfg.trials {
                let (x, y) = (rng.gen_range(0.0..=SCALAR_DOMAIN), rng.gen_range(0.0..=SCALAR_DOMAIN));
                let lambda = rng.gen_range(0.0..=1.0);
                let gap = jensen_sq_gap(f, x, y, lambda)?;
                let scale = scale_of(&[f.value(x), f.value(y)]);
                tally.record(gap, scale, || json!({"x": x, "y": y, "lambda": lambda}));
            }
        }
        ClaimId::MercerScalar => {
            for _ in 0..cfg.trials {
                let iv = scalar_interval(&mut rng);
                let k = rng.gen_range(1..=5);
                let points: Vec<f64> = (0..k).map(|_| rng.gen_range(iv.lo()..=iv.hi())).collect();
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
                weights[0] = (weights[0] + 1.0 - weights.iter().sum::<f64>()).clamp(0.0, 1.0);
                let sample = WeightedSample::new(points.clone(), weights.clone())?;
                let gap = mercer_scalar_gap(f, &iv, &sample)?;
                let scale = scale_of(&[f.value(iv.lo()), f.value(iv.hi())]);
                tally.record(
                    gap,
                    scale,
                    || json!({"m": iv.lo(), "M": iv.hi(), "points": points, "weights": weights}),
                );
            }
        }
        ClaimId::LemmaNabla => {
            for _ in 0..cfg.trials {
                let iv = scalar_interval(&mut rng);
                let x = rng.gen_range(iv.lo()..=iv.hi());
                let y = rng.gen_range(iv.lo()..=iv.hi());
                let lambda = rng.gen_range(0.0..=1.0);
                let gap = lemma_nabla_gap(f, &iv, x, y, lambda)?;
                let scale = scale_of(&[f.value(iv.lo()), f.value(iv.hi())]);
                tally.record(
                    gap,
                    scale,
                    || json!({"m": iv.lo(), "M": iv.hi(), "x": x, "y": y, "lambda": lambda}),
                );
            }
        }
        ClaimId::HhMercer1 | ClaimId::HhMercer2 => {
            for _ in 0..cfg.trials {
                let iv = scalar_interval(&mut rng);
                let (x, y) = distinct_pair(&mut rng, &iv);
                let chain = if claim == ClaimId::HhMercer1 {
                    hh_mercer_chain_1(f, &iv, x, y)?
                } else {
                    hh_mercer_chain_2(f, &iv, x, y)?
                };
                tally.record_chain(
                    &chain,
                    || json!({"m": iv.lo(), "M": iv.hi(), "x": x, "y": y, "terms": chain.terms}),
                );
            }
        }
        ClaimId::HhSq => {
            for _ in 0..cfg.trials {
                let (a, b) = loop {
                    let a = rng.gen_range(0.0..=SCALAR_DOMAIN);
                    let b = rng.gen_range(0.0..=SCALAR_DOMAIN);
                    if a != b {
                        break if a < b { (a, b) } else { (b, a) };
                    }
                };
                let chain = hh_sq_chain(f, a, b)?;
                tally.record_chain(&chain, || json!({"x": a, "y": b, "terms": chain.terms}));
            }
        }
        ClaimId::PowerChain | ClaimId::SquareIdentity => {
            let p = power_exponent(f, claim)?;
            if claim == ClaimId::SquareIdentity && p != 2.0 {
                return Err(Error::NotApplicable(format!(
                    "square-identity is stated for pow:2, got {f}"
                )));
            }
            for _ in 0..cfg.trials {
                let iv = scalar_interval(&mut rng);
                let (x, y) = distinct_pair(&mut rng, &iv);
                let chain = power_chain(p, &iv, x, y)?;
                tally.record_chain(
                    &chain,
                    || json!({"m": iv.lo(), "M": iv.hi(), "x": x, "y": y, "terms": chain.terms}),
                );
            }
        }
        ClaimId::Superadditive => {
            for _ in 0..cfg.trials {
                let (x, y) = (rng.gen_range(0.0..=SCALAR_DOMAIN), rng.gen_range(0.0..=SCALAR_DOMAIN));
                if x + y == 0.0 {
                    tally.failures += 1;
                    continue;
                }
                let gap = superadditive_gap(f, x, y)?;
                let scale = scale_of(&[f.value(x), f.value(y), f.value(x + y)]);
                tally.record(gap, scale, || json!({"x": x, "y": y}));
            }
        }
        ClaimId::FourPoint => {
            for _ in 0..cfg.trials {
                let (a, b) = (rng.gen_range(0.0..=SCALAR_DOMAIN), rng.gen_range(0.0..=SCALAR_DOMAIN));
                let (y1, y2) = if a <= b { (a, b) } else { (b, a) };
                if y1 == y2 {
                    tally.failures += 1;
                    continue;
                }
                let x1 = rng.gen_range(y1..=0.5 * (y1 + y2));
                // keep x1 ≤ x2 ≤ y2 exactly in floating point
                let x2 = (y1 + y2 - x1).clamp(x1, y2);
                let gap = four_point_gap(f, y1, x1, x2, y2)?;
                let scale = scale_of(&[f.value(y1), f.value(y2)]);
                tally.record(gap, scale, || json!({"y1": y1, "x1": x1, "x2": x2, "y2": y2}));
            }
        }
        ClaimId::SqDef => {
            let cert = certify_superquadratic(f, DEFAULT_CERT_RANGE, cfg.trials)?;
            let scale = 1.0 + f.value(DEFAULT_CERT_RANGE).abs();
            // one trial per grid point: the window width upper − lower
            let mut worst = f64::INFINITY;
            for w in &cert.windows {
                let width = w.upper - w.lower;
                if width.is_finite() {
                    worst = worst.min(width);
                }
            }
            tally.evaluated = 1;
            tally.worst_margin = worst;
            tally.rel_lo = worst / scale;
            tally.rel_hi = worst / scale;
            tally.rel_tol = cert.tolerance / scale;
            extra.insert("grid_size".into(), json!(cfg.trials));
            extra.insert("range".into(), json!(DEFAULT_CERT_RANGE));
            extra.insert("claimed_superquadratic".into(), json!(f.claimed_superquadratic()));
            match cert.verdict {
                CertVerdict::Holds => {
                    extra.insert("verdict".into(), json!("holds"));
                }
                CertVerdict::Fails { x, y_below, y_above } => {
                    extra.insert("verdict".into(), json!("fails"));
                    tally.violations = 1;
                    tally.witness = Some(json!({"x": x, "y_below": y_below, "y_above": y_above}));
                }
            }
        }
        ClaimId::MercerOp | ClaimId::MercerOpMixed => {
            for t in 0..cfg.trials {
                let (label, map) = &maps[t % maps.len()];
                let iv = sample_interval(&mut rng);
                let Some(inst) = sampled(&mut tally, sample_mercer_instance(n, &iv, map, &mut rng, MAX_TRIES))? else {
                    continue;
                };
                let r = if claim == ClaimId::MercerOp {
                    mercer_operator_check(f, &inst)?
                } else {
                    mercer_mixed_check(f, &inst)?
                };
                tally.record(r.margin, r.scale, || json!({"map": label, "instance": to_value(&inst)}));
            }
        }
        ClaimId::JensenMercerOp => {
            let mut literal = Tally::new(rel_tol);
            for t in 0..cfg.trials {
                let (label, map) = &maps[t % maps.len()];
                let iv = sample_interval(&mut rng);
                let c = sample_with_spectrum(n, iv.lo(), iv.hi(), &mut rng)?;
                let r = jensen_mercer_check(f, &iv, &c, map)?;
                let witness = || json!({"map": label, "m": iv.lo(), "M": iv.hi(), "C": to_value(&c)});
                literal.record(r.literal.margin, r.literal.scale, witness);
                tally.record(r.substituted.margin, r.substituted.scale, witness);
            }
            extra.insert("form".into(), json!("substituted"));
            extra.insert("literal_form".into(), literal.summary());
        }
        ClaimId::MidpointOp => {
            for _ in 0..cfg.trials {
                let iv = sample_midpoint_interval(&mut rng);
                let Some(inst) = sampled(&mut tally, sample_midpoint_instance(n, &iv, &mut rng, MAX_TRIES))? else {
                    continue;
                };
                let r = midpoint_jensen_check(f, &inst)?;
                tally.record(r.margin, r.scale, || to_value(&inst));
            }
        }
        ClaimId::SubaddOp => {
            for _ in 0..cfg.trials {
                let big_m = rng.gen_range(0.5..=4.0);
                let Some(inst) = sampled(&mut tally, sample_subadd_instance(n, big_m, &mut rng, MAX_TRIES))? else {
                    continue;
                };
                let r = subadditivity_check(f, &inst)?;
                tally.record(r.margin, r.scale, || to_value(&inst));
            }
        }
        ClaimId::SubaddNorm => {
            let mut per_norm: Vec<Tally> = NormKind::ALL.iter().map(|_| Tally::new(rel_tol)).collect();
            for _ in 0..cfg.trials {
                let b = sample_with_spectrum(n, 0.0, 3.0, &mut rng)?;
                let c = sample_with_spectrum(n, 0.0, 3.0, &mut rng)?;
                let witness = || json!({"B": to_value(&b), "C": to_value(&c)});
                let mut worst: Option<(f64, f64)> = None;
                for (kind, sub) in NormKind::ALL.iter().zip(per_norm.iter_mut()) {
                    let r = norm_subadditivity_check(f, &b, &c, *kind)?;
                    let scale = 1.0 + r.rhs;
                    sub.record(r.margin, scale, witness);
                    if worst.is_none_or(|(m, s)| r.margin / scale < m / s) {
                        worst = Some((r.margin, scale));
                    }
                }
                let (margin, scale) = worst.expect("three norms");
                tally.record(margin, scale, witness);
            }
            for (kind, sub) in NormKind::ALL.iter().zip(&per_norm) {
                extra.insert(
                    format!("{}_norm", to_value(kind).as_str().unwrap_or("?")),
                    sub.summary(),
                );
            }
        }
    }

    if tally.evaluated == 0 {
        tally.worst_margin = f64::NAN;
        tally.rel_lo = f64::NAN;
        tally.rel_hi = f64::NAN;
    }
    Ok(ClaimReport {
        claim,
        function: f.to_string(),
        map: map_label,
        dim: if claim.is_operator() { n } else { 1 },
        trials: cfg.trials,
        evaluated: tally.evaluated,
        sampling_failures: tally.failures,
        violations: tally.violations,
        worst_margin: tally.worst_margin,
        relative_margin_range: [tally.rel_lo, tally.rel_hi],
        tolerance: tally.rel_tol,
        seed: cfg.seed,
        stream: cfg.stream,
        witness: tally.witness,
        extra,
        wall_time_ms: None,
    })
}

/// Tolerance for the rational entries of the worked example.
pub const EXACT_TOL: f64 = 1e-12;

/// The 2×2 sub-additivity example with `f = t³`, `M = 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkedExample {
    #[serde(rename = "B")]
    pub b: SymMatrix,
    #[serde(rename = "C")]
    pub c: SymMatrix,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub f_b: SymMatrix,
    pub f_c: SymMatrix,
    pub beta_b: SymMatrix,
    pub beta_c: SymMatrix,
    pub f_sum: SymMatrix,
    pub f_sum_shifted: SymMatrix,
    pub lhs: SymMatrix,
    pub rhs: SymMatrix,
    /// `λ_min(RHS − LHS)`.
    pub margin: f64,
    /// Largest deviation of any computed matrix from its oracle.
    pub max_oracle_error: f64,
    pub report: ClaimReport,
}

impl WorkedExample {
    /// Named matrices in display order.
    pub fn matrices(&self) -> Vec<(&'static str, &SymMatrix)> {
        vec![
            ("B", &self.b),
            ("C", &self.c),
            ("f(B)", &self.f_b),
            ("f(C)", &self.f_c),
            ("beta(B)", &self.beta_b),
            ("beta(C)", &self.beta_c),
            ("f(B+C)", &self.f_sum),
            ("f(B+C-3I)", &self.f_sum_shifted),
            ("LHS = f(B)+f(C)+beta(B)+beta(C)", &self.lhs),
            ("RHS = f(B+C)-f(B+C-3I)", &self.rhs),
        ]
    }
}

fn cube(x: &Matrix) -> Matrix {
    x.matmul(x).and_then(|x2| x2.matmul(x)).expect("square")
}

/// `β(X) = X/3·(3I−X)³ + (3I−X)/3·X³` on `[0, 3]`, by matrix products.
fn beta_oracle(x: &SymMatrix) -> SymMatrix {
    let xm = x.as_matrix();
    let r = SymMatrix::scalar(x.order(), 3.0).try_sub(x).expect("same order");
    let rm = r.as_matrix();
    let a = xm.matmul(&cube(rm)).expect("square").scale(1.0 / 3.0);
    let b = rm.matmul(&cube(xm)).expect("square").scale(1.0 / 3.0);
    &SymMatrix::symmetrize(&a) + &SymMatrix::symmetrize(&b)
}

fn check_close(name: &str, got: &SymMatrix, want: &SymMatrix, tol: f64) -> Result<f64> {
    let err = got.max_abs_diff(want)?;
    if err > tol {
        return Err(Error::Numeric(format!(
            "{name} deviates from its oracle by {err:e} (tolerance {tol:e})"
        )));
    }
    Ok(err)
}

/// Recomputes the worked example through the spectral calculus and checks
/// every matrix against a direct polynomial oracle.
pub fn demo_paper_example() -> Result<WorkedExample> {
    let f = FunctionSpec::power(3.0);
    let b = SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]])?;
    let c = SymMatrix::diag(&[3.0, 2.0]);
    let big_m = 3.0;
    let inst = SubadditivityInstance::new(b.clone(), c.clone(), big_m)?;
    let iv = inst.interval();

    let f_b = apply_function(&f, &b)?;
    let f_c = apply_function(&f, &c)?;
    let beta_b = apply_beta(&f, &iv, &b)?;
    let beta_c = apply_beta(&f, &iv, &c)?;
    let sum = b.try_add(&c)?;
    let shifted = sum.shift(-big_m);
    let f_sum = apply_function(&f, &sum)?;
    let f_sum_shifted = apply_function(&f, &shifted)?;
    let lhs = &(&f_b + &f_c) + &(&beta_b + &beta_c);
    let rhs = &f_sum - &f_sum_shifted;

    let mut max_err = 0.0f64;
    max_err = max_err.max(check_close(
        "f(B)",
        &f_b,
        &SymMatrix::from_rows(&[vec![14.0, -13.0], vec![-13.0, 14.0]])?,
        EXACT_TOL,
    )?);
    max_err = max_err.max(check_close(
        "beta(B)",
        &beta_b,
        &SymMatrix::from_rows(&[vec![5.0 / 3.0; 2], vec![5.0 / 3.0; 2]])?,
        EXACT_TOL,
    )?);
    let oracle_tol = 1e-9;
    let cube_sym = |x: &SymMatrix| SymMatrix::symmetrize(&cube(x.as_matrix()));
    max_err = max_err.max(check_close("f(C)", &f_c, &cube_sym(&c), oracle_tol)?);
    max_err = max_err.max(check_close("beta(C)", &beta_c, &beta_oracle(&c), oracle_tol)?);
    max_err = max_err.max(check_close("f(B+C)", &f_sum, &cube_sym(&sum), oracle_tol)?);
    max_err = max_err.max(check_close(
        "f(B+C-3I)",
        &f_sum_shifted,
        &cube_sym(&shifted),
        oracle_tol,
    )?);
    let lhs_oracle = &(&cube_sym(&b) + &cube_sym(&c)) + &(&beta_oracle(&b) + &beta_oracle(&c));
    let rhs_oracle = &cube_sym(&sum) - &cube_sym(&shifted);
    max_err = max_err.max(check_close("LHS", &lhs, &lhs_oracle, oracle_tol)?);
    max_err = max_err.max(check_close("RHS", &rhs, &rhs_oracle, oracle_tol)?);

    let r = subadditivity_check(&f, &inst)?;
    if !r.holds {
        return Err(Error::Numeric(format!(
            "RHS − LHS is not positive semidefinite: margin {}",
            r.margin
        )));
    }
    let report = ClaimReport {
        claim: ClaimId::SubaddOp,
        function: f.to_string(),
        map: None,
        dim: 2,
        trials: 1,
        evaluated: 1,
        sampling_failures: 0,
        violations: 0,
        worst_margin: r.margin,
        relative_margin_range: [r.margin / r.scale; 2],
        tolerance: OPERATOR_REL_TOL,
        seed: 0,
        stream: 0,
        witness: None,
        extra: BTreeMap::from([("max_oracle_error".to_string(), json!(max_err))]),
        wall_time_ms: None,
    };
    Ok(WorkedExample {
        b,
        c,
        big_m,
        f_b,
        f_c,
        beta_b,
        beta_c,
        f_sum,
        f_sum_shifted,
        lhs,
        rhs,
        margin: r.margin,
        max_oracle_error: max_err,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(claim: &str, f: &str, dim: usize, trials: usize) -> SuiteConfig {
        SuiteConfig::new(claim.parse().unwrap(), f.parse().unwrap(), dim, trials, 11)
    }

    #[test]
    fn square_identity_suite() {
        let r = run_suite(&cfg("square-identity", "pow:2", 1, 1000)).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.worst_margin >= -1e-9 * 101.0);
        assert!(run_suite(&cfg("square-identity", "pow:3", 1, 10)).is_err());
    }

    #[test]
    fn mercer_op_over_the_family() {
        let r = run_suite(&cfg("mercer-op", "pow:3", 2, 500)).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
        assert_eq!(r.evaluated + r.sampling_failures, 500);
        assert!(r.map.unwrap().starts_with("family:"));
    }

    #[test]
    fn sq_def_reports_failure_with_witness() {
        let r = run_suite(&cfg("sq-def", "pow:1.5", 1, 101)).unwrap();
        assert_eq!(r.extra["verdict"], json!("fails"));
        assert_eq!(r.violations, 1);
        assert!(r.witness.is_some());
        let r = run_suite(&cfg("sq-def", "pow:3", 1, 101)).unwrap();
        assert_eq!(r.extra["verdict"], json!("holds"));
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn scalar_suites_hold_for_the_cube() {
        for claim in [
            "jensen-sq",
            "mercer-scalar",
            "lemma-nabla",
            "hh-mercer-1",
            "hh-mercer-2",
            "hh-sq",
            "power-chain",
            "superadditive",
            "four-point",
        ] {
            let r = run_suite(&cfg(claim, "pow:3", 1, 200)).unwrap();
            assert_eq!(r.violations, 0, "{claim}: {r:?}");
        }
    }

    #[test]
    fn operator_suites_hold() {
        for claim in [
            "mercer-op-mixed",
            "jensen-mercer-op",
            "midpoint-op",
            "subadd-op",
            "subadd-norm",
        ] {
            let r = run_suite(&cfg(claim, "pow:3", 3, 60)).unwrap();
            assert_eq!(r.violations, 0, "{claim}: {r:?}");
            assert_eq!(r.sampling_failures, 0, "{claim}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let c = cfg("mercer-op", "negpow:1.5", 3, 50);
        assert_eq!(
            run_suite(&c).unwrap().to_json_line(),
            run_suite(&c).unwrap().to_json_line()
        );
        let mut other = c.clone();
        other.stream = 1;
        assert_ne!(
            run_suite(&c).unwrap().to_json_line(),
            run_suite(&other).unwrap().to_json_line()
        );
    }

    #[test]
    fn tighter_tolerance_never_reduces_violations() {
        let mut c = cfg("hh-sq", "pow:1.5", 1, 300);
        c.rel_tol = Some(1e-3);
        let loose = run_suite(&c).unwrap();
        c.rel_tol = Some(0.0);
        let tight = run_suite(&c).unwrap();
        assert!(tight.violations >= loose.violations);
    }

    #[test]
    fn worked_example() {
        let ex = demo_paper_example().unwrap();
        assert!((ex.margin - 17.39).abs() < 0.01, "{}", ex.margin);
        let want_rhs = SymMatrix::from_rows(&[vec![126.0, -54.0], vec![-54.0, 72.0]]).unwrap();
        assert!(ex.rhs.max_abs_diff(&want_rhs).unwrap() < 1e-9);
        let want_lhs = SymMatrix::from_rows(&[vec![128.0 / 3.0, -34.0 / 3.0], vec![-34.0 / 3.0, 27.0]]).unwrap();
        assert!(ex.lhs.max_abs_diff(&want_lhs).unwrap() < 1e-9);
        assert_eq!(ex.report.violations, 0);
    }
}
