//! Seeded generation of matrices and of instances satisfying each claim's
//! hypotheses.
//!
//! All randomness flows from a [`RngSeed`]: a 64-bit seed plus a stream id,
//! mapped onto a ChaCha8 stream so identical pairs reproduce identical
//! sequences on every platform.

mod search;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::MapSpec;
use crate::matrix::{loewner_leq, Matrix, SymMatrix};
use crate::operator_ineq::{MercerInstance, MidpointInstance, SubadditivityInstance, HYPOTHESIS_TOL};
use crate::scalar_funcs::Interval;

pub use search::{search_counterexample, Relaxation, SearchOutcome, SearchStatus, Witness};

pub type SamplerRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> SamplerRng {
        rng_from(self.seed, self.stream)
    }
}

pub fn rng_from(seed: u64, stream: u64) -> SamplerRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix, with the signs of `R`'s diagonal absorbed into `Q`.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    for j in 0..n {
        // two Gram–Schmidt passes keep QᵀQ = I to working precision
        for _ in 0..2 {
            for k in 0..j {
                let dot: f64 = (0..n).map(|i| cols[j][i] * cols[k][i]).sum();
                for i in 0..n {
                    cols[j][i] -= dot * cols[k][i];
                }
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            // measure-zero degeneracy: fall back to the coordinate vector
            cols[j] = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
            continue;
        }
        for v in &mut cols[j] {
            *v /= norm;
        }
    }
    Matrix::from_fn(n, |i, j| cols[j][i])
}

/// `Q · diag(λ) · Qᵀ` with eigenvalues uniform on `[a, b]`; exactly `a·I` when `a = b`.
pub fn sample_with_spectrum<R: Rng + ?Sized>(n: usize, a: f64, b: f64, rng: &mut R) -> Result<SymMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix order must be at least 1".into()));
    }
    if !(a <= b && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!("spectral window [{a}, {b}] is empty")));
    }
    if a == b {
        return Ok(SymMatrix::scalar(n, a));
    }
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(a..=b)).collect();
    let q = random_orthogonal(n, rng);
    SymMatrix::from_spectrum(&q, &values)
}

/// Interval used by the randomized suites: `m ∈ [0, 2]`, `M − m ∈ [0.5, 3]`.
pub fn sample_interval<R: Rng + ?Sized>(rng: &mut R) -> Interval {
    let m = rng.gen_range(0.0..=2.0);
    let width = rng.gen_range(0.5..=3.0);
    Interval::new(m, m + width).expect("m ≥ 0 and width > 0")
}

/// How a Mercer quadruple is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// All four matrices share one eigenbasis; always succeeds.
    Commuting,
    /// `A`, `D` drawn independently and `B`, `C` split from `A + D`; rejection-sampled.
    Noncommuting,
}

/// Draws a quadruple `0 ⪯ A ⪯ mI ⪯ B ⪯ C ⪯ MI ⪯ D` with `A + D = B + C`.
///
/// The mode is chosen per call with equal probability.
pub fn sample_mercer_instance<R: Rng + ?Sized>(
    n: usize,
    iv: &Interval,
    map: &MapSpec,
    rng: &mut R,
    max_tries: usize,
) -> Result<MercerInstance> {
    let mode = if rng.gen_bool(0.5) {
        SamplingMode::Commuting
    } else {
        SamplingMode::Noncommuting
    };
    sample_mercer_instance_with_mode(n, iv, map, mode, rng, max_tries)
}

pub fn sample_mercer_instance_with_mode<R: Rng + ?Sized>(
    n: usize,
    iv: &Interval,
    map: &MapSpec,
    mode: SamplingMode,
    rng: &mut R,
    max_tries: usize,
) -> Result<MercerInstance> {
    if max_tries == 0 {
        return Err(Error::InvalidInput("max_tries must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("matrix order must be at least 1".into()));
    }
    match mode {
        SamplingMode::Commuting => commuting_quadruple(n, iv, map, rng),
        SamplingMode::Noncommuting => {
            for _ in 0..max_tries {
                if let Some(inst) = noncommuting_quadruple(n, iv, map, rng)? {
                    return Ok(inst);
                }
            }
            Err(Error::SamplingFailure {
                what: "non-commuting Mercer quadruple".into(),
                tries: max_tries,
            })
        }
    }
}

fn commuting_quadruple<R: Rng + ?Sized>(n: usize, iv: &Interval, map: &MapSpec, rng: &mut R) -> Result<MercerInstance> {
    let (m, big_m) = (iv.lo(), iv.hi());
    let d_max = 2.0 * big_m;
    let (mut a, mut b, mut c, mut d) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        loop {
            let u = rng.gen_range(m..=big_m);
            let v = rng.gen_range(m..=big_m);
            let (bi, ci) = if u <= v { (u, v) } else { (v, u) };
            // a must satisfy a ≤ m, a ≥ 0, d = b + c − a ∈ [M, d_max]
            let lo = 0.0f64.max(bi + ci - d_max);
            let hi = m.min(bi + ci - big_m);
            if lo > hi {
                continue;
            }
            let ai = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            a[i] = ai;
            b[i] = bi;
            c[i] = ci;
            d[i] = (bi + ci - ai).max(big_m);
            break;
        }
    }
    let q = random_orthogonal(n, rng);
    let build = |v: &[f64]| SymMatrix::from_spectrum(&q, v);
    MercerInstance::new(build(&a)?, build(&b)?, build(&c)?, build(&d)?, *iv, map.clone())
}

fn noncommuting_quadruple<R: Rng + ?Sized>(
    n: usize,
    iv: &Interval,
    map: &MapSpec,
    rng: &mut R,
) -> Result<Option<MercerInstance>> {
    let (m, big_m) = (iv.lo(), iv.hi());
    let a = sample_with_spectrum(n, 0.0, m, rng)?;
    let d = sample_with_spectrum(n, big_m, 2.0 * big_m, rng)?;
    let e = sample_with_spectrum(n, 0.0, 0.25 * (big_m - m), rng)?;
    let half = a.try_add(&d)?.scale(0.5);
    let b = half.try_sub(&e)?;
    let c = half.try_add(&e)?;
    let lower = SymMatrix::scalar(n, m);
    let upper = SymMatrix::scalar(n, big_m);
    if !loewner_leq(&lower, &b, HYPOTHESIS_TOL)?.holds || !loewner_leq(&c, &upper, HYPOTHESIS_TOL)?.holds {
        return Ok(None);
    }
    match MercerInstance::new(a, b, c, d, *iv, map.clone()) {
        Ok(inst) => Ok(Some(inst)),
        Err(Error::RejectedInstance(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Draws `0 ≺ B, C ⪯ MI ⪯ B + C` by rejection.
pub fn sample_subadd_instance<R: Rng + ?Sized>(
    n: usize,
    big_m: f64,
    rng: &mut R,
    max_tries: usize,
) -> Result<SubadditivityInstance> {
    if !(big_m > 0.0) {
        return Err(Error::InvalidInput(format!("M must be positive, got {big_m}")));
    }
    for _ in 0..max_tries {
        // strictly positive spectra
        let b = sample_with_spectrum(n, 1e-3 * big_m, big_m, rng)?;
        let c = sample_with_spectrum(n, 1e-3 * big_m, big_m, rng)?;
        if b.try_add(&c)?.min_eigenvalue()? < big_m - 1e-12 {
            continue;
        }
        match SubadditivityInstance::new(b, c, big_m) {
            Ok(inst) => return Ok(inst),
            Err(Error::RejectedInstance(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingFailure {
        what: "sub-additivity pair".into(),
        tries: max_tries,
    })
}

/// Window with `M ≥ 2m`, so [`sample_midpoint_instance`] never rejects on the lower bound.
pub fn sample_midpoint_interval<R: Rng + ?Sized>(rng: &mut R) -> Interval {
    let m = rng.gen_range(0.0..=1.5);
    let big_m = 2.0 * m + rng.gen_range(0.5..=3.0);
    Interval::new(m, big_m).expect("0 ≤ m < M")
}

/// Draws `0 ⪯ A ⪯ mI ⪯ (A+D)/2 ⪯ MI ⪯ D` by rejection.
///
/// `D` has spectrum in `[M, 2M − m]`, which already forces `(A+D)/2 ⪯ MI`.
pub fn sample_midpoint_instance<R: Rng + ?Sized>(
    n: usize,
    iv: &Interval,
    rng: &mut R,
    max_tries: usize,
) -> Result<MidpointInstance> {
    let (m, big_m) = (iv.lo(), iv.hi());
    for _ in 0..max_tries {
        let a = sample_with_spectrum(n, 0.0, m, rng)?;
        let d = sample_with_spectrum(n, big_m, 2.0 * big_m - m, rng)?;
        match MidpointInstance::new(a, d, *iv) {
            Ok(inst) => return Ok(inst),
            Err(Error::RejectedInstance(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingFailure {
        what: "midpoint sandwich pair".into(),
        tries: max_tries,
    })
}
