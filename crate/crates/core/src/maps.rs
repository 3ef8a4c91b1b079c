//! Unital positive linear maps on symmetric matrices.
//!
//! Every [`MapSpec`] variant is linear, positive and unital by construction.
//! [`MapDescriptor`] is the textual form used on the command line; it is
//! instantiated at a concrete matrix order because conjugations need
//! orthogonal matrices of that order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymMatrix};
use crate::sampler::{random_orthogonal, rng_from, sample_with_spectrum};

/// Something that acts linearly on symmetric matrices.
pub trait LinearMap {
    fn apply(&self, x: &SymMatrix) -> Result<SymMatrix>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    Identity,
    /// `X ↦ Uᵀ X U` for orthogonal `U`.
    Conjugation {
        unitary: Matrix,
    },
    /// Keeps the diagonal blocks of a partition into contiguous index blocks.
    ///
    /// The partition has `min(blocks, n)` blocks with sizes differing by at most one.
    Pinching {
        blocks: usize,
    },
    /// `X ↦ (tr X / n)·I`.
    NormalizedTrace,
    /// `X ↦ Σ w_i U_iᵀ X U_i` with convex weights.
    Mixture {
        weights: Vec<f64>,
        unitaries: Vec<Matrix>,
    },
}

impl MapSpec {
    pub fn mixture(weights: Vec<f64>, unitaries: Vec<Matrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != unitaries.len() {
            return Err(Error::InvalidInput("mixture needs one weight per conjugation".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(
                "mixture weights must be non-negative and sum to 1".into(),
            ));
        }
        let n = unitaries[0].order();
        if let Some(u) = unitaries.iter().find(|u| u.order() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.order(),
            });
        }
        Ok(Self::Mixture { weights, unitaries })
    }

    /// Order the map is tied to, if any.
    pub fn order(&self) -> Option<usize> {
        match self {
            Self::Conjugation { unitary } => Some(unitary.order()),
            Self::Mixture { unitaries, .. } => Some(unitaries[0].order()),
            _ => None,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            Self::Identity => "id".into(),
            Self::Conjugation { .. } => "conj".into(),
            Self::Pinching { blocks } => format!("pinch:{blocks}"),
            Self::NormalizedTrace => "trace".into(),
            Self::Mixture { weights, .. } => format!("mix:{}", weights.len()),
        }
    }

    /// The same map expressed in the basis `Y = V X Vᵀ`: the returned map
    /// `Φ'` satisfies `Φ'(V X Vᵀ) = V Φ(X) Vᵀ`. Defined for the maps that
    /// commute with a change of orthonormal basis.
    pub fn conjugated_by(&self, v: &Matrix) -> Result<Self> {
        let vt = v.transpose();
        let tr = |u: &Matrix| -> Result<Matrix> { v.matmul(u)?.matmul(&vt) };
        match self {
            Self::Identity => Ok(Self::Identity),
            Self::NormalizedTrace => Ok(Self::NormalizedTrace),
            Self::Conjugation { unitary } => Ok(Self::Conjugation { unitary: tr(unitary)? }),
            Self::Mixture { weights, unitaries } => Ok(Self::Mixture {
                weights: weights.clone(),
                unitaries: unitaries.iter().map(tr).collect::<Result<_>>()?,
            }),
            Self::Pinching { .. } => Err(Error::NotApplicable(format!(
                "{} depends on the coordinate basis",
                self.label()
            ))),
        }
    }
}

fn check_order(u: &Matrix, x: &SymMatrix) -> Result<()> {
    if u.order() == x.order() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: u.order(),
            found: x.order(),
        })
    }
}

/// Contiguous block boundaries for `k` blocks of an order-`n` matrix.
pub fn pinching_blocks(n: usize, k: usize) -> Vec<std::ops::Range<usize>> {
    let k = k.clamp(1, n.max(1));
    let (base, extra) = (n / k, n % k);
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for b in 0..k {
        let len = base + usize::from(b < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

impl LinearMap for MapSpec {
    fn apply(&self, x: &SymMatrix) -> Result<SymMatrix> {
        apply_map(self, x)
    }
}

/// `Φ(X)`.
pub fn apply_map(map: &MapSpec, x: &SymMatrix) -> Result<SymMatrix> {
    let n = x.order();
    match map {
        MapSpec::Identity => Ok(x.clone()),
        MapSpec::Conjugation { unitary } => {
            check_order(unitary, x)?;
            x.congruence(unitary)
        }
        MapSpec::Pinching { blocks } => {
            if *blocks == 0 {
                return Err(Error::InvalidInput("pinching needs at least one block".into()));
            }
            let parts = pinching_blocks(n, *blocks);
            let block_of = |i: usize| parts.iter().position(|r| r.contains(&i));
            SymMatrix::new(Matrix::from_fn(n, |i, j| {
                if block_of(i) == block_of(j) {
                    x.get(i, j)
                } else {
                    0.0
                }
            }))
        }
        MapSpec::NormalizedTrace => Ok(SymMatrix::scalar(n, x.trace() / n as f64)),
        MapSpec::Mixture { weights, unitaries } => {
            let mut acc = SymMatrix::zeros(n);
            for (w, u) in weights.iter().zip(unitaries) {
                check_order(u, x)?;
                acc = acc.try_add(&x.congruence(u)?.scale(*w))?;
            }
            Ok(acc)
        }
    }
}

/// Textual map family: `id`, `trace`, `pinch:<k>`, `conj:<seed>`, `mix:<k>:<seed>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapDescriptor {
    Identity,
    Trace,
    Pinch(usize),
    Conj(u64),
    Mix(usize, u64),
}

impl MapDescriptor {
    /// Builds the concrete map at order `n`; conjugations are seeded from the descriptor.
    pub fn instantiate(&self, n: usize) -> Result<MapSpec> {
        match *self {
            Self::Identity => Ok(MapSpec::Identity),
            Self::Trace => Ok(MapSpec::NormalizedTrace),
            Self::Pinch(k) => {
                if k == 0 {
                    return Err(Error::InvalidInput("pinch:<k> needs k ≥ 1".into()));
                }
                Ok(MapSpec::Pinching { blocks: k })
            }
            Self::Conj(seed) => {
                let mut rng = rng_from(seed, 0);
                Ok(MapSpec::Conjugation {
                    unitary: random_orthogonal(n, &mut rng),
                })
            }
            Self::Mix(k, seed) => {
                if k == 0 {
                    return Err(Error::InvalidInput("mix:<k>:<seed> needs k ≥ 1".into()));
                }
                let mut rng = rng_from(seed, 0);
                let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = raw.iter().sum();
                let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
                // absorb rounding so the weights sum to one
                let drift = 1.0 - weights.iter().sum::<f64>();
                weights[0] += drift;
                let unitaries = (0..k).map(|_| random_orthogonal(n, &mut rng)).collect();
                MapSpec::mixture(weights, unitaries)
            }
        }
    }

    /// The five families with the given seed for the random ones.
    pub fn family(seed: u64) -> [MapDescriptor; 5] {
        [
            Self::Identity,
            Self::Trace,
            Self::Pinch(2),
            Self::Conj(seed),
            Self::Mix(3, seed),
        ]
    }
}

impl fmt::Display for MapDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "id"),
            Self::Trace => write!(f, "trace"),
            Self::Pinch(k) => write!(f, "pinch:{k}"),
            Self::Conj(s) => write!(f, "conj:{s}"),
            Self::Mix(k, s) => write!(f, "mix:{k}:{s}"),
        }
    }
}

impl FromStr for MapDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |t: &str| -> Result<u64> {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad integer `{t}` in map spec `{s}`")))
        };
        match parts.as_slice() {
            ["id"] => Ok(Self::Identity),
            ["trace"] => Ok(Self::Trace),
            ["pinch", k] => Ok(Self::Pinch(int(k)? as usize)),
            ["conj", seed] => Ok(Self::Conj(int(seed)?)),
            ["mix", k, seed] => Ok(Self::Mix(int(k)? as usize, int(seed)?)),
            _ => Err(Error::Parse(format!(
                "unknown map `{s}`; expected id, trace, pinch:<k>, conj:<seed> or mix:<k>:<seed>"
            ))),
        }
    }
}

/// Outcome of [`validate_map`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapValidation {
    pub trials: usize,
    pub linear: bool,
    pub positive: bool,
    pub unital: bool,
    /// Largest entrywise deviation from linearity.
    pub linearity_error: f64,
    /// Smallest eigenvalue of an image of a positive matrix.
    pub min_image_eigenvalue: f64,
    /// `max |Φ(I) − I|`.
    pub unitality_error: f64,
}

impl MapValidation {
    pub fn passed(&self) -> bool {
        self.linear && self.positive && self.unital
    }
}

/// Randomized check of linearity, positivity and unitality at order `n`.
pub fn validate_map<M: LinearMap>(map: &M, n: usize, trials: usize, seed: u64) -> Result<MapValidation> {
    if trials == 0 {
        return Err(Error::InvalidInput("validation needs at least one trial".into()));
    }
    let mut rng = rng_from(seed, 0);
    let mut linearity_error = 0.0f64;
    let mut min_image_eigenvalue = f64::INFINITY;
    for _ in 0..trials {
        let x = sample_with_spectrum(n, -5.0, 5.0, &mut rng)?;
        let y = sample_with_spectrum(n, -5.0, 5.0, &mut rng)?;
        let a: f64 = rng.gen_range(-3.0..3.0);
        let b: f64 = rng.gen_range(-3.0..3.0);
        let combo = x.scale(a).try_add(&y.scale(b))?;
        let lhs = map.apply(&combo)?;
        let rhs = map.apply(&x)?.scale(a).try_add(&map.apply(&y)?.scale(b))?;
        linearity_error = linearity_error.max(lhs.max_abs_diff(&rhs)?);

        let psd = sample_with_spectrum(n, 0.0, 4.0, &mut rng)?;
        min_image_eigenvalue = min_image_eigenvalue.min(map.apply(&psd)?.min_eigenvalue()?);
    }
    let unitality_error = map
        .apply(&SymMatrix::identity(n))?
        .max_abs_diff(&SymMatrix::identity(n))?;
    Ok(MapValidation {
        trials,
        linear: linearity_error <= 1e-10,
        positive: min_image_eigenvalue >= -1e-10,
        unital: unitality_error <= 1e-12,
        linearity_error,
        min_image_eigenvalue,
        unitality_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_is_unital() {
        for n in 1..5 {
            let out = apply_map(&MapSpec::NormalizedTrace, &SymMatrix::identity(n)).unwrap();
            assert_eq!(out, SymMatrix::identity(n));
        }
    }

    #[test]
    fn pinching_to_diagonal() {
        let x = SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let out = apply_map(&MapSpec::Pinching { blocks: 2 }, &x).unwrap();
        assert_eq!(out, SymMatrix::diag(&[2.0, 2.0]));
    }

    #[test]
    fn pinching_partitions() {
        assert_eq!(pinching_blocks(5, 2), vec![0..3, 3..5]);
        assert_eq!(pinching_blocks(1, 2), vec![0..1]);
        assert_eq!(pinching_blocks(4, 4), vec![0..1, 1..2, 2..3, 3..4]);
    }

    #[test]
    fn rotation_conjugation() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = Matrix::from_rows(&[vec![h, -h], vec![h, h]]).unwrap();
        let out = apply_map(&MapSpec::Conjugation { unitary: u }, &SymMatrix::diag(&[1.0, 3.0])).unwrap();
        let expected = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let map = MapDescriptor::Conj(3).instantiate(3).unwrap();
        assert!(matches!(
            apply_map(&map, &SymMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn descriptor_grammar() {
        for s in ["id", "trace", "pinch:3", "conj:42", "mix:3:7"] {
            let d: MapDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        for bad in ["", "pinch", "pinch:x", "mix:3", "rot:1", "conj:-1"] {
            assert!(bad.parse::<MapDescriptor>().is_err(), "{bad}");
        }
        assert!(MapDescriptor::Pinch(0).instantiate(2).is_err());
        assert!(MapDescriptor::Mix(0, 1).instantiate(2).is_err());
    }

    #[test]
    fn every_family_validates() {
        for n in 1..=4 {
            for d in MapDescriptor::family(11) {
                let map = d.instantiate(n).unwrap();
                let v = validate_map(&map, n, 100, 5).unwrap();
                assert!(v.passed(), "{d} at n={n}: {v:?}");
            }
        }
    }

    struct ScaledTrace(f64);

    impl LinearMap for ScaledTrace {
        fn apply(&self, x: &SymMatrix) -> Result<SymMatrix> {
            Ok(SymMatrix::scalar(x.order(), self.0 * x.trace()))
        }
    }

    #[test]
    fn non_unital_negative_control() {
        let v = validate_map(&ScaledTrace(1.0), 3, 100, 9).unwrap();
        assert!(v.linear && v.positive);
        assert!(!v.unital && (v.unitality_error - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kadison_and_spectral_containment() {
        let mut rng = rng_from(17, 3);
        for n in 1..=4 {
            for d in MapDescriptor::family(23) {
                let map = d.instantiate(n).unwrap();
                for _ in 0..20 {
                    let x = sample_with_spectrum(n, -3.0, 3.0, &mut rng).unwrap();
                    let x2 = SymMatrix::symmetrize(&x.as_matrix().matmul(x.as_matrix()).unwrap());
                    let px = apply_map(&map, &x).unwrap();
                    let px2 = SymMatrix::symmetrize(&px.as_matrix().matmul(px.as_matrix()).unwrap());
                    let gap = apply_map(&map, &x2).unwrap().try_sub(&px2).unwrap();
                    assert!(gap.min_eigenvalue().unwrap() >= -1e-9, "{d}");

                    let s = sample_with_spectrum(n, 1.0, 2.0, &mut rng).unwrap();
                    let dec = apply_map(&map, &s).unwrap().eig().unwrap();
                    assert!(dec.min() >= 1.0 - 1e-9 && dec.max() <= 2.0 + 1e-9, "{d}");
                }
            }
        }
    }

    #[test]
    fn mixture_validation() {
        assert!(MapSpec::mixture(vec![0.5, 0.6], vec![Matrix::identity(2), Matrix::identity(2)]).is_err());
        assert!(MapSpec::mixture(vec![1.0], vec![]).is_err());
        assert!(MapSpec::mixture(vec![0.5, 0.5], vec![Matrix::identity(2), Matrix::identity(3)]).is_err());
    }
}
