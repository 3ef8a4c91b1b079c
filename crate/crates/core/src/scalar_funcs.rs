//! Function catalog, the β correction term and a grid certifier for
//! superquadraticity.
//!
//! Every catalog member is a power `t^p` or a negated power `-t^q` on
//! `[0, ∞)`; both vanish at the origin.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FnKind {
    /// `t ↦ t^p`
    Power,
    /// `t ↦ -t^q`
    NegPower,
}

/// A member of the function catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    kind: FnKind,
    exponent: f64,
}

impl FunctionSpec {
    pub fn new(kind: FnKind, exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidInput(format!(
                "exponent must be a positive finite number, got {exponent}"
            )));
        }
        Ok(Self { kind, exponent })
    }

    /// `t^p`. Panics on a non-positive exponent.
    pub fn power(p: f64) -> Self {
        Self::new(FnKind::Power, p).expect("power exponent must be positive")
    }

    /// `-t^q`. Panics on a non-positive exponent.
    pub fn neg_power(q: f64) -> Self {
        Self::new(FnKind::NegPower, q).expect("power exponent must be positive")
    }

    pub fn kind(&self) -> FnKind {
        self.kind
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// The catalog's superquadraticity claim: `t^p` for `p ≥ 2`, `-t^q` for `1 ≤ q ≤ 2`.
    pub fn claimed_superquadratic(&self) -> bool {
        match self.kind {
            FnKind::Power => self.exponent >= 2.0,
            FnKind::NegPower => (1.0..=2.0).contains(&self.exponent),
        }
    }

    /// Convex on `[0, ∞)`: powers with exponent at least one.
    pub fn is_convex(&self) -> bool {
        self.kind == FnKind::Power && self.exponent >= 1.0
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("{self} is defined on [0, ∞), got t = {t}")));
        }
        Ok(self.value(t))
    }

    /// Evaluation without the domain check. Callers guarantee `t ≥ 0`.
    pub(crate) fn value(&self, t: f64) -> f64 {
        let v = pow(t, self.exponent);
        match self.kind {
            FnKind::Power => v,
            FnKind::NegPower => -v,
        }
    }
}

/// `t^p` with exact integer powers where possible so that small integer
/// inputs reproduce integer outputs.
fn pow(t: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p <= 64.0 {
        t.powi(p as i32)
    } else {
        t.powf(p)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FnKind::Power => write!(f, "pow:{}", self.exponent),
            FnKind::NegPower => write!(f, "negpow:{}", self.exponent),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    /// Parses `pow:<p>` or `negpow:<q>`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected `pow:<p>` or `negpow:<q>`, got `{s}`")))?;
        let exponent: f64 = tail
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent `{tail}` in `{s}`")))?;
        let kind = match head.trim() {
            "pow" => FnKind::Power,
            "negpow" => FnKind::NegPower,
            other => return Err(Error::Parse(format!("unknown function family `{other}`"))),
        };
        Self::new(kind, exponent).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A spectral window `[m, M]` with `0 ≤ m < M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::InvalidInput(format!(
                "interval requires 0 ≤ m < M, got m = {lo}, M = {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Lower end `m`.
    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Upper end `M`.
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub(crate) fn check(&self, t: f64, what: &str) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} = {t} lies outside [{}, {}]",
                self.lo, self.hi
            )))
        }
    }
}

/// β(t) = (t−m)/(M−m)·f(M−t) + (M−t)/(M−m)·f(t−m) for `t ∈ [m, M]`.
pub fn beta_eval(f: &FunctionSpec, iv: &Interval, t: f64) -> Result<f64> {
    iv.check(t, "β argument")?;
    Ok(beta_unchecked(f, iv, t))
}

pub(crate) fn beta_unchecked(f: &FunctionSpec, iv: &Interval, t: f64) -> f64 {
    let (m, big_m) = (iv.lo, iv.hi);
    let w = big_m - m;
    // both arguments are non-negative for t in [m, M]
    (t - m) / w * f.value((big_m - t).max(0.0)) + (big_m - t) / w * f.value((t - m).max(0.0))
}

/// Closed form of β for `f = t^p`:
/// `(M−x)(x−m)/(M−m) · ((M−x)^{p−1} + (x−m)^{p−1})`.
pub fn beta_p_closed(p: f64, iv: &Interval, x: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("closed β form needs p ≥ 1, got {p}")));
    }
    iv.check(x, "β argument")?;
    let (m, big_m) = (iv.lo, iv.hi);
    let (left, right) = (x - m, big_m - x);
    Ok(right * left / (big_m - m) * (pow(right, p - 1.0) + pow(left, p - 1.0)))
}

/// Default certification window `[0, T]`.
pub const DEFAULT_CERT_RANGE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CertVerdict {
    Holds,
    /// At `x`, the point `y_below < x` forces `C_x` above the bound forced by `y_above > x`.
    Fails {
        x: f64,
        y_below: f64,
        y_above: f64,
    },
}

/// Admissible range for the constant `C_x` at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeWindow {
    pub x: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SlopeWindow {
    /// Reported constant: window midpoint, or the finite end when the other is unbounded.
    pub fn representative(&self) -> f64 {
        match (self.lower.is_finite(), self.upper.is_finite()) {
            (true, true) => 0.5 * (self.lower + self.upper),
            (true, false) => self.lower,
            (false, true) => self.upper,
            (false, false) => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperquadraticityCertificate {
    pub function: FunctionSpec,
    pub range: f64,
    pub tolerance: f64,
    pub windows: Vec<SlopeWindow>,
    pub verdict: CertVerdict,
}

impl SuperquadraticityCertificate {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, CertVerdict::Holds)
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.windows.iter().map(|w| w.x)
    }
}

/// Checks the defining inequality `f(y) ≥ f(x) + C_x(y−x) + f(|y−x|)` on a
/// uniform grid of `grid_size` points over `[0, range]`.
///
/// For each grid point `x`, points `y > x` bound `C_x` from above and points
/// `y < x` bound it from below; the certificate holds iff every window is
/// nonempty within `1e-9·(1+|f(range)|)`.
pub fn certify_superquadratic(f: &FunctionSpec, range: f64, grid_size: usize) -> Result<SuperquadraticityCertificate> {
    if grid_size < 3 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 3 points, got {grid_size}"
        )));
    }
    if !(range.is_finite() && range > 0.0) {
        return Err(Error::InvalidInput(format!(
            "certification range must be positive, got {range}"
        )));
    }
    let step = range / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| if i + 1 == grid_size { range } else { i as f64 * step })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| f.value(t)).collect();
    let tolerance = 1e-9 * (1.0 + f.value(range).abs());

    let mut windows = Vec::with_capacity(grid_size);
    let mut verdict = CertVerdict::Holds;
    for (i, &x) in grid.iter().enumerate() {
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        let mut arg_lower = x;
        let mut arg_upper = x;
        for (j, &y) in grid.iter().enumerate() {
            if i == j {
                continue;
            }
            let q = (values[j] - values[i] - f.value((y - x).abs())) / (y - x);
            if j > i {
                if q < upper {
                    upper = q;
                    arg_upper = y;
                }
            } else if q > lower {
                lower = q;
                arg_lower = y;
            }
        }
        if lower > upper + tolerance && matches!(verdict, CertVerdict::Holds) {
            verdict = CertVerdict::Fails {
                x,
                y_below: arg_lower,
                y_above: arg_upper,
            };
        }
        windows.push(SlopeWindow { x, lower, upper });
    }

    Ok(SuperquadraticityCertificate {
        function: *f,
        range,
        tolerance,
        windows,
        verdict,
    })
}
