//! Registry of the checkable claims and their command-line identifiers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ClaimId {
    JensenSq,
    MercerScalar,
    LemmaNabla,
    HhMercer1,
    HhMercer2,
    HhSq,
    PowerChain,
    SquareIdentity,
    Superadditive,
    FourPoint,
    SqDef,
    MercerOp,
    MercerOpMixed,
    JensenMercerOp,
    MidpointOp,
    SubaddOp,
    SubaddNorm,
}

impl ClaimId {
    pub const ALL: [ClaimId; 17] = [
        ClaimId::JensenSq,
        ClaimId::MercerScalar,
        ClaimId::LemmaNabla,
        ClaimId::HhMercer1,
        ClaimId::HhMercer2,
        ClaimId::HhSq,
        ClaimId::PowerChain,
        ClaimId::SquareIdentity,
        ClaimId::Superadditive,
        ClaimId::FourPoint,
        ClaimId::SqDef,
        ClaimId::MercerOp,
        ClaimId::MercerOpMixed,
        ClaimId::JensenMercerOp,
        ClaimId::MidpointOp,
        ClaimId::SubaddOp,
        ClaimId::SubaddNorm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::JensenSq => "jensen-sq",
            ClaimId::MercerScalar => "mercer-scalar",
            ClaimId::LemmaNabla => "lemma-nabla",
            ClaimId::HhMercer1 => "hh-mercer-1",
            ClaimId::HhMercer2 => "hh-mercer-2",
            ClaimId::HhSq => "hh-sq",
            ClaimId::PowerChain => "power-chain",
            ClaimId::SquareIdentity => "square-identity",
            ClaimId::Superadditive => "superadditive",
            ClaimId::FourPoint => "four-point",
            ClaimId::SqDef => "sq-def",
            ClaimId::MercerOp => "mercer-op",
            ClaimId::MercerOpMixed => "mercer-op-mixed",
            ClaimId::JensenMercerOp => "jensen-mercer-op",
            ClaimId::MidpointOp => "midpoint-op",
            ClaimId::SubaddOp => "subadd-op",
            ClaimId::SubaddNorm => "subadd-norm",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            ClaimId::JensenSq => "Jensen inequality for superquadratic f with the f(|x-y|) correction",
            ClaimId::MercerScalar => "classical Mercer inequality for convex f",
            ClaimId::LemmaNabla => "weighted-mean Mercer bound with 2·β correction",
            ClaimId::HhMercer1 => "Mercer chain of Hermite-Hadamard type (reflected integral mean)",
            ClaimId::HhMercer2 => "Mercer chain of Hermite-Hadamard type (integral of f + 2β)",
            ClaimId::HhSq => "Hermite-Hadamard chain for superquadratic f",
            ClaimId::PowerChain => "closed-form chain for t^p, reversed for p in [1,2]",
            ClaimId::SquareIdentity => "closed-form chain for t^2 collapses to an identity",
            ClaimId::Superadditive => "f(x)+f(y) <= f(x+y) - 2(y f(x) + x f(y))/(x+y)",
            ClaimId::FourPoint => "four-point inequality with x1+x2 = y1+y2",
            ClaimId::SqDef => "grid certification of the superquadratic definition",
            ClaimId::MercerOp => "operator Mercer inequality with operator bounds A, D",
            ClaimId::MercerOpMixed => "mixed variant: Phi outside the calculus for A, B",
            ClaimId::JensenMercerOp => "operator Jensen-Mercer inequality (literal and substituted forms)",
            ClaimId::MidpointOp => "midpoint Jensen inequality under a spectral sandwich",
            ClaimId::SubaddOp => "operator sub-additivity f(B)+f(C)+β(B)+β(C) <= f(B+C)-f(B+C-M)",
            ClaimId::SubaddNorm => "norm sub-additivity ||f(B)+f(C)|| <= ||f(B+C)||",
        }
    }

    /// Claims whose instances are matrices.
    pub fn is_operator(&self) -> bool {
        matches!(
            self,
            ClaimId::MercerOp
                | ClaimId::MercerOpMixed
                | ClaimId::JensenMercerOp
                | ClaimId::MidpointOp
                | ClaimId::SubaddOp
                | ClaimId::SubaddNorm
        )
    }

    /// Claims that take a positive linear map.
    pub fn uses_map(&self) -> bool {
        matches!(
            self,
            ClaimId::MercerOp | ClaimId::MercerOpMixed | ClaimId::JensenMercerOp
        )
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ClaimId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownClaim(s.to_string()))
    }
}

impl From<ClaimId> for String {
    fn from(c: ClaimId) -> String {
        c.as_str().to_string()
    }
}

impl TryFrom<String> for ClaimId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers_round_trip() {
        for c in ClaimId::ALL {
            assert_eq!(c.as_str().parse::<ClaimId>().unwrap(), c);
        }
        assert!(matches!("nope".parse::<ClaimId>(), Err(Error::UnknownClaim(_))));
    }
}
