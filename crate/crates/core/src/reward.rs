//! Emotion reward: maps a review's emotion polarity to the multiplicative
//! weight applied to its similarity score.

use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the polarity-to-reward curve.
///
/// `Sigmoid` rewards positive polarity, `ISigmoid` rewards negative polarity,
/// `MSigmoid` rewards neutral reviews and `IMSigmoid` rewards strongly
/// polarized ones in either direction. `None` turns the reward off so the
/// ranking is pure similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardVariant {
    Sigmoid,
    ISigmoid,
    MSigmoid,
    IMSigmoid,
    None,
}

impl RewardVariant {
    pub const ALL: [RewardVariant; 5] = [
        RewardVariant::Sigmoid,
        RewardVariant::ISigmoid,
        RewardVariant::MSigmoid,
        RewardVariant::IMSigmoid,
        RewardVariant::None,
    ];

    /// The four curve-shaped variants.
    pub const SIGMOIDS: [RewardVariant; 4] = [
        RewardVariant::Sigmoid,
        RewardVariant::ISigmoid,
        RewardVariant::MSigmoid,
        RewardVariant::IMSigmoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RewardVariant::Sigmoid => "sigmoid",
            RewardVariant::ISigmoid => "isigmoid",
            RewardVariant::MSigmoid => "msigmoid",
            RewardVariant::IMSigmoid => "imsigmoid",
            RewardVariant::None => "none",
        }
    }

    /// Display form used in report tables, e.g. `iSigmoid`.
    pub fn label(self) -> &'static str {
        match self {
            RewardVariant::Sigmoid => "Sigmoid",
            RewardVariant::ISigmoid => "iSigmoid",
            RewardVariant::MSigmoid => "mSigmoid",
            RewardVariant::IMSigmoid => "imSigmoid",
            RewardVariant::None => "",
        }
    }
}

impl fmt::Display for RewardVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RewardVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        RewardVariant::ALL
            .into_iter()
            .find(|v| v.name() == lower)
            .ok_or_else(|| Error::UnknownVariant(s.to_string()))
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// Emotion reward `e_c` for polarity `e_n`.
///
/// The piecewise variants take the `e_n >= 0` branch at zero; both branches
/// give 0.5 there.
pub fn reward(e_n: f64, variant: RewardVariant) -> Result<f64> {
    if !(-1.0..=1.0).contains(&e_n) {
        return Err(Error::PolarityOutOfRange(e_n));
    }
    Ok(match variant {
        RewardVariant::Sigmoid => logistic(e_n),
        RewardVariant::ISigmoid => logistic(-e_n),
        RewardVariant::MSigmoid => {
            if e_n >= 0.0 {
                logistic(-e_n)
            } else {
                logistic(e_n)
            }
        }
        RewardVariant::IMSigmoid => {
            if e_n >= 0.0 {
                logistic(e_n)
            } else {
                logistic(-e_n)
            }
        }
        RewardVariant::None => 1.0,
    })
}
