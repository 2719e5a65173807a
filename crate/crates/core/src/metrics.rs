//! Suite quality metrics as exact rationals: TPR, TNR, VPR and hack success
//! rate with mean provider turns.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::genforge::{CascadeResult, Stage};
use crate::judge::{run_validator, JudgeError};
use crate::model::{GroundTruth, TestCase, Verdict};
use crate::sandbox::{CompiledArtifact, Sandbox};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("EMPTY_SUITE")]
    EmptySuite,
    #[error(transparent)]
    Judge(#[from] JudgeError),
}

/// Non-negative fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = num.gcd(&den);
        Ratio { num: num / g, den: den / g }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Decimal rendering rounded half up to `places` digits.
    pub fn to_decimal(self, places: u32) -> String {
        let scale = 10u128.pow(places);
        let scaled = (u128::from(self.num) * scale * 2 + u128::from(self.den)) / (u128::from(self.den) * 2);
        let (int, frac) = (scaled / scale, scaled % scale);
        if places == 0 {
            int.to_string()
        } else {
            format!("{int}.{frac:0width$}", width = places as usize)
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A rate, or `Undefined` when its population is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rate {
    Defined(Ratio),
    Undefined,
}

impl Rate {
    pub fn of(num: u64, den: u64) -> Self {
        if den == 0 {
            Rate::Undefined
        } else {
            Rate::Defined(Ratio::new(num, den))
        }
    }

    pub fn ratio(&self) -> Option<Ratio> {
        match self {
            Rate::Defined(r) => Some(*r),
            Rate::Undefined => None,
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Defined(r) => write!(f, "{}", r.to_decimal(2)),
            Rate::Undefined => f.write_str("UNDEFINED"),
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rate::Undefined => s.serialize_str("UNDEFINED"),
            Rate::Defined(r) => {
                #[derive(Serialize)]
                struct Exact {
                    num: u64,
                    den: u64,
                    decimal: String,
                }
                Exact { num: r.num, den: r.den, decimal: r.to_decimal(2) }.serialize(s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOutcome {
    pub submission_id: String,
    pub ground_truth: GroundTruth,
    pub new_verdict: Verdict,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub positives: u64,
    pub negatives: u64,
    pub tests: u64,
    pub targets: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub tpr: Rate,
    pub tnr: Rate,
    pub vpr: Rate,
    pub hsr: Rate,
    pub avg_turns: Rate,
    pub counts: Counts,
}

/// TPR over correct submissions and TNR over incorrect ones.
pub fn compute_classification(outcomes: &[LabeledOutcome]) -> (Rate, Rate, Counts) {
    let (mut pos, mut tp, mut neg, mut tn) = (0, 0, 0, 0);
    for o in outcomes {
        match o.ground_truth {
            GroundTruth::Correct => {
                pos += 1;
                tp += u64::from(o.new_verdict.is_accepted());
            }
            GroundTruth::Incorrect => {
                neg += 1;
                tn += u64::from(!o.new_verdict.is_accepted());
            }
        }
    }
    (Rate::of(tp, pos), Rate::of(tn, neg), Counts { positives: pos, negatives: neg, ..Counts::default() })
}

/// Share of tests the validator accepts.
pub fn compute_vpr(sb: &Sandbox, suite: &[TestCase], validator: &CompiledArtifact) -> Result<Ratio, MetricsError> {
    if suite.is_empty() {
        return Err(MetricsError::EmptySuite);
    }
    let mut valid = 0;
    for t in suite {
        valid += u64::from(run_validator(sb, validator, &t.input)?.is_valid());
    }
    Ok(Ratio::new(valid, suite.len() as u64))
}

/// Success rate over targets, and mean turns over provider-stage wins.
pub fn compute_hsr(results: &[CascadeResult]) -> (Rate, Rate) {
    let wins = results.iter().filter(|r| r.winning_stage != Stage::None).count() as u64;
    let provider: Vec<u64> =
        results.iter().filter(|r| r.winning_stage == Stage::Provider).map(|r| u64::from(r.turns_used)).collect();
    (Rate::of(wins, results.len() as u64), Rate::of(provider.iter().sum(), provider.len() as u64))
}
