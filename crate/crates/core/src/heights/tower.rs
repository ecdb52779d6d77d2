use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{format_rational, is_prime, parse_integer, parse_rational, Integer, Rational};
use crate::numerics::RealInterval;

/// How consecutive steps of a tower must relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OrderingMode {
    /// min{p_{i+1}, d_{i+1}} > max{p_i, d_i}.
    Strict,
    /// All primes p_i, d_i pairwise distinct.
    #[default]
    Weak,
}

impl OrderingMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(OrderingMode::Strict),
            "weak" => Ok(OrderingMode::Weak),
            _ => Err(Error::InvalidInput(format!("unknown ordering mode {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OrderingMode::Strict => "strict",
            OrderingMode::Weak => "weak",
        }
    }
}

/// Per-step arithmetic checks recorded in certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct StepChecks {
    pub interval_member: bool,
    /// p ≡ d − 1 (mod d²).
    pub congruence: bool,
    /// Dedekind's criterion holds at q = p and q = d, so Z[p^(1/d)] is integrally closed.
    pub monogenic: bool,
    /// p differs from every earlier p_j, d_j and every d_j of the tower.
    pub prime_fresh: bool,
    pub eisenstein: bool,
    #[serde(default)]
    pub violation_notes: Vec<String>,
    /// Names of flags allowed to be false, each justified in `violation_notes`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waived: Vec<String>,
}

/// One adjunction ξ = p^(1/d).
#[derive(Clone, Debug, PartialEq)]
pub struct RadicalStep {
    pub p: Integer,
    pub d: Integer,
    /// Open window (lo, hi) p was drawn from, when it has rational endpoints.
    pub interval: Option<(Rational, Rational)>,
    pub checks: Option<StepChecks>,
}

impl RadicalStep {
    pub fn new(p: Integer, d: Integer) -> Self {
        RadicalStep { p, d, interval: None, checks: None }
    }

    pub fn d_u32(&self) -> u32 {
        self.d.to_u32().expect("validated degree")
    }

    /// Enclosure of p^(m/d).
    pub fn power_modulus(&self, m: u32) -> RealInterval {
        let p = RealInterval::from_rational(&Rational::from_integer(self.p.clone()));
        let e = RealInterval::point(m as f64).div(&RealInterval::point(self.d_u32() as f64));
        p.pow(&e)
    }

    /// Enclosure of house(ξ) = p^(1/d).
    pub fn generator_modulus(&self) -> RealInterval {
        self.power_modulus(1)
    }
}

/// Degrees above this are rejected (embedding counts are products of degrees).
pub const MAX_STEP_DEGREE: u32 = 10_000;

/// Ordered radical tower with validated steps.
#[derive(Clone, Debug, PartialEq)]
pub struct RadicalTower {
    steps: Vec<RadicalStep>,
    ordering_mode: OrderingMode,
}

impl RadicalTower {
    /// Builds a tower, enforcing that every p and d is prime and the degrees
    /// are pairwise distinct (which makes the total degree ∏ d_i). The
    /// ordering condition of `mode` is checked separately.
    pub fn new(steps: Vec<RadicalStep>, ordering_mode: OrderingMode) -> Result<Self> {
        let mut seen_d = BTreeSet::new();
        for (i, s) in steps.iter().enumerate() {
            if !is_prime(&s.p) {
                return Err(Error::InvalidStep(format!("step {}: p = {} is not prime", i + 1, s.p)));
            }
            if !is_prime(&s.d) {
                return Err(Error::InvalidStep(format!("step {}: d = {} is not prime", i + 1, s.d)));
            }
            if s.d.to_u32().is_none_or(|d| d > MAX_STEP_DEGREE) {
                return Err(Error::InvalidStep(format!("step {}: degree {} too large", i + 1, s.d)));
            }
            if !seen_d.insert(s.d.clone()) {
                return Err(Error::InvalidStep(format!("step {}: degree {} repeats", i + 1, s.d)));
            }
        }
        Ok(RadicalTower { steps, ordering_mode })
    }

    /// Like `new`, and additionally rejects ordering violations.
    pub fn new_checked(steps: Vec<RadicalStep>, mode: OrderingMode) -> Result<Self> {
        let t = Self::new(steps, mode)?;
        let v = t.ordering_violations();
        if let Some(first) = v.first() {
            return Err(Error::InvalidStep(first.clone()));
        }
        Ok(t)
    }

    pub fn from_pairs(pairs: &[(u64, u64)], mode: OrderingMode) -> Result<Self> {
        Self::new(pairs.iter().map(|&(p, d)| RadicalStep::new(p.into(), d.into())).collect(), mode)
    }

    /// Parses "p:d,p:d,…".
    pub fn parse_inline(src: &str, mode: OrderingMode) -> Result<Self> {
        let mut steps = Vec::new();
        for part in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (p, d) = part
                .split_once(':')
                .ok_or_else(|| Error::InvalidInput(format!("expected p:d, got {part:?}")))?;
            steps.push(RadicalStep::new(parse_integer(p)?, parse_integer(d)?));
        }
        Self::new(steps, mode)
    }

    pub fn steps(&self) -> &[RadicalStep] {
        &self.steps
    }

    pub fn step(&self, i: usize) -> Result<&RadicalStep> {
        if i == 0 || i > self.steps.len() {
            return Err(Error::InvalidStep(format!("step index {i} outside 1..={}", self.steps.len())));
        }
        Ok(&self.steps[i - 1])
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn ordering_mode(&self) -> OrderingMode {
        self.ordering_mode
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.d_u32()).collect()
    }

    /// [K : Q] = ∏ d_i.
    pub fn degree(&self) -> Integer {
        self.steps.iter().fold(BigInt::one(), |acc, s| acc * &s.d)
    }

    /// The first `k` steps.
    pub fn prefix(&self, k: usize) -> RadicalTower {
        RadicalTower { steps: self.steps[..k.min(self.steps.len())].to_vec(), ordering_mode: self.ordering_mode }
    }

    /// Human-readable descriptions of every ordering violation under the tower's mode.
    pub fn ordering_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self.ordering_mode {
            OrderingMode::Strict => {
                for (i, w) in self.steps.windows(2).enumerate() {
                    let lo = (&w[1].p).min(&w[1].d);
                    let hi = (&w[0].p).max(&w[0].d);
                    if lo <= hi {
                        out.push(format!(
                            "steps {} and {}: min(p, d) = {lo} does not exceed max(p, d) = {hi}",
                            i + 1,
                            i + 2
                        ));
                    }
                }
            }
            OrderingMode::Weak => {
                let mut seen: Vec<(&Integer, String)> = Vec::new();
                for (i, s) in self.steps.iter().enumerate() {
                    for (v, name) in [(&s.d, "d"), (&s.p, "p")] {
                        let label = format!("{name}{}", i + 1);
                        if let Some((_, prev)) = seen.iter().find(|(x, _)| *x == v) {
                            out.push(format!("{label} = {v} coincides with {prev}"));
                        }
                        seen.push((v, label));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for RadicalTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.steps.iter().map(|s| format!("({}, {})", s.p, s.d)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct StepWire {
    p: String,
    d: String,
    #[serde(default)]
    interval: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    checks: Option<StepChecks>,
}

#[derive(Serialize, Deserialize)]
struct TowerWire {
    #[serde(default)]
    ordering_mode: OrderingMode,
    steps: Vec<StepWire>,
}

impl Serialize for RadicalTower {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TowerWire {
            ordering_mode: self.ordering_mode,
            steps: self
                .steps
                .iter()
                .map(|st| StepWire {
                    p: st.p.to_string(),
                    d: st.d.to_string(),
                    interval: st.interval.as_ref().map(|(a, b)| [format_rational(a), format_rational(b)]),
                    checks: st.checks.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadicalTower {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = TowerWire::deserialize(d)?;
        let steps = w
            .steps
            .into_iter()
            .map(|s| -> Result<RadicalStep> {
                let interval = match s.interval {
                    Some([a, b]) => Some((parse_rational(&a)?, parse_rational(&b)?)),
                    None => None,
                };
                Ok(RadicalStep { p: parse_integer(&s.p)?, d: parse_integer(&s.d)?, interval, checks: s.checks })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        RadicalTower::new(steps, w.ordering_mode).map_err(D::Error::custom)
    }
}
