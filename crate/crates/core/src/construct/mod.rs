//! Certificate-emitting tower constructions and their independent
//! re-verification.
//!
//! Every constructor picks degrees deterministically, scans for the least
//! qualifying prime in each step's window, records the arithmetic checks of
//! the step and attaches a finite-prefix bounds report.

mod conditions;
mod verify;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{claimed_window, lemma91_delta_bound, northcott_report_thm13, BoundsReport, LimitSide};
use crate::error::{Error, Result};
use crate::exactcore::{
    dedekind_index_coprime, eisenstein_applicable, format_rational, next_prime, parse_integer, parse_rational,
    rational_to_f64, scan_window, Bound, Integer, PolyZ, Rational,
};
use crate::heights::{weighted_height, OrderingMode, RadicalStep, RadicalTower, StepChecks, MAX_STEP_DEGREE};
use crate::numerics::bracket::RealExpr;
use crate::numerics::{Precision, RealInterval};

pub use conditions::{check_cor62_conditions, ConditionReport, ConditionRow, RATIO_TOLERANCE};
pub use verify::{verify_certificate, verify_json, VerificationReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const SEARCH_POLICY: &str = "least qualifying prime by ascending linear scan";
/// Windows whose lower end exceeds 2^MAX_WINDOW_BITS are refused.
pub const MAX_WINDOW_BITS: f64 = 2048.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// House limit t approached from below.
    #[serde(rename = "a")]
    HouseBelow,
    /// House limit t approached from above.
    #[serde(rename = "b")]
    HouseAbove,
    /// Targets t(1 + 2^(−j)) interleaved, all accumulating at t.
    #[serde(rename = "c")]
    HouseInterleaved,
    /// Weil height Northcott number in [t, 2t].
    Weil,
    /// γ-Northcott but not (γ − ε)-Bogomolov.
    Weighted,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(Variant::HouseBelow),
            "b" => Ok(Variant::HouseAbove),
            "c" => Ok(Variant::HouseInterleaved),
            "weil" => Ok(Variant::Weil),
            "weighted" => Ok(Variant::Weighted),
            _ => Err(Error::InvalidInput(format!("unknown variant {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::HouseBelow => "a",
            Variant::HouseAbove => "b",
            Variant::HouseInterleaved => "c",
            Variant::Weil => "weil",
            Variant::Weighted => "weighted",
        }
    }

    fn is_house(&self) -> bool {
        matches!(self, Variant::HouseBelow | Variant::HouseAbove | Variant::HouseInterleaved)
    }

    /// Flags that may be false when listed in `waived`.
    fn waivable(&self) -> &'static [&'static str] {
        match self {
            Variant::Weil => &["interval_member"],
            Variant::Weighted => &["prime_fresh"],
            _ => &[],
        }
    }

    fn mandatory(&self) -> &'static [&'static str] {
        match self {
            Variant::Weil | Variant::Weighted => &["interval_member", "prime_fresh", "eisenstein"],
            _ => &["interval_member", "congruence", "monogenic", "prime_fresh", "eisenstein"],
        }
    }
}

/// Nonnegative real t, either rational or c·ln(q).
#[derive(Clone, Debug, PartialEq)]
pub enum HeightTarget {
    Rational(Rational),
    LogMultiple { coeff: Rational, base: Integer },
}

impl HeightTarget {
    /// Accepts `3/2`, `ln(5)`, `ln(5)/2`, `1/2*ln(5)` (`log` is a synonym).
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = s.find("ln(").or_else(|| s.find("log(")) else {
            return Ok(HeightTarget::Rational(parse_rational(&s)?));
        };
        let bad = || Error::InvalidInput(format!("cannot parse {src:?} as a rational or c*ln(q)"));
        let coeff = match &s[..pos] {
            "" => Rational::one(),
            pre => parse_rational(pre.strip_suffix('*').ok_or_else(bad)?)?,
        };
        let rest = &s[pos..];
        let open = rest.find('(').ok_or_else(bad)?;
        let close = rest.find(')').ok_or_else(bad)?;
        let base = parse_integer(&rest[open + 1..close])?;
        let coeff = match &rest[close + 1..] {
            "" => coeff,
            tail => {
                let k = parse_integer(tail.strip_prefix('/').ok_or_else(bad)?)?;
                if k.is_zero() {
                    return Err(bad());
                }
                coeff / Rational::from_integer(k)
            }
        };
        if !base.is_positive() {
            return Err(Error::InvalidInput(format!("logarithm of non-positive {base}")));
        }
        Ok(HeightTarget::LogMultiple { coeff, base })
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            HeightTarget::Rational(q) => !q.is_negative(),
            HeightTarget::LogMultiple { coeff, .. } => !coeff.is_negative(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            HeightTarget::Rational(q) => rational_to_f64(q),
            HeightTarget::LogMultiple { coeff, base } => rational_to_f64(coeff) * base.to_f64().unwrap_or(f64::MAX).ln(),
        }
    }

    pub fn to_interval(&self) -> RealInterval {
        match self {
            HeightTarget::Rational(q) => RealInterval::from_rational(q),
            HeightTarget::LogMultiple { coeff, base } => RealInterval::from_rational(coeff)
                .mul(&RealInterval::from_rational(&Rational::from_integer(base.clone())).ln()),
        }
    }

    /// e^(2t·d).
    fn exp_2td(&self, d: &Integer) -> Result<RealExpr> {
        let two_d = Rational::from_integer(d * 2u32);
        match self {
            HeightTarget::Rational(q) => Ok(RealExpr::Const(q * two_d).exp()),
            HeightTarget::LogMultiple { coeff, base } => {
                RealExpr::pow(Rational::from_integer(base.clone()), coeff * two_d)
            }
        }
    }
}

impl fmt::Display for HeightTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightTarget::Rational(q) => write!(f, "{}", format_rational(q)),
            HeightTarget::LogMultiple { coeff, base } if coeff.is_one() => write!(f, "ln({base})"),
            HeightTarget::LogMultiple { coeff, base } => write!(f, "{}*ln({base})", format_rational(coeff)),
        }
    }
}

/// Construction parameters as decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub steps: usize,
    pub d_seed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub p: String,
    pub d: String,
    #[serde(default)]
    pub interval: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<StepChecks>,
}

/// Tower as recorded; parsed and validated only during verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerRecord {
    #[serde(default)]
    pub ordering_mode: OrderingMode,
    pub steps: Vec<StepRecord>,
}

impl TowerRecord {
    fn from_tower(t: &RadicalTower) -> Self {
        TowerRecord {
            ordering_mode: t.ordering_mode(),
            steps: t
                .steps()
                .iter()
                .map(|s| StepRecord {
                    p: s.p.to_string(),
                    d: s.d.to_string(),
                    interval: s.interval.as_ref().map(|(a, b)| [format_rational(a), format_rational(b)]),
                    checks: None,
                })
                .collect(),
        }
    }

    pub fn to_tower(&self) -> Result<RadicalTower> {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let interval = match &s.interval {
                    Some([a, b]) => Some((parse_rational(a)?, parse_rational(b)?)),
                    None => None,
                };
                Ok(RadicalStep { p: parse_integer(&s.p)?, d: parse_integer(&s.d)?, interval, checks: s.checks.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        RadicalTower::new(steps, self.ordering_mode)
    }
}

/// The search window of one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub lower: RealInterval,
    pub upper: RealInterval,
    pub closed: bool,
    /// Target T_j served by this step (variant c).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_index: Option<usize>,
    /// house(ξ) ∈ (T_j, 2^(1/d)·T_j) (variant c).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub house_in_target_window: Option<bool>,
    #[serde(default)]
    pub widened: bool,
}

/// Weil-height data for the Weil and weighted constructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct HeightsReport {
    /// h(ξ_i) = log p_i / d_i.
    pub weil: Vec<RealInterval>,
    /// [t, 2t], the window for the Northcott number of the Weil height.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub northcott_window: Option<RealInterval>,
    /// h_{γ−ε}(ξ_i) = d_i^(γ−ε−1)·log p_i.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weighted: Vec<RealInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_decreasing: Option<bool>,
    /// Lower bounds for h_γ on K_i \ K_{i−1}.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_bounds: Vec<RealInterval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_vacuous: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Toolchain {
    pub version: String,
    pub ordering_mode: OrderingMode,
    pub search_policy: String,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub variant: Variant,
    pub params: Params,
    pub tower: TowerRecord,
    pub per_step: Vec<StepChecks>,
    pub windows: Vec<WindowRecord>,
    pub report: BoundsReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<HeightsReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub toolchain: Toolchain,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::MalformedCertificate(e.to_string()))
    }

    /// (p_i, d_i) pairs as recorded.
    pub fn pairs(&self) -> Result<Vec<(Integer, Integer)>> {
        self.tower.steps.iter().map(|s| Ok((parse_integer(&s.p)?, parse_integer(&s.d)?))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ConstructOptions {
    pub ordering: OrderingMode,
    pub tol: f64,
    pub precision: Precision,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { ordering: OrderingMode::Weak, tol: 1e-9, precision: Precision::default() }
    }
}

/// Variant-specific parameters after parsing.
#[derive(Clone, Debug)]
pub(crate) enum Setup {
    House { variant: Variant, t: Rational },
    Weil { t: HeightTarget },
    Weighted { gamma: Rational, epsilon: Rational },
}

impl Setup {
    fn variant(&self) -> Variant {
        match self {
            Setup::House { variant, .. } => *variant,
            Setup::Weil { .. } => Variant::Weil,
            Setup::Weighted { .. } => Variant::Weighted,
        }
    }

    fn params(&self, k: usize, d_seed: &Integer) -> Params {
        let mut p = Params { t: None, gamma: None, epsilon: None, steps: k, d_seed: d_seed.to_string() };
        match self {
            Setup::House { t, .. } => p.t = Some(format_rational(t)),
            Setup::Weil { t } => p.t = Some(t.to_string()),
            Setup::Weighted { gamma, epsilon } => {
                p.gamma = Some(format_rational(gamma));
                p.epsilon = Some(format_rational(epsilon));
            }
        }
        p
    }

    pub(crate) fn from_params(variant: Variant, p: &Params) -> Result<Self> {
        let need = |v: &Option<String>, name: &str| {
            v.clone().ok_or_else(|| Error::MalformedCertificate(format!("params.{name} missing")))
        };
        let setup = match variant {
            Variant::Weil => Setup::Weil { t: HeightTarget::parse(&need(&p.t, "t")?)? },
            Variant::Weighted => Setup::Weighted {
                gamma: parse_rational(&need(&p.gamma, "gamma")?)?,
                epsilon: parse_rational(&need(&p.epsilon, "epsilon")?)?,
            },
            v => Setup::House { variant: v, t: parse_rational(&need(&p.t, "t")?)? },
        };
        setup.validate(p.steps, &parse_integer(&p.d_seed)?)?;
        Ok(setup)
    }

    fn validate(&self, k: usize, d_seed: &Integer) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if k == 0 {
            return bad("need at least one step".into());
        }
        if !crate::exactcore::is_prime(d_seed) {
            return bad(format!("d_seed = {d_seed} is not prime"));
        }
        match self {
            Setup::House { t, .. } => {
                if t <= &Rational::one() {
                    return bad(format!("t = {} must exceed 1", format_rational(t)));
                }
                if d_seed < &BigInt::from(3) {
                    return bad("d_seed must be an odd prime".into());
                }
            }
            Setup::Weil { t } => {
                if !t.is_nonnegative() {
                    return bad(format!("t = {t} must be nonnegative"));
                }
            }
            Setup::Weighted { gamma, epsilon } => {
                if gamma.is_negative() || gamma > &Rational::one() {
                    return bad(format!("γ = {} must lie in [0, 1]", format_rational(gamma)));
                }
                if !epsilon.is_positive() {
                    return bad(format!("ε = {} must be positive", format_rational(epsilon)));
                }
            }
        }
        Ok(())
    }

    /// Next degree after (p, d) under the ordering mode.
    fn next_degree(&self, mode: OrderingMode, d: &Integer, p: Option<&Integer>) -> Integer {
        let mut floor = match self {
            Setup::Weighted { .. } => d * 2u32 - 1u32,
            _ => d.clone(),
        };
        if let (OrderingMode::Strict, Some(p)) = (mode, p) {
            floor = floor.max(p.clone());
        }
        next_prime(&floor)
    }

    /// Approximate log2 of the lower window end.
    fn window_bits(&self, d: &Integer) -> f64 {
        let df = d.to_f64().unwrap_or(f64::MAX);
        match self {
            Setup::House { t, .. } => df * rational_to_f64(t).log2() + 2.0,
            Setup::Weil { t } => 2.0 * t.to_f64() * df / std::f64::consts::LN_2,
            Setup::Weighted { gamma, epsilon } => {
                let e = 1.0 - rational_to_f64(gamma) + rational_to_f64(epsilon) / 2.0;
                df.powf(e) / std::f64::consts::LN_2
            }
        }
    }

    /// Window, progression and target of step `i` (1-based) with degree d.
    fn window(&self, i: usize, d: &Integer) -> Result<StepWindow> {
        if self.window_bits(d) > MAX_WINDOW_BITS {
            return Err(Error::InvalidParams(format!(
                "step {i}: window near 2^{:.0} is beyond the supported size",
                self.window_bits(d)
            )));
        }
        let du = d.to_u32().ok_or_else(|| Error::InvalidParams(format!("degree {d} too large")))?;
        let two = Rational::from_integer(2.into());
        let rational_window = |lo: Rational, hi: Rational, target: Option<(usize, Rational)>| StepWindow {
            lower: Bound::open(RealExpr::Const(lo.clone())),
            upper: Bound::open(RealExpr::Const(hi.clone())),
            a: d - 1u32,
            m: d * d,
            interval: Some((lo, hi)),
            target,
        };
        Ok(match self {
            Setup::House { variant: Variant::HouseBelow, t } => {
                let td = crate::exactcore::rational_pow(t, du);
                rational_window(&td / &two, td, None)
            }
            Setup::House { variant: Variant::HouseInterleaved, t } => {
                let j = diagonal_index(i);
                let tj = t * (Rational::one() + Rational::new(1.into(), BigInt::one() << j));
                let td = crate::exactcore::rational_pow(&tj, du);
                rational_window(td.clone(), &td * &two, Some((j, tj)))
            }
            Setup::House { t, .. } => {
                let td = crate::exactcore::rational_pow(t, du);
                rational_window(td.clone(), &td * &two, None)
            }
            Setup::Weil { t } => {
                let lo = t.exp_2td(d)?;
                StepWindow {
                    lower: Bound::open(lo.clone()),
                    upper: Bound::open(RealExpr::integer(2).mul(lo)),
                    a: BigInt::zero(),
                    m: BigInt::one(),
                    interval: None,
                    target: None,
                }
            }
            Setup::Weighted { gamma, epsilon } => {
                let e = Rational::one() - gamma + epsilon / &two;
                let lo = RealExpr::pow(Rational::from_integer(d.clone()), e)?.exp();
                StepWindow {
                    lower: Bound::closed(lo.clone()),
                    upper: Bound::closed(RealExpr::integer(2).mul(lo)),
                    a: BigInt::zero(),
                    m: BigInt::one(),
                    interval: None,
                    target: None,
                }
            }
        })
    }
}

/// j-th entry of the round-robin 1; 1, 2; 1, 2, 3; … for step i ≥ 1.
pub fn diagonal_index(i: usize) -> usize {
    let mut block = 1;
    let mut rest = i;
    while rest > block {
        rest -= block;
        block += 1;
    }
    rest
}

pub(crate) struct StepWindow {
    lower: Bound,
    upper: Bound,
    a: Integer,
    m: Integer,
    interval: Option<(Rational, Rational)>,
    target: Option<(usize, Rational)>,
}

impl StepWindow {
    fn contains(&self, p: &Integer, prec: &Precision) -> Result<bool> {
        let lo = self.lower.value.compare_integer(p, prec)?;
        let hi = self.upper.value.compare_integer(p, prec)?;
        let above = lo == Ordering::Less || (!self.lower.strict && lo == Ordering::Equal);
        let below = hi == Ordering::Greater || (!self.upper.strict && hi == Ordering::Equal);
        Ok(above && below)
    }

    fn record(&self, prec: &Precision) -> Result<WindowRecord> {
        Ok(WindowRecord {
            lower: self.lower.value.to_interval(prec)?,
            upper: self.upper.value.to_interval(prec)?,
            closed: !self.lower.strict,
            target: self.target.as_ref().map(|(_, t)| format_rational(t)),
            target_index: self.target.as_ref().map(|(j, _)| *j),
            house_in_target_window: None,
            widened: false,
        })
    }
}

/// p ∉ {p_j : j < i} ∪ {d_j : all j}.
pub(crate) fn is_fresh(p: &Integer, i: usize, ps: &[Integer], ds: &[Integer]) -> bool {
    !ps[..i].contains(p) && !ds.contains(p)
}

/// Recomputes every flag except window membership and freshness.
pub(crate) fn arithmetic_checks(p: &Integer, d: &Integer) -> Result<StepChecks> {
    let d2 = d * d;
    let congruence = p.mod_floor(&d2) == d - 1u32;
    let du = d.to_u32().ok_or_else(|| Error::InvalidInput(format!("degree {d} too large")))?;
    let f = PolyZ::pure_radical(du as usize, p);
    let monogenic = dedekind_index_coprime(&f, p)? && dedekind_index_coprime(&f, d)?;
    Ok(StepChecks {
        interval_member: false,
        congruence,
        monogenic,
        prime_fresh: false,
        eisenstein: eisenstein_applicable(d, p),
        violation_notes: Vec::new(),
        waived: Vec::new(),
    })
}

pub(crate) fn flag(c: &StepChecks, name: &str) -> bool {
    match name {
        "interval_member" => c.interval_member,
        "congruence" => c.congruence,
        "monogenic" => c.monogenic,
        "prime_fresh" => c.prime_fresh,
        "eisenstein" => c.eisenstein,
        _ => false,
    }
}

pub(crate) const FLAGS: [&str; 5] = ["interval_member", "congruence", "monogenic", "prime_fresh", "eisenstein"];

const WIDEN_NOTE: &str = "window holds no fresh increasing prime; took the first one above the lower end";
const STALE_NOTE: &str = "window holds no fresh prime; took the least prime in the window";

/// Drives the per-step scans shared by all constructions.
fn build(setup: &Setup, k: usize, d_seed: &Integer, opts: &ConstructOptions) -> Result<Certificate> {
    setup.validate(k, d_seed)?;
    let variant = setup.variant();
    let mode = opts.ordering;
    let prec = &opts.precision;
    // Weak mode fixes every degree up front so freshness can see all of them.
    let mut ds = vec![d_seed.clone()];
    if mode == OrderingMode::Weak {
        while ds.len() < k {
            let next = setup.next_degree(mode, ds.last().unwrap(), None);
            ds.push(next);
        }
    }
    let mut ps: Vec<Integer> = Vec::new();
    let mut per_step = Vec::new();
    let mut windows = Vec::new();
    for i in 1..=k {
        if ds.len() < i {
            let next = setup.next_degree(mode, &ds[i - 2], ps.last());
            ds.push(next);
        }
        let d = ds[i - 1].clone();
        if d > BigInt::from(MAX_STEP_DEGREE) {
            return Err(Error::InvalidParams(format!(
                "step {i}: ordering forces d = {d}, beyond the degree limit {MAX_STEP_DEGREE}"
            )));
        }
        let w = setup.window(i, &d)?;
        let prev = ps.last().cloned();
        let fresh = |c: &Integer| is_fresh(c, i - 1, &ps, &ds);
        let increasing = |c: &Integer| prev.as_ref().is_none_or(|q| c > q);
        let mut record = w.record(prec)?;
        let mut notes = Vec::new();
        let mut waived = Vec::new();
        let p = match variant {
            Variant::Weil => {
                let accept = |c: &Integer| fresh(c) && increasing(c);
                match scan_window(&w.lower, Some(&w.upper), &w.a, &w.m, &accept, prec)? {
                    Some(p) => p,
                    None => {
                        record.widened = true;
                        notes.push(WIDEN_NOTE.to_string());
                        waived.push("interval_member".to_string());
                        scan_window(&w.lower, None, &w.a, &w.m, &accept, prec)?.expect("unbounded scan")
                    }
                }
            }
            Variant::Weighted => match scan_window(&w.lower, Some(&w.upper), &w.a, &w.m, &fresh, prec)? {
                Some(p) => p,
                None => {
                    let p = scan_window(&w.lower, Some(&w.upper), &w.a, &w.m, &|_| true, prec)?
                        .ok_or_else(|| exhausted(i, &record))?;
                    notes.push(STALE_NOTE.to_string());
                    waived.push("prime_fresh".to_string());
                    p
                }
            },
            _ => scan_window(&w.lower, Some(&w.upper), &w.a, &w.m, &fresh, prec)?
                .ok_or_else(|| exhausted(i, &record))?,
        };
        let mut checks = arithmetic_checks(&p, &d)?;
        checks.interval_member = w.contains(&p, prec)?;
        checks.prime_fresh = fresh(&p);
        checks.violation_notes = notes;
        checks.waived = waived;
        if let Some((_, tj)) = &w.target {
            let h = RadicalStep::new(p.clone(), d.clone()).generator_modulus();
            let (lo, hi) = claimed_window(tj, d.to_u32().unwrap(), LimitSide::Above);
            record.house_in_target_window = Some(h.lo > lo.hi && h.hi < hi.lo);
        }
        let mut step = RadicalStep::new(p.clone(), d);
        step.interval = w.interval;
        ps.push(p);
        per_step.push((step, checks));
        windows.push(record);
    }
    let (steps, per_step): (Vec<_>, Vec<_>) = per_step.into_iter().unzip();
    let tower = RadicalTower::new(steps, mode)?;
    let violations = tower.ordering_violations();
    if mode == OrderingMode::Strict && !violations.is_empty() {
        return Err(Error::InvalidParams(format!("strict ordering fails: {}", violations.join("; "))));
    }
    let report = report_for(setup, &tower, opts.tol)?;
    let heights = heights_for(setup, &tower)?;
    let mut notes = variant_notes(setup);
    notes.extend(violations.into_iter().map(|v| format!("ordering: {v}")));
    Ok(Certificate {
        schema: SCHEMA_VERSION,
        variant,
        params: setup.params(k, d_seed),
        tower: TowerRecord::from_tower(&tower),
        per_step,
        windows,
        report,
        heights,
        notes,
        toolchain: Toolchain {
            version: env!("CARGO_PKG_VERSION").to_string(),
            ordering_mode: mode,
            search_policy: SEARCH_POLICY.to_string(),
            tolerance: opts.tol,
        },
    })
}

fn exhausted(step: usize, w: &WindowRecord) -> Error {
    Error::SearchExhausted {
        step,
        reason: format!("no qualifying prime in ({}, {})", w.lower.lo, w.upper.hi),
    }
}

pub(crate) fn report_for(setup: &Setup, tower: &RadicalTower, tol: f64) -> Result<BoundsReport> {
    let claimed = match setup {
        Setup::House { variant: Variant::HouseBelow, t } => Some((t, LimitSide::Below)),
        Setup::House { variant: Variant::HouseAbove, t } => Some((t, LimitSide::Above)),
        _ => None,
    };
    northcott_report_thm13(tower, tol, claimed)
}

pub(crate) fn heights_for(setup: &Setup, tower: &RadicalTower) -> Result<Option<HeightsReport>> {
    let weil: Vec<RealInterval> = tower
        .steps()
        .iter()
        .map(|s| {
            let p = RealInterval::from_rational(&Rational::from_integer(s.p.clone()));
            p.ln().div(&RealInterval::point(s.d_u32() as f64))
        })
        .collect();
    match setup {
        Setup::House { .. } => Ok(None),
        Setup::Weil { t } => {
            let ti = t.to_interval();
            Ok(Some(HeightsReport {
                weil,
                northcott_window: Some(RealInterval::new(ti.lo, ti.scale(2.0).hi)),
                ..Default::default()
            }))
        }
        Setup::Weighted { gamma, epsilon } => {
            let g = rational_to_f64(gamma);
            let e = rational_to_f64(epsilon);
            let mut weighted = Vec::new();
            let mut delta_bounds = Vec::new();
            for (s, h) in tower.steps().iter().zip(&weil) {
                weighted.push(weighted_height(g - e, &s.d, h)?);
                delta_bounds.push(lemma91_delta_bound(g, &s.p, &s.d)?);
            }
            let decreasing = weighted.windows(2).all(|w| w[1].hi < w[0].lo);
            Ok(Some(HeightsReport {
                weil,
                northcott_window: None,
                delta_vacuous: delta_bounds.iter().map(crate::bounds::is_vacuous).collect(),
                weighted,
                weighted_decreasing: Some(decreasing),
                delta_bounds,
            }))
        }
    }
}

fn variant_notes(setup: &Setup) -> Vec<String> {
    match setup.variant() {
        Variant::HouseAbove => vec![
            "the existential constant M is not computed; the construction needs M < t + 1/2".into(),
            "and M/t below the least house exceeding 1 among elements of bounded house".into(),
        ],
        Variant::HouseInterleaved => {
            vec!["targets are served on a finite schedule; their being limit points is asymptotic and not asserted".into()]
        }
        Variant::Weil => vec!["base field fixed to Q".into()],
        Variant::Weighted => {
            vec!["freshness is required only from some index on; early collisions are waived and noted".into()]
        }
        Variant::HouseBelow => Vec::new(),
    }
}

/// House limit t from below (a), from above (b), or as the accumulation point
/// of the targets t(1 + 2^(−j)) (c).
pub fn construct_thm12(
    variant: Variant,
    t: &Rational,
    k: usize,
    d_seed: &Integer,
    opts: &ConstructOptions,
) -> Result<Certificate> {
    if !variant.is_house() {
        return Err(Error::InvalidParams(format!("{} is not a house construction", variant.as_str())));
    }
    build(&Setup::House { variant, t: t.clone() }, k, d_seed, opts)
}

/// Weil-height tower with p_i^(1/d_i) → e^(2t).
pub fn construct_thm14(t: &HeightTarget, k: usize, d_seed: &Integer, opts: &ConstructOptions) -> Result<Certificate> {
    build(&Setup::Weil { t: t.clone() }, k, d_seed, opts)
}

/// Tower that is γ-Northcott while h_{γ−ε}(ξ_i) → 0.
pub fn construct_thm16(
    gamma: &Rational,
    epsilon: &Rational,
    k: usize,
    d_seed: &Integer,
    opts: &ConstructOptions,
) -> Result<Certificate> {
    build(&Setup::Weighted { gamma: gamma.clone(), epsilon: epsilon.clone() }, k, d_seed, opts)
}

/// Steps of a construction, recomputed for verification.
pub(crate) struct Replay {
    pub ds: Vec<Integer>,
    pub windows: Vec<StepWindow>,
}

pub(crate) fn replay(setup: &Setup, mode: OrderingMode, ps: &[Integer], d_seed: &Integer) -> Result<Replay> {
    let mut ds = vec![d_seed.clone()];
    while ds.len() < ps.len() {
        let i = ds.len();
        let p = (mode == OrderingMode::Strict).then(|| &ps[i - 1]);
        let next = setup.next_degree(mode, &ds[i - 1], p);
        ds.push(next);
    }
    let windows = ds.iter().enumerate().map(|(i, d)| setup.window(i + 1, d)).collect::<Result<Vec<_>>>()?;
    Ok(Replay { ds, windows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn n(v: i64) -> Integer {
        v.into()
    }

    fn opts() -> ConstructOptions {
        ConstructOptions::default()
    }

    #[test]
    fn diagonal_schedule() {
        let v: Vec<usize> = (1..=10).map(diagonal_index).collect();
        assert_eq!(v, [1, 1, 2, 1, 2, 3, 1, 2, 3, 4]);
    }

    #[test]
    fn height_target_grammar() {
        let five = n(5);
        let half_ln5 = HeightTarget::LogMultiple { coeff: q("1/2"), base: five.clone() };
        assert_eq!(HeightTarget::parse("ln(5)/2").unwrap(), half_ln5);
        assert_eq!(HeightTarget::parse("1/2*ln(5)").unwrap(), half_ln5);
        assert_eq!(HeightTarget::parse("1/2 * log(5)").unwrap(), half_ln5);
        assert_eq!(HeightTarget::parse("3/2").unwrap(), HeightTarget::Rational(q("3/2")));
        assert_eq!(half_ln5.to_string(), "1/2*ln(5)");
        assert!(HeightTarget::parse("ln(0)").is_err());
        assert!(HeightTarget::parse("ln(5)/0").is_err());
    }

    #[test]
    fn house_above_desk_instance() {
        let c = construct_thm12(Variant::HouseAbove, &q("2"), 3, &n(7), &opts()).unwrap();
        assert_eq!(c.pairs().unwrap(), vec![(n(251), n(7)), (n(2309), n(11)), (n(8293), n(13))]);
        for s in &c.per_step {
            assert!(s.interval_member && s.congruence && s.monogenic && s.prime_fresh && s.eisenstein);
        }
        assert!(c.report.window_checks.iter().all(|&b| b));
        let h: Vec<f64> = c.report.house_values.iter().map(|v| v.mid()).collect();
        for (got, want) in h.iter().zip([2.20197, 2.02193, 2.00189]) {
            assert!((got - want).abs() < 1e-4, "{got}");
        }
    }

    #[test]
    fn house_above_small_target() {
        let c = construct_thm12(Variant::HouseAbove, &q("3/2"), 1, &n(11), &opts()).unwrap();
        assert_eq!(c.pairs().unwrap(), vec![(n(131), n(11))]);
    }

    #[test]
    fn house_below_small_degree_exhausts() {
        let e = construct_thm12(Variant::HouseBelow, &q("2"), 1, &n(7), &opts()).unwrap_err();
        assert!(matches!(e, Error::SearchExhausted { step: 1, .. }), "{e}");
    }

    #[test]
    fn house_below_larger_degree() {
        let c = construct_thm12(Variant::HouseBelow, &q("2"), 2, &n(11), &opts()).unwrap();
        for (s, (p, d)) in c.per_step.iter().zip(c.pairs().unwrap()) {
            assert!(s.interval_member && s.congruence, "{p} {d}");
        }
        assert!(c.report.window_checks.iter().all(|&b| b));
    }

    #[test]
    fn interleaved_records_targets() {
        let c = construct_thm12(Variant::HouseInterleaved, &q("2"), 3, &n(7), &opts()).unwrap();
        let idx: Vec<usize> = c.windows.iter().map(|w| w.target_index.unwrap()).collect();
        assert_eq!(idx, [1, 1, 2]);
        assert_eq!(c.windows[0].target.as_deref(), Some("3"));
        assert_eq!(c.windows[2].target.as_deref(), Some("5/2"));
        assert!(c.windows.iter().all(|w| w.house_in_target_window == Some(true)));
    }

    #[test]
    fn house_rejects_bad_params() {
        for (t, d) in [("1", 7), ("2", 2), ("2", 9)] {
            let e = construct_thm12(Variant::HouseAbove, &q(t), 1, &n(d), &opts()).unwrap_err();
            assert!(matches!(e, Error::InvalidParams(_)), "{e}");
        }
        assert!(construct_thm12(Variant::Weil, &q("2"), 1, &n(7), &opts()).is_err());
    }

    #[test]
    fn strict_mode_guard() {
        let strict = ConstructOptions { ordering: OrderingMode::Strict, ..opts() };
        let c = construct_thm12(Variant::HouseAbove, &q("2"), 2, &n(7), &strict).unwrap();
        assert_eq!(c.pairs().unwrap()[1].1, n(257));
        let e = construct_thm12(Variant::HouseAbove, &q("2"), 3, &n(7), &strict).unwrap_err();
        assert!(matches!(e, Error::InvalidParams(_)), "{e}");
    }

    #[test]
    fn weil_log_target() {
        let t = HeightTarget::parse("ln(5)/2").unwrap();
        let c = construct_thm14(&t, 1, &n(3), &opts()).unwrap();
        assert_eq!(c.pairs().unwrap(), vec![(n(127), n(3))]);
        assert!(c.per_step[0].interval_member);
    }

    #[test]
    fn weil_zero_widens() {
        let c = construct_thm14(&HeightTarget::Rational(q("0")), 3, &n(3), &opts()).unwrap();
        let ps: Vec<Integer> = c.pairs().unwrap().into_iter().map(|(p, _)| p).collect();
        // d = 3, 5, 7 are excluded; primes must increase.
        assert_eq!(ps, vec![n(2), n(11), n(13)]);
        assert!(c.windows.iter().all(|w| w.widened));
        assert!(c.per_step.iter().all(|s| !s.interval_member && s.waived == ["interval_member"]));
    }

    #[test]
    fn weil_unit_target() {
        let c = construct_thm14(&HeightTarget::Rational(q("1")), 1, &n(5), &opts()).unwrap();
        let (p, _) = c.pairs().unwrap()[0].clone();
        assert!(p > n(22026) && p < n(44053));
        let h = &c.heights.as_ref().unwrap().weil[0];
        assert!(h.lo > 2.0 && h.hi < 2.0 + 2f64.ln() / 5.0);
    }

    #[test]
    fn weighted_instances() {
        let c = construct_thm16(&q("0"), &q("1/2"), 4, &n(3), &opts()).unwrap();
        let pairs = c.pairs().unwrap();
        assert_eq!(pairs[0], (n(53), n(3)));
        let ds: Vec<Integer> = pairs.iter().map(|x| x.1.clone()).collect();
        assert_eq!(ds, vec![n(3), n(7), n(17), n(37)]);
        assert!(c.per_step.iter().all(|s| s.interval_member));
        assert_eq!(c.heights.as_ref().unwrap().weighted_decreasing, Some(true));

        let c = construct_thm16(&q("1"), &q("1/2"), 2, &n(2), &opts()).unwrap();
        assert_eq!(c.pairs().unwrap(), vec![(n(5), n(2)), (n(7), n(5))]);
        assert!(!c.per_step[0].prime_fresh);
        assert_eq!(c.per_step[0].waived, ["prime_fresh"]);
        assert!(c.per_step[1].prime_fresh);
    }
}
