use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{
    arithmetic_checks, flag, heights_for, is_fresh, replay, report_for, Certificate, Setup, Variant, FLAGS,
    SCHEMA_VERSION,
};
use crate::bounds::{claimed_window, LimitSide};
use crate::error::{Error, Result};
use crate::exactcore::{fermat_quotient_divides, format_rational, is_prime, parse_integer, scan_window, Integer};
use crate::heights::{OrderingMode, RadicalStep};
use crate::numerics::{Precision, RealInterval};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub steps_checked: usize,
    pub mismatches: Vec<String>,
}

/// Parses and verifies a certificate; unparseable input is `MalformedCertificate`.
pub fn verify_json(src: &str) -> Result<VerificationReport> {
    verify_certificate(&Certificate::from_json(src)?)
}

fn same(a: &RealInterval, b: &RealInterval, tol: f64) -> bool {
    a.overlaps(b) && (a.mid() - b.mid()).abs() <= tol.max(1e-12) * a.mid().abs().max(1.0)
}

fn fail(mut mismatches: Vec<String>, steps_checked: usize, m: String) -> VerificationReport {
    mismatches.push(m);
    VerificationReport { passed: false, steps_checked, mismatches }
}

/// Re-derives every recorded flag, window and report entry from (p, d) and
/// the parameters. A certificate passes iff no mismatch is found.
pub fn verify_certificate(cert: &Certificate) -> Result<VerificationReport> {
    let mut out = Vec::new();
    if cert.schema != SCHEMA_VERSION {
        out.push(format!("schema {} is not {SCHEMA_VERSION}", cert.schema));
    }
    let setup = match Setup::from_params(cert.variant, &cert.params) {
        Ok(s) => s,
        Err(e) => return Ok(fail(out, 0, format!("params: {e}"))),
    };
    let k = cert.params.steps;
    let mode = cert.tower.ordering_mode;
    if cert.toolchain.ordering_mode != mode {
        out.push("toolchain ordering mode differs from the tower's".into());
    }
    for (name, len) in [("tower", cert.tower.steps.len()), ("per_step", cert.per_step.len()), ("windows", cert.windows.len())]
    {
        if len != k {
            out.push(format!("{name} has {len} entries, params.steps = {k}"));
        }
    }
    let parsed: Vec<(Integer, Integer)> = cert
        .tower
        .steps
        .iter()
        .map(|s| Ok((parse_integer(&s.p)?, parse_integer(&s.d)?)))
        .collect::<Result<_>>()
        .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    for (i, (p, d)) in parsed.iter().enumerate() {
        if !is_prime(p) {
            out.push(format!("step {}: p = {p} is not prime", i + 1));
        }
        if !is_prime(d) {
            out.push(format!("step {}: d = {d} is not prime", i + 1));
        }
    }
    if !out.is_empty() || parsed.len() != k {
        return Ok(VerificationReport { passed: false, steps_checked: 0, mismatches: out });
    }
    let ps: Vec<Integer> = parsed.iter().map(|x| x.0.clone()).collect();
    let d_seed = parse_integer(&cert.params.d_seed).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    let prec = Precision::default();
    let rp = match replay(&setup, mode, &ps, &d_seed) {
        Ok(r) => r,
        Err(e) => return Ok(fail(out, 0, format!("schedule: {e}"))),
    };
    let variant = cert.variant;
    for i in 0..k {
        let step = i + 1;
        let (p, d) = &parsed[i];
        if d != &rp.ds[i] {
            out.push(format!("step {step}: d = {d}, schedule gives {}", rp.ds[i]));
            continue;
        }
        let w = &rp.windows[i];
        let recorded = &cert.per_step[i];
        let interval_rec = cert.tower.steps[i].interval.clone();
        let interval_exp = w.interval.as_ref().map(|(a, b)| [format_rational(a), format_rational(b)]);
        if interval_rec != interval_exp {
            out.push(format!("step {step}: interval {interval_rec:?} differs from recomputed {interval_exp:?}"));
        }
        let wr = w.record(&prec)?;
        let cw = &cert.windows[i];
        if !same(&wr.lower, &cw.lower, 1e-9) || !same(&wr.upper, &cw.upper, 1e-9) || wr.closed != cw.closed {
            out.push(format!("step {step}: window endpoints differ from recomputed"));
        }
        if wr.target != cw.target || wr.target_index != cw.target_index {
            out.push(format!("step {step}: target differs from the schedule"));
        }
        if let Some((_, tj)) = &w.target {
            let h = RadicalStep::new(p.clone(), d.clone()).generator_modulus();
            let (lo, hi) = claimed_window(tj, d.to_u32().unwrap_or(0), LimitSide::Above);
            let ok = h.lo > lo.hi && h.hi < hi.lo;
            if cw.house_in_target_window != Some(ok) {
                out.push(format!("step {step}: house target-window flag should be {ok}"));
            }
        }
        let mut fresh = arithmetic_checks(p, d)?;
        fresh.interval_member = w.contains(p, &prec)?;
        fresh.prime_fresh = is_fresh(p, i, &ps, &rp.ds);
        for name in FLAGS {
            if flag(recorded, name) != flag(&fresh, name) {
                out.push(format!("step {step}: {name} recorded {} but recomputes to {}", flag(recorded, name), flag(&fresh, name)));
            }
        }
        for name in variant.mandatory() {
            if !flag(&fresh, name) && !recorded.waived.iter().any(|x| x == name) {
                out.push(format!("step {step}: mandatory check {name} fails"));
            }
        }
        for name in &recorded.waived {
            if !variant.waivable().contains(&name.as_str()) {
                out.push(format!("step {step}: {name} may not be waived for {}", variant.as_str()));
            } else if flag(&fresh, name) {
                out.push(format!("step {step}: {name} is waived but holds"));
            }
        }
        if !recorded.waived.is_empty() && recorded.violation_notes.is_empty() {
            out.push(format!("step {step}: waiver without a note"));
        }
        // A waiver is justified only when no qualifying prime was available.
        let prev = i.checked_sub(1).map(|j| &ps[j]);
        if recorded.waived.iter().any(|x| x == "interval_member") {
            let accept = |c: &Integer| is_fresh(c, i, &ps, &rp.ds) && prev.is_none_or(|q| c > q);
            if scan_window(&w.lower, Some(&w.upper), &w.a, &w.m, &accept, &prec)?.is_some() {
                out.push(format!("step {step}: window widened although it holds a qualifying prime"));
            }
            if !cw.widened {
                out.push(format!("step {step}: widening not flagged"));
            }
        }
        if recorded.waived.iter().any(|x| x == "prime_fresh") {
            let accept = |c: &Integer| is_fresh(c, i, &ps, &rp.ds);
            if scan_window(&w.lower, Some(&w.upper), &w.a, &w.m, &accept, &prec)?.is_some() {
                out.push(format!("step {step}: freshness waived although a fresh prime exists"));
            }
        }
        if variant == Variant::Weil && prev.is_some_and(|q| p <= q) {
            out.push(format!("step {step}: p = {p} does not increase"));
        }
        // Congruence forces d² ∤ p^(d−1) − 1, which gives the Dedekind condition at d.
        if fresh.congruence && p != d && p.bit(0) && d.bit(0) {
            if fermat_quotient_divides(p, d)? {
                out.push(format!("step {step}: congruence holds but d² | p^d − p"));
            }
            if !fresh.monogenic {
                out.push(format!("step {step}: congruence holds but Dedekind fails"));
            }
        }
    }
    let tower = match cert.tower.to_tower() {
        Ok(t) => t,
        Err(e) => {
            out.push(format!("tower: {e}"));
            return Ok(VerificationReport { passed: false, steps_checked: k, mismatches: out });
        }
    };
    if mode == OrderingMode::Strict {
        for v in tower.ordering_violations() {
            out.push(format!("strict ordering: {v}"));
        }
    }
    let tol = cert.toolchain.tolerance;
    let report = report_for(&setup, &tower, tol)?;
    let r = &cert.report;
    let close = |a: &[RealInterval], b: &[RealInterval]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| same(x, y, tol));
    if !close(&report.house_values, &r.house_values) {
        out.push("report: house enclosures differ from recomputed".into());
    }
    if !close(&report.eta_values, &r.eta_values) {
        out.push("report: η enclosures differ from recomputed".into());
    }
    if report.window_checks != r.window_checks {
        out.push(format!("report: window checks {:?} recompute to {:?}", r.window_checks, report.window_checks));
    }
    if report.claimed_limit != r.claimed_limit || report.claimed_side != r.claimed_side {
        out.push("report: claimed limit differs".into());
    }
    if report.eta_vacuous != r.eta_vacuous || report.label != r.label {
        out.push("report: vacuity flags or label differ".into());
    }
    if variant.is_house() && report.window_checks.iter().any(|&ok| !ok) {
        out.push("report: a house lies outside its claimed window".into());
    }
    match (heights_for(&setup, &tower)?, &cert.heights) {
        (None, None) => {}
        (Some(h), Some(c)) => {
            if !close(&h.weil, &c.weil) || !close(&h.weighted, &c.weighted) || !close(&h.delta_bounds, &c.delta_bounds) {
                out.push("heights: enclosures differ from recomputed".into());
            }
            if h.weighted_decreasing != c.weighted_decreasing || h.delta_vacuous != c.delta_vacuous {
                out.push("heights: flags differ from recomputed".into());
            }
            if h.northcott_window.is_some() != c.northcott_window.is_some() {
                out.push("heights: northcott window presence differs".into());
            }
        }
        _ => out.push("heights: section presence differs from the variant".into()),
    }
    Ok(VerificationReport { passed: out.is_empty(), steps_checked: k, mismatches: out })
}

#[cfg(test)]
mod tests {
    use super::super::{construct_thm12, ConstructOptions};
    use super::*;
    use crate::exactcore::parse_rational;

    fn cert() -> Certificate {
        construct_thm12(Variant::HouseAbove, &parse_rational("2").unwrap(), 3, &7.into(), &ConstructOptions::default())
            .unwrap()
    }

    #[test]
    fn round_trip_passes() {
        let c = cert();
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let r = verify_certificate(&back).unwrap();
        assert!(r.passed, "{:?}", r.mismatches);
    }

    #[test]
    fn edited_prime_fails_congruence() {
        let mut c = cert();
        c.tower.steps[1].p = "2311".into();
        let r = verify_certificate(&c).unwrap();
        assert!(!r.passed);
        assert!(r.mismatches.iter().any(|m| m.contains("step 2: congruence")), "{:?}", r.mismatches);
    }

    #[test]
    fn edited_interval_and_flags_fail() {
        let mut c = cert();
        c.tower.steps[0].interval = Some(["100".into(), "200".into()]);
        assert!(!verify_certificate(&c).unwrap().passed);
        let mut c = cert();
        c.per_step[2].monogenic = false;
        assert!(!verify_certificate(&c).unwrap().passed);
        let mut c = cert();
        c.tower.steps[0].p = "250".into();
        assert!(!verify_certificate(&c).unwrap().passed);
    }

    #[test]
    fn garbage_is_malformed() {
        assert!(matches!(verify_json("{"), Err(Error::MalformedCertificate(_))));
        assert!(matches!(verify_json("{\"schema\": 1}"), Err(Error::MalformedCertificate(_))));
    }
}
