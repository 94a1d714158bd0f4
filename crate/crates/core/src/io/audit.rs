//! Offline re-check of a diagnostics time series.
//!
//! Quantitative invariants are asserted; quantities whose bounds depend on
//! non-constructive constants or on the resolution are only reported.

use std::fmt;

use crate::diagnostics::DiagnosticsRecord;

pub const MASS_REL_TOL: f64 = 1e-12;
pub const LYAPUNOV_REL_TOL: f64 = 1e-3;
pub const PHASE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Monitored,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Monitored => "MONITORED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<10} {:<24} {}", c.status, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: &'static str, ok: bool, detail: String) -> AuditCheck {
    AuditCheck {
        name,
        status: if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail,
    }
}

fn first_bad<T>(items: &[T], bad: impl Fn(usize, &T) -> bool) -> Option<usize> {
    items.iter().enumerate().position(|(k, r)| bad(k, r))
}

/// The first record is taken as the initial state.
pub fn audit_records(records: &[DiagnosticsRecord]) -> AuditReport {
    let mut checks = Vec::new();
    let Some(first) = records.first() else {
        checks.push(check("records_present", false, "no records".into()));
        return AuditReport { checks };
    };

    let m0 = first.mass_excess;
    let mass_tol = MASS_REL_TOL * m0.abs().max(1.0);
    let mass_dev = records
        .iter()
        .map(|r| (r.mass_excess - m0).abs())
        .fold(0.0, f64::max);
    checks.push(check(
        "mass_conservation",
        mass_dev <= mass_tol,
        format!("max |m(t) - m(0)| = {mass_dev:e} (tol {mass_tol:e})"),
    ));

    let e0 = first.e_lyap;
    let bound = e0 * (1.0 + LYAPUNOV_REL_TOL);
    let worst = records
        .iter()
        .map(|r| r.e_lyap + r.cumulative_diss)
        .fold(f64::NEG_INFINITY, f64::max);
    let bad = first_bad(records, |_, r| r.e_lyap + r.cumulative_diss > bound);
    checks.push(check(
        "lyapunov_inequality",
        bad.is_none(),
        match bad {
            None => format!("max e_lyap + int V = {worst:e} <= E0 (1 + 1e-3) = {bound:e}"),
            Some(k) => format!(
                "record {k} (t = {}): e_lyap + int V = {:e} > {bound:e}",
                records[k].t,
                records[k].e_lyap + records[k].cumulative_diss
            ),
        },
    ));

    let slack = LYAPUNOV_REL_TOL * e0;
    let bad = first_bad(records, |k, r| {
        k > 0 && r.e_lyap > records[k - 1].e_lyap + slack
    });
    checks.push(check(
        "e_lyap_non_increasing",
        bad.is_none(),
        match bad {
            None => format!("e_lyap non-increasing within {slack:e}"),
            Some(k) => format!(
                "e_lyap rose from {:e} to {:e} at t = {}",
                records[k - 1].e_lyap,
                records[k].e_lyap,
                records[k].t
            ),
        },
    ));

    let (lo, hi) = records
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.phi_min), hi.max(r.phi_max))
        });
    checks.push(check(
        "phase_maximum_principle",
        lo >= -1.0 - PHASE_TOL && hi <= 1.0 + PHASE_TOL,
        format!("phi in [{lo}, {hi}]"),
    ));

    let bad = first_bad(records, |_, r| !(r.v_min > 0.0 && r.theta_min > 0.0));
    let vmin = records
        .iter()
        .map(|r| r.v_min)
        .fold(f64::INFINITY, f64::min);
    let tmin = records
        .iter()
        .map(|r| r.theta_min)
        .fold(f64::INFINITY, f64::min);
    checks.push(check(
        "positivity",
        bad.is_none(),
        format!("min v = {vmin}, min theta = {tmin}"),
    ));

    let violations: usize = records.iter().map(|r| r.bracket_violations).sum();
    checks.push(check(
        "average_brackets",
        violations == 0,
        format!("{violations} unit-interval violations"),
    ));

    let bad = first_bad(records, |k, r| {
        r.v_diss < 0.0 || (k > 0 && r.cumulative_diss < records[k - 1].cumulative_diss)
    });
    checks.push(check(
        "dissipation_sign",
        bad.is_none(),
        match bad {
            None => "V >= 0 and its integral non-decreasing".into(),
            Some(k) => format!("record {k} (t = {}) breaks V >= 0", records[k].t),
        },
    ));

    let en0 = first.energy_total;
    let drift = records
        .iter()
        .map(|r| (r.energy_total - en0).abs())
        .fold(0.0, f64::max);
    checks.push(AuditCheck {
        name: "energy_drift",
        status: CheckStatus::Monitored,
        detail: format!(
            "max |E(t) - E(0)| = {drift:e} (relative {:e})",
            if en0 != 0.0 { drift / en0.abs() } else { drift }
        ),
    });
    let res = records
        .iter()
        .map(|r| r.lemma24_residual)
        .fold(0.0, f64::max);
    checks.push(AuditCheck {
        name: "momentum_residual",
        status: CheckStatus::Monitored,
        detail: format!("max L2 residual = {res:e}"),
    });
    if let Some(last) = records.last() {
        for w in &last.weighted_diss {
            checks.push(AuditCheck {
                name: "weighted_dissipation",
                status: CheckStatus::Monitored,
                detail: format!(
                    "alpha = {}, n = {}: time integral {:e}",
                    w.alpha, w.n, w.integral
                ),
            });
        }
    }
    AuditReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, e: f64, cum: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            step: 0,
            mass_excess: 0.5,
            energy_total: 1.0,
            e_lyap: e,
            v_diss: 0.1,
            cumulative_diss: cum,
            phi_min: -1.0,
            phi_max: 1.0,
            v_min: 0.9,
            v_max: 1.1,
            theta_min: 0.9,
            theta_max: 1.1,
            bracket_violations: 0,
            lemma24_residual: 0.0,
            weighted_diss: vec![],
        }
    }

    #[test]
    fn consistent_series_passes() {
        let r = audit_records(&[
            rec(0.0, 1.0, 0.0),
            rec(0.1, 0.99, 0.01),
            rec(0.2, 0.98, 0.02),
        ]);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn rising_lyapunov_energy_fails_by_name() {
        let r = audit_records(&[rec(0.0, 1.0, 0.0), rec(0.1, 1.2, 0.01)]);
        assert!(!r.passed());
        let names: Vec<_> = r.failures().map(|c| c.name).collect();
        assert!(names.contains(&"lyapunov_inequality"));
        assert!(names.contains(&"e_lyap_non_increasing"));
    }

    #[test]
    fn phase_overshoot_and_mass_drift_fail() {
        let mut a = rec(0.1, 0.9, 0.01);
        a.phi_max = 1.0 + 1e-6;
        a.mass_excess = 0.5 + 1e-9;
        let r = audit_records(&[rec(0.0, 1.0, 0.0), a]);
        let names: Vec<_> = r.failures().map(|c| c.name).collect();
        assert!(names.contains(&"phase_maximum_principle"));
        assert!(names.contains(&"mass_conservation"));
    }

    #[test]
    fn empty_series_fails() {
        assert!(!audit_records(&[]).passed());
    }
}
