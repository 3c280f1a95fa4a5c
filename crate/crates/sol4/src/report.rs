//! Machine-readable verification reports: flat lists of check records with
//! measured values, bounds, pass flags, and a human-readable anchor
//! describing the claim being checked.

use serde::Serialize;

/// Rounds to nine significant decimal digits, so serialized reports are
/// reproducible across platforms without bit-identical floats.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    let scale = 10f64.powi(8 - magnitude as i32);
    (x * scale).round() / scale
}

/// One verification record: the measured value against its bound (for
/// residual checks) or its expected value (for equality checks).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub anchor: String,
}

impl Check {
    /// A residual check: passes when the measured value stays at or below
    /// the bound.
    pub fn residual(id: impl Into<String>, value: f64, bound: f64, anchor: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            value: round_sig9(value),
            bound: round_sig9(bound),
            pass: value.is_finite() && value <= bound,
            anchor: anchor.into(),
        }
    }

    /// An equality check: passes when the measured value sits within
    /// `tolerance` of the expected value (recorded as the bound).
    pub fn equality(
        id: impl Into<String>,
        value: f64,
        expected: f64,
        tolerance: f64,
        anchor: impl Into<String>,
    ) -> Check {
        Check {
            id: id.into(),
            value: round_sig9(value),
            bound: round_sig9(expected),
            pass: value.is_finite() && (value - expected).abs() <= tolerance,
            anchor: anchor.into(),
        }
    }

    /// A separation check: passes when the measured value stays at or
    /// above the bound (used to certify that quantities are distinct).
    pub fn separation(id: impl Into<String>, value: f64, bound: f64, anchor: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            value: round_sig9(value),
            bound: round_sig9(bound),
            pass: value.is_finite() && value >= bound,
            anchor: anchor.into(),
        }
    }

    /// An informational record that always passes (used by evaluation
    /// commands that report values rather than verify them).
    pub fn evaluation(id: impl Into<String>, value: f64, anchor: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            value: round_sig9(value),
            bound: round_sig9(value),
            pass: value.is_finite(),
            anchor: anchor.into(),
        }
    }
}

/// A named set of checks; the overall flag is the conjunction of the
/// individual pass flags, and checks are kept sorted by id so report order
/// does not depend on execution order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, mut checks: Vec<Check>) -> VerificationReport {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let pass = checks.iter().all(|c| c.pass);
        VerificationReport {
            suite: suite.into(),
            checks,
            pass,
        }
    }

    /// Concatenates several reports into one suite.
    pub fn merged(suite: impl Into<String>, parts: Vec<VerificationReport>) -> VerificationReport {
        let checks = parts.into_iter().flat_map(|r| r.checks).collect();
        VerificationReport::new(suite, checks)
    }

    /// Checks whose id starts with the given prefix.
    pub fn section<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// CSV rendering: one row per check, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,id,value,bound,pass,anchor\n");
        for check in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},\"{}\"\n",
                self.suite,
                check.id,
                check.value,
                check.bound,
                check.pass,
                check.anchor.replace('"', "'"),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_nine_significant_digits() {
        assert_eq!(round_sig9(std::f64::consts::PI), 3.14159265);
        assert_eq!(round_sig9(-1.23456789123e-7), -1.23456789e-7);
        assert_eq!(round_sig9(123456789123.0), 123456789000.0);
        assert_eq!(round_sig9(0.0), 0.0);
        assert!(round_sig9(f64::NAN).is_nan());
    }

    #[test]
    fn residual_and_equality_checks_classify_correctly() {
        assert!(Check::residual("a", 1e-13, 1e-12, "x").pass);
        assert!(!Check::residual("a", 1e-11, 1e-12, "x").pass);
        assert!(!Check::residual("a", f64::NAN, 1e-12, "x").pass);
        assert!(Check::equality("b", 1.0000001, 1.0, 1e-6, "x").pass);
        assert!(!Check::equality("b", 1.01, 1.0, 1e-6, "x").pass);
    }

    #[test]
    fn reports_sort_by_id_and_conjoin_passes() {
        let report = VerificationReport::new(
            "demo",
            vec![
                Check::residual("z/check", 0.0, 1.0, "later"),
                Check::residual("a/check", 0.0, 1.0, "earlier"),
            ],
        );
        assert_eq!(report.checks[0].id, "a/check");
        assert!(report.pass);

        let failing = VerificationReport::new(
            "demo",
            vec![
                Check::residual("ok", 0.0, 1.0, ""),
                Check::residual("bad", 2.0, 1.0, ""),
            ],
        );
        assert!(!failing.pass);
        assert_eq!(failing.section("ok").count(), 1);
    }

    #[test]
    fn csv_rendering_is_one_row_per_check() {
        let report = VerificationReport::new(
            "demo",
            vec![Check::residual("only", 0.5, 1.0, "an \"anchor\"")],
        );
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("suite,id,"));
        assert!(lines[1].contains("demo,only,0.5,1,true"));
        assert!(lines[1].contains("'anchor'"));
    }
}
