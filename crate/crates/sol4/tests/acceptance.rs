//! Acceptance gate: runs the full verification report once and judges each
//! advertised guarantee of the engine, printing one pass/fail line per
//! criterion. Every bound is the pinned default from the verify module; no
//! criterion may be weakened here.

use sol4::report::Check;
use sol4::verify::{all_report, RunConfig};

#[test]
fn acceptance() {
    let cfg = RunConfig::default();
    let report = all_report(&cfg).expect("verification suites should run to completion");

    let pick = |predicate: &dyn Fn(&str) -> bool| -> Vec<&Check> {
        report
            .checks
            .iter()
            .filter(|c| predicate(&c.id))
            .collect()
    };

    let criteria: Vec<(&str, Vec<&Check>)> = vec![
        (
            "ambient structural identities and the curvature oracle hold to rounding",
            pick(&|id| id.starts_with("ambient/")),
        ),
        (
            "rotation tubes: spectra, Ricci, sectionals, implicit, fundamental equations",
            pick(&|id| id.starts_with("family/M1/")),
        ),
        (
            "translated graphs: minimal, totally geodesic at r = 0, invariants match",
            pick(&|id| id.starts_with("family/M2/")),
        ),
        (
            "tilted slices: minimal, constant sectional curvature, isotropy over random planes",
            pick(&|id| id.starts_with("family/M3/")),
        ),
        (
            "horizontal leaves: intrinsically flat, shape spectrum orientation recorded",
            pick(&|id| id.starts_with("family/M4/")),
        ),
        (
            "Gauss and Codazzi residuals vanish on catalog members and random graphs",
            pick(&|id| id.ends_with("/gauss") || id.ends_with("/codazzi")),
        ),
        (
            "isometry subgroups act transitively with constant principal curvatures",
            pick(&|id| id.starts_with("orbit/")),
        ),
        (
            "horizontal geodesics of arclength r land on the radius-r tubes",
            pick(&|id| id.starts_with("tube/")),
        ),
        (
            "normal sweeps land on parallel members; Ricci spectra separate radii",
            pick(&|id| id.starts_with("parallel/")),
        ),
        (
            "constant-angle cases round-trip onto their catalog members",
            pick(&|id| id.starts_with("reconstruct/case-")),
        ),
        (
            "angle ODE matches its closed form; the obstruction is free-coefficient independent and linear in a*c",
            pick(&|id| id == "reconstruct/ode-closed-form" || id.starts_with("reconstruct/obstruction-")),
        ),
    ];

    let mut failures = Vec::new();
    for (index, (label, checks)) in criteria.iter().enumerate() {
        assert!(
            !checks.is_empty(),
            "criterion {:02} selected no checks",
            index + 1
        );
        let ok = checks.iter().all(|c| c.pass);
        println!(
            "criterion {:02} {} — {} ({} checks)",
            index + 1,
            if ok { "PASS" } else { "FAIL" },
            label,
            checks.len()
        );
        if !ok {
            failures.extend(
                checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("  {}: value {} vs bound {}", c.id, c.value, c.bound)),
            );
        }
    }

    assert!(
        failures.is_empty(),
        "failing checks:\n{}",
        failures.join("\n")
    );
    assert!(report.pass, "merged report must pass overall");
}
