//! Human-facing text rendering of certification reports. The layout is
//! informational and unstable; exit codes are the machine contract.

use std::fmt::Write as _;

use muscu_core::{SegmentWindow, StabilityReport, Verdict, WindowCrossValidation};

use crate::config::{config_echo, ResolvedScenario};

fn window_label(idx: usize) -> &'static str {
    ["cable 1 segment 1", "cable 1 segment 2", "cable 2 segment 1", "cable 2 segment 2"][idx]
}

pub fn render_report(scenario: &ResolvedScenario, report: &StabilityReport) -> String {
    let mut out = String::new();
    if let Some(name) = &scenario.config.name {
        let _ = writeln!(out, "scenario: {name}");
    }
    let verdict_line = match &report.verdict {
        Verdict::Certified => "CERTIFIED".to_string(),
        Verdict::NotCertified(_) => "NOT CERTIFIED".to_string(),
        Verdict::Unknown(_) => "UNKNOWN".to_string(),
    };
    let _ = writeln!(out, "verdict: {verdict_line}");
    let _ = writeln!(
        out,
        "theta_d: {:.17e} rad   gain: {:.6}",
        report.theta_d, report.gain
    );
    match &report.certified {
        Some(c) if !c.is_empty() => {
            let _ = writeln!(
                out,
                "certified interval: ({:.17e}, {:.17e}) rad",
                c.lo, c.hi
            );
        }
        Some(_) => {
            let _ = writeln!(out, "certified interval: empty");
        }
        None => {
            let _ = writeln!(out, "certified interval: unresolved (window case gap)");
        }
    }
    let _ = writeln!(
        out,
        "theta0: {:.9} rad (admissible bound {:.9})",
        report.theta0, report.theta0_bound
    );
    let _ = writeln!(out, "tension window: {}", report.tension_window);
    let _ = writeln!(out, "segment curvature windows:");
    for (idx, sw) in report.segment_windows.iter().enumerate() {
        match sw {
            SegmentWindow::Known(w) => {
                let _ = writeln!(out, "  {}: {}", window_label(idx), w);
            }
            SegmentWindow::Unknown {
                b_abs,
                case1_bound,
                case2_bound,
            } => {
                let _ = writeln!(
                    out,
                    "  {}: undetermined (|b| = {b_abs:.6} m; case 1 needs < {case1_bound:.6}, \
                     case 2 needs > {case2_bound:.6})",
                    window_label(idx)
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "window combination: intersection of the tension window with all four segment windows"
    );
    let _ = writeln!(
        out,
        "C_theta0: segment (2,1) {:.9} m, segment (2,2) {:.9} m",
        report.c_theta0[0], report.c_theta0[1]
    );
    let _ = writeln!(out, "assumptions:");
    for a in &report.assumptions {
        let _ = writeln!(
            out,
            "  [{}] {}: {} (margin {:.3e})",
            if a.passed { "pass" } else { "FAIL" },
            a.name,
            a.detail,
            a.margin
        );
    }
    let _ = writeln!(
        out,
        "potential curvature at target: {:.9e} J/rad^2",
        report.pdd_at_target
    );
    let v = &report.tensions_at_target;
    let _ = writeln!(
        out,
        "tensions at target: v1 = {:.6} N, v2 = {:.6} N{}",
        v.v1,
        v.v2,
        if v.both_positive() {
            ""
        } else {
            "  [warning: not realizable with pulling cables]"
        }
    );
    match &report.verdict {
        Verdict::NotCertified(reasons) | Verdict::Unknown(reasons) => {
            let _ = writeln!(out, "reasons:");
            for r in reasons {
                let _ = writeln!(out, "  - {r}");
            }
        }
        Verdict::Certified => {}
    }
    out
}

/// Appends the cross-check section produced by `check --verify`.
pub struct VerifySection {
    pub lines: Vec<(bool, String)>,
}

impl VerifySection {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|(ok, _)| *ok)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("cross-checks:\n");
        for (ok, line) in &self.lines {
            let _ = writeln!(out, "  [{}] {line}", if *ok { "pass" } else { "FAIL" });
        }
        out
    }
}

pub fn render_window_validation(v: &WindowCrossValidation) -> String {
    let mut claimed = 0;
    let mut samples = 0;
    for c in &v.checks {
        if c.window.is_some() {
            claimed += 1;
            samples += c.samples;
        }
    }
    format!(
        "window cross-validation: {claimed} resolved windows, {samples} samples, 0 violations \
         (grid {})",
        v.grid_n
    )
}

pub fn render_echo(scenario: &ResolvedScenario) -> String {
    format!("config: {}", config_echo(&scenario.config))
}
