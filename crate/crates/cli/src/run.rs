//! Command implementations. Each returns its text/CSV payloads and the
//! process exit code; `main` only does argument plumbing and I/O.
//!
//! Exit codes are the machine contract: 0 certified, 1 not certified
//! (or a simulation that diverged), 2 undetermined, 3 invalid
//! configuration, 4 internal cross-check failure under `--verify`.

use muscu_core::{
    certified_interval, check_equilibrium, cross_validate_windows, fd_derivative, internal_force,
    potential, resolve_theta0, scan_potential, simulate, FdOrder, State, Trajectory, Verdict,
};

use crate::config::{ConfigError, ResolvedScenario, ScenarioConfig};
use crate::csvfmt::SweepRow;
use crate::report::{render_echo, render_report, render_window_validation, VerifySection};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_NOT_CERTIFIED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INVALID_CONFIG: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

/// Relative tolerance for the `--verify` finite-difference cross-check
/// of the potential curvature.
const PDD_CROSS_CHECK_REL: f64 = 1e-5;
/// Grid used by the `--verify` window and potential scans.
const VERIFY_GRID_N: usize = muscu_core::verify::DEFAULT_GRID_N;

pub struct CheckOutcome {
    pub text: String,
    pub exit: i32,
}

pub fn run_check(scenario: &ResolvedScenario, verify: bool) -> Result<CheckOutcome, ConfigError> {
    let report = check_equilibrium(&scenario.model, &scenario.dyn_params, scenario.pinned_theta0)?;
    let mut text = render_report(scenario, &report);

    let mut exit = match &report.verdict {
        Verdict::Certified => EXIT_CERTIFIED,
        Verdict::NotCertified(_) => EXIT_NOT_CERTIFIED,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    };

    if verify {
        let section = run_verify_checks(scenario, &report.verdict);
        text.push_str(&section.render());
        if !section.all_passed() {
            exit = EXIT_VERIFY_FAILED;
        }
    }

    text.push_str(&render_echo(scenario));
    text.push('\n');
    Ok(CheckOutcome { text, exit })
}

fn run_verify_checks(scenario: &ResolvedScenario, verdict: &Verdict) -> VerifySection {
    let model = &scenario.model;
    let dp = &scenario.dyn_params;
    let mut lines = Vec::new();

    let theta0 = match resolve_theta0(model, scenario.pinned_theta0) {
        Ok(t) => t,
        Err(e) => {
            return VerifySection {
                lines: vec![(false, format!("margin resolution failed: {e}"))],
            }
        }
    };

    match cross_validate_windows(model, theta0, VERIFY_GRID_N) {
        Ok(v) => lines.push((true, render_window_validation(&v))),
        Err(e) => lines.push((false, e.to_string())),
    }

    // Curvature of the potential vs an independent second difference.
    let force = internal_force(model, dp.theta_d, dp.gain);
    let analytic = muscu_core::potential_curvature(model, dp.theta_d, dp.gain);
    let fd = fd_derivative(
        |t| potential(model, t, dp.theta_d, &force),
        dp.theta_d,
        muscu_core::verify::FD_STEP_SECOND,
        FdOrder::Second,
    );
    let p_scale = model.muscle_length(1, dp.theta_d) * force.v1.abs()
        + model.muscle_length(2, dp.theta_d) * force.v2.abs();
    let floor = 8.0 * f64::EPSILON * p_scale
        / (muscu_core::verify::FD_STEP_SECOND * muscu_core::verify::FD_STEP_SECOND);
    let err = (analytic - fd).abs();
    let ok = err <= PDD_CROSS_CHECK_REL * analytic.abs().max(fd.abs()) + floor;
    lines.push((
        ok,
        format!(
            "potential curvature cross-check: analytic {analytic:.6e}, finite difference \
             {fd:.6e} J/rad^2"
        ),
    ));

    // Potential landscape around the target. Certification guarantees a
    // strict local minimum; the argmin-at-target claim additionally
    // holds over the stop interval, but not over the whole domain.
    let (lo, hi, is_stop_interval) = scan_range(scenario, theta0);
    let scan = scan_potential(model, dp.theta_d, &force, lo, hi, VERIFY_GRID_N);
    if verdict.is_certified() {
        let argmin_near = (scan.argmin - dp.theta_d).abs() <= scan.cell;
        let ok = scan.strict_local_min_at_target && (!is_stop_interval || argmin_near);
        lines.push((
            ok,
            format!(
                "potential scan on ({lo:.4}, {hi:.4}): argmin {:.6} rad, target {} a strict \
                 local minimum at grid scale",
                scan.argmin,
                if scan.strict_local_min_at_target {
                    "is"
                } else {
                    "is NOT"
                }
            ),
        ));
    } else {
        lines.push((
            true,
            format!(
                "potential scan on ({lo:.4}, {hi:.4}): argmin {:.6} rad (informational; verdict \
                 not certified)",
                scan.argmin
            ),
        ));
    }

    VerifySection { lines }
}

/// Scan range: the hard-stop interval when configured (flagged true),
/// otherwise the analysis domain shrunk by one cell per end.
fn scan_range(scenario: &ResolvedScenario, theta0: f64) -> (f64, f64, bool) {
    match &scenario.dyn_params.penalty {
        Some(p) => (p.theta_min, p.theta_max, true),
        None => {
            let cell = (std::f64::consts::PI + theta0) / (VERIFY_GRID_N + 1) as f64;
            (-theta0 + cell, std::f64::consts::PI - cell, false)
        }
    }
}

pub struct SimulateOutcome {
    pub csv: Vec<u8>,
    pub summary: String,
    pub exit: i32,
}

pub fn run_simulate(scenario: &ResolvedScenario) -> Result<SimulateOutcome, ConfigError> {
    let sim = scenario.config.simulation.ok_or_else(|| ConfigError::Field {
        field: "simulation".into(),
        message: "the simulate command needs a simulation block".into(),
    })?;
    let init = State {
        theta: sim.theta_init.0,
        omega: sim.omega_init,
    };
    let (trajectory, diverged) = match simulate(
        init,
        &scenario.model,
        &scenario.dyn_params,
        sim.dt,
        sim.t_final,
    ) {
        Ok(t) => (t, None),
        Err(d) => (d.partial.clone(), Some(d)),
    };
    let mut csv = Vec::new();
    crate::csvfmt::write_trajectory(&mut csv, &trajectory).expect("in-memory write");

    let last = trajectory.final_sample();
    let mut summary = format!(
        "samples: {}   final t: {:.6} s   final |theta - theta_d|: {:.17e} rad   penalty active \
         on {} samples\n",
        trajectory.samples.len(),
        last.t,
        (last.theta - scenario.dyn_params.theta_d).abs(),
        trajectory.samples.iter().filter(|s| s.penalty_active).count()
    );
    let exit = if let Some(d) = diverged {
        summary.push_str(&format!("error: {d}\n"));
        EXIT_NOT_CERTIFIED
    } else {
        EXIT_CERTIFIED
    };
    summary.push_str(&render_echo(scenario));
    summary.push('\n');
    Ok(SimulateOutcome { csv, summary, exit })
}

pub struct PotentialOutcome {
    pub csv: Vec<u8>,
    pub summary: String,
    pub exit: i32,
}

pub fn run_potential(
    scenario: &ResolvedScenario,
    grid_n: usize,
) -> Result<PotentialOutcome, ConfigError> {
    if grid_n < 2 {
        return Err(ConfigError::Field {
            field: "--grid".into(),
            message: format!("potential grid needs at least 2 samples, got {grid_n}"),
        });
    }
    let theta0 = resolve_theta0(&scenario.model, scenario.pinned_theta0)?;
    let (lo, hi) = match &scenario.dyn_params.penalty {
        Some(p) => (p.theta_min, p.theta_max),
        None => {
            let cell = (std::f64::consts::PI + theta0) / (grid_n + 1) as f64;
            (-theta0 + cell, std::f64::consts::PI - cell)
        }
    };
    let dp = &scenario.dyn_params;
    let force = internal_force(&scenario.model, dp.theta_d, dp.gain);
    let step = (hi - lo) / (grid_n - 1) as f64;
    let mut samples = Vec::with_capacity(grid_n);
    let mut argmin = (f64::INFINITY, f64::NAN);
    for k in 0..grid_n {
        let theta = lo + step * k as f64;
        let p = potential(&scenario.model, theta, dp.theta_d, &force);
        if p < argmin.0 {
            argmin = (p, theta);
        }
        samples.push((theta, p));
    }
    let mut csv = Vec::new();
    crate::csvfmt::write_potential(&mut csv, &samples).expect("in-memory write");
    let mut summary = format!(
        "samples: {grid_n} over ({lo:.9}, {hi:.9})   grid argmin: {:.9} rad (P = {:.9e} J)\n",
        argmin.1, argmin.0
    );
    summary.push_str(&render_echo(scenario));
    summary.push('\n');
    Ok(PotentialOutcome {
        csv,
        summary,
        exit: EXIT_CERTIFIED,
    })
}

/// Parses `LO:HI:N` into N uniformly spaced values (inclusive ends).
/// N = 0 is an empty sweep, N = 1 degenerates to LO alone.
pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("range `{text}` must look like LO:HI:N"));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad range start `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad range end `{hi}`"))?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad range count `{n}`"))?;
    Ok(match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    })
}

/// Names accepted by `--param`: bench-table geometry keys in
/// millimeters, or dynamics scalars in SI units / radians.
pub fn set_sweep_param(cfg: &mut ScenarioConfig, name: &str, value: f64) -> Result<(), String> {
    match name {
        "L0" => cfg.geometry_mm.l0 = value,
        "L1" => cfg.geometry_mm.l1 = value,
        "b1" => cfg.geometry_mm.b1 = value,
        "b2" => cfg.geometry_mm.b2 = value,
        "d1" => cfg.geometry_mm.d1 = value,
        "d2" => cfg.geometry_mm.d2 = value,
        "ell1" => cfg.geometry_mm.ell1 = value,
        "ell2" => cfg.geometry_mm.ell2 = value,
        "r1" => cfg.geometry_mm.r1 = value,
        "r2" => cfg.geometry_mm.r2 = value,
        "s1" => cfg.geometry_mm.s1 = value,
        "s2" => cfg.geometry_mm.s2 = value,
        "inertia" => cfg.dynamics.inertia = value,
        "mu" => cfg.dynamics.mu = value,
        "k" => {
            cfg.dynamics.k = Some(value);
            cfg.dynamics.tensions = None;
        }
        "theta_d" => cfg.dynamics.theta_d = crate::config::Angle(value),
        "epsilon" => match &mut cfg.dynamics.penalty {
            Some(p) => p.epsilon = value,
            None => return Err("config has no penalty block to take `epsilon`".into()),
        },
        other => {
            return Err(format!(
                "unknown sweep parameter `{other}`; geometry (mm): L0 L1 b1 b2 d1 d2 ell1 ell2 \
                 r1 r2 s1 s2; dynamics: inertia mu k theta_d epsilon"
            ))
        }
    }
    Ok(())
}

/// Evaluates one sweep row; any rejection is recorded in the row, never
/// fatal to the sweep.
fn sweep_row(base: &ScenarioConfig, param: &str, value: f64) -> SweepRow {
    let mut cfg = base.clone();
    if let Err(message) = set_sweep_param(&mut cfg, param, value) {
        return SweepRow {
            value,
            verdict: format!("Invalid({message})"),
            certified: None,
        };
    }
    let scenario = match cfg.resolve_with(crate::config::TensionGate::Skip) {
        Ok(s) => s,
        Err(e) => {
            return SweepRow {
                value,
                verdict: "Invalid".to_string(),
                certified: None,
            }
            .with_reason(&e)
        }
    };
    match check_equilibrium(&scenario.model, &scenario.dyn_params, scenario.pinned_theta0) {
        Ok(report) => {
            let verdict = match report.verdict {
                Verdict::Certified => "Certified",
                Verdict::NotCertified(_) => "NotCertified",
                Verdict::Unknown(_) => "Unknown",
            };
            let certified = resolve_theta0(&scenario.model, scenario.pinned_theta0)
                .ok()
                .and_then(|t0| certified_interval(&scenario.model, t0).ok());
            SweepRow {
                value,
                verdict: verdict.to_string(),
                certified,
            }
        }
        Err(e) => SweepRow {
            value,
            verdict: "Invalid".to_string(),
            certified: None,
        }
        .with_reason(&e),
    }
}

impl SweepRow {
    fn with_reason(mut self, e: &dyn std::fmt::Display) -> Self {
        // Keep the verdict column parseable: no commas or newlines.
        let reason: String = e
            .to_string()
            .chars()
            .map(|c| if c == ',' || c == '\n' { ';' } else { c })
            .collect();
        self.verdict = format!("Invalid({reason})");
        self
    }
}

pub struct SweepOutcome {
    pub csv: Vec<u8>,
    pub summary: String,
    pub exit: i32,
}

/// Runs one row per value, in parallel, output ordered by input order.
/// `MUSCU_THREADS` caps the worker count.
pub fn run_sweep(
    base: &ScenarioConfig,
    param: &str,
    values: &[f64],
) -> Result<SweepOutcome, ConfigError> {
    let rows = run_sweep_rows(base, param, values);
    let mut csv = Vec::new();
    crate::csvfmt::write_sweep(&mut csv, &rows).expect("in-memory write");
    let summary = format!(
        "swept `{param}` over {} values: {} certified, {} not certified, {} unknown, {} invalid\n",
        rows.len(),
        rows.iter().filter(|r| r.verdict == "Certified").count(),
        rows.iter().filter(|r| r.verdict == "NotCertified").count(),
        rows.iter().filter(|r| r.verdict == "Unknown").count(),
        rows.iter()
            .filter(|r| r.verdict.starts_with("Invalid"))
            .count(),
    );
    Ok(SweepOutcome {
        csv,
        summary,
        exit: EXIT_CERTIFIED,
    })
}

fn run_sweep_rows(base: &ScenarioConfig, param: &str, values: &[f64]) -> Vec<SweepRow> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads())
        .build()
        .expect("thread pool");
    pool.install(|| {
        values
            .par_iter()
            .map(|&v| sweep_row(base, param, v))
            .collect()
    })
}

fn sweep_threads() -> usize {
    std::env::var("MUSCU_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(0) // 0 lets rayon pick
}

/// Reusable: total time series mismatch between two trajectory CSVs is
/// used by tests; keep the parser next to the writer.
pub fn parse_trajectory_csv(text: &str) -> Result<Trajectory, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    if header != "t,theta,omega,energy,penalty_active" {
        return Err(format!("unexpected header `{header}`"));
    }
    let mut samples = Vec::new();
    for (ln, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(format!("line {}: expected 5 columns", ln + 2));
        }
        let f = |i: usize| -> Result<f64, String> {
            cols[i]
                .parse()
                .map_err(|_| format!("line {}: bad float `{}`", ln + 2, cols[i]))
        };
        let penalty_active = match cols[4] {
            "0" => false,
            "1" => true,
            other => return Err(format!("line {}: bad flag `{other}`", ln + 2)),
        };
        samples.push(muscu_core::Sample {
            t: f(0)?,
            theta: f(1)?,
            omega: f(2)?,
            energy: f(3)?,
            penalty_active,
        });
    }
    let dt = if samples.len() >= 2 {
        samples[1].t - samples[0].t
    } else {
        muscu_core::DEFAULT_DT
    };
    Ok(Trajectory { samples, dt })
}
