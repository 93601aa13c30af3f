//! CSV emission: `.` decimal point, `,` separator, header row, LF line
//! endings, 17 significant digits for floats.

use std::io::{self, Write};

use muscu_core::{AngleInterval, Trajectory};

/// 17 significant digits: enough to reproduce any f64 bit pattern.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_trajectory(w: &mut impl Write, traj: &Trajectory) -> io::Result<()> {
    w.write_all(b"t,theta,omega,energy,penalty_active\n")?;
    for s in &traj.samples {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(s.t),
            fmt_f64(s.theta),
            fmt_f64(s.omega),
            fmt_f64(s.energy),
            u8::from(s.penalty_active)
        )?;
    }
    Ok(())
}

pub fn write_potential(w: &mut impl Write, samples: &[(f64, f64)]) -> io::Result<()> {
    w.write_all(b"theta,P\n")?;
    for (theta, p) in samples {
        writeln!(w, "{},{}", fmt_f64(*theta), fmt_f64(*p))?;
    }
    Ok(())
}

/// One sweep row: swept value, verdict label, certified bounds (NaN
/// when the interval is unavailable).
pub struct SweepRow {
    pub value: f64,
    pub verdict: String,
    pub certified: Option<AngleInterval>,
}

pub fn write_sweep(w: &mut impl Write, rows: &[SweepRow]) -> io::Result<()> {
    w.write_all(b"value,verdict,certified_lo,certified_hi\n")?;
    for row in rows {
        let (lo, hi) = row
            .certified
            .map_or((f64::NAN, f64::NAN), |c| (c.lo, c.hi));
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(row.value),
            row.verdict,
            fmt_f64(lo),
            fmt_f64(hi)
        )?;
    }
    Ok(())
}
