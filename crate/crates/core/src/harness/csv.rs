//! CSV output for traces, switch errors and uncertainty logs.

use std::fmt::Write as _;

use super::runner::{SwitchError, TraceRow};

pub const TRACE_HEADER: &str =
    "time_s,t_true,t_perceived_mean,t_perceived_std,u_pt,u_dt,u_mitigated,heater_on,event";
pub const SWITCH_HEADER: &str = "run_id,approach,switch_time_s,perceived_c,actual_c,error_c";
pub const UNCERTAINTY_HEADER: &str = "run_id,approach,time_s,u_value,u_kind";

const SIGNIFICANT: i32 = 9;

/// Fixed-point rendering with nine significant digits.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let decimals = |v: f64| {
        if v == 0.0 {
            SIGNIFICANT - 1
        } else {
            (SIGNIFICANT - 1 - v.abs().log10().floor() as i32).max(0)
        }
    };
    let d = decimals(x);
    let s = format!("{:.*}", d as usize, x);
    // Rounding may carry into a new leading digit, e.g. 9.999999999 -> 10.00000000.
    let rounded: f64 = s.parse().unwrap_or(x);
    let d2 = decimals(rounded);
    if d2 < d {
        format!("{:.*}", d2 as usize, x)
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_trace_row(out: &mut String, row: &TraceRow) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{}",
        fmt_float(row.time),
        fmt_float(row.t_true),
        fmt_float(row.perceived.mean()),
        fmt_float(row.perceived.std()),
        opt(row.u_pt),
        opt(row.u_dt),
        opt(row.u_mitigated),
        u8::from(row.heater_on),
        row.event.as_str()
    );
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(96 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in rows {
        write_trace_row(&mut out, row);
    }
    out
}

pub fn write_switch_row(out: &mut String, e: &SwitchError) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        e.run_id,
        e.approach,
        fmt_float(e.switch_time),
        fmt_float(e.perceived),
        fmt_float(e.actual),
        fmt_float(e.error)
    );
}

/// Uncertainty log rows derived from a trace: `U` from `u_dt`, `Uprime` from
/// `u_pt`, `mu` from `u_mitigated`.
pub fn write_uncertainty_rows(out: &mut String, run_id: u64, approach: &str, rows: &[TraceRow]) {
    for row in rows {
        for (value, kind) in [(row.u_dt, "U"), (row.u_pt, "Uprime"), (row.u_mitigated, "mu")] {
            if let Some(v) = value {
                let _ = writeln!(out, "{run_id},{approach},{},{},{kind}", fmt_float(row.time), fmt_float(v));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_float(0.0), "0.00000000");
        assert_eq!(fmt_float(-0.0), "0.00000000");
        assert_eq!(fmt_float(37.322504649), "37.3225046");
        assert_eq!(fmt_float(0.2041241452319315), "0.204124145");
        assert_eq!(fmt_float(0.005), "0.00500000000");
        assert_eq!(fmt_float(2500.0), "2500.00000");
        assert_eq!(fmt_float(-1.5), "-1.50000000");
        assert_eq!(fmt_float(9.9999999996), "10.0000000");
        assert_eq!(fmt_float(123456789012.0), "123456789012");
    }

    #[test]
    fn significant_digits_survive_parsing() {
        for x in [1.234_567_891_23e-4, 21.000_000_4, 38.749_999_99, 0.3] {
            let back: f64 = fmt_float(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-9, "{x} -> {back}");
        }
    }
}
