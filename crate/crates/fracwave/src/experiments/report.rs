//! Deterministic serialization of experiment results: CSV tables and a
//! gnuplot-friendly data file. Every float is written with 17 significant
//! digits so round-trips are bit-faithful.

use super::conservation::DriftSeries;
use super::convergence::{CellTag, ExperimentReport};
use super::dispersion::DispersionRow;

/// 17-significant-digit scientific notation.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

pub const ERROR_TABLE_HEADER: &str =
    "model,p,nu,eps,delta,n,dt,S_end,err_max,err_l2,slope_eps,slope_delta,drift_mass,drift_energy,wall_s";

/// The error-table CSV: one row per (cell, target).
pub fn error_table_csv(report: &ExperimentReport) -> String {
    let mut out = String::from(ERROR_TABLE_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.model.name(),
            r.p,
            fmt_g17(r.nu),
            fmt_g17(r.eps),
            fmt_g17(r.delta),
            r.n,
            fmt_g17(r.dt),
            fmt_g17(r.s_end),
            fmt_g17(r.err_max),
            fmt_g17(r.err_l2),
            fmt_opt(r.slope_eps),
            fmt_opt(r.slope_delta),
            fmt_g17(r.drift_mass),
            fmt_g17(r.drift_energy),
            fmt_g17(r.wall_s),
        ));
    }
    out
}

/// Space-separated sweep data with commented headers, one block per sweep,
/// ready for `plot "..." index 0 using 1:2`.
pub fn gnuplot_dat(report: &ExperimentReport) -> String {
    let mut out = String::new();
    for (tag, name, param) in [
        (CellTag::EpsSweep, "eps-sweep", 0),
        (CellTag::DeltaSweep, "delta-sweep", 1),
    ] {
        out.push_str(&format!("# {name}: parameter err_max err_l2 model\n"));
        for r in report.rows.iter().filter(|r| r.tag == tag) {
            let x = if param == 0 { r.eps } else { r.delta };
            out.push_str(&format!(
                "{} {} {} {}\n",
                fmt_g17(x),
                fmt_g17(r.err_max),
                fmt_g17(r.err_l2),
                r.model.name()
            ));
        }
        out.push_str("\n\n");
    }
    out
}

pub const DRIFT_HEADER: &str = "functional,initial,max_rel_drift,asserted";

pub fn drift_csv(series: &[DriftSeries]) -> String {
    let mut out = String::from(DRIFT_HEADER);
    out.push('\n');
    for s in series {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.functional,
            fmt_g17(s.initial),
            fmt_g17(s.max_rel_drift),
            s.asserted
        ));
    }
    out
}

pub const DISPERSION_HEADER: &str = "k,nu,omega_measured,omega_analytic,rel_err";

pub fn dispersion_csv(rows: &[DispersionRow]) -> String {
    let mut out = String::from(DISPERSION_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            fmt_g17(r.nu),
            fmt_g17(r.omega_measured),
            fmt_g17(r.omega_analytic),
            fmt_g17(r.rel_err),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_digits_and_round_trips() {
        let xs = [1.0, -0.1, 3.141592653589793, 6.25e-6, 1.2345678901234567e-300];
        for x in xs {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s} did not round-trip");
        }
    }
}
