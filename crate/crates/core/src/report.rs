//! Rendering of results: pinned CSV schemas and the single-trial report.
//!
//! All floating-point cells are printed with 9 significant digits in
//! scientific notation, lines end with LF, and the decimal separator is
//! always `.`. Cells whose value is undefined (infeasible scheme, or a
//! confidence half-width with fewer than two trials) are left empty.

use crate::combiner::Resolution;
use crate::montecarlo::{AggregateRow, TrialRealization, TrialSetup};
use crate::schemes::SchemeResult;

/// Header of the density-sweep CSV.
pub const DENSITY_HEADER: &str =
    "scheme,lambda,M,B,trials,infeasible,mean_E_abs_J,ci95_E_abs_J,mean_E_net_J,ci95_E_net_J";

/// Header of the antenna-sweep CSV.
pub const ANTENNA_HEADER: &str =
    "scheme,M,B_opt,lambda,trials,infeasible,mean_E_abs_J,ci95_E_abs_J,mean_E_net_J,ci95_E_net_J";

/// Header of the per-scheme ledger CSV written by the single-trial command.
pub const SINGLE_HEADER: &str = "scheme,B,N,feasible,E_abs_J,E_phase_J,E_meter_J,E_net_J";

/// 9 significant digits, scientific notation.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt_sig9(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

fn resolution_cell(resolution: Option<Resolution>) -> String {
    match resolution {
        None => String::new(),
        Some(Resolution::Bits(b)) => b.to_string(),
        Some(Resolution::Continuous) => "inf".to_string(),
    }
}

/// Renders density-sweep rows under [`DENSITY_HEADER`].
pub fn density_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(DENSITY_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.scheme.label(),
            sig9(row.density),
            row.antennas,
            resolution_cell(row.resolution),
            row.trials,
            row.infeasible,
            opt_sig9(row.mean_e_abs),
            opt_sig9(row.ci95_e_abs),
            opt_sig9(row.mean_e_net),
            opt_sig9(row.ci95_e_net),
        ));
    }
    out
}

/// Renders antenna-sweep rows under [`ANTENNA_HEADER`].
pub fn antenna_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(ANTENNA_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.scheme.label(),
            row.antennas,
            resolution_cell(row.resolution),
            sig9(row.density),
            row.trials,
            row.infeasible,
            opt_sig9(row.mean_e_abs),
            opt_sig9(row.ci95_e_abs),
            opt_sig9(row.mean_e_net),
            opt_sig9(row.ci95_e_net),
        ));
    }
    out
}

/// Renders the per-scheme ledgers of one trial under [`SINGLE_HEADER`].
pub fn single_csv(results: &[SchemeResult]) -> String {
    let mut out = String::from(SINGLE_HEADER);
    out.push('\n');
    for r in results {
        let (e_abs, e_phase, e_meter, e_net) = match r.ledger {
            Some(l) => (sig9(l.e_abs), sig9(l.e_phase), sig9(l.e_meter), sig9(l.e_net)),
            None => Default::default(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.scheme.label(),
            resolution_cell(r.resolution),
            r.measurements,
            if r.feasible() { "yes" } else { "no" },
            e_abs,
            e_phase,
            e_meter,
            e_net,
        ));
    }
    out
}

/// Human-readable account of one trial.
pub fn single_report(
    setup: &TrialSetup,
    realization: &TrialRealization,
    results: &[SchemeResult],
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "realization: {} transmitters (lambda = {} /m^2, disk radius {} m)\n",
        realization.deployment.num_sites(),
        sig9(setup.density),
        setup.region_radius,
    ));
    out.push_str(&format!(
        "array: M = {} antennas, B = {} bits, T = {} s, dt = {} s\n\n",
        setup.params.antennas,
        setup.params.bits,
        setup.params.duration,
        setup.params.dt(),
    ));
    out.push_str(&format!(
        "{:<8}{:>5}{:>8}{:>10}{:>16}{:>16}{:>16}{:>16}\n",
        "scheme", "B", "N", "feasible", "E_abs_J", "E_phase_J", "E_meter_J", "E_net_J"
    ));
    for r in results {
        let cells = match r.ledger {
            Some(l) => [sig9(l.e_abs), sig9(l.e_phase), sig9(l.e_meter), sig9(l.e_net)],
            None => ["-".into(), "-".into(), "-".into(), "-".into()],
        };
        out.push_str(&format!(
            "{:<8}{:>5}{:>8}{:>10}{:>16}{:>16}{:>16}{:>16}\n",
            r.scheme.label(),
            resolution_cell(r.resolution),
            r.measurements,
            if r.feasible() { "yes" } else { "no" },
            cells[0],
            cells[1],
            cells[2],
            cells[3],
        ));
    }
    out
}
