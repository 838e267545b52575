use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::commutator::besov_profile;
use crate::diagnostics::DiagnosticsRecord;
use crate::dynamics::{velocity_from_state, SimState};
use crate::error::{Error, Result};

/// Shortest round-trip form with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(r: &DiagnosticsRecord) -> Vec<String> {
    let mut h = vec!["t".to_string(), "energy".into(), "hamiltonian".into()];
    h.extend(r.theta_lp.iter().map(|(p, _)| format!("theta_L{p}")));
    h.extend(r.omega_lq.iter().map(|(q, _)| format!("omega_L{q}")));
    h.extend(r.besov.iter().map(|(a, _)| format!("besov_{a}")));
    if r.flux.is_some() {
        h.push("flux".into());
    }
    h.extend(r.residuals.iter().map(|(name, _)| format!("residual_{name}")));
    h
}

fn row(r: &DiagnosticsRecord) -> Vec<f64> {
    let mut v = vec![r.t, r.energy, r.hamiltonian];
    v.extend(r.theta_lp.iter().map(|x| x.1));
    v.extend(r.omega_lq.iter().map(|x| x.1));
    v.extend(r.besov.iter().map(|x| x.1));
    v.extend(r.flux);
    v.extend(r.residuals.iter().map(|x| x.1));
    v
}

/// CSV text of a record series: a header naming every field, then one row per record.
pub fn diagnostics_csv(series: &[DiagnosticsRecord]) -> Result<String> {
    let first = series.first().ok_or(Error::EmptySeries)?;
    let h = header(first);
    let mut out = h.join(",");
    out.push('\n');
    for r in series {
        if header(r) != h {
            return Err(Error::DimensionMismatch("records carry different fields".into()));
        }
        let cells: Vec<String> = row(r).into_iter().map(format_f64).collect();
        writeln!(out, "{}", cells.join(",")).expect("writing to a String");
    }
    Ok(out)
}

pub fn export_diagnostics(series: &[DiagnosticsRecord], path: impl AsRef<Path>) -> Result<()> {
    let text = diagnostics_csv(series)?;
    fs::write(path, text)?;
    Ok(())
}

fn parse_cell(s: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Config { line, msg: format!("not a number: {s:?}") })
}

fn parse_exponent(name: &str, prefix: &str, line: usize) -> Result<Option<f64>> {
    match name.strip_prefix(prefix) {
        Some(rest) => parse_cell(rest, line).map(Some),
        None => Ok(None),
    }
}

/// Parses the output of [`diagnostics_csv`].
pub fn parse_diagnostics_csv(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut lines = text.lines();
    let cols: Vec<&str> = lines.next().ok_or(Error::EmptySeries)?.split(',').collect();
    if cols.len() < 3 || cols[..3] != ["t", "energy", "hamiltonian"] {
        return Err(Error::Config { line: 1, msg: "header must start with t,energy,hamiltonian".into() });
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        let ln = k + 2;
        let vals = line.split(',').map(|c| parse_cell(c, ln)).collect::<Result<Vec<_>>>()?;
        if vals.len() != cols.len() {
            return Err(Error::Config { line: ln, msg: format!("{} cells for {} columns", vals.len(), cols.len()) });
        }
        let mut r = DiagnosticsRecord {
            t: vals[0],
            energy: vals[1],
            hamiltonian: vals[2],
            theta_lp: Vec::new(),
            omega_lq: Vec::new(),
            besov: Vec::new(),
            flux: None,
            residuals: Vec::new(),
        };
        for (name, &v) in cols.iter().zip(&vals).skip(3) {
            if let Some(p) = parse_exponent(name, "theta_L", 1)? {
                r.theta_lp.push((p, v));
            } else if let Some(q) = parse_exponent(name, "omega_L", 1)? {
                r.omega_lq.push((q, v));
            } else if let Some(a) = parse_exponent(name, "besov_", 1)? {
                r.besov.push((a, v));
            } else if *name == "flux" {
                r.flux = Some(v);
            } else if let Some(res) = name.strip_prefix("residual_") {
                r.residuals.push((res.to_string(), v));
            } else {
                return Err(Error::Config { line: 1, msg: format!("unknown column {name:?}") });
            }
        }
        out.push(r);
    }
    if out.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(out)
}

pub fn import_diagnostics(path: impl AsRef<Path>) -> Result<Vec<DiagnosticsRecord>> {
    parse_diagnostics_csv(&fs::read_to_string(path)?)
}

/// Per dyadic band `j`: the `L^2` energy of `theta` in the band and the
/// Besov contribution `2^{j alpha} max_i ||Delta_j u_i||_{L^3}` of the surface velocity.
pub fn spectrum_csv(s: &SimState, alpha: f64) -> Result<String> {
    let theta = s.theta();
    let g = *theta.grid();
    let u = velocity_from_state(s)?.surface;
    let p1 = besov_profile(&u[0], alpha, 3.0);
    let p2 = besov_profile(&u[1], alpha, 3.0);
    let mut out = String::from("j,band_energy,besov_contrib\n");
    for ((band, b1), (_, b2)) in p1.iter().zip(&p2) {
        let energy: f64 = theta
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                let (m1, m2) = g.modes(*idx);
                band.contains(m1, m2)
            })
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            * g.l()
            * g.l();
        writeln!(out, "{},{},{}", band.j, format_f64(energy), format_f64(b1.max(*b2))).expect("writing to a String");
    }
    Ok(out)
}
