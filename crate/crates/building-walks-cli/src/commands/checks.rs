//! Verdict commands: existence and feasibility checks plus the closed-form
//! A2-tilde spectral radius.

use building_walks::coxeter::{fuchsian_admissible, FuchsianVerdict};
use building_walks::polygon::{a2_chamber_spectral_radius, feit_higman_check, parameter_constraints};
use building_walks::report::fmt_f64;

use super::{json_f64, verdict_output};
use crate::config::Resolved;
use crate::emit::Output;
use crate::CliError;

/// `feit-higman`: multiplicity-rationality existence test for a thick
/// generalized m-gon with parameters (q, r).
pub fn feit_higman(resolved: &mut Resolved) -> Result<Output, CliError> {
    let m = resolved.need_m()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let check = feit_higman_check(m, q, r)?;
    let mut out = verdict_output();
    out.comment("admissible", check.admissible.to_string());
    out.comment("route", check.route);
    out.comment("chamber-count", check.chamber_count.clone());
    out.csv_header = vec!["irrep", "dim", "multiplicity", "rational"];
    for one in &check.one_dimensional {
        out.csv_rows.push(vec![
            one.label.clone(),
            "1".to_string(),
            one.multiplicity.clone(),
            "true".to_string(),
        ]);
    }
    for two in &check.two_dimensional {
        out.csv_rows.push(vec![
            format!("chi_{}", two.j),
            "2".to_string(),
            two.multiplicity_rational
                .clone()
                .unwrap_or_else(|| fmt_f64(two.multiplicity)),
            two.is_rational.to_string(),
        ]);
    }
    out.merge_struct(&check)?;
    Ok(out)
}

/// `param-check`: the named feasibility conditions on (q, r) for a thick
/// generalized m-gon, plus their conjunction.
pub fn param_check(resolved: &mut Resolved) -> Result<Output, CliError> {
    let m = resolved.need_m()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let constraints = parameter_constraints(m, q, r)?;
    let feasible = constraints.iter().all(|c| c.satisfied);
    let mut out = verdict_output();
    out.csv_header = vec!["constraint", "satisfied"];
    for c in &constraints {
        out.csv_rows
            .push(vec![c.name.replace(',', ";"), c.satisfied.to_string()]);
    }
    out.comment("feasible", feasible.to_string());
    out.merge_struct(&serde_json::json!({
        "constraints": constraints,
        "feasible": feasible,
    }))?;
    Ok(out)
}

/// `a2-rho`: closed-form spectral radius of the chamber simple random walk on
/// a thick A2-tilde building with parameter q.
pub fn a2_rho(resolved: &mut Resolved) -> Result<Output, CliError> {
    resolved.require_float_mode()?;
    let q = resolved.need_q()?;
    let rho = a2_chamber_spectral_radius(q as f64)?;
    let mut out = verdict_output();
    out.csv_header = vec!["q", "rho"];
    out.csv_rows.push(vec![q.to_string(), fmt_f64(rho)]);
    out.set("rho", json_f64(rho));
    Ok(out)
}

/// `fuchsian-check`: hyperbolicity of the rotation orders and whether every
/// gonality is realizable by a thick finite geometry.
pub fn fuchsian_check(resolved: &mut Resolved) -> Result<Output, CliError> {
    if resolved.orders.len() < 3 {
        return Err(CliError::Usage(format!(
            "`fuchsian-check` needs at least three rotation orders, e.g. `fuchsian-check 3 3 4`; got {}",
            resolved.orders.len()
        )));
    }
    let verdict = fuchsian_admissible(&resolved.orders)?;
    let (name, hyperbolic, thick) = match verdict {
        FuchsianVerdict::NotHyperbolic => ("not-hyperbolic", false, false),
        FuchsianVerdict::HyperbolicNoThickBuilding => {
            ("hyperbolic-no-thick-building", true, false)
        }
        FuchsianVerdict::HyperbolicThickBuilding => ("hyperbolic-thick-building", true, true),
    };
    let mut out = verdict_output();
    out.csv_header = vec!["orders", "verdict", "hyperbolic", "thick_building_exists"];
    out.csv_rows.push(vec![
        resolved
            .orders
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(" "),
        name.to_string(),
        hyperbolic.to_string(),
        thick.to_string(),
    ]);
    out.set("verdict", name);
    out.set("hyperbolic", hyperbolic);
    out.set("thick_building_exists", thick);
    Ok(out)
}
