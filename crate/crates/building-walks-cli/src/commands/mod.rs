//! One function per subcommand. Each resolves its parameters, runs the
//! library, and fills an [`Output`] with both renderings.

mod affine;
mod checks;
mod models;
mod polygon;

use std::sync::Arc;

use building_walks::coxeter::CoxeterGroup;
use building_walks::hecke::HeckeSystem;
use building_walks::scalar::Scalar;

use crate::config::{Command, Resolved};
use crate::emit::Output;
use crate::CliError;

pub fn run(cmd: &Command) -> Result<(), CliError> {
    let mut resolved = Resolved::from_command(cmd)?;
    let output = match resolved.command {
        "polygon-pn" => polygon::polygon_pn(&mut resolved),
        "polygon-mix" => polygon::polygon_mix(&mut resolved),
        "quadrangle-closed-form" => polygon::quadrangle_closed_form(&mut resolved),
        "feit-higman" => checks::feit_higman(&mut resolved),
        "param-check" => checks::param_check(&mut resolved),
        "c2-exact" => affine::c2_exact(&mut resolved),
        "c2-spectral" => affine::c2_spectral(&mut resolved),
        "c2-llt" => affine::c2_llt(&mut resolved),
        "model-audit" => models::model_audit(&mut resolved),
        "simulate" => models::simulate(&mut resolved),
        "a2-rho" => checks::a2_rho(&mut resolved),
        "fuchsian-check" => checks::fuchsian_check(&mut resolved),
        other => unreachable!("unmapped subcommand {other}"),
    }?;
    output.deliver(&resolved)
}

/// Hecke system of the dihedral (m; q, r) geometry, the shared entry point of
/// the polygon commands.
fn dihedral_system<S: Scalar>(m: u32, q: u64, r: u64) -> building_walks::Result<Arc<HeckeSystem<S>>> {
    let group = CoxeterGroup::dihedral_system(m)?;
    HeckeSystem::new(group, vec![S::from_u64(q), S::from_u64(r)])
}

/// Scalar rendered for a CSV field: decimal, 15 significant digits.
fn csv_scalar<S: Scalar>(x: &S) -> String {
    building_walks::report::fmt_f64(x.to_f64_approx())
}

/// Scalar rendered for JSON: exact rationals as "p/q" strings, floats (and
/// irrational tower values) as numbers.
fn json_scalar<S: Scalar>(x: &S) -> serde_json::Value {
    building_walks::report::scalar_json(x)
}

/// `Output::set` helper for f64 values so every number passes through one
/// JSON conversion.
fn json_f64(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// Shared guard: `--m`, when a command fixes it, must match.
fn require_fixed_m(resolved: &Resolved, fixed: u32) -> Result<(), CliError> {
    match resolved.m {
        None => Ok(()),
        Some(m) if m == fixed => Ok(()),
        Some(m) => Err(CliError::Usage(format!(
            "`{}` is specific to m = {fixed}; got --m {m}",
            resolved.command
        ))),
    }
}

pub(crate) use crate::config::Format;

/// Convenience constructor: curve-style output (CSV default).
fn curve_output() -> Output {
    Output::new(Format::Csv)
}

/// Convenience constructor: verdict-style output (JSON default).
fn verdict_output() -> Output {
    Output::new(Format::Json)
}
