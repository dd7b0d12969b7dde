//! Explicit-model commands: the structural audit and the seeded Monte Carlo
//! walk with its per-chamber distribution.

use building_walks::coxeter::word_name;
use building_walks::hecke::WalkSpec;
use building_walks::models::{build_model, IncidenceModel, ModelKind};
use building_walks::report::fmt_f64;
use building_walks::Rational;

use super::{json_f64, verdict_output};
use crate::config::{worker_count, Resolved};
use crate::emit::Output;
use crate::CliError;

/// The explicit model catalogue is keyed by gonality: digon, projective
/// plane, symplectic quadrangle.
fn model_kind(m: u32) -> Result<ModelKind, CliError> {
    match m {
        2 => Ok(ModelKind::CompleteBipartite),
        3 => Ok(ModelKind::ProjectivePlane),
        4 => Ok(ModelKind::SymplecticQuadrangle),
        other => Err(CliError::Usage(format!(
            "explicit models exist for --m 2 (digon), 3 (projective plane), 4 (symplectic \
             quadrangle); got --m {other}"
        ))),
    }
}

fn build(resolved: &Resolved) -> Result<IncidenceModel, CliError> {
    let m = resolved.need_m()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    Ok(build_model(model_kind(m)?, q, r)?)
}

/// `model-audit`: construct the model and re-run every structural check —
/// regularity, girth, sphere census, distance symmetry.
pub fn model_audit(resolved: &mut Resolved) -> Result<Output, CliError> {
    let model = build(resolved)?;
    let audit = model.audit();
    let mut out = verdict_output();
    out.csv_header = vec!["field", "value"];
    let as_json = serde_json::to_value(&audit)
        .map_err(|e| CliError::Io(format!("cannot serialize audit: {e}")))?;
    if let serde_json::Value::Object(map) = &as_json {
        for (key, value) in map {
            let text = match value {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.csv_rows.push(vec![key.clone(), text]);
        }
    }
    out.merge_struct(&audit)?;
    Ok(out)
}

/// `simulate`: `--trials` independent seeded runs of the simple random walk,
/// `--n` steps each, from chamber 0; reports the end-chamber distribution.
/// The seed fully determines the output at any worker count.
pub fn simulate(resolved: &mut Resolved) -> Result<Output, CliError> {
    let steps = resolved.need_n()?;
    let seed = resolved.need_seed()?;
    let trials = resolved.resolve_trials(1_000_000);
    let workers = worker_count()?;
    let model = build(resolved)?;
    let system = model.hecke_system::<Rational>();
    let walk = WalkSpec::simple(&system);
    let report = model.simulate(&walk, 0, steps, trials, seed, workers)?;
    let mut out = Output::new(crate::config::Format::Csv);
    out.csv_header = vec!["chamber-id", "point", "line", "probability", "weyl-word"];
    let group = model.group();
    let mut chambers = Vec::with_capacity(report.histogram.len());
    for (c, &count) in report.histogram.iter().enumerate() {
        let (point, line) = model.chamber(c as u32);
        let w = model.weyl_distance(0, c as u32);
        let word = word_name(group.word(w));
        let probability = count as f64 / trials as f64;
        out.csv_rows.push(vec![
            c.to_string(),
            point.to_string(),
            line.to_string(),
            fmt_f64(probability),
            word.clone(),
        ]);
        chambers.push(serde_json::json!({
            "chamber": c,
            "point": point,
            "line": line,
            "count": count,
            "probability": json_f64(probability),
            "weyl_word": word,
        }));
    }
    out.merge_struct(&report)?;
    out.set("start", 0);
    out.set("chambers", chambers);
    Ok(out)
}
