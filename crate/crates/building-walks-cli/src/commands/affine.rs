//! C2-tilde vertex-walk commands: the exact recursion route, the Plancherel
//! quadrature route, and the local-limit report. The walk is the vertex
//! simple random walk (a uniform step on the nearest special vertices).

use building_walks::affine::{
    exact_series, return_probability_series, C2Params, LatticeDistribution, QuadratureGrid,
};
use building_walks::report::fmt_f64;
use building_walks::scalar::Scalar;
use building_walks::Rational;

use super::{csv_scalar, curve_output, json_f64, json_scalar, verdict_output};
use crate::config::{Mode, Resolved};
use crate::emit::Output;
use crate::CliError;

fn srw<S: Scalar>() -> LatticeDistribution<S> {
    LatticeDistribution::delta(0, 1)
}

/// `c2-exact`: operator coefficients `a_kl` and per-vertex probabilities `p`
/// for every step `0..=n`, by the exact vertex-set recursion. The `a_kl`
/// column sums to 1 within each step block.
pub fn c2_exact(resolved: &mut Resolved) -> Result<Output, CliError> {
    let mode = resolved.resolve_mode(Mode::Rational);
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let n = resolved.need_n()?;
    let mut out = curve_output();
    out.csv_header = vec!["n", "k", "l", "a_kl", "p"];
    let rows = match mode {
        Mode::Rational => exact_rows::<Rational>(q, r, n)?,
        Mode::Float => exact_rows::<f64>(q, r, n)?,
    };
    let mut json_rows = Vec::with_capacity(rows.len());
    for row in rows {
        out.csv_rows.push(vec![
            row.n.to_string(),
            row.k.to_string(),
            row.l.to_string(),
            row.a_csv,
            row.p_csv,
        ]);
        json_rows.push(serde_json::json!({
            "n": row.n,
            "k": row.k,
            "l": row.l,
            "a_kl": row.a_json,
            "p": row.p_json,
        }));
    }
    out.set("rows", json_rows);
    Ok(out)
}

struct ExactRow {
    n: u32,
    k: u64,
    l: u64,
    a_csv: String,
    p_csv: String,
    a_json: serde_json::Value,
    p_json: serde_json::Value,
}

fn exact_rows<S: Scalar>(q: u64, r: u64, n: u32) -> Result<Vec<ExactRow>, CliError> {
    let params = C2Params::new(S::from_u64(q), S::from_u64(r))?;
    let series = exact_series(&params, &srw(), n)?;
    let mut rows = Vec::new();
    for (step, dist) in series.iter().enumerate() {
        for (&(k, l), a) in dist.iter() {
            let p = a.clone() / params.vertex_count(k, l);
            rows.push(ExactRow {
                n: step as u32,
                k,
                l,
                a_csv: csv_scalar(a),
                p_csv: csv_scalar(&p),
                a_json: json_scalar(a),
                p_json: json_scalar(&p),
            });
        }
    }
    Ok(rows)
}

/// Targets for the spectral table: every vertex class with `k + l <= 3`,
/// ordered by distance then by k descending.
fn spectral_targets() -> Vec<(u64, u64)> {
    let mut targets = Vec::new();
    for total in 0..=3u64 {
        for l in 0..=total {
            targets.push((total - l, l));
        }
    }
    targets
}

/// `c2-spectral`: per-vertex probabilities `p^(n)(x, y)` for `y` in the
/// classes with `k + l <= 3`, by spherical-transform quadrature over the
/// two-torus. Floating point by construction.
pub fn c2_spectral(resolved: &mut Resolved) -> Result<Output, CliError> {
    resolved.require_float_mode()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let n = resolved.need_n()?;
    let (n1, n2) = resolved.resolve_grid((200, 200));
    let params = C2Params::<f64>::new(q as f64, r as f64)?;
    let grid = QuadratureGrid::new(n1, n2)?;
    let targets = spectral_targets();
    let series = params.pn_spectral_series(&srw(), n, &targets, &grid)?;
    let mut out = curve_output();
    out.csv_header = vec!["n", "k", "l", "p"];
    let mut json_rows = Vec::new();
    for (step, per_target) in series.iter().enumerate() {
        for (slot, &(k, l)) in targets.iter().enumerate() {
            let p = per_target[slot];
            out.csv_rows.push(vec![
                step.to_string(),
                k.to_string(),
                l.to_string(),
                fmt_f64(p),
            ]);
            json_rows.push(serde_json::json!({
                "n": step,
                "k": k,
                "l": l,
                "p": json_f64(p),
            }));
        }
    }
    out.set("rows", json_rows);
    Ok(out)
}

/// Ratio-table checkpoints: a fixed ladder clipped to the horizon, always
/// ending at the horizon itself.
fn checkpoints(n: u32) -> Vec<u32> {
    let mut points: Vec<u32> = [12u32, 25, 50, 100, 200, 300, 400, 500, 600, 800, 1000]
        .into_iter()
        .filter(|&c| c < n)
        .collect();
    points.push(n);
    points
}

/// `c2-llt`: the SRW spectral radius, the return-probability asymptote
/// constant, and the exact/asymptote ratio at checkpoints up to `n` — the
/// exact side from the recursion route, run in floating point so long
/// horizons stay cheap.
pub fn c2_llt(resolved: &mut Resolved) -> Result<Output, CliError> {
    resolved.require_float_mode()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let n = resolved.need_n()?;
    if n == 0 {
        return Err(CliError::Usage(
            "`c2-llt` needs a horizon --n of at least 1".to_string(),
        ));
    }
    let params = C2Params::<f64>::new(q as f64, r as f64)?;
    let rho = params.srw_spectral_radius();
    // The asymptote is C·rho^(2n)·n^(-5); recover C from the n = 1 value.
    let (_, asym_1) = params.srw_llt_asymptote(1)?;
    let constant = asym_1 / (rho * rho);
    let returns = return_probability_series(&params, &srw::<f64>(), 2 * n)?;
    let mut out = verdict_output();
    out.comment("rho", fmt_f64(rho));
    out.comment("constant", fmt_f64(constant));
    out.csv_header = vec!["n", "p_2n_exact", "asymptote", "ratio"];
    let mut table = Vec::new();
    for cp in checkpoints(n) {
        let exact = returns[2 * cp as usize];
        let (_, asymptote) = params.srw_llt_asymptote(cp as u64)?;
        let ratio = exact / asymptote;
        out.csv_rows.push(vec![
            cp.to_string(),
            fmt_f64(exact),
            fmt_f64(asymptote),
            fmt_f64(ratio),
        ]);
        table.push(serde_json::json!({
            "n": cp,
            "p_2n_exact": json_f64(exact),
            "asymptote": json_f64(asymptote),
            "ratio": json_f64(ratio),
        }));
    }
    out.set("rho", json_f64(rho));
    out.set("constant", json_f64(constant));
    out.set("table", table);
    Ok(out)
}
