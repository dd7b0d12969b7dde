//! Curve commands on the rank-2 (polygon) geometries: character-sum
//! transition curves, mixing distance vs. its spectral bound, and the
//! quadrangle closed form.

use building_walks::coxeter::word_name;
use building_walks::hecke::WalkSpec;
use building_walks::polygon::{quadrangle_srw_closed_form, CharacterTable};
use building_walks::report::fmt_f64;
use building_walks::scalar::Scalar;
use building_walks::{Rational, Tower};

use super::{csv_scalar, curve_output, dihedral_system, json_f64, json_scalar, require_fixed_m};
use crate::config::{Mode, Resolved};
use crate::emit::Output;
use crate::CliError;

fn abs_scalar<S: Scalar>(x: S) -> S {
    if x.is_nonnegative() {
        x
    } else {
        S::zero() - x
    }
}

/// `polygon-pn`: for the simple random walk, every step `0..=n` and every
/// Weyl distance w, the sphere mass `a_w` and the per-chamber probability
/// `p_w`. The `a_w` column sums to 1 within each step block.
pub fn polygon_pn(resolved: &mut Resolved) -> Result<Output, CliError> {
    let m = resolved.need_m()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let n = resolved.need_n()?;
    let mode = resolved.resolve_mode(Mode::Rational);
    let mut out = curve_output();
    out.csv_header = vec!["n", "word", "a_w", "p_w"];
    let rows = match mode {
        Mode::Rational => pn_rows::<Tower>(m, q, r, n)?,
        Mode::Float => pn_rows::<f64>(m, q, r, n)?,
    };
    let mut json_rows = Vec::with_capacity(rows.len());
    for row in rows {
        out.csv_rows
            .push(vec![row.n.to_string(), row.word.clone(), row.a_csv, row.p_csv]);
        json_rows.push(serde_json::json!({
            "n": row.n,
            "word": row.word,
            "a_w": row.a_json,
            "p_w": row.p_json,
        }));
    }
    out.set("rows", json_rows);
    Ok(out)
}

struct PnRow {
    n: u32,
    word: String,
    a_csv: String,
    p_csv: String,
    a_json: serde_json::Value,
    p_json: serde_json::Value,
}

fn pn_rows<S: Scalar>(m: u32, q: u64, r: u64, n: u32) -> Result<Vec<PnRow>, CliError> {
    let system = dihedral_system::<S>(m, q, r)?;
    let table = CharacterTable::new(&system)?;
    let walk = WalkSpec::simple(&system);
    let series = table.pn_series(&walk, n)?;
    let group = system.group();
    let mut rows = Vec::new();
    for (step, per_w) in series.iter().enumerate() {
        for w in group.elements() {
            let p = &per_w[w];
            let a = p.clone() * system.q_w(w).clone();
            rows.push(PnRow {
                n: step as u32,
                word: word_name(group.word(w)),
                a_csv: csv_scalar(&a),
                p_csv: csv_scalar(p),
                a_json: json_scalar(&a),
                p_json: json_scalar(p),
            });
        }
    }
    Ok(rows)
}

/// `polygon-mix`: per step, the return probability, the exact total-variation
/// distance to uniform, and the spectral TV upper bound. The bound dominates
/// the exact distance on every row.
pub fn polygon_mix(resolved: &mut Resolved) -> Result<Output, CliError> {
    let m = resolved.need_m()?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let n = resolved.need_n()?;
    let mode = resolved.resolve_mode(Mode::Rational);
    let mut out = curve_output();
    out.csv_header = vec!["n", "p_n_oo", "tv_exact", "tv_bound"];
    let rows = match mode {
        Mode::Rational => mix_rows::<Tower>(m, q, r, n)?,
        Mode::Float => mix_rows::<f64>(m, q, r, n)?,
    };
    let mut json_rows = Vec::with_capacity(rows.len());
    for row in rows {
        out.csv_rows.push(vec![
            row.n.to_string(),
            row.p_csv,
            row.tv_csv,
            fmt_f64(row.tv_bound),
        ]);
        json_rows.push(serde_json::json!({
            "n": row.n,
            "p_n_oo": row.p_json,
            "tv_exact": row.tv_json,
            "tv_bound": json_f64(row.tv_bound),
        }));
    }
    out.set("rows", json_rows);
    Ok(out)
}

struct MixRow {
    n: u32,
    p_csv: String,
    p_json: serde_json::Value,
    tv_csv: String,
    tv_json: serde_json::Value,
    tv_bound: f64,
}

fn mix_rows<S: Scalar>(m: u32, q: u64, r: u64, n: u32) -> Result<Vec<MixRow>, CliError> {
    let system = dihedral_system::<S>(m, q, r)?;
    let table = CharacterTable::new(&system)?;
    let walk = WalkSpec::simple(&system);
    let series = table.pn_series(&walk, n)?;
    let bounds_sq = table.tv_bound_squared_series(&walk, n)?;
    let group = system.group();
    let uniform = system.poincare().recip();
    let half = S::ratio(1, 2);
    let mut rows = Vec::new();
    for (step, per_w) in series.iter().enumerate() {
        let mut tv = S::zero();
        for w in group.elements() {
            let gap = abs_scalar(per_w[w].clone() - uniform.clone());
            tv = tv + system.q_w(w).clone() * gap;
        }
        let tv = half.clone() * tv;
        let tv_bound = bounds_sq[step].to_f64_approx().max(0.0).sqrt();
        rows.push(MixRow {
            n: step as u32,
            p_csv: csv_scalar(&per_w[0]),
            p_json: json_scalar(&per_w[0]),
            tv_csv: csv_scalar(&tv),
            tv_json: json_scalar(&tv),
            tv_bound,
        });
    }
    Ok(rows)
}

/// `quadrangle-closed-form`: the m = 4 simple-random-walk return probability
/// and TV bound from the eigenvalue closed form, no matrices involved.
pub fn quadrangle_closed_form(resolved: &mut Resolved) -> Result<Output, CliError> {
    require_fixed_m(resolved, 4)?;
    let q = resolved.need_q()?;
    let r = resolved.need_r()?;
    let n = resolved.need_n()?;
    let mode = resolved.resolve_mode(Mode::Rational);
    let mut out = curve_output();
    out.csv_header = vec!["n", "p_n_oo", "tv_bound"];
    let rows = match mode {
        Mode::Rational => closed_form_rows::<Rational>(q, r, n)?,
        Mode::Float => closed_form_rows::<f64>(q, r, n)?,
    };
    let mut json_rows = Vec::with_capacity(rows.len());
    for row in rows {
        out.csv_rows
            .push(vec![row.n.to_string(), row.p_csv, fmt_f64(row.tv_bound)]);
        json_rows.push(serde_json::json!({
            "n": row.n,
            "p_n_oo": row.p_json,
            "tv_bound_squared": row.tv_sq_json,
            "tv_bound": json_f64(row.tv_bound),
        }));
    }
    out.set("rows", json_rows);
    Ok(out)
}

struct ClosedFormRow {
    n: u32,
    p_csv: String,
    p_json: serde_json::Value,
    tv_sq_json: serde_json::Value,
    tv_bound: f64,
}

fn closed_form_rows<S: Scalar>(q: u64, r: u64, n: u32) -> Result<Vec<ClosedFormRow>, CliError> {
    let qs = S::from_u64(q);
    let rs = S::from_u64(r);
    let mut rows = Vec::with_capacity(n as usize + 1);
    for step in 0..=n {
        let value = quadrangle_srw_closed_form(&qs, &rs, step)?;
        rows.push(ClosedFormRow {
            n: step,
            p_csv: csv_scalar(&value.p_n_oo),
            p_json: json_scalar(&value.p_n_oo),
            tv_sq_json: json_scalar(&value.tv_bound_squared),
            tv_bound: value.tv_bound(),
        });
    }
    Ok(rows)
}
