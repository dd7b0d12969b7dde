//! Acceptance suite: ten independent gates, one test per gate, each printing
//! a single `criterion NN: PASS/FAIL` line (visible under `--nocapture`; the
//! test names mirror the lines). Tolerances are pinned in the assertions.

use std::time::Instant;

use num_traits::{One, Zero};

use building_walks::affine::{
    audit_recursion_rows, exact_series, return_probability_series, C2Params,
    LatticeDistribution, QuadratureGrid,
};
use building_walks::coxeter::word_name;
use building_walks::hecke::{structure_constant, HeckeElement, WalkSpec};
use building_walks::models::{
    build_model, total_variation_from_uniform, IncidenceModel, ModelKind,
};
use building_walks::polygon::{
    feit_higman_check, parameter_constraints, quadrangle_srw_closed_form, char_inner_product,
    CharacterTable,
};
use building_walks::scalar::{scalar_pow, Scalar};
use building_walks::{Rational, Tower};

fn verdict(number: u32, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02}: {tag} — {detail}");
    assert!(pass, "criterion {number:02}: {detail}");
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn fano() -> IncidenceModel {
    build_model(ModelKind::ProjectivePlane, 2, 2).expect("Fano model")
}

fn quadrangle() -> IncidenceModel {
    build_model(ModelKind::SymplecticQuadrangle, 2, 2).expect("W(2) model")
}

/// Vertex classes with k + l <= 3, the spectral comparison set.
fn near_targets() -> Vec<(u64, u64)> {
    let mut targets = Vec::new();
    for total in 0..=3u64 {
        for l in 0..=total {
            targets.push((total - l, l));
        }
    }
    targets
}

#[test]
fn criterion_01_three_way_pn_agreement() {
    let start = Instant::now();
    let mut max_char_gap = 0.0f64;
    for (model, expected_chambers) in [(fano(), 21usize), (quadrangle(), 45)] {
        assert_eq!(model.chamber_count(), expected_chambers);
        let sys = model.hecke_system::<Rational>();
        let walk = WalkSpec::simple(&sys);
        let tower_sys = model.hecke_system::<Tower>();
        let tower_walk = WalkSpec::simple(&tower_sys);
        let characters = CharacterTable::new(&tower_sys)
            .expect("character table")
            .pn_series(&tower_walk, 20)
            .expect("character series");
        let op = walk.operator();
        let mut power = HeckeElement::identity(&sys);
        for n in 0..=20u32 {
            if n > 0 {
                power = power.mul(&op);
            }
            // Algebraic route vs brute force: exact equality, chamber by chamber.
            let evolution = model.exact_evolution(&walk, 0, n).expect("evolution");
            for (y, p_brute) in evolution.iter().enumerate() {
                let w = model.weyl_distance(0, y as u32);
                assert_eq!(
                    &power.point_probability(w),
                    p_brute,
                    "hecke vs model at n={n}, chamber {y}"
                );
            }
            // Character route: within 1e-10 of the algebraic route, every w.
            for w in sys.group().elements() {
                let gap = (characters[n as usize][w].to_f64_approx()
                    - power.point_probability(w).to_f64_approx())
                .abs();
                max_char_gap = max_char_gap.max(gap);
                assert!(
                    gap <= 1e-10,
                    "character route off by {gap:.3e} at n={n}, w={}",
                    word_name(sys.group().word(w))
                );
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        1,
        elapsed < 10.0,
        &format!(
            "hecke/character/brute-force routes agree on 21- and 45-chamber models for n <= 20 \
             (exact algebra/model equality; max character gap {max_char_gap:.2e}; {elapsed:.1}s < 10s)"
        ),
    );
}

#[test]
fn criterion_02_quadrangle_closed_form() {
    let model = quadrangle();
    let sys = model.hecke_system::<Rational>();
    let walk = WalkSpec::simple(&sys);
    let two = rat(2, 1);
    // Reconstruction from the displayed constants: multiplicities (16, 5, 5, 9)
    // against eigenvalues -1/2, 1/4, 1/4 and the pair (3/4, -1/4).
    let constants = |n: u32| -> Rational {
        let n = n as u64;
        (Rational::one()
            + rat(16, 1) * scalar_pow(&rat(-1, 2), n)
            + rat(10, 1) * scalar_pow(&rat(1, 4), n)
            + rat(9, 1) * (scalar_pow(&rat(3, 4), n) + scalar_pow(&rat(-1, 4), n)))
            / rat(45, 1)
    };
    for n in 0..=30u32 {
        let closed = quadrangle_srw_closed_form(&two, &two, n).expect("closed form");
        let brute = model.exact_evolution(&walk, 0, n).expect("evolution");
        assert_eq!(
            closed.p_n_oo, brute[0],
            "closed form vs 45x45 matrix power at n={n}"
        );
        assert_eq!(
            closed.p_n_oo,
            constants(n),
            "closed form vs pinned spectral constants at n={n}"
        );
    }
    let p0 = quadrangle_srw_closed_form(&two, &two, 0).expect("p0").p_n_oo;
    let p1 = quadrangle_srw_closed_form(&two, &two, 1).expect("p1").p_n_oo;
    assert!(p0.is_one(), "p0 = {p0}");
    assert!(p1.is_zero(), "p1 = {p1}");
    verdict(
        2,
        true,
        "closed form equals the 45x45 matrix power exactly for n <= 30 (tolerance 1e-10 \
         subsumed), p0 = 1 and p1 = 0 exact, constants k = (16,5,5,9) with eigenvalues \
         -1/2, 1/4, 1/4, (3/4, -1/4) reproduce the curve exactly",
    );
}

#[test]
fn criterion_03_mixing_bound_dominance() {
    for (name, model) in [("plane", fano()), ("quadrangle", quadrangle())] {
        let sys = model.hecke_system::<Rational>();
        let walk = WalkSpec::simple(&sys);
        let tower_sys = model.hecke_system::<Tower>();
        let tower_walk = WalkSpec::simple(&tower_sys);
        let bound_sq = CharacterTable::new(&tower_sys)
            .expect("character table")
            .tv_bound_squared_series(&tower_walk, 50)
            .expect("bound series");
        let tv: Vec<Rational> = (0..=50u32)
            .map(|n| {
                let dist = model.exact_evolution(&walk, 0, n).expect("evolution");
                total_variation_from_uniform(&dist)
            })
            .collect();
        let bound_sq: Vec<Rational> = bound_sq
            .iter()
            .map(|b| {
                b.as_exact_rational()
                    .expect("bound is rational at these parameters")
            })
            .collect();
        for n in 1..=50usize {
            // Dominance, exactly: tv^2 <= bound^2 (both sides nonnegative).
            assert!(
                tv[n].clone() * tv[n].clone() <= bound_sq[n],
                "{name}: tv {} > bound {} at n={n}",
                tv[n].to_f64_approx(),
                bound_sq[n].to_f64_approx().sqrt()
            );
            // Monotone decay beyond the first few steps.
            if n >= 5 {
                assert!(tv[n] <= tv[n - 1], "{name}: tv rose at n={n}");
                assert!(
                    bound_sq[n] <= bound_sq[n - 1],
                    "{name}: bound rose at n={n}"
                );
            }
        }
        let final_tv = tv[50].to_f64_approx();
        let final_bound = bound_sq[50].to_f64_approx().sqrt();
        assert!(
            final_tv < 1e-4 && final_bound < 1e-3,
            "{name}: tv(50) = {final_tv:.2e}, bound(50) = {final_bound:.2e} — not mixing"
        );
    }
    verdict(
        3,
        true,
        "exact TV <= spectral bound for every n in [1,50] on both models (exact rational \
         comparison), both monotone decreasing from n = 5 and near zero at n = 50",
    );
}

#[test]
fn criterion_04_multiplicity_integrality() {
    // m = 4, (2,2): multiplicities (1, 16, 5, 5, 9), sum m_rho * dim = 45.
    let quad_sys = quadrangle().hecke_system::<Tower>();
    let table = CharacterTable::new(&quad_sys).expect("W(2) table");
    let mut mults: Vec<(usize, Rational)> = (0..table.irreps().len())
        .map(|i| {
            let m = table
                .multiplicity(i)
                .as_exact_rational()
                .expect("multiplicity is rational");
            (table.irreps()[i].dim(), m)
        })
        .collect();
    let total: Rational = mults
        .iter()
        .map(|(dim, m)| rat(*dim as i64, 1) * m.clone())
        .fold(Rational::zero(), |a, b| a + b);
    assert_eq!(total, rat(45, 1), "sum of m_rho * dim over W(2)");
    mults.sort_by(|a, b| a.1.cmp(&b.1));
    let flat: Vec<Rational> = mults.into_iter().map(|(_, m)| m).collect();
    assert_eq!(
        flat,
        vec![rat(1, 1), rat(5, 1), rat(5, 1), rat(9, 1), rat(16, 1)],
        "W(2) multiplicities"
    );

    // m = 3, q = 2: sum m_rho * dim = 21.
    let fano_sys = fano().hecke_system::<Tower>();
    let fano_table = CharacterTable::new(&fano_sys).expect("Fano table");
    let fano_total: Rational = (0..fano_table.irreps().len())
        .map(|i| {
            rat(fano_table.irreps()[i].dim() as i64, 1)
                * fano_table
                    .multiplicity(i)
                    .as_exact_rational()
                    .expect("rational multiplicity")
        })
        .fold(Rational::zero(), |a, b| a + b);
    assert_eq!(fano_total, rat(21, 1), "sum of m_rho * dim over the plane");

    // <chi_1, chi_1> from the bilinear-form definition equals the closed form:
    // 10/45 at m = 4, (2,2) — exactly in the tower, to 1e-12 in float.
    let chi_1 = (0..table.irreps().len())
        .find(|&i| table.irreps()[i].dim() == 2)
        .expect("a two-dimensional irrep");
    let values = table.character_values(chi_1);
    let inner = char_inner_product(&quad_sys, values, values).expect("inner product");
    assert_eq!(
        inner.as_exact_rational(),
        Some(rat(10, 45)),
        "tower-exact <chi_1, chi_1>"
    );
    let float_report = feit_higman_check(4, 2, 2).expect("float report");
    let two_dim = &float_report.two_dimensional[0];
    assert!(
        (two_dim.scaled_norm_definition - two_dim.scaled_norm_closed_form).abs() <= 1e-12,
        "definition vs closed form: {} vs {}",
        two_dim.scaled_norm_definition,
        two_dim.scaled_norm_closed_form
    );
    assert!((two_dim.scaled_norm_definition - 10.0).abs() <= 1e-12);
    verdict(
        4,
        true,
        "multiplicities (1,16,5,5,9) with sum m*dim = 45 exact; plane sum = 21 exact; \
         <chi_1,chi_1> = 10/45 exactly in the tower and definition == closed form to 1e-12 \
         in float",
    );
}

#[test]
fn criterion_05_feit_higman_and_parameter_constraints() {
    for (m, q, r) in [(5u32, 2u64, 2u64), (7, 2, 2), (12, 3, 3)] {
        let check = feit_higman_check(m, q, r).expect("check runs");
        assert!(!check.admissible, "({m},{q},{r}) should be rejected");
    }
    let catalogue = [
        (2u32, 2u64, 3u64),
        (3, 2, 2),
        (3, 3, 3),
        (4, 2, 2),
        (4, 2, 4),
        (4, 3, 3),
        (6, 2, 2),
        (6, 3, 3),
        (8, 2, 4),
        (8, 4, 2),
    ];
    for (m, q, r) in catalogue {
        let check = feit_higman_check(m, q, r).expect("check runs");
        assert!(check.admissible, "({m},{q},{r}) should be accepted");
    }
    let brc = parameter_constraints(3, 6, 6).expect("plane constraints");
    assert!(
        brc.iter().any(|c| !c.satisfied),
        "(3,6) must fail Bruck-Ryser-Chowla"
    );
    let hexagon = parameter_constraints(6, 2, 3).expect("hexagon constraints");
    assert!(
        hexagon.iter().any(|c| !c.satisfied),
        "(6,2,3) must fail the sqrt(qr) integrality condition"
    );
    verdict(
        5,
        true,
        "pentagon/heptagon/(12,3,3) rejected; digon through octagon catalogue pairs accepted; \
         (3,6) fails Bruck-Ryser-Chowla and (6,2,3) fails sqrt(qr) integrality",
    );
}

#[test]
fn criterion_06_structure_constant_oracle() {
    let start = Instant::now();
    let mut checked = 0usize;
    for model in [fano(), quadrangle()] {
        let sys = model.hecke_system::<Rational>();
        let group = sys.group();
        for w in group.elements() {
            // One representative pair per Weyl distance; independence from the
            // pair is separately guaranteed by the model's homogeneity audit.
            let y = model.sphere(0, w)[0];
            for u in group.elements() {
                for v in group.elements() {
                    let algebraic = structure_constant(&sys, u, v, w);
                    let count = model.intersection_count(0, y, u, v);
                    let geometric = rat(count as i64, 1) * sys.q_w(w).clone()
                        / (sys.q_w(u).clone() * sys.q_w(v).clone());
                    assert_eq!(
                        algebraic,
                        geometric,
                        "c_(u,v)^w mismatch at u={u}, v={v}, w={w}"
                    );
                    checked += 1;
                }
            }
        }
        // The identity coefficient: c_(u,v)^e = q_u^{-1} when v = u^{-1}, else 0.
        for u in group.elements() {
            for v in group.elements() {
                let c_e = structure_constant(&sys, u, v, 0);
                let expected = if v == group.inverse(u) {
                    sys.q_w_inv(u).clone()
                } else {
                    Rational::zero()
                };
                assert_eq!(c_e, expected, "c_(u,v)^e at u={u}, v={v}");
            }
        }
    }
    verdict(
        6,
        true,
        &format!(
            "every Hecke structure constant matches the chamber-counting formula on both \
             explicit models ({checked} triples) and c_(u,v)^e = q_u^-1 * delta(u, v^-1); \
             {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_07_c2_recursion_spectral_agreement() {
    let start = Instant::now();
    let params = C2Params::<f64>::new(2.0, 2.0).expect("parameters");
    let walk: LatticeDistribution<f64> = LatticeDistribution::delta(0, 1);
    let targets = near_targets();
    let exact = exact_series(&params, &walk, 20).expect("recursion series");
    let grid = QuadratureGrid::new(200, 200).expect("grid");
    let spectral = params
        .pn_spectral_series(&walk, 20, &targets, &grid)
        .expect("spectral series");
    let mut max_diff = 0.0f64;
    for (n, per_target) in spectral.iter().enumerate() {
        for (slot, &(k, l)) in targets.iter().enumerate() {
            let p_exact = exact[n].coefficient(k, l) / params.vertex_count(k, l);
            let diff = (per_target[slot] - p_exact).abs();
            max_diff = max_diff.max(diff);
            assert!(
                diff < 1e-6,
                "spectral vs recursion at n={n}, (k,l)=({k},{l}): diff {diff:.3e}"
            );
        }
    }
    let mut defects = Vec::new();
    for side in [50u32, 100, 200] {
        let g = QuadratureGrid::new(side, side).expect("grid");
        defects.push(params.orthogonality_check(&g, 3).expect("orthogonality"));
    }
    assert!(
        defects[0] > defects[1] && defects[1] > defects[2],
        "orthogonality defect should fall under refinement: {defects:?}"
    );
    assert!(
        defects[2] < 1e-6,
        "orthogonality defect at 200^2: {:.3e}",
        defects[2]
    );
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        7,
        elapsed < 60.0,
        &format!(
            "recursion and quadrature agree to {max_diff:.2e} (< 1e-6) for n <= 20, k+l <= 3; \
             orthogonality defect falls {:.2e} -> {:.2e} -> {:.2e} under 50^2 -> 100^2 -> 200^2 \
             ({elapsed:.1}s < 60s)",
            defects[0], defects[1], defects[2]
        ),
    );
}

#[test]
fn criterion_08_c2_local_limit_trend() {
    let start = Instant::now();
    let params = C2Params::<f64>::new(2.0, 2.0).expect("parameters");
    let rho = params.srw_spectral_radius();
    assert!(
        (rho - 8.0 * 2.0f64.sqrt() / 15.0).abs() < 1e-15,
        "rho = {rho}"
    );
    let returns =
        return_probability_series(&params, &LatticeDistribution::delta(0, 1), 400)
            .expect("return series");
    let mut gaps = Vec::new();
    println!("criterion 08 evidence: exact p^(2n)(x,x) vs asymptote C*rho^(2n)*n^-5");
    for n in [50u64, 100, 200] {
        let exact = returns[2 * n as usize];
        let (_, asymptote) = params.srw_llt_asymptote(n).expect("asymptote");
        let ratio = exact / asymptote;
        println!("  n = {n:4}: ratio = {ratio:.4}, |ratio - 1| = {:.4}", (ratio - 1.0).abs());
        assert!(ratio.is_finite() && ratio > 0.0, "ratio at n={n}: {ratio}");
        gaps.push((ratio - 1.0).abs());
    }
    assert!(
        gaps[0] > gaps[1] && gaps[1] > gaps[2],
        "|ratio - 1| should decrease across n in {{50, 100, 200}}: {gaps:?}"
    );
    // Long-horizon confirmation that the asymptote itself is right: the same
    // ratio through the underflow-safe quadrature form keeps climbing to 1.
    let fine = QuadratureGrid::new(384, 384).expect("grid");
    for (n, need_above) in [(600u64, 0.75), (1000, 0.85), (4000, 0.95)] {
        let ratio = params.srw_llt_ratio(n, &fine).expect("quadrature ratio");
        println!("  n = {n:4}: quadrature ratio = {ratio:.4}");
        assert!(
            ratio > need_above && ratio < 1.0,
            "quadrature ratio at n={n}: {ratio}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "criterion 8 runtime {elapsed:.0}s");
    let final_gap = gaps[2];
    verdict(
        8,
        final_gap < 0.2,
        &format!(
            "ratio finite, positive, and |ratio - 1| decreasing across n in {{50,100,200}} \
             (0.80 -> 0.62 -> 0.42), and the asymptote is confirmed independently \
             (quadrature ratio 0.97 by n = 4000, corrections ~ 129/n); but \
             |ratio - 1| = {final_gap:.3} at n = 200 is not < 0.2 — the first-order \
             correction term still dominates there, and the 0.2 threshold is first met \
             near n = 650 ({elapsed:.0}s < 300s)"
        ),
    );
}

#[test]
fn criterion_09_monte_carlo_calibration() {
    let model = fano();
    let sys = model.hecke_system::<Rational>();
    let walk = WalkSpec::simple(&sys);
    let trials = 1_000_000u64;
    let seed = 20260816u64;
    let single = model
        .simulate(&walk, 0, 5, trials, seed, 1)
        .expect("single-worker run");
    let many = model
        .simulate(&walk, 0, 5, trials, seed, 7)
        .expect("seven-worker run");
    assert_eq!(
        single.histogram, many.histogram,
        "identical seeds must give identical histograms at any worker count"
    );
    let exact = model.exact_evolution(&walk, 0, 5).expect("exact law");
    let mut worst = 0.0f64;
    for (y, p) in exact.iter().enumerate() {
        let p = p.to_f64_approx();
        let mean = trials as f64 * p;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        let gap = (single.histogram[y] as f64 - mean).abs();
        worst = worst.max(gap / sd);
        assert!(
            gap <= 5.0 * sd,
            "chamber {y}: observed {} vs expected {mean:.1} ({:.2} SDs)",
            single.histogram[y],
            gap / sd
        );
    }
    verdict(
        9,
        true,
        &format!(
            "10^6 seeded trials on the Fano plane: every chamber within 5 binomial SDs of the \
             exact 5-step law (worst {worst:.2} SDs); histograms byte-identical at 1 and 7 \
             workers"
        ),
    );
}

#[test]
fn criterion_10_recursion_row_constant_preservation() {
    let audits = audit_recursion_rows();
    assert_eq!(audits.len(), 10, "six A_(1,0) rows plus four A_(0,1) rows");
    for audit in &audits {
        assert!(
            audit.preserves_total,
            "{} row {} fails the N-weighted coefficient-sum identity",
            audit.generator,
            audit.case
        );
    }
    verdict(
        10,
        true,
        "all 10 recursion rows satisfy the N-weighted coefficient-sum identity symbolically \
         in (q, r)",
    );
}
