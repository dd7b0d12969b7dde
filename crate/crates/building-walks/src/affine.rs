//! Isotropic walks on the special vertices of a thick C̃₂ building, computed
//! two independent ways.
//!
//! **Recursion route** (exact in any scalar): the averaging operators
//! `A_{k,l}` over the spheres `V_{k,l}(x)` satisfy closed convolution rules
//! when multiplied by the two generator averages `A_{1,0}` and `A_{0,1}`.
//! Those rules are stored symbolically (polynomials in the thickness
//! parameters `q`, `r`), so the same table drives the numeric evolution and
//! the constant-preservation audit.
//!
//! **Spectral route** (`f64`): the Gelfand transform sends `A_{k,l}` to an
//! explicit symmetrized Laurent sum `Â_{k,l}` over the two-torus, and n-step
//! probabilities become Plancherel integrals evaluated by uniform (trapezoid)
//! quadrature with irrational phase offsets that keep every node off the
//! singular set of the `c`-function.
//!
//! The long-horizon simple-random-walk return probability has a local-limit
//! asymptote `C·ρ²ⁿ·n⁻⁵` whose constants are computed here as well.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex;

use crate::error::Error;
use crate::scalar::{scalar_pow, Scalar};
use crate::{Complex64, Result};

// ---------------------------------------------------------------------------
// Symbolic polynomials in the two thickness parameters.
// ---------------------------------------------------------------------------

/// Sparse polynomial in `q`, `r` with integer coefficients, keyed by
/// `(deg_q, deg_r)`. Just enough algebra to state the recursion rows once and
/// both audit them symbolically and evaluate them in any scalar.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly2 {
    terms: BTreeMap<(u32, u32), i64>,
}

impl Poly2 {
    fn zero() -> Self {
        Poly2 {
            terms: BTreeMap::new(),
        }
    }

    /// The monomial `c·q^i·r^j`.
    fn term(c: i64, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert((i, j), c);
        }
        Poly2 { terms }
    }

    fn one() -> Self {
        Poly2::term(1, 0, 0)
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&key, &c) in &other.terms {
            let entry = terms.entry(key).or_insert(0);
            *entry += c;
            if *entry == 0 {
                terms.remove(&key);
            }
        }
        Poly2 { terms }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.mul(&Poly2::term(-1, 0, 0)))
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                let key = (i1 + i2, j1 + j2);
                let entry = terms.entry(key).or_insert(0);
                *entry += c1 * c2;
                if *entry == 0 {
                    terms.remove(&key);
                }
            }
        }
        Poly2 { terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn eval<S: Scalar>(&self, q: &S, r: &S) -> S {
        let mut acc = S::zero();
        for (&(i, j), &c) in &self.terms {
            acc = acc
                + S::from_i64(c) * scalar_pow(q, i as u64) * scalar_pow(r, j as u64);
        }
        acc
    }
}

fn p_one() -> Poly2 {
    Poly2::one()
}
fn p_q() -> Poly2 {
    Poly2::term(1, 1, 0)
}
fn p_r() -> Poly2 {
    Poly2::term(1, 0, 1)
}
fn p_qr() -> Poly2 {
    Poly2::term(1, 1, 1)
}

/// `N_{1,0} = q(r+1)(qr+1)` as a polynomial.
fn n10_poly() -> Poly2 {
    p_q()
        .mul(&p_r().add(&p_one()))
        .mul(&p_qr().add(&p_one()))
}

/// `N_{0,1} = (q+1)(qr+1)` as a polynomial.
fn n01_poly() -> Poly2 {
    p_q().add(&p_one()).mul(&p_qr().add(&p_one()))
}

// ---------------------------------------------------------------------------
// The recursion rows.
// ---------------------------------------------------------------------------

/// Which generator average a distribution is multiplied by on the right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// `A_{1,0}`: average over the `N_{1,0}` vertices at distance (1,0).
    A10,
    /// `A_{0,1}`: average over the `N_{0,1}` vertices at distance (0,1).
    A01,
}

impl Generator {
    fn label(self) -> &'static str {
        match self {
            Generator::A10 => "A_(1,0)",
            Generator::A01 => "A_(0,1)",
        }
    }
}

/// One convolution rule: `N · A_{m,n} · A_gen = Σ coeff · A_{m+dm, n+dn}`,
/// valid on the stated `(m, n)` region, where `N` is the sphere size of the
/// generator.
struct RowSpec {
    generator: Generator,
    case: &'static str,
    terms: Vec<(i64, i64, Poly2)>,
}

/// The six `A_{1,0}` rows in classification order: the classes are
/// `(0,0)`, `(0,1)`, `(0,n≥2)`, `(m≥1,0)`, `(m≥1,1)`, `(m≥1,n≥2)`.
///
/// The `(0,1)` row is not a primitive rule: it is forced by commutativity of
/// the two generator averages together with the `(m≥1,0)` rule for `A_{0,1}`
/// (see `derived_row_matches_commutativity` below), and equals
/// `N_{1,0}·A_{0,1}A_{1,0} = q(r+1)·A_{0,1} + q²r(r+1)·A_{1,1}`.
fn a10_rows() -> Vec<RowSpec> {
    let one = p_one();
    let q = p_q();
    let r = p_r();
    let qr = p_qr();
    let r1 = r.add(&one); // r + 1
    let q_minus = q.sub(&one); // q - 1
    let q2r2 = Poly2::term(1, 2, 2);
    let q2r = Poly2::term(1, 2, 1);
    vec![
        RowSpec {
            generator: Generator::A10,
            case: "m = 0, n = 0 (unit)",
            terms: vec![(1, 0, n10_poly())],
        },
        RowSpec {
            generator: Generator::A10,
            case: "m = 0, n = 1 (derived from commutativity)",
            terms: vec![(0, 0, q.mul(&r1)), (1, 0, q2r.mul(&r1))],
        },
        RowSpec {
            generator: Generator::A10,
            case: "m = 0, n >= 2",
            terms: vec![
                (1, -2, r1.clone()),
                (0, 0, q_minus.mul(&r1)),
                (1, 0, q2r.mul(&r1)),
            ],
        },
        RowSpec {
            generator: Generator::A10,
            case: "m >= 1, n = 0",
            terms: vec![
                (-1, 2, qr.mul(&q.add(&one))),
                (1, 0, q2r2.clone()),
                (0, 0, q_minus.clone()),
                (-1, 0, one.clone()),
            ],
        },
        RowSpec {
            generator: Generator::A10,
            case: "m >= 1, n = 1",
            terms: vec![
                (1, 0, q2r2.clone()),
                (-1, 2, q2r.clone()),
                (-1, 0, one.clone()),
                (0, 0, qr.add(&q).sub(&one)),
            ],
        },
        RowSpec {
            generator: Generator::A10,
            case: "m >= 1, n >= 2",
            terms: vec![
                (1, -2, r.clone()),
                (0, 0, q_minus.mul(&r1)),
                (1, 0, q2r2),
                (-1, 2, q2r),
                (-1, 0, one),
            ],
        },
    ]
}

/// The four `A_{0,1}` rows in classification order: classes `(0,0)`,
/// `(0,n≥1)`, `(m≥1,0)`, `(m≥1,n≥1)`.
fn a01_rows() -> Vec<RowSpec> {
    let one = p_one();
    let q = p_q();
    let r = p_r();
    let qr = p_qr();
    let q2r = Poly2::term(1, 2, 1);
    vec![
        RowSpec {
            generator: Generator::A01,
            case: "m = 0, n = 0 (unit)",
            terms: vec![(0, 1, n01_poly())],
        },
        RowSpec {
            generator: Generator::A01,
            case: "m = 0, n >= 1",
            terms: vec![
                (0, -1, one.clone()),
                (0, 1, q2r.clone()),
                (1, -1, q.mul(&r.add(&one))),
            ],
        },
        RowSpec {
            generator: Generator::A01,
            case: "m >= 1, n = 0",
            terms: vec![
                (-1, 1, q.add(&one)),
                (0, 1, qr.mul(&q.add(&one))),
            ],
        },
        RowSpec {
            generator: Generator::A01,
            case: "m >= 1, n >= 1",
            terms: vec![(0, -1, one), (1, -1, qr), (-1, 1, q), (0, 1, q2r)],
        },
    ]
}

fn a10_class(m: u64, n: u64) -> usize {
    match (m, n) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, _) => 2,
        (_, 0) => 3,
        (_, 1) => 4,
        (_, _) => 5,
    }
}

fn a01_class(m: u64, n: u64) -> usize {
    match (m, n) {
        (0, 0) => 0,
        (0, _) => 1,
        (_, 0) => 2,
        (_, _) => 3,
    }
}

/// Verdict for one recursion row under the symbolic audit.
#[derive(Clone, Debug)]
pub struct RowAudit {
    pub generator: &'static str,
    pub case: &'static str,
    /// Whether the row's coefficients sum to the generator's sphere size as a
    /// polynomial identity in `(q, r)` — the condition for the convolution to
    /// carry probability distributions to probability distributions.
    pub preserves_total: bool,
}

/// Symbolic audit of every recursion row (including the derived boundary
/// row): each row's coefficient sum must equal `N_{1,0}` or `N_{0,1}`
/// identically in `(q, r)`.
pub fn audit_recursion_rows() -> Vec<RowAudit> {
    let mut out = Vec::new();
    for (rows, total) in [(a10_rows(), n10_poly()), (a01_rows(), n01_poly())] {
        for row in rows {
            let sum = row
                .terms
                .iter()
                .fold(Poly2::zero(), |acc, (_, _, c)| acc.add(c));
            out.push(RowAudit {
                generator: row.generator.label(),
                case: row.case,
                preserves_total: sum.sub(&total).is_zero(),
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Parameters and lattice distributions.
// ---------------------------------------------------------------------------

/// Thickness parameters of a C̃₂ building whose special vertices are walked:
/// `q` is the common panel parameter of the two outer node types, `r` the
/// middle one. Both must exceed 1.
#[derive(Clone, Debug, PartialEq)]
pub struct C2Params<S: Scalar> {
    q: S,
    r: S,
}

impl<S: Scalar> C2Params<S> {
    pub fn new(q: S, r: S) -> Result<Self> {
        for (name, v) in [("q", &q), ("r", &r)] {
            let above_one = v.clone() - S::one();
            if !above_one.is_nonnegative() || above_one.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "thickness parameter {name} must exceed 1, got {v}"
                )));
            }
        }
        Ok(C2Params { q, r })
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn r(&self) -> &S {
        &self.r
    }

    /// `N_{k,l} = |V_{k,l}(x)|`, the size of the sphere of vertices at
    /// lattice distance `(k, l)`:
    /// `N_{0,0} = 1`, `N_{k,0} = (r+1)(qr+1)q·(q²r²)^{k−1}`,
    /// `N_{0,l} = (q+1)(qr+1)·(q²r)^{l−1}`, and
    /// `N_{k,l} = (q+1)(r+1)(qr+1)q²r·(q²r²)^{k−1}(q²r)^{l−1}` for k,l ≥ 1.
    pub fn vertex_count(&self, k: u64, l: u64) -> S {
        let one = S::one;
        let q = &self.q;
        let r = &self.r;
        let qr = q.clone() * r.clone();
        let q2r2 = qr.clone() * qr.clone();
        let q2r = q.clone() * qr.clone();
        match (k, l) {
            (0, 0) => one(),
            (k, 0) => {
                (r.clone() + one())
                    * (qr.clone() + one())
                    * q.clone()
                    * scalar_pow(&q2r2, k - 1)
            }
            (0, l) => (q.clone() + one()) * (qr.clone() + one()) * scalar_pow(&q2r, l - 1),
            (k, l) => {
                (q.clone() + one())
                    * (r.clone() + one())
                    * (qr.clone() + one())
                    * q2r.clone()
                    * scalar_pow(&q2r2, k - 1)
                    * scalar_pow(&q2r, l - 1)
            }
        }
    }
}

/// Sparse element `Σ b_{k,l}·A_{k,l}` of the averaging-operator algebra,
/// keyed by lattice distance. Stores no zeros. When it represents the n-step
/// coefficients of a probability walk, the coefficients are nonnegative with
/// total 1, and the walk probability at a vertex in `V_{k,l}(x)` is
/// `b_{k,l}/N_{k,l}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeDistribution<S: Scalar> {
    coeffs: BTreeMap<(u64, u64), S>,
}

impl<S: Scalar> LatticeDistribution<S> {
    pub fn zero() -> Self {
        LatticeDistribution {
            coeffs: BTreeMap::new(),
        }
    }

    /// The point mass `A_{k,l}` itself.
    pub fn delta(k: u64, l: u64) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((k, l), S::one());
        LatticeDistribution { coeffs }
    }

    /// Merge duplicate keys by addition and drop zeros.
    pub fn from_weights(weights: impl IntoIterator<Item = ((u64, u64), S)>) -> Self {
        let mut coeffs: BTreeMap<(u64, u64), S> = BTreeMap::new();
        for (key, w) in weights {
            let entry = coeffs.entry(key).or_insert_with(S::zero);
            *entry = entry.clone() + w;
        }
        coeffs.retain(|_, v| !v.is_zero());
        LatticeDistribution { coeffs }
    }

    pub fn coefficient(&self, k: u64, l: u64) -> S {
        self.coeffs.get(&(k, l)).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u64, u64), &S)> {
        self.coeffs.iter()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn total(&self) -> S {
        self.coeffs
            .values()
            .fold(S::zero(), |acc, v| acc + v.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&k, v)| (k, c.clone() * v.clone()))
            .collect();
        LatticeDistribution { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&key, v) in &other.coeffs {
            let entry = coeffs.entry(key).or_insert_with(S::zero);
            *entry = entry.clone() + v.clone();
        }
        coeffs.retain(|_, v| !v.is_zero());
        LatticeDistribution { coeffs }
    }

    /// Nonnegative coefficients with total 1 (up to 1e-12 for floats).
    pub fn is_probability(&self) -> bool {
        if !self.coeffs.values().all(|v| v.is_nonnegative()) {
            return false;
        }
        let total = self.total();
        if S::EXACT {
            total.is_one()
        } else {
            (total.to_f64_approx() - 1.0).abs() <= 1e-12
        }
    }
}

// ---------------------------------------------------------------------------
// Exact evolution through the recursion rows.
// ---------------------------------------------------------------------------

/// Recursion rows with coefficients evaluated at concrete parameters and
/// pre-divided by the generator's sphere size, so each row maps probability
/// mass to probability mass with no further normalization.
struct EvaluatedRows<S: Scalar> {
    a10: Vec<Vec<(i64, i64, S)>>,
    a01: Vec<Vec<(i64, i64, S)>>,
}

impl<S: Scalar> EvaluatedRows<S> {
    fn new(p: &C2Params<S>) -> Self {
        let eval = |rows: Vec<RowSpec>, total: Poly2| -> Vec<Vec<(i64, i64, S)>> {
            let n_inv = total.eval(&p.q, &p.r).recip();
            rows.into_iter()
                .map(|row| {
                    row.terms
                        .into_iter()
                        .map(|(dm, dn, c)| (dm, dn, c.eval(&p.q, &p.r) * n_inv.clone()))
                        .collect()
                })
                .collect()
        };
        EvaluatedRows {
            a10: eval(a10_rows(), n10_poly()),
            a01: eval(a01_rows(), n01_poly()),
        }
    }

    fn apply(&self, dist: &LatticeDistribution<S>, gen: Generator) -> LatticeDistribution<S> {
        let mut coeffs: BTreeMap<(u64, u64), S> = BTreeMap::new();
        for (&(m, n), c) in &dist.coeffs {
            let row = match gen {
                Generator::A10 => &self.a10[a10_class(m, n)],
                Generator::A01 => &self.a01[a01_class(m, n)],
            };
            for (dm, dn, w) in row {
                let k = m as i64 + dm;
                let l = n as i64 + dn;
                debug_assert!(k >= 0 && l >= 0, "recursion row left the lattice");
                let entry = coeffs.entry((k as u64, l as u64)).or_insert_with(S::zero);
                *entry = entry.clone() + c.clone() * w.clone();
            }
        }
        coeffs.retain(|_, v| !v.is_zero());
        LatticeDistribution { coeffs }
    }
}

/// Right-multiply by one generator average: distributes each stored
/// `A_{m,n}`-coefficient across the matching recursion row, divided by the
/// generator's sphere size. The shipped rows (including the derived `(0,1)`
/// boundary row) cover every lattice point, so the `unsupported-boundary`
/// error is currently unreachable; it stays in the signature because the row
/// table, not the caller, decides coverage.
pub fn right_mul_generator<S: Scalar>(
    p: &C2Params<S>,
    dist: &LatticeDistribution<S>,
    gen: Generator,
) -> Result<LatticeDistribution<S>> {
    Ok(EvaluatedRows::new(p).apply(dist, gen))
}

fn validate_step_walk<S: Scalar>(walk: &LatticeDistribution<S>) -> Result<()> {
    for (&(k, l), _) in walk.iter() {
        if !matches!((k, l), (0, 0) | (1, 0) | (0, 1)) {
            return Err(Error::InvalidInput(format!(
                "one-step evolution supports walks on A_(0,0), A_(1,0), A_(0,1); \
                 found weight at ({k},{l})"
            )));
        }
    }
    if !walk.is_probability() {
        return Err(Error::InvalidWalk(format!(
            "walk weights must be a probability distribution, total {}",
            walk.total()
        )));
    }
    Ok(())
}

struct WalkEngine<S: Scalar> {
    rows: EvaluatedRows<S>,
    lazy: S,
    a10: S,
    a01: S,
}

impl<S: Scalar> WalkEngine<S> {
    fn new(p: &C2Params<S>, walk: &LatticeDistribution<S>) -> Result<Self> {
        validate_step_walk(walk)?;
        Ok(WalkEngine {
            rows: EvaluatedRows::new(p),
            lazy: walk.coefficient(0, 0),
            a10: walk.coefficient(1, 0),
            a01: walk.coefficient(0, 1),
        })
    }

    fn step(&self, dist: &LatticeDistribution<S>) -> LatticeDistribution<S> {
        let mut next = dist.scale(&self.lazy);
        if !self.a10.is_zero() {
            next = next.add(&self.rows.apply(dist, Generator::A10).scale(&self.a10));
        }
        if !self.a01.is_zero() {
            next = next.add(&self.rows.apply(dist, Generator::A01).scale(&self.a01));
        }
        next
    }
}

/// Coefficients `a_{k,l}^{(n)}` of the n-th power of the walk operator
/// `Σ a_g A_g`, for a walk supported on the identity and the two generators.
/// The walk probability at a vertex of `V_{k,l}(x)` is
/// `a_{k,l}^{(n)} / N_{k,l}`.
pub fn exact_n_step<S: Scalar>(
    p: &C2Params<S>,
    walk: &LatticeDistribution<S>,
    n: u32,
) -> Result<LatticeDistribution<S>> {
    let engine = WalkEngine::new(p, walk)?;
    let mut dist = LatticeDistribution::delta(0, 0);
    for _ in 0..n {
        dist = engine.step(&dist);
    }
    Ok(dist)
}

/// [`exact_n_step`] for every step `0..=n_max` at once.
pub fn exact_series<S: Scalar>(
    p: &C2Params<S>,
    walk: &LatticeDistribution<S>,
    n_max: u32,
) -> Result<Vec<LatticeDistribution<S>>> {
    let engine = WalkEngine::new(p, walk)?;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(LatticeDistribution::delta(0, 0));
    for _ in 0..n_max {
        let next = engine.step(out.last().expect("seeded"));
        out.push(next);
    }
    Ok(out)
}

/// Return probabilities `p^{(n)}(x,x) = a_{0,0}^{(n)}` for `n = 0..=n_max`,
/// holding only one distribution in memory — the long-horizon entry point.
pub fn return_probability_series<S: Scalar>(
    p: &C2Params<S>,
    walk: &LatticeDistribution<S>,
    n_max: u32,
) -> Result<Vec<S>> {
    let engine = WalkEngine::new(p, walk)?;
    let mut dist = LatticeDistribution::delta(0, 0);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(dist.coefficient(0, 0));
    for _ in 0..n_max {
        dist = engine.step(&dist);
        out.push(dist.coefficient(0, 0));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spectral route.
// ---------------------------------------------------------------------------

/// A point of the two-torus: a pair of unit-modulus complex numbers.
#[derive(Clone, Copy, Debug)]
pub struct TorusPoint {
    t1: Complex64,
    t2: Complex64,
}

impl TorusPoint {
    pub fn from_angles(theta1: f64, theta2: f64) -> Self {
        TorusPoint {
            t1: Complex::cis(theta1),
            t2: Complex::cis(theta2),
        }
    }

    pub fn t1(&self) -> Complex64 {
        self.t1
    }

    pub fn t2(&self) -> Complex64 {
        self.t2
    }
}

/// Uniform product quadrature on the torus with irrational phase offsets.
///
/// Node `⟨a, b⟩` sits at angles `θ₁ = 2π(a + √2/4)/n₁`,
/// `θ₂ = 2π(b + √3/4)/n₂`, each with weight `1/(n₁n₂)` — the trapezoid rule
/// for periodic integrands, phase-shifted so that no node ever satisfies
/// `z₁ = z₂^{±1}` or `z_i = ±1`: those conditions would force
/// `√2·n₂ ± √3·n₁` or `√2` (resp. `√3`) to be rational.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureGrid {
    n1: u32,
    n2: u32,
}

/// Phase offsets (as fractions of the grid step) keeping nodes regular.
const GRID_OFFSET_1: f64 = SQRT_2 / 4.0;
const GRID_OFFSET_2: f64 = 1.7320508075688772 / 4.0; // √3/4

impl QuadratureGrid {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidInput(format!(
                "quadrature grid needs at least one node per axis, got {n1}x{n2}"
            )));
        }
        Ok(QuadratureGrid { n1, n2 })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn node_count(&self) -> u64 {
        self.n1 as u64 * self.n2 as u64
    }

    /// All nodes with their quadrature weights (the weights sum to 1).
    pub fn nodes(&self) -> impl Iterator<Item = (TorusPoint, f64)> + '_ {
        let weight = 1.0 / (self.n1 as f64 * self.n2 as f64);
        (0..self.n1).flat_map(move |a| {
            (0..self.n2).map(move |b| {
                let theta1 = TAU * (a as f64 + GRID_OFFSET_1) / self.n1 as f64;
                let theta2 = TAU * (b as f64 + GRID_OFFSET_2) / self.n2 as f64;
                (TorusPoint::from_angles(theta1, theta2), weight)
            })
        })
    }
}

/// Modulus below which a `c`-function denominator factor counts as an exact
/// hit on the singular set. Grid nodes stay several orders of magnitude away.
const SINGULAR_TOL: f64 = 1e-12;

/// The full orbit of `(z₁, z₂)` under coordinate swaps and inversions.
fn torus_orbit(z1: Complex64, z2: Complex64) -> [(Complex64, Complex64); 8] {
    let (a, ai, b, bi) = (z1, z1.inv(), z2, z2.inv());
    [
        (a, b),
        (ai, b),
        (a, bi),
        (ai, bi),
        (b, a),
        (bi, a),
        (b, ai),
        (bi, ai),
    ]
}

impl C2Params<f64> {
    /// `(1 + q⁻¹)(1 + r⁻¹)(1 + q⁻¹r⁻¹)` — the common normalizer of the
    /// symmetrized spherical sums; also eight times the Plancherel constant.
    fn spherical_normalizer(&self) -> f64 {
        (1.0 + 1.0 / self.q) * (1.0 + 1.0 / self.r) * (1.0 + 1.0 / (self.q * self.r))
    }

    /// The constant `K = (1/8)(1+q⁻¹)(1+r⁻¹)(1+q⁻¹r⁻¹)` in the Plancherel
    /// density `K/|c(t)|²`.
    pub fn plancherel_constant(&self) -> f64 {
        self.spherical_normalizer() / 8.0
    }

    /// Numerator and denominator products of the `c`-function, plus the
    /// smallest denominator-factor modulus (the singularity witness).
    fn c_parts(&self, z1: Complex64, z2: Complex64) -> (Complex64, Complex64, f64) {
        let one = Complex64::new(1.0, 0.0);
        let (qi, ri) = (1.0 / self.q, 1.0 / self.r);
        let (w1, w2) = (z1.inv(), z2.inv());
        let den_factors = [
            one - w1 * w2,
            one - w1 * z2,
            one - w1 * w1,
            one - w2 * w2,
        ];
        let num = (one - qi * w1 * w2)
            * (one - qi * w1 * z2)
            * (one - ri * w1 * w1)
            * (one - ri * w2 * w2);
        let den = den_factors.iter().product();
        let min_factor = den_factors
            .iter()
            .map(|f| f.norm())
            .fold(f64::INFINITY, f64::min);
        (num, den, min_factor)
    }

    fn singular_error(z1: Complex64, z2: Complex64) -> Error {
        Error::SingularPoint {
            z1: z1.to_string(),
            z2: z2.to_string(),
        }
    }

    /// The Harish-Chandra `c`-function
    /// `c(z₁,z₂) = [(1−q⁻¹z₁⁻¹z₂⁻¹)(1−q⁻¹z₁⁻¹z₂)(1−r⁻¹z₁⁻²)(1−r⁻¹z₂⁻²)] /
    /// [(1−z₁⁻¹z₂⁻¹)(1−z₁⁻¹z₂)(1−z₁⁻²)(1−z₂⁻²)]` at nonzero complex
    /// arguments off its singular set `{z₁ = z₂^{±1}} ∪ {z_i² = 1}`.
    pub fn c_func(&self, z1: Complex64, z2: Complex64) -> Result<Complex64> {
        for z in [z1, z2] {
            if !z.is_finite() || z.norm() < 1e-300 {
                return Err(Error::InvalidInput(format!(
                    "c-function arguments must be nonzero finite complex numbers, got {z}"
                )));
            }
        }
        let (num, den, min_factor) = self.c_parts(z1, z2);
        if min_factor < SINGULAR_TOL {
            return Err(Self::singular_error(z1, z2));
        }
        Ok(num / den)
    }

    /// `c` evaluated over the whole swap-and-invert orbit of a torus point;
    /// all eight evaluations share one singularity verdict because the orbit
    /// shares one singular set.
    fn c_orbit(
        &self,
        z1: Complex64,
        z2: Complex64,
    ) -> Result<([(Complex64, Complex64); 8], [Complex64; 8])> {
        let orbit = torus_orbit(z1, z2);
        let mut values = [Complex64::new(0.0, 0.0); 8];
        for (i, &(w1, w2)) in orbit.iter().enumerate() {
            let (num, den, min_factor) = self.c_parts(w1, w2);
            if min_factor < SINGULAR_TOL {
                return Err(Self::singular_error(z1, z2));
            }
            values[i] = num / den;
        }
        Ok((orbit, values))
    }

    /// `(qr)^{−k}(q√r)^{−l} / normalizer` — the prefactor of `Â_{k,l}`.
    fn spherical_prefactor(&self, k: u64, l: u64) -> f64 {
        let qr_pow = scalar_pow(&(self.q * self.r), k);
        let qsr_pow = scalar_pow(&(self.q * self.r.sqrt()), l);
        1.0 / (qr_pow * qsr_pow * self.spherical_normalizer())
    }

    fn symmetrized_sum(
        orbit: &[(Complex64, Complex64); 8],
        c_values: &[Complex64; 8],
        k: u64,
        l: u64,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(w1, w2), &c) in orbit.iter().zip(c_values) {
            acc += c * w1.powu((k + l) as u32) * w2.powu(k as u32);
        }
        acc
    }

    /// The Gelfand transform `Â_{k,l}(t)` of the averaging operator
    /// `A_{k,l}`:
    ///
    /// `Â_{k,l}(t) = (qr)^{−k}(q√r)^{−l}·Σ_σ D(t_σ)·t_{σ(1)}^{k+l}·t_{σ(2)}^{k}`
    ///
    /// summed over the eight swap-and-invert images `t_σ` of `t`, with
    /// `D = c/((1+q⁻¹)(1+r⁻¹)(1+q⁻¹r⁻¹))`. The second exponent is the first
    /// index `k`: that convention is pinned by the requirement
    /// `Â_{0,1} = (q√r/N_{0,1})(t₁+t₁⁻¹+t₂+t₂⁻¹)` (see
    /// `spherical_function_matches_generator_transforms`) and by the spectral
    /// images of the recursion rows. Real-valued on the torus up to rounding.
    pub fn spherical_function(&self, k: u64, l: u64, t: &TorusPoint) -> Result<Complex64> {
        let (orbit, c_values) = self.c_orbit(t.t1, t.t2)?;
        let sum = Self::symmetrized_sum(&orbit, &c_values, k, l);
        Ok(sum * self.spherical_prefactor(k, l))
    }

    /// Plancherel density `K/|c(t)|²` against normalized Haar measure,
    /// evaluated in the form `K·|den(t)|²/|num(t)|²`, whose denominator never
    /// vanishes on the torus for thick parameters.
    pub fn plancherel_density(&self, t: &TorusPoint) -> Result<f64> {
        let (num, den, min_factor) = self.c_parts(t.t1, t.t2);
        if min_factor < SINGULAR_TOL {
            return Err(Self::singular_error(t.t1, t.t2));
        }
        Ok(self.plancherel_constant() * den.norm_sqr() / num.norm_sqr())
    }

    /// The spectral images of the two generator averages:
    /// `u = (qr/N_{1,0})·((1−q⁻¹)(1+r⁻¹) + (z₁+z₁⁻¹)(z₂+z₂⁻¹))` and
    /// `v = (q√r/N_{0,1})·(z₁+z₁⁻¹+z₂+z₂⁻¹)`, both invariant under the
    /// swap-and-invert orbit. At `z₁ = z₂ = 1`, `v` is the spectral radius of
    /// the vertex simple random walk.
    pub fn uv_from_z(&self, z1: Complex64, z2: Complex64) -> (Complex64, Complex64) {
        let s1 = z1 + z1.inv();
        let s2 = z2 + z2.inv();
        let n10 = self.vertex_count(1, 0);
        let n01 = self.vertex_count(0, 1);
        let u = (self.q * self.r / n10)
            * (Complex64::new((1.0 - 1.0 / self.q) * (1.0 + 1.0 / self.r), 0.0) + s1 * s2);
        let v = (self.q * self.r.sqrt() / n01) * (s1 + s2);
        (u, v)
    }

    /// Max orthogonality defect of the spherical functions under the
    /// Plancherel quadrature: over all `(k,l), (m,n)` with entries `≤ kmax`,
    /// the worst `|N_{m,n}·Σ_nodes w·density·Â_{k,l}Â_{m,n} − δ|`.
    ///
    /// The exact relation is `N_{m,n}·∫Â_{k,l}Â_{m,n}dμ = δ` for the
    /// averaging-normalized functions computed here — equivalently
    /// `|∫Ŝ_{k,l}Ŝ_{m,n}dμ − δ·N_{k,l}|/N_{k,l}` for the sum-normalized
    /// functions `Ŝ = N·Â`, whose Plancherel norms are the sphere sizes.
    pub fn orthogonality_check(&self, grid: &QuadratureGrid, kmax: u64) -> Result<f64> {
        let side = (kmax + 1) as usize;
        let indices: Vec<(u64, u64)> = (0..=kmax)
            .flat_map(|k| (0..=kmax).map(move |l| (k, l)))
            .collect();
        let counts: Vec<f64> = indices
            .iter()
            .map(|&(k, l)| self.vertex_count(k, l))
            .collect();
        let dim = side * side;
        let mut gram = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut values = vec![Complex64::new(0.0, 0.0); dim];
        for (t, w) in grid.nodes() {
            let (orbit, c_values) = self.c_orbit(t.t1, t.t2)?;
            let dw = w * self.plancherel_density(&t)?;
            for (slot, &(k, l)) in indices.iter().enumerate() {
                values[slot] = Self::symmetrized_sum(&orbit, &c_values, k, l)
                    * self.spherical_prefactor(k, l);
            }
            for i in 0..dim {
                for j in i..dim {
                    gram[i * dim + j] += dw * values[i] * values[j];
                }
            }
        }
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let integral = if j >= i {
                    gram[i * dim + j]
                } else {
                    gram[j * dim + i]
                };
                let expected = if i == j { 1.0 } else { 0.0 };
                let defect = (counts[j] * integral - expected).norm();
                worst = worst.max(defect);
            }
        }
        Ok(worst)
    }

    /// n-step transition probability to a vertex of `V_{k,l}(x)` by the
    /// Plancherel integral `∫ Â(t)ⁿ·Â_{k,l}(t) dμ(t)`, where
    /// `Â = Σ a_{m,n}Â_{m,n}` is the walk's transform: by the orthogonality
    /// `N·∫ÂÂdμ = δ`, the integral picks out `a_{k,l}^{(n)}/N_{k,l}`, the
    /// per-vertex probability. Any finitely supported probability walk is
    /// accepted — not just generator walks. For probability walks the result
    /// lies in `[−ε, 1+ε]` with `ε` the quadrature error.
    pub fn pn_spectral(
        &self,
        walk: &LatticeDistribution<f64>,
        n: u32,
        k: u64,
        l: u64,
        grid: &QuadratureGrid,
    ) -> Result<f64> {
        if !walk.is_probability() {
            return Err(Error::InvalidWalk(format!(
                "walk weights must be a probability distribution, total {}",
                walk.total()
            )));
        }
        let support: Vec<((u64, u64), f64)> = walk.iter().map(|(&kl, &a)| (kl, a)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, w) in grid.nodes() {
            let (orbit, c_values) = self.c_orbit(t.t1, t.t2)?;
            let dw = w * self.plancherel_density(&t)?;
            let mut walk_hat = Complex64::new(0.0, 0.0);
            for &((m, nn), a) in &support {
                walk_hat += a
                    * Self::symmetrized_sum(&orbit, &c_values, m, nn)
                    * self.spherical_prefactor(m, nn);
            }
            let target = Self::symmetrized_sum(&orbit, &c_values, k, l)
                * self.spherical_prefactor(k, l);
            acc += dw * walk_hat.powu(n) * target;
        }
        Ok(acc.re)
    }

    /// [`Self::pn_spectral`] for every step `0..=n_max` and several targets
    /// in a single pass over the grid; row `n` holds the probabilities in
    /// target order.
    pub fn pn_spectral_series(
        &self,
        walk: &LatticeDistribution<f64>,
        n_max: u32,
        targets: &[(u64, u64)],
        grid: &QuadratureGrid,
    ) -> Result<Vec<Vec<f64>>> {
        if !walk.is_probability() {
            return Err(Error::InvalidWalk(format!(
                "walk weights must be a probability distribution, total {}",
                walk.total()
            )));
        }
        let support: Vec<((u64, u64), f64)> = walk.iter().map(|(&kl, &a)| (kl, a)).collect();
        let rows = n_max as usize + 1;
        let mut acc = vec![Complex64::new(0.0, 0.0); rows * targets.len()];
        let mut target_vals = vec![Complex64::new(0.0, 0.0); targets.len()];
        for (t, w) in grid.nodes() {
            let (orbit, c_values) = self.c_orbit(t.t1, t.t2)?;
            let dw = w * self.plancherel_density(&t)?;
            let mut walk_hat = Complex64::new(0.0, 0.0);
            for &((m, nn), a) in &support {
                walk_hat += a
                    * Self::symmetrized_sum(&orbit, &c_values, m, nn)
                    * self.spherical_prefactor(m, nn);
            }
            for (slot, &(k, l)) in targets.iter().enumerate() {
                target_vals[slot] = Self::symmetrized_sum(&orbit, &c_values, k, l)
                    * self.spherical_prefactor(k, l);
            }
            let mut power = Complex64::new(dw, 0.0);
            for n in 0..rows {
                for (slot, tv) in target_vals.iter().enumerate() {
                    acc[n * targets.len() + slot] += power * tv;
                }
                power *= walk_hat;
            }
        }
        Ok((0..rows)
            .map(|n| {
                (0..targets.len())
                    .map(|slot| acc[n * targets.len() + slot].re)
                    .collect()
            })
            .collect())
    }

    /// Spectral radius `ρ = 4q√r/((q+1)(qr+1))` of the vertex simple random
    /// walk — the transform `Â_{0,1}` at the identity point of the torus.
    pub fn srw_spectral_radius(&self) -> f64 {
        4.0 * self.q * self.r.sqrt() / self.vertex_count(0, 1)
    }

    /// `C = 24(q+1)(r+1)(qr+1)q²r² / (π(q−1)⁴(r−1)⁴)` — the constant of the
    /// local-limit asymptote.
    fn llt_constant(&self) -> f64 {
        let (q, r) = (self.q, self.r);
        24.0 * (q + 1.0) * (r + 1.0) * (q * r + 1.0) * q * q * r * r
            / (PI * (q - 1.0).powi(4) * (r - 1.0).powi(4))
    }

    /// Local-limit asymptote of the simple-random-walk return probability:
    /// returns `(ρ, C·ρ²ⁿ·n⁻⁵)` with
    /// `C = 24(q+1)(r+1)(qr+1)q²r² / (π(q−1)⁴(r−1)⁴)`, so that
    /// `p^{(2n)}(x,x) / (C·ρ²ⁿ·n⁻⁵) → 1`. Both exponents come from the
    /// Laplace expansion of the Plancherel integral at the two density
    /// maxima: the density vanishes to eighth order there, giving `n⁻⁵`
    /// rather than the `n⁻⁴` of a nondegenerate two-dimensional walk. The
    /// leading correction is of order `1/n` with a large coefficient
    /// (≈ 129/n at q = r = 2), so the ratio approaches 1 slowly; see
    /// [`Self::srw_llt_ratio`] for a direct high-horizon evaluation.
    pub fn srw_llt_asymptote(&self, n: u64) -> Result<(f64, f64)> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "the local-limit asymptote needs n >= 1".to_string(),
            ));
        }
        let rho = self.srw_spectral_radius();
        let value = self.llt_constant() * scalar_pow(&(rho * rho), n) * (n as f64).powi(-5);
        Ok((rho, value))
    }

    /// Ratio of the exact SRW return probability
    /// `p^{(2n)}(x,x) = ∫v(t)²ⁿdμ(t)` to the local-limit asymptote,
    /// evaluated with the integrand normalized as `(v/ρ)²ⁿ` so the ratio
    /// stays representable at horizons where both sides underflow. The grid
    /// must resolve the density peaks, whose width shrinks like `n^{-1/2}`.
    pub fn srw_llt_ratio(&self, n: u64, grid: &QuadratureGrid) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "the local-limit ratio needs n >= 1".to_string(),
            ));
        }
        let rho = self.srw_spectral_radius();
        let mut acc = 0.0;
        for (t, w) in grid.nodes() {
            let density = self.plancherel_density(&t)?;
            let (_, v) = self.uv_from_z(t.t1, t.t2);
            acc += w * density * (v.re / rho).abs().powf(2.0 * n as f64);
        }
        Ok(acc / (self.llt_constant() * (n as f64).powi(-5)))
    }
}
