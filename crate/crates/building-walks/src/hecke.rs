//! The algebra of averaging operators in the `T_w` basis.
//!
//! For a system with parameters `q_s`, the operator `T_w` averages over the
//! `w`-sphere; products follow the quadratic relation
//! `T_w T_s = T_{ws}` when the length goes up, and
//! `T_w T_s = q_s^{-1} T_{ws} + (1 - q_s^{-1}) T_w` when it goes down.
//! With that normalization every `T_w` is row-stochastic on chambers, so
//! convex combinations are exactly the isotropic walk operators and n-step
//! transition coefficients come out of iterated products — exactly, when the
//! scalar is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::coxeter::{word_name, CoxeterGroup};
use crate::error::Error;
use crate::scalar::Scalar;
use crate::Result;

/// A Coxeter system with one positive parameter per generator, plus the
/// cached per-element sphere sizes `q_w`. Shared immutably by all elements.
pub struct HeckeSystem<S: Scalar> {
    group: CoxeterGroup,
    params: Vec<S>,
    param_inv: Vec<S>,
    /// `1 - q_s^{-1}`, the diagonal coefficient of the quadratic relation
    relation_diag: Vec<S>,
    q: Vec<S>,
    q_inv: Vec<S>,
    poincare: S,
}

impl<S: Scalar> HeckeSystem<S> {
    /// Validates that parameters are positive and constant along odd bonds
    /// (the compatibility a parameter system must satisfy).
    pub fn new(group: CoxeterGroup, params: Vec<S>) -> Result<Arc<Self>> {
        if params.len() != group.rank() {
            return Err(Error::InvalidInput(format!(
                "expected {} parameters, got {}",
                group.rank(),
                params.len()
            )));
        }
        for (s, p) in params.iter().enumerate() {
            if p.is_zero() || !p.is_nonnegative() {
                return Err(Error::InvalidInput(format!(
                    "parameter q_{} must be positive, got {p}",
                    s + 1
                )));
            }
        }
        let classes = group.matrix().odd_bond_classes();
        for s in 0..group.rank() {
            for t in s + 1..group.rank() {
                if classes[s] == classes[t] && params[s] != params[t] {
                    return Err(Error::InvalidInput(format!(
                        "generators {} and {} are linked by odd bonds, so their \
                         parameters must agree (got {} and {})",
                        s + 1,
                        t + 1,
                        params[s],
                        params[t]
                    )));
                }
            }
        }
        let param_inv: Vec<S> = params.iter().map(|p| p.recip()).collect();
        let relation_diag: Vec<S> = param_inv.iter().map(|pi| S::one() - pi.clone()).collect();
        let q: Vec<S> = group.elements().map(|w| group.q_w(w, &params)).collect();
        let q_inv: Vec<S> = q.iter().map(|x| x.recip()).collect();
        let poincare = q.iter().fold(S::zero(), |acc, x| acc + x.clone());
        Ok(Arc::new(HeckeSystem {
            group,
            params,
            param_inv,
            relation_diag,
            q,
            q_inv,
            poincare,
        }))
    }

    pub fn group(&self) -> &CoxeterGroup {
        &self.group
    }

    pub fn param(&self, s: usize) -> &S {
        &self.params[s]
    }

    pub fn params(&self) -> &[S] {
        &self.params
    }

    /// Sphere size `q_w` (product of parameters along a reduced word).
    pub fn q_w(&self, w: usize) -> &S {
        &self.q[w]
    }

    pub fn q_w_inv(&self, w: usize) -> &S {
        &self.q_inv[w]
    }

    /// `sum_w q_w`: the chamber count of the finite model geometry.
    pub fn poincare(&self) -> &S {
        &self.poincare
    }
}

impl<S: Scalar> fmt::Debug for HeckeSystem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HeckeSystem(rank {}, order {})", self.group.rank(), self.group.order())
    }
}

/// Element `sum_w a_w T_w`, sparse over the group basis. Zero coefficients
/// are never stored.
#[derive(Clone)]
pub struct HeckeElement<S: Scalar> {
    system: Arc<HeckeSystem<S>>,
    coeffs: BTreeMap<usize, S>,
}

impl<S: Scalar> HeckeElement<S> {
    pub fn zero(system: &Arc<HeckeSystem<S>>) -> Self {
        HeckeElement {
            system: Arc::clone(system),
            coeffs: BTreeMap::new(),
        }
    }

    /// The identity `T_e`.
    pub fn identity(system: &Arc<HeckeSystem<S>>) -> Self {
        Self::basis(system, CoxeterGroup::IDENTITY)
    }

    pub fn basis(system: &Arc<HeckeSystem<S>>, w: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(w, S::one());
        HeckeElement {
            system: Arc::clone(system),
            coeffs,
        }
    }

    pub fn from_coeffs(
        system: &Arc<HeckeSystem<S>>,
        entries: impl IntoIterator<Item = (usize, S)>,
    ) -> Self {
        let mut x = Self::zero(system);
        for (w, c) in entries {
            x.add_term(w, c);
        }
        x
    }

    pub fn system(&self) -> &Arc<HeckeSystem<S>> {
        &self.system
    }

    pub fn coefficient(&self, w: usize) -> S {
        self.coeffs.get(&w).cloned().unwrap_or_else(S::zero)
    }

    /// Nonzero coefficients in element-id order.
    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().map(|(&w, c)| (w, c))
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    fn add_term(&mut self, w: usize, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(Arc::ptr_eq(&self.system, &other.system));
        let mut out = self.clone();
        for (&w, c) in &other.coeffs {
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.system);
        }
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = v.clone() * c.clone();
        }
        out
    }

    /// Sum of coefficients. Products of stochastic elements keep this at 1.
    pub fn coefficient_sum(&self) -> S {
        self.coeffs
            .values()
            .fold(S::zero(), |acc, c| acc + c.clone())
    }

    /// `self * T_s` via the quadratic relation, term by term.
    pub fn mul_generator(&self, s: usize) -> Self {
        let sys = &self.system;
        let mut out = Self::zero(sys);
        for (&w, c) in &self.coeffs {
            let (ws, sign) = sys.group.right_multiply(w, s);
            if sign > 0 {
                out.add_term(ws, c.clone());
            } else {
                out.add_term(ws, c.clone() * sys.param_inv[s].clone());
                out.add_term(w, c.clone() * sys.relation_diag[s].clone());
            }
        }
        out
    }

    /// `T_s * self`, the left-handed mirror of [`Self::mul_generator`].
    pub fn generator_mul(&self, s: usize) -> Self {
        let sys = &self.system;
        let mut out = Self::zero(sys);
        for (&w, c) in &self.coeffs {
            let (sw, sign) = sys.group.left_multiply(s, w);
            if sign > 0 {
                out.add_term(sw, c.clone());
            } else {
                out.add_term(sw, c.clone() * sys.param_inv[s].clone());
                out.add_term(w, c.clone() * sys.relation_diag[s].clone());
            }
        }
        out
    }

    /// Product. The operand with smaller support is expanded along reduced
    /// words (each basis term becomes a cascade of generator multiplications
    /// applied to the other operand), which keeps the cost near
    /// `support(large) * total word length(small)`.
    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            Arc::ptr_eq(&self.system, &other.system),
            "operands belong to different systems"
        );
        let sys = &self.system;
        let mut out = Self::zero(sys);
        if other.support_size() <= self.support_size() {
            // self * sum_v b_v T_v: right-cascade self along each v
            for (&v, b) in &other.coeffs {
                let mut acc = self.clone();
                for &s in sys.group.word(v) {
                    acc = acc.mul_generator(s as usize);
                }
                out = out.add(&acc.scale(b));
            }
        } else {
            // sum_u a_u T_u * other: left-cascade other along each u,
            // applying the word right-to-left
            for (&u, a) in &self.coeffs {
                let mut acc = other.clone();
                for &s in sys.group.word(u).iter().rev() {
                    acc = acc.generator_mul(s as usize);
                }
                out = out.add(&acc.scale(a));
            }
        }
        out
    }

    /// Adjoint for the canonical inner product: conjugate coefficients,
    /// inverted words.
    pub fn star(&self) -> Self {
        let sys = &self.system;
        let mut out = Self::zero(sys);
        for (&w, c) in &self.coeffs {
            out.add_term(sys.group.inverse(w), c.conj());
        }
        out
    }

    /// When `self` is the n-step operator of a walk started at chamber `x`,
    /// the probability of landing on any single chamber at sphere-distance
    /// `w` is the `T_w` coefficient spread over the `q_w`-point sphere.
    pub fn point_probability(&self, w: usize) -> S {
        self.coefficient(w) * self.system.q_inv[w].clone()
    }
}

impl<S: Scalar> fmt::Display for HeckeElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&w, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c}*T[{}]", word_name(self.system.group.word(w)))?;
            first = false;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for HeckeElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Coefficient of `T_w` in `T_u T_v`.
pub fn structure_constant<S: Scalar>(
    system: &Arc<HeckeSystem<S>>,
    u: usize,
    v: usize,
    w: usize,
) -> S {
    HeckeElement::basis(system, u)
        .mul(&HeckeElement::basis(system, v))
        .coefficient(w)
}

/// An isotropic walk: a convex combination of the averaging operators,
/// validated on construction (nonnegative weights summing to one).
#[derive(Clone)]
pub struct WalkSpec<S: Scalar> {
    system: Arc<HeckeSystem<S>>,
    weights: BTreeMap<usize, S>,
}

impl<S: Scalar> WalkSpec<S> {
    pub fn new(
        system: &Arc<HeckeSystem<S>>,
        weights: impl IntoIterator<Item = (usize, S)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<usize, S> = BTreeMap::new();
        for (w, a) in weights {
            if w >= system.group.order() {
                return Err(Error::InvalidWalk(format!("element id {w} out of range")));
            }
            if !a.is_nonnegative() {
                return Err(Error::InvalidWalk(format!(
                    "weight of {} is negative ({a})",
                    word_name(system.group.word(w))
                )));
            }
            if a.is_zero() {
                continue;
            }
            let prev = map.insert(w, a);
            if prev.is_some() {
                return Err(Error::InvalidWalk(format!(
                    "duplicate weight for {}",
                    word_name(system.group.word(w))
                )));
            }
        }
        let total = map.values().fold(S::zero(), |acc, a| acc + a.clone());
        let ok = if S::EXACT {
            total.is_one()
        } else {
            (total.to_f64_approx() - 1.0).abs() <= 1e-12
        };
        if !ok {
            return Err(Error::InvalidWalk(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(WalkSpec {
            system: Arc::clone(system),
            weights: map,
        })
    }

    /// Nearest-neighbour walk: step to a uniformly random adjacent chamber,
    /// so each generator gets weight proportional to its panel size.
    pub fn simple(system: &Arc<HeckeSystem<S>>) -> Self {
        let group = system.group();
        let degree = system
            .params
            .iter()
            .fold(S::zero(), |acc, p| acc + p.clone());
        let weights: Vec<(usize, S)> = (0..group.rank())
            .map(|s| {
                let id = group
                    .reduce(&[s as u8])
                    .expect("generators are valid words");
                (id, system.params[s].clone() / degree.clone())
            })
            .collect();
        Self::new(system, weights).expect("simple walk weights form a distribution")
    }

    pub fn system(&self) -> &Arc<HeckeSystem<S>> {
        &self.system
    }

    pub fn weight(&self, w: usize) -> S {
        self.weights.get(&w).cloned().unwrap_or_else(S::zero)
    }

    pub fn weights(&self) -> impl Iterator<Item = (usize, &S)> {
        self.weights.iter().map(|(&w, a)| (w, a))
    }

    /// The walk operator as an algebra element.
    pub fn operator(&self) -> HeckeElement<S> {
        HeckeElement::from_coeffs(
            &self.system,
            self.weights.iter().map(|(&w, a)| (w, a.clone())),
        )
    }

    /// n-step operator, built by iterated right multiplication (each step
    /// multiplies by the one-step operator; no squaring shortcuts, so exact
    /// coefficient growth stays visible).
    pub fn n_step(&self, n: u32) -> HeckeElement<S> {
        let op = self.operator();
        let mut acc = HeckeElement::identity(&self.system);
        for _ in 0..n {
            acc = acc.mul(&op);
        }
        acc
    }
}
